//! In-order command queue with completion events.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use super::engine::{BufferId, Context, KernelDef, KernelStats};
use super::{NdRange, OclError};

static NEXT_QUEUE: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EventId {
    queue: u64,
    index: usize,
}

#[derive(Debug, Clone)]
pub enum Command {
    Kernel {
        kernel: Arc<KernelDef>,
        range: NdRange,
    },
    Write {
        buffer: BufferId,
        data: Vec<i64>,
    },
    Read {
        buffer: BufferId,
    },
    /// Completes once every previously enqueued command has completed.
    Barrier,
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Kernel { .. } => CommandKind::Kernel,
            Command::Write { .. } => CommandKind::Write,
            Command::Read { .. } => CommandKind::Read,
            Command::Barrier => CommandKind::Barrier,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Kernel,
    Write,
    Read,
    Barrier,
}

#[derive(Debug)]
struct Entry {
    label: String,
    command: Command,
    waits: Vec<EventId>,
    signals: usize,
}

/// One executed command. `start` and `end` are ticks of a logical clock that
/// advances at every command start and completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub label: String,
    pub kind: CommandKind,
    pub event: EventId,
    pub waits: Vec<EventId>,
    pub start: u64,
    pub end: u64,
    pub transfer_bytes: u64,
    pub stats: Option<KernelStats>,
}

#[derive(Debug, Clone, Default)]
pub struct QueueReport {
    pub trace: Vec<TraceEntry>,
    reads: Vec<(EventId, Vec<i64>)>,
}

impl QueueReport {
    /// Data returned by the read command that signals `event`.
    pub fn read_data(&self, event: EventId) -> Option<&[i64]> {
        self.reads.iter().find(|(e, _)| *e == event).map(|(_, d)| d.as_slice())
    }

    pub fn entry(&self, event: EventId) -> Option<&TraceEntry> {
        self.trace.iter().find(|t| t.event == event)
    }

    pub fn kernel_order(&self) -> Vec<&str> {
        self.trace.iter().filter(|t| t.kind == CommandKind::Kernel).map(|t| t.label.as_str()).collect()
    }
}

#[derive(Debug)]
pub struct CommandQueue {
    id: u64,
    entries: Vec<Entry>,
    /// Event index -> index of the command that signals it.
    signalers: Vec<Option<usize>>,
}

impl Default for CommandQueue {
    fn default() -> Self {
        Self::new()
    }
}

impl CommandQueue {
    pub fn new() -> Self {
        CommandQueue { id: NEXT_QUEUE.fetch_add(1, Ordering::Relaxed), entries: Vec::new(), signalers: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// An event not yet bound to a command; bind it with [`CommandQueue::enqueue_signaling`].
    pub fn create_event(&mut self) -> EventId {
        self.signalers.push(None);
        EventId { queue: self.id, index: self.signalers.len() - 1 }
    }

    fn check_event(&self, e: EventId) -> Result<(), OclError> {
        if e.queue != self.id || e.index >= self.signalers.len() {
            return Err(OclError::DanglingEvent);
        }
        Ok(())
    }

    fn validate(&self, ctx: &Context, command: &Command, waits: &[EventId]) -> Result<(), OclError> {
        for &w in waits {
            self.check_event(w)?;
        }
        match command {
            Command::Kernel { kernel, .. } => ctx.validate_kernel(kernel),
            Command::Write { buffer, data } => {
                let len = ctx.buffer(*buffer)?.store().len();
                if data.len() != len {
                    return Err(OclError::InvalidBuffer(format!(
                        "write of {} elements into a buffer of {len}",
                        data.len()
                    )));
                }
                Ok(())
            }
            Command::Read { buffer } => ctx.buffer(*buffer).map(|_| ()),
            Command::Barrier => Ok(()),
        }
    }

    pub fn enqueue(
        &mut self,
        ctx: &Context,
        label: impl Into<String>,
        command: Command,
        waits: &[EventId],
    ) -> Result<EventId, OclError> {
        self.validate(ctx, &command, waits)?;
        let event = self.create_event();
        self.push(label.into(), command, waits, event);
        Ok(event)
    }

    /// Enqueues a command that signals a previously created event.
    pub fn enqueue_signaling(
        &mut self,
        ctx: &Context,
        label: impl Into<String>,
        command: Command,
        waits: &[EventId],
        event: EventId,
    ) -> Result<(), OclError> {
        self.check_event(event)?;
        if self.signalers[event.index].is_some() {
            return Err(OclError::EventAlreadyBound);
        }
        self.validate(ctx, &command, waits)?;
        self.push(label.into(), command, waits, event);
        Ok(())
    }

    fn push(&mut self, label: String, command: Command, waits: &[EventId], event: EventId) {
        let waits = match command {
            Command::Barrier => self.entries.iter().map(|e| EventId { queue: self.id, index: e.signals }).collect(),
            _ => waits.to_vec(),
        };
        self.signalers[event.index] = Some(self.entries.len());
        self.entries.push(Entry { label, command, waits, signals: event.index });
    }

    pub fn enqueue_kernel(
        &mut self,
        ctx: &Context,
        kernel: Arc<KernelDef>,
        range: NdRange,
        waits: &[EventId],
    ) -> Result<EventId, OclError> {
        let label = kernel.name().to_string();
        self.enqueue(ctx, label, Command::Kernel { kernel, range }, waits)
    }

    pub fn enqueue_write(
        &mut self,
        ctx: &Context,
        buffer: BufferId,
        data: Vec<i64>,
        waits: &[EventId],
    ) -> Result<EventId, OclError> {
        self.enqueue(ctx, "write", Command::Write { buffer, data }, waits)
    }

    pub fn enqueue_read(&mut self, ctx: &Context, buffer: BufferId, waits: &[EventId]) -> Result<EventId, OclError> {
        self.enqueue(ctx, "read", Command::Read { buffer }, waits)
    }

    pub fn enqueue_barrier(&mut self, ctx: &Context) -> Result<EventId, OclError> {
        self.enqueue(ctx, "barrier", Command::Barrier, &[])
    }

    /// Checks that every wait can be satisfied in order; a command waiting on
    /// its own or a later command's event can never start.
    fn check_schedulable(&self) -> Result<(), OclError> {
        for (i, entry) in self.entries.iter().enumerate() {
            for w in &entry.waits {
                match self.signalers[w.index] {
                    Some(j) if j < i => {}
                    Some(j) => {
                        let cycle = self.reaches(j, i);
                        return Err(OclError::Deadlock {
                            command: entry.label.clone(),
                            waiting_on: self.entries[j].label.clone(),
                            cycle,
                        });
                    }
                    None => {
                        return Err(OclError::Deadlock {
                            command: entry.label.clone(),
                            waiting_on: "an event no command signals".into(),
                            cycle: false,
                        })
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether command `from` transitively waits on command `to`.
    fn reaches(&self, from: usize, to: usize) -> bool {
        let mut stack = vec![from];
        let mut seen = vec![false; self.entries.len()];
        while let Some(c) = stack.pop() {
            if c == to {
                return true;
            }
            if std::mem::replace(&mut seen[c], true) {
                continue;
            }
            stack.extend(self.entries[c].waits.iter().filter_map(|w| self.signalers[w.index]));
        }
        false
    }

    /// Executes every enqueued command, in order.
    pub fn run(mut self, ctx: &mut Context) -> Result<QueueReport, OclError> {
        if self.entries.is_empty() {
            return Err(OclError::EmptyQueue);
        }
        self.check_schedulable()?;
        let mut clock = 0u64;
        let mut completed_at: Vec<Option<u64>> = vec![None; self.signalers.len()];
        let mut report = QueueReport::default();
        for entry in std::mem::take(&mut self.entries) {
            debug_assert!(entry.waits.iter().all(|w| completed_at[w.index].is_some()));
            clock += 1;
            let start = clock;
            let event = EventId { queue: self.id, index: entry.signals };
            let (transfer_bytes, stats) = match &entry.command {
                Command::Kernel { kernel, range } => (0, Some(ctx.launch(kernel, range)?)),
                Command::Write { buffer, data } => (ctx.host_write(*buffer, data)?, None),
                Command::Read { buffer } => {
                    let data = ctx.host_read(*buffer)?;
                    let bytes = ctx.buffer(*buffer)?.store().byte_len() as u64;
                    report.reads.push((event, data));
                    (bytes, None)
                }
                Command::Barrier => (0, None),
            };
            clock += 1;
            completed_at[entry.signals] = Some(clock);
            report.trace.push(TraceEntry {
                label: entry.label,
                kind: entry.command.kind(),
                event,
                waits: entry.waits,
                start,
                end: clock,
                transfer_bytes,
                stats,
            });
        }
        Ok(report)
    }
}
