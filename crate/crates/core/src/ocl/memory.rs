//! The four memory regions and their visibility rules.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionKind {
    Global,
    Constant,
    Local,
    Private,
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionKind::Global => "global",
            RegionKind::Constant => "constant",
            RegionKind::Local => "local",
            RegionKind::Private => "private",
        })
    }
}

/// Who owns a region: the whole device, one work-group, or one work-item.
/// Group and item ids are linear within the current launch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    Device,
    Group(usize),
    Item(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Accessor {
    Host,
    Item { item: usize, group: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessKind {
    Read,
    Write,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{accessor:?} may not {kind:?} {region} region owned by {owner:?}: {rule}")]
pub struct AccessViolation {
    pub region: RegionKind,
    pub owner: Scope,
    pub accessor: Accessor,
    pub kind: AccessKind,
    pub rule: &'static str,
}

/// Little-endian element storage with a fixed element width (1 to 8 bytes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ByteStore {
    bytes: Vec<u8>,
    elem_bytes: usize,
}

impl ByteStore {
    pub fn zeroed(elems: usize, elem_bytes: usize) -> Self {
        assert!((1..=8).contains(&elem_bytes), "element width {elem_bytes} not in 1..=8");
        ByteStore { bytes: vec![0; elems * elem_bytes], elem_bytes }
    }

    pub fn elem_bytes(&self) -> usize {
        self.elem_bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len() / self.elem_bytes
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    pub fn byte_len(&self) -> usize {
        self.bytes.len()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Sign-extending load. `None` when out of bounds.
    #[inline]
    pub fn load(&self, index: usize) -> Option<i64> {
        let w = self.elem_bytes;
        let chunk = self.bytes.get(index * w..index * w + w)?;
        Some(match w {
            1 => chunk[0] as i8 as i64,
            2 => i16::from_le_bytes([chunk[0], chunk[1]]) as i64,
            4 => i32::from_le_bytes(chunk.try_into().expect("4 bytes")) as i64,
            _ => {
                let mut buf = [0u8; 8];
                buf[..w].copy_from_slice(chunk);
                let shift = 64 - 8 * w as u32;
                (i64::from_le_bytes(buf) << shift) >> shift
            }
        })
    }

    /// Truncating store. `false` when out of bounds.
    #[inline]
    pub fn store(&mut self, index: usize, value: i64) -> bool {
        let w = self.elem_bytes;
        match self.bytes.get_mut(index * w..index * w + w) {
            Some(chunk) => {
                chunk.copy_from_slice(&value.to_le_bytes()[..w]);
                true
            }
            None => false,
        }
    }

    /// Whether `value` survives a store/load round trip at this width.
    pub fn fits(&self, value: i64) -> bool {
        let shift = 64 - 8 * self.elem_bytes as u32;
        (value << shift) >> shift == value
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemRegion {
    kind: RegionKind,
    owner: Scope,
    sealed: bool,
    store: ByteStore,
}

impl MemRegion {
    pub fn new(kind: RegionKind, owner: Scope, elems: usize, elem_bytes: usize) -> Self {
        MemRegion { kind, owner, sealed: false, store: ByteStore::zeroed(elems, elem_bytes) }
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn owner(&self) -> Scope {
        self.owner
    }

    /// Constant regions are sealed when first bound to a launched kernel.
    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    pub fn seal(&mut self) {
        self.sealed = true;
    }

    pub fn store(&self) -> &ByteStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut ByteStore {
        &mut self.store
    }
}

/// Permits or rejects one access according to the region's visibility rule.
pub fn check_region_access(region: &MemRegion, accessor: Accessor, kind: AccessKind) -> Result<(), AccessViolation> {
    let violation = |rule| AccessViolation { region: region.kind, owner: region.owner, accessor, kind, rule };
    match (region.kind, accessor) {
        (RegionKind::Global, _) => Ok(()),
        (RegionKind::Constant, _) if kind == AccessKind::Read => Ok(()),
        (RegionKind::Constant, Accessor::Host) if !region.sealed => Ok(()),
        (RegionKind::Constant, Accessor::Host) => {
            Err(violation("constant memory is frozen once a kernel has been launched on it"))
        }
        (RegionKind::Constant, Accessor::Item { .. }) => Err(violation("work-items cannot write constant memory")),
        (RegionKind::Local, Accessor::Item { group, .. }) if region.owner == Scope::Group(group) => Ok(()),
        (RegionKind::Local, _) => Err(violation("local memory is visible only inside its work-group")),
        (RegionKind::Private, Accessor::Item { item, .. }) if region.owner == Scope::Item(item) => Ok(()),
        (RegionKind::Private, _) => Err(violation("private memory is visible only to its work-item")),
    }
}

/// Concurrent set of touched element indices.
#[derive(Debug)]
pub(crate) struct TouchSet {
    words: Vec<AtomicU64>,
}

impl TouchSet {
    pub(crate) fn new(elems: usize) -> Self {
        TouchSet { words: (0..elems.div_ceil(64)).map(|_| AtomicU64::new(0)).collect() }
    }

    #[inline]
    pub(crate) fn mark(&self, index: usize) {
        let word = &self.words[index / 64];
        let bit = 1u64 << (index % 64);
        // Plain load first: shared read-mostly lines stay uncontended.
        if word.load(Ordering::Relaxed) & bit == 0 {
            word.fetch_or(bit, Ordering::Relaxed);
        }
    }

    pub(crate) fn count(&self) -> usize {
        self.words.iter().map(|w| w.load(Ordering::Relaxed).count_ones() as usize).sum()
    }
}
