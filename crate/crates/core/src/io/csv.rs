//! Result tables as CSV with one header line and LF endings.
//! Numbers use the shortest decimal that parses back to the same value, so
//! reading and rewriting a file reproduces it byte for byte.

use std::path::Path;

use crate::ocl::ModeKind;
use crate::perf::{AccelRecord, BenchRecord, ModeMetrics};
use crate::quant::SweepSummary;
use crate::tensor::QFormat;

use super::{parse_number, write_text, IoError};

pub trait CsvTable {
    const HEADER: &'static str;

    /// The CSV rows this value occupies, cell by cell.
    fn records(&self) -> Vec<Vec<String>>;

    fn render(rows: &[Self]) -> String
    where
        Self: Sized,
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let write = |w: &mut csv::Writer<Vec<u8>>, cells: &[String]| w.write_record(cells).expect("in-memory write");
        write(&mut w, &Self::HEADER.split(',').map(String::from).collect::<Vec<_>>());
        for r in rows {
            for cells in r.records() {
                write(&mut w, &cells);
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}

impl CsvTable for BenchRecord {
    const HEADER: &'static str = "kernel,platform,mode,time_ms,logic_k,dsp,bram_kb";

    fn records(&self) -> Vec<Vec<String>> {
        ModeKind::ALL
            .into_iter()
            .zip(&self.modes)
            .map(|(mode, m)| {
                vec![
                    self.kernel.clone(),
                    self.platform.clone(),
                    mode.to_string(),
                    m.time_ms.to_string(),
                    m.logic_k.to_string(),
                    m.dsp.to_string(),
                    m.bram_kb.to_string(),
                ]
            })
            .collect()
    }
}

impl CsvTable for AccelRecord {
    const HEADER: &'static str = "kernel,mode,ratio,percent";

    fn records(&self) -> Vec<Vec<String>> {
        ModeKind::ALL
            .into_iter()
            .enumerate()
            .map(|(m, mode)| {
                vec![self.kernel.clone(), mode.to_string(), self.ratios[m].to_string(), self.percents[m].to_string()]
            })
            .collect()
    }
}

impl CsvTable for SweepSummary {
    const HEADER: &'static str = "total_bits,frac_bits,max_err,mean_err,agreement,n";

    fn records(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.qformat.total_bits().to_string(),
            self.qformat.frac_bits().to_string(),
            self.max_abs_logit_error.to_string(),
            self.mean_abs_logit_error.to_string(),
            self.argmax_agreement.to_string(),
            self.n_samples.to_string(),
        ]]
    }
}

pub fn write_results_csv<T: CsvTable>(rows: &[T], path: &Path) -> Result<(), IoError> {
    write_text(path, &T::render(rows))
}

struct Rows<'a> {
    file: &'a str,
    lines: Vec<(usize, Vec<String>)>,
}

impl<'a> Rows<'a> {
    fn new(file: &'a str, text: &str, header: &'static str) -> Result<Self, IoError> {
        let bad =
            |line, expected, found: &str| IoError::Parse { file: file.into(), line, expected, found: found.into() };
        let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
        let mut records = reader.records().filter(|r| !matches!(r, Ok(rec) if rec.iter().all(str::is_empty)));
        let line_of = |rec: &csv::StringRecord| rec.position().map_or(0, |p| p.line() as usize);
        let joined = |rec: &csv::StringRecord| rec.iter().collect::<Vec<_>>().join(",");
        let malformed = |e: csv::Error| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            bad(line, "a well-formed CSV row", &e.to_string())
        };
        match records.next().transpose().map_err(malformed)? {
            Some(h) if joined(&h) == header => {}
            Some(h) => return Err(bad(line_of(&h), "the header line", &joined(&h))),
            None => return Err(bad(1, "the header line", "end of file")),
        }
        let width = header.split(',').count();
        let lines = records
            .map(|r| {
                let rec = r.map_err(malformed)?;
                if rec.len() != width {
                    return Err(bad(line_of(&rec), "a row with as many cells as the header", &joined(&rec)));
                }
                Ok((line_of(&rec), rec.iter().map(String::from).collect()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Rows { file, lines })
    }

    fn err(&self, line: usize, expected: &'static str, found: &str) -> IoError {
        IoError::Parse { file: self.file.into(), line, expected, found: found.into() }
    }

    fn number(&self, line: usize, cell: &str) -> Result<f64, IoError> {
        parse_number(cell).ok_or_else(|| self.err(line, "a decimal number", cell))
    }

    fn integer<T: std::str::FromStr>(&self, line: usize, cell: &str) -> Result<T, IoError> {
        cell.parse().map_err(|_| self.err(line, "an integer", cell))
    }

    fn mode(&self, line: usize, cell: &str) -> Result<ModeKind, IoError> {
        cell.parse().map_err(|_| self.err(line, "a mode (none, unroll or simd)", cell))
    }

    fn name<'c>(&self, line: usize, cell: &'c str) -> Result<&'c str, IoError> {
        if cell.is_empty() || cell.contains(char::is_whitespace) {
            return Err(self.err(line, "a name", cell));
        }
        Ok(cell)
    }
}

/// Collects per-mode rows under a key, requiring each mode exactly once.
fn group_modes<K: PartialEq + Clone, V: Clone>(
    rows: &Rows<'_>,
    items: Vec<(usize, K, ModeKind, V)>,
) -> Result<Vec<(K, [V; 3])>, IoError> {
    let mut groups: Vec<(K, [Option<V>; 3], usize)> = Vec::new();
    for (line, key, mode, value) in items {
        let idx = match groups.iter().position(|g| g.0 == key) {
            Some(i) => i,
            None => {
                groups.push((key, [None, None, None], line));
                groups.len() - 1
            }
        };
        let slot = &mut groups[idx].1[mode as usize];
        if slot.is_some() {
            return Err(rows.err(line, "each mode once per kernel", mode.as_str()));
        }
        *slot = Some(value);
    }
    groups
        .into_iter()
        .map(|(key, values, line)| match values {
            [Some(a), Some(b), Some(c)] => Ok((key, [a, b, c])),
            _ => Err(rows.err(line, "rows for all of none, unroll and simd", "an incomplete set")),
        })
        .collect()
}

pub fn parse_bench_csv(file: &str, text: &str) -> Result<Vec<BenchRecord>, IoError> {
    let rows = Rows::new(file, text, BenchRecord::HEADER)?;
    let mut items = Vec::new();
    for (line, c) in &rows.lines {
        let line = *line;
        let key = (rows.name(line, &c[0])?.to_string(), rows.name(line, &c[1])?.to_string());
        let metrics = ModeMetrics {
            time_ms: rows.number(line, &c[3])?,
            logic_k: rows.number(line, &c[4])?,
            dsp: rows.number(line, &c[5])?,
            bram_kb: rows.number(line, &c[6])?,
        };
        items.push((line, key, rows.mode(line, &c[2])?, metrics));
    }
    Ok(group_modes(&rows, items)?
        .into_iter()
        .map(|((kernel, platform), modes)| BenchRecord { kernel, platform, modes })
        .collect())
}

pub fn parse_accel_csv(file: &str, text: &str) -> Result<Vec<AccelRecord>, IoError> {
    let rows = Rows::new(file, text, AccelRecord::HEADER)?;
    let mut items = Vec::new();
    for (line, c) in &rows.lines {
        let line = *line;
        let value = (rows.number(line, &c[2])?, rows.integer::<i64>(line, &c[3])?);
        items.push((line, rows.name(line, &c[0])?.to_string(), rows.mode(line, &c[1])?, value));
    }
    Ok(group_modes(&rows, items)?
        .into_iter()
        .map(|(kernel, v)| AccelRecord { kernel, ratios: v.map(|x| x.0), percents: v.map(|x| x.1) })
        .collect())
}

pub fn parse_sweep_csv(file: &str, text: &str) -> Result<Vec<SweepSummary>, IoError> {
    let rows = Rows::new(file, text, SweepSummary::HEADER)?;
    rows.lines
        .iter()
        .map(|(line, c)| {
            let line = *line;
            let total: u32 = rows.integer(line, &c[0])?;
            let frac: u32 = rows.integer(line, &c[1])?;
            let qformat = QFormat::new(total, frac).map_err(|_| rows.err(line, "a valid fixed-point format", &c[0]))?;
            let agreement = rows.number(line, &c[4])?;
            if !(0.0..=1.0).contains(&agreement) {
                return Err(rows.err(line, "an agreement fraction in [0, 1]", &c[4]));
            }
            Ok(SweepSummary {
                qformat,
                max_abs_logit_error: rows.number(line, &c[2])?,
                mean_abs_logit_error: rows.number(line, &c[3])?,
                argmax_agreement: agreement,
                n_samples: rows.integer(line, &c[5])?,
            })
        })
        .collect()
}
