use std::fmt::Write;

use super::accel::check_same_kernels;
use super::{AccelRecord, BenchRecord, PerfError};

/// At most four decimals, trailing zeros dropped: 3.6300 -> 3.63, 2.0 -> 2.
fn short(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn triple(v: [f64; 3]) -> String {
    format!("{}/{}/{}", short(v[0]), short(v[1]), short(v[2]))
}

/// Per-platform tables of time and resources (none/unroll/simd in every
/// cell), followed by the acceleration table when one is given. Platforms
/// appear in the order they first occur in `records`.
pub fn render_report(records: &[BenchRecord], accel: Option<&[AccelRecord]>) -> Result<String, PerfError> {
    if records.is_empty() {
        return Err(PerfError::EmptyRecords);
    }
    let mut platforms: Vec<&str> = Vec::new();
    for r in records {
        if !platforms.contains(&r.platform.as_str()) {
            platforms.push(&r.platform);
        }
    }
    let groups: Vec<Vec<BenchRecord>> =
        platforms.iter().map(|p| records.iter().filter(|r| r.platform == *p).cloned().collect()).collect();
    for g in &groups[1..] {
        check_same_kernels(&groups[0], g)?;
    }

    let mut out = String::new();
    for (platform, group) in platforms.iter().zip(&groups) {
        writeln!(out, "{platform}").unwrap();
        writeln!(out, "{:<12} {:<24} {:<20} {:<14} bram_kb", "kernel", "time_ms", "logic_k", "dsp").unwrap();
        for r in group {
            writeln!(
                out,
                "{:<12} {:<24} {:<20} {:<14} {}",
                r.kernel,
                triple(r.modes.map(|m| m.time_ms)),
                triple(r.modes.map(|m| m.logic_k)),
                triple(r.modes.map(|m| m.dsp)),
                triple(r.modes.map(|m| m.bram_kb)),
            )
            .unwrap();
        }
        out.push('\n');
    }
    match accel {
        Some(rows) => {
            writeln!(out, "acceleration").unwrap();
            writeln!(out, "{:<12} {:<24} percent", "kernel", "ratio").unwrap();
            for a in rows {
                writeln!(
                    out,
                    "{:<12} {:<24} {}",
                    a.kernel,
                    triple(a.ratios),
                    a.percents.map(|p| p.to_string()).join("/")
                )
                .unwrap();
            }
        }
        None => writeln!(out, "acceleration: needs two platforms, skipped").unwrap(),
    }
    Ok(out)
}
