//! TOML overrides for platforms and resource coefficients.
//!
//! ```text
//! # comments start with '#'
//! platform.virtex7_690t_7v3.ddr_efficiency = 0.8
//! coeff.stratixV_gxa7_de5.conv2.inc_dsp = 4
//!
//! [platform.small_board]
//! lane_budget = 256
//! ```
//!
//! A platform or coefficient entry that does not exist yet must be given in
//! full.

use std::collections::BTreeMap;

use serde::Deserialize;
use toml::{Spanned, Value};

use crate::netdef::StageName;

use super::{default_coeffs, platform_catalog, CoeffTable, PerfError, PlatformConfig, ResourceCoeffs};

pub const PLATFORM_FIELDS: [&str; 8] = [
    "compute_clock_hz",
    "ddr_transfer_rate",
    "ddr_bus_bytes",
    "ddr_efficiency",
    "logic_capacity",
    "dsp_capacity",
    "bram_capacity_kb",
    "lane_budget",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PerfConfig {
    pub platforms: Vec<PlatformConfig>,
    pub coeffs: CoeffTable,
}

impl Default for PerfConfig {
    fn default() -> Self {
        PerfConfig { platforms: platform_catalog(), coeffs: default_coeffs() }
    }
}

type Fields = BTreeMap<String, Spanned<Value>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    platform: BTreeMap<String, Fields>,
    #[serde(default)]
    coeff: BTreeMap<String, BTreeMap<String, Fields>>,
}

fn set_platform_field(p: &mut PlatformConfig, field: &str, v: f64) -> bool {
    match field {
        "compute_clock_hz" => p.compute_clock_hz = v,
        "ddr_transfer_rate" => p.ddr_transfer_rate = v,
        "ddr_bus_bytes" => p.ddr_bus_bytes = v,
        "ddr_efficiency" => p.ddr_efficiency = v,
        "logic_capacity" => p.logic_capacity = v,
        "dsp_capacity" => p.dsp_capacity = v,
        "bram_capacity_kb" => p.bram_capacity_kb = v,
        "lane_budget" => p.lane_budget = v as u64,
        _ => return false,
    }
    true
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl PerfConfig {
    /// Defaults with `text` applied on top. `source` names the input in errors.
    pub fn parse(source: &str, text: &str) -> Result<Self, PerfError> {
        let mut cfg = PerfConfig::default();
        cfg.apply(source, text)?;
        Ok(cfg)
    }

    pub fn apply(&mut self, source: &str, text: &str) -> Result<(), PerfError> {
        let err = |line: usize, reason: String| PerfError::Config { file: source.to_string(), line, reason };
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(1, |s| line_at(text, s.start));
            err(line, e.message().to_string())
        })?;
        let number = |field: &str, v: &Spanned<Value>| -> Result<(usize, f64), PerfError> {
            let line = line_at(text, v.span().start);
            match v.get_ref() {
                Value::Integer(i) => Ok((line, *i as f64)),
                Value::Float(f) if f.is_finite() => Ok((line, *f)),
                other => Err(err(line, format!("expected a number for `{field}`, found `{other}`"))),
            }
        };

        for (name, fields) in &raw.platform {
            let existing = self.platforms.iter().position(|p| &p.name == name);
            let mut p = match existing {
                Some(i) => self.platforms[i].clone(),
                None => {
                    let mut p = platform_catalog().remove(0);
                    p.name = name.clone();
                    p.aux_multipliers = 0;
                    p
                }
            };
            let mut last = 1;
            for (field, value) in fields {
                let (line, v) = number(field, value)?;
                last = line;
                if field == "lane_budget" && (v < 1.0 || v.fract() != 0.0) {
                    return Err(err(line, format!("expected a positive integer lane_budget, found `{v}`")));
                }
                if !set_platform_field(&mut p, field, v) {
                    return Err(err(line, format!("unknown platform field `{field}`")));
                }
            }
            if existing.is_none() {
                if let Some(missing) = PLATFORM_FIELDS.iter().find(|f| !fields.contains_key(**f)) {
                    return Err(err(last, format!("new platform `{name}` lacks `{missing}`")));
                }
            }
            p.validate().map_err(|e| err(last, e.to_string()))?;
            match existing {
                Some(i) => self.platforms[i] = p,
                None => self.platforms.push(p),
            }
        }

        for (platform, stages) in &raw.coeff {
            for (stage_key, fields) in stages {
                let first = fields.values().next().map_or(1, |v| line_at(text, v.span().start));
                let stage: StageName = stage_key.parse().map_err(|e: String| err(first, e))?;
                let existing = self.coeffs.get(platform, stage).ok().copied();
                let mut c = existing.unwrap_or_default();
                for (field, value) in fields {
                    let (line, v) = number(field, value)?;
                    if v < 0.0 {
                        return Err(err(line, format!("coefficients must be non-negative, found `{v}`")));
                    }
                    *c.field_mut(field).ok_or_else(|| err(line, format!("unknown coefficient `{field}`")))? = v;
                }
                if existing.is_none() {
                    if let Some(missing) = ResourceCoeffs::FIELDS.iter().find(|f| !fields.contains_key(**f)) {
                        return Err(err(first, format!("new coefficients for {platform}/{stage} lack `{missing}`")));
                    }
                }
                self.coeffs.insert(platform, stage, c);
            }
        }
        Ok(())
    }
}
