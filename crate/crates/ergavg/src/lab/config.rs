//! Experiment configuration: a kind, a mandatory seed, and a flat
//! name → number parameter map with per-kind validation and defaults.
//! Serialized as JSON or TOML with identical field layout.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ExperimentKind {
    Improving,
    MinorArc,
    JumpCorollary,
    VariationalRatio,
    MaximalRatio,
    SymbolComparison,
    Sharpness,
    ExpSumVariation,
    ShiftedSquareProbe,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::Improving,
        ExperimentKind::MinorArc,
        ExperimentKind::JumpCorollary,
        ExperimentKind::VariationalRatio,
        ExperimentKind::MaximalRatio,
        ExperimentKind::SymbolComparison,
        ExperimentKind::Sharpness,
        ExperimentKind::ExpSumVariation,
        ExperimentKind::ShiftedSquareProbe,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Improving => "improving",
            ExperimentKind::MinorArc => "minorArc",
            ExperimentKind::JumpCorollary => "jumpCorollary",
            ExperimentKind::VariationalRatio => "variationalRatio",
            ExperimentKind::MaximalRatio => "maximalRatio",
            ExperimentKind::SymbolComparison => "symbolComparison",
            ExperimentKind::Sharpness => "sharpness",
            ExperimentKind::ExpSumVariation => "expSumVariation",
            ExperimentKind::ShiftedSquareProbe => "shiftedSquareProbe",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| invalid(format!("unknown experiment kind {name:?}")))
    }

    /// `(key, default, min, max)` for every parameter the kind accepts.
    fn schema(&self) -> &'static [(&'static str, f64, f64, f64)] {
        match self {
            ExperimentKind::Improving => &[
                ("p", 2.0, 1.0, 64.0),
                ("q", 2.0, 1.0, f64::INFINITY),
                ("nMinLog2", 4.0, 1.0, 16.0),
                ("nMaxLog2", 14.0, 2.0, 16.0),
            ],
            ExperimentKind::MinorArc => &[
                ("nLog2", 12.0, 10.0, 16.0),
                ("lMax", 8.0, 2.0, 12.0),
                ("trials", 5.0, 1.0, 64.0),
            ],
            ExperimentKind::JumpCorollary => &[
                ("lambda", 2.0, 1.0 + 1e-9, 64.0),
                ("capLog2", 20.0, 8.0, 22.0),
                ("pairs", 50.0, 1.0, 4096.0),
                ("deltaMinLog2", -6.0, -20.0, -1.0),
                ("deltaMaxLog2", -1.0, -20.0, -1.0),
            ],
            ExperimentKind::VariationalRatio | ExperimentKind::MaximalRatio => &[
                ("p1", 2.0, 1.0 + 1e-9, 64.0),
                ("p2", 2.0, 1.0 + 1e-9, 64.0),
                ("r", 3.0, 2.0 + 1e-9, 64.0),
                ("lambda", 2.0, 1.0 + 1e-9, 64.0),
                ("support", 256.0, 4.0, 1024.0),
                ("trials", 100.0, 1.0, 4096.0),
                ("capLog2", 12.0, 6.0, 16.0),
            ],
            ExperimentKind::SymbolComparison => &[
                ("nMinLog2", 8.0, 4.0, 20.0),
                ("nMaxLog2", 14.0, 4.0, 20.0),
                ("l1", 1.0, 0.0, 6.0),
                ("l2", 1.0, 0.0, 6.0),
                ("gridPerAxis", 17.0, 3.0, 129.0),
            ],
            ExperimentKind::Sharpness => &[
                ("modulus", 987.0, 987.0, 1e12),
                ("rotation", 610.0, 1.0, 1e12),
            ],
            ExperimentKind::ExpSumVariation => &[
                ("r", 3.0, 2.0 + 1e-9, 64.0),
                ("lambda", 2.0, 1.0 + 1e-9, 64.0),
                ("capLog2", 18.0, 8.0, 20.0),
                ("gridAxis", 32.0, 1.0, 128.0),
                ("randomPairs", 100.0, 0.0, 4096.0),
            ],
            ExperimentKind::ShiftedSquareProbe => &[
                ("support", 64.0, 4.0, 1024.0),
                ("trials", 10.0, 1.0, 256.0),
                ("kMaxLog2", 5.0, 1.0, 12.0),
                ("capLog2", 12.0, 4.0, 16.0),
                ("a", 1.0, 1e-6, 1e6),
                ("d", 0.5, 1e-6, 4.0),
                ("lambda", 2.0, 1.0 + 1e-9, 64.0),
            ],
        }
    }
}

/// A validated experiment description. The seed is mandatory: every random
/// draw in the harness derives from it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, seed: u64) -> Self {
        ExperimentConfig {
            kind,
            seed,
            parameters: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    /// Parameter lookup with the kind's default.
    pub fn param(&self, key: &str) -> f64 {
        match self.parameters.get(key) {
            Some(v) => *v,
            None => self
                .kind
                .schema()
                .iter()
                .find(|(k, ..)| *k == key)
                .map(|(_, d, ..)| *d)
                .unwrap_or_else(|| panic!("parameter {key} not in schema of {}", self.kind.name())),
        }
    }

    pub fn param_usize(&self, key: &str) -> usize {
        self.param(key) as usize
    }

    /// Rejects unknown keys, non-finite values, and out-of-range values;
    /// then applies the kind-specific cross-parameter rules.
    pub fn validate(&self) -> Result<()> {
        let schema = self.kind.schema();
        for (key, value) in &self.parameters {
            let Some((_, _, lo, hi)) = schema.iter().find(|(k, ..)| k == key) else {
                return Err(invalid(format!(
                    "unknown parameter {key:?} for kind {}",
                    self.kind.name()
                )));
            };
            if !value.is_finite() || *value < *lo || *value > *hi {
                return Err(invalid(format!(
                    "parameter {key} = {value} outside [{lo}, {hi}]"
                )));
            }
        }
        match self.kind {
            ExperimentKind::Improving => {
                if self.param("p") > self.param("q") {
                    return Err(invalid("improving estimate needs p <= q"));
                }
                if self.param("nMinLog2") >= self.param("nMaxLog2") {
                    return Err(invalid("need nMinLog2 < nMaxLog2"));
                }
            }
            ExperimentKind::JumpCorollary => {
                if self.param("deltaMinLog2") > self.param("deltaMaxLog2") {
                    return Err(invalid("need deltaMinLog2 <= deltaMaxLog2"));
                }
            }
            ExperimentKind::SymbolComparison => {
                if self.param("nMinLog2") + 2.0 > self.param("nMaxLog2") {
                    return Err(invalid("symbol comparison needs at least three octaves"));
                }
            }
            ExperimentKind::Sharpness => {
                let q = self.param("modulus") as u64;
                let a = self.param("rotation") as u64;
                if !is_consecutive_fibonacci(a, q) {
                    return Err(invalid(format!(
                        "sharpness needs consecutive Fibonacci numbers (rotation, modulus), got ({a}, {q})"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("plain data")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Accepts either serialization, deciding by the first non-blank byte
    /// (JSON objects open with a brace).
    pub fn from_str_any(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            Self::from_json_str(s)
        } else {
            Self::from_toml_str(s)
        }
    }
}

/// True when `(a, q)` are consecutive members of the Fibonacci sequence
/// with `q ≥ 987`.
pub fn is_consecutive_fibonacci(a: u64, q: u64) -> bool {
    if q < 987 {
        return false;
    }
    let (mut x, mut y) = (1u64, 1u64);
    while y < q {
        let next = x + y;
        x = y;
        y = next;
    }
    y == q && x == a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for kind in ExperimentKind::ALL {
            assert_eq!(ExperimentKind::parse(kind.name()).unwrap(), kind);
        }
        assert!(ExperimentKind::parse("bogus").is_err());
    }

    #[test]
    fn defaults_and_overrides() {
        let cfg = ExperimentConfig::new(ExperimentKind::Improving, 7);
        assert_eq!(cfg.param("p"), 2.0);
        let cfg = cfg.with("p", 1.5);
        assert_eq!(cfg.param("p"), 1.5);
        cfg.validate().unwrap();
    }

    #[test]
    fn validation_rules() {
        let bad = ExperimentConfig::new(ExperimentKind::Improving, 7).with("nope", 1.0);
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig::new(ExperimentKind::Improving, 7)
            .with("p", 3.0)
            .with("q", 2.0);
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig::new(ExperimentKind::JumpCorollary, 7).with("lambda", 1.0);
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig::new(ExperimentKind::Sharpness, 7).with("rotation", 611.0);
        assert!(bad.validate().is_err());
        assert!(ExperimentConfig::new(ExperimentKind::Sharpness, 7)
            .validate()
            .is_ok());
        let bigger = ExperimentConfig::new(ExperimentKind::Sharpness, 7)
            .with("modulus", 1597.0)
            .with("rotation", 987.0);
        assert!(bigger.validate().is_ok());
    }

    #[test]
    fn serialization_both_formats() {
        let cfg = ExperimentConfig::new(ExperimentKind::MinorArc, 42).with("trials", 5.0);
        let via_json = ExperimentConfig::from_json_str(&cfg.to_json_string()).unwrap();
        assert_eq!(via_json, cfg);
        let via_toml = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(via_toml, cfg);
        assert_eq!(
            ExperimentConfig::from_str_any(&cfg.to_json_string()).unwrap(),
            cfg
        );
        assert_eq!(
            ExperimentConfig::from_str_any(&cfg.to_toml_string()).unwrap(),
            cfg
        );
        // Seed is mandatory.
        assert!(ExperimentConfig::from_json_str("{\"kind\":\"improving\"}").is_err());
        assert!(ExperimentConfig::from_toml_str("kind = \"improving\"").is_err());
    }

    #[test]
    fn fibonacci_recognition() {
        assert!(is_consecutive_fibonacci(610, 987));
        assert!(is_consecutive_fibonacci(987, 1597));
        assert!(!is_consecutive_fibonacci(611, 987));
        assert!(!is_consecutive_fibonacci(377, 610)); // below the floor
        assert!(!is_consecutive_fibonacci(610, 988));
    }
}
