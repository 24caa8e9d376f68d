//! Fixture sets, pinned values of tracked quantities and their bands.
//!
//! Lines are `key=value`:
//!
//! - `set.<name>=a,b,c` lists fixtures;
//! - `drift=<fraction>` is the allowed relative drift from a pin;
//! - `band.<quantity>=lo,hi` bounds a quantity across every fixture;
//! - `pin.<section>.<quantity>=<value>` is the value recorded at release.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;

const BUILTIN: &str = include_str!("../fixtures/manifest.txt");
pub const DEFAULT_DRIFT: f64 = 0.10;

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub sets: BTreeMap<String, Vec<String>>,
    pub drift: f64,
    pub bands: BTreeMap<String, (f64, f64)>,
    pub pins: BTreeMap<String, f64>,
    /// Source text, part of the config hash.
    pub text: String,
}

/// A tracked value outside its band or away from its pin.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Warning {
    pub key: String,
    pub value: f64,
    pub message: String,
}

impl Manifest {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("builtin manifest parses")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read manifest {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut m = Manifest {
            sets: BTreeMap::new(),
            drift: DEFAULT_DRIFT,
            bands: BTreeMap::new(),
            pins: BTreeMap::new(),
            text: text.to_string(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| CliError::Config(format!("manifest:{}: {msg}", i + 1));
            let (k, v) = line.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let (k, v) = (k.trim(), v.trim());
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("cannot parse {s:?}")));
            if let Some(name) = k.strip_prefix("set.") {
                m.sets.insert(name.into(), v.split(',').map(|s| s.trim().to_string()).collect());
            } else if let Some(q) = k.strip_prefix("band.") {
                let (lo, hi) = v.split_once(',').ok_or_else(|| bad("band needs lo,hi"))?;
                let (lo, hi) = (num(lo)?, num(hi)?);
                if !(lo <= hi) {
                    return Err(bad("band with lo > hi"));
                }
                m.bands.insert(q.into(), (lo, hi));
            } else if let Some(q) = k.strip_prefix("pin.") {
                m.pins.insert(q.into(), num(v)?);
            } else if k == "drift" {
                m.drift = num(v)?;
            } else {
                return Err(bad(&format!("unknown key {k}")));
            }
        }
        Ok(m)
    }

    pub fn set(&self, name: &str) -> Result<&[String], CliError> {
        self.sets.get(name).map(|v| v.as_slice()).ok_or_else(|| CliError::Config(format!("unknown fixture set {name}")))
    }

    /// Compares a tracked value against its band (keyed by `quantity`) and
    /// its pin (keyed by `section.quantity`).
    pub fn review(&self, section: &str, quantity: &str, value: f64) -> Vec<Warning> {
        let key = format!("{section}.{quantity}");
        let mut out = Vec::new();
        if !value.is_finite() {
            out.push(Warning { key, value, message: "not finite".into() });
            return out;
        }
        if let Some((lo, hi)) = self.bands.get(quantity) {
            if value < *lo || value > *hi {
                out.push(Warning { key: key.clone(), value, message: format!("outside band [{lo}, {hi}]") });
            }
        }
        if let Some(pin) = self.pins.get(&key) {
            let drift = (value - pin).abs() / pin.abs().max(1e-300);
            if drift > self.drift {
                out.push(Warning { key, value, message: format!("drifted {:.1}% from pinned {pin}", 100.0 * drift) });
            }
        }
        out
    }

    /// Renders pins for the given values, keeping sets, drift and bands.
    pub fn with_pins(&self, values: &BTreeMap<String, f64>) -> String {
        let mut s = String::new();
        s.push_str("# Fixture sets, bands and pinned values of tracked quantities.\n");
        for (k, v) in &self.sets {
            let _ = writeln!(s, "set.{k}={}", v.join(","));
        }
        let _ = writeln!(s, "drift={}", self.drift);
        for (k, (lo, hi)) in &self.bands {
            let _ = writeln!(s, "band.{k}={lo},{hi}");
        }
        for (k, v) in values {
            let _ = writeln!(s, "pin.{k}={v:.6e}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn review_flags_bands_and_drift() {
        let m = Manifest::parse("drift=0.1\nband.r=1,2\npin.a.r=1.5\n").unwrap();
        assert!(m.review("a", "r", 1.55).is_empty());
        assert_eq!(m.review("a", "r", 1.9).len(), 1);
        assert_eq!(m.review("a", "r", 2.5).len(), 2);
        assert_eq!(m.review("b", "r", 0.5).len(), 1);
        assert_eq!(m.review("a", "r", f64::NAN).len(), 1);
        assert!(Manifest::parse("band.r=2,1").is_err());
        assert!(Manifest::parse("what=1").is_err());
    }

    #[test]
    fn builtin_sets() {
        let m = Manifest::builtin();
        assert!(m.set("minimal").is_ok() && m.set("full").is_ok());
        assert!(m.set("full").unwrap().len() >= 8);
    }
}
