//! Report envelope, tables and atomic file output.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use isogap::report::{CheckKind, CheckRow, SCHEMA};

use crate::error::CliError;
use crate::manifest::{Manifest, Warning};
use crate::suite::Section;

#[derive(Debug, Clone, Serialize)]
pub struct Seeds {
    /// Seed of the Monte Carlo volumes and the random test functions.
    pub resolution: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub explicit_failures: usize,
    pub warnings: usize,
    pub strict: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub seeds: Seeds,
    pub h: Option<f64>,
    pub fixtures: Vec<String>,
    pub sections: Vec<Section>,
    pub warnings: Vec<Warning>,
    pub summary: Summary,
}

/// SHA-256 of the canonical configuration text, in hex.
pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        command: &str,
        config: &str,
        seed: u64,
        h: Option<f64>,
        fixtures: Vec<String>,
        sections: Vec<Section>,
        manifest: &Manifest,
        strict: bool,
    ) -> Self {
        let mut warnings = Vec::new();
        for s in &sections {
            for r in s.checks.iter().filter(|r| r.kind == CheckKind::Tracked) {
                warnings.extend(manifest.review(&s.scope, &r.name, r.value()));
            }
        }
        let checks = sections.iter().map(|s| s.checks.len()).sum();
        let explicit_failures = sections.iter().map(|s| isogap::report::explicit_failures(&s.checks)).sum();
        let pass = explicit_failures == 0 && (!strict || warnings.is_empty());
        Report {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config_hash: config_hash(config),
            seeds: Seeds { resolution: seed },
            h,
            fixtures,
            summary: Summary { checks, explicit_failures, warnings: warnings.len(), strict, pass },
            sections,
            warnings,
        }
    }

    /// The report restricted to one scope.
    pub fn scoped(&self, scope: &str) -> Report {
        let sections: Vec<Section> = self.sections.iter().filter(|s| s.scope == scope).cloned().collect();
        let warnings: Vec<Warning> =
            self.warnings.iter().filter(|w| w.key.split('.').next() == Some(scope)).cloned().collect();
        let mut r = self.clone();
        r.summary.checks = sections.iter().map(|s| s.checks.len()).sum();
        r.summary.explicit_failures = sections.iter().map(|s| isogap::report::explicit_failures(&s.checks)).sum();
        r.summary.warnings = warnings.len();
        r.summary.pass = r.summary.explicit_failures == 0 && (!r.summary.strict || warnings.is_empty());
        r.sections = sections;
        r.warnings = warnings;
        r
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable report");
        s.push('\n');
        s
    }

    /// Tracked values keyed as in manifest pins.
    pub fn tracked_values(&self) -> std::collections::BTreeMap<String, f64> {
        let mut out = std::collections::BTreeMap::new();
        for s in &self.sections {
            for r in s.checks.iter().filter(|r| r.kind == CheckKind::Tracked) {
                if r.value().is_finite() {
                    out.insert(format!("{}.{}", s.scope, r.name), r.value());
                }
            }
        }
        out
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        for sec in &self.sections {
            for r in &sec.checks {
                let _ = writeln!(s, "{}", row_line(&sec.scope, sec.part, r, &self.warnings));
            }
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {} = {:.6e}: {}", w.key, w.value, w.message);
        }
        let sm = &self.summary;
        let _ = writeln!(
            s,
            "{} checks, {} explicit failures, {} warnings{}: {}",
            sm.checks,
            sm.explicit_failures,
            sm.warnings,
            if sm.strict { " (strict)" } else { "" },
            if sm.pass { "PASS" } else { "FAIL" }
        );
        s
    }
}

fn row_line(scope: &str, part: &str, r: &CheckRow, warnings: &[Warning]) -> String {
    let key = format!("{scope}.{}", r.name);
    let verdict = match r.kind {
        CheckKind::Explicit if r.pass => "pass",
        CheckKind::Explicit => "FAIL",
        CheckKind::Tracked if warnings.iter().any(|w| w.key == key) => "warn",
        CheckKind::Tracked => "tracked",
    };
    let kind = match r.kind {
        CheckKind::Explicit => "slack",
        CheckKind::Tracked => "ratio",
    };
    format!("{scope:<16} {part:<16} {:<40} {kind} {:>14.6e}  {verdict:<7} [{}]", r.name, r.value(), r.anchor)
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_hex() {
        let h = config_hash("abc");
        assert_eq!(h, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn strict_turns_warnings_into_failure() {
        let m = Manifest::parse("band.r=0,1\n").unwrap();
        let sec = Section {
            scope: "a".into(),
            part: "p",
            data: serde_json::Value::Null,
            checks: vec![CheckRow::tracked("r", "band", 2.0)],
        };
        let lax = Report::new("verify", "", 1, None, vec![], vec![sec.clone()], &m, false);
        assert!(lax.summary.pass && lax.summary.warnings == 1);
        let strict = Report::new("verify", "", 1, None, vec![], vec![sec], &m, true);
        assert!(!strict.summary.pass);
        assert!(strict.table().contains("warn"));
    }
}
