//! Check rows and the JSON report schema.

use serde::Serialize;

pub const SCHEMA: &str = "isogap.report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// An inequality with explicit constants; failing it is an error.
    Explicit,
    /// A ratio involving an unnamed constant, compared against a pinned band.
    Tracked,
}

/// One verified inequality or tracked ratio. `anchor` names the result the
/// row checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub anchor: String,
    pub kind: CheckKind,
    /// For explicit checks: the slack, nonnegative when the inequality holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    /// For tracked checks: the ratio.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub tol: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn explicit(name: impl Into<String>, anchor: &str, slack: f64, tol: f64) -> Self {
        CheckRow {
            name: name.into(),
            anchor: anchor.into(),
            kind: CheckKind::Explicit,
            slack: Some(slack),
            ratio: None,
            tol,
            pass: slack >= -tol,
        }
    }

    /// Tracked rows pass whenever the ratio is finite and positive; band
    /// comparison happens where the bands are known.
    pub fn tracked(name: impl Into<String>, anchor: &str, ratio: f64) -> Self {
        CheckRow {
            name: name.into(),
            anchor: anchor.into(),
            kind: CheckKind::Tracked,
            slack: None,
            ratio: Some(ratio),
            tol: 0.0,
            pass: ratio.is_finite() && ratio > 0.0,
        }
    }

    /// The number compared against a band or tolerance.
    pub fn value(&self) -> f64 {
        self.slack.or(self.ratio).unwrap_or(f64::NAN)
    }
}

/// Count of explicit rows that fail.
pub fn explicit_failures(rows: &[CheckRow]) -> usize {
    rows.iter().filter(|r| r.kind == CheckKind::Explicit && !r.pass).count()
}
