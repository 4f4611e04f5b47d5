//! Outcome of a numerical verification of one inequality or identity.

use serde::{Deserialize, Serialize};

/// One compared quantity inside a [`CheckReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckDetail {
    /// What is compared.
    pub label: String,
    /// Left-hand side.
    pub lhs: f64,
    /// Right-hand side.
    pub rhs: f64,
    /// Signed margin; negative means violated.
    pub slack: f64,
    /// Whether the comparison takes part in the pass/fail decision.
    pub asserted: bool,
}

/// Result of a check: the tightest asserted comparison plus every detail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    /// Check name.
    pub name: String,
    /// Serialized inputs.
    pub instance: serde_json::Value,
    /// Left-hand side of the tightest asserted comparison.
    pub lhs: f64,
    /// Right-hand side of the tightest asserted comparison.
    pub rhs: f64,
    /// Smallest asserted slack.
    pub slack: f64,
    /// Tolerance on the slack.
    pub tolerance: f64,
    /// `slack ≥ -tolerance`.
    pub pass: bool,
    /// Seed of the generated instance (0 for fixed inputs).
    pub seed: u64,
    /// Whether some directions were reported without being asserted.
    pub sound_direction_only: bool,
    /// All comparisons.
    pub details: Vec<CheckDetail>,
}

impl CheckReport {
    /// Empty report; with no asserted detail it passes with infinite slack replaced by zero.
    pub fn new(
        name: impl Into<String>,
        instance: serde_json::Value,
        seed: u64,
        tolerance: f64,
    ) -> Self {
        CheckReport {
            name: name.into(),
            instance,
            lhs: 0.0,
            rhs: 0.0,
            slack: 0.0,
            tolerance,
            pass: true,
            seed,
            sound_direction_only: false,
            details: Vec::new(),
        }
    }

    fn push(mut self, label: &str, lhs: f64, rhs: f64, slack: f64, asserted: bool) -> Self {
        let clean = |x: f64| {
            if x.is_finite() {
                x
            } else if x.is_nan() {
                f64::MAX
            } else {
                x.signum() * f64::MAX
            }
        };
        let detail = CheckDetail {
            label: label.into(),
            lhs: clean(lhs),
            rhs: clean(rhs),
            slack: clean(slack),
            asserted,
        };
        if asserted {
            let first = !self.details.iter().any(|d| d.asserted);
            if first || detail.slack < self.slack {
                self.lhs = detail.lhs;
                self.rhs = detail.rhs;
                self.slack = detail.slack;
            }
            self.pass = self.slack >= -self.tolerance;
        } else {
            self.sound_direction_only = true;
        }
        self.details.push(detail);
        self
    }

    /// Asserts `lhs ≤ rhs`.
    pub fn le(self, label: &str, lhs: f64, rhs: f64) -> Self {
        let slack = if lhs.is_nan() || rhs.is_nan() {
            f64::NEG_INFINITY
        } else {
            rhs - lhs
        };
        self.push(label, lhs, rhs, slack, true)
    }

    /// Asserts `lhs = rhs`.
    pub fn equals(self, label: &str, lhs: f64, rhs: f64) -> Self {
        let slack = if lhs.is_nan() || rhs.is_nan() {
            f64::NEG_INFINITY
        } else {
            -(lhs - rhs).abs()
        };
        self.push(label, lhs, rhs, slack, true)
    }

    /// Asserts a boolean condition (slack 0 or -1).
    pub fn holds(self, label: &str, ok: bool) -> Self {
        self.push(
            label,
            ok as u8 as f64,
            1.0,
            if ok { 0.0 } else { -1.0 },
            true,
        )
    }

    /// Records `lhs ≤ rhs` without asserting it.
    pub fn info(self, label: &str, lhs: f64, rhs: f64) -> Self {
        self.push(label, lhs, rhs, rhs - lhs, false)
    }

    /// Detail with the given label.
    pub fn detail(&self, label: &str) -> Option<&CheckDetail> {
        self.details.iter().find(|d| d.label == label)
    }

    /// One JSON line.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Decimal rendering of `x` rounded to 12 significant digits.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("valid float");
    if rounded == 0.0 {
        return "0".into();
    }
    rounded.to_string()
}
