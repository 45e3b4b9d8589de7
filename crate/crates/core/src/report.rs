//! The record emitted by every inequality check.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::scalar::{Mode, Scalar};

/// Relative slack granted to float-mode comparisons.
pub const FLOAT_REL_TOL: f64 = 1e-9;

/// Outcome of one inequality instance `lhs <= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub tol: f64,
    pub pass: bool,
    pub meta: BTreeMap<String, Value>,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs != 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

impl CheckReport {
    /// Checks `lhs <= rhs`: exactly in exact mode, up to a relative
    /// [`FLOAT_REL_TOL`] in float mode.
    pub fn le<S: Scalar>(check: &str, lhs: &S, rhs: &S) -> Self {
        let (l, r) = (lhs.to_f64(), rhs.to_f64());
        let tol = match S::MODE {
            Mode::Exact => 0.0,
            Mode::Float => FLOAT_REL_TOL * l.abs().max(r.abs()).max(1.0),
        };
        let diff = lhs.clone() - rhs;
        let pass = diff.sign_tol(tol) != Ordering::Greater;
        let equal = diff.sign_tol(tol) == Ordering::Equal;
        let mut rep = Self::from_parts(check, l, r, tol, pass);
        rep.meta.insert("mode".into(), Value::from(S::MODE.as_str()));
        rep.meta.insert("equality".into(), Value::Bool(equal));
        if S::MODE == Mode::Exact {
            rep.meta.insert("lhs_exact".into(), lhs.to_json());
            rep.meta.insert("rhs_exact".into(), rhs.to_json());
        }
        rep
    }

    /// A report with an explicit tolerance band, used by quadrature checks.
    pub fn le_with_band(check: &str, lhs: f64, rhs: f64, band: f64) -> Self {
        let pass = lhs <= rhs + band;
        let mut rep = Self::from_parts(check, lhs, rhs, band, pass);
        rep.meta.insert("mode".into(), Value::from("float"));
        rep.meta.insert("near_equality".into(), Value::Bool((lhs - rhs).abs() <= band));
        rep
    }

    /// Reports `|lhs - rhs| <= tol`.
    pub fn approx_eq(check: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let pass = (lhs - rhs).abs() <= tol;
        Self::from_parts(check, lhs, rhs, tol, pass)
    }

    /// Reports exact equality of two scalars (tolerant in float mode).
    pub fn eq<S: Scalar>(check: &str, lhs: &S, rhs: &S) -> Self {
        let mut rep = Self::le(check, lhs, rhs);
        rep.pass = rep.meta.get("equality") == Some(&Value::Bool(true));
        rep
    }

    /// A vacuous instance (for example a degenerate endpoint); always passes.
    pub fn vacuous(check: &str, reason: &str) -> Self {
        let mut rep = Self::from_parts(check, 0.0, 0.0, 0.0, true);
        rep.meta.insert("vacuous".into(), Value::from(reason));
        rep
    }

    fn from_parts(check: &str, lhs: f64, rhs: f64, tol: f64, pass: bool) -> Self {
        let mut meta = BTreeMap::new();
        meta.insert("check".into(), Value::from(check));
        CheckReport { lhs, rhs, ratio: ratio(lhs, rhs), tol, pass, meta }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.meta.insert(key.into(), value.into());
        self
    }

    pub fn check_name(&self) -> &str {
        self.meta.get("check").and_then(Value::as_str).unwrap_or("")
    }

    /// Exact (or tolerant) equality, or a quadrature result inside its error band.
    pub fn is_equality(&self) -> bool {
        ["equality", "near_equality"].iter().any(|k| matches!(self.meta.get(*k), Some(Value::Bool(true))))
    }

    pub fn is_vacuous(&self) -> bool {
        self.meta.contains_key("vacuous")
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn exact_comparison() {
        let r = CheckReport::le("x", &Rational::from_ratio(1, 3), &Rational::from_ratio(1, 3));
        assert!(r.pass && r.is_equality());
        assert_eq!(r.meta["lhs_exact"], Value::from("1/3"));
        let r = CheckReport::le("x", &Rational::from_ratio(2, 3), &Rational::from_ratio(1, 3));
        assert!(!r.pass);
    }

    #[test]
    fn float_slack() {
        assert!(CheckReport::le("x", &(1.0 + 1e-12), &1.0).pass);
        assert!(!CheckReport::le("x", &1.001, &1.0).pass);
        assert!(!CheckReport::eq("x", &0.5, &1.0).pass);
    }

    #[test]
    fn json_shape() {
        let v = CheckReport::le("x", &1.0, &2.0).to_json();
        for key in ["lhs", "rhs", "ratio", "tol", "pass", "meta"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
