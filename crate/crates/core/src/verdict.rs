use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl Verdict {
    /// Pass at or below `tol`, fail above `10 * tol`, indeterminate between.
    pub fn from_residual(max_abs: f64, tol: f64) -> Self {
        if max_abs <= tol {
            Verdict::Pass
        } else if max_abs > 10.0 * tol {
            Verdict::Fail
        } else {
            Verdict::Indeterminate
        }
    }

    /// Strict threshold: pass iff `value <= tol`.
    pub fn from_bound(value: f64, tol: f64) -> Self {
        if value <= tol {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}
