//! Verification reports: one record per checked identity, with both sides,
//! absolute and relative errors, and the tolerance that was applied.
//!
//! Complex values are serialized as fixed-format strings (`{:.16e}` per
//! component) rather than floats, so emitted JSON is byte-identical across
//! runs and platforms for identical inputs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `re+imi` / `re-imi` with 17 significant digits per component.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{}{:.16e}i", z.re, sign, z.im.abs())
}

/// Parse `a`, `bi`, `a+bi`, `a-bi` (also bare `i` / `-i`). Inverse of
/// [`format_complex`] and tolerant of plain decimal or scientific components.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('I')) {
        // Split off the real part at the last +/- that is not an exponent sign
        // and not the leading sign.
        let b: Vec<char> = body.chars().collect();
        let mut split = None;
        for k in (1..b.len()).rev() {
            if (b[k] == '+' || b[k] == '-') && !matches!(b[k - 1], 'e' | 'E') {
                split = Some(k);
                break;
            }
        }
        let (re_str, im_str) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().ok()?,
        };
        let re = if re_str.is_empty() { 0.0 } else { re_str.parse::<f64>().ok()? };
        Some(Complex64::new(re, im))
    } else {
        s.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0))
    }
}

/// Outcome of comparing two computations of one quantity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Human-readable statement of what was compared.
    pub identity: String,
    /// Left side, formatted by [`format_complex`].
    pub lhs: String,
    /// Right side, formatted by [`format_complex`].
    pub rhs: String,
    pub abs_error: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerificationReport {
    /// Relative comparison: `|lhs-rhs| / max(|lhs|, |rhs|) <= tol`, with two
    /// exact zeros counting as a match.
    pub fn compare(identity: impl Into<String>, lhs: Complex64, rhs: Complex64, tol: f64) -> Self {
        let abs = (lhs - rhs).norm();
        let scale = lhs.norm().max(rhs.norm());
        let rel = if scale == 0.0 { 0.0 } else { abs / scale };
        Self {
            identity: identity.into(),
            lhs: format_complex(lhs),
            rhs: format_complex(rhs),
            abs_error: abs,
            rel_error: rel,
            tolerance: tol,
            pass: abs.is_finite() && rel <= tol,
        }
    }

    /// Absolute comparison: `|lhs-rhs| <= tol`.
    pub fn compare_abs(
        identity: impl Into<String>,
        lhs: Complex64,
        rhs: Complex64,
        tol: f64,
    ) -> Self {
        let abs = (lhs - rhs).norm();
        let scale = lhs.norm().max(rhs.norm());
        let rel = if scale == 0.0 { 0.0 } else { abs / scale };
        Self {
            identity: identity.into(),
            lhs: format_complex(lhs),
            rhs: format_complex(rhs),
            abs_error: abs,
            rel_error: rel,
            tolerance: tol,
            pass: abs.is_finite() && abs <= tol,
        }
    }

    /// A check that failed before producing a value (domain error, pole, ...).
    pub fn failure(identity: impl Into<String>, reason: &str, tol: f64) -> Self {
        Self {
            identity: format!("{} [{reason}]", identity.into()),
            lhs: String::new(),
            rhs: String::new(),
            abs_error: f64::INFINITY,
            rel_error: f64::INFINITY,
            tolerance: tol,
            pass: false,
        }
    }
}

/// All reports of one verification suite run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    pub pass_count: usize,
    pub fail_count: usize,
    pub reports: Vec<VerificationReport>,
    /// Wall time is informational only and deliberately left out of the
    /// serialized form, which must be byte-identical across runs.
    #[serde(skip)]
    pub wall_time_ms: u128,
}

impl SuiteResult {
    pub fn new(suite: impl Into<String>, reports: Vec<VerificationReport>) -> Self {
        let pass_count = reports.iter().filter(|r| r.pass).count();
        let fail_count = reports.len() - pass_count;
        Self {
            suite: suite.into(),
            pass_count,
            fail_count,
            reports,
            wall_time_ms: 0,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.fail_count == 0
    }
}
