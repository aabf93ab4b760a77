//! Local L-factors over the real, complex, and non-Archimedean places, their
//! q-deformation, and the bridge identity equating the disk correlator at the
//! special coupling `mu = 2/pi`, `hbar = 1` with the real-place factor.
//!
//! All factors are driven by an eigenvalue list (the spectrum of the relevant
//! conjugacy-class representative on the representation space); matrix inputs
//! are reduced to eigenvalues by the caller.

use num_complex::Complex64;

use crate::error::{MathError, Result};
use crate::report::VerificationReport;
use crate::specfun::{finite_or_err, log_gamma, q_gamma, QDeformParams};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Frobenius eigenvalue at a real place.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frobenius {
    Plus,
    Minus,
}

/// Which completion the local factor belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Place {
    Real(Frobenius),
    Complex,
    /// Finite place over the prime `p`.
    NonArch(u64),
}

/// A local factor evaluation request: place, argument `s`, and the
/// eigenvalue list (its length is the representation dimension).
#[derive(Debug, Clone, PartialEq)]
pub struct LFactorSpec {
    pub place: Place,
    pub s: Complex64,
    pub eigenvalues: Vec<Complex64>,
}

/// The allowed normalization freedom: multiply a factor by `A * B^s` with
/// `A != 0`, `B > 0`. The default `(1, 1)` is the canonical normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonNormalization {
    pub a: Complex64,
    pub b: f64,
}

impl Default for EpsilonNormalization {
    fn default() -> Self {
        Self { a: ONE, b: 1.0 }
    }
}

impl EpsilonNormalization {
    pub fn new(a: Complex64, b: f64) -> Result<Self> {
        if a == ZERO || !(a.re.is_finite() && a.im.is_finite()) {
            return Err(MathError::Domain(format!("normalization A must be nonzero and finite, got {a}")));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(MathError::Domain(format!("normalization B must be positive, got {b}")));
        }
        Ok(Self { a, b })
    }

    fn apply(&self, value: Complex64, s: Complex64) -> Complex64 {
        // The default is skipped entirely so canonical results are untouched
        // by a spurious multiply by 1.
        if self.a == ONE && self.b == 1.0 {
            value
        } else {
            value * self.a * (s * self.b.ln()).exp()
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn validate(spec: &LFactorSpec) -> Result<()> {
    if spec.eigenvalues.is_empty() {
        return Err(MathError::Domain("eigenvalue list must be non-empty".into()));
    }
    for &a in &spec.eigenvalues {
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(MathError::Domain("non-finite eigenvalue".into()));
        }
    }
    if !(spec.s.re.is_finite() && spec.s.im.is_finite()) {
        return Err(MathError::Domain("non-finite s".into()));
    }
    if let Place::NonArch(p) = spec.place {
        if !is_prime(p) {
            return Err(MathError::Domain(format!("p = {p} is not prime")));
        }
    }
    Ok(())
}

/// Eigenvalues in a canonical order, so the floating-point accumulation (and
/// hence the exact output bytes) cannot depend on input permutation.
fn canonical(eigs: &[Complex64]) -> Vec<Complex64> {
    let mut v = eigs.to_vec();
    v.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
    v
}

/// One multiplicand of the factor, per eigenvalue `alpha`.
fn arch_log_factor(place: Place, s: Complex64, alpha: Complex64) -> Result<Complex64> {
    let ln_pi = std::f64::consts::PI.ln();
    let ln_2pi = std::f64::consts::TAU.ln();
    match place {
        Place::Real(frob) => {
            let half = (s - alpha) / 2.0;
            let gamma_arg = match frob {
                Frobenius::Plus => half,
                Frobenius::Minus => half + 0.5,
            };
            Ok(-half * ln_pi + log_gamma(gamma_arg)?)
        }
        Place::Complex => {
            let w = s - alpha;
            Ok(-w * ln_2pi + log_gamma(w)?)
        }
        Place::NonArch(_) => unreachable!("archimedean helper called for a finite place"),
    }
}

/// The local factor for `spec`, times the normalization `A B^s`.
///
/// * real place, Frobenius `+1`: `prod_j pi^{-(s-a_j)/2} Gamma((s-a_j)/2)`
/// * real place, Frobenius `-1`: `prod_j pi^{-(s-a_j)/2} Gamma((s+1-a_j)/2)`
/// * complex place:              `prod_j (2 pi)^{-(s-a_j)} Gamma(s-a_j)`
/// * finite place over `p`:      `prod_j (1 - a_j p^{-s})^{-1}`
pub fn l_factor(spec: &LFactorSpec, norm: &EpsilonNormalization) -> Result<Complex64> {
    let (value, _) = l_factor_with_breakdown(spec, norm)?;
    Ok(value)
}

/// Like [`l_factor`], also returning the per-eigenvalue factors in input
/// order (normalization applied only to the total).
pub fn l_factor_with_breakdown(
    spec: &LFactorSpec,
    norm: &EpsilonNormalization,
) -> Result<(Complex64, Vec<Complex64>)> {
    validate(spec)?;
    match spec.place {
        Place::NonArch(p) => {
            let p_pow = (-spec.s * (p as f64).ln()).exp();
            let factor_of = |alpha: Complex64| -> Result<Complex64> {
                let euler = ONE - alpha * p_pow;
                if euler == ZERO {
                    return Err(MathError::ZeroDivisor(format!(
                        "euler factor 1 - alpha p^-s vanishes for alpha = {alpha}, p = {p}, s = {}",
                        spec.s
                    )));
                }
                Ok(euler)
            };
            let mut prod = ONE;
            for a in canonical(&spec.eigenvalues) {
                prod *= factor_of(a)?;
            }
            let total = finite_or_err(norm.apply(ONE / prod, spec.s), "non-archimedean L-factor")?;
            let breakdown = spec
                .eigenvalues
                .iter()
                .map(|&a| factor_of(a).map(|f| ONE / f))
                .collect::<Result<Vec<_>>>()?;
            Ok((total, breakdown))
        }
        place => {
            let mut log_sum = ZERO;
            for a in canonical(&spec.eigenvalues) {
                log_sum += arch_log_factor(place, spec.s, a)?;
            }
            let total = finite_or_err(norm.apply(log_sum.exp(), spec.s), "archimedean L-factor")?;
            let breakdown = spec
                .eigenvalues
                .iter()
                .map(|&a| arch_log_factor(place, spec.s, a).map(|l| l.exp()))
                .collect::<Result<Vec<_>>>()?;
            Ok((total, breakdown))
        }
    }
}

/// Disk one-point correlator of the Gamma-observable on `C^n`:
/// `hbar^{-n/2} prod_j (2/(mu hbar))^{-lambda_j/hbar} Gamma(lambda_j/hbar)`.
///
/// Eigenvalues may be complex (the bridge identity feeds `(s - alpha)/2`);
/// each `lambda_j/hbar` must stay off the Gamma poles.
pub fn disk_correlator(mu: f64, hbar: f64, lambdas: &[Complex64]) -> Result<Complex64> {
    for (name, v) in [("mu", mu), ("hbar", hbar)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(MathError::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    if lambdas.is_empty() {
        return Err(MathError::Domain("lambda list must be non-empty".into()));
    }
    let ln_scale = (2.0 / (mu * hbar)).ln();
    let mut log_sum = Complex64::new(-(lambdas.len() as f64) / 2.0 * hbar.ln(), 0.0);
    for u in canonical(&lambdas.iter().map(|&l| l / hbar).collect::<Vec<_>>()) {
        log_sum += -u * ln_scale + log_gamma(u)?;
    }
    finite_or_err(log_sum.exp(), "disk correlator")
}

/// Tolerance of the bridge identity check.
pub const BRIDGE_TOL: f64 = 1e-12;

/// The bridge identity at the special coupling: compares
/// `disk_correlator(2/pi, 1, {(s - alpha_j)/2})` with the real-place factor
/// `l_factor(Real(+1), s, alphas)` at relative tolerance `1e-12`.
pub fn theorem21_specialization(s: Complex64, alphas: &[Complex64]) -> Result<VerificationReport> {
    let halves: Vec<Complex64> = alphas.iter().map(|&a| (s - a) / 2.0).collect();
    let lhs = disk_correlator(2.0 / std::f64::consts::PI, 1.0, &halves)?;
    let rhs = l_factor(
        &LFactorSpec {
            place: Place::Real(Frobenius::Plus),
            s,
            eigenvalues: alphas.to_vec(),
        },
        &EpsilonNormalization::default(),
    )?;
    Ok(VerificationReport::compare(
        "disk correlator at (2/pi, 1) vs real-place L-factor",
        lhs,
        rhs,
        BRIDGE_TOL,
    ))
}

/// q-deformed L-factor: `prod_j Gamma_q(t_j)`, with the truncation budget
/// split across factors so the total relative error stays within `tol`.
pub fn q_l_factor(params: &[QDeformParams], tol: f64) -> Result<Complex64> {
    if params.is_empty() {
        return Err(MathError::Domain("parameter list must be non-empty".into()));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(MathError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let per_factor = tol / params.len() as f64;
    let mut prod = ONE;
    for p in params {
        prod *= q_gamma(p, per_factor)?;
    }
    finite_or_err(prod, "q-deformed L-factor")
}
