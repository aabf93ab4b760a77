//! Complex special functions: Hurwitz zeta with its analytic continuation, the
//! s-derivative of Hurwitz zeta at the origin, principal-branch log-gamma, and
//! the q-Pochhammer / q-gamma pair.
//!
//! Conventions:
//! * powers are principal: `x^y = exp(y * Log x)`, `arg ∈ (-pi, pi]`;
//! * `hurwitz_zeta(s, a) = sum_{n>=0} (n+a)^{-s}` continued in s by a fixed
//!   Euler-Maclaurin budget (partial sum plus Bernoulli-corrected tail);
//! * `log_gamma` follows the Stirling series after shifting the argument into
//!   `Re z >= 10`, and the reflection identity on the left half-plane, so it is
//!   exact modulo `2 pi i` there and `exp(log_gamma) = gamma` everywhere;
//! * `q_gamma(q, t) = prod_{k>=0} (1 - t q^k)^{-1}` for `|q| < 1`.

use num_complex::Complex64;

use crate::error::{MathError, Result};

pub(crate) const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// B_{2k} / (2k)! for k = 1..=10: Euler-Maclaurin tail coefficients.
const B2K_OVER_FACT: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / (330.0 * 2432902008176640000.0),
];

/// B_{2k} / (2k (2k-1)) for k = 1..=10: coefficients of the Stirling series,
/// which is also the term-by-term s-derivative of the Euler-Maclaurin tail.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Largest |s| or |a| accepted by the fixed Euler-Maclaurin budget.
const EM_ARG_LIMIT: f64 = 1.0e5;

pub(crate) fn ln_2pi() -> f64 {
    std::f64::consts::TAU.ln()
}

pub(crate) fn is_finite_c(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn require_finite_input(z: Complex64, what: &str) -> Result<()> {
    if is_finite_c(z) {
        Ok(())
    } else {
        Err(MathError::Domain(format!("non-finite {what}")))
    }
}

pub(crate) fn finite_or_err(z: Complex64, ctx: &'static str) -> Result<Complex64> {
    if is_finite_c(z) {
        Ok(z)
    } else {
        Err(MathError::NonFinite(ctx))
    }
}

/// Principal-branch power `x^y = exp(y * Log x)`; `0^y = 0` for `Re y > 0`.
pub fn pow_principal(x: Complex64, y: Complex64) -> Complex64 {
    if x == ZERO {
        if y == ZERO {
            return ONE;
        }
        return if y.re > 0.0 {
            ZERO
        } else {
            Complex64::new(f64::NAN, f64::NAN)
        };
    }
    (y * x.ln()).exp()
}

/// Shift cutoff for the Euler-Maclaurin evaluation: the partial sum runs to
/// `M = max(ceil|a|, ceil|s|, 15)` so the Bernoulli tail converges fast.
fn em_cutoff(s_mag: f64, a_mag: f64) -> usize {
    s_mag.ceil().max(a_mag.ceil()).max(15.0) as usize
}

fn em_domain_check(s: Complex64, a: Complex64) -> Result<()> {
    require_finite_input(s, "exponent s")?;
    require_finite_input(a, "offset a")?;
    if s.norm() > EM_ARG_LIMIT || a.norm() > EM_ARG_LIMIT {
        return Err(MathError::Domain(format!(
            "|s| and |a| must stay below {EM_ARG_LIMIT:e} for the fixed Euler-Maclaurin budget"
        )));
    }
    Ok(())
}

/// Hurwitz zeta `zeta(s, a) = sum_{n>=0} (n+a)^{-s}`, continued to all complex
/// `s != 1`, for `Re a > 0`.
///
/// Evaluation is the Euler-Maclaurin split
///
/// ```text
/// zeta(s,a) = sum_{n<M} (n+a)^{-s} + w^{1-s}/(s-1) + w^{-s}/2
///           + sum_{k=1..10} B_{2k}/(2k)! * (s)_{2k-1} * w^{-s-2k+1},   w = M + a,
/// ```
///
/// with `(s)_j` the rising factorial. The correction order (10 Bernoulli
/// terms) and the cutoff rule are fixed; for moderate arguments the result
/// carries close to full double precision, degrading only for strongly
/// negative `Re s` where the partial sum cancels against the tail.
pub fn hurwitz_zeta(s: Complex64, a: Complex64) -> Result<Complex64> {
    em_domain_check(s, a)?;
    if s == ONE {
        return Err(MathError::PoleAtOne);
    }
    if a.re <= 0.0 {
        return Err(MathError::Domain(format!(
            "hurwitz_zeta requires Re a > 0, got a = {a}"
        )));
    }

    let m = em_cutoff(s.norm(), a.norm());
    let mut sum = ZERO;
    for n in 0..m {
        sum += (-s * (a + n as f64).ln()).exp();
    }

    let w = a + m as f64;
    let lw = w.ln();
    // Integral term and half-weight boundary term.
    sum += ((ONE - s) * lw).exp() / (s - ONE);
    sum += 0.5 * (-s * lw).exp();

    // Bernoulli tail: rising factorial s(s+1)...(s+2k-2) against w^{-s-2k+1}.
    let mut rising = s;
    let mut wpow = (-(s + ONE) * lw).exp();
    let wstep = (-2.0 * lw).exp();
    for (k, coeff) in B2K_OVER_FACT.iter().enumerate() {
        let k = k + 1;
        sum += *coeff * rising * wpow;
        if k < B2K_OVER_FACT.len() {
            let j = 2.0 * k as f64;
            rising *= (s + (j - 1.0)) * (s + j);
            wpow *= wstep;
        }
    }
    finite_or_err(sum, "hurwitz_zeta")
}

/// `d/ds zeta(s, a) |_{s=0}` for `Re a > 0`, by differentiating the fixed
/// Euler-Maclaurin formula term by term in `s` at `s = 0`:
///
/// ```text
/// zeta'(0,a) = -sum_{n<M} Log(n+a) + (w - 1/2) Log w - w
///            + sum_{k=1..10} B_{2k}/(2k(2k-1)) * w^{1-2k},   w = M + a.
/// ```
///
/// No gamma-function code is involved, which keeps this route independent of
/// [`log_gamma`] for cross-validation.
pub fn hurwitz_zeta_ds0(a: Complex64) -> Result<Complex64> {
    em_domain_check(ZERO, a)?;
    if a.re <= 0.0 {
        return Err(MathError::Domain(format!(
            "hurwitz_zeta_ds0 requires Re a > 0, got a = {a}"
        )));
    }

    let m = em_cutoff(0.0, a.norm());
    let mut sum = ZERO;
    for n in 0..m {
        sum -= (a + n as f64).ln();
    }
    let w = a + m as f64;
    let lw = w.ln();
    sum += (w - 0.5) * lw - w;

    let winv = ONE / w;
    let winv2 = winv * winv;
    let mut p = winv;
    for coeff in STIRLING {
        sum += coeff * p;
        p *= winv2;
    }
    finite_or_err(sum, "hurwitz_zeta_ds0")
}

/// `zeta'(0, a)` continued off `Re a > 0` through the exact single-term
/// recursion `zeta'(0, a) = -Log a + zeta'(0, a+1)`, valid for any `a` off the
/// closed negative real axis.
pub(crate) fn hurwitz_zeta_ds0_continued(a: Complex64) -> Result<Complex64> {
    require_finite_input(a, "offset a")?;
    if a.im == 0.0 && a.re <= 0.0 {
        return Err(MathError::Domain(format!(
            "zeta'(0, a) is evaluated off the branch cut a <= 0, got a = {a}"
        )));
    }
    let mut shift = ZERO;
    let mut aa = a;
    while aa.re <= 0.0 {
        shift -= aa.ln();
        aa += 1.0;
    }
    Ok(shift + hurwitz_zeta_ds0(aa)?)
}

/// Principal-branch `log Gamma(z)`.
///
/// On `Re z > 0` the value is the analytic branch that is real on the positive
/// axis (relative accuracy near machine precision, via argument shifting into
/// `Re z >= 10` followed by the Stirling series). On `Re z <= 0` the function
/// is continued with the reflection identity
/// `log Gamma(z) = Log pi - log sin(pi z) - log Gamma(1 - z)`, so values there
/// are exact modulo `2 pi i` and `exp(log_gamma(z)) = Gamma(z)` always holds.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    require_finite_input(z, "argument z")?;
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor() {
        return Err(MathError::Pole(format!("log_gamma pole at z = {}", z.re)));
    }
    if z.re > 0.0 {
        finite_or_err(log_gamma_right(z), "log_gamma")
    } else {
        let refl = std::f64::consts::PI.ln() - log_sin_pi(z) - log_gamma_right(ONE - z);
        finite_or_err(refl, "log_gamma")
    }
}

/// `Gamma(z) = exp(log_gamma(z))`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    finite_or_err(log_gamma(z)?.exp(), "gamma")
}

/// Stirling evaluation on `Re z > 0` after shifting to `Re z >= 10`.
fn log_gamma_right(z: Complex64) -> Complex64 {
    let mut shift = ZERO;
    let mut zz = z;
    while zz.re < 10.0 {
        shift += zz.ln();
        zz += 1.0;
    }
    let lz = zz.ln();
    let mut res = (zz - 0.5) * lz - zz + 0.5 * ln_2pi();
    let zinv = ONE / zz;
    let zinv2 = zinv * zinv;
    let mut p = zinv;
    for coeff in STIRLING {
        res += coeff * p;
        p *= zinv2;
    }
    res - shift
}

/// `log sin(pi z)`, stable for large `|Im z|`; exact modulo `2 pi i`.
fn log_sin_pi(z: Complex64) -> Complex64 {
    let y = z.im;
    if y.abs() <= 8.0 {
        (std::f64::consts::PI * z).sin().ln()
    } else if y > 0.0 {
        // sin(pi z) = e^{-i pi z} (1 - e^{2 pi i z}) * (i/2), |e^{2 pi i z}| << 1.
        let w = (2.0 * std::f64::consts::PI * I * z).exp();
        -I * std::f64::consts::PI * z + (ONE - w).ln() + Complex64::new(-(2.0f64.ln()), std::f64::consts::FRAC_PI_2)
    } else {
        log_sin_pi(z.conj()).conj()
    }
}

/// Number of factors of a q-Pochhammer product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductOrder {
    Finite(u32),
    Infinite,
}

/// `(t; q)_n = prod_{k=0}^{n-1} (1 - t q^k)`.
///
/// Finite orders place no constraint on `q`. The infinite product requires
/// `|q| < 1` and is truncated at the smallest `K` whose log-tail bound
///
/// ```text
/// sum_{k>K} |log(1 - t q^k)| <= x/((1-x)(1-|q|)) <= tol,   x = |t| |q|^{K+1},
/// ```
///
/// (using `|log(1-u)| <= |u|/(1-|u|)`) drops below `tol`, so the relative
/// truncation error of the product is at most `e^tol - 1`.
pub fn q_pochhammer(t: Complex64, q: Complex64, order: ProductOrder, tol: f64) -> Result<Complex64> {
    Ok(q_pochhammer_scan(t, q, order, tol)?.0)
}

/// Same as [`q_pochhammer`] but also reports the first index with an exactly
/// vanishing factor, which downstream reciprocals treat as a pole.
pub(crate) fn q_pochhammer_scan(
    t: Complex64,
    q: Complex64,
    order: ProductOrder,
    tol: f64,
) -> Result<(Complex64, Option<u32>)> {
    require_finite_input(t, "argument t")?;
    require_finite_input(q, "base q")?;
    let count = match order {
        ProductOrder::Finite(n) => n,
        ProductOrder::Infinite => {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(MathError::Domain(format!(
                    "truncation tolerance must be positive and finite, got {tol}"
                )));
            }
            let r = q.norm();
            if r >= 1.0 {
                return Err(MathError::Divergence(format!(
                    "infinite q-product needs |q| < 1, got |q| = {r}"
                )));
            }
            if t == ZERO {
                return Ok((ONE, None));
            }
            let mut k = 0u32;
            let mut x = t.norm() * r;
            while !(x < 0.5 && x / ((1.0 - x) * (1.0 - r)) <= tol) {
                x *= r;
                k += 1;
                if k > 100_000_000 {
                    return Err(MathError::Divergence(format!(
                        "q-product truncation does not reach tol = {tol:e} (|q| = {r} too close to 1)"
                    )));
                }
            }
            k + 1
        }
    };

    let mut prod = ONE;
    let mut qpow = ONE;
    let mut zero_at = None;
    for k in 0..count {
        let factor = ONE - t * qpow;
        if factor == ZERO && zero_at.is_none() {
            zero_at = Some(k);
        }
        prod *= factor;
        qpow *= q;
    }
    Ok((finite_or_err(prod, "q_pochhammer")?, zero_at))
}

/// Deformation parameters `(q, t)` with `|q| < 1`, either given directly or
/// derived from positive rates as `q = e^{-beta hbar}`, `t = e^{-beta lambda}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QDeformParams {
    q: Complex64,
    t: Complex64,
}

impl QDeformParams {
    pub fn new(q: Complex64, t: Complex64) -> Result<Self> {
        require_finite_input(q, "base q")?;
        require_finite_input(t, "argument t")?;
        if q.norm() >= 1.0 {
            return Err(MathError::Divergence(format!(
                "q-deformation needs |q| < 1, got |q| = {}",
                q.norm()
            )));
        }
        Ok(Self { q, t })
    }

    /// `q = e^{-beta hbar}`, `t = e^{-beta lambda}` for positive rates, so
    /// `0 < q < 1` and `0 < t < 1` automatically.
    pub fn from_rates(beta: f64, hbar: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("hbar", hbar), ("lambda", lambda)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(MathError::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            q: Complex64::new((-beta * hbar).exp(), 0.0),
            t: Complex64::new((-beta * lambda).exp(), 0.0),
        })
    }

    /// One parameter set per eigenvalue, all sharing `q = e^{-beta hbar}`.
    pub fn family_from_rates(beta: f64, hbar: f64, lambdas: &[f64]) -> Result<Vec<Self>> {
        lambdas
            .iter()
            .map(|&l| Self::from_rates(beta, hbar, l))
            .collect()
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn t(&self) -> Complex64 {
        self.t
    }
}

/// `Gamma_q(t) = prod_{k>=0} (1 - t q^k)^{-1}` to relative accuracy about
/// `tol`, truncated by the q-Pochhammer tail bound. A factor that vanishes
/// exactly (`t q^k = 1`) is a pole.
pub fn q_gamma(params: &QDeformParams, tol: f64) -> Result<Complex64> {
    let (prod, zero_at) = q_pochhammer_scan(params.t, params.q, ProductOrder::Infinite, tol)?;
    if let Some(k) = zero_at {
        return Err(MathError::Pole(format!(
            "q_gamma pole: t q^k = 1 at k = {k} (t = {}, q = {})",
            params.t, params.q
        )));
    }
    if prod == ZERO {
        return Err(MathError::Pole("q_gamma pole: vanishing q-product".into()));
    }
    finite_or_err(ONE / prod, "q_gamma")
}
