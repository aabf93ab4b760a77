//! Finite-dimensional integrals and their infinite-dimensional quantizations:
//! Gaussian integrals over Hermitian forms (exact and Monte Carlo), the
//! equivariant volume of a product of weighted complex planes (bosonic and
//! super versions), character traces with their classical limit, and the
//! mode-factorized 3d partition function.

use num_complex::Complex64;

use crate::error::{MathError, Result};
use crate::grassmann::GrassmannElement;
use crate::linalg::{hermitian_eigen, lu_det, CMat};
use crate::regdet::{regdet, SpectrumDescriptor};
use crate::report::VerificationReport;
use crate::sampling::{standard_normal, substream_rng};
use crate::specfun::finite_or_err;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A Hermitian matrix destined for a Gaussian integral; construction checks
/// `A = A*` to `1e-12` (absolute, entrywise).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm {
    matrix: CMat,
}

impl HermitianForm {
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.n() == 0 {
            return Err(MathError::Dimension("empty quadratic form".into()));
        }
        let res = matrix.hermitian_residual();
        if res > 1e-12 {
            return Err(MathError::Domain(format!(
                "matrix is not hermitian (residual {res:.3e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(CMat::diag(
            &entries.iter().map(|&e| Complex64::new(e, 0.0)).collect::<Vec<_>>(),
        ))
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.n()
    }

    /// Eigenvalues, screened for the integral: zero is singular, negative
    /// means the integral diverges.
    fn positive_spectrum(&self) -> Result<Vec<f64>> {
        let (eigs, _) = hermitian_eigen(&self.matrix);
        let scale = self.matrix.max_abs().max(1.0);
        for &e in &eigs {
            if e.abs() <= 1e-12 * scale {
                return Err(MathError::SingularMatrix(format!(
                    "quadratic form has a (near-)zero eigenvalue {e:.3e}"
                )));
            }
            if e < 0.0 {
                return Err(MathError::Domain(format!(
                    "quadratic form has negative eigenvalue {e:.6}; the integral diverges"
                )));
            }
        }
        Ok(eigs)
    }
}

/// Truncation and sampling knobs shared by the approximate evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationControl {
    pub mode_cutoff: u32,
    pub degree_cutoff: u32,
    pub mc_samples: u64,
    pub seed: u64,
}

impl TruncationControl {
    pub fn new(mode_cutoff: u32, degree_cutoff: u32, mc_samples: u64, seed: u64) -> Result<Self> {
        if mode_cutoff == 0 || degree_cutoff == 0 || mc_samples == 0 {
            return Err(MathError::Domain(
                "truncation cutoffs and sample counts must be positive".into(),
            ));
        }
        Ok(Self { mode_cutoff, degree_cutoff, mc_samples, seed })
    }
}

/// `int exp(-z* A z) prod_j dz_j dzbar_j = (2 pi)^n / det A`, evaluated from
/// the eigenvalues of `A` (all required positive).
pub fn gaussian_integral(a: &HermitianForm) -> Result<Complex64> {
    let mut value = 1.0f64;
    for e in a.positive_spectrum()? {
        value *= std::f64::consts::TAU / e;
    }
    finite_or_err(Complex64::new(value, 0.0), "gaussian integral")
}

/// Monte Carlo estimate of the same integral with its standard error.
///
/// Importance sampling from the standard complex Gaussian: with
/// `z ~ prod_j CN(0,1)` the weight is `(2 pi)^n exp(z* z - z* A z)`, whose
/// mean is the integral. The weight variance is finite when every eigenvalue
/// of `A` exceeds `1/2`; outside that regime the reported standard error is
/// unreliable (the estimate stays unbiased).
///
/// Sampling is chunked with one RNG substream per chunk, so the result is a
/// pure function of `(ctl.seed, ctl.mc_samples)`.
pub fn gaussian_integral_mc(
    a: &HermitianForm,
    ctl: &TruncationControl,
) -> Result<(Complex64, f64)> {
    a.positive_spectrum()?;
    let n = a.dim();
    let m = a.matrix();
    let ln_norm = n as f64 * std::f64::consts::TAU.ln();

    const CHUNK: u64 = 65_536;
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut remaining = ctl.mc_samples;
    let mut chunk_index = 0u64;
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    while remaining > 0 {
        let this_chunk = remaining.min(CHUNK);
        let mut rng = substream_rng(ctl.seed, chunk_index);
        for _ in 0..this_chunk {
            let mut zz = 0.0f64;
            for zj in z.iter_mut() {
                let (x, y) = (standard_normal(&mut rng), standard_normal(&mut rng));
                *zj = Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2;
                zz += zj.norm_sqr();
            }
            // z* A z is real for hermitian A up to roundoff.
            let mut quad = 0.0f64;
            for i in 0..n {
                let row = m.row(i);
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    acc += row[j] * z[j];
                }
                quad += (z[i].conj() * acc).re;
            }
            let w = (ln_norm + zz - quad).exp();
            sum += w;
            sum_sq += w * w;
        }
        remaining -= this_chunk;
        chunk_index += 1;
    }

    let k = ctl.mc_samples as f64;
    let mean = sum / k;
    let variance = ((sum_sq - k * mean * mean) / (k - 1.0).max(1.0)).max(0.0);
    let stderr = (variance / k).sqrt();
    if !(mean.is_finite() && stderr.is_finite()) {
        return Err(MathError::NonFinite("monte carlo gaussian integral"));
    }
    Ok((Complex64::new(mean, 0.0), stderr))
}

/// The paired-variable degenerate quadratic form `[[0, i l], [i l, 0]]` is not
/// Hermitian, but its Gaussian integral is still assigned the value
/// `(2 pi)^2 / det` by the limit convention; this helper computes that value
/// so it can be checked against [`gaussian_integral`] of `diag(l, l)`.
pub fn degenerate_pair_value(lambda: f64) -> Result<Complex64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(MathError::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let block = CMat::from_rows(&[
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, lambda)],
        vec![Complex64::new(0.0, lambda), Complex64::new(0.0, 0.0)],
    ])?;
    let det = lu_det(&block);
    finite_or_err(
        Complex64::new(std::f64::consts::TAU * std::f64::consts::TAU, 0.0) / det,
        "degenerate pair value",
    )
}

fn check_positive_rates(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(MathError::Domain("weight list must be non-empty".into()));
    }
    for &l in lambdas {
        if !(l.is_finite() && l > 0.0) {
            return Err(MathError::Domain(format!("weights must be positive, got {l}")));
        }
    }
    Ok(())
}

/// Equivariant volume of the product of weighted planes:
/// `(2 pi)^m / prod_j lambda_j` for positive weights.
pub fn equivariant_volume(lambdas: &[f64]) -> Result<f64> {
    check_positive_rates(lambdas)?;
    let mut v = 1.0f64;
    for &l in lambdas {
        v *= std::f64::consts::TAU / l;
    }
    if !v.is_finite() {
        return Err(MathError::NonFinite("equivariant volume"));
    }
    Ok(v)
}

/// Normalization constant of the odd part of the super measure, fixed so the
/// super volume agrees with the bosonic [`equivariant_volume`]; see
/// [`equivariant_volume_super`].
const SUPER_MEASURE_NORM: Complex64 = Complex64 { re: 0.0, im: -2.0 };

/// The same volume computed through the supersymmetric representation: per
/// weight, a width-`1/(mu lambda_j)` bosonic Gaussian times a fermionic pair
/// integral of `exp((mu/2) eta etabar)`. The `mu`-dependence cancels between
/// the two factors, which is the point of the cross-check: the result equals
/// [`equivariant_volume`] for every admissible `mu`.
pub fn equivariant_volume_super(mu: f64, lambdas: &[f64]) -> Result<Complex64> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(MathError::Domain(format!("mu must be positive, got {mu}")));
    }
    check_positive_rates(lambdas)?;

    // Fermionic pair: generators etabar (bit 0) and eta (bit 1); the written
    // order eta etabar flips sign against the canonical monomial.
    let mut pair_action = GrassmannElement::zero(2)?;
    pair_action.add_monomial(0b11, -I * (mu / 2.0));
    let top = pair_action.exp()?.top_coeff();
    let fermion_factor = SUPER_MEASURE_NORM * -top;

    let mut value = ONE;
    for &l in lambdas {
        let bosonic = gaussian_integral(&HermitianForm::diagonal(&[mu * l])?)?;
        value *= bosonic * fermion_factor;
    }
    finite_or_err(value, "super equivariant volume")
}

/// Truncated character trace: the sum of `exp(-beta sum_j lambda_j n_j)` over
/// all monomial exponents with `n_1 + ... + n_m <= degree_cutoff`.
pub fn character_trace(beta: f64, lambdas: &[f64], degree_cutoff: u32) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(MathError::Domain(format!("beta must be positive, got {beta}")));
    }
    check_positive_rates(lambdas)?;
    let d = degree_cutoff as usize;

    // dp[k] = sum over monomials of total degree exactly k in the coordinates
    // processed so far; adding a coordinate with weight x extends by the
    // geometric recursion new[k] = dp[k] + x * new[k-1].
    let mut dp = vec![0.0f64; d + 1];
    dp[0] = 1.0;
    for &l in lambdas {
        let x = (-beta * l).exp();
        let mut new_dp = vec![0.0f64; d + 1];
        for k in 0..=d {
            new_dp[k] = dp[k] + if k > 0 { x * new_dp[k - 1] } else { 0.0 };
        }
        dp = new_dp;
    }
    Ok(dp.iter().sum())
}

/// Closed form of the full character: `prod_j (1 - e^{-beta lambda_j})^{-1}`.
pub fn character_closed(beta: f64, lambdas: &[f64]) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(MathError::Domain(format!("beta must be positive, got {beta}")));
    }
    check_positive_rates(lambdas)?;
    let mut v = 1.0f64;
    for &l in lambdas {
        v /= 1.0 - (-beta * l).exp();
    }
    Ok(v)
}

/// Geometric bound on the truncation deficit of [`character_trace`]:
/// `x^{D+1} / (1-x)^m` with `x = e^{-beta min lambda}`.
pub fn character_tail_bound(beta: f64, lambdas: &[f64], degree_cutoff: u32) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(MathError::Domain(format!("beta must be positive, got {beta}")));
    }
    check_positive_rates(lambdas)?;
    let min_l = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let x = (-beta * min_l).exp();
    Ok(x.powi(degree_cutoff as i32 + 1) / (1.0 - x).powi(lambdas.len() as i32))
}

/// Classical-limit ratio checks: for each `beta` (strictly decreasing list),
/// compare `(2 pi beta)^m * character_closed / equivariant_volume` against 1
/// with the first-order bound `|r - 1| <= beta * sum_j lambda_j`.
pub fn classical_limit_check(lambdas: &[f64], betas: &[f64]) -> Result<Vec<VerificationReport>> {
    check_positive_rates(lambdas)?;
    if betas.is_empty() {
        return Err(MathError::Domain("beta list must be non-empty".into()));
    }
    for w in betas.windows(2) {
        if w[0].is_nan() || w[1].is_nan() || w[1] >= w[0] {
            return Err(MathError::Domain(
                "beta list must be strictly decreasing".into(),
            ));
        }
    }
    let volume = equivariant_volume(lambdas)?;
    let slope: f64 = lambdas.iter().sum();
    let m = lambdas.len() as i32;
    betas
        .iter()
        .map(|&beta| {
            if !(beta.is_finite() && beta > 0.0) {
                return Err(MathError::Domain(format!("beta must be positive, got {beta}")));
            }
            let scaled = (std::f64::consts::TAU * beta).powi(m) * character_closed(beta, lambdas)?;
            let r = scaled / volume;
            Ok(VerificationReport::compare_abs(
                format!("classical limit ratio at beta = {beta:e}"),
                Complex64::new(r, 0.0),
                ONE,
                slope * beta,
            ))
        })
        .collect()
}

fn check_mode_rates(beta: f64, hbar: f64, lambda: f64) -> Result<()> {
    for (name, v) in [("beta", beta), ("hbar", hbar), ("lambda", lambda)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(MathError::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}

/// Single oscillator-mode factor `1 / (1 - e^{-beta (hbar n + lambda)})`.
pub fn mode_factor(beta: f64, hbar: f64, lambda: f64, n: u32) -> Result<f64> {
    check_mode_rates(beta, hbar, lambda)?;
    Ok(1.0 / (1.0 - (-beta * (hbar * n as f64 + lambda)).exp()))
}

/// The same mode factor obtained from the full-line regularized determinant:
/// the mode's fluctuation operator has spectrum `{i k - beta (hbar n +
/// lambda) / (2 pi) * i ... : k in Z}` up to normalization, equivalently ratio
/// `u` with `2 pi i u = -beta (hbar n + lambda)`, so its determinant is
/// `1 - e^{-beta (hbar n + lambda)}` and the factor is its reciprocal.
pub fn mode_factor_via_regdet(beta: f64, hbar: f64, lambda: f64, n: u32) -> Result<Complex64> {
    check_mode_rates(beta, hbar, lambda)?;
    let shift = -beta * (hbar * n as f64 + lambda) / std::f64::consts::TAU;
    let det = regdet(&SpectrumDescriptor::FullLine {
        rho: I,
        lambda: Complex64::new(shift, 0.0),
    })?
    .det;
    finite_or_err(ONE / det, "mode factor via regularized determinant")
}

/// Mode cutoff such that the dropped factors change the product by less than
/// `tol` (relative): same tail bound as the infinite q-Pochhammer truncation.
fn mode_cutoff_for_tol(beta: f64, hbar: f64, lambda: f64, tol: f64) -> Result<u32> {
    let r = (-beta * hbar).exp();
    let t = (-beta * lambda).exp();
    let mut k = 0u32;
    let mut x = t * r;
    while !(x < 0.5 && x / ((1.0 - x) * (1.0 - r)) <= tol) {
        x *= r;
        k += 1;
        if k > 100_000_000 {
            return Err(MathError::Divergence(format!(
                "mode tail does not reach tol = {tol:e} (beta hbar = {} too small)",
                beta * hbar
            )));
        }
    }
    Ok(k)
}

/// Truncated 3d partition function `prod_{n=0}^{N} (1 - e^{-beta (hbar n +
/// lambda)})^{-1}`. With `modes = None` the cutoff is derived from `tol` via
/// the geometric tail bound, making the result match the q-gamma route to the
/// same tolerance.
pub fn mode_partition_3d(
    beta: f64,
    hbar: f64,
    lambda: f64,
    modes: Option<u32>,
    tol: f64,
) -> Result<Complex64> {
    check_mode_rates(beta, hbar, lambda)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(MathError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let last = match modes {
        Some(n) => n,
        None => mode_cutoff_for_tol(beta, hbar, lambda, tol)?,
    };
    let mut value = 1.0f64;
    for n in 0..=last {
        value *= 1.0 - (-beta * (hbar * n as f64 + lambda)).exp();
    }
    finite_or_err(Complex64::new(1.0 / value, 0.0), "3d partition function")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::QDeformParams;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermitian_form_screens_input() {
        let bad = CMat::from_rows(&[
            vec![c(1.0, 0.0), c(0.5, 0.2)],
            vec![c(0.5, 0.2), c(2.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(HermitianForm::new(bad), Err(MathError::Domain(_))));
        let good = CMat::from_rows(&[
            vec![c(1.0, 0.0), c(0.5, 0.2)],
            vec![c(0.5, -0.2), c(2.0, 0.0)],
        ])
        .unwrap();
        assert!(HermitianForm::new(good).is_ok());
    }

    #[test]
    fn gaussian_integral_reference_values() {
        let v = gaussian_integral(&HermitianForm::diagonal(&[TAU]).unwrap()).unwrap();
        assert!((v - ONE).norm() < 1e-14, "got {v}");
        let v = gaussian_integral(&HermitianForm::diagonal(&[1.0]).unwrap()).unwrap();
        assert!((v - c(TAU, 0.0)).norm() < 1e-13, "got {v}");
        let v = gaussian_integral(&HermitianForm::diagonal(&[1.0, 2.0]).unwrap()).unwrap();
        assert!((v - c(TAU * TAU / 2.0, 0.0)).norm() < 1e-12, "got {v}");
        assert!((v.re - 19.7392088).abs() < 1e-6);
    }

    #[test]
    fn gaussian_integral_matches_radial_quadrature() {
        // Independent 1D oracle: the radial form of the planar integral,
        // int_0^R 2 pi r e^{-a r^2} dr * 2, by Simpson's rule.
        let a = 0.7;
        let (r_max, steps) = (12.0f64, 40_000usize);
        let h = r_max / steps as f64;
        let f = |r: f64| 2.0 * TAU * r * (-a * r * r).exp();
        let mut quad = f(0.0) + f(r_max);
        for k in 1..steps {
            quad += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        quad *= h / 3.0;
        let exact = gaussian_integral(&HermitianForm::diagonal(&[a]).unwrap()).unwrap();
        assert!((exact.re - quad).abs() < 1e-9, "exact {exact} vs quadrature {quad}");
    }

    #[test]
    fn gaussian_integral_rejects_bad_spectra() {
        assert!(matches!(
            gaussian_integral(&HermitianForm::diagonal(&[1.0, 0.0]).unwrap()),
            Err(MathError::SingularMatrix(_))
        ));
        assert!(matches!(
            gaussian_integral(&HermitianForm::diagonal(&[1.0, -2.0]).unwrap()),
            Err(MathError::Domain(_))
        ));
    }

    #[test]
    fn mc_is_deterministic_and_accurate() {
        let form = HermitianForm::diagonal(&[TAU]).unwrap();
        let ctl = TruncationControl::new(1, 1, 100, 42).unwrap();
        let (v1, e1) = gaussian_integral_mc(&form, &ctl).unwrap();
        let (v2, e2) = gaussian_integral_mc(&form, &ctl).unwrap();
        assert_eq!((v1, e1), (v2, e2), "same seed must reproduce exactly");

        let ctl = TruncationControl::new(1, 1, 200_000, 7).unwrap();
        let (v, stderr) = gaussian_integral_mc(&form, &ctl).unwrap();
        assert!((v - ONE).norm() <= 4.0 * stderr, "v = {v}, stderr = {stderr}");

        let form2 = HermitianForm::diagonal(&[1.0, 2.0]).unwrap();
        let (v, stderr) = gaussian_integral_mc(&form2, &ctl).unwrap();
        let exact = TAU * TAU / 2.0;
        assert!((v.re - exact).abs() <= 4.0 * stderr, "v = {v}, stderr = {stderr}");
    }

    #[test]
    fn mc_chunking_is_invisible_in_the_mean() {
        // Crossing the chunk boundary changes nothing about determinism.
        let form = HermitianForm::diagonal(&[2.0]).unwrap();
        let ctl = TruncationControl::new(1, 1, 70_000, 5).unwrap();
        let (v1, _) = gaussian_integral_mc(&form, &ctl).unwrap();
        let (v2, _) = gaussian_integral_mc(&form, &ctl).unwrap();
        assert_eq!(v1, v2);
    }

    #[test]
    fn degenerate_pair_matches_diagonal_form() {
        for lambda in [0.3, 1.0, 2.7, 9.9] {
            let paired = degenerate_pair_value(lambda).unwrap();
            let diag = gaussian_integral(&HermitianForm::diagonal(&[lambda, lambda]).unwrap()).unwrap();
            assert!(
                (paired - diag).norm() <= 1e-12 * diag.norm(),
                "lambda = {lambda}: {paired} vs {diag}"
            );
        }
        assert!(degenerate_pair_value(-1.0).is_err());
    }

    #[test]
    fn equivariant_volume_values_and_errors() {
        assert!((equivariant_volume(&[TAU]).unwrap() - 1.0).abs() < 1e-14);
        assert!((equivariant_volume(&[1.0, 1.0]).unwrap() - TAU * TAU).abs() < 1e-12);
        assert!(matches!(equivariant_volume(&[]), Err(MathError::Domain(_))));
        assert!(matches!(equivariant_volume(&[1.0, -1.0]), Err(MathError::Domain(_))));
    }

    #[test]
    fn super_volume_is_mu_independent_and_matches_bosonic() {
        let lambdas = [0.7, 1.3, 2.0];
        let reference = equivariant_volume(&lambdas).unwrap();
        for mu in [0.5, 1.0, 3.25] {
            let v = equivariant_volume_super(mu, &lambdas).unwrap();
            assert!(
                (v - c(reference, 0.0)).norm() < 1e-12 * reference,
                "mu = {mu}: {v} vs {reference}"
            );
        }
        assert!(equivariant_volume_super(0.0, &lambdas).is_err());
    }

    #[test]
    fn character_trace_degree_zero_and_growth() {
        assert_eq!(character_trace(1.0, &[1.0, 2.0], 0).unwrap(), 1.0);
        // Monotone non-decreasing in D, bounded by the closed form.
        let closed = character_closed(1.0, &[1.0, 2.0]).unwrap();
        let mut prev = 0.0;
        for d in [0u32, 5, 10, 20, 40] {
            let t = character_trace(1.0, &[1.0, 2.0], d).unwrap();
            assert!(t >= prev, "trace must grow with the cutoff");
            assert!(t <= closed + 1e-12, "trace bounded by closed form");
            prev = t;
        }
    }

    #[test]
    fn character_trace_reaches_closed_form() {
        let t = character_trace(1.0, &[1.0], 40).unwrap();
        let closed = character_closed(1.0, &[1.0]).unwrap();
        assert!((closed - 1.5819767069).abs() < 1e-9);
        let bound = character_tail_bound(1.0, &[1.0], 40).unwrap();
        assert!((t - closed).abs() <= bound + 1e-15, "deficit {} vs bound {bound}", closed - t);

        let t = character_trace(1.0, &[1.0, 2.0], 60).unwrap();
        let closed = character_closed(1.0, &[1.0, 2.0]).unwrap();
        assert!((t - closed).abs() < 1e-10);
    }

    #[test]
    fn classical_limit_passes_and_shrinks() {
        let reports = classical_limit_check(&[1.0], &[1e-2, 1e-3, 1e-4]).unwrap();
        assert_eq!(reports.len(), 3);
        let mut prev = f64::INFINITY;
        for r in &reports {
            assert!(r.pass, "{r:?}");
            assert!(r.abs_error < prev, "error must shrink as beta drops");
            prev = r.abs_error;
        }
        // r(1e-3) = 1.0005... : first-order coefficient is sum(lambda)/2.
        assert!((reports[1].abs_error - 5.0e-4).abs() < 1e-6);

        assert!(matches!(
            classical_limit_check(&[1.0], &[1e-3, 1e-2]),
            Err(MathError::Domain(_))
        ));
    }

    #[test]
    fn mode_partition_matches_q_gamma_route() {
        let v = mode_partition_3d(std::f64::consts::LN_2, 1.0, 1.0, None, 1e-12).unwrap();
        assert!((v.re - 3.4627466195).abs() < 1e-9, "got {v}");
        let params = QDeformParams::from_rates(std::f64::consts::LN_2, 1.0, 1.0).unwrap();
        let qg = crate::specfun::q_gamma(&params, 1e-13).unwrap();
        assert!((v - qg).norm() < 1e-12 * qg.norm(), "{v} vs {qg}");
    }

    #[test]
    fn mode_partition_with_explicit_cutoff() {
        // Huge lambda: every factor is essentially 1.
        let v = mode_partition_3d(1.0, 1.0, 700.0, Some(3), 1e-12).unwrap();
        assert!((v - ONE).norm() < 1e-14);
        // Explicit small cutoff equals the hand-rolled product.
        let v = mode_partition_3d(1.0, 0.5, 0.25, Some(2), 1e-12).unwrap();
        let hand: f64 = (0..=2)
            .map(|n| 1.0 / (1.0 - (-(0.5 * n as f64 + 0.25)).exp()))
            .product();
        assert!((v.re - hand).abs() < 1e-14);
    }

    #[test]
    fn per_mode_factor_agrees_with_determinant_route() {
        for (beta, hbar, lambda, n) in [(1.0, 1.0, 1.0, 0), (0.7, 1.3, 0.4, 2), (2.0, 0.3, 1.1, 5)] {
            let direct = mode_factor(beta, hbar, lambda, n).unwrap();
            assert!((mode_factor(1.0, 1.0, 1.0, 0).unwrap() - 1.5819767069).abs() < 1e-9);
            let via_det = mode_factor_via_regdet(beta, hbar, lambda, n).unwrap();
            assert!(
                (via_det - c(direct, 0.0)).norm() < 1e-12 * direct,
                "(beta, hbar, lambda, n) = ({beta}, {hbar}, {lambda}, {n}): {via_det} vs {direct}"
            );
        }
    }

    #[test]
    fn truncation_control_validates() {
        assert!(TruncationControl::new(1, 1, 1, 0).is_ok());
        assert!(TruncationControl::new(0, 1, 1, 0).is_err());
        assert!(TruncationControl::new(1, 0, 1, 0).is_err());
        assert!(TruncationControl::new(1, 1, 0, 0).is_err());
    }
}
