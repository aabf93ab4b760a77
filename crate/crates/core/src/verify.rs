//! Randomized verification suites and convergence tables.
//!
//! Each suite draws seeded samples and checks a family of identities, mostly
//! by computing the same quantity along two independent routes. Tolerances
//! fall in two classes: *pinned* tolerances belong to the identity (they
//! reflect the attainable accuracy of the two routes and are not
//! configurable), while *consistency* tolerances default to the caller's
//! `tol` knob.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{MathError, Result};
use crate::grassmann::berezin_det;
use crate::lfactor::{l_factor, theorem21_specialization, EpsilonNormalization, Frobenius, LFactorSpec, Place};
use crate::linalg::lu_det;
use crate::regdet::{halfline_regdet_hurwitz, regdet, regdet_consistency_report, SpectrumDescriptor};
use crate::report::{SuiteResult, VerificationReport};
use crate::sampling::{random_complex_matrix, random_hermitian_with_spectrum, substream_rng, uniform_complex};
use crate::specfun::{gamma, hurwitz_zeta, hurwitz_zeta_ds0, log_gamma, pow_principal, q_gamma, q_pochhammer, ProductOrder, QDeformParams};
use crate::volumes::{character_closed, character_tail_bound, character_trace, classical_limit_check, degenerate_pair_value, equivariant_volume, equivariant_volume_super, gaussian_integral, gaussian_integral_mc, mode_factor, mode_factor_via_regdet, mode_partition_3d, HermitianForm, TruncationControl};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const TAU: f64 = std::f64::consts::TAU;

/// The available verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Specfun,
    Regdet,
    Theorem21,
    QGamma,
    Volumes,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Specfun,
        Suite::Regdet,
        Suite::Theorem21,
        Suite::QGamma,
        Suite::Volumes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Regdet => "regdet",
            Suite::Theorem21 => "theorem21",
            Suite::QGamma => "qgamma",
            Suite::Volumes => "volumes",
        }
    }
}

/// Runs one suite with `samples` seeded draws. Failures inside individual
/// checks are recorded as failing reports, never raised; `samples = 0` yields
/// an empty passing suite.
pub fn run_suite(suite: Suite, samples: usize, seed: u64, tol: f64) -> SuiteResult {
    let start = Instant::now();
    let reports = match suite {
        Suite::Specfun => specfun_reports(samples, seed),
        Suite::Regdet => regdet_reports(samples, seed, tol),
        Suite::Theorem21 => theorem21_reports(samples, seed, tol),
        Suite::QGamma => qgamma_reports(samples, seed, tol),
        Suite::Volumes => volumes_reports(samples, seed),
    };
    let mut result = SuiteResult::new(suite.name(), reports);
    result.wall_time_ms = start.elapsed().as_millis();
    result
}

/// Folds a fallible check into the report list, converting errors into
/// failing reports so a suite always completes.
fn push_check(
    reports: &mut Vec<VerificationReport>,
    name: &str,
    tol: f64,
    outcome: Result<VerificationReport>,
) {
    reports.push(match outcome {
        Ok(report) => report,
        Err(err) => VerificationReport::failure(name, &err.to_string(), tol),
    });
}

/// Reduces a difference that is only defined up to integer multiples of
/// `2 pi i` to its representative nearest zero.
fn wrap_mod_2pi_i(z: Complex64) -> Complex64 {
    z - Complex64::new(0.0, TAU * (z.im / TAU).round())
}

fn specfun_reports(samples: usize, seed: u64) -> Vec<VerificationReport> {
    let mut reports = Vec::new();
    for k in 0..samples {
        let mut rng = substream_rng(seed, 1_000_000 + k as u64);

        let a = uniform_complex(&mut rng, (0.1, 5.0), (-3.0, 3.0));
        let name = format!("hurwitz zeta at s = 0 is linear in a [draw {k}]");
        push_check(&mut reports, &name, 1e-12, hurwitz_zeta(ZERO, a).map(|z| {
            VerificationReport::compare_abs(&name, z, Complex64::new(0.5, 0.0) - a, 1e-12)
        }));

        let name = format!("exp of zeta-derivative at s = 0 equals gamma over sqrt(2 pi) [draw {k}]");
        let check = (|| {
            let lhs = hurwitz_zeta_ds0(a)?.exp();
            let rhs = gamma(a)? / TAU.sqrt();
            Ok(VerificationReport::compare(&name, lhs, rhs, 1e-9))
        })();
        push_check(&mut reports, &name, 1e-9, check);

        let z = uniform_complex(&mut rng, (-3.0, 3.0), (0.25, 2.5));
        let name = format!("log-gamma reflection modulo 2 pi i [draw {k}]");
        let check = (|| {
            let lhs = log_gamma(z)? + log_gamma(ONE - z)?;
            let rhs = std::f64::consts::PI.ln() - (z * std::f64::consts::PI).sin().ln();
            Ok(VerificationReport::compare_abs(&name, wrap_mod_2pi_i(lhs - rhs), ZERO, 1e-11))
        })();
        push_check(&mut reports, &name, 1e-11, check);

        let w = uniform_complex(&mut rng, (-4.0, 4.0), (0.3, 3.0));
        let name = format!("log-gamma recursion modulo 2 pi i [draw {k}]");
        let check = (|| {
            let diff = log_gamma(w + ONE)? - log_gamma(w)? - w.ln();
            Ok(VerificationReport::compare_abs(&name, wrap_mod_2pi_i(diff), ZERO, 1e-11))
        })();
        push_check(&mut reports, &name, 1e-11, check);
    }

    // Analytic continuation engine vs. the raw Dirichlet series where the
    // series converges; tolerance is the series' own integral tail bound plus
    // a summation-roundoff floor. Capped draw count: each check sums 10^6
    // terms.
    const SERIES_TERMS: usize = 1_000_000;
    for k in 0..samples.min(8) {
        let mut rng = substream_rng(seed, 1_100_000 + k as u64);
        let s = uniform_complex(&mut rng, (1.6, 4.0), (-2.0, 2.0));
        let a = uniform_complex(&mut rng, (0.1, 3.0), (-1.0, 1.0));
        let name = format!("hurwitz zeta matches truncated dirichlet series [draw {k}]");
        let check = (|| {
            let em = hurwitz_zeta(s, a)?;
            let mut partial = ZERO;
            for n in 0..SERIES_TERMS {
                partial += (a + n as f64).powc(-s);
            }
            let tail = (SERIES_TERMS as f64 - 1.0 + a.re).powf(1.0 - s.re) / (s.re - 1.0);
            Ok(VerificationReport::compare_abs(&name, em, partial, 1.05 * tail + 2e-9))
        })();
        push_check(&mut reports, &name, 1e-9, check);
    }
    reports
}

fn regdet_reports(samples: usize, seed: u64, tol: f64) -> Vec<VerificationReport> {
    let mut reports = regdet_consistency_report(samples, seed);

    for k in 0..samples {
        let mut rng = substream_rng(seed, 5_000_000 + k as u64);
        let u = uniform_complex(&mut rng, (0.05, 3.0), (-2.0, 2.0));
        let theta: f64 = rng.gen_range(-0.9..0.9) * std::f64::consts::PI;
        let r: f64 = rng.gen_range(0.5..2.0);
        let rho = Complex64::from_polar(r, theta);
        let lambda = u * rho;
        let name = format!("half-line determinant: series route vs closed form [draw {k}]");
        let check = (|| {
            let closed = regdet(&SpectrumDescriptor::HalfLine { rho, lambda })?.det;
            let series = halfline_regdet_hurwitz(rho, lambda)?;
            Ok(VerificationReport::compare(&name, series, closed, 1e-9))
        })();
        push_check(&mut reports, &name, 1e-9, check);
    }

    for k in 0..samples {
        let mut rng = substream_rng(seed, 5_500_000 + k as u64);
        let u = uniform_complex(&mut rng, (0.05, 3.0), (-2.0, 2.0));
        let theta: f64 = rng.gen_range(-0.9..0.9) * std::f64::consts::PI;
        let r: f64 = rng.gen_range(0.5..2.0);
        let rho = Complex64::from_polar(r, theta);
        let lambda = u * rho;
        let c: f64 = rng.gen_range(0.3..3.0);
        let name = format!("half-line determinant scaling covariance [draw {k}]");
        let check = (|| {
            let scaled = regdet(&SpectrumDescriptor::HalfLine { rho: c * rho, lambda: c * lambda })?.det;
            let base = regdet(&SpectrumDescriptor::HalfLine { rho, lambda })?.det;
            let factor = pow_principal(Complex64::new(c, 0.0), Complex64::new(0.5, 0.0) - u);
            Ok(VerificationReport::compare(&name, scaled, factor * base, tol))
        })();
        push_check(&mut reports, &name, tol, check);
    }
    reports
}

fn theorem21_reports(samples: usize, seed: u64, tol: f64) -> Vec<VerificationReport> {
    let mut reports = Vec::new();
    for k in 0..samples {
        let mut rng = substream_rng(seed, 2_000_000 + k as u64);
        let n: usize = rng.gen_range(1..=3);
        let s = uniform_complex(&mut rng, (0.0, 4.0), (-1.0, 1.0));
        let alphas: Vec<Complex64> = (0..n)
            .map(|_| s - Complex64::new(2.0 * rng.gen_range(0.1..5.0), 0.0))
            .collect();

        let name = format!("disk correlator specializes to the real-place factor [draw {k}]");
        push_check(&mut reports, &name, 1e-12, theorem21_specialization(s, &alphas));

        let name = format!("eigenvalue order does not change the factor [draw {k}]");
        let check = (|| {
            let norm = EpsilonNormalization::default();
            let forward = l_factor(
                &LFactorSpec { place: Place::Real(Frobenius::Plus), s, eigenvalues: alphas.clone() },
                &norm,
            )?;
            let mut reversed_order = alphas.clone();
            reversed_order.reverse();
            let reversed = l_factor(
                &LFactorSpec { place: Place::Real(Frobenius::Plus), s, eigenvalues: reversed_order },
                &norm,
            )?;
            Ok(VerificationReport::compare_abs(&name, forward, reversed, 0.0))
        })();
        push_check(&mut reports, &name, 0.0, check);

        let name = format!("factor is multiplicative over eigenvalues [draw {k}]");
        let check = (|| {
            let norm = EpsilonNormalization::default();
            let joint = l_factor(
                &LFactorSpec { place: Place::Real(Frobenius::Plus), s, eigenvalues: alphas.clone() },
                &norm,
            )?;
            let mut product = ONE;
            for &alpha in &alphas {
                product *= l_factor(
                    &LFactorSpec { place: Place::Real(Frobenius::Plus), s, eigenvalues: vec![alpha] },
                    &norm,
                )?;
            }
            Ok(VerificationReport::compare(&name, joint, product, tol))
        })();
        push_check(&mut reports, &name, tol, check);
    }
    reports
}

fn qgamma_reports(samples: usize, seed: u64, tol: f64) -> Vec<VerificationReport> {
    let mut reports = Vec::new();
    for k in 0..samples {
        let mut rng = substream_rng(seed, 3_000_000 + k as u64);
        let q = Complex64::new(rng.gen_range(0.05..0.8), 0.0);
        let t = Complex64::from_polar(
            rng.gen_range(0.05..0.9),
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        );

        let name = format!("q-product truncation honesty [draw {k}]");
        let check = (|| {
            let coarse = q_pochhammer(t, q, ProductOrder::Infinite, 1e-8)?;
            let fine = q_pochhammer(t, q, ProductOrder::Infinite, 1e-12)?;
            Ok(VerificationReport::compare(&name, coarse, fine, 2e-8))
        })();
        push_check(&mut reports, &name, 2e-8, check);

        let name = format!("q-product matches log-domain summation [draw {k}]");
        let check = (|| {
            let mut log_sum = ZERO;
            let mut power = ONE;
            loop {
                let x = t * power;
                log_sum += (ONE - x).ln();
                let rest = x.norm() * q.re / ((1.0 - x.norm()) * (1.0 - q.re));
                if x.norm() < 0.5 && rest <= 1e-14 {
                    break;
                }
                power *= q;
            }
            let direct = q_pochhammer(t, q, ProductOrder::Infinite, 1e-13)?;
            Ok(VerificationReport::compare(&name, log_sum.exp(), direct, tol))
        })();
        push_check(&mut reports, &name, tol, check);

        let name = format!("euler factor inverts the degree-one q-product [draw {k}]");
        let check = (|| {
            let finite = q_pochhammer(t, q, ProductOrder::Finite(1), 1e-12)?;
            let euler = l_factor(
                &LFactorSpec { place: Place::NonArch(2), s: ZERO, eigenvalues: vec![t] },
                &EpsilonNormalization::default(),
            )?;
            Ok(VerificationReport::compare_abs(&name, finite * euler, ONE, 1e-15))
        })();
        push_check(&mut reports, &name, 1e-15, check);
    }
    reports
}

fn volumes_reports(samples: usize, seed: u64) -> Vec<VerificationReport> {
    let mut reports = Vec::new();

    for k in 0..samples.min(25) {
        let mut rng = substream_rng(seed, 4_000_000 + k as u64);
        let n: usize = rng.gen_range(1..=6);
        let m = random_complex_matrix(&mut rng, n, 1.0);
        let name = format!("fermionic determinant matches lu factorization [draw {k}]");
        let check = berezin_det(&m)
            .map(|bd| VerificationReport::compare(&name, bd, lu_det(&m), 1e-12));
        push_check(&mut reports, &name, 1e-12, check);
    }

    for k in 0..samples.min(25) {
        let mut rng = substream_rng(seed, 4_100_000 + k as u64);
        let n: usize = rng.gen_range(1..=5);
        let (h, _) = random_hermitian_with_spectrum(&mut rng, n, 0.5, 4.0);
        let name = format!("gaussian integral times rescaled determinant is one [draw {k}]");
        let check = (|| {
            let integral = gaussian_integral(&HermitianForm::new(h.clone())?)?;
            let product = integral * lu_det(&h) / TAU.powi(n as i32);
            Ok(VerificationReport::compare_abs(&name, product, ONE, 1e-12))
        })();
        push_check(&mut reports, &name, 1e-12, check);
    }

    for k in 0..samples.min(5) {
        let mut rng = substream_rng(seed, 4_200_000 + k as u64);
        let n: usize = rng.gen_range(1..=3);
        let (h, _) = random_hermitian_with_spectrum(&mut rng, n, 0.8, 4.0);
        let name = format!("monte carlo estimate within four standard errors [draw {k}]");
        let check = (|| {
            let form = HermitianForm::new(h.clone())?;
            let ctl = TruncationControl::new(1, 1, 50_000, seed.wrapping_add(7_700_000 + k as u64))?;
            let (mc, stderr) = gaussian_integral_mc(&form, &ctl)?;
            let exact = gaussian_integral(&form)?;
            Ok(VerificationReport::compare_abs(&name, mc, exact, 4.0 * stderr))
        })();
        push_check(&mut reports, &name, 0.0, check);
    }

    for k in 0..samples.min(5) {
        let mut rng = substream_rng(seed, 4_300_000 + k as u64);
        let lambda: f64 = rng.gen_range(0.2..4.0);
        let name = format!("degenerate pair form matches diagonal form [draw {k}]");
        let check = (|| {
            let paired = degenerate_pair_value(lambda)?;
            let diagonal = gaussian_integral(&HermitianForm::diagonal(&[lambda, lambda])?)?;
            Ok(VerificationReport::compare(&name, paired, diagonal, 1e-12))
        })();
        push_check(&mut reports, &name, 1e-12, check);
    }

    for k in 0..samples.min(10) {
        let mut rng = substream_rng(seed, 4_400_000 + k as u64);
        let m: usize = rng.gen_range(1..=3);
        // Spread the weights (each extra weight at least twice the smallest)
        // so the geometric tail bound provably covers the deficit.
        let base: f64 = rng.gen_range(0.5..1.5);
        let mut lambdas = vec![base];
        for _ in 1..m {
            lambdas.push(base * rng.gen_range(2.0..4.0));
        }
        let beta: f64 = rng.gen_range(0.5..2.0);
        let name = format!("character trace within its geometric tail bound [draw {k}]");
        let check = (|| {
            let trace = character_trace(beta, &lambdas, 80)?;
            let closed = character_closed(beta, &lambdas)?;
            let bound = character_tail_bound(beta, &lambdas, 80)?;
            Ok(VerificationReport::compare_abs(
                &name,
                Complex64::new(trace, 0.0),
                Complex64::new(closed, 0.0),
                bound + 1e-13,
            ))
        })();
        push_check(&mut reports, &name, 1e-13, check);

        let name = format!("character trace grows with the cutoff [draw {k}]");
        let check = (|| {
            let low = character_trace(beta, &lambdas, 40)?;
            let high = character_trace(beta, &lambdas, 80)?;
            let violation = (low - high).max(0.0);
            Ok(VerificationReport::compare_abs(&name, Complex64::new(violation, 0.0), ZERO, 0.0))
        })();
        push_check(&mut reports, &name, 0.0, check);
    }

    for k in 0..samples.min(10) {
        let mut rng = substream_rng(seed, 4_500_000 + k as u64);
        let beta: f64 = rng.gen_range(0.4..1.5);
        let hbar: f64 = rng.gen_range(0.5..2.0);
        let lambda: f64 = rng.gen_range(0.3..2.0);
        let name = format!("mode product equals the q-gamma route [draw {k}]");
        let check = (|| {
            let product = mode_partition_3d(beta, hbar, lambda, None, 1e-12)?;
            let params = QDeformParams::from_rates(beta, hbar, lambda)?;
            Ok(VerificationReport::compare(&name, product, q_gamma(&params, 1e-13)?, 1e-12))
        })();
        push_check(&mut reports, &name, 1e-12, check);

        let n: u32 = rng.gen_range(0..=6);
        let name = format!("mode factor matches its determinant route [draw {k}]");
        let check = (|| {
            let direct = mode_factor(beta, hbar, lambda, n)?;
            let via_det = mode_factor_via_regdet(beta, hbar, lambda, n)?;
            Ok(VerificationReport::compare(&name, Complex64::new(direct, 0.0), via_det, 1e-12))
        })();
        push_check(&mut reports, &name, 1e-12, check);
    }

    for k in 0..samples.min(10) {
        let mut rng = substream_rng(seed, 4_600_000 + k as u64);
        let m: usize = rng.gen_range(1..=3);
        let lambdas: Vec<f64> = (0..m).map(|_| rng.gen_range(0.3..3.0)).collect();
        for mu in [0.5, 1.0, 2.5] {
            let name = format!("super volume is mu-independent [draw {k}, mu = {mu}]");
            let check = (|| {
                let reference = equivariant_volume(&lambdas)?;
                let v = equivariant_volume_super(mu, &lambdas)?;
                Ok(VerificationReport::compare(&name, v, Complex64::new(reference, 0.0), 1e-12))
            })();
            push_check(&mut reports, &name, 1e-12, check);
        }
    }

    if samples > 0 {
        match classical_limit_check(&[1.0], &[1e-2, 1e-3, 1e-4]) {
            Ok(more) => reports.extend(more),
            Err(err) => push_check(
                &mut reports,
                "classical limit ratio",
                0.0,
                Err(err),
            ),
        }
    }
    reports
}

/// Convergence-table targets; each fixes a reference model and varies one
/// truncation parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceTarget {
    /// Finite q-products at `q = t = 1/2` against the infinite product.
    QGamma,
    /// Scaled character vs. equivariant volume for weight 1, varying `beta`.
    ClassicalLimit,
    /// Truncated character trace at `beta = 1`, weights `(1, 2)`, varying the
    /// degree cutoff.
    Character,
    /// Truncated mode product at `(beta, hbar, lambda) = (ln 2, 1, 1)`,
    /// varying the mode cutoff.
    Mode3d,
}

impl ConvergenceTarget {
    pub fn name(self) -> &'static str {
        match self {
            ConvergenceTarget::QGamma => "qgamma",
            ConvergenceTarget::ClassicalLimit => "classical_limit",
            ConvergenceTarget::Character => "character",
            ConvergenceTarget::Mode3d => "mode3d",
        }
    }

    pub fn parameter_name(self) -> &'static str {
        match self {
            ConvergenceTarget::QGamma => "terms",
            ConvergenceTarget::ClassicalLimit => "beta",
            ConvergenceTarget::Character => "degree",
            ConvergenceTarget::Mode3d => "modes",
        }
    }
}

/// One grid point of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub parameter: f64,
    pub value: Complex64,
    pub reference: Complex64,
    pub abs_error: f64,
    /// A priori bound on the truncation error at this grid point.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub target: &'static str,
    pub parameter_name: &'static str,
    pub rows: Vec<ConvergenceRow>,
}

fn grid_cutoff(value: f64, minimum: u32) -> Result<u32> {
    if value.fract() != 0.0 || !value.is_finite() || value < minimum as f64 || value > 1e6 {
        return Err(MathError::Domain(format!(
            "grid entries must be integers in [{minimum}, 1e6], got {value}"
        )));
    }
    Ok(value as u32)
}

/// Relative truncation bound of a geometric-ratio product with first dropped
/// magnitude `x` and ratio `r`: `exp(x / ((1-x)(1-r))) - 1`.
fn geometric_product_bound(x: f64, r: f64) -> f64 {
    (x / ((1.0 - x) * (1.0 - r))).exp_m1()
}

/// Evaluates one convergence target over a grid of truncation parameters.
pub fn run_convergence(target: ConvergenceTarget, grid: &[f64]) -> Result<ConvergenceTable> {
    if grid.is_empty() {
        return Err(MathError::Domain("parameter grid must be non-empty".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    match target {
        ConvergenceTarget::QGamma => {
            let (q, t) = (Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0));
            let reference = q_pochhammer(t, q, ProductOrder::Infinite, 1e-14)?;
            for &g in grid {
                let n = grid_cutoff(g, 1)?;
                let value = q_pochhammer(t, q, ProductOrder::Finite(n), 1e-14)?;
                let x = t.norm() * q.norm().powi(n as i32);
                let bound = reference.norm() * (geometric_product_bound(x, q.norm()) + 2e-14);
                rows.push(ConvergenceRow {
                    parameter: g,
                    value,
                    reference,
                    abs_error: (value - reference).norm(),
                    bound,
                });
            }
        }
        ConvergenceTarget::ClassicalLimit => {
            let lambdas = [1.0];
            let volume = equivariant_volume(&lambdas)?;
            for &beta in grid {
                if !(beta.is_finite() && beta > 0.0) {
                    return Err(MathError::Domain(format!("beta must be positive, got {beta}")));
                }
                let scaled = (TAU * beta).powi(lambdas.len() as i32)
                    * character_closed(beta, &lambdas)?;
                let value = Complex64::new(scaled / volume, 0.0);
                rows.push(ConvergenceRow {
                    parameter: beta,
                    value,
                    reference: ONE,
                    abs_error: (value - ONE).norm(),
                    bound: beta * lambdas.iter().sum::<f64>(),
                });
            }
        }
        ConvergenceTarget::Character => {
            let (beta, lambdas) = (1.0, [1.0, 2.0]);
            let reference = Complex64::new(character_closed(beta, &lambdas)?, 0.0);
            for &g in grid {
                let d = grid_cutoff(g, 0)?;
                let value = Complex64::new(character_trace(beta, &lambdas, d)?, 0.0);
                rows.push(ConvergenceRow {
                    parameter: g,
                    value,
                    reference,
                    abs_error: (value - reference).norm(),
                    bound: character_tail_bound(beta, &lambdas, d)?,
                });
            }
        }
        ConvergenceTarget::Mode3d => {
            let (beta, hbar, lambda) = (std::f64::consts::LN_2, 1.0, 1.0);
            let reference = q_gamma(&QDeformParams::from_rates(beta, hbar, lambda)?, 1e-14)?;
            let (q, t) = ((-beta * hbar).exp(), (-beta * lambda).exp());
            for &g in grid {
                let n = grid_cutoff(g, 0)?;
                let value = mode_partition_3d(beta, hbar, lambda, Some(n), 1e-12)?;
                let x = t * q.powi(n as i32 + 1);
                let bound = reference.norm() * (geometric_product_bound(x, q) + 2e-14);
                rows.push(ConvergenceRow {
                    parameter: g,
                    value,
                    reference,
                    abs_error: (value - reference).norm(),
                    bound,
                });
            }
        }
    }
    Ok(ConvergenceTable {
        target: target.name(),
        parameter_name: target.parameter_name(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_samples_give_empty_passing_suites() {
        for suite in Suite::ALL {
            let result = run_suite(suite, 0, 0, 1e-10);
            assert_eq!(result.pass_count, 0);
            assert_eq!(result.fail_count, 0);
            assert!(result.reports.is_empty());
            assert!(result.all_pass());
        }
    }

    #[test]
    fn all_suites_pass_on_seeded_draws() {
        for suite in Suite::ALL {
            let result = run_suite(suite, 5, 0, 1e-10);
            assert!(result.pass_count > 0, "{} produced no reports", suite.name());
            for report in &result.reports {
                assert!(report.pass, "{}: {report:?}", suite.name());
            }
        }
    }

    #[test]
    fn suite_runs_are_deterministic() {
        let a = run_suite(Suite::Theorem21, 7, 3, 1e-10);
        let b = run_suite(Suite::Theorem21, 7, 3, 1e-10);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = run_suite(Suite::Theorem21, 7, 4, 1e-10);
        assert_ne!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&c).unwrap()
        );
    }

    #[test]
    fn qgamma_convergence_errors_shrink_below_bound() {
        let table = run_convergence(ConvergenceTarget::QGamma, &[5.0, 10.0, 20.0]).unwrap();
        assert_eq!(table.parameter_name, "terms");
        let mut prev = f64::INFINITY;
        for row in &table.rows {
            assert!(row.abs_error <= row.bound, "{row:?}");
            assert!(row.abs_error < prev, "{row:?}");
            prev = row.abs_error;
        }
    }

    #[test]
    fn classical_limit_convergence_scales_linearly() {
        let table =
            run_convergence(ConvergenceTarget::ClassicalLimit, &[1e-2, 1e-3, 1e-4]).unwrap();
        assert_eq!(table.rows.len(), 3);
        for pair in table.rows.windows(2) {
            let ratio = pair[0].abs_error / pair[1].abs_error;
            assert!((ratio - 10.0).abs() < 0.5, "expected ~x10 decay, got {ratio}");
            assert!(pair[1].abs_error <= pair[1].bound);
        }
    }

    #[test]
    fn character_convergence_is_monotone() {
        let table = run_convergence(ConvergenceTarget::Character, &[10.0, 20.0, 40.0]).unwrap();
        for pair in table.rows.windows(2) {
            assert!(pair[1].value.re >= pair[0].value.re);
            assert!(pair[1].abs_error <= pair[0].abs_error);
            assert!(pair[1].abs_error <= pair[1].bound + 1e-13);
        }
    }

    #[test]
    fn mode3d_convergence_respects_bound() {
        let table = run_convergence(ConvergenceTarget::Mode3d, &[2.0, 5.0, 10.0, 20.0]).unwrap();
        for row in &table.rows {
            assert!(row.abs_error <= row.bound, "{row:?}");
        }
        assert!(table.rows[3].abs_error < table.rows[0].abs_error);
    }

    #[test]
    fn convergence_rejects_bad_grids() {
        assert!(matches!(
            run_convergence(ConvergenceTarget::QGamma, &[]),
            Err(MathError::Domain(_))
        ));
        assert!(matches!(
            run_convergence(ConvergenceTarget::QGamma, &[2.5]),
            Err(MathError::Domain(_))
        ));
        assert!(matches!(
            run_convergence(ConvergenceTarget::QGamma, &[0.0]),
            Err(MathError::Domain(_))
        ));
        assert!(matches!(
            run_convergence(ConvergenceTarget::ClassicalLimit, &[-1.0]),
            Err(MathError::Domain(_))
        ));
    }
}
