//! Deterministic random sampling: a seeded ChaCha stream per logical substream
//! so every verification run is reproducible, plus generators for random
//! Hermitian / normal / unstructured complex matrices.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::CMat;

/// ChaCha8 generator for substream `index` of master seed `seed`. Substreams
/// are independent, so chunked computations can be parallel-order agnostic.
pub fn substream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard normal sample by Box-Muller; two uniforms per call.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Uniform complex number in the axis-aligned box `[re_lo, re_hi] x [im_lo, im_hi]`.
pub fn uniform_complex(rng: &mut ChaCha8Rng, re: (f64, f64), im: (f64, f64)) -> Complex64 {
    Complex64::new(rng.gen_range(re.0..=re.1), rng.gen_range(im.0..=im.1))
}

/// Unstructured complex matrix with entries uniform in `[-scale, scale]^2`.
pub fn random_complex_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMat {
    let mut m = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = uniform_complex(rng, (-scale, scale), (-scale, scale));
        }
    }
    m
}

/// Random unitary as a product of complex Givens rotations touching every
/// index pair twice; exactly unitary up to rounding.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let mut u = CMat::identity(n);
    if n < 2 {
        return u;
    }
    for _pass in 0..2 {
        for p in 0..n {
            for q in p + 1..n {
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let (c, s) = (theta.cos(), theta.sin());
                let eip = Complex64::from_polar(1.0, phi);
                for i in 0..n {
                    let (up, uq) = (u[(i, p)], u[(i, q)]);
                    u[(i, p)] = c * up - s * eip.conj() * uq;
                    u[(i, q)] = s * eip * up + c * uq;
                }
            }
        }
    }
    u
}

/// Hermitian matrix with spectrum drawn uniformly from `[lo, hi]`, returned
/// with its eigenvalues (ascending).
pub fn random_hermitian_with_spectrum(
    rng: &mut ChaCha8Rng,
    n: usize,
    lo: f64,
    hi: f64,
) -> (CMat, Vec<f64>) {
    let mut eigs: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let d = CMat::diag(&eigs.iter().map(|&e| Complex64::new(e, 0.0)).collect::<Vec<_>>());
    let u = random_unitary(rng, n);
    let h = u.mul(&d).mul(&u.adjoint());
    // Symmetrize away the last rounding bits so downstream Hermiticity
    // screens at 1e-12 never trip on generator noise.
    let mut hh = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            hh[(i, j)] = 0.5 * (h[(i, j)] + h[(j, i)].conj());
        }
    }
    (hh, eigs)
}

/// Normal matrix with the given complex spectrum (unitary conjugate of the
/// diagonal), plus the spectrum sorted by (re, im) for comparison against
/// eigensolver output.
pub fn random_normal_with_spectrum(
    rng: &mut ChaCha8Rng,
    eigs: &[Complex64],
) -> (CMat, Vec<Complex64>) {
    let n = eigs.len();
    let d = CMat::diag(eigs);
    let u = random_unitary(rng, n);
    let a = u.mul(&d).mul(&u.adjoint());
    let mut sorted = eigs.to_vec();
    sorted.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
    (a, sorted)
}
