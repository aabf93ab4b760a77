//! Exact finite-dimensional Grassmann algebra: elements of the exterior
//! algebra on `n` anticommuting generators, with multiplication, the
//! (nilpotency-terminated) exponential, and Berezin evaluation of the
//! determinant integral.
//!
//! Representation: an element is the vector of its coefficients on canonical
//! monomials. Bitmask `m` stands for the product of the generators whose bits
//! are set, written in ascending index order; all sign bookkeeping happens in
//! multiplication, which counts the transpositions needed to interleave two
//! ascending monomials.

use num_complex::Complex64;

use crate::error::{MathError, Result};
use crate::linalg::CMat;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Hard cap on generator count: coefficient storage is `2^n`.
const MAX_GENERATORS: u32 = 16;

/// An element of the Grassmann algebra on `gen_count` generators.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannElement {
    gen_count: u32,
    /// `coeffs[mask]` multiplies the ascending product of the generators in
    /// `mask`; index 0 is the scalar part, the top index the full product.
    coeffs: Vec<Complex64>,
}

/// Parity of the transposition count that interleaves ascending monomial `b`
/// into ascending monomial `a` (masks assumed disjoint): each generator of
/// `b` must pass the generators of `a` with larger index.
fn interleave_sign(a: usize, b: usize) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += ((a >> (j + 1)) as u32).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl GrassmannElement {
    pub fn zero(gen_count: u32) -> Result<Self> {
        if gen_count > MAX_GENERATORS {
            return Err(MathError::Dimension(format!(
                "at most {MAX_GENERATORS} generators supported, got {gen_count}"
            )));
        }
        Ok(Self {
            gen_count,
            coeffs: vec![ZERO; 1usize << gen_count],
        })
    }

    pub fn scalar(gen_count: u32, value: Complex64) -> Result<Self> {
        let mut e = Self::zero(gen_count)?;
        e.coeffs[0] = value;
        Ok(e)
    }

    pub fn generator(gen_count: u32, index: u32) -> Result<Self> {
        if index >= gen_count {
            return Err(MathError::Dimension(format!(
                "generator index {index} out of range for {gen_count} generators"
            )));
        }
        let mut e = Self::zero(gen_count)?;
        e.coeffs[1usize << index] = ONE;
        Ok(e)
    }

    pub fn gen_count(&self) -> u32 {
        self.gen_count
    }

    pub fn coeff(&self, mask: usize) -> Complex64 {
        self.coeffs[mask]
    }

    /// Adds `value` to the coefficient of the canonical monomial `mask`.
    pub fn add_monomial(&mut self, mask: usize, value: Complex64) {
        self.coeffs[mask] += value;
    }

    /// Coefficient of the full product of all generators.
    pub fn top_coeff(&self) -> Complex64 {
        *self.coeffs.last().expect("coefficient vector is never empty")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == ZERO)
    }

    fn check_same_algebra(&self, rhs: &Self) -> Result<()> {
        if self.gen_count != rhs.gen_count {
            return Err(MathError::Dimension(format!(
                "mixing algebras with {} and {} generators",
                self.gen_count, rhs.gen_count
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_algebra(rhs)?;
        let mut out = self.clone();
        for (o, r) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *o += r;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= factor;
        }
        out
    }

    /// Product in the exterior algebra; cost is O(nnz(self) * nnz(rhs)).
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_same_algebra(rhs)?;
        let mut out = Self::zero(self.gen_count)?;
        for (a_mask, &ca) in self.coeffs.iter().enumerate() {
            if ca == ZERO {
                continue;
            }
            for (b_mask, &cb) in rhs.coeffs.iter().enumerate() {
                if cb == ZERO || a_mask & b_mask != 0 {
                    continue;
                }
                out.coeffs[a_mask | b_mask] += interleave_sign(a_mask, b_mask) * ca * cb;
            }
        }
        Ok(out)
    }

    /// Exponential of a nilpotent element (scalar part must vanish): the
    /// power series terminates because each power raises the minimal degree.
    pub fn exp(&self) -> Result<Self> {
        if self.coeffs[0] != ZERO {
            return Err(MathError::Domain(
                "grassmann exponential requires a vanishing scalar part".into(),
            ));
        }
        let mut result = Self::scalar(self.gen_count, ONE)?;
        let mut term = Self::scalar(self.gen_count, ONE)?;
        for k in 1..=u64::from(self.gen_count) {
            term = term.mul(self)?.scale(Complex64::new(1.0 / k as f64, 0.0));
            if term.is_zero() {
                break;
            }
            result = result.add(&term)?;
        }
        Ok(result)
    }
}

/// Determinant of `a` evaluated as the Berezin integral of
/// `exp(i sum_jk etabar_j a_jk eta_k)` against the measure
/// `prod_j (i d eta^j d etabar^j)`.
///
/// Generators are laid out as `etabar_1..etabar_n` on bits `0..n` and
/// `eta_1..eta_n` on bits `n..2n`. Integration extracts the top coefficient;
/// the prefactor `(-i)^n (-1)^{n(n-1)/2}` accounts for the `i^n` of the
/// measure and for reordering the interleaved measure differentials into the
/// canonical monomial order.
pub fn berezin_det(a: &CMat) -> Result<Complex64> {
    let n = a.n() as u32;
    if n > 8 {
        return Err(MathError::Dimension(format!(
            "berezin evaluation supports at most 8x8 matrices, got {n}x{n}"
        )));
    }
    if n == 0 {
        return Ok(ONE);
    }
    let mut action = GrassmannElement::zero(2 * n)?;
    for i in 0..n as usize {
        for j in 0..n as usize {
            // etabar_i eta_j is already in canonical order: bit i < bit n+j.
            action.add_monomial((1 << i) | (1 << (n as usize + j)), I * a[(i, j)]);
        }
    }
    let top = action.exp()?.top_coeff();

    let minus_i_pow = match n % 4 {
        0 => ONE,
        1 => -I,
        2 => -ONE,
        _ => I,
    };
    let swap_sign = if (n * (n - 1) / 2).is_multiple_of(2) { ONE } else { -ONE };
    Ok(minus_i_pow * swap_sign * top)
}
