//! Dense complex linear algebra for desk-scale matrices (n <= ~10): LU
//! determinants, Hermitian eigensolves by cyclic Jacobi, and eigenvalues of
//! normal matrices via simultaneous diagonalization of the Hermitian and
//! anti-Hermitian parts.
//!
//! Everything here is deterministic: no randomized pivoting, eigenvalues are
//! returned in a fixed sort order, so repeated runs agree bit for bit.

use num_complex::Complex64;

use crate::error::{MathError, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    n: usize,
    a: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(MathError::Dimension(format!(
                "expected a square matrix, got {n} rows of lengths {:?}",
                rows.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        Ok(Self { n, a: rows.concat() })
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn adjoint(&self) -> CMat {
        let mut out = CMat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix product");
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Largest |a_ij| over the matrix; 0 for the empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max_ij |a_ij - conj(a_ji)|: zero iff Hermitian.
    pub fn hermitian_residual(&self) -> f64 {
        let mut r = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    /// max_ij |(A A* - A* A)_ij|: zero iff normal.
    pub fn normality_residual(&self) -> f64 {
        let ad = self.adjoint();
        let mut r = 0.0f64;
        let left = self.mul(&ad);
        let right = ad.mul(self);
        for i in 0..self.n {
            for j in 0..self.n {
                r = r.max((left[(i, j)] - right[(i, j)]).norm());
            }
        }
        r
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.a[i * self.n + j]
    }
}

/// Determinant by LU with partial pivoting. Returns exactly zero when a pivot
/// column vanishes.
pub fn lu_det(m: &CMat) -> Complex64 {
    let n = m.n;
    if n == 0 {
        return ONE;
    }
    let mut a = m.a.clone();
    let mut det = ONE;
    for col in 0..n {
        let (mut piv, mut piv_mag) = (col, a[col * n + col].norm());
        for r in col + 1..n {
            let mag = a[r * n + col].norm();
            if mag > piv_mag {
                (piv, piv_mag) = (r, mag);
            }
        }
        if piv_mag == 0.0 {
            return ZERO;
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f == ZERO {
                continue;
            }
            for j in col + 1..n {
                let v = a[col * n + j];
                a[r * n + j] -= f * v;
            }
        }
    }
    det
}

/// Eigen-decomposition H = V diag(w) V* of a Hermitian matrix by cyclic
/// complex Jacobi rotations. `h` is symmetrized as (H + H*)/2 first, so tiny
/// Hermiticity violations are tolerated silently; large ones are the caller's
/// responsibility to screen with [`CMat::hermitian_residual`].
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.n;
    let mut m = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = 0.5 * (h[(i, j)] + h[(j, i)].conj());
        }
    }
    let mut v = CMat::identity(n);
    if n <= 1 {
        return ((0..n).map(|i| m[(i, i)].re).collect(), v);
    }

    let scale = m.max_abs().max(1e-300);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let hpq = m[(p, q)];
                if hpq.norm() <= 1e-18 * scale {
                    continue;
                }
                // Classical 2x2 Jacobi angle on the phase-rotated element.
                let phi = hpq.arg();
                let tau = (m[(q, q)].re - m[(p, p)].re) / (2.0 * hpq.norm());
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let eip = Complex64::from_polar(1.0, phi);
                let ein = eip.conj();

                // Column rotation: [p q] <- [p q] G with
                // G = [[c, s e^{i phi}], [-s e^{-i phi}, c]].
                for i in 0..n {
                    let (mp, mq) = (m[(i, p)], m[(i, q)]);
                    m[(i, p)] = c * mp - s * ein * mq;
                    m[(i, q)] = s * eip * mp + c * mq;
                }
                // Row rotation with G*.
                for j in 0..n {
                    let (mp, mq) = (m[(p, j)], m[(q, j)]);
                    m[(p, j)] = c * mp - s * eip * mq;
                    m[(q, j)] = s * ein * mp + c * mq;
                }
                for i in 0..n {
                    let (vp, vq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * vp - s * ein * vq;
                    v[(i, q)] = s * eip * vp + c * vq;
                }
            }
        }
    }
    ((0..n).map(|i| m[(i, i)].re).collect(), v)
}

/// Eigenvalues of a normal matrix (A A* = A* A), deterministically ordered by
/// (re, im).
///
/// Method: diagonalize the Hermitian part (A + A*)/2; inside each cluster of
/// equal Hermitian eigenvalues the transformed matrix is block diagonal, and
/// its anti-Hermitian part restricted to the cluster is Hermitian after
/// dividing by i, so a second Jacobi pass finishes the job. Rejects matrices
/// whose normality residual exceeds `tol * max(1, max|a_ij|)`.
pub fn normal_eigenvalues(a: &CMat, tol: f64) -> Result<Vec<Complex64>> {
    let n = a.n;
    if n == 0 {
        return Ok(vec![]);
    }
    let scale = a.max_abs().max(1.0);
    let res = a.normality_residual();
    if res > tol * scale {
        return Err(MathError::NonNormalMatrix(res));
    }

    let mut herm = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            herm[(i, j)] = 0.5 * (a[(i, j)] + a[(j, i)].conj());
        }
    }
    let (hvals, v) = hermitian_eigen(&herm);
    let b = v.adjoint().mul(a).mul(&v);

    // Group indices by Hermitian eigenvalue; within a group, diagonalize the
    // skew part K = (B - B*)/(2i).
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| hvals[i].partial_cmp(&hvals[j]).unwrap());
    let cluster_tol = 1e-6 * scale.max(1.0);

    let mut out: Vec<Complex64> = Vec::with_capacity(n);
    let mut start = 0usize;
    while start < n {
        let mut end = start + 1;
        while end < n && (hvals[order[end]] - hvals[order[end - 1]]).abs() <= cluster_tol {
            end += 1;
        }
        let idx = &order[start..end];
        let m = idx.len();
        if m == 1 {
            let i = idx[0];
            out.push(Complex64::new(hvals[i], (b[(i, i)] / crate::specfun::I).re));
        } else {
            let mut k = CMat::zeros(m);
            for (r, &ir) in idx.iter().enumerate() {
                for (cix, &ic) in idx.iter().enumerate() {
                    k[(r, cix)] = (b[(ir, ic)] - b[(ic, ir)].conj()) / (2.0 * crate::specfun::I);
                }
            }
            let (kvals, _) = hermitian_eigen(&k);
            let hmean: f64 = idx.iter().map(|&i| hvals[i]).sum::<f64>() / m as f64;
            for kv in kvals {
                out.push(Complex64::new(hmean, kv));
            }
        }
        start = end;
    }

    out.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
    Ok(out)
}
