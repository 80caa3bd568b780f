//! Dense linear algebra on small and medium matrices.
//!
//! Everything here is direct and deterministic: LU with partial pivoting,
//! Householder QR, modified Gram–Schmidt under a caller supplied inner
//! product, and inverse iteration for the smallest singular pair.

use core::fmt::Debug;
use core::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::prelude::*;

/// Relative pivot size below which a matrix is treated as singular.
pub const EPS_SOLVER: f64 = 1e-13;

/// Field scalar: `f64` or [`C64`].
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn modulus(self) -> f64;
    fn conj(self) -> Self;
    fn finite(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        Float::abs(self)
    }
    fn conj(self) -> Self {
        self
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for C64 {
    fn zero() -> Self {
        ZERO
    }
    fn one() -> Self {
        ONE
    }
    fn from_f64(x: f64) -> Self {
        real(x)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn conj(self) -> Self {
        C64::conj(&self)
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension(alloc::format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        if data.iter().any(|x| !x.finite()) {
            return Err(Error::NonFinite);
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>]) -> Result<Self> {
        let rows = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != rows) {
            return Err(Error::Dimension("ragged columns".into()));
        }
        let m = Self::from_fn(rows, cols.len(), |i, j| cols[j][i]);
        Self::new(m.rows, m.cols, m.data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = T::zero();
                for (a, b) in self.row(i).iter().zip(x) {
                    s += *a * *b;
                }
                s
            })
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other[(k, j)];
                    out[(i, j)] += a * b;
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.modulus()))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn norm2<T: Scalar>(x: &[T]) -> f64 {
    x.iter().map(|v| v.modulus() * v.modulus()).sum::<f64>().sqrt()
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(a: &DenseMatrix<T>) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::Dimension("LU needs a square matrix".into()));
        }
        let n = a.rows;
        let scale = a.max_abs();
        if scale == 0.0 {
            return Err(Error::Singular { pivot: 0.0 });
        }
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].modulus();
            for i in k + 1..n {
                let v = lu[i * n + k].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best < EPS_SOLVER * scale {
                return Err(Error::Singular { pivot: best / scale });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let inv = T::one() / lu[k * n + k];
            for i in k + 1..n {
                let l = lu[i * n + k] * inv;
                lu[i * n + k] = l;
                if l == T::zero() {
                    continue;
                }
                let (upper, lower) = lu.split_at_mut(i * n);
                let rk = &upper[k * n + k + 1..k * n + n];
                let ri = &mut lower[k + 1..n];
                for (x, y) in ri.iter_mut().zip(rk) {
                    *x -= l * *y;
                }
            }
        }
        Ok(Lu { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Inverse matrix, column by column.
    pub fn inverse(&self) -> DenseMatrix<T> {
        let n = self.n;
        let mut out = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            let col = self.solve(&e);
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        out
    }
}

/// Solves `A x = b` with partial pivoting.
pub fn solve<T: Scalar>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    if b.len() != a.rows {
        return Err(Error::Dimension("right-hand side length".into()));
    }
    Ok(Lu::factor(a)?.solve(b))
}

/// Householder QR of a tall complex matrix.
#[derive(Debug, Clone)]
pub struct Qr {
    rows: usize,
    cols: usize,
    // Householder vectors, one per column, each of length rows - k.
    reflectors: Vec<Vec<C64>>,
    r: DenseMatrix<C64>,
}

impl Qr {
    pub fn factor(a: &DenseMatrix<C64>) -> Result<Self> {
        let (m, n) = (a.rows, a.cols);
        if m < n {
            return Err(Error::Dimension("QR needs rows >= cols".into()));
        }
        let mut w = a.clone();
        let mut reflectors = Vec::with_capacity(n);
        for k in 0..n {
            let mut v: Vec<C64> = (k..m).map(|i| w[(i, k)]).collect();
            let nx = norm2(&v);
            if nx == 0.0 {
                reflectors.push(vec![ZERO; m - k]);
                continue;
            }
            let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { ONE };
            let alpha = -phase * nx;
            v[0] -= alpha;
            let nv = norm2(&v);
            for x in v.iter_mut() {
                *x /= nv;
            }
            for j in k..n {
                let mut s = ZERO;
                for (idx, i) in (k..m).enumerate() {
                    s += v[idx].conj() * w[(i, j)];
                }
                let s2 = s * 2.0;
                for (idx, i) in (k..m).enumerate() {
                    w[(i, j)] -= v[idx] * s2;
                }
            }
            reflectors.push(v);
        }
        let r = DenseMatrix::from_fn(n, n, |i, j| if j >= i { w[(i, j)] } else { ZERO });
        Ok(Qr { rows: m, cols: n, reflectors, r })
    }

    pub fn r(&self) -> &DenseMatrix<C64> {
        &self.r
    }

    /// Applies `Q^H` to a vector of length `rows`.
    pub fn apply_qh(&self, b: &[C64]) -> Vec<C64> {
        let mut y = b.to_vec();
        for (k, v) in self.reflectors.iter().enumerate() {
            let mut s = ZERO;
            for (idx, i) in (k..self.rows).enumerate() {
                s += v[idx].conj() * y[i];
            }
            for (idx, i) in (k..self.rows).enumerate() {
                y[i] -= v[idx] * (s * 2.0);
            }
        }
        y
    }

    /// Least-squares solution of `min ‖A x − b‖`.
    pub fn least_squares(&self, b: &[C64]) -> Result<Vec<C64>> {
        if b.len() != self.rows {
            return Err(Error::Dimension("right-hand side length".into()));
        }
        let y = self.apply_qh(b);
        let scale = self.r.max_abs();
        let n = self.cols;
        let mut x = vec![ZERO; n];
        for i in (0..n).rev() {
            let d = self.r[(i, i)];
            if d.norm() < EPS_SOLVER * scale || scale == 0.0 {
                return Err(Error::Singular { pivot: d.norm() / scale.max(f64::MIN_POSITIVE) });
            }
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.r[(i, j)] * x[j];
            }
            x[i] = s / d;
        }
        Ok(x)
    }
}

/// Least squares `min ‖A x − b‖` by Householder QR.
pub fn least_squares(a: &DenseMatrix<C64>, b: &[C64]) -> Result<Vec<C64>> {
    Qr::factor(a)?.least_squares(b)
}

/// Orthonormal set produced by [`orthonormalize`].
#[derive(Debug, Clone)]
pub struct OrthoSet {
    /// Orthonormal vectors, in the order of the retained inputs.
    pub vectors: Vec<Vec<C64>>,
    /// `transform[j][q]` is the weight of input `j` in output `q`:
    /// `vectors[q] = Σ_j transform[j][q] · span[j]`. Zero for `j` after the
    /// `q`-th retained input, so the record is upper triangular.
    pub transform: Vec<Vec<C64>>,
    /// Input index of each retained vector.
    pub retained: Vec<usize>,
    /// Input indices removed by the drop tolerance.
    pub dropped: Vec<usize>,
}

/// Modified Gram–Schmidt with one reorthogonalization pass.
///
/// A vector is dropped when its residual norm falls below `drop_tol` times
/// its original norm. `inner(u, v)` is linear in `u` and conjugate linear
/// in `v`.
pub fn orthonormalize<F>(span: &[Vec<C64>], inner: F, drop_tol: f64) -> OrthoSet
where
    F: Fn(&[C64], &[C64]) -> C64,
{
    let n_in = span.len();
    let mut out = OrthoSet { vectors: Vec::new(), transform: Vec::new(), retained: Vec::new(), dropped: Vec::new() };
    // Column-major copy of the transform while building.
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for (j, v) in span.iter().enumerate() {
        let orig = inner(v, v).re.max(0.0).sqrt();
        if orig == 0.0 || !orig.is_finite() {
            out.dropped.push(j);
            continue;
        }
        let mut w: Vec<C64> = v.iter().map(|x| *x / orig).collect();
        let mut t = vec![ZERO; n_in];
        t[j] = real(1.0 / orig);
        for _pass in 0..2 {
            for (q, e) in out.vectors.iter().enumerate() {
                let c = inner(&w, e);
                for (x, y) in w.iter_mut().zip(e) {
                    *x -= c * *y;
                }
                for (x, y) in t.iter_mut().zip(&cols[q]) {
                    *x -= c * *y;
                }
            }
        }
        let nw = inner(&w, &w).re.max(0.0).sqrt();
        if nw < drop_tol {
            out.dropped.push(j);
            continue;
        }
        for x in w.iter_mut() {
            *x /= nw;
        }
        for x in t.iter_mut() {
            *x /= nw;
        }
        out.vectors.push(w);
        cols.push(t);
        out.retained.push(j);
    }
    out.transform = (0..n_in).map(|j| cols.iter().map(|c| c[j]).collect()).collect();
    out
}

/// Smallest singular value of a tall matrix and its right singular vector.
///
/// One-sided Jacobi on the triangular QR factor `R`: columns are rotated
/// pairwise until mutually orthogonal, so the singular values are the
/// column norms and the accumulated rotations are the right singular
/// vectors. Small singular values come out with high relative accuracy and
/// clustered ones cause no trouble.
pub fn min_singular_direction(a: &DenseMatrix<C64>) -> Result<(f64, Vec<C64>)> {
    let n = a.cols;
    if a.rows < n {
        return Err(Error::Dimension("need rows >= cols".into()));
    }
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let qr = Qr::factor(a)?;
    // column-major copies of R and V
    let mut u: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| qr.r[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect()).collect();
    let dot = |x: &[C64], y: &[C64]| -> C64 { x.iter().zip(y).map(|(p, q)| p.conj() * q).sum() };
    let sq = |x: &[C64]| -> f64 { x.iter().map(|p| p.norm_sqr()).sum() };
    let mut converged = false;
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = sq(&u[p]);
                let beta = sq(&u[q]);
                let gamma = dot(&u[p], &u[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for cols in [&mut u, &mut v] {
                    for i in 0..n {
                        let xp = cols[p][i];
                        let xq = cols[q][i] * phase.conj();
                        cols[p][i] = xp * c - xq * sn;
                        cols[q][i] = xp * sn + xq * c;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    let norms: Vec<f64> = u.iter().map(|c| sq(c).sqrt()).collect();
    if norms.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let k = (0..n).fold(0, |b, i| if norms[i] < norms[b] { i } else { b });
    if !converged {
        return Err(Error::Convergence { best: norms[k] });
    }
    let dir = v.swap_remove(k);
    let nd = sq(&dir).sqrt();
    Ok((norms[k], dir.into_iter().map(|x| x / nd).collect()))
}

/// `P` points on a circle of radius `h` around a center, for spectrally
/// accurate derivatives of functions that are holomorphic,
/// antiholomorphic or harmonic near the center.
#[derive(Debug, Clone, Copy)]
pub struct CircleStencil {
    pub points: usize,
    pub radius: f64,
}

impl CircleStencil {
    pub fn new(points: usize, radius: f64) -> Self {
        CircleStencil { points, radius }
    }

    fn root(&self, k: usize) -> C64 {
        C64::from_polar(1.0, 2.0 * PI * k as f64 / self.points as f64)
    }

    pub fn nodes(&self, center: C64) -> Vec<C64> {
        (0..self.points).map(|k| center + self.root(k) * self.radius).collect()
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// n-th derivative in the holomorphic direction from values at
    /// [`nodes`](Self::nodes).
    pub fn d_holo(&self, values: &[C64], n: usize) -> C64 {
        self.coefficient(values, n, -1.0) * Self::factorial(n)
    }

    /// n-th derivative in the antiholomorphic direction.
    pub fn d_anti(&self, values: &[C64], n: usize) -> C64 {
        self.coefficient(values, n, 1.0) * Self::factorial(n)
    }

    fn coefficient(&self, values: &[C64], n: usize, sign: f64) -> C64 {
        assert_eq!(values.len(), self.points);
        let mut s = ZERO;
        for (k, v) in values.iter().enumerate() {
            let ang = sign * 2.0 * PI * (k * n % self.points) as f64 / self.points as f64;
            s += *v * C64::from_polar(1.0, ang);
        }
        s / (self.points as f64 * self.radius.powi(n as i32))
    }
}
