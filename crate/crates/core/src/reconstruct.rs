//! Finite-rank reconstruction of Szegő-type kernels from a proper map.
//!
//! With `f` a proper map of degree `N` onto the disc whose zero `a_i` has
//! multiplicity `M(i)`, the functions `h_{inp} = σ_n̄(·, a_i) f^p`
//! (`0 ≤ n < M(i)`, `p ≥ 0`) span the Hardy space, distinct `p` levels are
//! orthogonal, and every level has the same Gram matrix. Summing the
//! geometric series in `p` gives
//!
//! `σ(z, w) = (1 − f(z) conj f(w))^{-1} Σ c_{(in),(jm)} h_{in}(z) conj h_{jm}(w)`
//!
//! where `c` is the inverse of the conjugated level Gram matrix.

use crate::classical::{Classical, ProperMap};
use crate::hardy::{self, BoundaryFunction, HardyBasis};
use crate::numerics::{min_singular_direction, orthonormalize, DenseMatrix, Lu};
use crate::prelude::*;

/// Tolerance of the two-sided inverse check.
pub const INVERSE_TOL: f64 = 1e-8;

/// Whether all zeros are simple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientKind {
    Simple,
    General,
}

/// Coefficients of a reconstruction formula.
#[derive(Debug, Clone)]
pub struct ReconstructionCoefficients {
    pub kind: CoefficientKind,
    /// `(zero index i, derivative order n)` of each row and column of `c`.
    pub index: Vec<(usize, usize)>,
    /// Zero locations.
    pub zeros: Vec<C64>,
    pub c: DenseMatrix<C64>,
    /// The matrix that `c` inverts.
    pub source_matrix: DenseMatrix<C64>,
    /// `max(‖c·A − I‖, ‖A·c − I‖)`, entrywise maximum.
    pub inverse_residual: f64,
    /// `max |c − cᴴ|` relative to `max |c|`.
    pub hermitian_defect: f64,
}

fn inverse_checked(a: &DenseMatrix<C64>) -> Result<(DenseMatrix<C64>, f64)> {
    let lu = Lu::factor(a)?;
    let c = lu.inverse();
    let n = a.rows();
    let id = DenseMatrix::<C64>::identity(n);
    let mut res: f64 = 0.0;
    for prod in [c.matmul(a), a.matmul(&c)] {
        for i in 0..n {
            for j in 0..n {
                res = res.max((prod[(i, j)] - id[(i, j)]).norm());
            }
        }
    }
    if !(res <= INVERSE_TOL) {
        return Err(Error::Consistency { what: "two-sided inverse", residual: res });
    }
    Ok((c, res))
}

fn hermitian_defect(c: &DenseMatrix<C64>) -> f64 {
    let n = c.rows();
    let mut d: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            d = d.max((c[(i, j)] - c[(j, i)].conj()).norm());
        }
    }
    d / c.max_abs()
}

/// Evaluator for `(1 − f(z) conj f(w))^{-1} Σ c_{kl} h_k(z) conj h_l(w)`.
#[derive(Debug, Clone)]
pub struct KernelFormula {
    pub coefficients: ReconstructionCoefficients,
    f: BoundaryFunction,
    h: Vec<BoundaryFunction>,
}

impl KernelFormula {
    fn values(&self, z: C64) -> Result<(C64, Vec<C64>)> {
        let fz = self.f.eval_with_clearance(z, 1.0)?;
        let hz = self.h.iter().map(|h| h.eval_with_clearance(z, 1.0)).collect::<Result<Vec<_>>>()?;
        Ok((fz, hz))
    }

    /// Right-hand side of the formula at `(z, w)`.
    pub fn eval(&self, z: C64, w: C64) -> Result<C64> {
        let (fz, hz) = self.values(z)?;
        let (fw, hw) = self.values(w)?;
        let c = &self.coefficients.c;
        let mut s = ZERO;
        for (k, a) in hz.iter().enumerate() {
            for (l, b) in hw.iter().enumerate() {
                s += c[(k, l)] * a * b.conj();
            }
        }
        Ok(s / (ONE - fz * fw.conj()))
    }

    pub fn map(&self) -> &BoundaryFunction {
        &self.f
    }

    /// The functions `h_k = σ_n̄(·, a_i)` in coefficient order.
    pub fn functions(&self) -> &[BoundaryFunction] {
        &self.h
    }
}

fn simple_zeros(f: &ProperMap) -> Result<Vec<C64>> {
    if !f.has_simple_zeros() {
        return Err(Error::ZeroSimplicity);
    }
    Ok(f.zeros.iter().map(|z| z.location).collect())
}

/// Classical reconstruction of `S` from the Ahlfors map at `a`:
/// `c₀ = 1/S(a, a)` for the base point and the inverse of `[S(a_j, a_k)]`
/// for the zeros of `S(·, a)`.
pub fn classical_szego_formula(classical: &Classical, a: C64) -> Result<KernelFormula> {
    let ahl = classical.ahlfors(a)?;
    simple_zeros(&ahl.map)?;
    let others: Vec<C64> = classical.szego_zeros(a)?;
    let saa = ahl.szego.eval_with_clearance(a, 1.0)?;
    let s_others = others.iter().map(|p| classical.szego(*p)).collect::<Result<Vec<_>>>()?;
    let n1 = others.len();
    let dim = n1 + 1;
    let mut source = DenseMatrix::<C64>::zeros(dim, dim);
    let mut c = DenseMatrix::<C64>::zeros(dim, dim);
    source[(0, 0)] = saa;
    c[(0, 0)] = ONE / saa;
    let mut inv_res: f64 = (c[(0, 0)] * saa - ONE).norm();
    if n1 > 0 {
        // [S(a_j, a_k)], row j column k
        let mut m = DenseMatrix::zeros(n1, n1);
        for j in 0..n1 {
            for k in 0..n1 {
                m[(j, k)] = s_others[k].eval_with_clearance(others[j], 1.0)?;
            }
        }
        let (inv, res) = inverse_checked(&m)?;
        inv_res = inv_res.max(res);
        for j in 0..n1 {
            for k in 0..n1 {
                source[(j + 1, k + 1)] = m[(j, k)];
                c[(j + 1, k + 1)] = inv[(j, k)];
            }
        }
    }
    let mut zeros = vec![a];
    zeros.extend(others.iter().cloned());
    let mut h = vec![ahl.szego.clone()];
    h.extend(s_others);
    let hd = hermitian_defect(&c);
    Ok(KernelFormula {
        coefficients: ReconstructionCoefficients {
            kind: CoefficientKind::Simple,
            index: (0..dim).map(|i| (i, 0)).collect(),
            zeros,
            c,
            source_matrix: source,
            inverse_residual: inv_res,
            hermitian_defect: hd,
        },
        f: ahl.map.samples.clone(),
        h,
    })
}

/// `σ_n̄(·, a_i)` for every zero and `n < M(i)`, and the power bookkeeping.
#[derive(Debug, Clone)]
pub struct BasisFamily {
    pub basis: HardyBasis,
    pub map: ProperMap,
    pub index: Vec<(usize, usize)>,
    pub sigma_derivs: Vec<BoundaryFunction>,
    pub p_max: usize,
}

/// Assembles the family `h_{inp}` for a proper map under the weight of
/// `basis`.
pub fn build_basis_family(basis: &HardyBasis, map: &ProperMap, p_max: usize) -> Result<BasisFamily> {
    if map.degree() == 0 {
        return Err(Error::InvalidParameter("proper map has no zeros".into()));
    }
    let mut index = Vec::new();
    let mut sigma_derivs = Vec::new();
    for (i, z) in map.zeros.iter().enumerate() {
        for n in 0..z.multiplicity {
            index.push((i, n));
            sigma_derivs.push(hardy::sigma_dbar(basis, z.location, n)?);
        }
    }
    Ok(BasisFamily { basis: basis.clone(), map: map.clone(), index, sigma_derivs, p_max })
}

impl BasisFamily {
    /// Samples of `h_{inp}` for the `k`-th `(i, n)` pair.
    pub fn h(&self, k: usize, p: usize) -> Vec<C64> {
        self.sigma_derivs[k]
            .samples()
            .iter()
            .zip(self.map.samples.samples())
            .map(|(s, f)| s * f.powu(p as u32))
            .collect()
    }

    /// Level Gram matrix `B_{kl} = σ_{m n̄}(a_j, a_i)` for `k = (i, n)`,
    /// `l = (j, m)`, from Cauchy derivatives.
    pub fn level_gram(&self) -> Result<DenseMatrix<C64>> {
        let dim = self.index.len();
        let mut b = DenseMatrix::zeros(dim, dim);
        for (k, _) in self.index.iter().enumerate() {
            for (l, (j, m)) in self.index.iter().enumerate() {
                let aj = self.map.zeros[*j].location;
                b[(k, l)] = self.sigma_derivs[k].eval_derivative(aj, *m, 1.0)?;
            }
        }
        Ok(b)
    }

    /// Weighted inner product `⟨h_{kp}, h_{lq}⟩_φ` by boundary quadrature.
    pub fn inner(&self, k: usize, p: usize, l: usize, q: usize) -> C64 {
        self.basis.inner(&self.h(k, p), &self.h(l, q))
    }

    /// Orthogonality of levels: the largest off-level inner product
    /// (normalized by the norms) and the largest deviation of same-level
    /// entries from the derivative Gram matrix (relative to its size), for
    /// levels up to `p_max`.
    pub fn orthogonality(&self) -> Result<(f64, f64)> {
        let b = self.level_gram()?;
        let scale = b.max_abs();
        let dim = self.index.len();
        let levels = self.p_max + 1;
        let hs: Vec<Vec<Vec<C64>>> = (0..levels).map(|p| (0..dim).map(|k| self.h(k, p)).collect()).collect();
        let norms: Vec<Vec<f64>> = hs.iter().map(|lv| lv.iter().map(|h| self.basis.norm(h)).collect()).collect();
        let (mut off, mut block): (f64, f64) = (0.0, 0.0);
        for p in 0..levels {
            for q in 0..levels {
                for k in 0..dim {
                    for l in 0..dim {
                        let v = self.basis.inner(&hs[p][k], &hs[q][l]);
                        if p == q {
                            block = block.max((v - b[(k, l)]).norm() / scale);
                        } else {
                            off = off.max(v.norm() / (norms[p][k] * norms[q][l]));
                        }
                    }
                }
            }
        }
        Ok((off, block))
    }

    /// Smallest singular value of the level-0 Gram matrix.
    pub fn independence(&self) -> Result<f64> {
        let dim = self.index.len();
        let g = DenseMatrix::from_fn(dim, dim, |k, l| self.inner(k, 0, l, 0));
        Ok(min_singular_direction(&g)?.0)
    }
}

/// Simple zeros: `c` is the inverse of `[σ(a_k, a_j)]`.
pub fn weighted_szego_formula_simple(basis: &HardyBasis, map: &ProperMap) -> Result<KernelFormula> {
    let zeros = simple_zeros(map)?;
    let h = zeros.iter().map(|a| hardy::sigma(basis, *a)).collect::<Result<Vec<_>>>()?;
    let n = zeros.len();
    let mut a = DenseMatrix::zeros(n, n);
    for k in 0..n {
        for i in 0..n {
            a[(k, i)] = h[i].eval_with_clearance(zeros[k], 1.0)?;
        }
    }
    let (c, res) = inverse_checked(&a)?;
    let hd = hermitian_defect(&c);
    Ok(KernelFormula {
        coefficients: ReconstructionCoefficients {
            kind: CoefficientKind::Simple,
            index: (0..n).map(|i| (i, 0)).collect(),
            zeros,
            c,
            source_matrix: a,
            inverse_residual: res,
            hermitian_defect: hd,
        },
        f: map.samples.clone(),
        h,
    })
}

/// Zeros with multiplicities: solves the dense system for
/// `c_{(in),(jm)}` with `0 ≤ n < M(i)`, `0 ≤ m < M(j)`.
pub fn weighted_szego_formula_general(basis: &HardyBasis, map: &ProperMap) -> Result<KernelFormula> {
    let family = build_basis_family(basis, map, 0)?;
    let b = family.level_gram()?;
    let dim = b.rows();
    let m = DenseMatrix::from_fn(dim, dim, |k, l| b[(k, l)].conj());
    let (c, res) = inverse_checked(&m)?;
    let hd = hermitian_defect(&c);
    let kind = if map.zeros.iter().all(|z| z.multiplicity == 1) { CoefficientKind::Simple } else { CoefficientKind::General };
    Ok(KernelFormula {
        coefficients: ReconstructionCoefficients {
            kind,
            index: family.index.clone(),
            zeros: map.zeros.iter().map(|z| z.location).collect(),
            c,
            source_matrix: m,
            inverse_residual: res,
            hermitian_defect: hd,
        },
        f: map.samples.clone(),
        h: family.sigma_derivs,
    })
}

/// Evaluator for `λ(w, z) = f(w)/(f(w) − f(z)) Σ c_ij σ(z, a_i) λ(w, a_j)`.
#[derive(Debug, Clone)]
pub struct GarabedianFormula {
    f: BoundaryFunction,
    c: DenseMatrix<C64>,
    sigmas: Vec<BoundaryFunction>,
    lambdas: Vec<BoundaryFunction>,
    zeros: Vec<C64>,
}

/// The weighted Garabedian reconstruction for simple-zero coefficients.
pub fn weighted_garabedian_formula(basis: &HardyBasis, coeffs: &KernelFormula) -> Result<GarabedianFormula> {
    let rc = &coeffs.coefficients;
    if rc.index.iter().any(|(_, n)| *n != 0) {
        return Err(Error::InvalidParameter("the Garabedian formula needs simple zeros".into()));
    }
    let lambdas = rc.zeros.iter().map(|a| hardy::weighted_garabedian(basis, *a)).collect::<Result<Vec<_>>>()?;
    Ok(GarabedianFormula {
        f: coeffs.f.clone(),
        c: rc.c.clone(),
        sigmas: coeffs.h.clone(),
        lambdas,
        zeros: rc.zeros.clone(),
    })
}

/// Minimum distance kept from the zeros `a_j` when evaluating.
pub const REMOVABLE_RADIUS: f64 = 1e-3;

impl GarabedianFormula {
    /// `λ(w, z)`.
    pub fn eval(&self, w: C64, z: C64) -> Result<C64> {
        for a in &self.zeros {
            if (w - a).norm() < 0.5 * REMOVABLE_RADIUS {
                return Err(Error::Separation(alloc::format!("w is within {:e} of a zero of f", 0.5 * REMOVABLE_RADIUS)));
            }
        }
        let fw = self.f.eval_with_clearance(w, 1.0)?;
        let fz = self.f.eval_with_clearance(z, 1.0)?;
        let den = fw - fz;
        if den.norm() < 1e-10 {
            return Err(Error::Separation("f(w) = f(z)".into()));
        }
        let sz = self.sigmas.iter().map(|s| s.eval_with_clearance(z, 1.0)).collect::<Result<Vec<_>>>()?;
        let lw = self.lambdas.iter().map(|l| l.eval_with_clearance(w, 1.0)).collect::<Result<Vec<_>>>()?;
        let mut s = ZERO;
        for (i, a) in sz.iter().enumerate() {
            for (j, b) in lw.iter().enumerate() {
                s += self.c[(i, j)] * a * b;
            }
        }
        Ok(fw / den * s)
    }

    /// Largest modulus of `λ(w, z)` for `w` on a circle of radius
    /// [`REMOVABLE_RADIUS`] about each zero.
    pub fn removable_bound(&self, z: C64) -> Result<f64> {
        let mut m: f64 = 0.0;
        for a in &self.zeros {
            for k in 0..8 {
                let w = *a + C64::from_polar(REMOVABLE_RADIUS, 2.0 * PI * k as f64 / 8.0);
                m = m.max(self.eval(w, z)?.norm());
            }
        }
        Ok(m)
    }
}

/// Coefficient deviation between the Gram–Schmidt levels `p = 0` and
/// `p = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PIndependenceReport {
    /// `max |b⁽⁰⁾ − b⁽¹⁾| / max |b⁽⁰⁾|`.
    pub deviation: f64,
    /// The same with the level-1 inner product weighted by `3/2 + ½cos t`.
    pub control_deviation: f64,
}

/// Orthonormalizes `h_{in0}, …, h_{in1}` in one pass and compares the
/// change-of-basis coefficients of the two levels.
pub fn gram_schmidt_p_independence(family: &BasisFamily) -> Result<PIndependenceReport> {
    if family.p_max < 1 {
        return Err(Error::InvalidParameter("p_max must be at least 1".into()));
    }
    let dim = family.index.len();
    let mut span: Vec<Vec<C64>> = (0..dim).map(|k| family.h(k, 0)).collect();
    span.extend((0..dim).map(|k| family.h(k, 1)));
    let grid = family.basis.grid();
    let phi = family.basis.weight().samples();
    let ds = &grid.weights;
    let inner = |u: &[C64], v: &[C64]| -> C64 {
        let mut s = ZERO;
        for i in 0..u.len() {
            s += u[i] * v[i].conj() * (phi[i] * ds[i]);
        }
        s
    };
    let both = orthonormalize(&span, inner, 1e-12);
    if both.retained.len() != 2 * dim {
        return Err(Error::Consistency { what: "level basis lost vectors", residual: both.dropped.len() as f64 });
    }
    let level = |o: &crate::numerics::OrthoSet, off_in: usize, off_out: usize| -> Vec<C64> {
        let mut v = Vec::new();
        for k in 0..dim {
            for l in 0..dim {
                v.push(o.transform[off_in + k][off_out + l]);
            }
        }
        v
    };
    let b0 = level(&both, 0, 0);
    let b1 = level(&both, dim, dim);
    let scale = b0.iter().fold(0.0_f64, |m, x| m.max(x.norm()));
    let deviation = b0.iter().zip(&b1).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;

    let perturbed = |u: &[C64], v: &[C64]| -> C64 {
        let mut s = ZERO;
        for i in 0..u.len() {
            s += u[i] * v[i].conj() * (phi[i] * ds[i] * (1.5 + 0.5 * grid.t[i].cos()));
        }
        s
    };
    let lvl1: Vec<Vec<C64>> = (0..dim).map(|k| family.h(k, 1)).collect();
    let ctl = orthonormalize(&lvl1, perturbed, 1e-12);
    let bc = level(&ctl, 0, 0);
    let control_deviation = b0.iter().zip(&bc).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    Ok(PIndependenceReport { deviation, control_deviation })
}
