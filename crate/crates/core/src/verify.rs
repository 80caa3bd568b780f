//! Boundary identity residuals, class witnesses, the Poisson-weight
//! checks, non-constancy of kernel quotients, the algebraic dependence
//! detector, and the suites that bundle them into report rows.
//!
//! Every boundary identity compares the interior boundary traces (Cauchy
//! traces) of the functions involved, so an identity that holds between
//! raw samples by construction is still a genuine test of holomorphy.
//! Residuals are relative to the largest modulus of either side.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;

use crate::classical::{argument_degree, mobius_search, Classical, ProperMap};
use crate::geometry::{contains, BoundaryGrid, Domain};
use crate::hardy::{self, build_hardy_basis, BoundaryFunction, HardyBasis, SingularPart, Weight};
use crate::numerics::{least_squares, min_singular_direction, DenseMatrix};
use crate::potential::{green, harmonic_measure, poisson_weight, DirichletSolver, GreenFunction, KernelStencil};
use crate::prelude::*;
use crate::reconstruct::{
    build_basis_family, classical_szego_formula, gram_schmidt_p_independence, weighted_garabedian_formula,
    weighted_szego_formula_general, weighted_szego_formula_simple,
};

/// The boundary identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum IdentityId {
    I31,
    I33,
    I34,
    I35,
    I61,
    I62,
    I71,
    I72,
    I101,
    SigmaConst,
}

impl IdentityId {
    pub const ALL: [IdentityId; 10] = [
        IdentityId::I31,
        IdentityId::I33,
        IdentityId::I34,
        IdentityId::I35,
        IdentityId::I61,
        IdentityId::I62,
        IdentityId::I71,
        IdentityId::I72,
        IdentityId::I101,
        IdentityId::SigmaConst,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::I31 => "I31",
            IdentityId::I33 => "I33",
            IdentityId::I34 => "I34",
            IdentityId::I35 => "I35",
            IdentityId::I61 => "I61",
            IdentityId::I62 => "I62",
            IdentityId::I71 => "I71",
            IdentityId::I72 => "I72",
            IdentityId::I101 => "I101",
            IdentityId::SigmaConst => "SIGMA_CONST",
        }
    }

    pub fn parse(s: &str) -> Option<IdentityId> {
        IdentityId::ALL.iter().copied().find(|id| id.name().eq_ignore_ascii_case(s))
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            IdentityId::I31 | IdentityId::I71 | IdentityId::I72 | IdentityId::SigmaConst => 1e-7,
            IdentityId::I33 => 1e-4,
            _ => 1e-6,
        }
    }
}

/// Result of one boundary identity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    pub id: IdentityId,
    pub max_residual: f64,
    /// Boundary node where the residual peaks.
    pub node_of_max: C64,
    pub tolerance: f64,
    pub pass: bool,
    /// The residual with the right side negated.
    pub control_residual: f64,
}

impl IdentityReport {
    /// Combines reports of the same identity, keeping the worst residual
    /// and the weakest control.
    pub fn merge(self, other: IdentityReport) -> IdentityReport {
        let mut r = if other.max_residual > self.max_residual { other } else { self };
        r.control_residual = self.control_residual.min(other.control_residual);
        r.pass = self.pass && other.pass;
        r
    }
}

fn compare(id: IdentityId, nodes: &[C64], lhs: &[C64], rhs: &[C64], tolerance: f64) -> IdentityReport {
    let scale = hardy::max_abs(lhs).max(hardy::max_abs(rhs));
    let (mut worst, mut node, mut control): (f64, C64, f64) = (0.0, nodes[0], 0.0);
    if scale > 0.0 {
        for i in 0..lhs.len() {
            let r = (lhs[i] - rhs[i]).norm() / scale;
            if !(r <= worst) {
                worst = r;
                node = nodes[i];
            }
            control = control.max((lhs[i] + rhs[i]).norm() / scale);
        }
    }
    IdentityReport { id, max_residual: worst, node_of_max: node, tolerance, pass: worst <= tolerance, control_residual: control }
}

fn scaled(f: &BoundaryFunction, c: C64) -> Result<BoundaryFunction> {
    let parts = f
        .singular_parts()
        .iter()
        .map(|p| SingularPart { location: p.location, order: p.order, coefficient: p.coefficient * c })
        .collect();
    BoundaryFunction::new(f.grid().clone(), f.samples().iter().map(|v| v * c).collect())?.with_singular_parts(parts)
}

/// Product of two boundary functions whose declared poles are simple and
/// at distinct points.
fn product(f: &BoundaryFunction, g: &BoundaryFunction) -> Result<BoundaryFunction> {
    let mut parts = Vec::new();
    for (u, v) in [(f, g), (g, f)] {
        for p in u.singular_parts() {
            if p.order != 1 || v.singular_parts().iter().any(|q| q.location == p.location) {
                return Err(Error::InvalidParameter("product needs simple poles at distinct points".into()));
            }
            parts.push(SingularPart { location: p.location, order: 1, coefficient: p.coefficient * v.eval_with_clearance(p.location, 1.0)? });
        }
    }
    let samples = f.samples().iter().zip(g.samples()).map(|(a, b)| a * b).collect();
    BoundaryFunction::new(f.grid().clone(), samples)?.with_singular_parts(parts)
}

fn green_dz_function(gf: &GreenFunction) -> Result<BoundaryFunction> {
    BoundaryFunction::new(gf.harmonic_part().grid().clone(), gf.boundary_dz())?.with_singular_parts(vec![SingularPart {
        location: gf.w,
        order: 1,
        coefficient: real(-0.5),
    }])
}

/// `(1/i) L(z, a) T(z) = conj S(z, a)`.
pub fn identity_31(classical: &Classical, a: C64, tol: f64) -> Result<IdentityReport> {
    let g = classical.grid();
    let st = classical.szego(a)?.cauchy_trace();
    let lt = classical.garabedian(a)?.cauchy_trace();
    let lhs: Vec<C64> = (0..g.len()).map(|i| lt[i] * g.tangents[i] / I).collect();
    let rhs: Vec<C64> = st.iter().map(|s| s.conj()).collect();
    Ok(compare(IdentityId::I31, &g.nodes, &lhs, &rhs, tol))
}

/// `Λ(z, w) T(z) = −conj(K(z, w) T(z))` at the boundary nodes.
pub fn identity_33(stencil: &KernelStencil, grid: &BoundaryGrid, tol: f64) -> IdentityReport {
    let (k, l) = stencil.boundary();
    let lhs: Vec<C64> = (0..grid.len()).map(|i| l[i] * grid.tangents[i]).collect();
    let rhs: Vec<C64> = (0..grid.len()).map(|i| -(k[i] * grid.tangents[i]).conj()).collect();
    compare(IdentityId::I33, &grid.nodes, &lhs, &rhs, tol)
}

/// `G_z(z, w) T(z) = −conj(G_z(z, w) T(z))`.
pub fn identity_34(gf: &GreenFunction, tol: f64) -> Result<IdentityReport> {
    let gz = green_dz_function(gf)?;
    Ok(class_membership_witness(ClassKind::A, &gz, &scaled(&gz, -ONE)?, tol)?.relabel(IdentityId::I34))
}

/// `S(z, a₁) S(z, a₂) T(z) = −conj(L(z, a₁) L(z, a₂) T(z))`.
pub fn identity_35(classical: &Classical, a1: C64, a2: C64, tol: f64) -> Result<IdentityReport> {
    let ss = product(&classical.szego(a1)?, &classical.szego(a2)?)?;
    let ll = product(&classical.garabedian(a1)?, &classical.garabedian(a2)?)?;
    Ok(class_membership_witness(ClassKind::A, &ss, &scaled(&ll, -ONE)?, tol)?.relabel(IdentityId::I35))
}

/// `conj σ(z, a) = λ(z, a) T(z) / (i φ(z))`.
pub fn identity_71(basis: &HardyBasis, a: C64, tol: f64) -> Result<IdentityReport> {
    identity_72_order(basis, a, 0, tol).map(|r| r.relabel(IdentityId::I71))
}

fn identity_72_order(basis: &HardyBasis, a: C64, n: usize, tol: f64) -> Result<IdentityReport> {
    let g = basis.grid();
    let phi = basis.weight().samples();
    let st = hardy::sigma_dbar(basis, a, n)?.cauchy_trace();
    let lt = hardy::garabedian_da(basis, a, n)?.cauchy_trace();
    let lhs: Vec<C64> = st.iter().map(|s| s.conj()).collect();
    let rhs: Vec<C64> = (0..g.len()).map(|i| lt[i] * g.tangents[i] / (I * phi[i])).collect();
    Ok(compare(IdentityId::I72, &g.nodes, &lhs, &rhs, tol))
}

/// The `a`-derivatives of the `I71` identity for orders `1..=max_order`.
pub fn identity_72(basis: &HardyBasis, a: C64, max_order: usize, tol: f64) -> Result<IdentityReport> {
    let mut rep: Option<IdentityReport> = None;
    for n in 1..=max_order.max(1) {
        let r = identity_72_order(basis, a, n, tol)?;
        rep = Some(match rep {
            Some(p) => p.merge(r),
            None => r,
        });
    }
    Ok(rep.unwrap())
}

/// `λ(z, A₀) = −(1/π) G_z(z, A₀)` under the Poisson weight of `A₀`.
pub fn identity_101(poisson_basis: &HardyBasis, gf: &GreenFunction, tol: f64) -> Result<IdentityReport> {
    let g = poisson_basis.grid();
    let lt = hardy::weighted_garabedian(poisson_basis, gf.w)?.cauchy_trace();
    let gt = green_dz_function(gf)?.cauchy_trace();
    let rhs: Vec<C64> = gt.iter().map(|v| -v / PI).collect();
    Ok(compare(IdentityId::I101, &g.nodes, &lt, &rhs, tol))
}

/// `σ(z, A₀) ≡ 1` under the Poisson weight of `A₀`.
pub fn sigma_const(poisson_basis: &HardyBasis, a0: C64, tol: f64) -> Result<IdentityReport> {
    let g = poisson_basis.grid();
    let st = hardy::sigma(poisson_basis, a0)?.cauchy_trace();
    let ones = vec![ONE; g.len()];
    Ok(compare(IdentityId::SigmaConst, &g.nodes, &st, &ones, tol))
}

/// Boundary characterization of the two classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    /// `g T = conj(h T)`.
    A,
    /// `g = conj(h T)`.
    B,
}

impl IdentityReport {
    fn relabel(mut self, id: IdentityId) -> Self {
        self.id = id;
        self
    }
}

/// Residual of `g = conj(h T)` (class B) or `g T = conj(h T)` (class A).
pub fn class_membership_witness(kind: ClassKind, g: &BoundaryFunction, h: &BoundaryFunction, tol: f64) -> Result<IdentityReport> {
    if !Arc::ptr_eq(g.grid(), h.grid()) && g.grid().nodes != h.grid().nodes {
        return Err(Error::GridMismatch);
    }
    let grid = g.grid();
    let gt = g.cauchy_trace();
    let ht = h.cauchy_trace();
    let t = &grid.tangents;
    let (id, lhs): (IdentityId, Vec<C64>) = match kind {
        ClassKind::A => (IdentityId::I62, (0..grid.len()).map(|i| gt[i] * t[i]).collect()),
        ClassKind::B => (IdentityId::I61, gt.clone()),
    };
    let rhs: Vec<C64> = (0..grid.len()).map(|i| (ht[i] * t[i]).conj()).collect();
    Ok(compare(id, &grid.nodes, &lhs, &rhs, tol))
}

/// Boundary values of `S(·, a₁)/S(·, a₂)` against `conj(L(·, a₁)/L(·, a₂))`.
pub fn quotient_extension(classical: &Classical, a1: C64, a2: C64, tol: f64) -> Result<IdentityReport> {
    let g = classical.grid();
    let (s1, s2) = (classical.szego(a1)?.cauchy_trace(), classical.szego(a2)?.cauchy_trace());
    let (l1, l2) = (classical.garabedian(a1)?.cauchy_trace(), classical.garabedian(a2)?.cauchy_trace());
    let lhs: Vec<C64> = (0..g.len()).map(|i| s1[i] / s2[i]).collect();
    let rhs: Vec<C64> = (0..g.len()).map(|i| (l1[i] / l2[i]).conj()).collect();
    Ok(compare(IdentityId::I61, &g.nodes, &lhs, &rhs, tol))
}

/// Best constant fit of `σ(·, A₁)` by `c σ(·, A₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientReport {
    pub constant: C64,
    /// `‖σ(·, A₁) − c σ(·, A₀)‖_φ`.
    pub residual: f64,
    /// `‖σ(·, A₁)‖_φ`.
    pub norm: f64,
    pub nonconstant: bool,
}

/// Relative residual above which `σ(·, A₁)/σ(·, A₀)` counts as
/// non-constant.
pub const NONCONSTANT_THRESHOLD: f64 = 1e-4;

pub fn quotient_nonconstant(basis: &HardyBasis, a0: C64, a1: C64) -> Result<QuotientReport> {
    let s0 = hardy::sigma(basis, a0)?;
    let s1 = hardy::sigma(basis, a1)?;
    let (u, v) = (s1.samples(), s0.samples());
    let constant = basis.inner(u, v) / basis.inner(v, v);
    let diff: Vec<C64> = u.iter().zip(v).map(|(x, y)| x - constant * y).collect();
    let residual = basis.norm(&diff);
    let norm = basis.norm(u);
    Ok(QuotientReport { constant, residual, norm, nonconstant: residual > NONCONSTANT_THRESHOLD * norm })
}

/// Number of zeros of `λ(·, A₀)` in the domain, from the argument
/// principle applied to `2π (z − A₀) λ(z, A₀)`.
pub fn lambda_zero_count(basis: &HardyBasis, a0: C64) -> Result<f64> {
    let l = hardy::weighted_garabedian(basis, a0)?;
    let g = basis.grid();
    let samples = l.samples().iter().zip(&g.nodes).map(|(v, z)| v * (z - a0) * (2.0 * PI)).collect();
    argument_degree(&BoundaryFunction::new(g.clone(), samples)?)
}

/// `max |∫ φ u ds − u(A₀)|` for `u ∈ {1, Re z, Im z}`.
pub fn poisson_reproduction(grid: &BoundaryGrid, weight: &Weight, a0: C64) -> f64 {
    let phi = weight.samples();
    let tests: [(fn(C64) -> f64, f64); 3] = [(|_| 1.0, 1.0), (|z| z.re, a0.re), (|z| z.im, a0.im)];
    tests
        .iter()
        .map(|(u, target)| {
            let s: f64 = (0..grid.len()).map(|i| phi[i] * u(grid.nodes[i]) * grid.weights[i]).sum();
            (s - target).abs()
        })
        .fold(0.0, f64::max)
}

/// Verdict of the dependence detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Dependent,
    NoRelationFound,
    /// Small singular value that did not survive re-verification.
    Unverified,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Dependent => "dependent",
            Verdict::NoRelationFound => "no_relation_found",
            Verdict::Unverified => "unverified",
        }
    }
}

/// Detection threshold on the smallest singular value.
pub const DEPENDENCE_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct DependenceReport {
    pub degree: usize,
    pub sample_count: usize,
    pub min_singular: f64,
    /// Exponents `(i, j)` of the monomials `f'^i f^j`.
    pub monomials: Vec<(u32, u32)>,
    /// Coefficients of the monomials, largest normalized to one.
    pub relation: Vec<C64>,
    /// Relative residual of the relation on fresh samples.
    pub fresh_residual: f64,
    pub verdict: Verdict,
}

impl DependenceReport {
    /// Human-readable relation, dropping negligible terms.
    pub fn relation_string(&self) -> String {
        let mut out = String::new();
        for ((i, j), c) in self.monomials.iter().zip(&self.relation) {
            if c.norm() < 1e-6 {
                continue;
            }
            if !out.is_empty() {
                out.push_str(" + ");
            }
            out.push_str(&format!("({:.6}{:+.6}i)", c.re, c.im));
            if *i > 0 {
                out.push_str(&format!("*f'^{i}"));
            }
            if *j > 0 {
                out.push_str(&format!("*f^{j}"));
            }
        }
        out
    }
}

fn monomials(d: usize) -> Vec<(u32, u32)> {
    let mut m = Vec::new();
    for k in 0..=d as u32 {
        for i in 0..=k {
            m.push((i, k - i));
        }
    }
    m
}

fn monomial_matrix(f: &[C64], fp: &[C64], mons: &[(u32, u32)]) -> DenseMatrix<C64> {
    DenseMatrix::from_fn(f.len(), mons.len(), |s, k| fp[s].powu(mons[k].0) * f[s].powu(mons[k].1))
}

/// Looks for a polynomial `P` of total degree at most `d` with
/// `P(f', f) = 0` at the samples, and re-verifies any candidate on the
/// fresh samples.
pub fn algebraic_dependence_samples(f: &[C64], fp: &[C64], fresh_f: &[C64], fresh_fp: &[C64], d: usize) -> Result<DependenceReport> {
    let mons = monomials(d);
    if f.len() != fp.len() || fresh_f.len() != fresh_fp.len() {
        return Err(Error::Dimension("f and f' sample counts differ".into()));
    }
    if f.len() < 3 * mons.len() {
        return Err(Error::InvalidParameter(format!("need at least {} samples for degree {d}", 3 * mons.len())));
    }
    let excess = f.iter().chain(fresh_f).map(|v| v.norm() - 1.0).fold(f64::NEG_INFINITY, f64::max);
    if excess > 1e-6 {
        return Err(Error::IllScaled { excess });
    }
    let a = monomial_matrix(f, fp, &mons);
    let scales: Vec<f64> = (0..mons.len())
        .map(|k| crate::numerics::norm2(&a.column(k)).max(f64::MIN_POSITIVE))
        .collect();
    let a_scaled = DenseMatrix::from_fn(a.rows(), a.cols(), |s, k| a[(s, k)] / scales[k]);
    let (min_singular, v) = min_singular_direction(&a_scaled)?;
    let mut relation: Vec<C64> = v.iter().zip(&scales).map(|(x, s)| x / s).collect();
    let big = relation.iter().copied().fold(ZERO, |m, x| if x.norm() > m.norm() { x } else { m });
    for c in relation.iter_mut() {
        *c /= big;
    }
    let fresh = monomial_matrix(fresh_f, fresh_fp, &mons);
    let (mut num, mut den): (f64, f64) = (0.0, 0.0);
    for s in 0..fresh.rows() {
        let mut acc = ZERO;
        let mut mag = 0.0;
        for k in 0..mons.len() {
            let t = fresh[(s, k)] * relation[k];
            acc += t;
            mag += t.norm();
        }
        num = num.max(acc.norm());
        den = den.max(mag);
    }
    let fresh_residual = num / den;
    let verdict = if min_singular > DEPENDENCE_THRESHOLD {
        Verdict::NoRelationFound
    } else if fresh_residual <= 10.0 * DEPENDENCE_THRESHOLD {
        Verdict::Dependent
    } else {
        Verdict::Unverified
    };
    Ok(DependenceReport { degree: d, sample_count: f.len(), min_singular, monomials: mons, relation, fresh_residual, verdict })
}

/// Number of fresh samples used for re-verification.
pub const FRESH_SAMPLES: usize = 50;

/// [`algebraic_dependence_samples`] with `f` and `f'` evaluated by Cauchy
/// integrals at automatically chosen interior points.
pub fn algebraic_dependence(f: &BoundaryFunction, d: usize) -> Result<DependenceReport> {
    let rows = (3 * monomials(d).len()).max(60);
    let pts = interior_points(f.grid().domain(), rows + FRESH_SAMPLES, SPREAD_FRACTION)?;
    let fv = pts.iter().map(|z| f.eval(*z)).collect::<Result<Vec<_>>>()?;
    let fpv = pts.iter().map(|z| f.eval_derivative(*z, 1, hardy::EVAL_CLEARANCE)).collect::<Result<Vec<_>>>()?;
    // alternate points between the fit and the re-verification sets
    let (mut a, mut b, mut c, mut e) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for k in 0..pts.len() {
        if k % 2 == 1 && c.len() < FRESH_SAMPLES {
            c.push(fv[k]);
            e.push(fpv[k]);
        } else {
            a.push(fv[k]);
            b.push(fpv[k]);
        }
    }
    algebraic_dependence_samples(&a, &b, &c, &e, d)
}

/// Clearance fraction of [`Workspace::points`].
pub const INNER_FRACTION: f64 = 0.7;
/// Clearance fraction of [`Workspace::spread`].
pub const SPREAD_FRACTION: f64 = 0.4;

/// Deterministic, well-spread interior points: farthest-point selection
/// from a 41×41 lattice over the bounding box, restricted to points with
/// at least `fraction` of the largest clearance, starting at the point of
/// largest clearance.
pub fn interior_points(domain: &Domain, count: usize, fraction: f64) -> Result<Vec<C64>> {
    let (x0, x1, y0, y1) = domain.bounding_box();
    let n = 41;
    let mut cand: Vec<(C64, f64)> = Vec::new();
    for iy in 0..n {
        for ix in 0..n {
            let p = C64::new(x0 + (x1 - x0) * ix as f64 / (n - 1) as f64, y0 + (y1 - y0) * iy as f64 / (n - 1) as f64);
            let d = domain.distance_to_boundary(p);
            if d > 1e-3 * domain.diameter() && contains(domain, p)? {
                cand.push((p, d));
            }
        }
    }
    let best = cand.iter().map(|c| c.1).fold(0.0, f64::max);
    cand.retain(|c| c.1 >= fraction * best);
    if cand.len() < count {
        return Err(Error::InvalidParameter(format!("domain admits only {} well-separated interior points", cand.len())));
    }
    let first = (0..cand.len()).fold(0, |b, i| if cand[i].1 > cand[b].1 { i } else { b });
    let mut chosen = vec![cand[first].0];
    let mut dist: Vec<f64> = cand.iter().map(|c| (c.0 - cand[first].0).norm()).collect();
    while chosen.len() < count {
        let k = (0..cand.len()).fold(0, |b, i| if dist[i] > dist[b] { i } else { b });
        let p = cand[k].0;
        chosen.push(p);
        for (i, c) in cand.iter().enumerate() {
            dist[i] = dist[i].min((c.0 - p).norm());
        }
    }
    Ok(chosen)
}

/// Least-squares fit of `K(z, w) − 4π S(z, w)² = Σ A_ij F_i'(z) conj F_j'(w)`
/// over all pairs of `zs × ws`, using the hole curves' `F'`.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub coefficients: DenseMatrix<C64>,
    /// `‖residual‖₂ / ‖K‖₂` over the pairs.
    pub relative_residual: f64,
    /// `max |A − Aᴴ| / max |A|` (zero when there are no terms).
    pub hermitian_defect: f64,
}

pub fn bergman_decomposition(classical: &Classical, solver: &DirichletSolver, zs: &[C64], ws: &[C64]) -> Result<DecompositionReport> {
    let g = classical.grid();
    let holes = g.curves() - 1;
    let fprimes = (2..=g.curves()).map(|j| harmonic_measure(solver, j)).collect::<Result<Vec<_>>>()?;
    let fp = |z: C64| -> Result<Vec<C64>> { fprimes.iter().map(|h| Ok(h.solution.dz(z)? * 0.5)).collect() };
    let nunk = holes * holes;
    let mut rows: Vec<Vec<C64>> = Vec::new();
    let mut rhs = Vec::new();
    let mut kvals = Vec::new();
    for w in ws {
        let st = KernelStencil::new(solver, *w)?;
        let sw = classical.szego(*w)?;
        let fw = fp(*w)?;
        for z in zs {
            let k = st.bergman(*z)?;
            let s = sw.eval_with_clearance(*z, 1.0)?;
            let fz = fp(*z)?;
            let mut row = Vec::with_capacity(nunk);
            for fi in &fz {
                for fj in &fw {
                    row.push(fi * fj.conj());
                }
            }
            rows.push(row);
            rhs.push(k - s * s * (4.0 * PI));
            kvals.push(k);
        }
    }
    let knorm = crate::numerics::norm2(&kvals);
    if nunk == 0 {
        return Ok(DecompositionReport {
            coefficients: DenseMatrix::zeros(0, 0),
            relative_residual: crate::numerics::norm2(&rhs) / knorm,
            hermitian_defect: 0.0,
        });
    }
    let a = DenseMatrix::from_fn(rows.len(), nunk, |r, c| rows[r][c]);
    let x = least_squares(&a, &rhs)?;
    let fit = a.mul_vec(&x);
    let resid: Vec<C64> = rhs.iter().zip(&fit).map(|(b, f)| b - f).collect();
    let coefficients = DenseMatrix::from_fn(holes, holes, |i, j| x[i * holes + j]);
    let mut herm: f64 = 0.0;
    for i in 0..holes {
        for j in 0..holes {
            herm = herm.max((coefficients[(i, j)] - coefficients[(j, i)].conj()).norm());
        }
    }
    let herm = herm / coefficients.max_abs();
    Ok(DecompositionReport { coefficients, relative_residual: crate::numerics::norm2(&resid) / knorm, hermitian_defect: herm })
}

/// Relative residual of the fit
/// `G_z(z, w) + π σ(z, w) λ(z, w)/σ(w, w) = Σ c_j F_j'(z)` at fixed `w`.
pub fn green_sigma_lambda_fit(basis: &HardyBasis, solver: &DirichletSolver, w: C64, zs: &[C64]) -> Result<(Vec<C64>, f64)> {
    let g = basis.grid();
    let gf = green(solver, w)?;
    let s = hardy::sigma(basis, w)?;
    let l = hardy::weighted_garabedian(basis, w)?;
    let sww = s.eval_with_clearance(w, 1.0)?;
    let fprimes = (2..=g.curves()).map(|j| harmonic_measure(solver, j)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut gz_all = Vec::new();
    for z in zs {
        let gz = gf.dz(*z)?;
        let v = gz + s.eval_with_clearance(*z, 1.0)? * l.eval_with_clearance(*z, 1.0)? * PI / sww;
        rows.push(fprimes.iter().map(|h| Ok(h.solution.dz(*z)? * 0.5)).collect::<Result<Vec<_>>>()?);
        rhs.push(v);
        gz_all.push(gz);
    }
    let gnorm = crate::numerics::norm2(&gz_all);
    if fprimes.is_empty() {
        return Ok((Vec::new(), crate::numerics::norm2(&rhs) / gnorm));
    }
    let a = DenseMatrix::from_fn(rows.len(), fprimes.len(), |r, c| rows[r][c]);
    let c = least_squares(&a, &rhs)?;
    let fit = a.mul_vec(&c);
    let resid: Vec<C64> = rhs.iter().zip(&fit).map(|(b, f)| b - f).collect();
    Ok((c, crate::numerics::norm2(&resid) / gnorm))
}

/// Relative interior error of a two-point evaluator against a reference.
fn max_relative(pairs: &[(C64, C64)], mut lhs: impl FnMut(C64, C64) -> Result<C64>, mut rhs: impl FnMut(C64, C64) -> Result<C64>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (z, w) in pairs {
        let a = lhs(*z, *w)?;
        let b = rhs(*z, *w)?;
        let r = (a - b).norm() / b.norm();
        if !(r <= worst) {
            worst = r;
        }
    }
    Ok(worst)
}

/// How a suite row compares its value with the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Pass when `value ≤ tolerance`.
    Upper,
    /// Pass when `value ≥ tolerance`.
    Lower,
    /// Informational; pass is decided by the check itself.
    Info,
}

impl Bound {
    pub fn symbol(self) -> &'static str {
        match self {
            Bound::Upper => "<=",
            Bound::Lower => ">=",
            Bound::Info => "info",
        }
    }
}

/// One line of a suite report.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub check: String,
    pub domain: String,
    pub weight: String,
    pub value: f64,
    pub bound: Bound,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

/// Tolerance overrides keyed by check name (case-insensitive).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tolerances {
    overrides: BTreeMap<String, f64>,
}

impl Tolerances {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, check: &str, value: f64) {
        self.overrides.insert(check.to_ascii_uppercase(), value);
    }

    pub fn get(&self, check: &str, default: f64) -> f64 {
        self.overrides.get(&check.to_ascii_uppercase()).copied().unwrap_or(default)
    }
}

/// Shared inputs of the suites on one domain.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub label: String,
    pub grid: Arc<BoundaryGrid>,
    pub classical: Classical,
    pub solver: DirichletSolver,
    pub weighted: HardyBasis,
    pub base_point: C64,
    /// Twelve well-spread interior points with at least
    /// [`INNER_FRACTION`] of the largest clearance; the first has the
    /// largest clearance. Used wherever a Garabedian kernel has its pole.
    pub points: Vec<C64>,
    /// Twelve points with at least [`SPREAD_FRACTION`] of the largest
    /// clearance, used as evaluation points.
    pub spread: Vec<C64>,
}

impl Workspace {
    /// `weight` defaults to `φ ≡ 1`; `base_point` to the interior point of
    /// largest clearance.
    pub fn new(label: &str, grid: Arc<BoundaryGrid>, weight: Option<Weight>, order: usize, base_point: Option<C64>) -> Result<Self> {
        let classical = Classical::new(&grid, order)?;
        let weighted = match weight {
            Some(w) => build_hardy_basis(&grid, &w, order)?,
            None => classical.basis().clone(),
        };
        let solver = DirichletSolver::new(&grid)?;
        let points = interior_points(grid.domain(), 12, INNER_FRACTION)?;
        let spread = interior_points(grid.domain(), 12, SPREAD_FRACTION)?;
        let base_point = match base_point {
            Some(a) => {
                if !contains(grid.domain(), a)? {
                    return Err(Error::PointNotInterior(a));
                }
                a
            }
            None => points[0],
        };
        Ok(Workspace { label: label.into(), grid, classical, solver, weighted, base_point, points, spread })
    }

    pub fn weight_tag(&self) -> String {
        self.weighted.weight().tag().to_string()
    }

    /// Points other than the base point, farthest first.
    fn others(&self) -> Vec<C64> {
        let tol = 0.05 * self.grid.domain().diameter();
        self.points.iter().copied().filter(|p| (p - self.base_point).norm() > tol).collect()
    }

    /// `count` pairs `(z, w)` from two disjoint halves of the point set.
    fn pairs(&self, count: usize) -> Vec<(C64, C64)> {
        let zs: Vec<C64> = self.spread.iter().step_by(2).copied().collect();
        let ws: Vec<C64> = self.spread.iter().skip(1).step_by(2).copied().collect();
        let mut out = Vec::new();
        for z in &zs {
            for w in &ws {
                out.push((*z, *w));
            }
        }
        out.truncate(count);
        out
    }

    fn row(&self, tols: &Tolerances, check: &str, value: f64, default: f64, bound: Bound, note: String) -> SuiteRow {
        let tolerance = tols.get(check, default);
        let pass = match bound {
            Bound::Upper => value <= tolerance,
            Bound::Lower => value >= tolerance,
            Bound::Info => true,
        };
        SuiteRow {
            check: check.into(),
            domain: self.label.clone(),
            weight: self.weight_tag(),
            value,
            bound,
            tolerance,
            pass,
            note,
        }
    }

    fn identity_row(&self, tols: &Tolerances, check: &str, rep: &IdentityReport) -> SuiteRow {
        let z = rep.node_of_max;
        self.row(tols, check, rep.max_residual, rep.tolerance, Bound::Upper, format!("worst node {}{:+}i", z.re, z.im))
    }
}

/// Runs one identity on the workspace inputs (the base point and the
/// second interior point; Poisson weight of the base point for `I101` and
/// `SIGMA_CONST`).
pub fn check_identity(id: IdentityId, ws: &Workspace, tol: f64) -> Result<IdentityReport> {
    let a = ws.base_point;
    let a2 = ws.others()[0];
    match id {
        IdentityId::I31 => identity_31(&ws.classical, a, tol),
        IdentityId::I33 => Ok(identity_33(&KernelStencil::new(&ws.solver, a)?, &ws.grid, tol)),
        IdentityId::I34 => identity_34(&green(&ws.solver, a)?, tol),
        IdentityId::I35 => identity_35(&ws.classical, a, a2, tol),
        IdentityId::I61 => {
            let s = ws.classical.szego(a)?;
            let h = scaled(&ws.classical.garabedian(a)?, -I)?;
            class_membership_witness(ClassKind::B, &s, &h, tol)
        }
        IdentityId::I62 => {
            let mut rep: Option<IdentityReport> = None;
            let mut add = |r: IdentityReport| {
                rep = Some(match rep {
                    Some(p) => p.merge(r),
                    None => r,
                })
            };
            if ws.grid.curves() > 1 {
                for j in 1..=ws.grid.curves() {
                    let fp = harmonic_measure(&ws.solver, j)?.f_prime;
                    add(class_membership_witness(ClassKind::A, &fp, &scaled(&fp, -ONE)?, tol)?);
                }
            }
            let gz = green_dz_function(&green(&ws.solver, a)?)?;
            add(class_membership_witness(ClassKind::A, &gz, &scaled(&gz, -ONE)?, tol)?);
            let ss = product(&ws.classical.szego(a)?, &ws.classical.szego(a2)?)?;
            let ll = product(&ws.classical.garabedian(a)?, &ws.classical.garabedian(a2)?)?;
            add(class_membership_witness(ClassKind::A, &ss, &scaled(&ll, -ONE)?, tol)?);
            Ok(rep.unwrap().relabel(IdentityId::I62))
        }
        IdentityId::I71 => identity_71(&ws.weighted, a, tol),
        IdentityId::I72 => identity_72(&ws.weighted, a, 2, tol),
        IdentityId::I101 | IdentityId::SigmaConst => {
            let pb = poisson_basis(ws, a)?;
            if id == IdentityId::I101 {
                identity_101(&pb, &green(&ws.solver, a)?, tol)
            } else {
                sigma_const(&pb, a, tol)
            }
        }
    }
}

fn poisson_basis(ws: &Workspace, a0: C64) -> Result<HardyBasis> {
    let w = poisson_weight(&ws.solver, a0)?;
    build_hardy_basis(&ws.grid, &w, ws.classical.basis().order())
}

/// Boundary identities, class witnesses, the quotient corollary, the
/// Bergman decomposition, the Green's-function expression and a combined
/// negative control.
pub fn identity_suite(ws: &Workspace, tols: &Tolerances) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    let mut control = f64::INFINITY;
    for id in [
        IdentityId::I31,
        IdentityId::I33,
        IdentityId::I34,
        IdentityId::I35,
        IdentityId::I61,
        IdentityId::I62,
        IdentityId::I71,
        IdentityId::I72,
    ] {
        let tol = tols.get(id.name(), id.default_tolerance());
        let rep = check_identity(id, ws, tol)?;
        control = control.min(rep.control_residual / tol);
        rows.push(ws.identity_row(tols, id.name(), &rep));
    }
    let q = quotient_extension(&ws.classical, ws.base_point, ws.others()[0], tols.get("I61_QUOTIENT", 1e-6))?;
    control = control.min(q.control_residual / q.tolerance);
    rows.push(ws.identity_row(tols, "I61_QUOTIENT", &q));
    rows.push(ws.row(tols, "NEGATIVE_CONTROL", control, 1e3, Bound::Lower, "min control residual / tolerance".into()));

    let zs: Vec<C64> = ws.spread.iter().step_by(2).copied().collect();
    let wsp: Vec<C64> = ws.spread.iter().skip(1).step_by(2).copied().collect();
    let dec = bergman_decomposition(&ws.classical, &ws.solver, &zs, &wsp)?;
    let (kdefault, note) = if ws.grid.curves() == 1 { (1e-5, "no F terms") } else { (1e-3, "fitted A_ij") };
    rows.push(ws.row(tols, "K_DECOMPOSITION", dec.relative_residual, kdefault, Bound::Upper, note.into()));
    rows.push(ws.row(tols, "K_DECOMPOSITION_HERMITIAN", dec.hermitian_defect, 1e-3, Bound::Upper, String::new()));
    let far = 0.05 * ws.grid.domain().diameter();
    let zs: Vec<C64> = ws.spread.iter().copied().filter(|p| (p - ws.base_point).norm() > far).collect();
    let (_, gres) = green_sigma_lambda_fit(&ws.weighted, &ws.solver, ws.base_point, &zs)?;
    rows.push(ws.row(tols, "GREEN_SIGMA_LAMBDA", gres, 1e-3, Bound::Upper, "fitted c_j".into()));
    Ok(rows)
}

/// Proper map used by the weighted reconstruction: the Ahlfors map of the
/// base point, Möbius-adjusted until its zeros are simple and the weighted
/// Garabedian kernel at every zero passes its membership check.
fn reconstruction_map(ws: &Workspace) -> Result<ProperMap> {
    let m = ws.classical.ahlfors(ws.base_point)?.map;
    let ok = |f: &ProperMap| f.zeros.iter().all(|z| hardy::weighted_garabedian(&ws.weighted, z.location).is_ok());
    Ok(mobius_search(&m, ok)?.0)
}

/// The finite-rank reconstruction formulas against direct computation.
pub fn reconstruction_suite(ws: &Workspace, tols: &Tolerances) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    let pairs = ws.pairs(25);
    let a = ws.base_point;

    let f63 = classical_szego_formula(&ws.classical, a)?;
    let direct: Vec<BoundaryFunction> = ws.spread.iter().map(|w| ws.classical.szego(*w)).collect::<Result<_>>()?;
    let lookup = |w: C64| direct.iter().zip(&ws.spread).find(|(_, p)| **p == w).map(|(f, _)| f).ok_or(Error::MissingInput("kernel column".into()));
    let e63 = max_relative(&pairs, |z, w| f63.eval(z, w), |z, w| lookup(w)?.eval_with_clearance(z, 1.0))?;
    rows.push(ws.row(tols, "SZEGO_RECON", e63, 1e-6, Bound::Upper, format!("a = {}{:+}i", a.re, a.im)));
    rows.push(ws.row(tols, "SZEGO_RECON_INVERSE", f63.coefficients.inverse_residual, 1e-8, Bound::Upper, String::new()));

    let map = reconstruction_map(ws)?;
    let basis = &ws.weighted;
    let family = build_basis_family(basis, &map, 3)?;
    let (off, block) = family.orthogonality()?;
    rows.push(ws.row(tols, "LEVEL_ORTHOGONALITY", off, 1e-8, Bound::Upper, "p, q <= 3".into()));
    rows.push(ws.row(tols, "LEVEL_GRAM", block, 1e-6, Bound::Upper, String::new()));
    rows.push(ws.row(tols, "LEVEL_INDEPENDENCE", family.independence()?, 1e-10, Bound::Lower, "min singular value".into()));
    rows.push(ws.row(tols, "DENSITY", density_spot_check(&family, ws.others()[1])?, 1e-8, Bound::Upper, "m = 2".into()));

    let sdirect: Vec<BoundaryFunction> = ws.spread.iter().map(|w| hardy::sigma(basis, *w)).collect::<Result<_>>()?;
    let slookup = |w: C64| sdirect.iter().zip(&ws.spread).find(|(_, p)| **p == w).map(|(f, _)| f).ok_or(Error::MissingInput("kernel column".into()));
    let simple = weighted_szego_formula_simple(basis, &map)?;
    let e83 = max_relative(&pairs, |z, w| simple.eval(z, w), |z, w| slookup(w)?.eval_with_clearance(z, 1.0))?;
    rows.push(ws.row(tols, "SIGMA_RECON", e83, 1e-6, Bound::Upper, String::new()));
    rows.push(ws.row(tols, "SIGMA_RECON_INVERSE", simple.coefficients.inverse_residual, 1e-8, Bound::Upper, String::new()));

    let general = weighted_szego_formula_general(basis, &map)?;
    let (cs, cg) = (&simple.coefficients.c, &general.coefficients.c);
    let mut agree: f64 = 0.0;
    for i in 0..cs.rows() {
        for j in 0..cs.cols() {
            agree = agree.max((cs[(i, j)] - cg[(i, j)]).norm());
        }
    }
    rows.push(ws.row(tols, "SIGMA_RECON_GENERAL_AGREEMENT", agree / cs.max_abs(), 1e-8, Bound::Upper, String::new()));
    let squared = ProperMap::new(BoundaryFunction::new(ws.grid.clone(), map.samples.samples().iter().map(|v| v * v).collect())?)?;
    let double = weighted_szego_formula_general(basis, &squared)?;
    let e82 = max_relative(&pairs, |z, w| double.eval(z, w), |z, w| slookup(w)?.eval_with_clearance(z, 1.0))?;
    rows.push(ws.row(tols, "SIGMA_RECON_DOUBLE_ZEROS", e82, 1e-6, Bound::Upper, "f squared".into()));
    rows.push(ws.row(tols, "SIGMA_RECON_HERMITIAN", double.coefficients.hermitian_defect, 1e-7, Bound::Upper, String::new()));
    rows.push(ws.row(tols, "SIGMA_RECON_GENERAL_INVERSE", double.coefficients.inverse_residual, 1e-8, Bound::Upper, String::new()));

    let gar = weighted_garabedian_formula(basis, &simple)?;
    let gpairs = garabedian_pairs(ws, &map, 20)?;
    let ldirect: Vec<BoundaryFunction> = ws.points.iter().map(|z| hardy::weighted_garabedian(basis, *z)).collect::<Result<_>>()?;
    let llookup = |z: C64| ldirect.iter().zip(&ws.points).find(|(_, p)| **p == z).map(|(f, _)| f).ok_or(Error::MissingInput("kernel column".into()));
    let e84 = max_relative(&gpairs, |w, z| gar.eval(w, z), |w, z| llookup(z)?.eval_with_clearance(w, 1.0))?;
    rows.push(ws.row(tols, "LAMBDA_RECON", e84, 1e-5, Bound::Upper, format!("{} pairs", gpairs.len())));
    let z0 = gpairs[0].1;
    let typical = gpairs.iter().filter(|p| p.1 == z0).map(|(w, z)| gar.eval(*w, *z).map(|v| v.norm())).collect::<Result<Vec<_>>>()?;
    let typical = typical.iter().copied().fold(0.0, f64::max);
    let bound = gar.removable_bound(z0)? / typical;
    rows.push(ws.row(tols, "LAMBDA_RECON_REMOVABLE", bound, 1e3, Bound::Upper, "max |lambda| at distance 1e-3 from zeros / typical".into()));

    let pi = gram_schmidt_p_independence(&family)?;
    rows.push(ws.row(tols, "GS_P_INDEPENDENCE", pi.deviation, 1e-7, Bound::Upper, String::new()));
    rows.push(ws.row(tols, "GS_CONTROL", pi.control_deviation, 1e-2, Bound::Lower, "perturbed level-1 weight".into()));
    Ok(rows)
}

/// Pairs `(w, z)` of spread and inner workspace points with `f(w)` and `f(z)` well apart
/// and `w` away from the zeros of `f`.
fn garabedian_pairs(ws: &Workspace, map: &ProperMap, count: usize) -> Result<Vec<(C64, C64)>> {
    let mut out = Vec::new();
    let sep = 0.05;
    let fz = ws.points.iter().map(|p| map.eval(*p)).collect::<Result<Vec<_>>>()?;
    let fw = ws.spread.iter().map(|p| map.eval(*p)).collect::<Result<Vec<_>>>()?;
    for (j, z) in ws.points.iter().enumerate() {
        for (i, w) in ws.spread.iter().enumerate() {
            if (w - z).norm() < sep || (fw[i] - fz[j]).norm() < sep || map.zeros.iter().any(|a| (a.location - w).norm() < sep) {
                continue;
            }
            if out.len() < count {
                out.push((*w, *z));
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Separation("no admissible evaluation pairs".into()));
    }
    Ok(out)
}

/// `max |⟨g, h_{kp}⟩_φ| / (‖g‖ ‖h_{kp}‖)` over `p < 2` for
/// `g = f² σ(·, b)`, which vanishes to twice the order of `f` at every
/// zero.
pub fn density_spot_check(family: &crate::reconstruct::BasisFamily, b: C64) -> Result<f64> {
    let m = 2;
    let basis = &family.basis;
    let u = hardy::sigma(basis, b)?;
    let g: Vec<C64> = u.samples().iter().zip(family.map.samples.samples()).map(|(s, f)| s * f.powu(m)).collect();
    let gn = basis.norm(&g);
    let mut worst: f64 = 0.0;
    for p in 0..m as usize {
        for k in 0..family.index.len() {
            let h = family.h(k, p);
            worst = worst.max(basis.inner(&g, &h).norm() / (gn * basis.norm(&h)));
        }
    }
    Ok(worst)
}

/// Poisson weight of the base point and the checks built on it.
pub fn poisson_suite(ws: &Workspace, tols: &Tolerances, a1: Option<C64>) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    let a0 = ws.base_point;
    let w = poisson_weight(&ws.solver, a0)?;
    let minw = w.samples().iter().copied().fold(f64::INFINITY, f64::min);
    let tag = format!("poisson({}{:+}i)", a0.re, a0.im);
    let mut push = |mut r: SuiteRow| {
        r.weight = tag.clone();
        rows.push(r);
    };
    push(ws.row(tols, "POISSON_POSITIVE", minw, f64::MIN_POSITIVE, Bound::Lower, "min weight".into()));
    push(ws.row(tols, "POISSON_REPRODUCTION", poisson_reproduction(&ws.grid, &w, a0), 1e-7, Bound::Upper, "u = 1, Re z, Im z".into()));
    let pb = build_hardy_basis(&ws.grid, &w, ws.classical.basis().order())?;
    let sc = sigma_const(&pb, a0, tols.get("SIGMA_CONST", 1e-6))?;
    push(ws.identity_row(tols, "SIGMA_CONST", &sc));
    let i71 = identity_71(&pb, a0, tols.get("I71", 1e-7))?;
    push(ws.identity_row(tols, "I71", &i71));
    let i101 = identity_101(&pb, &green(&ws.solver, a0)?, tols.get("I101", 1e-6))?;
    push(ws.identity_row(tols, "I101", &i101));
    let n = ws.grid.curves();
    let count = lambda_zero_count(&pb, a0)?;
    push(ws.row(tols, "LAMBDA_ZERO_COUNT", (count - (n as f64 - 1.0)).abs(), 1e-3, Bound::Upper, format!("count {count:.6}, expected {}", n - 1)));
    let a1 = match a1 {
        Some(p) => p,
        None => {
            let step = 0.05 * ws.grid.domain().diameter() / 2.0;
            let mut p = a0 + step;
            if !contains(ws.grid.domain(), p)? || ws.grid.domain().distance_to_boundary(p) < 0.5 * ws.grid.domain().distance_to_boundary(a0) {
                p = a0 - step;
            }
            p
        }
    };
    let q = quotient_nonconstant(&pb, a0, a1)?;
    push(ws.row(tols, "QUOTIENT_NONCONSTANT", q.residual / q.norm, NONCONSTANT_THRESHOLD, Bound::Lower, format!("A1 = {}{:+}i", a1.re, a1.im)));
    let qd = quotient_nonconstant(&pb, a0, a0)?;
    push(ws.row(tols, "QUOTIENT_DEGENERATE", qd.residual / qd.norm, 1e-10, Bound::Upper, "A1 = A0".into()));
    Ok(rows)
}

/// Bounded-degree search for a polynomial relation between the Ahlfors map
/// of the base point and its derivative, stopping at the first certified
/// relation.
pub fn dependence_suite(ws: &Workspace, tols: &Tolerances, max_degree: usize) -> Result<Vec<SuiteRow>> {
    let f = ws.classical.ahlfors(ws.base_point)?.map.samples;
    let mut rows = Vec::new();
    for d in 1..=max_degree {
        let rep = algebraic_dependence(&f, d)?;
        let name = format!("DEPENDENCE_D{d}");
        let note = match rep.verdict {
            Verdict::Dependent => format!("dependent; fresh residual {:e}; relation {}", rep.fresh_residual, rep.relation_string()),
            v => v.name().to_string(),
        };
        let mut r = ws.row(tols, &name, rep.min_singular, DEPENDENCE_THRESHOLD, Bound::Info, note);
        r.pass = rep.verdict != Verdict::Unverified;
        rows.push(r);
        if rep.verdict == Verdict::Dependent {
            break;
        }
    }
    Ok(rows)
}
