//! Weighted boundary inner products, the Hardy projection `P_φ`, the
//! weighted Szegő kernel `σ = P_φ C_a`, the weighted Garabedian kernel and
//! interior evaluation of boundary functions by Cauchy integrals.

use core::fmt;

use crate::geometry::{contains, BoundaryGrid};
use crate::numerics::{orthonormalize, CircleStencil, OrthoSet};
use crate::prelude::*;

/// Default drop tolerance of the basis orthonormalization.
pub const DROP_TOL: f64 = 1e-12;
/// Default truncation order of the rational Hardy basis.
pub const DEFAULT_ORDER: usize = 64;
/// Tolerance on the Hardy-membership residual of `H_a`.
pub const MEMBERSHIP_TOL: f64 = 1e-7;
/// Points on the circular stencil used for derivatives in the second
/// variable.
pub const STENCIL_POINTS: usize = 16;

/// How a weight was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightTag {
    Unit,
    Poisson(C64),
    Custom(String),
}

impl fmt::Display for WeightTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightTag::Unit => write!(f, "unit"),
            WeightTag::Poisson(a) => write!(f, "poisson({}{:+}i)", a.re, a.im),
            WeightTag::Custom(s) => write!(f, "{s}"),
        }
    }
}

/// Positive weight `φ` sampled on a boundary grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    samples: Vec<f64>,
    tag: WeightTag,
}

impl Weight {
    pub fn new(samples: Vec<f64>, tag: WeightTag) -> Result<Self> {
        let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(min > 0.0) {
            return Err(Error::NonPositiveWeight { min });
        }
        Ok(Weight { samples, tag })
    }

    pub fn unit(grid: &BoundaryGrid) -> Self {
        Weight { samples: vec![1.0; grid.len()], tag: WeightTag::Unit }
    }

    /// Weight from a function of (curve index, parameter t, point z).
    pub fn from_fn(grid: &BoundaryGrid, tag: WeightTag, f: impl Fn(usize, f64, C64) -> f64) -> Result<Self> {
        let s = (0..grid.len()).map(|i| f(grid.curve_index[i], grid.t[i], grid.nodes[i])).collect();
        Self::new(s, tag)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn tag(&self) -> &WeightTag {
        &self.tag
    }
}

/// `coefficient / (z − location)^order`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPart {
    pub location: C64,
    pub order: u32,
    pub coefficient: C64,
}

impl SingularPart {
    pub fn eval(&self, z: C64) -> C64 {
        self.coefficient / (z - self.location).powu(self.order)
    }

    /// Derivative in `z`.
    pub fn derivative(&self) -> SingularPart {
        SingularPart { location: self.location, order: self.order + 1, coefficient: -self.coefficient * self.order as f64 }
    }
}

/// Complex samples on a boundary grid, optionally with the known poles of
/// the interior extension.
#[derive(Debug, Clone)]
pub struct BoundaryFunction {
    grid: Arc<BoundaryGrid>,
    samples: Vec<C64>,
    singular_parts: Vec<SingularPart>,
}

/// Clearance, in node spacings, required by [`BoundaryFunction::eval`].
pub const EVAL_CLEARANCE: f64 = 5.0;

impl BoundaryFunction {
    pub fn new(grid: Arc<BoundaryGrid>, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(BoundaryFunction { grid, samples, singular_parts: Vec::new() })
    }

    /// Samples a function given in closed form.
    pub fn from_fn(grid: &Arc<BoundaryGrid>, f: impl Fn(C64) -> C64) -> Self {
        let samples = grid.nodes.iter().map(|z| f(*z)).collect();
        BoundaryFunction { grid: grid.clone(), samples, singular_parts: Vec::new() }
    }

    pub fn with_singular_parts(mut self, parts: Vec<SingularPart>) -> Result<Self> {
        for p in &parts {
            if !contains(self.grid.domain(), p.location)? {
                return Err(Error::PointNotInterior(p.location));
            }
        }
        self.singular_parts = parts;
        Ok(self)
    }

    pub fn grid(&self) -> &Arc<BoundaryGrid> {
        &self.grid
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn singular_parts(&self) -> &[SingularPart] {
        &self.singular_parts
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    fn singular_at(&self, z: C64) -> C64 {
        self.singular_parts.iter().map(|p| p.eval(z)).sum()
    }

    /// Samples with the singular parts removed.
    pub fn regular_samples(&self) -> Vec<C64> {
        if self.singular_parts.is_empty() {
            return self.samples.clone();
        }
        self.samples.iter().zip(&self.grid.nodes).map(|(f, z)| f - self.singular_at(*z)).collect()
    }

    /// Boundary trace of the complex derivative of the interior extension.
    pub fn derivative(&self) -> BoundaryFunction {
        let reg = self.regular_samples();
        let dreg = self.grid.diff_z(&reg);
        let parts: Vec<SingularPart> = self.singular_parts.iter().map(SingularPart::derivative).collect();
        let samples = dreg
            .iter()
            .zip(&self.grid.nodes)
            .map(|(d, z)| d + parts.iter().map(|p| p.eval(*z)).sum::<C64>())
            .collect();
        BoundaryFunction { grid: self.grid.clone(), samples, singular_parts: parts }
    }

    /// Boundary values, seen from inside, of the Cauchy integral of the
    /// samples. Equal to the samples when they are the trace of a function
    /// holomorphic in the domain (apart from the declared poles).
    pub fn cauchy_trace(&self) -> Vec<C64> {
        let g = &self.grid;
        let reg = self.regular_samples();
        let dt_reg = g.diff_t(&reg);
        let n = g.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let zi = g.nodes[i];
            let gi = reg[i];
            let mut s = dt_reg[i] * g.dt();
            for j in 0..n {
                if j != i {
                    s += (reg[j] - gi) * g.dz[j] / (g.nodes[j] - zi);
                }
            }
            out.push(gi + s / (I * 2.0 * PI) + self.singular_at(zi));
        }
        out
    }

    /// Barycentric Cauchy evaluation without any checks.
    pub(crate) fn eval_raw(&self, z: C64) -> C64 {
        barycentric(&self.grid, &self.regular_samples(), z) + self.singular_at(z)
    }

    /// Interior value with a clearance of `factor` node spacings.
    pub fn eval_with_clearance(&self, z: C64, factor: f64) -> Result<C64> {
        check_interior(&self.grid, z, factor)?;
        for p in &self.singular_parts {
            if p.location == z {
                return Err(Error::InvalidParameter("evaluation at a declared pole".into()));
            }
        }
        Ok(self.eval_raw(z))
    }

    /// Value at `z` of the holomorphic extension; see
    /// [`cauchy_interior_eval`].
    pub fn eval(&self, z: C64) -> Result<C64> {
        self.eval_with_clearance(z, EVAL_CLEARANCE)
    }

    /// m-th complex derivative of the interior extension at `z`.
    pub fn eval_derivative(&self, z: C64, m: usize, factor: f64) -> Result<C64> {
        check_interior(&self.grid, z, factor)?;
        let mut f = self.clone();
        for _ in 0..m {
            f = f.derivative();
        }
        Ok(f.eval_raw(z))
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Vec<C64> {
        self.samples.iter().map(|x| f(*x)).collect()
    }

    /// Pointwise conjugate of the samples (no interior meaning).
    pub fn conj_samples(&self) -> Vec<C64> {
        self.map(|x| x.conj())
    }
}

fn barycentric(g: &BoundaryGrid, f: &[C64], z: C64) -> C64 {
    let mut num = ZERO;
    let mut den = ZERO;
    for ((zj, dz), fj) in g.nodes.iter().zip(&g.dz).zip(f) {
        let w = dz / (zj - z);
        num += fj * w;
        den += w;
    }
    num / den
}

pub(crate) fn check_interior(g: &BoundaryGrid, z: C64, factor: f64) -> Result<()> {
    let d = g.domain();
    if !contains(d, z)? {
        return Err(Error::PointNotInterior(z));
    }
    let required = factor * g.spacing();
    let actual = d.distance_to_boundary(z);
    if actual < required {
        return Err(Error::Clearance { point: z, required, actual });
    }
    Ok(())
}

/// Interior value of the holomorphic extension of `f` at `z`.
///
/// Singular parts are subtracted from the samples, the regular part is
/// evaluated by the barycentric form of the Cauchy integral, and the
/// singular parts are added back. Requires a clearance of five node
/// spacings.
pub fn cauchy_interior_eval(f: &BoundaryFunction, z: C64) -> Result<C64> {
    f.eval(z)
}

fn same_grid(a: &Arc<BoundaryGrid>, b: &Arc<BoundaryGrid>) -> bool {
    Arc::ptr_eq(a, b) || (a.nodes == b.nodes && a.weights == b.weights)
}

/// `Σ u_i conj(v_i) φ_i w_i`.
pub fn weighted_inner(u: &BoundaryFunction, v: &BoundaryFunction, w: &Weight) -> Result<C64> {
    if !same_grid(&u.grid, &v.grid) || w.samples.len() != u.samples.len() {
        return Err(Error::GridMismatch);
    }
    Ok(inner_raw(&u.samples, &v.samples, &w.samples, &u.grid.weights))
}

fn inner_raw(u: &[C64], v: &[C64], phi: &[f64], ds: &[f64]) -> C64 {
    let mut s = ZERO;
    for i in 0..u.len() {
        s += u[i] * v[i].conj() * (phi[i] * ds[i]);
    }
    s
}

/// One element of the rational spanning set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RawElement {
    /// `z^k`
    Monomial(usize),
    /// `(z − c_hole)^{−k}`
    HolePower { hole: usize, k: usize },
}

/// Orthonormal basis of the sampled Hardy space under a weight.
#[derive(Debug, Clone)]
pub struct HardyBasis {
    grid: Arc<BoundaryGrid>,
    weight: Weight,
    order: usize,
    raw: Vec<RawElement>,
    ortho: OrthoSet,
    // conj(e_q) φ ds, so that ⟨u, e_q⟩ is a dot product
    dual: Vec<Vec<C64>>,
    quality: f64,
}

/// Orthonormalizes `{z^k}_{0..=K} ∪ {(z − c_j)^{−k}}_{1..=K}` under the
/// weighted inner product.
pub fn build_hardy_basis(grid: &Arc<BoundaryGrid>, w: &Weight, order: usize) -> Result<HardyBasis> {
    if order < 4 {
        return Err(Error::InvalidParameter(alloc::format!("basis order must be >= 4, got {order}")));
    }
    if w.samples.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let anchors = grid.domain().anchors();
    let mut raw = Vec::new();
    let mut span = Vec::new();
    for k in 0..=order {
        raw.push(RawElement::Monomial(k));
        span.push(grid.nodes.iter().map(|z| z.powu(k as u32)).collect::<Vec<_>>());
    }
    for k in 1..=order {
        for (h, c) in anchors.iter().enumerate() {
            raw.push(RawElement::HolePower { hole: h, k });
            span.push(grid.nodes.iter().map(|z| (z - c).powi(-(k as i32))).collect());
        }
    }
    let phi = &w.samples;
    let ds = &grid.weights;
    let ortho = orthonormalize(&span, |u, v| inner_raw(u, v, phi, ds), DROP_TOL);
    let dual = ortho
        .vectors
        .iter()
        .map(|e| e.iter().zip(phi).zip(ds).map(|((x, p), d)| x.conj() * (p * d)).collect())
        .collect();
    let mut basis = HardyBasis { grid: grid.clone(), weight: w.clone(), order, raw, ortho, dual, quality: 0.0 };
    let mut worst: f64 = 0.0;
    for k in 0..=order / 2 {
        let u: Vec<C64> = grid.nodes.iter().map(|z| z.powu(k as u32)).collect();
        let p = basis.project_samples(&u);
        let diff: Vec<C64> = p.iter().zip(&u).map(|(a, b)| a - b).collect();
        let num = inner_raw(&diff, &diff, phi, ds).re.sqrt();
        let den = inner_raw(&u, &u, phi, ds).re.sqrt();
        worst = worst.max(num / den);
    }
    basis.quality = worst;
    if !(worst <= 1e-8) {
        return Err(Error::BasisQuality { residual: worst });
    }
    Ok(basis)
}

impl HardyBasis {
    pub fn grid(&self) -> &Arc<BoundaryGrid> {
        &self.grid
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn raw_span(&self) -> &[RawElement] {
        &self.raw
    }

    pub fn ortho(&self) -> &OrthoSet {
        &self.ortho
    }

    pub fn len(&self) -> usize {
        self.ortho.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ortho.vectors.is_empty()
    }

    /// Worst relative polynomial-reproduction residual for `k ≤ K/2`.
    pub fn quality(&self) -> f64 {
        self.quality
    }

    /// `Σ_q ⟨u, e_q⟩_φ e_q`.
    pub fn project_samples(&self, u: &[C64]) -> Vec<C64> {
        let n = u.len();
        let mut out = vec![ZERO; n];
        for (e, d) in self.ortho.vectors.iter().zip(&self.dual) {
            let mut c = ZERO;
            for i in 0..n {
                c += u[i] * d[i];
            }
            for i in 0..n {
                out[i] += c * e[i];
            }
        }
        out
    }

    /// Weighted L² inner product on this basis' grid.
    pub fn inner(&self, u: &[C64], v: &[C64]) -> C64 {
        inner_raw(u, v, &self.weight.samples, &self.grid.weights)
    }

    pub fn norm(&self, u: &[C64]) -> f64 {
        self.inner(u, u).re.max(0.0).sqrt()
    }

    fn check_point(&self, a: C64) -> Result<()> {
        let d = self.grid.domain();
        if !contains(d, a)? {
            return Err(Error::PointNotInterior(a));
        }
        Ok(())
    }

    fn function(&self, samples: Vec<C64>) -> BoundaryFunction {
        BoundaryFunction { grid: self.grid.clone(), samples, singular_parts: Vec::new() }
    }
}

/// Orthogonal projection onto the sampled Hardy space.
pub fn szego_project(u: &BoundaryFunction, basis: &HardyBasis) -> Result<BoundaryFunction> {
    if !same_grid(&u.grid, &basis.grid) {
        return Err(Error::GridMismatch);
    }
    Ok(basis.function(basis.project_samples(&u.samples)))
}

/// `C_a(z) = conj( φ(z)^{-1} T(z) / (2πi (z − a)) )`.
pub fn weighted_cauchy_kernel(grid: &Arc<BoundaryGrid>, a: C64, w: &Weight) -> Result<BoundaryFunction> {
    let d = grid.domain();
    if !contains(d, a)? {
        return Err(Error::PointNotInterior(a));
    }
    Ok(cauchy_kernel_samples(grid, a, w, 0))
}

// n-th ā-derivative of C_a: conj( n! T / (2πi φ (z − a)^{n+1}) ).
fn cauchy_kernel_samples(grid: &Arc<BoundaryGrid>, a: C64, w: &Weight, n: u32) -> BoundaryFunction {
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let samples = (0..grid.len())
        .map(|i| {
            let v = grid.tangents[i] * fact / (I * 2.0 * PI * w.samples[i] * (grid.nodes[i] - a).powu(n + 1));
            v.conj()
        })
        .collect();
    BoundaryFunction { grid: grid.clone(), samples, singular_parts: Vec::new() }
}

/// Weighted Szegő kernel `σ(·, a) = P_φ C_a`.
pub fn sigma(basis: &HardyBasis, a: C64) -> Result<BoundaryFunction> {
    basis.check_point(a)?;
    Ok(sigma_unchecked(basis, a))
}

pub(crate) fn sigma_unchecked(basis: &HardyBasis, a: C64) -> BoundaryFunction {
    let c = cauchy_kernel_samples(&basis.grid, a, &basis.weight, 0);
    basis.function(basis.project_samples(&c.samples))
}

fn stencil_for(basis: &HardyBasis, a: C64, n: usize) -> Result<CircleStencil> {
    if n > 4 {
        return Err(Error::InvalidParameter(alloc::format!("derivative order {n} exceeds 4")));
    }
    basis.check_point(a)?;
    let clearance = basis.grid.domain().distance_to_boundary(a);
    let h = clearance / 10.0;
    if !(h > 0.0) {
        return Err(Error::Clearance { point: a, required: 0.0, actual: clearance });
    }
    Ok(CircleStencil::new(STENCIL_POINTS, h))
}

/// `∂ⁿσ(·, a)/∂āⁿ` from a circular stencil of σ evaluations in the
/// second variable (radius a tenth of the boundary clearance).
pub fn sigma_dbar(basis: &HardyBasis, a: C64, n: usize) -> Result<BoundaryFunction> {
    if n == 0 {
        return sigma(basis, a);
    }
    let st = stencil_for(basis, a, n)?;
    let cols: Vec<Vec<C64>> = st.nodes(a).iter().map(|p| sigma_unchecked(basis, *p).samples).collect();
    let mut vals = vec![ZERO; st.points];
    let samples = (0..basis.grid.len())
        .map(|i| {
            for (k, c) in cols.iter().enumerate() {
                vals[k] = c[i];
            }
            st.d_anti(&vals, n)
        })
        .collect();
    Ok(basis.function(samples))
}

/// `∂ⁿσ(·, a)/∂āⁿ` by projecting the differentiated Cauchy kernel.
pub fn sigma_dbar_projected(basis: &HardyBasis, a: C64, n: usize) -> Result<BoundaryFunction> {
    basis.check_point(a)?;
    let c = cauchy_kernel_samples(&basis.grid, a, &basis.weight, n as u32);
    Ok(basis.function(basis.project_samples(&c.samples)))
}

/// Weighted Garabedian kernel `λ(·, a) = 1/(2π(z − a)) − i H_a`.
///
/// `H_a` comes from the orthogonal decomposition
/// `C_a = σ(·, a) + φ^{-1} conj(H_a T)`; its membership in the Hardy space
/// is checked against [`MEMBERSHIP_TOL`].
pub fn weighted_garabedian(basis: &HardyBasis, a: C64) -> Result<BoundaryFunction> {
    basis.check_point(a)?;
    let (lambda, residual) = garabedian_parts(basis, a);
    if residual > MEMBERSHIP_TOL {
        return Err(Error::Decomposition { residual, tolerance: MEMBERSHIP_TOL });
    }
    Ok(lambda)
}

pub(crate) fn garabedian_parts(basis: &HardyBasis, a: C64) -> (BoundaryFunction, f64) {
    let g = &basis.grid;
    let c = cauchy_kernel_samples(g, a, &basis.weight, 0).samples;
    let s = basis.project_samples(&c);
    let h: Vec<C64> = (0..g.len())
        .map(|i| ((c[i] - s[i]) * basis.weight.samples[i]).conj() * g.tangents[i].conj())
        .collect();
    let ph = basis.project_samples(&h);
    let scale = max_abs(&h).max(max_abs(&c));
    let residual = h.iter().zip(&ph).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale;
    let pole = SingularPart { location: a, order: 1, coefficient: real(1.0 / (2.0 * PI)) };
    let samples = (0..g.len()).map(|i| pole.eval(g.nodes[i]) - I * h[i]).collect();
    (BoundaryFunction { grid: g.clone(), samples, singular_parts: vec![pole] }, residual)
}

/// `∂ⁿλ(·, a)/∂aⁿ` by the circular stencil (λ is holomorphic in `a`).
pub fn garabedian_da(basis: &HardyBasis, a: C64, n: usize) -> Result<BoundaryFunction> {
    if n == 0 {
        return weighted_garabedian(basis, a);
    }
    let st = stencil_for(basis, a, n)?;
    let cols: Vec<Vec<C64>> = st.nodes(a).iter().map(|p| garabedian_parts(basis, *p).0.samples).collect();
    let mut vals = vec![ZERO; st.points];
    let samples = (0..basis.grid.len())
        .map(|i| {
            for (k, c) in cols.iter().enumerate() {
                vals[k] = c[i];
            }
            st.d_holo(&vals, n)
        })
        .collect();
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let pole = SingularPart { location: a, order: n as u32 + 1, coefficient: real(fact / (2.0 * PI)) };
    Ok(BoundaryFunction { grid: basis.grid.clone(), samples, singular_parts: vec![pole] })
}

pub(crate) fn max_abs(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{builtin_domain, sample_boundary};
    use proptest::prelude::*;

    fn grid(name: &str, p: &[f64], m: usize) -> Arc<BoundaryGrid> {
        Arc::new(sample_boundary(&builtin_domain(name, p).unwrap(), m).unwrap())
    }

    fn f(g: &Arc<BoundaryGrid>, h: impl Fn(C64) -> C64) -> BoundaryFunction {
        BoundaryFunction::from_fn(g, h)
    }

    fn disc_szego(z: C64, w: C64) -> C64 {
        ONE / ((ONE - z * w.conj()) * 2.0 * PI)
    }

    fn max_err(a: &[C64], b: &[C64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn inner_products_on_circle() {
        let g = grid("disc", &[], 64);
        let w = Weight::unit(&g);
        let one = f(&g, |_| ONE);
        let z = f(&g, |z| z);
        let z2 = f(&g, |z| z * z);
        assert!((weighted_inner(&one, &one, &w).unwrap() - 2.0 * PI).norm() < 1e-12);
        assert!(weighted_inner(&z, &one, &w).unwrap().norm() < 1e-12);
        assert!((weighted_inner(&z2, &z2, &w).unwrap() - 2.0 * PI).norm() < 1e-12);
    }

    #[test]
    fn grid_mismatch_detected() {
        let g1 = grid("disc", &[], 64);
        let g2 = grid("disc", &[], 32);
        let w = Weight::unit(&g1);
        assert_eq!(weighted_inner(&f(&g1, |z| z), &f(&g2, |z| z), &w), Err(Error::GridMismatch));
    }

    #[test]
    fn weight_must_be_positive() {
        assert!(matches!(Weight::new(vec![1.0, 0.0], WeightTag::Unit), Err(Error::NonPositiveWeight { .. })));
    }

    #[test]
    fn disc_basis_is_fourier() {
        let g = grid("disc", &[], 64);
        let b = build_hardy_basis(&g, &Weight::unit(&g), 12).unwrap();
        assert_eq!(b.len(), 13);
        let s = 1.0 / (2.0 * PI).sqrt();
        for (k, e) in b.ortho().vectors.iter().enumerate() {
            for (v, z) in e.iter().zip(&g.nodes) {
                assert!((v - z.powu(k as u32) * s).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn annulus_basis_keeps_laurent_modes() {
        let g = grid("annulus", &[0.3], 256);
        let b = build_hardy_basis(&g, &Weight::unit(&g), 16).unwrap();
        assert_eq!(b.len(), 33);
        assert!(b.ortho().dropped.is_empty());
    }

    #[test]
    fn projection_fixes_polynomials_and_kills_conjugates() {
        for (name, p) in [("disc", vec![]), ("annulus", vec![0.3]), ("three_connected", vec![0.2, 0.5])] {
            let g = grid(name, &p, 256);
            let b = build_hardy_basis(&g, &Weight::unit(&g), 40).unwrap();
            let u = f(&g, |z| z * z * z);
            let pu = szego_project(&u, &b).unwrap();
            assert!(max_err(pu.samples(), u.samples()) < 1e-9, "{name}");
        }
        let g = grid("disc", &[], 256);
        let b = build_hardy_basis(&g, &Weight::unit(&g), 40).unwrap();
        let u = f(&g, |z| z.conj());
        assert!(max_abs(szego_project(&u, &b).unwrap().samples()) < 1e-9);
    }

    #[test]
    fn reproducing_cauchy_kernel() {
        let g = grid("disc", &[], 256);
        let w = Weight::unit(&g);
        let a = C64::new(0.3, -0.2);
        let c = weighted_cauchy_kernel(&g, a, &w).unwrap();
        assert!((weighted_inner(&f(&g, |z| z * z), &c, &w).unwrap() - a * a).norm() < 1e-9);

        let g = grid("annulus", &[0.3], 256);
        let w = Weight::from_fn(&g, WeightTag::Custom("2+cos".into()), |_, _, z| 2.0 + z.arg().cos()).unwrap();
        let a = C64::new(0.1, 0.6);
        let c = weighted_cauchy_kernel(&g, a, &w).unwrap();
        assert!((weighted_inner(&f(&g, |z| z * z), &c, &w).unwrap() - a * a).norm() < 1e-8);
    }

    #[test]
    fn disc_sigma_matches_oracle() {
        let g = grid("disc", &[], 256);
        let b = build_hardy_basis(&g, &Weight::unit(&g), 40).unwrap();
        let a = C64::new(0.5, 0.3);
        let s = sigma(&b, a).unwrap();
        let exact: Vec<C64> = g.nodes.iter().map(|z| disc_szego(*z, a)).collect();
        assert!(max_err(s.samples(), &exact) < 1e-8);
        // interior values and Hermitian symmetry
        let z = C64::new(-0.2, 0.4);
        assert!((s.eval(z).unwrap() - disc_szego(z, a)).norm() < 1e-8);
        let s2 = sigma(&b, z).unwrap();
        assert!((s.eval(z).unwrap() - s2.eval(a).unwrap().conj()).norm() < 1e-8);
    }

    #[test]
    fn weighted_sigma_reproduces() {
        let g = grid("annulus", &[0.3], 256);
        let w = Weight::from_fn(&g, WeightTag::Custom("2+cos t".into()), |_, t, _| 2.0 + t.cos()).unwrap();
        let b = build_hardy_basis(&g, &w, 40).unwrap();
        for a in [C64::new(0.55, 0.0), C64::new(-0.2, 0.5), C64::new(0.0, -0.7)] {
            let s = sigma(&b, a).unwrap();
            for (h, ha) in [
                (f(&g, |_| ONE), ONE),
                (f(&g, |z| z), a),
                (f(&g, |z| z * z), a * a),
                (f(&g, |z| z * z * z + z * 2.0), a * a * a + a * 2.0),
                (f(&g, |z| ONE / z), ONE / a),
            ] {
                assert!((weighted_inner(&h, &s, &w).unwrap() - ha).norm() < 1e-8);
            }
            // derivative reproducing
            let s1 = sigma_dbar(&b, a, 1).unwrap();
            let h = f(&g, |z| z * z * z + z * 2.0);
            assert!((weighted_inner(&h, &s1, &w).unwrap() - (a * a * 3.0 + 2.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn sigma_dbar_disc_and_routes_agree() {
        let g = grid("disc", &[], 256);
        let b = build_hardy_basis(&g, &Weight::unit(&g), 40).unwrap();
        let a = C64::new(0.2, 0.1);
        let d1 = sigma_dbar(&b, a, 1).unwrap();
        let exact: Vec<C64> = g.nodes.iter().map(|z| z / ((ONE - z * a.conj()).powi(2) * 2.0 * PI)).collect();
        assert!(max_err(d1.samples(), &exact) < 1e-6);
        let d0 = sigma_dbar(&b, a, 0).unwrap();
        assert_eq!(d0.samples(), sigma(&b, a).unwrap().samples());
        for n in 1..=3 {
            let st = sigma_dbar(&b, a, n).unwrap();
            let pr = sigma_dbar_projected(&b, a, n).unwrap();
            assert!(max_err(st.samples(), pr.samples()) < 1e-7 * max_abs(pr.samples()), "n={n}");
        }
        // antiholomorphic in the second variable
        let st = stencil_for(&b, a, 1).unwrap();
        let cols: Vec<Vec<C64>> = st.nodes(a).iter().map(|p| sigma_unchecked(&b, *p).samples).collect();
        for i in (0..g.len()).step_by(17) {
            let vals: Vec<C64> = cols.iter().map(|c| c[i]).collect();
            assert!(st.d_holo(&vals, 1).norm() < 1e-6);
        }
    }

    #[test]
    fn disc_garabedian_and_residue() {
        let g = grid("disc", &[], 256);
        let b = build_hardy_basis(&g, &Weight::unit(&g), 40).unwrap();
        let a = C64::new(-0.3, 0.25);
        let l = weighted_garabedian(&b, a).unwrap();
        let exact: Vec<C64> = g.nodes.iter().map(|z| ONE / ((z - a) * 2.0 * PI)).collect();
        assert!(max_err(l.samples(), &exact) < 1e-8);
        let z = C64::new(0.4, 0.1);
        assert!((cauchy_interior_eval(&l, z).unwrap() - ONE / ((z - a) * 2.0 * PI)).norm() < 1e-8);
        // residue by quadrature on a small circle around a
        let r = 0.05;
        let n = 64;
        let mut acc = ZERO;
        for k in 0..n {
            let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            let zz = a + e * r;
            acc += l.eval(zz).unwrap() * (I * e * r) * (2.0 * PI / n as f64);
        }
        let residue = acc / (I * 2.0 * PI);
        assert!((residue - 1.0 / (2.0 * PI)).norm() < 1e-8);
    }

    #[test]
    fn identity_seven_one_weighted() {
        let g = grid("three_connected", &[0.2, 0.5], 256);
        let w = Weight::from_fn(&g, WeightTag::Custom("2+cos t".into()), |_, t, _| 2.0 + t.cos()).unwrap();
        let b = build_hardy_basis(&g, &w, 40).unwrap();
        let a = C64::new(0.0, 0.55);
        let s = sigma(&b, a).unwrap();
        let l = weighted_garabedian(&b, a).unwrap();
        let st = s.cauchy_trace();
        let lt = l.cauchy_trace();
        let res = (0..g.len())
            .map(|i| (st[i].conj() - lt[i] * g.tangents[i] / (I * w.samples()[i])).norm())
            .fold(0.0, f64::max);
        assert!(res < 1e-7 * max_abs(&st), "{res}");
    }

    #[test]
    fn cauchy_eval_and_trace() {
        let g = grid("ellipse", &[0.6], 256);
        let u = f(&g, |z| z * z);
        let z = C64::new(0.3, 0.1);
        assert!((cauchy_interior_eval(&u, z).unwrap() - z * z).norm() < 1e-10);
        assert!(max_err(&u.cauchy_trace(), u.samples()) < 1e-10);
        // conj(z) is not holomorphic: the trace differs
        let v = f(&g, |z| z.conj());
        assert!(max_err(&v.cauchy_trace(), v.samples()) > 1e-2);
        assert!(matches!(u.eval(real(0.999)), Err(Error::Clearance { .. })));
        assert!(matches!(u.eval(real(2.0)), Err(Error::PointNotInterior(_))));
        let d = u.eval_derivative(z, 1, 5.0).unwrap();
        assert!((d - z * 2.0).norm() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn projection_idempotent(c1 in -1.0f64..1.0, c2 in -1.0f64..1.0, c3 in -1.0f64..1.0) {
            let g = grid("annulus", &[0.3], 128);
            let b = build_hardy_basis(&g, &Weight::unit(&g), 24).unwrap();
            let u = f(&g, |z| z.conj() * c1 + (z * c2).exp() + z.norm_sqr() * c3);
            let p1 = szego_project(&u, &b).unwrap();
            let p2 = szego_project(&p1, &b).unwrap();
            prop_assert!(max_err(p1.samples(), p2.samples()) < 1e-10 * (1.0 + max_abs(p1.samples())));
        }
    }
}
