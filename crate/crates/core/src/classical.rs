//! The unweighted Szegő and Garabedian kernels, Ahlfors maps, zeros of
//! holomorphic boundary functions and proper maps onto the disc.

use crate::geometry::{contains, BoundaryGrid};
use crate::hardy::{self, build_hardy_basis, BoundaryFunction, HardyBasis, SingularPart, Weight};
use crate::prelude::*;

/// Allowed mismatch between the two routes to `L`.
pub const GARABEDIAN_CONSISTENCY: f64 = 1e-7;
/// Allowed deviation of `|f|` from one on the boundary.
pub const MODULUS_TOL: f64 = 1e-6;

/// Unweighted kernels on one grid.
#[derive(Debug, Clone)]
pub struct Classical {
    basis: HardyBasis,
}

impl Classical {
    pub fn new(grid: &Arc<BoundaryGrid>, order: usize) -> Result<Self> {
        Ok(Classical { basis: build_hardy_basis(grid, &Weight::unit(grid), order)? })
    }

    pub fn from_basis(basis: HardyBasis) -> Self {
        Classical { basis }
    }

    pub fn basis(&self) -> &HardyBasis {
        &self.basis
    }

    pub fn grid(&self) -> &Arc<BoundaryGrid> {
        self.basis.grid()
    }

    /// `S(·, a)`: the weighted Szegő kernel with `φ ≡ 1`.
    pub fn szego(&self, a: C64) -> Result<BoundaryFunction> {
        hardy::sigma(&self.basis, a)
    }

    /// `L(·, a) = i conj(S(·, a)) conj(T)` on the boundary, with its pole
    /// at `a`, cross-checked against the projection route.
    pub fn garabedian(&self, a: C64) -> Result<BoundaryFunction> {
        let s = self.szego(a)?;
        let l = garabedian_from_szego(&s, a)?;
        let direct = hardy::weighted_garabedian(&self.basis, a)?;
        let scale = hardy::max_abs(l.samples());
        let residual = l
            .samples()
            .iter()
            .zip(direct.samples())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
            / scale;
        if residual > GARABEDIAN_CONSISTENCY {
            return Err(Error::Consistency { what: "garabedian routes", residual });
        }
        Ok(l)
    }

    /// The `n − 1` zeros of `S(·, a)`.
    pub fn szego_zeros(&self, a: C64) -> Result<Vec<C64>> {
        let s = self.szego(a)?;
        let expected = self.grid().curves() - 1;
        let zeros = find_zeros(&s)?;
        let count: usize = zeros.iter().map(|z| z.multiplicity).sum();
        if count != expected {
            return Err(Error::ZeroCount { expected, found: count as f64 });
        }
        Ok(zeros.iter().flat_map(|z| core::iter::repeat_n(z.location, z.multiplicity)).collect())
    }

    /// Ahlfors map `f_a = S(·, a)/L(·, a)`.
    pub fn ahlfors(&self, a: C64) -> Result<AhlforsMap> {
        let s = self.szego(a)?;
        let l = self.garabedian(a)?;
        let g = self.grid();
        let samples: Vec<C64> = s.samples().iter().zip(l.samples()).map(|(x, y)| x / y).collect();
        let f = BoundaryFunction::new(g.clone(), samples)?;
        let map = ProperMap::new(f)?;
        let n = g.curves();
        if map.degree() != n {
            return Err(Error::ZeroCount { expected: n, found: map.degree() as f64 });
        }
        let derivative_at_base = map.samples.eval_derivative(a, 1, 1.0)?;
        let reference = s.eval_with_clearance(a, 1.0)? * (2.0 * PI);
        let residual = (derivative_at_base - reference).norm() / reference.norm();
        if residual > 1e-6 || derivative_at_base.re <= 0.0 {
            return Err(Error::Consistency { what: "f'(a) = 2 pi S(a,a)", residual });
        }
        Ok(AhlforsMap { base_point: a, szego: s, garabedian: l, map, derivative_at_base })
    }
}

/// `L = i conj(S) conj(T)` with the pole `1/(2π(z − a))` declared.
pub fn garabedian_from_szego(s: &BoundaryFunction, a: C64) -> Result<BoundaryFunction> {
    let g = s.grid();
    let samples = s.samples().iter().zip(&g.tangents).map(|(v, t)| I * v.conj() * t.conj()).collect();
    BoundaryFunction::new(g.clone(), samples)?.with_singular_parts(vec![SingularPart {
        location: a,
        order: 1,
        coefficient: real(1.0 / (2.0 * PI)),
    }])
}

/// A zero of a holomorphic function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub location: C64,
    pub multiplicity: usize,
}

/// Winding number of the boundary values about the origin, summed over
/// all curves.
pub fn argument_degree(f: &BoundaryFunction) -> Result<f64> {
    let g = f.grid();
    let v = f.samples();
    let mut total = 0.0;
    for c in 0..g.curves() {
        let r = g.curve_range(c);
        let (s, e) = (r.start, r.end);
        for i in s..e {
            let j = if i + 1 == e { s } else { i + 1 };
            if v[i].norm() == 0.0 {
                return Err(Error::ZeroCount { expected: 0, found: f64::NAN });
            }
            total += (v[j] / v[i]).arg();
        }
    }
    Ok(total / (2.0 * PI))
}

/// Power sums `s_k = (1/2πi) ∮ z^k f'/f dz` over the boundary.
fn power_sums(f: &BoundaryFunction, kmax: usize) -> Vec<C64> {
    let g = f.grid();
    let reg = f.regular_samples();
    let df = g.diff_t(&reg);
    let mut out = vec![ZERO; kmax + 1];
    for i in 0..g.len() {
        let ratio = df[i] / reg[i] * g.dt();
        let mut zk = ONE;
        for s in out.iter_mut() {
            *s += zk * ratio;
            zk *= g.nodes[i];
        }
    }
    out.iter().map(|s| s / (I * 2.0 * PI)).collect()
}

fn polynomial_roots(coeffs: &[C64], radius: f64) -> Vec<C64> {
    // monic, coeffs[k] multiplies z^(n-k), coeffs[0] = 1
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![-coeffs[1]];
    }
    let eval = |z: C64| coeffs.iter().fold(ZERO, |acc, c| acc * z + c);
    let seed = C64::new(0.4, 0.9);
    let mut roots: Vec<C64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut den = ONE;
            for j in 0..n {
                if j != i {
                    den *= roots[i] - roots[j];
                }
            }
            if den.norm() == 0.0 {
                roots[i] += C64::new(1e-8, 1e-8) * radius;
                continue;
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            break;
        }
    }
    roots
}

/// Zeros of the holomorphic extension of `f` (no declared poles).
///
/// Power sums of the zeros come from boundary quadrature of `z^k f'/f`;
/// Newton's identities give the monic polynomial with those zeros, whose
/// roots are polished by Newton's method on the Cauchy extension. Roots
/// closer than `1e−4 × diameter` are merged into one multiple zero.
pub fn find_zeros(f: &BoundaryFunction) -> Result<Vec<Zero>> {
    if !f.singular_parts().is_empty() {
        return Err(Error::InvalidParameter("zero finding needs a function without declared poles".into()));
    }
    let g = f.grid();
    let domain = g.domain();
    let diam = domain.diameter();
    let s0 = power_sums(f, 0)[0];
    let count = s0.re.round();
    let degree = argument_degree(f)?;
    if (s0.re - count).abs() > 1e-3 || s0.im.abs() > 1e-3 || (degree - count).abs() > 1e-3 || count < 0.0 {
        return Err(Error::ZeroCount { expected: count.max(0.0) as usize, found: s0.re });
    }
    let n = count as usize;
    if n == 0 {
        return Ok(Vec::new());
    }
    let p = power_sums(f, n);
    // Newton's identities: k e_k = Σ_{i=1}^k (−1)^{i−1} e_{k−i} p_i
    let mut e = vec![ONE; n + 1];
    for k in 1..=n {
        let mut acc = ZERO;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += e[k - i] * p[i] * sign;
        }
        e[k] = acc / k as f64;
    }
    let coeffs: Vec<C64> = (0..=n).map(|k| if k % 2 == 0 { e[k] } else { -e[k] }).collect();
    let roots = polynomial_roots(&coeffs, 0.5 * diam);

    let eps_zero = 1e-4 * diam;
    let mut zeros: Vec<Zero> = Vec::new();
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for r in roots {
        if let Some(c) = clusters.iter_mut().find(|(z, m)| (*z / *m as f64 - r).norm() < eps_zero) {
            c.0 += r;
            c.1 += 1;
        } else {
            clusters.push((r, 1));
        }
    }
    let df = f.derivative();
    for (sum, m) in clusters {
        let mut z = sum / m as f64;
        if !contains(domain, z)? {
            return Err(Error::ZeroCount { expected: n, found: s0.re });
        }
        if m == 1 {
            for _ in 0..30 {
                let fz = f.eval_raw(z);
                let dz = df.eval_raw(z);
                if dz.norm() == 0.0 {
                    break;
                }
                let step = fz / dz;
                z -= step;
                if step.norm() < 1e-15 * diam {
                    break;
                }
            }
            if !contains(domain, z)? {
                return Err(Error::ZeroCount { expected: n, found: s0.re });
            }
        }
        zeros.push(Zero { location: z, multiplicity: m });
    }
    zeros.sort_by(|a, b| a.location.re.total_cmp(&b.location.re).then(a.location.im.total_cmp(&b.location.im)));
    Ok(zeros)
}

/// Proper holomorphic map of the domain onto the unit disc, given by its
/// boundary values.
#[derive(Debug, Clone)]
pub struct ProperMap {
    pub samples: BoundaryFunction,
    pub zeros: Vec<Zero>,
}

impl ProperMap {
    /// Validates `|f| = 1` on the boundary and locates the zeros.
    pub fn new(samples: BoundaryFunction) -> Result<Self> {
        let deviation = samples.samples().iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max);
        if deviation > MODULUS_TOL {
            return Err(Error::BoundaryModulus { deviation });
        }
        let zeros = find_zeros(&samples)?;
        Ok(ProperMap { samples, zeros })
    }

    /// Number of zeros counted with multiplicity.
    pub fn degree(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    pub fn max_modulus_deviation(&self) -> f64 {
        self.samples.samples().iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Interior value (clearance of one node spacing).
    pub fn eval(&self, z: C64) -> Result<C64> {
        self.samples.eval_with_clearance(z, 1.0)
    }

    pub fn derivative(&self, z: C64) -> Result<C64> {
        self.samples.eval_derivative(z, 1, 1.0)
    }

    /// All zeros simple and separated by more than `1e−4 × diameter`.
    pub fn has_simple_zeros(&self) -> bool {
        let eps = 1e-4 * self.samples.grid().domain().diameter();
        if self.zeros.iter().any(|z| z.multiplicity != 1) {
            return false;
        }
        for (i, a) in self.zeros.iter().enumerate() {
            for b in &self.zeros[i + 1..] {
                if (a.location - b.location).norm() <= eps {
                    return false;
                }
            }
            match self.derivative(a.location) {
                Ok(d) if d.norm() > 1e-8 => {}
                _ => return false,
            }
        }
        true
    }
}

/// Ahlfors map with its ingredients.
#[derive(Debug, Clone)]
pub struct AhlforsMap {
    pub base_point: C64,
    pub szego: BoundaryFunction,
    pub garabedian: BoundaryFunction,
    pub map: ProperMap,
    /// `f_a'(a)`, equal to `2π S(a, a)`.
    pub derivative_at_base: C64,
}

impl AhlforsMap {
    /// `a` together with the zeros of `S(·, a)`.
    pub fn zeros(&self) -> Vec<C64> {
        self.map.zeros.iter().flat_map(|z| core::iter::repeat_n(z.location, z.multiplicity)).collect()
    }
}

/// Möbius parameters tried by [`mobius_simplify`], in order.
pub fn mobius_candidates() -> Vec<C64> {
    let mut out = vec![ZERO];
    for r in [0.05, 0.1, 0.2, 0.3] {
        for k in 0..8 {
            out.push(C64::from_polar(r, 2.0 * PI * k as f64 / 8.0));
        }
    }
    out
}

/// Composes `f` with `(f − β)/(1 − β̄ f)` for the first `β` that leaves
/// only simple, separated zeros.
pub fn mobius_simplify(map: &ProperMap) -> Result<(ProperMap, C64)> {
    mobius_search(map, |_| true)
}

/// [`mobius_simplify`] with an extra acceptance test on the composed map.
pub fn mobius_search(map: &ProperMap, accept: impl Fn(&ProperMap) -> bool) -> Result<(ProperMap, C64)> {
    let degree = map.degree();
    for beta in mobius_candidates() {
        if beta == ZERO {
            if map.has_simple_zeros() && accept(map) {
                return Ok((map.clone(), beta));
            }
            continue;
        }
        let samples: Vec<C64> = map.samples.samples().iter().map(|f| (f - beta) / (ONE - beta.conj() * f)).collect();
        let f = BoundaryFunction::new(map.samples.grid().clone(), samples)?;
        let candidate = match ProperMap::new(f) {
            Ok(m) => m,
            Err(_) => continue,
        };
        if candidate.degree() == degree && candidate.has_simple_zeros() && accept(&candidate) {
            return Ok((candidate, beta));
        }
    }
    Err(Error::NoMobius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{builtin_domain, sample_boundary};

    fn classical(name: &str, p: &[f64]) -> Classical {
        let g = Arc::new(sample_boundary(&builtin_domain(name, p).unwrap(), 256).unwrap());
        Classical::new(&g, 40).unwrap()
    }

    // Szegő kernel of ρ<|z|<1: Laurent modes z^n with ‖z^n‖² = 2π(1 + ρ^{2n+1}).
    fn annulus_szego(z: C64, w: C64, rho: f64) -> C64 {
        let x = z * w.conj();
        (-200i32..=200).map(|n| x.powi(n) / (2.0 * PI * (1.0 + rho.powi(2 * n + 1)))).sum()
    }

    #[test]
    fn disc_kernels() {
        let c = classical("disc", &[]);
        let a = C64::new(0.3, -0.2);
        let l = c.garabedian(a).unwrap();
        let z = C64::new(-0.4, 0.3);
        assert!((l.eval(z).unwrap() - ONE / ((z - a) * 2.0 * PI)).norm() < 1e-8);
        assert!(c.szego_zeros(a).unwrap().is_empty());
        let s = c.szego(a).unwrap();
        let saa = s.eval(a).unwrap();
        assert!(saa.re > 0.0 && saa.im.abs() < 1e-12);
    }

    #[test]
    fn annulus_szego_oracle_and_symmetries() {
        let c = classical("annulus", &[0.3]);
        let a = real(0.55);
        let s = c.szego(a).unwrap();
        for z in [C64::new(0.2, 0.5), C64::new(-0.7, -0.1), C64::new(0.0, 0.85)] {
            let exact = annulus_szego(z, a, 0.3);
            assert!((s.eval(z).unwrap() - exact).norm() < 1e-7);
            let back = c.szego(z).unwrap().eval(a).unwrap();
            assert!((back.conj() - exact).norm() < 1e-8);
        }
        // L antisymmetric, nonvanishing on the boundary
        let w = C64::new(-0.3, 0.5);
        let la = c.garabedian(a).unwrap();
        let lw = c.garabedian(w).unwrap();
        assert!((la.eval(w).unwrap() + lw.eval(a).unwrap()).norm() < 1e-7);
        assert!(la.samples().iter().all(|v| v.norm() > 1e-3));
    }

    #[test]
    fn annulus_szego_zero() {
        let c = classical("annulus", &[0.3]);
        let a = real(0.55);
        let zs = c.szego_zeros(a).unwrap();
        assert_eq!(zs.len(), 1);
        let z0 = zs[0];
        assert!(annulus_szego(z0, a, 0.3).norm() < 1e-8);
        assert!(c.szego(a).unwrap().eval_with_clearance(z0, 1.0).unwrap().norm() < 1e-8);
        // continuity in a
        let z1 = c.szego_zeros(real(0.55 + 1e-4)).unwrap()[0];
        assert!((z1 - z0).norm() < 1e-3);
    }

    #[test]
    fn ahlfors_disc() {
        let c = classical("disc", &[]);
        let f0 = c.ahlfors(ZERO).unwrap();
        for (v, z) in f0.map.samples.samples().iter().zip(&c.grid().nodes) {
            assert!((v - z).norm() < 1e-9);
        }
        let a = real(0.4);
        let fa = c.ahlfors(a).unwrap();
        let z = C64::new(0.1, -0.5);
        let exact = (z - a) / (ONE - z * a);
        assert!((fa.map.eval(z).unwrap() - exact).norm() < 1e-8);
        assert_eq!(fa.zeros().len(), 1);
        assert!((fa.zeros()[0] - a).norm() < 1e-10);
    }

    #[test]
    fn ahlfors_annulus() {
        let c = classical("annulus", &[0.3]);
        let a = real(0.55);
        let f = c.ahlfors(a).unwrap();
        assert!(f.map.max_modulus_deviation() < 1e-6);
        assert!((argument_degree(&f.map.samples).unwrap() - 2.0).abs() < 1e-9);
        let saa = f.szego.eval(a).unwrap();
        assert!((f.derivative_at_base - saa * 2.0 * PI).norm() < 1e-7);
        let zs = f.zeros();
        assert_eq!(zs.len(), 2);
        let extra = c.szego_zeros(a).unwrap()[0];
        assert!(zs.iter().any(|z| (z - a).norm() < 1e-9));
        assert!(zs.iter().any(|z| (z - extra).norm() < 1e-9));
    }

    #[test]
    fn near_boundary_base_point_gives_simple_zeros() {
        // distance 0.1 from the outer circle: the basis converges like 0.9^K
        let g = Arc::new(sample_boundary(&builtin_domain("annulus", &[0.3]).unwrap(), 512).unwrap());
        let c = Classical::new(&g, 200).unwrap();
        let a = C64::new(0.0, 0.9);
        let f = c.ahlfors(a).unwrap();
        assert!(f.map.has_simple_zeros());
    }

    #[test]
    fn mobius_on_double_zero() {
        let g = Arc::new(sample_boundary(&builtin_domain("disc", &[]).unwrap(), 256).unwrap());
        let f = ProperMap::new(BoundaryFunction::from_fn(&g, |z| z * z)).unwrap();
        assert_eq!(f.zeros, vec![Zero { location: f.zeros[0].location, multiplicity: 2 }]);
        assert!(f.zeros[0].location.norm() < 1e-6);
        let (h, beta) = mobius_simplify(&f).unwrap();
        assert!(beta != ZERO);
        assert_eq!(h.degree(), 2);
        let root = beta.sqrt();
        for z in &h.zeros {
            assert!((z.location - root).norm() < 1e-9 || (z.location + root).norm() < 1e-9);
        }
        // already simple: accepted unchanged
        let id = ProperMap::new(BoundaryFunction::from_fn(&g, |z| z)).unwrap();
        assert_eq!(mobius_simplify(&id).unwrap().1, ZERO);
    }

    #[test]
    fn three_connected_ahlfors() {
        let c = classical("three_connected", &[0.2, 0.5]);
        let a = C64::new(0.1, 0.55);
        let f = c.ahlfors(a).unwrap();
        assert_eq!(f.map.degree(), 3);
        assert!(f.map.max_modulus_deviation() < 1e-6);
        let s = c.szego(a).unwrap();
        for z in c.szego_zeros(a).unwrap() {
            assert!(s.eval_with_clearance(z, 1.0).unwrap().norm() < 1e-8);
        }
    }
}
