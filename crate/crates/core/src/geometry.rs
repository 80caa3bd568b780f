//! Boundary curves, domains and the boundary quadrature grid.

use crate::prelude::*;

/// Which side of the domain a curve bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveRole {
    Outer,
    Hole,
}

/// Closed curve `z(t) = Σ_{k=kmin}^{kmin+len-1} c_k e^{ikt}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub coeffs: Vec<C64>,
    pub kmin: i32,
    pub role: CurveRole,
}

impl Curve {
    pub fn new(coeffs: Vec<C64>, kmin: i32, role: CurveRole) -> Self {
        Curve { coeffs, kmin, role }
    }

    /// Circle of radius `r` about `c`, counterclockwise.
    pub fn circle(center: C64, r: f64, role: CurveRole) -> Self {
        Curve { coeffs: vec![center, real(r)], kmin: 0, role }
    }

    fn terms(&self) -> impl Iterator<Item = (f64, C64)> + '_ {
        self.coeffs.iter().enumerate().map(move |(j, c)| ((self.kmin + j as i32) as f64, *c))
    }

    pub fn eval(&self, t: f64) -> C64 {
        self.terms().map(|(k, c)| c * C64::from_polar(1.0, k * t)).sum()
    }

    /// `z'(t)`.
    pub fn d1(&self, t: f64) -> C64 {
        self.terms().map(|(k, c)| c * I * k * C64::from_polar(1.0, k * t)).sum()
    }

    /// `z''(t)`.
    pub fn d2(&self, t: f64) -> C64 {
        self.terms().map(|(k, c)| -c * k * k * C64::from_polar(1.0, k * t)).sum()
    }

    /// The same point set traversed backwards: `t ↦ z(−t)`.
    pub fn reversed(&self) -> Curve {
        let len = self.coeffs.len() as i32;
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Curve { coeffs, kmin: -(self.kmin + len - 1), role: self.role }
    }

    fn polygon(&self, m: usize) -> Vec<C64> {
        (0..m).map(|j| self.eval(2.0 * PI * j as f64 / m as f64)).collect()
    }
}

const OUTLINE: usize = 1024;

fn signed_area(poly: &[C64]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        a.re * b.im - b.re * a.im
    }).sum::<f64>() / 2.0
}

fn segments_cross(p1: C64, p2: C64, q1: C64, q2: C64) -> bool {
    let cross = |o: C64, a: C64, b: C64| (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re);
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn polygons_cross(a: &[C64], b: &[C64], same: bool) -> bool {
    let (na, nb) = (a.len(), b.len());
    // bounding-box prefilter per segment keeps this cheap in practice
    for i in 0..na {
        let (p1, p2) = (a[i], a[(i + 1) % na]);
        let (lo_x, hi_x) = (p1.re.min(p2.re), p1.re.max(p2.re));
        let (lo_y, hi_y) = (p1.im.min(p2.im), p1.im.max(p2.im));
        let start = if same { i + 2 } else { 0 };
        for j in start..nb {
            if same && i == 0 && j == nb - 1 {
                continue;
            }
            let (q1, q2) = (b[j], b[(j + 1) % nb]);
            if q1.re.max(q2.re) < lo_x || q1.re.min(q2.re) > hi_x || q1.im.max(q2.im) < lo_y || q1.im.min(q2.im) > hi_y {
                continue;
            }
            if segments_cross(p1, p2, q1, q2) {
                return true;
            }
        }
    }
    false
}

fn polygon_winding(poly: &[C64], p: C64) -> i64 {
    let n = poly.len();
    let mut total = 0.0;
    for i in 0..n {
        total += ((poly[(i + 1) % n] - p) / (poly[i] - p)).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

/// A bounded finitely connected domain with positively oriented boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    outer: Curve,
    holes: Vec<Curve>,
    anchors: Vec<C64>,
    diameter: f64,
    eps_geom: f64,
}

impl Domain {
    /// Builds and validates a domain. Hole curves are given
    /// counterclockwise, as in domain files, and stored reversed.
    pub fn new(outer: Curve, holes_ccw: Vec<(Curve, C64)>) -> Result<Self> {
        let geo = |curve: usize, reason: &str| Error::Geometry { curve, reason: reason.into() };
        let outer_poly = outer.polygon(OUTLINE);
        let mut xs = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in &outer_poly {
            xs = (xs.0.min(p.re), xs.1.max(p.re), xs.2.min(p.im), xs.3.max(p.im));
        }
        let diameter = ((xs.1 - xs.0).powi(2) + (xs.3 - xs.2).powi(2)).sqrt();
        if !diameter.is_finite() || diameter == 0.0 {
            return Err(geo(0, "degenerate outer curve"));
        }
        let eps_geom = 1e-8 * diameter;

        let mut curves = vec![outer.clone()];
        curves.extend(holes_ccw.iter().map(|(c, _)| c.clone()));
        let mut polys = Vec::with_capacity(curves.len());
        for (idx, c) in curves.iter().enumerate() {
            if c.coeffs.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
                return Err(geo(idx, "non-finite coefficient"));
            }
            let min_speed = (0..OUTLINE)
                .map(|j| c.d1(2.0 * PI * j as f64 / OUTLINE as f64).norm())
                .fold(f64::INFINITY, f64::min);
            if min_speed < eps_geom {
                return Err(geo(idx, "degenerate parameterization (z' vanishes)"));
            }
            let poly = if idx == 0 { outer_poly.clone() } else { c.polygon(OUTLINE) };
            if signed_area(&poly) <= 0.0 {
                return Err(geo(idx, "curve must be given counterclockwise"));
            }
            if polygons_cross(&poly, &poly, true) {
                return Err(geo(idx, "curve is not simple"));
            }
            polys.push(poly);
        }
        for i in 0..polys.len() {
            for j in i + 1..polys.len() {
                if polygons_cross(&polys[i], &polys[j], false) {
                    return Err(geo(j, "curves intersect"));
                }
            }
        }
        for (h, (_, anchor)) in holes_ccw.iter().enumerate() {
            let idx = h + 1;
            if polygon_winding(&polys[0], polys[idx][0]) != 1 {
                return Err(geo(idx, "hole is not inside the outer curve"));
            }
            for (g, other) in polys.iter().enumerate().skip(1) {
                if g != idx && polygon_winding(other, polys[idx][0]) != 0 {
                    return Err(geo(idx, "holes are nested"));
                }
            }
            if polygon_winding(&polys[idx], *anchor) != 1 {
                return Err(geo(idx, "anchor is not inside its hole"));
            }
        }
        let mut holes = Vec::new();
        let mut anchors = Vec::new();
        for (c, a) in holes_ccw {
            holes.push(Curve { role: CurveRole::Hole, ..c }.reversed());
            anchors.push(a);
        }
        let outer = Curve { role: CurveRole::Outer, ..outer };
        let d = Domain { outer, holes, anchors, diameter, eps_geom };
        for (h, a) in d.anchors.iter().enumerate() {
            if d.distance_to_boundary(*a) < eps_geom {
                return Err(geo(h + 1, "anchor lies on the boundary"));
            }
        }
        Ok(d)
    }

    pub fn outer(&self) -> &Curve {
        &self.outer
    }

    /// Hole curves, clockwise.
    pub fn holes(&self) -> &[Curve] {
        &self.holes
    }

    pub fn anchors(&self) -> &[C64] {
        &self.anchors
    }

    /// `1 + number of holes`.
    pub fn connectivity(&self) -> usize {
        1 + self.holes.len()
    }

    /// All boundary curves in standard orientation, outer first.
    pub fn curves(&self) -> impl Iterator<Item = &Curve> {
        core::iter::once(&self.outer).chain(self.holes.iter())
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn eps_geom(&self) -> f64 {
        self.eps_geom
    }

    /// Bounding box `(xmin, xmax, ymin, ymax)` of the outer curve.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in self.outer.polygon(OUTLINE) {
            b = (b.0.min(p.re), b.1.max(p.re), b.2.min(p.im), b.3.max(p.im));
        }
        b
    }

    /// Distance from `p` to the boundary, refined by Newton on each curve.
    pub fn distance_to_boundary(&self, p: C64) -> f64 {
        let mut best = f64::INFINITY;
        for c in self.curves() {
            let mut bt = 0.0;
            let mut bd = f64::INFINITY;
            for j in 0..OUTLINE {
                let t = 2.0 * PI * j as f64 / OUTLINE as f64;
                let d = (c.eval(t) - p).norm();
                if d < bd {
                    bd = d;
                    bt = t;
                }
            }
            let mut t = bt;
            for _ in 0..20 {
                let r = c.eval(t) - p;
                let d1 = c.d1(t);
                let g = (r.conj() * d1).re;
                let h = d1.norm_sqr() + (r.conj() * c.d2(t)).re;
                if h <= 0.0 {
                    break;
                }
                let step = g / h;
                t -= step.clamp(-0.01, 0.01);
                if step.abs() < 1e-15 {
                    break;
                }
            }
            bd = bd.min((c.eval(t) - p).norm());
            best = best.min(bd);
        }
        best
    }

    /// Winding number of the oriented boundary about `p`.
    pub fn winding_number(&self, p: C64) -> Result<i64> {
        let mut total = 0.0;
        for c in self.curves() {
            let n = 256;
            for j in 0..n {
                let t0 = 2.0 * PI * j as f64 / n as f64;
                let t1 = 2.0 * PI * (j + 1) as f64 / n as f64;
                total += self.arg_increment(c, p, t0, t1, 0)?;
            }
        }
        Ok((total / (2.0 * PI)).round() as i64)
    }

    fn arg_increment(&self, c: &Curve, p: C64, t0: f64, t1: f64, depth: u32) -> Result<f64> {
        let (z0, z1) = (c.eval(t0) - p, c.eval(t1) - p);
        let (d0, d1) = (z0.norm(), z1.norm());
        if d0 < self.eps_geom || d1 < self.eps_geom {
            return Err(Error::Proximity { point: p, distance: d0.min(d1) });
        }
        let inc = (z1 / z0).arg();
        let chord = (z1 - z0).norm();
        if inc.abs() < 0.5 && chord < 0.5 * d0.min(d1) {
            return Ok(inc);
        }
        if depth > 60 {
            return Err(Error::Proximity { point: p, distance: d0.min(d1) });
        }
        let tm = 0.5 * (t0 + t1);
        Ok(self.arg_increment(c, p, t0, tm, depth + 1)? + self.arg_increment(c, p, tm, t1, depth + 1)?)
    }
}

/// Winding-number membership test.
pub fn contains(domain: &Domain, p: C64) -> Result<bool> {
    if !(p.re.is_finite() && p.im.is_finite()) {
        return Err(Error::InvalidParameter("non-finite point".into()));
    }
    let d = domain.distance_to_boundary(p);
    if d < domain.eps_geom {
        return Err(Error::Proximity { point: p, distance: d });
    }
    Ok(domain.winding_number(p)? == 1)
}

/// Catalog domains.
pub fn builtin_domain(name: &str, params: &[f64]) -> Result<Domain> {
    let bad = |msg: &str| Error::InvalidParameter(alloc::format!("{name}: {msg}"));
    let want = |n: usize| -> Result<()> {
        if params.len() == n {
            Ok(())
        } else {
            Err(bad(&alloc::format!("expected {n} parameter(s), got {}", params.len())))
        }
    };
    let unit = Curve::circle(ZERO, 1.0, CurveRole::Outer);
    match name {
        "disc" => {
            want(0)?;
            Domain::new(unit, vec![])
        }
        "ellipse" => {
            want(1)?;
            let b = params[0];
            if !(b > 0.0 && b.is_finite()) {
                return Err(bad("semi-axis must be positive"));
            }
            // cos t + i b sin t = ((1+b)/2) e^{it} + ((1-b)/2) e^{-it}
            Domain::new(Curve::new(vec![real((1.0 - b) / 2.0), ZERO, real((1.0 + b) / 2.0)], -1, CurveRole::Outer), vec![])
        }
        "annulus" => {
            want(1)?;
            let rho = params[0];
            if !(rho > 0.0 && rho < 1.0) {
                return Err(bad("need 0 < rho < 1"));
            }
            Domain::new(unit, vec![(Curve::circle(ZERO, rho, CurveRole::Hole), ZERO)])
        }
        "three_connected" => {
            want(2)?;
            let (r, s) = (params[0], params[1]);
            if !(r > 0.0 && s > r && s + r < 1.0) {
                return Err(bad("need 0 < r < s and r + s < 1"));
            }
            let h1 = Curve::circle(real(s), r, CurveRole::Hole);
            let h2 = Curve::circle(real(-s), r, CurveRole::Hole);
            Domain::new(unit, vec![(h1, real(s)), (h2, real(-s))])
        }
        other => Err(Error::UnknownDomain(other.into())),
    }
}

/// Boundary quadrature grid: `m` equispaced parameters per curve.
#[derive(Debug, Clone)]
pub struct BoundaryGrid {
    domain: Domain,
    m: usize,
    dt: f64,
    /// Parameter of each node.
    pub t: Vec<f64>,
    pub nodes: Vec<C64>,
    /// `z'(t_i)`.
    pub d1: Vec<C64>,
    /// `z''(t_i)`.
    pub d2: Vec<C64>,
    /// Unit tangents `z'/|z'|`.
    pub tangents: Vec<C64>,
    /// Arc-length weights `|z'| Δt`.
    pub weights: Vec<f64>,
    /// Complex weights `z' Δt`.
    pub dz: Vec<C64>,
    pub curve_index: Vec<usize>,
    diff: Vec<f64>,
}

/// Samples the boundary of `domain` at `m` parameters per curve.
pub fn sample_boundary(domain: &Domain, m: usize) -> Result<BoundaryGrid> {
    if m < 16 || !m.is_multiple_of(2) {
        return Err(Error::InvalidParameter(alloc::format!("nodes per curve must be even and >= 16, got {m}")));
    }
    let dt = 2.0 * PI / m as f64;
    let nc = domain.connectivity();
    let mut g = BoundaryGrid {
        domain: domain.clone(),
        m,
        dt,
        t: Vec::with_capacity(nc * m),
        nodes: Vec::with_capacity(nc * m),
        d1: Vec::with_capacity(nc * m),
        d2: Vec::with_capacity(nc * m),
        tangents: Vec::with_capacity(nc * m),
        weights: Vec::with_capacity(nc * m),
        dz: Vec::with_capacity(nc * m),
        curve_index: Vec::with_capacity(nc * m),
        diff: Vec::new(),
    };
    for (ci, c) in domain.curves().enumerate() {
        for j in 0..m {
            let t = j as f64 * dt;
            let d1 = c.d1(t);
            let speed = d1.norm();
            if speed < domain.eps_geom() {
                return Err(Error::Geometry { curve: ci, reason: alloc::format!("|z'| = {speed:e} at t = {t}") });
            }
            g.t.push(t);
            g.nodes.push(c.eval(t));
            g.d1.push(d1);
            g.d2.push(c.d2(t));
            g.tangents.push(d1 / speed);
            g.weights.push(speed * dt);
            g.dz.push(d1 * dt);
            g.curve_index.push(ci);
        }
    }
    // first column of the periodic spectral differentiation matrix
    g.diff = (0..m)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                0.5 * sign / (k as f64 * dt / 2.0).tan()
            }
        })
        .collect();
    let min_gap = g.nodes.windows(2).map(|w| (w[1] - w[0]).norm()).fold(f64::INFINITY, f64::min);
    if min_gap < domain.eps_geom() {
        return Err(Error::Geometry { curve: 0, reason: "coincident nodes".into() });
    }
    Ok(g)
}

impl BoundaryGrid {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Nodes per curve.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn curves(&self) -> usize {
        self.nodes.len() / self.m
    }

    /// Index range of curve `c`.
    pub fn curve_range(&self, c: usize) -> core::ops::Range<usize> {
        c * self.m..(c + 1) * self.m
    }

    /// Largest node spacing along any curve.
    pub fn spacing(&self) -> f64 {
        self.weights.iter().fold(0.0, |a, b| a.max(*b))
    }

    /// Spectral derivative in `t`, curve by curve.
    pub fn diff_t(&self, f: &[C64]) -> Vec<C64> {
        assert_eq!(f.len(), self.len());
        let m = self.m;
        let mut out = vec![ZERO; f.len()];
        for c in 0..self.curves() {
            let base = c * m;
            for i in 0..m {
                let mut s = ZERO;
                for j in 0..m {
                    let k = (i + m - j) % m;
                    if k != 0 {
                        s += f[base + j] * self.diff[k];
                    }
                }
                out[base + i] = s;
            }
        }
        out
    }

    /// Boundary trace of the complex derivative of a holomorphic function
    /// from its boundary samples: `(df/dt) / z'(t)`.
    pub fn diff_z(&self, f: &[C64]) -> Vec<C64> {
        self.diff_t(f).iter().zip(&self.d1).map(|(a, b)| a / b).collect()
    }

    /// Σ over a curve of the arc-length weights.
    pub fn curve_length(&self, c: usize) -> f64 {
        self.weights[self.curve_range(c)].iter().sum()
    }
}
