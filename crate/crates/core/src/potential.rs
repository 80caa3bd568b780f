//! Dirichlet problems, Green's function, harmonic measure, the Poisson
//! weight, the Bergman kernel `K` and the kernel `Λ`.
//!
//! Harmonic functions are represented as `u = Re Φ + Σ_k A_k log|z − c_k|`
//! where `Φ` is the Cauchy integral of a real double-layer density and the
//! `c_k` are the hole anchors. One LU factorization per grid serves every
//! right-hand side.

use crate::geometry::{contains, BoundaryGrid};
use crate::hardy::{check_interior, BoundaryFunction, Weight, WeightTag};
use crate::numerics::{CircleStencil, DenseMatrix, Lu};
use crate::prelude::*;

/// Tolerance on the boundary residual of a Dirichlet solve.
pub const DIRICHLET_TOL: f64 = 1e-7;

/// Factored double-layer system for one boundary grid.
#[derive(Debug, Clone)]
pub struct DirichletSolver {
    grid: Arc<BoundaryGrid>,
    lu: Lu<f64>,
}

/// Solution of a Dirichlet problem with real data.
#[derive(Debug, Clone)]
pub struct DirichletSolution {
    grid: Arc<BoundaryGrid>,
    /// Double-layer density on the grid.
    pub density: Vec<f64>,
    /// Coefficient of `log|z − c_k|` per hole.
    pub log_charges: Vec<f64>,
    pub boundary_data: Vec<f64>,
    phi: BoundaryFunction,
    phi_prime: BoundaryFunction,
    residual: f64,
}

impl DirichletSolver {
    pub fn new(grid: &Arc<BoundaryGrid>) -> Result<Self> {
        let g = grid;
        let n = g.len();
        let holes = g.curves() - 1;
        let dim = n + holes;
        let anchors = g.domain().anchors().to_vec();
        let mut a = DenseMatrix::<f64>::zeros(dim, dim);
        let inv2pi = 1.0 / (2.0 * PI);
        for i in 0..n {
            let zi = g.nodes[i];
            for j in 0..n {
                let k = if i == j {
                    (g.d2[i] / (g.d1[i] * 2.0)).im * g.dt() * inv2pi
                } else {
                    (g.dz[j] / (g.nodes[j] - zi)).im * inv2pi
                };
                a[(i, j)] = k;
            }
            a[(i, i)] += 0.5;
            for (h, c) in anchors.iter().enumerate() {
                a[(i, n + h)] = (zi - c).norm().ln();
            }
        }
        for h in 0..holes {
            let r = g.curve_range(h + 1);
            let len = g.curve_length(h + 1);
            for j in r {
                a[(n + h, j)] = g.weights[j] / len;
            }
        }
        let lu = Lu::factor(&a)?;
        Ok(DirichletSolver { grid: grid.clone(), lu })
    }

    pub fn grid(&self) -> &Arc<BoundaryGrid> {
        &self.grid
    }

    /// Harmonic function with the given boundary values.
    pub fn solve(&self, data: &[f64]) -> Result<DirichletSolution> {
        let g = &self.grid;
        let n = g.len();
        if data.len() != n {
            return Err(Error::GridMismatch);
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut rhs = data.to_vec();
        rhs.resize(self.lu.dim(), 0.0);
        let x = self.lu.solve(&rhs);
        let density = x[..n].to_vec();
        let log_charges = x[n..].to_vec();
        let mu = BoundaryFunction::new(g.clone(), density.iter().map(|v| real(*v)).collect())?;
        let phi = BoundaryFunction::new(g.clone(), mu.cauchy_trace())?;
        let phi_prime = phi.derivative();
        let mut sol = DirichletSolution {
            grid: g.clone(),
            density,
            log_charges,
            boundary_data: data.to_vec(),
            phi,
            phi_prime,
            residual: 0.0,
        };
        let scale = data.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let recon = sol.boundary_values();
        sol.residual = recon.iter().zip(data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        if !(sol.residual <= DIRICHLET_TOL) {
            return Err(Error::SolverResidual { residual: sol.residual });
        }
        Ok(sol)
    }

    /// Complex data, solved as two real problems.
    pub fn solve_complex(&self, data: &[C64]) -> Result<(DirichletSolution, DirichletSolution)> {
        let re: Vec<f64> = data.iter().map(|z| z.re).collect();
        let im: Vec<f64> = data.iter().map(|z| z.im).collect();
        Ok((self.solve(&re)?, self.solve(&im)?))
    }
}

/// Convenience wrapper: factor and solve once.
pub fn solve_dirichlet(grid: &Arc<BoundaryGrid>, boundary_data: &[f64]) -> Result<DirichletSolution> {
    DirichletSolver::new(grid)?.solve(boundary_data)
}

impl DirichletSolution {
    fn log_part(&self, z: C64) -> f64 {
        self.grid.domain().anchors().iter().zip(&self.log_charges).map(|(c, a)| a * (z - c).norm().ln()).sum()
    }

    fn log_dz(&self, z: C64) -> C64 {
        self.grid
            .domain()
            .anchors()
            .iter()
            .zip(&self.log_charges)
            .map(|(c, a)| real(*a) / ((z - c) * 2.0))
            .sum()
    }

    pub fn grid(&self) -> &Arc<BoundaryGrid> {
        &self.grid
    }

    /// Boundary values reconstructed from the representation.
    pub fn boundary_values(&self) -> Vec<f64> {
        self.phi.samples().iter().zip(&self.grid.nodes).map(|(p, z)| p.re + self.log_part(*z)).collect()
    }

    /// Relative boundary residual of the solve.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub(crate) fn value_raw(&self, z: C64) -> f64 {
        self.phi.eval_raw(z).re + self.log_part(z)
    }

    pub(crate) fn dz_raw(&self, z: C64) -> C64 {
        self.phi_prime.eval_raw(z) * 0.5 + self.log_dz(z)
    }

    /// `u(z)` at an interior point (clearance of one node spacing).
    pub fn eval(&self, z: C64) -> Result<f64> {
        check_interior(&self.grid, z, 1.0)?;
        Ok(self.value_raw(z))
    }

    /// `∂u/∂z` at an interior point.
    pub fn dz(&self, z: C64) -> Result<C64> {
        check_interior(&self.grid, z, 1.0)?;
        Ok(self.dz_raw(z))
    }

    /// Boundary trace of `∂u/∂z`.
    pub fn boundary_dz(&self) -> Vec<C64> {
        self.phi_prime.samples().iter().zip(&self.grid.nodes).map(|(p, z)| p * 0.5 + self.log_dz(*z)).collect()
    }
}

/// Green's function `G(·, w) = −log|z − w| + u_w`, `G ≥ 0`, `G = 0` on the
/// boundary.
#[derive(Debug, Clone)]
pub struct GreenFunction {
    pub w: C64,
    harmonic: DirichletSolution,
}

/// Green's function with pole `w`.
pub fn green(solver: &DirichletSolver, w: C64) -> Result<GreenFunction> {
    let g = solver.grid();
    if !contains(g.domain(), w)? {
        return Err(Error::PointNotInterior(w));
    }
    let data: Vec<f64> = g.nodes.iter().map(|z| (z - w).norm().ln()).collect();
    Ok(GreenFunction { w, harmonic: solver.solve(&data)? })
}

impl GreenFunction {
    pub fn value(&self, z: C64) -> Result<f64> {
        Ok(-(z - self.w).norm().ln() + self.harmonic.eval(z)?)
    }

    /// `∂G/∂z`.
    pub fn dz(&self, z: C64) -> Result<C64> {
        Ok(-ONE / ((z - self.w) * 2.0) + self.harmonic.dz(z)?)
    }

    /// Boundary trace of `∂G/∂z`.
    pub fn boundary_dz(&self) -> Vec<C64> {
        let g = &self.harmonic.grid;
        self.harmonic
            .boundary_dz()
            .iter()
            .zip(&g.nodes)
            .map(|(d, z)| d - ONE / ((z - self.w) * 2.0))
            .collect()
    }

    /// `∂G/∂n` along the outward normal `n = −iT`: `2 Re(n ∂G/∂z)`.
    pub fn outward_normal_derivative(&self) -> Vec<f64> {
        let g = &self.harmonic.grid;
        self.boundary_dz().iter().zip(&g.tangents).map(|(d, t)| 2.0 * (-I * t * d).re).collect()
    }

    pub fn harmonic_part(&self) -> &DirichletSolution {
        &self.harmonic
    }
}

/// Harmonic measure of one boundary curve.
#[derive(Debug, Clone)]
pub struct HarmonicMeasure {
    /// 1-based curve index (1 is the outer curve).
    pub j: usize,
    pub solution: DirichletSolution,
    /// `F_j' = ½ ∂ω_j/∂z` on the boundary.
    pub f_prime: BoundaryFunction,
}

/// `ω_j`: boundary values one on curve `j` (1-based), zero elsewhere.
pub fn harmonic_measure(solver: &DirichletSolver, j: usize) -> Result<HarmonicMeasure> {
    let g = solver.grid();
    if j == 0 || j > g.curves() {
        return Err(Error::InvalidParameter(alloc::format!("curve index {j} outside 1..={}", g.curves())));
    }
    let data: Vec<f64> = g.curve_index.iter().map(|c| if *c == j - 1 { 1.0 } else { 0.0 }).collect();
    let solution = solver.solve(&data)?;
    let f_prime = BoundaryFunction::new(g.clone(), solution.boundary_dz().iter().map(|d| d * 0.5).collect())?;
    Ok(HarmonicMeasure { j, solution, f_prime })
}

/// Poisson weight `p(A₀, z) = −(1/2π) ∂G(z, A₀)/∂n_out = (i/π) T ∂G/∂z`.
pub fn poisson_weight(solver: &DirichletSolver, a0: C64) -> Result<Weight> {
    let gf = green(solver, a0)?;
    let samples: Vec<f64> = gf.outward_normal_derivative().iter().map(|d| -d / (2.0 * PI)).collect();
    Weight::new(samples, WeightTag::Poisson(a0))
}

/// Stencil of Green's functions around `w` for the mixed second
/// derivatives that give `K(·, w)` and `Λ(·, w)`.
#[derive(Debug, Clone)]
pub struct KernelStencil {
    pub w: C64,
    stencil: CircleStencil,
    solutions: Vec<DirichletSolution>,
}

impl KernelStencil {
    /// Solves the Dirichlet problems for `log|ζ − w_k|` on a circle of
    /// radius a quarter of the boundary clearance of `w`.
    pub fn new(solver: &DirichletSolver, w: C64) -> Result<Self> {
        let g = solver.grid();
        if !contains(g.domain(), w)? {
            return Err(Error::PointNotInterior(w));
        }
        let clearance = g.domain().distance_to_boundary(w);
        let stencil = CircleStencil::new(crate::hardy::STENCIL_POINTS, clearance / 4.0);
        let solutions = stencil
            .nodes(w)
            .iter()
            .map(|p| {
                let data: Vec<f64> = g.nodes.iter().map(|z| (z - p).norm().ln()).collect();
                solver.solve(&data)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(KernelStencil { w, stencil, solutions })
    }

    fn check(&self, z: C64) -> Result<()> {
        check_interior(&self.solutions[0].grid, z, 1.0)?;
        if (z - self.w).norm() <= self.stencil.radius {
            return Err(Error::Separation(alloc::format!("|z - w| must exceed {:e}", self.stencil.radius)));
        }
        Ok(())
    }

    fn values(&self, z: C64) -> Vec<C64> {
        self.solutions.iter().map(|s| s.dz_raw(z)).collect()
    }

    /// `K(z, w) = −(2/π) ∂_w̄ ∂_z G(z, w)`.
    pub fn bergman(&self, z: C64) -> Result<C64> {
        self.check(z)?;
        Ok(self.stencil.d_anti(&self.values(z), 1) * (-2.0 / PI))
    }

    /// `Λ(z, w) = −(2/π) ∂_w ∂_z G(z, w)`.
    pub fn lambda(&self, z: C64) -> Result<C64> {
        self.check(z)?;
        let singular = ONE / ((z - self.w).powi(2) * PI);
        Ok(singular - self.stencil.d_holo(&self.values(z), 1) * (2.0 / PI))
    }

    /// `K(z_i, w)` and `Λ(z_i, w)` at every boundary node.
    pub fn boundary(&self) -> (Vec<C64>, Vec<C64>) {
        let traces: Vec<Vec<C64>> = self.solutions.iter().map(|s| s.boundary_dz()).collect();
        let g = &self.solutions[0].grid;
        let mut k = Vec::with_capacity(g.len());
        let mut l = Vec::with_capacity(g.len());
        let mut vals = vec![ZERO; self.stencil.points];
        for i in 0..g.len() {
            for (v, t) in vals.iter_mut().zip(&traces) {
                *v = t[i];
            }
            k.push(self.stencil.d_anti(&vals, 1) * (-2.0 / PI));
            l.push(ONE / ((g.nodes[i] - self.w).powi(2) * PI) - self.stencil.d_holo(&vals, 1) * (2.0 / PI));
        }
        (k, l)
    }
}

/// Bergman kernel `K(z, w)`.
pub fn bergman(solver: &DirichletSolver, z: C64, w: C64) -> Result<C64> {
    KernelStencil::new(solver, w)?.bergman(z)
}

/// `Λ(z, w)`.
pub fn lambda_capital(solver: &DirichletSolver, z: C64, w: C64) -> Result<C64> {
    KernelStencil::new(solver, w)?.lambda(z)
}
