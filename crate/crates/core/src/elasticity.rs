//! Quasi-static equilibrium `-div P(G, grad y) = 0` with `y = f` on the
//! clamped boundary and `P n = g` on the traction boundary.
//!
//! The unknown is the shifted displacement `u = y - f~`, where `f~` is a
//! discrete harmonic lifting of the Dirichlet data, so `u = 0` on the clamped
//! boundary. Three solvers are offered: the frozen-linearization (chord)
//! iteration with the stiffness assembled once at `u = 0`, full Newton, and a
//! hybrid that takes one frozen step before switching to Newton.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::assembly::{
    assemble_scalar_operator, assemble_vector_operator, vector_boundary_load, ScalarLoads,
    VectorLoads,
};
use crate::fem::fields::{cell_gradient, MatrixField, VectorField};
use crate::fem::quadrature::{barycentric_point, POINTS_PER_CELL, TRIANGLE_RULE};
use crate::fem::sparse::{
    free_map, norm2, restrict, smallest_eigenvalue_estimate, solve_sparse, SolverChoice,
    SparseSystem, SpdSolver,
};
use crate::mesh::{BoundaryFacet, ElasticTag, Mesh};
use crate::models::energy::EnergyModel;
use crate::parallel::map_indexed;
use crate::tensor::MatD;

pub type VectorFn = Arc<dyn Fn(&[f64; 2]) -> [f64; 2] + Send + Sync>;
/// Traction as a function of position and outward normal.
pub type TractionFn = Arc<dyn Fn(&[f64; 2], &[f64; 2]) -> [f64; 2] + Send + Sync>;
pub type MatrixPointFn = Arc<dyn Fn(&[f64; 2]) -> MatD + Send + Sync>;

/// How the growth tensor is evaluated at quadrature points.
#[derive(Clone)]
pub enum GrowthSampler {
    /// P1 interpolation of nodal values.
    Nodal(MatrixField),
    /// Direct evaluation, e.g. of an analytic gradient field.
    Analytic(MatrixPointFn),
}

#[derive(Clone, Copy, Debug)]
struct PointGrowth {
    g: MatD,
    inv: MatD,
    det: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    FixedPoint,
    Newton,
    Hybrid,
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fixed_point" => Ok(Self::FixedPoint),
            "newton" => Ok(Self::Newton),
            "hybrid" => Ok(Self::Hybrid),
            other => Err(format!(
                "unknown method `{other}` (expected fixed_point, newton or hybrid)"
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub method: Method,
    /// Increment tolerance relative to `1 + |f~|_inf`.
    pub tol_increment: f64,
    /// Residual tolerance relative to the largest stiffness diagonal entry.
    pub tol_residual: f64,
    pub max_iterations: usize,
    /// Energy backtracking in Newton.
    pub line_search: bool,
    /// Estimate the smallest eigenvalue of the frozen stiffness before iterating.
    pub check_coercivity: bool,
    pub linear_solver: SolverChoice,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: Method::FixedPoint,
            tol_increment: 1e-11,
            tol_residual: 1e-10,
            max_iterations: 50,
            line_search: true,
            check_coercivity: false,
            linear_solver: SolverChoice::Auto,
        }
    }
}

const LINEAR_TOL: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct EquilibriumSolution {
    pub displacement: VectorField,
    pub lifted: VectorField,
    pub iterations: usize,
    pub increment_history: Vec<f64>,
    pub residual_history: Vec<f64>,
    pub residual_norm: f64,
    /// Largest observed increment ratio; 0 with fewer than two increments.
    pub rho_hat: f64,
    pub method: Method,
}

impl EquilibriumSolution {
    /// `y = u + f~`.
    pub fn deformation(&self) -> VectorField {
        VectorField(
            self.displacement
                .0
                .iter()
                .zip(&self.lifted.0)
                .map(|(u, f)| [u[0] + f[0], u[1] + f[1]])
                .collect(),
        )
    }

    /// Successive increment ratios `|du_{k+1}| / |du_k|`.
    pub fn increment_ratios(&self) -> Vec<f64> {
        self.increment_history
            .windows(2)
            .map(|w| w[1] / w[0])
            .collect()
    }

    /// `k, increment_norm, residual_norm, rho_hat` per iteration.
    pub fn diagnostics_csv(&self) -> String {
        let mut out = String::from("k,increment_norm,residual_norm,rho_hat\n");
        let mut rho: f64 = 0.0;
        for (k, inc) in self.increment_history.iter().enumerate() {
            if k > 0 {
                rho = rho.max(inc / self.increment_history[k - 1]);
            }
            let res = self
                .residual_history
                .get(k + 1)
                .copied()
                .unwrap_or(f64::NAN);
            writeln!(out, "{},{:.16e},{:.16e},{:.16e}", k + 1, inc, res, rho).unwrap();
        }
        out
    }
}

/// Harmonic lifting `f~ = id + E(f - id)`: each component of `f - id` is
/// extended by a discrete Laplace solve with natural conditions on the
/// traction boundary. Clamped nodes take the exact values of `f`.
pub fn lift_dirichlet(mesh: &Mesh, f: &dyn Fn(&[f64; 2]) -> [f64; 2]) -> Result<VectorField> {
    let nodes = mesh.elastic_dirichlet_nodes();
    let uniform = |_: usize, _: usize, _: &[f64; 2]| Ok((MatD::identity(2), 0.0));
    let mut lifted = VectorField(mesh.vertices().to_vec());
    let data: Vec<[f64; 2]> = nodes.iter().map(|&v| f(&mesh.vertices()[v])).collect();
    for comp in 0..2 {
        let dir = nodes
            .iter()
            .zip(&data)
            .map(|(&v, d)| (v, d[comp] - mesh.vertices()[v][comp]))
            .collect();
        let sys = assemble_scalar_operator(mesh, &uniform, &ScalarLoads::default(), dir, None)?;
        let ext = solve_sparse(&sys, LINEAR_TOL)?;
        for (v, e) in ext.iter().enumerate() {
            lifted.0[v][comp] += e;
        }
    }
    for (&v, d) in nodes.iter().zip(&data) {
        lifted.0[v] = *d;
    }
    for c in 0..mesh.num_cells() {
        let det = cell_gradient(mesh, c, &lifted).det();
        if !(det > 0.0) {
            return Err(Error::LiftDegenerate { cell: c, det });
        }
    }
    Ok(lifted)
}

pub struct EquilibriumProblem {
    mesh: Arc<Mesh>,
    energy: Arc<dyn EnergyModel>,
    points: Vec<[PointGrowth; POINTS_PER_CELL]>,
    lifted: VectorField,
    load: Vec<f64>,
    free: Vec<usize>,
    free_of: Vec<Option<usize>>,
    options: SolverOptions,
}

impl EquilibriumProblem {
    pub fn new(
        mesh: Arc<Mesh>,
        energy: Arc<dyn EnergyModel>,
        growth: &GrowthSampler,
        dirichlet: &dyn Fn(&[f64; 2]) -> [f64; 2],
        traction: Option<&TractionFn>,
        options: SolverOptions,
    ) -> Result<Self> {
        if let GrowthSampler::Nodal(field) = growth {
            if field.0.len() != mesh.num_vertices() {
                return Err(Error::Validation(vec![format!(
                    "growth field has {} values for {} vertices",
                    field.0.len(),
                    mesh.num_vertices()
                )]));
            }
            if let Some(v) = field.0.iter().position(|g| !(g.det() > 0.0)) {
                return Err(Error::Validation(vec![format!("det G <= 0 at node {v}")]));
            }
        }
        let points = (0..mesh.num_cells())
            .map(|c| {
                let pts = mesh.cell_points(c);
                let mut out = [PointGrowth {
                    g: MatD::identity(2),
                    inv: MatD::identity(2),
                    det: 1.0,
                }; POINTS_PER_CELL];
                for (q, (lambda, _)) in TRIANGLE_RULE.iter().enumerate() {
                    let g = match growth {
                        GrowthSampler::Nodal(field) => field.at(&mesh, c, lambda),
                        GrowthSampler::Analytic(f) => f(&barycentric_point(&pts, lambda)),
                    };
                    let det = g.require_positive_det()?;
                    out[q] = PointGrowth {
                        g,
                        inv: g.invert()?,
                        det,
                    };
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        let lifted = lift_dirichlet(&mesh, dirichlet)?;
        let load = match traction {
            Some(t) => {
                let g = |f: &BoundaryFacet, x: &[f64; 2]| match f.elastic {
                    ElasticTag::Neumann => t(x, &f.normal),
                    ElasticTag::Dirichlet => [0.0, 0.0],
                };
                vector_boundary_load(&mesh, &g)
            }
            None => vec![0.0; 2 * mesh.num_vertices()],
        };
        let fixed: Vec<usize> = mesh
            .elastic_dirichlet_nodes()
            .iter()
            .flat_map(|&v| [2 * v, 2 * v + 1])
            .collect();
        let (free, free_of) = free_map(2 * mesh.num_vertices(), &fixed);
        Ok(Self {
            mesh,
            energy,
            points,
            lifted,
            load,
            free,
            free_of,
            options,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn lifted(&self) -> &VectorField {
        &self.lifted
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn options_mut(&mut self) -> &mut SolverOptions {
        &mut self.options
    }

    pub fn num_free(&self) -> usize {
        self.free.len()
    }

    /// Growth tensor at quadrature point `q` of cell `c`.
    pub fn growth_at(&self, c: usize, q: usize) -> MatD {
        self.points[c][q].g
    }

    /// Cellwise `grad y` for `y = u + f~`.
    pub fn deformation_gradients(&self, u: &VectorField) -> Vec<MatD> {
        (0..self.mesh.num_cells())
            .map(|c| cell_gradient(&self.mesh, c, u) + cell_gradient(&self.mesh, c, &self.lifted))
            .collect()
    }

    /// Elastic parts `grad y G^-1` at all quadrature points, after checking
    /// that every one lies in the admissible ball.
    fn elastic_states(&self, u: &VectorField) -> Result<Vec<[MatD; POINTS_PER_CELL]>> {
        let radius = self.energy.admissible_radius();
        let mut worst = (0.0, 0);
        let states: Vec<[MatD; POINTS_PER_CELL]> = self
            .deformation_gradients(u)
            .iter()
            .enumerate()
            .map(|(c, y)| {
                let mut out = [MatD::identity(2); POINTS_PER_CELL];
                for (q, p) in self.points[c].iter().enumerate() {
                    out[q] = *y * p.inv;
                    let dist = (out[q] - MatD::identity(2)).norm_inf();
                    if !(dist <= worst.0) {
                        worst = (dist, c);
                    }
                }
                out
            })
            .collect();
        if !(worst.0 < radius) {
            return Err(Error::OutsideAdmissibleBall {
                cell: Some(worst.1),
                distance: worst.0,
                radius,
            });
        }
        Ok(states)
    }

    fn check_len(&self, u: &VectorField) -> Result<()> {
        if u.0.len() != self.mesh.num_vertices() {
            return Err(Error::Validation(vec![format!(
                "displacement has {} values for {} vertices",
                u.0.len(),
                self.mesh.num_vertices()
            )]));
        }
        Ok(())
    }

    /// First Piola stress at every quadrature point.
    pub fn stresses(&self, u: &VectorField) -> Result<Vec<[MatD; POINTS_PER_CELL]>> {
        self.check_len(u)?;
        let states = self.elastic_states(u)?;
        map_indexed(self.mesh.num_cells(), |c| {
            let pts = self.mesh.cell_points(c);
            let mut out = [MatD::zeros(2); POINTS_PER_CELL];
            for (q, (lambda, _)) in TRIANGLE_RULE.iter().enumerate() {
                let p = &self.points[c][q];
                let x = barycentric_point(&pts, lambda);
                out[q] =
                    self.energy.first_derivative(&x, &states[c][q])? * p.inv.transpose() * p.det;
            }
            Ok(out)
        })
        .into_iter()
        .collect()
    }

    /// Largest Frobenius norm of the stress over the quadrature points of each cell.
    pub fn cell_stress_norms(&self, u: &VectorField) -> Result<Vec<f64>> {
        Ok(self
            .stresses(u)?
            .iter()
            .map(|ps| ps.iter().map(MatD::frobenius_norm).fold(0.0, f64::max))
            .collect())
    }

    /// Weak residual `int P : grad v - int_N g . v` for every DOF; entries of
    /// clamped DOFs are zeroed. The norm is Euclidean over free DOFs.
    pub fn residual(&self, u: &VectorField) -> Result<(Vec<f64>, f64)> {
        let stresses = self.stresses(u)?;
        let mut r: Vec<f64> = self.load.iter().map(|l| -l).collect();
        for (c, ps) in stresses.iter().enumerate() {
            let cell = self.mesh.cells()[c];
            let grads = self.mesh.shape_gradients(c);
            let area = self.mesh.cell_area(c);
            for (q, (_, w)) in TRIANGLE_RULE.iter().enumerate() {
                let p = &ps[q];
                for a in 0..3 {
                    for i in 0..2 {
                        r[2 * cell[a] + i] +=
                            w * area * (p[(i, 0)] * grads[a][0] + p[(i, 1)] * grads[a][1]);
                    }
                }
            }
        }
        for (i, fo) in self.free_of.iter().enumerate() {
            if fo.is_none() {
                r[i] = 0.0;
            }
        }
        let norm = norm2(&r);
        Ok((r, norm))
    }

    /// Tangent stiffness at `u` with homogeneous constraints on the clamped DOFs.
    pub fn stiffness(&self, u: &VectorField) -> Result<SparseSystem> {
        let states = self.elastic_states(u)?;
        let coeff = |c: usize, q: usize, x: &[f64; 2]| {
            let p = &self.points[c][q];
            Ok(self
                .energy
                .second_derivative(x, &states[c][q])?
                .pull_back(&p.inv, p.det))
        };
        let fixed = self
            .free_of
            .iter()
            .enumerate()
            .filter(|(_, f)| f.is_none())
            .map(|(i, _)| (i, 0.0))
            .collect();
        assemble_vector_operator(&self.mesh, &coeff, &VectorLoads::default(), fixed)
    }

    /// The frozen linearization: stiffness at `u = 0`.
    pub fn assemble_linearized_at_zero(&self) -> Result<SparseSystem> {
        let sys = self.stiffness(&VectorField::zeros(self.mesh.num_vertices()))?;
        if self.options.check_coercivity {
            let lmin = smallest_eigenvalue_estimate(&sys, 500)?;
            if lmin <= 0.0 {
                return Err(Error::EllipticityViolation {
                    value: lmin,
                    nu: 0.0,
                });
            }
        }
        Ok(sys)
    }

    fn factor(&self, sys: &SparseSystem) -> Result<(SpdSolver, f64)> {
        let reduced = restrict(&sys.matrix, &self.free_of, self.free.len());
        let scale = reduced
            .diagonal()
            .iter()
            .fold(0.0, |m: f64, d| m.max(d.abs()));
        Ok((
            SpdSolver::new(reduced, self.options.linear_solver, LINEAR_TOL)?,
            scale,
        ))
    }

    /// Reusable frozen map `u -> u - L^-1 residual(u)`.
    pub fn frozen_map(&self) -> Result<FrozenMap<'_>> {
        let (solver, scale) = self.factor(&self.assemble_linearized_at_zero()?)?;
        Ok(FrozenMap {
            problem: self,
            solver,
            scale,
        })
    }

    fn solve_free(&self, solver: &SpdSolver, r: &[f64]) -> Result<Vec<f64>> {
        let rf: Vec<f64> = self.free.iter().map(|&i| r[i]).collect();
        let df = solver.solve(&rf)?;
        let mut d = vec![0.0; r.len()];
        for (k, &i) in self.free.iter().enumerate() {
            d[i] = df[k];
        }
        Ok(d)
    }

    fn tolerances(&self, scale: f64) -> (f64, f64) {
        (
            self.options.tol_increment * (1.0 + self.lifted.norm_inf()),
            self.options.tol_residual * scale,
        )
    }

    fn start(&self, initial: Option<&VectorField>) -> Result<Vec<f64>> {
        let mut u = match initial {
            Some(u0) => {
                self.check_len(u0)?;
                u0.to_flat()
            }
            None => vec![0.0; 2 * self.mesh.num_vertices()],
        };
        for (i, fo) in self.free_of.iter().enumerate() {
            if fo.is_none() {
                u[i] = 0.0;
            }
        }
        Ok(u)
    }

    /// Dispatches on the configured method.
    pub fn solve(&self, initial: Option<&VectorField>) -> Result<EquilibriumSolution> {
        match self.options.method {
            Method::FixedPoint => self.solve_fixed_point(initial),
            Method::Newton => self.solve_newton(initial),
            Method::Hybrid => self.solve_hybrid(initial),
        }
    }

    /// Chord iteration with the stiffness frozen at `u = 0`.
    pub fn solve_fixed_point(&self, initial: Option<&VectorField>) -> Result<EquilibriumSolution> {
        let map = self.frozen_map()?;
        let mut u = self.start(initial)?;
        let (tol_inc, tol_res) = self.tolerances(map.scale);
        let mut res = self.residual(&VectorField::from_flat(&u))?;
        let mut log = IterationLog::new(res.1);
        let mut above = 0;
        for k in 0..self.options.max_iterations {
            let du = self.solve_free(&map.solver, &res.0)?;
            for (ui, d) in u.iter_mut().zip(&du) {
                *ui -= d;
            }
            let inc = du.iter().fold(0.0, |m: f64, d| m.max(d.abs()));
            res = self.residual(&VectorField::from_flat(&u))?;
            let ratio = log.push(inc, res.1, tol_inc);
            if inc <= tol_inc && res.1 <= tol_res {
                return Ok(log.finish(self, u, k + 1, Method::FixedPoint));
            }
            above = if ratio.is_some_and(|r| r >= 1.0) {
                above + 1
            } else {
                0
            };
            if above >= 3 {
                return Err(Error::ContractionLost {
                    iteration: k + 1,
                    ratio: ratio.unwrap(),
                });
            }
        }
        Err(Error::NoConvergence {
            iterations: self.options.max_iterations,
            norm: res.1,
        })
    }

    /// Newton with the tangent reassembled every step.
    pub fn solve_newton(&self, initial: Option<&VectorField>) -> Result<EquilibriumSolution> {
        let u = self.start(initial)?;
        self.newton_from(u, IterationLog::new(f64::NAN), 0, Method::Newton)
    }

    /// One frozen step, then Newton.
    pub fn solve_hybrid(&self, initial: Option<&VectorField>) -> Result<EquilibriumSolution> {
        let map = self.frozen_map()?;
        let (tol_inc, tol_res) = self.tolerances(map.scale);
        let mut u = self.start(initial)?;
        let res = self.residual(&VectorField::from_flat(&u))?;
        let mut log = IterationLog::new(res.1);
        if res.1 <= tol_res {
            return Ok(log.finish(self, u, 0, Method::Hybrid));
        }
        let du = self.solve_free(&map.solver, &res.0)?;
        for (ui, d) in u.iter_mut().zip(&du) {
            *ui -= d;
        }
        let inc = du.iter().fold(0.0, |m: f64, d| m.max(d.abs()));
        let res = self.residual(&VectorField::from_flat(&u))?;
        log.push(inc, res.1, tol_inc);
        if inc <= tol_inc && res.1 <= tol_res {
            return Ok(log.finish(self, u, 1, Method::Hybrid));
        }
        self.newton_from(u, log, 1, Method::Hybrid)
    }

    fn newton_from(
        &self,
        mut u: Vec<f64>,
        mut log: IterationLog,
        done: usize,
        method: Method,
    ) -> Result<EquilibriumSolution> {
        let mut field = VectorField::from_flat(&u);
        let mut res = self.residual(&field)?;
        if log.residuals.len() == 1 && log.residuals[0].is_nan() {
            log.residuals[0] = res.1;
        }
        let mut jac = self.stiffness(&field)?;
        let scale = restrict(&jac.matrix, &self.free_of, self.free.len())
            .diagonal()
            .iter()
            .fold(0.0, |m: f64, d| m.max(d.abs()));
        let (tol_inc, tol_res) = self.tolerances(scale);
        let mut last_inc = if done == 0 {
            0.0
        } else {
            *log.increments.last().unwrap()
        };
        for k in done..self.options.max_iterations {
            if res.1 <= tol_res && last_inc <= tol_inc {
                return Ok(log.finish(self, u, k, method));
            }
            if k > done {
                jac = self.stiffness(&field)?;
            }
            let (solver, _) = self.factor(&jac).map_err(|e| match e {
                Error::SingularSystem(m) => Error::SingularJacobian(m),
                other => other,
            })?;
            let du = self.solve_free(&solver, &res.0).map_err(|e| match e {
                Error::SingularSystem(m) => Error::SingularJacobian(m),
                other => other,
            })?;
            let mut alpha = 1.0;
            let mut trial: Vec<f64>;
            if self.options.line_search {
                let e0 = self.total_energy(&field)?;
                let mut tries = 0;
                loop {
                    trial = u.iter().zip(&du).map(|(ui, d)| ui - alpha * d).collect();
                    let ok = self
                        .total_energy(&VectorField::from_flat(&trial))
                        .is_ok_and(|e| e <= e0 + 1e-12 * (1.0 + e0.abs()));
                    tries += 1;
                    if ok || tries >= 12 {
                        break;
                    }
                    alpha *= 0.5;
                }
            } else {
                trial = u.iter().zip(&du).map(|(ui, d)| ui - d).collect();
            }
            u = trial;
            field = VectorField::from_flat(&u);
            last_inc = du.iter().fold(0.0, |m: f64, d| m.max((alpha * d).abs()));
            res = self.residual(&field)?;
            log.push(last_inc, res.1, tol_inc);
        }
        if res.1 <= tol_res && last_inc <= tol_inc {
            return Ok(log.finish(self, u, self.options.max_iterations, method));
        }
        Err(Error::NoConvergence {
            iterations: self.options.max_iterations,
            norm: res.1,
        })
    }

    /// `E_G(y) = int W(grad y G^-1) det G dx`.
    pub fn elastic_energy(&self, u: &VectorField) -> Result<f64> {
        self.check_len(u)?;
        let states = self.elastic_states(u)?;
        let parts = map_indexed(self.mesh.num_cells(), |c| -> Result<f64> {
            let pts = self.mesh.cell_points(c);
            let area = self.mesh.cell_area(c);
            let mut e = 0.0;
            for (q, (lambda, w)) in TRIANGLE_RULE.iter().enumerate() {
                let x = barycentric_point(&pts, lambda);
                e += w * area * self.points[c][q].det * self.energy.energy(&x, &states[c][q])?;
            }
            Ok(e)
        });
        parts.into_iter().sum()
    }

    /// Elastic energy minus the work of the (dead) traction load.
    pub fn total_energy(&self, u: &VectorField) -> Result<f64> {
        let work: f64 = self.load.iter().zip(u.to_flat()).map(|(l, v)| l * v).sum();
        Ok(self.elastic_energy(u)? - work)
    }
}

/// The frozen map with its factored stiffness.
pub struct FrozenMap<'a> {
    problem: &'a EquilibriumProblem,
    solver: SpdSolver,
    scale: f64,
}

impl FrozenMap<'_> {
    pub fn apply(&self, u: &VectorField) -> Result<VectorField> {
        let (r, _) = self.problem.residual(u)?;
        let du = self.problem.solve_free(&self.solver, &r)?;
        let mut out = self.problem.start(Some(u))?;
        for (o, d) in out.iter_mut().zip(du) {
            *o -= d;
        }
        Ok(VectorField::from_flat(&out))
    }

    /// Largest diagonal entry of the frozen stiffness on free DOFs.
    pub fn scale(&self) -> f64 {
        self.scale
    }
}

struct IterationLog {
    increments: Vec<f64>,
    residuals: Vec<f64>,
    rho_hat: f64,
}

impl IterationLog {
    fn new(initial_residual: f64) -> Self {
        Self {
            increments: Vec::new(),
            residuals: vec![initial_residual],
            rho_hat: 0.0,
        }
    }

    /// Records an iteration; returns the increment ratio when the previous
    /// increment was above the round-off floor `tol_inc`.
    fn push(&mut self, inc: f64, res: f64, tol_inc: f64) -> Option<f64> {
        let ratio = self
            .increments
            .last()
            .filter(|&&prev| prev > tol_inc)
            .map(|prev| inc / prev);
        if let Some(r) = ratio {
            self.rho_hat = self.rho_hat.max(r);
        }
        self.increments.push(inc);
        self.residuals.push(res);
        ratio
    }

    fn finish(
        self,
        p: &EquilibriumProblem,
        u: Vec<f64>,
        iterations: usize,
        method: Method,
    ) -> EquilibriumSolution {
        EquilibriumSolution {
            displacement: VectorField::from_flat(&u),
            lifted: p.lifted.clone(),
            iterations,
            residual_norm: *self.residuals.last().unwrap(),
            increment_history: self.increments,
            residual_history: self.residuals,
            rho_hat: self.rho_hat,
            method,
        }
    }
}
