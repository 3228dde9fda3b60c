//! Quasi-static coupled loop: equilibrium, nutrient, then one growth step.

use std::sync::Arc;

use crate::elasticity::{EquilibriumProblem, EquilibriumSolution, GrowthSampler, SolverOptions};
use crate::error::{Error, Result};
use crate::fem::fields::{nodal_gradient, MatrixField, ScalarField, VectorField};
use crate::integrator::{
    det_guard, growth_gradient_surrogate, ode_step_rk4, picard_step_control, rk4_field_step,
    GuardConfig, RateEstimator,
};
use crate::mesh::Mesh;
use crate::models::energy::EnergyModel;
use crate::models::growth::GrowthLaw;
use crate::models::nutrient::NutrientModel;
use crate::nutrient_solver::{solve_nutrient, NutrientProblem};
use crate::scenario::{Coupling, GrowthConfig, Scenario};

/// Fields at one instant. `deformation` is `y`.
#[derive(Clone, Debug)]
pub struct SystemState {
    pub t: f64,
    pub growth: MatrixField,
    pub deformation: VectorField,
    pub nutrient: ScalarField,
    /// Largest Frobenius stress norm over the quadrature points of each cell.
    pub cell_stress: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub min_det_g: f64,
    pub max_norm_g: f64,
    pub max_stress: f64,
    pub nutrient_min: f64,
    pub equilibrium_iters: usize,
    pub rho_hat: f64,
    pub equilibrium_residual: f64,
    pub nutrient_residual: f64,
    pub growth_gradient: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    Completed,
    Guard {
        t: f64,
        reason: String,
    },
    SolverFailure {
        step: usize,
        t: f64,
        message: String,
    },
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub diagnostics: Vec<StepDiagnostics>,
    /// Stored states, in time order (see [`RunOptions::store_every`]).
    pub states: Vec<SystemState>,
    pub termination: Termination,
    /// Last accepted state when the run stopped early.
    pub failed_state: Option<SystemState>,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }

    pub fn last_state(&self) -> Option<&SystemState> {
        self.states.last()
    }

    /// The termination cause as an error, `Ok` for a completed run.
    pub fn into_result(self) -> Result<Self> {
        match &self.termination {
            Termination::Completed => Ok(self),
            Termination::Guard { t, reason } => Err(Error::GuardViolation {
                t: *t,
                reason: reason.clone(),
            }),
            Termination::SolverFailure { step, t, message } => {
                Err(Error::Validation(vec![format!(
                    "solver failure at step {step} (t = {t}): {message}"
                )]))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Store every `k`-th state (0 keeps only the final one).
    pub store_every: usize,
    pub warm_start: bool,
    /// Called after each accepted step.
    pub verbose: bool,
}

impl RunOptions {
    pub fn for_scenario(s: &Scenario) -> Self {
        Self {
            store_every: s.output.snapshot_every,
            warm_start: s.warm_start,
            verbose: false,
        }
    }
}

/// Solved fields for a given growth tensor and time.
struct Solved {
    equilibrium: EquilibriumSolution,
    deformation: VectorField,
    y_nodal: MatrixField,
    nutrient: ScalarField,
    nutrient_min: f64,
    nutrient_residual: f64,
    cell_stress: Vec<f64>,
    warnings: Vec<String>,
}

struct Context<'a> {
    scenario: &'a Scenario,
    mesh: Arc<Mesh>,
    energy: Arc<dyn EnergyModel>,
    nutrient: Arc<dyn NutrientModel>,
    law: Arc<dyn GrowthLaw>,
    options: SolverOptions,
    /// Quadrature sampler used while the growth tensor is `G0`.
    g0_analytic: Option<GrowthSampler>,
}

impl Context<'_> {
    fn sampler(&self, g: &MatrixField, initial: bool) -> GrowthSampler {
        match (&self.g0_analytic, initial) {
            (Some(s), true) => s.clone(),
            _ => GrowthSampler::Nodal(g.clone()),
        }
    }

    fn solve(
        &self,
        t: f64,
        g: &MatrixField,
        initial: bool,
        warm: Option<&VectorField>,
    ) -> Result<Solved> {
        let sampler = self.sampler(g, initial);
        let dirichlet = self.scenario.dirichlet_at(t);
        let traction = self.scenario.traction_at(t);
        let problem = EquilibriumProblem::new(
            self.mesh.clone(),
            self.energy.clone(),
            &sampler,
            &dirichlet,
            traction.as_ref(),
            self.options.clone(),
        )?;
        // Warm start: previous y expressed against the new lifting.
        let start = warm.map(|y| {
            VectorField(
                y.0.iter()
                    .zip(&problem.lifted().0)
                    .map(|(y, f)| [y[0] - f[0], y[1] - f[1]])
                    .collect(),
            )
        });
        let equilibrium = problem.solve(start.as_ref())?;
        let deformation = equilibrium.deformation();
        let cell_stress = problem.cell_stress_norms(&equilibrium.displacement)?;
        let y_nodal = nodal_gradient(
            &self.mesh,
            &problem.deformation_gradients(&equilibrium.displacement),
        );
        let nutrient = solve_nutrient(&NutrientProblem {
            mesh: self.mesh.clone(),
            model: self.nutrient.clone(),
            growth: sampler,
            deformation: deformation.clone(),
            dirichlet: self.scenario.nutrient_dirichlet_at(t),
            flux: self.scenario.nutrient_flux_at(t),
        })?;
        Ok(Solved {
            equilibrium,
            deformation,
            y_nodal,
            nutrient_min: nutrient.min_value,
            nutrient_residual: nutrient.residual_norm,
            nutrient: nutrient.values,
            cell_stress,
            warnings: nutrient.warnings,
        })
    }

    fn rates(&self, g: &MatrixField, y: &MatrixField, n: &ScalarField) -> Result<MatrixField> {
        let verts = self.mesh.vertices();
        (0..g.0.len())
            .map(|i| self.law.evaluate(&g.0[i], &y.0[i], n.0[i], &verts[i]))
            .collect::<Result<Vec<_>>>()
            .map(MatrixField)
    }
}

/// Runs a scenario on its own mesh with options taken from the scenario.
pub fn run_coupled(scenario: &Scenario) -> Result<Trajectory> {
    let mesh = Arc::new(scenario.build_mesh()?);
    run_coupled_with(scenario, mesh, &RunOptions::for_scenario(scenario))
}

/// The coupled loop. Setup problems are returned as errors; failures during
/// time stepping end the trajectory with the recorded cause.
pub fn run_coupled_with(
    scenario: &Scenario,
    mesh: Arc<Mesh>,
    run: &RunOptions,
) -> Result<Trajectory> {
    let g0 = scenario.g0_field(&mesh);
    let guard = scenario.guard_config(&g0);
    let ctx = Context {
        scenario,
        energy: scenario.energy_model(),
        nutrient: scenario.nutrient_model(),
        law: scenario.growth_law(),
        options: scenario.solver.clone(),
        g0_analytic: scenario.g0_analytic_sampler(),
        mesh,
    };
    let static_growth = matches!(scenario.growth, GrowthConfig::None);
    let grid = scenario.time;

    let mut traj = Trajectory {
        diagnostics: Vec::new(),
        states: Vec::new(),
        termination: Termination::Completed,
        failed_state: None,
    };
    let t0 = grid.t0;
    let report = det_guard(&g0, &guard, t0)?;
    let mut solved = ctx.solve(t0, &g0, true, None)?;
    let mut g = g0;
    let mut t = t0;
    let mut step = 0usize;
    let mut estimator = RateEstimator::default();
    let mut dt_used = 0.0;
    let mut report = report;
    let times = grid.times();

    loop {
        let state = SystemState {
            t,
            growth: g.clone(),
            deformation: solved.deformation.clone(),
            nutrient: solved.nutrient.clone(),
            cell_stress: solved.cell_stress.clone(),
        };
        let diag = StepDiagnostics {
            step,
            t,
            dt: dt_used,
            min_det_g: report.min_det,
            max_norm_g: report.max_norm,
            max_stress: state.cell_stress.iter().copied().fold(0.0, f64::max),
            nutrient_min: solved.nutrient_min,
            equilibrium_iters: solved.equilibrium.iterations,
            rho_hat: solved.equilibrium.rho_hat,
            equilibrium_residual: solved.equilibrium.residual_norm,
            nutrient_residual: solved.nutrient_residual,
            growth_gradient: growth_gradient_surrogate(&ctx.mesh, &g),
            warnings: solved.warnings.clone(),
        };
        if run.verbose {
            eprintln!(
                "step {step:>5}  t = {t:.6}  min det G = {:.6e}  max |P| = {:.3e}  iters = {}",
                diag.min_det_g, diag.max_stress, diag.equilibrium_iters
            );
        }
        traj.diagnostics.push(diag);

        let done = t >= grid.t_end;
        let keep = done || (run.store_every > 0 && step.is_multiple_of(run.store_every));
        if done {
            traj.states.push(state);
            return Ok(traj);
        }

        // Next step size.
        let mut dt = if grid.adaptive {
            grid.dt
        } else {
            times.get(step + 1).map_or(grid.t_end - t, |tn| tn - t)
        };
        let rhs0 = match ctx.rates(&g, &solved.y_nodal, &solved.nutrient) {
            Ok(r) => r,
            Err(e) => return Ok(fail(traj, state, step, t, e)),
        };
        estimator.record(&g, &rhs0);
        if grid.adaptive {
            dt = picard_step_control(
                estimator.k_hat,
                estimator.m_hat,
                ctx.energy.admissible_radius(),
                dt,
            )
            .min(grid.t_end - t);
        }
        if let Some(budget) = guard.contraction_budget {
            if estimator.k_hat * dt > budget {
                traj.termination = Termination::Guard {
                    t,
                    reason: format!(
                        "K dt = {:e} exceeds the contraction budget {budget:e}",
                        estimator.k_hat * dt
                    ),
                };
                traj.failed_state = Some(state.clone());
                traj.states.push(state);
                return Ok(traj);
            }
        }

        let advanced = if static_growth {
            Ok(g.clone())
        } else {
            advance(&ctx, &guard, &g, &solved, t, dt, run.warm_start)
        };
        let g_new = match advanced {
            Ok(g_new) => g_new,
            Err(e) => return Ok(fail(traj, state, step, t, e)),
        };
        let t_new = if grid.adaptive || step + 1 >= times.len() {
            t + dt
        } else {
            times[step + 1]
        };
        let t_new = if (t_new - grid.t_end).abs() <= 1e-12 * grid.dt {
            grid.t_end
        } else {
            t_new
        };
        let warm = run.warm_start.then_some(&solved.deformation);
        let next = det_guard(&g_new, &guard, t_new)
            .and_then(|r| Ok((r, ctx.solve(t_new, &g_new, static_growth, warm)?)));
        match next {
            Ok((r, s)) => {
                report = r;
                solved = s;
            }
            Err(e) => return Ok(fail(traj, state, step + 1, t_new, e)),
        }
        if keep {
            traj.states.push(state);
        }
        g = g_new;
        t = t_new;
        dt_used = dt;
        step += 1;
    }
}

fn fail(mut traj: Trajectory, state: SystemState, step: usize, t: f64, e: Error) -> Trajectory {
    traj.termination = match e {
        Error::GuardViolation { t, reason } => Termination::Guard { t, reason },
        other => Termination::SolverFailure {
            step,
            t,
            message: other.to_string(),
        },
    };
    traj.failed_state = Some(state.clone());
    if traj.states.last().is_none_or(|s| s.t < state.t) {
        traj.states.push(state);
    }
    traj
}

/// One guarded RK4 step of the growth tensor.
fn advance(
    ctx: &Context<'_>,
    guard: &GuardConfig,
    g: &MatrixField,
    solved: &Solved,
    t: f64,
    dt: f64,
    warm_start: bool,
) -> Result<MatrixField> {
    match ctx.scenario.coupling {
        Coupling::Staggered => {
            let verts = ctx.mesh.vertices();
            let (y, n) = (&solved.y_nodal, &solved.nutrient);
            ode_step_rk4(g, t, dt, Some(guard), &|i, _, gi| {
                ctx.law.evaluate(gi, &y.0[i], n.0[i], &verts[i])
            })
        }
        Coupling::Stages => {
            let mut first = true;
            let mut warm = solved.deformation.clone();
            rk4_field_step(g, t, dt, Some(guard), |ts, gs| {
                if first {
                    first = false;
                    return ctx.rates(gs, &solved.y_nodal, &solved.nutrient);
                }
                let s = ctx.solve(ts, gs, false, warm_start.then_some(&warm))?;
                let r = ctx.rates(gs, &s.y_nodal, &s.nutrient)?;
                warm = s.deformation;
                Ok(r)
            })
        }
    }
}
