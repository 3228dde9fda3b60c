//! Built-in scenarios with closed-form or convergence-rate targets.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use crate::elasticity::{EquilibriumProblem, Method};
use crate::error::{Error, Result};
use crate::fem::fields::MatrixField;
use crate::fem::quadrature::{barycentric_point, TRIANGLE_RULE};
use crate::integrator::ode_step_rk4;
use crate::mesh::Mesh;
use crate::models::growth::{GrowthLaw, MultiplicativeGrowth};
use crate::scenario::{parse_scenario, Scenario};
use crate::sim::{run_coupled_with, RunOptions, Trajectory};
use crate::tensor::MatD;

pub const SCENARIOS: [(&str, &str); 6] = [
    (
        "stress_free_reference",
        include_str!("../scenarios/stress_free_reference.cfg"),
    ),
    (
        "analytic_growth",
        include_str!("../scenarios/analytic_growth.cfg"),
    ),
    (
        "compatible_growth",
        include_str!("../scenarios/compatible_growth.cfg"),
    ),
    (
        "small_traction",
        include_str!("../scenarios/small_traction.cfg"),
    ),
    (
        "nutrient_cosh",
        include_str!("../scenarios/nutrient_cosh.cfg"),
    ),
    (
        "nutrient_growth",
        include_str!("../scenarios/nutrient_growth.cfg"),
    ),
];

/// Benchmarks runnable by name.
pub const BENCHMARKS: [&str; 7] = [
    "stress_free_reference",
    "analytic_growth",
    "compatible_growth",
    "small_traction",
    "nutrient_cosh",
    "rk4_order",
    "jacobi_rule",
];

pub fn scenario_text(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn builtin_scenario(name: &str) -> Result<Scenario> {
    let text = scenario_text(name)
        .ok_or_else(|| Error::Validation(vec![format!("unknown scenario `{name}`")]))?;
    parse_scenario(text, name)
}

#[derive(Clone, Debug)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub target: String,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub name: String,
    pub metrics: Vec<Metric>,
    /// Free-form rows such as per-mesh or per-time errors.
    pub table: Vec<String>,
    pub seconds: f64,
}

impl BenchReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            metrics: Vec::new(),
            table: Vec::new(),
            seconds: 0.0,
        }
    }

    fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.metrics.push(Metric {
            name: name.into(),
            value,
            target: format!("<= {bound:e}"),
            passed: value <= bound,
        });
    }

    fn within(&mut self, name: &str, value: f64, lo: f64, hi: f64) {
        self.metrics.push(Metric {
            name: name.into(),
            value,
            target: format!("in [{lo}, {hi}]"),
            passed: (lo..=hi).contains(&value),
        });
    }

    pub fn passed(&self) -> bool {
        self.metrics.iter().all(|m| m.passed)
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics
            .iter()
            .find(|m| m.name == name)
            .map(|m| m.value)
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "benchmark {} ({:.2} s)", self.name, self.seconds)?;
        for row in &self.table {
            writeln!(f, "  {row}")?;
        }
        for m in &self.metrics {
            writeln!(
                f,
                "  {:<4} {:<28} {:>14.6e}  {}",
                if m.passed { "PASS" } else { "FAIL" },
                m.name,
                m.value,
                m.target
            )?;
        }
        Ok(())
    }
}

pub fn run_benchmark(name: &str) -> Result<BenchReport> {
    let start = Instant::now();
    let mut report = match name {
        "stress_free_reference" => stress_free_reference()?,
        "analytic_growth" => analytic_growth()?,
        "compatible_growth" => compatible_growth(&[8, 16, 32])?,
        "small_traction" => small_traction()?,
        "nutrient_cosh" => nutrient_cosh(&[8, 16, 32])?,
        "rk4_order" => rk4_order(),
        "jacobi_rule" => jacobi_rule()?,
        other => {
            return Err(Error::Validation(vec![format!(
                "unknown benchmark `{other}`"
            )]))
        }
    };
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn run_all_states(s: &Scenario) -> Result<(Arc<Mesh>, Trajectory)> {
    let mesh = Arc::new(s.build_mesh()?);
    let run = RunOptions {
        store_every: 1,
        warm_start: s.warm_start,
        verbose: false,
    };
    let traj = run_coupled_with(s, mesh.clone(), &run)?.into_result()?;
    Ok((mesh, traj))
}

pub fn stress_free_reference() -> Result<BenchReport> {
    let s = builtin_scenario("stress_free_reference")?;
    let (mesh, traj) = run_all_states(&s)?;
    let mut r = BenchReport::new("stress_free_reference");
    let mut max_u: f64 = 0.0;
    let mut max_p: f64 = 0.0;
    for st in &traj.states {
        for (y, x) in st.deformation.0.iter().zip(mesh.vertices()) {
            max_u = max_u.max((y[0] - x[0]).abs()).max((y[1] - x[1]).abs());
        }
        max_p = st.cell_stress.iter().copied().fold(max_p, f64::max);
    }
    r.table.push(format!(
        "{} steps on {} vertices",
        traj.states.len(),
        mesh.num_vertices()
    ));
    r.at_most("max nodal |u|", max_u, 1e-10);
    r.at_most("max cell |P|", max_p, 1e-10);
    Ok(r)
}

pub fn analytic_growth() -> Result<BenchReport> {
    analytic_growth_for(&builtin_scenario("analytic_growth")?)
}

/// Errors against `G = (1 - t)^-1 1` and `y = (1 - t)^-1 x` over all steps.
pub fn analytic_growth_for(s: &Scenario) -> Result<BenchReport> {
    let (mesh, traj) = run_all_states(s)?;
    let mut r = BenchReport::new("analytic_growth");
    let (mut eg, mut ey, mut ep): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let report_every = (traj.states.len() / 10).max(1);
    r.table.push(format!(
        "{:>10} {:>14} {:>14} {:>14}",
        "t", "|G - G*|", "|y - y*|", "max |P|"
    ));
    for (k, st) in traj.states.iter().enumerate() {
        let c = 1.0 / (1.0 - st.t);
        let g_err = st
            .growth
            .0
            .iter()
            .map(|g| (*g - MatD::scaled_identity(2, c)).max_abs())
            .fold(0.0, f64::max);
        let y_err = st
            .deformation
            .0
            .iter()
            .zip(mesh.vertices())
            .map(|(y, x)| (y[0] - c * x[0]).abs().max((y[1] - c * x[1]).abs()))
            .fold(0.0, f64::max);
        let p = st.cell_stress.iter().copied().fold(0.0, f64::max);
        if k % report_every == 0 || k + 1 == traj.states.len() {
            r.table.push(format!(
                "{:>10.4} {:>14.6e} {:>14.6e} {:>14.6e}",
                st.t, g_err, y_err, p
            ));
        }
        eg = eg.max(g_err);
        ey = ey.max(y_err);
        ep = ep.max(p);
    }
    let g_det = traj.last_state().map_or(f64::NAN, |s| s.growth.min_det());
    r.table.push(format!("final min det G = {g_det:.12}"));
    r.at_most("max |G - (1-t)^-1 1|", eg, 1e-6);
    r.at_most("max |y - (1-t)^-1 x|", ey, 1e-8);
    r.at_most("max cell |P|", ep, 1e-8);
    Ok(r)
}

/// Discrete energies `E_G(y_h)` of the static compatible scenario.
pub fn compatible_energies(resolutions: &[usize]) -> Result<Vec<f64>> {
    let base = builtin_scenario("compatible_growth")?;
    resolutions
        .iter()
        .map(|&n| {
            let s = base.clone().with_resolution(n);
            let mesh = Arc::new(s.build_mesh()?);
            let problem = EquilibriumProblem::new(
                mesh,
                s.energy_model(),
                &s.g0_analytic_sampler()
                    .expect("compatible scenario has analytic growth"),
                &s.dirichlet_at(0.0),
                s.traction_at(0.0).as_ref(),
                s.solver.clone(),
            )?;
            let sol = problem.solve(None)?;
            problem.elastic_energy(&sol.displacement)
        })
        .collect()
}

pub fn compatible_growth(resolutions: &[usize]) -> Result<BenchReport> {
    let energies = compatible_energies(resolutions)?;
    let mut r = BenchReport::new("compatible_growth");
    for (n, e) in resolutions.iter().zip(&energies) {
        r.table.push(format!("n = {n:>3}  E = {e:.6e}"));
    }
    for (k, w) in energies.windows(2).enumerate() {
        r.within(
            &format!("energy ratio {}->{}", resolutions[k], resolutions[k + 1]),
            w[0] / w[1],
            3.5,
            4.5,
        );
    }
    Ok(r)
}

pub fn small_traction() -> Result<BenchReport> {
    let s = builtin_scenario("small_traction")?;
    let mesh = Arc::new(s.build_mesh()?);
    let problem = EquilibriumProblem::new(
        mesh,
        s.energy_model(),
        &crate::elasticity::GrowthSampler::Nodal(s.g0_field(&s.build_mesh()?)),
        &s.dirichlet_at(0.0),
        s.traction_at(0.0).as_ref(),
        s.solver.clone(),
    )?;
    let fp = problem.solve_fixed_point(None)?;
    let nt = problem.solve_newton(None)?;
    let mut r = BenchReport::new("small_traction");
    let ratios = fp.increment_ratios();
    r.table.push(format!(
        "fixed point: {} iterations, ratios {}",
        fp.iterations,
        ratios
            .iter()
            .map(|x| format!("{x:.3}"))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    r.table
        .push(format!("newton: {} iterations", nt.iterations));
    let diff = fp
        .displacement
        .0
        .iter()
        .zip(&nt.displacement.0)
        .map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()))
        .fold(0.0, f64::max);
    let max_disp = nt.displacement.norm_inf();
    r.table.push(format!("max |u| = {max_disp:.6e}"));
    r.at_most("rho_hat", fp.rho_hat, 1.0 - f64::EPSILON);
    r.at_most("|u_fp - u_newton|", diff, 1e-10);
    r.metrics.push(Metric {
        name: "nontrivial displacement".into(),
        value: max_disp,
        target: "> 0".into(),
        passed: max_disp > 0.0,
    });
    Ok(r)
}

/// L2 errors of the nutrient solution for the cosh manufactured solution.
pub fn nutrient_cosh_errors(resolutions: &[usize]) -> Result<Vec<(f64, f64)>> {
    let base = builtin_scenario("nutrient_cosh")?;
    resolutions
        .iter()
        .map(|&n| {
            let s = base.clone().with_resolution(n);
            let mesh = Arc::new(s.build_mesh()?);
            let traj =
                run_coupled_with(&s, mesh.clone(), &RunOptions::for_scenario(&s))?.into_result()?;
            let st = traj.last_state().expect("final state is stored");
            let mut err2 = 0.0;
            for c in 0..mesh.num_cells() {
                let pts = mesh.cell_points(c);
                let area = mesh.cell_area(c);
                for (lambda, w) in TRIANGLE_RULE.iter() {
                    let x = barycentric_point(&pts, lambda);
                    let d = st.nutrient.at(&mesh, c, lambda) - x[0].cosh() * x[1].cosh();
                    err2 += w * area * d * d;
                }
            }
            Ok((mesh.mesh_size(), err2.sqrt()))
        })
        .collect()
}

/// Nutrient with constant boundary data and no absorption: `N = 1`.
pub fn nutrient_constant_error() -> Result<f64> {
    let text =
        "[mesh]\nnx = 8\n[nutrient]\nbeta0 = 0\n[boundary]\nf_n = 1\n[time]\nt_end = 1\ndt = 1\n";
    let s = parse_scenario(text, "nutrient_constant")?;
    let traj = run_coupled_with(&s, Arc::new(s.build_mesh()?), &RunOptions::for_scenario(&s))?
        .into_result()?;
    Ok(traj
        .last_state()
        .unwrap()
        .nutrient
        .0
        .iter()
        .map(|n| (n - 1.0).abs())
        .fold(0.0, f64::max))
}

pub fn nutrient_cosh(resolutions: &[usize]) -> Result<BenchReport> {
    let errors = nutrient_cosh_errors(resolutions)?;
    let mut r = BenchReport::new("nutrient_cosh");
    for (n, (h, e)) in resolutions.iter().zip(&errors) {
        r.table
            .push(format!("n = {n:>3}  h = {h:.4e}  L2 error = {e:.6e}"));
    }
    for (k, w) in errors.windows(2).enumerate() {
        let order = (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln();
        r.within(
            &format!("order {}->{}", resolutions[k], resolutions[k + 1]),
            order,
            1.7,
            2.3,
        );
    }
    r.at_most("constant solution error", nutrient_constant_error()?, 1e-12);
    Ok(r)
}

fn integrate(law: &dyn GrowthLaw, g0: MatD, dt: f64, t_end: f64) -> Result<MatD> {
    let steps = (t_end / dt).round() as usize;
    let mut g = MatrixField(vec![g0]);
    let y = MatD::identity(g0.dim());
    for k in 0..steps {
        g = ode_step_rk4(&g, k as f64 * dt, dt, None, &|_, _, gi| {
            law.evaluate(gi, &y, 0.0, &[0.0, 0.0])
        })?;
    }
    Ok(g.0[0])
}

/// End-time errors of RK4 on `g' = g` over `[0, 1]` and the ratios per halving.
pub fn rk4_errors() -> Vec<(f64, f64)> {
    let law = MultiplicativeGrowth {
        h: MatD::identity(2),
    };
    [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|&dt| {
            let g = integrate(&law, MatD::identity(2), dt, 1.0)
                .expect("linear law has no failure modes");
            (dt, (g[(0, 0)] - 1f64.exp()).abs())
        })
        .collect()
}

pub fn rk4_order() -> BenchReport {
    let errors = rk4_errors();
    let mut r = BenchReport::new("rk4_order");
    for (dt, e) in &errors {
        r.table.push(format!("dt = {dt:.1e}  error = {e:.6e}"));
    }
    for w in errors.windows(2) {
        r.within(
            &format!("ratio dt {:.1e}", w[1].0),
            w[0].1 / w[1].1,
            12.0,
            20.0,
        );
    }
    r
}

/// Drift of `det G` per unit time for a trace-free multiplicative law.
pub fn jacobi_drift() -> Result<f64> {
    let law = MultiplicativeGrowth {
        h: MatD::from_row_slice(&[0.3, 1.0, -0.5, -0.3]),
    };
    let g0 = MatD::from_row_slice(&[1.1, 0.1, -0.05, 0.95]);
    let g = integrate(&law, g0, 1e-3, 1.0)?;
    Ok((g.det() - g0.det()).abs())
}

pub fn jacobi_rule() -> Result<BenchReport> {
    let mut r = BenchReport::new("jacobi_rule");
    r.at_most("det drift per unit time", jacobi_drift()?, 1e-10);
    Ok(r)
}

/// Solver method override used by the cli and tests.
pub fn with_method(mut s: Scenario, method: Method) -> Scenario {
    s.solver.method = method;
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::validate_scenario;

    #[test]
    fn shipped_scenarios_validate() {
        for (name, _) in SCENARIOS {
            let s = builtin_scenario(name).unwrap();
            let report = validate_scenario(&s).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(report.passed());
        }
    }

    #[test]
    fn ode_benchmarks() {
        assert!(rk4_order().passed());
        assert!(jacobi_rule().unwrap().passed());
    }
}
