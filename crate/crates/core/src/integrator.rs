//! Explicit time integration of the pointwise growth ODE with guards.

use crate::error::{Error, Result};
use crate::fem::fields::MatrixField;
use crate::parallel::map_indexed;
use crate::tensor::MatD;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
    pub adaptive: bool,
}

impl TimeGrid {
    pub fn new(t0: f64, t_end: f64, dt: f64, adaptive: bool) -> Result<Self> {
        if !(t0 >= 0.0 && t_end > t0 && dt > 0.0) {
            return Err(Error::Validation(vec![format!(
                "time grid needs 0 <= t0 < t_end and dt > 0 (got t0 = {t0}, t_end = {t_end}, dt = {dt})"
            )]));
        }
        Ok(Self {
            t0,
            t_end,
            dt,
            adaptive,
        })
    }

    /// Fixed-step times `t0, t0 + dt, ..., t_end`; the last step is shortened
    /// so the grid ends exactly at `t_end`. Times are formed as `t0 + k dt`
    /// to avoid accumulated drift.
    pub fn times(&self) -> Vec<f64> {
        let mut out = vec![self.t0];
        let mut k = 1u64;
        loop {
            let t = self.t0 + k as f64 * self.dt;
            if t >= self.t_end - 1e-12 * self.dt {
                out.push(self.t_end);
                return out;
            }
            out.push(t);
            k += 1;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GuardConfig {
    pub det_min: f64,
    pub norm_max: f64,
    /// Upper bound on `K dt` for the estimated Lipschitz constant `K`.
    pub contraction_budget: Option<f64>,
}

impl GuardConfig {
    /// `det_min = 0.1`, `norm_max = 10 |G0|_inf`.
    pub fn defaults_for(g0: &MatrixField) -> Self {
        Self {
            det_min: 0.1,
            norm_max: 10.0 * g0.max_norm_inf(),
            contraction_budget: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GuardReport {
    pub min_det: f64,
    pub max_norm: f64,
}

/// Minimum nodal determinant and maximum nodal norm; errors when either
/// bound is violated.
pub fn det_guard(g: &MatrixField, config: &GuardConfig, t: f64) -> Result<GuardReport> {
    let report = GuardReport {
        min_det: g.min_det(),
        max_norm: g.max_norm_inf(),
    };
    if !g.is_finite() {
        return Err(Error::GuardViolation {
            t,
            reason: "non-finite growth tensor".into(),
        });
    }
    if report.min_det < config.det_min {
        return Err(Error::GuardViolation {
            t,
            reason: format!(
                "min det G = {:e} < det_min = {:e}",
                report.min_det, config.det_min
            ),
        });
    }
    if report.max_norm > config.norm_max {
        return Err(Error::GuardViolation {
            t,
            reason: format!(
                "max |G| = {:e} > norm_max = {:e}",
                report.max_norm, config.norm_max
            ),
        });
    }
    Ok(report)
}

/// Classical RK4 step on a whole field; `rhs(t, G)` may couple through
/// re-solved coefficients. Stage states are guarded when `guard` is given.
pub fn rk4_field_step(
    g: &MatrixField,
    t: f64,
    dt: f64,
    guard: Option<&GuardConfig>,
    mut rhs: impl FnMut(f64, &MatrixField) -> Result<MatrixField>,
) -> Result<MatrixField> {
    let check = |s: &MatrixField, ts: f64| match guard {
        Some(cfg) => det_guard(s, cfg, ts).map(|_| ()),
        None => Ok(()),
    };
    let k1 = rhs(t, g)?;
    let s2 = g.axpy(0.5 * dt, &k1);
    check(&s2, t + 0.5 * dt)?;
    let k2 = rhs(t + 0.5 * dt, &s2)?;
    let s3 = g.axpy(0.5 * dt, &k2);
    check(&s3, t + 0.5 * dt)?;
    let k3 = rhs(t + 0.5 * dt, &s3)?;
    let s4 = g.axpy(dt, &k3);
    check(&s4, t + dt)?;
    let k4 = rhs(t + dt, &s4)?;
    let out = MatrixField(
        (0..g.0.len())
            .map(|i| g.0[i] + (k1.0[i] + k2.0[i] * 2.0 + k3.0[i] * 2.0 + k4.0[i]) * (dt / 6.0))
            .collect(),
    );
    check(&out, t + dt)?;
    Ok(out)
}

/// Nodewise RK4 step with coefficients frozen over the step:
/// `rhs(node, t, G_node)`.
pub fn ode_step_rk4(
    g: &MatrixField,
    t: f64,
    dt: f64,
    guard: Option<&GuardConfig>,
    rhs: &(dyn Fn(usize, f64, &MatD) -> Result<MatD> + Sync),
) -> Result<MatrixField> {
    rk4_field_step(g, t, dt, guard, |ts, state| {
        map_indexed(state.0.len(), |i| rhs(i, ts, &state.0[i]))
            .into_iter()
            .collect::<Result<Vec<_>>>()
            .map(MatrixField)
    })
}

/// Safety factor of the step control.
pub const PICARD_THETA: f64 = 0.5;

/// `min(dt, theta R0 / M, theta / K)`; zero estimates impose no limit.
pub fn picard_step_control(k_hat: f64, m_hat: f64, r0: f64, dt: f64) -> f64 {
    let mut out = dt;
    if m_hat > 0.0 {
        out = out.min(PICARD_THETA * r0 / m_hat);
    }
    if k_hat > 0.0 {
        out = out.min(PICARD_THETA / k_hat);
    }
    out
}

/// Lipschitz and bound estimates from the last two accepted states.
#[derive(Clone, Debug, Default)]
pub struct RateEstimator {
    last: Option<(MatrixField, MatrixField)>,
    pub k_hat: f64,
    pub m_hat: f64,
}

impl RateEstimator {
    pub fn record(&mut self, g: &MatrixField, rhs: &MatrixField) {
        self.m_hat = rhs.max_norm_inf();
        if let Some((g_prev, r_prev)) = &self.last {
            let dg = g.axpy(-1.0, g_prev).max_norm_inf();
            let dr = rhs.axpy(-1.0, r_prev).max_norm_inf();
            self.k_hat = if dg > 0.0 { dr / dg } else { 0.0 };
        }
        self.last = Some((g.clone(), rhs.clone()));
    }
}

/// Largest cellwise finite-difference gradient of `G`, a discrete stand-in
/// for its Hölder seminorm. Reported only.
pub fn growth_gradient_surrogate(mesh: &crate::mesh::Mesh, g: &MatrixField) -> f64 {
    let mut worst: f64 = 0.0;
    for c in 0..mesh.num_cells() {
        let cell = mesh.cells()[c];
        let grads = mesh.shape_gradients(c);
        let mut d = [MatD::zeros(2); 2];
        for (v, grad) in cell.iter().zip(&grads) {
            for (dal, s) in d.iter_mut().zip(grad) {
                *dal += g.0[*v] * *s;
            }
        }
        worst = d.iter().map(MatD::norm_inf).fold(worst, f64::max);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_field(v: f64) -> MatrixField {
        MatrixField(vec![MatD::scaled_identity(2, v); 3])
    }

    #[test]
    fn zero_rhs_keeps_field() {
        let g = MatrixField(vec![MatD::from_row_slice(&[1.1, 0.2, -0.1, 0.9]); 4]);
        let out = ode_step_rk4(&g, 0.0, 0.1, None, &|_, _, s| Ok(MatD::zeros(s.dim()))).unwrap();
        assert_eq!(out, g);
    }

    #[test]
    fn exponential_step() {
        let dt = 0.1;
        let out = ode_step_rk4(&scalar_field(1.0), 0.0, dt, None, &|_, _, s| Ok(*s)).unwrap();
        for m in &out.0 {
            assert!((m[(0, 0)] - dt.exp()).abs() < dt.powi(5) / 100.0);
            assert_eq!(m[(0, 1)], 0.0);
        }
    }

    #[test]
    fn blow_up_law_tracks_closed_form() {
        // g' = g / (1 - t) with coefficient evaluated at the start of each
        // stage through the field-level step.
        let dt = 1e-2;
        let mut g = scalar_field(1.0);
        let mut t = 0.0;
        for _ in 0..50 {
            g = rk4_field_step(&g, t, dt, None, |ts, s| {
                Ok(MatrixField(
                    s.0.iter().map(|m| *m * (1.0 / (1.0 - ts))).collect(),
                ))
            })
            .unwrap();
            t += dt;
        }
        assert!((g.0[0][(0, 0)] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn guard_examples() {
        let cfg = GuardConfig {
            det_min: 0.1,
            norm_max: 5.0,
            contraction_budget: None,
        };
        let r = det_guard(&scalar_field(1.0), &cfg, 0.0).unwrap();
        assert_eq!((r.min_det, r.max_norm), (1.0, 1.0));
        let err = det_guard(&scalar_field(1.0 / (1.0 - 0.9)), &cfg, 0.9);
        assert!(matches!(err, Err(Error::GuardViolation { .. })));
        let err = det_guard(&scalar_field(0.3), &cfg, 0.0);
        assert!(matches!(err, Err(Error::GuardViolation { .. })));
    }

    #[test]
    fn picard_examples() {
        assert_eq!(picard_step_control(0.0, 0.0, 1.0, 0.3), 0.3);
        assert!((picard_step_control(10.0, 1.0, 1.0, 1.0) - 0.05).abs() < 1e-15);
        assert!(picard_step_control(0.0, 1e12, 1.0, 1.0) < 1e-11);
    }

    #[test]
    fn time_grid_hits_end_exactly() {
        let grid = TimeGrid::new(0.0, 0.5, 1e-3, false).unwrap();
        let ts = grid.times();
        assert_eq!(ts.len(), 501);
        assert_eq!(*ts.last().unwrap(), 0.5);
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
        assert!(TimeGrid::new(1.0, 0.5, 0.1, false).is_err());
    }

    #[test]
    fn rate_estimator_for_linear_law() {
        let mut est = RateEstimator::default();
        let g1 = scalar_field(1.0);
        let g2 = scalar_field(1.5);
        est.record(&g1, &MatrixField(g1.0.iter().map(|m| *m * 3.0).collect()));
        est.record(&g2, &MatrixField(g2.0.iter().map(|m| *m * 3.0).collect()));
        assert!((est.k_hat - 3.0).abs() < 1e-14);
        assert!((est.m_hat - 4.5 * 2.0 / 2.0).abs() < 1e-14);
    }
}
