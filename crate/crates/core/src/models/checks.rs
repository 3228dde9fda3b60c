//! Randomised sampling checks of the constitutive assumptions.
//!
//! Each check draws a fixed-seed sample so reports are reproducible.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::models::energy::EnergyModel;
use crate::models::growth::GrowthLaw;
use crate::models::nutrient::NutrientModel;
use crate::tensor::{dist_so_squared, MatD};

const SEED: u64 = 0x6d6f_7270_686f;

/// Radius (induced inf-norm) of the sampled balls around the identity for
/// nutrient and growth-law checks.
pub const SAMPLE_RADIUS: f64 = 0.25;

/// Outcome of one assumption check.
#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport {
    pub name: String,
    pub passed: bool,
    /// The headline number of the check (worst defect or estimated constant).
    pub value: f64,
    pub detail: String,
}

impl fmt::Display for AssumptionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<28} {}  value={:.6e}  {}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.value,
            self.detail
        )
    }
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

/// Uniform sample of `1 + B` with `|B|_inf < radius`.
pub(crate) fn sample_in_ball(rng: &mut impl Rng, dim: usize, radius: f64) -> MatD {
    let r = radius / dim as f64;
    MatD::identity(dim) + MatD::from_fn(dim, |_, _| rng.random_range(-r..r))
}

pub(crate) fn sample_rotation(rng: &mut impl Rng, dim: usize) -> MatD {
    if dim == 2 {
        return MatD::rotation2(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI));
    }
    let mut q = [0.0; 4];
    loop {
        for v in q.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            q.iter_mut().for_each(|v| *v /= n);
            break;
        }
    }
    let [w, x, y, z] = q;
    MatD::from_row_slice(&[
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    ])
}

fn sample_point(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(0.0..1.0)).collect()
}

/// `W(x, QF) = W(x, F)` over random rotations.
pub fn check_frame_indifference(model: &dyn EnergyModel, samples: usize) -> AssumptionReport {
    let dim = model.dim();
    check_frame_indifference_with(model, samples, |rng| sample_rotation(rng, dim))
}

/// [`check_frame_indifference`] with a caller-supplied rotation sampler.
pub fn check_frame_indifference_with(
    model: &dyn EnergyModel,
    samples: usize,
    mut rotation: impl FnMut(&mut ChaCha8Rng) -> MatD,
) -> AssumptionReport {
    let mut rng = rng();
    let dim = model.dim();
    let radius = 0.9 * model.admissible_radius();
    let mut worst: f64 = 0.0;
    let mut failures = 0usize;
    for _ in 0..samples {
        let x = sample_point(&mut rng, dim);
        let f = sample_in_ball(&mut rng, dim, radius);
        let q = rotation(&mut rng);
        match (model.energy(&x, &f), model.energy(&x, &(q * f))) {
            (Ok(w), Ok(wq)) => worst = worst.max((wq - w).abs() / (1.0 + w.abs())),
            _ => failures += 1,
        }
    }
    AssumptionReport {
        name: "frame indifference".into(),
        passed: failures == 0 && worst <= 1e-10,
        value: worst,
        detail: format!("{samples} samples, {failures} evaluation failures"),
    }
}

/// Estimates `c_W = min W / dist^2` and checks the linearised bound
/// `D^2W(1)[B, B] >= (c_W / 2) |B + B^T|^2` on random `B`.
pub fn check_coercivity(model: &dyn EnergyModel, samples: usize) -> AssumptionReport {
    let mut rng = rng();
    let dim = model.dim();
    let radius = 0.9 * model.admissible_radius();
    let ident = MatD::identity(dim);
    let origin = vec![0.5; dim];
    let eps = 1e-4;
    let mut c_w = f64::INFINITY;
    let mut directions = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = sample_point(&mut rng, dim);
        let f = sample_in_ball(&mut rng, dim, radius);
        let b = MatD::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        // Include near-identity points along each direction so the estimate
        // reflects the small-strain limit probed by the Hessian bound.
        for probe in [f, ident + b * eps] {
            let (Ok(w), Ok(d2)) = (model.energy(&x, &probe), dist_so_squared(&probe)) else {
                continue;
            };
            if d2.sqrt() > 1e-6 {
                c_w = c_w.min(w / d2);
            }
        }
        directions.push(b);
    }
    if !c_w.is_finite() {
        c_w = 0.0;
    }
    let Ok(hess) = model.second_derivative(&origin, &ident) else {
        return AssumptionReport {
            name: "coercivity".into(),
            passed: false,
            value: c_w,
            detail: "Hessian at identity not available".into(),
        };
    };
    let mut worst_gap = f64::INFINITY;
    for b in &directions {
        let s = *b + b.transpose();
        let gap = hess.contract(b, b) - 0.5 * c_w * s.dot(&s) + 1e-3 * b.dot(b);
        worst_gap = worst_gap.min(gap);
    }
    AssumptionReport {
        name: "coercivity".into(),
        passed: c_w > 1e-12 && worst_gap >= 0.0,
        value: c_w,
        detail: format!(
            "estimated c_W over {samples} samples; Hessian bound margin {worst_gap:.3e}"
        ),
    }
}

/// `W(x, 1) = 0` and `D_pW(x, 1) = 0`.
pub fn check_reference_state(model: &dyn EnergyModel, samples: usize) -> AssumptionReport {
    let mut rng = rng();
    let dim = model.dim();
    let ident = MatD::identity(dim);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..samples.max(1) {
        let x = sample_point(&mut rng, dim);
        match (model.energy(&x, &ident), model.first_derivative(&x, &ident)) {
            (Ok(w), Ok(dw)) => worst = worst.max(w.abs()).max(dw.max_abs()),
            _ => failures += 1,
        }
    }
    AssumptionReport {
        name: "unstressed reference".into(),
        passed: failures == 0 && worst <= 1e-12,
        value: worst,
        detail: "max |W(x,1)|, |D_pW(x,1)|".into(),
    }
}

/// Central finite-difference check of both energy derivatives (`h = 1e-5`)
/// on `F` with `|F - 1|_inf <= radius`.
pub fn check_derivatives(model: &dyn EnergyModel, samples: usize, radius: f64) -> AssumptionReport {
    let mut rng = rng();
    let dim = model.dim();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..samples {
        let x = sample_point(&mut rng, dim);
        let f = sample_in_ball(&mut rng, dim, radius);
        let (Ok(grad), Ok(hess)) = (
            model.first_derivative(&x, &f),
            model.second_derivative(&x, &f),
        ) else {
            failures += 1;
            continue;
        };
        let mut fd_grad = MatD::zeros(dim);
        let mut fd_hess_defect: f64 = 0.0;
        for i in 0..dim {
            for a in 0..dim {
                let mut fp = f;
                fp[(i, a)] += h;
                let mut fm = f;
                fm[(i, a)] -= h;
                let (Ok(wp), Ok(wm), Ok(gp), Ok(gm)) = (
                    model.energy(&x, &fp),
                    model.energy(&x, &fm),
                    model.first_derivative(&x, &fp),
                    model.first_derivative(&x, &fm),
                ) else {
                    failures += 1;
                    continue;
                };
                fd_grad[(i, a)] = (wp - wm) / (2.0 * h);
                let col = (gp - gm) * (1.0 / (2.0 * h));
                for j in 0..dim {
                    for b in 0..dim {
                        fd_hess_defect =
                            fd_hess_defect.max((col[(j, b)] - hess.get(i, j, a, b)).abs());
                    }
                }
            }
        }
        let grad_rel = (fd_grad - grad).max_abs() / grad.max_abs().max(1.0);
        let hess_rel = fd_hess_defect / hess.max_abs().max(1.0);
        worst = worst.max(grad_rel).max(hess_rel);
    }
    AssumptionReport {
        name: "derivative consistency".into(),
        passed: failures == 0 && worst <= 1e-6,
        value: worst,
        detail: format!("{samples} samples, |F-1| <= {radius}"),
    }
}

/// Ellipticity and symmetry of `D`, non-negativity of `beta`.
pub fn check_nutrient_assumptions(
    model: &dyn NutrientModel,
    dim: usize,
    samples: usize,
) -> AssumptionReport {
    let mut rng = rng();
    let nu = model.ellipticity_nu();
    let mut min_rayleigh = f64::INFINITY;
    let mut min_beta = f64::INFINITY;
    let mut worst_asym: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..samples {
        let x = sample_point(&mut rng, dim);
        let g = sample_in_ball(&mut rng, dim, SAMPLE_RADIUS);
        let y = sample_in_ball(&mut rng, dim, SAMPLE_RADIUS);
        let (Ok(d), Ok(beta)) = (model.diffusion(&g, &y, &x), model.absorption(&g, &y, &x)) else {
            failures += 1;
            continue;
        };
        worst_asym = worst_asym.max((d - d.transpose()).max_abs() / d.max_abs().max(1e-300));
        let xi: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n2: f64 = xi.iter().map(|v| v * v).sum();
        if n2 > 1e-12 {
            let dxi = d.mul_vec(&xi);
            let q: f64 = xi.iter().zip(&dxi).map(|(a, b)| a * b).sum::<f64>() / n2;
            min_rayleigh = min_rayleigh.min(q);
        }
        min_rayleigh = min_rayleigh.min(d.sym_eigenvalues()[0]);
        min_beta = min_beta.min(beta);
    }
    AssumptionReport {
        name: "nutrient ellipticity".into(),
        passed: failures == 0 && min_rayleigh >= nu && min_beta >= 0.0 && worst_asym <= 1e-12,
        value: min_rayleigh,
        detail: format!("nu={nu:.3e} min beta={min_beta:.3e} asym={worst_asym:.1e}"),
    }
}

/// `D(G, QY) = D(G, Y)` and `beta(G, QY) = beta(G, Y)`.
pub fn check_nutrient_frame_indifference(
    model: &dyn NutrientModel,
    dim: usize,
    samples: usize,
) -> AssumptionReport {
    let mut rng = rng();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..samples {
        let x = sample_point(&mut rng, dim);
        let g = sample_in_ball(&mut rng, dim, SAMPLE_RADIUS);
        let y = sample_in_ball(&mut rng, dim, SAMPLE_RADIUS);
        let q = sample_rotation(&mut rng, dim);
        let qy = q * y;
        match (
            model.diffusion(&g, &y, &x),
            model.diffusion(&g, &qy, &x),
            model.absorption(&g, &y, &x),
            model.absorption(&g, &qy, &x),
        ) {
            (Ok(d), Ok(dq), Ok(b), Ok(bq)) => {
                worst = worst
                    .max((dq - d).max_abs() / (1.0 + d.max_abs()))
                    .max((bq - b).abs() / (1.0 + b.abs()));
            }
            _ => failures += 1,
        }
    }
    AssumptionReport {
        name: "nutrient frame indifference".into(),
        passed: failures == 0 && worst <= 1e-10,
        value: worst,
        detail: format!("{samples} samples"),
    }
}

/// Finite values and a finite local Lipschitz estimate in `G` on the sampled ball.
pub fn check_growth_law(law: &dyn GrowthLaw, dim: usize, samples: usize) -> AssumptionReport {
    let mut rng = rng();
    let mut lipschitz: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..samples {
        let x = sample_point(&mut rng, dim);
        let g = sample_in_ball(&mut rng, dim, SAMPLE_RADIUS);
        let y = sample_in_ball(&mut rng, dim, SAMPLE_RADIUS);
        let n = rng.random_range(0.0..2.0);
        let dg = MatD::from_fn(dim, |_, _| rng.random_range(-1e-4..1e-4));
        match (
            law.evaluate(&g, &y, n, &x),
            law.evaluate(&(g + dg), &y, n, &x),
        ) {
            (Ok(a), Ok(b)) if a.is_finite() && b.is_finite() => {
                lipschitz = lipschitz.max((b - a).norm_inf() / dg.norm_inf().max(1e-300));
            }
            _ => failures += 1,
        }
    }
    AssumptionReport {
        name: "growth law regularity".into(),
        passed: failures == 0 && lipschitz.is_finite(),
        value: lipschitz,
        detail: format!("local Lipschitz estimate over {samples} samples"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Result;
    use crate::models::energy::DistanceVolumetricEnergy;
    use crate::models::growth::ProductGrowth;
    use crate::models::nutrient::DetRatioNutrient;
    use crate::tensor::Tensor4;

    /// `W = F11^2`, smooth but neither frame-indifferent nor coercive.
    struct FirstEntrySquared;

    impl EnergyModel for FirstEntrySquared {
        fn dim(&self) -> usize {
            2
        }
        fn admissible_radius(&self) -> f64 {
            0.5
        }
        fn energy(&self, _x: &[f64], f: &MatD) -> Result<f64> {
            Ok(f[(0, 0)] * f[(0, 0)])
        }
        fn first_derivative(&self, _x: &[f64], f: &MatD) -> Result<MatD> {
            Ok(MatD::from_row_slice(&[2.0 * f[(0, 0)], 0.0, 0.0, 0.0]))
        }
        fn second_derivative(&self, _x: &[f64], _f: &MatD) -> Result<Tensor4> {
            let mut t = Tensor4::zeros(2);
            t.set(0, 0, 0, 0, 2.0);
            Ok(t)
        }
    }

    struct ZeroEnergy;

    impl EnergyModel for ZeroEnergy {
        fn dim(&self) -> usize {
            2
        }
        fn admissible_radius(&self) -> f64 {
            0.5
        }
        fn energy(&self, _x: &[f64], _f: &MatD) -> Result<f64> {
            Ok(0.0)
        }
        fn first_derivative(&self, _x: &[f64], _f: &MatD) -> Result<MatD> {
            Ok(MatD::zeros(2))
        }
        fn second_derivative(&self, _x: &[f64], _f: &MatD) -> Result<Tensor4> {
            Ok(Tensor4::zeros(2))
        }
    }

    #[test]
    fn default_energy_is_frame_indifferent() {
        for dim in [2, 3] {
            let r = check_frame_indifference(&DistanceVolumetricEnergy::new(dim), 1000);
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn non_objective_energy_fails_frame_indifference() {
        assert!(!check_frame_indifference(&FirstEntrySquared, 200).passed);
    }

    #[test]
    fn identity_rotations_pass_trivially() {
        let r = check_frame_indifference_with(&DistanceVolumetricEnergy::new(2), 100, |_| {
            MatD::identity(2)
        });
        assert!(r.passed);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn default_energy_coercive_with_unit_constant() {
        let r = check_coercivity(&DistanceVolumetricEnergy::new(2), 500);
        assert!(r.passed, "{r}");
        assert!(r.value >= 1.0 - 1e-6, "{r}");
        assert!(check_coercivity(&DistanceVolumetricEnergy::new(3), 300).passed);
    }

    #[test]
    fn zero_energy_is_not_coercive() {
        assert!(!check_coercivity(&ZeroEnergy, 100).passed);
    }

    #[test]
    fn skew_directions_leave_bound_trivial() {
        let h = DistanceVolumetricEnergy::new(2)
            .second_derivative(&[0.0, 0.0], &MatD::identity(2))
            .unwrap();
        let b = MatD::from_row_slice(&[0.0, 1.0, -1.0, 0.0]);
        assert_eq!((b + b.transpose()).frobenius_norm(), 0.0);
        assert!(h.contract(&b, &b) >= -1e-14);
    }

    #[test]
    fn reference_state_and_derivatives() {
        assert!(check_reference_state(&DistanceVolumetricEnergy::new(2), 10).passed);
        let r = check_derivatives(&DistanceVolumetricEnergy::new(2), 100, 0.3);
        assert!(r.passed, "{r}");
    }

    #[test]
    fn det_ratio_nutrient_assumptions() {
        let m = DetRatioNutrient::constant(MatD::identity(2), 1.0, 0.1);
        let r = check_nutrient_assumptions(&m, 2, 500);
        assert!(r.passed, "{r}");
        // Near identity, the Rayleigh quotient is the det ratio, close to 1.
        assert!(r.value > 0.3 && r.value < 1.0);
        assert!(check_nutrient_frame_indifference(&m, 2, 1000).passed);
    }

    #[test]
    fn zero_absorption_is_allowed() {
        let m = DetRatioNutrient::constant(MatD::identity(2), 0.0, 0.1);
        let r = check_nutrient_assumptions(&m, 2, 100);
        assert!(r.passed, "{r}");
    }

    #[test]
    fn growth_law_regularity() {
        let r = check_growth_law(&ProductGrowth, 2, 100);
        assert!(r.passed);
        assert!(r.value > 0.5 && r.value < 2.0);
    }
}
