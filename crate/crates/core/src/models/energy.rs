use crate::error::{Error, Result};
use crate::tensor::{
    det_hessian, dist_so_squared, dist_so_squared_hessian, polar_rotation, MatD, Tensor4,
};

/// Stored elastic energy density `W(x, F)` and its first two derivatives in `F`.
///
/// Models are defined on the ball `|F - 1|_inf < admissible_radius()`.
pub trait EnergyModel: Send + Sync {
    fn dim(&self) -> usize;

    fn admissible_radius(&self) -> f64;

    fn energy(&self, x: &[f64], f: &MatD) -> Result<f64>;

    fn first_derivative(&self, x: &[f64], f: &MatD) -> Result<MatD>;

    /// Hessian in the [`Tensor4`] layout: `H[i,j,a,b] = d^2 W / dF[i,a] dF[j,b]`.
    fn second_derivative(&self, x: &[f64], f: &MatD) -> Result<Tensor4>;

    fn name(&self) -> &str {
        "energy"
    }
}

/// Errors unless `|F - 1|_inf < radius`.
pub fn check_admissible(f: &MatD, radius: f64) -> Result<()> {
    let distance = (*f - MatD::identity(f.dim())).norm_inf();
    if distance < radius && f.is_finite() {
        Ok(())
    } else {
        Err(Error::OutsideAdmissibleBall {
            cell: None,
            distance,
            radius,
        })
    }
}

/// `W(F) = dist(F, SO(d))^2 + det(F)^p + det(F)^-p - 2`, homogeneous in `x`.
#[derive(Clone, Debug)]
pub struct DistanceVolumetricEnergy {
    dim: usize,
    exponent: f64,
    radius: f64,
}

impl DistanceVolumetricEnergy {
    pub const DEFAULT_RADIUS: f64 = 0.5;

    /// Exponent `p = 2`, admissible radius 0.5.
    pub fn new(dim: usize) -> Self {
        Self::with_exponent(dim, 2.0)
    }

    pub fn with_exponent(dim: usize, exponent: f64) -> Self {
        assert!(exponent >= 1.0, "volumetric exponent must be >= 1");
        Self {
            dim,
            exponent,
            radius: Self::DEFAULT_RADIUS,
        }
    }

    pub fn radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    // phi(J) = J^p + J^-p - 2 and its first two derivatives.
    fn volumetric(&self, j: f64) -> (f64, f64, f64) {
        let p = self.exponent;
        let jp = j.powf(p);
        let jm = j.powf(-p);
        let phi = jp + jm - 2.0;
        let dphi = p * (jp - jm) / j;
        let ddphi = (p * (p - 1.0) * jp + p * (p + 1.0) * jm) / (j * j);
        (phi, dphi, ddphi)
    }
}

impl EnergyModel for DistanceVolumetricEnergy {
    fn dim(&self) -> usize {
        self.dim
    }

    fn admissible_radius(&self) -> f64 {
        self.radius
    }

    fn energy(&self, _x: &[f64], f: &MatD) -> Result<f64> {
        let j = f.require_positive_det()?;
        Ok(dist_so_squared(f)? + self.volumetric(j).0)
    }

    fn first_derivative(&self, _x: &[f64], f: &MatD) -> Result<MatD> {
        let j = f.require_positive_det()?;
        // d dist^2 = 2 (F - R(F)) since R(F) is the nearest rotation.
        let r = polar_rotation(f)?;
        let (_, dphi, _) = self.volumetric(j);
        Ok((*f - r) * 2.0 + f.cofactor() * dphi)
    }

    fn second_derivative(&self, _x: &[f64], f: &MatD) -> Result<Tensor4> {
        let j = f.require_positive_det()?;
        let (_, dphi, ddphi) = self.volumetric(j);
        let mut h = dist_so_squared_hessian(f)?;
        let cof = f.cofactor();
        let dd = det_hessian(f)?;
        let d = self.dim;
        for i in 0..d {
            for jj in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        let v = ddphi * cof[(i, a)] * cof[(jj, b)] + dphi * dd.get(i, jj, a, b);
                        h.add_to(i, jj, a, b, v);
                    }
                }
            }
        }
        Ok(h)
    }

    fn name(&self) -> &str {
        "distance_volumetric"
    }
}

/// First Piola-Kirchhoff stress `P = det(G) D_pW(x, Y G^-1) G^-T`.
pub fn piola_kirchhoff(model: &dyn EnergyModel, x: &[f64], g: &MatD, y: &MatD) -> Result<MatD> {
    let det_g = g.require_positive_det()?;
    let g_inv = g.invert()?;
    let f = *y * g_inv;
    f.require_positive_det()?;
    check_admissible(&f, model.admissible_radius())?;
    Ok(model.first_derivative(x, &f)? * g_inv.transpose() * det_g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const X: [f64; 2] = [0.0, 0.0];

    fn sample_near_identity(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> MatD {
        MatD::identity(dim) + MatD::from_fn(dim, |_, _| rng.random_range(-r..r))
    }

    #[test]
    fn energy_values() {
        let w = DistanceVolumetricEnergy::new(2);
        assert_eq!(w.energy(&X, &MatD::identity(2)).unwrap(), 0.0);
        assert!(w.energy(&X, &MatD::rotation2(1.3)).unwrap().abs() < 1e-14);
        // dist^2 = 1, 1/det^2 = 0.25, det^2 = 4.
        let v = w.energy(&X, &MatD::diag(&[2.0, 1.0])).unwrap();
        assert!((v - 3.25).abs() < 1e-14);
        assert!(matches!(
            w.energy(&X, &MatD::diag(&[1.0, -1.0])),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn derivatives_at_identity() {
        let w = DistanceVolumetricEnergy::new(2);
        let i2 = MatD::identity(2);
        assert!(w.first_derivative(&X, &i2).unwrap().max_abs() < 1e-15);
        let h = w.second_derivative(&X, &i2).unwrap();
        assert!((h.contract(&i2, &i2) - 36.0).abs() < 1e-12);

        // (1/2)|B + B^T|^2 + 8 (tr B)^2 for arbitrary B.
        let b = MatD::from_row_slice(&[0.3, -0.7, 1.1, 0.2]);
        let expected =
            0.5 * (b + b.transpose()).dot(&(b + b.transpose())) + 8.0 * b.trace().powi(2);
        assert!((h.contract(&b, &b) - expected).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let step = 1e-5;
        for n in 0..200 {
            let dim = 2 + n % 2;
            let w = DistanceVolumetricEnergy::new(dim);
            let f = sample_near_identity(&mut rng, dim, 0.1);
            let grad = w.first_derivative(&X, &f).unwrap();
            let hess = w.second_derivative(&X, &f).unwrap();
            assert!(hess.major_symmetry_defect() < 1e-12);
            for i in 0..dim {
                for a in 0..dim {
                    let mut fp = f;
                    fp[(i, a)] += step;
                    let mut fm = f;
                    fm[(i, a)] -= step;
                    let fd =
                        (w.energy(&X, &fp).unwrap() - w.energy(&X, &fm).unwrap()) / (2.0 * step);
                    assert!((fd - grad[(i, a)]).abs() / grad.max_abs().max(1.0) < 1e-6);
                    let dfd = (w.first_derivative(&X, &fp).unwrap()
                        - w.first_derivative(&X, &fm).unwrap())
                        * (1.0 / (2.0 * step));
                    for j in 0..dim {
                        for b in 0..dim {
                            let rel = (dfd[(j, b)] - hess.get(i, j, a, b)).abs()
                                / hess.max_abs().max(1.0);
                            assert!(rel < 1e-6);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn general_exponent_volumetric_term() {
        let w = DistanceVolumetricEnergy::with_exponent(2, 3.0);
        let f = MatD::diag(&[1.2, 1.0]);
        let expected = 0.04 + 1.2f64.powi(3) + 1.2f64.powi(-3) - 2.0;
        assert!((w.energy(&X, &f).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn piola_vanishes_for_compatible_states() {
        let w = DistanceVolumetricEnergy::new(2);
        let i2 = MatD::identity(2);
        assert!(piola_kirchhoff(&w, &X, &i2, &i2).unwrap().max_abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut seen = 0;
        while seen < 100 {
            let g = sample_near_identity(&mut rng, 2, 0.4);
            if !(0.5..=2.0).contains(&g.det()) {
                continue;
            }
            seen += 1;
            assert!(piola_kirchhoff(&w, &X, &g, &g).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn piola_matches_energy_finite_difference() {
        // P = d/dY [det(G) W(Y G^-1)].
        let w = DistanceVolumetricEnergy::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = 1e-6;
        for _ in 0..50 {
            let g = sample_near_identity(&mut rng, 2, 0.15);
            let y = sample_near_identity(&mut rng, 2, 0.15);
            let p = piola_kirchhoff(&w, &X, &g, &y).unwrap();
            let g_inv = g.invert().unwrap();
            let e = |yy: &MatD| g.det() * w.energy(&X, &(*yy * g_inv)).unwrap();
            for i in 0..2 {
                for a in 0..2 {
                    let mut yp = y;
                    yp[(i, a)] += h;
                    let mut ym = y;
                    ym[(i, a)] -= h;
                    let fd = (e(&yp) - e(&ym)) / (2.0 * h);
                    assert!((fd - p[(i, a)]).abs() / p.max_abs().max(1.0) < 1e-6);
                }
            }
        }
    }

    #[test]
    fn piola_rejects_states_outside_ball() {
        let w = DistanceVolumetricEnergy::new(2);
        let err = piola_kirchhoff(&w, &X, &MatD::identity(2), &MatD::diag(&[1.6, 1.0]));
        assert!(matches!(err, Err(Error::OutsideAdmissibleBall { .. })));
    }
}
