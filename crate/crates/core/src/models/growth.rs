use std::sync::Arc;

use crate::error::{Error, Result};
use crate::models::energy::{piola_kirchhoff, EnergyModel};
use crate::tensor::MatD;

/// Spatially varying scalar coefficient.
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

pub fn constant_scalar(value: f64) -> ScalarFn {
    Arc::new(move |_| value)
}

/// Right-hand side `dG/dt = law(G, Y, N, x)` of the growth ODE, with `Y = grad y`.
pub trait GrowthLaw: Send + Sync {
    fn evaluate(&self, g: &MatD, y: &MatD, nutrient: f64, x: &[f64]) -> Result<MatD>;

    /// Known Lipschitz constant in `G`, if any.
    fn lipschitz_hint(&self) -> Option<f64> {
        None
    }

    fn name(&self) -> &str {
        "growth"
    }
}

/// `dG/dt = 0`.
#[derive(Clone, Debug, Default)]
pub struct NoGrowth;

impl GrowthLaw for NoGrowth {
    fn evaluate(&self, g: &MatD, _y: &MatD, _n: f64, _x: &[f64]) -> Result<MatD> {
        Ok(MatD::zeros(g.dim()))
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(0.0)
    }

    fn name(&self) -> &str {
        "none"
    }
}

/// `dG/dt = G Y`; with compatible data this drives `G(t) = (1 - t)^-1 G0`.
#[derive(Clone, Debug, Default)]
pub struct ProductGrowth;

impl GrowthLaw for ProductGrowth {
    fn evaluate(&self, g: &MatD, y: &MatD, _n: f64, _x: &[f64]) -> Result<MatD> {
        Ok(*g * *y)
    }

    fn name(&self) -> &str {
        "product"
    }
}

/// `dG/dt = G H` with a constant matrix `H`; `det G` evolves by `exp(t tr H)`.
#[derive(Clone, Debug)]
pub struct MultiplicativeGrowth {
    pub h: MatD,
}

impl GrowthLaw for MultiplicativeGrowth {
    fn evaluate(&self, g: &MatD, _y: &MatD, _n: f64, _x: &[f64]) -> Result<MatD> {
        Ok(*g * self.h)
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(self.h.norm_inf())
    }

    fn name(&self) -> &str {
        "multiplicative"
    }
}

/// Nutrient response `eta(N)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NutrientResponse {
    Constant(f64),
    /// `c N`
    Linear(f64),
    /// `c N / (1 + N)`
    Saturating(f64),
}

impl NutrientResponse {
    pub fn eval(&self, n: f64) -> f64 {
        match *self {
            Self::Constant(c) => c,
            Self::Linear(c) => c * n,
            Self::Saturating(c) => c * n / (1.0 + n),
        }
    }
}

/// Stress response `mu(P)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StressResponse {
    Identity,
    /// `1 + c P`
    Linear(f64),
}

impl StressResponse {
    pub fn eval(&self, p: &MatD) -> MatD {
        match *self {
            Self::Identity => MatD::identity(p.dim()),
            Self::Linear(c) => MatD::identity(p.dim()) + *p * c,
        }
    }
}

/// `dG/dt = gamma(x) eta(N) mu(P(Y, G)) G` with `P` from the configured energy.
#[derive(Clone)]
pub struct StressNutrientGrowth {
    pub energy: Arc<dyn EnergyModel>,
    pub gamma: ScalarFn,
    pub eta: NutrientResponse,
    pub mu: StressResponse,
}

impl GrowthLaw for StressNutrientGrowth {
    fn evaluate(&self, g: &MatD, y: &MatD, nutrient: f64, x: &[f64]) -> Result<MatD> {
        if nutrient < -1e-10 {
            return Err(Error::Validation(vec![format!(
                "negative nutrient concentration {nutrient} passed to the growth law"
            )]));
        }
        let scale = (self.gamma)(x) * self.eta.eval(nutrient.max(0.0));
        let mu = match self.mu {
            StressResponse::Identity => MatD::identity(g.dim()),
            other => other.eval(&piola_kirchhoff(self.energy.as_ref(), x, g, y)?),
        };
        Ok(mu * *g * scale)
    }

    fn name(&self) -> &str {
        "stress_nutrient"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::energy::DistanceVolumetricEnergy;

    const X: [f64; 2] = [0.3, 0.4];

    fn law(eta: NutrientResponse, mu: StressResponse) -> StressNutrientGrowth {
        StressNutrientGrowth {
            energy: Arc::new(DistanceVolumetricEnergy::new(2)),
            gamma: constant_scalar(1.0),
            eta,
            mu,
        }
    }

    #[test]
    fn product_law_at_identity() {
        let i2 = MatD::identity(2);
        assert_eq!(ProductGrowth.evaluate(&i2, &i2, 0.0, &X).unwrap(), i2);
    }

    #[test]
    fn zero_nutrient_switches_growth_off() {
        let g = MatD::diag(&[1.1, 0.95]);
        let out = law(NutrientResponse::Linear(1.0), StressResponse::Linear(0.3))
            .evaluate(&g, &g, 0.0, &X)
            .unwrap();
        assert_eq!(out, MatD::zeros(2));
    }

    #[test]
    fn degenerate_law_is_exponential_growth() {
        let g = MatD::from_row_slice(&[1.1, 0.05, -0.02, 0.97]);
        let y = MatD::diag(&[1.05, 1.0]);
        let out = law(NutrientResponse::Constant(1.0), StressResponse::Identity)
            .evaluate(&g, &y, 0.7, &X)
            .unwrap();
        assert_eq!(out, g);
    }

    #[test]
    fn stress_response_uses_piola_stress() {
        let g = MatD::identity(2);
        let y = MatD::diag(&[1.1, 1.0]);
        let l = law(
            NutrientResponse::Saturating(2.0),
            StressResponse::Linear(0.5),
        );
        let p = piola_kirchhoff(&DistanceVolumetricEnergy::new(2), &X, &g, &y).unwrap();
        let expected = (MatD::identity(2) + p * 0.5) * (2.0 * 1.0 / 2.0);
        let got = l.evaluate(&g, &y, 1.0, &X).unwrap();
        assert!((got - expected).max_abs() < 1e-14);
    }

    #[test]
    fn multiplicative_law() {
        let h = MatD::from_row_slice(&[0.0, 1.0, -1.0, 0.0]);
        let g = MatD::diag(&[2.0, 3.0]);
        assert_eq!(
            MultiplicativeGrowth { h }
                .evaluate(&g, &g, 0.0, &X)
                .unwrap(),
            g * h
        );
    }
}
