use std::sync::Arc;

use crate::error::Result;
use crate::models::growth::ScalarFn;
use crate::tensor::MatD;

/// Spatially varying symmetric matrix coefficient.
pub type MatrixFn = Arc<dyn Fn(&[f64]) -> MatD + Send + Sync>;

/// Coefficients of the nutrient equation `-div(D grad N) + beta N = 0` as
/// functions of the growth tensor `G` and deformation gradient `Y`.
pub trait NutrientModel: Send + Sync {
    /// Symmetric diffusion tensor.
    fn diffusion(&self, g: &MatD, y: &MatD, x: &[f64]) -> Result<MatD>;

    /// Non-negative absorption rate.
    fn absorption(&self, g: &MatD, y: &MatD, x: &[f64]) -> Result<f64>;

    /// Ellipticity constant `nu`: `xi . D xi >= nu |xi|^2`.
    fn ellipticity_nu(&self) -> f64;

    fn name(&self) -> &str {
        "nutrient"
    }
}

/// `D = det(G)/det(Y) D0(x)`, `beta = det(Y)/det(G) beta0(x)`.
///
/// Elastic compression lowers diffusion and raises absorption.
#[derive(Clone)]
pub struct DetRatioNutrient {
    pub d0: MatrixFn,
    pub beta0: ScalarFn,
    pub nu: f64,
}

impl DetRatioNutrient {
    pub fn constant(d0: MatD, beta0: f64, nu: f64) -> Self {
        Self {
            d0: Arc::new(move |_| d0),
            beta0: Arc::new(move |_| beta0),
            nu,
        }
    }

    fn ratio(g: &MatD, y: &MatD) -> Result<f64> {
        Ok(g.require_positive_det()? / y.require_positive_det()?)
    }
}

impl NutrientModel for DetRatioNutrient {
    fn diffusion(&self, g: &MatD, y: &MatD, x: &[f64]) -> Result<MatD> {
        Ok((self.d0)(x) * Self::ratio(g, y)?)
    }

    fn absorption(&self, g: &MatD, y: &MatD, x: &[f64]) -> Result<f64> {
        Ok((self.beta0)(x) / Self::ratio(g, y)?)
    }

    fn ellipticity_nu(&self) -> f64 {
        self.nu
    }

    fn name(&self) -> &str {
        "det_ratio"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: [f64; 2] = [0.5, 0.5];

    #[test]
    fn compatible_state_returns_reference_coefficients() {
        let m = DetRatioNutrient::constant(MatD::diag(&[2.0, 3.0]), 0.7, 0.1);
        let g = MatD::from_row_slice(&[1.1, 0.1, 0.0, 0.9]);
        let d = m.diffusion(&g, &g, &X).unwrap();
        assert!((d - MatD::diag(&[2.0, 3.0])).max_abs() < 1e-15);
        let ev = d.sym_eigenvalues();
        assert!((ev[0] - 2.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        assert!((m.absorption(&g, &g, &X).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn scaled_deformation_gradient() {
        let m = DetRatioNutrient::constant(MatD::identity(2), 1.5, 0.1);
        let g = MatD::diag(&[1.05, 0.98]);
        let y = g * 2.0;
        let d = m.diffusion(&g, &y, &X).unwrap();
        assert!((d - MatD::identity(2) * 0.25).max_abs() < 1e-15);
        assert!((m.absorption(&g, &y, &X).unwrap() - 6.0).abs() < 1e-14);
    }

    #[test]
    fn compression_scaling_identity() {
        let m = DetRatioNutrient::constant(MatD::diag(&[1.0, 2.0]), 0.3, 0.1);
        let g = MatD::from_row_slice(&[1.02, 0.03, -0.01, 0.99]);
        let y = MatD::from_row_slice(&[0.97, 0.02, 0.0, 1.04]);
        for s in [1.1, 1.5, 2.0] {
            let d1 = m.diffusion(&g, &y, &X).unwrap();
            let d2 = m.diffusion(&g, &(y * s), &X).unwrap();
            assert!((d2 - d1 * s.powi(-2)).max_abs() < 1e-14);
            let b1 = m.absorption(&g, &y, &X).unwrap();
            let b2 = m.absorption(&g, &(y * s), &X).unwrap();
            assert!((b2 - b1 * s * s).abs() < 1e-13);
        }
    }
}
