//! Constitutive interfaces (elastic energy, growth law, nutrient coefficients),
//! their concrete instances and sampling checks of the modelling assumptions.

pub mod checks;
pub mod energy;
pub mod growth;
pub mod nutrient;

pub use checks::{
    check_coercivity, check_derivatives, check_frame_indifference, check_growth_law,
    check_nutrient_assumptions, check_nutrient_frame_indifference, check_reference_state,
    AssumptionReport,
};
pub use energy::{check_admissible, piola_kirchhoff, DistanceVolumetricEnergy, EnergyModel};
pub use growth::{
    constant_scalar, GrowthLaw, MultiplicativeGrowth, NoGrowth, NutrientResponse, ProductGrowth,
    ScalarFn, StressNutrientGrowth, StressResponse,
};
pub use nutrient::{DetRatioNutrient, MatrixFn, NutrientModel};
