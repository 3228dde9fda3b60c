//! Finite-element simulation of nutrient-driven morphoelastic growth.

// `!(x > 0.0)` style comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod elasticity;
pub mod error;
pub mod expr;
pub mod fem;
pub mod integrator;
pub mod mesh;
pub mod models;
pub mod nutrient_solver;
pub mod output;
pub mod parallel;
pub mod scenario;
pub mod sim;
pub mod tensor;

pub use elasticity::{
    EquilibriumProblem, EquilibriumSolution, GrowthSampler, Method, SolverOptions,
};
pub use error::{Error, Result};
pub use fem::fields::{MatrixField, ScalarField, VectorField};
pub use integrator::{GuardConfig, TimeGrid};
pub use mesh::{build_rectangle_mesh, read_mesh, write_mesh, Mesh, Rect, TagRule, Triangulation};
pub use models::energy::{DistanceVolumetricEnergy, EnergyModel};
pub use models::growth::GrowthLaw;
pub use models::nutrient::{DetRatioNutrient, NutrientModel};
pub use nutrient_solver::{solve_nutrient, NutrientProblem, NutrientSolution};
pub use scenario::{load_scenario, parse_scenario, validate_scenario, Scenario};
pub use sim::{run_coupled, SystemState, Termination, Trajectory};
pub use tensor::{MatD, Tensor4};
