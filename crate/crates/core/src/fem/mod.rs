//! P1 finite elements: quadrature, fields, sparse linear algebra and assembly.

pub mod assembly;
pub mod fields;
pub mod quadrature;
pub mod sparse;

pub use assembly::{
    assemble_scalar_operator, assemble_vector_operator, scalar_dirichlet, vector_boundary_load,
    vector_dirichlet, ScalarLoads, VectorLoads,
};
pub use fields::{interpolate_gradient, nodal_gradient, MatrixField, ScalarField, VectorField};
pub use sparse::{
    smallest_eigenvalue, smallest_eigenvalue_estimate, solve_sparse, solve_sparse_with, CsrMatrix,
    SolverChoice, SparseSystem, SpdSolver,
};
