//! Stationary nutrient transport `-div(D grad N) + beta N = 0`, with
//! coefficients from the current growth tensor and deformation gradient.

use std::sync::Arc;

use crate::elasticity::GrowthSampler;
use crate::error::{Error, Result};
use crate::fem::assembly::{assemble_scalar_operator, ScalarLoads};
use crate::fem::fields::{cell_gradient, ScalarField, VectorField};
use crate::fem::quadrature::{
    barycentric_point, edge_point, EDGE_RULE, POINTS_PER_CELL, TRIANGLE_RULE,
};
use crate::fem::sparse::{norm2, solve_sparse};
use crate::mesh::{BoundaryFacet, Mesh, NutrientTag};
use crate::models::nutrient::NutrientModel;
use crate::tensor::MatD;

pub type ScalarPointFn = Arc<dyn Fn(&[f64; 2]) -> f64 + Send + Sync>;

/// Negative nodal values below `-NEGATIVITY_TOL * scale` are reported.
pub const NEGATIVITY_TOL: f64 = 1e-10;

#[derive(Clone)]
pub struct NutrientProblem {
    pub mesh: Arc<Mesh>,
    pub model: Arc<dyn NutrientModel>,
    pub growth: GrowthSampler,
    /// Deformation `y` at the nodes.
    pub deformation: VectorField,
    /// Boundary concentration on nutrient Dirichlet facets.
    pub dirichlet: ScalarPointFn,
    /// Influx on nutrient Neumann facets.
    pub flux: ScalarPointFn,
}

#[derive(Clone, Debug)]
pub struct NutrientSolution {
    pub values: ScalarField,
    pub min_value: f64,
    pub residual_norm: f64,
    /// Non-fatal findings, e.g. negative values on a mesh with obtuse angles.
    pub warnings: Vec<String>,
}

type PointCoefficients = [(MatD, f64); POINTS_PER_CELL];

/// Diffusion tensor and absorption at every quadrature point, using the
/// cellwise deformation gradient and the sampled growth tensor.
pub fn nutrient_coefficient_fields(problem: &NutrientProblem) -> Result<Vec<PointCoefficients>> {
    let mesh = &problem.mesh;
    if problem.deformation.0.len() != mesh.num_vertices() {
        return Err(Error::Validation(vec![
            "deformation field does not match the mesh".into(),
        ]));
    }
    (0..mesh.num_cells())
        .map(|c| {
            let y = cell_gradient(mesh, c, &problem.deformation);
            let pts = mesh.cell_points(c);
            let mut out = [(MatD::zeros(2), 0.0); POINTS_PER_CELL];
            for (q, (lambda, _)) in TRIANGLE_RULE.iter().enumerate() {
                let x = barycentric_point(&pts, lambda);
                let g = match &problem.growth {
                    GrowthSampler::Nodal(field) => field.at(mesh, c, lambda),
                    GrowthSampler::Analytic(f) => f(&x),
                };
                out[q] = (
                    problem.model.diffusion(&g, &y, &x)?,
                    problem.model.absorption(&g, &y, &x)?,
                );
            }
            Ok(out)
        })
        .collect()
}

fn boundary_samples(mesh: &Mesh, tag: NutrientTag) -> Vec<[f64; 2]> {
    let mut pts = Vec::new();
    for f in mesh.facets().iter().filter(|f| f.nutrient == tag) {
        let (p, q) = (
            mesh.vertices()[f.vertices[0]],
            mesh.vertices()[f.vertices[1]],
        );
        pts.push(p);
        pts.extend(EDGE_RULE.iter().map(|(s, _)| edge_point(p, q, *s)));
    }
    pts
}

/// Checks the sign conditions on the boundary data and that the problem
/// has a unique solution (Dirichlet part or positive absorption somewhere).
pub fn check_nutrient_problem(
    problem: &NutrientProblem,
    coefficients: &[PointCoefficients],
) -> Result<()> {
    let mesh = &problem.mesh;
    let mut issues = Vec::new();
    for p in boundary_samples(mesh, NutrientTag::Dirichlet) {
        let v = (problem.dirichlet)(&p);
        if !(v >= 0.0) {
            issues.push(format!("boundary concentration {v} < 0 at {p:?}"));
            break;
        }
    }
    for p in boundary_samples(mesh, NutrientTag::Neumann) {
        let v = (problem.flux)(&p);
        if !(v >= 0.0) {
            issues.push(format!("boundary influx {v} < 0 at {p:?}"));
            break;
        }
    }
    if !issues.is_empty() {
        return Err(Error::Validation(issues));
    }
    let has_dirichlet = mesh
        .facets()
        .iter()
        .any(|f| f.nutrient == NutrientTag::Dirichlet);
    let absorbing = coefficients
        .iter()
        .any(|cell| cell.iter().any(|(_, b)| *b > 0.0));
    if !has_dirichlet && !absorbing {
        return Err(Error::SingularSystem(
            "no nutrient Dirichlet boundary and zero absorption: constants are in the kernel"
                .into(),
        ));
    }
    Ok(())
}

pub fn solve_nutrient(problem: &NutrientProblem) -> Result<NutrientSolution> {
    let mesh = &problem.mesh;
    let coefficients = nutrient_coefficient_fields(problem)?;
    check_nutrient_problem(problem, &coefficients)?;
    let nodes = mesh.nutrient_dirichlet_nodes();
    let dirichlet: Vec<(usize, f64)> = nodes
        .iter()
        .map(|&v| (v, (problem.dirichlet)(&mesh.vertices()[v])))
        .collect();
    let coeff = |c: usize, q: usize, _: &[f64; 2]| Ok(coefficients[c][q]);
    let flux = |f: &BoundaryFacet, x: &[f64; 2]| match f.nutrient {
        NutrientTag::Neumann => (problem.flux)(x),
        NutrientTag::Dirichlet => 0.0,
    };
    let loads = ScalarLoads {
        volume: None,
        flux: Some(&flux),
    };
    let sys = assemble_scalar_operator(
        mesh,
        &coeff,
        &loads,
        dirichlet.clone(),
        Some(problem.model.ellipticity_nu()),
    )?;
    let values = solve_sparse(&sys, 1e-14)?;
    let reduced = sys.reduce();
    let free_vals: Vec<f64> = reduced.free.iter().map(|&i| values[i]).collect();
    let ax = reduced.matrix.mul_vec(&free_vals);
    let residual_norm = norm2(
        &ax.iter()
            .zip(&reduced.rhs)
            .map(|(a, b)| a - b)
            .collect::<Vec<_>>(),
    );
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = dirichlet.iter().map(|d| d.1.abs()).fold(1.0, f64::max);
    let mut warnings = Vec::new();
    if min_value < -NEGATIVITY_TOL * scale {
        warnings.push(format!(
            "negative nutrient value {min_value:e}{}",
            if mesh.is_delaunay_type() {
                " on a mesh without obtuse angles"
            } else {
                " (mesh has obtuse angles; non-negativity is not guaranteed)"
            }
        ));
    }
    Ok(NutrientSolution {
        values: ScalarField(values),
        min_value,
        residual_norm,
        warnings,
    })
}
