//! P1 assembly of vector (elasticity-type) and scalar (reaction-diffusion) operators.

use crate::error::{Error, Result};
use crate::fem::quadrature::{barycentric_point, edge_point, EDGE_RULE, TRIANGLE_RULE};
use crate::fem::sparse::{CsrMatrix, SparseSystem};
use crate::mesh::{BoundaryFacet, Mesh};
use crate::parallel::map_indexed;
use crate::tensor::{MatD, Tensor4};

/// Coefficient callback: `(cell, quadrature point index, x)`.
pub type VectorCoefficient<'a> = dyn Fn(usize, usize, &[f64; 2]) -> Result<Tensor4> + Sync + 'a;
pub type ScalarCoefficient<'a> = dyn Fn(usize, usize, &[f64; 2]) -> Result<(MatD, f64)> + Sync + 'a;

pub type PointLoad<'a, T> = &'a (dyn Fn(&[f64; 2]) -> T + Sync);
pub type FacetLoad<'a, T> = &'a (dyn Fn(&BoundaryFacet, &[f64; 2]) -> T + Sync);

/// Loads of a vector problem.
#[derive(Default)]
pub struct VectorLoads<'a> {
    pub volume: Option<PointLoad<'a, [f64; 2]>>,
    /// Traction, evaluated on every facet; return zero off the Neumann part.
    pub traction: Option<FacetLoad<'a, [f64; 2]>>,
}

/// Loads of a scalar problem.
#[derive(Default)]
pub struct ScalarLoads<'a> {
    pub volume: Option<PointLoad<'a, f64>>,
    pub flux: Option<FacetLoad<'a, f64>>,
}

/// `K[(a,i),(b,j)] = sum_q w A[i,j,al,be] dN_a/dx_al dN_b/dx_be`.
pub fn assemble_vector_operator(
    mesh: &Mesh,
    coefficient: &VectorCoefficient,
    loads: &VectorLoads,
    dirichlet: Vec<(usize, f64)>,
) -> Result<SparseSystem> {
    let n = 2 * mesh.num_vertices();
    let elements = map_indexed(mesh.num_cells(), |c| -> Result<[f64; 36]> {
        let grads = mesh.shape_gradients(c);
        let area = mesh.cell_area(c);
        let pts = mesh.cell_points(c);
        let mut ke = [0.0; 36];
        for (q, (lambda, w)) in TRIANGLE_RULE.iter().enumerate() {
            let x = barycentric_point(&pts, lambda);
            let a = coefficient(c, q, &x)?;
            if !a.is_finite() {
                return Err(Error::Assembly(format!(
                    "non-finite coefficient on cell {c}"
                )));
            }
            let wq = w * area;
            for na in 0..3 {
                for nb in 0..3 {
                    for i in 0..2 {
                        for j in 0..2 {
                            let mut s = 0.0;
                            for al in 0..2 {
                                for be in 0..2 {
                                    s += a.get(i, j, al, be) * grads[na][al] * grads[nb][be];
                                }
                            }
                            ke[(2 * na + i) * 6 + 2 * nb + j] += wq * s;
                        }
                    }
                }
            }
        }
        Ok(ke)
    });
    let mut triplets = Vec::with_capacity(36 * mesh.num_cells());
    for (c, ke) in elements.into_iter().enumerate() {
        let ke = ke?;
        let cell = mesh.cells()[c];
        for r in 0..6 {
            for s in 0..6 {
                triplets.push((
                    2 * cell[r / 2] + r % 2,
                    2 * cell[s / 2] + s % 2,
                    ke[r * 6 + s],
                ));
            }
        }
    }
    let mut rhs = vec![0.0; n];
    if let Some(f) = loads.volume {
        for c in 0..mesh.num_cells() {
            let cell = mesh.cells()[c];
            let pts = mesh.cell_points(c);
            let area = mesh.cell_area(c);
            for (lambda, w) in TRIANGLE_RULE {
                let v = f(&barycentric_point(&pts, &lambda));
                for k in 0..3 {
                    for i in 0..2 {
                        rhs[2 * cell[k] + i] += w * area * v[i] * lambda[k];
                    }
                }
            }
        }
    }
    if let Some(g) = loads.traction {
        for (r, v) in rhs.iter_mut().zip(vector_boundary_load(mesh, g)) {
            *r += v;
        }
    }
    check_finite(&rhs)?;
    Ok(SparseSystem::new(
        CsrMatrix::from_triplets(n, triplets),
        rhs,
        dirichlet,
    ))
}

/// `int_dOmega g . N_a e_i ds` with the two-point edge rule.
pub fn vector_boundary_load(
    mesh: &Mesh,
    g: &(dyn Fn(&BoundaryFacet, &[f64; 2]) -> [f64; 2] + Sync),
) -> Vec<f64> {
    let mut rhs = vec![0.0; 2 * mesh.num_vertices()];
    for f in mesh.facets() {
        let (p, q) = (
            mesh.vertices()[f.vertices[0]],
            mesh.vertices()[f.vertices[1]],
        );
        for (s, w) in EDGE_RULE {
            let v = g(f, &edge_point(p, q, s));
            for i in 0..2 {
                rhs[2 * f.vertices[0] + i] += w * f.length * v[i] * (1.0 - s);
                rhs[2 * f.vertices[1] + i] += w * f.length * v[i] * s;
            }
        }
    }
    rhs
}

/// `K_ab = int D grad N_b . grad N_a + beta N_a N_b`, reaction lumped onto
/// the diagonal. With non-obtuse cells the matrix is an M-matrix.
///
/// With `nu = Some(v)` every sampled `D` must satisfy `lambda_min(D) >= v`.
pub fn assemble_scalar_operator(
    mesh: &Mesh,
    coefficient: &ScalarCoefficient,
    loads: &ScalarLoads,
    dirichlet: Vec<(usize, f64)>,
    nu: Option<f64>,
) -> Result<SparseSystem> {
    let n = mesh.num_vertices();
    let elements = map_indexed(mesh.num_cells(), |c| -> Result<[f64; 9]> {
        let grads = mesh.shape_gradients(c);
        let area = mesh.cell_area(c);
        let pts = mesh.cell_points(c);
        let mut ke = [0.0; 9];
        for (q, (lambda, w)) in TRIANGLE_RULE.iter().enumerate() {
            let x = barycentric_point(&pts, lambda);
            let (d, beta) = coefficient(c, q, &x)?;
            if !d.is_finite() || !beta.is_finite() {
                return Err(Error::Assembly(format!(
                    "non-finite coefficient on cell {c}"
                )));
            }
            if beta < 0.0 {
                return Err(Error::Assembly(format!(
                    "negative absorption {beta:e} on cell {c}"
                )));
            }
            if let Some(nu) = nu {
                let lmin = d.sym().sym_eigenvalues()[0];
                if lmin < nu * (1.0 - 1e-12) {
                    return Err(Error::EllipticityViolation { value: lmin, nu });
                }
            }
            let wq = w * area;
            for a in 0..3 {
                for b in 0..3 {
                    let mut s = 0.0;
                    for al in 0..2 {
                        for be in 0..2 {
                            s += d[(al, be)] * grads[b][be] * grads[a][al];
                        }
                    }
                    ke[a * 3 + b] += wq * s;
                }
                ke[a * 3 + a] += wq * beta * lambda[a];
            }
        }
        Ok(ke)
    });
    let mut triplets = Vec::with_capacity(9 * mesh.num_cells());
    for (c, ke) in elements.into_iter().enumerate() {
        let ke = ke?;
        let cell = mesh.cells()[c];
        for a in 0..3 {
            for b in 0..3 {
                triplets.push((cell[a], cell[b], ke[a * 3 + b]));
            }
        }
    }
    let mut rhs = vec![0.0; n];
    if let Some(f) = loads.volume {
        for c in 0..mesh.num_cells() {
            let cell = mesh.cells()[c];
            let pts = mesh.cell_points(c);
            let area = mesh.cell_area(c);
            for (lambda, w) in TRIANGLE_RULE {
                let v = f(&barycentric_point(&pts, &lambda));
                for k in 0..3 {
                    rhs[cell[k]] += w * area * v * lambda[k];
                }
            }
        }
    }
    if let Some(g) = loads.flux {
        for f in mesh.facets() {
            let (p, q) = (
                mesh.vertices()[f.vertices[0]],
                mesh.vertices()[f.vertices[1]],
            );
            for (s, w) in EDGE_RULE {
                let v = g(f, &edge_point(p, q, s));
                rhs[f.vertices[0]] += w * f.length * v * (1.0 - s);
                rhs[f.vertices[1]] += w * f.length * v * s;
            }
        }
    }
    check_finite(&rhs)?;
    Ok(SparseSystem::new(
        CsrMatrix::from_triplets(n, triplets),
        rhs,
        dirichlet,
    ))
}

fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::Assembly(format!("non-finite load at dof {i}"))),
        None => Ok(()),
    }
}

/// Scalar Dirichlet data on the given nodes.
pub fn scalar_dirichlet(
    mesh: &Mesh,
    nodes: &[usize],
    value: impl Fn(&[f64; 2]) -> f64,
) -> Vec<(usize, f64)> {
    nodes
        .iter()
        .map(|&v| (v, value(&mesh.vertices()[v])))
        .collect()
}

/// Vector Dirichlet data on the given nodes, DOF index `2 node + component`.
pub fn vector_dirichlet(
    mesh: &Mesh,
    nodes: &[usize],
    value: impl Fn(&[f64; 2]) -> [f64; 2],
) -> Vec<(usize, f64)> {
    nodes
        .iter()
        .flat_map(|&v| {
            let u = value(&mesh.vertices()[v]);
            [(2 * v, u[0]), (2 * v + 1, u[1])]
        })
        .collect()
}
