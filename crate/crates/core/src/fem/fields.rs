//! Nodal P1 fields and cellwise gradients.

use crate::mesh::Mesh;
use crate::tensor::MatD;

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField(pub Vec<f64>);

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField(pub Vec<[f64; 2]>);

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixField(pub Vec<MatD>);

impl ScalarField {
    pub fn from_fn(mesh: &Mesh, f: impl Fn(&[f64; 2]) -> f64) -> Self {
        Self(mesh.vertices().iter().map(f).collect())
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Value at barycentric coordinates in cell `c`.
    pub fn at(&self, mesh: &Mesh, c: usize, lambda: &[f64; 3]) -> f64 {
        let cell = mesh.cells()[c];
        (0..3).map(|k| lambda[k] * self.0[cell[k]]).sum()
    }
}

impl VectorField {
    pub fn zeros(n: usize) -> Self {
        Self(vec![[0.0; 2]; n])
    }

    pub fn from_fn(mesh: &Mesh, f: impl Fn(&[f64; 2]) -> [f64; 2]) -> Self {
        Self(mesh.vertices().iter().map(f).collect())
    }

    /// Interleaved `[x0, y0, x1, y1, ...]` layout used by the vector DOFs.
    pub fn to_flat(&self) -> Vec<f64> {
        self.0.iter().flat_map(|v| *v).collect()
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        Self(flat.chunks_exact(2).map(|c| [c[0], c[1]]).collect())
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl MatrixField {
    pub fn uniform(n: usize, m: MatD) -> Self {
        Self(vec![m; n])
    }

    pub fn at(&self, mesh: &Mesh, c: usize, lambda: &[f64; 3]) -> MatD {
        let cell = mesh.cells()[c];
        let mut out = self.0[cell[0]] * lambda[0];
        out += self.0[cell[1]] * lambda[1];
        out += self.0[cell[2]] * lambda[2];
        out
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &MatrixField) -> MatrixField {
        MatrixField(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a + *b * s)
                .collect(),
        )
    }

    pub fn max_norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, g| m.max(g.norm_inf()))
    }

    pub fn min_det(&self) -> f64 {
        self.0.iter().map(MatD::det).fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(MatD::is_finite)
    }
}

/// Cellwise constant gradient `grad f` (rows: components) of a P1 vector field.
pub fn interpolate_gradient(mesh: &Mesh, field: &VectorField) -> Vec<MatD> {
    (0..mesh.num_cells())
        .map(|c| cell_gradient(mesh, c, field))
        .collect()
}

pub fn cell_gradient(mesh: &Mesh, c: usize, field: &VectorField) -> MatD {
    let cell = mesh.cells()[c];
    let g = mesh.shape_gradients(c);
    MatD::from_fn(2, |i, a| {
        (0..3).map(|k| field.0[cell[k]][i] * g[k][a]).sum()
    })
}

pub fn scalar_gradient(mesh: &Mesh, c: usize, field: &ScalarField) -> [f64; 2] {
    let cell = mesh.cells()[c];
    let g = mesh.shape_gradients(c);
    let mut out = [0.0; 2];
    for k in 0..3 {
        out[0] += field.0[cell[k]] * g[k][0];
        out[1] += field.0[cell[k]] * g[k][1];
    }
    out
}

/// Area-weighted average of cell gradients onto vertices.
pub fn nodal_gradient(mesh: &Mesh, cell_values: &[MatD]) -> MatrixField {
    let mut sum = vec![MatD::zeros(2); mesh.num_vertices()];
    let mut weight = vec![0.0; mesh.num_vertices()];
    for (c, cell) in mesh.cells().iter().enumerate() {
        let area = mesh.cell_area(c);
        for &v in cell {
            sum[v] += cell_values[c] * area;
            weight[v] += area;
        }
    }
    MatrixField(
        sum.into_iter()
            .zip(weight)
            .map(|(s, w)| s * (1.0 / w))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_rectangle_mesh, Rect, TagRule, Triangulation};

    #[test]
    fn gradient_of_affine_field_is_exact() {
        let m = build_rectangle_mesh(
            3,
            4,
            Rect::UNIT,
            Triangulation::Crossed,
            &TagRule::all_dirichlet(),
        )
        .unwrap();
        let a = MatD::from_row_slice(&[1.5, -0.25, 0.3, 0.9]);
        let f = VectorField::from_fn(&m, |x| {
            let v = a.mul_vec(x);
            [v[0] + 0.1, v[1] - 2.0]
        });
        for g in interpolate_gradient(&m, &f) {
            assert!((g - a).max_abs() < 1e-13);
        }
        let nodal = nodal_gradient(&m, &interpolate_gradient(&m, &f));
        assert!(nodal.0.iter().all(|g| (*g - a).max_abs() < 1e-13));
    }

    #[test]
    fn flat_round_trip() {
        let v = VectorField(vec![[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(VectorField::from_flat(&v.to_flat()), v);
    }
}
