//! Small dense matrices (d = 2 or 3), fourth-order tensors and the rotation
//! geometry used by every constitutive evaluation.
//!
//! Storage is row-major: `m[(i, j)]` is row `i`, column `j`. A [`Tensor4`] is
//! indexed `(i, j, a, b)` with the pairing `i <-> a`, `j <-> b`, i.e. the
//! bilinear form it represents is `sum A[i,j,a,b] * B[i,a] * C[j,b]`. An energy
//! Hessian stored in this layout has `A[i,j,a,b] = d^2 W / dF[i,a] dF[j,b]`.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::{Matrix3, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative singularity threshold: `|det F| <= SINGULAR_REL * |F|_F^d` is singular.
pub const SINGULAR_REL: f64 = 1e-12;

/// A dense `d x d` real matrix with `d` in {2, 3}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatD {
    dim: usize,
    e: [[f64; 3]; 3],
}

impl MatD {
    pub fn zeros(dim: usize) -> Self {
        assert!(
            dim == 2 || dim == 3,
            "MatD supports d = 2 or d = 3, got {dim}"
        );
        Self {
            dim,
            e: [[0.0; 3]; 3],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, s: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.e[i][i] = s;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.e[i][i] = *v;
        }
        m
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be 4 or 9.
    pub fn from_row_slice(entries: &[f64]) -> Self {
        let dim = match entries.len() {
            4 => 2,
            9 => 3,
            n => panic!("expected 4 or 9 entries, got {n}"),
        };
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.e[i][j] = entries[i * dim + j];
            }
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.e[i][j] = f(i, j);
            }
        }
        m
    }

    /// Planar rotation by `theta` (counter-clockwise).
    pub fn rotation2(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_row_slice(&[c, -s, s, c])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major copy of the entries.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim * self.dim);
        for i in 0..self.dim {
            out.extend_from_slice(&self.e[i][..self.dim]);
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.e[j][i])
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.e[i][i]).sum()
    }

    pub fn det(&self) -> f64 {
        let e = &self.e;
        match self.dim {
            2 => e[0][0] * e[1][1] - e[0][1] * e[1][0],
            _ => {
                e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
                    - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
                    + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
            }
        }
    }

    /// Cofactor matrix, equal to `det(F) F^{-T}` when `F` is invertible.
    pub fn cofactor(&self) -> Self {
        let e = &self.e;
        match self.dim {
            2 => Self::from_row_slice(&[e[1][1], -e[1][0], -e[0][1], e[0][0]]),
            _ => Self::from_fn(3, |i, j| {
                let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
                let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
                e[i1][j1] * e[i2][j2] - e[i1][j2] * e[i2][j1]
            }),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Induced infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.e[i][..self.dim].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.to_vec().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Frobenius inner product `A : B`.
    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.e[i][j] * other.e[i][j];
            }
        }
        s
    }

    pub fn is_finite(&self) -> bool {
        self.to_vec().iter().all(|v| v.is_finite())
    }

    pub fn singularity_threshold(&self) -> f64 {
        SINGULAR_REL * self.frobenius_norm().powi(self.dim as i32)
    }

    /// Errors with [`Error::SingularMatrix`] unless `det > threshold`.
    pub fn require_positive_det(&self) -> Result<f64> {
        let det = self.det();
        let threshold = self.singularity_threshold();
        if det > threshold {
            Ok(det)
        } else {
            Err(Error::SingularMatrix { det, threshold })
        }
    }

    pub fn invert(&self) -> Result<Self> {
        let det = self.det();
        let threshold = self.singularity_threshold();
        if det.abs() <= threshold || !det.is_finite() {
            return Err(Error::SingularMatrix { det, threshold });
        }
        Ok(self.cofactor().transpose() * (1.0 / det))
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.e[i][j] * v[j]).sum())
            .collect()
    }

    /// Symmetric part `(A + A^T) / 2`.
    pub fn sym(&self) -> Self {
        (*self + self.transpose()) * 0.5
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn sym_eigenvalues(&self) -> Vec<f64> {
        let s = self.sym();
        match self.dim {
            2 => {
                let m = 0.5 * (s.e[0][0] + s.e[1][1]);
                let r = (0.25 * (s.e[0][0] - s.e[1][1]).powi(2) + s.e[0][1] * s.e[0][1]).sqrt();
                vec![m - r, m + r]
            }
            _ => {
                let eig = SymmetricEigen::new(to_na3(&s));
                let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
                v.sort_by(f64::total_cmp);
                v
            }
        }
    }
}

impl Index<(usize, usize)> for MatD {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.e[i][j]
    }
}

impl IndexMut<(usize, usize)> for MatD {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.e[i][j]
    }
}

impl Add for MatD {
    type Output = MatD;
    fn add(self, rhs: MatD) -> MatD {
        MatD::from_fn(self.dim, |i, j| self.e[i][j] + rhs.e[i][j])
    }
}

impl AddAssign for MatD {
    fn add_assign(&mut self, rhs: MatD) {
        *self = *self + rhs;
    }
}

impl Sub for MatD {
    type Output = MatD;
    fn sub(self, rhs: MatD) -> MatD {
        MatD::from_fn(self.dim, |i, j| self.e[i][j] - rhs.e[i][j])
    }
}

impl SubAssign for MatD {
    fn sub_assign(&mut self, rhs: MatD) {
        *self = *self - rhs;
    }
}

impl Neg for MatD {
    type Output = MatD;
    fn neg(self) -> MatD {
        self * -1.0
    }
}

impl Mul<f64> for MatD {
    type Output = MatD;
    fn mul(self, s: f64) -> MatD {
        MatD::from_fn(self.dim, |i, j| self.e[i][j] * s)
    }
}

impl Mul for MatD {
    type Output = MatD;
    fn mul(self, rhs: MatD) -> MatD {
        debug_assert_eq!(self.dim, rhs.dim);
        MatD::from_fn(self.dim, |i, j| {
            (0..self.dim).map(|k| self.e[i][k] * rhs.e[k][j]).sum()
        })
    }
}

/// A fourth-order tensor over `d`; see the module docs for the index pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    dim: usize,
    e: [f64; 81],
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3);
        Self { dim, e: [0.0; 81] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn offset(i: usize, j: usize, a: usize, b: usize) -> usize {
        ((i * 3 + j) * 3 + a) * 3 + b
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, a: usize, b: usize) -> f64 {
        self.e[Self::offset(i, j, a, b)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, a: usize, b: usize, v: f64) {
        self.e[Self::offset(i, j, a, b)] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, a: usize, b: usize, v: f64) {
        self.e[Self::offset(i, j, a, b)] += v;
    }

    /// `sum A[i,j,a,b] B[i,a] C[j,b]`.
    pub fn contract(&self, b_mat: &MatD, c_mat: &MatD) -> f64 {
        let d = self.dim;
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        s += self.get(i, j, a, b) * b_mat[(i, a)] * c_mat[(j, b)];
                    }
                }
            }
        }
        s
    }

    /// Linear map `B -> C` with `C[j,b] = sum A[i,j,a,b] B[i,a]`.
    pub fn apply(&self, b_mat: &MatD) -> MatD {
        let d = self.dim;
        MatD::from_fn(d, |j, b| {
            let mut s = 0.0;
            for i in 0..d {
                for a in 0..d {
                    s += self.get(i, j, a, b) * b_mat[(i, a)];
                }
            }
            s
        })
    }

    pub fn scale(&mut self, s: f64) {
        self.e.iter_mut().for_each(|v| *v *= s);
    }

    pub fn is_finite(&self) -> bool {
        self.e.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.e.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest violation of `A[i,j,a,b] = A[j,i,b,a]`, relative to `max |A|`.
    pub fn major_symmetry_defect(&self) -> f64 {
        let d = self.dim;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        let diff = (self.get(i, j, a, b) - self.get(j, i, b, a)).abs();
                        worst = worst.max(diff / scale);
                    }
                }
            }
        }
        worst
    }

    /// Pulls back an energy Hessian through the growth tensor:
    /// `A[i,j,a,b] = det(G) sum_{l,m} H[i,j,l,m] Ginv[a,l] Ginv[b,m]`.
    pub fn pull_back(&self, g_inv: &MatD, det_g: f64) -> Tensor4 {
        let d = self.dim;
        // First contract the `b` slot, then the `a` slot.
        let mut half = Tensor4::zeros(d);
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    for b in 0..d {
                        let mut s = 0.0;
                        for m in 0..d {
                            s += self.get(i, j, l, m) * g_inv[(b, m)];
                        }
                        half.set(i, j, l, b, s);
                    }
                }
            }
        }
        let mut out = Tensor4::zeros(d);
        for i in 0..d {
            for j in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        let mut s = 0.0;
                        for l in 0..d {
                            s += half.get(i, j, l, b) * g_inv[(a, l)];
                        }
                        out.set(i, j, a, b, det_g * s);
                    }
                }
            }
        }
        out
    }
}

fn to_na3(m: &MatD) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[(i, j)])
}

fn from_na3(m: &Matrix3<f64>) -> MatD {
    MatD::from_fn(3, |i, j| m[(i, j)])
}

/// Signed singular value decomposition `F = U diag(s) V^T` with `U, V` in SO(3).
struct Svd3 {
    u: MatD,
    s: [f64; 3],
    v: MatD,
}

fn svd3(f: &MatD) -> Svd3 {
    let svd = to_na3(f).svd(true, true);
    let mut u = from_na3(&svd.u.expect("svd computed with u"));
    let mut v = from_na3(&svd.v_t.expect("svd computed with v_t")).transpose();
    let mut s = [
        svd.singular_values[0],
        svd.singular_values[1],
        svd.singular_values[2],
    ];
    // Sign fix: make both factors proper rotations, pushing any reflection
    // into the smallest singular value.
    let k = (0..3).min_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap();
    if u.det() < 0.0 {
        for r in 0..3 {
            u[(r, k)] = -u[(r, k)];
        }
        s[k] = -s[k];
    }
    if v.det() < 0.0 {
        for r in 0..3 {
            v[(r, k)] = -v[(r, k)];
        }
        s[k] = -s[k];
    }
    Svd3 { u, s, v }
}

/// Rotation factor `R(F) = F (F^T F)^{-1/2}` of the polar decomposition.
///
/// For d = 2 the closed form `R = (F + cof F) / |(F11 + F22, F21 - F12)|` is
/// used; for d = 3 a sign-corrected SVD gives `R = U V^T`.
pub fn polar_rotation(f: &MatD) -> Result<MatD> {
    f.require_positive_det()?;
    Ok(match f.dim() {
        2 => {
            let (c, s) = planar_rotation_components(f);
            MatD::from_row_slice(&[c, -s, s, c])
        }
        _ => {
            let svd = svd3(f);
            svd.u * svd.v.transpose()
        }
    })
}

/// `(cos, sin)` of the 2D polar rotation; callers must have checked `det F > 0`.
fn planar_rotation_components(f: &MatD) -> (f64, f64) {
    let v1 = f[(0, 0)] + f[(1, 1)];
    let v2 = f[(1, 0)] - f[(0, 1)];
    let n = v1.hypot(v2);
    (v1 / n, v2 / n)
}

/// Frobenius distance from `F` to SO(d).
pub fn dist_so(f: &MatD) -> Result<f64> {
    Ok(dist_so_squared(f)?.sqrt())
}

/// `dist(F, SO(d))^2 = |F - R(F)|_F^2`.
pub fn dist_so_squared(f: &MatD) -> Result<f64> {
    let r = polar_rotation(f)?;
    Ok((*f - r).dot(&(*f - r)))
}

/// Gradient of `det` with respect to `F`: the cofactor matrix.
pub fn det_derivative(f: &MatD) -> MatD {
    f.cofactor()
}

/// Second derivative of `dist(F, SO(d))^2` in the [`Tensor4`] layout.
pub fn dist_so_squared_hessian(f: &MatD) -> Result<Tensor4> {
    f.require_positive_det()?;
    let d = f.dim();
    let mut h = Tensor4::zeros(d);
    match d {
        2 => {
            // dist^2 = |F|^2 + 2 - 2 s, s = |(F11 + F22, F21 - F12)|.
            let v1 = f[(0, 0)] + f[(1, 1)];
            let v2 = f[(1, 0)] - f[(0, 1)];
            let s = v1.hypot(v2);
            let ident = MatD::identity(2);
            let skew = MatD::from_row_slice(&[0.0, -1.0, 1.0, 0.0]);
            let grad_s = (ident * v1 + skew * v2) * (1.0 / s);
            for i in 0..2 {
                for a in 0..2 {
                    for j in 0..2 {
                        for b in 0..2 {
                            let hs = (ident[(i, a)] * ident[(j, b)] + skew[(i, a)] * skew[(j, b)]
                                - grad_s[(i, a)] * grad_s[(j, b)])
                                / s;
                            let kron = if i == j && a == b { 2.0 } else { 0.0 };
                            h.set(i, j, a, b, kron - 2.0 * hs);
                        }
                    }
                }
            }
        }
        _ => {
            // dR[H] = U W V^T with W_kl = (H~_kl - H~_lk) / (s_k + s_l), H~ = U^T H V.
            let Svd3 { u, s, v } = svd3(f);
            let ut = u.transpose();
            let vt = v.transpose();
            for i in 0..3 {
                for a in 0..3 {
                    let mut unit = MatD::zeros(3);
                    unit[(i, a)] = 1.0;
                    let ht = ut * unit * v;
                    let w = MatD::from_fn(3, |k, l| {
                        if k == l {
                            0.0
                        } else {
                            (ht[(k, l)] - ht[(l, k)]) / (s[k] + s[l])
                        }
                    });
                    let dr = u * w * vt;
                    let m = (unit - dr) * 2.0;
                    for j in 0..3 {
                        for b in 0..3 {
                            h.set(i, j, a, b, m[(j, b)]);
                        }
                    }
                }
            }
        }
    }
    Ok(h)
}

/// Second derivative of `det` in the [`Tensor4`] layout:
/// `d^2 det [H, K] = det (tr(F^-1 H) tr(F^-1 K) - tr(F^-1 H F^-1 K))`.
pub fn det_hessian(f: &MatD) -> Result<Tensor4> {
    let d = f.dim();
    let inv = f.invert()?;
    let det = f.det();
    let mut h = Tensor4::zeros(d);
    for i in 0..d {
        for a in 0..d {
            for j in 0..d {
                for b in 0..d {
                    // tr(F^-1 E_ia) = inv[a,i]; tr(F^-1 E_ia F^-1 E_jb) = inv[a,j] inv[b,i].
                    let v = det * (inv[(a, i)] * inv[(b, j)] - inv[(a, j)] * inv[(b, i)]);
                    h.set(i, j, a, b, v);
                }
            }
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn close(a: &MatD, b: &MatD, tol: f64) -> bool {
        (*a - *b).max_abs() <= tol
    }

    fn svd_rotation_oracle(f: &MatD) -> MatD {
        let m = Matrix2::new(f[(0, 0)], f[(0, 1)], f[(1, 0)], f[(1, 1)]);
        let svd = m.svd(true, true);
        let r = svd.u.unwrap() * svd.v_t.unwrap();
        MatD::from_row_slice(&[r[(0, 0)], r[(0, 1)], r[(1, 0)], r[(1, 1)]])
    }

    fn random_mat(rng: &mut ChaCha8Rng, dim: usize, spread: f64) -> MatD {
        MatD::identity(dim) + MatD::from_fn(dim, |_, _| rng.random_range(-spread..spread))
    }

    fn random_rotation3(rng: &mut ChaCha8Rng) -> MatD {
        let a = random_mat(rng, 3, 2.0);
        let mut a = a;
        if a.det() < 0.0 {
            a = a * -1.0;
        }
        polar_rotation(&a).unwrap()
    }

    #[test]
    fn polar_rotation_examples() {
        let i2 = MatD::identity(2);
        assert!(close(&polar_rotation(&i2).unwrap(), &i2, 1e-15));
        let i3 = MatD::identity(3);
        assert!(close(&polar_rotation(&i3).unwrap(), &i3, 1e-14));
        for theta in [0.3, -1.2, 2.9] {
            let q = MatD::rotation2(theta);
            assert!(close(&polar_rotation(&q).unwrap(), &q, 1e-14));
        }
        assert!(close(
            &polar_rotation(&MatD::diag(&[2.0, 1.0])).unwrap(),
            &i2,
            1e-15
        ));

        let f = MatD::rotation2(PI / 4.0) * MatD::diag(&[2.0, 1.0]);
        let oracle = svd_rotation_oracle(&f);
        assert!(close(&oracle, &MatD::rotation2(PI / 4.0), 1e-12));
        assert!(close(&polar_rotation(&f).unwrap(), &oracle, 1e-12));
    }

    #[test]
    fn polar_rotation_rejects_singular() {
        let f = MatD::from_row_slice(&[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            polar_rotation(&f),
            Err(Error::SingularMatrix { .. })
        ));
        let f = MatD::diag(&[1.0, -1.0]);
        assert!(matches!(
            polar_rotation(&f),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn dist_examples() {
        assert_eq!(dist_so(&MatD::identity(2)).unwrap(), 0.0);
        assert!((dist_so(&MatD::diag(&[2.0, 1.0])).unwrap() - 1.0).abs() < 1e-14);
        let eps = 0.037;
        let f = MatD::rotation2(0.8) * MatD::diag(&[1.0 + eps, 1.0]);
        assert!((dist_so(&f).unwrap() - eps).abs() < 1e-14);
    }

    #[test]
    fn dist_matches_brute_force_over_rotations() {
        let f = MatD::diag(&[2.0, 1.0]);
        let best = (0..200_000)
            .map(|k| {
                let q = MatD::rotation2(2.0 * PI * k as f64 / 200_000.0);
                (f - q).frobenius_norm()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((best - dist_so(&f).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn rotation_properties_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 1000 {
            let dim = if checked % 2 == 0 { 2 } else { 3 };
            let f = random_mat(&mut rng, dim, 0.6);
            let det = f.det();
            if !(0.5..=2.0).contains(&det) {
                continue;
            }
            checked += 1;
            let r = polar_rotation(&f).unwrap();
            assert!(close(&(r.transpose() * r), &MatD::identity(dim), 1e-12));
            assert!((r.det() - 1.0).abs() < 1e-12);

            // Singular-value oracle: dist^2 = sum (sigma_k - 1)^2.
            let sig: Vec<f64> = (f.transpose() * f)
                .sym_eigenvalues()
                .iter()
                .map(|l| l.sqrt())
                .collect();
            let oracle: f64 = sig.iter().map(|s| (s - 1.0).powi(2)).sum();
            assert!((dist_so_squared(&f).unwrap() - oracle).abs() < 1e-10);

            let q = if dim == 2 {
                MatD::rotation2(rng.random_range(-PI..PI))
            } else {
                random_rotation3(&mut rng)
            };
            assert!((dist_so(&(q * f)).unwrap() - dist_so(&f).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn det_derivative_examples() {
        assert_eq!(det_derivative(&MatD::identity(2)), MatD::identity(2));
        assert_eq!(
            det_derivative(&MatD::diag(&[3.0, 5.0])),
            MatD::diag(&[5.0, 3.0])
        );
    }

    #[test]
    fn det_derivative_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-6;
        for n in 0..100 {
            let dim = 2 + n % 2;
            let f = random_mat(&mut rng, dim, 0.8);
            let g = det_derivative(&f);
            for i in 0..dim {
                for j in 0..dim {
                    let mut fp = f;
                    fp[(i, j)] += h;
                    let mut fm = f;
                    fm[(i, j)] -= h;
                    let fd = (fp.det() - fm.det()) / (2.0 * h);
                    let scale = g.max_abs().max(1.0);
                    assert!(
                        (fd - g[(i, j)]).abs() / scale < 1e-7,
                        "{fd} vs {}",
                        g[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn invert_examples() {
        assert_eq!(MatD::identity(3).invert().unwrap(), MatD::identity(3));
        assert_eq!(
            MatD::diag(&[2.0, 4.0]).invert().unwrap(),
            MatD::diag(&[0.5, 0.25])
        );
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 0..50 {
            let f = random_mat(&mut rng, 2 + n % 2, 0.3);
            let inv = f.invert().unwrap();
            assert!(close(&(f * inv), &MatD::identity(f.dim()), 1e-13));
        }
        assert!(matches!(
            MatD::zeros(2).invert(),
            Err(Error::SingularMatrix { .. })
        ));
    }

    fn fd_hessian(f: &MatD, func: impl Fn(&MatD) -> f64) -> Tensor4 {
        let d = f.dim();
        let h = 1e-4;
        let mut t = Tensor4::zeros(d);
        for i in 0..d {
            for a in 0..d {
                for j in 0..d {
                    for b in 0..d {
                        let eval = |si: f64, sj: f64| {
                            let mut g = *f;
                            g[(i, a)] += si * h;
                            g[(j, b)] += sj * h;
                            func(&g)
                        };
                        let v = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0)
                            + eval(-1.0, -1.0))
                            / (4.0 * h * h);
                        t.set(i, j, a, b, v);
                    }
                }
            }
        }
        t
    }

    #[test]
    fn distance_and_det_hessians_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 0..40 {
            let dim = 2 + n % 2;
            let f = random_mat(&mut rng, dim, 0.3);
            let exact = dist_so_squared_hessian(&f).unwrap();
            let fd = fd_hessian(&f, |g| dist_so_squared(g).unwrap());
            assert!(exact.major_symmetry_defect() < 1e-12);
            for k in 0..81 {
                assert!(
                    (exact.e[k] - fd.e[k]).abs() < 1e-6,
                    "dist hessian entry {k}"
                );
            }
            let exact = det_hessian(&f).unwrap();
            let fd = fd_hessian(&f, |g| g.det());
            for k in 0..81 {
                assert!((exact.e[k] - fd.e[k]).abs() < 1e-6, "det hessian entry {k}");
            }
        }
    }

    #[test]
    fn pull_back_with_identity_is_scaling() {
        let h = dist_so_squared_hessian(&MatD::diag(&[1.1, 0.9])).unwrap();
        let p = h.pull_back(&MatD::identity(2), 3.0);
        for k in 0..81 {
            assert!((p.e[k] - 3.0 * h.e[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn sym_eigenvalues_of_diagonal() {
        assert_eq!(MatD::diag(&[3.0, 2.0]).sym_eigenvalues(), vec![2.0, 3.0]);
        let e = MatD::diag(&[3.0, 0.5, 2.0]).sym_eigenvalues();
        assert!((e[0] - 0.5).abs() < 1e-14 && (e[2] - 3.0).abs() < 1e-14);
    }
}
