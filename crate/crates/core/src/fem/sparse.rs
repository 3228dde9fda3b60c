//! Sparse symmetric systems: CSR storage, constraint elimination and solvers.
//!
//! The direct path reorders with reverse Cuthill-McKee and factors the
//! resulting envelope; large envelopes fall back to Jacobi-preconditioned CG.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries.
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map(|k| vals[k]).unwrap_or(0.0)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, v)| v * x[c]).sum()
            })
            .collect()
    }

    /// `max |A - A^T| / max |A|`.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self
            .vals
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst / scale
    }

    /// Dense copy, for tests and tiny systems.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (r, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                row[c] = v;
            }
        }
        d
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Assembled system `A u = b` with prescribed values on some unknowns.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Sorted, unique `(dof, value)` pairs.
    pub constraints: Vec<(usize, f64)>,
}

/// System restricted to the free unknowns.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Reduced index -> global index.
    pub free: Vec<usize>,
}

/// Global -> reduced index map (`None` for constrained DOFs).
pub fn free_map(n: usize, constrained: &[usize]) -> (Vec<usize>, Vec<Option<usize>>) {
    let mut is_c = vec![false; n];
    for &c in constrained {
        is_c[c] = true;
    }
    let mut free = Vec::new();
    let mut map = vec![None; n];
    for i in 0..n {
        if !is_c[i] {
            map[i] = Some(free.len());
            free.push(i);
        }
    }
    (free, map)
}

/// Restricts `A` to the free rows and columns.
pub fn restrict(matrix: &CsrMatrix, map: &[Option<usize>], nfree: usize) -> CsrMatrix {
    let mut t = Vec::with_capacity(matrix.nnz());
    for r in 0..matrix.n() {
        let Some(rr) = map[r] else { continue };
        let (cols, vals) = matrix.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            if let Some(cc) = map[c] {
                t.push((rr, cc, v));
            }
        }
    }
    CsrMatrix::from_triplets(nfree, t)
}

impl SparseSystem {
    pub fn new(matrix: CsrMatrix, rhs: Vec<f64>, mut constraints: Vec<(usize, f64)>) -> Self {
        constraints.sort_by_key(|c| c.0);
        constraints.dedup_by_key(|c| c.0);
        Self {
            matrix,
            rhs,
            constraints,
        }
    }

    /// Eliminates constrained rows and columns: `A_ff u_f = b_f - A_fc u_c`.
    pub fn reduce(&self) -> ReducedSystem {
        let n = self.matrix.n();
        let dofs: Vec<usize> = self.constraints.iter().map(|c| c.0).collect();
        let (free, map) = free_map(n, &dofs);
        let mut value = vec![0.0; n];
        for &(d, v) in &self.constraints {
            value[d] = v;
        }
        let rhs = free
            .iter()
            .map(|&r| {
                let (cols, vals) = self.matrix.row(r);
                let coupling: f64 = cols
                    .iter()
                    .zip(vals)
                    .filter(|(&c, _)| map[c].is_none())
                    .map(|(&c, v)| v * value[c])
                    .sum();
                self.rhs[r] - coupling
            })
            .collect();
        ReducedSystem {
            matrix: restrict(&self.matrix, &map, free.len()),
            rhs,
            free,
        }
    }

    pub fn expand(&self, reduced: &ReducedSystem, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.matrix.n()];
        for &(d, v) in &self.constraints {
            out[d] = v;
        }
        for (k, &g) in reduced.free.iter().enumerate() {
            out[g] = x[k];
        }
        out
    }
}

/// Reverse Cuthill-McKee ordering: `perm[new] = old`.
pub fn reverse_cuthill_mckee(m: &CsrMatrix) -> Vec<usize> {
    let n = m.n();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|r| m.row(r).0.iter().copied().filter(|&c| c != r).collect())
        .collect();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let bfs_levels = |start: usize, visited: &[bool]| -> Vec<usize> {
        // Returns the last BFS level from `start` within its unvisited component.
        let mut seen = visited.to_vec();
        seen[start] = true;
        let mut level = vec![start];
        loop {
            let mut next = Vec::new();
            for &v in &level {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return level;
            }
            level = next;
        }
    };

    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // Pseudo-peripheral start: hop to a far, low-degree node a few times.
        let mut start = seed;
        for _ in 0..3 {
            let last = bfs_levels(start, &visited);
            let cand = *last.iter().min_by_key(|&&v| (degree[v], v)).unwrap();
            if cand == start {
                break;
            }
            start = cand;
        }
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            nb.sort_by_key(|&w| (degree[w], w));
            for w in nb {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Envelope (profile) Cholesky factor `P A P^T = L L^T`.
#[derive(Clone, Debug)]
pub struct EnvelopeCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    vals: Vec<f64>,
}

/// Pivots below this fraction of the original diagonal count as singular.
pub const PIVOT_REL: f64 = 1e-12;

impl EnvelopeCholesky {
    pub fn envelope_size(m: &CsrMatrix, perm: &[usize]) -> usize {
        let inv = invert_perm(perm);
        (0..m.n())
            .map(|i| {
                let old = perm[i];
                let f = m
                    .row(old)
                    .0
                    .iter()
                    .map(|&c| inv[c])
                    .min()
                    .unwrap_or(i)
                    .min(i);
                i - f + 1
            })
            .sum()
    }

    pub fn factor(m: &CsrMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = m.n();
        let inv = invert_perm(&perm);
        let mut first = vec![0; n];
        for i in 0..n {
            let old = perm[i];
            first[i] = m
                .row(old)
                .0
                .iter()
                .map(|&c| inv[c])
                .filter(|&j| j <= i)
                .min()
                .unwrap_or(i);
        }
        let mut start = vec![0; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut vals = vec![0.0; start[n]];
        for i in 0..n {
            let (cols, v) = m.row(perm[i]);
            for (&c, &a) in cols.iter().zip(v) {
                let j = inv[c];
                if j <= i {
                    vals[start[i] + j - first[i]] = a;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            let si = start[i];
            for j in fi..i {
                let fj = first[j];
                let sj = start[j];
                let k0 = fi.max(fj);
                let mut s = vals[si + j - fi];
                let ri = &vals[si + k0 - fi..si + j - fi];
                let rj = &vals[sj + k0 - fj..sj + j - fj];
                s -= dot(ri, rj);
                vals[si + j - fi] = s / vals[sj + j - fj];
            }
            let diag_orig = vals[si + i - fi];
            let row = &vals[si..si + i - fi];
            let d = diag_orig - dot(row, row);
            if !(d > PIVOT_REL * diag_orig.abs()) || !d.is_finite() {
                return Err(Error::SingularSystem(format!(
                    "non-positive pivot {d:e} at row {} (diagonal {diag_orig:e})",
                    perm[i]
                )));
            }
            vals[si + i - fi] = d.sqrt();
        }
        Ok(Self {
            perm,
            first,
            start,
            vals,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.first.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let (fi, si) = (self.first[i], self.start[i]);
            let s = dot(&self.vals[si..si + i - fi], &y[fi..i]);
            y[i] = (y[i] - s) / self.vals[si + i - fi];
        }
        for i in (0..n).rev() {
            let (fi, si) = (self.first[i], self.start[i]);
            y[i] /= self.vals[si + i - fi];
            let xi = y[i];
            for (k, l) in (fi..i).zip(&self.vals[si..si + i - fi]) {
                y[k] -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (i, &o) in self.perm.iter().enumerate() {
            x[o] = y[i];
        }
        x
    }
}

fn invert_perm(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &o) in perm.iter().enumerate() {
        inv[o] = i;
    }
    inv
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SolverChoice {
    #[default]
    Auto,
    Direct,
    ConjugateGradient,
}

/// Envelope entries above which `Auto` switches to CG.
pub const DIRECT_ENVELOPE_LIMIT: usize = 30_000_000;

/// Reusable solver for one SPD matrix.
#[derive(Clone, Debug)]
pub struct SpdSolver {
    matrix: CsrMatrix,
    factor: Option<EnvelopeCholesky>,
    inv_diag: Vec<f64>,
    tol: f64,
}

impl SpdSolver {
    pub fn new(matrix: CsrMatrix, choice: SolverChoice, tol: f64) -> Result<Self> {
        let diag = matrix.diagonal();
        if let Some((i, d)) = diag.iter().enumerate().find(|(_, d)| !(**d > 0.0)) {
            return Err(Error::SingularSystem(format!(
                "non-positive diagonal {d:e} at row {i}"
            )));
        }
        let direct = match choice {
            SolverChoice::Direct => true,
            SolverChoice::ConjugateGradient => false,
            SolverChoice::Auto => {
                let perm = reverse_cuthill_mckee(&matrix);
                EnvelopeCholesky::envelope_size(&matrix, &perm) <= DIRECT_ENVELOPE_LIMIT
            }
        };
        let factor = if direct {
            Some(EnvelopeCholesky::factor(
                &matrix,
                reverse_cuthill_mckee(&matrix),
            )?)
        } else {
            None
        };
        Ok(Self {
            inv_diag: diag.iter().map(|d| 1.0 / d).collect(),
            matrix,
            factor,
            tol,
        })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn is_direct(&self) -> bool {
        self.factor.is_some()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let bn = norm2(b);
        if bn == 0.0 {
            return Ok(vec![0.0; b.len()]);
        }
        match &self.factor {
            Some(f) => {
                let mut x = f.solve(b);
                // A few rounds of iterative refinement.
                for _ in 0..3 {
                    let ax = self.matrix.mul_vec(&x);
                    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
                    if norm2(&r) <= self.tol * bn {
                        break;
                    }
                    for (xi, d) in x.iter_mut().zip(f.solve(&r)) {
                        *xi += d;
                    }
                }
                if x.iter().all(|v| v.is_finite()) {
                    Ok(x)
                } else {
                    Err(Error::SingularSystem("non-finite solution".into()))
                }
            }
            None => self.cg(b, bn),
        }
    }

    fn cg(&self, b: &[f64], bn: f64) -> Result<Vec<f64>> {
        let n = b.len();
        let max_iter = (10 * n).max(1000);
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&self.inv_diag).map(|(r, d)| r * d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        for _ in 0..max_iter {
            let ap = self.matrix.mul_vec(&p);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(Error::SingularSystem(format!(
                    "CG breakdown: p.Ap = {pap:e}"
                )));
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if norm2(&r) <= self.tol * bn {
                return Ok(x);
            }
            for i in 0..n {
                z[i] = r[i] * self.inv_diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::NoConvergence {
            iterations: max_iter,
            norm: norm2(&r) / bn,
        })
    }
}

/// Default relative residual tolerance for linear solves.
pub const LINEAR_TOL: f64 = 1e-12;

/// Solves a constrained system to relative residual `tol`, returning the
/// full solution vector.
pub fn solve_sparse(system: &SparseSystem, tol: f64) -> Result<Vec<f64>> {
    solve_sparse_with(system, tol, SolverChoice::Auto)
}

pub fn solve_sparse_with(
    system: &SparseSystem,
    tol: f64,
    choice: SolverChoice,
) -> Result<Vec<f64>> {
    let reduced = system.reduce();
    if reduced.free.is_empty() {
        return Ok(system.expand(&reduced, &[]));
    }
    let solver = SpdSolver::new(reduced.matrix.clone(), choice, tol)?;
    let x = solver.solve(&reduced.rhs)?;
    Ok(system.expand(&reduced, &x))
}

/// Smallest eigenvalue of the system matrix restricted to the free DOFs.
pub fn smallest_eigenvalue_estimate(system: &SparseSystem, max_iter: usize) -> Result<f64> {
    smallest_eigenvalue(&system.reduce().matrix, max_iter)
}

/// Estimate of the smallest eigenvalue of a symmetric matrix, to roughly
/// three digits. Inverse iteration when the matrix factors; otherwise power
/// iteration on the Gershgorin-shifted matrix.
pub fn smallest_eigenvalue(m: &CsrMatrix, max_iter: usize) -> Result<f64> {
    let n = m.n();
    if n == 0 {
        return Err(Error::SingularSystem("empty matrix".into()));
    }
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_034).sin())
        .collect();
    normalize(&mut x);
    let rayleigh = |x: &[f64]| dot(x, &m.mul_vec(x));
    let tol = 1e-6;
    let factor = EnvelopeCholesky::factor(m, reverse_cuthill_mckee(m)).ok();
    let mut lambda = rayleigh(&x);
    let mut change = f64::INFINITY;
    match factor {
        Some(f) => {
            for _ in 0..max_iter {
                let mut y = f.solve(&x);
                normalize(&mut y);
                x = y;
                let next = rayleigh(&x);
                change = (next - lambda).abs() / next.abs().max(f64::MIN_POSITIVE);
                lambda = next;
                if change < tol {
                    return Ok(lambda);
                }
            }
        }
        None => {
            let sigma = (0..n)
                .map(|r| m.row(r).1.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max);
            for _ in 0..max_iter {
                let ax = m.mul_vec(&x);
                let mut y: Vec<f64> = x.iter().zip(&ax).map(|(x, a)| sigma * x - a).collect();
                normalize(&mut y);
                x = y;
                let next = rayleigh(&x);
                change = (next - lambda).abs() / sigma.max(f64::MIN_POSITIVE);
                lambda = next;
                if change < tol {
                    return Ok(lambda);
                }
            }
        }
    }
    if change < 1e-3 {
        Ok(lambda)
    } else {
        Err(Error::NoConvergence {
            iterations: max_iter,
            norm: change,
        })
    }
}

fn normalize(x: &mut [f64]) {
    let n = norm2(x);
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}
