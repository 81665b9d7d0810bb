//! Envelope (profile) direct factorizations.
//!
//! Row `i` of the lower factor is stored densely from its first nonzero
//! column up to the diagonal; no fill occurs outside that envelope. Meshes
//! from [`crate::mesh`] are numbered ring by ring, so the envelope is already
//! narrow; a reverse Cuthill-McKee ordering is tried as well and kept when it
//! yields a smaller profile.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::sparse::SparseMatrix;
use crate::error::{check_len, Error, Result};

/// Symmetric permutation together with the envelope shape of the permuted matrix.
#[derive(Debug, Clone)]
struct Envelope {
    /// `perm[new] = old`.
    perm: Vec<usize>,
    /// `inv[old] = new`.
    inv: Vec<usize>,
    /// First column of row `new` inside the lower envelope.
    first: Vec<usize>,
    /// Offset of row `new` in the packed storage.
    start: Vec<usize>,
}

impl Envelope {
    fn new(a: &SparseMatrix) -> Self {
        let n = a.nrows();
        let natural: Vec<usize> = (0..n).collect();
        let rcm = reverse_cuthill_mckee(a);
        let natural_size = profile_size(a, &natural);
        let rcm_size = profile_size(a, &rcm);
        let perm = if rcm_size < natural_size { rcm } else { natural };
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (i, j, _) in a.triplets() {
            let (ni, nj) = (inv[i], inv[j]);
            let (hi, lo) = if ni >= nj { (ni, nj) } else { (nj, ni) };
            first[hi] = first[hi].min(lo);
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + i - first[i] + 1);
        }
        Self { perm, inv, first, start }
    }

    fn n(&self) -> usize {
        self.perm.len()
    }

    fn storage(&self) -> usize {
        *self.start.last().unwrap_or(&0)
    }

    /// Packed index of `(i, j)` with `first[i] <= j <= i`.
    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        self.start[i] + j - self.first[i]
    }

    /// Scatters the lower (`lower = true`) or upper triangle of `a`, permuted, into packed rows.
    /// For the upper triangle, row `i` of the packed storage holds column `i` of `U`.
    fn scatter(&self, a: &SparseMatrix, lower: bool) -> Vec<f64> {
        let mut out = vec![0.0; self.storage()];
        for (i, j, v) in a.triplets() {
            let (ni, nj) = (self.inv[i], self.inv[j]);
            if (lower && nj <= ni) || (!lower && ni < nj) {
                let (r, c) = if lower { (ni, nj) } else { (nj, ni) };
                out[self.at(r, c)] += v;
            }
        }
        out
    }

    fn permute(&self, b: &[f64]) -> Vec<f64> {
        self.perm.iter().map(|&old| b[old]).collect()
    }

    fn unpermute(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; y.len()];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

fn profile_size(a: &SparseMatrix, perm: &[usize]) -> usize {
    let n = perm.len();
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut first: Vec<usize> = (0..n).collect();
    for (i, j, _) in a.triplets() {
        let (ni, nj) = (inv[i], inv[j]);
        let (hi, lo) = if ni >= nj { (ni, nj) } else { (nj, ni) };
        first[hi] = first[hi].min(lo);
    }
    first.iter().enumerate().map(|(i, &f)| i - f + 1).sum()
}

/// Reverse Cuthill-McKee ordering of the (symmetrized) pattern of `a`; returns `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &SparseMatrix) -> Vec<usize> {
    let n = a.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in a.triplets() {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for nb in &mut adj {
        nb.sort_unstable();
        nb.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    while order.len() < n {
        // Start each component from an unvisited vertex of minimum degree.
        let root = (0..n).filter(|&v| !visited[v]).min_by_key(|&v| (degree[v], v)).unwrap();
        visited[root] = true;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&u| !visited[u]).collect();
            next.sort_unstable_by_key(|&u| (degree[u], u));
            for u in next {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

/// `A = L Lᵀ` for symmetric positive definite `A`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    env: Envelope,
    l: Vec<f64>,
}

impl Cholesky {
    /// Factors `a`, reading only its lower triangle. Fails with
    /// [`Error::NotPositiveDefinite`] on a non-positive pivot.
    pub fn new(a: &SparseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { context: "cholesky", expected: a.nrows(), found: a.ncols() });
        }
        let env = Envelope::new(a);
        let mut l = env.scatter(a, true);
        let n = env.n();
        for i in 0..n {
            let fi = env.first[i];
            for j in fi..i {
                let fj = env.first[j];
                let k0 = fi.max(fj);
                let (ri, rj) = (env.at(i, k0), env.at(j, k0));
                let len = j - k0;
                let s: f64 = l[ri..ri + len].iter().zip(&l[rj..rj + len]).map(|(x, y)| x * y).sum();
                let ljj = l[env.at(j, j)];
                let idx = env.at(i, j);
                l[idx] = (l[idx] - s) / ljj;
            }
            let row = env.at(i, fi);
            let s: f64 = l[row..row + (i - fi)].iter().map(|x| x * x).sum();
            let idx = env.at(i, i);
            let d = l[idx] - s;
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: env.perm[i], value: d });
            }
            l[idx] = libm::sqrt(d);
        }
        Ok(Self { env, l })
    }

    pub fn dim(&self) -> usize {
        self.env.n()
    }

    /// Number of stored entries of the factor.
    pub fn profile(&self) -> usize {
        self.l.len()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len("cholesky solve", self.dim(), b.len())?;
        let env = &self.env;
        let n = env.n();
        let mut y = env.permute(b);
        for i in 0..n {
            let fi = env.first[i];
            let row = env.at(i, fi);
            let s: f64 = self.l[row..row + (i - fi)].iter().zip(&y[fi..i]).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - s) / self.l[env.at(i, i)];
        }
        for i in (0..n).rev() {
            y[i] /= self.l[env.at(i, i)];
            let xi = y[i];
            let fi = env.first[i];
            let row = env.at(i, fi);
            for (yk, lik) in y[fi..i].iter_mut().zip(&self.l[row..row + (i - fi)]) {
                *yk -= lik * xi;
            }
        }
        Ok(env.unpermute(&y))
    }
}

/// `A = L U` without pivoting for structurally symmetric `A`.
///
/// Intended for matrices whose symmetric part is positive definite (for
/// example `M + c D + c² A` with skew `D`); every leading principal minor of
/// such a matrix is nonzero, so no pivoting is required.
#[derive(Debug, Clone)]
pub struct ProfileLu {
    env: Envelope,
    /// Unit lower factor (diagonal slot unused).
    l: Vec<f64>,
    /// Upper factor stored by columns in the same envelope, diagonal included.
    u: Vec<f64>,
}

impl ProfileLu {
    pub fn new(a: &SparseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { context: "lu", expected: a.nrows(), found: a.ncols() });
        }
        // The envelope is computed from the symmetrized pattern, which covers both triangles.
        let env = Envelope::new(a);
        let mut l = env.scatter(a, true);
        let mut u = env.scatter(a, false);
        let n = env.n();
        for i in 0..n {
            let idx = env.at(i, i);
            u[idx] = l[idx];
            l[idx] = 1.0;
        }
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..n {
            let fi = env.first[i];
            for j in fi..i {
                let fj = env.first[j];
                let k0 = fi.max(fj);
                let len = j - k0;
                let (ri, rj) = (env.at(i, k0), env.at(j, k0));
                // L_ij = (a_ij - sum_k L_ik U_kj) / U_jj
                let s: f64 = l[ri..ri + len].iter().zip(&u[rj..rj + len]).map(|(x, y)| x * y).sum();
                let ujj = u[env.at(j, j)];
                let idx = env.at(i, j);
                l[idx] = (l[idx] - s) / ujj;
                // U_ji = a_ji - sum_k L_jk U_ki
                let s: f64 = l[rj..rj + len].iter().zip(&u[ri..ri + len]).map(|(x, y)| x * y).sum();
                u[idx] -= s;
            }
            let row = env.at(i, fi);
            let len = i - fi;
            let s: f64 = l[row..row + len].iter().zip(&u[row..row + len]).map(|(x, y)| x * y).sum();
            let idx = env.at(i, i);
            u[idx] -= s;
            if !(libm::fabs(u[idx]) > 1e-14 * scale) {
                return Err(Error::SingularPivot { pivot: env.perm[i] });
            }
        }
        Ok(Self { env, l, u })
    }

    pub fn dim(&self) -> usize {
        self.env.n()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len("lu solve", self.dim(), b.len())?;
        let env = &self.env;
        let n = env.n();
        let mut y = env.permute(b);
        for i in 0..n {
            let fi = env.first[i];
            let row = env.at(i, fi);
            let s: f64 = self.l[row..row + (i - fi)].iter().zip(&y[fi..i]).map(|(a, b)| a * b).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            y[i] /= self.u[env.at(i, i)];
            let xi = y[i];
            let fi = env.first[i];
            let row = env.at(i, fi);
            for (yk, uki) in y[fi..i].iter_mut().zip(&self.u[row..row + (i - fi)]) {
                *yk -= uki * xi;
            }
        }
        Ok(env.unpermute(&y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        SparseMatrix::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn cholesky_tridiagonal() {
        let a = laplacian_1d(7);
        let f = Cholesky::new(&a).unwrap();
        let x_true: Vec<f64> = (0..7).map(|i| (i as f64).sin()).collect();
        let b = a.spmv(&x_true).unwrap();
        let x = f.solve(&b).unwrap();
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).abs() < 1e-13);
        }
        assert_eq!(f.profile(), 13);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(Cholesky::new(&a), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn lu_skew_perturbed() {
        // M + c*D with D skew: symmetric part SPD.
        let m = laplacian_1d(6);
        let mut t = Vec::new();
        for i in 0..5 {
            t.push((i, i + 1, 0.7));
            t.push((i + 1, i, -0.7));
        }
        let d = SparseMatrix::from_triplets(6, 6, &t).unwrap();
        let a = super::super::add_scaled(&m, &d, 1.0, 1.0).unwrap();
        let f = ProfileLu::new(&a).unwrap();
        let x_true = [1.0, -2.0, 3.0, 0.5, 0.0, 4.0];
        let b = a.spmv(&x_true).unwrap();
        let x = f.solve(&b).unwrap();
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn rcm_narrows_a_scrambled_band() {
        // A path graph numbered 0, 5, 1, 6, 2, ... has a wide natural envelope.
        let n = 10;
        let label = |k: usize| if k % 2 == 0 { k / 2 } else { n / 2 + k / 2 };
        let mut t = Vec::new();
        for k in 0..n {
            t.push((label(k), label(k), 4.0));
            if k + 1 < n {
                t.push((label(k), label(k + 1), -1.0));
                t.push((label(k + 1), label(k), -1.0));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &t).unwrap();
        let natural: Vec<usize> = (0..n).collect();
        let rcm = reverse_cuthill_mckee(&a);
        assert!(profile_size(&a, &rcm) < profile_size(&a, &natural));
        let f = Cholesky::new(&a).unwrap();
        assert_eq!(f.profile(), 2 * n - 1);
        let b = vec![1.0; n];
        let x = f.solve(&b).unwrap();
        let r = a.spmv(&x).unwrap();
        assert!(r.iter().zip(&b).all(|(a, b)| (a - b).abs() < 1e-13));
    }
}
