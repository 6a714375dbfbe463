//! Sparse Hermitian matrices with a profile (skyline) LDLᴴ factorization,
//! used for spectrum slicing: the pivot signs of H − σI count eigenvalues
//! below σ (Sylvester inertia), and the same factorization drives
//! shift-inverted iterations.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Field elements the solvers are generic over (real f64, complex C64).
pub(crate) trait Scalar:
    Copy
    + std::fmt::Debug
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_re(x: f64) -> Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn norm_sqr(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn abs(self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_re(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::new(self.re, -self.im)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
    fn scale(self, s: f64) -> Self {
        Complex64::new(self.re * s, self.im * s)
    }
}

/// Hermitian matrix in coordinate form; only the lower triangle is stored
/// (an upper-triangle insertion is mirrored).
pub(crate) struct SparseHermitian<S: Scalar> {
    pub n: usize,
    /// (row, col, value) with row ≥ col.
    entries: Vec<(usize, usize, S)>,
}

impl<S: Scalar> SparseHermitian<S> {
    pub fn new(n: usize) -> Self {
        SparseHermitian { n, entries: Vec::new() }
    }

    pub fn add(&mut self, i: usize, j: usize, v: S) {
        if i >= j {
            self.entries.push((i, j, v));
        } else {
            self.entries.push((j, i, v.conj()));
        }
    }

    /// y = H·x using both triangles.
    pub fn apply(&self, x: &[S], y: &mut [S]) {
        for v in y.iter_mut() {
            *v = S::zero();
        }
        for &(i, j, a) in &self.entries {
            y[i] = y[i] + a * x[j];
            if i != j {
                y[j] = y[j] + a.conj() * x[i];
            }
        }
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j, _) in &self.entries {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    /// Reverse Cuthill–McKee ordering (profile reduction). Returns `perm`
    /// with `perm[new] = old`.
    pub fn rcm_ordering(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let n = self.n;
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            // pseudo-peripheral start: minimum degree among unvisited,
            // pushed outward by a BFS sweep
            let start = (0..n)
                .filter(|&i| !visited[i])
                .min_by_key(|&i| adj[i].len())
                .unwrap();
            let start = {
                let mut s = start;
                for _ in 0..2 {
                    let far = bfs_last(&adj, s, &visited);
                    if far == s {
                        break;
                    }
                    s = far;
                }
                s
            };
            let mut queue = std::collections::VecDeque::new();
            visited[start] = true;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                order.push(u);
                let mut nbrs: Vec<usize> =
                    adj[u].iter().copied().filter(|&v| !visited[v]).collect();
                nbrs.sort_by_key(|&v| adj[v].len());
                for v in nbrs {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
        order.reverse();
        order
    }

    /// Permuted copy: B[new_i, new_j] = A[perm[new_i], perm[new_j]].
    pub fn permuted(&self, perm: &[usize]) -> SparseHermitian<S> {
        let mut inv = vec![0usize; self.n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut out = SparseHermitian::new(self.n);
        for &(i, j, v) in &self.entries {
            out.add(inv[i], inv[j], v);
        }
        out
    }

    /// Profile LDLᴴ of (H − σI) without pivoting. σ must not be (nearly) an
    /// eigenvalue; a vanishing pivot is reported so the caller can nudge σ.
    pub fn factor_shifted(&self, sigma: f64) -> Result<ProfileLdl<S>> {
        let n = self.n;
        // envelope
        let mut first: Vec<usize> = (0..n).collect();
        for &(i, j, _) in &self.entries {
            if j < first[i] {
                first[i] = j;
            }
        }
        let offsets: Vec<usize> = {
            let mut o = Vec::with_capacity(n + 1);
            let mut acc = 0usize;
            for i in 0..n {
                o.push(acc);
                acc += i - first[i] + 1;
            }
            o.push(acc);
            o
        };
        let mut rows: Vec<S> = vec![S::zero(); offsets[n]];
        let mut scale = 0.0f64;
        for &(i, j, v) in &self.entries {
            rows[offsets[i] + (j - first[i])] = rows[offsets[i] + (j - first[i])] + v;
            scale = scale.max(v.abs());
        }
        for i in 0..n {
            let d = offsets[i] + (i - first[i]);
            rows[d] = rows[d] - S::from_re(sigma);
        }
        scale = scale.max(sigma.abs()).max(1.0);
        // in-place row-oriented factorization: rows[i][j] becomes L_ij, the
        // diagonal slot becomes D_i
        let mut diag = vec![0.0f64; n];
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut sum = rows[offsets[i] + (j - fi)];
                for k in lo..j {
                    let lik = rows[offsets[i] + (k - fi)];
                    let ljk = rows[offsets[j] + (k - fj)];
                    sum = sum - lik * ljk.conj() * S::from_re(diag[k]);
                }
                rows[offsets[i] + (j - fi)] = sum.scale(1.0 / diag[j]);
            }
            let mut d = rows[offsets[i] + (i - fi)].re();
            for k in fi..i {
                let lik = rows[offsets[i] + (k - fi)];
                d -= lik.norm_sqr() * diag[k];
            }
            if d.abs() < 1e-13 * scale {
                return Err(Error::Numerical(format!(
                    "vanishing pivot at row {i} for shift {sigma}"
                )));
            }
            diag[i] = d;
        }
        Ok(ProfileLdl { n, first, offsets, rows, diag })
    }
}

impl SparseHermitian<Complex64> {
    /// True when every stored entry is real up to `tol` (relative to the
    /// largest magnitude), so the block can be solved in f64.
    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self
            .entries
            .iter()
            .map(|&(_, _, v)| v.norm())
            .fold(1.0f64, f64::max);
        self.entries.iter().all(|&(_, _, v)| v.im.abs() <= tol * scale)
    }

    pub fn real_part(&self) -> SparseHermitian<f64> {
        let mut out = SparseHermitian::new(self.n);
        for &(i, j, v) in &self.entries {
            out.add(i, j, v.re);
        }
        out
    }
}

fn bfs_last(adj: &[Vec<usize>], start: usize, visited: &[bool]) -> usize {
    let mut seen = visited.to_vec();
    let mut queue = std::collections::VecDeque::new();
    seen[start] = true;
    queue.push_back(start);
    let mut last = start;
    while let Some(u) = queue.pop_front() {
        last = u;
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    last
}

/// Factored H − σI = L·D·Lᴴ in profile storage.
pub(crate) struct ProfileLdl<S: Scalar> {
    n: usize,
    first: Vec<usize>,
    offsets: Vec<usize>,
    rows: Vec<S>,
    diag: Vec<f64>,
}

impl<S: Scalar> ProfileLdl<S> {
    /// Number of negative pivots = #{eigenvalues < σ} (Sylvester).
    pub fn negative_count(&self) -> usize {
        self.diag.iter().filter(|&&d| d < 0.0).count()
    }

    /// Solve (H − σI)·x = b in place.
    pub fn solve_in_place(&self, b: &mut [S]) {
        let n = self.n;
        // forward: L y = b (unit diagonal)
        for i in 0..n {
            let fi = self.first[i];
            let mut acc = b[i];
            for k in fi..i {
                acc = acc - self.rows[self.offsets[i] + (k - fi)] * b[k];
            }
            b[i] = acc;
        }
        for i in 0..n {
            b[i] = b[i].scale(1.0 / self.diag[i]);
        }
        // backward: Lᴴ x = y
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = b[i];
            for k in fi..i {
                b[k] = b[k] - self.rows[self.offsets[i] + (k - fi)].conj() * xi;
            }
        }
    }
}
