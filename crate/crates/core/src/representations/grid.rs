//! Centered square lattices and the isotypic projector for finite groups
//! whose elements map lattice nodes to lattice nodes.
//!
//! Continuous groups are deliberately not supported on grids: a lattice is
//! never rotation invariant, and an interpolated projector would inject an
//! uncontrolled error into the counting experiments. Continuous-group counts
//! come from exact mode separation in the spectra module instead.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Nodes (i·h, j·h) for |i|, |j| ≤ m.
#[derive(Clone, Copy, Debug)]
pub struct SquareGrid {
    pub m: i64,
    pub h: f64,
}

impl SquareGrid {
    pub fn new(m: i64, h: f64) -> Self {
        assert!(m >= 0 && h > 0.0);
        SquareGrid { m, h }
    }

    pub fn side(&self) -> usize {
        (2 * self.m + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: i64, j: i64) -> usize {
        debug_assert!(i.abs() <= self.m && j.abs() <= self.m);
        ((i + self.m) as usize) * self.side() + (j + self.m) as usize
    }

    pub fn node(&self, idx: usize) -> (i64, i64) {
        let side = self.side();
        ((idx / side) as i64 - self.m, (idx % side) as i64 - self.m)
    }

    /// Node permutation induced by an orthogonal lattice-compatible matrix:
    /// `perm[dest] = src` with node(dest) = k·node(src). Errors when k does
    /// not map the lattice to itself.
    pub fn permutation(&self, k: &DMatrix<f64>) -> Result<Vec<usize>> {
        if k.nrows() != 2 || k.ncols() != 2 {
            return Err(Error::Unsupported("grids are two-dimensional".into()));
        }
        let ent = |r: usize, c: usize| -> Result<i64> {
            let v = k[(r, c)];
            let rounded = v.round();
            if (v - rounded).abs() > 1e-9 {
                Err(Error::InvalidAction(format!(
                    "group element entry {v} is not an integer; grid not invariant"
                )))
            } else {
                Ok(rounded as i64)
            }
        };
        let (a, b, c, d) = (ent(0, 0)?, ent(0, 1)?, ent(1, 0)?, ent(1, 1)?);
        let mut perm = vec![0usize; self.len()];
        for src in 0..self.len() {
            let (i, j) = self.node(src);
            let (ni, nj) = (a * i + b * j, c * i + d * j);
            if ni.abs() > self.m || nj.abs() > self.m {
                return Err(Error::InvalidAction("grid not invariant under group element".into()));
            }
            perm[self.index(ni, nj)] = src;
        }
        Ok(perm)
    }
}

/// d_χ · Σ_k w_k · conj(χ(k)) · (field ∘ k⁻¹), as a new grid function.
pub(crate) fn project_field(
    field: &[Complex64],
    grid: &SquareGrid,
    terms: &[(Vec<usize>, Complex64)],
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); field.len()];
    for (perm_inv, coeff) in terms {
        // (field ∘ k⁻¹)(node) = field(k⁻¹ node); perm_inv[dest] is the
        // source index of dest under k, i.e. k⁻¹·dest.
        for dest in 0..field.len() {
            out[dest] += *coeff * field[perm_inv[dest]];
        }
    }
    let _ = grid;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        let g = SquareGrid::new(3, 0.5);
        for idx in 0..g.len() {
            let (i, j) = g.node(idx);
            assert_eq!(g.index(i, j), idx);
        }
    }

    #[test]
    fn rotation_permutation_is_bijective() {
        let g = SquareGrid::new(4, 1.0);
        let k = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let p = g.permutation(&k).unwrap();
        let mut seen = vec![false; g.len()];
        for &s in &p {
            assert!(!seen[s]);
            seen[s] = true;
        }
        // (1,0) ↦ (0,1).
        assert_eq!(p[g.index(0, 1)], g.index(1, 0));
    }

    #[test]
    fn non_lattice_rotation_rejected() {
        let g = SquareGrid::new(4, 1.0);
        let t = 0.3f64;
        let k = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!(g.permutation(&k).is_err());
    }
}
