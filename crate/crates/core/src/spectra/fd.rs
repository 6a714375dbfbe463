//! Finite-difference Dirichlet Laplacian on a centered planar lattice with
//! finite-group isotypic reduction. The isotypic basis is assembled orbit by
//! orbit (projected lattice deltas, locally orthonormalized), so the reduced
//! matrix is exactly Hermitian and blocks over characters are complete.

use super::lanczos::eigenvalues_below;
use super::sparse::SparseHermitian;
use crate::error::{Error, Result};
use crate::group_actions::GroupAction;
use crate::representations::{CharacterSystem, IrrepLabel, SquareGrid};
use crate::domains::DomainSpec;
use nalgebra::DVector;
use num_complex::Complex64;
use std::collections::HashMap;

/// Discretization ceiling: eigenvalues above (0.5/h)²·(2/n) are distorted by
/// stencil dispersion and are excluded from counts and fits.
pub fn fd_validity_ceiling(h: f64, dim: usize) -> f64 {
    (0.5 / h).powi(2) * 2.0 / dim as f64
}

struct InteriorGrid {
    grid: SquareGrid,
    /// grid index → interior index (or usize::MAX)
    to_interior: Vec<usize>,
    /// interior index → grid index
    nodes: Vec<usize>,
}

fn interior_grid(domain: &DomainSpec, h: f64) -> Result<InteriorGrid> {
    if h <= 0.0 {
        return Err(Error::InvalidDomain("grid spacing must be positive".into()));
    }
    let m = (domain.bounding_radius() / h).ceil() as i64 + 1;
    let grid = SquareGrid::new(m, h);
    let mut to_interior = vec![usize::MAX; grid.len()];
    let mut nodes = Vec::new();
    for g in 0..grid.len() {
        let (i, j) = grid.node(g);
        if domain.contains(&DVector::from_vec(vec![i as f64 * h, j as f64 * h])) {
            to_interior[g] = nodes.len();
            nodes.push(g);
        }
    }
    if nodes.is_empty() {
        return Err(Error::InvalidDomain("no grid nodes inside the domain".into()));
    }
    Ok(InteriorGrid { grid, to_interior, nodes })
}

/// Per-element node maps `image[src] = g·src` restricted to interior nodes.
fn interior_actions(action: &GroupAction, ig: &InteriorGrid) -> Result<Vec<Vec<usize>>> {
    let els = match action.kind() {
        crate::group_actions::ActionKind::Finite(els) => els,
        _ => return Err(Error::Unsupported("FD isotypic path requires a finite group".into())),
    };
    let mut out = Vec::with_capacity(els.len());
    for k in els {
        let perm = ig.grid.permutation(k)?; // perm[dest] = src
        let mut image = vec![usize::MAX; ig.grid.len()];
        for (dest, &src) in perm.iter().enumerate() {
            image[src] = dest;
        }
        let mut map = vec![usize::MAX; ig.nodes.len()];
        for (i, &g) in ig.nodes.iter().enumerate() {
            let dest = image[g];
            let j = ig.to_interior[dest];
            if j == usize::MAX {
                return Err(Error::InvalidDomain(
                    "domain is not invariant under the group on this grid".into(),
                ));
            }
            map[i] = j;
        }
        out.push(map);
    }
    Ok(out)
}

/// Isotypic basis vectors for character χ: for each node orbit, the range of
/// the projector on the orbit's delta functions, orthonormalized locally.
/// Each entry is a list of (interior node, coefficient).
fn isotypic_basis(
    chars: &CharacterSystem,
    maps: &[Vec<usize>],
    n_nodes: usize,
    chi: IrrepLabel,
) -> Result<Vec<Vec<(usize, Complex64)>>> {
    let order = maps.len() as f64;
    let d = chars.dimension(chi)? as f64;
    let chi_vals: Vec<Complex64> = (0..maps.len())
        .map(|g| chars.finite_value_by_index(chi, g))
        .collect::<Result<_>>()?;
    let mut seen = vec![false; n_nodes];
    let mut basis = Vec::new();
    for p in 0..n_nodes {
        if seen[p] {
            continue;
        }
        // orbit of p, in first-visit order
        let mut orbit = Vec::new();
        let mut pos = HashMap::new();
        for map in maps.iter() {
            let q = map[p];
            if !pos.contains_key(&q) {
                pos.insert(q, orbit.len());
                orbit.push(q);
                seen[q] = true;
            }
        }
        let q_len = orbit.len();
        // projected deltas restricted to the orbit:
        // (P_χ δ_c)[r] = (d/|G|)·Σ_{g : g·c = r} conj(χ(g))
        let mut cols: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); q_len]; q_len];
        for (c, &pc) in orbit.iter().enumerate() {
            for (g, map) in maps.iter().enumerate() {
                let r = pos[&map[pc]];
                cols[c][r] += chi_vals[g].conj() * (d / order);
            }
        }
        // modified Gram–Schmidt with rank threshold
        let mut kept: Vec<Vec<Complex64>> = Vec::new();
        for mut col in cols {
            for k in &kept {
                let proj: Complex64 =
                    k.iter().zip(&col).map(|(a, b)| a.conj() * b).sum();
                for (ci, ki) in col.iter_mut().zip(k) {
                    *ci -= proj * ki;
                }
            }
            let nrm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm > 1e-10 {
                for ci in &mut col {
                    *ci /= nrm;
                }
                kept.push(col);
            }
        }
        for col in kept {
            basis.push(
                orbit
                    .iter()
                    .zip(&col)
                    .filter(|(_, z)| z.norm_sqr() > 0.0)
                    .map(|(&node, &z)| (node, z))
                    .collect(),
            );
        }
    }
    Ok(basis)
}

/// Reduced stencil matrix Bᴴ·L·B for the 5-point Dirichlet Laplacian, stored
/// in the lower triangle.
fn reduced_matrix(
    ig: &InteriorGrid,
    basis: &[Vec<(usize, Complex64)>],
    h: f64,
) -> SparseHermitian<Complex64> {
    let n_nodes = ig.nodes.len();
    let mut node_terms: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); n_nodes];
    for (alpha, vec) in basis.iter().enumerate() {
        for &(node, w) in vec {
            node_terms[node].push((alpha, w));
        }
    }
    let inv_h2 = 1.0 / (h * h);
    // accumulate the lower triangle of Bᴴ·L·B directly: every (a, b) pair
    // with a ≥ b receives the full sum over L's entries, since both directed
    // copies of each stencil edge are visited below
    let mut acc: HashMap<(usize, usize), Complex64> = HashMap::new();
    let side = ig.grid.side() as i64;
    for (i, &g) in ig.nodes.iter().enumerate() {
        let gi = g as i64;
        let (row, col) = (gi / side, gi % side);
        // diagonal 4/h²
        for &(a, wa) in &node_terms[i] {
            for &(b, wb) in &node_terms[i] {
                if a >= b {
                    *acc.entry((a, b)).or_insert(Complex64::new(0.0, 0.0)) +=
                        wa.conj() * wb * (4.0 * inv_h2);
                }
            }
        }
        // directed edges to the four neighbors (each contributes −1/h²)
        let neighbors = [
            (row - 1, col),
            (row + 1, col),
            (row, col - 1),
            (row, col + 1),
        ];
        for (nr, nc) in neighbors {
            if nr < 0 || nc < 0 || nr >= side || nc >= side {
                continue;
            }
            let j = ig.to_interior[(nr * side + nc) as usize];
            if j == usize::MAX {
                continue; // Dirichlet boundary
            }
            for &(a, wa) in &node_terms[i] {
                for &(b, wb) in &node_terms[j] {
                    if a >= b {
                        *acc.entry((a, b)).or_insert(Complex64::new(0.0, 0.0)) +=
                            wa.conj() * wb * (-inv_h2);
                    }
                }
            }
        }
    }
    let mut out = SparseHermitian::new(basis.len());
    for ((a, b), v) in acc {
        if a == b {
            out.add(a, b, Complex64::new(v.re, 0.0));
        } else if v.norm_sqr() > 0.0 {
            out.add(a, b, v);
        }
    }
    out
}

/// Dimensions of all isotypic blocks (diagnostic: they must sum to the node
/// count).
pub fn fd_block_dimensions(
    domain: &DomainSpec,
    action: &GroupAction,
    h: f64,
) -> Result<Vec<(IrrepLabel, usize)>> {
    let ig = interior_grid(domain, h)?;
    let maps = interior_actions(action, &ig)?;
    let chars = CharacterSystem::new(action)?;
    let labels = chars.characters(0);
    let mut out = Vec::new();
    for chi in labels {
        let b = isotypic_basis(&chars, &maps, ig.nodes.len(), chi)?;
        out.push((chi, b.len()));
    }
    Ok(out)
}

/// Eigenvalues (ascending) of the χ-isotypic block of the FD Dirichlet
/// Laplacian, up to min(lambda_max, dispersion ceiling). The block of a
/// complex character appears for its conjugate with the identical spectrum
/// (the reduced matrices are complex conjugates of each other).
pub fn fd_spectrum(
    domain: &DomainSpec,
    action: &GroupAction,
    chi: IrrepLabel,
    lambda_max: f64,
    h: f64,
) -> Result<Vec<f64>> {
    let ig = interior_grid(domain, h)?;
    let maps = interior_actions(action, &ig)?;
    let chars = CharacterSystem::new(action)?;
    let basis = isotypic_basis(&chars, &maps, ig.nodes.len(), chi)?;
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let cutoff = lambda_max.min(fd_validity_ceiling(h, 2));
    let matrix = reduced_matrix(&ig, &basis, h);
    // real blocks solve in f64; complex ones pay the Hermitian cost
    if matrix.is_real(1e-14) {
        eigenvalues_below(&matrix.real_part(), cutoff, 0x5DE7)
    } else {
        eigenvalues_below(&matrix, cutoff, 0x5DE7)
    }
}
