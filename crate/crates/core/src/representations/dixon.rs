//! Character tables of small finite matrix groups (|G| ≤ 64), computed by
//! the classical modular method: the class-sum eigenvalue vectors are found
//! over a prime field F_p with p ≡ 1 (mod exponent), then the character
//! values are lifted to cyclotomic integers via discrete Fourier inversion
//! on the root-of-unity powers.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub(crate) struct FiniteTable {
    /// Group elements (index 0 is not necessarily the identity).
    pub elements: Vec<DMatrix<f64>>,
    pub identity: usize,
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
    /// rows = irreps (sorted by dimension), columns = classes.
    pub table: Vec<Vec<Complex64>>,
    pub dims: Vec<usize>,
}

const MAX_ORDER: usize = 64;

// ---- F_p helpers -----------------------------------------------------------

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Reduced row echelon form mod p; returns pivot columns.
fn rref(m: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, pr);
        let inv = invmod(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = mulmod(*x, inv, p);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for c2 in 0..cols {
                    let t = mulmod(f, m[r][c2], p);
                    m[i][c2] = (m[i][c2] + p - t) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Basis of the kernel of an n×n matrix mod p, as column vectors.
fn kernel_basis(a: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let mut m = a.to_vec();
    let pivots = rref(&mut m, p);
    let mut basis = Vec::new();
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().cloned().collect();
    for free in 0..n {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![0u64; n];
        v[free] = 1;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = (p - m[row][free] % p) % p;
        }
        basis.push(v);
    }
    basis
}

// ---- group structure -------------------------------------------------------

fn find_element(elements: &[DMatrix<f64>], m: &DMatrix<f64>) -> Result<usize> {
    elements
        .iter()
        .position(|e| (e - m).amax() <= 1e-9)
        .ok_or_else(|| Error::Numerical("element product left the stored group".into()))
}

impl FiniteTable {
    pub fn build(elements: Vec<DMatrix<f64>>) -> Result<Self> {
        let g = elements.len();
        if g > MAX_ORDER {
            return Err(Error::Unsupported(format!(
                "character tables limited to groups of order ≤ {MAX_ORDER}, got {g}"
            )));
        }
        let n = elements[0].nrows();
        let identity = find_element(&elements, &DMatrix::identity(n, n))?;
        let mut mult = vec![vec![0usize; g]; g];
        for i in 0..g {
            for j in 0..g {
                mult[i][j] = find_element(&elements, &(&elements[i] * &elements[j]))?;
            }
        }
        let inverse: Vec<usize> = (0..g)
            .map(|i| (0..g).find(|&j| mult[i][j] == identity).unwrap())
            .collect();

        // Conjugacy classes.
        let mut class_of = vec![usize::MAX; g];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        // Identity class first, then insertion order.
        for seed in std::iter::once(identity).chain(0..g) {
            if class_of[seed] != usize::MAX {
                continue;
            }
            let cid = classes.len();
            let mut members = Vec::new();
            for h in 0..g {
                let c = mult[mult[h][seed]][inverse[h]];
                if class_of[c] == usize::MAX {
                    class_of[c] = cid;
                    members.push(c);
                }
            }
            classes.push(members);
        }
        let r = classes.len();

        // Exponent of the group.
        let order_of = |i: usize| -> usize {
            let mut k = i;
            let mut o = 1;
            while k != identity {
                k = mult[k][i];
                o += 1;
            }
            o
        };
        let lcm = |a: usize, b: usize| a / gcd(a, b) * b;
        let e = (0..g).map(order_of).fold(1usize, lcm);

        // Prime p ≡ 1 (mod e), large enough to identify small nonnegative
        // integers (dims ≤ 8, root multiplicities ≤ |G|) uniquely.
        let mut p = 0u64;
        let mut cand = (4 * g as u64 / e as u64 + 1) * e as u64 + 1;
        while p == 0 {
            if is_prime(cand) && cand > 4 * g as u64 {
                p = cand;
            }
            cand += e as u64;
        }

        // Class-product coefficients a_{ijk} = #{x ∈ C_i, y ∈ C_j : xy = z_k}
        // for the class representative z_k = classes[k][0]; the eigenvalue
        // vectors λ with (N_i λ)_j = λ_i λ_j give the characters.
        let mut nmats: Vec<Vec<Vec<u64>>> = vec![vec![vec![0u64; r]; r]; r];
        for i in 0..r {
            for j in 0..r {
                for &x in &classes[i] {
                    for &y in &classes[j] {
                        let k = class_of[mult[x][y]];
                        // a_{ijk} counts products landing anywhere in C_k;
                        // divide by |C_k| to count those equal to the rep.
                        nmats[i][j][k] += 1;
                    }
                }
                for k in 0..r {
                    nmats[i][j][k] /= classes[k].len() as u64;
                }
            }
        }
        // N_i as an r×r matrix over F_p with (N_i)_{jk} = a_{ijk}.
        let class_matrix = |i: usize| -> Vec<Vec<u64>> {
            (0..r).map(|j| (0..r).map(|k| nmats[i][j][k] % p).collect()).collect()
        };

        // Split F_p^r into common eigenvectors of all class matrices.
        let mut subspaces: Vec<Vec<Vec<u64>>> = vec![(0..r)
            .map(|j| {
                let mut v = vec![0u64; r];
                v[j] = 1;
                v
            })
            .collect()];
        for i in 1..r {
            if subspaces.iter().all(|s| s.len() == 1) {
                break;
            }
            let ni = class_matrix(i);
            let mut next = Vec::new();
            for s in subspaces {
                if s.len() == 1 {
                    next.push(s);
                    continue;
                }
                let dim = s.len();
                // Columns of N_i·B expressed in the basis B: R solves B R = N_i B.
                let apply = |v: &Vec<u64>| -> Vec<u64> {
                    (0..r)
                        .map(|row| {
                            let mut acc = 0u64;
                            for c in 0..r {
                                acc = (acc + mulmod(ni[row][c], v[c], p)) % p;
                            }
                            acc
                        })
                        .collect()
                };
                let images: Vec<Vec<u64>> = s.iter().map(apply).collect();
                let rmat = express_in_span(&s, &images, p)?;
                let mut found_dims = 0;
                for lam in 0..p {
                    if found_dims == dim {
                        break;
                    }
                    let mut shifted = rmat.clone();
                    for d in 0..dim {
                        shifted[d][d] = (shifted[d][d] + p - lam % p) % p;
                    }
                    let ker = kernel_basis(&shifted, p);
                    if ker.is_empty() {
                        continue;
                    }
                    found_dims += ker.len();
                    // Map kernel coefficients back to ambient vectors.
                    let sub: Vec<Vec<u64>> = ker
                        .iter()
                        .map(|coef| {
                            let mut v = vec![0u64; r];
                            for (cj, basis_vec) in coef.iter().zip(&s) {
                                for t in 0..r {
                                    v[t] = (v[t] + mulmod(*cj, basis_vec[t], p)) % p;
                                }
                            }
                            v
                        })
                        .collect();
                    next.push(sub);
                }
                if found_dims != dim {
                    return Err(Error::Numerical(
                        "class matrix failed to split over the chosen prime field".into(),
                    ));
                }
            }
            subspaces = next;
        }
        if subspaces.len() != r || subspaces.iter().any(|s| s.len() != 1) {
            return Err(Error::Numerical("character splitting did not reach dimension one".into()));
        }

        // Each eigenvector λ (normalized to λ_identity = 1) yields one irrep.
        let class_of_inverse: Vec<usize> =
            (0..r).map(|j| class_of[inverse[classes[j][0]]]).collect();
        let zroot = primitive_root_of_unity(p, e as u64)?;
        let mut rows: Vec<(usize, Vec<Complex64>)> = Vec::new();
        for s in &subspaces {
            let mut lam = s[0].clone();
            if lam[0] == 0 {
                return Err(Error::Numerical("eigenvector vanishes on the identity class".into()));
            }
            let scale = invmod(lam[0], p);
            for v in lam.iter_mut() {
                *v = mulmod(*v, scale, p);
            }
            // d² ≡ |G| / Σ_j λ_j λ_{j̄} / |C_j| (second orthogonality).
            let mut denom = 0u64;
            for j in 0..r {
                let t = mulmod(lam[j], lam[class_of_inverse[j]], p);
                denom = (denom + mulmod(t, invmod(classes[j].len() as u64, p), p)) % p;
            }
            let t = mulmod(g as u64 % p, invmod(denom, p), p);
            let d = (1..=g)
                .find(|&d| mulmod(d as u64, d as u64, p) == t)
                .ok_or_else(|| Error::Numerical("irrep dimension not recovered".into()))?;
            // χ_p on each class, then lift through root-of-unity multiplicities.
            let chi_p: Vec<u64> = (0..r)
                .map(|j| mulmod(mulmod(d as u64, lam[j], p), invmod(classes[j].len() as u64, p), p))
                .collect();
            let mut chi = vec![Complex64::new(0.0, 0.0); r];
            for j in 0..r {
                let rep = classes[j][0];
                // Classes of the powers rep^l.
                let mut pw = identity;
                let mut class_pow = Vec::with_capacity(e);
                for _ in 0..e {
                    class_pow.push(class_of[pw]);
                    pw = mult[pw][rep];
                }
                for k in 0..e {
                    // m_k = (1/e) Σ_l χ_p(g^l) z^{−lk}: multiplicity of the
                    // eigenvalue exp(2πik/e) in ρ(g_j).
                    let mut acc = 0u64;
                    for (l, &cl) in class_pow.iter().enumerate() {
                        let zpow = powmod(zroot, ((e - k) as u64 * l as u64) % e as u64, p);
                        acc = (acc + mulmod(chi_p[cl], zpow, p)) % p;
                    }
                    let mk = mulmod(acc, invmod(e as u64, p), p);
                    if mk > g as u64 {
                        return Err(Error::Numerical(format!(
                            "root multiplicity lift out of range: {mk}"
                        )));
                    }
                    if mk > 0 {
                        let ang = 2.0 * std::f64::consts::PI * k as f64 / e as f64;
                        chi[j] += Complex64::new(ang.cos(), ang.sin()) * mk as f64;
                    }
                }
            }
            rows.push((d, chi));
        }
        rows.sort_by(|a, b| {
            a.0.cmp(&b.0).then_with(|| {
                for (x, y) in a.1.iter().zip(&b.1) {
                    let c = x
                        .re
                        .partial_cmp(&y.re)
                        .unwrap()
                        .then(x.im.partial_cmp(&y.im).unwrap());
                    if c != std::cmp::Ordering::Equal {
                        return c;
                    }
                }
                std::cmp::Ordering::Equal
            })
        });
        let dims: Vec<usize> = rows.iter().map(|(d, _)| *d).collect();
        let table: Vec<Vec<Complex64>> = rows.into_iter().map(|(_, chi)| chi).collect();

        let out = FiniteTable { elements, identity, class_of, classes, table, dims };
        out.verify(g)?;
        Ok(out)
    }

    /// Row orthogonality and the dimension sum rule.
    fn verify(&self, g: usize) -> Result<()> {
        let r = self.classes.len();
        let d2: usize = self.dims.iter().map(|d| d * d).sum();
        if d2 != g {
            return Err(Error::Numerical(format!("Σ d² = {d2} ≠ |G| = {g}")));
        }
        for i in 0..r {
            for j in 0..r {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..r {
                    acc += self.table[i][c]
                        * self.table[j][c].conj()
                        * (self.classes[c].len() as f64 / g as f64);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                if (acc - expect).norm() > 1e-10 {
                    return Err(Error::Numerical(format!(
                        "row orthogonality violated at ({i},{j}): {acc}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn element_index(&self, k: &DMatrix<f64>) -> Result<usize> {
        find_element(&self.elements, k)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Primitive e-th root of unity mod p (requires e | p−1).
fn primitive_root_of_unity(p: u64, e: u64) -> Result<u64> {
    if e == 1 {
        return Ok(1);
    }
    'outer: for g in 2..p {
        // g must be a generator of F_p^× restricted appropriately: it is
        // enough that g^{(p−1)/e} has exact order e.
        let z = powmod(g, (p - 1) / e, p);
        if z == 1 {
            continue;
        }
        let mut acc = z;
        for _ in 1..e {
            if acc == 1 {
                continue 'outer;
            }
            acc = mulmod(acc, z, p);
        }
        if acc == 1 {
            return Ok(z);
        }
    }
    Err(Error::Numerical("no primitive root of unity found".into()))
}

/// Solve B·R = C where the columns of C lie in span(columns of B); the
/// vectors are length-r columns listed in `basis` / `images`.
fn express_in_span(
    basis: &[Vec<u64>],
    images: &[Vec<u64>],
    p: u64,
) -> Result<Vec<Vec<u64>>> {
    let r = basis[0].len();
    let dim = basis.len();
    // Augmented matrix [Bᵀcolumns | image columns] as r×(dim + dim).
    let mut m: Vec<Vec<u64>> = (0..r)
        .map(|row| {
            let mut v: Vec<u64> = basis.iter().map(|b| b[row]).collect();
            v.extend(images.iter().map(|c| c[row]));
            v
        })
        .collect();
    let pivots = rref(&mut m, p);
    // Every pivot must be in the basis block.
    if pivots.iter().any(|&c| c >= dim) {
        return Err(Error::Numerical("class matrix image left the invariant subspace".into()));
    }
    let mut rmat = vec![vec![0u64; dim]; dim];
    for (row, &pc) in pivots.iter().enumerate() {
        for j in 0..dim {
            rmat[pc][j] = m[row][dim + j];
        }
    }
    Ok(rmat)
}
