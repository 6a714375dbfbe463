//! Shift-inverted Lanczos with full reorthogonalization, organized as
//! spectrum slicing: LDLᴴ inertia counts fix how many eigenvalues each
//! window must contain, a shift at the window center converges them, and
//! deflated restarts recover multiple eigenvalues. Every accepted pair is
//! verified by an explicit residual ‖Hv − λv‖.

use super::sparse::{ProfileLdl, Scalar, SparseHermitian};
use crate::error::{Error, Result};
use crate::rng::SampleRng;

/// #{eigenvalues of T < x} by the Sturm sequence of the tridiagonal
/// (alpha, beta).
fn tridiag_count_below(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0usize;
    let mut d = 1.0f64;
    for (i, &a) in alpha.iter().enumerate() {
        let b2 = if i == 0 { 0.0 } else { beta[i - 1] * beta[i - 1] };
        d = a - x - b2 / d;
        if d == 0.0 {
            d = 1e-300;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues of the tridiagonal by bisection, ascending.
fn tridiag_eigenvalues(alpha: &[f64], beta: &[f64]) -> Vec<f64> {
    let m = alpha.len();
    if m == 0 {
        return Vec::new();
    }
    let radius = alpha
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let bl = if i > 0 { beta[i - 1].abs() } else { 0.0 };
            let br = if i < m - 1 { beta[i].abs() } else { 0.0 };
            a.abs() + bl + br
        })
        .fold(0.0f64, f64::max)
        + 1.0;
    let mut eigs = Vec::with_capacity(m);
    for k in 0..m {
        let (mut lo, mut hi) = (-radius, radius);
        for _ in 0..70 {
            let mid = 0.5 * (lo + hi);
            if tridiag_count_below(alpha, beta, mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        eigs.push(0.5 * (lo + hi));
    }
    eigs
}

/// Eigenvector of the tridiagonal for eigenvalue θ by one step of inverse
/// iteration (pivoted tridiagonal elimination with a fill diagonal).
fn tridiag_eigenvector(alpha: &[f64], beta: &[f64], theta: f64) -> Vec<f64> {
    let m = alpha.len();
    let mut a = vec![0.0; m]; // subdiagonal of working matrix
    let mut b: Vec<f64> = alpha.iter().map(|&x| x - theta).collect(); // diag
    let mut c = vec![0.0; m]; // superdiagonal
    let mut f = vec![0.0; m]; // second superdiagonal (fill)
    for i in 0..m - 1 {
        a[i + 1] = beta[i];
        c[i] = beta[i];
    }
    let mut rhs = vec![1.0; m];
    // forward elimination with partial pivoting
    for i in 0..m - 1 {
        if a[i + 1].abs() > b[i].abs() {
            // swap rows i and i+1; row i holds (b, c, f), row i+1 (a, b, c)
            let (r1, r2, r3) = (b[i], c[i], f[i]);
            b[i] = a[i + 1];
            c[i] = b[i + 1];
            f[i] = c[i + 1];
            a[i + 1] = r1;
            b[i + 1] = r2;
            c[i + 1] = r3;
            rhs.swap(i, i + 1);
        }
        let piv = if b[i].abs() < 1e-300 { 1e-300_f64.copysign(b[i]) } else { b[i] };
        let l = a[i + 1] / piv;
        b[i + 1] -= l * c[i];
        c[i + 1] -= l * f[i];
        rhs[i + 1] -= l * rhs[i];
        a[i + 1] = 0.0;
    }
    // back substitution
    let mut v = vec![0.0; m];
    for i in (0..m).rev() {
        let mut acc = rhs[i];
        if i + 1 < m {
            acc -= c[i] * v[i + 1];
        }
        if i + 2 < m {
            acc -= f[i] * v[i + 2];
        }
        let piv = if b[i].abs() < 1e-300 { 1e-300_f64.copysign(b[i]) } else { b[i] };
        v[i] = acc / piv;
    }
    let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= nrm;
    }
    v
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.conj() * *y;
    }
    acc
}

fn norm<S: Scalar>(a: &[S]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy<S: Scalar>(y: &mut [S], alpha: S, x: &[S]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * *xi;
    }
}

fn orthogonalize_against<S: Scalar>(w: &mut [S], basis: &[Vec<S>]) {
    for v in basis {
        let c = dot(v, w);
        axpy(w, -c, v);
    }
}

fn random_unit<S: Scalar>(n: usize, rng: &mut SampleRng) -> Vec<S> {
    let mut v: Vec<S> = (0..n).map(|_| S::from_re(rng.normal())).collect();
    let nrm = norm(&v);
    for x in &mut v {
        *x = x.scale(1.0 / nrm);
    }
    v
}

/// One deflated Lanczos pass on the shift-inverted operator. Returns
/// converged (eigenvalue, Ritz vector) pairs with eigenvalue ∈ [lo, hi).
fn lanczos_pass<S: Scalar>(
    h: &SparseHermitian<S>,
    ldl: &ProfileLdl<S>,
    sigma: f64,
    lo: f64,
    hi: f64,
    missing: usize,
    deflate: &[Vec<S>],
    rng: &mut SampleRng,
) -> Result<Vec<(f64, Vec<S>)>> {
    let n = h.n;
    let max_m = (3 * missing + 60).min(n - deflate.len());
    let mut v = random_unit::<S>(n, rng);
    orthogonalize_against(&mut v, deflate);
    let nrm = norm(&v);
    if nrm < 1e-8 {
        return Err(Error::Convergence("deflation space exhausted the start vector".into()));
    }
    for x in &mut v {
        *x = x.scale(1.0 / nrm);
    }
    let mut basis: Vec<Vec<S>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut result: Vec<(f64, Vec<S>)> = Vec::new();
    let mut m = 0usize;
    while m < max_m {
        let mut w = basis[m].clone();
        ldl.solve_in_place(&mut w);
        let a = dot(&basis[m], &w).re();
        alpha.push(a);
        // full reorthogonalization (two sweeps) against basis and deflation
        for _ in 0..2 {
            orthogonalize_against(&mut w, &basis);
            orthogonalize_against(&mut w, deflate);
        }
        let b = norm(&w);
        m += 1;
        let check_now = b < 1e-12 || m % 10 == 0 || m == max_m;
        if check_now {
            let thetas = tridiag_eigenvalues(&alpha, &beta);
            let mut pairs = Vec::new();
            let mut all_in_window_converged = true;
            for &theta in &thetas {
                if theta.abs() < 1e-300 {
                    continue;
                }
                let lambda = sigma + 1.0 / theta;
                if lambda < lo || lambda >= hi {
                    continue;
                }
                let s = tridiag_eigenvector(&alpha, &beta, theta);
                let resid_op = b * s[m - 1].abs();
                // eigenvalue perturbation through the spectral transform
                if resid_op > 1e-10 * theta.abs().max(1e-3) {
                    all_in_window_converged = false;
                    continue;
                }
                pairs.push((lambda, s));
            }
            if (pairs.len() >= missing && all_in_window_converged) || b < 1e-12 || m == max_m {
                for (lambda, s) in pairs {
                    let mut x = vec![S::zero(); n];
                    for (c, vb) in s.iter().zip(&basis) {
                        axpy(&mut x, S::from_re(*c), vb);
                    }
                    let nx = norm(&x);
                    if nx < 1e-8 {
                        continue;
                    }
                    for xi in &mut x {
                        *xi = xi.scale(1.0 / nx);
                    }
                    // explicit residual in the original problem
                    let mut hx = vec![S::zero(); n];
                    h.apply(&x, &mut hx);
                    axpy(&mut hx, S::from_re(-lambda), &x);
                    let rel = norm(&hx) / lambda.abs().max(1.0);
                    if rel <= 1e-8 {
                        result.push((lambda, x));
                    }
                }
                return Ok(result);
            }
        }
        if b < 1e-12 {
            break;
        }
        beta.push(b);
        let mut next = w;
        for x in &mut next {
            *x = x.scale(1.0 / b);
        }
        basis.push(next);
    }
    Ok(result)
}

/// Factor H − σI, nudging σ slightly when it collides with an eigenvalue.
fn robust_factor<S: Scalar>(
    h: &SparseHermitian<S>,
    sigma: f64,
    scale: f64,
) -> Result<(ProfileLdl<S>, f64)> {
    let mut s = sigma;
    for k in 0..6 {
        match h.factor_shifted(s) {
            Ok(f) => return Ok((f, s)),
            Err(_) => s = sigma + (k + 1) as f64 * 3e-7 * scale,
        }
    }
    Err(Error::Numerical(format!("no usable factorization near shift {sigma}")))
}

/// All eigenvalues of the Hermitian matrix in [0, lambda_max), ascending,
/// by inertia-validated spectrum slicing. The matrix is assumed positive
/// semidefinite (a Dirichlet Laplacian block); `lambda_max` > 0.
pub(crate) fn eigenvalues_below<S: Scalar>(
    h: &SparseHermitian<S>,
    lambda_max: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if h.n == 0 {
        return Ok(Vec::new());
    }
    let perm = h.rcm_ordering();
    let h = h.permuted(&perm);
    let mut rng = SampleRng::new(seed, 0xE16);
    let scale = lambda_max.max(1.0);
    let (top, top_sigma) = robust_factor(&h, lambda_max, scale)?;
    let total = top.negative_count();
    drop(top);
    if total == 0 {
        return Ok(Vec::new());
    }
    let windows = total.div_ceil(60);
    let mut boundaries = Vec::with_capacity(windows + 1);
    let mut counts = Vec::with_capacity(windows + 1);
    for w in 0..windows {
        let sigma = top_sigma * w as f64 / windows as f64;
        let (f, used) = robust_factor(&h, sigma, scale)?;
        boundaries.push(used);
        counts.push(f.negative_count());
    }
    boundaries.push(top_sigma);
    counts.push(total);
    let mut eigs: Vec<f64> = Vec::with_capacity(total);
    for w in 0..windows {
        let (lo, hi) = (boundaries[w], boundaries[w + 1]);
        let target = counts[w + 1] - counts[w];
        if target == 0 {
            continue;
        }
        let (ldl, sigma) = robust_factor(&h, 0.5 * (lo + hi), scale)?;
        let mut found: Vec<(f64, Vec<S>)> = Vec::new();
        for _pass in 0..8 {
            if found.len() >= target {
                break;
            }
            let deflate: Vec<Vec<S>> = found.iter().map(|(_, v)| v.clone()).collect();
            let missing = target - found.len();
            let new = lanczos_pass(&h, &ldl, sigma, lo, hi, missing, &deflate, &mut rng)?;
            if new.is_empty() && !found.is_empty() {
                // nothing more converged from this start; try another
                continue;
            }
            for (lambda, v) in new {
                found.push((lambda, v));
                if found.len() == target {
                    break;
                }
            }
        }
        if found.len() != target {
            return Err(Error::Convergence(format!(
                "window [{lo:.6}, {hi:.6}) expected {target} eigenvalues, converged {}",
                found.len()
            )));
        }
        eigs.extend(found.into_iter().map(|(l, _)| l));
    }
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(eigs)
}
