//! Matrix identities along the zero level at fixed points of group elements:
//! the 2κ×2κ determinant 𝒟 built from an orthonormal orbit frame (expected
//! to equal 1), the U/V block relations behind it, and the in-orbit Hessian
//! factor Λ.

use super::{generator_images, GroupAction, PhasePoint, RANK_RTOL};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Residuals and determinants produced by [`hessian_identity_check`].
#[derive(Clone, Debug)]
pub struct HessianIdentityReport {
    /// det of the 2κ×2κ transversal block; should be 1.
    pub d_det: f64,
    /// ‖UᵀU + VᵀV − I_κ‖_∞.
    pub uv_a: f64,
    /// ‖UᵀV − VᵀU‖_∞.
    pub uv_b: f64,
    /// ‖(k−1)(UVᵀ − VUᵀ)‖_∞.
    pub uv_d: f64,
    /// ‖(k−1)(UUᵀ + VVᵀ) − (k−1)‖_∞.
    pub uv_e: f64,
    /// det of the orbit-direction factor Λ = ((k−1)(k⁻¹−1) + f)|_{gz}.
    pub lambda_det: f64,
    /// Orbit dimension κ at z.
    pub kappa: usize,
}

/// Gram–Schmidt on the generator images A_i·z, keeping the coefficient
/// combinations: returns κ vectors B_j·z ∈ R^{2n} (orthonormal) and the
/// coefficients of B_j in the generator basis.
fn orbit_frame(images: &[DVector<f64>]) -> (Vec<DVector<f64>>, Vec<Vec<f64>>) {
    let d = images.len();
    let scale = images.iter().map(|v| v.norm()).fold(0.0f64, f64::max).max(1e-300);
    let mut frame: Vec<DVector<f64>> = Vec::new();
    let mut coeffs: Vec<Vec<f64>> = Vec::new();
    for (i, img) in images.iter().enumerate() {
        let mut v = img.clone();
        let mut c = vec![0.0; d];
        c[i] = 1.0;
        for (b, cb) in frame.iter().zip(&coeffs) {
            let p = b.dot(&v);
            v -= b * p;
            for (ck, cbk) in c.iter_mut().zip(cb) {
                *ck -= p * cbk;
            }
        }
        let nrm = v.norm();
        if nrm > RANK_RTOL * scale {
            frame.push(v / nrm);
            coeffs.push(c.iter().map(|ck| ck / nrm).collect());
        }
    }
    (frame, coeffs)
}

/// Coefficient vectors (in the stored generator basis) of an orthonormal
/// basis of the orthogonal complement of the stabilizer algebra at z, using
/// the tr(AᵀB) inner product; the matrices A_r = Σ c_i A_i / √2 then have
/// unit trace norm. Relies on the stored generators being tr-orthogonal with
/// equal norm √2, which holds for both continuous kinds.
fn stabilizer_complement_coeffs(images: &[DVector<f64>], kappa: usize) -> Vec<Vec<f64>> {
    let m = DMatrix::from_columns(images);
    let svd = m.svd(false, true);
    let vt = svd.v_t.as_ref().unwrap();
    (0..kappa).map(|j| vt.row(j).iter().cloned().collect()).collect()
}

/// Builds the orthonormal orbit frame at z, evaluates the 2κ×2κ determinant
/// identity and the U/V relations for a group element k fixing z, and
/// returns det Λ for the orbit-direction Hessian factor.
pub fn hessian_identity_check(
    action: &GroupAction,
    z: &PhasePoint,
    k: &DMatrix<f64>,
) -> Result<HessianIdentityReport> {
    let n = action.ambient_dim();
    let scale = 1.0 + z.x.amax().max(z.xi.amax());
    let kz = action.apply(k, z);
    if (&kz.x - &z.x).amax() > 1e-10 * scale || (&kz.xi - &z.xi).amax() > 1e-10 * scale {
        return Err(Error::Numerical("group element does not fix the given point".into()));
    }
    let images = generator_images(action, z);
    if images.is_empty() {
        return Err(Error::Unsupported("identity check requires a continuous action".into()));
    }
    let (frame, _) = orbit_frame(&images);
    let kappa = frame.len();
    if kappa == 0 {
        return Err(Error::Numerical("orbit is zero-dimensional at this point".into()));
    }

    // U = [B_j x], V = [B_j ξ]: the position/momentum halves of the frame.
    let u_cols: Vec<DVector<f64>> = frame.iter().map(|b| b.rows(0, n).clone_owned()).collect();
    let v_cols: Vec<DVector<f64>> = frame.iter().map(|b| b.rows(n, n).clone_owned()).collect();
    let u = DMatrix::from_columns(&u_cols);
    let v = DMatrix::from_columns(&v_cols);
    let kinv = k.transpose();
    let eye_n = DMatrix::identity(n, n);
    let eye_k = DMatrix::identity(kappa, kappa);

    let km1 = k - &eye_n;
    let kinv_m1 = &kinv - &eye_n;

    // Transversal block, in the frame basis.
    let tl = u.transpose() * &kinv_m1 * &u + &eye_k;
    let tr = u.transpose() * (&km1 * &kinv_m1) * &v;
    let bl = -(u.transpose() * &v);
    let br = u.transpose() * &km1 * &u + &eye_k;
    let mut d_mat = DMatrix::zeros(2 * kappa, 2 * kappa);
    d_mat.view_mut((0, 0), (kappa, kappa)).copy_from(&tl);
    d_mat.view_mut((0, kappa), (kappa, kappa)).copy_from(&tr);
    d_mat.view_mut((kappa, 0), (kappa, kappa)).copy_from(&bl);
    d_mat.view_mut((kappa, kappa), (kappa, kappa)).copy_from(&br);
    let d_det = d_mat.determinant();

    let uv_a = (u.transpose() * &u + v.transpose() * &v - &eye_k).amax();
    let uv_b = (u.transpose() * &v - v.transpose() * &u).amax();
    let uv_d = (&km1 * (&u * v.transpose() - &v * u.transpose())).amax();
    let uv_e = (&km1 * (&u * u.transpose() + &v * v.transpose()) - &km1).amax();

    // Λ acts on the orbit tangent space: ((k−1)(k⁻¹−1) + f)|_{gz}, where
    // f(w) = Σ_r ⟨A_r z, w⟩ A_r z over a tr-orthonormal basis A_r of the
    // stabilizer complement.
    let comp = stabilizer_complement_coeffs(&images, kappa);
    let a_r_z: Vec<DVector<f64>> = comp
        .iter()
        .map(|c| {
            let mut w = DVector::zeros(2 * n);
            for (ci, img) in c.iter().zip(&images) {
                w += img * *ci;
            }
            w / std::f64::consts::SQRT_2
        })
        .collect();
    let apply_lambda = |w: &DVector<f64>| -> DVector<f64> {
        let wx = w.rows(0, n).clone_owned();
        let wxi = w.rows(n, n).clone_owned();
        let mx = &km1 * (&kinv_m1 * &wx);
        let mxi = &km1 * (&kinv_m1 * &wxi);
        let mut out = DVector::zeros(2 * n);
        out.rows_mut(0, n).copy_from(&mx);
        out.rows_mut(n, n).copy_from(&mxi);
        for arz in &a_r_z {
            out += arz * arz.dot(w);
        }
        out
    };
    let mut lambda0 = DMatrix::zeros(kappa, kappa);
    for (j, bj) in frame.iter().enumerate() {
        let lw = apply_lambda(bj);
        for (i, bi) in frame.iter().enumerate() {
            lambda0[(i, j)] = bi.dot(&lw);
        }
    }
    let lambda_det = lambda0.determinant();

    Ok(HessianIdentityReport { d_det, uv_a, uv_b, uv_d, uv_e, lambda_det, kappa })
}
