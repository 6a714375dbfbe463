//! Sampling the regular stratum of the zero level of the momentum map.
//!
//! Chart: ξ = s·η with η on the unit sphere, x = r·θ with θ on the unit
//! sphere of the normal space N_ξ = (span{A_i ξ})^⊥. Since ⟨A x, ξ⟩ =
//! −⟨x, A ξ⟩, every chart point lies on the zero level, and for x, ξ ≠ 0 the
//! chart covers the regular stratum bijectively.
//!
//! The surface density carried by each sample is the full Gram determinant of
//! the chart's tangent map: the fibers N_ξ tilt as ξ rotates, so it differs
//! from the naive product s^{n-1}·r^{n-κ-1}. It is computed by central finite
//! differences in normal coordinates and cross-checked against closed forms
//! in the tests.

use super::{
    in_zero_level, lie_basis, orbit_data, principal_orbit_data, GroupAction, PhasePoint, RANK_RTOL,
};
use crate::error::{Error, Result};
use crate::rng::SampleRng;
use nalgebra::{DMatrix, DVector};

/// One chart point on Reg Ω₀ with its surface density and orbit volume.
#[derive(Clone, Debug)]
pub struct RegularSample {
    pub point: PhasePoint,
    /// (r, s, θ-offsets…, η-offsets…) — offsets are zero at the sample itself.
    pub chart_coords: Vec<f64>,
    /// √det(Gram) of the chart tangent map w.r.t. dr·ds·dσ(θ)·dσ(η).
    pub density: f64,
    pub orbit_volume: f64,
}

/// Frozen base point of the chart plus orthonormal tangent frames for the
/// two spheres, so finite differences have well-defined directions.
pub(crate) struct ChartFrame {
    pub eta0: DVector<f64>,
    pub eta_tangent: Vec<DVector<f64>>,
    pub theta0: DVector<f64>,
    pub theta_tangent: Vec<DVector<f64>>,
    kappa: usize,
}

/// Gram–Schmidt `candidates` against `existing`, appending accepted unit
/// vectors until `target` directions are found.
fn complete_orthonormal(
    existing: &[DVector<f64>],
    candidates: impl Iterator<Item = DVector<f64>>,
    target: usize,
) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = existing.to_vec();
    let keep_from = existing.len();
    for mut c in candidates {
        if basis.len() - keep_from == target {
            break;
        }
        for b in &basis {
            let p = b.dot(&c);
            c -= b * p;
        }
        let nrm = c.norm();
        if nrm > 1e-8 {
            c /= nrm;
            // Second pass: normalizing a small residual amplifies the
            // rounding left by the first projection.
            for b in &basis {
                let p = b.dot(&c);
                c -= b * p;
            }
            let nrm2 = c.norm();
            basis.push(c / nrm2);
        }
    }
    basis.split_off(keep_from)
}

/// Orthonormal basis of the orbit-tangent space span{A_i η} (must have
/// dimension κ) followed by an orthonormal basis of its complement N.
fn tangent_and_normal_bases(
    action: &GroupAction,
    eta: &DVector<f64>,
    kappa: usize,
) -> Result<(Vec<DVector<f64>>, Vec<DVector<f64>>)> {
    let n = action.ambient_dim();
    let basis = lie_basis(action);
    let mut rem: Vec<DVector<f64>> = basis.generators.iter().map(|a| a * eta).collect();
    // Pivoted Gram–Schmidt rather than an SVD: the basis vectors stay inside
    // the exact column span, which an iterative SVD does not guarantee near
    // degenerate singular values (and the chart differentials divide any
    // subspace noise by the finite-difference step).
    let scale = rem.iter().map(|c| c.norm()).fold(0.0_f64, f64::max).max(1e-300);
    let mut tangent: Vec<DVector<f64>> = Vec::new();
    loop {
        let Some((idx, nrm)) = rem
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            break;
        };
        if nrm <= RANK_RTOL * scale {
            break;
        }
        let mut q = rem.swap_remove(idx);
        for b in &tangent {
            let p = b.dot(&q);
            q -= b * p;
        }
        q /= q.norm();
        for c in rem.iter_mut() {
            let p = q.dot(c);
            *c -= &q * p;
        }
        tangent.push(q);
    }
    let rank = tangent.len();
    if rank != kappa {
        return Err(Error::Numerical(format!(
            "orbit tangent space has rank {rank}, expected {kappa} (singular direction)"
        )));
    }
    let canon = (0..n).map(|k| {
        let mut e = DVector::zeros(n);
        e[k] = 1.0;
        e
    });
    let normal = complete_orthonormal(&tangent, canon, n - kappa);
    Ok((tangent, normal))
}

/// Orthonormal basis of N_ξ for ξ = s·η (scale-invariant in s).
pub(crate) fn normal_space_basis(
    action: &GroupAction,
    eta: &DVector<f64>,
) -> Result<Vec<DVector<f64>>> {
    let (kappa, _) = principal_orbit_data(action);
    Ok(tangent_and_normal_bases(action, eta, kappa)?.1)
}

impl ChartFrame {
    /// Build the frame at base directions η₀ (unit) and θ₀ (unit, in N_ξ₀).
    pub fn build(action: &GroupAction, eta0: DVector<f64>, theta0: DVector<f64>) -> Result<Self> {
        let n = action.ambient_dim();
        let (kappa, _) = principal_orbit_data(action);
        if kappa == 0 {
            return Err(Error::Unsupported(
                "zero level chart requires a continuous action".into(),
            ));
        }
        let canon = (0..n).map(|k| {
            let mut e = DVector::zeros(n);
            e[k] = 1.0;
            e
        });
        let eta_tangent = complete_orthonormal(std::slice::from_ref(&eta0), canon, n - 1);
        let (tangent, normal) = tangent_and_normal_bases(action, &eta0, kappa)?;
        // θ must lie in N_ξ₀.
        let in_normal: f64 = normal.iter().map(|b| b.dot(&theta0).powi(2)).sum();
        if (in_normal - 1.0).abs() > 1e-8 {
            return Err(Error::Numerical("base direction θ₀ not in the normal space".into()));
        }
        let mut blocked = tangent;
        blocked.push(theta0.clone());
        let theta_tangent =
            complete_orthonormal(&blocked, normal.iter().cloned(), n - kappa - 1);
        Ok(ChartFrame { eta0, eta_tangent, theta0, theta_tangent, kappa })
    }

    /// Unit directions (θ, η) at offsets (u, v) from the base directions.
    /// The chart point is then (r·θ, s·η), linear in the two radii.
    fn directions(
        &self,
        action: &GroupAction,
        u: &[f64],
        v: &[f64],
    ) -> Result<(DVector<f64>, DVector<f64>)> {
        let mut eta = self.eta0.clone();
        for (va, ea) in v.iter().zip(&self.eta_tangent) {
            eta += ea * *va;
        }
        eta /= eta.norm();
        // The normal space is recomputed at the perturbed η so the Gram
        // matrix sees the tilt of the fibers.
        let (_, normal) = tangent_and_normal_bases(action, &eta, self.kappa)?;
        let mut w = self.theta0.clone();
        for (ub, tb) in u.iter().zip(&self.theta_tangent) {
            w += tb * *ub;
        }
        let mut theta = DVector::zeros(eta.len());
        for b in &normal {
            theta += b * b.dot(&w);
        }
        let nrm = theta.norm();
        if nrm < 1e-8 {
            return Err(Error::Numerical("chart direction degenerated under projection".into()));
        }
        theta /= nrm;
        Ok((theta, eta))
    }

    /// Chart map at offsets (u, v) from the base directions.
    fn point(
        &self,
        action: &GroupAction,
        r: f64,
        s: f64,
        u: &[f64],
        v: &[f64],
    ) -> Result<PhasePoint> {
        let (theta, eta) = self.directions(action, u, v)?;
        Ok(PhasePoint { x: theta * r, xi: eta * s })
    }

    /// Finite-difference derivatives of the sphere directions at the base
    /// point. The chart is linear in (r, s), so this fixes the full tangent
    /// map for every radius pair at once.
    pub(crate) fn differential(&self, action: &GroupAction) -> Result<ChartDifferential> {
        let nu = self.theta_tangent.len();
        let nv = self.eta_tangent.len();
        let mut u = vec![0.0; nu];
        let mut v = vec![0.0; nv];
        let mut theta_u = Vec::with_capacity(nu);
        for b in 0..nu {
            u[b] = FD_STEP;
            let (tp, _) = self.directions(action, &u, &v)?;
            u[b] = -FD_STEP;
            let (tm, _) = self.directions(action, &u, &v)?;
            u[b] = 0.0;
            theta_u.push((tp - tm) / (2.0 * FD_STEP));
        }
        let mut theta_v = Vec::with_capacity(nv);
        let mut eta_v = Vec::with_capacity(nv);
        for a in 0..nv {
            v[a] = FD_STEP;
            let (tp, ep) = self.directions(action, &u, &v)?;
            v[a] = -FD_STEP;
            let (tm, em) = self.directions(action, &u, &v)?;
            v[a] = 0.0;
            theta_v.push((tp - tm) / (2.0 * FD_STEP));
            eta_v.push((ep - em) / (2.0 * FD_STEP));
        }
        Ok(ChartDifferential {
            theta0: self.theta0.clone(),
            eta0: self.eta0.clone(),
            theta_u,
            theta_v,
            eta_v,
        })
    }
}

/// Direction derivatives of the chart at a frozen frame; density evaluation
/// at any (r, s) is then a small Gram determinant.
pub(crate) struct ChartDifferential {
    theta0: DVector<f64>,
    eta0: DVector<f64>,
    theta_u: Vec<DVector<f64>>,
    theta_v: Vec<DVector<f64>>,
    eta_v: Vec<DVector<f64>>,
}

impl ChartDifferential {
    /// √det(Gram) of the chart tangent map at (r, s, u=0, v=0).
    pub(crate) fn density(&self, r: f64, s: f64) -> Result<f64> {
        let n = self.theta0.len();
        let mut columns: Vec<DVector<f64>> = Vec::new();
        let stack = |top: &DVector<f64>, bottom: &DVector<f64>| -> DVector<f64> {
            let mut c = DVector::zeros(2 * n);
            c.rows_mut(0, n).copy_from(top);
            c.rows_mut(n, n).copy_from(bottom);
            c
        };
        let zero = DVector::zeros(n);
        columns.push(stack(&self.theta0, &zero));
        columns.push(stack(&zero, &self.eta0));
        for tu in &self.theta_u {
            columns.push(stack(&(tu * r), &zero));
        }
        for (tv, ev) in self.theta_v.iter().zip(&self.eta_v) {
            columns.push(stack(&(tv * r), &(ev * s)));
        }
        let j = DMatrix::from_columns(&columns);
        let gram = j.transpose() * &j;
        let det = gram.determinant();
        if !(det > 0.0) {
            return Err(Error::Numerical(format!(
                "chart Gram determinant not positive: {det:.3e}"
            )));
        }
        Ok(det.sqrt())
    }
}

const FD_STEP: f64 = 1e-5;

/// √det(Gram) of the chart tangent map at (r, s, u=0, v=0). The radial
/// directions are exact; the sphere directions come from central finite
/// differences frozen in the frame differential.
pub(crate) fn chart_density_fd(
    action: &GroupAction,
    frame: &ChartFrame,
    r: f64,
    s: f64,
) -> Result<f64> {
    frame.differential(action)?.density(r, s)
}

/// Draw one chart sample for the (seed, index) stream; `None` when the draw
/// lands on a rejected set (singular direction or r below the axis cutoff).
/// Callers doing Monte Carlo must count `None` as a zero-weight sample.
pub(crate) fn try_sample_zero_level(
    action: &GroupAction,
    r_max: f64,
    s_max: f64,
    seed: u64,
    index: u64,
) -> Option<RegularSample> {
    let n = action.ambient_dim();
    let (kappa, _) = principal_orbit_data(action);
    let mut rng = SampleRng::new(seed, index);
    let eta0 = DVector::from_vec(rng.unit_vector(n));
    let r = rng.uniform() * r_max;
    let s = rng.uniform() * s_max;
    // The orbit volume vanishes on the r → 0 axis; that slice has measure
    // zero in the regular stratum and is excluded.
    if r < 1e-8 || s < 1e-12 {
        return None;
    }
    let normal = normal_space_basis(action, &eta0).ok()?;
    // Uniform direction on the unit sphere of N: project a Gaussian vector.
    let g: Vec<f64> = (0..normal.len()).map(|_| rng.normal()).collect();
    let mut theta0 = DVector::zeros(n);
    for (gi, b) in g.iter().zip(&normal) {
        theta0 += b * *gi;
    }
    let nrm = theta0.norm();
    if nrm < 1e-8 {
        return None;
    }
    theta0 /= nrm;
    let frame = ChartFrame::build(action, eta0, theta0).ok()?;
    let density = chart_density_fd(action, &frame, r, s).ok()?;
    let point = frame.point(action, r, s, &[], &[]).ok()?;
    let volume = orbit_data(action, &point).volume;
    let mut chart_coords = vec![r, s];
    chart_coords.extend(std::iter::repeat(0.0).take(2 * n - kappa - 2));
    Some(RegularSample { point, chart_coords, density, orbit_volume: volume })
}

/// Chart samples on Reg Ω₀ from the documented proposal: η uniform on
/// S^{n−1}, θ uniform on the unit sphere of N_ξ, r uniform on (0, R_r]
/// covering the domain, s uniform on (0, R_s] covering the sublevel set.
pub fn sample_regular_zero_level(
    action: &GroupAction,
    domain: &crate::domains::DomainSpec,
    symbol: &crate::symbols::SymbolSpec,
    level: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<RegularSample>> {
    let (r_max, s_max) = proposal_bounds(action, domain, symbol, level, seed)?;
    let mut out = Vec::with_capacity(n_samples);
    let mut index = 0u64;
    let mut misses = 0u64;
    while out.len() < n_samples {
        if let Some(s) = try_sample_zero_level(action, r_max, s_max, seed, index) {
            debug_assert!(in_zero_level(action, &s.point, 1e-10));
            out.push(s);
        } else {
            misses += 1;
            if misses > 100 * n_samples as u64 + 1000 {
                return Err(Error::Numerical(
                    "proposal rejection rate too high; action may be degenerate".into(),
                ));
            }
        }
        index += 1;
    }
    Ok(out)
}

/// Bounding intervals for the chart proposal: r covers the domain, s covers
/// {a(x,ξ) ≤ level} via the ellipticity margin.
pub(crate) fn proposal_bounds(
    action: &GroupAction,
    domain: &crate::domains::DomainSpec,
    symbol: &crate::symbols::SymbolSpec,
    level: f64,
    seed: u64,
) -> Result<(f64, f64)> {
    domain.validate()?;
    if level < 0.0 {
        return Err(Error::InvalidDomain("sublevel threshold must be nonnegative".into()));
    }
    let c0 = crate::symbols::ellipticity_margin(symbol, domain, action.ambient_dim(), 4000, seed ^ 0x5eed)?;
    let r_max = domain.bounding_radius();
    let s_max = (level / c0).powf(1.0 / symbol.order() as f64);
    if !(r_max.is_finite() && s_max.is_finite()) {
        return Err(Error::Numerical("proposal bounds not finite (unbounded sublevel set)".into()));
    }
    Ok((r_max, s_max))
}

/// Verification hook used by tests: density from the finite-difference Gram
/// at explicitly provided base directions.
#[cfg(test)]
pub(crate) fn density_at(
    action: &GroupAction,
    eta0: DVector<f64>,
    theta0: DVector<f64>,
    r: f64,
    s: f64,
) -> Result<f64> {
    let frame = ChartFrame::build(action, eta0, theta0)?;
    chart_density_fd(action, &frame, r, s)
}
