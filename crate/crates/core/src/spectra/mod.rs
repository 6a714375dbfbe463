//! Eigenvalues per isotypic component. Rotation-invariant model problems get
//! exact spectra from Bessel zeros; general planar domains with a finite
//! symmetry group go through a finite-difference Dirichlet Laplacian with an
//! isotypic block reduction.

mod bessel;
mod fd;
mod lanczos;
mod sparse;

pub use bessel::{bessel_j, bessel_j_and_deriv, bessel_y, bessel_zeros, cross_product_zeros, debye_zero_count};
pub use fd::{fd_block_dimensions, fd_spectrum, fd_validity_ceiling};

use crate::error::{Error, Result};
use crate::representations::IrrepLabel;

/// One point of the counting function N_χ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingSample {
    pub lambda: f64,
    pub count: usize,
    pub character: IrrepLabel,
}

/// Where eigenvalues come from.
#[derive(Debug, Clone)]
pub enum SpectrumSource {
    /// Dirichlet disk of the given radius; characters are SO(2) modes m.
    ExactDisk { radius: f64 },
    /// Dirichlet annulus r_in < |x| < r_out; characters are SO(2) modes m.
    ExactAnnulus { r_in: f64, r_out: f64 },
    /// Dirichlet 3-ball; characters are either SO(3) levels l or SO(2) modes
    /// m of the rotation about the third axis.
    ExactBall3D { radius: f64 },
    /// Finite-difference Laplacian reduced by a finite group; records the
    /// discretization's validity ceiling.
    FiniteDifference {
        domain: crate::domains::DomainSpec,
        group: crate::group_actions::GroupAction,
        h: f64,
    },
}

impl SpectrumSource {
    /// Upper end of the trustworthy spectral window (∞ for exact sources).
    pub fn validity_ceiling(&self) -> f64 {
        match self {
            SpectrumSource::FiniteDifference { h, .. } => fd_validity_ceiling(*h, 2),
            _ => f64::INFINITY,
        }
    }
}

/// Ascending (eigenvalue, multiplicity) list of the χ-isotypic spectrum up
/// to lambda_max (and the FD validity ceiling, where applicable).
pub fn model_spectrum(
    source: &SpectrumSource,
    chi: IrrepLabel,
    lambda_max: f64,
) -> Result<Vec<(f64, usize)>> {
    if !(lambda_max > 0.0) {
        return Err(Error::InvalidDomain("lambda_max must be positive".into()));
    }
    let t = lambda_max.sqrt();
    match (source, chi) {
        (SpectrumSource::ExactDisk { radius }, IrrepLabel::So2(m)) => {
            let nu = m.unsigned_abs() as f64;
            let zeros = bessel_zeros(nu, t * radius)?;
            Ok(zeros.iter().map(|z| ((z / radius).powi(2), 1)).collect())
        }
        (SpectrumSource::ExactAnnulus { r_in, r_out }, IrrepLabel::So2(m)) => {
            let nu = m.unsigned_abs() as f64;
            let zeros = cross_product_zeros(nu, *r_in, *r_out, t)?;
            Ok(zeros.iter().map(|z| (z * z, 1)).collect())
        }
        (SpectrumSource::ExactBall3D { radius }, IrrepLabel::So3(l)) => {
            let zeros = bessel_zeros(l as f64 + 0.5, t * radius)?;
            Ok(zeros
                .iter()
                .map(|z| ((z / radius).powi(2), 2 * l as usize + 1))
                .collect())
        }
        (SpectrumSource::ExactBall3D { radius }, IrrepLabel::So2(m)) => {
            // the axial-rotation m-component of the ball collects one copy of
            // every spherical level l ≥ |m|
            let mut out = Vec::new();
            let mut l = m.unsigned_abs() as f64;
            loop {
                let zeros = bessel_zeros(l + 0.5, t * radius)?;
                if zeros.is_empty() {
                    break;
                }
                out.extend(zeros.iter().map(|z| ((z / radius).powi(2), 1usize)));
                l += 1.0;
            }
            out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            Ok(out)
        }
        (SpectrumSource::FiniteDifference { domain, group, h }, IrrepLabel::FiniteRow(_)) => {
            let eigs = fd_spectrum(domain, group, chi, lambda_max, *h)?;
            Ok(eigs.into_iter().map(|e| (e, 1)).collect())
        }
        _ => Err(Error::Unsupported(format!(
            "character {chi} is incompatible with this spectrum source"
        ))),
    }
}

/// Right-continuous counting samples count(λ) = Σ mult(e ≤ λ).
pub fn counting_function(
    eigs: &[(f64, usize)],
    lambda_grid: &[f64],
    character: IrrepLabel,
) -> Vec<CountingSample> {
    let mut out = Vec::with_capacity(lambda_grid.len());
    for &lambda in lambda_grid {
        let count = eigs
            .iter()
            .take_while(|(e, _)| *e <= lambda)
            .map(|(_, m)| m)
            .sum();
        out.push(CountingSample { lambda, count, character });
    }
    out
}
