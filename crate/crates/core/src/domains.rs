//! Bounded invariant domains X ⊂ R^n with the boundary-regularity metadata
//! the counting experiments rely on (0 ∉ ∂X, collar volume ≤ c·ρ).

use crate::error::{Error, Result};
use crate::group_actions::GroupAction;
use crate::rng::SampleRng;
use nalgebra::DVector;
use std::sync::Arc;

/// Membership predicate for user-supplied domains.
pub type MembershipFn = Arc<dyn Fn(&DVector<f64>) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum DomainSpec {
    /// Disk of given radius in R², centered.
    Disk { radius: f64 },
    /// Annulus r_in < |x| < r_out in R².
    Annulus { r_in: f64, r_out: f64 },
    /// Ball of given radius in R^n (n from the paired action).
    Ball { radius: f64 },
    /// Centered box with given half-widths.
    Box { half_widths: Vec<f64> },
    /// Arbitrary membership predicate with an explicit bounding box and a
    /// boundary-collar volume constant (vol(∂X)_ρ ≤ collar_constant·ρ).
    Indicator {
        membership: MembershipFn,
        bounding_half_widths: Vec<f64>,
        collar_constant: f64,
    },
}

impl std::fmt::Debug for DomainSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainSpec::Disk { radius } => write!(f, "Disk {{ radius: {radius} }}"),
            DomainSpec::Annulus { r_in, r_out } => {
                write!(f, "Annulus {{ r_in: {r_in}, r_out: {r_out} }}")
            }
            DomainSpec::Ball { radius } => write!(f, "Ball {{ radius: {radius} }}"),
            DomainSpec::Box { half_widths } => write!(f, "Box {{ half_widths: {half_widths:?} }}"),
            DomainSpec::Indicator { bounding_half_widths, collar_constant, .. } => write!(
                f,
                "Indicator {{ bounding_half_widths: {bounding_half_widths:?}, collar_constant: {collar_constant} }}"
            ),
        }
    }
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidDomain(msg.into()));
        match self {
            DomainSpec::Disk { radius } | DomainSpec::Ball { radius } => {
                if !(*radius > 0.0) {
                    return bad("radius must be positive");
                }
            }
            DomainSpec::Annulus { r_in, r_out } => {
                if !(*r_in > 0.0 && r_out > r_in) {
                    return bad("annulus needs 0 < r_in < r_out");
                }
            }
            DomainSpec::Box { half_widths } => {
                if half_widths.is_empty() || half_widths.iter().any(|w| !(*w > 0.0)) {
                    return bad("box half-widths must be positive");
                }
            }
            DomainSpec::Indicator { bounding_half_widths, collar_constant, .. } => {
                if bounding_half_widths.iter().any(|w| !(*w > 0.0)) {
                    return bad("bounding half-widths must be positive");
                }
                if !(*collar_constant > 0.0) {
                    return bad("collar constant must be positive");
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        match self {
            DomainSpec::Disk { radius } | DomainSpec::Ball { radius } => x.norm() < *radius,
            DomainSpec::Annulus { r_in, r_out } => {
                let r = x.norm();
                r > *r_in && r < *r_out
            }
            DomainSpec::Box { half_widths } => {
                x.len() == half_widths.len()
                    && x.iter().zip(half_widths).all(|(xi, w)| xi.abs() < *w)
            }
            DomainSpec::Indicator { membership, .. } => membership(x),
        }
    }

    /// Radius of a ball containing the whole domain.
    pub fn bounding_radius(&self) -> f64 {
        match self {
            DomainSpec::Disk { radius } | DomainSpec::Ball { radius } => *radius,
            DomainSpec::Annulus { r_out, .. } => *r_out,
            DomainSpec::Box { half_widths } => {
                half_widths.iter().map(|w| w * w).sum::<f64>().sqrt()
            }
            DomainSpec::Indicator { bounding_half_widths, .. } => {
                bounding_half_widths.iter().map(|w| w * w).sum::<f64>().sqrt()
            }
        }
    }

    /// Lebesgue volume in R^dim, when the shape admits a closed form.
    pub fn volume(&self, dim: usize) -> Option<f64> {
        match self {
            DomainSpec::Disk { radius } => Some(std::f64::consts::PI * radius * radius),
            DomainSpec::Annulus { r_in, r_out } => {
                Some(std::f64::consts::PI * (r_out * r_out - r_in * r_in))
            }
            DomainSpec::Ball { radius } => {
                Some(crate::reduced_volume::ball_volume(dim) * radius.powi(dim as i32))
            }
            DomainSpec::Box { half_widths } => {
                Some(half_widths.iter().map(|w| 2.0 * w).product())
            }
            DomainSpec::Indicator { .. } => None,
        }
    }

    /// Boundary-regularity metadata: 0 ∉ ∂X, and the boundary collar has
    /// volume ≤ c·ρ. True by construction for the radial/box kinds; for
    /// Indicator the caller vouches via the recorded collar constant.
    pub fn boundary_regular(&self) -> bool {
        true
    }

    /// Collar volume constant c with vol(∂X)_ρ ≤ c·ρ (perimeter-scale bound).
    pub fn collar_constant(&self) -> f64 {
        match self {
            DomainSpec::Disk { radius } => 4.0 * std::f64::consts::PI * radius,
            DomainSpec::Annulus { r_in, r_out } => 4.0 * std::f64::consts::PI * (r_in + r_out),
            // Generic surface-area scale bound.
            DomainSpec::Ball { radius } => 8.0 * std::f64::consts::PI * radius * radius,
            DomainSpec::Box { half_widths } => {
                let prod: f64 = half_widths.iter().map(|w| 2.0 * w).product();
                2.0 * half_widths.iter().map(|w| prod / w).sum::<f64>()
            }
            DomainSpec::Indicator { collar_constant, .. } => *collar_constant,
        }
    }

    /// Sampled check that the point set is invariant under the action.
    pub fn invariance_residual_samples(
        &self,
        action: &GroupAction,
        n_samples: u64,
        seed: u64,
    ) -> usize {
        let n = action.ambient_dim();
        let rmax = self.bounding_radius() * 1.2;
        let elements = crate::group_actions::haar_quadrature(action, 16);
        let mut violations = 0;
        for idx in 0..n_samples {
            let mut rng = SampleRng::new(seed, idx);
            let x = DVector::from_vec(
                (0..n).map(|_| rng.uniform_in(-rmax, rmax)).collect::<Vec<_>>(),
            );
            let inside = self.contains(&x);
            let pick = (rng.next_u64() as usize) % elements.len();
            let kx = &elements[pick].0 * &x;
            if self.contains(&kx) != inside {
                violations += 1;
            }
        }
        violations
    }
}
