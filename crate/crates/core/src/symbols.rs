//! Invariant homogeneous principal symbols a(x, ξ) of even order 2m, with
//! ellipticity and invariance self-checks.

use crate::domains::DomainSpec;
use crate::error::{Error, Result};
use crate::group_actions::{haar_quadrature, GroupAction};
use crate::rng::SampleRng;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

pub type SymbolFn = Arc<dyn Fn(&DVector<f64>, &DVector<f64>) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum SymbolKind {
    /// a(x, ξ) = |ξ|^{2m}.
    EuclideanPower,
    /// a(x, ξ) = ⟨Qξ, ξ⟩ with Q symmetric positive definite; order 2.
    InvariantQuadratic(DMatrix<f64>),
    /// a(x, ξ) = w(|x|)·|ξ|^{2m} with w ≥ w_min > 0.
    PositionWeighted { weight: Arc<dyn Fn(f64) -> f64 + Send + Sync>, weight_min: f64 },
    /// User-supplied evaluator; homogeneity and invariance are verified at
    /// construction time rather than trusted.
    Custom(SymbolFn),
}

#[derive(Clone)]
pub struct SymbolSpec {
    kind: SymbolKind,
    /// Even homogeneity order 2m.
    order: u32,
}

impl std::fmt::Debug for SymbolSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match &self.kind {
            SymbolKind::EuclideanPower => "EuclideanPower".to_string(),
            SymbolKind::InvariantQuadratic(q) => format!("InvariantQuadratic({}x{})", q.nrows(), q.ncols()),
            SymbolKind::PositionWeighted { .. } => "PositionWeighted".to_string(),
            SymbolKind::Custom(_) => "Custom".to_string(),
        };
        write!(f, "SymbolSpec {{ kind: {name}, order: {} }}", self.order)
    }
}

impl SymbolSpec {
    pub fn euclidean_power(order: u32) -> Result<Self> {
        check_order(order)?;
        Ok(SymbolSpec { kind: SymbolKind::EuclideanPower, order })
    }

    pub fn invariant_quadratic(q: DMatrix<f64>) -> Result<Self> {
        if q.nrows() != q.ncols() {
            return Err(Error::InvalidSymbol("quadratic form matrix must be square".into()));
        }
        if (q.transpose() - &q).amax() > 1e-12 {
            return Err(Error::InvalidSymbol("quadratic form matrix must be symmetric".into()));
        }
        let eigs = q.clone().symmetric_eigen().eigenvalues;
        if eigs.min() <= 0.0 {
            return Err(Error::InvalidSymbol("quadratic form must be positive definite".into()));
        }
        Ok(SymbolSpec { kind: SymbolKind::InvariantQuadratic(q), order: 2 })
    }

    pub fn position_weighted(
        weight: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        weight_min: f64,
        order: u32,
    ) -> Result<Self> {
        check_order(order)?;
        if !(weight_min > 0.0) {
            return Err(Error::InvalidSymbol("weight lower bound must be positive".into()));
        }
        Ok(SymbolSpec { kind: SymbolKind::PositionWeighted { weight, weight_min }, order })
    }

    /// Pluggable evaluator. Homogeneity in ξ (and, when an action is given,
    /// invariance) is spot-checked immediately; a violating evaluator is
    /// rejected instead of silently corrupting downstream numbers.
    pub fn custom(
        evaluator: SymbolFn,
        order: u32,
        dim: usize,
        action: Option<&GroupAction>,
    ) -> Result<Self> {
        check_order(order)?;
        let s = SymbolSpec { kind: SymbolKind::Custom(evaluator), order };
        let hom = s.homogeneity_residual(dim, 64, 0xC0FFEE);
        if hom > 1e-10 {
            return Err(Error::InvalidSymbol(format!(
                "evaluator violates homogeneity of order {order}: residual {hom:.3e}"
            )));
        }
        if let Some(a) = action {
            let inv = invariance_residual(&s, a, 256, 0xC0FFEE);
            if inv > 1e-10 {
                return Err(Error::InvalidSymbol(format!(
                    "evaluator is not invariant under the action: residual {inv:.3e}"
                )));
            }
        }
        Ok(s)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub(crate) fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn evaluate(&self, x: &DVector<f64>, xi: &DVector<f64>) -> f64 {
        match &self.kind {
            SymbolKind::EuclideanPower => xi.norm_squared().powi(self.order as i32 / 2),
            SymbolKind::InvariantQuadratic(q) => (q * xi).dot(xi),
            SymbolKind::PositionWeighted { weight, .. } => {
                weight(x.norm()) * xi.norm_squared().powi(self.order as i32 / 2)
            }
            SymbolKind::Custom(f) => f(x, xi),
        }
    }

    /// Max relative deviation from a(x, tξ) = t^{2m} a(x, ξ) on random probes.
    pub fn homogeneity_residual(&self, dim: usize, n_samples: u64, seed: u64) -> f64 {
        let mut worst: f64 = 0.0;
        for idx in 0..n_samples {
            let mut rng = SampleRng::new(seed, idx);
            let x = DVector::from_vec((0..dim).map(|_| rng.normal()).collect::<Vec<_>>());
            let xi = DVector::from_vec((0..dim).map(|_| rng.normal()).collect::<Vec<_>>());
            let base = self.evaluate(&x, &xi);
            if base.abs() < 1e-300 {
                continue;
            }
            for t in [0.5, 2.0, 10.0] {
                let scaled = self.evaluate(&x, &(&xi * t));
                let expected = t.powi(self.order as i32) * base;
                worst = worst.max(((scaled - expected) / expected).abs());
            }
        }
        worst
    }
}

fn check_order(order: u32) -> Result<()> {
    if order == 0 || order % 2 != 0 {
        Err(Error::InvalidSymbol(format!("order must be a positive even integer, got {order}")))
    } else {
        Ok(())
    }
}

/// Estimated ellipticity constant: min of a(x, ξ) over sampled x ∈ domain and
/// unit ξ. Includes deterministic probes (x = 0, coordinate directions) so
/// degenerate minima at special points are not missed by sampling.
pub fn ellipticity_margin(
    symbol: &SymbolSpec,
    domain: &DomainSpec,
    dim: usize,
    n_samples: u64,
    seed: u64,
) -> Result<f64> {
    assert!(n_samples >= 1);
    let mut min = f64::INFINITY;
    let mut probe = |x: &DVector<f64>, xi: &DVector<f64>| {
        min = min.min(symbol.evaluate(x, xi));
    };
    let origin = DVector::zeros(dim);
    for k in 0..dim {
        let mut e = DVector::zeros(dim);
        e[k] = 1.0;
        if domain.contains(&origin) {
            probe(&origin, &e);
        }
    }
    let rmax = domain.bounding_radius();
    for idx in 0..n_samples {
        let mut rng = SampleRng::new(seed, idx);
        let x = DVector::from_vec((0..dim).map(|_| rng.uniform_in(-rmax, rmax)).collect::<Vec<_>>());
        if !domain.contains(&x) {
            continue;
        }
        let xi = DVector::from_vec(rng.unit_vector(dim));
        probe(&x, &xi);
    }
    if !min.is_finite() {
        return Err(Error::Numerical("no sample landed inside the domain".into()));
    }
    if min <= 0.0 {
        return Err(Error::InvalidSymbol(format!("ellipticity violated: margin {min:.3e} <= 0")));
    }
    Ok(min)
}

/// Max over samples of |a(kx, kξ) − a(x, ξ)|.
pub fn invariance_residual(
    symbol: &SymbolSpec,
    action: &GroupAction,
    n_samples: u64,
    seed: u64,
) -> f64 {
    let dim = action.ambient_dim();
    let elements = haar_quadrature(action, 12);
    let mut worst: f64 = 0.0;
    for idx in 0..n_samples {
        let mut rng = SampleRng::new(seed, idx);
        let x = DVector::from_vec((0..dim).map(|_| rng.normal()).collect::<Vec<_>>());
        let xi = DVector::from_vec((0..dim).map(|_| rng.normal()).collect::<Vec<_>>());
        let base = symbol.evaluate(&x, &xi);
        let pick = (rng.next_u64() as usize) % elements.len();
        let k = &elements[pick].0;
        worst = worst.max((symbol.evaluate(&(k * &x), &(k * &xi)) - base).abs());
    }
    worst
}
