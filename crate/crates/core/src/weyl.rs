//! Leading-order predictions for the isotypic counting functions, power-law
//! fits of empirical counts, and the comparison report tying them together.
//!
//! The predicted model is N_χ(λ) ≈ C_χ·λ^p with
//! C_χ = d_χ·[ρ_χ|H₀ : 1]/(2π)^{n−κ} · (reduced volume) and p = (n−κ)/2m,
//! where κ is the principal orbit dimension and 2m the symbol order. The
//! remainder exponent (n−κ−1/4)/2m is carried along for reporting but never
//! fitted: it is an upper bound from the method, not an observed rate.

use crate::domains::DomainSpec;
use crate::error::{Error, Result};
use crate::group_actions::{principal_orbit_data, singular_subspace, GroupAction, SingularSubspace};
use crate::representations::{CharacterSystem, IrrepLabel};
use crate::spectra::CountingSample;
use crate::symbols::{ellipticity_margin, SymbolSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylPrediction {
    pub coefficient: f64,
    pub exponent: f64,
    pub remainder_exponent: f64,
    pub character: IrrepLabel,
}

/// Assemble the predicted counting coefficient and exponent for one
/// character. `volume_estimate` is the reduced volume of
/// a⁻¹((−∞,1]) ∩ Ω₀ over the group, from either estimator in
/// `reduced_volume`.
pub fn predict(
    action: &GroupAction,
    chi: IrrepLabel,
    symbol: &SymbolSpec,
    domain: &DomainSpec,
    volume_estimate: f64,
) -> Result<WeylPrediction> {
    domain.validate()?;
    let n = action.ambient_dim();
    let margin = ellipticity_margin(symbol, domain, n, 512, 0x311)?;
    if margin <= 0.0 {
        return Err(Error::InvalidSymbol(format!(
            "symbol is not elliptic on the cosphere (margin {margin:.3e})"
        )));
    }
    if !action.is_finite() {
        if let SingularSubspace::NotSatisfied(why) = singular_subspace(action) {
            return Err(Error::InvalidAction(format!(
                "singular set is not confined to a strict subspace: {why}"
            )));
        }
    }
    if !domain.boundary_regular() {
        return Err(Error::InvalidDomain(
            "domain carries no boundary-collar volume bound".into(),
        ));
    }
    if !(volume_estimate > 0.0) || !volume_estimate.is_finite() {
        return Err(Error::InvalidDomain(format!(
            "reduced volume estimate must be positive, got {volume_estimate}"
        )));
    }
    let (kappa, _) = principal_orbit_data(action);
    if kappa >= n {
        return Err(Error::InvalidAction(format!(
            "principal orbits of dimension {kappa} exhaust the ambient dimension {n}"
        )));
    }
    let chars = CharacterSystem::new(action)?;
    let d = chars.dimension(chi)? as f64;
    let mult = chars.branching_multiplicity(chi)? as f64;
    let order = symbol.order() as f64;
    let free_dim = (n - kappa) as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    Ok(WeylPrediction {
        coefficient: d * mult / two_pi.powf(free_dim) * volume_estimate,
        exponent: free_dim / order,
        remainder_exponent: (free_dim - 0.25) / order,
        character: chi,
    })
}

#[derive(Debug, Clone, Copy)]
pub enum FitMode {
    FreeExponent,
    FixedExponent(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub fitted_exponent: f64,
    pub fitted_coefficient: f64,
    /// (λ_lo, λ_hi) actually used.
    pub window: (f64, f64),
    /// RMS of log(count) − log(C·λ^p) over the window.
    pub residual_rms: f64,
    pub n_points: usize,
}

/// Power-law fit of counting data over a deterministic window: samples with
/// count ≥ 10 whose log λ lies in the upper half of the valid log-λ range
/// (boundary ties included, i.e. broken toward larger λ).
pub fn fit(samples: &[CountingSample], mode: FitMode) -> Result<FitResult> {
    let mut valid: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.count >= 10 && s.lambda > 0.0)
        .map(|s| (s.lambda, s.count as f64))
        .collect();
    valid.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    valid.dedup_by(|a, b| a.0 == b.0);
    if valid.len() < 5 {
        return Err(Error::Numerical(format!(
            "fit needs at least 5 samples with count ≥ 10, got {}",
            valid.len()
        )));
    }
    let log_lo = valid.first().unwrap().0.ln();
    let log_hi = valid.last().unwrap().0.ln();
    let mid = 0.5 * (log_lo + log_hi);
    let window: Vec<(f64, f64)> =
        valid.iter().filter(|(l, _)| l.ln() >= mid).copied().collect();
    if window.len() < 5 {
        return Err(Error::Numerical(format!(
            "fit window holds only {} samples, need 5",
            window.len()
        )));
    }
    let n = window.len() as f64;
    let xs: Vec<f64> = window.iter().map(|(l, _)| l.ln()).collect();
    let ys: Vec<f64> = window.iter().map(|(_, c)| c.ln()).collect();
    let (lo, hi) = (window.first().unwrap().0, window.last().unwrap().0);
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (exponent, coefficient) = match mode {
        FitMode::FreeExponent => {
            let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
            let sxy: f64 =
                xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
            if sxx < 1e-12 {
                return Err(Error::Numerical("fit window has no λ spread".into()));
            }
            let syy: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
            if syy < 1e-20 {
                return Err(Error::Numerical(
                    "constant counts admit no power-law fit".into(),
                ));
            }
            let slope = sxy / sxx;
            (slope, (mean_y - slope * mean_x).exp())
        }
        FitMode::FixedExponent(p) => {
            if !(p > 0.0) {
                return Err(Error::Numerical(format!("fixed exponent must be positive, got {p}")));
            }
            let c = window.iter().map(|(l, c)| c / l.powf(p)).sum::<f64>() / n;
            (p, c)
        }
    };
    let residual_rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (coefficient.ln() + exponent * x)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(FitResult {
        fitted_exponent: exponent,
        fitted_coefficient: coefficient,
        window: (lo, hi),
        residual_rms,
        n_points: window.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    pub character: IrrepLabel,
    pub predicted_coefficient: f64,
    pub predicted_exponent: f64,
    pub fitted_coefficient: f64,
    pub fitted_exponent: f64,
    pub window: (f64, f64),
    pub rel_err_coefficient: f64,
    pub rel_err_exponent: f64,
    pub coefficient_tolerance: f64,
    pub exponent_tolerance: f64,
    pub coefficient_pass: bool,
    pub exponent_pass: bool,
    pub pass: bool,
}

/// Relative errors between prediction and fit, with verdicts at the given
/// tolerances (overall pass requires both).
pub fn compare(
    prediction: &WeylPrediction,
    fitted: &FitResult,
    coefficient_tolerance: f64,
    exponent_tolerance: f64,
) -> ComparisonReport {
    let rel_c =
        (fitted.fitted_coefficient - prediction.coefficient).abs() / prediction.coefficient;
    let rel_p = (fitted.fitted_exponent - prediction.exponent).abs() / prediction.exponent;
    let cp = rel_c <= coefficient_tolerance;
    let ep = rel_p <= exponent_tolerance;
    ComparisonReport {
        character: prediction.character,
        predicted_coefficient: prediction.coefficient,
        predicted_exponent: prediction.exponent,
        fitted_coefficient: fitted.fitted_coefficient,
        fitted_exponent: fitted.fitted_exponent,
        window: fitted.window,
        rel_err_coefficient: rel_c,
        rel_err_exponent: rel_p,
        coefficient_tolerance,
        exponent_tolerance,
        coefficient_pass: cp,
        exponent_pass: ep,
        pass: cp && ep,
    }
}
