//! TOML experiment configuration: schema, validation, and translation into
//! core types. Unknown keys are rejected so typos fail loudly instead of
//! silently running a different experiment.

use nalgebra::DMatrix;
use reduced_weyl::domains::DomainSpec;
use reduced_weyl::group_actions::{rotation_in_plane, GroupAction};
use reduced_weyl::oscillatory::AmplitudeSpec;
use reduced_weyl::representations::IrrepLabel;
use reduced_weyl::spectra::SpectrumSource;
use reduced_weyl::symbols::SymbolSpec;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupSection,
    pub domain: DomainSection,
    pub operator: OperatorSection,
    #[serde(default)]
    pub characters: Vec<i64>,
    pub lambda_grid: Option<LambdaGridSection>,
    pub mc: Option<McSection>,
    pub quadrature: Option<QuadratureSection>,
    pub fd: Option<FdSection>,
    pub tolerances: Option<TolerancesSection>,
    pub oscillatory: Option<OscillatorySection>,
    pub identities: Option<IdentitiesSection>,
    pub output: Option<OutputSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    /// "planar_so2" | "standard_so3" | "cyclic"
    pub kind: String,
    pub n: usize,
    /// Rotation plane axes for planar_so2 (default [0, 1]).
    pub plane: Option<[usize; 2]>,
    /// Group order for cyclic.
    pub order: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    /// "disk" | "annulus" | "ball" | "box"
    pub kind: String,
    pub radius: Option<f64>,
    pub r_in: Option<f64>,
    pub r_out: Option<f64>,
    pub half_widths: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSection {
    /// "euclidean_power" | "quadratic_form"
    pub kind: String,
    pub order: Option<u32>,
    /// Row-major square matrix for quadratic_form.
    pub q: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaGridSection {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    /// "linear" | "log"
    pub spacing: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub resolution: [usize; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdSection {
    pub h: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesSection {
    pub coefficient_rel: f64,
    pub exponent_abs: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorySection {
    pub r_x: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub mu: Vec<f64>,
    pub character: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesSection {
    pub zero_level_points: usize,
    pub fixed_point_pairs: usize,
    /// Half-side (in nodes) and spacing of the projector test grid.
    pub grid_m: Option<i64>,
    pub grid_h: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub stem: Option<String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config parse error: {e}")))
    }

    pub fn action(&self) -> Result<GroupAction, CliError> {
        let g = &self.group;
        match g.kind.as_str() {
            "planar_so2" => {
                let [i, j] = g.plane.unwrap_or([0, 1]);
                GroupAction::planar_so2(g.n, i, j).map_err(CliError::assumption)
            }
            "standard_so3" => GroupAction::standard_so3(g.n).map_err(CliError::assumption),
            "cyclic" => {
                let k = g
                    .order
                    .ok_or_else(|| CliError::Config("cyclic group needs `order`".into()))?;
                if k == 0 || k > 64 {
                    return Err(CliError::Config(format!("cyclic order {k} out of range 1..=64")));
                }
                if g.n < 2 {
                    return Err(CliError::Config("cyclic group needs n >= 2".into()));
                }
                let step = 2.0 * std::f64::consts::PI / k as f64;
                let els: Vec<DMatrix<f64>> =
                    (0..k).map(|j| rotation_in_plane(g.n, 0, 1, j as f64 * step)).collect();
                GroupAction::finite(g.n, els).map_err(CliError::assumption)
            }
            other => Err(CliError::Config(format!("unknown group kind {other:?}"))),
        }
    }

    pub fn domain(&self) -> Result<DomainSpec, CliError> {
        let d = &self.domain;
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| CliError::Config(format!("domain kind {:?} needs `{name}`", d.kind)))
        };
        let spec = match d.kind.as_str() {
            "disk" => DomainSpec::Disk { radius: need(d.radius, "radius")? },
            "annulus" => DomainSpec::Annulus {
                r_in: need(d.r_in, "r_in")?,
                r_out: need(d.r_out, "r_out")?,
            },
            "ball" => DomainSpec::Ball { radius: need(d.radius, "radius")? },
            "box" => DomainSpec::Box {
                half_widths: d
                    .half_widths
                    .clone()
                    .ok_or_else(|| CliError::Config("domain kind \"box\" needs `half_widths`".into()))?,
            },
            other => return Err(CliError::Config(format!("unknown domain kind {other:?}"))),
        };
        spec.validate().map_err(CliError::assumption)?;
        Ok(spec)
    }

    pub fn symbol(&self) -> Result<SymbolSpec, CliError> {
        let o = &self.operator;
        match o.kind.as_str() {
            "euclidean_power" => {
                let order = o
                    .order
                    .ok_or_else(|| CliError::Config("euclidean_power needs `order`".into()))?;
                SymbolSpec::euclidean_power(order).map_err(CliError::assumption)
            }
            "quadratic_form" => {
                let rows = o
                    .q
                    .as_ref()
                    .ok_or_else(|| CliError::Config("quadratic_form needs `q`".into()))?;
                let n = rows.len();
                if n == 0 || rows.iter().any(|r| r.len() != n) {
                    return Err(CliError::Config("`q` must be a nonempty square matrix".into()));
                }
                let q = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
                SymbolSpec::invariant_quadratic(q).map_err(CliError::assumption)
            }
            other => Err(CliError::Config(format!("unknown operator kind {other:?}"))),
        }
    }

    /// Character labels in the flavor matching the group kind.
    pub fn labels(&self, action: &GroupAction) -> Result<Vec<IrrepLabel>, CliError> {
        if self.characters.is_empty() {
            return Err(CliError::Config("`characters` must be nonempty".into()));
        }
        self.characters
            .iter()
            .map(|&c| match self.group.kind.as_str() {
                "planar_so2" => Ok(IrrepLabel::So2(c)),
                "standard_so3" => {
                    if c < 0 {
                        Err(CliError::Config(format!("SO(3) level {c} must be >= 0")))
                    } else {
                        Ok(IrrepLabel::So3(c as u32))
                    }
                }
                _ => {
                    let classes = action.group_dim(); // finite: dim 0; use kind order below
                    let _ = classes;
                    if c < 0 {
                        Err(CliError::Config(format!("character row {c} must be >= 0")))
                    } else {
                        Ok(IrrepLabel::FiniteRow(c as usize))
                    }
                }
            })
            .collect()
    }

    pub fn spectrum_source(&self, action: &GroupAction) -> Result<SpectrumSource, CliError> {
        let domain = self.domain()?;
        Ok(match (&domain, action.is_finite()) {
            (DomainSpec::Disk { radius }, false) => SpectrumSource::ExactDisk { radius: *radius },
            (DomainSpec::Annulus { r_in, r_out }, false) => {
                SpectrumSource::ExactAnnulus { r_in: *r_in, r_out: *r_out }
            }
            (DomainSpec::Ball { radius }, false) => {
                SpectrumSource::ExactBall3D { radius: *radius }
            }
            (_, true) => {
                let h = self
                    .fd
                    .as_ref()
                    .ok_or_else(|| {
                        CliError::Config("finite-group counting needs an [fd] section".into())
                    })?
                    .h;
                if !(h > 0.0) {
                    return Err(CliError::Config("fd.h must be positive".into()));
                }
                SpectrumSource::FiniteDifference { domain, group: action.clone(), h }
            }
            _ => {
                return Err(CliError::Config(format!(
                    "no exact spectrum source for domain kind {:?} with a continuous group",
                    self.domain.kind
                )))
            }
        })
    }

    pub fn lambda_grid(&self) -> Result<Vec<f64>, CliError> {
        let g = self
            .lambda_grid
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [lambda_grid] section".into()))?;
        if !(g.min > 0.0 && g.max > g.min) || g.points < 2 {
            return Err(CliError::Config(
                "lambda_grid needs 0 < min < max and points >= 2".into(),
            ));
        }
        let n = g.points;
        let grid = match g.spacing.as_str() {
            "linear" => (0..n)
                .map(|i| g.min + (g.max - g.min) * i as f64 / (n - 1) as f64)
                .collect(),
            "log" => {
                let (lo, hi) = (g.min.ln(), g.max.ln());
                (0..n)
                    .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
                    .collect()
            }
            other => {
                return Err(CliError::Config(format!("unknown grid spacing {other:?}")))
            }
        };
        Ok(grid)
    }

    pub fn amplitude(&self) -> Result<(AmplitudeSpec, Vec<f64>, i64), CliError> {
        let o = self
            .oscillatory
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [oscillatory] section".into()))?;
        let amp = AmplitudeSpec::new(o.r_x, o.rho1, o.rho2).map_err(CliError::assumption)?;
        if o.mu.is_empty() {
            return Err(CliError::Config("oscillatory.mu must be nonempty".into()));
        }
        Ok((amp, o.mu.clone(), o.character))
    }

    pub fn quadrature_resolution(&self) -> (usize, usize, usize) {
        match &self.quadrature {
            Some(q) => (q.resolution[0], q.resolution[1], q.resolution[2]),
            None => (64, 64, 64),
        }
    }

    pub fn stem(&self, default: &str) -> String {
        self.output
            .as_ref()
            .and_then(|o| o.stem.clone())
            .unwrap_or_else(|| default.to_string())
    }
}
