//! Irreducible characters of the supported groups, the isotypic projector on
//! finite-group-invariant grids, and the branching multiplicity of the
//! trivial representation under restriction to the principal stabilizer.

mod dixon;
mod grid;

pub use grid::SquareGrid;

use crate::error::{Error, Result};
use crate::group_actions::{
    haar_quadrature, principal_orbit_data, ActionKind, GroupAction, Isotropy,
};
use dixon::FiniteTable;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// An irreducible character of the acting group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IrrepLabel {
    /// Row of the finite group's character table.
    FiniteRow(usize),
    /// Circle character e^{imθ}.
    So2(i64),
    /// SO(3) character of dimension 2l+1.
    So3(u32),
}

impl std::fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IrrepLabel::FiniteRow(r) => write!(f, "chi_{r}"),
            IrrepLabel::So2(m) => write!(f, "m={m}"),
            IrrepLabel::So3(l) => write!(f, "l={l}"),
        }
    }
}

/// Character data for one group action; finite groups carry their computed
/// character table, continuous groups evaluate characters analytically.
pub struct CharacterSystem {
    action: GroupAction,
    finite: Option<FiniteTable>,
}

impl CharacterSystem {
    pub fn new(action: &GroupAction) -> Result<Self> {
        let finite = match action.kind() {
            ActionKind::Finite(els) => Some(FiniteTable::build(els.clone())?),
            _ => None,
        };
        Ok(CharacterSystem { action: action.clone(), finite })
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    /// Labels: full table for finite groups; |m| ≤ max_index for SO(2);
    /// l ≤ max_index for SO(3).
    pub fn characters(&self, max_index: u32) -> Vec<IrrepLabel> {
        match self.action.kind() {
            ActionKind::Finite(_) => {
                let t = self.finite.as_ref().unwrap();
                (0..t.table.len()).map(IrrepLabel::FiniteRow).collect()
            }
            ActionKind::PlanarSO2 { .. } => {
                (-(max_index as i64)..=max_index as i64).map(IrrepLabel::So2).collect()
            }
            ActionKind::StandardSO3 => (0..=max_index).map(IrrepLabel::So3).collect(),
        }
    }

    pub fn dimension(&self, chi: IrrepLabel) -> Result<usize> {
        match (chi, self.action.kind()) {
            (IrrepLabel::FiniteRow(r), ActionKind::Finite(_)) => {
                let t = self.finite.as_ref().unwrap();
                t.dims.get(r).copied().ok_or_else(|| {
                    Error::Unsupported(format!("character row {r} out of range"))
                })
            }
            (IrrepLabel::So2(_), ActionKind::PlanarSO2 { .. }) => Ok(1),
            (IrrepLabel::So3(l), ActionKind::StandardSO3) => Ok(2 * l as usize + 1),
            _ => Err(Error::Unsupported("character does not belong to this group".into())),
        }
    }

    /// χ(k) for a group element given as its matrix.
    pub fn value(&self, chi: IrrepLabel, k: &DMatrix<f64>) -> Result<Complex64> {
        match (chi, self.action.kind()) {
            (IrrepLabel::FiniteRow(r), ActionKind::Finite(_)) => {
                let t = self.finite.as_ref().unwrap();
                if r >= t.table.len() {
                    return Err(Error::Unsupported(format!("character row {r} out of range")));
                }
                let e = t.element_index(k)?;
                Ok(t.table[r][t.class_of[e]])
            }
            (IrrepLabel::So2(m), ActionKind::PlanarSO2 { plane: (i, j) }) => {
                let theta = f64::atan2(k[(*j, *i)], k[(*i, *i)]);
                let a = m as f64 * theta;
                Ok(Complex64::new(a.cos(), a.sin()))
            }
            (IrrepLabel::So3(l), ActionKind::StandardSO3) => {
                // χ_l(θ) = 1 + 2Σ_{j≤l} cos(jθ): stable at θ → 0, exact at π.
                let tr = k[(0, 0)] + k[(1, 1)] + k[(2, 2)];
                let theta = ((tr - 1.0) / 2.0).clamp(-1.0, 1.0).acos();
                let mut v = 1.0;
                for j in 1..=l {
                    v += 2.0 * (j as f64 * theta).cos();
                }
                Ok(Complex64::new(v, 0.0))
            }
            _ => Err(Error::Unsupported("character does not belong to this group".into())),
        }
    }

    /// χ evaluated at the g-th stored element of a finite group (index into
    /// the action's element list).
    pub fn finite_value_by_index(&self, chi: IrrepLabel, g: usize) -> Result<Complex64> {
        let (IrrepLabel::FiniteRow(r), Some(t)) = (chi, self.finite.as_ref()) else {
            return Err(Error::Unsupported("indexed character lookup is for finite groups".into()));
        };
        if r >= t.table.len() || g >= t.class_of.len() {
            return Err(Error::Unsupported("character row or element index out of range".into()));
        }
        Ok(t.table[r][t.class_of[g]])
    }

    /// Multiplicity of the trivial representation in the restriction of ρ_χ
    /// to the principal stabilizer H₀.
    pub fn branching_multiplicity(&self, chi: IrrepLabel) -> Result<usize> {
        let (_, h0) = principal_orbit_data(&self.action);
        match (chi, self.action.kind()) {
            (IrrepLabel::So2(_), ActionKind::PlanarSO2 { .. }) => Ok(1), // H₀ trivial
            (IrrepLabel::So3(_), ActionKind::StandardSO3) => {
                // H₀ is the circle; weight 0 appears once among {−l,…,l}.
                Ok(1)
            }
            (IrrepLabel::FiniteRow(r), ActionKind::Finite(_)) => {
                let t = self.finite.as_ref().unwrap();
                if r >= t.table.len() {
                    return Err(Error::Unsupported(format!("character row {r} out of range")));
                }
                let members: Vec<usize> = match h0 {
                    Isotropy::Trivial => vec![t.identity],
                    Isotropy::FiniteSubgroup(idx) => idx,
                    _ => {
                        return Err(Error::Numerical(
                            "finite group with continuous stabilizer descriptor".into(),
                        ))
                    }
                };
                let avg: Complex64 = members
                    .iter()
                    .map(|&e| t.table[r][t.class_of[e]])
                    .sum::<Complex64>()
                    / members.len() as f64;
                let rounded = avg.re.round();
                if (avg - Complex64::new(rounded, 0.0)).norm() > 1e-8 || rounded < 0.0 {
                    return Err(Error::Numerical(format!(
                        "branching average {avg} is not a nonnegative integer; \
                         character table defect"
                    )));
                }
                Ok(rounded as usize)
            }
            _ => Err(Error::Unsupported("character does not belong to this group".into())),
        }
    }

    /// Isotypic projection of a grid function: d_χ·Σ_k w_k·conj(χ(k))·(f∘k⁻¹).
    /// Finite groups only; every element must map the lattice to itself.
    pub fn project_isotypic(
        &self,
        chi: IrrepLabel,
        field: &[Complex64],
        grid: &SquareGrid,
    ) -> Result<Vec<Complex64>> {
        if !self.action.is_finite() {
            return Err(Error::Unsupported(
                "grid-based isotypic projection is only defined for finite groups; \
                 continuous groups use analytic mode separation"
                    .into(),
            ));
        }
        if field.len() != grid.len() {
            return Err(Error::Numerical("field length does not match the grid".into()));
        }
        let d = self.dimension(chi)? as f64;
        let rule = haar_quadrature(&self.action, 1);
        let mut terms = Vec::with_capacity(rule.len());
        for (k, w) in &rule {
            let coeff = self.value(chi, k)?.conj() * (*w * d);
            terms.push((grid.permutation(k)?, coeff));
        }
        Ok(grid::project_field(field, grid, &terms))
    }

    /// Number of conjugacy classes (finite groups).
    pub fn class_count(&self) -> Option<usize> {
        self.finite.as_ref().map(|t| t.classes.len())
    }

    /// Table entry (row, class) together with class sizes, for export.
    pub fn table_rows(&self) -> Option<(Vec<usize>, Vec<Vec<Complex64>>, Vec<usize>)> {
        self.finite.as_ref().map(|t| {
            (
                t.dims.clone(),
                t.table.clone(),
                t.classes.iter().map(|c| c.len()).collect(),
            )
        })
    }
}

#[cfg(test)]
mod tests;
