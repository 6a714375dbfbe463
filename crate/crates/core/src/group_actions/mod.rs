//! Compact subgroups of O(n) acting on phase space: Lie algebra generators,
//! momentum map, orbits, the zero level set of the momentum map and its
//! regular stratum.
//!
//! Three families are supported: finite matrix groups, a circle rotating one
//! coordinate plane (possibly with a fixed axis), and SO(3) acting on the
//! first three coordinates. Together these cover every configuration used by
//! the counting experiments.

mod identities;
mod zero_level;

pub use identities::{hessian_identity_check, HessianIdentityReport};
pub use zero_level::{sample_regular_zero_level, RegularSample};
pub(crate) use zero_level::{
    normal_space_basis, proposal_bounds as zero_level_proposal_bounds, try_sample_zero_level,
    ChartFrame,
};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, trapezoid_circle};
use crate::rng::SampleRng;
use nalgebra::{DMatrix, DVector};

/// A point z = (x, ξ) of phase space R^n × R^n.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub x: DVector<f64>,
    pub xi: DVector<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, xi: Vec<f64>) -> Self {
        assert_eq!(x.len(), xi.len(), "position/momentum dimension mismatch");
        PhasePoint { x: DVector::from_vec(x), xi: DVector::from_vec(xi) }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// The point as a single vector in R^{2n}.
    pub fn as_vector(&self) -> DVector<f64> {
        let n = self.dim();
        let mut v = DVector::zeros(2 * n);
        v.rows_mut(0, n).copy_from(&self.x);
        v.rows_mut(n, n).copy_from(&self.xi);
        v
    }
}

/// Which compact group acts, and how.
#[derive(Clone, Debug)]
pub enum ActionKind {
    /// Finite subgroup of O(n), stored as an explicit matrix list closed
    /// under products.
    Finite(Vec<DMatrix<f64>>),
    /// SO(2) rotating the (i, j) coordinate plane, fixing the rest.
    PlanarSO2 { plane: (usize, usize) },
    /// SO(3) acting on the first three coordinates, trivially on the rest.
    StandardSO3,
}

#[derive(Clone, Debug)]
pub struct GroupAction {
    kind: ActionKind,
    ambient_dim: usize,
}

/// Isotropy (stabilizer) descriptor of an orbit.
#[derive(Clone, Debug, PartialEq)]
pub enum Isotropy {
    Trivial,
    /// Indices into the finite group's element list that fix the point.
    FiniteSubgroup(Vec<usize>),
    Circle,
    Full,
}

/// Dimension, Riemannian volume and stabilizer of one orbit G·z ⊂ R^{2n}.
/// Finite groups carry counting measure: volume = #orbit.
#[derive(Clone, Debug)]
pub struct OrbitData {
    pub dimension: usize,
    pub volume: f64,
    pub isotropy: Isotropy,
}

/// Antisymmetric generator basis of the Lie algebra.
#[derive(Clone, Debug)]
pub struct LieBasis {
    pub generators: Vec<DMatrix<f64>>,
}

impl LieBasis {
    pub fn dim(&self) -> usize {
        self.generators.len()
    }
}

/// Assumption on the singular set of the action: either it is contained in a
/// strict subspace F (returned as an orthonormal basis, empty for F = {0}),
/// or the hypothesis does not apply to this kind of action.
#[derive(Clone, Debug)]
pub enum SingularSubspace {
    Subspace(Vec<DVector<f64>>),
    NotSatisfied(String),
}

/// Relative singular-value threshold for numerical rank decisions.
pub(crate) const RANK_RTOL: f64 = 1e-8;

fn check_orthogonal(m: &DMatrix<f64>, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::InvalidAction(format!(
            "matrix is {}x{}, ambient dimension is {}",
            m.nrows(),
            m.ncols(),
            n
        )));
    }
    let res = (m.transpose() * m - DMatrix::identity(n, n)).amax();
    if res > 1e-12 {
        return Err(Error::InvalidAction(format!("matrix not orthogonal, residual {res:.3e}")));
    }
    Ok(())
}

impl GroupAction {
    /// Finite subgroup of O(n) given by its full element list.
    pub fn finite(ambient_dim: usize, elements: Vec<DMatrix<f64>>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidAction("empty element list".into()));
        }
        for m in &elements {
            check_orthogonal(m, ambient_dim)?;
        }
        let find = |m: &DMatrix<f64>| -> Option<usize> {
            elements.iter().position(|e| (e - m).amax() <= 1e-9)
        };
        if find(&DMatrix::identity(ambient_dim, ambient_dim)).is_none() {
            return Err(Error::InvalidAction("identity missing from element list".into()));
        }
        for (i, a) in elements.iter().enumerate() {
            // Orthogonal, so the inverse is the transpose.
            if find(&a.transpose()).is_none() {
                return Err(Error::InvalidAction(format!("element {i}: inverse missing")));
            }
            for (j, b) in elements.iter().enumerate() {
                if find(&(a * b)).is_none() {
                    return Err(Error::InvalidAction(format!(
                        "product of elements {i} and {j} missing (set not closed)"
                    )));
                }
            }
        }
        Ok(GroupAction { kind: ActionKind::Finite(elements), ambient_dim })
    }

    /// SO(2) rotating coordinates (i, j), i < j, of R^n.
    pub fn planar_so2(ambient_dim: usize, i: usize, j: usize) -> Result<Self> {
        if i >= j || j >= ambient_dim {
            return Err(Error::InvalidAction(format!(
                "rotation plane ({i},{j}) invalid for dimension {ambient_dim}"
            )));
        }
        Ok(GroupAction { kind: ActionKind::PlanarSO2 { plane: (i, j) }, ambient_dim })
    }

    /// SO(3) on the first three coordinates of R^n, n ≥ 3.
    pub fn standard_so3(ambient_dim: usize) -> Result<Self> {
        if ambient_dim < 3 {
            return Err(Error::InvalidAction("SO(3) action needs ambient dimension >= 3".into()));
        }
        Ok(GroupAction { kind: ActionKind::StandardSO3, ambient_dim })
    }

    pub fn kind(&self) -> &ActionKind {
        &self.kind
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, ActionKind::Finite(_))
    }

    /// Group dimension d (0 for finite groups).
    pub fn group_dim(&self) -> usize {
        match self.kind {
            ActionKind::Finite(_) => 0,
            ActionKind::PlanarSO2 { .. } => 1,
            ActionKind::StandardSO3 => 3,
        }
    }

    /// Apply a group element (an n×n matrix) diagonally to a phase point.
    pub fn apply(&self, k: &DMatrix<f64>, z: &PhasePoint) -> PhasePoint {
        PhasePoint { x: k * &z.x, xi: k * &z.xi }
    }
}

/// Rotation of R^n by angle t in the (i, j) plane.
pub fn rotation_in_plane(n: usize, i: usize, j: usize, t: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n, n);
    let (c, s) = (t.cos(), t.sin());
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(j, i)] = s;
    m[(i, j)] = -s;
    m
}

/// Embed a 3×3 rotation into the first three coordinates of R^n.
pub(crate) fn embed_so3(n: usize, r3: &nalgebra::Matrix3<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n, n);
    for a in 0..3 {
        for b in 0..3 {
            m[(a, b)] = r3[(a, b)];
        }
    }
    m
}

/// ZYZ Euler-angle rotation in SO(3).
pub(crate) fn so3_from_euler(alpha: f64, beta: f64, gamma: f64) -> nalgebra::Matrix3<f64> {
    let rz = |t: f64| {
        nalgebra::Matrix3::new(t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0)
    };
    let ry = |t: f64| {
        nalgebra::Matrix3::new(t.cos(), 0.0, t.sin(), 0.0, 1.0, 0.0, -t.sin(), 0.0, t.cos())
    };
    rz(alpha) * ry(beta) * rz(gamma)
}

/// Haar-uniform random rotation via a uniform unit quaternion.
pub(crate) fn random_so3(rng: &mut SampleRng) -> nalgebra::Matrix3<f64> {
    let q = rng.unit_vector(4);
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    nalgebra::Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    )
}

/// Generator basis. The SO(2) generator is normalized so exp(2πA) = 1; the
/// so(3) generators are L₁, L₂, L₃ with [L₁, L₂] = L₃ cyclically.
pub fn lie_basis(action: &GroupAction) -> LieBasis {
    let n = action.ambient_dim;
    let generators = match &action.kind {
        ActionKind::Finite(_) => vec![],
        ActionKind::PlanarSO2 { plane: (i, j) } => {
            let mut a = DMatrix::zeros(n, n);
            a[(*j, *i)] = 1.0;
            a[(*i, *j)] = -1.0;
            vec![a]
        }
        ActionKind::StandardSO3 => {
            // L_a generates rotation about axis e_a: (L_a)_{bc} = -ε_{abc}.
            let mut ls = Vec::with_capacity(3);
            for axis in 0..3 {
                let mut a = DMatrix::zeros(n, n);
                let (b, c) = ((axis + 1) % 3, (axis + 2) % 3);
                a[(c, b)] = 1.0;
                a[(b, c)] = -1.0;
                ls.push(a);
            }
            ls
        }
    };
    LieBasis { generators }
}

/// Quadrature rule on the group: list of (element, weight) with Σw = 1.
///
/// Finite: all elements, weight 1/|G|. SO(2): `resolution` equispaced angles
/// (exact for trigonometric degree < resolution). SO(3): product Euler rule,
/// trapezoid in α and γ, Gauss–Legendre in cos β — exact for matrix
/// coefficients of irreps of dimension below the resolution.
pub fn haar_quadrature(action: &GroupAction, resolution: usize) -> Vec<(DMatrix<f64>, f64)> {
    assert!(resolution >= 1);
    let n = action.ambient_dim;
    match &action.kind {
        ActionKind::Finite(els) => {
            let w = 1.0 / els.len() as f64;
            els.iter().map(|m| (m.clone(), w)).collect()
        }
        ActionKind::PlanarSO2 { plane: (i, j) } => {
            let (ts, _) = trapezoid_circle(resolution);
            let w = 1.0 / resolution as f64;
            ts.iter().map(|t| (rotation_in_plane(n, *i, *j, *t), w)).collect()
        }
        ActionKind::StandardSO3 => {
            let (ts, _) = trapezoid_circle(resolution);
            let (u, wu) = gauss_legendre(resolution);
            let w_angle = 1.0 / resolution as f64;
            let mut out = Vec::with_capacity(resolution * resolution * resolution);
            for &alpha in &ts {
                for (ui, wui) in u.iter().zip(&wu) {
                    let beta = ui.acos();
                    for &gamma in &ts {
                        let r = so3_from_euler(alpha, beta, gamma);
                        out.push((embed_so3(n, &r), w_angle * w_angle * wui * 0.5));
                    }
                }
            }
            out
        }
    }
}

/// The momentum map component ⟨A_i x, ξ⟩ for each generator.
pub fn momentum_map(action: &GroupAction, z: &PhasePoint) -> Result<DVector<f64>> {
    if action.is_finite() {
        return Err(Error::Unsupported("finite groups have an empty momentum map".into()));
    }
    let basis = lie_basis(action);
    Ok(DVector::from_iterator(
        basis.dim(),
        basis.generators.iter().map(|a| (a * &z.x).dot(&z.xi)),
    ))
}

/// Membership in the zero level of the momentum map (always true for finite
/// groups, whose momentum map is empty).
pub fn in_zero_level(action: &GroupAction, z: &PhasePoint, tol: f64) -> bool {
    assert!(tol > 0.0);
    match momentum_map(action, z) {
        Ok(j) => j.amax() <= tol,
        Err(_) => true,
    }
}

/// Generator images A_i·z as vectors in R^{2n}.
pub(crate) fn generator_images(action: &GroupAction, z: &PhasePoint) -> Vec<DVector<f64>> {
    lie_basis(action)
        .generators
        .iter()
        .map(|a| {
            let n = z.dim();
            let mut v = DVector::zeros(2 * n);
            v.rows_mut(0, n).copy_from(&(a * &z.x));
            v.rows_mut(n, n).copy_from(&(a * &z.xi));
            v
        })
        .collect()
}

/// Numerical rank with the crate-wide relative singular value threshold.
pub(crate) fn numerical_rank(columns: &[DVector<f64>]) -> usize {
    if columns.is_empty() {
        return 0;
    }
    let m = DMatrix::from_columns(columns);
    let sv = m.singular_values();
    let smax = sv.max();
    if smax <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_RTOL * smax).count()
}

/// Riemannian volume of SO(3) for the bi-invariant metric in which the
/// generators L_i have unit length (tr(AᵀB)/2 inner product).
const SO3_VOLUME: f64 = 78.95683520871486895; // 8π²

impl GroupAction {
    fn finite_orbit_points(&self, z: &PhasePoint) -> Vec<PhasePoint> {
        let ActionKind::Finite(els) = &self.kind else { unreachable!() };
        let scale = 1.0 + z.x.amax().max(z.xi.amax());
        let mut pts: Vec<PhasePoint> = Vec::new();
        for m in els {
            let w = self.apply(m, z);
            if !pts
                .iter()
                .any(|p| (&p.x - &w.x).amax() <= 1e-9 * scale && (&p.xi - &w.xi).amax() <= 1e-9 * scale)
            {
                pts.push(w);
            }
        }
        pts
    }
}

/// Orbit dimension, volume and isotropy at z.
pub fn orbit_data(action: &GroupAction, z: &PhasePoint) -> OrbitData {
    match &action.kind {
        ActionKind::Finite(els) => {
            let pts = action.finite_orbit_points(z);
            let scale = 1.0 + z.x.amax().max(z.xi.amax());
            let stab: Vec<usize> = els
                .iter()
                .enumerate()
                .filter(|(_, m)| {
                    let w = action.apply(m, z);
                    (&w.x - &z.x).amax() <= 1e-9 * scale && (&w.xi - &z.xi).amax() <= 1e-9 * scale
                })
                .map(|(i, _)| i)
                .collect();
            let isotropy =
                if stab.len() == 1 { Isotropy::Trivial } else { Isotropy::FiniteSubgroup(stab) };
            OrbitData { dimension: 0, volume: pts.len() as f64, isotropy }
        }
        ActionKind::PlanarSO2 { .. } => {
            let imgs = generator_images(action, z);
            let speed = imgs[0].norm();
            if numerical_rank(&imgs) == 0 {
                return OrbitData { dimension: 0, volume: 1.0, isotropy: Isotropy::Full };
            }
            OrbitData {
                dimension: 1,
                volume: 2.0 * std::f64::consts::PI * speed,
                isotropy: Isotropy::Trivial,
            }
        }
        ActionKind::StandardSO3 => {
            let imgs = generator_images(action, z);
            let dim = numerical_rank(&imgs);
            match dim {
                0 => OrbitData { dimension: 0, volume: 1.0, isotropy: Isotropy::Full },
                2 => {
                    // x and ξ parallel within the acted subspace: the orbit is
                    // the sphere u ↦ (|x₃|u, ±|ξ₃|u), radius² = |x₃|² + |ξ₃|².
                    let rho2 = z.x.rows(0, 3).norm_squared() + z.xi.rows(0, 3).norm_squared();
                    OrbitData {
                        dimension: 2,
                        volume: 4.0 * std::f64::consts::PI * rho2,
                        isotropy: Isotropy::Circle,
                    }
                }
                _ => {
                    // Free orbit: vol = vol(G)·√det⟨L_i z, L_j z⟩, constant
                    // along the orbit; the L_i are orthonormal for the
                    // bi-invariant metric tr(AᵀB)/2 under which vol(G) = 8π².
                    let m = DMatrix::from_columns(&imgs);
                    let gram = m.transpose() * &m;
                    OrbitData {
                        dimension: 3,
                        volume: SO3_VOLUME * gram.determinant().max(0.0).sqrt(),
                        isotropy: Isotropy::Trivial,
                    }
                }
            }
        }
    }
}

/// Monte Carlo validation of `orbit_data().volume` (arc length for circle
/// orbits, surface area for sphere orbits, Jacobian average for free SO(3)
/// orbits). Returns (estimate, standard error).
pub fn orbit_volume_mc(
    action: &GroupAction,
    z: &PhasePoint,
    n_samples: u64,
    seed: u64,
) -> (f64, f64) {
    let data = orbit_data(action, z);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut push = |v: f64| {
        sum += v;
        sumsq += v * v;
    };
    match (&action.kind, data.dimension) {
        (ActionKind::Finite(_), _) => return (data.volume, 0.0),
        (_, 0) => return (data.volume, 0.0),
        (ActionKind::PlanarSO2 { plane: (i, j) }, _) => {
            let a = &lie_basis(action).generators[0];
            for idx in 0..n_samples {
                let mut rng = SampleRng::new(seed, idx);
                let t = rng.uniform_in(0.0, 2.0 * std::f64::consts::PI);
                let k = rotation_in_plane(action.ambient_dim, *i, *j, t);
                let w = action.apply(&k, z);
                let speed = ((a * &w.x).norm_squared() + (a * &w.xi).norm_squared()).sqrt();
                push(2.0 * std::f64::consts::PI * speed);
            }
        }
        (ActionKind::StandardSO3, 2) => {
            // Area of u ↦ (a·u, b·u): average the tangent-plane Jacobian
            // over uniform u ∈ S².
            let a = z.x.rows(0, 3).norm();
            let sgn = if z.x.rows(0, 3).dot(&z.xi.rows(0, 3)) < 0.0 { -1.0 } else { 1.0 };
            let b = sgn * z.xi.rows(0, 3).norm();
            for idx in 0..n_samples {
                let mut rng = SampleRng::new(seed, idx);
                let u = DVector::from_vec(rng.unit_vector(3));
                // Orthonormal tangent basis at u.
                let mut t1 = DVector::from_vec(if u[0].abs() < 0.9 {
                    vec![1.0, 0.0, 0.0]
                } else {
                    vec![0.0, 1.0, 0.0]
                });
                t1 -= &u * u.dot(&t1);
                t1 /= t1.norm();
                let t2 = DVector::from_vec(vec![
                    u[1] * t1[2] - u[2] * t1[1],
                    u[2] * t1[0] - u[0] * t1[2],
                    u[0] * t1[1] - u[1] * t1[0],
                ]);
                // Tangents of the orbit map: (a·t, b·t) for t ∈ {t1, t2}.
                let g11 = (a * a + b * b) * t1.norm_squared();
                let g22 = (a * a + b * b) * t2.norm_squared();
                let g12 = (a * a + b * b) * t1.dot(&t2);
                push(4.0 * std::f64::consts::PI * (g11 * g22 - g12 * g12).max(0.0).sqrt());
            }
        }
        (ActionKind::StandardSO3, _) => {
            let basis = lie_basis(action);
            for idx in 0..n_samples {
                let mut rng = SampleRng::new(seed, idx);
                let k = embed_so3(action.ambient_dim, &random_so3(&mut rng));
                let w = action.apply(&k, z);
                let cols = generator_images_at(&basis, &w);
                let m = DMatrix::from_columns(&cols);
                let gram = m.transpose() * &m;
                push(SO3_VOLUME * gram.determinant().max(0.0).sqrt());
            }
        }
    }
    let nf = n_samples as f64;
    let mean = sum / nf;
    let var = (sumsq / nf - mean * mean).max(0.0);
    (mean, (var / nf).sqrt())
}

fn generator_images_at(basis: &LieBasis, z: &PhasePoint) -> Vec<DVector<f64>> {
    basis
        .generators
        .iter()
        .map(|a| {
            let n = z.dim();
            let mut v = DVector::zeros(2 * n);
            v.rows_mut(0, n).copy_from(&(a * &z.x));
            v.rows_mut(n, n).copy_from(&(a * &z.xi));
            v
        })
        .collect()
}

/// (κ, principal isotropy) for the action on position space.
pub fn principal_orbit_data(action: &GroupAction) -> (usize, Isotropy) {
    match &action.kind {
        ActionKind::PlanarSO2 { .. } => (1, Isotropy::Trivial),
        ActionKind::StandardSO3 => (2, Isotropy::Circle),
        ActionKind::Finite(els) => {
            // Generic stabilizer, detected on pseudorandom position samples.
            let n = action.ambient_dim;
            let mut generic: Option<Vec<usize>> = None;
            for idx in 0..16u64 {
                let mut rng = SampleRng::new(0x9e37, idx);
                let x = DVector::from_vec((0..n).map(|_| rng.normal()).collect());
                let stab: Vec<usize> = els
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| (*m * &x - &x).amax() <= 1e-9 * (1.0 + x.amax()))
                    .map(|(i, _)| i)
                    .collect();
                generic = match generic {
                    None => Some(stab),
                    Some(g) if stab.len() < g.len() => Some(stab),
                    g => g,
                };
            }
            let g = generic.unwrap();
            let iso = if g.len() == 1 { Isotropy::Trivial } else { Isotropy::FiniteSubgroup(g) };
            (0, iso)
        }
    }
}

/// The strict subspace containing all points with non-principal isotropy,
/// when the action admits one.
pub fn singular_subspace(action: &GroupAction) -> SingularSubspace {
    let n = action.ambient_dim;
    let unit = |k: usize| {
        let mut v = DVector::zeros(n);
        v[k] = 1.0;
        v
    };
    match &action.kind {
        ActionKind::PlanarSO2 { plane: (i, j) } => SingularSubspace::Subspace(
            (0..n).filter(|k| k != i && k != j).map(unit).collect(),
        ),
        ActionKind::StandardSO3 => {
            SingularSubspace::Subspace((3..n).map(unit).collect())
        }
        ActionKind::Finite(_) => SingularSubspace::NotSatisfied(
            "finite groups use the zero-dimensional counting path; the singular-set \
             hypothesis for continuous actions does not apply"
                .into(),
        ),
    }
}

/// Max over generator pairs of |⟨A_i x, A_j ξ⟩ − ⟨A_j x, A_i ξ⟩|; vanishes on
/// the zero level of the momentum map.
pub fn symmetry_identity_residual(action: &GroupAction, z: &PhasePoint) -> f64 {
    let basis = lie_basis(action);
    let mut worst: f64 = 0.0;
    for i in 0..basis.dim() {
        for j in (i + 1)..basis.dim() {
            let lhs = (&basis.generators[i] * &z.x).dot(&(&basis.generators[j] * &z.xi));
            let rhs = (&basis.generators[j] * &z.x).dot(&(&basis.generators[i] * &z.xi));
            worst = worst.max((lhs - rhs).abs());
        }
    }
    worst
}

#[cfg(test)]
pub(crate) mod tests;
