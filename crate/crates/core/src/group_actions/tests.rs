use super::*;
use crate::rng::SampleRng;
use nalgebra::{DMatrix, DVector};

pub(crate) fn c4_group() -> GroupAction {
    let els: Vec<DMatrix<f64>> = (0..4)
        .map(|k| {
            let t = std::f64::consts::FRAC_PI_2 * k as f64;
            // Exact entries so products close exactly.
            let (c, s) = match k {
                0 => (1.0, 0.0),
                1 => (0.0, 1.0),
                2 => (-1.0, 0.0),
                _ => (0.0, -1.0),
            };
            let _ = t;
            DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
        })
        .collect();
    GroupAction::finite(2, els).unwrap()
}

fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

#[test]
fn lie_basis_canonical_generators() {
    let so2 = GroupAction::planar_so2(2, 0, 1).unwrap();
    let b = lie_basis(&so2);
    assert_eq!(b.dim(), 1);
    let expected = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    assert!((&b.generators[0] - expected).amax() < 1e-15);
    // exp(2πA) = 1: check the rotation it generates has period 2π.
    let full_turn = rotation_in_plane(2, 0, 1, 2.0 * std::f64::consts::PI);
    assert!((full_turn - DMatrix::identity(2, 2)).amax() < 1e-14);

    assert_eq!(lie_basis(&c4_group()).dim(), 0);

    let so3 = GroupAction::standard_so3(3).unwrap();
    let ls = lie_basis(&so3).generators;
    assert_eq!(ls.len(), 3);
    for a in &ls {
        assert!((a.transpose() + a).amax() < 1e-14, "not antisymmetric");
    }
    // [L1, L2] = L3 cyclically.
    for i in 0..3 {
        let j = (i + 1) % 3;
        let k = (i + 2) % 3;
        assert!((commutator(&ls[i], &ls[j]) - &ls[k]).amax() < 1e-14);
    }
}

#[test]
fn action_constructors_validate() {
    assert!(GroupAction::planar_so2(2, 1, 1).is_err());
    assert!(GroupAction::planar_so2(2, 0, 2).is_err());
    assert!(GroupAction::standard_so3(2).is_err());
    // Non-closed set rejected: drop one element of C4.
    let mut els: Vec<DMatrix<f64>> = vec![
        DMatrix::identity(2, 2),
        DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
    ];
    assert!(GroupAction::finite(2, els.clone()).is_err());
    els.push(DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]));
    els.push(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    assert!(GroupAction::finite(2, els).is_ok());
}

#[test]
fn haar_quadrature_weights_and_orthogonality() {
    let c4 = c4_group();
    let rule = haar_quadrature(&c4, 1);
    assert_eq!(rule.len(), 4);
    assert!(rule.iter().all(|(_, w)| (*w - 0.25).abs() < 1e-15));

    let so2 = GroupAction::planar_so2(2, 0, 1).unwrap();
    let rule = haar_quadrature(&so2, 8);
    assert_eq!(rule.len(), 8);
    // ∫ χ₁ dk = 0 for the first circle character (trace picks out 2cos t).
    let chi1: f64 = rule.iter().map(|(k, w)| w * (k[(0, 0)] + k[(1, 1)])).sum();
    assert!(chi1.abs() < 1e-14, "chi1 quadrature {chi1}");

    let so3 = GroupAction::standard_so3(3).unwrap();
    let rule = haar_quadrature(&so3, 8);
    let total: f64 = rule.iter().map(|(_, w)| w).sum();
    assert!((total - 1.0).abs() < 1e-12);
    // ∫(1 + 2cos θ) dk = 0; the trace of a rotation is 1 + 2cos θ.
    let chi1_of = |rule: &[(DMatrix<f64>, f64)]| -> f64 {
        rule.iter().map(|(k, w)| w * (k[(0, 0)] + k[(1, 1)] + k[(2, 2)])).sum()
    };
    let at8 = chi1_of(&rule);
    let at16 = chi1_of(&haar_quadrature(&so3, 16));
    assert!(at8.abs() < 1e-8, "chi1 on SO(3): {at8}");
    assert!((at8 - at16).abs() < 1e-8, "reference rule disagrees: {at8} vs {at16}");
}

#[test]
fn momentum_map_values() {
    let so2 = GroupAction::planar_so2(2, 0, 1).unwrap();
    let j = momentum_map(&so2, &PhasePoint::new(vec![1.0, 0.0], vec![0.0, 1.0])).unwrap();
    assert!((j[0] - 1.0).abs() < 1e-15);
    let j = momentum_map(&so2, &PhasePoint::new(vec![1.0, 0.0], vec![1.0, 0.0])).unwrap();
    assert!(j[0].abs() < 1e-15);

    let so3 = GroupAction::standard_so3(3).unwrap();
    let j = momentum_map(&so3, &PhasePoint::new(vec![0.0, 0.0, 2.0], vec![0.0, 0.0, 5.0])).unwrap();
    assert!(j.amax() < 1e-15);

    assert!(momentum_map(&c4_group(), &PhasePoint::new(vec![1.0, 0.0], vec![0.0, 1.0])).is_err());
}

#[test]
fn zero_level_membership() {
    let so2 = GroupAction::planar_so2(2, 0, 1).unwrap();
    assert!(in_zero_level(&so2, &PhasePoint::new(vec![1.0, 0.0], vec![1.0, 0.0]), 1e-10));
    assert!(!in_zero_level(&so2, &PhasePoint::new(vec![1.0, 0.0], vec![0.0, 1.0]), 1e-10));
    let so3 = GroupAction::standard_so3(3).unwrap();
    let z = PhasePoint::new(vec![1.0, 1.0, 0.0], vec![-0.3, -0.3, 0.0]);
    assert!(in_zero_level(&so3, &z, 1e-10));
    // Finite groups: vacuously true.
    assert!(in_zero_level(&c4_group(), &PhasePoint::new(vec![1.0, 0.0], vec![0.0, 1.0]), 1e-10));
}

#[test]
fn zero_level_scaling_homogeneity() {
    let so3 = GroupAction::standard_so3(3).unwrap();
    for idx in 0..200u64 {
        let mut rng = SampleRng::new(11, idx);
        let w = DVector::from_vec(rng.unit_vector(3));
        let z = PhasePoint { x: &w * rng.normal(), xi: &w * rng.normal() };
        assert!(in_zero_level(&so3, &z, 1e-10));
        let (s, t) = (rng.uniform_in(-3.0, 3.0), rng.uniform_in(-3.0, 3.0));
        let scaled = PhasePoint { x: &z.x * s, xi: &z.xi * t };
        assert!(in_zero_level(&so3, &scaled, 1e-9));
    }
}

#[test]
fn orbit_data_closed_forms() {
    let so2 = GroupAction::planar_so2(2, 0, 1).unwrap();
    let od = orbit_data(&so2, &PhasePoint::new(vec![1.0, 0.0], vec![2.0, 0.0]));
    assert_eq!(od.dimension, 1);
    assert!((od.volume - 2.0 * std::f64::consts::PI * 5.0f64.sqrt()).abs() < 1e-12);
    assert_eq!(od.isotropy, Isotropy::Trivial);

    let so3 = GroupAction::standard_so3(3).unwrap();
    let od = orbit_data(&so3, &PhasePoint::new(vec![1.0, 0.0, 0.0], vec![0.5, 0.0, 0.0]));
    assert_eq!(od.dimension, 2);
    assert!((od.volume - 4.0 * std::f64::consts::PI * 1.25).abs() < 1e-12);
    assert_eq!(od.isotropy, Isotropy::Circle);

    let od = orbit_data(&c4_group(), &PhasePoint::new(vec![1.0, 0.0], vec![0.0, 0.0]));
    assert_eq!(od.dimension, 0);
    assert_eq!(od.volume, 4.0);

    // Fixed point of the whole group.
    let od = orbit_data(&so3, &PhasePoint::new(vec![0.0; 3], vec![0.0; 3]));
    assert_eq!(od.dimension, 0);
    assert_eq!(od.isotropy, Isotropy::Full);
}

#[test]
fn orbit_volume_monte_carlo_agrees() {
    // The MC estimators integrate the same Jacobians stochastically; a tiny
    // absolute floor covers the zero-variance cases.
    let cases: Vec<(GroupAction, PhasePoint)> = vec![
        (
            GroupAction::planar_so2(2, 0, 1).unwrap(),
            PhasePoint::new(vec![1.0, 0.0], vec![2.0, 0.0]),
        ),
        (
            GroupAction::planar_so2(3, 0, 1).unwrap(),
            PhasePoint::new(vec![1.0, 0.0, 0.5], vec![0.3, 0.0, 0.2]),
        ),
        (
            GroupAction::standard_so3(3).unwrap(),
            PhasePoint::new(vec![1.0, 0.0, 0.0], vec![0.5, 0.0, 0.0]),
        ),
        (
            // Free 3-dimensional orbit.
            GroupAction::standard_so3(3).unwrap(),
            PhasePoint::new(vec![1.0, 0.0, 0.0], vec![0.0, 0.7, 0.0]),
        ),
    ];
    for (action, z) in cases {
        let exact = orbit_data(&action, &z).volume;
        let (mc, se) = orbit_volume_mc(&action, &z, 4000, 77);
        assert!(
            (mc - exact).abs() <= 3.0 * se + 1e-9 * exact.abs(),
            "orbit volume mismatch: exact {exact}, mc {mc} ± {se}"
        );
    }
}

#[test]
fn so3_free_orbit_volume_is_orbit_frame_invariant() {
    // det⟨L_i kz, L_j kz⟩ must not depend on k along the orbit.
    let so3 = GroupAction::standard_so3(3).unwrap();
    let z = PhasePoint::new(vec![1.0, 0.2, 0.0], vec![0.0, 0.7, -0.3]);
    let v0 = orbit_data(&so3, &z).volume;
    for idx in 0..32u64 {
        let mut rng = SampleRng::new(5, idx);
        let k = embed_so3(3, &random_so3(&mut rng));
        let v = orbit_data(&so3, &so3.apply(&k, &z)).volume;
        assert!((v - v0).abs() < 1e-10 * v0, "{v} vs {v0}");
    }
}

#[test]
fn principal_orbit_types() {
    let (k, iso) = principal_orbit_data(&GroupAction::planar_so2(3, 0, 1).unwrap());
    assert_eq!((k, iso), (1, Isotropy::Trivial));
    let (k, iso) = principal_orbit_data(&GroupAction::standard_so3(3).unwrap());
    assert_eq!((k, iso), (2, Isotropy::Circle));
    let (k, iso) = principal_orbit_data(&c4_group());
    assert_eq!((k, iso), (0, Isotropy::Trivial));
}

#[test]
fn singular_subspaces() {
    match singular_subspace(&GroupAction::planar_so2(2, 0, 1).unwrap()) {
        SingularSubspace::Subspace(b) => assert!(b.is_empty()),
        _ => panic!("expected trivial subspace"),
    }
    match singular_subspace(&GroupAction::planar_so2(3, 0, 1).unwrap()) {
        SingularSubspace::Subspace(b) => {
            assert_eq!(b.len(), 1);
            assert!((&b[0] - DVector::from_vec(vec![0.0, 0.0, 1.0])).amax() < 1e-15);
        }
        _ => panic!("expected axis subspace"),
    }
    match singular_subspace(&GroupAction::standard_so3(3).unwrap()) {
        SingularSubspace::Subspace(b) => assert!(b.is_empty()),
        _ => panic!("expected trivial subspace"),
    }
    assert!(matches!(singular_subspace(&c4_group()), SingularSubspace::NotSatisfied(_)));
}

#[test]
fn symmetry_identity_on_and_off_zero_level() {
    let so2 = GroupAction::planar_so2(2, 0, 1).unwrap();
    assert_eq!(
        symmetry_identity_residual(&so2, &PhasePoint::new(vec![1.0, 0.0], vec![1.0, 0.0])),
        0.0
    );
    let so3 = GroupAction::standard_so3(3).unwrap();
    let on = PhasePoint::new(vec![1.0, 2.0, 2.0], vec![0.5, 1.0, 1.0]);
    assert!(symmetry_identity_residual(&so3, &on) <= 1e-12);
    let off = PhasePoint::new(vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]);
    assert!(symmetry_identity_residual(&so3, &off) > 0.1);
}

#[test]
fn symmetry_identity_residual_over_sampled_zero_level() {
    // Invariant from the identity ⟨Ax,Bξ⟩ = ⟨Bx,Aξ⟩ on Ω₀.
    for action in [GroupAction::standard_so3(3).unwrap(), GroupAction::planar_so2(3, 0, 1).unwrap()]
    {
        let mut found = 0;
        let mut idx = 0u64;
        while found < 500 {
            if let Some(s) = try_sample_zero_level(&action, 2.0, 2.0, 21, idx) {
                assert!(in_zero_level(&action, &s.point, 1e-10));
                assert!(symmetry_identity_residual(&action, &s.point) <= 1e-10);
                found += 1;
            }
            idx += 1;
        }
    }
}

#[test]
fn momentum_map_equivariance() {
    // SO(2) is abelian: J(kz) = J(z). SO(3): J(kz) = R·J(z) with R the
    // rotation block (adjoint action in the L-basis).
    let so2 = GroupAction::planar_so2(3, 0, 1).unwrap();
    let so3 = GroupAction::standard_so3(3).unwrap();
    for idx in 0..100u64 {
        let mut rng = SampleRng::new(13, idx);
        let z = PhasePoint::new(
            (0..3).map(|_| rng.normal()).collect(),
            (0..3).map(|_| rng.normal()).collect(),
        );
        let t = rng.uniform_in(0.0, 6.28);
        let k = rotation_in_plane(3, 0, 1, t);
        let j0 = momentum_map(&so2, &z).unwrap();
        let j1 = momentum_map(&so2, &so2.apply(&k, &z)).unwrap();
        assert!((j1 - &j0).amax() <= 1e-10);

        let r3 = random_so3(&mut rng);
        let k = embed_so3(3, &r3);
        let j0 = momentum_map(&so3, &z).unwrap();
        let j1 = momentum_map(&so3, &so3.apply(&k, &z)).unwrap();
        let rj0 = DVector::from_vec(vec![
            r3[(0, 0)] * j0[0] + r3[(0, 1)] * j0[1] + r3[(0, 2)] * j0[2],
            r3[(1, 0)] * j0[0] + r3[(1, 1)] * j0[1] + r3[(1, 2)] * j0[2],
            r3[(2, 0)] * j0[0] + r3[(2, 1)] * j0[1] + r3[(2, 2)] * j0[2],
        ]);
        assert!((j1 - rj0).amax() <= 1e-10);
    }
}

#[test]
fn chart_density_matches_closed_forms() {
    // Planar SO(2) in R²: density √(r² + s²).
    let so2 = GroupAction::planar_so2(2, 0, 1).unwrap();
    for (r, s, phi) in [(0.3, 0.7, 0.0), (1.0, 0.2, 1.1), (0.5, 0.5, 4.0)] {
        let eta0 = DVector::from_vec(vec![f64::cos(phi), f64::sin(phi)]);
        let theta0 = eta0.clone();
        let d = zero_level::density_at(&so2, eta0, theta0, r, s).unwrap();
        let exact = (r * r + s * s).sqrt();
        assert!((d - exact).abs() <= 1e-6 * exact, "so2 density {d} vs {exact}");
    }

    // Standard SO(3) in R³: density r² + s² (two sphere directions tilt).
    let so3 = GroupAction::standard_so3(3).unwrap();
    for (r, s) in [(0.4, 0.9), (1.0, 0.1)] {
        let eta0 = DVector::from_vec(vec![0.6, 0.0, 0.8]);
        let theta0 = eta0.clone();
        let d = zero_level::density_at(&so3, eta0, theta0, r, s).unwrap();
        let exact = r * r + s * s;
        assert!((d - exact).abs() <= 1e-5 * exact, "so3 density {d} vs {exact}");
    }
}

#[test]
fn sampled_chart_points_lie_on_zero_level() {
    let action = GroupAction::planar_so2(3, 0, 1).unwrap();
    let domain = crate::domains::DomainSpec::Ball { radius: 1.0 };
    let symbol = crate::symbols::SymbolSpec::euclidean_power(2).unwrap();
    let samples = sample_regular_zero_level(&action, &domain, &symbol, 1.0, 200, 3).unwrap();
    assert_eq!(samples.len(), 200);
    for s in &samples {
        assert!(in_zero_level(&action, &s.point, 1e-10));
        assert!(s.density > 0.0);
        assert!(s.orbit_volume > 0.0);
        assert_eq!(s.chart_coords.len(), 2 * 3 - 1);
    }
    // Determinism: same seed, same bits.
    let again = sample_regular_zero_level(&action, &domain, &symbol, 1.0, 200, 3).unwrap();
    for (a, b) in samples.iter().zip(&again) {
        assert_eq!(a.point.x, b.point.x);
        assert_eq!(a.density.to_bits(), b.density.to_bits());
    }
}

fn so3_fixed_pair(idx: u64) -> (GroupAction, PhasePoint, DMatrix<f64>) {
    let so3 = GroupAction::standard_so3(3).unwrap();
    let mut rng = SampleRng::new(0xF1D0, idx);
    let w = DVector::from_vec(rng.unit_vector(3));
    let a = rng.uniform_in(0.2, 2.0);
    let b = rng.uniform_in(-2.0, 2.0);
    let z = PhasePoint { x: &w * a, xi: &w * b };
    let t = rng.uniform_in(0.1, 6.0);
    let axis = nalgebra::Unit::new_normalize(nalgebra::Vector3::new(w[0], w[1], w[2]));
    let r3 = nalgebra::Rotation3::from_axis_angle(&axis, t).into_inner();
    (so3, z, embed_so3(3, &r3))
}

#[test]
fn hessian_identities_on_so3_fixed_points() {
    // k = identity: block-triangular, determinant exactly 1.
    let (so3, z, _) = so3_fixed_pair(0);
    let rep = hessian_identity_check(&so3, &z, &DMatrix::identity(3, 3)).unwrap();
    assert!((rep.d_det - 1.0).abs() < 1e-12);

    // A concrete fixed pair: x ∥ ξ on the first axis, k rotating about it.
    let z = PhasePoint::new(vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]);
    let axis = nalgebra::Unit::new_normalize(nalgebra::Vector3::new(1.0, 0.0, 0.0));
    let k = embed_so3(3, &nalgebra::Rotation3::from_axis_angle(&axis, 0.7).into_inner());
    let rep = hessian_identity_check(&so3, &z, &k).unwrap();
    assert_eq!(rep.kappa, 2);
    assert!((rep.d_det - 1.0).abs() <= 1e-8, "D = {}", rep.d_det);
    assert!(rep.uv_a <= 1e-10);

    // 100 random fixed-point pairs.
    for idx in 0..100u64 {
        let (so3, z, k) = so3_fixed_pair(idx + 1);
        let rep = hessian_identity_check(&so3, &z, &k).unwrap();
        assert!((rep.d_det - 1.0).abs() <= 1e-8, "idx {idx}: D = {}", rep.d_det);
        assert!(rep.uv_a <= 1e-10, "idx {idx}: (a) {}", rep.uv_a);
        assert!(rep.uv_b <= 1e-10, "idx {idx}: (b) {}", rep.uv_b);
        assert!(rep.uv_d <= 1e-10, "idx {idx}: (d) {}", rep.uv_d);
        assert!(rep.uv_e <= 1e-10, "idx {idx}: (e) {}", rep.uv_e);
        assert!(rep.lambda_det.is_finite());
    }

    // An element that moves z is rejected.
    let (so3, z, _) = so3_fixed_pair(2);
    let axis = nalgebra::Unit::new_normalize(nalgebra::Vector3::new(0.0, 0.0, 1.0));
    let k_bad = embed_so3(3, &nalgebra::Rotation3::from_axis_angle(&axis, 1.0).into_inner());
    if (&(so3.apply(&k_bad, &z)).x - &z.x).amax() > 1e-6 {
        assert!(hessian_identity_check(&so3, &z, &k_bad).is_err());
    }
}
