//! Randomized property tests for the structural invariants: equivariance and
//! homogeneity of the momentum geometry, symbol scaling, counting-function
//! shape, Bessel-zero interlacing, class-function behavior of characters, and
//! exact recovery of synthetic power laws by the fitting rule.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use reduced_weyl::group_actions::{
    in_zero_level, momentum_map, rotation_in_plane, symmetry_identity_residual, GroupAction,
    PhasePoint,
};
use reduced_weyl::representations::{CharacterSystem, IrrepLabel};
use reduced_weyl::spectra::{counting_function, CountingSample};
use reduced_weyl::symbols::SymbolSpec;
use reduced_weyl::weyl::{fit, FitMode};

fn planar() -> GroupAction {
    GroupAction::planar_so2(2, 0, 1).unwrap()
}

fn so3() -> GroupAction {
    GroupAction::standard_so3(3).unwrap()
}

fn coord(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// momentum_map(kz) = momentum_map(z) for SO(2) (abelian: the adjoint
    /// action is trivial), so in_zero_level is invariant along orbits.
    #[test]
    fn momentum_is_equivariant_planar(x in coord(2), xi in coord(2), t in 0.0..6.2831) {
        let action = planar();
        let z = PhasePoint::new(x, xi);
        let k = rotation_in_plane(2, 0, 1, t);
        let kz = action.apply(&k, &z);
        let j = momentum_map(&action, &z).unwrap();
        let jk = momentum_map(&action, &kz).unwrap();
        let scale = 1.0 + j.amax();
        prop_assert!((j - jk).amax() <= 1e-10 * scale);
        prop_assert_eq!(
            in_zero_level(&action, &z, 1e-10),
            in_zero_level(&action, &kz, 1e-10)
        );
    }

    /// Same under SO(3), conjugating the momentum by the rotation itself
    /// (the adjoint action on so(3) ≅ R³ is the standard rotation).
    #[test]
    fn momentum_is_equivariant_so3(x in coord(3), xi in coord(3), axis in coord(3), t in 0.1..6.2) {
        let a = DVector::from_vec(axis.clone());
        prop_assume!(a.norm() > 0.1);
        let action = so3();
        let z = PhasePoint::new(x, xi);
        let u = nalgebra::Unit::new_normalize(nalgebra::Vector3::new(a[0], a[1], a[2]));
        let r = nalgebra::Rotation3::from_axis_angle(&u, t);
        let k = DMatrix::from_fn(3, 3, |i, j| r[(i, j)]);
        let kz = action.apply(&k, &z);
        let j = momentum_map(&action, &z).unwrap();
        let jk = momentum_map(&action, &kz).unwrap();
        let adj = &k * &j;
        let scale = 1.0 + j.amax();
        prop_assert!((adj - jk).amax() <= 1e-9 * scale, "equivariance violated");
    }

    /// z ∈ Ω₀ ⇒ (sx, tξ) ∈ Ω₀: the zero level is bihomogeneous, and the
    /// roch2 symmetry identity keeps holding on it.
    #[test]
    fn zero_level_is_bihomogeneous(x in coord(2), s in -4.0f64..4.0, t in -4.0f64..4.0) {
        let action = planar();
        // build a guaranteed zero-level point: ξ ∥ x
        let xv = DVector::from_vec(x);
        prop_assume!(xv.norm() > 0.05);
        let z = PhasePoint { xi: &xv * 0.7, x: xv };
        prop_assert!(in_zero_level(&action, &z, 1e-10));
        let scaled = PhasePoint { x: &z.x * s, xi: &z.xi * t };
        prop_assert!(in_zero_level(&action, &scaled, 1e-10));
        prop_assert!(symmetry_identity_residual(&action, &scaled) <= 1e-10);
    }

    /// evaluate(x, tξ) = t^{2m}·evaluate(x, ξ).
    #[test]
    fn symbol_is_homogeneous(x in coord(2), xi in coord(2), m in 1u32..4) {
        let sym = SymbolSpec::euclidean_power(2 * m).unwrap();
        let xv = DVector::from_vec(x);
        let xiv = DVector::from_vec(xi);
        let base = sym.evaluate(&xv, &xiv);
        for t in [0.5, 2.0, 10.0] {
            let scaled = sym.evaluate(&xv, &(&xiv * t));
            let expect = t.powi(2 * m as i32) * base;
            prop_assert!((scaled - expect).abs() <= 1e-10 * (1.0 + expect.abs()));
        }
    }

    /// Counting functions are nondecreasing, start below their end value,
    /// and jump exactly at eigenvalues (right continuity: count at λ = e
    /// includes e).
    #[test]
    fn counting_is_monotone_and_right_continuous(
        eigs in prop::collection::vec(0.01f64..100.0, 1..40),
        grid in prop::collection::vec(0.0f64..120.0, 2..40),
    ) {
        let mut eigs: Vec<(f64, usize)> = eigs.into_iter().map(|e| (e, 1)).collect();
        eigs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut grid = grid;
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let samples = counting_function(&eigs, &grid, IrrepLabel::So2(0));
        for w in samples.windows(2) {
            prop_assert!(w[1].count >= w[0].count);
        }
        // right continuity at the first eigenvalue
        let e0 = eigs[0].0;
        let at = counting_function(&eigs, &[e0], IrrepLabel::So2(0));
        prop_assert!(at[0].count >= 1);
        let below = counting_function(&eigs, &[e0 * (1.0 - 1e-12) - 1e-300], IrrepLabel::So2(0));
        prop_assert!(below[0].count <= at[0].count);
    }

    /// Zeros of J_ν interlace: j_{ν,k} < j_{ν+1,k} < j_{ν,k+1}.
    #[test]
    fn bessel_zeros_interlace(nu10 in 0u32..120) {
        let nu = nu10 as f64 / 4.0;
        let zeros = reduced_weyl::spectra::bessel_zeros(nu, 60.0).unwrap();
        let upper = reduced_weyl::spectra::bessel_zeros(nu + 1.0, 60.0).unwrap();
        for (k, up) in upper.iter().enumerate() {
            if k < zeros.len() {
                prop_assert!(zeros[k] < *up);
            }
            if k + 1 < zeros.len() {
                prop_assert!(*up < zeros[k + 1]);
            }
        }
    }

    /// Finite-group characters are class functions: χ(g k g⁻¹) = χ(k).
    #[test]
    fn characters_are_class_functions(order in 2usize..9, g in 0usize..8, k in 0usize..8) {
        let n = order;
        let step = 2.0 * std::f64::consts::PI / n as f64;
        let els: Vec<DMatrix<f64>> =
            (0..n).map(|j| rotation_in_plane(2, 0, 1, j as f64 * step)).collect();
        let (gi, ki) = (g % n, k % n);
        let conj = &els[gi] * &els[ki] * els[gi].transpose();
        let action = GroupAction::finite(2, els.clone()).unwrap();
        let sys = CharacterSystem::new(&action).unwrap();
        for chi in sys.characters(0) {
            let a = sys.value(chi, &els[ki]).unwrap();
            let b = sys.value(chi, &conj).unwrap();
            prop_assert!((a - b).norm() <= 1e-10);
        }
    }

    /// The branching multiplicity is bounded by the character dimension.
    #[test]
    fn branching_multiplicity_is_bounded(order in 2usize..9) {
        let step = 2.0 * std::f64::consts::PI / order as f64;
        let els: Vec<DMatrix<f64>> =
            (0..order).map(|j| rotation_in_plane(2, 0, 1, j as f64 * step)).collect();
        let action = GroupAction::finite(2, els).unwrap();
        let sys = CharacterSystem::new(&action).unwrap();
        for chi in sys.characters(0) {
            let mult = sys.branching_multiplicity(chi).unwrap();
            let dim = sys.dimension(chi).unwrap();
            prop_assert!(mult <= dim);
        }
    }

    /// The free-exponent fit recovers exact synthetic power laws.
    #[test]
    fn fit_recovers_exact_power_laws(c in 0.05f64..5.0, p in 0.3f64..1.6) {
        let samples: Vec<CountingSample> = (0..30)
            .map(|i| {
                let lambda = 1e3 * (10.0f64).powf(i as f64 / 10.0);
                CountingSample {
                    lambda,
                    count: (c * lambda.powf(p)).round() as usize,
                    character: IrrepLabel::So2(0),
                }
            })
            .collect();
        prop_assume!(samples.iter().filter(|s| s.count >= 10).count() >= 12);
        let f = fit(&samples, FitMode::FreeExponent).unwrap();
        prop_assert!((f.fitted_exponent - p).abs() <= 0.02, "exponent {}", f.fitted_exponent);
        prop_assert!(
            (f.fitted_coefficient - c).abs() <= 0.05 * c,
            "coefficient {} vs {c}",
            f.fitted_coefficient
        );
    }
}
