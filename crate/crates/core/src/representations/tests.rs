use super::*;
use crate::group_actions::tests::c4_group;
use crate::rng::SampleRng;
use nalgebra::DMatrix;

fn d4_group() -> GroupAction {
    // Rotations by 90° and the axis/diagonal reflections.
    let rot = |k: usize| -> DMatrix<f64> {
        let (c, s): (f64, f64) = match k {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
        DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
    };
    let refl = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let mut els: Vec<DMatrix<f64>> = (0..4).map(rot).collect();
    for k in 0..4 {
        els.push(rot(k) * &refl);
    }
    GroupAction::finite(2, els).unwrap()
}

#[test]
fn c4_character_table() {
    let sys = CharacterSystem::new(&c4_group()).unwrap();
    let chars = sys.characters(0);
    assert_eq!(chars.len(), 4);
    for &chi in &chars {
        assert_eq!(sys.dimension(chi).unwrap(), 1);
    }
    // Values on the 90° rotation are exactly the fourth roots of unity.
    let r = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let mut vals: Vec<Complex64> = chars.iter().map(|&c| sys.value(c, &r).unwrap()).collect();
    vals.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    let expected = [
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(1.0, 0.0),
    ];
    for (v, e) in vals.iter().zip(expected) {
        assert!((v - e).norm() < 1e-10, "{v} vs {e}");
    }
}

#[test]
fn d4_character_table() {
    let sys = CharacterSystem::new(&d4_group()).unwrap();
    let (dims, table, class_sizes) = sys.table_rows().unwrap();
    assert_eq!(dims, vec![1, 1, 1, 1, 2]);
    assert_eq!(class_sizes.iter().sum::<usize>(), 8);
    assert_eq!(table.len(), 5);
    // The 2-dim character: 2 on the identity, −2 on r², 0 elsewhere.
    let two = &table[4];
    let mut vals: Vec<f64> = two.iter().map(|v| v.re).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!((vals[0] + 2.0).abs() < 1e-10);
    assert!((vals[4] - 2.0).abs() < 1e-10);
    for v in &vals[1..4] {
        assert!(v.abs() < 1e-10);
    }
}

#[test]
fn continuous_character_listings() {
    let so2 = GroupAction::planar_so2(2, 0, 1).unwrap();
    let sys = CharacterSystem::new(&so2).unwrap();
    let labels = sys.characters(2);
    assert_eq!(labels, vec![
        IrrepLabel::So2(-2),
        IrrepLabel::So2(-1),
        IrrepLabel::So2(0),
        IrrepLabel::So2(1),
        IrrepLabel::So2(2)
    ]);

    let so3 = GroupAction::standard_so3(3).unwrap();
    let sys = CharacterSystem::new(&so3).unwrap();
    let dims: Vec<usize> =
        sys.characters(2).iter().map(|&c| sys.dimension(c).unwrap()).collect();
    assert_eq!(dims, vec![1, 3, 5]);
}

#[test]
fn character_values_closed_forms() {
    let so3 = GroupAction::standard_so3(3).unwrap();
    let sys = CharacterSystem::new(&so3).unwrap();
    let rot = |t: f64| {
        crate::group_actions::rotation_in_plane(3, 0, 1, t)
    };
    // l=1, θ=π: 1 + 2cos π = −1.
    let v = sys.value(IrrepLabel::So3(1), &rot(std::f64::consts::PI)).unwrap();
    assert!((v.re + 1.0).abs() < 1e-12 && v.im.abs() < 1e-14);
    // l=2, θ=π/2: sin(5π/4)/sin(π/4) = −1.
    let v = sys.value(IrrepLabel::So3(2), &rot(std::f64::consts::FRAC_PI_2)).unwrap();
    assert!((v.re + 1.0).abs() < 1e-12);
    // θ = 0 limit: dimension.
    let v = sys.value(IrrepLabel::So3(5), &DMatrix::identity(3, 3)).unwrap();
    assert!((v.re - 11.0).abs() < 1e-12);

    let so2 = GroupAction::planar_so2(2, 0, 1).unwrap();
    let sys2 = CharacterSystem::new(&so2).unwrap();
    let k = crate::group_actions::rotation_in_plane(2, 0, 1, 0.83);
    let v = sys2.value(IrrepLabel::So2(0), &k).unwrap();
    assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    let v = sys2.value(IrrepLabel::So2(3), &k).unwrap();
    let expect = Complex64::new((3.0f64 * 0.83).cos(), (3.0f64 * 0.83).sin());
    assert!((v - expect).norm() < 1e-12);
}

#[test]
fn character_is_class_function() {
    // χ(g k g⁻¹) = χ(k) for random conjugations on SO(3).
    let so3 = GroupAction::standard_so3(3).unwrap();
    let sys = CharacterSystem::new(&so3).unwrap();
    for idx in 0..50u64 {
        let mut rng = SampleRng::new(31, idx);
        let k = crate::group_actions::rotation_in_plane(3, 0, 1, rng.uniform_in(0.0, 6.28));
        let mut g = DMatrix::identity(3, 3);
        // Random conjugator from two plane rotations.
        g = crate::group_actions::rotation_in_plane(3, 1, 2, rng.uniform_in(0.0, 6.28)) * g;
        g = crate::group_actions::rotation_in_plane(3, 0, 2, rng.uniform_in(0.0, 6.28)) * g;
        let conj = &g * &k * g.transpose();
        for l in [0u32, 1, 3] {
            let a = sys.value(IrrepLabel::So3(l), &k).unwrap();
            let b = sys.value(IrrepLabel::So3(l), &conj).unwrap();
            assert!((a - b).norm() <= 1e-10, "l={l}: {a} vs {b}");
        }
    }
}

#[test]
fn character_orthogonality_under_haar_quadrature() {
    let so2 = GroupAction::planar_so2(2, 0, 1).unwrap();
    let sys = CharacterSystem::new(&so2).unwrap();
    let rule = haar_quadrature(&so2, 16);
    for m1 in -2i64..=2 {
        for m2 in -2i64..=2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, w) in &rule {
                acc += sys.value(IrrepLabel::So2(m1), k).unwrap()
                    * sys.value(IrrepLabel::So2(m2), k).unwrap().conj()
                    * *w;
            }
            let expect = if m1 == m2 { 1.0 } else { 0.0 };
            assert!((acc - expect).norm() < 1e-12, "({m1},{m2}): {acc}");
        }
    }
}

#[test]
fn branching_multiplicities() {
    let so3 = GroupAction::standard_so3(3).unwrap();
    let sys = CharacterSystem::new(&so3).unwrap();
    for l in 0..5 {
        assert_eq!(sys.branching_multiplicity(IrrepLabel::So3(l)).unwrap(), 1);
    }
    let so2 = GroupAction::planar_so2(3, 0, 1).unwrap();
    let sys = CharacterSystem::new(&so2).unwrap();
    for m in -3i64..=3 {
        assert_eq!(sys.branching_multiplicity(IrrepLabel::So2(m)).unwrap(), 1);
    }
    let sys = CharacterSystem::new(&c4_group()).unwrap();
    for chi in sys.characters(0) {
        assert_eq!(sys.branching_multiplicity(chi).unwrap(), 1);
    }
    // Bounds: 0 ≤ multiplicity ≤ d_χ for the dihedral group too.
    let sys = CharacterSystem::new(&d4_group()).unwrap();
    for chi in sys.characters(0) {
        let m = sys.branching_multiplicity(chi).unwrap();
        assert!(m <= sys.dimension(chi).unwrap());
    }
}

#[test]
fn isotypic_projector_algebra() {
    let sys = CharacterSystem::new(&c4_group()).unwrap();
    let grid = SquareGrid::new(4, 0.5);
    let chars = sys.characters(0);

    // Delta at a generic node spreads over its 4-point orbit with weight
    // d·(1/4)·conj(χ(k)).
    let mut delta = vec![Complex64::new(0.0, 0.0); grid.len()];
    delta[grid.index(2, 1)] = Complex64::new(1.0, 0.0);
    let chi0 = chars
        .iter()
        .copied()
        .find(|&c| {
            let r = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
            (sys.value(c, &r).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12
        })
        .unwrap();
    let proj = sys.project_isotypic(chi0, &delta, &grid).unwrap();
    let nonzero: Vec<usize> =
        (0..grid.len()).filter(|&i| proj[i].norm() > 1e-14).collect();
    assert_eq!(nonzero.len(), 4);
    for &i in &nonzero {
        assert!((proj[i] - Complex64::new(0.25, 0.0)).norm() < 1e-14);
    }

    // Random field: idempotency, mutual orthogonality, completeness.
    let mut rng = SampleRng::new(17, 0);
    let field: Vec<Complex64> =
        (0..grid.len()).map(|_| Complex64::new(rng.normal(), rng.normal())).collect();
    let mut total = vec![Complex64::new(0.0, 0.0); grid.len()];
    for &chi in &chars {
        let p1 = sys.project_isotypic(chi, &field, &grid).unwrap();
        let p2 = sys.project_isotypic(chi, &p1, &grid).unwrap();
        let idem: f64 =
            p1.iter().zip(&p2).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(idem <= 1e-12, "idempotency residual {idem}");
        for &chi2 in &chars {
            if chi2 != chi {
                let p12 = sys.project_isotypic(chi2, &p1, &grid).unwrap();
                let cross: f64 = p12.iter().map(|v| v.norm()).fold(0.0, f64::max);
                assert!(cross <= 1e-12, "orthogonality residual {cross}");
            }
        }
        for (t, v) in total.iter_mut().zip(&p1) {
            *t += v;
        }
    }
    let complete: f64 =
        total.iter().zip(&field).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(complete <= 1e-12, "completeness residual {complete}");
}

#[test]
fn continuous_grid_projection_rejected() {
    let so2 = GroupAction::planar_so2(2, 0, 1).unwrap();
    let sys = CharacterSystem::new(&so2).unwrap();
    let grid = SquareGrid::new(2, 1.0);
    let field = vec![Complex64::new(1.0, 0.0); grid.len()];
    assert!(sys.project_isotypic(IrrepLabel::So2(0), &field, &grid).is_err());
}
