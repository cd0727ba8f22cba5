//! Invariants checked over random inputs.

mod common;

use common::{normal_vec, perturbed_metric, random_algebra, random_metric, random_params, random_rotation};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use randers_lie::catalog::Preset;
use randers_lie::parallel::parallel_residual;
use randers_lie::randers::random_orthonormal_pair;
use randers_lie::{
    parallel_condition_unimodular, AlgebraVector, Geometry, LieAlgebra, Metric, PresetName, PresetParams,
    RandersStructure,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_randers(r: &mut ChaCha8Rng, max_norm: f64) -> RandersStructure {
    let g = Geometry::new(random_algebra(r), random_metric(r, 3)).unwrap();
    let mut x = normal_vec(r, 3);
    x *= r.random_range(0.0..max_norm) / g.metric.norm(&x);
    RandersStructure::new(g, x).unwrap()
}

fn berwald_preset(r: &mut ChaCha8Rng) -> (Preset, RandersStructure) {
    let names = [
        PresetName::E2,
        PresetName::FlatExtra,
        PresetName::Ex1,
        PresetName::Ex2,
        PresetName::Ex3,
    ];
    let name = names[r.random_range(0..names.len())];
    let p = Preset::new(name, &random_params(r, name)).unwrap();
    let rs = p.randers().unwrap();
    (p, rs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn koszul_connection_is_torsion_free_and_metric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = Geometry::new(random_algebra(&mut r), random_metric(&mut r, 3)).unwrap();
        let tol = g.tolerance();
        prop_assert!(g.connection.torsion_residual(&g.algebra) <= tol);
        prop_assert!(g.connection.compatibility_residual(&g.metric) <= tol);
    }

    #[test]
    fn bracket_is_exactly_antisymmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_algebra(&mut r);
        let (u, v) = (normal_vec(&mut r, 3), normal_vec(&mut r, 3));
        prop_assert_eq!(a.bracket(&u, &v).unwrap(), -a.bracket(&v, &u).unwrap());
    }

    #[test]
    fn randers_norm_is_positive_and_homogeneous(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rs = random_randers(&mut r, 0.999);
        let y = normal_vec(&mut r, 3);
        let t = r.random_range(0.01..100.0);
        let f = rs.finsler(&y).unwrap();
        prop_assert!(f > 0.0);
        prop_assert!((rs.finsler(&(&y * t)).unwrap() - t * f).abs() <= 1e-12 * t * f);
        prop_assert!((rs.finsler(&(&y * 2.0)).unwrap() - 2.0 * f).abs() <= 1e-12 * f);
        let gyy = rs.fundamental_tensor(&y, &y, &y).unwrap();
        prop_assert!((gyy - f * f).abs() <= 1e-12 * f * f);
    }

    #[test]
    fn fundamental_tensor_is_symmetric_scale_invariant_and_positive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rs = random_randers(&mut r, 0.95);
        let (y, u, v) = (normal_vec(&mut r, 3), normal_vec(&mut r, 3), normal_vec(&mut r, 3));
        let guv = rs.fundamental_tensor(&y, &u, &v).unwrap();
        prop_assert!((guv - rs.fundamental_tensor(&y, &v, &u).unwrap()).abs() <= 1e-12 * (1.0 + guv.abs()));
        let t = r.random_range(0.1..10.0);
        prop_assert!((guv - rs.fundamental_tensor(&(&y * t), &u, &v).unwrap()).abs() <= 1e-12 * (1.0 + guv.abs()));
        let m = rs.fundamental_matrix(&y).unwrap();
        let eig = nalgebra::SymmetricEigen::new(m).eigenvalues;
        prop_assert!(eig.min() > 0.0, "{}", eig);
    }

    #[test]
    fn curvature_symmetries_hold_on_random_geometries(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = Geometry::new(random_algebra(&mut r), random_metric(&mut r, 3)).unwrap();
        prop_assert!(g.curvature.symmetry_residuals(&g.metric).max() <= g.tolerance());
    }

    #[test]
    fn sectional_curvature_depends_only_on_the_plane(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = Geometry::new(random_algebra(&mut r), random_metric(&mut r, 3)).unwrap();
        let (v, y) = (normal_vec(&mut r, 3), normal_vec(&mut r, 3));
        let k = g.sectional_curvature(&v, &y).unwrap();
        let m = loop {
            let m = DMatrix::<f64>::from_fn(2, 2, |_, _| r.random_range(-2.0..2.0));
            if m.determinant().abs() > 0.1 {
                break m;
            }
        };
        let v2 = &v * m[(0, 0)] + &y * m[(1, 0)];
        let y2 = &v * m[(0, 1)] + &y * m[(1, 1)];
        let k2 = g.sectional_curvature(&v2, &y2).unwrap();
        prop_assert!((k - k2).abs() <= 1e-9 * (1.0 + k.abs()), "{} vs {}", k, k2);
    }

    #[test]
    fn flag_curvature_depends_only_on_flag(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (p, rs) = berwald_preset(&mut r);
        let (y, v) = random_orthonormal_pair(&p.metric, &mut r);
        let k = rs.flag_curvature(&y, &v).unwrap().value;
        let s = loop {
            let s: f64 = r.random_range(-3.0..3.0);
            if s.abs() > 0.1 {
                break s;
            }
        };
        let t = r.random_range(-3.0..3.0);
        let k2 = rs.flag_curvature(&y, &(&v * s + &y * t)).unwrap().value;
        prop_assert!((k - k2).abs() <= 1e-9 * k.abs().max(1e-12) + 1e-13, "{} vs {}", k, k2);
    }

    #[test]
    fn zero_drift_flag_curvature_is_sectional(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = Geometry::new(random_algebra(&mut r), random_metric(&mut r, 3)).unwrap();
        let rs = RandersStructure::new(g, AlgebraVector::zeros(3)).unwrap();
        let (y, v) = (normal_vec(&mut r, 3), normal_vec(&mut r, 3));
        let k = rs.flag_curvature(&y, &v).unwrap().value;
        let sec = rs.geometry().sectional_curvature(&v, &y).unwrap();
        prop_assert!((k - sec).abs() <= 1e-12 * (1.0 + sec.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn curvature_symmetries_hold_on_perturbed_preset_metrics(seed in any::<u64>()) {
        let mut r = rng(seed);
        let name = PresetName::ALL[r.random_range(0..PresetName::ALL.len())];
        let p = Preset::new(name, &random_params(&mut r, name)).unwrap();
        let metric = perturbed_metric(&mut r, &p.metric, 0.1 * p.metric.max_abs());
        let g = Geometry::new(p.algebra.clone(), metric).unwrap();
        prop_assert!(g.curvature.symmetry_residuals(&g.metric).max() <= g.tolerance());
    }

    #[test]
    fn milnor_constants_are_invariant_under_rotations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let base = LieAlgebra::milnor_form(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)).unwrap();
        let metric = Metric::identity(3).unwrap();
        let before = base.milnor_frame(&metric).unwrap();
        let rotated = base.change_basis(&random_rotation(&mut r, 3)).unwrap();
        let after = rotated.milnor_frame(&metric).unwrap();
        for k in 0..3 {
            prop_assert!((before.constants[k] - after.constants[k]).abs() <= 1e-9);
        }
        prop_assert!(after.bracket_defect(&rotated) <= 1e-9);
        prop_assert!(metric.orthonormality_defect(&after.frame) <= 1e-12);
        prop_assert!(after.frame.determinant() > 0.0);
    }

    #[test]
    fn milnor_constants_scale_inversely_with_the_metric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_algebra(&mut r);
        prop_assume!(a.is_unimodular());
        let metric = random_metric(&mut r, 3);
        let s = r.random_range(0.5..2.0);
        let scaled = Metric::new(metric.gram() * (s * s)).unwrap();
        let c = a.milnor_frame(&metric).unwrap().constants;
        let cs = a.milnor_frame(&scaled).unwrap().constants;
        for k in 0..3 {
            prop_assert!((cs[k] - c[k] / s).abs() <= 1e-9 * (1.0 + c[k].abs()));
        }
    }

    /// In the Milnor frame the parallel fields are exactly the solutions of
    /// the six product conditions.
    #[test]
    fn nullspace_matches_mu_conditions_in_milnor_frames(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pick = |r: &mut ChaCha8Rng| [-1.0, 0.0, 0.0, 1.0, 2.0][r.random_range(0..5)];
        let c = [pick(&mut r), pick(&mut r), pick(&mut r)];
        let base = LieAlgebra::milnor_form(c[0], c[1], c[2]).unwrap();
        let metric = random_metric(&mut r, 3);
        // present the algebra in a basis where `metric` is the Gram matrix of the Milnor frame
        let skew = metric.orthonormal_frame().try_inverse().unwrap();
        let algebra = base.change_basis(&skew).unwrap();
        let g = Geometry::new(algebra.clone(), metric.clone()).unwrap();
        let space = g.parallel_space();
        let frame = algebra.milnor_frame(&metric).unwrap();
        let fc = frame.constants;
        // solution set of the product conditions in Milnor coordinates
        let expected: Vec<AlgebraVector> = (0..3)
            .filter_map(|i| {
                let mut u = [0.0; 3];
                u[i] = 1.0;
                parallel_condition_unimodular(fc, u).then(|| frame.frame.column(i).into_owned())
            })
            .collect();
        let expected = if expected.is_empty() && fc.iter().all(|x| x.abs() < 1e-12) {
            (0..3).map(|i| frame.frame.column(i).into_owned()).collect()
        } else {
            expected
        };
        let angle = space.max_principal_angle(&metric, &expected);
        prop_assert!(angle.is_some(), "c = {:?}, dim {} vs {}", fc, space.dimension(), expected.len());
        prop_assert!(angle.unwrap() <= 1e-9);
        for b in &space.basis {
            prop_assert!(parallel_residual(&g.connection, b) <= randers_lie::tolerance::NULL);
        }
    }
}

#[test]
fn no_grid_point_outside_the_parallel_span_is_parallel() {
    let tau = randers_lie::tolerance::NULL;
    for name in [
        PresetName::Heisenberg,
        PresetName::E11,
        PresetName::E2,
        PresetName::FlatExtra,
        PresetName::Ex1,
        PresetName::Ex2,
        PresetName::Ex3,
    ] {
        let p = Preset::new(name, &PresetParams::default().lambda(1.3).alpha(-0.7)).unwrap();
        let g = p.geometry().unwrap();
        let space = g.parallel_space();
        for i in 0..21 {
            for j in 0..21 {
                for k in 0..21 {
                    let u = common::v3(-1.0 + 0.1 * i as f64, -1.0 + 0.1 * j as f64, -1.0 + 0.1 * k as f64);
                    if parallel_residual(&g.connection, &u) < tau {
                        assert!(space.distance(&g.metric, &u) <= 1e-9, "{name}: {u}");
                    }
                }
            }
        }
    }
}

#[test]
fn unimodular_presets_in_their_own_milnor_frame() {
    // the declared Milnor forms come back with the same constants (sorted)
    for (c1, c2) in [(1.0, 0.0), (2.5, 0.0), (1.0, -1.0), (0.4, -3.0)] {
        let a = LieAlgebra::milnor_form(c1, c2, 0.0).unwrap();
        let f = a.milnor_frame(&Metric::identity(3).unwrap()).unwrap();
        let mut want = [c1, c2, 0.0];
        want.sort_by(|a, b| b.total_cmp(a));
        for (got, want) in f.constants.iter().zip(want) {
            assert!((got - want).abs() < 1e-12);
        }
    }
    let mut r = rng(99);
    for _ in 0..100 {
        let c1 = r.random_range(0.1..3.0);
        let h = Preset::new(PresetName::Heisenberg, &PresetParams::default().c1(c1)).unwrap();
        let rotated = h.algebra.change_basis(&random_rotation(&mut r, 3)).unwrap();
        let f = rotated.milnor_frame(&Metric::identity(3).unwrap()).unwrap();
        assert!((f.constants[0] - c1).abs() < 1e-9 && f.constants[1].abs() < 1e-9 && f.constants[2].abs() < 1e-9);
    }
}
