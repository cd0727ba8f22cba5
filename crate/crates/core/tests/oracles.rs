//! Independent oracles: brute-force contractions, finite differences and the
//! closed-form curvature of the catalog examples.

mod common;

use common::{jacobi_oracle, normal_vec, random_params, v3};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use randers_lie::catalog::Preset;
use randers_lie::randers::random_orthonormal_pair;
use randers_lie::{parallel_condition_unimodular, preset, AlgebraVector, LieAlgebra, PresetName, PresetParams};

#[test]
fn jacobi_residual_catches_a_perturbed_constant() {
    let p = preset("ex1", &PresetParams::default()).unwrap();
    assert!(p.algebra.jacobi_residual() <= p.algebra.jacobi_tolerance());
    assert!(jacobi_oracle(&p.algebra) <= 1e-12);
    let idx = |i: usize, j: usize, k: usize| (i * 3 + j) * 3 + k;
    let perturb = |k: usize| {
        let mut c = p.algebra.constants().to_vec();
        c[idx(0, 1, k)] += 0.1;
        c[idx(1, 0, k)] -= 0.1;
        LieAlgebra::new(3, c).unwrap()
    };
    // [x,y] leaving the abelian ideal span{y,z}: Jacobi breaks
    let bad = perturb(0);
    let oracle = jacobi_oracle(&bad);
    assert!((oracle - 0.1).abs() < 1e-12, "{oracle}");
    assert!((bad.jacobi_residual() - oracle).abs() < 1e-12);
    assert!(bad.validate().is_err());
    // [x,y] moved inside span{y,z}: x still acts by a derivation on an
    // abelian ideal, so the result is again a Lie algebra
    let still_lie = perturb(2);
    assert_eq!(jacobi_oracle(&still_lie), 0.0);
    assert_eq!(still_lie.jacobi_residual(), 0.0);
}

#[test]
fn jacobi_holds_for_every_preset() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for name in PresetName::ALL {
        for _ in 0..20 {
            let p = Preset::new(name, &random_params(&mut rng, name)).unwrap();
            assert!(p.algebra.validate().is_ok(), "{name}");
            assert!(jacobi_oracle(&p.algebra) <= p.algebra.jacobi_tolerance());
        }
    }
}

#[test]
fn single_entry_perturbations_are_detected() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for name in [
        PresetName::Ex1,
        PresetName::Ex2,
        PresetName::Ex3,
        PresetName::FlatExtra,
        PresetName::E2,
    ] {
        let p = Preset::new(name, &PresetParams::default()).unwrap();
        let tol = p.algebra.jacobi_tolerance();
        let mut detected = 0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                for k in 0..3 {
                    let eps = 10.0 * tol * rng.random_range(1.0..100.0);
                    let mut c = p.algebra.constants().to_vec();
                    c[(i * 3 + j) * 3 + k] += eps;
                    c[(j * 3 + i) * 3 + k] -= eps;
                    let bad = LieAlgebra::new(3, c).unwrap();
                    if bad.jacobi_residual() > tol {
                        detected += 1;
                    }
                }
            }
        }
        // each preset has nonzero brackets, so some perturbations must break Jacobi
        assert!(detected > 0, "{name}");
    }
}

#[test]
fn unimodularity_by_trace() {
    assert!(preset("heisenberg", &PresetParams::default())
        .unwrap()
        .algebra
        .is_unimodular());
    let ex2 = preset("ex2", &PresetParams::default().alpha(1.5)).unwrap();
    assert!(!ex2.algebra.is_unimodular());
    assert_eq!(ex2.algebra.ad_traces()[2], 1.5);
}

/// `R(u,v)w` by a plain component loop over the stored basis values.
fn contraction_oracle(
    r: &randers_lie::Curvature,
    u: &AlgebraVector,
    v: &AlgebraVector,
    w: &AlgebraVector,
) -> AlgebraVector {
    let n = u.len();
    let mut out = DVector::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    out[m] += u[i] * v[j] * w[k] * r.component(i, j, k, m);
                }
            }
        }
    }
    out
}

#[test]
fn curvature_apply_matches_component_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let a = common::random_algebra(&mut rng);
        let g = randers_lie::Geometry::new(a, common::random_metric(&mut rng, 3)).unwrap();
        let (u, v, w) = (
            normal_vec(&mut rng, 3),
            normal_vec(&mut rng, 3),
            normal_vec(&mut rng, 3),
        );
        let got = g.curvature.apply(&u, &v, &w).unwrap();
        let want = contraction_oracle(&g.curvature, &u, &v, &w);
        assert!((got - want).amax() <= 1e-12 * (1.0 + g.curvature.max_abs()) * 10.0);
    }
}

#[test]
fn ex1_curvature_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..100 {
        let alpha = rng.random_range(-2.0..2.0);
        let g = preset(
            "ex1",
            &PresetParams::default().alpha(alpha).lambda(rng.random_range(0.5..2.0)),
        )
        .unwrap()
        .geometry()
        .unwrap();
        let (y, v) = (normal_vec(&mut rng, 3), normal_vec(&mut rng, 3));
        let (a, b, c) = (y[0], y[1], y[2]);
        let (at, bt, ct) = (v[0], v[1], v[2]);
        let factor = 2.0 * alpha * alpha * (at * (b + c) - a * (bt + ct));
        let want = v3(-(b + c), a, a) * factor;
        let got = g.curvature.apply(&v, &y, &y).unwrap();
        assert!((got - &want).amax() <= 1e-12 * (1.0 + want.amax()));
    }
}

#[test]
fn flat_presets_annihilate_everything() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for lambda in [0.5, 1.0, 2.0] {
        for name in ["e2", "flat_extra"] {
            let g = preset(name, &PresetParams::default().lambda(lambda).alpha(1.7))
                .unwrap()
                .geometry()
                .unwrap();
            assert!(g.curvature.max_abs() <= 1e-12);
            let (u, v) = (normal_vec(&mut rng, 3), normal_vec(&mut rng, 3));
            assert!(g.curvature.apply(&u, &v, &v).unwrap().amax() <= 1e-12);
            assert!(g.sectional_curvature(&u, &v).unwrap().abs() <= 1e-12);
        }
    }
}

/// Mixed central difference of `F^2/2` at `Y` in directions `U`, `V`, with
/// `F` evaluated straight from the Gram matrix.
fn hessian_oracle(
    gram: &nalgebra::DMatrix<f64>,
    drift: &AlgebraVector,
    y: &AlgebraVector,
    u: &AlgebraVector,
    v: &AlgebraVector,
    h: f64,
) -> f64 {
    let half_f2 = |s: f64, t: f64| {
        let w = y + u * s + v * t;
        let f = w.dot(&(gram * &w)).sqrt() + drift.dot(&(gram * &w));
        0.5 * f * f
    };
    (half_f2(h, h) - half_f2(h, -h) - half_f2(-h, h) + half_f2(-h, -h)) / (4.0 * h * h)
}

#[test]
fn fundamental_tensor_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..1000 {
        let g =
            randers_lie::Geometry::new(common::random_algebra(&mut rng), common::random_metric(&mut rng, 3)).unwrap();
        let mut drift = normal_vec(&mut rng, 3);
        drift *= rng.random_range(0.0..0.95) / g.metric.norm(&drift);
        let rs = randers_lie::RandersStructure::new(g, drift.clone()).unwrap();
        let (y, u, v) = (
            normal_vec(&mut rng, 3),
            normal_vec(&mut rng, 3),
            normal_vec(&mut rng, 3),
        );
        let closed = rs.fundamental_tensor(&y, &u, &v).unwrap();
        let fd = hessian_oracle(rs.metric().gram(), &drift, &y, &u, &v, 1e-4);
        assert!((closed - fd).abs() <= 1e-6 * (1.0 + closed.abs()), "{closed} vs {fd}");
    }
}

#[test]
fn printed_fundamental_entries() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for name in [PresetName::Ex1, PresetName::Ex2, PresetName::Ex3] {
        for _ in 0..200 {
            let p = Preset::new(name, &random_params(&mut rng, name)).unwrap();
            let rs = p.randers().unwrap();
            let (y, v) = random_orthonormal_pair(&p.metric, &mut rng);
            let closed = p.closed_form_fundamental(&y, &v).unwrap();
            let tol = 1e-12 * (1.0 + closed.yy.abs() + closed.vv.abs());
            assert!((rs.fundamental_tensor(&y, &y, &y).unwrap() - closed.yy).abs() <= tol);
            assert!((rs.fundamental_tensor(&y, &y, &v).unwrap() - closed.yv).abs() <= tol);
            assert!((rs.fundamental_tensor(&y, &v, &v).unwrap() - closed.vv).abs() <= tol);
            let r = rs.geometry().curvature.apply(&v, &y, &y).unwrap();
            let numerator = rs.fundamental_tensor(&y, &r, &v).unwrap();
            assert!((numerator - closed.curvature_numerator).abs() <= 1e-10 * (1.0 + numerator.abs()));
        }
    }
}

#[test]
fn flag_curvature_matches_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for name in [PresetName::Ex1, PresetName::Ex2, PresetName::Ex3] {
        for _ in 0..1000 {
            let p = Preset::new(name, &random_params(&mut rng, name)).unwrap();
            let rs = p.randers().unwrap();
            let (y, v) = random_orthonormal_pair(&p.metric, &mut rng);
            let numeric = rs.flag_curvature(&y, &v).unwrap().value;
            let closed = p.closed_form_flag_k(&y, &v).unwrap();
            assert!(
                (numeric - closed).abs() <= 1e-9 * closed.abs().max(1e-12) + 1e-14,
                "{name}: {numeric} vs {closed}"
            );
            assert!(closed <= 0.0);
            let sec = rs.geometry().sectional_curvature(&v, &y).unwrap();
            let sec_closed = p.closed_form_sectional_k(&y, &v).unwrap();
            assert!((sec - sec_closed).abs() <= 1e-9 * sec_closed.abs().max(1e-12) + 1e-14);
        }
    }
}

#[test]
fn ex1_worked_frame() {
    // Y = x/lambda, V = (y - z)/(sqrt 2 lambda)
    let (alpha, lambda, u) = (1.3, 0.8, 0.4);
    let p = preset("ex1", &PresetParams::default().alpha(alpha).lambda(lambda).u(u)).unwrap();
    let y = v3(1.0 / lambda, 0.0, 0.0);
    let s = 1.0 / (2f64.sqrt() * lambda);
    let v = v3(0.0, s, -s);
    // b + c = 0 and b~ + c~ = 0, so the closed forms vanish on this plane
    assert_eq!(p.closed_form_flag_k(&y, &v).unwrap(), 0.0);
    let numeric = p.randers().unwrap().flag_curvature(&y, &v).unwrap().value;
    assert!(numeric.abs() < 1e-14);
    // plane through x and y: a = 1/lambda, b~ = 1/lambda
    let v = v3(0.0, 1.0 / lambda, 0.0);
    let closed = p.closed_form_flag_k(&y, &v).unwrap();
    assert!((closed + 2.0 * (alpha / lambda).powi(2)).abs() < 1e-12);
    let numeric = p.randers().unwrap().flag_curvature(&y, &v).unwrap().value;
    assert!((numeric - closed).abs() < 1e-12);
}

/// The six products as printed alongside the Milnor-frame connection table,
/// where the first entry reads `mu1 u1` instead of `mu1 u3`.
fn printed_condition(c: [f64; 3], u: [f64; 3]) -> bool {
    let mu = randers_lie::mu_coefficients(c).mu;
    [
        mu[0] * u[0],
        mu[0] * u[1],
        mu[1] * u[0],
        mu[1] * u[2],
        mu[2] * u[0],
        mu[2] * u[1],
    ]
    .iter()
    .all(|p| p.abs() < 1e-12)
}

#[test]
fn printed_parallel_condition_disagrees_with_its_connection_table() {
    let m = randers_lie::Metric::identity(3).unwrap();
    // E(2) with the rotation along x: U = x is parallel
    let a = LieAlgebra::milnor_form(0.0, 1.0, 1.0).unwrap();
    let g = randers_lie::Geometry::new(a, m).unwrap();
    let x = v3(1.0, 0.0, 0.0);
    assert!(randers_lie::parallel::parallel_residual(&g.connection, &x) < 1e-15);
    assert!(parallel_condition_unimodular([0.0, 1.0, 1.0], [1.0, 0.0, 0.0]));
    assert!(!printed_condition([0.0, 1.0, 1.0], [1.0, 0.0, 0.0]));
    // same algebra, U = z: nabla_x z = -mu1 y = -y, not parallel
    let z = v3(0.0, 0.0, 1.0);
    assert!(randers_lie::parallel::parallel_residual(&g.connection, &z) > 0.5);
    assert!(!parallel_condition_unimodular([0.0, 1.0, 1.0], [0.0, 0.0, 1.0]));
    assert!(printed_condition([0.0, 1.0, 1.0], [0.0, 0.0, 1.0]));
}
