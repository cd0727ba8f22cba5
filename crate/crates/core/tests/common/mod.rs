#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use randers_lie::{AlgebraVector, LieAlgebra, Metric, PresetName, PresetParams};

pub fn v3(x: f64, y: f64, z: f64) -> AlgebraVector {
    DVector::from_column_slice(&[x, y, z])
}

pub fn normal_vec<R: Rng>(rng: &mut R, n: usize) -> AlgebraVector {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Random rotation: QR of a Gaussian matrix, sign-fixed, det +1.
pub fn random_rotation<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let col = -q.column(j).into_owned();
            q.set_column(j, &col);
        }
    }
    if q.determinant() < 0.0 {
        let col = -q.column(0).into_owned();
        q.set_column(0, &col);
    }
    q
}

/// Random SPD Gram matrix with condition number bounded by a few dozen.
pub fn random_metric<R: Rng>(rng: &mut R, n: usize) -> Metric {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let g = &a * a.transpose() + DMatrix::identity(n, n) * 0.3;
    Metric::new(g).unwrap()
}

/// Symmetric perturbation of `base` by entries of size `eps`.
pub fn perturbed_metric<R: Rng>(rng: &mut R, base: &Metric, eps: f64) -> Metric {
    let n = base.dim();
    let p = DMatrix::from_fn(n, n, |_, _| rng.random_range(-eps..eps));
    Metric::new(base.gram() + (&p + p.transpose()) * 0.5).unwrap()
}

/// Random admissible parameters for a preset (drift strictly inside its bound).
pub fn random_params<R: Rng>(rng: &mut R, name: PresetName) -> PresetParams {
    let lambda = rng.random_range(0.5..2.0);
    let mut alpha: f64 = rng.random_range(-2.0..2.0);
    if alpha.abs() < 0.05 {
        alpha = 0.05f64.copysign(alpha);
    }
    let mut p = PresetParams::default().lambda(lambda).alpha(alpha);
    match name {
        PresetName::Heisenberg => p = p.c1(rng.random_range(0.1..3.0)),
        PresetName::E11 => p = p.c1(rng.random_range(0.1..3.0)).c2(-rng.random_range(0.1..3.0)),
        _ => {}
    }
    if let Some(bound) = name.drift_bound(lambda) {
        let mut u = rng.random_range(-0.95..0.95) * bound;
        if u == 0.0 {
            u = 0.5 * bound;
        }
        p = p.u(u);
    }
    p
}

/// Random 3-dimensional Lie algebra: either a Milnor form, a semidirect
/// product R x_A R^2, or a preset algebra in a random basis.
pub fn random_algebra<R: Rng>(rng: &mut R) -> LieAlgebra {
    let base = match rng.random_range(0..3) {
        0 => LieAlgebra::milnor_form(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        )
        .unwrap(),
        1 => {
            let m: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
            LieAlgebra::from_brackets(3, &[(2, 0, vec![m[0], m[1], 0.0]), (2, 1, vec![m[2], m[3], 0.0])]).unwrap()
        }
        _ => {
            let name = PresetName::ALL[rng.random_range(0..7)];
            let p = random_params(rng, name);
            randers_lie::catalog::Preset::new(name, &p).unwrap().algebra
        }
    };
    let basis = loop {
        let b = DMatrix::<f64>::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0));
        if b.determinant().abs() > 0.2 {
            break b;
        }
    };
    base.change_basis(&basis).unwrap()
}

/// Brute-force Jacobi sum by explicit bracket composition, without touching
/// the structure-constant indexing used by the library.
pub fn jacobi_oracle(a: &LieAlgebra) -> f64 {
    let n = a.dim();
    let e = |i: usize| {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    };
    let br = |u: &AlgebraVector, v: &AlgebraVector| a.bracket(u, v).unwrap();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let s = br(&br(&e(i), &e(j)), &e(k)) + br(&br(&e(j), &e(k)), &e(i)) + br(&br(&e(k), &e(i)), &e(j));
                worst = worst.max(s.amax());
            }
        }
    }
    worst
}
