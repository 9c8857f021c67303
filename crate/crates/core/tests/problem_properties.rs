mod common;

use mmx_core::problems::{
    hamiltonian_grad, hamiltonian_grad_fd, make_huber_coupling, make_log_cosh, random_bilinear, random_quadratic,
    BilinearProblem, HvpSource, Problem,
};
use mmx_core::Point;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn rank_deficient_bilinear(seed: u64) -> BilinearProblem {
    let mut r = common::rng(seed);
    let u = DMatrix::from_fn(5, 2, |_, _| r.sample::<f64, _>(StandardNormal));
    let v = DMatrix::from_fn(2, 4, |_, _| r.sample::<f64, _>(StandardNormal));
    BilinearProblem::from_matrix(u * v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gradients_are_affine(seed in 0u64..1000) {
        let mut r = common::rng(seed);
        let q = random_quadratic(4, 3, 1.0, seed).unwrap();
        let b = random_bilinear(4, 50.0, seed).unwrap();
        for p in [&q as &dyn Problem, &b as &dyn Problem] {
            let (dx, dy) = p.dims();
            let z1 = common::gaussian_point(dx, dy, &mut r);
            let z2 = common::gaussian_point(dx, dy, &mut r);
            let zt = common::gaussian_point(dx, dy, &mut r);
            let lhs = p.grad(&(&(&z1 + &z2) - &zt)).unwrap();
            let rhs = &(&p.grad(&z1).unwrap() + &p.grad(&z2).unwrap()) - &p.grad(&zt).unwrap();
            let scale = 1.0 + z1.norm() + z2.norm() + zt.norm();
            prop_assert!(lhs.dist_sq(&rhs).sqrt() <= 1e-13 * scale);
        }
    }

    #[test]
    fn closest_saddle_is_stationary_and_orthogonal(seed in 0u64..1000) {
        let p = rank_deficient_bilinear(seed);
        let mut r = common::rng(seed + 1);
        let z0 = common::gaussian_point(5, 4, &mut r);
        let zs = p.closest_saddle(&z0).unwrap();
        let bnorm = common::spectral_norm(p.matrix());
        prop_assert!(p.grad(&zs).unwrap().norm() <= 1e-10 * (1.0 + bnorm) * (1.0 + z0.norm()));
        // z0 - z* is orthogonal to every direction along the saddle set
        let offset = (&z0 - &zs).concat();
        for _ in 0..4 {
            let w = common::gaussian_point(5, 4, &mut r);
            let along = &p.closest_saddle(&(&zs + &w)).unwrap() - &zs;
            let inner = offset.dot(&along.concat());
            prop_assert!(inner.abs() <= 1e-10 * (1.0 + offset.norm()) * (1.0 + along.norm()));
        }
    }

    #[test]
    fn random_bilinear_spectrum_in_range(seed in 0u64..10_000, d in 1usize..12) {
        let p = random_bilinear(d, 300.0, seed).unwrap();
        let s2: Vec<f64> = p.singular_values().iter().map(|s| s * s).collect();
        prop_assert!(s2.iter().all(|&v| v >= 1.0 - 1e-9 && v <= p.big_m() * (1.0 + 1e-9)));
        prop_assert!(p.m() >= 1.0 - 1e-9);
    }
}

#[test]
fn quadratic_closest_saddle_is_stationary() {
    for seed in 0..20 {
        let p = random_quadratic(6, 5, 1.0, seed).unwrap();
        let z0 = common::gaussian_point(6, 5, &mut common::rng(seed));
        let zs = p.closest_saddle(&z0).unwrap();
        assert!(p.grad(&zs).unwrap().norm() <= 1e-10 * 2.0 * (1.0 + z0.norm()));
    }
}

#[test]
fn finite_difference_hamiltonian_gradient_is_second_order() {
    let p = make_log_cosh();
    let z = Point::scalar(0.4, -0.9);
    let exact = hamiltonian_grad(&p, &z, HvpSource::Oracle).unwrap();
    let err = |step: f64| hamiltonian_grad_fd(&p, &z, step).unwrap().dist_sq(&exact).sqrt();
    for step in [1e-2, 2.5e-3] {
        let ratio = err(step) / err(step / 4.0);
        assert!((12.0..=20.0).contains(&ratio), "step {step}: ratio {ratio}");
    }
}

#[test]
fn huber_values_and_gradients() {
    let p = make_huber_coupling();
    assert_eq!(p.value(&Point::scalar(3.0, 0.7)).unwrap(), 2.5);
    assert_eq!(p.value(&Point::scalar(0.5, 0.0)).unwrap(), 0.125);
    let g = p.grad(&Point::scalar(-2.0, 7.0)).unwrap();
    assert_eq!((g.x()[0], g.y()[0]), (-1.0, 0.0));
}

#[test]
fn bilinear_rejects_out_of_range_spectrum() {
    let b = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
    let zero = nalgebra::DVector::zeros(2);
    assert!(BilinearProblem::new(b.clone(), zero.clone(), zero.clone(), 1.0, 4.0).is_err());
    assert!(BilinearProblem::new(b, zero.clone(), zero, 0.25, 4.0).is_ok());
}
