mod common;

use mmx_core::certify::{check_divergence_witness, check_second_order_expansion, WitnessKind};
use mmx_core::problems::{make_log_cosh, random_bilinear, random_quadratic, BilinearProblem, Problem};
use mmx_core::schedules::{
    classical, slingshot_bilinear, slingshot_cc, validate_slingshot_family, ClassicalKind, RootOrdering,
    StepPairSchedule,
};
use mmx_core::solvers::{run_baseline, run_gda, Baseline, RunOptions};
use mmx_core::Point;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn small_bilinear(seed: u64) -> BilinearProblem {
    random_bilinear(5, 10.0, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gda_is_linear_in_initial_offset(seed in 0u64..500, t in 1usize..8) {
        let p = random_quadratic(4, 4, 1.0, seed).unwrap();
        let z0 = common::gaussian_point(4, 4, &mut common::rng(seed));
        let zs = p.closest_saddle(&z0).unwrap();
        let twice = &zs + &(&(&z0 - &zs) * 2.0);
        let s = slingshot_cc(t, 0.3, seed).unwrap();
        let a = run_gda(&p, &s, &z0, &RunOptions::default()).unwrap();
        let b = run_gda(&p, &s, &twice, &RunOptions::default()).unwrap();
        let da = &a.final_iterate - &zs;
        let db = &b.final_iterate - &zs;
        prop_assert!(db.dist_sq(&(&da * 2.0)).sqrt() <= 1e-12 * (1.0 + db.norm()));
    }

    #[test]
    fn even_iterates_follow_decoupled_recursion(seed in 0u64..500, k in 0usize..4) {
        let t = 1usize << k;
        let p = small_bilinear(seed);
        let b = p.matrix().clone();
        let z0 = common::gaussian_point(5, 5, &mut common::rng(seed));
        let s = slingshot_bilinear(t, 1.0, p.big_m(), RootOrdering::Auto).unwrap();
        let mut z = z0.clone();
        for pair in s.steps().chunks(2) {
            let sub = StepPairSchedule::custom(pair.to_vec()).unwrap();
            let got = run_gda(&p, &sub, &z, &RunOptions::default()).unwrap().final_iterate;
            let h2 = pair[0].0 * pair[0].0;
            let x = z.x() - (&b * (b.transpose() * z.x())) * h2;
            let y = z.y() - (b.transpose() * (&b * z.y())) * h2;
            let want = Point::new(x, y).unwrap();
            prop_assert!(got.dist_sq(&want).sqrt() <= 1e-12 * (1.0 + want.norm()));
            z = got;
        }
    }

    #[test]
    fn root_order_does_not_change_the_result(seed in 0u64..500, t in 1usize..=16, shuffle in any::<u64>()) {
        let p = random_bilinear(4, 10.0, seed).unwrap();
        let big_m = p.big_m();
        let z0 = common::gaussian_point(4, 4, &mut common::rng(seed));
        // Fisher-Yates with a fixed LCG so the permutation is reproducible
        let mut perm: Vec<usize> = (0..t).collect();
        let mut state = shuffle | 1;
        for i in (1..t).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        let a = slingshot_bilinear(t, 1.0, big_m, RootOrdering::Canonical).unwrap();
        let b = slingshot_bilinear(t, 1.0, big_m, RootOrdering::Custom(perm)).unwrap();
        let za = run_gda(&p, &a, &z0, &RunOptions::default()).unwrap().final_iterate;
        let zb = run_gda(&p, &b, &z0, &RunOptions::default()).unwrap().final_iterate;
        prop_assert!(za.dist_sq(&zb).sqrt() <= 1e-6 * (za.norm() + 1e-300) + 1e-12 * z0.norm());
    }

    #[test]
    fn cc_steps_take_three_values(t in 1usize..300, h in 0.01f64..1.0, seed in any::<u64>()) {
        let s = slingshot_cc(t, h, seed).unwrap();
        prop_assert_eq!(s.horizon(), 2 * t);
        prop_assert!(s.steps().iter().all(|&(a, b)| [a, b].iter().all(|v| *v == h || *v == -h || *v == 0.0)));
        prop_assert!(validate_slingshot_family(&s).unwrap().passes());
        let again = slingshot_cc(t, h, seed).unwrap();
        prop_assert_eq!(s.steps(), again.steps());
    }

    #[test]
    fn witness_bound_never_exceeds_simulation(
        steps in proptest::collection::vec((0.0f64..1.5, 0.0f64..1.5), 1..40),
    ) {
        let s = StepPairSchedule::custom(steps).unwrap();
        let w = check_divergence_witness(&s, WitnessKind::Nonnegative).unwrap();
        prop_assert!(w.lower_bound >= 1.0);
        prop_assert!(w.lower_bound <= w.simulated_ratio * (1.0 + 1e-10) + 1e-10);
    }
}

#[test]
fn gradient_evaluation_counts() {
    let p = small_bilinear(3);
    let z0 = Point::from_element(5, 5, 1.0);
    let n = 25;
    let gda = run_gda(&p, &classical(ClassicalKind::Constant, 0.01, 0.01, n).unwrap(), &z0, &RunOptions::default())
        .unwrap();
    assert_eq!(gda.last().cum_grad_evals, n as u64);
    for (method, per_iter) in
        [(Baseline::extragradient(), 2), (Baseline::eag(), 2), (Baseline::ogda(), 1), (Baseline::negative_momentum(), 1)]
    {
        let tr = run_baseline(&p, &method, n, &z0, &RunOptions::default()).unwrap();
        // OGDA spends one extra evaluation to initialise its memory
        let extra = u64::from(matches!(method, Baseline::Ogda { .. }));
        let last = tr.last().cum_grad_evals;
        assert!(
            last == per_iter * n as u64 || last == per_iter * n as u64 + extra,
            "{}: {last}",
            method.name()
        );
    }
}

#[test]
fn expansion_error_is_third_order() {
    let p = make_log_cosh();
    let z = Point::scalar(0.3, 0.8);
    let hs: Vec<f64> = (0..=8).map(|i| 1e-1 * 10f64.powf(-0.25 * i as f64)).collect();
    let errs: Vec<f64> = hs.iter().map(|&h| check_second_order_expansion(&p, &z, h).unwrap()).collect();
    let slope = common::loglog_slope(&hs, &errs);
    assert!((slope - 3.0).abs() <= 0.2, "slope {slope}");
}

#[test]
fn constant_gda_diverges_on_xy() {
    let p = BilinearProblem::new(DMatrix::identity(1, 1), DVector::zeros(1), DVector::zeros(1), 1.0, 1.0).unwrap();
    let tr = run_gda(&p, &classical(ClassicalKind::Constant, 0.5, 0.5, 200).unwrap(), &Point::scalar(1.0, 1.0),
        &RunOptions::default())
    .unwrap();
    assert!(tr.final_iterate.norm() > 1e9);
    assert!(p.grad(&tr.final_iterate).unwrap().is_finite());
}
