use approx::assert_abs_diff_eq;
use qrenyi::entropy::{Distribution, RenyiOrder};
use qrenyi::metrology::{
    averaged_effect, canonical_povm_for, conjecture_search, dephasing_map, error_distribution, fisher_comparison,
    interval_error_distribution, l2_identity, mean_deviation_product, rotation_bounds, theorem1_check, theorem2_bounds,
    Estimator, EstimationScenario, Prior, ProbeFamily,
};
use qrenyi::random::random_pure_state;
use qrenyi::scalar::cplx;
use qrenyi::spectral::{DensityOperator, Generator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

fn canonical(g: &Generator<f64>) -> Estimator {
    Estimator::Canonical(canonical_povm_for(g).unwrap())
}

fn scenario(probe: DensityOperator<f64>, prior: Prior) -> EstimationScenario {
    let g = Generator::number(probe.dim());
    let e = canonical(&g);
    EstimationScenario::new(probe, g, prior, e).unwrap().with_grid(1 << 12)
}

#[test]
fn scaled_averaged_canonical_effect_has_unit_diagonal() {
    let g = Generator::number(6);
    let m = averaged_effect(&(0..6).collect::<Vec<_>>(), &canonical(&g));
    for n in 0..6 {
        assert_abs_diff_eq!(m[(n, n)].re, 1.0, epsilon = 1e-8);
    }
}

#[test]
fn l2_identity_by_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for d in [2, 4, 7] {
        let s = scenario(random_pure_state((0..d as i64).collect(), &mut rng), Prior::UniformCircle);
        let (lhs, rhs) = l2_identity(&error_distribution(&s, &[]).unwrap());
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-8);
    }
}

#[test]
fn dephasing_map_reproduces_error_density_and_number_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let probe: DensityOperator<f64> = random_pure_state((0..4).collect(), &mut rng);
    let g = Generator::number(4);
    let est = Estimator::random_rotation(&canonical_povm_for(&g).unwrap(), &mut rng);
    let s = EstimationScenario::new(probe.clone(), g.clone(), Prior::UniformCircle, est).unwrap().with_grid(1 << 12);
    let mu = dephasing_map(&s).unwrap();
    for (a, b) in mu.populations().iter().zip(probe.populations()) {
        assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
    }
    let err = error_distribution(&s, &[]).unwrap();
    let canonical_phase = EstimationScenario::new(mu, g.clone(), Prior::UniformCircle, canonical(&g)).unwrap().with_grid(1 << 12);
    let cp = error_distribution(&canonical_phase, &[]).unwrap();
    for (x, y) in err.error_density.values().iter().zip(cp.error_density.values()) {
        assert_abs_diff_eq!(*x, *y, epsilon = 1e-8);
    }
}

#[test]
fn vacuum_and_number_states() {
    for n in 0..4 {
        let probe = DensityOperator::<f64>::basis_state(n, (0..4).collect());
        let s = scenario(probe.clone(), Prior::UniformCircle);
        let st = error_distribution(&s, &[]).unwrap();
        assert_abs_diff_eq!(st.rmse, PI / 3f64.sqrt(), epsilon = 1e-10);
        let t2 = theorem2_bounds(&probe, &s.generator).unwrap();
        assert_abs_diff_eq!(t2.bound1, st.rmse, epsilon = 1e-10);
        assert!(fisher_comparison(&probe, &s.generator).unwrap().fisher_bound.is_infinite());
    }
}

#[test]
fn edge_superposition_fisher_contrast() {
    for n_max in [2usize, 5, 9] {
        let mut amps = vec![cplx(0.0, 0.0); n_max + 1];
        amps[0] = cplx(FRAC_1_SQRT_2, 0.0);
        amps[n_max] = amps[0];
        let probe = DensityOperator::pure_indexed(&amps).unwrap();
        let s = scenario(probe.clone(), Prior::UniformCircle);
        let fc = fisher_comparison(&probe, &s.generator).unwrap();
        assert_abs_diff_eq!(fc.fisher_bound, 1.0 / n_max as f64, epsilon = 1e-12);
        let t2 = theorem2_bounds(&probe, &s.generator).unwrap();
        assert_abs_diff_eq!(t2.bound1, PI / (2.0 * 3f64.sqrt()), epsilon = 1e-12);
        assert_abs_diff_eq!(t2.bound2, 0.5, epsilon = 1e-12);
        assert!(error_distribution(&s, &[]).unwrap().rmse >= t2.max());
    }
}

#[test]
fn full_interval_prior_matches_circle() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let probe: DensityOperator<f64> = random_pure_state((0..3).collect(), &mut rng);
    let g = Generator::number(3);
    let est = Estimator::constant(0.3, 3);
    let c = EstimationScenario::new(probe.clone(), g.clone(), Prior::UniformCircle, est.clone()).unwrap().with_grid(1 << 12);
    let i = EstimationScenario::new(probe, g, Prior::UniformInterval { length: TAU, center: 0.0 }, est).unwrap().with_grid(1 << 12);
    let a = error_distribution(&c, &[]).unwrap();
    let b = interval_error_distribution(&i, &[]).unwrap();
    assert_abs_diff_eq!(a.rmse, b.rmse, epsilon = 1e-6);
    assert_abs_diff_eq!(a.entropy(RenyiOrder::Shannon), b.entropy(RenyiOrder::Shannon), epsilon = 1e-5);
}

#[test]
fn entropy_tradeoff_is_tight_for_number_states() {
    let probe = DensityOperator::<f64>::basis_state(2, (0..4).collect());
    let s = scenario(probe, Prior::UniformCircle);
    for o in [RenyiOrder::half(), RenyiOrder::Shannon, RenyiOrder::Infinite] {
        assert!(theorem1_check(&s, o).unwrap().slack.abs() < 1e-9);
    }
}

#[test]
fn rotation_extremes_state() {
    let j = 3;
    let g = Generator::angular_momentum_z(j);
    let d = 2 * j + 1;
    let mut amps = vec![cplx(0.0, 0.0); d];
    amps[0] = cplx(FRAC_1_SQRT_2, 0.0);
    amps[d - 1] = amps[0];
    let probe = DensityOperator::pure(&amps, (-(j as i64)..=j as i64).collect()).unwrap();
    let s = EstimationScenario::new(probe, g.clone(), Prior::UniformCircle, canonical(&g)).unwrap();
    let r = rotation_bounds(&s, RenyiOrder::Shannon).unwrap();
    assert_abs_diff_eq!(r.max_prob, 0.5, epsilon = 1e-12);
    assert!(r.deviation >= 0.5);
}

#[test]
fn two_term_probe_product_matches_closed_form() {
    // For cos t |0> + sin t |1> the deviation about 0 is pi^2/3 - 2 sin 2t exactly.
    for t in [0.05f64, 0.2, 0.5, 1.0] {
        let closed = (t.sin().powi(2) + 0.5) * (PI * PI / 3.0 - 2.0 * (2.0 * t).sin()).sqrt();
        let v = mean_deviation_product(&[t.cos(), t.sin()]);
        assert!(v <= closed + 1e-10, "{t}: {v} > {closed}");
        assert!(v > closed - 5e-2);
    }
    let r = conjecture_search(ProbeFamily::TwoTerm { max_n: 2 }, 200, 1).unwrap();
    assert!(r.minimum >= r.floor);
}
