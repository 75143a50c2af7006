use proptest::prelude::*;
use qrenyi::entropy::{classical_relative_entropy, renyi_entropy, DiscreteDistribution, RenyiOrder};
use qrenyi::metrology::{canonical_povm_for, f_max, scaling_function_f, theorem1_check, Estimator, EstimationScenario, Prior};
use qrenyi::quantum::{asymmetry, asymmetry_upper_bound, sandwiched_relative_entropy, SearchOptions};
use qrenyi::random::{random_density, random_pure_state};
use qrenyi::spectral::{DensityOperator, Generator};
use qrenyi::time_energy::rationalize;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn weights(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 2..=max).prop_filter("nonzero mass", |w| w.iter().sum::<f64>() > 1e-3)
}

fn normalize(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn order() -> impl Strategy<Value = RenyiOrder<f64>> {
    prop_oneof![Just(RenyiOrder::Shannon), Just(RenyiOrder::Infinite), (0.5f64..6.0).prop_map(RenyiOrder::Finite)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn renyi_entropy_is_bounded_and_nonincreasing(w in weights(8), a in 0.5f64..4.0, da in 0.01f64..3.0) {
        let p = DiscreteDistribution::from_probs(normalize(&w)).unwrap();
        let n = p.len() as f64;
        let lo = renyi_entropy(&p, RenyiOrder::Finite(a + da));
        let hi = renyi_entropy(&p, RenyiOrder::Finite(a));
        prop_assert!(lo <= hi + 1e-12);
        prop_assert!(hi <= n.ln() + 1e-12);
        prop_assert!(renyi_entropy(&p, RenyiOrder::Infinite) >= -1e-12);
    }

    #[test]
    fn classical_divergence_is_nonnegative_and_contracts(
        w in prop::collection::vec(0.01f64..1.0, 4),
        v in prop::collection::vec(0.01f64..1.0, 4),
        k in prop::collection::vec(0.01f64..1.0, 12),
        o in order(),
    ) {
        let (p, q) = (normalize(&w), normalize(&v));
        // Column stochastic 3x4 map.
        let channel: Vec<Vec<f64>> = (0..4).map(|j| normalize(&k[3 * j..3 * j + 3])).collect();
        let push = |x: &[f64]| (0..3).map(|i| (0..4).map(|j| channel[j][i] * x[j]).sum()).collect::<Vec<f64>>();
        let d = |x: Vec<f64>, y: Vec<f64>| {
            classical_relative_entropy(&DiscreteDistribution::from_probs(x).unwrap(), &DiscreteDistribution::from_probs(y).unwrap(), o).unwrap()
        };
        let before = d(p.clone(), q.clone());
        let after = d(push(&p), push(&q));
        prop_assert!(before >= -1e-12);
        prop_assert!(after <= before + 1e-10, "{after} > {before}");
    }

    #[test]
    fn conjugate_order_is_an_involution(a in 0.5f64..20.0) {
        let b = RenyiOrder::Finite(a).conjugate().unwrap();
        match b.conjugate().unwrap() {
            RenyiOrder::Finite(back) => prop_assert!((back - a).abs() < 1e-9 * a.max(1.0)),
            RenyiOrder::Shannon => prop_assert!((a - 1.0).abs() < 1e-12),
            RenyiOrder::Infinite => prop_assert!(false, "finite order mapped to infinity twice"),
        }
    }

    #[test]
    fn scaling_function_is_positive_and_below_maximum(a in 0.5f64..12.0) {
        let f = scaling_function_f(RenyiOrder::Finite(a)).unwrap();
        prop_assert!(f > 0.0 && f <= f_max() + 1e-9);
    }

    #[test]
    fn rationalize_recovers_reduced_fractions(p in -200i64..200, q in 1i64..200) {
        let g = gcd(p.abs(), q);
        let (rp, rq) = rationalize(p as f64 / q as f64, 1e-12, 1000).unwrap();
        prop_assert_eq!((rp, rq), (p / g, q / g));
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sandwiched_divergence_is_nonnegative(seed in any::<u64>(), d in 2usize..5, o in order()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho: DensityOperator<f64> = random_density((0..d as i64).collect(), d, &mut rng);
        let sigma: DensityOperator<f64> = random_density((0..d as i64).collect(), d, &mut rng);
        prop_assert!(sandwiched_relative_entropy(&rho, &sigma, o).unwrap() >= -1e-9);
        prop_assert!(sandwiched_relative_entropy(&rho, &rho, o).unwrap().abs() < 1e-8);
    }

    #[test]
    fn asymmetry_never_exceeds_its_upper_bound(seed in any::<u64>(), d in 2usize..5, rank in 1usize..3, o in order()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho: DensityOperator<f64> = random_density((0..d as i64).collect(), rank, &mut rng);
        let g = Generator::number(d);
        let a = asymmetry(&rho, &g, o, &SearchOptions::default()).unwrap().value;
        prop_assert!(a >= -1e-7);
        prop_assert!(a <= asymmetry_upper_bound(&rho, &g, o).unwrap() + 1e-6);
    }

    #[test]
    fn entropic_tradeoff_holds_for_pure_probes(seed in any::<u64>(), d in 2usize..7, o in order()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probe: DensityOperator<f64> = random_pure_state((0..d as i64).collect(), &mut rng);
        let g = Generator::number(d);
        let est = Estimator::random_rotation(&canonical_povm_for(&g).unwrap(), &mut rng);
        let s = EstimationScenario::new(probe, g, Prior::UniformCircle, est).unwrap().with_grid(1 << 12);
        prop_assert!(theorem1_check(&s, o).unwrap().slack >= -1e-6);
    }
}
