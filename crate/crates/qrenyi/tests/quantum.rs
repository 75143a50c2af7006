use approx::assert_abs_diff_eq;
use qrenyi::entropy::{renyi_entropy, DiscreteDistribution, RenyiOrder};
use qrenyi::quantum::{
    asymmetry, asymmetry_alpha1, asymmetry_numeric, asymmetry_pure, asymmetry_upper_bound, coherence_bounds, coherence_measures,
    coherent_phase_robustness, sandwiched_relative_entropy, SearchOptions,
};
use qrenyi::random::{random_density, random_pure_state};
use qrenyi::scalar::cplx;
use qrenyi::spectral::{dephase, partial_trace, DensityOperator, Generator, GeneratorKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn orders() -> [RenyiOrder<f64>; 4] {
    [RenyiOrder::half(), RenyiOrder::Shannon, RenyiOrder::Finite(2.0), RenyiOrder::Infinite]
}

fn vn_entropy(rho: &DensityOperator<f64>) -> f64 {
    rho.eigenvalues().iter().filter(|&&l| l > 1e-15).map(|&l| -l * l.ln()).sum()
}

#[test]
fn commuting_states_give_classical_divergence() {
    let p = [0.5, 0.3, 0.2];
    let q = [0.2, 0.2, 0.6];
    let rho = DensityOperator::diagonal(&p, vec![0, 1, 2]).unwrap();
    let sigma = DensityOperator::diagonal(&q, vec![0, 1, 2]).unwrap();
    for a in [0.5, 0.75, 2.0, 5.0] {
        let direct = p.iter().zip(&q).map(|(x, y): (&f64, &f64)| x.powf(a) * y.powf(1.0 - a)).sum::<f64>().ln() / (a - 1.0);
        assert_abs_diff_eq!(sandwiched_relative_entropy(&rho, &sigma, RenyiOrder::Finite(a)).unwrap(), direct, epsilon = 1e-12);
    }
    let kl: f64 = p.iter().zip(&q).map(|(x, y)| x * (x / y).ln()).sum();
    assert_abs_diff_eq!(sandwiched_relative_entropy(&rho, &sigma, RenyiOrder::Shannon).unwrap(), kl, epsilon = 1e-12);
    let dmax = p.iter().zip(&q).map(|(x, y)| (x / y).ln()).fold(f64::NEG_INFINITY, f64::max);
    assert_abs_diff_eq!(sandwiched_relative_entropy(&rho, &sigma, RenyiOrder::Infinite).unwrap(), dmax, epsilon = 1e-10);
}

#[test]
fn shannon_asymmetry_is_entropy_gain_of_dephasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in 2..6 {
        let rho: DensityOperator<f64> = random_density((0..d as i64).collect(), 2, &mut rng);
        let g = Generator::number(d);
        let oracle = vn_entropy(&dephase(&rho, &g).unwrap()) - vn_entropy(&rho);
        assert_abs_diff_eq!(asymmetry_alpha1(&rho, &g).unwrap(), oracle, epsilon = 1e-10);
        let numeric = asymmetry_numeric(&rho, &g, RenyiOrder::Shannon, &SearchOptions::default()).unwrap();
        assert_abs_diff_eq!(numeric.value, oracle, epsilon = 1e-6);
    }
}

#[test]
fn eigenstates_and_dephased_states_have_no_asymmetry() {
    let g = Generator::number(4);
    let rho = DensityOperator::diagonal(&[0.1, 0.2, 0.3, 0.4], (0..4).collect()).unwrap();
    for o in orders() {
        assert!(asymmetry(&rho, &g, o, &SearchOptions::default()).unwrap().value.abs() < 1e-7);
    }
}

#[test]
fn pure_state_duality_is_conjugate_entropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let g = Generator::number(5);
    for _ in 0..5 {
        let psi: DensityOperator<f64> = random_pure_state((0..5).collect(), &mut rng);
        let p = DiscreteDistribution::from_probs(psi.populations()).unwrap();
        for o in orders() {
            let beta = o.conjugate().unwrap();
            assert_abs_diff_eq!(asymmetry_pure(&psi, &g, o).unwrap().value, renyi_entropy(&p, beta), epsilon = 1e-10);
            assert_abs_diff_eq!(asymmetry_upper_bound(&psi, &g, o).unwrap(), renyi_entropy(&p, beta), epsilon = 1e-12);
        }
    }
}

#[test]
fn total_uncertainty_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let g = Generator::number(4);
    for _ in 0..10 {
        let rho: DensityOperator<f64> = random_density((0..4).collect(), 2, &mut rng);
        for o in orders() {
            let a = asymmetry(&rho, &g, o, &SearchOptions::default()).unwrap().value;
            let h = asymmetry_upper_bound(&rho, &g, o).unwrap();
            assert!(h - a >= -1e-6, "classical part negative: {}", h - a);
        }
    }
}

#[test]
fn partial_trace_cannot_increase_asymmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let g = Generator::number(2);
    // G acts on the first factor: G (x) 1 on C^2 (x) C^2.
    let gj = Generator::from_diagonal(&[0.0, 0.0, 1.0, 1.0], GeneratorKind::Custom);
    for _ in 0..10 {
        let rho: DensityOperator<f64> = random_density((0..4).collect(), 2, &mut rng);
        let kept = partial_trace(&rho, &[0], &[2, 2]).unwrap().with_labels(vec![0, 1]).unwrap();
        for o in orders() {
            let whole = asymmetry(&rho, &gj, o, &SearchOptions::default()).unwrap().value;
            let part = asymmetry(&kept, &g, o, &SearchOptions::default()).unwrap().value;
            assert!(whole - part >= -1e-6, "{o}: {whole} < {part}");
        }
    }
}

#[test]
fn maximally_coherent_qubit() {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityOperator::pure_indexed(&[cplx(a, 0.0), cplx(a, 0.0)]).unwrap();
    let g = Generator::number(2);
    let m = coherence_measures(&plus, &g, &[RenyiOrder::Finite(2.0)], &SearchOptions::default()).unwrap();
    assert_abs_diff_eq!(m.geometric, 0.5, epsilon = 1e-10);
    assert_abs_diff_eq!(m.robustness, 1.0, epsilon = 1e-8);
    assert_abs_diff_eq!(m.relative_entropy, 2f64.ln(), epsilon = 1e-10);
    let b = coherence_bounds(&plus, &g, None, RenyiOrder::Shannon).unwrap();
    // Pure states saturate the upper bounds.
    assert_abs_diff_eq!(b.upper, m.relative_entropy, epsilon = 1e-10);
    assert_abs_diff_eq!(b.geometric_upper, m.geometric, epsilon = 1e-10);
    assert_abs_diff_eq!(b.robustness_upper, m.robustness, epsilon = 1e-8);
}

#[test]
fn coherent_phase_state_robustness() {
    for v in [0.2f64, 0.5, 0.8] {
        let (c, cutoff) = coherent_phase_robustness(cplx(v, 0.0), 1e-9).unwrap();
        assert!((c - 2.0 * v / (1.0 - v)).abs() < 1e-6, "{v}: {c}");
        assert!(cutoff > 0);
    }
}
