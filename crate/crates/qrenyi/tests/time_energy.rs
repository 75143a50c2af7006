use approx::assert_abs_diff_eq;
use qrenyi::entropy::RenyiOrder;
use qrenyi::quantum::SearchOptions;
use qrenyi::random::random_density;
use qrenyi::scalar::cplx;
use qrenyi::spectral::DensityOperator;
use qrenyi::time_energy::{
    almost_periodic_density, ap_entropy, corollary9_check, entropy_sweep, rationalize, time_estimation_bounds, write_entropy_sweep,
    EnergySpectrum, MeanKind, MeanOptions,
};
use qrenyi::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

fn plus(d: usize) -> DensityOperator<f64> {
    let mut amps = vec![cplx(0.0, 0.0); d];
    amps[0] = cplx(FRAC_1_SQRT_2, 0.0);
    amps[1] = amps[0];
    DensityOperator::pure_indexed(&amps).unwrap()
}

#[test]
fn spectrum_json_and_periodicity() {
    let s = EnergySpectrum::from_json_str(r#"{"levels": [0.5, 1.5, 3.5]}"#).unwrap();
    assert_eq!(s.degeneracy(), 1);
    assert!(s.is_periodic());
    assert_abs_diff_eq!(s.period().unwrap(), TAU, epsilon = 1e-12);
    let back = EnergySpectrum::from_json_str(&s.to_json().to_string()).unwrap();
    assert_eq!(back.levels(), s.levels());
    let q = EnergySpectrum::new(vec![0.0, 1.0, 2f64.sqrt()], 2).unwrap();
    assert!(!q.is_periodic() && q.period().is_none());
    assert_eq!(q.dim(), 6);
    assert!(EnergySpectrum::new(vec![1.0, 1.0], 1).is_err());
    assert!(EnergySpectrum::new(vec![], 1).is_err());
}

#[test]
fn rationalize_recovers_fractions() {
    assert_eq!(rationalize(0.75, 1e-12, 100), Some((3, 4)));
    assert_eq!(rationalize(-5.0 / 7.0, 1e-12, 100), Some((-5, 7)));
    assert_eq!(rationalize(2f64.sqrt(), 1e-12, 1000), None);
}

#[test]
fn two_level_collision_entropy_is_independent_of_gap() {
    // p_ap = 1 + cos(w t), mean of p^2 = 3/2.
    for w in [0.3, 1.0, 2.7] {
        let s = EnergySpectrum::new(vec![0.0, w], 1).unwrap();
        let d = almost_periodic_density(&plus(2), &s).unwrap();
        let h = ap_entropy(&d, RenyiOrder::Finite(2.0), &MeanOptions::default()).unwrap();
        assert_eq!(h.mean.kind, MeanKind::Period);
        assert_abs_diff_eq!(h.value, -(1.5f64.ln()), epsilon = 1e-10);
        let inf = ap_entropy(&d, RenyiOrder::Infinite, &MeanOptions::default()).unwrap();
        assert_abs_diff_eq!(inf.value, -(2f64.ln()), epsilon = 1e-8);
    }
}

#[test]
fn torus_and_windowed_means_agree() {
    let s = EnergySpectrum::new(vec![0.0, 1.0, 2f64.sqrt(), 3f64.sqrt()], 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let rho: DensityOperator<f64> = random_density((0..4).collect(), 2, &mut rng);
    let d = almost_periodic_density(&rho, &s).unwrap();
    let torus = ap_entropy(&d, RenyiOrder::Finite(2.0), &MeanOptions::default()).unwrap();
    assert_eq!(torus.mean.kind, MeanKind::Torus);
    // Mean of p^2 is c_0^2 + 2 sum over positive frequencies of |c_nu|^2.
    let closed: f64 = d.coefficients[0].norm_sqr() + 2.0 * d.coefficients[1..].iter().map(|c| c.norm_sqr()).sum::<f64>();
    assert_abs_diff_eq!(torus.value, -closed.ln(), epsilon = 1e-9);
    let mut opts = MeanOptions::windowed();
    opts.schedule.windows = 12;
    let win = ap_entropy(&d, RenyiOrder::Finite(2.0), &opts).unwrap();
    assert_eq!(win.mean.kind, MeanKind::Windowed);
    assert!(win.mean.converged && win.mean.spread <= 1e-5);
    assert_abs_diff_eq!(win.value, torus.value, epsilon = 1e-4);
}

#[test]
fn degenerate_levels_are_traced_out() {
    // |E_0,0> + |E_1,1> with degeneracy 2: the time density sees no coherence.
    let mut amps = vec![cplx(0.0, 0.0); 4];
    amps[0] = cplx(FRAC_1_SQRT_2, 0.0);
    amps[3] = amps[0];
    let rho = DensityOperator::pure_indexed(&amps).unwrap();
    let s = EnergySpectrum::new(vec![0.0, 1.0], 2).unwrap();
    let d = almost_periodic_density(&rho, &s).unwrap();
    let h = ap_entropy(&d, RenyiOrder::Shannon, &MeanOptions::default()).unwrap();
    assert_abs_diff_eq!(h.value, 0.0, epsilon = 1e-10);
    let r = corollary9_check(&rho, &s, RenyiOrder::Shannon, &SearchOptions::default(), &MeanOptions::default()).unwrap();
    assert!(r.slack >= -1e-6 && r.shannon_slack >= -1e-6);
}

#[test]
fn time_bounds_for_harmonic_spectrum() {
    let s = EnergySpectrum::new(vec![0.0, 2.0, 4.0, 6.0], 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..5 {
        let rho: DensityOperator<f64> = random_density((0..4).collect(), 1, &mut rng);
        for o in [RenyiOrder::half(), RenyiOrder::Shannon, RenyiOrder::Finite(2.0)] {
            let tau = s.period().unwrap();
            let r = time_estimation_bounds(&rho, &s, 0.7 * tau, o, &SearchOptions::default()).unwrap();
            assert_abs_diff_eq!(r.period, std::f64::consts::PI, epsilon = 1e-12);
            assert!(r.tradeoff_slack >= -1e-6, "{o}: {}", r.tradeoff_slack);
            assert!(r.rmse_slack >= -1e-6);
            assert!(r.period_entropy_slack >= -1e-6);
            assert!(r.deviation_slack >= -1e-6);
        }
    }
}

#[test]
fn almost_periodic_time_bounds_are_refused() {
    let s = EnergySpectrum::new(vec![0.0, 1.0, 2f64.sqrt()], 1).unwrap();
    let e = time_estimation_bounds(&plus(3), &s, 1.0, RenyiOrder::Shannon, &SearchOptions::default());
    assert!(matches!(e, Err(Error::NotPeriodic(_))));
}

#[test]
fn entropy_sweep_csv() {
    let s = EnergySpectrum::new(vec![0.0, 1.0], 1).unwrap();
    let d = almost_periodic_density(&plus(2), &s).unwrap();
    let rows = entropy_sweep(&d, &[RenyiOrder::half(), RenyiOrder::Finite(2.0)], &MeanOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_entropy_sweep(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("order,H_ap,windows_used,spread"));
    assert_eq!(lines.count(), 2);
}
