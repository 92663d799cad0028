//! Explicit training against the `ζ/M` shortcut.

use num_complex::Complex64;
use sicnet_core::beamforming::estimate_csi_explicit;
use sicnet_core::linalg::dot;
use sicnet_core::montecarlo::{estimate_outage, simulate_trials, Mode};
use sicnet_core::network::{sample_network, split_interferers};
use sicnet_core::rng::{sample_complex_gaussian, sample_gamma_integer_shape};
use sicnet_core::stats::{ks_two_sample, ks_two_sample_critical_1pct, mean_variance};
use sicnet_core::{RngStream, SystemParams};

fn params(m: usize) -> SystemParams {
    SystemParams::new(5, 3, 4.0, 3.0, 0.01).unwrap().with_train_len(m)
}

/// `σ_R²/I_Σ` from explicit training, and the same statistic with the
/// projected symbols redrawn independently of the beamformer.
fn residual_ratios(m: usize, trials: u64) -> (Vec<f64>, Vec<f64>) {
    let p = params(m);
    let mut coupled = Vec::new();
    let mut decoupled = Vec::new();
    for i in 0..trials {
        let mut rng = RngStream::new(0x1C5, i);
        let real = sample_network(&p, &mut rng);
        let split = split_interferers(&real);
        let est = estimate_csi_explicit(&real, &split, m, &mut rng).unwrap();
        let v0 = &est.beamformer.v0;
        let leak: Vec<Complex64> = (0..real.len())
            .filter(|&t| !split.is_canceled(t))
            .map(|t| dot(v0, real.channel(t)))
            .collect();
        let i_sigma: f64 = leak.iter().map(|a| a.norm_sqr()).sum();
        coupled.push(est.residual_var / i_sigma);
        let mut fresh = 0.0;
        for _ in 0..split.canceled.len() {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in &leak {
                acc += a * sample_complex_gaussian(&mut rng);
            }
            fresh += acc.norm_sqr();
        }
        decoupled.push(fresh / m as f64 / i_sigma);
    }
    (coupled, decoupled)
}

fn zeta_over_m(m: usize, n: usize) -> Vec<f64> {
    let mut rng = RngStream::new(0x1C6, 0);
    (0..n)
        .map(|_| sample_gamma_integer_shape(3, &mut rng) / m as f64)
        .collect()
}

#[test]
fn residual_with_independent_symbols_is_scaled_chi_square() {
    let (_, decoupled) = residual_ratios(11, 10_000);
    let z = zeta_over_m(11, 10_000);
    let d = ks_two_sample(&decoupled, &z);
    assert!(d < ks_two_sample_critical_1pct(10_000, 10_000), "KS {d}");
}

/// Nulling the estimates correlates the beamformer with the training noise,
/// which pulls the mean residual ratio from `L/M` to about `L/(M+1)`. The
/// effect fades as `M` grows.
#[test]
fn estimation_coupling_fades_with_training_length() {
    let (short, _) = residual_ratios(11, 10_000);
    let (long, _) = residual_ratios(176, 10_000);
    let d_short = ks_two_sample(&short, &zeta_over_m(11, 10_000));
    let d_long = ks_two_sample(&long, &zeta_over_m(176, 10_000));
    assert!(d_long < d_short);
    let (mean_short, _) = mean_variance(&short);
    let (mean_long, _) = mean_variance(&long);
    assert!((mean_short / (3.0 / 12.0) - 1.0).abs() < 0.03, "{mean_short}");
    assert!((mean_long / (3.0 / 176.0) - 1.0).abs() < 0.03, "{mean_long}");
}

#[test]
fn explicit_and_shortcut_sir_agree_in_distribution() {
    let p = params(11);
    let a: Vec<f64> = simulate_trials(&p, Mode::ImperfectExplicit, 10_000, 0x1C7)
        .unwrap()
        .iter()
        .map(|s| s.sir)
        .collect();
    let b: Vec<f64> = simulate_trials(&p, Mode::ImperfectShortcut, 10_000, 0x1C8)
        .unwrap()
        .iter()
        .map(|s| s.sir)
        .collect();
    let d = ks_two_sample(&a, &b);
    assert!(d < ks_two_sample_critical_1pct(a.len(), b.len()), "KS {d}");
}

#[test]
fn explicit_and_shortcut_outage_agree() {
    for &lambda in &[0.005, 0.02] {
        let p = params(11).with_lambda(lambda);
        let a = estimate_outage(&p, 50_000, Mode::ImperfectExplicit, 0x1C9).unwrap();
        let b = estimate_outage(&p, 50_000, Mode::ImperfectShortcut, 0x1CA).unwrap();
        let joint = (a.ci_halfwidth.powi(2) + b.ci_halfwidth.powi(2)).sqrt();
        assert!((a.p_hat - b.p_hat).abs() <= joint, "λ={lambda}: {} vs {} (±{joint})", a.p_hat, b.p_hat);
    }
}
