//! Zero-forcing receive beamforming with maximum-ratio combining, and
//! least-squares estimation of the channels it nulls.

use crate::error::{Error, Result};
use crate::linalg::{dot, dot_norm_sqr, norm_sqr, OrthoBasis};
use crate::network::{CancellationSplit, NetworkRealization};
use crate::rng::{fill_complex_gaussian, sample_gamma_integer_shape, RngStream};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Unit-norm receive vector `v₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct Beamformer {
    pub v0: Vec<Complex64>,
}

impl Beamformer {
    /// Post-beamforming signal power `W = |v₀† h₀|²`.
    pub fn gain(&self, h0: &[Complex64]) -> f64 {
        dot_norm_sqr(&self.v0, h0)
    }
}

/// The vector of unit norm maximizing `|v† h₀|²` subject to `v† h = 0` for
/// every `h` in `nulled`: the normalized projection of `h₀` onto the
/// orthogonal complement of the nulled span.
pub fn zf_mrc(h0: &[Complex64], nulled: &[&[Complex64]]) -> Result<Beamformer> {
    let mut basis = OrthoBasis::new(h0.len());
    let mut v0 = Vec::new();
    zf_mrc_into(&mut basis, h0, nulled.iter().copied(), &mut v0)?;
    Ok(Beamformer { v0 })
}

/// Allocation-free form of [`zf_mrc`] for inner loops: `basis` is scratch
/// space and the beamformer is written to `v0`.
pub fn zf_mrc_into<'a, I>(basis: &mut OrthoBasis, h0: &[Complex64], nulled: I, v0: &mut Vec<Complex64>) -> Result<()>
where
    I: IntoIterator<Item = &'a [Complex64]>,
{
    let n = h0.len();
    basis.clear();
    for h in nulled {
        if basis.rank() + 1 >= n {
            return Err(Error::InvalidParams(format!(
                "at most {} vectors can be nulled with {n} antennas",
                n - 1
            )));
        }
        basis.push(h)?;
    }
    v0.clear();
    v0.extend_from_slice(h0);
    let scale = norm_sqr(h0).sqrt();
    basis.project_out(v0);
    let norm = norm_sqr(v0).sqrt();
    if !(norm > crate::linalg::RANK_TOL * scale) {
        return Err(Error::Degenerate(
            "signal channel lies in the nulled span".into(),
        ));
    }
    let inv = 1.0 / norm;
    for z in v0.iter_mut() {
        *z *= inv;
    }
    Ok(())
}

/// Residual interference `I_T = |v₀† h_T|²` and its fraction
/// `δ_T = I_T / ‖h_T‖²` of the pre-cancellation power.
pub fn post_cancellation_gain(bf: &Beamformer, h_t: &[Complex64]) -> (f64, f64) {
    let i_t = dot_norm_sqr(&bf.v0, h_t);
    let energy = norm_sqr(h_t);
    let delta = if energy > 0.0 { (i_t / energy).min(1.0) } else { 0.0 };
    (i_t, delta)
}

/// `L` orthonormal training rows of length `M`, taken from the unit-norm
/// M-point DFT basis: `q_l[m] = e^{−2πi·l·m/M} / √M`.
#[derive(Clone, Debug)]
pub struct TrainingMatrix {
    rows: usize,
    len: usize,
    data: Vec<Complex64>,
}

impl TrainingMatrix {
    pub fn dft(rows: usize, len: usize) -> Result<Self> {
        if len < rows || len == 0 {
            return Err(Error::InvalidParams(format!(
                "training length {len} cannot hold {rows} orthonormal rows"
            )));
        }
        let scale = 1.0 / (len as f64).sqrt();
        let mut data = Vec::with_capacity(rows * len);
        for l in 0..rows {
            for m in 0..len {
                // reduce l·m mod M first so the phase stays accurate for large M
                let k = (l * m) % len;
                let (s, c) = (-2.0 * PI * k as f64 / len as f64).sin_cos();
                data.push(Complex64::new(c * scale, s * scale));
            }
        }
        Ok(Self { rows, len, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn row(&self, l: usize) -> &[Complex64] {
        &self.data[l * self.len..(l + 1) * self.len]
    }
}

/// Result of least-squares training.
#[derive(Clone, Debug)]
pub struct CsiEstimate {
    /// `ĥ_T` for each canceled interferer, in the order of `split.canceled`.
    pub estimates: Vec<Vec<Complex64>>,
    pub train_len: usize,
    /// Conditional variance of the residual interference left by the
    /// estimation error.
    pub residual_var: f64,
    /// Zero-forcing beamformer built on the estimates.
    pub beamformer: Beamformer,
}

/// Simulates one training phase and the beamformer built on its estimates.
///
/// The canceled interferers send orthonormal training rows while every other
/// interferer sends i.i.d. 𝒞𝒩(0, 1) symbols. Projecting its symbols on row
/// `q_T` gives `x̃_{T′,T} = x_{T′} q_T†`, and the least-squares estimate is
/// `ĥ_T = h_T + M^{-1/2} Σ_{T′} h_{T′} x̃_{T′,T}`.
pub fn estimate_csi_explicit(
    real: &NetworkRealization,
    split: &CancellationSplit,
    train_len: usize,
    rng: &mut RngStream,
) -> Result<CsiEstimate> {
    let l = real.params.n_cancel;
    if train_len < l.max(1) {
        return Err(Error::InvalidParams(format!(
            "training length {train_len} is shorter than the {l} canceled interferers"
        )));
    }
    let q = TrainingMatrix::dft(split.canceled.len(), train_len)?;
    estimate_csi_with(real, split, &q, rng)
}

/// [`estimate_csi_explicit`] with a precomputed training matrix whose row
/// count equals the size of the canceled set.
pub fn estimate_csi_with(
    real: &NetworkRealization,
    split: &CancellationSplit,
    q: &TrainingMatrix,
    rng: &mut RngStream,
) -> Result<CsiEstimate> {
    let rows = split.canceled.len();
    assert_eq!(q.rows(), rows, "training matrix must have one row per canceled interferer");
    let m = q.len();
    let inv_sqrt_m = 1.0 / (m as f64).sqrt();

    let mut estimates: Vec<Vec<Complex64>> = split.canceled.iter().map(|&t| real.channel(t).to_vec()).collect();
    let others: Vec<usize> = (0..real.len()).filter(|&i| !split.is_canceled(i)).collect();

    // x̃_{T′,T} for every uncanceled T′ (rows) and canceled T (columns)
    let mut projected = vec![Complex64::new(0.0, 0.0); others.len() * rows];
    if rows > 0 {
        let mut symbols = vec![Complex64::new(0.0, 0.0); m];
        for (k, &t) in others.iter().enumerate() {
            fill_complex_gaussian(&mut symbols, rng);
            let h = real.channel(t);
            for (col, est) in estimates.iter_mut().enumerate() {
                // x q† = Σ_m x[m] conj(q[m])
                let xt = dot(q.row(col), &symbols);
                projected[k * rows + col] = xt;
                let c = xt * inv_sqrt_m;
                for (e, hi) in est.iter_mut().zip(h) {
                    *e += c * hi;
                }
            }
        }
    }

    let refs: Vec<&[Complex64]> = estimates.iter().map(Vec::as_slice).collect();
    let beamformer = zf_mrc(&real.own_channel, &refs)?;

    let mut residual_var = 0.0;
    if rows > 0 {
        let leak: Vec<Complex64> = others.iter().map(|&t| dot(&beamformer.v0, real.channel(t))).collect();
        for col in 0..rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, a) in leak.iter().enumerate() {
                acc += a * projected[k * rows + col];
            }
            residual_var += acc.norm_sqr();
        }
        residual_var /= m as f64;
    }

    Ok(CsiEstimate {
        estimates,
        train_len: m,
        residual_var,
        beamformer,
    })
}

/// Distributional stand-in for the explicit residual variance:
/// `(ζ/M)·I_total` with `ζ ~ Gamma(L, 1)`.
pub fn residual_noise_shortcut(i_total: f64, n_cancel: usize, train_len: usize, rng: &mut RngStream) -> f64 {
    assert!(n_cancel >= 1, "shortcut needs at least one canceled interferer");
    assert!(train_len >= n_cancel, "training length must be at least L");
    let zeta = sample_gamma_integer_shape(n_cancel as u32, rng);
    zeta / train_len as f64 * i_total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{sample_network, split_interferers};
    use crate::params::SystemParams;
    use crate::rng::sample_complex_gaussian_vector;
    use crate::special::regularized_gamma_p;
    use crate::stats::{ks_critical_1pct, ks_statistic, mean_variance};
    use proptest::prelude::*;

    fn cvec(rng: &mut RngStream, n: usize) -> Vec<Complex64> {
        sample_complex_gaussian_vector(n, rng)
    }

    #[test]
    fn no_nulls_is_mrc() {
        let mut rng = RngStream::new(1, 0);
        let h0 = cvec(&mut rng, 4);
        let bf = zf_mrc(&h0, &[]).unwrap();
        let norm = norm_sqr(&h0).sqrt();
        for (v, h) in bf.v0.iter().zip(&h0) {
            assert!((v - h / norm).norm() < 1e-14);
        }
    }

    #[test]
    fn orthogonal_signal_is_untouched() {
        let z = Complex64::new(0.0, 0.0);
        let h0 = vec![Complex64::new(2.0, 1.0), z, z];
        let n1 = vec![z, Complex64::new(1.0, -1.0), z];
        let n2 = vec![z, Complex64::new(0.5, 0.0), Complex64::new(0.0, 3.0)];
        let bf = zf_mrc(&h0, &[&n1, &n2]).unwrap();
        let norm = norm_sqr(&h0).sqrt();
        for (v, h) in bf.v0.iter().zip(&h0) {
            assert!((v - h / norm).norm() < 1e-14);
        }
    }

    #[test]
    fn too_many_nulls_is_rejected() {
        let mut rng = RngStream::new(2, 0);
        let vs: Vec<Vec<Complex64>> = (0..3).map(|_| cvec(&mut rng, 3)).collect();
        let refs: Vec<&[Complex64]> = vs.iter().map(Vec::as_slice).collect();
        assert!(zf_mrc(&cvec(&mut rng, 3), &refs).is_err());
    }

    #[test]
    fn parallel_nulls_are_degenerate() {
        let mut rng = RngStream::new(3, 0);
        let a = cvec(&mut rng, 4);
        let b: Vec<Complex64> = a.iter().map(|z| z * Complex64::new(0.0, 2.0)).collect();
        assert!(matches!(zf_mrc(&cvec(&mut rng, 4), &[&a, &b]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn gain_law_after_one_null() {
        let mut rng = RngStream::new(4, 0);
        let draws = 1_000_000;
        let mut ws = Vec::with_capacity(draws);
        for _ in 0..draws {
            let h0 = cvec(&mut rng, 3);
            let h1 = cvec(&mut rng, 3);
            ws.push(zf_mrc(&h0, &[&h1]).unwrap().gain(&h0));
        }
        let (m, _) = mean_variance(&ws);
        assert!((m - 2.0).abs() < 0.01, "mean {m}");
        let sub = &ws[..100_000];
        assert!(ks_statistic(sub, |x| regularized_gamma_p(2, x.max(0.0))) < ks_critical_1pct(sub.len()));
    }

    #[test]
    fn delta_extremes() {
        let mut rng = RngStream::new(5, 0);
        let h0 = cvec(&mut rng, 3);
        let bf = zf_mrc(&h0, &[]).unwrap();
        let par: Vec<Complex64> = bf.v0.iter().map(|z| z * Complex64::new(-3.0, 1.0)).collect();
        assert!((post_cancellation_gain(&bf, &par).1 - 1.0).abs() < 1e-12);
        let z = Complex64::new(0.0, 0.0);
        let basis_null = zf_mrc(&vec![Complex64::new(1.0, 0.0), z, z], &[]).unwrap();
        let (i, d) = post_cancellation_gain(&basis_null, &[z, Complex64::new(1.0, 1.0), z]);
        assert_eq!((i, d), (0.0, 0.0));
    }

    #[test]
    fn delta_is_beta_1_n_minus_1() {
        let mut rng = RngStream::new(6, 0);
        let draws = 1_000_000;
        let (mut m1, mut m2) = (0.0, 0.0);
        for _ in 0..draws {
            let h0 = cvec(&mut rng, 3);
            let h1 = cvec(&mut rng, 3);
            let bf = zf_mrc(&h0, &[&h1]).unwrap();
            let (_, d) = post_cancellation_gain(&bf, &cvec(&mut rng, 3));
            m1 += d;
            m2 += d * d;
        }
        m1 /= draws as f64;
        m2 /= draws as f64;
        assert!((m1 - 1.0 / 3.0).abs() < 0.005, "E[δ] = {m1}");
        assert!((m2 - 1.0 / 6.0).abs() < 0.005, "E[δ²] = {m2}");
    }

    #[test]
    fn deltas_are_pairwise_uncorrelated() {
        let mut rng = RngStream::new(7, 0);
        let draws = 100_000;
        let (mut a, mut b) = (Vec::with_capacity(draws), Vec::with_capacity(draws));
        for _ in 0..draws {
            let h0 = cvec(&mut rng, 4);
            let h1 = cvec(&mut rng, 4);
            let bf = zf_mrc(&h0, &[&h1]).unwrap();
            a.push(post_cancellation_gain(&bf, &cvec(&mut rng, 4)).1);
            b.push(post_cancellation_gain(&bf, &cvec(&mut rng, 4)).1);
        }
        assert!(crate::stats::correlation(&a, &b).abs() < 0.01);
    }

    #[test]
    fn dft_rows_are_orthonormal() {
        let q = TrainingMatrix::dft(3, 11).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let g = dot(q.row(i), q.row(j));
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - Complex64::new(want, 0.0)).norm() < 1e-13);
            }
        }
        assert!(TrainingMatrix::dft(4, 3).is_err());
    }

    fn imperfect_setup(seed: u64, mean_nodes: f64) -> (NetworkRealization, CancellationSplit) {
        let p = SystemParams::new(5, 3, 4.0, 3.0, 0.1).unwrap().with_mean_node_count(mean_nodes);
        let real = sample_network(&p, &mut RngStream::new(seed, 0));
        let split = split_interferers(&real);
        (real, split)
    }

    #[test]
    fn training_without_other_interferers_is_exact() {
        let (real, split) = imperfect_setup(8, 200.0);
        let p = real.params.clone();
        let keep: Vec<(f64, Vec<Complex64>)> =
            split.canceled.iter().map(|&t| (real.distance(t), real.channel(t).to_vec())).collect();
        let small = NetworkRealization::from_parts(&p, real.own_channel.clone(), &keep);
        let s = split_interferers(&small);
        let est = estimate_csi_explicit(&small, &s, 11, &mut RngStream::new(9, 0)).unwrap();
        assert_eq!(est.residual_var, 0.0);
        for (e, &t) in est.estimates.iter().zip(&s.canceled) {
            assert_eq!(e.as_slice(), small.channel(t));
        }
    }

    #[test]
    fn estimates_are_nulled_and_residual_is_leakage() {
        let (real, split) = imperfect_setup(10, 200.0);
        let est = estimate_csi_explicit(&real, &split, 11, &mut RngStream::new(11, 0)).unwrap();
        for e in &est.estimates {
            assert!(dot(&est.beamformer.v0, e).norm() <= 1e-10 * norm_sqr(e).sqrt());
        }
        // With v₀ ⟂ ĥ_T the residual term equals the true-channel leakage.
        let leak: f64 = split.canceled.iter().map(|&t| dot_norm_sqr(&est.beamformer.v0, real.channel(t))).sum();
        assert!((est.residual_var - leak).abs() <= 1e-9 * leak);
    }

    #[test]
    fn short_training_is_rejected() {
        let (real, split) = imperfect_setup(12, 200.0);
        assert!(matches!(
            estimate_csi_explicit(&real, &split, 2, &mut RngStream::new(0, 0)),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn residual_variance_decays_as_one_over_m() {
        let (real, split) = imperfect_setup(13, 40.0);
        let avg = |m: usize| {
            let runs = 200;
            (0..runs)
                .map(|k| estimate_csi_explicit(&real, &split, m, &mut RngStream::new(14, k)).unwrap().residual_var)
                .sum::<f64>()
                / runs as f64
        };
        let ratio = avg(1000) / avg(4000);
        assert!((ratio / 4.0 - 1.0).abs() < 0.15, "ratio {ratio}");
    }

    #[test]
    fn shortcut_mean() {
        let mut rng = RngStream::new(15, 0);
        let draws = 1_000_000;
        let mean = (0..draws).map(|_| residual_noise_shortcut(1.0, 3, 11, &mut rng)).sum::<f64>() / draws as f64;
        assert!((mean / (3.0 / 11.0) - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn projection_matches_independent_solver() {
        // v₀ ∝ (I − A(A†A)⁻¹A†) h₀ computed with a general-purpose solver.
        use nalgebra::{DMatrix, DVector};
        let mut rng = RngStream::new(16, 0);
        for _ in 0..50 {
            let n = 5;
            let h0 = cvec(&mut rng, n);
            let nulls: Vec<Vec<Complex64>> = (0..3).map(|_| cvec(&mut rng, n)).collect();
            let refs: Vec<&[Complex64]> = nulls.iter().map(Vec::as_slice).collect();
            let bf = zf_mrc(&h0, &refs).unwrap();

            let a = DMatrix::from_fn(n, 3, |i, j| nulls[j][i]);
            let h = DVector::from_vec(h0.clone());
            let gram = a.adjoint() * &a;
            let coef = gram.lu().solve(&(a.adjoint() * &h)).unwrap();
            let p = &h - &a * coef;
            let w_ref = p.norm_squared();
            assert!((bf.gain(&h0) - w_ref).abs() < 1e-10 * w_ref);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn zf_mrc_is_optimal(seed in any::<u64>(), n in 2usize..7, l_frac in 0.0f64..1.0) {
            let l = ((n - 1) as f64 * l_frac) as usize;
            let mut rng = RngStream::new(seed, 0);
            let h0 = cvec(&mut rng, n);
            let nulls: Vec<Vec<Complex64>> = (0..l).map(|_| cvec(&mut rng, n)).collect();
            let refs: Vec<&[Complex64]> = nulls.iter().map(Vec::as_slice).collect();
            let bf = zf_mrc(&h0, &refs).unwrap();
            prop_assert!((norm_sqr(&bf.v0) - 1.0).abs() < 1e-12);
            for h in &nulls {
                prop_assert!(dot(&bf.v0, h).norm() <= 1e-10 * norm_sqr(h).sqrt());
            }
            let w = bf.gain(&h0);
            let mut basis = OrthoBasis::new(n);
            for h in &nulls {
                basis.push(h).unwrap();
            }
            // random feasible unit vectors never beat the projection
            for _ in 0..200 {
                let mut u = cvec(&mut rng, n);
                basis.project_out(&mut u);
                let norm = norm_sqr(&u).sqrt();
                for z in u.iter_mut() {
                    *z /= norm;
                }
                prop_assert!(dot_norm_sqr(&u, &h0) <= w * (1.0 + 1e-9));
            }
        }
    }
}
