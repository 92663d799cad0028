//! Reproducible random streams and the samplers used by the simulator.
//!
//! Every trial owns an [`RngStream`] keyed on `(master_seed, stream_index)`.
//! The stream is a ChaCha8 keystream whose key is derived from the master
//! seed and whose 64-bit stream id is the index, so two streams differing
//! only in index never overlap and any trial can be regenerated in
//! isolation regardless of how trials are scheduled across threads.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use std::f64::consts::PI;

/// Shape threshold below which integer-shape gamma variates are summed
/// exponentials.
const GAMMA_SUM_MAX_SHAPE: u32 = 32;

#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    inner: ChaCha8Rng,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut state = master_seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// A fresh stream for a sub-task of this one. Children of distinct
    /// parents (or distinct `tag`s) do not collide.
    pub fn derive(&self, tag: u64) -> Self {
        let mut state = self.master_seed ^ tag.wrapping_mul(0xd6e8_feb8_6659_fd93);
        let seed = splitmix64(&mut state);
        Self::new(seed, self.stream_index)
    }

    /// Uniform variate on the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard real normal variate (Box–Muller, one of the pair).
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        let r = (-2.0 * self.uniform().ln()).sqrt();
        r * (2.0 * PI * self.uniform()).cos()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// One 𝒞𝒩(0, 1) variate: real and imaginary parts independent with
/// variance 1/2 each.
#[inline]
pub fn sample_complex_gaussian(rng: &mut RngStream) -> Complex64 {
    let r = (-rng.uniform().ln()).sqrt();
    let (s, c) = (2.0 * PI * rng.uniform()).sin_cos();
    Complex64::new(r * c, r * s)
}

/// Fills `out` with i.i.d. 𝒞𝒩(0, 1) entries.
pub fn fill_complex_gaussian(out: &mut [Complex64], rng: &mut RngStream) {
    for z in out {
        *z = sample_complex_gaussian(rng);
    }
}

pub fn sample_complex_gaussian_vector(n: usize, rng: &mut RngStream) -> Vec<Complex64> {
    assert!(n >= 1, "vector length must be positive");
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    fill_complex_gaussian(&mut v, rng);
    v
}

/// Gamma(k, 1) variate for integer shape `k ≥ 1`; equivalently a
/// chi-square with `k` complex degrees of freedom.
pub fn sample_gamma_integer_shape(k: u32, rng: &mut RngStream) -> f64 {
    assert!(k >= 1, "gamma shape must be positive");
    if k <= GAMMA_SUM_MAX_SHAPE {
        (0..k).map(|_| -rng.uniform().ln()).sum()
    } else {
        marsaglia_tsang(f64::from(k), rng)
    }
}

fn marsaglia_tsang(shape: f64, rng: &mut RngStream) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = rng.standard_normal();
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = rng.uniform();
        if u < 1.0 - 0.0331 * x.powi(4) || u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// beta(1, m) variate by inversion: `1 − u^{1/m}`.
pub fn sample_beta_1_m(m: u32, rng: &mut RngStream) -> f64 {
    assert!(m >= 1, "beta parameter must be positive");
    let u = rng.uniform();
    if m == 1 {
        1.0 - u
    } else {
        -(u.ln() / f64::from(m)).exp_m1()
    }
}

pub fn sample_poisson(mean: f64, rng: &mut RngStream) -> u64 {
    assert!(mean > 0.0 && mean.is_finite(), "Poisson mean must be positive, got {mean}");
    let dist = Poisson::new(mean).expect("validated mean");
    let draw: f64 = dist.sample(rng);
    draw as u64
}
