//! Poisson network realizations and the canceled / primary / secondary
//! partition of interferers.
//!
//! The typical receiver sits at the origin of a disk holding
//! `mean_node_count` interferers on average, and its own transmitter is at
//! unit distance. Interferer positions enter only through their distances,
//! so angles are never drawn.

use crate::params::SystemParams;
use crate::rng::{fill_complex_gaussian, sample_poisson, RngStream};
use num_complex::Complex64;

/// How an interferer's effective channel `G_T f_T` is synthesized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ChannelSynthesis {
    /// Draw `G_T f_T` directly as a 𝒞𝒩(0, I) vector. With unit-norm `f_T` and
    /// i.i.d. 𝒞𝒩(0, 1) entries in `G_T` this is the exact law, at 1/N the cost.
    #[default]
    Direct,
    /// Draw the full N×N fading matrix and apply the beam `1/√N · (1, …, 1)`.
    FullMatrix,
}

/// Borrowed view of one interferer.
#[derive(Clone, Copy, Debug)]
pub struct Interferer<'a> {
    pub distance: f64,
    pub channel: &'a [Complex64],
    pub mark: f64,
}

/// One sampled network as seen from the typical receiver.
///
/// Interferer channels are stored in one flat buffer, `N` entries per
/// interferer, so that a realization can be resampled in place.
#[derive(Clone, Debug)]
pub struct NetworkRealization {
    pub params: SystemParams,
    pub own_channel: Vec<Complex64>,
    pub disk_radius: f64,
    distances: Vec<f64>,
    marks: Vec<f64>,
    channels: Vec<Complex64>,
}

impl NetworkRealization {
    pub fn empty(params: &SystemParams) -> Self {
        Self {
            params: params.clone(),
            own_channel: vec![Complex64::new(0.0, 0.0); params.n_antennas],
            disk_radius: params.disk_radius(),
            distances: Vec::new(),
            marks: Vec::new(),
            channels: Vec::new(),
        }
    }

    /// Builds a realization from explicit interferer distances and effective
    /// channels, computing the marks.
    pub fn from_parts(params: &SystemParams, own_channel: Vec<Complex64>, interferers: &[(f64, Vec<Complex64>)]) -> Self {
        let n = params.n_antennas;
        assert_eq!(own_channel.len(), n, "own channel length must equal n_antennas");
        let mut real = Self::empty(params);
        real.own_channel = own_channel;
        for (r, h) in interferers {
            assert_eq!(h.len(), n, "channel length must equal n_antennas");
            real.distances.push(*r);
            real.marks.push(crate::linalg::norm_sqr(h));
            real.channels.extend_from_slice(h);
        }
        real
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn n_antennas(&self) -> usize {
        self.params.n_antennas
    }

    pub fn distance(&self, i: usize) -> f64 {
        self.distances[i]
    }

    pub fn mark(&self, i: usize) -> f64 {
        self.marks[i]
    }

    pub fn channel(&self, i: usize) -> &[Complex64] {
        let n = self.params.n_antennas;
        &self.channels[i * n..(i + 1) * n]
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn marks(&self) -> &[f64] {
        &self.marks
    }

    pub fn interferer(&self, i: usize) -> Interferer<'_> {
        Interferer {
            distance: self.distances[i],
            channel: self.channel(i),
            mark: self.marks[i],
        }
    }

    pub fn interferers(&self) -> impl Iterator<Item = Interferer<'_>> + '_ {
        (0..self.len()).map(move |i| self.interferer(i))
    }
}

/// Samples a network realization. `params` must be valid.
pub fn sample_network(params: &SystemParams, rng: &mut RngStream) -> NetworkRealization {
    let mut real = NetworkRealization::empty(params);
    resample_network(&mut real, ChannelSynthesis::Direct, rng);
    real
}

pub fn sample_network_with(params: &SystemParams, synthesis: ChannelSynthesis, rng: &mut RngStream) -> NetworkRealization {
    let mut real = NetworkRealization::empty(params);
    resample_network(&mut real, synthesis, rng);
    real
}

/// Redraws `real` in place from its own parameters, reusing its buffers.
///
/// Draw order is: own channel, interferer count, then per interferer one
/// uniform for the radius followed by its channel. Distances are
/// `R·√u` with `R` the disk radius, so for a fixed stream every distance
/// scales as `λ^{-1/2}` and every mark as `λ^{α/2}`.
pub fn resample_network(real: &mut NetworkRealization, synthesis: ChannelSynthesis, rng: &mut RngStream) {
    let n = real.params.n_antennas;
    let half_alpha = 0.5 * real.params.alpha;
    real.disk_radius = real.params.disk_radius();
    let radius = real.disk_radius;
    let beam = 1.0 / (n as f64).sqrt();
    let mut gmat = match synthesis {
        ChannelSynthesis::Direct => Vec::new(),
        ChannelSynthesis::FullMatrix => vec![Complex64::new(0.0, 0.0); n * n],
    };
    let mut draw = |out: &mut [Complex64], rng: &mut RngStream| match synthesis {
        ChannelSynthesis::Direct => fill_complex_gaussian(out, rng),
        ChannelSynthesis::FullMatrix => {
            fill_complex_gaussian(&mut gmat, rng);
            for (row, o) in out.iter_mut().enumerate() {
                *o = gmat[row * n..(row + 1) * n].iter().sum::<Complex64>() * beam;
            }
        }
    };

    real.own_channel.resize(n, Complex64::new(0.0, 0.0));
    draw(&mut real.own_channel, rng);

    let count = sample_poisson(real.params.mean_node_count, rng) as usize;
    real.distances.clear();
    real.marks.clear();
    real.channels.clear();
    real.channels.resize(count * n, Complex64::new(0.0, 0.0));
    for i in 0..count {
        let r = radius * rng.uniform().sqrt();
        let h = &mut real.channels[i * n..(i + 1) * n];
        draw(h, rng);
        let gain = r.powf(-half_alpha);
        let mut mark = 0.0;
        for z in h.iter_mut() {
            *z *= gain;
            mark += z.norm_sqr();
        }
        real.distances.push(r);
        real.marks.push(mark);
    }
}

/// Partition of the interferers of one realization.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CancellationSplit {
    /// Indices of the canceled interferers, strongest first.
    pub canceled: Vec<usize>,
    pub primary_index: Option<usize>,
    pub j_p: Option<f64>,
}

impl CancellationSplit {
    pub fn is_canceled(&self, i: usize) -> bool {
        self.canceled.contains(&i)
    }
}

/// `true` if interferer `a` ranks ahead of `b`: larger mark, then smaller
/// distance, then lower index.
fn stronger(real: &NetworkRealization, a: usize, b: usize) -> bool {
    let (ja, jb) = (real.marks[a], real.marks[b]);
    if ja != jb {
        return ja > jb;
    }
    let (ra, rb) = (real.distances[a], real.distances[b]);
    if ra != rb {
        return ra < rb;
    }
    a < b
}

pub fn split_interferers(real: &NetworkRealization) -> CancellationSplit {
    let mut split = CancellationSplit::default();
    split_interferers_into(real, &mut split);
    split
}

/// Selects the `L + 1` strongest interferers by insertion into a short
/// sorted list; `L` is small so this beats a full sort.
pub fn split_interferers_into(real: &NetworkRealization, split: &mut CancellationSplit) {
    let keep = real.params.n_cancel + 1;
    let top = &mut split.canceled;
    top.clear();
    for i in 0..real.len() {
        if top.len() == keep && !stronger(real, i, top[keep - 1]) {
            continue;
        }
        let pos = top.partition_point(|&t| stronger(real, t, i));
        if top.len() == keep {
            top.pop();
        }
        top.insert(pos, i);
    }
    if top.len() == keep {
        let p = top.pop().expect("non-empty");
        split.primary_index = Some(p);
        split.j_p = Some(real.marks[p]);
    } else {
        split.primary_index = None;
        split.j_p = None;
    }
}
