//! Small dense complex-vector kernels.
//!
//! Vectors here have length N (the antenna count, at most a few dozen), so
//! everything is written over plain slices without a matrix library.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Relative residual norm below which a vector is treated as lying in the
/// span of the basis it is orthogonalized against.
pub const RANK_TOL: f64 = 1e-10;

/// Hermitian inner product `a† b`.
#[inline]
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc
}

/// `|a† b|²`, the hot path of every interference sum.
#[inline]
pub fn dot_norm_sqr(a: &[Complex64], b: &[Complex64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let (mut re, mut im) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    re * re + im * im
}

#[inline]
pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// `y ← y − c·x`
#[inline]
fn sub_scaled(y: &mut [Complex64], c: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi -= c * xi;
    }
}

/// An orthonormal basis built incrementally by classical Gram–Schmidt with
/// one full reorthogonalization pass ("twice is enough").
#[derive(Clone, Debug)]
pub struct OrthoBasis {
    dim: usize,
    rank: usize,
    data: Vec<Complex64>,
}

impl OrthoBasis {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rank: 0,
            data: Vec::with_capacity(dim * dim),
        }
    }

    pub fn clear(&mut self) {
        self.rank = 0;
        self.data.clear();
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vector(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Removes the component of `v` in the span of the basis, in place.
    pub fn project_out(&self, v: &mut [Complex64]) {
        for _ in 0..2 {
            for i in 0..self.rank {
                let q = &self.data[i * self.dim..(i + 1) * self.dim];
                let c = dot(q, v);
                sub_scaled(v, c, q);
            }
        }
    }

    /// Appends the normalized residual of `v`. Fails if `v` is numerically in
    /// the current span.
    pub fn push(&mut self, v: &[Complex64]) -> Result<()> {
        assert_eq!(v.len(), self.dim, "vector length does not match basis dimension");
        if self.rank == self.dim {
            return Err(Error::Degenerate(format!(
                "basis already spans all {} dimensions",
                self.dim
            )));
        }
        let scale = norm_sqr(v).sqrt();
        let start = self.data.len();
        self.data.extend_from_slice(v);
        let (head, tail) = self.data.split_at_mut(start);
        for _ in 0..2 {
            for i in 0..self.rank {
                let q = &head[i * self.dim..(i + 1) * self.dim];
                let c = dot(q, tail);
                sub_scaled(tail, c, q);
            }
        }
        let resid = norm_sqr(tail).sqrt();
        if !(resid > RANK_TOL * scale) {
            self.data.truncate(start);
            return Err(Error::Degenerate(format!(
                "vector {} has relative residual {:e} against the preceding span",
                self.rank,
                if scale > 0.0 { resid / scale } else { 0.0 }
            )));
        }
        let inv = 1.0 / resid;
        for z in tail.iter_mut() {
            *z *= inv;
        }
        self.rank += 1;
        Ok(())
    }
}
