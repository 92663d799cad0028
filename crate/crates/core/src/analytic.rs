//! Closed forms and quadratures for the outage and capacity analysis.
//!
//! Notation: `k = N − L` is the array gain, `W ~ Gamma(k, 1)` the signal
//! power after cancellation, `δ ~ beta(1, N − 1)` the residual fraction of
//! an uncanceled interferer, and `J_P` the pre-cancellation power of the
//! strongest uncanceled interferer, whose law is
//! `Pr(J_P ≤ g) = Q(L + 1, νλ g^{-2/α})` with `ν = πΓ(N + 2/α)/Γ(N)`.
//!
//! Expectations over `W` run on `u = ln w`. Both ends are cut where the
//! neglected mass is far below the requested tolerance.

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::quadrature::{integrate, integrate_fallible, QuadOptions, QuadResult};
use crate::special::{log_gamma_unchecked as lgamma, regularized_gamma_p, regularized_gamma_q};
use serde::Serialize;
use std::f64::consts::PI;

/// Default relative accuracy of the bound quadratures.
pub const DEFAULT_REL_TOL: f64 = 1e-6;

/// Inner integrals are solved this much tighter than the outer ones.
const INNER_TIGHTENING: f64 = 1e-2;

/// Probabilities below this are not resolved to relative accuracy.
const ABS_FLOOR: f64 = 1e-30;

fn inner_options(rel_tol: f64) -> QuadOptions {
    QuadOptions {
        abs_tol: ABS_FLOOR * INNER_TIGHTENING,
        ..QuadOptions::rel(rel_tol * INNER_TIGHTENING)
    }
}

fn outer_options(rel_tol: f64) -> QuadOptions {
    QuadOptions {
        abs_tol: ABS_FLOOR,
        ..QuadOptions::rel(rel_tol)
    }
}

pub fn nu(n_antennas: usize, alpha: f64) -> f64 {
    let n = n_antennas as f64;
    PI * (lgamma(n + 2.0 / alpha) - lgamma(n)).exp()
}

fn poisson_arg(g: f64, nu_lambda: f64, alpha: f64) -> f64 {
    nu_lambda * g.powf(-2.0 / alpha)
}

/// CDF of the primary interferer's pre-cancellation power `J_P`.
pub fn jp_cdf(g: f64, lambda: f64, params: &SystemParams) -> f64 {
    if g <= 0.0 {
        return 0.0;
    }
    let nl = nu(params.n_antennas, params.alpha) * lambda;
    regularized_gamma_q(params.n_cancel as u32 + 1, poisson_arg(g, nl, params.alpha))
}

/// Density of `J_P`.
pub fn jp_pdf(g: f64, lambda: f64, params: &SystemParams) -> f64 {
    if g <= 0.0 {
        return 0.0;
    }
    let alpha = params.alpha;
    let l1 = params.n_cancel as f64 + 1.0;
    let nl = nu(params.n_antennas, alpha) * lambda;
    let x = poisson_arg(g, nl, alpha);
    // 2/(αΓ(L+1)) · x^{L+1} e^{−x} / g
    ((2.0 / alpha).ln() - lgamma(l1) + l1 * x.ln() - x - g.ln()).exp()
}

/// Conditional mean and variance of the secondary interference given
/// `J_P = g`.
pub fn is_cond_moments(g: f64, lambda: f64, params: &SystemParams) -> (f64, f64) {
    let (a, b) = cond_moment_coefs(lambda, params);
    let alpha = params.alpha;
    (a * g.powf(1.0 - 2.0 / alpha), b * g.powf(2.0 - 2.0 / alpha))
}

fn cond_moment_coefs(lambda: f64, params: &SystemParams) -> (f64, f64) {
    let n = params.n_antennas as f64;
    let alpha = params.alpha;
    let nl = nu(params.n_antennas, alpha) * lambda;
    let mean = 2.0 * nl / (n * (alpha - 2.0));
    let var = 2.0 * nl / (n * (n + 1.0) * (alpha - 1.0));
    (mean, var)
}

/// `Pr(x_lo ≤ X ≤ x_hi)` for `X ~ Gamma(k, 1)` computed from whichever
/// tail avoids cancellation.
fn gamma_mass_between(k: u32, x_lo: f64, x_hi: f64) -> f64 {
    if x_lo >= x_hi {
        // empty up to rounding in the boundary
        return 0.0;
    }
    let p_lo = regularized_gamma_p(k, x_lo);
    if p_lo < 0.5 {
        (regularized_gamma_p(k, x_hi) - p_lo).max(0.0)
    } else {
        (regularized_gamma_q(k, x_lo) - regularized_gamma_q(k, x_hi)).max(0.0)
    }
}

/// `E[W^{-s}]` for `W ~ Gamma(k, 1)`, finite only for `s < k`.
pub fn mean_w_neg_power(k: usize, s: f64) -> Option<f64> {
    let k = k as f64;
    (k > s).then(|| (lgamma(k - s) - lgamma(k)).exp())
}

/// `E[δ^s]` for `δ ~ beta(1, N − 1)`; `δ ≡ 1` when `N = 1`.
pub fn mean_delta_power(n_antennas: usize, s: f64) -> f64 {
    let n = n_antennas as f64;
    (lgamma(n) + lgamma(s + 1.0) - lgamma(n + s)).exp()
}

/// Integration range in `ln w` for an expectation over `W ~ Gamma(k, 1)`
/// whose integrand switches on around `w_c`.
fn w_log_range(k: u32, w_c: f64) -> (f64, f64) {
    let kf = f64::from(k);
    // w_c underflows to zero at absurdly small densities
    let lo = w_c.clamp(f64::MIN_POSITIVE, 1.0) * 10f64.powf(-20.0 / kf);
    let mut hi = kf + 10.0;
    while regularized_gamma_q(k, hi) > 1e-17 {
        hi *= 1.5;
    }
    (lo.ln(), hi.ln())
}

/// `f_W(w)·w` at `w = e^u`, the Jacobian-weighted Gamma(k) density.
fn gamma_density_log(k: u32, u: f64) -> f64 {
    let kf = f64::from(k);
    (kf * u - u.exp() - lgamma(kf)).exp()
}

struct Setup {
    l1: u32,
    k: u32,
    n: usize,
    alpha: f64,
    theta: f64,
    nl: f64,
}

impl Setup {
    fn new(lambda: f64, params: &SystemParams) -> Result<Self> {
        params.validate()?;
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParams(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self {
            l1: params.n_cancel as u32 + 1,
            k: params.array_gain() as u32,
            n: params.n_antennas,
            alpha: params.alpha,
            theta: params.theta,
            nl: nu(params.n_antennas, params.alpha) * lambda,
        })
    }

    /// Signal level around which `Pr(J_P > w/θ)` switches from 1 to 0.
    fn w_c(&self) -> f64 {
        self.theta * self.nl.powf(0.5 * self.alpha)
    }
}

/// Lower outage bound `Pr(δ_P J_P > W/θ)` with its quadrature error.
pub fn pout_lower_with(lambda: f64, params: &SystemParams, rel_tol: f64) -> Result<QuadResult> {
    let s = Setup::new(lambda, params)?;
    let c = s.nl * s.theta.powf(2.0 / s.alpha);
    let (u_lo, u_hi) = w_log_range(s.k, s.w_c());
    let inner_opts = inner_options(rel_tol);
    let mut inner_rel: f64 = 0.0;
    let nm1 = (s.n - 1) as i32;

    let outer = integrate_fallible(
        |u| {
            let cw = c * (-2.0 / s.alpha * u).exp();
            let inner = if s.n == 1 {
                regularized_gamma_p(s.l1, cw)
            } else {
                // δ = t^α so the small-δ behaviour δ^{2(L+1)/α} becomes polynomial
                let r = integrate(
                    |t| {
                        if t <= 0.0 {
                            return 0.0;
                        }
                        let ta = t.powf(s.alpha);
                        f64::from(nm1) * (1.0 - ta).powi(nm1 - 1) * s.alpha * ta / t
                            * regularized_gamma_p(s.l1, cw * t * t)
                    },
                    0.0,
                    1.0,
                    inner_opts,
                    "lower bound, δ integral",
                )?;
                if r.value > 0.0 {
                    inner_rel = inner_rel.max(r.error / r.value);
                }
                r.value
            };
            Ok(gamma_density_log(s.k, u) * inner)
        },
        u_lo,
        u_hi,
        outer_options(rel_tol),
        "lower bound, W integral",
    )?;
    Ok(QuadResult {
        value: outer.value.clamp(0.0, 1.0),
        error: outer.error + inner_rel * outer.value.abs(),
        evaluations: outer.evaluations,
    })
}

pub fn pout_lower(lambda: f64, params: &SystemParams) -> Result<f64> {
    Ok(pout_lower_with(lambda, params, DEFAULT_REL_TOL)?.value)
}

/// Solves `Σ cᵢ g^{eᵢ} = y` for `g > 0` with all `cᵢ, eᵢ > 0`; the left
/// side is strictly increasing from 0, so the root is unique.
fn solve_power_sum(terms: &[(f64, f64)], y: f64) -> Result<f64> {
    let f = |g: f64| terms.iter().map(|&(c, e)| c * g.powf(e)).sum::<f64>() - y;
    let m = terms.len() as f64;
    // At the root some term is at least y/m and every term is at most y.
    // Both ends are widened slightly against rounding in the powers.
    let lo = terms
        .iter()
        .map(|&(c, e)| (y / (m * c)).powf(1.0 / e))
        .fold(f64::INFINITY, f64::min)
        * (1.0 - 1e-12);
    let mut lo = lo.max(f64::MIN_POSITIVE);
    let mut hi = terms.iter().map(|&(c, e)| (y / c).powf(1.0 / e)).fold(f64::INFINITY, f64::min) * (1.0 + 1e-12);
    if f(lo) > 0.0 && lo == f64::MIN_POSITIVE {
        // the root underflows
        return Ok(lo.min(hi));
    }
    if !(hi.is_finite() && f(lo) <= 0.0 && f(hi) >= 0.0) {
        return Err(Error::RootBracket(format!("no sign change for y = {y:e} on [{lo:e}, {hi:e}]")));
    }
    for _ in 0..200 {
        if hi / lo - 1.0 < 1e-13 {
            break;
        }
        let mid = (lo * hi).sqrt();
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt().min(hi))
}

/// Analytic outage bounds at one density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub lambda: f64,
    pub lower: f64,
    pub upper: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lower_error: f64,
    pub upper_error: f64,
    pub quadrature_error_estimate: f64,
}

/// The per-`w` pieces of the upper bound.
struct UpperTerms<'a> {
    s: &'a Setup,
    a: f64,
    b: f64,
    inner_opts: QuadOptions,
}

impl UpperTerms<'_> {
    fn x(&self, g: f64) -> f64 {
        poisson_arg(g, self.s.nl, self.s.alpha)
    }

    fn lambda1(&self, y: f64) -> f64 {
        regularized_gamma_p(self.s.l1, self.x(y))
    }

    fn g_star(&self, y: f64) -> Result<f64> {
        let beta = 1.0 - 2.0 / self.s.alpha;
        solve_power_sum(&[(1.0, 1.0), (self.a, beta)], y)
    }

    fn g_kink(&self, y: f64) -> Result<f64> {
        let alpha = self.s.alpha;
        solve_power_sum(&[(1.0, 1.0), (self.a, 1.0 - 2.0 / alpha), (self.b.sqrt(), 1.0 - 1.0 / alpha)], y)
    }

    fn lambda2(&self, y: f64) -> Result<f64> {
        let gs = self.g_star(y)?;
        Ok(gamma_mass_between(self.s.l1, self.x(y), self.x(gs)))
    }

    /// Returns the value and the inner quadrature's error.
    fn lambda3(&self, y: f64) -> Result<(f64, f64)> {
        let s = self.s;
        let gs = self.g_star(y)?;
        let gk = self.g_kink(y)?.min(gs);
        // the Chebyshev ratio saturates at one on [g_k, g*]
        let saturated = gamma_mass_between(s.l1, self.x(gs), self.x(gk));
        // below g_k: ∫ v/(y − g − m)² f_P dg on ln g
        let x_max = f64::from(s.l1) + 120.0;
        let g_lo = (s.nl / x_max).powf(0.5 * s.alpha).max(f64::MIN_POSITIVE);
        if g_lo >= gk {
            return Ok((saturated, 0.0));
        }
        let alpha = s.alpha;
        let l1 = f64::from(s.l1);
        let log_norm = (2.0 / alpha).ln() - lgamma(l1);
        let r = integrate(
            |u| {
                let g = u.exp();
                let m = self.a * g.powf(1.0 - 2.0 / alpha);
                let v = self.b * g.powf(2.0 - 2.0 / alpha);
                let gap = y - g - m;
                let x = self.x(g);
                if !(x > 0.0 && x.is_finite()) {
                    return 0.0;
                }
                let dens = (log_norm + l1 * x.ln() - x).exp();
                let ratio = if gap > 0.0 { (v / (gap * gap)).min(1.0) } else { 1.0 };
                ratio * dens
            },
            g_lo.ln(),
            gk.ln(),
            self.inner_opts,
            "upper bound, Chebyshev integral",
        )?;
        Ok((saturated + r.value, r.error))
    }
}

/// Lower and upper outage bounds with the upper bound's components.
pub fn pout_upper_with(lambda: f64, params: &SystemParams, rel_tol: f64) -> Result<BoundReport> {
    let lower = pout_lower_with(lambda, params, rel_tol)?;
    let s = Setup::new(lambda, params)?;
    let (a, b) = cond_moment_coefs(lambda, params);
    let terms = UpperTerms {
        s: &s,
        a,
        b,
        inner_opts: inner_options(rel_tol),
    };
    let (u_lo, u_hi) = w_log_range(s.k, s.w_c());
    let outer = outer_options(rel_tol);
    let y_of = |u: f64| u.exp() / s.theta;

    let l1 = integrate(
        |u| gamma_density_log(s.k, u) * terms.lambda1(y_of(u)),
        u_lo,
        u_hi,
        outer,
        "upper bound, Λ₁",
    )?;
    let l2 = integrate_fallible(
        |u| Ok(gamma_density_log(s.k, u) * terms.lambda2(y_of(u))?),
        u_lo,
        u_hi,
        outer,
        "upper bound, Λ₂",
    )?;
    let mut inner_err_rel: f64 = 0.0;
    let l3 = integrate_fallible(
        |u| {
            let (v, e) = terms.lambda3(y_of(u))?;
            if v > 0.0 {
                inner_err_rel = inner_err_rel.max(e / v);
            }
            Ok(gamma_density_log(s.k, u) * v)
        },
        u_lo,
        u_hi,
        outer,
        "upper bound, Λ₃",
    )?;

    let lambda1 = l1.value.clamp(0.0, 1.0);
    let lambda2 = l2.value.clamp(0.0, 1.0);
    let lambda3 = l3.value.clamp(0.0, 1.0);
    let upper = (lambda1 + lambda2 + lambda3).min(1.0);
    let upper_error = l1.error + l2.error + l3.error + inner_err_rel * lambda3;
    Ok(BoundReport {
        lambda,
        lower: lower.value,
        upper,
        lambda1,
        lambda2,
        lambda3,
        lower_error: lower.error,
        upper_error,
        quadrature_error_estimate: lower.error.max(upper_error),
    })
}

pub fn pout_upper(lambda: f64, params: &SystemParams) -> Result<BoundReport> {
    pout_upper_with(lambda, params, DEFAULT_REL_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

/// Density at which the chosen bound equals `target`, by bisection on
/// `ln λ`. Both bounds increase with `λ`.
pub fn invert_bound(target: f64, params: &SystemParams, which: Bound) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParams(format!("target outage must lie in (0, 1), got {target}")));
    }
    let eval = |lambda: f64| -> Result<f64> {
        Ok(match which {
            Bound::Lower => pout_lower(lambda, params)?,
            Bound::Upper => pout_upper(lambda, params)?.upper,
        })
    };
    let (mut lo, mut hi) = (1e-2, 1e-2);
    let mut steps = 0;
    while eval(lo)? >= target {
        lo /= 4.0;
        steps += 1;
        if steps > 60 {
            return Err(Error::Search(format!("no density below which the bound drops under {target}")));
        }
    }
    while eval(hi)? <= target {
        hi *= 4.0;
        steps += 1;
        if steps > 60 {
            return Err(Error::Search(format!("no density above which the bound exceeds {target}")));
        }
    }
    while hi / lo - 1.0 > 1e-9 {
        let mid = (lo * hi).sqrt();
        if eval(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// Constants of the small-density asymptotics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub nu: f64,
    /// `Γ(L + 1)^{-1/L}`, defined for `L ≥ 1`.
    pub omega: Option<f64>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub kappa3: Option<f64>,
}

pub fn omega(n_cancel: usize) -> Option<f64> {
    (n_cancel >= 1).then(|| {
        let l = n_cancel as f64;
        (-lgamma(l + 1.0) / l).exp()
    })
}

pub fn kappas(params: &SystemParams) -> DerivedConstants {
    let n = params.n_antennas;
    let l = params.n_cancel as f64;
    let k = params.array_gain();
    let alpha = params.alpha;
    let theta = params.theta;
    let nu = nu(n, alpha);
    let s = 2.0 * (l + 1.0) / alpha;
    let base = (l + 1.0) * (nu * theta.powf(2.0 / alpha)).ln() - lgamma(l + 2.0);
    let ew = mean_w_neg_power(k, s);
    let kappa1 = ew.map(|ew| mean_delta_power(n, s) * ew * base.exp());
    let kappa2 = ew.map(|ew| 2f64.powf(s + 1.0) * ew * base.exp());
    let kappa3 = if k > 2 && l + 1.0 > alpha {
        let nf = n as f64;
        let ew2 = mean_w_neg_power(k, 2.0).expect("k > 2");
        Some(
            8.0 * theta * theta * nu.powf(alpha) * (lgamma(l - alpha + 2.0) - lgamma(l + 1.0)).exp() * ew2
                / (nf * (nf + 1.0) * (alpha - 1.0)),
        )
    } else {
        None
    };
    DerivedConstants {
        nu,
        omega: omega(params.n_cancel),
        kappa1,
        kappa2,
        kappa3,
    }
}

/// Capacity bracket at small outage `ε`, using `log₂(1 + θ)` as the rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CapacityBracket {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

pub fn tc_asymptotic_eps(eps: f64, params: &SystemParams) -> Result<CapacityBracket> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParams(format!("eps must lie in (0, 1), got {eps}")));
    }
    params.validate()?;
    let kc = kappas(params);
    let l1 = params.n_cancel as f64 + 1.0;
    let rate = (1.0 + params.theta).log2();
    let upper = kc.kappa1.map(|k1| k1.powf(-1.0 / l1) * rate * eps.powf(1.0 / l1));
    let lower = if l1 <= params.alpha {
        kc.kappa2.map(|k2| k2.powf(-1.0 / l1) * rate * eps.powf(1.0 / l1))
    } else {
        kc.kappa3
            .map(|k3| k3.powf(-1.0 / params.alpha) * rate * eps.powf(1.0 / params.alpha))
    };
    Ok(CapacityBracket { lower, upper })
}

/// Large-`L` constants bracketing `C(L) / ((1−ε) log₂(1+θ) L^{1−2/α})` at
/// fixed array gain `N − L`.
pub fn tc_scaling_l(params: &SystemParams, eps: f64) -> Result<CapacityBracket> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParams(format!("eps must lie in (0, 1), got {eps}")));
    }
    params.validate()?;
    let k = params.array_gain() as f64;
    let (alpha, theta) = (params.alpha, params.theta);
    let upper = 2.0 / PI * (k / (theta * (1.0 - eps))).powf(2.0 / alpha);
    let lower = (k >= 2.0).then(|| {
        // E[W⁻¹] = 1/(k − 1), infinite at k = 1
        let inv_mean = if k > 1.0 { 1.0 / (k - 1.0) } else { f64::INFINITY };
        1.0 / PI * (eps * (alpha - 2.0) / (2.0 * theta * inv_mean)).powf(2.0 / alpha)
    });
    Ok(CapacityBracket {
        lower: lower.filter(|v| v.is_finite() && *v > 0.0),
        upper: Some(upper),
    })
}

/// Training length meeting an outage-loss budget `ϑ_p` and a rate-loss
/// budget `ϑ_b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrainingPlan {
    pub train_len: usize,
    pub omega: f64,
    /// Threshold `Z` on the estimation-noise variable, `L e^{−ωZ} = ϑ_p`.
    pub z: f64,
}

pub fn training_length(n_cancel: usize, theta_p: f64, theta_b: f64) -> Result<TrainingPlan> {
    if n_cancel < 1 {
        return Err(Error::InvalidParams("training needs at least one canceled interferer".into()));
    }
    if !(theta_p > 0.0 && theta_p < 1.0) {
        return Err(Error::InvalidParams(format!("theta_p must lie in (0, 1), got {theta_p}")));
    }
    if !(theta_b > 0.0) || !theta_b.is_finite() {
        return Err(Error::InvalidParams(format!("theta_b must be positive, got {theta_b}")));
    }
    let omega = omega(n_cancel).expect("L ≥ 1");
    let z = ((n_cancel as f64).ln() - theta_p.ln()) / omega;
    let raw = (z / (theta_b.exp2() - 1.0)).ceil();
    let train_len = (raw as usize).max(n_cancel);
    Ok(TrainingPlan { train_len, omega, z })
}

/// Upper bound on the normalized capacity loss `ΔC / C`.
pub fn capacity_loss_bound(theta_p: f64, theta_b: f64, eps: f64, theta: f64) -> f64 {
    theta_p / (1.0 - eps) + theta_b / (1.0 + theta).log2()
}

/// Training length keeping the capacity scaling as `ε → 0`:
/// `((1+ϱ)/ω) ε^{−ϱ}`, plus `(ln L/ω) ε^{−ϱ}/ln(1/ε)` when `with_correction`.
pub fn training_length_scaling(eps: f64, rho: f64, n_cancel: usize, with_correction: bool) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParams(format!("rho must be positive, got {rho}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParams(format!("eps must lie in (0, 1), got {eps}")));
    }
    let omega = omega(n_cancel).ok_or_else(|| Error::InvalidParams("L must be at least 1".into()))?;
    let lead = (1.0 + rho) / omega * eps.powf(-rho);
    let corr = if with_correction {
        (n_cancel as f64).ln() / omega * eps.powf(-rho) / (1.0 / eps).ln()
    } else {
        0.0
    };
    Ok(lead + corr)
}

/// Mean total post-cancellation interference, defined for `L > α/2 − 1`.
pub fn mean_total_interference(lambda: f64, params: &SystemParams) -> Option<f64> {
    let l = params.n_cancel as f64;
    let alpha = params.alpha;
    let arg = l - alpha / 2.0 + 1.0;
    if !(arg > 0.0) || params.n_cancel == 0 {
        return None;
    }
    let n = params.n_antennas as f64;
    let nl = nu(params.n_antennas, alpha) * lambda;
    Some(2.0 * nl.powf(alpha / 2.0) / (alpha - 2.0) * l * (lgamma(arg) - lgamma(l + 1.0)).exp() / n)
}

/// Mean interference from the primary interferer alone.
pub fn mean_primary_interference(lambda: f64, params: &SystemParams) -> Option<f64> {
    let l = params.n_cancel as f64;
    let alpha = params.alpha;
    let arg = l + 1.0 - alpha / 2.0;
    if !(arg > 0.0) {
        return None;
    }
    let n = params.n_antennas as f64;
    let nl = nu(params.n_antennas, alpha) * lambda;
    Some((lgamma(arg) - lgamma(l + 1.0)).exp() * nl.powf(alpha / 2.0) / n)
}

/// Transmission capacity `(1 − ε) log₂(1 + θ) λ`.
pub fn capacity(eps: f64, theta: f64, lambda: f64) -> f64 {
    (1.0 - eps) * (1.0 + theta).log2() * lambda
}
