//! The joint conversion: supremum of single-order boundaries over τ.
//!
//! For a profile ρ(·), the lower boundary of `⋂_τ R_{D_τ}(ρ(τ))` at `α` is
//! `sup_τ f_{τ,ρ(τ)}(α)`. The supremum is searched over a log-spaced coarse
//! grid of orders, golden-section refinement around the best coarse local
//! maxima, the KL order, the profile's own knots, and optionally `τ = ∞`.
//! Every value returned is attained at a searched order, so it is a certified
//! lower bound on the true supremum.

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{check_alpha_grid, TradeoffCurve, TradeoffSample};
use crate::divergence::{ErrorPair, Order, KL_BAND, MIN_ORDER};
use crate::error::{check_probability, Error, Result};
use crate::profile::RdpProfile;
use crate::region::{BindingDirection, SingleOrderRegion};

/// Number of coarse local maxima refined by golden-section search.
const REFINED_MAXIMA: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderSearchConfig {
    pub tau_min: f64,
    pub tau_max: f64,
    pub coarse_grid_size: usize,
    /// Golden-section iterations per refined bracket.
    pub refinement: usize,
    /// `None` adds `τ = ∞` exactly when the profile is finite there.
    pub include_infinite_order: Option<bool>,
}

impl Default for OrderSearchConfig {
    fn default() -> Self {
        Self {
            tau_min: 0.5,
            tau_max: 256.0,
            coarse_grid_size: 200,
            refinement: 80,
            include_infinite_order: None,
        }
    }
}

impl OrderSearchConfig {
    pub fn with_tau_max(mut self, tau_max: f64) -> Self {
        self.tau_max = tau_max;
        self
    }

    pub fn with_infinite_order(mut self, include: bool) -> Self {
        self.include_infinite_order = Some(include);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_min.is_finite() && self.tau_min >= MIN_ORDER) {
            return Err(Error::Config(format!(
                "tau_min = {} must be >= {MIN_ORDER}",
                self.tau_min
            )));
        }
        if !(self.tau_max.is_finite() && self.tau_max > self.tau_min) {
            return Err(Error::Config(format!(
                "tau_max = {} must be finite and greater than tau_min = {}",
                self.tau_max, self.tau_min
            )));
        }
        if self.coarse_grid_size < 2 {
            return Err(Error::Config(format!(
                "coarse_grid_size = {} must be at least 2",
                self.coarse_grid_size
            )));
        }
        Ok(())
    }

    /// Log-spaced orders from `tau_min` to `tau_max` inclusive.
    pub fn coarse_grid(&self) -> Vec<Order> {
        coarse_taus(self)
            .into_iter()
            .map(|t| Order::new(t).expect("grid order >= tau_min"))
            .collect()
    }

    fn includes_infinity(&self, profile: &RdpProfile) -> bool {
        self.include_infinite_order
            .unwrap_or_else(|| profile.rho_unchecked(Order::Infinity).is_finite())
    }

    /// Every order searched regardless of α: coarse grid, KL (when in
    /// range), the profile's knots and, if configured, `τ = ∞`.
    pub fn fixed_orders(&self, profile: &RdpProfile) -> Vec<Order> {
        let mut orders = self.coarse_grid();
        if (self.tau_min..=self.tau_max).contains(&1.0) {
            orders.push(Order::Kl);
        }
        orders.extend(profile.anchor_orders());
        if self.includes_infinity(profile) {
            orders.push(Order::Infinity);
        }
        orders.sort();
        orders.dedup();
        orders
    }
}

fn coarse_taus(cfg: &OrderSearchConfig) -> Vec<f64> {
    let n = cfg.coarse_grid_size;
    let (lo, hi) = (cfg.tau_min.ln(), cfg.tau_max.ln());
    (0..n)
        .map(|i| match i {
            0 => cfg.tau_min,
            _ if i == n - 1 => cfg.tau_max,
            _ => (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Envelope value at one α together with the order that attains it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopePoint {
    pub alpha: f64,
    pub beta: f64,
    pub tau_active: Order,
    pub binding: BindingDirection,
}

/// All single-order boundary values evaluated while searching at one α.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSearch {
    pub point: EnvelopePoint,
    pub evaluated: Vec<(Order, f64)>,
}

fn region_for(profile: &RdpProfile, tau: Order) -> SingleOrderRegion {
    SingleOrderRegion::new(tau, profile.rho_unchecked(tau))
        .expect("profile budgets are nonnegative")
}

/// Runs the τ search at `alpha` and reports every evaluation.
pub fn envelope_search(
    profile: &RdpProfile,
    alpha: f64,
    cfg: &OrderSearchConfig,
) -> Result<EnvelopeSearch> {
    cfg.validate()?;
    check_probability("alpha", alpha)?;

    let eval = |tau: Order| region_for(profile, tau).boundary_beta_unchecked(alpha);
    let eval_t = |t: f64| {
        // Orders inside the KL band evaluate as KL; report them as such.
        let tau = if (t - 1.0).abs() < KL_BAND {
            Order::Kl
        } else {
            Order::new(t).expect("search order >= tau_min")
        };
        (tau, eval(tau))
    };

    let taus = coarse_taus(cfg);
    let coarse: Vec<(Order, f64)> = taus.iter().map(|&t| eval_t(t)).collect();
    let mut evaluated = coarse.clone();

    if cfg.refinement > 0 {
        for k in refinement_seeds(&coarse) {
            let lo = taus[k.saturating_sub(1)];
            let hi = taus[(k + 1).min(taus.len() - 1)];
            golden_section_max(lo.ln(), hi.ln(), cfg.refinement, |x| {
                let (tau, beta) = eval_t(x.exp());
                evaluated.push((tau, beta));
                beta
            });
        }
    }
    for tau in cfg.fixed_orders(profile) {
        if !evaluated.iter().any(|&(t, _)| t == tau) {
            evaluated.push((tau, eval(tau)));
        }
    }

    // Largest β; ties go to the smaller order.
    let &(tau_active, beta) = evaluated
        .iter()
        .reduce(|best, cand| {
            if cand.1 > best.1 || (cand.1 == best.1 && cand.0 < best.0) {
                cand
            } else {
                best
            }
        })
        .ok_or_else(|| Error::Config("order search set is empty".into()))?;

    let pair = ErrorPair::new(alpha, beta)?;
    let binding = region_for(profile, tau_active).binding_direction(pair);
    Ok(EnvelopeSearch {
        point: EnvelopePoint {
            alpha,
            beta,
            tau_active,
            binding,
        },
        evaluated,
    })
}

/// `sup_τ f_{τ,ρ(τ)}(α)` over the configured search set.
pub fn envelope_beta(
    profile: &RdpProfile,
    alpha: f64,
    cfg: &OrderSearchConfig,
) -> Result<EnvelopePoint> {
    envelope_search(profile, alpha, cfg).map(|s| s.point)
}

/// Envelope sampled on a strictly increasing α grid.
pub fn envelope_curve(
    profile: &RdpProfile,
    alphas: &[f64],
    cfg: &OrderSearchConfig,
) -> Result<TradeoffCurve> {
    cfg.validate()?;
    check_alpha_grid(alphas)?;
    let samples = alphas
        .par_iter()
        .map(|&alpha| {
            envelope_beta(profile, alpha, cfg).map(|p| TradeoffSample {
                alpha,
                beta: p.beta,
                tau_active: Some(p.tau_active),
                binding: Some(p.binding),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    TradeoffCurve::new(samples)
}

/// Indices of the best coarse local maxima, global argmax first.
fn refinement_seeds(coarse: &[(Order, f64)]) -> Vec<usize> {
    let n = coarse.len();
    let v = |i: usize| coarse[i].1;
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| (i == 0 || v(i) > v(i - 1)) && (i + 1 == n || v(i) >= v(i + 1)))
        .collect();
    // Stable sort keeps the smaller order first among equal peaks.
    peaks.sort_by(|&a, &b| v(b).total_cmp(&v(a)));
    peaks.truncate(REFINED_MAXIMA);
    peaks
}

/// Golden-section maximization of `f` on `[lo, hi]`.
fn golden_section_max(
    mut lo: f64,
    mut hi: f64,
    iterations: usize,
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iterations {
        if hi - lo <= 1e-14 * hi.abs().max(1.0) {
            break;
        }
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

/// `(ε, δ)` pair read off a trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxDpPoint {
    pub epsilon: f64,
    pub delta: f64,
}

/// Smallest δ such that every curve sample lies in `R_DP(ε, δ)`.
///
/// Both half-planes `1 - α <= e^ε β + δ` and `1 - β <= e^ε α + δ` are
/// checked; for symmetric curves they agree.
pub fn delta_at(curve: &TradeoffCurve, epsilon: f64) -> Result<f64> {
    if !(epsilon >= 0.0) {
        return Err(Error::Domain(format!(
            "epsilon = {epsilon} must be nonnegative"
        )));
    }
    let scale = epsilon.exp();
    let sup = curve
        .samples()
        .iter()
        .map(|s| (1.0 - scale * s.alpha - s.beta).max(1.0 - s.alpha - scale * s.beta))
        .fold(0.0f64, f64::max);
    Ok(sup.min(1.0))
}

/// δ(ε) at each ε of the grid.
pub fn delta_table(curve: &TradeoffCurve, epsilons: &[f64]) -> Result<Vec<ApproxDpPoint>> {
    epsilons
        .iter()
        .map(|&epsilon| delta_at(curve, epsilon).map(|delta| ApproxDpPoint { epsilon, delta }))
        .collect()
}

/// `ε = 0, step, 2·step, …, max`.
pub fn epsilon_grid(max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite() && max >= 0.0 && max.is_finite()) {
        return Err(Error::Domain(format!(
            "invalid epsilon grid: max {max}, step {step}"
        )));
    }
    let n = (max / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| i as f64 * step).collect())
}

/// The default ε grid `0, 0.01, …, 8`.
pub fn default_epsilon_grid() -> Vec<f64> {
    epsilon_grid(8.0, 0.01).expect("static grid")
}

/// Whether `pair` lies in every region `R_{D_τ}(ρ(τ))` of the grid.
pub fn joint_contains(profile: &RdpProfile, pair: ErrorPair, tau_grid: &[Order]) -> bool {
    tau_grid
        .iter()
        .all(|&tau| region_for(profile, tau).contains(pair))
}
