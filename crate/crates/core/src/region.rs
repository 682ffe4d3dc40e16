//! Single-order Rényi privacy regions.
//!
//! The region of order `τ` and budget `ρ` is the set of error pairs `(α, β)`
//! whose induced Bernoulli pair `P = Bern(α)`, `Q = Bern(1-β)` satisfies
//! `D_τ(P‖Q) <= ρ` and `D_τ(Q‖P) <= ρ`. It is convex and symmetric about
//! `α = β`, so for any `α` the feasible β values form an interval containing
//! `1 - α`, and the lower boundary can be found by bisection on membership.

use std::fmt;

use serde::Serialize;

use crate::curve::{check_alpha_grid, TradeoffCurve, TradeoffSample};
use crate::divergence::{divergence, within_budget, ErrorPair, Order};
use crate::error::{check_probability, Error, Result};

/// Bisection stops once the bracket is narrower than this fraction of its
/// upper end, so tiny boundary values keep full relative precision.
pub const BISECTION_TOL: f64 = 1e-16;
pub const BISECTION_MAX_ITER: usize = 200;

/// A divergence is treated as binding when it is this close to the budget.
pub const BINDING_TOL: f64 = 1e-9;

/// The region `R_{D_τ}(ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleOrderRegion {
    tau: Order,
    rho: f64,
}

/// Which constraint is active at a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BindingDirection {
    /// `D_τ(Bern(α) ‖ Bern(1-β)) = ρ`.
    Forward,
    /// `D_τ(Bern(1-β) ‖ Bern(α)) = ρ`.
    Reverse,
    Both,
    /// Neither divergence binds; the boundary lies on an edge of the unit square.
    Edge,
}

impl BindingDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            BindingDirection::Forward => "forward",
            BindingDirection::Reverse => "reverse",
            BindingDirection::Both => "both",
            BindingDirection::Edge => "edge",
        }
    }
}

impl fmt::Display for BindingDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionBoundaryPoint {
    pub pair: ErrorPair,
    pub binding_direction: BindingDirection,
}

impl SingleOrderRegion {
    pub fn new(tau: Order, rho: f64) -> Result<Self> {
        let tau = tau.validate()?;
        if rho.is_nan() || rho < 0.0 {
            return Err(Error::Domain(format!(
                "budget rho = {rho} must be nonnegative"
            )));
        }
        Ok(Self { tau, rho })
    }

    pub fn tau(&self) -> Order {
        self.tau
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `D_τ(Bern(α) ‖ Bern(1-β))`.
    pub fn forward_divergence(&self, pair: ErrorPair) -> f64 {
        divergence(pair.alpha(), 1.0 - pair.beta(), self.tau)
    }

    /// `D_τ(Bern(1-β) ‖ Bern(α))`.
    pub fn reverse_divergence(&self, pair: ErrorPair) -> f64 {
        divergence(1.0 - pair.beta(), pair.alpha(), self.tau)
    }

    pub fn contains(&self, pair: ErrorPair) -> bool {
        self.contains_raw(pair.alpha(), pair.beta())
    }

    fn contains_raw(&self, alpha: f64, beta: f64) -> bool {
        // On the anti-diagonal both Bernoullis coincide; `1 - (1 - α)` may not
        // round back to `α`, so decide it here.
        if alpha + beta == 1.0 {
            return true;
        }
        let q = 1.0 - beta;
        within_budget(alpha, q, self.tau, self.rho) && within_budget(q, alpha, self.tau, self.rho)
    }

    /// `inf { β : (α, β) ∈ R }`.
    pub fn boundary_beta(&self, alpha: f64) -> Result<f64> {
        check_probability("alpha", alpha)?;
        Ok(self.boundary_beta_unchecked(alpha))
    }

    pub(crate) fn boundary_beta_unchecked(&self, alpha: f64) -> f64 {
        if self.rho == 0.0 {
            return 1.0 - alpha;
        }
        if alpha == 1.0 || self.rho == f64::INFINITY {
            return 0.0;
        }
        if alpha == 0.0 {
            return self.boundary_at_zero();
        }
        if self.contains_raw(alpha, 0.0) {
            return 0.0;
        }
        // Invariant: (alpha, lo) infeasible, (alpha, hi) feasible.
        let (mut lo, mut hi) = (0.0, 1.0 - alpha);
        for _ in 0..BISECTION_MAX_ITER {
            if hi - lo <= BISECTION_TOL * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.contains_raw(alpha, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Closed-form slice at `α = 0`.
    ///
    /// Forward: `D(Bern(0) ‖ Bern(1-β)) = -ln β` at every order.
    /// Reverse: `D(Bern(1-β) ‖ Bern(0))` is infinite for `τ >= 1` unless
    /// `β = 1`, and equals `-τ ln β / (1-τ)` for `τ < 1`.
    fn boundary_at_zero(&self) -> f64 {
        match self.tau {
            Order::Finite(t) if t < 1.0 - crate::divergence::KL_BAND => {
                (-self.rho * (1.0 - t) / t).exp()
            }
            _ => 1.0,
        }
    }

    pub fn boundary_point(&self, alpha: f64) -> Result<RegionBoundaryPoint> {
        let beta = self.boundary_beta(alpha)?;
        let pair = ErrorPair::new(alpha, beta)?;
        Ok(RegionBoundaryPoint {
            pair,
            binding_direction: self.binding_direction(pair),
        })
    }

    pub(crate) fn binding_direction(&self, pair: ErrorPair) -> BindingDirection {
        let tol = BINDING_TOL * self.rho.max(1.0);
        let fwd = (self.forward_divergence(pair) - self.rho).abs();
        let rev = (self.reverse_divergence(pair) - self.rho).abs();
        match (fwd <= tol, rev <= tol) {
            (true, true) => BindingDirection::Both,
            (true, false) => BindingDirection::Forward,
            (false, true) => BindingDirection::Reverse,
            (false, false) => {
                if pair.beta() == 0.0 || pair.alpha() == 0.0 || !self.rho.is_finite() {
                    BindingDirection::Edge
                } else if fwd <= rev {
                    BindingDirection::Forward
                } else {
                    BindingDirection::Reverse
                }
            }
        }
    }

    /// The `p* ∈ [0.5, 1)` with `D_τ(Bern(1-p*) ‖ Bern(p*)) = ρ`.
    ///
    /// `(1-p*, 1-p*)` is where the boundary meets the diagonal `α = β`.
    pub fn symmetric_point(&self) -> Result<f64> {
        if self.rho == f64::INFINITY {
            return Err(Error::Unsupported(
                "symmetric point is undefined for an infinite budget".into(),
            ));
        }
        if self.rho == 0.0 {
            return Ok(0.5);
        }
        // g(p) is strictly increasing on [0.5, 1) with g(0.5) = 0, g(1) = inf.
        let (mut lo, mut hi) = (0.5f64, 1.0f64);
        for _ in 0..BISECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if within_budget(1.0 - mid, mid, self.tau, self.rho) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Lower boundary sampled on a strictly increasing α grid.
    pub fn sample_curve(&self, alphas: &[f64]) -> Result<TradeoffCurve> {
        check_alpha_grid(alphas)?;
        let samples = alphas
            .iter()
            .map(|&alpha| {
                let pt = self.boundary_point(alpha)?;
                Ok(TradeoffSample {
                    alpha,
                    beta: pt.pair.beta(),
                    tau_active: Some(self.tau),
                    binding: Some(pt.binding_direction),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TradeoffCurve::new(samples)
    }
}
