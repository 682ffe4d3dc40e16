//! Sampled trade-off curves.

use serde::Serialize;

use crate::divergence::Order;
use crate::error::{Error, Result};
use crate::region::BindingDirection;

/// One sample `(α, β)` of a trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffSample {
    pub alpha: f64,
    pub beta: f64,
    /// Order whose single-order boundary produced `beta`.
    pub tau_active: Option<Order>,
    /// Which divergence constraint binds at the active order.
    pub binding: Option<BindingDirection>,
}

/// A trade-off function sampled on a strictly increasing α grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeoffCurve {
    samples: Vec<TradeoffSample>,
}

/// Tolerances used by [`TradeoffCurve::invariant_violations`].
pub const CONVEXITY_TOL: f64 = 1e-9;
pub const GUESSING_TOL: f64 = 1e-12;

impl TradeoffCurve {
    pub fn new(samples: Vec<TradeoffSample>) -> Result<Self> {
        let alphas: Vec<f64> = samples.iter().map(|s| s.alpha).collect();
        check_alpha_grid(&alphas)?;
        if let Some(s) = samples.iter().find(|s| !(0.0..=1.0).contains(&s.beta)) {
            return Err(Error::Domain(format!(
                "beta {} at alpha {} is not a probability",
                s.beta, s.alpha
            )));
        }
        Ok(Self { samples })
    }

    /// Curve through the given vertices, without order annotations.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            points
                .iter()
                .map(|&(alpha, beta)| TradeoffSample {
                    alpha,
                    beta,
                    tau_active: None,
                    binding: None,
                })
                .collect(),
        )
    }

    pub fn samples(&self) -> &[TradeoffSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn alphas(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.alpha)
    }

    pub fn betas(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.beta)
    }

    pub fn covers_unit_interval(&self) -> bool {
        matches!(
            (self.samples.first(), self.samples.last()),
            (Some(first), Some(last)) if first.alpha == 0.0 && last.alpha == 1.0
        )
    }

    /// Violations of monotonicity, convexity and `β <= 1 - α`.
    ///
    /// Convexity is checked on consecutive triples: the middle sample may not
    /// lie above the chord of its neighbours by more than [`CONVEXITY_TOL`].
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for w in self.samples.windows(2) {
            if w[1].beta > w[0].beta + CONVEXITY_TOL {
                out.push(format!(
                    "beta increases from {} to {} between alpha {} and {}",
                    w[0].beta, w[1].beta, w[0].alpha, w[1].alpha
                ));
            }
        }
        for w in self.samples.windows(3) {
            let (l, m, r) = (w[0], w[1], w[2]);
            let lambda = (r.alpha - m.alpha) / (r.alpha - l.alpha);
            let chord = lambda * l.beta + (1.0 - lambda) * r.beta;
            if m.beta > chord + CONVEXITY_TOL {
                out.push(format!(
                    "not convex at alpha {}: beta {} above chord {}",
                    m.alpha, m.beta, chord
                ));
            }
        }
        for s in &self.samples {
            if s.beta > 1.0 - s.alpha + GUESSING_TOL {
                out.push(format!(
                    "beta {} exceeds 1 - alpha at alpha {}",
                    s.beta, s.alpha
                ));
            }
        }
        out
    }

    /// Piecewise-linear interpolation between samples.
    pub fn interpolate(&self, alpha: f64) -> Option<f64> {
        let s = &self.samples;
        let idx = s.partition_point(|x| x.alpha < alpha);
        if idx < s.len() && s[idx].alpha == alpha {
            return Some(s[idx].beta);
        }
        if idx == 0 || idx == s.len() {
            return None;
        }
        let (l, r) = (s[idx - 1], s[idx]);
        let t = (alpha - l.alpha) / (r.alpha - l.alpha);
        Some(l.beta + t * (r.beta - l.beta))
    }
}

/// Checks that `alphas` is non-empty, strictly increasing and inside `[0, 1]`.
pub fn check_alpha_grid(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::Domain("alpha grid is empty".into()));
    }
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::Domain(format!("alpha {a} is not a probability")));
    }
    if let Some(w) = alphas.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Domain(format!(
            "alpha grid is not strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// `n` evenly spaced points from 0 to 1 inclusive.
pub fn uniform_alphas(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "alpha grid needs at least 2 points, got {n}"
        )));
    }
    let last = (n - 1) as f64;
    Ok((0..n).map(|i| i as f64 / last).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(check_alpha_grid(&[0.1, 0.1]).is_err());
        assert!(check_alpha_grid(&[0.3, 0.2]).is_err());
        assert!(check_alpha_grid(&[0.0, 1.5]).is_err());
        assert!(check_alpha_grid(&[]).is_err());
        assert!(uniform_alphas(1).is_err());
    }

    #[test]
    fn uniform_grid_hits_endpoints() {
        let g = uniform_alphas(5).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn invariants_flag_concave_and_increasing_curves() {
        let good = TradeoffCurve::from_points(&[(0.0, 1.0), (0.25, 0.25), (1.0, 0.0)]).unwrap();
        assert!(good.invariant_violations().is_empty());
        assert!(good.covers_unit_interval());
        let concave = TradeoffCurve::from_points(&[(0.0, 1.0), (0.5, 0.6), (1.0, 0.0)]).unwrap();
        assert_eq!(concave.invariant_violations().len(), 2);
        let rising = TradeoffCurve::from_points(&[(0.0, 0.2), (0.5, 0.3)]).unwrap();
        assert!(!rising.invariant_violations().is_empty());
    }

    #[test]
    fn interpolation() {
        let c = TradeoffCurve::from_points(&[(0.0, 1.0), (0.25, 0.25), (1.0, 0.0)]).unwrap();
        assert_eq!(c.interpolate(0.125), Some(0.625));
        assert_eq!(c.interpolate(0.25), Some(0.25));
    }
}
