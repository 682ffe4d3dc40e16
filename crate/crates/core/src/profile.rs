//! RDP profiles `τ ↦ ρ(τ)`.
//!
//! Profiles are read from JSON of the form
//!
//! ```json
//! {"type":"gaussian","sigma":1.0}
//! {"type":"rr","p":0.75}
//! {"type":"point","tau":1.5,"rho":0.75}
//! {"type":"table","points":[[2.0,1.0],[4.0,2.0]]}
//! ```
//!
//! Unknown keys are rejected. A point guarantee may use `"tau":"inf"`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::divergence::{log_sum_exp2, Order, KL_BAND, MIN_ORDER};
use crate::error::{Error, Result};

/// A validated RDP profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileSpec", into = "ProfileSpec")]
pub struct RdpProfile {
    kind: ProfileKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `ρ(τ) = τ / (2σ²)`.
    Gaussian { sigma: f64 },
    /// Exact profile of symmetric randomized response with retention `p`.
    RandomizedResponse { p: f64 },
    /// A single guarantee; every other order is unconstrained.
    PointGuarantee { tau: Order, rho: f64 },
    /// Samples `(τ, ρ)` with strictly increasing τ.
    Tabulated { points: Vec<(f64, f64)> },
}

/// Wire form of a profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum ProfileSpec {
    Gaussian { sigma: f64 },
    Rr { p: f64 },
    Point { tau: Order, rho: f64 },
    Table { points: Vec<(f64, f64)> },
}

impl TryFrom<ProfileSpec> for RdpProfile {
    type Error = String;

    fn try_from(spec: ProfileSpec) -> std::result::Result<Self, String> {
        match spec {
            ProfileSpec::Gaussian { sigma } => Self::gaussian(sigma),
            ProfileSpec::Rr { p } => Self::randomized_response(p),
            ProfileSpec::Point { tau, rho } => Self::point(tau, rho),
            ProfileSpec::Table { points } => Self::tabulated(points),
        }
        .map_err(|e| e.message().to_string())
    }
}

impl From<RdpProfile> for ProfileSpec {
    fn from(profile: RdpProfile) -> Self {
        match profile.kind {
            ProfileKind::Gaussian { sigma } => ProfileSpec::Gaussian { sigma },
            ProfileKind::RandomizedResponse { p } => ProfileSpec::Rr { p },
            ProfileKind::PointGuarantee { tau, rho } => ProfileSpec::Point { tau, rho },
            ProfileKind::Tabulated { points } => ProfileSpec::Table { points },
        }
    }
}

impl RdpProfile {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Domain(format!(
                "gaussian sigma = {sigma} must be positive"
            )));
        }
        Ok(Self {
            kind: ProfileKind::Gaussian { sigma },
        })
    }

    pub fn randomized_response(p: f64) -> Result<Self> {
        if !(p > 0.5 && p < 1.0) {
            return Err(Error::Domain(format!(
                "randomized response p = {p} must lie in (0.5, 1)"
            )));
        }
        Ok(Self {
            kind: ProfileKind::RandomizedResponse { p },
        })
    }

    pub fn point(tau: Order, rho: f64) -> Result<Self> {
        let tau = tau.validate()?;
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(Error::Domain(format!(
                "point guarantee rho = {rho} must be finite and nonnegative"
            )));
        }
        Ok(Self {
            kind: ProfileKind::PointGuarantee { tau, rho },
        })
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain(
                "profile table needs at least one point".into(),
            ));
        }
        for &(tau, rho) in &points {
            if !(tau.is_finite() && tau >= MIN_ORDER) {
                return Err(Error::Domain(format!(
                    "table order {tau} must be finite and >= {MIN_ORDER}"
                )));
            }
            if !(rho.is_finite() && rho >= 0.0) {
                return Err(Error::Domain(format!(
                    "table budget {rho} at order {tau} must be finite and nonnegative"
                )));
            }
        }
        if let Some(w) = points.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::Domain(format!(
                "table orders must be strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
        Ok(Self {
            kind: ProfileKind::Tabulated { points },
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("invalid profile JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serializes")
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// `ρ(τ)`; `+∞` means the order carries no constraint.
    pub fn rho_at(&self, tau: Order) -> Result<f64> {
        let tau = tau.validate()?;
        Ok(self.rho_unchecked(tau))
    }

    pub(crate) fn rho_unchecked(&self, tau: Order) -> f64 {
        match &self.kind {
            ProfileKind::Gaussian { sigma } => tau.value() / (2.0 * sigma * sigma),
            ProfileKind::RandomizedResponse { p } => rr_rho(*p, tau),
            ProfileKind::PointGuarantee { tau: star, rho } => {
                if tau == *star {
                    *rho
                } else {
                    f64::INFINITY
                }
            }
            ProfileKind::Tabulated { points } => table_rho(points, tau.value()),
        }
    }

    /// Orders at which the profile carries information the τ search must not miss.
    pub fn anchor_orders(&self) -> Vec<Order> {
        match &self.kind {
            ProfileKind::PointGuarantee { tau, .. } => vec![*tau],
            ProfileKind::Tabulated { points } => points
                .iter()
                .map(|&(t, _)| Order::new(t).expect("validated table order"))
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn validate(&self, tau_grid: &[Order]) -> ProfileReport {
        validate_profile(self, tau_grid)
    }
}

impl FromStr for RdpProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_json(s)
    }
}

/// `(1/(τ-1)) ln(p^τ (1-p)^(1-τ) + (1-p)^τ p^(1-τ))` with its KL and ∞ limits.
fn rr_rho(p: f64, tau: Order) -> f64 {
    let log_odds = p.ln() - (1.0 - p).ln();
    match tau {
        Order::Infinity => log_odds,
        Order::Kl => (2.0 * p - 1.0) * log_odds,
        Order::Finite(t) if (t - 1.0).abs() < KL_BAND => (2.0 * p - 1.0) * log_odds,
        Order::Finite(t) => {
            let (lp, lq) = (p.ln(), (1.0 - p).ln());
            let lg = log_sum_exp2(t * lp + (1.0 - t) * lq, t * lq + (1.0 - t) * lp);
            (lg / (t - 1.0)).max(0.0)
        }
    }
}

/// Interpolates `h(τ) = (τ-1) ρ(τ)` linearly on segments at or above order 1.
///
/// Below order 1 a chord of the convex `h` would under-estimate ρ, so those
/// segments (and the one straddling 1) take the right endpoint's budget,
/// which is an upper bound whenever ρ is non-decreasing in τ.
fn table_rho(points: &[(f64, f64)], t: f64) -> f64 {
    let (first, last) = (points[0].0, points[points.len() - 1].0);
    if !(t >= first && t <= last) {
        return f64::INFINITY;
    }
    let idx = points.partition_point(|&(tau, _)| tau < t);
    let (t_hi, rho_hi) = points[idx];
    if t_hi == t {
        return rho_hi;
    }
    let (t_lo, rho_lo) = points[idx - 1];
    if t_lo < 1.0 {
        return rho_hi;
    }
    let (h_lo, h_hi) = ((t_lo - 1.0) * rho_lo, (t_hi - 1.0) * rho_hi);
    let w = (t - t_lo) / (t_hi - t_lo);
    let h = h_lo + w * (h_hi - h_lo);
    h / (t - 1.0)
}

/// A decrease of ρ between two consecutive finite grid entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityWarning {
    pub tau_lo: Order,
    pub tau_hi: Order,
    pub rho_lo: f64,
    pub rho_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileReport {
    pub nonnegative: bool,
    pub monotonicity_warnings: Vec<MonotonicityWarning>,
    /// `(τ, ρ(τ) < ∞)` for every grid entry.
    pub finiteness: Vec<(Order, bool)>,
    /// Largest finite budget on the grid.
    pub max_finite_rho: Option<f64>,
}

impl ProfileReport {
    pub fn passes(&self) -> bool {
        self.nonnegative && self.monotonicity_warnings.is_empty()
    }
}

/// Sanity report for a profile over a grid of orders (sorted internally).
pub fn validate_profile(profile: &RdpProfile, tau_grid: &[Order]) -> ProfileReport {
    let mut grid = tau_grid.to_vec();
    grid.sort();
    grid.dedup();
    let values: Vec<(Order, f64)> = grid
        .iter()
        .map(|&t| (t, profile.rho_unchecked(t)))
        .collect();

    let nonnegative = values.iter().all(|&(_, r)| r >= 0.0);
    let finite: Vec<(Order, f64)> = values
        .iter()
        .copied()
        .filter(|(_, r)| r.is_finite())
        .collect();
    let monotonicity_warnings = finite
        .windows(2)
        .filter(|w| w[1].1 < w[0].1)
        .map(|w| MonotonicityWarning {
            tau_lo: w[0].0,
            tau_hi: w[1].0,
            rho_lo: w[0].1,
            rho_hi: w[1].1,
        })
        .collect();
    ProfileReport {
        nonnegative,
        monotonicity_warnings,
        finiteness: values.iter().map(|&(t, r)| (t, r.is_finite())).collect(),
        max_finite_rho: finite.iter().map(|&(_, r)| r).reduce(f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::kl_divergence;

    fn ord(t: f64) -> Order {
        Order::new(t).unwrap()
    }

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<Order> {
        (0..n)
            .map(|i| ord(lo * (hi / lo).powf(i as f64 / (n - 1) as f64)))
            .collect()
    }

    #[test]
    fn gaussian_values() {
        let g = RdpProfile::gaussian(1.0).unwrap();
        assert_eq!(g.rho_at(ord(2.0)).unwrap(), 1.0);
        assert_eq!(g.rho_at(Order::Kl).unwrap(), 0.5);
        assert_eq!(g.rho_at(Order::Infinity).unwrap(), f64::INFINITY);
        assert!(RdpProfile::gaussian(0.0).is_err());
    }

    #[test]
    fn rr_values_and_limits() {
        let rr = RdpProfile::randomized_response(0.75).unwrap();
        assert!((rr.rho_at(ord(2.0)).unwrap() - (7.0f64 / 3.0).ln()).abs() < 1e-14);
        assert!((rr.rho_at(Order::Infinity).unwrap() - 3.0f64.ln()).abs() < 1e-15);
        for &p in &[0.6, 0.75, 0.9] {
            let rr = RdpProfile::randomized_response(p).unwrap();
            let eps = (p / (1.0 - p)).ln();
            assert!((rr.rho_at(ord(1e4)).unwrap() - eps).abs() < 1e-3);
            let kl = kl_divergence(p, 1.0 - p).unwrap();
            assert!((rr.rho_at(Order::Kl).unwrap() - kl).abs() < 1e-9);
            let near = rr.rho_at(ord(1.0 + 1e-6)).unwrap();
            assert!((near - kl).abs() < 1e-6);
        }
        assert!(RdpProfile::randomized_response(0.5).is_err());
        assert!(RdpProfile::randomized_response(1.0).is_err());
    }

    #[test]
    fn point_guarantee() {
        let pg = RdpProfile::point(ord(1.5), 0.75).unwrap();
        assert_eq!(pg.rho_at(ord(2.0)).unwrap(), f64::INFINITY);
        assert_eq!(pg.rho_at(ord(1.5)).unwrap(), 0.75);
        assert_eq!(pg.anchor_orders(), vec![ord(1.5)]);
    }

    #[test]
    fn rho_at_rejects_low_orders() {
        let g = RdpProfile::gaussian(1.0).unwrap();
        assert!(g.rho_at(Order::Finite(0.3)).is_err());
    }

    #[test]
    fn table_interpolates_in_h_and_is_infinite_outside() {
        let t = RdpProfile::tabulated(vec![(2.0, 1.0), (4.0, 2.0)]).unwrap();
        assert_eq!(t.rho_at(ord(1.5)).unwrap(), f64::INFINITY);
        assert_eq!(t.rho_at(ord(5.0)).unwrap(), f64::INFINITY);
        assert_eq!(t.rho_at(ord(4.0)).unwrap(), 2.0);
        // h(2) = 1, h(4) = 6, h(3) = 3.5, rho(3) = 1.75
        assert!((t.rho_at(ord(3.0)).unwrap() - 1.75).abs() < 1e-15);
    }

    #[test]
    fn table_below_order_one_uses_right_endpoint() {
        let t = RdpProfile::tabulated(vec![(0.5, 0.1), (0.9, 0.3), (2.0, 1.0)]).unwrap();
        assert_eq!(t.rho_at(ord(0.7)).unwrap(), 0.3);
        assert_eq!(t.rho_at(Order::Kl).unwrap(), 1.0);
        assert_eq!(t.rho_at(ord(1.5)).unwrap(), 1.0);
    }

    #[test]
    fn table_chord_never_undercuts_gaussian() {
        let sigma = 1.3;
        let knots: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let t = 1.0 + 0.7 * i as f64;
                (t, t / (2.0 * sigma * sigma))
            })
            .collect();
        let table = RdpProfile::tabulated(knots).unwrap();
        let gauss = RdpProfile::gaussian(sigma).unwrap();
        for i in 1..700 {
            let t = 1.0 + 7.7 * i as f64 / 700.0;
            let interp = table.rho_at(ord(t)).unwrap();
            let truth = gauss.rho_at(ord(t)).unwrap();
            assert!((t - 1.0) * interp >= (t - 1.0) * truth - 1e-12, "tau {t}");
        }
    }

    #[test]
    fn table_validation() {
        assert!(RdpProfile::tabulated(vec![]).is_err());
        assert!(RdpProfile::tabulated(vec![(2.0, 1.0), (2.0, 1.5)]).is_err());
        assert!(RdpProfile::tabulated(vec![(0.4, 1.0)]).is_err());
        assert!(RdpProfile::tabulated(vec![(2.0, -1.0)]).is_err());
    }

    #[test]
    fn json_schema() {
        let g: RdpProfile = r#"{"type":"gaussian","sigma":1.0}"#.parse().unwrap();
        assert_eq!(g, RdpProfile::gaussian(1.0).unwrap());
        let rr: RdpProfile = r#"{"type":"rr","p":0.75}"#.parse().unwrap();
        assert_eq!(rr, RdpProfile::randomized_response(0.75).unwrap());
        let pt: RdpProfile = r#"{"type":"point","tau":"inf","rho":1.0}"#.parse().unwrap();
        assert_eq!(pt.rho_at(Order::Infinity).unwrap(), 1.0);
        let tb: RdpProfile = r#"{"type":"table","points":[[2,1.0],[4,2.0]]}"#.parse().unwrap();
        assert_eq!(tb.anchor_orders(), vec![ord(2.0), ord(4.0)]);
        assert_eq!(RdpProfile::from_json(&tb.to_json()).unwrap(), tb);

        let err = RdpProfile::from_json(r#"{"type":"gaussian","sigma":1.0,"mu":0}"#).unwrap_err();
        assert!(err.to_string().contains("mu"), "{err}");
        let err = RdpProfile::from_json(r#"{"type":"laplace","b":1.0}"#).unwrap_err();
        assert!(err.to_string().contains("laplace"), "{err}");
        assert!(RdpProfile::from_json(r#"{"type":"rr","p":0.3}"#).is_err());
    }

    #[test]
    fn validation_reports() {
        let grid = log_grid(0.5, 64.0, 40);
        let g = RdpProfile::gaussian(1.0).unwrap().validate(&grid);
        assert!(g.passes());
        assert!(g.finiteness.iter().all(|&(_, f)| f));

        let rr = RdpProfile::randomized_response(0.75)
            .unwrap()
            .validate(&grid);
        assert!(rr.passes());
        assert!(rr.max_finite_rho.unwrap() <= 3.0f64.ln());

        let t = RdpProfile::tabulated(vec![(2.0, 1.0), (4.0, 0.1)]).unwrap();
        let rep = t.validate(&[ord(2.0), ord(3.0), ord(4.0), ord(8.0)]);
        assert!(!rep.monotonicity_warnings.is_empty());
        assert_eq!(rep.finiteness.last(), Some(&(ord(8.0), false)));
    }
}
