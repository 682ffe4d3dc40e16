//! Rényi, KL and max divergences between Bernoulli distributions.
//!
//! Every finite-order evaluation runs in the log domain. For `Bern(a)` and
//! `Bern(b)` the *log generator*
//!
//! ```text
//! G_τ(a, b) = ln( a^τ b^(1-τ) + (1-a)^τ (1-b)^(1-τ) )
//! ```
//!
//! is a two-term log-sum-exp, and `D_τ = G_τ / (τ - 1)`. Budget checks compare
//! `G_τ` against `(τ - 1) ρ` directly, so nothing is ever exponentiated.
//!
//! Conventions: `0 · ln 0 = 0`, `0^x = 0` for `x > 0`, and divergences that
//! violate the support condition are `+∞` rather than errors.

use std::cmp::Ordering;
const INFINITY: f64 = f64::INFINITY;
const NEG_INFINITY: f64 = f64::NEG_INFINITY;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_probability, Error, Result};

/// Finite orders closer than this to 1 are evaluated with the KL formula.
pub const KL_BAND: f64 = 1e-9;

/// Smallest order exposed by the library.
pub const MIN_ORDER: f64 = 0.5;

/// A Rényi order `τ ∈ [0.5, ∞]`.
///
/// `Order::new` normalizes `1.0` to [`Order::Kl`] and `+∞` to
/// [`Order::Infinity`], so each order has exactly one representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Finite(f64),
    Kl,
    Infinity,
}

impl Order {
    pub fn new(tau: f64) -> Result<Self> {
        if tau.is_nan() {
            return Err(Error::Domain("order is NaN".into()));
        }
        if tau == INFINITY {
            Ok(Order::Infinity)
        } else if tau == 1.0 {
            Ok(Order::Kl)
        } else if tau >= MIN_ORDER {
            Ok(Order::Finite(tau))
        } else {
            Err(Error::Domain(format!("order {tau} is below {MIN_ORDER}")))
        }
    }

    /// Numeric value of the order (`1` for KL, `+∞` for the max-divergence).
    pub fn value(self) -> f64 {
        match self {
            Order::Finite(t) => t,
            Order::Kl => 1.0,
            Order::Infinity => INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        !matches!(self, Order::Infinity)
    }

    /// Re-checks the invariants of a value built through the public variants.
    pub fn validate(self) -> Result<Self> {
        match self {
            Order::Finite(t) if t.is_finite() && t >= MIN_ORDER && t != 1.0 => Ok(self),
            Order::Finite(t) => Err(Error::Domain(format!(
                "Order::Finite({t}) must be a finite value >= {MIN_ORDER} other than 1"
            ))),
            _ => Ok(self),
        }
    }

    fn evaluates_as_kl(self) -> bool {
        match self {
            Order::Kl => true,
            Order::Finite(t) => (t - 1.0).abs() < KL_BAND,
            Order::Infinity => false,
        }
    }
}

impl Eq for Order {}

impl PartialOrd for Order {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Order {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value().total_cmp(&other.value())
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(t) => write!(f, "{t}"),
            Order::Kl => write!(f, "1"),
            Order::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::Infinity => s.serialize_str("inf"),
            other => s.serialize_f64(other.value()),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let tau = match Raw::deserialize(d)? {
            Raw::Num(x) => x,
            Raw::Text(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "+inf" | "∞" => INFINITY,
                other => {
                    return Err(serde::de::Error::custom(format!(
                        "order must be a number or \"inf\", got {other:?}"
                    )))
                }
            },
        };
        Order::new(tau).map_err(serde::de::Error::custom)
    }
}

/// Type I / Type II error rates `(α, β)` of a binary test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorPair {
    alpha: f64,
    beta: f64,
}

impl ErrorPair {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            alpha: check_probability("alpha", alpha)?,
            beta: check_probability("beta", beta)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The pair reflected about the line `α = β`.
    pub fn swapped(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
        }
    }
}

/// `D_τ(Bern(a) ‖ Bern(b))` for `τ ∈ [0.5, ∞]`.
pub fn renyi_divergence(a: f64, b: f64, tau: Order) -> Result<f64> {
    check_probability("a", a)?;
    check_probability("b", b)?;
    let tau = tau.validate()?;
    Ok(divergence(a, b, tau))
}

/// `KL(Bern(a) ‖ Bern(b))`.
pub fn kl_divergence(a: f64, b: f64) -> Result<f64> {
    check_probability("a", a)?;
    check_probability("b", b)?;
    Ok(kl(a, b))
}

/// `ln max(a/b, (1-a)/(1-b))`, the order-∞ divergence.
pub fn max_divergence(a: f64, b: f64) -> Result<f64> {
    check_probability("a", a)?;
    check_probability("b", b)?;
    Ok(max_div(a, b))
}

/// Log generator `G_τ(a, b)` for any finite `τ > 0`.
///
/// This is the raw two-term log-sum-exp behind every finite-order divergence.
/// Orders below `0.5` are accepted here only so the `τ ↔ 1-τ` identities can
/// be checked; the divergence API never exposes them.
pub fn log_generator(a: f64, b: f64, tau: f64) -> Result<f64> {
    check_probability("a", a)?;
    check_probability("b", b)?;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::Domain(format!(
            "log generator needs a finite order > 0, got {tau}"
        )));
    }
    Ok(log_gen(a, b, tau))
}

pub(crate) fn divergence(a: f64, b: f64, tau: Order) -> f64 {
    if a == b {
        return 0.0;
    }
    if tau.evaluates_as_kl() {
        return kl(a, b);
    }
    match tau {
        Order::Infinity => max_div(a, b),
        Order::Finite(t) => {
            // lg = -inf for t < 1 (disjoint supports) divides to +inf.
            let d = log_gen(a, b, t) / (t - 1.0);
            d.max(0.0)
        }
        Order::Kl => unreachable!(),
    }
}

/// `D_τ(Bern(a) ‖ Bern(b)) <= rho`, decided without leaving the log domain.
/// Relative slack on the budget so points computed in closed form exactly on
/// a boundary are not rejected over a rounding difference.
const MEMBERSHIP_SLACK: f64 = 1e-12;

pub(crate) fn within_budget(a: f64, b: f64, tau: Order, rho: f64) -> bool {
    if rho == INFINITY || a == b {
        return true;
    }
    if tau.evaluates_as_kl() {
        return kl(a, b) <= rho * (1.0 + MEMBERSHIP_SLACK);
    }
    match tau {
        Order::Infinity => max_div(a, b) <= rho * (1.0 + MEMBERSHIP_SLACK),
        Order::Finite(t) => {
            let lg = log_gen(a, b, t);
            let bound = (t - 1.0) * rho;
            let slack = MEMBERSHIP_SLACK * bound.abs();
            if t > 1.0 {
                lg <= bound + slack
            } else {
                lg >= bound - slack
            }
        }
        Order::Kl => unreachable!(),
    }
}

pub(crate) fn log_gen(a: f64, b: f64, tau: f64) -> f64 {
    log_sum_exp2(log_term(a, b, tau), log_term(1.0 - a, 1.0 - b, tau))
}

/// `ln(p^τ q^(1-τ))` with the measure-theoretic conventions at zero mass.
fn log_term(p: f64, q: f64, tau: f64) -> f64 {
    if p == 0.0 {
        return NEG_INFINITY;
    }
    if q == 0.0 {
        return match tau.partial_cmp(&1.0) {
            Some(Ordering::Greater) => INFINITY,
            Some(Ordering::Less) => NEG_INFINITY,
            _ => p.ln(),
        };
    }
    tau * p.ln() + (1.0 - tau) * q.ln()
}

pub(crate) fn log_sum_exp2(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == NEG_INFINITY || hi == INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

fn kl(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let term = |p: f64, q: f64| {
        if p == 0.0 {
            0.0
        } else if q == 0.0 {
            INFINITY
        } else {
            p * (p.ln() - q.ln())
        }
    };
    (term(a, b) + term(1.0 - a, 1.0 - b)).max(0.0)
}

fn max_div(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let ratio = |p: f64, q: f64| match (p == 0.0, q == 0.0) {
        (true, true) => 1.0,
        (false, true) => INFINITY,
        _ => p / q,
    };
    ratio(a, b).max(ratio(1.0 - a, 1.0 - b)).ln().max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(t: f64) -> Order {
        Order::new(t).unwrap()
    }

    #[test]
    fn order_normalizes_special_values() {
        assert_eq!(ord(1.0), Order::Kl);
        assert_eq!(ord(f64::INFINITY), Order::Infinity);
        assert_eq!(ord(2.5), Order::Finite(2.5));
        assert!(Order::new(0.49).is_err());
        assert!(Order::new(f64::NAN).is_err());
        assert!(Order::Finite(0.2).validate().is_err());
        assert!(Order::Finite(1.0).validate().is_err());
        assert!(ord(0.5) < Order::Kl && Order::Kl < ord(1.5) && ord(1e6) < Order::Infinity);
    }

    #[test]
    fn order_serde_accepts_inf_string() {
        let o: Order = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(o, Order::Infinity);
        let o: Order = serde_json::from_str("1.0").unwrap();
        assert_eq!(o, Order::Kl);
        assert!(serde_json::from_str::<Order>("0.1").is_err());
        assert_eq!(serde_json::to_string(&Order::Infinity).unwrap(), "\"inf\"");
    }

    #[test]
    fn identical_distributions_have_zero_divergence() {
        for &x in &[0.0, 0.1, 0.5, 0.9, 1.0] {
            for tau in [
                ord(0.5),
                ord(0.7),
                Order::Kl,
                ord(2.0),
                ord(40.0),
                Order::Infinity,
            ] {
                assert_eq!(renyi_divergence(x, x, tau).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn closed_form_values() {
        let d2 = renyi_divergence(0.75, 0.25, ord(2.0)).unwrap();
        assert!((d2 - (7.0f64 / 3.0).ln()).abs() < 1e-14);
        let dinf = renyi_divergence(0.75, 0.25, Order::Infinity).unwrap();
        assert!((dinf - 3.0f64.ln()).abs() < 1e-15);
        let dkl = renyi_divergence(0.5, 0.25, Order::Kl).unwrap();
        assert!((dkl - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn support_violations_are_infinite() {
        assert_eq!(renyi_divergence(0.3, 0.0, ord(2.0)).unwrap(), INFINITY);
        assert_eq!(renyi_divergence(0.3, 1.0, ord(2.0)).unwrap(), INFINITY);
        assert_eq!(renyi_divergence(0.3, 0.0, Order::Kl).unwrap(), INFINITY);
        assert_eq!(
            renyi_divergence(0.3, 0.0, Order::Infinity).unwrap(),
            INFINITY
        );
        // Below order 1 only disjoint supports are infinite.
        assert!(renyi_divergence(0.3, 0.0, ord(0.5)).unwrap().is_finite());
        assert_eq!(renyi_divergence(0.0, 1.0, ord(0.5)).unwrap(), INFINITY);
    }

    #[test]
    fn domain_errors() {
        assert!(renyi_divergence(-0.1, 0.5, ord(2.0)).is_err());
        assert!(renyi_divergence(0.5, 1.1, ord(2.0)).is_err());
        assert!(renyi_divergence(0.5, 0.2, Order::Finite(0.3)).is_err());
        assert!(log_generator(0.5, 0.2, 0.0).is_err());
    }

    #[test]
    fn near_kl_band_uses_kl() {
        let kl = renyi_divergence(0.3, 0.6, Order::Kl).unwrap();
        let near = renyi_divergence(0.3, 0.6, Order::Finite(1.0 + 1e-12)).unwrap();
        assert_eq!(kl, near);
    }

    #[test]
    fn budget_check_matches_divergence() {
        for &(a, b) in &[(0.2, 0.7), (0.9, 0.05), (0.01, 0.5)] {
            for tau in [ord(0.5), ord(0.8), Order::Kl, ord(3.0), Order::Infinity] {
                let d = divergence(a, b, tau);
                assert!(within_budget(a, b, tau, d * (1.0 + 1e-9) + 1e-15));
                assert!(!within_budget(a, b, tau, d * (1.0 - 1e-6)));
            }
        }
    }
}
