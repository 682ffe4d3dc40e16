//! Witness mechanisms and reference trade-off curves.
//!
//! A Bernoulli pair `P = Bern(a)`, `Q = Bern(b)` with `b >= a` is tested by
//! the identity rule (reject `H0` on output 1), giving the error pair
//! `(a, 1-b)`. Randomizing between that test and the trivial ones traces the
//! two segments `(0,1) → (a, 1-b) → (1,0)`, which is the pair's whole
//! trade-off curve. Placing `(a, 1-b)` on the envelope yields a mechanism
//! that satisfies the profile and attains the envelope at that α.

use serde::Serialize;

use crate::divergence::{divergence, ErrorPair, Order};
use crate::envelope::{envelope_beta, OrderSearchConfig};
use crate::error::{check_probability, Error, Result};
pub use crate::normal::{normal_cdf, normal_quantile};
use crate::profile::RdpProfile;

/// Divergences may exceed the profile by at most this much in verification.
pub const VIOLATION_TOL: f64 = 1e-9;

/// `ε = ln(p / (1-p))` of symmetric randomized response.
pub fn rr_epsilon(p: f64) -> Result<f64> {
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::Domain(format!(
            "retention p = {p} must lie in (0.5, 1)"
        )));
    }
    Ok(p.ln() - (1.0 - p).ln())
}

/// `f_{ε,δ}(α) = max{0, 1 - δ - e^ε α, e^{-ε}(1 - δ - α)}`.
pub fn pure_dp_tradeoff(epsilon: f64, delta: f64, alpha: f64) -> f64 {
    if epsilon == f64::INFINITY {
        return if alpha == 0.0 {
            (1.0 - delta).max(0.0)
        } else {
            0.0
        };
    }
    let first = 1.0 - delta - epsilon.exp() * alpha;
    let second = (-epsilon).exp() * (1.0 - delta - alpha);
    first.max(second).max(0.0)
}

/// Gaussian mechanism with unit sensitivity and noise scale σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianMechanismRef {
    sigma: f64,
}

impl GaussianMechanismRef {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Domain(format!("sigma = {sigma} must be positive")));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn profile(&self) -> RdpProfile {
        RdpProfile::gaussian(self.sigma).expect("sigma validated")
    }

    pub fn tradeoff(&self, alpha: f64) -> f64 {
        gaussian_tradeoff(self, alpha)
    }
}

/// `Φ(Φ⁻¹(1-α) - 1/σ)`, the exact trade-off of the Gaussian mechanism.
pub fn gaussian_tradeoff(mech: &GaussianMechanismRef, alpha: f64) -> f64 {
    if alpha <= 0.0 {
        return 1.0;
    }
    if alpha >= 1.0 {
        return 0.0;
    }
    // Φ⁻¹(1-α) = -Φ⁻¹(α) keeps precision for small α.
    normal_cdf(-normal_quantile(alpha) - 1.0 / mech.sigma)
}

/// Symmetric randomized response with retention probability p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricRR {
    p: f64,
}

impl SymmetricRR {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&p) {
            return Err(Error::Domain(format!(
                "retention p = {p} must lie in [0.5, 1]"
            )));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn epsilon(&self) -> f64 {
        self.p.ln() - (1.0 - self.p).ln()
    }

    /// Errors of the optimal test, `(1-p, 1-p)`.
    pub fn errors(&self) -> ErrorPair {
        ErrorPair::new(1.0 - self.p, 1.0 - self.p).expect("p in [0.5, 1]")
    }

    /// Exact RDP profile; only defined for `p ∈ (0.5, 1)`.
    pub fn profile(&self) -> Result<RdpProfile> {
        RdpProfile::randomized_response(self.p)
    }

    pub fn tradeoff(&self, alpha: f64) -> f64 {
        pure_dp_tradeoff(self.epsilon(), 0.0, alpha)
    }
}

/// Randomized response given by a mixing parameter `p` and noise parameter `q`.
///
/// With probability `p` the input bit is flipped; otherwise a fresh bit is
/// reported, 0 with probability `q`. Hence
/// `p̂ = P(y=1 | x=1) = (1-p)(1-q)` and `q̂ = P(y=1 | x=0) = p + (1-p)(1-q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymmetricRR {
    p: f64,
    q: f64,
}

impl AsymmetricRR {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        check_probability("p", p)?;
        check_probability("q", q)?;
        Ok(Self { p, q })
    }

    pub fn p_hat(&self) -> f64 {
        (1.0 - self.p) * (1.0 - self.q)
    }

    pub fn q_hat(&self) -> f64 {
        self.p + (1.0 - self.p) * (1.0 - self.q)
    }

    /// `ln max(q̂/p̂, (1-p̂)/(1-q̂))`.
    pub fn epsilon(&self) -> f64 {
        let ratio = |num: f64, den: f64| {
            if den == 0.0 {
                if num == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else {
                num / den
            }
        };
        ratio(self.q_hat(), self.p_hat())
            .max(ratio(1.0 - self.p_hat(), 1.0 - self.q_hat()))
            .ln()
    }

    pub fn errors(&self) -> Result<ErrorPair> {
        asymmetric_rr_errors(self.p, self.q)
    }
}

/// Errors `(1 - q̂, p̂)` of the optimal test against asymmetric RR.
pub fn asymmetric_rr_errors(p: f64, q: f64) -> Result<ErrorPair> {
    let rr = AsymmetricRR::new(p, q)?;
    let (p_hat, q_hat) = (rr.p_hat(), rr.q_hat());
    if q_hat < p_hat {
        return Err(Error::Orientation(format!(
            "q_hat = {q_hat} < p_hat = {p_hat}; the flip does not dominate"
        )));
    }
    ErrorPair::new((1.0 - q_hat).max(0.0), p_hat)
}

/// A binary mechanism with output laws `P = Bern(a)` and `Q = Bern(b)`.
///
/// Stored with `b >= a`, so the identity test attains the operating point
/// `(a, 1-b)`. The operating point is kept as given rather than recomputed
/// from `b`, so it round-trips exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernoulliWitness {
    a: f64,
    b: f64,
    operating_point: ErrorPair,
}

impl BernoulliWitness {
    /// Builds a witness, relabelling outputs if needed so that `b >= a`.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        check_probability("a", a)?;
        check_probability("b", b)?;
        let (a, b) = if b >= a { (a, b) } else { (1.0 - a, 1.0 - b) };
        Ok(Self {
            a,
            b,
            operating_point: ErrorPair::new(a, 1.0 - b)?,
        })
    }

    /// The witness whose identity test has errors `pair`.
    pub fn from_operating_point(pair: ErrorPair) -> Result<Self> {
        if pair.alpha() + pair.beta() > 1.0 {
            return Err(Error::Domain(format!(
                "operating point ({}, {}) is worse than random guessing",
                pair.alpha(),
                pair.beta()
            )));
        }
        Ok(Self {
            a: pair.alpha(),
            b: 1.0 - pair.beta(),
            operating_point: pair,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn operating_point(&self) -> ErrorPair {
        self.operating_point
    }

    /// `(Type I, Type II)` of rejecting `H0` exactly when the output is 1.
    pub fn identity_test_errors(&self) -> (f64, f64) {
        (self.operating_point.alpha(), self.operating_point.beta())
    }

    pub fn tradeoff(&self, alpha: f64) -> f64 {
        witness_tradeoff(self, alpha)
    }
}

/// Builds the witness at `alpha0` whose operating point sits on the envelope.
pub fn witness_at(
    profile: &RdpProfile,
    alpha0: f64,
    cfg: &OrderSearchConfig,
) -> Result<BernoulliWitness> {
    if !(alpha0 > 0.0 && alpha0 < 1.0) {
        return Err(Error::Domain(format!(
            "alpha0 = {alpha0} must lie in (0, 1)"
        )));
    }
    let beta = envelope_beta(profile, alpha0, cfg)?.beta;
    if beta == 0.0 || beta == 1.0 {
        return Err(Error::DegenerateWitness(format!(
            "envelope is {beta} at alpha0 = {alpha0}; Q = Bern({}) is a point mass",
            1.0 - beta
        )));
    }
    BernoulliWitness::from_operating_point(ErrorPair::new(alpha0, beta)?)
}

/// Two-segment curve `(0,1) → (α*, β*) → (1,0)`.
pub fn witness_tradeoff(witness: &BernoulliWitness, alpha: f64) -> f64 {
    let (a_star, b_star) = witness.identity_test_errors();
    if alpha <= 0.0 {
        1.0
    } else if alpha >= 1.0 {
        0.0
    } else if alpha == a_star {
        b_star
    } else if alpha < a_star {
        1.0 - (1.0 - b_star) * alpha / a_star
    } else {
        b_star * (1.0 - alpha) / (1.0 - a_star)
    }
}

/// Divergences of the witness against the profile at one order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessCheck {
    pub tau: Order,
    pub rho: f64,
    /// `D_τ(P ‖ Q)`.
    pub forward: f64,
    /// `D_τ(Q ‖ P)`.
    pub reverse: f64,
}

impl WitnessCheck {
    pub fn forward_margin(&self) -> f64 {
        margin(self.rho, self.forward)
    }

    pub fn reverse_margin(&self) -> f64 {
        margin(self.rho, self.reverse)
    }

    pub fn margin(&self) -> f64 {
        self.forward_margin().min(self.reverse_margin())
    }

    pub fn violated(&self) -> bool {
        self.forward > self.rho + VIOLATION_TOL || self.reverse > self.rho + VIOLATION_TOL
    }
}

fn margin(rho: f64, d: f64) -> f64 {
    if rho == f64::INFINITY {
        f64::INFINITY
    } else {
        rho - d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub checks: Vec<WitnessCheck>,
    pub violations: Vec<WitnessCheck>,
}

impl WitnessReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn min_forward_margin(&self) -> f64 {
        self.checks
            .iter()
            .map(WitnessCheck::forward_margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_reverse_margin(&self) -> f64 {
        self.checks
            .iter()
            .map(WitnessCheck::reverse_margin)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Checks `D_τ(P‖Q) <= ρ(τ)` and `D_τ(Q‖P) <= ρ(τ)` at every grid order.
pub fn verify_witness(
    witness: &BernoulliWitness,
    profile: &RdpProfile,
    tau_grid: &[Order],
) -> WitnessReport {
    let checks: Vec<WitnessCheck> = tau_grid
        .iter()
        .map(|&tau| WitnessCheck {
            tau,
            rho: profile.rho_unchecked(tau),
            forward: divergence(witness.a, witness.b, tau),
            reverse: divergence(witness.b, witness.a, tau),
        })
        .collect();
    let violations = checks
        .iter()
        .copied()
        .filter(WitnessCheck::violated)
        .collect();
    WitnessReport { checks, violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rr_epsilon_values() {
        assert!((rr_epsilon(0.75).unwrap() - 3.0f64.ln()).abs() < 1e-15);
        assert!((rr_epsilon(0.9).unwrap() - 9.0f64.ln()).abs() < 1e-14);
        let tiny = rr_epsilon(0.5 + 1e-12).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-11);
        assert!(rr_epsilon(0.5).is_err());
        assert!(rr_epsilon(1.0).is_err());
    }

    #[test]
    fn pure_dp_branches() {
        for &a in &[0.0, 0.3, 1.0] {
            assert_eq!(pure_dp_tradeoff(0.0, 0.0, a), 1.0 - a);
            assert_eq!(pure_dp_tradeoff(2.0, 1.0, a), 0.0);
        }
        assert!((pure_dp_tradeoff(3.0f64.ln(), 0.0, 0.25) - 0.25).abs() < 1e-15);
        assert_eq!(pure_dp_tradeoff(f64::INFINITY, 0.0, 0.1), 0.0);
    }

    #[test]
    fn gaussian_reference_curve() {
        let g = GaussianMechanismRef::new(1.0).unwrap();
        assert!((g.tradeoff(0.5) - normal_cdf(-1.0)).abs() < 1e-15);
        assert_eq!(g.tradeoff(0.0), 1.0);
        assert_eq!(g.tradeoff(1.0), 0.0);
        let wide = GaussianMechanismRef::new(1e4).unwrap();
        for &a in &[0.1, 0.5, 0.9] {
            assert!((wide.tradeoff(a) - (1.0 - a)).abs() < 1e-3);
        }
        assert!(GaussianMechanismRef::new(-1.0).is_err());
    }

    #[test]
    fn asymmetric_errors() {
        for &q in &[0.0, 0.3, 1.0] {
            let e = asymmetric_rr_errors(0.0, q).unwrap();
            assert!((e.alpha() - q).abs() < 1e-15 && (e.beta() - (1.0 - q)).abs() < 1e-15);
            assert_eq!(
                asymmetric_rr_errors(1.0, q).unwrap(),
                ErrorPair::new(0.0, 0.0).unwrap()
            );
        }
        assert_eq!(
            asymmetric_rr_errors(0.5, 0.5).unwrap(),
            ErrorPair::new(0.25, 0.25).unwrap()
        );
        assert!(asymmetric_rr_errors(1.5, 0.5).is_err());
        let rr = AsymmetricRR::new(0.5, 0.5).unwrap();
        assert!((rr.epsilon() - 3.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn symmetric_rr() {
        let rr = SymmetricRR::new(0.75).unwrap();
        assert_eq!(rr.errors(), ErrorPair::new(0.25, 0.25).unwrap());
        assert!((rr.tradeoff(0.25) - 0.25).abs() < 1e-15);
        assert!(SymmetricRR::new(1.0).unwrap().profile().is_err());
        assert!(SymmetricRR::new(0.4).is_err());
    }

    #[test]
    fn witness_normalization_and_tradeoff() {
        let w = BernoulliWitness::new(0.75, 0.25).unwrap();
        assert_eq!((w.a(), w.b()), (0.25, 0.75));
        assert_eq!(w.operating_point(), ErrorPair::new(0.25, 0.25).unwrap());
        assert_eq!(w.tradeoff(0.0), 1.0);
        assert_eq!(w.tradeoff(1.0), 0.0);
        assert_eq!(w.tradeoff(0.25), 0.25);
        assert_eq!(w.tradeoff(0.125), 0.625);
    }

    #[test]
    fn witness_errors() {
        let g = RdpProfile::gaussian(1.0).unwrap();
        let cfg = OrderSearchConfig::default();
        assert!(matches!(witness_at(&g, 0.0, &cfg), Err(Error::Domain(_))));
        assert!(matches!(witness_at(&g, 1.0, &cfg), Err(Error::Domain(_))));
        // Below order 1 the region reaches beta = 0 for alpha near 1.
        let low = RdpProfile::point(Order::new(0.5).unwrap(), 0.4).unwrap();
        assert!(matches!(
            witness_at(&low, 0.9, &cfg),
            Err(Error::DegenerateWitness(_))
        ));
    }

    #[test]
    fn verification() {
        let g = RdpProfile::gaussian(1.0).unwrap();
        let cfg = OrderSearchConfig::default();
        let grid = cfg.coarse_grid();
        let w = witness_at(&g, 0.3, &cfg).unwrap();
        assert!(verify_witness(&w, &g, &grid).is_valid());

        let loud = BernoulliWitness::new(0.1, 0.9).unwrap();
        let rep = verify_witness(&loud, &g, &grid);
        // D_τ(Bern(0.1) || Bern(0.9)) climbs to ln 9 while τ/2 is small, so
        // only the low orders are breached.
        assert!(!rep.is_valid());
        assert!(rep.violations.iter().all(|c| c.tau.value() < 5.0));

        let quiet = BernoulliWitness::new(0.4, 0.4).unwrap();
        assert!(verify_witness(&quiet, &g, &grid).is_valid());
    }
}
