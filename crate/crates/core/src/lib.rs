//! Optimal conversion of Rényi-DP profiles into f-DP trade-off curves.
//!
//! A profile `τ ↦ ρ(τ)` constrains every binary test of a mechanism to the
//! intersection of the single-order privacy regions `R_{D_τ}(ρ(τ))`. The
//! lower boundary of that intersection, `sup_τ f_{τ,ρ(τ)}(α)`, is the tightest
//! trade-off curve implied by the profile alone, and Bernoulli witnesses
//! attain it at every α.
//!
//! ```
//! use rdpconv::{envelope_beta, OrderSearchConfig, RdpProfile};
//!
//! let profile = RdpProfile::gaussian(1.0).unwrap();
//! let point = envelope_beta(&profile, 0.1, &OrderSearchConfig::default()).unwrap();
//! assert!(point.beta > 0.0 && point.beta < 0.9);
//! ```

// `!(x >= 0.0)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod divergence;
pub mod envelope;
pub mod error;
pub mod mechanisms;
mod normal;
pub mod oracle;
pub mod profile;
pub mod region;

pub use curve::{uniform_alphas, TradeoffCurve, TradeoffSample};
pub use divergence::{
    kl_divergence, log_generator, max_divergence, renyi_divergence, ErrorPair, Order,
};
pub use envelope::{
    delta_at, delta_table, envelope_beta, envelope_curve, envelope_search, joint_contains,
    ApproxDpPoint, EnvelopePoint, OrderSearchConfig,
};
pub use error::{Error, Result};
pub use mechanisms::{
    asymmetric_rr_errors, gaussian_tradeoff, pure_dp_tradeoff, rr_epsilon, verify_witness,
    witness_at, witness_tradeoff, AsymmetricRR, BernoulliWitness, GaussianMechanismRef,
    SymmetricRR, WitnessReport,
};
pub use profile::{validate_profile, ProfileReport, RdpProfile};
pub use region::{BindingDirection, RegionBoundaryPoint, SingleOrderRegion};
