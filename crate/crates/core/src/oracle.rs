//! Brute-force references for the region boundary and the envelope.
//!
//! These scan a uniform β grid upward and share nothing with the bisection
//! and τ search beyond the membership predicate itself.

use crate::divergence::{ErrorPair, Order};
use crate::error::{check_probability, Error, Result};
use crate::profile::RdpProfile;
use crate::region::SingleOrderRegion;

pub const DEFAULT_GRID: usize = 4096;

/// Smallest `β ∈ {0, 1/n, …, 1}` with `(α, β)` in the region.
///
/// Falls back to `1 - α`, which is always feasible, when the grid skips the
/// whole feasible slice (only possible for `ρ = 0`).
pub fn grid_boundary_beta(region: &SingleOrderRegion, alpha: f64, n: usize) -> Result<f64> {
    check_probability("alpha", alpha)?;
    if n < 2 {
        return Err(Error::Domain(format!(
            "oracle grid size {n} must be at least 2"
        )));
    }
    for k in 0..=n {
        let beta = k as f64 / n as f64;
        if region.contains(ErrorPair::new(alpha, beta)?) {
            return Ok(beta);
        }
    }
    Ok(1.0 - alpha)
}

/// `max_τ grid_boundary_beta` over an explicit list of orders.
pub fn grid_envelope_beta(
    profile: &RdpProfile,
    alpha: f64,
    tau_grid: &[Order],
    n: usize,
) -> Result<f64> {
    let mut best = 0.0f64;
    for &tau in tau_grid {
        let region = SingleOrderRegion::new(tau, profile.rho_at(tau)?)?;
        best = best.max(grid_boundary_beta(&region, alpha, n)?);
    }
    Ok(best)
}

/// Membership for a raw order `τ ∈ (0, 1)` using the explicit power sums
///
/// ```text
/// α^τ (1-β)^(1-τ) + (1-α)^τ β^(1-τ) >= e^((τ-1)ρ)
/// (1-β)^τ α^(1-τ) + β^τ (1-α)^(1-τ) >= e^((τ-1)ρ)
/// ```
///
/// Orders below 0.5 are not part of the public region type; this exists to
/// check that such orders never add a constraint.
pub fn raw_order_contains(tau: f64, rho: f64, pair: ErrorPair) -> Result<bool> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Domain(format!("raw order {tau} must lie in (0, 1)")));
    }
    let (a, b) = (pair.alpha(), pair.beta());
    let bound = ((tau - 1.0) * rho).exp();
    let forward = a.powf(tau) * (1.0 - b).powf(1.0 - tau) + (1.0 - a).powf(tau) * b.powf(1.0 - tau);
    let reverse = (1.0 - b).powf(tau) * a.powf(1.0 - tau) + b.powf(tau) * (1.0 - a).powf(1.0 - tau);
    Ok(forward >= bound && reverse >= bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(tau: f64, rho: f64) -> SingleOrderRegion {
        SingleOrderRegion::new(Order::new(tau).unwrap(), rho).unwrap()
    }

    #[test]
    fn trivial_and_derived_values() {
        assert_eq!(
            grid_boundary_beta(&region(3.0, 0.0), 0.5, 1000).unwrap(),
            0.5
        );
        let b = grid_boundary_beta(&region(2.0, (7.0f64 / 3.0).ln()), 0.25, 4096).unwrap();
        assert!((b - 0.25).abs() <= 1.0 / 4096.0);
        assert_eq!(
            grid_boundary_beta(&region(2.0, 1.0), 0.0, 4096).unwrap(),
            1.0
        );
        assert!(grid_boundary_beta(&region(2.0, 1.0), 0.3, 1).is_err());
    }

    #[test]
    fn zero_budget_off_grid_falls_back_to_diagonal() {
        let b = grid_boundary_beta(&region(2.0, 0.0), 0.3, 7).unwrap();
        assert_eq!(b, 1.0 - 0.3);
    }

    #[test]
    fn envelope_of_point_guarantee() {
        let tau = Order::new(1.5).unwrap();
        let pg = RdpProfile::point(tau, 0.75).unwrap();
        let grid = [Order::new(0.7).unwrap(), tau, Order::new(9.0).unwrap()];
        let direct = grid_boundary_beta(&region(1.5, 0.75), 0.3, 2048).unwrap();
        assert_eq!(grid_envelope_beta(&pg, 0.3, &grid, 2048).unwrap(), direct);
    }

    #[test]
    fn raw_order_agrees_with_region_below_one() {
        let r = region(0.7, 0.6);
        for i in 0..=20 {
            for j in 0..=20 {
                let p = ErrorPair::new(i as f64 / 20.0, j as f64 / 20.0).unwrap();
                let near_boundary = (r.forward_divergence(p) - 0.6).abs() < 1e-9
                    || (r.reverse_divergence(p) - 0.6).abs() < 1e-9;
                if !near_boundary {
                    assert_eq!(
                        raw_order_contains(0.7, 0.6, p).unwrap(),
                        r.contains(p),
                        "{p:?}"
                    );
                }
            }
        }
        assert!(raw_order_contains(1.2, 0.6, ErrorPair::new(0.5, 0.5).unwrap()).is_err());
    }
}
