//! Numerical Hardy–Sobolev machinery on Cartesian grids.
//!
//! The crate computes, for a weight `g` on a grid-discretized domain Ω and an
//! exponent `p ∈ (1, N)`:
//!
//! * decreasing rearrangements, maximal functions and Schwarz symmetrization
//!   ([`rearrange`]),
//! * Lorentz quasi-norms/norms and the radial weighted `L¹` norm ([`lorentz`]),
//! * variational p-capacity of compact cell sets by projected gradient descent
//!   ([`capacity`]),
//! * capacitary lower bounds for the Maz'ya norm of `g`, concentration
//!   ladders, singular sets and compactness/attainment verdicts ([`mazya`]),
//! * best-constant estimates for the inequality `∫ g|u|^p ≤ C ∫ |∇u|^p` by
//!   Rayleigh quotient minimization ([`rayleigh`]),
//! * a potential gallery and an end-to-end pipeline emitting JSON/CSV reports
//!   ([`potential`], [`pipeline`]).
//!
//! Cell reductions run data-parallel under the default `parallel` feature and
//! produce bit-identical results with the sequential fallback: both sum fixed
//! 4096-cell chunk partials in chunk order.

pub mod capacity;
pub mod error;
pub mod grid;
pub mod lorentz;
pub mod par;
pub mod potential;
pub mod rearrange;

pub use error::CoreError;

/// Volume of the unit ball in `R^N`, by the recurrence ω_N = 2π ω_{N-2} / N.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0,
        n => 2.0 * std::f64::consts::PI * unit_ball_volume(n - 2) / n as f64,
    }
}

/// Capacity of the unit ball in `R^N`: `N ω_N ((N-p)/(p-1))^{p-1}`.
pub fn unit_ball_capacity(dim: usize, p: f64) -> f64 {
    let n = dim as f64;
    n * unit_ball_volume(dim) * ((n - p) / (p - 1.0)).powf(p - 1.0)
}

/// The constant `C_H = p^p (p-1)^{1-p}` from Maz'ya's sufficiency theorem.
pub fn hardy_constant(p: f64) -> f64 {
    p.powf(p) * (p - 1.0).powf(1.0 - p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes_match_closed_forms() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn ball_capacity_n3_p2_is_4pi() {
        let cap = unit_ball_capacity(3, 2.0);
        assert!((cap - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn hardy_constant_p2_is_4() {
        assert_eq!(hardy_constant(2.0), 4.0);
    }
}
