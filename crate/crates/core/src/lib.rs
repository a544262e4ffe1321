//! Zero-stability and consistency analysis for explicit multistep schemes
//!
//! A scheme of order `d` advances a sequence by
//!
//! ```text
//! y[n+1] = alpha[0] * y[n] + alpha[1] * y[n-1] + ... + alpha[d-1] * y[n-d+1] + h * beta * f(t[n], y[n])
//! ```
//!
//! The crate provides the characteristic-polynomial root condition, the
//! consistency conditions, the one-parameter third-order family and its
//! optimal member, a fixed-step integrator for initial-value problems, and a
//! depth-wise feature propagation simulator that measures how input noise is
//! amplified by stable and unstable recurrences.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
pub mod fit;
pub mod ivp;
pub mod poly;
pub mod propagation;
pub mod reference;
pub mod scheme;
mod seed;
pub mod zeros;

pub use error::{Error, Result};
pub use ivp::{
    convergence_order, integrate, integrate_from, startup_states, zero_stability_probe,
    ConvergenceEstimate, DivergenceSeries, IvpProblem, Trajectory,
};
pub use poly::{cluster_multiplicities, find_roots, find_roots_with, Polynomial, Root, RootFinderConfig, RootSet};
pub use propagation::{
    growth_rate, inject_noise, make_block, propagate, robustness_sweep, Block, BlockMap, NoiseKind,
    NoiseSpec, PropagationReport, SweepCell, SweepConfig, SweepPlan, SweepReport, ZeroBlock,
};
pub use scheme::{
    first_order, lm_second_order, make_scheme, ConsistencyReport, Scheme, SpectralEstimate,
    StabilityReport, Violation,
};
pub use seed::mix_seed;
pub use zeros::{
    closed_form_roots, derive_from_pair, in_stability_region, max_nonprincipal_modulus, scan_region, scan_region_with,
    zerosnet_coeffs, RegionPoint, RegionScan, ZeroSLambda,
};

/// Default modulus tolerance used by the root condition.
pub const DEFAULT_STABILITY_TOL: f64 = 1e-8;

/// Default tolerance for the two consistency conditions.
pub const DEFAULT_CONSISTENCY_TOL: f64 = 1e-10;
