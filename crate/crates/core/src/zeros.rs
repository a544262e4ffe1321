//! The one-parameter third-order family
//!
//! ```text
//! y[n+1] = 3(1+l)/(4l) y[n] - 1/l y[n-1] + (1+l)/(4l) y[n-2] + (3l-1)/(2l) h f(t[n], y[n])
//! ```
//!
//! Every member is consistent. Its characteristic polynomial always has the
//! root 1; the other two are `(3 - l +- sqrt((9 + 5l)(1 - 3l))) / (8l)`. The
//! member is zero-stable for `l < -1` or `l > 1/3`, and the largest
//! nonprincipal modulus is minimized (value 1/3) at `l = -9/5`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::scheme::{root_condition_with, Scheme};
use crate::poly::RootFinderConfig;
use crate::{Error, Result, DEFAULT_STABILITY_TOL};

/// Parameter value at which the nonprincipal roots coincide at `-1/3`.
pub const OPTIMAL_LAMBDA: f64 = -9.0 / 5.0;

/// Grid points closer than this to a singular or boundary value are excluded from scans.
pub const EXCLUSION_RADIUS: f64 = 1e-9;

/// Singular (0) and boundary (-1, 1/3) parameter values.
pub const SPECIAL_LAMBDAS: [f64; 3] = [0.0, -1.0, 1.0 / 3.0];

/// Nonzero, finite family parameter.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ZeroSLambda(f64);

impl ZeroSLambda {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Domain("lambda must be finite"));
        }
        if value == 0.0 {
            return Err(Error::Domain("lambda must be nonzero"));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn optimal() -> Self {
        Self(OPTIMAL_LAMBDA)
    }

    /// True for the open-interval endpoints -1 and 1/3 (within [`EXCLUSION_RADIUS`]).
    pub fn is_boundary(self) -> bool {
        SPECIAL_LAMBDAS[1..]
            .iter()
            .any(|b| libm::fabs(self.0 - b) <= EXCLUSION_RADIUS)
    }
}

impl TryFrom<f64> for ZeroSLambda {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

pub fn zerosnet_coeffs(lambda: ZeroSLambda) -> Scheme {
    let l = lambda.0;
    Scheme::new(
        vec![
            3.0 * (1.0 + l) / (4.0 * l),
            -1.0 / l,
            (1.0 + l) / (4.0 * l),
        ],
        (3.0 * l - 1.0) / (2.0 * l),
    )
    .expect("finite coefficients for finite nonzero lambda")
}

/// Scheme obtained from two second-derivative weights `(l1, l2)` before the
/// substitution `l2 = l * l1`. The result depends on the pair only through
/// `l2 / l1`, so this reduces the ratio and evaluates the family formula.
pub fn derive_from_pair(lambda1: f64, lambda2: f64) -> Result<Scheme> {
    if !lambda1.is_finite() || !lambda2.is_finite() {
        return Err(Error::Domain("lambda1 and lambda2 must be finite"));
    }
    if lambda1 == 0.0 {
        return Err(Error::Domain("lambda1 must be nonzero"));
    }
    if lambda2 == 0.0 {
        return Err(Error::Domain("lambda2 must be nonzero"));
    }
    if 3.0 * lambda2 == lambda1 {
        return Err(Error::Domain("3 * lambda2 must differ from lambda1"));
    }
    Ok(zerosnet_coeffs(ZeroSLambda::new(lambda2 / lambda1)?))
}

/// Coefficients written directly in the pair `(l1, l2)`, without reducing to
/// the ratio: `([3(l1+l2)/(4 l2), -l1/l2, (l1+l2)/(4 l2)], (3 l2 - l1)/(2 l2))`.
/// Agrees with [`derive_from_pair`] up to rounding.
pub fn pair_form_coeffs(lambda1: f64, lambda2: f64) -> Result<Scheme> {
    derive_from_pair(lambda1, lambda2)?;
    Scheme::new(
        vec![
            3.0 * (lambda1 + lambda2) / (4.0 * lambda2),
            -lambda1 / lambda2,
            (lambda1 + lambda2) / (4.0 * lambda2),
        ],
        (3.0 * lambda2 - lambda1) / (2.0 * lambda2),
    )
}

/// `(1, rho1, rho2)`. For a negative discriminant the pair is returned as
/// explicit conjugates with `rho1` in the upper half plane.
pub fn closed_form_roots(lambda: ZeroSLambda) -> [Complex64; 3] {
    let l = lambda.0;
    let disc = (9.0 + 5.0 * l) * (1.0 - 3.0 * l);
    let denom = 8.0 * l;
    let one = Complex64::new(1.0, 0.0);
    if disc >= 0.0 {
        let s = libm::sqrt(disc);
        [
            one,
            Complex64::new((3.0 - l + s) / denom, 0.0),
            Complex64::new((3.0 - l - s) / denom, 0.0),
        ]
    } else {
        let re = (3.0 - l) / denom;
        let im = libm::fabs(libm::sqrt(-disc) / denom);
        [one, Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

/// Open region `l < -1` or `l > 1/3`.
pub fn in_stability_region(lambda: ZeroSLambda) -> bool {
    let l = lambda.0;
    l < -1.0 || l > 1.0 / 3.0
}

pub fn max_nonprincipal_modulus(lambda: ZeroSLambda) -> f64 {
    let [_, r1, r2] = closed_form_roots(lambda);
    r1.norm().max(r2.norm())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RegionPoint {
    pub lambda: f64,
    pub scheme: Scheme,
    pub max_modulus: f64,
    /// Root-condition verdict computed from the numeric roots.
    pub zero_stable: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RegionScan {
    /// Sorted by lambda.
    pub grid: Vec<RegionPoint>,
    /// Index into `grid` of the zero-stable point with the smallest maximum
    /// nonprincipal modulus (smallest lambda on ties). `None` when no grid
    /// point is zero-stable.
    pub argmin: Option<usize>,
    /// Grid values skipped for lying within [`EXCLUSION_RADIUS`] of 0, -1 or 1/3.
    pub excluded: Vec<f64>,
}

impl RegionScan {
    pub fn argmin_point(&self) -> Option<&RegionPoint> {
        self.argmin.map(|i| &self.grid[i])
    }

    pub fn argmin_lambda(&self) -> Option<f64> {
        self.argmin_point().map(|p| p.lambda)
    }
}

/// Grid values `lambda_min + k * step` up to `lambda_max`. When `1 / step` is
/// an integer `N`, points are computed as `k / N` so that decimal grids hit
/// their literal values exactly.
pub fn scan_grid(lambda_min: f64, lambda_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(lambda_min.is_finite() && lambda_max.is_finite() && step.is_finite()) {
        return Err(Error::invalid("scan bounds and step must be finite"));
    }
    if !(lambda_min < lambda_max) || !(step > 0.0) {
        return Err(Error::invalid("scan needs lambda_min < lambda_max and step > 0"));
    }
    let count = libm::floor((lambda_max - lambda_min) / step + 1e-9);
    if count > 1e8 {
        return Err(Error::invalid("scan grid too large"));
    }
    let inv = libm::round(1.0 / step);
    let integral = (1.0..=1e9).contains(&inv) && libm::fabs(inv * step - 1.0) < 1e-12;
    let grid = if integral {
        let first = libm::ceil(lambda_min * inv - 1e-6);
        let last = libm::floor(lambda_max * inv + 1e-6);
        let n = (last - first) as i64;
        (0..=n).map(|k| (first + k as f64) / inv).collect()
    } else {
        (0..=count as usize)
            .map(|k| lambda_min + k as f64 * step)
            .collect()
    };
    Ok(grid)
}

pub fn scan_region(lambda_min: f64, lambda_max: f64, step: f64) -> Result<RegionScan> {
    scan_region_with(lambda_min, lambda_max, step, DEFAULT_STABILITY_TOL)
}

pub fn scan_region_with(lambda_min: f64, lambda_max: f64, step: f64, tol: f64) -> Result<RegionScan> {
    let mut grid = Vec::new();
    let mut excluded = Vec::new();
    let config = RootFinderConfig::default();
    for lambda in scan_grid(lambda_min, lambda_max, step)? {
        if SPECIAL_LAMBDAS
            .iter()
            .any(|s| libm::fabs(lambda - s) <= EXCLUSION_RADIUS)
        {
            excluded.push(lambda);
            continue;
        }
        grid.push(region_point(ZeroSLambda(lambda), tol, &config)?);
    }
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut argmin: Option<usize> = None;
    for (i, p) in grid.iter().enumerate() {
        if !p.zero_stable {
            continue;
        }
        match argmin {
            Some(j) if grid[j].max_modulus <= p.max_modulus => {}
            _ => argmin = Some(i),
        }
    }
    Ok(RegionScan {
        grid,
        argmin,
        excluded,
    })
}

fn region_point(lambda: ZeroSLambda, tol: f64, config: &RootFinderConfig) -> Result<RegionPoint> {
    let scheme = zerosnet_coeffs(lambda);
    let zero_stable = root_condition_with(&scheme, tol, config)?.zero_stable;
    Ok(RegionPoint {
        lambda: lambda.0,
        scheme,
        max_modulus: max_nonprincipal_modulus(lambda),
        zero_stable,
    })
}
