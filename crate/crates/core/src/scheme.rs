//! Explicit multistep schemes, their characteristic polynomial, the root
//! condition, and the consistency conditions.
//!
//! Sign convention: `alphas[i]` multiplies `y[n-i]`, and `beta` multiplies
//! `h * f(t[n], y[n])`. Coefficients are stored exactly as given.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::poly::{find_roots_with, Polynomial, RootFinderConfig, RootSet};
use crate::{Error, Result};

/// Coefficients of a `d`th-order explicit scheme.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawScheme"))]
pub struct Scheme {
    alphas: Vec<f64>,
    beta: f64,
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
struct RawScheme {
    alphas: Vec<f64>,
    beta: f64,
}

#[cfg(feature = "serde")]
impl TryFrom<RawScheme> for Scheme {
    type Error = Error;

    fn try_from(raw: RawScheme) -> Result<Self> {
        Scheme::new(raw.alphas, raw.beta)
    }
}

impl Scheme {
    pub fn new(alphas: Vec<f64>, beta: f64) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidScheme("at least one alpha coefficient is required"));
        }
        if !beta.is_finite() || alphas.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidScheme("coefficients must be finite"));
        }
        Ok(Self { alphas, beta })
    }

    /// Number of history states `d`.
    pub fn order(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Same history weights with a different activation weight.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.alphas.clone(), beta)
    }

    /// `rho^d - sum_i alpha_i rho^(d-1-i)`. The activation weight does not appear.
    pub fn characteristic_polynomial(&self) -> Polynomial {
        let mut coeffs = Vec::with_capacity(self.order() + 1);
        coeffs.push(Complex64::new(1.0, 0.0));
        coeffs.extend(self.alphas.iter().map(|&a| Complex64::new(-a, 0.0)));
        Polynomial::new(coeffs).expect("monic polynomial with finite coefficients")
    }

    pub fn root_condition(&self, tol: f64) -> Result<StabilityReport> {
        root_condition_with(self, tol, &RootFinderConfig::default())
    }

    pub fn consistency(&self, tol: f64) -> ConsistencyReport {
        consistency_check(self, tol)
    }

    /// Power iteration on the companion matrix of the homogeneous recurrence.
    pub fn companion_spectral_radius(&self, iterations: usize) -> SpectralEstimate {
        companion_spectral_radius(self, iterations)
    }

    /// One application of the homogeneous recurrence to a window ordered
    /// newest first: `(v0, v1, ..) -> (sum alpha_i v_i, v0, v1, ..)`.
    pub fn companion_step(&self, window: &[f64]) -> Vec<f64> {
        let lead = self.alphas.iter().zip(window).map(|(a, v)| a * v).sum();
        let mut next = Vec::with_capacity(window.len());
        next.push(lead);
        next.extend_from_slice(&window[..window.len() - 1]);
        next
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("alphas=[")?;
        for (i, a) in self.alphas.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            // adding 0.0 turns -0 into 0
            write!(f, "{}", a + 0.0)?;
        }
        write!(f, "], beta={}", self.beta + 0.0)
    }
}

pub fn make_scheme(alphas: &[f64], beta: f64) -> Result<Scheme> {
    Scheme::new(alphas.to_vec(), beta)
}

/// `y[n+1] = alpha y[n] + h f(t[n], y[n])`. `alpha = 1` is the forward Euler step.
pub fn first_order(alpha: f64) -> Result<Scheme> {
    Scheme::new(vec![alpha], 1.0)
}

/// `y[n+1] = (1 - k) y[n] + k y[n-1] + (2k + 1) h f(t[n], y[n])`.
/// Its characteristic polynomial factors as `(rho - 1)(rho + k)`.
pub fn lm_second_order(k: f64) -> Result<Scheme> {
    Scheme::new(vec![1.0 - k, k], 2.0 * k + 1.0)
}

/// Why a scheme fails the root condition.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Violation {
    ModulusAboveOne { root: Complex64, modulus: f64 },
    RepeatedUnitRoot { root: Complex64, multiplicity: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ModulusAboveOne { root, modulus } => {
                write!(f, "root {} has modulus {modulus:.6} > 1", ShortRoot(*root))
            }
            Violation::RepeatedUnitRoot { root, multiplicity } => {
                write!(f, "root {} on the unit circle has multiplicity {multiplicity}", ShortRoot(*root))
            }
        }
    }
}

/// Six decimals, dropping an imaginary part that is negligible next to the modulus.
struct ShortRoot(Complex64);

impl fmt::Display for ShortRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.0;
        if libm::fabs(z.im) <= 1e-12 * z.norm().max(1.0) {
            write!(f, "{:.6}", z.re)
        } else {
            let sign = if z.im < 0.0 { '-' } else { '+' };
            write!(f, "{:.6}{sign}{:.6}i", z.re, libm::fabs(z.im))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StabilityReport {
    pub roots: RootSet,
    /// Root moduli repeated by multiplicity, sorted descending; length `d`.
    pub moduli: Vec<f64>,
    pub zero_stable: bool,
    pub violations: Vec<Violation>,
    pub tolerance: f64,
}

impl StabilityReport {
    pub fn violation_messages(&self) -> Vec<String> {
        self.violations.iter().map(|v| format!("{v}")).collect()
    }

    /// Largest modulus, i.e. the spectral radius of the companion matrix.
    pub fn dominant_modulus(&self) -> f64 {
        self.moduli.first().copied().unwrap_or(0.0)
    }
}

/// Root condition: every root has modulus `<= 1 + tol`, and roots with modulus
/// in `[1 - tol, 1 + tol]` are simple.
pub fn root_condition(s: &Scheme, tol: f64) -> Result<StabilityReport> {
    s.root_condition(tol)
}

pub fn root_condition_with(
    s: &Scheme,
    tol: f64,
    config: &RootFinderConfig,
) -> Result<StabilityReport> {
    if !(tol > 0.0) {
        return Err(Error::invalid("root-condition tolerance must be positive"));
    }
    let roots = find_roots_with(&s.characteristic_polynomial(), config)?;
    let mut violations = Vec::new();
    for root in &roots.roots {
        let modulus = root.modulus();
        if modulus > 1.0 + tol {
            violations.push(Violation::ModulusAboveOne {
                root: root.value,
                modulus,
            });
        } else if modulus >= 1.0 - tol && root.multiplicity > 1 {
            violations.push(Violation::RepeatedUnitRoot {
                root: root.value,
                multiplicity: root.multiplicity,
            });
        }
    }
    let moduli = roots.moduli();
    Ok(StabilityReport {
        roots,
        moduli,
        zero_stable: violations.is_empty(),
        violations,
        tolerance: tol,
    })
}

/// The two consistency conditions for this scheme class:
/// `sum alpha_i = 1` and `beta - sum i * alpha_i = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConsistencyReport {
    pub sum_alpha: f64,
    pub moment: f64,
    pub consistent: bool,
    pub tolerance: f64,
}

pub fn consistency_check(s: &Scheme, tol: f64) -> ConsistencyReport {
    let sum_alpha: f64 = s.alphas.iter().sum();
    let weighted: f64 = s
        .alphas
        .iter()
        .enumerate()
        .map(|(i, a)| i as f64 * a)
        .sum();
    let moment = s.beta - weighted;
    ConsistencyReport {
        sum_alpha,
        moment,
        consistent: libm::fabs(sum_alpha - 1.0) <= tol && libm::fabs(moment - 1.0) <= tol,
        tolerance: tol,
    }
}

/// Result of [`companion_spectral_radius`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SpectralEstimate {
    pub radius: f64,
    /// True when the last one-step growth factor agrees with the windowed
    /// estimate. Complex dominant pairs typically leave this false.
    pub converged: bool,
    pub iterations: usize,
}

/// Estimates the dominant root modulus from the growth of `C^k e_0`, where
/// `C` is the companion matrix. The estimate is the geometric mean growth over
/// the second half of the iterations, which cancels the eigenvector
/// normalization and tolerates oscillating complex pairs.
pub fn companion_spectral_radius(s: &Scheme, iterations: usize) -> SpectralEstimate {
    let iterations = iterations.max(1);
    let d = s.order();
    let mut window = vec![0.0; d];
    window[0] = 1.0;
    // log_norms[k] = ln ||C^k e_0||_2, tracked with renormalization.
    let mut log_norms = Vec::with_capacity(iterations + 1);
    log_norms.push(0.0);
    let mut acc = 0.0;
    for _ in 0..iterations {
        let next = s.companion_step(&window);
        let norm = libm::sqrt(next.iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 || !norm.is_finite() {
            let radius = if norm == 0.0 { 0.0 } else { f64::INFINITY };
            return SpectralEstimate {
                radius,
                converged: norm == 0.0,
                iterations: log_norms.len(),
            };
        }
        acc += libm::log(norm);
        log_norms.push(acc);
        window = next.iter().map(|v| v / norm).collect();
    }
    let k = iterations;
    let half = k / 2;
    let radius = libm::exp((log_norms[k] - log_norms[half]) / (k - half) as f64);
    let last = libm::exp(log_norms[k] - log_norms[k - 1]);
    SpectralEstimate {
        radius,
        converged: libm::fabs(last - radius) <= 1e-9 * radius.max(1e-300),
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_STABILITY_TOL as TOL;
    use proptest::prelude::*;

    fn scheme(alphas: &[f64], beta: f64) -> Scheme {
        make_scheme(alphas, beta).unwrap()
    }

    fn rounded(moduli: &[f64]) -> Vec<i64> {
        let mut m: Vec<i64> = moduli.iter().map(|x| (x * 100.0).round() as i64).collect();
        m.sort();
        m
    }

    #[test]
    fn make_scheme_examples() {
        let euler = scheme(&[1.0], 1.0);
        assert_eq!(euler.order(), 1);
        assert_eq!(scheme(&[1.0, 1.0, 1.0], 1.0).order(), 3);
        assert_eq!(scheme(&[0.5, 0.5], 0.0).beta(), 0.0);
        assert!(make_scheme(&[], 1.0).is_err());
        assert!(make_scheme(&[f64::NAN], 1.0).is_err());
        assert!(make_scheme(&[1.0], f64::INFINITY).is_err());
    }

    #[test]
    fn characteristic_polynomial_examples() {
        let c = |re: f64| Complex64::new(re, 0.0);
        assert_eq!(
            first_order(1.0).unwrap().characteristic_polynomial().coefficients(),
            &[c(1.0), c(-1.0)]
        );
        let k = 0.3;
        assert_eq!(
            lm_second_order(k).unwrap().characteristic_polynomial().coefficients(),
            &[c(1.0), c(k - 1.0), c(-k)]
        );
        assert_eq!(
            scheme(&[3.75, -4.0, 1.25], -0.5).characteristic_polynomial().coefficients(),
            &[c(1.0), c(-3.75), c(4.0), c(-1.25)]
        );
    }

    #[test]
    fn root_condition_examples() {
        let r = first_order(2.0).unwrap().root_condition(TOL).unwrap();
        assert!(!r.zero_stable);
        assert!((r.moduli[0] - 2.0).abs() < 1e-14);

        let r = lm_second_order(0.5).unwrap().root_condition(TOL).unwrap();
        assert!(r.zero_stable);
        let mut re: Vec<f64> = r.roots.expanded().iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 0.5).abs() < 1e-14 && (re[1] - 1.0).abs() < 1e-14);

        let r = scheme(&[1.0, 1.0, 1.0], 1.0).root_condition(TOL).unwrap();
        assert!(!r.zero_stable);
        assert_eq!(rounded(&r.moduli), vec![74, 74, 184]);
        assert_eq!(r.moduli.len(), 3);
        assert_eq!(r.violations.len(), 1);
    }

    #[test]
    fn repeated_unit_root_violates() {
        // k = -1: (rho - 1)^2
        let r = lm_second_order(-1.0).unwrap().root_condition(TOL).unwrap();
        assert!(!r.zero_stable);
        assert!(matches!(
            r.violations[0],
            Violation::RepeatedUnitRoot { multiplicity: 2, .. }
        ));
        // distinct unit roots +1 and -1 are fine
        let r = scheme(&[0.0, 1.0], 0.0).root_condition(TOL).unwrap();
        assert!(r.zero_stable);
    }

    #[test]
    fn consistency_examples() {
        let c = scheme(&[0.1, 0.2, 0.3], 0.4).consistency(1e-10);
        assert!(!c.consistent);
        assert!((c.sum_alpha - 0.6).abs() < 1e-15);
        assert!(scheme(&[0.1, 0.2, 0.3], 0.4).root_condition(TOL).unwrap().zero_stable);
        assert!(first_order(1.0).unwrap().consistency(1e-12).consistent);
        // LM scheme: 1 - k + k = 1, (2k + 1) - k = 1 + k  -> consistent only for k = 0
        let lm = lm_second_order(0.5).unwrap().consistency(1e-12);
        assert_eq!(lm.sum_alpha, 1.0);
        assert_eq!(lm.moment, 1.5);
    }

    #[test]
    fn table_one_classification() {
        for (alpha, zs) in [(2.0, false), (1.5, false), (0.5, true), (0.7, true), (1.0, true)] {
            let r = first_order(alpha).unwrap().root_condition(TOL).unwrap();
            assert_eq!(r.zero_stable, zs, "alpha = {alpha}");
        }
    }

    #[test]
    fn table_two_classification() {
        for (k, zs) in [(-1.5, false), (1.5, false), (-0.5, true), (0.5, true)] {
            let r = lm_second_order(k).unwrap().root_condition(TOL).unwrap();
            assert_eq!(r.zero_stable, zs, "k = {k}");
        }
    }

    #[test]
    fn degenerate_second_order_is_euler() {
        let r = lm_second_order(0.0).unwrap().root_condition(TOL).unwrap();
        assert!(r.zero_stable);
        let mut m = r.moduli.clone();
        m.sort_by(f64::total_cmp);
        assert!(m[0].abs() < 1e-14 && (m[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_radius_examples() {
        let e = scheme(&[1.0, 1.0, 1.0], 1.0).companion_spectral_radius(500);
        assert!((e.radius - 1.839_286_755_214_161).abs() < 1e-9, "{}", e.radius);
        assert!(e.converged);
        let e = first_order(1.0).unwrap().companion_spectral_radius(10);
        assert_eq!(e.radius, 1.0);
        let e = scheme(&[-3.0, 5.0, -1.0], 4.0).companion_spectral_radius(200);
        // -2 - sqrt(5)
        assert!((e.radius - (2.0 + 5f64.sqrt())).abs() < 1e-9);
        let nil = scheme(&[0.0, 0.0], 1.0).companion_spectral_radius(10);
        assert_eq!(nil.radius, 0.0);
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(first_order(1.0).unwrap().root_condition(0.0).is_err());
    }

    proptest! {
        #[test]
        fn beta_does_not_affect_root_condition(
            alphas in proptest::collection::vec(-2.0f64..2.0, 1..5),
            b1 in -5.0f64..5.0, b2 in -5.0f64..5.0
        ) {
            let s1 = Scheme::new(alphas.clone(), b1).unwrap();
            let s2 = Scheme::new(alphas, b2).unwrap();
            prop_assert_eq!(s1.root_condition(TOL).unwrap(), s2.root_condition(TOL).unwrap());
        }

        #[test]
        fn first_order_stable_iff_alpha_at_most_one(alpha in -3.0f64..3.0) {
            prop_assume!((alpha.abs() - 1.0).abs() > 1e-6);
            let r = first_order(alpha).unwrap().root_condition(TOL).unwrap();
            prop_assert_eq!(r.zero_stable, alpha.abs() <= 1.0);
        }

        #[test]
        fn lm_roots_are_one_and_minus_k(k in -3.0f64..3.0) {
            prop_assume!((k + 1.0).abs() > 1e-3);
            let r = lm_second_order(k).unwrap().root_condition(TOL).unwrap();
            let roots = r.roots.expanded();
            let near = |target: f64| roots.iter().any(|z| (z - Complex64::new(target, 0.0)).norm() < 1e-10);
            prop_assert!(near(1.0) && near(-k));
            prop_assert_eq!(r.zero_stable, k.abs() <= 1.0 && (k + 1.0).abs() > 1e-3);
        }

        #[test]
        fn power_iteration_matches_dominant_root(
            alphas in proptest::collection::vec(-2.0f64..2.0, 1..5)
        ) {
            let s = Scheme::new(alphas, 1.0).unwrap();
            let report = s.root_condition(TOL).unwrap();
            let m = &report.moduli;
            // only well-separated real dominant roots
            let dominant = report.roots.roots[0];
            prop_assume!(dominant.multiplicity == 1 && dominant.value.im.abs() < 1e-12);
            prop_assume!(m.len() == 1 || m[1] < 0.8 * m[0]);
            prop_assume!(m[0] > 1e-3);
            let est = s.companion_spectral_radius(400);
            prop_assert!((est.radius - m[0]).abs() <= 1e-6 * m[0].max(1.0),
                "power {} vs roots {}", est.radius, m[0]);
        }
    }
}
