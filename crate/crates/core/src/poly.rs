//! Complex polynomials and a simultaneous root finder.
//!
//! Roots are computed with the Aberth–Ehrlich iteration started from a circle
//! whose radius is the Cauchy bound. Approximations that land within a
//! configurable radius of each other are merged into one root with a
//! multiplicity, which is what the root condition needs to tell a simple unit
//! root from a repeated one.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Polynomial with complex coefficients, highest degree first.
///
/// Leading zero coefficients are stripped on construction, so the leading
/// coefficient is always nonzero and `degree() == coefficients().len() - 1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("polynomial coefficients must be finite"));
        }
        let first = coeffs
            .iter()
            .position(|c| c.norm_sqr() != 0.0)
            .ok_or_else(|| Error::invalid("polynomial must have a nonzero coefficient"))?;
        Ok(Self {
            coeffs: coeffs[first..].to_vec(),
        })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Monic polynomial with the given roots (repeated entries give multiplicity).
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i] += c;
                next[i + 1] -= c * r;
            }
            coeffs = next;
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in &self.coeffs {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Formal derivative. The derivative of a constant is the zero constant.
    pub fn derivative(&self) -> Self {
        let n = self.degree();
        if n == 0 {
            return Self {
                coeffs: vec![Complex64::new(0.0, 0.0)],
            };
        }
        Self {
            coeffs: self.coeffs[..n]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (n - i) as f64)
                .collect(),
        }
    }

    /// Divides by `(z - root)` with synthetic division, dropping the remainder.
    pub fn deflate(&self, root: Complex64) -> Result<Self> {
        if self.degree() == 0 {
            return Err(Error::invalid("cannot deflate a constant polynomial"));
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in &self.coeffs[..self.coeffs.len() - 1] {
            acc = acc * root + c;
            out.push(acc);
        }
        Self::new(out)
    }

    /// Largest coefficient magnitude.
    pub fn coefficient_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Every root lies in the disk `|z| <= 1 + max |a_i / a_0|`.
    pub fn cauchy_bound(&self) -> f64 {
        let lead = self.leading().norm();
        1.0 + self.coeffs[1..]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(0.0, f64::max)
    }

    /// Residual scale at `z`: coefficient scale times `max(1, |z|)^degree`.
    /// Reduces to the plain coefficient scale inside the unit disk.
    pub fn residual_scale(&self, z: Complex64) -> f64 {
        let r = z.norm().max(1.0);
        self.coefficient_scale() * libm::pow(r, self.degree() as f64)
    }
}

/// A root together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

impl Root {
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }
}

/// All roots of a polynomial, sorted by modulus (descending) then argument
/// (ascending). `residuals[i] = |p(roots[i])|`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub residuals: Vec<f64>,
}

impl RootSet {
    /// Sum of multiplicities; equals the polynomial degree.
    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Roots repeated according to multiplicity, in the set's order.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| core::iter::repeat_n(r.value, r.multiplicity))
            .collect()
    }

    /// Moduli repeated according to multiplicity, sorted descending.
    pub fn moduli(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.expanded().iter().map(|z| z.norm()).collect();
        m.sort_by(|a, b| b.total_cmp(a));
        m
    }

    pub fn max_modulus(&self) -> f64 {
        self.roots.iter().map(Root::modulus).fold(0.0, f64::max)
    }
}

/// Tunables for [`find_roots_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootFinderConfig {
    /// Accept a root when `|p(z)| <= residual_tol * residual_scale(z)`.
    pub residual_tol: f64,
    /// Approximations closer than this are merged into one multiple root.
    pub cluster_radius: f64,
    pub max_iterations: usize,
}

impl Default for RootFinderConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            cluster_radius: 1e-6,
            max_iterations: 200,
        }
    }
}

/// Finds all roots with the default cluster radius and iteration budget.
pub fn find_roots(p: &Polynomial, tol: f64) -> Result<RootSet> {
    find_roots_with(
        p,
        &RootFinderConfig {
            residual_tol: tol,
            ..RootFinderConfig::default()
        },
    )
}

pub fn find_roots_with(p: &Polynomial, config: &RootFinderConfig) -> Result<RootSet> {
    if p.degree() == 0 {
        return Err(Error::invalid("root finding needs degree >= 1"));
    }
    if !(config.residual_tol > 0.0) || !(config.cluster_radius > 0.0) {
        return Err(Error::invalid("tolerance and cluster radius must be positive"));
    }
    let raw = aberth(p, config)?;
    let clusters = cluster_multiplicities(&raw, config.cluster_radius);
    let mut roots: Vec<Root> = clusters
        .into_iter()
        .map(|(value, multiplicity)| Root {
            value: polish_multiple(p, value, multiplicity, config.cluster_radius),
            multiplicity,
        })
        .collect();
    roots.sort_by(root_order);
    let residuals = roots.iter().map(|r| p.eval(r.value).norm()).collect();
    Ok(RootSet { roots, residuals })
}

/// A root of multiplicity `m` is a simple root of the `(m-1)`th derivative,
/// so Newton steps on that derivative sharpen the cluster centroid. The
/// refinement is kept only if it stays inside the cluster radius and does not
/// increase the derivative's residual.
fn polish_multiple(p: &Polynomial, centroid: Complex64, m: usize, radius: f64) -> Complex64 {
    if m < 2 || m > p.degree() {
        return centroid;
    }
    let mut q = p.clone();
    for _ in 1..m {
        q = q.derivative();
    }
    let mut z = centroid;
    for _ in 0..20 {
        let (v, dv) = q.eval_with_derivative(z);
        if v.norm_sqr() == 0.0 || dv.norm_sqr() == 0.0 {
            break;
        }
        let step = v / dv;
        z -= step;
        if step.norm() <= f64::EPSILON * z.norm().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let finite = z.re.is_finite() && z.im.is_finite();
    if finite && (z - centroid).norm() <= radius && q.eval(z).norm() <= q.eval(centroid).norm() {
        z
    } else {
        centroid
    }
}

fn root_order(a: &Root, b: &Root) -> Ordering {
    b.modulus()
        .total_cmp(&a.modulus())
        .then_with(|| a.value.arg().total_cmp(&b.value.arg()))
}

fn aberth(p: &Polynomial, config: &RootFinderConfig) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if n == 1 {
        let c = p.coefficients();
        return Ok(vec![-c[1] / c[0]]);
    }
    // Vanishing low-order coefficients are exact roots at the origin.
    let trailing_zeros = p.coeffs.iter().rev().take_while(|c| c.norm_sqr() == 0.0).count();
    if trailing_zeros > 0 {
        let reduced = Polynomial::new(p.coeffs[..p.coeffs.len() - trailing_zeros].to_vec())?;
        let mut roots = vec![Complex64::new(0.0, 0.0); trailing_zeros];
        if reduced.degree() > 0 {
            roots.extend(aberth(&reduced, config)?);
        }
        return Ok(roots);
    }

    let radius = p.cauchy_bound();
    let offset = 0.4;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + offset))
        .collect();

    let eps = f64::EPSILON;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        let mut max_rel_step: f64 = 0.0;
        for i in 0..n {
            let (value, deriv) = p.eval_with_derivative(z[i]);
            if value.norm_sqr() == 0.0 {
                continue;
            }
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    let diff = z[i] - zj;
                    if diff.norm_sqr() != 0.0 {
                        repulsion += diff.inv();
                    }
                }
            }
            let step = if deriv.norm_sqr() == 0.0 {
                // Stationary point: nudge off it.
                Complex64::new(radius * 1e-8, radius * 1e-8)
            } else {
                let newton = value / deriv;
                newton / (Complex64::new(1.0, 0.0) - newton * repulsion)
            };
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] -= step;
            let rel = step.norm() / z[i].norm().max(f64::MIN_POSITIVE);
            max_rel_step = max_rel_step.max(rel);
        }
        if max_rel_step <= 4.0 * eps {
            break;
        }
    }

    let worst_residual = z
        .iter()
        .map(|&zi| p.eval(zi).norm() / p.residual_scale(zi))
        .fold(0.0, f64::max);
    if !(worst_residual <= config.residual_tol) {
        return Err(Error::NoConvergence {
            iterations,
            worst_residual,
            best: z,
        });
    }
    Ok(z)
}

/// Merges approximations that lie within `radius` of each other (single
/// linkage) into their centroid, summing multiplicities. Clusters are returned
/// in order of their first member.
pub fn cluster_multiplicities(raw: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let n = raw.len();
    let mut parent: Vec<usize> = (0..n).collect();

    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }

    for i in 0..n {
        for j in (i + 1)..n {
            if (raw[i] - raw[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }

    let mut out: Vec<(usize, Complex64, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match out.iter_mut().find(|(root, _, _)| *root == r) {
            Some((_, sum, count)) => {
                *sum += raw[i];
                *count += 1;
            }
            None => out.push((r, raw[i], 1)),
        }
    }
    out.into_iter()
        .map(|(_, sum, count)| (sum / count as f64, count))
        .collect()
}
