//! Published reference classifications: ten third-order coefficient rows with
//! their root moduli printed to two decimals, and the zero-stability verdicts
//! of the first-order and two-step schemes.

use alloc::vec::Vec;

use crate::scheme::{first_order, lm_second_order, make_scheme, Scheme};
use crate::Result;

/// One coefficient row with its printed root moduli (two decimals, in the
/// printed order) and zero-stability verdict.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ModulusRow {
    pub alphas: Vec<f64>,
    pub beta: f64,
    pub moduli: Vec<f64>,
    pub zero_stable: bool,
}

impl ModulusRow {
    pub fn new(alphas: &[f64], beta: f64, moduli: &[f64], zero_stable: bool) -> Self {
        Self {
            alphas: alphas.to_vec(),
            beta,
            moduli: moduli.to_vec(),
            zero_stable,
        }
    }

    pub fn scheme(&self) -> Result<Scheme> {
        make_scheme(&self.alphas, self.beta)
    }
}

/// The ten reference rows.
///
/// The last row is the optimal family member, whose coefficients are usually
/// printed as `0.3333, 0.5556, 0.1111, 1.7778`. It is stored as the exact
/// fractions `1/3, 5/9, 1/9, 16/9`: the nonprincipal roots form a double root
/// at `-1/3`, and the four-digit decimals split it into `-0.3381` and
/// `-0.3286`, which rounds to `0.34, 0.33` instead of `0.33, 0.33`.
pub fn modulus_rows() -> Vec<ModulusRow> {
    [
        (&[1.0, 1.0, 1.0], 1.0, [1.84, 0.74, 0.74], false),
        (&[3.75, -4.0, 1.25], -0.5, [0.57, 1.00, 2.18], false),
        (&[-3.0, 5.0, -1.0], 4.0, [4.24, 0.24, 1.00], false),
        (&[-0.75, 2.0, -0.25], 2.5, [1.88, 0.13, 1.00], false),
        (&[2.25, -2.0, 0.75], 0.5, [1.00, 0.87, 0.87], true),
        (&[0.1, 0.2, 0.3], 0.4, [0.81, 0.61, 0.61], true),
        (&[0.5, 0.3, 0.1], 0.1, [0.94, 0.33, 0.33], true),
        (&[0.825, -0.1, 0.275], 1.45, [1.00, 0.52, 0.52], true),
        (&[1.0, 0.3, -0.4], 1.0, [0.60, 0.82, 0.82], true),
        (&[1.0 / 3.0, 5.0 / 9.0, 1.0 / 9.0], 16.0 / 9.0, [0.33, 0.33, 1.00], true),
    ]
    .iter()
    .map(|(a, b, m, z)| ModulusRow::new(*a, *b, m, *z))
    .collect()
}

/// `(alpha, zero_stable)` for the first-order family.
pub const FIRST_ORDER_VERDICTS: [(f64, bool); 5] =
    [(2.0, false), (1.5, false), (0.5, true), (0.7, true), (1.0, true)];

/// `(k, zero_stable)` for the two-step family.
pub const TWO_STEP_VERDICTS: [(f64, bool); 4] = [(-1.5, false), (1.5, false), (-0.5, true), (0.5, true)];

pub fn first_order_cases() -> Result<Vec<(Scheme, bool)>> {
    FIRST_ORDER_VERDICTS
        .iter()
        .map(|&(a, z)| Ok((first_order(a)?, z)))
        .collect()
}

pub fn two_step_cases() -> Result<Vec<(Scheme, bool)>> {
    TWO_STEP_VERDICTS
        .iter()
        .map(|&(k, z)| Ok((lm_second_order(k)?, z)))
        .collect()
}

/// `round(100 x)` as an integer, so two-decimal values compare exactly.
pub fn hundredths(x: f64) -> i64 {
    libm::round(x * 100.0) as i64
}

/// Outcome of recomputing one reference row.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RowCheck {
    /// Computed moduli rounded to two decimals, sorted descending.
    pub computed: Vec<f64>,
    /// Reference moduli sorted descending.
    pub expected: Vec<f64>,
    pub computed_zero_stable: bool,
    pub moduli_match: bool,
    pub verdict_match: bool,
}

impl RowCheck {
    pub fn passed(&self) -> bool {
        self.moduli_match && self.verdict_match
    }
}

/// Recomputes a row's moduli and verdict. Moduli compare as multisets after
/// rounding to two decimals.
pub fn check_row(row: &ModulusRow, tol: f64) -> Result<RowCheck> {
    let report = row.scheme()?.root_condition(tol)?;
    let mut computed: Vec<i64> = report.moduli.iter().map(|m| hundredths(*m)).collect();
    let mut expected: Vec<i64> = row.moduli.iter().map(|m| hundredths(*m)).collect();
    computed.sort_unstable_by(|a, b| b.cmp(a));
    expected.sort_unstable_by(|a, b| b.cmp(a));
    Ok(RowCheck {
        moduli_match: computed == expected,
        verdict_match: report.zero_stable == row.zero_stable,
        computed: computed.iter().map(|c| *c as f64 / 100.0).collect(),
        expected: expected.iter().map(|c| *c as f64 / 100.0).collect(),
        computed_zero_stable: report.zero_stable,
    })
}
