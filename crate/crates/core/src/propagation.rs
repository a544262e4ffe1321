//! Depth-wise feature propagation through a multistep recurrence with
//! normalized nonlinear blocks, input-noise injection, and divergence
//! measurement between clean and noisy runs.
//!
//! A run of depth `D` starts from `d` states `y[0..d]` and computes
//! `y[n+1] = sum_i alpha_i y[n-i] + h * beta * B_k(y[n])` for `D` steps, where
//! `B_k` is the block of step `k`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::fit::{euclidean_distance, log_slope, mean_std, sup_distance};
use crate::scheme::Scheme;
use crate::seed::mix_seed;
use crate::{Error, Result, DEFAULT_STABILITY_TOL};

/// Default bounded scale applied after standardization.
pub const DEFAULT_OUTPUT_SCALE: f64 = 1.0;

/// Variance floor inside the standardization.
pub const NORM_EPS: f64 = 1e-12;

/// Minimum number of finite gaps for a growth slope.
pub const MIN_SLOPE_POINTS: usize = 10;

/// A map `R^p -> R^p` applied once per recurrence step.
pub trait Block {
    fn width(&self) -> usize;
    fn apply(&self, y: &[f64], out: &mut [f64]);
}

impl<B: Block + ?Sized> Block for &B {
    fn width(&self) -> usize {
        (**self).width()
    }

    fn apply(&self, y: &[f64], out: &mut [f64]) {
        (**self).apply(y, out)
    }
}

/// Dense block `y -> scale * standardize(relu(W y + b))`, with `W` drawn from
/// `N(0, 1/p)` and `b` from `N(0, 1)` by a seeded generator.
///
/// The bias keeps the map Lipschitz near the origin: without it the
/// standardized output is invariant to rescaling `y`, so its slope grows
/// without bound as `y` shrinks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMap {
    width: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
    output_scale: f64,
}

impl BlockMap {
    pub fn width(&self) -> usize {
        self.width
    }

    /// Row-major `p x p` weight matrix.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn output_scale(&self) -> f64 {
        self.output_scale
    }

    pub fn with_output_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid("output scale must be positive and finite"));
        }
        self.output_scale = scale;
        Ok(self)
    }

    /// Output before the bounded scale: standardized rectified activations.
    pub fn normalized(&self, y: &[f64], out: &mut [f64]) {
        let p = self.width;
        for (r, o) in out.iter_mut().enumerate().take(p) {
            let row = &self.weights[r * p..(r + 1) * p];
            let z: f64 = self.bias[r] + row.iter().zip(y).map(|(w, v)| w * v).sum::<f64>();
            *o = z.max(0.0);
        }
        let n = p as f64;
        let mean = out.iter().sum::<f64>() / n;
        let var = out.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let inv = 1.0 / libm::sqrt(var + NORM_EPS);
        out.iter_mut().for_each(|v| *v = (*v - mean) * inv);
    }
}

impl Block for BlockMap {
    fn width(&self) -> usize {
        self.width
    }

    fn apply(&self, y: &[f64], out: &mut [f64]) {
        self.normalized(y, out);
        if self.output_scale != 1.0 {
            out.iter_mut().for_each(|v| *v *= self.output_scale);
        }
    }
}

/// Block with identically zero output; turns propagation into the pure
/// linear recurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroBlock {
    pub width: usize,
}

impl Block for ZeroBlock {
    fn width(&self) -> usize {
        self.width
    }

    fn apply(&self, _y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
}

/// Deterministic block for `(seed, width)`.
pub fn make_block(seed: u64, width: usize) -> Result<BlockMap> {
    if width == 0 {
        return Err(Error::invalid("block width must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std = 1.0 / libm::sqrt(width as f64);
    let weights = (0..width * width)
        .map(|_| std * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let bias = (0..width).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Ok(BlockMap {
        width,
        weights,
        bias,
        output_scale: DEFAULT_OUTPUT_SCALE,
    })
}

/// Largest observed `||B(y) - B(y')||_2 / ||y - y'||_2` over `pairs` sampled
/// pairs in `[0, 1]^p`. Half of the pairs are independent points, half are
/// nearby points at distance about `1e-3`.
pub fn estimate_lipschitz<B: Block>(block: &B, pairs: usize, seed: u64) -> f64 {
    let p = block.width();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a_out = vec![0.0; p];
    let mut b_out = vec![0.0; p];
    let mut best: f64 = 0.0;
    for k in 0..pairs {
        let a: Vec<f64> = (0..p).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = if k % 2 == 0 {
            (0..p).map(|_| rng.random::<f64>()).collect()
        } else {
            a.iter().map(|v| v + 1e-3 * rng.random_range(-1.0..1.0)).collect()
        };
        let den = euclidean_distance(&a, &b);
        if den == 0.0 {
            continue;
        }
        block.apply(&a, &mut a_out);
        block.apply(&b, &mut b_out);
        best = best.max(euclidean_distance(&a_out, &b_out) / den);
    }
    best
}

/// Retained states of one propagation run.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationRun {
    /// `y[0] .. y[d-1]` followed by one state per completed step.
    pub history: Vec<Vec<f64>>,
    /// Index of the first non-finite state, which is not retained.
    pub blew_up_at: Option<usize>,
}

impl PropagationRun {
    pub fn final_state(&self) -> &[f64] {
        self.history.last().expect("history holds the initial states")
    }
}

/// Runs `depth` steps. `blocks` holds either one block per step or a single
/// block shared by every step.
pub fn propagate<B: Block>(
    s: &Scheme,
    blocks: &[B],
    init_states: &[Vec<f64>],
    depth: usize,
    h: f64,
) -> Result<PropagationRun> {
    let d = s.order();
    if depth == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    if !h.is_finite() {
        return Err(Error::invalid("step size must be finite"));
    }
    if init_states.len() != d {
        return Err(Error::invalid(format!(
            "scheme of order {d} needs {d} initial states, got {}",
            init_states.len()
        )));
    }
    let p = init_states[0].len();
    if p == 0 || init_states.iter().any(|y| y.len() != p) {
        return Err(Error::invalid("initial states must share a nonzero width"));
    }
    if blocks.len() != depth && blocks.len() != 1 {
        return Err(Error::invalid("need one block per step or a single shared block"));
    }
    if blocks.iter().any(|b| b.width() != p) {
        return Err(Error::invalid("block width differs from the state width"));
    }

    let mut history: Vec<Vec<f64>> = init_states.to_vec();
    history.reserve(depth);
    let mut f = vec![0.0; p];
    let hb = h * s.beta();
    for k in 0..depth {
        let n = history.len() - 1;
        let block = if blocks.len() == 1 { &blocks[0] } else { &blocks[k] };
        block.apply(&history[n], &mut f);
        let mut next: Vec<f64> = f.iter().map(|v| hb * v).collect();
        for (i, &a) in s.alphas().iter().enumerate() {
            for (acc, v) in next.iter_mut().zip(&history[n - i]) {
                *acc += a * v;
            }
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Ok(PropagationRun {
                blew_up_at: Some(n + 1),
                history,
            });
        }
        history.push(next);
    }
    Ok(PropagationRun {
        history,
        blew_up_at: None,
    })
}

/// Gap between a clean and a perturbed run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PropagationReport {
    /// `||y[n] - y_hat[n]||_inf` over the common finite history.
    pub per_depth_gap: Vec<f64>,
    /// Gap at the deepest index; infinite when either run blew up.
    pub final_gap: f64,
    /// Slope of `ln(gap)` against depth over the second half of the gaps.
    /// `None` with fewer than ten usable gaps.
    pub growth_slope: Option<f64>,
    pub blew_up_at: Option<usize>,
}

pub fn compare(clean: &PropagationRun, noisy: &PropagationRun) -> PropagationReport {
    let len = clean.history.len().min(noisy.history.len());
    let per_depth_gap: Vec<f64> = (0..len)
        .map(|n| sup_distance(&clean.history[n], &noisy.history[n]))
        .collect();
    let blew_up_at = match (clean.blew_up_at, noisy.blew_up_at) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let final_gap = if blew_up_at.is_some() {
        f64::INFINITY
    } else {
        per_depth_gap.last().copied().unwrap_or(0.0)
    };
    PropagationReport {
        growth_slope: gap_slope(&per_depth_gap),
        per_depth_gap,
        final_gap,
        blew_up_at,
    }
}

fn gap_slope(gaps: &[f64]) -> Option<f64> {
    let usable = gaps.iter().filter(|g| g.is_finite() && **g > 0.0).count();
    if usable < MIN_SLOPE_POINTS {
        return None;
    }
    log_slope(gaps, gaps.len() / 2, MIN_SLOPE_POINTS).or_else(|| log_slope(gaps, 0, MIN_SLOPE_POINTS))
}

/// Window sup-norms `max_{j<d} |y[n+j]|` of the homogeneous recurrence started
/// from the unit impulse `y[d-1] = 1`, `y[0..d-1] = 0`. Entry `k` is the
/// window after `k` steps, so entry 0 equals 1.
pub fn impulse_gaps(s: &Scheme, depth: usize) -> Vec<f64> {
    let d = s.order();
    let mut window = vec![0.0; d];
    window[0] = 1.0;
    let mut gaps = Vec::with_capacity(depth + 1);
    gaps.push(1.0);
    for _ in 0..depth {
        window = s.companion_step(&window);
        gaps.push(window.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max));
    }
    gaps
}

/// Slope of `ln(gap)` against depth for the block-free recurrence with a unit
/// initial gap, fitted over depths `>= depth / 2`. For a scheme with a simple
/// dominant root this approaches the log of its modulus.
pub fn growth_rate(s: &Scheme, depth: usize) -> Result<f64> {
    if depth < 20 {
        return Err(Error::invalid("growth rate needs depth >= 20"));
    }
    let gaps = impulse_gaps(s, depth);
    // A nilpotent recurrence reaches exact zero; report decay as -inf.
    Ok(log_slope(&gaps, depth / 2, MIN_SLOPE_POINTS).unwrap_or(f64::NEG_INFINITY))
}

/// Additive input noise.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum NoiseKind {
    None,
    Uniform { lo: f64, hi: f64 },
    Gaussian { sigma: f64 },
    Constant { mu: f64 },
}

impl NoiseKind {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::Uniform { .. } => "uniform",
            NoiseKind::Gaussian { .. } => "gaussian",
            NoiseKind::Constant { .. } => "constant",
        }
    }

    /// Parameter text: `lo:hi`, `sigma`, `mu`, or empty.
    pub fn param(&self) -> String {
        match self {
            NoiseKind::None => String::new(),
            NoiseKind::Uniform { lo, hi } => format!("{lo}:{hi}"),
            NoiseKind::Gaussian { sigma } => sigma.to_string(),
            NoiseKind::Constant { mu } => mu.to_string(),
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseKind::None => f.write_str("none"),
            _ => write!(f, "{}:{}", self.name(), self.param()),
        }
    }
}

/// Parses `none`, `gaussian:SIGMA`, `constant:MU`, or `uniform:LO:HI`.
impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut parts = text.trim().split(':');
        let name = parts.next().unwrap_or("").trim().to_ascii_lowercase();
        let nums: Vec<f64> = parts
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad number {p:?} in noise {text:?}")))
            })
            .collect::<Result<_>>()?;
        let kind = match (name.as_str(), nums.as_slice()) {
            ("none", []) => NoiseKind::None,
            ("gaussian", [sigma]) => NoiseKind::Gaussian { sigma: *sigma },
            ("constant", [mu]) => NoiseKind::Constant { mu: *mu },
            ("uniform", [lo, hi]) => NoiseKind::Uniform { lo: *lo, hi: *hi },
            _ => {
                return Err(Error::invalid(format!(
                    "noise {text:?} is not none, gaussian:SIGMA, constant:MU or uniform:LO:HI"
                )))
            }
        };
        NoiseSpec::new(kind, false)?;
        Ok(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Clamp noisy features to `[0, 1]`.
    pub clip: bool,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, clip: bool) -> Result<Self> {
        let ok = match kind {
            NoiseKind::None => true,
            NoiseKind::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo <= hi,
            NoiseKind::Gaussian { sigma } => sigma.is_finite() && sigma >= 0.0,
            NoiseKind::Constant { mu } => mu.is_finite(),
        };
        if !ok {
            return Err(Error::invalid(format!("invalid noise parameters {kind}")));
        }
        Ok(Self { kind, clip })
    }

    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            clip: false,
        }
    }

    pub fn gaussian(sigma: f64, clip: bool) -> Result<Self> {
        Self::new(NoiseKind::Gaussian { sigma }, clip)
    }

    pub fn uniform(lo: f64, hi: f64, clip: bool) -> Result<Self> {
        Self::new(NoiseKind::Uniform { lo, hi }, clip)
    }

    pub fn constant(mu: f64, clip: bool) -> Result<Self> {
        Self::new(NoiseKind::Constant { mu }, clip)
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if self.clip {
            f.write_str("+clip")?;
        }
        Ok(())
    }
}

/// `y + noise`, clamped to `[0, 1]` when `spec.clip` is set. Deterministic per seed;
/// Gaussian noise is `sigma` times a fixed standard-normal draw, so noise of
/// different levels with one seed is proportional.
pub fn inject_noise(y: &[f64], spec: &NoiseSpec, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<f64> = match spec.kind {
        NoiseKind::None => y.to_vec(),
        NoiseKind::Uniform { lo, hi } => y
            .iter()
            .map(|v| v + lo + (hi - lo) * rng.random::<f64>())
            .collect(),
        NoiseKind::Gaussian { sigma } => y
            .iter()
            .map(|v| v + sigma * rng.sample::<f64, _>(StandardNormal))
            .collect(),
        NoiseKind::Constant { mu } => y.iter().map(|v| v + mu).collect(),
    };
    if spec.clip {
        out.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
    }
    out
}

/// Parameters shared by every cell of a robustness sweep.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepConfig {
    pub depth: usize,
    pub width: usize,
    pub trials: usize,
    pub seed: u64,
    pub h: f64,
    /// One block for every step instead of one per step.
    pub shared_block: bool,
    pub output_scale: f64,
    /// Root-condition tolerance for the zero-stable label.
    pub tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            depth: 56,
            width: 64,
            trials: 3,
            seed: 1,
            h: 1.0,
            shared_block: false,
            output_scale: DEFAULT_OUTPUT_SCALE,
            tol: DEFAULT_STABILITY_TOL,
        }
    }
}

const STREAM_INPUT: u64 = 0;
const STREAM_NOISE: u64 = 1;
const STREAM_BLOCKS: u64 = 2;

struct Trial {
    input: Vec<f64>,
    noise_seed: u64,
    start_blocks: Vec<BlockMap>,
    blocks: Vec<BlockMap>,
}

/// Precomputed per-trial inputs and blocks. Trial `k` draws everything from
/// `mix_seed(seed, k)`, so every scheme and noise spec sees the same inputs,
/// blocks and noise draws in that trial.
pub struct SweepPlan {
    config: SweepConfig,
    schemes: Vec<Scheme>,
    specs: Vec<NoiseSpec>,
    labels: Vec<bool>,
    trials: Vec<Trial>,
}

impl SweepPlan {
    pub fn new(schemes: &[Scheme], specs: &[NoiseSpec], config: &SweepConfig) -> Result<Self> {
        if schemes.is_empty() || specs.is_empty() {
            return Err(Error::invalid("a sweep needs at least one scheme and one noise spec"));
        }
        if config.trials == 0 || config.depth == 0 || config.width == 0 {
            return Err(Error::invalid("trials, depth and width must be at least 1"));
        }
        if !(config.h.is_finite() && config.output_scale > 0.0 && config.output_scale.is_finite()) {
            return Err(Error::invalid("step size and output scale must be finite, scale positive"));
        }
        let labels = schemes
            .iter()
            .map(|s| s.root_condition(config.tol).map(|r| r.zero_stable))
            .collect::<Result<Vec<_>>>()?;
        let max_order = schemes.iter().map(Scheme::order).max().unwrap_or(1);
        let trials = (0..config.trials as u64)
            .map(|k| {
                let trial_seed = mix_seed(config.seed, k);
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(trial_seed, STREAM_INPUT));
                let input = (0..config.width).map(|_| rng.random::<f64>()).collect();
                let block_seed = mix_seed(trial_seed, STREAM_BLOCKS);
                let block = |i: usize| {
                    make_block(mix_seed(block_seed, i as u64), config.width)
                        .and_then(|b| b.with_output_scale(config.output_scale))
                };
                let start_blocks = (0..max_order - 1).map(block).collect::<Result<_>>()?;
                let count = if config.shared_block { 1 } else { config.depth };
                let blocks = (0..count).map(|i| block(max_order - 1 + i)).collect::<Result<_>>()?;
                Ok(Trial {
                    input,
                    noise_seed: mix_seed(trial_seed, STREAM_NOISE),
                    start_blocks,
                    blocks,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config: config.clone(),
            schemes: schemes.to_vec(),
            specs: specs.to_vec(),
            labels,
            trials,
        })
    }

    pub fn config(&self) -> &SweepConfig {
        &self.config
    }

    pub fn n_schemes(&self) -> usize {
        self.schemes.len()
    }

    pub fn n_specs(&self) -> usize {
        self.specs.len()
    }

    /// Initial states from input `x`: `y[0] = x`, `y[q+1] = y[q] + h * S_q(y[q])`
    /// with dedicated start blocks `S_q`.
    fn start_states(&self, trial: &Trial, x: Vec<f64>, d: usize) -> Vec<Vec<f64>> {
        let mut states = vec![x];
        let mut f = vec![0.0; self.config.width];
        for q in 0..d - 1 {
            trial.start_blocks[q].apply(&states[q], &mut f);
            let next = states[q]
                .iter()
                .zip(&f)
                .map(|(y, v)| y + self.config.h * v)
                .collect();
            states.push(next);
        }
        states
    }

    /// Clean-versus-noisy report for one trial.
    pub fn trial_report(&self, scheme: usize, spec: usize, trial: usize) -> Result<PropagationReport> {
        let s = &self.schemes[scheme];
        let t = &self.trials[trial];
        let d = s.order();
        let noisy_input = inject_noise(&t.input, &self.specs[spec], t.noise_seed);
        let clean = propagate(s, &t.blocks, &self.start_states(t, t.input.clone(), d), self.config.depth, self.config.h)?;
        let noisy = propagate(s, &t.blocks, &self.start_states(t, noisy_input, d), self.config.depth, self.config.h)?;
        Ok(compare(&clean, &noisy))
    }

    /// Aggregates every trial of one `(scheme, spec)` pair.
    pub fn cell(&self, scheme: usize, spec: usize) -> Result<SweepCell> {
        let mut gaps = Vec::with_capacity(self.trials.len());
        for k in 0..self.trials.len() {
            gaps.push(self.trial_report(scheme, spec, k)?.final_gap);
        }
        let finite: Vec<f64> = gaps.iter().copied().filter(|g| g.is_finite()).collect();
        let blown = gaps.len() - finite.len();
        let (mean_gap, std_gap) = if finite.is_empty() {
            (f64::INFINITY, f64::NAN)
        } else {
            mean_std(&finite)
        };
        Ok(SweepCell {
            scheme_index: scheme,
            scheme: self.schemes[scheme].clone(),
            zero_stable: self.labels[scheme],
            noise: self.specs[spec],
            mean_gap,
            std_gap,
            blew_up_fraction: blown as f64 / gaps.len() as f64,
            gaps,
        })
    }

    /// Evaluates every cell in order.
    pub fn run(&self) -> Result<SweepReport> {
        let mut cells = Vec::with_capacity(self.n_schemes() * self.n_specs());
        for i in 0..self.n_schemes() {
            for j in 0..self.n_specs() {
                cells.push(self.cell(i, j)?);
            }
        }
        Ok(SweepReport::assemble(cells))
    }
}

/// Gap statistics of one `(scheme, noise spec)` pair.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepCell {
    /// Position of the scheme in the sweep input.
    pub scheme_index: usize,
    pub scheme: Scheme,
    pub zero_stable: bool,
    pub noise: NoiseSpec,
    /// Mean final gap over trials that stayed finite; infinite if none did.
    pub mean_gap: f64,
    pub std_gap: f64,
    pub blew_up_fraction: f64,
    /// Final gap per trial.
    pub gaps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SweepReport {
    /// Zero-stable schemes first; input order within each group.
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    /// Orders cells produced in any order: zero-stable group first, then by
    /// scheme index, then by the noise spec's position among the cells of that scheme.
    pub fn assemble(mut cells: Vec<SweepCell>) -> Self {
        // stable sort keeps the noise-spec order within each scheme
        cells.sort_by_key(|c| (!c.zero_stable, c.scheme_index));
        Self { cells }
    }

    /// Mean of the cell means of one group over cells with a finite mean.
    pub fn group_mean(&self, zero_stable: bool) -> Option<f64> {
        let means: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.zero_stable == zero_stable && c.mean_gap.is_finite())
            .map(|c| c.mean_gap)
            .collect();
        if means.is_empty() {
            None
        } else {
            Some(means.iter().sum::<f64>() / means.len() as f64)
        }
    }

    /// Non-zero-stable group mean divided by the zero-stable group mean.
    pub fn group_ratio(&self) -> Option<f64> {
        Some(self.group_mean(false)? / self.group_mean(true)?)
    }
}

/// Runs every `(scheme, spec)` cell sequentially.
pub fn robustness_sweep(schemes: &[Scheme], specs: &[NoiseSpec], config: &SweepConfig) -> Result<SweepReport> {
    SweepPlan::new(schemes, specs, config)?.run()
}
