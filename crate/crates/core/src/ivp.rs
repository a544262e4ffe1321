//! Fixed-step integration of initial-value problems with explicit multistep
//! schemes, plus empirical zero-stability probing and convergence-order
//! estimation.
//!
//! States are indexed `y[0], y[1], ...` at `t[n] = t_start + n * h`. The first
//! `d` states seed the recurrence; each step computes
//! `y[n+1] = sum_i alpha_i y[n-i] + h * beta * f(t[n], y[n])`.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fit::{least_squares_slope, sup_distance};
use crate::scheme::Scheme;
use crate::{Error, Result};

pub type RhsFn = dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync;
pub type ExactFn = dyn Fn(f64, &mut [f64]) + Send + Sync;

/// `y' = f(t, y)` on `[t_start, t_end]` with one or more initial states.
pub struct IvpProblem {
    rhs: Box<RhsFn>,
    t_start: f64,
    t_end: f64,
    initial_states: Vec<Vec<f64>>,
    exact: Option<Box<ExactFn>>,
}

impl core::fmt::Debug for IvpProblem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("IvpProblem")
            .field("t_start", &self.t_start)
            .field("t_end", &self.t_end)
            .field("initial_states", &self.initial_states)
            .field("has_exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl IvpProblem {
    pub fn new<F>(rhs: F, t_start: f64, t_end: f64, y0: Vec<f64>) -> Result<Self>
    where
        F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        if !(t_start.is_finite() && t_end.is_finite() && t_start < t_end) {
            return Err(Error::invalid("problem interval needs finite t_start < t_end"));
        }
        check_states(core::slice::from_ref(&y0))?;
        Ok(Self {
            rhs: Box::new(rhs),
            t_start,
            t_end,
            initial_states: vec![y0],
            exact: None,
        })
    }

    /// Replaces the seed states; `states[q]` is the state at `t_start + q * h`.
    pub fn with_initial_states(mut self, states: Vec<Vec<f64>>) -> Result<Self> {
        check_states(&states)?;
        if states[0].len() != self.dim() {
            return Err(Error::invalid("initial states must keep the problem dimension"));
        }
        self.initial_states = states;
        Ok(self)
    }

    pub fn with_exact<F>(mut self, exact: F) -> Self
    where
        F: Fn(f64, &mut [f64]) + Send + Sync + 'static,
    {
        self.exact = Some(Box::new(exact));
        self
    }

    pub fn dim(&self) -> usize {
        self.initial_states[0].len()
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn initial_states(&self) -> &[Vec<f64>] {
        &self.initial_states
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn rhs(&self, t: f64, y: &[f64], out: &mut [f64]) {
        (self.rhs)(t, y, out)
    }

    pub fn exact_at(&self, t: f64) -> Option<Vec<f64>> {
        self.exact.as_ref().map(|f| {
            let mut out = vec![0.0; self.dim()];
            f(t, &mut out);
            out
        })
    }
}

fn check_states(states: &[Vec<f64>]) -> Result<()> {
    let Some(first) = states.first() else {
        return Err(Error::invalid("at least one initial state is required"));
    };
    if first.is_empty() {
        return Err(Error::invalid("state dimension must be at least 1"));
    }
    if states.iter().any(|s| s.len() != first.len()) {
        return Err(Error::invalid("all initial states must share one dimension"));
    }
    if states.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("initial states must be finite"));
    }
    Ok(())
}

/// Standard test problems.
pub mod presets {
    use super::*;

    /// `y' = -y`, `y(0) = 1`, exact `e^{-t}`, on `[0, 1]`.
    pub fn decay() -> IvpProblem {
        IvpProblem::new(
            |_, y, out| {
                for (o, v) in out.iter_mut().zip(y) {
                    *o = -v;
                }
            },
            0.0,
            1.0,
            vec![1.0],
        )
        .expect("valid preset")
        .with_exact(|t, out| out[0] = libm::exp(-t))
    }

    /// `y' = 0`, `y(0) = c`, on `[0, 1]`.
    pub fn constant(c: Vec<f64>) -> Result<IvpProblem> {
        let c2 = c.clone();
        Ok(IvpProblem::new(|_, _, out| out.fill(0.0), 0.0, 1.0, c)?
            .with_exact(move |_, out| out.copy_from_slice(&c2)))
    }

    /// Plane rotation `y0' = y1`, `y1' = -y0`, `y(0) = (1, 0)`, exact `(cos t, -sin t)`, on `[0, 1]`.
    pub fn oscillator() -> IvpProblem {
        IvpProblem::new(
            |_, y, out| {
                out[0] = y[1];
                out[1] = -y[0];
            },
            0.0,
            1.0,
            vec![1.0, 0.0],
        )
        .expect("valid preset")
        .with_exact(|t, out| {
            out[0] = libm::cos(t);
            out[1] = -libm::sin(t);
        })
    }
}

/// Uniformly spaced solution sequence.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub step_size: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last_state(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }
}

/// The `d` seed states at `t_start, t_start + h, ...`.
///
/// Uses the exact solution when the problem has one. Otherwise keeps the
/// problem's given seeds and extends them with classical fourth-order
/// Runge–Kutta steps.
pub fn startup_states(p: &IvpProblem, h: f64, d: usize) -> Result<Vec<Vec<f64>>> {
    if d == 0 {
        return Err(Error::invalid("scheme order must be at least 1"));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("step size must be positive and finite"));
    }
    if let Some(exact) = &p.exact {
        return Ok((0..d)
            .map(|q| {
                let mut y = vec![0.0; p.dim()];
                exact(p.t_start + q as f64 * h, &mut y);
                y
            })
            .collect());
    }
    let mut states: Vec<Vec<f64>> = p.initial_states.iter().take(d).cloned().collect();
    while states.len() < d {
        let q = states.len() - 1;
        let next = rk4_step(p, p.t_start + q as f64 * h, &states[q], h);
        states.push(next);
    }
    Ok(states)
}

fn rk4_step(p: &IvpProblem, t: f64, y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    p.rhs(t, y, &mut k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    p.rhs(t + 0.5 * h, &tmp, &mut k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    p.rhs(t + 0.5 * h, &tmp, &mut k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    p.rhs(t + h, &tmp, &mut k4);
    (0..n)
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Runs `n_steps` recurrence steps. Seeds come from the problem when it
/// provides at least `d` initial states, otherwise from [`startup_states`].
/// The trajectory holds `n_steps + d` states.
pub fn integrate(s: &Scheme, p: &IvpProblem, h: f64, n_steps: usize) -> Result<Trajectory> {
    let d = s.order();
    let seeds = if p.initial_states.len() >= d {
        p.initial_states[..d].to_vec()
    } else {
        startup_states(p, h, d)?
    };
    integrate_from(s, p, seeds, h, n_steps)
}

/// Like [`integrate`] with explicit seed states (`seeds[q]` at `t_start + q h`).
pub fn integrate_from(
    s: &Scheme,
    p: &IvpProblem,
    seeds: Vec<Vec<f64>>,
    h: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    let d = s.order();
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("step size must be positive and finite"));
    }
    if n_steps == 0 {
        return Err(Error::invalid("n_steps must be at least 1"));
    }
    if seeds.len() != d {
        return Err(Error::invalid(format!(
            "scheme of order {d} needs {d} seed states, got {}",
            seeds.len()
        )));
    }
    check_states(&seeds)?;
    if seeds[0].len() != p.dim() {
        return Err(Error::invalid("seed dimension differs from the problem dimension"));
    }

    let dim = p.dim();
    let total = n_steps + d;
    let mut states = seeds;
    states.reserve(n_steps);
    let mut f = vec![0.0; dim];
    let hb = h * s.beta();
    for n in (d - 1)..(total - 1) {
        let t = p.t_start + n as f64 * h;
        p.rhs(t, &states[n], &mut f);
        let mut next: Vec<f64> = f.iter().map(|v| hb * v).collect();
        for (i, &a) in s.alphas().iter().enumerate() {
            for (acc, v) in next.iter_mut().zip(&states[n - i]) {
                *acc += a * v;
            }
        }
        if next.iter().any(|v| !v.is_finite()) {
            let partial = trajectory(p.t_start, h, states);
            return Err(Error::BlowUp {
                step: n + 1,
                partial: Box::new(partial),
            });
        }
        states.push(next);
    }
    Ok(trajectory(p.t_start, h, states))
}

fn trajectory(t_start: f64, h: f64, states: Vec<Vec<f64>>) -> Trajectory {
    Trajectory {
        times: (0..states.len()).map(|n| t_start + n as f64 * h).collect(),
        states,
        step_size: h,
    }
}

/// Scaled local truncation errors `||y(t[n+1]) - sum_i alpha_i y(t[n-i]) - h beta f(t[n], y(t[n]))||_inf / h`
/// along the exact solution, for `n = d-1 .. d-2+n_steps`. `None` without an exact solution.
pub fn local_truncation_errors(s: &Scheme, p: &IvpProblem, h: f64, n_steps: usize) -> Option<Vec<f64>> {
    p.exact.as_ref()?;
    let d = s.order();
    let at = |n: usize| p.exact_at(p.t_start + n as f64 * h).unwrap();
    let mut f = vec![0.0; p.dim()];
    Some(
        ((d - 1)..(d - 1 + n_steps))
            .map(|n| {
                let yn = at(n);
                p.rhs(p.t_start + n as f64 * h, &yn, &mut f);
                let mut predicted: Vec<f64> = f.iter().map(|v| h * s.beta() * v).collect();
                for (i, &a) in s.alphas().iter().enumerate() {
                    let past = at(n - i);
                    for (acc, v) in predicted.iter_mut().zip(&past) {
                        *acc += a * v;
                    }
                }
                sup_distance(&at(n + 1), &predicted) / h
            })
            .collect(),
    )
}

/// Sup-norm gaps between an unperturbed and a perturbed run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DivergenceSeries {
    /// `||y[n] - y_hat[n]||_inf` for every index of the shorter finite run.
    pub per_step: Vec<f64>,
    /// Largest sup-norm gap among the `d` seed states.
    pub initial_gap: f64,
    /// `max_n per_step[n] / initial_gap`: the observed stability constant.
    pub amplification: f64,
    /// Step index at which either run produced a non-finite state.
    pub blew_up_at: Option<usize>,
    /// Times matching `per_step`.
    pub times: Vec<f64>,
}

/// Integrates twice, once from the seed states and once with every seed
/// shifted by `eps * u`, where `u` is a seeded random direction with
/// `||u||_inf = 1`.
pub fn zero_stability_probe(
    s: &Scheme,
    p: &IvpProblem,
    eps: f64,
    h: f64,
    n_steps: usize,
    seed: u64,
) -> Result<DivergenceSeries> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid("perturbation size must be positive"));
    }
    let d = s.order();
    let seeds = if p.initial_states.len() >= d {
        p.initial_states[..d].to_vec()
    } else {
        startup_states(p, h, d)?
    };
    let direction = probe_direction(p.dim(), seed);
    let perturbed: Vec<Vec<f64>> = seeds
        .iter()
        .map(|y| y.iter().zip(&direction).map(|(v, u)| v + eps * u).collect())
        .collect();
    let initial_gap = seeds
        .iter()
        .zip(&perturbed)
        .map(|(a, b)| sup_distance(a, b))
        .fold(0.0, f64::max);

    let (base, base_blow) = run_flagged(s, p, seeds, h, n_steps)?;
    let (pert, pert_blow) = run_flagged(s, p, perturbed, h, n_steps)?;
    let len = base.len().min(pert.len());
    let per_step: Vec<f64> = (0..len)
        .map(|n| sup_distance(&base.states[n], &pert.states[n]))
        .collect();
    let blew_up_at = match (base_blow, pert_blow) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let peak = per_step.iter().copied().fold(0.0, f64::max);
    Ok(DivergenceSeries {
        times: base.times[..len].to_vec(),
        per_step,
        initial_gap,
        amplification: if blew_up_at.is_some() {
            f64::INFINITY
        } else {
            peak / initial_gap
        },
        blew_up_at,
    })
}

fn run_flagged(
    s: &Scheme,
    p: &IvpProblem,
    seeds: Vec<Vec<f64>>,
    h: f64,
    n_steps: usize,
) -> Result<(Trajectory, Option<usize>)> {
    match integrate_from(s, p, seeds, h, n_steps) {
        Ok(t) => Ok((t, None)),
        Err(Error::BlowUp { step, partial }) => Ok((*partial, Some(step))),
        Err(e) => Err(e),
    }
}

fn probe_direction(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let max = u.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max);
    if max == 0.0 {
        u[0] = 1.0;
    } else {
        u.iter_mut().for_each(|v| *v /= max);
    }
    u
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConvergenceEstimate {
    /// Least-squares slope of `ln(error)` against `ln(h)`; `NaN` when fewer
    /// than two finite errors exist.
    pub order: f64,
    /// `(h, global error at t_end)` pairs; the error is infinite after a blow-up.
    pub samples: Vec<(f64, f64)>,
    /// Some error is at rounding level, so the slope may be unreliable.
    pub rounding_limited: bool,
    /// Some run blew up.
    pub diverged: bool,
}

/// Estimates the global convergence order from errors at `t_end`.
pub fn convergence_order(s: &Scheme, p: &IvpProblem, h_list: &[f64]) -> Result<ConvergenceEstimate> {
    if !p.has_exact() {
        return Err(Error::invalid("convergence order needs an exact solution"));
    }
    if h_list.len() < 3 {
        return Err(Error::invalid("convergence order needs at least three step sizes"));
    }
    if h_list.iter().any(|h| !(*h > 0.0 && h.is_finite())) || h_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("step sizes must be positive and strictly decreasing"));
    }
    let span = p.t_end - p.t_start;
    let exact_end = p.exact_at(p.t_end).unwrap();
    let scale = exact_end.iter().map(|v| libm::fabs(*v)).fold(1.0, f64::max);
    let d = s.order();

    let mut samples = Vec::with_capacity(h_list.len());
    let mut diverged = false;
    for &h in h_list {
        let intervals = libm::round(span / h);
        if libm::fabs(intervals * h - span) > 1e-9 * span {
            return Err(Error::invalid(format!("step {h} does not divide the interval")));
        }
        let intervals = intervals as usize;
        if intervals < d {
            return Err(Error::invalid(format!("step {h} leaves fewer grid points than seeds")));
        }
        let seeds = startup_states(p, h, d)?;
        let error = if intervals + 1 == d {
            0.0
        } else {
            match integrate_from(s, p, seeds, h, intervals + 1 - d) {
                Ok(traj) => sup_distance(traj.last_state().unwrap(), &exact_end),
                Err(Error::BlowUp { .. }) => {
                    diverged = true;
                    f64::INFINITY
                }
                Err(e) => return Err(e),
            }
        };
        samples.push((h, error));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = samples
        .iter()
        .filter(|(_, e)| e.is_finite() && *e > 0.0)
        .map(|(h, e)| (libm::log(*h), libm::log(*e)))
        .unzip();
    let rounding_limited = samples.iter().any(|(_, e)| *e < 1e-12 * scale);
    Ok(ConvergenceEstimate {
        order: least_squares_slope(&xs, &ys),
        samples,
        rounding_limited,
        diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{first_order, make_scheme};
    use crate::zeros::{zerosnet_coeffs, ZeroSLambda};

    fn optimal() -> Scheme {
        zerosnet_coeffs(ZeroSLambda::optimal())
    }

    #[test]
    fn one_euler_step() {
        let p = presets::decay();
        let t = integrate(&first_order(1.0).unwrap(), &p, 0.1, 1).unwrap();
        assert_eq!(t.len(), 2);
        assert!((t.states[1][0] - 0.9).abs() < 1e-15);
        assert_eq!(t.times, vec![0.0, 0.1]);
    }

    #[test]
    fn pure_two_cycle() {
        let p = presets::constant(vec![0.0])
            .unwrap()
            .with_initial_states(vec![vec![3.0], vec![7.0]])
            .unwrap();
        let s = make_scheme(&[0.0, 1.0], 0.0).unwrap();
        let t = integrate(&s, &p, 0.1, 6).unwrap();
        let seq: Vec<f64> = t.states.iter().map(|y| y[0]).collect();
        assert_eq!(seq, vec![3.0, 7.0, 3.0, 7.0, 3.0, 7.0, 3.0, 7.0]);
    }

    #[test]
    fn optimal_member_tracks_decay() {
        let p = presets::decay();
        // seeds at t = 0, 0.01, 0.02; 98 steps reach t = 1
        let t = integrate(&optimal(), &p, 0.01, 98).unwrap();
        assert_eq!(t.len(), 101);
        assert!((t.times[100] - 1.0).abs() < 1e-12);
        assert!((t.states[100][0] - (-1.0f64).exp()).abs() < 1e-3);
    }

    #[test]
    fn startup_examples() {
        let s = startup_states(&presets::decay(), 0.1, 3).unwrap();
        assert_eq!(s, vec![vec![1.0], vec![(-0.1f64).exp()], vec![(-0.2f64).exp()]]);

        let flat = IvpProblem::new(|_, _, out| out.fill(0.0), 0.0, 1.0, vec![2.5]).unwrap();
        assert_eq!(startup_states(&flat, 0.1, 3).unwrap(), vec![vec![2.5]; 3]);

        let decay = IvpProblem::new(|_, y, out| out[0] = -y[0], 0.0, 1.0, vec![1.0]).unwrap();
        let s = startup_states(&decay, 0.1, 2).unwrap();
        assert!((s[1][0] - (-0.1f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn blow_up_is_reported_with_step() {
        let p = presets::constant(vec![1.0]).unwrap();
        let s = first_order(1e200).unwrap();
        match integrate(&s, &p, 0.1, 10) {
            Err(Error::BlowUp { step, partial }) => {
                assert_eq!(step, 2);
                assert_eq!(partial.len(), 2);
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = presets::decay();
        let s = first_order(1.0).unwrap();
        assert!(integrate(&s, &p, 0.0, 1).is_err());
        assert!(integrate(&s, &p, 0.1, 0).is_err());
        assert!(IvpProblem::new(|_, _, _| {}, 1.0, 0.0, vec![1.0]).is_err());
        assert!(IvpProblem::new(|_, _, _| {}, 0.0, 1.0, vec![]).is_err());
        assert!(presets::decay()
            .with_initial_states(vec![vec![1.0], vec![1.0, 2.0]])
            .is_err());
        assert!(zero_stability_probe(&s, &p, 0.0, 0.1, 1, 1).is_err());
    }

    #[test]
    fn identity_probe_is_flat() {
        let p = presets::constant(vec![0.0]).unwrap();
        let d = zero_stability_probe(&first_order(1.0).unwrap(), &p, 1e-3, 0.1, 20, 1).unwrap();
        assert!((d.initial_gap - 1e-3).abs() < 1e-18);
        assert!(d.per_step.iter().all(|g| (g - 1e-3).abs() < 1e-15));
        assert!((d.amplification - 1.0).abs() < 1e-12);
        assert_eq!(d.per_step.len(), 21);
    }

    #[test]
    fn doubling_probe_grows_geometrically() {
        let p = presets::constant(vec![0.0]).unwrap();
        let d = zero_stability_probe(&first_order(2.0).unwrap(), &p, 1e-3, 0.1, 20, 1).unwrap();
        for (n, g) in d.per_step.iter().enumerate() {
            let expected = 1e-3 * 2f64.powi(n as i32);
            assert!((g - expected).abs() <= 1e-12 * expected);
        }
        assert!((d.amplification - 2f64.powi(20)).abs() < 1e-6);
    }

    #[test]
    fn optimal_member_probe_is_bounded() {
        let d = zero_stability_probe(&optimal(), &presets::decay(), 1e-3, 0.01, 100, 1).unwrap();
        assert!(d.amplification <= 3.0, "{}", d.amplification);
        assert!(d.blew_up_at.is_none());
    }

    #[test]
    fn probe_flags_blow_up() {
        let p = presets::constant(vec![1.0]).unwrap();
        let d = zero_stability_probe(&first_order(1e200).unwrap(), &p, 1e-3, 0.1, 5, 1).unwrap();
        assert_eq!(d.blew_up_at, Some(2));
        assert!(d.amplification.is_infinite());
    }

    #[test]
    fn probe_multidimensional_direction_is_unit_sup_norm() {
        let d = zero_stability_probe(&first_order(1.0).unwrap(), &presets::oscillator(), 1e-3, 0.01, 5, 9).unwrap();
        assert!((d.initial_gap - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn convergence_orders() {
        let hs = [0.02, 0.01, 0.005];
        let euler = convergence_order(&first_order(1.0).unwrap(), &presets::decay(), &hs).unwrap();
        assert!((euler.order - 1.0).abs() <= 0.2, "{}", euler.order);
        let opt = convergence_order(&optimal(), &presets::decay(), &hs).unwrap();
        assert!((opt.order - 2.0).abs() <= 0.3, "{}", opt.order);
        assert!(!opt.rounding_limited);
        for w in opt.samples.windows(2) {
            let ratio = w[0].1 / w[1].1;
            assert!((3.4..=4.6).contains(&ratio), "halving h reduced the error by {ratio}");
        }

        let bad = make_scheme(&[1.0, 1.0, 1.0], 1.0).unwrap();
        let est = convergence_order(&bad, &presets::decay(), &hs).unwrap();
        assert!(est.order < 0.0, "{}", est.order);
        assert!(est.samples.windows(2).all(|w| w[1].1 > w[0].1));
    }

    #[test]
    fn convergence_needs_exact_and_valid_steps() {
        let s = first_order(1.0).unwrap();
        let no_exact = IvpProblem::new(|_, y, o| o[0] = -y[0], 0.0, 1.0, vec![1.0]).unwrap();
        assert!(convergence_order(&s, &no_exact, &[0.1, 0.05, 0.025]).is_err());
        assert!(convergence_order(&s, &presets::decay(), &[0.1, 0.05]).is_err());
        assert!(convergence_order(&s, &presets::decay(), &[0.05, 0.1, 0.025]).is_err());
        assert!(convergence_order(&s, &presets::decay(), &[0.3, 0.2, 0.1]).is_err());
    }

    #[test]
    fn constant_flow_is_reproduced_exactly() {
        for s in [optimal(), first_order(1.0).unwrap(), make_scheme(&[2.25, -2.0, 0.75], 0.5).unwrap()] {
            let p = presets::constant(vec![0.3, -1.7]).unwrap();
            let t = integrate(&s, &p, 0.05, 200).unwrap();
            assert!(t.states.iter().all(|y| (y[0] - 0.3).abs() < 1e-13 && (y[1] + 1.7).abs() < 1e-13));
        }
    }

    #[test]
    fn truncation_errors_vanish_for_consistent_schemes() {
        let p = presets::decay();
        let coarse = local_truncation_errors(&optimal(), &p, 0.02, 10).unwrap();
        let fine = local_truncation_errors(&optimal(), &p, 0.01, 10).unwrap();
        let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        assert!(max(&fine) < max(&coarse) / 3.0);
        let inconsistent = make_scheme(&[0.1, 0.2, 0.3], 0.4).unwrap();
        let tau = local_truncation_errors(&inconsistent, &p, 0.001, 5).unwrap();
        assert!(tau[0] > 100.0);
        let no_exact = IvpProblem::new(|_, _, _| {}, 0.0, 1.0, vec![1.0]).unwrap();
        assert!(local_truncation_errors(&optimal(), &no_exact, 0.1, 2).is_none());
    }
}
