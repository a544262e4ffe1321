use std::path::Path;

use anyhow::Context;
use rayon::prelude::*;
use zerostab_core::propagation::{SweepCell, SweepConfig, SweepPlan, SweepReport};
use zerostab_core::reference::{check_row, modulus_rows, ModulusRow};
use zerostab_core::{
    convergence_order, integrate, scan_region_with, zero_stability_probe, zerosnet_coeffs, Error, IvpProblem,
    NoiseKind, NoiseSpec, Scheme, ZeroSLambda, DEFAULT_CONSISTENCY_TOL,
};

use crate::args::{
    parse_number, AnalyzeArgs, IntegrateArgs, Preset, PropagateArgs, ScanArgs, SchemeArgs, TableArgs,
};
use crate::error::CliError;
use crate::expr;
use crate::output::{emit, format_number, join_numbers, Cell, Table};

/// Amplification ratio above which a probe is reported as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 10.0;

fn resolve_scheme(args: &SchemeArgs) -> Result<(Scheme, Option<f64>), CliError> {
    match (&args.alphas, args.beta, args.lambda) {
        (Some(alphas), Some(beta), None) => Ok((Scheme::new(alphas.clone(), beta)?, None)),
        (None, None, Some(l)) => Ok((zerosnet_coeffs(ZeroSLambda::new(l)?), Some(l))),
        (Some(_), None, None) => Err(CliError::Usage("--alphas needs --beta".into())),
        _ => Err(CliError::Usage("give either --alphas with --beta, or --lambda".into())),
    }
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}_{i}")).collect()
}

pub fn analyze(a: &AnalyzeArgs) -> Result<(), CliError> {
    let (scheme, lambda) = resolve_scheme(&a.scheme)?;
    let report = scheme.root_condition(a.tol)?;
    let cons = scheme.consistency(DEFAULT_CONSISTENCY_TOL);
    let d = scheme.order();

    let mut columns = vec!["lambda".to_string()];
    columns.extend(numbered("alpha", d));
    columns.push("beta".into());
    columns.extend(numbered("modulus", d));
    columns.extend(["zero_stable", "consistent", "alpha_sum", "beta_moment", "violations"].map(String::from));
    let mut table = Table::new(columns);
    let mut row = vec![Cell::from(lambda)];
    row.extend(scheme.alphas().iter().map(|&v| Cell::Num(v)));
    row.push(scheme.beta().into());
    row.extend(report.moduli.iter().map(|&m| Cell::Num(m)));
    row.extend([
        report.zero_stable.into(),
        cons.consistent.into(),
        cons.sum_alpha.into(),
        cons.moment.into(),
        report.violation_messages().join("; ").into(),
    ]);
    table.push(row);
    emit(&table, &a.output)?;

    eprintln!("scheme: {scheme}");
    eprintln!("moduli: {}", report.moduli.iter().map(|m| format!("{m:.2}")).collect::<Vec<_>>().join(", "));
    eprintln!("zero_stable={} consistent={}", report.zero_stable, cons.consistent);
    for v in report.violation_messages() {
        eprintln!("violation: {v}");
    }
    if let Some(l) = lambda.and_then(|l| ZeroSLambda::new(l).ok()).filter(|l| l.is_boundary()) {
        eprintln!(
            "note: lambda={} is an endpoint of the open stability interval; the verdict rests on unit-modulus roots",
            l.value()
        );
    }
    if a.strict && !report.zero_stable {
        return Err(CliError::NotZeroStable);
    }
    Ok(())
}

pub fn lambda_scan(a: &ScanArgs) -> Result<(), CliError> {
    let scan = scan_region_with(a.lambda_min, a.lambda_max, a.step, a.tol)?;
    let mut table = Table::new([
        "lambda",
        "alpha_0",
        "alpha_1",
        "alpha_2",
        "beta",
        "max_nonprincipal_modulus",
        "zero_stable",
    ]);
    for p in &scan.grid {
        let al = p.scheme.alphas();
        table.push(vec![
            p.lambda.into(),
            al[0].into(),
            al[1].into(),
            al[2].into(),
            p.scheme.beta().into(),
            p.max_modulus.into(),
            p.zero_stable.into(),
        ]);
    }
    emit(&table, &a.output)?;

    let stable = scan.grid.iter().filter(|p| p.zero_stable).count();
    eprintln!(
        "points={} zero_stable={} excluded={}",
        scan.grid.len(),
        stable,
        scan.excluded.len()
    );
    match scan.argmin_point() {
        Some(p) => eprintln!(
            "argmin lambda={} max_nonprincipal_modulus={}",
            format_number(p.lambda),
            format_number(p.max_modulus)
        ),
        None => eprintln!("argmin: no zero-stable grid point"),
    }
    Ok(())
}

fn read_fixture(path: &Path) -> Result<Vec<ModulusRow>, CliError> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening fixture {}", path.display()))?;
    let headers = reader.headers().context("reading fixture header")?.clone();
    let find = |prefix: &str| -> Vec<usize> {
        headers
            .iter()
            .enumerate()
            .filter(|(_, h)| h.trim().starts_with(prefix))
            .map(|(i, _)| i)
            .collect()
    };
    let alpha_cols = find("alpha_");
    let modulus_cols = find("modulus_");
    let beta_col = headers.iter().position(|h| h.trim() == "beta");
    let zs_col = headers.iter().position(|h| h.trim() == "zero_stable");
    let (Some(beta_col), Some(zs_col)) = (beta_col, zs_col) else {
        return Err(CliError::Usage("fixture needs beta and zero_stable columns".into()));
    };
    if alpha_cols.is_empty() || alpha_cols.len() != modulus_cols.len() {
        return Err(CliError::Usage("fixture needs matching alpha_* and modulus_* columns".into()));
    }
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("reading fixture row {}", n + 1))?;
        let num = |i: usize| {
            parse_number(record.get(i).unwrap_or("")).map_err(|e| CliError::Usage(format!("fixture row {}: {e}", n + 1)))
        };
        let alphas = alpha_cols.iter().map(|&i| num(i)).collect::<Result<Vec<_>, _>>()?;
        let moduli = modulus_cols.iter().map(|&i| num(i)).collect::<Result<Vec<_>, _>>()?;
        let zero_stable = match record.get(zs_col).unwrap_or("").trim().to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" => true,
            "false" | "no" | "0" => false,
            other => return Err(CliError::Usage(format!("fixture row {}: bad zero_stable {other:?}", n + 1))),
        };
        rows.push(ModulusRow::new(&alphas, num(beta_col)?, &moduli, zero_stable));
    }
    if rows.is_empty() {
        return Err(CliError::Usage("fixture has no rows".into()));
    }
    Ok(rows)
}

pub fn table_verify(a: &TableArgs) -> Result<(), CliError> {
    let rows = match &a.fixture {
        Some(path) => read_fixture(path)?,
        None => modulus_rows(),
    };
    let d = rows.iter().map(|r| r.alphas.len()).max().unwrap_or(0);
    let mut columns = vec!["row".to_string()];
    columns.extend(numbered("alpha", d));
    columns.push("beta".into());
    columns.extend(numbered("computed", d));
    columns.extend(numbered("expected", d));
    columns.extend(["computed_zero_stable", "expected_zero_stable", "pass"].map(String::from));
    let mut table = Table::new(columns);

    let mut failures = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let check = check_row(row, a.tol)?;
        let pad = |v: &[f64]| -> Vec<Cell> {
            (0..d).map(|k| v.get(k).map_or(Cell::Empty, |x| Cell::Num(*x))).collect()
        };
        let mut cells = vec![Cell::from(i + 1)];
        cells.extend(pad(&row.alphas));
        cells.push(row.beta.into());
        cells.extend(pad(&check.computed));
        cells.extend(pad(&check.expected));
        cells.extend([
            check.computed_zero_stable.into(),
            row.zero_stable.into(),
            check.passed().into(),
        ]);
        table.push(cells);
        if !check.passed() {
            failures.push(format!(
                "row {}: computed moduli [{}] zero_stable={}, expected [{}] zero_stable={}",
                i + 1,
                join_numbers(&check.computed),
                check.computed_zero_stable,
                join_numbers(&check.expected),
                row.zero_stable
            ));
        }
    }
    emit(&table, &a.output)?;
    let passed = rows.len() - failures.len();
    eprintln!("{passed}/{} rows pass", rows.len());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failures.join("\n")))
    }
}

fn build_problem(a: &IntegrateArgs) -> Result<IvpProblem, CliError> {
    match (a.preset, &a.rhs) {
        (Some(Preset::Decay), None) => Ok(zerostab_core::ivp::presets::decay()),
        (Some(Preset::Oscillator), None) => Ok(zerostab_core::ivp::presets::oscillator()),
        (Some(Preset::Constant), None) => {
            let y0 = a.y0.clone().unwrap_or_else(|| vec![1.0]);
            Ok(zerostab_core::ivp::presets::constant(y0)?)
        }
        (None, Some(text)) => {
            let y0 = a.y0.clone().unwrap_or_else(|| vec![1.0]);
            if y0.len() != 1 {
                return Err(CliError::Usage("--rhs problems are scalar; give one --y0 value".into()));
            }
            let f = expr::compile(text).map_err(|e| CliError::Usage(format!("--rhs: {e}")))?;
            Ok(IvpProblem::new(move |t, y, out| out[0] = f.eval(t, y[0]), a.t0, a.t1, y0)?)
        }
        _ => Err(CliError::Usage("give one of --preset or --rhs".into())),
    }
}

pub fn integrate_cmd(a: &IntegrateArgs) -> Result<(), CliError> {
    let (scheme, _) = resolve_scheme(&a.scheme)?;
    let problem = build_problem(a)?;
    if !(a.h > 0.0) {
        return Err(CliError::Usage("--h must be positive".into()));
    }
    let d = scheme.order();
    let steps = match a.steps {
        Some(n) => n,
        None => ((problem.t_end() - problem.t_start()) / a.h).round() as usize,
    };
    if steps < d {
        return Err(CliError::Usage(format!("--steps must be at least the scheme order {d}")));
    }
    let n_steps = steps + 1 - d;

    let (traj, blew_up) = match integrate(&scheme, &problem, a.h, n_steps) {
        Ok(t) => (t, None),
        Err(Error::BlowUp { step, partial }) => (*partial, Some(step)),
        Err(e) => return Err(e.into()),
    };
    let dim = problem.dim();
    let mut columns = vec!["step".to_string(), "t".to_string()];
    columns.extend(numbered("y", dim));
    if problem.has_exact() {
        columns.extend(numbered("exact", dim));
        columns.push("error".into());
    }
    let mut table = Table::new(columns);
    for (n, (t, y)) in traj.times.iter().zip(&traj.states).enumerate() {
        let mut row = vec![Cell::from(n), Cell::Num(*t)];
        row.extend(y.iter().map(|&v| Cell::Num(v)));
        if let Some(exact) = problem.exact_at(*t) {
            let err = y.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            row.extend(exact.iter().map(|&v| Cell::Num(v)));
            row.push(err.into());
        }
        table.push(row);
    }
    emit(&table, &a.output)?;

    let report = scheme.root_condition(zerostab_core::DEFAULT_STABILITY_TOL)?;
    eprintln!("scheme: {scheme} zero_stable={}", report.zero_stable);
    let last_t = *traj.times.last().expect("trajectory holds the seeds");
    let last = traj.last_state().expect("trajectory holds the seeds");
    eprintln!("final t={} y=[{}]", format_number(last_t), join_numbers(last));
    if let Some(exact) = problem.exact_at(last_t) {
        let err = last.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        eprintln!("final error={}", format_number(err));
    }
    if let Some(step) = blew_up {
        eprintln!("integration blew up at step {step}");
    }

    if let Some(eps) = a.probe {
        let probe = zero_stability_probe(&scheme, &problem, eps, a.h, n_steps, a.seed)?;
        let growth = zerostab_core::fit::log_slope(&probe.per_step, 0, 2).map(f64::exp);
        let divergent = probe.blew_up_at.is_some() || probe.amplification > DIVERGENCE_THRESHOLD;
        eprintln!(
            "probe eps={} initial_gap={} amplification={} growth_per_step={} verdict={}",
            format_number(eps),
            format_number(probe.initial_gap),
            format_number(probe.amplification),
            growth.map_or_else(|| "NaN".into(), format_number),
            if divergent { "divergent" } else { "bounded" }
        );
    }
    if let Some(hs) = &a.orders {
        if !problem.has_exact() {
            return Err(CliError::Usage("--orders needs a preset with an exact solution".into()));
        }
        let est = convergence_order(&scheme, &problem, hs)?;
        for (h, e) in &est.samples {
            eprintln!("orders h={} error={}", format_number(*h), format_number(*e));
        }
        eprintln!(
            "order={} rounding_limited={} diverged={}",
            format_number(est.order),
            est.rounding_limited,
            est.diverged
        );
    }
    if blew_up.is_some() {
        return Err(CliError::Verification("integration produced non-finite states".into()));
    }
    if a.strict && !report.zero_stable {
        return Err(CliError::NotZeroStable);
    }
    Ok(())
}

fn sweep_schemes(a: &PropagateArgs) -> Result<Vec<(String, Scheme)>, CliError> {
    let mut schemes = Vec::new();
    if a.table8 {
        for (i, row) in modulus_rows().iter().enumerate() {
            schemes.push((format!("row{}", i + 1), row.scheme()?));
        }
    }
    for &l in &a.lambda {
        schemes.push((format!("lambda={}", format_number(l)), zerosnet_coeffs(ZeroSLambda::new(l)?)));
    }
    if let (Some(alphas), Some(beta)) = (&a.alphas, a.beta) {
        schemes.push(("custom".into(), Scheme::new(alphas.clone(), beta)?));
    }
    if schemes.is_empty() {
        return Err(CliError::Usage("give at least one of --table8, --lambda, --alphas/--beta".into()));
    }
    Ok(schemes)
}

pub fn propagate(a: &PropagateArgs) -> Result<(), CliError> {
    let schemes = sweep_schemes(a)?;
    if a.noise.is_empty() {
        return Err(CliError::Usage("give at least one --noise".into()));
    }
    let specs = a
        .noise
        .iter()
        .map(|n| {
            let kind: NoiseKind = n.parse()?;
            NoiseSpec::new(kind, a.clip)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let config = SweepConfig {
        depth: a.depth as usize,
        width: a.width as usize,
        trials: a.trials as usize,
        seed: a.seed,
        h: a.h,
        shared_block: a.shared_block,
        output_scale: a.output_scale,
        tol: a.tol,
    };
    let plain: Vec<Scheme> = schemes.iter().map(|(_, s)| s.clone()).collect();
    let plan = SweepPlan::new(&plain, &specs, &config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads.unwrap_or(0))
        .build()
        .context("starting worker threads")?;
    let m = plan.n_specs();
    let cells: Vec<SweepCell> = pool
        .install(|| {
            (0..plan.n_schemes() * m)
                .into_par_iter()
                .map(|k| plan.cell(k / m, k % m))
                .collect::<Result<Vec<_>, _>>()
        })?;
    let report = SweepReport::assemble(cells);

    let mut table = Table::new([
        "scheme_id",
        "coefficients",
        "zero_stable",
        "noise_kind",
        "noise_param",
        "mean_gap",
        "std_gap",
        "blew_up_fraction",
    ]);
    for c in &report.cells {
        table.push(vec![
            schemes[c.scheme_index].0.clone().into(),
            format!("{}|{}", join_numbers(c.scheme.alphas()), format_number(c.scheme.beta())).into(),
            c.zero_stable.into(),
            c.noise.kind.name().into(),
            c.noise.kind.param().into(),
            c.mean_gap.into(),
            c.std_gap.into(),
            c.blew_up_fraction.into(),
        ]);
    }
    emit(&table, &a.output)?;

    let show = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), format_number);
    eprintln!(
        "zero_stable_mean_gap={} non_zero_stable_mean_gap={} ratio={}",
        show(report.group_mean(true)),
        show(report.group_mean(false)),
        show(report.group_ratio())
    );
    Ok(())
}
