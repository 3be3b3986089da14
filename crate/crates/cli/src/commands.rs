use std::f64::consts::FRAC_PI_2;
use std::ops::RangeInclusive;
use std::time::Instant;

use rayon::prelude::*;

use cubelab_core::asymptotics::Series;
use cubelab_core::checks::{random_function, seeded};
use cubelab_core::constants::SQRT_2PI;
use cubelab_core::dualnorm::{
    alternating_ascent, best_of, plan_starts, DualNormReport, MultistartConfig, MULTISTART_MAX_N,
};
use cubelab_core::kernel::kernel_table;
use cubelab_core::khintchine::{certify_epsilon, improved_cdual_bound, q_lower, KhintchineConfig};
use cubelab_core::profile::{
    defect_grid, mb_functional_of, mb_profile, min_two_point_defect, open_grid, power_family,
    symmetric_set_constants, two_point_curvature_fails, two_value_constant, unit_grid,
};
use cubelab_core::SphereVector;

use crate::args::*;
use crate::error::CliError;
use crate::table::{Cell, Table};

/// A command's rows plus any assertion it failed; rows are written either way.
#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub failures: Vec<String>,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self { table, failures: Vec::new() }
    }
}

/// Multistart for one `n` with restarts spread over the current rayon pool.
/// Results are reduced in start order, so the answer does not depend on the
/// thread count. Random restarts not yet begun when `deadline` passes are
/// skipped and the second value is `true`.
pub fn multistart_parallel(
    n: usize,
    config: &MultistartConfig,
    previous: Option<&SphereVector>,
    deadline: Option<Instant>,
) -> Result<(DualNormReport, bool), CliError> {
    let table = kernel_table(n)?;
    let starts = plan_starts(n, config, previous)?;
    let structured = if config.structured_starts { n + 1 + previous.is_some() as usize } else { 0 };
    let outcomes: Vec<_> = starts
        .par_iter()
        .enumerate()
        .map(|(j, s)| {
            if j >= structured && deadline.is_some_and(|d| Instant::now() > d) {
                None
            } else {
                Some(alternating_ascent(&table, s))
            }
        })
        .collect();
    let truncated = outcomes.iter().any(Option::is_none);
    Ok((best_of(n, config, outcomes.into_iter().flatten())?, truncated))
}

/// Rows for every `n` in `range`, each seeded with the previous optimizer.
pub fn dual_reports(
    range: RangeInclusive<usize>,
    config: &MultistartConfig,
    deadline: Option<Instant>,
) -> Result<(Vec<DualNormReport>, bool), CliError> {
    if *range.end() > MULTISTART_MAX_N {
        return Err(CliError::Usage(format!("n must be at most {MULTISTART_MAX_N}")));
    }
    let first = if config.structured_starts { 1 } else { *range.start() };
    let mut previous: Option<SphereVector> = None;
    let mut rows = Vec::new();
    let mut truncated = false;
    for n in first..=*range.end() {
        let (report, cut) = multistart_parallel(n, config, previous.as_ref(), deadline)?;
        truncated |= cut;
        previous = Some(report.lambda.clone());
        if range.contains(&n) {
            rows.push(report);
        }
    }
    Ok((rows, truncated))
}

pub fn dual(args: &DualArgs, seed: u64, deadline: Option<Instant>) -> Result<Outcome, CliError> {
    let config =
        MultistartConfig { restarts: args.restarts, seed, structured_starts: !args.no_structured };
    let (reports, truncated) = dual_reports(args.n.clone(), &config, deadline)?;
    if truncated {
        eprintln!("warning: time budget reached; some random restarts were skipped");
    }
    let mut table = Table::new(&["n", "value", "certified", "restarts", "seed"]);
    let mut failures = Vec::new();
    for r in &reports {
        table.push(vec![r.n.into(), r.value.into(), r.certified.into(), r.restarts.into(), r.seed.into()]);
        if !(r.value >= 1.0 - 1e-12 && r.value < FRAC_PI_2) {
            failures.push(format!("n = {}: value {} outside [1, π/2)", r.n, r.value));
        }
    }
    for w in reports.windows(2) {
        if w[1].value < w[0].value - 1e-9 {
            failures.push(format!("value decreases from n = {} to n = {}", w[0].n, w[1].n));
        }
    }
    Ok(Outcome { table, failures })
}

pub fn kernel(args: &KernelArgs) -> Result<Outcome, CliError> {
    let t = kernel_table(args.n)?;
    let mut table = Table::new(&[
        "k",
        "m_plus_num",
        "m_plus_den",
        "m_minus_num",
        "m_minus_den",
        "m_plus",
        "m_minus",
    ]);
    for k in 0..=args.n {
        let plus = (k < args.n).then(|| t.m_plus(k));
        let minus = (k >= 1).then(|| t.m_minus(k));
        table.push(vec![
            k.into(),
            plus.map(|r| r.numer().to_string()).into(),
            plus.map(|r| r.denom().to_string()).into(),
            minus.map(|r| r.numer().to_string()).into(),
            minus.map(|r| r.denom().to_string()).into(),
            plus.map(|_| t.m_plus_f64(k)).into(),
            minus.map(|_| t.m_minus_f64(k)).into(),
        ]);
    }
    Ok(Outcome::ok(table))
}

fn check_p(p: f64, open_left: bool) -> Result<(), CliError> {
    let ok = if open_left { p > 0.5 && p < 1.0 } else { (0.5..1.0).contains(&p) };
    if !ok {
        let interval = if open_left { "(1/2, 1)" } else { "[1/2, 1)" };
        return Err(CliError::Usage(format!("p = {p} is outside {interval}")));
    }
    Ok(())
}

pub fn khintchine(args: &KhintchineArgs, seed: u64) -> Result<Outcome, CliError> {
    for &p in &args.p {
        check_p(p, false)?;
    }
    let config = KhintchineConfig { restarts: args.restarts, seed };
    let rows: Vec<_> = args
        .p
        .par_iter()
        .map(|&p| q_lower(p, args.n, &config).map(|(_, q)| (p, q, certify_epsilon(p, args.theta).ok())))
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["p", "q_lower", "n_used", "q_upper", "epsilon", "branch2"]);
    let mut failures = Vec::new();
    for (p, q, cert) in rows {
        if let Some(c) = &cert {
            if q > c.q_upper + 1e-12 {
                failures.push(format!("p = {p}: q_lower {q} exceeds q_upper {}", c.q_upper));
            }
        }
        table.push(vec![
            p.into(),
            q.into(),
            args.n.into(),
            cert.map(|c| c.q_upper).into(),
            cert.map(|c| c.epsilon).into(),
            cert.map(|c| c.branch2).into(),
        ]);
    }
    Ok(Outcome { table, failures })
}

pub fn certify(args: &CertifyArgs) -> Result<Outcome, CliError> {
    for &p in &args.p {
        check_p(p, true)?;
    }
    let mut table = Table::new(&[
        "p",
        "certified",
        "epsilon",
        "b_bound",
        "branch1",
        "branch2",
        "q_upper",
        "theta",
        "eighth_moment_bound",
        "var_lower",
        "gap",
        "epsilon_gap",
        "epsilon_pz",
        "concentration",
        "pz_mass",
        "error",
    ]);
    let mut failures = Vec::new();
    for &p in &args.p {
        match certify_epsilon(p, args.theta) {
            Ok(c) => {
                let a = c.audit;
                table.push(vec![
                    p.into(),
                    true.into(),
                    c.epsilon.into(),
                    c.b_bound.into(),
                    c.branch1.into(),
                    c.branch2.into(),
                    c.q_upper.into(),
                    a.theta.into(),
                    a.eighth_moment_bound.into(),
                    a.var_lower.into(),
                    a.gap.into(),
                    a.epsilon_gap.into(),
                    a.epsilon_pz.into(),
                    a.concentration.into(),
                    a.pz_mass.into(),
                    Cell::Empty,
                ]);
            }
            Err(e) => {
                failures.push(format!("p = {p}: {e}"));
                let mut row = vec![p.into(), false.into()];
                row.extend(std::iter::repeat_n(Cell::Empty, 5));
                row.push(args.theta.into());
                row.extend(std::iter::repeat_n(Cell::Empty, 7));
                row.push(e.to_string().into());
                table.push(row);
            }
        }
    }
    Ok(Outcome { table, failures })
}

/// Margin below π/2 required of the certified bound.
pub const BOUND_MARGIN: f64 = 1e-3;

pub fn bound(args: &BoundArgs) -> Result<Outcome, CliError> {
    let b = improved_cdual_bound(args.grid, !args.no_certify, args.theta)?;
    let mut table = Table::new(&["grid", "certify", "value", "gain", "certified_nodes", "half_pi"]);
    table.push(vec![
        b.grid_size.into(),
        (!args.no_certify).into(),
        b.value.into(),
        b.gain.into(),
        b.certified_nodes.into(),
        FRAC_PI_2.into(),
    ]);
    let mut failures = Vec::new();
    if args.no_certify {
        if (b.value - FRAC_PI_2).abs() > 1e-8 {
            failures.push(format!("uncertified bound {} differs from π/2", b.value));
        }
    } else {
        if !(b.value < FRAC_PI_2) {
            failures.push(format!("bound {} is not below π/2", b.value));
        }
        if !(b.gain > BOUND_MARGIN) {
            failures.push(format!("gain {:e} below π/2 does not reach the margin {BOUND_MARGIN:e}", b.gain));
        }
    }
    Ok(Outcome { table, failures })
}

/// With `--emit-grid` the two-point rows go to `emit` and the returned table is empty.
pub fn bellman(args: &BellmanArgs, seed: u64, emit: &mut dyn FnMut(f64, f64, f64)) -> Result<Outcome, CliError> {
    let mut failures = Vec::new();
    let table = match args.check {
        BellmanCheck::TwoPoint => {
            let k = args.k.unwrap_or(SQRT_2PI);
            let grid = unit_grid(args.grid, 5e-4)?;
            let mut table = Table::new(&["a", "b", "defect"]);
            let min = if args.emit_grid {
                let mut min = f64::INFINITY;
                defect_grid(&grid, k, |a, b, d| {
                    min = min.min(d);
                    emit(a, b, d);
                })?;
                min
            } else {
                let m = min_two_point_defect(&grid, k)?;
                table.push(vec![m.a.into(), m.b.into(), m.value.into()]);
                m.value
            };
            if k <= SQRT_2PI && min < -1e-12 {
                failures.push(format!("two-point defect {min} < 0 at k = {k}"));
            }
            table
        }
        BellmanCheck::Curvature => {
            let (a, b, v) = two_point_curvature_fails(args.c)?;
            let mut table = Table::new(&["a", "b", "defect"]);
            table.push(vec![a.into(), b.into(), v.into()]);
            table
        }
        BellmanCheck::Mb => {
            let grid = open_grid(args.grid | 1);
            let mut table = Table::new(&["candidate", "m_b"]);
            table.push(vec!["x(1-x)".into(), mb_functional_of(&grid, |x| x * (1.0 - x), |_| -2.0)?.into()]);
            table.push(vec!["I".into(), mb_profile(&grid)?.into()]);
            for a in [0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4] {
                let (b, b2) = power_family(a);
                let m: Cell = mb_functional_of(&grid, b, b2).ok().into();
                table.push(vec![format!("(x(1-x))^{a}").into(), m]);
            }
            table
        }
        BellmanCheck::TwoValue => {
            let (v, arg) = two_value_constant(args.grid)?;
            let mut table = Table::new(&["value", "argmax"]);
            table.push(vec![v.into(), arg.into()]);
            table
        }
        BellmanCheck::Bobkov => {
            let (worst, n) = bobkov_min(args.samples, seed, 6)?;
            if worst < -1e-12 {
                failures.push(format!("Bobkov defect {worst} < 0 for n = {n}"));
            }
            let mut table = Table::new(&["samples", "min_defect", "n_at_min"]);
            table.push(vec![args.samples.into(), worst.into(), n.into()]);
            table
        }
        BellmanCheck::SymmetricSets => {
            let r = symmetric_set_constants()?;
            if !(r.c2 < r.c1) {
                failures.push(format!("c2 = {} is not below c1 = {}", r.c2, r.c1));
            }
            let mut table = Table::new(&["c1", "c2", "ana_max", "ana_argmax"]);
            table.push(vec![r.c1.into(), r.c2.into(), r.ana_max.into(), r.ana_argmax.into()]);
            table
        }
    };
    Ok(Outcome { table, failures })
}

/// Smallest Bobkov defect over `samples` random `[0,1]`-valued functions with
/// `n = 1..=max_n` in rotation; sample `j` uses seed `seed + j`.
pub fn bobkov_min(samples: usize, seed: u64, max_n: usize) -> Result<(f64, usize), CliError> {
    let defects: Vec<(f64, usize)> = (0..samples)
        .into_par_iter()
        .map(|j| {
            let n = 1 + j % max_n;
            let f = random_function(n, 0.0, 1.0, &mut seeded(seed.wrapping_add(j as u64)))?;
            Ok((cubelab_core::profile::bobkov_check(&f)?, n))
        })
        .collect::<Result<_, cubelab_core::Error>>()?;
    Ok(defects.into_iter().fold((f64::INFINITY, 0), |m, d| if d.0 < m.0 { d } else { m }))
}

/// Indices `1..=10`, then 2-5-10 steps per decade, then `n_max` itself.
pub fn series_indices(series: Series, n_max: u64) -> Vec<u64> {
    let mut raw: Vec<u64> = (1..=10.min(n_max)).collect();
    let mut decade = 10u64;
    while decade < n_max {
        for m in [2, 5, 10] {
            let v = decade * m;
            if v <= n_max {
                raw.push(v);
            }
        }
        decade *= 10;
    }
    raw.push(n_max);
    let mut out: Vec<u64> = raw
        .into_iter()
        .map(|n| if series.admits(n) { n } else if n < n_max { n + 1 } else { n - 1 })
        .filter(|&n| n >= 1 && series.admits(n))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn series(args: &SeriesArgs) -> Result<Outcome, CliError> {
    let names: Vec<&str> = Series::ALL.iter().map(|s| s.name()).collect();
    let chosen: Vec<Series> = if args.name == "all" {
        Series::ALL.to_vec()
    } else {
        vec![Series::from_name(&args.name).ok_or_else(|| {
            CliError::Usage(format!("unknown series {:?}; available: {}, all", args.name, names.join(", ")))
        })?]
    };
    if args.n_max == 0 || args.n_max > cubelab_core::asymptotics::SERIES_MAX_N {
        return Err(CliError::Usage(format!(
            "n-max must be in 1..={}",
            cubelab_core::asymptotics::SERIES_MAX_N
        )));
    }
    let labelled = chosen.len() > 1;
    let mut table = if labelled {
        Table::new(&["series", "n", "value", "reference", "gap"])
    } else {
        Table::new(&["n", "value", "reference", "gap"])
    };
    for s in chosen {
        let points = series_indices(s, args.n_max)
            .into_par_iter()
            .map(|n| s.point(n))
            .collect::<Result<Vec<_>, _>>()?;
        for p in points {
            let mut row: Vec<Cell> = vec![p.n.into(), p.value.into(), p.reference.into(), p.gap.into()];
            if labelled {
                row.insert(0, s.name().into());
            }
            table.push(row);
        }
    }
    Ok(Outcome::ok(table))
}

/// Reference constants printed by `verify`.
pub fn constant_table() -> Vec<(&'static str, f64)> {
    use cubelab_core::constants::*;
    vec![
        ("pi/2", HALF_PI),
        ("sqrt(pi/2)", SQRT_HALF_PI),
        ("2/sqrt(pi)", TWO_OVER_SQRT_PI),
        ("(1+sqrt2)/sqrt(2pi)", even_majority_limit()),
        ("sqrt(pi)/2", SQRT_PI_OVER_2),
        ("sqrt(2pi)", SQRT_2PI),
        ("1/8", 0.125),
        ("1/(2pi)", INV_2PI),
    ]
}
