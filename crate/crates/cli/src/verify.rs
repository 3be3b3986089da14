//! The invariant groups behind `cubelab verify`, one per acceptance criterion.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use rayon::prelude::*;

use cubelab_core::asymptotics::{
    clt_bernoulli, l1_growth, l1_growth_enumerated, lp_sum, majority_even, majority_odd,
};
use cubelab_core::checks::*;
use cubelab_core::constants::*;
use cubelab_core::cube::graph_inequality_ratio;
use cubelab_core::dualnorm::{brute_force_norm, MultistartConfig};
use cubelab_core::khintchine::{
    certify_epsilon, improved_cdual_bound, q_exact_small, DEFAULT_THETA, EXACT_MAX_N,
};
use cubelab_core::profile::{
    chain_constant, min_two_point_defect, mb_functional_of, mb_profile, open_grid,
    two_point_curvature_fails, two_value_constant, unit_grid,
};

use crate::commands::{bobkov_min, constant_table, dual_reports, BOUND_MARGIN};
use crate::error::CliError;
use crate::table::{Cell, Table};

#[derive(Debug, Clone)]
pub struct Check {
    pub section: &'static str,
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

fn check(section: &'static str, name: impl Into<String>, value: f64, pass: bool) -> Check {
    Check { section, name: name.into(), value, pass }
}

pub type Group = fn(&VerifyContext) -> Result<Vec<Check>, CliError>;

pub struct VerifyContext {
    pub seed: u64,
    pub samples: usize,
    pub deadline: Option<Instant>,
}

pub fn dual_experiment(ctx: &VerifyContext) -> Result<Vec<Check>, CliError> {
    const S: &str = "dual";
    let cfg = MultistartConfig { seed: ctx.seed, ..MultistartConfig::default() };
    let (rows, _) = dual_reports(1..=10, &cfg, ctx.deadline)?;
    let v = |n: usize| rows[n - 1].value;
    let bf = brute_force_norm(2)?.value;
    let mut out = vec![check(S, "brute_force(2) - multistart(2)", bf - v(2), (bf - v(2)).abs() <= 1e-12)];
    let plateau = (3..=7).map(|n| (v(n) - v(2)).abs()).fold(0.0, f64::max);
    out.push(check(S, "max |C(n) - C(2)|, n = 3..7", plateau, plateau <= 1e-9));
    out.push(check(S, "C(8) - C(2)", v(8) - v(2), v(8) - v(2) > 1e-6));
    for r in &rows {
        out.push(check(S, format!("C({})", r.n), r.value, r.value >= 1.0 && r.value < SQRT_HALF_PI));
    }
    Ok(out)
}

pub fn n2_optimizer(_: &VerifyContext) -> Result<Vec<Check>, CliError> {
    const S: &str = "n2-optimizer";
    let bf = brute_force_norm(2)?;
    let plus = bf.maximizer.values().iter().filter(|&&x| x > 0.0).count();
    Ok(vec![
        check(S, "value - 3/(2 sqrt2)", bf.value - PLATEAU, (bf.value - PLATEAU).abs() < 1e-15),
        check(S, "plus vertices (min up to symmetry: 1 or 3)", plus as f64, plus == 1 || plus == 3),
    ])
}

pub fn khintchine_certificate(_: &VerifyContext) -> Result<Vec<Check>, CliError> {
    const S: &str = "khintchine";
    let c = certify_epsilon(0.75, DEFAULT_THETA)?;
    let mut out = vec![
        check(S, "epsilon(0.75)", c.epsilon, c.epsilon > 0.0),
        check(S, "branch2(0.75)", c.branch2, c.branch2 < 0.97),
        check(S, "q_upper(0.75)", c.q_upper, c.q_upper < 1.0),
    ];
    for n in 1..=EXACT_MAX_N {
        let (_, q) = q_exact_small(0.75, n)?;
        out.push(check(S, format!("q_exact(0.75, {n})"), q, q < 1.0 && q <= c.q_upper + 1e-12));
    }
    Ok(out)
}

pub fn improved_bound(_: &VerifyContext) -> Result<Vec<Check>, CliError> {
    const S: &str = "bound";
    let b = improved_cdual_bound(2000, true, DEFAULT_THETA)?;
    let trivial = improved_cdual_bound(2000, false, DEFAULT_THETA)?;
    Ok(vec![
        check(S, "bound < pi/2", b.value, b.value < FRAC_PI_2),
        check(S, "pi/2 - bound > 1e-3", FRAC_PI_2 - b.value, FRAC_PI_2 - b.value > BOUND_MARGIN),
        check(S, "uncertified - pi/2", trivial.value - FRAC_PI_2, (trivial.value - FRAC_PI_2).abs() <= 1e-8),
    ])
}

pub fn two_point(_: &VerifyContext) -> Result<Vec<Check>, CliError> {
    const S: &str = "two-point";
    let grid = unit_grid(2001, 5e-4)?;
    let min = min_two_point_defect(&grid, SQRT_2PI)?;
    let near_half: Vec<f64> = (0..=200).map(|j| 0.45 + 1e-1 * j as f64 / 200.0).collect();
    let over = min_two_point_defect(&near_half, SQRT_2PI * 1.001)?;
    let mut out = vec![
        check(S, "min defect, k = sqrt(2pi)", min.value, min.value >= -1e-12),
        check(S, "min defect near 1/2, k = 1.001 sqrt(2pi)", over.value, over.value < 0.0),
    ];
    for c in [1e-3, 1.0, 10.0] {
        let (_, b, v) = two_point_curvature_fails(c)?;
        out.push(check(S, format!("curvature witness c = {c} (b = {b:e})"), v, v < 0.0));
    }
    Ok(out)
}

pub fn bellman_constants(_: &VerifyContext) -> Result<Vec<Check>, CliError> {
    const S: &str = "bellman";
    let grid = open_grid(20_001);
    let quad = mb_functional_of(&grid, |x| x * (1.0 - x), |_| -2.0)?;
    let prof = mb_profile(&grid)?;
    let c8 = chain_constant(0.125);
    let c2pi = chain_constant(INV_2PI);
    Ok(vec![
        check(S, "M[x(1-x)]", quad, quad == 0.125),
        check(S, "M[I] - 1/(2pi)", prof - INV_2PI, (prof - INV_2PI).abs() <= 1e-9),
        check(S, "chain(1/(2pi)) - sqrt(pi)", c2pi - PI.sqrt(), (c2pi - PI.sqrt()).abs() <= 1e-12),
        check(S, "chain(1/8) - pi/2", c8 - FRAC_PI_2, (c8 - FRAC_PI_2).abs() <= 1e-12),
    ])
}

pub fn exact_asymptotics(_: &VerifyContext) -> Result<Vec<Check>, CliError> {
    const S: &str = "asymptotics";
    let c9 = clt_bernoulli(9)?;
    let c13 = clt_bernoulli(13)?;
    let odd = majority_odd(1001)?.0;
    let even = majority_even(1000)?.0;
    let (tv, _) = two_value_constant(20_001)?;
    Ok(vec![
        check(S, "clt(9)", c9, (c9 - 0.8203).abs() <= 5e-5),
        check(S, "clt(13)", c13, (c13 * 100.0).round() == 81.0),
        check(S, "majority_odd(1001) - 2/sqrt(pi)", odd - TWO_OVER_SQRT_PI, (odd - TWO_OVER_SQRT_PI).abs() <= 1e-3),
        check(
            S,
            "majority_even(1000) - (1+sqrt2)/sqrt(2pi)",
            even - even_majority_limit(),
            (even - even_majority_limit()).abs() <= 2e-3,
        ),
        check(S, "two-value constant - sqrt(pi/2)", tv - SQRT_HALF_PI, (tv - SQRT_HALF_PI).abs() <= 1e-6),
    ])
}

pub fn series_checks(_: &VerifyContext) -> Result<Vec<Check>, CliError> {
    const S: &str = "series";
    let gaps: Vec<f64> =
        [10u64, 100, 1000, 10_000].iter().map(|&n| Ok((lp_sum(n)? - FRAC_PI_2).abs())).collect::<Result<_, CliError>>()?;
    let mut out = vec![check(S, "|lp_sum(1e4) - pi/2|", gaps[3], gaps[3] < 0.05)];
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    out.push(check(S, "lp_sum gaps decrease over decades", gaps[0] - gaps[3], decreasing));
    for n in [10u64, 100, 1000, 10_000] {
        let d = l1_growth(n)? - (n as f64).ln();
        out.push(check(S, format!("l1_growth({n}) - ln n"), d, d.abs() <= 2.0));
    }
    let worst = (1..=10)
        .map(|n| Ok((l1_growth(n as u64)? - l1_growth_enumerated(n)?).abs()))
        .collect::<Result<Vec<f64>, CliError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.push(check(S, "l1_growth closed form vs enumeration, n <= 10", worst, worst <= 1e-12));
    Ok(out)
}

pub fn identity_suite(ctx: &VerifyContext) -> Result<Vec<Check>, CliError> {
    const S: &str = "identities";
    let kernel = (1..=20).map(kernel_identities_hold).collect::<Result<Vec<_>, _>>()?.into_iter().all(|b| b);
    let mut out = vec![
        check(S, "kernel beta/tail identities, n <= 20", 0.0, kernel),
        check(S, "Gram moments, n <= 10", 0.0, gram_identities_hold(10)?),
    ];

    let ops: Vec<f64> = (0..64)
        .into_par_iter()
        .map(|j| {
            let mut rng = seeded(ctx.seed.wrapping_add(j));
            let n = 1 + j as usize % 8;
            let f = random_function(n, -1.0, 1.0, &mut rng)?;
            let g = random_function(n, -1.0, 1.0, &mut rng)?;
            let r = [
                adjointness_residual(&f, &g)?,
                semigroup_residual(&f, 0.3, 0.7)?,
                commutation_residual(&f, 0.5)?,
                t_identity_residual(&g)?,
            ];
            Ok(r.into_iter().fold(0.0, f64::max))
        })
        .collect::<Result<_, cubelab_core::Error>>()?;
    let worst = ops.into_iter().fold(0.0, f64::max);
    out.push(check(S, "operator identities, n <= 8", worst, worst <= 1e-12));

    let (bobkov, _) = bobkov_min(ctx.samples, ctx.seed, 6)?;
    out.push(check(S, "min Bobkov defect", bobkov, bobkov >= -1e-12));

    let ratio = (0..ctx.samples)
        .into_par_iter()
        .map(|j| {
            let n = 1 + j % 6;
            let mut rng = seeded(ctx.seed.wrapping_add(1_000_000 + j as u64));
            graph_inequality_ratio(&random_function(n, -1.0, 1.0, &mut rng)?)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.push(check(S, "max graph-inequality ratio", ratio, ratio < FRAC_PI_2));

    let gap = (1..=12)
        .map(|n| decomposition_ratio(n, 4, ctx.seed.wrapping_add(n as u64)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.push(check(S, "max decomposition gap / (2/sqrt(n+1)), n <= 12", gap, gap <= 1.0));
    Ok(out)
}

pub const GROUPS: [(&str, Group); 9] = [
    ("dual", dual_experiment),
    ("n2-optimizer", n2_optimizer),
    ("khintchine", khintchine_certificate),
    ("bound", improved_bound),
    ("two-point", two_point),
    ("bellman", bellman_constants),
    ("asymptotics", exact_asymptotics),
    ("series", series_checks),
    ("identities", identity_suite),
];

/// Every group as `section,name,value,status` rows, then the constant table.
/// A group that errors is reported as one failing row.
pub fn verify(ctx: &VerifyContext) -> (Table, Vec<String>) {
    let mut table = Table::new(&["section", "name", "value", "status"]);
    let mut failures = Vec::new();
    for (name, group) in GROUPS {
        let checks = group(ctx).unwrap_or_else(|e| vec![check("error", format!("{name}: {e}"), f64::NAN, false)]);
        let pass = checks.iter().all(|c| c.pass);
        for c in checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            table.push(vec![c.section.into(), c.name.into(), c.value.into(), status.into()]);
        }
        table.push(vec!["group".into(), name.into(), Cell::Empty, (if pass { "PASS" } else { "FAIL" }).into()]);
        if !pass {
            failures.push(format!("group {name} failed"));
        }
    }
    for (name, value) in constant_table() {
        table.push(vec!["constant".into(), name.into(), value.into(), "".into()]);
    }
    for (name, m) in [("chain(1/(2pi))", INV_2PI), ("chain(1/8)", 0.125)] {
        table.push(vec!["constant".into(), name.into(), chain_constant(m).into(), "".into()]);
    }
    (table, failures)
}
