//! `C_dual,n = ‖M‖_{ℓ^∞ → ℓ²}` by alternating maximization with multistart.
//!
//! `‖M‖_{∞→2} = max_{‖λ‖=1} ‖Mᵀλ‖₁ = max_{u ∈ {±1}^{2^n}} ‖Mu‖₂`. The ascent
//! alternates `u ← sign(Mᵀλ)`, `λ ← Mu/‖Mu‖`, which never decreases the
//! objective. Values are lower bounds unless certified by enumeration.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cube::{check_dim, CubeFunction};
use crate::error::{Error, Result};
use crate::kernel::{apply_signs, kernel_table, objective_and_signs, KernelTable};
use crate::sphere::{norm2, SphereVector};

/// Stop once one sweep improves the objective by less than this.
pub const ASCENT_TOLERANCE: f64 = 1e-13;
pub const MAX_ASCENT_ITERATIONS: usize = 10_000;
/// Largest `n` for exhaustive sign enumeration (`2^{2^n}` candidates).
pub const BRUTE_FORCE_MAX_N: usize = 4;
pub const MULTISTART_MAX_N: usize = 26;
/// Agreement required between multistart and enumeration to mark a report certified.
pub const CERTIFY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AscentOutcome {
    pub lambda: SphereVector,
    pub value: f64,
    pub iterations: usize,
    /// Objective value at every iterate, in order.
    pub trace: Vec<f64>,
}

fn hash_signs(signs: &[bool]) -> u64 {
    // FNV-1a over the packed sign bits.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for chunk in signs.chunks(8) {
        let byte = chunk.iter().enumerate().fold(0u8, |b, (i, &s)| b | (s as u8) << i);
        h ^= byte as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn alternating_ascent(table: &KernelTable, start: &SphereVector) -> Result<AscentOutcome> {
    let mut lambda = start.clone();
    let mut seen = BTreeSet::new();
    let mut trace = Vec::new();
    for _ in 0..MAX_ASCENT_ITERATIONS {
        let (value, signs) = objective_and_signs(table, &lambda)?;
        let stalled = trace.last().is_some_and(|&prev: &f64| value - prev < ASCENT_TOLERANCE);
        trace.push(value);
        if stalled || !seen.insert(hash_signs(&signs)) {
            break;
        }
        let w = apply_signs(table, &signs)?;
        lambda = SphereVector::normalize(w).map_err(|_| Error::DegenerateAscent)?;
    }
    let value = *trace.last().expect("at least one iteration");
    Ok(AscentOutcome { lambda, value, iterations: trace.len(), trace })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    pub value: f64,
    /// The maximizing sign vector as a ±1-valued function, `g(z) = u_z`.
    pub maximizer: CubeFunction,
    pub lambda: SphereVector,
}

/// Exact `‖M‖_{∞→2}` by enumerating every sign vector (with `u_0 = +1`).
pub fn brute_force_norm(n: usize) -> Result<BruteForce> {
    if n == 0 || n > BRUTE_FORCE_MAX_N {
        return Err(Error::DimensionOutOfRange { n, min: 1, max: BRUTE_FORCE_MAX_N });
    }
    let table = kernel_table(n)?;
    let size = 1usize << n;
    let columns: Vec<Vec<f64>> = (0..size).map(|z| table.column(z)).collect();
    let mut best = (f64::NEG_INFINITY, 0u64);
    let mut w = alloc::vec![0.0; n];
    for pattern in 0..1u64 << (size - 1) {
        w.iter_mut().for_each(|x| *x = 0.0);
        for (z, col) in columns.iter().enumerate() {
            let neg = z > 0 && pattern >> (z - 1) & 1 == 1;
            for (wi, &c) in w.iter_mut().zip(col) {
                if neg {
                    *wi -= c;
                } else {
                    *wi += c;
                }
            }
        }
        let v = norm2(&w);
        if v > best.0 {
            best = (v, pattern);
        }
    }
    let pattern = best.1;
    let maximizer = CubeFunction::from_fn(n, |z| {
        if z > 0 && pattern >> (z - 1) & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    })?;
    let signs: Vec<bool> = maximizer.values().iter().map(|&u| u < 0.0).collect();
    let lambda = SphereVector::normalize(apply_signs(&table, &signs)?)?;
    Ok(BruteForce { value: best.0, maximizer, lambda })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultistartConfig {
    /// Random restarts; `None` means `200 + 50n`.
    pub restarts: Option<usize>,
    pub seed: u64,
    /// Include each `e_i`, the uniform vector and the padded `(n-1)` optimizer.
    pub structured_starts: bool,
}

impl Default for MultistartConfig {
    fn default() -> Self {
        Self { restarts: None, seed: 42, structured_starts: true }
    }
}

impl MultistartConfig {
    pub fn restarts_for(&self, n: usize) -> usize {
        self.restarts.unwrap_or(200 + 50 * n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualNormReport {
    pub n: usize,
    pub value: f64,
    pub lambda: SphereVector,
    /// True only when exhaustive enumeration confirmed `value` (n ≤ 4).
    pub certified: bool,
    pub restarts: usize,
    pub total_iterations: usize,
    pub seed: u64,
}

/// Random start number `index`: a normalized Gaussian seeded with `seed + index`.
pub fn random_start(n: usize, seed: u64, index: usize) -> SphereVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64));
    SphereVector::random(n, &mut rng)
}

/// Every start the multistart will run, structured ones first.
pub fn plan_starts(
    n: usize,
    config: &MultistartConfig,
    previous: Option<&SphereVector>,
) -> Result<Vec<SphereVector>> {
    let mut starts = Vec::new();
    if config.structured_starts {
        for i in 0..n {
            starts.push(SphereVector::basis(n, i)?);
        }
        starts.push(SphereVector::uniform(n)?);
        if let Some(prev) = previous {
            if prev.dim() + 1 != n {
                return Err(Error::DimensionMismatch { expected: n - 1, got: prev.dim() });
            }
            starts.push(prev.padded(1));
        }
    }
    starts.extend((0..config.restarts_for(n)).map(|r| random_start(n, config.seed, r)));
    Ok(starts)
}

/// Reduce ascent outcomes (in start order) to a report; ties keep the earliest start.
/// Degenerate restarts are skipped. For `n ≤ 4` the result is checked against enumeration.
pub fn best_of(
    n: usize,
    config: &MultistartConfig,
    outcomes: impl IntoIterator<Item = Result<AscentOutcome>>,
) -> Result<DualNormReport> {
    let mut best: Option<AscentOutcome> = None;
    let mut total_iterations = 0;
    for outcome in outcomes {
        let outcome = match outcome {
            Ok(o) => o,
            Err(Error::DegenerateAscent) => continue,
            Err(e) => return Err(e),
        };
        total_iterations += outcome.iterations;
        if best.as_ref().is_none_or(|b| outcome.value > b.value) {
            best = Some(outcome);
        }
    }
    let best = best.ok_or(Error::DegenerateAscent)?;
    let certified = n <= BRUTE_FORCE_MAX_N
        && (brute_force_norm(n)?.value - best.value).abs() <= CERTIFY_TOLERANCE;
    Ok(DualNormReport {
        n,
        value: best.value,
        lambda: best.lambda,
        certified,
        restarts: config.restarts_for(n),
        total_iterations,
        seed: config.seed,
    })
}

/// Multistart over a prebuilt table with an optional `(n-1)` optimizer to pad.
pub fn multistart_with(
    table: &KernelTable,
    config: &MultistartConfig,
    previous: Option<&SphereVector>,
) -> Result<DualNormReport> {
    let n = table.n();
    let starts = plan_starts(n, config, previous)?;
    best_of(n, config, starts.iter().map(|s| alternating_ascent(table, s)))
}

/// Multistart estimate of `C_dual,n`. With structured starts the `(n-1)`
/// optimizer is computed first so that the result is monotone in `n`.
pub fn multistart(n: usize, config: &MultistartConfig) -> Result<DualNormReport> {
    check_dim(n)?;
    if n > MULTISTART_MAX_N {
        return Err(Error::DimensionOutOfRange { n, min: 1, max: MULTISTART_MAX_N });
    }
    let mut previous = None;
    let mut report = None;
    let first = if config.structured_starts { 1 } else { n };
    for m in first..=n {
        let r = multistart_with(&kernel_table(m)?, config, previous.as_ref())?;
        previous = Some(r.lambda.clone());
        report = Some(r);
    }
    Ok(report.expect("n >= 1"))
}

/// Rows `(n, C_dual,n)` for `n_min..=n_max`, each padding the previous optimizer.
pub fn dual_sweep(n_min: usize, n_max: usize, config: &MultistartConfig) -> Result<Vec<DualNormReport>> {
    check_dim(n_min)?;
    if n_max < n_min || n_max > MULTISTART_MAX_N {
        return Err(Error::DimensionOutOfRange { n: n_max, min: n_min, max: MULTISTART_MAX_N });
    }
    let mut rows = Vec::new();
    let mut previous =
        if n_min > 1 && config.structured_starts { Some(multistart(n_min - 1, config)?.lambda) } else { None };
    for n in n_min..=n_max {
        let r = multistart_with(&kernel_table(n)?, config, previous.as_ref())?;
        previous = Some(r.lambda.clone());
        rows.push(r);
    }
    Ok(rows)
}
