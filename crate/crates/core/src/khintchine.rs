//! Biased Khintchine constants `q(p) = sup_λ E|Σ λ_i ξ_i|` and the
//! Paley–Zygmund certificate `q(p) ≤ max(1 - ε², 2√(p(1-p)) + √(1-θ)) < 1`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use core::f64::consts::FRAC_PI_2;

use crate::dualnorm::{random_start, ASCENT_TOLERANCE, MAX_ASCENT_ITERATIONS};
use crate::error::{Error, Result};
use crate::sphere::{norm2, SphereVector};

/// Largest `n` for the `2^n`-outcome enumerations.
pub const MAX_ENUM_N: usize = 24;
pub const EXACT_MAX_N: usize = 4;
/// Default concentrated-branch threshold on `max λ_k²`.
pub const DEFAULT_THETA: f64 = 0.99;
/// Slack subtracted from both contradiction conditions when extracting ε.
pub const EPSILON_SLACK: f64 = 1e-9;

/// Mean-zero, unit-variance two-point variable: `v_plus` with probability `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedDist {
    p: f64,
    v_plus: f64,
    v_minus: f64,
}

impl BiasedDist {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.5..1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        Ok(Self { p, v_plus: libm::sqrt((1.0 - p) / p), v_minus: -libm::sqrt(p / (1.0 - p)) })
    }

    /// The law of the standardized coordinate under `P_t`: `p = (1 + e^{-t})/2`.
    pub fn from_time(t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::NegativeTime(t));
        }
        Self::new((1.0 + libm::exp(-t)) / 2.0)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn v_plus(&self) -> f64 {
        self.v_plus
    }

    pub fn v_minus(&self) -> f64 {
        self.v_minus
    }

    /// `E ξ^j`.
    pub fn raw_moment(&self, j: u32) -> f64 {
        self.p * libm::pow(self.v_plus, j as f64) + (1.0 - self.p) * libm::pow(self.v_minus, j as f64)
    }

    /// `E|ξ| = 2√(p(1-p))`.
    pub fn mean_abs(&self) -> f64 {
        2.0 * libm::sqrt(self.p * (1.0 - self.p))
    }

    /// Cumulants `κ_1..κ_max` (index 0 unused).
    pub fn cumulants(&self, max: usize) -> Vec<f64> {
        let m: Vec<f64> = (0..=max).map(|j| self.raw_moment(j as u32)).collect();
        let mut k = alloc::vec![0.0; max + 1];
        for j in 1..=max {
            let mut acc = m[j];
            for i in 1..j {
                acc -= binom(j - 1, i - 1) * k[i] * m[j - i];
            }
            k[j] = acc;
        }
        k
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Raw moments `m_0..m_max` from cumulants.
fn moments_from_cumulants(k: &[f64]) -> Vec<f64> {
    let mut m = alloc::vec![0.0; k.len()];
    m[0] = 1.0;
    for j in 1..k.len() {
        m[j] = (1..=j).map(|i| binom(j - 1, i - 1) * k[i] * m[j - i]).sum();
    }
    m
}

fn check_enum_dim(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::DimensionOutOfRange { n, min: 1, max });
    }
    Ok(())
}

/// Visits every outcome in Gray order with its probability and `ℓ = ⟨λ, ξ⟩`.
/// Bit `i` of the mask is set iff `ξ_i = v_minus`.
fn walk_outcomes(dist: &BiasedDist, lambda: &[f64], mut visit: impl FnMut(usize, f64, f64)) {
    let n = lambda.len();
    let weights: Vec<f64> =
        (0..=n).map(|k| libm::pow(dist.p, (n - k) as f64) * libm::pow(1.0 - dist.p, k as f64)).collect();
    let direct = |mask: usize| -> f64 {
        (0..n).map(|i| lambda[i] * if mask >> i & 1 == 1 { dist.v_minus } else { dist.v_plus }).sum()
    };
    let jump = dist.v_minus - dist.v_plus;
    let mut ell = direct(0);
    let mut mask = 0usize;
    for step in 0..1usize << n {
        if step > 0 {
            let i = step.trailing_zeros() as usize;
            mask ^= 1 << i;
            if step % 1024 == 0 {
                ell = direct(mask);
            } else if mask >> i & 1 == 1 {
                ell += lambda[i] * jump;
            } else {
                ell -= lambda[i] * jump;
            }
        }
        visit(mask, weights[mask.count_ones() as usize], ell);
    }
}

/// `E|Σ λ_i ξ_i|` by exact enumeration of the `2^n` outcomes.
pub fn exact_mean_abs(dist: &BiasedDist, lambda: &SphereVector) -> Result<f64> {
    check_enum_dim(lambda.dim(), MAX_ENUM_N)?;
    let mut acc = 0.0;
    walk_outcomes(dist, lambda.coords(), |_, w, ell| acc += w * ell.abs());
    debug_assert!(acc <= 1.0 + 1e-12);
    Ok(acc)
}

/// `E|ℓ|` together with the ascent direction `E[sign(ℓ) ξ]` (sign(0) = +1).
pub fn mean_abs_and_direction(dist: &BiasedDist, lambda: &SphereVector) -> Result<(f64, Vec<f64>)> {
    let n = lambda.dim();
    check_enum_dim(n, MAX_ENUM_N)?;
    let mut value = 0.0;
    let mut total = 0.0;
    let mut minus = alloc::vec![0.0; n];
    walk_outcomes(dist, lambda.coords(), |mask, w, ell| {
        value += w * ell.abs();
        let h = if ell >= 0.0 { w } else { -w };
        total += h;
        let mut bits = mask;
        while bits != 0 {
            minus[bits.trailing_zeros() as usize] += h;
            bits &= bits - 1;
        }
    });
    let dir = minus.iter().map(|&m| dist.v_plus * (total - m) + dist.v_minus * m).collect();
    Ok((value, dir))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KhintchineConfig {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for KhintchineConfig {
    fn default() -> Self {
        Self { restarts: 20, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KhintchineAscent {
    pub lambda: SphereVector,
    pub value: f64,
    pub trace: Vec<f64>,
}

/// Sphere ascent `λ ← normalize(E[sign(ℓ) ξ])`; the objective never decreases.
pub fn khintchine_ascent(dist: &BiasedDist, start: &SphereVector) -> Result<KhintchineAscent> {
    let mut lambda = start.clone();
    let mut trace: Vec<f64> = Vec::new();
    let mut seen = BTreeSet::new();
    for _ in 0..MAX_ASCENT_ITERATIONS {
        let (value, dir) = mean_abs_and_direction(dist, &lambda)?;
        let stalled = trace.last().is_some_and(|&prev| value - prev < ASCENT_TOLERANCE);
        trace.push(value);
        // The next iterate depends only on the direction, so a repeat means a cycle.
        let key: Vec<u64> = dir.iter().map(|d| d.to_bits()).collect();
        if stalled || !seen.insert(key) {
            break;
        }
        lambda = SphereVector::normalize(dir).map_err(|_| Error::DegenerateAscent)?;
    }
    let value = *trace.last().expect("at least one iteration");
    Ok(KhintchineAscent { lambda, value, trace })
}

/// Best-found lower bound for `q(p)` at dimension `n`.
pub fn q_lower(p: f64, n: usize, config: &KhintchineConfig) -> Result<(SphereVector, f64)> {
    let dist = BiasedDist::new(p)?;
    check_enum_dim(n, MAX_ENUM_N)?;
    let mut starts = alloc::vec![SphereVector::basis(n, 0)?, SphereVector::uniform(n)?];
    starts.extend((0..config.restarts).map(|r| random_start(n, config.seed, r)));
    let mut best: Option<(SphereVector, f64)> = None;
    for s in &starts {
        let out = match khintchine_ascent(&dist, s) {
            Ok(o) => o,
            Err(Error::DegenerateAscent) => continue,
            Err(e) => return Err(e),
        };
        if best.as_ref().is_none_or(|b| out.value > b.1) {
            best = Some((out.lambda, out.value));
        }
    }
    best.ok_or(Error::DegenerateAscent)
}

/// Exact `sup_λ E|⟨λ, ξ⟩|` for `n ≤ 4`: the maximum over sign assignments `s`
/// of `‖E[s ξ]‖₂`, attained at `λ ∝ E[s ξ]`.
pub fn q_exact_small(p: f64, n: usize) -> Result<(SphereVector, f64)> {
    let dist = BiasedDist::new(p)?;
    check_enum_dim(n, EXACT_MAX_N)?;
    let size = 1usize << n;
    let weighted: Vec<Vec<f64>> = (0..size)
        .map(|mask| {
            let k = mask.count_ones() as f64;
            let w = libm::pow(p, n as f64 - k) * libm::pow(1.0 - p, k);
            (0..n).map(|i| w * if mask >> i & 1 == 1 { dist.v_minus } else { dist.v_plus }).collect()
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut v = alloc::vec![0.0; n];
    for pattern in 0..1u64 << (size - 1) {
        v.iter_mut().for_each(|x| *x = 0.0);
        for (mask, row) in weighted.iter().enumerate() {
            let neg = mask > 0 && pattern >> (mask - 1) & 1 == 1;
            for (vi, &r) in v.iter_mut().zip(row) {
                *vi += if neg { -r } else { r };
            }
        }
        let value = norm2(&v);
        if value > best.0 {
            best = (value, v.clone());
        }
    }
    Ok((SphereVector::normalize(best.1)?, best.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub lambda: SphereVector,
    pub p: f64,
    /// `E ℓ^2, E ℓ^4, E ℓ^6, E ℓ^8`.
    pub moments: [f64; 4],
    pub var_ell2: f64,
    /// Moments of `X = |ℓ² - 1|`.
    pub ex2: f64,
    pub ex4: f64,
    /// `E X⁴ / (E X²)²`, undefined when `X ≡ 0`.
    pub ratio_b: Option<f64>,
}

/// Even moments of `ℓ = Σ λ_i ξ_i` through order 8 via `κ_j(ℓ) = Σ λ_i^j κ_j(ξ)`.
pub fn cumulant_moments(dist: &BiasedDist, lambda: &SphereVector) -> MomentReport {
    let kx = dist.cumulants(8);
    let mut kl = alloc::vec![0.0; 9];
    for j in 1..=8 {
        kl[j] = lambda.coords().iter().map(|&l| libm::pow(l, j as f64)).sum::<f64>() * kx[j];
    }
    let m = moments_from_cumulants(&kl);
    let var_ell2 = m[4] - 1.0;
    let ex4 = m[8] - 4.0 * m[6] + 6.0 * m[4] - 4.0 * m[2] + 1.0;
    let ratio_b = (var_ell2 > 1e-14).then(|| ex4 / (var_ell2 * var_ell2));
    MomentReport {
        lambda: lambda.clone(),
        p: dist.p,
        moments: [m[2], m[4], m[6], m[8]],
        var_ell2,
        ex2: var_ell2,
        ex4,
        ratio_b,
    }
}

/// Uniform bound on `E ℓ⁸` over the unit sphere: the cumulant recursion with
/// `κ_1 = 0`, `κ_2 = 1` and `|κ_j(ξ)|` otherwise, since `|Σ λ_i^j| ≤ 1` for `j ≥ 2`
/// and every recursion coefficient is nonnegative.
pub fn eighth_moment_bound(dist: &BiasedDist) -> f64 {
    let mut k: Vec<f64> = dist.cumulants(8).iter().map(|c| c.abs()).collect();
    k[1] = 0.0;
    k[2] = 1.0;
    moments_from_cumulants(&k)[8]
}

/// Intermediate values of the certificate, kept for audit output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateAudit {
    pub theta: f64,
    pub eighth_moment_bound: f64,
    /// `2(1 - θ) ≤ Var[ℓ²]` when `max λ_k² ≤ θ`.
    pub var_lower: f64,
    /// Paley–Zygmund threshold `½√(2(1-θ))`.
    pub gap: f64,
    /// ε allowed by `s(1+s) < gap`, `s = √(ε + 2ε²)`.
    pub epsilon_gap: f64,
    /// ε allowed by `2ε < 9/(16B)`.
    pub epsilon_pz: f64,
    /// `√(ε+2ε²)(1+√(ε+2ε²))` at the chosen ε.
    pub concentration: f64,
    pub pz_mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedBound {
    pub p: f64,
    pub epsilon: f64,
    pub b_bound: f64,
    pub branch1: f64,
    pub branch2: f64,
    pub q_upper: f64,
    pub audit: CertificateAudit,
}

/// Certified `q(p) ≤ q_upper < 1`, uniformly in `n`.
///
/// Spread branch (`max λ_k² ≤ θ`): `E X⁴ ≤ E ℓ⁸ - 1 ≤ C(p)` because
/// `E ℓ⁶ ≥ (E ℓ⁴)²`, so `B = C(p)/(2(1-θ))²`. Concentrated branch:
/// `E|ℓ| ≤ E|ξ| + √(1-θ)`.
pub fn certify_epsilon(p: f64, theta: f64) -> Result<CertifiedBound> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::OutsideUnitInterval(theta));
    }
    if !(p > 0.5) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let dist = BiasedDist::new(p)?;
    let branch2 = dist.mean_abs() + libm::sqrt(1.0 - theta);
    if !(branch2 < 1.0) {
        return Err(Error::ConcentratedBranchFails { branch2 });
    }
    let c = eighth_moment_bound(&dist);
    let var_lower = 2.0 * (1.0 - theta);
    let b = c / (var_lower * var_lower);
    let gap = 0.5 * libm::sqrt(var_lower);
    // s(1+s) = gap - δ, then ε + 2ε² = s².
    let s = (-1.0 + libm::sqrt(1.0 + 4.0 * (gap - EPSILON_SLACK))) / 2.0;
    let epsilon_gap = (-1.0 + libm::sqrt(1.0 + 8.0 * s * s)) / 4.0;
    let pz_mass = 9.0 / (16.0 * b);
    let epsilon_pz = (pz_mass - EPSILON_SLACK) / 2.0;
    let epsilon = epsilon_gap.min(epsilon_pz);
    if !(epsilon > 0.0) {
        return Err(Error::NoEpsilon);
    }
    let root = libm::sqrt(epsilon + 2.0 * epsilon * epsilon);
    let branch1 = 1.0 - epsilon * epsilon;
    Ok(CertifiedBound {
        p,
        epsilon,
        b_bound: b,
        branch1,
        branch2,
        q_upper: branch1.max(branch2),
        audit: CertificateAudit {
            theta,
            eighth_moment_bound: c,
            var_lower,
            gap,
            epsilon_gap,
            epsilon_pz,
            concentration: root * (1.0 + root),
            pz_mass,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImprovedBound {
    pub value: f64,
    /// `π/2 - value`, accumulated directly to avoid cancellation.
    pub gain: f64,
    pub grid_size: usize,
    pub certified_nodes: usize,
}

/// `∫₀¹ min(1, q_upper((1+ρ)/2)) dρ/√(1-ρ²)` with `ρ = sin φ`.
///
/// Each cell of the uniform φ-grid takes the larger integrand value at its
/// endpoints; nodes where certification fails count as 1.
pub fn improved_cdual_bound(grid_size: usize, certify: bool, theta: f64) -> Result<ImprovedBound> {
    if grid_size < 100 {
        return Err(Error::InvalidArgument("grid_size must be at least 100"));
    }
    let h = FRAC_PI_2 / grid_size as f64;
    let mut certified_nodes = 0;
    let q: Vec<f64> = (0..=grid_size)
        .map(|j| {
            if !certify {
                return 1.0;
            }
            let rho = libm::sin(j as f64 * h);
            match certify_epsilon((1.0 + rho) / 2.0, theta) {
                Ok(c) => {
                    certified_nodes += 1;
                    c.q_upper.min(1.0)
                }
                Err(_) => 1.0,
            }
        })
        .collect();
    let gain: f64 = q.windows(2).map(|w| h * (1.0 - w[0].max(w[1]))).sum();
    Ok(ImprovedBound { value: FRAC_PI_2 - gain, gain, grid_size, certified_nodes })
}

/// Composite Simpson in `φ` for `∫₀¹ dρ/√(1-ρ²)` and `∫₀¹ ρ dρ/√(1-ρ²)`; exact values `π/2` and 1.
pub fn quadrature_self_check(grid_size: usize) -> (f64, f64) {
    let m = grid_size.max(2) & !1;
    let h = FRAC_PI_2 / m as f64;
    let simpson = |f: &dyn Fn(f64) -> f64| {
        let inner: f64 = (1..m).map(|j| if j % 2 == 1 { 4.0 } else { 2.0 } * f(j as f64 * h)).sum();
        h / 3.0 * (f(0.0) + inner + f(FRAC_PI_2))
    };
    (simpson(&|_| 1.0), simpson(&libm::sin))
}
