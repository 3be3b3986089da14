//! The Gaussian isoperimetric profile `I = φ ∘ Φ⁻¹` and the pointwise
//! inequalities built on it.

use alloc::vec::Vec;

use core::f64::consts::{PI, SQRT_2};

use crate::constants::{INV_SQRT_2PI, SQRT_2PI};
use crate::cube::{partial, CubeFunction};
use crate::error::{Error, Result};

/// Standard normal density.
pub fn normal_pdf(y: f64) -> f64 {
    INV_SQRT_2PI * libm::exp(-0.5 * y * y)
}

/// Standard normal CDF.
pub fn normal_cdf(y: f64) -> f64 {
    0.5 * libm::erfc(-y / SQRT_2)
}

// Acklam's rational approximation, lower region and central region.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] =
    [7.784_695_709_041_462e-3, 3.224_671_290_700_398e-1, 2.445_134_137_142_996, 3.754_408_661_907_416];

fn inverse_guess(x: f64) -> f64 {
    if x < 0.02425 {
        let q = libm::sqrt(-2.0 * libm::log(x));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = x - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// `Φ⁻¹(x)` for `x ∈ (0, 1)`: rational guess plus three Newton steps on `Φ`.
pub fn normal_quantile(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OutsideUnitInterval(x));
    }
    if x > 0.5 {
        return Ok(-normal_quantile(1.0 - x)?);
    }
    let mut y = inverse_guess(x);
    for _ in 0..3 {
        let pdf = normal_pdf(y);
        if pdf == 0.0 {
            break;
        }
        y -= (normal_cdf(y) - x) / pdf;
    }
    Ok(y)
}

/// `(I(x), I′(x), I″(x))` with `I′ = -Φ⁻¹` and `I″ = -1/I`.
pub fn profile_eval(x: f64) -> Result<(f64, f64, f64)> {
    let y = normal_quantile(x)?;
    let i = normal_pdf(y);
    Ok((i, -y, -1.0 / i))
}

/// `I(x)`, extended by `I(0) = I(1) = 0`.
pub fn profile(x: f64) -> Result<f64> {
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(profile_eval(x)?.0)
}

/// `I(b) - I(a) - I′(b)(b - a) - k(a - b)²/2`; nonnegative everywhere iff `k ≤ √(2π)`.
pub fn two_point_defect(a: f64, b: f64, k: f64) -> Result<f64> {
    let (ia, _, _) = profile_eval(a)?;
    let (ib, dib, _) = profile_eval(b)?;
    Ok(ib - ia - dib * (b - a) - k * (a - b) * (a - b) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectMinimum {
    pub value: f64,
    pub a: f64,
    pub b: f64,
}

/// Uniform grid of `points` nodes on `[margin, 1 - margin]`.
pub fn unit_grid(points: usize, margin: f64) -> Result<Vec<f64>> {
    if points < 2 || !(margin > 0.0 && margin < 0.5) {
        return Err(Error::InvalidArgument("grid needs at least 2 points and margin in (0, 1/2)"));
    }
    let h = (1.0 - 2.0 * margin) / (points - 1) as f64;
    Ok((0..points).map(|j| margin + j as f64 * h).collect())
}

/// Visits `(a, b, defect)` over `grid × grid`, evaluating the profile once per node.
pub fn defect_grid(grid: &[f64], k: f64, mut visit: impl FnMut(f64, f64, f64)) -> Result<()> {
    let evals: Vec<(f64, f64)> = grid
        .iter()
        .map(|&x| profile_eval(x).map(|(i, d, _)| (i, d)))
        .collect::<Result<_>>()?;
    for (ia, &a) in evals.iter().zip(grid) {
        for (ib, &b) in evals.iter().zip(grid) {
            visit(a, b, ib.0 - ia.0 - ib.1 * (b - a) - k * (a - b) * (a - b) / 2.0);
        }
    }
    Ok(())
}

/// Minimum of the two-point defect over `grid × grid`.
pub fn min_two_point_defect(grid: &[f64], k: f64) -> Result<DefectMinimum> {
    let mut best = DefectMinimum { value: f64::INFINITY, a: f64::NAN, b: f64::NAN };
    defect_grid(grid, k, |a, b, d| {
        if d < best.value {
            best = DefectMinimum { value: d, a, b };
        }
    })?;
    Ok(best)
}

/// `I(b) - I(a) - I′(b)(b - a) + (c/2) I″(b)(a - b)²`.
pub fn curvature_defect(a: f64, b: f64, c: f64) -> Result<f64> {
    let (ia, _, _) = profile_eval(a)?;
    let (ib, dib, d2ib) = profile_eval(b)?;
    Ok(ib - ia - dib * (b - a) + c / 2.0 * d2ib * (a - b) * (a - b))
}

/// First `b ∈ {10⁻², ..., 10⁻¹²}` at which the curvature-weighted inequality
/// fails for `a = 1/2`; returns `(a, b, value)`.
pub fn two_point_curvature_fails(c: f64) -> Result<(f64, f64, f64)> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument("c must be positive"));
    }
    let a = 0.5;
    for e in 2..=12 {
        let b = libm::pow(10.0, -(e as f64));
        let v = curvature_defect(a, b, c)?;
        if v < 0.0 {
            return Ok((a, b, v));
        }
    }
    Err(Error::NoWitness)
}

/// `max B / min(-B″)` over sampled values; requires `-B″ > 0` everywhere.
pub fn mb_functional(b_values: &[f64], b_second: &[f64]) -> Result<f64> {
    if b_values.len() != b_second.len() {
        return Err(Error::LengthMismatch { expected: b_values.len(), got: b_second.len() });
    }
    if b_values.is_empty() {
        return Err(Error::InvalidArgument("empty grid"));
    }
    let mut min_curv = f64::INFINITY;
    for &s in b_second {
        if !(-s > 0.0) {
            return Err(Error::NotConcave);
        }
        min_curv = min_curv.min(-s);
    }
    let max_b = b_values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    Ok(max_b / min_curv)
}

/// Interior grid `j/(points+1)`, `j = 1..=points`; contains 1/2 when `points` is odd.
pub fn open_grid(points: usize) -> Vec<f64> {
    (1..=points).map(|j| j as f64 / (points + 1) as f64).collect()
}

/// Samples `B` and `B″` from closures and applies [`mb_functional`].
pub fn mb_functional_of(
    grid: &[f64],
    b: impl Fn(f64) -> f64,
    b_second: impl Fn(f64) -> f64,
) -> Result<f64> {
    let vals: Vec<f64> = grid.iter().map(|&x| b(x)).collect();
    let secs: Vec<f64> = grid.iter().map(|&x| b_second(x)).collect();
    mb_functional(&vals, &secs)
}

/// `B = (x(1-x))^a` and its second derivative.
pub fn power_family(a: f64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let b = move |x: f64| libm::pow(x * (1.0 - x), a);
    let b2 = move |x: f64| {
        let u = x * (1.0 - x);
        let du = 1.0 - 2.0 * x;
        a * libm::pow(u, a - 2.0) * ((a - 1.0) * du * du - 2.0 * u)
    };
    (b, b2)
}

/// `M_I` for the profile itself on an interior grid.
pub fn mb_profile(grid: &[f64]) -> Result<f64> {
    let evals: Vec<(f64, f64, f64)> = grid.iter().map(|&x| profile_eval(x)).collect::<Result<_>>()?;
    let vals: Vec<f64> = evals.iter().map(|e| e.0).collect();
    let secs: Vec<f64> = evals.iter().map(|e| e.2).collect();
    mb_functional(&vals, &secs)
}

/// The constant `π√(2M)` produced by the Bellman chain from `M_B = M`.
pub fn chain_constant(m: f64) -> f64 {
    PI * libm::sqrt(2.0 * m)
}

/// `2p(1-p)/I(p)`.
pub fn two_value_ratio(p: f64) -> Result<f64> {
    Ok(2.0 * p * (1.0 - p) / profile_eval(p)?.0)
}

/// Grid maximum of `2p(1-p)/I(p)` and its argmax; the grid contains 1/2.
pub fn two_value_constant(points: usize) -> Result<(f64, f64)> {
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for p in open_grid(points | 1) {
        let v = two_value_ratio(p)?;
        if v > best.0 {
            best = (v, p);
        }
    }
    Ok(best)
}

/// `E √(I(f)² + |∇f|²) - I(E f)` with half-difference gradients; Bobkov's
/// inequality says this is nonnegative.
pub fn bobkov_check(f: &CubeFunction) -> Result<f64> {
    for &v in f.values() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::ValueOutOfRange(v));
        }
    }
    let n = f.n();
    let partials: Vec<CubeFunction> = (0..n).map(|i| partial(f, i)).collect::<Result<_>>()?;
    let mut acc = 0.0;
    for (z, &v) in f.values().iter().enumerate() {
        let grad2: f64 = partials.iter().map(|d| d.values()[z] * d.values()[z]).sum();
        let i = profile(v)?;
        acc += libm::sqrt(i * i + grad2);
    }
    Ok(acc / f.values().len() as f64 - profile(f.mean())?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricSetReport {
    /// `1/(2√2 I(1/2)) = √π/2`.
    pub c1: f64,
    /// `1/(4√2 I(3/4))`.
    pub c2: f64,
    pub ana_max: f64,
    pub ana_argmax: f64,
}

/// `α ↦ 2α(1-α)/(√2 I(α))`.
pub fn ana_ratio(alpha: f64) -> Result<f64> {
    Ok(2.0 * alpha * (1.0 - alpha) / (SQRT_2 * profile_eval(alpha)?.0))
}

pub fn symmetric_set_constants() -> Result<SymmetricSetReport> {
    let c1 = 1.0 / (2.0 * SQRT_2 * profile_eval(0.5)?.0);
    let c2 = 1.0 / (4.0 * SQRT_2 * profile_eval(0.75)?.0);
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for a in open_grid(9_999) {
        let v = ana_ratio(a)?;
        if v > best.0 {
            best = (v, a);
        }
    }
    Ok(SymmetricSetReport { c1, c2, ana_max: best.0, ana_argmax: best.1 })
}

/// `√(2π)`, the largest admissible two-point constant.
pub const TWO_POINT_K: f64 = SQRT_2PI;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{SQRT_HALF_PI, SQRT_PI_OVER_2};

    #[test]
    fn quantile_round_trip() {
        for j in 0..=1000 {
            let x = 1e-10 + (1.0 - 2e-10) * j as f64 / 1000.0;
            let y = normal_quantile(x).unwrap();
            assert!((normal_cdf(y) - x).abs() <= 1e-13, "x = {x}");
        }
        for x in [1e-10, 1e-7, 1e-3] {
            assert!((normal_cdf(normal_quantile(x).unwrap()) - x).abs() / x < 1e-12);
        }
        assert!(normal_quantile(0.0).is_err() && normal_quantile(1.0).is_err());
    }

    #[test]
    fn profile_examples() {
        let (i, d, d2) = profile_eval(0.5).unwrap();
        assert!((i - INV_SQRT_2PI).abs() < 1e-16 && d == 0.0 && (d2 + SQRT_2PI).abs() < 1e-14);
        let i34 = profile_eval(0.75).unwrap().0;
        assert!((i34 - 0.317_776_572_684_106_9).abs() < 1e-14);
        for x in [0.01, 0.2, 0.4] {
            assert!((profile(x).unwrap() - profile(1.0 - x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for x in [0.05, 0.3, 0.5, 0.8, 0.97] {
            let h = 1e-5;
            let f = |t: f64| profile_eval(t).unwrap().0;
            let (_, d, d2) = profile_eval(x).unwrap();
            assert!(((f(x + h) - f(x - h)) / (2.0 * h) - d).abs() < 1e-7);
            assert!(((f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h) - d2).abs() < 1e-3 * d2.abs());
        }
    }

    #[test]
    fn two_point_examples() {
        assert_eq!(two_point_defect(0.3, 0.3, 5.0).unwrap(), 0.0);
        assert!(two_point_defect(0.5, 0.501, SQRT_2PI + 0.01).unwrap() < 0.0);
        assert!(two_point_defect(0.499, 0.5, SQRT_2PI * 1.001).unwrap() < 0.0);
        let grid = unit_grid(201, 5e-4).unwrap();
        assert!(min_two_point_defect(&grid, SQRT_2PI).unwrap().value >= -1e-12);
    }

    #[test]
    fn curvature_witnesses() {
        let (a, b, v) = two_point_curvature_fails(1.0).unwrap();
        assert!(a == 0.5 && b <= 1e-2 && v < 0.0);
        let (_, b_small, _) = two_point_curvature_fails(0.01).unwrap();
        assert!(b_small < b);
        assert_eq!(curvature_defect(0.5, 0.5, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn mb_examples() {
        let grid = open_grid(999);
        let m = mb_functional_of(&grid, |x| x * (1.0 - x), |_| -2.0).unwrap();
        assert_eq!(m, 0.125);
        let m2 = mb_functional_of(&grid, |x| 2.0 * x * (1.0 - x), |_| -4.0).unwrap();
        assert_eq!(m2, 0.125);
        assert!((mb_profile(&grid).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-9);
        let (b, b2) = power_family(1.2);
        assert_eq!(mb_functional_of(&grid, b, b2), Err(Error::NotConcave));
        assert!((chain_constant(1.0 / (2.0 * PI)) - libm::sqrt(PI)).abs() < 1e-15);
        assert!((chain_constant(0.125) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_value_and_symmetric_sets() {
        let (v, arg) = two_value_constant(10_001).unwrap();
        assert!((v - SQRT_HALF_PI).abs() < 1e-6 && (arg - 0.5).abs() < 1e-12);
        assert!((two_value_ratio(0.5).unwrap() - SQRT_HALF_PI).abs() < 1e-15);
        assert!(two_value_ratio(0.99).unwrap() < v);
        let r = symmetric_set_constants().unwrap();
        assert!((r.c1 - SQRT_PI_OVER_2).abs() < 1e-15);
        assert!((r.c2 - 0.556).abs() < 5e-4 && r.c2 < r.c1);
        assert!((r.ana_max - SQRT_PI_OVER_2).abs() < 1e-12 && (r.ana_argmax - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bobkov_constant_half() {
        let f = CubeFunction::constant(3, 0.5).unwrap();
        assert!(bobkov_check(&f).unwrap().abs() < 1e-16);
        let bad = CubeFunction::constant(2, 1.5).unwrap();
        assert!(bobkov_check(&bad).is_err());
    }
}
