//! Binomial(n, 1/2) probabilities, exact and in log space.
//!
//! The log-space path uses Loader's saddle-point expansion so that
//! individual probabilities keep ~1e-15 relative accuracy for very large n,
//! where a plain log-gamma difference would lose digits to cancellation.

use alloc::vec::Vec;

use core::f64::consts::{LN_2, PI};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `C(n, k)` as a big integer.
pub fn choose(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

pub fn pow2(e: u64) -> BigInt {
    BigInt::one() << e as usize
}

/// Row `C(n, 0), ..., C(n, n)`.
pub fn choose_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

/// Exact `2^{-n} C(n, k)`.
pub fn exact_pmf(n: u64, k: u64) -> BigRational {
    BigRational::new(choose(n, k), pow2(n))
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln(n!) - ln(√(2πn) (n/e)^n)`.
fn stirlerr(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15.0 {
        return libm::lgamma(n + 1.0) - (n + 0.5) * libm::log(n) + n - LN_SQRT_2PI;
    }
    let nn = n * n;
    if n > 500.0 {
        return (S0 - S1 / nn) / n;
    }
    if n > 80.0 {
        return (S0 - (S1 - S2 / nn) / nn) / n;
    }
    if n > 35.0 {
        return (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n;
    }
    (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
}

/// Deviance term `x ln(x/np) + np - x`, computed without cancellation.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        let mut j = 1;
        loop {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1;
        }
    }
    x * libm::log(x / np) + np - x
}

/// `ln(2^{-n} C(n, k))`.
pub fn ln_pmf(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return -(n as f64) * LN_2;
    }
    let (nf, kf) = (n as f64, k as f64);
    let half = nf / 2.0;
    let lc = stirlerr(nf) - stirlerr(kf) - stirlerr(nf - kf) - bd0(kf, half) - bd0(nf - kf, half);
    let lf = libm::log(2.0 * PI) + libm::log(kf) + libm::log1p(-kf / nf);
    lc - 0.5 * lf
}

pub fn pmf(n: u64, k: u64) -> f64 {
    libm::exp(ln_pmf(n, k))
}

/// Upper tail `Φ_n(k) = P[Bin(n, 1/2) > k]` and its logarithm, for `-1 ≤ k ≤ n`.
///
/// Sums whichever side is the smaller probability and starts from the
/// term nearest the boundary, so the result keeps relative accuracy deep
/// in either tail.
pub fn tail_log_space(n: u64, k: i64) -> (f64, f64) {
    if k < 0 {
        return (1.0, 0.0);
    }
    let k = k as u64;
    if k >= n {
        return (0.0, f64::NEG_INFINITY);
    }
    // Upper tail r = k+1..n, or complementary lower tail r = 0..k.
    let upper_small = 2 * (k + 1) > n;
    let lead = if upper_small { k + 1 } else { k };
    let lead_ln = ln_pmf(n, lead);
    let accumulate = |terms: &mut dyn Iterator<Item = u64>| {
        let mut scaled = 0.0;
        for r in terms {
            let term = libm::exp(ln_pmf(n, r) - lead_ln);
            scaled += term;
            if term < 1e-17 * scaled {
                break;
            }
        }
        scaled
    };
    let scaled =
        if upper_small { accumulate(&mut (k + 1..=n)) } else { accumulate(&mut (0..=k).rev()) };
    let side_ln = lead_ln + libm::log(scaled);
    if upper_small {
        (libm::exp(side_ln), side_ln)
    } else {
        let v = -libm::expm1(side_ln);
        (v, libm::log1p(-libm::exp(side_ln)))
    }
}

/// All tails `Φ_n(k)` for `k = 0..=n`, accumulated from the top.
pub fn tails_all(n: u64) -> Vec<f64> {
    let mut out = alloc::vec![0.0; n as usize + 1];
    let mut acc = 0.0;
    for k in (0..n).rev() {
        acc += pmf(n, k + 1);
        out[k as usize] = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn choose_small_values() {
        assert_eq!(choose(4, 2), BigInt::from(6));
        assert_eq!(choose(30, 15), BigInt::from(155_117_520u64));
        assert_eq!(choose(3, 4), BigInt::zero());
        let row = choose_row(6);
        assert_eq!(row.iter().map(|c| c.to_u64().unwrap()).collect::<Vec<_>>(), [
            1, 6, 15, 20, 15, 6, 1
        ]);
    }

    #[test]
    fn log_pmf_matches_exact() {
        for n in [1u64, 2, 7, 20, 33, 64, 100, 257] {
            for k in 0..=n {
                let exact = exact_pmf(n, k).to_f64().unwrap();
                let approx = pmf(n, k);
                assert!(((approx - exact) / exact).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn tail_matches_exact() {
        for n in [1u64, 4, 17, 40, 64] {
            for k in -1..=n as i64 {
                let exact: BigRational = (k + 1..=n as i64)
                    .map(|r| exact_pmf(n, r as u64))
                    .fold(BigRational::zero(), |a, b| a + b);
                let exact = exact.to_f64().unwrap();
                let (v, lv) = tail_log_space(n, k);
                if exact == 0.0 {
                    assert_eq!(v, 0.0);
                } else {
                    assert!(((v - exact) / exact).abs() < 1e-12, "n={n} k={k}");
                    assert!((libm::exp(lv) - exact).abs() / exact < 1e-12);
                }
            }
        }
    }

    #[test]
    fn huge_n_is_finite_and_symmetric() {
        let n = 10_000_000u64;
        let (center, _) = tail_log_space(n, (n / 2) as i64 - 1);
        // P[X > n/2 - 1] = 1/2 + pmf(n/2)/2
        let expect = 0.5 + pmf(n, n / 2) / 2.0;
        assert!((center - expect).abs() / expect < 1e-10);
        let (far, ln_far) = tail_log_space(n, (n / 2 + 20_000) as i64);
        assert!(far > 0.0 && ln_far < -70.0 && ln_far > -90.0);
    }
}
