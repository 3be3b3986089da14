//! Exact combinatorial sequences, their limits, and the slice decomposition
//! of the dual objective.

use alloc::vec::Vec;

use core::f64::consts::{FRAC_PI_2, LN_2};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::binomial::{choose, exact_pmf, pmf, pow2, tails_all};
use crate::constants::{even_majority_limit, SQRT_2_OVER_PI, TWO_OVER_SQRT_PI};
use crate::error::{Error, Result};
use crate::kernel::{kernel_table, objective, phi_tail};
use crate::sphere::SphereVector;

/// Up to this `n` binomial probabilities come from exact rationals.
pub const EXACT_MAX_N: u64 = 60;
pub const SERIES_MAX_N: u64 = 1_000_000;
/// Largest `n` for the `2^n` slice enumerations.
pub const SLICE_MAX_N: usize = 14;
pub const ENUMERATION_MAX_N: usize = 10;

fn binom_pmf(n: u64, k: u64) -> f64 {
    if n <= EXACT_MAX_N {
        exact_pmf(n, k).to_f64().expect("finite")
    } else {
        pmf(n, k)
    }
}

fn check_range(n: u64, max: u64) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::DimensionOutOfRange { n: n as usize, min: 1, max: max as usize });
    }
    Ok(())
}

/// `‖∇ Maj_n‖₁` for odd `n` and the ratio `E|Maj_n| / ‖∇ Maj_n‖₁`.
pub fn majority_odd(n: u64) -> Result<(f64, f64)> {
    check_range(n, SERIES_MAX_N)?;
    if n % 2 == 0 {
        return Err(Error::Parity { n: n as usize, expected: "odd" });
    }
    let grad = 2.0 * binom_pmf(n, n.div_ceil(2)) * libm::sqrt(n.div_ceil(2) as f64);
    Ok((grad, 1.0 / grad))
}

/// Three-valued majority (0 on ties) for even `n`: `(‖∇f‖₁, E|f|, ratio)`.
pub fn majority_even(n: u64) -> Result<(f64, f64, f64)> {
    check_range(n, SERIES_MAX_N)?;
    if n % 2 == 1 {
        return Err(Error::Parity { n: n as usize, expected: "even" });
    }
    let h = n / 2;
    let center = binom_pmf(n, h);
    let grad = center * libm::sqrt(n as f64) / 2.0 + binom_pmf(n, h + 1) * libm::sqrt((h + 1) as f64);
    let mean_abs = 1.0 - center;
    Ok((grad, mean_abs, mean_abs / grad))
}

/// `E|ε_1 + ... + ε_n| / √n` for odd `n`.
pub fn clt_bernoulli(n: u64) -> Result<f64> {
    check_range(n, SERIES_MAX_N)?;
    if n % 2 == 0 {
        return Err(Error::Parity { n: n as usize, expected: "odd" });
    }
    Ok(libm::sqrt(n as f64) * binom_pmf(n - 1, (n - 1) / 2))
}

/// `Σ_z max_i |m_{i,z}| = m⁺_0 + Σ_{k≥1} Φ_n(k-1)/k`.
pub fn l1_growth(n: u64) -> Result<f64> {
    check_range(n, SERIES_MAX_N)?;
    let tails = tails_all(n);
    let head = -libm::expm1(-(n as f64) * LN_2) / n as f64;
    let body: f64 = (1..=n).map(|k| tails[k as usize - 1] / k as f64).sum();
    Ok(head + body)
}

/// The same sum written as `∫₀¹ (1 - ((1+ρ)/2)^n)/(1-ρ) dρ + (1 - 2^{-n})/n`,
/// with the integral evaluated as `Σ_{j=1}^n (1 - 2^{-j})/j`.
pub fn l1_growth_integral(n: u64) -> Result<f64> {
    check_range(n, SERIES_MAX_N)?;
    let tail = |j: u64| -libm::expm1(-(j as f64) * LN_2);
    Ok((1..=n).map(|j| tail(j) / j as f64).sum::<f64>() + tail(n) / n as f64)
}

/// Exact `l1_growth` as a rational for `n ≤ 64`.
pub fn l1_growth_exact(n: u64) -> Result<BigRational> {
    check_range(n, 64)?;
    let one = BigRational::from_integer(BigInt::from(1));
    let mut acc = (&one - BigRational::new(BigInt::from(1), pow2(n))) / BigRational::from_integer(BigInt::from(n));
    for k in 1..=n {
        let tail = phi_tail(n, k as i64 - 1)?.exact.expect("n <= 64");
        acc += tail / BigRational::from_integer(BigInt::from(k));
    }
    Ok(acc)
}

/// `Σ_z max_i |m_{i,z}|` by enumerating all columns.
pub fn l1_growth_enumerated(n: usize) -> Result<f64> {
    if n == 0 || n > ENUMERATION_MAX_N {
        return Err(Error::DimensionOutOfRange { n, min: 1, max: ENUMERATION_MAX_N });
    }
    let t = kernel_table(n)?;
    Ok((0..1usize << n).map(|z| (0..n).fold(0.0, |m: f64, i| m.max(t.entry(i, z).abs()))).sum())
}

/// `Σ_{k=1}^{n-1} Φ_n(k)/√(k(n-k))`, which tends to `π/2`.
pub fn lp_sum(n: u64) -> Result<f64> {
    check_range(n, SERIES_MAX_N)?;
    let tails = tails_all(n);
    Ok((1..n).map(|k| tails[k as usize] / libm::sqrt((k * (n - k)) as f64)).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    MajorityOdd,
    MajorityEven,
    Clt,
    L1Growth,
    LpSum,
}

impl Series {
    pub const ALL: [Series; 5] =
        [Series::MajorityOdd, Series::MajorityEven, Series::Clt, Series::L1Growth, Series::LpSum];

    pub fn name(self) -> &'static str {
        match self {
            Series::MajorityOdd => "majority-odd",
            Series::MajorityEven => "majority-even",
            Series::Clt => "clt",
            Series::L1Growth => "l1-growth",
            Series::LpSum => "lp-sum",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Whether `n` is a valid index for this series.
    pub fn admits(self, n: u64) -> bool {
        match self {
            Series::MajorityOdd | Series::Clt => n % 2 == 1,
            Series::MajorityEven => n % 2 == 0,
            Series::L1Growth | Series::LpSum => true,
        }
    }

    pub fn point(self, n: u64) -> Result<SeriesPoint> {
        let (value, reference) = match self {
            Series::MajorityOdd => (majority_odd(n)?.0, TWO_OVER_SQRT_PI),
            Series::MajorityEven => (majority_even(n)?.0, even_majority_limit()),
            Series::Clt => (clt_bernoulli(n)?, SQRT_2_OVER_PI),
            Series::L1Growth => (l1_growth(n)?, libm::log(n as f64)),
            Series::LpSum => (lp_sum(n)?, FRAC_PI_2),
        };
        Ok(SeriesPoint { n, value, reference, gap: value - reference })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub n: u64,
    pub value: f64,
    pub reference: f64,
    pub gap: f64,
}

/// `X_i^k` on the weight-`k` slice: `n/(2(n-k))` if `z_i = +1`, `-n/(2k)` if `z_i = -1`.
pub fn slice_variable(n: usize, k: usize, negative: bool) -> BigRational {
    if negative {
        -BigRational::new(BigInt::from(n), BigInt::from(2 * k))
    } else {
        BigRational::new(BigInt::from(n), BigInt::from(2 * (n - k)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    pub n: usize,
    pub k: usize,
    pub diag: BigRational,
    pub offdiag: BigRational,
    pub spectral_norm: BigRational,
    /// `√(spectral_norm)`, the Cauchy–Schwarz bound on `E[|Σ v_i X_i^k| | d = k]`.
    pub cs_bound: f64,
    /// Slice moments computed by enumeration agree exactly with the closed forms.
    pub exact_match: bool,
    pub max_mean_abs: BigRational,
}

/// Closed-form Gram matrix of `(X_i^k)` on the weight-`k` slice, checked
/// against exact enumeration of the `C(n, k)` slice points.
pub fn gram_check(n: usize, k: usize) -> Result<GramReport> {
    if n < 2 || n > SLICE_MAX_N {
        return Err(Error::DimensionOutOfRange { n, min: 2, max: SLICE_MAX_N });
    }
    if k == 0 || k >= n {
        return Err(Error::IndexOutOfRange { k: k as i64, min: 1, max: n as i64 - 1 });
    }
    let diag = BigRational::new(BigInt::from(n * n), BigInt::from(4 * k * (n - k)));
    let offdiag = -diag.clone() / BigRational::from_integer(BigInt::from(n - 1));
    let spectral_norm = diag.clone() * BigRational::new(BigInt::from(n), BigInt::from(n - 1));

    let plus = slice_variable(n, k, false);
    let minus = slice_variable(n, k, true);
    let mut mean = alloc::vec![BigRational::zero(); n];
    let mut gram = alloc::vec![BigRational::zero(); n * n];
    for z in (0..1usize << n).filter(|z| z.count_ones() as usize == k) {
        let x: Vec<&BigRational> = (0..n).map(|i| if z >> i & 1 == 1 { &minus } else { &plus }).collect();
        for i in 0..n {
            mean[i] += x[i];
            for j in 0..n {
                gram[i * n + j] += x[i] * x[j];
            }
        }
    }
    let count = BigRational::from_integer(choose(n as u64, k as u64));
    let mut exact_match = true;
    let mut max_mean_abs = BigRational::zero();
    for i in 0..n {
        let m = &mean[i] / &count;
        if m.abs() > max_mean_abs {
            max_mean_abs = m.abs();
        }
        exact_match &= m.is_zero();
        for j in 0..n {
            let g = &gram[i * n + j] / &count;
            exact_match &= g == if i == j { diag.clone() } else { offdiag.clone() };
        }
    }
    let cs_bound = libm::sqrt(spectral_norm.to_f64().expect("finite"));
    Ok(GramReport { n, k, diag, offdiag, spectral_norm, cs_bound, exact_match, max_mean_abs })
}

fn check_slice_lambda(lambda: &SphereVector) -> Result<usize> {
    let n = lambda.dim();
    if n > SLICE_MAX_N {
        return Err(Error::DimensionOutOfRange { n, min: 1, max: SLICE_MAX_N });
    }
    Ok(n)
}

/// `E[|Σ λ_i X_i^k| | d = k]` for every `k` (`k = 0` and `k = n` use whichever
/// branch is defined on that slice).
pub fn slice_means(lambda: &SphereVector) -> Result<Vec<f64>> {
    let n = check_slice_lambda(lambda)?;
    let l = lambda.coords();
    let mut sums = alloc::vec![0.0; n + 1];
    for z in 0..1usize << n {
        let k = z.count_ones() as usize;
        let nf = n as f64;
        let s: f64 = (0..n)
            .map(|i| {
                let x = if z >> i & 1 == 1 { -nf / (2 * k) as f64 } else { nf / (2 * (n - k)) as f64 };
                l[i] * x
            })
            .sum();
        sums[k] += s.abs();
    }
    Ok(sums
        .iter()
        .enumerate()
        .map(|(k, s)| s / choose(n as u64, k as u64).to_f64().expect("finite"))
        .collect())
}

/// The first slice formula `(2/n) Σ_{k=0}^{n-1} Φ_n(k) E[|Σ λ_i X_i^k| | d = k]`.
pub fn first_formula(lambda: &SphereVector) -> Result<f64> {
    let n = check_slice_lambda(lambda)?;
    let means = slice_means(lambda)?;
    let tails = tails_all(n as u64);
    Ok(2.0 / n as f64 * (0..n).map(|k| tails[k] * means[k]).sum::<f64>())
}

/// `|objective(λ) - first_formula(λ)|`; bounded by `2/√(n+1)`.
pub fn decomposition_gap(lambda: &SphereVector) -> Result<f64> {
    let n = check_slice_lambda(lambda)?;
    let obj = objective(&kernel_table(n)?, lambda)?;
    Ok((obj - first_formula(lambda)?).abs())
}

/// `(2/n) Σ_{k=1}^{⌊n/2⌋} E[|Σ λ_i X_i^k| | d = k]`; the `k = 0` term is taken as 0.
pub fn cdsecond_value(lambda: &SphereVector) -> Result<f64> {
    let n = check_slice_lambda(lambda)?;
    let means = slice_means(lambda)?;
    Ok(2.0 / n as f64 * (1..=n / 2).map(|k| means[k]).sum::<f64>())
}
