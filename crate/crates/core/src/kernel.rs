//! The kernel matrix `M = (m_{i,z})` of `T` and its incomplete-beta closed forms.
//!
//! An entry depends only on the Hamming weight `k = d(z)` and on the sign of
//! `z_i`:
//!
//! * `z_i = +1`: `m⁺_k = ∫₀^{1/2} t^k (1-t)^{n-k-1} dt`, `k = 0..n-1`
//! * `z_i = -1`: `m⁻_k = -∫₀^{1/2} t^{k-1} (1-t)^{n-k} dt`, `k = 1..n`
//!
//! Both are stored as exact rationals with `f64` mirrors for the hot loops.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::binomial::{self, choose_row, pow2};
use crate::cube::{check_dim, coordinate_sign, CubeFunction, VectorField};
use crate::error::{Error, Result};
use crate::sphere::SphereVector;

/// Exact `∫₀^{1/2} t^a (1-t)^b dt` by binomial expansion of `(1-t)^b`.
pub fn beta_half(a: u64, b: u64) -> BigRational {
    choose_row(b).into_iter().enumerate().fold(BigRational::zero(), |acc, (j, c)| {
        let e = a + j as u64 + 1;
        let term = BigRational::new(c, pow2(e) * BigInt::from(e));
        if j % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    n: usize,
    m_plus: Vec<BigRational>,
    m_minus: Vec<BigRational>,
    plus_f: Vec<f64>,
    minus_f: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

pub fn kernel_table(n: usize) -> Result<KernelTable> {
    check_dim(n)?;
    let nu = n as u64;
    let m_plus: Vec<_> = (0..nu).map(|k| beta_half(k, nu - k - 1)).collect();
    let m_minus: Vec<_> = (1..=nu).map(|k| -beta_half(k - 1, nu - k)).collect();

    // Indexed by weight 0..=n; the undefined corners (plus at n, minus at 0)
    // are 0 and never reached with a nonzero coefficient.
    let mut plus_f = vec![0.0; n + 1];
    let mut minus_f = vec![0.0; n + 1];
    for k in 0..n {
        plus_f[k] = m_plus[k].to_f64().unwrap_or(0.0);
        minus_f[k + 1] = m_minus[k].to_f64().unwrap_or(0.0);
    }
    let alpha = (0..=n).map(|k| (plus_f[k] - minus_f[k]) / 2.0).collect();
    let beta = (0..=n).map(|k| (plus_f[k] + minus_f[k]) / 2.0).collect();
    Ok(KernelTable { n, m_plus, m_minus, plus_f, minus_f, alpha, beta })
}

impl KernelTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Exact `m⁺_k`, `0 ≤ k < n`.
    pub fn m_plus(&self, k: usize) -> &BigRational {
        &self.m_plus[k]
    }

    /// Exact `m⁻_k`, `1 ≤ k ≤ n`.
    pub fn m_minus(&self, k: usize) -> &BigRational {
        &self.m_minus[k - 1]
    }

    pub fn m_plus_f64(&self, k: usize) -> f64 {
        self.plus_f[k]
    }

    pub fn m_minus_f64(&self, k: usize) -> f64 {
        self.minus_f[k]
    }

    /// `m_{i,z}` for coordinate `i` and column mask `z`.
    #[inline]
    pub fn entry(&self, i: usize, z: usize) -> f64 {
        let k = z.count_ones() as usize;
        if z >> i & 1 == 1 {
            self.minus_f[k]
        } else {
            self.plus_f[k]
        }
    }

    /// Exact `m_{i,z}`.
    pub fn entry_exact(&self, i: usize, z: usize) -> &BigRational {
        let k = z.count_ones() as usize;
        if z >> i & 1 == 1 {
            self.m_minus(k)
        } else {
            self.m_plus(k)
        }
    }

    /// Column `M e_z`.
    pub fn column(&self, z: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.entry(i, z)).collect()
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: n });
        }
        Ok(())
    }
}

/// Upper binomial tail `Φ_n(k) = 2^{-n} Σ_{r>k} C(n, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialTail {
    pub n: u64,
    pub k: i64,
    /// Exact value, present for `n ≤ 64`.
    pub exact: Option<BigRational>,
    pub value: f64,
    pub log_value: f64,
}

pub const EXACT_TAIL_MAX_N: u64 = 64;
pub const LOG_TAIL_MAX_N: u64 = 10_000_000;

/// `Φ_n(k)` for `-1 ≤ k ≤ n` (with `Φ_n(-1) = 1`, `Φ_n(n) = 0`).
pub fn phi_tail(n: u64, k: i64) -> Result<BinomialTail> {
    if n == 0 || n > LOG_TAIL_MAX_N {
        return Err(Error::DimensionOutOfRange { n: n as usize, min: 1, max: LOG_TAIL_MAX_N as usize });
    }
    if k < -1 || k > n as i64 {
        return Err(Error::IndexOutOfRange { k, min: -1, max: n as i64 });
    }
    let exact = (n <= EXACT_TAIL_MAX_N).then(|| exact_tail(n, k));
    let (value, log_value) = binomial::tail_log_space(n, k);
    Ok(BinomialTail { n, k, exact, value, log_value })
}

fn exact_tail(n: u64, k: i64) -> BigRational {
    let row = choose_row(n);
    let start = (k + 1).max(0) as usize;
    let num: BigInt = row[start.min(row.len())..].iter().sum();
    BigRational::new(num, pow2(n))
}

/// `T g` evaluated through the kernel: `(Tg)_i(x) = x_i Σ_z m_{i,z} g(z·x)`.
///
/// Direct `O(n 4^n)` summation; this is the second representation of `T`
/// that `cube::t_operator` is checked against.
pub fn apply_kernel(table: &KernelTable, g: &CubeFunction) -> Result<VectorField> {
    table.check(g.n())?;
    let n = table.n;
    let size = 1usize << n;
    let components = (0..n)
        .map(|i| {
            CubeFunction::from_fn(n, |x| {
                let s: f64 = (0..size).map(|z| table.entry(i, z) * g.value(z ^ x)).sum();
                coordinate_sign(x, i) * s
            })
        })
        .collect::<Result<Vec<_>>>()?;
    VectorField::new(components)
}

#[inline]
fn gray(j: usize) -> usize {
    j ^ (j >> 1)
}

/// Walks columns in reflected Gray-code order over the index range,
/// carrying `⟨λ, σ(z)⟩` and `d(z)` with O(1) work per step.
fn gray_walk(
    table: &KernelTable,
    lambda: &[f64],
    range: Range<usize>,
    mut visit: impl FnMut(usize, f64),
) {
    let total: f64 = lambda.iter().sum();
    if range.is_empty() {
        return;
    }
    let mut z = gray(range.start);
    let mut dot: f64 = lambda.iter().enumerate().map(|(i, l)| coordinate_sign(z, i) * l).sum();
    let mut d = z.count_ones() as usize;
    for j in range.clone() {
        visit(z, table.alpha[d] * dot + table.beta[d] * total);
        if j + 1 == range.end {
            break;
        }
        let bit = (j + 1).trailing_zeros() as usize;
        z ^= 1 << bit;
        if z >> bit & 1 == 1 {
            dot -= 2.0 * lambda[bit];
            d += 1;
        } else {
            dot += 2.0 * lambda[bit];
            d -= 1;
        }
    }
}

/// `Σ_{z in the Gray-index range} |(Mᵀλ)_z|`; a partition of `0..2^n` sums to [`objective`].
pub fn objective_range(table: &KernelTable, lambda: &SphereVector, range: Range<usize>) -> Result<f64> {
    table.check(lambda.dim())?;
    if range.end > 1 << table.n {
        return Err(Error::InvalidArgument("Gray-code range exceeds 2^n"));
    }
    let mut acc = 0.0;
    gray_walk(table, lambda.coords(), range, |_, c| acc += c.abs());
    Ok(acc)
}

/// `‖Mᵀλ‖₁`, the quantity maximized over the sphere to get `‖M‖_{∞→2}`.
pub fn objective(table: &KernelTable, lambda: &SphereVector) -> Result<f64> {
    objective_range(table, lambda, 0..1 << table.n)
}

/// `‖Mᵀλ‖₁` together with the maximizing signs `u = sign(Mᵀλ)` (`sign(0) = +1`), by column mask.
pub fn objective_and_signs(table: &KernelTable, lambda: &SphereVector) -> Result<(f64, Vec<bool>)> {
    table.check(lambda.dim())?;
    let mut signs = vec![false; 1 << table.n];
    let mut acc = 0.0;
    gray_walk(table, lambda.coords(), 0..1 << table.n, |z, c| {
        acc += c.abs();
        signs[z] = c < 0.0;
    });
    Ok((acc, signs))
}

/// `M u` for `u_z = -1` where `negative[z]`, else `+1`.
pub fn apply_signs(table: &KernelTable, negative: &[bool]) -> Result<Vec<f64>> {
    let n = table.n;
    if negative.len() != 1 << n {
        return Err(Error::LengthMismatch { expected: 1 << n, got: negative.len() });
    }
    // (Mu)_i = Σ_z u_z β_d + Σ_z u_z α_d σ_i(z)
    let mut base = 0.0;
    let mut alpha_total = 0.0;
    let mut alpha_on_bit = vec![0.0; n];
    for (z, &neg) in negative.iter().enumerate() {
        let d = z.count_ones() as usize;
        let u = if neg { -1.0 } else { 1.0 };
        base += u * table.beta[d];
        let w = u * table.alpha[d];
        alpha_total += w;
        let mut bits = z;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            alpha_on_bit[i] += w;
            bits &= bits - 1;
        }
    }
    Ok(alpha_on_bit.iter().map(|&a| base + alpha_total - 2.0 * a).collect())
}
