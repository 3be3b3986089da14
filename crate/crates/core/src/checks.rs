//! Residuals of the exact identities, for property tests and the `verify` report.
//!
//! Each function returns the worst absolute deviation it saw (or a boolean for
//! the rational identities); callers compare against their own tolerance.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::asymptotics::{decomposition_gap, gram_check};
use crate::binomial::choose;
use crate::cube::{
    center, creation, gradient, partial, semigroup, t_operator, CubeFunction, VectorField,
};
use crate::error::Result;
use crate::kernel::{apply_kernel, kernel_table, phi_tail};
use crate::sphere::SphereVector;

/// Uniform values in `[lo, hi)`.
pub fn random_function<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Result<CubeFunction> {
    CubeFunction::from_fn(n, |_| rng.random_range(lo..hi))
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `max_i |E[(∂_i f) g] - E[f (∂*_i g)]|`.
pub fn adjointness_residual(f: &CubeFunction, g: &CubeFunction) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..f.n() {
        let lhs = partial(f, i)?.inner(g)?;
        let rhs = f.inner(&creation(g, i)?)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// `‖P_s P_t f - P_{s+t} f‖_∞` together with the idempotence of `P₀` centering.
pub fn semigroup_residual(f: &CubeFunction, s: f64, t: f64) -> Result<f64> {
    let composed = semigroup(&semigroup(f, t)?, s)?;
    let direct = semigroup(f, s + t)?;
    let c = center(f);
    Ok(composed.max_abs_diff(&direct)?.max(center(&c).max_abs_diff(&c)?))
}

/// `max_i ‖∂_i P_t f - e^{-t} P_t ∂_i f‖_∞`.
pub fn commutation_residual(f: &CubeFunction, t: f64) -> Result<f64> {
    let lhs = gradient(&semigroup(f, t)?);
    let decay = libm::exp(-t);
    let rhs = gradient(f)
        .components()
        .iter()
        .map(|c| semigroup(c, t).map(|p| p.scale(decay)))
        .collect::<Result<Vec<_>>>()?;
    lhs.max_abs_diff(&VectorField::new(rhs)?)
}

/// `‖Σ_k ∂*_k (T g)_k - P₀ g‖_∞`.
pub fn t_identity_residual(g: &CubeFunction) -> Result<f64> {
    let tg = t_operator(g);
    let mut acc = CubeFunction::constant(g.n(), 0.0)?;
    for (k, comp) in tg.components().iter().enumerate() {
        acc = acc.add(&creation(comp, k)?)?;
    }
    acc.max_abs_diff(&center(g))
}

/// `‖T g - K g‖` between the spectral operator and the kernel sum.
pub fn t_kernel_residual(g: &CubeFunction) -> Result<f64> {
    let table = kernel_table(g.n())?;
    t_operator(g).max_abs_diff(&apply_kernel(&table, g)?)
}

/// Exact incomplete-beta/tail identities for one `n`:
/// `m⁺_k (n-k) C(n,k) = Φ_n(k)`, `|m⁻_k| k C(n,k) = Φ_n(k-1)`,
/// `m⁺_0 = (1 - 2^{-n})/n`, and vanishing row sums.
pub fn kernel_identities_hold(n: usize) -> Result<bool> {
    let t = kernel_table(n)?;
    let nu = n as u64;
    let int = |v: u64| BigRational::from_integer(BigInt::from(v));
    let tail = |k: i64| phi_tail(nu, k).map(|b| b.exact.expect("exact tails for small n"));
    let mut ok = true;
    for k in 0..nu {
        let c = BigRational::from_integer(choose(nu, k));
        ok &= t.m_plus(k as usize).clone() * int(nu - k) * &c == tail(k as i64)?;
    }
    for k in 1..=nu {
        let c = BigRational::from_integer(choose(nu, k));
        ok &= -t.m_minus(k as usize).clone() * int(k) * &c == tail(k as i64 - 1)?;
    }
    let two_n = BigRational::from_integer(BigInt::one() << n);
    ok &= *t.m_plus(0) == (BigRational::one() - BigRational::one() / two_n) / int(nu);
    // Row i: C(n-1, k) columns with z_i = +1 and C(n-1, k-1) with z_i = -1 at weight k.
    let mut row = BigRational::zero();
    for k in 0..=nu {
        if k < nu {
            row += t.m_plus(k as usize).clone() * BigRational::from_integer(choose(nu - 1, k));
        }
        if k >= 1 {
            row += t.m_minus(k as usize).clone() * BigRational::from_integer(choose(nu - 1, k - 1));
        }
    }
    ok &= row.is_zero();
    Ok(ok)
}

/// Every Gram slice identity for `2 ≤ n ≤ max_n`, all `k`.
pub fn gram_identities_hold(max_n: usize) -> Result<bool> {
    for n in 2..=max_n {
        for k in 1..n {
            if !gram_check(n, k)?.exact_match {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Largest `decomposition_gap · √(n+1)/2` over random unit `λ`; at most 1 when the bound holds.
pub fn decomposition_ratio(n: usize, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = seeded(seed);
    let mut worst: f64 = 0.0;
    let bound = 2.0 / libm::sqrt((n + 1) as f64);
    for s in 0..samples {
        let lambda = match s {
            0 => SphereVector::uniform(n)?,
            1 => SphereVector::basis(n, 0)?,
            _ => SphereVector::random(n, &mut rng),
        };
        worst = worst.max(decomposition_gap(&lambda)? / bound);
    }
    Ok(worst)
}
