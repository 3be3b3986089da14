//! Walsh-Fourier calculus on the Hamming cube {-1,1}^n.
//!
//! Vertices are bitmasks: bit `i` set means `x_i = -1`, so the all-ones
//! vertex is mask 0 and the Hamming distance to it is the popcount.
//! Coordinates are 0-based throughout the API.
//!
//! Every operator is applied spectrally: transform once, scale the Walsh
//! coefficients, transform back.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 30;

#[inline]
pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::DimensionOutOfRange { n, min: 1, max: MAX_DIM });
    }
    Ok(())
}

/// Value of the coordinate `x_i` at vertex `mask`.
#[inline]
pub fn coordinate_sign(mask: usize, i: usize) -> f64 {
    if mask >> i & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Real function on the cube stored by vertex mask.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeFunction {
    n: usize,
    values: Vec<f64>,
}

impl CubeFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if values.len() != 1 << n {
            return Err(Error::LengthMismatch { expected: 1 << n, got: values.len() });
        }
        Ok(Self { n, values })
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { n, values: (0..1usize << n).map(f).collect() })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::from_fn(n, |_| c)
    }

    /// The coordinate function `x_i`.
    pub fn coordinate(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::CoordinateOutOfRange { i, n });
        }
        Self::from_fn(n, |z| coordinate_sign(z, i))
    }

    /// The Walsh monomial `x^S` for the subset mask `s`.
    pub fn monomial(n: usize, s: usize) -> Result<Self> {
        check_dim(n)?;
        if s >> n != 0 {
            return Err(Error::InvalidArgument("subset mask has bits beyond n"));
        }
        Self::from_fn(n, |z| if (s & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `E[f g]` under the uniform measure.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        same_dim(self.n, other.n)?;
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(s / self.values.len() as f64)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { n: self.n, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dim(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        same_dim(self.n, other.n)?;
        Ok(self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn is_constant(&self) -> bool {
        let first = self.values[0];
        self.values.iter().all(|&v| v == first)
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, got: b });
    }
    Ok(())
}

/// Walsh coefficients indexed by subset mask: `coeffs[S] = E[f x^S]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalshSpectrum {
    n: usize,
    coeffs: Vec<f64>,
}

impl WalshSpectrum {
    pub fn new(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if coeffs.len() != 1 << n {
            return Err(Error::LengthMismatch { expected: 1 << n, got: coeffs.len() });
        }
        Ok(Self { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, s: usize) -> f64 {
        self.coeffs[s]
    }

    /// Rescale each coefficient by a factor depending on its subset mask.
    fn scaled(&self, factor: impl Fn(usize) -> f64) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(s, &c)| c * factor(s)).collect();
        Self { n: self.n, coeffs }
    }
}

/// Unnormalized in-place fast Walsh-Hadamard butterfly.
pub fn fwht(data: &mut [f64]) {
    let len = data.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
}

pub fn walsh_transform(f: &CubeFunction) -> WalshSpectrum {
    let mut coeffs = f.values.clone();
    fwht(&mut coeffs);
    let scale = 1.0 / coeffs.len() as f64;
    coeffs.iter_mut().for_each(|c| *c *= scale);
    WalshSpectrum { n: f.n, coeffs }
}

pub fn inverse_walsh(s: &WalshSpectrum) -> CubeFunction {
    let mut values = s.coeffs.clone();
    fwht(&mut values);
    CubeFunction { n: s.n, values }
}

fn check_coord(n: usize, i: usize) -> Result<()> {
    if i >= n {
        return Err(Error::CoordinateOutOfRange { i, n });
    }
    Ok(())
}

fn strip_coordinate(spectrum: &WalshSpectrum, i: usize, weight: impl Fn(usize) -> f64) -> WalshSpectrum {
    let bit = 1usize << i;
    let mut out = vec![0.0; spectrum.coeffs.len()];
    for (s, &c) in spectrum.coeffs.iter().enumerate() {
        if s & bit != 0 {
            out[s ^ bit] = c * weight(s);
        }
    }
    WalshSpectrum { n: spectrum.n, coeffs: out }
}

/// Elimination operator `∂_i f = (f(x_i = 1) - f(x_i = -1)) / 2`.
pub fn partial(f: &CubeFunction, i: usize) -> Result<CubeFunction> {
    check_coord(f.n, i)?;
    Ok(inverse_walsh(&strip_coordinate(&walsh_transform(f), i, |_| 1.0)))
}

/// Creation operator `∂*_i`, the adjoint of `∂_i`.
pub fn creation(f: &CubeFunction, i: usize) -> Result<CubeFunction> {
    check_coord(f.n, i)?;
    let spectrum = walsh_transform(f);
    let bit = 1usize << i;
    let mut out = vec![0.0; spectrum.coeffs.len()];
    for (s, &c) in spectrum.coeffs.iter().enumerate() {
        if s & bit == 0 {
            out[s | bit] = c;
        }
    }
    Ok(inverse_walsh(&WalshSpectrum { n: f.n, coeffs: out }))
}

/// All partial derivatives as a vector field.
pub fn gradient(f: &CubeFunction) -> VectorField {
    let spectrum = walsh_transform(f);
    let components =
        (0..f.n).map(|i| inverse_walsh(&strip_coordinate(&spectrum, i, |_| 1.0))).collect();
    VectorField { n: f.n, components }
}

fn degree(s: usize) -> f64 {
    s.count_ones() as f64
}

/// The (negative) cube Laplacian: `x^S ↦ -|S| x^S`.
pub fn laplacian(f: &CubeFunction) -> CubeFunction {
    inverse_walsh(&walsh_transform(f).scaled(|s| -degree(s)))
}

/// Heat semigroup `P_t = e^{tΔ}`.
pub fn semigroup(f: &CubeFunction, t: f64) -> Result<CubeFunction> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    Ok(inverse_walsh(&walsh_transform(f).scaled(|s| libm::exp(-t * degree(s)))))
}

/// Projection onto mean-zero functions, `P₀ f = f - E f`.
pub fn center(f: &CubeFunction) -> CubeFunction {
    let m = f.mean();
    f.map(|v| v - m)
}

/// `Δ⁻¹P₀`: multiplies `x^S` by `-1/|S|` and kills the constant.
pub fn inv_laplacian_p0(f: &CubeFunction) -> CubeFunction {
    inverse_walsh(&walsh_transform(f).scaled(|s| if s == 0 { 0.0 } else { -1.0 / degree(s) }))
}

/// `T g = ∫₀^∞ ∇P_t g dt`; component `i` maps `x^S` to `x^{S∖i}/|S|` for `i ∈ S`.
pub fn t_operator(g: &CubeFunction) -> VectorField {
    let spectrum = walsh_transform(g);
    let components = (0..g.n)
        .map(|i| inverse_walsh(&strip_coordinate(&spectrum, i, |s| 1.0 / degree(s))))
        .collect();
    VectorField { n: g.n, components }
}

/// A map from the cube to ℝⁿ, one `CubeFunction` per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    n: usize,
    components: Vec<CubeFunction>,
}

impl VectorField {
    pub fn new(components: Vec<CubeFunction>) -> Result<Self> {
        let n = components.first().map(|c| c.n).ok_or(Error::InvalidArgument("empty field"))?;
        if components.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: components.len() });
        }
        for c in &components {
            same_dim(n, c.n)?;
        }
        Ok(Self { n, components })
    }

    pub fn zero(n: usize) -> Result<Self> {
        let c = CubeFunction::constant(n, 0.0)?;
        Ok(Self { n, components: vec![c; n] })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[CubeFunction] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &CubeFunction {
        &self.components[i]
    }

    /// Euclidean length of the field at one vertex.
    pub fn norm_at(&self, mask: usize) -> f64 {
        libm::sqrt(self.components.iter().map(|c| c.values[mask] * c.values[mask]).sum())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        same_dim(self.n, other.n)?;
        self.components
            .iter()
            .zip(&other.components)
            .try_fold(0.0f64, |m, (a, b)| Ok(m.max(a.max_abs_diff(b)?)))
    }
}

/// `‖v‖_{L^∞(ℓ²)}`: the largest Euclidean length over all vertices.
pub fn sup_ell2_norm(v: &VectorField) -> f64 {
    (0..1usize << v.n).map(|z| v.norm_at(z)).fold(0.0, f64::max)
}

/// `Σ_k ∂*_k h_k`; zero exactly when `h` lies in the curl space.
pub fn curl_residual(h: &VectorField) -> CubeFunction {
    let mut coeffs = vec![0.0; 1 << h.n];
    for (k, comp) in h.components.iter().enumerate() {
        let bit = 1usize << k;
        let spectrum = walsh_transform(comp);
        for (s, &c) in spectrum.coeffs.iter().enumerate() {
            if s & bit == 0 {
                coeffs[s | bit] += c;
            }
        }
    }
    inverse_walsh(&WalshSpectrum { n: h.n, coeffs })
}

/// Tolerance on `max |curl_residual|` for curl membership.
pub const CURL_TOLERANCE: f64 = 1e-12;

pub fn is_curl(h: &VectorField) -> bool {
    curl_residual(h).max_abs() <= CURL_TOLERANCE
}

/// `‖∇F‖_{L^∞(ℓ²)} / inf_a ‖ΔF + a‖_∞`, with the infimum at the midrange of `ΔF`.
pub fn graph_inequality_ratio(f: &CubeFunction) -> Result<f64> {
    if f.is_constant() {
        return Err(Error::ConstantFunction);
    }
    let lap = laplacian(f);
    let denom = (lap.max() - lap.min()) / 2.0;
    if denom <= 0.0 {
        return Err(Error::ConstantFunction);
    }
    Ok(sup_ell2_norm(&gradient(f)) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{LN_2, SQRT_2};

    fn close(a: &CubeFunction, b: &CubeFunction, tol: f64) -> bool {
        a.max_abs_diff(b).unwrap() <= tol
    }

    fn x(n: usize, i: usize) -> CubeFunction {
        CubeFunction::coordinate(n, i).unwrap()
    }

    fn min12() -> CubeFunction {
        CubeFunction::from_fn(2, |z| if z == 0 { 1.0 } else { -1.0 }).unwrap()
    }

    fn lcg_function(n: usize, mut seed: u64) -> CubeFunction {
        CubeFunction::from_fn(n, |_| {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        })
        .unwrap()
    }

    #[test]
    fn transform_of_constant_and_coordinate() {
        let one = CubeFunction::constant(2, 1.0).unwrap();
        assert_eq!(walsh_transform(&one).coeffs(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(walsh_transform(&x(1, 0)).coeffs(), &[0.0, 1.0]);
    }

    #[test]
    fn transform_round_trip() {
        let f = lcg_function(6, 7);
        let back = inverse_walsh(&walsh_transform(&f));
        assert!(close(&f, &back, 1e-12));
    }

    #[test]
    fn min_has_expected_spectrum() {
        // min(x1, x2) = (x1 x2 + x1 + x2 - 1) / 2
        assert_eq!(walsh_transform(&min12()).coeffs(), &[-0.5, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn partial_examples() {
        let one = CubeFunction::constant(1, 1.0).unwrap();
        assert!(close(&partial(&x(1, 0), 0).unwrap(), &one, 0.0));
        let zero = CubeFunction::constant(2, 0.0).unwrap();
        assert!(close(&partial(&x(2, 1), 0).unwrap(), &zero, 0.0));
        let x1x2 = CubeFunction::monomial(2, 0b11).unwrap();
        assert!(close(&partial(&x1x2, 0).unwrap(), &x(2, 1), 0.0));
        assert_eq!(partial(&x1x2, 2), Err(Error::CoordinateOutOfRange { i: 2, n: 2 }));
    }

    #[test]
    fn creation_examples() {
        let one = CubeFunction::constant(1, 1.0).unwrap();
        assert!(close(&creation(&one, 0).unwrap(), &x(1, 0), 0.0));
        assert_eq!(creation(&x(1, 0), 0).unwrap().max_abs(), 0.0);
        let x1x2 = CubeFunction::monomial(2, 0b11).unwrap();
        assert!(close(&creation(&x(2, 1), 0).unwrap(), &x1x2, 0.0));
        assert!(creation(&one, 1).is_err());
    }

    #[test]
    fn diffusion_examples() {
        let x1x2 = CubeFunction::monomial(2, 0b11).unwrap();
        assert!(close(&laplacian(&x1x2), &x1x2.scale(-2.0), 1e-15));
        let pt = semigroup(&x(1, 0), LN_2).unwrap();
        assert!(close(&pt, &x(1, 0).scale(0.5), 1e-15));
        let f = x(1, 0).map(|v| v + 3.0);
        assert!(close(&inv_laplacian_p0(&f), &x(1, 0).scale(-1.0), 1e-15));
        assert_eq!(semigroup(&f, -1.0), Err(Error::NegativeTime(-1.0)));
    }

    #[test]
    fn t_operator_examples() {
        let t = t_operator(&x(1, 0));
        assert!(close(t.component(0), &CubeFunction::constant(1, 1.0).unwrap(), 1e-15));

        let t = t_operator(&min12());
        let c0 = x(2, 1).scale(0.25).map(|v| v + 0.5);
        let c1 = x(2, 0).scale(0.25).map(|v| v + 0.5);
        assert!(close(t.component(0), &c0, 1e-15));
        assert!(close(t.component(1), &c1, 1e-15));

        let t = t_operator(&CubeFunction::constant(3, 2.5).unwrap());
        assert_eq!(sup_ell2_norm(&t), 0.0);
    }

    #[test]
    fn sup_norm_examples() {
        let v = t_operator(&min12());
        assert!((sup_ell2_norm(&v) - 3.0 / (2.0 * SQRT_2)).abs() < 1e-15);
        assert_eq!(sup_ell2_norm(&VectorField::zero(3).unwrap()), 0.0);
        let v = VectorField::new(vec![x(2, 0), x(2, 1).scale(-1.0)]).unwrap();
        assert!((sup_ell2_norm(&v) - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn curl_examples() {
        // h_k = x_k ∂_k H with H = x1 x2
        let h_big = CubeFunction::monomial(2, 0b11).unwrap();
        let comps = (0..2)
            .map(|k| {
                let d = partial(&h_big, k).unwrap();
                CubeFunction::from_fn(2, |z| coordinate_sign(z, k) * d.value(z)).unwrap()
            })
            .collect();
        assert!(is_curl(&VectorField::new(comps).unwrap()));

        let h = VectorField::new(vec![
            CubeFunction::constant(2, 1.0).unwrap(),
            CubeFunction::constant(2, 0.0).unwrap(),
        ])
        .unwrap();
        let r = curl_residual(&h);
        assert!(close(&r, &x(2, 0), 1e-15));
        assert!(!is_curl(&h));
    }

    #[test]
    fn t_residual_is_centered_input() {
        for n in 1..=6 {
            let g = lcg_function(n, 100 + n as u64);
            let r = curl_residual(&t_operator(&g));
            assert!(close(&r, &center(&g), 1e-12), "n = {n}");
        }
    }

    #[test]
    fn graph_ratio_examples() {
        assert!((graph_inequality_ratio(&x(1, 0)).unwrap() - 1.0).abs() < 1e-15);
        let f = inv_laplacian_p0(&min12());
        let r = graph_inequality_ratio(&f).unwrap();
        assert!((r - 3.0 / (2.0 * SQRT_2)).abs() < 1e-14);
        let c = CubeFunction::constant(3, 1.0).unwrap();
        assert_eq!(graph_inequality_ratio(&c), Err(Error::ConstantFunction));
    }

    #[test]
    fn constructor_validation() {
        assert!(CubeFunction::new(2, vec![0.0; 3]).is_err());
        assert!(CubeFunction::new(0, vec![0.0]).is_err());
        assert!(CubeFunction::coordinate(2, 2).is_err());
        assert!(VectorField::new(vec![x(2, 0)]).is_err());
    }
}
