//! Reference constants that the computations are checked against.

use core::f64::consts::{PI, SQRT_2};

/// π/2, the classical L¹-Poincaré constant on the cube.
pub const HALF_PI: f64 = PI / 2.0;
/// √(π/2), the Gaussian L¹-Poincaré constant.
pub const SQRT_HALF_PI: f64 = 1.253_314_137_315_500_3;
/// 2/√π, the limit of the majority gradient norm for odd n.
pub const TWO_OVER_SQRT_PI: f64 = core::f64::consts::FRAC_2_SQRT_PI;
/// √π/2.
pub const SQRT_PI_OVER_2: f64 = 0.886_226_925_452_758;
/// √(2π).
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
/// 1/√(2π) = I(1/2).
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// √(2/π), the Gaussian first absolute moment.
pub const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;
/// 1/(2π).
pub const INV_2PI: f64 = 1.0 / (2.0 * PI);
/// 3/(2√2), the plateau value of the dual constant for n = 2..7.
pub const PLATEAU: f64 = 3.0 / (2.0 * SQRT_2);

/// (1+√2)/√(2π), the limit of the even majority gradient norm.
pub fn even_majority_limit() -> f64 {
    (1.0 + SQRT_2) * INV_SQRT_2PI
}

/// √π·√2/(√2+1), the even three-valued majority constant.
pub fn even_majority_ratio_limit() -> f64 {
    libm::sqrt(PI) * SQRT_2 / (SQRT_2 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_constants_match_formulas() {
        assert!((SQRT_HALF_PI - libm::sqrt(PI / 2.0)).abs() < 1e-15);
        assert!((SQRT_PI_OVER_2 - libm::sqrt(PI) / 2.0).abs() < 1e-15);
        assert!((SQRT_2PI - libm::sqrt(2.0 * PI)).abs() < 1e-15);
        assert!((INV_SQRT_2PI - 1.0 / libm::sqrt(2.0 * PI)).abs() < 1e-15);
        assert!((SQRT_2_OVER_PI - libm::sqrt(2.0 / PI)).abs() < 1e-15);
        assert!((even_majority_limit() - 0.963_131_863_949_189).abs() < 1e-12);
        assert!((even_majority_ratio_limit() - 1.038_279_427_180_031_7).abs() < 1e-12);
    }
}
