//! Gaussian tail function.

use std::f64::consts::FRAC_1_SQRT_2;

/// Gaussian Q-function, `Q(x) = P(N(0,1) > x)`.
///
/// Evaluated through `erfc`, so the relative accuracy holds deep into the
/// upper tail. `Q(+inf) = 0` and `Q(-inf) = 1`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Abramowitz & Stegun / high-precision tables
        let cases = [
            (0.0, 0.5),
            (1.0, 0.158_655_253_931_457_05),
            (3.0, 1.349_898_031_630_094_5e-3),
            (5.0, 2.866_515_718_791_939e-7),
            (10.0, 7.619_853_024_160_526e-24),
            (-1.0, 0.841_344_746_068_542_9),
        ];
        for (x, want) in cases {
            let got = q_function(x);
            assert!(((got - want) / want).abs() < 1e-12, "Q({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn limits() {
        assert_eq!(q_function(f64::INFINITY), 0.0);
        assert_eq!(q_function(f64::NEG_INFINITY), 1.0);
    }
}
