//! Trigonometric kernels with exact integer-part phase reduction.
//!
//! Every 1-periodic evaluation in the crate goes through [`sin_cos_2pi`]:
//! the integer part of the phase is subtracted *before* multiplying by 2π,
//! so the reduction step is exact in IEEE arithmetic. For |u| ≥ 2^53 every
//! representable `u` is an integer and the reduced phase is exactly zero.

/// (sin 2πu, cos 2πu) with exact reduction of the integer part of `u`.
#[inline]
pub fn sin_cos_2pi(u: f64) -> (f64, f64) {
    // u - round(u) is exact: both operands share the exponent range.
    let r = u - u.round();
    let z = std::f64::consts::TAU * r;
    (z.sin(), z.cos())
}

/// exp(-2πi u) as (re, im).
#[inline]
pub fn phasor_neg(u: f64) -> (f64, f64) {
    let (s, c) = sin_cos_2pi(u);
    (c, -s)
}

const SINC_TAYLOR_CUTOFF: f64 = 1e-4;

/// sinc(z) = sin(z)/z, with a 5th-order Taylor branch below |z| = 1e-4.
#[inline]
pub fn sinc(z: f64) -> f64 {
    if z.abs() < SINC_TAYLOR_CUTOFF {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// First derivative of sinc.
#[inline]
pub fn sinc_d1(z: f64) -> f64 {
    if z.abs() < SINC_TAYLOR_CUTOFF {
        let z2 = z * z;
        -z / 3.0 + z * z2 / 30.0
    } else {
        (z.cos() - z.sin() / z) / z
    }
}

/// Second derivative of sinc.
#[inline]
pub fn sinc_d2(z: f64) -> f64 {
    if z.abs() < SINC_TAYLOR_CUTOFF {
        let z2 = z * z;
        -1.0 / 3.0 + z2 / 10.0 - z2 * z2 / 168.0
    } else {
        let (s, c) = (z.sin(), z.cos());
        -s / z - 2.0 * c / (z * z) + 2.0 * s / (z * z * z)
    }
}

/// sinc(2πu) evaluated with exact phase reduction; safe for huge `u`.
#[inline]
pub fn sinc_2pi(u: f64) -> f64 {
    let z = std::f64::consts::TAU * u;
    if z.abs() < SINC_TAYLOR_CUTOFF {
        sinc(z)
    } else {
        let (s, _) = sin_cos_2pi(u);
        s / z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_branch_is_continuous() {
        for &z in &[0.99e-4, 1.01e-4, -0.99e-4, -1.01e-4] {
            assert!((sinc(z) - z.sin() / z).abs() < 1e-15);
            assert!((sinc_d1(z) - (z.cos() - z.sin() / z) / z).abs() < 1e-12);
        }
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(sinc_d1(0.0), 0.0);
        assert!((sinc_d2(0.0) + 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn exact_reduction_at_integers() {
        let (s, c) = sin_cos_2pi(1e18);
        assert_eq!(s, 0.0);
        assert_eq!(c, 1.0);
        // 0.75 + huge power of two: representable offsets keep the fraction.
        let u = 0.75 * 2f64.powi(-60) * 2f64.powi(60);
        let (s, _) = sin_cos_2pi(u);
        assert!((s - (-1.0)).abs() < 1e-15);
    }

    #[test]
    fn sinc_derivative_matches_finite_difference() {
        let h = 1e-6;
        for &z in &[0.5, 1.7, 3.0, -2.2] {
            let fd1 = (sinc(z + h) - sinc(z - h)) / (2.0 * h);
            assert!((sinc_d1(z) - fd1).abs() < 1e-9, "z={z}");
            let fd2 = (sinc(z + h) - 2.0 * sinc(z) + sinc(z - h)) / (h * h);
            assert!((sinc_d2(z) - fd2).abs() < 1e-5, "z={z}");
        }
    }
}
