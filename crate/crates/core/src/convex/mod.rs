//! Volumes and mixed volumes.
//!
//! Mixed volumes are normalized so that `MV(C, …, C) = Vol(C)` and are
//! computed by polarization,
//! `MV(C₁,…,Cₙ) = (1/n!) Σ_{∅≠S⊆[n]} (−1)^{n−|S|} Vol(Σ_{i∈S} Cᵢ)`.

mod ellipsoid;
mod polytope;
mod sphere;

pub use ellipsoid::{
    ellipse_perimeter, ellipsoid_volume, expected_abs_det_gaussian, mixed_area_closed_form,
    mixed_volume_ellipsoids, EllipsoidBody, MixedVolumeRule, DEFAULT_SPHERE_FACES,
};
pub use polytope::{generic_count_of, mixed_volume_polytopes, LatticePolytope};
pub use sphere::GeodesicSphere;

use crate::scalar::Real;

/// `ln Γ(m/2)` for a positive integer `m`, from the factorial and
/// half-integer product formulas.
pub(crate) fn ln_gamma_half<T: Real>(m: usize) -> T {
    assert!(m >= 1);
    if m % 2 == 0 {
        (1..m / 2).map(|i| T::from_count(i).ln()).sum()
    } else {
        let k = (m - 1) / 2;
        T::PI().sqrt().ln()
            + (0..k)
                .map(|j| (T::from_count(j) + T::lit(0.5)).ln())
                .sum::<T>()
    }
}

pub(crate) fn ln_factorial<T: Real>(n: usize) -> T {
    (2..=n).map(|i| T::from_count(i).ln()).sum()
}

/// `ln Vol(Bⁿ) = (n/2) ln π − ln Γ(n/2 + 1)`.
pub fn ln_ball_volume<T: Real>(n: usize) -> T {
    T::from_count(n) * T::lit(0.5) * T::PI().ln() - ln_gamma_half::<T>(n + 2)
}

/// Volume of the unit ball `Bⁿ`.
pub fn ball_volume<T: Real>(n: usize) -> T {
    ln_ball_volume::<T>(n).exp()
}

/// `ln Vol(ℝPⁿ) = ln((n+1) π^{(n+1)/2} / (2 Γ((n+1)/2 + 1)))`.
pub fn ln_projective_volume<T: Real>(n: usize) -> T {
    T::from_count(n + 1).ln() + T::from_count(n + 1) * T::lit(0.5) * T::PI().ln()
        - T::lit(2.0).ln()
        - ln_gamma_half::<T>(n + 3)
}

/// Volume of real projective space, half the volume of `Sⁿ`.
pub fn projective_volume<T: Real>(n: usize) -> T {
    ln_projective_volume::<T>(n).exp()
}

/// `n!/(2π)ⁿ · Vol(Bⁿ) · Vol(ℝPⁿ) − 1`, evaluated in log space. The identity
/// says this is zero.
pub fn tech_identity_residual<T: Real>(n: usize) -> T {
    let log = ln_factorial::<T>(n) - T::from_count(n) * (T::lit(2.0) * T::PI()).ln()
        + ln_ball_volume::<T>(n)
        + ln_projective_volume::<T>(n);
    log.exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes() {
        assert!((ball_volume::<f64>(1) - 2.0).abs() < 1e-15);
        assert!((ball_volume::<f64>(2) - PI).abs() < 1e-14);
        assert!((ball_volume::<f64>(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((ball_volume::<f64>(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn projective_volumes() {
        assert!((projective_volume::<f64>(1) - PI).abs() < 1e-14);
        assert!((projective_volume::<f64>(2) - 2.0 * PI).abs() < 1e-14);
        assert!((projective_volume::<f64>(3) - PI * PI).abs() < 1e-13);
    }

    #[test]
    fn identity_residuals() {
        assert!(tech_identity_residual::<f64>(1).abs() < 1e-14);
        assert!(tech_identity_residual::<f64>(2).abs() < 1e-14);
        for n in 1..=12 {
            assert!(tech_identity_residual::<f64>(n).abs() < 1e-12, "n = {n}");
        }
        for n in 13..=30 {
            assert!(tech_identity_residual::<f64>(n).abs() < 1e-11, "n = {n}");
        }
        assert!(tech_identity_residual::<f32>(5).abs() < 1e-5);
    }
}
