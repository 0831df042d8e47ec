//! The dimensionless vacuum dyadic Green's tensor and its trace contractions.
//!
//! With positions in `k*r` units the tensor between observation point `r`
//! and source `r'` is
//!
//! ```text
//! G(r, r') = -exp(i x) / (4 pi x^3) * [ f(x) I - g(x) e (x) e ]
//! ```
//!
//! where `x = |r - r'|`, `e = (r - r') / x`, `f(x) = 1 - i x - x^2` and
//! `g(x) = 3 - 3 i x - x^2`. The non-retarded (electrostatic) regime replaces
//! `f -> 1`, `g -> 3` and drops the propagation phase, leaving the static
//! dipole field `-(I - 3 e (x) e) / (4 pi x^3)`.
//!
//! The contact self-term proportional to `delta(r - r')` is excluded: asking
//! for the tensor at coincident points is an error, not a regularised value.
//!
//! All physical prefactors are dropped. Every quantity built from these
//! tensors is a "reduced rate"; the superradiant fidelity is a ratio in which
//! the prefactors cancel, so nothing is lost.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::tensor::{C64, CDyad};

/// Default coincidence threshold (dimensionless separation). Far above
/// floating-point noise, far below any separation of physical interest.
pub const DEFAULT_EPS_SEP: f64 = 1e-9;

/// Tolerance on `| |d| - 1 |` for vectors passed as dipole directions.
pub const UNIT_DIPOLE_TOL: f64 = 1e-12;

/// Which form of the vacuum tensor to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Retarded tensor with the full `f`, `g` polynomials and phase.
    Full,
    /// Electrostatic limit: `f -> 1`, `g -> 3`, no phase.
    NonRetarded,
}

/// Vacuum tensor `G(obs, src)` with the default coincidence threshold.
pub fn green_vacuum(obs: Vec3, src: Vec3, regime: Regime) -> Result<CDyad> {
    green_vacuum_eps(obs, src, regime, DEFAULT_EPS_SEP)
}

/// Vacuum tensor `G(obs, src)` with an explicit coincidence threshold.
pub fn green_vacuum_eps(obs: Vec3, src: Vec3, regime: Regime, eps_sep: f64) -> Result<CDyad> {
    let rho = obs - src;
    let x = rho.norm();
    if !x.is_finite() {
        return Err(Error::CoincidentPoints { separation: x, donor: None });
    }
    if x < eps_sep {
        return Err(Error::CoincidentPoints { separation: x, donor: None });
    }
    let e = rho / x;
    let (prefactor, f, g) = match regime {
        Regime::Full => {
            let phase = Complex64::new(0.0, x).exp();
            let f = C64::new(1.0 - x * x, -x);
            let g = C64::new(3.0 - x * x, -3.0 * x);
            (-phase / (4.0 * std::f64::consts::PI * x * x * x), f, g)
        }
        Regime::NonRetarded => {
            let pref = C64::new(-1.0 / (4.0 * std::f64::consts::PI * x * x * x), 0.0);
            (pref, C64::new(1.0, 0.0), C64::new(3.0, 0.0))
        }
    };
    Ok(CDyad::iso_plus_outer(prefactor * f, -prefactor * g, e))
}

/// `Tr[g1 . g2^dagger]`.
///
/// This is the orientation-averaged pairing of two propagators: with both
/// donors and the acceptor randomly oriented, the reduced pair rate between
/// donors `i` and `j` is `trace_pair(G_i, G_j)`. For `g1 == g2` the result is
/// real and equals the squared Frobenius norm.
pub fn trace_pair(g1: &CDyad, g2: &CDyad) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            acc += g1.entry(i, j) * g2.entry(i, j).conj();
        }
    }
    acc
}

/// Scalar transfer amplitude `d_A . G(obs, src) . d_D` for fixed unit
/// dipoles. Its squared modulus is the reduced fixed-dipole pair rate.
pub fn amplitude(obs: Vec3, src: Vec3, d_acceptor: Vec3, d_donor: Vec3, regime: Regime) -> Result<C64> {
    check_unit(d_acceptor)?;
    check_unit(d_donor)?;
    let g = green_vacuum(obs, src, regime)?;
    Ok(g.contract(d_acceptor, d_donor))
}

pub(crate) fn check_unit(d: Vec3) -> Result<()> {
    let n = d.norm();
    if (n - 1.0).abs() > UNIT_DIPOLE_TOL {
        return Err(Error::NonUnitDipole { norm: n });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn electrostatic_axial_tensor_is_diagonal() {
        // Separation along z: G = diag(-1, -1, 2) / (4 pi x^3) at x = 1.
        let g = green_vacuum(Vec3::new(0.0, 0.0, 1.0), Vec3::ZERO, Regime::NonRetarded).unwrap();
        let q = 1.0 / (4.0 * PI);
        assert_abs_diff_eq!(g.entry(0, 0).re, -q, epsilon = 1e-15);
        assert_abs_diff_eq!(g.entry(1, 1).re, -q, epsilon = 1e-15);
        assert_abs_diff_eq!(g.entry(2, 2).re, 2.0 * q, epsilon = 1e-15);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g.entry(i, j).im, 0.0);
                if i != j {
                    assert_eq!(g.entry(i, j).norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn full_regime_self_trace_at_unit_separation() {
        // Tr[G G+] = 2 (3 + x^2 + x^4) / (16 pi^2 x^6) = 10 / (16 pi^2) at x = 1.
        let g = green_vacuum(Vec3::new(0.0, 0.0, 1.0), Vec3::ZERO, Regime::Full).unwrap();
        let expected = 10.0 / (16.0 * PI * PI);
        let t = trace_pair(&g, &g);
        assert_abs_diff_eq!(t.re, expected, epsilon = 1e-15);
        assert!(t.im.abs() < 1e-14);

        // Independent route: explicit matrix product.
        let direct = g.matmul(&g.conj_transpose()).trace();
        assert_abs_diff_eq!(direct.re, expected, epsilon = 1e-15);
        assert!(direct.im.abs() < 1e-14);

        // And the Frobenius identity.
        assert_abs_diff_eq!(g.frobenius_norm_sq(), expected, epsilon = 1e-15);
    }

    #[test]
    fn reciprocity_and_symmetry_are_exact() {
        let a = Vec3::new(0.3, -1.2, 0.7);
        let b = Vec3::new(-0.4, 0.9, 2.2);
        for regime in [Regime::Full, Regime::NonRetarded] {
            let gab = green_vacuum(a, b, regime).unwrap();
            let gba = green_vacuum(b, a, regime).unwrap();
            // The tensor depends only on x and e (x) e, so swapping the
            // points gives the identical matrix, entry for entry.
            assert_eq!(gab, gba);
            assert_eq!(gab, gab.transpose());
        }
    }

    #[test]
    fn coincident_points_is_an_error() {
        let p = Vec3::new(1.0, 2.0, 3.0);
        let err = green_vacuum(p, p, Regime::Full).unwrap_err();
        assert!(matches!(err, Error::CoincidentPoints { .. }));
        // Just above the default threshold is fine.
        let q = p + Vec3::new(2e-9, 0.0, 0.0);
        assert!(green_vacuum(p, q, Regime::Full).is_ok());
        // A custom threshold moves the boundary.
        assert!(green_vacuum_eps(p, q, Regime::Full, 1e-8).is_err());
    }

    #[test]
    fn trace_pair_of_identities_is_three() {
        let id = CDyad::identity();
        assert_eq!(trace_pair(&id, &id), C64::new(3.0, 0.0));
    }

    #[test]
    fn trace_pair_hermitian_symmetry() {
        let g1 = green_vacuum(Vec3::new(0.0, 0.0, 1.3), Vec3::ZERO, Regime::Full).unwrap();
        let g2 = green_vacuum(Vec3::new(0.9, -0.2, 0.1), Vec3::ZERO, Regime::Full).unwrap();
        let t12 = trace_pair(&g1, &g2);
        let t21 = trace_pair(&g2, &g1);
        assert_abs_diff_eq!(t12.re, t21.re, epsilon = 1e-15);
        assert_abs_diff_eq!(t12.im, -t21.im, epsilon = 1e-15);
    }

    #[test]
    fn amplitude_axial_electrostatic() {
        // zz entry of the static dyad: +2/(4 pi) at x = 1.
        let a = amplitude(Vec3::new(0.0, 0.0, 1.0), Vec3::ZERO, Vec3::Z, Vec3::Z, Regime::NonRetarded).unwrap();
        assert_abs_diff_eq!(a.re, 2.0 / (4.0 * PI), epsilon = 1e-15);
        assert_eq!(a.im, 0.0);
    }

    #[test]
    fn amplitude_crossed_dipoles_vanish_for_axial_separation() {
        for regime in [Regime::Full, Regime::NonRetarded] {
            let a = amplitude(Vec3::new(0.0, 0.0, 1.0), Vec3::ZERO, Vec3::X, Vec3::Y, regime).unwrap();
            assert_eq!(a.norm(), 0.0);
        }
    }

    #[test]
    fn amplitude_transverse_full_regime() {
        // xx entry at x = 1: -e^{i} f(1) / (4 pi) with f(1) = -i, modulus 1/(4 pi).
        let a = amplitude(Vec3::new(0.0, 0.0, 1.0), Vec3::ZERO, Vec3::X, Vec3::X, Regime::Full).unwrap();
        assert_abs_diff_eq!(a.norm(), 1.0 / (4.0 * PI), epsilon = 1e-15);
        let expected = -Complex64::new(0.0, 1.0).exp() * C64::new(0.0, -1.0) / (4.0 * PI);
        assert_abs_diff_eq!(a.re, expected.re, epsilon = 1e-15);
        assert_abs_diff_eq!(a.im, expected.im, epsilon = 1e-15);
    }

    #[test]
    fn amplitude_rejects_non_unit_dipoles() {
        let err = amplitude(
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::ZERO,
            Vec3::new(0.0, 0.0, 1.1),
            Vec3::Z,
            Regime::Full,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonUnitDipole { .. }));
    }

    #[test]
    fn non_retarded_scale_law() {
        // G(lambda a, lambda b) = lambda^-3 G(a, b) in the electrostatic regime.
        let a = Vec3::new(0.2, 0.5, -0.3);
        let b = Vec3::new(-0.7, 0.1, 0.9);
        let lambda = 3.7;
        let g = green_vacuum(a, b, Regime::NonRetarded).unwrap();
        let gs = green_vacuum(a * lambda, b * lambda, Regime::NonRetarded).unwrap();
        let rescaled = g.scale(C64::new(lambda.powi(-3), 0.0));
        assert!(gs.max_abs_diff(&rescaled) < 1e-15 * g.max_abs());
    }

    #[test]
    fn full_converges_to_non_retarded_at_small_separation() {
        // Entrywise relative difference is O(x^2); C = 0.01 covers C*x
        // comfortably over the tested range.
        const LIMIT_LAW_C: f64 = 0.01;
        let dir = Vec3::new(0.4, -0.3, 0.866).normalized().unwrap();
        for &x in &[1e-4, 1e-3, 5e-3, 1e-2] {
            let full = green_vacuum(dir * x, Vec3::ZERO, Regime::Full).unwrap();
            let nr = green_vacuum(dir * x, Vec3::ZERO, Regime::NonRetarded).unwrap();
            let rel = full.max_abs_diff(&nr) / nr.max_abs();
            assert!(rel <= LIMIT_LAW_C * x, "x = {x}: relative diff {rel}");
        }
    }
}
