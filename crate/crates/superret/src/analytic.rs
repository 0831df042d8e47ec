//! Closed-form fidelities used as ground truth for the numerical paths.
//!
//! Everything here is a plain formula: no quadrature, no sampling. The
//! numerical modules are tested against these expressions, and the guide
//! derives each of them from the vacuum tensor.

use crate::error::{Error, Result};

/// Dimensionless inner and outer radii of a hollow spherical cloud,
/// `0 <= alpha < beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellParams {
    alpha: f64,
    beta: f64,
}

impl ShellParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0 && beta > alpha) || !beta.is_finite() {
            return Err(Error::BadShell { alpha, beta });
        }
        Ok(ShellParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Fidelity of `n` donors on a circle of dimensionless radius `x` with the
/// acceptor at the centre, isotropic orientations, retarded tensor:
///
/// ```text
/// F = [ N^2 (3 + X^2 + 3 X^4) + (9 + 3 X^2 + X^4) * S ] / [ 4 N^2 (X^4 + X^2 + 3) ]
/// S = sum_{i,j} cos(2 theta_i - 2 theta_j) = | sum_j exp(2 i theta_j) |^2
/// ```
///
/// `angles` overrides the default equal spacing. For equally spaced donors
/// the angular sum `S` is `N^2` when `N = 2` (hence `F = 1`) and `0` for all
/// `N >= 3`, which collapses the expression to [`circle_closed`].
pub fn circle_fidelity(n: usize, x: f64, angles: Option<&[f64]>) -> Result<f64> {
    if n < 2 {
        return Err(Error::BadAngles { expected: 2, got: n });
    }
    let angular_sum = match angles {
        Some(list) => {
            if list.len() != n {
                return Err(Error::BadAngles {
                    expected: n,
                    got: list.len(),
                });
            }
            phase_sum_sq(list.iter().copied())
        }
        None => phase_sum_sq((0..n).map(|j| 2.0 * std::f64::consts::PI * j as f64 / n as f64)),
    };
    let nf = n as f64;
    let x2 = x * x;
    let x4 = x2 * x2;
    let coherent = nf * nf * (3.0 + x2 + 3.0 * x4) + (9.0 + 3.0 * x2 + x4) * angular_sum;
    Ok(coherent / (4.0 * nf * nf * (x4 + x2 + 3.0)))
}

fn phase_sum_sq(angles: impl Iterator<Item = f64>) -> f64 {
    let (mut c, mut s) = (0.0, 0.0);
    for t in angles {
        c += (2.0 * t).cos();
        s += (2.0 * t).sin();
    }
    c * c + s * s
}

/// Centre fidelity of three or more equally spaced donors on a circle of
/// dimensionless radius `x`:
///
/// ```text
/// F = (3 x^4 + x^2 + 3) / (4 (x^4 + x^2 + 3))
/// ```
///
/// Monotone increasing from 1/4 (`x -> 0`, electrostatic) to 3/4
/// (`x -> infinity`, retarded).
pub fn circle_closed(x: f64) -> f64 {
    let x2 = x * x;
    let x4 = x2 * x2;
    (3.0 * x4 + x2 + 3.0) / (4.0 * (x4 + x2 + 3.0))
}

/// Electrostatic fidelity of two identical donor spheres of radius `r` at
/// `z = +- z0` around a central acceptor:
///
/// ```text
/// F = (z0 - r)^3 (z0 + r)^3 / z0^6
/// ```
///
/// A single sphere at `z = z0` gives the same value. Requires `r < z0`.
pub fn two_sphere_fidelity_nr(z0: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && z0 > 0.0) || !r.is_finite() || !z0.is_finite() {
        return Err(Error::AcceptorInsideSphere { distance: z0, radius: r });
    }
    if r >= z0 {
        return Err(Error::AcceptorInsideSphere { distance: z0, radius: r });
    }
    Ok(((z0 - r) * (z0 + r)).powi(3) / z0.powi(6))
}

/// Shared bracket of the shell formulas:
///
/// ```text
/// B = alpha^2 + beta^2 + 2 + 2 (beta - alpha) sin(alpha - beta)
///     - 2 (alpha beta + 1) cos(alpha - beta)
/// ```
///
/// For thin shells `B ~ alpha beta (beta - alpha)^2` and the direct
/// expression loses all significance to cancellation, so below
/// `beta - alpha = 1e-4` the series in the thickness is used instead.
/// Returns `B / (beta - alpha)^2`, the form both fidelities need.
fn shell_bracket_over_eps_sq(alpha: f64, beta: f64) -> f64 {
    let eps = beta - alpha;
    let ab = alpha * beta;
    if eps < 1e-4 {
        let e2 = eps * eps;
        ab + (3.0 - ab) * e2 / 12.0 + (ab - 5.0) * e2 * e2 / 360.0
    } else {
        let b = alpha * alpha + beta * beta + 2.0 + 2.0 * (beta - alpha) * (alpha - beta).sin()
            - 2.0 * (ab + 1.0) * (alpha - beta).cos();
        b / (eps * eps)
    }
}

/// Hollow-shell fidelity in the compact closed form
///
/// ```text
/// F = 16 alpha beta B
///     / [ pi^2 (alpha - beta)^2 (alpha beta (alpha^2 + alpha beta + beta^2 + 3) + 9) ]
/// ```
///
/// with the bracket `B` of [`shell_fidelity_integrated`]. The expression is
/// continuous at `alpha -> 0` with value 0 and tends to `16 / (3 pi^2)`
/// for thin shells at large radius.
///
/// Note: this compact form does **not** agree with direct integration of the
/// vacuum tensor over the shell; [`shell_fidelity_integrated`] is the form
/// the quadrature and Monte Carlo paths reproduce. Both are kept so the
/// validation suite can report the discrepancy explicitly. The guide's
/// closed-forms chapter works through the comparison.
pub fn shell_fidelity(p: ShellParams) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    if a == 0.0 {
        return 0.0;
    }
    let denom_poly = a * b * (a * a + a * b + b * b + 3.0) + 9.0;
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    16.0 * a * b * shell_bracket_over_eps_sq(a, b) / (pi2 * denom_poly)
}

/// Hollow-shell fidelity obtained by integrating the vacuum tensor over the
/// shell (the guide carries out the three radial integrals):
///
/// ```text
/// F = 2 B / [ (beta^3 - alpha^3) W ]
/// W = (beta - alpha) + (1/alpha - 1/beta) + (1/alpha^3 - 1/beta^3)
/// ```
///
/// with the same bracket `B` as [`shell_fidelity`]. This is the value the
/// deterministic quadrature, the Monte Carlo sampler, and dense discrete
/// ensembles all converge to. Limits: 0 as `alpha -> 0` (shell-theorem
/// suppression) and `2/3` for thin shells at large radius.
pub fn shell_fidelity_integrated(p: ShellParams) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    if a == 0.0 {
        return 0.0;
    }
    let eps = b - a;
    let q = a * a + a * b + b * b;
    let a3b3 = a.powi(3) * b.powi(3);
    // (beta^3 - alpha^3) W, both factored by eps to stay stable for thin
    // shells.
    let cubes = eps * q; // beta^3 - alpha^3
    let w_over_eps = 1.0 + 1.0 / (a * b) + q / a3b3;
    2.0 * shell_bracket_over_eps_sq(a, b) / (cubes * w_over_eps / eps)
}
