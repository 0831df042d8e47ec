//! Cross-module agreement: closed forms vs discrete sums vs quadrature vs
//! Monte Carlo. Every numerical path must land on the same numbers.

mod common;

use common::ring;
use superret::analytic::{
    circle_fidelity, shell_fidelity_integrated, two_sphere_fidelity_nr, ShellParams,
};
use superret::continuum::{fidelity_continuum, mc_fidelity, Distribution, QuadratureSpec};
use superret::geometry::Vec3;
use superret::greens::Regime;
use superret::rates::{fidelity, DonorEnsemble};

fn two_balls(z0: f64, r: f64) -> Distribution {
    Distribution::union(vec![
        Distribution::uniform_ball(Vec3::new(0.0, 0.0, z0), r, 1.0).unwrap(),
        Distribution::uniform_ball(Vec3::new(0.0, 0.0, -z0), r, 1.0).unwrap(),
    ])
    .unwrap()
}

#[test]
fn circle_closed_form_matches_discrete_ensembles() {
    for n in 2..=10 {
        for &x in &[0.01, 0.1, 1.0, 12.0, 100.0] {
            let ens = DonorEnsemble::isotropic(ring(n, x), Regime::Full).unwrap();
            let discrete = fidelity(&ens, Vec3::ZERO).unwrap().fidelity;
            let closed = circle_fidelity(n, x, None).unwrap();
            assert!(
                (discrete - closed).abs() < 1e-10,
                "N = {n}, X = {x}: discrete {discrete} vs closed {closed}"
            );
        }
    }
}

#[test]
fn shell_quadrature_matches_the_integrated_closed_form() {
    let quad = QuadratureSpec::default();
    for &(alpha, beta) in &[(1.0, 2.0), (5.0, 6.0), (50.0, 51.0), (100.0, 100.5)] {
        let dist = Distribution::spherical_shell(Vec3::ZERO, alpha, beta, 1.0).unwrap();
        let numeric = fidelity_continuum(&dist, Vec3::ZERO, Regime::Full, &quad)
            .unwrap()
            .fidelity;
        let closed = shell_fidelity_integrated(ShellParams::new(alpha, beta).unwrap());
        assert!(
            (numeric - closed).abs() < 1e-10 * closed,
            "shell ({alpha}, {beta}): quadrature {numeric} vs closed {closed}"
        );
    }
}

#[test]
fn shell_monte_carlo_matches_the_integrated_closed_form() {
    let quad = QuadratureSpec {
        mc_samples: 60_000,
        mc_seed: 11,
        ..QuadratureSpec::default()
    };
    let dist = Distribution::spherical_shell(Vec3::ZERO, 1.0, 2.0, 1.0).unwrap();
    let est = mc_fidelity(&dist, Vec3::ZERO, Regime::Full, &quad).unwrap();
    let closed = shell_fidelity_integrated(ShellParams::new(1.0, 2.0).unwrap());
    assert!(
        (est.fidelity - closed).abs() <= 3.0 * est.fidelity_std_error,
        "MC {} +- {} vs closed {closed}",
        est.fidelity,
        est.fidelity_std_error
    );
}

#[test]
fn two_sphere_closed_form_matches_quadrature() {
    let quad = QuadratureSpec::default();
    for &(z0, r) in &[(2.0, 1.0), (3.0, 1.0), (10.0, 1.0)] {
        let numeric = fidelity_continuum(&two_balls(z0, r), Vec3::ZERO, Regime::NonRetarded, &quad)
            .unwrap()
            .fidelity;
        let closed = two_sphere_fidelity_nr(z0, r).unwrap();
        assert!(
            (numeric - closed).abs() < 1e-8,
            "(z0, r) = ({z0}, {r}): {numeric} vs {closed}"
        );
    }
}

/// Lattice discretisations of a continuous cloud converge to the continuum
/// fidelity: three refinement levels, final error under 1%.
#[test]
fn discrete_lattices_converge_to_the_continuum() {
    // Two electrostatic balls against the 27/64 benchmark.
    let continuum = fidelity_continuum(
        &two_balls(2.0, 1.0),
        Vec3::ZERO,
        Regime::NonRetarded,
        &QuadratureSpec::default(),
    )
    .unwrap()
    .fidelity;

    let mut errors = Vec::new();
    for &cells in &[3usize, 6, 12] {
        let mut donors = Vec::new();
        let h = 2.0 / cells as f64;
        for center_z in [2.0f64, -2.0] {
            for ix in 0..cells {
                for iy in 0..cells {
                    for iz in 0..cells {
                        let p = Vec3::new(
                            -1.0 + h * (ix as f64 + 0.5),
                            -1.0 + h * (iy as f64 + 0.5),
                            -1.0 + h * (iz as f64 + 0.5),
                        );
                        if p.norm() <= 1.0 {
                            donors.push(Vec3::new(p.x, p.y, center_z + p.z));
                        }
                    }
                }
            }
        }
        let ens = DonorEnsemble::isotropic(donors, Regime::NonRetarded).unwrap();
        let f = fidelity(&ens, Vec3::ZERO).unwrap().fidelity;
        errors.push((f - continuum).abs() / continuum);
    }
    assert!(
        errors.last().unwrap() < &0.01,
        "refinement errors {errors:?}"
    );

    // A retarded shell, discretised on equal-volume radii with a Fibonacci
    // sphere per radius so every point donor stands for the same volume.
    let shell = Distribution::spherical_shell(Vec3::ZERO, 1.0, 2.0, 1.0).unwrap();
    let continuum = fidelity_continuum(&shell, Vec3::ZERO, Regime::Full, &QuadratureSpec::default())
        .unwrap()
        .fidelity;
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    let (a3, b3) = (1.0f64, 8.0f64);
    let mut errors = Vec::new();
    for &n_r in &[4usize, 8, 16] {
        let per_shell = 16 * n_r * n_r;
        let mut donors = Vec::new();
        for i in 0..n_r {
            let r = (a3 + (i as f64 + 0.5) / n_r as f64 * (b3 - a3)).cbrt();
            for k in 0..per_shell {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / per_shell as f64;
                let rho = (1.0 - z * z).sqrt();
                let phi = golden * k as f64;
                donors.push(Vec3::new(r * rho * phi.cos(), r * rho * phi.sin(), r * z));
            }
        }
        let ens = DonorEnsemble::isotropic(donors, Regime::Full).unwrap();
        let f = fidelity(&ens, Vec3::ZERO).unwrap().fidelity;
        errors.push((f - continuum).abs() / continuum);
    }
    assert!(
        errors.last().unwrap() < &0.01,
        "shell refinement errors {errors:?}"
    );
}

/// Doubling both quadrature orders moves the two-ball benchmark by less
/// than 1e-8.
#[test]
fn quadrature_refinement_stability() {
    let dist = two_balls(2.0, 1.0);
    let base = QuadratureSpec::default();
    let fine = QuadratureSpec {
        radial_order: base.radial_order * 2,
        angular_order: base.angular_order * 2,
        ..base
    };
    let f0 = fidelity_continuum(&dist, Vec3::ZERO, Regime::NonRetarded, &base)
        .unwrap()
        .fidelity;
    let f1 = fidelity_continuum(&dist, Vec3::ZERO, Regime::NonRetarded, &fine)
        .unwrap()
        .fidelity;
    assert!((f0 - f1).abs() < 1e-8, "doubling moved F by {}", (f0 - f1).abs());
}

/// Reflecting the whole distribution through the acceptor changes nothing.
#[test]
fn mirror_symmetry_of_the_continuum() {
    let acceptor = Vec3::new(0.3, -0.2, 0.1);
    let center = Vec3::new(0.0, 0.0, 2.5);
    let mirrored_center = acceptor * 2.0 - center;
    let quad = QuadratureSpec::default();
    for regime in [Regime::Full, Regime::NonRetarded] {
        let d1 = Distribution::uniform_ball(center, 1.0, 1.0).unwrap();
        let d2 = Distribution::uniform_ball(mirrored_center, 1.0, 1.0).unwrap();
        let f1 = fidelity_continuum(&d1, acceptor, regime, &quad).unwrap();
        let f2 = fidelity_continuum(&d2, acceptor, regime, &quad).unwrap();
        assert!(
            (f1.fidelity - f2.fidelity).abs() <= 1e-12,
            "{regime:?}: {} vs {}",
            f1.fidelity,
            f2.fidelity
        );
        assert!((f1.gamma_sr - f2.gamma_sr).abs() <= 1e-12 * f1.gamma_sr.max(1e-300));
        assert!((f1.gamma_incoherent - f2.gamma_incoherent).abs() <= 1e-12 * f1.gamma_incoherent);
        // The continuum obeys the same Cauchy-Schwarz bound as the
        // discrete sums.
        assert!(f1.fidelity >= 0.0 && f1.fidelity <= 1.0 + 1e-12);
    }
}

/// The shell-theorem suppression holds anywhere inside the cavity, not just
/// at the centre.
#[test]
fn shell_suppression_for_random_interior_acceptors() {
    use rand::SeedableRng;
    let shell = Distribution::spherical_shell(Vec3::ZERO, 1.0, 2.0, 1.0).unwrap();
    let quad = QuadratureSpec::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    for _ in 0..12 {
        let acceptor = common::random_point(&mut rng, 0.0, 0.7);
        let f = fidelity_continuum(&shell, acceptor, Regime::NonRetarded, &quad).unwrap();
        let ratio = f.gamma_sr / f.gamma_incoherent;
        assert!(
            ratio <= 1e-8,
            "acceptor {acceptor:?} (|r| = {}): gsr/ginc = {ratio:.3e}",
            acceptor.norm()
        );
    }
}
