//! Discrete donor ensembles: rate matrices, superradiant fidelity, fidelity
//! maps, and greedy donor placement.
//!
//! For `N` donors coherently sharing one excitation, the reduced pair rates
//! `Gamma_ij` form an `N x N` Hermitian positive-semidefinite matrix. The
//! coherent (superradiant) rate is the sum of all entries, the incoherent
//! rate is the sum of the diagonal, and the fidelity
//!
//! ```text
//! F = Gamma_SR / (N * Gamma_0),
//! Gamma_SR = sum_ij Gamma_ij,   Gamma_0 = sum_i Gamma_ii
//! ```
//!
//! is 1 for ideal (Dicke-like) coherence and `1/N` with no coherence. The
//! Cauchy-Schwarz inequality pins `F` to `[0, 1]` for every geometry.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::greens::{self, Regime};
use crate::tensor::{C64, CDyad};

/// How donor and acceptor dipoles are treated.
#[derive(Debug, Clone, PartialEq)]
pub enum OrientationMode {
    /// All dipoles randomly oriented; pair rates reduce to the trace pairing
    /// of the two propagators.
    IsotropicAverage,
    /// Explicit unit dipoles: one for the acceptor, one per donor.
    FixedDipoles {
        acceptor: Vec3,
        donors: Vec<Vec3>,
    },
}

/// A set of donor positions together with the orientation treatment and the
/// tensor regime used to evaluate it.
#[derive(Debug, Clone, PartialEq)]
pub struct DonorEnsemble {
    positions: Vec<Vec3>,
    orientation: OrientationMode,
    regime: Regime,
}

impl DonorEnsemble {
    /// Build an ensemble, checking that it is non-empty and that fixed
    /// dipoles (when given) are unit vectors matching the donor count.
    /// Donor-donor coincidences are allowed; donor-acceptor coincidences are
    /// caught at evaluation time.
    pub fn new(positions: Vec<Vec3>, orientation: OrientationMode, regime: Regime) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if let Some(p) = positions.iter().find(|p| !p.is_finite()) {
            return Err(Error::BadDistribution {
                reason: format!("non-finite donor position {p:?}"),
            });
        }
        if let OrientationMode::FixedDipoles { acceptor, donors } = &orientation {
            if donors.len() != positions.len() {
                return Err(Error::DipoleCountMismatch {
                    dipoles: donors.len(),
                    donors: positions.len(),
                });
            }
            greens::check_unit(*acceptor)?;
            for d in donors {
                greens::check_unit(*d)?;
            }
        }
        Ok(DonorEnsemble {
            positions,
            orientation,
            regime,
        })
    }

    /// Isotropically averaged ensemble.
    pub fn isotropic(positions: Vec<Vec3>, regime: Regime) -> Result<Self> {
        Self::new(positions, OrientationMode::IsotropicAverage, regime)
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn orientation(&self) -> &OrientationMode {
        &self.orientation
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// `N x N` matrix of reduced pair rates `Gamma_ij`, Hermitian and positive
/// semidefinite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    n: usize,
    entries: Vec<C64>,
}

impl RateMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.n + j]
    }

    /// Sum over all entries (the reduced superradiant rate). The imaginary
    /// parts cancel pairwise; only the real part is returned.
    pub fn gamma_sr(&self) -> f64 {
        self.entries.iter().map(|v| v.re).sum()
    }

    /// Sum of the diagonal (the reduced incoherent rate).
    pub fn gamma_incoherent(&self) -> f64 {
        (0..self.n).map(|i| self.entry(i, i).re).sum()
    }
}

/// Reduced rates and fidelity of one ensemble-acceptor configuration.
///
/// `n` is the donor count for discrete ensembles and the total donor number
/// `integral of n(r)` for continuous ones, hence a float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityResult {
    pub gamma_sr: f64,
    pub gamma_incoherent: f64,
    pub n: f64,
    pub fidelity: f64,
}

impl FidelityResult {
    pub(crate) fn from_parts(gamma_sr: f64, gamma_incoherent: f64, n: f64) -> Result<Self> {
        if gamma_incoherent.is_nan() || gamma_incoherent <= 0.0 {
            return Err(Error::DegenerateEnsemble);
        }
        Ok(FidelityResult {
            gamma_sr,
            gamma_incoherent,
            n,
            fidelity: gamma_sr / (n * gamma_incoherent),
        })
    }
}

/// Per-donor data from which every rate is assembled: either the propagator
/// itself (isotropic averaging) or the scalar amplitude (fixed dipoles).
enum DonorTerms {
    Tensors(Vec<CDyad>),
    Amplitudes(Vec<C64>),
}

fn donor_terms(ensemble: &DonorEnsemble, acceptor: Vec3) -> Result<DonorTerms> {
    match &ensemble.orientation {
        OrientationMode::IsotropicAverage => {
            let mut gs = Vec::with_capacity(ensemble.len());
            for (i, &p) in ensemble.positions.iter().enumerate() {
                let g = greens::green_vacuum(acceptor, p, ensemble.regime).map_err(|e| tag_donor(e, i))?;
                gs.push(g);
            }
            Ok(DonorTerms::Tensors(gs))
        }
        OrientationMode::FixedDipoles { acceptor: d_a, donors } => {
            let mut amps = Vec::with_capacity(ensemble.len());
            for (i, (&p, &d)) in ensemble.positions.iter().zip(donors).enumerate() {
                let g = greens::green_vacuum(acceptor, p, ensemble.regime).map_err(|e| tag_donor(e, i))?;
                amps.push(g.contract(*d_a, d));
            }
            Ok(DonorTerms::Amplitudes(amps))
        }
    }
}

fn tag_donor(err: Error, index: usize) -> Error {
    match err {
        Error::CoincidentPoints { separation, .. } => Error::CoincidentPoints {
            separation,
            donor: Some(index),
        },
        other => other,
    }
}

/// Reduced pair-rate matrix `Gamma_ij` of an ensemble seen from `acceptor`.
///
/// In isotropic mode the entries are `Tr[G_i G_j^dagger]` (a Gram matrix of
/// propagators); with fixed dipoles they are `a_i conj(a_j)` for the scalar
/// amplitudes `a_i`, a rank-1 Gram matrix. The upper triangle is computed and
/// mirrored, so Hermiticity is exact.
pub fn rate_matrix(ensemble: &DonorEnsemble, acceptor: Vec3) -> Result<RateMatrix> {
    let n = ensemble.len();
    let mut entries = vec![C64::new(0.0, 0.0); n * n];
    match donor_terms(ensemble, acceptor)? {
        DonorTerms::Tensors(gs) => {
            for i in 0..n {
                for j in i..n {
                    let v = greens::trace_pair(&gs[i], &gs[j]);
                    entries[i * n + j] = v;
                    entries[j * n + i] = v.conj();
                }
            }
        }
        DonorTerms::Amplitudes(amps) => {
            for i in 0..n {
                for j in i..n {
                    let v = amps[i] * amps[j].conj();
                    entries[i * n + j] = v;
                    entries[j * n + i] = v.conj();
                }
            }
        }
    }
    Ok(RateMatrix { n, entries })
}

/// Superradiant fidelity of an ensemble seen from `acceptor`.
///
/// Uses the Gram factorisation instead of the full matrix: the coherent rate
/// is `||sum_i G_i||_F^2` (isotropic) or `|sum_i a_i|^2` (fixed dipoles),
/// which also guarantees `gamma_sr >= 0` in floating point.
pub fn fidelity(ensemble: &DonorEnsemble, acceptor: Vec3) -> Result<FidelityResult> {
    let n = ensemble.len() as f64;
    let (gamma_sr, gamma_inc) = match donor_terms(ensemble, acceptor)? {
        DonorTerms::Tensors(gs) => {
            let mut k = CDyad::zero();
            let mut inc = 0.0;
            for g in &gs {
                k.add_assign(g);
                inc += g.frobenius_norm_sq();
            }
            (k.frobenius_norm_sq(), inc)
        }
        DonorTerms::Amplitudes(amps) => {
            let total: C64 = amps.iter().sum();
            let inc: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            (total.norm_sqr(), inc)
        }
    };
    FidelityResult::from_parts(gamma_sr, gamma_inc, n)
}

/// Fidelity of a fixed ensemble for each acceptor position in `grid`.
///
/// Grid points violating the donor-acceptor separation precondition are
/// masked with `NaN` rather than aborting the whole map. Output order always
/// matches input order, regardless of how the evaluation is scheduled.
pub fn fidelity_map(ensemble: &DonorEnsemble, grid: &[Vec3]) -> Result<Vec<(Vec3, f64)>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let rows: Vec<(Vec3, f64)> = grid
        .par_iter()
        .map(|&acceptor| {
            let f = match fidelity(ensemble, acceptor) {
                Ok(r) => r.fidelity,
                Err(Error::CoincidentPoints { .. }) => f64::NAN,
                Err(_) => f64::NAN,
            };
            (acceptor, f)
        })
        .collect();
    Ok(rows)
}

/// Fidelity map of the two-donor ensemble `{donor1, p}` as the second donor
/// `p` sweeps over `grid`, with the acceptor held fixed.
pub fn second_donor_map(
    donor1: Vec3,
    acceptor: Vec3,
    grid: &[Vec3],
    orientation: &OrientationMode,
    regime: Regime,
) -> Result<Vec<(Vec3, f64)>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    // The fixed donor must itself be usable; a violation here is fatal,
    // not maskable.
    greens::green_vacuum(acceptor, donor1, regime)?;
    if let OrientationMode::FixedDipoles { acceptor: d_a, donors } = orientation {
        if donors.len() != 2 {
            return Err(Error::DipoleCountMismatch {
                dipoles: donors.len(),
                donors: 2,
            });
        }
        greens::check_unit(*d_a)?;
        for d in donors {
            greens::check_unit(*d)?;
        }
    }
    let rows: Vec<(Vec3, f64)> = grid
        .par_iter()
        .map(|&p| {
            let ens = DonorEnsemble {
                positions: vec![donor1, p],
                orientation: orientation.clone(),
                regime,
            };
            let f = match fidelity(&ens, acceptor) {
                Ok(r) => r.fidelity,
                Err(_) => f64::NAN,
            };
            (p, f)
        })
        .collect();
    Ok(rows)
}

/// Greedily place `k` donors on `donor_grid`, one at a time, each step
/// choosing the grid point that maximises the ensemble fidelity given the
/// donors placed so far.
///
/// Each grid point is used at most once. Exact ties break towards the lowest
/// linear grid index, so results are reproducible bit for bit. Grid points
/// coincident with the acceptor are never candidates.
pub fn greedy_place(
    k: usize,
    donor_grid: &[Vec3],
    acceptor: Vec3,
    orientation: &OrientationMode,
    regime: Regime,
) -> Result<Vec<Vec3>> {
    if donor_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    if let OrientationMode::FixedDipoles { acceptor: d_a, donors } = orientation {
        if donors.len() < k {
            return Err(Error::DipoleCountMismatch {
                dipoles: donors.len(),
                donors: k,
            });
        }
        greens::check_unit(*d_a)?;
        for d in donors {
            greens::check_unit(*d)?;
        }
    }

    // Pre-evaluate every usable grid point once.
    let node_tensors: Vec<Option<CDyad>> = donor_grid
        .iter()
        .map(|&p| greens::green_vacuum(acceptor, p, regime).ok())
        .collect();
    let usable = node_tensors.iter().filter(|t| t.is_some()).count();
    if usable < k {
        return Err(Error::GridExhausted {
            requested: k,
            available: usable,
        });
    }

    let mut taken = vec![false; donor_grid.len()];
    let mut chosen = Vec::with_capacity(k);

    match orientation {
        OrientationMode::IsotropicAverage => {
            let mut k_sum = CDyad::zero();
            let mut inc_sum = 0.0;
            for step in 0..k {
                let m = (step + 1) as f64;
                let mut best: Option<(usize, f64)> = None;
                for (idx, tensor) in node_tensors.iter().enumerate() {
                    let Some(g) = tensor else { continue };
                    if taken[idx] {
                        continue;
                    }
                    let coherent = k_sum.add(g).frobenius_norm_sq();
                    let incoherent = inc_sum + g.frobenius_norm_sq();
                    let f = coherent / (m * incoherent);
                    let better = match best {
                        None => true,
                        Some((_, bf)) => f > bf,
                    };
                    if better {
                        best = Some((idx, f));
                    }
                }
                let (idx, _) = best.expect("usable points checked above");
                taken[idx] = true;
                let g = node_tensors[idx].as_ref().unwrap();
                k_sum.add_assign(g);
                inc_sum += g.frobenius_norm_sq();
                chosen.push(donor_grid[idx]);
            }
        }
        OrientationMode::FixedDipoles { acceptor: d_a, donors } => {
            let mut amp_sum = C64::new(0.0, 0.0);
            let mut inc_sum = 0.0;
            for (step, &d_step) in donors.iter().take(k).enumerate() {
                let m = (step + 1) as f64;
                let mut best: Option<(usize, f64)> = None;
                for (idx, tensor) in node_tensors.iter().enumerate() {
                    let Some(g) = tensor else { continue };
                    if taken[idx] {
                        continue;
                    }
                    let a = g.contract(*d_a, d_step);
                    let f = (amp_sum + a).norm_sqr() / (m * (inc_sum + a.norm_sqr()));
                    let better = match best {
                        None => true,
                        Some((_, bf)) => f > bf,
                    };
                    if better {
                        best = Some((idx, f));
                    }
                }
                let (idx, _) = best.expect("usable points checked above");
                taken[idx] = true;
                let a = node_tensors[idx].as_ref().unwrap().contract(*d_a, d_step);
                amp_sum += a;
                inc_sum += a.norm_sqr();
                chosen.push(donor_grid[idx]);
            }
        }
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn ring(n: usize, radius: f64) -> Vec<Vec3> {
        (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                Vec3::new(radius * t.cos(), radius * t.sin(), 0.0)
            })
            .collect()
    }

    #[test]
    fn single_donor_rate_matrix_matches_trace_oracle() {
        let ens = DonorEnsemble::isotropic(vec![Vec3::new(0.0, 0.0, 1.0)], Regime::Full).unwrap();
        let m = rate_matrix(&ens, Vec3::ZERO).unwrap();
        assert_eq!(m.n(), 1);
        assert_abs_diff_eq!(m.entry(0, 0).re, 10.0 / (16.0 * PI * PI), epsilon = 1e-15);
        assert!(m.entry(0, 0).im.abs() < 1e-16);
    }

    #[test]
    fn antipodal_pair_has_equal_entries() {
        for regime in [Regime::Full, Regime::NonRetarded] {
            let ens = DonorEnsemble::isotropic(
                vec![Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, -1.0)],
                regime,
            )
            .unwrap();
            let m = rate_matrix(&ens, Vec3::ZERO).unwrap();
            let g00 = m.entry(0, 0);
            for i in 0..2 {
                for j in 0..2 {
                    assert_abs_diff_eq!(m.entry(i, j).re, g00.re, epsilon = 1e-15);
                    assert!(m.entry(i, j).im.abs() < 1e-16);
                }
            }
        }
    }

    #[test]
    fn fixed_dipole_pair_entries() {
        // dA = dD1 = dD2 = x, donors at (0,0,+-1), electrostatic:
        // every amplitude is -1/(4 pi), every entry 1/(16 pi^2).
        let ens = DonorEnsemble::new(
            vec![Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, -1.0)],
            OrientationMode::FixedDipoles {
                acceptor: Vec3::X,
                donors: vec![Vec3::X, Vec3::X],
            },
            Regime::NonRetarded,
        )
        .unwrap();
        let m = rate_matrix(&ens, Vec3::ZERO).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(m.entry(i, j).re, 1.0 / (16.0 * PI * PI), epsilon = 1e-16);
                assert!(m.entry(i, j).im.abs() < 1e-16);
            }
        }
    }

    #[test]
    fn rate_matrix_reports_offending_donor() {
        let ens = DonorEnsemble::isotropic(
            vec![Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, 0.5)],
            Regime::Full,
        )
        .unwrap();
        let err = rate_matrix(&ens, Vec3::new(0.0, 0.0, 0.5)).unwrap_err();
        assert_eq!(
            err,
            Error::CoincidentPoints {
                separation: 0.0,
                donor: Some(1)
            }
        );
    }

    #[test]
    fn fidelity_matches_rate_matrix_sums() {
        let ens = DonorEnsemble::isotropic(ring(7, 2.3), Regime::Full).unwrap();
        let acceptor = Vec3::new(0.3, -0.1, 0.2);
        let m = rate_matrix(&ens, acceptor).unwrap();
        let f = fidelity(&ens, acceptor).unwrap();
        assert_abs_diff_eq!(f.gamma_sr, m.gamma_sr(), epsilon = 1e-12 * m.gamma_sr().abs());
        assert_abs_diff_eq!(
            f.gamma_incoherent,
            m.gamma_incoherent(),
            epsilon = 1e-12 * m.gamma_incoherent()
        );
    }

    #[test]
    fn two_opposite_donors_are_fully_coherent() {
        for x in [0.1, 1.0, 12.0] {
            let ens = DonorEnsemble::isotropic(
                vec![Vec3::new(x, 0.0, 0.0), Vec3::new(-x, 0.0, 0.0)],
                Regime::Full,
            )
            .unwrap();
            let f = fidelity(&ens, Vec3::ZERO).unwrap();
            assert_abs_diff_eq!(f.fidelity, 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn single_donor_fidelity_is_one() {
        let ens = DonorEnsemble::isotropic(vec![Vec3::new(0.4, 0.2, -0.9)], Regime::Full).unwrap();
        let f = fidelity(&ens, Vec3::ZERO).unwrap();
        assert_eq!(f.fidelity, 1.0);
    }

    #[test]
    fn five_donor_ring_at_x12() {
        let ens = DonorEnsemble::isotropic(ring(5, 12.0), Regime::Full).unwrap();
        let f = fidelity(&ens, Vec3::ZERO).unwrap();
        assert_abs_diff_eq!(f.fidelity, 62355.0 / 83532.0, epsilon = 1e-12);
    }

    #[test]
    fn dicke_limit_exact() {
        // N coincident donors: F = 1, Gamma_SR = N^2 * single rate.
        let p = Vec3::new(0.0, 0.0, 0.7);
        let n = 6;
        let ens = DonorEnsemble::isotropic(vec![p; n], Regime::Full).unwrap();
        let f = fidelity(&ens, Vec3::ZERO).unwrap();
        let single = fidelity(&DonorEnsemble::isotropic(vec![p], Regime::Full).unwrap(), Vec3::ZERO).unwrap();
        assert_abs_diff_eq!(f.fidelity, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            f.gamma_sr,
            (n * n) as f64 * single.gamma_sr,
            epsilon = 1e-12 * f.gamma_sr
        );
    }

    #[test]
    fn incoherent_floor_is_one_over_n() {
        let ens = DonorEnsemble::isotropic(ring(5, 3.0), Regime::Full).unwrap();
        let m = rate_matrix(&ens, Vec3::new(0.2, 0.0, 0.1)).unwrap();
        // Zero the off-diagonals: F collapses to 1/N.
        let diag = m.gamma_incoherent();
        let f = diag / (m.n() as f64 * diag);
        assert_abs_diff_eq!(f, 1.0 / m.n() as f64, epsilon = 1e-15);
    }

    #[test]
    fn map_masks_coincident_points_and_keeps_order() {
        let donors = vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)];
        let ens = DonorEnsemble::isotropic(donors.clone(), Regime::Full).unwrap();
        let grid = vec![Vec3::ZERO, donors[0], Vec3::new(0.0, 0.5, 0.0)];
        let rows = fidelity_map(&ens, &grid).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].0, grid[0]);
        assert_abs_diff_eq!(rows[0].1, 1.0, epsilon = 1e-13);
        assert!(rows[1].1.is_nan(), "acceptor on a donor must be masked");
        assert!(rows[2].1.is_finite());
    }

    #[test]
    fn empty_grid_is_an_error() {
        let ens = DonorEnsemble::isotropic(vec![Vec3::X], Regime::Full).unwrap();
        assert_eq!(fidelity_map(&ens, &[]).unwrap_err(), Error::EmptyGrid);
    }

    #[test]
    fn second_donor_map_landmarks() {
        let x = 0.8;
        let donor1 = Vec3::new(x, 0.0, 0.0);
        let grid = vec![
            donor1,                      // coincident with donor 1
            Vec3::new(-x, 0.0, 0.0),     // antipodal
            Vec3::new(0.0, x, 0.0),      // 90 degrees around
            Vec3::ZERO,                  // on the acceptor: masked
        ];
        let rows = second_donor_map(donor1, Vec3::ZERO, &grid, &OrientationMode::IsotropicAverage, Regime::NonRetarded).unwrap();
        assert_abs_diff_eq!(rows[0].1, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rows[1].1, 1.0, epsilon = 1e-14);
        // (1 + 3 cos^2(pi/2)) / 4 = 1/4, independent of x in the
        // electrostatic regime.
        assert_abs_diff_eq!(rows[2].1, 0.25, epsilon = 1e-14);
        assert!(rows[3].1.is_nan());
    }

    #[test]
    fn greedy_single_donor_takes_first_index() {
        let grid = ring(16, 2.0);
        let picks = greedy_place(1, &grid, Vec3::ZERO, &OrientationMode::IsotropicAverage, Regime::NonRetarded).unwrap();
        assert_eq!(picks, vec![grid[0]]);
    }

    #[test]
    fn greedy_second_donor_lands_antipodal() {
        let grid = ring(360, 2.0);
        let picks = greedy_place(2, &grid, Vec3::ZERO, &OrientationMode::IsotropicAverage, Regime::NonRetarded).unwrap();
        assert_eq!(picks[0], grid[0]);
        // Opposite side of the acceptor, within one grid cell.
        let angle = picks[1].y.atan2(picks[1].x);
        let cell = 2.0 * PI / 360.0;
        assert!((angle.abs() - PI).abs() <= cell + 1e-12, "second pick at angle {angle}");
    }

    #[test]
    fn greedy_third_donor_joins_an_existing_cluster() {
        let grid = ring(360, 2.0);
        let picks = greedy_place(3, &grid, Vec3::ZERO, &OrientationMode::IsotropicAverage, Regime::NonRetarded).unwrap();
        let cell = 2.0 * PI / 360.0;
        let angle = picks[2].y.atan2(picks[2].x);
        let near_zero = angle.abs() <= 1.5 * cell;
        let near_pi = (angle.abs() - PI).abs() <= 1.5 * cell;
        assert!(near_zero || near_pi, "third pick at angle {angle} is a new cluster");
    }

    #[test]
    fn greedy_exhausts_grid() {
        let grid = ring(4, 1.0);
        let err = greedy_place(5, &grid, Vec3::ZERO, &OrientationMode::IsotropicAverage, Regime::NonRetarded).unwrap_err();
        assert_eq!(err, Error::GridExhausted { requested: 5, available: 4 });
    }

    #[test]
    fn greedy_with_fixed_dipoles_also_goes_antipodal() {
        // In-plane x dipoles: the amplitude varies around the ring, and the
        // best partner for the first donor is still the mirror point.
        let grid = ring(360, 2.0);
        let orientation = OrientationMode::FixedDipoles {
            acceptor: Vec3::X,
            donors: vec![Vec3::X, Vec3::X],
        };
        let picks = greedy_place(2, &grid, Vec3::ZERO, &orientation, Regime::NonRetarded).unwrap();
        assert_eq!(picks[0], grid[0]);
        let angle = picks[1].y.atan2(picks[1].x);
        let cell = 2.0 * PI / 360.0;
        assert!((angle.abs() - PI).abs() <= cell + 1e-12, "second pick at angle {angle}");
        let ens = DonorEnsemble::new(picks, orientation, Regime::NonRetarded).unwrap();
        let f = fidelity(&ens, Vec3::ZERO).unwrap();
        assert_abs_diff_eq!(f.fidelity, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ensemble_validation() {
        assert_eq!(
            DonorEnsemble::isotropic(vec![], Regime::Full).unwrap_err(),
            Error::EmptyEnsemble
        );
        let err = DonorEnsemble::new(
            vec![Vec3::X, Vec3::Y],
            OrientationMode::FixedDipoles {
                acceptor: Vec3::Z,
                donors: vec![Vec3::Z],
            },
            Regime::Full,
        )
        .unwrap_err();
        assert_eq!(err, Error::DipoleCountMismatch { dipoles: 1, donors: 2 });
    }
}
