//! Rates and fidelity for continuous donor number densities.
//!
//! A piecewise-uniform density `n(r)` (balls, spherical shells, disjoint
//! unions of those) replaces the discrete donor sums by integrals. The
//! coherent rate factorises: writing
//!
//! ```text
//! K = integral of n(r) G(r_A, r) dV
//! ```
//!
//! the double volume integral of the pair rates collapses to
//! `Gamma_SR = Tr[K K^dagger]`, turning a quadratic-cost pairing into a
//! single pass over quadrature nodes. The incoherent rate stays a single
//! integral of `Tr[G G^dagger]`, and
//!
//! ```text
//! F = Gamma_SR / (N_tot * Gamma_0),   N_tot = integral of n(r) dV.
//! ```
//!
//! Deterministic spherical product quadrature (Gauss-Legendre radial and
//! polar, uniform azimuthal) is the primary path; a seeded Monte Carlo
//! estimator provides an independent stochastic cross-check.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as RandDistribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::greens::{self, Regime, DEFAULT_EPS_SEP};
use crate::quadrature::{gauss_legendre, gauss_legendre_on};
use crate::rates::FidelityResult;
use crate::tensor::CDyad;

/// A continuous donor number density with piecewise-uniform support.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    /// Uniform density inside a ball.
    UniformBall { center: Vec3, radius: f64, density: f64 },
    /// Uniform density between two concentric spheres, `0 <= inner < outer`.
    SphericalShell { center: Vec3, inner: f64, outer: f64, density: f64 },
    /// Disjoint union of balls and shells.
    Union(Vec<Distribution>),
}

/// One validated spherical component: a ball is a shell with `inner == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Component {
    pub center: Vec3,
    pub inner: f64,
    pub outer: f64,
    pub density: f64,
}

impl Component {
    fn number(&self) -> f64 {
        self.density * 4.0 / 3.0 * std::f64::consts::PI * (self.outer.powi(3) - self.inner.powi(3))
    }
}

impl Distribution {
    /// Uniform ball, validated.
    pub fn uniform_ball(center: Vec3, radius: f64, density: f64) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::BadDistribution {
                reason: format!("ball radius must be positive and finite, got {radius}"),
            });
        }
        check_density(density)?;
        check_center(center)?;
        Ok(Distribution::UniformBall { center, radius, density })
    }

    /// Uniform spherical shell, validated (`0 <= inner < outer` strictly).
    pub fn spherical_shell(center: Vec3, inner: f64, outer: f64, density: f64) -> Result<Self> {
        if !inner.is_finite() || !outer.is_finite() || inner < 0.0 || outer <= inner {
            return Err(Error::BadDistribution {
                reason: format!("shell radii must satisfy 0 <= inner < outer, got [{inner}, {outer}]"),
            });
        }
        check_density(density)?;
        check_center(center)?;
        Ok(Distribution::SphericalShell { center, inner, outer, density })
    }

    /// Union of balls and shells with pairwise disjoint supports.
    pub fn union(members: Vec<Distribution>) -> Result<Self> {
        let mut components = Vec::new();
        for m in &members {
            m.collect_components(&mut components);
        }
        if components.is_empty() {
            return Err(Error::BadDistribution {
                reason: "union has no components".to_string(),
            });
        }
        for i in 0..components.len() {
            for j in (i + 1)..components.len() {
                if !disjoint(&components[i], &components[j]) {
                    return Err(Error::OverlappingSupports { first: i, second: j });
                }
            }
        }
        Ok(Distribution::Union(members))
    }

    fn collect_components(&self, out: &mut Vec<Component>) {
        match self {
            Distribution::UniformBall { center, radius, density } => out.push(Component {
                center: *center,
                inner: 0.0,
                outer: *radius,
                density: *density,
            }),
            Distribution::SphericalShell { center, inner, outer, density } => out.push(Component {
                center: *center,
                inner: *inner,
                outer: *outer,
                density: *density,
            }),
            Distribution::Union(members) => {
                for m in members {
                    m.collect_components(out);
                }
            }
        }
    }

    pub(crate) fn components(&self) -> Vec<Component> {
        let mut out = Vec::new();
        self.collect_components(&mut out);
        out
    }

    /// Total donor number `integral of n(r) dV`.
    pub fn total_number(&self) -> f64 {
        self.components().iter().map(Component::number).sum()
    }

    /// Error unless the acceptor keeps at least `eps` clearance from the
    /// support. Sitting inside a shell's cavity is fine; inside the material
    /// (or inside a ball) the incoherent integrand `~ 1/x^6` is not
    /// integrable and the model breaks down.
    fn check_acceptor(&self, acceptor: Vec3, eps: f64) -> Result<()> {
        for (idx, c) in self.components().iter().enumerate() {
            let d = (acceptor - c.center).norm();
            let outside = d >= c.outer + eps;
            let in_cavity = c.inner > 0.0 && d <= c.inner - eps;
            if !(outside || in_cavity) {
                return Err(Error::AcceptorInsideSupport { component: idx });
            }
        }
        Ok(())
    }
}

fn check_density(density: f64) -> Result<()> {
    if !density.is_finite() || density <= 0.0 {
        return Err(Error::BadDistribution {
            reason: format!("density must be positive and finite, got {density}"),
        });
    }
    Ok(())
}

fn check_center(center: Vec3) -> Result<()> {
    if !center.is_finite() {
        return Err(Error::BadDistribution {
            reason: format!("non-finite component centre {center:?}"),
        });
    }
    Ok(())
}

/// Supports are disjoint when the outer spheres are separated, or when one
/// component sits entirely inside the other's cavity.
fn disjoint(a: &Component, b: &Component) -> bool {
    let d = (a.center - b.center).norm();
    let separated = d >= a.outer + b.outer;
    let b_in_a_cavity = d + b.outer <= a.inner;
    let a_in_b_cavity = d + a.outer <= b.inner;
    separated || b_in_a_cavity || a_in_b_cavity
}

/// Deterministic integration scheme plus Monte Carlo cross-check settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    /// Gauss-Legendre points along the radius of each component.
    pub radial_order: usize,
    /// Gauss-Legendre points in `cos(theta)`; the azimuthal circle gets
    /// `2 * angular_order` uniformly spaced points.
    pub angular_order: usize,
    /// Total Monte Carlo samples across all components.
    pub mc_samples: usize,
    /// Seed for the counter-based Monte Carlo streams.
    pub mc_seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial_order: 32,
            angular_order: 32,
            mc_samples: 200_000,
            mc_seed: 0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.radial_order < 4 || self.angular_order < 4 {
            return Err(Error::BadQuadrature {
                reason: format!(
                    "orders must be at least 4, got radial {} / angular {}",
                    self.radial_order, self.angular_order
                ),
            });
        }
        if self.mc_samples < 1000 {
            return Err(Error::BadQuadrature {
                reason: format!("mc_samples must be at least 1000, got {}", self.mc_samples),
            });
        }
        Ok(())
    }

    fn phi_count(&self) -> usize {
        2 * self.angular_order
    }
}

/// Per-node accumulator shared by the kernel and incoherent integrals.
#[derive(Clone, Copy)]
struct NodeSums {
    kernel: CDyad,
    incoherent: f64,
}

impl NodeSums {
    fn zero() -> Self {
        NodeSums {
            kernel: CDyad::zero(),
            incoherent: 0.0,
        }
    }
}

/// One pass of the spherical product rule over every component. Radial
/// shells are evaluated in parallel and reduced in index order, so the
/// result is independent of the thread count.
fn integrate(dist: &Distribution, acceptor: Vec3, regime: Regime, quad: &QuadratureSpec) -> Result<NodeSums> {
    quad.validate()?;
    dist.check_acceptor(acceptor, DEFAULT_EPS_SEP)?;

    let (ct_nodes, ct_weights) = gauss_legendre(quad.angular_order);
    let n_phi = quad.phi_count();
    let w_phi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let phis: Vec<(f64, f64)> = (0..n_phi)
        .map(|k| {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
            (phi.cos(), phi.sin())
        })
        .collect();

    let mut total = NodeSums::zero();
    for comp in dist.components() {
        let (r_nodes, r_weights) = gauss_legendre_on(quad.radial_order, comp.inner, comp.outer);
        let shells: Vec<NodeSums> = (0..r_nodes.len())
            .into_par_iter()
            .map(|ir| {
                let r = r_nodes[ir];
                let wr = r_weights[ir] * r * r * comp.density;
                let mut acc = NodeSums::zero();
                for (it, &ct) in ct_nodes.iter().enumerate() {
                    let st = (1.0 - ct * ct).max(0.0).sqrt();
                    let w_ang = ct_weights[it] * w_phi;
                    for &(cp, sp) in &phis {
                        let u = Vec3::new(st * cp, st * sp, ct);
                        let point = comp.center + u * r;
                        let w = wr * w_ang;
                        // The acceptor clearance check above guarantees the
                        // separation precondition at every node.
                        let g = greens::green_vacuum(acceptor, point, regime)
                            .expect("acceptor clearance verified before integration");
                        acc.kernel.add_assign(&g.scale(w.into()));
                        acc.incoherent += w * g.frobenius_norm_sq();
                    }
                }
                acc
            })
            .collect();
        for s in shells {
            total.kernel.add_assign(&s.kernel);
            total.incoherent += s.incoherent;
        }
    }
    Ok(total)
}

/// Integrated kernel `K = integral of n(r) G(r_A, r) dV`.
pub fn kernel_integral(dist: &Distribution, acceptor: Vec3, regime: Regime, quad: &QuadratureSpec) -> Result<CDyad> {
    Ok(integrate(dist, acceptor, regime, quad)?.kernel)
}

/// Reduced coherent rate `Tr[K K^dagger] >= 0`.
pub fn gamma_sr_continuum(dist: &Distribution, acceptor: Vec3, regime: Regime, quad: &QuadratureSpec) -> Result<f64> {
    Ok(kernel_integral(dist, acceptor, regime, quad)?.frobenius_norm_sq())
}

/// Reduced incoherent rate `integral of n(r) Tr[G G^dagger] dV > 0`.
pub fn gamma_incoherent_continuum(
    dist: &Distribution,
    acceptor: Vec3,
    regime: Regime,
    quad: &QuadratureSpec,
) -> Result<f64> {
    Ok(integrate(dist, acceptor, regime, quad)?.incoherent)
}

/// Superradiant fidelity of a continuous cloud by deterministic quadrature.
pub fn fidelity_continuum(
    dist: &Distribution,
    acceptor: Vec3,
    regime: Regime,
    quad: &QuadratureSpec,
) -> Result<FidelityResult> {
    let sums = integrate(dist, acceptor, regime, quad)?;
    FidelityResult::from_parts(sums.kernel.frobenius_norm_sq(), sums.incoherent, dist.total_number())
}

/// Monte Carlo estimate of the continuum fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McFidelity {
    pub gamma_sr: f64,
    pub gamma_incoherent: f64,
    pub n: f64,
    pub fidelity: f64,
    /// Jackknife standard error of the fidelity over sample batches.
    pub fidelity_std_error: f64,
    /// Samples actually drawn.
    pub samples: usize,
}

/// Batch bookkeeping for the jackknife. Streams are indexed by
/// `(component << 32) | batch`, so any parallel schedule reproduces the same
/// draws and the reduction runs in fixed index order.
struct BatchSum {
    component: usize,
    g_sum: CDyad,
    trace_sum: f64,
    count: usize,
}

const MC_BATCH: usize = 1000;

/// Stochastic cross-check of [`fidelity_continuum`].
///
/// Uniform sampling of each component (inverse-CDF radius, isotropic
/// direction from normalised Gaussians), with samples split across
/// components in proportion to their donor numbers. Identical seeds give
/// bit-identical results regardless of thread count.
pub fn mc_fidelity(dist: &Distribution, acceptor: Vec3, regime: Regime, quad: &QuadratureSpec) -> Result<McFidelity> {
    quad.validate()?;
    dist.check_acceptor(acceptor, DEFAULT_EPS_SEP)?;

    let components = dist.components();
    let n_tot = dist.total_number();

    // Largest-remainder split of the sample budget, deterministic.
    let mut counts: Vec<usize> = components
        .iter()
        .map(|c| ((c.number() / n_tot) * quad.mc_samples as f64).floor() as usize)
        .collect();
    let mut remainder = quad.mc_samples - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..components.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = (components[a].number() / n_tot) * quad.mc_samples as f64;
        let fb = (components[b].number() / n_tot) * quad.mc_samples as f64;
        (fb - fb.floor()).partial_cmp(&(fa - fa.floor())).unwrap().then(a.cmp(&b))
    });
    for &idx in order.iter().cycle().take(components.len() * 2) {
        if remainder == 0 {
            break;
        }
        counts[idx] += 1;
        remainder -= 1;
    }
    // Every component needs at least two batches for the jackknife.
    for c in counts.iter_mut() {
        *c = (*c).max(2);
    }

    let mut jobs: Vec<(usize, u64, usize)> = Vec::new(); // (component, batch, size)
    for (ci, &m) in counts.iter().enumerate() {
        let batch_size = if m < 2 * MC_BATCH { m.div_ceil(2) } else { MC_BATCH };
        let mut left = m;
        let mut batch = 0u64;
        while left > 0 {
            let take = left.min(batch_size);
            jobs.push((ci, batch, take));
            batch += 1;
            left -= take;
        }
    }

    let batches: Vec<BatchSum> = jobs
        .par_iter()
        .map(|&(ci, batch, size)| {
            let comp = components[ci];
            let mut rng = ChaCha8Rng::seed_from_u64(quad.mc_seed);
            rng.set_stream(((ci as u64) << 32) | batch);
            let mut g_sum = CDyad::zero();
            let mut trace_sum = 0.0;
            for _ in 0..size {
                let point = sample_component(&comp, &mut rng);
                let g = greens::green_vacuum(acceptor, point, regime)
                    .expect("acceptor clearance verified before sampling");
                g_sum.add_assign(&g);
                trace_sum += g.frobenius_norm_sq();
            }
            BatchSum {
                component: ci,
                g_sum,
                trace_sum,
                count: size,
            }
        })
        .collect();

    // Full-sample estimate.
    let estimate = |skip: Option<usize>| -> (f64, f64, f64) {
        let mut kernel = CDyad::zero();
        let mut incoherent = 0.0;
        let mut comp_g = vec![CDyad::zero(); components.len()];
        let mut comp_t = vec![0.0; components.len()];
        let mut comp_m = vec![0usize; components.len()];
        for (bi, b) in batches.iter().enumerate() {
            if Some(bi) == skip {
                continue;
            }
            comp_g[b.component].add_assign(&b.g_sum);
            comp_t[b.component] += b.trace_sum;
            comp_m[b.component] += b.count;
        }
        for (ci, comp) in components.iter().enumerate() {
            if comp_m[ci] == 0 {
                continue;
            }
            let scale = comp.number() / comp_m[ci] as f64;
            kernel.add_assign(&comp_g[ci].scale(scale.into()));
            incoherent += scale * comp_t[ci];
        }
        let gsr = kernel.frobenius_norm_sq();
        (gsr, incoherent, gsr / (n_tot * incoherent))
    };

    let (gamma_sr, gamma_incoherent, fidelity) = estimate(None);

    // Leave-one-batch-out jackknife for the fidelity standard error.
    let nb = batches.len();
    let loo: Vec<f64> = (0..nb).map(|bi| estimate(Some(bi)).2).collect();
    let mean = loo.iter().sum::<f64>() / nb as f64;
    let var = loo.iter().map(|f| (f - mean).powi(2)).sum::<f64>() * (nb as f64 - 1.0) / nb as f64;
    let fidelity_std_error = var.sqrt();

    let samples = batches.iter().map(|b| b.count).sum();
    Ok(McFidelity {
        gamma_sr,
        gamma_incoherent,
        n: n_tot,
        fidelity,
        fidelity_std_error,
        samples,
    })
}

/// Uniform point in a ball or shell: inverse-CDF radius (volume-weighted
/// cube root), direction from three standard normals renormalised.
fn sample_component(comp: &Component, rng: &mut ChaCha8Rng) -> Vec3 {
    let a3 = comp.inner.powi(3);
    let b3 = comp.outer.powi(3);
    let u: f64 = rand::Rng::gen(rng);
    let r = (a3 + (b3 - a3) * u).cbrt();
    loop {
        let x: f64 = StandardNormal.sample(rng);
        let y: f64 = StandardNormal.sample(rng);
        let z: f64 = StandardNormal.sample(rng);
        let v = Vec3::new(x, y, z);
        if let Some(dir) = v.normalized() {
            if v.norm_sq() > 1e-24 {
                return comp.center + dir * r;
            }
        }
    }
}
