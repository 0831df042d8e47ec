//! Helpers shared by the integration test suites.
// Each test binary compiles its own copy, so not every helper is used
// everywhere.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use superret::geometry::Vec3;

/// `n` donors equally spaced on a circle of radius `r` in the z = 0 plane.
pub fn ring(n: usize, r: f64) -> Vec<Vec3> {
    (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            Vec3::new(r * t.cos(), r * t.sin(), 0.0)
        })
        .collect()
}

/// Rotation matrix about `axis` (need not be normalised) by `angle`,
/// Rodrigues' formula. Rows are the matrix rows.
pub fn rotation(axis: Vec3, angle: f64) -> [[f64; 3]; 3] {
    let u = axis.normalized().expect("rotation axis must be non-zero");
    let (s, c) = angle.sin_cos();
    let omc = 1.0 - c;
    [
        [
            c + u.x * u.x * omc,
            u.x * u.y * omc - u.z * s,
            u.x * u.z * omc + u.y * s,
        ],
        [
            u.y * u.x * omc + u.z * s,
            c + u.y * u.y * omc,
            u.y * u.z * omc - u.x * s,
        ],
        [
            u.z * u.x * omc - u.y * s,
            u.z * u.y * omc + u.x * s,
            c + u.z * u.z * omc,
        ],
    ]
}

pub fn apply(q: &[[f64; 3]; 3], v: Vec3) -> Vec3 {
    Vec3::new(
        q[0][0] * v.x + q[0][1] * v.y + q[0][2] * v.z,
        q[1][0] * v.x + q[1][1] * v.y + q[1][2] * v.z,
        q[2][0] * v.x + q[2][1] * v.y + q[2][2] * v.z,
    )
}

/// Random point in the spherical annulus `r_min <= |p| <= r_max`.
pub fn random_point(rng: &mut ChaCha8Rng, r_min: f64, r_max: f64) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            let r = rng.gen_range(r_min..r_max);
            return v * (r / n);
        }
    }
}

/// Random unit vector.
pub fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    random_point(rng, 0.5, 1.0).normalized().unwrap()
}

/// Random rotation matrix.
pub fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let axis = random_unit(rng);
    let angle = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
    rotation(axis, angle)
}
