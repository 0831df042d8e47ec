//! Stack-allocated 3x3 complex tensors.

use num_complex::Complex64;

use crate::geometry::Vec3;

/// Re-exported complex scalar used everywhere in the crate.
pub type C64 = Complex64;

/// A 3x3 complex matrix, row-major, on the stack.
///
/// Used for the dyadic Green's tensor and for integrated kernels. Tensors
/// produced by [`crate::greens::green_vacuum`] are symmetric (not Hermitian):
/// `entry(i, j) == entry(j, i)` exactly, by construction from `I` and the
/// outer product of the unit separation vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CDyad {
    entries: [[C64; 3]; 3],
}

impl CDyad {
    pub const fn zero() -> Self {
        CDyad {
            entries: [[C64::new(0.0, 0.0); 3]; 3],
        }
    }

    pub fn identity() -> Self {
        let mut m = CDyad::zero();
        for i in 0..3 {
            m.entries[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub const fn from_entries(entries: [[C64; 3]; 3]) -> Self {
        CDyad { entries }
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[row][col]
    }

    pub fn entries(&self) -> &[[C64; 3]; 3] {
        &self.entries
    }

    /// `a * I + b * (e x e)` for a real unit vector `e`. The workhorse shape
    /// of the vacuum tensor. The real outer product is formed first, so the
    /// result is symmetric entry for entry, exactly.
    pub fn iso_plus_outer(a: C64, b: C64, e: Vec3) -> Self {
        let ex = [e.x, e.y, e.z];
        let mut m = CDyad::zero();
        for i in 0..3 {
            for j in 0..3 {
                let delta = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                m.entries[i][j] = a * delta + b * (ex[i] * ex[j]);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = CDyad::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.entries[i][j] = self.entries[j][i];
            }
        }
        m
    }

    pub fn conj_transpose(&self) -> Self {
        let mut m = CDyad::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.entries[i][j] = self.entries[j][i].conj();
            }
        }
        m
    }

    /// Ordinary matrix product.
    #[allow(clippy::needless_range_loop)]
    pub fn matmul(&self, other: &CDyad) -> Self {
        let mut m = CDyad::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..3 {
                    acc += self.entries[i][k] * other.entries[k][j];
                }
                m.entries[i][j] = acc;
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        self.entries[0][0] + self.entries[1][1] + self.entries[2][2]
    }

    /// Sum of `|entry|^2`, i.e. the squared Frobenius norm. Equals
    /// `Tr[M M^dagger]` and is always real and non-negative.
    pub fn frobenius_norm_sq(&self) -> f64 {
        let mut acc = 0.0;
        for row in &self.entries {
            for v in row {
                acc += v.norm_sqr();
            }
        }
        acc
    }

    /// Contraction `d_left . M . d_right` with real vectors.
    #[allow(clippy::needless_range_loop)]
    pub fn contract(&self, left: Vec3, right: Vec3) -> C64 {
        let l = [left.x, left.y, left.z];
        let r = [right.x, right.y, right.z];
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                acc += l[i] * self.entries[i][j] * r[j];
            }
        }
        acc
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for row in &mut m.entries {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        m
    }

    pub fn add(&self, other: &CDyad) -> Self {
        let mut m = *self;
        for i in 0..3 {
            for j in 0..3 {
                m.entries[i][j] += other.entries[i][j];
            }
        }
        m
    }

    pub fn sub(&self, other: &CDyad) -> Self {
        let mut m = *self;
        for i in 0..3 {
            for j in 0..3 {
                m.entries[i][j] -= other.entries[i][j];
            }
        }
        m
    }

    pub fn add_assign(&mut self, other: &CDyad) {
        for i in 0..3 {
            for j in 0..3 {
                self.entries[i][j] += other.entries[i][j];
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Largest `|self - other|` entry. Handy in tests and convergence checks.
    pub fn max_abs_diff(&self, other: &CDyad) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.norm()))
    }

    /// Similarity transform `Q M Q^T` by a real 3x3 matrix (rows of `q`).
    #[allow(clippy::needless_range_loop)]
    pub fn rotated(&self, q: &[[f64; 3]; 3]) -> Self {
        let mut qm = [[C64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    qm[i][j] += q[i][k] * self.entries[k][j];
                }
            }
        }
        let mut out = CDyad::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..3 {
                    acc += qm[i][k] * q[j][k];
                }
                out.entries[i][j] = acc;
            }
        }
        out
    }
}
