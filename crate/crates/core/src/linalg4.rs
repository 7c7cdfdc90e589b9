//! Vector algebra in four-dimensional Euclidean space.
//!
//! The only non-standard piece is [`triple_product`], the ternary vector
//! product defined by a formal 4×4 determinant whose first row holds the
//! basis vectors. Its sign convention is load-bearing: the second binormal
//! of a Frenet frame and the hypersurface normal are both built from it.

use std::fmt;
use std::ops::{Add, Div, Index, Mul, Neg, Sub};

/// A point or vector in R⁴.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vec4([f64; 4]);

impl Vec4 {
    pub const ZERO: Vec4 = Vec4([0.0; 4]);

    pub const fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        Vec4([x1, x2, x3, x4])
    }

    /// The `i`-th standard basis vector, zero-based (`basis(0)` is e₁).
    pub fn basis(i: usize) -> Self {
        let mut c = [0.0; 4];
        c[i] = 1.0;
        Vec4(c)
    }

    pub const fn from_array(c: [f64; 4]) -> Self {
        Vec4(c)
    }

    pub const fn to_array(self) -> [f64; 4] {
        self.0
    }

    pub fn x1(self) -> f64 {
        self.0[0]
    }
    pub fn x2(self) -> f64 {
        self.0[1]
    }
    pub fn x3(self) -> f64 {
        self.0[2]
    }
    pub fn x4(self) -> f64 {
        self.0[3]
    }

    pub fn dot(self, other: Vec4) -> f64 {
        dot(self, other)
    }

    pub fn norm_squared(self) -> f64 {
        dot(self, self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec4> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(self, other: Vec4) -> f64 {
        (self - other).max_abs()
    }

    pub fn max_abs(self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    fn zip(self, other: Vec4, f: impl Fn(f64, f64) -> f64) -> Vec4 {
        let (a, b) = (self.0, other.0);
        Vec4([f(a[0], b[0]), f(a[1], b[1]), f(a[2], b[2]), f(a[3], b[3])])
    }

    fn map(self, f: impl Fn(f64) -> f64) -> Vec4 {
        Vec4(self.0.map(f))
    }
}

impl fmt::Display for Vec4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a}, {b}, {c}, {d})")
    }
}

impl Index<usize> for Vec4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec4 {
    type Output = Vec4;
    fn add(self, rhs: Vec4) -> Vec4 {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for Vec4 {
    type Output = Vec4;
    fn sub(self, rhs: Vec4) -> Vec4 {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Neg for Vec4 {
    type Output = Vec4;
    fn neg(self) -> Vec4 {
        self.map(|a| -a)
    }
}

impl Mul<f64> for Vec4 {
    type Output = Vec4;
    fn mul(self, k: f64) -> Vec4 {
        self.map(|a| a * k)
    }
}

impl Mul<Vec4> for f64 {
    type Output = Vec4;
    fn mul(self, v: Vec4) -> Vec4 {
        v * self
    }
}

impl Div<f64> for Vec4 {
    type Output = Vec4;
    fn div(self, k: f64) -> Vec4 {
        self.map(|a| a / k)
    }
}

/// Standard inner product.
pub fn dot(a: Vec4, b: Vec4) -> f64 {
    a.0[0] * b.0[0] + a.0[1] * b.0[1] + a.0[2] * b.0[2] + a.0[3] * b.0[3]
}

/// `c · (a × b)`. Evaluating the cross product of the first two rows makes
/// `det3(a, a, c)` exactly zero and `det3(b, a, c)` exactly `-det3(a, b, c)`.
#[inline]
fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let x = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    c[0] * x[0] + c[1] * x[1] + c[2] * x[2]
}

/// Ternary vector product `u ⊗ v ⊗ w`.
///
/// Cofactor expansion of
///
/// ```text
/// | e1 e2 e3 e4 |
/// | u1 u2 u3 u4 |
/// | v1 v2 v3 v4 |
/// | w1 w2 w3 w4 |
/// ```
///
/// along its first row, so component `i` carries the sign `(-1)^i`
/// (zero-based). Linearly dependent arguments give the zero vector.
///
/// ```
/// use isogeo4::linalg4::{triple_product, Vec4};
/// let e = Vec4::basis;
/// assert_eq!(triple_product(e(0), e(1), e(2)), -e(3));
/// ```
pub fn triple_product(u: Vec4, v: Vec4, w: Vec4) -> Vec4 {
    let (u, v, w) = (u.0, v.0, w.0);
    let minor = |skip: usize| {
        let pick = |r: [f64; 4]| {
            let mut out = [0.0; 3];
            let mut k = 0;
            for (j, x) in r.iter().enumerate() {
                if j != skip {
                    out[k] = *x;
                    k += 1;
                }
            }
            out
        };
        det3(pick(u), pick(v), pick(w))
    };
    Vec4([minor(0), -minor(1), minor(2), -minor(3)])
}

/// Determinant of the 3×3 Gram matrix of `(u, v, w)`.
pub fn gram_det3(u: Vec4, v: Vec4, w: Vec4) -> f64 {
    let g = [
        [dot(u, u), dot(u, v), dot(u, w)],
        [dot(v, u), dot(v, v), dot(v, w)],
        [dot(w, u), dot(w, v), dot(w, w)],
    ];
    det3(g[0], g[1], g[2])
}

/// `‖u⊗v⊗w‖² − det Gram(u,v,w)`; zero in exact arithmetic.
pub fn gram_norm_identity_check(u: Vec4, v: Vec4, w: Vec4) -> f64 {
    triple_product(u, v, w).norm_squared() - gram_det3(u, v, w)
}

/// An ordered 4-frame: tangent, principal normal, first and second binormal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame4 {
    pub t: Vec4,
    pub n: Vec4,
    pub b1: Vec4,
    pub b2: Vec4,
}

impl Frame4 {
    pub fn identity() -> Self {
        Frame4 {
            t: Vec4::basis(0),
            n: Vec4::basis(1),
            b1: Vec4::basis(2),
            b2: Vec4::basis(3),
        }
    }

    pub fn vectors(&self) -> [Vec4; 4] {
        [self.t, self.n, self.b1, self.b2]
    }

    /// `c[0]·T + c[1]·N + c[2]·B₁ + c[3]·B₂`.
    pub fn combine(&self, c: [f64; 4]) -> Vec4 {
        self.t * c[0] + self.n * c[1] + self.b1 * c[2] + self.b2 * c[3]
    }

    /// Components of `v` in this frame (valid for orthonormal frames).
    pub fn coordinates(&self, v: Vec4) -> [f64; 4] {
        self.vectors().map(|e| dot(e, v))
    }

    /// Largest of the ten residuals `|⟨eᵢ,eⱼ⟩ − δᵢⱼ|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let e = self.vectors();
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in i..4 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(e[i], e[j]) - target).abs());
            }
        }
        worst
    }
}

pub const DEFAULT_FRAME_TOL: f64 = 1e-10;

pub fn is_orthonormal_frame(f: &Frame4, tol: f64) -> bool {
    f.orthonormality_defect() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> Vec4 {
        Vec4::basis(i)
    }

    #[test]
    fn dot_examples() {
        assert_eq!(dot(e(0), e(1)), 0.0);
        let a = Vec4::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(dot(a, a), 30.0);
        let h = Vec4::new(0.5, 0.5, 0.5, 0.5);
        assert_eq!(h.norm_squared(), 1.0);
    }

    #[test]
    fn triple_product_of_basis_vectors() {
        assert_eq!(triple_product(e(0), e(1), e(2)), -e(3));
        // Cyclic shifts of the remaining basis vector pick up the cofactor signs.
        assert_eq!(triple_product(e(1), e(2), e(3)), e(0));
        assert_eq!(triple_product(e(0), e(2), e(3)), -e(1));
        assert_eq!(triple_product(e(0), e(1), e(3)), e(2));
    }

    #[test]
    fn repeated_argument_vanishes() {
        let u = Vec4::new(0.3, -1.0, 2.0, 0.7);
        let w = Vec4::new(1.0, 4.0, -2.0, 0.1);
        assert_eq!(triple_product(u, u, w), Vec4::ZERO);
        assert!(gram_norm_identity_check(u, u, w).abs() < 1e-12);
    }

    #[test]
    fn gram_identity_on_orthonormal_triple() {
        assert_eq!(gram_norm_identity_check(e(0), e(1), e(2)), 0.0);
    }

    #[test]
    fn helix_second_binormal() {
        // r', r'', r''' of (cos s/2, sin s/2, s/2, s/√2) at s = 0.
        let r1 = Vec4::new(0.0, 0.5, 0.5, 2f64.sqrt() / 2.0);
        let r2 = Vec4::new(-0.5, 0.0, 0.0, 0.0);
        let r3 = Vec4::new(0.0, -0.5, 0.0, 0.0);
        let b2 = triple_product(r1, r2, r3).normalized().unwrap();
        let want = Vec4::new(0.0, 0.0, 6f64.sqrt() / 3.0, -(3f64.sqrt()) / 3.0);
        assert!(b2.max_abs_diff(want) < 1e-15, "{b2}");
    }

    #[test]
    fn frame_checks() {
        assert!(is_orthonormal_frame(&Frame4::identity(), 1e-12));
        let mut f = Frame4::identity();
        f.b2 = f.b2 * 1.01;
        assert!(!is_orthonormal_frame(&f, 1e-10));
    }

    #[test]
    fn zero_vector_has_no_direction() {
        assert!(Vec4::ZERO.normalized().is_none());
    }
}
