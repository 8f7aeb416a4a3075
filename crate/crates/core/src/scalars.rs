//! Scalars over ℝ, ℂ and ℍ sharing one four-component layout.
//!
//! Every scalar is stored as `a + b·i + c·j + d·k`. Reals keep `b = c = d = 0`
//! and complex numbers keep `c = d = 0`, so quaternion multiplication restricted
//! to those subspaces is ordinary real or complex multiplication.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The scalar field a matrix or group lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Field {
    #[serde(rename = "R")]
    Real,
    #[serde(rename = "C")]
    Complex,
    #[serde(rename = "H")]
    Quaternion,
}

impl Field {
    /// Real dimension of the field.
    pub fn real_dim(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
            Field::Quaternion => 4,
        }
    }

    /// Zero out the components that do not belong to this field.
    #[inline]
    pub fn project(self, q: Quat) -> Quat {
        match self {
            Field::Real => Quat::real(q.a),
            Field::Complex => Quat::complex(q.a, q.b),
            Field::Quaternion => q,
        }
    }

    /// True when `q` has no components outside this field (up to `tol`).
    pub fn contains(self, q: Quat, tol: f64) -> bool {
        match self {
            Field::Real => q.b.abs() <= tol && q.c.abs() <= tol && q.d.abs() <= tol,
            Field::Complex => q.c.abs() <= tol && q.d.abs() <= tol,
            Field::Quaternion => true,
        }
    }

    /// Basis of the field over ℝ: `{1}`, `{1, i}` or `{1, i, j, k}`.
    pub fn real_basis(self) -> &'static [Quat] {
        const BASIS: [Quat; 4] = [Quat::ONE, Quat::I, Quat::J, Quat::K];
        &BASIS[..self.real_dim()]
    }

    /// Basis of the purely imaginary part of the field.
    pub fn imaginary_basis(self) -> &'static [Quat] {
        &self.real_basis()[1..]
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Field::Real => "R",
            Field::Complex => "C",
            Field::Quaternion => "H",
        };
        f.write_str(s)
    }
}

/// Raw quaternion `a + b·i + c·j + d·k`; the storage type of every matrix entry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quat {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quat {
    pub const ZERO: Quat = Quat::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quat = Quat::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quat = Quat::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quat = Quat::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quat = Quat::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quat { a, b, c, d }
    }

    #[inline]
    pub const fn real(a: f64) -> Self {
        Quat::new(a, 0.0, 0.0, 0.0)
    }

    #[inline]
    pub const fn complex(re: f64, im: f64) -> Self {
        Quat::new(re, im, 0.0, 0.0)
    }

    /// `e^{iθ}` as a complex number.
    #[inline]
    pub fn cis(theta: f64) -> Self {
        Quat::complex(theta.cos(), theta.sin())
    }

    #[inline]
    pub fn conj(self) -> Self {
        Quat::new(self.a, -self.b, -self.c, -self.d)
    }

    #[inline]
    pub fn re(self) -> f64 {
        self.a
    }

    /// The imaginary part `b·i + c·j + d·k`.
    #[inline]
    pub fn im(self) -> Self {
        Quat::new(0.0, self.b, self.c, self.d)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Quat::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self) -> Option<Self> {
        let n = self.norm_sqr();
        if n == 0.0 {
            None
        } else {
            Some(self.conj().scale(1.0 / n))
        }
    }

    /// Euclidean inner product of the coefficient vectors, `Re(conj(p)·q)`.
    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.a * other.a + self.b * other.b + self.c * other.c + self.d * other.d
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Quat::new(v[0], v[1], v[2], v[3])
    }

    /// Exponential of a quaternion.
    pub fn exp(self) -> Self {
        let v = self.im();
        let theta = v.norm();
        let ea = self.a.exp();
        if theta < 1e-300 {
            return Quat::real(ea);
        }
        let s = theta.sin() / theta;
        Quat::new(
            ea * theta.cos(),
            ea * s * self.b,
            ea * s * self.c,
            ea * s * self.d,
        )
    }

    /// 4×4 real matrix of `x ↦ self·x` in the basis `{1, i, j, k}`, row-major.
    pub fn left_matrix(self) -> [[f64; 4]; 4] {
        let Quat { a, b, c, d } = self;
        [[a, -b, -c, -d], [b, a, -d, c], [c, d, a, -b], [d, -c, b, a]]
    }

    /// 4×4 real matrix of `x ↦ x·self` in the basis `{1, i, j, k}`, row-major.
    pub fn right_matrix(self) -> [[f64; 4]; 4] {
        let Quat { a, b, c, d } = self;
        [[a, -b, -c, -d], [b, a, d, -c], [c, -d, a, b], [d, c, -b, a]]
    }
}

impl Add for Quat {
    type Output = Quat;
    #[inline]
    fn add(self, o: Quat) -> Quat {
        Quat::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl AddAssign for Quat {
    #[inline]
    fn add_assign(&mut self, o: Quat) {
        *self = *self + o;
    }
}

impl Sub for Quat {
    type Output = Quat;
    #[inline]
    fn sub(self, o: Quat) -> Quat {
        Quat::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl SubAssign for Quat {
    #[inline]
    fn sub_assign(&mut self, o: Quat) {
        *self = *self - o;
    }
}

impl Neg for Quat {
    type Output = Quat;
    #[inline]
    fn neg(self) -> Quat {
        Quat::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for Quat {
    type Output = Quat;
    #[inline]
    fn mul(self, o: Quat) -> Quat {
        Quat::new(
            self.a * o.a - self.b * o.b - self.c * o.c - self.d * o.d,
            self.a * o.b + self.b * o.a + self.c * o.d - self.d * o.c,
            self.a * o.c - self.b * o.d + self.c * o.a + self.d * o.b,
            self.a * o.d + self.b * o.c - self.c * o.b + self.d * o.a,
        )
    }
}

impl Mul<f64> for Quat {
    type Output = Quat;
    #[inline]
    fn mul(self, s: f64) -> Quat {
        self.scale(s)
    }
}

impl Div<f64> for Quat {
    type Output = Quat;
    #[inline]
    fn div(self, s: f64) -> Quat {
        self.scale(1.0 / s)
    }
}

impl From<f64> for Quat {
    fn from(a: f64) -> Self {
        Quat::real(a)
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.a, self.b, self.c, self.d)
    }
}

/// A scalar tagged with the field it belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scalar {
    pub field: Field,
    pub value: Quat,
}

impl Scalar {
    /// Build a scalar, dropping components that are not part of `field`.
    pub fn new(field: Field, value: Quat) -> Self {
        Scalar {
            field,
            value: field.project(value),
        }
    }

    pub fn real(a: f64) -> Self {
        Scalar::new(Field::Real, Quat::real(a))
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Scalar::new(Field::Complex, Quat::complex(re, im))
    }

    pub fn quaternion(a: f64, b: f64, c: f64, d: f64) -> Self {
        Scalar::new(Field::Quaternion, Quat::new(a, b, c, d))
    }

    fn same_field(self, other: Scalar) -> Result<Field> {
        if self.field == other.field {
            Ok(self.field)
        } else {
            Err(Error::FieldMismatch {
                left: self.field,
                right: other.field,
            })
        }
    }

    pub fn try_mul(self, other: Scalar) -> Result<Scalar> {
        let field = self.same_field(other)?;
        Ok(Scalar {
            field,
            value: self.value * other.value,
        })
    }

    pub fn try_add(self, other: Scalar) -> Result<Scalar> {
        let field = self.same_field(other)?;
        Ok(Scalar {
            field,
            value: self.value + other.value,
        })
    }

    pub fn conj(self) -> Scalar {
        Scalar {
            field: self.field,
            value: self.value.conj(),
        }
    }

    pub fn re(self) -> f64 {
        self.value.re()
    }

    pub fn abs(self) -> f64 {
        self.value.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(p: Quat, q: Quat, tol: f64) -> bool {
        (p - q).norm() <= tol
    }

    // Left multiplication written out as a 4×4 real matrix acting on coefficient vectors.
    fn via_matrix(p: Quat, q: Quat) -> Quat {
        let m = p.left_matrix();
        let v = q.to_array();
        let mut out = [0.0; 4];
        for (r, row) in m.iter().enumerate() {
            out[r] = row.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
        }
        Quat::from_array(out)
    }

    #[test]
    fn basis_relations() {
        let (i, j, k) = (Quat::I, Quat::J, Quat::K);
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        for e in [i, j, k] {
            assert_eq!(e * e, -Quat::ONE);
        }
        assert_eq!(j * i, -k);
    }

    #[test]
    fn complex_product_and_conjugate() {
        let p = Scalar::complex(1.0, 1.0);
        let q = Scalar::complex(1.0, -1.0);
        assert_eq!(p.try_mul(q).unwrap(), Scalar::complex(2.0, 0.0));
        let q = Quat::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(q.conj(), Quat::new(1.0, -2.0, -3.0, -4.0));
        assert_eq!(Quat::I.re(), 0.0);
        let one = Quat::new(1.0, 1.0, 1.0, 1.0);
        assert_eq!((one * one.conj()).re(), 4.0);
    }

    #[test]
    fn mixed_sum_product() {
        // (i + j)(i - j) expanded component-wise: -1 - k - k + 1 = -2k.
        let p = Quat::I + Quat::J;
        let q = Quat::I - Quat::J;
        let expected = Quat::new(0.0, 0.0, 0.0, -2.0);
        assert!(close(p * q, expected, 1e-15));
        assert!(close(via_matrix(p, q), expected, 1e-15));
    }

    #[test]
    fn field_tags_must_match() {
        let err = Scalar::real(1.0)
            .try_mul(Scalar::complex(0.0, 1.0))
            .unwrap_err();
        assert!(matches!(err, Error::FieldMismatch { .. }));
    }

    #[test]
    fn construction_projects_onto_field() {
        let s = Scalar::new(Field::Complex, Quat::new(1.0, 2.0, 3.0, 4.0));
        assert_eq!(s.value, Quat::complex(1.0, 2.0));
    }

    #[test]
    fn left_matrix_is_scaled_orthogonal() {
        let q = Quat::new(0.3, -1.2, 0.7, 2.0);
        let m = q.left_matrix();
        for r in 0..4 {
            for s in 0..4 {
                let dot: f64 = (0..4).map(|t| m[t][r] * m[t][s]).sum();
                let expect = if r == s { q.norm_sqr() } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn many_random_norms_multiply() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut rq = || {
            Quat::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            )
        };
        for _ in 0..10_000 {
            let (p, q) = (rq(), rq());
            let lhs = (p * q).norm();
            let rhs = p.norm() * q.norm();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        }
    }

    fn quat() -> impl Strategy<Value = Quat> {
        (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64)
            .prop_map(|(a, b, c, d)| Quat::new(a, b, c, d))
    }

    proptest! {
        #[test]
        fn conj_is_involutive_antihomomorphism(p in quat(), q in quat()) {
            prop_assert_eq!(p.conj().conj(), p);
            prop_assert!(close((p * q).conj(), q.conj() * p.conj(), 1e-12));
        }

        #[test]
        fn product_is_associative(p in quat(), q in quat(), r in quat()) {
            let scale = 1.0 + p.norm() * q.norm() * r.norm();
            prop_assert!(close((p * q) * r, p * (q * r), 1e-13 * scale));
        }

        #[test]
        fn norm_identity(q in quat()) {
            let n = q * q.conj();
            prop_assert!(n.im().norm() < 1e-12);
            prop_assert!((n.re() - q.norm_sqr()).abs() < 1e-12 * (1.0 + q.norm_sqr()));
        }

        #[test]
        fn matrix_forms_agree_with_product(p in quat(), q in quat()) {
            prop_assert!(close(via_matrix(p, q), p * q, 1e-12));
            let r = p.right_matrix();
            let v = q.to_array();
            let mut out = [0.0; 4];
            for (i, row) in r.iter().enumerate() {
                out[i] = row.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
            }
            prop_assert!(close(Quat::from_array(out), q * p, 1e-12));
        }
    }
}
