//! Low-dimensional equivalences: the split-quaternion model of `O₀(2,2)`, the
//! morphisms `Sp(1,1) → O₀(1,4)` and `SL₄(ℝ) → O₀(3,3)`, the conformal and
//! projective actions on spheres, and the geodesic consequences for `Sp(1,1)`
//! and `O₀(3,3)`.
//!
//! Fixed bases: `ℍ ≅ ℝ⁴` via `{1, i, j, k}`, `Im ℍ ≅ ℝ³` via `{i, j, k}`,
//! `𝕄 ≅ ℝ⁴` via `{𝟏, 𝐢, 𝐣, −𝐤}` and `o₄ ≅ ℝ⁶` via `{L_i, L_j, L_k, R_i, R_j, R_k}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::action::{self, MobiusElement};
use crate::error::{Error, Result};
use crate::geodesic::KineticGeometry;
use crate::groups::{self, GroupId};
use crate::matrices::Mat;
use crate::metric::SampleSet;
use crate::scalars::{Field, Quat};

/// Pass threshold for the commuting diagrams.
pub const DIAGRAM_TOL: f64 = 1e-8;
/// Pass threshold for the triviality of the right factor on `SO₂`.
pub const RIGHT_FACTOR_TOL: f64 = 1e-10;

/// `a𝟏 + b𝐢 + c𝐣 + d𝐤` in the algebra of real 2×2 matrices.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct SplitQuaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl SplitQuaternion {
    pub const ONE: SplitQuaternion = SplitQuaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: SplitQuaternion = SplitQuaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: SplitQuaternion = SplitQuaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: SplitQuaternion = SplitQuaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        SplitQuaternion { a, b, c, d }
    }

    /// The 2×2 matrix `[[a+d, b+c], [c−b, a−d]]`.
    pub fn to_matrix(self) -> [[f64; 2]; 2] {
        let SplitQuaternion { a, b, c, d } = self;
        [[a + d, b + c], [c - b, a - d]]
    }

    pub fn from_matrix(m: [[f64; 2]; 2]) -> Self {
        SplitQuaternion {
            a: 0.5 * (m[0][0] + m[1][1]),
            b: 0.5 * (m[0][1] - m[1][0]),
            c: 0.5 * (m[0][1] + m[1][0]),
            d: 0.5 * (m[0][0] - m[1][1]),
        }
    }

    pub fn conj(self) -> Self {
        SplitQuaternion::new(self.a, -self.b, -self.c, -self.d)
    }

    /// `⟨p, p⟩ = a² + b² − c² − d²`.
    pub fn norm_sq(self) -> f64 {
        self.a * self.a + self.b * self.b - self.c * self.c - self.d * self.d
    }

    pub fn det(self) -> f64 {
        let m = self.to_matrix();
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn scale(self, s: f64) -> Self {
        SplitQuaternion::new(s * self.a, s * self.b, s * self.c, s * self.d)
    }

    /// `(α, β)` with `p = α + 𝐣β`, both complex numbers in `ℝ + 𝐢ℝ`.
    pub fn complex_pair(self) -> (Quat, Quat) {
        (
            Quat::complex(self.a, self.b),
            Quat::complex(self.c, -self.d),
        )
    }

    pub fn from_complex_pair(alpha: Quat, beta: Quat) -> Self {
        SplitQuaternion::new(alpha.a, alpha.b, beta.a, -beta.b)
    }

    /// Coordinates in the basis `{𝟏, 𝐢, 𝐣, −𝐤}`.
    pub fn coords(self) -> [f64; 4] {
        [self.a, self.b, self.c, -self.d]
    }

    pub fn from_coords(v: [f64; 4]) -> Self {
        SplitQuaternion::new(v[0], v[1], v[2], -v[3])
    }

    /// Random element of `SL₂(ℝ)`: `exp` of a Gaussian traceless matrix of
    /// Frobenius norm `spread`.
    pub fn random_unit<R: Rng + ?Sized>(spread: f64, rng: &mut R) -> Self {
        let mut x = Mat::zeros(Field::Real, 2, 2);
        for r in 0..2 {
            for c in 0..2 {
                x[(r, c)] = Quat::real(StandardNormal.sample(rng));
            }
        }
        let t = 0.5 * x.trace().a;
        x[(0, 0)].a -= t;
        x[(1, 1)].a -= t;
        let e = x.scale(spread / x.frob_norm()).mexp(1.0);
        SplitQuaternion::from_matrix([[e[(0, 0)].a, e[(0, 1)].a], [e[(1, 0)].a, e[(1, 1)].a]])
    }
}

impl Add for SplitQuaternion {
    type Output = SplitQuaternion;
    fn add(self, o: Self) -> Self {
        SplitQuaternion::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for SplitQuaternion {
    type Output = SplitQuaternion;
    fn sub(self, o: Self) -> Self {
        SplitQuaternion::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for SplitQuaternion {
    type Output = SplitQuaternion;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for SplitQuaternion {
    type Output = SplitQuaternion;
    fn mul(self, o: Self) -> Self {
        let (x, y) = (self.to_matrix(), o.to_matrix());
        let mut m = [[0.0; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = x[r][0] * y[0][c] + x[r][1] * y[1][c];
            }
        }
        SplitQuaternion::from_matrix(m)
    }
}

impl fmt::Display for SplitQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}𝐢 + {}𝐣 + {}𝐤", self.a, self.b, self.c, self.d)
    }
}

/// Matrix of `x ↦ p x conj(q)` on `𝕄` in the basis `{𝟏, 𝐢, 𝐣, −𝐤}`; an element
/// of `O₀(2,2)` when `p, q ∈ SL₂(ℝ)`.
pub fn o22_operator(p: SplitQuaternion, q: SplitQuaternion) -> Mat {
    let basis = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ];
    let qc = q.conj();
    let cols: Vec<[f64; 4]> = basis
        .iter()
        .map(|&e| (p * SplitQuaternion::from_coords(e) * qc).coords())
        .collect();
    Mat::from_fn(Field::Real, 4, 4, |r, c| Quat::real(cols[c][r]))
}

/// `u ∈ S¹ ⊂ ℂ` as the rotation `ρ(u) ∈ SO₂`.
pub fn circle_to_so2(u: Quat) -> Mat {
    groups::rotation2(u.b.atan2(u.a))
}

/// The conformal action on the circle, `p · u = (αu + β̄)(βu + ᾱ)⁻¹` for
/// `p = α + 𝐣β`.
pub fn circle_act(p: SplitQuaternion, u: Quat) -> Result<Quat> {
    let (alpha, beta) = p.complex_pair();
    let den = (beta * u + alpha.conj())
        .inv()
        .ok_or_else(|| Error::Invariant("βu + ᾱ vanishes".into()))?;
    Ok((alpha * u + beta.conj()) * den)
}

fn unit_check(z: &[f64]) -> Result<()> {
    let n = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "expected a unit vector, got norm {n}"
        )));
    }
    Ok(())
}

fn mat_vec(a: &Mat, v: &[f64]) -> Vec<f64> {
    (0..a.rows())
        .map(|r| (0..a.cols()).map(|c| a[(r, c)].a * v[c]).sum())
        .collect()
}

/// `max |AᵀηA − η|` for `η = diag(1, −I)`, plus infinity off the identity component.
pub fn lorentz_residual(a: &Mat) -> f64 {
    let m = a.rows();
    let eta = Mat::from_fn(Field::Real, m, m, |r, c| match (r == c, r == 0) {
        (false, _) => Quat::ZERO,
        (true, true) => Quat::ONE,
        (true, false) => -Quat::ONE,
    });
    let res = (&(&(&a.transpose() * &eta) * a) - &eta).norm_max();
    let det = a.det().map(|d| d.a).unwrap_or(0.0);
    if a[(0, 0)].a < 1.0 - 1e-9 || det <= 0.0 {
        f64::INFINITY
    } else {
        res
    }
}

/// Conformal action of `O₀(1, m+1)` on `Sᵐ`: `A(1, z)ᵀ ∈ ℝ(1, z′)ᵀ`.
pub fn conformal_act(a: &Mat, z: &[f64]) -> Result<Vec<f64>> {
    let m = z.len();
    if a.shape() != (m + 1, m + 1) || a.field() != Field::Real {
        return Err(Error::Shape {
            expected: (m + 1, m + 1),
            got: a.shape(),
        });
    }
    unit_check(z)?;
    let res = lorentz_residual(a);
    let scale = a.norm_max().powi(2).max(1.0);
    if res > 1e-9 * scale {
        return Err(Error::InvalidArgument(format!(
            "matrix is not in O0(1,{m}+1): residual {res:.3e}"
        )));
    }
    let mut x = vec![1.0];
    x.extend_from_slice(z);
    let y = mat_vec(a, &x);
    if y[0].abs() < 1e-300 {
        return Err(Error::Invariant(
            "vanishing time component in the conformal action".into(),
        ));
    }
    Ok(y[1..].iter().map(|v| v / y[0]).collect())
}

/// Projective action of `SLₘ(ℝ)` on `Sᵐ⁻¹`: `z ↦ Az/|Az|`.
pub fn projective_act(a: &Mat, z: &[f64]) -> Result<Vec<f64>> {
    let m = z.len();
    if a.shape() != (m, m) || a.field() != Field::Real {
        return Err(Error::Shape {
            expected: (m, m),
            got: a.shape(),
        });
    }
    unit_check(z)?;
    let det = a.det()?.a;
    if (det - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "projective action needs det 1, got {det}"
        )));
    }
    let y = mat_vec(a, z);
    let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(y.iter().map(|v| v / n).collect())
}

fn real4(m: [[f64; 4]; 4]) -> Mat {
    Mat::from_fn(Field::Real, 4, 4, |r, c| Quat::real(m[r][c]))
}

/// `L_q` on `ℍ ≅ ℝ⁴`.
pub fn left_mult(q: Quat) -> Mat {
    real4(q.left_matrix())
}

/// `R_q` on `ℍ ≅ ℝ⁴`.
pub fn right_mult(q: Quat) -> Mat {
    real4(q.right_matrix())
}

fn quat_vec(q: Quat) -> Vec<f64> {
    q.to_array().to_vec()
}

fn vec_quat(v: &[f64]) -> Quat {
    Quat::new(v[0], v[1], v[2], v[3])
}

/// The Lie algebra map `f(ξ ᾱ; α η) = (0 2αᵀ; 2α L_η − R_ξ)` from `sp(1,1)` to `o(1,4)`.
pub fn sp11_algebra_map(x: &Mat) -> Result<Mat> {
    let id = GroupId::split(Field::Quaternion, 1);
    let res = groups::lie_residual(&id, x)?;
    if res > 1e-9 * x.norm_max().max(1.0) {
        return Err(Error::NotTangent {
            group: id,
            residual: res,
        });
    }
    let (xi, alpha, eta) = (x[(0, 0)], x[(1, 0)], x[(1, 1)]);
    let rot = &left_mult(eta) - &right_mult(xi);
    let mut out = Mat::zeros(Field::Real, 5, 5);
    let a = alpha.to_array();
    for k in 0..4 {
        out[(0, k + 1)] = Quat::real(2.0 * a[k]);
        out[(k + 1, 0)] = Quat::real(2.0 * a[k]);
    }
    out.set_block(1, 1, &rot);
    Ok(out)
}

/// `diag(H_{2t}, I₃)`, the image of `exp(t (0 1; 1 0))`.
fn boost(t: f64) -> Mat {
    let mut out = Mat::identity(Field::Real, 5);
    let (s, c) = ((2.0 * t).sinh(), (2.0 * t).cosh());
    out[(0, 0)] = Quat::real(c);
    out[(1, 1)] = Quat::real(c);
    out[(0, 1)] = Quat::real(s);
    out[(1, 0)] = Quat::real(s);
    out
}

fn rotation_block(q: &Mat) -> Mat {
    let mut out = Mat::identity(Field::Real, 5);
    out.set_block(1, 1, q);
    out
}

/// The morphism `F: Sp(1,1) → O₀(1,4)` integrating [`sp11_algebra_map`],
/// evaluated through `g = diag(p, q) H_t diag(1, q′)`:
/// `F(g) = diag(1, L_q R_p̄) diag(H_{2t}, I₃) diag(1, L_{q′})`.
pub fn morphism_sp11(g: &Mat) -> Result<Mat> {
    let id = GroupId::split(Field::Quaternion, 1);
    let residual = groups::is_member(&id, g)?;
    if residual > groups::MEMBERSHIP_TOL * g.norm_max().powi(2).max(1.0) {
        return Err(Error::NotMember {
            group: id,
            residual,
        });
    }
    let (a, c, d) = (g[(0, 0)], g[(1, 0)], g[(1, 1)]);
    let t = a.norm().max(1.0).acosh();
    let p = a.scale(1.0 / a.norm());
    let q = if c.norm() > 0.0 {
        c.scale(1.0 / c.norm())
    } else {
        Quat::ONE
    };
    let q2 = q.conj() * d.scale(1.0 / d.norm());
    let k1 = rotation_block(&(&left_mult(q) * &right_mult(p.conj())));
    let k2 = rotation_block(&left_mult(q2));
    Ok(&(&k1 * &boost(t)) * &k2)
}

/// Matrices `{L_i, L_j, L_k, R_i, R_j, R_k}` spanning `o₄`.
pub fn o4_basis() -> [Mat; 6] {
    [
        left_mult(Quat::I),
        left_mult(Quat::J),
        left_mult(Quat::K),
        right_mult(Quat::I),
        right_mult(Quat::J),
        right_mult(Quat::K),
    ]
}

/// Coordinates of a skew-symmetric 4×4 matrix in [`o4_basis`].
pub fn o4_coordinates(z: &Mat) -> [f64; 6] {
    let basis = o4_basis();
    let mut out = [0.0; 6];
    for (o, e) in out.iter_mut().zip(&basis) {
        *o = 0.25 * e.frob_inner(z).expect("4×4 real matrices");
    }
    out
}

fn check_real_square(a: &Mat, n: usize) -> Result<()> {
    if a.field() != Field::Real {
        return Err(Error::FieldMismatch {
            left: Field::Real,
            right: a.field(),
        });
    }
    if a.shape() != (n, n) {
        return Err(Error::Shape {
            expected: (n, n),
            got: a.shape(),
        });
    }
    Ok(())
}

fn matrix_in_o4_basis(op: impl Fn(&Mat) -> Mat) -> Mat {
    let basis = o4_basis();
    let cols: Vec<[f64; 6]> = basis.iter().map(|e| o4_coordinates(&op(e))).collect();
    Mat::from_fn(Field::Real, 6, 6, |r, c| Quat::real(cols[c][r]))
}

/// `F(A)`, the matrix of `Z ↦ AZAᵀ` on `o₄` in [`o4_basis`].
pub fn morphism_sl4(a: &Mat) -> Result<Mat> {
    check_real_square(a, 4)?;
    let det = a.det()?.a;
    if (det - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("expected det 1, got {det}")));
    }
    let at = a.transpose();
    Ok(matrix_in_o4_basis(|z| &(a * z) * &at))
}

/// Derivative of [`morphism_sl4`]: the matrix of `W ↦ ZW + WZᵀ`.
pub fn sl4_algebra_map(z: &Mat) -> Result<Mat> {
    check_real_square(z, 4)?;
    let zt = z.transpose();
    Ok(matrix_in_o4_basis(|w| &(z * w) + &(w * &zt)))
}

/// `I_w`, the matrix of `x ↦ w x w⁻¹` on `Im ℍ` in the basis `{i, j, k}`.
pub fn rotation_matrix_iw(w: Quat) -> Result<Mat> {
    let winv = w
        .inv()
        .ok_or_else(|| Error::InvalidArgument("I_w needs w ≠ 0".into()))?;
    let cols: Vec<[f64; 4]> = [Quat::I, Quat::J, Quat::K]
        .iter()
        .map(|&e| (w * e * winv).to_array())
        .collect();
    Ok(Mat::from_fn(Field::Real, 3, 3, |r, c| {
        Quat::real(cols[c][r + 1])
    }))
}

/// Which commuting square to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Diagram {
    /// `SL₂(ℝ) × S¹ → S¹` against `O₀(2,2) × SO₂ → SO₂`.
    O22,
    /// `Sp(1,1) × Sp₁ → Sp₁` against the conformal action of `O₀(1,4)` on `S³`.
    Sp11,
    /// The projective action of `SL₄(ℝ)` on `S³` against `O₀(3,3) × SO₃ → SO₃`.
    Sl4,
}

impl Diagram {
    pub const ALL: [Diagram; 3] = [Diagram::O22, Diagram::Sp11, Diagram::Sl4];

    pub fn name(self) -> &'static str {
        match self {
            Diagram::O22 => "o22",
            Diagram::Sp11 => "sp11",
            Diagram::Sl4 => "sl4",
        }
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of [`diagram_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramReport {
    pub diagram: Diagram,
    pub samples: usize,
    pub max_residual: f64,
    pub pass: bool,
    /// `max ‖(L_p R_q̄) ∗ u − L_p ∗ u‖` (O22 only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_factor_residual: Option<f64>,
}

fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// `exp` of a Gaussian traceless real 4×4 matrix of Frobenius norm `spread`.
pub fn random_sl4<R: Rng + ?Sized>(spread: f64, rng: &mut R) -> Mat {
    let mut x = Mat::from_fn(Field::Real, 4, 4, |_, _| {
        Quat::real(StandardNormal.sample(rng))
    });
    let t = 0.25 * x.trace().a;
    for i in 0..4 {
        x[(i, i)].a -= t;
    }
    x.scale(spread / x.frob_norm()).mexp(1.0)
}

fn o22_sample<R: Rng + ?Sized>(rng: &mut R) -> Result<(f64, f64)> {
    let g22 = GroupId::split(Field::Real, 2);
    let p = SplitQuaternion::random_unit(1.0, rng);
    let q = SplitQuaternion::random_unit(1.0, rng);
    let u = Quat::cis(rng.random_range(0.0..std::f64::consts::TAU));
    let su = circle_to_so2(u);
    let full = MobiusElement::new(g22, o22_operator(p, q))?;
    let left = MobiusElement::new(g22, o22_operator(p, SplitQuaternion::ONE))?;
    let moved = action::act(&full, &su)?;
    let conformal = circle_to_so2(circle_act(p, u)?);
    let diagram = (&moved - &conformal).norm_max();
    let right = (&moved - &action::act(&left, &su)?).norm_max();
    Ok((diagram, right))
}

fn sp11_sample<R: Rng + ?Sized>(rng: &mut R) -> Result<f64> {
    let id = GroupId::split(Field::Quaternion, 1);
    let g = MobiusElement::new(id, groups::random_split_element(&id, 1.0, rng)?)?;
    let u = vec_quat(&random_unit_vector(4, rng));
    let moved = action::act(&g, &Mat::scalar(Field::Quaternion, 1, u))?;
    let lhs = quat_vec(moved[(0, 0)].conj());
    let rhs = conformal_act(&morphism_sp11(g.matrix())?, &quat_vec(u.conj()))?;
    Ok(lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

fn sl4_sample<R: Rng + ?Sized>(rng: &mut R) -> Result<f64> {
    let id = GroupId::split(Field::Real, 3);
    let a = random_sl4(0.8, rng);
    let u = random_unit_vector(4, rng);
    let g = MobiusElement::new_unchecked(id, morphism_sl4(&a)?);
    let lhs = action::act(&g, &rotation_matrix_iw(vec_quat(&u))?)?;
    let rhs = rotation_matrix_iw(vec_quat(&projective_act(&a, &u)?))?;
    Ok((&lhs - &rhs).norm_max())
}

/// Compares both paths around the square for `samples` random group elements
/// and base points.
pub fn diagram_check(which: Diagram, samples: usize, seed: u64) -> Result<DiagramReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual = 0.0f64;
    let mut right = None;
    for _ in 0..samples {
        match which {
            Diagram::O22 => {
                let (d, r) = o22_sample(&mut rng)?;
                max_residual = max_residual.max(d);
                right = Some(right.unwrap_or(0.0f64).max(r));
            }
            Diagram::Sp11 => max_residual = max_residual.max(sp11_sample(&mut rng)?),
            Diagram::Sl4 => max_residual = max_residual.max(sl4_sample(&mut rng)?),
        }
    }
    let pass = max_residual < DIAGRAM_TOL && right.is_none_or(|r| r < RIGHT_FACTOR_TOL);
    Ok(DiagramReport {
        diagram: which,
        samples,
        max_residual,
        pass,
        right_factor_residual: right,
    })
}

/// Integration settings for [`corollary7_defect`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectSpec {
    /// Haar points on the compact partner.
    pub samples: usize,
    pub seed: u64,
    pub t_total: f64,
    pub dt: f64,
}

impl Default for DefectSpec {
    fn default() -> Self {
        DefectSpec {
            samples: 512,
            seed: 0,
            t_total: 1.0,
            dt: 0.05,
        }
    }
}

/// Geodesic defect of an initial velocity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicDefect {
    pub defect: f64,
    pub points: usize,
    pub stopped: Option<String>,
}

/// Whether a velocity lies in `sp₁ ⊕ sp₁ ⊂ sp(1,1)`: diagonal with imaginary entries.
fn check_sp1_sum(z: &Mat) -> Result<()> {
    let off = z[(0, 1)].norm().max(z[(1, 0)].norm());
    let re = z[(0, 0)].a.abs().max(z[(1, 1)].a.abs());
    if off.max(re) > 1e-12 {
        return Err(Error::InvalidArgument(
            "velocity is not in sp1 ⊕ sp1".into(),
        ));
    }
    Ok(())
}

/// Geodesic defect for the two low-dimensional cases.
///
/// * `z ∈ sp₁ ⊕ sp₁` (a 2×2 quaternion matrix): the geodesic of `Sp(1,1)` with
///   initial velocity `z` is integrated and the defect is its largest distance
///   `max(|g₁₂|, |g₂₁|)` from `Sp₁ × Sp₁`. Haar points are closed under
///   `q ↦ −q`, which makes `g ↦ δgδ` an exact isometry of the discrete metric.
/// * `z ∈ o₄` (a 4×4 real skew matrix): `z` is sent to `o(3,3)` by
///   [`sl4_algebra_map`] and the defect is `max_t ‖g(t) − exp(tẐ)‖_max` along
///   the integrated geodesic of `O₀(3,3)`.
pub fn corollary7_defect(z: &Mat, spec: &DefectSpec) -> Result<GeodesicDefect> {
    match (z.field(), z.shape()) {
        (Field::Quaternion, (2, 2)) => {
            check_sp1_sum(z)?;
            let id = GroupId::split(Field::Quaternion, 1);
            let samples = SampleSet::haar(&id.compact_part(), spec.samples, spec.seed)?;
            let neg = |q: &Mat| q.scale(-1.0);
            let geometry = KineticGeometry::new(samples.symmetrized(&[&neg]));
            let traj = geometry.shoot(MobiusElement::identity(id), z, spec.t_total, spec.dt)?;
            let defect = traj.max_over(|g| g[(0, 1)].norm().max(g[(1, 0)].norm()));
            Ok(GeodesicDefect {
                defect,
                points: traj.points.len(),
                stopped: traj.stopped,
            })
        }
        (Field::Real, (4, 4)) => {
            if (&z.transpose() + z).norm_max() > 1e-12 {
                return Err(Error::InvalidArgument("velocity is not in o4".into()));
            }
            let id = GroupId::split(Field::Real, 3);
            let zh = sl4_algebra_map(z)?;
            let geometry = KineticGeometry::new(SampleSet::haar(
                &id.compact_part(),
                spec.samples,
                spec.seed,
            )?);
            let traj = geometry.shoot(MobiusElement::identity(id), &zh, spec.t_total, spec.dt)?;
            let defect = traj
                .points
                .iter()
                .map(|p| (&p.g - &zh.mexp(p.t)).norm_max())
                .fold(0.0, f64::max);
            Ok(GeodesicDefect {
                defect,
                points: traj.points.len(),
                stopped: traj.stopped,
            })
        }
        _ => Err(Error::InvalidArgument(format!(
            "expected a 2×2 quaternion or 4×4 real velocity, got {:?} over {}",
            z.shape(),
            z.field()
        ))),
    }
}

/// `L_ξ + R_η` for imaginary quaternions given by their `{i, j, k}` coordinates.
pub fn o4_element(xi: [f64; 3], eta: [f64; 3]) -> Mat {
    let x = Quat::new(0.0, xi[0], xi[1], xi[2]);
    let e = Quat::new(0.0, eta[0], eta[1], eta[2]);
    &left_mult(x) + &right_mult(e)
}
