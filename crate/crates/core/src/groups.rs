//! The compact groups `SOₙ, Uₙ, Spₙ` and their split partners
//! `O₀(n,n), SU(n,n), Sp(n,n)`.
//!
//! A split group preserves the Hermitian form `b(x, y) = conj(x)ᵀ δ y` with
//! `δ = diag(Iₙ, −Iₙ)`. Its Lie algebra consists of the block matrices
//! `(a c; conj(c)ᵀ b)` with `a`, `b` skew-Hermitian (and `tr(a + b) = 0` over ℂ).
//!
//! Haar integrals use the unnormalized convention: the total mass of `M` is its
//! Riemannian volume for the metric `Re tr(conj(X)ᵀ Y)`, see [`volume`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrices::Mat;
use crate::scalars::{Field, Quat};

/// Membership threshold on the residual returned by [`membership`].
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Compact,
    Split,
}

/// A compact group `U(n, 𝔽)` (connected) or a split group `U(n, n, 𝔽)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupId {
    pub field: Field,
    pub n: usize,
    pub kind: Kind,
}

impl GroupId {
    pub const fn compact(field: Field, n: usize) -> Self {
        GroupId {
            field,
            n,
            kind: Kind::Compact,
        }
    }

    pub const fn split(field: Field, n: usize) -> Self {
        GroupId {
            field,
            n,
            kind: Kind::Split,
        }
    }

    pub fn is_split(&self) -> bool {
        self.kind == Kind::Split
    }

    /// Side length of the matrices representing the group.
    pub fn matrix_size(&self) -> usize {
        match self.kind {
            Kind::Compact => self.n,
            Kind::Split => 2 * self.n,
        }
    }

    /// The compact group `M` acted on by a split group (identity on compact ids).
    pub fn compact_part(&self) -> GroupId {
        GroupId::compact(self.field, self.n)
    }

    /// The split group acting on a compact one (identity on split ids).
    pub fn split_partner(&self) -> GroupId {
        GroupId::split(self.field, self.n)
    }

    /// Number of angles in a maximal torus of the compact part.
    pub fn rank(&self) -> usize {
        match self.field {
            Field::Real => self.n / 2,
            Field::Complex | Field::Quaternion => self.n,
        }
    }

    pub fn dim(&self) -> usize {
        lie_basis(self).len()
    }

    fn require(&self, kind: Kind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            let expected = match kind {
                Kind::Compact => "compact",
                Kind::Split => "split",
            };
            Err(Error::WrongKind {
                group: *self,
                expected,
            })
        }
    }

    fn check_shape(&self, a: &Mat) -> Result<()> {
        let m = self.matrix_size();
        if a.field() != self.field {
            return Err(Error::FieldMismatch {
                left: self.field,
                right: a.field(),
            });
        }
        if a.shape() != (m, m) {
            return Err(Error::Shape {
                expected: (m, m),
                got: a.shape(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        match (self.kind, self.field) {
            (Kind::Compact, Field::Real) => write!(f, "SO({n})"),
            (Kind::Compact, Field::Complex) => write!(f, "U({n})"),
            (Kind::Compact, Field::Quaternion) => write!(f, "Sp({n})"),
            (Kind::Split, Field::Real) => write!(f, "O0({n},{n})"),
            (Kind::Split, Field::Complex) => write!(f, "SU({n},{n})"),
            (Kind::Split, Field::Quaternion) => write!(f, "Sp({n},{n})"),
        }
    }
}

impl FromStr for GroupId {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form, e.g. `SO(3)`, `U(2)`, `Sp(1)`,
    /// `O0(3,3)`, `SU(1,1)`, `Sp(1,1)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unrecognised group `{s}`"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (name, rest) = t.split_once('(').ok_or_else(bad)?;
        let args = rest.strip_suffix(')').ok_or_else(bad)?;
        let nums: Vec<usize> = args
            .split(',')
            .map(|a| a.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let (kind, n) = match nums.as_slice() {
            [n] => (Kind::Compact, *n),
            [n, m] if n == m => (Kind::Split, *n),
            _ => return Err(bad()),
        };
        let field = match (name, kind) {
            ("SO", Kind::Compact) | ("O0", Kind::Split) | ("O₀", Kind::Split) => Field::Real,
            ("U", Kind::Compact) | ("SU", Kind::Split) => Field::Complex,
            ("Sp", _) => Field::Quaternion,
            _ => return Err(bad()),
        };
        if n == 0 {
            return Err(bad());
        }
        Ok(GroupId { field, n, kind })
    }
}

/// The signature matrix `δ = diag(Iₙ, −Iₙ)`.
pub fn delta(field: Field, n: usize) -> Mat {
    Mat::from_fn(field, 2 * n, 2 * n, |r, c| {
        if r != c {
            Quat::ZERO
        } else if r < n {
            Quat::ONE
        } else {
            -Quat::ONE
        }
    })
}

/// The Hermitian form `b(x, y) = conj(x)ᵀ δ y` on column vectors of length `2n`.
pub fn hermitian_form(x: &Mat, y: &Mat) -> Result<Quat> {
    let n = x.rows() / 2;
    let d = delta(x.field(), n);
    let v = x.conj_transpose().matmul(&d)?.matmul(y)?;
    Ok(v[(0, 0)])
}

/// Outcome of a membership test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    /// `‖conj(A)ᵀ δ A − δ‖` or `‖conj(A)ᵀ A − I‖` in the max-entry norm.
    pub form_residual: f64,
    /// `|det A − 1|` where the group requires unit determinant, else 0.
    pub det_residual: f64,
    /// Identity-component test (block determinant signs for `O₀(n,n)`).
    pub connected: bool,
}

impl Membership {
    /// Combined residual; infinite when the matrix lies in the wrong component.
    pub fn residual(&self) -> f64 {
        if self.connected {
            self.form_residual.max(self.det_residual)
        } else {
            f64::INFINITY
        }
    }

    pub fn is_member(&self) -> bool {
        self.residual() < MEMBERSHIP_TOL
    }
}

pub fn membership(id: &GroupId, a: &Mat) -> Result<Membership> {
    id.check_shape(a)?;
    let n = id.n;
    let ah = a.conj_transpose();
    let form_residual = match id.kind {
        Kind::Compact => (&(&ah * a) - &Mat::identity(id.field, n)).norm_max(),
        Kind::Split => {
            let d = delta(id.field, n);
            (&(&(&ah * &d) * a) - &d).norm_max()
        }
    };
    let mut det_residual = 0.0;
    let mut connected = true;
    match (id.kind, id.field) {
        (Kind::Compact, Field::Real) | (Kind::Split, Field::Complex) => {
            det_residual = (a.det()? - Quat::ONE).norm();
        }
        (Kind::Split, Field::Real) => {
            let (p, _, _, s) = a.quarters();
            connected = p.det()?.a > 0.0 && s.det()?.a > 0.0;
        }
        _ => {}
    }
    Ok(Membership {
        form_residual,
        det_residual,
        connected,
    })
}

/// Membership residual of `a` in `id`; membership means residual below [`MEMBERSHIP_TOL`].
pub fn is_member(id: &GroupId, a: &Mat) -> Result<f64> {
    Ok(membership(id, a)?.residual())
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R, field: Field) -> Quat {
    let mut v = [0.0; 4];
    for x in v.iter_mut().take(field.real_dim()) {
        *x = StandardNormal.sample(rng);
    }
    Quat::from_array(v)
}

/// Haar-distributed element of a compact group.
///
/// A Gaussian matrix is orthonormalized column by column (Gram–Schmidt with
/// right division by the column norms), which is the QR factorization with a
/// positive real diagonal in `R`. For `SOₙ` the first column is negated when
/// the determinant comes out negative.
pub fn haar_sample<R: Rng + ?Sized>(id: &GroupId, rng: &mut R) -> Result<Mat> {
    id.require(Kind::Compact)?;
    let (field, n) = (id.field, id.n);
    loop {
        let g = Mat::from_fn(field, n, n, |_, _| gaussian(rng, field));
        let Some(mut q) = gram_schmidt(&g) else {
            continue;
        };
        if field == Field::Real && n > 0 && q.det()?.a < 0.0 {
            for r in 0..n {
                q[(r, 0)] = -q[(r, 0)];
            }
        }
        return Ok(q);
    }
}

fn gram_schmidt(g: &Mat) -> Option<Mat> {
    let n = g.rows();
    let mut q = g.clone();
    for c in 0..n {
        // Two passes of modified Gram–Schmidt for numerical orthogonality.
        for _ in 0..2 {
            for p in 0..c {
                // coefficient ⟨u_p, v⟩ = Σ conj(u_rp) v_rc, applied on the right
                let mut coef = Quat::ZERO;
                for r in 0..n {
                    coef += q[(r, p)].conj() * q[(r, c)];
                }
                for r in 0..n {
                    let u = q[(r, p)];
                    q[(r, c)] -= u * coef;
                }
            }
        }
        let norm: f64 = (0..n).map(|r| q[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        for r in 0..n {
            q[(r, c)] = q[(r, c)] * (1.0 / norm);
        }
    }
    Some(q)
}

/// Haar-distributed element of the maximal compact subgroup `K` of a split group,
/// returned as the pair of diagonal blocks `(A, D)`.
pub fn haar_sample_k<R: Rng + ?Sized>(id: &GroupId, rng: &mut R) -> Result<(Mat, Mat)> {
    id.require(Kind::Split)?;
    let m = id.compact_part();
    let a = haar_sample(&m, rng)?;
    let mut d = haar_sample(&m, rng)?;
    if id.field == Field::Complex {
        // S(Uₙ × Uₙ): rotate D by a phase so that det A · det D = 1.
        let u = a.det()? * d.det()?;
        let phase = u.b.atan2(u.a);
        d = d.right_scale(Quat::cis(-phase / id.n as f64));
    }
    Ok((a, d))
}

/// Rotation matrix `R_θ = (cos θ, −sin θ; sin θ, cos θ)`.
pub fn rotation2(theta: f64) -> Mat {
    let (s, c) = theta.sin_cos();
    Mat::from_real(2, 2, &[c, -s, s, c])
}

/// Point `D(θ₁, …, θ_m)` of the standard maximal torus of a compact group.
pub fn torus_point(id: &GroupId, theta: &[f64]) -> Result<Mat> {
    id.require(Kind::Compact)?;
    let m = id.rank();
    if theta.len() != m {
        return Err(Error::Rank {
            group: *id,
            expected: m,
            got: theta.len(),
        });
    }
    Ok(match id.field {
        Field::Real => {
            let mut d = Mat::identity(Field::Real, id.n);
            for (j, &t) in theta.iter().enumerate() {
                d.set_block(2 * j, 2 * j, &rotation2(t));
            }
            d
        }
        Field::Complex | Field::Quaternion => {
            let entries: Vec<Quat> = theta.iter().map(|&t| Quat::cis(t)).collect();
            Mat::diag(id.field, &entries)
        }
    })
}

fn vandermonde_cos(theta: &[f64]) -> f64 {
    let mut p = 1.0;
    for j in 0..theta.len() {
        for k in j + 1..theta.len() {
            let d = theta[j].cos() - theta[k].cos();
            p *= d * d;
        }
    }
    p
}

/// Unnormalized Weyl density on `[0, 2π)^rank` (a trigonometric polynomial).
fn weyl_density_raw(id: &GroupId, theta: &[f64]) -> f64 {
    match id.field {
        Field::Complex => {
            let mut p = 1.0;
            for j in 0..theta.len() {
                for k in j + 1..theta.len() {
                    p *= (Quat::cis(theta[j]) - Quat::cis(theta[k])).norm_sqr();
                }
            }
            p
        }
        Field::Real if id.n.is_multiple_of(2) => vandermonde_cos(theta),
        Field::Real => {
            vandermonde_cos(theta)
                * theta
                    .iter()
                    .map(|t| (t / 2.0).sin().powi(2))
                    .product::<f64>()
        }
        Field::Quaternion => {
            vandermonde_cos(theta) * theta.iter().map(|t| t.sin().powi(2)).product::<f64>()
        }
    }
}

/// Highest frequency of the raw density in any single angle.
fn weyl_degree(id: &GroupId) -> usize {
    let m = id.rank();
    let pair = 2 * m.saturating_sub(1);
    match id.field {
        Field::Complex => m.saturating_sub(1),
        Field::Real if id.n.is_multiple_of(2) => pair,
        Field::Real => pair + 1,
        Field::Quaternion => pair + 2,
    }
}

/// Visit every node of the uniform `nodes^dim` grid on `[0, 2π)^dim`.
pub(crate) fn for_each_torus_node(dim: usize, nodes: usize, mut f: impl FnMut(&[f64])) {
    let h = 2.0 * PI / nodes as f64;
    let mut idx = vec![0usize; dim];
    let mut theta = vec![0.0; dim];
    loop {
        for (t, &i) in theta.iter_mut().zip(&idx) {
            *t = i as f64 * h;
        }
        f(&theta);
        let mut axis = 0;
        loop {
            if axis == dim {
                return;
            }
            idx[axis] += 1;
            if idx[axis] < nodes {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// Weyl density of a compact group, scaled so that its integral over the torus
/// cube `[0, 2π)^rank` equals the Haar mass `vol(M)`.
///
/// For a class function `f`, `∫_M f dμ = ∫ f(D(θ)) w(θ) dθ`.
#[derive(Clone, Debug)]
pub struct WeylDensity {
    id: GroupId,
    scale: f64,
}

impl WeylDensity {
    pub fn new(id: &GroupId) -> Result<Self> {
        id.require(Kind::Compact)?;
        let m = id.rank();
        // The raw density is a trigonometric polynomial, so a uniform grid with more
        // nodes than its degree integrates it exactly.
        let nodes = 2 * weyl_degree(id) + 2;
        let h = 2.0 * PI / nodes as f64;
        let mut total = 0.0;
        for_each_torus_node(m, nodes, |t| total += weyl_density_raw(id, t));
        total *= h.powi(m as i32);
        Ok(WeylDensity {
            id: *id,
            scale: volume(id)? / total,
        })
    }

    pub fn group(&self) -> &GroupId {
        &self.id
    }

    pub fn eval(&self, theta: &[f64]) -> Result<f64> {
        let m = self.id.rank();
        if theta.len() != m {
            return Err(Error::Rank {
                group: self.id,
                expected: m,
                got: theta.len(),
            });
        }
        Ok(self.scale * weyl_density_raw(&self.id, theta))
    }

    /// The density normalized to total mass 1.
    pub fn eval_probability(&self, theta: &[f64]) -> Result<f64> {
        Ok(self.eval(theta)? / volume(&self.id)?)
    }

    /// Marginal density of a single angle, with total mass `vol(M)`.
    pub fn marginal(&self, theta: f64) -> f64 {
        let m = self.id.rank();
        if m == 1 {
            return self.scale * weyl_density_raw(&self.id, &[theta]);
        }
        let nodes = 2 * weyl_degree(&self.id) + 2;
        let h = 2.0 * PI / nodes as f64;
        let mut total = 0.0;
        let mut full = vec![0.0; m];
        for_each_torus_node(m - 1, nodes, |rest| {
            full[0] = theta;
            full[1..].copy_from_slice(rest);
            total += weyl_density_raw(&self.id, &full);
        });
        self.scale * total * h.powi(m as i32 - 1)
    }
}

/// Weyl density at `θ` with total mass `vol(M)`.
pub fn weyl_density(id: &GroupId, theta: &[f64]) -> Result<f64> {
    WeylDensity::new(id)?.eval(theta)
}

fn half_gamma(twice: usize) -> f64 {
    // Γ(twice / 2) for positive integers `twice`.
    let mut x = if twice.is_multiple_of(2) {
        1.0
    } else {
        PI.sqrt()
    };
    let mut k = if twice.is_multiple_of(2) { 2 } else { 1 };
    while k < twice {
        x *= k as f64 / 2.0;
        k += 2;
    }
    x
}

/// Volume of the unit sphere `S^k ⊂ ℝ^{k+1}`.
pub fn sphere_volume(k: usize) -> f64 {
    2.0 * PI.powf((k + 1) as f64 / 2.0) / half_gamma(k + 1)
}

/// Riemannian volume of a compact group for the metric `Re tr(conj(X)ᵀ Y)`.
///
/// Computed from the fibration `M(n−1) → M(n) → S^{dn−1}` (`d = dim_ℝ 𝔽`).
/// The horizontal directions off the first diagonal entry have Frobenius norm
/// `√2` times their image on the sphere, which contributes `2^{d(n−1)/2}`.
pub fn volume(id: &GroupId) -> Result<f64> {
    id.require(Kind::Compact)?;
    let d = id.field.real_dim();
    let mut v = match id.field {
        Field::Real => 1.0,
        Field::Complex | Field::Quaternion => 1.0,
    };
    for k in 1..=id.n {
        if id.field == Field::Real && k == 1 {
            continue;
        }
        v *= sphere_volume(d * k - 1) * 2f64.powf((d * (k - 1)) as f64 / 2.0);
    }
    Ok(v)
}

fn push_compact_basis(
    field: Field,
    n: usize,
    place: impl Fn(&Mat) -> Mat,
    out: &mut Vec<Mat>,
    diag_imag: bool,
) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    if diag_imag {
        for j in 0..n {
            for &u in field.imaginary_basis() {
                let mut x = Mat::zeros(field, n, n);
                x[(j, j)] = u;
                out.push(place(&x));
            }
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            let mut x = Mat::zeros(field, n, n);
            x[(j, k)] = Quat::real(s);
            x[(k, j)] = Quat::real(-s);
            out.push(place(&x));
            for &u in field.imaginary_basis() {
                let mut x = Mat::zeros(field, n, n);
                x[(j, k)] = u * s;
                x[(k, j)] = u * s;
                out.push(place(&x));
            }
        }
    }
}

/// Orthonormal basis (for `Re tr(conj(X)ᵀ Y)`) of the Lie algebra of `id`.
///
/// Compact ids give `so(n)`, `u(n)` or `sp(n)`. Split ids give the block algebra
/// `(a c; conj(c)ᵀ b)`, ordered as the `a` block, the `b` block, then `c`. For
/// `SU(n,n)` the `2n` diagonal imaginary directions are replaced by an orthonormal
/// basis of the trace-zero combinations, placed last.
pub fn lie_basis(id: &GroupId) -> Vec<Mat> {
    let (field, n) = (id.field, id.n);
    let mut out = Vec::new();
    match id.kind {
        Kind::Compact => push_compact_basis(field, n, |x| x.clone(), &mut out, true),
        Kind::Split => {
            let su = field == Field::Complex;
            let m = 2 * n;
            let place = |r0: usize| {
                move |x: &Mat| {
                    let mut z = Mat::zeros(field, m, m);
                    z.set_block(r0, r0, x);
                    z
                }
            };
            push_compact_basis(field, n, place(0), &mut out, !su);
            push_compact_basis(field, n, place(n), &mut out, !su);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for r in 0..n {
                for c in 0..n {
                    for &u in field.real_basis() {
                        let mut z = Mat::zeros(field, m, m);
                        z[(r, n + c)] = u * s;
                        z[(n + c, r)] = u.conj() * s;
                        out.push(z);
                    }
                }
            }
            if su {
                // Orthonormal basis of {x ∈ ℝ^{2n} : Σ x = 0} (Helmert vectors), times i.
                for k in 1..m {
                    let norm = ((k * (k + 1)) as f64).sqrt();
                    let mut z = Mat::zeros(field, m, m);
                    for j in 0..k {
                        z[(j, j)] = Quat::complex(0.0, 1.0 / norm);
                    }
                    z[(k, k)] = Quat::complex(0.0, -(k as f64) / norm);
                    out.push(z);
                }
            }
        }
    }
    out
}

/// Residual of the Lie algebra conditions for `x`.
pub fn lie_residual(id: &GroupId, x: &Mat) -> Result<f64> {
    id.check_shape(x)?;
    let xh = x.conj_transpose();
    let mut res = match id.kind {
        Kind::Compact => (&xh + x).norm_max(),
        Kind::Split => {
            let d = delta(id.field, id.n);
            (&(&xh * &d) + &(&d * x)).norm_max()
        }
    };
    if id.field == Field::Complex && id.kind == Kind::Split {
        res = res.max(x.trace().norm());
    }
    Ok(res)
}

/// Coordinates of `x` in the orthonormal basis `basis`.
pub fn coordinates(basis: &[Mat], x: &Mat) -> Vec<f64> {
    basis.iter().map(|e| e.dot(x)).collect()
}

/// `Σ cᵢ Eᵢ`.
pub fn combine(basis: &[Mat], coeffs: &[f64]) -> Mat {
    let mut z = Mat::zeros(basis[0].field(), basis[0].rows(), basis[0].cols());
    for (e, &c) in basis.iter().zip(coeffs) {
        if c != 0.0 {
            z.axpy(c, e);
        }
    }
    z
}

/// Gaussian random element of the Lie algebra of `id`, scaled to Frobenius norm `norm`.
pub fn random_lie_element<R: Rng + ?Sized>(id: &GroupId, norm: f64, rng: &mut R) -> Mat {
    let basis = lie_basis(id);
    let coeffs: Vec<f64> = (0..basis.len())
        .map(|_| StandardNormal.sample(rng))
        .collect();
    let z = combine(&basis, &coeffs);
    let f = z.frob_norm();
    z.scale(norm / f)
}

/// Random element of a split group: a product of exponentials of random algebra elements.
pub fn random_split_element<R: Rng + ?Sized>(
    id: &GroupId,
    spread: f64,
    rng: &mut R,
) -> Result<Mat> {
    id.require(Kind::Split)?;
    let (a, d) = haar_sample_k(id, rng)?;
    let k1 = Mat::block_diag(&[&a, &d]);
    let p = random_lie_element(id, spread, rng).mexp(1.0);
    let (a, d) = haar_sample_k(id, rng)?;
    let k2 = Mat::block_diag(&[&a, &d]);
    Ok(&(&k1 * &p) * &k2)
}

/// The five canonical inclusions between split groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Embedding {
    /// `O₀(n,n) ⊂ SU(n,n)`: real matrices viewed as complex ones.
    RealInComplex,
    /// `U(n,n) ⊂ Sp(n,n)`: complex matrices viewed as quaternionic ones.
    ComplexInQuaternion,
    /// `O₀(n,n) ⊂ Sp(n,n)`.
    RealInQuaternion,
    /// `U(n,n) ⊂ O₀(2n,2n)` through `ℂ ≅ ℝ²`.
    ComplexInReal,
    /// `Sp(n,n) ⊂ O₀(4n,4n)` through `ℍ ≅ ℝ⁴`.
    QuaternionInReal,
}

impl Embedding {
    pub const ALL: [Embedding; 5] = [
        Embedding::RealInComplex,
        Embedding::ComplexInQuaternion,
        Embedding::RealInQuaternion,
        Embedding::ComplexInReal,
        Embedding::QuaternionInReal,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Embedding::RealInComplex => "a",
            Embedding::ComplexInQuaternion => "b",
            Embedding::RealInQuaternion => "c",
            Embedding::ComplexInReal => "d",
            Embedding::QuaternionInReal => "e",
        }
    }

    pub fn src(&self, n: usize) -> GroupId {
        match self {
            Embedding::RealInComplex | Embedding::RealInQuaternion => {
                GroupId::split(Field::Real, n)
            }
            Embedding::ComplexInQuaternion | Embedding::ComplexInReal => {
                GroupId::split(Field::Complex, n)
            }
            Embedding::QuaternionInReal => GroupId::split(Field::Quaternion, n),
        }
    }

    pub fn dst(&self, n: usize) -> GroupId {
        match self {
            Embedding::RealInComplex => GroupId::split(Field::Complex, n),
            Embedding::ComplexInQuaternion | Embedding::RealInQuaternion => {
                GroupId::split(Field::Quaternion, n)
            }
            Embedding::ComplexInReal => GroupId::split(Field::Real, 2 * n),
            Embedding::QuaternionInReal => GroupId::split(Field::Real, 4 * n),
        }
    }

    pub fn from_pair(src: &GroupId, dst: &GroupId) -> Result<Self> {
        Embedding::ALL
            .into_iter()
            .find(|e| src.is_split() && e.src(src.n) == *src && e.dst(src.n) == *dst)
            .ok_or(Error::UnsupportedEmbedding {
                src: *src,
                dst: *dst,
            })
    }

    /// Image of a matrix (group or algebra element); linear in its argument.
    pub fn map(&self, a: &Mat) -> Mat {
        match self {
            Embedding::RealInComplex => a.with_field(Field::Complex),
            Embedding::ComplexInQuaternion | Embedding::RealInQuaternion => {
                a.with_field(Field::Quaternion)
            }
            Embedding::ComplexInReal | Embedding::QuaternionInReal => a.real_repr(),
        }
    }

    /// Elements of the maximal compact subgroup of the target whose conjugation
    /// fixes the image, given as the compact block `k₀` with `k = diag(k₀, k₀)`.
    /// The first inclusion is cut out by entrywise conjugation instead, so it has none.
    pub fn commutant_generators(&self, n: usize) -> Vec<Mat> {
        match self {
            Embedding::RealInComplex => vec![],
            Embedding::ComplexInQuaternion => vec![Mat::scalar(Field::Quaternion, n, Quat::I)],
            Embedding::RealInQuaternion => {
                vec![
                    Mat::scalar(Field::Quaternion, n, Quat::I),
                    Mat::scalar(Field::Quaternion, n, Quat::J),
                ]
            }
            Embedding::ComplexInReal => vec![Mat::scalar(Field::Complex, n, Quat::I).real_repr()],
            Embedding::QuaternionInReal => {
                vec![right_mult_block(n, Quat::I), right_mult_block(n, Quat::J)]
            }
        }
    }

    /// Defining-relation residual of `a` (a matrix of the target group): zero
    /// exactly on the image of the embedding.
    pub fn relation_residual(&self, a: &Mat) -> f64 {
        match self {
            Embedding::RealInComplex => a.entries().iter().map(|q| q.b.abs()).fold(0.0, f64::max),
            _ => {
                let n = a.rows() / 2;
                let gens = self.commutant_generators(self.src_n(n));
                gens.iter()
                    .map(|k0| {
                        let k = Mat::block_diag(&[k0, k0]);
                        (&(&k * a) - &(a * &k)).norm_max()
                    })
                    .fold(0.0, f64::max)
            }
        }
    }

    fn src_n(&self, dst_n: usize) -> usize {
        match self {
            Embedding::ComplexInReal => dst_n / 2,
            Embedding::QuaternionInReal => dst_n / 4,
            _ => dst_n,
        }
    }
}

/// Real `4n×4n` matrix of right multiplication by `p` on `ℍⁿ ≅ ℝ^{4n}`.
pub fn right_mult_block(n: usize, p: Quat) -> Mat {
    let rm = p.right_matrix();
    let block = Mat::from_fn(Field::Real, 4, 4, |r, c| Quat::real(rm[r][c]));
    let blocks: Vec<&Mat> = std::iter::repeat_n(&block, n).collect();
    Mat::block_diag(&blocks)
}

/// Image of `a` under one of the five inclusions, after checking that `a` lies
/// in the source group.
pub fn embed(src: &GroupId, dst: &GroupId, a: &Mat) -> Result<Mat> {
    let e = Embedding::from_pair(src, dst)?;
    let residual = is_member(src, a)?;
    if residual >= MEMBERSHIP_TOL {
        return Err(Error::NotMember {
            group: *src,
            residual,
        });
    }
    Ok(e.map(a))
}
