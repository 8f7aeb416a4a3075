//! The Möbius action `(A B; C D) ∗ U = (AU + B)(CU + D)⁻¹` of a split group on
//! its compact partner, its infinitesimal generators, and the graph-chart
//! computation it comes from.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::groups::{self, GroupId, MEMBERSHIP_TOL};
use crate::matrices::Mat;
use crate::scalars::{Field, Quat};

/// Tangency threshold for `X g⁻¹ ∈ Lie(G)`.
pub const TANGENT_TOL: f64 = 1e-8;

/// A validated element of a split group with its four `n×n` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusElement {
    group: GroupId,
    mat: Mat,
    blocks: [Mat; 4],
}

impl MobiusElement {
    pub fn new(group: GroupId, mat: Mat) -> Result<Self> {
        if !group.is_split() {
            return Err(Error::WrongKind {
                group,
                expected: "split",
            });
        }
        let residual = groups::is_member(&group, &mat)?;
        if residual >= MEMBERSHIP_TOL {
            return Err(Error::NotMember { group, residual });
        }
        Ok(Self::new_unchecked(group, mat))
    }

    /// Wraps `mat` without the membership test (for points produced by integrators).
    pub fn new_unchecked(group: GroupId, mat: Mat) -> Self {
        let (a, b, c, d) = mat.quarters();
        MobiusElement {
            group,
            mat,
            blocks: [a, b, c, d],
        }
    }

    pub fn identity(group: GroupId) -> Self {
        Self::new_unchecked(group, Mat::identity(group.field, group.matrix_size()))
    }

    /// `diag(A, D)` for `A, D` in the compact group.
    pub fn from_k(group: GroupId, a: &Mat, d: &Mat) -> Result<Self> {
        Self::new(group, Mat::block_diag(&[a, d]))
    }

    pub fn group(&self) -> &GroupId {
        &self.group
    }

    pub fn matrix(&self) -> &Mat {
        &self.mat
    }

    pub fn into_matrix(self) -> Mat {
        self.mat
    }

    /// The blocks `(A, B, C, D)`.
    pub fn blocks(&self) -> (&Mat, &Mat, &Mat, &Mat) {
        let [a, b, c, d] = &self.blocks;
        (a, b, c, d)
    }

    pub fn compose(&self, other: &MobiusElement) -> MobiusElement {
        Self::new_unchecked(self.group, &self.mat * &other.mat)
    }

    pub fn inverse(&self) -> MobiusElement {
        // g⁻¹ = δ conj(g)ᵀ δ for g preserving the form.
        let d = groups::delta(self.group.field, self.group.n);
        Self::new_unchecked(self.group, &(&d * &self.mat.conj_transpose()) * &d)
    }
}

fn denominator_inverse(c: &Mat, u: &Mat, d: &Mat) -> Result<Mat> {
    (&(c * u) + d).inverse().map_err(|e| {
        Error::Invariant(format!(
            "CU + D is singular for a group element acting on M: {e}"
        ))
    })
}

fn check_compact(g: &MobiusElement, u: &Mat) -> Result<()> {
    let m = g.group.compact_part();
    let residual = groups::is_member(&m, u)?;
    if residual >= MEMBERSHIP_TOL {
        return Err(Error::NotMember { group: m, residual });
    }
    Ok(())
}

/// `g ∗ U = (AU + B)(CU + D)⁻¹`.
pub fn act(g: &MobiusElement, u: &Mat) -> Result<Mat> {
    check_compact(g, u)?;
    act_unchecked(g, u)
}

/// [`act`] without the membership test on `u`.
pub fn act_unchecked(g: &MobiusElement, u: &Mat) -> Result<Mat> {
    let (a, b, c, d) = g.blocks();
    let inv = denominator_inverse(c, u, d)?;
    Ok(&(&(a * u) + b) * &inv)
}

/// The action computed through the graph chart: `U` is the maximal isotropic
/// subspace spanned by the columns of `(U; I)`. Its image `g·(U; I)` is
/// re-expressed in an orthonormal column basis, and `U′` is recovered from
/// `U′·W_bot = W_top` with a real LU solve. Shares no code path with [`act`].
pub fn act_on_graph(g: &MobiusElement, u: &Mat) -> Result<Mat> {
    check_compact(g, u)?;
    let n = g.group.n;
    let field = g.group.field;
    let frame = Mat::from_blocks(
        u,
        &Mat::zeros(field, n, 0),
        &Mat::identity(field, n),
        &Mat::zeros(field, n, 0),
    );
    let w = orthonormal_columns(&(g.matrix() * &frame));
    let top = w.block(0, 0, n, n).real_repr();
    let bot = w.block(n, 0, n, n).real_repr();
    let k = field.real_dim();
    let size = k * n;
    let to_na = |m: &Mat| DMatrix::from_fn(size, size, |r, c| m[(r, c)].a);
    // U′ B = T  ⇔  Bᵀ U′ᵀ = Tᵀ
    let lu = to_na(&bot).transpose().lu();
    let sol = lu
        .solve(&to_na(&top).transpose())
        .ok_or_else(|| Error::Invariant("graph chart: bottom block is singular".into()))?
        .transpose();
    // The first column of each k×k left-multiplication block holds the entry.
    Ok(Mat::from_fn(field, n, n, |r, c| {
        let mut v = [0.0; 4];
        for (i, x) in v.iter_mut().enumerate().take(k) {
            *x = sol[(k * r + i, k * c)];
        }
        Quat::from_array(v)
    }))
}

/// Column basis change `W ↦ W R` making the columns orthonormal for the
/// positive-definite Hermitian product.
fn orthonormal_columns(w: &Mat) -> Mat {
    let (rows, cols) = w.shape();
    let mut q = w.clone();
    for c in 0..cols {
        for p in 0..c {
            let mut coef = Quat::ZERO;
            for r in 0..rows {
                coef += q[(r, p)].conj() * q[(r, c)];
            }
            for r in 0..rows {
                let u = q[(r, p)];
                q[(r, c)] -= u * coef;
            }
        }
        let norm: f64 = (0..rows).map(|r| q[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..rows {
            q[(r, c)] = q[(r, c)] * (1.0 / norm);
        }
    }
    q
}

/// `conj(W)ᵀ δ W` for a `2n×k` frame; vanishes exactly when its span is isotropic.
pub fn isotropy_residual(w: &Mat) -> f64 {
    let n = w.rows() / 2;
    let d = groups::delta(w.field(), n);
    (&(&w.conj_transpose() * &d) * w).norm_max()
}

/// Fundamental vector field of `ξ ∈ Lie(G)` at `p ∈ M`:
/// `d/dt|₀ exp(tξ) ∗ p = (ξ_A p + ξ_B) − p(ξ_C p + ξ_D)`.
pub fn fundamental_field(xi: &Mat, p: &Mat) -> Mat {
    let (xa, xb, xc, xd) = xi.quarters();
    let left = &(&xa * p) + &xb;
    let right = &(&xc * p) + &xd;
    &left - &(p * &right)
}

/// Right translate `X g⁻¹`, checked to lie in `Lie(G)`.
pub fn right_translate(g: &MobiusElement, x: &Mat) -> Result<Mat> {
    let xi = x.matmul(g.inverse().matrix())?;
    let residual = groups::lie_residual(&g.group, &xi)?;
    if residual >= TANGENT_TOL * (1.0 + xi.norm_max()) {
        return Err(Error::NotTangent {
            group: g.group,
            residual,
        });
    }
    Ok(xi)
}

/// The induced field `X̃(q) = d/dt|₀ (exp(t X g⁻¹) g) ∗ q`, a tangent vector at `g ∗ q`.
pub fn induced_field(g: &MobiusElement, x: &Mat, q: &Mat) -> Result<Mat> {
    let xi = right_translate(g, x)?;
    let p = act(g, q)?;
    Ok(fundamental_field(&xi, &p))
}

/// Residual of tangency of `v` at `p ∈ M`: `conj(p)ᵀ v` must be skew-Hermitian.
pub fn tangency_residual(p: &Mat, v: &Mat) -> f64 {
    let w = &p.conj_transpose() * v;
    (&w + &w.conj_transpose()).norm_max()
}

/// `γ(t) = exp(t (0 I; I 0)) = (cosh t·I, sinh t·I; sinh t·I, cosh t·I)`.
pub fn hyperbolic_element(group: GroupId, t: f64) -> MobiusElement {
    let n = group.n;
    let f = group.field;
    let c = Mat::scalar(f, n, Quat::real(t.cosh()));
    let s = Mat::scalar(f, n, Quat::real(t.sinh()));
    MobiusElement::new_unchecked(group, Mat::from_blocks(&c, &s, &s, &c))
}

/// `σ(s) = (1 − s²)^{−1/2} (I, sI; sI, I)` for `|s| < 1`, a reparametrization of `γ`
/// with `σ(s) ∗ q = (q + sI)(sq + I)⁻¹`.
pub fn sigma_element(group: GroupId, s: f64) -> Result<MobiusElement> {
    if s.abs() >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "sigma parameter must satisfy |s| < 1, got {s}"
        )));
    }
    Ok(hyperbolic_element(group, s.atanh()))
}

/// Tangent `σ′(s) = (1 − s²)^{−3/2} (sI, I; I, sI)` at `σ(s)`.
pub fn sigma_velocity(group: GroupId, s: f64) -> Mat {
    let n = group.n;
    let f = group.field;
    let scale = (1.0 - s * s).powf(-1.5);
    let a = Mat::scalar(f, n, Quat::real(s * scale));
    let b = Mat::scalar(f, n, Quat::real(scale));
    Mat::from_blocks(&a, &b, &b, &a)
}

/// `|det(q + εI)|`, through the complex representation over ℍ.
pub fn det_shift(q: &Mat, eps: f64) -> Result<f64> {
    let shifted =
        &q.complex_repr() + &Mat::scalar(Field::Complex, q.complex_repr().rows(), Quat::real(eps));
    let det = shifted.det()?.norm();
    Ok(match q.field() {
        // det of the 2n×2n complex form is |det|² of the quaternionic one
        Field::Quaternion => det.sqrt(),
        _ => det,
    })
}

/// Whether `q` has no eigenvalue `−ε`, decided by `|det(q + εI)| > threshold`.
pub fn avoids_eigenvalue(q: &Mat, eps: f64, threshold: f64) -> Result<bool> {
    Ok(det_shift(q, eps)? > threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{haar_sample, haar_sample_k, random_lie_element, random_split_element};
    use crate::testing::rng;
    use proptest::prelude::*;

    fn desk_groups() -> Vec<GroupId> {
        vec![
            GroupId::split(Field::Real, 3),
            GroupId::split(Field::Complex, 1),
            GroupId::split(Field::Complex, 2),
            GroupId::split(Field::Quaternion, 1),
            GroupId::split(Field::Quaternion, 2),
        ]
    }

    #[test]
    fn identity_and_block_diagonal_elements() {
        let mut r = rng(1);
        for id in desk_groups() {
            let m = id.compact_part();
            let u = haar_sample(&m, &mut r).unwrap();
            let e = MobiusElement::identity(id);
            assert!((&act(&e, &u).unwrap() - &u).norm_max() < 1e-14);
            assert!((&act_on_graph(&e, &u).unwrap() - &u).norm_max() < 1e-12);
            let (a, d) = haar_sample_k(&id, &mut r).unwrap();
            let k = MobiusElement::from_k(id, &a, &d).unwrap();
            let expected = &(&a * &u) * &d.inverse().unwrap();
            assert!((&act(&k, &u).unwrap() - &expected).norm_max() < 1e-12);
            assert!((&act_on_graph(&k, &u).unwrap() - &expected).norm_max() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_element_matches_tanh_formula() {
        let mut r = rng(2);
        for id in desk_groups() {
            let q = haar_sample(&id.compact_part(), &mut r).unwrap();
            let t = 0.7;
            let g = hyperbolic_element(id, t);
            assert!(groups::is_member(&id, g.matrix()).unwrap() < 1e-12);
            let th = Mat::scalar(id.field, id.n, Quat::real(t.tanh()));
            let i = Mat::identity(id.field, id.n);
            let expected = &(&q + &th) * &(&(&th * &q) + &i).inverse().unwrap();
            assert!((&act(&g, &q).unwrap() - &expected).norm_max() < 1e-12);
        }
    }

    #[test]
    fn graph_picture_agrees_and_stays_isotropic() {
        let mut r = rng(3);
        for id in desk_groups() {
            let m = id.compact_part();
            for _ in 0..100 {
                let g = MobiusElement::new(id, random_split_element(&id, 1.5, &mut r).unwrap())
                    .unwrap();
                let u = haar_sample(&m, &mut r).unwrap();
                let a = act(&g, &u).unwrap();
                let b = act_on_graph(&g, &u).unwrap();
                assert!((&a - &b).norm_max() < 1e-9, "{id}");
                assert!(groups::is_member(&m, &a).unwrap() < 1e-8);
                let frame = Mat::from_blocks(
                    &u,
                    &Mat::zeros(id.field, id.n, 0),
                    &Mat::identity(id.field, id.n),
                    &Mat::zeros(id.field, id.n, 0),
                );
                assert!(isotropy_residual(&frame) < 1e-12);
                assert!(isotropy_residual(&(g.matrix() * &frame)) < 1e-9);
            }
        }
    }

    #[test]
    fn action_law() {
        let mut r = rng(4);
        for id in desk_groups() {
            let m = id.compact_part();
            for _ in 0..50 {
                let g = MobiusElement::new(id, random_split_element(&id, 1.0, &mut r).unwrap())
                    .unwrap();
                let h = MobiusElement::new(id, random_split_element(&id, 1.0, &mut r).unwrap())
                    .unwrap();
                let u = haar_sample(&m, &mut r).unwrap();
                let lhs = act(&g.compose(&h), &u).unwrap();
                let rhs = act(&g, &act(&h, &u).unwrap()).unwrap();
                assert!((&lhs - &rhs).norm_max() < 1e-8);
                let back = act(&g.inverse(), &act(&g, &u).unwrap()).unwrap();
                assert!((&back - &u).norm_max() < 1e-8);
            }
        }
    }

    #[test]
    fn sigma_commutes_with_conjugation() {
        let mut r = rng(5);
        for id in desk_groups() {
            let m = id.compact_part();
            let s = sigma_element(id, 0.45).unwrap();
            for _ in 0..20 {
                let q = haar_sample(&m, &mut r).unwrap();
                let b = haar_sample(&m, &mut r).unwrap();
                let bi = b.conj_transpose();
                let lhs = act(&s, &(&(&b * &q) * &bi)).unwrap();
                let rhs = &(&b * &act(&s, &q).unwrap()) * &bi;
                assert!((&lhs - &rhs).norm_max() < 1e-9);
            }
        }
        assert!(sigma_element(GroupId::split(Field::Complex, 1), 1.0).is_err());
    }

    #[test]
    fn induced_field_special_cases() {
        let id = GroupId::split(Field::Complex, 1);
        let e = MobiusElement::identity(id);
        let x = Mat::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).with_field(Field::Complex);
        for theta in [0.0, 0.4, 2.0, -1.3] {
            let q = Mat::diag(Field::Complex, &[Quat::cis(theta)]);
            let v = induced_field(&e, &x, &q).unwrap();
            let expected = Quat::ONE - Quat::cis(2.0 * theta);
            assert!((v[(0, 0)] - expected).norm() < 1e-14);
        }
        let zero = Mat::zeros(Field::Complex, 2, 2);
        let q = Mat::diag(Field::Complex, &[Quat::cis(0.3)]);
        assert_eq!(induced_field(&e, &zero, &q).unwrap().norm_max(), 0.0);

        let mut r = rng(6);
        let id = GroupId::split(Field::Quaternion, 2);
        let x0 = random_lie_element(&id.compact_part(), 1.0, &mut r);
        let z = Mat::block_diag(&[&x0, &Mat::zeros(id.field, 2, 2)]);
        let q = haar_sample(&id.compact_part(), &mut r).unwrap();
        let v = induced_field(&MobiusElement::identity(id), &z, &q).unwrap();
        assert!((&v - &(&x0 * &q)).norm_max() < 1e-14);
    }

    #[test]
    fn induced_field_matches_finite_differences_and_is_tangent() {
        let mut r = rng(7);
        for id in desk_groups() {
            let m = id.compact_part();
            for _ in 0..10 {
                let g = MobiusElement::new(id, random_split_element(&id, 1.0, &mut r).unwrap())
                    .unwrap();
                let xi = random_lie_element(&id, 1.0, &mut r);
                let x = &xi * g.matrix();
                let q = haar_sample(&m, &mut r).unwrap();
                let v = induced_field(&g, &x, &q).unwrap();
                let h = 1e-5;
                let plus = MobiusElement::new_unchecked(id, &xi.mexp(h) * g.matrix());
                let minus = MobiusElement::new_unchecked(id, &xi.mexp(-h) * g.matrix());
                let fd = (&act(&plus, &q).unwrap() - &act(&minus, &q).unwrap()).scale(0.5 / h);
                assert!((&fd - &v).norm_max() < 1e-6, "{id}");
                let p = act(&g, &q).unwrap();
                assert!(tangency_residual(&p, &v) < 1e-8);
            }
        }
    }

    #[test]
    fn non_tangent_directions_are_rejected() {
        let id = GroupId::split(Field::Real, 3);
        let e = MobiusElement::identity(id);
        let q = Mat::identity(Field::Real, 3);
        let bad = Mat::identity(Field::Real, 6);
        assert!(matches!(
            induced_field(&e, &bad, &q),
            Err(Error::NotTangent { .. })
        ));
        assert!(matches!(
            MobiusElement::new(id, Mat::scalar(Field::Real, 6, Quat::real(2.0))),
            Err(Error::NotMember { .. })
        ));
    }

    #[test]
    fn k_acts_isometrically_on_m() {
        let mut r = rng(8);
        for id in desk_groups() {
            let m = id.compact_part();
            for _ in 0..10 {
                let (a, d) = haar_sample_k(&id, &mut r).unwrap();
                let k = MobiusElement::from_k(id, &a, &d).unwrap();
                let q = haar_sample(&m, &mut r).unwrap();
                let w = random_lie_element(&m, 1.0, &mut r);
                let h = 1e-5;
                let qp = &w.mexp(h) * &q;
                let qm = &w.mexp(-h) * &q;
                let v = (&qp - &qm).scale(0.5 / h);
                let dv = (&act(&k, &qp).unwrap() - &act(&k, &qm).unwrap()).scale(0.5 / h);
                assert!((dv.frob_norm() - v.frob_norm()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn mass_concentrates_towards_identity() {
        let mut r = rng(9);
        let id = GroupId::split(Field::Complex, 2);
        let mut checked = 0;
        for _ in 0..50 {
            let q = haar_sample(&id.compact_part(), &mut r).unwrap();
            if !avoids_eigenvalue(&q, 1.0, 1e-2).unwrap() {
                continue;
            }
            checked += 1;
            let dist = |t: f64| {
                (&act(&hyperbolic_element(id, t), &q).unwrap() - &Mat::identity(Field::Complex, 2))
                    .frob_norm()
            };
            assert!(dist(8.0) < dist(2.0));
            assert!(dist(12.0) < 0.01);
        }
        assert!(checked > 40);
    }

    #[test]
    fn eigenvalue_test_over_each_field() {
        let minus = Mat::scalar(Field::Quaternion, 2, Quat::real(-1.0));
        assert!(!avoids_eigenvalue(&minus, 1.0, 1e-8).unwrap());
        let rot = Mat::diag(Field::Quaternion, &[Quat::I, Quat::J]);
        // eigenvalues ±i each: |det(q + I)| = |1 + i|² = 2
        assert!((det_shift(&rot, 1.0).unwrap() - 2.0).abs() < 1e-12);
        let flip = Mat::from_real(3, 3, &[-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(!avoids_eigenvalue(&flip, 1.0, 1e-8).unwrap());
        assert!(!avoids_eigenvalue(&flip, -1.0, 1e-8).unwrap());
        assert!(avoids_eigenvalue(&Mat::identity(Field::Real, 3), 1.0, 1e-8).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn graph_oracle_agrees_on_random_inputs(seed in any::<u64>(), spread in 0.1f64..2.0, which in 0usize..5) {
            let id = desk_groups()[which];
            let mut r = rng(seed);
            let g = MobiusElement::new(id, random_split_element(&id, spread, &mut r).unwrap()).unwrap();
            let u = haar_sample(&id.compact_part(), &mut r).unwrap();
            let a = act(&g, &u).unwrap();
            let b = act_on_graph(&g, &u).unwrap();
            prop_assert!((&a - &b).norm_max() < 1e-9);
        }
    }
}
