//! The kinetic-energy metric `⟨X, Y⟩ = ∫_M ⟨X̃(q), Ỹ(q)⟩ dμ(q)` on a split group.
//!
//! Integrals over `M` are taken against Haar measure with total mass `vol(M)`,
//! either by Monte Carlo over a [`SampleSet`] or, for integrands invariant under
//! conjugation, by the Weyl integration formula on the maximal torus.
//!
//! A [`SampleSet`] is a fixed finite mass distribution on `M`. Every quantity
//! computed from one set is an exact functional of that distribution, which is
//! what makes common-random-number comparisons deterministic.

use std::collections::VecDeque;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{self, MobiusElement};
use crate::error::{Error, Result};
use crate::groups::{self, GroupId, WeylDensity};
use crate::matrices::Mat;
use crate::scalars::Field;

const CHUNK: usize = 64;
const MAX_RETRIES: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureMode {
    MonteCarlo,
    WeylTorus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub mode: QuadratureMode,
    /// Haar sample count (Monte Carlo mode).
    pub samples: usize,
    pub seed: u64,
    /// Nodes per torus angle (torus mode).
    pub grid: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            mode: QuadratureMode::MonteCarlo,
            samples: 100_000,
            seed: 0,
            grid: 64,
        }
    }
}

impl QuadratureSpec {
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        QuadratureSpec {
            mode: QuadratureMode::MonteCarlo,
            samples,
            seed,
            ..Default::default()
        }
    }

    pub fn torus(grid: usize) -> Self {
        QuadratureSpec {
            mode: QuadratureMode::WeylTorus,
            grid,
            ..Default::default()
        }
    }
}

/// An integral with its Monte Carlo standard error (zero for deterministic rules).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricValue {
    pub value: f64,
    pub std_error: f64,
    pub spec: QuadratureSpec,
}

/// Equally weighted points of a compact group carrying total mass `vol(M)`.
#[derive(Clone, Debug)]
pub struct SampleSet {
    group: GroupId,
    points: Vec<Mat>,
    mass: f64,
}

impl SampleSet {
    /// `count` independent Haar points drawn from a ChaCha8 stream seeded by `seed`.
    pub fn haar(group: &GroupId, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyQuadrature);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..count)
            .map(|_| groups::haar_sample(group, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(SampleSet {
            group: *group,
            points,
            mass: groups::volume(group)?,
        })
    }

    pub fn from_points(group: &GroupId, points: Vec<Mat>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyQuadrature);
        }
        Ok(SampleSet {
            group: *group,
            points,
            mass: groups::volume(group)?,
        })
    }

    pub fn group(&self) -> &GroupId {
        &self.group
    }

    pub fn points(&self) -> &[Mat] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Image of every point under a map `M → M`.
    pub fn transformed(&self, f: impl Fn(&Mat) -> Mat) -> SampleSet {
        SampleSet {
            group: self.group,
            points: self.points.iter().map(f).collect(),
            mass: self.mass,
        }
    }

    /// Closes the set under the finite group generated by `maps` (each an isometry
    /// of `M` of finite order), keeping one copy of each orbit point.
    ///
    /// Haar measure is invariant under such maps, so the result is still an
    /// unbiased quadrature, and the maps become exact symmetries of the discrete
    /// distribution.
    pub fn symmetrized(&self, maps: &[&(dyn Fn(&Mat) -> Mat + Sync)]) -> SampleSet {
        let mut points = Vec::new();
        for p in &self.points {
            let mut orbit: Vec<Mat> = vec![p.clone()];
            let mut queue = VecDeque::from([p.clone()]);
            while let Some(x) = queue.pop_front() {
                for f in maps {
                    let y = f(&x);
                    if !orbit.iter().any(|o| (o - &y).norm_max() < 1e-12) {
                        orbit.push(y.clone());
                        queue.push_back(y);
                    }
                }
            }
            points.extend(orbit);
        }
        SampleSet {
            group: self.group,
            points,
            mass: self.mass,
        }
    }

    /// `∫_M f dμ` with its standard error.
    pub fn integrate(&self, f: impl Fn(&Mat) -> Result<f64> + Sync) -> Result<(f64, f64)> {
        let values: Vec<f64> = self.points.par_iter().map(&f).collect::<Result<Vec<_>>>()?;
        let n = values.len() as f64;
        let mean = pairwise_sum(&values) / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Ok((self.mass * mean, self.mass * (var / n).sqrt()))
    }
}

/// Sum with a fixed binary reduction tree, independent of thread scheduling.
fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= CHUNK {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// Metric pairing of two right-trivialized directions `ξ, η ∈ Lie(G)` at `g`
/// against a fixed sample set.
pub fn inner_trivialized(
    g: &MobiusElement,
    xi: &Mat,
    eta: &Mat,
    samples: &SampleSet,
) -> Result<(f64, f64)> {
    samples.integrate(|q| {
        let p = action::act_unchecked(g, q)?;
        let u = action::fundamental_field(xi, &p);
        let v = action::fundamental_field(eta, &p);
        Ok(u.dot(&v))
    })
}

/// `‖ξ‖²_g` for a right-trivialized direction on a fixed sample set.
pub fn norm_sq_trivialized(g: &MobiusElement, xi: &Mat, samples: &SampleSet) -> Result<f64> {
    Ok(samples
        .integrate(|q| {
            let p = action::act_unchecked(g, q)?;
            Ok(action::fundamental_field(xi, &p).frob_norm().powi(2))
        })?
        .0)
}

/// The vector `(⟨ξᵢ, η⟩_g)ᵢ` on a fixed sample set.
pub fn pairings_trivialized(
    g: &MobiusElement,
    xis: &[Mat],
    eta: &Mat,
    samples: &SampleSet,
) -> Result<Vec<f64>> {
    let d = xis.len();
    let partial: Vec<Vec<f64>> = samples
        .points()
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; d];
            for q in chunk {
                let p = action::act_unchecked(g, q)?;
                let v = action::fundamental_field(eta, &p);
                for (a, xi) in acc.iter_mut().zip(xis) {
                    *a += action::fundamental_field(xi, &p).dot(&v);
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let w = samples.mass() / samples.len() as f64;
    let mut out = vec![0.0; d];
    for acc in &partial {
        for (o, a) in out.iter_mut().zip(acc) {
            *o += a;
        }
    }
    Ok(out.into_iter().map(|x| x * w).collect())
}

/// `⟨X, Y⟩_g` for tangent vectors `X, Y ∈ T_g G` on a given sample set.
pub fn inner_on(g: &MobiusElement, x: &Mat, y: &Mat, samples: &SampleSet) -> Result<(f64, f64)> {
    let xi = action::right_translate(g, x)?;
    let eta = action::right_translate(g, y)?;
    inner_trivialized(g, &xi, &eta, samples)
}

/// Whether `m` commutes with `diag(B, B)` for every `B` in the compact group.
fn commutes_with_diagonal_k(group: &GroupId, m: &Mat) -> bool {
    let tol = 1e-10 * (1.0 + m.norm_max());
    groups::lie_basis(&group.compact_part()).iter().all(|w| {
        let k = Mat::block_diag(&[w, w]);
        k.bracket(m).norm_max() < tol
    })
}

/// `⟨X, Y⟩_g` by the quadrature rule in `spec`.
///
/// Torus mode is accepted only when `g`, `X g⁻¹` and `Y g⁻¹` commute with the
/// diagonal copy of `M`, so that the integrand is a class function.
pub fn inner(g: &MobiusElement, x: &Mat, y: &Mat, spec: &QuadratureSpec) -> Result<MetricValue> {
    let m = g.group().compact_part();
    match spec.mode {
        QuadratureMode::MonteCarlo => {
            let samples = SampleSet::haar(&m, spec.samples, spec.seed)?;
            let (value, std_error) = inner_on(g, x, y, &samples)?;
            Ok(MetricValue {
                value,
                std_error,
                spec: *spec,
            })
        }
        QuadratureMode::WeylTorus => {
            if spec.grid == 0 {
                return Err(Error::EmptyQuadrature);
            }
            let xi = action::right_translate(g, x)?;
            let eta = action::right_translate(g, y)?;
            if ![g.matrix(), &xi, &eta]
                .iter()
                .all(|a| commutes_with_diagonal_k(g.group(), a))
            {
                return Err(Error::InvalidArgument(
                    "torus quadrature needs a class-function integrand".into(),
                ));
            }
            let value = torus_integral(&m, spec.grid, |q| {
                let p = action::act_unchecked(g, q)?;
                Ok(action::fundamental_field(&xi, &p).dot(&action::fundamental_field(&eta, &p)))
            })?;
            Ok(MetricValue {
                value,
                std_error: 0.0,
                spec: *spec,
            })
        }
    }
}

/// `∫_M f dμ` for a class function `f` by the trapezoid rule with `grid` nodes per
/// torus angle against the Weyl density.
pub fn torus_integral(m: &GroupId, grid: usize, f: impl Fn(&Mat) -> Result<f64>) -> Result<f64> {
    let w = WeylDensity::new(m)?;
    let rank = m.rank();
    let h = 2.0 * std::f64::consts::PI / grid as f64;
    let mut total = 0.0;
    let mut err = None;
    groups::for_each_torus_node(rank, grid, |theta| {
        if err.is_some() {
            return;
        }
        let r = groups::torus_point(m, theta).and_then(|d| Ok(f(&d)? * w.eval(theta)?));
        match r {
            Ok(v) => total += v,
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(total * h.powi(rank as i32)),
    }
}

/// `∫_0^{2π} f` for integrands with a sharp peak at `θ = π`, by tanh-sinh
/// quadrature on the two halves.
pub fn peaked_circle_integral(f: impl Fn(f64) -> f64) -> f64 {
    let pi = std::f64::consts::PI;
    let scale = (0..64)
        .map(|k| f(pi * (2 * k + 1) as f64 / 64.0).abs())
        .sum::<f64>()
        * pi
        / 32.0;
    let tol = 1e-13 * scale.max(1e-300);
    let a = quadrature::double_exponential::integrate(&f, 0.0, pi, tol).integral;
    let b = quadrature::double_exponential::integrate(&f, pi, 2.0 * pi, tol).integral;
    a + b
}

/// Periodic trapezoid rule on `[0, 2π)` with node doubling until successive
/// values agree to `rel_tol`. Returns the value and the final node count.
pub fn periodic_trapezoid(f: impl Fn(f64) -> f64, rel_tol: f64) -> (f64, usize) {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut n = 16usize;
    let mut sum: f64 = (0..n).map(|k| f(two_pi * k as f64 / n as f64)).sum();
    let mut value = sum * two_pi / n as f64;
    while n < 1 << 24 {
        let odd: f64 = (0..n)
            .map(|k| f(two_pi * (2 * k + 1) as f64 / (2 * n) as f64))
            .sum();
        sum += odd;
        n *= 2;
        let next = sum * two_pi / n as f64;
        let done = (next - value).abs() <= rel_tol * next.abs().max(f64::MIN_POSITIVE);
        value = next;
        if done && n >= 64 {
            break;
        }
    }
    (value, n)
}

/// `‖σ′(s)‖²` for the curve `σ(s) = (1 − s²)^{−1/2}(I, sI; sI, I)` in the split
/// partner of `m`.
///
/// Monte Carlo mode integrates over Haar samples. Torus mode uses that the
/// integrand restricted to the torus is a sum of identical one-angle terms (one
/// per torus block) plus, for odd `SOₙ`, the constant contribution of the fixed
/// `1×1` block; each term is integrated against the one-angle Weyl marginal with
/// an adaptive periodic trapezoid rule.
pub fn sigma_speed_sq(m: &GroupId, s: f64, spec: &QuadratureSpec) -> Result<MetricValue> {
    let split = m.split_partner();
    let g = action::sigma_element(split, s)?;
    let x = action::sigma_velocity(split, s);
    match spec.mode {
        QuadratureMode::MonteCarlo => inner(&g, &x, &x, spec),
        QuadratureMode::WeylTorus => {
            let (block_compact, extra) = match m.field {
                Field::Real => (GroupId::compact(Field::Real, 2), m.n % 2 == 1),
                _ => (GroupId::compact(m.field, 1), false),
            };
            let block_split = block_compact.split_partner();
            let gb = action::sigma_element(block_split, s)?;
            let xib = action::right_translate(&gb, &action::sigma_velocity(block_split, s))?;
            let density = WeylDensity::new(m)?;
            let h = |theta: f64| -> f64 {
                let d = groups::torus_point(&block_compact, &[theta]).expect("rank-one torus");
                let p = action::act_unchecked(&gb, &d).expect("σ(s) acts on M");
                action::fundamental_field(&xib, &p).frob_norm().powi(2) * density.marginal(theta)
            };
            let per_block = peaked_circle_integral(h);
            let mut value = m.rank() as f64 * per_block;
            if extra {
                let one = GroupId::split(Field::Real, 1);
                let g1 = action::sigma_element(one, s)?;
                let xi1 = action::right_translate(&g1, &action::sigma_velocity(one, s))?;
                let p = action::act_unchecked(&g1, &Mat::identity(Field::Real, 1))?;
                value +=
                    action::fundamental_field(&xi1, &p).frob_norm().powi(2) * groups::volume(m)?;
            }
            Ok(MetricValue {
                value,
                std_error: 0.0,
                spec: *spec,
            })
        }
    }
}

/// Gram matrix `Gᵢⱼ = ⟨ξᵢ, ξⱼ⟩_g` of right-trivialized directions on a sample set.
pub fn gram_trivialized(
    g: &MobiusElement,
    xis: &[Mat],
    samples: &SampleSet,
) -> Result<DMatrix<f64>> {
    let d = xis.len();
    let partial: Vec<Vec<f64>> = samples
        .points()
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; d * d];
            let mut fields = Vec::with_capacity(d);
            for q in chunk {
                let p = action::act_unchecked(g, q)?;
                fields.clear();
                fields.extend(xis.iter().map(|xi| action::fundamental_field(xi, &p)));
                for i in 0..d {
                    for j in i..d {
                        acc[i * d + j] += fields[i].dot(&fields[j]);
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let w = samples.mass() / samples.len() as f64;
    let mut out = DMatrix::zeros(d, d);
    for acc in &partial {
        for i in 0..d {
            for j in i..d {
                out[(i, j)] += acc[i * d + j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            out[(i, j)] *= w;
            out[(j, i)] = out[(i, j)];
        }
    }
    Ok(out)
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Numerical rank of a family of matrices under the Frobenius product.
pub fn frobenius_rank(mats: &[Mat], rel_tol: f64) -> usize {
    let d = mats.len();
    let gram = DMatrix::from_fn(d, d, |i, j| mats[i].dot(&mats[j]));
    let ev = SymmetricEigen::new(gram).eigenvalues;
    let top = ev.iter().copied().fold(0.0, f64::max);
    ev.iter().filter(|&&e| e > rel_tol * top).count()
}

/// Metric tensor in the basis `basis ⊂ T_g G`.
///
/// The basis must have rank `dim G`. If sampling noise leaves the estimate
/// without positive definiteness the tensor is re-estimated with four times as
/// many samples (up to twice) before giving up.
pub fn metric_tensor(
    g: &MobiusElement,
    basis: &[Mat],
    spec: &QuadratureSpec,
) -> Result<DMatrix<f64>> {
    let dim = g.group().dim();
    let xis = basis
        .iter()
        .map(|x| action::right_translate(g, x))
        .collect::<Result<Vec<_>>>()?;
    let rank = frobenius_rank(&xis, 1e-12);
    if rank < dim || basis.len() != dim {
        return Err(Error::RankDeficient {
            rank,
            expected: dim,
        });
    }
    let m = g.group().compact_part();
    let mut spec = *spec;
    let mut last = 0.0;
    for _ in 0..=MAX_RETRIES {
        let samples = SampleSet::haar(&m, spec.samples, spec.seed)?;
        let gram = gram_trivialized(g, &xis, &samples)?;
        last = min_eigenvalue(&gram);
        if last > 0.0 {
            return Ok(gram);
        }
        spec.samples *= 4;
    }
    Err(Error::NotPositiveDefinite {
        min_eigenvalue: last,
    })
}

/// Whether `k` is block diagonal with both blocks in the compact group (the
/// subgroup `K`).
fn check_k(group: &GroupId, k: &Mat) -> Result<()> {
    let n = group.n;
    let (_, b, c, _) = k.quarters();
    let residual = groups::is_member(group, k)?
        .max(b.norm_max())
        .max(c.norm_max());
    if residual >= groups::MEMBERSHIP_TOL {
        return Err(Error::NotMember {
            group: GroupId::compact(group.field, n),
            residual,
        });
    }
    Ok(())
}

/// `|‖dF(X)‖² − ‖X‖²| / ‖X‖²` for `F(g) = k₁ g k₂⁻¹`.
///
/// Both norms use the same Haar points: the right-hand side is evaluated on the
/// points transported by `k₂ ∗ ·`, which is exactly the change of variables
/// relating the two integrals.
pub fn isometry_residual(
    k1: &Mat,
    k2: &Mat,
    g: &MobiusElement,
    x: &Mat,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let group = *g.group();
    check_k(&group, k1)?;
    check_k(&group, k2)?;
    let samples = SampleSet::haar(&group.compact_part(), spec.samples, spec.seed)?;
    isometry_residual_on(k1, k2, g, x, &samples)
}

/// [`isometry_residual`] on a given sample set.
pub fn isometry_residual_on(
    k1: &Mat,
    k2: &Mat,
    g: &MobiusElement,
    x: &Mat,
    samples: &SampleSet,
) -> Result<f64> {
    let group = *g.group();
    let k2_inv = k2.conj_transpose();
    let fg = MobiusElement::new_unchecked(group, &(k1 * g.matrix()) * &k2_inv);
    let fx = &(k1 * x) * &k2_inv;
    let k2e = MobiusElement::new_unchecked(group, k2.clone());
    let moved = samples.transformed(|q| action::act_unchecked(&k2e, q).expect("K acts on M"));
    let (lhs, _) = inner_on(g, x, x, samples)?;
    let (rhs, _) = inner_on(&fg, &fx, &fx, &moved)?;
    Ok((rhs - lhs).abs() / lhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{haar_sample, haar_sample_k, random_lie_element, random_split_element};
    use crate::scalars::Quat;
    use crate::testing::rng;
    use std::f64::consts::PI;

    fn k_direction(group: &GroupId, x0: &Mat, left: bool) -> Mat {
        let z = Mat::zeros(group.field, group.n, group.n);
        if left {
            Mat::block_diag(&[x0, &z])
        } else {
            Mat::block_diag(&[&z, x0])
        }
    }

    #[test]
    fn zero_vector_has_zero_norm() {
        let id = GroupId::split(Field::Complex, 2);
        let e = MobiusElement::identity(id);
        let z = Mat::zeros(Field::Complex, 4, 4);
        let v = inner(&e, &z, &z, &QuadratureSpec::monte_carlo(100, 1)).unwrap();
        assert_eq!((v.value, v.std_error), (0.0, 0.0));
        assert!(matches!(
            inner(&e, &z, &z, &QuadratureSpec::monte_carlo(0, 1)),
            Err(Error::EmptyQuadrature)
        ));
    }

    #[test]
    fn k_directions_have_norm_vol_times_frobenius() {
        // The integrand |X q|² is constant in q, so the estimate is exact.
        let mut r = rng(1);
        for id in [
            GroupId::split(Field::Real, 3),
            GroupId::split(Field::Complex, 2),
            GroupId::split(Field::Quaternion, 1),
        ] {
            let m = id.compact_part();
            let vol = groups::volume(&m).unwrap();
            let e = MobiusElement::identity(id);
            for left in [true, false] {
                let x0 = random_lie_element(&m, 1.0, &mut r);
                // diag(X, 0) lies in su(n,n) only for traceless X.
                let x0 = if id.field == Field::Complex {
                    &x0 - &Mat::scalar(id.field, id.n, x0.trace() / id.n as f64)
                } else {
                    x0
                };
                let x0 = x0.scale(1.7 / x0.frob_norm());
                let x = k_direction(&id, &x0, left);
                let v = inner(&e, &x, &x, &QuadratureSpec::monte_carlo(200, 3)).unwrap();
                assert!(
                    (v.value / (vol * 1.7 * 1.7) - 1.0).abs() < 1e-12,
                    "{id} {left}: {} vs {}",
                    v.value,
                    vol * 1.7 * 1.7
                );
                assert!(v.std_error < 1e-9);
            }
        }
    }

    #[test]
    fn off_diagonal_k_block_matches_schur_average() {
        // ⟨(X,0),(0,Y)⟩ = −∫ Re tr(q* X* q Y) dμ = −vol·Re(conj(tr X)·tr Y)/n on Uₙ.
        let id = GroupId::split(Field::Complex, 2);
        let m = id.compact_part();
        let mut r = rng(2);
        let x0 = random_lie_element(&m, 1.0, &mut r);
        let y0 = random_lie_element(&m, 1.0, &mut r);
        // diag(X, 0) is only in u(2,2); the pairing is defined there all the same.
        let e = MobiusElement::identity(id);
        let samples = SampleSet::haar(&m, 40_000, 5).unwrap();
        let (value, std_error) = inner_trivialized(
            &e,
            &k_direction(&id, &x0, true),
            &k_direction(&id, &y0, false),
            &samples,
        )
        .unwrap();
        let vol = groups::volume(&m).unwrap();
        let expected = -vol * (x0.trace().conj() * y0.trace()).a / 2.0;
        assert!(expected.abs() > 0.1);
        assert!(
            (value - expected).abs() < 4.0 * std_error,
            "{value} vs {expected} ± {std_error}"
        );
    }

    #[test]
    fn su11_sigma_speed_closed_form_by_torus() {
        let u1 = GroupId::compact(Field::Complex, 1);
        for t in [0.0, 0.3, 0.6, 0.9, 0.99] {
            let v = sigma_speed_sq(&u1, t, &QuadratureSpec::torus(64)).unwrap();
            let exact = 4.0 * PI / (1.0 - t * t);
            assert!((v.value - exact).abs() < 1e-9 * exact, "t={t}: {}", v.value);
        }
    }

    #[test]
    fn torus_fast_path_agrees_with_tensor_grid_and_generic_inner() {
        for m in [
            GroupId::compact(Field::Complex, 2),
            GroupId::compact(Field::Real, 4),
            GroupId::compact(Field::Real, 5),
            GroupId::compact(Field::Quaternion, 1),
            GroupId::compact(Field::Quaternion, 2),
        ] {
            let s = 0.5;
            let fast = sigma_speed_sq(&m, s, &QuadratureSpec::torus(0))
                .unwrap()
                .value;
            let split = m.split_partner();
            let g = action::sigma_element(split, s).unwrap();
            let x = action::sigma_velocity(split, s);
            let grid = inner(&g, &x, &x, &QuadratureSpec::torus(48)).unwrap().value;
            assert!((fast / grid - 1.0).abs() < 1e-10, "{m}: {fast} vs {grid}");
            let mc = inner(&g, &x, &x, &QuadratureSpec::monte_carlo(20_000, 9)).unwrap();
            assert!(
                (mc.value - fast).abs() < 4.0 * mc.std_error,
                "{m}: mc {} ± {} vs {fast}",
                mc.value,
                mc.std_error
            );
        }
    }

    #[test]
    fn torus_mode_rejects_non_class_integrands() {
        let id = GroupId::split(Field::Complex, 2);
        let mut r = rng(4);
        let e = MobiusElement::identity(id);
        let x = random_lie_element(&id, 1.0, &mut r);
        assert!(matches!(
            inner(&e, &x, &x, &QuadratureSpec::torus(16)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn weyl_bound_direction() {
        // ∫_M f dμ ≤ (sup w)·∫_T f(D(θ)) dθ for nonnegative class functions f.
        let m = GroupId::compact(Field::Complex, 2);
        let g = action::sigma_element(m.split_partner(), 0.7).unwrap();
        let x = action::sigma_velocity(m.split_partner(), 0.7);
        let xi = action::right_translate(&g, &x).unwrap();
        let f = |q: &Mat| -> Result<f64> {
            let p = action::act_unchecked(&g, q)?;
            Ok(action::fundamental_field(&xi, &p).frob_norm().powi(2))
        };
        let samples = SampleSet::haar(&m, 20_000, 2).unwrap();
        let (full, se) = samples.integrate(f).unwrap();
        let w = WeylDensity::new(&m).unwrap();
        let grid = 40;
        let h = 2.0 * PI / grid as f64;
        let mut sup = 0.0f64;
        let mut unweighted = 0.0;
        groups::for_each_torus_node(2, grid, |t| {
            sup = sup.max(w.eval(t).unwrap());
            unweighted += f(&groups::torus_point(&m, t).unwrap()).unwrap();
        });
        unweighted *= h * h;
        assert!(full - 3.0 * se <= sup * unweighted);
    }

    #[test]
    fn inner_is_symmetric_and_bilinear_on_fixed_samples() {
        let id = GroupId::split(Field::Quaternion, 1);
        let mut r = rng(5);
        let g = MobiusElement::new(id, random_split_element(&id, 1.0, &mut r).unwrap()).unwrap();
        let samples = SampleSet::haar(&id.compact_part(), 500, 7).unwrap();
        let xs: Vec<Mat> = (0..3)
            .map(|_| &random_lie_element(&id, 1.0, &mut r) * g.matrix())
            .collect();
        let ip = |a: &Mat, b: &Mat| inner_on(&g, a, b, &samples).unwrap().0;
        assert!((ip(&xs[0], &xs[1]) - ip(&xs[1], &xs[0])).abs() < 1e-10);
        let comb = &xs[0].scale(2.0) + &xs[2].scale(-0.5);
        let lin = 2.0 * ip(&xs[0], &xs[1]) - 0.5 * ip(&xs[2], &xs[1]);
        assert!((ip(&comb, &xs[1]) - lin).abs() < 1e-9);
    }

    #[test]
    fn estimator_is_consistent_across_seeds() {
        let id = GroupId::split(Field::Real, 3);
        let mut r = rng(6);
        let g = MobiusElement::new(id, random_split_element(&id, 0.8, &mut r).unwrap()).unwrap();
        let x = &random_lie_element(&id, 1.0, &mut r) * g.matrix();
        let a = inner(&g, &x, &x, &QuadratureSpec::monte_carlo(20_000, 1)).unwrap();
        let b = inner(&g, &x, &x, &QuadratureSpec::monte_carlo(20_000, 2)).unwrap();
        let sigma = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!((a.value - b.value).abs() < 3.0 * sigma);
        let c = inner(&g, &x, &x, &QuadratureSpec::monte_carlo(20_000, 1)).unwrap();
        assert_eq!(a.value, c.value);
    }

    #[test]
    fn isometries_of_k_times_k_hold_exactly_with_common_samples() {
        let mut r = rng(7);
        for id in [
            GroupId::split(Field::Real, 3),
            GroupId::split(Field::Complex, 2),
            GroupId::split(Field::Quaternion, 1),
        ] {
            let samples = SampleSet::haar(&id.compact_part(), 64, 11).unwrap();
            let e = Mat::identity(id.field, 2 * id.n);
            let g =
                MobiusElement::new(id, random_split_element(&id, 1.0, &mut r).unwrap()).unwrap();
            let x = &random_lie_element(&id, 1.0, &mut r) * g.matrix();
            assert_eq!(isometry_residual_on(&e, &e, &g, &x, &samples).unwrap(), 0.0);
            for _ in 0..10 {
                let (a1, d1) = haar_sample_k(&id, &mut r).unwrap();
                let (a2, d2) = haar_sample_k(&id, &mut r).unwrap();
                let k1 = Mat::block_diag(&[&a1, &d1]);
                let k2 = Mat::block_diag(&[&a2, &d2]);
                assert!(isometry_residual_on(&k1, &k2, &g, &x, &samples).unwrap() < 1e-12);
            }
        }
        let id = GroupId::split(Field::Real, 3);
        let g = MobiusElement::identity(id);
        let bad = action::hyperbolic_element(id, 0.3).into_matrix();
        let x = Mat::zeros(Field::Real, 6, 6);
        assert!(matches!(
            isometry_residual(&bad, &bad, &g, &x, &QuadratureSpec::monte_carlo(8, 0)),
            Err(Error::NotMember { .. })
        ));
    }

    #[test]
    fn metric_tensor_is_positive_definite_and_consistent() {
        let mut r = rng(8);
        let id = GroupId::split(Field::Real, 1);
        let e = MobiusElement::identity(id);
        let basis = groups::lie_basis(&id);
        let spec = QuadratureSpec::monte_carlo(2_000, 4);
        let gram = metric_tensor(&e, &basis, &spec).unwrap();
        let direct = inner(&e, &basis[0], &basis[0], &spec).unwrap().value;
        assert!((gram[(0, 0)] - direct).abs() < 1e-12);

        for id in [
            GroupId::split(Field::Complex, 1),
            GroupId::split(Field::Quaternion, 1),
            GroupId::split(Field::Real, 3),
        ] {
            for _ in 0..5 {
                let g = MobiusElement::new(id, random_split_element(&id, 1.0, &mut r).unwrap())
                    .unwrap();
                let basis: Vec<Mat> = groups::lie_basis(&id)
                    .iter()
                    .map(|e| e * g.matrix())
                    .collect();
                let gram = metric_tensor(&g, &basis, &QuadratureSpec::monte_carlo(400, 1)).unwrap();
                assert!(min_eigenvalue(&gram) > 0.0);
                assert!((&gram - &gram.transpose()).amax() < 1e-12);
            }
            let mut basis = groups::lie_basis(&id);
            basis[1] = basis[0].clone();
            let e = MobiusElement::identity(id);
            assert!(matches!(
                metric_tensor(&e, &basis, &QuadratureSpec::monte_carlo(10, 1)),
                Err(Error::RankDeficient { .. })
            ));
        }
    }

    #[test]
    fn symmetrization_closes_orbits() {
        let m = GroupId::compact(Field::Quaternion, 1);
        let base = SampleSet::haar(&m, 10, 3).unwrap();
        let ci = |q: &Mat| {
            &(&Mat::scalar(Field::Quaternion, 1, Quat::I) * q)
                * &Mat::scalar(Field::Quaternion, 1, -Quat::I)
        };
        let cj = |q: &Mat| {
            &(&Mat::scalar(Field::Quaternion, 1, Quat::J) * q)
                * &Mat::scalar(Field::Quaternion, 1, -Quat::J)
        };
        let sym = base.symmetrized(&[&ci, &cj]);
        assert_eq!(sym.len(), 40);
        for p in sym.points() {
            let img = ci(p);
            assert!(sym.points().iter().any(|o| (o - &img).norm_max() < 1e-12));
        }
        let _ = haar_sample(&m, &mut rng(0));
    }

    #[test]
    fn periodic_trapezoid_is_exact_for_trig_polynomials() {
        let (v, _) = periodic_trapezoid(|t| 3.0 + (2.0 * t).cos() + t.sin().powi(4), 1e-15);
        assert!((v - (6.0 * PI + 0.75 * PI)).abs() < 1e-12);
    }
}
