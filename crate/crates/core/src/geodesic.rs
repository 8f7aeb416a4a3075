//! Geodesics of the kinetic-energy metric in exponential charts.
//!
//! Charts are `x ↦ exp(Σ xᵢEᵢ)·g₀` over an orthonormal basis of `Lie(G)`. The
//! metric is evaluated on one fixed [`SampleSet`] for the whole integration, so
//! finite differences of it are differences of a single smooth function.

use std::cell::Cell;

use nalgebra::{DMatrix, DVector, SVD};
use serde::Serialize;

use crate::action::{self, MobiusElement};
use crate::error::{Error, Result};
use crate::groups::{self, Embedding, GroupId};
use crate::matrices::Mat;
use crate::metric::{self, QuadratureSpec, SampleSet};
use crate::scalars::Field;

/// Default central-difference step in chart coordinates.
pub const FD_STEP: f64 = 1e-3;

/// Exponential chart `x ↦ exp(Σ xᵢEᵢ)·g₀` centered at `g₀`.
#[derive(Clone, Debug)]
pub struct Chart {
    center: MobiusElement,
    basis: Vec<Mat>,
    radius: f64,
}

impl Chart {
    pub fn new(center: MobiusElement, radius: f64) -> Self {
        let basis = groups::lie_basis(center.group());
        Chart {
            center,
            basis,
            radius,
        }
    }

    pub fn center(&self) -> &MobiusElement {
        &self.center
    }

    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn algebra_element(&self, x: &[f64]) -> Mat {
        groups::combine(&self.basis, x)
    }

    pub fn point(&self, x: &[f64]) -> MobiusElement {
        let g = &self.algebra_element(x).mexp(1.0) * self.center.matrix();
        MobiusElement::new_unchecked(*self.center.group(), g)
    }

    /// `(d/ds) exp(X + sE)|₀ · exp(−X)` for `X = Σ xᵢEᵢ`, computed from the upper
    /// right block of `exp((X, E; 0, X))`.
    pub fn trivialized_differential(&self, x: &[f64], dir: &Mat) -> Mat {
        if x.iter().all(|&c| c == 0.0) {
            return dir.clone();
        }
        let a = self.algebra_element(x);
        let z = Mat::zeros(a.field(), a.rows(), a.cols());
        let big = Mat::from_blocks(&a, dir, &z, &a).mexp(1.0);
        let m = a.rows();
        &big.block(0, m, m, m) * &a.mexp(-1.0)
    }

    /// Right-trivialized coordinate vectors `(∂ᵢ g) g⁻¹` at `x`.
    pub fn trivialized_partials(&self, x: &[f64]) -> Vec<Mat> {
        self.basis
            .iter()
            .map(|e| self.trivialized_differential(x, e))
            .collect()
    }

    /// Right-trivialized velocity `Σ vᵢ (∂ᵢ g) g⁻¹` at `x`.
    pub fn trivialized_velocity(&self, x: &[f64], v: &[f64]) -> Mat {
        self.trivialized_differential(x, &self.algebra_element(v))
    }

    /// Coordinates of `ξ ∈ Lie(G)` in the chart basis.
    pub fn coordinates(&self, xi: &Mat) -> Vec<f64> {
        groups::coordinates(&self.basis, xi)
    }

    /// The chart centered at `point(x)` together with the velocity `v` at `x`
    /// expressed in the new coordinates.
    pub fn recentered(&self, x: &[f64], v: &[f64]) -> (Chart, Vec<f64>) {
        let center = self.point(x);
        let new_v = self.coordinates(&self.trivialized_velocity(x, v));
        (
            Chart {
                center,
                basis: self.basis.clone(),
                radius: self.radius,
            },
            new_v,
        )
    }
}

/// Position and velocity of a geodesic in a chart.
#[derive(Clone, Debug)]
pub struct GeodesicState {
    pub chart: Chart,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
    pub energy: f64,
}

#[derive(Clone, Debug)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub g: Mat,
    pub energy: f64,
    pub membership_residual: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub group: GroupId,
    pub points: Vec<TrajectoryPoint>,
    /// Reason for stopping before the requested final time, if any.
    pub stopped: Option<String>,
}

impl Trajectory {
    /// Largest relative change of energy per unit time against the initial value.
    pub fn energy_drift_rate(&self) -> f64 {
        let (Some(first), Some(last)) = (self.points.first(), self.points.last()) else {
            return 0.0;
        };
        let span = (last.t - first.t).abs().max(f64::MIN_POSITIVE);
        let e0 = first.energy.abs().max(f64::MIN_POSITIVE);
        self.points
            .iter()
            .map(|p| (p.energy - first.energy).abs() / e0)
            .fold(0.0, f64::max)
            / span.max(1.0)
    }

    pub fn max_membership_residual(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.membership_residual)
            .fold(0.0, f64::max)
    }

    /// `max_t f(g(t))`.
    pub fn max_over(&self, f: impl Fn(&Mat) -> f64) -> f64 {
        self.points.iter().map(|p| f(&p.g)).fold(0.0, f64::max)
    }
}

/// The kinetic-energy geometry of a split group for one fixed mass distribution.
#[derive(Clone, Debug)]
pub struct KineticGeometry {
    samples: SampleSet,
    fd_step: f64,
}

fn add_scaled(x: &[f64], s: f64, v: &[f64]) -> Vec<f64> {
    x.iter().zip(v).map(|(a, b)| a + s * b).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

impl KineticGeometry {
    pub fn new(samples: SampleSet) -> Self {
        KineticGeometry {
            samples,
            fd_step: FD_STEP,
        }
    }

    /// Haar points for the compact partner of `group`, drawn per `spec`.
    pub fn from_spec(group: &GroupId, spec: &QuadratureSpec) -> Result<Self> {
        Ok(Self::new(SampleSet::haar(
            &group.compact_part(),
            spec.samples,
            spec.seed,
        )?))
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn samples(&self) -> &SampleSet {
        &self.samples
    }

    pub fn metric(&self, chart: &Chart, x: &[f64]) -> Result<DMatrix<f64>> {
        metric::gram_trivialized(
            &chart.point(x),
            &chart.trivialized_partials(x),
            &self.samples,
        )
    }

    /// `‖v‖²` at `x`.
    pub fn speed_sq(&self, chart: &Chart, x: &[f64], v: &[f64]) -> Result<f64> {
        metric::norm_sq_trivialized(
            &chart.point(x),
            &chart.trivialized_velocity(x, v),
            &self.samples,
        )
    }

    /// `G(x)·v`.
    fn lowered(&self, chart: &Chart, x: &[f64], v: &[f64]) -> Result<DVector<f64>> {
        let p = metric::pairings_trivialized(
            &chart.point(x),
            &chart.trivialized_partials(x),
            &chart.trivialized_velocity(x, v),
            &self.samples,
        )?;
        Ok(DVector::from_vec(p))
    }

    /// `Γ(v, v) = G⁻¹[(∂_v G)v − ½∇(vᵀGv)]` by central differences.
    pub fn christoffel_contracted(
        &self,
        chart: &Chart,
        x: &[f64],
        v: &[f64],
    ) -> Result<DVector<f64>> {
        let d = chart.dim();
        let speed = norm(v);
        if speed == 0.0 {
            return Ok(DVector::zeros(d));
        }
        let h = self.fd_step;
        let u: Vec<f64> = v.iter().map(|c| c / speed).collect();
        let plus = self.lowered(chart, &add_scaled(x, h, &u), v)?;
        let minus = self.lowered(chart, &add_scaled(x, -h, &u), v)?;
        let mut rhs = (plus - minus) * (speed / (2.0 * h));
        for k in 0..d {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += h;
            xm[k] -= h;
            let grad = (self.speed_sq(chart, &xp, v)? - self.speed_sq(chart, &xm, v)?) / (2.0 * h);
            rhs[k] -= 0.5 * grad;
        }
        let g = self.metric(chart, x)?;
        solve_spd(g, rhs)
    }

    /// Full Christoffel symbols `Γᵏᵢⱼ`, indexed `[k][i][j]`, from central
    /// differences of the metric tensor.
    pub fn christoffel(&self, chart: &Chart, x: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
        let d = chart.dim();
        let h = self.fd_step;
        let mut dg = Vec::with_capacity(d);
        for l in 0..d {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[l] += h;
            xm[l] -= h;
            dg.push((self.metric(chart, &xp)? - self.metric(chart, &xm)?) / (2.0 * h));
        }
        let g = self.metric(chart, x)?;
        let chol = g.clone().cholesky().ok_or_else(|| not_pd(&g))?;
        let ginv = chol.inverse();
        let mut out = vec![vec![vec![0.0; d]; d]; d];
        for i in 0..d {
            for j in i..d {
                let lower = DVector::from_fn(d, |l, _| {
                    0.5 * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)])
                });
                let upper = &ginv * lower;
                for k in 0..d {
                    out[k][i][j] = upper[k];
                    out[k][j][i] = upper[k];
                }
            }
        }
        Ok(out)
    }

    fn acceleration(&self, chart: &Chart, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        Ok((-self.christoffel_contracted(chart, x, v)?)
            .iter()
            .copied()
            .collect())
    }

    /// State at the chart center with initial velocity `z` (a tangent vector at
    /// the center, not right-translated).
    pub fn initial_state(
        &self,
        center: MobiusElement,
        velocity: &Mat,
        radius: f64,
    ) -> Result<GeodesicState> {
        let xi = action::right_translate(&center, velocity)?;
        let chart = Chart::new(center, radius);
        let v = chart.coordinates(&xi);
        let x = vec![0.0; chart.dim()];
        let energy = 0.5 * self.speed_sq(&chart, &x, &v)?;
        Ok(GeodesicState {
            chart,
            x,
            v,
            t: 0.0,
            energy,
        })
    }

    fn record(&self, state: &GeodesicState) -> Result<TrajectoryPoint> {
        let g = state.chart.point(&state.x);
        let membership_residual = groups::is_member(g.group(), g.matrix())?;
        let energy = 0.5 * self.speed_sq(&state.chart, &state.x, &state.v)?;
        Ok(TrajectoryPoint {
            t: state.t,
            g: g.into_matrix(),
            energy,
            membership_residual,
        })
    }

    fn rk4_step(&self, s: &GeodesicState, dt: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let c = &s.chart;
        let (x, v) = (&s.x, &s.v);
        let a1 = self.acceleration(c, x, v)?;
        let x2 = add_scaled(x, dt / 2.0, v);
        let v2 = add_scaled(v, dt / 2.0, &a1);
        let a2 = self.acceleration(c, &x2, &v2)?;
        let x3 = add_scaled(x, dt / 2.0, &v2);
        let v3 = add_scaled(v, dt / 2.0, &a2);
        let a3 = self.acceleration(c, &x3, &v3)?;
        let x4 = add_scaled(x, dt, &v3);
        let v4 = add_scaled(v, dt, &a3);
        let a4 = self.acceleration(c, &x4, &v4)?;
        let d = x.len();
        let mut xn = x.clone();
        let mut vn = v.clone();
        for i in 0..d {
            xn[i] += dt / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
            vn[i] += dt / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
        }
        Ok((xn, vn))
    }

    /// Classical RK4 for `ẍ + Γ(ẋ, ẋ) = 0` over `[t, t + T]` with fixed `dt`
    /// (negative `T` integrates backwards), re-centering the chart whenever
    /// `‖x‖ > r/2`.
    ///
    /// Loss of positive definiteness or non-finite values end the run early; the
    /// reason is recorded in [`Trajectory::stopped`].
    pub fn integrate(
        &self,
        state: &GeodesicState,
        t_total: f64,
        dt: f64,
    ) -> Result<(Trajectory, GeodesicState)> {
        if dt.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidArgument(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let steps = (t_total.abs() / dt).round() as usize;
        let h = t_total.signum() * dt;
        let mut s = state.clone();
        let mut traj = Trajectory {
            group: *s.chart.center().group(),
            points: vec![self.record(&s)?],
            stopped: None,
        };
        for _ in 0..steps {
            match self.rk4_step(&s, h) {
                Ok((x, v)) if x.iter().chain(&v).all(|c| c.is_finite()) => {
                    s.x = x;
                    s.v = v;
                    s.t += h;
                }
                Ok(_) => {
                    traj.stopped = Some(format!("non-finite state at t = {:.6}", s.t + h));
                    break;
                }
                Err(
                    e @ (Error::NotPositiveDefinite { .. }
                    | Error::Singular { .. }
                    | Error::Invariant(_)),
                ) => {
                    traj.stopped = Some(format!("metric degenerated at t = {:.6}: {e}", s.t));
                    break;
                }
                Err(e) => return Err(e),
            }
            if norm(&s.x) > 0.5 * s.chart.radius() {
                let (chart, v) = s.chart.recentered(&s.x, &s.v);
                s.x = vec![0.0; chart.dim()];
                s.v = v;
                s.chart = chart;
            }
            let p = self.record(&s)?;
            s.energy = p.energy;
            traj.points.push(p);
        }
        Ok((traj, s))
    }

    /// Geodesic with initial point `center` and initial velocity `velocity`.
    pub fn shoot(
        &self,
        center: MobiusElement,
        velocity: &Mat,
        t_total: f64,
        dt: f64,
    ) -> Result<Trajectory> {
        let state = self.initial_state(center, velocity, 0.2)?;
        Ok(self.integrate(&state, t_total, dt)?.0)
    }

    /// `max_t ‖ẍ + Γ(ẋ, ẋ)‖` along the curve `t ↦ exp(tZ)` in the chart at the
    /// identity (where `ẍ = 0`), sampled at `steps + 1` equally spaced times.
    pub fn one_parameter_defect(&self, z: &Mat, t_total: f64, steps: usize) -> Result<f64> {
        let group = GroupId::split(z.field(), z.rows() / 2);
        let chart = Chart::new(MobiusElement::identity(group), f64::INFINITY);
        let v = chart.coordinates(z);
        let mut worst = 0.0f64;
        for k in 0..=steps {
            let t = t_total * k as f64 / steps as f64;
            let x: Vec<f64> = v.iter().map(|c| c * t).collect();
            worst = worst.max(self.christoffel_contracted(&chart, &x, &v)?.norm());
        }
        Ok(worst)
    }
}

fn not_pd(g: &DMatrix<f64>) -> Error {
    let min_eigenvalue = g
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Error::NotPositiveDefinite { min_eigenvalue }
}

fn solve_spd(g: DMatrix<f64>, rhs: DVector<f64>) -> Result<DVector<f64>> {
    match g.clone().cholesky() {
        Some(ch) => Ok(ch.solve(&rhs)),
        None => Err(not_pd(&g)),
    }
}

/// Arc length `∫ ‖c′(t)‖ dt` with the integrand given as a squared speed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArcLength {
    pub value: f64,
    /// Quadrature error estimate.
    pub error: f64,
    pub evaluations: u32,
}

/// `∫_{t₀}^{t₁} √(speed_sq(t)) dt` by tanh-sinh quadrature (robust to the
/// endpoint growth near the incompleteness boundary).
pub fn arc_length(
    speed_sq: impl Fn(f64) -> Result<f64>,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<ArcLength> {
    if t0 == t1 {
        return Ok(ArcLength {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let failure: Cell<Option<Error>> = Cell::new(None);
    let out = quadrature::double_exponential::integrate(
        |t| match speed_sq(t) {
            Ok(v) => v.max(0.0).sqrt(),
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        t0,
        t1,
        tol,
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(ArcLength {
        value: out.integral,
        error: out.error_estimate,
        evaluations: out.num_function_evaluations,
    })
}

/// Length of `σ|[0, s₁]` in the split partner of `m`.
pub fn sigma_arc_length(m: &GroupId, s1: f64, spec: &QuadratureSpec) -> Result<ArcLength> {
    arc_length(
        |s| Ok(metric::sigma_speed_sq(m, s, spec)?.value),
        0.0,
        s1,
        1e-10,
    )
}

/// Haar points on the compact partner of `e.dst(n)`, closed under the maps of
/// `M` induced by the isometries whose common fixed set contains the image of
/// `e`: `q ↦ k₀ q k₀⁻¹` for the commutant generators, or entrywise conjugation
/// for `O₀(n,n) ⊂ SU(n,n)`.
pub fn inclusion_samples(e: Embedding, n: usize, count: usize, seed: u64) -> Result<SampleSet> {
    let base = SampleSet::haar(&e.dst(n).compact_part(), count, seed)?;
    let gens = e.commutant_generators(n);
    if gens.is_empty() {
        return Ok(base.symmetrized(&[&|q: &Mat| q.conj()]));
    }
    type Map = Box<dyn Fn(&Mat) -> Mat + Sync>;
    let maps: Vec<Map> = gens
        .into_iter()
        .map(|k| {
            let kh = k.conj_transpose();
            Box::new(move |q: &Mat| &(&k * q) * &kh) as Map
        })
        .collect();
    let refs: Vec<&(dyn Fn(&Mat) -> Mat + Sync)> = maps.iter().map(|m| m.as_ref()).collect();
    Ok(base.symmetrized(&refs))
}

/// `min_s ‖g − γ(s)‖_max` over the curve `γ(s) = exp(s (0 I; I 0))`, with `s`
/// read off from the off-diagonal block.
pub fn distance_to_hyperbolic_line(g: &Mat) -> f64 {
    let n = g.rows() / 2;
    let (_, b, _, _) = g.quarters();
    let mean_sinh = (0..n).map(|i| b[(i, i)].a).sum::<f64>() / n as f64;
    let s = mean_sinh.asinh();
    let group = GroupId::split(g.field(), n);
    let gamma = action::hyperbolic_element(group, s);
    (g - gamma.matrix()).norm_max()
}

/// Basis of `{X ∈ Lie(G) : [kᵢ, X] = 0, i = 2..n}` with `kᵢ = diag(Aⁱ, Aⁱ)`, where
/// `Aⁱ e₁ = −eᵢ`, `Aⁱ eᵢ = e₁` (entries `A¹ᵢ = 1`, `Aⁱ₁ = −1`) and `Aⁱ` fixes the
/// other basis vectors.
pub fn fixed_point_algebra(id: &GroupId) -> Result<Vec<Mat>> {
    if !id.is_split() || id.n < 2 {
        return Err(Error::InvalidArgument(format!(
            "fixed-point algebra needs a split group with n ≥ 2, got {id}"
        )));
    }
    let basis = groups::lie_basis(id);
    let ks: Vec<Mat> = (2..=id.n)
        .map(|i| swap_rotation(id.field, id.n, i))
        .map(|a| Mat::block_diag(&[&a, &a]))
        .collect();
    let columns: Vec<Vec<f64>> = basis
        .iter()
        .map(|e| {
            ks.iter()
                .flat_map(|k| k.bracket(e).flatten_real())
                .collect()
        })
        .collect();
    let rows = columns[0].len();
    let d = basis.len();
    let a = DMatrix::from_fn(
        rows.max(d),
        d,
        |r, c| if r < rows { columns[c][r] } else { 0.0 },
    );
    let svd = SVD::new(a, false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Invariant("SVD did not return right singular vectors".into()))?;
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for (i, &sv) in svd.singular_values.iter().enumerate() {
        if sv <= 1e-12 * top.max(1.0) {
            let coeffs: Vec<f64> = v_t.row(i).iter().copied().collect();
            out.push(groups::combine(&basis, &coeffs));
        }
    }
    Ok(out)
}

/// The rotation `Aⁱ` of the plane `(e₁, eᵢ)` (1-based `i`).
pub fn swap_rotation(field: Field, n: usize, i: usize) -> Mat {
    let mut a = Mat::identity(field, n);
    let i = i - 1;
    a[(0, 0)] = crate::scalars::Quat::ZERO;
    a[(i, i)] = crate::scalars::Quat::ZERO;
    a[(0, i)] = crate::scalars::Quat::ONE;
    a[(i, 0)] = -crate::scalars::Quat::ONE;
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{random_lie_element, random_split_element};
    use crate::scalars::Quat;
    use crate::testing::rng;

    #[test]
    fn chart_differential_matches_finite_differences() {
        let mut r = rng(1);
        let id = GroupId::split(Field::Complex, 2);
        let g0 = MobiusElement::new(id, random_split_element(&id, 0.5, &mut r).unwrap()).unwrap();
        let chart = Chart::new(g0, 1.0);
        let x: Vec<f64> = (0..chart.dim())
            .map(|i| 0.05 * ((i as f64).sin()))
            .collect();
        let v: Vec<f64> = (0..chart.dim()).map(|i| (i as f64 * 0.7).cos()).collect();
        let h = 1e-5;
        let gp = chart.point(&add_scaled(&x, h, &v));
        let gm = chart.point(&add_scaled(&x, -h, &v));
        let fd = (gp.matrix() - gm.matrix()).scale(0.5 / h);
        let xi = chart.trivialized_velocity(&x, &v);
        let exact = &xi * chart.point(&x).matrix();
        assert!((&fd - &exact).norm_max() < 1e-8);
        assert!(groups::lie_residual(&id, &xi).unwrap() < 1e-12);
        let coords = chart.coordinates(&chart.trivialized_velocity(&vec![0.0; chart.dim()], &v));
        assert!(coords.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn one_dimensional_christoffel_symbol() {
        // SO(1) is a point, so O0(1,1) acts trivially and its metric vanishes.
        let o11 = GroupId::split(Field::Real, 1);
        let flat = KineticGeometry::new(SampleSet::haar(&o11.compact_part(), 1, 0).unwrap());
        let chart = Chart::new(MobiusElement::identity(o11), 1.0);
        assert!(flat.metric(&chart, &[0.2]).unwrap()[(0, 0)] < 1e-28);

        // In SU(1,1) with conjugation-symmetric samples the real direction decouples
        // from the imaginary ones along the real line, so Γ⁰₀₀ = ½ g⁻¹ g′ there.
        let id = GroupId::split(Field::Complex, 1);
        let base = SampleSet::haar(&id.compact_part(), 16, 3).unwrap();
        let geo = KineticGeometry::new(base.symmetrized(&[&|q: &Mat| q.conj()]));
        let chart = Chart::new(MobiusElement::identity(id), 1.0);
        let k0 = chart
            .basis()
            .iter()
            .position(|e| e[(0, 1)].a != 0.0)
            .unwrap();
        let at = |s: f64| {
            let mut x = vec![0.0; chart.dim()];
            x[k0] = s;
            x
        };
        let s0 = 0.37;
        let gamma = geo.christoffel(&chart, &at(s0)).unwrap()[k0][k0][k0];
        let g = |s: f64| geo.metric(&chart, &at(s)).unwrap()[(k0, k0)];
        let h = 1e-4;
        let dg = (g(s0 + h) - g(s0 - h)) / (2.0 * h);
        assert!(
            (gamma - 0.5 * dg / g(s0)).abs() < 1e-6,
            "{gamma} vs {}",
            0.5 * dg / g(s0)
        );
        let mut e = vec![0.0; chart.dim()];
        e[k0] = 1.0;
        let contracted = geo.christoffel_contracted(&chart, &at(s0), &e).unwrap();
        assert!((contracted[k0] - gamma).abs() < 1e-6);
    }

    #[test]
    fn full_and_contracted_christoffel_agree() {
        let mut r = rng(2);
        let id = GroupId::split(Field::Complex, 1);
        let geo = KineticGeometry::new(SampleSet::haar(&id.compact_part(), 32, 4).unwrap());
        let g0 = MobiusElement::new(id, random_split_element(&id, 0.7, &mut r).unwrap()).unwrap();
        let chart = Chart::new(g0, 1.0);
        let x = [0.02, -0.01, 0.03];
        let v = [0.4, -1.0, 0.3];
        let full = geo.christoffel(&chart, &x).unwrap();
        let contracted = geo.christoffel_contracted(&chart, &x, &v).unwrap();
        for k in 0..3 {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    assert!((full[k][i][j] - full[k][j][i]).abs() < 1e-14);
                    s += full[k][i][j] * v[i] * v[j];
                }
            }
            assert!(
                (s - contracted[k]).abs() < 1e-5 * (1.0 + s.abs()),
                "{s} vs {}",
                contracted[k]
            );
        }
        // Richardson consistency between h and h/2.
        let half = geo
            .clone()
            .with_fd_step(FD_STEP / 2.0)
            .christoffel_contracted(&chart, &x, &v)
            .unwrap();
        assert!((&half - &contracted).norm() < 1e-4 * contracted.norm().max(1.0));
    }

    #[test]
    fn zero_velocity_gives_constant_trajectory() {
        let id = GroupId::split(Field::Quaternion, 1);
        let geo = KineticGeometry::from_spec(&id, &QuadratureSpec::monte_carlo(16, 1)).unwrap();
        let z = Mat::zeros(Field::Quaternion, 2, 2);
        let traj = geo
            .shoot(MobiusElement::identity(id), &z, 0.5, 0.1)
            .unwrap();
        assert_eq!(traj.points.len(), 6);
        for p in &traj.points {
            assert_eq!(p.g, Mat::identity(Field::Quaternion, 2));
            assert_eq!(p.energy, 0.0);
        }
    }

    #[test]
    fn k_one_parameter_subgroups_are_geodesics() {
        let mut r = rng(3);
        let id = GroupId::split(Field::Quaternion, 1);
        let geo = KineticGeometry::from_spec(&id, &QuadratureSpec::monte_carlo(24, 2)).unwrap();
        let x0 = random_lie_element(&id.compact_part(), 1.0, &mut r);
        let z = Mat::block_diag(&[&x0, &Mat::zeros(id.field, 1, 1)]);
        let traj = geo
            .shoot(MobiusElement::identity(id), &z, 1.0, 0.05)
            .unwrap();
        assert!(traj.stopped.is_none());
        for p in &traj.points {
            assert!((&p.g - &z.mexp(p.t)).norm_max() < 1e-6);
        }
        assert!(traj.energy_drift_rate() < 1e-6);
        assert!(traj.max_membership_residual() < 1e-9);
    }

    #[test]
    fn time_reversal_returns_to_start() {
        let mut r = rng(4);
        let id = GroupId::split(Field::Complex, 1);
        let geo = KineticGeometry::from_spec(&id, &QuadratureSpec::monte_carlo(32, 3)).unwrap();
        let z = random_lie_element(&id, 1.0, &mut r);
        let start = geo
            .initial_state(MobiusElement::identity(id), &z, 0.2)
            .unwrap();
        let (fwd, end) = geo.integrate(&start, 0.8, 0.02).unwrap();
        assert!(fwd.energy_drift_rate() < 5e-3);
        let back_state = GeodesicState {
            v: end.v.iter().map(|c| -c).collect(),
            ..end
        };
        let (back, _) = geo.integrate(&back_state, 0.8, 0.02).unwrap();
        let last = &back.points.last().unwrap().g;
        assert!((last - &Mat::identity(Field::Complex, 2)).norm_max() < 1e-5);
        assert!(geo.integrate(&start, 1.0, 0.0).is_err());
    }

    #[test]
    fn hyperbolic_line_is_a_geodesic_for_real_symmetric_distributions() {
        let id = GroupId::split(Field::Complex, 1);
        let base = SampleSet::haar(&id.compact_part(), 12, 5).unwrap();
        let sym = base.symmetrized(&[&|q: &Mat| q.conj()]);
        let geo = KineticGeometry::new(sym);
        let z = Mat::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).with_field(Field::Complex);
        let traj = geo
            .shoot(MobiusElement::identity(id), &z, 1.0, 0.05)
            .unwrap();
        assert!(traj.max_over(distance_to_hyperbolic_line) < 1e-8);
        assert!(
            traj.max_over(|g| g.entries().iter().map(|q| q.b.abs()).fold(0.0, f64::max)) < 1e-10
        );
    }

    #[test]
    fn arc_length_of_the_su11_curve() {
        let u1 = GroupId::compact(Field::Complex, 1);
        let spec = QuadratureSpec::torus(0);
        for eps in [1e-1, 1e-3] {
            let s1: f64 = 1.0 - eps;
            let exact = 2.0 * std::f64::consts::PI.sqrt() * s1.asin();
            let l = sigma_arc_length(&u1, s1, &spec).unwrap();
            assert!((l.value - exact).abs() < 1e-8, "{} vs {exact}", l.value);
        }
        assert_eq!(arc_length(|_| Ok(1.0), 0.3, 0.3, 1e-10).unwrap().value, 0.0);
        assert!(
            arc_length(|_| Ok(0.0), 0.0, 1.0, 1e-10)
                .unwrap()
                .value
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn fixed_point_algebras() {
        for n in [3, 4] {
            let id = GroupId::split(Field::Real, n);
            let f = fixed_point_algebra(&id).unwrap();
            assert_eq!(f.len(), 1);
            let w = Mat::from_blocks(
                &Mat::zeros(Field::Real, n, n),
                &Mat::identity(Field::Real, n),
                &Mat::identity(Field::Real, n),
                &Mat::zeros(Field::Real, n, n),
            )
            .scale(1.0 / (2.0 * n as f64).sqrt());
            let sign = f[0].dot(&w).signum();
            assert!((&f[0].scale(sign) - &w).norm_max() < 1e-10);
        }
        let c = fixed_point_algebra(&GroupId::split(Field::Complex, 3)).unwrap();
        assert_eq!(c.len(), 3);
        let h = fixed_point_algebra(&GroupId::split(Field::Quaternion, 3)).unwrap();
        assert_eq!(h.len(), 10);
        // With a single rotation (n = 2) the commutant is larger than the scalars.
        assert_eq!(
            fixed_point_algebra(&GroupId::split(Field::Real, 2))
                .unwrap()
                .len(),
            4
        );
        let mut r = rng(6);
        let coeffs: Vec<f64> = (0..3).map(|_| rand::Rng::random::<f64>(&mut r)).collect();
        let x = groups::combine(&c, &coeffs);
        for i in 2..=3 {
            let a = swap_rotation(Field::Complex, 3, i);
            let k = Mat::block_diag(&[&a, &a]);
            assert!(k.bracket(&x).norm_max() < 1e-12);
            // each block of x is a scalar multiple of the identity
            let (p, q, _, _) = x.quarters();
            assert!((p[(0, 1)].norm() + q[(1, 2)].norm()) < 1e-12);
        }
        let a2 = swap_rotation(Field::Real, 3, 2);
        assert_eq!(a2[(0, 1)], Quat::ONE);
        assert_eq!(a2[(1, 0)], -Quat::ONE);
        assert!(groups::is_member(&GroupId::compact(Field::Real, 3), &a2).unwrap() < 1e-15);
        assert!(fixed_point_algebra(&GroupId::split(Field::Real, 1)).is_err());
    }

    #[test]
    fn inclusion_geodesics_stay_in_the_image() {
        let mut r = rng(7);
        for e in [Embedding::RealInComplex, Embedding::RealInQuaternion] {
            let samples = inclusion_samples(e, 1, 8, 11).unwrap();
            assert!(samples.len() > 8);
            let geo = KineticGeometry::new(samples);
            let z0 = random_lie_element(&e.src(1), 1.0, &mut r);
            let z = e.map(&z0);
            let traj = geo
                .shoot(MobiusElement::identity(e.dst(1)), &z, 0.5, 0.05)
                .unwrap();
            assert!(traj.stopped.is_none());
            assert!(traj.max_over(|g| e.relation_residual(g)) < 1e-10);
        }
    }
}
