//! Numerical experiments shared by the scenarios and the acceptance suite.
//!
//! Every experiment is deterministic for a fixed seed and returns a
//! serializable summary; trajectories are returned separately for CSV output.

use std::f64::consts::PI;

use mobius_core::action::{self, MobiusElement};
use mobius_core::geodesic::{self, KineticGeometry};
use mobius_core::groups::{self, Embedding};
use mobius_core::lowdim::{self, DefectSpec};
use mobius_core::metric::{self, SampleSet};
use mobius_core::{Field, GroupId, Mat, QuadratureSpec, Quat, Result, Trajectory, TrajectoryPoint};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::config::IntegratorSpec;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `π^{3/2}`, the length of the SU(1,1) curve on `[0, 1)`.
pub fn su11_total_length() -> f64 {
    PI.powf(1.5)
}

/// Largest singular value.
pub fn spectral_norm(m: &Mat) -> f64 {
    let r = m.real_repr();
    let a = DMatrix::from_fn(r.rows(), r.cols(), |i, j| r[(i, j)].a);
    a.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Smallest singular value; for normal `q + I` this is `min |λ + 1|`.
pub fn smallest_singular_value(m: &Mat) -> f64 {
    let r = m.real_repr();
    let a = DMatrix::from_fn(r.rows(), r.cols(), |i, j| r[(i, j)].a);
    a.singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Random element of the Lie algebra of `M` that is also a `K`-direction of its
/// split partner (trace-free over ℂ), with Frobenius norm 1.
pub fn compact_direction(m: &GroupId, r: &mut ChaCha8Rng) -> Mat {
    let mut x = groups::random_lie_element(m, 1.0, r);
    if m.field == Field::Complex {
        let t = x.trace().scale(1.0 / m.n as f64);
        x = &x - &Mat::scalar(Field::Complex, m.n, t);
    }
    let n = x.frob_norm();
    x.scale(1.0 / n)
}

fn zeros(m: &GroupId) -> Mat {
    Mat::zeros(m.field, m.n, m.n)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpeedRow {
    pub s: f64,
    pub speed_sq: f64,
    pub std_error: f64,
    /// `4π/(1−s²)` when `M = U₁`.
    pub closed_form: Option<f64>,
    pub rel_error: Option<f64>,
}

pub fn is_u1(m: &GroupId) -> bool {
    *m == GroupId::compact(Field::Complex, 1)
}

pub fn sigma_speeds(m: &GroupId, ss: &[f64], spec: &QuadratureSpec) -> Result<Vec<SpeedRow>> {
    ss.iter()
        .map(|&s| {
            let v = metric::sigma_speed_sq(m, s, spec)?;
            let closed_form = is_u1(m).then(|| 4.0 * PI / (1.0 - s * s));
            Ok(SpeedRow {
                s,
                speed_sq: v.value,
                std_error: v.std_error,
                closed_form,
                rel_error: closed_form.map(|c| (v.value - c).abs() / c),
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthRow {
    pub epsilon: f64,
    pub length: f64,
    pub quadrature_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteLength {
    pub group: GroupId,
    pub rows: Vec<LengthRow>,
    /// `π^{3/2}` for `M = U₁`.
    pub limit: Option<f64>,
    pub limit_rel_error: Option<f64>,
    /// `|L(ε_last) − L(ε_prev)| / L(ε_last)`.
    pub last_increment_ratio: f64,
}

/// Lengths of `σ|[0, 1−ε]` on the ε-ladder.
pub fn finite_length(m: &GroupId, epsilons: &[f64], spec: &QuadratureSpec) -> Result<FiniteLength> {
    let rows: Vec<LengthRow> = epsilons
        .iter()
        .map(|&epsilon| {
            let l = geodesic::sigma_arc_length(m, 1.0 - epsilon, spec)?;
            Ok(LengthRow {
                epsilon,
                length: l.value,
                quadrature_error: l.error,
            })
        })
        .collect::<Result<_>>()?;
    let last = rows.last().map_or(0.0, |r| r.length);
    let prev = if rows.len() >= 2 {
        rows[rows.len() - 2].length
    } else {
        0.0
    };
    let limit = is_u1(m).then(su11_total_length);
    Ok(FiniteLength {
        group: m.split_partner(),
        limit,
        limit_rel_error: limit.map(|l| (last - l).abs() / l),
        last_increment_ratio: (last - prev).abs() / last,
        rows,
    })
}

/// The curve `σ` sampled at `s ∈ [0, s_max]`, as a trajectory in the split partner.
pub fn sigma_trajectory(
    m: &GroupId,
    s_max: f64,
    points: usize,
    spec: &QuadratureSpec,
) -> Result<Trajectory> {
    let split = m.split_partner();
    let pts = (0..=points)
        .map(|k| {
            let s = s_max * k as f64 / points as f64;
            let g = action::sigma_element(split, s)?;
            let energy = 0.5 * metric::sigma_speed_sq(m, s, spec)?.value;
            let membership_residual = groups::is_member(&split, g.matrix())?;
            Ok(TrajectoryPoint {
                t: s,
                g: g.into_matrix(),
                energy,
                membership_residual,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Trajectory {
        group: split,
        points: pts,
        stopped: None,
    })
}

/// Least-squares slope of `log ‖σ′(s)‖` against `log(1 − s²)` on `[s0, s1]`.
pub fn incompleteness_slope(
    m: &GroupId,
    s0: f64,
    s1: f64,
    points: usize,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    for k in 0..points {
        let s = s0 + (s1 - s0) * k as f64 / (points - 1) as f64;
        xs.push((1.0 - s * s).ln());
        ys.push(0.5 * metric::sigma_speed_sq(m, s, spec)?.value.ln());
    }
    let n = points as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[derive(Clone, Debug, Serialize)]
pub struct IsometryTrials {
    pub group: GroupId,
    pub trials: usize,
    pub samples: usize,
    pub max_residual: f64,
}

/// `max |‖dF(X)‖² − ‖X‖²| / ‖X‖²` over random `k₁, k₂ ∈ K`, `g ∈ G`, `X ∈ T_gG`.
pub fn isometry_trials(
    group: &GroupId,
    trials: usize,
    samples: usize,
    seed: u64,
) -> Result<IsometryTrials> {
    let mut r = rng(seed);
    let set = SampleSet::haar(&group.compact_part(), samples, seed ^ 0x5eed)?;
    let mut max_residual = 0.0f64;
    for _ in 0..trials {
        let (a1, d1) = groups::haar_sample_k(group, &mut r)?;
        let (a2, d2) = groups::haar_sample_k(group, &mut r)?;
        let g = MobiusElement::new(*group, groups::random_split_element(group, 1.0, &mut r)?)?;
        let xi = groups::random_lie_element(group, 1.0, &mut r);
        let x = &xi * g.matrix();
        let res = metric::isometry_residual_on(
            &Mat::block_diag(&[&a1, &d1]),
            &Mat::block_diag(&[&a2, &d2]),
            &g,
            &x,
            &set,
        )?;
        max_residual = max_residual.max(res);
    }
    Ok(IsometryTrials {
        group: *group,
        trials,
        samples: set.len(),
        max_residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BiInvariance {
    pub group: GroupId,
    pub volume: f64,
    /// `‖(X,0)‖²/|X|²` per trial.
    pub left_ratios: Vec<f64>,
    pub left_std_errors: Vec<f64>,
    /// `‖(0,X)‖²/|X|²` per trial.
    pub right_ratios: Vec<f64>,
    pub right_std_errors: Vec<f64>,
    /// Largest `|rᵢ − r̄| / σ` over both families and the cross comparison.
    pub max_z_score: f64,
}

/// Metric of the `K` directions at the identity.
pub fn bi_invariance(
    group: &GroupId,
    trials: usize,
    spec: &QuadratureSpec,
    seed: u64,
) -> Result<BiInvariance> {
    let m = group.compact_part();
    let mut r = rng(seed);
    let e = MobiusElement::identity(*group);
    let (mut lr, mut ls, mut rr, mut rs) = (vec![], vec![], vec![], vec![]);
    for _ in 0..trials {
        let jitter: f64 = StandardNormal.sample(&mut r);
        let x = compact_direction(&m, &mut r).scale(0.5 + 0.1 * jitter);
        let n2 = x.frob_norm().powi(2);
        let left = Mat::block_diag(&[&x, &zeros(&m)]);
        let right = Mat::block_diag(&[&zeros(&m), &x]);
        let a = metric::inner(&e, &left, &left, spec)?;
        let b = metric::inner(&e, &right, &right, spec)?;
        lr.push(a.value / n2);
        ls.push(a.std_error / n2);
        rr.push(b.value / n2);
        rs.push(b.std_error / n2);
    }
    let z = |vals: &[f64], errs: &[f64], centre: f64| -> f64 {
        vals.iter()
            .zip(errs)
            .map(|(v, s)| {
                let d = (v - centre).abs();
                d / s.max(1e-12 * centre.abs())
            })
            .fold(0.0, f64::max)
    };
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ml, mr) = (mean(&lr), mean(&rr));
    let cross_sigma = (ls.iter().chain(&rs).copied().fold(0.0, f64::max)).max(1e-12 * ml.abs());
    let max_z_score = z(&lr, &ls, ml)
        .max(z(&rr, &rs, mr))
        .max((ml - mr).abs() / cross_sigma);
    Ok(BiInvariance {
        group: *group,
        volume: groups::volume(&m)?,
        left_ratios: lr,
        left_std_errors: ls,
        right_ratios: rr,
        right_std_errors: rs,
        max_z_score,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicRun {
    pub label: String,
    pub group: GroupId,
    pub defect: f64,
    pub energy_drift_rate: f64,
    pub max_membership_residual: f64,
    pub stopped: Option<String>,
}

fn geometry(samples: SampleSet, integ: &IntegratorSpec) -> KineticGeometry {
    KineticGeometry::new(samples).with_fd_step(integ.fd_step)
}

/// Geodesics with initial velocity `diag(X, 0)` against `exp(t diag(X, 0))`.
pub fn rigid_geodesics(
    group: &GroupId,
    trials: usize,
    samples: usize,
    integ: &IntegratorSpec,
    seed: u64,
) -> Result<(Vec<GeodesicRun>, Vec<Trajectory>)> {
    let m = group.compact_part();
    let geo = geometry(SampleSet::haar(&m, samples, seed)?, integ);
    let mut r = rng(seed ^ 0x71d);
    let mut runs = Vec::new();
    let mut trajs = Vec::new();
    for k in 0..trials {
        let x = compact_direction(&m, &mut r);
        let z = Mat::block_diag(&[&x, &zeros(&m)]);
        let traj = geo.shoot(MobiusElement::identity(*group), &z, integ.t_total, integ.dt)?;
        let defect = traj
            .points
            .iter()
            .map(|p| (&p.g - &z.mexp(p.t)).norm_max())
            .fold(0.0, f64::max);
        runs.push(GeodesicRun {
            label: format!("rigid-{k}"),
            group: *group,
            defect,
            energy_drift_rate: traj.energy_drift_rate(),
            max_membership_residual: traj.max_membership_residual(),
            stopped: traj.stopped.clone(),
        });
        trajs.push(traj);
    }
    Ok((runs, trajs))
}

/// Smallest source size at which the inclusion is a configuration-space
/// embedding with a nondegenerate target metric.
pub fn smallest_size(e: Embedding) -> usize {
    match e {
        // O₀(2,2) acting on SO₂ is not almost effective.
        Embedding::ComplexInReal => 2,
        _ => 1,
    }
}

fn source_direction(e: Embedding, n: usize, r: &mut ChaCha8Rng) -> Mat {
    let src = e.src(n);
    let mut z = groups::random_lie_element(&src, 1.0, r);
    if src.field == Field::Complex {
        // the source is U(n,n): add a central direction
        let c: f64 = StandardNormal.sample(r);
        z = &z + &Mat::scalar(Field::Complex, 2 * n, Quat::complex(0.0, 0.3 * c));
    }
    z
}

/// Geodesics of `e.dst(n)` tangent to the image of `e`, with the distance to the
/// image measured by the defining relations.
pub fn inclusion_geodesics(
    embeddings: &[Embedding],
    samples: usize,
    integ: &IntegratorSpec,
    seed: u64,
) -> Result<(Vec<GeodesicRun>, Vec<Trajectory>)> {
    let mut r = rng(seed);
    let mut runs = Vec::new();
    let mut trajs = Vec::new();
    for &e in embeddings {
        let n = smallest_size(e);
        let geo = geometry(geodesic::inclusion_samples(e, n, samples, seed)?, integ);
        let z = e.map(&source_direction(e, n, &mut r));
        let traj = geo.shoot(
            MobiusElement::identity(e.dst(n)),
            &z,
            integ.t_total,
            integ.dt,
        )?;
        runs.push(GeodesicRun {
            label: format!("({}) {} in {}", e.label(), e.src(n), e.dst(n)),
            group: e.dst(n),
            defect: traj.max_over(|g| e.relation_residual(g)),
            energy_drift_rate: traj.energy_drift_rate(),
            max_membership_residual: traj.max_membership_residual(),
            stopped: traj.stopped.clone(),
        });
        trajs.push(traj);
    }
    Ok((runs, trajs))
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPoint {
    pub group: GroupId,
    pub dimension: usize,
    /// `min_± ‖F − ±W/|W|‖_max` for a one-dimensional answer, `W = (0 I; I 0)`.
    pub distance_to_swap: Option<f64>,
}

pub fn fixed_point(group: &GroupId) -> Result<FixedPoint> {
    let basis = geodesic::fixed_point_algebra(group)?;
    let n = group.n;
    let f = group.field;
    let w = Mat::from_blocks(
        &Mat::zeros(f, n, n),
        &Mat::identity(f, n),
        &Mat::identity(f, n),
        &Mat::zeros(f, n, n),
    );
    let w = w.scale(1.0 / w.frob_norm());
    let distance_to_swap = (basis.len() == 1).then(|| {
        let v = &basis[0];
        let v = v.scale(1.0 / v.frob_norm());
        (&v - &w).norm_max().min((&v + &w).norm_max())
    });
    Ok(FixedPoint {
        group: *group,
        dimension: basis.len(),
        distance_to_swap,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Concentration {
    pub group: GroupId,
    pub times: Vec<f64>,
    pub sampled: usize,
    /// Points passing `|det(q + I)| > threshold`.
    pub admissible: usize,
    pub det_threshold: f64,
    /// `max_q ‖γ(t) ∗ q − I‖₂` over admissible `q`, per time.
    pub max_distance: Vec<f64>,
    /// Same, median.
    pub median_distance: Vec<f64>,
    /// `min |λ + 1|` over the eigenvalues of the maximizing `q`, per time.
    pub worst_gap_to_minus_one: Vec<f64>,
}

/// Distances of `γ(t) ∗ q` to the identity in the spectral norm.
pub fn mass_concentration(
    m: &GroupId,
    times: &[f64],
    count: usize,
    det_threshold: f64,
    seed: u64,
) -> Result<Concentration> {
    let split = m.split_partner();
    let mut r = rng(seed);
    let eye = Mat::identity(m.field, m.n);
    let mut qs = Vec::new();
    for _ in 0..count {
        let q = groups::haar_sample(m, &mut r)?;
        if action::avoids_eigenvalue(&q, 1.0, det_threshold)? {
            qs.push(q);
        }
    }
    let mut max_distance = Vec::new();
    let mut median_distance = Vec::new();
    let mut worst_gap_to_minus_one = Vec::new();
    for &t in times {
        let g = action::hyperbolic_element(split, t);
        let mut d: Vec<(f64, usize)> = qs
            .iter()
            .enumerate()
            .map(|(i, q)| Ok((spectral_norm(&(&action::act(&g, q)? - &eye)), i)))
            .collect::<Result<_>>()?;
        d.sort_by(|a, b| a.0.total_cmp(&b.0));
        worst_gap_to_minus_one.push(d.last().map_or(f64::NAN, |&(_, i)| {
            smallest_singular_value(&(&qs[i] + &eye))
        }));
        let d: Vec<f64> = d.into_iter().map(|(x, _)| x).collect();
        max_distance.push(d.last().copied().unwrap_or(0.0));
        median_distance.push(d.get(d.len() / 2).copied().unwrap_or(0.0));
    }
    Ok(Concentration {
        group: *m,
        times: times.to_vec(),
        sampled: count,
        admissible: qs.len(),
        det_threshold,
        max_distance,
        median_distance,
        worst_gap_to_minus_one,
    })
}

/// `γ(t) = exp(t (0 I; I 0))` sampled on `times`, with the kinetic energy `½‖γ′‖²`.
pub fn hyperbolic_trajectory(
    m: &GroupId,
    times: &[f64],
    spec: &QuadratureSpec,
) -> Result<Trajectory> {
    let split = m.split_partner();
    let n = m.n;
    let f = m.field;
    let w = Mat::from_blocks(
        &Mat::zeros(f, n, n),
        &Mat::identity(f, n),
        &Mat::identity(f, n),
        &Mat::zeros(f, n, n),
    );
    let points = times
        .iter()
        .map(|&t| {
            let g = action::hyperbolic_element(split, t);
            let v = &w * g.matrix();
            let energy = 0.5 * metric::inner(&g, &v, &v, spec)?.value;
            let membership_residual = groups::is_member(&split, g.matrix())?;
            Ok(TrajectoryPoint {
                t,
                g: g.into_matrix(),
                energy,
                membership_residual,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Trajectory {
        group: split,
        points,
        stopped: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleAgreement {
    pub group: GroupId,
    pub trials: usize,
    pub max_difference: f64,
}

/// `max ‖act(g, u) − act_on_graph(g, u)‖_max` on random pairs.
pub fn oracle_agreement(group: &GroupId, trials: usize, seed: u64) -> Result<OracleAgreement> {
    let mut r = rng(seed);
    let m = group.compact_part();
    let mut max_difference = 0.0f64;
    for _ in 0..trials {
        let g = MobiusElement::new(*group, groups::random_split_element(group, 1.0, &mut r)?)?;
        let u = groups::haar_sample(&m, &mut r)?;
        let d = (&action::act(&g, &u)? - &action::act_on_graph(&g, &u)?).norm_max();
        max_difference = max_difference.max(d);
    }
    Ok(OracleAgreement {
        group: *group,
        trials,
        max_difference,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectRow {
    pub label: String,
    pub xi: [f64; 3],
    pub eta: [f64; 3],
    pub defect: f64,
    pub stopped: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Corollary7 {
    pub spec: DefectSpec,
    /// Part (a): distance from `Sp₁ × Sp₁` along geodesics tangent to it.
    pub sp11: Vec<DefectRow>,
    /// Part (b), `Z = L_ξ` or `Z = R_η`.
    pub single: Vec<DefectRow>,
    /// Part (b), `Z = L_ξ + R_η` with both nonzero.
    pub mixed: Vec<DefectRow>,
    /// Largest single-factor defect.
    pub noise_floor: f64,
}

fn unit3(r: &mut ChaCha8Rng) -> [f64; 3] {
    let v: [f64; 3] = [
        StandardNormal.sample(r),
        StandardNormal.sample(r),
        StandardNormal.sample(r),
    ];
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn imag(v: [f64; 3]) -> Quat {
    Quat::new(0.0, v[0], v[1], v[2])
}

pub fn corollary7(spec: &DefectSpec, mixed: usize, seed: u64) -> Result<Corollary7> {
    let mut r = rng(seed);
    let row = |label: String, xi: [f64; 3], eta: [f64; 3], z: &Mat| -> Result<DefectRow> {
        let d = lowdim::corollary7_defect(z, spec)?;
        Ok(DefectRow {
            label,
            xi,
            eta,
            defect: d.defect,
            stopped: d.stopped,
        })
    };
    let zero = [0.0; 3];
    let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

    let mut sp11 = Vec::new();
    let mut k_cases = vec![
        ("diag(i, i)".to_string(), axes[0], axes[0]),
        ("diag(i, 0)".to_string(), axes[0], zero),
    ];
    k_cases.push(("random".to_string(), unit3(&mut r), unit3(&mut r)));
    for (label, a, b) in k_cases {
        let z = Mat::diag(Field::Quaternion, &[imag(a), imag(b)]);
        sp11.push(row(label, a, b, &z)?);
    }

    let mut single = Vec::new();
    for (k, name) in ["i", "j", "k"].iter().enumerate() {
        single.push(row(
            format!("L_{name}"),
            axes[k],
            zero,
            &lowdim::o4_element(axes[k], zero),
        )?);
        single.push(row(
            format!("R_{name}"),
            zero,
            axes[k],
            &lowdim::o4_element(zero, axes[k]),
        )?);
    }
    let noise_floor = single.iter().map(|d| d.defect).fold(0.0, f64::max);

    let mut mixed_rows = Vec::new();
    for k in 0..mixed {
        let (xi, eta) = (unit3(&mut r), unit3(&mut r));
        mixed_rows.push(row(
            format!("mixed-{k}"),
            xi,
            eta,
            &lowdim::o4_element(xi, eta),
        )?);
    }
    Ok(Corollary7 {
        spec: *spec,
        sp11,
        single,
        mixed: mixed_rows,
        noise_floor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_norm_of_unitary_is_one() {
        let m: GroupId = "U(2)".parse().unwrap();
        let q = groups::haar_sample(&m, &mut rng(1)).unwrap();
        assert!((spectral_norm(&q) - 1.0).abs() < 1e-12);
        let d = Mat::diag(Field::Complex, &[Quat::complex(0.0, 3.0), Quat::real(1.0)]);
        assert!((spectral_norm(&d) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn compact_directions_are_k_tangent() {
        let mut r = rng(2);
        for name in ["SU(2,2)", "O0(3,3)", "Sp(1,1)"] {
            let g: GroupId = name.parse().unwrap();
            let x = compact_direction(&g.compact_part(), &mut r);
            let z = Mat::block_diag(&[&x, &zeros(&g.compact_part())]);
            assert!(groups::lie_residual(&g, &z).unwrap() < 1e-12, "{name}");
        }
    }

    #[test]
    fn slope_is_minus_half_for_u1() {
        let m: GroupId = "U(1)".parse().unwrap();
        let s = incompleteness_slope(&m, 0.9, 0.999, 10, &QuadratureSpec::torus(0)).unwrap();
        assert!((s + 0.5).abs() < 1e-9, "{s}");
    }

    #[test]
    fn fixed_point_of_o33() {
        let f = fixed_point(&"O0(3,3)".parse().unwrap()).unwrap();
        assert_eq!(f.dimension, 1);
        assert!(f.distance_to_swap.unwrap() < 1e-10);
    }
}
