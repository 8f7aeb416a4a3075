//! The twelve acceptance criteria, each with fixed parameters and seed.

use std::time::Instant;

use mobius_core::groups::Embedding;
use mobius_core::lowdim::{self, DefectSpec, Diagram};
use mobius_core::{GroupId, QuadratureSpec, Result};
use serde::Serialize;

use crate::config::IntegratorSpec;
use crate::experiments as ex;

pub const SEED: u64 = 20_240_601;

/// Split groups at desk scale.
pub const DESK_GROUPS: [&str; 5] = ["O0(3,3)", "O0(4,4)", "SU(1,1)", "SU(2,2)", "Sp(1,1)"];

/// Desk groups whose compact factor has nonzero `diag(X, 0)` directions.
/// `SU(1,1)` is excluded: `(X, 0)` with `X ∈ u₁` is tangent only for `X = 0`.
pub const K_DIRECTION_GROUPS: [&str; 4] = ["O0(3,3)", "O0(4,4)", "SU(2,2)", "Sp(1,1)"];

/// Criteria that fail at the stated tolerance for reasons outside the
/// implementation. Criterion 9: the `det(q + I)` filter admits `q` with an
/// eigenvalue within `0.01` of `−1`, for which `‖γ(5)∗q − I‖₂ > 0.02`.
pub const KNOWN_UNATTAINED: [usize; 1] = [9];

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub summary: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {} ({:.1}s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.summary,
            self.seconds
        )
    }
}

type Check = fn() -> Result<(bool, String)>;

pub const CRITERIA: [(&str, Check); 12] = [
    ("su11-closed-form", closed_form),
    ("finite-length", finite_length),
    ("incompleteness-exponent", incompleteness_exponent),
    ("kxk-isometries", kxk_isometries),
    ("bi-invariance", bi_invariance),
    ("rigid-geodesics", rigid_geodesics),
    ("totally-geodesic", totally_geodesic),
    ("fixed-point-algebra", fixed_point_algebra),
    ("mass-concentration", mass_concentration),
    ("lowdim-diagrams", lowdim_diagrams),
    ("corollary7-separation", corollary7_separation),
    ("oracle-equivalence", oracle_equivalence),
];

/// Runs criterion `id` (1-based). Errors count as failures.
pub fn run_one(id: usize) -> Outcome {
    let (name, f) = CRITERIA[id - 1];
    let start = Instant::now();
    let (pass, summary) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome {
        id,
        name,
        pass,
        summary,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all(mut on_done: impl FnMut(&Outcome)) -> Vec<Outcome> {
    (1..=CRITERIA.len())
        .map(|id| {
            let o = run_one(id);
            on_done(&o);
            o
        })
        .collect()
}

fn g(name: &str) -> GroupId {
    name.parse().expect("static group name")
}

fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

fn closed_form() -> Result<(bool, String)> {
    let u1 = g("U(1)");
    let ss = [0.0, 0.3, 0.6, 0.9];
    let torus = ex::sigma_speeds(&u1, &ss, &QuadratureSpec::torus(64))?;
    let mc = ex::sigma_speeds(&u1, &ss, &QuadratureSpec::monte_carlo(1_000_000, SEED))?;
    let worst = |rows: &[ex::SpeedRow]| rows.iter().filter_map(|r| r.rel_error).fold(0.0, f64::max);
    let (t, m) = (worst(&torus), worst(&mc));
    Ok((
        t < 1e-6 && m < 0.01,
        format!(
            "torus rel err {} (<1e-6), MC rel err {} (<1e-2)",
            sci(t),
            sci(m)
        ),
    ))
}

fn finite_length() -> Result<(bool, String)> {
    let eps = [1e-1, 1e-2, 1e-3, 1e-4];
    let spec = QuadratureSpec::torus(64);
    let su = ex::finite_length(&g("U(1)"), &eps, &spec)?;
    let l = su.rows.last().map_or(0.0, |r| r.length);
    let e = su.limit_rel_error.unwrap_or(f64::INFINITY);
    let mut pass = e < 0.01;
    let mut summary = format!("SU(1,1) L={l:.4} rel err {} (<1e-2)", sci(e));
    for m in ["U(2)", "Sp(1)"] {
        let r = ex::finite_length(&g(m), &eps, &spec)?;
        pass &= r.last_increment_ratio < 0.05;
        summary.push_str(&format!(
            "; {m} increment {:.3} (<0.05)",
            r.last_increment_ratio
        ));
    }
    Ok((pass, summary))
}

fn incompleteness_exponent() -> Result<(bool, String)> {
    let s = ex::incompleteness_slope(&g("U(1)"), 0.9, 0.999, 50, &QuadratureSpec::torus(64))?;
    Ok((
        (s + 0.5).abs() <= 0.05,
        format!("slope {s:.6} (-0.5 +- 0.05)"),
    ))
}

fn kxk_isometries() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for name in DESK_GROUPS {
        worst = worst.max(ex::isometry_trials(&g(name), 1000, 64, SEED)?.max_residual);
    }
    Ok((
        worst < 1e-9,
        format!(
            "max residual {} over 5 groups x 1000 trials (<1e-9)",
            sci(worst)
        ),
    ))
}

fn bi_invariance() -> Result<(bool, String)> {
    let spec = QuadratureSpec::monte_carlo(10_000, SEED);
    let mut worst = 0.0f64;
    for name in K_DIRECTION_GROUPS {
        worst = worst.max(ex::bi_invariance(&g(name), 20, &spec, SEED)?.max_z_score);
    }
    Ok((
        worst <= 3.0,
        format!("max z-score {worst:.3} over 4 groups x 20 X (<=3)"),
    ))
}

fn rigid_geodesics() -> Result<(bool, String)> {
    let integ = IntegratorSpec::default();
    let mut worst = 0.0f64;
    for name in K_DIRECTION_GROUPS {
        let (runs, _) = ex::rigid_geodesics(&g(name), 5, 64, &integ, SEED)?;
        worst = runs.iter().map(|r| r.defect).fold(worst, f64::max);
    }
    Ok((
        worst < 1e-4,
        format!("max deviation {} over 4 groups x 5 X (<1e-4)", sci(worst)),
    ))
}

fn totally_geodesic() -> Result<(bool, String)> {
    let (runs, _) = ex::inclusion_geodesics(&Embedding::ALL, 64, &IntegratorSpec::default(), SEED)?;
    let worst = runs.iter().map(|r| r.defect).fold(0.0, f64::max);
    let each: Vec<String> = runs.iter().map(|r| sci(r.defect)).collect();
    Ok((
        worst < 1e-4,
        format!("relation residuals (a)-(e) [{}] (<1e-4)", each.join(", ")),
    ))
}

fn fixed_point_algebra() -> Result<(bool, String)> {
    let mut pass = true;
    let mut parts = vec![];
    for name in ["O0(3,3)", "O0(4,4)"] {
        let f = ex::fixed_point(&g(name))?;
        let d = f.distance_to_swap.unwrap_or(f64::INFINITY);
        pass &= f.dimension == 1 && d < 1e-10;
        parts.push(format!("{name} dim {} dist {}", f.dimension, sci(d)));
    }
    Ok((pass, parts.join("; ")))
}

fn mass_concentration() -> Result<(bool, String)> {
    let c = ex::mass_concentration(&g("U(2)"), &[5.0], 100, 1e-3, SEED)?;
    let d = c.max_distance[0];
    Ok((
        d < 0.02,
        format!(
            "max |gamma(5)*q - I|_2 = {d:.4} over {} admissible q (<0.02); worst q has min |lambda+1| = {:.4}",
            c.admissible, c.worst_gap_to_minus_one[0]
        ),
    ))
}

fn lowdim_diagrams() -> Result<(bool, String)> {
    let mut pass = true;
    let mut parts = vec![];
    for d in Diagram::ALL {
        let r = lowdim::diagram_check(d, 1000, SEED)?;
        pass &= r.max_residual < lowdim::DIAGRAM_TOL;
        let mut s = format!("{} {}", d.name(), sci(r.max_residual));
        if let Some(rf) = r.right_factor_residual {
            pass &= rf < lowdim::RIGHT_FACTOR_TOL;
            s.push_str(&format!(" (right factor {})", sci(rf)));
        }
        parts.push(s);
    }
    Ok((pass, parts.join("; ")))
}

fn corollary7_separation() -> Result<(bool, String)> {
    let spec = DefectSpec {
        samples: 256,
        seed: SEED,
        ..DefectSpec::default()
    };
    let r = ex::corollary7(&spec, 10, SEED)?;
    let single = r
        .single
        .iter()
        .chain(&r.sp11)
        .map(|d| d.defect)
        .fold(0.0, f64::max);
    let mixed = r
        .mixed
        .iter()
        .map(|d| d.defect)
        .fold(f64::INFINITY, f64::min);
    let pass = single < 1e-4 && mixed > 10.0 * r.noise_floor;
    Ok((
        pass,
        format!(
            "single max {} (<1e-4), mixed min {} (>10x floor {})",
            sci(single),
            sci(mixed),
            sci(r.noise_floor)
        ),
    ))
}

fn oracle_equivalence() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for name in DESK_GROUPS {
        worst = worst.max(ex::oracle_agreement(&g(name), 1000, SEED)?.max_difference);
    }
    Ok((
        worst < 1e-9,
        format!(
            "max difference {} over 5 groups x 1000 pairs (<1e-9)",
            sci(worst)
        ),
    ))
}
