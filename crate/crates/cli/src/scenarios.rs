//! The named scenarios behind `run`.

use std::path::{Path, PathBuf};

use mobius_core::groups::Embedding;
use mobius_core::lowdim::{self, DefectSpec, Diagram};
use mobius_core::{GroupId, QuadratureMode, QuadratureSpec, Trajectory};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{Config, ScenarioName};
use crate::error::{CliError, Result};
use crate::experiments as ex;
use crate::output;

/// Schema tag of the JSON report.
pub const REPORT_SCHEMA: &str = "mobius-report/1";
pub const REPORT_FILE: &str = "report.json";

/// A violated tolerance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub check: String,
    pub value: f64,
    /// `"<"` or `">"`.
    pub relation: &'static str,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub scenario: ScenarioName,
    pub theorem: &'static str,
    pub group: Option<String>,
    pub seed: u64,
    pub pass: bool,
    pub checks: usize,
    pub failures: Vec<Failure>,
    pub artifacts: Vec<String>,
    pub results: Value,
}

#[derive(Default)]
struct Checks {
    count: usize,
    failures: Vec<Failure>,
}

impl Checks {
    fn below(&mut self, check: impl Into<String>, value: f64, bound: f64) {
        self.count += 1;
        let ok = value < bound;
        if !ok {
            self.failures.push(Failure {
                check: check.into(),
                value,
                relation: "<",
                bound,
            });
        }
    }

    fn above(&mut self, check: impl Into<String>, value: f64, bound: f64) {
        self.count += 1;
        let ok = value > bound;
        if !ok {
            self.failures.push(Failure {
                check: check.into(),
                value,
                relation: ">",
                bound,
            });
        }
    }
}

struct Artifacts {
    dir: PathBuf,
    written: Vec<String>,
}

impl Artifacts {
    fn trajectory(&mut self, file: &str, label: &str, traj: &Trajectory) -> Result<()> {
        output::write_trajectory_csv(&self.dir.join(file), label, traj)?;
        self.written.push(file.to_string());
        Ok(())
    }
}

fn require_group(cfg: &Config) -> Result<GroupId> {
    cfg.group_id()?
        .ok_or_else(|| CliError::config("group", "this scenario needs a group"))
}

fn compact(g: GroupId) -> GroupId {
    g.compact_part()
}

fn split_group(cfg: &Config) -> Result<GroupId> {
    let g = require_group(cfg)?;
    if !g.is_split() {
        return Err(CliError::config(
            "group",
            format!("{g} is not a split group"),
        ));
    }
    Ok(g)
}

/// Runs the scenario, writes the report and CSV artifacts into `out`, and returns the report.
pub fn run(cfg: &Config, out: &Path) -> Result<Report> {
    let dir = output::ensure_dir(out)?;
    let mut art = Artifacts {
        dir,
        written: vec![],
    };
    let mut checks = Checks::default();
    let group = cfg.group_id()?;
    let results = match cfg.scenario {
        ScenarioName::FiniteLength => finite_length(cfg, &mut checks, &mut art)?,
        ScenarioName::MassConcentration => mass_concentration(cfg, &mut checks, &mut art)?,
        ScenarioName::TotallyGeodesic => totally_geodesic(cfg, &mut checks, &mut art)?,
        ScenarioName::IsometryKxK => isometry(cfg, &mut checks)?,
        ScenarioName::RigidGeodesic => rigid(cfg, &mut checks, &mut art)?,
        ScenarioName::FixedPointAlgebra => fixed_point(cfg, &mut checks)?,
        ScenarioName::LowdimDiagrams => diagrams(cfg, &mut checks)?,
        ScenarioName::Corollary7 => corollary7(cfg, &mut checks)?,
    };
    let mut artifacts = art.written;
    artifacts.push(REPORT_FILE.to_string());
    let report = Report {
        schema: REPORT_SCHEMA,
        scenario: cfg.scenario,
        theorem: cfg.scenario.theorem(),
        group: group.map(|g| g.to_string()),
        seed: cfg.seed,
        pass: checks.failures.is_empty(),
        checks: checks.count,
        failures: checks.failures,
        artifacts,
        results,
    };
    output::write_json(&art.dir.join(REPORT_FILE), &report)?;
    Ok(report)
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FiniteLengthParams {
    epsilons: Vec<f64>,
    /// Relative error against `π^{3/2}` for `SU(1,1)`.
    tolerance: f64,
    /// Bound on the last increment relative to the total, other groups.
    cauchy: f64,
    /// Points at which `‖σ′‖²` is tabulated.
    speed_points: Vec<f64>,
    /// Relative error of `‖σ′‖²` against `4π/(1−s²)`; defaults by quadrature mode.
    speed_tolerance: Option<f64>,
    /// Upper end and resolution of the CSV curve.
    curve_end: f64,
    curve_points: usize,
}

impl Default for FiniteLengthParams {
    fn default() -> Self {
        FiniteLengthParams {
            epsilons: vec![1e-1, 1e-2, 1e-3, 1e-4],
            tolerance: 0.01,
            cauchy: 0.05,
            speed_points: vec![0.0, 0.3, 0.6, 0.9],
            speed_tolerance: None,
            curve_end: 0.99,
            curve_points: 99,
        }
    }
}

fn finite_length(cfg: &Config, c: &mut Checks, art: &mut Artifacts) -> Result<Value> {
    let p: FiniteLengthParams = cfg.params()?;
    if p.epsilons.is_empty() || p.epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(CliError::config("params.epsilons", "need values in (0, 1)"));
    }
    if !(p.curve_end >= 0.0 && p.curve_end < 1.0) || p.curve_points == 0 {
        return Err(CliError::config(
            "params.curve_end",
            "need curve_end in [0, 1) and curve_points > 0",
        ));
    }
    let m = compact(require_group(cfg)?);
    let spec = cfg.quadrature_or(QuadratureSpec::torus(64));
    let speeds = ex::sigma_speeds(&m, &p.speed_points, &spec)?;
    let speed_tol = p.speed_tolerance.unwrap_or(match spec.mode {
        QuadratureMode::WeylTorus => 1e-6,
        QuadratureMode::MonteCarlo => 0.01,
    });
    for row in &speeds {
        if let Some(e) = row.rel_error {
            c.below(format!("speed_sq rel error at s={}", row.s), e, speed_tol);
        }
    }
    let lengths = ex::finite_length(&m, &p.epsilons, &spec)?;
    match lengths.limit_rel_error {
        Some(e) => c.below("length rel error against pi^(3/2)", e, p.tolerance),
        None => c.below(
            "last length increment / total",
            lengths.last_increment_ratio,
            p.cauchy,
        ),
    }
    let traj = ex::sigma_trajectory(&m, p.curve_end, p.curve_points, &spec)?;
    art.trajectory("sigma.csv", "sigma", &traj)?;
    Ok(json!({ "speeds": speeds, "lengths": lengths }))
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MassParams {
    times: Vec<f64>,
    count: usize,
    det_threshold: f64,
    /// Bound on `max_q ‖γ(t)∗q − I‖₂` at the last time.
    tolerance: f64,
    /// Haar samples for the energy column of the CSV.
    energy_samples: usize,
}

impl Default for MassParams {
    fn default() -> Self {
        MassParams {
            times: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            count: 100,
            det_threshold: 1e-3,
            tolerance: 0.02,
            energy_samples: 10_000,
        }
    }
}

fn mass_concentration(cfg: &Config, c: &mut Checks, art: &mut Artifacts) -> Result<Value> {
    let p: MassParams = cfg.params()?;
    if p.times.is_empty() {
        return Err(CliError::config("params.times", "must not be empty"));
    }
    let m = compact(require_group(cfg)?);
    let conc = ex::mass_concentration(&m, &p.times, p.count, p.det_threshold, cfg.seed)?;
    let last = *conc.max_distance.last().expect("nonempty");
    c.below(
        format!("max distance to I at t={}", p.times[p.times.len() - 1]),
        last,
        p.tolerance,
    );
    let spec = cfg.quadrature_or(QuadratureSpec::monte_carlo(p.energy_samples, cfg.seed));
    let traj = ex::hyperbolic_trajectory(&m, &p.times, &spec)?;
    art.trajectory("gamma.csv", "gamma", &traj)?;
    Ok(serde_json::to_value(conc)?)
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TotallyGeodesicParams {
    /// Labels `a`–`e` of the inclusions.
    embeddings: Vec<String>,
    samples: usize,
    tolerance: f64,
}

impl Default for TotallyGeodesicParams {
    fn default() -> Self {
        TotallyGeodesicParams {
            embeddings: Embedding::ALL
                .iter()
                .map(|e| e.label().to_string())
                .collect(),
            samples: 64,
            tolerance: 1e-4,
        }
    }
}

fn totally_geodesic(cfg: &Config, c: &mut Checks, art: &mut Artifacts) -> Result<Value> {
    let p: TotallyGeodesicParams = cfg.params()?;
    let embeddings = p
        .embeddings
        .iter()
        .map(|l| {
            Embedding::ALL
                .into_iter()
                .find(|e| e.label() == l)
                .ok_or_else(|| {
                    CliError::config("params.embeddings", format!("unknown inclusion `{l}`"))
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let (runs, trajs) = ex::inclusion_geodesics(&embeddings, p.samples, &cfg.integrator, cfg.seed)?;
    for (run, (e, traj)) in runs.iter().zip(embeddings.iter().zip(&trajs)) {
        c.below(
            format!("relation residual {}", run.label),
            run.defect,
            p.tolerance,
        );
        art.trajectory(
            &format!("inclusion_{}.csv", e.label()),
            &format!("inclusion-{}", e.label()),
            traj,
        )?;
    }
    Ok(json!({ "runs": runs }))
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct IsometryParams {
    trials: usize,
    samples: usize,
    tolerance: f64,
    /// Random `X` for the bi-invariance ratios.
    ratio_trials: usize,
    /// Bound on the z-score of the ratio spread.
    sigmas: f64,
}

impl Default for IsometryParams {
    fn default() -> Self {
        IsometryParams {
            trials: 1000,
            samples: 64,
            tolerance: 1e-9,
            ratio_trials: 20,
            sigmas: 3.0,
        }
    }
}

fn isometry(cfg: &Config, c: &mut Checks) -> Result<Value> {
    let p: IsometryParams = cfg.params()?;
    let g = split_group(cfg)?;
    let iso = ex::isometry_trials(&g, p.trials, p.samples, cfg.seed)?;
    c.below("isometry residual", iso.max_residual, p.tolerance);
    let spec = cfg.quadrature_or(QuadratureSpec::monte_carlo(10_000, cfg.seed));
    let bi = ex::bi_invariance(&g, p.ratio_trials, &spec, cfg.seed)?;
    c.below("bi-invariance z-score", bi.max_z_score, p.sigmas);
    Ok(json!({ "isometry": iso, "bi_invariance": bi }))
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RigidParams {
    trials: usize,
    samples: usize,
    tolerance: f64,
}

impl Default for RigidParams {
    fn default() -> Self {
        RigidParams {
            trials: 5,
            samples: 64,
            tolerance: 1e-4,
        }
    }
}

fn rigid(cfg: &Config, c: &mut Checks, art: &mut Artifacts) -> Result<Value> {
    let p: RigidParams = cfg.params()?;
    let g = split_group(cfg)?;
    let (runs, trajs) = ex::rigid_geodesics(&g, p.trials, p.samples, &cfg.integrator, cfg.seed)?;
    for (k, (run, traj)) in runs.iter().zip(&trajs).enumerate() {
        c.below(
            format!("deviation from exp, {}", run.label),
            run.defect,
            p.tolerance,
        );
        art.trajectory(&format!("rigid_{k}.csv"), &run.label, traj)?;
    }
    Ok(json!({ "runs": runs }))
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FixedPointParams {
    tolerance: f64,
}

impl Default for FixedPointParams {
    fn default() -> Self {
        FixedPointParams { tolerance: 1e-10 }
    }
}

fn fixed_point(cfg: &Config, c: &mut Checks) -> Result<Value> {
    let p: FixedPointParams = cfg.params()?;
    let f = ex::fixed_point(&split_group(cfg)?)?;
    c.below("|dim - 1|", (f.dimension as f64 - 1.0).abs(), 0.5);
    c.below(
        "distance to (0 I; I 0)",
        f.distance_to_swap.unwrap_or(f64::INFINITY),
        p.tolerance,
    );
    Ok(serde_json::to_value(f)?)
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct DiagramParams {
    samples: usize,
    tolerance: f64,
    right_factor_tolerance: f64,
}

impl Default for DiagramParams {
    fn default() -> Self {
        DiagramParams {
            samples: 1000,
            tolerance: lowdim::DIAGRAM_TOL,
            right_factor_tolerance: lowdim::RIGHT_FACTOR_TOL,
        }
    }
}

fn diagrams(cfg: &Config, c: &mut Checks) -> Result<Value> {
    let p: DiagramParams = cfg.params()?;
    let reports = Diagram::ALL
        .into_iter()
        .map(|d| lowdim::diagram_check(d, p.samples, cfg.seed))
        .collect::<mobius_core::Result<Vec<_>>>()?;
    for r in &reports {
        c.below(
            format!("{} diagram residual", r.diagram.name()),
            r.max_residual,
            p.tolerance,
        );
        if let Some(rf) = r.right_factor_residual {
            c.below(
                format!("{} right factor", r.diagram.name()),
                rf,
                p.right_factor_tolerance,
            );
        }
    }
    Ok(json!({ "diagrams": reports }))
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Corollary7Params {
    mixed: usize,
    samples: usize,
    tolerance: f64,
    /// Mixed defects must exceed this multiple of the single-factor floor.
    separation: f64,
}

impl Default for Corollary7Params {
    fn default() -> Self {
        Corollary7Params {
            mixed: 10,
            samples: 256,
            tolerance: 1e-4,
            separation: 10.0,
        }
    }
}

fn corollary7(cfg: &Config, c: &mut Checks) -> Result<Value> {
    let p: Corollary7Params = cfg.params()?;
    let spec = DefectSpec {
        samples: p.samples,
        seed: cfg.seed,
        t_total: cfg.integrator.t_total,
        dt: cfg.integrator.dt,
    };
    let r = ex::corollary7(&spec, p.mixed, cfg.seed)?;
    for d in r.sp11.iter().chain(&r.single) {
        c.below(format!("defect {}", d.label), d.defect, p.tolerance);
    }
    for d in &r.mixed {
        c.above(
            format!("defect {}", d.label),
            d.defect,
            p.separation * r.noise_floor,
        );
    }
    Ok(serde_json::to_value(r)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Config {
        Config::from_json(text).unwrap()
    }

    #[test]
    fn fixed_point_scenario_passes_and_is_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(r#"{"scenario": "fixed-point-algebra"}"#);
        let r = run(&c, dir.path()).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        let first = std::fs::read(dir.path().join(REPORT_FILE)).unwrap();
        run(&c, dir.path()).unwrap();
        assert_eq!(first, std::fs::read(dir.path().join(REPORT_FILE)).unwrap());
    }

    #[test]
    fn tolerance_failures_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(r#"{"scenario": "fixed-point-algebra", "params": {"tolerance": -1}}"#);
        let r = run(&c, dir.path()).unwrap();
        assert!(!r.pass);
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].relation, "<");
    }

    #[test]
    fn bad_params_name_the_key() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(r#"{"scenario": "rigid-geodesic", "params": {"trails": 3}}"#);
        match run(&c, dir.path()).unwrap_err() {
            CliError::Config { key, .. } => assert_eq!(key, "params.trails"),
            e => panic!("{e}"),
        }
        let c = cfg(r#"{"scenario": "rigid-geodesic", "group": "U(2)"}"#);
        assert!(matches!(run(&c, dir.path()), Err(CliError::Config { .. })));
    }

    #[test]
    fn finite_length_writes_the_curve() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(
            r#"{"scenario": "finite-length", "params": {"epsilons": [0.1, 0.01], "curve_points": 4}}"#,
        );
        let r = run(&c, dir.path()).unwrap();
        assert_eq!(r.artifacts, vec!["sigma.csv", REPORT_FILE]);
        let text = std::fs::read_to_string(dir.path().join("sigma.csv")).unwrap();
        assert_eq!(text.lines().count(), 2 + 5);
        assert!(text.starts_with("# mobius-trajectory v1 group=SU(1,1) curve=sigma"));
        // with ε = 0.01 the length is still about 0.1 short of π^{3/2}
        assert!(!r.pass);
        assert_eq!(r.failures.len(), 1);
    }
}
