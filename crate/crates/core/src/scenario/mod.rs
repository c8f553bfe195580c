//! Scenario runner behind the `afl` binary.
//!
//! A scenario evaluates one model at one preparation angle on a uniform time
//! grid with the closed-form engine, the oracle, or both, and gates the
//! result on the invariant checks. Output is a CSV of the Schmidt-weight
//! series plus a JSON sidecar; both are byte-stable for identical input.

mod bundled;
mod config;
mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use bundled::{bundled, bundled_scenarios, BundledScenario};
pub use config::{parse_real, Engines, OracleOptions, OutputOptions, ScenarioConfig, Tolerances};
pub use verify::{verify_all, Profile, VerifySummary};

use crate::channels::{ChannelModel, ModelKind};
use crate::error::Result;
use crate::invariants::{
    conservation_residual, coordinate_conservation_residual, coordinate_restriction_residuals,
    signed_conservation_residual, Branch,
};
use crate::oracle::{flat_mode_grid, recurrence_time, se_validity_window, Oracle, OracleSample, FRAME_CONVENTION};
use crate::schmidt::{
    closed_form_partner_coordinate, closed_form_partner_weight, closed_form_qubit_coordinate, closed_form_qubit_weight,
    moon_coordinate, moon_weight, snapshot_weight, BipartitionCut, FlowCoordinate,
};

/// One pass/fail (or informational) line of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max: f64,
    /// `None` for informational entries, which always pass.
    pub threshold: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn gate(name: impl Into<String>, max: f64, threshold: f64) -> Self {
        Self { name: name.into(), max, threshold: Some(threshold), pass: max <= threshold }
    }

    pub fn info(name: impl Into<String>, max: f64) -> Self {
        Self { name: name.into(), max, threshold: None, pass: true }
    }

    pub fn into_info(self) -> Self {
        Self { threshold: None, pass: true, ..self }
    }
}

/// Schmidt weights of one engine.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EngineColumns {
    pub k_qubit: Vec<f64>,
    pub k_partner: Vec<f64>,
}

/// Closed-form square-root coordinates `√(2/K − 1)`, kept alongside the
/// weights because `K` itself saturates at 2 in double precision.
#[derive(Clone, Debug, Default, PartialEq)]
struct Coordinates {
    qubit: Vec<f64>,
    partner: Vec<f64>,
}

/// Trajectory data written to CSV. Columns of disabled engines are absent.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KSeries {
    pub times: Vec<f64>,
    pub p: Vec<f64>,
    pub k_moon: Vec<f64>,
    pub closed: Option<EngineColumns>,
    pub oracle: Option<EngineColumns>,
    /// Only on the Moon-dominant branch.
    pub res_conservation: Option<Vec<f64>>,
    pub res_signed: Vec<f64>,
}

impl KSeries {
    pub fn columns(&self) -> Vec<(&'static str, &[f64])> {
        let mut cols: Vec<(&'static str, &[f64])> = vec![("time", &self.times), ("p", &self.p)];
        if let Some(c) = &self.closed {
            cols.push(("K_A_closed", &c.k_qubit));
            cols.push(("K_a_closed", &c.k_partner));
        }
        cols.push(("K_M", &self.k_moon));
        if let Some(o) = &self.oracle {
            cols.push(("K_A_oracle", &o.k_qubit));
            cols.push(("K_a_oracle", &o.k_partner));
        }
        if let Some(r) = &self.res_conservation {
            cols.push(("res_conservation", r));
        }
        cols.push(("res_signed", &self.res_signed));
        cols
    }

    /// CSV with 17 significant digits per value and `\n` line endings.
    pub fn to_csv(&self) -> String {
        let cols = self.columns();
        let mut out = String::new();
        let header: Vec<&str> = cols.iter().map(|(name, _)| *name).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in 0..self.times.len() {
            for (i, (_, values)) in cols.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{:.16e}", values[row]).expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridMetadata {
    pub n_modes: usize,
    pub bandwidth: f64,
    pub spacing: f64,
    pub coupling: f64,
    pub recurrence_time: f64,
    pub validity_window: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleMetadata {
    pub frame: &'static str,
    pub hamiltonian_dim: usize,
    pub grid: Option<GridMetadata>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EngineMetadata {
    pub closed_form: bool,
    pub oracle: Option<OracleMetadata>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxResiduals {
    pub conservation: Option<f64>,
    pub signed: f64,
}

/// Everything produced by [`run_scenario`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioRun {
    pub config: ScenarioConfig,
    pub series: KSeries,
    pub checks: Vec<Check>,
    pub engines: EngineMetadata,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    scenario: &'a str,
    config: &'a ScenarioConfig,
    branch: Branch,
    k_moon: f64,
    engines: &'a EngineMetadata,
    max_residuals: MaxResiduals,
    checks: &'a [Check],
    pass: bool,
}

impl ScenarioRun {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn max_residuals(&self) -> MaxResiduals {
        MaxResiduals {
            conservation: self.series.res_conservation.as_deref().map(max_of),
            signed: max_of(&self.series.res_signed),
        }
    }

    pub fn sidecar_json(&self) -> String {
        let sidecar = Sidecar {
            scenario: &self.config.name,
            config: &self.config,
            branch: self.config.angle().branch(),
            k_moon: moon_weight(self.config.angle()),
            engines: &self.engines,
            max_residuals: self.max_residuals(),
            checks: &self.checks,
            pass: self.pass(),
        };
        let mut json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
        json.push('\n');
        json
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let stem = self.config.output.stem.clone().unwrap_or_else(|| self.config.name.clone());
        let csv = dir.join(format!("{stem}.csv"));
        let json = dir.join(format!("{stem}.json"));
        std::fs::write(&csv, self.series.to_csv())?;
        std::fs::write(&json, self.sidecar_json())?;
        Ok((csv, json))
    }
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, |acc, v| if v.is_nan() || v > acc { v } else { acc })
}

/// The model the oracle diagonalizes; spontaneous emission gets a flat grid.
fn oracle_model(config: &ScenarioConfig) -> Result<(ChannelModel, Option<GridMetadata>)> {
    match &config.model {
        ChannelModel::SpontaneousEmission { gamma, omega_a, .. } => {
            let n_modes = config.oracle.n_modes;
            let bandwidth = config.oracle.bandwidth.unwrap_or(40.0 * gamma);
            let grid = flat_mode_grid(n_modes, bandwidth, *gamma, *omega_a)?;
            let meta = GridMetadata {
                n_modes,
                bandwidth,
                spacing: bandwidth / n_modes as f64,
                coupling: grid.couplings()[0],
                recurrence_time: recurrence_time(n_modes, bandwidth),
                validity_window: se_validity_window(n_modes, bandwidth, *gamma),
            };
            let model = ChannelModel::spontaneous_emission(*gamma, *omega_a, Some(grid))?;
            Ok((model, Some(meta)))
        }
        other => Ok((other.clone(), None)),
    }
}

struct OracleTrack {
    samples: Vec<OracleSample>,
    window: f64,
    meta: OracleMetadata,
}

/// Evaluates the configured engines and invariant checks.
#[allow(clippy::needless_range_loop)]
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioRun> {
    let theta = config.angle();
    let branch = theta.branch();
    let times = config.times();
    let k_m = moon_weight(theta);
    let tol = &config.tolerances;
    let mut checks = Vec::new();

    let mut closed_p = Vec::new();
    let closed = if config.engines.closed_form {
        let channel = config.model.prepare()?;
        let mut cols = EngineColumns::default();
        let mut coords = Coordinates::default();
        let mut snapshot_gap = 0.0_f64;
        let mut restriction = 0.0_f64;
        for &t in &times {
            let p = channel.flow(t)?;
            let k_qubit = closed_form_qubit_weight(p, theta);
            let k_partner = closed_form_partner_weight(p, theta);
            let snap = channel.snapshot(theta, t)?;
            for (cut, expected) in [
                (BipartitionCut::QubitVsRest, k_qubit),
                (BipartitionCut::PartnerVsRest, k_partner),
                (BipartitionCut::MoonVsRest, k_m),
            ] {
                snapshot_gap = snapshot_gap.max((snapshot_weight(&snap, cut)? - expected).abs());
            }
            let y_qubit = closed_form_qubit_coordinate(p, theta);
            let y_partner = closed_form_partner_coordinate(p, theta);
            if branch == Branch::MoonDominant {
                let (a, b) = coordinate_restriction_residuals(p, theta, y_qubit, y_partner)?;
                restriction = restriction.max(a).max(b);
            }
            coords.qubit.push(y_qubit);
            coords.partner.push(y_partner);
            closed_p.push(p.value());
            cols.k_qubit.push(k_qubit);
            cols.k_partner.push(k_partner);
        }
        checks.push(Check::gate("closed_form.snapshot_agreement", snapshot_gap, tol.agreement));
        if branch == Branch::MoonDominant {
            checks.push(Check::gate("closed_form.restriction", restriction, tol.closed_form));
        }
        Some((cols, coords))
    } else {
        None
    };
    let (closed, coords) = match closed {
        Some((cols, coords)) => (Some(cols), Some(coords)),
        None => (None, None),
    };
    let y_moon = moon_coordinate(theta);

    let oracle = if config.engines.oracle {
        let (model, grid) = oracle_model(config)?;
        let engine = Oracle::new(&model)?;
        let samples = times.iter().map(|&t| engine.sample(theta, t)).collect::<Result<Vec<_>>>()?;
        let window = grid.as_ref().map_or(f64::INFINITY, |g| g.validity_window);
        let meta = OracleMetadata { frame: FRAME_CONVENTION, hamiltonian_dim: engine.hamiltonian().dim(), grid };
        Some(OracleTrack { samples, window, meta })
    } else {
        None
    };

    let discretized = config.model.kind() == ModelKind::SpontaneousEmission;
    if let Some(track) = &oracle {
        let in_window: Vec<&OracleSample> = track.samples.iter().filter(|s| s.time <= track.window).collect();
        checks.push(Check::gate(
            "oracle.norm_drift",
            max_of(&track.samples.iter().map(|s| s.norm_drift).collect::<Vec<_>>()),
            tol.norm,
        ));
        checks.push(Check::gate(
            "oracle.rank",
            max_of(&track.samples.iter().map(|s| s.max_third_eigenvalue).collect::<Vec<_>>()),
            tol.rank,
        ));
        checks.push(Check::gate(
            "oracle.moon_constancy",
            max_of(&track.samples.iter().map(|s| (s.k_moon - k_m).abs()).collect::<Vec<_>>()),
            tol.moon,
        ));
        let mut signed = Vec::new();
        for s in &track.samples {
            signed.push(signed_conservation_residual(FlowCoordinate::new(s.p)?, theta));
        }
        checks.push(Check::gate("oracle.signed", max_of(&signed), tol.signed));
        if branch == Branch::MoonDominant {
            let mut cons = Vec::new();
            for s in &in_window {
                cons.push(conservation_residual(s.k_qubit, s.k_partner, s.k_moon, branch)?);
            }
            let threshold = if discretized { tol.se_discretized } else { tol.oracle };
            checks.push(Check::gate("oracle.conservation", max_of(&cons), threshold));
        }
        if let ChannelModel::SpontaneousEmission { gamma, .. } = &config.model {
            let rel: Vec<f64> = in_window
                .iter()
                .map(|s| {
                    let exact = (-gamma * s.time).exp();
                    (s.p - exact).abs() / exact
                })
                .collect();
            checks.push(Check::info("oracle.population_relative_error", max_of(&rel)));
        }
        if let Some(cols) = &closed {
            let threshold = if discretized { tol.se_discretized } else { tol.agreement };
            let gap = |engine: &[f64], pick: fn(&OracleSample) -> f64| {
                let diffs: Vec<f64> = track
                    .samples
                    .iter()
                    .zip(engine)
                    .filter(|(s, _)| s.time <= track.window)
                    .map(|(s, k)| (pick(s) - k).abs())
                    .collect();
                max_of(&diffs)
            };
            checks.push(Check::gate("agreement.qubit", gap(&cols.k_qubit, |s| s.k_qubit), threshold));
            checks.push(Check::gate("agreement.partner", gap(&cols.k_partner, |s| s.k_partner), threshold));
        }
    }

    let p = if closed.is_some() {
        closed_p.clone()
    } else {
        oracle.as_ref().map(|o| o.samples.iter().map(|s| s.p).collect()).unwrap_or_default()
    };

    let mut res_signed = Vec::with_capacity(times.len());
    let mut res_conservation = Vec::with_capacity(times.len());
    for i in 0..times.len() {
        let mut signed = 0.0_f64;
        let mut cons = 0.0_f64;
        if let Some(y) = &coords {
            signed = signed.max(signed_conservation_residual(FlowCoordinate::new(closed_p[i])?, theta));
            if branch == Branch::MoonDominant {
                cons = cons.max(coordinate_conservation_residual(y.qubit[i], y.partner[i], y_moon, branch)?);
            }
        }
        if let Some(track) = &oracle {
            let s = &track.samples[i];
            signed = signed.max(signed_conservation_residual(FlowCoordinate::new(s.p)?, theta));
            if branch == Branch::MoonDominant {
                cons = cons.max(conservation_residual(s.k_qubit, s.k_partner, s.k_moon, branch)?);
            }
        }
        res_signed.push(signed);
        res_conservation.push(cons);
    }

    if let (Some(cols), Some(y)) = (&closed, &coords) {
        let closed_signed: Vec<f64> = closed_p
            .iter()
            .map(|&p| FlowCoordinate::new(p).map(|p| signed_conservation_residual(p, theta)))
            .collect::<Result<_>>()?;
        checks.insert(0, Check::gate("closed_form.signed", max_of(&closed_signed), tol.signed));
        if branch == Branch::MoonDominant {
            let via_k: Vec<f64> = cols
                .k_qubit
                .iter()
                .zip(&cols.k_partner)
                .map(|(&a, &b)| conservation_residual(a, b, k_m, branch))
                .collect::<Result<_>>()?;
            let cons: Vec<f64> = y
                .qubit
                .iter()
                .zip(&y.partner)
                .map(|(&a, &b)| coordinate_conservation_residual(a, b, y_moon, branch))
                .collect::<Result<_>>()?;
            checks.insert(0, Check::info("closed_form.conservation_via_k", max_of(&via_k)));
            checks.insert(0, Check::gate("closed_form.conservation", max_of(&cons), tol.closed_form));
        }
    }

    let oracle_cols = oracle.as_ref().map(|track| EngineColumns {
        k_qubit: track.samples.iter().map(|s| s.k_qubit).collect(),
        k_partner: track.samples.iter().map(|s| s.k_partner).collect(),
    });
    let series = KSeries {
        k_moon: vec![k_m; times.len()],
        times,
        p,
        closed,
        oracle: oracle_cols,
        res_conservation: (branch == Branch::MoonDominant).then_some(res_conservation),
        res_signed,
    };
    let engines = EngineMetadata { closed_form: config.engines.closed_form, oracle: oracle.map(|track| track.meta) };
    Ok(ScenarioRun { config: config.clone(), series, checks, engines })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ScenarioConfig {
        ScenarioConfig::parse(text, "test").unwrap()
    }

    #[test]
    fn jc_both_engines_agree() {
        let cfg =
            config("model.kind = jc\nrun.theta = pi/4\nrun.t_max = 2pi\nrun.n_points = 401\nrun.engines = both\n");
        let run = run_scenario(&cfg).unwrap();
        assert!(run.pass(), "{:#?}", run.checks);
        let closed = run.series.closed.as_ref().unwrap();
        assert!((closed.k_qubit[0] - 2.0).abs() < 1e-12);
        assert!((closed.k_qubit[100] - 1.0).abs() < 1e-12); // gt = π/2
        assert!((closed.k_qubit[200] - 2.0).abs() < 1e-12); // gt = π
    }

    #[test]
    fn theta_zero_starts_as_product_state() {
        for kind in ["se", "jc", "xy"] {
            let cfg = config(&format!(
                "model.kind = {kind}\nrun.theta = 0\nrun.t_max = 5\nrun.n_points = 21\nrun.engines = both\n"
            ));
            let run = run_scenario(&cfg).unwrap();
            if kind != "se" {
                assert!(run.pass(), "{:#?}", run.checks);
            }
            assert!(run.series.k_moon.iter().all(|&k| k == 1.0));
            for cols in [run.series.closed.as_ref().unwrap(), run.series.oracle.as_ref().unwrap()] {
                assert!((cols.k_qubit[0] - 1.0).abs() < 1e-12);
                assert!((cols.k_partner[0] - 1.0).abs() < 1e-12);
            }
            assert!(run.series.res_conservation.is_none());
        }
    }

    #[test]
    fn theta_half_pi_is_frozen() {
        for kind in ["se", "jc", "xy"] {
            let cfg = config(&format!("model.kind = {kind}\nrun.theta = pi/2\nrun.t_max = 5\nrun.n_points = 21\n"));
            let run = run_scenario(&cfg).unwrap();
            assert!(run.pass());
            let closed = run.series.closed.as_ref().unwrap();
            for col in [&closed.k_qubit, &closed.k_partner, &run.series.k_moon] {
                assert!(col.iter().all(|&k| (k - 1.0).abs() < 1e-15));
            }
        }
    }

    #[test]
    fn csv_layout() {
        let cfg = config(
            "model.kind = xy\nmodel.n = 4\nrun.theta = pi/3\nrun.t_max = 3\nrun.n_points = 4\nrun.engines = both\n",
        );
        let csv = run_scenario(&cfg).unwrap().series.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "time,p,K_A_closed,K_a_closed,K_M,K_A_oracle,K_a_oracle,res_conservation,res_signed"
        );
        assert_eq!(lines.count(), 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("0.0000000000000000e0,"));

        let cfg = config("model.kind = jc\nrun.theta = 0.3\nrun.t_max = 1\nrun.n_points = 2\nrun.engines = oracle\n");
        let csv = run_scenario(&cfg).unwrap().series.to_csv();
        assert_eq!(csv.lines().next().unwrap(), "time,p,K_M,K_A_oracle,K_a_oracle,res_signed");
    }

    #[test]
    fn sidecar_reports_grid() {
        let cfg = config("model.kind = se\nrun.theta = pi/3\nrun.t_max = 2\nrun.n_points = 5\nrun.engines = oracle\noracle.n_modes = 100\n");
        let run = run_scenario(&cfg).unwrap();
        let json: serde_json::Value = serde_json::from_str(&run.sidecar_json()).unwrap();
        let grid = &json["engines"]["oracle"]["grid"];
        assert_eq!(grid["n_modes"], 100);
        assert_eq!(grid["bandwidth"], 40.0);
        assert_eq!(json["engines"]["oracle"]["frame"], FRAME_CONVENTION);
        assert_eq!(json["branch"], "MoonDominant");
        assert!(json["checks"].as_array().unwrap().iter().any(|c| c["name"] == "oracle.conservation"));
    }

    #[test]
    fn breached_threshold_fails_the_run() {
        let cfg = config("model.kind = jc\nrun.theta = pi/3\nrun.t_max = 3\nrun.n_points = 50\nrun.engines = both\ntol.agreement = 1e-300\n");
        let run = run_scenario(&cfg).unwrap();
        assert!(!run.pass());
    }
}
