//! One-shot invariant sweeps over a fixed (model, θ, t) lattice.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, LN_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::config::{Engines, OracleOptions, OutputOptions, ScenarioConfig, Tolerances};
use super::{run_scenario, Check};
use crate::channels::{xy_amplitudes, xy_ce_reference_n10, xy_eigensystem, ChannelModel};
use crate::error::{Error, Result};
use crate::invariants::complementarity_check;
use crate::schmidt::{
    closed_form_partner_weight, closed_form_qubit_weight, moon_weight, FlowCoordinate, PreparationAngle,
};

const THETAS: [f64; 7] = [0.0, FRAC_PI_8, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, 2.0 * PI / 5.0, FRAC_PI_2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Strict,
    Oracle,
    SeDiscretized,
}

impl Profile {
    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Strict => "strict",
            Profile::Oracle => "oracle",
            Profile::SeDiscretized => "se-discretized",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Profile::Strict),
            "oracle" => Ok(Profile::Oracle),
            "se-discretized" | "se_discretized" => Ok(Profile::SeDiscretized),
            other => {
                Err(Error::config(format!("unknown profile `{other}` (expected strict, oracle or se-discretized)")))
            }
        }
    }
}

/// Machine-readable result of [`verify_all`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifySummary {
    pub profile: Profile,
    pub runs: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Default)]
struct Collector {
    runs: usize,
    checks: Vec<Check>,
}

impl Collector {
    /// Folds checks of the same name into their worst case.
    fn add(&mut self, check: Check) {
        match self.checks.iter_mut().find(|c| c.name == check.name) {
            Some(existing) => {
                if check.max.is_nan() || check.max > existing.max {
                    existing.max = check.max;
                }
                existing.pass &= check.pass;
            }
            None => self.checks.push(check),
        }
    }

    fn run(&mut self, config: &ScenarioConfig, informational: &[&str]) -> Result<()> {
        let run = run_scenario(config)?;
        self.runs += 1;
        for check in run.checks {
            if informational.contains(&check.name.as_str()) {
                self.add(check.into_info());
            } else {
                self.add(check);
            }
        }
        Ok(())
    }
}

fn lattice_config(model: ChannelModel, theta: f64, t_max: f64, n_points: usize, engines: Engines) -> ScenarioConfig {
    ScenarioConfig {
        name: format!("verify-{}", model.kind().as_str()),
        model,
        theta,
        t_max,
        n_points,
        engines,
        oracle: OracleOptions::default(),
        output: OutputOptions::default(),
        tolerances: Tolerances::default(),
    }
}

fn exact_models() -> Result<Vec<(ChannelModel, f64)>> {
    Ok(vec![
        (ChannelModel::jaynes_cummings(1.0, 0.0)?, 2.0 * PI),
        (ChannelModel::xy_chain(1, 1.0)?, 50.0),
        (ChannelModel::xy_chain(4, 1.0)?, 50.0),
        (ChannelModel::xy_chain(10, 1.0)?, 50.0),
    ])
}

/// Runs the invariant suite for `profile`.
pub fn verify_all(profile: Profile) -> Result<VerifySummary> {
    let mut out = Collector::default();
    match profile {
        Profile::Strict => {
            let closed = Engines { closed_form: true, oracle: false };
            let mut models = vec![(ChannelModel::spontaneous_emission(1.0, 0.0, None)?, 10.0)];
            models.extend(exact_models()?);
            for (model, t_max) in &models {
                for &theta in &THETAS {
                    out.run(&lattice_config(model.clone(), theta, *t_max, 201, closed), &[])?;
                }
            }
            for check in analytic_checks()? {
                out.add(check);
            }
        }
        Profile::Oracle => {
            for (model, t_max) in exact_models()? {
                for &theta in &THETAS {
                    out.run(&lattice_config(model.clone(), theta, t_max, 200, Engines::BOTH), &[])?;
                }
            }
        }
        Profile::SeDiscretized => {
            // Weight deviations from the continuum are reported, not gated.
            let model = ChannelModel::spontaneous_emission(1.0, 0.0, None)?;
            for &theta in &THETAS {
                let config = lattice_config(model.clone(), theta, 5.0, 101, Engines::BOTH);
                out.run(&config, &["agreement.qubit", "agreement.partner"])?;
            }
        }
    }
    let pass = out.checks.iter().all(|c| c.pass);
    Ok(VerifySummary { profile, runs: out.runs, checks: out.checks, pass })
}

/// Endpoint, crossing, golden-sum and range checks on the closed forms.
fn analytic_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let weights = |p: f64, theta: PreparationAngle| -> Result<(f64, f64)> {
        let p = FlowCoordinate::new(p)?;
        Ok((closed_form_qubit_weight(p, theta), closed_form_partner_weight(p, theta)))
    };

    let mut transfer = 0.0_f64;
    let mut asymptote = 0.0_f64;
    let mut se_cross = 0.0_f64;
    let mut jc_cross = 0.0_f64;
    let mut range = 0.0_f64;
    let mut violations = 0usize;
    for &theta in &THETAS {
        let angle = PreparationAngle::new(theta)?;
        let k_m = moon_weight(angle);
        let jc = ChannelModel::jaynes_cummings(1.0, 0.0)?.prepare()?;
        let se = ChannelModel::spontaneous_emission(1.0, 0.0, None)?.prepare()?;

        let (k_qubit_0, _) = weights(jc.flow(0.0)?.value(), angle)?;
        let (_, k_partner_half) = weights(jc.flow(FRAC_PI_2)?.value(), angle)?;
        transfer = transfer.max((k_partner_half - k_m).abs()).max((k_qubit_0 - k_m).abs());

        let (_, k_partner_late) = weights(se.flow(30.0)?.value(), angle)?;
        asymptote = asymptote.max((k_partner_late - k_m).abs());

        let (a, b) = weights(se.flow(LN_2)?.value(), angle)?;
        se_cross = se_cross.max((a - b).abs());
        let (a, b) = weights(jc.flow(FRAC_PI_4)?.value(), angle)?;
        jc_cross = jc_cross.max((a - b).abs());

        let times: Vec<f64> = (0..=400).map(|i| 10.0 * i as f64 / 400.0).collect();
        let mut k_qubit = Vec::new();
        let mut k_partner = Vec::new();
        for &t in &times {
            let (a, b) = weights(se.flow(t)?.value(), angle)?;
            range = range.max(1.0 - a.min(b)).max(a.max(b) - 2.0);
            k_qubit.push(a);
            k_partner.push(b);
        }
        if angle.moon_dominant() {
            violations += complementarity_check(&times, &k_qubit, &k_partner, angle.branch())?.violations;
        }
    }
    checks.push(Check::gate("analytic.jc_transfer_endpoint", transfer, 1e-10));
    checks.push(Check::gate("analytic.se_asymptote", asymptote, 1e-6));
    checks.push(Check::gate("analytic.se_crossing", se_cross, 1e-9));
    checks.push(Check::gate("analytic.jc_crossing", jc_cross, 1e-10));
    checks.push(Check::gate("analytic.weight_range", range.max(0.0), 1e-12));
    checks.push(Check::info("analytic.complementarity_violations", violations as f64));

    let sys = xy_eigensystem(10, 1.0)?;
    let mut golden = 0.0_f64;
    let mut imaginary = 0.0_f64;
    for i in 0..1000 {
        let t = 200.0 * i as f64 / 999.0;
        let (c_e, _) = xy_amplitudes(&sys, t)?;
        golden = golden.max((c_e.re - xy_ce_reference_n10(1.0, t)).abs());
        imaginary = imaginary.max(c_e.im.abs());
    }
    checks.push(Check::gate("analytic.xy_n10_golden", golden, 1e-9));
    checks.push(Check::gate("analytic.xy_n10_imaginary", imaginary, 1e-9));
    Ok(checks)
}
