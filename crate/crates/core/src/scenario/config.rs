//! Flat `key = value` scenario files.
//!
//! Keys are dotted (`model.kind`, `run.t_max`); an INI-style `[run]` header
//! prefixes the keys that follow it. `#` and `;` start comments. Real values
//! may be written as multiples of pi (`pi/4`, `2pi/5`, `3*pi`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::channels::ChannelModel;
use crate::error::{Error, Result};
use crate::schmidt::PreparationAngle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Engines {
    pub closed_form: bool,
    pub oracle: bool,
}

impl Engines {
    pub const BOTH: Engines = Engines { closed_form: true, oracle: true };

    pub fn parse(value: &str) -> Result<Self> {
        let mut engines = Engines { closed_form: false, oracle: false };
        for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "closed" | "closed_form" => engines.closed_form = true,
                "oracle" => engines.oracle = true,
                "both" => engines = Engines::BOTH,
                other => return Err(Error::config(format!("unknown engine `{other}`"))),
            }
        }
        if !engines.closed_form && !engines.oracle {
            return Err(Error::config("at least one engine must be selected"));
        }
        Ok(engines)
    }
}

/// Discretization of the spontaneous-emission reservoir for the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleOptions {
    pub n_modes: usize,
    /// Absolute bandwidth; defaults to 40 decay rates.
    pub bandwidth: Option<f64>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { n_modes: 400, bandwidth: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OutputOptions {
    pub dir: Option<PathBuf>,
    pub stem: Option<String>,
}

/// Pass/fail thresholds for a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Conservation and restriction residuals of the closed forms.
    pub closed_form: f64,
    /// Conservation residual of exact oracle trajectories.
    pub oracle: f64,
    /// Closed form vs oracle Schmidt weights for the exact models.
    pub agreement: f64,
    /// Oracle checks for the discretized reservoir inside its validity window.
    pub se_discretized: f64,
    pub signed: f64,
    /// Largest allowed third reduced-density eigenvalue.
    pub rank: f64,
    pub moon: f64,
    pub norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            closed_form: 1e-9,
            oracle: 1e-7,
            agreement: 1e-9,
            se_discretized: 2e-2,
            signed: 1e-10,
            rank: 1e-10,
            moon: 1e-9,
            norm: 1e-11,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub model: ChannelModel,
    pub theta: f64,
    pub t_max: f64,
    pub n_points: usize,
    pub engines: Engines,
    pub oracle: OracleOptions,
    pub output: OutputOptions,
    pub tolerances: Tolerances,
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let fallback = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
        Self::parse(&text, fallback)
    }

    /// Parses config text; `default_name` is used when no `name` key is given.
    pub fn parse(text: &str, default_name: &str) -> Result<Self> {
        let mut entries = parse_entries(text)?;
        let mut take = |key: &str| entries.remove(key);

        let name = take("name").unwrap_or_else(|| default_name.to_string());
        let kind = take("model.kind").ok_or_else(|| Error::config("missing key `model.kind`"))?;
        let model = match kind.as_str() {
            "spontaneous_emission" | "se" => ChannelModel::SpontaneousEmission {
                gamma: real_or(take("model.gamma"), "model.gamma", 1.0)?,
                omega_a: real_or(take("model.omega_a"), "model.omega_a", 0.0)?,
                mode_grid: None,
            },
            "jaynes_cummings" | "jc" => ChannelModel::JaynesCummings {
                g: real_or(take("model.g"), "model.g", 1.0)?,
                omega_a: real_or(take("model.omega_a"), "model.omega_a", 0.0)?,
            },
            "xy_chain" | "xy" => ChannelModel::XyChain {
                sites: integer_or(take("model.n"), "model.n", 10)?,
                hopping: real_or(take("model.j"), "model.j", 1.0)?,
            },
            other => return Err(Error::config(format!("unknown model kind `{other}`"))),
        };
        model.validate().map_err(|e| Error::config(e.to_string()))?;

        let theta_text = take("run.theta").ok_or_else(|| Error::config("missing key `run.theta`"))?;
        let theta = parse_real(&theta_text).ok_or_else(|| bad_value("run.theta", &theta_text))?;
        PreparationAngle::new(theta).map_err(|e| Error::config(e.to_string()))?;

        let t_max = real_or(take("run.t_max"), "run.t_max", f64::NAN)?;
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::config("`run.t_max` must be given and positive"));
        }
        let n_points = integer_or(take("run.n_points"), "run.n_points", 401)?;
        if n_points < 2 {
            return Err(Error::config("`run.n_points` must be at least 2"));
        }
        let engines = match take("run.engines") {
            Some(v) => Engines::parse(&v)?,
            None => Engines { closed_form: true, oracle: false },
        };

        let mut oracle = OracleOptions::default();
        if let Some(v) = take("oracle.n_modes") {
            oracle.n_modes = integer_or(Some(v), "oracle.n_modes", 0)?;
        }
        if let Some(v) = take("oracle.bandwidth") {
            oracle.bandwidth = Some(real_or(Some(v), "oracle.bandwidth", 0.0)?);
        }

        let output = OutputOptions { dir: take("output.dir").map(PathBuf::from), stem: take("output.stem") };

        let mut tolerances = Tolerances::default();
        for (key, slot) in [
            ("tol.closed_form", &mut tolerances.closed_form),
            ("tol.oracle", &mut tolerances.oracle),
            ("tol.agreement", &mut tolerances.agreement),
            ("tol.se_discretized", &mut tolerances.se_discretized),
            ("tol.signed", &mut tolerances.signed),
            ("tol.rank", &mut tolerances.rank),
            ("tol.moon", &mut tolerances.moon),
            ("tol.norm", &mut tolerances.norm),
        ] {
            if let Some(v) = take(key) {
                let tol = parse_real(&v).ok_or_else(|| bad_value(key, &v))?;
                if !(tol > 0.0) {
                    return Err(Error::config(format!("`{key}` must be positive")));
                }
                *slot = tol;
            }
        }

        if let Some(key) = entries.keys().next() {
            return Err(Error::config(format!("unknown key `{key}`")));
        }

        Ok(Self { name, model, theta, t_max, n_points, engines, oracle, output, tolerances })
    }

    pub fn angle(&self) -> PreparationAngle {
        PreparationAngle::new(self.theta).expect("validated at parse time")
    }

    /// Uniform grid `t_max · i / (n − 1)`.
    pub fn times(&self) -> Vec<f64> {
        let last = (self.n_points - 1) as f64;
        (0..self.n_points).map(|i| self.t_max * i as f64 / last).collect()
    }
}

fn parse_entries(text: &str) -> Result<BTreeMap<String, String>> {
    let mut entries = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let name = inner
                .strip_suffix(']')
                .ok_or_else(|| Error::config(format!("line {}: unterminated section header", lineno + 1)))?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::config(format!("line {}: empty key", lineno + 1)));
        }
        let full_key = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        if entries.insert(full_key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::config(format!("line {}: duplicate key `{full_key}`", lineno + 1)));
        }
    }
    Ok(entries)
}

fn bad_value(key: &str, value: &str) -> Error {
    Error::config(format!("`{key}` has invalid value `{value}`"))
}

fn real_or(value: Option<String>, key: &str, default: f64) -> Result<f64> {
    match value {
        None => Ok(default),
        Some(v) => parse_real(&v).ok_or_else(|| bad_value(key, &v)),
    }
}

fn integer_or(value: Option<String>, key: &str, default: usize) -> Result<usize> {
    match value {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| bad_value(key, &v)),
    }
}

/// A finite real, optionally of the form `[a][*]pi[/b]`.
pub fn parse_real(text: &str) -> Option<f64> {
    let text = text.trim();
    if let Ok(x) = text.parse::<f64>() {
        return x.is_finite().then_some(x);
    }
    let (numerator, denominator) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim().parse::<f64>().ok()?)),
        None => (text, None),
    };
    let coefficient = numerator.strip_suffix("pi")?.trim().trim_end_matches('*').trim();
    let coefficient = if coefficient.is_empty() { 1.0 } else { coefficient.parse::<f64>().ok()? };
    let value = coefficient * PI / denominator.unwrap_or(1.0);
    value.is_finite().then_some(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_expressions() {
        assert_eq!(parse_real("0.25"), Some(0.25));
        assert_eq!(parse_real("pi"), Some(PI));
        assert_eq!(parse_real("pi/4"), Some(PI / 4.0));
        assert_eq!(parse_real("2pi/5"), Some(2.0 * PI / 5.0));
        assert_eq!(parse_real("2 * pi"), Some(2.0 * PI));
        assert_eq!(parse_real("pie"), None);
        assert_eq!(parse_real("pi/0"), None);
        assert_eq!(parse_real("inf"), None);
    }

    #[test]
    fn parses_sections_and_dotted_keys() {
        let text = "\
name = demo   # trailing comment
model.kind = jc
model.g = 2
[run]
theta = pi/4
t_max = 2pi
n_points = 11
engines = both
";
        let cfg = ScenarioConfig::parse(text, "fallback").unwrap();
        assert_eq!(cfg.name, "demo");
        assert_eq!(cfg.model, ChannelModel::JaynesCummings { g: 2.0, omega_a: 0.0 });
        assert_eq!(cfg.n_points, 11);
        assert_eq!(cfg.engines, Engines::BOTH);
        let ts = cfg.times();
        assert_eq!(ts.len(), 11);
        assert_eq!(ts[10], 2.0 * PI);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = "model.kind = xy\nrun.theta = 1\nrun.t_max = 5\n";
        assert!(ScenarioConfig::parse(base, "x").is_ok());
        for bad in [
            "run.theta = 1\nrun.t_max = 5\n",
            "model.kind = quantum\nrun.theta = 1\nrun.t_max = 5\n",
            &format!("{base}run.n_points = 1\n"),
            &format!("{base}run.engines = none\n"),
            &format!("{base}bogus = 1\n"),
            &format!("{base}run.theta = 2\n"),
            &format!("{base}[run\n"),
            &format!("{base}just words\n"),
            "model.kind = xy\nmodel.n = 0\nrun.theta = 1\nrun.t_max = 5\n",
            "model.kind = xy\nrun.theta = 4\nrun.t_max = 5\n",
            "model.kind = xy\nrun.theta = 1\nrun.t_max = -5\n",
        ] {
            assert!(matches!(ScenarioConfig::parse(bad, "x"), Err(Error::Config(_))), "{bad}");
        }
    }
}
