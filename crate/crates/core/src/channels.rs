//! Closed-form amplitude generators for the three amplitude-flow channels.
//!
//! Each channel moves the qubit excitation into a partner system while
//! conserving excitation number, so the `m₁` branch of the state is always
//! `c_e |e⟩|0⟩ + Σₙ cₙ |g⟩|1ₙ⟩`. Times are in the channel's natural unit:
//! `1/Γ` for spontaneous emission, `1/g` for Jaynes–Cummings and `1/J` for
//! the XY chain.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schmidt::{FlowCoordinate, PreparationAngle, TripartiteSnapshot};

const GOLDEN_TOL: f64 = 1e-8;
/// Largest accepted gap between a grid's saturated one-photon weight and 1.
pub const GRID_QUALITY_TOL: f64 = 0.05;

/// Discrete reservoir modes with real, nonnegative couplings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeGrid {
    omegas: Vec<f64>,
    couplings: Vec<f64>,
}

impl ModeGrid {
    pub fn new(omegas: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        if omegas.len() != couplings.len() {
            return Err(Error::invalid(format!(
                "mode grid has {} frequencies but {} couplings",
                omegas.len(),
                couplings.len()
            )));
        }
        if omegas.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("mode frequencies must be finite"));
        }
        if couplings.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::invalid("mode couplings must be finite and nonnegative"));
        }
        Ok(Self { omegas, couplings })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    SpontaneousEmission,
    JaynesCummings,
    XyChain,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::SpontaneousEmission => "spontaneous_emission",
            ModelKind::JaynesCummings => "jaynes_cummings",
            ModelKind::XyChain => "xy_chain",
        }
    }
}

/// Qubit–partner interaction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelModel {
    /// Weisskopf–Wigner decay at rate `gamma`. Without a mode grid the
    /// emitted photon is carried by a single collective mode.
    SpontaneousEmission { gamma: f64, omega_a: f64, mode_grid: Option<ModeGrid> },
    /// Resonant single-mode cavity with vacuum Rabi coupling `g`.
    JaynesCummings { g: f64, omega_a: f64 },
    /// Qubit attached to the end of an `sites`-spin XY chain, uniform hopping.
    XyChain { sites: usize, hopping: f64 },
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {value}")))
    }
}

fn nonnegative_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::range(format!("time must be finite and nonnegative, got {t}")))
    }
}

impl ChannelModel {
    pub fn spontaneous_emission(gamma: f64, omega_a: f64, mode_grid: Option<ModeGrid>) -> Result<Self> {
        let model = ChannelModel::SpontaneousEmission { gamma, omega_a, mode_grid };
        model.validate()?;
        Ok(model)
    }

    pub fn jaynes_cummings(g: f64, omega_a: f64) -> Result<Self> {
        let model = ChannelModel::JaynesCummings { g, omega_a };
        model.validate()?;
        Ok(model)
    }

    pub fn xy_chain(sites: usize, hopping: f64) -> Result<Self> {
        let model = ChannelModel::XyChain { sites, hopping };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ChannelModel::SpontaneousEmission { gamma, omega_a, mode_grid } => {
                positive("decay rate", *gamma)?;
                if !omega_a.is_finite() {
                    return Err(Error::invalid("transition frequency must be finite"));
                }
                if mode_grid.as_ref().is_some_and(ModeGrid::is_empty) {
                    return Err(Error::invalid("mode grid is empty"));
                }
                Ok(())
            }
            ChannelModel::JaynesCummings { g, omega_a } => {
                positive("coupling", *g)?;
                if !(omega_a.is_finite() && *omega_a >= 0.0) {
                    return Err(Error::invalid("transition frequency must be finite and nonnegative"));
                }
                Ok(())
            }
            ChannelModel::XyChain { sites, hopping } => {
                if *sites == 0 {
                    return Err(Error::invalid("XY chain needs at least one site"));
                }
                positive("hopping", *hopping)
            }
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ChannelModel::SpontaneousEmission { .. } => ModelKind::SpontaneousEmission,
            ChannelModel::JaynesCummings { .. } => ModelKind::JaynesCummings,
            ChannelModel::XyChain { .. } => ModelKind::XyChain,
        }
    }

    /// Precomputes whatever the model needs for repeated evaluation.
    ///
    /// An explicit reservoir grid must capture all but [`GRID_QUALITY_TOL`]
    /// of the emitted weight (see [`saturated_grid_weight`]).
    pub fn prepare(&self) -> Result<Channel> {
        self.validate()?;
        if let ChannelModel::SpontaneousEmission { gamma, omega_a, mode_grid: Some(grid) } = self {
            let weight = saturated_grid_weight(grid, *omega_a, *gamma);
            if (weight - 1.0).abs() > GRID_QUALITY_TOL {
                return Err(Error::config(format!(
                    "mode grid holds {weight:.4} of the emitted weight before rescaling (needs 1 ± {GRID_QUALITY_TOL})"
                )));
            }
        }
        let xy = match self {
            ChannelModel::XyChain { sites, hopping } => Some(xy_eigensystem(*sites, *hopping)?),
            _ => None,
        };
        Ok(Channel { model: self.clone(), xy })
    }
}

/// A validated model ready for evaluation on many time points.
#[derive(Clone, Debug)]
pub struct Channel {
    model: ChannelModel,
    xy: Option<XyEigensystem>,
}

impl Channel {
    pub fn model(&self) -> &ChannelModel {
        &self.model
    }

    pub fn xy_eigensystem(&self) -> Option<&XyEigensystem> {
        self.xy.as_ref()
    }

    pub fn flow(&self, t: f64) -> Result<FlowCoordinate> {
        match (&self.model, &self.xy) {
            (ChannelModel::SpontaneousEmission { gamma, .. }, _) => se_flow(*gamma, t),
            (ChannelModel::JaynesCummings { g, omega_a }, _) => {
                let (c_e, _) = jc_amplitudes(*g, *omega_a, t)?;
                FlowCoordinate::new(c_e.norm_sqr())
            }
            (ChannelModel::XyChain { .. }, Some(sys)) => xy_flow(sys, t),
            (ChannelModel::XyChain { .. }, None) => unreachable!("prepared XY channel has an eigensystem"),
        }
    }

    pub fn snapshot(&self, theta: PreparationAngle, t: f64) -> Result<TripartiteSnapshot> {
        let (c_e, c_vec) = match (&self.model, &self.xy) {
            (ChannelModel::SpontaneousEmission { gamma, omega_a, mode_grid }, _) => {
                let p = se_flow(*gamma, t)?.value();
                let c_e = Complex64::new(p.sqrt(), 0.0);
                let c_vec = match mode_grid {
                    Some(grid) => se_mode_amplitudes(grid, *omega_a, *gamma, t)?.amplitudes,
                    None => vec![Complex64::new(0.0, -(1.0 - p).sqrt())],
                };
                (c_e, c_vec)
            }
            (ChannelModel::JaynesCummings { g, omega_a }, _) => {
                let (c_e, c_1) = jc_amplitudes(*g, *omega_a, t)?;
                (c_e, vec![c_1])
            }
            (ChannelModel::XyChain { .. }, Some(sys)) => xy_amplitudes(sys, t)?,
            (ChannelModel::XyChain { .. }, None) => unreachable!("prepared XY channel has an eigensystem"),
        };
        TripartiteSnapshot::new(theta, c_e, c_vec, t)
    }
}

/// Snapshot of the three-party state under `model` at time `t`.
pub fn snapshot(model: &ChannelModel, theta: PreparationAngle, t: f64) -> Result<TripartiteSnapshot> {
    model.prepare()?.snapshot(theta, t)
}

/// Excited-state survival `p = e^{−Γt}`.
pub fn se_flow(gamma: f64, t: f64) -> Result<FlowCoordinate> {
    positive("decay rate", gamma)?;
    nonnegative_time(t)?;
    FlowCoordinate::new((-gamma * t).exp())
}

/// One-photon amplitudes of a discretized reservoir.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeAmplitudes {
    /// Rescaled so that `Σ|c_k|² = 1 − e^{−Γt}`.
    pub amplitudes: Vec<Complex64>,
    /// `Σ|c_k|²` before rescaling.
    pub raw_weight: f64,
    /// `1 − e^{−Γt}`.
    pub target_weight: f64,
}

impl ModeAmplitudes {
    /// Relative gap between the raw and target one-photon weight. Zero when
    /// nothing has been emitted yet.
    pub fn discretization_error(&self) -> f64 {
        if self.target_weight == 0.0 {
            0.0
        } else {
            (self.raw_weight - self.target_weight).abs() / self.target_weight
        }
    }
}

/// Late-time limit of the unscaled one-photon weight,
/// `Σ g_k² / ((ω_k − ω_A)² + Γ²/4)`.
///
/// The early-time weight falls short for any finite band (it grows as `t²`
/// until `t ~ 1/B`), so grid quality is judged on this limit instead.
pub fn saturated_grid_weight(grid: &ModeGrid, omega_a: f64, gamma: f64) -> f64 {
    grid.omegas
        .iter()
        .zip(&grid.couplings)
        .map(|(&omega_k, &g_k)| g_k * g_k / ((omega_k - omega_a).powi(2) + 0.25 * gamma * gamma))
        .sum()
}

/// Weisskopf–Wigner mode amplitudes
/// `c_k = g_k (1 − e^{i(ω_A−ω_k)t − Γt/2}) / (ω_k − ω_A + iΓ/2)`.
///
/// The discrete sum only reproduces `1 − e^{−Γt}` in the continuum limit, so
/// the vector is rescaled onto it; `raw_weight` keeps the unscaled total for
/// grid-quality checks.
pub fn se_mode_amplitudes(grid: &ModeGrid, omega_a: f64, gamma: f64, t: f64) -> Result<ModeAmplitudes> {
    if grid.is_empty() {
        return Err(Error::invalid("mode grid is empty"));
    }
    positive("decay rate", gamma)?;
    nonnegative_time(t)?;

    let mut amplitudes: Vec<Complex64> = grid
        .omegas
        .iter()
        .zip(&grid.couplings)
        .map(|(&omega_k, &g_k)| {
            let detuning = omega_a - omega_k;
            let phase = Complex64::new(-gamma * t / 2.0, detuning * t).exp();
            let denominator = Complex64::new(omega_k - omega_a, gamma / 2.0);
            g_k * (Complex64::new(1.0, 0.0) - phase) / denominator
        })
        .collect();

    let raw_weight: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
    let target_weight = -(-gamma * t).exp_m1();
    if target_weight > 0.0 {
        if raw_weight <= 0.0 || !raw_weight.is_finite() {
            return Err(Error::invalid("mode grid carries no emission weight"));
        }
        let scale = (target_weight / raw_weight).sqrt();
        amplitudes.iter_mut().for_each(|c| *c *= scale);
    }
    Ok(ModeAmplitudes { amplitudes, raw_weight, target_weight })
}

/// Resonant Jaynes–Cummings amplitudes
/// `(e^{iω_A t/2} cos gt, −i e^{−iω_A t/2} sin gt)`.
pub fn jc_amplitudes(g: f64, omega_a: f64, t: f64) -> Result<(Complex64, Complex64)> {
    positive("coupling", g)?;
    nonnegative_time(t)?;
    let (s, c) = (g * t).sin_cos();
    let half_phase = omega_a * t / 2.0;
    let c_e = Complex64::from_polar(c, half_phase);
    let c_1 = Complex64::new(0.0, -1.0) * Complex64::from_polar(s, -half_phase);
    Ok((c_e, c_1))
}

/// Analytic single-excitation eigensystem of the qubit + XY chain.
#[derive(Clone, Debug, PartialEq)]
pub struct XyEigensystem {
    hopping: f64,
    energies: Vec<f64>,
    /// Rows: site A, then chain sites 1..N. Column `k-1` is eigenstate `k`.
    vectors: DMatrix<f64>,
}

impl XyEigensystem {
    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    /// Chain length `N`.
    pub fn sites(&self) -> usize {
        self.energies.len() - 1
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    fn amplitude(&self, site: usize, t: f64) -> Complex64 {
        self.energies
            .iter()
            .enumerate()
            .map(|(k, &e)| {
                let weight = self.vectors[(site, k)] * self.vectors[(0, k)];
                Complex64::from_polar(weight, -e * t)
            })
            .sum()
    }
}

/// Eigenstates `√(2/(N+2)) sin((n+1)kπ/(N+2))` with `E_k = 2J cos(kπ/(N+2))`.
pub fn xy_eigensystem(sites: usize, hopping: f64) -> Result<XyEigensystem> {
    if sites == 0 {
        return Err(Error::invalid("XY chain needs at least one site"));
    }
    positive("hopping", hopping)?;
    let dim = sites + 1;
    let denom = (sites + 2) as f64;
    let norm = (2.0 / denom).sqrt();
    let energies = (1..=dim).map(|k| 2.0 * hopping * (k as f64 * PI / denom).cos()).collect();
    let vectors = DMatrix::from_fn(dim, dim, |site, col| {
        let k = (col + 1) as f64;
        norm * ((site + 1) as f64 * k * PI / denom).sin()
    });
    Ok(XyEigensystem { hopping, energies, vectors })
}

/// Spectral sums for `c_e(t)` and `cₙ(t)`, n = 1..N.
pub fn xy_amplitudes(sys: &XyEigensystem, t: f64) -> Result<(Complex64, Vec<Complex64>)> {
    nonnegative_time(t)?;
    let c_e = sys.amplitude(0, t);
    let c_vec = (1..=sys.sites()).map(|n| sys.amplitude(n, t)).collect();
    Ok((c_e, c_vec))
}

/// The explicit N = 10 cosine sum for `c_e(t)`.
pub fn xy_ce_reference_n10(hopping: f64, t: f64) -> f64 {
    let x = hopping * t;
    let r2 = 2f64.sqrt();
    let r3 = 3f64.sqrt();
    (2.0 + 3.0 * x.cos()
        + 2.0 * (r2 * x).cos()
        + (r3 * x).cos()
        + (2.0 + r3) * ((r3 - 1.0) * x / r2).cos()
        + (2.0 - r3) * ((r3 + 1.0) * x / r2).cos())
        / 12.0
}

/// `f(J, t) = |c_e(t)|²`.
pub fn xy_flow(sys: &XyEigensystem, t: f64) -> Result<FlowCoordinate> {
    nonnegative_time(t)?;
    FlowCoordinate::new(sys.amplitude(0, t).norm_sqr())
}

/// Local minima of `f` on `[0, t_max]` that dip below `threshold`.
///
/// `f` is sampled every `step`; each bracketed minimum is refined by golden
/// section to `1e-8` in `t`.
pub fn scan_minima<F: Fn(f64) -> f64>(f: F, t_max: f64, step: f64, threshold: f64) -> Vec<f64> {
    let n = (t_max / step).ceil() as usize;
    let ts: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(t_max)).collect();
    let fs: Vec<f64> = ts.iter().map(|&t| f(t)).collect();

    let mut minima = Vec::new();
    for i in 1..n {
        if fs[i - 1] > fs[i] && fs[i] <= fs[i + 1] {
            let t_min = golden_section_min(&f, ts[i - 1], ts[i + 1]);
            if f(t_min) < threshold {
                minima.push(t_min);
            }
        }
    }
    minima
}

fn golden_section_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Times where the excited population of the chain dips below `threshold`.
///
/// For finite chains `f(J, t)` is almost periodic and need not hit zero
/// exactly; sub-threshold minima stand in for the zeros.
pub fn flow_zero_crossings(sys: &XyEigensystem, t_max: f64, threshold: f64) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::range(format!("t_max must be positive, got {t_max}")));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::range(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    let step = 0.01 / sys.hopping;
    Ok(scan_minima(|t| sys.amplitude(0, t).norm_sqr(), t_max, step, threshold))
}
