//! Schmidt analysis of the three-party state
//!
//! ```text
//! cosθ |m₁⟩ (c_e |e⟩|0⟩ + Σₙ cₙ |g⟩|1ₙ⟩) + sinθ |m₂⟩ |g⟩|0⟩
//! ```
//!
//! Every bipartition of this state has Schmidt rank at most two, and every
//! Schmidt weight depends on time only through the excited-state
//! population `p = |c_e|²`. The closed forms for that dependence live here
//! so all channel models share them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, hermitian_eigenvalues_desc, smaller_gram, CMatrix};

/// Default tolerance on the normalization of a state or coefficient matrix.
pub const NORM_TOL: f64 = 1e-10;

/// Eigenvalues in `[-CLIP_WINDOW, 0)` are treated as round-off and set to 0.
pub const CLIP_WINDOW: f64 = 1e-12;

const ENDPOINT_CLIP: f64 = 1e-12;
const WEIGHT_RANGE_SLACK: f64 = 1e-9;

/// Which side of the qubit/Moon preparation dominates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// sin²θ ≥ cos²θ, where the unsigned relations hold.
    MoonDominant,
    /// sin²θ < cos²θ.
    QubitDominant,
}

/// Preparation angle θ of `cosθ |e⟩|m₁⟩ + sinθ |g⟩|m₂⟩`, in `[0, π]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PreparationAngle(f64);

const BRANCH_EPS: f64 = 1e-12;

impl PreparationAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::invalid(format!("preparation angle must be finite, got {theta}")));
        }
        if !(-ENDPOINT_CLIP..=PI + ENDPOINT_CLIP).contains(&theta) {
            return Err(Error::range(format!("preparation angle {theta} outside [0, pi]")));
        }
        Ok(Self(theta.clamp(0.0, PI)))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn cos_sq(self) -> f64 {
        let c = self.0.cos();
        c * c
    }

    pub fn sin_sq(self) -> f64 {
        let s = self.0.sin();
        s * s
    }

    /// `sin²θ ≥ cos²θ`, decided through `cos 2θ` so that θ = π/4 lands on
    /// the Moon-dominant side despite round-off.
    pub fn moon_dominant(self) -> bool {
        (2.0 * self.0).cos() <= BRANCH_EPS
    }

    pub fn branch(self) -> Branch {
        if self.moon_dominant() {
            Branch::MoonDominant
        } else {
            Branch::QubitDominant
        }
    }
}

impl TryFrom<f64> for PreparationAngle {
    type Error = Error;

    fn try_from(theta: f64) -> Result<Self> {
        Self::new(theta)
    }
}

impl From<PreparationAngle> for f64 {
    fn from(theta: PreparationAngle) -> f64 {
        theta.0
    }
}

/// Excited-state population `p = |c_e|²`, the only time dependence of the
/// closed-form Schmidt weights.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct FlowCoordinate(f64);

impl FlowCoordinate {
    /// Values within `1e-12` outside `[0, 1]` are clipped; anything further
    /// out is a [`Error::Range`].
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::invalid(format!("flow coordinate must be finite, got {p}")));
        }
        if !(-ENDPOINT_CLIP..=1.0 + ENDPOINT_CLIP).contains(&p) {
            return Err(Error::range(format!("flow coordinate {p} outside [0, 1]")));
        }
        Ok(Self(p.clamp(0.0, 1.0)))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - p`, the population that has flowed into the partner.
    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }
}

/// The three-party pure state at one instant.
///
/// Basis conventions: qubit `{e, g}`, partner `{vac, 1₁ … 1_N}`, Moon
/// `{m₁, m₂}`. The Moon states are frozen at their initial values, which
/// changes no Schmidt weight.
#[derive(Clone, Debug, PartialEq)]
pub struct TripartiteSnapshot {
    pub theta: PreparationAngle,
    pub c_e: Complex64,
    pub c_vec: Vec<Complex64>,
    pub time: f64,
}

impl TripartiteSnapshot {
    pub fn new(theta: PreparationAngle, c_e: Complex64, c_vec: Vec<Complex64>, time: f64) -> Result<Self> {
        let snapshot = Self { theta, c_e, c_vec, time };
        snapshot.check_normalized(NORM_TOL)?;
        Ok(snapshot)
    }

    /// `|c_e|² + Σ |cₙ|²`, the norm of the `m₁` branch.
    pub fn branch_norm_sq(&self) -> f64 {
        self.c_e.norm_sqr() + self.c_vec.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn check_normalized(&self, tolerance: f64) -> Result<()> {
        let norm_sq = self.branch_norm_sq();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > tolerance {
            return Err(Error::Normalization { norm_sq, tolerance });
        }
        Ok(())
    }

    /// Number of partner basis states, `N + 1`.
    pub fn partner_dim(&self) -> usize {
        self.c_vec.len() + 1
    }

    pub fn flow(&self) -> Result<FlowCoordinate> {
        FlowCoordinate::new(self.c_e.norm_sqr())
    }

    /// Amplitude on `qubit ⊗ partner ⊗ moon` (indices as in the type docs).
    fn amplitude(&self, qubit: usize, partner: usize, moon: usize) -> Complex64 {
        let (c, s) = (self.theta.cos(), self.theta.sin());
        match (qubit, partner, moon) {
            (0, 0, 0) => self.c_e * c,
            (1, n, 0) if n > 0 => self.c_vec[n - 1] * c,
            (1, 0, 1) => Complex64::new(s, 0.0),
            _ => Complex64::new(0.0, 0.0),
        }
    }
}

/// The three ways of splitting the state into two parties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BipartitionCut {
    MoonVsRest,
    QubitVsRest,
    PartnerVsRest,
}

impl BipartitionCut {
    pub const ALL: [BipartitionCut; 3] =
        [BipartitionCut::MoonVsRest, BipartitionCut::QubitVsRest, BipartitionCut::PartnerVsRest];
}

/// Coefficient matrix of `snapshot` across `cut`.
///
/// Rows run over the isolated party's basis. Columns enumerate the product
/// basis of the remaining two parties, the earlier party in
/// qubit/partner/Moon order varying slowest.
pub fn coefficient_matrix(snapshot: &TripartiteSnapshot, cut: BipartitionCut) -> Result<CMatrix> {
    snapshot.check_normalized(NORM_TOL)?;
    let np = snapshot.partner_dim();
    let c = match cut {
        BipartitionCut::MoonVsRest => CMatrix::from_fn(2, 2 * np, |m, col| snapshot.amplitude(col / np, col % np, m)),
        BipartitionCut::QubitVsRest => CMatrix::from_fn(2, 2 * np, |q, col| snapshot.amplitude(q, col / 2, col % 2)),
        BipartitionCut::PartnerVsRest => CMatrix::from_fn(np, 4, |n, col| snapshot.amplitude(col / 2, n, col % 2)),
    };
    Ok(c)
}

/// Reduced-density eigenvalues, sorted descending and summing to one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchmidtSpectrum {
    eigenvalues: Vec<f64>,
}

impl SchmidtSpectrum {
    /// Validates, clips round-off negatives and sorts.
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::invalid("empty spectrum"));
        }
        for lambda in eigenvalues.iter_mut() {
            if !lambda.is_finite() {
                return Err(Error::invalid("non-finite eigenvalue"));
            }
            if *lambda < 0.0 {
                if *lambda < -CLIP_WINDOW {
                    return Err(Error::invalid(format!("negative eigenvalue {lambda}")));
                }
                *lambda = 0.0;
            }
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = eigenvalues.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalization { norm_sq: total, tolerance: NORM_TOL });
        }
        Ok(Self { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Number of eigenvalues strictly above `threshold`.
    pub fn rank_above(&self, threshold: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > threshold).count()
    }
}

/// Spectrum of the reduced density matrix `C C†`.
///
/// The Gram matrix is formed on the smaller side of `c`; the zero
/// eigenvalues beyond that dimension are not reported.
pub fn schmidt_spectrum(c: &CMatrix) -> Result<SchmidtSpectrum> {
    if c.is_empty() {
        return Err(Error::invalid("empty coefficient matrix"));
    }
    if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("coefficient matrix has non-finite entries"));
    }
    let norm_sq = frobenius_sq(c);
    if (norm_sq - 1.0).abs() > NORM_TOL {
        return Err(Error::Normalization { norm_sq, tolerance: NORM_TOL });
    }
    SchmidtSpectrum::new(hermitian_eigenvalues_desc(&smaller_gram(c)))
}

/// `1 / Σ λ²` over any list of nonnegative weights.
pub fn inverse_purity(eigenvalues: &[f64]) -> Result<f64> {
    let purity: f64 = eigenvalues.iter().map(|l| l * l).sum();
    if !(purity > 0.0) {
        return Err(Error::invalid("spectrum has no weight"));
    }
    Ok(1.0 / purity)
}

/// Schmidt weight `K = 1 / Σ λ²`.
pub fn schmidt_weight(spectrum: &SchmidtSpectrum) -> Result<f64> {
    inverse_purity(spectrum.eigenvalues())
}

/// Schmidt weight across `cut`, straight from a snapshot.
pub fn snapshot_weight(snapshot: &TripartiteSnapshot, cut: BipartitionCut) -> Result<f64> {
    schmidt_weight(&schmidt_spectrum(&coefficient_matrix(snapshot, cut)?)?)
}

/// `2 / (x² + 1)`: the Schmidt weight of a rank-two state whose two
/// eigenvalues are `(1 ± x) / 2`.
fn rank_two_weight(x: f64) -> f64 {
    2.0 / (x * x + 1.0)
}

/// Moon entanglement `K_M = 1 / (cos⁴θ + sin⁴θ)`, constant in time.
pub fn moon_weight(theta: PreparationAngle) -> f64 {
    // cos⁴θ + sin⁴θ = (1 + cos²2θ) / 2; this form stays exactly 2 at θ = π/4.
    rank_two_weight((2.0 * theta.radians()).cos())
}

/// Qubit entanglement `K_A = 2 / ([2p cos²θ − 1]² + 1)`.
pub fn closed_form_qubit_weight(p: FlowCoordinate, theta: PreparationAngle) -> f64 {
    rank_two_weight(2.0 * p.value() * theta.cos_sq() - 1.0)
}

/// Partner entanglement `K_a = 2 / ([2(1 − p) cos²θ − 1]² + 1)`.
pub fn closed_form_partner_weight(p: FlowCoordinate, theta: PreparationAngle) -> f64 {
    closed_form_qubit_weight(p.complement(), theta)
}

/// `|2p cos²θ − 1|`, the square-root coordinate of `K_A` evaluated without
/// rounding through `K_A` (which saturates at 2 for `|x| < 1e-8`).
pub fn closed_form_qubit_coordinate(p: FlowCoordinate, theta: PreparationAngle) -> f64 {
    (2.0 * p.value() * theta.cos_sq() - 1.0).abs()
}

/// `|2(1 − p) cos²θ − 1|`.
pub fn closed_form_partner_coordinate(p: FlowCoordinate, theta: PreparationAngle) -> f64 {
    closed_form_qubit_coordinate(p.complement(), theta)
}

/// `|cos 2θ|`, the square-root coordinate of `K_M`.
pub fn moon_coordinate(theta: PreparationAngle) -> f64 {
    (2.0 * theta.radians()).cos().abs()
}

/// `√(2/K − 1)`, defined for rank-two weights `K ∈ [1, 2]`.
pub fn sqrt_coordinate(k: f64) -> Result<f64> {
    if !(1.0 - WEIGHT_RANGE_SLACK..=2.0 + WEIGHT_RANGE_SLACK).contains(&k) {
        return Err(Error::range(format!("Schmidt weight {k} outside the rank-two range [1, 2]")));
    }
    Ok(((2.0 - k) / k).max(0.0).sqrt().min(1.0))
}
