//! Brute-force reference path.
//!
//! Builds the qubit–partner Hamiltonian explicitly, evolves the initial
//! state by full eigendecomposition and obtains Schmidt weights from
//! numerical partial traces of the assembled three-party vector. Nothing in
//! here touches the closed-form amplitudes of [`crate::channels`].

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::channels::{ChannelModel, ModeGrid, ModelKind};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, hermitian_eigenvalues_desc, max_hermitian_defect, smaller_gram, CMatrix, CVector, HermitianEigen,
};
use crate::schmidt::{BipartitionCut, PreparationAngle};

/// Recorded in output metadata.
pub const FRAME_CONVENTION: &str =
    "rotating frame at the qubit transition frequency; Moon Hamiltonian set to zero (frozen Moon)";

const HERMITIAN_TOL: f64 = 1e-12;
const INPUT_NORM_TOL: f64 = 1e-12;
const PURITY_CROSSCHECK_TOL: f64 = 1e-9;

/// Minimum mode count and bandwidth (in units of the decay rate) accepted by
/// [`flat_mode_grid`].
pub const MIN_MODES: usize = 50;
pub const MIN_BANDWIDTH_RATIO: f64 = 20.0;

/// A basis state of the qubit ⊗ partner pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairState {
    /// `|e⟩|vac⟩`
    ExcitedVacuum,
    /// `|g⟩|1ₙ⟩`, `n` counted from 1.
    Emitted(usize),
    /// `|g⟩|vac⟩`, reached only through the `m₂` branch.
    GroundVacuum,
}

impl PairState {
    /// `(qubit, partner)` indices: qubit `{e, g}`, partner `{vac, 1₁ … 1_N}`.
    fn factor_indices(self) -> (usize, usize) {
        match self {
            PairState::ExcitedVacuum => (0, 0),
            PairState::Emitted(n) => (1, n),
            PairState::GroundVacuum => (1, 0),
        }
    }
}

/// Canonical ordering of the three-party vector.
///
/// Pair states run `(e,vac), (g,1₁) … (g,1_N), (g,vac)`; the first `N + 1`
/// span the single-excitation sector the Hamiltonian acts on. The full
/// vector is Moon-major: index `moon · (N + 2) + pair`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SingleExcitationBasis {
    partner_modes: usize,
}

impl SingleExcitationBasis {
    pub fn new(partner_modes: usize) -> Self {
        Self { partner_modes }
    }

    pub fn for_model(model: &ChannelModel) -> Result<Self> {
        let modes = match model {
            ChannelModel::SpontaneousEmission { mode_grid: Some(grid), .. } => grid.len(),
            ChannelModel::SpontaneousEmission { mode_grid: None, .. } => {
                return Err(Error::config("spontaneous emission oracle needs an explicit mode grid"))
            }
            ChannelModel::JaynesCummings { .. } => 1,
            ChannelModel::XyChain { sites, .. } => *sites,
        };
        Ok(Self::new(modes))
    }

    pub fn partner_modes(&self) -> usize {
        self.partner_modes
    }

    /// Dimension of the single-excitation sector, `N + 1`.
    pub fn sector_dim(&self) -> usize {
        self.partner_modes + 1
    }

    fn pair_dim(&self) -> usize {
        self.partner_modes + 2
    }

    pub fn full_dim(&self) -> usize {
        2 * self.pair_dim()
    }

    pub fn labels(&self) -> Vec<PairState> {
        std::iter::once(PairState::ExcitedVacuum)
            .chain((1..=self.partner_modes).map(PairState::Emitted))
            .chain(std::iter::once(PairState::GroundVacuum))
            .collect()
    }

    fn pair_label(&self, index: usize) -> PairState {
        match index {
            0 => PairState::ExcitedVacuum,
            i if i <= self.partner_modes => PairState::Emitted(i),
            _ => PairState::GroundVacuum,
        }
    }

    /// `(qubit, partner, moon)` indices of a full-vector position.
    fn decode(&self, index: usize) -> (usize, usize, usize) {
        let moon = index / self.pair_dim();
        let (qubit, partner) = self.pair_label(index % self.pair_dim()).factor_indices();
        (qubit, partner, moon)
    }
}

/// A Hermitian matrix with a lazily computed, shareable eigendecomposition.
#[derive(Clone, Debug)]
pub struct DenseHermitian {
    matrix: CMatrix,
    eigen: OnceLock<HermitianEigen>,
}

impl DenseHermitian {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.is_empty() {
            return Err(Error::invalid("Hamiltonian must be a nonempty square matrix"));
        }
        let defect = max_hermitian_defect(&matrix);
        if !(defect < HERMITIAN_TOL) {
            return Err(Error::invalid(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        Ok(Self { matrix, eigen: OnceLock::new() })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> &HermitianEigen {
        self.eigen.get_or_init(|| hermitian_eigen(&self.matrix))
    }
}

/// Qubit–partner Hamiltonian on the single-excitation sector.
///
/// Free energies are measured from the qubit transition frequency, so the
/// resonant Jaynes–Cummings block is purely off-diagonal.
pub fn build_hamiltonian(model: &ChannelModel) -> Result<DenseHermitian> {
    model.validate()?;
    let real = |re: f64| Complex64::new(re, 0.0);
    let matrix = match model {
        ChannelModel::SpontaneousEmission { omega_a, mode_grid, .. } => {
            let grid = mode_grid
                .as_ref()
                .ok_or_else(|| Error::config("spontaneous emission oracle needs an explicit mode grid"))?;
            let dim = grid.len() + 1;
            let mut h = CMatrix::zeros(dim, dim);
            for (k, (&omega_k, &g_k)) in grid.omegas().iter().zip(grid.couplings()).enumerate() {
                h[(k + 1, k + 1)] = real(omega_k - omega_a);
                h[(0, k + 1)] = real(g_k);
                h[(k + 1, 0)] = real(g_k);
            }
            h
        }
        ChannelModel::JaynesCummings { g, .. } => {
            CMatrix::from_row_slice(2, 2, &[real(0.0), real(*g), real(*g), real(0.0)])
        }
        ChannelModel::XyChain { sites, hopping } => {
            let dim = sites + 1;
            CMatrix::from_fn(dim, dim, |i, j| if i.abs_diff(j) == 1 { real(*hopping) } else { real(0.0) })
        }
    };
    DenseHermitian::new(matrix)
}

/// `ψ(t) = Σ_k e^{−iE_k t} ⟨k|ψ₀⟩ |k⟩`.
pub fn evolve(h: &DenseHermitian, psi0: &CVector, t: f64) -> Result<CVector> {
    if psi0.len() != h.dim() {
        return Err(Error::invalid(format!("state has dimension {} but Hamiltonian has {}", psi0.len(), h.dim())));
    }
    let norm_sq = psi0.norm_squared();
    if (norm_sq - 1.0).abs() > INPUT_NORM_TOL {
        return Err(Error::Normalization { norm_sq, tolerance: INPUT_NORM_TOL });
    }
    if !t.is_finite() {
        return Err(Error::invalid("evolution time must be finite"));
    }
    let eig = h.eigen();
    let mut coeffs = eig.vectors.adjoint() * psi0;
    for (c, &e) in coeffs.iter_mut().zip(&eig.values) {
        *c *= Complex64::from_polar(1.0, -e * t);
    }
    Ok(&eig.vectors * coeffs)
}

/// `cosθ · ψ_Aa ⊗ |m₁⟩ + sinθ · |g, vac⟩ ⊗ |m₂⟩` in the canonical ordering.
///
/// `psi_aa` lives on the single-excitation sector and must be normalized.
pub fn assemble_tripartite(theta: PreparationAngle, psi_aa: &CVector) -> CVector {
    let basis = SingleExcitationBasis::new(psi_aa.len() - 1);
    let pair_dim = basis.pair_dim();
    let mut full = CVector::zeros(basis.full_dim());
    for (i, amp) in psi_aa.iter().enumerate() {
        full[i] = amp * theta.cos();
    }
    full[pair_dim + pair_dim - 1] = Complex64::new(theta.sin(), 0.0);
    full
}

/// Coefficient matrix of `psi` across `cut`, by index arithmetic over the
/// canonical ordering.
fn reshape(psi: &CVector, cut: BipartitionCut, basis: &SingleExcitationBasis) -> Result<CMatrix> {
    if psi.len() != basis.full_dim() {
        return Err(Error::invalid(format!(
            "state has dimension {} but basis expects {}",
            psi.len(),
            basis.full_dim()
        )));
    }
    let np = basis.partner_modes() + 1;
    let (rows, cols) = match cut {
        BipartitionCut::MoonVsRest => (2, 2 * np),
        BipartitionCut::QubitVsRest => (2, 2 * np),
        BipartitionCut::PartnerVsRest => (np, 4),
    };
    let mut c = CMatrix::zeros(rows, cols);
    for (index, amp) in psi.iter().enumerate() {
        let (q, n, m) = basis.decode(index);
        let (row, col) = match cut {
            BipartitionCut::MoonVsRest => (m, q * np + n),
            BipartitionCut::QubitVsRest => (q, n * 2 + m),
            BipartitionCut::PartnerVsRest => (n, q * 2 + m),
        };
        c[(row, col)] += amp;
    }
    Ok(c)
}

/// Eigenvalues (descending) of the reduced density across `cut`.
pub fn numerical_spectrum(psi: &CVector, cut: BipartitionCut, basis: &SingleExcitationBasis) -> Result<Vec<f64>> {
    let gram = smaller_gram(&reshape(psi, cut, basis)?);
    Ok(hermitian_eigenvalues_desc(&gram))
}

/// Schmidt weight across `cut` from eigenvalues, cross-checked against the
/// eigensolver-free purity `Tr ρ²`.
pub fn numerical_k(psi: &CVector, cut: BipartitionCut, basis: &SingleExcitationBasis) -> Result<f64> {
    let gram = smaller_gram(&reshape(psi, cut, basis)?);
    let eigen_purity: f64 = hermitian_eigenvalues_desc(&gram).iter().map(|l| l * l).sum();
    let trace_purity: f64 = gram.iter().map(|z| z.norm_sqr()).sum();
    if !(eigen_purity > 0.0) {
        return Err(Error::invalid("state has no weight"));
    }
    let k = 1.0 / eigen_purity;
    let k_trace = 1.0 / trace_purity;
    if (k - k_trace).abs() > PURITY_CROSSCHECK_TOL * k {
        return Err(Error::invalid(format!("eigenvalue purity {k} disagrees with trace purity {k_trace}")));
    }
    Ok(k)
}

/// Uniform reservoir `ω_k = ω_A − B/2 + (k + ½)Δ`, `Δ = B/n`, with the
/// golden-rule coupling `g = √(ΓΔ/2π)` so the discrete band decays at `Γ`.
pub fn flat_mode_grid(n_modes: usize, bandwidth: f64, gamma: f64, omega_a: f64) -> Result<ModeGrid> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::config(format!("decay rate must be positive, got {gamma}")));
    }
    if !omega_a.is_finite() {
        return Err(Error::config("transition frequency must be finite"));
    }
    if n_modes < MIN_MODES {
        return Err(Error::config(format!("mode grid needs at least {MIN_MODES} modes, got {n_modes}")));
    }
    if !(bandwidth.is_finite() && bandwidth >= MIN_BANDWIDTH_RATIO * gamma) {
        return Err(Error::config(format!("bandwidth {bandwidth} is below {MIN_BANDWIDTH_RATIO} decay rates")));
    }
    let spacing = bandwidth / n_modes as f64;
    let coupling = (gamma * spacing / (2.0 * PI)).sqrt();
    let omegas = (0..n_modes).map(|k| omega_a - bandwidth / 2.0 + (k as f64 + 0.5) * spacing).collect();
    ModeGrid::new(omegas, vec![coupling; n_modes])
}

/// Recurrence time `2π/Δ` of a uniform grid.
pub fn recurrence_time(n_modes: usize, bandwidth: f64) -> f64 {
    2.0 * PI * n_modes as f64 / bandwidth
}

/// Times `[0, min(5/Γ, t_rec/2)]` over which a flat grid is trusted to
/// mimic exponential decay.
pub fn se_validity_window(n_modes: usize, bandwidth: f64, gamma: f64) -> f64 {
    (5.0 / gamma).min(0.5 * recurrence_time(n_modes, bandwidth))
}

/// Everything the oracle reports for one `(θ, t)` point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleSample {
    pub time: f64,
    /// `|⟨e, vac|ψ_Aa(t)⟩|²`.
    pub p: f64,
    pub k_qubit: f64,
    pub k_partner: f64,
    pub k_moon: f64,
    /// Largest third reduced-density eigenvalue over the three cuts.
    pub max_third_eigenvalue: f64,
    /// `| ‖ψ(t)‖² − 1 |` of the evolved pair state.
    pub norm_drift: f64,
}

/// A model's Hamiltonian with its cached eigendecomposition.
#[derive(Clone, Debug)]
pub struct Oracle {
    kind: ModelKind,
    basis: SingleExcitationBasis,
    hamiltonian: DenseHermitian,
}

impl Oracle {
    pub fn new(model: &ChannelModel) -> Result<Self> {
        let basis = SingleExcitationBasis::for_model(model)?;
        let hamiltonian = build_hamiltonian(model)?;
        Ok(Self { kind: model.kind(), basis, hamiltonian })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn basis(&self) -> &SingleExcitationBasis {
        &self.basis
    }

    pub fn hamiltonian(&self) -> &DenseHermitian {
        &self.hamiltonian
    }

    /// Pair state at `t`, starting from `|e, vac⟩`.
    pub fn pair_state(&self, t: f64) -> Result<CVector> {
        let mut psi0 = CVector::zeros(self.basis.sector_dim());
        psi0[0] = Complex64::new(1.0, 0.0);
        evolve(&self.hamiltonian, &psi0, t)
    }

    pub fn state(&self, theta: PreparationAngle, t: f64) -> Result<CVector> {
        Ok(assemble_tripartite(theta, &self.pair_state(t)?))
    }

    pub fn sample(&self, theta: PreparationAngle, t: f64) -> Result<OracleSample> {
        let pair = self.pair_state(t)?;
        let norm_drift = (pair.norm_squared() - 1.0).abs();
        let psi = assemble_tripartite(theta, &pair);
        let k = |cut| numerical_k(&psi, cut, &self.basis);
        let mut max_third = 0.0_f64;
        for cut in BipartitionCut::ALL {
            let spectrum = numerical_spectrum(&psi, cut, &self.basis)?;
            if let Some(&third) = spectrum.get(2) {
                max_third = max_third.max(third);
            }
        }
        Ok(OracleSample {
            time: t,
            p: pair[0].norm_sqr(),
            k_qubit: k(BipartitionCut::QubitVsRest)?,
            k_partner: k(BipartitionCut::PartnerVsRest)?,
            k_moon: k(BipartitionCut::MoonVsRest)?,
            max_third_eigenvalue: max_third,
            norm_drift,
        })
    }
}
