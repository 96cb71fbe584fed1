//! Brute-force oracle: the exact qubit-plus-bath model on a discretized
//! environment.
//!
//! The bath is a finite set of modes on a midpoint frequency grid with
//! couplings fixed by g_k² = J(ω_k) Δω / 4, the unique normalization for
//! which the discrete dephasing exponent Σ_k 4 g_k² (1 - cos ω_k t)/ω_k²
//! converges to the closed-form decoherence function as the grid refines.
//!
//! Everything downstream is plain coherent-state algebra. A conditional
//! displacement with amplitude ξ_k(t₂,t₁)/2 = g_k (e^{iω_k t₁} - e^{iω_k t₂})/ω_k
//! acts on each mode, with the sign set by the qubit branch. Composing the
//! two segments around the pulse uses D(α)D(β) = e^{i Im(α β̄)} D(α+β); the
//! accumulated global phases do NOT cancel between branches and are the
//! physical origin of the post-pulse control phase y(t), so this module
//! keeps them explicitly (a single-mode Schrödinger-equation regression test
//! pins them). No closed-form kernel appears anywhere here, which is what
//! makes the module an independent check of `spectral` and
//! `maps::propagate_microscopic`.

use crate::bloch::DensityMatrix2;
use crate::error::{Error, Result};
use crate::spectral::SpectralParams;
use num_complex::Complex64;

/// Environment branch states generated by evolution before/after the pulse:
/// the first letter is the qubit branch after the pulse, the second before.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Ee,
    Ge,
    Eg,
    Gg,
}

impl Branch {
    /// Displacement sign of the first segment (0, t̃).
    fn first_sign(self) -> f64 {
        match self {
            Branch::Ee | Branch::Ge => 1.0,
            Branch::Eg | Branch::Gg => -1.0,
        }
    }

    /// Displacement sign of the second segment (t̃, t).
    fn second_sign(self) -> f64 {
        match self {
            Branch::Ee | Branch::Eg => 1.0,
            Branch::Ge | Branch::Gg => -1.0,
        }
    }
}

/// Per-mode coherent amplitudes of one branch plus its accumulated global
/// phase.
#[derive(Debug, Clone)]
pub struct BranchState {
    pub amplitudes: Vec<Complex64>,
    pub phase: f64,
}

/// Discretized zero-temperature bath.
#[derive(Debug, Clone)]
pub struct DiscretizedEnv {
    omegas: Vec<f64>,
    couplings: Vec<f64>,
}

impl DiscretizedEnv {
    /// Midpoint grid of `n_modes` frequencies on (0, omega_max] with the
    /// convergence-fixed coupling normalization.
    pub fn new(params: &SpectralParams, n_modes: usize, omega_max: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::Config("environment needs at least one mode".into()));
        }
        if !(omega_max > 0.0) {
            return Err(Error::Config(format!(
                "frequency cutoff must be positive, got {omega_max}"
            )));
        }
        let dw = omega_max / n_modes as f64;
        let mut omegas = Vec::with_capacity(n_modes);
        let mut couplings = Vec::with_capacity(n_modes);
        for k in 0..n_modes {
            let w = (k as f64 + 0.5) * dw;
            omegas.push(w);
            couplings.push((params.spectral_density(w)? * dw / 4.0).sqrt());
        }
        Ok(Self { omegas, couplings })
    }

    /// Explicit mode list, mostly for single-mode unit tests.
    pub fn from_modes(omegas: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        if omegas.is_empty() || omegas.len() != couplings.len() {
            return Err(Error::Config("mode and coupling lists must match and be non-empty".into()));
        }
        if omegas.iter().any(|&w| w <= 0.0) {
            return Err(Error::Config("mode frequencies must be positive".into()));
        }
        Ok(Self { omegas, couplings })
    }

    pub fn n_modes(&self) -> usize {
        self.omegas.len()
    }

    pub fn omega(&self, k: usize) -> f64 {
        self.omegas[k]
    }

    pub fn coupling(&self, k: usize) -> f64 {
        self.couplings[k]
    }

    /// Displacement amplitude ξ_k(t) = 2 g_k (1 - e^{iω_k t})/ω_k of mode `k`
    /// accumulated over (0, t).
    pub fn displacement_amplitude(&self, k: usize, t: f64) -> Complex64 {
        let w = self.omegas[k];
        2.0 * self.couplings[k] * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, w * t)) / w
    }

    /// Coherent amplitudes and global phase of one branch state at time `t`
    /// with the pulse at `t_pulse` (composition of the two conditional
    /// displacements around the pulse).
    pub fn branch_state(&self, branch: Branch, t: f64, t_pulse: f64) -> Result<BranchState> {
        if !(0.0 <= t_pulse && t_pulse <= t) {
            return Err(Error::Domain(format!(
                "branch state needs t >= t_pulse >= 0, got t = {t}, t_pulse = {t_pulse}"
            )));
        }
        let s1 = branch.first_sign();
        let s2 = branch.second_sign();
        let mut amplitudes = Vec::with_capacity(self.n_modes());
        let mut phase = 0.0;
        for k in 0..self.n_modes() {
            let a = self.displacement_amplitude(k, t_pulse);
            let b = self.displacement_amplitude(k, t) - a;
            // D(s2 b/2) D(s1 a/2) = e^{i Im((s2 b/2)(s1 a/2)^*)} D((s2 b + s1 a)/2)
            phase += 0.25 * s1 * s2 * (b * a.conj()).im;
            amplitudes.push(0.5 * (s2 * b + s1 * a));
        }
        Ok(BranchState { amplitudes, phase })
    }

    /// ⟨Ψ_a|Ψ_b⟩ as the product over modes of coherent-state overlaps
    /// ⟨α|β⟩ = exp(-|α|²/2 - |β|²/2 + ᾱβ) times the branch phase difference.
    /// Modes are reduced in ascending order so the result is bitwise
    /// reproducible.
    pub fn branch_overlap(&self, a: Branch, b: Branch, t: f64, t_pulse: f64) -> Result<Complex64> {
        let sa = self.branch_state(a, t, t_pulse)?;
        let sb = self.branch_state(b, t, t_pulse)?;
        let mut exponent = Complex64::new(0.0, sb.phase - sa.phase);
        for k in 0..self.n_modes() {
            let alpha = sa.amplitudes[k];
            let beta = sb.amplitudes[k];
            exponent += alpha.conj() * beta - 0.5 * (alpha.norm_sqr() + beta.norm_sqr());
        }
        Ok(exponent.exp())
    }

    /// Dephasing exponent of the discrete bath, evaluated through the branch
    /// overlap: Γ_oracle(t) = -ln ⟨Ψ_gg|Ψ_ee⟩ (real and positive; the branch
    /// phases cancel identically for this pair).
    pub fn gamma_oracle(&self, t: f64) -> Result<f64> {
        let ov = self.branch_overlap(Branch::Gg, Branch::Ee, t, t)?;
        debug_assert!(ov.im.abs() < 1e-12);
        Ok(-ov.re.ln())
    }

    /// Discrete sine transform Σ_k 4 g_k² sin(ω_k t)/ω_k², the bath-side
    /// counterpart of the closed-form phase generator Γ̃(t).
    pub fn phase_generator(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.n_modes() {
            let w = self.omegas[k];
            let g = self.couplings[k];
            acc += 4.0 * g * g * (w * t).sin() / (w * w);
        }
        acc
    }

    /// Phase of ⟨Ψ_ee|Ψ_ge⟩, the quantity the closed-form control phase
    /// y(t) must reproduce (modulo 2π).
    pub fn control_phase_oracle(&self, t: f64, t_pulse: f64) -> Result<f64> {
        Ok(self.branch_overlap(Branch::Ee, Branch::Ge, t, t_pulse)?.arg())
    }

    /// Reduced density matrix of the qubit at time `t` for the initial state
    /// c_e|e⟩ + c_g|g⟩ and a y-rotation by `phi` at `t_pulse`, assembled from
    /// branch overlaps alone.
    pub fn density_matrix(
        &self,
        c_e: Complex64,
        c_g: Complex64,
        phi: f64,
        t: f64,
        t_pulse: f64,
    ) -> Result<DensityMatrix2> {
        let norm = c_e.norm_sqr() + c_g.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Input(format!(
                "state amplitudes must be normalized, |c_e|^2 + |c_g|^2 = {norm}"
            )));
        }
        let c = (0.5 * phi).cos();
        let s = (0.5 * phi).sin();
        let ge_ee = self.branch_overlap(Branch::Ge, Branch::Ee, t, t_pulse)?;
        let ge_eg = self.branch_overlap(Branch::Ge, Branch::Eg, t, t_pulse)?;
        let gg_ee = self.branch_overlap(Branch::Gg, Branch::Ee, t, t_pulse)?;
        let gg_eg = self.branch_overlap(Branch::Gg, Branch::Eg, t, t_pulse)?;
        let ee_eg = self.branch_overlap(Branch::Ee, Branch::Eg, t, t_pulse)?;

        let pe = c_e.norm_sqr();
        let pg = c_g.norm_sqr();
        let rho_ee = pe * c * c + pg * s * s - 2.0 * s * c * (c_e.conj() * c_g * ee_eg).re;
        let rho_eg = pe * s * c * ge_ee - c_e.conj() * c_g * s * s * ge_eg
            + c_e * c_g.conj() * c * c * gg_ee
            - pg * c * s * gg_eg;
        let ee = Complex64::new(rho_ee, 0.0);
        Ok(DensityMatrix2 {
            ee,
            eg: rho_eg,
            ge: rho_eg.conj(),
            gg: Complex64::new(1.0 - rho_ee, 0.0),
        })
    }

    /// Bloch vector of [`Self::density_matrix`].
    pub fn bloch(
        &self,
        c_e: Complex64,
        c_g: Complex64,
        phi: f64,
        t: f64,
        t_pulse: f64,
    ) -> Result<crate::bloch::BlochVector> {
        Ok(self.density_matrix(c_e, c_g, phi, t, t_pulse)?.to_bloch())
    }
}

/// Amplitudes (c_e, c_g) of the pure state at polar angle `theta` and
/// azimuth `azimuth` on the Bloch sphere.
pub fn amplitudes_from_angles(theta: f64, azimuth: f64) -> (Complex64, Complex64) {
    (
        Complex64::new((0.5 * theta).cos(), 0.0),
        Complex64::from_polar((0.5 * theta).sin(), azimuth),
    )
}
