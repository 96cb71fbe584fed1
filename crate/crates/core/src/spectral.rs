//! Closed-form dephasing kernels for the Ohmic-class bath.
//!
//! The bath spectral density is J(ω) = ω^s e^{-ω} (cutoff frequency fixed to
//! one, so times are measured in units of 1/ω_c and frequencies in units of
//! ω_c). A zero-temperature bosonic bath with this density dephases a qubit
//! with
//!
//! - decay rate        γ(t) = (1+t²)^{-s/2} Γ[s] sin(s·arctan t),
//! - decoherence fn    Γ(t) = ∫₀ᵗ γ = Γ[s]/(s-1) [1 - (1+t²)^{-s/2}(cos(s·arctan t) + t sin(s·arctan t))],
//! - phase generator   Γ̃(t) = Γ[s-1] (1+t²)^{-s/2} [sin(s·arctan t) - t cos(s·arctan t)],
//!
//! where Γ[·] is the Euler Gamma function. The three are the cosine- and
//! sine-transforms of J: Γ(t) = ∫ J(ω)(1-cos ωt)/ω² dω and
//! Γ̃(t) = ∫ J(ω) sin(ωt)/ω² dω, which fixes both the (1+t²)^{-s/2} factor
//! (the expression must stay real and finite for all t ≥ 0) and the Γ[s-1]
//! prefactor of Γ̃. Both are pinned against the discretized-bath oracle in
//! `oracle`, which evaluates the same quantities with no closed forms at all.
//!
//! For s > 2 the rate γ(t) dips negative on intervals bounded by the roots
//! t_k = tan(kπ/s); those sign changes drive everything in `optimizer`.

use crate::error::{Error, Result};
use crate::numerics;

/// Largest admissible Ohmicity exponent. Beyond this the Gamma-function
/// accuracy budget (1e-12 relative) is no longer guaranteed.
pub const S_MAX: f64 = 8.0;

/// Ohmic-family bath parameters. Construction precomputes Γ[s] and Γ[s-1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    s: f64,
    gamma_s: f64,
    gamma_s_minus_1: f64,
}

/// One row of a kernel table: the three kernels evaluated at a common time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub t: f64,
    pub gamma: f64,
    pub big_gamma: f64,
    pub tilde_gamma: f64,
}

/// Dephasing interval selected for the control problem: pulse instant
/// `t_tilde` (first rate zero crossing) and horizon `t_horizon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizon {
    pub t_tilde: f64,
    pub t_horizon: f64,
}

impl SpectralParams {
    /// Requires 1 < s ≤ 8. The lower bound keeps the Γ[s]/(s-1) prefactor
    /// finite, the upper bound keeps the precomputed Gamma values honest.
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 1.0 && s <= S_MAX) {
            return Err(Error::Domain(format!(
                "Ohmicity exponent s must satisfy 1 < s <= {S_MAX}, got {s}"
            )));
        }
        Ok(Self {
            s,
            gamma_s: numerics::gamma(s),
            gamma_s_minus_1: numerics::gamma(s - 1.0),
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Γ[s], precomputed at construction.
    pub fn euler_gamma_s(&self) -> f64 {
        self.gamma_s
    }

    /// Γ[s-1], precomputed at construction.
    pub fn euler_gamma_s_minus_1(&self) -> f64 {
        self.gamma_s_minus_1
    }

    /// Spectral density J(ω) = ω^s e^{-ω}, ω ≥ 0.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        if omega < 0.0 {
            return Err(Error::Domain(format!("frequency must be >= 0, got {omega}")));
        }
        Ok(omega.powf(self.s) * (-omega).exp())
    }

    /// Dephasing decay rate γ(t), t ≥ 0. Negative values occur for s > 2 on
    /// the intervals between consecutive roots tan(kπ/s).
    pub fn decay_rate(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!("time must be >= 0, got {t}")));
        }
        Ok(self.decay_rate_raw(t))
    }

    pub(crate) fn decay_rate_raw(&self, t: f64) -> f64 {
        let theta = t.atan();
        (1.0 + t * t).powf(-0.5 * self.s) * self.gamma_s * (self.s * theta).sin()
    }

    /// Decoherence function Γ(t) = ∫₀ᵗ γ(u) du, t ≥ 0. Nonnegative for all
    /// t, with limit Γ[s]/(s-1) as t → ∞; transverse Bloch components decay
    /// as e^{-Γ(t)}.
    pub fn decoherence(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!("time must be >= 0, got {t}")));
        }
        Ok(self.decoherence_raw(t))
    }

    pub(crate) fn decoherence_raw(&self, t: f64) -> f64 {
        let theta = t.atan();
        let s = self.s;
        let bracket =
            1.0 - (1.0 + t * t).powf(-0.5 * s) * ((s * theta).cos() + t * (s * theta).sin());
        self.gamma_s / (s - 1.0) * bracket
    }

    /// Phase generator Γ̃(t) = ∫ J(ω) sin(ωt)/ω² dω
    /// = Γ[s-1] (1+t²)^{-s/2} [sin(s·arctan t) - t cos(s·arctan t)].
    ///
    /// The prefactor Γ[s-1] and the (1+t²) power are fixed by the
    /// sine-transform identity and cross-checked against the discretized
    /// bath in `oracle::DiscretizedEnv::phase_generator` and against the
    /// branch-overlap phases of the exact model.
    pub fn phase_generator(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!("time must be >= 0, got {t}")));
        }
        Ok(self.phase_generator_raw(t))
    }

    pub(crate) fn phase_generator_raw(&self, t: f64) -> f64 {
        let theta = t.atan();
        let s = self.s;
        self.gamma_s_minus_1
            * (1.0 + t * t).powf(-0.5 * s)
            * ((s * theta).sin() - t * (s * theta).cos())
    }

    /// Control phase y(t) = Γ̃(t) - Γ̃(t̃) - Γ̃(t-t̃) accumulated by the
    /// coherences after a pulse at `t_pulse` ≤ `t`. Vanishes at t = t̃.
    pub fn control_phase(&self, t: f64, t_pulse: f64) -> Result<f64> {
        if t_pulse < 0.0 {
            return Err(Error::Domain(format!("pulse time must be >= 0, got {t_pulse}")));
        }
        if t < t_pulse {
            return Err(Error::Domain(format!(
                "control phase needs t >= t_pulse, got t = {t}, t_pulse = {t_pulse}"
            )));
        }
        Ok(self.control_phase_raw(t, t_pulse))
    }

    pub(crate) fn control_phase_raw(&self, t: f64, t_pulse: f64) -> f64 {
        self.phase_generator_raw(t)
            - self.phase_generator_raw(t_pulse)
            - self.phase_generator_raw(t - t_pulse)
    }

    /// All positive roots of γ, i.e. t_k = tan(kπ/s) for integer k ≥ 1 with
    /// kπ/s < π/2, ascending. Empty for s ≤ 2. Each closed-form root is
    /// tightened by bisection on a bracketing interval until
    /// |γ(root)| < 1e-12 · Γ[s].
    pub fn rate_zero_crossings(&self) -> Vec<f64> {
        let mut roots = Vec::new();
        let mut k = 1.0;
        // k pi / s < pi / 2  <=>  k < s / 2 (strict: tan(pi/2) diverges)
        while k < 0.5 * self.s * (1.0 - 1e-12) {
            let t0 = (k * std::f64::consts::PI / self.s).tan();
            roots.push(self.refine_root(t0));
            k += 1.0;
        }
        roots
    }

    fn refine_root(&self, t0: f64) -> f64 {
        let f = |t: f64| self.decay_rate_raw(t);
        let mut half_width = 5e-3 * (1.0 + t0);
        for _ in 0..8 {
            let lo = (t0 - half_width).max(1e-12);
            let hi = t0 + half_width;
            if let Some(root) = numerics::bisect(f, lo, hi, 1e-14 * (1.0 + t0)) {
                debug_assert!(self.decay_rate_raw(root).abs() < 1e-12 * self.gamma_s);
                return root;
            }
            half_width *= 2.0;
        }
        t0 // bracketing failed (cannot happen for simple roots); keep closed form
    }

    /// Dephasing interval for the single-pulse protocol: t̃ is the first rate
    /// zero crossing; the horizon is the second crossing when one exists
    /// (s > 4), otherwise `default_t`.
    pub fn horizon(&self, default_t: f64) -> Result<Horizon> {
        let crossings = self.rate_zero_crossings();
        let Some(&t_tilde) = crossings.first() else {
            return Err(Error::NoCrossing { s: self.s });
        };
        let t_horizon = crossings.get(1).copied().unwrap_or(default_t);
        if t_tilde >= t_horizon {
            return Err(Error::HorizonTooShort { t_tilde, horizon: t_horizon });
        }
        Ok(Horizon { t_tilde, t_horizon })
    }

    /// The three kernels at a common time.
    pub fn kernel_sample(&self, t: f64) -> Result<KernelSample> {
        if t < 0.0 {
            return Err(Error::Domain(format!("time must be >= 0, got {t}")));
        }
        Ok(KernelSample {
            t,
            gamma: self.decay_rate_raw(t),
            big_gamma: self.decoherence_raw(t),
            tilde_gamma: self.phase_generator_raw(t),
        })
    }
}
