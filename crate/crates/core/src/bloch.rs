//! Bloch-vector state algebra for a single qubit, the dephasing dissipator in
//! Bloch form, purity flux, trajectory admissibility and control-field
//! reconstruction.
//!
//! Conventions: ρ = (I + r·σ)/2 with r = (rx, ry, rz), so purity is
//! p = (|r|² + 1)/2 and the magnitude of the off-diagonal coherence is
//! |r_xy| = 2|ρ_eg| (an equatorial pure state has coherence 1). The Bloch
//! pairing is normalized with the ½Tr convention, so the equation of motion
//! reads ṙ = 2h×r + D r + d and the purity flux is f = r·(D r + d).

use crate::error::{Error, Result};
use crate::spectral::SpectralParams;
use num_complex::Complex64;

/// Rotation generators available on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
            Axis::Z => write!(f, "z"),
        }
    }
}

/// Bloch vector. Physical states satisfy |r| ≤ 1; audit paths deliberately
/// carry vectors that violate this, so the bound is checked, never enforced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl BlochVector {
    pub const fn new(rx: f64, ry: f64, rz: f64) -> Self {
        Self { rx, ry, rz }
    }

    /// Pure state in the x-z plane at polar angle `phi` from the +z pole.
    pub fn from_polar(phi: f64) -> Self {
        Self::new(phi.sin(), 0.0, phi.cos())
    }

    pub fn norm_sq(&self) -> f64 {
        self.rx * self.rx + self.ry * self.ry + self.rz * self.rz
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Purity p = (|r|² + 1)/2. Raw value; exceeds 1 for unphysical vectors.
    pub fn purity(&self) -> f64 {
        0.5 * (self.norm_sq() + 1.0)
    }

    /// Coherence magnitude √(rx² + ry²) = 2|ρ_eg|, normalized so the Bloch
    /// equator reads 1.
    pub fn coherence(&self) -> f64 {
        (self.rx * self.rx + self.ry * self.ry).sqrt()
    }

    /// Inside the closed unit ball up to `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.norm() <= 1.0 + tol
    }

    /// Rotation by `angle` about `axis`, right-handed: R_y(φ) maps the +z
    /// pole to (sin φ, 0, cos φ). Norm is preserved to machine precision.
    pub fn rotated(&self, axis: Axis, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let Self { rx, ry, rz } = *self;
        match axis {
            Axis::X => Self::new(rx, ry * c - rz * s, ry * s + rz * c),
            Axis::Y => Self::new(rx * c + rz * s, ry, rz * c - rx * s),
            Axis::Z => Self::new(rx * c - ry * s, rx * s + ry * c, rz),
        }
    }

    /// Multiply the transverse components, leaving rz alone. This is the
    /// elementary dephasing segment e^{-ΔΓ}.
    pub fn scale_transverse(&self, factor: f64) -> Self {
        Self::new(self.rx * factor, self.ry * factor, self.rz)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.rx, self.ry, self.rz]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// 2x2 density matrix in the {e, g} basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    pub ee: Complex64,
    pub eg: Complex64,
    pub ge: Complex64,
    pub gg: Complex64,
}

impl DensityMatrix2 {
    pub fn from_bloch(r: BlochVector) -> Self {
        let eg = Complex64::new(0.5 * r.rx, -0.5 * r.ry);
        Self {
            ee: Complex64::new(0.5 * (1.0 + r.rz), 0.0),
            eg,
            ge: eg.conj(),
            gg: Complex64::new(0.5 * (1.0 - r.rz), 0.0),
        }
    }

    pub fn to_bloch(&self) -> BlochVector {
        BlochVector::new(2.0 * self.eg.re, -2.0 * self.eg.im, (self.ee - self.gg).re)
    }

    pub fn trace(&self) -> Complex64 {
        self.ee + self.gg
    }

    pub fn purity(&self) -> f64 {
        self.ee.re * self.ee.re + self.gg.re * self.gg.re + 2.0 * self.eg.norm_sqr()
    }

    /// Max deviation from ρ = ρ†.
    pub fn hermiticity_error(&self) -> f64 {
        let a = (self.ge - self.eg.conj()).norm();
        let b = self.ee.im.abs().max(self.gg.im.abs());
        a.max(b)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.ee.re;
        let b = self.gg.re;
        let half_diff = 0.5 * (a - b);
        let disc = (half_diff * half_diff + self.eg.norm_sqr()).sqrt();
        [0.5 * (a + b) - disc, 0.5 * (a + b) + disc]
    }

    /// Hermitian, unit trace and positive semidefinite, all up to `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        (self.trace().re - 1.0).abs() <= tol
            && self.trace().im.abs() <= tol
            && self.hermiticity_error() <= tol
            && self.eigenvalues()[0] >= -tol
    }
}

/// Time-ordered Bloch samples. Pulse instants are carried as two consecutive
/// samples with equal time stamps (pre/post), recorded in `pulse_indices` by
/// the index of the pre-pulse sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<(f64, BlochVector)>,
    pulse_indices: Vec<usize>,
}

impl Trajectory {
    pub fn new(samples: Vec<(f64, BlochVector)>, pulse_indices: Vec<usize>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Input(format!(
                "trajectory needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        for w in samples.windows(2) {
            if !(w[1].0 >= w[0].0) {
                return Err(Error::Input("trajectory times must be non-decreasing".into()));
            }
        }
        for &i in &pulse_indices {
            if i + 1 >= samples.len() || samples[i].0 != samples[i + 1].0 {
                return Err(Error::Input(format!(
                    "pulse index {i} does not mark a duplicated time stamp"
                )));
            }
        }
        for (i, w) in samples.windows(2).enumerate() {
            if w[1].0 == w[0].0 && !pulse_indices.contains(&i) {
                return Err(Error::Input(format!(
                    "duplicated time stamp at index {i} without a pulse marker"
                )));
            }
        }
        Ok(Self { samples, pulse_indices })
    }

    pub fn samples(&self) -> &[(f64, BlochVector)] {
        &self.samples
    }

    pub fn pulse_indices(&self) -> &[usize] {
        &self.pulse_indices
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first_time(&self) -> f64 {
        self.samples[0].0
    }

    pub fn last_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }
}

/// Dephasing dissipator in Bloch form: D = diag(-γ, -γ, 0), d = 0, normalized
/// so that ṙ = D r + d.
pub fn dissipator_bloch_form(gamma: f64) -> ([[f64; 3]; 3], [f64; 3]) {
    (
        [[-gamma, 0.0, 0.0], [0.0, -gamma, 0.0], [0.0, 0.0, 0.0]],
        [0.0, 0.0, 0.0],
    )
}

/// Purity flux f(r) = r·(D r + d) = -γ (rx² + ry²): the rate of purity change
/// attributable to the dissipator alone. Negative while the bath decoheres,
/// positive during revivals (γ < 0), zero exactly on the z-axis.
pub fn purity_flux(state: BlochVector, gamma: f64) -> f64 {
    -gamma * (state.rx * state.rx + state.ry * state.ry)
}

/// Grid specification for flux-field snapshots over the x-z disc (ry = 0).
#[derive(Debug, Clone, Copy)]
pub struct FluxGridSpec {
    /// Half-width of the square grid; must lie in (0, 1].
    pub extent: f64,
    /// Points per axis.
    pub resolution: usize,
}

/// One sampled point of a flux snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxSample {
    pub rx: f64,
    pub rz: f64,
    pub flux: f64,
}

/// Sample the purity flux at time `t` over a grid on the x-z disc. Points
/// outside the unit disc are omitted. Row-major: rx varies in the outer loop,
/// rz in the inner one, both ascending.
pub fn flux_field(
    grid: &FluxGridSpec,
    t: f64,
    params: &SpectralParams,
) -> Result<Vec<FluxSample>> {
    if grid.resolution == 0 {
        return Err(Error::Config("flux grid resolution must be positive".into()));
    }
    if !(grid.extent > 0.0 && grid.extent <= 1.0) {
        return Err(Error::Config(format!(
            "flux grid extent must lie in (0, 1], got {}",
            grid.extent
        )));
    }
    let gamma = params.decay_rate(t)?;
    let n = grid.resolution;
    let coord = |i: usize| {
        if n == 1 {
            0.0
        } else {
            -grid.extent + 2.0 * grid.extent * i as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let rx = coord(i);
        for j in 0..n {
            let rz = coord(j);
            if rx * rx + rz * rz > 1.0 {
                continue;
            }
            out.push(FluxSample {
                rx,
                rz,
                flux: purity_flux(BlochVector::new(rx, 0.0, rz), gamma),
            });
        }
    }
    Ok(out)
}

/// States with |r| below this are excluded from residual scans and field
/// reconstruction (the admissibility criterion assumes non-degenerate
/// eigenvalues).
pub const DEGENERATE_NORM_FLOOR: f64 = 1e-9;

fn stencil_ok(traj: &Trajectory, i: usize) -> bool {
    let s = traj.samples();
    s[i].0 > s[i - 1].0 && s[i + 1].0 > s[i].0
}

/// Maximum over interior samples of |f(r_i, t_i) - (|r_{i+1}|² - |r_{i-1}|²)/(4Δt)|.
///
/// A trajectory is Hamiltonian-implementable under the fixed dephasing
/// dissipator exactly when this residual vanishes as the grid is refined
/// (O(Δt²) for smooth trajectories). Stencils that straddle a pulse pair and
/// samples with |r| below [`DEGENERATE_NORM_FLOOR`] are skipped.
pub fn admissibility_residual(traj: &Trajectory, params: &SpectralParams) -> Result<f64> {
    admissibility_residual_with_rate(traj, |t| params.decay_rate_raw(t))
}

/// Same as [`admissibility_residual`] with a caller-supplied decay rate.
pub fn admissibility_residual_with_rate<R: Fn(f64) -> f64>(
    traj: &Trajectory,
    rate: R,
) -> Result<f64> {
    let s = traj.samples();
    if s.len() < 3 {
        return Err(Error::Input(format!(
            "residual scan needs at least 3 samples, got {}",
            s.len()
        )));
    }
    let mut worst = 0.0_f64;
    for i in 1..s.len() - 1 {
        if !stencil_ok(traj, i) {
            continue;
        }
        let (t, r) = s[i];
        if r.norm() < DEGENERATE_NORM_FLOOR {
            continue;
        }
        let flux = purity_flux(r, rate(t));
        let dp = (s[i + 1].1.norm_sq() - s[i - 1].1.norm_sq()) / (2.0 * (s[i + 1].0 - s[i - 1].0));
        worst = worst.max((flux - dp).abs());
    }
    Ok(worst)
}

/// One reconstructed control-field sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSample {
    pub t: f64,
    pub field: [f64; 3],
}

/// Minimal-norm control field h(t) that reproduces the trajectory under
/// ṙ = 2h×r + D r: h_i = (r_i × v_i) / (2|r_i|²) with v_i the
/// central-difference velocity minus D r_i. Errors on samples with |r| below
/// [`DEGENERATE_NORM_FLOOR`].
pub fn reconstruct_control_field(
    traj: &Trajectory,
    params: &SpectralParams,
) -> Result<Vec<ControlSample>> {
    reconstruct_control_field_with_rate(traj, |t| params.decay_rate_raw(t))
}

/// Same as [`reconstruct_control_field`] with a caller-supplied decay rate
/// (γ ≡ 0 recovers the purely unitary torque convention).
pub fn reconstruct_control_field_with_rate<R: Fn(f64) -> f64>(
    traj: &Trajectory,
    rate: R,
) -> Result<Vec<ControlSample>> {
    let s = traj.samples();
    if s.len() < 3 {
        return Err(Error::Input(format!(
            "field reconstruction needs at least 3 samples, got {}",
            s.len()
        )));
    }
    let mut out = Vec::new();
    for i in 1..s.len() - 1 {
        if !stencil_ok(traj, i) {
            continue;
        }
        let (t, r) = s[i];
        let n2 = r.norm_sq();
        if n2.sqrt() < DEGENERATE_NORM_FLOOR {
            return Err(Error::SingularState { t });
        }
        let dt = s[i + 1].0 - s[i - 1].0;
        let g = rate(t);
        let v = [
            (s[i + 1].1.rx - s[i - 1].1.rx) / dt + g * r.rx,
            (s[i + 1].1.ry - s[i - 1].1.ry) / dt + g * r.ry,
            (s[i + 1].1.rz - s[i - 1].1.rz) / dt,
        ];
        let cross = [
            r.ry * v[2] - r.rz * v[1],
            r.rz * v[0] - r.rx * v[2],
            r.rx * v[1] - r.ry * v[0],
        ];
        out.push(ControlSample {
            t,
            field: [cross[0] / (2.0 * n2), cross[1] / (2.0 * n2), cross[2] / (2.0 * n2)],
        });
    }
    Ok(out)
}
