//! The three propagators of the controlled dephasing qubit and the
//! complete-positivity machinery that tells them apart.
//!
//! * `propagate_uncontrolled` — free dephasing, transverse components shrink
//!   by e^{-Γ(t)}.
//! * `propagate_fixed_dissipator` — instantaneous rotations interleaved with
//!   free segments, keeping the dissipator unchanged. Between pulses the
//!   transverse components multiply by e^{-(Γ(t)-Γ(t_prev))}; this factor
//!   exceeds one while Γ decreases, which is exactly how the composed map
//!   loses complete positivity: trajectories may leave the Bloch ball, and
//!   the Choi matrix of the composition acquires a negative eigenvalue.
//! * `propagate_microscopic` — the exact reduced dynamics of the qubit plus
//!   bath with a single instantaneous y-rotation, in closed form. For t ≥ t̃,
//!   with E(t) = e^{-Γ(t)}, E_s = e^{-Γ(t-t̃)}, Q = e^{2[Γ(t)-Γ(t̃)-Γ(t-t̃)]},
//!   y = y(t) the control phase, C² = cos²(φ/2) and S² = sin²(φ/2):
//!
//!   rx(t) = rz(0) sin φ E_s cos y + rx(0) E(t) [C² - S² Q]
//!   ry(t) =        sin φ E_s sin y + ry(0) E(t) [C² + S² Q]
//!   rz(t) = rz(0) cos φ - rx(0) sin φ e^{-Γ(t̃)}
//!
//!   These follow from the conditional-displacement branch algebra (see
//!   `oracle`, which reproduces them to discretization accuracy with no
//!   closed forms). Two consequences worth noting: the bath-induced ry term
//!   carries no rz(0) factor — it is an affine offset, present even for the
//!   maximally mixed input — and the S² term enters ry with a plus sign
//!   (the φ = π limit must reduce to a pure rotation when Γ ≡ 0). The
//!   resulting map is affine, trace preserving, and completely positive at
//!   every time, as the exact dynamics must be.

use crate::bloch::{Axis, BlochVector};
use crate::error::{Error, Result};
use crate::numerics::{fibonacci_sphere, hermitian4_eigenvalues};
use crate::spectral::SpectralParams;
use num_complex::Complex64;

/// One instantaneous rotation of the control protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub time: f64,
    pub axis: Axis,
    pub angle: f64,
}

/// Ordered list of instantaneous pulses. Times must be strictly increasing
/// and positive; axes are restricted to y and z (the microscopic propagator
/// supports one y pulse, and z pulses commute with dephasing).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControlProtocol {
    pulses: Vec<Pulse>,
}

impl ControlProtocol {
    pub fn new(pulses: Vec<Pulse>) -> Result<Self> {
        let mut prev = 0.0;
        for p in &pulses {
            if p.axis == Axis::X {
                return Err(Error::UnsupportedProtocol(
                    "x-axis pulses are not part of the protocol family".into(),
                ));
            }
            if !(p.time > prev) {
                return Err(Error::UnsupportedProtocol(
                    "pulse times must be strictly increasing and positive".into(),
                ));
            }
            prev = p.time;
        }
        Ok(Self { pulses })
    }

    /// Protocol with no pulses.
    pub fn uncontrolled() -> Self {
        Self::default()
    }

    /// The canonical single y-rotation.
    pub fn single_y(time: f64, angle: f64) -> Result<Self> {
        Self::new(vec![Pulse { time, axis: Axis::Y, angle }])
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    fn split_y(&self) -> Result<(Option<Pulse>, Vec<Pulse>)> {
        let ys: Vec<Pulse> = self.pulses.iter().copied().filter(|p| p.axis == Axis::Y).collect();
        if ys.len() > 1 {
            return Err(Error::UnsupportedProtocol(format!(
                "microscopic propagation supports at most one y pulse, got {}",
                ys.len()
            )));
        }
        let zs = self.pulses.iter().copied().filter(|p| p.axis == Axis::Z).collect();
        Ok((ys.first().copied(), zs))
    }
}

/// Propagation picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Uncontrolled,
    Fixed,
    Microscopic,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Uncontrolled => write!(f, "uncontrolled"),
            Mode::Fixed => write!(f, "fixed"),
            Mode::Microscopic => write!(f, "microscopic"),
        }
    }
}

/// Free dephasing: (rx, ry) shrink by e^{-Γ(t)}, rz is frozen.
pub fn propagate_uncontrolled(r0: BlochVector, t: f64, params: &SpectralParams) -> BlochVector {
    let e = (-params.decoherence_raw(t)).exp();
    r0.scale_transverse(e)
}

/// Piecewise evolution under the unchanged dissipator: free segments
/// multiply the transverse components by e^{-ΔΓ}, pulses act as rotations.
/// Right-continuous at pulse instants (a pulse at exactly `t` is applied).
/// The output is returned unclamped; it may leave the unit ball.
pub fn propagate_fixed_dissipator(
    r0: BlochVector,
    protocol: &ControlProtocol,
    t: f64,
    params: &SpectralParams,
) -> BlochVector {
    let mut state = r0;
    let mut gamma_prev = 0.0;
    for p in protocol.pulses() {
        if p.time > t {
            break;
        }
        let g = params.decoherence_raw(p.time);
        state = state.scale_transverse((gamma_prev - g).exp());
        state = state.rotated(p.axis, p.angle);
        gamma_prev = g;
    }
    state.scale_transverse((gamma_prev - params.decoherence_raw(t)).exp())
}

/// Exact reduced dynamics with at most one y pulse (plus any number of z
/// pulses, which commute through the dephasing). Right-continuous at pulse
/// instants. The result always lies inside the closed unit ball.
pub fn propagate_microscopic(
    r0: BlochVector,
    protocol: &ControlProtocol,
    t: f64,
    params: &SpectralParams,
) -> Result<BlochVector> {
    let (y_pulse, z_pulses) = protocol.split_y()?;

    // z rotations commute with every dephasing segment: those applied up to
    // the y pulse slide onto the initial state, later ones onto the output.
    let t_tilde = y_pulse.map(|p| p.time).unwrap_or(f64::INFINITY);
    let mut state = r0;
    for z in z_pulses.iter().filter(|z| z.time <= t && z.time < t_tilde) {
        state = state.rotated(Axis::Z, z.angle);
    }

    state = match y_pulse {
        Some(p) if t >= p.time => micro_single_y(state, p.angle, t, p.time, params),
        _ => propagate_uncontrolled(state, t, params),
    };

    for z in z_pulses.iter().filter(|z| z.time <= t && z.time >= t_tilde) {
        state = state.rotated(Axis::Z, z.angle);
    }
    Ok(state)
}

fn micro_single_y(
    r0: BlochVector,
    phi: f64,
    t: f64,
    t_tilde: f64,
    params: &SpectralParams,
) -> BlochVector {
    let g_t = params.decoherence_raw(t);
    let g_tt = params.decoherence_raw(t_tilde);
    let g_seg = params.decoherence_raw(t - t_tilde);
    let e_t = (-g_t).exp();
    let e_seg = (-g_seg).exp();
    let q = (2.0 * (g_t - g_tt - g_seg)).exp();
    let y = params.control_phase_raw(t, t_tilde);
    let (sin_phi, cos_phi) = phi.sin_cos();
    let c2 = (0.5 * phi).cos().powi(2);
    let s2 = (0.5 * phi).sin().powi(2);
    BlochVector::new(
        r0.rz * sin_phi * e_seg * y.cos() + r0.rx * e_t * (c2 - s2 * q),
        sin_phi * e_seg * y.sin() + r0.ry * e_t * (c2 + s2 * q),
        r0.rz * cos_phi - r0.rx * sin_phi * (-g_tt).exp(),
    )
}

/// Affine Bloch action of a qubit channel: r ↦ A r + b. Trace preservation
/// and Hermiticity preservation are structural (A, b real).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitMap {
    pub matrix: [[f64; 3]; 3],
    pub offset: [f64; 3],
}

impl QubitMap {
    pub fn identity() -> Self {
        Self {
            matrix: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            offset: [0.0; 3],
        }
    }

    /// Pure dephasing segment diag(e, e, 1).
    pub fn dephasing(e: f64) -> Self {
        Self {
            matrix: [[e, 0.0, 0.0], [0.0, e, 0.0], [0.0, 0.0, 1.0]],
            offset: [0.0; 3],
        }
    }

    /// SO(3) rotation matrix matching [`BlochVector::rotated`].
    pub fn rotation(axis: Axis, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let matrix = match axis {
            Axis::X => [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
            Axis::Y => [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
            Axis::Z => [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
        };
        Self { matrix, offset: [0.0; 3] }
    }

    pub fn apply(&self, r: BlochVector) -> BlochVector {
        let v = r.to_array();
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = self.offset[i];
            for (j, vj) in v.iter().enumerate() {
                out[i] += self.matrix[i][j] * vj;
            }
        }
        BlochVector::from_array(out)
    }

    /// Composition self ∘ other (apply `other` first).
    pub fn compose(&self, other: &QubitMap) -> Self {
        let mut matrix = [[0.0; 3]; 3];
        let mut offset = self.offset;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    matrix[i][j] += self.matrix[i][k] * other.matrix[k][j];
                }
                offset[i] += self.matrix[i][j] * other.offset[j];
            }
        }
        Self { matrix, offset }
    }

    /// Choi matrix with trace-1 normalization: C = (Φ ⊗ id)(|Ω⟩⟨Ω|) with Ω
    /// the maximally entangled pair. Positivity of C is equivalent to
    /// complete positivity of the channel.
    pub fn choi(&self) -> [[Complex64; 4]; 4] {
        let zero = Complex64::new(0.0, 0.0);
        let mut c = [[zero; 4]; 4];
        // matrix units E_ij expressed as (trace, complex Bloch combination)
        let units: [((usize, usize), f64, [Complex64; 3]); 4] = [
            ((0, 0), 1.0, [zero, zero, Complex64::new(1.0, 0.0)]),
            ((1, 1), 1.0, [zero, zero, Complex64::new(-1.0, 0.0)]),
            ((0, 1), 0.0, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), zero]),
            ((1, 0), 0.0, [Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0), zero]),
        ];
        for ((i, j), trace, r) in units {
            // v = A r + trace * b, complex-linearly
            let mut v = [zero; 3];
            for a in 0..3 {
                v[a] = Complex64::new(trace * self.offset[a], 0.0);
                for (b, rb) in r.iter().enumerate() {
                    v[a] += self.matrix[a][b] * rb;
                }
            }
            // Phi(E_ij) = (trace I + v . sigma)/2
            let phi = [
                [
                    (Complex64::new(trace, 0.0) + v[2]) * 0.5,
                    (v[0] - Complex64::new(0.0, 1.0) * v[1]) * 0.5,
                ],
                [
                    (v[0] + Complex64::new(0.0, 1.0) * v[1]) * 0.5,
                    (Complex64::new(trace, 0.0) - v[2]) * 0.5,
                ],
            ];
            // C += 1/2 Phi(E_ij) (x) E_ij
            for (a, row) in phi.iter().enumerate() {
                for (b, val) in row.iter().enumerate() {
                    c[2 * a + i][2 * b + j] += 0.5 * val;
                }
            }
        }
        c
    }

    /// Complete positivity check: (is CP, minimum Choi eigenvalue).
    pub fn is_cp(&self, tol: f64) -> (bool, f64) {
        let min_eig = hermitian4_eigenvalues(&self.choi())[0];
        (min_eig >= -tol, min_eig)
    }
}

/// Dynamical map at time `t` in the requested picture.
///
/// Uncontrolled: diag(e^{-Γ(t)}, e^{-Γ(t)}, 1). Fixed: the same segments with
/// the protocol rotations interleaved. Microscopic: the affine action
/// extracted by propagating the three basis vectors and the origin (the
/// bath-induced ry offset makes the controlled exact map genuinely affine).
pub fn map_at(
    t: f64,
    params: &SpectralParams,
    protocol: &ControlProtocol,
    mode: Mode,
) -> Result<QubitMap> {
    if t < 0.0 {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    match mode {
        Mode::Uncontrolled => Ok(QubitMap::dephasing((-params.decoherence_raw(t)).exp())),
        Mode::Fixed => {
            let mut map = QubitMap::identity();
            let mut gamma_prev = 0.0;
            for p in protocol.pulses() {
                if p.time > t {
                    break;
                }
                let g = params.decoherence_raw(p.time);
                map = QubitMap::rotation(p.axis, p.angle)
                    .compose(&QubitMap::dephasing((gamma_prev - g).exp()))
                    .compose(&map);
                gamma_prev = g;
            }
            Ok(QubitMap::dephasing((gamma_prev - params.decoherence_raw(t)).exp()).compose(&map))
        }
        Mode::Microscopic => {
            let origin = propagate_microscopic(BlochVector::new(0.0, 0.0, 0.0), protocol, t, params)?;
            let offset = origin.to_array();
            let mut matrix = [[0.0; 3]; 3];
            for j in 0..3 {
                let mut e = [0.0; 3];
                e[j] = 1.0;
                let img =
                    propagate_microscopic(BlochVector::from_array(e), protocol, t, params)?.to_array();
                for i in 0..3 {
                    matrix[i][j] = img[i] - offset[i];
                }
            }
            Ok(QubitMap { matrix, offset })
        }
    }
}

/// Is the intermediate propagator Φ_{t,s} = Φ_t Φ_s⁻¹ completely positive?
/// For pure dephasing this holds exactly when Γ(t) ≥ Γ(s), i.e. while the
/// transverse factor does not grow.
pub fn intermediate_map_cp(s_time: f64, t_time: f64, params: &SpectralParams) -> Result<bool> {
    if !(0.0 <= s_time && s_time <= t_time) {
        return Err(Error::Domain(format!(
            "intermediate map needs 0 <= s <= t, got s = {s_time}, t = {t_time}"
        )));
    }
    Ok(params.decoherence_raw(t_time) >= params.decoherence_raw(s_time))
}

/// Does the rotation commute with the free dephasing map at all times?
/// Checked numerically at ten sampled times; true exactly for z rotations
/// (and for rotations that degenerate to maps commuting with diag(e, e, 1),
/// such as angle 0 or a y rotation by π).
pub fn is_covariant(axis: Axis, angle: f64, params: &SpectralParams) -> bool {
    let r = QubitMap::rotation(axis, angle);
    for i in 1..=10 {
        let t = 0.5 * i as f64;
        let d = QubitMap::dephasing((-params.decoherence_raw(t)).exp());
        let rd = r.compose(&d);
        let dr = d.compose(&r);
        for a in 0..3 {
            for b in 0..3 {
                if (rd.matrix[a][b] - dr.matrix[a][b]).abs() > 1e-12 {
                    return false;
                }
            }
        }
    }
    true
}

/// Is `state` inside the image ellipsoid of the uncontrolled map at time `t`
/// (the set of states reachable from the unit ball)?
pub fn in_accessible_set(state: BlochVector, t: f64, params: &SpectralParams) -> Result<bool> {
    if t < 0.0 {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    let e = (-params.decoherence_raw(t)).exp();
    if e < f64::MIN_POSITIVE.sqrt() {
        return Err(Error::Config(format!(
            "accessible-set ellipsoid degenerate at t = {t}: e^-Gamma underflows"
        )));
    }
    let x = state.rx / e;
    let y = state.ry / e;
    Ok(x * x + y * y + state.rz * state.rz <= 1.0 + 1e-12)
}

/// Per-time row of a complete-positivity audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRow {
    pub t: f64,
    pub min_choi_eig: f64,
    pub max_bloch_norm: f64,
}

/// Aggregated audit verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpAuditReport {
    pub min_choi_eigenvalue: f64,
    pub worst_choi_time: f64,
    pub max_bloch_norm: f64,
    pub worst_norm_time: f64,
    pub cp_violating: bool,
}

/// Verdict tolerance: CP-violating iff min Choi eigenvalue < -tol or some
/// propagated pure state leaves the ball by more than tol.
pub const AUDIT_TOL: f64 = 1e-9;

/// Scan the controlled dynamics over [0, t_max]: Choi spectrum of the map at
/// each grid time and the norms of a deterministic golden-angle lattice of
/// initial pure states pushed through it.
pub fn cp_audit(
    protocol: &ControlProtocol,
    params: &SpectralParams,
    t_max: f64,
    time_steps: usize,
    n_state_samples: usize,
    mode: Mode,
) -> Result<(Vec<AuditRow>, CpAuditReport)> {
    if time_steps == 0 || n_state_samples == 0 {
        return Err(Error::Config("audit needs positive step and sample counts".into()));
    }
    if !(t_max > 0.0) {
        return Err(Error::Config(format!("audit horizon must be positive, got {t_max}")));
    }
    let states: Vec<BlochVector> = fibonacci_sphere(n_state_samples)
        .into_iter()
        .map(BlochVector::from_array)
        .collect();
    let mut rows = Vec::with_capacity(time_steps + 1);
    let mut report = CpAuditReport {
        min_choi_eigenvalue: f64::INFINITY,
        worst_choi_time: 0.0,
        max_bloch_norm: 0.0,
        worst_norm_time: 0.0,
        cp_violating: false,
    };
    for i in 0..=time_steps {
        let t = t_max * i as f64 / time_steps as f64;
        let map = map_at(t, params, protocol, mode)?;
        let min_eig = hermitian4_eigenvalues(&map.choi())[0];
        let max_norm = states
            .iter()
            .map(|&r| map.apply(r).norm())
            .fold(0.0_f64, f64::max);
        rows.push(AuditRow { t, min_choi_eig: min_eig, max_bloch_norm: max_norm });
        if min_eig < report.min_choi_eigenvalue {
            report.min_choi_eigenvalue = min_eig;
            report.worst_choi_time = t;
        }
        if max_norm > report.max_bloch_norm {
            report.max_bloch_norm = max_norm;
            report.worst_norm_time = t;
        }
    }
    report.cp_violating =
        report.min_choi_eigenvalue < -AUDIT_TOL || report.max_bloch_norm > 1.0 + AUDIT_TOL;
    Ok((rows, report))
}

use crate::bloch::Trajectory;

/// Uniform-grid trajectory with pulse instants inserted as pre/post sample
/// pairs sharing one time stamp.
pub fn simulate(
    r0: BlochVector,
    protocol: &ControlProtocol,
    t_max: f64,
    steps: usize,
    params: &SpectralParams,
    mode: Mode,
) -> Result<Trajectory> {
    if steps < 1 {
        return Err(Error::Config("trajectory needs at least one step".into()));
    }
    if !(t_max > 0.0) {
        return Err(Error::Config(format!("trajectory horizon must be positive, got {t_max}")));
    }
    let eval = |prefix: usize, t: f64| -> Result<BlochVector> {
        let sub = ControlProtocol::new(protocol.pulses()[..prefix].to_vec())?;
        match mode {
            Mode::Uncontrolled => Ok(propagate_uncontrolled(r0, t, params)),
            Mode::Fixed => Ok(propagate_fixed_dissipator(r0, &sub, t, params)),
            Mode::Microscopic => propagate_microscopic(r0, &sub, t, params),
        }
    };
    let active: &[Pulse] = if mode == Mode::Uncontrolled { &[] } else { protocol.pulses() };
    let n_pulses_in_range = active.iter().filter(|p| p.time <= t_max).count();

    let mut samples = Vec::with_capacity(steps + 1 + 2 * n_pulses_in_range);
    let mut pulse_indices = Vec::with_capacity(n_pulses_in_range);
    let mut next_pulse = 0;
    let dt = t_max / steps as f64;
    for i in 0..=steps {
        let t = i as f64 * dt;
        while next_pulse < active.len() && active[next_pulse].time <= t {
            let tp = active[next_pulse].time;
            pulse_indices.push(samples.len());
            samples.push((tp, eval(next_pulse, tp)?));
            samples.push((tp, eval(next_pulse + 1, tp)?));
            next_pulse += 1;
        }
        // skip the grid point if a pulse pair already sits exactly on it
        if samples.last().map(|&(tl, _)| tl == t).unwrap_or(false) && i > 0 {
            continue;
        }
        samples.push((t, eval(next_pulse, t)?));
    }
    Trajectory::new(samples, pulse_indices)
}
