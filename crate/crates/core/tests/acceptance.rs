//! Acceptance suite: every release-gating check, one test per criterion,
//! each printing a single PASS/FAIL line with its measured numbers
//! (`cargo test --test acceptance -- --nocapture` to see them all).

use dephase_core::bloch::{admissibility_residual, BlochVector};
use dephase_core::maps::{
    cp_audit, is_covariant, propagate_fixed_dissipator, propagate_microscopic,
    propagate_uncontrolled, simulate, ControlProtocol, Mode, Pulse,
};
use dephase_core::numerics::deriv_central5;
use dephase_core::optimizer::{
    average_coherence, controlled_average_coherence, controlled_protocol, grid_search_verify,
    sweep, DEFAULT_CBAR_STEPS,
};
use dephase_core::oracle::{amplitudes_from_angles, DiscretizedEnv};
use dephase_core::spectral::SpectralParams;
use dephase_core::{bloch::Axis, Error};
use std::f64::consts::PI;

fn params(s: f64) -> SpectralParams {
    SpectralParams::new(s).unwrap()
}

struct Criterion {
    label: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(label: &'static str) -> Self {
        Self { label, failures: Vec::new() }
    }

    fn check(&mut self, what: &str, ok: bool) {
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    fn finish(self, detail: String) {
        if self.failures.is_empty() {
            println!("ACCEPTANCE {}: PASS ({detail})", self.label);
        } else {
            println!(
                "ACCEPTANCE {}: FAIL [{}] ({detail})",
                self.label,
                self.failures.join("; ")
            );
            panic!("{} failed: {}", self.label, self.failures.join("; "));
        }
    }
}

#[test]
fn acceptance_01_kernel_exactness() {
    let mut c = Criterion::new("01 kernel-exactness");
    let g2 = params(2.0).decoherence(1.0).unwrap();
    let g4 = params(4.0).decoherence(1.0).unwrap();
    let r3 = params(3.0).decay_rate(1.0).unwrap();
    let limit = params(3.0).decoherence(1e6).unwrap();
    c.check("Gamma(1, s=2) = 0.5", (g2 - 0.5).abs() <= 1e-12);
    c.check("Gamma(1, s=4) = 2.5", (g4 - 2.5).abs() <= 1e-12);
    c.check("gamma(1, s=3) = 0.5", (r3 - 0.5).abs() <= 1e-12);
    c.check("Gamma(1e6, s=3) = 1", (limit - 1.0).abs() <= 1e-5);
    c.finish(format!(
        "Gamma(1,2)={g2:.15}, Gamma(1,4)={g4:.15}, gamma(1,3)={r3:.15}, Gamma(1e6,3)={limit:.8}"
    ));
}

#[test]
fn acceptance_02_derivative_consistency() {
    let mut c = Criterion::new("02 derivative-consistency");
    let mut worst = 0.0_f64;
    for &s in &[2.5, 3.0, 4.0, 5.0, 6.0] {
        let p = params(s);
        for i in 0..2000 {
            let t = 0.01 + (20.0 - 0.01) * i as f64 / 1999.0;
            let d = deriv_central5(|u| p.decoherence(u).unwrap(), t, 1e-4);
            let g = p.decay_rate(t).unwrap();
            worst = worst.max((d - g).abs() / g.abs().max(1e-3));
        }
    }
    c.check("max relative error <= 1e-6", worst <= 1e-6);
    c.finish(format!("max |dGamma/dt - gamma| / max(|gamma|, 1e-3) = {worst:.3e}"));
}

#[test]
fn acceptance_03_zero_crossings() {
    let mut c = Criterion::new("03 zero-crossings");
    let mut detail = String::new();
    for &s in &[3.0, 4.0, 5.0, 6.0] {
        let p = params(s);
        let roots = p.rate_zero_crossings();
        let expected: Vec<f64> = (1..)
            .map(|k| k as f64 * PI / s)
            .take_while(|&x| x < PI / 2.0 - 1e-12)
            .map(f64::tan)
            .collect();
        c.check("crossing count", roots.len() == expected.len());
        for (r, e) in roots.iter().zip(&expected) {
            c.check("root matches tan(k pi / s) to 1e-12", (r - e).abs() <= 1e-12 * e.max(1.0));
            c.check("bisection witness", p.decay_rate(*r).unwrap().abs() <= 1e-12 * p.euler_gamma_s());
        }
        detail.push_str(&format!("s={s}: {} root(s); ", roots.len()));
    }
    c.check("s=2 has none", params(2.0).rate_zero_crossings().is_empty());
    c.finish(detail + "s=2: 0 roots");
}

#[test]
fn acceptance_04_oracle_equivalence_uncontrolled() {
    let mut c = Criterion::new("04 oracle-uncontrolled");
    let p = params(3.0);
    let mut errs = Vec::new();
    for &n in &[250usize, 500, 1000, 2000] {
        let env = DiscretizedEnv::new(&p, n, 50.0).unwrap();
        let mut worst = 0.0_f64;
        for i in 0..=100 {
            let t = 10.0 * i as f64 / 100.0;
            worst = worst.max((env.gamma_oracle(t).unwrap() - p.decoherence(t).unwrap()).abs());
        }
        errs.push(worst);
    }
    c.check("max error < 1e-3 at N=2000", errs[3] < 1e-3);
    c.check(
        "error decreases monotonically in N",
        errs.windows(2).all(|w| w[1] < w[0]),
    );
    c.finish(format!(
        "max |Gamma_oracle - Gamma| = [{:.2e}, {:.2e}, {:.2e}, {:.2e}] for N = [250, 500, 1000, 2000]",
        errs[0], errs[1], errs[2], errs[3]
    ));
}

#[test]
fn acceptance_05_oracle_equivalence_controlled() {
    let mut c = Criterion::new("05 oracle-controlled");
    let mut worst = 0.0_f64;
    for &s in &[3.0, 4.0] {
        let p = params(s);
        let env = DiscretizedEnv::new(&p, 2000, 50.0).unwrap();
        let t_tilde = p.rate_zero_crossings()[0];
        for &phi in &[0.3 * PI, 0.5 * PI] {
            let proto = ControlProtocol::single_y(t_tilde, phi).unwrap();
            // one protocol-plane state and one with a transverse-y component
            for &(theta, az) in &[(0.2 * PI, 0.0), (0.45 * PI, 1.3)] {
                let (ce, cg) = amplitudes_from_angles(theta, az);
                let r0 = BlochVector::new(
                    2.0 * (ce * cg.conj()).re,
                    -2.0 * (ce * cg.conj()).im,
                    ce.norm_sqr() - cg.norm_sqr(),
                );
                for i in 0..20 {
                    let t = t_tilde + (10.0 - t_tilde) * i as f64 / 19.0;
                    let closed = propagate_microscopic(r0, &proto, t, &p).unwrap();
                    let orac = env.bloch(ce, cg, phi, t, t_tilde).unwrap();
                    worst = worst
                        .max((closed.rx - orac.rx).abs())
                        .max((closed.ry - orac.ry).abs())
                        .max((closed.rz - orac.rz).abs());
                }
            }
        }
    }
    c.check("max Bloch discrepancy < 1e-2", worst < 1e-2);
    c.finish(format!(
        "max |closed-form - oracle| = {worst:.3e} over s in {{3,4}}, phi in {{0.3pi, 0.5pi}}, 20-point grids"
    ));
}

#[test]
fn acceptance_06_cp_violation_reproduction() {
    let mut c = Criterion::new("06 cp-violation");
    let p = params(4.0);
    let r0 = BlochVector::from_polar(0.2 * PI);
    let pre = propagate_uncontrolled(r0, 1.0, &p);
    let proto = ControlProtocol::single_y(1.0, pre.rz.atan2(pre.rx)).unwrap();

    // protocol-state trajectory: max |r| is the derived overshoot
    let mut max_norm = 0.0_f64;
    let mut micro_max = 0.0_f64;
    for i in 0..=3000 {
        let t = 30.0 * i as f64 / 3000.0;
        max_norm = max_norm.max(propagate_fixed_dissipator(r0, &proto, t, &p).norm());
        micro_max = micro_max.max(propagate_microscopic(r0, &proto, t, &p).unwrap().norm());
    }
    let (_, report) = cp_audit(&proto, &p, 30.0, 300, 256, Mode::Fixed).unwrap();

    c.check("fixed max |r| = 1.336 +- 0.01", (max_norm - 1.336).abs() <= 0.01);
    c.check("min Choi eigenvalue < -1e-3", report.min_choi_eigenvalue < -1e-3);
    c.check("verdict CP-violating", report.cp_violating);
    c.check("microscopic |r| <= 1 + 1e-9 throughout", micro_max <= 1.0 + 1e-9);
    c.finish(format!(
        "fixed max |r| = {max_norm:.6}, min Choi eig = {:.6}, microscopic max |r| = {micro_max:.12}",
        report.min_choi_eigenvalue
    ));
}

#[test]
fn acceptance_07_sweep_structure() {
    let mut c = Criterion::new("07 sweep-structure");
    let low = sweep(&[2.5, 3.0, 3.5, 4.0], 30.0, DEFAULT_CBAR_STEPS).unwrap();
    let phi_lo: Vec<f64> = low.iter().map(|r| r.phi_in.unwrap()).collect();
    let cb_lo: Vec<f64> = low.iter().map(|r| r.cbar_controlled.unwrap()).collect();
    c.check("low grid all feasible", low.iter().all(|r| r.feasible));
    c.check("phi_in strictly increasing on {2.5..4}", phi_lo.windows(2).all(|w| w[1] > w[0]));
    c.check(
        "cbar_controlled strictly increasing on {2.5..4}",
        cb_lo.windows(2).all(|w| w[1] > w[0]),
    );
    c.check(
        "enhancement > 1e-3 everywhere",
        low.iter().all(|r| r.cbar_controlled.unwrap() > r.cbar_uncontrolled + 1e-3),
    );

    let high = sweep(&[4.5, 5.0, 5.5, 6.0], 30.0, DEFAULT_CBAR_STEPS).unwrap();
    let phi_hi: Vec<f64> = high.iter().map(|r| r.phi_in.unwrap()).collect();
    let cb_hi: Vec<f64> = high.iter().map(|r| r.cbar_controlled.unwrap()).collect();
    c.check("high grid all feasible", high.iter().all(|r| r.feasible));
    c.check(
        "natural horizons on (4, 6]",
        high.iter().all(|r| (r.t_horizon - (2.0 * PI / r.s).tan()).abs() < 1e-9),
    );
    c.check("phi_in still increasing on {4.5..6}", phi_hi.windows(2).all(|w| w[1] > w[0]));
    c.check("cbar_controlled decreasing on {4.5..6}", cb_hi.windows(2).all(|w| w[1] < w[0]));
    c.finish(format!(
        "cbar_ctrl {{2.5..4}} = {:?}, {{4.5..6}} = {:?}",
        cb_lo.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>(),
        cb_hi.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>()
    ));
}

#[test]
fn acceptance_08_boundary_constraint() {
    let mut c = Criterion::new("08 boundary-constraint");
    let mut worst_start = 0.0_f64;
    let mut worst_end = 0.0_f64;
    let mut worst_coh = 0.0_f64;
    for &s in &[2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0] {
        let p = params(s);
        let horizon = p.horizon(30.0).unwrap();
        let spec = controlled_protocol(&p, horizon.t_horizon).unwrap();
        let r0 = BlochVector::from_polar(spec.phi_in);
        let end = propagate_fixed_dissipator(r0, &spec.protocol, horizon.t_horizon, &p);
        worst_start = worst_start.max((r0.norm() - 1.0).abs());
        worst_end = worst_end.max((end.norm() - 1.0).abs());
        worst_coh = worst_coh.max((end.coherence() - 1.0).abs());
    }
    c.check("| |r(0)| - 1 | <= 1e-9", worst_start <= 1e-9);
    c.check("| |r(T)| - 1 | <= 1e-9", worst_end <= 1e-9);
    c.check("end coherence = 1 to 1e-9", worst_coh <= 1e-9);
    c.finish(format!(
        "worst | |r(0)|-1 | = {worst_start:.2e}, | |r(T)|-1 | = {worst_end:.2e}, |C(T)-1| = {worst_coh:.2e} over feasible s"
    ));
}

#[test]
fn acceptance_09_optimality_oracle() {
    let mut c = Criterion::new("09 optimality-oracle");
    let p = params(4.0);
    let analytic = controlled_average_coherence(&p, 30.0, DEFAULT_CBAR_STEPS).unwrap();
    let analytic_cbar = analytic.cbar_controlled.unwrap();
    let t_tilde = analytic.t_tilde.unwrap();
    let best = grid_search_verify(&p, 30.0, 100).unwrap();
    let step = 30.0 / 101.0;

    c.check(
        "no candidate beats the analytic protocol by more than 1e-2",
        best.cbar <= analytic_cbar + 1e-2,
    );
    // The strict localization claim: the family's best pulse time coincides
    // with the rate sign change. The free search instead prefers an earlier
    // pulse that saturates |r(T)| = 1 from below t~ (larger |r| at the kick,
    // same saturated second leg), so this check documents a real gap between
    // the two-leg construction and the in-family optimum.
    c.check(
        "best pulse time within one grid step of t~",
        (best.pulse_time - t_tilde).abs() <= step,
    );
    c.finish(format!(
        "analytic cbar = {analytic_cbar:.6}, grid best = {:.6} at (phi_in = {:.4}, tp = {:.4}, angle = {:.4}), t~ = {t_tilde}, step = {step:.4}, {} candidates",
        best.cbar, best.phi_in, best.pulse_time, best.pulse_angle, best.evaluated
    ));
}

#[test]
fn acceptance_10_covariance() {
    let mut c = Criterion::new("10 covariance");
    let p = params(3.0);
    let angle = 0.9;
    let proto = ControlProtocol::new(vec![Pulse { time: 0.8, axis: Axis::Z, angle }]).unwrap();
    let r0 = BlochVector::new(0.6, 0.25, 0.4);
    let rot0 = r0.rotated(Axis::Z, angle);
    let mut worst = 0.0_f64;
    for i in 1..=100 {
        let t = 0.1 * i as f64;
        let unc = propagate_uncontrolled(rot0, t, &p).coherence();
        let fix = propagate_fixed_dissipator(r0, &proto, t, &p).coherence();
        let mic = propagate_microscopic(r0, &proto, t, &p).unwrap().coherence();
        worst = worst.max((fix - unc).abs()).max((mic - unc).abs());
    }
    c.check("z-pulse coherence identical to uncontrolled to 1e-12", worst <= 1e-12);
    c.check("z axis covariant", is_covariant(Axis::Z, angle, &p));
    c.check("y axis not covariant", !is_covariant(Axis::Y, 1.511, &p));
    c.check("x axis not covariant", !is_covariant(Axis::X, 0.7, &p));
    c.finish(format!("max coherence deviation = {worst:.2e}"));
}

#[test]
fn acceptance_11_admissibility() {
    let mut c = Criterion::new("11 admissibility");
    let p = params(3.0);
    let steps = 30_000; // dt = 1e-3 over [0, 30]

    let unc = simulate(
        BlochVector::new(1.0, 0.0, 0.0),
        &ControlProtocol::uncontrolled(),
        30.0,
        steps,
        &p,
        Mode::Uncontrolled,
    )
    .unwrap();
    let res_unc = admissibility_residual(&unc, &p).unwrap();

    let spec = controlled_protocol(&p, 30.0).unwrap();
    let ctrl = simulate(
        BlochVector::from_polar(spec.phi_in),
        &spec.protocol,
        30.0,
        steps,
        &p,
        Mode::Fixed,
    )
    .unwrap();
    let res_ctrl = admissibility_residual(&ctrl, &p).unwrap();

    c.check("uncontrolled residual <= 1e-5 at dt = 1e-3", res_unc <= 1e-5);
    c.check("controlled residual <= 1e-5 at dt = 1e-3", res_ctrl <= 1e-5);
    c.finish(format!("residuals: uncontrolled = {res_unc:.3e}, controlled = {res_ctrl:.3e}"));
}

#[test]
fn acceptance_12_markovian_negative_control() {
    let mut c = Criterion::new("12 markovian-negative-control");
    let p = params(1.5);
    // the rate never turns negative
    let all_nonneg = (0..=2000).all(|i| p.decay_rate(0.02 * i as f64).unwrap() >= 0.0);
    c.check("gamma >= 0 throughout for s = 1.5", all_nonneg);
    c.check(
        "horizon selection reports no crossing",
        matches!(p.horizon(30.0), Err(Error::NoCrossing { .. })),
    );
    let rows = sweep(&[1.5], 30.0, DEFAULT_CBAR_STEPS).unwrap();
    c.check("sweep row infeasible", !rows[0].feasible);
    c.check("no controlled value claimed", rows[0].cbar_controlled.is_none());
    c.check(
        "uncontrolled optimum reported",
        rows[0].cbar_uncontrolled > 0.0 && rows[0].phi_in == Some(PI / 2.0),
    );
    c.finish(format!("cbar_uncontrolled(s=1.5) = {:.6}, feasible = false", rows[0].cbar_uncontrolled));
}

#[test]
fn acceptance_quadrature_refinement() {
    // supporting check for the averaged quantities used above: halving the
    // default trajectory resolution moves the averages by < 1e-6
    let mut c = Criterion::new("xx quadrature-refinement");
    let p = params(4.0);
    let spec = controlled_protocol(&p, 30.0).unwrap();
    let r0 = BlochVector::from_polar(spec.phi_in);
    let coarse = average_coherence(
        &simulate(r0, &spec.protocol, 30.0, DEFAULT_CBAR_STEPS, &p, Mode::Fixed).unwrap(),
        30.0,
    )
    .unwrap();
    let fine = average_coherence(
        &simulate(r0, &spec.protocol, 30.0, 2 * DEFAULT_CBAR_STEPS, &p, Mode::Fixed).unwrap(),
        30.0,
    )
    .unwrap();
    c.check("refinement shift < 1e-6", (coarse - fine).abs() < 1e-6);
    c.finish(format!("|cbar(N) - cbar(2N)| = {:.2e}", (coarse - fine).abs()));
}
