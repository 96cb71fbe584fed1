//! Hand-rolled SVG emitters for the two standard pictures: a trajectory on
//! the x-z disc and a purity-flux snapshot. CSV remains the data contract;
//! these are viewing sugar with no plotting dependency.

use crate::bloch::{FluxSample, Trajectory};

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;

fn sx(x: f64) -> f64 {
    0.5 * SIZE + x * (0.5 * SIZE - MARGIN)
}

fn sz(z: f64) -> f64 {
    0.5 * SIZE - z * (0.5 * SIZE - MARGIN)
}

fn header(out: &mut String) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    out.push_str(&format!(
        "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"
    ));
    // axes through the origin
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n",
        sx(-1.05), sz(0.0), sx(1.05), sz(0.0)
    ));
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n",
        sx(0.0), sz(-1.05), sx(0.0), sz(1.05)
    ));
}

fn unit_circle(out: &mut String) {
    out.push_str(&format!(
        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        sx(0.0),
        sz(0.0),
        0.5 * SIZE - MARGIN
    ));
}

fn polyline(out: &mut String, pts: &[(f64, f64)], color: &str) {
    if pts.len() < 2 {
        return;
    }
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, z)| format!("{:.3},{:.3}", sx(x), sz(z)))
        .collect();
    out.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
        coords.join(" ")
    ));
}

/// Trajectory projected onto the x-z disc. Free legs alternate red/blue,
/// pulse jumps are drawn as green chords.
pub fn trajectory_svg(traj: &Trajectory) -> String {
    let mut out = String::new();
    header(&mut out);
    unit_circle(&mut out);
    let leg_colors = ["#c0392b", "#2980b9"];
    let mut leg = 0usize;
    let mut current: Vec<(f64, f64)> = Vec::new();
    for (i, &(_, r)) in traj.samples().iter().enumerate() {
        current.push((r.rx, r.rz));
        if traj.pulse_indices().contains(&i) {
            polyline(&mut out, &current, leg_colors[leg % 2]);
            let post = traj.samples()[i + 1].1;
            polyline(&mut out, &[(r.rx, r.rz), (post.rx, post.rz)], "#27ae60");
            current = vec![(post.rx, post.rz)];
            leg += 1;
        }
    }
    polyline(&mut out, &current, leg_colors[leg % 2]);
    out.push_str("</svg>\n");
    out
}

/// Flux snapshot: filled cells colored by sign (blue = purity loss, red =
/// purity gain), sqrt intensity scaling, with the zero-flux rx = 0 line in
/// black.
pub fn flux_field_svg(samples: &[FluxSample], extent: f64, resolution: usize) -> String {
    let mut out = String::new();
    header(&mut out);
    let max_mag = samples.iter().map(|s| s.flux.abs()).fold(0.0_f64, f64::max);
    let cell = if resolution > 1 {
        2.0 * extent / (resolution - 1) as f64
    } else {
        2.0 * extent
    };
    let half_px = 0.5 * cell * (0.5 * SIZE - MARGIN);
    for s in samples {
        let intensity = if max_mag > 0.0 {
            (s.flux.abs() / max_mag).sqrt()
        } else {
            0.0
        };
        let level = (255.0 - 160.0 * intensity) as u8;
        let color = if s.flux < 0.0 {
            format!("rgb({level},{level},255)")
        } else if s.flux > 0.0 {
            format!("rgb(255,{level},{level})")
        } else {
            "rgb(255,255,255)".to_string()
        };
        out.push_str(&format!(
            "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"{}\"/>\n",
            sx(s.rx) - half_px,
            sz(s.rz) - half_px,
            2.0 * half_px,
            2.0 * half_px,
            color
        ));
    }
    // stabilizable line rx = 0
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"2\"/>\n",
        sx(0.0),
        sz(-1.0),
        sx(0.0),
        sz(1.0)
    ));
    unit_circle(&mut out);
    out.push_str("</svg>\n");
    out
}
