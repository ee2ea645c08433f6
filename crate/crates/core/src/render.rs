//! Deterministic SVG timelines: one lane per channel, pulses as labelled
//! rectangles, retargets as dashed ones, time in ticks along the x axis.

use std::fmt::Write as _;

use num_traits::ToPrimitive;

use crate::sequence::{InstrKind, Instruction, PulseSequence, Role};
use crate::tick::Tick;

const PX_PER_TICK: f64 = 24.0;
const LEFT: f64 = 80.0;
const LANE_HEIGHT: f64 = 36.0;
const LANE_TOPS: [f64; 2] = [20.0, 76.0];

fn x(t: Tick) -> f64 {
    LEFT + t.to_f64().unwrap_or(0.0) * PX_PER_TICK
}

fn label(ins: &Instruction) -> String {
    match ins.role {
        Some(Role::Pi) => format!("π q{}", ins.target),
        Some(Role::TwoPi) => format!("2π q{}", ins.target),
        Some(Role::Raman { .. }) => format!("R q{}", ins.target),
        None => format!("→q{}", ins.target),
    }
}

fn lane(out: &mut String, top: f64, instructions: &[Instruction]) {
    for ins in instructions {
        let (x0, w) = (x(ins.t_start), ins.duration.to_f64().unwrap_or(0.0) * PX_PER_TICK);
        match ins.kind {
            InstrKind::Retarget => {
                let _ = writeln!(
                    out,
                    r##"<rect class="retarget" x="{x0:.2}" y="{top:.2}" width="{w:.2}" height="{LANE_HEIGHT}" fill="none" stroke="#777" stroke-dasharray="4 3"/>"##
                );
            }
            InstrKind::Pulse => {
                let fill = match ins.role {
                    Some(Role::Raman { .. }) => "#9ecae1",
                    Some(Role::TwoPi) => "#fb6a4a",
                    _ => "#fcae91",
                };
                let _ = writeln!(
                    out,
                    r##"<rect class="pulse" x="{x0:.2}" y="{top:.2}" width="{w:.2}" height="{LANE_HEIGHT}" fill="{fill}" stroke="#333"/>"##
                );
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                    x0 + w / 2.0,
                    top + LANE_HEIGHT / 2.0 + 4.0,
                    label(ins)
                );
            }
        }
    }
}

/// SVG image of `seq`.
pub fn render_timeline(seq: &PulseSequence) -> String {
    let end = seq.duration().ceil().to_integer().max(1);
    let width = x(Tick::from_integer(end)) + 20.0;
    let axis_y = LANE_TOPS[1] + LANE_HEIGHT + 14.0;
    let height = axis_y + 24.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="{width:.0}" height="{height:.0}" fill="white"/>"#);
    for (name, top) in ["Rydberg", "Raman"].iter().zip(LANE_TOPS) {
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ccc"/>"##,
            width - 20.0,
            y = top + LANE_HEIGHT
        );
        let _ = writeln!(s, r#"<text x="8" y="{:.2}">{name}</text>"#, top + LANE_HEIGHT / 2.0 + 4.0);
    }
    lane(&mut s, LANE_TOPS[0], &seq.rydberg);
    lane(&mut s, LANE_TOPS[1], &seq.raman);
    for t in 0..=end {
        let tx = x(Tick::from_integer(t));
        let _ = writeln!(s, r##"<line x1="{tx:.2}" y1="{:.2}" x2="{tx:.2}" y2="{:.2}" stroke="#333"/>"##, axis_y - 4.0, axis_y);
        let _ = writeln!(s, r#"<text x="{tx:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#, axis_y + 12.0);
    }
    s.push_str("</svg>\n");
    s
}
