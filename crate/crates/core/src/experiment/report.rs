//! CSV tables and SVG charts for sweep records.

use std::fmt::Write as _;

use super::{ExperimentPreset, ExperimentRecord, Figure, Mode};

/// CSV header. Wall time is left out so that reruns are byte-identical.
pub const CSV_COLUMNS: [&str; 10] = [
    "preset",
    "seed",
    "sweep",
    "mode",
    "status",
    "energy_wh",
    "per_du_wh",
    "rel_gap",
    "nodes",
    "verified",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Records as CSV, preceded by a `#` line describing the preset.
pub fn to_csv(p: &ExperimentPreset, records: &[ExperimentRecord]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        let per_du = r
            .per_du_wh
            .as_ref()
            .map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"))
            .unwrap_or_default();
        w.write_record([
            r.figure.to_string(),
            r.seed.to_string(),
            r.sweep.to_string(),
            r.mode.to_string(),
            r.status.clone(),
            opt(r.energy_wh),
            per_du,
            opt(r.rel_gap),
            r.nodes.to_string(),
            r.verified.to_string(),
        ])?;
    }
    let body = w.into_inner().map_err(|e| e.into_error())?;
    Ok(format!("# {}\n{}", p.describe(), String::from_utf8_lossy(&body)))
}

/// Mean, min and max over the feasible seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Spread {
    mean: f64,
    min: f64,
    max: f64,
}

fn spread(values: impl Iterator<Item = f64>) -> Option<Spread> {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        return None;
    }
    Some(Spread {
        mean: v.iter().sum::<f64>() / v.len() as f64,
        min: v.iter().copied().fold(f64::INFINITY, f64::min),
        max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const MODE_COLORS: [(Mode, &str); 2] = [(Mode::Joint, "#1f77b4"), (Mode::Disjoint, "#ff7f0e")];
const DU_COLORS: [&str; 6] = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"];

/// Chart of a finished sweep: mean total energy per sweep point for both
/// modes (fig2, fig4) or mean energy per DU grouped by budget pair (fig3),
/// with min/max whiskers over seeds.
pub fn render_svg(p: &ExperimentPreset, records: &[ExperimentRecord]) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let title = match p.figure {
        Figure::Fig2 => "Total energy vs packet size multiplier",
        Figure::Fig3 => "Energy per DU vs delay budget (URLLC/eMBB ms)",
        Figure::Fig4 => "Total energy vs number of RUs",
    };
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title} ({} scale)</text>"#,
        W / 2.0,
        p.scale
    );
    match p.figure {
        Figure::Fig3 => bars(&mut svg, p, records),
        _ => lines(&mut svg, p, records),
    }
    svg.push_str("</svg>\n");
    svg
}

fn y_axis(svg: &mut String, top: f64) -> impl Fn(f64) -> f64 {
    let plot_h = H - TOP - BOTTOM;
    for k in 0..=5 {
        let v = top * k as f64 / 5.0;
        let y = H - BOTTOM - plot_h * k as f64 / 5.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{v:.0}</text>"##,
            W - RIGHT,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" transform="rotate(-90 16 {:.1})" text-anchor="middle">Energy (Wh)</text>"#,
        H / 2.0,
        H / 2.0
    );
    move |v: f64| H - BOTTOM - plot_h * v / top
}

fn nice_top(max: f64) -> f64 {
    if max <= 0.0 {
        return 1.0;
    }
    let mag = 10f64.powf(max.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&t| t >= max)
        .unwrap_or(10.0 * mag)
}

fn x_label(p: &ExperimentPreset) -> &'static str {
    match p.figure {
        Figure::Fig2 => "Packet size multiplier",
        Figure::Fig3 => "Delay budget pair",
        Figure::Fig4 => "Number of RUs",
    }
}

fn lines(svg: &mut String, p: &ExperimentPreset, records: &[ExperimentRecord]) {
    let n = p.sweep.len();
    let stats: Vec<Vec<Option<Spread>>> = MODE_COLORS
        .iter()
        .map(|&(mode, _)| {
            (0..n)
                .map(|k| {
                    spread(
                        records
                            .iter()
                            .filter(|r| r.point == k && r.mode == mode)
                            .filter_map(|r| r.energy_wh),
                    )
                })
                .collect()
        })
        .collect();
    let max = stats.iter().flatten().flatten().map(|s| s.max).fold(0.0, f64::max);
    let y = y_axis(svg, nice_top(max));
    let plot_w = W - LEFT - RIGHT;
    let x = |k: usize| LEFT + plot_w * (k as f64 + 0.5) / n as f64;
    for (k, v) in p.sweep.iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{v}</text>"#,
            x(k),
            H - BOTTOM + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        H - 14.0,
        x_label(p)
    );
    for (m, &(mode, color)) in MODE_COLORS.iter().enumerate() {
        let pts: Vec<String> = (0..n)
            .filter_map(|k| stats[m][k].map(|s| format!("{:.1},{:.1}", x(k), y(s.mean))))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            pts.join(" ")
        );
        for k in 0..n {
            let Some(s) = stats[m][k] else {
                let _ = writeln!(
                    svg,
                    r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" fill="{color}">infeasible</text>"#,
                    x(k),
                    H - BOTTOM - 8.0 - 14.0 * m as f64
                );
                continue;
            };
            let cx = x(k) + if m == 0 { -3.0 } else { 3.0 };
            let _ = writeln!(
                svg,
                r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="{color}"/><circle cx="{:.1}" cy="{:.1}" r="4" fill="{color}"/>"#,
                y(s.min),
                y(s.max),
                x(k),
                y(s.mean)
            );
        }
        legend(svg, m, color, mode.as_str());
    }
}

fn legend(svg: &mut String, row: usize, color: &str, label: &str) {
    let ly = TOP + 10.0 + 16.0 * row as f64;
    let _ = writeln!(
        svg,
        r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{color}"/><text x="{:.1}" y="{:.1}">{label}</text>"#,
        W - RIGHT - 120.0,
        ly - 9.0,
        W - RIGHT - 105.0,
        ly
    );
}

fn bars(svg: &mut String, p: &ExperimentPreset, records: &[ExperimentRecord]) {
    let n = p.sweep.len();
    let nl = p.base.num_du;
    let key = |k: usize, mode: Mode, l: usize| {
        spread(
            records
                .iter()
                .filter(|r| r.point == k && r.mode == mode)
                .filter_map(|r| r.per_du_wh.as_ref().and_then(|v| v.get(l).copied())),
        )
    };
    let mut max: f64 = 0.0;
    for k in 0..n {
        for &(mode, _) in &MODE_COLORS {
            for l in 0..nl {
                if let Some(s) = key(k, mode, l) {
                    max = max.max(s.max);
                }
            }
        }
    }
    let y = y_axis(svg, nice_top(max));
    let plot_w = W - LEFT - RIGHT;
    let group = plot_w / n as f64;
    let bar = group * 0.8 / (2 * nl) as f64;
    for (k, v) in p.sweep.iter().enumerate() {
        let gx = LEFT + group * k as f64 + group * 0.1;
        for (m, &(mode, _)) in MODE_COLORS.iter().enumerate() {
            for l in 0..nl {
                let bx = gx + bar * (m * nl + l) as f64;
                let color = DU_COLORS[l % DU_COLORS.len()];
                let opacity = if mode == Mode::Joint { "1" } else { "0.45" };
                match key(k, mode, l) {
                    Some(s) => {
                        let _ = writeln!(
                            svg,
                            r#"<rect x="{bx:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{color}" fill-opacity="{opacity}"/><line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
                            y(s.mean),
                            bar - 1.0,
                            (y(0.0) - y(s.mean)).max(0.0),
                            bx + bar / 2.0,
                            y(s.min),
                            bx + bar / 2.0,
                            y(s.max)
                        );
                    }
                    None => {
                        let _ = writeln!(
                            svg,
                            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="9">x</text>"#,
                            bx + bar / 2.0,
                            y(0.0) - 3.0
                        );
                    }
                }
            }
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{v}</text>"#,
            gx + group * 0.4,
            H - BOTTOM + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{} (solid: joint, faded: disjoint, x: infeasible)</text>"#,
        LEFT + plot_w / 2.0,
        H - 14.0,
        x_label(p)
    );
    for l in 0..nl {
        legend(svg, l, DU_COLORS[l % DU_COLORS.len()], &format!("DU{l}"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{Scale, SweepValue};

    fn rec(point: usize, seed: u64, mode: Mode, energy: Option<f64>) -> ExperimentRecord {
        ExperimentRecord {
            figure: Figure::Fig2,
            seed,
            point,
            sweep: SweepValue::Multiplier(point as u64 + 1),
            mode,
            status: if energy.is_some() { "optimal" } else { "infeasible" }.to_string(),
            energy_wh: energy,
            per_du_wh: energy.map(|e| vec![e, 0.0]),
            rel_gap: energy.map(|_| 0.0),
            nodes: 3,
            wall_seconds: 0.25,
            verified: energy.is_some(),
        }
    }

    #[test]
    fn csv_rows_and_header() {
        let p = ExperimentPreset::new(Figure::Fig2, Scale::Desk);
        let rows = [rec(0, 1, Mode::Joint, Some(12.5)), rec(0, 1, Mode::Disjoint, None)];
        let text = to_csv(&p, &rows).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# preset=fig2 scale=desk"));
        assert_eq!(lines[1], CSV_COLUMNS.join(","));
        assert_eq!(lines[2], "fig2,1,1,joint,optimal,12.5,12.5;0,0,3,true");
        assert_eq!(lines[3], "fig2,1,1,disjoint,infeasible,,,,3,false");
    }

    #[test]
    fn spread_of_values() {
        let s = spread([1.0, 3.0, 2.0].into_iter()).unwrap();
        assert_eq!((s.mean, s.min, s.max), (2.0, 1.0, 3.0));
        assert!(spread(std::iter::empty()).is_none());
    }

    #[test]
    fn svg_mentions_every_sweep_label() {
        for fig in [Figure::Fig2, Figure::Fig3] {
            let p = ExperimentPreset::new(fig, Scale::Desk);
            let rows: Vec<ExperimentRecord> = (0..p.sweep.len())
                .flat_map(|k| [rec(k, 1, Mode::Joint, Some(10.0 * k as f64)), rec(k, 1, Mode::Disjoint, None)])
                .map(|mut r| {
                    r.sweep = p.sweep[r.point];
                    r
                })
                .collect();
            let svg = render_svg(&p, &rows);
            assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
            for v in &p.sweep {
                assert!(svg.contains(&format!(">{v}</text>")));
            }
        }
    }

    #[test]
    fn nice_top_rounds_up() {
        assert_eq!(nice_top(0.0), 1.0);
        assert_eq!(nice_top(73.0), 100.0);
        assert_eq!(nice_top(180_000.0), 200_000.0);
        assert_eq!(nice_top(2_400.0), 2_500.0);
    }
}
