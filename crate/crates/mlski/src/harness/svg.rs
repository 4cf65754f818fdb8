//! Minimal static SVG emission: RMS error against problem size and against
//! cumulative fit time, both on log-log axes.

use std::path::Path;

use crate::error::Result;
use crate::harness::runner::RunRecord;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 360.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_B: f64 = 50.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_R: f64 = 20.0;

struct Panel {
    title: &'static str,
    x_label: &'static str,
    points: Vec<(f64, f64)>,
}

fn log_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        if v > 0.0 && v.is_finite() {
            lo = lo.min(v.log10());
            hi = hi.max(v.log10());
        }
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let lo = lo.floor();
    let hi = hi.ceil();
    if lo == hi {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

fn render_panel(out: &mut String, panel: &Panel, offset_x: f64) {
    let (x_lo, x_hi) = log_range(panel.points.iter().map(|p| p.0));
    let (y_lo, y_hi) = log_range(panel.points.iter().map(|p| p.1));
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let to_xy = |x: f64, y: f64| -> (f64, f64) {
        let fx = (x.log10() - x_lo) / (x_hi - x_lo);
        let fy = (y.log10() - y_lo) / (y_hi - y_lo);
        (
            offset_x + MARGIN_L + fx * plot_w,
            MARGIN_T + (1.0 - fy) * plot_h,
        )
    };

    out.push_str(&format!(
        "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#333\"/>\n",
        offset_x + MARGIN_L,
        MARGIN_T,
        plot_w,
        plot_h
    ));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        offset_x + MARGIN_L + plot_w / 2.0,
        MARGIN_T - 14.0,
        panel.title
    ));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
        offset_x + MARGIN_L + plot_w / 2.0,
        PANEL_H - 12.0,
        panel.x_label
    ));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 {:.1} {:.1})\">RMS error</text>\n",
        offset_x + 18.0,
        MARGIN_T + plot_h / 2.0,
        offset_x + 18.0,
        MARGIN_T + plot_h / 2.0
    ));

    // decade ticks
    let mut decade = x_lo;
    while decade <= x_hi + 1e-9 {
        let (px, _) = to_xy(10f64.powf(decade), 10f64.powf(y_lo));
        out.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"#ccc\"/>\n",
            MARGIN_T,
            MARGIN_T + plot_h
        ));
        out.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"10\">1e{decade:.0}</text>\n",
            MARGIN_T + plot_h + 16.0
        ));
        decade += 1.0;
    }
    let mut decade = y_lo;
    while decade <= y_hi + 1e-9 {
        let (_, py) = to_xy(10f64.powf(x_lo), 10f64.powf(decade));
        out.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{:.1}\" y2=\"{py:.1}\" stroke=\"#ccc\"/>\n",
            offset_x + MARGIN_L,
            offset_x + MARGIN_L + plot_w
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{py:.1}\" text-anchor=\"end\" font-size=\"10\">1e{decade:.0}</text>\n",
            offset_x + MARGIN_L - 6.0
        ));
        decade += 1.0;
    }

    let coords: Vec<(f64, f64)> = panel
        .points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|&(x, y)| to_xy(x, y))
        .collect();
    if coords.len() > 1 {
        let path: Vec<String> = coords.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        ));
    }
    for (x, y) in &coords {
        out.push_str(&format!(
            "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"3\" fill=\"#1f77b4\"/>\n"
        ));
    }
}

/// Writes a two-panel SVG: RMS vs number of centers and RMS vs cumulative
/// fit time. Points with zero or non-finite values are skipped (log axes).
pub fn write_svg(path: &Path, records: &[RunRecord]) -> Result<()> {
    let panels = [
        Panel {
            title: "RMS error vs N",
            x_label: "N (centers)",
            points: records
                .iter()
                .map(|r| (r.sgnode as f64, r.rms_error))
                .collect(),
        },
        Panel {
            title: "RMS error vs time",
            x_label: "cumulative fit time (s)",
            points: records
                .iter()
                .map(|r| (r.time_cum_sec.max(1e-6), r.rms_error))
                .collect(),
        },
    ];

    let total_w = PANEL_W * panels.len() as f64;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total_w:.0}\" height=\"{PANEL_H:.0}\" viewBox=\"0 0 {total_w:.0} {PANEL_H:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut out, panel, i as f64 * PANEL_W);
    }
    out.push_str("</svg>\n");
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::runner::{Method, RunRecord};
    use crate::kernels::KernelFamily;

    #[test]
    fn svg_is_written_and_well_formed_enough() {
        let records: Vec<RunRecord> = (1..=4u32)
            .map(|level| RunRecord {
                method: Method::Mlski,
                kernel: KernelFamily::Gaussian,
                shape: 0.45,
                level,
                sgnode: 9 * 2usize.pow(level),
                max_error: 10f64.powi(-(level as i32)),
                rms_error: 10f64.powi(-(level as i32) - 1),
                cond_no: None,
                time_level_sec: 0.001 * level as f64,
                time_cum_sec: 0.001 * level as f64 * 2.0,
            })
            .collect();
        let path = std::env::temp_dir().join("mlski_svg_test.svg");
        write_svg(&path, &records).unwrap();
        let body = std::fs::read_to_string(&path).unwrap();
        assert!(body.starts_with("<svg"));
        assert!(body.contains("polyline"));
        assert!(body.trim_end().ends_with("</svg>"));
        std::fs::remove_file(&path).ok();
    }
}
