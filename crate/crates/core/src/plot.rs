//! SVG cluster plots: one panel per laptop plus a per-cell summary.
//!
//! The x axis lists grid points, the y axis is µT from zero, each cluster has a fixed color
//! by severity, and the active limit is drawn as one horizontal line tagged with
//! `class="limit"` and `data-value` in µT.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::field::POINTS_PER_SIDE;
use crate::hazard::HazardLabel;
use crate::pipeline::{AnalysisReport, CellReport, ClusteredFeature};

/// Most severe first; cycles when `k` exceeds its length.
pub const SEVERITY_PALETTE: [&str; 8] = [
    "#d62728", "#ff7f0e", "#e3c800", "#2ca02c", "#1f77b4", "#9467bd", "#8c564b", "#7f7f7f",
];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 48.0;

pub fn cluster_color(cluster: usize) -> &'static str {
    SEVERITY_PALETTE[cluster % SEVERITY_PALETTE.len()]
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotOutput {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

struct Frame {
    y_max: f64,
}

impl Frame {
    fn new(values: impl Iterator<Item = f64>, limit: f64) -> Self {
        let top = values.fold(limit, f64::max);
        Self { y_max: nice_ceiling(top * 1.05) }
    }

    fn x(&self, index: u8, offset: f64) -> f64 {
        let slot = (WIDTH - LEFT - RIGHT) / f64::from(POINTS_PER_SIDE);
        LEFT + slot * (f64::from(index) - 0.5 + offset)
    }

    fn y(&self, value: f64) -> f64 {
        TOP + (HEIGHT - TOP - BOTTOM) * (1.0 - value / self.y_max)
    }
}

/// Smallest of 1, 2, 2.5 or 5 times a power of ten that is at least `v`.
fn nice_ceiling(v: f64) -> f64 {
    if v.is_nan() || v <= 0.0 {
        return 1.0;
    }
    let p = 10f64.powf(v.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .into_iter()
        .map(|m| m * p)
        .find(|&c| c >= v)
        .unwrap_or(10.0 * p)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn file_stem(laptop_id: &str) -> String {
    laptop_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn open_svg(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        (WIDTH - RIGHT + LEFT) / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, frame: &Frame, point_names: &[String]) {
    let x0 = LEFT;
    let x1 = WIDTH - RIGHT;
    let y0 = HEIGHT - BOTTOM;
    let _ = writeln!(out, r##"<g class="axes" stroke="#333333" fill="none">"##);
    let _ = writeln!(out, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/>"#);
    let _ = writeln!(out, r#"<line x1="{x0:.2}" y1="{TOP:.2}" x2="{x0:.2}" y2="{y0:.2}"/>"#);
    let _ = writeln!(out, "</g>");
    for tick in 0..=5 {
        let v = frame.y_max * f64::from(tick) / 5.0;
        let y = frame.y(v);
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="#333333"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            x0 - 4.0,
            x0 - 6.0,
            y + 4.0,
            format_tick(v)
        );
    }
    for (i, name) in point_names.iter().enumerate() {
        let x = frame.x(i as u8 + 1, 0.0);
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 16.0,
            escape(name)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">B (µT)</text>"#,
        (TOP + y0) / 2.0,
        (TOP + y0) / 2.0
    );
}

fn format_tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() { "0".into() } else { s.to_string() }
}

fn limit_line(out: &mut String, frame: &Frame, limit: f64) {
    let y = frame.y(limit);
    let _ = writeln!(
        out,
        r##"<line class="limit" data-value="{limit}" x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#000000" stroke-dasharray="6 4"/>"##,
        WIDTH - RIGHT
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}">limit {limit} µT</text>"#,
        WIDTH - RIGHT + 6.0,
        y + 4.0
    );
}

fn legend(out: &mut String, labels: &[HazardLabel]) {
    for (i, l) in labels.iter().enumerate() {
        let y = TOP + 20.0 + 18.0 * i as f64;
        let x = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            out,
            r#"<circle cx="{x:.2}" cy="{:.2}" r="5" fill="{}"/><text x="{:.2}" y="{:.2}">{}{}</text>"#,
            y + 30.0,
            cluster_color(l.cluster),
            x + 10.0,
            y + 34.0,
            l.name,
            if l.dangerous { " *" } else { "" }
        );
    }
}

fn marker(out: &mut String, frame: &Frame, f: &ClusteredFeature, offset: f64) {
    let _ = writeln!(
        out,
        r#"<circle class="point" data-laptop="{}" data-point="{}" data-value="{}" data-cluster="{}" cx="{:.2}" cy="{:.2}" r="4" fill="{}"/>"#,
        escape(&f.laptop_id),
        f.point,
        f.value,
        f.cluster,
        frame.x(f.point.index(), offset),
        frame.y(f.value),
        cluster_color(f.cluster)
    );
}

fn point_names(cell: &CellReport) -> Vec<String> {
    cell.condition.side.points().map(|p| p.to_string()).collect()
}

/// SVG for one laptop's points within a cell.
pub fn laptop_svg(cell: &CellReport, laptop_id: &str, limit: f64) -> String {
    let features: Vec<&ClusteredFeature> = cell.features.iter().filter(|f| f.laptop_id == laptop_id).collect();
    // scale shared across the cell so panels compare directly
    let frame = Frame::new(cell.features.iter().map(|f| f.value), limit);
    let mut out = String::new();
    open_svg(&mut out, &format!("{laptop_id}, {}", cell.condition));
    axes(&mut out, &frame, &point_names(cell));
    for f in features {
        marker(&mut out, &frame, f, 0.0);
    }
    limit_line(&mut out, &frame, limit);
    legend(&mut out, &cell.labels);
    out.push_str("</svg>\n");
    out
}

/// SVG with every laptop of a cell, spread horizontally within each point's slot.
pub fn summary_svg(cell: &CellReport, limit: f64) -> String {
    let laptops = laptop_ids(cell);
    let frame = Frame::new(cell.features.iter().map(|f| f.value), limit);
    let mut out = String::new();
    open_svg(&mut out, &format!("{}: all laptops", cell.condition));
    axes(&mut out, &frame, &point_names(cell));
    for f in &cell.features {
        let rank = laptops.iter().position(|l| *l == f.laptop_id).unwrap_or(0);
        let offset = if laptops.len() > 1 {
            (rank as f64 / (laptops.len() - 1) as f64 - 0.5) * 0.7
        } else {
            0.0
        };
        marker(&mut out, &frame, f, offset);
    }
    limit_line(&mut out, &frame, limit);
    legend(&mut out, &cell.labels);
    out.push_str("</svg>\n");
    out
}

fn laptop_ids(cell: &CellReport) -> Vec<String> {
    let mut ids: Vec<String> = cell.features.iter().map(|f| f.laptop_id.clone()).collect();
    ids.dedup();
    ids
}

/// Writes `plots/<cell>/laptop_<id>.svg` and `plots/<cell>/summary.svg` under `out_dir` for
/// every successful cell.
pub fn render_plots(report: &AnalysisReport, out_dir: &Path) -> Result<PlotOutput> {
    let mut output = PlotOutput::default();
    let cells: Vec<&CellReport> = report.cells.iter().filter(|c| c.is_ok()).collect();
    if cells.is_empty() {
        output.warnings.push("report has no successful cells; no plots written".into());
        return Ok(output);
    }
    let limit = report.limit_ut;
    for cell in cells {
        let dir = out_dir.join("plots").join(cell.condition.slug());
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let mut write = |name: String, svg: String| -> Result<()> {
            let path = dir.join(name);
            std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
            output.files.push(path);
            Ok(())
        };
        for id in laptop_ids(cell) {
            write(format!("laptop_{}.svg", file_stem(&id)), laptop_svg(cell, &id, limit))?;
        }
        write("summary.svg".into(), summary_svg(cell, limit))?;
    }
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{validate_dataset, PowerSource, Side};
    use crate::io::IngestedCell;
    use crate::pipeline::{analyze_cells, RunConfig};
    use crate::sim::{fixtures, synthesize_survey, GridSpec};

    fn report(k: usize) -> AnalysisReport {
        let laptops = fixtures::fixture_laptops(PowerSource::Ac);
        let ds = synthesize_survey(&laptops, &GridSpec::default_for(Side::TopBody), PowerSource::Ac, 0.0, 1).unwrap();
        let validation = validate_dataset(&ds);
        analyze_cells(vec![IngestedCell { dataset: ds, validation }], &RunConfig { k, ..RunConfig::default() }).unwrap()
    }

    #[test]
    fn thirteen_panels_and_a_summary() {
        let dir = tempfile::tempdir().unwrap();
        let out = render_plots(&report(5), dir.path()).unwrap();
        assert!(out.warnings.is_empty());
        assert_eq!(out.files.len(), 14);
        for f in &out.files {
            let svg = std::fs::read_to_string(f).unwrap();
            assert_eq!(svg.matches(r#"class="limit""#).count(), 1);
            assert!(svg.contains(r#"data-value="0.3" x1"#));
        }
    }

    #[test]
    fn empty_report_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = render_plots(&report(500), dir.path()).unwrap();
        assert!(out.files.is_empty());
        assert_eq!(out.warnings.len(), 1);
        assert!(!dir.path().join("plots").exists());
    }

    #[test]
    fn limit_line_sits_at_limit_in_data_coordinates() {
        let r = report(5);
        let cell = &r.cells[0];
        let svg = summary_svg(cell, 0.3);
        let frame = Frame::new(cell.features.iter().map(|f| f.value), 0.3);
        assert!(svg.contains(&format!(r#"y1="{:.2}""#, frame.y(0.3))));
        assert!((frame.y(0.0) - (HEIGHT - BOTTOM)).abs() < 1e-12);
    }

    #[test]
    fn palette_and_ticks() {
        assert_eq!(cluster_color(0), "#d62728");
        assert_eq!(cluster_color(8), cluster_color(0));
        assert_eq!(nice_ceiling(2.1), 2.5);
        assert_eq!(nice_ceiling(0.3), 0.5);
        assert_eq!(format_tick(0.5), "0.5");
        assert_eq!(format_tick(0.0), "0");
        assert_eq!(file_stem("a/b c"), "a_b_c");
    }
}
