use std::fmt::Write as _;
use std::path::Path;

use offsetshape::offset::{offset_points, offset_series, OffsetParams};
use offsetshape::shape::Place;
use offsetshape::verifier::{count_cusps, uniform_grid, CuspReport, PointCloud};
use offsetshape::Scalar;
use serde::Serialize;

use crate::config::{Session, SessionConfig};
use crate::ingest::{prepare, Input, Prepared};
use crate::CliError;

/// One sampled branch; `None` marks a parameter without a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub branch_id: String,
    pub offset: bool,
    pub samples: Vec<(f64, Option<(f64, f64)>)>,
}

#[derive(Debug, Serialize)]
pub struct TraceSummary {
    pub branch_id: String,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cusps: Option<CuspReport>,
}

#[derive(Debug, Serialize)]
pub struct PlotSummary {
    pub mode: &'static str,
    pub diagnostics: Vec<String>,
    pub traces: Vec<TraceSummary>,
}

pub struct Plot {
    pub traces: Vec<Trace>,
    pub summary: PlotSummary,
}

pub fn plot(cfg: &SessionConfig) -> Result<Plot, CliError> {
    let session = Session::from_config(cfg)?;
    match prepare(&session)? {
        Prepared::Exact(i) => sample(&session, i),
        Prepared::Float(i) => sample(&session, i),
    }
}

fn id(base: &str, index: usize, places: usize) -> String {
    if places == 1 {
        base.to_string()
    } else {
        format!("{base}#{index}")
    }
}

fn sample<S: Scalar>(session: &Session, data: Input<S>) -> Result<Plot, CliError> {
    let hs = uniform_grid(-session.h_max, session.h_max, session.samples);
    let n = data.places.len();
    let mut traces = Vec::new();
    let mut summaries = Vec::new();
    for (index, pl) in data.places.iter().enumerate() {
        let fpl = pl.to_f64();
        let src = Trace {
            branch_id: id("src", index, n),
            offset: false,
            samples: hs.iter().map(|&h| (h, Some(fpl.world_point(h)))).collect(),
        };
        summaries.push(TraceSummary {
            branch_id: src.branch_id.clone(),
            samples: src.samples.len(),
            cusps: None,
        });
        traces.push(src);
        for &branch in &session.branches {
            let op = data.params.with_branch(branch);
            let trace = offset_trace(pl, &op, &hs, id(&format!("gen{branch}"), index, n), session);
            let fop = float_params(&op);
            let cloud = PointCloud {
                branch_id: trace.branch_id.clone(),
                center: None,
                samples: trace
                    .samples
                    .iter()
                    .filter_map(|&(h, p)| p.map(|(x, y)| (h, x, y)))
                    .collect(),
            };
            let sampler = |h: f64| offset_points(&fpl, &fop, &[h])[0].point;
            let cusps = count_cusps(&cloud, Some(&sampler)).ok();
            summaries.push(TraceSummary {
                branch_id: trace.branch_id.clone(),
                samples: cloud.samples.len(),
                cusps,
            });
            traces.push(trace);
        }
    }
    Ok(Plot {
        traces,
        summary: PlotSummary {
            mode: S::MODE,
            diagnostics: data.diagnostics,
            traces: summaries,
        },
    })
}

fn float_params<S: Scalar>(op: &OffsetParams<S>) -> OffsetParams<f64> {
    OffsetParams {
        d: op.d.to_f64(),
        a: op.a.to_f64(),
        b: op.b.to_f64(),
        branch: op.branch,
    }
}

/// Pointwise offset; the center of a singular source comes from the series.
fn offset_trace<S: Scalar>(
    pl: &Place<S>,
    op: &OffsetParams<S>,
    hs: &[f64],
    branch_id: String,
    session: &Session,
) -> Trace {
    let pts = offset_points(&pl.to_f64(), &float_params(op), hs);
    let center = pts
        .iter()
        .any(|s| s.point.is_none() && s.h == 0.0)
        .then(|| {
            offset_series(pl, op, session.tol).ok().map(|o| {
                let (x, y) = o.world_center();
                (x.to_f64(), y.to_f64())
            })
        });
    Trace {
        branch_id,
        offset: true,
        samples: pts
            .into_iter()
            .map(|s| {
                (
                    s.h,
                    s.point.or(if s.h == 0.0 { center.flatten() } else { None }),
                )
            })
            .collect(),
    }
}

pub fn write_csv<W: std::io::Write>(traces: &[Trace], out: W) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["branch_id", "h", "x", "y"]).map_err(io)?;
    for t in traces {
        for &(h, p) in &t.samples {
            if let Some((x, y)) = p {
                w.write_record([
                    t.branch_id.clone(),
                    h.to_string(),
                    x.to_string(),
                    y.to_string(),
                ])
                .map_err(io)?;
            }
        }
    }
    w.flush().map_err(|e| CliError::io(e.to_string()))
}

const SVG_WIDTH: f64 = 800.0;
const MARGIN: f64 = 20.0;

fn color(branch_id: &str) -> &'static str {
    if branch_id.starts_with("gen+") {
        "#c0392b"
    } else if branch_id.starts_with("gen-") {
        "#1f5fa8"
    } else {
        "#000000"
    }
}

/// Source traces thin, offsets thick, y up; the view box fits all points.
pub fn render_svg(traces: &[Trace]) -> String {
    let pts = || {
        traces
            .iter()
            .flat_map(|t| t.samples.iter().filter_map(|s| s.1))
    };
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (x, y) in pts() {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let scale = (SVG_WIDTH - 2.0 * MARGIN) / span;
    let (w, h) = (
        (x1 - x0) * scale + 2.0 * MARGIN,
        (y1 - y0) * scale + 2.0 * MARGIN,
    );
    let map = |x: f64, y: f64| (MARGIN + (x - x0) * scale, MARGIN + (y1 - y) * scale);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w:.2} {h:.2}\" width=\"{w:.2}\" height=\"{h:.2}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>");
    for t in traces {
        let width = if t.offset { 3.0 } else { 1.0 };
        let _ = writeln!(s, "<g id=\"{}\">", t.branch_id);
        for run in t.samples.split(|p| p.1.is_none()) {
            if run.len() < 2 {
                continue;
            }
            let coords: Vec<String> = run
                .iter()
                .filter_map(|p| p.1)
                .map(|(x, y)| {
                    let (u, v) = map(x, y);
                    format!("{u:.2},{v:.2}")
                })
                .collect();
            let _ = writeln!(
                s,
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{width}\" stroke-linejoin=\"round\" points=\"{}\"/>",
                color(&t.branch_id),
                coords.join(" ")
            );
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(id: &str, offset: bool, pts: &[Option<(f64, f64)>]) -> Trace {
        Trace {
            branch_id: id.into(),
            offset,
            samples: pts
                .iter()
                .enumerate()
                .map(|(i, &p)| (i as f64, p))
                .collect(),
        }
    }

    #[test]
    fn csv_skips_missing_points() {
        let t = trace("gen+", true, &[Some((0.0, 1.0)), None, Some((0.5, -2.0))]);
        let mut buf = Vec::new();
        write_csv(&[t], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "branch_id,h,x,y\ngen+,0,0,1\ngen+,2,0.5,-2\n"
        );
    }

    #[test]
    fn svg_fits_and_breaks_at_gaps() {
        let src = trace("src", false, &[Some((0.0, 0.0)), Some((1.0, 1.0))]);
        let off = trace(
            "gen-",
            true,
            &[
                Some((0.0, 1.0)),
                Some((0.5, 1.0)),
                None,
                Some((1.0, 0.0)),
                Some((1.0, 0.5)),
            ],
        );
        let svg = render_svg(&[src, off]);
        assert!(svg.contains("viewBox=\"0 0 800.00 800.00\""));
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.contains("points=\"20.00,780.00 780.00,20.00\""));
        assert!(svg.contains("stroke-width=\"3\""));
    }
}
