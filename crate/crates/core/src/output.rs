//! File emission: CSV grids, PPM renderings, nodal-analysis JSON, and zero
//! tables. Every writer goes through an atomic temp-file rename and formats
//! numbers deterministically, so identical inputs give identical bytes.

use crate::error::Result;
use crate::lfunctions::ZetaZero;
use crate::nodal::{EndpointLabel, NodalAnalysis, NodalLine, NodalScenario};
use crate::wavefield::GridField;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

/// Writes through a sibling temp file and renames over the target, so a
/// crash mid-write never leaves a truncated product file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!("{name}.tmp.{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with a metadata comment line, then `x,y,re,im,abs2` rows in grid
/// order (y ascending, x fastest).
pub fn write_grid_csv(path: &Path, field: &GridField) -> Result<()> {
    let w = &field.window;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# zero_index={} rho={:.16e}{:+.16e}i window={},{},{},{}",
        field.zero_index,
        field.rho.re,
        field.rho.im,
        fmt_f(w.x_min),
        fmt_f(w.x_max),
        fmt_f(w.y_min),
        fmt_f(w.y_max),
    );
    out.push_str("x,y,re,im,abs2\n");
    for iy in 0..field.ny {
        for ix in 0..field.nx {
            let v = field.value(ix, iy);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f(field.x_at(ix)),
                fmt_f(field.y_at(iy)),
                fmt_f(v.re),
                fmt_f(v.im),
                fmt_f(v.norm_sqr()),
            );
        }
    }
    atomic_write(path, out.as_bytes())
}

/// Intensity mapping for PPM rendering.
#[derive(Clone, Copy, Debug)]
pub enum PpmMode {
    /// log(|v|^2), the usual choice for wave densities.
    LogAbs2,
    /// Signed real part; shows nodal lines as the mid-gray level set.
    Linear,
}

/// Binary grayscale PPM (equal RGB channels), top row at y_max. Intensities
/// are clipped to the [p1, p99] percentile range before scaling; a flat field
/// renders mid-gray.
pub fn write_ppm(path: &Path, field: &GridField, mode: PpmMode) -> Result<()> {
    let metric: Vec<f64> = field
        .values
        .iter()
        .map(|v| match mode {
            PpmMode::LogAbs2 => (v.norm_sqr() + 1e-300).ln(),
            PpmMode::Linear => v.re,
        })
        .collect();
    let mut sorted = metric.clone();
    sorted.sort_by(f64::total_cmp);
    let rank = |q: f64| {
        let idx = (q * sorted.len() as f64).ceil() as usize;
        sorted[idx.clamp(1, sorted.len()) - 1]
    };
    let (lo, hi) = (rank(0.01), rank(0.99));
    let span = hi - lo;

    let mut bytes = Vec::with_capacity(32 + field.nx * field.ny * 3);
    bytes.extend_from_slice(format!("P6\n{} {}\n255\n", field.nx, field.ny).as_bytes());
    for iy in (0..field.ny).rev() {
        for ix in 0..field.nx {
            let m = metric[iy * field.nx + ix];
            let level = if span <= 0.0 {
                128u8
            } else {
                (((m - lo) / span * 255.0).round().clamp(0.0, 255.0)) as u8
            };
            bytes.extend_from_slice(&[level, level, level]);
        }
    }
    atomic_write(path, &bytes)
}

fn label_str(label: EndpointLabel) -> &'static str {
    match label {
        EndpointLabel::Z0 => "z0",
        EndpointLabel::Z1 => "z1",
        EndpointLabel::Open => "open",
    }
}

fn push_points(out: &mut String, points: &[num_complex::Complex64]) {
    out.push('[');
    for (k, p) in points.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        let _ = write!(out, "[{},{}]", fmt_f(p.re), fmt_f(p.im));
    }
    out.push(']');
}

fn push_line(out: &mut String, indent: &str, line: &NodalLine) {
    let _ = write!(
        out,
        "{indent}{{\"closed\": {}, \"endpoints_on\": [\"{}\", \"{}\"], \"points\": ",
        line.closed,
        label_str(line.endpoints_on.0),
        label_str(line.endpoints_on.1),
    );
    push_points(out, &line.points);
    out.push('}');
}

/// JSON report: the raw nodal lines, the scenario verdict, and one
/// flux/mass/bound record per closed loop.
pub fn write_nodal_json(path: &Path, analysis: &NodalAnalysis) -> Result<()> {
    let scenario = match analysis.scenario {
        NodalScenario::BridgePair => "bridge_pair",
        NodalScenario::TwoLoops => "two_loops",
        NodalScenario::Other => "other",
    };
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"zero_index\": {},", analysis.zero_index);
    let _ = writeln!(out, "  \"scenario\": \"{scenario}\",");
    out.push_str("  \"lines\": [\n");
    for (k, line) in analysis.lines.iter().enumerate() {
        push_line(&mut out, "    ", line);
        out.push_str(if k + 1 < analysis.lines.len() { ",\n" } else { "\n" });
    }
    out.push_str("  ],\n  \"loops\": [\n");
    for (k, report) in analysis.loops.iter().enumerate() {
        let _ = write!(
            out,
            "    {{\"flux\": {}, \"mass\": {}, \"im_e_bound\": {}, \"points\": ",
            fmt_f(report.flux),
            fmt_f(report.mass),
            fmt_f(report.im_e_bound),
        );
        push_points(&mut out, &report.loop_line.points);
        out.push('}');
        out.push_str(if k + 1 < analysis.loops.len() { ",\n" } else { "\n" });
    }
    out.push_str("  ]\n}\n");
    atomic_write(path, out.as_bytes())
}

/// One ordinate per line, readable back by the zeros-file parser. The file
/// holds exactly `zeros.len()` lines, nothing else.
pub fn write_zeros_file(path: &Path, zeros: &[ZetaZero]) -> Result<()> {
    let mut out = String::new();
    for z in zeros {
        let _ = writeln!(out, "{:.15}", z.gamma_n);
    }
    atomic_write(path, out.as_bytes())
}
