//! Verification layer: finite-difference residuals of H psi = E psi, nodal
//! lines of the phase-normalized field, the cross structure of the reduced
//! wave at tau = i, and flux integrals bounding |Im E| on closed nodal loops.

use crate::error::{Error, Result};
use crate::lfunctions::ZetaZero;
use crate::modular::{potential_v, UpperHalfPoint};
use crate::wavefield::{GridField, PsiEvaluator};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Median finite-difference residual of the eigenvalue equation on a grid.
#[derive(Clone, Copy, Debug)]
pub struct ResidualReport {
    pub zero_index: usize,
    pub median_rel_residual: f64,
    pub grid_spacing: f64,
    /// Fraction of grid samples that entered the median after masking.
    pub interior_fraction: f64,
}

/// r(z) = |-sqrt(V) Lap5(sqrt(V) psi) - E psi| / (|E psi| + eps) with the
/// five-point Laplacian, over interior samples further than 5h from the
/// ramification points. The potential is recomputed from scratch here, so the
/// check spans the entire pipeline and not just the wave code.
pub fn operator_residual(zero: &ZetaZero, field: &GridField) -> Result<ResidualReport> {
    let (hx, hy) = (field.hx(), field.hy());
    if (hx - hy).abs() > 1e-9 * hx.max(hy) {
        return Err(Error::SpacingNonuniform { hx, hy });
    }
    let h = hx;
    let gamma = zero.gamma_n;
    if h * h * gamma * gamma > 0.5 {
        return Err(Error::SpacingTooCoarse { h, gamma });
    }
    let (nx, ny) = (field.nx, field.ny);
    let sqrt_v_rows: Result<Vec<Vec<f64>>> = (0..ny)
        .into_par_iter()
        .map(|iy| {
            (0..nx)
                .map(|ix| Ok(potential_v(field.z_at(ix, iy))?.value.sqrt()))
                .collect()
        })
        .collect();
    let sqrt_v_rows = sqrt_v_rows?;
    let sqrt_v = |ix: usize, iy: usize| sqrt_v_rows[iy][ix];
    let g = |ix: usize, iy: usize| sqrt_v(ix, iy) * field.value(ix, iy);

    let energy = zero.energy;
    let mut residuals: Vec<f64> = Vec::new();
    for iy in 1..ny - 1 {
        for ix in 1..nx - 1 {
            let z = field.z_at(ix, iy);
            let clear = z.norm() > 5.0 * h && (z - 1.0).norm() > 5.0 * h;
            let unmasked = !field.masked(ix, iy)
                && !field.masked(ix - 1, iy)
                && !field.masked(ix + 1, iy)
                && !field.masked(ix, iy - 1)
                && !field.masked(ix, iy + 1);
            if !clear || !unmasked {
                continue;
            }
            let lap = (g(ix - 1, iy) + g(ix + 1, iy) + g(ix, iy - 1) + g(ix, iy + 1)
                - 4.0 * g(ix, iy))
                / (h * h);
            let lhs = -sqrt_v(ix, iy) * lap;
            let rhs = energy * field.value(ix, iy);
            residuals.push((lhs - rhs).norm() / (rhs.norm() + 1e-300));
        }
    }
    if residuals.is_empty() {
        return Err(Error::WindowEmpty);
    }
    let interior_fraction = residuals.len() as f64 / (nx * ny) as f64;
    residuals.sort_by(|a, b| a.total_cmp(b));
    let mid = residuals.len() / 2;
    let median = if residuals.len() % 2 == 1 {
        residuals[mid]
    } else {
        0.5 * (residuals[mid - 1] + residuals[mid])
    };
    Ok(ResidualReport {
        zero_index: zero.index,
        median_rel_residual: median,
        grid_spacing: h,
        interior_fraction,
    })
}

/// Where an open nodal line terminates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndpointLabel {
    Z0,
    Z1,
    Open,
}

/// One zero-level contour of the real part of a field.
#[derive(Clone, Debug)]
pub struct NodalLine {
    pub points: Vec<Complex64>,
    pub closed: bool,
    pub endpoints_on: (EndpointLabel, EndpointLabel),
}

/// Marching-squares extraction of the zero set of Re(field), chained into
/// polylines. Endpoints within two grid spacings of a ramification point are
/// snapped onto it and labeled. `tolerance` defaults to 1e-6 max|field|.
pub fn extract_nodal_lines(field: &GridField, tolerance: Option<f64>) -> Result<Vec<NodalLine>> {
    let max_abs = field.values.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let max_im = field.values.iter().map(|v| v.im.abs()).fold(0.0f64, f64::max);
    if max_abs == 0.0 {
        return Ok(Vec::new());
    }
    let fraction = max_im / max_abs;
    if fraction > 0.01 {
        return Err(Error::PhaseResidual { fraction });
    }
    let tol = tolerance.unwrap_or(1e-6 * max_abs);

    let (nx, ny) = (field.nx, field.ny);
    let re = |ix: usize, iy: usize| field.value(ix, iy).re;
    let im = |ix: usize, iy: usize| field.value(ix, iy).im;

    // Each cell contributes segments between crossing points on its edges.
    // Edges are identified globally: horizontal edge from (i, j) to (i+1, j)
    // has id 2 (j nx + i), the vertical edge from (i, j) to (i, j+1) adds 1.
    let h_edge = |i: usize, j: usize| ((j * nx + i) * 2) as u64;
    let v_edge = |i: usize, j: usize| ((j * nx + i) * 2 + 1) as u64;

    let mut crossings: BTreeMap<u64, (Complex64, f64)> = BTreeMap::new();
    let mut segments: Vec<(u64, u64)> = Vec::new();
    let cross_on = |id: u64,
                        a: (usize, usize),
                        b: (usize, usize),
                        crossings: &mut BTreeMap<u64, (Complex64, f64)>| {
        crossings.entry(id).or_insert_with(|| {
            let (fa, fb) = (re(a.0, a.1), re(b.0, b.1));
            let t = fa / (fa - fb);
            let pa = field.z_at(a.0, a.1);
            let pb = field.z_at(b.0, b.1);
            let ia = im(a.0, a.1);
            let ib = im(b.0, b.1);
            (pa + t * (pb - pa), ia + t * (ib - ia))
        });
    };

    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let inside = |v: f64| v > 0.0;
            let c0 = inside(re(i, j));
            let c1 = inside(re(i + 1, j));
            let c2 = inside(re(i + 1, j + 1));
            let c3 = inside(re(i, j + 1));
            let case = c0 as u8 | (c1 as u8) << 1 | (c2 as u8) << 2 | (c3 as u8) << 3;
            if case == 0 || case == 15 {
                continue;
            }
            let bottom = h_edge(i, j);
            let top = h_edge(i, j + 1);
            let left = v_edge(i, j);
            let right = v_edge(i + 1, j);
            let mut emit = |ea: u64, eb: u64| segments.push((ea, eb));
            match case {
                1 | 14 => emit(left, bottom),
                2 | 13 => emit(bottom, right),
                3 | 12 => emit(left, right),
                4 | 11 => emit(right, top),
                6 | 9 => emit(bottom, top),
                7 | 8 => emit(left, top),
                5 | 10 => {
                    // Saddle cell: connect around the corners matching the
                    // sign at the cell center.
                    let center = 0.25
                        * (re(i, j) + re(i + 1, j) + re(i + 1, j + 1) + re(i, j + 1));
                    let diag_positive = case == 5;
                    if (center > 0.0) == diag_positive {
                        emit(bottom, right);
                        emit(top, left);
                    } else {
                        emit(left, bottom);
                        emit(right, top);
                    }
                }
                _ => unreachable!(),
            }
            for &(ea, eb) in segments.iter().rev().take(if case == 5 || case == 10 {
                2
            } else {
                1
            }) {
                for id in [ea, eb] {
                    if id == bottom {
                        cross_on(id, (i, j), (i + 1, j), &mut crossings);
                    } else if id == top {
                        cross_on(id, (i, j + 1), (i + 1, j + 1), &mut crossings);
                    } else if id == left {
                        cross_on(id, (i, j), (i, j + 1), &mut crossings);
                    } else {
                        cross_on(id, (i + 1, j), (i + 1, j + 1), &mut crossings);
                    }
                }
            }
        }
    }

    for &(_, im_val) in crossings.values() {
        if im_val.abs() > 10.0 * tol {
            return Err(Error::PhaseResidual { fraction: im_val.abs() / max_abs });
        }
    }

    let snap = 2.0 * field.hx().max(field.hy());
    let mut lines = Vec::new();
    for (points, closed) in chain_segments(&segments, &crossings) {
        lines.extend(split_at_singular(points, closed, snap));
    }
    Ok(lines)
}

fn chain_segments(
    segments: &[(u64, u64)],
    crossings: &BTreeMap<u64, (Complex64, f64)>,
) -> Vec<(Vec<Complex64>, bool)> {
    let mut adjacency: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        adjacency.entry(a).or_default().push(k);
        adjacency.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();

    let walk = |start_edge: u64, used: &mut Vec<bool>| -> Vec<u64> {
        let mut path = vec![start_edge];
        let mut cursor = start_edge;
        loop {
            let next_seg = adjacency[&cursor].iter().copied().find(|&s| !used[s]);
            let Some(s) = next_seg else { break };
            used[s] = true;
            let (a, b) = segments[s];
            cursor = if a == cursor { b } else { a };
            path.push(cursor);
            if cursor == start_edge {
                break;
            }
        }
        path
    };

    // Open chains first, seeded at degree-1 edges in ascending id order, then
    // whatever remains must be cycles.
    let endpoints: Vec<u64> = adjacency
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(&id, _)| id)
        .collect();
    for &edge in &endpoints {
        if adjacency[&edge].iter().all(|&s| used[s]) {
            continue;
        }
        let path = walk(edge, &mut used);
        let closed = path.len() > 2 && path[0] == path[path.len() - 1];
        lines.push((path.iter().map(|id| crossings[id].0).collect(), closed));
    }
    let all_edges: Vec<u64> = adjacency.keys().copied().collect();
    for &edge in &all_edges {
        if adjacency[&edge].iter().all(|&s| used[s]) {
            continue;
        }
        let path = walk(edge, &mut used);
        let closed = path.len() > 2 && path[0] == path[path.len() - 1];
        lines.push((path.iter().map(|id| crossings[id].0).collect(), closed));
    }
    lines
}

fn singular_touch(p: Complex64, snap: f64) -> Option<(EndpointLabel, Complex64)> {
    if p.norm() <= snap {
        Some((EndpointLabel::Z0, Complex64::new(0.0, 0.0)))
    } else if (p - 1.0).norm() <= snap {
        Some((EndpointLabel::Z1, Complex64::new(1.0, 0.0)))
    } else {
        None
    }
}

/// Splits a polyline wherever it passes within the snap distance of z = 0 or
/// z = 1, replacing each touch run by the exact singular point. A closed loop
/// through both points becomes two bridge lines; through one point, a line
/// that leaves and re-enters it.
fn split_at_singular(points: Vec<Complex64>, closed: bool, snap: f64) -> Vec<NodalLine> {
    let mut pts = points;
    if closed && pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    // Collapse each run of consecutive touching points into one exact vertex.
    let mut verts: Vec<(Complex64, Option<EndpointLabel>)> = Vec::with_capacity(pts.len());
    for p in pts {
        match singular_touch(p, snap) {
            Some((label, exact)) => {
                if verts.last().map(|(_, l)| *l) != Some(Some(label)) {
                    verts.push((exact, Some(label)));
                }
            }
            None => verts.push((p, None)),
        }
    }
    if closed
        && verts.len() > 1
        && verts.first().map(|v| v.1) == verts.last().map(|v| v.1)
        && verts[0].1.is_some()
    {
        verts.pop();
    }
    let touch_count = verts.iter().filter(|(_, l)| l.is_some()).count();

    if closed {
        if touch_count == 0 {
            let mut loop_pts: Vec<Complex64> = verts.iter().map(|v| v.0).collect();
            loop_pts.push(loop_pts[0]);
            return vec![NodalLine {
                points: loop_pts,
                closed: true,
                endpoints_on: (EndpointLabel::Open, EndpointLabel::Open),
            }];
        }
        if touch_count == verts.len() {
            return Vec::new();
        }
        // Rotate so the sequence starts at a touch vertex, then cut at every
        // touch; the loop becomes touch-to-touch open lines.
        let first_touch = verts.iter().position(|(_, l)| l.is_some()).unwrap();
        verts.rotate_left(first_touch);
        let mut lines = Vec::new();
        let mut start = 0;
        for k in 1..=verts.len() {
            let idx = k % verts.len();
            if verts[idx].1.is_none() && k < verts.len() {
                continue;
            }
            let mut seg: Vec<Complex64> = verts[start..k].iter().map(|v| v.0).collect();
            seg.push(verts[idx].0);
            let labels = (verts[start].1.unwrap(), verts[idx].1.unwrap());
            if seg.len() >= 2 {
                lines.push(NodalLine { points: seg, closed: false, endpoints_on: labels });
            }
            start = idx;
            if k == verts.len() {
                break;
            }
        }
        return lines;
    }

    // Open polyline: cut at interior touches; the original ends keep their
    // own touch label or stay open.
    let mut lines = Vec::new();
    let mut start = 0;
    for k in 1..verts.len() {
        let at_cut = verts[k].1.is_some() || k == verts.len() - 1;
        if !at_cut {
            continue;
        }
        let seg: Vec<Complex64> = verts[start..=k].iter().map(|v| v.0).collect();
        if seg.len() >= 2 {
            let labels = (
                verts[start].1.unwrap_or(EndpointLabel::Open),
                verts[k].1.unwrap_or(EndpointLabel::Open),
            );
            lines.push(NodalLine { points: seg, closed: false, endpoints_on: labels });
        }
        start = k;
    }
    lines
}

/// Stitches raw lines into closed loops: already-closed contours, lines that
/// leave and re-enter the same ramification point, and pairs of bridges
/// running from z = 0 to z = 1.
pub fn assemble_closed_loops(lines: &[NodalLine]) -> Vec<NodalLine> {
    let mut loops = Vec::new();
    let mut bridges: Vec<&NodalLine> = Vec::new();
    for line in lines {
        if line.closed {
            loops.push(line.clone());
            continue;
        }
        match line.endpoints_on {
            (EndpointLabel::Z0, EndpointLabel::Z0) | (EndpointLabel::Z1, EndpointLabel::Z1) => {
                let mut points = line.points.clone();
                if points.first() != points.last() {
                    points.push(points[0]);
                }
                loops.push(NodalLine { points, closed: true, endpoints_on: line.endpoints_on });
            }
            (EndpointLabel::Z0, EndpointLabel::Z1) | (EndpointLabel::Z1, EndpointLabel::Z0) => {
                bridges.push(line);
            }
            _ => {}
        }
    }
    for pair in bridges.chunks(2) {
        let [a, b] = pair else { continue };
        // Orient both z0 -> z1, then traverse a forward and b backward.
        let fwd = |l: &NodalLine| -> Vec<Complex64> {
            if l.endpoints_on.0 == EndpointLabel::Z0 {
                l.points.clone()
            } else {
                l.points.iter().rev().copied().collect()
            }
        };
        let mut points = fwd(a);
        let back = fwd(b);
        points.extend(back.iter().rev().skip(1));
        loops.push(NodalLine {
            points,
            closed: true,
            endpoints_on: (EndpointLabel::Z0, EndpointLabel::Z0),
        });
    }
    loops
}

/// The two topologies the nodal set can take around the ramification points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodalScenario {
    /// Nodal lines run from z = 0 to z = 1 (two or more bridges).
    BridgePair,
    /// Separate loops based at z = 0 and at z = 1.
    TwoLoops,
    Other,
}

pub fn classify_nodal_scenario(lines: &[NodalLine]) -> NodalScenario {
    let mut bridges = 0;
    let mut z0_loops = 0;
    let mut z1_loops = 0;
    for line in lines {
        match line.endpoints_on {
            (EndpointLabel::Z0, EndpointLabel::Z1) | (EndpointLabel::Z1, EndpointLabel::Z0) => {
                bridges += 1;
            }
            (EndpointLabel::Z0, EndpointLabel::Z0) => z0_loops += 1,
            (EndpointLabel::Z1, EndpointLabel::Z1) => z1_loops += 1,
            _ => {}
        }
    }
    if bridges >= 2 {
        NodalScenario::BridgePair
    } else if z0_loops >= 1 && z1_loops >= 1 {
        NodalScenario::TwoLoops
    } else {
        NodalScenario::Other
    }
}

/// Angles (degrees) where the reduced wave changes sign on a circle around
/// tau = i, and whether they form the expected cross.
#[derive(Clone, Debug)]
pub struct CrossReport {
    pub zero_index: usize,
    pub radius: f64,
    pub crossing_angles_deg: Vec<f64>,
    pub is_cross: bool,
}

const CROSS_SAMPLES: usize = 720;

/// Samples Re phi_normalized(i + radius e^(i theta)) at half-degree steps and
/// reports the sign crossings. A cross verdict requires exactly four, each
/// within 10 degrees of an odd multiple of 45.
pub fn detect_cross_at_i(ev: &PsiEvaluator, radius: f64) -> Result<CrossReport> {
    if !(1e-3..=5e-2).contains(&radius) {
        return Err(Error::FitRadius { radius });
    }
    let mut samples = Vec::with_capacity(CROSS_SAMPLES);
    for j in 0..CROSS_SAMPLES {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / CROSS_SAMPLES as f64;
        let eta = Complex64::from_polar(radius, theta);
        let point = UpperHalfPoint::new(Complex64::new(0.0, 1.0) + eta)?;
        samples.push(ev.phi_normalized(&point)?.re);
    }
    let angles = crossing_angles_deg(&samples);
    let is_cross = cross_verdict(&angles);
    Ok(CrossReport { zero_index: ev.zero().index, radius, crossing_angles_deg: angles, is_cross })
}

fn crossing_angles_deg(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let step = 360.0 / n as f64;
    let mut angles = Vec::new();
    for j in 0..n {
        let a = samples[j];
        let b = samples[(j + 1) % n];
        if a == 0.0 {
            angles.push(j as f64 * step);
        } else if a * b < 0.0 {
            angles.push((j as f64 + a / (a - b)) * step);
        }
    }
    angles
}

fn cross_verdict(angles: &[f64]) -> bool {
    if angles.len() != 4 {
        return false;
    }
    let targets = [45.0, 135.0, 225.0, 315.0];
    let mut sorted = angles.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .iter()
        .zip(targets.iter())
        .all(|(a, t)| {
            let d = (a - t).abs();
            d.min(360.0 - d) <= 10.0
        })
}

/// Flux of the probability current through a closed loop, the enclosed mass,
/// and the implied bound on |Im E|.
#[derive(Clone, Debug)]
pub struct FluxReport {
    pub loop_line: NodalLine,
    pub flux: f64,
    pub mass: f64,
    pub im_e_bound: f64,
}

/// Generic flux integral: J = 2 sqrt(V) Im(conj(psi) grad(sqrt(V) psi)) from
/// the velocity operator -i sqrt(V) grad sqrt(V), integrated over the loop
/// with outward normals; mass is |psi|^2 rasterized over the interior at
/// spacing h.
pub fn flux_integral_with(
    psi: &(impl Fn(Complex64) -> Result<Complex64> + Sync),
    sqrt_v: &(impl Fn(Complex64) -> Result<f64> + Sync),
    loop_line: &NodalLine,
    h: f64,
) -> Result<FluxReport> {
    if !loop_line.closed || loop_line.points.len() < 4 {
        return Err(Error::OpenLoop);
    }
    let mut pts = loop_line.points.clone();
    if pts.first() != pts.last() {
        return Err(Error::OpenLoop);
    }
    pts.pop();
    let signed_area: f64 = (0..pts.len())
        .map(|k| {
            let a = pts[k];
            let b = pts[(k + 1) % pts.len()];
            0.5 * (a.re * b.im - b.re * a.im)
        })
        .sum();
    if signed_area < 0.0 {
        pts.reverse();
    }

    let g = |z: Complex64| -> Result<Complex64> { Ok(Complex64::new(sqrt_v(z)?, 0.0) * psi(z)?) };
    let mut flux = 0.0;
    for k in 0..pts.len() {
        let a = pts[k];
        let b = pts[(k + 1) % pts.len()];
        let d = b - a;
        let len = d.norm();
        if len == 0.0 {
            continue;
        }
        let mid = 0.5 * (a + b);
        // Outward normal of a counterclockwise loop.
        let normal = (d.im / len, -d.re / len);
        let gx = (g(mid + h)? - g(mid - h)?) / (2.0 * h);
        let gy = (g(mid + Complex64::new(0.0, h))? - g(mid - Complex64::new(0.0, h))?) / (2.0 * h);
        let dot = gx * normal.0 + gy * normal.1;
        let j_n = 2.0 * sqrt_v(mid)? * (psi(mid)?.conj() * dot).im;
        flux += j_n * len;
    }

    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &pts {
        x_min = x_min.min(p.re);
        x_max = x_max.max(p.re);
        y_min = y_min.min(p.im);
        y_max = y_max.max(p.im);
    }
    let cols = ((x_max - x_min) / h).floor() as usize;
    let rows = ((y_max - y_min) / h).floor() as usize;
    let row_masses: Result<Vec<f64>> = (0..rows)
        .into_par_iter()
        .map(|j| {
            let y = y_min + (j as f64 + 0.5) * h;
            let mut acc = 0.0;
            for i in 0..cols {
                let x = x_min + (i as f64 + 0.5) * h;
                if point_in_polygon(Complex64::new(x, y), &pts) {
                    acc += psi(Complex64::new(x, y))?.norm_sqr() * h * h;
                }
            }
            Ok(acc)
        })
        .collect();
    let mass: f64 = row_masses?.iter().sum();
    if mass == 0.0 {
        return Err(Error::EmptyLoopMass);
    }
    Ok(FluxReport {
        loop_line: loop_line.clone(),
        flux,
        mass,
        im_e_bound: flux.abs() / (2.0 * mass),
    })
}

/// Flux integral for an eigenstate, with the geometric potential recomputed
/// on the fly.
pub fn flux_integral(ev: &PsiEvaluator, loop_line: &NodalLine, h: f64) -> Result<FluxReport> {
    let psi = |z: Complex64| ev.psi(z);
    let sv = |z: Complex64| Ok(potential_v(z)?.value.sqrt());
    flux_integral_with(&psi, &sv, loop_line, h)
}

fn point_in_polygon(p: Complex64, polygon: &[Complex64]) -> bool {
    let mut inside = false;
    for k in 0..polygon.len() {
        let a = polygon[k];
        let b = polygon[(k + 1) % polygon.len()];
        if (a.im > p.im) != (b.im > p.im) {
            let x_cross = a.re + (p.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if p.re < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

/// Full nodal verdict for one field: raw lines, the scenario, and a flux
/// report per closed loop.
#[derive(Clone, Debug)]
pub struct NodalAnalysis {
    pub zero_index: usize,
    pub lines: Vec<NodalLine>,
    pub scenario: NodalScenario,
    pub loops: Vec<FluxReport>,
}

pub fn analyze_field(
    ev: &PsiEvaluator,
    field: &GridField,
    tolerance: Option<f64>,
) -> Result<NodalAnalysis> {
    let lines = extract_nodal_lines(field, tolerance)?;
    let scenario = classify_nodal_scenario(&lines);
    let closed = assemble_closed_loops(&lines);
    let mut loops = Vec::with_capacity(closed.len());
    for l in &closed {
        loops.push(flux_integral(ev, l, field.hx())?);
    }
    Ok(NodalAnalysis { zero_index: field.zero_index, lines, scenario, loops })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::{self, tau_of_z};
    use crate::wavefield::{evaluate_grid, FieldKind, Window};

    const GAMMA_1: f64 = 14.13472514173469379046;

    fn first_zero() -> ZetaZero {
        ZetaZero::from_gamma(1, GAMMA_1)
    }

    fn psi_field(window: Window, nx: usize, ny: usize) -> GridField {
        evaluate_grid(FieldKind::Psi(&first_zero()), window, nx, ny).unwrap()
    }

    #[test]
    fn residual_is_small_for_a_true_eigenfunction() {
        let window = Window::new(0.3, 0.7, 0.6, 1.0).unwrap();
        let field = psi_field(window, 81, 81);
        let report = operator_residual(&first_zero(), &field).unwrap();
        assert!(report.median_rel_residual <= 2e-2, "median {}", report.median_rel_residual);
        assert!(report.interior_fraction > 0.0 && report.interior_fraction <= 1.0);
        assert!((report.grid_spacing - 0.005).abs() < 1e-12);
    }

    #[test]
    fn residual_converges_at_second_order() {
        let window = Window::new(0.4, 0.6, 0.7, 0.9).unwrap();
        let coarse = operator_residual(&first_zero(), &psi_field(window, 21, 21)).unwrap();
        let fine = operator_residual(&first_zero(), &psi_field(window, 41, 41)).unwrap();
        let ratio = coarse.median_rel_residual / fine.median_rel_residual;
        assert!(ratio >= 3.0, "richardson ratio {ratio}");
    }

    #[test]
    fn residual_rejects_a_non_eigenfunction() {
        // V^{-1/2} (Im tau)^2 solves the equation at s = 2, whose energy
        // s(1-s) = -2 is nowhere near E_1; the residual must say so.
        let window = Window::new(0.35, 0.65, 0.65, 0.95).unwrap();
        let synthetic = GridField::from_fn(window, 31, 31, |z| {
            let tau = tau_of_z(z).unwrap().tau();
            let (e4, e6) = modular::eisenstein_reduced(tau);
            let metric = tau.im * modular::dz_dtau_from(e4, e6).unwrap().norm();
            Complex64::new(tau.im * tau.im / metric, 0.0)
        })
        .unwrap();
        let report = operator_residual(&first_zero(), &synthetic).unwrap();
        assert!(report.median_rel_residual > 0.5, "median {}", report.median_rel_residual);
    }

    #[test]
    fn residual_spacing_guards() {
        let square = Window::new(0.3, 0.7, 0.6, 1.0).unwrap();
        let coarse = psi_field(square, 7, 7);
        assert!(matches!(
            operator_residual(&first_zero(), &coarse),
            Err(Error::SpacingTooCoarse { .. })
        ));
        let skewed = Window::new(0.3, 0.7, 0.6, 1.4).unwrap();
        let aniso = psi_field(skewed, 41, 41);
        assert!(matches!(
            operator_residual(&first_zero(), &aniso),
            Err(Error::SpacingNonuniform { .. })
        ));
    }

    #[test]
    fn extracts_a_synthetic_circle_as_one_closed_loop() {
        let window = Window::new(-0.2, 0.8, -0.1, 0.9).unwrap();
        let center = Complex64::new(0.3, 0.4);
        let field = GridField::from_fn(window, 101, 101, |z| {
            Complex64::new((z - center).norm_sqr() - 0.0625, 0.0)
        })
        .unwrap();
        let lines = extract_nodal_lines(&field, None).unwrap();
        assert_eq!(lines.len(), 1);
        let line = &lines[0];
        assert!(line.closed);
        assert_eq!(line.points.first(), line.points.last());
        for p in &line.points {
            assert!(((p - center).norm() - 0.25).abs() < 5e-3);
        }
    }

    #[test]
    fn extracts_a_synthetic_saddle_as_diagonal_lines() {
        let window = Window::new(-0.5, 0.5, -0.5, 0.5).unwrap();
        let field = GridField::from_fn(window, 41, 41, |z| {
            Complex64::new(z.re * z.re - z.im * z.im, 0.0)
        })
        .unwrap();
        let lines = extract_nodal_lines(&field, None).unwrap();
        assert!(!lines.is_empty());
        for line in &lines {
            for p in &line.points {
                assert!((p.re.abs() - p.im.abs()).abs() < 1e-9, "off diagonal: {p}");
            }
            // Endpoints either snap to z = 0 or sit on the window boundary.
            if !line.closed {
                for (p, label) in [
                    (line.points[0], line.endpoints_on.0),
                    (*line.points.last().unwrap(), line.endpoints_on.1),
                ] {
                    let on_boundary = p.re.abs() > 0.5 - 1e-9 || p.im.abs() > 0.5 - 1e-9;
                    assert!(label == EndpointLabel::Z0 || on_boundary);
                }
            }
        }
    }

    #[test]
    fn phase_residual_guard_rejects_complex_fields() {
        let window = Window::new(-0.5, 0.5, -0.5, 0.5).unwrap();
        let field = GridField::from_fn(window, 11, 11, |z| {
            Complex64::new(z.re, 0.5 * z.re.abs() + 0.1)
        })
        .unwrap();
        assert!(matches!(
            extract_nodal_lines(&field, None),
            Err(Error::PhaseResidual { .. })
        ));
    }

    #[test]
    fn assembles_bridges_and_singular_self_loops() {
        let z0 = EndpointLabel::Z0;
        let z1 = EndpointLabel::Z1;
        let bridge_a = NodalLine {
            points: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.5, 0.4),
                Complex64::new(1.0, 0.0),
            ],
            closed: false,
            endpoints_on: (z0, z1),
        };
        let bridge_b = NodalLine {
            points: vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, -0.4),
                Complex64::new(0.0, 0.0),
            ],
            closed: false,
            endpoints_on: (z1, z0),
        };
        let loops = assemble_closed_loops(&[bridge_a.clone(), bridge_b.clone()]);
        assert_eq!(loops.len(), 1);
        assert!(loops[0].closed);
        assert_eq!(loops[0].points.first(), loops[0].points.last());
        assert_eq!(loops[0].points.len(), 5);
        assert_eq!(
            classify_nodal_scenario(&[bridge_a, bridge_b]),
            NodalScenario::BridgePair
        );

        let self_loop = |at: Complex64, label: EndpointLabel| NodalLine {
            points: vec![at, at + Complex64::new(0.1, 0.1), at + Complex64::new(0.0, 0.15), at],
            closed: false,
            endpoints_on: (label, label),
        };
        let pair = [
            self_loop(Complex64::new(0.0, 0.0), z0),
            self_loop(Complex64::new(1.0, 0.0), z1),
        ];
        let loops = assemble_closed_loops(&pair);
        assert_eq!(loops.len(), 2);
        assert!(loops.iter().all(|l| l.closed));
        assert_eq!(classify_nodal_scenario(&pair), NodalScenario::TwoLoops);
        assert_eq!(classify_nodal_scenario(&[]), NodalScenario::Other);
    }

    #[test]
    fn cross_detected_on_the_first_zero() {
        let ev = PsiEvaluator::new(&first_zero()).unwrap();
        for radius in [5e-3, 1e-2, 2e-2] {
            let report = detect_cross_at_i(&ev, radius).unwrap();
            assert!(report.is_cross, "radius {radius}: {:?}", report.crossing_angles_deg);
            assert_eq!(report.crossing_angles_deg.len(), 4);
        }
        assert!(matches!(detect_cross_at_i(&ev, 1e-4), Err(Error::FitRadius { .. })));
    }

    #[test]
    fn cross_math_on_synthetic_quadratic() {
        let samples: Vec<f64> = (0..720)
            .map(|j| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / 720.0;
                (2.0 * theta).cos()
            })
            .collect();
        let angles = crossing_angles_deg(&samples);
        assert_eq!(angles.len(), 4);
        for (a, t) in angles.iter().zip([45.0, 135.0, 225.0, 315.0]) {
            assert!((a - t).abs() < 0.5, "{a} vs {t}");
        }
        assert!(cross_verdict(&angles));
        assert!(!cross_verdict(&[45.0, 135.0, 225.0]));
        assert!(!cross_verdict(&[10.0, 135.0, 225.0, 315.0]));
    }

    fn circle_loop(center: Complex64, radius: f64, n: usize) -> NodalLine {
        let mut points: Vec<Complex64> = (0..n)
            .map(|k| center + Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        points.push(points[0]);
        NodalLine { points, closed: true, endpoints_on: (EndpointLabel::Open, EndpointLabel::Open) }
    }

    #[test]
    fn flux_vanishes_for_a_real_field() {
        let loop_line = circle_loop(Complex64::new(0.0, 0.0), 0.25, 256);
        let psi = |z: Complex64| Ok(Complex64::new(z.norm_sqr() - 0.0625, 0.0));
        let sv = |_: Complex64| Ok(1.0);
        let report = flux_integral_with(&psi, &sv, &loop_line, 1e-3).unwrap();
        assert_eq!(report.flux, 0.0);
        assert!(report.mass > 0.0);
        assert_eq!(report.im_e_bound, 0.0);
    }

    #[test]
    fn flux_detects_a_genuine_current() {
        // psi = e^{i |z|^2} carries the radial current J = 4 (x, y); through
        // the unit circle that is exactly 8 pi.
        let loop_line = circle_loop(Complex64::new(0.0, 0.0), 1.0, 512);
        let psi = |z: Complex64| Ok(Complex64::from_polar(1.0, z.norm_sqr()));
        let sv = |_: Complex64| Ok(1.0);
        let report = flux_integral_with(&psi, &sv, &loop_line, 1e-3).unwrap();
        let expected = 8.0 * std::f64::consts::PI;
        assert!((report.flux - expected).abs() < 1e-2 * expected, "flux {}", report.flux);
        assert!(report.im_e_bound > 0.0);
    }

    #[test]
    fn flux_guards() {
        let open = NodalLine {
            points: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            closed: false,
            endpoints_on: (EndpointLabel::Open, EndpointLabel::Open),
        };
        let psi = |_: Complex64| Ok(Complex64::new(1.0, 0.0));
        let sv = |_: Complex64| Ok(1.0);
        assert!(matches!(
            flux_integral_with(&psi, &sv, &open, 1e-3),
            Err(Error::OpenLoop)
        ));
        let tiny = circle_loop(Complex64::new(0.0, 0.0), 1e-4, 16);
        assert!(matches!(
            flux_integral_with(&psi, &sv, &tiny, 0.25),
            Err(Error::EmptyLoopMass)
        ));
    }

    #[test]
    fn analyze_field_finds_the_first_zero_bridge_pair() {
        let window = Window::new(-0.6, 1.6, -0.8, 0.8).unwrap();
        let field = psi_field(window, 111, 81);
        let ev = PsiEvaluator::new(&first_zero()).unwrap();
        let analysis = analyze_field(&ev, &field, None).unwrap();
        assert_eq!(analysis.scenario, NodalScenario::BridgePair);
        assert!(!analysis.loops.is_empty());
        for report in &analysis.loops {
            assert!(report.mass > 0.0);
            assert!(report.im_e_bound < 1e-3, "bound {}", report.im_e_bound);
        }
    }
}
