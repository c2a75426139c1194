//! Infill and part planners: concentric loops, line infill, full membrane
//! and dogbone toolpaths.

use crate::error::{Error, Result};
use crate::inflation::Infill;

use super::{circle_polyline, MembranePrintSpec, Toolpath};

/// Nested concentric loop radii for a disc of the given radius, outermost
/// first: `r_k = radius - line_width/2 - k*line_width` while `r_k >= line_width/2`.
pub fn plan_concentric(radius: f64, line_width: f64) -> Result<Vec<f64>> {
    if !(line_width > 0.0) {
        return Err(Error::invalid("line_width must be > 0"));
    }
    if !(radius > line_width / 2.0) {
        return Err(Error::Geometry(format!(
            "radius {radius} too small for line width {line_width}"
        )));
    }
    let mut loops = Vec::new();
    let mut r = radius - line_width / 2.0;
    while r >= line_width / 2.0 - 1e-12 {
        loops.push(r);
        r -= line_width;
    }
    if loops.is_empty() {
        return Err(Error::Geometry("no concentric loop fits the region".into()));
    }
    Ok(loops)
}

/// Parallel chords clipping a disc, serpentine-ordered. Offsets are
/// `y_j = j*spacing` for `|y_j| < radius`; each chord has half-length
/// `sqrt(radius² - y_j²)` and is rotated by `angle_deg`.
pub fn plan_lines(radius: f64, spacing: f64, angle_deg: f64) -> Result<Vec<((f64, f64), (f64, f64))>> {
    if !(spacing > 0.0) || !(radius > 0.0) {
        return Err(Error::invalid("need spacing > 0 and radius > 0"));
    }
    let j_max = ((radius / spacing) - 1e-12).floor() as i64;
    let (sin_a, cos_a) = angle_deg.to_radians().sin_cos();
    let mut chords = Vec::with_capacity((2 * j_max + 1) as usize);
    for (idx, j) in (-j_max..=j_max).enumerate() {
        let y = j as f64 * spacing;
        let half = (radius * radius - y * y).sqrt();
        let (x0, x1) = if idx % 2 == 0 { (-half, half) } else { (half, -half) };
        let p0 = (x0 * cos_a - y * sin_a, x0 * sin_a + y * cos_a);
        let p1 = (x1 * cos_a - y * sin_a, x1 * sin_a + y * cos_a);
        chords.push((p0, p1));
    }
    Ok(chords)
}

/// Line infill chords for one membrane layer, including boundary closure
/// chords at `±(radius - w/2)` when the regular offsets leave a sliver wider
/// than half a bead at the top or bottom of the disc.
fn membrane_line_chords(
    radius: f64,
    clip_radius: f64,
    spacing: f64,
    angle_deg: f64,
) -> Result<Vec<((f64, f64), (f64, f64))>> {
    if !(spacing > 0.0 && spacing <= 2.0 * radius) {
        return Err(Error::invalid("spacing must be in (0, 2*radius]"));
    }
    let clip = clip_radius;
    let (sin_a, cos_a) = angle_deg.to_radians().sin_cos();
    let mut offsets: Vec<f64> = Vec::new();
    let j_max = ((radius / spacing) - 1e-12).floor() as i64;
    for j in -j_max..=j_max {
        offsets.push(j as f64 * spacing);
    }
    // Closure chords when the regular offsets leave a sliver wider than half
    // a bead at the top or bottom of the disc.
    let y_top = j_max as f64 * spacing;
    if radius - y_top > spacing / 2.0 + 1e-9 {
        offsets.insert(0, -(radius - spacing / 2.0));
        offsets.push(radius - spacing / 2.0);
    }
    let mut chords = Vec::with_capacity(offsets.len());
    for (idx, &y) in offsets.iter().enumerate() {
        let half = (clip * clip - y * y).max(0.0).sqrt();
        let (xa, xb) = if idx % 2 == 0 { (-half, half) } else { (half, -half) };
        let p0 = (xa * cos_a - y * sin_a, xa * sin_a + y * cos_a);
        let p1 = (xb * cos_a - y * sin_a, xb * sin_a + y * cos_a);
        chords.push((p0, p1));
    }
    Ok(chords)
}

/// Plan a circular membrane: per layer, perimeter loops then infill.
/// Lines infill alternates 0°/90° between layers; single-layer membranes get
/// the 50% extrusion boost.
pub fn plan_membrane(spec: &MembranePrintSpec) -> Result<Toolpath> {
    spec.validate()?;
    let r = spec.diameter / 2.0;
    let w = spec.line_width;
    let infill_radius = r - spec.perimeter_loops as f64 * w;
    if infill_radius <= w / 2.0 {
        return Err(Error::Geometry(
            "infill region degenerate after perimeters".into(),
        ));
    }
    let multiplier = if spec.layers == 1 {
        // Single-layer airtightness rule: raise the extrusion rate by 50%.
        spec.extrusion_multiplier * 1.5
    } else {
        spec.extrusion_multiplier
    };
    let mut path = Toolpath::new(spec.layer_height, multiplier);
    for layer in 0..spec.layers {
        let z = (layer + 1) as f64 * spec.layer_height;
        for i in 0..spec.perimeter_loops {
            let loop_r = r - w / 2.0 - i as f64 * w;
            let pts = circle_polyline(0.0, 0.0, loop_r, z, super::DEFAULT_CHORDAL_TOL);
            path.travel_to(pts[0], spec.travel_speed, spec.tool);
            path.extrude_polyline(&pts, w, spec.print_speed, spec.tool);
        }
        match spec.infill {
            Infill::Concentric => {
                let loops = plan_concentric(infill_radius, w)?;
                for &loop_r in &loops {
                    let pts = circle_polyline(0.0, 0.0, loop_r, z, super::DEFAULT_CHORDAL_TOL);
                    path.travel_to(pts[0], spec.travel_speed, spec.tool);
                    path.extrude_polyline(&pts, w, spec.print_speed, spec.tool);
                }
                // Seal the centre hole left inside the innermost loop.
                let hole = loops.last().unwrap() - w / 2.0;
                if hole > 1e-9 {
                    let seal_r = (hole - w / 2.0).max(0.0);
                    let pts = circle_polyline(0.0, 0.0, seal_r, z, super::DEFAULT_CHORDAL_TOL);
                    path.travel_to(pts[0], spec.travel_speed, spec.tool);
                    path.extrude_polyline(&pts, w, spec.print_speed, spec.tool);
                }
            }
            Infill::Lines => {
                let angle = if layer % 2 == 0 { 0.0 } else { 90.0 };
                // Chord half-lengths are clipped at the innermost perimeter
                // centerline so the infill tucks under the perimeter bead and
                // leaves no crescent gap at the seam.
                let clip = r - w / 2.0 - (spec.perimeter_loops.saturating_sub(1)) as f64 * w;
                let chords = membrane_line_chords(infill_radius, clip, w, angle)?;
                for &(p0, p1) in &chords {
                    path.travel_to([p0.0, p0.1, z], spec.travel_speed, spec.tool);
                    path.extrude_polyline(
                        &[[p0.0, p0.1, z], [p1.0, p1.1, z]],
                        w,
                        spec.print_speed,
                        spec.tool,
                    );
                }
            }
        }
    }
    path.validate()?;
    Ok(path)
}

// ----- polygon helpers -----

fn polygon_area(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    let mut a = 0.0;
    for i in 0..n {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % n];
        a += x0 * y1 - x1 * y0;
    }
    a / 2.0
}

fn polygon_centroid(poly: &[(f64, f64)]) -> (f64, f64) {
    let a = polygon_area(poly);
    let n = poly.len();
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % n];
        let cross = x0 * y1 - x1 * y0;
        cx += (x0 + x1) * cross;
        cy += (y0 + y1) * cross;
    }
    (cx / (6.0 * a), cy / (6.0 * a))
}

fn segments_intersect(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let cross = |o: (f64, f64), p: (f64, f64), q: (f64, f64)| {
        (p.0 - o.0) * (q.1 - o.1) - (p.1 - o.1) * (q.0 - o.0)
    };
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0))
}

fn is_simple_polygon(poly: &[(f64, f64)]) -> bool {
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        for j in i + 1..n {
            // Skip adjacent edges (they share a vertex).
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let c = poly[j];
            let d = poly[(j + 1) % n];
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

fn distance_to_boundary(p: (f64, f64), poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| point_segment_distance(p, poly[i], poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Even-odd spans of the horizontal line `y = y0` inside the polygon,
/// returned as sorted x-intervals.
fn scanline_spans(poly: &[(f64, f64)], y0: f64) -> Vec<(f64, f64)> {
    let n = poly.len();
    let mut xs = Vec::new();
    for i in 0..n {
        let (x0, ya) = poly[i];
        let (x1, yb) = poly[(i + 1) % n];
        // Half-open rule avoids double counting at shared vertices.
        if (ya <= y0 && yb > y0) || (yb <= y0 && ya > y0) {
            xs.push(x0 + (y0 - ya) / (yb - ya) * (x1 - x0));
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Shrink a scanline span so that every kept point is at least `inset` from
/// the polygon boundary. Boundaries of the kept sub-intervals are refined by
/// bisection on the distance field.
fn erode_span(
    poly: &[(f64, f64)],
    y0: f64,
    span: (f64, f64),
    inset: f64,
    step: f64,
) -> Vec<(f64, f64)> {
    if inset <= 0.0 {
        return vec![span];
    }
    // Small positive slack keeps boundary-grazing chords stable under
    // floating-point rotation of the outline.
    let d = |x: f64| distance_to_boundary((x, y0), poly) - inset + 1e-7;
    let n = (((span.1 - span.0) / step).ceil() as usize).max(2);
    let xs: Vec<f64> = (0..=n)
        .map(|i| span.0 + (span.1 - span.0) * i as f64 / n as f64)
        .collect();
    let ds: Vec<f64> = xs.iter().map(|&x| d(x)).collect();
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<f64> = None;
    for i in 0..=n {
        let inside = ds[i] >= 0.0;
        match (open, inside) {
            (None, true) => {
                let x_start = if i == 0 {
                    xs[0]
                } else {
                    refine_crossing(&d, xs[i - 1], xs[i])
                };
                open = Some(x_start);
            }
            (Some(x_start), false) => {
                let x_end = refine_crossing(&d, xs[i - 1], xs[i]);
                if x_end > x_start + 1e-9 {
                    out.push((x_start, x_end));
                }
                open = None;
            }
            _ => {}
        }
    }
    if let Some(x_start) = open {
        if xs[n] > x_start + 1e-9 {
            out.push((x_start, xs[n]));
        }
    }
    out
}

fn refine_crossing(d: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if (d(lo) >= 0.0) == (d(mid) >= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Plan an extruded polygon part (e.g. an ISO37-style dogbone): one
/// perimeter along the outline plus lines infill clipped to the polygon by
/// even-odd scanline intersection, inset by one line width.
pub fn plan_dogbone(
    outline: &[(f64, f64)],
    layers: u32,
    layer_height: f64,
    line_width: f64,
    infill_angle_deg: f64,
) -> Result<Toolpath> {
    if outline.len() < 3 {
        return Err(Error::Geometry("polygon needs at least 3 vertices".into()));
    }
    if !(layer_height > 0.0) || !(line_width > 0.0) || layers < 1 {
        return Err(Error::invalid("layers, layer_height and line_width must be positive"));
    }
    let area = polygon_area(outline);
    if area.abs() < 1e-9 {
        return Err(Error::Geometry("degenerate zero-area polygon".into()));
    }
    if !is_simple_polygon(outline) {
        return Err(Error::Geometry("self-intersecting outline".into()));
    }
    let (cx, cy) = polygon_centroid(outline);
    // Plans are centroid-origin; rotate into the infill frame for scanlines.
    let centered: Vec<(f64, f64)> = outline.iter().map(|&(x, y)| (x - cx, y - cy)).collect();
    let (sin_a, cos_a) = infill_angle_deg.to_radians().sin_cos();
    let rotated: Vec<(f64, f64)> = centered
        .iter()
        .map(|&(x, y)| (x * cos_a + y * sin_a, -x * sin_a + y * cos_a))
        .collect();
    let y_extent = rotated.iter().map(|&(_, y)| y.abs()).fold(0.0_f64, f64::max);
    let inset = line_width;

    let mut path = Toolpath::new(layer_height, 1.0);
    let travel_speed = 80.0;
    let print_speed = 20.0;
    for layer in 0..layers {
        let z = (layer + 1) as f64 * layer_height;
        // Perimeter along the outline.
        let mut loop_pts: Vec<[f64; 3]> = centered.iter().map(|&(x, y)| [x, y, z]).collect();
        loop_pts.push(loop_pts[0]);
        path.travel_to(loop_pts[0], travel_speed, 0);
        path.extrude_polyline(&loop_pts, line_width, print_speed, 0);

        // Lines infill in the rotated frame.
        let j_max = (y_extent / line_width).floor() as i64;
        let mut chords: Vec<((f64, f64), (f64, f64))> = Vec::new();
        for j in -j_max..=j_max {
            let y0 = j as f64 * line_width;
            for span in scanline_spans(&rotated, y0) {
                for (x0, x1) in erode_span(&rotated, y0, span, inset, line_width / 8.0) {
                    chords.push(((x0, y0), (x1, y0)));
                }
            }
        }
        for (idx, &((x0, y0), (x1, _))) in chords.iter().enumerate() {
            let (xa, xb) = if idx % 2 == 0 { (x0, x1) } else { (x1, x0) };
            // Rotate back into part coordinates.
            let pa = [xa * cos_a - y0 * sin_a, xa * sin_a + y0 * cos_a, z];
            let pb = [xb * cos_a - y0 * sin_a, xb * sin_a + y0 * cos_a, z];
            path.travel_to(pa, travel_speed, 0);
            path.extrude_polyline(&[pa, pb], line_width, print_speed, 0);
        }
    }
    path.validate()?;
    Ok(path)
}
