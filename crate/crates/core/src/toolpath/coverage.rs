//! Airtightness-oriented bead coverage check: rasterize the extrude
//! centerlines of one layer and report interior cells not reached by any
//! bead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{MoveKind, Toolpath};

/// Region a layer is expected to cover.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverageRegion {
    Circle { cx: f64, cy: f64, radius: f64 },
    Polygon { vertices: Vec<(f64, f64)> },
}

impl CoverageRegion {
    fn bbox(&self) -> (f64, f64, f64, f64) {
        match self {
            CoverageRegion::Circle { cx, cy, radius } => {
                (cx - radius, cy - radius, cx + radius, cy + radius)
            }
            CoverageRegion::Polygon { vertices } => {
                let mut bb = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
                for &(x, y) in vertices {
                    bb.0 = bb.0.min(x);
                    bb.1 = bb.1.min(y);
                    bb.2 = bb.2.max(x);
                    bb.3 = bb.3.max(y);
                }
                bb
            }
        }
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            CoverageRegion::Circle { cx, cy, radius } => {
                (x - cx).powi(2) + (y - cy).powi(2) < radius * radius
            }
            CoverageRegion::Polygon { vertices } => {
                let n = vertices.len();
                let mut inside = false;
                for i in 0..n {
                    let (x0, y0) = vertices[i];
                    let (x1, y1) = vertices[(i + 1) % n];
                    if (y0 <= y && y1 > y) || (y1 <= y && y0 > y) {
                        if x0 + (y - y0) / (y1 - y0) * (x1 - x0) > x {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }
}

/// One uncovered cell: centre coordinates and its distance beyond the
/// nearest bead edge.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageGap {
    pub x: f64,
    pub y: f64,
    pub gap_mm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageReport {
    pub layer_z: f64,
    pub cell_mm: f64,
    pub gaps: Vec<CoverageGap>,
    /// Largest distance from an uncovered cell to the nearest bead edge.
    pub max_gap_mm: f64,
    /// Estimated width of the widest bead-free opening (twice `max_gap_mm`).
    pub max_opening_mm: f64,
}

impl CoverageReport {
    pub fn airtight_candidate(&self) -> bool {
        self.gaps.is_empty()
    }
}

/// Raster slack absorbing the circle-to-polyline chordal error (beads are
/// represented by their polyline centerlines, which sit up to the chordal
/// tolerance inside the true arc).
const COVER_SLACK: f64 = 2.0 * super::DEFAULT_CHORDAL_TOL;

/// Check bead coverage of one layer over a region. Cells (side
/// `line_width/4`, with `line_width` the narrowest bead of the layer) whose
/// centre lies inside the region and farther than `max_gap` from every bead
/// are reported; an empty report marks a candidate-airtight layer.
pub fn verify_coverage(
    toolpath: &Toolpath,
    layer: usize,
    region: &CoverageRegion,
    max_gap: f64,
) -> Result<CoverageReport> {
    let zs = toolpath.layer_heights();
    let beads: Vec<&super::Move> = if zs.is_empty() && layer == 0 {
        // Empty toolpath over a non-empty region: everything is a gap.
        Vec::new()
    } else {
        let z = *zs.get(layer).ok_or_else(|| {
            Error::invalid(format!("layer {layer} does not exist ({} layers)", zs.len()))
        })?;
        toolpath
            .moves
            .iter()
            .filter(|m| m.kind == MoveKind::Extrude && (m.end[2] - z).abs() < 1e-9)
            .collect()
    };
    let layer_z = beads.first().map(|m| m.end[2]).unwrap_or(0.0);
    let line_width = beads
        .iter()
        .map(|m| m.width)
        .fold(f64::INFINITY, f64::min)
        .min(1.0);
    let cell = if line_width.is_finite() { line_width / 4.0 } else { 0.25 };

    let (x0, y0, x1, y1) = region.bbox();
    let nx = (((x1 - x0) / cell).ceil() as usize).max(1);
    let ny = (((y1 - y0) / cell).ceil() as usize).max(1);
    let mut covered = vec![false; nx * ny];

    // Mark cells near each bead instead of scanning all beads per cell.
    for m in &beads {
        let reach = m.width / 2.0 + COVER_SLACK + cell;
        let bx0 = m.start[0].min(m.end[0]) - reach;
        let bx1 = m.start[0].max(m.end[0]) + reach;
        let by0 = m.start[1].min(m.end[1]) - reach;
        let by1 = m.start[1].max(m.end[1]) + reach;
        let i0 = (((bx0 - x0) / cell).floor().max(0.0)) as usize;
        let i1 = ((((bx1 - x0) / cell).ceil()) as usize).min(nx);
        let j0 = (((by0 - y0) / cell).floor().max(0.0)) as usize;
        let j1 = ((((by1 - y0) / cell).ceil()) as usize).min(ny);
        for j in j0..j1 {
            for i in i0..i1 {
                if covered[j * nx + i] {
                    continue;
                }
                let px = x0 + (i as f64 + 0.5) * cell;
                let py = y0 + (j as f64 + 0.5) * cell;
                if seg_dist(px, py, m) <= m.width / 2.0 + COVER_SLACK {
                    covered[j * nx + i] = true;
                }
            }
        }
    }

    let mut gaps = Vec::new();
    let mut max_gap_mm = 0.0_f64;
    for j in 0..ny {
        for i in 0..nx {
            if covered[j * nx + i] {
                continue;
            }
            let px = x0 + (i as f64 + 0.5) * cell;
            let py = y0 + (j as f64 + 0.5) * cell;
            if !region.contains(px, py) {
                continue;
            }
            let edge_dist = beads
                .iter()
                .map(|m| seg_dist(px, py, m) - m.width / 2.0)
                .fold(f64::INFINITY, f64::min);
            let edge_dist = if edge_dist.is_finite() { edge_dist } else { f64::MAX };
            if edge_dist > max_gap + COVER_SLACK {
                max_gap_mm = max_gap_mm.max(if edge_dist == f64::MAX { cell } else { edge_dist });
                gaps.push(CoverageGap {
                    x: px,
                    y: py,
                    gap_mm: if edge_dist == f64::MAX { f64::INFINITY } else { edge_dist },
                });
            }
        }
    }

    Ok(CoverageReport {
        layer_z,
        cell_mm: cell,
        gaps,
        max_gap_mm,
        max_opening_mm: 2.0 * max_gap_mm,
    })
}

fn seg_dist(px: f64, py: f64, m: &super::Move) -> f64 {
    let (ax, ay) = (m.start[0], m.start[1]);
    let (bx, by) = (m.end[0], m.end[1]);
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (ax + t * dx, ay + t * dy);
    ((px - qx).powi(2) + (py - qy).powi(2)).sqrt()
}
