//! Deterministic node constructions: Padua points, quasi-uniform interior
//! lattices, and equi-arclength boundary sampling with outward normals.
//!
//! Everything here is reproducible from its arguments alone; no randomness
//! is involved. Interior targets are met approximately (lattice
//! granularity), boundary counts exactly.

use crate::error::{Error, Result};
use crate::stacked::NodeSet;
use std::f64::consts::PI;
use std::ops::Range;

/// The Padua points of degree n on [−1,1]²: the parity-selected subset
/// (j + k even) of the Chebyshev–Lobatto grid cos(jπ/n) × cos(kπ/(n+1)).
/// Exactly (n+1)(n+2)/2 points, unisolvent for total degree n.
pub fn padua_nodes(n: usize) -> Result<NodeSet<f64>> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "Padua points need degree at least 1".into(),
        ));
    }
    let mut coords = Vec::with_capacity((n + 1) * (n + 2));
    for j in 0..=n {
        let x1 = (j as f64 * PI / n as f64).cos();
        for k in 0..=n + 1 {
            if (j + k) % 2 != 0 {
                continue;
            }
            let x2 = (k as f64 * PI / (n + 1) as f64).cos();
            coords.push(x1);
            coords.push(x2);
        }
    }
    NodeSet::new(2, coords)
}

/// Uniform k×k grid on [−1,1]².
pub fn unit_square_grid(k: usize) -> Result<NodeSet<f64>> {
    if k < 2 {
        return Err(Error::InvalidInput("grid needs at least 2 points per side".into()));
    }
    let mut coords = Vec::with_capacity(2 * k * k);
    for i in 0..k {
        let x = -1.0 + 2.0 * i as f64 / (k - 1) as f64;
        for j in 0..k {
            let y = -1.0 + 2.0 * j as f64 / (k - 1) as f64;
            coords.push(x);
            coords.push(y);
        }
    }
    NodeSet::new(2, coords)
}

/// Concentric-ring lattice strictly inside the unit disk, about `target`
/// points. Ring j of J sits at radius j/(J+0.5) and carries ≈ 2πj points;
/// alternate rings are staggered by half a step.
pub fn disk_interior_nodes(target: usize) -> Result<NodeSet<f64>> {
    if target == 0 {
        return Err(Error::InfeasibleTargets);
    }
    let count_for = |rings: usize| -> usize {
        1 + (1..=rings)
            .map(|j| (2.0 * PI * j as f64).round() as usize)
            .sum::<usize>()
    };
    let mut rings = 1usize;
    for j in 1..=400 {
        let better = (count_for(j) as i64 - target as i64).abs()
            < (count_for(rings) as i64 - target as i64).abs();
        if better {
            rings = j;
        }
    }
    let mut coords = vec![0.0, 0.0];
    for j in 1..=rings {
        let radius = j as f64 / (rings as f64 + 0.5);
        let n_j = (2.0 * PI * j as f64).round() as usize;
        let stagger = 0.5 * (j % 2) as f64;
        for i in 0..n_j {
            let theta = 2.0 * PI * (i as f64 + stagger) / n_j as f64;
            coords.push(radius * theta.cos());
            coords.push(radius * theta.sin());
        }
    }
    NodeSet::new(2, coords)
}

/// A planar domain with an implicitly described boundary.
#[derive(Clone, PartialEq, Debug)]
pub enum Domain {
    /// The closed unit disk.
    Disk,
    /// The ellipse x₁² + x₂²/4 ≤ 1 with the disk of radius 1/2 removed.
    EllipseMinusDisk,
    /// A simple polygon given by its vertices (either orientation).
    Polygon(Vec<[f64; 2]>),
}

impl Domain {
    pub fn name(&self) -> &'static str {
        match self {
            Domain::Disk => "disk",
            Domain::EllipseMinusDisk => "ellipse_minus_disk",
            Domain::Polygon(_) => "polygon",
        }
    }

    fn area(&self) -> f64 {
        match self {
            Domain::Disk => PI,
            Domain::EllipseMinusDisk => 2.0 * PI - 0.25 * PI,
            Domain::Polygon(v) => shoelace_area(v).abs(),
        }
    }

    fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            Domain::Disk => ([-1.0, -1.0], [1.0, 1.0]),
            Domain::EllipseMinusDisk => ([-1.0, -2.0], [1.0, 2.0]),
            Domain::Polygon(v) => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for p in v {
                    for a in 0..2 {
                        lo[a] = lo[a].min(p[a]);
                        hi[a] = hi[a].max(p[a]);
                    }
                }
                (lo, hi)
            }
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.inside_with_clearance(p, 0.0)
    }

    /// Inside, with at least `c` of clearance to the boundary (clearance
    /// measured through a level-set bound, so it may be conservative).
    fn inside_with_clearance(&self, p: [f64; 2], c: f64) -> bool {
        let [x, y] = p;
        match self {
            Domain::Disk => (x * x + y * y).sqrt() <= 1.0 - c,
            Domain::EllipseMinusDisk => {
                let level = (x * x + y * y / 4.0).sqrt();
                let radial = (x * x + y * y).sqrt();
                level <= 1.0 - c && radial >= 0.5 + c
            }
            Domain::Polygon(v) => {
                point_in_polygon(p, v) && distance_to_polygon(p, v) >= c
            }
        }
    }

    /// Boundary curves, outermost first.
    fn curves(&self) -> Vec<Curve> {
        match self {
            Domain::Disk => vec![Curve::Circle {
                radius: 1.0,
                outward: 1.0,
            }],
            Domain::EllipseMinusDisk => vec![
                Curve::Ellipse { a: 1.0, b: 2.0 },
                Curve::Circle {
                    radius: 0.5,
                    outward: -1.0,
                },
            ],
            Domain::Polygon(v) => vec![Curve::Polygon(v.clone())],
        }
    }
}

enum Curve {
    Circle { radius: f64, outward: f64 },
    Ellipse { a: f64, b: f64 },
    Polygon(Vec<[f64; 2]>),
}

impl Curve {
    fn length(&self) -> f64 {
        match self {
            Curve::Circle { radius, .. } => 2.0 * PI * radius,
            Curve::Ellipse { a, b } => ellipse_arclength_table(*a, *b).1,
            Curve::Polygon(v) => polygon_perimeter(v),
        }
    }

    /// `count` equi-arclength points with outward unit normals.
    fn sample(&self, count: usize) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
        match self {
            Curve::Circle { radius, outward } => {
                let mut pts = Vec::with_capacity(count);
                let mut nrm = Vec::with_capacity(count);
                for i in 0..count {
                    let theta = 2.0 * PI * i as f64 / count as f64;
                    let (s, c) = theta.sin_cos();
                    pts.push([radius * c, radius * s]);
                    nrm.push([outward * c, outward * s]);
                }
                (pts, nrm)
            }
            Curve::Ellipse { a, b } => {
                let (table, total) = ellipse_arclength_table(*a, *b);
                let n = table.len() - 1;
                let mut pts = Vec::with_capacity(count);
                let mut nrm = Vec::with_capacity(count);
                for i in 0..count {
                    let s_target = total * i as f64 / count as f64;
                    // cumulative table is monotone; invert by binary search
                    let idx = table.partition_point(|&s| s < s_target).min(n);
                    let (s0, s1) = (table[idx.saturating_sub(1)], table[idx]);
                    let t0 = 2.0 * PI * (idx.saturating_sub(1)) as f64 / n as f64;
                    let t1 = 2.0 * PI * idx as f64 / n as f64;
                    let frac = if s1 > s0 { (s_target - s0) / (s1 - s0) } else { 0.0 };
                    let t = t0 + frac * (t1 - t0);
                    let (st, ct) = t.sin_cos();
                    pts.push([a * ct, b * st]);
                    // outward normal of x²/a² + y²/b² = 1
                    let g = [2.0 * ct / a, 2.0 * st / b];
                    let len = (g[0] * g[0] + g[1] * g[1]).sqrt();
                    nrm.push([g[0] / len, g[1] / len]);
                }
                (pts, nrm)
            }
            Curve::Polygon(v) => sample_polygon(v, count),
        }
    }
}

/// Output of the node generators: interior nodes, boundary nodes grouped
/// by curve (outermost first), outward unit normals, and the index range
/// each curve occupies in the boundary set.
#[derive(Clone, Debug)]
pub struct GeneratedNodes {
    pub interior: NodeSet<f64>,
    pub boundary: NodeSet<f64>,
    pub normals: NodeSet<f64>,
    pub curve_ranges: Vec<Range<usize>>,
}

/// Quasi-uniform interior nodes plus equi-arclength boundary nodes. The
/// boundary target is split across curves proportionally to length and
/// met exactly; the interior count lands near its target.
pub fn domain_nodes(
    domain: &Domain,
    target_interior: usize,
    target_boundary: usize,
) -> Result<GeneratedNodes> {
    let curves = domain.curves();
    if target_boundary < curves.len() {
        return Err(Error::InfeasibleTargets);
    }
    let lengths: Vec<f64> = curves.iter().map(Curve::length).collect();
    let total: f64 = lengths.iter().sum();
    let mut counts = Vec::with_capacity(curves.len());
    let mut assigned = 0usize;
    for (i, len) in lengths.iter().enumerate() {
        let c = if i + 1 == lengths.len() {
            target_boundary - assigned
        } else {
            ((target_boundary as f64 * len / total).round() as usize).max(1)
        };
        if c == 0 {
            return Err(Error::InfeasibleTargets);
        }
        assigned += c;
        counts.push(c);
    }
    domain_nodes_with_boundary_counts(domain, target_interior, &counts)
}

/// Like [`domain_nodes`], but with an explicit point count per boundary
/// curve (outermost first).
pub fn domain_nodes_with_boundary_counts(
    domain: &Domain,
    target_interior: usize,
    boundary_counts: &[usize],
) -> Result<GeneratedNodes> {
    let curves = domain.curves();
    if boundary_counts.len() != curves.len() {
        return Err(Error::LengthMismatch {
            what: "boundary curve counts",
            expected: curves.len(),
            got: boundary_counts.len(),
        });
    }
    if boundary_counts.iter().any(|&c| c == 0) {
        return Err(Error::InfeasibleTargets);
    }

    let interior = match domain {
        Domain::Disk => disk_interior_nodes(target_interior)?,
        _ => hex_lattice_interior(domain, target_interior)?,
    };

    let mut pts = Vec::new();
    let mut nrms = Vec::new();
    let mut ranges = Vec::new();
    for (curve, &count) in curves.iter().zip(boundary_counts) {
        let (p, n) = curve.sample(count);
        let start = pts.len();
        pts.extend_from_slice(&p);
        nrms.extend_from_slice(&n);
        ranges.push(start..pts.len());
    }
    let boundary = NodeSet::new(2, pts.iter().flatten().copied().collect())?;
    let normals = NodeSet::new(2, nrms.iter().flatten().copied().collect())?;
    Ok(GeneratedNodes {
        interior,
        boundary,
        normals,
        curve_ranges: ranges,
    })
}

/// Triangular lattice clipped to the domain with a clearance of 0.35
/// spacings, spacing tuned toward the target count.
fn hex_lattice_interior(domain: &Domain, target: usize) -> Result<NodeSet<f64>> {
    if target == 0 {
        return Err(Error::InfeasibleTargets);
    }
    let area = domain.area();
    let mut h = (area / target as f64 * 2.0 / 3f64.sqrt()).sqrt();
    let mut best: Option<(usize, Vec<f64>)> = None;
    for _ in 0..40 {
        let pts = hex_points(domain, h);
        let count = pts.len() / 2;
        if count > 0 {
            let better = best
                .as_ref()
                .map_or(true, |(c, _)| {
                    (count as i64 - target as i64).abs() < (*c as i64 - target as i64).abs()
                });
            if better {
                best = Some((count, pts));
            }
        }
        if count == 0 {
            h *= 0.7;
            continue;
        }
        if count == target {
            break;
        }
        let ratio = ((count as f64 / target as f64).sqrt()).clamp(0.85, 1.18);
        if (ratio - 1.0).abs() < 1e-9 {
            break;
        }
        h *= ratio;
    }
    let (_, coords) = best.ok_or(Error::InfeasibleTargets)?;
    NodeSet::new(2, coords)
}

fn hex_points(domain: &Domain, h: f64) -> Vec<f64> {
    let (lo, hi) = domain.bbox();
    let cx = 0.5 * (lo[0] + hi[0]);
    let cy = 0.5 * (lo[1] + hi[1]);
    let row_step = h * 3f64.sqrt() / 2.0;
    let clearance = 0.35 * h;
    let n_rows = ((hi[1] - lo[1]) / row_step).ceil() as i64 + 1;
    let n_cols = ((hi[0] - lo[0]) / h).ceil() as i64 + 1;
    let mut out = Vec::new();
    for row in -n_rows..=n_rows {
        let y = cy + row as f64 * row_step;
        let offset = if row.rem_euclid(2) == 1 { 0.5 * h } else { 0.0 };
        for col in -n_cols..=n_cols {
            let x = cx + col as f64 * h + offset;
            if domain.inside_with_clearance([x, y], clearance) {
                out.push(x);
                out.push(y);
            }
        }
    }
    out
}

/// Cumulative arclength of (a·cos t, b·sin t) over a fine uniform grid in
/// t, plus the total length.
fn ellipse_arclength_table(a: f64, b: f64) -> (Vec<f64>, f64) {
    let n = 16384;
    let mut table = Vec::with_capacity(n + 1);
    table.push(0.0);
    let speed = |t: f64| {
        let (s, c) = t.sin_cos();
        ((a * s).powi(2) + (b * c).powi(2)).sqrt()
    };
    let dt = 2.0 * PI / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let t0 = i as f64 * dt;
        let t1 = t0 + dt;
        acc += 0.5 * dt * (speed(t0) + speed(t1));
        table.push(acc);
    }
    (table, acc)
}

fn shoelace_area(v: &[[f64; 2]]) -> f64 {
    let mut acc = 0.0;
    for i in 0..v.len() {
        let j = (i + 1) % v.len();
        acc += v[i][0] * v[j][1] - v[j][0] * v[i][1];
    }
    0.5 * acc
}

fn polygon_perimeter(v: &[[f64; 2]]) -> f64 {
    (0..v.len())
        .map(|i| {
            let j = (i + 1) % v.len();
            ((v[j][0] - v[i][0]).powi(2) + (v[j][1] - v[i][1]).powi(2)).sqrt()
        })
        .sum()
}

fn point_in_polygon(p: [f64; 2], v: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let mut j = v.len() - 1;
    for i in 0..v.len() {
        let (xi, yi) = (v[i][0], v[i][1]);
        let (xj, yj) = (v[j][0], v[j][1]);
        if (yi > p[1]) != (yj > p[1])
            && p[0] < (xj - xi) * (p[1] - yi) / (yj - yi) + xi
        {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn distance_to_polygon(p: [f64; 2], v: &[[f64; 2]]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..v.len() {
        let j = (i + 1) % v.len();
        best = best.min(point_segment_distance(p, v[i], v[j]));
    }
    best
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len_sq = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len_sq > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len_sq).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

/// Equi-arclength walk along the polygon edges. Outward normals assume the
/// vertex loop encloses the domain; orientation is normalized internally.
fn sample_polygon(v: &[[f64; 2]], count: usize) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let ccw = shoelace_area(v) > 0.0;
    let total = polygon_perimeter(v);
    let step = total / count as f64;
    let mut pts = Vec::with_capacity(count);
    let mut nrms = Vec::with_capacity(count);
    let mut edge = 0usize;
    let mut edge_start = 0.0;
    let mut edge_len = segment_length(v, 0);
    for i in 0..count {
        let s = i as f64 * step;
        while s > edge_start + edge_len && edge + 1 < v.len() {
            edge_start += edge_len;
            edge += 1;
            edge_len = segment_length(v, edge);
        }
        let a = v[edge];
        let b = v[(edge + 1) % v.len()];
        let frac = if edge_len > 0.0 { (s - edge_start) / edge_len } else { 0.0 };
        pts.push([
            a[0] + frac * (b[0] - a[0]),
            a[1] + frac * (b[1] - a[1]),
        ]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let mut n = [d[1] / len, -d[0] / len];
        if !ccw {
            n = [-n[0], -n[1]];
        }
        nrms.push(n);
    }
    (pts, nrms)
}

fn segment_length(v: &[[f64; 2]], i: usize) -> f64 {
    let j = (i + 1) % v.len();
    ((v[j][0] - v[i][0]).powi(2) + (v[j][1] - v[i][1]).powi(2)).sqrt()
}
