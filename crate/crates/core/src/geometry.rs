//! Planar regions with polygonal boundaries, structured triangulation,
//! piecewise-linear fields and polyline arc lengths.

use std::fmt::Write as _;
use std::sync::Arc;
use thiserror::Error;

pub type Point = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("meshing failed at h = {h}: covered area {covered} of {area} ({detail})")]
    Meshing { h: f64, area: f64, covered: f64, detail: String },
    #[error("clip polygon is not convex")]
    NotConvex,
    #[error("mesh text parse error: {0}")]
    Parse(String),
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Twice the signed area; positive for counter-clockwise vertex order.
pub fn signed_area2(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| cross(poly[i], poly[(i + 1) % n])).sum()
}

pub fn polygon_area(poly: &[Point]) -> f64 {
    0.5 * signed_area2(poly).abs()
}

fn point_in_polygon(poly: &[Point], p: Point) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Closest point to p on segment ab.
pub fn closest_on_segment(p: Point, a: Point, b: Point) -> Point {
    let ab = sub(b, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return a;
    }
    let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
    [a[0] + t * ab[0], a[1] + t * ab[1]]
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(sub(b, a), sub(c, a));
    let d2 = cross(sub(b, a), sub(d, a));
    let d3 = cross(sub(d, c), sub(a, c));
    let d4 = cross(sub(d, c), sub(b, c));
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != 0.0 && d2 != 0.0 && d3 != 0.0 && d4 != 0.0
}

/// True when no two non-adjacent edges properly intersect.
pub fn is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(a, b, poly[j], poly[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

pub fn is_convex(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let s = signed_area2(poly).signum();
    (0..n).all(|i| {
        let c = cross(sub(poly[(i + 1) % n], poly[i]), sub(poly[(i + 2) % n], poly[(i + 1) % n]));
        c * s >= -1e-12 * (1.0 + c.abs())
    })
}

/// Drop repeated vertices and vertices whose two edges are collinear to
/// within a relative tolerance `rel`.
pub fn simplify_polygon(poly: &[Point], rel: f64) -> Vec<Point> {
    let mut pts = poly.to_vec();
    loop {
        let n = pts.len();
        if n < 3 {
            return pts;
        }
        let drop = (0..n).find(|&i| {
            let (p, q, r) = (pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
            let (u, v) = (sub(q, p), sub(r, q));
            let (lu, lv) = (u[0].hypot(u[1]), v[0].hypot(v[1]));
            lu == 0.0 || lv == 0.0 || (cross(u, v).abs() <= rel * lu * lv && u[0] * v[0] + u[1] * v[1] > 0.0)
        });
        match drop {
            Some(i) => {
                pts.remove(i);
            }
            None => return pts,
        }
    }
}

/// Convex hull in counter-clockwise order (monotone chain).
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(sub(lower[lower.len() - 1], lower[lower.len() - 2]), sub(p, lower[lower.len() - 2])) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(sub(upper[upper.len() - 1], upper[upper.len() - 2]), sub(p, upper[upper.len() - 2])) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Sutherland–Hodgman clipping of `subject` by a convex polygon.
pub fn clip_convex(subject: &[Point], clip: &[Point]) -> Result<Vec<Point>, GeometryError> {
    if !is_convex(clip) {
        return Err(GeometryError::NotConvex);
    }
    let mut clip = clip.to_vec();
    if signed_area2(&clip) < 0.0 {
        clip.reverse();
    }
    let mut out = subject.to_vec();
    let m = clip.len();
    for k in 0..m {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[k], clip[(k + 1) % m]);
        let side = |p: Point| cross(sub(b, a), sub(p, a));
        let input = std::mem::take(&mut out);
        let n = input.len();
        for i in 0..n {
            let (p, q) = (input[i], input[(i + 1) % n]);
            let (sp, sq) = (side(p), side(q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let t = sp / (sp - sq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
    }
    out.dedup_by(|a, b| dist(*a, *b) < 1e-15);
    Ok(out)
}

/// A simple polygon with optional holes; a point is inside when it is inside
/// the boundary and outside every hole.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalRegion {
    pub boundary: Vec<Point>,
    pub holes: Vec<Vec<Point>>,
}

impl PolygonalRegion {
    pub fn new(boundary: Vec<Point>, holes: Vec<Vec<Point>>) -> Result<Self, GeometryError> {
        if boundary.len() < 3 || polygon_area(&boundary) <= 0.0 {
            return Err(GeometryError::Degenerate("boundary has no area".into()));
        }
        if !is_simple(&boundary) {
            return Err(GeometryError::Degenerate("boundary self-intersects".into()));
        }
        let mut boundary = boundary;
        if signed_area2(&boundary) < 0.0 {
            boundary.reverse();
        }
        let r = Self { boundary, holes };
        if !(r.area() > 0.0) {
            return Err(GeometryError::Degenerate("holes cover the region".into()));
        }
        Ok(r)
    }

    pub fn contains(&self, p: Point) -> bool {
        point_in_polygon(&self.boundary, p) && !self.holes.iter().any(|h| point_in_polygon(h, p))
    }

    /// Area of the boundary minus the parts of holes inside it.
    pub fn area(&self) -> f64 {
        let holes: f64 = self
            .holes
            .iter()
            .map(|h| clip_convex(h, &self.boundary).map(|c| polygon_area(&c)).unwrap_or_else(|_| polygon_area(h)))
            .sum();
        polygon_area(&self.boundary) - holes
    }

    pub fn perimeter(&self) -> f64 {
        std::iter::once(&self.boundary)
            .chain(self.holes.iter())
            .map(|p| (0..p.len()).map(|i| dist(p[i], p[(i + 1) % p.len()])).sum::<f64>())
            .sum()
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.boundary {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Distance to the nearest boundary or hole edge and the nearest point.
    pub fn nearest_boundary(&self, p: Point) -> (f64, Point) {
        std::iter::once(&self.boundary)
            .chain(self.holes.iter())
            .map(|poly| nearest_on_polygon(poly, p))
            .fold((f64::INFINITY, p), |best, c| if c.0 < best.0 { c } else { best })
    }
}

fn nearest_on_polygon(poly: &[Point], p: Point) -> (f64, Point) {
    let n = poly.len();
    let mut best = (f64::INFINITY, p);
    for i in 0..n {
        let q = closest_on_segment(p, poly[i], poly[(i + 1) % n]);
        let d = dist(p, q);
        if d < best.0 {
            best = (d, q);
        }
    }
    best
}

/// Translate every vertex by t(cos φ, sin φ).
pub fn shift_region(region: &PolygonalRegion, t: f64, phi: f64) -> PolygonalRegion {
    let (dx, dy) = (t * phi.cos(), t * phi.sin());
    let mv = |poly: &Vec<Point>| poly.iter().map(|p| [p[0] + dx, p[1] + dy]).collect::<Vec<_>>();
    PolygonalRegion { boundary: mv(&region.boundary), holes: region.holes.iter().map(mv).collect() }
}

/// Triangular mesh with a bucket index for point location.
#[derive(Debug, Clone)]
pub struct TriMesh {
    pub nodes: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub target_width: f64,
    /// Smallest edge divided by the target width.
    pub min_edge_constant: f64,
    buckets: Buckets,
}

#[derive(Debug, Clone)]
struct Buckets {
    origin: Point,
    size: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<usize>>,
}

impl Buckets {
    fn build(nodes: &[Point], triangles: &[[usize; 3]], size: f64) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in nodes {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if nodes.is_empty() {
            return Self { origin: [0.0, 0.0], size, nx: 0, ny: 0, cells: vec![] };
        }
        let nx = (((hi[0] - lo[0]) / size).floor() as usize + 1).max(1);
        let ny = (((hi[1] - lo[1]) / size).floor() as usize + 1).max(1);
        let mut cells = vec![Vec::new(); nx * ny];
        let b = Self { origin: lo, size, nx, ny, cells: vec![] };
        for (t, tri) in triangles.iter().enumerate() {
            let xs = tri.map(|i| nodes[i][0]);
            let ys = tri.map(|i| nodes[i][1]);
            let (i0, j0) = b.cell(&[xs.iter().cloned().fold(f64::INFINITY, f64::min), ys.iter().cloned().fold(f64::INFINITY, f64::min)]);
            let (i1, j1) = b.cell(&[xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max), ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max)]);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    cells[j * nx + i].push(t);
                }
            }
        }
        Self { cells, ..b }
    }

    fn cell(&self, p: &Point) -> (usize, usize) {
        let i = ((p[0] - self.origin[0]) / self.size).floor().clamp(0.0, (self.nx.max(1) - 1) as f64) as usize;
        let j = ((p[1] - self.origin[1]) / self.size).floor().clamp(0.0, (self.ny.max(1) - 1) as f64) as usize;
        (i, j)
    }
}

pub const SNAP_FRACTION: f64 = 0.25;

impl TriMesh {
    pub fn from_parts(nodes: Vec<Point>, triangles: Vec<[usize; 3]>, target_width: f64) -> Result<Self, GeometryError> {
        let mut min_edge = f64::INFINITY;
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= nodes.len()) {
                return Err(GeometryError::Degenerate(format!("triangle {t} refers to a missing node")));
            }
            let [a, b, c] = tri.map(|i| nodes[i]);
            let area2 = cross(sub(b, a), sub(c, a));
            if !(area2 > 2e-14) {
                return Err(GeometryError::Degenerate(format!("triangle {t} has signed area {}", 0.5 * area2)));
            }
            min_edge = min_edge.min(dist(a, b)).min(dist(b, c)).min(dist(c, a));
        }
        let buckets = Buckets::build(&nodes, &triangles, target_width);
        Ok(Self { nodes, triangles, target_width, min_edge_constant: min_edge / target_width, buckets })
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|i| self.nodes[i]);
        0.5 * cross(sub(b, a), sub(c, a))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn max_edge(&self) -> f64 {
        self.triangles
            .iter()
            .map(|tri| {
                let [a, b, c] = tri.map(|i| self.nodes[i]);
                dist(a, b).max(dist(b, c)).max(dist(c, a))
            })
            .fold(0.0, f64::max)
    }

    /// Containing triangle and barycentric coordinates.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        if self.buckets.cells.is_empty() {
            return None;
        }
        let (i, j) = self.buckets.cell(&p);
        let slack = 1e-12;
        for &t in &self.buckets.cells[j * self.buckets.nx + i] {
            let [a, b, c] = self.triangles[t].map(|k| self.nodes[k]);
            let det = cross(sub(b, a), sub(c, a));
            let l1 = cross(sub(p, a), sub(c, a)) / det;
            let l2 = cross(sub(b, a), sub(p, a)) / det;
            let l0 = 1.0 - l1 - l2;
            if l0 >= -slack && l1 >= -slack && l2 >= -slack {
                return Some((t, [l0, l1, l2]));
            }
        }
        None
    }

    /// Index of a node within 1e-9·h of p.
    pub fn node_at(&self, p: Point) -> Option<usize> {
        let (t, _) = self.locate(p)?;
        self.triangles[t].iter().copied().find(|&k| dist(self.nodes[k], p) <= 1e-9 * self.target_width)
    }

    /// Plain-text dump: node count, node lines, triangle count, index lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.nodes.len());
        for p in &self.nodes {
            let _ = writeln!(s, "{:.17e} {:.17e}", p[0], p[1]);
        }
        let _ = writeln!(s, "{}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        s
    }

    pub fn from_text(text: &str, target_width: f64) -> Result<Self, GeometryError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut next = |what: &str| lines.next().ok_or_else(|| GeometryError::Parse(format!("missing {what}")));
        let count = |s: &str| s.trim().parse::<usize>().map_err(|e| GeometryError::Parse(e.to_string()));
        let n = count(next("node count")?)?;
        let mut nodes = Vec::with_capacity(n);
        for _ in 0..n {
            let v: Vec<f64> = next("node")?.split_whitespace().map(|x| x.parse::<f64>()).collect::<Result<_, _>>().map_err(|e| GeometryError::Parse(e.to_string()))?;
            if v.len() != 2 {
                return Err(GeometryError::Parse("node line needs two coordinates".into()));
            }
            nodes.push([v[0], v[1]]);
        }
        let m = count(next("triangle count")?)?;
        let mut triangles = Vec::with_capacity(m);
        for _ in 0..m {
            let v: Vec<usize> = next("triangle")?.split_whitespace().map(|x| x.parse::<usize>()).collect::<Result<_, _>>().map_err(|e| GeometryError::Parse(e.to_string()))?;
            if v.len() != 3 {
                return Err(GeometryError::Parse("triangle line needs three indices".into()));
            }
            triangles.push([v[0], v[1], v[2]]);
        }
        Self::from_parts(nodes, triangles, target_width)
    }
}

/// Structured triangulation anchored at the bounding-box minimum.
pub fn triangulate(region: &PolygonalRegion, h: f64) -> Result<TriMesh, GeometryError> {
    triangulate_anchored(region, h, region.bbox().0)
}

/// Regular grid of pitch h through `anchor`, cells split along the same
/// diagonal, nodes within h/4 of the outer boundary snapped onto it, nodes
/// within h/4 of a hole dropped, triangles kept when their centroid lies in
/// the region, and remaining outside vertices projected onto the boundary. Meshes sharing an anchor with
/// pitches h and k·h have nested unsnapped node sets.
pub fn triangulate_anchored(region: &PolygonalRegion, h: f64, anchor: Point) -> Result<TriMesh, GeometryError> {
    if !(h > 0.0) {
        return Err(GeometryError::Degenerate(format!("mesh width {h} must be positive")));
    }
    let (lo, hi) = region.bbox();
    let i0 = ((lo[0] - anchor[0]) / h).floor() as i64 - 1;
    let i1 = ((hi[0] - anchor[0]) / h).ceil() as i64 + 1;
    let j0 = ((lo[1] - anchor[1]) / h).floor() as i64 - 1;
    let j1 = ((hi[1] - anchor[1]) / h).ceil() as i64 + 1;
    let (nx, ny) = ((i1 - i0 + 1) as usize, (j1 - j0 + 1) as usize);
    if nx.saturating_mul(ny) > 5_000_000 {
        return Err(GeometryError::Meshing { h, area: region.area(), covered: 0.0, detail: format!("{nx}×{ny} grid is too large") });
    }
    let grid: Vec<Point> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| {
            let p = [anchor[0] + (i0 + i as i64) as f64 * h, anchor[1] + (j0 + j as i64) as f64 * h];
            let (d, q) = nearest_on_polygon(&region.boundary, p);
            if d < SNAP_FRACTION * h {
                q
            } else {
                p
            }
        })
        .collect();
    // Nodes inside or within h/4 of a hole are voided rather than snapped, so
    // no node sits on a tiny inner boundary next to a full-size triangle.
    let void: Vec<bool> = grid
        .iter()
        .map(|&p| region.holes.iter().any(|hole| point_in_polygon(hole, p) || nearest_on_polygon(hole, p).0 < SNAP_FRACTION * h))
        .collect();
    let id = |i: usize, j: usize| j * nx + i;
    let mut used = vec![usize::MAX; grid.len()];
    let mut nodes = Vec::new();
    let mut triangles = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            for tri in [[a, b, c], [a, c, d]] {
                if tri.iter().any(|&k| void[k]) {
                    continue;
                }
                let [p, q, r] = tri.map(|k| grid[k]);
                if cross(sub(q, p), sub(r, p)) <= 2e-14 {
                    continue;
                }
                let centroid = [(p[0] + q[0] + r[0]) / 3.0, (p[1] + q[1] + r[1]) / 3.0];
                if !region.contains(centroid) {
                    continue;
                }
                let idx = tri.map(|k| {
                    if used[k] == usize::MAX {
                        used[k] = nodes.len();
                        nodes.push(grid[k]);
                    }
                    used[k]
                });
                triangles.push(idx);
            }
        }
    }
    // Vertices of kept triangles that fall outside are pulled onto the
    // boundary; triangles that fold over in the process are dropped.
    for p in nodes.iter_mut() {
        if !point_in_polygon(&region.boundary, *p) {
            *p = nearest_on_polygon(&region.boundary, *p).1;
        }
    }
    triangles.retain(|t| {
        let [p, q, r] = t.map(|k| nodes[k]);
        cross(sub(q, p), sub(r, p)) > 2e-14
    });
    let mut keep = vec![usize::MAX; nodes.len()];
    let mut kept = Vec::new();
    for t in triangles.iter_mut() {
        for k in t.iter_mut() {
            if keep[*k] == usize::MAX {
                keep[*k] = kept.len();
                kept.push(nodes[*k]);
            }
            *k = keep[*k];
        }
    }
    let nodes = kept;
    let area = region.area();
    let mesh = TriMesh::from_parts(nodes, triangles, h)?;
    let covered = mesh.total_area();
    if mesh.triangles.is_empty() || covered < 0.5 * area {
        return Err(GeometryError::Meshing { h, area, covered, detail: "region is thinner than the mesh width".into() });
    }
    Ok(mesh)
}

/// Node values on a mesh, interpolated linearly inside each triangle.
#[derive(Debug, Clone)]
pub struct PiecewiseLinearField {
    pub mesh: Arc<TriMesh>,
    pub values: Vec<f64>,
}

impl PiecewiseLinearField {
    pub fn new(mesh: Arc<TriMesh>, values: Vec<f64>) -> Result<Self, GeometryError> {
        if values.len() != mesh.nodes.len() {
            return Err(GeometryError::Degenerate(format!("{} values for {} nodes", values.len(), mesh.nodes.len())));
        }
        Ok(Self { mesh, values })
    }

    /// Interpolated value, or `None` outside the mesh.
    pub fn evaluate(&self, p: Point) -> Option<f64> {
        let (t, l) = self.mesh.locate(p)?;
        let tri = self.mesh.triangles[t];
        Some(l[0] * self.values[tri[0]] + l[1] * self.values[tri[1]] + l[2] * self.values[tri[2]])
    }

    pub fn triangle_gradient(&self, t: usize) -> Result<Point, GeometryError> {
        let tri = self.mesh.triangles[t];
        let [a, b, c] = tri.map(|i| self.mesh.nodes[i]);
        let det = cross(sub(b, a), sub(c, a));
        if !(det.abs() > 2e-14) {
            return Err(GeometryError::Degenerate(format!("triangle {t} is degenerate")));
        }
        let (fa, fb, fc) = (self.values[tri[0]], self.values[tri[1]], self.values[tri[2]]);
        let gx = ((fb - fa) * (c[1] - a[1]) - (fc - fa) * (b[1] - a[1])) / det;
        let gy = ((fc - fa) * (b[0] - a[0]) - (fb - fa) * (c[0] - a[0])) / det;
        Ok([gx, gy])
    }

    pub fn triangle_gradients(&self) -> Result<Vec<Point>, GeometryError> {
        (0..self.mesh.triangles.len()).map(|t| self.triangle_gradient(t)).collect()
    }

    /// Area-weighted mean of the gradients of the triangles around each node.
    pub fn nodal_gradients(&self) -> Result<Vec<Point>, GeometryError> {
        let grads = self.triangle_gradients()?;
        let mut acc = vec![[0.0, 0.0, 0.0]; self.mesh.nodes.len()];
        for (t, tri) in self.mesh.triangles.iter().enumerate() {
            let a = self.mesh.triangle_area(t);
            for &k in tri {
                acc[k][0] += a * grads[t][0];
                acc[k][1] += a * grads[t][1];
                acc[k][2] += a;
            }
        }
        Ok(acc.into_iter().map(|v| [v[0] / v[2], v[1] / v[2]]).collect())
    }

    /// Gradient at a point: the nodal average at mesh nodes, the triangle
    /// gradient elsewhere, `None` outside.
    pub fn gradient_at(&self, p: Point, nodal: &[Point]) -> Option<Point> {
        let (t, _) = self.mesh.locate(p)?;
        let tri = self.mesh.triangles[t];
        match tri.iter().copied().find(|&k| dist(self.mesh.nodes[k], p) <= 1e-9 * self.mesh.target_width) {
            Some(k) => Some(nodal[k]),
            None => self.triangle_gradient(t).ok(),
        }
    }
}

/// How a polyline's arc length is accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcLengthRule {
    /// Half the chord sum plus half the sum over points paired with the
    /// previous point's second coordinate.
    Trapezoid,
    /// Plain sum of segment lengths.
    Chord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point>,
}

impl Polyline {
    pub fn new(points: Vec<Point>) -> Self {
        Self { points }
    }

    /// Arc length of segment i (from point i to point i + 1).
    pub fn segment_length(&self, i: usize, rule: ArcLengthRule) -> f64 {
        let (p, q) = (self.points[i], self.points[i + 1]);
        let chord = dist(p, q);
        match rule {
            ArcLengthRule::Chord => chord,
            ArcLengthRule::Trapezoid => {
                let prev_y = if i == 0 { p[1] } else { self.points[i - 1][1] };
                0.5 * chord + 0.5 * (p[0] - q[0]).hypot(prev_y - p[1])
            }
        }
    }

    /// Length from the first point to point `upto`.
    pub fn arc_length(&self, upto: usize, rule: ArcLengthRule) -> f64 {
        if self.points.len() < 2 {
            return 0.0;
        }
        let upto = upto.min(self.points.len() - 1);
        (0..upto).map(|i| self.segment_length(i, rule)).sum()
    }

    pub fn total_length(&self, rule: ArcLengthRule) -> f64 {
        self.arc_length(self.points.len().saturating_sub(1), rule)
    }

    /// Cumulative lengths at every point.
    pub fn cumulative(&self, rule: ArcLengthRule) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.points.len());
        let mut s = 0.0;
        out.push(0.0);
        for i in 0..self.points.len().saturating_sub(1) {
            s += self.segment_length(i, rule);
            out.push(s);
        }
        out
    }

    /// Length from the first point to the place where the first coordinate
    /// reaches x, interpolating inside the crossing segment. The first
    /// coordinate must be monotone along the polyline.
    pub fn arc_length_to_x(&self, x: f64, rule: ArcLengthRule) -> f64 {
        let n = self.points.len();
        if n < 2 {
            return 0.0;
        }
        let increasing = self.points[n - 1][0] >= self.points[0][0];
        let before = |p: &Point| if increasing { p[0] <= x } else { p[0] >= x };
        if !before(&self.points[0]) {
            return 0.0;
        }
        let cum = self.cumulative(rule);
        for i in 0..n - 1 {
            if !before(&self.points[i + 1]) {
                let (a, b) = (self.points[i][0], self.points[i + 1][0]);
                let f = if b != a { ((x - a) / (b - a)).clamp(0.0, 1.0) } else { 0.0 };
                return cum[i] + f * (cum[i + 1] - cum[i]);
            }
        }
        cum[n - 1]
    }
}

/// The printed trapezoid combination up to point `upto`.
pub fn trapezoid_arc_length(points: &Polyline, upto: usize) -> f64 {
    points.arc_length(upto, ArcLengthRule::Trapezoid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_square_with_interior_point() {
        let h = convex_hull(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.5], [1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(h.len(), 4);
        assert!((polygon_area(&h) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clip_overlapping_squares() {
        let a = vec![[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]];
        let b = vec![[1.0, 1.0], [3.0, 1.0], [3.0, 3.0], [1.0, 3.0]];
        let c = clip_convex(&a, &b).unwrap();
        assert!((polygon_area(&c) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bowtie_is_not_simple() {
        assert!(!is_simple(&[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]));
        assert!(is_simple(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]));
    }
}
