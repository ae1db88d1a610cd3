//! Zero-level isoline extraction by marching squares and the singular-point
//! detector built on it.

use std::collections::HashMap;

use crate::field::{gradient, interpolate, interpolate_gradient, Point, ScalarField, VectorField};

/// A vertex of the extracted zero set with the interpolated gradient
/// magnitude there.
#[derive(Debug, Clone, Copy)]
pub struct FbVertex {
    pub point: Point,
    pub grad_norm: f64,
}

#[derive(Debug, Clone)]
pub struct Polyline {
    pub vertices: Vec<FbVertex>,
    pub closed: bool,
}

impl Polyline {
    pub fn length(&self) -> f64 {
        self.segment_pairs()
            .map(|(p, q)| ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt())
            .sum()
    }

    /// Consecutive vertex pairs, including the closing pair of a loop.
    pub fn segment_pairs(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        let count = if self.closed && n > 2 { n } else { n.saturating_sub(1) };
        (0..count).map(move |k| (self.vertices[k].point, self.vertices[(k + 1) % n].point))
    }

    /// Like `segment_pairs` but with the vertex data attached.
    pub fn segments(&self) -> impl Iterator<Item = (FbVertex, FbVertex)> + '_ {
        let n = self.vertices.len();
        let count = if self.closed && n > 2 { n } else { n.saturating_sub(1) };
        (0..count).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }
}

/// The extracted zero set `{u = 0}` as polylines with per-vertex `|∇u|`.
#[derive(Debug, Clone, Default)]
pub struct FreeBoundary {
    pub polylines: Vec<Polyline>,
}

impl FreeBoundary {
    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.polylines.iter().map(Polyline::length).sum()
    }

    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(|p| p.vertices.len()).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &FbVertex> {
        self.polylines.iter().flat_map(|p| p.vertices.iter())
    }

    /// Angles (about `center`) where the polylines cross the circle of
    /// radius `r`.
    pub fn circle_crossings(&self, center: Point, r: f64) -> Vec<f64> {
        let mut angles = Vec::new();
        for pl in &self.polylines {
            for (p, q) in pl.segment_pairs() {
                let d = [q[0] - p[0], q[1] - p[1]];
                let e = [p[0] - center[0], p[1] - center[1]];
                let a = d[0] * d[0] + d[1] * d[1];
                if a == 0.0 {
                    continue;
                }
                let b = 2.0 * (e[0] * d[0] + e[1] * d[1]);
                let c = e[0] * e[0] + e[1] * e[1] - r * r;
                let disc = b * b - 4.0 * a * c;
                if disc < 0.0 {
                    continue;
                }
                let sq = disc.sqrt();
                for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
                    if (0.0..1.0).contains(&t) {
                        let x = [e[0] + t * d[0], e[1] + t * d[1]];
                        angles.push(x[1].atan2(x[0]));
                    }
                }
            }
        }
        angles
    }
}

/// Marching-squares isoline of `{u = 0}` with linear edge interpolation,
/// saddle cells resolved by the cell-average sign, and one Newton correction
/// along the gradient per vertex so that `|u| ≤ 1e-8·‖u‖_∞` on the returned
/// vertices wherever the gradient allows it.
pub fn extract_free_boundary(u: &ScalarField) -> FreeBoundary {
    let spec = *u.spec();
    let grad = gradient(u);
    let inside = |v: f64| v > 0.0;

    // an edge key identifies the grid edge a vertex lies on, so chains can be
    // stitched exactly
    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    struct EdgeKey {
        i: usize,
        j: usize,
        vertical: bool,
    }

    struct Seg {
        ends: [EdgeKey; 2],
        points: [Point; 2],
    }

    let cross = |pa: Point, va: f64, pb: Point, vb: f64| -> Point {
        let t = va / (va - vb);
        [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]
    };

    let mut segs: Vec<Seg> = Vec::new();
    for j in 0..spec.ny - 1 {
        for i in 0..spec.nx - 1 {
            let pa = spec.node(i, j);
            let pb = spec.node(i + 1, j);
            let pc = spec.node(i + 1, j + 1);
            let pd = spec.node(i, j + 1);
            let va = u.at(i, j);
            let vb = u.at(i + 1, j);
            let vc = u.at(i + 1, j + 1);
            let vd = u.at(i, j + 1);
            let code = (inside(va) as usize)
                | (inside(vb) as usize) << 1
                | (inside(vc) as usize) << 2
                | (inside(vd) as usize) << 3;
            if code == 0 || code == 15 {
                continue;
            }
            let bottom = (EdgeKey { i, j, vertical: false }, cross(pa, va, pb, vb));
            let right = (EdgeKey { i: i + 1, j, vertical: true }, cross(pb, vb, pc, vc));
            let top = (EdgeKey { i, j: j + 1, vertical: false }, cross(pd, vd, pc, vc));
            let left = (EdgeKey { i, j, vertical: true }, cross(pa, va, pd, vd));
            let mut push = |a: &(EdgeKey, Point), b: &(EdgeKey, Point)| {
                segs.push(Seg {
                    ends: [a.0, b.0],
                    points: [a.1, b.1],
                });
            };
            match code {
                1 | 14 => push(&left, &bottom),
                2 | 13 => push(&bottom, &right),
                3 | 12 => push(&left, &right),
                4 | 11 => push(&right, &top),
                6 | 9 => push(&bottom, &top),
                7 | 8 => push(&left, &top),
                5 | 10 => {
                    // saddle: connect by the sign of the cell average
                    let avg_inside = inside(0.25 * (va + vb + vc + vd));
                    let pairs_as_one = (code == 5) == avg_inside;
                    if pairs_as_one {
                        push(&left, &top);
                        push(&bottom, &right);
                    } else {
                        push(&left, &bottom);
                        push(&right, &top);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    // stitch segments into chains via shared edge keys
    let mut by_edge: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (k, s) in segs.iter().enumerate() {
        by_edge.entry(s.ends[0]).or_default().push(k);
        by_edge.entry(s.ends[1]).or_default().push(k);
    }
    let mut used = vec![false; segs.len()];
    let mut raw_lines: Vec<(Vec<Point>, bool)> = Vec::new();
    for start in 0..segs.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut chain = vec![
            (segs[start].ends[0], segs[start].points[0]),
            (segs[start].ends[1], segs[start].points[1]),
        ];
        let mut closed = false;
        // extend forward then backward
        for dir in 0..2 {
            loop {
                let (tip_key, _) = *chain.last().unwrap();
                let next = by_edge
                    .get(&tip_key)
                    .and_then(|ids| ids.iter().find(|id| !used[**id]))
                    .copied();
                match next {
                    Some(id) => {
                        used[id] = true;
                        let s = &segs[id];
                        let (k, p) = if s.ends[0] == tip_key {
                            (s.ends[1], s.points[1])
                        } else {
                            (s.ends[0], s.points[0])
                        };
                        if k == chain[0].0 {
                            closed = true;
                            break;
                        }
                        chain.push((k, p));
                    }
                    None => break,
                }
            }
            if closed {
                break;
            }
            if dir == 0 {
                chain.reverse();
            }
        }
        raw_lines.push((chain.into_iter().map(|(_, p)| p).collect(), closed));
    }

    let norm = u.norm_inf();
    let target = 1e-8 * norm;
    let polylines = raw_lines
        .into_iter()
        .map(|(points, closed)| Polyline {
            vertices: points
                .into_iter()
                .map(|p| newton_correct(u, &grad, p, target, spec.h))
                .collect(),
            closed,
        })
        .collect();
    FreeBoundary { polylines }
}

/// Newton steps along the interpolated gradient until the interpolated value
/// drops below `target`. Steps are capped at half a cell; a vanishing
/// gradient (a singular point) leaves the vertex where the marching step
/// put it.
fn newton_correct(
    u: &ScalarField,
    grad: &VectorField,
    mut p: Point,
    target: f64,
    h: f64,
) -> FbVertex {
    let mut g = interpolate_gradient(grad, p).unwrap_or([0.0, 0.0]);
    for _ in 0..8 {
        let v = match interpolate(u, p) {
            Ok(v) => v,
            Err(_) => break,
        };
        if v.abs() <= target {
            break;
        }
        g = interpolate_gradient(grad, p).unwrap_or([0.0, 0.0]);
        let g2 = g[0] * g[0] + g[1] * g[1];
        if g2 < 1e-30 {
            break;
        }
        let mut step = [-v * g[0] / g2, -v * g[1] / g2];
        let len = (step[0] * step[0] + step[1] * step[1]).sqrt();
        let cap = 0.5 * h;
        if len > cap {
            step[0] *= cap / len;
            step[1] *= cap / len;
        }
        let q = [p[0] + step[0], p[1] + step[1]];
        if interpolate(u, q).is_err() {
            break;
        }
        p = q;
    }
    let gn = (g[0] * g[0] + g[1] * g[1]).sqrt();
    FbVertex {
        point: p,
        grad_norm: gn,
    }
}

/// Cluster centroids of free-boundary vertices where `|∇u| ≤ tau`: the
/// candidate singular points `{u = 0} ∩ {∇u = 0}`.
pub fn singular_points(u: &ScalarField, fb: &FreeBoundary, tau: f64) -> Vec<Point> {
    let h = u.spec().h;
    let flagged: Vec<Point> = fb
        .vertices()
        .filter(|v| v.grad_norm <= tau)
        .map(|v| v.point)
        .collect();
    cluster_centroids(&flagged, 3.0 * h)
}

/// Default gradient threshold: `10·h` times a sup estimate of the Hessian,
/// since `|∇u|` grows like distance times Hessian near a non-degenerate zero
/// of the gradient.
pub fn default_singular_threshold(u: &ScalarField) -> f64 {
    let spec = u.spec();
    let inv_h2 = 1.0 / (spec.h * spec.h);
    let mut sup = 0.0f64;
    for (i, j) in spec.interior_indices() {
        let uxx = (u.at(i + 1, j) + u.at(i - 1, j) - 2.0 * u.at(i, j)).abs() * inv_h2;
        let uyy = (u.at(i, j + 1) + u.at(i, j - 1) - 2.0 * u.at(i, j)).abs() * inv_h2;
        let uxy = (u.at(i + 1, j + 1) + u.at(i - 1, j - 1)
            - u.at(i + 1, j - 1)
            - u.at(i - 1, j + 1))
        .abs()
            * 0.25
            * inv_h2;
        sup = sup.max(uxx.max(uyy).max(uxy));
    }
    10.0 * spec.h * sup
}

fn cluster_centroids(points: &[Point], radius: f64) -> Vec<Point> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut k: usize) -> usize {
        while parent[k] != k {
            parent[k] = parent[parent[k]];
            k = parent[k];
        }
        k
    }
    for a in 0..n {
        for b in a + 1..n {
            let dx = points[a][0] - points[b][0];
            let dy = points[a][1] - points[b][1];
            if dx * dx + dy * dy <= radius * radius {
                let ra = find(&mut parent, a);
                let rb = find(&mut parent, b);
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut sums: HashMap<usize, (f64, f64, usize)> = HashMap::new();
    for k in 0..n {
        let root = find(&mut parent, k);
        let e = sums.entry(root).or_insert((0.0, 0.0, 0));
        e.0 += points[k][0];
        e.1 += points[k][1];
        e.2 += 1;
    }
    let mut out: Vec<Point> = sums
        .values()
        .map(|(sx, sy, c)| [sx / *c as f64, sy / *c as f64])
        .collect();
    out.sort_by(|a, b| (a[0], a[1]).partial_cmp(&(b[0], b[1])).unwrap());
    out
}

/// Tangent direction (radians, mod π) of each free-boundary arc crossing the
/// annulus `r_in ≤ |x - center| ≤ r_out`, by a total-least-squares line fit
/// over each maximal vertex run inside the annulus.
pub fn arc_tangent_angles(fb: &FreeBoundary, center: Point, r_in: f64, r_out: f64) -> Vec<f64> {
    let mut angles = Vec::new();
    for pl in &fb.polylines {
        let mut run: Vec<Point> = Vec::new();
        let flush = |run: &mut Vec<Point>, angles: &mut Vec<f64>| {
            if run.len() >= 3 {
                angles.push(tls_direction(run));
            }
            run.clear();
        };
        for v in &pl.vertices {
            let d = ((v.point[0] - center[0]).powi(2) + (v.point[1] - center[1]).powi(2)).sqrt();
            if d >= r_in && d <= r_out {
                run.push(v.point);
            } else {
                flush(&mut run, &mut angles);
            }
        }
        flush(&mut run, &mut angles);
    }
    angles
}

fn tls_direction(points: &[Point]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let dx = p[0] - mx;
        let dy = p[1] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    angle.rem_euclid(std::f64::consts::PI)
}
