//! Convex hulls, support functions and Hausdorff distances for the small
//! polytopes that rotation sets turn into.

use serde::Serialize;

use crate::error::{Error, Result};

/// Collinearity / duplicate tolerance for planar hulls.
pub const HULL_TOL: f64 = 1e-12;

/// Extreme points of a finite point set, with the affine dimension they span.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hull {
    pub m: usize,
    /// Counterclockwise for planar hulls of dimension 2; ascending for m = 1.
    pub vertices: Vec<Vec<f64>>,
    /// Affine dimension of the hull (0 = point, 1 = segment, …).
    pub dim: usize,
}

impl Hull {
    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                best = best.max(dist(a, b));
            }
        }
        best
    }

    /// Euclidean distance from `p` to the hull (0 inside).
    pub fn distance(&self, p: &[f64]) -> f64 {
        distance_to_hull(self, p)
    }

    /// Signed distance to the boundary: positive inside a full-dimensional
    /// hull, negative outside. Lower-dimensional hulls have no interior.
    pub fn interior_margin(&self, p: &[f64]) -> f64 {
        let out = self.distance(p);
        if out > 0.0 || self.dim < self.m {
            return -out;
        }
        match self.m {
            1 => (p[0] - self.vertices[0][0]).min(self.vertices[1][0] - p[0]),
            2 => {
                let n = self.vertices.len();
                (0..n)
                    .map(|i| {
                        let a = &self.vertices[i];
                        let b = &self.vertices[(i + 1) % n];
                        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
                        let len = (ex * ex + ey * ey).sqrt();
                        (ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / len
                    })
                    .fold(f64::INFINITY, f64::min)
            }
            _ => {
                // Conservative probe along the coordinate axes.
                let mut lo: f64 = 0.0;
                let mut hi: f64 = self.diameter().max(1e-300);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    let inside = (0..self.m).all(|i| {
                        [-mid, mid].iter().all(|&s| {
                            let mut q = p.to_vec();
                            q[i] += s;
                            lp_in_hull(&self.vertices, &q)
                        })
                    });
                    if inside {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    }

    pub fn area(&self) -> f64 {
        if self.m != 2 || self.vertices.len() < 3 {
            return 0.0;
        }
        polygon_area(&self.vertices)
    }

    pub fn translated(&self, c: &[f64]) -> Hull {
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(c).map(|(a, b)| a + b).collect())
            .collect();
        Hull {
            m: self.m,
            vertices,
            dim: self.dim,
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn polygon_area(v: &[Vec<f64>]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let a = &v[i];
            let b = &v[(i + 1) % n];
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
}

fn scale_of(points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .flatten()
        .fold(1.0f64, |acc, x| acc.max(x.abs()))
}

/// Convex hull of a finite point set.
pub fn hull(points: &[Vec<f64>]) -> Result<Hull> {
    hull_with_tol(points, HULL_TOL)
}

pub fn hull_with_tol(points: &[Vec<f64>], tol: f64) -> Result<Hull> {
    let m = points
        .first()
        .map(|p| p.len())
        .ok_or_else(|| Error::BadSpec("hull of an empty point set".into()))?;
    if let Some(p) = points.iter().find(|p| p.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: p.len(),
        });
    }
    let tol = tol * scale_of(points);
    match m {
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            if hi - lo <= tol {
                Ok(Hull {
                    m,
                    vertices: vec![vec![lo]],
                    dim: 0,
                })
            } else {
                Ok(Hull {
                    m,
                    vertices: vec![vec![lo], vec![hi]],
                    dim: 1,
                })
            }
        }
        2 => Ok(planar_hull(points, tol)),
        _ => Ok(lp_hull(points, tol)),
    }
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; collinear and duplicate points are dropped.
fn planar_hull(points: &[Vec<f64>], tol: f64) -> Hull {
    let mut pts: Vec<Vec<f64>> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| dist(a, b) <= tol);
    if pts.len() == 1 {
        return Hull {
            m: 2,
            vertices: pts,
            dim: 0,
        };
    }
    let area_tol = tol * scale_of(&pts);
    let mut lower: Vec<Vec<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= area_tol {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= area_tol {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    let mut v = lower;
    v.dedup_by(|a, b| dist(a, b) <= tol);
    if v.len() > 1 && dist(&v[0], &v[v.len() - 1]) <= tol {
        v.pop();
    }
    let dim = match v.len() {
        0 | 1 => 0,
        2 => 1,
        _ => 2,
    };
    if v.is_empty() {
        v.push(pts[0].clone());
    }
    Hull {
        m: 2,
        vertices: v,
        dim,
    }
}

/// Extreme-point filter by linear programming, for m ≥ 3.
fn lp_hull(points: &[Vec<f64>], tol: f64) -> Hull {
    let m = points[0].len();
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if !pts.iter().any(|q| dist(p, q) <= tol) {
            pts.push(p.clone());
        }
    }
    let mut keep = Vec::new();
    for i in 0..pts.len() {
        let others: Vec<Vec<f64>> = pts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| q.clone())
            .collect();
        if others.is_empty() || !lp_in_hull(&others, &pts[i]) {
            keep.push(pts[i].clone());
        }
    }
    let dim = affine_dim(&keep, tol);
    Hull {
        m,
        vertices: keep,
        dim,
    }
}

fn affine_dim(pts: &[Vec<f64>], tol: f64) -> usize {
    if pts.len() <= 1 {
        return 0;
    }
    let m = pts[0].len();
    let mut rows: Vec<Vec<f64>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect())
        .collect();
    let mut rank = 0;
    for col in 0..m {
        let piv = (rank..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()));
        let Some(piv) = piv else { break };
        if rows[piv][col].abs() <= tol {
            continue;
        }
        rows.swap(rank, piv);
        for r in 0..rows.len() {
            if r != rank {
                let f = rows[r][col] / rows[rank][col];
                for c in 0..m {
                    rows[r][c] -= f * rows[rank][c];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Phase-one simplex: is `p` a convex combination of `pts`?
pub fn lp_in_hull(pts: &[Vec<f64>], p: &[f64]) -> bool {
    let m = p.len();
    let n = pts.len();
    let rows = m + 1;
    // Tableau columns: n lambdas, `rows` artificials, rhs.
    let cols = n + rows + 1;
    let mut t = vec![vec![0.0; cols]; rows + 1];
    for r in 0..rows {
        let (coef, rhs): (Vec<f64>, f64) = if r < m {
            (pts.iter().map(|q| q[r]).collect(), p[r])
        } else {
            (vec![1.0; n], 1.0)
        };
        let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[r][j] = sign * coef[j];
        }
        t[r][n + r] = 1.0;
        t[r][cols - 1] = sign * rhs;
    }
    // Objective row: minimize sum of artificials, written as reduced costs.
    for j in 0..cols {
        t[rows][j] = -(0..rows).map(|r| t[r][j]).sum::<f64>();
    }
    for r in 0..rows {
        t[rows][n + r] = 0.0;
    }
    let mut basis: Vec<usize> = (n..n + rows).collect();
    for _ in 0..10_000 {
        let Some(enter) = (0..cols - 1).find(|&j| t[rows][j] < -1e-12) else {
            break;
        };
        let mut leave = None;
        let mut best = f64::INFINITY;
        for r in 0..rows {
            if t[r][enter] > 1e-12 {
                let ratio = t[r][cols - 1] / t[r][enter];
                if ratio < best - 1e-15 || (ratio <= best + 1e-15 && leave.map_or(true, |l: usize| basis[r] < basis[l])) {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(lr) = leave else { break };
        let pv = t[lr][enter];
        for c in 0..cols {
            t[lr][c] /= pv;
        }
        for r in 0..=rows {
            if r != lr {
                let f = t[r][enter];
                if f != 0.0 {
                    for c in 0..cols {
                        t[r][c] -= f * t[lr][c];
                    }
                }
            }
        }
        basis[lr] = enter;
    }
    -t[rows][cols - 1] <= 1e-9
}

fn point_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let ap: Vec<f64> = p.iter().zip(a).map(|(x, y)| x - y).collect();
    let len2 = dot(&ab, &ab);
    if len2 == 0.0 {
        return dist(p, a);
    }
    let s = (dot(&ap, &ab) / len2).clamp(0.0, 1.0);
    let proj: Vec<f64> = a.iter().zip(&ab).map(|(x, y)| x + s * y).collect();
    dist(p, &proj)
}

fn distance_to_hull(h: &Hull, p: &[f64]) -> f64 {
    let v = &h.vertices;
    match (h.m, v.len()) {
        (_, 1) => dist(p, &v[0]),
        // Exact on the line; a segment projection leaves rounding residue.
        (1, _) => {
            let lo = v[0][0];
            let hi = v[v.len() - 1][0];
            (lo - p[0]).max(p[0] - hi).max(0.0)
        }
        (_, 2) if h.dim <= 1 => point_segment_distance(p, &v[0], &v[1]),
        (2, n) => {
            let inside = (0..n).all(|i| cross(&v[i], &v[(i + 1) % n], p) >= 0.0);
            if inside {
                0.0
            } else {
                (0..n)
                    .map(|i| point_segment_distance(p, &v[i], &v[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
        _ => frank_wolfe_distance(v, p),
    }
}

/// Distance to a hull in m ≥ 3 by Frank–Wolfe on the simplex of weights.
fn frank_wolfe_distance(v: &[Vec<f64>], p: &[f64]) -> f64 {
    if lp_in_hull(v, p) {
        return 0.0;
    }
    let mut x = v[0].clone();
    for _ in 0..20_000 {
        let g: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
        let s = v
            .iter()
            .min_by(|a, b| dot(a, &g).total_cmp(&dot(b, &g)))
            .expect("nonempty");
        let dir: Vec<f64> = s.iter().zip(&x).map(|(a, b)| a - b).collect();
        let dd = dot(&dir, &dir);
        if dd == 0.0 {
            break;
        }
        let step = (-dot(&g, &dir) / dd).clamp(0.0, 1.0);
        if step <= 1e-15 {
            break;
        }
        for (xi, di) in x.iter_mut().zip(&dir) {
            *xi += step * di;
        }
    }
    dist(&x, p)
}

/// Symmetric Hausdorff distance between two convex hulls.
pub fn hausdorff(p: &Hull, q: &Hull) -> Result<f64> {
    if p.m != q.m {
        return Err(Error::DimensionMismatch {
            expected: p.m,
            found: q.m,
        });
    }
    let a = p
        .vertices
        .iter()
        .map(|v| q.distance(v))
        .fold(0.0f64, f64::max);
    let b = q
        .vertices
        .iter()
        .map(|v| p.distance(v))
        .fold(0.0f64, f64::max);
    Ok(a.max(b))
}

/// Outer polygon `{x : u_i·x ≤ h_i}` from support values on directions
/// sorted by angle with consecutive gaps below π.
pub fn outer_polygon(dirs: &[Vec<f64>], values: &[f64]) -> Result<Hull> {
    let mut idx: Vec<usize> = (0..dirs.len()).collect();
    idx.sort_by(|&a, &b| dirs[a][1].atan2(dirs[a][0]).total_cmp(&dirs[b][1].atan2(dirs[b][0])));
    let n = idx.len();
    let mut pts = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (idx[i], idx[(i + 1) % n]);
        let (u, v) = (&dirs[a], &dirs[b]);
        let det = u[0] * v[1] - u[1] * v[0];
        if det.abs() < 1e-14 {
            continue;
        }
        let x = (values[a] * v[1] - values[b] * u[1]) / det;
        let y = (u[0] * values[b] - v[0] * values[a]) / det;
        pts.push(vec![x, y]);
    }
    if pts.is_empty() {
        return Err(Error::BadSpec("direction set does not bound a polygon".into()));
    }
    hull(&pts)
}

/// `count` unit vectors evenly spaced in angle.
pub fn circle_directions(count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
            vec![a.cos(), a.sin()]
        })
        .collect()
}

/// Deterministic near-uniform unit directions in `R^m`.
pub fn direction_grid(m: usize, count: usize) -> Vec<Vec<f64>> {
    match m {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => circle_directions(count),
        _ => {
            let mut out = Vec::new();
            for i in 0..m {
                for s in [1.0, -1.0] {
                    let mut v = vec![0.0; m];
                    v[i] = s;
                    out.push(v);
                }
            }
            // Fill with Halton-based points mapped to the sphere.
            let primes = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
            let mut j = 1u64;
            while out.len() < count.max(2 * m) {
                let mut v: Vec<f64> = (0..m)
                    .map(|c| {
                        let h = halton(j, primes[c % primes.len()]);
                        2.0 * h - 1.0
                    })
                    .collect();
                let n = dot(&v, &v).sqrt();
                j += 1;
                if n < 1e-3 || n > 1.0 {
                    continue;
                }
                v.iter_mut().for_each(|x| *x /= n);
                out.push(v);
            }
            out
        }
    }
}

fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Vec<f64>> {
        v.iter().map(|&(x, y)| vec![x, y]).collect()
    }

    #[test]
    fn hull_examples() {
        let h = hull(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.0)])).unwrap();
        assert_eq!(h.vertices, pts(&[(0.0, 0.0), (1.0, 0.0)]));
        assert_eq!(h.dim, 1);

        let h = hull(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.2, 0.2)])).unwrap();
        assert_eq!(h.vertices.len(), 3);
        assert!(!h.vertices.contains(&vec![0.2, 0.2]));
        assert!(h.area() > 0.0);

        let h = hull(&pts(&[
            (0.0, 0.0),
            (1.0, 0.0),
            (1.0, 1.0),
            (0.0, 1.0),
            (1.0, 1.0),
            (0.0, 0.0),
        ]))
        .unwrap();
        assert_eq!(h.vertices.len(), 4);
        assert!((h.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hull_in_three_dimensions() {
        let mut p = vec![];
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    p.push(vec![x, y, z]);
                }
            }
        }
        p.push(vec![0.5, 0.5, 0.5]);
        p.push(vec![0.5, 0.0, 0.0]);
        let h = hull(&p).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.dim, 3);
        assert!(h.interior_margin(&[0.5, 0.5, 0.5]) > 0.49);
        assert!((h.distance(&[2.0, 0.5, 0.5]) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn hausdorff_examples() {
        let sq = hull(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])).unwrap();
        assert_eq!(hausdorff(&sq, &sq).unwrap(), 0.0);
        let c = hull(&pts(&[(0.5, 0.5)])).unwrap();
        assert!((hausdorff(&sq, &c).unwrap() - 2f64.sqrt() / 2.0).abs() < 1e-15);
        let a = hull(&[vec![0.0], vec![1.0]]).unwrap();
        let b = hull(&[vec![0.0], vec![0.5]]).unwrap();
        assert_eq!(hausdorff(&a, &b).unwrap(), 0.5);
        assert!(hausdorff(&a, &sq).is_err());
    }

    #[test]
    fn outer_polygon_of_square() {
        let sq = hull(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])).unwrap();
        let dirs = circle_directions(4);
        let vals: Vec<f64> = dirs.iter().map(|u| sq.support(u)).collect();
        let outer = outer_polygon(&dirs, &vals).unwrap();
        assert!(hausdorff(&outer, &sq).unwrap() < 1e-12);
    }

    #[test]
    fn interior_margins() {
        let sq = hull(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])).unwrap();
        assert!((sq.interior_margin(&[0.25, 0.5]) - 0.25).abs() < 1e-15);
        assert!((sq.interior_margin(&[2.0, 0.5]) + 1.0).abs() < 1e-15);
        let seg = hull(&pts(&[(0.0, 0.0), (1.0, 0.0)])).unwrap();
        assert!(seg.interior_margin(&[0.5, 0.0]) <= 0.0);
        let line = hull(&[vec![-2.056636229834518], vec![0.0]]).unwrap();
        assert!((line.interior_margin(&[-0.9849689224843]) - 0.9849689224843).abs() < 1e-15);
    }

    fn polygon() -> impl Strategy<Value = Hull> {
        proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..8)
            .prop_map(|v| hull(&pts(&v)).unwrap())
    }

    proptest! {
        #[test]
        fn hausdorff_is_a_metric(a in polygon(), b in polygon(), c in polygon()) {
            let ab = hausdorff(&a, &b).unwrap();
            let ba = hausdorff(&b, &a).unwrap();
            let bc = hausdorff(&b, &c).unwrap();
            let ac = hausdorff(&a, &c).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!(ac <= ab + bc + 1e-9);
            prop_assert!(hausdorff(&a, &a).unwrap() < 1e-12);
        }

        #[test]
        fn hull_contains_its_points(v in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..20)) {
            let p = pts(&v);
            let h = hull(&p).unwrap();
            for q in &p {
                prop_assert!(h.distance(q) < 1e-9);
            }
            for u in circle_directions(16) {
                let direct = p.iter().map(|q| dot(q, &u)).fold(f64::NEG_INFINITY, f64::max);
                prop_assert!((h.support(&u) - direct).abs() < 1e-9);
            }
        }
    }
}
