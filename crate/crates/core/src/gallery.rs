//! The gallery system: a full shift on an even number of symbols whose
//! potential takes values on the segments joining an interior point to the
//! vertices of a convex polygon, depending on the length of the leading run
//! inside one symbol pair. Truncated at depth `K` it becomes a table
//! potential, with an explicit sup-norm error.

use std::f64::consts::{LN_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hausdorff, hull};
use crate::perorbit::per_count;
use crate::potential::{EvaluatedValue, TablePotential};
use crate::rotgeom;
use crate::sft::Sft;
use crate::thermo::{RotationSolver, SolveOptions};

fn default_alpha() -> usize {
    3
}

fn default_depth() -> usize {
    7
}

fn default_rho() -> f64 {
    0.25
}

/// Parameters of the gallery system. Missing vertices default to a regular
/// `d/2`-gon of circumradius 1 around `w0` (origin by default), first vertex
/// straight up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example2Spec {
    pub d: usize,
    #[serde(default = "default_alpha")]
    pub alpha: usize,
    #[serde(rename = "K", default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w0: Option<[f64; 2]>,
}

impl Example2Spec {
    pub fn new(d: usize) -> Self {
        Example2Spec {
            d,
            alpha: default_alpha(),
            depth: default_depth(),
            rho: default_rho(),
            vertices: None,
            w0: None,
        }
    }

    pub fn w0(&self) -> [f64; 2] {
        self.w0.unwrap_or([0.0, 0.0])
    }

    pub fn vertices(&self) -> Vec<[f64; 2]> {
        match &self.vertices {
            Some(v) => v.clone(),
            None => regular_polygon(self.d / 2, self.w0()),
        }
    }

    /// Fills in defaults and checks every invariant.
    pub fn resolved(&self) -> Result<Example2Spec> {
        let bad = |s: String| Err(Error::BadSpec(s));
        if self.d < 6 || self.d % 2 != 0 {
            return bad(format!("d must be even and at least 6, got {}", self.d));
        }
        if self.alpha < 3 {
            return bad(format!("alpha must be at least 3, got {}", self.alpha));
        }
        if self.depth <= self.alpha {
            return bad(format!("K = {} must exceed alpha = {}", self.depth, self.alpha));
        }
        if !(self.rho > 0.0 && self.rho <= 0.5) {
            return bad(format!("rho must lie in (0, 1/2], got {}", self.rho));
        }
        let v = self.vertices();
        if v.len() != self.d / 2 {
            return bad(format!("expected {} vertices, got {}", self.d / 2, v.len()));
        }
        let n = v.len();
        for i in 0..n {
            let (a, b, c) = (v[i], v[(i + 1) % n], v[(i + 2) % n]);
            if cross(sub(b, a), sub(c, b)) <= 0.0 {
                return bad(format!(
                    "vertices must form a strictly convex counterclockwise polygon (fails at vertex {})",
                    (i + 1) % n + 1
                ));
            }
        }
        let mut turning = 0.0;
        for i in 0..n {
            let (a, b, c) = (v[i], v[(i + 1) % n], v[(i + 2) % n]);
            let (e1, e2) = (sub(b, a), sub(c, b));
            turning += cross(e1, e2).atan2(e1[0] * e2[0] + e1[1] * e2[1]);
        }
        if (turning - 2.0 * PI).abs() > 1e-6 {
            return bad("vertices wind more than once".into());
        }
        let w0 = self.w0();
        for i in 0..n {
            if cross(sub(v[(i + 1) % n], v[i]), sub(w0, v[i])) <= 0.0 {
                return bad("w0 must lie strictly inside the polygon".into());
            }
        }
        Ok(Example2Spec {
            vertices: Some(v),
            w0: Some(w0),
            ..self.clone()
        })
    }

    /// `w_i(k) = w_i + ρ^k (w0 − w_i)`, with `i` 1-based.
    pub fn segment_point(&self, i: usize, k: usize) -> [f64; 2] {
        let wi = self.vertices()[i - 1];
        let w0 = self.w0();
        let s = self.rho.powi(k as i32);
        [wi[0] + s * (w0[0] - wi[0]), wi[1] + s * (w0[1] - wi[1])]
    }

    /// Largest `|w0 − w_i|`.
    pub fn max_arm(&self) -> f64 {
        let w0 = self.w0();
        self.vertices()
            .iter()
            .map(|v| norm(sub(*v, w0)))
            .fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let v = self.vertices();
        let mut best: f64 = 0.0;
        for a in &v {
            for b in &v {
                best = best.max(norm(sub(*a, *b)));
            }
        }
        best
    }
}

fn regular_polygon(n: usize, c: [f64; 2]) -> Vec<[f64; 2]> {
    (0..n)
        .map(|i| {
            let a = PI / 2.0 + 2.0 * PI * i as f64 / n as f64;
            [c[0] + a.cos(), c[1] + a.sin()]
        })
        .collect()
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

/// Error of the depth-`K` table against the untruncated potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationBound {
    /// `ρ^{K−α} · max_i |w0 − w_i|`.
    pub sup_error: f64,
}

impl TruncationBound {
    /// Pressure is 1-Lipschitz in the sup norm, so `|ΔQ(T)| ≤ ‖T‖₁ · sup_error`.
    pub fn pressure_bound(&self, t: &[f64]) -> f64 {
        t.iter().map(|x| x.abs()).sum::<f64>() * self.sup_error
    }
}

/// Pair index and length of the leading run inside one pair `S_i`, counted
/// up to `cap` symbols.
fn leading_run(x: &[u8], cap: usize) -> (usize, usize) {
    let i = x[0] as usize / 2 + 1;
    let len = x
        .iter()
        .take(cap)
        .take_while(|&&s| s as usize / 2 + 1 == i)
        .count();
    (i, len)
}

fn truncated_value(spec: &Example2Spec, w: &[u8]) -> [f64; 2] {
    let (i, run) = leading_run(w, spec.depth);
    if run < spec.alpha {
        spec.w0()
    } else if run < spec.depth {
        spec.segment_point(i, run - spec.alpha)
    } else {
        spec.vertices()[i - 1]
    }
}

/// Full `d`-shift, depth-`K` table, and its truncation bound.
pub fn build_example2(spec: &Example2Spec) -> Result<(Sft, TablePotential, TruncationBound)> {
    let spec = spec.resolved()?;
    let sft = Sft::full(spec.d);
    let table = TablePotential::from_fn(&sft, spec.depth, 2, |w| truncated_value(&spec, w).to_vec())?;
    let bound = TruncationBound {
        sup_error: spec.rho.powi((spec.depth - spec.alpha) as i32) * spec.max_arm(),
    };
    Ok((sft, table, bound))
}

/// Truncated gallery potential with exact evaluation of the untruncated one
/// on long enough prefixes.
#[derive(Debug, Clone)]
pub struct GalleryPotential {
    spec: Example2Spec,
    table: TablePotential,
    bound: TruncationBound,
}

impl GalleryPotential {
    pub fn build(spec: Example2Spec) -> Result<Self> {
        let spec = spec.resolved()?;
        let (_, table, bound) = build_example2(&spec)?;
        Ok(GalleryPotential { spec, table, bound })
    }

    pub fn spec(&self) -> &Example2Spec {
        &self.spec
    }

    pub fn table(&self) -> &TablePotential {
        &self.table
    }

    pub fn bound(&self) -> TruncationBound {
        self.bound
    }

    pub fn sft(&self) -> Sft {
        Sft::full(self.spec.d)
    }

    /// Value of the untruncated potential. Exact once the leading run ends
    /// inside the prefix; otherwise `w_i` with error `ρ^{len−α}|w0 − w_i|`.
    pub fn evaluate(&self, prefix: &[u8]) -> Result<EvaluatedValue> {
        let s = &self.spec;
        if prefix.is_empty() {
            return Err(Error::InsufficientPrefix { needed: 1, got: 0 });
        }
        if let Some(&bad) = prefix.iter().find(|&&c| c as usize >= s.d) {
            return Err(Error::InadmissibleWord(format!("symbol {bad} out of range")));
        }
        let (i, run) = leading_run(prefix, usize::MAX);
        if run < prefix.len() {
            let value = if run < s.alpha {
                s.w0()
            } else {
                s.segment_point(i, run - s.alpha)
            };
            return Ok(EvaluatedValue {
                value: value.to_vec(),
                error_bound: 0.0,
            });
        }
        if run < s.alpha {
            return Err(Error::InsufficientPrefix {
                needed: s.alpha,
                got: prefix.len(),
            });
        }
        let wi = s.vertices()[i - 1];
        Ok(EvaluatedValue {
            value: wi.to_vec(),
            error_bound: s.rho.powi((run - s.alpha) as i32) * norm(sub(wi, s.w0())),
        })
    }
}

/// `d_{1/2}(x, y) = 2^{−n}` with `n` the first (1-based) index where they differ.
pub fn metric_half(x: &[u8], y: &[u8]) -> f64 {
    match x.iter().zip(y).position(|(a, b)| a != b) {
        Some(j) => 0.5f64.powi(j as i32 + 1),
        None => 0.0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzReport {
    pub pairs: usize,
    pub max_ratio: f64,
    pub worst_pair: Option<(Vec<u8>, Vec<u8>)>,
    /// `max(diam·2^α, 2)`.
    pub stated_bound: f64,
    /// `max(diam·2^α, 2^{α+1}·max|w0 − w_i|, 2)`. The middle term covers a
    /// run of exactly `α` (value `w_i(0) = w0`) against a longer run, which
    /// first differ at position `α+1`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Largest observed `‖Φ(x) − Φ(y)‖₂ / d_{1/2}(x, y)` over the pairs, using
/// the untruncated potential. Pairs that cannot be resolved are skipped.
pub fn check_lipschitz(g: &GalleryPotential, pairs: &[(Vec<u8>, Vec<u8>)]) -> LipschitzReport {
    let s = g.spec();
    let scored: Vec<(f64, usize)> = pairs
        .par_iter()
        .enumerate()
        .filter_map(|(idx, (x, y))| {
            let d = metric_half(x, y);
            if d == 0.0 {
                return None;
            }
            let a = g.evaluate(x).ok()?;
            let b = g.evaluate(y).ok()?;
            let diff = (a.value[0] - b.value[0]).hypot(a.value[1] - b.value[1]);
            Some((diff / d, idx))
        })
        .collect();
    let worst = scored.iter().copied().max_by(|a, b| a.0.total_cmp(&b.0));
    let c = s.diameter();
    let two_alpha = 2f64.powi(s.alpha as i32);
    let stated = (c * two_alpha).max(2.0);
    let bound = stated.max(2.0 * two_alpha * s.max_arm());
    let max_ratio = worst.map_or(0.0, |w| w.0);
    LipschitzReport {
        pairs: scored.len(),
        max_ratio,
        worst_pair: worst.map(|w| pairs[w.1].clone()),
        stated_bound: stated,
        bound,
        within_bound: max_ratio <= bound * (1.0 + 1e-12),
    }
}

/// Seeded pairs of prefixes of length `len`: random pairs agreeing up to a
/// random position, plus pairs built from runs inside one symbol pair.
pub fn sample_pairs(spec: &Example2Spec, len: usize, count: usize, seed: u64) -> Vec<(Vec<u8>, Vec<u8>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = spec.d as u8;
    let mut out = Vec::with_capacity(count);
    let random_word = |rng: &mut ChaCha8Rng, n: usize| -> Vec<u8> { (0..n).map(|_| rng.gen_range(0..d)).collect() };
    while out.len() < count {
        let mut x;
        if out.len() % 2 == 0 {
            x = random_word(&mut rng, len);
        } else {
            // Leading run in one pair, random length, then random symbols.
            let i = rng.gen_range(0..d / 2);
            let run = rng.gen_range(1..len);
            x = (0..run).map(|_| 2 * i + rng.gen_range(0..2)).collect();
            x.extend(random_word(&mut rng, len - run));
        }
        let j = rng.gen_range(0..len);
        let mut y = x.clone();
        let mut c = rng.gen_range(0..d);
        while c == x[j] {
            c = rng.gen_range(0..d);
        }
        y[j] = c;
        for s in y.iter_mut().skip(j + 1) {
            *s = rng.gen_range(0..d);
        }
        out.push((x, y));
    }
    out
}

/// One Newton solve on a ray from `w0` to a vertex.
#[derive(Debug, Clone, Serialize)]
pub struct RayPoint {
    pub vertex: usize,
    pub fraction: f64,
    pub w: Vec<f64>,
    pub h: Option<f64>,
    pub t_star: Option<Vec<f64>>,
    /// `‖T*‖₁ · sup_error`, the truncation slack on `H` at this point.
    pub truncation_slack: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RestrictedCount {
    pub pair: usize,
    pub n: usize,
    pub count: String,
    pub equals_power_of_two: bool,
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub fractions: Vec<f64>,
    pub max_period: usize,
    pub directions: usize,
    pub solve: SolveOptions,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            fractions: vec![0.2, 0.45, 0.7, 0.95],
            max_period: 20,
            directions: 64,
            solve: SolveOptions::default(),
        }
    }
}

/// Numerical consequences of the entropy claims on the truncated system.
#[derive(Debug, Clone, Serialize)]
pub struct EntropySuiteReport {
    pub spec: Example2Spec,
    pub sup_error: f64,
    /// Gradient of `Q` at 0: the rotation vector of the measure of maximal entropy.
    pub rv0: Vec<f64>,
    /// Uniform average of the table, computed directly.
    pub bernoulli_average: Vec<f64>,
    pub symmetric: bool,
    pub rv0_error: f64,
    pub h_w0: Option<f64>,
    pub log_d: f64,
    pub rays: Vec<RayPoint>,
    /// Every solved ray value lies in `(log 2 − tol, log d]`.
    pub interior_in_range: bool,
    pub rays_decreasing: bool,
    pub range_tolerance: f64,
    pub restricted_counts: Vec<RestrictedCount>,
    pub polytope_vertices: Vec<Vec<f64>>,
    pub polytope_method: String,
    pub polytope_gap: f64,
    pub hausdorff_to_k: f64,
    pub diameter: f64,
}

/// Runs the pressure and orbit-count machinery against the truncated system.
pub fn example2_entropy_suite(spec: &Example2Spec, opts: &SuiteOptions) -> Result<EntropySuiteReport> {
    let g = GalleryPotential::build(spec.clone())?;
    let s = g.spec().clone();
    let sft = g.sft();
    let engine = crate::thermo::PressureEngine::new(&sft, g.table())?;
    let polytope = rotgeom::polytope_from_support(engine.skeleton_potential(), opts.directions)?;
    let solver = RotationSolver::with_polytope(engine, polytope);

    let (_, rv0) = solver.engine.gradient(&[0.0, 0.0])?;
    let bernoulli_average = uniform_average(g.table());
    let w0 = s.w0();
    let verts = s.vertices();
    let centroid_offset = verts.iter().fold([0.0, 0.0], |acc, v| {
        [acc[0] + v[0] - w0[0], acc[1] + v[1] - w0[1]]
    });
    let symmetric = norm(centroid_offset) <= 1e-12 * s.diameter();
    let expected = if symmetric { w0.to_vec() } else { bernoulli_average.clone() };
    let rv0_error = (rv0[0] - expected[0]).hypot(rv0[1] - expected[1]);
    let h_w0 = solver.solve(&expected, &opts.solve).ok().map(|sol| sol.h);

    // Each ray is walked outward, warm-starting from the previous solution.
    let rays: Vec<RayPoint> = (1..=verts.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let v = verts[i - 1];
            let mut t0: Option<Vec<f64>> = None;
            opts.fractions
                .iter()
                .map(|&f| {
                    let w = vec![w0[0] + f * (v[0] - w0[0]), w0[1] + f * (v[1] - w0[1])];
                    let mut so = opts.solve.clone();
                    if t0.is_some() {
                        so.t0 = t0.clone();
                    }
                    match solver.solve(&w, &so) {
                        Ok(sol) => {
                            t0 = Some(sol.t_star.clone());
                            RayPoint {
                                vertex: i,
                                fraction: f,
                                w,
                                h: Some(sol.h),
                                truncation_slack: Some(g.bound().pressure_bound(&sol.t_star)),
                                t_star: Some(sol.t_star),
                                error: None,
                            }
                        }
                        Err(e) => RayPoint {
                            vertex: i,
                            fraction: f,
                            w,
                            h: None,
                            t_star: None,
                            truncation_slack: None,
                            error: Some(format!("{}: {e}", e.kind())),
                        },
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let log_d = (s.d as f64).ln();
    let range_tolerance = 0.02;
    let interior_in_range = rays.iter().all(|p| {
        p.h.map_or(false, |h| h > LN_2 - range_tolerance && h <= log_d + 1e-9)
    });
    let rays_decreasing = (1..=verts.len()).all(|i| {
        let hs: Vec<f64> = rays.iter().filter(|p| p.vertex == i).filter_map(|p| p.h).collect();
        hs.windows(2).all(|w| w[1] <= w[0] + 1e-9)
    });

    let mut restricted_counts = Vec::new();
    for i in 1..=verts.len() {
        let sub = sft.restrict(&[2 * i - 2, 2 * i - 1])?;
        for n in 1..=opts.max_period {
            let c = per_count(&sub, n)?;
            restricted_counts.push(RestrictedCount {
                pair: i,
                n,
                equals_power_of_two: c == num_bigint::BigUint::from(1u8) << n,
                count: c.to_string(),
            });
        }
    }

    let k_hull = hull(&verts.iter().map(|v| v.to_vec()).collect::<Vec<_>>())?;
    let hausdorff_to_k = hausdorff(&solver.polytope.hull(), &k_hull)?;
    Ok(EntropySuiteReport {
        sup_error: g.bound().sup_error,
        rv0,
        bernoulli_average,
        symmetric,
        rv0_error,
        h_w0,
        log_d,
        rays,
        interior_in_range,
        rays_decreasing,
        range_tolerance,
        restricted_counts,
        polytope_vertices: solver.polytope.vertices.clone(),
        polytope_method: format!("{:?}", solver.polytope.method),
        polytope_gap: solver.polytope.gap,
        hausdorff_to_k,
        diameter: s.diameter(),
        spec: s,
    })
}

/// Average of a full-shift table over all its words, i.e. the integral
/// against the uniform Bernoulli measure.
pub fn uniform_average(t: &TablePotential) -> Vec<f64> {
    let mut acc = vec![0.0; t.dim()];
    let mut n = 0usize;
    for (_, v) in t.entries() {
        for (a, b) in acc.iter_mut().zip(v) {
            *a += b;
        }
        n += 1;
    }
    acc.into_iter().map(|a| a / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: [f64; 2], tol: f64) -> bool {
        (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol
    }

    #[test]
    fn spec_validation() {
        assert!(Example2Spec::new(6).resolved().is_ok());
        assert!(Example2Spec::new(8).resolved().is_ok());
        for d in [4, 7] {
            assert!(matches!(Example2Spec::new(d).resolved(), Err(Error::BadSpec(_))));
        }
        let mut s = Example2Spec::new(6);
        s.alpha = 2;
        assert!(s.resolved().is_err());
        let mut s = Example2Spec::new(6);
        s.depth = 3;
        assert!(s.resolved().is_err());
        let mut s = Example2Spec::new(6);
        s.rho = 0.6;
        assert!(s.resolved().is_err());
        let mut s = Example2Spec::new(6);
        s.vertices = Some(vec![[0.0, 1.0], [1.0, -1.0], [-1.0, -1.0]]);
        assert!(s.resolved().is_err(), "clockwise");
        let mut s = Example2Spec::new(6);
        s.w0 = Some([5.0, 0.0]);
        s.vertices = Some(regular_polygon(3, [0.0, 0.0]));
        assert!(s.resolved().is_err(), "exterior w0");
    }

    #[test]
    fn spec_json_round_trip() {
        let s: Example2Spec = serde_json::from_str(r#"{"d":6,"alpha":3,"K":7}"#).unwrap();
        assert_eq!(s, Example2Spec::new(6));
        let back: Example2Spec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn evaluation_examples() {
        let g = GalleryPotential::build(Example2Spec::new(6)).unwrap();
        let s = g.spec().clone();
        let w1 = s.vertices()[0];
        let v = g.evaluate(&[0; 7]).unwrap();
        assert!(close(&v.value, w1, 0.0));
        assert!(v.error_bound <= 0.25f64.powi(4) + 1e-15);
        let v = g.evaluate(&[0, 2, 0, 0, 0, 0, 0]).unwrap();
        assert!(close(&v.value, s.w0(), 0.0));
        assert_eq!(v.error_bound, 0.0);
        let v = g.evaluate(&[0, 0, 0, 2, 0, 0, 0]).unwrap();
        assert!(close(&v.value, s.segment_point(1, 0), 0.0));
        assert!(close(&v.value, s.w0(), 1e-15));
        let v = g.evaluate(&[1, 0, 1, 1, 5]).unwrap();
        assert!(close(&v.value, s.segment_point(1, 1), 0.0));
        assert!(g.evaluate(&[4, 5]).is_err());
        assert_eq!(g.table().value_of(&[0, 0, 0, 2, 0, 0, 0]).unwrap(), &s.w0()[..]);
        assert_eq!(g.table().value_of(&[3; 7]).unwrap(), &s.vertices()[1][..]);
    }

    #[test]
    fn truncation_bound_holds() {
        let g = GalleryPotential::build(Example2Spec::new(6)).unwrap();
        let b = g.bound();
        assert!((b.sup_error - 0.25f64.powi(4)).abs() < 1e-15);
        assert!((b.pressure_bound(&[1.0, -2.0]) - 3.0 * b.sup_error).abs() < 1e-15);
        let pairs = sample_pairs(g.spec(), 20, 500, 11);
        for (x, _) in pairs {
            if let Ok(v) = g.evaluate(&x) {
                let t = g.table().value_of(&x).unwrap();
                let err = (v.value[0] - t[0]).abs().max((v.value[1] - t[1]).abs());
                assert!(err <= b.sup_error + v.error_bound + 1e-15);
            }
        }
    }

    #[test]
    fn lipschitz_examples() {
        let g = GalleryPotential::build(Example2Spec::new(6)).unwrap();
        let diam = g.spec().diameter();
        let first: Vec<_> = (0..6u8)
            .flat_map(|a| (0..6u8).filter(move |&b| b != a).map(move |b| (vec![a, 2, 4, 1], vec![b, 2, 4, 1])))
            .collect();
        assert!(check_lipschitz(&g, &first).max_ratio <= 2.0 * diam + 1e-12);
        let deep = vec![(vec![0, 1, 0, 1, 0, 1, 2], vec![0, 1, 0, 1, 0, 1, 1, 4])];
        assert!(check_lipschitz(&g, &deep).max_ratio <= 2.0 + 1e-12);
        let r = check_lipschitz(&g, &sample_pairs(g.spec(), 24, 4000, 5));
        assert!(r.within_bound, "{r:?}");
        // Run of exactly α against a long run: ratio 2^{α+1}|w0 − w1| = 16.
        let edge = vec![(vec![0, 0, 0, 2, 0], vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2])];
        let r = check_lipschitz(&g, &edge);
        assert!(r.max_ratio > r.stated_bound);
        assert!(r.within_bound);
    }

    #[test]
    fn uniform_average_is_w0_for_regular_polygon() {
        let mut s = Example2Spec::new(6);
        s.depth = 5;
        let (_, t, _) = build_example2(&s).unwrap();
        let a = uniform_average(&t);
        assert!(a[0].abs() < 1e-12 && a[1].abs() < 1e-12);
    }
}
