//! Rotation sets of locally constant potentials.
//!
//! Extreme invariant measures of a finite edge graph are uniform measures on
//! simple cycles, so the rotation set is the convex hull of simple-cycle
//! means. When there are too many cycles the hull is rebuilt from support
//! queries, which bracket it between the hull of the witnesses and the
//! intersection of the supporting half-planes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cycles::{max_mean_cycle, simple_cycles, DEFAULT_CYCLE_CAP};
use crate::error::{Error, Result};
use crate::geometry::{self, direction_grid, Hull};
use crate::potential::{birkhoff_sum, Potential, SkeletonPotential, TablePotential};
use crate::sft::{CyclicWord, Sft};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolytopeMethod {
    /// Hull of all simple-cycle means.
    Exact,
    /// Support queries; the true set lies between `vertices` and `outer`.
    Sandwich,
}

#[derive(Debug, Clone, Serialize)]
pub struct RotationPolytope {
    pub m: usize,
    pub vertices: Vec<Vec<f64>>,
    /// One cycle per vertex whose Birkhoff mean is that vertex.
    pub cycles: Vec<CyclicWord>,
    pub dim: usize,
    pub method: PolytopeMethod,
    /// Hausdorff distance between the inner and outer bounds (0 when exact).
    pub gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer: Option<Vec<Vec<f64>>>,
}

impl RotationPolytope {
    pub fn hull(&self) -> Hull {
        Hull {
            m: self.m,
            vertices: self.vertices.clone(),
            dim: self.dim,
        }
    }

    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| geometry::dot(v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Signed distance to the boundary (positive strictly inside).
    pub fn interior_margin(&self, w: &[f64]) -> f64 {
        self.hull().interior_margin(w)
    }

    pub fn diameter(&self) -> f64 {
        self.hull().diameter()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportQuery {
    pub direction: Vec<f64>,
    pub value: f64,
    pub witness: CyclicWord,
    pub witness_mean: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PolytopeOptions {
    pub cycle_cap: usize,
    /// Fall back to support queries when the cycle cap is hit.
    pub fallback: bool,
    /// Initial number of support directions for the fallback.
    pub directions: usize,
    pub state_budget: usize,
}

impl Default for PolytopeOptions {
    fn default() -> Self {
        PolytopeOptions {
            cycle_cap: DEFAULT_CYCLE_CAP,
            fallback: false,
            directions: 64,
            state_budget: crate::sft::DEFAULT_STATE_BUDGET,
        }
    }
}

/// Exact rotation polytope by simple-cycle enumeration.
pub fn rotation_polytope(sft: &Sft, p: &TablePotential) -> Result<RotationPolytope> {
    rotation_polytope_with(sft, p, &PolytopeOptions::default())
}

pub fn rotation_polytope_with(
    sft: &Sft,
    p: &TablePotential,
    opts: &PolytopeOptions,
) -> Result<RotationPolytope> {
    let sp = SkeletonPotential::with_budget(sft, p, opts.state_budget)?;
    match polytope_from_cycles(&sp, opts.cycle_cap) {
        Err(Error::CycleBudgetExceeded { .. }) if opts.fallback => {
            polytope_from_support(&sp, opts.directions)
        }
        other => other,
    }
}

pub fn polytope_from_cycles(sp: &SkeletonPotential, cap: usize) -> Result<RotationPolytope> {
    let cycles = simple_cycles(&sp.skeleton, cap)?;
    if cycles.is_empty() {
        return Err(Error::BadSpec("skeleton has no cycles".into()));
    }
    let means: Vec<Vec<f64>> = cycles.par_iter().map(|c| sp.cycle_mean(c)).collect();
    let hull = geometry::hull(&means)?;
    // Pick, per vertex, the shortest generating cycle (ties by canonical word).
    let words: Vec<CyclicWord> = hull
        .vertices
        .iter()
        .map(|v| {
            let mut best: Option<(usize, CyclicWord)> = None;
            for (c, mean) in cycles.iter().zip(&means) {
                if geometry::dist(mean, v) <= 1e-12 * (1.0 + v.iter().map(|x| x.abs()).fold(0.0, f64::max)) {
                    let w = sp.cycle_word(c).canonical();
                    let key = (w.len(), w.clone());
                    if best.as_ref().map_or(true, |b| key < (b.0, b.1.clone())) {
                        best = Some(key);
                    }
                }
            }
            best.expect("hull vertex comes from a cycle").1
        })
        .collect();
    Ok(RotationPolytope {
        m: sp.dim(),
        dim: hull.dim,
        vertices: hull.vertices,
        cycles: words,
        method: PolytopeMethod::Exact,
        gap: 0.0,
        outer: None,
    })
}

/// Maximum over the rotation set of `u·v`, with a witness cycle.
pub fn support(sft: &Sft, p: &TablePotential, u: &[f64]) -> Result<SupportQuery> {
    let sp = SkeletonPotential::new(sft, p)?;
    support_on(&sp, u)
}

pub fn support_on(sp: &SkeletonPotential, u: &[f64]) -> Result<SupportQuery> {
    if u.len() != sp.dim() {
        return Err(Error::DimensionMismatch {
            expected: sp.dim(),
            found: u.len(),
        });
    }
    if u.iter().all(|&x| x == 0.0) {
        return Err(Error::BadSpec("support direction must be nonzero".into()));
    }
    let w = sp.project(u);
    let best = max_mean_cycle(&sp.skeleton, &w)
        .ok_or_else(|| Error::BadSpec("skeleton has no cycles".into()))?;
    let mean = sp.cycle_mean(&best.edges);
    Ok(SupportQuery {
        direction: u.to_vec(),
        value: geometry::dot(&mean, u),
        witness: sp.cycle_word(&best.edges).canonical(),
        witness_mean: mean,
    })
}

/// Rotation set from support queries. In the plane the direction set is
/// refined by the edge normals of the inner hull until no query finds a new
/// vertex, which recovers the polygon exactly; the outer polygon certifies it.
pub fn polytope_from_support(sp: &SkeletonPotential, directions: usize) -> Result<RotationPolytope> {
    let m = sp.dim();
    let mut dirs = direction_grid(m, directions.max(4));
    let mut queries: Vec<SupportQuery> = dirs
        .par_iter()
        .map(|u| support_on(sp, u))
        .collect::<Result<_>>()?;
    if m == 2 {
        for _ in 0..64 {
            let inner = inner_hull(&queries)?;
            let n = inner.vertices.len();
            if inner.dim < 2 {
                break;
            }
            let mut fresh = Vec::new();
            for i in 0..n {
                let a = &inner.vertices[i];
                let b = &inner.vertices[(i + 1) % n];
                let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
                let len = (ex * ex + ey * ey).sqrt();
                let u = vec![ey / len, -ex / len];
                if !dirs.iter().any(|d| geometry::dist(d, &u) < 1e-12) {
                    fresh.push(u);
                }
            }
            if fresh.is_empty() {
                break;
            }
            let more: Vec<SupportQuery> = fresh
                .par_iter()
                .map(|u| support_on(sp, u))
                .collect::<Result<_>>()?;
            dirs.extend(fresh);
            let grew = more.iter().any(|q| q.value > inner.support(&q.direction) + 1e-12);
            queries.extend(more);
            if !grew {
                break;
            }
        }
    }
    let inner = inner_hull(&queries)?;
    let (outer, gap) = if m == 2 {
        let values: Vec<f64> = queries.iter().map(|q| q.value).collect();
        let d: Vec<Vec<f64>> = queries.iter().map(|q| q.direction.clone()).collect();
        let outer = geometry::outer_polygon(&d, &values)?;
        let gap = geometry::hausdorff(&inner, &outer)?;
        (Some(outer.vertices), gap)
    } else if m == 1 {
        (None, 0.0)
    } else {
        (None, f64::NAN)
    };
    let cycles = inner
        .vertices
        .iter()
        .map(|v| {
            queries
                .iter()
                .filter(|q| geometry::dist(&q.witness_mean, v) <= 1e-12)
                .map(|q| q.witness.clone())
                .min_by(|a, b| (a.len(), a).cmp(&(b.len(), b)))
                .expect("vertex comes from a witness")
        })
        .collect();
    Ok(RotationPolytope {
        m,
        dim: inner.dim,
        vertices: inner.vertices,
        cycles,
        method: PolytopeMethod::Sandwich,
        gap,
        outer,
    })
}

fn inner_hull(queries: &[SupportQuery]) -> Result<Hull> {
    let pts: Vec<Vec<f64>> = queries.iter().map(|q| q.witness_mean.clone()).collect();
    geometry::hull(&pts)
}

/// Birkhoff means of `trials` random orbit segments of length `n`, choosing
/// successors uniformly among the allowed symbols.
pub fn sample_pointwise(
    sft: &Sft,
    p: &Potential,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::BadSpec("orbit length must be positive".into()));
    }
    let d = sft.alphabet();
    let succ: Vec<Vec<u8>> = (0..d)
        .map(|s| (0..d).filter(|&t| sft.allowed(s, t)).map(|t| t as u8).collect())
        .collect();
    let len = n + p.resolution().max(1) - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<Vec<u8>> = (0..trials)
        .map(|_| {
            let mut x = Vec::with_capacity(len);
            x.push(rng.gen_range(0..d) as u8);
            while x.len() < len {
                let options = &succ[*x.last().expect("nonempty") as usize];
                x.push(options[rng.gen_range(0..options.len())]);
            }
            x
        })
        .collect();
    words
        .par_iter()
        .map(|x| birkhoff_sum(p, x, n).map(|b| b.mean))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(sft: &Sft, vals: &[Vec<f64>]) -> TablePotential {
        TablePotential::per_symbol(sft, vals).unwrap()
    }

    #[test]
    fn segment_and_interval() {
        let full = Sft::full(2);
        let p = table(&full, &[vec![0.0, 0.0], vec![1.0, 0.0]]);
        let r = rotation_polytope(&full, &p).unwrap();
        assert_eq!(r.vertices, vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(r.dim, 1);

        let gm = Sft::golden_mean();
        let p = table(&gm, &[vec![0.0], vec![1.0]]);
        let r = rotation_polytope(&gm, &p).unwrap();
        assert_eq!(r.vertices, vec![vec![0.0], vec![0.5]]);
        assert_eq!(r.cycles[1], CyclicWord::new(vec![0, 1]));
    }

    #[test]
    fn support_examples() {
        let gm = Sft::golden_mean();
        let p = table(&gm, &[vec![0.0], vec![1.0]]);
        let q = support(&gm, &p, &[1.0]).unwrap();
        assert_eq!(q.value, 0.5);
        assert_eq!(q.witness, CyclicWord::new(vec![0, 1]));
        let q = support(&gm, &p, &[-1.0]).unwrap();
        assert_eq!(q.value, 0.0);
        assert_eq!(q.witness, CyclicWord::new(vec![0]));

        let full = Sft::full(2);
        let p = table(&full, &[vec![0.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(support(&full, &p, &[0.0, 1.0]).unwrap().value, 0.0);
    }

    #[test]
    fn sandwich_recovers_exact_polygon() {
        let sft = Sft::full(3);
        let t = TablePotential::from_fn(&sft, 2, 2, |w| {
            let c = (w[0] * 3 + w[1]) as f64;
            vec![(c * 1.7).sin(), (c * 0.9 + 0.3).cos()]
        })
        .unwrap();
        let exact = rotation_polytope(&sft, &t).unwrap();
        let sp = SkeletonPotential::new(&sft, &t).unwrap();
        let s = polytope_from_support(&sp, 16).unwrap();
        assert!(geometry::hausdorff(&exact.hull(), &s.hull()).unwrap() < 1e-12);
        assert!(s.gap < 1e-9, "gap {}", s.gap);
    }

    #[test]
    fn samples_stay_in_range_and_are_reproducible() {
        let full = Sft::full(2);
        let p = Potential::Table(table(&full, &[vec![0.0], vec![1.0]]));
        let a = sample_pointwise(&full, &p, 1000, 50, 7).unwrap();
        let b = sample_pointwise(&full, &p, 1000, 50, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|v| (0.0..=1.0).contains(&v[0])));
    }
}
