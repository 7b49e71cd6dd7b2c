//! Staged construction of a potential on the full 2-shift whose rotation set
//! is a prescribed compact convex planar set `K`.
//!
//! Stage `n` is constant on cylinders of length `m_n` and is stored as a
//! sparse override table on top of stage `n - 1`. Boundary positions are
//! normalized arc lengths held as exact dyadic fractions.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Hull};
use crate::potential::{EvaluatedValue, TablePotential};
use crate::sft::Sft;

/// Positions are multiples of `2^-POSITION_BITS` of the perimeter.
pub const POSITION_BITS: u32 = 48;
const ONE: u64 = 1 << POSITION_BITS;

/// Longest generator the override tables are allowed to hold (`m_3`).
pub const DEFAULT_WORD_CAP: u128 = 729;

/// Collinearity tolerance (relative) for polygon boundaries.
const CURVE_TOL: f64 = 1e-12;

/// On-disk boundary description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BoundarySpec {
    Circle { center: [f64; 2], radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl BoundarySpec {
    pub fn build(&self) -> Result<Boundary> {
        make_boundary(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Curve {
    Circle { center: [f64; 2], radius: f64 },
    Polygon { vertices: Vec<[f64; 2]>, cumulative: Vec<f64> },
}

/// Convex closed curve with an arc-length parameterization normalized to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundary {
    curve: Curve,
    perimeter: f64,
}

pub fn make_boundary(spec: &BoundarySpec) -> Result<Boundary> {
    match spec {
        BoundarySpec::Circle { center, radius } => Boundary::circle(*center, *radius),
        BoundarySpec::Polygon { vertices } => Boundary::polygon(vertices),
    }
}

impl Boundary {
    pub fn circle(center: [f64; 2], radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::DegenerateCurve(format!("circle radius {radius}")));
        }
        Ok(Boundary {
            curve: Curve::Circle { center, radius },
            perimeter: 2.0 * PI * radius,
        })
    }

    /// Convex polygon; orientation is normalized to counterclockwise keeping
    /// the first vertex as the arc-length origin.
    pub fn polygon(vertices: &[[f64; 2]]) -> Result<Self> {
        let mut v: Vec<[f64; 2]> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(Error::DegenerateCurve("non-finite vertex".into()));
            }
            if v.last() != Some(p) {
                v.push(*p);
            }
        }
        if v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        if v.len() < 3 {
            return Err(Error::DegenerateCurve(format!(
                "{} distinct vertices, need at least 3",
                v.len()
            )));
        }
        let scale = v
            .iter()
            .flatten()
            .fold(1.0f64, |a, x| a.max(x.abs()));
        let pts: Vec<Vec<f64>> = v.iter().map(|p| p.to_vec()).collect();
        let area = geometry::polygon_area(&pts);
        if area.abs() <= CURVE_TOL * scale * scale {
            return Err(Error::DegenerateCurve("vertices are collinear".into()));
        }
        let n = v.len();
        let sign = area.signum();
        let mut turning = 0.0;
        for i in 0..n {
            let (a, b, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            let e1 = [b[0] - a[0], b[1] - a[1]];
            let e2 = [c[0] - b[0], c[1] - b[1]];
            let cr = e1[0] * e2[1] - e1[1] * e2[0];
            if cr * sign < -CURVE_TOL * scale * scale {
                return Err(Error::NonConvex((i + n - 1) % n, i, (i + 1) % n));
            }
            turning += cr.atan2(e1[0] * e2[0] + e1[1] * e2[1]);
        }
        if (turning.abs() - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::NonConvex(n - 1, 0, 1));
        }
        if sign < 0.0 {
            v[1..].reverse();
        }
        let mut cumulative = vec![0.0];
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            cumulative.push(cumulative[i] + len);
        }
        let perimeter = cumulative[n];
        Ok(Boundary {
            curve: Curve::Polygon {
                vertices: v,
                cumulative,
            },
            perimeter,
        })
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn spec(&self) -> BoundarySpec {
        match &self.curve {
            Curve::Circle { center, radius } => BoundarySpec::Circle {
                center: *center,
                radius: *radius,
            },
            Curve::Polygon { vertices, .. } => BoundarySpec::Polygon {
                vertices: vertices.clone(),
            },
        }
    }

    /// Point at normalized arc length `s` (taken mod 1).
    pub fn point_at(&self, s: f64) -> [f64; 2] {
        let s = s.rem_euclid(1.0);
        match &self.curve {
            Curve::Circle { center, radius } => {
                let a = 2.0 * PI * s;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            }
            Curve::Polygon {
                vertices,
                cumulative,
            } => {
                let arc = s * self.perimeter;
                let n = vertices.len();
                let i = cumulative
                    .partition_point(|&c| c <= arc)
                    .saturating_sub(1)
                    .min(n - 1);
                let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                let len = cumulative[i + 1] - cumulative[i];
                let f = if len > 0.0 { (arc - cumulative[i]) / len } else { 0.0 };
                [a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]
            }
        }
    }

    /// Point at an exact dyadic position.
    pub fn point_at_position(&self, pos: u64) -> [f64; 2] {
        self.point_at(position_to_f64(pos))
    }

    /// Support function `max_{x∈K} u·x`.
    pub fn support(&self, u: &[f64]) -> f64 {
        match &self.curve {
            Curve::Circle { center, radius } => {
                center[0] * u[0] + center[1] * u[1] + radius * (u[0] * u[0] + u[1] * u[1]).sqrt()
            }
            Curve::Polygon { vertices, .. } => vertices
                .iter()
                .map(|v| v[0] * u[0] + v[1] * u[1])
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Euclidean distance from `p` to the curve.
    pub fn distance_to_curve(&self, p: [f64; 2]) -> f64 {
        match &self.curve {
            Curve::Circle { center, radius } => {
                (((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)).sqrt() - radius).abs()
            }
            Curve::Polygon { vertices, .. } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| {
                        let a = vertices[i];
                        let b = vertices[(i + 1) % n];
                        let ab = [b[0] - a[0], b[1] - a[1]];
                        let ap = [p[0] - a[0], p[1] - a[1]];
                        let t = ((ap[0] * ab[0] + ap[1] * ab[1]) / (ab[0] * ab[0] + ab[1] * ab[1]))
                            .clamp(0.0, 1.0);
                        ((ap[0] - t * ab[0]).powi(2) + (ap[1] - t * ab[1]).powi(2)).sqrt()
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Convex hull of `K` itself for polygons, or of `samples` equidistant
    /// boundary points for circles.
    pub fn hull(&self, samples: usize) -> Hull {
        let pts: Vec<Vec<f64>> = match &self.curve {
            Curve::Polygon { vertices, .. } => vertices.iter().map(|v| v.to_vec()).collect(),
            Curve::Circle { .. } => (0..samples)
                .map(|i| self.point_at(i as f64 / samples as f64).to_vec())
                .collect(),
        };
        geometry::hull(&pts).expect("boundary points form a valid hull")
    }

    /// Upper bound on how far `hull(samples)` can fall short of `K`.
    pub fn hull_slack(&self, samples: usize) -> f64 {
        match &self.curve {
            Curve::Polygon { .. } => 0.0,
            Curve::Circle { radius, .. } => radius * (1.0 - (PI / samples as f64).cos()),
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.curve {
            Curve::Circle { radius, .. } => 2.0 * radius,
            Curve::Polygon { .. } => self.hull(0).diameter(),
        }
    }
}

pub fn position_to_f64(pos: u64) -> f64 {
    pos as f64 / ONE as f64
}

/// Potential for a `K` with empty interior: a constant for a point, or a
/// two-valued depth-1 table whose rotation set is the segment.
pub fn degenerate_potential(points: &[[f64; 2]]) -> Result<TablePotential> {
    let pts: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
    let h = geometry::hull(&pts)?;
    let (a, b) = match h.dim {
        0 => (h.vertices[0].clone(), h.vertices[0].clone()),
        1 => (h.vertices[0].clone(), h.vertices[1].clone()),
        _ => {
            return Err(Error::BadSpec(
                "set has nonempty interior; use the staged construction".into(),
            ))
        }
    };
    TablePotential::per_symbol(&Sft::full(2), &[a, b])
}

/// One stage of the construction.
#[derive(Debug, Clone)]
pub struct ConstructionState {
    boundary: Boundary,
    stage: usize,
    /// `m_0, …, m_n`.
    depths: Vec<usize>,
    /// Generators of the original cylinders of this stage, in boundary order.
    generators: Vec<Vec<u8>>,
    /// Positions `s_{n,j}` of `w_{n,j}`.
    positions: Vec<u64>,
    /// Stage-0 values of the cylinders `[0]` and `[1]`.
    base: [u64; 2],
    /// `overrides[s - 1]` maps `m_s`-words to positions for stage `s ≥ 1`.
    overrides: Vec<HashMap<Vec<u8>, u64>>,
}

/// Checked bounds for one step `n → n + 1`. Distances are in units of the
/// perimeter, so the bounds do not depend on the size of `K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageCertificate {
    pub stage: usize,
    pub m_next: usize,
    pub override_count: usize,
    pub conflicts: usize,
    pub sup_diff: f64,
    pub sup_bound: f64,
    /// `‖w_{n+1,j} − w*_{n+1,j}‖₂` for every new vertex.
    pub defects: Vec<f64>,
    pub max_defect: f64,
    pub defect_bound: f64,
    pub max_gap_error: f64,
    pub max_curve_distance: f64,
    pub within_bounds: bool,
}

pub fn stage0(b: &Boundary) -> ConstructionState {
    let base = [0, ONE / 2];
    ConstructionState {
        boundary: b.clone(),
        stage: 0,
        depths: vec![1],
        generators: vec![vec![0], vec![1]],
        positions: base.to_vec(),
        base,
        overrides: Vec::new(),
    }
}

impl ConstructionState {
    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    /// `m_n`.
    pub fn depth(&self) -> usize {
        self.depths[self.stage]
    }

    pub fn depths(&self) -> &[usize] {
        &self.depths
    }

    pub fn generators(&self) -> &[Vec<u8>] {
        &self.generators
    }

    pub fn positions(&self) -> &[u64] {
        &self.positions
    }

    /// The boundary points `w_{n,j}`.
    pub fn points(&self) -> Vec<[f64; 2]> {
        self.positions
            .iter()
            .map(|&p| self.boundary.point_at_position(p))
            .collect()
    }

    pub fn override_count(&self, stage: usize) -> usize {
        if stage == 0 {
            0
        } else {
            self.overrides[stage - 1].len()
        }
    }

    /// Position of `Φ_s` on the cylinder of `x` (needs `|x| ≥ m_s`).
    pub fn position_at_stage(&self, s: usize, x: &[u8]) -> Result<u64> {
        if s > self.stage {
            return Err(Error::BadSpec(format!(
                "stage {s} not built (have {})",
                self.stage
            )));
        }
        if x.len() < self.depths[s] {
            return Err(Error::InsufficientPrefix {
                needed: self.depths[s],
                got: x.len(),
            });
        }
        for t in (1..=s).rev() {
            if let Some(&p) = self.overrides[t - 1].get(&x[..self.depths[t]]) {
                return Ok(p);
            }
        }
        match x[0] {
            0 => Ok(self.base[0]),
            1 => Ok(self.base[1]),
            c => Err(Error::InadmissibleWord(format!("symbol {c} on the 2-shift"))),
        }
    }

    pub fn value_at_stage(&self, s: usize, x: &[u8]) -> Result<[f64; 2]> {
        Ok(self.boundary.point_at_position(self.position_at_stage(s, x)?))
    }

    /// `w*` of every generator: the mean of the current stage along its orbit.
    pub fn star_points(&self) -> Vec<[f64; 2]> {
        self.generators
            .par_iter()
            .map(|g| self.orbit_mean(g))
            .collect()
    }

    /// Mean of the current stage along the periodic orbit of `g`.
    pub fn orbit_mean(&self, g: &[u8]) -> [f64; 2] {
        let m = self.depth();
        let n = g.len();
        let mut counts: HashMap<u64, usize> = HashMap::new();
        let mut window = vec![0u8; m];
        for k in 0..n {
            for (i, s) in window.iter_mut().enumerate() {
                *s = g[(k + i) % n];
            }
            let p = self
                .position_at_stage(self.stage, &window)
                .expect("window has the stage depth");
            *counts.entry(p).or_insert(0) += 1;
        }
        let mut keys: Vec<_> = counts.into_iter().collect();
        keys.sort_unstable();
        let mut out = [0.0; 2];
        for (p, c) in keys {
            let q = self.boundary.point_at_position(p);
            out[0] += c as f64 * q[0];
            out[1] += c as f64 * q[1];
        }
        [out[0] / n as f64, out[1] / n as f64]
    }
}

pub fn advance(state: &ConstructionState) -> Result<(ConstructionState, StageCertificate)> {
    advance_with_cap(state, DEFAULT_WORD_CAP)
}

/// One induction step, with the generator length capped at `cap`.
pub fn advance_with_cap(
    state: &ConstructionState,
    cap: u128,
) -> Result<(ConstructionState, StageCertificate)> {
    let n = state.stage;
    let m_n = state.depth();
    let reps = 3u128.pow(n as u32 + 1);
    let m_next = reps * m_n as u128;
    if m_next > cap {
        return Err(Error::StageOverflow {
            stage: n + 1,
            required: m_next,
            cap,
        });
    }
    let m_next = m_next as usize;
    let k_n = m_next - m_n;
    let offset = ONE >> (n + 3);

    let mut generators = Vec::with_capacity(2 * state.generators.len());
    let mut positions = Vec::with_capacity(2 * state.generators.len());
    for (g, &p) in state.generators.iter().zip(&state.positions) {
        let tau = g.repeat(reps as usize);
        let mut bar = tau.clone();
        *bar.last_mut().expect("nonempty generator") ^= 1;
        generators.push(tau);
        positions.push(p.wrapping_sub(offset) & (ONE - 1));
        generators.push(bar);
        positions.push(p.wrapping_add(offset) & (ONE - 1));
    }

    // Overrides in priority order: orbits of τ_j, the first k_n shifts of
    // τ̄_j, then the inherited tail of τ̄_j.
    let mut table: HashMap<Vec<u8>, u64> = HashMap::new();
    let mut conflicts = 0usize;
    let mut insert = |w: &[u8], p: u64, table: &mut HashMap<Vec<u8>, u64>| match table.get(w) {
        Some(&q) if q != p => conflicts += 1,
        Some(_) => {}
        None => {
            table.insert(w.to_vec(), p);
        }
    };
    let doubled: Vec<Vec<u8>> = generators.iter().map(|g| g.repeat(2)).collect();
    for j in 0..state.generators.len() {
        let tau = &doubled[2 * j];
        // τ_j has period m_n, so its first m_n shifts are all the distinct words.
        for k in 0..m_n {
            insert(&tau[k..k + m_next], positions[2 * j], &mut table);
        }
    }
    for j in 0..state.generators.len() {
        let bar = &doubled[2 * j + 1];
        for k in 0..k_n {
            insert(&bar[k..k + m_next], positions[2 * j + 1], &mut table);
        }
    }
    for j in 0..state.generators.len() {
        let bar = &doubled[2 * j + 1];
        let inherited = state.position_at_stage(n, &bar[k_n..k_n + m_n])?;
        for k in k_n..m_next {
            insert(&bar[k..k + m_next], inherited, &mut table);
        }
    }

    let mut depths = state.depths.clone();
    depths.push(m_next);
    let mut overrides = state.overrides.clone();
    overrides.push(table);
    let next = ConstructionState {
        boundary: state.boundary.clone(),
        stage: n + 1,
        depths,
        generators,
        positions,
        base: state.base,
        overrides,
    };

    let b = &next.boundary;
    let per = b.perimeter();
    let sup_diff = next.overrides[n]
        .par_iter()
        .map(|(w, &p)| {
            let new = b.point_at_position(p);
            let old = state
                .value_at_stage(n, w)
                .expect("override words are longer than m_n");
            ((new[0] - old[0]).powi(2) + (new[1] - old[1]).powi(2)).sqrt() / per
        })
        .reduce(|| 0.0, f64::max);
    let stars = next.star_points();
    let points = next.points();
    let defects: Vec<f64> = points
        .iter()
        .zip(&stars)
        .map(|(w, s)| ((w[0] - s[0]).powi(2) + (w[1] - s[1]).powi(2)).sqrt() / per)
        .collect();
    let max_defect = defects.iter().copied().fold(0.0, f64::max);
    let sup_bound = 11.0 / 8.0 * 0.5f64.powi(n as i32);
    let defect_bound = 5.0 / 4.0 * 6f64.powi(-(n as i32 + 1));
    let max_gap_error = gap_error(&next.positions);
    let max_curve_distance = points
        .iter()
        .map(|&p| b.distance_to_curve(p))
        .fold(0.0, f64::max);
    let mut within = sup_diff <= sup_bound && max_defect <= defect_bound;
    if n == 0 {
        within &= sup_diff <= 1.0 / 8.0;
    }
    let cert = StageCertificate {
        stage: n,
        m_next,
        override_count: next.overrides[n].len(),
        conflicts,
        sup_diff,
        sup_bound,
        defects,
        max_defect,
        defect_bound,
        max_gap_error,
        max_curve_distance,
        within_bounds: within,
    };
    Ok((next, cert))
}

/// Largest deviation of consecutive cyclic gaps from `1 / count`.
fn gap_error(positions: &[u64]) -> f64 {
    let mut p: Vec<u64> = positions.to_vec();
    p.sort_unstable();
    let n = p.len();
    let ideal = 1.0 / n as f64;
    (0..n)
        .map(|i| {
            let gap = if i + 1 < n {
                p[i + 1] - p[i]
            } else {
                ONE - p[i] + p[0]
            };
            (position_to_f64(gap) - ideal).abs()
        })
        .fold(0.0, f64::max)
}

/// Dense depth-`m_n` table of the current stage.
pub fn export_stage(state: &ConstructionState) -> Result<TablePotential> {
    let full = Sft::full(2);
    let s = state.stage;
    TablePotential::from_fn(&full, state.depth(), 2, |w| {
        state
            .value_at_stage(s, w)
            .expect("table words have the stage depth")
            .to_vec()
    })
}

/// Value of the deepest stage the prefix resolves, with the geometric tail
/// bound `(11/4)·2^{-s}` (scaled by the perimeter) to the limit potential.
pub fn evaluate_limit(state: &ConstructionState, prefix: &[u8]) -> Result<EvaluatedValue> {
    let s = (0..=state.stage)
        .rev()
        .find(|&s| state.depths[s] <= prefix.len())
        .ok_or(Error::InsufficientPrefix {
            needed: 1,
            got: prefix.len(),
        })?;
    let v = state.value_at_stage(s, prefix)?;
    Ok(EvaluatedValue {
        value: v.to_vec(),
        error_bound: tail_bound(s) * state.boundary.perimeter(),
    })
}

/// `Σ_{k≥n} (11/8)·2^{-k}`.
pub fn tail_bound(n: usize) -> f64 {
    11.0 / 4.0 * 0.5f64.powi(n as i32)
}

/// Positions and `w*` points of one stage, computed without override tables.
#[derive(Debug, Clone, Serialize)]
pub struct StagePoints {
    pub stage: usize,
    pub positions: Vec<f64>,
    pub w: Vec<[f64; 2]>,
    pub w_star: Vec<[f64; 2]>,
}

/// Stages `0..=stages` from the closed-form recursion for the vertices:
/// odd-indexed vertices are their own orbit means, and the even vertex built
/// from `w_{n,i}` has mean `(1 − 3^{-(n+1)})·R_{n,i} + 3^{-(n+1)}·w_{n,i'}`
/// where `i'` is the generator that differs from `i` only in its last symbol.
pub fn position_chain(b: &Boundary, stages: usize) -> Result<Vec<StagePoints>> {
    if stages + 3 > POSITION_BITS as usize {
        return Err(Error::StageOverflow {
            stage: stages,
            required: stages as u128 + 3,
            cap: POSITION_BITS as u128,
        });
    }
    let mut pos: Vec<u64> = vec![0, ONE / 2];
    let mut star: Vec<[f64; 2]> = pos.iter().map(|&p| b.point_at_position(p)).collect();
    let mut out = vec![StagePoints {
        stage: 0,
        positions: pos.iter().map(|&p| position_to_f64(p)).collect(),
        w: star.clone(),
        w_star: star.clone(),
    }];
    for n in 0..stages {
        let offset = ONE >> (n + 3);
        let ratio = 3f64.powi(-(n as i32 + 1));
        let mut next = Vec::with_capacity(2 * pos.len());
        star = Vec::with_capacity(2 * pos.len());
        for (i, &p) in pos.iter().enumerate() {
            let l = p.wrapping_sub(offset) & (ONE - 1);
            let r = p.wrapping_add(offset) & (ONE - 1);
            let sib = pos[i ^ 1];
            next.push(l);
            next.push(r);
            let (lp, rp, sp) = (
                b.point_at_position(l),
                b.point_at_position(r),
                b.point_at_position(sib),
            );
            star.push(lp);
            star.push([
                (1.0 - ratio) * rp[0] + ratio * sp[0],
                (1.0 - ratio) * rp[1] + ratio * sp[1],
            ]);
        }
        pos = next;
        out.push(StagePoints {
            stage: n + 1,
            positions: pos.iter().map(|&p| position_to_f64(p)).collect(),
            w: pos.iter().map(|&p| b.point_at_position(p)).collect(),
            w_star: star.clone(),
        });
    }
    Ok(out)
}

/// The construction carried to a fixed stage, usable as a potential.
#[derive(Debug, Clone)]
pub struct StagedPotential {
    state: ConstructionState,
    certificates: Vec<StageCertificate>,
}

impl StagedPotential {
    pub fn build(b: Boundary, stages: usize) -> Result<Self> {
        let mut state = stage0(&b);
        let mut certificates = Vec::with_capacity(stages);
        for _ in 0..stages {
            let (next, cert) = advance(&state)?;
            state = next;
            certificates.push(cert);
        }
        Ok(StagedPotential {
            state,
            certificates,
        })
    }

    pub fn state(&self) -> &ConstructionState {
        &self.state
    }

    pub fn certificates(&self) -> &[StageCertificate] {
        &self.certificates
    }

    /// `m_n` of the final stage.
    pub fn cylinder_depth(&self) -> usize {
        self.state.depth()
    }

    pub fn export(&self) -> Result<TablePotential> {
        export_stage(&self.state)
    }

    /// Final-stage value, with the tail bound to the limit potential when
    /// the prefix resolves the final stage, or the bound of a coarser stage.
    pub fn evaluate(&self, prefix: &[u8]) -> Result<EvaluatedValue> {
        evaluate_limit(&self.state, prefix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_circle() -> Boundary {
        Boundary::circle([0.0, 0.0], 1.0 / (2.0 * PI)).unwrap()
    }

    fn square() -> Boundary {
        Boundary::polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    fn close(a: [f64; 2], b: [f64; 2], tol: f64) -> bool {
        (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol
    }

    #[test]
    fn boundary_examples() {
        let c = unit_circle();
        assert!((c.perimeter() - 1.0).abs() < 1e-15);
        assert!(close(c.point_at(0.0), [1.0 / (2.0 * PI), 0.0], 1e-15));
        let sq = square();
        assert_eq!(sq.perimeter(), 4.0);
        assert_eq!(sq.point_at(0.25), [1.0, 0.0]);
        assert_eq!(sq.point_at(0.5), [1.0, 1.0]);
        assert!(matches!(
            Boundary::polygon(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]),
            Err(Error::DegenerateCurve(_))
        ));
        assert!(matches!(
            Boundary::polygon(&[[0.0, 0.0], [2.0, 0.0], [1.0, 0.5], [1.0, 2.0]]),
            Err(Error::NonConvex(..))
        ));
        // Clockwise input is reoriented but keeps its first vertex.
        let cw = Boundary::polygon(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(cw.point_at(0.25), [1.0, 0.0]);
    }

    #[test]
    fn stage0_and_first_step() {
        let b = unit_circle();
        let s0 = stage0(&b);
        assert_eq!(s0.depth(), 1);
        let p = s0.points();
        assert!(close(p[1], [-1.0 / (2.0 * PI), 0.0], 1e-15));
        let (s1, cert) = advance(&s0).unwrap();
        assert_eq!(s1.depth(), 3);
        assert_eq!(s1.generators(), &[vec![0, 0, 0], vec![0, 0, 1], vec![1, 1, 1], vec![1, 1, 0]]);
        assert!(cert.sup_diff <= 1.0 / 8.0 + 1e-15);
        assert!(cert.within_bounds);
        assert_eq!(cert.conflicts, 0);
        // w*_{1,2} = 2/3 w_{1,2} + 1/3 w_{0,2}
        let stars = s1.star_points();
        let w = s1.points();
        let expect = [
            2.0 / 3.0 * w[1][0] + 1.0 / 3.0 * p[1][0],
            2.0 / 3.0 * w[1][1] + 1.0 / 3.0 * p[1][1],
        ];
        assert!(close(stars[1], expect, 1e-15));
        assert!(close(stars[0], w[0], 1e-15));
        // Φ₁ on 010 is R_{0,1}, on 100 it falls back to w_{0,2}.
        assert_eq!(s1.position_at_stage(1, &[0, 1, 0]).unwrap(), s1.positions()[1]);
        assert_eq!(s1.position_at_stage(1, &[1, 0, 0]).unwrap(), ONE / 2);
        assert_eq!(s1.position_at_stage(1, &[0, 1, 1]).unwrap(), 0);
    }

    #[test]
    fn m_sequence_and_cap() {
        let mut s = stage0(&square());
        let mut ms = vec![s.depth()];
        for _ in 0..3 {
            let (next, cert) = advance(&s).unwrap();
            assert!(cert.within_bounds, "{cert:?}");
            s = next;
            ms.push(s.depth());
        }
        assert_eq!(ms, vec![1, 3, 27, 729]);
        assert!(matches!(
            advance(&s),
            Err(Error::StageOverflow { stage: 4, required: 59049, cap: 729 })
        ));
    }

    #[test]
    fn chain_matches_full_construction() {
        for b in [unit_circle(), square()] {
            let chain = position_chain(&b, 3).unwrap();
            let mut s = stage0(&b);
            for n in 1..=3 {
                s = advance(&s).unwrap().0;
                let stars = s.star_points();
                for (a, c) in stars.iter().zip(&chain[n].w_star) {
                    assert!(close(*a, *c, 1e-12), "stage {n}: {a:?} vs {c:?}");
                }
                for (a, c) in s.points().iter().zip(&chain[n].w) {
                    assert!(close(*a, *c, 0.0));
                }
            }
        }
    }

    #[test]
    fn export_and_evaluate() {
        let b = unit_circle();
        let (s1, _) = advance(&stage0(&b)).unwrap();
        let t = export_stage(&s1).unwrap();
        assert_eq!((t.depth(), t.entries().count()), (3, 8));
        let (s2, _) = advance(&s1).unwrap();
        assert!(matches!(
            export_stage(&s2),
            Err(Error::TableBudgetExceeded { .. })
        ));
        let v = evaluate_limit(&s2, &[0; 27]).unwrap();
        assert!((v.error_bound - 11.0 / 16.0).abs() < 1e-15);
        let coarse = evaluate_limit(&s2, &[0; 5]).unwrap();
        assert!((coarse.error_bound - 11.0 / 8.0).abs() < 1e-15);
        assert!(matches!(
            evaluate_limit(&s2, &[]),
            Err(Error::InsufficientPrefix { .. })
        ));
        assert!((tail_bound(4) - 11.0 / 64.0).abs() < 1e-16);
        // The all-zero cylinder follows the L branch of w_{0,1}.
        let l = s2.position_at_stage(2, &[0; 27]).unwrap();
        assert_eq!(l, (ONE - ONE / 8 - ONE / 16) & (ONE - 1));
    }

    #[test]
    fn degenerate_sets() {
        let t = degenerate_potential(&[[1.0, 2.0]]).unwrap();
        assert_eq!(t.value(0), t.value(1));
        let t = degenerate_potential(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).unwrap();
        assert_eq!(t.value(0), &[0.0, 0.0]);
        assert_eq!(t.value(1), &[2.0, 2.0]);
        assert!(degenerate_potential(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
    }
}
