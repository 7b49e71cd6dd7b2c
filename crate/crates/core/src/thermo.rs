//! Pressure `Q(T) = P_top(T·Φ)` of locally constant potentials, its
//! derivatives, and the Legendre-dual entropy function `H(w)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::direction_grid;
use crate::graph::{period, recurrent_components};
use crate::potential::{dot, SkeletonPotential, TablePotential, WeightedSkeleton};
use crate::rotgeom::{self, PolytopeOptions, RotationPolytope};
use crate::sft::{Sft, Skeleton};

/// Relative Collatz–Wielandt gap at which power iteration stops.
pub const POWER_TOL: f64 = 1e-13;
pub const POWER_MAX_ITER: usize = 100_000;

/// One recurrent component of the skeleton, with local indexing.
#[derive(Debug, Clone)]
struct Component {
    vertices: Vec<usize>,
    /// `(local src, local tgt, edge)` grouped by source.
    edges: Vec<(usize, usize, usize)>,
    out_offsets: Vec<usize>,
    /// Edge indices (into `edges`) grouped by target.
    in_index: Vec<usize>,
    in_offsets: Vec<usize>,
    period: usize,
}

impl Component {
    fn new(sk: &Skeleton, vertices: Vec<usize>, period: usize) -> Self {
        let mut local = vec![usize::MAX; sk.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let n = vertices.len();
        let mut edges = Vec::new();
        let mut out_offsets = vec![0];
        for &v in &vertices {
            for e in sk.out_edges(v) {
                let t = local[sk.tgt(e)];
                if t != usize::MAX {
                    edges.push((local[v], t, e));
                }
            }
            out_offsets.push(edges.len());
        }
        let mut in_offsets = vec![0usize; n + 1];
        for &(_, t, _) in &edges {
            in_offsets[t + 1] += 1;
        }
        for i in 0..n {
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut fill = in_offsets.clone();
        let mut in_index = vec![0; edges.len()];
        for (i, &(_, t, _)) in edges.iter().enumerate() {
            in_index[fill[t]] = i;
            fill[t] += 1;
        }
        Component {
            vertices,
            edges,
            out_offsets,
            in_index,
            in_offsets,
            period,
        }
    }

    fn len(&self) -> usize {
        self.vertices.len()
    }
}

fn components(sk: &Skeleton) -> Vec<Component> {
    let g = sk.vertex_graph();
    recurrent_components(&g)
        .into_iter()
        .map(|c| {
            let p = period(&g, &c);
            Component::new(sk, c, p)
        })
        .collect()
}

/// Perron data of the weighted skeleton at `T`.
#[derive(Debug, Clone, Serialize)]
pub struct PressureEval {
    pub t: Vec<f64>,
    pub q: f64,
    /// Right and left Perron vectors over skeleton vertices (max-normalized,
    /// zero off the dominant component).
    #[serde(skip)]
    pub right: Vec<f64>,
    #[serde(skip)]
    pub left: Vec<f64>,
    /// Relative Collatz–Wielandt gap `(λ_hi − λ_lo)/λ_hi` at exit.
    pub residual: f64,
    pub iterations: usize,
    /// More than one recurrent component: `q` is their maximum and the
    /// equilibrium measure need not be unique.
    pub reducible: bool,
    #[serde(skip)]
    component: usize,
    #[serde(skip)]
    log_scale: f64,
    #[serde(skip)]
    scaled_lambda: f64,
}

/// Pressure machinery bound to one skeleton potential.
#[derive(Debug, Clone)]
pub struct PressureEngine {
    sp: SkeletonPotential,
    comps: Vec<Component>,
    pub tol: f64,
    pub max_iter: usize,
}

impl PressureEngine {
    pub fn new(sft: &Sft, p: &TablePotential) -> Result<Self> {
        Ok(Self::from_skeleton(SkeletonPotential::new(sft, p)?))
    }

    pub fn from_skeleton(sp: SkeletonPotential) -> Self {
        let comps = components(&sp.skeleton);
        PressureEngine {
            sp,
            comps,
            tol: POWER_TOL,
            max_iter: POWER_MAX_ITER,
        }
    }

    pub fn skeleton_potential(&self) -> &SkeletonPotential {
        &self.sp
    }

    pub fn dim(&self) -> usize {
        self.sp.dim()
    }

    pub fn pressure(&self, t: &[f64]) -> Result<PressureEval> {
        self.pressure_from(t, None)
    }

    /// Like [`pressure`](Self::pressure), starting power iteration from the
    /// Perron vectors of a nearby evaluation.
    pub fn pressure_from(&self, t: &[f64], hint: Option<&PressureEval>) -> Result<PressureEval> {
        let ws = self.sp.weighted(t)?;
        perron(&ws, &self.comps, self.tol, self.max_iter, hint)
    }

    /// `Q(T)` and `∇Q(T) = rv(μ_T)`.
    pub fn gradient(&self, t: &[f64]) -> Result<(PressureEval, Vec<f64>)> {
        self.gradient_from(t, None)
    }

    pub fn gradient_from(&self, t: &[f64], hint: Option<&PressureEval>) -> Result<(PressureEval, Vec<f64>)> {
        let ws = self.sp.weighted(t)?;
        let pe = perron(&ws, &self.comps, self.tol, self.max_iter, hint)?;
        let g = gibbs_rotation(&ws, &self.comps[pe.component], &pe);
        Ok((pe, g))
    }

    /// Central differences of the exact gradient, symmetrized.
    pub fn hessian(&self, t: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.hessian_from(t, None)
    }

    pub fn hessian_from(&self, t: &[f64], hint: Option<&PressureEval>) -> Result<Vec<Vec<f64>>> {
        let m = t.len();
        let h = fd_step(t);
        let cols: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let mut tp = t.to_vec();
                let mut tm = t.to_vec();
                tp[j] += h;
                tm[j] -= h;
                let gp = self.gradient_from(&tp, hint)?.1;
                let gm = self.gradient_from(&tm, hint)?.1;
                Ok(gp.iter().zip(&gm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
            })
            .collect::<Result<_>>()?;
        let mut hm = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in 0..m {
                hm[i][j] = 0.5 * (cols[j][i] + cols[i][j]);
            }
        }
        Ok(hm)
    }

    /// Central-difference gradient of `Q` itself, for cross-checks.
    pub fn fd_gradient(&self, t: &[f64], h: f64) -> Result<Vec<f64>> {
        (0..t.len())
            .map(|j| {
                let mut tp = t.to_vec();
                let mut tm = t.to_vec();
                tp[j] += h;
                tm[j] -= h;
                Ok((self.pressure(&tp)?.q - self.pressure(&tm)?.q) / (2.0 * h))
            })
            .collect()
    }
}

/// Hessian step `max(1e-4, 1e-4·‖T‖)`.
pub fn fd_step(t: &[f64]) -> f64 {
    let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
    (1e-4f64).max(1e-4 * norm)
}

/// Log-Perron eigenvalue of a weighted skeleton.
pub fn pressure(ws: &WeightedSkeleton) -> Result<PressureEval> {
    let comps = components(ws.skeleton());
    perron(ws, &comps, POWER_TOL, POWER_MAX_ITER, None)
}

/// `rv(μ_T)` from the Gibbs edge measure of a pressure evaluation.
pub fn grad_pressure(ws: &WeightedSkeleton, pe: &PressureEval) -> Vec<f64> {
    let comps = components(ws.skeleton());
    gibbs_rotation(ws, &comps[pe.component], pe)
}

pub fn hessian_pressure(engine: &PressureEngine, t: &[f64]) -> Result<Vec<Vec<f64>>> {
    engine.hessian(t)
}

fn perron(
    ws: &WeightedSkeleton,
    comps: &[Component],
    tol: f64,
    max_iter: usize,
    hint: Option<&PressureEval>,
) -> Result<PressureEval> {
    if comps.is_empty() {
        return Err(Error::BadSpec("skeleton has no cycles".into()));
    }
    let mut best: Option<PressureEval> = None;
    for (ci, c) in comps.iter().enumerate() {
        let start = hint.filter(|h| h.component == ci && h.right.len() == ws.skeleton().vertex_count()).map(|h| {
            let pick = |v: &[f64]| -> Vec<f64> {
                c.vertices.iter().map(|&u| if v[u] > 0.0 { v[u] } else { 1.0 }).collect()
            };
            (pick(&h.right), pick(&h.left))
        });
        let pe = perron_component(ws, c, ci, tol, max_iter, start)?;
        if best.as_ref().map_or(true, |b| pe.q > b.q) {
            best = Some(pe);
        }
    }
    let mut pe = best.expect("at least one component");
    pe.reducible = comps.len() > 1;
    Ok(pe)
}

fn perron_component(
    ws: &WeightedSkeleton,
    c: &Component,
    ci: usize,
    tol: f64,
    max_iter: usize,
    start: Option<(Vec<f64>, Vec<f64>)>,
) -> Result<PressureEval> {
    let n = c.len();
    let log_scale = c
        .edges
        .iter()
        .map(|&(_, _, e)| ws.log_weight[e])
        .fold(f64::NEG_INFINITY, f64::max);
    if !log_scale.is_finite() {
        return Err(Error::BadSpec("non-finite edge weight".into()));
    }
    let wt: Vec<f64> = c
        .edges
        .iter()
        .map(|&(_, _, e)| (ws.log_weight[e] - log_scale).exp())
        .collect();
    let shift = if c.period > 1 {
        wt.iter().sum::<f64>() / n as f64
    } else {
        0.0
    };
    let parallel = c.edges.len() > 50_000;

    let right_step = |sigma: f64| {
        let (wt, c) = (&wt, c);
        move |r: &[f64], y: &mut [f64]| {
            let f = |u: usize| -> f64 {
                let mut s = sigma * r[u];
                for i in c.out_offsets[u]..c.out_offsets[u + 1] {
                    s += wt[i] * r[c.edges[i].1];
                }
                s
            };
            if parallel {
                y.par_iter_mut().enumerate().for_each(|(u, yu)| *yu = f(u));
            } else {
                y.iter_mut().enumerate().for_each(|(u, yu)| *yu = f(u));
            }
        }
    };
    let left_step = |sigma: f64| {
        let (wt, c) = (&wt, c);
        move |l: &[f64], y: &mut [f64]| {
            let f = |v: usize| -> f64 {
                let mut s = sigma * l[v];
                for &i in &c.in_index[c.in_offsets[v]..c.in_offsets[v + 1]] {
                    s += l[c.edges[i].0] * wt[i];
                }
                s
            };
            if parallel {
                y.par_iter_mut().enumerate().for_each(|(v, yv)| *yv = f(v));
            } else {
                y.iter_mut().enumerate().for_each(|(v, yv)| *yv = f(v));
            }
        }
    };

    let small = n <= DENSE_LIMIT;
    let first = if small { max_iter.min(2000) } else { max_iter };
    let (r_init, l_init) = start.unwrap_or_else(|| (vec![1.0; n], vec![1.0; n]));
    let mut right = power(r_init, &right_step(shift), tol, first)?;
    let mut left = power(l_init, &left_step(shift), tol, first)?;
    let mut sigma = shift;
    if small && (right.gap > tol || left.gap > tol) {
        // A component can be aperiodic and still have a second eigenvalue
        // within rounding of -λ. Shifting by an upper bound on λ separates
        // them; twice the bracket midpoint is such a bound.
        let bound = 2.0 * right.lambda.max(left.lambda) - shift;
        let s2 = shift + if bound > 0.0 { bound } else { wt.iter().sum::<f64>() / n as f64 };
        let (r0, l0) = dense_limit(&dense_matrix(c, &wt, s2), n);
        let r2 = power(r0, &right_step(s2), tol, 1000)?;
        let l2 = power(l0, &left_step(s2), tol, 1000)?;
        if r2.gap.max(l2.gap) < right.gap.max(left.gap) {
            right = r2;
            left = l2;
            sigma = s2;
        }
    }
    for side in [&right, &left] {
        if side.gap > tol.max(NOISE_FLOOR) {
            return Err(Error::NoConvergence {
                iterations: side.iterations,
                residual: side.gap,
            });
        }
    }
    let (r, lam_r, res_r, it_r) = (right.x, right.lambda, right.gap, right.iterations);
    let (l, lam_l, res_l, it_l) = (left.x, left.lambda, left.gap, left.iterations);
    let lam = 0.5 * (lam_r + lam_l) - sigma;
    if !(lam > 0.0) {
        return Err(Error::NoConvergence {
            iterations: it_r.max(it_l),
            residual: f64::NAN,
        });
    }
    let nv = ws.skeleton().vertex_count();
    let mut right = vec![0.0; nv];
    let mut left = vec![0.0; nv];
    for (i, &v) in c.vertices.iter().enumerate() {
        right[v] = r[i];
        left[v] = l[i];
    }
    Ok(PressureEval {
        t: ws.t.clone(),
        q: lam.ln() + log_scale,
        right,
        left,
        residual: res_r.max(res_l),
        iterations: it_r.max(it_l),
        reducible: false,
        component: ci,
        log_scale,
        scaled_lambda: lam,
    })
}

/// Largest component handled by the dense squaring fallback.
const DENSE_LIMIT: usize = 128;
/// Gap accepted when power iteration stagnates at rounding level.
const NOISE_FLOOR: f64 = 1e-10;
/// Iterations without a new best gap before stagnation is declared.
const STALL_WINDOW: usize = 500;

struct PowerOutcome {
    x: Vec<f64>,
    lambda: f64,
    gap: f64,
    iterations: usize,
}

/// Power iteration stopped by the Collatz–Wielandt bracket, by stagnation,
/// or by the iteration cap. The caller judges the final gap.
fn power<F>(init: Vec<f64>, step: &F, tol: f64, max_iter: usize) -> Result<PowerOutcome>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = init.len();
    let mut x = init;
    let mut y = vec![0.0; n];
    let mut best = PowerOutcome {
        x: x.clone(),
        lambda: f64::NAN,
        gap: f64::INFINITY,
        iterations: 0,
    };
    let mut last_best = 0;
    for it in 1..=max_iter {
        step(&x, &mut y);
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        let mut top: f64 = 0.0;
        for (a, b) in x.iter().zip(&y) {
            let ratio = b / a;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            top = top.max(*b);
        }
        if !(top > 0.0 && top.is_finite()) {
            return Err(Error::NoConvergence {
                iterations: it,
                residual: f64::NAN,
            });
        }
        let gap = (hi - lo) / hi;
        for (a, b) in x.iter_mut().zip(&y) {
            // Keep entries strictly positive so the bracket stays defined.
            *a = (b / top).max(f64::MIN_POSITIVE);
        }
        if gap < best.gap {
            best = PowerOutcome {
                x: x.clone(),
                lambda: 0.5 * (lo + hi),
                gap,
                iterations: it,
            };
            last_best = it;
        }
        if gap <= tol || it - last_best > STALL_WINDOW {
            break;
        }
    }
    Ok(best)
}

/// Dense `M + σI` (row = source) for small components.
fn dense_matrix(c: &Component, wt: &[f64], shift: f64) -> Vec<f64> {
    let n = c.len();
    let mut m = vec![0.0; n * n];
    for (i, &(s, t, _)) in c.edges.iter().enumerate() {
        m[s * n + t] += wt[i];
    }
    for i in 0..n {
        m[i * n + i] += shift;
    }
    m
}

/// Right and left Perron directions from `M^(2^j)`, renormalized after each
/// squaring. Converges when the spectral gap is too small for power
/// iteration to resolve.
fn dense_limit(m: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut p = m.to_vec();
    let mut prev: Option<Vec<f64>> = None;
    for _ in 0..64 {
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = p[i * n + k];
                if a != 0.0 {
                    for j in 0..n {
                        q[i * n + j] += a * p[k * n + j];
                    }
                }
            }
        }
        let top = q.iter().copied().fold(0.0, f64::max);
        if !(top > 0.0 && top.is_finite()) {
            break;
        }
        q.iter_mut().for_each(|x| *x /= top);
        p = q;
        let r: Vec<f64> = (0..n).map(|i| p[i * n..(i + 1) * n].iter().sum()).collect();
        let rt = r.iter().copied().fold(0.0, f64::max);
        let r: Vec<f64> = r.iter().map(|x| x / rt).collect();
        let settled = prev
            .as_ref()
            .map_or(false, |old| old.iter().zip(&r).all(|(a, b)| (a - b).abs() <= 1e-15 * a.abs().max(*b)));
        prev = Some(r);
        if settled {
            break;
        }
    }
    let right: Vec<f64> = (0..n).map(|i| p[i * n..(i + 1) * n].iter().sum::<f64>()).collect();
    let left: Vec<f64> = (0..n).map(|j| (0..n).map(|i| p[i * n + j]).sum::<f64>()).collect();
    let norm = |v: Vec<f64>| {
        let t = v.iter().copied().fold(0.0, f64::max);
        v.into_iter().map(|x| (x / t).max(f64::MIN_POSITIVE)).collect::<Vec<_>>()
    };
    (norm(right), norm(left))
}

fn gibbs_rotation(ws: &WeightedSkeleton, c: &Component, pe: &PressureEval) -> Vec<f64> {
    let m = ws.base.dim();
    let mut acc = vec![0.0; m];
    let mut norm = 0.0;
    for &(s, t, e) in &c.edges {
        let mu = pe.left[c.vertices[s]]
            * (ws.log_weight[e] - pe.log_scale).exp()
            * pe.right[c.vertices[t]];
        norm += mu;
        for (a, b) in acc.iter_mut().zip(ws.base.phi(e)) {
            *a += mu * b;
        }
    }
    // Σ_e μ(e) equals λ·ℓᵀr, so normalizing by it is the Gibbs measure.
    let _ = pe.scaled_lambda;
    acc.into_iter().map(|a| a / norm).collect()
}

/// Answer to an entropy query `H(w)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumSolution {
    pub w: Vec<f64>,
    pub t_star: Vec<f64>,
    pub q_star: f64,
    pub rv: Vec<f64>,
    pub h: f64,
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm: f64,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Stop when `‖∇Q(T) − w‖₂` falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Cap on `‖ΔT‖₂` per Newton step.
    pub trust: f64,
    /// Minimal signed distance of `w` to the polytope boundary.
    pub margin: f64,
    pub t0: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-11,
            max_iter: 200,
            trust: 10.0,
            margin: 1e-9,
            t0: None,
        }
    }
}

/// Newton solver for `∇Q(T) = w` with the rotation polytope cached for the
/// interior test.
#[derive(Debug, Clone)]
pub struct RotationSolver {
    pub engine: PressureEngine,
    pub polytope: RotationPolytope,
}

impl RotationSolver {
    /// Builds the skeleton and the polytope (exact, or certified support
    /// sandwich if there are too many cycles).
    pub fn new(sft: &Sft, p: &TablePotential) -> Result<Self> {
        let engine = PressureEngine::new(sft, p)?;
        let polytope = match rotgeom::polytope_from_cycles(
            engine.skeleton_potential(),
            PolytopeOptions::default().cycle_cap,
        ) {
            Err(Error::CycleBudgetExceeded { .. }) => {
                rotgeom::polytope_from_support(engine.skeleton_potential(), 64)?
            }
            other => other?,
        };
        Ok(RotationSolver { engine, polytope })
    }

    pub fn with_polytope(engine: PressureEngine, polytope: RotationPolytope) -> Self {
        RotationSolver { engine, polytope }
    }

    pub fn solve(&self, w: &[f64], opts: &SolveOptions) -> Result<EquilibriumSolution> {
        let m = self.engine.dim();
        if w.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: w.len(),
            });
        }
        let margin = self.polytope.interior_margin(w);
        if !(margin > opts.margin) {
            return Err(Error::NotInterior { distance: margin });
        }
        newton(&self.engine, w, opts)
    }
}

/// `H(w)` for a single target.
pub fn solve_rotation(sft: &Sft, p: &TablePotential, w: &[f64]) -> Result<EquilibriumSolution> {
    RotationSolver::new(sft, p)?.solve(w, &SolveOptions::default())
}

/// Accepted Newton steps without halving the residual before a result at the
/// noise floor is returned.
const NOISE_PATIENCE: usize = 8;

fn residual(g: &[f64], w: &[f64]) -> f64 {
    g.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Damped Newton on `F(T) = ∇Q(T) − w`, stopped on `‖F‖₂`, with Armijo
/// backtracking and a trust cap on the step.
pub fn newton(engine: &PressureEngine, w: &[f64], opts: &SolveOptions) -> Result<EquilibriumSolution> {
    let m = w.len();
    let mut t = opts.t0.clone().unwrap_or_else(|| vec![0.0; m]);
    let (mut pe, mut g) = engine.gradient(&t)?;
    let mut res = residual(&g, w);
    let mut best = (res, t.clone());
    let mut last_step = 0.0;
    let mut idle = 0;
    let finish = |t: Vec<f64>, pe: &PressureEval, g: Vec<f64>, res: f64, it: usize, converged: bool| {
        let h = pe.q - dot(&t, w);
        EquilibriumSolution {
            w: w.to_vec(),
            q_star: pe.q,
            t_star: t,
            rv: g,
            h,
            iterations: it,
            converged,
            grad_norm: res,
        }
    };
    for it in 0..opts.max_iter {
        if res <= opts.tol {
            return Ok(finish(t, &pe, g, res, it, true));
        }
        let hess = engine.hessian_from(&t, Some(&pe))?;
        let rhs: Vec<f64> = g.iter().zip(w).map(|(a, b)| b - a).collect();
        let mut step = solve_spd(&hess, &rhs);
        let norm = step.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > opts.trust {
            step.iter_mut().for_each(|x| *x *= opts.trust / norm);
        }
        // The dual objective f(T) = Q(T) − T·w is convex with gradient F, so
        // sufficient decrease of f keeps the iteration out of the flat
        // regions a residual-only rule can jump into. Near the noise floor f
        // stops resolving progress and residual decrease takes over.
        let f = pe.q - dot(&t, w);
        let slope: f64 = g.iter().zip(w).zip(&step).map(|((a, b), d)| (a - b) * d).sum();
        let noise = 1e-14 * (1.0 + f.abs());
        let mut s = 1.0;
        let mut accepted = None;
        while s >= 1.0 / (1u64 << 30) as f64 {
            let cand: Vec<f64> = t.iter().zip(&step).map(|(a, b)| a + s * b).collect();
            if let Ok((pe2, g2)) = engine.gradient_from(&cand, Some(&pe)) {
                let r2 = residual(&g2, w);
                let f2 = pe2.q - dot(&cand, w);
                let dual_ok = f2 <= f + 1e-4 * s * slope && f2 < f;
                let res_ok = r2 <= (1.0 - 1e-4 * s) * res && f2 <= f + noise;
                if dual_ok || res_ok {
                    accepted = Some((cand, pe2, g2, r2));
                    break;
                }
            }
            s *= 0.5;
        }
        match accepted {
            Some((cand, pe2, g2, r2)) => {
                last_step = s * step.iter().map(|x| x * x).sum::<f64>().sqrt();
                t = cand;
                pe = pe2;
                g = g2;
                res = r2;
                if res < 0.5 * best.0 {
                    idle = 0;
                } else {
                    idle += 1;
                }
                if res < best.0 {
                    best = (res, t.clone());
                }
                // Accepted steps that no longer shrink the residual mean the
                // gradient itself is only resolved to this level.
                if idle >= NOISE_PATIENCE && res <= 100.0 * opts.tol {
                    return Ok(finish(t, &pe, g, res, it + 1, true));
                }
            }
            None => {
                // At the floating-point noise floor no descent is possible.
                if res <= 100.0 * opts.tol {
                    return Ok(finish(t, &pe, g, res, it, true));
                }
                return Err(Error::NewtonStalled {
                    iterations: it,
                    residual: res,
                    last_step,
                    best_t: best.1,
                });
            }
        }
    }
    if res <= opts.tol {
        return Ok(finish(t, &pe, g, res, opts.max_iter, true));
    }
    Err(Error::NewtonStalled {
        iterations: opts.max_iter,
        residual: res,
        last_step,
        best_t: best.1,
    })
}

/// Solves `H x = b` for symmetric `H`, raising eigenvalues to a floor. Far
/// out in a saturated direction the finite-difference Hessian is pure noise,
/// and the floor turns the step into steepest descent on the residual.
fn solve_spd(h: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let m = b.len();
    let eig = SymmetricEigen::new(DMatrix::from_fn(m, m, |i, j| h[i][j]));
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let floor = (1e-12 * top).max(HESSIAN_FLOOR);
    let bv = DVector::from_column_slice(b);
    let mut x = DVector::zeros(m);
    for k in 0..m {
        let v = eig.eigenvectors.column(k);
        let lam = eig.eigenvalues[k].max(floor);
        x += v * (v.dot(&bv) / lam);
    }
    x.iter().copied().collect()
}

/// Curvature below this is indistinguishable from finite-difference noise.
const HESSIAN_FLOOR: f64 = 1e-9;

/// One grid point of an entropy profile.
#[derive(Debug, Clone, Serialize)]
pub struct ProfilePoint {
    pub w: Vec<f64>,
    pub solution: Option<EquilibriumSolution>,
    pub error: Option<String>,
}

/// Grid points per warm-started chunk.
pub const PROFILE_CHUNK: usize = 8;

/// `H` over a grid. Chunks run in parallel; inside a chunk each solve starts
/// from the previous converged `T*`, so the result does not depend on the
/// thread count.
pub fn entropy_profile(solver: &RotationSolver, grid: &[Vec<f64>], opts: &SolveOptions) -> Vec<ProfilePoint> {
    grid.par_chunks(PROFILE_CHUNK)
        .flat_map_iter(|chunk| {
            let mut warm: Option<Vec<f64>> = opts.t0.clone();
            let mut out = Vec::with_capacity(chunk.len());
            for w in chunk {
                let o = SolveOptions {
                    t0: warm.clone(),
                    ..opts.clone()
                };
                match solver.solve(w, &o) {
                    Ok(sol) => {
                        warm = Some(sol.t_star.clone());
                        out.push(ProfilePoint {
                            w: w.clone(),
                            solution: Some(sol),
                            error: None,
                        });
                    }
                    Err(e) => out.push(ProfilePoint {
                        w: w.clone(),
                        solution: None,
                        error: Some(format!("{}: {e}", e.kind())),
                    }),
                }
            }
            out
        })
        .collect()
}

/// Outcome of the strict-convexity test for `Q`.
#[derive(Debug, Clone, Serialize)]
pub struct InteriorVerdict {
    pub nonempty: bool,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    pub probes: Vec<Vec<f64>>,
    /// Unit eigenvector of the smallest Hessian eigenvalue when degenerate.
    pub null_direction: Option<Vec<f64>>,
}

/// Origin plus `±e_i`.
pub fn default_probes(m: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; m]];
    for i in 0..m {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; m];
            v[i] = s;
            out.push(v);
        }
    }
    out
}

/// The rotation set has interior iff `Q` is strictly convex, i.e. no
/// nontrivial combination of the components is cohomologous to a constant.
pub fn interior_probe(engine: &PressureEngine, probes: &[Vec<f64>]) -> Result<InteriorVerdict> {
    let m = engine.dim();
    let probes: Vec<Vec<f64>> = if probes.is_empty() {
        default_probes(m)
    } else {
        probes.to_vec()
    };
    // Hessian eigenvalues scale with the square of the potential's spread.
    let spread = engine
        .skeleton_potential()
        .skeleton
        .edge_count()
        .checked_sub(0)
        .map(|ne| {
            let sp = engine.skeleton_potential();
            (0..m)
                .map(|i| {
                    let (lo, hi) = (0..ne).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
                        (lo.min(sp.phi(e)[i]), hi.max(sp.phi(e)[i]))
                    });
                    hi - lo
                })
                .fold(0.0, f64::max)
        })
        .unwrap_or(0.0);
    let mut min_eig = f64::INFINITY;
    let mut max_eig: f64 = 0.0;
    let mut null = None;
    for t in &probes {
        let h = engine.hessian(t)?;
        let mat = DMatrix::from_fn(m, m, |i, j| h[i][j]);
        let eig = SymmetricEigen::new(mat);
        let (k, &lam) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("m ≥ 1");
        max_eig = eig.eigenvalues.iter().fold(max_eig, |a, &x| a.max(x));
        if lam < min_eig {
            min_eig = lam;
            let v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            null = Some(normalize_sign(v));
        }
    }
    let tolerance = (1e-6 * max_eig.max(spread * spread)).max(1e-9);
    let nonempty = min_eig > tolerance;
    Ok(InteriorVerdict {
        nonempty,
        min_eigenvalue: min_eig,
        tolerance,
        probes,
        null_direction: if nonempty { None } else { null },
    })
}

/// Unit vector with its largest-magnitude entry positive.
fn normalize_sign(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let big = v
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    let s = if big < 0.0 { -1.0 } else { 1.0 } / n;
    v.iter_mut().for_each(|x| *x *= s);
    v
}

/// `C_R = { ∇Q(T) : ‖T‖₂ = R }`, sampled uniformly in angle (deterministic
/// quasi-uniform directions for m ≥ 3).
pub fn level_curve(engine: &PressureEngine, r: f64, samples: usize) -> Result<Vec<Vec<f64>>> {
    let m = engine.dim();
    if r == 0.0 {
        return Ok(vec![engine.gradient(&vec![0.0; m])?.1]);
    }
    let dirs = direction_grid(m, samples.max(2));
    dirs.par_iter()
        .map(|u| {
            let t: Vec<f64> = u.iter().map(|x| r * x).collect();
            Ok(engine.gradient(&t)?.1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::edge_weights;

    fn scalar() -> (Sft, TablePotential) {
        let full = Sft::full(2);
        let t = TablePotential::per_symbol(&full, &[vec![0.0], vec![1.0]]).unwrap();
        (full, t)
    }

    fn binary_entropy(w: f64) -> f64 {
        -w * w.ln() - (1.0 - w) * (1.0 - w).ln()
    }

    #[test]
    fn pressure_examples() {
        for d in 1..5 {
            let s = Sft::full(d);
            let t = TablePotential::per_symbol(&s, &vec![vec![0.0]; d]).unwrap();
            let e = PressureEngine::new(&s, &t).unwrap();
            assert!((e.pressure(&[0.0]).unwrap().q - (d as f64).ln()).abs() < 1e-14);
        }
        let (s, t) = scalar();
        let e = PressureEngine::new(&s, &t).unwrap();
        for x in [-20.0, -3.0, 0.0, 0.5, 7.0, 20.0] {
            let q = e.pressure(&[x]).unwrap().q;
            assert!((q - (1.0 + f64::exp(x)).ln()).abs() < 1e-12, "t={x}");
        }
        let gm = Sft::golden_mean();
        let t = TablePotential::per_symbol(&gm, &[vec![0.0], vec![1.0]]).unwrap();
        let e = PressureEngine::new(&gm, &t).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((e.pressure(&[0.0]).unwrap().q - phi.ln()).abs() < 1e-13);
        let (_, g) = e.gradient(&[0.0]).unwrap();
        assert!((g[0] - 1.0 / (phi + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn free_functions_agree_with_engine() {
        let (s, t) = scalar();
        let sk = s.k_block(1).unwrap();
        let ws = edge_weights(&t, &sk, &[0.3]).unwrap();
        let pe = pressure(&ws).unwrap();
        let g = grad_pressure(&ws, &pe);
        assert!((g[0] - 0.3f64.exp() / (1.0 + 0.3f64.exp())).abs() < 1e-13);
    }

    #[test]
    fn periodic_skeleton_converges() {
        let swap = crate::sft::make_sft(2, &crate::sft::Transitions::Matrix(vec![vec![0, 1], vec![1, 0]])).unwrap();
        let t = TablePotential::per_symbol(&swap, &[vec![0.0], vec![1.0]]).unwrap();
        let e = PressureEngine::new(&swap, &t).unwrap();
        let pe = e.pressure(&[2.0]).unwrap();
        // Only the 2-cycle 01: Q(t) = t/2.
        assert!((pe.q - 1.0).abs() < 1e-12);
        assert!(!pe.reducible);
    }

    #[test]
    fn hessian_examples() {
        let (s, t) = scalar();
        let e = PressureEngine::new(&s, &t).unwrap();
        assert!((e.hessian(&[0.0]).unwrap()[0][0] - 0.25).abs() < 1e-8);
        let c = TablePotential::per_symbol(&s, &[vec![2.0], vec![2.0]]).unwrap();
        let e = PressureEngine::new(&s, &c).unwrap();
        assert!(e.hessian(&[0.7]).unwrap()[0][0].abs() < 1e-9);
    }

    #[test]
    fn solve_examples() {
        let (s, t) = scalar();
        let sol = solve_rotation(&s, &t, &[0.5]).unwrap();
        assert!(sol.t_star[0].abs() < 1e-10);
        assert!((sol.h - 2f64.ln()).abs() < 1e-12);
        let sol = solve_rotation(&s, &t, &[0.9]).unwrap();
        assert!((sol.t_star[0] - 9f64.ln()).abs() < 1e-8);
        assert!((sol.h - binary_entropy(0.9)).abs() < 1e-10);
        let sol = solve_rotation(&s, &t, &[0.999]).unwrap();
        assert!((sol.h - binary_entropy(0.999)).abs() < 1e-8);
        assert!(matches!(
            solve_rotation(&s, &t, &[1.0]),
            Err(Error::NotInterior { .. })
        ));
    }

    #[test]
    fn interior_examples() {
        let s = Sft::full(2);
        let deg = TablePotential::per_symbol(&s, &[vec![0.0, 0.5], vec![1.0, 1.5]]).unwrap();
        let e = PressureEngine::new(&s, &deg).unwrap();
        let v = interior_probe(&e, &[]).unwrap();
        assert!(!v.nonempty);
        let n = v.null_direction.unwrap();
        assert!((n[0] + n[1]).abs() < 1e-6);
        let sum1 = TablePotential::per_symbol(&s, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let e = PressureEngine::new(&s, &sum1).unwrap();
        let v = interior_probe(&e, &[]).unwrap();
        assert!(!v.nonempty);
        let n = v.null_direction.unwrap();
        assert!((n[0] - n[1]).abs() < 1e-6);
        let gen = TablePotential::from_fn(&s, 2, 2, |w| vec![w[0] as f64, (w[0] * w[1]) as f64]).unwrap();
        let e = PressureEngine::new(&s, &gen).unwrap();
        assert!(interior_probe(&e, &[]).unwrap().nonempty);
    }

    #[test]
    fn level_curve_examples() {
        let (s, t) = scalar();
        let e = PressureEngine::new(&s, &t).unwrap();
        assert_eq!(e.gradient(&[0.0]).unwrap().1, level_curve(&e, 0.0, 8).unwrap()[0]);
        let c = level_curve(&e, 3.0, 2).unwrap();
        let x = 3f64.exp() / (1.0 + 3f64.exp());
        assert!((c[0][0] - x).abs() < 1e-12);
        assert!((c[1][0] - (1.0 - x)).abs() < 1e-12);
    }

    #[test]
    fn profile_is_deterministic_and_matches() {
        let (s, t) = scalar();
        let solver = RotationSolver::new(&s, &t).unwrap();
        let grid: Vec<Vec<f64>> = (1..20).map(|i| vec![i as f64 / 20.0]).collect();
        let a = entropy_profile(&solver, &grid, &SolveOptions::default());
        for p in &a {
            let sol = p.solution.as_ref().unwrap();
            assert!((sol.h - binary_entropy(p.w[0])).abs() < 1e-9);
        }
    }
}
