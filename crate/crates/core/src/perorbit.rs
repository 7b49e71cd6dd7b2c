//! Periodic-orbit counts: totals by trace, rotation-vector censuses, ball
//! counts, and growth-rate estimates for periodic orbits and for words.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::{SkeletonPotential, TablePotential};
use crate::sft::{presentation_depth, Sft};

/// Fixed points of `σⁿ`: `trace(Aⁿ)`, exact.
pub fn per_count(sft: &Sft, n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::BadSpec("period must be at least 1".into()));
    }
    let p = sft.matrix_power(n);
    Ok((0..sft.alphabet()).map(|i| p[i][i].clone()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    Auto,
    Enumerate,
    Dp,
}

#[derive(Debug, Clone)]
pub struct CountOptions {
    pub mode: CountMode,
    /// Grid step for the DP engine. `None` picks the coarsest `1/L`,
    /// `L ≤ 64`, on which every value lies, falling back to `1/64`.
    pub q: Option<f64>,
    /// Cap on `n · dⁿ` for enumeration.
    pub enum_budget: u128,
    /// Cap on DP cell updates.
    pub dp_budget: u128,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            mode: CountMode::Auto,
            q: None,
            enum_budget: 100_000_000,
            dp_budget: 2_000_000_000,
        }
    }
}

/// Rotation-vector histogram of the fixed points of `σⁿ`.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitCensus {
    pub n: usize,
    /// `trace(Aⁿ)` as a decimal string.
    pub total: String,
    pub q: f64,
    pub mode: CountMode,
    /// Grid cell (in units of `q`) to count.
    #[serde(serialize_with = "serialize_bins")]
    pub bins: BTreeMap<Vec<i64>, u128>,
    /// Largest per-axis distance between a true orbit mean and `q·(S/n)`;
    /// zero in enumeration mode and on-grid DP.
    pub delta: f64,
}

fn serialize_bins<S: serde::Serializer>(b: &BTreeMap<Vec<i64>, u128>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(b.len()))?;
    for (k, v) in b {
        seq.serialize_element(&(k, v.to_string()))?;
    }
    seq.end()
}

impl OrbitCensus {
    pub fn bin_sum(&self) -> u128 {
        self.bins.values().sum()
    }

    /// Cell center `q·idx`.
    pub fn center(&self, idx: &[i64]) -> Vec<f64> {
        idx.iter().map(|&i| i as f64 * self.q).collect()
    }
}

/// Two-sided count; `lower == upper` when exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountBracket {
    pub lower: u128,
    pub upper: u128,
}

impl CountBracket {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

fn checked(a: u128, b: u128) -> Result<u128> {
    a.checked_add(b).ok_or(Error::Overflow("orbit count"))
}

fn pow_u128(d: usize, n: usize) -> u128 {
    (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
}

/// Coarsest grid `1/L` (`L ≤ 64`) holding every value, if any.
pub fn natural_grid(t: &TablePotential) -> Option<f64> {
    (1..=64u32).map(f64::from).find_map(|l| {
        let ok = t
            .entries()
            .all(|(_, v)| v.iter().all(|x| ((x * l) - (x * l).round()).abs() <= 1e-9));
        ok.then_some(1.0 / l)
    })
}

/// Skeleton with integer edge values `round(Φ/q)`.
struct Lattice {
    sp: SkeletonPotential,
    a: Vec<Vec<i64>>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    delta: f64,
    /// In-edges by target.
    in_offsets: Vec<usize>,
    in_edges: Vec<usize>,
}

impl Lattice {
    fn new(sft: &Sft, p: &TablePotential, q: f64) -> Result<Self> {
        if !(q > 0.0) {
            return Err(Error::BadSpec("quantization step must be positive".into()));
        }
        let sp = SkeletonPotential::new(sft, p)?;
        let sk = &sp.skeleton;
        let m = sp.dim();
        let mut delta: f64 = 0.0;
        let a: Vec<Vec<i64>> = (0..sk.edge_count())
            .map(|e| {
                sp.phi(e)
                    .iter()
                    .map(|x| {
                        let r = (x / q).round();
                        let err = (x - r * q).abs();
                        // Grid values are snapped exactly.
                        if err > 1e-9 * q.max(x.abs()) {
                            delta = delta.max(err);
                        }
                        r as i64
                    })
                    .collect()
            })
            .collect();
        let mut lo = vec![i64::MAX; m];
        let mut hi = vec![i64::MIN; m];
        for v in &a {
            for i in 0..m {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        let nv = sk.vertex_count();
        let mut in_offsets = vec![0usize; nv + 1];
        for e in 0..sk.edge_count() {
            in_offsets[sk.tgt(e) + 1] += 1;
        }
        for v in 0..nv {
            in_offsets[v + 1] += in_offsets[v];
        }
        let mut fill = in_offsets.clone();
        let mut in_edges = vec![0; sk.edge_count()];
        for e in 0..sk.edge_count() {
            let t = sk.tgt(e);
            in_edges[fill[t]] = e;
            fill[t] += 1;
        }
        Ok(Lattice {
            sp,
            a,
            lo,
            hi,
            delta,
            in_offsets,
            in_edges,
        })
    }

    fn m(&self) -> usize {
        self.lo.len()
    }

    /// Per-axis extents of sums of `n` edge values.
    fn extents(&self, n: usize) -> Vec<(i64, usize)> {
        (0..self.m())
            .map(|i| (self.lo[i] * n as i64, ((self.hi[i] - self.lo[i]) as usize) * n + 1))
            .collect()
    }

    fn cells(&self, n: usize) -> u128 {
        self.extents(n).iter().map(|&(_, w)| w as u128).product()
    }

    fn cost(&self, n: usize, closed: bool) -> u128 {
        let e = self.sp.skeleton.edge_count() as u128;
        let starts = if closed { self.sp.skeleton.vertex_count() as u128 } else { 1 };
        starts.saturating_mul(n as u128).saturating_mul(e).saturating_mul(self.cells(n))
    }

    /// Counts of `n`-edge walks by integer sum. Closed walks when `closed`,
    /// otherwise walks from every vertex.
    fn sums(&self, n: usize, closed: bool) -> Result<BTreeMap<Vec<i64>, u128>> {
        let sk = &self.sp.skeleton;
        let nv = sk.vertex_count();
        let ext = self.extents(n);
        let cells: usize = ext.iter().map(|&(_, w)| w).product();
        let m = self.m();
        // Cell offset of each edge value relative to the per-step minimum.
        let shift: Vec<usize> = self
            .a
            .iter()
            .map(|v| {
                let mut off = 0usize;
                let mut stride = 1usize;
                for i in 0..m {
                    off += (v[i] - self.lo[i]) as usize * stride;
                    stride *= ext[i].1;
                }
                off
            })
            .collect();
        // Cells are indexed by Σ(a − lo); after t steps the index is below t·span.
        let run = |starts: &[usize]| -> Result<Vec<u128>> {
            let mut cur = vec![0u128; nv * cells];
            for &s in starts {
                cur[s * cells] = 1;
            }
            for _ in 0..n {
                let mut next = vec![0u128; nv * cells];
                next.par_chunks_mut(cells)
                    .enumerate()
                    .try_for_each(|(v, out)| -> Result<()> {
                        for &e in &self.in_edges[self.in_offsets[v]..self.in_offsets[v + 1]] {
                            let src = &cur[sk.src(e) * cells..(sk.src(e) + 1) * cells];
                            let sh = shift[e];
                            for (c, &x) in src.iter().enumerate() {
                                if x != 0 {
                                    out[c + sh] = checked(out[c + sh], x)?;
                                }
                            }
                        }
                        Ok(())
                    })?;
                cur = next;
            }
            Ok(cur)
        };
        let decode = |mut c: usize| -> Vec<i64> {
            ext.iter()
                .map(|&(base, w)| {
                    let r = (c % w) as i64;
                    c /= w;
                    base + r
                })
                .collect()
        };
        let mut out: BTreeMap<Vec<i64>, u128> = BTreeMap::new();
        if closed {
            let parts: Vec<Vec<(usize, u128)>> = (0..nv)
                .into_par_iter()
                .map(|v| {
                    let layer = run(&[v])?;
                    Ok(layer[v * cells..(v + 1) * cells]
                        .iter()
                        .enumerate()
                        .filter(|(_, &x)| x != 0)
                        .map(|(c, &x)| (c, x))
                        .collect())
                })
                .collect::<Result<_>>()?;
            for part in parts {
                for (c, x) in part {
                    let slot = out.entry(decode(c)).or_insert(0);
                    *slot = checked(*slot, x)?;
                }
            }
        } else {
            let all: Vec<usize> = (0..nv).collect();
            let layer = run(&all)?;
            for v in 0..nv {
                for (c, &x) in layer[v * cells..(v + 1) * cells].iter().enumerate() {
                    if x != 0 {
                        let slot = out.entry(decode(c)).or_insert(0);
                        *slot = checked(*slot, x)?;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Visits every admissible word of length `n` (cyclically admissible when
/// `closed`) with its Birkhoff sum of `n` windows, wrapping when `closed`.
/// Open words have length `n + D − 1` with `D` the skeleton depth, so they
/// correspond one-to-one with `n`-edge skeleton paths.
fn enumerate<F, K>(sft: &Sft, p: &TablePotential, n: usize, closed: bool, classify: F) -> Result<BTreeMap<K, u128>>
where
    F: Fn(&[f64]) -> Option<K> + Sync,
    K: Ord + Send,
{
    let d = sft.alphabet();
    let k = p.depth();
    let m = p.dim();
    let len = if closed { n } else { n + presentation_depth(sft, k) - 1 };
    let visit = |first: u8| -> Result<BTreeMap<K, u128>> {
        let mut out = BTreeMap::new();
        let mut word = vec![first];
        let mut sums = vec![if k == 1 { p.value_of(&word)?.to_vec() } else { vec![0.0; m] }];
        let mut window = vec![0u8; k];
        rec(
            sft, p, n, len, closed, &classify, &mut word, &mut sums, &mut window, &mut out, d,
        )?;
        Ok(out)
    };
    let parts: Vec<BTreeMap<K, u128>> = (0..d as u8).into_par_iter().map(visit).collect::<Result<_>>()?;
    let mut out = BTreeMap::new();
    for part in parts {
        for (key, c) in part {
            let slot = out.entry(key).or_insert(0);
            *slot = checked(*slot, c)?;
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn rec<F, K>(
    sft: &Sft,
    p: &TablePotential,
    n: usize,
    len: usize,
    closed: bool,
    classify: &F,
    word: &mut Vec<u8>,
    sums: &mut Vec<Vec<f64>>,
    window: &mut [u8],
    out: &mut BTreeMap<K, u128>,
    d: usize,
) -> Result<()>
where
    F: Fn(&[f64]) -> Option<K>,
    K: Ord,
{
    let k = p.depth();
    // sums[j] holds the sum of the complete windows inside word[..j+1].
    if word.len() == len {
        let mut total = sums.last().expect("nonempty").clone();
        // Wrapping windows: those starting in the last k − 1 positions.
        if closed {
            if !sft.allowed(word[len - 1] as usize, word[0] as usize) {
                return Ok(());
            }
            for start in len.saturating_sub(k - 1)..len {
                for (i, w) in window.iter_mut().enumerate() {
                    *w = word[(start + i) % len];
                }
                for (t, v) in total.iter_mut().zip(p.value_of(window)?) {
                    *t += v;
                }
            }
        }
        if let Some(key) = classify(&total) {
            let slot = out.entry(key).or_insert(0);
            *slot = checked(*slot, 1)?;
        }
        return Ok(());
    }
    let last = *word.last().expect("nonempty") as usize;
    for s in 0..d {
        if !sft.allowed(last, s) {
            continue;
        }
        word.push(s as u8);
        let mut next = sums.last().expect("nonempty").clone();
        if word.len() >= k && word.len() - k < n {
            let v = p.value_of(&word[word.len() - k..])?;
            for (a, b) in next.iter_mut().zip(v) {
                *a += b;
            }
        }
        sums.push(next);
        rec(sft, p, n, len, closed, classify, word, sums, window, out, d)?;
        sums.pop();
        word.pop();
    }
    Ok(())
}

enum Engine {
    Enumerate,
    Dp(Lattice),
}

fn choose(sft: &Sft, p: &TablePotential, n: usize, closed: bool, q: f64, opts: &CountOptions) -> Result<Engine> {
    let d = sft.alphabet();
    let len = if closed { n } else { n + presentation_depth(sft, p.depth()) - 1 };
    let enum_cost = pow_u128(d, len).saturating_mul(len as u128);
    let enum_ok = enum_cost <= opts.enum_budget;
    let hint = |what: &str, required: u128, allowed: u128| Error::BudgetExceeded {
        required,
        allowed,
        hint: format!("{what}; try a smaller n or a coarser q (current q = {q})"),
    };
    match opts.mode {
        CountMode::Enumerate => {
            if enum_ok {
                Ok(Engine::Enumerate)
            } else {
                Err(hint("enumeration too large", enum_cost, opts.enum_budget))
            }
        }
        CountMode::Dp => {
            let lat = Lattice::new(sft, p, q)?;
            let cost = lat.cost(n, closed);
            if cost <= opts.dp_budget {
                Ok(Engine::Dp(lat))
            } else {
                Err(hint("dynamic program too large", cost, opts.dp_budget))
            }
        }
        CountMode::Auto => {
            let lat = Lattice::new(sft, p, q)?;
            let cost = lat.cost(n, closed);
            let dp_ok = cost <= opts.dp_budget;
            if dp_ok && lat.delta == 0.0 {
                Ok(Engine::Dp(lat))
            } else if enum_ok {
                Ok(Engine::Enumerate)
            } else if dp_ok {
                Ok(Engine::Dp(lat))
            } else {
                Err(hint("neither engine fits", cost.min(enum_cost), opts.dp_budget))
            }
        }
    }
}

fn grid(p: &TablePotential, opts: &CountOptions) -> f64 {
    opts.q.or_else(|| natural_grid(p)).unwrap_or(1.0 / 64.0)
}

/// Histogram of rotation vectors of the fixed points of `σⁿ` on the grid `q`.
pub fn census(sft: &Sft, p: &TablePotential, n: usize, q: f64, opts: &CountOptions) -> Result<OrbitCensus> {
    if n == 0 {
        return Err(Error::BadSpec("period must be at least 1".into()));
    }
    let total = per_count(sft, n)?;
    let engine = choose(sft, p, n, true, q, opts)?;
    let (mode, bins, delta) = match engine {
        Engine::Enumerate => {
            let bins = enumerate(sft, p, n, true, |s| {
                Some(s.iter().map(|x| (x / n as f64 / q).round() as i64).collect::<Vec<i64>>())
            })?;
            (CountMode::Enumerate, bins, 0.0)
        }
        Engine::Dp(lat) => {
            let sums = lat.sums(n, true)?;
            let mut bins = BTreeMap::new();
            for (s, c) in sums {
                let key: Vec<i64> = s.iter().map(|&x| (x as f64 / n as f64).round() as i64).collect();
                let slot = bins.entry(key).or_insert(0);
                *slot = checked(*slot, c)?;
            }
            (CountMode::Dp, bins, lat.delta)
        }
    };
    Ok(OrbitCensus {
        n,
        total: total.to_string(),
        q,
        mode,
        bins,
        delta,
    })
}

fn ball_from_sums(sums: &BTreeMap<Vec<i64>, u128>, q: f64, n: usize, w: &[f64], r: f64, slack: f64) -> Result<CountBracket> {
    let mut lower = 0u128;
    let mut upper = 0u128;
    for (s, &c) in sums {
        let d2: f64 = s
            .iter()
            .zip(w)
            .map(|(&x, y)| {
                let v = q * x as f64 / n as f64 - y;
                v * v
            })
            .sum();
        let dist = d2.sqrt();
        if dist < r - slack {
            lower = checked(lower, c)?;
        }
        if dist < r + slack {
            upper = checked(upper, c)?;
        }
    }
    Ok(CountBracket { lower, upper })
}

fn count_walks(
    sft: &Sft,
    p: &TablePotential,
    w: &[f64],
    r: f64,
    n: usize,
    closed: bool,
    opts: &CountOptions,
) -> Result<CountBracket> {
    if w.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: w.len(),
        });
    }
    if n == 0 {
        return Err(Error::BadSpec("length must be at least 1".into()));
    }
    let q = grid(p, opts);
    match choose(sft, p, n, closed, q, opts)? {
        Engine::Enumerate => {
            let c = enumerate(sft, p, n, closed, |s| {
                let d2: f64 = s.iter().zip(w).map(|(x, y)| (x / n as f64 - y).powi(2)).sum();
                (d2.sqrt() < r).then_some(())
            })?;
            let c = c.get(&()).copied().unwrap_or(0);
            Ok(CountBracket { lower: c, upper: c })
        }
        Engine::Dp(lat) => {
            let sums = lat.sums(n, closed)?;
            let slack = lat.delta * (lat.m() as f64).sqrt();
            ball_from_sums(&sums, q, n, w, r, slack)
        }
    }
}

/// Fixed points of `σⁿ` whose rotation vector lies in the open ball `D(w, r)`.
pub fn count_in_ball(
    sft: &Sft,
    p: &TablePotential,
    w: &[f64],
    r: f64,
    n: usize,
    opts: &CountOptions,
) -> Result<CountBracket> {
    count_walks(sft, p, w, r, n, true, opts)
}

/// Words whose `n`-term Birkhoff mean lies in `D(w, r)`.
pub fn count_words_in_ball(
    sft: &Sft,
    p: &TablePotential,
    w: &[f64],
    r: f64,
    n: usize,
    opts: &CountOptions,
) -> Result<CountBracket> {
    count_walks(sft, p, w, r, n, false, opts)
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthPoint {
    pub n: usize,
    pub count: u128,
    pub upper: u128,
    /// `(1/n) log count`, or `None` for a zero count.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthEstimate {
    pub values: Vec<GrowthPoint>,
    /// Least-squares slope of `log count` against `n` over the window.
    pub estimate: f64,
    /// Same slope using the upper bracket counts.
    pub estimate_upper: f64,
    pub window: (usize, usize),
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Slope fit over the upper half of `ns` using the positive counts there.
/// Fails with `EmptyCounts` when fewer than two of them are positive; a run
/// of single words fits slope 0.
pub fn growth_fit(points: Vec<GrowthPoint>) -> Result<GrowthEstimate> {
    if points.is_empty() {
        return Err(Error::EmptyCounts);
    }
    let start = points.len() / 2;
    let window: Vec<&GrowthPoint> = points[start..].iter().collect();
    let fit = |get: &dyn Fn(&GrowthPoint) -> u128| -> Option<(f64, f64)> {
        let pts: Vec<(f64, f64)> = window
            .iter()
            .filter(|p| get(p) > 0)
            .map(|p| (p.n as f64, (get(p) as f64).ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let res = (pts
            .iter()
            .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
            .sum::<f64>()
            / k)
            .sqrt();
        Some((slope, res))
    };
    let (estimate, residual) = fit(&|p| p.count).ok_or(Error::EmptyCounts)?;
    let estimate_upper = fit(&|p| p.upper).map_or(estimate, |f| f.0);
    let window = (window[0].n, window[window.len() - 1].n);
    Ok(GrowthEstimate {
        values: points,
        estimate,
        estimate_upper,
        window,
        residual,
    })
}

fn growth<F>(ns: &[usize], count: F) -> Result<GrowthEstimate>
where
    F: Fn(usize) -> Result<CountBracket>,
{
    let points = ns
        .iter()
        .map(|&n| {
            let c = count(n)?;
            Ok(GrowthPoint {
                n,
                count: c.lower,
                upper: c.upper,
                rate: (c.lower > 0).then(|| (c.lower as f64).ln() / n as f64),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    growth_fit(points)
}

/// Growth rate of periodic orbits with rotation vector in `D(w, r)`.
pub fn h_per(
    sft: &Sft,
    p: &TablePotential,
    w: &[f64],
    r: f64,
    ns: &[usize],
    opts: &CountOptions,
) -> Result<GrowthEstimate> {
    growth(ns, |n| count_in_ball(sft, p, w, r, n, opts))
}

/// Growth rate of words (`n`-cylinders) with Birkhoff mean in `D(w, r)`.
pub fn h_word(
    sft: &Sft,
    p: &TablePotential,
    w: &[f64],
    r: f64,
    ns: &[usize],
    opts: &CountOptions,
) -> Result<GrowthEstimate> {
    growth(ns, |n| count_words_in_ball(sft, p, w, r, n, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::{make_sft, Transitions};

    fn bit() -> (Sft, TablePotential) {
        let s = Sft::full(2);
        let t = TablePotential::per_symbol(&s, &[vec![0.0], vec![1.0]]).unwrap();
        (s, t)
    }

    fn opts(mode: CountMode) -> CountOptions {
        CountOptions {
            mode,
            ..CountOptions::default()
        }
    }

    #[test]
    fn per_count_examples() {
        assert_eq!(per_count(&Sft::full(2), 5).unwrap(), BigUint::from(32u8));
        let gm = Sft::golden_mean();
        let lucas: Vec<u32> = (1..=5).map(|n| per_count(&gm, n).unwrap().try_into().unwrap()).collect();
        assert_eq!(lucas, vec![1, 3, 4, 7, 11]);
        let id = make_sft(2, &Transitions::Matrix(vec![vec![1, 0], vec![0, 1]])).unwrap();
        assert_eq!(per_count(&id, 3).unwrap(), BigUint::from(2u8));
        assert!(per_count(&gm, 0).is_err());
    }

    #[test]
    fn census_examples() {
        let (s, t) = bit();
        for mode in [CountMode::Enumerate, CountMode::Dp] {
            let c = census(&s, &t, 4, 0.25, &opts(mode)).unwrap();
            let got: Vec<(i64, u128)> = c.bins.iter().map(|(k, &v)| (k[0], v)).collect();
            assert_eq!(got, vec![(0, 1), (1, 4), (2, 6), (3, 4), (4, 1)], "{mode:?}");
            assert_eq!(c.total, "16");
        }
        let gm = Sft::golden_mean();
        let t = TablePotential::per_symbol(&gm, &[vec![0.0], vec![1.0]]).unwrap();
        let c = census(&gm, &t, 3, 1.0 / 3.0, &opts(CountMode::Enumerate)).unwrap();
        let got: Vec<(i64, u128)> = c.bins.iter().map(|(k, &v)| (k[0], v)).collect();
        assert_eq!(got, vec![(0, 1), (1, 3)]);
    }

    #[test]
    fn ball_examples() {
        let (s, t) = bit();
        for mode in [CountMode::Enumerate, CountMode::Dp] {
            let o = opts(mode);
            assert_eq!(count_in_ball(&s, &t, &[0.5], 0.1, 4, &o).unwrap().lower, 6);
            assert_eq!(count_in_ball(&s, &t, &[0.0], 0.01, 5, &o).unwrap().upper, 1);
        }
        let gm = Sft::golden_mean();
        let t = TablePotential::per_symbol(&gm, &[vec![0.0], vec![1.0]]).unwrap();
        let c = count_in_ball(&gm, &t, &[0.5], 0.01, 4, &CountOptions::default()).unwrap();
        assert_eq!(c, CountBracket { lower: 2, upper: 2 });
    }

    #[test]
    fn off_grid_dp_brackets_contain_exact() {
        let s = Sft::full(3);
        let t = TablePotential::from_fn(&s, 2, 2, |w| {
            vec![(w[0] as f64 * 0.37).sin(), (w[1] as f64 + 0.3 * w[0] as f64).cos()]
        })
        .unwrap();
        for n in [3, 5, 7] {
            let exact = count_in_ball(&s, &t, &[0.2, 0.4], 0.3, n, &opts(CountMode::Enumerate)).unwrap();
            let dp = count_in_ball(
                &s,
                &t,
                &[0.2, 0.4],
                0.3,
                n,
                &CountOptions {
                    mode: CountMode::Dp,
                    q: Some(1.0 / 32.0),
                    ..CountOptions::default()
                },
            )
            .unwrap();
            assert!(dp.lower <= exact.lower && exact.lower <= dp.upper, "n={n} {dp:?} {exact:?}");
        }
    }

    #[test]
    fn budget_errors_carry_hints() {
        let s = Sft::full(6);
        let t = TablePotential::from_fn(&s, 1, 1, |w| vec![w[0] as f64 * 0.123]).unwrap();
        let tight = CountOptions {
            enum_budget: 10,
            dp_budget: 10,
            ..CountOptions::default()
        };
        match count_in_ball(&s, &t, &[0.2], 0.1, 12, &tight) {
            Err(Error::BudgetExceeded { hint, .. }) => assert!(hint.contains("q")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn growth_examples() {
        let (s, t) = bit();
        let ns: Vec<usize> = (1..=22).collect();
        let o = CountOptions::default();
        let hp = h_per(&s, &t, &[0.5], 0.1, &ns, &o).unwrap();
        assert!((hp.estimate - 2f64.ln()).abs() < 0.05, "{}", hp.estimate);
        assert_eq!(hp.window, (12, 22));
        let hw = h_word(&s, &t, &[0.5], 0.1, &ns, &o).unwrap();
        assert!((hw.estimate - 2f64.ln()).abs() < 0.05);
        assert!((hw.estimate - hp.estimate).abs() < 0.05);
        let zero = h_word(&s, &t, &[0.0], 1e-3, &ns, &o).unwrap();
        assert_eq!(zero.estimate, 0.0);
    }

    #[test]
    fn empty_counts_error() {
        let (s, t) = bit();
        let e = h_per(&s, &t, &[0.5], 1e-3, &[5, 7, 9, 11], &CountOptions::default());
        assert!(matches!(e, Err(Error::EmptyCounts)));
    }
}
