//! Cycle algorithms on skeletons: simple-cycle enumeration and maximum mean
//! cycles (Karp for small components, policy iteration for large ones).

use crate::error::{Error, Result};
use crate::graph::{recurrent_components, Csr};
use crate::sft::Skeleton;

/// Default cap on enumerated simple cycles.
pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

/// Total edges stored across enumerated cycles. Long cycles on big block
/// presentations exhaust memory well before the count cap is reached.
pub const EDGE_BUDGET: usize = 40_000_000;

/// Components with `V·E` above this use policy iteration instead of Karp.
pub const KARP_BUDGET: usize = 4_000_000;

/// Every simple cycle of the skeleton as an edge list. Parallel edges
/// between the same vertices give distinct cycles.
pub fn simple_cycles(sk: &Skeleton, cap: usize) -> Result<Vec<Vec<usize>>> {
    let n = sk.vertex_count();
    let mut out: Vec<Vec<usize>> = Vec::new();
    // Parallel edges only occur in the depth-1 presentation; group them.
    let mut succ: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); n];
    for (v, list) in succ.iter_mut().enumerate() {
        for e in sk.out_edges(v) {
            let t = sk.tgt(e);
            match list.iter_mut().find(|(w, _)| *w == t) {
                Some((_, es)) => es.push(e),
                None => list.push((t, vec![e])),
            }
        }
    }
    let mut stored = 0usize;
    let mut blocked = vec![false; n];
    let mut bset: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        let allowed = component_of(&succ, s);
        if !allowed[s] {
            continue;
        }
        for v in 0..n {
            if allowed[v] {
                blocked[v] = false;
                bset[v].clear();
            }
        }
        // Explicit DFS stack: (vertex, next successor index, found a circuit).
        let mut stack: Vec<(usize, usize, bool)> = vec![(s, 0, false)];
        let mut path: Vec<usize> = vec![s];
        blocked[s] = true;
        while let Some(frame) = stack.last_mut() {
            let v = frame.0;
            if frame.1 < succ[v].len() {
                let w = succ[v][frame.1].0;
                frame.1 += 1;
                if !allowed[w] {
                    continue;
                }
                if w == s {
                    frame.2 = true;
                    expand(&path, &succ, &mut out, &mut stored, cap)?;
                } else if !blocked[w] {
                    blocked[w] = true;
                    path.push(w);
                    stack.push((w, 0, false));
                }
            } else {
                let (v, _, found) = stack.pop().expect("nonempty stack");
                path.pop();
                if found {
                    unblock(v, &mut blocked, &mut bset);
                } else {
                    for &(w, _) in &succ[v] {
                        if allowed[w] && !bset[w].contains(&v) {
                            bset[w].push(v);
                        }
                    }
                }
                if let Some(parent) = stack.last_mut() {
                    parent.2 |= found;
                }
            }
        }
    }
    Ok(out)
}

/// Vertices of the strongly connected component of `s` in the subgraph
/// induced by `{s, s+1, …}`.
fn component_of(succ: &[Vec<(usize, Vec<usize>)>], s: usize) -> Vec<bool> {
    let n = succ.len();
    let mut fwd = vec![false; n];
    let mut stack = vec![s];
    fwd[s] = true;
    while let Some(v) = stack.pop() {
        for &(w, _) in &succ[v] {
            if w >= s && !fwd[w] {
                fwd[w] = true;
                stack.push(w);
            }
        }
    }
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in s..n {
        if fwd[v] {
            for &(w, _) in &succ[v] {
                if w >= s && fwd[w] {
                    pred[w].push(v);
                }
            }
        }
    }
    let mut both = vec![false; n];
    let mut stack = vec![s];
    let mut reached_self = false;
    let mut seen = vec![false; n];
    seen[s] = true;
    while let Some(v) = stack.pop() {
        for &u in &pred[v] {
            if u == s {
                reached_self = true;
            }
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    for v in s..n {
        both[v] = fwd[v] && seen[v];
    }
    if !reached_self {
        both[s] = false;
    }
    both
}

fn unblock(u: usize, blocked: &mut [bool], bset: &mut [Vec<usize>]) {
    let mut stack = vec![u];
    blocked[u] = false;
    while let Some(x) = stack.pop() {
        for w in std::mem::take(&mut bset[x]) {
            if blocked[w] {
                blocked[w] = false;
                stack.push(w);
            }
        }
    }
}

/// Turns a vertex cycle into every edge cycle through it.
fn expand(
    path: &[usize],
    succ: &[Vec<(usize, Vec<usize>)>],
    out: &mut Vec<Vec<usize>>,
    stored: &mut usize,
    cap: usize,
) -> Result<()> {
    let len = path.len();
    let choices: Vec<&Vec<usize>> = (0..len)
        .map(|i| {
            let (v, w) = (path[i], path[(i + 1) % len]);
            &succ[v].iter().find(|(t, _)| *t == w).expect("edge on path").1
        })
        .collect();
    let mut idx = vec![0usize; len];
    loop {
        if out.len() >= cap || *stored + len > EDGE_BUDGET {
            return Err(Error::CycleBudgetExceeded { cap });
        }
        *stored += len;
        out.push((0..len).map(|i| choices[i][idx[i]]).collect());
        let mut i = 0;
        loop {
            if i == len {
                return Ok(());
            }
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// A cycle of maximal mean edge weight.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCycle {
    pub mean: f64,
    pub edges: Vec<usize>,
}

/// Maximum mean cycle over all recurrent components of the skeleton.
pub fn max_mean_cycle(sk: &Skeleton, weight: &[f64]) -> Option<MeanCycle> {
    let g = sk.vertex_graph();
    let mut best: Option<MeanCycle> = None;
    for comp in recurrent_components(&g) {
        let sub = SubGraph::new(sk, &comp);
        let found = if comp.len().saturating_mul(sub.edges.len()) <= KARP_BUDGET {
            karp(&sub, weight).or_else(|| howard(&sub, weight))
        } else {
            howard(&sub, weight)
        };
        if let Some(c) = found {
            if best.as_ref().map_or(true, |b| c.mean > b.mean) {
                best = Some(c);
            }
        }
    }
    best
}

/// Edges of one strongly connected component, with local vertex indices.
pub(crate) struct SubGraph {
    pub n: usize,
    /// `(local src, local tgt, skeleton edge id)`, grouped by source.
    pub edges: Vec<(usize, usize, usize)>,
    pub offsets: Vec<usize>,
}

impl SubGraph {
    pub fn new(sk: &Skeleton, comp: &[usize]) -> Self {
        let mut local = vec![usize::MAX; sk.vertex_count()];
        for (i, &v) in comp.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        let mut offsets = vec![0];
        for &v in comp {
            for e in sk.out_edges(v) {
                let t = local[sk.tgt(e)];
                if t != usize::MAX {
                    edges.push((local[v], t, e));
                }
            }
            offsets.push(edges.len());
        }
        SubGraph {
            n: comp.len(),
            edges,
            offsets,
        }
    }

    fn out(&self, v: usize) -> &[(usize, usize, usize)] {
        &self.edges[self.offsets[v]..self.offsets[v + 1]]
    }
}

fn mean_of(edges: &[usize], weight: &[f64]) -> f64 {
    edges.iter().map(|&e| weight[e]).sum::<f64>() / edges.len() as f64
}

/// Karp's algorithm with the witness read off the predecessor walk.
fn karp(g: &SubGraph, weight: &[f64]) -> Option<MeanCycle> {
    let n = g.n;
    let ninf = f64::NEG_INFINITY;
    let mut dist = vec![ninf; (n + 1) * n];
    let mut pred = vec![usize::MAX; (n + 1) * n];
    dist[0] = 0.0;
    for k in 1..=n {
        let (prev, cur) = dist.split_at_mut(k * n);
        let prev = &prev[(k - 1) * n..];
        let cur = &mut cur[..n];
        for (idx, &(s, t, e)) in g.edges.iter().enumerate() {
            if prev[s] > ninf {
                let cand = prev[s] + weight[e];
                if cand > cur[t] {
                    cur[t] = cand;
                    pred[k * n + t] = idx;
                }
            }
        }
    }
    let mut best_v = None;
    let mut best = ninf;
    for v in 0..n {
        let dn = dist[n * n + v];
        if dn == ninf {
            continue;
        }
        let mut worst = f64::INFINITY;
        for k in 0..n {
            let dk = dist[k * n + v];
            if dk > ninf {
                worst = worst.min((dn - dk) / (n - k) as f64);
            }
        }
        if worst > best {
            best = worst;
            best_v = Some(v);
        }
    }
    let v = best_v?;
    // Walk back n steps; the walk visits n + 1 vertices, so it repeats one.
    let mut walk_v = vec![v];
    let mut walk_e = Vec::with_capacity(n);
    let mut cur = v;
    for k in (1..=n).rev() {
        let idx = pred[k * n + cur];
        let (s, _, e) = g.edges[idx];
        walk_e.push(e);
        walk_v.push(s);
        cur = s;
    }
    walk_v.reverse();
    walk_e.reverse();
    let cycles = decompose(&walk_v, &walk_e);
    cycles
        .into_iter()
        .map(|c| MeanCycle {
            mean: mean_of(&c, weight),
            edges: c,
        })
        .max_by(|a, b| a.mean.total_cmp(&b.mean))
}

/// Splits a walk into the simple cycles it closes.
fn decompose(vertices: &[usize], edges: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack_v: Vec<usize> = vec![vertices[0]];
    let mut stack_e: Vec<usize> = Vec::new();
    for (i, &e) in edges.iter().enumerate() {
        let next = vertices[i + 1];
        stack_e.push(e);
        if let Some(pos) = stack_v.iter().position(|&u| u == next) {
            out.push(stack_e.split_off(pos));
            stack_v.truncate(pos + 1);
        } else {
            stack_v.push(next);
        }
    }
    out
}

/// Howard's policy iteration for the maximum cycle mean.
fn howard(g: &SubGraph, weight: &[f64]) -> Option<MeanCycle> {
    let n = g.n;
    if g.edges.is_empty() {
        return None;
    }
    let scale = g
        .edges
        .iter()
        .map(|&(_, _, e)| weight[e].abs())
        .fold(1e-300f64, f64::max);
    let eps = 1e-12 * scale;
    // policy[v] = index into g.edges
    let mut policy: Vec<usize> = (0..n)
        .map(|v| {
            let out = g.out(v);
            let base = g.offsets[v];
            let best = (0..out.len())
                .max_by(|&a, &b| weight[out[a].2].total_cmp(&weight[out[b].2]))
                .expect("component vertices have out-edges");
            base + best
        })
        .collect();
    let mut eta = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut cycle_of = vec![usize::MAX; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for _ in 0..10_000 {
        // Value determination on the functional graph of the policy.
        cycle_of.iter_mut().for_each(|c| *c = usize::MAX);
        cycles.clear();
        let mut state = vec![0u8; n]; // 0 new, 1 on current walk, 2 done
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            let mut walk = Vec::new();
            let mut v = start;
            while state[v] == 0 {
                state[v] = 1;
                walk.push(v);
                v = g.edges[policy[v]].1;
            }
            if state[v] == 1 {
                // New cycle starting at v.
                let pos = walk.iter().position(|&u| u == v).expect("on walk");
                let cyc: Vec<usize> = walk[pos..].to_vec();
                let edges: Vec<usize> = cyc.iter().map(|&u| g.edges[policy[u]].2).collect();
                let mean = mean_of(&edges, weight);
                let id = cycles.len();
                cycles.push(edges);
                // Potentials around the cycle, rooted at v.
                x[v] = 0.0;
                eta[v] = mean;
                cycle_of[v] = id;
                for i in (pos + 1..walk.len()).rev() {
                    let u = walk[i];
                    let t = g.edges[policy[u]].1;
                    let w = weight[g.edges[policy[u]].2];
                    eta[u] = mean;
                    cycle_of[u] = id;
                    x[u] = if t == v { w - mean } else { w - mean + x[t] };
                }
                for &u in &walk[pos..] {
                    state[u] = 2;
                }
                walk.truncate(pos);
            }
            for &u in walk.iter().rev() {
                let (_, t, e) = g.edges[policy[u]];
                eta[u] = eta[t];
                cycle_of[u] = cycle_of[t];
                x[u] = weight[e] - eta[t] + x[t];
                state[u] = 2;
            }
        }
        // Policy improvement.
        let mut changed = false;
        for v in 0..n {
            let base = g.offsets[v];
            let mut best = policy[v];
            let (_, bt, _) = g.edges[best];
            let mut best_eta = eta[bt];
            let mut best_val = weight[g.edges[best].2] - eta[v] + x[bt];
            for (i, &(_, t, e)) in g.out(v).iter().enumerate() {
                if eta[t] > best_eta + eps {
                    best = base + i;
                    best_eta = eta[t];
                    best_val = weight[e] - eta[v] + x[t];
                }
            }
            if best == policy[v] {
                for (i, &(_, t, e)) in g.out(v).iter().enumerate() {
                    if (eta[t] - best_eta).abs() <= eps {
                        let val = weight[e] - eta[v] + x[t];
                        if val > best_val + eps {
                            best = base + i;
                            best_val = val;
                        }
                    }
                }
            }
            if best != policy[v] {
                policy[v] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    cycles
        .into_iter()
        .map(|c| MeanCycle {
            mean: mean_of(&c, weight),
            edges: c,
        })
        .max_by(|a, b| a.mean.total_cmp(&b.mean))
}

/// Used by tests: Karp and policy iteration on a whole component.
#[doc(hidden)]
pub fn max_mean_both(sk: &Skeleton, weight: &[f64]) -> Vec<(Option<f64>, Option<f64>)> {
    let g: Csr = sk.vertex_graph();
    recurrent_components(&g)
        .iter()
        .map(|comp| {
            let sub = SubGraph::new(sk, comp);
            (
                karp(&sub, weight).map(|c| c.mean),
                howard(&sub, weight).map(|c| c.mean),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::Sft;
    use proptest::prelude::*;

    #[test]
    fn golden_mean_cycles() {
        let gm = Sft::golden_mean();
        let sk = gm.k_block(2).unwrap();
        let cycles = simple_cycles(&sk, 100).unwrap();
        // {0} and {01}
        assert_eq!(cycles.len(), 2);
        let sk1 = gm.k_block(1).unwrap();
        // Depth 1: one loop per symbol that can follow itself.
        let c1 = simple_cycles(&sk1, 100).unwrap();
        assert_eq!(c1.len(), 2);
    }

    #[test]
    fn full_shift_cycle_counts() {
        // Simple cycles of the de Bruijn graph B(2,2): 6.
        let sk = Sft::full(2).k_block(3).unwrap();
        assert_eq!(simple_cycles(&sk, 1000).unwrap().len(), 6);
        assert!(matches!(
            simple_cycles(&sk, 3),
            Err(Error::CycleBudgetExceeded { cap: 3 })
        ));
    }

    #[test]
    fn max_mean_examples() {
        let gm = Sft::golden_mean();
        let sk = gm.k_block(2).unwrap();
        let w: Vec<f64> = (0..sk.edge_count())
            .map(|e| sk.edge_symbol(e) as f64)
            .collect();
        let c = max_mean_cycle(&sk, &w).unwrap();
        assert!((c.mean - 0.5).abs() < 1e-15);
        let neg: Vec<f64> = w.iter().map(|x| -x).collect();
        let c = max_mean_cycle(&sk, &neg).unwrap();
        assert_eq!(c.mean, 0.0);
        assert_eq!(c.edges.len(), 1);
    }

    proptest! {
        #[test]
        fn karp_howard_and_enumeration_agree(
            vals in proptest::collection::vec(-3.0f64..3.0, 27),
            k in 1usize..4,
        ) {
            let sft = Sft::full(3);
            let sk = sft.k_block(k).unwrap();
            let w: Vec<f64> = (0..sk.edge_count()).map(|e| vals[sk.edge_code(e) as usize % 27]).collect();
            let brute = simple_cycles(&sk, 1_000_000).unwrap()
                .iter()
                .map(|c| mean_of(c, &w))
                .fold(f64::NEG_INFINITY, f64::max);
            for (a, b) in max_mean_both(&sk, &w) {
                prop_assert!((a.unwrap() - brute).abs() < 1e-12);
                prop_assert!((b.unwrap() - brute).abs() < 1e-12);
            }
            let best = max_mean_cycle(&sk, &w).unwrap();
            prop_assert!((mean_of(&best.edges, &w) - brute).abs() < 1e-12);
        }
    }
}
