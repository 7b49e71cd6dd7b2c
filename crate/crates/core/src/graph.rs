//! Small directed-graph utilities shared by the cycle, pressure and counting code.

/// Compressed adjacency: `targets[offsets[v]..offsets[v + 1]]` are the successors of `v`.
#[derive(Debug, Clone)]
pub struct Csr {
    pub offsets: Vec<usize>,
    pub targets: Vec<usize>,
}

impl Csr {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut list: Vec<(usize, usize)> = edges.into_iter().collect();
        list.sort_unstable();
        let mut offsets = vec![0usize; n + 1];
        for &(s, _) in &list {
            offsets[s + 1] += 1;
        }
        for v in 0..n {
            offsets[v + 1] += offsets[v];
        }
        Csr {
            offsets,
            targets: list.into_iter().map(|(_, t)| t).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// Strongly connected components (iterative Tarjan). Component ids are
/// assigned in reverse topological order of the condensation.
pub fn scc(g: &Csr) -> (usize, Vec<usize>) {
    let n = g.len();
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSET; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut ncomp = 0;

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let succ = g.successors(v);
            if *pos < succ.len() {
                let w = succ[*pos];
                *pos += 1;
                if index[w] == UNSET {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    (ncomp, comp)
}

/// Groups vertices by component and keeps only components that carry a cycle
/// (more than one vertex, or a self-loop).
pub fn recurrent_components(g: &Csr) -> Vec<Vec<usize>> {
    let (ncomp, comp) = scc(g);
    let mut members = vec![Vec::new(); ncomp];
    for v in 0..g.len() {
        members[comp[v]].push(v);
    }
    members
        .into_iter()
        .filter(|vs| vs.len() > 1 || g.successors(vs[0]).contains(&vs[0]))
        .collect()
}

/// Period (gcd of cycle lengths) of a strongly connected vertex set.
pub fn period(g: &Csr, members: &[usize]) -> usize {
    let n = g.len();
    let mut inside = vec![false; n];
    for &v in members {
        inside[v] = true;
    }
    let mut level = vec![usize::MAX; n];
    let start = members[0];
    level[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    let mut p = 0usize;
    while let Some(v) = queue.pop_front() {
        for &w in g.successors(v) {
            if !inside[w] {
                continue;
            }
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            } else {
                let diff = (level[v] + 1).abs_diff(level[w]);
                p = gcd(p, diff);
            }
        }
    }
    p.max(1)
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycles_and_a_bridge() {
        // 0 <-> 1 -> 2 <-> 3, plus isolated 4
        let g = Csr::from_edges(5, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 2)]);
        let comps = recurrent_components(&g);
        assert_eq!(comps.len(), 2);
        let (n, comp) = scc(&g);
        assert_eq!(n, 3);
        assert_eq!(comp[0], comp[1]);
        assert_ne!(comp[1], comp[2]);
    }

    #[test]
    fn periods() {
        let g = Csr::from_edges(3, [(0, 1), (1, 2), (2, 0)]);
        assert_eq!(period(&g, &[0, 1, 2]), 3);
        let g = Csr::from_edges(2, [(0, 1), (1, 0), (0, 0)]);
        assert_eq!(period(&g, &[0, 1]), 1);
    }
}
