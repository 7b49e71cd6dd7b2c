//! One-sided subshifts of finite type, words, cyclic words and higher-block
//! (skeleton) presentations.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Csr;

/// Default cap on the number of skeleton vertices.
pub const DEFAULT_STATE_BUDGET: usize = 2_000_000;

/// A subshift of finite type on the alphabet `{0, …, d-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft {
    d: usize,
    /// Row-major 0/1 transition matrix.
    a: Vec<bool>,
}

/// How the transition matrix is supplied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Transitions {
    Named(String),
    Matrix(Vec<Vec<i64>>),
}

/// On-disk system description: `{ "alphabet": d, "transitions": "full" | [[…]] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub alphabet: usize,
    pub transitions: Transitions,
}

impl SystemSpec {
    pub fn build(&self) -> Result<Sft> {
        make_sft(self.alphabet, &self.transitions)
    }
}

pub fn make_sft(d: usize, transitions: &Transitions) -> Result<Sft> {
    if d == 0 {
        return Err(Error::BadSpec("alphabet must be nonempty".into()));
    }
    let a = match transitions {
        Transitions::Named(name) if name == "full" => vec![true; d * d],
        Transitions::Named(name) => {
            return Err(Error::BadSpec(format!("unknown transitions keyword {name:?}")))
        }
        Transitions::Matrix(rows) => {
            if rows.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: rows.len(),
                });
            }
            let mut a = Vec::with_capacity(d * d);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: row.len(),
                    });
                }
                for (j, &x) in row.iter().enumerate() {
                    match x {
                        0 => a.push(false),
                        1 => a.push(true),
                        _ => return Err(Error::BadMatrixEntry { row: i, col: j }),
                    }
                }
            }
            a
        }
    };
    Sft::from_flat(d, a)
}

impl Sft {
    pub fn from_flat(d: usize, a: Vec<bool>) -> Result<Self> {
        if a.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: a.len(),
            });
        }
        for s in 0..d {
            if !(0..d).any(|t| a[s * d + t]) {
                return Err(Error::StrandedSymbol {
                    symbol: s,
                    side: "row (no successor)",
                });
            }
            if !(0..d).any(|t| a[t * d + s]) {
                return Err(Error::StrandedSymbol {
                    symbol: s,
                    side: "column (no predecessor)",
                });
            }
        }
        Ok(Sft { d, a })
    }

    pub fn full(d: usize) -> Self {
        Sft {
            d,
            a: vec![true; d * d],
        }
    }

    pub fn golden_mean() -> Self {
        Sft {
            d: 2,
            a: vec![true, true, true, false],
        }
    }

    pub fn alphabet(&self) -> usize {
        self.d
    }

    pub fn allowed(&self, s: usize, t: usize) -> bool {
        self.a[s * self.d + t]
    }

    pub fn is_full(&self) -> bool {
        self.a.iter().all(|&x| x)
    }

    pub fn matrix(&self) -> Vec<Vec<u8>> {
        (0..self.d)
            .map(|i| (0..self.d).map(|j| self.allowed(i, j) as u8).collect())
            .collect()
    }

    pub fn to_spec(&self) -> SystemSpec {
        let transitions = if self.is_full() {
            Transitions::Named("full".into())
        } else {
            Transitions::Matrix(
                self.matrix()
                    .into_iter()
                    .map(|r| r.into_iter().map(i64::from).collect())
                    .collect(),
            )
        };
        SystemSpec {
            alphabet: self.d,
            transitions,
        }
    }

    /// Restriction to a symbol subset (transitions leaving the subset dropped),
    /// re-indexed in the order given.
    pub fn restrict(&self, symbols: &[usize]) -> Result<Sft> {
        let k = symbols.len();
        let mut a = Vec::with_capacity(k * k);
        for &s in symbols {
            for &t in symbols {
                a.push(self.allowed(s, t));
            }
        }
        Sft::from_flat(k, a)
    }

    pub fn is_admissible(&self, w: &[u8]) -> bool {
        w.iter().all(|&s| (s as usize) < self.d)
            && w.windows(2)
                .all(|p| self.allowed(p[0] as usize, p[1] as usize))
    }

    pub fn is_cyclically_admissible(&self, w: &[u8]) -> bool {
        !w.is_empty()
            && self.is_admissible(w)
            && self.allowed(w[w.len() - 1] as usize, w[0] as usize)
    }

    /// Smallest `n ≤ d² − 2d + 2` with `A^n` entrywise positive.
    pub fn is_mixing(&self) -> (bool, Option<usize>) {
        let d = self.d;
        let bound = d * d - 2 * d + 2;
        let mut p = self.a.clone();
        for n in 1..=bound.max(1) {
            if p.iter().all(|&x| x) {
                return (true, Some(n));
            }
            p = bool_mul(&p, &self.a, d);
        }
        (false, None)
    }

    /// Number of admissible words of length `n` (sum of entries of `A^{n-1}`).
    pub fn count_words(&self, n: usize) -> BigUint {
        if n == 0 {
            return BigUint::one();
        }
        let ones = vec![BigUint::one(); self.d];
        let v = (1..n).fold(ones, |v, _| self.apply(&v));
        v.into_iter().sum()
    }

    /// `A · v` over arbitrary-precision integers.
    pub fn apply(&self, v: &[BigUint]) -> Vec<BigUint> {
        (0..self.d)
            .map(|i| {
                (0..self.d)
                    .filter(|&j| self.allowed(i, j))
                    .map(|j| v[j].clone())
                    .sum()
            })
            .collect()
    }

    /// Exact `A^n` by repeated squaring.
    pub fn matrix_power(&self, n: usize) -> Vec<Vec<BigUint>> {
        let d = self.d;
        let base: Vec<Vec<BigUint>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| BigUint::from(self.allowed(i, j) as u8))
                    .collect()
            })
            .collect();
        let mut result: Vec<Vec<BigUint>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { BigUint::one() } else { BigUint::zero() })
                    .collect()
            })
            .collect();
        let mut sq = base;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = big_mul(&result, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = big_mul(&sq, &sq);
            }
        }
        result
    }

    /// Spectral radius of `A` (its log is the topological entropy).
    pub fn spectral_radius(&self) -> f64 {
        let d = self.d;
        // (A + I) is primitive on each irreducible block and shares eigenvectors.
        let mut v = vec![1.0f64; d];
        let mut lambda = 0.0;
        for _ in 0..20_000 {
            let mut w = vec![0.0; d];
            for i in 0..d {
                w[i] = v[i];
                for j in 0..d {
                    if self.allowed(i, j) {
                        w[i] += v[j];
                    }
                }
            }
            let norm = w.iter().cloned().fold(0.0, f64::max);
            let next = norm;
            for x in &mut w {
                *x /= norm;
            }
            let converged = (next - lambda).abs() <= 1e-15 * next;
            lambda = next;
            v = w;
            if converged {
                break;
            }
        }
        lambda - 1.0
    }

    /// Number of vertices the depth-`k` skeleton would have.
    pub fn skeleton_vertex_count(&self, k: usize) -> BigUint {
        if k <= 1 {
            BigUint::one()
        } else {
            self.count_words(k - 1)
        }
    }

    pub fn k_block(&self, k: usize) -> Result<Skeleton> {
        self.k_block_with_budget(k, DEFAULT_STATE_BUDGET)
    }

    pub fn k_block_with_budget(&self, k: usize, budget: usize) -> Result<Skeleton> {
        Skeleton::build(self, k, budget)
    }
}

fn bool_mul(x: &[bool], y: &[bool], d: usize) -> Vec<bool> {
    let mut out = vec![false; d * d];
    for i in 0..d {
        for l in 0..d {
            if x[i * d + l] {
                for j in 0..d {
                    out[i * d + j] |= y[l * d + j];
                }
            }
        }
    }
    out
}

fn big_mul(x: &[Vec<BigUint>], y: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    let d = x.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).map(|l| &x[i][l] * &y[l][j]).sum())
                .collect()
        })
        .collect()
}

/// Renders a word: plain digits for alphabets up to 10, comma separated otherwise.
pub fn format_word(w: &[u8], d: usize) -> String {
    if d <= 10 {
        w.iter().map(|&s| char::from(b'0' + s)).collect()
    } else {
        w.iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub fn parse_word(s: &str, d: usize) -> Result<Vec<u8>> {
    let symbols: Vec<usize> = if s.contains(',') {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad symbol {t:?} in word {s:?}")))
            })
            .collect::<Result<_>>()?
    } else {
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|x| x as usize)
                    .ok_or_else(|| Error::Parse(format!("bad symbol {c:?} in word {s:?}")))
            })
            .collect::<Result<_>>()?
    };
    if let Some(&bad) = symbols.iter().find(|&&x| x >= d) {
        return Err(Error::Parse(format!(
            "symbol {bad} out of range for alphabet {d} in word {s:?}"
        )));
    }
    Ok(symbols.into_iter().map(|x| x as u8).collect())
}

/// A finite word together with its admissibility in a given shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    pub symbols: Vec<u8>,
    pub admissible: bool,
}

impl Word {
    pub fn new(sft: &Sft, symbols: Vec<u8>) -> Self {
        let admissible = sft.is_admissible(&symbols);
        Word {
            symbols,
            admissible,
        }
    }
}

/// A word read periodically; generator of a periodic orbit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CyclicWord {
    pub symbols: Vec<u8>,
}

impl CyclicWord {
    pub fn new(symbols: Vec<u8>) -> Self {
        CyclicWord { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn rotate(&self, j: usize) -> CyclicWord {
        let mut s = self.symbols.clone();
        if !s.is_empty() {
            let n = s.len();
            s.rotate_left(j % n);
        }
        CyclicWord { symbols: s }
    }

    /// Lexicographically least rotation.
    pub fn canonical(&self) -> CyclicWord {
        let s = &self.symbols;
        let n = s.len();
        if n == 0 {
            return self.clone();
        }
        let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
        while i < n && j < n && k < n {
            let a = s[(i + k) % n];
            let b = s[(j + k) % n];
            if a == b {
                k += 1;
                continue;
            }
            if a > b {
                i += k + 1;
            } else {
                j += k + 1;
            }
            if i == j {
                j += 1;
            }
            k = 0;
        }
        self.rotate(i.min(j))
    }

    /// The first `n` symbols of the periodic sequence generated by this word.
    pub fn unroll(&self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.symbols[i % self.symbols.len()]).collect()
    }
}

/// Higher-block presentation: vertices are admissible `(k-1)`-words, edges are
/// admissible `k`-words joining their prefix and suffix. For `k = 1` there is a
/// single virtual vertex carrying one self-loop per symbol.
#[derive(Debug, Clone)]
pub struct Skeleton {
    d: usize,
    k: usize,
    /// Base-`d` codes of the vertex words.
    vertex_words: Vec<u64>,
    /// Edges sorted by source; `edge_offsets` indexes them per vertex.
    edge_src: Vec<u32>,
    edge_tgt: Vec<u32>,
    edge_word: Vec<u64>,
    edge_offsets: Vec<usize>,
}

impl Skeleton {
    fn build(sft: &Sft, k: usize, budget: usize) -> Result<Skeleton> {
        if k == 0 {
            return Err(Error::BadSpec("block depth must be at least 1".into()));
        }
        let d = sft.alphabet();
        if k == 1 {
            let edge_word: Vec<u64> = (0..d as u64).collect();
            return Ok(Skeleton {
                d,
                k,
                vertex_words: vec![0],
                edge_src: vec![0; d],
                edge_tgt: vec![0; d],
                edge_word,
                edge_offsets: vec![0, d],
            });
        }
        let required = sft.skeleton_vertex_count(k);
        let allowed = BigUint::from(budget);
        if required > allowed || (k - 1) as f64 * (d as f64).log2() > 62.0 {
            return Err(Error::StateBudgetExceeded {
                required: biguint_to_u128(&required),
                allowed: budget as u128,
            });
        }
        // Breadth-first extension of admissible words, in lexicographic order.
        let mut words: Vec<u64> = (0..d as u64).collect();
        for _ in 1..(k - 1) {
            let mut next = Vec::new();
            for &w in &words {
                let last = (w % d as u64) as usize;
                for s in 0..d {
                    if sft.allowed(last, s) {
                        next.push(w * d as u64 + s as u64);
                    }
                }
            }
            words = next;
        }
        let span = (d as u64).pow((k - 1) as u32);
        let mut index = std::collections::HashMap::with_capacity(words.len());
        for (i, &w) in words.iter().enumerate() {
            index.insert(w, i as u32);
        }
        let mut edge_src = Vec::new();
        let mut edge_tgt = Vec::new();
        let mut edge_word = Vec::new();
        let mut edge_offsets = Vec::with_capacity(words.len() + 1);
        edge_offsets.push(0);
        for (i, &w) in words.iter().enumerate() {
            let last = (w % d as u64) as usize;
            for s in 0..d {
                if sft.allowed(last, s) {
                    let word = w * d as u64 + s as u64;
                    let tgt = index[&(word % span)];
                    edge_src.push(i as u32);
                    edge_tgt.push(tgt);
                    edge_word.push(word);
                }
            }
            edge_offsets.push(edge_src.len());
        }
        Ok(Skeleton {
            d,
            k,
            vertex_words: words,
            edge_src,
            edge_tgt,
            edge_word,
            edge_offsets,
        })
    }

    pub fn alphabet(&self) -> usize {
        self.d
    }

    pub fn depth(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_words.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_src.len()
    }

    pub fn src(&self, e: usize) -> usize {
        self.edge_src[e] as usize
    }

    pub fn tgt(&self, e: usize) -> usize {
        self.edge_tgt[e] as usize
    }

    /// Base-`d` code of the `k`-word carried by edge `e`.
    pub fn edge_code(&self, e: usize) -> u64 {
        self.edge_word[e]
    }

    pub fn out_edges(&self, v: usize) -> std::ops::Range<usize> {
        self.edge_offsets[v]..self.edge_offsets[v + 1]
    }

    /// First symbol of the edge's word: the symbol emitted when the edge is traversed.
    pub fn edge_symbol(&self, e: usize) -> u8 {
        let span = (self.d as u64).pow((self.k - 1) as u32);
        (self.edge_word[e] / span) as u8
    }

    pub fn edge_word(&self, e: usize) -> Vec<u8> {
        decode_word(self.edge_word[e], self.d, self.k)
    }

    pub fn vertex_word(&self, v: usize) -> Vec<u8> {
        if self.k == 1 {
            Vec::new()
        } else {
            decode_word(self.vertex_words[v], self.d, self.k - 1)
        }
    }

    /// Vertex-level adjacency (parallel edges collapsed).
    pub fn vertex_graph(&self) -> Csr {
        let mut pairs: Vec<(usize, usize)> = (0..self.edge_count())
            .map(|e| (self.src(e), self.tgt(e)))
            .collect();
        pairs.dedup();
        Csr::from_edges(self.vertex_count(), pairs)
    }

    /// Edge leaving `v` whose word ends in `symbol`, if admissible. For `k = 1`
    /// the symbol is the edge label.
    pub fn step(&self, v: usize, symbol: u8) -> Option<usize> {
        self.out_edges(v)
            .find(|&e| (self.edge_word[e] % self.d as u64) as u8 == symbol)
    }
}

pub fn decode_word(mut code: u64, d: usize, len: usize) -> Vec<u8> {
    let mut w = vec![0u8; len];
    for i in (0..len).rev() {
        w[i] = (code % d as u64) as u8;
        code /= d as u64;
    }
    w
}

pub fn encode_word(w: &[u8], d: usize) -> u64 {
    w.iter().fold(0u64, |acc, &s| acc * d as u64 + s as u64)
}

pub(crate) fn biguint_to_u128(x: &BigUint) -> u128 {
    let digits = x.to_u64_digits();
    match digits.len() {
        0 => 0,
        1 => digits[0] as u128,
        2 => digits[0] as u128 | ((digits[1] as u128) << 64),
        _ => u128::MAX,
    }
}

/// The skeleton depth used to present `sft` faithfully for a depth-`k`
/// potential: the virtual depth-1 vertex only encodes the full shift.
pub fn presentation_depth(sft: &Sft, k: usize) -> usize {
    if sft.is_full() {
        k.max(1)
    } else {
        k.max(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(d: usize, n: usize) -> Vec<Vec<u8>> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..d as u8).map(move |s| {
                        let mut x = w.clone();
                        x.push(s);
                        x
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn make_sft_examples() {
        let full = make_sft(2, &Transitions::Named("full".into())).unwrap();
        assert_eq!(full.matrix().iter().flatten().filter(|&&x| x == 1).count(), 4);
        let gm = make_sft(2, &Transitions::Matrix(vec![vec![1, 1], vec![1, 0]])).unwrap();
        assert!(!gm.is_admissible(&[1, 1]));
        assert!(gm.is_admissible(&[0, 1, 0]));
        let bad = make_sft(2, &Transitions::Matrix(vec![vec![1, 1], vec![0, 0]]));
        assert!(matches!(bad, Err(Error::StrandedSymbol { symbol: 1, .. })));
        let bad = make_sft(2, &Transitions::Matrix(vec![vec![1, 1]]));
        assert!(matches!(bad, Err(Error::DimensionMismatch { .. })));
        let bad = make_sft(2, &Transitions::Matrix(vec![vec![1, 2], vec![1, 1]]));
        assert!(matches!(bad, Err(Error::BadMatrixEntry { .. })));
    }

    #[test]
    fn system_spec_json() {
        let spec: SystemSpec =
            serde_json::from_str(r#"{"alphabet": 2, "transitions": [[1,1],[1,0]]}"#).unwrap();
        assert_eq!(spec.build().unwrap(), Sft::golden_mean());
        let spec: SystemSpec =
            serde_json::from_str(r#"{"alphabet": 3, "transitions": "full"}"#).unwrap();
        assert_eq!(spec.build().unwrap(), Sft::full(3));
    }

    #[test]
    fn mixing() {
        assert_eq!(Sft::full(2).is_mixing(), (true, Some(1)));
        assert_eq!(Sft::golden_mean().is_mixing(), (true, Some(2)));
        let id = Sft::from_flat(2, vec![true, false, false, true]).unwrap();
        assert_eq!(id.is_mixing(), (false, None));
        let swap = Sft::from_flat(2, vec![false, true, true, false]).unwrap();
        assert_eq!(swap.is_mixing(), (false, None));
    }

    #[test]
    fn mixing_exponent_is_verified_by_multiplication() {
        let sft = make_sft(
            3,
            &Transitions::Matrix(vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]),
        )
        .unwrap();
        let (mix, n) = sft.is_mixing();
        assert!(mix);
        let n = n.unwrap();
        let p = sft.matrix_power(n);
        assert!(p.iter().flatten().all(|x| !x.is_zero()));
        let p = sft.matrix_power(n - 1);
        assert!(p.iter().flatten().any(|x| x.is_zero()));
    }

    #[test]
    fn k_block_examples() {
        let gm = Sft::golden_mean();
        let sk = gm.k_block(2).unwrap();
        assert_eq!(sk.vertex_count(), 2);
        let mut ws: Vec<String> = (0..sk.edge_count())
            .map(|e| format_word(&sk.edge_word(e), 2))
            .collect();
        ws.sort();
        assert_eq!(ws, vec!["00", "01", "10"]);

        let sk = Sft::full(2).k_block(3).unwrap();
        assert_eq!((sk.vertex_count(), sk.edge_count()), (4, 8));

        let sk = gm.k_block(1).unwrap();
        assert_eq!((sk.vertex_count(), sk.edge_count()), (1, 2));

        let err = Sft::full(4).k_block_with_budget(6, 100).unwrap_err();
        assert_eq!(
            err,
            Error::StateBudgetExceeded {
                required: 1024,
                allowed: 100
            }
        );
    }

    #[test]
    fn count_words_examples() {
        assert_eq!(Sft::full(2).count_words(5), BigUint::from(32u32));
        assert_eq!(Sft::golden_mean().count_words(4), BigUint::from(8u32));
        assert_eq!(Sft::golden_mean().count_words(1), BigUint::from(2u32));
    }

    #[test]
    fn count_words_matches_brute_force() {
        let systems = [
            Sft::full(2),
            Sft::golden_mean(),
            make_sft(
                3,
                &Transitions::Matrix(vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]),
            )
            .unwrap(),
            make_sft(
                4,
                &Transitions::Matrix(vec![
                    vec![0, 1, 1, 0],
                    vec![1, 0, 0, 1],
                    vec![1, 1, 0, 0],
                    vec![0, 0, 1, 1],
                ]),
            )
            .unwrap(),
        ];
        for sft in &systems {
            let d = sft.alphabet();
            let max_n = if d <= 3 { 12 } else { 9 };
            for n in 1..=max_n {
                let brute = words(d, n).iter().filter(|w| sft.is_admissible(w)).count();
                assert_eq!(sft.count_words(n), BigUint::from(brute), "d={d} n={n}");
            }
            for k in 1..=6 {
                let sk = sft.k_block(k).unwrap();
                assert_eq!(BigUint::from(sk.edge_count()), sft.count_words(k));
            }
        }
    }

    #[test]
    fn skeleton_edges_overlap() {
        let gm = Sft::golden_mean();
        let sk = gm.k_block(4).unwrap();
        for e in 0..sk.edge_count() {
            let w = sk.edge_word(e);
            assert!(gm.is_admissible(&w));
            assert_eq!(sk.vertex_word(sk.src(e)), w[..3].to_vec());
            assert_eq!(sk.vertex_word(sk.tgt(e)), w[1..].to_vec());
            assert_eq!(sk.edge_symbol(e), w[0]);
        }
    }

    #[test]
    fn spectral_radius_values() {
        assert!((Sft::full(3).spectral_radius() - 3.0).abs() < 1e-12);
        let g = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((Sft::golden_mean().spectral_radius() - g).abs() < 1e-12);
    }

    #[test]
    fn word_round_trip() {
        assert_eq!(parse_word("0110", 2).unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(parse_word("10,3", 12).unwrap(), vec![10, 3]);
        assert!(parse_word("2", 2).is_err());
        assert_eq!(format_word(&[10, 3], 12), "10,3");
    }

    proptest::proptest! {
        #[test]
        fn canonical_form_is_rotation_invariant(
            w in proptest::collection::vec(0u8..3, 1..24),
            j in 0usize..40,
        ) {
            let c = CyclicWord::new(w.clone());
            let canon = c.canonical();
            proptest::prop_assert_eq!(&c.rotate(j).canonical(), &canon);
            let brute = (0..w.len()).map(|r| c.rotate(r)).min().unwrap();
            proptest::prop_assert_eq!(canon, brute);
        }
    }
}
