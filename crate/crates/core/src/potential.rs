//! Vector-valued potentials: depth-k tables, staged constructions and the
//! gallery system, plus Birkhoff sums and the skeleton (edge) attachment used
//! by every transfer-matrix computation.

use std::borrow::Cow;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::construct2d::{BoundarySpec, StagedPotential};
use crate::error::{Error, Result};
use crate::gallery::{Example2Spec, GalleryPotential};
use crate::sft::{decode_word, encode_word, format_word, parse_word, presentation_depth, Sft, Skeleton};
use crate::sft::CyclicWord;

/// Largest dense table (number of k-words) we are willing to allocate.
pub const DEFAULT_TABLE_BUDGET: u128 = 1 << 24;

/// Locally constant potential given by its values on admissible `k`-words.
#[derive(Debug, Clone, PartialEq)]
pub struct TablePotential {
    d: usize,
    m: usize,
    k: usize,
    values: Vec<f64>,
    present: Vec<bool>,
    exact: Option<Vec<BigRational>>,
}

impl TablePotential {
    /// Builds a table by evaluating `f` on every admissible `k`-word of `sft`.
    pub fn from_fn<F>(sft: &Sft, k: usize, m: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[u8]) -> Vec<f64>,
    {
        let d = sft.alphabet();
        let size = table_size(d, k)?;
        let mut values = vec![0.0; size * m];
        let mut present = vec![false; size];
        for code in 0..size as u64 {
            let w = decode_word(code, d, k);
            if sft.is_admissible(&w) {
                let v = f(&w);
                if v.len() != m {
                    return Err(Error::BadDimension(format!(
                        "word {} has {} components, expected {m}",
                        format_word(&w, d),
                        v.len()
                    )));
                }
                values[code as usize * m..(code as usize + 1) * m].copy_from_slice(&v);
                present[code as usize] = true;
            }
        }
        Ok(TablePotential {
            d,
            m,
            k,
            values,
            present,
            exact: None,
        })
    }

    /// Table with exact rational entries (the float table is derived from them).
    pub fn from_rationals<F>(sft: &Sft, k: usize, m: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[u8]) -> Vec<BigRational>,
    {
        let d = sft.alphabet();
        let size = table_size(d, k)?;
        let mut exact = vec![BigRational::zero(); size * m];
        let mut table = TablePotential::from_fn(sft, k, m, |w| {
            let v = f(w);
            let code = encode_word(w, d) as usize;
            for (i, x) in v.iter().enumerate().take(m) {
                exact[code * m + i] = x.clone();
            }
            v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
        })?;
        table.exact = Some(exact);
        Ok(table)
    }

    /// Depth-1 table from one vector per symbol.
    pub fn per_symbol(sft: &Sft, values: &[Vec<f64>]) -> Result<Self> {
        if values.len() != sft.alphabet() {
            return Err(Error::DimensionMismatch {
                expected: sft.alphabet(),
                found: values.len(),
            });
        }
        let m = values.first().map(|v| v.len()).unwrap_or(0);
        TablePotential::from_fn(sft, 1, m, |w| values[w[0] as usize].clone())
    }

    pub fn alphabet(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn depth(&self) -> usize {
        self.k
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn contains(&self, code: u64) -> bool {
        self.present.get(code as usize).copied().unwrap_or(false)
    }

    pub fn value(&self, code: u64) -> &[f64] {
        let c = code as usize;
        &self.values[c * self.m..(c + 1) * self.m]
    }

    pub fn exact_value(&self, code: u64) -> Option<&[BigRational]> {
        let c = code as usize;
        self.exact.as_ref().map(|e| &e[c * self.m..(c + 1) * self.m])
    }

    /// Value on the cylinder of the word's first `k` symbols.
    pub fn value_of(&self, word: &[u8]) -> Result<&[f64]> {
        if word.len() < self.k {
            return Err(Error::InsufficientPrefix {
                needed: self.k,
                got: word.len(),
            });
        }
        let code = encode_word(&word[..self.k], self.d);
        if !self.contains(code) {
            return Err(Error::InadmissibleWord(format_word(&word[..self.k], self.d)));
        }
        Ok(self.value(code))
    }

    /// Iterator over `(word, value)` for every stored entry.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<u8>, &[f64])> + '_ {
        (0..self.present.len())
            .filter(|&c| self.present[c])
            .map(move |c| (decode_word(c as u64, self.d, self.k), self.value(c as u64)))
    }

    /// `Φ + c`.
    pub fn shifted(&self, c: &[f64]) -> TablePotential {
        let mut out = self.clone();
        out.exact = None;
        for (i, v) in out.values.iter_mut().enumerate() {
            *v += c[i % self.m];
        }
        out
    }

    /// `s·Φ`.
    pub fn scaled(&self, s: f64) -> TablePotential {
        let mut out = self.clone();
        out.exact = None;
        for v in &mut out.values {
            *v *= s;
        }
        out
    }

    /// Linear image `Φ ↦ M·Φ` (rows of `mat` give the new components).
    pub fn mapped(&self, mat: &[Vec<f64>]) -> TablePotential {
        let m2 = mat.len();
        let n = self.present.len();
        let mut values = vec![0.0; n * m2];
        for c in 0..n {
            let v = &self.values[c * self.m..(c + 1) * self.m];
            for (i, row) in mat.iter().enumerate() {
                values[c * m2 + i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
            }
        }
        TablePotential {
            d: self.d,
            m: m2,
            k: self.k,
            values,
            present: self.present.clone(),
            exact: None,
        }
    }

    /// Serializable `"table"` spec. Exact tables keep their rationals as strings.
    pub fn to_spec(&self) -> Value {
        let mut entries = serde_json::Map::new();
        for c in 0..self.present.len() {
            if !self.present[c] {
                continue;
            }
            let w = format_word(&decode_word(c as u64, self.d, self.k), self.d);
            let vals: Vec<Value> = match self.exact_value(c as u64) {
                Some(ex) => ex.iter().map(|x| Value::String(x.to_string())).collect(),
                None => self
                    .value(c as u64)
                    .iter()
                    .map(|&x| serde_json::json!(x))
                    .collect(),
            };
            entries.insert(w, Value::Array(vals));
        }
        serde_json::json!({"kind": "table", "m": self.m, "k": self.k, "entries": entries})
    }

    /// Range of each component, `[(min, max); m]`.
    pub fn component_ranges(&self) -> Vec<(f64, f64)> {
        let mut r = vec![(f64::INFINITY, f64::NEG_INFINITY); self.m];
        for (_, v) in self.entries() {
            for i in 0..self.m {
                r[i].0 = r[i].0.min(v[i]);
                r[i].1 = r[i].1.max(v[i]);
            }
        }
        r
    }
}

fn table_size(d: usize, k: usize) -> Result<usize> {
    let size = (d as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if size > DEFAULT_TABLE_BUDGET {
        return Err(Error::TableBudgetExceeded {
            required: size,
            allowed: DEFAULT_TABLE_BUDGET,
        });
    }
    Ok(size as usize)
}

/// A value known up to `error_bound` in the max norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluatedValue {
    pub value: Vec<f64>,
    pub error_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BirkhoffSum {
    pub n: usize,
    pub sum: Vec<f64>,
    pub mean: Vec<f64>,
}

/// Any supported potential representation.
#[derive(Debug, Clone)]
pub enum Potential {
    Table(TablePotential),
    Staged(StagedPotential),
    Gallery(GalleryPotential),
}

impl Potential {
    pub fn dim(&self) -> usize {
        match self {
            Potential::Table(t) => t.dim(),
            Potential::Staged(_) => 2,
            Potential::Gallery(_) => 2,
        }
    }

    /// Shortest prefix for which `evaluate` succeeds.
    pub fn min_depth(&self) -> usize {
        match self {
            Potential::Table(t) => t.depth(),
            Potential::Staged(_) => 1,
            Potential::Gallery(g) => g.spec().alpha,
        }
    }

    /// Prefix length at which evaluation becomes exact.
    pub fn resolution(&self) -> usize {
        match self {
            Potential::Table(t) => t.depth(),
            Potential::Staged(s) => s.cylinder_depth(),
            Potential::Gallery(g) => g.spec().depth,
        }
    }

    /// Locally constant presentation used by the transfer-matrix engines.
    pub fn table(&self) -> Result<Cow<'_, TablePotential>> {
        match self {
            Potential::Table(t) => Ok(Cow::Borrowed(t)),
            Potential::Staged(s) => Ok(Cow::Owned(s.export()?)),
            Potential::Gallery(g) => Ok(Cow::Borrowed(g.table())),
        }
    }
}

pub fn evaluate(p: &Potential, prefix: &[u8]) -> Result<EvaluatedValue> {
    match p {
        Potential::Table(t) => Ok(EvaluatedValue {
            value: t.value_of(prefix)?.to_vec(),
            error_bound: 0.0,
        }),
        Potential::Staged(s) => s.evaluate(prefix),
        Potential::Gallery(g) => g.evaluate(prefix),
    }
}

/// Value of the locally constant representation on the cylinder of `x`:
/// the table itself, the final stage of a staged construction, or the
/// truncated gallery table.
pub fn representation_value(p: &Potential, x: &[u8]) -> Result<Vec<f64>> {
    if x.len() < p.resolution() {
        return Err(Error::UnresolvablePotential(format!(
            "{} symbols available, {} needed",
            x.len(),
            p.resolution()
        )));
    }
    match p {
        Potential::Table(t) => Ok(t.value_of(x)?.to_vec()),
        Potential::Staged(s) => Ok(s.evaluate(x)?.value),
        Potential::Gallery(g) => Ok(g.table().value_of(x)?.to_vec()),
    }
}

/// Birkhoff sum of `p` over the first `n` points of the orbit of a point whose
/// leading symbols are `x`. Requires `x` long enough to resolve every shift.
pub fn birkhoff_sum(p: &Potential, x: &[u8], n: usize) -> Result<BirkhoffSum> {
    let m = p.dim();
    let mut sum = vec![0.0; m];
    for j in 0..n {
        let v = representation_value(p, &x[j.min(x.len())..])?;
        for i in 0..m {
            sum[i] += v[i];
        }
    }
    let mean = sum.iter().map(|s| s / n as f64).collect();
    Ok(BirkhoffSum { n, sum, mean })
}

/// Rotation vector of the periodic point generated by `w`.
pub fn birkhoff_mean(p: &Potential, w: &CyclicWord) -> Result<Vec<f64>> {
    if w.is_empty() {
        return Err(Error::BadSpec("empty cyclic word".into()));
    }
    let n = w.len();
    match p {
        Potential::Table(t) => table_cycle_mean(t, &w.symbols),
        Potential::Gallery(g) => table_cycle_mean(g.table(), &w.symbols),
        Potential::Staged(_) => {
            let x = w.unroll(n + p.resolution());
            Ok(birkhoff_sum(p, &x, n)?.mean)
        }
    }
}

pub(crate) fn table_cycle_mean(t: &TablePotential, w: &[u8]) -> Result<Vec<f64>> {
    let n = w.len();
    let k = t.depth();
    let d = t.alphabet();
    let mut sum = vec![0.0; t.dim()];
    let mut window = vec![0u8; k];
    for j in 0..n {
        for (i, s) in window.iter_mut().enumerate() {
            *s = w[(j + i) % n];
        }
        let code = encode_word(&window, d);
        if !t.contains(code) {
            return Err(Error::InadmissibleWord(format_word(&window, d)));
        }
        for (a, b) in sum.iter_mut().zip(t.value(code)) {
            *a += b;
        }
    }
    Ok(sum.into_iter().map(|s| s / n as f64).collect())
}

/// Exact rational rotation vector for tables built from rationals.
pub fn birkhoff_mean_exact(t: &TablePotential, w: &CyclicWord) -> Result<Vec<BigRational>> {
    let n = w.len();
    let k = t.depth();
    let d = t.alphabet();
    let mut sum = vec![BigRational::zero(); t.dim()];
    let mut window = vec![0u8; k];
    for j in 0..n {
        for (i, s) in window.iter_mut().enumerate() {
            *s = w.symbols[(j + i) % n];
        }
        let code = encode_word(&window, d);
        let v = t
            .exact_value(code)
            .ok_or_else(|| Error::UnresolvablePotential("table has no exact entries".into()))?;
        if !t.contains(code) {
            return Err(Error::InadmissibleWord(format_word(&window, d)));
        }
        for (a, b) in sum.iter_mut().zip(v) {
            *a += b;
        }
    }
    let n = BigRational::from_integer(BigInt::from(n));
    Ok(sum.into_iter().map(|s| s / &n).collect())
}

/// A skeleton with the potential's value attached to every edge.
#[derive(Debug, Clone)]
pub struct SkeletonPotential {
    pub skeleton: Skeleton,
    m: usize,
    phi: Vec<f64>,
}

impl SkeletonPotential {
    /// Builds the faithful presentation of `sft` at the potential's depth.
    pub fn new(sft: &Sft, p: &TablePotential) -> Result<Self> {
        Self::with_budget(sft, p, crate::sft::DEFAULT_STATE_BUDGET)
    }

    pub fn with_budget(sft: &Sft, p: &TablePotential, budget: usize) -> Result<Self> {
        if sft.alphabet() != p.alphabet() {
            return Err(Error::DimensionMismatch {
                expected: sft.alphabet(),
                found: p.alphabet(),
            });
        }
        let depth = presentation_depth(sft, p.depth());
        let sk = sft.k_block_with_budget(depth, budget)?;
        Self::attach(sk, p)
    }

    /// Attaches `p` to an existing skeleton of depth at least `p.k`.
    pub fn attach(sk: Skeleton, p: &TablePotential) -> Result<Self> {
        if sk.depth() < p.depth() {
            return Err(Error::DepthMismatch {
                skeleton: sk.depth(),
                potential: p.depth(),
            });
        }
        let m = p.dim();
        let d = sk.alphabet() as u64;
        let drop = d.pow((sk.depth() - p.depth()) as u32);
        let mut phi = Vec::with_capacity(sk.edge_count() * m);
        for e in 0..sk.edge_count() {
            let code = sk.edge_code(e) / drop;
            if !p.contains(code) {
                return Err(Error::MissingWord(format_word(
                    &decode_word(code, sk.alphabet(), p.depth()),
                    sk.alphabet(),
                )));
            }
            phi.extend_from_slice(p.value(code));
        }
        Ok(SkeletonPotential {
            skeleton: sk,
            m,
            phi,
        })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn phi(&self, e: usize) -> &[f64] {
        &self.phi[e * self.m..(e + 1) * self.m]
    }

    /// Scalar edge values `u·Φ(e)`.
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        (0..self.skeleton.edge_count())
            .map(|e| dot(u, self.phi(e)))
            .collect()
    }

    /// Mean of `Φ` along a closed edge walk.
    pub fn cycle_mean(&self, edges: &[usize]) -> Vec<f64> {
        let mut s = vec![0.0; self.m];
        for &e in edges {
            for (a, b) in s.iter_mut().zip(self.phi(e)) {
                *a += b;
            }
        }
        s.into_iter().map(|x| x / edges.len() as f64).collect()
    }

    /// Symbols emitted along an edge walk.
    pub fn cycle_word(&self, edges: &[usize]) -> CyclicWord {
        CyclicWord::new(edges.iter().map(|&e| self.skeleton.edge_symbol(e)).collect())
    }

    pub fn weighted(&self, t: &[f64]) -> Result<WeightedSkeleton<'_>> {
        if t.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: t.len(),
            });
        }
        Ok(WeightedSkeleton {
            log_weight: self.project(t),
            t: t.to_vec(),
            base: Cow::Borrowed(self),
        })
    }
}

/// Skeleton with scalar edge weights `exp(T·Φ(e))`, stored as logarithms.
#[derive(Debug, Clone)]
pub struct WeightedSkeleton<'a> {
    pub base: Cow<'a, SkeletonPotential>,
    pub t: Vec<f64>,
    pub log_weight: Vec<f64>,
}

impl WeightedSkeleton<'_> {
    pub fn weight(&self, e: usize) -> f64 {
        self.log_weight[e].exp()
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.base.skeleton
    }
}

/// Attaches `p` to `sk` and weights the edges by `exp(T·Φ)`.
pub fn edge_weights(p: &TablePotential, sk: &Skeleton, t: &[f64]) -> Result<WeightedSkeleton<'static>> {
    let base = SkeletonPotential::attach(sk.clone(), p)?;
    if t.len() != base.dim() {
        return Err(Error::DimensionMismatch {
            expected: base.dim(),
            found: t.len(),
        });
    }
    Ok(WeightedSkeleton {
        log_weight: base.project(t),
        t: t.to_vec(),
        base: Cow::Owned(base),
    })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// On-disk potential description, dispatched on its `kind` tag.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum PotentialSpec {
    #[serde(rename = "table")]
    Table {
        m: usize,
        k: usize,
        entries: BTreeMap<String, Vec<Value>>,
    },
    #[serde(rename = "construct2d")]
    Construct2d {
        boundary: BoundarySpec,
        stages: usize,
    },
    #[serde(rename = "example2")]
    Example2(Example2Spec),
}

/// Parses a potential spec document. `sft` is used to check table completeness.
pub fn parse_potential(doc: &Value, sft: &Sft) -> Result<Potential> {
    let spec: PotentialSpec = serde_json::from_value(doc.clone())?;
    build_potential(&spec, sft)
}

pub fn build_potential(spec: &PotentialSpec, sft: &Sft) -> Result<Potential> {
    match spec {
        PotentialSpec::Table { m, k, entries } => {
            Ok(Potential::Table(table_from_entries(sft, *m, *k, entries)?))
        }
        PotentialSpec::Construct2d { boundary, stages } => {
            if !(sft.alphabet() == 2 && sft.is_full()) {
                return Err(Error::BadSpec(
                    "construct2d potentials live on the full 2-shift".into(),
                ));
            }
            let b = boundary.build()?;
            Ok(Potential::Staged(StagedPotential::build(b, *stages)?))
        }
        PotentialSpec::Example2(e) => {
            if !(sft.alphabet() == e.d && sft.is_full()) {
                return Err(Error::BadSpec(format!(
                    "example2 potentials live on the full {}-shift",
                    e.d
                )));
            }
            Ok(Potential::Gallery(GalleryPotential::build(e.clone())?))
        }
    }
}

fn table_from_entries(
    sft: &Sft,
    m: usize,
    k: usize,
    entries: &BTreeMap<String, Vec<Value>>,
) -> Result<TablePotential> {
    if k == 0 || m == 0 {
        return Err(Error::BadDimension("m and k must be positive".into()));
    }
    let d = sft.alphabet();
    let mut parsed: BTreeMap<u64, Vec<Scalar>> = BTreeMap::new();
    for (key, vals) in entries {
        let w = parse_word(key, d)?;
        if w.len() != k || !sft.is_admissible(&w) {
            return Err(Error::InadmissibleKey(key.clone()));
        }
        if vals.len() != m {
            return Err(Error::BadDimension(format!(
                "entry {key} has {} components, expected {m}",
                vals.len()
            )));
        }
        let v = vals.iter().map(parse_scalar).collect::<Result<Vec<_>>>()?;
        parsed.insert(encode_word(&w, d), v);
    }
    let size = table_size(d, k)?;
    for code in 0..size as u64 {
        let w = decode_word(code, d, k);
        if sft.is_admissible(&w) && !parsed.contains_key(&code) {
            return Err(Error::MissingWord(format_word(&w, d)));
        }
    }
    let all_exact = parsed.values().flatten().all(|s| s.exact.is_some());
    if all_exact {
        TablePotential::from_rationals(sft, k, m, |w| {
            parsed[&encode_word(w, d)]
                .iter()
                .map(|s| s.exact.clone().expect("checked exact"))
                .collect()
        })
    } else {
        TablePotential::from_fn(sft, k, m, |w| {
            parsed[&encode_word(w, d)].iter().map(|s| s.float).collect()
        })
    }
}

struct Scalar {
    float: f64,
    exact: Option<BigRational>,
}

/// Integers and `"p/q"` strings are exact; other JSON numbers are floats.
fn parse_scalar(v: &Value) -> Result<Scalar> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Scalar {
                    float: i as f64,
                    exact: Some(BigRational::from_integer(BigInt::from(i))),
                })
            } else {
                Ok(Scalar {
                    float: n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}")))?,
                    exact: None,
                })
            }
        }
        Value::String(s) => {
            let (num, den) = match s.split_once('/') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (s.trim(), "1"),
            };
            let num: BigInt = num
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
            let den: BigInt = den
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            let r = BigRational::new(num, den);
            Ok(Scalar {
                float: r.to_f64().unwrap_or(f64::NAN),
                exact: Some(r),
            })
        }
        _ => Err(Error::Parse(format!("expected a number or \"p/q\", got {v}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn ind1(sft: &Sft) -> Potential {
        Potential::Table(TablePotential::per_symbol(sft, &[vec![0.0], vec![1.0]]).unwrap())
    }

    #[test]
    fn evaluate_depth_one() {
        let p = ind1(&Sft::full(2));
        let v = evaluate(&p, &[0, 1, 1, 0]).unwrap();
        assert_eq!(v.value, vec![0.0]);
        assert_eq!(v.error_bound, 0.0);
        assert!(matches!(
            evaluate(&p, &[]),
            Err(Error::InsufficientPrefix { needed: 1, got: 0 })
        ));
    }

    #[test]
    fn birkhoff_mean_examples() {
        let sft = Sft::full(2);
        let p = Potential::Table(
            TablePotential::per_symbol(&sft, &[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap(),
        );
        assert_eq!(
            birkhoff_mean(&p, &CyclicWord::new(vec![0, 1])).unwrap(),
            vec![0.5, 0.0]
        );
        let gm = Sft::golden_mean();
        let t = TablePotential::from_fn(&gm, 2, 1, |w| match w {
            [0, 0] => vec![1.0],
            _ => vec![0.0],
        })
        .unwrap();
        let p = Potential::Table(t);
        assert_eq!(birkhoff_mean(&p, &CyclicWord::new(vec![0])).unwrap(), vec![1.0]);
        assert!(matches!(
            birkhoff_mean(&p, &CyclicWord::new(vec![1])),
            Err(Error::InadmissibleWord(_))
        ));
    }

    #[test]
    fn parse_examples() {
        let full = Sft::full(2);
        let doc = json!({"kind":"table","m":1,"k":1,"entries":{"0":[0],"1":[1]}});
        let p = parse_potential(&doc, &full).unwrap();
        match &p {
            Potential::Table(t) => {
                assert_eq!((t.dim(), t.depth()), (1, 1));
                assert!(t.is_exact());
            }
            _ => panic!("expected table"),
        }
        let gm = Sft::golden_mean();
        let doc = json!({"kind":"table","m":1,"k":2,"entries":{"00":[1],"01":[0]}});
        assert_eq!(
            parse_potential(&doc, &gm).unwrap_err(),
            Error::MissingWord("10".into())
        );
        let doc = json!({"kind":"table","m":1,"k":2,"entries":{"00":[1],"01":[0],"10":[0],"11":[2]}});
        assert_eq!(
            parse_potential(&doc, &gm).unwrap_err(),
            Error::InadmissibleKey("11".into())
        );
        let doc = json!({"kind":"table","m":2,"k":1,"entries":{"0":[1],"1":[0, 1]}});
        assert!(matches!(
            parse_potential(&doc, &full),
            Err(Error::BadDimension(_))
        ));
        let doc = json!({"kind":"table","m":1,"k":1,"entries":{"0":["1/3"],"1":[0.25]}});
        match parse_potential(&doc, &full).unwrap() {
            Potential::Table(t) => {
                assert!(!t.is_exact());
                assert!((t.value(0)[0] - 1.0 / 3.0).abs() < 1e-16);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn exact_birkhoff_means() {
        let full = Sft::full(2);
        let doc = json!({"kind":"table","m":1,"k":2,"entries":{"00":["1/3"],"01":["1/7"],"10":[0],"11":["-2/5"]}});
        let t = match parse_potential(&doc, &full).unwrap() {
            Potential::Table(t) => t,
            _ => panic!(),
        };
        let w = CyclicWord::new(vec![0, 0, 1, 1, 1]);
        let exact = birkhoff_mean_exact(&t, &w).unwrap();
        // (1/3 + 1/7 - 2/5 - 2/5 + 0) / 5
        let expected = BigRational::new(BigInt::from(-34), BigInt::from(525));
        assert_eq!(exact[0], expected);
    }

    #[test]
    fn edge_weight_examples() {
        let full = Sft::full(2);
        let t = TablePotential::per_symbol(&full, &[vec![0.0], vec![1.0]]).unwrap();
        let sk = full.k_block(1).unwrap();
        let ws = edge_weights(&t, &sk, &[0.0]).unwrap();
        assert!((0..2).all(|e| ws.weight(e) == 1.0));
        let ws = edge_weights(&t, &sk, &[0.7]).unwrap();
        let mut w: Vec<f64> = (0..2).map(|e| ws.weight(e)).collect();
        w.sort_by(f64::total_cmp);
        assert_eq!(w, vec![1.0, 0.7f64.exp()]);

        let gm = Sft::golden_mean();
        let t2 = TablePotential::from_fn(&gm, 2, 1, |w| vec![w[0] as f64 + 2.0 * w[1] as f64]).unwrap();
        let sk = gm.k_block(2).unwrap();
        let ws = edge_weights(&t2, &sk, &[0.3]).unwrap();
        assert_eq!(ws.skeleton().vertex_count(), 2);
        assert_eq!(ws.skeleton().edge_count(), 3);

        let sk1 = gm.k_block(1).unwrap();
        assert!(matches!(
            edge_weights(&t2, &sk1, &[0.3]),
            Err(Error::DepthMismatch { .. })
        ));
    }

    proptest::proptest! {
        #[test]
        fn birkhoff_mean_rotation_and_repetition_invariant(
            vals in proptest::collection::vec(-5.0f64..5.0, 8),
            w in proptest::collection::vec(0u8..2, 1..12),
            j in 0usize..12,
            reps in 1usize..4,
        ) {
            let full = Sft::full(2);
            let t = TablePotential::from_fn(&full, 3, 1, |x| vec![vals[encode_word(x, 2) as usize]]).unwrap();
            let p = Potential::Table(t);
            let c = CyclicWord::new(w.clone());
            let base = birkhoff_mean(&p, &c).unwrap()[0];
            let rot = birkhoff_mean(&p, &c.rotate(j)).unwrap()[0];
            proptest::prop_assert!((base - rot).abs() < 1e-12);
            let rep = CyclicWord::new(w.repeat(reps));
            let r = birkhoff_mean(&p, &rep).unwrap()[0];
            proptest::prop_assert!((base - r).abs() < 1e-12);
        }

        #[test]
        fn weights_are_exponentials_and_reciprocal(
            vals in proptest::collection::vec(-3.0f64..3.0, 8),
            t in -4.0f64..4.0,
        ) {
            let full = Sft::full(2);
            let tp = TablePotential::from_fn(&full, 2, 2, |x| {
                let c = encode_word(x, 2) as usize;
                vec![vals[c], vals[c + 4]]
            }).unwrap();
            let sk = full.k_block(2).unwrap();
            let tv = [t, -0.5 * t];
            let plus = edge_weights(&tp, &sk, &tv).unwrap();
            let minus = edge_weights(&tp, &sk, &[-tv[0], -tv[1]]).unwrap();
            for e in 0..sk.edge_count() {
                let phi = plus.base.phi(e);
                proptest::prop_assert!((plus.weight(e).ln() - dot(&tv, phi)).abs() < 1e-12);
                proptest::prop_assert!((plus.weight(e) * minus.weight(e) - 1.0).abs() < 1e-12);
            }
        }
    }
}
