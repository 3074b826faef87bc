//! Connected weights on overlap patterns.
//!
//! The built-in [`Ursell`] functional is the hard-core Ursell function: with
//! `G` the incompatibility graph on positions (an edge wherever two tiles are
//! equal or overlap), it is the sum of `(-1)^|E(H)|` over connected spanning
//! subgraphs `H` of `G`. [`TableWeight`] looks weights up by canonical key and
//! is the slot for externally supplied connected weights.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::pattern::{is_connected, CanonicalPattern, OverlapPattern};

/// A rule assigning an exact connected weight to each canonical pattern.
pub trait WeightFunctional: Send + Sync {
    fn name(&self) -> &str;

    /// `None` when the weight is undefined on `p`.
    fn weight(&self, p: &CanonicalPattern) -> Option<BigRational>;
}

/// Edges of the incompatibility graph, as position pairs.
fn incompatibility_edges(p: &OverlapPattern) -> Vec<(usize, usize)> {
    let s = p.len();
    let mut edges = Vec::new();
    for i in 0..s {
        for j in i + 1..s {
            if p.get(i, j).intersects() {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Above this many edges the subgraph sum hands over to the recursion.
const MAX_SUBGRAPH_EDGES: usize = 20;

/// Ursell function by direct summation over spanning subgraphs.
pub fn ursell(p: &OverlapPattern) -> BigRational {
    let edges = incompatibility_edges(p);
    if edges.len() > MAX_SUBGRAPH_EDGES {
        return ursell_by_recursion(p);
    }
    let s = p.len();
    let full = (1u32 << s) - 1;
    let mut total: i64 = 0;
    let mut adj = vec![0u32; s];
    for mask in 0u32..(1 << edges.len()) {
        adj.iter_mut().for_each(|a| *a = 0);
        for (e, &(i, j)) in edges.iter().enumerate() {
            if mask >> e & 1 == 1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
        let mut seen = 1u32;
        let mut frontier = 1u32;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = adj[v] & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        if seen == full {
            total += if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        }
    }
    BigRational::from_integer(BigInt::from(total))
}

/// Ursell function by Möbius inversion over set partitions.
///
/// Expanding `Π_{edges}(1 - 1)` over subgraphs and grouping by connected
/// components gives `f(S) = Σ_π Π_{B∈π} c(B)`, where `f(S)` is 1 if `S`
/// spans no edge and 0 otherwise. Splitting off the block holding the
/// smallest element yields `c(S) = f(S) - Σ_T c(T) f(S \ T)`.
pub fn ursell_by_recursion(p: &OverlapPattern) -> BigRational {
    let s = p.len();
    let adj = p.adjacency();
    let n = 1usize << s;
    let independent: Vec<bool> = (0..n)
        .map(|set| (0..s).all(|v| set >> v & 1 == 0 || adj[v] & set as u32 == 0))
        .collect();
    let mut c = vec![0i64; n];
    for set in 1..n {
        let low = set & set.wrapping_neg();
        let mut acc = if independent[set] { 1 } else { 0 };
        // proper subsets containing the lowest element
        let rest = set & !low;
        let mut sub = (rest.wrapping_sub(1)) & rest;
        loop {
            let t = sub | low;
            if t != set && independent[set & !t] {
                acc -= c[t];
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        c[set] = acc;
    }
    BigRational::from_integer(BigInt::from(c[n - 1]))
}

/// Memoised hard-core Ursell functional.
#[derive(Default)]
pub struct Ursell {
    memo: RwLock<HashMap<String, BigRational>>,
}

impl Ursell {
    pub fn new() -> Self {
        Self::default()
    }
}

impl WeightFunctional for Ursell {
    fn name(&self) -> &str {
        "ursell"
    }

    fn weight(&self, p: &CanonicalPattern) -> Option<BigRational> {
        if let Some(w) = self.memo.read().expect("memo lock").get(p.key()) {
            return Some(w.clone());
        }
        let w = ursell(p.pattern());
        self.memo
            .write()
            .expect("memo lock")
            .entry(p.key().to_string())
            .or_insert_with(|| w.clone());
        Some(w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefaultPolicy {
    Error,
    Zero,
}

impl FromStr for DefaultPolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "error" => Ok(DefaultPolicy::Error),
            "zero" => Ok(DefaultPolicy::Zero),
            other => Err(format!("unknown default policy {other:?} (expected error or zero)")),
        }
    }
}

/// Explicit weights keyed by canonical pattern.
///
/// File format: `#` comments, a `default<TAB>error|zero` header line, then
/// `key<TAB>numerator/denominator` lines.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable {
    pub entries: BTreeMap<String, BigRational>,
    pub default: DefaultPolicy,
}

impl WeightTable {
    pub fn new(default: DefaultPolicy) -> Self {
        WeightTable {
            entries: BTreeMap::new(),
            default,
        }
    }

    pub fn insert(&mut self, key: &str, w: BigRational) -> Result<()> {
        CanonicalPattern::from_key(key)?;
        self.entries.insert(key.to_string(), w);
        Ok(())
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let policy = match self.default {
            DefaultPolicy::Error => "error",
            DefaultPolicy::Zero => "zero",
        };
        let _ = writeln!(out, "default\t{policy}");
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}\t{}/{}", v.numer(), v.denom());
        }
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let name = path.display().to_string();
        let perr = |line: usize, field: &'static str, msg: String| Error::Parse {
            path: name.clone(),
            line,
            field,
            msg,
        };
        let mut table: Option<WeightTable> = None;
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let line = raw.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (a, b) = line
                .split_once('\t')
                .ok_or_else(|| perr(no, "line", format!("expected two tab-separated fields: {line:?}")))?;
            match table.as_mut() {
                None => {
                    if a != "default" {
                        return Err(perr(no, "header", format!("expected 'default<TAB>policy', got {line:?}")));
                    }
                    let policy = b.parse().map_err(|e| perr(no, "default policy", e))?;
                    table = Some(WeightTable::new(policy));
                }
                Some(t) => {
                    CanonicalPattern::from_key(a).map_err(|e| perr(no, "pattern key", e.to_string()))?;
                    let w = parse_rational(b).map_err(|e| perr(no, "weight", e))?;
                    if t.entries.insert(a.to_string(), w).is_some() {
                        return Err(perr(no, "pattern key", format!("duplicate key {a}")));
                    }
                }
            }
        }
        table.ok_or_else(|| perr(0, "header", "missing 'default' header line".into()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_file_string()).map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn parse_rational(text: &str) -> std::result::Result<BigRational, String> {
    let (n, d) = text.split_once('/').unwrap_or((text, "1"));
    let n: BigInt = n.trim().parse().map_err(|e| format!("{text:?}: {e}"))?;
    let d: BigInt = d.trim().parse().map_err(|e| format!("{text:?}: {e}"))?;
    if d.is_zero() {
        return Err(format!("{text:?}: zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

/// Functional backed by a [`WeightTable`].
pub struct TableWeight {
    name: String,
    table: WeightTable,
}

pub fn table_weight(table: WeightTable) -> TableWeight {
    TableWeight {
        name: "table".into(),
        table,
    }
}

impl TableWeight {
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Looks every key up, failing with the full list of misses.
    pub fn evaluate_all<'a>(
        &self,
        patterns: impl IntoIterator<Item = &'a CanonicalPattern>,
    ) -> Result<Vec<BigRational>> {
        let mut missing = Vec::new();
        let mut out = Vec::new();
        for p in patterns {
            match self.weight(p) {
                Some(w) => out.push(w),
                None => missing.push(p.key().to_string()),
            }
        }
        if missing.is_empty() {
            Ok(out)
        } else {
            Err(Error::MissingWeights(missing))
        }
    }
}

impl WeightFunctional for TableWeight {
    fn name(&self) -> &str {
        &self.name
    }

    fn weight(&self, p: &CanonicalPattern) -> Option<BigRational> {
        if !is_connected(p.pattern()) {
            return Some(BigRational::zero());
        }
        match self.table.entries.get(p.key()) {
            Some(w) => Some(w.clone()),
            None => match self.table.default {
                DefaultPolicy::Zero => Some(BigRational::zero()),
                DefaultPolicy::Error => None,
            },
        }
    }
}
