//! Overlap patterns of tile sequences.
//!
//! For a sequence `s_1, ..., s_s` of located dimers the pattern records, for
//! every pair of positions, whether the two tiles are the same located tile
//! (`E`), distinct but sharing a site (`O`), or disjoint (`D`).
//!
//! # Tree counts and connected-sequence counts
//!
//! Step 1 of the pipeline counts *trees* (every prefix connected); the
//! cluster sums need *all* connected sequences. Both sets are closed under
//! translation, and whether a labelled sequence is a tree depends on its
//! labelled pattern only. Fix a canonical class `[P]` whose orbit under the
//! position permutations `S_s` has stabiliser `Aut(P)`. Permuting positions
//! is a bijection between sequences with labelled pattern `Q` and those with
//! `σ·Q`, so every labelled pattern in the orbit is realised by the same
//! number `c` of sequences (per translation class). The orbit contains
//! `s!/|Aut(P)|` labelled patterns, of which `K/|Aut(P)|` are prefix-connected,
//! where `K` counts the permutations `σ` with `σ·P` prefix-connected. Hence
//!
//! ```text
//! connected([P]) / trees([P]) = (c·s!/|Aut|) / (c·K/|Aut|) = s!/K
//! ```
//!
//! which is [`ordering_ratio`]. The symmetry factor coming from repeated
//! tiles sits inside `Aut(P)` and cancels.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lattice::{overlap, LocatedDimer};

/// Largest sequence length accepted by [`canonicalize`] by default.
pub const DEFAULT_MAX_PATTERN_LEN: usize = 8;

/// Relation between two positions of a tile sequence.
///
/// The derived order (`Equal < Overlap < Disjoint`) is the order used for
/// canonical forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Relation {
    Equal = 0,
    Overlap = 1,
    Disjoint = 2,
}

impl Relation {
    pub fn letter(self) -> char {
        match self {
            Relation::Equal => 'E',
            Relation::Overlap => 'O',
            Relation::Disjoint => 'D',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'E' => Some(Relation::Equal),
            'O' => Some(Relation::Overlap),
            'D' => Some(Relation::Disjoint),
            _ => None,
        }
    }

    pub(crate) fn from_bits(b: u64) -> Self {
        match b {
            0 => Relation::Equal,
            1 => Relation::Overlap,
            _ => Relation::Disjoint,
        }
    }

    /// Boolean overlap view: `E` and `O` both intersect.
    pub fn intersects(self) -> bool {
        self != Relation::Disjoint
    }
}

/// An `s × s` relation matrix over sequence positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OverlapPattern {
    s: usize,
    rel: Vec<Relation>,
}

impl OverlapPattern {
    /// Validates and wraps a row-major matrix.
    pub fn new(s: usize, rel: Vec<Relation>) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidPattern("empty pattern".into()));
        }
        if rel.len() != s * s {
            return Err(Error::InvalidPattern(format!(
                "expected {} entries, got {}",
                s * s,
                rel.len()
            )));
        }
        let p = OverlapPattern { s, rel };
        for i in 0..s {
            if p.get(i, i) != Relation::Equal {
                return Err(Error::InvalidPattern(format!("diagonal entry {i} is not E")));
            }
            for j in 0..s {
                if p.get(i, j) != p.get(j, i) {
                    return Err(Error::InvalidPattern(format!("not symmetric at ({i},{j})")));
                }
                if p.get(i, j) == Relation::Equal && (0..s).any(|k| p.get(i, k) != p.get(j, k)) {
                    return Err(Error::InvalidPattern(format!(
                        "positions {i} and {j} are E but their rows differ"
                    )));
                }
            }
        }
        Ok(p)
    }

    /// Builds a pattern from its upper triangle, `f(i, j)` for `i < j`.
    pub fn from_fn(s: usize, f: impl Fn(usize, usize) -> Relation) -> Result<Self> {
        let mut rel = vec![Relation::Equal; s * s];
        for i in 0..s {
            for j in i + 1..s {
                let r = f(i, j);
                rel[i * s + j] = r;
                rel[j * s + i] = r;
            }
        }
        Self::new(s, rel)
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_upper_unchecked(s: usize, f: impl Fn(usize, usize) -> Relation) -> Self {
        let mut rel = vec![Relation::Equal; s * s];
        for i in 0..s {
            for j in i + 1..s {
                let r = f(i, j);
                rel[i * s + j] = r;
                rel[j * s + i] = r;
            }
        }
        OverlapPattern { s, rel }
    }

    pub fn len(&self) -> usize {
        self.s
    }

    pub fn is_empty(&self) -> bool {
        self.s == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Relation {
        self.rel[i * self.s + j]
    }

    /// `σ·p`: position `i` of the result is position `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> OverlapPattern {
        assert_eq!(perm.len(), self.s, "permutation length");
        OverlapPattern::from_upper_unchecked(self.s, |i, j| self.get(perm[i], perm[j]))
    }

    /// Adjacency bitmasks of the boolean overlap graph (no self loops).
    pub fn adjacency(&self) -> Vec<u32> {
        (0..self.s)
            .map(|i| {
                (0..self.s)
                    .filter(|&j| j != i && self.get(i, j).intersects())
                    .fold(0u32, |m, j| m | (1 << j))
            })
            .collect()
    }

    /// Row-major letter key, rows separated by `/`.
    pub fn key(&self) -> String {
        let mut out = String::with_capacity(self.s * (self.s + 1));
        for i in 0..self.s {
            if i > 0 {
                out.push('/');
            }
            for j in 0..self.s {
                out.push(self.get(i, j).letter());
            }
        }
        out
    }

    pub fn parse_key(key: &str) -> Result<Self> {
        let rows: Vec<&str> = key.split('/').collect();
        let s = rows.len();
        let mut rel = Vec::with_capacity(s * s);
        for row in &rows {
            if row.chars().count() != s {
                return Err(Error::InvalidPattern(format!("{key}: ragged row {row:?}")));
            }
            for c in row.chars() {
                rel.push(
                    Relation::from_letter(c)
                        .ok_or_else(|| Error::InvalidPattern(format!("{key}: bad letter {c:?}")))?,
                );
            }
        }
        Self::new(s, rel)
    }

    fn upper(&self) -> impl Iterator<Item = Relation> + '_ {
        (0..self.s).flat_map(move |i| (i + 1..self.s).map(move |j| self.get(i, j)))
    }
}

impl fmt::Display for OverlapPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// A pattern in canonical form together with its serialization key.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalPattern {
    pattern: OverlapPattern,
    key: String,
}

impl CanonicalPattern {
    pub fn pattern(&self) -> &OverlapPattern {
        &self.pattern
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    /// Parses a key and checks it is already canonical.
    pub fn from_key(key: &str) -> Result<Self> {
        let p = OverlapPattern::parse_key(key)?;
        let c = canonicalize(&p)?;
        if c.key != key {
            return Err(Error::InvalidPattern(format!(
                "{key} is not canonical (canonical form {})",
                c.key
            )));
        }
        Ok(c)
    }
}

impl fmt::Display for CanonicalPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

/// The overlap pattern of a tile sequence.
pub fn pattern_of(seq: &[LocatedDimer]) -> Result<OverlapPattern> {
    if seq.is_empty() {
        return Err(Error::InvalidPattern("empty sequence".into()));
    }
    let s = seq.len();
    let mut rel = vec![Relation::Equal; s * s];
    for i in 0..s {
        for j in i + 1..s {
            let r = if seq[i] == seq[j] {
                Relation::Equal
            } else if overlap(&seq[i], &seq[j])? {
                Relation::Overlap
            } else {
                Relation::Disjoint
            };
            rel[i * s + j] = r;
            rel[j * s + i] = r;
        }
    }
    Ok(OverlapPattern { s, rel })
}

pub fn canonicalize(p: &OverlapPattern) -> Result<CanonicalPattern> {
    canonicalize_with_cap(p, DEFAULT_MAX_PATTERN_LEN)
}

/// Minimises the row-major matrix over all simultaneous row/column
/// permutations. Because the matrix is symmetric with a constant diagonal,
/// comparing upper triangles in row-major order gives the same order.
pub fn canonicalize_with_cap(p: &OverlapPattern, max_len: usize) -> Result<CanonicalPattern> {
    let s = p.len();
    if s > max_len {
        return Err(Error::CapExceeded {
            what: "pattern length",
            value: s,
            max: max_len,
        });
    }
    let base: Vec<Relation> = p.upper().collect();
    let mut best = base.clone();
    let mut best_perm: Vec<usize> = (0..s).collect();
    let mut scratch = vec![Relation::Equal; base.len()];

    for_each_permutation(s, |perm| {
        let mut idx = 0;
        let mut ord = Ordering::Equal;
        for i in 0..s {
            for j in i + 1..s {
                let r = p.get(perm[i], perm[j]);
                scratch[idx] = r;
                if ord == Ordering::Equal {
                    ord = r.cmp(&best[idx]);
                    if ord == Ordering::Greater {
                        return;
                    }
                }
                idx += 1;
            }
        }
        if ord == Ordering::Less {
            best.copy_from_slice(&scratch);
            best_perm.copy_from_slice(perm);
        }
    });

    let pattern = p.permute(&best_perm);
    let key = pattern.key();
    Ok(CanonicalPattern { pattern, key })
}

/// Visits every permutation of `0..n` (Heap's algorithm).
pub(crate) fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Connectivity of the boolean overlap graph (`E` or `O` is an edge).
///
/// A sequence can be split into two non-interacting sub-sequences exactly when
/// this graph is disconnected.
pub fn is_connected(p: &OverlapPattern) -> bool {
    let adj = p.adjacency();
    let full = (1u32 << p.len()) - 1;
    let mut seen = 1u32;
    let mut frontier = 1u32;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[v] & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen == full
}

/// Number of permutations `σ` for which `σ·p` is prefix-connected.
///
/// Counted by dynamic programming over position subsets: an ordering of a set
/// is valid iff its last element touches the rest and the rest is validly
/// ordered.
pub fn prefix_connected_orderings(p: &OverlapPattern) -> u64 {
    let s = p.len();
    let adj = p.adjacency();
    let mut ways = vec![0u64; 1 << s];
    for v in 0..s {
        ways[1 << v] = 1;
    }
    for set in 1usize..(1 << s) {
        if set.count_ones() < 2 {
            continue;
        }
        let mut total = 0;
        let mut rest_bits = set;
        while rest_bits != 0 {
            let v = rest_bits.trailing_zeros() as usize;
            rest_bits &= rest_bits - 1;
            let rest = set & !(1 << v);
            if adj[v] & rest as u32 != 0 {
                total += ways[rest];
            }
        }
        ways[set] = total;
    }
    ways[(1 << s) - 1]
}

/// `s! / #{σ : σ·p prefix-connected}`, the factor converting tree counts into
/// connected-sequence counts for one pattern class.
pub fn ordering_ratio(p: &OverlapPattern) -> Result<BigRational> {
    if !is_connected(p) {
        return Err(Error::Disconnected(p.key()));
    }
    let fact: u64 = (1..=p.len() as u64).product();
    Ok(BigRational::new(
        BigInt::from(fact),
        BigInt::from(prefix_connected_orderings(p)),
    ))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::lattice::Site;
    use num_traits::One;
    use proptest::prelude::*;
    use Relation::*;

    fn d1(x: i64) -> LocatedDimer {
        LocatedDimer::new(Site::new(vec![x]).unwrap(), 0).unwrap()
    }

    pub(crate) fn path3() -> OverlapPattern {
        // positions 0-2 and 1-2 overlap, 0-1 disjoint
        OverlapPattern::from_fn(3, |i, j| match (i, j) {
            (0, 1) => Disjoint,
            _ => Overlap,
        })
        .unwrap()
    }

    /// Patterns with a consistent EQUAL structure: pick a class for each
    /// position, then a relation for each pair of distinct classes.
    pub(crate) fn arb_pattern(max_s: usize) -> impl Strategy<Value = OverlapPattern> {
        (1..=max_s).prop_flat_map(|s| {
            (
                prop::collection::vec(0..s, s),
                prop::collection::vec(prop::bool::ANY, s * s),
            )
                .prop_map(move |(class, bits)| {
                    OverlapPattern::from_fn(s, |i, j| {
                        let (a, b) = (class[i].min(class[j]), class[i].max(class[j]));
                        if a == b {
                            Equal
                        } else if bits[a * s + b] {
                            Overlap
                        } else {
                            Disjoint
                        }
                    })
                    .unwrap()
                })
        })
    }

    fn arb_pattern_and_perm(max_s: usize) -> impl Strategy<Value = (OverlapPattern, Vec<usize>)> {
        arb_pattern(max_s).prop_flat_map(|p| {
            let s = p.len();
            (Just(p), Just((0..s).collect::<Vec<_>>()).prop_shuffle())
        })
    }

    #[test]
    fn pattern_of_examples() {
        let p = pattern_of(&[d1(0), d1(0)]).unwrap();
        assert_eq!(p.key(), "EE/EE");
        let p = pattern_of(&[d1(0), d1(1)]).unwrap();
        assert_eq!(p.key(), "EO/OE");
        let p = pattern_of(&[d1(0), d1(2), d1(1)]).unwrap();
        assert_eq!(p.get(0, 1), Disjoint);
        assert_eq!(p.get(0, 2), Overlap);
        assert_eq!(p.get(1, 2), Overlap);
    }

    #[test]
    fn validation_rejects_inconsistent_equal() {
        // 0=1 but 0 overlaps 2 while 1 is disjoint from 2
        let r = OverlapPattern::from_fn(3, |i, j| match (i, j) {
            (0, 1) => Equal,
            (0, 2) => Overlap,
            _ => Disjoint,
        });
        assert!(r.is_err());
        assert!(OverlapPattern::parse_key("EO/DE").is_err());
        assert!(OverlapPattern::parse_key("EO/O").is_err());
        assert!(OverlapPattern::parse_key("EX/XE").is_err());
    }

    #[test]
    fn canonical_examples() {
        let one = OverlapPattern::parse_key("E").unwrap();
        assert_eq!(canonicalize(&one).unwrap().key(), "E");
        let a = pattern_of(&[d1(0), d1(1)]).unwrap();
        let b = pattern_of(&[d1(1), d1(0)]).unwrap();
        assert_eq!(canonicalize(&a).unwrap(), canonicalize(&b).unwrap());
        assert_eq!(canonicalize(&a).unwrap().key(), "EO/OE");
        // path: the degree-2 vertex goes first
        assert_eq!(canonicalize(&path3()).unwrap().key(), "EOO/OED/ODE");
    }

    #[test]
    fn canonicalize_cap() {
        let p = OverlapPattern::from_fn(9, |_, _| Overlap).unwrap();
        assert!(matches!(canonicalize(&p), Err(Error::CapExceeded { .. })));
        assert!(canonicalize_with_cap(&p, 9).is_ok());
    }

    #[test]
    fn ordering_ratio_examples() {
        let all_eq = OverlapPattern::parse_key("EE/EE").unwrap();
        assert_eq!(ordering_ratio(&all_eq).unwrap(), BigRational::one());
        assert_eq!(
            ordering_ratio(&path3()).unwrap(),
            BigRational::new(3.into(), 2.into())
        );
        let complete = OverlapPattern::from_fn(5, |_, _| Overlap).unwrap();
        assert_eq!(ordering_ratio(&complete).unwrap(), BigRational::one());
        let split = OverlapPattern::parse_key("ED/DE").unwrap();
        assert!(matches!(ordering_ratio(&split), Err(Error::Disconnected(_))));
    }

    #[test]
    fn connectivity_examples() {
        assert!(is_connected(&OverlapPattern::parse_key("E").unwrap()));
        assert!(!is_connected(&OverlapPattern::parse_key("ED/DE").unwrap()));
        assert!(is_connected(&path3()));
    }

    fn brute_orderings(p: &OverlapPattern) -> u64 {
        let mut n = 0;
        for_each_permutation(p.len(), |perm| {
            let q = p.permute(perm);
            if (1..q.len()).all(|i| (0..i).any(|j| q.get(i, j).intersects())) {
                n += 1;
            }
        });
        n
    }

    #[test]
    fn heap_visits_every_permutation_once() {
        let mut seen = std::collections::HashSet::new();
        for_each_permutation(5, |p| {
            assert!(seen.insert(p.to_vec()));
        });
        assert_eq!(seen.len(), 120);
    }

    proptest! {
        #[test]
        fn canonical_form_permutation_invariant((p, perm) in arb_pattern_and_perm(6)) {
            let q = p.permute(&perm);
            prop_assert_eq!(canonicalize(&p).unwrap(), canonicalize(&q).unwrap());
        }

        #[test]
        fn canonical_key_round_trips(p in arb_pattern(6)) {
            let c = canonicalize(&p).unwrap();
            prop_assert_eq!(CanonicalPattern::from_key(c.key()).unwrap(), c.clone());
            prop_assert!(c.pattern().upper().le(p.upper()));
        }

        #[test]
        fn connectivity_permutation_invariant((p, perm) in arb_pattern_and_perm(6)) {
            prop_assert_eq!(is_connected(&p), is_connected(&p.permute(&perm)));
        }

        #[test]
        fn ordering_count_matches_brute_force(p in arb_pattern(6)) {
            let k = prefix_connected_orderings(&p);
            prop_assert_eq!(k, brute_orderings(&p));
            if is_connected(&p) {
                prop_assert!(k >= 1);
                let r = ordering_ratio(&p).unwrap();
                prop_assert!(r >= BigRational::one());
                let fact: u64 = (1..=p.len() as u64).product();
                prop_assert_eq!(r == BigRational::one(), k == fact);
            }
        }
    }
}
