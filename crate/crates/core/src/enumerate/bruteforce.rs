//! Reference enumerator for tests: lists every dimer inside a box around the
//! anchor and keeps, level by level, the sequences whose newest tile overlaps
//! an earlier one. Shares nothing with the fast path except the canonical key.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use super::tally::{PatternTally, Reduction, Status};
use crate::error::{Error, Result};
use crate::lattice::{overlap, Dimension, LocatedDimer, Site};
use crate::pattern::{canonicalize, pattern_of};

/// Dimers with both endpoints in `[-window/2, window/2]^d`.
fn window_dimers(d: usize, window: usize) -> Vec<LocatedDimer> {
    let r = (window / 2) as i64;
    let mut sites: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..d {
        sites = sites
            .into_iter()
            .flat_map(|p| {
                (-r..=r).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for p in sites {
        for axis in 0..d {
            if p[axis] < r {
                out.push(LocatedDimer::new(Site::new(p.clone()).expect("d >= 1"), axis).expect("axis < d"));
            }
        }
    }
    out
}

/// Same tally as [`super::enumerate_trees`] with the axis-0 anchor, by
/// exhaustive filtering. `window` must be at least `2s + 2`.
pub fn enumerate_trees_bruteforce(d: usize, s: usize, window: usize) -> Result<PatternTally> {
    let dim = Dimension::new(d)?;
    if s == 0 {
        return Err(Error::OutOfRange {
            what: "tree length",
            detail: "s must be at least 1".into(),
        });
    }
    if window < 2 * s + 2 {
        return Err(Error::WindowTooSmall {
            window,
            min: 2 * s + 2,
        });
    }
    let all = window_dimers(d, window);
    let anchor = LocatedDimer::anchor(dim, 0)?;
    let mut level: Vec<Vec<LocatedDimer>> = vec![vec![anchor]];
    for _ in 1..s {
        let mut next = Vec::new();
        for seq in &level {
            for t in &all {
                let mut touches = false;
                for u in seq {
                    if overlap(u, t)? {
                        touches = true;
                        break;
                    }
                }
                if touches {
                    let mut longer = seq.clone();
                    longer.push(t.clone());
                    next.push(longer);
                }
            }
        }
        level = next;
    }

    let mut counts: BTreeMap<String, BigUint> = BTreeMap::new();
    for seq in &level {
        let key = canonicalize(&pattern_of(seq)?)?.key().to_string();
        *counts.entry(key).or_default() += 1u32;
    }
    Ok(PatternTally {
        d,
        s,
        anchor_axis: 0,
        status: Status::Complete,
        reduction: Reduction::None,
        counts,
        frontier: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_trees, EnumerationJob};

    #[test]
    fn window_check() {
        assert!(matches!(
            enumerate_trees_bruteforce(1, 3, 7),
            Err(Error::WindowTooSmall { min: 8, .. })
        ));
    }

    #[test]
    fn single_tile() {
        let t = enumerate_trees_bruteforce(1, 1, 4).unwrap();
        assert_eq!(t.counts.len(), 1);
        assert_eq!(t.count("E"), BigUint::from(1u32));
    }

    #[test]
    fn agrees_with_fast_path_small() {
        for (d, s) in [(1, 3), (2, 3)] {
            let fast = enumerate_trees(&EnumerationJob::new(d, s)).unwrap();
            let slow = enumerate_trees_bruteforce(d, s, 10).unwrap();
            assert_eq!(fast, slow, "d={d} s={s}");
        }
    }
}
