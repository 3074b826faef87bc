//! Step 1: enumerate s-dimer trees with a fixed first tile and tally them by
//! canonical overlap pattern.
//!
//! An s-dimer tree is an ordered sequence of located dimers in which every
//! tile after the first overlaps at least one earlier tile (so every prefix is
//! connected). Tiles may repeat. The first tile is the anchor, the dimer at
//! the origin along `anchor_axis`.
//!
//! The search tree is cut at a fixed prefix depth. Each prefix is an
//! independent task whose subtree is counted into a local table keyed by the
//! packed labelled pattern; tables are merged by addition, so the result does
//! not depend on scheduling or thread count. Finished tasks can be persisted
//! as a checkpoint together with the list of unfinished ones.

mod bruteforce;
mod packed;
mod symmetry;
mod tally;

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use rayon::prelude::*;

pub use bruteforce::enumerate_trees_bruteforce;
pub use packed::MAX_DIMENSION;
pub use tally::{FrontierTask, PatternTally, Reduction, Status, FORMAT_VERSION};

use crate::error::{Error, Result};
use crate::lattice::{Dimension, LocatedDimer};
use crate::pattern::canonicalize;
use packed::{decode_pattern, extend_code, push_tiles_at, Tile};

/// Default cap on the tree length.
pub const DEFAULT_MAX_TREE_LEN: usize = 6;

/// Packed pattern codes hold 2 bits for each of the `s(s-1)/2` pairs.
pub const HARD_MAX_TREE_LEN: usize = 8;

#[derive(Clone, Debug)]
pub struct EnumerationJob {
    pub d: usize,
    pub s: usize,
    /// Worker threads; `None` uses the available parallelism.
    pub threads: Option<usize>,
    /// Prefix tasks between checkpoint writes; `0` disables checkpoints.
    pub checkpoint_interval: usize,
    /// Destination of checkpoints and the final tally.
    pub output: Option<PathBuf>,
    pub reduction: Reduction,
    pub anchor_axis: usize,
    /// Depth at which the search is split into tasks (default `min(s, 3)`).
    pub task_depth: Option<usize>,
    pub max_len: usize,
    /// Return after this many checkpoint writes, leaving the run resumable.
    pub stop_after_checkpoints: Option<usize>,
}

impl EnumerationJob {
    pub fn new(d: usize, s: usize) -> Self {
        EnumerationJob {
            d,
            s,
            threads: None,
            checkpoint_interval: 0,
            output: None,
            reduction: Reduction::None,
            anchor_axis: 0,
            task_depth: None,
            max_len: DEFAULT_MAX_TREE_LEN,
            stop_after_checkpoints: None,
        }
    }

    fn validate(&self) -> Result<()> {
        Dimension::new(self.d)?;
        if self.d > MAX_DIMENSION {
            return Err(Error::CapExceeded {
                what: "dimension",
                value: self.d,
                max: MAX_DIMENSION,
            });
        }
        if self.s == 0 {
            return Err(Error::OutOfRange {
                what: "tree length",
                detail: "s must be at least 1".into(),
            });
        }
        let cap = self.max_len.min(HARD_MAX_TREE_LEN);
        if self.s > cap {
            return Err(Error::CapExceeded {
                what: "tree length",
                value: self.s,
                max: cap,
            });
        }
        if self.anchor_axis >= self.d {
            return Err(Error::InvalidAxis {
                axis: self.anchor_axis,
                d: self.d,
            });
        }
        if self.stop_after_checkpoints.is_some() && (self.output.is_none() || self.checkpoint_interval == 0) {
            return Err(Error::OutOfRange {
                what: "stop_after_checkpoints",
                detail: "requires an output path and a checkpoint interval".into(),
            });
        }
        Ok(())
    }

    fn anchor(&self) -> Tile {
        let d = Dimension::new(self.d).expect("validated");
        Tile::from_dimer(&LocatedDimer::anchor(d, self.anchor_axis).expect("validated"))
            .expect("origin packs")
    }
}

/// Enumerates every s-dimer tree starting at the anchor and tallies them by
/// canonical pattern. With an output path the final tally (and any
/// checkpoints) are written there.
pub fn enumerate_trees(job: &EnumerationJob) -> Result<PatternTally> {
    job.validate()?;
    let tasks = initial_tasks(job);
    let tally = PatternTally {
        d: job.d,
        s: job.s,
        anchor_axis: job.anchor_axis,
        status: Status::Checkpoint,
        reduction: job.reduction,
        counts: Default::default(),
        frontier: Vec::new(),
    };
    run_tasks(job, tally, tasks)
}

/// Continues the run persisted at `path`, writing progress back to `path`.
///
/// The checkpoint must agree with `job` on version, dimension, length,
/// anchor and reduction. A completed file is returned unchanged.
pub fn resume(path: &Path, job: &EnumerationJob) -> Result<PatternTally> {
    job.validate()?;
    let tally = PatternTally::read(path)?;
    let mismatch = |field: &'static str, expected: String, found: String| Error::CheckpointMismatch {
        path: path.into(),
        field,
        expected,
        found,
    };
    if tally.d != job.d {
        return Err(mismatch("d", job.d.to_string(), tally.d.to_string()));
    }
    if tally.s != job.s {
        return Err(mismatch("s", job.s.to_string(), tally.s.to_string()));
    }
    if tally.anchor_axis != job.anchor_axis {
        return Err(mismatch(
            "anchor",
            tally::anchor_label(job.anchor_axis),
            tally::anchor_label(tally.anchor_axis),
        ));
    }
    if tally.reduction != job.reduction {
        return Err(mismatch("reduction", job.reduction.to_string(), tally.reduction.to_string()));
    }
    if tally.is_complete() {
        return Ok(tally);
    }
    let tasks = tally
        .frontier
        .iter()
        .map(|t| {
            let prefix = t.prefix.iter().map(Tile::from_dimer).collect::<Result<Vec<_>>>()?;
            if prefix.first() != Some(&job.anchor()) {
                return Err(mismatch(
                    "frontier",
                    "prefixes starting at the anchor".into(),
                    format!("prefix starting at {}", t.prefix[0]),
                ));
            }
            Ok(Task {
                multiplicity: t.multiplicity,
                prefix,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let job = EnumerationJob {
        output: Some(path.to_path_buf()),
        ..job.clone()
    };
    let mut tally = tally;
    tally.frontier.clear();
    run_tasks(&job, tally, tasks)
}

#[derive(Clone, Debug)]
struct Task {
    multiplicity: u64,
    prefix: Vec<Tile>,
}

fn task_depth(job: &EnumerationJob) -> usize {
    job.task_depth.unwrap_or(3).clamp(1, job.s)
}

/// Prefixes of length `task_depth`, in DFS order, optionally reduced to one
/// representative per orbit of the anchor stabiliser.
fn initial_tasks(job: &EnumerationJob) -> Vec<Task> {
    let depth = task_depth(job);
    let mut prefixes = Vec::new();
    let mut stack = vec![job.anchor()];
    collect_prefixes(&mut stack, depth, job.d, &mut prefixes);
    match job.reduction {
        Reduction::None => prefixes
            .into_iter()
            .map(|prefix| Task {
                multiplicity: 1,
                prefix,
            })
            .collect(),
        Reduction::Hyperoctahedral => {
            let group = symmetry::anchor_stabilizer(job.d, job.anchor_axis);
            prefixes
                .into_iter()
                .filter_map(|prefix| {
                    symmetry::orbit_representative(&prefix, &group, job.d).map(|multiplicity| Task {
                        multiplicity,
                        prefix,
                    })
                })
                .collect()
        }
    }
}

fn collect_prefixes(stack: &mut Vec<Tile>, depth: usize, d: usize, out: &mut Vec<Vec<Tile>>) {
    if stack.len() == depth {
        out.push(stack.clone());
        return;
    }
    for t in successors(stack, d) {
        stack.push(t);
        collect_prefixes(stack, depth, d, out);
        stack.pop();
    }
}

/// Every tile touching some tile of `tiles`, sorted and deduplicated.
fn successors(tiles: &[Tile], d: usize) -> Vec<Tile> {
    let mut out = Vec::with_capacity(tiles.len() * 4 * d);
    for t in tiles {
        push_tiles_at(t.lo, d, &mut out);
        push_tiles_at(t.hi, d, &mut out);
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Labelled-pattern counts of all trees extending `task.prefix`.
fn run_task(task: &Task, s: usize, d: usize) -> HashMap<u64, u64> {
    let mut counts = HashMap::new();
    let mut tiles = Vec::with_capacity(s);
    let mut code = 0u64;
    for &t in &task.prefix {
        code = extend_code(code, &tiles, t);
        tiles.push(t);
    }
    extend(&mut tiles, code, s, d, &mut counts);
    counts
}

fn extend(tiles: &mut Vec<Tile>, code: u64, s: usize, d: usize, counts: &mut HashMap<u64, u64>) {
    if tiles.len() == s {
        *counts.entry(code).or_insert(0) += 1;
        return;
    }
    let last = tiles.len() + 1 == s;
    for t in successors(tiles, d) {
        let c = extend_code(code, tiles, t);
        if last {
            *counts.entry(c).or_insert(0) += 1;
        } else {
            tiles.push(t);
            extend(tiles, c, s, d, counts);
            tiles.pop();
        }
    }
}

fn run_tasks(job: &EnumerationJob, mut tally: PatternTally, tasks: Vec<Task>) -> Result<PatternTally> {
    let threads = job
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::OutOfRange {
            what: "thread pool",
            detail: e.to_string(),
        })?;

    let chunk = if job.checkpoint_interval == 0 || job.output.is_none() {
        tasks.len().max(1)
    } else {
        job.checkpoint_interval
    };
    let mut canonical: HashMap<u64, String> = HashMap::new();
    let mut checkpoints = 0usize;
    let mut done = 0usize;

    while done < tasks.len() {
        let end = (done + chunk).min(tasks.len());
        let batch = &tasks[done..end];
        let partial: Vec<HashMap<u64, u64>> =
            pool.install(|| batch.par_iter().map(|t| run_task(t, job.s, job.d)).collect());

        let mut merged: HashMap<u64, u128> = HashMap::new();
        for (task, local) in batch.iter().zip(partial) {
            for (code, n) in local {
                *merged.entry(code).or_insert(0) += n as u128 * task.multiplicity as u128;
            }
        }
        let fresh: Vec<u64> = merged.keys().filter(|c| !canonical.contains_key(c)).copied().collect();
        let keys: Vec<(u64, String)> = pool.install(|| {
            fresh
                .par_iter()
                .map(|&c| {
                    let key = canonicalize(&decode_pattern(job.s, c))
                        .expect("s within cap")
                        .key()
                        .to_string();
                    (c, key)
                })
                .collect()
        });
        canonical.extend(keys);
        for (code, n) in merged {
            *tally.counts.entry(canonical[&code].clone()).or_default() += BigUint::from(n);
        }
        done = end;

        if done < tasks.len() {
            if let Some(path) = &job.output {
                tally.frontier = tasks[done..]
                    .iter()
                    .map(|t| FrontierTask {
                        multiplicity: t.multiplicity,
                        prefix: t.prefix.iter().map(|x| x.to_dimer(job.d)).collect(),
                    })
                    .collect();
                tally.write(path)?;
                tally.frontier.clear();
                checkpoints += 1;
                if job.stop_after_checkpoints == Some(checkpoints) {
                    return PatternTally::read(path);
                }
            }
        }
    }

    tally.status = Status::Complete;
    tally.frontier.clear();
    if let Some(path) = &job.output {
        tally.write(path)?;
    }
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn totals(d: usize, s: usize) -> u64 {
        let t = enumerate_trees(&EnumerationJob::new(d, s)).unwrap();
        t.total().try_into().unwrap()
    }

    #[test]
    fn hand_counted_examples() {
        let t = enumerate_trees(&EnumerationJob::new(1, 2)).unwrap();
        assert_eq!(t.count("EE/EE"), BigUint::from(1u32));
        assert_eq!(t.count("EO/OE"), BigUint::from(2u32));
        assert_eq!(totals(1, 3), 11);
        let t = enumerate_trees(&EnumerationJob::new(2, 2)).unwrap();
        assert_eq!(t.count("EE/EE"), BigUint::from(1u32));
        assert_eq!(t.count("EO/OE"), BigUint::from(6u32));
        assert_eq!(t.counts.len(), 2);
    }

    #[test]
    fn single_tile() {
        for d in 1..=3 {
            let t = enumerate_trees(&EnumerationJob::new(d, 1)).unwrap();
            assert_eq!(t.counts.len(), 1);
            assert_eq!(t.count("E"), BigUint::from(1u32));
        }
    }

    #[test]
    fn s2_total_is_neighbourhood_size() {
        for d in 1..=4 {
            assert_eq!(totals(d, 2), 4 * d as u64 - 1);
        }
    }

    #[test]
    fn totals_grow_weakly() {
        for d in 1..=2 {
            let mut prev = 0;
            for s in 1..=4 {
                let t = totals(d, s);
                assert!(t >= prev);
                prev = t;
            }
        }
    }

    #[test]
    fn anchor_axis_does_not_matter() {
        let base = enumerate_trees(&EnumerationJob::new(3, 3)).unwrap();
        for axis in 1..3 {
            let mut job = EnumerationJob::new(3, 3);
            job.anchor_axis = axis;
            let t = enumerate_trees(&job).unwrap();
            assert_eq!(t.counts, base.counts);
            assert_eq!(t.anchor_axis, axis);
        }
    }

    #[test]
    fn reduction_matches_unreduced() {
        for (d, s) in [(2, 3), (2, 4), (3, 3), (3, 4)] {
            let plain = enumerate_trees(&EnumerationJob::new(d, s)).unwrap();
            let mut job = EnumerationJob::new(d, s);
            job.reduction = Reduction::Hyperoctahedral;
            let reduced = enumerate_trees(&job).unwrap();
            assert_eq!(plain.counts, reduced.counts, "d={d} s={s}");
        }
    }

    #[test]
    fn task_depth_does_not_matter() {
        let base = enumerate_trees(&EnumerationJob::new(2, 4)).unwrap();
        for depth in [1, 2, 4] {
            let mut job = EnumerationJob::new(2, 4);
            job.task_depth = Some(depth);
            assert_eq!(enumerate_trees(&job).unwrap().counts, base.counts);
        }
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(
            enumerate_trees(&EnumerationJob::new(1, 7)),
            Err(Error::CapExceeded { .. })
        ));
        let mut job = EnumerationJob::new(1, 9);
        job.max_len = 9;
        assert!(matches!(enumerate_trees(&job), Err(Error::CapExceeded { max: 8, .. })));
        assert!(enumerate_trees(&EnumerationJob::new(0, 2)).is_err());
        assert!(enumerate_trees(&EnumerationJob::new(10, 2)).is_err());
    }
}
