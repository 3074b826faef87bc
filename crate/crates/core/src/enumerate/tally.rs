//! Step-1 output: tree counts per canonical overlap pattern, and the
//! line-oriented file format shared by finished tallies and checkpoints.
//!
//! ```text
//! {"format_version":1,"d":2,"s":2,"anchor":"origin-axis0","status":"complete","reduction":"none"}
//! EE/EE<TAB>1
//! EO/OE<TAB>6
//! #sha256<TAB><hex digest of every preceding byte>
//! ```
//!
//! A checkpoint has `"status":"checkpoint"`, holds the merged counts of the
//! finished prefix tasks, and lists the unfinished ones after a
//! `--- frontier` line as `multiplicity<TAB>tile;tile;...` with tiles written
//! `x,y,..@axis`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::{LocatedDimer, Site};

pub const FORMAT_VERSION: u32 = 1;

const FRONTIER_SEPARATOR: &str = "--- frontier";
const CHECKSUM_PREFIX: &str = "#sha256\t";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Complete,
    Checkpoint,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    #[default]
    None,
    Hyperoctahedral,
}

impl std::fmt::Display for Reduction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Reduction::None => "none",
            Reduction::Hyperoctahedral => "hyperoctahedral",
        })
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: u32,
    d: usize,
    s: usize,
    anchor: String,
    status: Status,
    reduction: Reduction,
}

/// An unfinished prefix task: every tree starting with `prefix` still has to
/// be counted, `multiplicity` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontierTask {
    pub multiplicity: u64,
    pub prefix: Vec<LocatedDimer>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternTally {
    pub d: usize,
    pub s: usize,
    pub anchor_axis: usize,
    pub status: Status,
    pub reduction: Reduction,
    pub counts: BTreeMap<String, BigUint>,
    pub frontier: Vec<FrontierTask>,
}

pub(crate) fn anchor_label(axis: usize) -> String {
    format!("origin-axis{axis}")
}

impl PatternTally {
    pub fn is_complete(&self) -> bool {
        self.status == Status::Complete
    }

    /// Number of trees counted so far.
    pub fn total(&self) -> BigUint {
        self.counts.values().fold(BigUint::zero(), |a, b| a + b)
    }

    pub fn count(&self, key: &str) -> BigUint {
        self.counts.get(key).cloned().unwrap_or_default()
    }

    /// Serialized file contents, checksum line included.
    pub fn to_file_string(&self) -> String {
        let header = Header {
            format_version: FORMAT_VERSION,
            d: self.d,
            s: self.s,
            anchor: anchor_label(self.anchor_axis),
            status: self.status,
            reduction: self.reduction,
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for (k, v) in &self.counts {
            let _ = writeln!(out, "{k}\t{v}");
        }
        if self.status == Status::Checkpoint {
            out.push_str(FRONTIER_SEPARATOR);
            out.push('\n');
            for task in &self.frontier {
                let tiles: Vec<String> = task.prefix.iter().map(format_tile).collect();
                let _ = writeln!(out, "{}\t{}", task.multiplicity, tiles.join(";"));
            }
        }
        let digest = hex::encode(Sha256::digest(out.as_bytes()));
        let _ = writeln!(out, "{CHECKSUM_PREFIX}{digest}");
        out
    }

    /// Writes atomically (temporary file, then rename).
    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let tmp = path.with_extension("partial");
        fs::write(&tmp, self.to_file_string()).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let name = path.display().to_string();
        let perr = |line: usize, field: &'static str, msg: String| Error::Parse {
            path: name.clone(),
            line,
            field,
            msg,
        };

        let body_end = text
            .rfind(CHECKSUM_PREFIX)
            .filter(|&i| i == 0 || text.as_bytes()[i - 1] == b'\n')
            .ok_or_else(|| perr(text.lines().count(), "checksum", "missing checksum line".into()))?;
        let (body, tail) = text.split_at(body_end);
        let digest = tail[CHECKSUM_PREFIX.len()..].trim_end();
        if hex::encode(Sha256::digest(body.as_bytes())) != digest {
            return Err(Error::Checksum { path: path.into() });
        }

        let mut lines = body.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, first) = lines
            .next()
            .ok_or_else(|| perr(1, "header", "empty file".into()))?;
        let header: Header =
            serde_json::from_str(first).map_err(|e| perr(1, "header", e.to_string()))?;
        if header.format_version != FORMAT_VERSION {
            return Err(perr(
                1,
                "format_version",
                format!("unsupported version {}", header.format_version),
            ));
        }
        let anchor_axis = header
            .anchor
            .strip_prefix("origin-axis")
            .and_then(|a| a.parse::<usize>().ok())
            .filter(|&a| a < header.d)
            .ok_or_else(|| perr(1, "anchor", format!("unrecognised anchor {:?}", header.anchor)))?;

        let mut counts = BTreeMap::new();
        let mut frontier = Vec::new();
        let mut in_frontier = false;
        for (no, line) in lines {
            if line == FRONTIER_SEPARATOR {
                if header.status != Status::Checkpoint || in_frontier {
                    return Err(perr(no, "frontier", "unexpected frontier section".into()));
                }
                in_frontier = true;
                continue;
            }
            let (a, b) = line
                .split_once('\t')
                .ok_or_else(|| perr(no, "line", format!("expected two tab-separated fields: {line:?}")))?;
            if in_frontier {
                let multiplicity = a
                    .parse::<u64>()
                    .map_err(|e| perr(no, "multiplicity", e.to_string()))?;
                let prefix = b
                    .split(';')
                    .map(|t| parse_tile(t, header.d))
                    .collect::<std::result::Result<Vec<_>, String>>()
                    .map_err(|e| perr(no, "prefix", e))?;
                frontier.push(FrontierTask {
                    multiplicity,
                    prefix,
                });
            } else {
                let p = crate::pattern::OverlapPattern::parse_key(a)
                    .map_err(|e| perr(no, "pattern key", e.to_string()))?;
                if p.len() != header.s {
                    return Err(perr(no, "pattern key", format!("{a} has length {}, not {}", p.len(), header.s)));
                }
                let c = b
                    .parse::<BigUint>()
                    .map_err(|e| perr(no, "count", e.to_string()))?;
                if counts.insert(a.to_string(), c).is_some() {
                    return Err(perr(no, "pattern key", format!("duplicate key {a}")));
                }
            }
        }
        if header.status == Status::Checkpoint && !in_frontier {
            return Err(perr(0, "frontier", "checkpoint without frontier section".into()));
        }
        Ok(PatternTally {
            d: header.d,
            s: header.s,
            anchor_axis,
            status: header.status,
            reduction: header.reduction,
            counts,
            frontier,
        })
    }
}

fn format_tile(t: &LocatedDimer) -> String {
    let coords: Vec<String> = t.base().coords().iter().map(|c| c.to_string()).collect();
    format!("{}@{}", coords.join(","), t.axis())
}

fn parse_tile(text: &str, d: usize) -> std::result::Result<LocatedDimer, String> {
    let (coords, axis) = text
        .split_once('@')
        .ok_or_else(|| format!("tile {text:?} lacks '@axis'"))?;
    let coords = coords
        .split(',')
        .map(|c| c.parse::<i64>().map_err(|e| format!("tile {text:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if coords.len() != d {
        return Err(format!("tile {text:?} has {} coordinates, expected {d}", coords.len()));
    }
    let axis = axis
        .parse::<usize>()
        .map_err(|e| format!("tile {text:?}: {e}"))?;
    let site = Site::new(coords).map_err(|e| e.to_string())?;
    LocatedDimer::new(site, axis).map_err(|e| e.to_string())
}
