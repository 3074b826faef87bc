//! Tree tallies to per-site connected sums.
//!
//! For a complete tally of `s`-trees anchored at the origin with a fixed
//! axis, the per-site sum over connected ordered `s`-sequences is
//!
//! ```text
//! (1/s!) · Σ_P  d · count(P) · ordering_ratio(P) · W(P) · a^s
//! ```
//!
//! The factor `d` accounts for the anchor axes not enumerated, the ratio
//! turns tree counts into connected-sequence counts (see [`crate::pattern`]),
//! and `a` is `1/(2d)` for the activity `f` or `1` for the formal variable
//! `z`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::display::{Cell, Table, VALUE_DP};
use crate::enumerate::{enumerate_trees, resume, EnumerationJob, PatternTally};
use crate::error::{Error, Result};
use crate::pattern::{ordering_ratio, CanonicalPattern};
use crate::precision::{Decimal, WORKING_DIGITS};
use crate::weight::WeightFunctional;

/// Environment variable naming the tally cache directory.
pub const CACHE_ENV: &str = "DIMERLAB_CACHE";
const DEFAULT_CACHE_DIR: &str = "dimerlab-cache";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activity {
    /// `f = 1/(2d)` on every dimer.
    F,
    /// Formal variable; the sum is the coefficient of `z^s`.
    Z,
}

impl Activity {
    pub fn value(self, d: usize) -> BigRational {
        match self {
            Activity::F => BigRational::new(BigInt::one(), BigInt::from(2 * d)),
            Activity::Z => BigRational::one(),
        }
    }
}

impl FromStr for Activity {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "f" => Ok(Activity::F),
            "z" => Ok(Activity::Z),
            other => Err(format!("unknown activity {other:?} (expected f or z)")),
        }
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activity::F => "f",
            Activity::Z => "z",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectedSum {
    pub d: usize,
    pub s: usize,
    pub value: BigRational,
    pub weight_name: String,
    pub activity: Activity,
}

impl ConnectedSum {
    pub fn decimal(&self) -> Decimal {
        Decimal::from_rational(&self.value, WORKING_DIGITS)
    }
}

pub fn connected_sum(tally: &PatternTally, w: &dyn WeightFunctional, activity: Activity) -> Result<ConnectedSum> {
    if !tally.is_complete() {
        return Err(Error::IncompleteTally { d: tally.d, s: tally.s });
    }
    let terms: Vec<std::result::Result<BigRational, String>> = tally
        .counts
        .par_iter()
        .map(|(key, count)| {
            let p = CanonicalPattern::from_key(key).map_err(|e| format!("{key}: {e}"))?;
            let weight = w.weight(&p).ok_or_else(|| key.clone())?;
            let ratio = ordering_ratio(p.pattern()).map_err(|e| format!("{key}: {e}"))?;
            Ok(BigRational::from_integer(BigInt::from(count.clone())) * ratio * weight)
        })
        .collect();
    let mut missing = Vec::new();
    let mut sum = BigRational::zero();
    for t in terms {
        match t {
            Ok(x) => sum += x,
            Err(key) => missing.push(key),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingWeights(missing));
    }
    let s = tally.s;
    let fact: BigUint = (1..=s as u64).product();
    let a = activity.value(tally.d);
    let mut scale = BigRational::new(BigInt::from(tally.d), BigInt::from(fact));
    for _ in 0..s {
        scale *= &a;
    }
    Ok(ConnectedSum {
        d: tally.d,
        s,
        value: sum * scale,
        weight_name: w.name().to_string(),
        activity,
    })
}

/// Where complete tallies come from.
pub trait TallySource {
    fn tally(&self, d: usize, s: usize) -> Result<PatternTally>;
}

/// Tallies held in memory.
#[derive(Default)]
pub struct MemorySource {
    tallies: BTreeMap<(usize, usize), PatternTally>,
}

impl MemorySource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, tally: PatternTally) {
        self.tallies.insert((tally.d, tally.s), tally);
    }
}

impl TallySource for MemorySource {
    fn tally(&self, d: usize, s: usize) -> Result<PatternTally> {
        self.tallies.get(&(d, s)).cloned().ok_or(Error::MissingTally { d, s })
    }
}

/// Enumerates whatever is asked for, without touching disk.
#[derive(Clone, Debug, Default)]
pub struct OnDemand {
    pub threads: Option<usize>,
}

impl TallySource for OnDemand {
    fn tally(&self, d: usize, s: usize) -> Result<PatternTally> {
        let mut job = EnumerationJob::new(d, s);
        job.threads = self.threads;
        enumerate_trees(&job)
    }
}

/// A directory of `tally-d{d}-s{s}.tsv` files.
#[derive(Clone, Debug)]
pub struct CacheDir {
    pub dir: PathBuf,
    /// Enumerate (or resume) tallies that are absent or incomplete.
    pub compute_missing: bool,
    pub threads: Option<usize>,
}

impl CacheDir {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CacheDir {
            dir: dir.into(),
            compute_missing: false,
            threads: None,
        }
    }

    /// `$DIMERLAB_CACHE`, or `./dimerlab-cache`.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(CACHE_ENV).map_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR), PathBuf::from))
    }

    pub fn path_for(&self, d: usize, s: usize) -> PathBuf {
        self.dir.join(tally_file_name(d, s))
    }

    /// The cached complete tally with the largest `s` (then `d`).
    pub fn latest(&self) -> Result<Option<PathBuf>> {
        let entries = match std::fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(&self.dir, e)),
        };
        let mut best: Option<((usize, usize), PathBuf)> = None;
        for entry in entries {
            let path = entry.map_err(|e| Error::io(&self.dir, e))?.path();
            let Some((d, s)) = path.file_name().and_then(|n| n.to_str()).and_then(parse_tally_file_name) else {
                continue;
            };
            if !PatternTally::read(&path).map(|t| t.is_complete()).unwrap_or(false) {
                continue;
            }
            if best.as_ref().is_none_or(|(k, _)| (s, d) > *k) {
                best = Some(((s, d), path));
            }
        }
        Ok(best.map(|(_, p)| p))
    }
}

pub fn tally_file_name(d: usize, s: usize) -> String {
    format!("tally-d{d}-s{s}.tsv")
}

fn parse_tally_file_name(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix("tally-d")?.strip_suffix(".tsv")?;
    let (d, s) = rest.split_once("-s")?;
    Some((d.parse().ok()?, s.parse().ok()?))
}

impl TallySource for CacheDir {
    fn tally(&self, d: usize, s: usize) -> Result<PatternTally> {
        let path = self.path_for(d, s);
        let existing = if path.exists() {
            Some(PatternTally::read(&path)?)
        } else {
            None
        };
        match existing {
            Some(t) if t.is_complete() => Ok(t),
            _ if !self.compute_missing => match path.exists() {
                true => Err(Error::IncompleteTally { d, s }),
                false => Err(Error::MissingTally { d, s }),
            },
            existing => {
                std::fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
                let mut job = EnumerationJob::new(d, s);
                job.threads = self.threads;
                job.output = Some(path.clone());
                match existing {
                    Some(_) => resume(&path, &job),
                    None => enumerate_trees(&job),
                }
            }
        }
    }
}

/// `b_1..b_max_order` with `b_s` the formal-`z` connected sum.
pub fn pressure_series(
    d: usize,
    max_order: usize,
    w: &dyn WeightFunctional,
    source: &dyn TallySource,
) -> Result<Vec<ConnectedSum>> {
    (1..=max_order)
        .map(|s| connected_sum(&source.tally(d, s)?, w, Activity::Z))
        .collect()
}

pub fn sums_table(sums: &[ConnectedSum]) -> Table {
    let mut t = Table::new(["d", "s", "weight", "activity", "value", "decimal"]);
    for c in sums {
        t.push(vec![
            Cell::Int(c.d as i64),
            Cell::Int(c.s as i64),
            Cell::Text(c.weight_name.clone()),
            Cell::Text(c.activity.to_string()),
            Cell::Fraction(c.value.clone()),
            Cell::Fixed(c.decimal(), VALUE_DP),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::monomer_dimer_pressure_oracle;
    use crate::weight::{table_weight, DefaultPolicy, Ursell, WeightTable};

    fn rat(n: i64, m: i64) -> BigRational {
        BigRational::new(n.into(), m.into())
    }

    fn tally(d: usize, s: usize) -> PatternTally {
        enumerate_trees(&EnumerationJob::new(d, s)).unwrap()
    }

    #[test]
    fn spec_examples() {
        let u = Ursell::new();
        assert_eq!(connected_sum(&tally(1, 2), &u, Activity::F).unwrap().value, rat(-3, 8));
        assert_eq!(connected_sum(&tally(2, 2), &u, Activity::Z).unwrap().value, rat(-7, 1));
        for d in 1..=4 {
            let t = tally(d, 1);
            assert_eq!(connected_sum(&t, &u, Activity::F).unwrap().value, rat(1, 2));
            assert_eq!(connected_sum(&t, &u, Activity::Z).unwrap().value, rat(d as i64, 1));
        }
    }

    #[test]
    fn second_order_closed_form() {
        let u = Ursell::new();
        for d in 1..=4i64 {
            let b2 = connected_sum(&tally(d as usize, 2), &u, Activity::Z).unwrap().value;
            assert_eq!(b2, rat(-d * (4 * d - 1), 2));
        }
    }

    #[test]
    fn chain_matches_closed_form() {
        let series = pressure_series(1, 4, &Ursell::new(), &OnDemand::default()).unwrap();
        let got: Vec<_> = series.into_iter().map(|c| c.value).collect();
        assert_eq!(got, monomer_dimer_pressure_oracle(1, 4).unwrap().coefficients);
    }

    #[test]
    fn square_lattice_matches_torus() {
        let series = pressure_series(2, 3, &Ursell::new(), &OnDemand::default()).unwrap();
        let got: Vec<_> = series.into_iter().map(|c| c.value).collect();
        assert_eq!(got, monomer_dimer_pressure_oracle(2, 3).unwrap().coefficients);
    }

    #[test]
    fn ursell_signs_alternate() {
        let u = Ursell::new();
        for d in 1..=3 {
            for s in 1..=4 {
                let b = connected_sum(&tally(d, s), &u, Activity::Z).unwrap().value;
                let signed = if s % 2 == 1 { b } else { -b };
                assert!(signed > BigRational::zero(), "d={d} s={s}");
            }
        }
    }

    #[test]
    fn activity_f_rescales_z() {
        let u = Ursell::new();
        let t = tally(2, 3);
        let z = connected_sum(&t, &u, Activity::Z).unwrap().value;
        let f = connected_sum(&t, &u, Activity::F).unwrap().value;
        assert_eq!(f, z * rat(1, 64));
    }

    #[test]
    fn missing_weights_are_listed() {
        let t = tally(1, 2);
        let w = table_weight(WeightTable::new(DefaultPolicy::Error));
        match connected_sum(&t, &w, Activity::Z) {
            Err(Error::MissingWeights(keys)) => assert_eq!(keys, vec!["EE/EE", "EO/OE"]),
            other => panic!("{other:?}"),
        }
        let mut tbl = WeightTable::new(DefaultPolicy::Zero);
        tbl.insert("EO/OE", rat(1, 1)).unwrap();
        let c = connected_sum(&t, &table_weight(tbl), Activity::Z).unwrap();
        assert_eq!(c.value, rat(1, 1));
    }

    #[test]
    fn incomplete_and_missing_tallies() {
        let mut t = tally(1, 2);
        t.status = crate::enumerate::Status::Checkpoint;
        assert!(matches!(
            connected_sum(&t, &Ursell::new(), Activity::Z),
            Err(Error::IncompleteTally { d: 1, s: 2 })
        ));
        let mut mem = MemorySource::new();
        mem.insert(tally(1, 1));
        assert!(matches!(
            pressure_series(1, 2, &Ursell::new(), &mem),
            Err(Error::MissingTally { d: 1, s: 2 })
        ));
    }

    #[test]
    fn cache_dir_computes_and_reuses() {
        let dir = tempfile::tempdir().unwrap();
        let mut cache = CacheDir::new(dir.path());
        assert!(matches!(cache.tally(1, 3), Err(Error::MissingTally { d: 1, s: 3 })));
        assert_eq!(cache.latest().unwrap(), None);
        cache.compute_missing = true;
        let t = cache.tally(1, 3).unwrap();
        assert!(cache.path_for(1, 3).exists());
        cache.compute_missing = false;
        assert_eq!(cache.tally(1, 3).unwrap(), t);
        cache.compute_missing = true;
        cache.tally(2, 2).unwrap();
        assert_eq!(cache.latest().unwrap(), Some(cache.path_for(1, 3)));
    }

    #[test]
    fn table_output() {
        let c = connected_sum(&tally(1, 2), &Ursell::new(), Activity::F).unwrap();
        assert_eq!(
            sums_table(&[c]).to_tsv(),
            "d\ts\tweight\tactivity\tvalue\tdecimal\n1\t2\tursell\tf\t-3/8\t-0.3750000000\n"
        );
    }
}
