//! Independent exact references used to check the cluster pipeline.

pub mod matching;
pub mod pressure;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::precision::{lambda2, Bounded};

pub use matching::{
    count_matchings_2d, count_matchings_cycle, cycle_entropy, per_site_entropy_2d, EntropyRow, EntropyTable,
    Geometry, MatchingCount, DEFAULT_WIDTH_CAP,
};
pub use pressure::{monomer_dimer_pressure_oracle, PressureOracleSeries};

/// Digits carried for λ₂.
pub const LAMBDA2_DIGITS: u32 = 40;

/// `λ₂ = G/π` with its error bound.
pub fn lambda2_constant() -> Bounded {
    lambda2(LAMBDA2_DIGITS)
}

pub fn lambda3_bounds_check(x: &BigRational) -> bool {
    crate::series::in_lambda3_bounds(x)
}

/// Parses a plain decimal such as `.4462`, `0.440075` or `-2` exactly.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = |msg: &str| Error::OutOfRange {
        what: "decimal",
        detail: format!("{s:?}: {msg}"),
    };
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad("no digits"));
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad("not a decimal number"));
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad("not a decimal number"))?;
    let scale = BigInt::from(10).pow(frac.len() as u32);
    let r = BigRational::new(digits, scale);
    Ok(if neg { -r } else { r })
}
