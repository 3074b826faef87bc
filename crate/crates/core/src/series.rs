//! Reference tables for the 1/d expansion of the dimer entropy λ_d: the
//! per-site cluster quantities J̄_i for d = 1, 2, 3, their general-dimension
//! polynomials in 1/d, the partial-sum approximants A_r, the stored graded
//! approximants B_r, and diagnostics comparing them with λ₂ and the λ₃
//! bounds.
//!
//! The expansion coefficients c₁..c₃ and the B values are stored data: they
//! come out of a generating formula that is not reproduced here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::display::{Cell, Table, TABLE_DP};
use crate::error::{Error, Result};
use crate::precision::{lambda2, ln_rational, Decimal, WORKING_DIGITS};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// (d, i, numerator, denominator)
const JBAR_TABLE: [(usize, usize, i64, i64); 18] = [
    (1, 1, 0, 1),
    (1, 2, 1, 8),
    (1, 3, 1, 12),
    (1, 4, -3, 64),
    (1, 5, -13, 80),
    (1, 6, -19, 192),
    (2, 1, 0, 1),
    (2, 2, 1, 16),
    (2, 3, 1, 48),
    (2, 4, -9, 512),
    (2, 5, -23, 1280),
    (2, 6, 25, 3072),
    (3, 1, 0, 1),
    (3, 2, 1, 24),
    (3, 3, 1, 108),
    (3, 4, -5, 576),
    (3, 5, -11, 2160),
    (3, 6, 175, 46656),
];

/// J̄_i as a polynomial in 1/d: `(power of 1/d, numerator, denominator)`.
const JBAR_GENERAL: [&[(u32, i64, i64)]; 6] = [
    &[],
    &[(1, 1, 8)],
    &[(2, 1, 12)],
    &[(2, -3, 32), (3, 3, 64)],
    &[(3, -1, 8), (4, -3, 80)],
    &[(3, 7, 48), (4, -5, 64), (5, -1, 6)],
];

/// Coefficients of 1/d, 1/d², 1/d³ in the asymptotic expansion of λ_d
/// beyond `ln(2d)/2 - 1/2`.
pub const ASYMPTOTIC_COEFFICIENTS: [(i64, i64); 3] = [(1, 8), (5, 96), (5, 64)];

/// Stored B_r, r = 0..5, for d = 2 and d = 3.
const B_REFERENCE: [(usize, [&str; 6]); 2] = [
    (2, ["0.1931", "0.2556", "0.2921", "0.2992", "0.2905", "0.2814"]),
    (3, ["0.3959", "0.4375", "0.4538", "0.4524", "0.4468", "0.4445"]),
];

/// Published rigorous bounds on λ₃, in millionths.
pub const LAMBDA3_BOUNDS_MICRO: (i64, i64) = (440_075, 457_547);

pub fn lambda3_bounds() -> (BigRational, BigRational) {
    (
        q(LAMBDA3_BOUNDS_MICRO.0, 1_000_000),
        q(LAMBDA3_BOUNDS_MICRO.1, 1_000_000),
    )
}

pub fn jbar(d: usize, i: usize) -> Result<BigRational> {
    JBAR_TABLE
        .iter()
        .find(|&&(dd, ii, _, _)| dd == d && ii == i)
        .map(|&(_, _, n, m)| q(n, m))
        .ok_or_else(|| Error::OutOfRange {
            what: "J̄ table index",
            detail: format!("(d={d}, i={i}); the table covers d in 1..=3, i in 1..=6"),
        })
}

/// The `(d, i)` pairs of the stored J̄ table.
pub fn jbar_pairs() -> Vec<(usize, usize)> {
    JBAR_TABLE.iter().map(|&(d, i, _, _)| (d, i)).collect()
}

/// Coefficients `(power, coefficient)` of J̄_i in powers of 1/d.
pub fn jbar_general_terms(i: usize) -> Result<Vec<(u32, BigRational)>> {
    if !(1..=6).contains(&i) {
        return Err(Error::OutOfRange {
            what: "J̄ formula index",
            detail: format!("i={i}; formulas exist for i in 1..=6"),
        });
    }
    Ok(JBAR_GENERAL[i - 1]
        .iter()
        .map(|&(p, n, m)| (p, q(n, m)))
        .collect())
}

pub fn jbar_general(i: usize, d: usize) -> Result<BigRational> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let inv_d = q(1, d as i64);
    Ok(jbar_general_terms(i)?
        .into_iter()
        .fold(BigRational::zero(), |acc, (p, c)| acc + c * num_traits::pow(inv_d.clone(), p as usize)))
}

pub fn asymptotic_coefficient(i: usize) -> Option<BigRational> {
    ASYMPTOTIC_COEFFICIENTS.get(i.wrapping_sub(1)).map(|&(n, m)| q(n, m))
}

/// `A_r(d) = ln(2d)/2 + rational`, kept symbolically alongside its value.
#[derive(Clone, Debug)]
pub struct Approximant {
    pub d: usize,
    pub r: usize,
    /// `-1/2 + Σ_{i≤r} c_i/d^i`
    pub rational_part: BigRational,
    pub value: Decimal,
}

impl Approximant {
    pub fn display(&self) -> String {
        self.value.to_fixed(TABLE_DP)
    }

    pub fn exact_form(&self) -> String {
        let r = &self.rational_part;
        let (sign, mag) = if r < &BigRational::zero() { ("-", -r.clone()) } else { ("+", r.clone()) };
        format!("ln({})/2 {sign} {}/{}", 2 * self.d, mag.numer(), mag.denom())
    }
}

pub fn a_series(d: usize, r: usize) -> Result<Approximant> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if r > ASYMPTOTIC_COEFFICIENTS.len() {
        return Err(Error::OutOfRange {
            what: "A-series order",
            detail: format!("r={r}; coefficients are known only through r=3"),
        });
    }
    let inv_d = q(1, d as i64);
    let mut rational_part = q(-1, 2);
    for i in 1..=r {
        rational_part += asymptotic_coefficient(i).expect("i <= 3") * num_traits::pow(inv_d.clone(), i);
    }
    let half_ln = ln_rational(&BigRational::from_integer((2 * d).into()), WORKING_DIGITS)
        .div_rational(&q(2, 1));
    let value = &half_ln + &Decimal::from_rational(&rational_part, WORKING_DIGITS);
    Ok(Approximant {
        d,
        r,
        rational_part,
        value,
    })
}

/// Stored B_r as printed (4 places).
pub fn b_reference_str(d: usize, r: usize) -> Result<&'static str> {
    B_REFERENCE
        .iter()
        .find(|(dd, _)| *dd == d)
        .and_then(|(_, vals)| vals.get(r).copied())
        .ok_or_else(|| Error::OutOfRange {
            what: "B reference index",
            detail: format!("(d={d}, r={r}); stored for d in 2..=3, r in 0..=5"),
        })
}

/// Stored B_r as an exact rational (the printed decimal).
pub fn b_reference(d: usize, r: usize) -> Result<BigRational> {
    let s = b_reference_str(d, r)?;
    let digits: i64 = s.replace("0.", "").parse().expect("stored literal");
    Ok(q(digits, 10_000))
}

pub fn b_reference_len() -> usize {
    B_REFERENCE[0].1.len()
}

pub fn lambda2_value() -> Decimal {
    lambda2(WORKING_DIGITS).value
}

pub fn in_lambda3_bounds(x: &BigRational) -> bool {
    let (lo, hi) = lambda3_bounds();
    &lo <= x && x <= &hi
}

/// One row of the transferred λ₃ estimate `B_r(3) - (B_r(2) - λ₂)`.
#[derive(Clone, Debug)]
pub struct TransferredEstimate {
    pub r: usize,
    pub estimate: Decimal,
    pub in_bounds: bool,
}

#[derive(Clone, Debug)]
pub struct Diagnostics {
    pub d: usize,
    pub a: Vec<Decimal>,
    pub a_diffs: Vec<Decimal>,
    pub b: Vec<BigRational>,
    pub b_diffs: Vec<BigRational>,
    /// Index of the largest B_r.
    pub b_peak: usize,
    /// B strictly decreases after the peak.
    pub b_decreasing_after_peak: bool,
    /// `A_r - λ₂` and `B_r - λ₂` (d = 2 only).
    pub a_errors: Option<Vec<Decimal>>,
    pub b_errors: Option<Vec<Decimal>>,
    /// Which A_r fall inside the λ₃ bounds (d = 3 only).
    pub a_in_bounds: Option<Vec<bool>>,
    pub transferred: Vec<TransferredEstimate>,
}

pub fn diagnostics(d: usize) -> Result<Diagnostics> {
    if !(2..=3).contains(&d) {
        return Err(Error::OutOfRange {
            what: "diagnostics dimension",
            detail: format!("d={d}; B values exist for d in 2..=3"),
        });
    }
    let a: Vec<Decimal> = (0..=3).map(|r| a_series(d, r).map(|x| x.value)).collect::<Result<_>>()?;
    let a_diffs = a.windows(2).map(|w| &w[1] - &w[0]).collect();
    let n = b_reference_len();
    let b: Vec<BigRational> = (0..n).map(|r| b_reference(d, r)).collect::<Result<_>>()?;
    let b_diffs = b.windows(2).map(|w| &w[1] - &w[0]).collect();
    let b_peak = (0..n).fold(0, |best, r| if b[r] > b[best] { r } else { best });
    let b_decreasing_after_peak = b[b_peak..].windows(2).all(|w| w[1] < w[0]);

    let lam2 = lambda2_value();
    let (a_errors, b_errors, a_in_bounds) = if d == 2 {
        (
            Some(a.iter().map(|x| x - &lam2).collect()),
            Some(
                b.iter()
                    .map(|x| &Decimal::from_rational(x, WORKING_DIGITS) - &lam2)
                    .collect(),
            ),
            None,
        )
    } else {
        (None, None, Some(a.iter().map(|x| in_lambda3_bounds(&x.to_rational())).collect()))
    };

    let transferred = (0..n)
        .map(|r| -> Result<TransferredEstimate> {
            let b3 = Decimal::from_rational(&b_reference(3, r)?, WORKING_DIGITS);
            let b2 = Decimal::from_rational(&b_reference(2, r)?, WORKING_DIGITS);
            let estimate = &b3 - &(&b2 - &lam2);
            let in_bounds = in_lambda3_bounds(&estimate.to_rational());
            Ok(TransferredEstimate { r, estimate, in_bounds })
        })
        .collect::<Result<_>>()?;

    Ok(Diagnostics {
        d,
        a,
        a_diffs,
        b,
        b_diffs,
        b_peak,
        b_decreasing_after_peak,
        a_errors,
        b_errors,
        a_in_bounds,
        transferred,
    })
}

impl Diagnostics {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new([
            "d",
            "r",
            "A_r",
            "A_r-A_{r-1}",
            "B_r",
            "B_r-B_{r-1}",
            "A_r-lambda2",
            "B_r-lambda2",
            "A_r_in_lambda3_bounds",
            "lambda3_transfer",
            "transfer_in_bounds",
        ]);
        let dp = TABLE_DP;
        for r in 0..self.b.len() {
            let opt_dec = |v: Option<&Decimal>| v.map_or(Cell::Empty, |x| Cell::Fixed(x.clone(), dp));
            let diff_b = if r == 0 {
                Cell::Empty
            } else {
                Cell::Fixed(Decimal::from_rational(&self.b_diffs[r - 1], WORKING_DIGITS), dp)
            };
            let diff_a = if r == 0 {
                Cell::Empty
            } else {
                opt_dec(self.a_diffs.get(r - 1))
            };
            t.push(vec![
                Cell::Int(self.d as i64),
                Cell::Int(r as i64),
                opt_dec(self.a.get(r)),
                diff_a,
                Cell::Fixed(Decimal::from_rational(&self.b[r], WORKING_DIGITS), dp),
                diff_b,
                opt_dec(self.a_errors.as_ref().and_then(|e| e.get(r))),
                opt_dec(self.b_errors.as_ref().and_then(|e| e.get(r))),
                self.a_in_bounds
                    .as_ref()
                    .and_then(|v| v.get(r))
                    .map_or(Cell::Empty, |b| Cell::Bool(*b)),
                Cell::Fixed(self.transferred[r].estimate.clone(), dp),
                Cell::Bool(self.transferred[r].in_bounds),
            ]);
        }
        t
    }
}

/// Exact values with 4-place (or 10-place) display, for the emitters.
pub fn jbar_table() -> Table {
    let mut t = Table::new(["d", "i", "jbar", "decimal"]);
    for &(d, i, n, m) in &JBAR_TABLE {
        let v = q(n, m);
        t.push(vec![
            Cell::Int(d as i64),
            Cell::Int(i as i64),
            Cell::Fraction(v.clone()),
            Cell::Fixed(Decimal::from_rational(&v, WORKING_DIGITS), crate::display::VALUE_DP),
        ]);
    }
    t
}

/// The general-dimension polynomials, or their values at `d`.
pub fn jbar_general_table(d: Option<usize>) -> Result<Table> {
    match d {
        None => {
            let mut t = Table::new(["i", "power_of_1/d", "coefficient"]);
            for i in 1..=6 {
                for (p, c) in jbar_general_terms(i)? {
                    t.push(vec![Cell::Int(i as i64), Cell::Int(p as i64), Cell::Fraction(c)]);
                }
            }
            Ok(t)
        }
        Some(d) => {
            let mut t = Table::new(["d", "i", "jbar", "decimal"]);
            for i in 1..=6 {
                let v = jbar_general(i, d)?;
                t.push(vec![
                    Cell::Int(d as i64),
                    Cell::Int(i as i64),
                    Cell::Fraction(v.clone()),
                    Cell::Fixed(Decimal::from_rational(&v, WORKING_DIGITS), crate::display::VALUE_DP),
                ]);
            }
            Ok(t)
        }
    }
}

pub fn a_series_table(d: usize) -> Result<Table> {
    let mut t = Table::new(["d", "r", "A_r", "exact"]);
    for r in 0..=3 {
        let a = a_series(d, r)?;
        t.push(vec![
            Cell::Int(d as i64),
            Cell::Int(r as i64),
            Cell::Fixed(a.value.clone(), TABLE_DP),
            Cell::Text(a.exact_form()),
        ]);
    }
    Ok(t)
}

pub fn b_reference_table(d: Option<usize>) -> Result<Table> {
    let mut t = Table::new(["d", "r", "B_r"]);
    let dims: Vec<usize> = match d {
        Some(d) => vec![d],
        None => vec![2, 3],
    };
    for d in dims {
        for r in 0..b_reference_len() {
            let v = b_reference(d, r)?;
            t.push(vec![
                Cell::Int(d as i64),
                Cell::Int(r as i64),
                Cell::Fixed(Decimal::from_rational(&v, WORKING_DIGITS), TABLE_DP),
            ]);
        }
    }
    Ok(t)
}

/// Everything known for one dimension: J̄_i, A_r and (where stored) B_r.
pub fn series_overview(d: usize) -> Result<Table> {
    let mut t = Table::new(["d", "quantity", "index", "exact", "decimal"]);
    let dd = d as i64;
    for i in 1..=6 {
        let v = jbar_general(i, d)?;
        t.push(vec![
            Cell::Int(dd),
            Cell::Text("jbar".into()),
            Cell::Int(i as i64),
            Cell::Fraction(v.clone()),
            Cell::Fixed(Decimal::from_rational(&v, WORKING_DIGITS), crate::display::VALUE_DP),
        ]);
    }
    for r in 0..=3 {
        let a = a_series(d, r)?;
        t.push(vec![
            Cell::Int(dd),
            Cell::Text("A".into()),
            Cell::Int(r as i64),
            Cell::Text(a.exact_form()),
            Cell::Fixed(a.value, TABLE_DP),
        ]);
    }
    if (2..=3).contains(&d) {
        for r in 0..b_reference_len() {
            let v = b_reference(d, r)?;
            t.push(vec![
                Cell::Int(dd),
                Cell::Text("B".into()),
                Cell::Int(r as i64),
                Cell::Empty,
                Cell::Fixed(Decimal::from_rational(&v, WORKING_DIGITS), TABLE_DP),
            ]);
        }
    }
    Ok(t)
}
