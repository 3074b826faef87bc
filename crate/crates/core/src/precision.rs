//! Fixed-point decimals on big integers, with the few transcendental values
//! the tables need: `ln` of positive rationals, π, and Catalan's constant.
//!
//! Every routine works with [`GUARD_DIGITS`] extra digits and truncating
//! integer division; each truncation costs at most one unit in the last
//! guard place, so results are accurate far beyond the requested digits.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Digits carried by default; the display rule needs at least 30.
pub const WORKING_DIGITS: u32 = 50;
pub const GUARD_DIGITS: u32 = 12;

fn pow10(n: u32) -> BigInt {
    BigInt::from(10u32).pow(n)
}

/// `mant · 10^-digits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    mant: BigInt,
    digits: u32,
}

impl Decimal {
    pub fn from_mantissa(mant: BigInt, digits: u32) -> Self {
        Decimal { mant, digits }
    }

    pub fn zero(digits: u32) -> Self {
        Decimal {
            mant: BigInt::zero(),
            digits,
        }
    }

    /// Nearest representable value, ties away from zero.
    pub fn from_rational(r: &BigRational, digits: u32) -> Self {
        Decimal {
            mant: round_half_away(&(r.numer() * pow10(digits)), r.denom()),
            digits,
        }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mant.clone(), pow10(self.digits))
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    pub fn rescale(&self, digits: u32) -> Decimal {
        if digits >= self.digits {
            Decimal {
                mant: &self.mant * pow10(digits - self.digits),
                digits,
            }
        } else {
            Decimal {
                mant: round_half_away(&self.mant, &pow10(self.digits - digits)),
                digits,
            }
        }
    }

    pub fn abs(&self) -> Decimal {
        Decimal {
            mant: self.mant.abs(),
            digits: self.digits,
        }
    }

    /// Division by an exact rational.
    pub fn div_rational(&self, r: &BigRational) -> Decimal {
        Decimal {
            mant: round_half_away(&(&self.mant * r.denom()), r.numer()),
            digits: self.digits,
        }
    }

    pub fn div(&self, other: &Decimal) -> Decimal {
        let d = self.digits.max(other.digits);
        let a = self.rescale(d);
        let b = other.rescale(d);
        Decimal {
            mant: round_half_away(&(a.mant * pow10(d)), &b.mant),
            digits: d,
        }
    }

    /// Rounds half away from zero to `dp` places and prints plainly.
    pub fn to_fixed(&self, dp: u32) -> String {
        let r = self.rescale(dp);
        let neg = r.mant.is_negative();
        let digits = r.mant.abs().to_string();
        let dp = dp as usize;
        let padded = if digits.len() <= dp {
            format!("{}{}", "0".repeat(dp + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int, frac) = padded.split_at(padded.len() - dp);
        let sign = if neg { "-" } else { "" };
        if dp == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_fixed(self.digits))
    }
}

impl Add for &Decimal {
    type Output = Decimal;
    fn add(self, o: &Decimal) -> Decimal {
        let d = self.digits.max(o.digits);
        Decimal {
            mant: self.rescale(d).mant + o.rescale(d).mant,
            digits: d,
        }
    }
}

impl Sub for &Decimal {
    type Output = Decimal;
    fn sub(self, o: &Decimal) -> Decimal {
        self + &(-o)
    }
}

impl Neg for &Decimal {
    type Output = Decimal;
    fn neg(self) -> Decimal {
        Decimal {
            mant: -&self.mant,
            digits: self.digits,
        }
    }
}

impl Mul for &Decimal {
    type Output = Decimal;
    fn mul(self, o: &Decimal) -> Decimal {
        let d = self.digits.max(o.digits);
        let raw = self.rescale(d).mant * o.rescale(d).mant;
        Decimal {
            mant: round_half_away(&raw, &pow10(d)),
            digits: d,
        }
    }
}

/// `n / q` rounded to the nearest integer, ties away from zero.
pub(crate) fn round_half_away(n: &BigInt, q: &BigInt) -> BigInt {
    let neg = (n.sign() == Sign::Minus) != (q.sign() == Sign::Minus);
    let (n, q) = (n.abs(), q.abs());
    let (quot, rem) = n.div_rem(&q);
    let up = rem * 2u32 >= q;
    let m = if up { quot + 1u32 } else { quot };
    if neg {
        -m
    } else {
        m
    }
}

/// `atanh(p/q) · 10^scale`, truncated, for `0 <= p/q <= 1/2`.
fn atanh_scaled(p: &BigInt, q: &BigInt, scale: u32) -> BigInt {
    let one = pow10(scale);
    let p2 = p * p;
    let q2 = q * q;
    let mut power = &one * p / q; // (p/q)^(2n+1)
    let mut sum = BigInt::zero();
    let mut n = 0u32;
    while !power.is_zero() {
        sum += &power / (2 * n + 1);
        power = power * &p2 / &q2;
        n += 1;
    }
    sum
}

/// `atan(1/k) · 10^scale`, truncated, for integer `k >= 2`.
fn atan_inv_scaled(k: u32, scale: u32) -> BigInt {
    let k2 = BigInt::from(k) * k;
    let mut power = pow10(scale) / k;
    let mut sum = BigInt::zero();
    let mut n = 0u32;
    while !power.is_zero() {
        let term = &power / (2 * n + 1);
        if n.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &k2;
        n += 1;
    }
    sum
}

/// Natural logarithm of a positive rational.
pub fn ln_rational(r: &BigRational, digits: u32) -> Decimal {
    assert!(r.is_positive(), "ln of non-positive value");
    let scale = digits + GUARD_DIGITS;
    // r = 2^k · m with 1 <= m < 2
    let mut k: i64 = r.numer().bits() as i64 - r.denom().bits() as i64;
    let two = BigRational::from_integer(2.into());
    let pow2 = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(BigInt::one() << e as usize)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
        }
    };
    let mut m = r / pow2(k);
    while m >= two {
        m /= &two;
        k += 1;
    }
    while m < BigRational::one() {
        m *= &two;
        k -= 1;
    }
    // ln m = 2 atanh((m-1)/(m+1)), argument in [0, 1/3)
    let y = (&m - BigRational::one()) / (&m + BigRational::one());
    let ln_m = atanh_scaled(y.numer(), y.denom(), scale) * 2;
    let ln2 = atanh_scaled(&BigInt::one(), &BigInt::from(3), scale) * 2;
    Decimal::from_mantissa(ln_m + ln2 * k, scale).rescale(digits)
}

/// π by Machin's formula.
pub fn pi(digits: u32) -> Decimal {
    let scale = digits + GUARD_DIGITS;
    let v = atan_inv_scaled(5, scale) * 16 - atan_inv_scaled(239, scale) * 4;
    Decimal::from_mantissa(v, scale).rescale(digits)
}

/// A value together with a rigorous bound on its absolute error.
#[derive(Clone, Debug)]
pub struct Bounded {
    pub value: Decimal,
    pub error: BigRational,
}

/// Catalan's constant from the rapidly convergent representation
///
/// ```text
/// G = π/(4√3) · Σ 3^-n/(2n+1)  +  3/8 · Σ 1/((2n+1)² C(2n,n))
/// ```
///
/// (the first sum is `(√3/2) ln(2+√3)`). Both series are summed until the
/// next term falls below `10^-(digits+guard)`; their tails are bounded by
/// geometric series with ratios 1/3 and 1/4.
pub fn catalan(digits: u32) -> Bounded {
    let scale = digits + GUARD_DIGITS;
    let one = pow10(scale);
    let ulp = BigRational::new(BigInt::one(), pow10(scale));

    // S1 = Σ 3^-n / (2n+1)
    let mut s1 = BigInt::zero();
    let mut power = one.clone();
    let mut n = 0u32;
    let mut ops1 = 0u32;
    loop {
        let term = &power / (2 * n + 1);
        if term.is_zero() {
            break;
        }
        s1 += term;
        power /= 3;
        n += 1;
        ops1 += 2;
    }
    // tail ≤ (3/2)·next term ≤ (3/2) ulp
    let tail1 = &ulp * BigRational::new(3.into(), 2.into());

    // S2 = Σ 1/((2n+1)^2 C(2n,n)); inv_binom tracks 1/C(2n,n)
    let mut s2 = BigInt::zero();
    let mut inv_binom = one.clone();
    let mut n = 0u64;
    let mut ops2 = 0u32;
    loop {
        let term = &inv_binom / BigInt::from((2 * n + 1) * (2 * n + 1));
        if term.is_zero() {
            break;
        }
        s2 += term;
        // C(2n+2,n+1) = C(2n,n)·(2n+1)(2n+2)/(n+1)^2
        inv_binom = inv_binom * BigInt::from((n + 1) * (n + 1)) / BigInt::from((2 * n + 1) * (2 * n + 2));
        n += 1;
        ops2 += 2;
    }
    let tail2 = &ulp * BigRational::new(4.into(), 3.into());

    let pi_v = pi(scale);
    let sqrt3 = (pow10(2 * scale) * 3u32).sqrt(); // floor(√3·10^scale)
    let s1d = Decimal::from_mantissa(s1, scale);
    let first = (&pi_v * &s1d).div(&Decimal::from_mantissa(sqrt3 * 4, scale));
    let second = Decimal::from_mantissa(s2 * 3 / 8, scale);
    let value = (&first + &second).rescale(digits);

    // truncation in each series term, the tails, π, √3 and the final
    // products each contribute a few ulps; 0.7 bounds π/(4√3) and 3/8
    let series_err = (BigRational::from_integer(ops1.into()) + tail1.clone() / &ulp) * &ulp
        + (BigRational::from_integer(ops2.into()) + tail2.clone() / &ulp) * &ulp;
    let arith_err = &ulp * BigRational::from_integer(16.into());
    let rounding = BigRational::new(BigInt::one(), pow10(digits) * 2);
    Bounded {
        value,
        error: series_err + arith_err + rounding,
    }
}

/// `λ₂ = G/π`, the entropy per site of dimer coverings of the square lattice.
pub fn lambda2(digits: u32) -> Bounded {
    let g = catalan(digits + 4);
    let p = pi(digits + 4);
    let value = g.value.div(&p).rescale(digits);
    // |G/π - Ĝ/π̂| ≤ err_G/π̂ + G·err_π/π̂² + rounding, and 1/π < 1/3
    let ulp = BigRational::new(BigInt::one(), pow10(digits + 4));
    let error = &g.error / BigInt::from(3) + &ulp * BigRational::from_integer(4.into())
        + BigRational::new(BigInt::one(), pow10(digits) * 2);
    Bounded { value, error }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn fixed_rounding_is_half_away_from_zero() {
        assert_eq!(Decimal::from_rational(&rat(12345, 100000), 10).to_fixed(4), "0.1235");
        assert_eq!(Decimal::from_rational(&rat(-12345, 100000), 10).to_fixed(4), "-0.1235");
        assert_eq!(Decimal::from_rational(&rat(12344, 100000), 10).to_fixed(4), "0.1234");
        assert_eq!(Decimal::from_rational(&rat(-3, 8), 10).to_fixed(10), "-0.3750000000");
        assert_eq!(Decimal::from_rational(&rat(7, 1), 3).to_fixed(0), "7");
        assert_eq!(Decimal::from_rational(&rat(1, 3), 5).to_fixed(2), "0.33");
    }

    #[test]
    fn known_constants() {
        assert_eq!(
            pi(40).to_fixed(40),
            "3.1415926535897932384626433832795028841972"
        );
        assert_eq!(
            ln_rational(&rat(2, 1), 40).to_fixed(40),
            "0.6931471805599453094172321214581765680755"
        );
        assert_eq!(
            ln_rational(&rat(10, 1), 30).to_fixed(30),
            "2.302585092994045684017991454684"
        );
        assert_eq!(ln_rational(&rat(1, 1), 20).to_fixed(20), "0.00000000000000000000");
        assert_eq!(
            ln_rational(&rat(1, 6), 20).to_fixed(20),
            "-1.79175946922805500081"
        );
    }

    #[test]
    fn catalan_matches_reference_digits() {
        let g = catalan(40);
        assert_eq!(g.value.to_fixed(40), "0.9159655941772190150546035149323841107741");
        assert!(g.error < BigRational::new(1.into(), pow10(39)));
    }

    #[test]
    fn catalan_agrees_with_alternating_series() {
        // slow but independent: Σ (-1)^k/(2k+1)^2 with the averaged tail
        let mut s = 0.0f64;
        let n = 200_000;
        for k in 0..n {
            let t = 1.0 / ((2 * k + 1) as f64).powi(2);
            s += if k % 2 == 0 { t } else { -t };
        }
        s += 0.5 / ((2 * n + 1) as f64).powi(2) * if n % 2 == 0 { 1.0 } else { -1.0 };
        assert!((catalan(20).value.to_f64() - s).abs() < 1e-12);
    }

    #[test]
    fn lambda2_digits() {
        let l = lambda2(30);
        assert_eq!(l.value.to_fixed(10), "0.2915609040");
        assert_eq!(l.value.to_fixed(5), "0.29156");
        assert!(l.error < BigRational::new(1.into(), pow10(25)));
    }
}
