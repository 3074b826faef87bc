//! Perfect-matching (domino tiling) counts on `m × n` grids and tori.
//!
//! Two independent routes:
//!
//! * [`count_open_profile`] sweeps the grid cell by cell, carrying a broken
//!   profile of `m` bits (which cells of the frontier are already covered);
//! * [`count_transfer`] builds the column-to-column transfer matrix once as
//!   sparse successor lists and iterates it. On the torus the count is the
//!   trace of `T^n`; rotations and reflections of the rows commute with `T`,
//!   so only one boundary profile per dihedral orbit is iterated.
//!
//! On a torus with a side of length 2 the two parallel edges between the same
//! pair of sites are distinct dimers (the quotient `Z²/(2Z × nZ)`).

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default cap on the profile width `m`.
pub const DEFAULT_WIDTH_CAP: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Open,
    Torus,
}

impl std::str::FromStr for Geometry {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "open" | "grid" => Ok(Geometry::Open),
            "torus" => Ok(Geometry::Torus),
            other => Err(format!("unknown geometry {other:?} (expected open or torus)")),
        }
    }
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Geometry::Open => "open",
            Geometry::Torus => "torus",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingCount {
    pub geometry: Geometry,
    pub m: usize,
    pub n: usize,
    pub count: BigUint,
}

fn check_width(m: usize) -> Result<()> {
    if m > DEFAULT_WIDTH_CAP {
        return Err(Error::CapExceeded {
            what: "profile width",
            value: m,
            max: DEFAULT_WIDTH_CAP,
        });
    }
    Ok(())
}

/// Exact number of perfect matchings of the `m × n` grid graph or torus.
pub fn count_matchings_2d(geometry: Geometry, m: usize, n: usize) -> Result<MatchingCount> {
    check_width(m)?;
    let count = match geometry {
        Geometry::Open => count_open_profile(m, n)?,
        Geometry::Torus => count_transfer(Geometry::Torus, m, n)?,
    };
    Ok(MatchingCount {
        geometry,
        m,
        n,
        count,
    })
}

/// Broken-profile DP on the open grid. Bits below the current row describe
/// the next column, bits from the current row upward the current column.
pub fn count_open_profile(m: usize, n: usize) -> Result<BigUint> {
    check_width(m)?;
    if m == 0 || n == 0 {
        return Ok(BigUint::from(1u32));
    }
    let size = 1usize << m;
    let mut dp = vec![BigUint::zero(); size];
    dp[0] = BigUint::from(1u32);
    for col in 0..n {
        let last_col = col + 1 == n;
        for row in 0..m {
            let mut next = vec![BigUint::zero(); size];
            for (mask, ways) in dp.iter().enumerate() {
                if ways.is_zero() {
                    continue;
                }
                let bit = 1 << row;
                if mask & bit != 0 {
                    next[mask & !bit] += ways;
                    continue;
                }
                if !last_col {
                    next[mask | bit] += ways;
                }
                if row + 1 < m && mask & (bit << 1) == 0 {
                    next[mask | (bit << 1)] += ways;
                }
            }
            dp = next;
        }
    }
    Ok(dp.swap_remove(0))
}

/// Successor lists of the column transfer matrix: for each incoming profile,
/// the outgoing profiles and the number of ways to fill the column.
fn transfer_lists(m: usize, wrap: bool) -> Vec<Vec<(u32, u32)>> {
    fn fill(row: usize, m: usize, used: u32, out: u32, acc: &mut Vec<u32>) {
        if row == m {
            acc.push(out);
            return;
        }
        let bit = 1u32 << row;
        if used & bit != 0 {
            fill(row + 1, m, used, out, acc);
            return;
        }
        fill(row + 1, m, used | bit, out | bit, acc);
        if row + 1 < m && used & (bit << 1) == 0 {
            fill(row + 2, m, used | bit | (bit << 1), out, acc);
        }
    }

    (0..1u32 << m)
        .map(|incoming| {
            let mut outs = Vec::new();
            fill(0, m, incoming, 0, &mut outs);
            let top = 1u32 << (m - 1);
            if wrap && m >= 2 && incoming & 1 == 0 && incoming & top == 0 {
                fill(0, m, incoming | 1 | top, 0, &mut outs);
            }
            outs.sort_unstable();
            let mut merged: Vec<(u32, u32)> = Vec::new();
            for o in outs {
                match merged.last_mut() {
                    Some((p, k)) if *p == o => *k += 1,
                    _ => merged.push((o, 1)),
                }
            }
            merged
        })
        .collect()
}

trait Counter: Clone {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    /// `self += other * k`; `false` on overflow.
    fn add_scaled(&mut self, other: &Self, k: u32) -> bool;
    fn to_big(&self) -> BigUint;
}

impl Counter for u128 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn add_scaled(&mut self, other: &Self, k: u32) -> bool {
        match other.checked_mul(k as u128).and_then(|x| self.checked_add(x)) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Counter for BigUint {
    fn nil() -> Self {
        BigUint::zero()
    }
    fn unit() -> Self {
        BigUint::from(1u32)
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_scaled(&mut self, other: &Self, k: u32) -> bool {
        *self += other * k;
        true
    }
    fn to_big(&self) -> BigUint {
        self.clone()
    }
}

/// `(T^steps)[start][end]`, or `None` on overflow.
fn iterate<C: Counter>(lists: &[Vec<(u32, u32)>], start: usize, steps: usize, end: usize) -> Option<C> {
    let mut v = vec![C::nil(); lists.len()];
    v[start] = C::unit();
    for _ in 0..steps {
        let mut w = vec![C::nil(); lists.len()];
        for (from, x) in v.iter().enumerate() {
            if x.is_nil() {
                continue;
            }
            for &(to, k) in &lists[from] {
                if !w[to as usize].add_scaled(x, k) {
                    return None;
                }
            }
        }
        v = w;
    }
    Some(v.swap_remove(end))
}

fn rotate(mask: u32, m: usize) -> u32 {
    let full = (1u32 << m) - 1;
    ((mask << 1) | (mask >> (m - 1))) & full
}

fn reflect(mask: u32, m: usize) -> u32 {
    (0..m).filter(|&r| mask >> r & 1 == 1).fold(0, |acc, r| acc | 1 << (m - 1 - r))
}

/// Dihedral orbit representatives (smallest element) with orbit sizes.
fn profile_orbits(m: usize) -> Vec<(u32, u64)> {
    let mut out = Vec::new();
    for mask in 0..1u32 << m {
        let mut images = Vec::with_capacity(2 * m);
        let mut x = mask;
        for _ in 0..m {
            images.push(x);
            images.push(reflect(x, m));
            x = rotate(x, m);
        }
        if images.iter().all(|&y| y >= mask) {
            images.sort_unstable();
            images.dedup();
            out.push((mask, images.len() as u64));
        }
    }
    out
}

/// Transfer-matrix count; on the torus both directions wrap around.
pub fn count_transfer(geometry: Geometry, m: usize, n: usize) -> Result<BigUint> {
    check_width(m)?;
    if m == 0 || n == 0 {
        return Ok(BigUint::from(1u32));
    }
    match geometry {
        Geometry::Open => {
            let lists = transfer_lists(m, false);
            Ok(match iterate::<u128>(&lists, 0, n, 0) {
                Some(c) => c.to_big(),
                None => iterate::<BigUint>(&lists, 0, n, 0).expect("no overflow"),
            })
        }
        Geometry::Torus => {
            if n < 2 {
                return Err(Error::OutOfRange {
                    what: "torus length",
                    detail: format!("n={n}; a torus needs n >= 2"),
                });
            }
            let lists = transfer_lists(m, true);
            let orbits = profile_orbits(m);
            let small: Option<u128> = orbits.iter().try_fold(0u128, |acc, &(s, size)| {
                iterate::<u128>(&lists, s as usize, n, s as usize)
                    .and_then(|c| c.checked_mul(size as u128))
                    .and_then(|c| acc.checked_add(c))
            });
            Ok(match small {
                Some(c) => BigUint::from(c),
                None => orbits.iter().fold(BigUint::zero(), |acc, &(s, size)| {
                    acc + iterate::<BigUint>(&lists, s as usize, n, s as usize).expect("no overflow") * size
                }),
            })
        }
    }
}

#[derive(Clone, Debug)]
pub struct EntropyRow {
    pub size: usize,
    pub count: BigUint,
    /// `ln(count) / size²`
    pub entropy: crate::precision::Decimal,
    /// `entropy - λ₂`
    pub error: crate::precision::Decimal,
}

#[derive(Clone, Debug)]
pub struct EntropyTable {
    pub rows: Vec<EntropyRow>,
    /// `|entropy - λ₂|` strictly decreases along the rows.
    pub monotone: bool,
}

/// Per-site entropy of dimer coverings of `L × L` tori.
pub fn per_site_entropy_2d(sizes: &[usize]) -> Result<EntropyTable> {
    use crate::precision::{lambda2, ln_rational};
    use num_rational::BigRational;
    let digits = 30;
    let lam = lambda2(digits).value;
    let mut rows = Vec::new();
    for &l in sizes {
        if (l * l) % 2 == 1 {
            return Err(Error::OddSites(l * l));
        }
        let count = count_matchings_2d(Geometry::Torus, l, l)?.count;
        let ln = ln_rational(&BigRational::from_integer(count.clone().into()), digits);
        let entropy = ln.div_rational(&BigRational::from_integer(((l * l) as i64).into()));
        let error = &entropy - &lam;
        rows.push(EntropyRow {
            size: l,
            count,
            entropy,
            error,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].error.abs().mantissa() < w[0].error.abs().mantissa());
    Ok(EntropyTable { rows, monotone })
}

/// Matchings of the cycle `C_len` (the 1 × len torus).
pub fn count_matchings_cycle(len: usize) -> Result<BigUint> {
    count_transfer(Geometry::Torus, 1, len)
}

/// Entropy per site of a cycle, `ln(count)/len`; `None` if it has no matching.
pub fn cycle_entropy(len: usize) -> Result<Option<f64>> {
    let c = count_matchings_cycle(len)?;
    Ok(c.to_f64().filter(|&x| x > 0.0).map(|x| x.ln() / len as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn small_open_grids() {
        assert_eq!(count_open_profile(2, 2).unwrap(), big(2));
        assert_eq!(count_open_profile(2, 3).unwrap(), big(3));
        assert_eq!(count_open_profile(2, 4).unwrap(), big(5));
        assert_eq!(count_open_profile(3, 3).unwrap(), big(0));
        assert_eq!(count_open_profile(3, 4).unwrap(), big(11));
        assert_eq!(count_open_profile(4, 4).unwrap(), big(36));
        assert_eq!(count_open_profile(8, 8).unwrap(), big(12_988_816));
        assert_eq!(count_transfer(Geometry::Open, 8, 8).unwrap(), big(12_988_816));
    }

    #[test]
    fn routes_agree_on_open_grids() {
        for m in 1..=6 {
            for n in 1..=7 {
                let a = count_open_profile(m, n).unwrap();
                assert_eq!(a, count_transfer(Geometry::Open, m, n).unwrap(), "{m}x{n}");
                assert_eq!(a, count_open_profile(n, m).unwrap(), "{m}x{n} transposed");
            }
        }
    }

    #[test]
    fn fibonacci_strips() {
        let (mut a, mut b) = (big(1), big(2));
        for n in 2..=20 {
            let c = count_matchings_2d(Geometry::Open, 2, n).unwrap().count;
            assert_eq!(c, b, "2x{n}");
            let next = &a + &b;
            a = b;
            b = next;
        }
    }

    /// Perfect matchings of the L1 × L2 torus by exhaustive search over
    /// the edge list, counting parallel edges separately.
    fn brute_torus(m: usize, n: usize) -> u64 {
        let id = |r: usize, c: usize| r * n + c;
        let mut edges = Vec::new();
        for r in 0..m {
            for c in 0..n {
                if m >= 2 {
                    edges.push((id(r, c), id((r + 1) % m, c)));
                }
                if n >= 2 {
                    edges.push((id(r, c), id(r, (c + 1) % n)));
                }
            }
        }
        fn rec(covered: u64, all: u64, edges: &[(usize, usize)]) -> u64 {
            if covered == all {
                return 1;
            }
            let v = (!covered & all).trailing_zeros() as usize;
            edges
                .iter()
                .filter(|&&(a, b)| (a == v || b == v) && a != b)
                .filter(|&&(a, b)| covered >> a & 1 == 0 && covered >> b & 1 == 0)
                .map(|&(a, b)| rec(covered | 1 << a | 1 << b, all, edges))
                .sum()
        }
        rec(0, (1u64 << (m * n)) - 1, &edges)
    }

    #[test]
    fn torus_matches_brute_force() {
        for (m, n) in [(1, 4), (1, 6), (2, 2), (2, 3), (2, 4), (3, 4), (4, 4), (3, 6), (4, 5), (6, 4)] {
            assert_eq!(
                count_matchings_2d(Geometry::Torus, m, n).unwrap().count,
                big(brute_torus(m, n)),
                "{m}x{n}"
            );
        }
    }

    #[test]
    fn torus_is_symmetric() {
        for (m, n) in [(4, 6), (6, 8), (5, 6)] {
            assert_eq!(
                count_transfer(Geometry::Torus, m, n).unwrap(),
                count_transfer(Geometry::Torus, n, m).unwrap()
            );
        }
    }

    #[test]
    fn cycles_have_two_matchings() {
        for len in [4, 6, 10, 50] {
            assert_eq!(count_matchings_cycle(len).unwrap(), big(2));
        }
        assert_eq!(count_matchings_cycle(7).unwrap(), big(0));
        let e = cycle_entropy(1000).unwrap().unwrap();
        assert!(e > 0.0 && e < 1e-3);
        assert!(cycle_entropy(11).unwrap().is_none());
    }

    #[test]
    fn width_cap_and_parity() {
        assert!(matches!(
            count_matchings_2d(Geometry::Open, 15, 2),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(per_site_entropy_2d(&[3]), Err(Error::OddSites(9))));
        assert!(count_transfer(Geometry::Torus, 4, 1).is_err());
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        // 2×n strips grow like φ^n, past u128 at n ≈ 185
        let n = 200;
        let t = count_transfer(Geometry::Open, 2, n).unwrap();
        assert_eq!(t, count_open_profile(2, n).unwrap());
        assert!(t.bits() > 128);
    }
}
