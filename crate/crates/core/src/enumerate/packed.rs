//! Packed sites and tiles for the inner enumeration loop.
//!
//! A site is packed 7 bits per coordinate with an offset of 64, so each
//! coordinate must stay in `-64..64`. An s-tree never leaves distance `s` of
//! the anchor, which keeps every supported run well inside that range.

use crate::error::{Error, Result};
use crate::lattice::{LocatedDimer, Site};
use crate::pattern::{OverlapPattern, Relation};

pub(crate) const BITS: u32 = 7;
const OFFSET: i64 = 64;
const MASK: u64 = (1 << BITS) - 1;

/// Largest dimension the packed representation supports.
pub const MAX_DIMENSION: usize = 9;

#[inline]
pub(crate) fn unit(axis: usize) -> u64 {
    1 << (BITS as usize * axis)
}

pub(crate) fn pack_site(coords: &[i64]) -> Result<u64> {
    if coords.len() > MAX_DIMENSION {
        return Err(Error::CapExceeded {
            what: "dimension",
            value: coords.len(),
            max: MAX_DIMENSION,
        });
    }
    let mut out = 0u64;
    for (k, &c) in coords.iter().enumerate() {
        let v = c + OFFSET;
        if !(0..(1 << BITS)).contains(&v) {
            return Err(Error::OutOfRange {
                what: "packed coordinate",
                detail: format!("{c} outside -64..64"),
            });
        }
        out |= (v as u64) << (BITS as usize * k);
    }
    Ok(out)
}

pub(crate) fn unpack_site(p: u64, d: usize) -> Vec<i64> {
    (0..d)
        .map(|k| ((p >> (BITS as usize * k)) & MASK) as i64 - OFFSET)
        .collect()
}

/// A dimer as its two packed sites; `hi = lo + unit(axis)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Tile {
    pub lo: u64,
    pub hi: u64,
}

impl Tile {
    #[inline]
    pub fn overlaps(self, other: Tile) -> bool {
        self.lo == other.lo || self.lo == other.hi || self.hi == other.lo || self.hi == other.hi
    }

    pub fn axis(self) -> usize {
        ((self.hi - self.lo).trailing_zeros() / BITS) as usize
    }

    pub fn from_dimer(t: &LocatedDimer) -> Result<Tile> {
        let lo = pack_site(t.base().coords())?;
        Ok(Tile {
            lo,
            hi: lo + unit(t.axis()),
        })
    }

    pub fn to_dimer(self, d: usize) -> LocatedDimer {
        LocatedDimer::new(
            Site::new(unpack_site(self.lo, d)).expect("d >= 1"),
            self.axis(),
        )
        .expect("axis < d")
    }
}

/// Appends every tile touching `site` to `out`.
#[inline]
pub(crate) fn push_tiles_at(site: u64, d: usize, out: &mut Vec<Tile>) {
    for k in 0..d {
        let u = unit(k);
        out.push(Tile { lo: site - u, hi: site });
        out.push(Tile { lo: site, hi: site + u });
    }
}

/// Index of the pair `(i, j)`, `i < j`, in the packed pattern code.
#[inline]
pub(crate) fn pair_index(i: usize, j: usize) -> usize {
    j * (j - 1) / 2 + i
}

#[inline]
pub(crate) fn relation_bits(a: Tile, b: Tile) -> u64 {
    if a == b {
        Relation::Equal as u64
    } else if a.overlaps(b) {
        Relation::Overlap as u64
    } else {
        Relation::Disjoint as u64
    }
}

/// Relation bits of `t` (at position `tiles.len()`) against every earlier tile.
#[inline]
pub(crate) fn extend_code(code: u64, tiles: &[Tile], t: Tile) -> u64 {
    let j = tiles.len();
    let mut c = code;
    for (i, &u) in tiles.iter().enumerate() {
        c |= relation_bits(u, t) << (2 * pair_index(i, j));
    }
    c
}

pub(crate) fn decode_pattern(s: usize, code: u64) -> OverlapPattern {
    OverlapPattern::from_upper_unchecked(s, |i, j| {
        Relation::from_bits((code >> (2 * pair_index(i, j))) & 3)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::pattern_of;

    #[test]
    fn pack_round_trip() {
        let c = vec![-3, 0, 17, -64, 63];
        assert_eq!(unpack_site(pack_site(&c).unwrap(), 5), c);
        assert!(pack_site(&[64]).is_err());
    }

    #[test]
    fn tiles_round_trip_and_codes_agree() {
        let dimers: Vec<LocatedDimer> = [(vec![0, 0], 0), (vec![1, 0], 1), (vec![0, -1], 1), (vec![3, 3], 0)]
            .into_iter()
            .map(|(c, k)| LocatedDimer::new(Site::new(c).unwrap(), k).unwrap())
            .collect();
        let tiles: Vec<Tile> = dimers.iter().map(|t| Tile::from_dimer(t).unwrap()).collect();
        for (t, u) in dimers.iter().zip(&tiles) {
            assert_eq!(&u.to_dimer(2), t);
        }
        let mut code = 0;
        for j in 0..tiles.len() {
            code = extend_code(code, &tiles[..j], tiles[j]);
        }
        assert_eq!(decode_pattern(4, code), pattern_of(&dimers).unwrap());
    }
}
