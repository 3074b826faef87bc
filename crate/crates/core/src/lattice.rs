//! Located dimers on the hypercubic lattice Z^d.
//!
//! Coordinates are unbounded signed integers; there is no torus. A dimer is
//! stored by its lexicographically smaller endpoint (`base`) and the axis
//! along which it extends, so every unit edge has exactly one representation.

use std::fmt;

use crate::error::{Error, Result};

/// Number of lattice axes. Always at least one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Dimension(d))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A lattice point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site(Vec<i64>);

impl Site {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Site(coords))
    }

    pub fn origin(d: Dimension) -> Self {
        Site(vec![0; d.get()])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    /// `self + delta * e_axis`.
    pub fn step(&self, axis: usize, delta: i64) -> Site {
        let mut c = self.0.clone();
        c[axis] += delta;
        Site(c)
    }

    pub fn translate(&self, by: &[i64]) -> Site {
        Site(self.0.iter().zip(by).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A unit edge of Z^d occupying `base` and `base + e_axis`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocatedDimer {
    base: Site,
    axis: usize,
}

impl LocatedDimer {
    pub fn new(base: Site, axis: usize) -> Result<Self> {
        if axis >= base.dim() {
            return Err(Error::InvalidAxis {
                axis,
                d: base.dim(),
            });
        }
        Ok(LocatedDimer { base, axis })
    }

    /// The dimer at the origin along `axis`.
    pub fn anchor(d: Dimension, axis: usize) -> Result<Self> {
        Self::new(Site::origin(d), axis)
    }

    /// Builds the dimer covering two adjacent sites, in either order.
    pub fn from_sites(a: &Site, b: &Site) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                left: a.dim(),
                right: b.dim(),
            });
        }
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let diff: Vec<i64> = hi.0.iter().zip(&lo.0).map(|(h, l)| h - l).collect();
        let nonzero: Vec<usize> = (0..diff.len()).filter(|&k| diff[k] != 0).collect();
        match nonzero.as_slice() {
            [k] if diff[*k] == 1 => Ok(LocatedDimer {
                base: lo.clone(),
                axis: *k,
            }),
            _ => Err(Error::OutOfRange {
                what: "dimer endpoints",
                detail: format!("{a} and {b} are not adjacent"),
            }),
        }
    }

    pub fn base(&self) -> &Site {
        &self.base
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn sites(&self) -> (Site, Site) {
        (self.base.clone(), self.base.step(self.axis, 1))
    }

    pub fn translate(&self, by: &[i64]) -> LocatedDimer {
        LocatedDimer {
            base: self.base.translate(by),
            axis: self.axis,
        }
    }

    fn contains(&self, site: &Site) -> bool {
        let b = self.base.coords();
        let c = site.coords();
        b.iter().zip(c).enumerate().all(|(k, (x, y))| {
            if k == self.axis {
                *y == *x || *y == *x + 1
            } else {
                x == y
            }
        })
    }
}

impl fmt::Display for LocatedDimer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.sites();
        write!(f, "[{a}-{b}]")
    }
}

/// The two sites of `t`, lexicographically ordered.
pub fn sites_of(t: &LocatedDimer) -> (Site, Site) {
    t.sites()
}

/// True iff the two dimers share at least one site. A dimer overlaps itself.
pub fn overlap(a: &LocatedDimer, b: &LocatedDimer) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let (b0, b1) = b.sites();
    Ok(a.contains(&b0) || a.contains(&b1))
}

/// All located dimers touching `site`, sorted.
pub fn dimers_at(site: &Site) -> Vec<LocatedDimer> {
    let mut out = Vec::with_capacity(2 * site.dim());
    for axis in 0..site.dim() {
        out.push(LocatedDimer {
            base: site.step(axis, -1),
            axis,
        });
        out.push(LocatedDimer {
            base: site.clone(),
            axis,
        });
    }
    out.sort();
    out
}

/// Every located dimer sharing at least one site with `t`, including `t`
/// itself, sorted by (base, axis). There are exactly `4d - 1` of them.
pub fn dimers_overlapping(t: &LocatedDimer) -> Vec<LocatedDimer> {
    let (a, b) = t.sites();
    let mut out = dimers_at(&a);
    out.extend(dimers_at(&b));
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dimer(coords: &[i64], axis: usize) -> LocatedDimer {
        LocatedDimer::new(Site::new(coords.to_vec()).unwrap(), axis).unwrap()
    }

    /// Every dimer whose base lies in `[-r, r]^d`.
    fn window(d: usize, r: i64) -> Vec<LocatedDimer> {
        let mut sites = vec![vec![]];
        for _ in 0..d {
            sites = sites
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (-r..=r).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        sites
            .into_iter()
            .flat_map(|p| (0..d).map(move |k| dimer(&p, k)))
            .collect()
    }

    #[test]
    fn sites_examples() {
        let (a, b) = sites_of(&dimer(&[0], 0));
        assert_eq!((a.coords(), b.coords()), (&[0][..], &[1][..]));
        let (a, b) = sites_of(&dimer(&[3, -1], 1));
        assert_eq!((a.coords(), b.coords()), (&[3, -1][..], &[3, 0][..]));
        let (a, b) = sites_of(&dimer(&[0, 0, 0], 2));
        assert_eq!((a.coords(), b.coords()), (&[0, 0, 0][..], &[0, 0, 1][..]));
    }

    #[test]
    fn overlap_examples() {
        let t01 = dimer(&[0], 0);
        assert!(overlap(&t01, &t01).unwrap());
        assert!(overlap(&t01, &dimer(&[1], 0)).unwrap());
        assert!(!overlap(&t01, &dimer(&[2], 0)).unwrap());
        assert!(overlap(&dimer(&[0, 0], 0), &dimer(&[1, 0], 1)).unwrap());
        assert!(matches!(
            overlap(&t01, &dimer(&[0, 0], 0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn overlapping_count_matches_window_scan() {
        for d in 1..=3 {
            let t = LocatedDimer::anchor(Dimension::new(d).unwrap(), 0).unwrap();
            let brute: Vec<_> = window(d, 2)
                .into_iter()
                .filter(|u| {
                    let (a, b) = t.sites();
                    let (c, e) = u.sites();
                    a == c || a == e || b == c || b == e
                })
                .collect();
            let fast = dimers_overlapping(&t);
            assert_eq!(fast.len(), 4 * d - 1);
            let mut brute = brute;
            brute.sort();
            assert_eq!(fast, brute);
        }
    }

    #[test]
    fn from_sites_normalizes() {
        let a = Site::new(vec![2, 5]).unwrap();
        let b = Site::new(vec![2, 4]).unwrap();
        let t = LocatedDimer::from_sites(&a, &b).unwrap();
        assert_eq!(t, dimer(&[2, 4], 1));
        assert!(LocatedDimer::from_sites(&a, &a).is_err());
        assert!(LocatedDimer::new(a, 2).is_err());
    }

    fn arb_dimer(d: usize) -> impl Strategy<Value = LocatedDimer> {
        (prop::collection::vec(-3i64..=3, d), 0..d).prop_map(|(c, k)| dimer(&c, k))
    }

    fn arb_pair() -> impl Strategy<Value = (LocatedDimer, LocatedDimer)> {
        (1usize..=4).prop_flat_map(|d| (arb_dimer(d), arb_dimer(d)))
    }

    proptest! {
        #[test]
        fn overlap_symmetric_reflexive((a, b) in arb_pair()) {
            prop_assert!(overlap(&a, &a).unwrap());
            prop_assert_eq!(overlap(&a, &b).unwrap(), overlap(&b, &a).unwrap());
        }

        #[test]
        fn neighbourhood_size((a, _) in arb_pair()) {
            let n = dimers_overlapping(&a);
            prop_assert_eq!(n.len(), 4 * a.dim() - 1);
            prop_assert!(n.iter().all(|u| overlap(&a, u).unwrap()));
        }

        #[test]
        fn neighbourhood_translation_covariant(
            (a, _) in arb_pair(),
            shift in prop::collection::vec(-5i64..=5, 4),
        ) {
            let by = &shift[..a.dim()];
            let moved: Vec<_> = dimers_overlapping(&a).iter().map(|u| u.translate(by)).collect();
            prop_assert_eq!(moved, dimers_overlapping(&a.translate(by)));
        }
    }
}
