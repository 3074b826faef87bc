//! Stabiliser of the anchor dimer inside the hyperoctahedral group.
//!
//! With the anchor `{0, e_a}` the stabiliser permutes and reflects the other
//! `d - 1` axes and may mirror axis `a` through `x_a -> 1 - x_a`, which swaps
//! the anchor's two endpoints. It has `2^d (d-1)!` elements. Every element
//! preserves overlaps, so it maps trees to trees with the same labelled
//! pattern.

use super::packed::{pack_site, unpack_site, unit, Tile};
use crate::pattern::for_each_permutation;

#[derive(Clone, Debug)]
pub(crate) struct Symmetry {
    /// `target[k]` is the image axis of axis `k`.
    target: Vec<usize>,
    flip: Vec<bool>,
    anchor_axis: usize,
}

impl Symmetry {
    fn apply_site(&self, coords: &[i64]) -> Vec<i64> {
        let mut out = vec![0; coords.len()];
        for (k, &x) in coords.iter().enumerate() {
            let y = match (self.flip[k], k == self.anchor_axis) {
                (false, _) => x,
                (true, true) => 1 - x,
                (true, false) => -x,
            };
            out[self.target[k]] = y;
        }
        out
    }

    pub fn apply(&self, t: Tile, d: usize) -> Tile {
        let axis = self.target[t.axis()];
        let a = pack_site(&self.apply_site(&unpack_site(t.lo, d))).expect("in range");
        let b = pack_site(&self.apply_site(&unpack_site(t.hi, d))).expect("in range");
        let lo = if a + unit(axis) == b { a } else { b };
        Tile {
            lo,
            hi: lo + unit(axis),
        }
    }
}

pub(crate) fn anchor_stabilizer(d: usize, anchor_axis: usize) -> Vec<Symmetry> {
    let others: Vec<usize> = (0..d).filter(|&k| k != anchor_axis).collect();
    let mut perms = Vec::new();
    for_each_permutation(others.len(), |p| {
        let mut target: Vec<usize> = (0..d).collect();
        for (i, &k) in others.iter().enumerate() {
            target[k] = others[p[i]];
        }
        perms.push(target);
    });
    let mut out = Vec::with_capacity(perms.len() << d);
    for target in perms {
        for mask in 0u32..(1 << d) {
            out.push(Symmetry {
                target: target.clone(),
                flip: (0..d).map(|k| mask >> k & 1 == 1).collect(),
                anchor_axis,
            });
        }
    }
    out
}

/// For a prefix, returns `Some(orbit size)` when it is the lexicographically
/// smallest element of its orbit, `None` otherwise.
pub(crate) fn orbit_representative(prefix: &[Tile], group: &[Symmetry], d: usize) -> Option<u64> {
    let mut images: Vec<Vec<Tile>> = Vec::with_capacity(group.len());
    for g in group {
        let img: Vec<Tile> = prefix.iter().map(|&t| g.apply(t, d)).collect();
        if img.as_slice() < prefix {
            return None;
        }
        images.push(img);
    }
    images.sort_unstable();
    images.dedup();
    Some(images.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::packed::push_tiles_at;

    fn anchor(axis: usize) -> Tile {
        Tile {
            lo: pack_site(&[0, 0, 0]).unwrap(),
            hi: pack_site(&[0, 0, 0]).unwrap() + unit(axis),
        }
    }

    #[test]
    fn group_size_and_anchor_fixed() {
        for d in 1..=4 {
            for a in 0..d {
                let g = anchor_stabilizer(d, a);
                assert_eq!(g.len(), (1 << d) * (1..d).product::<usize>());
                let zero = vec![0i64; d];
                let lo = pack_site(&zero).unwrap();
                let t = Tile { lo, hi: lo + unit(a) };
                assert!(g.iter().all(|s| s.apply(t, d) == t));
            }
        }
    }

    #[test]
    fn preserves_overlap_relations() {
        let d = 3;
        let a = anchor(1);
        let mut nbrs = Vec::new();
        push_tiles_at(a.lo, d, &mut nbrs);
        push_tiles_at(a.hi, d, &mut nbrs);
        for g in anchor_stabilizer(d, 1) {
            for &x in &nbrs {
                for &y in &nbrs {
                    assert_eq!(x.overlaps(y), g.apply(x, d).overlaps(g.apply(y, d)));
                    assert_eq!(x == y, g.apply(x, d) == g.apply(y, d));
                }
            }
        }
    }

    #[test]
    fn second_tile_orbits_d3() {
        // eleven choices for s_2 fall into: the anchor itself, the two
        // collinear extensions, the eight perpendicular touching dimers
        let d = 3;
        let a = anchor(0);
        let mut nbrs = Vec::new();
        push_tiles_at(a.lo, d, &mut nbrs);
        push_tiles_at(a.hi, d, &mut nbrs);
        nbrs.sort();
        nbrs.dedup();
        let g = anchor_stabilizer(d, 0);
        let mut sizes: Vec<u64> = nbrs
            .iter()
            .filter_map(|&t| orbit_representative(&[a, t], &g, d))
            .collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 8]);
    }
}
