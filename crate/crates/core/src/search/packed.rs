//! Relations over bases of at most 8 points packed into one `u64`
//! (bit `x * n + y` is the pair `(x, y)`).

use crate::relation::{BitIter, Relation};

/// Largest base size the packed kernels support.
pub const MAX_PACKED_BASE: usize = 8;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Packing {
    pub n: usize,
    row: u64,
    pub all: u64,
}

impl Packing {
    pub fn new(n: usize) -> Self {
        assert!((1..=MAX_PACKED_BASE).contains(&n));
        let row = (1u64 << n) - 1;
        let cells = n * n;
        let all = if cells == 64 { u64::MAX } else { (1u64 << cells) - 1 };
        Packing { n, row, all }
    }

    #[inline]
    pub fn row(&self, r: u64, x: usize) -> u64 {
        (r >> (x * self.n)) & self.row
    }

    #[inline]
    pub fn compose(&self, a: u64, b: u64) -> u64 {
        let mut out = 0;
        for x in 0..self.n {
            let acc = BitIter(self.row(a, x)).fold(0, |acc, z| acc | self.row(b, z));
            out |= acc << (x * self.n);
        }
        out
    }

    #[cfg(test)]
    pub fn pack(&self, rel: &Relation) -> u64 {
        debug_assert_eq!(rel.base_size(), self.n);
        rel.rows().iter().enumerate().fold(0, |acc, (x, &r)| acc | (r << (x * self.n)))
    }

    pub fn unpack(&self, r: u64) -> Relation {
        Relation::from_rows((0..self.n).map(|x| self.row(r, x)).collect()).expect("packed base size is valid")
    }

    /// Image of `r` under the base permutation `perm` (pair `(x, y)` goes to
    /// `(perm[x], perm[y])`).
    pub fn permute(&self, r: u64, perm: &[usize]) -> u64 {
        BitIter(r).fold(0, |acc, bit| {
            let (x, y) = (bit / self.n, bit % self.n);
            acc | 1 << (perm[x] * self.n + perm[y])
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_compose_matches_dense() {
        let p = Packing::new(3);
        let a = Relation::from_pairs(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let b = Relation::from_pairs(3, [(1, 1), (2, 0), (0, 2)]).unwrap();
        let dense = a.compose(&b).unwrap();
        assert_eq!(p.unpack(p.compose(p.pack(&a), p.pack(&b))), dense);
        assert_eq!(p.unpack(p.pack(&a)), a);
    }

    #[test]
    fn full_eight_point_base() {
        let p = Packing::new(8);
        assert_eq!(p.all, u64::MAX);
        let full = Relation::full(8).unwrap();
        assert_eq!(p.pack(&full), u64::MAX);
        assert_eq!(p.compose(u64::MAX, u64::MAX), u64::MAX);
    }

    #[test]
    fn permutation_relabels_pairs() {
        let p = Packing::new(2);
        let lt = p.pack(&Relation::from_pairs(2, [(0, 1)]).unwrap());
        let gt = p.pack(&Relation::from_pairs(2, [(1, 0)]).unwrap());
        assert_eq!(p.permute(lt, &[1, 0]), gt);
    }
}
