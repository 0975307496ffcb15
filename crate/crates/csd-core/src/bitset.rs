//! Compact fixed-width bitsets for point-index sets in hot loops.

use crate::geom::PointSet;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct BitSet {
    n: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut b = BitSet::new(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    pub fn from_point_set(n: usize, set: &PointSet) -> Self {
        let mut b = BitSet::new(n);
        for i in set.iter() {
            b.insert(i);
        }
        b
    }

    pub fn to_point_set(&self) -> PointSet {
        PointSet::new(self.iter().collect())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.n);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset_of(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersect(&self, other: &BitSet) -> BitSet {
        debug_assert_eq!(self.n, other.n);
        BitSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn subtract(&self, other: &BitSet) -> BitSet {
        debug_assert_eq!(self.n, other.n);
        BitSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    pub fn subtract_count(&self, other: &BitSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & !b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl std::fmt::Debug for BitSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut a = BitSet::new(130);
        a.insert(0);
        a.insert(64);
        a.insert(129);
        assert_eq!(a.count(), 3);
        assert!(a.contains(64));
        assert!(!a.contains(63));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 64, 129]);

        let mut b = BitSet::new(130);
        b.insert(64);
        assert!(b.is_subset_of(&a));
        assert_eq!(a.subtract(&b).count(), 2);
        assert_eq!(a.subtract_count(&b), 2);
        assert_eq!(a.intersect(&b).iter().collect::<Vec<_>>(), vec![64]);
    }

    #[test]
    fn point_set_round_trip() {
        let ps = PointSet::new(vec![1, 5, 7]);
        let bs = BitSet::from_point_set(9, &ps);
        assert_eq!(bs.to_point_set(), ps);
    }
}
