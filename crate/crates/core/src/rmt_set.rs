use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign};

const WORDS: usize = 4;

/// Fixed-width bit set over RMT indices.
///
/// Holds indices below [`RmtSet::CAPACITY`], which covers `d³` for every
/// supported state count (6³ = 216).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RmtSet([u64; WORDS]);

impl RmtSet {
    pub const CAPACITY: usize = WORDS * 64;

    pub const fn empty() -> Self {
        RmtSet([0; WORDS])
    }

    /// The contiguous range `lo..hi`.
    pub fn range(lo: usize, hi: usize) -> Self {
        let mut s = Self::empty();
        for r in lo..hi {
            s.insert(r);
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, r: usize) {
        debug_assert!(r < Self::CAPACITY);
        self.0[r >> 6] |= 1u64 << (r & 63);
    }

    #[inline]
    pub fn remove(&mut self, r: usize) {
        debug_assert!(r < Self::CAPACITY);
        self.0[r >> 6] &= !(1u64 << (r & 63));
    }

    #[inline]
    pub fn contains(&self, r: usize) -> bool {
        r < Self::CAPACITY && self.0[r >> 6] & (1u64 << (r & 63)) != 0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &RmtSet) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &RmtSet) -> bool {
        (*self & *other).is_empty()
    }

    /// Members in ascending order.
    pub fn iter(&self) -> Iter {
        Iter {
            words: self.0,
            word: 0,
        }
    }
}

impl BitOr for RmtSet {
    type Output = RmtSet;
    #[inline]
    fn bitor(mut self, rhs: RmtSet) -> RmtSet {
        self |= rhs;
        self
    }
}

impl BitOrAssign for RmtSet {
    #[inline]
    fn bitor_assign(&mut self, rhs: RmtSet) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a |= b;
        }
    }
}

impl BitAnd for RmtSet {
    type Output = RmtSet;
    #[inline]
    fn bitand(mut self, rhs: RmtSet) -> RmtSet {
        self &= rhs;
        self
    }
}

impl BitAndAssign for RmtSet {
    #[inline]
    fn bitand_assign(&mut self, rhs: RmtSet) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a &= b;
        }
    }
}

impl FromIterator<usize> for RmtSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = RmtSet::empty();
        for r in iter {
            s.insert(r);
        }
        s
    }
}

impl IntoIterator for &RmtSet {
    type Item = usize;
    type IntoIter = Iter;
    fn into_iter(self) -> Iter {
        self.iter()
    }
}

pub struct Iter {
    words: [u64; WORDS],
    word: usize,
}

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.word < WORDS {
            let w = self.words[self.word];
            if w != 0 {
                let bit = w.trailing_zeros() as usize;
                self.words[self.word] = w & (w - 1);
                return Some(self.word * 64 + bit);
            }
            self.word += 1;
        }
        None
    }
}

/// Decimal, comma separated, bracketed: `[3,4,5]`.
impl fmt::Display for RmtSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, r) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for RmtSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        let mut s = RmtSet::empty();
        assert!(s.is_empty());
        s.insert(0);
        s.insert(63);
        s.insert(64);
        s.insert(215);
        assert_eq!(s.len(), 4);
        assert!(s.contains(64));
        assert!(!s.contains(65));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 63, 64, 215]);
        s.remove(63);
        assert_eq!(s.to_string(), "[0,64,215]");
    }

    #[test]
    fn range_and_display() {
        assert_eq!(RmtSet::range(3, 6).to_string(), "[3,4,5]");
        assert_eq!(RmtSet::empty().to_string(), "[]");
    }

    proptest! {
        #[test]
        fn agrees_with_btreeset(a in proptest::collection::btree_set(0usize..216, 0..60),
                                b in proptest::collection::btree_set(0usize..216, 0..60)) {
            let sa: RmtSet = a.iter().copied().collect();
            let sb: RmtSet = b.iter().copied().collect();
            let union: Vec<_> = a.union(&b).copied().collect();
            let inter: Vec<_> = a.intersection(&b).copied().collect();
            prop_assert_eq!((sa | sb).iter().collect::<Vec<_>>(), union);
            prop_assert_eq!((sa & sb).iter().collect::<Vec<_>>(), inter.clone());
            prop_assert_eq!(sa.len(), a.len());
            prop_assert_eq!(sa.is_disjoint(&sb), inter.is_empty());
            prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
        }
    }
}
