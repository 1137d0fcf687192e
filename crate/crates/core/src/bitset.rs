//! Fixed-width bitset used for domains and relation sets.

use std::fmt;

const WORDS: usize = 4;

/// Largest value count a [`ValueSet`] can hold.
pub const MAX_UNIVERSE: usize = WORDS * 64;

/// A set of small non-negative integers (`0..256`), stored inline as four
/// machine words.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ValueSet {
    words: [u64; WORDS],
}

impl ValueSet {
    pub const EMPTY: ValueSet = ValueSet { words: [0; WORDS] };

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_UNIVERSE, "universe of {n} values exceeds {MAX_UNIVERSE}");
        let mut words = [0u64; WORDS];
        for (i, w) in words.iter_mut().enumerate() {
            let lo = i * 64;
            if n >= lo + 64 {
                *w = u64::MAX;
            } else if n > lo {
                *w = (1u64 << (n - lo)) - 1;
            }
        }
        ValueSet { words }
    }

    pub fn singleton(v: usize) -> Self {
        let mut s = Self::EMPTY;
        s.insert(v);
        s
    }

    /// Builds a set from the low bits of a single word.
    pub fn from_mask(mask: u64) -> Self {
        ValueSet { words: [mask, 0, 0, 0] }
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < MAX_UNIVERSE && self.words[v >> 6] & (1u64 << (v & 63)) != 0
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        assert!(v < MAX_UNIVERSE);
        self.words[v >> 6] |= 1u64 << (v & 63);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        if v < MAX_UNIVERSE {
            self.words[v >> 6] &= !(1u64 << (v & 63));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// The only element, if the set is a singleton.
    pub fn single(&self) -> Option<usize> {
        if self.len() == 1 {
            self.first()
        } else {
            None
        }
    }

    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn last(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn intersection(&self, other: &ValueSet) -> ValueSet {
        let mut words = self.words;
        for (w, o) in words.iter_mut().zip(other.words) {
            *w &= o;
        }
        ValueSet { words }
    }

    pub fn union(&self, other: &ValueSet) -> ValueSet {
        let mut words = self.words;
        for (w, o) in words.iter_mut().zip(other.words) {
            *w |= o;
        }
        ValueSet { words }
    }

    pub fn difference(&self, other: &ValueSet) -> ValueSet {
        let mut words = self.words;
        for (w, o) in words.iter_mut().zip(other.words) {
            *w &= !o;
        }
        ValueSet { words }
    }

    pub fn is_subset(&self, other: &ValueSet) -> bool {
        self.words.iter().zip(other.words).all(|(w, o)| w & !o == 0)
    }

    pub fn intersects(&self, other: &ValueSet) -> bool {
        self.words.iter().zip(other.words).any(|(w, o)| w & o != 0)
    }

    /// Elements in ascending order.
    pub fn iter(&self) -> Iter {
        Iter { words: self.words, word: 0 }
    }
}

impl FromIterator<usize> for ValueSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ValueSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl IntoIterator for &ValueSet {
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

impl fmt::Debug for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_sets_cover_word_boundaries() {
        for n in [0, 1, 8, 63, 64, 65, 128, 218, 256] {
            let s = ValueSet::full(n);
            assert_eq!(s.len(), n);
            assert_eq!(s.iter().collect::<Vec<_>>(), (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn single_and_bounds() {
        let s: ValueSet = [5usize, 130].into_iter().collect();
        assert_eq!(s.single(), None);
        assert_eq!(s.first(), Some(5));
        assert_eq!(s.last(), Some(130));
        assert_eq!(ValueSet::singleton(200).single(), Some(200));
        assert_eq!(ValueSet::EMPTY.first(), None);
    }

    proptest! {
        #[test]
        fn set_algebra_matches_btreeset(a in proptest::collection::btree_set(0usize..256, 0..40),
                                        b in proptest::collection::btree_set(0usize..256, 0..40)) {
            let sa: ValueSet = a.iter().copied().collect();
            let sb: ValueSet = b.iter().copied().collect();
            let inter: Vec<_> = a.intersection(&b).copied().collect();
            let uni: Vec<_> = a.union(&b).copied().collect();
            let diff: Vec<_> = a.difference(&b).copied().collect();
            prop_assert_eq!(sa.intersection(&sb).iter().collect::<Vec<_>>(), inter);
            prop_assert_eq!(sa.union(&sb).iter().collect::<Vec<_>>(), uni);
            prop_assert_eq!(sa.difference(&sb).iter().collect::<Vec<_>>(), diff);
            prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
            prop_assert_eq!(sa.intersects(&sb), !a.is_disjoint(&b));
            prop_assert_eq!(sa.len(), a.len());
        }
    }
}
