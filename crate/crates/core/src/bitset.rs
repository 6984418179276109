//! Fixed-width bit set used for connection sets and the solver's candidate sets.

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut set = BitSet { words: vec![!0; len.div_ceil(64)], len };
        set.trim();
        set
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i >> 6] &= !(1 << (i & 63));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn complement(&self) -> BitSet {
        let mut out = BitSet { words: self.words.iter().map(|w| !w).collect(), len: self.len };
        out.trim();
        out
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> Ones<'_> {
        Ones { words: &self.words, index: 0, current: self.words.first().copied().unwrap_or(0) }
    }
}

impl FromIterator<usize> for BitSet {
    /// Builds a set just large enough to hold the largest element.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let items: Vec<usize> = iter.into_iter().collect();
        let len = items.iter().max().map_or(0, |m| m + 1);
        let mut set = BitSet::new(len);
        for i in items {
            set.insert(i);
        }
        set
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * 64 + bit);
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_set_respects_length() {
        let s = BitSet::full(70);
        assert_eq!(s.count(), 70);
        assert_eq!(s.complement().count(), 0);
        assert_eq!(s.iter().last(), Some(69));
    }

    #[test]
    fn set_operations() {
        let mut a = BitSet::new(130);
        for i in [0, 5, 64, 129] {
            a.insert(i);
        }
        let mut b = BitSet::new(130);
        b.insert(5);
        b.insert(129);
        assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(), vec![5, 129]);
        a.difference_with(&b);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 64]);
        assert_eq!(a.first(), Some(0));
        a.remove(0);
        assert_eq!(a.first(), Some(64));
        assert!(!a.contains(200));
    }
}
