//! Subsets of `[k]^{<N}` stored level by level as bitsets over lexicographic ranks.

use std::collections::BTreeMap;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::rational::{frac, Rational};
use crate::words::{all_words, check_alphabet, level_size, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WordSet {
    k: u32,
    levels: BTreeMap<usize, BitSet>,
}

impl WordSet {
    pub fn new(k: u32) -> Result<Self> {
        check_alphabet(k)?;
        Ok(Self {
            k,
            levels: BTreeMap::new(),
        })
    }

    pub fn from_words<'a>(k: u32, words: impl IntoIterator<Item = &'a Word>) -> Result<Self> {
        let mut s = Self::new(k)?;
        for w in words {
            s.insert(w)?;
        }
        Ok(s)
    }

    /// The union of the full levels `[k]^n`, `n` in `levels`.
    pub fn full_levels(k: u32, levels: &[usize]) -> Result<Self> {
        let mut s = Self::new(k)?;
        for &n in levels {
            s.levels.insert(n, BitSet::full(level_size(k, n)?));
        }
        Ok(s)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn insert(&mut self, w: &Word) -> Result<bool> {
        w.check(self.k)?;
        let size = level_size(self.k, w.len())?;
        let k = self.k;
        Ok(self
            .levels
            .entry(w.len())
            .or_insert_with(|| BitSet::new(size))
            .insert(w.rank(k)))
    }

    pub fn remove(&mut self, w: &Word) -> bool {
        let k = self.k;
        match self.levels.get_mut(&w.len()) {
            Some(b) if w.0.iter().all(|&a| a >= 1 && a <= k) => b.remove(w.rank(k)),
            _ => false,
        }
    }

    pub fn contains(&self, w: &Word) -> bool {
        if w.0.iter().any(|&a| a == 0 || a > self.k) {
            return false;
        }
        self.levels
            .get(&w.len())
            .is_some_and(|b| b.contains(w.rank(self.k)))
    }

    /// Replace level `n` by the given bitset over `[k]^n`.
    pub fn set_level(&mut self, n: usize, bits: BitSet) -> Result<()> {
        let size = level_size(self.k, n)?;
        if bits.len() != size {
            return Err(Error::LengthMismatch {
                expected: size,
                got: bits.len(),
            });
        }
        self.levels.insert(n, bits);
        Ok(())
    }

    pub fn level(&self, n: usize) -> Option<&BitSet> {
        self.levels.get(&n)
    }

    /// Level `n` as a bitset, empty if the level is absent.
    pub fn level_bits(&self, n: usize) -> Result<BitSet> {
        match self.levels.get(&n) {
            Some(b) => Ok(b.clone()),
            None => Ok(BitSet::new(level_size(self.k, n)?)),
        }
    }

    pub fn level_count(&self, n: usize) -> u64 {
        self.levels.get(&n).map_or(0, BitSet::count)
    }

    pub fn levels(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels.keys().copied()
    }

    pub fn max_level(&self) -> Option<usize> {
        self.levels
            .iter()
            .filter(|(_, b)| !b.is_empty())
            .map(|(&n, _)| n)
            .next_back()
    }

    pub fn len(&self) -> u64 {
        self.levels.values().map(BitSet::count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `dens_{[k]^n}(A)`.
    pub fn level_density(&self, n: usize) -> Result<Rational> {
        Ok(frac(self.level_count(n), level_size(self.k, n)? as u64))
    }

    /// `dens_Y(A) = |A ∩ Y| / |Y|` for a finite list `Y` of distinct words.
    pub fn density_in(&self, ys: &[Word]) -> Rational {
        let hits = ys.iter().filter(|y| self.contains(y)).count();
        frac(hits as u64, ys.len() as u64)
    }

    pub fn words(&self) -> Vec<Word> {
        let k = self.k;
        self.levels
            .iter()
            .flat_map(|(&n, b)| b.iter().map(move |r| Word::unrank(k, n, r)))
            .collect()
    }

    pub fn union(&self, other: &WordSet) -> WordSet {
        let mut out = self.clone();
        for (&n, b) in &other.levels {
            out.levels
                .entry(n)
                .and_modify(|a| a.union_with(b))
                .or_insert_with(|| b.clone());
        }
        out
    }

    pub fn intersection(&self, other: &WordSet) -> WordSet {
        let mut levels = BTreeMap::new();
        for (&n, a) in &self.levels {
            if let Some(b) = other.levels.get(&n) {
                let mut c = a.clone();
                c.intersect_with(b);
                levels.insert(n, c);
            }
        }
        WordSet { k: self.k, levels }
    }

    /// Complement inside `∪_{n ∈ levels} [k]^n`.
    pub fn complement_within(&self, levels: &[usize]) -> Result<WordSet> {
        let mut out = WordSet::new(self.k)?;
        for &n in levels {
            out.levels.insert(n, self.level_bits(n)?.complement());
        }
        Ok(out)
    }

    /// Keep only the given levels.
    pub fn restrict_levels(&self, levels: &[usize]) -> WordSet {
        WordSet {
            k: self.k,
            levels: self
                .levels
                .iter()
                .filter(|(n, _)| levels.contains(n))
                .map(|(&n, b)| (n, b.clone()))
                .collect(),
        }
    }

    /// One word per line; `#` starts a comment line; `-` is the empty word.
    pub fn parse_text(k: u32, text: &str) -> Result<Self> {
        let mut s = Self::new(k)?;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            s.insert(&Word::parse(line)?)?;
        }
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        self.words().iter().map(|w| format!("{w}\n")).collect()
    }

    /// Structured form: a list of integer arrays.
    pub fn parse_structured(k: u32, text: &str) -> Result<Self> {
        let rows: Vec<Vec<u32>> =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let words: Vec<Word> = rows.into_iter().map(Word).collect();
        Self::from_words(k, &words)
    }

    /// Every word of `[k]^n` with its membership flag, in rank order.
    pub fn level_iter(&self, n: usize) -> impl Iterator<Item = (Word, bool)> + '_ {
        all_words(self.k, n).map(move |w| {
            let inside = self.contains(&w);
            (w, inside)
        })
    }
}

/// Closure under `(i,j)`-equivalence within every stored level.
pub fn is_insensitive(a: &WordSet, i: u32, j: u32) -> Result<bool> {
    if i == j {
        return Err(Error::Precondition("insensitivity needs i != j".into()));
    }
    for w in a.words() {
        for y in crate::words::equivalents(&w, i, j) {
            if !a.contains(&y) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn ws(k: u32, items: &[&str]) -> WordSet {
        let words: Vec<Word> = items.iter().map(|s| Word::parse(s).unwrap()).collect();
        WordSet::from_words(k, &words).unwrap()
    }

    #[test]
    fn membership_and_density() {
        let a = ws(2, &["-", "1", "12", "21"]);
        assert!(a.contains(&Word::empty()));
        assert!(!a.contains(&Word::parse("2").unwrap()));
        assert_eq!(a.level_density(2).unwrap(), ratio(1, 2));
        assert_eq!(a.level_density(3).unwrap(), ratio(0, 1));
        assert_eq!(a.len(), 4);
        assert_eq!(a.words().len(), 4);
    }

    #[test]
    fn text_round_trip() {
        let a = WordSet::parse_text(3, "# comment\n-\n13\n\n231\n").unwrap();
        assert_eq!(a.to_text(), "-\n13\n231\n");
        let b = WordSet::parse_structured(3, "[[], [1,3], [2,3,1]]").unwrap();
        assert_eq!(a, b);
        assert!(WordSet::parse_text(2, "13").is_err());
    }

    #[test]
    fn insensitivity_examples() {
        assert!(is_insensitive(&WordSet::full_levels(2, &[2]).unwrap(), 1, 2).unwrap());
        assert!(is_insensitive(&ws(3, &["13", "23"]), 1, 2).unwrap());
        assert!(!is_insensitive(&ws(3, &["13"]), 1, 2).unwrap());
    }

    #[test]
    fn set_algebra() {
        let a = ws(2, &["1", "11"]);
        let b = ws(2, &["1", "22"]);
        assert_eq!(a.union(&b).len(), 3);
        assert_eq!(a.intersection(&b).len(), 1);
        assert_eq!(a.complement_within(&[1, 2]).unwrap().len(), 4);
    }
}
