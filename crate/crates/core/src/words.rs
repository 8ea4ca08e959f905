//! Words over `[k] = {1, ..., k}`, located words, variable words and
//! combinatorial subspaces.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Letter = u32;

/// Words of one length reachable by rank arithmetic must fit in this many points.
pub const MAX_LEVEL_POINTS: u128 = 1 << 28;

pub fn check_alphabet(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::AlphabetTooSmall(k));
    }
    Ok(())
}

/// Number of words of length `n`, if it is small enough to index.
pub fn level_size(k: u32, n: usize) -> Result<usize> {
    let mut size: u128 = 1;
    for _ in 0..n {
        size *= k as u128;
        if size > MAX_LEVEL_POINTS {
            return Err(Error::Budget(format!("[{k}]^{n} has more than {MAX_LEVEL_POINTS} points")));
        }
    }
    Ok(size as usize)
}

/// A finite sequence of letters. Ordered by length first, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(k: u32, letters: Vec<Letter>) -> Result<Self> {
        let w = Word(letters);
        w.check(k)?;
        Ok(w)
    }

    pub fn check(&self, k: u32) -> Result<()> {
        check_alphabet(k)?;
        match self.0.iter().find(|&&a| a == 0 || a > k) {
            Some(&letter) => Err(Error::LetterOutOfRange { letter, k }),
            None => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, a: Letter) {
        self.0.push(a);
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Lexicographic rank inside `[k]^n`, with `(1,...,1)` at rank 0.
    pub fn rank(&self, k: u32) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &a| acc * k as usize + (a as usize - 1))
    }

    pub fn unrank(k: u32, n: usize, mut r: usize) -> Word {
        let mut v = vec![1; n];
        for slot in v.iter_mut().rev() {
            *slot = (r % k as usize) as Letter + 1;
            r /= k as usize;
        }
        Word(v)
    }

    /// Text form: a digit string, `-` for the empty word. Letters above 9
    /// fall back to the bracketed list used by the structured format.
    pub fn parse(s: &str) -> Result<Word> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(Word::empty());
        }
        if s.starts_with('[') {
            let v: Vec<Letter> =
                serde_json::from_str(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
            return Ok(Word(v));
        }
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .filter(|&d| d > 0)
                    .ok_or_else(|| Error::Parse(format!("bad letter {c:?} in word {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        if self.0.iter().all(|&a| a <= 9) {
            for a in &self.0 {
                write!(f, "{a}")?;
            }
            Ok(())
        } else {
            write!(f, "{:?}", self.0)
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

/// All words of length `n` in lexicographic (= rank) order.
pub fn all_words(k: u32, n: usize) -> impl Iterator<Item = Word> {
    let size = level_size(k, n).expect("level too large to enumerate");
    (0..size).map(move |r| Word::unrank(k, n, r))
}

/// All words of length `< n`, ordered by length then lexicographically.
pub fn words_below(k: u32, n: usize) -> Vec<Word> {
    (0..n).flat_map(|l| all_words(k, l)).collect()
}

/// A map from a finite set of positions into `[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LocatedWord {
    values: BTreeMap<usize, Letter>,
}

impl LocatedWord {
    pub fn from_map(values: BTreeMap<usize, Letter>) -> Self {
        Self { values }
    }

    pub fn support(&self) -> Vec<usize> {
        self.values.keys().copied().collect()
    }

    pub fn get(&self, pos: usize) -> Option<Letter> {
        self.values.get(&pos).copied()
    }

    pub fn values(&self) -> &BTreeMap<usize, Letter> {
        &self.values
    }

    /// The canonical isomorphism `I_J`: the i-th smallest element of `J`
    /// receives `x(i)`.
    pub fn canonical_embed(j: &[usize], x: &Word) -> Result<Self> {
        let mut support = j.to_vec();
        support.sort_unstable();
        support.dedup();
        if support.len() != x.len() {
            return Err(Error::LengthMismatch {
                expected: support.len(),
                got: x.len(),
            });
        }
        Ok(Self {
            values: support.into_iter().zip(x.0.iter().copied()).collect(),
        })
    }

    /// Inverse of [`canonical_embed`](Self::canonical_embed): read the values
    /// off in increasing position order.
    pub fn to_word(&self) -> Word {
        Word(self.values.values().copied().collect())
    }

    pub fn restrict(&self, positions: &[usize]) -> Self {
        Self {
            values: positions
                .iter()
                .filter_map(|p| self.values.get(p).map(|&a| (*p, a)))
                .collect(),
        }
    }

    /// The pair `(x, y)` of located words with disjoint supports.
    pub fn join(&self, other: &LocatedWord) -> Result<Self> {
        let mut values = self.values.clone();
        for (&p, &a) in &other.values {
            if values.insert(p, a).is_some() {
                return Err(Error::Precondition(format!("supports overlap at position {p}")));
            }
        }
        Ok(Self { values })
    }
}

/// A symbol of a variable word. Variables sort before letters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Var(u32),
    Letter(Letter),
}

impl Sym {
    /// Integer code: letters are positive, `v_i` is `-i` (so `v_0` is 0).
    pub fn code(self) -> i64 {
        match self {
            Sym::Var(i) => -(i as i64),
            Sym::Letter(a) => a as i64,
        }
    }

    pub fn from_code(c: i64) -> Sym {
        if c > 0 {
            Sym::Letter(c as Letter)
        } else {
            Sym::Var((-c) as u32)
        }
    }
}

/// An m-variable word: every `v_i` occurs, and all occurrences of `v_i`
/// precede those of `v_j` for `i < j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VariableWord {
    syms: Vec<Sym>,
    m: u32,
}

impl VariableWord {
    pub fn new(syms: Vec<Sym>) -> Result<Self> {
        let mut current: Option<u32> = None;
        for s in &syms {
            match *s {
                Sym::Var(i) => {
                    let ok = match current {
                        None => i == 0,
                        Some(c) => i == c || i == c + 1,
                    };
                    if !ok {
                        return Err(Error::InvalidVariableWord(format!(
                            "variable v{i} out of block order"
                        )));
                    }
                    current = Some(i);
                }
                Sym::Letter(0) => {
                    return Err(Error::InvalidVariableWord("letter 0".into()));
                }
                Sym::Letter(_) => {}
            }
        }
        match current {
            None => Err(Error::InvalidVariableWord("no variable occurs".into())),
            Some(c) => Ok(Self { syms, m: c + 1 }),
        }
    }

    /// The left variable word `(v)^rest`.
    pub fn left(rest: &[Sym]) -> Result<Self> {
        let mut syms = vec![Sym::Var(0)];
        syms.extend_from_slice(rest);
        let w = Self::new(syms)?;
        if w.m != 1 {
            return Err(Error::InvalidVariableWord("left word with several variables".into()));
        }
        Ok(w)
    }

    /// Text form: digits for letters, `v` for the single variable.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('[') {
            let codes: Vec<i64> =
                serde_json::from_str(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
            return Self::from_codes(&codes);
        }
        let syms = s
            .chars()
            .map(|c| match c {
                'v' => Ok(Sym::Var(0)),
                _ => c
                    .to_digit(10)
                    .filter(|&d| d > 0)
                    .map(Sym::Letter)
                    .ok_or_else(|| Error::Parse(format!("bad symbol {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(syms)
    }

    pub fn from_codes(codes: &[i64]) -> Result<Self> {
        Self::new(codes.iter().map(|&c| Sym::from_code(c)).collect())
    }

    pub fn codes(&self) -> Vec<i64> {
        self.syms.iter().map(|s| s.code()).collect()
    }

    pub fn syms(&self) -> &[Sym] {
        &self.syms
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn vars(&self) -> u32 {
        self.m
    }

    pub fn is_left(&self) -> bool {
        self.m == 1 && self.syms[0] == Sym::Var(0)
    }

    pub fn check_letters(&self, k: u32) -> Result<()> {
        check_alphabet(k)?;
        for s in &self.syms {
            if let Sym::Letter(a) = *s {
                if a > k {
                    return Err(Error::LetterOutOfRange { letter: a, k });
                }
            }
        }
        Ok(())
    }

    /// `w(a_0, ..., a_{m-1})`.
    pub fn substitute(&self, a: &[Letter], k: u32) -> Result<Word> {
        if a.len() != self.m as usize {
            return Err(Error::ArityMismatch {
                expected: self.m as usize,
                got: a.len(),
            });
        }
        if let Some(&letter) = a.iter().find(|&&x| x == 0 || x > k) {
            return Err(Error::LetterOutOfRange { letter, k });
        }
        Ok(self.apply(a))
    }

    /// Substitution without range checks.
    pub fn apply(&self, a: &[Letter]) -> Word {
        Word(
            self.syms
                .iter()
                .map(|s| match *s {
                    Sym::Var(i) => a[i as usize],
                    Sym::Letter(b) => b,
                })
                .collect(),
        )
    }

    /// Single-variable substitution `w(a)`.
    pub fn at(&self, a: Letter) -> Word {
        Word(
            self.syms
                .iter()
                .map(|s| match *s {
                    Sym::Var(_) => a,
                    Sym::Letter(b) => b,
                })
                .collect(),
        )
    }

    /// Replace `v_i` by `u(i)`: the generator of the subspace of `self`
    /// indexed by the variable word `u` of length `m`.
    pub fn compose(&self, u: &VariableWord) -> Result<VariableWord> {
        if u.len() != self.m as usize {
            return Err(Error::LengthMismatch {
                expected: self.m as usize,
                got: u.len(),
            });
        }
        VariableWord::new(
            self.syms
                .iter()
                .map(|s| match *s {
                    Sym::Var(i) => u.syms[i as usize],
                    letter => letter,
                })
                .collect(),
        )
    }

    pub fn concat_word(&self, tail: &Word) -> VariableWord {
        let mut syms = self.syms.clone();
        syms.extend(tail.0.iter().map(|&a| Sym::Letter(a)));
        VariableWord { syms, m: self.m }
    }

    /// `prefix ^ self`, a variable word with the letters of `prefix` in front.
    pub fn prepend_word(&self, prefix: &Word) -> VariableWord {
        let mut syms: Vec<Sym> = prefix.0.iter().map(|&a| Sym::Letter(a)).collect();
        syms.extend_from_slice(&self.syms);
        VariableWord { syms, m: self.m }
    }
}

impl Ord for VariableWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.syms.cmp(&other.syms))
    }
}

impl PartialOrd for VariableWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VariableWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let plain = self.m == 1
            && self
                .syms
                .iter()
                .all(|s| !matches!(s, Sym::Letter(a) if *a > 9));
        if plain {
            for s in &self.syms {
                match s {
                    Sym::Var(_) => f.write_str("v")?,
                    Sym::Letter(a) => write!(f, "{a}")?,
                }
            }
            Ok(())
        } else {
            write!(f, "{:?}", self.codes())
        }
    }
}

impl fmt::Debug for VariableWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VariableWord({self})")
    }
}

impl Serialize for VariableWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for VariableWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        VariableWord::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// All m-variable words of length `n` over `[k]`, in symbol order.
pub fn variable_words(k: u32, n: usize, m: u32) -> Vec<VariableWord> {
    fn go(k: u32, n: usize, m: u32, cur: Option<u32>, acc: &mut Vec<Sym>, out: &mut Vec<VariableWord>) {
        if acc.len() == n {
            if cur == Some(m - 1) {
                out.push(VariableWord { syms: acc.clone(), m });
            }
            return;
        }
        let remaining = n - acc.len();
        let used = cur.map_or(0, |c| c + 1);
        if (m - used) as usize > remaining {
            return;
        }
        if let Some(c) = cur {
            acc.push(Sym::Var(c));
            go(k, n, m, cur, acc, out);
            acc.pop();
        }
        if used < m {
            acc.push(Sym::Var(used));
            go(k, n, m, Some(used), acc, out);
            acc.pop();
        }
        for a in 1..=k {
            acc.push(Sym::Letter(a));
            go(k, n, m, cur, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if m >= 1 {
        go(k, n, m, None, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// All left variable words of length `len >= 1`.
pub fn left_variable_words(k: u32, len: usize) -> Vec<VariableWord> {
    if len == 0 {
        return Vec::new();
    }
    let alphabet: Vec<Sym> = std::iter::once(Sym::Var(0))
        .chain((1..=k).map(Sym::Letter))
        .collect();
    let base = alphabet.len();
    let total = base.pow(len as u32 - 1);
    (0..total)
        .map(|mut r| {
            let mut rest = vec![Sym::Var(0); len - 1];
            for slot in rest.iter_mut().rev() {
                *slot = alphabet[r % base];
                r /= base;
            }
            let mut syms = vec![Sym::Var(0)];
            syms.extend(rest);
            VariableWord { syms, m: 1 }
        })
        .collect()
}

/// `x` and `y` are `(i,j)`-equivalent: same length, and every letter other
/// than `i`, `j` sits at the same positions in both.
pub fn is_equivalent(x: &Word, y: &Word, i: Letter, j: Letter) -> Result<bool> {
    if i == j {
        return Err(Error::Precondition("equivalence needs i != j".into()));
    }
    if x.len() != y.len() {
        return Ok(false);
    }
    Ok(x.0.iter().zip(&y.0).all(|(&a, &b)| {
        let a_free = a == i || a == j;
        let b_free = b == i || b == j;
        if a_free || b_free {
            a_free && b_free
        } else {
            a == b
        }
    }))
}

/// Every word `(i,j)`-equivalent to `x`, including `x`.
pub fn equivalents(x: &Word, i: Letter, j: Letter) -> Vec<Word> {
    let free: Vec<usize> = (0..x.len()).filter(|&p| x.0[p] == i || x.0[p] == j).collect();
    (0..1usize << free.len())
        .map(|mask| {
            let mut y = x.clone();
            for (b, &p) in free.iter().enumerate() {
                y.0[p] = if mask >> b & 1 == 1 { j } else { i };
            }
            y
        })
        .collect()
}

/// A combinatorial subspace: the substitutions of an m-variable word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CombSubspace {
    k: u32,
    generator: VariableWord,
}

impl CombSubspace {
    pub fn new(k: u32, generator: VariableWord) -> Result<Self> {
        generator.check_letters(k)?;
        Ok(Self { k, generator })
    }

    /// `[k]^n` itself, generated by `(v_0, ..., v_{n-1})`.
    pub fn cube(k: u32, n: usize) -> Result<Self> {
        check_alphabet(k)?;
        if n == 0 {
            return Err(Error::OutOfRange("the cube needs n >= 1".into()));
        }
        Ok(Self {
            k,
            generator: VariableWord {
                syms: (0..n as u32).map(Sym::Var).collect(),
                m: n as u32,
            },
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn dim(&self) -> u32 {
        self.generator.vars()
    }

    pub fn generator(&self) -> &VariableWord {
        &self.generator
    }

    pub fn word_len(&self) -> usize {
        self.generator.len()
    }

    /// Points in lexicographic order of the substituted tuple.
    pub fn points(&self) -> Vec<Word> {
        let m = self.dim() as usize;
        all_words(self.k, m).map(|a| self.generator.apply(&a.0)).collect()
    }

    pub fn contains(&self, x: &Word) -> bool {
        if x.len() != self.word_len() {
            return false;
        }
        let mut vals: Vec<Option<Letter>> = vec![None; self.dim() as usize];
        for (s, &a) in self.generator.syms.iter().zip(&x.0) {
            match *s {
                Sym::Letter(b) if b != a => return false,
                Sym::Var(i) => match vals[i as usize] {
                    Some(b) if b != a => return false,
                    _ => vals[i as usize] = Some(a),
                },
                _ => {}
            }
        }
        x.0.iter().all(|&a| a >= 1 && a <= self.k)
    }

    /// `Subs_l(V)`, composing l-variable words of length `dim(V)` with the
    /// generator.
    pub fn subspaces(&self, l: u32) -> Result<Vec<CombSubspace>> {
        if l == 0 || l > self.dim() {
            return Err(Error::OutOfRange(format!("subspace dimension {l} not in 1..={}", self.dim())));
        }
        variable_words(self.k, self.dim() as usize, l)
            .iter()
            .map(|u| {
                Ok(CombSubspace {
                    k: self.k,
                    generator: self.generator.compose(u)?,
                })
            })
            .collect()
    }
}
