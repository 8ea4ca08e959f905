//! Exhaustive searches for lines and Carlson-Simpson trees inside sets,
//! extremal structure-free sets, and the reduction of density Hales-Jewett
//! to Carlson-Simpson lines.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::cs_tree::CsTree;
use crate::error::{Error, Result};
use crate::rational::{frac, Rational};
use crate::words::{all_words, left_variable_words, level_size, variable_words, Sym, VariableWord, Word};
use crate::wordset::WordSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_millis: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_nodes: 1 << 32,
            max_millis: 600_000,
        }
    }
}

struct Meter {
    budget: SearchBudget,
    start: Instant,
    nodes: u64,
}

impl Meter {
    fn new(budget: SearchBudget) -> Self {
        Self {
            budget,
            start: Instant::now(),
            nodes: 0,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            return Err(Error::Budget(format!("more than {} search nodes", self.budget.max_nodes)));
        }
        if self.nodes % 4096 == 0 && self.start.elapsed() > Duration::from_millis(self.budget.max_millis) {
            return Err(Error::Budget(format!("more than {} ms", self.budget.max_millis)));
        }
        Ok(())
    }
}

/// The least line `{w(a)}` of `[k]^n` inside `A`, and how many lines were scanned.
pub fn find_line(a: &WordSet, n: usize) -> (Option<VariableWord>, u64) {
    let k = a.k();
    let mut scanned = 0;
    for w in variable_words(k, n, 1) {
        scanned += 1;
        if (1..=k).all(|x| a.contains(&w.at(x))) {
            return (Some(w), scanned);
        }
    }
    (None, scanned)
}

/// A generating sequence `(c, w_0, ..., w_{m-1})` of single-variable words.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CsWitness {
    pub stem: Word,
    pub gens: Vec<VariableWord>,
}

impl CsWitness {
    /// `{c} ∪ {c⌢w_0(a_0)⌢...⌢w_{n-1}(a_{n-1})}` by level.
    pub fn levels(&self, k: u32) -> Vec<Vec<Word>> {
        let mut out = vec![vec![self.stem.clone()]];
        for g in &self.gens {
            let last = out.last().expect("nonempty");
            let next = last
                .iter()
                .flat_map(|x| (1..=k).map(move |a| x.concat(&g.at(a))))
                .collect();
            out.push(next);
        }
        out
    }

    pub fn points(&self, k: u32) -> Vec<Word> {
        self.levels(k).into_iter().flatten().collect()
    }

    pub fn is_inside(&self, k: u32, a: &WordSet) -> bool {
        self.points(k).iter().all(|x| a.contains(x))
    }

    pub fn has_pattern(&self, pattern: &[VariableWord]) -> bool {
        pattern.len() == self.gens.len()
            && self
                .gens
                .iter()
                .zip(pattern)
                .all(|(w, p)| w.len() >= p.len() && w.syms()[..p.len()] == *p.syms())
    }

    pub fn to_tree(&self, k: u32) -> Result<CsTree> {
        CsTree::new(k, self.stem.clone(), self.gens.clone())
    }
}

/// Candidate `w_j` words: left variable words, or `p ⌢ u` for a pattern `p`.
fn generator_candidates(k: u32, len: usize, pattern: Option<&VariableWord>) -> Vec<VariableWord> {
    match pattern {
        None => left_variable_words(k, len),
        Some(p) => {
            if len < p.len() {
                return Vec::new();
            }
            left_variable_words(k, len - p.len() + 1)
                .into_iter()
                .filter_map(|u| {
                    let mut syms = p.syms().to_vec();
                    syms.extend_from_slice(&u.syms()[1..]);
                    VariableWord::new(syms).ok()
                })
                .collect()
        }
    }
}

/// The least generating sequence whose point set lies in `A`. With a
/// pattern, `w_n` must start with `p_n` and need not be left.
pub fn find_cs(
    a: &WordSet,
    m: usize,
    pattern: Option<&[VariableWord]>,
    budget: SearchBudget,
) -> Result<Option<CsWitness>> {
    if m == 0 {
        return Err(Error::OutOfRange("m must be at least 1".into()));
    }
    if let Some(p) = pattern {
        if p.len() != m {
            return Err(Error::ArityMismatch { expected: m, got: p.len() });
        }
        if let Some(bad) = p.iter().find(|w| w.vars() != 1) {
            return Err(Error::InvalidVariableWord(format!("pattern word {bad} must have one variable")));
        }
    }
    let k = a.k();
    let Some(top) = a.max_level() else {
        return Ok(None);
    };
    let min_len = |j: usize| -> usize {
        match pattern {
            Some(p) => p[j..].iter().map(|w| w.len().max(1)).sum(),
            None => m - j,
        }
    };
    let mut meter = Meter::new(budget);
    struct Ctx<'a> {
        a: &'a WordSet,
        k: u32,
        m: usize,
        top: usize,
        pattern: Option<&'a [VariableWord]>,
    }
    fn dfs(
        cx: &Ctx<'_>,
        min_len: &dyn Fn(usize) -> usize,
        level: &[Word],
        len: usize,
        gens: &mut Vec<VariableWord>,
        meter: &mut Meter,
    ) -> Result<bool> {
        let j = gens.len();
        if j == cx.m {
            return Ok(true);
        }
        let rest = if j + 1 < cx.m { min_len(j + 1) } else { 0 };
        let p = cx.pattern.map(|p| &p[j]);
        let lo = p.map_or(1, |p| p.len().max(1));
        let hi = cx.top.saturating_sub(len + rest);
        for l in lo..=hi {
            for w in generator_candidates(cx.k, l, p) {
                meter.tick()?;
                let mut next = Vec::with_capacity(level.len() * cx.k as usize);
                let mut ok = true;
                'outer: for x in level {
                    for b in 1..=cx.k {
                        let y = x.concat(&w.at(b));
                        if !cx.a.contains(&y) {
                            ok = false;
                            break 'outer;
                        }
                        next.push(y);
                    }
                }
                if !ok {
                    continue;
                }
                gens.push(w);
                if dfs(cx, min_len, &next, len + l, gens, meter)? {
                    return Ok(true);
                }
                gens.pop();
            }
        }
        Ok(false)
    }
    let cx = Ctx { a, k, m, top, pattern };
    for stem_len in 0..=top {
        if stem_len + min_len(0) > top {
            break;
        }
        let Some(bits) = a.level(stem_len) else { continue };
        for r in bits.iter() {
            let stem = Word::unrank(k, stem_len, r);
            let mut gens = Vec::new();
            if dfs(&cx, &min_len, std::slice::from_ref(&stem), stem_len, &mut gens, &mut meter)? {
                let w = CsWitness { stem, gens };
                if !w.is_inside(k, a) || pattern.is_some_and(|p| !w.has_pattern(p)) {
                    return Err(Error::InvalidTree("witness failed re-verification".into()));
                }
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// What an extremal set must avoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Structure {
    /// A combinatorial line inside one level.
    Line,
    /// A Carlson-Simpson tree of the given dimension with levels in the universe.
    CsTree(usize),
}

/// The universe `∪_{n ∈ levels} [k]^n` in (length, lex) order and every
/// forbidden structure as a bitmask over it.
pub fn hyperedges(k: u32, levels: &[usize], structure: Structure) -> Result<(Vec<Word>, Vec<u64>)> {
    let mut levels = levels.to_vec();
    levels.sort_unstable();
    levels.dedup();
    let mut size = 0usize;
    for &n in &levels {
        size += level_size(k, n)?;
    }
    if size > 64 {
        return Err(Error::Budget(format!("universe of {size} words exceeds 64")));
    }
    let universe: Vec<Word> = levels.iter().flat_map(|&n| all_words(k, n)).collect();
    let index = |w: &Word| universe.binary_search(w);
    let mask = |pts: &[Word]| -> u64 { pts.iter().map(|p| 1u64 << index(p).expect("in universe")).fold(0, |a, b| a | b) };
    let mut edges = Vec::new();
    match structure {
        Structure::Line => {
            for &n in &levels {
                for w in variable_words(k, n, 1) {
                    let pts: Vec<Word> = (1..=k).map(|a| w.at(a)).collect();
                    edges.push(mask(&pts));
                }
            }
        }
        Structure::CsTree(m) => {
            if m == 0 {
                return Err(Error::OutOfRange("tree dimension must be at least 1".into()));
            }
            if let Some(&top) = levels.last() {
                for t in CsTree::enumerate_in_universe(k, top, m) {
                    if t.level_set().iter().all(|l| levels.contains(l)) {
                        edges.push(mask(&t.points()));
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Ok((universe, edges))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extremal {
    pub max: usize,
    /// The least maximum set: at the first element where two maximum sets
    /// differ, the witness contains it.
    pub witness: Vec<Word>,
    pub universe: usize,
    pub structures: usize,
    pub nodes: u64,
}

fn is_free(mask: u64, edges: &[u64]) -> bool {
    edges.iter().all(|&e| mask & e != e)
}

fn witness_words(universe: &[Word], mask: u64) -> Vec<Word> {
    (0..universe.len()).filter(|&i| mask >> i & 1 == 1).map(|i| universe[i].clone()).collect()
}

/// Include-first order: the set holding the least differing element comes first.
fn earlier(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    diff != 0 && a & (diff & diff.wrapping_neg()) != 0
}

/// Largest structure-free subset by branch and bound. Elements are decided
/// in order, inclusion first; a structure is checked when its last element
/// is decided; the bound subtracts a greedy packing of structures that are
/// still completable with pairwise disjoint undecided parts.
pub fn extremal_free(k: u32, levels: &[usize], structure: Structure, budget: SearchBudget) -> Result<Extremal> {
    let (universe, edges) = hyperedges(k, levels, structure)?;
    let n = universe.len();
    let mut by_last: Vec<Vec<u64>> = vec![Vec::new(); n];
    for &e in &edges {
        by_last[63 - e.leading_zeros() as usize].push(e);
    }
    struct State<'a> {
        n: usize,
        edges: &'a [u64],
        by_last: &'a [Vec<u64>],
        best: Option<(usize, u64)>,
        meter: Meter,
    }
    fn bound(st: &State<'_>, idx: usize, chosen: u64) -> usize {
        let remaining_mask: u64 = if idx >= 64 { 0 } else { (!0u64) << idx } & mask_below(st.n);
        let mut used = 0u64;
        let mut packed = 0;
        for &e in st.edges {
            let rest = e & remaining_mask;
            // Completable: decided part all chosen, some undecided part left.
            if rest != 0 && (e & !remaining_mask) & !chosen == 0 && rest & used == 0 {
                used |= rest;
                packed += 1;
            }
        }
        chosen.count_ones() as usize + (st.n - idx) - packed
    }
    fn mask_below(n: usize) -> u64 {
        if n >= 64 {
            !0
        } else {
            (1u64 << n) - 1
        }
    }
    fn go(st: &mut State<'_>, idx: usize, chosen: u64) -> Result<()> {
        st.meter.tick()?;
        if idx == st.n {
            let size = chosen.count_ones() as usize;
            if st.best.is_none_or(|(b, _)| size > b) {
                st.best = Some((size, chosen));
            }
            return Ok(());
        }
        if let Some((b, _)) = st.best {
            if bound(st, idx, chosen) <= b {
                return Ok(());
            }
        }
        let with = chosen | 1u64 << idx;
        if st.by_last[idx].iter().all(|&e| with & e != e) {
            go(st, idx + 1, with)?;
        }
        go(st, idx + 1, chosen)
    }
    let mut st = State {
        n,
        edges: &edges,
        by_last: &by_last,
        best: None,
        meter: Meter::new(budget),
    };
    go(&mut st, 0, 0)?;
    let (max, mask) = st.best.expect("the empty set is free");
    if !is_free(mask, &edges) {
        return Err(Error::InvalidTree("extremal witness contains a structure".into()));
    }
    Ok(Extremal {
        max,
        witness: witness_words(&universe, mask),
        universe: n,
        structures: edges.len(),
        nodes: st.meter.nodes,
    })
}

/// The same maximum by scanning all `2^|universe|` subsets.
pub fn extremal_free_brute(k: u32, levels: &[usize], structure: Structure) -> Result<Extremal> {
    let (universe, edges) = hyperedges(k, levels, structure)?;
    let n = universe.len();
    if n > 24 {
        return Err(Error::Budget(format!("brute force over 2^{n} subsets")));
    }
    let mut best: (usize, u64) = (0, 0);
    for mask in 0..(1u64 << n) {
        if !is_free(mask, &edges) {
            continue;
        }
        let size = mask.count_ones() as usize;
        if size > best.0 || (size == best.0 && earlier(mask, best.1)) {
            best = (size, mask);
        }
    }
    Ok(Extremal {
        max: best.0,
        witness: witness_words(&universe, best.1),
        universe: n,
        structures: edges.len(),
        nodes: 1 << n,
    })
}

/// The run of the reduction from a dense subset of `[k]^n` to a line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DhjReduction {
    /// `y_ℓ ∈ [k]^{n-ℓ}` for `ℓ = 1, ..., n`, each maximizing `dens(A_y)`.
    pub ys: Vec<Word>,
    #[serde(skip)]
    pub b: WordSet,
    pub cs_line: Option<CsWitness>,
    /// `y_{ℓ_R} ⌢ c ⌢ w`, a line of `[k]^n` inside `A`.
    pub line: Option<VariableWord>,
}

/// `A_y = {x ∈ [k]^ℓ : y⌢x ∈ A}`.
pub fn section(a: &WordSet, y: &Word, ell: usize) -> Result<WordSet> {
    let mut out = WordSet::new(a.k())?;
    for x in all_words(a.k(), ell) {
        if a.contains(&y.concat(&x)) {
            out.insert(&x)?;
        }
    }
    Ok(out)
}

pub fn dhj_reduce(a: &WordSet, n: usize, delta: &Rational, budget: SearchBudget) -> Result<DhjReduction> {
    let k = a.k();
    if a.levels().any(|l| l != n && a.level_count(l) > 0) {
        return Err(Error::Precondition(format!("the set must lie in [k]^{n}")));
    }
    if a.level_density(n)? < *delta {
        return Err(Error::Precondition(format!(
            "density {} is below delta",
            a.level_density(n)?
        )));
    }
    let mut ys = Vec::with_capacity(n);
    let mut b = WordSet::new(k)?;
    for ell in 1..=n {
        let mut best: Option<(Rational, Word, WordSet)> = None;
        for y in all_words(k, n - ell) {
            let s = section(a, &y, ell)?;
            let d = frac(s.len(), level_size(k, ell)? as u64);
            if best.as_ref().is_none_or(|(bd, _, _)| d > *bd) {
                best = Some((d, y, s));
            }
        }
        let (_, y, s) = best.expect("nonempty level");
        b = b.union(&s);
        ys.push(y);
    }
    let cs_line = find_cs(&b, 1, None, budget)?;
    let line = match &cs_line {
        Some(w) => {
            let ell = w.stem.len() + w.gens[0].len();
            let prefix = ys[ell - 1].concat(&w.stem);
            let v = w.gens[0].prepend_word(&prefix);
            if !(1..=k).all(|x| a.contains(&v.at(x))) {
                return Err(Error::InvalidTree(format!("reduced line {v} leaves the set")));
            }
            Some(v)
        }
        None => None,
    };
    Ok(DhjReduction { ys, b, cs_line, line })
}

/// Whether a variable word over `[k]` of length `n` gives a line inside `A`.
pub fn is_line_in(a: &WordSet, w: &VariableWord) -> bool {
    w.vars() == 1 && w.syms().iter().any(|s| matches!(s, Sym::Var(_))) && (1..=a.k()).all(|x| a.contains(&w.at(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ws(k: u32, items: &[&str]) -> WordSet {
        let words: Vec<Word> = items.iter().map(|s| Word::parse(s).unwrap()).collect();
        WordSet::from_words(k, &words).unwrap()
    }

    fn vw(s: &str) -> VariableWord {
        VariableWord::parse(s).unwrap()
    }

    #[test]
    fn line_examples() {
        assert_eq!(find_line(&ws(2, &["11", "22"]), 2).0, Some(vw("vv")));
        let (none, scanned) = find_line(&ws(2, &["12", "21"]), 2);
        assert_eq!((none, scanned), (None, 5));
        assert_eq!(find_line(&WordSet::full_levels(3, &[3]).unwrap(), 3).0, Some(vw("vvv")));
    }

    #[test]
    fn cs_examples() {
        let b = SearchBudget::default();
        let w = find_cs(&ws(2, &["-", "1", "2"]), 1, None, b).unwrap().unwrap();
        assert_eq!((w.stem.clone(), w.gens.clone()), (Word::empty(), vec![vw("v")]));
        assert_eq!(find_cs(&ws(2, &["1", "2", "11", "21"]), 1, None, b).unwrap(), None);
        let p = [vw("v1")];
        let w = find_cs(&ws(2, &["-", "11", "21", "2"]), 1, Some(&p), b).unwrap().unwrap();
        assert_eq!((w.stem.clone(), w.gens.clone()), (Word::empty(), vec![vw("v1")]));
        let p = [vw("1v")];
        let w = find_cs(&ws(2, &["2", "2111", "2121", "212"]), 1, Some(&p), b).unwrap().unwrap();
        assert_eq!(w.gens, vec![VariableWord::parse("1v1").unwrap()]);
    }

    #[test]
    fn extremal_small() {
        let b = SearchBudget::default();
        let e = extremal_free(2, &[0, 1, 2], Structure::CsTree(1), b).unwrap();
        assert_eq!(e.max, 4);
        assert_eq!(e, Extremal { nodes: e.nodes, ..extremal_free_brute(2, &[0, 1, 2], Structure::CsTree(1)).unwrap() });
        let alt = ws(2, &["1", "2", "11", "21"]);
        let (universe, edges) = hyperedges(2, &[0, 1, 2], Structure::CsTree(1)).unwrap();
        let mask = universe
            .iter()
            .enumerate()
            .filter(|(_, w)| alt.contains(w))
            .fold(0u64, |m, (i, _)| m | 1 << i);
        assert!(is_free(mask, &edges));
        for (n, want) in [(1, 1), (2, 2), (3, 3), (4, 6)] {
            assert_eq!(extremal_free(2, &[n], Structure::Line, b).unwrap().max, want);
        }
    }

    #[test]
    fn reduction_example() {
        let a = ws(2, &["11", "22", "12"]);
        let r = dhj_reduce(&a, 2, &Rational::new(3.into(), 4.into()), SearchBudget::default()).unwrap();
        assert_eq!(r.ys, vec![Word::parse("1").unwrap(), Word::empty()]);
        assert_eq!(r.line, Some(vw("1v")));
        let full = WordSet::full_levels(2, &[2]).unwrap();
        let r = dhj_reduce(&full, 2, &Rational::from_integer(1.into()), SearchBudget::default()).unwrap();
        assert!(is_line_in(&full, r.line.as_ref().unwrap()));
    }
}
