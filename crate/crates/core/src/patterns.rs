//! Pattern restrictions `R_{p,L}`, their coding `Φ_{p,L}`, and the coding of
//! level products of homogeneous trees by words over a product alphabet.

use serde::Serialize;

use crate::cs_tree::CsTree;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::regularity::{self, is_sparse, RegMode};
use crate::words::{all_words, check_alphabet, left_variable_words, level_size, Letter, Sym, VariableWord, Word};
use crate::wordset::WordSet;

/// The `(p,L)`-restriction of `[k]^{<N}` for a single-variable word `p` of length `τ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternRestriction {
    k: u32,
    p: VariableWord,
    levels: Vec<usize>,
}

impl PatternRestriction {
    pub fn new(k: u32, p: VariableWord, levels: &[usize]) -> Result<Self> {
        check_alphabet(k)?;
        p.check_letters(k)?;
        if p.vars() != 1 {
            return Err(Error::InvalidVariableWord(format!("pattern {p} must have one variable")));
        }
        let mut sorted = levels.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() || sorted.len() != levels.len() {
            return Err(Error::Precondition("levels must be nonempty and distinct".into()));
        }
        if !is_sparse(p.len(), &sorted) {
            return Err(Error::Precondition(format!("levels {sorted:?} are not {}-sparse", p.len())));
        }
        Ok(Self { k, p, levels: sorted })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn pattern(&self) -> &VariableWord {
        &self.p
    }

    pub fn tau(&self) -> usize {
        self.p.len()
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// `L^{(τ)} = {l_i - iτ + i}`.
    pub fn coded_levels(&self) -> Vec<usize> {
        let t = self.tau();
        self.levels.iter().enumerate().map(|(i, &l)| l + i - i * t).collect()
    }

    /// `|R_{p,L}(i)| = k^{l_0} · Π_{j<i} k · k^{l_{j+1}-l_j-τ}`, which is `k^{l'_i}`.
    pub fn level_count(&self, i: usize) -> Result<usize> {
        level_size(self.k, self.coded_levels()[i])
    }

    /// `R_{p,L}(i)` in the order induced by `Φ` from lex order.
    pub fn level(&self, i: usize) -> Result<Vec<Word>> {
        if i >= self.levels.len() {
            return Err(Error::OutOfRange(format!("level index {i}")));
        }
        let t = self.tau();
        let mut cur: Vec<Word> = all_words(self.k, self.levels[0]).collect();
        for j in 0..i {
            let gap = self.levels[j + 1] - self.levels[j] - t;
            let next_size = cur.len() * self.k as usize * level_size(self.k, gap)?;
            let mut next = Vec::with_capacity(next_size);
            for x in &cur {
                for a in 1..=self.k {
                    let xa = x.concat(&self.p.at(a));
                    for y in all_words(self.k, gap) {
                        next.push(xa.concat(&y));
                    }
                }
            }
            cur = next;
        }
        Ok(cur)
    }

    /// `R_{p,L}` as a word set.
    pub fn to_wordset(&self) -> Result<WordSet> {
        let mut s = WordSet::new(self.k)?;
        for i in 0..self.levels.len() {
            for w in self.level(i)? {
                s.insert(&w)?;
            }
        }
        Ok(s)
    }

    pub fn contains(&self, t: &Word) -> bool {
        self.phi_inverse(t).is_ok()
    }

    /// `Φ_{p,L}(x)` for `|x| ∈ L^{(τ)}`.
    pub fn phi(&self, x: &Word) -> Result<Word> {
        x.check(self.k)?;
        let coded = self.coded_levels();
        let i = coded.iter().position(|&l| l == x.len()).ok_or_else(|| {
            Error::Precondition(format!("length {} is not in L^(tau) = {coded:?}", x.len()))
        })?;
        Ok(self.phi_at(x, i, &coded))
    }

    fn phi_at(&self, x: &Word, i: usize, coded: &[usize]) -> Word {
        if i == 0 {
            return x.clone();
        }
        let cut = coded[i - 1];
        let head = self.phi_at(&x.prefix(cut), i - 1, coded);
        let mut out = head.concat(&self.p.at(x.0[cut]));
        out.0.extend_from_slice(&x.0[cut + 1..]);
        out
    }

    /// The inverse of `Φ_{p,L}`, defined on `R_{p,L}`.
    pub fn phi_inverse(&self, t: &Word) -> Result<Word> {
        let not_member = || Error::NotAMember(format!("{t} in R_(p,L)"));
        t.check(self.k).map_err(|_| not_member())?;
        let i = self.levels.iter().position(|&l| l == t.len()).ok_or_else(not_member)?;
        let mut tail: Vec<Letter> = Vec::new();
        let mut cur = t.0.clone();
        let var_pos = self
            .p
            .syms()
            .iter()
            .position(|s| matches!(s, Sym::Var(_)))
            .expect("pattern has a variable");
        for j in (1..=i).rev() {
            let base = self.levels[j - 1];
            let seg = &cur[base..base + self.tau()];
            let a = seg[var_pos];
            if self.p.at(a).0 != seg {
                return Err(not_member());
            }
            let mut piece = vec![a];
            piece.extend_from_slice(&cur[base + self.tau()..]);
            piece.extend(tail);
            tail = piece;
            cur.truncate(base);
        }
        cur.extend(tail);
        Ok(Word(cur))
    }

    /// `Φ_{p,L}^{-1}(A)` on the coded levels.
    pub fn pull_back(&self, a: &WordSet) -> Result<WordSet> {
        let mut out = WordSet::new(self.k)?;
        for w in a.words() {
            if let Ok(x) = self.phi_inverse(&w) {
                out.insert(&x)?;
            }
        }
        Ok(out)
    }

    /// `dens_{R_{p,L}(i)}(A)`.
    pub fn restricted_density(&self, a: &WordSet, i: usize) -> Result<Rational> {
        Ok(a.density_in(&self.level(i)?))
    }

    /// The image of a Carlson-Simpson line with levels in `L^{(τ)}`, as
    /// `(c, w)` with `Φ(W) = {c} ∪ {c⌢w(a)}` and `p` an initial segment of `w`.
    pub fn cs_image(&self, line: &CsTree) -> Result<(Word, VariableWord)> {
        if line.dim() != 1 || line.k() != self.k {
            return Err(Error::Precondition("cs_image needs a line over the same alphabet".into()));
        }
        let coded = self.coded_levels();
        let levs = line.level_set();
        if let Some(l) = levs.iter().find(|l| !coded.contains(l)) {
            return Err(Error::Precondition(format!("line level {l} is not in L^(tau) = {coded:?}")));
        }
        let c = self.phi(line.stem())?;
        let tops: Vec<Word> = line.level(1).iter().map(|x| self.phi(x)).collect::<Result<_>>()?;
        let w = line_generator(self.k, &c, &tops)
            .ok_or_else(|| Error::InvalidTree("image is not a Carlson-Simpson line".into()))?;
        if w.syms()[..self.tau()] != *self.p.syms() {
            return Err(Error::InvalidTree(format!("image generator {w} does not start with {}", self.p)));
        }
        Ok((c, w))
    }
}

/// The variable word `w` with `tops[a-1] = c⌢w(a)`, if there is one.
pub fn line_generator(k: u32, c: &Word, tops: &[Word]) -> Option<VariableWord> {
    if tops.len() != k as usize {
        return None;
    }
    let len = tops[0].len().checked_sub(c.len())?;
    if tops.iter().any(|t| t.len() != c.len() + len || !c.is_prefix_of(t)) {
        return None;
    }
    let mut syms = Vec::with_capacity(len);
    for j in 0..len {
        let col: Vec<Letter> = tops.iter().map(|t| t.0[c.len() + j]).collect();
        if col.iter().all(|&b| b == col[0]) {
            syms.push(Sym::Letter(col[0]));
        } else if col.iter().enumerate().all(|(i, &b)| b == i as Letter + 1) {
            syms.push(Sym::Var(0));
        } else {
            return None;
        }
    }
    let w = VariableWord::new(syms).ok()?;
    (1..=k).all(|a| c.concat(&w.at(a)) == tops[a as usize - 1]).then_some(w)
}

/// A line `{c} ∪ {c⌢w(a)}` inside a set, with `w` of a given pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternLine {
    pub stem: Word,
    pub generator: VariableWord,
    /// The `τ`-sparse levels the set was regularized on.
    pub levels: Vec<usize>,
}

/// Regularize `{B}` on a `τ`-sparse subset of `candidates`, code `B` back
/// through `Φ_{p,L}`, find a line there and map it forward. The returned
/// line is checked to lie in `B` and to have pattern `p`.
pub fn pattern_line(
    b: &WordSet,
    p: &VariableWord,
    candidates: &[usize],
    eps: &Rational,
    width: usize,
) -> Result<Option<PatternLine>> {
    let k = b.k();
    let tau = p.len();
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    // Greedy τ-sparse subset.
    let mut sparse: Vec<usize> = Vec::new();
    for l in sorted {
        if sparse.last().is_none_or(|&m| l >= m + tau) {
            sparse.push(l);
        }
    }
    if sparse.len() < width.max(2) {
        return Err(Error::Precondition(format!(
            "need {} {tau}-sparse levels, found {}",
            width.max(2),
            sparse.len()
        )));
    }
    let reg = regularity::regularize(std::slice::from_ref(b), eps, width.max(2), &sparse, Some(tau), RegMode::BestEffort)?;
    let r = PatternRestriction::new(k, p.clone(), &reg.levels)?;
    let coded = r.coded_levels();
    let pulled = r.pull_back(b)?;
    for (i, &li) in coded.iter().enumerate() {
        for stem in all_words(k, li) {
            if !pulled.contains(&stem) {
                continue;
            }
            for &lj in &coded[i + 1..] {
                for w in left_variable_words(k, lj - li) {
                    if (1..=k).all(|a| pulled.contains(&stem.concat(&w.at(a)))) {
                        let line = CsTree::new(k, stem.clone(), vec![w])?;
                        let (c, g) = r.cs_image(&line)?;
                        let ok = b.contains(&c) && (1..=k).all(|a| b.contains(&c.concat(&g.at(a))));
                        if !ok {
                            return Err(Error::InvalidTree("mapped line leaves the set".into()));
                        }
                        return Ok(Some(PatternLine {
                            stem: c,
                            generator: g,
                            levels: reg.levels.clone(),
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Words over `A_b = [b_1] × ... × [b_d]`, with `(a_1, ..., a_d)` coded as the
/// letter `1 + Σ (a_i - 1) Π_{j>i} b_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousCoding {
    b: Vec<u32>,
}

impl HomogeneousCoding {
    pub fn new(b: Vec<u32>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::OutOfRange("need at least one tree".into()));
        }
        if let Some(&bi) = b.iter().find(|&&bi| bi < 2) {
            return Err(Error::AlphabetTooSmall(bi));
        }
        b.iter()
            .try_fold(1u32, |acc, &bi| acc.checked_mul(bi))
            .ok_or_else(|| Error::OutOfRange("product alphabet too large".into()))?;
        Ok(Self { b })
    }

    pub fn d(&self) -> usize {
        self.b.len()
    }

    pub fn branching(&self) -> &[u32] {
        &self.b
    }

    /// `|A_b|`.
    pub fn alphabet(&self) -> u32 {
        self.b.iter().product()
    }

    pub fn encode_letter(&self, tuple: &[Letter]) -> Result<Letter> {
        if tuple.len() != self.d() {
            return Err(Error::ArityMismatch {
                expected: self.d(),
                got: tuple.len(),
            });
        }
        let mut code = 0;
        for (&a, &bi) in tuple.iter().zip(&self.b) {
            if a == 0 || a > bi {
                return Err(Error::LetterOutOfRange { letter: a, k: bi });
            }
            code = code * bi + (a - 1);
        }
        Ok(code + 1)
    }

    pub fn decode_letter(&self, letter: Letter) -> Result<Vec<Letter>> {
        if letter == 0 || letter > self.alphabet() {
            return Err(Error::LetterOutOfRange {
                letter,
                k: self.alphabet(),
            });
        }
        let mut rest = letter - 1;
        let mut out = vec![0; self.d()];
        for (slot, &bi) in out.iter_mut().zip(&self.b).rev() {
            *slot = rest % bi + 1;
            rest /= bi;
        }
        Ok(out)
    }

    /// A word over `A_b` from its letters as tuples.
    pub fn encode_word(&self, tuples: &[Vec<Letter>]) -> Result<Word> {
        Ok(Word(tuples.iter().map(|t| self.encode_letter(t)).collect::<Result<_>>()?))
    }

    /// `π̄_i(s)`.
    pub fn project(&self, s: &Word, i: usize) -> Result<Word> {
        let mut out = Vec::with_capacity(s.len());
        for &a in &s.0 {
            out.push(self.decode_letter(a)?[i]);
        }
        Ok(Word(out))
    }

    /// `Φ_b(s) = (π̄_1(s), ..., π̄_d(s))`.
    pub fn code(&self, s: &Word) -> Result<Vec<Word>> {
        (0..self.d()).map(|i| self.project(s, i)).collect()
    }

    pub fn decode(&self, parts: &[Word]) -> Result<Word> {
        if parts.len() != self.d() {
            return Err(Error::ArityMismatch {
                expected: self.d(),
                got: parts.len(),
            });
        }
        let n = parts[0].len();
        if parts.iter().any(|w| w.len() != n) {
            return Err(Error::Precondition("components must share a level".into()));
        }
        let tuples: Vec<Vec<Letter>> = (0..n).map(|j| parts.iter().map(|w| w.0[j]).collect()).collect();
        self.encode_word(&tuples)
    }

    /// Parse `(1,2)(2,1)` into a word over `A_b`; `-` is the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text == "-" || text.is_empty() {
            return Ok(Word::empty());
        }
        let mut tuples = Vec::new();
        for chunk in text.split(')') {
            let chunk = chunk.trim();
            if chunk.is_empty() {
                continue;
            }
            let inner = chunk
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in {text:?}")))?;
            let t: Vec<Letter> = inner
                .split(',')
                .map(|x| x.trim().parse::<Letter>().map_err(|_| Error::Parse(format!("bad letter {x:?}"))))
                .collect::<Result<_>>()?;
            tuples.push(t);
        }
        self.encode_word(&tuples)
    }

    pub fn format_word(&self, s: &Word) -> Result<String> {
        if s.is_empty() {
            return Ok("-".into());
        }
        let mut out = String::new();
        for &a in &s.0 {
            let t: Vec<String> = self.decode_letter(a)?.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("({})", t.join(",")));
        }
        Ok(out)
    }

    /// The images `S_i(n) = π̄_i(S(n))` of the levels of the Carlson-Simpson
    /// tree generated by `(c, w_0, ..., w_{m-1})` over `A_b`, with checks that
    /// `Φ_b(S(n)) = S_1(n) × ... × S_d(n)` and that each `S_i` satisfies the
    /// strong-subtree conditions up to depth `m`.
    pub fn strong_subtrees(&self, c: &Word, gens: &[VariableWord]) -> Result<StrongSubtrees> {
        let tree = CsTree::new(self.alphabet(), c.clone(), gens.to_vec())?;
        let levels = tree.level_set();
        let mut families: Vec<Vec<Vec<Word>>> = vec![Vec::new(); self.d()];
        let mut product_ok = true;
        for n in 0..=tree.dim() {
            let pts = tree.level(n);
            let coded: Vec<Vec<Word>> = pts.iter().map(|s| self.code(s)).collect::<Result<_>>()?;
            let mut size = 1usize;
            for (i, fam) in families.iter_mut().enumerate() {
                let mut si: Vec<Word> = coded.iter().map(|t| t[i].clone()).collect();
                si.sort();
                si.dedup();
                size *= si.len();
                fam.push(si);
            }
            // Distinct codes, and as many as the product: the image is the full product.
            let mut distinct = coded.clone();
            distinct.sort();
            distinct.dedup();
            product_ok &= distinct.len() == coded.len() && distinct.len() == size;
        }
        let conditions_ok = (0..self.d()).all(|i| is_strong_prefix(self.b[i], &families[i], &levels));
        Ok(StrongSubtrees {
            levels,
            families,
            product_ok,
            conditions_ok,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongSubtrees {
    /// The common level set `l_0 < l_1 < ...`.
    pub levels: Vec<usize>,
    /// `families[i][n] = S_i(n)`.
    pub families: Vec<Vec<Vec<Word>>>,
    pub product_ok: bool,
    pub conditions_ok: bool,
}

/// Strong-subtree conditions for the level sequence of a subtree of `[b]^{<N}`:
/// a single root, `S(n) ⊆ [b]^{l_n}`, every node of `S(n+1)` extends a node
/// of `S(n)`, and each immediate successor in `[b]^{<N}` of a node of `S(n)`
/// lies below exactly one node of `S(n+1)`.
pub fn is_strong_prefix(b: u32, levels: &[Vec<Word>], level_set: &[usize]) -> bool {
    if levels.is_empty() || levels[0].len() != 1 || levels.len() != level_set.len() {
        return false;
    }
    if levels.iter().zip(level_set).any(|(s, &l)| s.iter().any(|w| w.len() != l)) {
        return false;
    }
    for n in 0..levels.len() - 1 {
        let next = &levels[n + 1];
        if next.iter().any(|t| !levels[n].iter().any(|s| s.is_prefix_of(t))) {
            return false;
        }
        for s in &levels[n] {
            for a in 1..=b {
                let mut t = s.clone();
                t.push(a);
                if next.iter().filter(|u| t.is_prefix_of(u)).count() != 1 {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn vw(s: &str) -> VariableWord {
        VariableWord::parse(s).unwrap()
    }

    #[test]
    fn small_restriction() {
        let r = PatternRestriction::new(2, vw("v1"), &[0, 2]).unwrap();
        assert_eq!(r.coded_levels(), vec![0, 1]);
        assert_eq!(r.phi(&Word::empty()).unwrap(), Word::empty());
        assert_eq!(r.phi(&w("1")).unwrap(), w("11"));
        assert_eq!(r.phi(&w("2")).unwrap(), w("21"));
        assert_eq!(r.level(1).unwrap(), vec![w("11"), w("21")]);
        assert!(r.phi(&w("12")).is_err());
        assert!(r.phi_inverse(&w("12")).is_err());
        assert!(PatternRestriction::new(2, vw("v1"), &[0, 1]).is_err());
    }

    #[test]
    fn phi_is_a_bijection() {
        let r = PatternRestriction::new(2, vw("1v"), &[1, 3, 6]).unwrap();
        assert_eq!(r.coded_levels(), vec![1, 2, 4]);
        for (i, &l) in r.coded_levels().iter().enumerate() {
            let mut images: Vec<Word> = all_words(2, l).map(|x| r.phi(&x).unwrap()).collect();
            for (x, y) in all_words(2, l).zip(&images) {
                assert_eq!(r.phi_inverse(y).unwrap(), x);
            }
            images.sort();
            let mut level = r.level(i).unwrap();
            level.sort();
            assert_eq!(images, level);
            assert_eq!(r.level_count(i).unwrap(), level.len());
        }
    }

    #[test]
    fn line_image_has_pattern() {
        let r = PatternRestriction::new(2, vw("v1"), &[0, 2]).unwrap();
        let line = CsTree::new(2, Word::empty(), vec![vw("v")]).unwrap();
        let (c, g) = r.cs_image(&line).unwrap();
        assert_eq!(c, Word::empty());
        assert_eq!(g, vw("v1"));
        let r = PatternRestriction::new(3, vw("2v"), &[1, 3, 5, 8]).unwrap();
        let coded = r.coded_levels();
        for t in CsTree::enumerate_in_universe(3, coded[3], 1) {
            if t.level_set().iter().all(|l| coded.contains(l)) {
                let (c, g) = r.cs_image(&t).unwrap();
                assert_eq!(&g.syms()[..2], vw("2v").syms());
                assert!(r.contains(&c));
            }
        }
    }

    #[test]
    fn product_coding() {
        let h = HomogeneousCoding::new(vec![2, 2]).unwrap();
        let s = h.parse_word("(1,2)").unwrap();
        assert_eq!(h.code(&s).unwrap(), vec![w("1"), w("2")]);
        let s = h.parse_word("(1,2)(2,1)").unwrap();
        assert_eq!(h.format_word(&s).unwrap(), "(1,2)(2,1)");
        assert_eq!(h.decode(&h.code(&s).unwrap()).unwrap(), s);
        let h3 = HomogeneousCoding::new(vec![2, 3]).unwrap();
        let mut seen: Vec<Vec<Word>> = all_words(6, 2).map(|x| h3.code(&x).unwrap()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 36);
    }

    #[test]
    fn strong_subtree_example() {
        let h = HomogeneousCoding::new(vec![2, 2]).unwrap();
        let s = h.strong_subtrees(&Word::empty(), &[vw("v")]).unwrap();
        assert!(s.product_ok && s.conditions_ok);
        assert_eq!(s.levels, vec![0, 1]);
        let g = VariableWord::from_codes(&[0, 3, 0]).unwrap();
        let s = h.strong_subtrees(&h.parse_word("(2,1)").unwrap(), &[g, vw("v")]).unwrap();
        assert!(s.product_ok && s.conditions_ok);
    }

    #[test]
    fn pipeline_finds_patterned_line() {
        let b = WordSet::full_levels(2, &[0, 1, 2, 3, 4, 5, 6]).unwrap();
        let line = pattern_line(&b, &vw("v2"), &[0, 1, 2, 3, 4, 5, 6], &Rational::new(1.into(), 2.into()), 3)
            .unwrap()
            .unwrap();
        assert_eq!(&line.generator.syms()[..2], vw("v2").syms());
        assert!(b.contains(&line.stem));
    }
}
