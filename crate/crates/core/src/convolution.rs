//! Convolution operations `cv_{L,V}` and their iterates along compatible pairs.

use std::collections::BTreeMap;

use crate::bitset::BitSet;
use crate::cs_tree::CsTree;
use crate::error::{Error, Result};
use crate::words::{all_words, level_size, VariableWord, Word};
use crate::wordset::WordSet;

/// Default cap on `|[k]^{<|L|}| · |X|` for materialized preimages.
pub const DEFAULT_PAIR_BUDGET: usize = 1 << 20;

/// `cv_L` or, with a host tree `V`, `cv_{L,V} = I_V ∘ cv_L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvolutionMap {
    k: u32,
    levels: Vec<usize>,
    host: Option<CsTree>,
}

impl ConvolutionMap {
    pub fn new(k: u32, levels: &[usize], host: Option<CsTree>) -> Result<Self> {
        crate::words::check_alphabet(k)?;
        let mut l = levels.to_vec();
        l.sort_unstable();
        l.dedup();
        let Some(&max) = l.last() else {
            return Err(Error::Precondition("level set must be nonempty".into()));
        };
        if let Some(v) = &host {
            if v.k() != k {
                return Err(Error::Precondition(format!("host tree is over {} letters, not {k}", v.k())));
            }
            if max > v.dim() {
                return Err(Error::OutOfRange(format!(
                    "level {max} exceeds host dimension {}",
                    v.dim()
                )));
            }
        }
        Ok(Self { k, levels: l, host })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn host(&self) -> Option<&CsTree> {
        self.host.as_ref()
    }

    /// `|L|`: inputs `t` range over `[k]^{<|L|}`.
    pub fn width(&self) -> usize {
        self.levels.len()
    }

    /// `n_L = max(L) - |L| + 1`.
    pub fn filler_len(&self) -> usize {
        self.levels[self.levels.len() - 1] + 1 - self.levels.len()
    }

    pub fn filler_count(&self) -> Result<usize> {
        level_size(self.k, self.filler_len())
    }

    /// All of `X_L = [k]^{n_L}` in rank order.
    pub fn fillers(&self) -> Vec<Word> {
        all_words(self.k, self.filler_len()).collect()
    }

    /// `L_i = {l ∈ L : l < l_i}`.
    pub fn lower(&self, i: usize) -> Vec<usize> {
        self.levels[..i].to_vec()
    }

    /// `L̄_i = {n < l_i : n ∉ L_i}`.
    pub fn complement(&self, i: usize) -> Vec<usize> {
        let li = self.levels[i];
        (0..li).filter(|n| !self.levels[..i].contains(n)).collect()
    }

    /// `cv_L(t, x)` before applying the host isomorphism.
    pub fn conv_bare(&self, t: &Word, x: &Word) -> Result<Word> {
        self.check_inputs(t, x)?;
        Ok(self.conv_bare_unchecked(t, x))
    }

    fn check_inputs(&self, t: &Word, x: &Word) -> Result<()> {
        if t.len() >= self.width() {
            return Err(Error::OutOfRange(format!(
                "|t| = {} must be below |L| = {}",
                t.len(),
                self.width()
            )));
        }
        if x.len() != self.filler_len() {
            return Err(Error::LengthMismatch {
                expected: self.filler_len(),
                got: x.len(),
            });
        }
        t.check(self.k)?;
        x.check(self.k)
    }

    fn conv_bare_unchecked(&self, t: &Word, x: &Word) -> Word {
        let i = t.len();
        let li = self.levels[i];
        let mut out = Vec::with_capacity(li);
        let (mut ti, mut xi) = (0, 0);
        for pos in 0..li {
            if ti < i && self.levels[ti] == pos {
                out.push(t.0[ti]);
                ti += 1;
            } else {
                out.push(x.0[xi]);
                xi += 1;
            }
        }
        Word(out)
    }

    /// `cv_{L,V}(t, x)`.
    pub fn conv(&self, t: &Word, x: &Word) -> Result<Word> {
        self.check_inputs(t, x)?;
        Ok(self.conv_unchecked(t, x))
    }

    fn conv_unchecked(&self, t: &Word, x: &Word) -> Word {
        let bare = self.conv_bare_unchecked(t, x);
        match &self.host {
            Some(v) => v.forward(&bare.0).expect("levels lie inside the host"),
            None => bare,
        }
    }

    /// `Ω_t = {cv_{L,V}(t, x) : x ∈ X_L}`, sorted.
    pub fn omega(&self, t: &Word) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        for x in self.fillers() {
            out.push(self.conv(t, &x)?);
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// `Y^t_s = {x ∈ X_L : cv_{L,V}(t, x) = s}` in rank order.
    pub fn fiber(&self, t: &Word, s: &Word) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        for x in self.fillers() {
            if self.conv(t, &x)? == *s {
                out.push(x);
            }
        }
        if out.is_empty() {
            return Err(Error::NotAMember(format!("{s} is not in Omega_{t}")));
        }
        Ok(out)
    }

    /// `g_{t,t'}(s) = cv_{L,V}(t', x_s)` with `x_s` the least element of `Y^t_s`.
    pub fn transfer(&self, t: &Word, t2: &Word) -> Result<BTreeMap<Word, Word>> {
        if t.len() != t2.len() {
            return Err(Error::LengthMismatch {
                expected: t.len(),
                got: t2.len(),
            });
        }
        let mut reps: BTreeMap<Word, Word> = BTreeMap::new();
        for x in self.fillers() {
            let s = self.conv(t, &x)?;
            reps.entry(s).or_insert(x);
        }
        reps.into_iter()
            .map(|(s, x)| Ok((s, self.conv(t2, &x)?)))
            .collect()
    }

    /// The tree `S_x` generated by `c = x|J_0` and `w_i = v⌢x|J_{i+1}`, so that
    /// `cv_L(t, x) = I_{S_x}(t)`. Needs `|L| >= 2`.
    pub fn strip_tree(&self, x: &Word) -> Result<CsTree> {
        if self.width() < 2 {
            return Err(Error::Precondition("strip trees need |L| >= 2".into()));
        }
        if x.len() != self.filler_len() {
            return Err(Error::LengthMismatch {
                expected: self.filler_len(),
                got: x.len(),
            });
        }
        x.check(self.k)?;
        let l = &self.levels;
        let stem = Word(x.0[..l[0]].to_vec());
        let mut gens = Vec::with_capacity(l.len() - 1);
        for i in 1..l.len() {
            let block = &x.0[l[i - 1] + 1 - i..l[i] - i];
            let tail = Word(block.to_vec());
            gens.push(VariableWord::left(&[])?.concat_word(&tail));
        }
        CsTree::new(self.k, stem, gens)
    }

    /// `W_x = {cv_{L,V}(w, x) : w ∈ W}` for a tree `W` inside `[k]^{<|L|}`,
    /// built from its generating sequence.
    pub fn fiber_tree(&self, w: &CsTree, x: &Word) -> Result<CsTree> {
        if w.k() != self.k || w.host_k() != self.k {
            return Err(Error::Precondition("tree must be over the map's alphabet".into()));
        }
        if w.level_len(w.dim()) >= self.width() {
            return Err(Error::Precondition(format!(
                "tree reaches length {}, outside [k]^<{}",
                w.level_len(w.dim()),
                self.width()
            )));
        }
        let bare = self.strip_tree(x)?.image(w)?;
        match &self.host {
            Some(v) => v.image(&bare),
            None => Ok(bare),
        }
    }

    /// `R_x = {cv_{L,V}(t, x) : t ∈ [k]^{<|L|}}`, of dimension `|L| - 1`.
    pub fn full_tree(&self, x: &Word) -> Result<CsTree> {
        let s = self.strip_tree(x)?;
        match &self.host {
            Some(v) => v.image(&s),
            None => Ok(s),
        }
    }

    /// `V(l_i)`: the host level, or `[k]^{l_i}` without a host.
    pub fn host_level(&self, i: usize) -> Vec<Word> {
        let li = self.levels[i];
        match &self.host {
            Some(v) => v.level(li).to_vec(),
            None => all_words(self.k, li).collect(),
        }
    }

    /// `B = cv_{L,V}^{-1}(A)` over `[k]^{<|L|} × X_L`.
    pub fn pullback(&self, a: &WordSet, budget: usize) -> Result<Pullback> {
        let mut pb = Pullback::new(self.k, self.width(), vec![self.filler_count()?], budget)?;
        let fillers = self.fillers();
        for i in 0..self.width() {
            for t in all_words(self.k, i) {
                let ti = pb.t_index(&t);
                for (xi, x) in fillers.iter().enumerate() {
                    if a.contains(&self.conv_unchecked(&t, x)) {
                        pb.bits.insert(ti * pb.x_count + xi);
                    }
                }
            }
        }
        Ok(pb)
    }
}

/// A subset of `[k]^{<width} × X` where `X` is a product of finite factors,
/// indexed in mixed radix with the first factor most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pullback {
    k: u32,
    width: usize,
    radices: Vec<usize>,
    x_count: usize,
    t_count: usize,
    bits: BitSet,
}

impl Pullback {
    pub fn new(k: u32, width: usize, radices: Vec<usize>, budget: usize) -> Result<Self> {
        let t_count = (0..width).map(|i| level_size(k, i)).sum::<Result<usize>>()?;
        let x_count = radices
            .iter()
            .try_fold(1usize, |acc, &r| acc.checked_mul(r))
            .ok_or_else(|| Error::Budget("filler product overflows".into()))?;
        let total = t_count
            .checked_mul(x_count)
            .filter(|&n| n <= budget)
            .ok_or_else(|| Error::Budget(format!("{t_count} x {x_count} pairs exceed the budget {budget}")))?;
        Ok(Self {
            k,
            width,
            radices,
            x_count,
            t_count,
            bits: BitSet::new(total),
        })
    }

    pub fn x_count(&self) -> usize {
        self.x_count
    }

    pub fn t_count(&self) -> usize {
        self.t_count
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    pub fn len(&self) -> u64 {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Position of `t` in `[k]^{<width}` ordered by (length, lex).
    pub fn t_index(&self, t: &Word) -> usize {
        let below: usize = (0..t.len()).map(|i| (self.k as usize).pow(i as u32)).sum();
        below + t.rank(self.k)
    }

    pub fn contains(&self, t: &Word, x: usize) -> bool {
        t.len() < self.width && x < self.x_count && self.bits.contains(self.t_index(t) * self.x_count + x)
    }

    pub fn insert(&mut self, t: &Word, x: usize) {
        let i = self.t_index(t) * self.x_count + x;
        self.bits.insert(i);
    }

    /// The section `B_t ⊆ X`.
    pub fn section(&self, t: &Word) -> BitSet {
        let base = self.t_index(t) * self.x_count;
        BitSet::from_indices(self.x_count, (0..self.x_count).filter(|&x| self.bits.contains(base + x)))
    }

    /// `|B ∩ (T × X)|` for a list of distinct `t`.
    pub fn count_over(&self, ts: &[Word]) -> u64 {
        ts.iter().map(|t| self.section(t).count()).sum()
    }

    /// Flat filler index from per-factor indices.
    pub fn x_index(&self, parts: &[usize]) -> usize {
        parts.iter().zip(&self.radices).fold(0, |acc, (&p, &r)| acc * r + p)
    }

    pub fn x_parts(&self, mut x: usize) -> Vec<usize> {
        let mut out = vec![0; self.radices.len()];
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = x % r;
            x /= r;
        }
        out
    }
}

/// `(bl, bv) = ((L_n), (V_n))_{n<=d}` with `L_n ⊆ {0..dim V_n}` and
/// `V_{n+1} ⊆ [k]^{<|L_n|}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatiblePair {
    maps: Vec<ConvolutionMap>,
}

impl CompatiblePair {
    pub fn new(k: u32, levels: Vec<Vec<usize>>, trees: Vec<CsTree>) -> Result<Self> {
        if levels.is_empty() || levels.len() != trees.len() {
            return Err(Error::Precondition("need equally long nonempty level and tree sequences".into()));
        }
        let maps = levels
            .iter()
            .zip(trees)
            .map(|(l, v)| ConvolutionMap::new(k, l, Some(v)))
            .collect::<Result<Vec<_>>>()?;
        for n in 0..maps.len() - 1 {
            let next = maps[n + 1].host().expect("hosted");
            if next.host_k() != k || next.level_len(next.dim()) >= maps[n].width() {
                return Err(Error::Precondition(format!(
                    "V_{} is not inside [k]^<{}",
                    n + 1,
                    maps[n].width()
                )));
            }
        }
        Ok(Self { maps })
    }

    pub fn from_maps(maps: Vec<ConvolutionMap>) -> Result<Self> {
        let k = maps.first().map_or(2, ConvolutionMap::k);
        let levels = maps.iter().map(|m| m.levels().to_vec()).collect();
        let trees = maps
            .iter()
            .map(|m| m.host().cloned().ok_or_else(|| Error::Precondition("compatible pairs need hosts".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, levels, trees)
    }

    pub fn k(&self) -> u32 {
        self.maps[0].k()
    }

    /// `d`, the index of the last component.
    pub fn depth(&self) -> usize {
        self.maps.len() - 1
    }

    pub fn maps(&self) -> &[ConvolutionMap] {
        &self.maps
    }

    pub fn last(&self) -> &ConvolutionMap {
        &self.maps[self.depth()]
    }

    /// `(bl', bv')`: drop the last component.
    pub fn prefix(&self) -> Option<CompatiblePair> {
        (self.depth() >= 1).then(|| CompatiblePair {
            maps: self.maps[..self.depth()].to_vec(),
        })
    }

    pub fn radices(&self) -> Result<Vec<usize>> {
        self.maps.iter().map(ConvolutionMap::filler_count).collect()
    }

    /// `cv_{bl,bv}(s, x_0, ..., x_d)`.
    pub fn iterate(&self, s: &Word, xs: &[Word]) -> Result<Word> {
        if xs.len() != self.maps.len() {
            return Err(Error::ArityMismatch {
                expected: self.maps.len(),
                got: xs.len(),
            });
        }
        let mut cur = s.clone();
        for (m, x) in self.maps.iter().zip(xs).rev() {
            cur = m.conv(&cur, x)?;
        }
        Ok(cur)
    }

    /// `qv_{bl,bv}(t, bx, x) = (cv_{L_d,V_d}(t, x), bx)`.
    pub fn quotient(&self, t: &Word, xs: &[Word]) -> Result<(Word, Vec<Word>)> {
        if self.depth() == 0 {
            return Err(Error::Precondition("the quotient map needs d >= 1".into()));
        }
        if xs.len() != self.maps.len() {
            return Err(Error::ArityMismatch {
                expected: self.maps.len(),
                got: xs.len(),
            });
        }
        let s = self.last().conv(t, &xs[self.depth()])?;
        Ok((s, xs[..self.depth()].to_vec()))
    }

    /// `W_bx`, obtained by pushing `W` through the components from last to first.
    pub fn fiber_tree(&self, w: &CsTree, xs: &[Word]) -> Result<CsTree> {
        let mut cur = w.clone();
        for (m, x) in self.maps.iter().zip(xs).rev() {
            cur = m.fiber_tree(&cur, x)?;
        }
        Ok(cur)
    }

    /// The filler tuple with per-factor ranks `parts`.
    pub fn fillers_at(&self, parts: &[usize]) -> Vec<Word> {
        self.maps
            .iter()
            .zip(parts)
            .map(|(m, &p)| Word::unrank(m.k(), m.filler_len(), p))
            .collect()
    }

    /// `cv_{bl,bv}^{-1}(A) ⊆ [k]^{<|L_d|} × X_bl`.
    pub fn pullback(&self, a: &WordSet, budget: usize) -> Result<Pullback> {
        let mut pb = Pullback::new(self.k(), self.last().width(), self.radices()?, budget)?;
        for xi in 0..pb.x_count {
            let xs = self.fillers_at(&pb.x_parts(xi));
            for i in 0..pb.width {
                for t in all_words(self.k(), i) {
                    if a.contains(&self.iterate(&t, &xs)?) {
                        pb.insert(&t, xi);
                    }
                }
            }
        }
        Ok(pb)
    }

    /// `qv^{-1}(C)` for `C ⊆ [k]^{<|L_{d-1}|} × X_bl'`.
    pub fn quotient_pullback(&self, c: &Pullback, budget: usize) -> Result<Pullback> {
        let radices = self.radices()?;
        let mut pb = Pullback::new(self.k(), self.last().width(), radices, budget)?;
        let d = self.depth();
        for xi in 0..pb.x_count {
            let parts = pb.x_parts(xi);
            let xs = self.fillers_at(&parts);
            let inner = c.x_index(&parts[..d]);
            for i in 0..pb.width {
                for t in all_words(self.k(), i) {
                    let (s, _) = self.quotient(&t, &xs)?;
                    if c.contains(&s, inner) {
                        pb.insert(&t, xi);
                    }
                }
            }
        }
        Ok(pb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn worked_example() {
        let m = ConvolutionMap::new(5, &[1, 3, 7, 9], None).unwrap();
        assert_eq!(m.filler_len(), 6);
        assert_eq!(m.conv(&w("12"), &w("354241")).unwrap(), w("3152424"));
    }

    #[test]
    fn small_examples() {
        let m = ConvolutionMap::new(2, &[2, 4], None).unwrap();
        assert_eq!(m.conv(&Word::empty(), &w("121")).unwrap(), w("12"));
        assert_eq!(m.conv(&w("2"), &w("121")).unwrap(), w("1221"));
        assert!(m.conv(&w("21"), &w("121")).is_err());
        assert!(m.conv(&w("2"), &w("12")).is_err());
        assert_eq!(m.lower(1), vec![2]);
        assert_eq!(m.complement(1), vec![0, 1, 3]);
    }

    #[test]
    fn omega_partitions_level() {
        let m = ConvolutionMap::new(2, &[2, 4], None).unwrap();
        let a = m.omega(&w("1")).unwrap();
        let b = m.omega(&w("2")).unwrap();
        assert_eq!(a.len(), 8);
        assert_eq!(b.len(), 8);
        assert!(a.iter().all(|s| !b.contains(s)));
        let t = m.transfer(&w("1"), &w("1")).unwrap();
        assert!(t.iter().all(|(s, g)| s == g));
    }

    #[test]
    fn strip_tree_by_blocks() {
        let m = ConvolutionMap::new(2, &[2, 4], None).unwrap();
        let x = w("121");
        let s = m.strip_tree(&x).unwrap();
        assert_eq!(s.stem(), &w("12"));
        assert_eq!(s.gens()[0].to_string(), "v1");
        let universe = CsTree::universe(2, 1).unwrap();
        let wx = m.fiber_tree(&universe, &x).unwrap();
        let mut direct: Vec<Word> = [Word::empty(), w("1"), w("2")]
            .iter()
            .map(|t| m.conv(t, &x).unwrap())
            .collect();
        direct.sort();
        assert_eq!(wx.points(), direct);
    }

    #[test]
    fn full_tree_dimension() {
        let v = CsTree::universe(2, 4).unwrap();
        let m = ConvolutionMap::new(2, &[0, 2, 3], Some(v)).unwrap();
        let r = m.full_tree(&w("1")).unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(r.level_set(), vec![0, 2, 3]);
    }

    #[test]
    fn pullback_of_fiber_image() {
        let m = ConvolutionMap::new(2, &[1, 3], None).unwrap();
        let t0 = w("2");
        let a = WordSet::from_words(2, &m.omega(&t0).unwrap()).unwrap();
        let b = m.pullback(&a, DEFAULT_PAIR_BUDGET).unwrap();
        assert_eq!(b.section(&t0).count() as usize, m.filler_count().unwrap());
        assert_eq!(b.len() as usize, m.filler_count().unwrap());
        assert!(m.pullback(&a, 3).is_err());
    }

    #[test]
    fn iterate_depth_one() {
        let v0 = CsTree::universe(2, 3).unwrap();
        let v1 = CsTree::universe(2, 1).unwrap();
        let pair = CompatiblePair::new(2, vec![vec![1, 3], vec![0, 1]], vec![v0.clone(), v1.clone()]).unwrap();
        let m0 = ConvolutionMap::new(2, &[1, 3], Some(v0)).unwrap();
        let m1 = ConvolutionMap::new(2, &[0, 1], Some(v1)).unwrap();
        for x0 in m0.fillers() {
            for x1 in m1.fillers() {
                for s in [Word::empty(), w("1"), w("2")] {
                    let inner = m1.conv(&s, &x1).unwrap();
                    let expect = m0.conv(&inner, &x0).unwrap();
                    assert_eq!(pair.iterate(&s, &[x0.clone(), x1.clone()]).unwrap(), expect);
                }
            }
        }
        let bad = CompatiblePair::new(
            2,
            vec![vec![1, 3], vec![0, 1, 2]],
            vec![CsTree::universe(2, 3).unwrap(), CsTree::universe(2, 2).unwrap()],
        );
        assert!(bad.is_err());
    }
}
