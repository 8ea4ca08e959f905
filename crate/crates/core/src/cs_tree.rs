//! Carlson-Simpson trees, stored by their generating sequence `(c, w_0, ..., w_{m-1})`.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{all_words, check_alphabet, left_variable_words, Letter, Sym, VariableWord, Word};

/// `{c} ∪ {c⌢w_0(a_0)⌢...⌢w_{n-1}(a_{n-1})}` for left variable words `w_i`.
///
/// `k` is the alphabet substituted into the variables. Letters written in the
/// stem and generators may go up to `host_k`, which exceeds `k` only for
/// alphabet restrictions `W↾k'`.
pub struct CsTree {
    k: u32,
    host_k: u32,
    stem: Word,
    gens: Vec<VariableWord>,
    levels: OnceLock<Vec<Vec<Word>>>,
}

/// `W[r]`: a tree when `dim(W) >= 2`, a single word for lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Wedge {
    Word(Word),
    Tree(CsTree),
}

impl CsTree {
    pub fn new(k: u32, stem: Word, gens: Vec<VariableWord>) -> Result<Self> {
        check_alphabet(k)?;
        stem.check(k)?;
        for g in &gens {
            g.check_letters(k)?;
        }
        Self::with_host(k, k, stem, gens)
    }

    fn with_host(k: u32, host_k: u32, stem: Word, gens: Vec<VariableWord>) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::InvalidTree("a tree needs at least one generator".into()));
        }
        if let Some(g) = gens.iter().find(|g| !g.is_left()) {
            return Err(Error::InvalidTree(format!("{g} is not a left variable word")));
        }
        Ok(Self {
            k,
            host_k,
            stem,
            gens,
            levels: OnceLock::new(),
        })
    }

    /// `[k]^{<m+1}`, generated by `(∅, v, ..., v)`.
    pub fn universe(k: u32, m: usize) -> Result<Self> {
        let v = VariableWord::left(&[])?;
        Self::new(k, Word::empty(), vec![v; m])
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn host_k(&self) -> u32 {
        self.host_k
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    pub fn stem(&self) -> &Word {
        &self.stem
    }

    pub fn gens(&self) -> &[VariableWord] {
        &self.gens
    }

    pub fn level_len(&self, n: usize) -> usize {
        self.stem.len() + self.gens[..n].iter().map(VariableWord::len).sum::<usize>()
    }

    /// `{ℓ_0 < ... < ℓ_m}` with `ℓ_n = |c| + Σ_{i<n} |w_i|`.
    pub fn level_set(&self) -> Vec<usize> {
        (0..=self.dim()).map(|n| self.level_len(n)).collect()
    }

    pub fn levels(&self) -> &[Vec<Word>] {
        self.levels.get_or_init(|| {
            let mut out = vec![vec![self.stem.clone()]];
            for g in &self.gens {
                let prev = out.last().unwrap();
                let mut next = Vec::with_capacity(prev.len() * self.k as usize);
                for t in prev {
                    for a in 1..=self.k {
                        next.push(t.concat(&g.at(a)));
                    }
                }
                out.push(next);
            }
            out
        })
    }

    /// `W(n)`, in lexicographic order (which is also the order of `[k]^n` under `I_W`).
    pub fn level(&self, n: usize) -> &[Word] {
        &self.levels()[n]
    }

    pub fn top(&self) -> &[Word] {
        self.level(self.dim())
    }

    pub fn points(&self) -> Vec<Word> {
        self.levels().iter().flatten().cloned().collect()
    }

    /// `I_W(a) = c⌢w_0(a_0)⌢...⌢w_{n-1}(a_{n-1})`.
    pub fn forward(&self, a: &[Letter]) -> Result<Word> {
        if a.len() > self.dim() {
            return Err(Error::OutOfRange(format!(
                "word of length {} beyond dimension {}",
                a.len(),
                self.dim()
            )));
        }
        if let Some(&letter) = a.iter().find(|&&x| x == 0 || x > self.k) {
            return Err(Error::LetterOutOfRange { letter, k: self.k });
        }
        Ok(self.forward_unchecked(a))
    }

    fn forward_unchecked(&self, a: &[Letter]) -> Word {
        let mut out = self.stem.clone();
        for (g, &x) in self.gens.iter().zip(a) {
            out.0.extend(g.at(x).0);
        }
        out
    }

    /// `I_W^{-1}(t)`, or `None` when `t ∉ W`.
    pub fn backward(&self, t: &Word) -> Option<Vec<Letter>> {
        let lens = self.level_set();
        let n = lens.binary_search(&t.len()).ok()?;
        if !self.stem.is_prefix_of(t) {
            return None;
        }
        let mut pos = self.stem.len();
        let mut out = Vec::with_capacity(n);
        for g in &self.gens[..n] {
            let seg = &t.0[pos..pos + g.len()];
            let a = seg[0];
            if a == 0 || a > self.k {
                return None;
            }
            let ok = g.syms().iter().zip(seg).all(|(s, &x)| match *s {
                Sym::Var(_) => x == a,
                Sym::Letter(b) => x == b,
            });
            if !ok {
                return None;
            }
            out.push(a);
            pos += g.len();
        }
        Some(out)
    }

    pub fn contains(&self, t: &Word) -> bool {
        self.backward(t).is_some()
    }

    /// `I_{W,U}(t) = I_U(I_W^{-1}(t))`.
    pub fn transfer(&self, to: &CsTree, t: &Word) -> Result<Word> {
        if self.dim() != to.dim() || self.k != to.k {
            return Err(Error::Precondition("transfer needs equal dimension and alphabet".into()));
        }
        let a = self.backward(t).ok_or_else(|| Error::NotAMember(t.to_string()))?;
        Ok(to.forward_unchecked(&a))
    }

    /// The image under `I_W` of a tree living in `[k]^{<dim(W)+1}`.
    pub fn image(&self, sub: &CsTree) -> Result<CsTree> {
        if sub.k != self.k || sub.host_k > self.k {
            return Err(Error::Precondition("subtree must be over the host alphabet".into()));
        }
        let top = sub.level_len(sub.dim());
        if top > self.dim() {
            return Err(Error::Precondition(format!(
                "subtree reaches level {top}, beyond dimension {}",
                self.dim()
            )));
        }
        let stem = self.forward_unchecked(&sub.stem.0);
        let mut pos = sub.stem.len();
        let mut gens = Vec::with_capacity(sub.dim());
        for g in &sub.gens {
            let mut syms = Vec::new();
            for (j, s) in g.syms().iter().enumerate() {
                let host = &self.gens[pos + j];
                match *s {
                    Sym::Var(_) => syms.extend_from_slice(host.syms()),
                    Sym::Letter(b) => syms.extend(host.at(b).0.into_iter().map(Sym::Letter)),
                }
            }
            gens.push(VariableWord::new(syms)?);
            pos += g.len();
        }
        Self::with_host(self.k, self.host_k, stem, gens)
    }

    /// All `l`-dimensional trees inside `[k]^{<m+1}`, i.e. generating
    /// sequences with `|c| + Σ|w_i| <= m`.
    pub fn enumerate_in_universe(k: u32, m: usize, l: usize) -> Vec<CsTree> {
        fn gens_rec(k: u32, budget: usize, left: usize, acc: &mut Vec<VariableWord>, stem: &Word, out: &mut Vec<CsTree>) {
            if left == 0 {
                out.push(CsTree::with_host(k, k, stem.clone(), acc.clone()).expect("left words"));
                return;
            }
            for len in 1..=budget.saturating_sub(left - 1) {
                for w in left_variable_words(k, len) {
                    acc.push(w);
                    gens_rec(k, budget - len, left - 1, acc, stem, out);
                    acc.pop();
                }
            }
        }
        let mut out = Vec::new();
        if l == 0 || l > m {
            return out;
        }
        for stem_len in 0..=m - l {
            for stem in all_words(k, stem_len) {
                gens_rec(k, m - stem_len, l, &mut Vec::new(), &stem, &mut out);
            }
        }
        out.sort();
        out
    }

    /// `Subtr_l(W)`.
    pub fn subtrees(&self, l: usize) -> Result<Vec<CsTree>> {
        if l == 0 || l > self.dim() {
            return Err(Error::OutOfRange(format!("subtree dimension {l} not in 1..={}", self.dim())));
        }
        let mut out = Self::enumerate_in_universe(self.k, self.dim(), l)
            .iter()
            .map(|s| self.image(s))
            .collect::<Result<Vec<_>>>()?;
        out.sort();
        Ok(out)
    }

    pub fn is_subset_of(&self, other: &CsTree) -> bool {
        self.levels().iter().flatten().all(|t| other.contains(t))
    }

    /// The `i` with `V(dim V) ⊆ W(i)`.
    pub fn depth_of(&self, v: &CsTree) -> Result<usize> {
        if !v.is_subset_of(self) {
            return Err(Error::NotAMember("tree is not a subtree of the host".into()));
        }
        let len = v.level_len(v.dim());
        self.level_set()
            .binary_search(&len)
            .map_err(|_| Error::NotAMember("top level is not a host level".into()))
    }

    /// `Subtr_l^max(W)`: subtrees whose top level lies in the top level of `W`.
    pub fn subtrees_max(&self, l: usize) -> Result<Vec<CsTree>> {
        let top = self.level_len(self.dim());
        Ok(self
            .subtrees(l)?
            .into_iter()
            .filter(|v| v.level_len(v.dim()) == top)
            .collect())
    }

    /// `Subtr⁰_m(V, i)`: `R(0) = V(0)` and `R(m) ⊆ V(i)`.
    pub fn subtr0(&self, m: usize, i: usize) -> Result<Vec<CsTree>> {
        if m == 0 || m > i || i > self.dim() {
            return Err(Error::OutOfRange(format!("need 1 <= m <= i <= dim, got m={m}, i={i}")));
        }
        let target = self.level_len(i);
        Ok(self
            .subtrees(m)?
            .into_iter()
            .filter(|r| r.stem == self.stem && r.level_len(r.dim()) == target)
            .collect())
    }

    /// `W↾k'`: the same generating sequence with substitutions from `[k']`.
    pub fn restrict(&self, k2: u32) -> Result<CsTree> {
        if k2 < 2 || k2 > self.k {
            return Err(Error::OutOfRange(format!("restriction alphabet {k2} not in 2..={}", self.k)));
        }
        Self::with_host(k2, self.host_k, self.stem.clone(), self.gens.clone())
    }

    /// `Ū`: the unique tree over `k+1` whose `k`-restriction is `self`.
    pub fn extend(&self) -> CsTree {
        Self::with_host(self.k + 1, self.host_k.max(self.k + 1), self.stem.clone(), self.gens.clone())
            .expect("generators already validated")
    }

    /// `W[r] = {I_W(s) : |s| >= 1, s(0) = r}`.
    pub fn wedge(&self, r: Letter) -> Result<Wedge> {
        if r == 0 || r > self.k {
            return Err(Error::LetterOutOfRange { letter: r, k: self.k });
        }
        if self.dim() == 1 {
            return Ok(Wedge::Word(self.forward_unchecked(&[r])));
        }
        let stem = self.stem.concat(&self.gens[0].at(r));
        Ok(Wedge::Tree(Self::with_host(self.k, self.host_k, stem, self.gens[1..].to_vec())?))
    }

    /// Successors `t⌢w_i(a_i)⌢...⌢w_j(a_j)` of `t ∈ W(i)`, `i <= j < dim`;
    /// left successors have `a_i = 1`.
    pub fn successors(&self, t: &Word, left_only: bool) -> Result<Vec<Word>> {
        let a = self.backward(t).ok_or_else(|| Error::NotAMember(t.to_string()))?;
        let i = a.len();
        let mut out = Vec::new();
        for j in i..self.dim() {
            for tail in all_words(self.k, j - i + 1) {
                if left_only && tail.0[0] != 1 {
                    continue;
                }
                let mut full = a.clone();
                full.extend_from_slice(&tail.0);
                out.push(self.forward_unchecked(&full));
            }
        }
        out.sort();
        Ok(out)
    }

    /// Recover the generating sequence from a point set.
    pub fn from_points(k: u32, points: &[Word]) -> Result<CsTree> {
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        let mut levels: Vec<Vec<Word>> = Vec::new();
        for p in pts.iter() {
            match levels.last_mut() {
                Some(l) if l[0].len() == p.len() => l.push(p.clone()),
                _ => levels.push(vec![p.clone()]),
            }
        }
        if levels.len() < 2 || levels[0].len() != 1 {
            return Err(Error::InvalidTree("point set has no unique root or no second level".into()));
        }
        let stem = levels[0][0].clone();
        let mut gens: Vec<VariableWord> = Vec::new();
        let mut base = stem.clone();
        for n in 0..levels.len() - 1 {
            let ext: Vec<&Word> = levels[n + 1].iter().filter(|w| base.is_prefix_of(w)).collect();
            if ext.len() != k as usize {
                return Err(Error::InvalidTree(format!("level {} does not branch {k} ways", n + 1)));
            }
            let off = base.len();
            let len = ext[0].len() - off;
            let syms: Vec<Sym> = (0..len)
                .map(|p| {
                    let first = ext[0].0[off + p];
                    if ext.iter().all(|w| w.0[off + p] == first) {
                        Sym::Letter(first)
                    } else {
                        Sym::Var(0)
                    }
                })
                .collect();
            let g = VariableWord::new(syms)?;
            if !g.is_left() {
                return Err(Error::InvalidTree(format!("level {} generator {g} is not left", n + 1)));
            }
            base = base.concat(&g.at(1));
            gens.push(g);
        }
        let tree = CsTree::new(k, stem, gens)?;
        if tree.points() != pts {
            return Err(Error::InvalidTree("point set is not a Carlson-Simpson tree".into()));
        }
        Ok(tree)
    }

    /// Pairs `(U, Ū[k+1])` for `U ∈ Subtr⁰_1(W↾k, j+1)`, where `self` is over `k+1`.
    pub fn extension_wedge_pairs(&self, j: usize) -> Result<Vec<(CsTree, Word)>> {
        if self.k < 3 || self.dim() < 2 {
            return Err(Error::Precondition("needs alphabet k+1 >= 3 and dim >= 2".into()));
        }
        let restricted = self.restrict(self.k - 1)?;
        restricted
            .subtr0(1, j + 1)?
            .into_iter()
            .map(|u| match u.extend().wedge(self.k)? {
                Wedge::Word(w) => Ok((u, w)),
                Wedge::Tree(_) => unreachable!("extension of a line is a line"),
            })
            .collect()
    }

    fn sort_key(&self) -> (usize, Vec<usize>, &Word, &[VariableWord], u32) {
        (self.dim(), self.level_set(), &self.stem, &self.gens, self.k)
    }
}

impl Clone for CsTree {
    fn clone(&self) -> Self {
        Self {
            k: self.k,
            host_k: self.host_k,
            stem: self.stem.clone(),
            gens: self.gens.clone(),
            levels: self.levels.clone(),
        }
    }
}

impl PartialEq for CsTree {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.stem == other.stem && self.gens == other.gens
    }
}

impl Eq for CsTree {}

impl Hash for CsTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.k.hash(state);
        self.stem.hash(state);
        self.gens.hash(state);
    }
}

/// Ordered by dimension, level set, then generating sequence.
impl Ord for CsTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for CsTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Debug for CsTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CsTree(k={}, c={}, ws=[", self.k, self.stem)?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str("])")
    }
}

/// The structured document for a tree: `{"k": 2, "c": "1", "ws": ["v", "v1"]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDoc {
    pub k: u32,
    pub c: String,
    pub ws: Vec<String>,
}

impl TreeDoc {
    pub fn from_tree(t: &CsTree) -> Self {
        Self {
            k: t.k,
            c: t.stem.to_string(),
            ws: t.gens.iter().map(|g| g.to_string()).collect(),
        }
    }

    pub fn to_tree(&self) -> Result<CsTree> {
        let gens = self.ws.iter().map(|g| VariableWord::parse(g)).collect::<Result<Vec<_>>>()?;
        CsTree::new(self.k, Word::parse(&self.c)?, gens)
    }

    pub fn parse(text: &str) -> Result<CsTree> {
        let doc: TreeDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.to_tree()
    }

    pub fn to_json(t: &CsTree) -> String {
        serde_json::to_string(&Self::from_tree(t)).expect("plain strings")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn tree_doc_round_trip() {
        let text = r#"{"k":2,"c":"1","ws":["v","v1"]}"#;
        let t = TreeDoc::parse(text).unwrap();
        assert_eq!(t, tree(2, "1", &["v", "v1"]));
        assert_eq!(TreeDoc::to_json(&t), text);
        let u = CsTree::universe(3, 1).unwrap();
        assert_eq!(TreeDoc::parse(&TreeDoc::to_json(&u)).unwrap(), u);
    }

    fn tree(k: u32, c: &str, ws: &[&str]) -> CsTree {
        CsTree::new(k, w(c), ws.iter().map(|s| VariableWord::parse(s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn levels_of_small_trees() {
        let t = tree(2, "1", &["v", "v2"]);
        let shown: Vec<Vec<String>> = t
            .levels()
            .iter()
            .map(|l| l.iter().map(|x| x.to_string()).collect())
            .collect();
        assert_eq!(shown, vec![vec!["1"], vec!["11", "12"], vec!["1112", "1122", "1212", "1222"]]);
        assert_eq!(t.level_set(), vec![1, 2, 4]);
        let u = tree(2, "-", &["v"]);
        assert_eq!(u.level_set(), vec![0, 1]);
        assert_eq!(u.level(1), &[w("1"), w("2")]);
    }

    #[test]
    fn canonical_iso() {
        let t = tree(2, "1", &["v", "v2"]);
        assert_eq!(t.forward(&[1, 2]).unwrap(), w("1122"));
        assert_eq!(t.forward(&[]).unwrap(), w("1"));
        assert_eq!(t.backward(&w("1122")), Some(vec![1, 2]));
        assert_eq!(t.backward(&w("1121")), None);
        for p in t.points() {
            assert_eq!(t.transfer(&t, &p).unwrap(), p);
        }
    }

    #[test]
    fn subtree_counts() {
        assert_eq!(CsTree::universe(2, 2).unwrap().subtrees(1).unwrap().len(), 6);
        assert_eq!(CsTree::universe(2, 1).unwrap().subtrees(1).unwrap().len(), 1);
        assert_eq!(CsTree::universe(2, 1).unwrap().subtrees_max(1).unwrap().len(), 1);
    }

    #[test]
    fn depth_examples() {
        let u = CsTree::universe(2, 2).unwrap();
        assert_eq!(u.depth_of(&u).unwrap(), 2);
        assert_eq!(u.depth_of(&tree(2, "-", &["v"])).unwrap(), 1);
        assert_eq!(u.depth_of(&tree(2, "-", &["v1"])).unwrap(), 2);
        assert!(u.depth_of(&tree(2, "-", &["v11"])).is_err());
    }

    #[test]
    fn gadgets() {
        let t = tree(3, "1", &["v", "v2"]);
        let r = t.restrict(2).unwrap();
        assert_eq!(r.level(2), &[w("1112"), w("1122"), w("1212"), w("1222")]);
        assert_eq!(
            CsTree::universe(2, 1).unwrap().wedge(1).unwrap(),
            Wedge::Word(w("1"))
        );
        let e = tree(2, "-", &["v"]).extend();
        assert_eq!(e.k(), 3);
        assert_eq!(e.points(), vec![w("-"), w("1"), w("2"), w("3")]);
        assert_eq!(e.restrict(2).unwrap(), tree(2, "-", &["v"]));
        match CsTree::universe(2, 2).unwrap().wedge(2).unwrap() {
            Wedge::Tree(t) => assert_eq!(t.points(), vec![w("2"), w("21"), w("22")]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn successors_of_root() {
        let u = CsTree::universe(2, 2).unwrap();
        let all = u.successors(&Word::empty(), false).unwrap();
        assert_eq!(all.len(), 6);
        let left = u.successors(&Word::empty(), true).unwrap();
        assert_eq!(left, vec![w("1"), w("11"), w("12")]);
    }

    #[test]
    fn reconstruction() {
        let t = tree(2, "1", &["v", "v2"]);
        assert_eq!(CsTree::from_points(2, &t.points()).unwrap(), t);
        assert!(CsTree::from_points(2, &[w("-"), w("1")]).is_err());
    }

    #[test]
    fn image_lands_inside_host() {
        let host = tree(2, "2", &["v1", "vv", "v"]);
        for s in CsTree::enumerate_in_universe(2, 3, 2) {
            let img = host.image(&s).unwrap();
            assert!(img.is_subset_of(&host));
            assert_eq!(img.dim(), 2);
        }
    }
}
