//! Ramsey witnesses for combinatorial subspaces and Carlson-Simpson trees,
//! the focusing construction for trees, and exact minimal numbers by
//! exhausting colorings.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::OracleTable;
use crate::cs_tree::CsTree;
use crate::error::{Error, Result};
use crate::extremal::SearchBudget;
use crate::rational::{int, to_u64};
use crate::words::CombSubspace;

/// A total coloring of a sorted domain with colors in `1..=r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring<T> {
    domain: Vec<T>,
    colors: Vec<u32>,
    r: u32,
}

impl<T: Ord + Clone> Coloring<T> {
    pub fn new(domain: Vec<T>, colors: Vec<u32>, r: u32) -> Result<Self> {
        if domain.len() != colors.len() {
            return Err(Error::LengthMismatch { expected: domain.len(), got: colors.len() });
        }
        if r == 0 {
            return Err(Error::OutOfRange("at least one color is needed".into()));
        }
        if let Some(&c) = colors.iter().find(|&&c| c == 0 || c > r) {
            return Err(Error::OutOfRange(format!("color {c} not in 1..={r}")));
        }
        let mut pairs: Vec<(T, u32)> = domain.into_iter().zip(colors).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Precondition("coloring domain has repeated objects".into()));
        }
        let (domain, colors) = pairs.into_iter().unzip();
        Ok(Self { domain, colors, r })
    }

    pub fn from_fn(domain: Vec<T>, r: u32, f: impl Fn(&T) -> u32) -> Result<Self> {
        let colors = domain.iter().map(&f).collect();
        Self::new(domain, colors, r)
    }

    pub fn domain(&self) -> &[T] {
        &self.domain
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn color_of(&self, x: &T) -> Option<u32> {
        self.domain.binary_search(x).ok().map(|i| self.colors[i])
    }

    fn common_color(&self, family: &[T]) -> Result<Option<u32>> {
        let mut seen = None;
        for x in family {
            let c = self
                .color_of(x)
                .ok_or_else(|| Error::NotAMember("subobject outside the coloring domain".into()))?;
            match seen {
                None => seen = Some(c),
                Some(s) if s != c => return Ok(None),
                _ => {}
            }
        }
        Ok(seen)
    }
}

fn check_dims(n: usize, d: usize, m: usize) -> Result<()> {
    if !(n >= d && d >= m && m >= 1) {
        return Err(Error::Precondition(format!("need n >= d >= m >= 1, got n={n}, d={d}, m={m}")));
    }
    Ok(())
}

/// The least `W ∈ Subs_d(V)` with `Subs_m(W)` monochromatic.
pub fn gr_search(
    v: &CombSubspace,
    coloring: &Coloring<CombSubspace>,
    m: u32,
    d: u32,
) -> Result<Option<CombSubspace>> {
    check_dims(v.dim() as usize, d as usize, m as usize)?;
    let mut candidates = v.subspaces(d)?;
    candidates.sort();
    for w in candidates {
        let family = w.subspaces(m)?;
        if coloring.common_color(&family)?.is_some() {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// The least `U ∈ Subtr_d(W)` with `Subtr_m(U)` monochromatic.
pub fn cs_search(w: &CsTree, coloring: &Coloring<CsTree>, m: usize, d: usize) -> Result<Option<CsTree>> {
    check_dims(w.dim(), d, m)?;
    for u in w.subtrees(d)? {
        if coloring.common_color(&u.subtrees(m)?)?.is_some() {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

/// `U` minus its top level.
fn drop_top(u: &CsTree) -> Result<CsTree> {
    CsTree::new(u.k(), u.stem().clone(), u.gens()[..u.dim() - 1].to_vec())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Focus {
    /// `U ∈ Subtr^max_{m+q}(W)`; `colors[j]` is the color of every
    /// `S ∈ Subtr_m(U)` of depth `j`, where such subtrees exist.
    Built {
        ns: Vec<u64>,
        #[serde(skip)]
        tower: Vec<CsTree>,
        #[serde(skip)]
        u: CsTree,
        colors: Vec<Option<u32>>,
    },
    Failed {
        ns: Vec<u64>,
        reason: String,
    },
}

/// The tower `U_0 ⊇ U_1 ⊇ ... ⊇ U_q` with `n_q = m`,
/// `n_{i-1} = GR(k, n_i + 1, m, r)` from the table, `U_0` the least tree
/// in `Subtr^max_{n_0}(W)`, and `U_{i+1}` the least tree in
/// `Subtr^max_{n_{i+1}+1}` of `U_i` (of `U_0` when `i = 0`, otherwise
/// with its top level removed) whose maximal `m`-subtrees share a color.
/// The result is generated by all of `U_q` followed by the last
/// generators of `U_{q-1}, ..., U_1`.
pub fn focus_construct(w: &CsTree, coloring: &Coloring<CsTree>, m: usize, q: usize, table: &OracleTable) -> Result<Focus> {
    if m == 0 || q == 0 {
        return Err(Error::OutOfRange("focusing needs m >= 1 and q >= 1".into()));
    }
    let k = w.k();
    let r = coloring.r();
    let mut ns = vec![m as u64];
    for _ in 0..q {
        let next = *ns.last().expect("nonempty") + 1;
        let args = [int(k as u64), int(next), int(m as u64), int(r as u64)];
        match table.get("GR", &args).and_then(to_u64) {
            Some(v) => ns.push(v),
            None => {
                ns.reverse();
                return Ok(Focus::Failed {
                    ns,
                    reason: format!("no oracle value for GR({k}, {next}, {m}, {r})"),
                });
            }
        }
    }
    ns.reverse();
    let fail = |ns: &[u64], reason: String| Ok(Focus::Failed { ns: ns.to_vec(), reason });
    if (w.dim() as u64) < ns[0] {
        return fail(&ns, format!("host dimension {} is below n_0 = {}", w.dim(), ns[0]));
    }
    let u0 = w
        .subtrees_max(ns[0] as usize)?
        .into_iter()
        .next()
        .expect("a host of enough dimension has maximal subtrees");
    let mut tower = vec![u0.clone()];
    let mut parent = u0;
    for i in 0..q {
        let dim = ns[i + 1] as usize + 1;
        let mut found = None;
        for u in parent.subtrees_max(dim)? {
            if coloring.common_color(&u.subtrees_max(m)?)?.is_some() {
                found = Some(u);
                break;
            }
        }
        let Some(u) = found else {
            return fail(&ns, format!("no tree of dimension {dim} with monochromatic maximal {m}-subtrees at step {}", i + 1));
        };
        parent = drop_top(&u)?;
        tower.push(u);
    }
    let last = tower.last().expect("q >= 1");
    let mut gens = last.gens().to_vec();
    for u in tower[1..q].iter().rev() {
        gens.push(u.gens().last().expect("positive dimension").clone());
    }
    let u = CsTree::new(k, last.stem().clone(), gens)?;
    if u.dim() != m + q || !u.is_subset_of(w) || u.level_len(u.dim()) != w.level_len(w.dim()) {
        return Err(Error::InvalidTree("focused tree is not a maximal subtree of the host".into()));
    }
    let mut colors: Vec<Option<u32>> = vec![None; u.dim() + 1];
    for s in u.subtrees(m)? {
        let depth = u.depth_of(&s)?;
        let c = coloring
            .color_of(&s)
            .ok_or_else(|| Error::NotAMember("subtree outside the coloring domain".into()))?;
        match colors[depth] {
            None => colors[depth] = Some(c),
            Some(prev) if prev != c => {
                return Err(Error::InvalidTree(format!("subtrees of depth {depth} carry colors {prev} and {c}")));
            }
            _ => {}
        }
    }
    Ok(Focus::Built { ns, tower, u, colors })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Statement {
    #[serde(rename = "GR")]
    Gr,
    #[serde(rename = "CS")]
    Cs,
}

/// The coloring domain and the witness families at host size `n`, each
/// family given by indices into the domain.
#[derive(Clone, Debug)]
pub struct Hypergraph {
    pub domain: usize,
    pub edges: Vec<Vec<usize>>,
}

pub fn hypergraph(statement: Statement, k: u32, d: usize, m: usize, n: usize) -> Result<Hypergraph> {
    check_dims(n, d, m)?;
    fn index<T: Ord>(domain: &[T], fams: Vec<Vec<T>>) -> Result<Vec<Vec<usize>>> {
        fams.into_iter()
            .map(|f| {
                let mut idx = f
                    .iter()
                    .map(|x| domain.binary_search(x).map_err(|_| Error::NotAMember("subobject".into())))
                    .collect::<Result<Vec<_>>>()?;
                idx.sort_unstable();
                idx.dedup();
                Ok(idx)
            })
            .collect()
    }
    let (domain, edges) = match statement {
        Statement::Gr => {
            let v = CombSubspace::cube(k, n)?;
            let mut domain = v.subspaces(m as u32)?;
            domain.sort();
            let fams = v
                .subspaces(d as u32)?
                .iter()
                .map(|w| w.subspaces(m as u32))
                .collect::<Result<Vec<_>>>()?;
            (domain.len(), index(&domain, fams)?)
        }
        Statement::Cs => {
            let w = CsTree::universe(k, n)?;
            let domain = w.subtrees(m)?;
            let fams = w.subtrees(d)?.iter().map(|u| u.subtrees(m)).collect::<Result<Vec<_>>>()?;
            (domain.len(), index(&domain, fams)?)
        }
    };
    Ok(Hypergraph { domain, edges })
}

struct Shared {
    nodes: AtomicU64,
    budget: SearchBudget,
    start: Instant,
}

impl Shared {
    fn tick(&self) -> Result<()> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.budget.max_nodes {
            return Err(Error::Budget(format!("more than {} search nodes", self.budget.max_nodes)));
        }
        if n % 4096 == 0 && self.start.elapsed().as_millis() as u64 > self.budget.max_millis {
            return Err(Error::Budget(format!("more than {} ms", self.budget.max_millis)));
        }
        Ok(())
    }
}

fn is_proper(colors: &[u32], edges: &[Vec<usize>]) -> bool {
    edges.iter().all(|e| e.iter().any(|&i| colors[i] != colors[e[0]]))
}

/// An `r`-coloring (colors `0..r`) without monochromatic family, colors
/// normalized to first-occurrence order, or `None` if every coloring has
/// one. Families are checked as soon as their last element is colored.
pub fn find_bad_coloring(h: &Hypergraph, r: u32, budget: SearchBudget) -> Result<Option<Vec<u32>>> {
    if h.edges.iter().any(|e| e.len() == 1) || r == 0 && h.domain > 0 {
        return Ok(None);
    }
    let mut by_last: Vec<Vec<&[usize]>> = vec![Vec::new(); h.domain];
    for e in &h.edges {
        if let Some(&last) = e.last() {
            by_last[last].push(e);
        }
    }
    let shared = Shared {
        nodes: AtomicU64::new(0),
        budget,
        start: Instant::now(),
    };
    fn go(
        sh: &Shared,
        by_last: &[Vec<&[usize]>],
        r: u32,
        colors: &mut Vec<u32>,
        used: u32,
    ) -> Result<bool> {
        sh.tick()?;
        let t = colors.len();
        if t == by_last.len() {
            return Ok(true);
        }
        for c in 0..(used + 1).min(r) {
            colors.push(c);
            let ok = by_last[t].iter().all(|e| e.iter().any(|&i| colors[i] != c));
            if ok && go(sh, by_last, r, colors, used.max(c + 1))? {
                return Ok(true);
            }
            colors.pop();
        }
        Ok(false)
    }
    // Split on canonical prefixes of a few elements and search them in
    // parallel; the first prefix in order with a bad coloring wins.
    let split = h.domain.min(6);
    let mut prefixes: Vec<(Vec<u32>, u32)> = vec![(Vec::new(), 0)];
    for t in 0..split {
        let mut next = Vec::new();
        for (p, used) in prefixes {
            for c in 0..(used + 1).min(r) {
                let mut q = p.clone();
                q.push(c);
                if by_last[t].iter().all(|e| e.iter().any(|&i| q[i] != c)) {
                    next.push((q, used.max(c + 1)));
                }
            }
        }
        prefixes = next;
    }
    let results: Vec<Result<Option<Vec<u32>>>> = prefixes
        .into_par_iter()
        .map(|(mut p, used)| {
            if go(&shared, &by_last, r, &mut p, used)? {
                Ok(Some(p))
            } else {
                Ok(None)
            }
        })
        .collect();
    for res in results {
        if let Some(c) = res? {
            if !is_proper(&c, &h.edges) {
                return Err(Error::InvalidTree("coloring failed re-verification".into()));
            }
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// The same decision by scanning all `r^|domain|` colorings.
pub fn find_bad_coloring_plain(h: &Hypergraph, r: u32) -> Result<Option<Vec<u32>>> {
    let total = (r as u64)
        .checked_pow(h.domain as u32)
        .filter(|&t| t <= 1 << 24)
        .ok_or_else(|| Error::Budget(format!("{r}^{} colorings", h.domain)))?;
    let mut colors = vec![0u32; h.domain];
    for mut code in 0..total {
        for c in colors.iter_mut() {
            *c = (code % r as u64) as u32;
            code /= r as u64;
        }
        if is_proper(&colors, &h.edges) {
            return Ok(Some(colors));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HostDecision {
    pub n: usize,
    pub domain: usize,
    pub families: usize,
    pub holds: bool,
    /// A coloring (colors `1..=r`) with no monochromatic witness.
    pub counterexample: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalReport {
    pub statement: Statement,
    pub k: u32,
    pub d: usize,
    pub m: usize,
    pub r: u32,
    pub n_max: usize,
    /// The least `n ≤ n_max` where every coloring has a witness.
    pub value: Option<usize>,
    pub hosts: Vec<HostDecision>,
    pub monotone: bool,
}

pub fn minimal_number(
    statement: Statement,
    k: u32,
    d: usize,
    m: usize,
    r: u32,
    n_max: usize,
    budget: SearchBudget,
) -> Result<MinimalReport> {
    check_dims(d.max(n_max), d, m)?;
    if r == 0 {
        return Err(Error::OutOfRange("at least one color is needed".into()));
    }
    let mut hosts = Vec::new();
    for n in d..=n_max {
        let h = hypergraph(statement, k, d, m, n)?;
        let bad = find_bad_coloring(&h, r, budget)?;
        hosts.push(HostDecision {
            n,
            domain: h.domain,
            families: h.edges.len(),
            holds: bad.is_none(),
            counterexample: bad.map(|c| c.into_iter().map(|x| x + 1).collect()),
        });
    }
    let value = hosts.iter().find(|h| h.holds).map(|h| h.n);
    let monotone = hosts.windows(2).all(|w| !w[0].holds || w[1].holds);
    Ok(MinimalReport { statement, k, d, m, r, n_max, value, hosts, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::VariableWord;

    #[test]
    fn gr_examples() {
        let v = CombSubspace::cube(2, 2).unwrap();
        let lines = v.subspaces(1).unwrap();
        let constant = Coloring::from_fn(lines.clone(), 2, |_| 1).unwrap();
        let least = v.subspaces(1).unwrap().into_iter().min().unwrap();
        assert_eq!(gr_search(&v, &constant, 1, 1).unwrap(), Some(least.clone()));
        let by_11 = Coloring::from_fn(lines, 2, |l| if l.points().iter().any(|p| p.0 == [1, 1]) { 1 } else { 2 }).unwrap();
        assert_eq!(gr_search(&v, &by_11, 1, 1).unwrap(), Some(least));
        assert_eq!(gr_search(&v, &by_11, 1, 2).unwrap(), None);
    }

    #[test]
    fn cs_examples() {
        let w = CsTree::universe(2, 2).unwrap();
        let lines = w.subtrees(1).unwrap();
        assert_eq!(lines.len(), 6);
        let constant = Coloring::from_fn(lines.clone(), 2, |_| 1).unwrap();
        assert_eq!(cs_search(&w, &constant, 1, 2).unwrap(), Some(w.clone()));
        let by_level = Coloring::from_fn(lines.clone(), 2, |l| if l.level_set().contains(&2) { 1 } else { 2 }).unwrap();
        assert_eq!(cs_search(&w, &by_level, 1, 2).unwrap(), None);
        assert_eq!(cs_search(&w, &by_level, 1, 1).unwrap(), Some(lines[0].clone()));
        assert_eq!(lines[0].gens(), &[VariableWord::parse("v").unwrap()]);
    }

    #[test]
    fn minimal_small() {
        let b = SearchBudget::default();
        let r = minimal_number(Statement::Cs, 2, 1, 1, 2, 2, b).unwrap();
        assert_eq!(r.value, Some(1));
        let r = minimal_number(Statement::Gr, 2, 1, 1, 2, 3, b).unwrap();
        assert_eq!(r.value, Some(1));
        for (st, d, n) in [(Statement::Cs, 2, 2), (Statement::Gr, 2, 2), (Statement::Cs, 1, 2)] {
            let h = hypergraph(st, 2, d, 1, n).unwrap();
            for r in 1..=3 {
                let fast = find_bad_coloring(&h, r, b).unwrap();
                let plain = find_bad_coloring_plain(&h, r).unwrap();
                assert_eq!(fast.is_some(), plain.is_some());
            }
        }
    }

    #[test]
    fn focusing_with_tiny_oracle() {
        // GR(2, 2, 1, 1) = 2: one color makes any plane of lines work.
        let mut t = OracleTable::new();
        t.insert("GR", vec![int(2), int(2), int(1), int(1)], int(2)).unwrap();
        let w = CsTree::universe(2, 2).unwrap();
        let col = Coloring::from_fn(w.subtrees(1).unwrap(), 1, |_| 1).unwrap();
        match focus_construct(&w, &col, 1, 1, &t).unwrap() {
            Focus::Built { u, ns, .. } => {
                assert_eq!(ns, vec![2, 1]);
                assert_eq!(u, w);
            }
            other => panic!("{other:?}"),
        }
        let empty = OracleTable::new();
        assert!(matches!(focus_construct(&w, &col, 1, 1, &empty).unwrap(), Focus::Failed { .. }));
    }
}
