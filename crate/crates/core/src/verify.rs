//! Exhaustive and randomized identity suites. Every check is exact; a suite
//! passes when it ran at least one check and none failed.

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::bounds::{self, build, eval_tree, Ctx, Numeric, OracleTable, Params, Symbolic, Val, CATALOG};
use crate::convolution::{CompatiblePair, ConvolutionMap, Pullback, DEFAULT_PAIR_BUDGET};
use crate::cs_tree::CsTree;
use crate::error::Result;
use crate::patterns::{HomogeneousCoding, PatternRestriction};
use crate::prob::{fw_measure, markov_select, pair_intersect, partition_select, FiniteProbSpace, FwShape};
use crate::rational::{abs_diff, frac, int, ratio, Rational};
use crate::regularity::{is_regular, is_sparse, regularize, LevelView, RegMode};
use crate::words::{all_words, is_equivalent, left_variable_words, level_size, variable_words, Sym, VariableWord, Word};
use crate::wordset::WordSet;

const MAX_EXAMPLES: usize = 20;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: u64,
    pub failures: u64,
    /// The first few failed checks.
    pub examples: Vec<String>,
    /// Per-identity check counts, in first-seen order.
    pub identities: Vec<(String, u64)>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            ..Self::default()
        }
    }

    pub fn check(&mut self, identity: &str, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        match self.identities.iter_mut().find(|(n, _)| n == identity) {
            Some(slot) => slot.1 += 1,
            None => self.identities.push((identity.to_string(), 1)),
        }
        if !ok {
            self.failures += 1;
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(format!("{identity}: {}", what()));
            }
        }
    }

    /// Record an error from the code under test as a failed check.
    pub fn check_ok<T>(&mut self, identity: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(identity, false, || e.to_string());
                None
            }
        }
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.checks += other.checks;
        self.failures += other.failures;
        for e in other.examples {
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(e);
            }
        }
        for (n, c) in other.identities {
            match self.identities.iter_mut().find(|(m, _)| *m == n) {
                Some(slot) => slot.1 += c,
                None => self.identities.push((n, c)),
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.checks > 0 && self.failures == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "{} {}: {} checks, {} failures",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite,
            self.checks,
            self.failures
        )
    }
}

/// Parameters of the convolution grids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub ks: Vec<u32>,
    /// Largest `|L|`.
    pub max_width: usize,
    /// Largest host dimension.
    pub max_dim: usize,
    /// Random sets per configuration, besides the empty and the full set.
    pub samples: usize,
    pub seed: u64,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            ks: vec![2, 3],
            max_width: 3,
            max_dim: 4,
            samples: 50,
            seed: 0,
        }
    }
}

fn rng_for(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// The full tree of dimension `dim`, and a tree with a nonempty stem and
/// longer generators.
pub fn sample_hosts(k: u32, dim: usize) -> Result<Vec<CsTree>> {
    let mut out = vec![CsTree::universe(k, dim)?];
    let gens = (0..dim)
        .map(|i| {
            if i % 2 == 0 {
                VariableWord::left(&[])
            } else {
                VariableWord::left(&[Sym::Letter(1)])
            }
        })
        .collect::<Result<Vec<_>>>()?;
    out.push(CsTree::new(k, Word(vec![k]), gens)?);
    Ok(out)
}

/// Nonempty subsets of `{0..=dim}` with at most `max` elements, each sorted.
pub fn level_sets(dim: usize, min: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..1 << (dim + 1) {
        let set: Vec<usize> = (0..=dim).filter(|&i| mask >> i & 1 == 1).collect();
        if set.len() >= min && set.len() <= max {
            out.push(set);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn random_subset(rng: &mut ChaCha8Rng, k: u32, points: &[Word], p: f64) -> WordSet {
    let mut a = WordSet::new(k).expect("alphabet checked");
    for w in points {
        if rng.gen_bool(p) {
            a.insert(w).expect("letters in range");
        }
    }
    a
}

/// The empty set, the full set, and `samples` random subsets of `points`.
fn test_sets(rng: &mut ChaCha8Rng, k: u32, points: &[Word], samples: usize) -> Vec<WordSet> {
    let mut out = vec![
        WordSet::new(k).expect("alphabet checked"),
        WordSet::from_words(k, points).expect("letters in range"),
    ];
    for _ in 0..samples {
        let p = [0.5, 0.25, 0.75][rng.gen_range(0..3)];
        out.push(random_subset(rng, k, points, p));
    }
    out
}

fn sorted(mut v: Vec<Word>) -> Vec<Word> {
    v.sort();
    v
}

fn mean(values: &[Rational]) -> Rational {
    values.iter().sum::<Rational>() / int(values.len() as u64)
}

/// All Carlson-Simpson subtrees of `[k]^{<width}` of positive dimension.
fn small_trees(k: u32, width: usize) -> Vec<CsTree> {
    (1..width).flat_map(|d| CsTree::enumerate_in_universe(k, width - 1, d)).collect()
}

/// Partitions of the host levels by the sets `Ω_t`, fiber partitions of
/// `X_L`, transfers, pullback densities, fiber trees and fiber averages, on
/// every `(k, V, L)` of the grid.
pub fn convolution_suite(grid: &Grid) -> SuiteReport {
    let mut configs = Vec::new();
    for &k in &grid.ks {
        for dim in 1..=grid.max_dim {
            for v in sample_hosts(k, dim).expect("valid hosts") {
                for l in level_sets(dim, 1, grid.max_width) {
                    configs.push((k, v.clone(), l));
                }
            }
        }
    }
    let parts: Vec<SuiteReport> = configs
        .par_iter()
        .enumerate()
        .map(|(idx, (k, v, l))| {
            let mut r = SuiteReport::new("convolution");
            let mut rng = rng_for(grid.seed, idx as u64);
            convolution_config(&mut r, &mut rng, *k, v, l, grid.samples);
            r
        })
        .collect();
    let mut out = SuiteReport::new("convolution");
    for p in parts {
        out.merge(p);
    }
    out
}

fn convolution_config(r: &mut SuiteReport, rng: &mut ChaCha8Rng, k: u32, v: &CsTree, l: &[usize], samples: usize) {
    let ctx = || format!("k={k} V={v:?} L={l:?}");
    let Some(map) = r.check_ok("construct", ConvolutionMap::new(k, l, Some(v.clone()))) else {
        return;
    };
    let xs = map.fillers();
    let width = map.width();

    // Each level V(l_i) is split by the Ω_t, t ∈ [k]^i, into equal disjoint parts.
    let mut omegas: Vec<Vec<(Word, Vec<Word>)>> = Vec::new();
    for i in 0..width {
        let level = sorted(map.host_level(i));
        let mut parts = Vec::new();
        for t in all_words(k, i) {
            let Some(o) = r.check_ok("omega-partition", map.omega(&t)) else { return };
            parts.push((t, o));
        }
        let size = parts[0].1.len();
        let mut union: Vec<Word> = parts.iter().flat_map(|(_, o)| o.iter().cloned()).collect();
        let total = union.len();
        union.sort();
        union.dedup();
        r.check(
            "omega-partition",
            parts.iter().all(|(_, o)| o.len() == size) && union.len() == total && union == level,
            || format!("{} level {i}", ctx()),
        );
        omegas.push(parts);
    }

    // Fibers Y^t_s equipartition X_L.
    for parts in &omegas {
        for (t, o) in parts {
            let mut seen = BitSet::new(xs.len());
            let mut ok = true;
            for s in o {
                let Some(y) = r.check_ok("fiber-partition", map.fiber(t, s)) else { return };
                ok &= y.len() * o.len() == xs.len();
                for x in &y {
                    ok &= seen.insert(x.rank(k));
                }
            }
            r.check("fiber-partition", ok && seen.count() as usize == xs.len(), || {
                format!("{} t={t}", ctx())
            });
        }
    }

    // Transfers g_{t,t'}.
    for parts in &omegas {
        for (t, o) in parts {
            for (t2, o2) in parts {
                let Some(g) = r.check_ok("transfer", map.transfer(t, t2)) else { return };
                let mut ok = g.len() == o.len();
                let mut image: Vec<Word> = Vec::with_capacity(o.len());
                let mut prev: Option<&Word> = None;
                for s in o {
                    let Some(gs) = g.get(s) else {
                        ok = false;
                        break;
                    };
                    ok &= map.fiber(t, s).ok() == map.fiber(t2, gs).ok();
                    ok &= prev.is_none_or(|p| *p < *gs);
                    if t == t2 {
                        ok &= gs == s;
                    }
                    for a in 1..=k {
                        for b in 1..=k {
                            if a != b && is_equivalent(t, t2, a, b).unwrap_or(false) {
                                ok &= is_equivalent(s, gs, a, b).unwrap_or(false);
                            }
                        }
                    }
                    image.push(gs.clone());
                    prev = Some(gs);
                }
                ok &= sorted(image) == *o2;
                r.check("transfer", ok, || format!("{} t={t} t'={t2}", ctx()));
            }
        }
    }

    // Fiber trees W_x and the full trees R_x.
    let trees = small_trees(k, width);
    let mut fibers: Vec<(usize, usize, CsTree)> = Vec::new();
    for (wi, w) in trees.iter().enumerate() {
        for (xi, x) in xs.iter().enumerate() {
            let Some(wx) = r.check_ok("fiber-tree", map.fiber_tree(w, x)) else { return };
            let mut ok = wx.dim() == w.dim();
            for i in 0..=w.dim() {
                let direct: Vec<Word> = w.level(i).iter().map(|t| map.conv(t, x).expect("in range")).collect();
                ok &= sorted(direct) == sorted(wx.level(i).to_vec());
            }
            r.check("fiber-tree", ok, || format!("{} W={w:?} x={x}", ctx()));
            fibers.push((wi, xi, wx));
        }
    }
    let full: Vec<CsTree> = if width >= 2 {
        xs.iter().filter_map(|x| r.check_ok("fiber-tree", map.full_tree(x))).collect()
    } else {
        Vec::new()
    };
    for t in &full {
        r.check("fiber-tree", t.dim() == width - 1, || format!("{} full tree {t:?}", ctx()));
    }

    let points: Vec<Word> = v.points();
    for a in test_sets(rng, k, &points, samples) {
        let Some(pb) = r.check_ok("pullback-density", map.pullback(&a, DEFAULT_PAIR_BUDGET)) else { return };
        let xn = xs.len() as u64;
        for (i, parts) in omegas.iter().enumerate() {
            let mut ts = Vec::new();
            for (t, o) in parts {
                let lhs = a.density_in(o);
                let rhs = frac(pb.section(t).count(), xn);
                r.check("pullback-density", lhs == rhs, || format!("{} t={t}: {lhs} vs {rhs}", ctx()));
                ts.push(t.clone());
            }
            let lhs = a.density_in(&map.host_level(i));
            let rhs = frac(pb.count_over(&ts), ts.len() as u64 * xn);
            r.check("pullback-density", lhs == rhs, || format!("{} level {i}: {lhs} vs {rhs}", ctx()));
            if width >= 2 {
                let avg = mean(&full.iter().map(|t| a.density_in(t.level(i))).collect::<Vec<_>>());
                r.check("fiber-average", lhs == avg, || format!("{} full-tree level {i}: {lhs} vs {avg}", ctx()));
            }
        }
        for (wi, w) in trees.iter().enumerate() {
            for i in 0..=w.dim() {
                let mut avg = Vec::with_capacity(xs.len());
                for (_, xi, wx) in fibers.iter().filter(|(j, _, _)| *j == wi) {
                    let lhs = a.density_in(wx.level(i));
                    let hits = w.level(i).iter().filter(|t| pb.contains(t, *xi)).count();
                    let rhs = frac(hits as u64, w.level(i).len() as u64);
                    r.check("fiber-density", lhs == rhs, || format!("{} W={w:?} x#{xi} level {i}", ctx()));
                    avg.push(lhs);
                }
                let mut image: Vec<Word> = w
                    .level(i)
                    .iter()
                    .flat_map(|t| xs.iter().map(|x| map.conv(t, x).expect("in range")))
                    .collect();
                image.sort();
                image.dedup();
                let lhs = a.density_in(&image);
                let rhs = mean(&avg);
                r.check("fiber-average", lhs == rhs, || format!("{} W={w:?} level {i}: {lhs} vs {rhs}", ctx()));
            }
        }
    }
}

/// The averaging identity between Furstenberg-Weiss measures of the trees
/// `R_x` and the generalized measure `d_L`, for hostless maps.
pub fn fw_average_suite(grid: &Grid) -> SuiteReport {
    let mut configs = Vec::new();
    for &k in &grid.ks {
        for l in level_sets(grid.max_dim, 2, grid.max_width) {
            configs.push((k, l));
        }
    }
    let parts: Vec<SuiteReport> = configs
        .par_iter()
        .enumerate()
        .map(|(idx, (k, l))| {
            let mut r = SuiteReport::new("fw-average");
            let mut rng = rng_for(grid.seed, 1 << 20 | idx as u64);
            let Some(map) = r.check_ok("fw-average", ConvolutionMap::new(*k, l, None)) else { return r };
            let trees: Vec<CsTree> = map.fillers().iter().filter_map(|x| r.check_ok("fw-average", map.full_tree(x))).collect();
            let top = *l.last().expect("nonempty");
            let points: Vec<Word> = (0..=top).flat_map(|n| all_words(*k, n)).collect();
            for a in test_sets(&mut rng, *k, &points, grid.samples) {
                let vals: Vec<Rational> =
                    trees.iter().filter_map(|t| r.check_ok("fw-average", fw_measure(&a, FwShape::Tree(t)))).collect();
                let lhs = mean(&vals);
                let Some(rhs) = r.check_ok("fw-average", fw_measure(&a, FwShape::Levels(l))) else { continue };
                r.check("fw-average", lhs == rhs, || format!("k={k} L={l:?}: {lhs} vs {rhs}"));
            }
            r
        })
        .collect();
    let mut out = SuiteReport::new("fw-average");
    for p in parts {
        out.merge(p);
    }
    out
}

/// Compatible pairs of depth 1 and 2 built from the grid, skipping those
/// whose pullbacks exceed the pair budget.
pub fn compatible_pairs(grid: &Grid) -> Vec<CompatiblePair> {
    let mut out = Vec::new();
    let fits = |p: &CompatiblePair| -> bool {
        let Ok(radices) = p.radices() else { return false };
        let ts: usize = (0..p.last().width()).map(|i| level_size(p.k(), i).unwrap_or(usize::MAX)).sum();
        let xs = radices.iter().try_fold(1usize, |a, &b| a.checked_mul(b));
        xs.and_then(|x| x.checked_mul(ts)).is_some_and(|n| n <= DEFAULT_PAIR_BUDGET)
    };
    for &k in &grid.ks {
        for dim in 2..=grid.max_dim {
            for v0 in sample_hosts(k, dim).expect("valid hosts") {
                for l0 in level_sets(dim, 2, grid.max_width) {
                    let inner = l0.len() - 1;
                    let mut v1s = vec![CsTree::universe(k, inner).expect("valid")];
                    if inner >= 2 {
                        v1s.push(CsTree::enumerate_in_universe(k, inner, 1)[0].clone());
                    }
                    for v1 in v1s {
                        for l1 in level_sets(v1.dim(), 1, grid.max_width) {
                            let Ok(p) = CompatiblePair::new(k, vec![l0.clone(), l1.clone()], vec![v0.clone(), v1.clone()])
                            else {
                                continue;
                            };
                            if fits(&p) {
                                out.push(p);
                            }
                            if l1.len() >= 2 && v0.stem().is_empty() && v1.stem().is_empty() {
                                let v2 = CsTree::universe(k, l1.len() - 1).expect("valid");
                                for l2 in level_sets(v2.dim(), 1, grid.max_width) {
                                    if let Ok(p) = CompatiblePair::new(
                                        k,
                                        vec![l0.clone(), l1.clone(), l2],
                                        vec![v0.clone(), v1.clone(), v2.clone()],
                                    ) {
                                        if fits(&p) {
                                            out.push(p);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn all_t(k: u32, width: usize) -> Vec<Word> {
    (0..width).flat_map(|i| all_words(k, i)).collect()
}

fn section_density(pb: &Pullback, t: &Word) -> Rational {
    frac(pb.section(t).count(), pb.x_count() as u64)
}

/// Composition with the quotient map, iterated fiber trees and their
/// densities, quotient preimages, section averages and the density
/// consequences for every compatible pair of the grid.
pub fn iterated_suite(grid: &Grid) -> SuiteReport {
    let pairs = compatible_pairs(grid);
    let parts: Vec<SuiteReport> = pairs
        .par_iter()
        .enumerate()
        .map(|(idx, p)| {
            let mut r = SuiteReport::new("iterated-convolution");
            let mut rng = rng_for(grid.seed, 2 << 20 | idx as u64);
            iterated_config(&mut r, &mut rng, p, grid.samples);
            r
        })
        .collect();
    let mut out = SuiteReport::new("iterated-convolution");
    for p in parts {
        out.merge(p);
    }
    out
}

fn iterated_config(r: &mut SuiteReport, rng: &mut ChaCha8Rng, p: &CompatiblePair, samples: usize) {
    let k = p.k();
    let ctx = || {
        let ls: Vec<&[usize]> = p.maps().iter().map(|m| m.levels()).collect();
        format!("k={k} L={ls:?}")
    };
    let prefix = p.prefix().expect("depth >= 1");
    let Ok(radices) = p.radices() else { return };
    let big = Pullback::new(k, 1, radices.clone(), usize::MAX).expect("no budget");
    let xcount = big.x_count();
    let xs_all: Vec<Vec<Word>> = (0..xcount).map(|xi| p.fillers_at(&big.x_parts(xi))).collect();
    // At most 64 filler tuples for the per-tuple identities.
    let step = xcount.div_ceil(64).max(1);
    let xs_some: Vec<usize> = (0..xcount).step_by(step).collect();
    let ts = all_t(k, p.last().width());

    for t in &ts {
        for xs in &xs_all {
            let direct = p.iterate(t, xs);
            let via = p.quotient(t, xs).and_then(|(s, rest)| prefix.iterate(&s, &rest));
            r.check("composition", direct.is_ok() && direct == via, || format!("{} t={t}", ctx()));
        }
    }

    let trees = small_trees(k, p.last().width());
    let mut fibers: Vec<(usize, usize, CsTree)> = Vec::new();
    for (wi, w) in trees.iter().enumerate() {
        for &xi in &xs_some {
            let xs = &xs_all[xi];
            let Some(wx) = r.check_ok("iterated-fiber-tree", p.fiber_tree(w, xs)) else { return };
            let mut ok = wx.dim() == w.dim() && wx.is_subset_of(p.maps()[0].host().expect("hosted"));
            for i in 0..=w.dim() {
                let direct: Vec<Word> = w.level(i).iter().map(|t| p.iterate(t, xs).expect("in range")).collect();
                ok &= sorted(direct) == sorted(wx.level(i).to_vec());
            }
            r.check("iterated-fiber-tree", ok, || format!("{} W={w:?}", ctx()));
            fibers.push((wi, xi, wx));
        }
    }

    // The preimage of Ω_t × X' under the quotient map is {t} × X.
    let inner_width = prefix.last().width();
    let prefix_radices = prefix.radices().expect("valid");
    let omegas: Vec<Vec<Word>> = ts.iter().map(|t| p.last().omega(t).expect("in range")).collect();
    for (t, o) in ts.iter().zip(&omegas) {
        let Some(mut c) = r.check_ok("quotient-preimage", Pullback::new(k, inner_width, prefix_radices.clone(), DEFAULT_PAIR_BUDGET))
        else {
            return;
        };
        for s in o {
            for x in 0..c.x_count() {
                c.insert(s, x);
            }
        }
        let Some(b) = r.check_ok("quotient-preimage", p.quotient_pullback(&c, DEFAULT_PAIR_BUDGET)) else { return };
        let ok = ts.iter().all(|u| b.section(u).count() == if u == t { xcount as u64 } else { 0 });
        r.check("quotient-preimage", ok, || format!("{} t={t}", ctx()));
    }

    let points = p.maps()[0].host().expect("hosted").points();
    let first = CompatiblePair::from_maps(vec![p.maps()[0].clone()]).expect("single map");
    for a in test_sets(rng, k, &points, samples) {
        let Some(ad) = r.check_ok("section-average", p.pullback(&a, DEFAULT_PAIR_BUDGET)) else { return };
        let Some(ad1) = r.check_ok("section-average", prefix.pullback(&a, DEFAULT_PAIR_BUDGET)) else { return };
        for (t, o) in ts.iter().zip(&omegas) {
            let lhs = section_density(&ad, t);
            let rhs = mean(&o.iter().map(|s| section_density(&ad1, s)).collect::<Vec<_>>());
            r.check("section-average", lhs == rhs, || format!("{} t={t}: {lhs} vs {rhs}", ctx()));
        }
        for (wi, w) in trees.iter().enumerate() {
            for (_, xi, wx) in fibers.iter().filter(|(j, _, _)| *j == wi) {
                for i in 0..=w.dim() {
                    let lhs = a.density_in(wx.level(i));
                    let hits = w.level(i).iter().filter(|t| ad.contains(t, *xi)).count();
                    let rhs = frac(hits as u64, w.level(i).len() as u64);
                    r.check("iterated-fiber-density", lhs == rhs, || format!("{} W={w:?} level {i}", ctx()));
                }
            }
        }
        // A uniform lower bound on the first-stage sections propagates.
        let Some(a0) = r.check_ok("density-floor", first.pullback(&a, DEFAULT_PAIR_BUDGET)) else { return };
        let s0 = all_t(k, p.maps()[0].width());
        let gamma = s0.iter().map(|s| section_density(&a0, s)).min().expect("nonempty");
        if gamma.is_positive() {
            for t in &ts {
                r.check("density-floor", section_density(&ad, t) >= gamma, || format!("{} t={t}", ctx()));
            }
        }
    }

    // Relative density floors for A ⊆ B.
    for _ in 0..samples.max(1) {
        let b = random_subset(rng, k, &points, 0.8);
        let bw = b.words();
        let a = random_subset(rng, k, &bw, 0.7);
        let (Ok(a0), Ok(b0), Ok(ad), Ok(bd)) = (
            first.pullback(&a, DEFAULT_PAIR_BUDGET),
            first.pullback(&b, DEFAULT_PAIR_BUDGET),
            p.pullback(&a, DEFAULT_PAIR_BUDGET),
            p.pullback(&b, DEFAULT_PAIR_BUDGET),
        ) else {
            r.check("relative-density-floor", false, || format!("{} pullback failed", ctx()));
            return;
        };
        let lambda = all_t(k, p.maps()[0].width())
            .iter()
            .filter(|s| b0.section(s).count() > 0)
            .map(|s| section_density(&a0, s) / section_density(&b0, s))
            .min();
        if let Some(lambda) = lambda.filter(|l| l.is_positive()) {
            for t in &ts {
                let ok = section_density(&ad, t) >= &lambda * section_density(&bd, t);
                r.check("relative-density-floor", ok, || format!("{} t={t}", ctx()));
            }
        }
    }

    // Densities of quotient pullbacks, and conditional densities.
    for _ in 0..samples.max(1) {
        let Ok(mut c1) = Pullback::new(k, inner_width, prefix_radices.clone(), DEFAULT_PAIR_BUDGET) else { return };
        for s in all_t(k, inner_width) {
            for x in 0..c1.x_count() {
                if rng.gen_bool(0.5) {
                    c1.insert(&s, x);
                }
            }
        }
        let Some(b1) = r.check_ok("quotient-density", p.quotient_pullback(&c1, DEFAULT_PAIR_BUDGET)) else { return };
        for (t, o) in ts.iter().zip(&omegas) {
            let hits: u64 = o.iter().map(|s| c1.section(s).count()).sum();
            let lhs = frac(hits, (o.len() * c1.x_count()) as u64);
            let rhs = section_density(&b1, t);
            r.check("quotient-density", lhs == rhs, || format!("{} t={t}: {lhs} vs {rhs}", ctx()));
        }
        let ti = rng.gen_range(0..ts.len());
        let mut c0 = Pullback::new(k, inner_width, prefix_radices.clone(), DEFAULT_PAIR_BUDGET).expect("fits");
        for s in &omegas[ti] {
            for x in 0..c0.x_count() {
                if rng.gen_bool(0.5) {
                    c0.insert(s, x);
                }
            }
        }
        if c0.is_empty() {
            c0.insert(&omegas[ti][0], 0);
        }
        let Some(b0) = r.check_ok("conditional-density", p.quotient_pullback(&c0, DEFAULT_PAIR_BUDGET)) else { return };
        let lhs = frac(c0.bits().intersection_count(c1.bits()), c0.len());
        let rhs = if b0.is_empty() { Rational::zero() } else { frac(b0.bits().intersection_count(b1.bits()), b0.len()) };
        r.check("conditional-density", !b0.is_empty() && lhs == rhs, || format!("{} t={}: {lhs} vs {rhs}", ctx(), ts[ti]));
    }
}

/// Energy bounds, the energy-gap variance identity and its monotonicity,
/// and the two uniformity consequences of a small gap on every instance
/// where their hypotheses hold. Exhaustive over subsets of `[2]^n` for
/// `n <= exhaustive_n`, then `samples` random subsets of `[2]^random_n`.
pub fn energy_suite(exhaustive_n: usize, random_n: usize, samples: usize, seed: u64) -> SuiteReport {
    let k = 2u32;
    let mut jobs: Vec<(usize, BitSet)> = Vec::new();
    for n in 1..=exhaustive_n {
        let size = level_size(k, n).expect("small");
        for mask in 0u64..1 << size {
            jobs.push((n, BitSet::from_indices(size, (0..size).filter(|&i| mask >> i & 1 == 1))));
        }
    }
    let mut rng = rng_for(seed, 3 << 20);
    let size = level_size(k, random_n).expect("small");
    for _ in 0..samples {
        jobs.push((random_n, BitSet::from_indices(size, (0..size).filter(|_| rng.gen_bool(0.5)))));
    }
    let eps_list: Vec<Rational> = [2, 3, 4, 5, 8, 9, 16, 17, 32].iter().map(|&d| ratio(1, d)).collect();
    let parts: Vec<SuiteReport> = jobs
        .par_iter()
        .map(|(n, bits)| {
            let mut r = SuiteReport::new("energy");
            let view = LevelView::new(k, *n, bits).expect("sized");
            // Disjoint pairs (I, J) by base-3 codes over the coordinates.
            for code in 0..3usize.pow(*n as u32) {
                let (mut i, mut j) = (Vec::new(), Vec::new());
                let mut c = code;
                for pos in 0..*n {
                    match c % 3 {
                        1 => i.push(pos),
                        2 => j.push(pos),
                        _ => {}
                    }
                    c /= 3;
                }
                let ei = view.energy(&i).expect("valid");
                r.check("energy-bound", ei <= Rational::one() && !ei.is_negative(), || format!("n={n} I={i:?}"));
                let gap = view.energy_gap(&i, &j).expect("valid");
                let var = view.variance_gap(&i, &j).expect("valid");
                r.check("variance-identity", gap == var, || format!("n={n} I={i:?} J={j:?}: {gap} vs {var}"));
                r.check("energy-monotone", !gap.is_negative(), || format!("n={n} I={i:?} J={j:?}"));
                let cells = int(level_size(k, i.len()).expect("small") as u64);
                for eps in &eps_list {
                    if eps * &cells >= Rational::one() {
                        continue;
                    }
                    let e4 = eps * eps * eps * eps;
                    if gap <= e4 {
                        let z = view.z_set_density(&i, &j, eps).expect("valid");
                        r.check("uniform-sections", z >= Rational::one() - eps, || format!("n={n} I={i:?} J={j:?} eps={eps}"));
                    }
                    if gap <= &e4 / int(16) {
                        let (dev, _) = view.max_deviation(&i).expect("valid");
                        r.check("uniform-deviation", dev <= *eps, || format!("n={n} I={i:?} J={j:?} eps={eps}"));
                    }
                }
            }
            r
        })
        .collect();
    let mut out = SuiteReport::new("energy");
    for p in parts {
        out.merge(p);
    }
    out
}

/// Random desk-scale regularization instances over `[2]^{<=max_level}`:
/// every returned level set is re-checked with the independent checker.
pub fn regularize_suite(instances: usize, max_level: usize, seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("regularize");
    let mut rng = rng_for(seed, 4 << 20);
    let k = 2u32;
    let points: Vec<Word> = (0..=max_level).flat_map(|n| all_words(k, n)).collect();
    let mut returned = 0u64;
    for idx in 0..instances {
        let q = rng.gen_range(1..=2);
        let family: Vec<WordSet> = (0..q)
            .map(|_| {
                let p = rng.gen_range(0.2..0.8);
                random_subset(&mut rng, k, &points, p)
            })
            .collect();
        let ell = rng.gen_range(1..=2);
        let eps = [ratio(1, 4), ratio(1, 3), ratio(1, 2), int(1)][rng.gen_range(0..4)].clone();
        let mut n: Vec<usize> = (0..=max_level).filter(|_| rng.gen_bool(0.6)).collect();
        while n.len() < ell + 1 {
            n.push(rng.gen_range(0..=max_level));
            n.sort_unstable();
            n.dedup();
        }
        match regularize(&family, &eps, ell, &n, None, RegMode::BestEffort) {
            Ok(out) => {
                returned += 1;
                let ok = out.levels.len() == ell
                    && out.levels.iter().all(|l| n.contains(l))
                    && is_regular(&family, &eps, &out.levels, None).unwrap_or(false);
                r.check("regular-output", ok, || format!("instance {idx}: L={:?}", out.levels));
            }
            Err(crate::error::Error::BestEffortFailure(_)) => {}
            Err(e) => r.check("regular-output", false, || format!("instance {idx}: {e}")),
        }
    }
    r.check("regular-output", returned > 0, || "no instance returned a level set".into());
    let bound = bounds::eval(
        "reg",
        &Params::new().set("k", int(2)).set("ell", int(1)).set("q", int(1)).set("eps", ratio(1, 4)),
        &OracleTable::new(),
        bounds::Mode::Numeric,
        bounds::DEFAULT_CAP_BITS,
    );
    let ok = matches!(&bound, Ok(bounds::Outcome::Value(Val::Fin(v))) if *v == int(1));
    r.check("reg-bound", ok, || format!("reg(2,1,1,1/4) = {bound:?}"));
    r
}

fn random_space(rng: &mut ChaCha8Rng, n: usize) -> FiniteProbSpace {
    let raw: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=12)).collect();
    let total: u64 = raw.iter().sum();
    let weights = raw.iter().map(|&w| frac(w, total)).collect();
    FiniteProbSpace::new((0..n).map(|i| format!("w{i}")).collect(), weights).expect("weights sum to one")
}

fn random_event(rng: &mut ChaCha8Rng, n: usize, p: f64) -> BitSet {
    BitSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(p)))
}

/// Grow `e` by random points until its measure reaches `floor`.
fn grow_to(rng: &mut ChaCha8Rng, space: &FiniteProbSpace, mut e: BitSet, floor: &Rational) -> BitSet {
    while space.measure(&e) < *floor {
        e.insert(rng.gen_range(0..space.len()));
    }
    e
}

/// The three probabilistic selections on `instances` random spaces whose
/// hypotheses hold by construction; every certificate is recomputed.
pub fn probability_suite(instances: usize, seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("probability");
    let mut rng = rng_for(seed, 5 << 20);
    for idx in 0..instances {
        let n = rng.gen_range(2..=10);
        let space = random_space(&mut rng, n);

        // Many events of measure at least δ.
        let count = rng.gen_range(1..=8);
        let events: Vec<BitSet> = (0..count)
            .map(|_| {
                let e = random_event(&mut rng, n, 0.5);
                if e.is_empty() {
                    BitSet::from_indices(n, [0])
                } else {
                    e
                }
            })
            .collect();
        let delta = events.iter().map(|e| space.measure(e)).min().expect("nonempty");
        let c = markov_select(&space, &events, &delta);
        let half = &delta / int(2);
        let recomputed = space.measure(&space.event(
            (0..n).filter(|&w| int(events.iter().filter(|e| e.contains(w)).count() as u64) >= &half * int(count as u64)),
        ));
        r.check("markov-selection", c.precondition_holds && c.certified && c.measure == recomputed && recomputed >= half, || {
            format!("instance {idx}")
        });

        // A ⊆ B with a partition of the space into cells.
        let mut b = random_event(&mut rng, n, 0.7);
        if b.is_empty() {
            b.insert(0);
        }
        let a = BitSet::from_indices(n, b.iter().filter(|_| rng.gen_bool(0.6)));
        let (ma, mb) = (space.measure(&a), space.measure(&b));
        let (a, lambda) = if ma.is_zero() { (b.clone(), Rational::one()) } else { (a, &ma / &mb) };
        let beta = mb.clone();
        let eps = [ratio(1, 4), ratio(1, 2), int(1)][rng.gen_range(0..3)].clone();
        let ncells = rng.gen_range(1..=n);
        let mut cells = vec![BitSet::new(n); ncells];
        for w in 0..n {
            let slot = if w < ncells { w } else { rng.gen_range(0..ncells) };
            cells[slot].insert(w);
        }
        match partition_select(&space, &a, &b, &cells, &lambda, &beta, &eps) {
            Ok(cert) => {
                let floor = &beta * &eps / int(4);
                let ok_indices = (0..ncells).all(|i| {
                    let qa = space.conditional(&a, &cells[i]).expect("positive");
                    let qb = space.conditional(&b, &cells[i]).expect("positive");
                    let member = qa >= (&lambda - &eps) * &qb && qb >= floor;
                    member == cert.indices.contains(&i)
                });
                let mass: Rational = cert.indices.iter().map(|&i| space.measure(&cells[i])).sum();
                r.check("partition-selection", ok_indices && mass == cert.mass && mass >= floor, || format!("instance {idx}"));
            }
            Err(e) => r.check("partition-selection", false, || format!("instance {idx}: {e}")),
        }

        // Enough events of measure at least ε force a large pairwise intersection.
        let eps = [ratio(1, 2), ratio(2, 3), ratio(3, 4), int(1)][rng.gen_range(0..4)].clone();
        let theta = &eps * ratio(rng.gen_range(1..=3), 4);
        let gap = &eps * &eps - &theta * &theta;
        let needed = (Rational::one() / &gap).ceil().to_integer();
        let needed: usize = needed.try_into().expect("small");
        let count = needed.max(2) + rng.gen_range(0..3);
        let events: Vec<BitSet> = (0..count)
            .map(|_| {
                let e = random_event(&mut rng, n, 0.4);
                grow_to(&mut rng, &space, e, &eps)
            })
            .collect();
        match pair_intersect(&space, &events, &eps, &theta) {
            Ok(cert) => {
                let mut both = events[cert.i].clone();
                both.intersect_with(&events[cert.j]);
                let m = space.measure(&both);
                r.check(
                    "pair-intersection",
                    cert.precondition_holds && cert.i < cert.j && m == cert.measure && m >= &theta * &theta,
                    || format!("instance {idx}"),
                );
            }
            Err(e) => r.check("pair-intersection", false, || format!("instance {idx}: {e}")),
        }
    }
    r
}

fn single_variable_words(k: u32, len: usize) -> Vec<VariableWord> {
    variable_words(k, len, 1)
}

/// Pattern codings: round trips, level images, images of lines, density
/// transport under sparse regularity, the product-alphabet coding and the
/// strong-subtree conditions.
pub fn pattern_suite(max_level: usize, seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("patterns");
    let k = 2u32;
    for tau in 1..=2 {
        for p in single_variable_words(k, tau) {
            for l in level_sets(max_level, 1, 3) {
                if !is_sparse(tau, &l) {
                    continue;
                }
                let Some(pr) = r.check_ok("round-trip", PatternRestriction::new(k, p.clone(), &l)) else { continue };
                let coded = pr.coded_levels();
                for (i, &n) in coded.iter().enumerate() {
                    let mut image = Vec::new();
                    for x in all_words(k, n) {
                        let Some(y) = r.check_ok("round-trip", pr.phi(&x)) else { continue };
                        let back = pr.phi_inverse(&y);
                        r.check("round-trip", back.as_ref() == Ok(&x), || format!("p={p} L={l:?} x={x}"));
                        image.push(y);
                    }
                    let level = pr.level(i).expect("valid index");
                    r.check("level-image", sorted(image) == sorted(level.clone()), || format!("p={p} L={l:?} i={i}"));
                    r.check("level-image", level.len() == pr.level_count(i).unwrap_or(0), || format!("p={p} L={l:?} i={i}"));
                }
                // Words outside R_{p,L} are rejected by the inverse.
                let members = pr.to_wordset().expect("valid");
                for &n in &l {
                    for w in all_words(k, n) {
                        r.check("round-trip", members.contains(&w) == pr.phi_inverse(&w).is_ok(), || format!("p={p} L={l:?} w={w}"));
                    }
                }
                let top = *coded.last().expect("nonempty");
                if top >= 1 {
                    for line in CsTree::enumerate_in_universe(k, top, 1) {
                        if !line.level_set().iter().all(|n| coded.contains(n)) {
                            continue;
                        }
                        match pr.cs_image(&line) {
                            Ok((c, w)) => {
                                let mut image: Vec<Word> = line.points().iter().map(|x| pr.phi(x).expect("coded")).collect();
                                image.sort();
                                let mut expect: Vec<Word> = std::iter::once(c.clone()).chain((1..=k).map(|a| c.concat(&w.at(a)))).collect();
                                expect.sort();
                                let prefix_ok = w.len() >= tau && w.syms()[..tau] == *p.syms();
                                r.check("line-image", image == expect && prefix_ok, || format!("p={p} L={l:?} line={line:?}"));
                            }
                            Err(e) => r.check("line-image", false, || format!("p={p} L={l:?} line={line:?}: {e}")),
                        }
                    }
                }
            }
        }
    }

    // Transport of densities from sparse-regular families.
    let mut rng = rng_for(seed, 6 << 20);
    let mut regular_found = 0u64;
    for idx in 0..40 {
        let tau = rng.gen_range(1..=2);
        let top = 8usize;
        let points: Vec<Word> = (0..=top).flat_map(|n| all_words(k, n)).collect();
        let q = rng.gen_range(1..=2);
        let family: Vec<WordSet> = (0..q)
            .map(|_| {
                let p = rng.gen_range(0.3..0.7);
                random_subset(&mut rng, k, &points, p)
            })
            .collect();
        let ell = rng.gen_range(2..=3);
        let eps = [ratio(1, 4), ratio(1, 2)][rng.gen_range(0..2)].clone();
        let candidates: Vec<usize> = (0..=top).step_by(tau).collect();
        let Ok(reg) = regularize(&family, &eps, ell, &candidates, Some(tau), RegMode::BestEffort) else { continue };
        let reg_ok = is_regular(&family, &eps, &reg.levels, Some(tau)).unwrap_or(false);
        r.check("sparse-regular", reg_ok, || format!("instance {idx}: L={:?}", reg.levels));
        if !reg_ok {
            continue;
        }
        regular_found += 1;
        for p in single_variable_words(k, tau) {
            let Some(pr) = r.check_ok("density-transport", PatternRestriction::new(k, p.clone(), &reg.levels)) else { continue };
            let coded = pr.coded_levels();
            for a in &family {
                let pulled = pr.pull_back(a).expect("valid");
                for (i, &li) in reg.levels.iter().enumerate() {
                    let base = a.level_density(li).expect("small");
                    let restricted = pr.restricted_density(a, i).expect("valid");
                    r.check("restricted-density", abs_diff(&restricted, &base) <= eps, || {
                        format!("instance {idx} p={p} i={i}: {restricted} vs {base}")
                    });
                    let coded_dens = pulled.level_density(coded[i]).expect("small");
                    r.check("density-transport", abs_diff(&coded_dens, &base) <= eps, || {
                        format!("instance {idx} p={p} i={i}: {coded_dens} vs {base}")
                    });
                }
            }
        }
    }
    r.check("sparse-regular", regular_found > 0, || "no sparse-regular family found".into());

    // The product-alphabet coding for b = (2, 2).
    let coding = HomogeneousCoding::new(vec![2, 2]).expect("valid");
    let alpha = coding.alphabet();
    for n in 0..=3usize {
        let mut codes = Vec::new();
        for s in all_words(alpha, n) {
            let Some(parts) = r.check_ok("product-coding", coding.code(&s)) else { continue };
            let lengths_ok = parts.iter().all(|t| t.len() == n);
            let back = coding.decode(&parts);
            r.check("product-coding", lengths_ok && back.as_ref() == Ok(&s), || format!("s={s}"));
            codes.push(parts);
        }
        let total = codes.len();
        codes.sort();
        codes.dedup();
        let product = level_size(2, n).expect("small").pow(2);
        r.check("product-coding", codes.len() == total && total == product, || format!("n={n}"));
    }
    let stems: Vec<Word> = (0..=1).flat_map(|n| all_words(alpha, n)).collect();
    let gens: Vec<VariableWord> = (1..=2).flat_map(|len| left_variable_words(alpha, len)).collect();
    for c in &stems {
        for w0 in &gens {
            for w1 in &gens {
                match coding.strong_subtrees(c, &[w0.clone(), w1.clone()]) {
                    Ok(s) => r.check("strong-subtrees", s.product_ok && s.conditions_ok, || format!("c={c} w0={w0} w1={w1}")),
                    Err(e) => r.check("strong-subtrees", false, || format!("c={c} w0={w0} w1={w1}: {e}")),
                }
            }
        }
    }
    r
}

fn random_params(rng: &mut ChaCha8Rng, spec: &str) -> Params {
    let units = [ratio(1, 2), ratio(1, 4), ratio(1, 3), int(1), ratio(3, 4)];
    let mut p = Params::new();
    for key in spec.split_whitespace() {
        let optional = key.starts_with('[');
        let key = key.trim_matches(|c| c == '[' || c == ']');
        if optional && rng.gen_bool(0.5) {
            continue;
        }
        match key {
            "k" => p.insert(key, int(rng.gen_range(2..=3))),
            "eps" | "delta" | "gamma" => p.insert(key, units[rng.gen_range(0..units.len())].clone()),
            "taus" => p.taus = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=2)).collect(),
            "tau" | "q" | "r" => p.insert(key, int(rng.gen_range(1..=2))),
            _ => p.insert(key, int(rng.gen_range(0..=3))),
        }
    }
    p
}

fn same_outcome(a: &Val, b: &Val) -> bool {
    match (a, b) {
        (Val::Fin(x), Val::Fin(y)) => x == y,
        (Val::Overflow, Val::Overflow) => true,
        (Val::Missing(_), Val::Missing(_)) | (Val::Undefined(_), Val::Undefined(_)) => true,
        _ => false,
    }
}

/// Random small-argument evaluations compared between the numeric
/// evaluator and the numeric reading of the symbolic tree, and the base
/// cases of the recursions.
pub fn bounds_agreement_suite(agreements: usize, seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("bounds-agreement");
    let mut rng = rng_for(seed, 7 << 20);
    let mut table = OracleTable::new();
    for (d, v) in [(2u64, 3u64), (3, 5), (4, 9)] {
        table.insert("GR", vec![int(2), int(d), int(1), int(2)], int(v)).expect("valid");
        table.insert("GR", vec![int(2), int(d), int(1), int(1)], int(v)).expect("valid");
    }
    let cap = 1 << 14;
    let mut done = 0usize;
    let mut finite = 0usize;
    let mut attempts = 0usize;
    while done < agreements && attempts < agreements * 200 {
        attempts += 1;
        let (name, spec) = CATALOG[rng.gen_range(0..CATALOG.len())];
        let p = random_params(&mut rng, spec);
        let numeric = Numeric::with_limits(&table, cap, bounds::DEFAULT_ITER_LIMIT);
        let Ok(nv) = build(&numeric, name, &p) else { continue };
        let sym = Symbolic::new();
        let tree = match build(&sym, name, &p) {
            Ok(t) => t,
            Err(e) => {
                r.check("agreement", false, || format!("{name}: symbolic failed: {e}"));
                continue;
            }
        };
        let sv = eval_tree(&tree, &table, cap);
        done += 1;
        if matches!(nv, Val::Fin(_)) {
            finite += 1;
        }
        r.check("agreement", same_outcome(&nv, &sv), || format!("{name} {p:?}: {nv} vs {sv}"));
    }
    r.check("agreement", done == agreements && finite > 0, || format!("{done} comparisons, {finite} finite"));
    bounds_base_cases(&mut r, &table);
    r
}

fn numeric_value(name: &str, p: &Params, table: &OracleTable) -> Option<Rational> {
    build(&Numeric::new(table), name, p).ok()?.finite().cloned()
}

fn bounds_base_cases(r: &mut SuiteReport, table: &OracleTable) {
    let base = |k: u64| Params::new().set("k", int(k));
    for k in 2..=3u64 {
        for m in 1..=4u64 {
            for n in 0..m.saturating_sub(1) {
                let p = base(k).set("m", int(m)).set("r", int(2)).set("n", int(n));
                let v = numeric_value("g", &p, table);
                r.check("base-cases", v == Some(Rational::zero()), || format!("g k={k} m={m} n={n}: {v:?}"));
            }
            for gamma in [ratio(1, 2), ratio(1, 3)] {
                for name in ["N", "n1", "n2"] {
                    let p = base(k).set("m", int(m)).set("gamma", gamma.clone()).set("p", int(0));
                    let v = numeric_value(name, &p, table);
                    r.check("base-cases", v == Some(Rational::zero()), || format!("{name} k={k} m={m} p=0: {v:?}"));
                }
                let p = base(k).set("n", int(0)).set("m", int(m)).set("gamma", gamma.clone());
                let v = numeric_value("H_iter", &p, table);
                r.check("base-cases", v == Some(int(m)), || format!("H_iter k={k} n=0 m={m}: {v:?}"));
            }
        }
    }
    let c = Numeric::new(table);
    let succ = |c: &Numeric, x: Val| c.add(&x, &c.nat(1));
    for seed in 0..4u64 {
        let v = c.iterate("f", &succ, &c.nat(0), &c.nat(seed));
        r.check("base-cases", same_outcome(&v, &Val::Fin(int(seed))), || format!("f^(0)({seed}) = {v}"));
        let v = c.iterate("f", &succ, &c.nat(3), &c.nat(seed));
        r.check("base-cases", same_outcome(&v, &Val::Fin(int(seed + 3))), || format!("f^(3)({seed}) = {v}"));
    }
}

/// Suite names accepted by [`run_suite`].
pub const SUITES: &[&str] = &[
    "convolution-grid",
    "fw-average",
    "iterated-grid",
    "energy",
    "regularize",
    "probability",
    "patterns",
    "bounds-agreement",
];

/// Run a suite by name with its standard parameters, or `None` for an unknown name.
pub fn run_suite(name: &str, grid: &Grid) -> Option<SuiteReport> {
    Some(match name {
        "convolution-grid" => convolution_suite(grid),
        "fw-average" => fw_average_suite(grid),
        "iterated-grid" => {
            let g = Grid {
                samples: grid.samples.min(8),
                ..grid.clone()
            };
            iterated_suite(&g)
        }
        "energy" => energy_suite(3, 4, 200, grid.seed),
        "regularize" => regularize_suite(100, 10, grid.seed),
        "probability" => probability_suite(500, grid.seed),
        "patterns" => pattern_suite(6, grid.seed),
        "bounds-agreement" => bounds_agreement_suite(50, grid.seed),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Grid {
        Grid {
            ks: vec![2],
            max_width: 2,
            max_dim: 2,
            samples: 3,
            seed: 1,
        }
    }

    #[test]
    fn small_suites_pass() {
        for r in [
            convolution_suite(&small()),
            fw_average_suite(&small()),
            iterated_suite(&Grid { max_dim: 3, ..small() }),
            energy_suite(2, 3, 5, 1),
            probability_suite(20, 1),
        ] {
            assert!(r.passed(), "{}: {:?}", r.summary(), r.examples);
        }
    }

    #[test]
    fn failures_are_recorded() {
        let mut r = SuiteReport::new("t");
        r.check("a", true, String::new);
        r.check("a", false, || "bad".into());
        assert!(!r.passed());
        assert_eq!(r.identities, vec![("a".to_string(), 2)]);
        assert_eq!(r.examples, vec!["a: bad".to_string()]);
        assert!(!SuiteReport::new("empty").passed());
    }
}
