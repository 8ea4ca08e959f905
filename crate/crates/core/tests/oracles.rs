//! Library results against naive enumerations written from the definitions.

use std::collections::BTreeSet;

use dcs_core::bounds::subtr_count;
use dcs_core::cs_tree::CsTree;
use dcs_core::extremal::{extremal_free, extremal_free_brute, find_cs, find_line, SearchBudget, Structure};
use dcs_core::partition::{cs_search, find_bad_coloring, find_bad_coloring_plain, gr_search, hypergraph, Coloring, Statement};
use dcs_core::words::{all_words, CombSubspace, Sym, VariableWord, Word};
use dcs_core::wordset::WordSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every sequence over `[k] ∪ {v}` of length `n`; `None` is `v`.
fn sequences(k: u32, n: usize) -> Vec<Vec<Option<u32>>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                std::iter::once(None).chain((1..=k).map(Some)).map(move |s| {
                    let mut q = p.clone();
                    q.push(s);
                    q
                })
            })
            .collect();
    }
    out
}

/// The sequences using `v` at least once.
fn naive_lines(k: u32, n: usize) -> Vec<Vec<Option<u32>>> {
    sequences(k, n).into_iter().filter(|l| l.contains(&None)).collect()
}

/// Left variable words of length `len`: `v` followed by anything.
fn left_words(k: u32, len: usize) -> Vec<Vec<Option<u32>>> {
    sequences(k, len - 1).into_iter().map(|t| std::iter::once(None).chain(t).collect()).collect()
}

fn subst(line: &[Option<u32>], a: u32) -> Word {
    Word(line.iter().map(|s| s.unwrap_or(a)).collect())
}

fn random_set(rng: &mut ChaCha8Rng, k: u32, words: &[Word], p: f64) -> WordSet {
    let chosen: Vec<Word> = words.iter().filter(|_| rng.gen_bool(p)).cloned().collect();
    WordSet::from_words(k, &chosen).unwrap()
}

#[test]
fn line_search_matches_exhaustive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 2..=3u32 {
        for n in 1..=3usize {
            let level: Vec<Word> = all_words(k, n).collect();
            let lines = naive_lines(k, n);
            for _ in 0..40 {
                let a = random_set(&mut rng, k, &level, 0.7);
                let expect = lines.iter().any(|l| (1..=k).all(|c| a.contains(&subst(l, c))));
                let (found, _) = find_line(&a, n);
                assert_eq!(found.is_some(), expect, "k={k} n={n}");
                if let Some(w) = found {
                    assert!((1..=k).all(|c| a.contains(&w.at(c))));
                }
            }
        }
    }
}

/// `{c} ∪ {c⌢w(a)}` for every stem `c` and left variable word `w` with
/// `|c| + |w| <= max_len`.
fn naive_cs_lines(k: u32, max_len: usize) -> Vec<Vec<Word>> {
    let mut out = Vec::new();
    for s in 0..max_len {
        for c in all_words(k, s) {
            for len in 1..=max_len - s {
                for seq in left_words(k, len) {
                    let mut pts = vec![c.clone()];
                    pts.extend((1..=k).map(|a| c.concat(&subst(&seq, a))));
                    out.push(pts);
                }
            }
        }
    }
    out
}

#[test]
fn cs_line_search_matches_exhaustive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let k = 2u32;
    let words: Vec<Word> = (0..=3).flat_map(|n| all_words(k, n)).collect();
    let lines = naive_cs_lines(k, 3);
    assert_eq!(lines.len() as u64, subtr_count(2, 4, 1).unwrap().to_string().parse::<u64>().unwrap());
    for _ in 0..200 {
        let a = random_set(&mut rng, k, &words, 0.45);
        let expect = lines.iter().any(|pts| pts.iter().all(|p| a.contains(p)));
        let found = find_cs(&a, 1, None, SearchBudget::default()).unwrap();
        assert_eq!(found.is_some(), expect);
        if let Some(w) = found {
            assert!(w.points(k).iter().all(|p| a.contains(p)));
        }
    }
}

/// Generating sequences of `l`-dimensional subtrees of `[k]^{<m+1}`.
fn naive_subtrees(k: u32, m: usize, l: usize) -> BTreeSet<Vec<Vec<Word>>> {
    let mut out = BTreeSet::new();
    fn gens(k: u32, left: usize, need: usize, acc: &mut Vec<VariableWord>, out: &mut Vec<Vec<VariableWord>>) {
        if need == 0 {
            out.push(acc.clone());
            return;
        }
        for len in 1..=left {
            for seq in left_words(k, len) {
                let syms: Vec<Sym> = seq.iter().map(|s| s.map_or(Sym::Var(0), Sym::Letter)).collect();
                acc.push(VariableWord::new(syms).unwrap());
                gens(k, left - len, need - 1, acc, out);
                acc.pop();
            }
        }
    }
    for s in 0..=m {
        for c in all_words(k, s) {
            let mut all = Vec::new();
            gens(k, m - s, l, &mut Vec::new(), &mut all);
            for g in all {
                let t = CsTree::new(k, c.clone(), g).unwrap();
                out.insert(t.levels().iter().map(|lv| lv.to_vec()).collect());
            }
        }
    }
    out
}

#[test]
fn subtree_enumeration_matches_generators_and_closed_form() {
    for k in 2..=3u32 {
        for m in 1..=3usize {
            for l in 1..=m.min(2) {
                if k == 3 && m == 3 && l == 2 {
                    continue;
                }
                let naive = naive_subtrees(k, m, l);
                let lib: BTreeSet<Vec<Vec<Word>>> = CsTree::enumerate_in_universe(k, m, l)
                    .iter()
                    .map(|t| t.levels().iter().map(|lv| lv.to_vec()).collect())
                    .collect();
                assert_eq!(lib, naive, "k={k} m={m} l={l}");
                let closed = subtr_count(k as u64, m as u64 + 1, l as u64).unwrap();
                assert_eq!(closed.to_string(), naive.len().to_string(), "k={k} m={m} l={l}");
            }
        }
    }
}

/// Words over `[k] ∪ {x_1..x_l}` of length `n` using every variable, with
/// all occurrences of `x_i` before all occurrences of `x_{i+1}`.
fn naive_subspace_count(k: u32, n: usize, l: u32) -> usize {
    let base = (k + l) as usize;
    (0..base.pow(n as u32))
        .filter(|&code| {
            let mut c = code;
            let mut current: Option<u32> = None;
            for _ in 0..n {
                let s = (c % base) as u32;
                c /= base;
                if s >= k {
                    let v = s - k;
                    let ok = match current {
                        None => v == 0,
                        Some(u) => v == u || v == u + 1,
                    };
                    if !ok {
                        return false;
                    }
                    current = Some(v);
                }
            }
            current == Some(l - 1)
        })
        .count()
}

#[test]
fn subspace_counts_match_the_symbol_count() {
    for k in 2..=3u32 {
        for n in 1..=4usize {
            for l in 1..=2u32.min(n as u32) {
                let cube = CombSubspace::cube(k, n).unwrap();
                assert_eq!(cube.subspaces(l).unwrap().len(), naive_subspace_count(k, n, l), "k={k} n={n} l={l}");
            }
        }
    }
}

#[test]
fn symmetry_reduction_does_not_change_decisions() {
    for (st, d, n) in [(Statement::Cs, 2, 2), (Statement::Gr, 2, 2), (Statement::Cs, 1, 2), (Statement::Gr, 1, 3), (Statement::Gr, 2, 3)] {
        let h = hypergraph(st, 2, d, 1, n).unwrap();
        if h.domain > 20 {
            continue;
        }
        for r in (1..=3u32).filter(|&r| (r as f64).powi(h.domain as i32) <= (1u64 << 24) as f64) {
            let fast = find_bad_coloring(&h, r, SearchBudget::default()).unwrap();
            let plain = find_bad_coloring_plain(&h, r).unwrap();
            assert_eq!(fast.is_some(), plain.is_some(), "{st:?} d={d} n={n} r={r}");
            for colors in fast.iter().chain(plain.iter()) {
                assert!(h.edges.iter().all(|e| e.iter().any(|&i| colors[i] != colors[e[0]])));
            }
        }
    }
}

#[test]
fn monochromatic_searches_match_a_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = CsTree::universe(2, 3).unwrap();
    let domain = w.subtrees(1).unwrap();
    let candidates = w.subtrees(2).unwrap();
    for _ in 0..30 {
        let colors: Vec<u32> = domain.iter().map(|_| rng.gen_range(1..=2)).collect();
        let coloring = Coloring::new(domain.clone(), colors.clone(), 2).unwrap();
        let color = |t: &CsTree| colors[domain.iter().position(|x| x == t).unwrap()];
        let expect = candidates.iter().find(|u| {
            let fam = u.subtrees(1).unwrap();
            fam.iter().all(|s| color(s) == color(&fam[0]))
        });
        assert_eq!(cs_search(&w, &coloring, 1, 2).unwrap().as_ref(), expect);
    }
    let v = CombSubspace::cube(2, 3).unwrap();
    let mut lines = v.subspaces(1).unwrap();
    lines.sort();
    let mut planes = v.subspaces(2).unwrap();
    planes.sort();
    for _ in 0..30 {
        let colors: Vec<u32> = lines.iter().map(|_| rng.gen_range(1..=2)).collect();
        let coloring = Coloring::new(lines.clone(), colors.clone(), 2).unwrap();
        let color = |s: &CombSubspace| colors[lines.iter().position(|x| x == s).unwrap()];
        let expect = planes.iter().find(|p| {
            let fam = p.subspaces(1).unwrap();
            fam.iter().all(|s| color(s) == color(&fam[0]))
        });
        assert_eq!(gr_search(&v, &coloring, 1, 2).unwrap().as_ref(), expect);
    }
}

#[test]
fn extremal_agrees_with_enumeration() {
    for levels in [vec![0, 1], vec![1, 2], vec![0, 2], vec![0, 1, 2], vec![3]] {
        for st in [Structure::Line, Structure::CsTree(1)] {
            let fast = extremal_free(2, &levels, st, SearchBudget::default()).unwrap();
            let slow = extremal_free_brute(2, &levels, st).unwrap();
            assert_eq!(fast.max, slow.max, "{levels:?} {st:?}");
            assert_eq!(fast.witness, slow.witness, "{levels:?} {st:?}");
        }
    }
}
