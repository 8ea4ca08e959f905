use std::collections::BTreeSet;

use dcs_core::convolution::ConvolutionMap;
use dcs_core::cs_tree::{CsTree, TreeDoc};
use dcs_core::patterns::{HomogeneousCoding, PatternRestriction};
use dcs_core::rational::{format_rational, parse_rational, ratio};
use dcs_core::regularity::{extension, is_sparse, LevelView};
use dcs_core::bitset::BitSet;
use dcs_core::words::{all_words, equivalents, is_equivalent, LocatedWord, VariableWord, Word};
use dcs_core::wordset::{is_insensitive, WordSet};
use proptest::prelude::*;

fn word(k: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=k, 0..=max_len).prop_map(Word)
}

fn level_set(max: usize, min_len: usize, max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::btree_set(0..=max, min_len..=max_len).prop_map(|s| s.into_iter().collect())
}

/// Close `seed` under swapping the letters `i` and `j` anywhere.
fn insensitive_hull(seed: &[Word], i: u32, j: u32) -> BTreeSet<Word> {
    seed.iter().flat_map(|w| equivalents(w, i, j)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_round_trips_and_orders(k in 2u32..=4, w in word(4, 5)) {
        prop_assume!(w.0.iter().all(|&a| a <= k));
        let r = w.rank(k);
        prop_assert_eq!(Word::unrank(k, w.len(), r), w.clone());
        if let Some(next) = all_words(k, w.len()).nth(r + 1) {
            prop_assert!(w < next);
        }
    }

    #[test]
    fn word_text_round_trips(w in word(9, 6)) {
        prop_assert_eq!(Word::parse(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn rationals_round_trip(p in -1000i64..1000, q in 1i64..1000) {
        let r = ratio(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn set_operations_match_btreeset(xs in prop::collection::vec(word(3, 3), 0..30), ys in prop::collection::vec(word(3, 3), 0..30)) {
        let a = WordSet::from_words(3, &xs).unwrap();
        let b = WordSet::from_words(3, &ys).unwrap();
        let sa: BTreeSet<Word> = xs.iter().cloned().collect();
        let sb: BTreeSet<Word> = ys.iter().cloned().collect();
        prop_assert_eq!(a.words(), sa.iter().cloned().collect::<Vec<_>>());
        prop_assert_eq!(a.union(&b).words(), sa.union(&sb).cloned().collect::<Vec<_>>());
        prop_assert_eq!(a.intersection(&b).words(), sa.intersection(&sb).cloned().collect::<Vec<_>>());
        prop_assert_eq!(a.len(), sa.len() as u64);
        let text = a.to_text();
        prop_assert_eq!(WordSet::parse_text(3, &text).unwrap().words(), a.words());
    }

    #[test]
    fn insensitive_sets_are_closed(xs in prop::collection::vec(word(3, 3), 0..8), ys in prop::collection::vec(word(3, 3), 0..8)) {
        let a = WordSet::from_words(3, &insensitive_hull(&xs, 1, 2)).unwrap();
        let b = WordSet::from_words(3, &insensitive_hull(&ys, 1, 2)).unwrap();
        prop_assert!(is_insensitive(&a, 1, 2).unwrap());
        prop_assert!(is_insensitive(&a.union(&b), 1, 2).unwrap());
        prop_assert!(is_insensitive(&a.intersection(&b), 1, 2).unwrap());
        prop_assert!(is_insensitive(&a.complement_within(&[0, 1, 2, 3]).unwrap(), 1, 2).unwrap());
    }

    #[test]
    fn equivalence_is_symmetric(x in word(3, 4), y in word(3, 4)) {
        prop_assume!(x.len() == y.len());
        prop_assert_eq!(is_equivalent(&x, &y, 1, 3).unwrap(), is_equivalent(&y, &x, 1, 3).unwrap());
        prop_assert!(equivalents(&x, 1, 3).iter().all(|z| is_equivalent(&x, z, 1, 3).unwrap()));
    }

    #[test]
    fn canonical_embedding_inverts(j in prop::collection::btree_set(0usize..20, 0..=6), seed in any::<u64>()) {
        let j: Vec<usize> = j.into_iter().collect();
        let x = Word((0..j.len()).map(|i| 1 + ((seed >> (i * 2)) & 1) as u32).collect());
        let e = LocatedWord::canonical_embed(&j, &x).unwrap();
        prop_assert_eq!(e.support(), j.clone());
        prop_assert_eq!(e.to_word(), x);
    }

    #[test]
    fn convolution_images_partition_levels(k in 2u32..=3, l in level_set(5, 1, 3)) {
        let map = ConvolutionMap::new(k, &l, None).unwrap();
        let xs = map.fillers();
        for i in 0..map.width() {
            let mut seen = BTreeSet::new();
            for t in all_words(k, i) {
                let image: BTreeSet<Word> = xs.iter().map(|x| map.conv(&t, x).unwrap()).collect();
                prop_assert!(image.iter().all(|y| y.len() == l[i]));
                prop_assert!(image.is_disjoint(&seen));
                seen.extend(image);
            }
            prop_assert_eq!(seen.len(), (k as usize).pow(l[i] as u32));
        }
    }

    #[test]
    fn tree_documents_round_trip(k in 2u32..=3, stem in word(3, 2), lens in prop::collection::vec(1usize..=3, 1..=3), fill in any::<u64>()) {
        prop_assume!(stem.0.iter().all(|&a| a <= k));
        let mut bits = fill;
        let gens: Vec<VariableWord> = lens.iter().map(|&len| {
            let mut s = String::from("v");
            for _ in 1..len {
                let c = bits % (k as u64 + 1);
                bits /= k as u64 + 1;
                s.push(if c == 0 { 'v' } else { char::from_digit(c as u32, 10).unwrap() });
            }
            VariableWord::parse(&s).unwrap()
        }).collect();
        let t = CsTree::new(k, stem, gens).unwrap();
        prop_assert_eq!(TreeDoc::parse(&TreeDoc::to_json(&t)).unwrap(), t.clone());
        // Levels have k^i points, all of one length.
        for (i, lv) in t.levels().iter().enumerate() {
            prop_assert_eq!(lv.len(), (k as usize).pow(i as u32));
            prop_assert!(lv.iter().all(|w| w.len() == lv[0].len()));
        }
    }

    #[test]
    fn sparse_extension_sizes(tau in 1usize..=3, l in level_set(12, 0, 4)) {
        if is_sparse(tau, &l) {
            let ext = extension(tau, &l);
            prop_assert_eq!(ext.len(), tau * l.len());
            let set: BTreeSet<usize> = ext.iter().copied().collect();
            prop_assert_eq!(set.len(), ext.len());
        }
    }

    #[test]
    fn energy_gap_identity(n in 1usize..=4, fill in any::<u64>(), split in any::<u64>()) {
        let size = 2usize.pow(n as u32);
        let bits = BitSet::from_indices(size, (0..size).filter(|&i| fill >> i & 1 == 1));
        let view = LevelView::new(2, n, &bits).unwrap();
        let (mut i, mut j) = (Vec::new(), Vec::new());
        for p in 0..n {
            match split >> (2 * p) & 3 {
                1 => i.push(p),
                2 => j.push(p),
                _ => {}
            }
        }
        let gap = view.energy_gap(&i, &j).unwrap();
        prop_assert_eq!(gap.clone(), view.variance_gap(&i, &j).unwrap());
        prop_assert!(gap >= ratio(0, 1));
    }

    #[test]
    fn pattern_maps_are_bijections(p in prop::sample::select(vec!["v", "v1", "v2", "vv", "1v", "2v"]), l in level_set(6, 1, 3)) {
        let p = VariableWord::parse(p).unwrap();
        let tau = p.len();
        prop_assume!(is_sparse(tau, &l));
        let pr = PatternRestriction::new(2, p, &l).unwrap();
        for (i, &n) in pr.coded_levels().iter().enumerate() {
            let mut image = BTreeSet::new();
            for x in all_words(2, n) {
                let y = pr.phi(&x).unwrap();
                prop_assert_eq!(y.len(), l[i]);
                prop_assert_eq!(pr.phi_inverse(&y).unwrap(), x);
                image.insert(y);
            }
            prop_assert_eq!(image.len(), pr.level_count(i).unwrap());
        }
    }

    #[test]
    fn product_coding_round_trips(b in prop::collection::vec(2u32..=3, 1..=3), fill in prop::collection::vec(any::<u32>(), 0..=4)) {
        let coding = HomogeneousCoding::new(b.clone()).unwrap();
        let s = Word(fill.iter().map(|x| 1 + x % coding.alphabet()).collect());
        let parts = coding.code(&s).unwrap();
        prop_assert_eq!(parts.len(), b.len());
        for (part, &bi) in parts.iter().zip(&b) {
            prop_assert_eq!(part.len(), s.len());
            prop_assert!(part.0.iter().all(|&a| (1..=bi).contains(&a)));
        }
        prop_assert_eq!(coding.decode(&parts).unwrap(), s.clone());
        let text = coding.format_word(&s).unwrap();
        prop_assert_eq!(coding.parse_word(&text).unwrap(), s);
    }
}
