//! One PASS/FAIL line per acceptance criterion, each with its time limit.

use std::time::{Duration, Instant};

use dcs_core::bounds::{self, Mode, OracleTable, Outcome, Params, Val};
use dcs_core::convolution::ConvolutionMap;
use dcs_core::extremal::{dhj_reduce, extremal_free, extremal_free_brute, find_line, hyperedges, is_line_in, SearchBudget, Structure};
use dcs_core::partition::{minimal_number, Statement};
use dcs_core::rational::{frac, int, ratio};
use dcs_core::verify::{self, Grid, SuiteReport};
use dcs_core::words::{all_words, Word};
use dcs_core::wordset::WordSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Line {
    name: &'static str,
    ok: bool,
    detail: String,
    elapsed: Duration,
    limit: Duration,
}

fn timed(name: &'static str, limit_ms: u64, f: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (ok, detail) = f();
    Line {
        name,
        ok,
        detail,
        elapsed: start.elapsed(),
        limit: Duration::from_millis(limit_ms),
    }
}

fn suite(r: SuiteReport) -> (bool, String) {
    let mut detail = format!("{} checks, {} failures", r.checks, r.failures);
    if let Some(e) = r.examples.first() {
        detail.push_str(&format!("; first failure: {e}"));
    }
    (r.passed(), detail)
}

fn convolution_fidelity() -> (bool, String) {
    let map = ConvolutionMap::new(5, &[1, 3, 7, 9], None).unwrap();
    let out = map.conv(&Word(vec![1, 2]), &Word(vec![3, 5, 4, 2, 4, 1])).unwrap();
    (out == Word(vec![3, 1, 5, 2, 4, 2, 4]), format!("conv = {out}"))
}

fn energy() -> (bool, String) {
    suite(verify::energy_suite(3, 4, 200, 0))
}

fn regularize_check() -> (bool, String) {
    suite(verify::regularize_suite(100, 10, 0))
}

fn binomial(n: u64, r: u64) -> u64 {
    (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn extremal_values() -> (bool, String) {
    let budget = SearchBudget::default();
    let mut ok = true;
    let mut values = Vec::new();
    for n in 1..=4usize {
        let e = extremal_free(2, &[n], Structure::Line, budget).unwrap();
        ok &= e.max as u64 == binomial(n as u64, n as u64 / 2);
        if e.universe <= 16 {
            ok &= extremal_free_brute(2, &[n], Structure::Line).unwrap().max == e.max;
        }
        values.push(e.max);
    }
    let e = extremal_free(2, &[0, 1, 2], Structure::CsTree(1), budget).unwrap();
    let (universe, edges) = hyperedges(2, &[0, 1, 2], Structure::CsTree(1)).unwrap();
    let mask: u64 = e.witness.iter().map(|w| 1u64 << universe.binary_search(w).unwrap()).sum();
    let free = edges.iter().all(|&edge| mask & edge != edge);
    let brute = extremal_free_brute(2, &[0, 1, 2], Structure::CsTree(1)).unwrap().max;
    ok &= e.max == 4 && free && e.witness.len() == 4 && brute == 4;
    let witness: Vec<String> = e.witness.iter().map(|w| w.to_string()).collect();
    (
        ok,
        format!("line-free maxima {values:?} against C(n, n/2); CS-line-free max {} with free witness {{{}}}", e.max, witness.join(",")),
    )
}

fn partition_values() -> (bool, String) {
    let budget = SearchBudget::default();
    let one = minimal_number(Statement::Cs, 2, 1, 1, 2, 3, budget).unwrap();
    let a = minimal_number(Statement::Cs, 2, 2, 1, 2, 3, budget).unwrap();
    let b = minimal_number(Statement::Cs, 2, 2, 1, 2, 3, budget).unwrap();
    let at2 = a.hosts.iter().find(|h| h.n == 2).map(|h| h.domain);
    let ok = one.value == Some(1) && a == b && at2 == Some(6) && a.monotone;
    let shown = match a.value {
        Some(v) => v.to_string(),
        None => "> 3".to_string(),
    };
    (ok, format!("CS(2,1,1,2) = {:?}; CS(2,2,1,2) {shown}, stable across runs", one.value))
}

fn dhj_soundness() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let level: Vec<Word> = all_words(2, 4).collect();
    let (mut ok, mut lines, mut direct) = (true, 0, 0);
    for _ in 0..200 {
        let size = rng.gen_range(8..=16);
        let mut chosen = level.clone();
        for i in 0..chosen.len() {
            let j = rng.gen_range(i..chosen.len());
            chosen.swap(i, j);
        }
        let a = WordSet::from_words(2, &chosen[..size]).unwrap();
        let delta = frac(size as u64, 16);
        let red = dhj_reduce(&a, 4, &delta, SearchBudget::default()).unwrap();
        if let Some(w) = &red.line {
            lines += 1;
            ok &= is_line_in(&a, w) && w.len() == 4;
        }
        if find_line(&a, 4).0.is_some() {
            direct += 1;
            ok &= red.line.as_ref().is_none_or(|w| is_line_in(&a, w));
        }
    }
    (ok, format!("{lines} reduction lines, {direct} sets with a direct line"))
}

fn bounds_check() -> (bool, String) {
    let r = verify::bounds_agreement_suite(50, 0);
    let reg = bounds::eval(
        "reg",
        &Params::new().set("k", int(2)).set("ell", int(1)).set("q", int(1)).set("eps", ratio(1, 4)),
        &OracleTable::new(),
        Mode::Numeric,
        bounds::DEFAULT_CAP_BITS,
    );
    let reg_ok = matches!(&reg, Ok(Outcome::Value(Val::Fin(v))) if *v == int(1));
    let (ok, detail) = suite(r);
    (ok && reg_ok, detail)
}

fn patterns() -> (bool, String) {
    suite(verify::pattern_suite(6, 0))
}

fn probability() -> (bool, String) {
    suite(verify::probability_suite(500, 0))
}

#[test]
fn acceptance() {
    let grid = Grid::default();
    let lines = vec![
        timed("convolution fidelity", 1, convolution_fidelity),
        timed("convolution identity suite", 60_000, || suite(verify::convolution_suite(&grid))),
        timed("iterated convolution suite", 120_000, || suite(verify::iterated_suite(&Grid { samples: 8, ..grid.clone() }))),
        timed("averaging identity", 30_000, || suite(verify::fw_average_suite(&grid))),
        timed("energy suite", 60_000, energy),
        timed("regularize post-verification", 60_000, regularize_check),
        timed("extremal values", 120_000, extremal_values),
        timed("partition minimal numbers", 60_000, partition_values),
        timed("DHJ reduction soundness", 60_000, dhj_soundness),
        timed("bounds evaluator", 10_000, bounds_check),
        timed("pattern restriction suite", 120_000, patterns),
        timed("probabilistic certificates", 30_000, probability),
    ];
    let mut all = true;
    for (i, l) in lines.iter().enumerate() {
        let in_time = l.elapsed <= l.limit;
        let pass = l.ok && in_time;
        all &= pass;
        println!(
            "{} {:2} {}: {} ({:.3?} of {:?}{})",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            l.name,
            l.detail,
            l.elapsed,
            l.limit,
            if in_time { "" } else { ", over the limit" }
        );
    }
    assert!(all, "some acceptance criteria failed");
}
