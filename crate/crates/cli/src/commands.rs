use dcs_core::bounds::{self, eval, eval_tree, Mode, OracleTable, Outcome as BoundOutcome, Params, Val, CATALOG};
use dcs_core::convolution::ConvolutionMap;
use dcs_core::cs_tree::{CsTree, TreeDoc};
use dcs_core::error::Error;
use dcs_core::extremal::{
    dhj_reduce, extremal_free, extremal_free_brute, find_line, hyperedges, is_line_in, SearchBudget, Structure,
};
use dcs_core::partition::{
    cs_search, focus_construct, gr_search, hypergraph, minimal_number, Coloring, Focus, Statement,
};
use dcs_core::patterns::{HomogeneousCoding, PatternRestriction};
use dcs_core::rational::{display_rational, int, parse_rational, Rational};
use dcs_core::regularity::{extension, find_violation, regularize, LevelView, RegMode};
use dcs_core::verify::{run_suite, Grid, SUITES};
use dcs_core::words::{CombSubspace, VariableWord, Word};
use dcs_core::wordset::WordSet;
use serde::Deserialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::report::{Certificate, Inputs, Outcome, EXIT_ABSENT, EXIT_BUDGET, EXIT_OK};

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub exit: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            exit: crate::report::EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::Budget(_) => EXIT_BUDGET,
            Error::BestEffortFailure(_) => EXIT_ABSENT,
            _ => crate::report::EXIT_USAGE,
        };
        Self {
            exit,
            message: e.to_string(),
        }
    }
}

pub type Run = Result<Outcome, Failure>;

fn words_line(ws: &[Word]) -> String {
    ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn read_set(inputs: &mut Inputs, k: u32, path: &str) -> Result<WordSet, Failure> {
    let text = inputs.read(path).map_err(Failure::usage)?;
    let set = if text.trim_start().starts_with('[') {
        WordSet::parse_structured(k, &text)
    } else {
        WordSet::parse_text(k, &text)
    };
    set.map_err(|e| Failure::usage(format!("{path}: {e}")))
}

fn read_tree(inputs: &mut Inputs, path: &str) -> Result<CsTree, Failure> {
    let text = inputs.read(path).map_err(Failure::usage)?;
    TreeDoc::parse(&text).map_err(|e| Failure::usage(format!("{path}: {e}")))
}

fn read_oracles(inputs: &mut Inputs, path: Option<&str>) -> Result<OracleTable, Failure> {
    match path {
        Some(p) => {
            let text = inputs.read(p).map_err(Failure::usage)?;
            OracleTable::from_json(&text).map_err(|e| Failure::usage(format!("{p}: {e}")))
        }
        None => Ok(OracleTable::new()),
    }
}

fn rational(flag: &str, s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(|e| Failure::usage(format!("--{flag}: {e}")))
}

fn word(flag: &str, s: &str) -> Result<Word, Failure> {
    Word::parse(s).map_err(|e| Failure::usage(format!("--{flag}: {e}")))
}

pub fn convolve(k: u32, levels: &[usize], t: &str, x: &str, host: Option<&str>, inputs: &mut Inputs) -> Run {
    let host = host.map(|p| read_tree(inputs, p)).transpose()?;
    let map = ConvolutionMap::new(k, levels, host)?;
    let (t, x) = (word("t", t)?, word("x", x)?);
    let out = map.conv(&t, &x)?;
    Ok(Outcome::new(
        EXIT_OK,
        json!({"k": k, "levels": levels, "t": t.to_string(), "x": x.to_string(), "output": out.to_string()}),
    )
    .line(out.to_string()))
}

pub struct RegularizeArgs<'a> {
    pub k: u32,
    pub eps: &'a str,
    pub ell: usize,
    pub levels: &'a [usize],
    pub family: &'a [String],
    pub tau: Option<usize>,
    pub strict: bool,
}

pub fn regularize_cmd(a: RegularizeArgs, inputs: &mut Inputs) -> Run {
    if a.family.is_empty() {
        return Err(Failure::usage("--family: at least one word-set file is needed"));
    }
    let eps = rational("eps", a.eps)?;
    let family = a.family.iter().map(|p| read_set(inputs, a.k, p)).collect::<Result<Vec<_>, _>>()?;
    let mode = if a.strict { RegMode::Strict } else { RegMode::BestEffort };
    let reg = match regularize(&family, &eps, a.ell, a.levels, a.tau, mode) {
        Ok(r) => r,
        Err(Error::BestEffortFailure(why)) => {
            return Ok(Outcome::new(EXIT_ABSENT, json!({"levels": null, "reason": why}))
                .line(format!("no regular level set: {why}")));
        }
        Err(e) => return Err(e.into()),
    };
    let violation = find_violation(&family, &eps, &reg.levels, a.tau)?;
    let mut out = Outcome::new(
        EXIT_OK,
        json!({"levels": reg.levels, "path": reg.path, "blocks": reg.blocks, "regular": violation.is_none()}),
    )
    .line(format!("L={}", join(&reg.levels)))
    .line(format!("path: {}", serde_json::to_value(reg.path).expect("plain enum").as_str().unwrap_or("")));
    // One deviation certificate per member, level and subset of earlier levels.
    for (member, set) in family.iter().enumerate() {
        for (idx, &n) in reg.levels.iter().enumerate() {
            let bits = set.level_bits(n)?;
            let view = LevelView::new(a.k, n, &bits)?;
            let earlier = &reg.levels[..idx];
            for mask in 0u64..1 << earlier.len() {
                let subset: Vec<usize> = (0..earlier.len()).filter(|b| mask >> b & 1 == 1).map(|b| earlier[b]).collect();
                let coords = match a.tau {
                    Some(t) => extension(t, &subset),
                    None => subset.clone(),
                };
                let (dev, y) = view.max_deviation(&coords)?;
                out.cert(Certificate::new(
                    format!("member {member}, level {n}, I={{{}}}: max deviation at section {y}", join(&subset)),
                    &dev,
                    "<=",
                    &eps,
                ));
            }
        }
    }
    let all = out.certificates.iter().all(|c| c.holds);
    let n = out.certificates.len();
    Ok(out.line(format!("verified: {n} deviation bounds, all hold: {all}")))
}

pub fn search_line(k: u32, n: usize, set: &str, inputs: &mut Inputs) -> Run {
    let a = read_set(inputs, k, set)?;
    let (line, scanned) = find_line(&a, n);
    Ok(match line {
        Some(w) => {
            let ok = is_line_in(&a, &w);
            let points: Vec<Word> = (1..=k).map(|c| w.at(c)).collect();
            Outcome::new(EXIT_OK, json!({"line": w.to_string(), "points": points, "scanned": scanned, "verified": ok}))
                .line(format!("line {w}"))
                .line(format!("points: {}", words_line(&points)))
        }
        None => Outcome::new(EXIT_ABSENT, json!({"line": null, "scanned": scanned}))
            .line(format!("no line in [{k}]^{n}: {scanned} lines scanned")),
    })
}

#[derive(Deserialize)]
struct ColoringFile {
    r: u32,
    colors: Vec<u32>,
}

/// Colors in `1..=r` from SHA-256 of the seed and the domain index.
pub fn hashed_colors(seed: u64, r: u32, n: usize) -> Vec<u32> {
    (0..n)
        .map(|i| {
            let mut h = Sha256::new();
            h.update(seed.to_le_bytes());
            h.update((i as u64).to_le_bytes());
            let d = h.finalize();
            let v = u64::from_le_bytes(d[..8].try_into().expect("8 bytes"));
            1 + (v % r as u64) as u32
        })
        .collect()
}

pub struct SearchArgs<'a> {
    pub gr: bool,
    pub k: u32,
    pub dim: usize,
    pub m: usize,
    pub d: Option<usize>,
    pub coloring: Option<&'a str>,
    pub random_coloring: Option<u64>,
    pub r: Option<u32>,
    pub focus: Option<usize>,
    pub oracles: Option<&'a str>,
}

fn colors_for(a: &SearchArgs, n: usize, inputs: &mut Inputs) -> Result<(Vec<u32>, u32), Failure> {
    match (a.coloring, a.random_coloring) {
        (Some(path), None) => {
            let text = inputs.read(path).map_err(Failure::usage)?;
            let f: ColoringFile = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
            if f.colors.len() != n {
                return Err(Failure::usage(format!("{path}: {} colors for a domain of {n} objects", f.colors.len())));
            }
            Ok((f.colors, f.r))
        }
        (None, Some(seed)) => {
            let r = a.r.ok_or_else(|| Failure::usage("--random-coloring needs --r"))?;
            if r == 0 {
                return Err(Failure::usage("--r must be at least 1"));
            }
            Ok((hashed_colors(seed, r, n), r))
        }
        _ => Err(Failure::usage("give exactly one of --coloring FILE and --random-coloring SEED")),
    }
}

fn monochromatic<T: Ord + Clone>(c: &Coloring<T>, family: &[T]) -> bool {
    let colors: Vec<Option<u32>> = family.iter().map(|x| c.color_of(x)).collect();
    colors.iter().all(|x| x.is_some() && *x == colors[0])
}

pub fn search(a: SearchArgs, inputs: &mut Inputs) -> Run {
    let d = a.d.unwrap_or((a.m + 1).min(a.dim));
    if a.gr {
        let v = CombSubspace::cube(a.k, a.dim)?;
        let mut domain = v.subspaces(a.m as u32)?;
        domain.sort();
        let (colors, r) = colors_for(&a, domain.len(), inputs)?;
        let coloring = Coloring::new(domain.clone(), colors.clone(), r)?;
        let found = gr_search(&v, &coloring, a.m as u32, d as u32)?;
        let base = json!({"statement": "GR", "k": a.k, "dim": a.dim, "m": a.m, "d": d, "r": r, "domain": domain.len(), "colors": colors});
        return Ok(match found {
            Some(w) => {
                let ok = monochromatic(&coloring, &w.subspaces(a.m as u32)?);
                let mut res = base;
                res["witness"] = json!(w.generator().to_string());
                res["verified"] = json!(ok);
                Outcome::new(EXIT_OK, res).line(format!("witness {}", w.generator())).line(format!("verified: {ok}"))
            }
            None => Outcome::new(EXIT_ABSENT, base).line(format!("no monochromatic subspace of dimension {d}")),
        });
    }
    let w = CsTree::universe(a.k, a.dim)?;
    let domain = w.subtrees(a.m)?;
    let (colors, r) = colors_for(&a, domain.len(), inputs)?;
    let coloring = Coloring::new(domain.clone(), colors.clone(), r)?;
    let mut res = json!({"statement": "CS", "k": a.k, "dim": a.dim, "m": a.m, "d": d, "r": r, "domain": domain.len(), "colors": colors});
    let mut out = match cs_search(&w, &coloring, a.m, d)? {
        Some(u) => {
            let ok = monochromatic(&coloring, &u.subtrees(a.m)?) && u.is_subset_of(&w);
            res["witness"] = json!(TreeDoc::from_tree(&u));
            res["verified"] = json!(ok);
            Outcome::new(EXIT_OK, res).line(format!("witness {}", TreeDoc::to_json(&u))).line(format!("verified: {ok}"))
        }
        None => Outcome::new(EXIT_ABSENT, res).line(format!("no monochromatic subtree of dimension {d}")),
    };
    if let Some(q) = a.focus {
        let table = read_oracles(inputs, a.oracles)?;
        let f = focus_construct(&w, &coloring, a.m, q, &table)?;
        match &f {
            Focus::Built { ns, u, colors, .. } => {
                out.result["focus"] = json!({"status": "built", "ns": ns, "tree": TreeDoc::from_tree(u), "colors": colors});
                out.lines.push(format!("focus tree {} with depth colors {colors:?}", TreeDoc::to_json(u)));
            }
            Focus::Failed { ns, reason } => {
                out.result["focus"] = json!({"status": "failed", "ns": ns, "reason": reason});
                out.lines.push(format!("focus failed: {reason}"));
            }
        }
    }
    Ok(out)
}

fn parse_structure(s: &str) -> Result<Structure, Failure> {
    match s {
        "line" => Ok(Structure::Line),
        "cs-line" => Ok(Structure::CsTree(1)),
        _ => s
            .strip_prefix("cs-tree:")
            .and_then(|d| d.parse().ok())
            .filter(|&d: &usize| d >= 1)
            .map(Structure::CsTree)
            .ok_or_else(|| Failure::usage(format!("--structure: expected line, cs-line or cs-tree:D, got {s:?}"))),
    }
}

pub fn extremal(k: u32, levels: &[usize], structure: &str, brute: bool, budget: SearchBudget) -> Run {
    let st = parse_structure(structure)?;
    let e = extremal_free(k, levels, st, budget)?;
    let (universe, edges) = hyperedges(k, levels, st)?;
    let mask: u64 = e.witness.iter().map(|w| 1u64 << universe.binary_search(w).expect("witness in universe")).sum();
    let free = edges.iter().all(|&edge| mask & edge != edge);
    let mut res = json!({
        "k": k, "levels": levels, "structure": structure, "max": e.max,
        "witness": e.witness, "universe": e.universe, "structures": e.structures, "nodes": e.nodes, "witness_free": free,
    });
    let mut lines = vec![format!("max={}", e.max), format!("witness: {}", words_line(&e.witness)), format!("witness free: {free}")];
    if brute {
        let b = extremal_free_brute(k, levels, st)?;
        res["brute_max"] = json!(b.max);
        lines.push(format!("brute force max={}", b.max));
    }
    let mut out = Outcome::new(EXIT_OK, res);
    out.lines = lines;
    out.cert(Certificate::new("size of the witness", &int(e.witness.len() as u64), "=", &int(e.max as u64)));
    Ok(out)
}

pub fn minimal(gr: bool, k: u32, d: usize, m: usize, r: u32, nmax: usize, budget: SearchBudget) -> Run {
    let st = if gr { Statement::Gr } else { Statement::Cs };
    let rep = minimal_number(st, k, d, m, r, nmax, budget)?;
    // Every counterexample coloring is re-checked against the witness families.
    let mut checked = true;
    for h in &rep.hosts {
        if let Some(colors) = &h.counterexample {
            let g = hypergraph(st, k, d, m, h.n)?;
            checked &= colors.len() == g.domain
                && g.edges.iter().all(|e| e.iter().any(|&i| colors[i] != colors[e[0]]));
        }
    }
    let name = if gr { "GR" } else { "CS" };
    let mut out = Outcome::new(
        if rep.value.is_some() { EXIT_OK } else { EXIT_ABSENT },
        json!({"report": rep, "counterexamples_verified": checked}),
    );
    for h in &rep.hosts {
        out.lines.push(format!(
            "n={}: {} objects, {} families, {}",
            h.n,
            h.domain,
            h.families,
            if h.holds { "every coloring has a witness" } else { "bad coloring found" }
        ));
    }
    out.lines.push(match rep.value {
        Some(v) => format!("{name}({k},{d},{m},{r}) = {v}"),
        None => format!("{name}({k},{d},{m},{r}) > {nmax}"),
    });
    out.lines.push(format!("counterexamples verified: {checked}"));
    Ok(out)
}

pub struct BoundsArgs<'a> {
    pub name: &'a str,
    pub args: &'a [String],
    pub taus: &'a [u64],
    pub symbolic: bool,
    pub oracles: Option<&'a str>,
    pub cap_bits: u64,
}

pub fn bounds_eval(a: BoundsArgs, inputs: &mut Inputs) -> Run {
    let Some((_, spec)) = CATALOG.iter().find(|(n, _)| *n == a.name) else {
        return Err(Failure::usage(format!("unknown bound {:?}; try `bounds list`", a.name)));
    };
    let mut p = Params::new();
    for kv in a.args {
        let (key, v) = kv.split_once('=').ok_or_else(|| Failure::usage(format!("--arg: expected key=value, got {kv:?}")))?;
        p.insert(key.trim(), rational("arg", v)?);
    }
    p.taus = a.taus.to_vec();
    let table = read_oracles(inputs, a.oracles)?;
    let mode = if a.symbolic { Mode::Symbolic } else { Mode::Numeric };
    let shown = |v: &Val| match v {
        Val::Fin(r) => display_rational(r),
        other => other.to_string(),
    };
    match eval(a.name, &p, &table, mode, a.cap_bits)? {
        BoundOutcome::Value(v) => {
            let exit = if v == Val::Overflow { EXIT_BUDGET } else { EXIT_OK };
            Ok(Outcome::new(exit, json!({"name": a.name, "params": spec, "value": shown(&v)})).line(format!("{} = {}", a.name, shown(&v))))
        }
        BoundOutcome::Tree(e) => {
            let v = eval_tree(&e, &table, a.cap_bits);
            Ok(Outcome::new(
                EXIT_OK,
                json!({"name": a.name, "params": spec, "expression": e.to_string(), "nodes": e.node_count(), "leaves": e.leaves(), "value": shown(&v)}),
            )
            .line(format!("{} = {e}", a.name))
            .line(format!("value: {}", shown(&v))))
        }
    }
}

pub fn bounds_list() -> Run {
    let mut out = Outcome::new(EXIT_OK, json!(CATALOG.iter().map(|(n, s)| json!({"name": n, "params": s})).collect::<Vec<_>>()));
    for (n, s) in CATALOG {
        out.lines.push(format!("{n}: {s}"));
    }
    out.lines.push(format!("oracle names: {}", bounds::ORACLE_NAMES.join(", ")));
    Ok(out)
}

pub fn pattern_restrict(k: u32, p: &str, levels: &[usize], emit: &str, x: Option<&str>, line: Option<&str>, inputs: &mut Inputs) -> Run {
    let pw = VariableWord::parse(p).map_err(|e| Failure::usage(format!("--p: {e}")))?;
    let pr = PatternRestriction::new(k, pw, levels)?;
    let coded = pr.coded_levels();
    match emit {
        "levels" => {
            let mut out = Outcome::new(EXIT_OK, json!({}));
            let mut lv = Vec::new();
            out.lines.push(format!("coded levels: {}", join(&coded)));
            for i in 0..levels.len() {
                let ws = pr.level(i)?;
                out.lines.push(format!("R({i}) in level {}: {} words: {}", levels[i], ws.len(), words_line(&ws)));
                lv.push(json!({"level": levels[i], "coded_level": coded[i], "words": ws}));
            }
            out.result = json!({"k": k, "p": p, "levels": levels, "coded_levels": coded, "restriction": lv});
            Ok(out)
        }
        "phi" | "inverse" => {
            let x = word("x", x.ok_or_else(|| Failure::usage(format!("--emit {emit} needs --x")))?)?;
            let y = if emit == "phi" { pr.phi(&x)? } else { pr.phi_inverse(&x)? };
            let back = if emit == "phi" { pr.phi_inverse(&y)? } else { pr.phi(&y)? };
            Ok(Outcome::new(EXIT_OK, json!({"input": x.to_string(), "output": y.to_string(), "round_trip": back == x}))
                .line(y.to_string()))
        }
        "line" => {
            let path = line.ok_or_else(|| Failure::usage("--emit line needs --line FILE"))?;
            let t = read_tree(inputs, path)?;
            let (c, w) = pr.cs_image(&t)?;
            let mut image: Vec<Word> = t.points().iter().map(|x| pr.phi(x)).collect::<Result<_, _>>()?;
            image.sort();
            let mut expect: Vec<Word> = std::iter::once(c.clone()).chain((1..=k).map(|a| c.concat(&w.at(a)))).collect();
            expect.sort();
            let ok = image == expect;
            Ok(Outcome::new(EXIT_OK, json!({"c": c.to_string(), "w": w.to_string(), "image": image, "verified": ok}))
                .line(format!("c={c} w={w}"))
                .line(format!("verified: {ok}")))
        }
        _ => Err(Failure::usage(format!("--emit: expected levels, phi, inverse or line, got {emit:?}"))),
    }
}

pub fn hl_code(b: &[u32], text: &str, stem: Option<&str>, gens: &[String]) -> Run {
    let coding = HomogeneousCoding::new(b.to_vec())?;
    let s = coding.parse_word(text)?;
    let parts = coding.code(&s)?;
    let back = coding.decode(&parts)?;
    let shown: Vec<String> = parts.iter().map(|w| w.to_string()).collect();
    let mut out = Outcome::new(EXIT_OK, json!({"b": b, "word": coding.format_word(&s)?, "code": shown, "round_trip": back == s}))
        .line(format!("({})", shown.join(", ")));
    if let Some(c) = stem {
        let c = coding.parse_word(c)?;
        let ws = gens
            .iter()
            .map(|g| VariableWord::parse(g).map_err(|e| Failure::usage(format!("--gens: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let st = coding.strong_subtrees(&c, &ws)?;
        out.lines.push(format!("levels: {}", join(&st.levels)));
        out.lines.push(format!("product: {}, strong-subtree conditions: {}", st.product_ok, st.conditions_ok));
        out.result["strong_subtrees"] = json!(st);
    }
    Ok(out)
}

pub fn dhj(k: u32, n: usize, delta: &str, set: &str, budget: SearchBudget, inputs: &mut Inputs) -> Run {
    let a = read_set(inputs, k, set)?;
    let delta = rational("delta", delta)?;
    let red = dhj_reduce(&a, n, &delta, budget)?;
    let dens = a.level_density(n)?;
    let mut out = Outcome::new(
        EXIT_OK,
        json!({"ys": red.ys, "cs_line": red.cs_line, "line": red.line.as_ref().map(|w| w.to_string())}),
    );
    out.cert(Certificate::new(format!("density of A in [{k}]^{n}"), &dens, ">=", &delta));
    match &red.line {
        Some(w) => {
            let ok = is_line_in(&a, w);
            out.result["verified"] = json!(ok);
            out.lines.push(format!("line {w}"));
            out.lines.push(format!("verified: {ok}"));
        }
        None => {
            let (direct, _) = find_line(&a, n);
            out.exit = EXIT_ABSENT;
            out.result["direct_line"] = json!(direct.as_ref().map(|w| w.to_string()));
            out.lines.push("the reduction found no line".to_string());
            out.lines.push(match direct {
                Some(w) => format!("direct search finds {w}"),
                None => "direct search finds none".to_string(),
            });
        }
    }
    Ok(out)
}

/// The canonical suite for a name or one of its aliases.
pub fn suite_name(name: &str) -> Option<&'static str> {
    let canonical = match name {
        "fact-5.2" => "convolution-grid",
        "lemma-7.7" => "fw-average",
        "fact-3.4" => "energy",
        other => other,
    };
    SUITES.iter().copied().find(|s| *s == canonical)
}

pub struct VerifyArgs<'a> {
    pub suite: &'a str,
    pub ks: &'a [u32],
    pub max_l: usize,
    pub max_dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub n: Option<usize>,
}

pub fn verify(a: VerifyArgs) -> Run {
    let name = suite_name(a.suite)
        .ok_or_else(|| Failure::usage(format!("unknown suite {:?}; suites: {}", a.suite, SUITES.join(", "))))?;
    let grid = Grid {
        ks: a.ks.to_vec(),
        max_width: a.max_l,
        max_dim: a.max_dim,
        samples: a.samples,
        seed: a.seed,
    };
    let report = match (name, a.n) {
        ("energy", Some(n)) => dcs_core::verify::energy_suite(n.saturating_sub(1).min(3), n, 200, a.seed),
        _ => run_suite(name, &grid).expect("known suite"),
    };
    let mut out = Outcome::new(if report.passed() { EXIT_OK } else { EXIT_ABSENT }, json!(report));
    out.lines.push(report.summary());
    for (id, c) in &report.identities {
        out.lines.push(format!("  {id}: {c} checks"));
    }
    for e in &report.examples {
        out.lines.push(format!("  failed: {e}"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hashed_colors_stay_in_range() {
        let c = hashed_colors(7, 3, 100);
        assert!(c.iter().all(|&x| (1..=3).contains(&x)));
        assert_eq!(c, hashed_colors(7, 3, 100));
        assert!(c.iter().any(|&x| x != c[0]));
    }

    #[test]
    fn structures_parse() {
        assert_eq!(parse_structure("cs-line").unwrap(), Structure::CsTree(1));
        assert_eq!(parse_structure("cs-tree:2").unwrap(), Structure::CsTree(2));
        assert_eq!(parse_structure("line").unwrap(), Structure::Line);
        assert!(parse_structure("cs-tree:0").is_err());
    }

    #[test]
    fn aliases_resolve() {
        assert_eq!(suite_name("fact-5.2"), Some("convolution-grid"));
        assert_eq!(suite_name("energy"), Some("energy"));
        assert_eq!(suite_name("nope"), None);
    }
}
