mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use dcs_core::bounds::DEFAULT_CAP_BITS;
use dcs_core::extremal::SearchBudget;

use commands::Failure;
use report::{digest, Inputs, Outcome, RunReport, EXIT_ABSENT, EXIT_OK, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "dcs", version, about = "Desk-scale density Carlson-Simpson combinatorics")]
struct Cli {
    /// Print the full report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel searches and suites.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Search node budget.
    #[arg(long, global = true, env = "DCS_BUDGET_NODES", default_value_t = 1 << 32)]
    budget_nodes: u64,
    /// Search time budget in milliseconds.
    #[arg(long, global = true, env = "DCS_BUDGET_MS", default_value_t = 600_000)]
    budget_ms: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Cs,
    Gr,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate the convolution of t and x.
    Convolve {
        #[arg(long)]
        k: u32,
        #[arg(long = "L", value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Host tree document; the full tree when absent.
        #[arg(long)]
        host: Option<String>,
    },
    /// Find an ε-regular level set inside the candidate levels.
    Regularize {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        ell: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        /// A word-set file; repeat for families.
        #[arg(long, required = true)]
        family: Vec<String>,
        #[arg(long)]
        tau: Option<usize>,
        /// Refuse to run below the proven size instead of searching.
        #[arg(long)]
        strict: bool,
    },
    /// Find the least combinatorial line of [k]^n inside a set.
    SearchLine {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        set: String,
    },
    /// Find the least monochromatic subtree or subspace of a colored host.
    #[command(alias = "search-cstree")]
    Search {
        #[arg(value_enum, default_value = "cs")]
        kind: Kind,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        m: usize,
        /// Witness dimension; defaults to m+1, capped by dim.
        #[arg(long)]
        d: Option<usize>,
        /// JSON {"r": R, "colors": [...]} over the sorted m-dimensional objects.
        #[arg(long)]
        coloring: Option<String>,
        #[arg(long)]
        random_coloring: Option<u64>,
        #[arg(long)]
        r: Option<u32>,
        /// Also build the focused tree with this many extra levels.
        #[arg(long)]
        focus: Option<usize>,
        #[arg(long)]
        oracles: Option<String>,
    },
    /// Largest subset of the given levels free of a structure.
    Extremal {
        #[arg(long)]
        k: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        /// line, cs-line or cs-tree:D.
        #[arg(long)]
        structure: String,
        /// Cross-check by enumerating every subset.
        #[arg(long)]
        brute: bool,
    },
    /// Least host size at which every r-coloring has a witness.
    Minimal {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        nmax: usize,
    },
    /// Recursive bound formulas.
    Bounds {
        #[command(subcommand)]
        cmd: BoundsCmd,
    },
    /// Pattern restrictions and their coding maps.
    PatternRestrict {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: String,
        #[arg(long = "L", value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        /// levels, phi, inverse or line.
        #[arg(long, default_value = "levels")]
        emit: String,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Tree document of a line in the coded levels.
        #[arg(long)]
        line: Option<String>,
    },
    /// Code a word over a product alphabet as a tuple of words.
    HlCode {
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<u32>,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        /// Stem of a tree over the product alphabet whose images to check.
        #[arg(long, allow_hyphen_values = true)]
        stem: Option<String>,
        #[arg(long, value_delimiter = ',')]
        gens: Vec<String>,
    },
    /// Reduce a dense subset of [k]^n to a line.
    DhjReduce {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        set: String,
    },
    /// Run an identity suite.
    Verify {
        suite: String,
        #[arg(long, value_delimiter = ',', default_values_t = [2u32, 3])]
        k: Vec<u32>,
        #[arg(long = "maxL", default_value_t = 3)]
        max_l: usize,
        #[arg(long, default_value_t = 4)]
        max_dim: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest word length for the energy suite.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Re-run a JSON report from its embedded inputs and compare.
    Recheck { report: String },
}

#[derive(Subcommand, Debug)]
enum BoundsCmd {
    /// Evaluate a bound.
    Eval {
        name: String,
        /// key=value, with values as integers or p/q.
        #[arg(long = "arg")]
        args: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        taus: Vec<u64>,
        #[arg(long)]
        symbolic: bool,
        #[arg(long)]
        oracles: Option<String>,
        #[arg(long, default_value_t = DEFAULT_CAP_BITS)]
        cap_bits: u64,
    },
    /// List the bounds and their parameters.
    List,
}

fn dispatch(cli: &Cli, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let budget = SearchBudget {
        max_nodes: cli.budget_nodes,
        max_millis: cli.budget_ms,
    };
    match &cli.cmd {
        Cmd::Convolve { k, levels, t, x, host } => commands::convolve(*k, levels, t, x, host.as_deref(), inputs),
        Cmd::Regularize { k, eps, ell, levels, family, tau, strict } => commands::regularize_cmd(
            commands::RegularizeArgs {
                k: *k,
                eps,
                ell: *ell,
                levels,
                family,
                tau: *tau,
                strict: *strict,
            },
            inputs,
        ),
        Cmd::SearchLine { k, n, set } => commands::search_line(*k, *n, set, inputs),
        Cmd::Search { kind, k, dim, m, d, coloring, random_coloring, r, focus, oracles } => commands::search(
            commands::SearchArgs {
                gr: matches!(kind, Kind::Gr),
                k: *k,
                dim: *dim,
                m: *m,
                d: *d,
                coloring: coloring.as_deref(),
                random_coloring: *random_coloring,
                r: *r,
                focus: *focus,
                oracles: oracles.as_deref(),
            },
            inputs,
        ),
        Cmd::Extremal { k, levels, structure, brute } => commands::extremal(*k, levels, structure, *brute, budget),
        Cmd::Minimal { kind, k, d, m, r, nmax } => {
            commands::minimal(matches!(kind, Kind::Gr), *k, *d, *m, *r, *nmax, budget)
        }
        Cmd::Bounds { cmd: BoundsCmd::Eval { name, args, taus, symbolic, oracles, cap_bits } } => commands::bounds_eval(
            commands::BoundsArgs {
                name,
                args,
                taus,
                symbolic: *symbolic,
                oracles: oracles.as_deref(),
                cap_bits: *cap_bits,
            },
            inputs,
        ),
        Cmd::Bounds { cmd: BoundsCmd::List } => commands::bounds_list(),
        Cmd::PatternRestrict { k, p, levels, emit, x, line } => {
            commands::pattern_restrict(*k, p, levels, emit, x.as_deref(), line.as_deref(), inputs)
        }
        Cmd::HlCode { b, word, stem, gens } => commands::hl_code(b, word, stem.as_deref(), gens),
        Cmd::DhjReduce { k, n, delta, set } => commands::dhj(*k, *n, delta, set, budget, inputs),
        Cmd::Verify { suite, k, max_l, max_dim, samples, seed, n } => commands::verify(commands::VerifyArgs {
            suite,
            ks: k,
            max_l: *max_l,
            max_dim: *max_dim,
            samples: *samples,
            seed: *seed,
            n: *n,
        }),
        Cmd::Recheck { .. } => unreachable!("handled before dispatch"),
    }
}

/// Run one parsed command and assemble its report.
fn execute(cli: &Cli, argv: &[String], mut inputs: Inputs) -> Result<RunReport, Failure> {
    let start = Instant::now();
    let out = dispatch(cli, &mut inputs)?;
    let timing_ms = start.elapsed().as_millis() as u64;
    let lines = out.lines;
    if !cli.json {
        for l in &lines {
            println!("{l}");
        }
    }
    Ok(RunReport {
        command: argv.to_vec(),
        inputs_digest: digest(argv, &inputs.read),
        inputs: inputs.read,
        exit: out.exit,
        result: out.result,
        certificates: out.certificates,
        timing_ms,
    })
}

/// Re-run the command recorded in a report against its embedded inputs.
fn recheck(path: &str) -> Result<i32, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
    let old: RunReport = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
    let mut argv = old.command.clone();
    if !argv.iter().any(|a| a == "--json") {
        argv.push("--json".to_string());
    }
    let cli = Cli::try_parse_from(&argv).map_err(|e| Failure::usage(format!("recorded command: {e}")))?;
    if matches!(cli.cmd, Cmd::Recheck { .. }) {
        return Err(Failure::usage("a report of recheck cannot be rechecked"));
    }
    let new = match execute(&cli, &old.command, Inputs::embedded(old.inputs.clone())) {
        Ok(n) => n,
        Err(f) => {
            println!("recheck failed: the recorded command now fails: {}", f.message);
            return Ok(EXIT_ABSENT);
        }
    };
    let mut problems = Vec::new();
    if new.inputs_digest != old.inputs_digest {
        problems.push("inputs digest differs".to_string());
    }
    if new.exit != old.exit {
        problems.push(format!("exit code {} differs from recorded {}", new.exit, old.exit));
    }
    if new.result != old.result {
        problems.push("result differs".to_string());
    }
    if new.certificates != old.certificates {
        problems.push("certificates differ".to_string());
    }
    for c in old.certificates.iter().filter(|c| !c.recheck()) {
        problems.push(format!("certificate does not recompute: {}", c.claim));
    }
    let n = old.certificates.len();
    if problems.is_empty() {
        println!("recheck ok: result and {n} certificates reproduced");
        Ok(EXIT_OK)
    } else {
        for p in &problems {
            println!("recheck failed: {p}");
        }
        Ok(EXIT_ABSENT)
    }
}

fn main() -> ExitCode {
    // The program name is fixed so that digests do not depend on the install path.
    let argv: Vec<String> = std::iter::once("dcs".to_string()).chain(std::env::args().skip(1)).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("--threads: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    }
    let result = match &cli.cmd {
        Cmd::Recheck { report } => recheck(report),
        _ => execute(&cli, &argv, Inputs::disk()).map(|rep| {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&rep).expect("plain data"));
            }
            rep.exit
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.exit as u8)
        }
    }
}
