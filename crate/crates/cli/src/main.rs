//! `csr`: validate, inspect and compare configuration structures.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use csr_core::corpus;
use csr_core::genprop::{run_law, HarnessParams, Law};
use csr_core::terms::translate_with;
use csr_core::{
    auto_concurrency, causality, check_with, depths, parse, transitions, validate_with,
    CheckOptions, ConfigStructure, Configuration, EquivalenceKind, Error, Limits,
};

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const CAPACITY_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "csr",
    version,
    about = "Stable configuration structures and reversible bisimulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Input {
    /// Structure file in the JSON exchange format.
    file: Option<PathBuf>,
    /// Term instead of a file, e.g. "a.b | c".
    #[arg(long, conflicts_with = "file")]
    term: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the stability axioms (exit 0 stable, 1 not stable).
    Validate(Input),
    /// List events and configurations, or the causal order and moves of one
    /// configuration.
    Info {
        #[command(flatten)]
        input: Input,
        /// Comma-separated event ids, `{}` for the empty configuration, or
        /// `all`.
        #[arg(long)]
        config: Option<String>,
    },
    /// Compare two structures (exit 0 equivalent, 1 inequivalent).
    Check {
        /// Equivalence to decide, or `all`.
        #[arg(long = "eq", default_value = "all")]
        eq: String,
        /// Structure files; the second file is the right input.
        files: Vec<PathBuf>,
        /// Left input as a term.
        #[arg(long)]
        term: Option<String>,
        /// Right input as a term.
        #[arg(long)]
        term2: Option<String>,
        /// Print a distinguishing strategy when inequivalent.
        #[arg(long)]
        witness: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in example pairs against their expected verdicts.
    Corpus,
    /// Test equivalence laws on generated instances (exit 0 without violations).
    Fuzz {
        /// Comma-separated law ids, or `all`.
        #[arg(long, default_value = "all")]
        laws: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_events: Option<usize>,
        /// Skip the built-in example pairs.
        #[arg(long)]
        no_corpus: bool,
        /// Directory for counterexample files.
        #[arg(long, default_value = "counterexamples")]
        out: PathBuf,
    },
    /// Translate a term into the exchange format.
    Translate {
        #[arg(long)]
        term: String,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

/// A command failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_capacity() {
                CAPACITY_ERROR
            } else {
                INPUT_ERROR
            },
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: INPUT_ERROR,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn limits() -> Result<Limits, Failure> {
    let mut limits = Limits::default();
    if let Ok(v) = std::env::var("CSR_MAX_EVENTS") {
        limits.max_events = v
            .trim()
            .parse()
            .map_err(|_| input_error(format!("CSR_MAX_EVENTS must be a number, got `{v}`")))?;
    }
    Ok(limits)
}

fn load_file(path: &Path, limits: &Limits) -> Result<ConfigStructure, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let s = ConfigStructure::from_json(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })?;
    limits.check(&s)?;
    Ok(s)
}

fn load_term(term: &str, limits: &Limits) -> Result<ConfigStructure, Failure> {
    Ok(translate_with(&parse(term)?, limits)?)
}

fn load(input: &Input, limits: &Limits) -> Result<ConfigStructure, Failure> {
    match (&input.term, &input.file) {
        (Some(t), _) => load_term(t, limits),
        (None, Some(p)) => load_file(p, limits),
        (None, None) => Err(input_error("expected a structure file or --term")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = limits().and_then(|limits| match cli.command {
        Command::Validate(input) => cmd_validate(&input, &limits),
        Command::Info { input, config } => cmd_info(&input, config.as_deref(), &limits),
        Command::Check {
            eq,
            files,
            term,
            term2,
            witness,
            json,
        } => cmd_check(
            &eq,
            &files,
            term.as_deref(),
            term2.as_deref(),
            witness,
            json,
            &limits,
        ),
        Command::Corpus => cmd_corpus(),
        Command::Fuzz {
            laws,
            count,
            seed,
            max_events,
            no_corpus,
            out,
        } => cmd_fuzz(&laws, count, seed, max_events, !no_corpus, &out, &limits),
        Command::Translate { term, output } => cmd_translate(&term, output.as_deref(), &limits),
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_validate(input: &Input, limits: &Limits) -> Outcome {
    let s = load(input, limits)?;
    let report = validate_with(&s, limits)?;
    print!("{}", report.render(&s));
    Ok(if report.stable() { OK } else { NEGATIVE })
}

fn parse_config(s: &ConfigStructure, text: &str) -> Result<Configuration, Failure> {
    let trimmed = text
        .trim()
        .trim_start_matches(['{', '['])
        .trim_end_matches(['}', ']']);
    let ids: Vec<&str> = trimmed
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    let set = s.event_set(&ids)?;
    if !s.contains(set) {
        return Err(input_error(format!(
            "{} is not a configuration",
            s.render(set)
        )));
    }
    Ok(set)
}

fn describe_configuration(s: &ConfigStructure, x: Configuration) -> Result<String, Failure> {
    let mut out = String::new();
    let id = |e: usize| s.event_id(e).as_str();
    let _ = writeln!(out, "configuration {}", s.render(x));
    let order = causality(s, x)?;
    let lt: Vec<String> = order
        .strict_pairs()
        .iter()
        .map(|&(d, e)| format!("{} < {}", id(d), id(e)))
        .collect();
    let _ = writeln!(
        out,
        "  order: {}",
        if lt.is_empty() {
            "-".to_string()
        } else {
            lt.join("; ")
        }
    );
    let co: Vec<String> = order
        .concurrent_pairs()
        .iter()
        .map(|&(d, e)| format!("{} co {}", id(d), id(e)))
        .collect();
    let _ = writeln!(
        out,
        "  concurrent: {}",
        if co.is_empty() {
            "-".to_string()
        } else {
            co.join("; ")
        }
    );
    let depth: Vec<String> = depths(s, x)?
        .iter()
        .map(|(e, k)| format!("{}:{k}", id(e)))
        .collect();
    let _ = writeln!(out, "  depths: {}", depth.join(" "));
    let _ = writeln!(out, "  moves:");
    for m in transitions::menu(s, x)? {
        let _ = writeln!(out, "    {}", m.render(s));
    }
    Ok(out)
}

fn cmd_info(input: &Input, config: Option<&str>, limits: &Limits) -> Outcome {
    let s = load(input, limits)?;
    let events: Vec<String> = (0..s.num_events())
        .map(|e| format!("{}:{}", s.event_id(e), s.label(e)))
        .collect();
    println!("events ({}): {}", s.num_events(), events.join(" "));
    println!("configurations ({}):", s.num_configurations());
    for &x in s.configurations() {
        println!("  {}", s.render(x));
    }
    let stable = validate_with(&s, limits)?.stable();
    if !stable {
        println!("not stable: causal order and moves are unavailable");
        return match config {
            Some(_) => Err(input_error("configuration details need a stable structure")),
            None => Ok(OK),
        };
    }
    let report = auto_concurrency(&s)?;
    let witness = |w: &Option<csr_core::order::AutoConcurrencyWitness>| match w {
        Some(w) => format!(
            "yes ({} co {} in {})",
            s.event_id(w.first),
            s.event_id(w.second),
            s.render(w.configuration)
        ),
        None => "no".to_string(),
    };
    println!("auto-concurrency: {}", witness(&report.auto_concurrency));
    println!(
        "equidepth auto-concurrency: {}",
        witness(&report.equidepth_auto_concurrency)
    );
    match config {
        None => {}
        Some("all") => {
            for &x in s.configurations() {
                print!("{}", describe_configuration(&s, x)?);
            }
        }
        Some(text) => {
            let x = parse_config(&s, text)?;
            print!("{}", describe_configuration(&s, x)?);
        }
    }
    Ok(OK)
}

fn check_inputs(
    files: &[PathBuf],
    term: Option<&str>,
    term2: Option<&str>,
    limits: &Limits,
) -> Result<(ConfigStructure, ConfigStructure), Failure> {
    // Positional files fill whichever sides have no term, left first.
    let mut files = files.iter().peekable();
    let mut side = |t: Option<&str>, name: &str| match (t, files.next_if(|_| t.is_none())) {
        (Some(t), _) => load_term(t, limits),
        (None, Some(p)) => load_file(p, limits),
        (None, None) => Err(input_error(format!("missing {name} input"))),
    };
    let left = side(term, "left")?;
    let right = side(term2, "right")?;
    if files.next().is_some() {
        return Err(input_error("too many inputs"));
    }
    Ok((left, right))
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    eq: &str,
    files: &[PathBuf],
    term: Option<&str>,
    term2: Option<&str>,
    witness: bool,
    json: bool,
    limits: &Limits,
) -> Outcome {
    let kinds: Vec<EquivalenceKind> = if eq.eq_ignore_ascii_case("all") {
        EquivalenceKind::ALL.to_vec()
    } else {
        vec![eq.parse().map_err(input_error)?]
    };
    let (c, d) = check_inputs(files, term, term2, limits)?;
    let options = CheckOptions {
        limits: *limits,
        witness,
        ..CheckOptions::default()
    };
    let verdicts = kinds
        .iter()
        .map(|&k| check_with(k, &c, &d, &options))
        .collect::<Result<Vec<_>, _>>()?;
    if json {
        let docs: Vec<serde_json::Value> = verdicts.iter().map(|v| v.to_json(&c, &d)).collect();
        let doc = if docs.len() == 1 {
            docs.into_iter().next().expect("one verdict")
        } else {
            serde_json::Value::Array(docs)
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("verdict serialises")
        );
    } else {
        for v in &verdicts {
            println!(
                "{}: {} (rounds {}, pairs {} -> {})",
                v.kind,
                if v.equivalent {
                    "equivalent"
                } else {
                    "inequivalent"
                },
                v.rounds,
                v.pairs_initial,
                v.pairs_final
            );
            if let Some(w) = &v.witness {
                for line in w.render(&c, &d).lines() {
                    println!("  {line}");
                }
            }
        }
    }
    Ok(if verdicts.iter().all(|v| v.equivalent) {
        OK
    } else {
        NEGATIVE
    })
}

fn cmd_corpus() -> Outcome {
    let mark = |b: bool| if b { "✓" } else { "✗" };
    let entries = corpus::entries();
    let width = entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
    let mut header = format!("{:width$}", "");
    for k in EquivalenceKind::ALL {
        let _ = write!(header, " {:>5}", k.name());
    }
    println!("{header}");
    let mut all_match = true;
    for e in &entries {
        let actual = e.run()?;
        let mut row = format!("{:width$}", e.name);
        for (i, &got) in actual.iter().enumerate() {
            let cell = if got == e.expected[i] {
                mark(got).to_string()
            } else {
                all_match = false;
                format!("{}!{}", mark(got), mark(e.expected[i]))
            };
            let _ = write!(row, " {cell:>5}");
        }
        println!("{row}");
    }
    for e in &entries {
        println!("{}: {} vs {}; {}", e.name, e.left, e.right, e.note);
    }
    if all_match {
        println!("all expectations met");
        Ok(OK)
    } else {
        println!("mismatches are marked actual!expected");
        Ok(NEGATIVE)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_fuzz(
    laws: &str,
    count: usize,
    seed: u64,
    max_events: Option<usize>,
    include_corpus: bool,
    out: &Path,
    limits: &Limits,
) -> Outcome {
    let laws: Vec<Law> = if laws.eq_ignore_ascii_case("all") {
        Law::ALL.to_vec()
    } else {
        laws.split(',')
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(input_error)?
    };
    let params = HarnessParams {
        count,
        seed,
        max_events,
        include_corpus,
        limits: *limits,
    };
    let mut violations = 0;
    for law in laws {
        let report = run_law(law, &params);
        println!("{}", report.summary());
        println!(
            "  {} equivalent under {}",
            report.equivalent,
            report.lead_kind()
        );
        for e in &report.capacity_errors {
            eprintln!("  capacity: {e}");
        }
        if report.skipped > 0 {
            println!(
                "  {} instances could not be generated under the law's filter",
                report.skipped
            );
        }
        if law == Law::RbHhNoEqac {
            println!(
                "  {} instances with auto-concurrency",
                report.with_auto_concurrency
            );
        }
        for s in &report.strictness {
            println!("  strict: {s}");
        }
        for f in &report.findings {
            println!("  finding: {f}");
        }
        for (i, v) in report.violations.iter().enumerate() {
            println!("  violation {}: {}", v.instance, v.message);
            let stem = format!("{}-{i}", law.id().replace(['=', '⊆', '<'], "_"));
            match write_counterexample(out, &stem, &v.left, &v.right) {
                Ok(paths) => println!("  written: {paths}"),
                Err(e) => eprintln!("  could not write counterexample: {e}"),
            }
        }
        violations += report.violations.len();
    }
    Ok(if violations == 0 { OK } else { NEGATIVE })
}

fn write_counterexample(
    dir: &Path,
    stem: &str,
    left: &ConfigStructure,
    right: &ConfigStructure,
) -> std::io::Result<String> {
    fs::create_dir_all(dir)?;
    let l = dir.join(format!("{stem}-left.cs"));
    let r = dir.join(format!("{stem}-right.cs"));
    fs::write(&l, left.to_json())?;
    fs::write(&r, right.to_json())?;
    Ok(format!("{} {}", l.display(), r.display()))
}

fn cmd_translate(term: &str, output: Option<&Path>, limits: &Limits) -> Outcome {
    let s = load_term(term, limits)?;
    match output {
        Some(path) => {
            fs::write(path, s.to_json())
                .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            println!(
                "{} events, {} configurations",
                s.num_events(),
                s.num_configurations()
            );
        }
        None => print!("{}", s.to_json()),
    }
    Ok(OK)
}
