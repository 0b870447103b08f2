use std::io::{self, BufRead, BufWriter, Write};
use std::process::ExitCode;

use carev::decider::{decide_range_with, DecideOptions, Witness};
use carev::evolution::{step_aligned, Alignment, Configuration};
use carev::infinite::infinite_injective;
use carev::oracle::{oracle_with, OracleOptions};
use carev::report::{
    CheckRecord, EvolveRecord, GenRecord, InfiniteRecord, OracleRecord, SCHEMA_VERSION,
};
use carev::strategies::{enumerate_strategy, sample_strategy, Family, Strategy};
use carev::{export_dot, DeBruijnGraph, Execution, Rule, States, Verdict};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Reversibility of 1-D three-neighbourhood cellular automata on rings.
#[derive(Parser)]
#[command(name = "carev", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide reversibility for one ring length or a range.
    Check(CheckArgs),
    /// Print a configuration's trajectory.
    Evolve(EvolveArgs),
    /// List rules from a strategy family.
    Gen(GenArgs),
    /// Brute-force summary of the global map.
    Oracle(OracleArgs),
    /// Injectivity on the bi-infinite lattice.
    Infinite(RuleArgs),
    /// The de Bruijn graph in DOT format.
    Dot(RuleArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct RuleArgs {
    /// Rule table as d³ digits (rightmost is RMT 0) or comma-separated values.
    #[arg(long)]
    rule: String,
    #[arg(long, default_value_t = 3)]
    states: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct CheckArgs {
    /// Rule table; read one rule per line from stdin when omitted.
    #[arg(long)]
    rule: Option<String>,
    #[arg(long, default_value_t = 3)]
    states: usize,
    #[arg(
        long,
        conflicts_with = "cells_range",
        required_unless_present = "cells_range"
    )]
    cells: Option<usize>,
    /// Inclusive range `lo:hi`.
    #[arg(long, value_parser = parse_range)]
    cells_range: Option<(usize, usize)>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cap on distinct interior nodes explored.
    #[arg(long, env = "CAREV_NODE_BUDGET", default_value_t = carev::DEFAULT_NODE_BUDGET)]
    node_budget: usize,
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long)]
    rule: String,
    #[arg(long, default_value_t = 3)]
    states: usize,
    /// Initial configuration, one digit per cell.
    #[arg(long)]
    config: String,
    #[arg(long, default_value_t = 1)]
    steps: usize,
    /// Use the centred update `c'[i] = f(c[i−1], c[i], c[i+1])`.
    #[arg(long)]
    centered: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_strategy)]
    strategy: Strategy,
    #[arg(long, default_value_t = 3)]
    states: usize,
    #[arg(long, conflicts_with = "sample", required_unless_present = "sample")]
    all: bool,
    /// Number of distinct rules to draw.
    #[arg(long, requires = "seed")]
    sample: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    rule: String,
    #[arg(long, default_value_t = 3)]
    states: usize,
    #[arg(long)]
    cells: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest dⁿ the oracle will enumerate.
    #[arg(long, env = "CAREV_ORACLE_BUDGET", default_value_t = carev::DEFAULT_ORACLE_BUDGET)]
    oracle_budget: u64,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi = hi.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: carev::Error| e.to_string())
}

enum Failure {
    Usage(String),
    Resource(String),
    Io(io::Error),
}

impl From<carev::Error> for Failure {
    fn from(e: carev::Error) -> Self {
        if e.is_budget() {
            Failure::Resource(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<ExitCode, Failure>;

fn states(d: usize) -> Result<States, Failure> {
    Ok(States::new(d)?)
}

fn json_line(out: &mut impl Write, value: &impl serde::Serialize) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)
}

fn describe(witness: &Witness) -> String {
    match witness {
        Witness::Unbalanced { histogram } => format!("unbalanced rule, state counts {histogram:?}"),
        Witness::Cardinality {
            level,
            node,
            edge_state,
            found,
            expected,
        } => format!(
            "{edge_state}-edge at level {level} carries {found} RMTs, needs {expected}; node {node}"
        ),
        Witness::Complete => "every edge carries the required RMT count".into(),
    }
}

fn print_check(
    out: &mut impl Write,
    rule: &Rule,
    verdicts: &[Verdict],
    format: Format,
    multi: bool,
) -> io::Result<()> {
    if format == Format::Json {
        return json_line(out, &CheckRecord::new(rule, verdicts));
    }
    if multi {
        writeln!(out, "{rule}")?;
    }
    if let [v] = verdicts {
        writeln!(
            out,
            "{}",
            if v.is_reversible() {
                "Reversible"
            } else {
                "Irreversible"
            }
        )?;
        if !v.is_reversible() {
            writeln!(out, "witness: {}", describe(&v.witness))?;
        }
        return Ok(());
    }
    for v in verdicts {
        let word = if v.is_reversible() {
            "Reversible"
        } else {
            "Irreversible"
        };
        writeln!(out, "n={:<6} {word}", v.n)?;
    }
    Ok(())
}

fn check(args: CheckArgs, out: &mut impl Write) -> Outcome {
    let s = states(args.states)?;
    let (lo, hi) = match (args.cells, args.cells_range) {
        (Some(n), None) => (n, n),
        (None, Some(range)) => range,
        _ => {
            return Err(Failure::Usage(
                "give exactly one of --cells and --cells-range".into(),
            ))
        }
    };
    let texts: Vec<String> = match args.rule {
        Some(r) => vec![r],
        None => io::stdin()
            .lock()
            .lines()
            .map(|l| l.map(|l| l.trim().to_owned()))
            .filter(|l| !matches!(l, Ok(l) if l.is_empty()))
            .collect::<io::Result<_>>()?,
    };
    if texts.is_empty() {
        return Err(Failure::Usage("no rule given on --rule or stdin".into()));
    }
    let options = DecideOptions {
        node_budget: args.node_budget,
    };
    let multi = texts.len() > 1;
    let mut all_reversible = true;
    for text in &texts {
        let rule = Rule::parse(text, s)?;
        let verdicts = decide_range_with(&rule, lo, hi, options, Execution::default())?;
        all_reversible &= verdicts.iter().all(Verdict::is_reversible);
        print_check(out, &rule, &verdicts, args.format, multi)?;
    }
    Ok(ExitCode::from(if all_reversible { 0 } else { 1 }))
}

fn evolve(args: EvolveArgs, out: &mut impl Write) -> Outcome {
    let s = states(args.states)?;
    let rule = Rule::parse(&args.rule, s)?;
    let alignment = if args.centered {
        Alignment::Centered
    } else {
        Alignment::Window
    };
    let mut c = Configuration::parse(&args.config, s)?;
    let mut trace = vec![c.to_digits()];
    for _ in 0..args.steps {
        c = step_aligned(&rule, &c, alignment)?;
        trace.push(c.to_digits());
    }
    match args.format {
        Format::Json => json_line(
            out,
            &EvolveRecord {
                schema_version: SCHEMA_VERSION,
                rule: rule.to_digits(),
                d: rule.d(),
                centered: args.centered,
                trace,
            },
        )?,
        Format::Text => {
            for (t, c) in trace.iter().enumerate() {
                writeln!(out, "{t} {c}")?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn gen(args: GenArgs, out: &mut impl Write) -> Outcome {
    let s = states(args.states)?;
    let family_size = Family::new(args.strategy, s).size();
    let (rules, clipped): (Box<dyn Iterator<Item = Rule>>, bool) =
        match (args.all, args.sample, args.seed) {
            (true, _, _) => (Box::new(enumerate_strategy(args.strategy, s)), false),
            (false, Some(count), Some(seed)) => {
                let sample = sample_strategy(args.strategy, s, count, seed);
                (Box::new(sample.rules.into_iter()), sample.clipped)
            }
            _ => return Err(Failure::Usage("give --all or --sample N --seed S".into())),
        };
    match args.format {
        Format::Text => {
            for r in rules {
                writeln!(out, "{r}")?;
            }
        }
        Format::Json => json_line(
            out,
            &GenRecord {
                schema_version: SCHEMA_VERSION,
                strategy: args.strategy.to_string(),
                d: s.get(),
                family_size: family_size.to_string(),
                clipped,
                rules: rules.map(|r| r.to_digits()).collect(),
            },
        )?,
    }
    Ok(ExitCode::SUCCESS)
}

fn oracle(args: OracleArgs, out: &mut impl Write) -> Outcome {
    let rule = Rule::parse(&args.rule, states(args.states)?)?;
    let options = OracleOptions {
        budget: args.oracle_budget,
        exec: Execution::default(),
    };
    let summary = oracle_with(&rule, args.cells, options)?;
    match args.format {
        Format::Json => json_line(out, &OracleRecord::new(&rule, summary))?,
        Format::Text => {
            writeln!(
                out,
                "{}",
                if summary.bijective {
                    "bijective"
                } else {
                    "not bijective"
                }
            )?;
            writeln!(out, "image size: {}", summary.image_size)?;
            writeln!(out, "max predecessors: {}", summary.max_indegree)?;
        }
    }
    Ok(ExitCode::from(if summary.bijective { 0 } else { 1 }))
}

fn infinite(args: RuleArgs, out: &mut impl Write) -> Outcome {
    let rule = Rule::parse(&args.rule, states(args.states)?)?;
    let report = infinite_injective(&rule);
    let record = InfiniteRecord::new(&rule, &report);
    match args.format {
        Format::Json => json_line(out, &record)?,
        Format::Text => {
            writeln!(out, "{report}")?;
            if let Some(w) = record.witness {
                writeln!(out, "off-diagonal pair: {}", w.off_diagonal)?;
                writeln!(out, "entry cycle: {}", w.entry_cycle.join(" "))?;
                writeln!(out, "path: {}", w.path.join(" "))?;
                writeln!(out, "exit cycle: {}", w.exit_cycle.join(" "))?;
            }
        }
    }
    Ok(ExitCode::from(if report.injective { 0 } else { 1 }))
}

fn dot(args: RuleArgs, out: &mut impl Write) -> Outcome {
    let rule = Rule::parse(&args.rule, states(args.states)?)?;
    write!(out, "{}", export_dot(&DeBruijnGraph::new(&rule)))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = match cli.command {
        Command::Check(a) => check(a, &mut out),
        Command::Evolve(a) => evolve(a, &mut out),
        Command::Gen(a) => gen(a, &mut out),
        Command::Oracle(a) => oracle(a, &mut out),
        Command::Infinite(a) => infinite(a, &mut out),
        Command::Dot(a) => dot(a, &mut out),
    };
    let result = result.and_then(|code| out.flush().map(|_| code).map_err(Failure::Io));
    match result {
        Ok(code) => code,
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
