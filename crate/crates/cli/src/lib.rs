//! The `strat` command line: argument parsing, query execution and output
//! formatting, kept apart from the binary so it can be driven in tests.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use strat_core::ars::{Ars, ObjectId};
use strat_core::logical::{AcceptCondition, LogicalStrategy};
use strat_core::scenarios::TrafficArena;
use strat_core::spec_lang::{self, Diagnostic, Model, QueryKind};
use strat_core::strategy::{AbstractStrategy, Application, Member};
use strat_core::{IntensionalStrategy, MemoryClass, Outcome, Property};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTIC: i32 = 2;
pub const EXIT_FALSE: i32 = 3;

/// Used by `run` for queries that omit a bound.
pub const DEFAULT_BOUND: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "strat", version, about = "Strategies over abstract rewriting systems")]
pub struct Cli {
    /// One JSON record per result line.
    #[arg(long, global = true)]
    pub machine: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Document {
    /// Document to read.
    #[arg(short = 'f', long = "file")]
    pub file: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the derivations a strategy generates.
    Enumerate {
        #[command(flatten)]
        doc: Document,
        #[arg(short, long)]
        strategy: Option<String>,
        #[arg(long)]
        from: Option<String>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
    },
    /// Apply a strategy to one object.
    Apply {
        #[command(flatten)]
        doc: Document,
        #[arg(short, long)]
        strategy: String,
        #[arg(long)]
        from: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
    },
    /// Check a closure property of the materialized strategy.
    Check {
        #[command(flatten)]
        doc: Document,
        #[arg(short, long)]
        strategy: String,
        #[arg(long = "prop", value_enum)]
        prop: PropArg,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
    },
    /// Search for a lasso showing the accepted set is not closed.
    Witness {
        #[command(flatten)]
        doc: Document,
        #[arg(short, long)]
        strategy: String,
        #[arg(long)]
        from: Option<String>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
    },
    /// Run every query in a document.
    Run {
        #[command(flatten)]
        doc: Document,
    },
    /// Built-in scenarios.
    Scenario {
        #[command(subcommand)]
        scenario: Scenario,
    },
}

#[derive(Debug, Subcommand)]
pub enum Scenario {
    /// The two-signal intersection.
    Traffic {
        #[arg(long = "queue-bound", value_parser = clap::value_parser!(u64).range(1..=16))]
        queue_bound: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
        #[arg(long, value_enum, default_value_t = TrafficStrategy::Universal)]
        strategy: TrafficStrategy,
        #[arg(long, value_enum)]
        check: Option<TrafficCheck>,
        /// Print the scenario as a document instead of running it.
        #[arg(long = "emit-ars")]
        emit_ars: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PropArg {
    #[value(alias = "prefix-closed")]
    Prefix,
    #[value(alias = "factor-closed")]
    Factor,
    #[value(alias = "composition-closed")]
    Composition,
    Closed,
}

impl From<PropArg> for Property {
    fn from(p: PropArg) -> Property {
        match p {
            PropArg::Prefix => Property::PrefixClosed,
            PropArg::Factor => Property::FactorClosed,
            PropArg::Composition => Property::CompositionClosed,
            PropArg::Closed => Property::Closed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrafficStrategy {
    Safe,
    Universal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrafficCheck {
    Safety,
    Fairness,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}", render_diagnostics(.0))]
    Diagnostics(Vec<Diagnostic>),
    #[error("undefined strategy `{0}`")]
    UnknownStrategy(String),
    #[error("undeclared object `{0}`")]
    UnknownObject(String),
    #[error("{0} needs `from`")]
    MissingSource(&'static str),
    #[error("{0}")]
    Strategy(#[from] strat_core::strategy::StrategyError),
}

fn render_diagnostics(diags: &[Diagnostic]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

/// What a run produced: exit status and both streams.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// One machine-mode line; the field order is part of the format.
#[derive(Debug, Serialize)]
struct Record<'a> {
    kind: &'a str,
    verdict: Option<&'a str>,
    witness: Option<String>,
    count: Option<usize>,
}

struct Printer {
    machine: bool,
    out: String,
    failed: bool,
}

impl Printer {
    fn line(&mut self, text: &str) {
        if !self.machine {
            self.out.push_str(text);
            self.out.push('\n');
        }
    }

    fn record(&mut self, kind: &str, verdict: Option<&str>, witness: Option<String>, count: Option<usize>) {
        if self.machine {
            let rec = Record { kind, verdict, witness, count };
            let _ = writeln!(self.out, "{}", serde_json::to_string(&rec).expect("plain record"));
        }
    }
}

/// Parses `args` (program name first) and executes the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code: EXIT_DIAGNOSTIC, stdout: String::new(), stderr: text }
            } else {
                Output { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Output {
    let mut p = Printer { machine: cli.machine, out: String::new(), failed: false };
    match dispatch(&cli.command, &mut p) {
        Ok(()) => Output {
            code: if p.failed { EXIT_FALSE } else { EXIT_OK },
            stdout: p.out,
            stderr: String::new(),
        },
        Err(e) => Output { code: EXIT_DIAGNOSTIC, stdout: p.out, stderr: format!("{e}\n") },
    }
}

fn load(doc: &Document) -> Result<spec_lang::SpecDocument, CliError> {
    let text = std::fs::read_to_string(&doc.file).map_err(|source| CliError::Read { path: doc.file.clone(), source })?;
    spec_lang::parse(&text).map_err(CliError::Diagnostics)
}

fn strategy<'m>(model: &'m Model, name: &str) -> Result<&'m IntensionalStrategy, CliError> {
    model.strategy(name).ok_or_else(|| CliError::UnknownStrategy(name.to_string()))
}

fn object(ars: &Ars, name: &str) -> Result<ObjectId, CliError> {
    ars.object(name).ok_or_else(|| CliError::UnknownObject(name.to_string()))
}

/// The bounded object the checks run on: generated derivations plus, for a
/// memoryless strategy without acceptance, the lassos of its induced system.
fn materialize(ars: &Ars, xi: &IntensionalStrategy, depth: usize, sources: Option<&[ObjectId]>) -> AbstractStrategy {
    let z = xi.generate(ars, depth, sources);
    if matches!(xi, IntensionalStrategy::Accept(_)) || xi.memory_class() != MemoryClass::Memoryless {
        return z;
    }
    let lassos = xi.lassos_of_memoryless(ars).expect("memoryless");
    z.with_lassos(lassos.into_iter().filter(|l| sources.is_none_or(|s| s.contains(&l.source()))))
}

fn dispatch(cmd: &Command, p: &mut Printer) -> Result<(), CliError> {
    match cmd {
        Command::Enumerate { doc, strategy: s, from, depth } => {
            let doc = load(doc)?;
            let m = doc.model();
            let universal = IntensionalStrategy::Universal;
            let xi = match s {
                Some(name) => strategy(m, name)?,
                None => &universal,
            };
            let src = from.as_deref().map(|o| object(&m.ars, o)).transpose()?;
            enumerate(p, &m.ars, xi, *depth as usize, src);
        }
        Command::Apply { doc, strategy: s, from, depth } => {
            let doc = load(doc)?;
            let m = doc.model();
            apply(p, &m.ars, strategy(m, s)?, object(&m.ars, from)?, *depth as usize)?;
        }
        Command::Check { doc, strategy: s, prop, depth } => {
            let doc = load(doc)?;
            let m = doc.model();
            check(p, &m.ars, strategy(m, s)?, (*prop).into(), *depth as usize);
        }
        Command::Witness { doc, strategy: s, from, horizon } => {
            let doc = load(doc)?;
            let m = doc.model();
            let src = from.as_deref().map(|o| object(&m.ars, o)).transpose()?;
            witness(p, &m.ars, strategy(m, s)?, src, *horizon as usize);
        }
        Command::Run { doc } => {
            let doc = load(doc)?;
            let m = doc.model();
            for q in doc.queries() {
                let xi = match &q.strategy {
                    Some(name) => strategy(m, name)?.clone(),
                    None => IntensionalStrategy::Universal,
                };
                let src = q.from.as_deref().map(|o| object(&m.ars, o)).transpose()?;
                let depth = q.depth.unwrap_or(DEFAULT_BOUND);
                match q.kind {
                    QueryKind::Enumerate => enumerate(p, &m.ars, &xi, depth, src),
                    QueryKind::Apply => {
                        let src = src.ok_or(CliError::MissingSource("apply"))?;
                        apply(p, &m.ars, &xi, src, depth)?
                    }
                    QueryKind::Check(prop) => check(p, &m.ars, &xi, prop, depth),
                    QueryKind::Witness => witness(p, &m.ars, &xi, src, q.horizon.unwrap_or(DEFAULT_BOUND)),
                }
            }
        }
        Command::Scenario { scenario: Scenario::Traffic { queue_bound, depth, strategy, check, emit_ars } } => {
            traffic(p, *queue_bound as usize, *depth as usize, *strategy, *check, *emit_ars);
        }
    }
    Ok(())
}

fn enumerate(p: &mut Printer, ars: &Ars, xi: &IntensionalStrategy, depth: usize, src: Option<ObjectId>) {
    let sources = src.map(|a| vec![a]);
    let z = xi.generate(ars, depth, sources.as_deref());
    for line in z.render(ars) {
        p.line(&line);
    }
    p.line(&format!("COUNT={}", z.len()));
    p.record("enumerate", None, None, Some(z.len()));
}

fn apply(p: &mut Printer, ars: &Ars, xi: &IntensionalStrategy, a: ObjectId, depth: usize) -> Result<(), CliError> {
    let z = materialize(ars, xi, depth, Some(&[a]));
    let Application { outcome, witnesses } = z.apply(ars, a)?;
    let first = witnesses.first().map(|w: &Member| w.render(ars));
    match outcome {
        Outcome::Applies(targets) => {
            let names: Vec<&str> = targets.iter().map(|&o| ars.object_name(o)).collect();
            p.line(&format!("{{{}}}", names.join(", ")));
            p.record("apply", Some("applies"), first, Some(targets.len()));
        }
        Outcome::Fails => {
            p.line("FAILS");
            p.record("apply", Some("fails"), None, Some(0));
        }
        Outcome::Indeterminate => {
            p.line("INDETERMINATE");
            p.record("apply", Some("indeterminate"), first, Some(0));
        }
    }
    Ok(())
}

fn check(p: &mut Printer, ars: &Ars, xi: &IntensionalStrategy, prop: Property, depth: usize) {
    let z = materialize(ars, xi, depth, None);
    let verdict = z.check(prop);
    report_property(p, "check", verdict.violation.as_ref().map(|v| ars.render(v.missing())), z.len());
}

fn report_property(p: &mut Printer, kind: &str, witness: Option<String>, count: usize) {
    match witness {
        None => {
            p.line("PROPERTY=true");
            p.record(kind, Some("true"), None, Some(count));
        }
        Some(w) => {
            p.failed = true;
            p.line("PROPERTY=false");
            p.line(&format!("WITNESS={w}"));
            p.record(kind, Some("false"), Some(w), Some(count));
        }
    }
}

fn logical(xi: &IntensionalStrategy) -> LogicalStrategy {
    match xi {
        IntensionalStrategy::Accept(ls) => (**ls).clone(),
        other => LogicalStrategy::new(other.clone(), AcceptCondition::True),
    }
}

fn witness(p: &mut Printer, ars: &Ars, xi: &IntensionalStrategy, src: Option<ObjectId>, horizon: usize) {
    let sources = src.map(|a| vec![a]);
    let found = logical(xi).nonclosed_witness(ars, horizon, sources.as_deref());
    report_witness(p, found.map(|l| ars.render_lasso(&l)));
}

fn report_witness(p: &mut Printer, found: Option<String>) {
    match found {
        Some(w) => {
            p.failed = true;
            p.line(&format!("WITNESS={w}"));
            p.record("witness", Some("found"), Some(w), Some(1));
        }
        None => {
            p.line("NO_WITNESS_UP_TO_HORIZON");
            p.record("witness", Some("none"), None, Some(0));
        }
    }
}

fn traffic(p: &mut Printer, q: usize, depth: usize, which: TrafficStrategy, check: Option<TrafficCheck>, emit: bool) {
    let arena = TrafficArena::new(q);
    if emit {
        p.out.push_str(&arena.document());
        return;
    }
    let ars = arena.ars();
    let xi = match which {
        TrafficStrategy::Safe => arena.never_both_green_strategy(),
        TrafficStrategy::Universal => IntensionalStrategy::Universal,
    };
    let good: Vec<ObjectId> = ars.objects().filter(|&o| !arena.state(o).both_green()).collect();
    p.line(&format!("OBJECTS={}", ars.object_count()));
    p.line(&format!("STEPS={}", ars.steps().len()));
    match check {
        None => {
            let z = xi.finite_support(ars, depth, Some(&good));
            p.line(&format!("COUNT={}", z.len()));
            p.record("scenario", None, None, Some(z.len()));
        }
        Some(TrafficCheck::Safety) => {
            let z = xi.finite_support(ars, depth, Some(&good));
            let safe = LogicalStrategy::new(xi, arena.safety_condition());
            let bad = z.finite_part().iter().find(|d| !safe.accepts(d)).map(|d| ars.render(d));
            report_property(p, "safety", bad, z.len());
        }
        Some(TrafficCheck::Fairness) => {
            let found = LogicalStrategy::new(xi, arena.fairness_condition()).nonclosed_witness(
                ars,
                depth,
                Some(&[arena.unfair_start()]),
            );
            report_witness(p, found.map(|l| ars.render_lasso(&l)));
        }
    }
}
