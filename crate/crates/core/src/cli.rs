//! Command-line front end.
//!
//! `run` takes the argument list and two sinks so it can be driven
//! in-process by tests; `main.rs` only wires it to the real streams.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::automata::Nfa;
use crate::engine::{
    decide_inclusion_antichain_with, decide_inclusion_word_with, EngineOptions, ProfileKind,
    PruneMode, Stats, TraceEvent, Verdict, DEFAULT_ITERATION_CAP,
};
use crate::foundations::Alphabet;
use crate::grammar::Cfg;
use crate::oracle::{brute_inclusion, enumerate_words, BruteVerdict, EnumerationBudget};
use crate::quasiorders::{QuasiorderInstance, QuasiorderKind};
use crate::saturation::{decide_slp_inclusion, saturate, DEFAULT_EXPANSION_CAP};
use crate::{Error, Result};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

pub const TRACE_HEADER: &str = "trace-v1";

#[derive(Parser, Debug)]
#[command(name = "langinc", version, about = "Decide L(G) ⊆ L(A) for a context-free grammar G and a finite automaton A")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide inclusion.
    Check(CheckArgs),
    /// Brute-force helpers for manual inspection.
    #[command(subcommand)]
    Debug(DebugCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    Word,
    Antichain,
    Saturation,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OrderChoice {
    Ctx,
    Post,
    Myhill,
    Nerode,
    Auto,
}

impl OrderChoice {
    fn kind(self) -> Option<QuasiorderKind> {
        match self {
            OrderChoice::Ctx => Some(QuasiorderKind::StateCtx),
            OrderChoice::Post => Some(QuasiorderKind::StatePost),
            OrderChoice::Myhill => Some(QuasiorderKind::Myhill),
            OrderChoice::Nerode => Some(QuasiorderKind::Nerode),
            OrderChoice::Auto => None,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct CheckArgs {
    #[arg(long = "grammar")]
    pub grammar_path: PathBuf,
    #[arg(long = "automaton")]
    pub automaton_path: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub engine: EngineChoice,
    #[arg(long, value_enum, default_value = "auto")]
    pub order: OrderChoice,
    /// Keep only minimal words of each iterate (word engine).
    #[arg(long)]
    pub prune: bool,
    #[arg(long)]
    pub stats: bool,
    #[arg(long)]
    pub trace: bool,
    #[arg(long, default_value_t = DEFAULT_ITERATION_CAP)]
    pub iteration_cap: usize,
    #[arg(long, default_value_t = DEFAULT_EXPANSION_CAP)]
    pub expansion_cap: u64,
}

/// A `check` invocation with every `auto` resolved.
pub type RunConfig = CheckArgs;

#[derive(Subcommand, Debug)]
enum DebugCommand {
    /// List the words of L(G) up to a length.
    Enumerate {
        #[arg(long)]
        grammar: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = usize::MAX)]
        max_count: usize,
    },
    /// Bounded inclusion check by enumeration.
    Brute {
        #[arg(long)]
        grammar: PathBuf,
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Print the transitions added by saturation.
    Saturate {
        #[arg(long)]
        grammar: PathBuf,
        #[arg(long)]
        automaton: PathBuf,
    },
}

/// Runs the CLI and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match cli.command {
        Command::Check(args) => check(&args),
        Command::Debug(cmd) => debug(cmd),
    };
    match result {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Input(_) => EXIT_INPUT,
        Error::Resource(_) => EXIT_RESOURCE,
        Error::Invariant(_) => EXIT_INTERNAL,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}

/// Loads both inputs over a common alphabet: the automaton's symbols first,
/// then any extra terminals of the grammar.
pub fn load_inputs(grammar: &Path, automaton: &Path) -> Result<(Cfg, Nfa)> {
    let a_text = read(automaton)?;
    let g_text = read(grammar)?;
    let a = Nfa::parse(&a_text).map_err(|e| with_path(automaton, e))?;
    let g = Cfg::parse_with_alphabet(&g_text, a.alphabet()).map_err(|e| with_path(grammar, e))?;
    let a = a.with_alphabet(g.alphabet())?;
    Ok((g, a))
}

/// Resolves `auto` choices and rejects unsupported combinations.
pub fn resolve(args: &CheckArgs, g: &Cfg) -> Result<RunConfig> {
    let mut cfg = args.clone();
    if cfg.engine == EngineChoice::Auto {
        cfg.engine = if g.is_slp() {
            EngineChoice::Saturation
        } else {
            EngineChoice::Antichain
        };
    }
    match cfg.engine {
        EngineChoice::Saturation => {
            if !g.is_slp() {
                return Err(Error::input("the saturation engine requires a straight-line grammar"));
            }
            if cfg.order != OrderChoice::Auto {
                return Err(Error::input("the saturation engine does not use a quasiorder"));
            }
        }
        EngineChoice::Antichain => {
            if matches!(cfg.order, OrderChoice::Myhill | OrderChoice::Nerode) {
                return Err(Error::input("the antichain engine needs --order ctx or post"));
            }
        }
        _ => {}
    }
    if cfg.order == OrderChoice::Auto && cfg.engine != EngineChoice::Saturation {
        cfg.order = if cfg.engine == EngineChoice::Word && g.is_right_regular() {
            OrderChoice::Post
        } else {
            OrderChoice::Ctx
        };
    }
    if matches!(cfg.order, OrderChoice::Post | OrderChoice::Nerode) && !g.is_right_regular() {
        return Err(Error::input(format!(
            "--order {} requires a right-regular grammar",
            cfg.order.kind().map_or("auto", |k| k.name())
        )));
    }
    Ok(cfg)
}

fn check(args: &CheckArgs) -> Result<(String, i32)> {
    let (g, a) = load_inputs(&args.grammar_path, &args.automaton_path)?;
    let cfg = resolve(args, &g)?;
    let opts = EngineOptions {
        iteration_cap: cfg.iteration_cap,
        ..EngineOptions::default()
    };
    let mut out = String::new();
    if cfg.trace {
        out.push_str(TRACE_HEADER);
        out.push('\n');
    }
    let alphabet = g.alphabet().clone();
    let tracing = cfg.trace;
    let mut sink = |ev: TraceEvent<'_>| {
        if tracing {
            out.push_str(&trace_line(&alphabet, &ev));
            out.push('\n');
        }
    };
    let verdict: Verdict = match cfg.engine {
        EngineChoice::Word => {
            let kind = cfg.order.kind().expect("resolved");
            let q = QuasiorderInstance::new(kind, &a)?;
            let prune = if cfg.prune { PruneMode::Antichain } else { PruneMode::None };
            decide_inclusion_word_with(&g, &q, &a, prune, &opts, &mut sink)?
        }
        EngineChoice::Antichain => {
            let kind = ProfileKind::from_order(cfg.order.kind().expect("resolved"))?;
            decide_inclusion_antichain_with(&g, &a, kind, &opts, &mut sink)?
        }
        EngineChoice::Saturation => decide_slp_inclusion(&g, &a, cfg.expansion_cap)?,
        EngineChoice::Auto => unreachable!("resolved"),
    };
    out.push_str(&render_verdict(&alphabet, &verdict));
    if cfg.stats {
        out.push_str(&render_stats(&verdict.stats));
    }
    Ok((out, if verdict.holds { EXIT_HOLDS } else { EXIT_FAILS }))
}

/// One trace line. Word sets are listed longest first, the way iterates
/// are usually written out by hand.
pub fn trace_line(alphabet: &Alphabet, ev: &TraceEvent<'_>) -> String {
    match ev {
        TraceEvent::Iterate { index, start_component } => {
            let mut words: Vec<_> = start_component.iter().collect();
            words.sort_by(|x, y| y.cmp(x));
            let items: Vec<String> = words.iter().map(|w| alphabet.render(w)).collect();
            format!("iterate {index}: {{{}}}", items.join(", "))
        }
        TraceEvent::Antichain { index, sizes } => {
            let mut line = format!("iterate {index}: sizes");
            for s in sizes {
                let _ = write!(line, " {s}");
            }
            line
        }
    }
}

pub fn render_verdict(alphabet: &Alphabet, v: &Verdict) -> String {
    if v.holds {
        return "INCLUSION HOLDS\n".to_string();
    }
    match &v.counterexample {
        Some(w) => format!("INCLUSION FAILS\ncounterexample: {}\n", alphabet.render(w)),
        None => "INCLUSION FAILS\ncounterexample: (unavailable, exceeds expansion cap)\n".to_string(),
    }
}

pub fn render_stats(s: &Stats) -> String {
    format!(
        "iterations={}\nf_applications={}\nwords_generated={}\ncomparisons={}\nmembership_queries={}\npruned={}\n",
        s.iterations, s.f_applications, s.words_generated, s.comparisons, s.membership_queries, s.pruned
    )
}

fn debug(cmd: DebugCommand) -> Result<(String, i32)> {
    let mut out = String::new();
    match cmd {
        DebugCommand::Enumerate { grammar, max_len, max_count } => {
            let g = Cfg::parse(&read(&grammar)?).map_err(|e| with_path(&grammar, e))?;
            let e = enumerate_words(&g, EnumerationBudget::new(max_len, max_count)?);
            for w in &e.words {
                let _ = writeln!(out, "{}", g.alphabet().render(w));
            }
            if e.truncated {
                out.push_str("(truncated)\n");
            }
        }
        DebugCommand::Brute { grammar, automaton, max_len } => {
            let (g, a) = load_inputs(&grammar, &automaton)?;
            match brute_inclusion(&g, &a, EnumerationBudget::up_to(max_len)) {
                BruteVerdict::HoldsUpToBound => {
                    let _ = writeln!(out, "HOLDS UP TO LENGTH {max_len}");
                }
                BruteVerdict::Fails(w) => {
                    let _ = writeln!(out, "FAILS\ncounterexample: {}", g.alphabet().render(&w));
                }
            }
        }
        DebugCommand::Saturate { grammar, automaton } => {
            let (g, a) = load_inputs(&grammar, &automaton)?;
            let sat = saturate(&a, &g)?;
            for (p, x, q) in sat.added() {
                let _ = writeln!(out, "{} {} {}", a.state_name(p), g.var_name(x), a.state_name(q));
            }
        }
    }
    Ok((out, EXIT_HOLDS))
}
