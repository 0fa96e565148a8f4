//! `sigpds`: saturation-based reachability for pushdown systems from the
//! command line.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sigpds::format::{parse_system, Domain, SystemFile};
use sigpds::frontend::{laws, Caps, RunError};
use sigpds::reglang::DEFAULT_CLOSURE_CAP;
use sigpds::saturation::DEFAULT_BUDGET;

#[derive(Parser)]
#[command(name = "sigpds", version, about = "Reachability for pushdown systems over stack-signature indexed semirings")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    format: OutputFormat,

    /// Largest closure of conditions or transductions to build.
    #[arg(long, default_value_t = DEFAULT_CLOSURE_CAP, global = true)]
    closure_cap: usize,

    /// Largest number of saturation steps.
    #[arg(long, default_value_t = DEFAULT_BUDGET, global = true)]
    step_cap: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

/// Words list letters (or order elements) separated by spaces or commas;
/// `-` is the empty word.
#[derive(Args)]
struct Query {
    input: PathBuf,
    p: String,
    w: String,
    q: String,
}

#[derive(Subcommand)]
enum Command {
    /// Saturate the empty automaton and print the resulting edges.
    Presat { input: PathBuf },
    /// Print the weight δ(p, w, p′).
    Delta {
        #[command(flatten)]
        query: Query,
    },
    /// Minimal stack height needed to pop `w` from `p` ending in `p′`.
    Minheight {
        #[command(flatten)]
        query: Query,
    },
    /// Whether ⟨p, w⟩ reaches ⟨p′, w′⟩ (default w′ = ε) or a target automaton.
    Reach {
        #[command(flatten)]
        query: Query,
        #[arg(default_value = "-")]
        w2: String,
        /// Use the named target automaton, its initial state glued to p′.
        #[arg(long)]
        target: Option<String>,
    },
    /// Whether ⟨p, w⟩ reaches a configuration ⟨p′, w″⟩ with w′ ≼ w″.
    Cover {
        #[command(flatten)]
        query: Query,
        #[arg(default_value = "-")]
        w2: String,
    },
    /// Reachability for systems with transductions.
    Trreach {
        #[command(flatten)]
        query: Query,
        #[arg(default_value = "-")]
        w2: String,
    },
    /// Check the algebraic laws of a domain on seeded random samples.
    Laws {
        /// Take the instance from this system file.
        input: Option<PathBuf>,
        #[arg(long)]
        domain: Option<String>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Presat { .. } => "presat",
            Command::Delta { .. } => "delta",
            Command::Minheight { .. } => "minheight",
            Command::Reach { .. } => "reach",
            Command::Cover { .. } => "cover",
            Command::Trreach { .. } => "trreach",
            Command::Laws { .. } => "laws",
        }
    }

    fn input(&self) -> Option<&PathBuf> {
        match self {
            Command::Presat { input } => Some(input),
            Command::Delta { query }
            | Command::Minheight { query }
            | Command::Reach { query, .. }
            | Command::Cover { query, .. }
            | Command::Trreach { query, .. } => Some(&query.input),
            Command::Laws { input, .. } => input.as_ref(),
        }
    }
}

enum Failure {
    Input(String),
    Cap(String),
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Cap(m) => Failure::Cap(m),
            RunError::Input(m) | RunError::Unsupported(m) => Failure::Input(m),
        }
    }
}

struct Report {
    text: String,
    result: Value,
    diagnostics: Vec<String>,
    /// A negative coverability answer or a violated law.
    negative: bool,
}

impl Report {
    fn new(text: String, result: Value) -> Self {
        Report { text, result, diagnostics: vec![], negative: false }
    }
}

fn load(path: &PathBuf) -> Result<SystemFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_system(&text).map_err(|e| Failure::Input(format!("{}:{e}", path.display())))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let caps = Caps { closure: cli.closure_cap, budget: cli.step_cap };
    match &cli.command {
        Command::Presat { input } => {
            let f = load(input)?;
            let out = f.presat(&caps)?;
            let mut text: String = out
                .automaton
                .edges
                .iter()
                .map(|e| format!("{} --{}|{}--> {}\n", e.from, e.symbol, e.weight, e.to))
                .collect();
            if let Some(legend) = &out.legend {
                text.push_str(&format!("\n{legend}"));
            }
            let mut r = Report::new(
                text.trim_end().to_string(),
                json!({ "automaton": out.automaton, "steps": out.steps, "legend": out.legend }),
            );
            r.diagnostics.push(format!("{} steps", out.steps));
            Ok(r)
        }
        Command::Delta { query: Query { input, p, w, q } } => {
            let weight = load(input)?.delta(p, w, q, &caps)?;
            Ok(Report::new(weight.clone(), json!({ "weight": weight })))
        }
        Command::Minheight { query: Query { input, p, w, q } } => {
            let h = load(input)?.minheight(p, w, q, &caps)?.to_string();
            Ok(Report::new(h.clone(), json!({ "height": h })))
        }
        Command::Reach { query: Query { input, p, w, q }, w2, target } => {
            let f = load(input)?;
            match target {
                Some(t) => {
                    let out = f.reach_target(p, w, q, t, &caps)?;
                    let text = format!("{}\nweight {}", yes_no(out.reachable), out.weight);
                    Ok(Report::new(text, json!({ "reachable": out.reachable, "weight": out.weight })))
                }
                None => {
                    let b = f.reach(p, w, q, w2, &caps)?;
                    Ok(Report::new(yes_no(b).to_string(), json!({ "reachable": b })))
                }
            }
        }
        Command::Cover { query: Query { input, p, w, q }, w2 } => {
            let b = load(input)?.cover(p, w, q, w2, &caps)?;
            let text = if b {
                format!("covered: ⟨{p}, {w}⟩ reaches some ⟨{q}, w″⟩ with {w2} ≼ w″")
            } else {
                format!("not covered: no ⟨{q}, w″⟩ with {w2} ≼ w″ is reachable from ⟨{p}, {w}⟩")
            };
            let mut r = Report::new(text, json!({ "covered": b }));
            r.negative = !b;
            Ok(r)
        }
        Command::Trreach { query: Query { input, p, w, q }, w2 } => {
            let b = load(input)?.trreach(p, w, q, w2, &caps)?;
            Ok(Report::new(yes_no(b).to_string(), json!({ "reachable": b })))
        }
        Command::Laws { input, domain, samples, seed } => {
            let file = input.as_ref().map(load).transpose()?;
            let domain = match (domain, &file) {
                (Some(d), _) => Domain::parse(d).ok_or_else(|| Failure::Input(format!("unknown domain `{d}`")))?,
                (None, Some(f)) => f.domain,
                (None, None) => return Err(Failure::Input("`laws` needs --domain or a system file".into())),
            };
            let reports = laws(domain, file.as_ref(), *samples, *seed, &caps)?;
            let text = reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n");
            let failed: Vec<String> = reports
                .iter()
                .flat_map(|r| r.failures().map(move |l| format!("{}: {} fails", r.subject, l.name)))
                .collect();
            let mut r = Report::new(text.trim_end().to_string(), json!(reports));
            r.negative = !failed.is_empty();
            r.diagnostics = failed;
            Ok(r)
        }
    }
}

// A closed pipe downstream is not an error worth reporting.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let input = cli.command.input().map(|p| p.display().to_string());
    let outcome = run(&cli);
    let (code, result, diagnostics, text) = match outcome {
        Ok(r) => (if r.negative { 1 } else { 0 }, r.result, r.diagnostics, Some(r.text)),
        Err(Failure::Input(m)) => (2, Value::Null, vec![m], None),
        Err(Failure::Cap(m)) => (3, Value::Null, vec![m], None),
    };
    match cli.format {
        OutputFormat::Json => {
            let out = json!({
                "command": cli.command.name(),
                "input": input,
                "result": result,
                "diagnostics": diagnostics,
            });
            emit(&serde_json::to_string_pretty(&out).expect("serializable"));
        }
        OutputFormat::Text => match text {
            Some(t) => emit(&t),
            None => {
                for d in &diagnostics {
                    eprintln!("error: {d}");
                }
            }
        },
    }
    ExitCode::from(code)
}
