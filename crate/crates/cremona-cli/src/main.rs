use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod render;

use commands::{Failure, Outcome};

#[derive(Parser, Debug)]
#[command(name = "cremona", version, about = "Cremona classification and minimal models of plane curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Dump the input's Picard lattice and class to stderr on internal failures.
    #[arg(long, global = true)]
    trace_lattice: bool,

    /// Run the command on every `*.json` file in a directory.
    #[arg(long, value_name = "DIR", global = true)]
    batch: Option<PathBuf>,

    /// Treat points as general apart from declared data.
    #[arg(long, global = true, default_value_t = true, action = clap::ArgAction::Set)]
    assume_generic: bool,

    /// Override the document's `kind`.
    #[arg(long, value_enum, global = true)]
    kind: Option<KindArg>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum KindArg {
    Curve,
    System,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Input file; stdin when absent.
    path: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Parse and check the proximity structure.
    Validate(Input),
    /// The m-th adjoint, or the whole adjoint chain.
    Adjoint {
        #[arg(long)]
        m: Option<i64>,
        #[command(flatten)]
        input: Input,
    },
    Classify(Input),
    /// Cremona minimal plane models.
    Minimize(Input),
    /// Decompose a homaloidal net into quadratic maps.
    Factor(Input),
    /// Weighted forest and good clusters of a Hirzebruch system.
    Forest(Input),
    Sharp(Input),
    Flat(Input),
    Natural(Input),
    /// Noether reduction and the best de Jonquieres map for admissible systems.
    Reduce(Input),
    /// Exhaustive search over short chains of quadratic maps.
    Oracle {
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        aux: usize,
        #[command(flatten)]
        input: Input,
    },
    /// Normal form of a positive-dimensional system of rational curves.
    Rational(Input),
    /// Whether the curve is Cremona equivalent to a smooth curve of degree d.
    Smooth {
        #[arg(long)]
        d: i64,
        #[command(flatten)]
        input: Input,
    },
}

impl Command {
    fn input(&self) -> &Input {
        match self {
            Command::Validate(i)
            | Command::Classify(i)
            | Command::Minimize(i)
            | Command::Factor(i)
            | Command::Forest(i)
            | Command::Sharp(i)
            | Command::Flat(i)
            | Command::Natural(i)
            | Command::Reduce(i)
            | Command::Rational(i) => i,
            Command::Adjoint { input, .. } | Command::Oracle { input, .. } | Command::Smooth { input, .. } => input,
        }
    }
}

pub struct Options {
    pub format: Format,
    pub trace_lattice: bool,
    pub assume_generic: bool,
    pub kind: Option<cremona::minimize::Kind>,
}

fn read_input(path: Option<&Path>) -> anyhow::Result<(String, String)> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok((p.display().to_string(), text))
        }
        None => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text).context("reading stdin")?;
            Ok(("<stdin>".into(), text))
        }
    }
}

fn batch_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .json files in {}", dir.display());
    }
    Ok(files)
}

fn exit_of(o: &Outcome) -> u8 {
    match o {
        Ok(_) => 0,
        Err(Failure::Input { .. }) => 2,
        Err(Failure::Internal { .. }) => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let opts = Options {
        format: cli.format,
        trace_lattice: cli.trace_lattice,
        assume_generic: cli.assume_generic,
        kind: cli.kind.map(|k| match k {
            KindArg::Curve => cremona::minimize::Kind::Curve,
            KindArg::System => cremona::minimize::Kind::System,
        }),
    };
    let Some(dir) = &cli.batch else {
        let (name, text) = read_input(cli.command.input().path.as_deref())?;
        let out = commands::run(&cli.command, &name, &text, &opts);
        render::emit_single(&out, &opts);
        return Ok(exit_of(&out));
    };
    if cli.command.input().path.is_some() {
        bail!("--batch takes its inputs from the directory; drop the file argument");
    }
    let files = batch_files(dir)?;
    let outs = cremona::par::map(&files, |p| {
        let name = p.display().to_string();
        match std::fs::read_to_string(p) {
            Ok(text) => (name.clone(), commands::run(&cli.command, &name, &text, &opts)),
            Err(e) => (name.clone(), Err(Failure::input(format!("{name}: {e}")))),
        }
    });
    render::emit_batch(&outs, &opts);
    let worst = outs.iter().map(|(_, o)| exit_of(o)).fold(0, |a, b| match (a, b) {
        (1, _) | (_, 1) => 1,
        _ => a.max(b),
    });
    Ok(worst)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
