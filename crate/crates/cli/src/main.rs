//! `strata`: classify components of strata from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain error, 3 resource cap.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use strata::classify::{classify_permutation_capped, ClassifyError};
use strata::diagram::{DiagramError, DiagramKind, RealizabilityCertificate, SeparatrixDiagram};
use strata::iet::format_rational;
use strata::perm::{PermError, Permutation};
use strata::rauzy::{
    census, closure, CensusOptions, ExtendedRauzyClass, Generators, RauzyError, DEFAULT_CENSUS_LETTERS,
    DEFAULT_MEMBER_CAP,
};
use strata::surface::{
    one_cylinder_suspension, perm_profile, spin_parity_perm, spin_parity_surface, suspend, SquareTiledSurface,
    SurfaceError,
};

#[derive(Parser)]
#[command(name = "strata", version, about = "Connected components of strata of Abelian differentials")]
struct Cli {
    /// Largest number of permutations a class search may visit.
    #[arg(long, global = true, env = "STRATA_MEMBER_CAP", default_value_t = DEFAULT_MEMBER_CAP)]
    member_cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Component label of the stratum component of a permutation.
    Classify {
        #[arg(long)]
        perm: String,
    },
    /// Extended Rauzy classes on m letters, grouped by profile.
    Census {
        #[arg(long)]
        letters: usize,
        #[arg(long, default_value_t = DEFAULT_CENSUS_LETTERS)]
        max_letters: usize,
        /// Write the table here and print a summary instead.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate, save, load or query Rauzy class files.
    #[command(subcommand)]
    Class(ClassCommand),
    /// Parity of the spin structure.
    Spin(SpinArgs),
    /// Square-tiled suspension of a permutation as origami JSON.
    Suspend {
        #[arg(long)]
        perm: String,
        /// Use heights giving a single horizontal cylinder (standard input only).
        #[arg(long)]
        one_cylinder: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Separatrix diagrams.
    #[command(subcommand)]
    Diagram(DiagramCommand),
}

#[derive(Subcommand)]
enum ClassCommand {
    /// Summary of the class of a permutation.
    Enumerate(ClassSeed),
    /// Write the class file of a permutation.
    Save {
        #[command(flatten)]
        seed: ClassSeed,
        #[arg(long)]
        out: PathBuf,
    },
    /// Read and verify a class file.
    Load {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Whether a permutation belongs to a saved class.
    Member {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        perm: String,
    },
}

#[derive(Args)]
struct ClassSeed {
    #[arg(long)]
    perm: String,
    /// Maps to close under: any of a, b, d (Ad_{π₀}).
    #[arg(long, default_value = "abd")]
    generators: String,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SpinArgs {
    #[arg(long)]
    perm: Option<String>,
    /// Origami JSON file.
    #[arg(long)]
    surface: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Args)]
struct DiagramOut {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum DiagramCommand {
    /// Canonical diagram H, O or E of a genus.
    Make {
        #[arg(long = "type")]
        kind: String,
        #[arg(long)]
        genus: u32,
        #[command(flatten)]
        output: DiagramOut,
    },
    /// Positive length witness or infeasibility functional.
    Realize {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Add a pair of simple loops in two sectors of a vertex.
    Bubble {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        vertex: usize,
        #[arg(long)]
        sector_a: usize,
        #[arg(long)]
        sector_b: usize,
        #[command(flatten)]
        output: DiagramOut,
    },
    /// Remove a pair of simple loops; reports m on standard error.
    Erase {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pair: usize,
        #[command(flatten)]
        output: DiagramOut,
    },
    /// Move a pair of simple loops by some sectors.
    Rotate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pair: usize,
        #[arg(long, allow_hyphen_values = true)]
        steps: i64,
        #[command(flatten)]
        output: DiagramOut,
    },
    /// Shrink an edge joining two vertices.
    Contract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        edge: usize,
        #[command(flatten)]
        output: DiagramOut,
    },
    /// Glue a realizable diagram with its integer witness, unit heights and no twists.
    Surface {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Domain(_) => 2,
            Failure::Resource(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) | Failure::Resource(m) => m,
        }
    }
}

impl From<PermError> for Failure {
    fn from(e: PermError) -> Self {
        match e {
            PermError::Reducible | PermError::Degenerate | PermError::NotStandard => Failure::Domain(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<RauzyError> for Failure {
    fn from(e: RauzyError) -> Self {
        match e {
            RauzyError::Perm(p) => p.into(),
            RauzyError::MemoryCapExceeded(_) | RauzyError::LetterCapExceeded { .. } => Failure::Resource(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<SurfaceError> for Failure {
    fn from(e: SurfaceError) -> Self {
        match e {
            SurfaceError::Perm(p) => p.into(),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Perm(p) => p.into(),
            ClassifyError::Rauzy(r) => r.into(),
            ClassifyError::Surface(s) => s.into(),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<DiagramError> for Failure {
    fn from(e: DiagramError) -> Self {
        match e {
            DiagramError::GenusTooSmall { .. } => Failure::Usage(e.to_string()),
            DiagramError::Surface(s) => s.into(),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Writes `text` to `out`, or to standard output.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn line(value: serde_json::Value) -> String {
    format!("{value}\n")
}

fn perm(text: &str) -> Result<Permutation, Failure> {
    Ok(text.parse::<Permutation>()?)
}

fn load_diagram(path: &Path) -> Result<SeparatrixDiagram, Failure> {
    Ok(SeparatrixDiagram::from_json(&read(path)?)?)
}

fn emit_diagram(d: &SeparatrixDiagram, output: &DiagramOut) -> Result<(), Failure> {
    let text = match output.format {
        Format::Json => format!("{}\n", d.to_json()),
        Format::Dot => d.to_dot(),
    };
    emit(output.out.as_deref(), &text)
}

fn class_of(seed: &ClassSeed, cap: usize) -> Result<ExtendedRauzyClass, Failure> {
    let generators = Generators::parse(&seed.generators)
        .ok_or_else(|| Failure::Usage(format!("bad generators {:?}: use letters a, b, d", seed.generators)))?;
    Ok(closure(&perm(&seed.perm)?, generators, cap)?)
}

fn class_summary(class: &ExtendedRauzyClass) -> Result<String, Failure> {
    Ok(line(json!({
        "m": class.letters(),
        "generators": class.generators().to_string(),
        "count": class.len(),
        "profile": class.profile()?.stratum(),
        "representative": class.representative().images(),
    })))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cap = cli.member_cap;
    match cli.command {
        Command::Classify { perm: text } => {
            let p = perm(&text)?;
            let c = classify_permutation_capped(&p, cap)?;
            emit(None, &format!("{}\n", c.to_json(Some(&p))))
        }
        Command::Census { letters, max_letters, out } => {
            let rows = census(letters, CensusOptions { max_letters, member_cap: cap })?;
            let table: String = rows.iter().map(|r| format!("{}\n", r.to_tsv())).collect();
            match out {
                Some(path) => {
                    emit(Some(&path), &table)?;
                    let classes: usize = rows.iter().map(|r| r.class_count).sum();
                    emit(None, &format!("m={letters}: {classes} classes in {} strata\n", rows.len()))
                }
                None => emit(None, &table),
            }
        }
        Command::Class(ClassCommand::Enumerate(seed)) => emit(None, &class_summary(&class_of(&seed, cap)?)?),
        Command::Class(ClassCommand::Save { seed, out }) => {
            let class = class_of(&seed, cap)?;
            emit(Some(&out), &class.to_class_file()?)?;
            emit(None, &class_summary(&class)?)
        }
        Command::Class(ClassCommand::Load { input }) => {
            let class = ExtendedRauzyClass::from_class_file(&read(&input)?)?;
            emit(None, &class_summary(&class)?)
        }
        Command::Class(ClassCommand::Member { input, perm: text }) => {
            let class = ExtendedRauzyClass::from_class_file(&read(&input)?)?;
            let p = perm(&text)?;
            emit(None, &line(json!({ "pi": p.images(), "member": class.contains(&p) })))
        }
        Command::Spin(args) => {
            let (profile, parity) = match (args.perm, args.surface) {
                (Some(text), _) => {
                    let p = perm(&text)?;
                    (perm_profile(&p)?.stratum(), spin_parity_perm(&p)?)
                }
                (None, Some(path)) => {
                    let s = SquareTiledSurface::from_json(&read(&path)?)?;
                    (s.singularity_profile().stratum(), spin_parity_surface(&s)?)
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            emit(None, &line(json!({ "profile": profile, "spin_parity": parity })))
        }
        Command::Suspend { perm: text, one_cylinder, out } => {
            let p = perm(&text)?;
            let s = if one_cylinder { one_cylinder_suspension(&p)? } else { suspend(&p)? };
            emit(out.as_deref(), &format!("{}\n", s.to_json()))
        }
        Command::Diagram(cmd) => run_diagram(cmd),
    }
}

fn run_diagram(cmd: DiagramCommand) -> Result<(), Failure> {
    match cmd {
        DiagramCommand::Make { kind, genus, output } => {
            let kind: DiagramKind = kind.parse().map_err(|e: DiagramError| Failure::Usage(e.to_string()))?;
            emit_diagram(&SeparatrixDiagram::make_canonical(kind, genus)?, &output)
        }
        DiagramCommand::Realize { input } => {
            let d = load_diagram(&input)?;
            let report = match d.realizability() {
                RealizabilityCertificate::Feasible { lengths } => json!({
                    "realizable": true,
                    "lengths": lengths.iter().map(format_rational).collect::<Vec<_>>(),
                }),
                RealizabilityCertificate::Infeasible { functional } => json!({
                    "realizable": false,
                    "functional": functional.iter().map(format_rational).collect::<Vec<_>>(),
                }),
            };
            emit(None, &line(report))
        }
        DiagramCommand::Bubble { input, vertex, sector_a, sector_b, output } => {
            emit_diagram(&load_diagram(&input)?.bubble_handle(vertex, sector_a, sector_b)?, &output)
        }
        DiagramCommand::Erase { input, pair, output } => {
            let (d, m) = load_diagram(&input)?.erase_handle(pair)?;
            eprintln!("m={m}");
            emit_diagram(&d, &output)
        }
        DiagramCommand::Rotate { input, pair, steps, output } => {
            emit_diagram(&load_diagram(&input)?.rotate_handle(pair, steps)?, &output)
        }
        DiagramCommand::Contract { input, edge, output } => {
            emit_diagram(&load_diagram(&input)?.contract_saddle_connection(edge)?, &output)
        }
        DiagramCommand::Surface { input, out } => {
            let d = load_diagram(&input)?;
            let lengths = d
                .realizability()
                .integer_lengths()
                .ok_or_else(|| Failure::Domain("diagram is not realizable".into()))?;
            let k = d.cylinder_count();
            let s = d.diagram_to_surface(&lengths, &vec![1; k], &vec![0; k])?;
            emit(out.as_deref(), &format!("{}\n", s.to_json()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
