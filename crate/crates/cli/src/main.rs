use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fraglead_core::analysis::{
    emit_plot, fit_trend, threshold_length, PlotOptions, ResultTable, TrendFit,
};
use fraglead_core::fragment::{sample, windows, SizeSchedule};
use fraglead_core::ontology::{Component, DrugLeadOntology};
use fraglead_core::search::{
    cached_execute, execute, sweep, Backend, BackendConfig, CorpusBackend, QueryCache, SweepOptions,
};
use fraglead_core::smiles::{encode, parse, tokenize};
use fraglead_core::Corpus;

#[derive(Parser)]
#[command(
    name = "fraglead",
    version,
    about = "SMILES fragment search and result-set analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a SMILES string into symbols
    Tokenize {
        smiles: String,
        /// Print only the number of symbols
        #[arg(long)]
        count: bool,
    },
    /// Parse a SMILES string and summarize the molecular graph
    Parse { smiles: String },
    /// Molecular formula in Hill order
    Formula { smiles: String },
    /// Contiguous fragments: every window of one length, or a seeded sample per size
    Fragment(FragmentArgs),
    /// Result-set size of one query
    Search {
        query: String,
        #[command(flatten)]
        backend: BackendArgs,
    },
    /// Sample fragments of a molecule, query each and write the result table as CSV
    Sweep(SweepArgs),
    /// Least-squares trend of log10 result-set size against fragment symbols
    Fit {
        /// Result table CSV
        table: PathBuf,
        /// Result-set size considered manageable
        #[arg(long, default_value_t = 1000)]
        manageable: u64,
    },
    /// SVG scatter plot of a result table with its fitted trend
    Plot {
        table: PathBuf,
        #[arg(long, default_value_t = 640)]
        width: u32,
        #[arg(long, default_value_t = 420)]
        height: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Create and query drug-lead ontology files
    #[command(subcommand)]
    Ontology(OntologyCommand),
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["length", "sizes"])))]
struct FragmentArgs {
    smiles: String,
    /// Emit every window of this many symbols
    #[arg(long)]
    length: Option<usize>,
    /// Sample one fragment per size, as min:max:step
    #[arg(long)]
    sizes: Option<SizeSchedule>,
    #[arg(long, default_value_t = 0, requires = "sizes")]
    seed: u64,
    /// Number of samples; sample r uses seed + r
    #[arg(long, default_value_t = 1, requires = "sizes")]
    repeat: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendKind {
    Web,
    Corpus,
}

#[derive(Args)]
struct BackendArgs {
    #[arg(long, value_enum, default_value = "corpus")]
    backend: BackendKind,
    /// Document directory or one-document-per-line file for the corpus backend
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Backend config file (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Query cache file (JSON)
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Query again even when the cache has an entry
    #[arg(long, requires = "cache")]
    refresh: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    smiles: String,
    #[arg(long, default_value = "2:18:2")]
    sizes: SizeSchedule,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    backend: BackendArgs,
    /// Concurrent queries; defaults to the backend config
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OntologyCommand {
    /// Write an empty ontology
    Init {
        #[arg(long)]
        root_class: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Add a drug instance
    AddDrug {
        file: PathBuf,
        #[arg(long)]
        name: String,
        /// Full SMILES of the drug
        #[arg(long)]
        smiles: Option<String>,
        /// Write here instead of updating FILE
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add a fragment, named component or skeleton to a drug
    AddComponent {
        file: PathBuf,
        #[arg(long)]
        drug: String,
        #[arg(long, group = "component")]
        fragment: Option<String>,
        #[arg(long, group = "component")]
        named: Option<String>,
        #[arg(long, group = "component")]
        skeleton: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check structure and fragment consistency
    Validate { file: PathBuf },
    /// List fragment search inputs as drug<TAB>fragment
    Inputs {
        file: PathBuf,
        #[arg(long)]
        drug: Option<String>,
    },
}

/// A domain error, reported as `error[Code]: message`.
struct Failure {
    code: &'static str,
    message: String,
}

impl Failure {
    fn new(code: &'static str, message: impl Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

macro_rules! coded {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::new(e.code(), e)
            }
        }
    )*};
}

coded!(
    fraglead_core::SmilesError,
    fraglead_core::fragment::FragmentError,
    fraglead_core::corpus::CorpusError,
    fraglead_core::search::SearchError,
    fraglead_core::analysis::AnalysisError,
    fraglead_core::ontology::OntologyError
);

type Outcome = Result<(), Failure>;

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new("Io", format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::new("Io", e))
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn read_table(path: &Path) -> Result<ResultTable, Failure> {
    Ok(ResultTable::from_csv(&read(path)?)?)
}

fn open_backend(args: &BackendArgs) -> Result<Box<dyn Backend>, Failure> {
    let config = args
        .config
        .as_deref()
        .map(BackendConfig::load)
        .transpose()?;
    match (args.backend, config) {
        (BackendKind::Web, Some(config @ BackendConfig::Web(_))) => Ok(config.build()?),
        (BackendKind::Web, _) => Err(Failure::new(
            "InvalidConfig",
            "--backend web needs --config with kind = \"web\"",
        )),
        (BackendKind::Corpus, Some(BackendConfig::Web(_))) => Err(Failure::new(
            "InvalidConfig",
            "config describes a web backend; pass --backend web to allow network access",
        )),
        (BackendKind::Corpus, Some(config)) if args.corpus.is_none() => Ok(config.build()?),
        (BackendKind::Corpus, _) => {
            let path = args.corpus.as_deref().ok_or_else(|| {
                Failure::new("InvalidConfig", "corpus backend needs --corpus or --config")
            })?;
            let corpus = Corpus::load(path)?;
            Ok(Box::new(CorpusBackend::new(
                path.display().to_string(),
                &corpus,
            )?))
        }
    }
}

fn open_cache(args: &BackendArgs) -> Result<Option<QueryCache>, Failure> {
    Ok(match &args.cache {
        Some(path) => Some(QueryCache::open(path)?.with_refresh(args.refresh)),
        None => None,
    })
}

fn save_ontology(ontology: &DrugLeadOntology, file: &Path, out: Option<&Path>) -> Outcome {
    Ok(ontology.save(out.unwrap_or(file))?)
}

fn describe_fit(fit: &TrendFit) -> String {
    format!(
        "slope\t{:.6}\nintercept\t{:.6}\nr_squared\t{:.6}\npoints_used\t{}\nexcluded_zero_rows\t{}\n",
        fit.slope, fit.intercept, fit.r_squared, fit.points_used, fit.excluded_zero_rows
    )
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Tokenize { smiles, count } => {
            let tokens = tokenize(&smiles)?;
            if count {
                println!("{}", tokens.len());
            } else {
                let texts: Vec<&str> = tokens.tokens().iter().map(|t| t.text()).collect();
                println!("{}", texts.join(" "));
            }
        }
        Command::Parse { smiles } => {
            let graph = parse(&tokenize(&smiles)?)?;
            let (graph, warnings) = graph.assign_implicit_hydrogens();
            for w in &warnings {
                eprintln!("warning[ValenceExceeded]: {w}");
            }
            let rings = graph.bond_count() + 1 - graph.atom_count();
            println!("atoms\t{}", graph.atom_count());
            println!("bonds\t{}", graph.bond_count());
            println!("rings\t{rings}");
            println!("formula\t{}", graph.molecular_formula());
            println!("smiles\t{}", encode(&graph)?);
        }
        Command::Formula { smiles } => {
            let (graph, warnings) = parse(&tokenize(&smiles)?)?.assign_implicit_hydrogens();
            for w in &warnings {
                eprintln!("warning[ValenceExceeded]: {w}");
            }
            println!("{}", graph.molecular_formula());
        }
        Command::Fragment(args) => {
            let tokens = tokenize(&args.smiles)?;
            let mut out = String::new();
            if let Some(length) = args.length {
                for f in windows(&tokens, length)? {
                    out.push_str(&format!("{}\t{}\n", f.start(), f.render()));
                }
            } else if let Some(schedule) = &args.sizes {
                for r in 0..args.repeat {
                    let seed = args.seed.wrapping_add(r);
                    for f in sample(&tokens, schedule, seed)? {
                        out.push_str(&format!("{seed}\t{}\t{}\n", f.len(), f.render()));
                    }
                }
            }
            emit(None, &out)?;
        }
        Command::Search { query, backend } => {
            let cache = open_cache(&backend)?;
            let backend = open_backend(&backend)?;
            let result = match &cache {
                Some(cache) => cached_execute(cache, backend.as_ref(), &query)?,
                None => execute(backend.as_ref(), &query)?,
            };
            println!("{}", result.result_set_size);
        }
        Command::Sweep(args) => {
            let cache = open_cache(&args.backend)?;
            let backend = open_backend(&args.backend)?;
            let jobs = match (args.jobs, &args.backend.config) {
                (Some(j), _) => j,
                (None, Some(path)) => BackendConfig::load(path)?.max_in_flight(),
                (None, None) => 1,
            };
            let options = SweepOptions {
                seed: args.seed,
                max_in_flight: jobs.max(1),
            };
            let table = sweep(
                &args.smiles,
                &args.sizes,
                options,
                backend.as_ref(),
                cache.as_ref(),
            )?;
            for row in &table.rows {
                if let Some(e) = &row.error {
                    eprintln!("warning[QueryFailed]: {}: {e}", row.fragment);
                }
            }
            let fit = fit_trend(&table).ok();
            emit(args.out.as_deref(), &table.to_csv(fit.as_ref()))?;
        }
        Command::Fit { table, manageable } => {
            let fit = fit_trend(&read_table(&table)?)?;
            emit(None, &describe_fit(&fit))?;
            let l = threshold_length(&fit, manageable)?;
            println!("threshold_length\t{l}");
        }
        Command::Plot {
            table,
            width,
            height,
            out,
        } => {
            let table = read_table(&table)?;
            let fit = fit_trend(&table).ok();
            let svg = emit_plot(&table, fit.as_ref(), PlotOptions { width, height })?;
            emit(out.as_deref(), &svg)?;
        }
        Command::Ontology(command) => ontology(command)?,
    }
    Ok(())
}

fn ontology(command: OntologyCommand) -> Outcome {
    match command {
        OntologyCommand::Init { root_class, out } => {
            DrugLeadOntology::new(root_class)?.save(&out)?;
        }
        OntologyCommand::AddDrug {
            file,
            name,
            smiles,
            out,
        } => {
            let o = DrugLeadOntology::load(&file)?.add_drug(name, smiles)?;
            save_ontology(&o, &file, out.as_deref())?;
        }
        OntologyCommand::AddComponent {
            file,
            drug,
            fragment,
            named,
            skeleton,
            out,
        } => {
            let component = match (fragment, named, skeleton) {
                (Some(text), _, _) => Component::Fragment { text },
                (_, Some(label), _) => Component::Named { label },
                (_, _, true) => Component::Skeleton,
                _ => {
                    return Err(Failure::new(
                        "EmptyComponent",
                        "one of --fragment, --named or --skeleton is required",
                    ))
                }
            };
            let o = DrugLeadOntology::load(&file)?.add_component(&drug, component)?;
            save_ontology(&o, &file, out.as_deref())?;
        }
        OntologyCommand::Validate { file } => {
            let report = DrugLeadOntology::load(&file)?.validate();
            for w in &report.warnings {
                println!("warning\t{w}");
            }
            for e in &report.errors {
                println!("error\t{e}");
            }
            if let Some(first) = report.errors.first() {
                return Err(Failure::new(
                    first.code,
                    format!(
                        "{} error(s), {} warning(s)",
                        report.errors.len(),
                        report.warnings.len()
                    ),
                ));
            }
            println!("ok\t{} warning(s)", report.warnings.len());
        }
        OntologyCommand::Inputs { file, drug } => {
            let inputs = DrugLeadOntology::load(&file)?.search_inputs(drug.as_deref())?;
            let mut out = String::new();
            for (drug, fragment) in inputs {
                out.push_str(&format!("{drug}\t{fragment}\n"));
            }
            emit(None, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let message = f.message.replace('\n', " ");
            eprintln!("error[{}]: {message}", f.code);
            ExitCode::from(1)
        }
    }
}
