mod report;

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use infocontrib::corpus::Example;
use infocontrib::distribution::{parse_distribution, Format, ParseOptions, TargetSelection};
use infocontrib::notation::parse_constraint_node;
use infocontrib::projection::{split_distribution, SplitCache};
use infocontrib::shapley::oracle_contributions;
use infocontrib::{decomposition, Base, Error, InputLattice, IpfOptions, JointDistribution};

use report::Report;

/// Largest accepted gap between chain sums and Shapley values.
const ORACLE_TOLERANCE: f64 = 1e-9;

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_ORACLE: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "infocontrib", version, about = "Decompose I(X1..Xn; Y) into per-predictor information contributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Information contribution of every non-empty input subset.
    Decompose(InputArgs),
    /// Divergence from a distribution to its split at a constraint node.
    ConstraintInfo {
        #[command(flatten)]
        input: InputArgs,
        /// Facets over all variables, e.g. `(X1X2)(X1Y)(X2Y)`.
        #[arg(long)]
        node: String,
    },
    /// Size and chain counts of the input lattice.
    Lattice {
        /// Number of inputs.
        #[arg(short = 'n', long = "inputs", value_parser = clap::value_parser!(u8).range(1..=6))]
        n: u8,
        #[arg(long)]
        json: bool,
    },
    /// Compares chain sums with Shapley values under precedence constraints.
    OracleCheck(InputArgs),
    /// Built-in example distributions.
    Examples {
        #[arg(long)]
        arity: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Built-in distribution (see `examples`).
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    example: Option<String>,
    /// Distribution file; `-` reads standard input.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Input format; guessed from the file extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Target variable; defaults to the declared target or the last column.
    #[arg(long)]
    target: Option<String>,
    /// Largest accepted marginal gap (L1) of a fitted projection.
    #[arg(long, default_value_t = IpfOptions::default().tolerance)]
    tolerance: f64,
    /// Sweep budget per projection.
    #[arg(long, default_value_t = IpfOptions::default().max_sweeps)]
    max_sweeps: usize,
    #[arg(long, value_enum, default_value_t = BaseArg::Two)]
    base: BaseArg,
    /// Emit JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Renormalize tables whose total is off instead of rejecting them.
    #[arg(long)]
    lenient: bool,
    /// Project lattice nodes on several threads.
    #[arg(long)]
    parallel: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Tsv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BaseArg {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

/// A run-time failure together with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = if err.is_parse() {
            EXIT_PARSE
        } else if err.is_convergence() {
            EXIT_CONVERGENCE
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

struct Loaded {
    source: String,
    distribution: JointDistribution,
    options: IpfOptions,
}

impl InputArgs {
    fn options(&self) -> Result<IpfOptions, Failure> {
        let options = IpfOptions {
            tolerance: self.tolerance,
            max_sweeps: self.max_sweeps,
            base: match self.base {
                BaseArg::Two => Base::Two,
                BaseArg::E => Base::E,
            },
        };
        options.validate()?;
        Ok(options)
    }

    fn load(&self) -> Result<Loaded, Failure> {
        let options = self.options()?;
        let (source, mut distribution) = match (&self.example, &self.input) {
            (Some(name), None) => {
                let example: Example = name.parse()?;
                (example.name().to_string(), example.distribution())
            }
            (None, Some(path)) => (path.display().to_string(), self.read(path)?),
            _ => return Err(usage("give exactly one of --example and --input")),
        };
        if let Some(target) = &self.target {
            distribution = distribution.with_target(target)?;
        }
        Ok(Loaded {
            source,
            distribution,
            options,
        })
    }

    fn read(&self, path: &Path) -> Result<JointDistribution, Failure> {
        let format = match self.format {
            Some(FormatArg::Json) => Format::Json,
            Some(FormatArg::Tsv) => Format::Tsv,
            None if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => Format::Json,
            None => Format::Tsv,
        };
        let options = ParseOptions {
            format,
            strict: !self.lenient,
            target: TargetSelection::FromSource,
            ..ParseOptions::default()
        };
        let parsed = if path.as_os_str() == "-" {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text).map_err(Error::from)?;
            parse_distribution(text.as_bytes(), &options)?
        } else {
            let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            parse_distribution(file, &options)?
        };
        for warning in &parsed.warnings {
            eprintln!("warning: {warning}");
        }
        Ok(parsed.distribution)
    }
}

fn emit(report: &Report, json: bool) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    let written = if json {
        writeln!(out, "{}", report.to_json())
    } else {
        write!(out, "{}", report.to_table())
    };
    match written.and_then(|_| out.flush()) {
        // A closed pipe (`| head`) is not an error of ours.
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Error::from(e).into()),
        _ => Ok(()),
    }
}

fn decompose(args: &InputArgs) -> Result<ExitCode, Failure> {
    let loaded = args.load()?;
    let system = loaded.distribution.canonical_system()?;
    let lattice = InputLattice::enumerate(system.num_inputs())?;
    let cache = SplitCache::new(system, loaded.options)?;
    let result = decomposition::information_contribution_with_cache(&cache, &lattice, args.parallel)?;
    let report = report::decomposition(&loaded.source, &result, &lattice);
    emit(&report, args.json)?;
    Ok(ExitCode::SUCCESS)
}

fn constraint_info(args: &InputArgs, node: &str) -> Result<ExitCode, Failure> {
    let loaded = args.load()?;
    let p = &loaded.distribution;
    let node = parse_constraint_node(node, &p.names())?;
    let split = split_distribution(p, &node, &loaded.options)?;
    let information = p.kl_divergence(&split.distribution, loaded.options.base)?;
    let report = report::constraint_info(&loaded.source, p, &node, &split, information, loaded.options.base);
    emit(&report, args.json)?;
    Ok(ExitCode::SUCCESS)
}

fn oracle_check(args: &InputArgs) -> Result<ExitCode, Failure> {
    let loaded = args.load()?;
    let system = loaded.distribution.canonical_system()?;
    let lattice = InputLattice::enumerate(system.num_inputs())?;
    let cache = SplitCache::new(system, loaded.options)?;
    let chain = decomposition::information_contribution_with_cache(&cache, &lattice, args.parallel)?;
    let oracle = oracle_contributions(&cache, &lattice, args.parallel)?;
    let report = report::oracle(&loaded.source, &chain, &oracle, ORACLE_TOLERANCE);
    emit(&report, args.json)?;
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: oracle discrepancy exceeds {ORACLE_TOLERANCE:e}");
        Ok(ExitCode::from(EXIT_ORACLE))
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Decompose(args) => decompose(&args),
        Command::ConstraintInfo { input, node } => constraint_info(&input, &node),
        Command::Lattice { n, json } => {
            let lattice = InputLattice::enumerate_with_cap(n as usize, infocontrib::lattice::MAX_SUPPORTED_INPUTS)?;
            emit(&report::lattice(&lattice), json)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCheck(args) => oracle_check(&args),
        Command::Examples { arity, json } => {
            emit(&report::examples(&Example::list(arity)), json)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    run(cli).unwrap_or_else(|failure| {
        eprintln!("error: {}", failure.message);
        ExitCode::from(failure.code)
    })
}
