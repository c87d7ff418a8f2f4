use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Queries, family solutions, region scans and extremality checks for
/// quantum points of the CHSH scenario.
///
/// Angles are radians unless --degrees is given.
#[derive(Parser, Debug)]
#[command(name = "chsh", version)]
struct Cli {
    /// Read every angle flag (theta, a0..b1, phi and phi ranges) in degrees.
    #[arg(long, global = true)]
    degrees: bool,

    /// Worker threads for parallel commands.
    #[arg(long, global = true, env = "CHSH_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Correlation vector and outcome probabilities of a realisation.
    Point(RealizationArgs),
    /// The 16 probabilities p(ab|xy) of a realisation or an 8-vector.
    Probabilities(PointArgs),
    /// Local, no-signalling and quantum values of a functional.
    Value {
        #[command(flatten)]
        functional: FunctionalArgs,
        /// Also evaluate the functional at this realisation.
        #[command(flatten)]
        at: OptionalRealization,
    },
    /// Maximal quantum value of a functional over two-qubit strategies.
    Maximize {
        #[command(flatten)]
        functional: FunctionalArgs,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Closed-form solution of one of the two functional families.
    Family(FamilyArgs),
    /// Canonical realisations reproducing a point.
    Realize(PointArgs),
    /// Extremality verdicts for the point of a realisation.
    ///
    /// Exit status 0 when extremal, 3 when not, 4 when the two criteria
    /// disagree (a reproducer file is written).
    Extremal {
        #[command(flatten)]
        realization: RealizationArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        /// Where to write a reproducer if the criteria disagree.
        #[arg(long)]
        reproducer: Option<PathBuf>,
    },
    /// Linear program for a candidate exposing functional.
    Expose(RealizationArgs),
    /// Exposedness certificate: the LP functional fed back to the maximizer.
    Certify(RealizationArgs),
    /// Parameter sweep of a family, written as CSV.
    Scan(ScanArgs),
    /// Both extremality criteria on seeded random realisations.
    ///
    /// Writes one CSV row per sample and a JSON summary on stdout; exits
    /// with 4 if any sample gets different verdicts.
    Compare(CompareArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct RealizationArgs {
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, allow_hyphen_values = true)]
    a0: f64,
    #[arg(long, allow_hyphen_values = true)]
    a1: f64,
    #[arg(long, allow_hyphen_values = true)]
    b0: f64,
    #[arg(long, allow_hyphen_values = true)]
    b1: f64,
}

#[derive(Args, Debug, Clone, Copy)]
struct OptionalRealization {
    #[arg(long, allow_hyphen_values = true, requires_all = ["a0", "a1", "b0", "b1"])]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "theta")]
    a0: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "theta")]
    a1: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "theta")]
    b0: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "theta")]
    b1: Option<f64>,
}

/// A point given either by a realisation or by its 8 components.
#[derive(Args, Debug, Clone)]
struct PointArgs {
    /// `A0,A1,B0,B1,A0B0,A0B1,A1B0,A1B1`.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with = "theta",
        required_unless_present = "theta"
    )]
    components: Option<Vec<f64>>,
    #[command(flatten)]
    realization: OptionalRealization,
}

#[derive(Args, Debug, Clone)]
struct FunctionalArgs {
    /// Coefficients of `A0,A1,B0,B1,A0B0,A0B1,A1B0,A1B1`; CHSH when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    functional: Option<Vec<f64>>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyName {
    DoubleTilted,
    WolfeYelin,
}

#[derive(Args, Debug, Clone)]
struct FamilyArgs {
    #[arg(value_enum)]
    family: FamilyName,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha1: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Correlator saturation with marginal-dependent normalisation.
    Ishizaka,
    /// Maximally entangled saturation plus the state-angle threshold.
    Conjecture,
    Both,
}

#[derive(Args, Debug, Clone)]
struct ScanArgs {
    #[arg(value_enum)]
    family: FamilyName,
    /// Grid points per axis; the CSV has steps² rows.
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// First axis (alpha or alpha0); defaults cover the family's box.
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
    /// Second axis (phi or alpha1).
    #[arg(long, allow_hyphen_values = true)]
    y_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y_max: Option<f64>,
    /// CSV destination; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct CompareArgs {
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also run the exposedness certificate on each sample (slower).
    #[arg(long)]
    certify: bool,
    /// CSV destination; stdout when omitted (the summary then goes to stderr).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Where to write disagreeing samples, if any.
    #[arg(long)]
    reproducer: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: thread count must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
