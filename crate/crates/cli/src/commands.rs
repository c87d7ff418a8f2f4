use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chsh_core::expose::{build_expose_lp, certify_exposed, solve_expose_lp};
use chsh_core::extremality::{extremality_report, realizations_from_point, zero_marginal_realization, Method};
use chsh_core::families::{double_tilted_solve, wolfe_yelin_solve, DoubleTiltedParams, WolfeYelinParams};
use chsh_core::polytope::{local_value, max_chsh, nonsignalling_value};
use chsh_core::scan::{compare, scan_double_tilted, scan_wolfe_yelin, Axis};
use chsh_core::spectrum::{maximize_with, MaximizeOptions};
use chsh_core::{ChshError, Functional, ProbabilityPoint, Realization};
use serde::Serialize;
use serde_json::json;

use crate::{
    Cli, Command, FamilyArgs, FamilyName, FunctionalArgs, MethodArg, OptionalRealization, PointArgs, RealizationArgs,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_EXTREMAL: u8 = 3;
pub const EXIT_DISAGREEMENT: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Bad input: out-of-range values, missing parameters.
    Input(String),
    /// The output could not be written.
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Output(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Output(m) => f.write_str(m),
        }
    }
}

impl From<ChshError> for CliError {
    fn from(e: ChshError) -> Self {
        CliError::Input(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

struct Units {
    degrees: bool,
}

impl Units {
    fn angle(&self, v: f64) -> f64 {
        if self.degrees {
            v.to_radians()
        } else {
            v
        }
    }

    fn realization(&self, r: &RealizationArgs) -> Result<Realization> {
        Ok(Realization::new(
            self.angle(r.theta),
            self.angle(r.a0),
            self.angle(r.a1),
            self.angle(r.b0),
            self.angle(r.b1),
        )?)
    }

    fn optional(&self, r: &OptionalRealization) -> Result<Option<Realization>> {
        match (r.theta, r.a0, r.a1, r.b0, r.b1) {
            (Some(theta), Some(a0), Some(a1), Some(b0), Some(b1)) => {
                Ok(Some(self.realization(&RealizationArgs { theta, a0, a1, b0, b1 })?))
            }
            (None, None, None, None, None) => Ok(None),
            _ => Err(CliError::Input(
                "a realisation needs all of --theta --a0 --a1 --b0 --b1".into(),
            )),
        }
    }

    fn point(&self, p: &PointArgs) -> Result<ProbabilityPoint> {
        if let Some(c) = &p.components {
            let c: [f64; 8] = c
                .as_slice()
                .try_into()
                .map_err(|_| CliError::Input("--components needs 8 values".into()))?;
            return Ok(ProbabilityPoint::from_components(c)?);
        }
        match self.optional(&p.realization)? {
            Some(r) => Ok(r.point()),
            None => Err(CliError::Input("give --components or a realisation".into())),
        }
    }
}

fn functional(f: &FunctionalArgs) -> Result<Functional> {
    match &f.functional {
        None => Ok(Functional::chsh()),
        Some(c) => {
            let c: [f64; 8] = c
                .as_slice()
                .try_into()
                .map_err(|_| CliError::Input("--functional needs 8 values".into()))?;
            Ok(Functional::new(c)?)
        }
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| CliError::Output(e.to_string()))?;
    let mut out = io::stdout().lock();
    writeln!(out, "{s}").map_err(|e| CliError::Output(e.to_string()))
}

fn write_json_file<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| CliError::Output(e.to_string()))?;
    std::fs::write(path, s).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// Writes rows as CSV to `path`, or stdout. The file is only created once
/// every row is ready.
fn write_csv<T: Serialize>(path: Option<&Path>, rows: &[T], header: &[&str]) -> Result<()> {
    let out: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let io_err = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.serialize(r).map_err(io_err)?;
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))
}

fn check_writable(path: Option<&Path>) -> Result<()> {
    let Some(p) = path else { return Ok(()) };
    let dir = match p.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    if !dir.is_dir() || p.is_dir() {
        return Err(CliError::Output(format!("{}: cannot write here", p.display())));
    }
    Ok(())
}

fn default_reproducer(name: &str) -> PathBuf {
    std::env::temp_dir().join(name)
}

pub fn run(cli: &Cli) -> Result<u8> {
    let units = Units { degrees: cli.degrees };
    match &cli.command {
        Command::Point(r) => {
            let r = units.realization(r)?;
            let p = r.point();
            print_json(&json!({
                "realization": r,
                "components": p.components(),
                "point": p,
                "probabilities": p.probabilities(),
            }))?;
        }
        Command::Probabilities(p) => {
            let p = units.point(p)?;
            print_json(&p.probabilities())?;
        }
        Command::Value { functional: f, at } => {
            let f = functional(f)?;
            let local = local_value(&f);
            let quantum = maximize_with(&f, &MaximizeOptions::default())?;
            let at = units.optional(at)?;
            print_json(&json!({
                "functional": f,
                "beta_l": local.beta_l,
                "local_maximizers": local.maximizers,
                "beta_ns": nonsignalling_value(&f),
                "beta_q": quantum.beta_max,
                "value_at_point": at.map(|r| f.value(&r.point())),
            }))?;
        }
        Command::Maximize {
            functional: f,
            grid,
            tol,
        } => {
            let f = functional(f)?;
            let opts = MaximizeOptions {
                grid_n: *grid,
                refine_tol: *tol,
                ..MaximizeOptions::default()
            };
            print_json(&maximize_with(&f, &opts)?)?;
        }
        Command::Family(args) => family(&units, args)?,
        Command::Realize(p) => {
            let p = units.point(p)?;
            let zero = p
                .marginals()
                .iter()
                .all(|m| m.abs() <= chsh_core::extremality::ZERO_MARGINAL_TOL);
            let found: Vec<Realization> = if zero {
                zero_marginal_realization(&p)?.into_iter().collect()
            } else {
                realizations_from_point(&p)?
            };
            let errors: Vec<f64> = found.iter().map(|r| r.point().distance(&p)).collect();
            print_json(&json!({
                "point": p,
                "zero_marginals": zero,
                "realizations": found,
                "reproduction_error": errors,
            }))?;
        }
        Command::Extremal {
            realization,
            method,
            reproducer,
        } => {
            let r = units.realization(realization)?;
            let method = match method {
                MethodArg::Ishizaka => Method::Stlm,
                MethodArg::Conjecture => Method::Threshold,
                MethodArg::Both => Method::Both,
            };
            let report = extremality_report(&r, method);
            print_json(&report)?;
            if report.agreement == Some(false) {
                let path = reproducer
                    .clone()
                    .unwrap_or_else(|| default_reproducer("chsh-extremal-reproducer.json"));
                write_json_file(&path, &json!({ "realization": r, "report": report }))?;
                eprintln!("criteria disagree; reproducer written to {}", path.display());
                return Ok(EXIT_DISAGREEMENT);
            }
            return Ok(if report.extremal() { EXIT_OK } else { EXIT_NOT_EXTREMAL });
        }
        Command::Expose(r) => {
            let r = units.realization(r)?;
            let problem = build_expose_lp(&r);
            let result = solve_expose_lp(&problem);
            print_json(&json!({
                "realization": r,
                "point": problem.point,
                "max_chsh": max_chsh(&problem.point),
                "functional": result.functional,
                "i_max": result.i_max,
                "status": result.status,
                "free_dimensions": result.free_dimensions,
            }))?;
        }
        Command::Certify(r) => {
            let r = units.realization(r)?;
            print_json(&certify_exposed(&r))?;
        }
        Command::Scan(args) => scan(&units, args)?,
        Command::Compare(args) => return compare_cmd(args),
    }
    Ok(EXIT_OK)
}

fn family(units: &Units, args: &FamilyArgs) -> Result<()> {
    let need =
        |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::Input(format!("--{name} is required for this family")));
    match args.family {
        FamilyName::DoubleTilted => {
            let alpha = need(args.alpha, "alpha")?;
            let phi = units.angle(need(args.phi, "phi")?);
            print_json(&double_tilted_solve(&DoubleTiltedParams::new(alpha, phi)?)?)
        }
        FamilyName::WolfeYelin => {
            let alpha0 = need(args.alpha0, "alpha0")?;
            let alpha1 = need(args.alpha1, "alpha1")?;
            print_json(&wolfe_yelin_solve(&WolfeYelinParams::new(alpha0, alpha1)?)?)
        }
    }
}

const DOUBLE_TILTED_HEADER: [&str; 7] = [
    "alpha",
    "phi",
    "beta_l",
    "beta_q",
    "admissible",
    "c1_extremal",
    "c2_extremal",
];
const WOLFE_YELIN_HEADER: [&str; 8] = [
    "alpha0",
    "alpha1",
    "beta_l",
    "beta_q",
    "admissible",
    "c1_extremal",
    "c2_extremal",
    "extended_extremal",
];

fn scan(units: &Units, args: &crate::ScanArgs) -> Result<()> {
    let out = args.output.as_deref();
    check_writable(out)?;
    match args.family {
        FamilyName::DoubleTilted => {
            let x = Axis::new(args.x_min.unwrap_or(0.0), args.x_max.unwrap_or(1.98), args.steps)?;
            let y = Axis::new(
                args.y_min.map_or(0.0, |v| units.angle(v)),
                args.y_max.map_or(FRAC_PI_2, |v| units.angle(v)),
                args.steps,
            )?;
            write_csv(out, &scan_double_tilted(&x, &y)?, &DOUBLE_TILTED_HEADER)
        }
        FamilyName::WolfeYelin => {
            let x = Axis::new(args.x_min.unwrap_or(-0.99), args.x_max.unwrap_or(0.99), args.steps)?;
            let y = Axis::new(args.y_min.unwrap_or(0.0), args.y_max.unwrap_or(2.0), args.steps)?;
            write_csv(out, &scan_wolfe_yelin(&x, &y)?, &WOLFE_YELIN_HEADER)
        }
    }
}

const COMPARE_HEADER: [&str; 13] = [
    "index",
    "theta",
    "a0",
    "a1",
    "b0",
    "b1",
    "nonlocal",
    "c1_extremal",
    "c2_extremal",
    "agree",
    "lp_status",
    "i_max",
    "certificate",
];

fn compare_cmd(args: &crate::CompareArgs) -> Result<u8> {
    let out = args.output.as_deref();
    check_writable(out)?;
    let (rows, summary) = compare(args.seed, args.samples, args.certify);
    write_csv(out, &rows, &COMPARE_HEADER)?;
    let s = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Output(e.to_string()))?;
    if out.is_some() {
        println!("{s}");
    } else {
        eprintln!("{s}");
    }
    if summary.disagreements > 0 {
        let bad: Vec<_> = rows.iter().filter(|r| !r.agree).collect();
        let path = args
            .reproducer
            .clone()
            .unwrap_or_else(|| default_reproducer(&format!("chsh-compare-{}-reproducer.json", args.seed)));
        write_json_file(&path, &json!({ "seed": args.seed, "samples": bad }))?;
        eprintln!(
            "{} disagreements; reproducer written to {}",
            summary.disagreements,
            path.display()
        );
        return Ok(EXIT_DISAGREEMENT);
    }
    Ok(EXIT_OK)
}
