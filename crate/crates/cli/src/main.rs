//! `prbox`: command-line front end to the PR-box toolkit.
//!
//! Exit codes: 0 success, 1 domain or input error, 2 capacity error,
//! 3 verification failure (including a behavior that signals), 64 usage.

mod json;
mod output;

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_traits::Zero;
use serde_json::{json, Value};

use prbox_core::bell::{chsh, is_local};
use prbox_core::cloning::{perfect_clone_composite, MonogamyProblem};
use prbox_core::format;
use prbox_core::multiparty::{
    check_lhv_impossible, corr3_constraints, ghz_constraints, search_corr3_strategies,
    simulate_ghz_with_prbox, SharedRandomnessTable,
};
use prbox_core::protocols::{parse_bits, run_ip_cc, run_ot};
use prbox_core::rational::parse_rational;
use prbox_core::singlet::{chsh_from_simulation, estimate_correlation, ChshSettings};
use prbox_core::{Behavior, Error, UnitVector3};

use output::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "prbox", version, about = "PR-box and nonlocality toolkit")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunConfig {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every randomized subcommand.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo shots (per setting for sim-chsh).
    #[arg(long, global = true, default_value_t = 100_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,
    /// Allowed deviation of a direction's norm from 1 before it is
    /// rejected; accepted directions are renormalized.
    #[arg(long, global = true, default_value_t = 1e-12)]
    norm_tolerance: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// The PR-box itself.
    Pr {
        #[command(subcommand)]
        action: PrAction,
    },
    /// Check a behavior file for signalling (exit 3 if it signals).
    NsCheck { file: PathBuf },
    /// CHSH value of a two-party binary behavior file.
    Chsh { file: PathBuf },
    /// Exact local-polytope membership with a certificate.
    Local { file: PathBuf },
    /// CHSH value and locality of the isotropic box at visibility v.
    Isotropic {
        #[arg(long)]
        v: String,
    },
    /// Largest isotropic visibility shared by both marginals of a
    /// no-signalling extension.
    Monogamy {
        /// Also require symmetry under swapping the two cloned ports.
        #[arg(long)]
        symmetric: bool,
    },
    /// Show that a perfect clone of a PR-box port signals.
    CloneSignalling,
    /// Simulate singlet correlations along directions a and b.
    SimSinglet {
        #[arg(long, value_name = "X,Y,Z")]
        a: String,
        #[arg(long, value_name = "X,Y,Z")]
        b: String,
    },
    /// Simulated CHSH value at the optimal coplanar settings.
    SimChsh,
    /// Run the GHZ construction with one PR-box.
    Ghz {
        #[arg(long)]
        x: u8,
        #[arg(long)]
        y: u8,
        #[arg(long)]
        z: u8,
        /// Index into the eight shared-randomness tables satisfying the
        /// first three GHZ parities.
        #[arg(long, default_value_t = 0)]
        table: usize,
    },
    /// Oblivious transfer of x_c.
    Ot {
        #[arg(long)]
        x0: u8,
        #[arg(long)]
        x1: u8,
        #[arg(long)]
        c: u8,
    },
    /// Inner product with one bit of communication.
    Ipcc {
        /// Alice's string, as 0/1 text or 0x-prefixed hex.
        #[arg(long)]
        xs: String,
        /// Bob's string, same syntax.
        #[arg(long)]
        ys: String,
    },
    /// Exhaustive search for pairwise PR-box strategies for corr3.
    SearchCorr3,
}

#[derive(Debug, Subcommand)]
enum PrAction {
    /// Print the PR-box (use `--format text` for the behavior file format).
    Show,
}

/// A failed run: the message for stderr, the exit code, and optionally a
/// record to print on stdout anyway.
struct Failure {
    code: u8,
    message: String,
    report: Option<Report>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity { .. } => 2,
            Error::Verification(_) => 3,
            Error::Domain(_) | Error::Parse { .. } | Error::BoxReused { .. } => 1,
        };
        Failure {
            code,
            message: e.to_string(),
            report: None,
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure {
        code: 1,
        message,
        report: None,
    }
}

fn read_behavior(path: &PathBuf) -> Result<Behavior, Failure> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| input_error(format!("reading stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| input_error(format!("reading {}: {e}", path.display())))?;
    }
    Ok(format::parse(&text)?)
}

fn parse_direction(text: &str, tolerance: f64) -> Result<UnitVector3, Failure> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| input_error(format!("direction {text:?} is not x,y,z")))?;
    let [x, y, z] = parts[..] else {
        return Err(input_error(format!(
            "direction {text:?} needs three components"
        )));
    };
    let norm = (x * x + y * y + z * z).sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > tolerance {
        return Err(input_error(format!(
            "direction {text:?} has norm {norm}, not 1 within {tolerance}"
        )));
    }
    Ok(UnitVector3::normalize(x, y, z)?)
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Pr {
            action: PrAction::Show,
        } => {
            let pr = Behavior::pr_box();
            let value = chsh(&pr)?;
            Ok(Report::with_text(
                json!({
                    "behavior": json::behavior(&pr),
                    "chsh": json::rational(&value),
                    "no_signalling": pr.check_no_signalling().is_no_signalling(),
                }),
                format::serialize(&pr),
            ))
        }
        Command::NsCheck { file } => {
            let b = read_behavior(file)?;
            let ns = b.check_no_signalling();
            let report = Report::new(json::no_signalling(&ns));
            if ns.is_no_signalling() {
                Ok(report)
            } else {
                Err(Failure {
                    code: 3,
                    message: format!("behavior signals: {} violations", ns.violations.len()),
                    report: Some(report),
                })
            }
        }
        Command::Chsh { file } => {
            let value = chsh(&read_behavior(file)?)?;
            Ok(Report::with_text(
                json!({ "chsh": json::rational(&value) }),
                value.to_string(),
            ))
        }
        Command::Local { file } => {
            let b = read_behavior(file)?;
            let cert = is_local(&b)?;
            cert.verify(&b)?;
            Ok(Report::new(json::locality(&cert)))
        }
        Command::Isotropic { v } => {
            let v = parse_rational(v)?;
            let b = Behavior::isotropic(&v)?;
            let cert = is_local(&b)?;
            cert.verify(&b)?;
            Ok(Report::new(json!({
                "v": json::rational(&v),
                "chsh": json::rational(&chsh(&b)?),
                "local": cert.is_local(),
                "certificate": json::locality(&cert),
            })))
        }
        Command::Monogamy { symmetric } => {
            let result = MonogamyProblem {
                clone_marginal: true,
                swap_symmetric: *symmetric,
            }
            .solve()?;
            Ok(Report::with_text(
                json!({
                    "V_star": json::rational(&result.v_star),
                    "swap_symmetric": symmetric,
                    "certificate_behavior": json::behavior(&result.certificate),
                }),
                format!("V* = {}", result.v_star),
            ))
        }
        Command::CloneSignalling => {
            let clone = perfect_clone_composite();
            let ns = clone.check_no_signalling();
            // Bob and Bob' holding inputs (0, 1) learn x as b + b'.
            let decodes_x = (0..2).all(|x| {
                let s = clone.scenario();
                clone.row(&[x, 0, 1]).is_ok_and(|row| {
                    row.iter().enumerate().all(|(o, p)| {
                        let out = s.output_tuple(o);
                        p.is_zero() || out[1] ^ out[2] == x
                    })
                })
            });
            let mut record = json::no_signalling(&ns);
            record["behavior"] = json::behavior(&clone);
            record["bob_pair_decodes_x"] = Value::Bool(decodes_x);
            Ok(Report::new(record))
        }
        Command::SimSinglet { a, b } => {
            let a_dir = parse_direction(a, cfg.norm_tolerance)?;
            let b_dir = parse_direction(b, cfg.norm_tolerance)?;
            let e = estimate_correlation(&a_dir, &b_dir, cfg.shots, cfg.seed)?;
            Ok(Report::new(json!({
                "a_dir": a_dir,
                "b_dir": b_dir,
                "shots": e.shots,
                "seed": cfg.seed,
                "mean_rA": e.mean_ra,
                "mean_rB": e.mean_rb,
                "mean_rArB": e.mean_ra_rb,
                "stderr": e.standard_error,
            })))
        }
        Command::SimChsh => {
            let settings = ChshSettings::optimal();
            let est = chsh_from_simulation(&settings, cfg.shots, cfg.seed)?;
            Ok(Report::new(json!({
                "settings": settings,
                "shots_per_setting": cfg.shots,
                "seed": cfg.seed,
                "correlators": est.correlators.iter().map(|c| c.mean_ra_rb).collect::<Vec<_>>(),
                "chsh": est.value,
                "stderr": est.standard_error,
            })))
        }
        Command::Ghz { x, y, z, table } => {
            let tables: Vec<SharedRandomnessTable> = SharedRandomnessTable::all()
                .into_iter()
                .filter(|t| t.fits_ghz_premise())
                .collect();
            let t = tables.get(*table).ok_or_else(|| {
                input_error(format!("table index {table} is not below {}", tables.len()))
            })?;
            let (a, b, c) = simulate_ghz_with_prbox(*x, *y, *z, t, cfg.seed)?;
            let inputs = [*x, *y, *z];
            let required = ghz_constraints()
                .into_iter()
                .find(|k| k.terms().iter().all(|&(p, v)| inputs[p] == v))
                .map(|k| k.parity());
            let lhv = check_lhv_impossible(&ghz_constraints(), 3)?;
            Ok(Report::new(json!({
                "x": x, "y": y, "z": z,
                "a": a, "b": b, "c": c,
                "parity": a ^ b ^ c,
                "required_parity": required,
                "table": t,
                "seed": cfg.seed,
                "lhv_strategies_checked": lhv.strategies_checked,
                "lhv_satisfying_count": lhv.satisfying_count,
            })))
        }
        Command::Ot { x0, x1, c } => {
            let t = run_ot(*x0, *x1, *c, cfg.seed)?;
            let mut record = serde_json::to_value(&t).expect("transcript");
            record["seed"] = json!(cfg.seed);
            Ok(Report::with_text(record, t.output.to_string()))
        }
        Command::Ipcc { xs, ys } => {
            let xs = parse_bits(xs)?;
            let ys = parse_bits(ys)?;
            let t = run_ip_cc(&xs, &ys, cfg.seed)?;
            let mut record = serde_json::to_value(&t).expect("transcript");
            record["seed"] = json!(cfg.seed);
            Ok(Report::with_text(record, t.f.to_string()))
        }
        Command::SearchCorr3 => {
            let lhv = check_lhv_impossible(&corr3_constraints(), 3)?;
            let search = search_corr3_strategies()?;
            let mut record = serde_json::to_value(&search).expect("search report");
            record["lhv_strategies_checked"] = json!(lhv.strategies_checked);
            record["lhv_satisfying_count"] = json!(lhv.satisfying_count);
            Ok(Report::new(record))
        }
    }
}

fn emit(text: &str) {
    // A closed pipe is not worth a panic.
    let _ = io::stdout().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(report) => {
            emit(&report.render(cli.config.format));
            ExitCode::SUCCESS
        }
        Err(failure) => {
            if let Some(report) = failure.report {
                emit(&report.render(cli.config.format));
            }
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
