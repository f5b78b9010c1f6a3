//! The `seucal` command line.
//!
//! Exit codes: 0 a decision was reached, 1 `verify` found a violation,
//! 2 usage or input error, 3 numeric or output failure. Every error is a
//! single `error=<kind> message=<text>` line on stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::calibration::{actuarial_worsening, becomes_worse};
use crate::curves::{emit_curves, indifference_table};
use crate::error::Error;
use crate::oracle::{must_remain_optimal_oracle, LpPoint};
use crate::scenario::Scenario;
use crate::suites::{self, SuiteReport, SuiteSizes, DEFAULT_SEED};
use crate::witness::{
    find_witness, interval_witness, k_ladder, WitnessCertificate, WitnessKind, WitnessOutcome,
};

pub const MUST_REMAIN_OPTIMAL: &str = "MUST_REMAIN_OPTIMAL";
pub const WITNESS_EXISTS: &str = "WITNESS_EXISTS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// `key=value` lines.
    Machine,
}

#[derive(Debug, Parser)]
#[command(
    name = "seucal",
    version,
    about = "Decide when rejecting one bet forces rejecting another under subjective expected utility",
    after_help = "Example:\n  seucal check scenarios/safer_gamble.toml --format machine"
)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for the random suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the main output (certificate, table, evidence, report) here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct KList {
    /// Risk-aversion levels, comma separated (default: 1, 2, 4, … up to k_max).
    #[arg(long = "k", value_delimiter = ',', num_args = 1..)]
    pub k: Vec<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print MUST_REMAIN_OPTIMAL or WITNESS_EXISTS.
    #[command(after_help = "Example:\n  seucal check scenarios/worse_gamble.toml")]
    Check { scenario: PathBuf },
    /// Build a counterexample certificate.
    #[command(
        after_help = "Example:\n  seucal witness scenarios/safer_gamble.toml --out cert.toml"
    )]
    Witness { scenario: PathBuf },
    /// Build a certificate valid on a whole wealth interval.
    #[command(
        name = "interval-witness",
        after_help = "Example:\n  seucal interval-witness scenarios/safer_gamble.toml --lo 0 --hi 0.5"
    )]
    IntervalWitness {
        scenario: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Indifference beliefs of the kinked witness, one block per k.
    #[command(
        after_help = "Example:\n  seucal indifference scenarios/safer_gamble.toml --k 1,4,16 --out beliefs.csv"
    )]
    Indifference {
        scenario: PathBuf,
        #[command(flatten)]
        ks: KList,
    },
    /// Closed-form beliefs with region labels and limits.
    #[command(
        after_help = "Example:\n  seucal regions scenarios/safer_gamble.toml --k 1,4,16 --out curves.csv"
    )]
    Regions {
        scenario: PathBuf,
        #[command(flatten)]
        ks: KList,
    },
    /// Decide by linear programming over beliefs, without the theorem.
    #[command(after_help = "Example:\n  seucal oracle scenarios/small_oracle.toml")]
    Oracle { scenario: PathBuf },
    /// Run the seeded property suites.
    #[command(
        after_help = "Example:\n  seucal verify --seed 7 --suite remark --suite sufficiency"
    )]
    Verify {
        /// Restrict to these suites.
        #[arg(long = "suite", value_enum)]
        suites: Vec<SuiteName>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    Sufficiency,
    Necessity,
    Oracle,
    Remark,
}

/// A failed invocation: exit code plus the reason line.
#[derive(Debug)]
struct Failure {
    code: i32,
    kind: String,
    message: String,
}

impl Failure {
    fn input(e: Error) -> Self {
        Failure {
            code: 2,
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }

    fn output(e: impl std::fmt::Display) -> Self {
        Failure {
            code: 3,
            kind: "io".into(),
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NumericFailure(_)
            | Error::SearchExhausted { .. }
            | Error::DegenerateUtility { .. }
            | Error::Io(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let text = e.render().to_string();
            let first = text
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            let _ = writeln!(err, "error=usage message={first}");
            return 2;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let message = f.message.replace('\n', " ");
            let _ = writeln!(err, "error={} message={message}", f.kind);
            f.code
        }
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    Scenario::load(path).map_err(Failure::input)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(Failure::output)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::output(format!("{}: {e}", path.display())))
}

/// Sends `payload` to `--out` when given, otherwise to stdout.
fn deliver(cli: &Cli, out: &mut dyn Write, payload: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => write_file(path, payload),
        None => emit(out, payload),
    }
}

fn render(format: Format, title: &str, fields: &[(&str, String)]) -> String {
    let mut s = String::new();
    match format {
        Format::Machine => {
            for (k, v) in fields {
                let _ = writeln!(s, "{k}={v}");
            }
        }
        Format::Text => {
            let _ = writeln!(s, "{title}");
            for (k, v) in fields.iter().skip(1) {
                let _ = writeln!(s, "  {k}: {v}");
            }
        }
    }
    s
}

fn kind_fields(kind: &WitnessKind) -> Vec<(&'static str, String)> {
    match *kind {
        WitnessKind::RiskNeutral => vec![("kind", "risk_neutral".into())],
        WitnessKind::LargeK { k } => vec![("kind", "large_k".into()), ("k", k.to_string())],
        WitnessKind::Interval { iota, w_lo, w_hi } => vec![
            ("kind", "interval".into()),
            ("iota", iota.to_string()),
            ("w_lo", w_lo.to_string()),
            ("w_hi", w_hi.to_string()),
        ],
    }
}

fn certificate_fields(cert: &WitnessCertificate) -> Vec<(&'static str, String)> {
    let mut fields = vec![("decision", WITNESS_EXISTS.to_string())];
    fields.extend(kind_fields(&cert.kind));
    fields.extend([
        ("belief", cert.belief.value().to_string()),
        ("wealth_shift", cert.wealth_shift.to_string()),
        ("verified_wealths", cert.verified_wealths.len().to_string()),
        ("min_safe_margin", format!("{:e}", cert.min_safe_margin())),
        ("min_flip_margin", format!("{:e}", cert.min_flip_margin())),
    ]);
    fields
}

fn k_list(ks: &KList, scenario: &Scenario) -> Vec<f64> {
    if ks.k.is_empty() {
        k_ladder(scenario.k_max)
    } else {
        ks.k.clone()
    }
}

#[derive(Serialize)]
struct EvidenceDocument<'a> {
    evidence: &'a LpPoint,
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    match &cli.command {
        Command::Check { scenario } => {
            let s = load(scenario)?;
            let worse = becomes_worse(&s.r, &s.r_hat);
            let decision = if worse {
                MUST_REMAIN_OPTIMAL
            } else {
                WITNESS_EXISTS
            };
            let fields = [
                ("decision", decision.to_string()),
                ("loss_grows", (s.r_hat.beta() >= s.r.beta()).to_string()),
                (
                    "actuarial_worsening",
                    actuarial_worsening(&s.r, &s.r_hat).to_string(),
                ),
            ];
            let text = render(cli.format, decision, &fields);
            emit(out, &text)?;
            if let Some(path) = &cli.out {
                write_file(path, &text)?;
            }
            Ok(0)
        }
        Command::Witness { scenario } => {
            let s = load(scenario)?;
            match find_witness(&s)? {
                WitnessOutcome::MustRemainOptimal => {
                    emit(
                        out,
                        &render(
                            cli.format,
                            MUST_REMAIN_OPTIMAL,
                            &[("decision", MUST_REMAIN_OPTIMAL.into())],
                        ),
                    )?;
                }
                WitnessOutcome::Witness(cert) => {
                    emit_certificate(cli, out, &cert)?;
                }
            }
            Ok(0)
        }
        Command::IntervalWitness {
            scenario,
            lo,
            hi,
            step,
        } => {
            let s = load(scenario)?;
            let cert = interval_witness(&s.r, &s.r_hat, *lo, *hi, *step, &s.settings())?;
            emit_certificate(cli, out, &cert)?;
            Ok(0)
        }
        Command::Indifference { scenario, ks } => {
            let s = load(scenario)?;
            let table = indifference_table(&s, &k_list(ks, &s))?;
            deliver(cli, out, &table)?;
            Ok(0)
        }
        Command::Regions { scenario, ks } => {
            let s = load(scenario)?;
            let ks = k_list(ks, &s);
            let mut buf = Vec::new();
            emit_curves(&s, &ks, &mut buf)?;
            deliver(cli, out, &String::from_utf8_lossy(&buf))?;
            Ok(0)
        }
        Command::Oracle { scenario } => {
            let s = load(scenario)?;
            let verdict = must_remain_optimal_oracle(&s)?;
            let decision = if verdict.must_remain_optimal {
                MUST_REMAIN_OPTIMAL
            } else {
                WITNESS_EXISTS
            };
            let fields = [
                ("decision", decision.to_string()),
                ("cells", verdict.cells.to_string()),
                ("best_margin", format!("{:e}", verdict.best_margin)),
            ];
            emit(out, &render(cli.format, decision, &fields))?;
            if let Some(evidence) = &verdict.evidence {
                let doc = toml::to_string(&EvidenceDocument { evidence })
                    .map_err(|e| Failure::output(e.to_string()))?;
                emit(out, &doc)?;
                if let Some(path) = &cli.out {
                    write_file(path, &doc)?;
                }
            }
            Ok(0)
        }
        Command::Verify { suites: chosen } => {
            let seed = cli.seed.unwrap_or(DEFAULT_SEED);
            let reports = run_suites(seed, chosen)?;
            let mut full = String::new();
            for r in &reports {
                let line = match cli.format {
                    Format::Machine => format!("{}\n", r.summary()),
                    Format::Text => format!(
                        "{} {}\n",
                        if r.passed() { "PASS" } else { "FAIL" },
                        r.summary()
                    ),
                };
                emit(out, &line)?;
                for v in &r.violations {
                    emit(out, &format!("violation suite={} {v}\n", r.suite))?;
                }
                full.push_str(&r.render());
            }
            if let Some(path) = &cli.out {
                write_file(path, &full)?;
            }
            Ok(if reports.iter().all(SuiteReport::passed) {
                0
            } else {
                1
            })
        }
    }
}

fn emit_certificate(
    cli: &Cli,
    out: &mut dyn Write,
    cert: &WitnessCertificate,
) -> Result<(), Failure> {
    emit(
        out,
        &render(cli.format, WITNESS_EXISTS, &certificate_fields(cert)),
    )?;
    let doc = cert.to_toml_string()?;
    match &cli.out {
        Some(path) => {
            write_file(path, &doc)?;
            if cli.format == Format::Machine {
                emit(out, &format!("certificate={}\n", path.display()))?;
            }
            Ok(())
        }
        None => emit(out, &doc),
    }
}

fn run_suites(seed: u64, chosen: &[SuiteName]) -> Result<Vec<SuiteReport>, Failure> {
    let sizes = SuiteSizes::default();
    let all = [
        SuiteName::Sufficiency,
        SuiteName::Necessity,
        SuiteName::Oracle,
        SuiteName::Remark,
    ];
    let mut reports = Vec::new();
    for name in all {
        if !chosen.is_empty() && !chosen.contains(&name) {
            continue;
        }
        reports.push(match name {
            SuiteName::Sufficiency => suites::sufficiency_suite(seed, sizes.sufficiency)?,
            SuiteName::Necessity => suites::necessity_suite(seed, sizes.necessity)?,
            SuiteName::Oracle => suites::oracle_suite(seed, sizes.oracle)?,
            SuiteName::Remark => {
                suites::remark_suite(seed, sizes.remark_binary, sizes.remark_general)?
            }
        });
    }
    Ok(reports)
}
