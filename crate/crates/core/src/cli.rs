//! Command-line front end. [`run`] parses arguments, dispatches, writes the
//! report and returns the process exit status.

use std::fmt::Write as _;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;

use crate::error::Error;
use crate::hensel::{lift_welch_fixed_c, lift_welch_p2};
use crate::oracle::ScanBudget;
use crate::padic::decompose_unit;
use crate::verify::{self, VerifyConfig, VerifyReport};
use crate::welch::{InstanceSummary, SolutionReport, Solutions, WelchInstance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "welch", version, about = "Solve and count solutions of g^(x-1+c) = x (mod p^e)")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct InstanceArgs {
    /// Prime p.
    #[arg(long)]
    pub p: u64,
    /// Exponent e >= 1.
    #[arg(long, default_value_t = 1)]
    pub e: u32,
    /// Base g, a unit modulo p (any integer).
    #[arg(long, allow_hyphen_values = true)]
    pub g: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solutions x for fixed c.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, allow_hyphen_values = true)]
        c: i64,
        /// Inclusive range `a..b`; defaults to one period `1..m*p^e`.
        #[arg(long)]
        x_range: Option<String>,
    },
    /// All solution pairs (x, c) on the canonical grid.
    Pairs {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// The value set {f(p, c) mod p : 1 <= c <= m}.
    ValueSet {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// The grid f(x, c), x in 1..p^e (or --x-range), c in 1..m*p^(e-1).
    Table {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        x_range: Option<String>,
    },
    /// The c values solving the equation for a fixed unit x.
    CountC {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: i64,
    },
    /// Split g into its Teichmüller part and one-unit part modulo p^e.
    Teichmuller {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Hensel-lift the fixed point for class x0 (mod m) and c, with trace.
    Lift {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 0)]
        x0: u64,
        #[arg(long, allow_hyphen_values = true)]
        c: i64,
    },
    /// Check every theorem over all instances with p^e <= --max-modulus.
    Verify {
        #[arg(long, default_value_t = 1000)]
        max_modulus: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random cells per instance when a grid is too large to scan whole.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
}

/// Result of one command: output text and exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            status: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn invalid(msg: impl std::fmt::Display) -> Self {
        Self {
            status: EXIT_INVALID,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let status = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if status == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome {
                    status,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

/// Runs against the process arguments and streams, returning the exit status.
pub fn main_with_env() -> i32 {
    let outcome = run(std::env::args_os());
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    outcome.status
}

fn instance(args: &InstanceArgs) -> Result<WelchInstance, Error> {
    let g: BigInt = args
        .g
        .trim()
        .parse()
        .map_err(|_| Error::NonUnit(format!("{:?} (not an integer)", args.g)))?;
    WelchInstance::new(args.p, args.e, g)
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("range {s:?} must look like a..b"))?;
    let a: i64 = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad range end in {s:?}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok((a, b))
}

/// Dispatches a parsed command.
pub fn execute(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(o) => o,
        Err(msg) => Outcome::invalid(msg),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, String> {
    let fmt = cli.format;
    let e = |err: Error| err.to_string();
    match &cli.command {
        Command::Solve { instance: a, c, x_range } => {
            let w = instance(a).map_err(e)?;
            let (lo, hi) = match x_range {
                Some(r) => parse_range(r)?,
                None => (1, if w.p() == 2 { w.pe() } else { w.x_period() } as i64),
            };
            let report = w.solve_range(*c, lo, hi).map_err(e)?;
            Ok(report_outcome(&report, fmt))
        }
        Command::Pairs { instance: a } => {
            let w = instance(a).map_err(e)?;
            let report = w.solve_all_pairs().map_err(e)?;
            Ok(report_outcome(&report, fmt))
        }
        Command::ValueSet { instance: a } => {
            let w = instance(a).map_err(e)?;
            let vs = w.value_set_at_p().map_err(e)?;
            let values: Vec<u64> = vs.values.iter().copied().collect();
            let out = ValueSetOut {
                instance: w.summary(),
                values: values.clone(),
                generating_c_range: vs.generating_c_range,
                theorem: verify::theorem::VALUE_SET,
            };
            Ok(Outcome::ok(match fmt {
                Format::Json => json_line(&out),
                Format::Csv => csv_column("value", &values),
                Format::Text => format!("V = {{{}}}\n", join(&values, ", ")),
            }))
        }
        Command::Table { instance: a, x_range } => {
            let w = instance(a).map_err(e)?;
            let (lo, hi) = match x_range {
                Some(r) => parse_range(r)?,
                None => (1, w.pe() as i64),
            };
            let cells = (hi - lo + 1) as u128 * w.c_period() as u128;
            if cells > 10_000_000 {
                return Err(format!("table of {cells} cells is too large"));
            }
            Ok(Outcome::ok(table_output(&w, lo, hi, fmt)))
        }
        Command::CountC { instance: a, x } => {
            let w = instance(a).map_err(e)?;
            let count = w.count_c_for_fixed_x(*x).map_err(e)?;
            let predicted = if count.log.is_some() { w.c_period() / w.ord_pe() } else { 0 };
            let status = if predicted == count.count { EXIT_OK } else { EXIT_FAILED };
            let out = CountOut {
                instance: w.summary(),
                x: *x,
                log: count.log,
                solutions: count.cs.clone(),
                predicted_count: predicted,
                observed_count: count.count,
                theorem: verify::theorem::C_COUNT,
            };
            let stdout = match fmt {
                Format::Json => json_line(&out),
                Format::Csv => csv_column("c", &count.cs),
                Format::Text => format!(
                    "x = {}: {} values of c in 1..{}: {}\n",
                    x,
                    count.count,
                    w.c_period(),
                    join(&count.cs, ", ")
                ),
            };
            Ok(Outcome {
                status,
                stdout,
                stderr: String::new(),
            })
        }
        Command::Teichmuller { instance: a } => {
            let w = instance(a).map_err(e)?;
            let g: BigInt = a.g.trim().parse().map_err(|_| "bad g".to_string())?;
            let d = decompose_unit(&g, w.modulus()).map_err(e)?;
            let out = TeichmullerOut {
                p: w.p(),
                e: w.e(),
                g: d.g().to_string(),
                omega: d.omega().to_string(),
                one_unit: d.one_unit().to_string(),
                log_one_unit: w.log_one_unit().to_string(),
            };
            Ok(Outcome::ok(match fmt {
                Format::Json => json_line(&out),
                Format::Csv => format!(
                    "p,e,g,omega,one_unit,log_one_unit\n{},{},{},{},{},{}\n",
                    out.p, out.e, out.g, out.omega, out.one_unit, out.log_one_unit
                ),
                Format::Text => format!(
                    "{} = {} * {} (mod {}^{}), log <g> = {}\n",
                    out.g, out.omega, out.one_unit, out.p, out.e, out.log_one_unit
                ),
            }))
        }
        Command::Lift { instance: a, x0, c } => {
            let w = instance(a).map_err(e)?;
            let lifted = if w.p() == 2 {
                lift_welch_p2(&w, *c)
            } else {
                lift_welch_fixed_c(&w, *x0, *c)
            }
            .map_err(e)?;
            let base = lifted.trace.first().unwrap_or(&lifted.root).value() % w.p();
            let out = LiftOut {
                instance: w.summary(),
                x0: if w.p() == 2 { 0 } else { x0 % w.m() },
                c: *c,
                base_root: base.to_string(),
                trace: lifted.trace.iter().map(|r| r.to_string()).collect(),
                root: lifted.root.to_string(),
            };
            Ok(Outcome::ok(match fmt {
                Format::Json => json_line(&out),
                Format::Csv => {
                    let mut s = String::from("precision,root\n");
                    let _ = writeln!(s, "1,{}", out.base_root);
                    for (k, r) in out.trace.iter().enumerate() {
                        let _ = writeln!(s, "{},{}", k + 2, r);
                    }
                    s
                }
                Format::Text => format!("{} -> {} (trace: {})\n", out.base_root, out.root, out.trace.join(", ")),
            }))
        }
        Command::Verify {
            max_modulus,
            seed,
            samples,
        } => {
            let budget = ScanBudget::from_env().map_err(e)?;
            let config = VerifyConfig {
                max_modulus: *max_modulus,
                seed: *seed,
                samples: *samples,
                budget,
                ..VerifyConfig::default()
            };
            let report = verify::run(&config);
            let status = if report.passed() { EXIT_OK } else { EXIT_FAILED };
            Ok(Outcome {
                status,
                stdout: verify_output(&report, fmt),
                stderr: String::new(),
            })
        }
    }
}

#[derive(Serialize)]
struct ValueSetOut {
    instance: InstanceSummary,
    values: Vec<u64>,
    generating_c_range: [u64; 2],
    theorem: &'static str,
}

#[derive(Serialize)]
struct CountOut {
    instance: InstanceSummary,
    x: i64,
    log: Option<u64>,
    solutions: Vec<i64>,
    predicted_count: u64,
    observed_count: u64,
    theorem: &'static str,
}

#[derive(Serialize)]
struct TeichmullerOut {
    p: u64,
    e: u32,
    g: String,
    omega: String,
    one_unit: String,
    log_one_unit: String,
}

#[derive(Serialize)]
struct LiftOut {
    instance: InstanceSummary,
    x0: u64,
    c: i64,
    base_root: String,
    trace: Vec<String>,
    root: String,
}

#[derive(Serialize)]
struct TableOut {
    instance: InstanceSummary,
    columns: Vec<String>,
    rows: Vec<TableRow>,
}

#[derive(Serialize)]
struct TableRow {
    x: i64,
    values: Vec<u64>,
}

fn json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

fn join<T: ToString>(v: &[T], sep: &str) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn csv_column<T: ToString>(header: &str, v: &[T]) -> String {
    let mut s = format!("{header}\n");
    for x in v {
        let _ = writeln!(s, "{}", x.to_string());
    }
    s
}

fn report_outcome(report: &SolutionReport, fmt: Format) -> Outcome {
    let status = if report.verify().is_ok() { EXIT_OK } else { EXIT_FAILED };
    let stdout = match fmt {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Csv => match &report.solutions {
            Solutions::Xs(xs) => csv_column("x", xs),
            Solutions::Pairs(ps) => {
                let mut s = String::from("x,c\n");
                for p in ps {
                    let _ = writeln!(s, "{},{}", p.x, p.c);
                }
                s
            }
        },
        Format::Text => {
            let listed = match &report.solutions {
                Solutions::Xs(xs) => join(xs, ", "),
                Solutions::Pairs(ps) => ps.iter().map(|p| format!("({}, {})", p.x, p.c)).collect::<Vec<_>>().join(", "),
            };
            let predicted = report
                .predicted_count
                .map(|n| format!("{n} ({})", report.predicted_formula.unwrap_or("")))
                .unwrap_or_else(|| "none for this range".into());
            format!(
                "{}\nobserved {}, predicted {}\n{}\n",
                report.theorem, report.observed_count, predicted, listed
            )
        }
    };
    Outcome {
        status,
        stdout,
        stderr: String::new(),
    }
}

fn table_output(w: &WelchInstance, lo: i64, hi: i64, fmt: Format) -> String {
    let cols = w.c_period() as i64;
    let rows: Vec<TableRow> = (lo..=hi)
        .map(|x| TableRow {
            x,
            values: (1..=cols).map(|c| w.f_value(x, c)).collect(),
        })
        .collect();
    let headers: Vec<String> = (1..=cols).map(|c| format!("c={c}")).collect();
    match fmt {
        Format::Json => json_line(&TableOut {
            instance: w.summary(),
            columns: headers,
            rows,
        }),
        Format::Csv => {
            let mut s = format!("x,{}\n", headers.join(","));
            for r in &rows {
                let _ = writeln!(s, "{},{}", r.x, join(&r.values, ","));
            }
            s
        }
        Format::Text => {
            let width = w.pe().to_string().len().max(hi.to_string().len()).max(3) + 1;
            let mut s = format!("{:>width$} |", "x");
            for h in &headers {
                let _ = write!(s, "{h:>width$}");
            }
            s.push('\n');
            for r in &rows {
                let _ = write!(s, "{:>width$} |", r.x);
                for v in &r.values {
                    let _ = write!(s, "{v:>width$}");
                }
                s.push('\n');
            }
            s
        }
    }
}

fn verify_output(report: &VerifyReport, fmt: Format) -> String {
    match fmt {
        Format::Json => json_line(report),
        Format::Csv => {
            let mut s = String::from("theorem,passed,checks,failures\n");
            for t in &report.theorems {
                let _ = writeln!(s, "\"{}\",{},{},{}", t.theorem, t.passed, t.tally.checks, t.tally.failures);
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "{} instances with p^e <= {} (seed {})\n",
                report.instances, report.max_modulus, report.seed
            );
            for t in &report.theorems {
                let _ = writeln!(
                    s,
                    "{} {:>10} checks {:>6} failures  {}",
                    if t.passed { "PASS" } else { "FAIL" },
                    t.tally.checks,
                    t.tally.failures,
                    t.theorem
                );
                if let Some(f) = &t.tally.first_failure {
                    let _ = writeln!(s, "     first failure: {f}");
                }
            }
            let _ = writeln!(
                s,
                "value-set c': c - x + 1 matched {}/{}, -x + 1 - c matched {}/{}",
                report.closed_forms.c_minus_x_plus_one,
                report.closed_forms.checked,
                report.closed_forms.minus_x_plus_one_minus_c,
                report.closed_forms.checked
            );
            let _ = writeln!(s, "doubles found: {}", report.doubles_found);
            s
        }
    }
}
