//! `chowla`: command-line front end for chowla-core.
//!
//! Exit codes: 0 success, 1 valid but negative result (nothing found,
//! constant sign so far, certificate rejected), 2 usage or domain error.

use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use chowla_core::certificate::{family_to_canonical_json, from_json, to_canonical_json};
use chowla_core::family::{find_seed, generate_family_with_budget, QuadraticPoly, SeedSolution};
use chowla_core::liouville::{ap_sign_flip, lambda_point, LiouvilleSieve};
use chowla_core::pell::pell_fundamental;
use chowla_core::signchange::{
    decompose_value, monic_witness_conclude, prime_square_disc_solutions_with_budget,
    scan_certificate_with, verify_certificate, ScanOptions, ScanOutcome,
};
use chowla_core::{factorize, Error};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "chowla",
    version,
    about = "Liouville sign changes along quadratic polynomials"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,

    /// Largest x the summatory commands may sieve to.
    #[arg(long, global = true, env = "CHOWLA_SIEVE_LIMIT", default_value_t = 1_000_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    sieve_limit: u64,

    /// Pell solutions tried before family generation gives up.
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pell_budget: u64,

    /// Default scan bound for `certify`, `seed` and `monic`.
    #[arg(long, global = true, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    scan_limit: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// λ(n) by factorization.
    Lambda { n: BigInt },
    /// Summatory function L(x), or the table of L(1..=x) with --csv.
    Lsum {
        x: u64,
        #[arg(long)]
        csv: bool,
    },
    /// Σ_{n<=limit} λ(n)/n^s.
    Dirichlet {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        limit: u64,
    },
    /// Smallest k >= 1 with λ(n0 + step·k) != λ(n0).
    Apflip {
        #[arg(long)]
        n0: u64,
        #[arg(long)]
        step: u64,
    },
    /// Prime factorization.
    Factor { n: BigInt },
    /// f(n) = l·m² with l squarefree.
    Decompose {
        #[arg(long)]
        poly: QuadraticPoly,
        #[arg(long, allow_hyphen_values = true)]
        n: BigInt,
    },
    /// Solutions of x² - N·y² = 1.
    Pell {
        modulus: BigUint,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// First n in 1..=max with f(n) = l·m².
    Seed {
        #[arg(long)]
        poly: QuadraticPoly,
        #[arg(long)]
        l: BigUint,
        #[arg(long)]
        max: Option<u64>,
    },
    /// Verified members of f(n) = l·m² grown from a seed.
    Family {
        #[arg(long)]
        poly: QuadraticPoly,
        #[arg(long)]
        l: BigUint,
        /// Seed as "n0,m0".
        #[arg(long, allow_hyphen_values = true)]
        seed: String,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long)]
        json: bool,
    },
    /// Scan for opposite-sign witnesses and emit a certificate.
    Certify {
        #[arg(long)]
        poly: QuadraticPoly,
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Re-check a certificate JSON file ("-" for stdin).
    Verify { path: PathBuf },
    /// Monic identity check and λ = -1 witness search.
    Monic {
        #[arg(long)]
        poly: QuadraticPoly,
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Solutions for prime a and square discriminant.
    Primesq {
        #[arg(long)]
        poly: QuadraticPoly,
        #[arg(long)]
        l: BigUint,
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
}

/// A failed command: message for stderr and the exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::usage(e.to_string())
    }
}

/// Successful output plus exit status (0, or 1 for negative results).
struct Output {
    code: u8,
    text: String,
}

impl Output {
    fn ok(text: impl Into<String>) -> Self {
        Output {
            code: 0,
            text: text.into(),
        }
    }

    fn negative(text: impl Into<String>) -> Self {
        Output {
            code: 1,
            text: text.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if !out.text.is_empty() {
                println!("{}", out.text.trim_end_matches('\n'));
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let json_out = cli.format == OutputFormat::Json;
    let budget = usize::try_from(cli.pell_budget).unwrap_or(usize::MAX);
    match &cli.command {
        Command::Lambda { n } => {
            let sign = lambda_point(n)?;
            Ok(Output::ok(if json_out {
                json!({"n": n.to_string(), "lambda": sign}).to_string()
            } else {
                sign.to_string()
            }))
        }
        Command::Lsum { x, csv } => {
            if *x > cli.sieve_limit {
                return Err(Failure::usage(format!(
                    "x = {x} exceeds the sieve limit {}; raise it with --sieve-limit or CHOWLA_SIEVE_LIMIT",
                    cli.sieve_limit
                )));
            }
            let sieve = LiouvilleSieve::build(*x)?;
            if *csv || cli.format == OutputFormat::Csv {
                let mut out = String::from("n,L\n");
                for (i, l) in sieve.prefix_sums().iter().enumerate() {
                    writeln!(out, "{},{l}", i + 1).expect("write to String");
                }
                return Ok(Output::ok(out));
            }
            let value = sieve.summatory(*x)?;
            Ok(Output::ok(if json_out {
                json!({"x": x, "L": value}).to_string()
            } else {
                value.to_string()
            }))
        }
        Command::Dirichlet { s, limit } => {
            if *limit > cli.sieve_limit {
                return Err(Failure::usage(format!(
                    "limit = {limit} exceeds the sieve limit {}",
                    cli.sieve_limit
                )));
            }
            let value = chowla_core::dirichlet_partial(*s, *limit)?;
            // Σ_{n>X} n^-s <= X^(1-s) / (s-1)
            let tail = (*limit as f64).powf(1.0 - s) / (s - 1.0);
            Ok(Output::ok(if json_out {
                json!({"s": s, "limit": limit, "value": value, "tail_bound": tail}).to_string()
            } else {
                format!("{value:.12}")
            }))
        }
        Command::Apflip { n0, step } => {
            let k = ap_sign_flip(*n0, *step)?;
            Ok(Output::ok(if json_out {
                json!({"n0": n0, "step": step, "k": k}).to_string()
            } else {
                format!("k={k}")
            }))
        }
        Command::Factor { n } => {
            let f = factorize(n)?;
            if json_out {
                let factors: Vec<_> = f
                    .factors()
                    .iter()
                    .map(|(p, e)| json!({"p": p.to_string(), "e": e}))
                    .collect();
                return Ok(Output::ok(
                    json!({"n": n.to_string(), "factors": factors}).to_string(),
                ));
            }
            let parts: Vec<String> = f
                .factors()
                .iter()
                .map(|(p, &e)| {
                    if e == 1 {
                        p.to_string()
                    } else {
                        format!("{p}^{e}")
                    }
                })
                .collect();
            Ok(Output::ok(if parts.is_empty() {
                "1".to_string()
            } else {
                parts.join(" * ")
            }))
        }
        Command::Decompose { poly, n } => {
            let d = decompose_value(poly, n)?;
            Ok(Output::ok(if json_out {
                json!({"n": n.to_string(), "value": d.value.to_string(), "l": d.l.to_string(),
                       "m": d.m.to_string(), "lambda": d.lambda})
                .to_string()
            } else {
                format!(
                    "f({n}) = {} = {} * {}^2, lambda={}",
                    d.value, d.l, d.m, d.lambda
                )
            }))
        }
        Command::Pell { modulus, count } => {
            let fund = pell_fundamental(modulus)?;
            let sols: Vec<_> = fund.powers().take(*count).collect();
            if json_out {
                let rows: Vec<_> = sols
                    .iter()
                    .enumerate()
                    .map(|(k, s)| json!({"k": k + 1, "x": s.x().to_string(), "y": s.y().to_string()}))
                    .collect();
                return Ok(Output::ok(serde_json::Value::from(rows).to_string()));
            }
            let lines: Vec<String> = sols
                .iter()
                .map(|s| format!("x={} y={}", s.x(), s.y()))
                .collect();
            Ok(Output::ok(lines.join("\n")))
        }
        Command::Seed { poly, l, max } => {
            match find_seed(poly, l, max.unwrap_or(cli.scan_limit))? {
                Some(seed) => Ok(Output::ok(if json_out {
                    json!({"n0": seed.n0().to_string(), "m0": seed.m0().to_string(), "t0": seed.t0().to_string()})
                    .to_string()
                } else {
                    format!("n0={} m0={} t0={}", seed.n0(), seed.m0(), seed.t0())
                })),
                None => Ok(Output::negative("not found")),
            }
        }
        Command::Family {
            poly,
            l,
            seed,
            count,
            json,
        } => {
            let (n0, m0) = parse_seed(seed)?;
            let seed = SeedSolution::new(*poly, l.clone(), n0, m0)?;
            let fam = generate_family_with_budget(&seed, *count, budget)?;
            if *json || json_out {
                return Ok(Output::ok(family_to_canonical_json(&fam)?));
            }
            let lines: Vec<String> = fam
                .members()
                .iter()
                .map(|m| format!("n={} m={}", m.n, m.m))
                .collect();
            Ok(Output::ok(lines.join("\n")))
        }
        Command::Certify { poly, limit, json } => {
            let limit = limit.unwrap_or(cli.scan_limit);
            let options = ScanOptions {
                pell_budget: budget,
                ..ScanOptions::default()
            };
            match scan_certificate_with(poly, limit, &options)? {
                ScanOutcome::Certificate(cert) => {
                    if *json || json_out {
                        return Ok(Output::ok(to_canonical_json(&cert)?));
                    }
                    let mut out = format!("certificate for f(x) = {poly}, A0 = {}\n", cert.a0);
                    for (w, fam) in cert.witnesses.iter().zip(&cert.families) {
                        let last = fam
                            .members()
                            .last()
                            .map(|m| m.n.to_string())
                            .unwrap_or_default();
                        writeln!(
                            out,
                            "  n={} f(n)={} = {} * {}^2 lambda={} family: {} members up to n={}",
                            w.n,
                            w.value,
                            w.l,
                            w.m,
                            w.lambda,
                            fam.members().len(),
                            last
                        )
                        .expect("write to String");
                    }
                    Ok(Output::ok(out))
                }
                ScanOutcome::ConstantSoFar {
                    sign,
                    range,
                    skipped,
                } => {
                    let sign = sign.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
                    Ok(Output::negative(if json_out || *json {
                        json!({"constant_so_far": sign, "start": range.start(), "end": range.end(),
                               "skipped": skipped})
                        .to_string()
                    } else {
                        format!(
                            "constant so far: lambda(f(n)) = {sign} for n in {}..={} ({skipped} non-positive values skipped)",
                            range.start(),
                            range.end()
                        )
                    }))
                }
            }
        }
        Command::Verify { path } => {
            let text = read_input(path)?;
            let cert = from_json(text.trim_end())?;
            let verdict = verify_certificate(&cert);
            if verdict.is_valid() {
                Ok(Output::ok("valid"))
            } else {
                Ok(Output::negative(format!(
                    "invalid\n{}",
                    verdict.failures.join("\n")
                )))
            }
        }
        Command::Monic { poly, limit } => {
            let report = monic_witness_conclude(poly, limit.unwrap_or(cli.scan_limit))?;
            let checked = format!(
                "{}..={}",
                report.identity_checked.start(),
                report.identity_checked.end()
            );
            let text = if json_out {
                json!({"identity_checked": checked, "witness": report.witness}).to_string()
            } else {
                match report.witness {
                    Some(n0) => format!("identity holds for n in {checked}; witness n0={n0}"),
                    None => format!("identity holds for n in {checked}; no witness"),
                }
            };
            Ok(match report.witness {
                Some(_) => Output::ok(text),
                None => Output::negative(text),
            })
        }
        Command::Primesq { poly, l, count } => {
            let sols = match prime_square_disc_solutions_with_budget(poly, l, *count, budget) {
                Err(e @ Error::NoIntegralSolution(_)) => {
                    return Ok(Output::negative(e.to_string()))
                }
                other => other?,
            };
            if json_out {
                let rows: Vec<_> = sols
                    .iter()
                    .map(|s| json!({"n": s.n.to_string(), "m": s.m.to_string()}))
                    .collect();
                return Ok(Output::ok(serde_json::Value::from(rows).to_string()));
            }
            let lines: Vec<String> = sols
                .iter()
                .map(|s| format!("n={} m={}", s.n, s.m))
                .collect();
            Ok(Output::ok(lines.join("\n")))
        }
    }
}

fn parse_seed(text: &str) -> Result<(BigInt, BigUint), Failure> {
    let bad = || Failure::usage(format!("--seed expects \"n0,m0\", got {text:?}"));
    let (n0, m0) = text.split_once(',').ok_or_else(bad)?;
    let n0 = n0.trim().parse::<BigInt>().map_err(|_| bad())?;
    let m0 = m0.trim().parse::<BigUint>().map_err(|_| bad())?;
    Ok((n0, m0))
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::usage(format!("reading stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}
