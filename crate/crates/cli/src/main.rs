//! Command-line surface for the numerical-monoid invariant library.
//!
//! Every subcommand prints a machine-readable document (JSON by default,
//! CSV for datasets) to standard output or `--out`. Failures print a
//! single-line JSON object to standard error. Exit status: 0 on success,
//! 1 on validation errors, 2 when a search budget is exhausted or a
//! certificate is inconclusive.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use numonoid::{
    cat3, comp3_generate, degree_certificate, dirichlet_find, falsify, invariant_report,
    parse_formula, strata_dataset, CertificateOutcome, DirichletQuery, FalsifyOutcome, FamilyError,
    FormulaKind, GenerateOptions, InvariantKind, NumericalMonoid, StrataDataset,
};

#[derive(Parser)]
#[command(
    name = "numonoid",
    version,
    about = "Exact factorization invariants of numerical monoids",
    disable_help_subcommand = true
)]
struct Cli {
    /// Output format; defaults to csv for `dataset` and json elsewhere.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Write the output document to a file instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Full invariant report: catenary, tame, elasticity, Betti elements.
    Invariants {
        /// Generators as a comma-separated list, e.g. 3,5,7.
        #[arg(long, value_name = "LIST")]
        gens: String,
        /// Also report all elements with positive catenary degree up to this
        /// bound.
        #[arg(long, value_name = "N")]
        scan_bound: Option<i64>,
    },
    /// All factorizations of an element over the atoms.
    Factorizations {
        #[arg(long, value_name = "LIST")]
        gens: String,
        #[arg(long, value_name = "N")]
        element: i64,
    },
    /// Certified closed form of the catenary degree for three pairwise
    /// coprime atoms.
    Cat3 {
        #[arg(long, value_name = "LIST")]
        gens: String,
    },
    /// Smallest prime x ≡ i (mod p) whose class-j partner y approximates
    /// alpha within eps.
    Dirichlet {
        /// Target ratio as an exact rational, e.g. 11/2.
        #[arg(long, value_name = "P/Q")]
        alpha: String,
        /// Window half-width as an exact rational, e.g. 1/10.
        #[arg(long, value_name = "P/Q")]
        eps: String,
        /// Odd prime modulus.
        #[arg(long, value_name = "P")]
        p: i64,
        /// Residue class of the prime x.
        #[arg(long, value_name = "I")]
        i: i64,
        /// Residue class of y.
        #[arg(long, value_name = "J")]
        j: i64,
        /// Primes examined before giving up.
        #[arg(long, value_name = "B", default_value_t = 10_000)]
        budget: usize,
    },
    /// One family record for the stratum (h1, k).
    Family {
        #[arg(long, value_name = "P")]
        h1: i64,
        #[arg(long, value_name = "K")]
        k: i64,
        /// Smallest allowed h2.
        #[arg(long, value_name = "N")]
        h2_min: Option<i64>,
    },
    /// Deterministic dataset of family records across all strata of h1.
    Dataset {
        #[arg(long, value_name = "P")]
        h1: i64,
        /// Records per stratum.
        #[arg(long, value_name = "S")]
        per_stratum: usize,
        /// Fraction of records per stratum checked against the
        /// definitional oracles, as an exact rational in [0, 1].
        #[arg(long, value_name = "F")]
        crosscheck: String,
    },
    /// Search family monoids for a counterexample to a candidate formula.
    Falsify {
        /// Formula text; explicit branches are separated by ';'.
        #[arg(long, value_name = "TEXT")]
        formula: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_enum)]
        invariant: InvariantArg,
        /// Monoids examined before giving up.
        #[arg(long, value_name = "B", default_value_t = 100)]
        budget: usize,
    },
    /// Exact-linear-algebra certificate that no nonzero polynomial in
    /// X2, X3, Y of total degree ≤ D fits the catenary data of h1.
    Certify {
        #[arg(long, value_name = "P")]
        h1: i64,
        #[arg(long, value_name = "D")]
        degree: u32,
        #[arg(long, value_name = "Q")]
        points_per_stratum: usize,
        /// Dataset file (CSV or JSON as written by `dataset`); generated
        /// on the fly when omitted.
        #[arg(long, value_name = "FILE")]
        dataset: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Explicit,
    Implicit,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InvariantArg {
    Catenary,
    Tame,
    Elasticity,
}

/// A failure to report on standard error as single-line JSON.
struct Failure {
    kind: &'static str,
    message: String,
    exit: u8,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure {
            kind: "validation",
            message: message.into(),
            exit: 1,
        }
    }

    fn budget(message: impl Into<String>) -> Self {
        Failure {
            kind: "budget",
            message: message.into(),
            exit: 2,
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure {
            kind: "io",
            message: message.into(),
            exit: 1,
        }
    }
}

/// A rendered document plus the exit status it should produce.
struct Outcome {
    document: String,
    exit: u8,
}

impl Outcome {
    fn ok(document: String) -> Self {
        Outcome { document, exit: 0 }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report(&Failure {
                kind: "usage",
                message: e.to_string(),
                exit: 1,
            });
            return ExitCode::from(1);
        }
    };
    let format = default_format(&cli);
    let out = cli.out.clone();
    match run(cli.command, format) {
        Ok(outcome) => {
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, outcome.document.as_bytes()) {
                    report(&Failure::io(format!("cannot write {}: {e}", path.display())));
                    return ExitCode::from(1);
                }
            } else {
                print!("{}", outcome.document);
            }
            ExitCode::from(outcome.exit)
        }
        Err(failure) => {
            report(&failure);
            ExitCode::from(failure.exit)
        }
    }
}

fn default_format(cli: &Cli) -> OutputFormat {
    cli.format.unwrap_or(match cli.command {
        Command::Dataset { .. } => OutputFormat::Csv,
        _ => OutputFormat::Json,
    })
}

/// Prints the single-line machine-readable error object to standard error.
fn report(failure: &Failure) {
    #[derive(Serialize)]
    struct ErrorBody<'a> {
        kind: &'a str,
        message: &'a str,
    }
    #[derive(Serialize)]
    struct ErrorDoc<'a> {
        error: ErrorBody<'a>,
    }
    let doc = ErrorDoc {
        error: ErrorBody {
            kind: failure.kind,
            message: &failure.message,
        },
    };
    eprintln!(
        "{}",
        serde_json::to_string(&doc).expect("error document serializes")
    );
}

fn parse_generators(text: &str) -> Result<Vec<i64>, Failure> {
    let gens: Result<Vec<i64>, _> = text
        .split(',')
        .map(|piece| piece.trim().parse::<i64>())
        .collect();
    match gens {
        Ok(list) if !list.is_empty() => Ok(list),
        _ => Err(Failure::validation(format!(
            "generators must be a comma-separated list of integers, got {text:?}"
        ))),
    }
}

/// Parses an exact rational written as `p/q` or an integer literal.
/// Floating-point syntax is rejected.
fn parse_rational(text: &str, what: &str) -> Result<BigRational, Failure> {
    let t = text.trim();
    let make = |n: &str, d: &str| -> Option<BigRational> {
        let numer: BigInt = n.trim().parse().ok()?;
        let denom: BigInt = d.trim().parse().ok()?;
        if denom.is_zero() {
            None
        } else {
            Some(BigRational::new(numer, denom))
        }
    };
    let parsed = match t.split_once('/') {
        Some((n, d)) => make(n, d),
        None => t.parse::<BigInt>().ok().map(BigRational::from),
    };
    parsed.ok_or_else(|| {
        Failure::validation(format!(
            "{what} must be an exact rational like 7/3 or an integer, got {text:?}"
        ))
    })
}

fn monoid_from(gens: &str) -> Result<NumericalMonoid, Failure> {
    let gens = parse_generators(gens)?;
    NumericalMonoid::new(&gens).map_err(|e| Failure::validation(e.to_string()))
}

fn json_of<T: Serialize>(value: &T) -> String {
    let mut doc = serde_json::to_string(value).expect("output serializes");
    doc.push('\n');
    doc
}

fn reject_csv(format: OutputFormat) -> Result<(), Failure> {
    if format == OutputFormat::Csv {
        Err(Failure::validation(
            "csv output is only available for the dataset subcommand",
        ))
    } else {
        Ok(())
    }
}

fn run(command: Command, format: OutputFormat) -> Result<Outcome, Failure> {
    match command {
        Command::Invariants { gens, scan_bound } => {
            reject_csv(format)?;
            let m = monoid_from(&gens)?;
            if let Some(bound) = scan_bound {
                if bound < 0 {
                    return Err(Failure::validation("scan bound must be non-negative"));
                }
            }
            let report = invariant_report(&m, scan_bound);
            let document = match format {
                OutputFormat::Json => json_of(&report),
                OutputFormat::Text => {
                    let mut text = String::new();
                    let _ = writeln!(text, "atoms {}", join(&report.atoms));
                    let _ = writeln!(text, "frobenius {}", report.frobenius);
                    let _ = writeln!(text, "catenary {}", report.catenary);
                    let _ = writeln!(text, "tame {}", report.tame);
                    let _ = writeln!(
                        text,
                        "elasticity {}/{}",
                        report.elasticity.num, report.elasticity.den
                    );
                    let _ = writeln!(text, "betti {}", join(&report.betti));
                    text
                }
                OutputFormat::Csv => unreachable!("rejected above"),
            };
            Ok(Outcome::ok(document))
        }
        Command::Factorizations { gens, element } => {
            reject_csv(format)?;
            let m = monoid_from(&gens)?;
            let factorizations: Vec<Vec<i64>> = m
                .factorizations(element)
                .into_iter()
                .map(|f| f.exponents().to_vec())
                .collect();
            #[derive(Serialize)]
            struct FactorizationList<'a> {
                atoms: &'a [i64],
                element: i64,
                count: usize,
                factorizations: &'a [Vec<i64>],
            }
            let document = match format {
                OutputFormat::Json => json_of(&FactorizationList {
                    atoms: m.atoms(),
                    element,
                    count: factorizations.len(),
                    factorizations: &factorizations,
                }),
                OutputFormat::Text => {
                    let mut text = String::new();
                    for f in &factorizations {
                        let _ = writeln!(text, "{}", join(f));
                    }
                    text
                }
                OutputFormat::Csv => unreachable!("rejected above"),
            };
            Ok(Outcome::ok(document))
        }
        Command::Cat3 { gens } => {
            reject_csv(format)?;
            let m = monoid_from(&gens)?;
            let form = cat3(&m).map_err(|e| Failure::validation(e.to_string()))?;
            let document = match format {
                OutputFormat::Json => json_of(&form),
                OutputFormat::Text => format!("value {}\n", form.value),
                OutputFormat::Csv => unreachable!("rejected above"),
            };
            Ok(Outcome::ok(document))
        }
        Command::Dirichlet {
            alpha,
            eps,
            p,
            i,
            j,
            budget,
        } => {
            reject_csv(format)?;
            let query = DirichletQuery {
                alpha: parse_rational(&alpha, "alpha")?,
                epsilon: parse_rational(&eps, "eps")?,
                p,
                i,
                j,
                max_candidates: budget,
            };
            let (x, y) = dirichlet_find(&query).map_err(|e| match e {
                FamilyError::BudgetExhausted { .. } => Failure::budget(e.to_string()),
                other => Failure::validation(other.to_string()),
            })?;
            #[derive(Serialize)]
            struct Pair {
                x: i64,
                y: i64,
            }
            let document = match format {
                OutputFormat::Json => json_of(&Pair { x, y }),
                OutputFormat::Text => format!("{x} {y}\n"),
                OutputFormat::Csv => unreachable!("rejected above"),
            };
            Ok(Outcome::ok(document))
        }
        Command::Family { h1, k, h2_min } => {
            reject_csv(format)?;
            let mut opts = GenerateOptions::default();
            if let Some(min) = h2_min {
                opts.h2_min = min;
            }
            let record =
                comp3_generate(h1, k, &opts).map_err(|e| Failure::validation(e.to_string()))?;
            let document = match format {
                OutputFormat::Json => json_of(&record),
                OutputFormat::Text => format!(
                    "h1 {}\nk {}\nh2 {}\nh3 {}\nlambda {}\npredicted {}\n",
                    record.h1,
                    record.k,
                    record.h2,
                    record.h3,
                    join(&record.lambda),
                    record.predicted
                ),
                OutputFormat::Csv => unreachable!("rejected above"),
            };
            Ok(Outcome::ok(document))
        }
        Command::Dataset {
            h1,
            per_stratum,
            crosscheck,
        } => {
            let fraction = parse_rational(&crosscheck, "crosscheck")?;
            let dataset = strata_dataset(h1, per_stratum, &fraction)
                .map_err(|e| Failure::validation(e.to_string()))?;
            let document = match format {
                OutputFormat::Json => json_of(&dataset),
                OutputFormat::Csv | OutputFormat::Text => dataset.to_csv(),
            };
            Ok(Outcome::ok(document))
        }
        Command::Falsify {
            formula,
            kind,
            invariant,
            budget,
        } => {
            reject_csv(format)?;
            let kind = match kind {
                KindArg::Explicit => FormulaKind::Explicit,
                KindArg::Implicit => FormulaKind::Implicit,
            };
            let invariant = match invariant {
                InvariantArg::Catenary => InvariantKind::Catenary,
                InvariantArg::Tame => InvariantKind::Tame,
                InvariantArg::Elasticity => InvariantKind::Elasticity,
            };
            let candidate =
                parse_formula(&formula, kind).map_err(|e| Failure::validation(e.to_string()))?;
            let outcome = falsify(&candidate, invariant, budget)
                .map_err(|e| Failure::validation(e.to_string()))?;
            let exit = match &outcome {
                FalsifyOutcome::Counterexample(_) => 0,
                FalsifyOutcome::NotFoundWithinBudget { .. } => 2,
            };
            let document = match format {
                OutputFormat::Json => json_of(&outcome),
                OutputFormat::Text => match &outcome {
                    FalsifyOutcome::Counterexample(cx) => format!(
                        "counterexample atoms {} actual {} examined {}\n",
                        join(&cx.atoms),
                        cx.actual,
                        cx.examined
                    ),
                    FalsifyOutcome::NotFoundWithinBudget { examined } => {
                        format!("not found within budget; examined {examined}\n")
                    }
                },
                OutputFormat::Csv => unreachable!("rejected above"),
            };
            Ok(Outcome { document, exit })
        }
        Command::Certify {
            h1,
            degree,
            points_per_stratum,
            dataset,
        } => {
            reject_csv(format)?;
            let data = match dataset {
                Some(path) => load_dataset(&path)?,
                None => strata_dataset(h1, points_per_stratum, &BigRational::zero())
                    .map_err(|e| Failure::validation(e.to_string()))?,
            };
            let certificate = degree_certificate(h1, degree, points_per_stratum, &data)
                .map_err(|e| Failure::validation(e.to_string()))?;
            let exit = match certificate.outcome {
                CertificateOutcome::Inconclusive { .. } => 2,
                _ => 0,
            };
            let document = match format {
                OutputFormat::Json => json_of(&certificate),
                OutputFormat::Text => {
                    let status = match &certificate.outcome {
                        CertificateOutcome::Certified => "certified",
                        CertificateOutcome::CertifiedAfterFalsification { .. } => {
                            "certified_after_falsification"
                        }
                        CertificateOutcome::Inconclusive { .. } => "inconclusive",
                    };
                    format!(
                        "status {status}\nrows {}\ncols {}\nrank {}\nnullity {}\n",
                        certificate.matrix_rows,
                        certificate.matrix_cols,
                        certificate.rank,
                        certificate.nullity
                    )
                }
                OutputFormat::Csv => unreachable!("rejected above"),
            };
            Ok(Outcome { document, exit })
        }
    }
}

/// Loads a dataset file written by the `dataset` subcommand, accepting both
/// the CSV and the JSON form, and re-audits every record.
fn load_dataset(path: &PathBuf) -> Result<StrataDataset, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    let dataset = if text.trim_start().starts_with('{') {
        let parsed: StrataDataset = serde_json::from_str(&text)
            .map_err(|e| Failure::validation(format!("invalid dataset JSON: {e}")))?;
        parsed
    } else {
        StrataDataset::from_csv(&text).map_err(|e| Failure::validation(e.to_string()))?
    };
    dataset
        .validate()
        .map_err(|e| Failure::validation(e.to_string()))?;
    Ok(dataset)
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
