//! Command-line front end: compute local factors, regularized determinants,
//! q-gamma values and equivariant volumes; run the verification suites; emit
//! machine-readable convergence tables.
//!
//! Exit codes: `0` success, `1` verification failure, `2` usage/parse/I-O
//! error, `3` domain or pole error from the numerics.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::MathError;
use crate::lfactor::{
    l_factor_with_breakdown, EpsilonNormalization, Frobenius, LFactorSpec, Place,
};
use crate::linalg::{normal_eigenvalues, CMat};
use crate::regdet::{regdet, regdet_fullline_numeric, SpectrumDescriptor};
use crate::report::{format_complex, parse_complex, SuiteResult};
use crate::specfun::{q_gamma, QDeformParams};
use crate::verify::{run_convergence, run_suite, ConvergenceTarget, Suite};
use crate::volumes::{equivariant_volume, equivariant_volume_super};

const EXIT_CODES_HELP: &str = "Exit codes:\n  0  success\n  1  verification failure (one or more checks failed)\n  2  usage, parse, or I/O error\n  3  domain or pole error reported by the numerics";

#[derive(Parser)]
#[command(
    name = "lfactors",
    version,
    about = "Local L-factors, regularized determinants, q-gamma functions and equivariant volumes",
    after_help = EXIT_CODES_HELP
)]
struct Cli {
    /// Base seed for all randomized draws.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance for consistency-class identity checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "plain")]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    #[value(name = "json")]
    Json,
    #[value(name = "csv")]
    Csv,
    #[value(name = "plain")]
    Plain,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a local L-factor at an archimedean or non-archimedean place.
    Lfactor(LfactorArgs),
    /// Evaluate a zeta-regularized spectral determinant.
    Regdet(RegdetArgs),
    /// Evaluate a q-gamma value, either from (q, t) or from rate parameters.
    Qgamma(QgammaArgs),
    /// Evaluate the equivariant volume for a list of positive weights.
    Volume(VolumeArgs),
    /// Run a randomized verification suite.
    Verify(VerifyArgs),
    /// Emit a convergence table for a truncation parameter sweep.
    Convergence(ConvergenceArgs),
}

#[derive(Args)]
struct LfactorArgs {
    /// Place kind: real | complex | nonarch.
    #[arg(long, value_enum)]
    place: PlaceArg,
    /// Frobenius sign at a real place: +1 or -1.
    #[arg(long, allow_hyphen_values = true)]
    frob: Option<String>,
    /// Residue characteristic (prime) at a non-archimedean place.
    #[arg(long)]
    p: Option<u64>,
    /// Evaluation point, e.g. "1", "0.5+2i".
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    /// Comma-separated eigenvalue list, e.g. "0,1,-0.5+1i".
    #[arg(long, allow_hyphen_values = true)]
    alphas: Option<String>,
    /// Matrix file (first line N, then N rows of N complex entries); its
    /// eigenvalues are used instead of --alphas. The matrix must be normal.
    #[arg(long, value_name = "FILE")]
    matrix: Option<PathBuf>,
    /// Epsilon-normalization prefactor a (nonzero complex).
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    norm_a: String,
    /// Epsilon-normalization base b (positive real).
    #[arg(long, default_value_t = 1.0)]
    norm_b: f64,
    /// Also print the per-eigenvalue factor breakdown.
    #[arg(long)]
    breakdown: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlaceArg {
    #[value(name = "real")]
    Real,
    #[value(name = "complex")]
    Complex,
    #[value(name = "nonarch")]
    NonArch,
}

#[derive(Args)]
struct RegdetArgs {
    /// Spectrum kind: halfline | fullline | constant.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Spectral slope rho.
    #[arg(long, allow_hyphen_values = true)]
    rho: String,
    /// Spectral offset lambda (not used for constant spectra).
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// For full-line spectra, also evaluate the series route and report the
    /// difference against the closed form.
    #[arg(long)]
    numeric: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    #[value(name = "halfline")]
    HalfLine,
    #[value(name = "fullline")]
    FullLine,
    #[value(name = "constant")]
    Constant,
}

#[derive(Args)]
struct QgammaArgs {
    /// Base q with |q| < 1 (use together with --t).
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Argument t (use together with --q).
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Inverse temperature (use together with --hbar and --lambdas).
    #[arg(long)]
    beta: Option<f64>,
    /// Equivariant rotation rate (use together with --beta and --lambdas).
    #[arg(long)]
    hbar: Option<f64>,
    /// Comma-separated positive weights; the result is the product of the
    /// per-weight q-gamma values.
    #[arg(long)]
    lambdas: Option<String>,
}

#[derive(Args)]
struct VolumeArgs {
    /// Comma-separated positive weights.
    #[arg(long)]
    lambdas: String,
    /// Evaluate through the supersymmetric representation with this
    /// (arbitrary positive) coupling instead of the closed form.
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run.
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    /// Number of seeded draws per suite.
    #[arg(long, default_value_t = 100)]
    samples: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    #[value(name = "specfun")]
    Specfun,
    #[value(name = "regdet")]
    Regdet,
    #[value(name = "theorem21")]
    Theorem21,
    #[value(name = "qgamma")]
    QGamma,
    #[value(name = "volumes")]
    Volumes,
    #[value(name = "all")]
    All,
}

#[derive(Args)]
struct ConvergenceArgs {
    /// Sweep target: qgamma | classical_limit | character | mode3d.
    #[arg(long, value_enum)]
    target: TargetArg,
    /// Comma-separated grid of truncation parameters (term counts, degree or
    /// mode cutoffs, or beta values, depending on the target). Each target
    /// has a sensible default grid.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    #[value(name = "qgamma")]
    QGamma,
    #[value(name = "classical_limit", alias = "classical-limit")]
    ClassicalLimit,
    #[value(name = "character")]
    Character,
    #[value(name = "mode3d")]
    Mode3d,
}

/// A command failure with its exit-code class.
#[derive(Debug)]
enum Failure {
    /// Bad flags, unparsable values, unreadable/unwritable files: exit 2.
    Usage(String),
    /// Domain, pole, or conditioning errors from the numerics: exit 3.
    Math(MathError),
}

impl From<MathError> for Failure {
    fn from(e: MathError) -> Self {
        Failure::Math(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Fully assembled command output, rendered per format on demand.
struct CommandOutput {
    command: &'static str,
    params: Vec<(&'static str, Value)>,
    /// JSON `results` array.
    results: Value,
    csv: String,
    plain: String,
    /// Exit code carried by a successful render (0, or 1 for verification
    /// failures).
    exit: i32,
}

impl CommandOutput {
    fn render(&self, format: Format, seed: u64, tol: f64) -> String {
        match format {
            Format::Json => {
                let params: serde_json::Map<String, Value> = self
                    .params
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.clone()))
                    .collect();
                let doc = json!({
                    "command": self.command,
                    "meta": {
                        "seed": seed,
                        "tol": tol,
                        "version": env!("CARGO_PKG_VERSION"),
                    },
                    "params": Value::Object(params),
                    "results": self.results,
                });
                let mut text = serde_json::to_string_pretty(&doc).expect("serializable document");
                text.push('\n');
                text
            }
            Format::Csv => self.csv.clone(),
            Format::Plain => self.plain.clone(),
        }
    }
}

/// Quotes a CSV field if it contains a comma, quote, or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Joins fields into one CSV record (no trailing newline).
pub fn csv_record(fields: &[String]) -> String {
    fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",")
}

/// Splits one CSV record, honoring double-quoted fields; `None` on malformed
/// quoting.
pub fn parse_csv_record(line: &str) -> Option<Vec<String>> {
    let mut fields = Vec::new();
    let mut field = String::new();
    let mut chars = line.chars().peekable();
    let mut quoted = false;
    loop {
        match chars.next() {
            None => {
                if quoted {
                    return None;
                }
                fields.push(field);
                return Some(fields);
            }
            Some('"') if field.is_empty() && !quoted => quoted = true,
            Some('"') if quoted => match chars.peek() {
                Some('"') => {
                    chars.next();
                    field.push('"');
                }
                Some(',') | None => {
                    quoted = false;
                    // Field ends at the next comma or end of line.
                }
                Some(_) => return None,
            },
            Some(',') if !quoted => {
                fields.push(std::mem::take(&mut field));
            }
            Some(c) => field.push(c),
        }
    }
}

/// Parses an emitted CSV document and re-emits it; byte-identity with the
/// input is the round-trip invariant checked by the integration tests.
pub fn reemit_csv(text: &str) -> Option<String> {
    let mut out = String::new();
    for line in text.lines() {
        let fields = parse_csv_record(line)?;
        out.push_str(&csv_record(&fields));
        out.push('\n');
    }
    Some(out)
}

fn parse_complex_flag(name: &str, raw: &str) -> CliResult<Complex64> {
    parse_complex(raw)
        .ok_or_else(|| Failure::Usage(format!("--{name}: cannot parse '{raw}' as a complex number")))
}

fn parse_complex_list(name: &str, raw: &str) -> CliResult<Vec<Complex64>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_complex_flag(name, s))
        .collect()
}

fn parse_real_list(name: &str, raw: &str) -> CliResult<Vec<f64>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Failure::Usage(format!("--{name}: cannot parse '{s}' as a number")))
        })
        .collect()
}

/// Parses the matrix file format: first non-empty line `N`, then `N` rows of
/// `N` whitespace-separated complex entries.
fn parse_matrix_text(text: &str) -> CliResult<CMat> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let n: usize = lines
        .next()
        .ok_or_else(|| Failure::Usage("matrix file is empty".into()))?
        .parse()
        .map_err(|_| Failure::Usage("matrix file must start with the dimension".into()))?;
    if n == 0 || n > 64 {
        return Err(Failure::Usage(format!(
            "matrix dimension must be between 1 and 64, got {n}"
        )));
    }
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Failure::Usage(format!("matrix file: missing row {i}")))?;
        let row: Vec<Complex64> = line
            .split_whitespace()
            .map(|tok| {
                parse_complex(tok).ok_or_else(|| {
                    Failure::Usage(format!("matrix file: bad entry '{tok}' in row {i}"))
                })
            })
            .collect::<CliResult<_>>()?;
        if row.len() != n {
            return Err(Failure::Usage(format!(
                "matrix file: row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        rows.push(row);
    }
    if lines.next().is_some() {
        return Err(Failure::Usage("matrix file: trailing content after the matrix".into()));
    }
    CMat::from_rows(&rows).map_err(Failure::Math)
}

fn plain_value_line(label: &str, z: Complex64) -> String {
    format!("{label} = {}\n", format_complex(z))
}

fn cmd_lfactor(args: &LfactorArgs, tol_mention: f64) -> CliResult<CommandOutput> {
    let _ = tol_mention;
    let s = parse_complex_flag("s", &args.s)?;
    let place = match args.place {
        PlaceArg::Real => {
            let frob = match args.frob.as_deref() {
                Some("+1") | Some("1") => Frobenius::Plus,
                Some("-1") => Frobenius::Minus,
                Some(other) => {
                    return Err(Failure::Usage(format!("--frob must be +1 or -1, got '{other}'")))
                }
                None => return Err(Failure::Usage("--frob is required for real places".into())),
            };
            Place::Real(frob)
        }
        PlaceArg::Complex => Place::Complex,
        PlaceArg::NonArch => {
            let p = args
                .p
                .ok_or_else(|| Failure::Usage("--p is required for non-archimedean places".into()))?;
            Place::NonArch(p)
        }
    };

    let (eigenvalues, source) = match (&args.alphas, &args.matrix) {
        (Some(list), None) => (parse_complex_list("alphas", list)?, json!("alphas")),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Failure::Usage(format!("cannot read matrix file {}: {e}", path.display()))
            })?;
            let m = parse_matrix_text(&text)?;
            let eigen = normal_eigenvalues(&m, 1e-10).map_err(Failure::Math)?;
            (eigen, json!(format!("matrix:{}", path.display())))
        }
        (Some(_), Some(_)) => {
            return Err(Failure::Usage("--alphas and --matrix are mutually exclusive".into()))
        }
        (None, None) => {
            return Err(Failure::Usage("one of --alphas or --matrix is required".into()))
        }
    };
    if eigenvalues.is_empty() {
        return Err(Failure::Usage("eigenvalue list must be non-empty".into()));
    }

    let norm = EpsilonNormalization::new(parse_complex_flag("norm-a", &args.norm_a)?, args.norm_b)?;
    let spec = LFactorSpec { place, s, eigenvalues: eigenvalues.clone() };
    let (value, factors) = l_factor_with_breakdown(&spec, &norm)?;

    let mut result = serde_json::Map::new();
    result.insert("value".into(), json!(format_complex(value)));
    let mut csv = format!("name,value\nvalue,{}\n", format_complex(value));
    let mut plain = plain_value_line("value", value);
    if args.breakdown {
        result.insert(
            "factors".into(),
            json!(factors.iter().map(|&f| format_complex(f)).collect::<Vec<_>>()),
        );
        for (j, &f) in factors.iter().enumerate() {
            csv.push_str(&format!("factor {j},{}\n", format_complex(f)));
            plain.push_str(&format!("factor[{j}] = {}\n", format_complex(f)));
        }
    }

    let place_name = match args.place {
        PlaceArg::Real => "real",
        PlaceArg::Complex => "complex",
        PlaceArg::NonArch => "nonarch",
    };
    let mut params: Vec<(&'static str, Value)> = vec![
        ("place", json!(place_name)),
        ("s", json!(format_complex(s))),
        ("eigenvalues", json!(eigenvalues.iter().map(|&a| format_complex(a)).collect::<Vec<_>>())),
        ("source", source),
        ("norm_a", json!(format_complex(norm.a))),
        ("norm_b", json!(norm.b)),
    ];
    if let Place::Real(f) = place {
        params.push(("frob", json!(if f == Frobenius::Plus { "+1" } else { "-1" })));
    }
    if let Place::NonArch(p) = place {
        params.push(("p", json!(p)));
    }

    Ok(CommandOutput {
        command: "lfactor",
        params,
        results: json!([Value::Object(result)]),
        csv,
        plain,
        exit: 0,
    })
}

fn cmd_regdet(args: &RegdetArgs) -> CliResult<CommandOutput> {
    let rho = parse_complex_flag("rho", &args.rho)?;
    let lambda = match (&args.lambda, args.kind) {
        (Some(raw), KindArg::HalfLine | KindArg::FullLine) => Some(parse_complex_flag("lambda", raw)?),
        (None, KindArg::HalfLine | KindArg::FullLine) => {
            return Err(Failure::Usage("--lambda is required for this spectrum kind".into()))
        }
        (Some(_), KindArg::Constant) => {
            return Err(Failure::Usage("--lambda is not accepted for constant spectra".into()))
        }
        (None, KindArg::Constant) => None,
    };
    if args.numeric && !matches!(args.kind, KindArg::FullLine) {
        return Err(Failure::Usage("--numeric is only available for full-line spectra".into()));
    }

    let (descriptor, kind_name) = match args.kind {
        KindArg::HalfLine => {
            (SpectrumDescriptor::HalfLine { rho, lambda: lambda.unwrap() }, "halfline")
        }
        KindArg::FullLine => {
            (SpectrumDescriptor::FullLine { rho, lambda: lambda.unwrap() }, "fullline")
        }
        KindArg::Constant => (SpectrumDescriptor::Constant { rho }, "constant"),
    };
    let result = regdet(&descriptor)?;

    let mut obj = serde_json::Map::new();
    obj.insert("branch_note".into(), json!(result.branch_note));
    obj.insert("det".into(), json!(format_complex(result.det)));
    obj.insert("log_det".into(), json!(format_complex(result.log_det)));
    let mut csv = String::from("name,value\n");
    csv.push_str(&format!("det,{}\n", format_complex(result.det)));
    csv.push_str(&format!("log_det,{}\n", format_complex(result.log_det)));
    let mut plain = plain_value_line("det", result.det);
    plain.push_str(&plain_value_line("log_det", result.log_det));
    let _ = writeln!(plain, "branch = {}", result.branch_note);

    if args.numeric {
        let numeric = regdet_fullline_numeric(rho, lambda.unwrap())?;
        let diff = (numeric - result.det).norm();
        obj.insert("det_numeric".into(), json!(format_complex(numeric)));
        obj.insert("abs_diff".into(), json!(diff));
        csv.push_str(&format!("det_numeric,{}\n", format_complex(numeric)));
        csv.push_str(&format!("abs_diff,{diff}\n"));
        plain.push_str(&plain_value_line("det_numeric", numeric));
        let _ = writeln!(plain, "abs_diff = {diff}");
    }

    let mut params: Vec<(&'static str, Value)> =
        vec![("kind", json!(kind_name)), ("rho", json!(format_complex(rho)))];
    if let Some(l) = lambda {
        params.push(("lambda", json!(format_complex(l))));
    }

    Ok(CommandOutput {
        command: "regdet",
        params,
        results: json!([Value::Object(obj)]),
        csv,
        plain,
        exit: 0,
    })
}

fn cmd_qgamma(args: &QgammaArgs, tol: f64) -> CliResult<CommandOutput> {
    let rates_given = args.beta.is_some() || args.hbar.is_some() || args.lambdas.is_some();
    let qt_given = args.q.is_some() || args.t.is_some();
    if rates_given && qt_given {
        return Err(Failure::Usage(
            "give either --q/--t or --beta/--hbar/--lambdas, not both".into(),
        ));
    }

    let (value, params): (Complex64, Vec<(&'static str, Value)>) = if qt_given {
        let (q_raw, t_raw) = match (&args.q, &args.t) {
            (Some(q), Some(t)) => (q, t),
            _ => return Err(Failure::Usage("--q and --t must be given together".into())),
        };
        let q = parse_complex_flag("q", q_raw)?;
        let t = parse_complex_flag("t", t_raw)?;
        let qp = QDeformParams::new(q, t)?;
        let v = q_gamma(&qp, tol)?;
        (v, vec![("q", json!(format_complex(q))), ("t", json!(format_complex(t)))])
    } else {
        let (beta, hbar, lambdas_raw) = match (args.beta, args.hbar, &args.lambdas) {
            (Some(b), Some(h), Some(l)) => (b, h, l),
            _ => {
                return Err(Failure::Usage(
                    "--beta, --hbar and --lambdas must be given together".into(),
                ))
            }
        };
        let lambdas = parse_real_list("lambdas", lambdas_raw)?;
        let family = QDeformParams::family_from_rates(beta, hbar, &lambdas)?;
        let v = crate::lfactor::q_l_factor(&family, tol)?;
        (
            v,
            vec![
                ("beta", json!(beta)),
                ("hbar", json!(hbar)),
                ("lambdas", json!(lambdas)),
            ],
        )
    };

    Ok(CommandOutput {
        command: "qgamma",
        params,
        results: json!([{ "value": format_complex(value) }]),
        csv: format!("name,value\nvalue,{}\n", format_complex(value)),
        plain: plain_value_line("value", value),
        exit: 0,
    })
}

fn cmd_volume(args: &VolumeArgs) -> CliResult<CommandOutput> {
    let lambdas = parse_real_list("lambdas", &args.lambdas)?;
    let (value, method) = match args.mu {
        Some(mu) => (equivariant_volume_super(mu, &lambdas)?, "super"),
        None => (Complex64::new(equivariant_volume(&lambdas)?, 0.0), "closed"),
    };
    let mut params: Vec<(&'static str, Value)> =
        vec![("lambdas", json!(lambdas)), ("method", json!(method))];
    if let Some(mu) = args.mu {
        params.push(("mu", json!(mu)));
    }
    Ok(CommandOutput {
        command: "volume",
        params,
        results: json!([{ "value": format_complex(value) }]),
        csv: format!("name,value\nvalue,{}\n", format_complex(value)),
        plain: plain_value_line("value", value),
        exit: 0,
    })
}

fn cmd_verify(args: &VerifyArgs, seed: u64, tol: f64) -> CliResult<CommandOutput> {
    let suites: Vec<Suite> = match args.suite {
        SuiteArg::Specfun => vec![Suite::Specfun],
        SuiteArg::Regdet => vec![Suite::Regdet],
        SuiteArg::Theorem21 => vec![Suite::Theorem21],
        SuiteArg::QGamma => vec![Suite::QGamma],
        SuiteArg::Volumes => vec![Suite::Volumes],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let results: Vec<SuiteResult> = suites
        .into_iter()
        .map(|s| run_suite(s, args.samples as usize, seed, tol))
        .collect();
    let all_pass = results.iter().all(SuiteResult::all_pass);

    let mut csv =
        String::from("suite,identity,lhs,rhs,abs_error,rel_error,tolerance,pass\n");
    let mut plain = String::new();
    for suite in &results {
        let _ = writeln!(
            plain,
            "suite {}: {}/{} pass ({} ms)",
            suite.suite,
            suite.pass_count,
            suite.pass_count + suite.fail_count,
            suite.wall_time_ms
        );
        for report in &suite.reports {
            csv.push_str(&csv_record(&[
                suite.suite.clone(),
                report.identity.clone(),
                report.lhs.clone(),
                report.rhs.clone(),
                report.abs_error.to_string(),
                report.rel_error.to_string(),
                report.tolerance.to_string(),
                report.pass.to_string(),
            ]));
            csv.push('\n');
            if !report.pass {
                let _ = writeln!(
                    plain,
                    "  FAIL {}: abs_error = {:e}, rel_error = {:e}, tolerance = {:e}",
                    report.identity, report.abs_error, report.rel_error, report.tolerance
                );
            }
        }
    }
    let _ = writeln!(plain, "overall: {}", if all_pass { "PASS" } else { "FAIL" });

    let suite_name = match args.suite {
        SuiteArg::Specfun => "specfun",
        SuiteArg::Regdet => "regdet",
        SuiteArg::Theorem21 => "theorem21",
        SuiteArg::QGamma => "qgamma",
        SuiteArg::Volumes => "volumes",
        SuiteArg::All => "all",
    };
    Ok(CommandOutput {
        command: "verify",
        params: vec![("samples", json!(args.samples)), ("suite", json!(suite_name))],
        results: serde_json::to_value(&results).expect("serializable suites"),
        csv,
        plain,
        exit: if all_pass { 0 } else { 1 },
    })
}

fn cmd_convergence(args: &ConvergenceArgs) -> CliResult<CommandOutput> {
    let target = match args.target {
        TargetArg::QGamma => ConvergenceTarget::QGamma,
        TargetArg::ClassicalLimit => ConvergenceTarget::ClassicalLimit,
        TargetArg::Character => ConvergenceTarget::Character,
        TargetArg::Mode3d => ConvergenceTarget::Mode3d,
    };
    let grid: Vec<f64> = match &args.grid {
        Some(raw) => parse_real_list("grid", raw)?,
        None => match target {
            ConvergenceTarget::QGamma => vec![5.0, 10.0, 20.0, 40.0],
            ConvergenceTarget::ClassicalLimit => vec![1e-2, 1e-3, 1e-4],
            ConvergenceTarget::Character => vec![10.0, 20.0, 40.0, 60.0],
            ConvergenceTarget::Mode3d => vec![5.0, 10.0, 20.0, 40.0],
        },
    };
    let table = run_convergence(target, &grid)?;

    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = serde_json::Map::new();
            obj.insert(table.parameter_name.into(), json!(row.parameter));
            obj.insert("value".into(), json!(format_complex(row.value)));
            obj.insert("reference".into(), json!(format_complex(row.reference)));
            obj.insert("abs_error".into(), json!(row.abs_error));
            obj.insert("bound".into(), json!(row.bound));
            Value::Object(obj)
        })
        .collect();

    let mut csv = format!("{},value,reference,abs_error,bound\n", table.parameter_name);
    let mut plain = format!(
        "target {}: {} grid points\n{:>12}  {:>44}  {:>44}  {:>12}  {:>12}\n",
        table.target, table.rows.len(), table.parameter_name, "value", "reference", "abs_error", "bound"
    );
    for row in &table.rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.parameter,
            format_complex(row.value),
            format_complex(row.reference),
            row.abs_error,
            row.bound
        ));
        let _ = writeln!(
            plain,
            "{:>12}  {:>44}  {:>44}  {:>12.5e}  {:>12.5e}",
            row.parameter,
            format_complex(row.value),
            format_complex(row.reference),
            row.abs_error,
            row.bound
        );
    }

    Ok(CommandOutput {
        command: "convergence",
        params: vec![("grid", json!(grid)), ("target", json!(table.target))],
        results: Value::Array(rows),
        csv,
        plain,
        exit: 0,
    })
}

fn dispatch(cli: &Cli) -> CliResult<CommandOutput> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(Failure::Usage(format!("--tol must be positive, got {}", cli.tol)));
    }
    match &cli.command {
        Command::Lfactor(args) => cmd_lfactor(args, cli.tol),
        Command::Regdet(args) => cmd_regdet(args),
        Command::Qgamma(args) => cmd_qgamma(args, cli.tol),
        Command::Volume(args) => cmd_volume(args),
        Command::Verify(args) => cmd_verify(args, cli.seed, cli.tol),
        Command::Convergence(args) => cmd_convergence(args),
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(output) => {
            let text = output.render(cli.format, cli.seed, cli.tol);
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return 2;
                }
            } else {
                print!("{text}");
            }
            output.exit
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Math(err)) => {
            eprintln!("error: {err}");
            3
        }
    }
}
