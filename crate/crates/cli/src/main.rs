use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use lclt_core::catalog::{catalog_text, CatalogError, ExampleSpec, Family};
use lclt_core::gfparse::{parse_gf, ParseError, RationalGF};
use lclt_core::oracle::{self, expand, CoefficientTensor, OracleError};
use lclt_core::smoothacsv::{
    assemble_certificate, default_precision, CertError, CertOptions, LcltCertificate, Verdict, SLICE_HINT,
};

#[derive(Parser)]
#[command(name = "lclt", version, about = "Certified local central limit theorems for rational generating functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the limit theorem and print the certificate.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        /// Target width of interval-valued fields, e.g. 1e-30 or 1/1000.
        #[arg(long)]
        precision: Option<String>,
        /// Write the certificate JSON here ("-" for standard output).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Expand the series and write coefficient slices.
    Expand {
        #[command(flatten)]
        input: InputArgs,
        /// Maximum t-order.
        #[arg(short = 'N')]
        n_max: usize,
        /// Write all coefficients as CSV here ("-" for standard output).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compare exact coefficients with the certified limit density.
    Compare {
        #[command(flatten)]
        input: InputArgs,
        /// Maximum t-order (default 150 for d ≤ 2, 60 for d = 3, 30 beyond).
        #[arg(short = 'N')]
        n_max: Option<usize>,
        /// Slices to compare, comma separated.
        #[arg(short = 'n', value_delimiter = ',')]
        n_list: Vec<usize>,
        #[arg(long)]
        precision: Option<String>,
        /// Plot data path; one file per slice, suffixed with `_n<slice>`.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the comparison table as JSON here ("-" for standard output).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The example catalog.
    Example {
        #[command(subcommand)]
        command: ExampleCommand,
    },
}

#[derive(Subcommand)]
enum ExampleCommand {
    /// List the example families and their parameters.
    List,
}

#[derive(Args)]
struct InputArgs {
    /// Generating function, e.g. "1/(1 - z1*t - t^2/(1-t))".
    expr: Option<String>,
    /// Catalog family instead of an expression (see `lclt example list`).
    #[arg(long)]
    example: Option<String>,
    /// Number of tracked parameters.
    #[arg(long)]
    d: Option<usize>,
    /// Alphabet size (strings).
    #[arg(long)]
    l: Option<usize>,
    /// Marked part sizes, comma separated (restricted compositions).
    #[arg(long, value_delimiter = ',')]
    omega: Vec<usize>,
    /// Allowed part sizes, comma separated (restricted compositions).
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<usize>>,
    /// Keep z1 tracked in the permutations example.
    #[arg(long)]
    no_set_z1: bool,
    /// Assert that the series coefficients are non-negative.
    #[arg(long)]
    combinatorial: bool,
}

struct Failure {
    code: String,
    message: String,
    extra: Option<Value>,
    exit: u8,
}

impl Failure {
    fn new(code: &str, message: impl Into<String>) -> Self {
        Failure {
            code: code.to_string(),
            message: message.into(),
            extra: None,
            exit: 1,
        }
    }

    fn json(&self) -> Value {
        let mut v = json!({ "error": self.code, "message": self.message });
        if let Some(Value::Object(extra)) = &self.extra {
            for (k, x) in extra {
                v[k] = x.clone();
            }
        }
        v
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::new(e.code(), e.to_string())
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        Failure::new(e.code(), e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::new(e.code(), e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new("IO_ERROR", e.to_string())
    }
}

impl From<CertError> for Failure {
    fn from(e: CertError) -> Self {
        let mut f = Failure::new(e.code(), e.to_string());
        if let CertError::DegenerateHessian(cert) = e {
            f.exit = 3;
            f.extra = Some(json!({ "hint": SLICE_HINT, "certificate": cert.to_json() }));
        }
        f
    }
}

fn load(input: &InputArgs) -> Result<RationalGF, Failure> {
    let gf = match (&input.expr, &input.example) {
        (Some(_), Some(_)) => {
            return Err(Failure::new("USAGE", "give either an expression or --example, not both"))
        }
        (None, None) => return Err(Failure::new("USAGE", "give an expression or --example")),
        (Some(e), None) => parse_gf(e)?,
        (None, Some(name)) => {
            let mut spec = ExampleSpec::new(name.parse::<Family>()?)
                .with_omega(input.omega.clone())
                .with_set_z1(!input.no_set_z1);
            spec.d = input.d;
            spec.l = input.l;
            spec.lambda = input.lambda.clone();
            spec.build()?
        }
    };
    Ok(if input.combinatorial { gf.assert_combinatorial() } else { gf })
}

/// Parses `a`, `a/b`, `0.001` or `1e-30` exactly.
fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    let mut x = BigRational::from_integer(digits.parse().ok()?);
    let shift = exp - frac_part.len() as i32;
    let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), shift.unsigned_abs() as usize));
    if shift >= 0 {
        x *= scale;
    } else {
        x /= scale;
    }
    Some(x)
}

fn options(precision: &Option<String>) -> Result<CertOptions, Failure> {
    let precision = match precision {
        None => default_precision(),
        Some(p) => parse_rational(p)
            .filter(|x| x.is_positive() && x < &BigRational::one())
            .ok_or_else(|| Failure::new("BAD_PRECISION", format!("precision must be a rational in (0, 1), got {p:?}")))?,
    };
    Ok(CertOptions {
        precision,
        ..CertOptions::default()
    })
}

fn write_target(path: &Path, text: &str) -> Result<(), Failure> {
    if path == Path::new("-") {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        out.flush()?;
    } else {
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn exit_for(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Proved => 0,
        Verdict::Conditional => 2,
        Verdict::Refuted | Verdict::Degenerate => 3,
    }
}

fn analyze(input: &InputArgs, precision: &Option<String>, json_out: &Option<PathBuf>) -> Result<u8, Failure> {
    let gf = load(input)?;
    let opts = options(precision)?;
    let result = assemble_certificate(&gf, &opts);
    if let Err(CertError::DegenerateHessian(cert)) = &result {
        eprint!("{cert}");
    }
    let cert = result.map_err(|e| {
        let f = Failure::from(e);
        if let Some(path) = json_out.as_ref().filter(|p| p.as_path() != Path::new("-")) {
            let _ = std::fs::write(path, pretty(&f.json()));
        }
        f
    })?;
    let to_stdout = json_out.as_deref() == Some(Path::new("-"));
    if !to_stdout {
        print!("{cert}");
    }
    if let Some(path) = json_out {
        write_target(path, &pretty(&cert.to_json()))?;
    }
    Ok(exit_for(cert.verdict))
}

fn coefficient_csv(t: &CoefficientTensor) -> String {
    let mut out = String::from("n");
    for k in 1..=t.d {
        out.push_str(&format!(",s{k}"));
    }
    out.push_str(",coeff\n");
    for n in 0..=t.n_max {
        let Some(sl) = t.slice(n) else { continue };
        let den = t.denominator(n);
        for (i, v) in sl.data.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            out.push_str(&n.to_string());
            for x in sl.point_of(i) {
                out.push_str(&format!(",{x}"));
            }
            out.push_str(&format!(",{}\n", BigRational::new(v.clone(), den.clone())));
        }
    }
    out
}

fn expand_cmd(input: &InputArgs, n_max: usize, csv: &Option<PathBuf>) -> Result<u8, Failure> {
    let gf = load(input)?;
    let t = expand(&gf, n_max)?;
    let to_stdout = csv.as_deref() == Some(Path::new("-"));
    if !to_stdout {
        println!("F = {gf}");
        println!("n,total");
        for n in 0..=n_max {
            println!("{n},{}", t.slice_total(n).unwrap_or_else(BigRational::zero));
        }
    }
    if let Some(path) = csv {
        write_target(path, &coefficient_csv(&t))?;
    }
    Ok(0)
}

fn default_n_max(d: usize) -> usize {
    match d {
        0..=2 => 150,
        3 => 60,
        _ => 30,
    }
}

fn slice_path(base: &Path, n: usize) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}_n{n}.{ext}"))
}

fn fmt_f(x: f64) -> String {
    format!("{x:.6e}")
}

fn compare(
    input: &InputArgs,
    n_max: Option<usize>,
    n_list: &[usize],
    precision: &Option<String>,
    csv: &Option<PathBuf>,
    json_out: &Option<PathBuf>,
) -> Result<u8, Failure> {
    let gf = load(input)?;
    let opts = options(precision)?;
    let cert: Option<LcltCertificate> = match assemble_certificate(&gf, &opts) {
        Ok(c) => Some(c),
        Err(CertError::DegenerateHessian(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let n_max = n_max.unwrap_or_else(|| {
        let top = n_list.iter().copied().max().unwrap_or(0);
        default_n_max(gf.d()).max(top)
    });
    let mut ns: Vec<usize> = if n_list.is_empty() {
        vec![n_max / 4, n_max / 2, n_max]
    } else {
        n_list.to_vec()
    };
    ns.retain(|&n| n > 0);
    ns.dedup();
    if let Some(&bad) = ns.iter().find(|&&n| n > n_max) {
        return Err(Failure::new("BAD_PARAMETER", format!("slice {bad} exceeds -N {n_max}")));
    }
    let t = expand(&gf, n_max)?;

    let mut rows = Vec::new();
    let mut table = String::new();
    match &cert {
        Some(c) => {
            table.push_str(&format!("verdict: {}\n", c.verdict.as_str()));
            table.push_str(&format!("m = {:?}\n", c.m_f64()));
            table.push_str(&format!("phase Hessian = {:?}\n", c.hessian_f64()));
        }
        None => table.push_str(&format!("verdict: DEGENERATE ({SLICE_HINT})\n")),
    }
    table.push_str("n,E(n),rounding_bound,peak,mean/n,covariance/n\n");
    for &n in &ns {
        let stats = oracle::empirical_stats(&t, n)?;
        let gap = match &cert {
            Some(c) => Some(oracle::lclt_gap(&t, c, n)?),
            None => None,
        };
        let nf = n as f64;
        let mean: Vec<f64> = stats.mean.iter().map(|x| x / nf).collect();
        let cov: Vec<Vec<f64>> = stats
            .covariance
            .iter()
            .map(|r| r.iter().map(|x| x / nf).collect())
            .collect();
        let join = |xs: &[f64]| xs.iter().map(|&x| fmt_f(x)).collect::<Vec<_>>().join(" ");
        let cov_flat: Vec<f64> = cov.iter().flatten().copied().collect();
        let peak: Vec<String> = stats.peak.iter().map(|x| x.to_string()).collect();
        table.push_str(&format!(
            "{n},{},{},{},{},{}\n",
            gap.as_ref().map_or("-".into(), |g| fmt_f(g.value)),
            gap.as_ref().map_or("-".into(), |g| fmt_f(g.rounding_bound)),
            peak.join(" "),
            join(&mean),
            join(&cov_flat),
        ));
        rows.push(json!({
            "n": n,
            "gap": gap.as_ref().map(|g| g.value),
            "gap_rounding_bound": gap.as_ref().map(|g| g.rounding_bound),
            "gap_argmax": gap.as_ref().map(|g| g.argmax.clone()),
            "peak": stats.peak,
            "peak_ties": stats.peak_ties,
            "mean_over_n": mean,
            "covariance_over_n": cov,
        }));
        if let Some(base) = csv {
            oracle::emit_plot_data(&t, cert.as_ref(), n, &slice_path(base, n))?;
        }
    }
    let to_stdout = json_out.as_deref() == Some(Path::new("-"));
    if !to_stdout {
        print!("{table}");
    }
    if let Some(path) = json_out {
        let v = json!({
            "N": n_max,
            "verdict": cert.as_ref().map_or("DEGENERATE", |c| c.verdict.as_str()),
            "rows": rows,
        });
        write_target(path, &pretty(&v))?;
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Analyze { input, precision, json } => analyze(&input, &precision, &json),
        Command::Expand { input, n_max, csv } => expand_cmd(&input, n_max, &csv),
        Command::Compare {
            input,
            n_max,
            n_list,
            precision,
            csv,
            json,
        } => compare(&input, n_max, &n_list, &precision, &csv, &json),
        Command::Example {
            command: ExampleCommand::List,
        } => {
            print!("{}", catalog_text());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    // exit quietly when piped into `head` and the like
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            println!("{}", serde_json::to_string(&f.json()).expect("JSON values serialize"));
            ExitCode::from(f.exit)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/4"), Some(q(3, 4)));
        assert_eq!(parse_rational("0.25"), Some(q(1, 4)));
        assert_eq!(parse_rational("1e-3"), Some(q(1, 1000)));
        assert_eq!(parse_rational("2.5e1"), Some(q(25, 1)));
        assert_eq!(parse_rational("7"), Some(q(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn slice_paths() {
        assert_eq!(slice_path(Path::new("out/plot.csv"), 25), PathBuf::from("out/plot_n25.csv"));
    }
}
