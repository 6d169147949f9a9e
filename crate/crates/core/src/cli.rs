//! Command-line front end: `roots`, `expand`, `ruin` and `validate`.

use crate::error::{Error, Result};
use crate::expansion::{expand, Quantity};
use crate::models::{DistributionModel, ModelFile};
use crate::rootfinder::{find_roots, SearchRegion};
use crate::ruin::{
    ruin_bivariate, ruin_continuous, ruin_discrete, BivariateModel, ContinuousRiskModel, DiscreteRiskModel,
    RuinExpansion,
};
use crate::validate::{self, Suite};
use crate::cmath::C;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Residue expansions of renewal functions and ruin probabilities.
#[derive(Debug, Parser)]
#[command(name = "renewal", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots of g(z) = 1 in the search strip, as a JSON array.
    Roots {
        /// Model definition file (JSON).
        #[arg(long)]
        model: PathBuf,
        /// Right edge R0 of the search strip.
        #[arg(long)]
        r0: f64,
        /// Height of the search box (non-lattice only; grown automatically if absent).
        #[arg(long)]
        im_max: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Tabulate an expansion of v, U, the renewal density or the renewal mass as CSV.
    Expand {
        #[arg(value_enum)]
        quantity: QuantityArg,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        r0: f64,
        /// Evaluation points: `a:b:step` or a comma list.
        #[arg(long, value_parser = parse_grid)]
        x: Grid,
        #[command(flatten)]
        output: Output,
    },
    /// Ruin probability expansions.
    #[command(subcommand)]
    Ruin(RuinCommand),
    /// Cross-check expansions against the oracles; exit code 2 on any failure.
    Validate {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Monte Carlo paths per check.
        #[arg(long, default_value_t = 100_000)]
        n_paths: u64,
        /// Also write the JSON report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Print the JSON report instead of the table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum RuinCommand {
    /// Compound Poisson model: CSV of x, value, term_1..term_P, remainder_bound.
    Continuous {
        /// Claim-size model file.
        #[arg(long)]
        claims: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        premium: f64,
        /// Roots with Re z < r enter the expansion.
        #[arg(long)]
        r: f64,
        #[arg(long, value_parser = parse_grid)]
        x: Grid,
        #[command(flatten)]
        output: Output,
    },
    /// Binomial model with integer claims; x must be integers.
    Discrete {
        #[arg(long)]
        claims: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long, value_parser = parse_grid)]
        x: Grid,
        #[command(flatten)]
        output: Output,
    },
    /// Two-term asymptotics of ruin of either company along x2 = q x1, as JSON.
    Bivariate {
        /// Risk file of the first company: {"claims": model, "alpha": f, "premium": f}.
        #[arg(long)]
        m1: PathBuf,
        /// Risk file of the second company.
        #[arg(long)]
        m2: PathBuf,
        #[arg(long)]
        q: f64,
        /// Write the two-term curve over `--x` to this CSV file.
        #[arg(long, requires = "x")]
        curve: Option<PathBuf>,
        #[arg(long, value_parser = parse_grid)]
        x: Option<Grid>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the primary output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum QuantityArg {
    V,
    #[value(name = "U")]
    U,
    Density,
    Mass,
}

impl From<QuantityArg> for Quantity {
    fn from(q: QuantityArg) -> Self {
        match q {
            QuantityArg::V => Quantity::V,
            QuantityArg::U => Quantity::U,
            QuantityArg::Density => Quantity::Density,
            QuantityArg::Mass => Quantity::Mass,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SuiteArg {
    Lattice,
    Continuous,
    Ruin,
    Bivariate,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Lattice => Suite::Lattice,
            SuiteArg::Continuous => Suite::Continuous,
            SuiteArg::Ruin => Suite::Ruin,
            SuiteArg::Bivariate => Suite::Bivariate,
            SuiteArg::All => Suite::All,
        }
    }
}

/// Strictly increasing evaluation points.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

/// `a:b:step` (from `a` while below `b + step/2`) or `x1,x2,...`.
pub fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
    let points = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts[..] else {
            return Err(format!("range '{s}' must be a:b:step"));
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(format!("range '{s}' needs finite ends and a positive step"));
        }
        let mut v = Vec::new();
        let mut i = 0u64;
        loop {
            let x = a + i as f64 * step;
            if x >= b + 0.5 * step {
                break;
            }
            v.push(x);
            i += 1;
        }
        v
    } else {
        s.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>()?
    };
    if points.is_empty() {
        return Err(format!("grid '{s}' is empty"));
    }
    if points.windows(2).any(|w| !(w[1] > w[0])) || points.iter().any(|x| !x.is_finite()) {
        return Err(format!("grid '{s}' must be finite and strictly increasing"));
    }
    Ok(Grid(points))
}

/// `{"claims": <model file>, "alpha": f, "premium": f}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RiskFile {
    pub claims: ModelFile,
    pub alpha: f64,
    pub premium: f64,
}

impl RiskFile {
    pub fn load(path: &Path) -> Result<ContinuousRiskModel> {
        let r: RiskFile = in_file(path, || Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?))?;
        ContinuousRiskModel::new(in_file(path, || r.claims.build())?, r.alpha, r.premium)
    }
}

/// Prefixes I/O, parse and model errors with the offending file.
fn in_file<T>(path: &Path, f: impl FnOnce() -> Result<T>) -> Result<T> {
    f().map_err(|e| match e {
        Error::Io(_) | Error::Json(_) | Error::InvalidModel(_) => Error::Usage(format!("{}: {e}", path.display())),
        other => other,
    })
}

fn load_model(path: &Path) -> Result<DistributionModel> {
    in_file(path, || ModelFile::load(path))
}

#[derive(Serialize)]
struct RootRow {
    re: f64,
    im: f64,
    multiplicity: u32,
    g_prime_re: f64,
    g_prime_im: f64,
}

#[derive(Serialize)]
struct BivariateJson {
    q: f64,
    region: String,
    d0: f64,
    #[serde(rename = "D0")]
    big_d0: f64,
    d1: C,
    #[serde(rename = "D1")]
    big_d1: C,
    degenerate: bool,
    alternative: Option<String>,
}

/// Parses `argv` (program name first) and runs it. Returns the exit code:
/// 0 on success, 1 on usage or model errors, 2 when a validation suite fails.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let threads = std::env::var("RENEWAL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Roots { model, r0, im_max, output } => {
            let m = load_model(&model)?;
            let mut region = SearchRegion::for_model(&m, r0);
            if let Some(h) = im_max {
                region = region.with_im_bound(h);
            }
            let set = find_roots(&m, &region)?;
            let rows: Vec<RootRow> = set
                .roots
                .iter()
                .map(|r| RootRow {
                    re: r.location.re,
                    im: r.location.im,
                    multiplicity: r.multiplicity,
                    g_prime_re: r.g_prime.re,
                    g_prime_im: r.g_prime.im,
                })
                .collect();
            emit(&output, &(serde_json::to_string_pretty(&rows)? + "\n"))?;
        }
        Command::Expand { quantity, model, r0, x, output } => {
            let m = load_model(&model)?;
            let e = expand(&m, r0, quantity.into())?;
            let p = e.pair_count();
            let mut csv = String::from("x,value,linear_part");
            for i in 1..=p {
                let _ = write!(csv, ",term_{i}");
            }
            csv.push_str(",remainder_bound\n");
            for &xi in &x.0 {
                if e.lattice && xi.fract() != 0.0 {
                    return Err(Error::Usage(format!("--x: lattice expansions need integer points, got {xi}")));
                }
                let ev = e.evaluate(xi);
                let _ = write!(csv, "{xi},{},{}", ev.value, ev.linear);
                for v in &ev.contributions {
                    let _ = write!(csv, ",{v}");
                }
                let _ = writeln!(csv, ",{}", ev.remainder_scale);
            }
            emit(&output, &csv)?;
        }
        Command::Ruin(cmd) => ruin(cmd)?,
        Command::Validate { suite, seed, n_paths, report, json } => {
            let rep = validate::run(suite.into(), seed, n_paths);
            let text = serde_json::to_string_pretty(&rep)? + "\n";
            if let Some(p) = report {
                std::fs::write(p, &text)?;
            }
            if json {
                print!("{text}");
            } else {
                print!("{}", rep.table());
                println!("{}", if rep.passed() { "all checks passed" } else { "some checks FAILED" });
            }
            return Ok(if rep.passed() { 0 } else { 2 });
        }
    }
    Ok(0)
}

fn ruin_csv(e: &RuinExpansion, x: &Grid) -> String {
    let p = e.breakdown(0.0).len();
    let mut csv = String::from("x,value");
    for i in 1..=p {
        let _ = write!(csv, ",term_{i}");
    }
    csv.push_str(",remainder_bound\n");
    for &xi in &x.0 {
        let parts = e.breakdown(xi);
        let value: f64 = parts.iter().sum();
        let mut line = format!("{xi},{value}");
        for v in parts {
            let _ = write!(line, ",{v}");
        }
        let _ = writeln!(line, ",{}", (-e.remainder_exponent * xi).exp());
        csv.push_str(&line);
    }
    csv
}

fn ruin(cmd: RuinCommand) -> Result<()> {
    match cmd {
        RuinCommand::Continuous { claims, alpha, premium, r, x, output } => {
            let m = ContinuousRiskModel::new(load_model(&claims)?, alpha, premium)?;
            let e = ruin_continuous(&m, r)?;
            emit(&output, &ruin_csv(&e, &x))
        }
        RuinCommand::Discrete { claims, r, x, output } => {
            if let Some(bad) = x.0.iter().find(|v| v.fract() != 0.0) {
                return Err(Error::Usage(format!("--x: discrete ruin needs integer capitals, got {bad}")));
            }
            let claims: DistributionModel = load_model(&claims)?;
            let e = ruin_discrete(&DiscreteRiskModel::new(claims)?, r)?;
            emit(&output, &ruin_csv(&e, &x))
        }
        RuinCommand::Bivariate { m1, m2, q, curve, x, output } => {
            let model = BivariateModel::new(RiskFile::load(&m1)?, RiskFile::load(&m2)?)?;
            let res = ruin_bivariate(&model, q)?;
            let json = BivariateJson {
                q,
                region: res.region.to_string(),
                d0: res.d0,
                big_d0: res.big_d0,
                d1: res.d1,
                big_d1: res.big_d1,
                degenerate: res.degenerate,
                alternative: res.alternative.map(|r| r.to_string()),
            };
            emit(&output, &(serde_json::to_string_pretty(&json)? + "\n"))?;
            if let (Some(path), Some(grid)) = (curve, x) {
                let mut csv = String::from("x,psi_or\n");
                for &xi in &grid.0 {
                    let _ = writeln!(csv, "{xi},{}", res.evaluate(xi));
                }
                std::fs::write(path, csv)?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_grid("0:1:0.25").unwrap().0, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:0.95:0.1").unwrap().0.len(), 10);
        assert_eq!(parse_grid("1, 2.5,4").unwrap().0, vec![1.0, 2.5, 4.0]);
        assert!(parse_grid("2,1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("a,b").is_err());
    }
}
