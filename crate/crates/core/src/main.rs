use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use detrep::compose;
use detrep::io;
use detrep::linalg::C64;
use detrep::mep::{self, SolveOptions};
use detrep::poly::BivariatePoly;
use detrep::transform;
use detrep::verify::{self, QualityParams};

#[derive(Parser)]
#[command(name = "detrep", version, about = "Determinantal representations of bivariate polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Seed {
    /// Seed for every random choice.
    #[arg(long, env = "DETREP_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone, Copy)]
struct Quality {
    /// Number of random sample points.
    #[arg(long, default_value_t = 200)]
    k: usize,
    /// Regularisation of the relative error.
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
    /// Pass threshold for the scaled score.
    #[arg(long, default_value_t = 1e-8)]
    delta: f64,
}

impl From<Quality> for QualityParams {
    fn from(q: Quality) -> Self {
        QualityParams { samples: q.k, eps: q.eps, delta: q.delta }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RepFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum RootFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a representation of a polynomial.
    Repr {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, value_enum, default_value_t = RepFormat::Json)]
        format: RepFormat,
        #[command(flatten)]
        quality: Quality,
        #[command(flatten)]
        seed: Seed,
    },
    /// Score a representation against a polynomial; exit status 0 iff it passes.
    Verify {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[command(flatten)]
        quality: Quality,
        #[command(flatten)]
        seed: Seed,
    },
    /// Solve the system p = q = 0.
    Solve {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        /// One Newton step per root.
        #[arg(long)]
        refine: bool,
        #[arg(long, value_enum, default_value_t = RootFormat::Json)]
        format: RootFormat,
        #[command(flatten)]
        seed: Seed,
    },
    /// Block-diagonal representation of a product, from `file:multiplicity` factors.
    Compose {
        #[arg(long, num_args = 1.., required = true)]
        factors: Vec<String>,
        #[command(flatten)]
        seed: Seed,
    },
    /// Evaluate a polynomial at a point.
    Eval {
        #[arg(long)]
        poly: PathBuf,
        /// Coordinates `x y`, each `a`, `a+bi` or `a,b`.
        #[arg(long, num_args = 2, allow_hyphen_values = true, value_names = ["X", "Y"])]
        at: Vec<String>,
    },
    /// Bring a polynomial into the normal form used by the construction.
    Normalize {
        #[arg(long)]
        poly: PathBuf,
        #[command(flatten)]
        seed: Seed,
    },
    /// Time random systems per degree and report pass rates.
    Bench {
        /// Inclusive range such as `3..8`.
        #[arg(long, default_value = "3..8")]
        degrees: String,
        /// Systems per degree and coefficient field (real, complex).
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[command(flatten)]
        seed: Seed,
    },
}

/// Usage or input errors exit with 1, numerical failures with 2.
enum Failure {
    Usage(String),
    Numerical(String),
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn numerical(e: impl std::fmt::Display) -> Failure {
    Failure::Numerical(e.to_string())
}

fn read_poly(path: &Path) -> Result<BivariatePoly, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    io::parse_poly(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Repr { poly, format, quality, seed } => {
            let p = read_poly(&poly)?;
            let outcome = verify::robust_construct(&p, &quality.into(), seed.seed).map_err(numerical)?;
            if !outcome.passed() {
                return Err(numerical(format!(
                    "best representation after {} attempts scored {:.3e} (threshold {:.1e})",
                    outcome.attempts.len(),
                    outcome.report.scaled,
                    quality.delta
                )));
            }
            match format {
                RepFormat::Json => emit(&io::rep_to_json(&outcome.rep)),
                RepFormat::Text => emit_raw(&outcome.rep.to_string()),
            }
        }
        Command::Verify { poly, rep, quality, seed } => {
            let p = read_poly(&poly)?;
            let text = std::fs::read_to_string(&rep).map_err(|e| usage(format!("{}: {e}", rep.display())))?;
            let rep = io::rep_from_json(&text).map_err(usage)?;
            let report = verify::quality(&p, &rep, &quality.into(), seed.seed);
            emit(&serde_json::to_string(&report).expect("plain data"));
            if !report.passed {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Solve { p, q, refine, format, seed } => {
            let (p, q) = (read_poly(&p)?, read_poly(&q)?);
            let options = SolveOptions { refine, ..SolveOptions::default() };
            let set = mep::solve_system(&p, &q, &options, seed.seed).map_err(numerical)?;
            match format {
                RootFormat::Json => emit(&io::roots_to_json(&set)),
                RootFormat::Csv => emit_raw(&io::roots_to_csv(&set)),
            }
        }
        Command::Compose { factors, seed } => {
            let mut parsed = Vec::with_capacity(factors.len());
            for spec in &factors {
                let (path, mult) = match spec.rsplit_once(':') {
                    Some((path, m)) => (path, m.parse::<usize>().map_err(|e| usage(format!("`{spec}`: {e}")))?),
                    None => (spec.as_str(), 1),
                };
                parsed.push((read_poly(Path::new(path))?, mult));
            }
            let rep = compose::represent_factored(&parsed, &QualityParams::default(), seed.seed).map_err(|e| match e {
                compose::ComposeError::ZeroMultiplicity { .. } | compose::ComposeError::Empty => usage(e),
                _ => numerical(e),
            })?;
            emit(&io::rep_to_json(&rep));
        }
        Command::Eval { poly, at } => {
            let p = read_poly(&poly)?;
            let coord = |s: &str| io::parse_complex(s).ok_or_else(|| usage(format!("bad coordinate `{s}`")));
            let (x, y) = (coord(&at[0])?, coord(&at[1])?);
            emit(&io::format_complex(p.eval(x, y)));
        }
        Command::Normalize { poly, seed } => {
            let p = read_poly(&poly)?;
            let record = transform::normalize(&p, seed.seed).map_err(numerical)?;
            emit(&io::normalization_to_json(&record));
        }
        Command::Bench { degrees, trials, seed } => {
            let (lo, hi) = parse_range(&degrees).ok_or_else(|| usage(format!("bad degree range `{degrees}`")))?;
            bench(lo, hi, trials, seed.seed);
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Writes one line; a closed pipe downstream is not an error.
fn emit(text: &str) {
    emit_raw(&format!("{text}\n"));
}

fn emit_raw(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn parse_range(s: &str) -> Option<(usize, usize)> {
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo.parse().ok()?, hi.trim_start_matches('=').parse().ok()?),
        None => {
            let n = s.parse().ok()?;
            (n, n)
        }
    };
    (1 <= lo && lo <= hi).then_some((lo, hi))
}

/// Full polynomial of degree `n`, coefficients with real (and imaginary)
/// parts uniform on `[0, 1]`.
fn random_poly(n: usize, complex: bool, rng: &mut ChaCha8Rng) -> BivariatePoly {
    let mut terms = Vec::new();
    for d in 0..=n {
        for j in 0..=d {
            let re: f64 = rng.random();
            let im: f64 = if complex { rng.random() } else { 0.0 };
            terms.push((d - j, j, C64::new(re, im)));
        }
    }
    BivariatePoly::from_terms(terms)
}

fn bench(lo: usize, hi: usize, trials: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    emit(&format!("{:>6} {:>8} {:>10} {:>10} {:>10}", "degree", "systems", "mean_ms", "max_ms", "pass_rate"));
    for n in lo..=hi {
        let (mut total_ms, mut max_ms, mut passed, mut systems) = (0.0f64, 0.0f64, 0usize, 0usize);
        for complex in [false, true] {
            for trial in 0..trials {
                let p = random_poly(n, complex, &mut rng);
                let q = random_poly(n, complex, &mut rng);
                let start = Instant::now();
                let result = mep::solve_system(&p, &q, &SolveOptions::default(), seed.wrapping_add(trial as u64));
                let ms = start.elapsed().as_secs_f64() * 1e3;
                total_ms += ms;
                max_ms = max_ms.max(ms);
                systems += 1;
                let tol = 1e-6 * (1.0 + p.max_abs().max(q.max_abs()));
                if let Ok(set) = result {
                    if set.count == n * n && set.roots.iter().all(|r| r.residual() < tol) {
                        passed += 1;
                    }
                }
            }
        }
        let mean = if systems > 0 { total_ms / systems as f64 } else { 0.0 };
        let rate = if systems > 0 { passed as f64 / systems as f64 } else { 0.0 };
        emit(&format!("{n:>6} {systems:>8} {mean:>10.2} {max_ms:>10.2} {rate:>10.3}"));
    }
}
