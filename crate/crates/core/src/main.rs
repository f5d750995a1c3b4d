use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use changevar::circle::PiecewiseLinearFunction;
use changevar::construction::{
    build_delta_sequence, build_delta_sequence_exploratory, build_f, build_u, build_v, place_intervals,
    TriangleSystem,
};
use changevar::experiments::config::{check_alpha, parse_number};
use changevar::experiments::{emit, lacunary_fixture, run_obstruction, verify_all, Config, Format, ObstructionOptions};
use changevar::fourier::{default_kmax, dft_coeffs};
use changevar::seminorm::{sobolev_integral_s, sobolev_spectral, ModulusSpec, SeminormReport};
use changevar::stieltjes::stieltjes_check;
use changevar::{Error, Result};

#[derive(Parser)]
#[command(name = "changevar", version, about = "Change-of-variable experiments for W_2^{1/2} on the circle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every verification suite.
    Verify {
        /// Flat key = value configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print the full report as JSON instead of one line per suite.
        #[arg(long)]
        json: bool,
    },
    /// Build the triangle construction and write one of its functions.
    Construct {
        #[arg(long, default_value = "1/3")]
        alpha: String,
        #[arg(long)]
        blocks: usize,
        /// Keep only the first K triangles.
        #[arg(long)]
        truncation: Option<usize>,
        #[arg(long, value_enum, default_value_t = Which::F)]
        function: Which,
        #[arg(long)]
        out: PathBuf,
        /// Also write the triangle system.
        #[arg(long)]
        system: Option<PathBuf>,
        /// Accept α = 1/2 with the unchecked scale sequence.
        #[arg(long)]
        exploratory: bool,
    },
    /// Spectral and integral seminorms of a function read from JSON.
    Seminorm {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "0.5")]
        s: String,
        #[arg(long, default_value_t = 1 << 14)]
        grid: usize,
    },
    /// Exact Stieltjes integral of v against u_n for a stored triangle system.
    Stieltjes {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        n: u64,
        /// Per-interval contributions as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Search for a homeomorphism that shrinks the duality products.
    Obstruct {
        #[arg(long, default_value = "1/3")]
        alpha: String,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
        blocks: Vec<usize>,
        #[arg(long, default_value_t = 32)]
        knots: usize,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "json,csv")]
        format: Vec<String>,
    },
    /// Dyadic lacunary partial sum.
    Lacunary {
        #[arg(long)]
        terms: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    U,
    V,
    F,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn omega_from(alpha: &str, exploratory: bool) -> Result<ModulusSpec> {
    let omega = ModulusSpec::Power { alpha: parse_number(alpha)? };
    check_alpha(&omega, exploratory)?;
    Ok(omega)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { config, json } => {
            let config = match config {
                Some(p) => Config::load(&p)?,
                None => Config::default(),
            };
            let report = verify_all(&config)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                for w in &report.warnings {
                    println!("WARNING {w}");
                }
                for s in &report.suites {
                    println!("{}", s.line());
                }
            }
            Ok(report.passed())
        }
        Command::Construct { alpha, blocks, truncation, function, out, system, exploratory } => {
            let omega = omega_from(&alpha, exploratory)?;
            let seq = if exploratory {
                build_delta_sequence_exploratory(&omega, blocks)?
            } else {
                build_delta_sequence(&omega, blocks)?
            };
            let sys = place_intervals(&seq, truncation.unwrap_or(seq.len()).min(seq.len()))?;
            let f = match function {
                Which::U => build_u(&sys),
                Which::V => build_v(&sys),
                Which::F => build_f(&sys),
            };
            write_json(&out, &f)?;
            if let Some(p) = system {
                write_json(&p, &sys)?;
            }
            eprintln!("K = {} triangles, {} knots", sys.len(), f.len());
            Ok(true)
        }
        Command::Seminorm { input, s, grid } => {
            let s = parse_number(&s)?;
            if !(s > 0.0 && s < 1.0) {
                return Err(Error::Config(format!("s = {s} must lie in (0, 1)")));
            }
            let f: PiecewiseLinearFunction = read_json(&input)?;
            f.require_periodic()?;
            let g = f.sample(grid)?;
            let report = SeminormReport {
                spectral: sobolev_spectral(&dft_coeffs(&g, default_kmax(grid))?, s),
                integral: sobolev_integral_s(&g, s),
                s,
                n: grid,
            };
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(true)
        }
        Command::Stieltjes { system, n, csv } => {
            if n == 0 {
                return Err(Error::Config("n must be positive".into()));
            }
            let sys: TriangleSystem = read_json(&system)?;
            let report = stieltjes_check(&sys, n)?;
            if let Some(p) = csv {
                report.write_csv(fs::File::create(p)?)?;
            }
            println!("{}", serde_json::to_string_pretty(&report)?);
            for (k, why) in report.violations() {
                eprintln!("violation at k={k}: {why}");
            }
            Ok(report.holds())
        }
        Command::Obstruct { alpha, blocks, knots, budget, seed, restarts, out, format } => {
            let formats = format.iter().map(|f| f.parse()).collect::<Result<Vec<Format>>>()?;
            let opts = ObstructionOptions { omega: omega_from(&alpha, false)?, blocks, knots, budget, restarts, seed };
            let records = run_obstruction(&opts)?;
            for path in emit(&records, &out, &formats)? {
                eprintln!("wrote {}", path.display());
            }
            let mut ok = true;
            for r in &records {
                let failures = r.failures();
                println!(
                    "{} J={} K={} sup_lower_bound={:.9} min_product={:.9} evals={}",
                    if failures.is_empty() { "PASS" } else { "FAIL" },
                    r.blocks,
                    r.triangles,
                    r.sup_lower_bound,
                    r.min_product,
                    r.evals
                );
                for f in failures {
                    println!("  {f}");
                    ok = false;
                }
            }
            Ok(ok)
        }
        Command::Lacunary { terms } => {
            let report = lacunary_fixture(terms)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok((report.seminorm_sq - report.expected).abs() <= 1e-12 * report.expected)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
