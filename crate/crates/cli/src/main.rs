use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use systole_core::census::section4_scaling_check;
use systole_core::forms::class_cycles;
use systole_core::geodesics::IntersectionLimits;
use systole_core::{
    find_subfamily, l_value, proposition_lower_bound, subfamily_average, CurveSystemMatrix,
};
use systole_cli::error::{EXIT_INCOMPLETE, EXIT_OK, EXIT_VERIFY};
use systole_cli::output::{self, ClassNumberOutput, LowerBoundOutput, SubfamilyOutput};
use systole_cli::{
    cached_matrix, exit_code, run_census, run_verify, CensusOptions, CliError, Format,
    MatrixCache, VerifyKind, VerifyOptions,
};

/// Arithmetic invariants of congruence surfaces and crossing numbers of
/// their systoles.
#[derive(Parser)]
#[command(name = "systole", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output format; census defaults to csv, everything else to text.
    #[arg(long, global = true, value_enum, env = "SYSTOLE_FORMAT")]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true, env = "SYSTOLE_OUTPUT")]
    output: Option<PathBuf>,
    /// Directory of cached intersection matrices, one N.json per level.
    #[arg(long, global = true, env = "SYSTOLE_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, env = "SYSTOLE_SEED")]
    seed: Option<u64>,
    /// Worker threads for row computations.
    #[arg(long, global = true, env = "SYSTOLE_JOBS")]
    jobs: Option<usize>,
    /// Leave the generation time out of JSON records.
    #[arg(long, global = true, env = "SYSTOLE_NO_TIMESTAMP")]
    no_timestamp: bool,
    /// Tolerance for certified L-values.
    #[arg(long, global = true, env = "SYSTOLE_TOL", default_value_t = 1e-3)]
    tol: f64,
    /// Candidate forms allowed per enumeration pass.
    #[arg(long, global = true, env = "SYSTOLE_MAX_CANDIDATES")]
    max_candidates: Option<u64>,
}

#[derive(Args)]
struct Range {
    #[arg(long, env = "SYSTOLE_N_MIN")]
    n_min: Option<i64>,
    #[arg(long, env = "SYSTOLE_N_MAX")]
    n_max: Option<i64>,
    /// Keep only levels with N² − 4 squarefree.
    #[arg(long, env = "SYSTOLE_SQUAREFREE_ONLY")]
    squarefree_only: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Table of invariants and crossing bounds over a range of levels.
    Census {
        #[command(flatten)]
        range: Range,
        /// Include the intersection matrices in JSON output.
        #[arg(long)]
        include_matrices: bool,
    },
    /// Check the library against independent computations.
    Verify {
        #[arg(value_enum)]
        kind: VerifyKind,
        #[command(flatten)]
        range: Range,
    },
    /// Intersection matrix of the systole classes at level N.
    Intersections { n: i64 },
    /// Class number and reduced cycles of discriminant D.
    ClassNumber { d: i64 },
    /// Certified L(χ_D, 1).
    LValue { d: i64 },
    /// Find k curves of a curve system with few crossings.
    Subfamily {
        /// JSON file holding a CurveSystemMatrix; a seeded random one otherwise.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Size of the random system.
        #[arg(long, default_value_t = 12)]
        size: usize,
        /// Largest entry of the random system.
        #[arg(long, default_value_t = 9)]
        max_entry: u64,
        #[arg(long, short)]
        k: usize,
    },
    /// Crossing number lower bound for n curves on a genus g surface.
    LowerBound {
        genus: u64,
        curves: u64,
        /// Exponent α of the scaling check, e.g. 1/3.
        #[arg(long, requires = "beta")]
        alpha: Option<Ratio<i64>>,
        /// Exponent β of the scaling check, e.g. 1/6.
        #[arg(long, requires = "alpha")]
        beta: Option<Ratio<i64>>,
    },
}

fn limits(g: &Global) -> IntersectionLimits {
    match g.max_candidates {
        Some(max_candidates) => IntersectionLimits { max_candidates },
        None => IntersectionLimits::default(),
    }
}

fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    if let Some(jobs) = g.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let cache = g.cache_dir.as_ref().map(MatrixCache::open).transpose()?;
    let format = |default| g.format.unwrap_or(default);
    let emit = |bytes: Vec<u8>| output::write_output(g.output.as_deref(), &bytes);

    match cli.command {
        Command::Census {
            range,
            include_matrices,
        } => {
            let opts = CensusOptions {
                n_min: range.n_min.unwrap_or(3),
                n_max: range.n_max.unwrap_or(40),
                squarefree_only: range.squarefree_only,
                limits: limits(g),
                include_matrices,
                timestamp: !g.no_timestamp,
                seed: g.seed,
            };
            let record = run_census(&opts, cache.as_ref())?;
            emit(match format(Format::Csv) {
                Format::Json => record.to_json().into_bytes(),
                _ => record.to_csv(),
            })?;
            let missing = record.incomplete_rows();
            if !missing.is_empty() {
                eprintln!("incomplete rows: {missing:?}");
                return Ok(EXIT_INCOMPLETE);
            }
        }
        Command::Verify { kind, range } => {
            let (lo, hi) = kind.default_range();
            let opts = VerifyOptions {
                kind,
                n_min: range.n_min.unwrap_or(lo),
                n_max: range.n_max.unwrap_or(hi),
                tol: g.tol,
                seed: g.seed.unwrap_or(0),
                limits: limits(g),
            };
            let report = run_verify(&opts, cache.as_ref())?;
            emit(match format(Format::Text) {
                Format::Json => output::json(&report),
                Format::Csv => report.to_csv(),
                Format::Text => report.to_text().into_bytes(),
            })?;
            if !report.passed {
                return Ok(EXIT_VERIFY);
            }
        }
        Command::Intersections { n } => {
            if n < 3 {
                return Err(CliError::Usage(format!("intersections need N >= 3, got {n}")).into());
            }
            let m = cached_matrix(n, limits(g), cache.as_ref())?;
            emit(output::render_matrix(&m, format(Format::Text)))?;
        }
        Command::ClassNumber { d } => {
            let cycles = class_cycles(d)?;
            let out = ClassNumberOutput {
                discriminant: d,
                class_number: cycles.len(),
                cycles: cycles.into_iter().map(|c| c.forms).collect(),
            };
            emit(output::render_class_number(&out, format(Format::Text)))?;
        }
        Command::LValue { d } => {
            let l = l_value::<f64>(d, g.tol)?;
            emit(output::render_l_value(&l, format(Format::Text)))?;
        }
        Command::Subfamily {
            matrix,
            size,
            max_entry,
            k,
        } => {
            let seed = g.seed.unwrap_or(0);
            let m = match matrix {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
                    let parsed: CurveSystemMatrix = serde_json::from_str(&text)
                        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                    CurveSystemMatrix::new(parsed.entries, parsed.genus)?
                }
                None => CurveSystemMatrix::random(size, max_entry, seed),
            };
            let n = m.len();
            let cr = m.crossing_number();
            let out = SubfamilyOutput {
                size: n,
                k,
                crossing_number: cr,
                average: subfamily_average(&m, k)?,
                bound: Ratio::new((k * k) as u128 * cr, (n * n).max(1) as u128),
                subfamily: find_subfamily(&m, k, seed)?,
            };
            emit(output::render_subfamily(&out, format(Format::Text)))?;
        }
        Command::LowerBound {
            genus,
            curves,
            alpha,
            beta,
        } => {
            let scaling = match (alpha, beta) {
                (Some(a), Some(b)) => Some(section4_scaling_check(genus, a, b)?),
                _ => None,
            };
            let out = LowerBoundOutput {
                genus,
                curves,
                lower_bound: proposition_lower_bound(genus, curves)?,
                scaling,
            };
            emit(output::render_lower_bound(&out, format(Format::Text)))?;
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
