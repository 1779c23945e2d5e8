//! Command-line front-end. Every subcommand is a thin composition of
//! library operations; no statistics logic lives here.
//!
//! Exit codes: 1 usage errors, 2 input-format errors, 3 infeasibility,
//! 4 non-convergence or guard trips.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use igwt::error::Error;
use igwt::estimate::{self, FitOptions, FitTemplate};
use igwt::offspring::{MomentPair, NativeParams, OffspringFamily};
use igwt::structure::ModelSpec;
use igwt::{check, corpus, moments, simulate, stats, SimConfig};

#[derive(Parser)]
#[command(name = "igwt", version, about = "Inhomogeneous Galton-Watson tree toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a corpus of trees from a model
    Simulate {
        #[command(flatten)]
        model: ModelArg,
        /// Number of trees to generate
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Base seed; replicate i draws from substream (seed, i)
        #[arg(long)]
        seed: Option<u64>,
        /// Per-tree vertex guard
        #[arg(long, default_value_t = 1_000_000)]
        max_vertices: usize,
        /// Per-tree generation guard
        #[arg(long, default_value_t = 10_000)]
        max_generations: u32,
        /// Output corpus file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a model template to a corpus by maximum likelihood
    Fit {
        /// Corpus file to fit
        #[arg(long)]
        corpus: PathBuf,
        /// Template file fixing families and structure kinds
        #[arg(long, conflicts_with = "reference_template")]
        template: Option<PathBuf>,
        /// Use the built-in reference template
        #[arg(long)]
        reference_template: bool,
        /// Number of deterministic multi-starts
        #[arg(long, default_value_t = 16)]
        starts: usize,
        /// Iteration budget per start
        #[arg(long, default_value_t = 4000)]
        max_iterations: usize,
        /// Output file for the fitted model (with fit metadata)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analytical moments of a model
    Moments {
        #[command(flatten)]
        model: ModelArg,
        /// Truncation tolerance for the infinite sums
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Output CSV with per-generation series
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a model against a data corpus
    Check {
        #[command(flatten)]
        model: ModelArg,
        /// Data corpus file
        #[arg(long)]
        corpus: PathBuf,
        /// Simulation replicates
        #[arg(long, default_value_t = 10_000)]
        replicates: usize,
        /// Ensemble seed
        #[arg(long)]
        seed: Option<u64>,
        /// Truncation tolerance for analytical columns
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Output JSON report
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for plot-ready CSV series
        #[arg(long)]
        csv_dir: Option<PathBuf>,
    },
    /// Transform between moment and native offspring parameters
    Transform {
        /// Offspring family
        #[arg(long, value_parser = parse_family)]
        family: OffspringFamily,
        /// Mean of the target distribution
        #[arg(long, requires = "variance", conflicts_with = "native")]
        mean: Option<f64>,
        /// Variance of the target distribution
        #[arg(long, requires = "mean")]
        variance: Option<f64>,
        /// Native parameters (p and lambda, or p and q) for the reverse map
        #[arg(long, num_args = 2, value_names = ["P", "LAMBDA_OR_Q"])]
        native: Option<Vec<f64>>,
    },
    /// Per-tree and aggregate summaries of a corpus
    Summarize {
        /// Corpus file
        #[arg(long)]
        corpus: PathBuf,
        /// Output CSV with one row per tree
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArg {
    /// Model file (JSON)
    #[arg(long, conflicts_with = "reference_model")]
    model: Option<PathBuf>,
    /// Use the built-in reference model for distribution-grid topologies
    #[arg(long)]
    reference_model: bool,
}

impl ModelArg {
    fn load(&self) -> Result<ModelSpec, Error> {
        match &self.model {
            Some(path) => ModelSpec::from_json(&std::fs::read_to_string(path)?),
            None if self.reference_model => Ok(ModelSpec::reference()),
            None => Err(Error::InvalidParameter(
                "pass --model FILE or --reference-model".into(),
            )),
        }
    }
}

fn parse_family(s: &str) -> Result<OffspringFamily, String> {
    match s {
        "poisson-zero" => Ok(OffspringFamily::PoissonZero),
        "geometric-zero" => Ok(OffspringFamily::GeometricZero),
        other => Err(format!(
            "unknown family `{other}` (expected poisson-zero or geometric-zero)"
        )),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with success status
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Maps library errors onto the documented exit codes.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) | Error::PgfArgument(_) => 1,
        Error::CorpusParse { .. } | Error::Io(_) | Error::ModelFile(_) | Error::EmptyInput(_) => 2,
        Error::InfeasibleMoments { .. }
        | Error::InfeasibleGeneration { .. }
        | Error::FinitenessNotCertified
        | Error::NoFeasibleStart => 3,
        Error::TruncationCap(_) | Error::GuardExceeded(_) => 4,
        Error::InReplicate { source, .. } => exit_code(source),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Simulate { model, count, seed, max_vertices, max_generations, out } => {
            let model = model.load()?;
            let seed = announce_seed(seed);
            let config = SimConfig { seed, max_vertices, max_generations };
            let trees = simulate::sample_ensemble(&model, count, &config)?;
            let text = corpus::serialize(&trees);
            emit(out.as_deref(), &text)?;
            eprintln!("simulated {count} trees (seed {seed})");
            Ok(ExitCode::SUCCESS)
        }
        Command::Fit { corpus: corpus_path, template, reference_template, starts, max_iterations, out } => {
            let trees = corpus::parse(&std::fs::read_to_string(&corpus_path)?)?;
            let template = match template {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
                None if reference_template => FitTemplate::reference(),
                None => {
                    return Err(Error::InvalidParameter(
                        "pass --template FILE or --reference-template".into(),
                    ))
                }
            };
            let stats = stats::tally(&trees);
            let options = FitOptions { starts, max_iterations, ..Default::default() };
            let result = estimate::fit(&stats, &template, &options)?;
            println!("log-likelihood: {}", sig4(result.log_likelihood));
            println!(
                "mean structure {:?}: {}",
                result.model.mean.kind(),
                join_sig4(result.model.mean.params())
            );
            println!(
                "variance structure {:?}: {}",
                result.model.variance.kind(),
                join_sig4(result.model.variance.params())
            );
            if result.boundary {
                println!("note: optimum lies on the parameter boundary");
            }
            if let Some(path) = out {
                write_atomic(&path, &fit_result_json(&result))?;
            }
            if result.converged {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("warning: optimizer did not converge within the iteration budget");
                Ok(ExitCode::from(4))
            }
        }
        Command::Moments { model, tol, out } => {
            let model = model.load()?;
            let report = moments::moment_report(&model, tol)?;
            println!("total vertices: mean {}, variance {}", sig4(report.total_mean), sig4(report.total_var));
            println!("height:         mean {}, variance {}", sig4(report.height_mean), sig4(report.height_var));
            println!("leaves:         mean {}, variance {}", sig4(report.leaf_total_mean), sig4(report.leaf_total_var));
            println!(
                "truncated after generation {} (certified tail <= {:e})",
                report.truncation_generation, report.truncation_tol
            );
            if let Some(path) = out {
                write_atomic(&path, &report.to_csv())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { model, corpus: corpus_path, replicates, seed, tol, out, csv_dir } => {
            let model = model.load()?;
            let data = corpus::parse(&std::fs::read_to_string(&corpus_path)?)?;
            let seed = announce_seed(seed);
            let report = check::check(&model, &data, replicates, seed, tol)?;
            println!("statistic        data (mean, var)      simulation (mean, var)  analytical (mean, var)");
            for row in &report.table {
                println!(
                    "{:<16} ({}, {})  ({}, {})  ({}, {})",
                    row.statistic,
                    sig4(row.data.mean),
                    sig4(row.data.variance),
                    sig4(row.simulation.mean),
                    sig4(row.simulation.variance),
                    sig4(row.analytical.mean),
                    sig4(row.analytical.variance),
                );
            }
            if let Some(path) = out {
                write_atomic(&path, &report.to_json())?;
            }
            if let Some(dir) = csv_dir {
                report.write_csv_files(&dir)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Transform { family, mean, variance, native } => {
            match (mean, variance, native) {
                (Some(mean), Some(variance), None) => {
                    let native = family.from_moments(MomentPair::new(mean, variance))?;
                    match native {
                        NativeParams::PoissonZero { p, lambda } => {
                            println!("p = {}", sig4(p));
                            println!("lambda = {}", sig4(lambda));
                        }
                        NativeParams::GeometricZero { p, q } => {
                            println!("p = {}", sig4(p));
                            println!("q = {}", sig4(q));
                        }
                    }
                }
                (None, None, Some(values)) => {
                    let native = match family {
                        OffspringFamily::PoissonZero => {
                            NativeParams::poisson_zero(values[0], values[1])?
                        }
                        OffspringFamily::GeometricZero => {
                            NativeParams::geometric_zero(values[0], values[1])?
                        }
                    };
                    let m = native.moments();
                    println!("mean = {}", sig4(m.mean));
                    println!("variance = {}", sig4(m.variance));
                }
                _ => {
                    return Err(Error::InvalidParameter(
                        "pass either --mean and --variance, or --native P LAMBDA_OR_Q".into(),
                    ))
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Summarize { corpus: corpus_path, out } => {
            let trees = corpus::parse(&std::fs::read_to_string(&corpus_path)?)?;
            if trees.is_empty() {
                return Err(Error::EmptyInput("corpus has no trees"));
            }
            let mut rows = String::from("tree,total_vertices,height,leaves\n");
            let mut z = Vec::new();
            let mut h = Vec::new();
            let mut l = Vec::new();
            for (i, tree) in trees.iter().enumerate() {
                let s = tree.summary();
                rows.push_str(&format!(
                    "{i},{},{},{}\n",
                    s.total_vertices, s.height, s.leaves
                ));
                z.push(s.total_vertices as f64);
                h.push(f64::from(s.height));
                l.push(s.leaves as f64);
            }
            let moments = |v: &[f64]| {
                let mean = v.iter().sum::<f64>() / v.len() as f64;
                let var = if v.len() > 1 {
                    v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64
                } else {
                    0.0
                };
                (mean, var)
            };
            // aggregate block as comment lines, then the per-tree table
            let mut csv = format!("# trees = {}\n", trees.len());
            println!("trees: {}", trees.len());
            for (name, values) in [("total_vertices", &z), ("height", &h), ("leaves", &l)] {
                let (mean, var) = moments(values);
                csv.push_str(&format!("# {name}_mean = {mean}\n# {name}_variance = {var}\n"));
                println!("{name}: mean {}, variance {}", sig4(mean), sig4(var));
            }
            csv.push_str(&rows);
            if let Some(path) = out {
                write_atomic(&path, &csv)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Fitted model in the model-file schema plus a `fit` metadata block, so
/// the output file feeds straight back into `--model`.
fn fit_result_json(result: &estimate::FitResult) -> String {
    let mut value = serde_json::to_value(&result.model).expect("model serializes");
    value["fit"] = serde_json::json!({
        "log_likelihood": result.log_likelihood,
        "converged": result.converged,
        "boundary": result.boundary,
        "iterations": result.iterations,
        "restarts_used": result.restarts_used,
    });
    serde_json::to_string_pretty(&value).expect("fit result serializes")
}

/// Uses the given seed or draws one from system entropy, printing it
/// either way so the run can be reproduced.
fn announce_seed(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            let s = rand::random::<u64>();
            eprintln!("no --seed given; using seed {s}");
            s
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes via a sibling temp file and rename, so readers never observe a
/// half-written file.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Four significant digits for console output; files keep full precision.
fn sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (3 - magnitude).max(0) as usize;
    if !(-4..=7).contains(&magnitude) {
        format!("{x:.3e}")
    } else {
        format!("{x:.decimals$}")
    }
}

fn join_sig4(values: &[f64]) -> String {
    values.iter().map(|v| sig4(*v)).collect::<Vec<_>>().join(", ")
}
