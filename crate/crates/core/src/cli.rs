//! Command-line front end for the `treedet` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::caps::Caps;
use crate::determinantal::{verify_boltzmann_determinantal, verify_even_odd_window, verify_uncovered_determinantal, window_marginal};
use crate::error::{Error, Result};
use crate::experiments::{
    canopy_experiment, entropy_sequence, local_approx_experiment, local_approx_sweep, pelda_experiment,
    ExperimentReport, Family,
};
use crate::law::{tv_distance, SubsetLaw};
use crate::matching::{
    exact_boltzmann_uncovered_law, exact_uncovered_law, matching_polynomial, max_matching_stats, BoltzmannSampler,
    Coefficients, Count, UniformMaxMatchingSampler,
};
use crate::recursions::{ptemp_kernel_row, solve_m_z, solve_m_zero, zero_kernel_row};
use crate::spectral::{kernel_projection, positive_temp_projection, windowed_projection, ProjectionMatrix};
use crate::tree::{
    bipartition_by_parity, gen_alternating, gen_kary, gen_path, gen_regular_ball, gen_star, parse_graph, parse_tree,
    random_tree, Bipartition, Class, Tree,
};

#[derive(Parser, Debug)]
#[command(name = "treedet", version, about = "Determinantal processes of tree matchings")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format (defaults to csv for `canopy`, json otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Maximum generated tree size (overrides TREEDET_CAP).
    #[arg(long, global = true)]
    cap: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GenFamily {
    Path,
    Kary,
    Ball,
    Alt,
    Star,
    Random,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SeqFamily {
    KaryOdd,
    Ball,
    Path,
    Alt,
    Files,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a tree as edge-list text.
    Gen {
        #[arg(long, value_enum)]
        family: GenFamily,
        /// Depth for kary/ball/alt, vertex count for path/random, leaves for star.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
    },
    /// Matching statistics, laws and samples.
    Matchings {
        file: PathBuf,
        #[arg(long)]
        z: Option<f64>,
        #[arg(long)]
        law: bool,
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Projection matrices.
    Kernel {
        file: PathBuf,
        #[arg(long)]
        z: Option<f64>,
        /// Root vertex and radius of the window.
        #[arg(long, num_args = 2, value_names = ["O", "R"])]
        window: Option<Vec<usize>>,
    },
    /// Recursion values and the kernel row of the root.
    Recursions {
        file: PathBuf,
        #[arg(long)]
        root: usize,
        #[arg(long)]
        z: Option<f64>,
    },
    /// Verify determinantal identities on a tree.
    Detcheck {
        file: PathBuf,
        #[arg(long)]
        z: Option<f64>,
        /// Root, marginal radius and window radius.
        #[arg(long, num_args = 3, value_names = ["O", "r", "R"])]
        window: Option<Vec<usize>>,
    },
    /// Compare global and windowed projections vertex by vertex.
    LocalApprox {
        file: PathBuf,
        #[arg(long)]
        r: usize,
        /// One or more window radii, comma separated.
        #[arg(long = "big-r", value_delimiter = ',', required = true)]
        big_r: Vec<usize>,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long)]
        tv: bool,
    },
    /// Normalized log-counts of maximum matchings along a tree family.
    EntropySeq {
        #[arg(long, value_enum)]
        family: SeqFamily,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
        /// Comma list or inclusive range `a..b`.
        #[arg(long)]
        indices: Option<String>,
        #[arg(long, num_args = 1..)]
        files: Vec<PathBuf>,
    },
    /// Canopy-tree counts and the limit series.
    Canopy {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 17)]
        depth_max: usize,
        #[arg(long, default_value_t = 100)]
        terms: usize,
    },
    /// Root-uncovered probabilities on the alternating trees.
    Pelda {
        #[arg(long, default_value_t = 40)]
        n_max: usize,
    },
}

enum Output {
    Text(String),
    Json(Value),
    Report(Box<ExperimentReport>),
}

/// Runs the CLI and returns the process exit code: 0 on success, 1 when a
/// verification fails or a numerical error occurs, 2 on usage or input errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut caps = Caps::from_env();
    if let Some(c) = cli.global.cap {
        caps = caps.with_max_vertices(c);
    }
    let result = match cli.global.workers {
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &caps)),
            Err(e) => Err(Error::Domain(e.to_string())),
        },
        None => dispatch(&cli, &caps),
    };
    match result.and_then(|(out, passed)| emit(&cli, out).map(|_| passed)) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("treedet: verification exceeded its tolerance");
            1
        }
        Err(e) => {
            eprintln!("treedet: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::InvalidGraph(_)
        | Error::VertexOutOfRange { .. }
        | Error::CapExceeded { .. }
        | Error::Domain(_)
        | Error::GroundMismatch(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn read_tree(path: &Path) -> Result<Tree> {
    parse_tree(&std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?)
}

fn read_graph(path: &Path) -> Result<crate::tree::Graph> {
    parse_graph(&std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?)
}

/// `S` is the color class of vertex 0.
fn default_bipartition(tree: &Tree) -> Result<Bipartition> {
    Ok(bipartition_by_parity(&tree.root_at(0)?, Class::S))
}

fn law_json(law: &SubsetLaw) -> Value {
    Value::Array(law.iter().map(|(s, p)| json!({"set": s, "prob": p})).collect())
}

fn projection_json(kind: &str, p: &ProjectionMatrix) -> Value {
    let entries: Vec<f64> = p.matrix().transpose().iter().copied().collect();
    json!({
        "kind": kind,
        "dim": p.dim(),
        "rank": p.rank(),
        "entries": entries,
        "residuals": {
            "symmetry": p.symmetry_residual(),
            "idempotence": p.idempotence_residual(),
            "annihilation": p.annihilation_residual(),
        },
        "condition": p.condition(),
    })
}

fn parse_indices(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::Domain(format!("cannot parse indices {text:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..=b).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

fn dispatch(cli: &Cli, caps: &Caps) -> Result<(Output, bool)> {
    let seed = cli.global.seed;
    let with_seed = |mut r: ExperimentReport| {
        r.seed = seed;
        r
    };
    match &cli.command {
        Command::Gen { family, n, k, d } => {
            let tree = match family {
                GenFamily::Path => gen_path(*n, caps)?,
                GenFamily::Kary => gen_kary(*k, *n, caps)?.into_tree(),
                GenFamily::Ball => gen_regular_ball(*d, *n, caps)?.into_tree(),
                GenFamily::Alt => gen_alternating(*n, caps)?.into_tree(),
                GenFamily::Star => gen_star(*n),
                GenFamily::Random => {
                    if *n == 0 {
                        return Err(Error::Domain("a tree needs at least one vertex".into()));
                    }
                    if *n > caps.max_vertices {
                        return Err(Error::CapExceeded { what: "generated tree", needed: *n as u128, cap: caps.max_vertices as u128 });
                    }
                    random_tree(*n, &mut ChaCha8Rng::seed_from_u64(seed))
                }
            };
            Ok((Output::Text(tree.to_edge_list()), true))
        }
        Command::Matchings { file, z, law, sample } => {
            let tree = read_tree(file)?;
            let stats = max_matching_stats(&tree, caps);
            let poly = matching_polynomial(&tree, caps);
            let mut out = json!({
                "n": tree.n(),
                "nu": stats.nu,
                "mm": match &stats.mm { Count::Exact(c) => json!(c.to_string()), Count::Log(_) => Value::Null },
                "log_mm": stats.mm.ln(),
            });
            let obj = out.as_object_mut().unwrap();
            match poly.coefficients() {
                Coefficients::Exact(c) => {
                    obj.insert("poly_coeffs".into(), json!(c.iter().map(|x| x.to_string()).collect::<Vec<_>>()));
                }
                Coefficients::Log(c) => {
                    obj.insert("log_coeffs".into(), json!(c));
                }
            }
            if let Some(z) = z {
                obj.insert("z".into(), json!(z));
                obj.insert("log_partition".into(), json!(poly.log_eval(*z)));
            }
            if *law {
                let l = match z {
                    Some(z) => exact_boltzmann_uncovered_law(&tree, *z, caps)?,
                    None => exact_uncovered_law(&tree, caps)?,
                };
                obj.insert("law".into(), law_json(&l));
            }
            if let Some(count) = sample {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let samples: Vec<Value> = match z {
                    Some(z) => {
                        let s = BoltzmannSampler::new(&tree, *z)?;
                        (0..*count).map(|_| json!(s.sample(&mut rng).edges())).collect()
                    }
                    None => {
                        let s = UniformMaxMatchingSampler::new(&tree);
                        (0..*count).map(|_| json!(s.sample(&mut rng).edges())).collect()
                    }
                };
                obj.insert("seed".into(), json!(seed));
                obj.insert("samples".into(), Value::Array(samples));
            }
            Ok((Output::Json(out), true))
        }
        Command::Kernel { file, z, window } => {
            if let Some(w) = window {
                let graph = read_graph(file)?;
                let (range, kernel) = windowed_projection(&graph, w[0], w[1], caps)?;
                let mut out = projection_json("windowed-kernel", &kernel);
                out["window_rank"] = json!(range.rank());
                return Ok((Output::Json(out), true));
            }
            let tree = read_tree(file)?;
            let out = match z {
                Some(z) => {
                    let bip = default_bipartition(&tree)?;
                    let mut v = projection_json("positive-temperature", &positive_temp_projection(&tree, &bip, *z, caps)?);
                    v["s"] = json!(bip.s());
                    v["z"] = json!(z);
                    v
                }
                None => projection_json("kernel", &kernel_projection(&tree, caps)?),
            };
            Ok((Output::Json(out), true))
        }
        Command::Recursions { file, root, z } => {
            let tree = read_tree(file)?;
            let rooted = tree.root_at(*root)?;
            let out = match z {
                Some(z) => {
                    let bip = default_bipartition(&tree)?;
                    let vals = solve_m_z(&rooted, *z)?;
                    let w: Vec<f64> = vals.w.iter().zip(&vals.w_sign).map(|(a, s)| a * s).collect();
                    json!({"root": root, "z": z, "m": vals.m, "w": w, "h": vals.h(&bip), "s": bip.s(),
                           "row": ptemp_kernel_row(&tree, &bip, *z, *root)?})
                }
                None => {
                    let vals = solve_m_zero(&rooted);
                    json!({"root": root, "z": 0.0, "m": vals.m, "w": vals.w, "row": zero_kernel_row(&tree, *root)?})
                }
            };
            Ok((Output::Json(out), true))
        }
        Command::Detcheck { file, z, window } => {
            let tree = read_tree(file)?;
            if let Some(w) = window {
                let (o, r, big_r) = (w[0], w[1], w[2]);
                let full = kernel_projection(&tree, caps)?;
                let (_, local) = windowed_projection(&tree, o, big_r, caps)?;
                let ball = tree.ball_vertices(o, r)?;
                let tv = tv_distance(
                    &window_marginal(full.matrix(), &ball, caps)?,
                    &window_marginal(local.matrix(), &ball, caps)?,
                )?;
                let identity = verify_even_odd_window(&tree, o, big_r, caps)?;
                let passed = identity.passed;
                let out = json!({"window": {"o": o, "r": r, "R": big_r, "vertices": ball}, "tv": tv,
                                 "even_odd": identity, "max_dev": identity.max_dev, "passed": passed});
                return Ok((Output::Json(out), passed));
            }
            let report = match z {
                Some(z) => verify_boltzmann_determinantal(&tree, &default_bipartition(&tree)?, *z, caps)?,
                None => verify_uncovered_determinantal(&tree, caps)?,
            };
            let passed = report.passed;
            Ok((Output::Json(serde_json::to_value(report).unwrap()), passed))
        }
        Command::LocalApprox { file, r, big_r, epsilon, tv } => {
            let graph = read_graph(file)?;
            let rep = if big_r.len() == 1 {
                local_approx_experiment(&graph, *r, big_r[0], *epsilon, *tv, caps)?
            } else {
                local_approx_sweep(&graph, *r, big_r, *epsilon, caps)?
            };
            Ok((Output::Report(Box::new(with_seed(rep))), true))
        }
        Command::EntropySeq { family, k, d, indices, files } => {
            let fam = match family {
                SeqFamily::KaryOdd => Family::KaryOdd { k: *k },
                SeqFamily::Ball => Family::RegularBall { d: *d },
                SeqFamily::Path => Family::Path,
                SeqFamily::Alt => Family::Alternating,
                SeqFamily::Files => Family::Files(files.clone()),
            };
            let idx = match (indices, family) {
                (Some(s), _) => parse_indices(s)?,
                (None, SeqFamily::Files) => (0..files.len()).collect(),
                (None, _) => return Err(Error::Domain("--indices is required for generated families".into())),
            };
            let rep = entropy_sequence(&fam, &idx, caps)?;
            let passed = rep.passed;
            Ok((Output::Report(Box::new(with_seed(rep))), passed))
        }
        Command::Canopy { d, depth_max, terms } => {
            let rep = canopy_experiment(*d, *depth_max, *terms, caps)?;
            let passed = rep.passed;
            Ok((Output::Report(Box::new(with_seed(rep))), passed))
        }
        Command::Pelda { n_max } => {
            let rep = pelda_experiment(*n_max, caps)?;
            let passed = rep.passed;
            Ok((Output::Report(Box::new(with_seed(rep))), passed))
        }
    }
}

fn value_csv(v: &Value) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["key", "value"]).map_err(io)?;
    if let Value::Object(map) = v {
        for (k, x) in map {
            let cell = match x {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            w.write_record([k.as_str(), cell.as_str()]).map_err(io)?;
        }
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).unwrap())
}

fn emit(cli: &Cli, out: Output) -> Result<()> {
    let default = match cli.command {
        Command::Canopy { .. } => Format::Csv,
        _ => Format::Json,
    };
    let format = cli.global.format.unwrap_or(default);
    let text = match (out, format) {
        (Output::Text(t), _) => t,
        (Output::Json(v), Format::Json) => serde_json::to_string_pretty(&v).unwrap() + "\n",
        (Output::Json(v), Format::Csv) => value_csv(&v)?,
        (Output::Report(r), Format::Json) => r.to_json() + "\n",
        (Output::Report(r), Format::Csv) => r.to_csv()?,
    };
    match &cli.global.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(Error::from)
        }
    }
}
