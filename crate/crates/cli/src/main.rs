use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use netsize::anonymity::{
    assign_hashes, estimate_n2_psi, estimate_n3_psi, hash_survey, Code, HashSpace,
};
use netsize::estimators::{n1, n2, n3};
use netsize::generate::rewire_for_clustering;
use netsize::harness::{failure_curve, stream_rng, write_raw_csv, write_summary_csv};
use netsize::ingest::{write_edge_list, write_id_map};
use netsize::{
    clustering_stats, load_edge_list, rds_capture, run_plan, uniform_sample, EdgeListSpec,
    EstimateResult, EstimatorKind, ExperimentPlan, GraphFamily, Ingested, RdsConfig, Survey,
};

#[derive(Parser)]
#[command(
    name = "netsize",
    version,
    about = "Population size estimation from network samples"
)]
struct Cli {
    /// Master seed for all random draws.
    #[arg(long, global = true)]
    rng_seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file, or directory for `experiment` and `ingest`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random graph and write it as an edge list.
    Generate {
        #[arg(long)]
        family: GraphFamily,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        n: usize,
        /// Rewire towards this average clustering coefficient.
        #[arg(long)]
        clustering: Option<f64>,
    },
    /// Draw an RDS (or uniform) sample and write the sample dump.
    Sample {
        #[command(flatten)]
        edges: EdgeArgs,
        #[arg(long)]
        r: usize,
        /// Uniform sample instead of RDS.
        #[arg(long)]
        uniform: bool,
        #[arg(long, default_value_t = 7)]
        seeds: usize,
        /// Replace identities by codes from a hash space of this size.
        #[arg(long)]
        omega: Option<u64>,
        #[arg(long, value_enum, default_value_t = HashKind::Random)]
        hash_mode: HashKind,
        /// Telefunken codes from the last `k` phone digits (|Ω| = 4^k).
        #[arg(long, conflicts_with = "omega")]
        telefunken_digits: Option<u32>,
    },
    /// Apply an estimator to a sample dump.
    Estimate {
        #[arg(long)]
        sample: PathBuf,
        #[arg(long)]
        estimator: EstimatorKind,
        /// Hash-space size, required by the hashed estimators.
        #[arg(long)]
        omega: Option<u64>,
    },
    /// Run an experiment plan and write raw, summary and failure-rate CSVs.
    Experiment {
        #[arg(long)]
        plan: PathBuf,
    },
    /// Load, clean and relabel an edge list.
    Ingest {
        #[command(flatten)]
        edges: EdgeArgs,
    },
    /// Node and edge counts, average clustering and transitivity.
    Stats {
        #[command(flatten)]
        edges: EdgeArgs,
    },
}

#[derive(Args)]
struct EdgeArgs {
    /// Edge list, one `u v` pair per line.
    #[arg(long)]
    edges: PathBuf,
    /// Treat lines as arcs and take the union of both directions.
    #[arg(long)]
    symmetrize: bool,
    #[arg(long)]
    dedupe: bool,
    #[arg(long)]
    drop_loops: bool,
    /// Keep only edges between the IDs listed in this file.
    #[arg(long)]
    node_filter: Option<PathBuf>,
}

impl EdgeArgs {
    fn load(&self) -> Result<Ingested> {
        let spec = EdgeListSpec {
            path: self.edges.clone(),
            symmetrize: self.symmetrize,
            node_filter: self.node_filter.clone(),
            dedupe: self.dedupe,
            drop_loops: self.drop_loops,
        };
        load_edge_list(&spec).with_context(|| format!("loading {}", self.edges.display()))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum HashKind {
    Random,
    Injective,
}

/// Stream tags for the CLI's own draws.
const TAG_GENERATE: u64 = 101;
const TAG_SAMPLE: u64 = 102;
const TAG_HASH: u64 = 103;
const TAG_REWIRE: u64 = 104;

fn header(command: &str, seed: u64, params: &[(&str, String)]) -> Vec<String> {
    let mut line = format!("command={command} seed={seed}");
    for (k, v) in params {
        line.push_str(&format!(" {k}={v}"));
    }
    vec![format!("netsize {}", env!("CARGO_PKG_VERSION")), line]
}

fn announce(lines: &[String]) {
    for line in lines {
        eprintln!("# {line}");
    }
}

/// File named by `--out`, or stdout.
fn output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(io::BufWriter::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn out_dir(out: Option<&Path>) -> Result<&Path> {
    let dir = out.context("--out <DIR> is required")?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn describe(result: &EstimateResult<f64>) -> String {
    match result {
        EstimateResult::Estimate(v) => format!("estimate={v}"),
        EstimateResult::Failed(cause) => format!("failed={cause}"),
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let seed = cli.rng_seed.unwrap_or(0);
    let out = cli.out.as_deref();
    match cli.command {
        Command::Generate {
            family,
            lambda,
            n,
            clustering,
        } => {
            let mut params = vec![
                ("family", family.to_string()),
                ("lambda", lambda.to_string()),
                ("n", n.to_string()),
            ];
            if let Some(c) = clustering {
                params.push(("clustering", c.to_string()));
            }
            let head = header("generate", seed, &params);
            announce(&head);
            let mut g = family.generate(lambda, n, &mut stream_rng(seed, &[TAG_GENERATE]))?;
            if let Some(target) = clustering {
                g = rewire_for_clustering(
                    &g,
                    target,
                    200 * n.max(1000),
                    &mut stream_rng(seed, &[TAG_REWIRE]),
                )?;
                let stats = clustering_stats(&g);
                eprintln!("# average_clustering={}", stats.average_clustering);
            }
            write_edge_list(&g, &head, output(out)?)?;
        }
        Command::Sample {
            edges,
            r,
            uniform,
            seeds,
            omega,
            hash_mode,
            telefunken_digits,
        } => {
            let mut params = vec![
                ("edges", edges.edges.display().to_string()),
                ("r", r.to_string()),
            ];
            if uniform {
                params.push(("mode", "uniform".into()));
            } else {
                params.push(("seeds", seeds.to_string()));
            }
            let space = match (omega, telefunken_digits) {
                (Some(o), None) => Some(match hash_mode {
                    HashKind::Random => HashSpace::random_function(o)?,
                    HashKind::Injective => HashSpace::injective(o)?,
                }),
                (None, Some(k)) => Some(HashSpace::telefunken(k)?),
                _ => None,
            };
            if let Some(space) = &space {
                params.push(("omega", space.size().to_string()));
            }
            announce(&header("sample", seed, &params));
            let Ingested { graph, id_map, .. } = edges.load()?;
            let mut rng = stream_rng(seed, &[TAG_SAMPLE]);
            let survey = if uniform {
                Survey::uniform(&graph, &uniform_sample(&graph, r, &mut rng)?)?
            } else {
                let cfg = RdsConfig {
                    num_seeds: seeds,
                    ..RdsConfig::new(r)
                };
                rds_capture(&graph, &cfg, &mut rng)?.to_survey()
            };
            let dump: Survey<Code> = match &space {
                Some(space) => {
                    let codes =
                        assign_hashes(graph.n(), space, &mut stream_rng(seed, &[TAG_HASH]))?;
                    hash_survey(&survey, &codes)?
                }
                None => survey.map_ids(|&v| id_map[v]),
            };
            dump.write_csv(output(out)?)?;
        }
        Command::Estimate {
            sample,
            estimator,
            omega,
        } => {
            let mut params = vec![
                ("sample", sample.display().to_string()),
                ("estimator", estimator.to_string()),
            ];
            if let Some(o) = omega {
                params.push(("omega", o.to_string()));
            }
            announce(&header("estimate", seed, &params));
            let survey: Survey<Code> = Survey::read_csv_file(&sample)?;
            let result = match estimator {
                EstimatorKind::N1 => n1(&survey)?,
                EstimatorKind::N2 => n2(&survey)?,
                EstimatorKind::N3 => n3(&survey)?,
                EstimatorKind::N2Psi | EstimatorKind::N3Psi => {
                    let Some(omega) = omega else {
                        bail!("{estimator} needs --omega")
                    };
                    if estimator == EstimatorKind::N2Psi {
                        estimate_n2_psi(&survey, omega)?
                    } else {
                        estimate_n3_psi(&survey, omega)?
                    }
                }
            };
            let omega = omega.map_or_else(String::new, |o| format!(" omega={o}"));
            let mut w = output(out)?;
            writeln!(w, "estimator={estimator}{omega} {}", describe(&result))?;
            w.flush()?;
        }
        Command::Experiment { plan } => {
            let mut parsed = ExperimentPlan::from_file(&plan)?;
            if let Some(s) = cli.rng_seed {
                parsed.seed = s;
            }
            let head = header(
                "experiment",
                parsed.seed,
                &[
                    ("plan", plan.display().to_string()),
                    ("runs", parsed.run_count().to_string()),
                ],
            );
            announce(&head);
            let dir = out_dir(out)?;
            let results = run_plan(&parsed)?;
            let plan_text: String = head.iter().map(|l| format!("# {l}\n")).collect::<String>()
                + &parsed.to_plan_string();
            fs::write(dir.join("plan.txt"), plan_text)?;
            write_raw_csv(
                &results.raw,
                io::BufWriter::new(fs::File::create(dir.join("raw.csv"))?),
            )?;
            write_summary_csv(
                &results.summary,
                io::BufWriter::new(fs::File::create(dir.join("summary.csv"))?),
            )?;
            let mut curve = io::BufWriter::new(fs::File::create(dir.join("failure_curve.csv"))?);
            writeln!(curve, "estimator,r,n,cells,mean_failure_rate")?;
            for p in failure_curve(&results.summary) {
                writeln!(
                    curve,
                    "{},{},{},{},{}",
                    p.estimator, p.r, p.n, p.cells, p.mean_failure_rate
                )?;
            }
            curve.flush()?;
            eprintln!(
                "# wrote {} raw rows to {}",
                results.raw.len(),
                dir.display()
            );
        }
        Command::Ingest { edges } => {
            let head = header(
                "ingest",
                seed,
                &[("edges", edges.edges.display().to_string())],
            );
            announce(&head);
            let ingested = edges.load()?;
            println!("{}", ingested.report);
            if out.is_some() {
                let dir = out_dir(out)?;
                let mut head = head;
                head.push(ingested.report.to_string());
                write_edge_list(
                    &ingested.graph,
                    &head,
                    io::BufWriter::new(fs::File::create(dir.join("edges.txt"))?),
                )?;
                write_id_map(
                    &ingested.id_map,
                    io::BufWriter::new(fs::File::create(dir.join("id_map.txt"))?),
                )?;
            }
        }
        Command::Stats { edges } => {
            announce(&header(
                "stats",
                seed,
                &[("edges", edges.edges.display().to_string())],
            ));
            let ingested = edges.load()?;
            let stats = clustering_stats(&ingested.graph);
            let mut w = output(out)?;
            writeln!(
                w,
                "nodes={} edges={} average_clustering={} transitivity={} triangles={}",
                ingested.report.nodes,
                ingested.report.edges,
                stats.average_clustering,
                stats.transitivity,
                stats.triangles
            )?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
