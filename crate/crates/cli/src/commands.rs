use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use smh_core::exact::dreyfus_wagner;
use smh_core::generator::{generate_pool_until, read_pool, write_pool, Generated, GeneratorConfig, SolutionPool};
use smh_core::merge::{run_smh, MergeConfig, MergeReport};
use smh_core::stp::parse_stp;
use smh_core::treewidth::pace::parse_td;
use smh_core::treewidth::{decomposition_from_order, greedy_degree, make_nice, validate, validate_nice};
use smh_core::SteinerInstance;

use crate::bench::{self, BenchRecord};
use crate::cli::{deadline, Command, Format, GeneratorArgs, MergeArgs, OutputArgs};
use crate::output::{self, GenerationSummary, InstanceSummary, SolveOutput, TreeListing};
use crate::{exit, UsageError};

/// What a command prints and the exit code it asks for.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: exit::OK }
    }
}

pub fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Solve {
            instance,
            generator,
            merge,
            output,
            seed,
            jobs,
            time_limit,
        } => solve(&instance, &generator, &merge, &output, seed, jobs, time_limit),
        Command::Generate {
            instance,
            generator,
            output,
            seed,
            jobs,
            time_limit,
        } => generate(&instance, &generator, output.as_deref(), seed, jobs, time_limit),
        Command::Merge {
            instance,
            pool,
            merge,
            output,
            seed,
            time_limit,
        } => merge_pool(&instance, &pool, &merge, &output, seed, time_limit),
        Command::Oracle {
            instance,
            oracle_cap,
            output,
        } => oracle(&instance, oracle_cap, &output),
        Command::ValidateTd { instance, td, output } => validate_td(&instance, td.as_deref(), &output),
        Command::Bench {
            dir,
            best_known,
            drop_solved,
            jobs,
            generator,
            merge,
            output,
            seed,
            time_limit,
        } => run_bench(
            &dir,
            best_known.as_deref(),
            drop_solved,
            jobs,
            &generator,
            &merge,
            &output,
            seed,
            time_limit,
        ),
    }
}

/// Reads and parses an STP file. Unnamed instances take the file stem.
pub fn load_instance(path: &Path) -> Result<SteinerInstance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let instance = parse_stp(&text).with_context(|| format!("parsing {}", path.display()))?;
    if instance.name().is_empty() {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        return Ok(instance.with_name(stem));
    }
    Ok(instance)
}

fn generator_config(args: &GeneratorArgs, seed: u64) -> Result<GeneratorConfig> {
    let cfg = args.config(seed);
    cfg.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(cfg)
}

fn merge_config(args: &MergeArgs, seed: u64, deadline: Option<Instant>) -> Result<MergeConfig> {
    let cfg = args.config(seed, deadline);
    cfg.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(cfg)
}

fn generate_with_jobs(
    instance: &SteinerInstance,
    cfg: &GeneratorConfig,
    deadline: Option<Instant>,
    jobs: usize,
) -> Result<Generated> {
    if jobs <= 1 {
        return Ok(generate_pool_until(instance, cfg, deadline, false));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("starting worker threads")?;
    Ok(pool.install(|| generate_pool_until(instance, cfg, deadline, true)))
}

fn report_code(report: &MergeReport, generation_timed_out: bool) -> i32 {
    if generation_timed_out || report.timed_out {
        exit::TIMEOUT
    } else if report.capacity_fallback {
        exit::CAPACITY
    } else {
        exit::OK
    }
}

struct Pipeline {
    generation: GenerationSummary,
    report: MergeReport,
}

fn pipeline(
    instance: &SteinerInstance,
    gcfg: &GeneratorConfig,
    merge: &MergeArgs,
    seed: u64,
    jobs: usize,
    deadline: Option<Instant>,
) -> Result<Pipeline> {
    let mcfg = merge_config(merge, seed, deadline)?;
    let start = Instant::now();
    let generated = generate_with_jobs(instance, gcfg, deadline, jobs)?;
    let generation = GenerationSummary {
        runs: gcfg.pool_size,
        distinct: generated.pool.len(),
        best: generated.pool.best().map(|s| s.weight()).unwrap_or_default(),
        timed_out: generated.timed_out,
        seconds: start.elapsed().as_secs_f64(),
    };
    let report = run_smh(instance, &generated.pool, &mcfg)?;
    Ok(Pipeline { generation, report })
}

fn solve(
    path: &Path,
    generator: &GeneratorArgs,
    merge: &MergeArgs,
    output: &OutputArgs,
    seed: u64,
    jobs: usize,
    time_limit: Option<f64>,
) -> Result<Outcome> {
    let deadline = deadline(time_limit)?;
    let gcfg = generator_config(generator, seed)?;
    merge_config(merge, seed, None)?;
    let instance = load_instance(path)?;
    let Pipeline { generation, report } = pipeline(&instance, &gcfg, merge, seed, jobs, deadline)?;
    let code = report_code(&report, generation.timed_out);
    let out = SolveOutput {
        instance: InstanceSummary::of(&instance),
        solution: TreeListing::of(&instance, &report.solution),
        generation: Some(generation),
        merge: report,
    };
    Ok(Outcome {
        stdout: output::render(&out, output.format, output.timings)?,
        code,
    })
}

fn generate(
    path: &Path,
    generator: &GeneratorArgs,
    target: Option<&Path>,
    seed: u64,
    jobs: usize,
    time_limit: Option<f64>,
) -> Result<Outcome> {
    let deadline = deadline(time_limit)?;
    let cfg = generator_config(generator, seed)?;
    let instance = load_instance(path)?;
    let generated = generate_with_jobs(&instance, &cfg, deadline, jobs)?;
    let text = write_pool(&instance, &generated.pool);
    let code = if generated.timed_out { exit::TIMEOUT } else { exit::OK };
    match target {
        Some(p) => {
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
            Ok(Outcome {
                stdout: String::new(),
                code,
            })
        }
        None => Ok(Outcome { stdout: text, code }),
    }
}

fn merge_pool(
    path: &Path,
    pool_path: &Path,
    merge: &MergeArgs,
    output: &OutputArgs,
    seed: u64,
    time_limit: Option<f64>,
) -> Result<Outcome> {
    let mcfg = merge_config(merge, seed, deadline(time_limit)?)?;
    let instance = load_instance(path)?;
    let text = std::fs::read_to_string(pool_path).with_context(|| format!("reading {}", pool_path.display()))?;
    let pool: SolutionPool = read_pool(&instance, &text).with_context(|| format!("parsing {}", pool_path.display()))?;
    let report = run_smh(&instance, &pool, &mcfg)?;
    let code = report_code(&report, false);
    let out = SolveOutput {
        instance: InstanceSummary::of(&instance),
        solution: TreeListing::of(&instance, &report.solution),
        generation: None,
        merge: report,
    };
    Ok(Outcome {
        stdout: output::render(&out, output.format, output.timings)?,
        code,
    })
}

#[derive(Serialize)]
struct OracleOutput {
    instance: InstanceSummary,
    solution: TreeListing,
    seconds: f64,
}

fn oracle(path: &Path, cap: usize, output: &OutputArgs) -> Result<Outcome> {
    let instance = load_instance(path)?;
    let start = Instant::now();
    let solution = dreyfus_wagner(&instance, cap).map_err(|e| UsageError(e.to_string()))?;
    let out = OracleOutput {
        instance: InstanceSummary::of(&instance),
        solution: TreeListing::of(&instance, &solution),
        seconds: start.elapsed().as_secs_f64(),
    };
    let text = match output.format {
        Format::Json => output::to_json(&out, output.timings)?,
        Format::Csv => format!(
            "instance,terminals,weight\n{},{},{}\n",
            out.instance.name,
            out.instance.terminals,
            solution.weight()
        ),
        Format::Table => {
            let mut s = format!("{}: optimum {}\n", out.instance.name, solution.weight());
            for (u, v, w) in &out.solution.edges {
                s.push_str(&format!("  {u} {v} {w}\n"));
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

#[derive(Serialize)]
struct TdCheck {
    name: &'static str,
    width: usize,
    nodes: usize,
    violations: Vec<String>,
}

fn validate_td(path: &Path, td_path: Option<&Path>, output: &OutputArgs) -> Result<Outcome> {
    let instance = load_instance(path)?;
    let g = instance.graph();
    let mut checks = Vec::new();
    match td_path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let file = parse_td(&text).with_context(|| format!("parsing {}", p.display()))?;
            let mut violations: Vec<String> = validate(g, &file.decomposition).iter().map(|v| v.to_string()).collect();
            if file.num_vertices != g.num_vertices() {
                violations.push(format!(
                    "file declares {} vertices, the graph has {}",
                    file.num_vertices,
                    g.num_vertices()
                ));
            }
            checks.push(TdCheck {
                name: "file",
                width: file.decomposition.width(),
                nodes: file.decomposition.num_nodes(),
                violations,
            });
        }
        None => {
            let td = decomposition_from_order(g, &greedy_degree(g));
            let nice = make_nice(g, &td, instance.terminals()[0]);
            checks.push(TdCheck {
                name: "greedy_degree",
                width: td.width(),
                nodes: td.num_nodes(),
                violations: validate(g, &td).iter().map(|v| v.to_string()).collect(),
            });
            let mut violations: Vec<String> = validate_nice(g, &nice).iter().map(|v| v.to_string()).collect();
            if nice.width() > td.width() + 1 {
                violations.push(format!("nice width {} exceeds {} + 1", nice.width(), td.width()));
            }
            checks.push(TdCheck {
                name: "nice",
                width: nice.width(),
                nodes: nice.nodes().len(),
                violations,
            });
        }
    }
    let valid = checks.iter().all(|c| c.violations.is_empty());
    let text = match output.format {
        Format::Json => output::to_json(&checks, true)?,
        Format::Csv => {
            let mut s = String::from("decomposition,width,nodes,violations\n");
            for c in &checks {
                s.push_str(&format!("{},{},{},{}\n", c.name, c.width, c.nodes, c.violations.len()));
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            for c in &checks {
                let verdict = if c.violations.is_empty() { "valid" } else { "INVALID" };
                s.push_str(&format!(
                    "{:<14} width {:>3}, {:>6} nodes: {verdict}\n",
                    c.name, c.width, c.nodes
                ));
                for v in &c.violations {
                    s.push_str(&format!("  {v}\n"));
                }
            }
            s
        }
    };
    Ok(Outcome {
        stdout: text,
        code: if valid { exit::OK } else { exit::FAILURE },
    })
}

/// `.stp` files of `dir`, sorted by name.
pub fn instance_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("stp")))
        .collect();
    files.sort();
    Ok(files)
}

#[derive(Serialize)]
struct BenchOutput {
    records: Vec<BenchRecord>,
    dropped: Vec<String>,
    aggregate: bench::Aggregate,
}

#[allow(clippy::too_many_arguments)]
fn run_bench(
    dir: &Path,
    best_known: Option<&Path>,
    drop_solved: bool,
    jobs: usize,
    generator: &GeneratorArgs,
    merge: &MergeArgs,
    output: &OutputArgs,
    seed: u64,
    time_limit: Option<f64>,
) -> Result<Outcome> {
    let gcfg = generator_config(generator, seed)?;
    merge_config(merge, seed, None)?;
    deadline(time_limit)?;
    if drop_solved && best_known.is_none() {
        return Err(UsageError("--drop-solved needs --best-known".into()).into());
    }
    let known = best_known.map(bench::read_best_known).transpose()?.unwrap_or_default();
    let files = instance_files(dir)?;

    let one = |path: &PathBuf| -> Result<BenchRecord> {
        let instance = load_instance(path)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let best = known.get(&stem).or_else(|| known.get(instance.name())).copied();
        let Pipeline { generation, report } = pipeline(&instance, &gcfg, merge, seed, 1, deadline(time_limit)?)?;
        let mut record = BenchRecord::new(
            stem,
            instance.terminals().len(),
            instance.graph().num_edges(),
            best,
            generation.best,
            report.weight,
            generation.seconds,
            report.merge_seconds,
            report.trees_used(),
        );
        record.capacity_fallback = report.capacity_fallback;
        record.timed_out = generation.timed_out || report.timed_out;
        Ok(record)
    };
    let results: Vec<Result<BenchRecord>> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .context("starting worker threads")?;
        pool.install(|| files.par_iter().map(one).collect())
    } else {
        files.iter().map(one).collect()
    };
    let mut records = Vec::new();
    let mut dropped = Vec::new();
    for r in results {
        let r = r?;
        if drop_solved && r.solved_by_grasp() {
            dropped.push(r.instance);
        } else {
            records.push(r);
        }
    }

    let text = match output.format {
        Format::Csv => {
            let mut buf = Vec::new();
            bench::write_csv(&records, &mut buf)?;
            String::from_utf8(buf)?
        }
        Format::Json => output::to_json(
            &BenchOutput {
                aggregate: bench::aggregate(&records),
                records,
                dropped,
            },
            true,
        )?,
        Format::Table => {
            let mut s = bench::render_table(&records);
            if !dropped.is_empty() {
                s.push_str(&format!("dropped (already solved by GRASP): {}\n", dropped.join(", ")));
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}
