use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pdsp_core::analysis::load_report;
use pdsp_core::geodesics::{is_geodesic, DistanceOracle};
use pdsp_core::homology::enumerate::CandidateStream;
use pdsp_core::instances::gen::{corpus, gen_grid, gen_spiral, TerminalScheme, WeightScheme};
use pdsp_core::instances::io::{dsp_from_json, dsp_to_json, solution_from_json, solution_to_json};
use pdsp_core::instances::oracle::Limits;
use pdsp_core::instances::{all_ok, check_dsp, make_nice, Check, NiceOutcome};
use pdsp_core::pipeline::{differential, oracle, prepare, solve, Backend, NiceReport, PipelineConfig, Preparation, Verdict};
use pdsp_core::rings::{decompose, reprobe, validate_ring};
use pdsp_core::skeleton::geodesic_steiner_tree;
use pdsp_core::{Dsp, Solution};

#[derive(Parser)]
#[command(name = "pdsp", version, about = "Disjoint shortest paths in planar graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full pipeline on an instance.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Exhaustive search with the same report shape.
    Oracle {
        instance: PathBuf,
        #[command(flatten)]
        caps: Caps,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare solve and oracle on every instance of a directory.
    Differential {
        dir: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Ring decompositions of the nice instances.
    Rings { instance: PathBuf },
    /// Steiner tree, refinement and skeleton shape.
    Skeleton { instance: PathBuf },
    /// Candidate word counts for one crossing bound.
    EnumHomology {
        instance: PathBuf,
        #[arg(long = "L", default_value_t = 4)]
        l: usize,
        #[arg(long, default_value_t = 2_000_000)]
        matching_budget: u64,
        /// Print this many candidates.
        #[arg(long, default_value_t = 0)]
        show: usize,
    },
    /// Handles and loads of a solution.
    Analyze { instance: PathBuf, solution: PathBuf },
    /// Generate instances.
    Gen {
        #[command(subcommand)]
        what: GenCmd,
    },
    /// Validate a solution against an instance.
    Check { instance: PathBuf, solution: PathBuf },
    /// Time solve and oracle across a directory, grouped by k.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    Grid {
        #[arg(long, default_value_t = 3)]
        rows: usize,
        #[arg(long, default_value_t = 3)]
        cols: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Weights::Unit)]
        weights: Weights,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Spiral {
        #[arg(long, default_value_t = 1)]
        turns: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the shipped corpus as `<name>.pdsp.json` files.
    Corpus { out: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Weights {
    Unit,
    W13,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    PathSearch,
    ShiftSearch,
}

#[derive(Args)]
struct Caps {
    #[arg(long, default_value_t = 20_000_000)]
    max_nodes: u64,
    #[arg(long, default_value_t = 2000)]
    max_vertices: usize,
}

impl Caps {
    fn limits(&self) -> Limits {
        Limits { max_vertices: self.max_vertices, max_nodes: self.max_nodes }
    }
}

#[derive(Args)]
struct SolveOpts {
    #[arg(long, value_enum, default_value_t = BackendArg::PathSearch)]
    backend: BackendArg,
    /// Comma-separated increasing crossing bounds.
    #[arg(long = "budget-L", value_delimiter = ',', default_value = "4,8,16")]
    budget_l: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    #[arg(long, default_value_t = 2_000_000)]
    matching_budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record whether the first annotated family's words occur in the stream.
    #[arg(long)]
    witness: bool,
    #[command(flatten)]
    caps: Caps,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an accepted solution as a solution document.
    #[arg(long)]
    solution_out: Option<PathBuf>,
}

impl SolveOpts {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            backend: match self.backend {
                BackendArg::PathSearch => Backend::PathSearch,
                BackendArg::ShiftSearch => Backend::ShiftSearch,
            },
            budgets: self.budget_l.clone(),
            matching_budget: self.matching_budget,
            parallel: self.parallel,
            limits: self.caps.limits(),
            seed: self.seed,
            witness: self.witness,
            ..Default::default()
        }
    }
}

enum Failure {
    Usage(anyhow::Error),
    Internal(anyhow::Error),
}

type Res<T> = Result<T, Failure>;

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn internal<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Internal(e.into())
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)
}

fn load_instance(path: &Path) -> Res<Dsp> {
    dsp_from_json(&read(path)?).with_context(|| format!("parsing {}", path.display())).map_err(usage)
}

fn load_solution(path: &Path) -> Res<Solution> {
    solution_from_json(&read(path)?).with_context(|| format!("parsing {}", path.display())).map_err(usage)
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Res<()> {
    let text = serde_json::to_string_pretty(value).map_err(internal)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())).map_err(usage),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn write_text(text: &str, out: Option<&Path>) -> Res<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())).map_err(usage),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_dir(dir: &Path) -> Res<Vec<(String, Dsp)>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))
        .map_err(usage)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".pdsp.json"))
        .collect();
    files.sort();
    files
        .iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().trim_end_matches(".pdsp.json").to_string();
            Ok((name, load_instance(p)?))
        })
        .collect()
}

#[derive(Serialize)]
struct RingSummary {
    mask: u64,
    x: Vec<usize>,
    y: Vec<usize>,
    mid_size: usize,
    valid: bool,
}

#[derive(Serialize)]
struct RingsReport {
    t_hat: Vec<usize>,
    bound: usize,
    rings: Vec<RingSummary>,
    exhaustive: bool,
}

fn rings_cmd(inst: &Dsp) -> Res<Vec<RingsReport>> {
    let NiceOutcome::Instances(nices) = make_nice(inst).map_err(internal)? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for nice in nices {
        let ni = &nice.inst;
        let oracle = DistanceOracle::new(&ni.graph);
        let tree = geodesic_steiner_tree(ni).map_err(internal)?;
        let decomp = decompose(ni, &oracle, &tree.principal).map_err(internal)?;
        let rest = reprobe(ni, &oracle, &decomp).map_err(internal)?;
        out.push(RingsReport {
            t_hat: decomp.t_hat.clone(),
            bound: (2 * decomp.t_hat.len()).saturating_sub(2),
            rings: decomp
                .rings
                .iter()
                .map(|r| RingSummary {
                    mask: r.mask,
                    x: r.x.clone(),
                    y: r.y.clone(),
                    mid_size: r.mid_size(),
                    valid: validate_ring(&ni.graph, &oracle, &ni.pairs, r),
                })
                .collect(),
            exhaustive: rest.is_empty(),
        });
    }
    Ok(out)
}

#[derive(Serialize)]
struct SkeletonReport {
    steiner_spinal: usize,
    steiner_geodesic: bool,
    transformed_vertices: usize,
    skeleton_spinal: usize,
    bound: usize,
    tour_paths: usize,
    note: String,
}

fn skeleton_cmd(inst: &Dsp) -> Res<Vec<SkeletonReport>> {
    let NiceOutcome::Instances(nices) = make_nice(inst).map_err(internal)? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for nice in nices {
        let mut r = NiceReport::default();
        let tour_paths = match prepare(nice, &mut r).map_err(internal)? {
            Preparation::Ready(p) => p.tour.num_paths,
            Preparation::No(why) => {
                r.note = why;
                0
            }
        };
        out.push(SkeletonReport {
            steiner_spinal: r.steiner_spinal,
            steiner_geodesic: r.steiner_geodesic,
            transformed_vertices: r.transformed_vertices,
            skeleton_spinal: r.skeleton_spinal,
            bound: r.skeleton_bound,
            tour_paths,
            note: r.note,
        });
    }
    Ok(out)
}

#[derive(Serialize)]
struct EnumReport {
    l: usize,
    end: String,
    compositions: u64,
    matchings: u64,
    candidates: usize,
    regular: usize,
    shown: Vec<Vec<String>>,
}

fn enum_cmd(inst: &Dsp, l: usize, budget: u64, show: usize) -> Res<Vec<EnumReport>> {
    let NiceOutcome::Instances(nices) = make_nice(inst).map_err(internal)? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for nice in nices {
        let mut r = NiceReport::default();
        let Preparation::Ready(p) = prepare(nice, &mut r).map_err(internal)? else { continue };
        let mut cands = Vec::new();
        let mut stream = CandidateStream::new(&p.tour, l, 0, budget);
        let end = stream.run(&mut HashSet::new(), |c| {
            cands.push(c.clone());
            true
        });
        out.push(EnumReport {
            l,
            end: format!("{end:?}"),
            compositions: stream.stats.compositions,
            matchings: stream.stats.matchings,
            candidates: cands.len(),
            regular: cands.iter().filter(|c| c.is_regular()).count(),
            shown: cands.iter().take(show).map(|c| c.words.iter().map(|w| w.to_string()).collect()).collect(),
        });
    }
    Ok(out)
}

#[derive(Serialize)]
struct AnalyzeReport {
    checks: Vec<Check>,
    geodesic: Vec<bool>,
    /// Loads of every path on every other path, with greedy pulls.
    loads: Vec<pdsp_core::analysis::LoadReport>,
}

fn analyze_cmd(inst: &Dsp, sol: &Solution) -> Res<AnalyzeReport> {
    let checks = check_dsp(inst, sol);
    if !checks.iter().take(3).all(|c| c.ok) {
        return Err(usage(anyhow!("solution does not match the instance's pairs")));
    }
    let g = &inst.graph;
    let oracle = DistanceOracle::new(g);
    let geodesic = sol.paths.iter().map(|p| is_geodesic(g, &oracle, p) == Ok(true)).collect();
    let terms = inst.terminals();
    let mut loads = Vec::new();
    for (j, q) in sol.paths.iter().enumerate() {
        let others: Vec<Vec<usize>> = sol.paths.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, p)| p.clone()).collect();
        loads.push(load_report(g, &others, q, &terms).map_err(internal)?);
    }
    Ok(AnalyzeReport { checks, geodesic, loads })
}

#[derive(Serialize)]
struct BenchRow {
    k: usize,
    instances: usize,
    solve_seconds: f64,
    oracle_seconds: f64,
    yes: usize,
    max_load: usize,
}

fn bench_cmd(list: &[(String, Dsp)], config: &PipelineConfig) -> Res<Vec<BenchRow>> {
    let mut rows: Vec<BenchRow> = Vec::new();
    for (_, inst) in list {
        let k = inst.k();
        let t = Instant::now();
        let r = solve(inst, config).map_err(internal)?;
        let st = t.elapsed().as_secs_f64();
        let t = Instant::now();
        oracle(inst, config.limits).map_err(internal)?;
        let ot = t.elapsed().as_secs_f64();
        let pos = match rows.iter().position(|row| row.k == k) {
            Some(p) => p,
            None => {
                rows.push(BenchRow { k, instances: 0, solve_seconds: 0.0, oracle_seconds: 0.0, yes: 0, max_load: 0 });
                rows.len() - 1
            }
        };
        let row = &mut rows[pos];
        row.instances += 1;
        row.solve_seconds += st;
        row.oracle_seconds += ot;
        row.yes += usize::from(r.verdict == Verdict::Yes);
        let load = r.nice.iter().flat_map(|n| n.loads.iter().copied()).max().unwrap_or(0);
        row.max_load = row.max_load.max(load);
    }
    rows.sort_by_key(|r| r.k);
    Ok(rows)
}

fn run(cli: Cli) -> Res<()> {
    match cli.cmd {
        Cmd::Solve { instance, opts } => {
            let inst = load_instance(&instance)?;
            let config = opts.config();
            config.validate().map_err(usage)?;
            let report = solve(&inst, &config).map_err(internal)?;
            if let (Some(p), Some(sol)) = (&opts.solution_out, &report.solution) {
                write_text(&solution_to_json(sol), Some(p))?;
            }
            emit(&report, opts.out.as_deref())
        }
        Cmd::Oracle { instance, caps, out } => {
            let inst = load_instance(&instance)?;
            let report = oracle(&inst, caps.limits()).map_err(internal)?;
            emit(&report, out.as_deref())
        }
        Cmd::Differential { dir, opts } => {
            let list = load_dir(&dir)?;
            let config = opts.config();
            config.validate().map_err(usage)?;
            let summary = differential(&list, &config);
            for e in summary.entries.iter().filter(|e| !e.agrees()) {
                let inst = &list.iter().find(|(n, _)| *n == e.name).unwrap().1;
                eprintln!("mismatch on {}: solve {:?} oracle {:?} {:?}", e.name, e.solve, e.oracle, e.error);
                eprint!("{}", dsp_to_json(inst));
            }
            emit(&summary, opts.out.as_deref())?;
            if summary.mismatches > 0 {
                return Err(internal(anyhow!("{} verdict mismatches", summary.mismatches)));
            }
            Ok(())
        }
        Cmd::Rings { instance } => emit(&rings_cmd(&load_instance(&instance)?)?, None),
        Cmd::Skeleton { instance } => emit(&skeleton_cmd(&load_instance(&instance)?)?, None),
        Cmd::EnumHomology { instance, l, matching_budget, show } => {
            if l == 0 {
                return Err(usage(anyhow!("--L must be positive")));
            }
            emit(&enum_cmd(&load_instance(&instance)?, l, matching_budget, show)?, None)
        }
        Cmd::Analyze { instance, solution } => {
            let inst = load_instance(&instance)?;
            let sol = load_solution(&solution)?;
            emit(&analyze_cmd(&inst, &sol)?, None)
        }
        Cmd::Check { instance, solution } => {
            let inst = load_instance(&instance)?;
            let sol = load_solution(&solution)?;
            let checks = check_dsp(&inst, &sol);
            #[derive(Serialize)]
            struct CheckReport {
                ok: bool,
                checks: Vec<Check>,
            }
            emit(&CheckReport { ok: all_ok(&checks), checks }, None)
        }
        Cmd::Gen { what } => match what {
            GenCmd::Grid { rows, cols, k, weights, seed, out } => {
                if rows < 2 || cols < 2 || k == 0 || 2 * k > rows * cols {
                    return Err(usage(anyhow!("need rows, cols >= 2 and 1 <= k <= rows*cols/2")));
                }
                let ws = match weights {
                    Weights::Unit => WeightScheme::Unit,
                    Weights::W13 => WeightScheme::Random { lo: 1, hi: 3 },
                };
                let ts = if k == 1 { TerminalScheme::Corners } else { TerminalScheme::Random { k } };
                write_text(&dsp_to_json(&gen_grid(rows, cols, ws, ts, seed)), out.as_deref())
            }
            GenCmd::Spiral { turns, k, out } => {
                if turns == 0 || !(1..=3).contains(&k) {
                    return Err(usage(anyhow!("need turns >= 1 and 1 <= k <= 3")));
                }
                write_text(&dsp_to_json(&gen_spiral(turns, k)), out.as_deref())
            }
            GenCmd::Corpus { out } => {
                std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display())).map_err(usage)?;
                let list = corpus();
                for (name, inst) in &list {
                    let p = out.join(format!("{name}.pdsp.json"));
                    std::fs::write(&p, dsp_to_json(inst)).with_context(|| format!("writing {}", p.display())).map_err(usage)?;
                }
                eprintln!("wrote {} instances", list.len());
                Ok(())
            }
        },
        Cmd::Bench { dir, opts } => {
            let list = load_dir(&dir)?;
            let config = opts.config();
            config.validate().map_err(usage)?;
            emit(&bench_cmd(&list, &config)?, opts.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(2)
        }
    }
}
