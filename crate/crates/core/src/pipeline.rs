//! End-to-end solver: nice instances, ring decomposition, refined Steiner
//! tree, dual skeleton, candidate words and homology feasibility.

use std::collections::HashSet;
use std::time::Instant;

use serde::Serialize;

use crate::analysis::dual_load;
use crate::geodesics::{is_geodesic, DistanceOracle};
use crate::homology::enumerate::{euler_tour, true_words, Candidate, CandidateStream, StreamEnd, StreamStats, Tour};
use crate::homology::hf::{build_hf_instance, extract_solution, l_tree, solve_hf, FamilyIndex, HfBackend, LTree};
use crate::homology::{Labelling, Word};
use crate::instances::oracle::{solve_dsp, Limits};
use crate::instances::{all_ok, annotate, check_dap, check_dsp, lift_solution, make_nice, Check, DapInstance, DspInstance, NiceInstance, NiceOutcome, Solution};
use crate::rings::{dag_structure, decompose, split_sets, RingDecomposition};
use crate::skeleton::{dualize_skeleton, geodesic_steiner_tree, refine, ring_linkage, DartMap, RefineStats, Skeleton, SteinerTree, Transformed};
use crate::{Error, Result, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Backend {
    PathSearch,
    ShiftSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub backend: Backend,
    /// Increasing bounds on the crossings recorded per oriented spinal path.
    pub budgets: Vec<usize>,
    /// Matchings examined per bound before giving up.
    pub matching_budget: u64,
    pub parallel: usize,
    #[serde(skip)]
    pub limits: Limits,
    /// Largest number of annotated families indexed by the path search.
    pub family_cap: usize,
    pub shift_max_len: usize,
    pub shift_nodes: u64,
    pub seed: u64,
    /// Also search the stream for the words of the first annotated family.
    pub witness: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            backend: Backend::PathSearch,
            budgets: vec![4, 8, 16],
            matching_budget: 2_000_000,
            parallel: 1,
            limits: Limits::default(),
            family_cap: 200_000,
            shift_max_len: 4,
            shift_nodes: 2_000_000,
            seed: 0,
            witness: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budgets.is_empty() || self.budgets.windows(2).any(|w| w[0] >= w[1]) || self.budgets[0] == 0 {
            return Err(Error::Invalid("budgets must be positive and strictly increasing".into()));
        }
        if self.parallel == 0 {
            return Err(Error::Invalid("parallelism must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Yes,
    No,
    BudgetExhausted,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LevelStats {
    pub l: usize,
    pub end: Option<StreamEnd>,
    pub stats: StreamStats,
}

/// Shape and search record of one nice instance.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct NiceReport {
    pub k: usize,
    pub vertices: usize,
    pub t_hat: usize,
    pub rings: usize,
    pub ring_masks: Vec<u64>,
    pub steiner_spinal: usize,
    pub steiner_geodesic: bool,
    pub refine: RefineStats,
    pub transformed_vertices: usize,
    pub skeleton_spinal: usize,
    pub skeleton_bound: usize,
    pub families: Option<usize>,
    pub levels: Vec<LevelStats>,
    pub accepted_l: Option<usize>,
    pub accepted_words: Option<Vec<Word>>,
    /// Whether the first family's words occur in the stream at the accepted bound.
    pub witness_found: Option<bool>,
    /// Crossings of the returned family with each skeleton spinal path.
    pub loads: Vec<usize>,
    pub verdict: Option<Verdict>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub verdict: Verdict,
    pub solution: Option<Solution>,
    pub reason: String,
    pub timings: Vec<(String, f64)>,
    pub nice: Vec<NiceReport>,
    pub checks: Vec<Check>,
    pub seed: u64,
}

/// All stages up to the candidate search for one nice instance.
pub struct Prepared<W> {
    pub nice: NiceInstance<W>,
    pub tree: SteinerTree,
    pub decomp: RingDecomposition,
    pub refined: Transformed<W>,
    pub refined_tree: SteinerTree,
    pub stats: RefineStats,
    pub dual: Transformed<W>,
    pub skeleton: Skeleton,
    pub dart_map: DartMap,
    pub tour: Tour,
    pub ltree: LTree,
}

pub enum Preparation<W> {
    Ready(Box<Prepared<W>>),
    /// The instance was found to have no solution on the way.
    No(String),
}

impl<W: Weight> Prepared<W> {
    pub fn final_instance(&self) -> &DapInstance<W> {
        &self.dual.dap
    }

    /// Maps a solution of the final instance to the nice instance.
    pub fn to_nice(&self, sol: &Solution) -> Solution {
        let paths = sol
            .paths
            .iter()
            .map(|p| {
                let mid: Vec<usize> = self.dual.project(p);
                self.refined.project(&mid)
            })
            .collect();
        Solution { paths }
    }
}

/// Steiner tree, ring decomposition with linkages, refinement and skeleton.
pub fn prepare<W: Weight>(nice: NiceInstance<W>, report: &mut NiceReport) -> Result<Preparation<W>> {
    let inst = &nice.inst;
    let g = &inst.graph;
    report.k = inst.k();
    report.vertices = g.n();
    let oracle = DistanceOracle::new(g);
    let tree = geodesic_steiner_tree(inst)?;
    report.steiner_spinal = tree.spinal.len();
    report.steiner_geodesic = tree.spinal_vertices(g).iter().all(|p| is_geodesic(g, &oracle, p) == Ok(true));
    let t_hat = tree.principal.clone();
    report.t_hat = t_hat.len();
    let decomp = decompose(inst, &oracle, &t_hat)?;
    report.rings = decomp.rings.len();
    report.ring_masks = decomp.rings.iter().map(|r| r.mask).collect();
    let mut links = Vec::new();
    for ring in &decomp.rings {
        let st = dag_structure(g, &oracle, &inst.pairs, ring)?;
        let demand = split_sets(&inst.pairs, &ring.x, &ring.y)?.split.len();
        match ring_linkage(g, &st, demand) {
            Some(paths) => links.push(paths.into_iter().next().ok_or(Error::Invalid("empty linkage".into()))?),
            None => return Ok(Preparation::No(format!("ring {} has no linkage of size {demand}", ring.mask))),
        }
    }
    let dap = annotate(inst)?;
    let (refined, refined_tree, stats) = refine(inst, &dap.ann, &tree, &decomp, &links)?;
    report.refine = stats.clone();
    report.transformed_vertices = refined.dap.graph.n();
    let (dual, skeleton, dart_map) = dualize_skeleton(&refined.dap, &refined_tree)?;
    report.skeleton_spinal = skeleton.spinal.len();
    report.skeleton_bound = (4 * inst.k()).saturating_sub(3);
    let terms = dual.dap.terminals();
    let tour = euler_tour(&dual.dap.graph, &skeleton, &terms)?;
    let ltree = l_tree(&dual.dap.graph, &skeleton, &terms)?;
    Ok(Preparation::Ready(Box::new(Prepared {
        nice,
        tree,
        decomp,
        refined,
        refined_tree,
        stats,
        dual,
        skeleton,
        dart_map,
        tour,
        ltree,
    })))
}

enum Search {
    Found(Solution, usize, Vec<Word>),
    No(String),
    Budget(String),
}

fn try_candidate<W: Weight>(p: &Prepared<W>, backend: HfBackend, words: &[Word]) -> Result<Option<Solution>> {
    let dap = p.final_instance();
    let g = &dap.graph;
    let inst = match build_hf_instance(dap, &p.skeleton, &p.ltree, words) {
        Ok(i) => i,
        Err(Error::NoCompatible) => return Ok(None),
        Err(e) => return Err(e),
    };
    let psi = match solve_hf(g, &p.skeleton, &p.ltree, &inst, words, backend) {
        Ok(Some(psi)) => psi,
        Ok(None) | Err(Error::LimitExceeded) => return Ok(None),
        Err(e) => return Err(e),
    };
    let shifted = crate::homology::labelling::apply_shift(g, &inst.xi, &psi);
    let sol = extract_solution(g, &dap.pairs, &shifted)?;
    if !all_ok(&check_dap(dap, &sol)) {
        return Err(Error::Invalid("extracted paths fail validation".into()));
    }
    Ok(Some(sol))
}

fn run_levels<W: Weight>(
    p: &Prepared<W>,
    config: &PipelineConfig,
    backend: HfBackend,
    report: &mut NiceReport,
) -> Result<Option<(Solution, usize, Vec<Word>)>> {
    let mut seen: HashSet<Vec<Word>> = HashSet::new();
    let mut l_prev = 0;
    for &l in &config.budgets {
        let mut stream = CandidateStream::new(&p.tour, l, l_prev, config.matching_budget);
        let mut found = None;
        let mut failure = None;
        let mut batch: Vec<Candidate> = Vec::new();
        let flush = |batch: &mut Vec<Candidate>, found: &mut Option<(Solution, Vec<Word>)>, failure: &mut Option<Error>| {
            let results: Vec<Result<Option<Solution>>> = if config.parallel > 1 && batch.len() > 1 {
                let chunk = batch.len().div_ceil(config.parallel);
                std::thread::scope(|s| {
                    let handles: Vec<_> = batch
                        .chunks(chunk)
                        .map(|c| s.spawn(move || c.iter().map(|cand| try_candidate(p, backend, &cand.words)).collect::<Vec<_>>()))
                        .collect();
                    handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
                })
            } else {
                batch.iter().map(|c| try_candidate(p, backend, &c.words)).collect()
            };
            for (c, r) in batch.iter().zip(results) {
                match r {
                    Ok(Some(sol)) => {
                        *found = Some((sol, c.words.clone()));
                        break;
                    }
                    Ok(None) => {}
                    Err(e) => {
                        *failure = Some(e);
                        break;
                    }
                }
            }
            batch.clear();
            found.is_none() && failure.is_none()
        };
        let batch_size = if config.parallel > 1 { 16 * config.parallel } else { 1 };
        let end = stream.run(&mut seen, |c| {
            if let HfBackend::PathSearch(index) = backend {
                if !index.by_words.contains_key(&c.words) {
                    return true;
                }
            }
            batch.push(c.clone());
            batch.len() < batch_size || flush(&mut batch, &mut found, &mut failure)
        });
        if found.is_none() && failure.is_none() && !batch.is_empty() {
            flush(&mut batch, &mut found, &mut failure);
        }
        report.levels.push(LevelStats { l, end: Some(end), stats: stream.stats.clone() });
        if let Some(e) = failure {
            return Err(e);
        }
        if let Some((sol, words)) = found {
            return Ok(Some((sol, l, words)));
        }
        l_prev = l;
    }
    Ok(None)
}

fn witness<W: Weight>(p: &Prepared<W>, index: &FamilyIndex, l: usize, budget: u64) -> bool {
    let g = &p.final_instance().graph;
    let target = true_words(&p.skeleton, &index.labelling(g.num_darts(), 0));
    let mut seen = HashSet::new();
    let mut stream = CandidateStream::new(&p.tour, l, 0, budget);
    stream.run(&mut seen, |c| c.words != target);
    seen.contains(&target)
}

fn search<W: Weight>(p: &Prepared<W>, config: &PipelineConfig, report: &mut NiceReport) -> Result<Search> {
    let dap = p.final_instance();
    match config.backend {
        Backend::PathSearch => {
            let index = match FamilyIndex::build(dap, &p.skeleton, config.limits, config.family_cap) {
                Ok(i) => i,
                Err(Error::LimitExceeded) => return Ok(Search::Budget("family index over its cap".into())),
                Err(e) => return Err(e),
            };
            report.families = Some(index.families.len());
            if index.families.is_empty() {
                return Ok(Search::No("no annotated path family".into()));
            }
            let found = run_levels(p, config, HfBackend::PathSearch(&index), report)?;
            match found {
                Some((sol, l, words)) => {
                    if config.witness {
                        report.witness_found = Some(witness(p, &index, l, config.matching_budget));
                    }
                    Ok(Search::Found(sol, l, words))
                }
                None => Ok(Search::Budget("no candidate matched within budget".into())),
            }
        }
        Backend::ShiftSearch => {
            let backend = HfBackend::ShiftSearch { max_len: config.shift_max_len, nodes: config.shift_nodes };
            match run_levels(p, config, backend, report)? {
                Some((sol, l, words)) => Ok(Search::Found(sol, l, words)),
                None => Ok(Search::Budget("shift search found no feasible candidate".into())),
            }
        }
    }
}

/// Runs the whole pipeline on one instance.
pub fn solve<W: Weight>(inst: &DspInstance<W>, config: &PipelineConfig) -> Result<RunReport> {
    config.validate()?;
    let mut timings = Vec::new();
    let t0 = Instant::now();
    let outcome = make_nice(inst)?;
    timings.push(("make-nice".to_string(), t0.elapsed().as_secs_f64()));
    let nices = match outcome {
        NiceOutcome::NoReport => {
            return Ok(RunReport {
                verdict: Verdict::No,
                solution: None,
                reason: "reduction to nice instances reported no solution".into(),
                timings,
                nice: Vec::new(),
                checks: Vec::new(),
                seed: config.seed,
            })
        }
        NiceOutcome::Instances(v) => v,
    };
    let k = inst.k();
    let mut paths = vec![Vec::new(); k];
    let mut reports = Vec::new();
    let mut verdict = Verdict::Yes;
    let mut reason = String::new();
    for nice in nices {
        let mut report = NiceReport::default();
        let t = Instant::now();
        let prep = prepare(nice, &mut report)?;
        timings.push(("prepare".to_string(), t.elapsed().as_secs_f64()));
        let p = match prep {
            Preparation::No(why) => {
                report.verdict = Some(Verdict::No);
                report.note = why.clone();
                reports.push(report);
                verdict = Verdict::No;
                reason = why;
                break;
            }
            Preparation::Ready(p) => p,
        };
        let t = Instant::now();
        let result = search(&p, config, &mut report)?;
        timings.push(("search".to_string(), t.elapsed().as_secs_f64()));
        match result {
            Search::Found(sol, l, words) => {
                report.accepted_l = Some(l);
                report.accepted_words = Some(words);
                let lab = Labelling::from_paths(
                    p.final_instance().graph.num_darts(),
                    &sol.paths
                        .iter()
                        .map(|path| crate::homology::labelling::vertex_path_darts(&p.final_instance().graph, path))
                        .collect::<Result<Vec<_>>>()?,
                );
                report.loads = dual_load(&p.skeleton, &lab);
                report.verdict = Some(Verdict::Yes);
                let nice_sol = p.to_nice(&sol);
                lift_solution(&p.nice, &nice_sol, k, &mut paths);
                reports.push(report);
            }
            Search::No(why) => {
                report.verdict = Some(Verdict::No);
                report.note = why.clone();
                reports.push(report);
                verdict = Verdict::No;
                reason = why;
                break;
            }
            Search::Budget(why) => {
                report.verdict = Some(Verdict::BudgetExhausted);
                report.note = why.clone();
                reports.push(report);
                if verdict == Verdict::Yes {
                    verdict = Verdict::BudgetExhausted;
                    reason = why;
                }
            }
        }
    }
    timings.push(("total".to_string(), t0.elapsed().as_secs_f64()));
    if verdict != Verdict::Yes {
        return Ok(RunReport { verdict, solution: None, reason, timings, nice: reports, checks: Vec::new(), seed: config.seed });
    }
    let sol = Solution { paths };
    let checks = check_dsp(inst, &sol);
    if !all_ok(&checks) {
        return Err(Error::Invalid("lifted solution fails validation".into()));
    }
    Ok(RunReport { verdict, solution: Some(sol), reason: "validated solution".into(), timings, nice: reports, checks, seed: config.seed })
}

/// Brute-force verdict with the same report shape.
pub fn oracle<W: Weight>(inst: &DspInstance<W>, limits: Limits) -> Result<RunReport> {
    let t0 = Instant::now();
    let found = solve_dsp(inst, limits)?;
    let timings = vec![("oracle".to_string(), t0.elapsed().as_secs_f64())];
    Ok(match found {
        Some(sol) => {
            let checks = check_dsp(inst, &sol);
            if !all_ok(&checks) {
                return Err(Error::Invalid("oracle solution fails validation".into()));
            }
            RunReport { verdict: Verdict::Yes, solution: Some(sol), reason: "exhaustive search".into(), timings, nice: Vec::new(), checks, seed: 0 }
        }
        None => RunReport { verdict: Verdict::No, solution: None, reason: "exhaustive search".into(), timings, nice: Vec::new(), checks: Vec::new(), seed: 0 },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffEntry {
    pub name: String,
    pub solve: Option<Verdict>,
    pub oracle: Option<Verdict>,
    pub error: Option<String>,
    pub seconds: f64,
}

impl DiffEntry {
    pub fn agrees(&self) -> bool {
        self.error.is_none() && self.solve.is_some() && self.solve == self.oracle
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DiffSummary {
    pub entries: Vec<DiffEntry>,
    pub mismatches: usize,
}

/// Runs the pipeline and the oracle side by side.
pub fn differential<W: Weight>(corpus: &[(String, DspInstance<W>)], config: &PipelineConfig) -> DiffSummary {
    let mut out = DiffSummary::default();
    for (name, inst) in corpus {
        let t = Instant::now();
        let s = solve(inst, config);
        let o = oracle(inst, config.limits);
        let error = match (&s, &o) {
            (Err(e), _) => Some(format!("solve: {e}")),
            (_, Err(e)) => Some(format!("oracle: {e}")),
            _ => None,
        };
        let entry = DiffEntry {
            name: name.clone(),
            solve: s.ok().map(|r| r.verdict),
            oracle: o.ok().map(|r| r.verdict),
            error,
            seconds: t.elapsed().as_secs_f64(),
        };
        if !entry.agrees() {
            out.mismatches += 1;
        }
        out.entries.push(entry);
    }
    out
}
