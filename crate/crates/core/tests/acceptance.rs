use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use pdsp_core::geodesics::DistanceOracle;
use pdsp_core::homology::labelling::{apply_shift, char_word, is_clean, vertex_path_darts};
use pdsp_core::homology::matching::{brute_force_matchings, jumping_matchings};
use pdsp_core::homology::{reduce, Labelling, Shift, Symbol};
use pdsp_core::instances::gen::{corpus, gen_random_dag};
use pdsp_core::instances::oracle::{solve_dag, solve_dsp, Limits};
use pdsp_core::instances::{make_nice, reduce_dag_to_dsp, NiceOutcome};
use pdsp_core::pipeline::{differential, solve, PipelineConfig, Verdict};
use pdsp_core::plane::separating_dual_cycle;
use pdsp_core::rings::{crossing_count, cut_le, decompose, maximally_pushed_cuts, reprobe, split_sets, validate_dag_cut, validate_ring};
use pdsp_core::skeleton::geodesic_steiner_tree;
use pdsp_core::{Dsp, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nices(inst: &Dsp) -> Vec<Dsp> {
    match make_nice(inst).unwrap() {
        NiceOutcome::Instances(v) => v.into_iter().map(|n| n.inst).collect(),
        NiceOutcome::NoReport => Vec::new(),
    }
}

fn random_symbols(rng: &mut ChaCha8Rng, max: usize) -> Vec<Symbol> {
    let len = rng.gen_range(0..=max);
    (0..len).map(|_| rng.gen_range(1..=3i16) * if rng.gen_bool(0.5) { 1 } else { -1 }).collect()
}

fn oracle_equivalence(c: &[(String, Dsp)]) -> (bool, String) {
    let t = Instant::now();
    let d = differential(c, &PipelineConfig::default());
    let yes = d.entries.iter().filter(|e| e.oracle == Some(Verdict::Yes)).count();
    for e in d.entries.iter().filter(|e| !e.agrees()) {
        eprintln!("mismatch {}: solve {:?} oracle {:?} {:?}", e.name, e.solve, e.oracle, e.error);
    }
    (d.mismatches == 0, format!("{} instances, {} yes, {} mismatches, {:.2}s", d.entries.len(), yes, d.mismatches, t.elapsed().as_secs_f64()))
}

fn ring_bound(c: &[(String, Dsp)]) -> (bool, String) {
    let (mut rings, mut worst, mut bad) = (0, 0, Vec::new());
    for (name, inst) in c {
        for ni in nices(inst) {
            let o = DistanceOracle::new(&ni.graph);
            let tree = geodesic_steiner_tree(&ni).unwrap();
            let d = decompose(&ni, &o, &tree.principal).unwrap();
            rings += d.rings.len();
            worst = worst.max(d.rings.len());
            let ok = d.rings.len() <= 2 * d.t_hat.len() - 2
                && reprobe(&ni, &o, &d).unwrap().is_empty()
                && d.rings.iter().all(|r| validate_ring(&ni.graph, &o, &ni.pairs, r));
            if !ok {
                bad.push(name.clone());
            }
        }
    }
    (bad.is_empty(), format!("{rings} rings, at most {worst} per instance, failures {bad:?}"))
}

fn crossing_law(c: &[(String, Dsp)]) -> (bool, String) {
    let (mut cuts, mut bad) = (0, Vec::new());
    for (name, inst) in c {
        for ni in nices(inst) {
            let Some(sol) = solve_dsp(&ni, Limits::default()).unwrap() else { continue };
            let o = DistanceOracle::new(&ni.graph);
            let tree = geodesic_steiner_tree(&ni).unwrap();
            let d = decompose(&ni, &o, &tree.principal).unwrap();
            for ring in &d.rings {
                let sp = split_sets(&ni.pairs, &ring.x, &ring.y).unwrap();
                for cut in [&ring.gamma1, &ring.gamma2] {
                    cuts += 1;
                    for (p, &(s, t)) in sol.paths.iter().zip(&ni.pairs) {
                        let split = sp.split.iter().any(|&(a, b)| (a, b) == (s, t) || (a, b) == (t, s));
                        let n = crossing_count(p, cut);
                        if (split && n > 1) || (!split && n != 0) {
                            bad.push(name.clone());
                        }
                    }
                }
            }
        }
    }
    (bad.is_empty(), format!("{cuts} cuts against oracle solutions, failures {bad:?}"))
}

fn cut_lattice(c: &[(String, Dsp)]) -> (bool, String) {
    let (mut partitions, mut valid, mut bad) = (0, 0u64, Vec::new());
    for (name, inst) in c {
        for ni in nices(inst) {
            let g = &ni.graph;
            if g.n() > 12 {
                continue;
            }
            let o = DistanceOracle::new(g);
            let terms = ni.terminals();
            for mask in 1..(1u64 << terms.len()) - 1 {
                let x: Vec<usize> = (0..terms.len()).filter(|&i| mask >> i & 1 == 1).map(|i| terms[i]).collect();
                let y: Vec<usize> = (0..terms.len()).filter(|&i| mask >> i & 1 == 0).map(|i| terms[i]).collect();
                let Ok(sp) = split_sets(&ni.pairs, &x, &y) else { continue };
                partitions += 1;
                let pushed = maximally_pushed_cuts(g, &o, &sp, &x, &y);
                for s in 0..(1u32 << g.n()) {
                    let side: Vec<bool> = (0..g.n()).map(|v| s >> v & 1 == 1).collect();
                    if !validate_dag_cut(g, &o, &sp, &side, &x, &y).ok() {
                        continue;
                    }
                    valid += 1;
                    let inside = matches!(&pushed, Ok((lo, hi)) if cut_le(lo, &side) && cut_le(&side, hi));
                    if !inside {
                        bad.push(format!("{name}/{mask}"));
                        break;
                    }
                }
                if let Ok((lo, hi)) = &pushed {
                    if !validate_dag_cut(g, &o, &sp, lo, &x, &y).ok() || !validate_dag_cut(g, &o, &sp, hi, &x, &y).ok() {
                        bad.push(format!("{name}/{mask} extremes"));
                    }
                } else if pushed != Err(Error::NoneExists) {
                    bad.push(format!("{name}/{mask} error"));
                }
            }
        }
    }
    (bad.is_empty(), format!("{partitions} partitions, {valid} valid cuts enumerated, failures {bad:?}"))
}

fn word_algebra() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut fails = 0;
    let n = 10_000;
    for _ in 0..n {
        let a = random_symbols(&mut rng, 12);
        let b = random_symbols(&mut rng, 12);
        let (wa, wb) = (reduce(&a), reduce(&b));
        let joined: Vec<Symbol> = a.iter().chain(&b).copied().collect();
        let ok = reduce(wa.symbols()) == wa
            && reduce(&joined) == wa.mul(&wb)
            && wa.inv().inv() == wa
            && wa.mul(&wa.inv()).is_identity()
            && wa.mul(&wb).inv() == wb.inv().mul(&wa.inv());
        fails += usize::from(!ok);
    }
    (fails == 0, format!("{n} randomized checks, {fails} failures"))
}

fn green_and_clean(c: &[(String, Dsp)]) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut solved, mut cycles, mut shifts, mut bad) = (0, 0, 0, Vec::new());
    for (name, inst) in c {
        let Some(sol) = solve_dsp(inst, Limits::default()).unwrap() else { continue };
        solved += 1;
        let g = &inst.graph;
        let paths: Vec<_> = sol.paths.iter().map(|p| vertex_path_darts(g, p).unwrap()).collect();
        let l = Labelling::from_paths(g.num_darts(), &paths);
        let terms = inst.terminals();
        let inner: Vec<usize> = (0..g.n()).filter(|v| !terms.contains(v)).collect();
        let mut ok = inner.iter().all(|&v| is_clean(g, &l, v));
        for mask in 1u32..(1 << inner.len().min(12)) {
            let mut side = vec![false; g.n()];
            for (j, &v) in inner.iter().take(12).enumerate() {
                side[v] = mask >> j & 1 == 1;
            }
            if let Ok(cyc) = separating_dual_cycle(g, &side) {
                cycles += 1;
                ok &= char_word(&l, &cyc).is_identity();
            }
        }
        for _ in 0..100 {
            let psi = Shift((0..g.num_faces()).map(|_| reduce(&random_symbols(&mut rng, 4))).collect());
            let shifted = apply_shift(g, &l, &psi);
            shifts += 1;
            ok &= inner.iter().all(|&v| is_clean(g, &shifted, v));
        }
        if !ok {
            bad.push(name.clone());
        }
    }
    (bad.is_empty(), format!("{solved} solutions, {cycles} terminal-free cycles, {shifts} shifts, failures {bad:?}"))
}

fn compositions(p: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if p == 0 {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        return;
    }
    if prefix.len() == parts {
        return;
    }
    for first in 1..=p {
        prefix.push(first);
        compositions(p - first, parts, prefix, out);
        prefix.pop();
    }
}

fn matching_layer() -> (bool, String) {
    let (mut divisions, mut fails) = (0, 0);
    for p in 1..=10 {
        let mut all = Vec::new();
        compositions(p, 5, &mut Vec::new(), &mut all);
        for blocks in all {
            divisions += 1;
            let mut got = jumping_matchings(&blocks);
            got.sort();
            fails += usize::from(got != brute_force_matchings(&blocks));
        }
    }
    let catalan = jumping_matchings(&[1; 4]).len() == 2 && jumping_matchings(&[1; 6]).len() == 5;
    (fails == 0 && catalan, format!("{divisions} block divisions with p <= 10, {fails} disagreements, catalan {catalan}"))
}

fn dag_reduction() -> (bool, String) {
    let (mut n, mut yes, mut fails) = (0, 0, 0);
    for seed in 0..40 {
        let dag = gen_random_dag(seed, 10, 1 + (seed as usize % 2));
        let left = solve_dag(&dag, Limits::default()).unwrap().is_some();
        let right = match reduce_dag_to_dsp(&dag).unwrap() {
            None => false,
            Some(r) => solve_dsp(&r.inst, Limits::default()).unwrap().is_some(),
        };
        n += 1;
        yes += usize::from(left);
        fails += usize::from(left != right);
    }
    (fails == 0 && n >= 20, format!("{n} random DAG instances, {yes} solvable, {fails} disagreements"))
}

fn skeleton_shape(c: &[(String, Dsp)]) -> (bool, String) {
    let (mut runs, mut worst, mut bad) = (0, String::new(), Vec::new());
    let mut ratio = 0.0f64;
    for (name, inst) in c {
        let r = solve(inst, &PipelineConfig::default()).unwrap();
        for n in &r.nice {
            if n.skeleton_bound == 0 {
                continue;
            }
            runs += 1;
            let f = n.skeleton_spinal as f64 / n.skeleton_bound as f64;
            if f > ratio {
                ratio = f;
                worst = format!("{}/{} at k={}", n.skeleton_spinal, n.skeleton_bound, n.k);
            }
            if n.skeleton_spinal > n.skeleton_bound || !n.steiner_geodesic {
                bad.push(name.clone());
            }
        }
    }
    (bad.is_empty(), format!("{runs} skeletons, tightest {worst}, failures {bad:?}"))
}

fn witness(c: &[(String, Dsp)]) -> (bool, String) {
    let config = PipelineConfig { witness: true, ..PipelineConfig::default() };
    let mut loads: BTreeMap<usize, (usize, usize, usize)> = BTreeMap::new();
    let (mut checked, mut bad) = (0, Vec::new());
    for (name, inst) in c {
        let r = solve(inst, &config).unwrap();
        if r.verdict != Verdict::Yes {
            continue;
        }
        for n in &r.nice {
            checked += 1;
            if n.witness_found != Some(true) {
                bad.push(name.clone());
            }
            let e = loads.entry(n.k).or_default();
            e.0 += 1;
            e.1 = e.1.max(n.loads.iter().copied().max().unwrap_or(0));
            e.2 += n.loads.iter().sum::<usize>();
        }
    }
    let by_k: Vec<String> = loads.iter().map(|(k, (runs, max, sum))| format!("k={k}: {runs} runs, max load {max}, total {sum}")).collect();
    (bad.is_empty() && checked > 0, format!("{checked} nice instances witnessed; {}; failures {bad:?}", by_k.join("; ")))
}

#[test]
fn acceptance() {
    let c = corpus();
    let results = [
        ("oracle equivalence", oracle_equivalence(&c)),
        ("ring decomposition bound", ring_bound(&c)),
        ("cut crossing law", crossing_law(&c)),
        ("maximal cut lattice", cut_lattice(&c)),
        ("word algebra", word_algebra()),
        ("green and cleanliness", green_and_clean(&c)),
        ("matching enumeration", matching_layer()),
        ("dag reduction equivalence", dag_reduction()),
        ("skeleton shape", skeleton_shape(&c)),
        ("completeness witness", witness(&c)),
    ];
    let mut err = std::io::stderr().lock();
    for (i, (name, (ok, detail))) in results.iter().enumerate() {
        writeln!(err, "criterion {:>2} {}: {} ({detail})", i + 1, if *ok { "PASS" } else { "FAIL" }, name).unwrap();
    }
    let failed: Vec<&str> = results.iter().filter(|(_, (ok, _))| !ok).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
