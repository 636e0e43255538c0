use pdsp_core::homology::enumerate::{collect_candidates, crossing_sizes, true_words, StreamEnd, Tour, TourItem};
use pdsp_core::homology::hf::{build_hf_instance, extract_solution, is_hf_solution, reconstruct_compact, solve_hf, FamilyIndex, HfBackend};
use pdsp_core::homology::labelling::{apply_shift, char_word, conforms, is_clean, vertex_path_darts};
use pdsp_core::homology::matching::{brute_force_matchings, is_jumping, is_non_crossing, jumping_matchings};
use pdsp_core::homology::{reduce, Labelling, Shift, Symbol, Word};
use pdsp_core::instances::gen::{corpus, gen_grid, path_instance, TerminalScheme, WeightScheme};
use pdsp_core::instances::oracle::{solve_dsp, Limits};
use pdsp_core::instances::{all_ok, check_dap, make_nice, NiceOutcome};
use pdsp_core::pipeline::{prepare, NiceReport, Preparation};
use pdsp_core::plane::separating_dual_cycle;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sym() -> impl Strategy<Value = Symbol> {
    prop_oneof![1i16..4, -3i16..0]
}

fn word() -> impl Strategy<Value = Word> {
    prop::collection::vec(sym(), 0..8).prop_map(|s| reduce(&s))
}

fn random_word(rng: &mut ChaCha8Rng, k: i16, max: usize) -> Word {
    let len = rng.gen_range(0..=max);
    let s: Vec<Symbol> = (0..len).map(|_| if rng.gen_bool(0.5) { rng.gen_range(1..=k) } else { -rng.gen_range(1..=k) }).collect();
    reduce(&s)
}

#[test]
fn reduce_examples() {
    assert_eq!(reduce(&[1, 2, -2, 3]), Word::from_symbols(&[1, 3]));
    assert!(reduce(&[1, 2, -2, -1]).is_identity());
    assert_eq!(reduce(&[-1, -1]).symbols(), &[-1, -1]);
    assert_eq!(Word::gen(2).inv(), Word::gen(-2));
    assert_eq!(Word::gen(1).mul(&Word::gen(-1)), Word::identity());
    assert_eq!(Word::identity().to_string(), "e");
}

#[test]
fn char_word_along_a_path() {
    let inst = path_instance(3, &[(0, 2)]);
    let g = &inst.graph;
    let darts = vertex_path_darts(g, &[0, 1, 2]).unwrap();
    let l = Labelling::from_paths(g.num_darts(), &[darts.clone()]);
    assert_eq!(char_word(&l, &darts), Word::from_symbols(&[1, 1]));
    assert_eq!(char_word(&l, &[darts[1] ^ 1, darts[0] ^ 1]), Word::from_symbols(&[-1, -1]));
    assert!(char_word(&l, &[darts[0], darts[0] ^ 1]).is_identity());
}

#[test]
fn clean_examples() {
    let inst = path_instance(4, &[(0, 3)]);
    let g = &inst.graph;
    let l = Labelling::from_paths(g.num_darts(), &[vertex_path_darts(g, &[0, 1, 2, 3]).unwrap()]);
    assert!(is_clean(g, &l, 1) && is_clean(g, &l, 2));
    assert!(!is_clean(g, &l, 0) && !is_clean(g, &l, 3));
    let broken = Labelling::from_paths(g.num_darts(), &[vertex_path_darts(g, &[0, 1]).unwrap()]);
    assert!(!is_clean(g, &broken, 1));
}

#[test]
fn matching_examples() {
    assert_eq!(jumping_matchings(&[1, 1, 1, 1]).len(), 2);
    assert_eq!(jumping_matchings(&[1; 6]).len(), 5);
    assert!(jumping_matchings(&[4]).is_empty());
    assert!(jumping_matchings(&[1, 2]).is_empty());
    let mut got = jumping_matchings(&[2, 2, 2]);
    got.sort();
    assert_eq!(got, brute_force_matchings(&[2, 2, 2]));
    assert!(got.iter().all(|m| is_non_crossing(m) && is_jumping(&[2, 2, 2], m)));
    assert_eq!(got, vec![vec![5, 2, 1, 4, 3, 0]]);
}

#[test]
fn candidates_of_a_two_leaf_tour() {
    let tour = Tour { items: vec![TourItem::Term(1), TourItem::Path(0), TourItem::Term(-1), TourItem::Path(1)], num_paths: 1, k: 1 };
    let (cands, end) = collect_candidates(&tour, 2, 1_000_000);
    assert_eq!(end, StreamEnd::Exhausted);
    assert!(cands.iter().all(|c| c.is_regular()));
    assert!(cands.iter().any(|c| c.words[0] == Word::gen(-1)));
    let (_, end) = collect_candidates(&tour, 4, 1);
    assert_eq!(end, StreamEnd::Budget);
}

fn solved_labellings() -> Vec<(String, pdsp_core::Dsp, Labelling)> {
    let mut out = Vec::new();
    for (name, inst) in corpus() {
        if let Some(sol) = solve_dsp(&inst, Limits::default()).unwrap() {
            let paths: Vec<_> = sol.paths.iter().map(|p| vertex_path_darts(&inst.graph, p).unwrap()).collect();
            let l = Labelling::from_paths(inst.graph.num_darts(), &paths);
            out.push((name, inst, l));
        }
    }
    out
}

#[test]
fn solutions_are_clean_and_green() {
    let mut cycles = 0;
    for (name, inst, l) in solved_labellings() {
        let g = &inst.graph;
        let terms = inst.terminals();
        for v in 0..g.n() {
            if !terms.contains(&v) {
                assert!(is_clean(g, &l, v), "{name}: {v}");
            }
        }
        for mask in 1u32..(1 << g.n().min(10)) {
            let side: Vec<bool> = (0..g.n()).map(|v| v < 10 && mask >> v & 1 == 1).collect();
            if terms.iter().any(|&t| side[t]) {
                continue;
            }
            if let Ok(c) = separating_dual_cycle(g, &side) {
                assert!(char_word(&l, &c).is_identity(), "{name}");
                cycles += 1;
            }
        }
    }
    assert!(cycles > 100);
}

#[test]
fn cleanliness_survives_shifts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (name, inst, l) in solved_labellings() {
        let g = &inst.graph;
        let k = inst.k() as i16;
        for _ in 0..20 {
            let psi = Shift((0..g.num_faces()).map(|_| random_word(&mut rng, k, 3)).collect());
            let shifted = apply_shift(g, &l, &psi);
            assert!(shifted.is_symmetric());
            for v in 0..g.n() {
                assert_eq!(is_clean(g, &shifted, v), is_clean(g, &l, v), "{name}");
            }
        }
    }
}

#[test]
fn family_words_reconstruct_and_solve() {
    let mut solved = 0;
    for (name, inst) in corpus().into_iter().take(30) {
        let NiceOutcome::Instances(v) = make_nice(&inst).unwrap() else { continue };
        for ni in v {
            let mut r = NiceReport::default();
            let Preparation::Ready(p) = prepare(ni, &mut r).unwrap() else { continue };
            let dap = p.final_instance();
            let g = &dap.graph;
            let index = FamilyIndex::build(dap, &p.skeleton, Limits::default(), 200_000).unwrap();
            let Some(fam) = index.families.first() else { continue };
            let l = Labelling::from_paths(g.num_darts(), fam);
            let words = true_words(&p.skeleton, &l);
            assert!(crossing_sizes(&p.skeleton, &l).iter().zip(words.iter().step_by(2)).all(|(&c, w)| w.len() <= c));
            let terms = dap.terminals();
            let xi = reconstruct_compact(g, &p.ltree, &terms, &words).unwrap();
            assert_eq!(true_words(&p.skeleton, &xi), words, "{name}");
            let hf = build_hf_instance(dap, &p.skeleton, &p.ltree, &words).unwrap();
            let psi = solve_hf(g, &p.skeleton, &p.ltree, &hf, &words, HfBackend::PathSearch(&index)).unwrap().unwrap();
            assert!(is_hf_solution(g, &hf, &psi));
            let shifted = apply_shift(g, &hf.xi, &psi);
            assert!(conforms(g, &shifted, &dap.ann));
            let sol = extract_solution(g, &dap.pairs, &shifted).unwrap();
            assert!(all_ok(&check_dap(dap, &sol)), "{name}");
            solved += 1;
        }
    }
    assert!(solved > 5);
}

#[test]
fn extraction_of_a_grid_path() {
    let inst = gen_grid(2, 3, WeightScheme::Unit, TerminalScheme::Corners, 0);
    let g = &inst.graph;
    let l = Labelling::from_paths(g.num_darts(), &[vertex_path_darts(g, &[0, 1, 2, 5]).unwrap()]);
    assert_eq!(extract_solution(g, &inst.pairs, &l).unwrap().paths, vec![vec![0, 1, 2, 5]]);
    let empty = Labelling::identity(g.num_darts());
    assert!(extract_solution(g, &inst.pairs, &empty).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]
    #[test]
    fn reduce_is_idempotent(s in prop::collection::vec(sym(), 0..16)) {
        let w = reduce(&s);
        prop_assert_eq!(reduce(w.symbols()), w.clone());
        prop_assert!(w.symbols().windows(2).all(|p| p[0] != -p[1]));
    }

    #[test]
    fn concatenation_is_a_homomorphism(a in prop::collection::vec(sym(), 0..10), b in prop::collection::vec(sym(), 0..10)) {
        let joined: Vec<Symbol> = a.iter().chain(&b).copied().collect();
        prop_assert_eq!(reduce(&joined), reduce(&a).mul(&reduce(&b)));
    }

    #[test]
    fn inverse_is_an_involution(a in word(), b in word()) {
        prop_assert_eq!(a.inv().inv(), a.clone());
        prop_assert!(a.mul(&a.inv()).is_identity());
        prop_assert_eq!(a.mul(&b).inv(), b.inv().mul(&a.inv()));
    }

    #[test]
    fn multiplication_is_associative(a in word(), b in word(), c in word()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn matchings_agree_with_brute_force(blocks in prop::collection::vec(1usize..4, 1..6)) {
        prop_assume!(blocks.iter().sum::<usize>() <= 10);
        let mut got = jumping_matchings(&blocks);
        got.sort();
        prop_assert_eq!(got, brute_force_matchings(&blocks));
    }
}
