//! Acceptance suite: one test per criterion, each printing a pass line with
//! the covered counts and elapsed time (run with `--nocapture` to see them).
//! Tolerances are exact and the sweeps demand zero discrepancies.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use inqkit_core::bisim::{compute_layers, distinguishing_play, equiv, verify_transcript, Depth};
use inqkit_core::charform::Synthesizer;
use inqkit_core::epistemic::{k_rich_report, simple_report, threshold_equiv};
use inqkit_core::fixtures;
use inqkit_core::fo::{fo_eval, free_var, Element, FOEvaluator, TranslationMode};
use inqkit_core::formula::{parse, Formula, Node};
use inqkit_core::gen::{random_formula, random_kripke_formula, random_model, random_s5_model, Rng};
use inqkit_core::model::Point;
use inqkit_core::relational::decode_structure;
use inqkit_core::semantics::{kripke_truth, supports, truth, Evaluator};
use inqkit_core::transforms::{
    rich_cover, simplify, stratified_report, stratified_restriction, stratify, StratifyDepth,
    StratifyPolicy,
};
use inqkit_core::{decode_relational, encode_relational, EncodeMode, Pointed, WorldSet};

fn pass(id: usize, what: &str, detail: String, t0: Instant) {
    println!(
        "criterion {id:2} [{what}]: PASS ({detail}, {:.2?})",
        t0.elapsed()
    );
}

#[test]
fn criterion_01_worked_example_fidelity() {
    let t0 = Instant::now();
    let m = fixtures::knows_p_wonders_q();
    let w_pq = m.world_index("w_pq").unwrap();
    let w_npq = m.world_index("w_p'q").unwrap();
    assert!(truth(&m, w_pq, &parse("[+a]?q").unwrap()).unwrap());
    assert!(!truth(&m, w_pq, &parse("[a]?q").unwrap()).unwrap());
    assert!(truth(&m, w_npq, &parse("![a]?q & ![+a]?q").unwrap()).unwrap());
    assert!(t0.elapsed() < Duration::from_secs(1));
    pass(1, "worked example fidelity", "3 truths checked".into(), t0);
}

#[test]
fn criterion_02_neighbourhood_contrast() {
    let t0 = Instant::now();
    let (m1, m2) = fixtures::issue_granularity_pair();
    let v1 = m1.world_index("v").unwrap();
    let v2 = m2.world_index("v").unwrap();
    let f = parse("[+x]?p").unwrap();
    assert!(truth(&m1, v1, &f).unwrap());
    assert!(!truth(&m2, v2, &f).unwrap());
    let p1 = Pointed::world(&m1, v1);
    let p2 = Pointed::world(&m2, v2);
    assert!(!equiv(p1, p2, Depth::Bounded(1)));
    let transcript = distinguishing_play(p1, p2, 1).expect("one round separates them");
    verify_transcript(p1, p2, &transcript).expect("transcript replays");
    assert!(t0.elapsed() < Duration::from_secs(1));
    pass(
        2,
        "neighbourhood contrast",
        "truth gap + 1-round transcript replayed".into(),
        t0,
    );
}

#[test]
fn criterion_03_ef_theorem_at_desk_scale() {
    let t0 = Instant::now();
    let mut rng = Rng::new(0xE0F1);
    let mut pairs = 0usize;
    let mut world_checks = 0usize;
    let mut state_checks = 0usize;
    while pairs < 200 {
        // Both models share one atom signature, as the theorem presumes.
        let (nw, na) = (1 + rng.below(4), 1 + rng.below(2));
        let m = random_model(&mut rng, nw, na, 1);
        let nw2 = 1 + rng.below(4);
        let m2 = random_model(&mut rng, nw2, na, 1);
        let rel = compute_layers(&m, &m2, Depth::Bounded(2));
        let mut synth = Synthesizer::new(&m);
        for n in 0..=2usize {
            // Property (1): truth of the world formula is n-bisimilarity.
            for w in 0..m.world_count() {
                let chi = synth.chi_world(w, n).unwrap();
                assert!(chi.modal_depth() <= n);
                let mut ev = Evaluator::new(&m2, &chi).unwrap();
                for w2 in 0..m2.world_count() {
                    assert_eq!(
                        ev.truth(w2).unwrap(),
                        rel.related(n, w, w2),
                        "property (1) fails: n={n} w={w} w2={w2}\n{m:?}\n{m2:?}"
                    );
                    world_checks += 1;
                }
            }
            // State formulae are flat on every tested model.
            let chi_top = synth.chi_state(m.all_worlds(), n).unwrap();
            assert!(inqkit_core::semantics::is_truth_conditional(&m2, &chi_top).unwrap());
            // Property (2): support of the state formula is n-bisimilarity
            // to some subset.
            for s in m.all_worlds().subsets() {
                let chi = synth.chi_state(s, n).unwrap();
                let mut ev = Evaluator::new(&m2, &chi).unwrap();
                for s2 in m2.all_worlds().subsets() {
                    let oracle = s.subsets().any(|t| rel.lifted(n, t, s2));
                    assert_eq!(
                        ev.supports(s2).unwrap(),
                        oracle,
                        "property (2) fails: n={n} s={s:?} s2={s2:?}\n{m:?}\n{m2:?}"
                    );
                    state_checks += 1;
                }
            }
            // Property (3): support of a family formula is n-bisimilarity to
            // some member.
            for w in 0..m.world_count() {
                let fam = m.state_map(0, w).clone();
                let chi = synth.chi_inqstate(&fam, n).unwrap();
                let mut ev = Evaluator::new(&m2, &chi).unwrap();
                let members = fam.members();
                for s2 in m2.all_worlds().subsets() {
                    let oracle = members.iter().any(|&t| rel.lifted(n, t, s2));
                    assert_eq!(
                        ev.supports(s2).unwrap(),
                        oracle,
                        "property (3) fails: n={n} w={w} s2={s2:?}\n{m:?}\n{m2:?}"
                    );
                    state_checks += 1;
                }
            }
        }
        pairs += 1;
    }
    assert!(t0.elapsed() < Duration::from_secs(300));
    pass(
        3,
        "EF theorem at desk scale",
        format!("{pairs} model pairs, {world_checks} world + {state_checks} state checks, 0 discrepancies"),
        t0,
    );
}

#[test]
fn criterion_04_semantics_invariance() {
    let t0 = Instant::now();
    let mut rng = Rng::new(0x5EED);
    let mut triples = 0usize;
    // Engineered route: the product double of a model is fully bisimilar to
    // it world by world (certified by the fixpoint, never assumed).
    while triples < 300 {
        let (nw, na) = (1 + rng.below(4), 1 + rng.below(2));
        let m = random_model(&mut rng, nw, na, 1);
        let cover = rich_cover(&m, 2).unwrap();
        let m2 = &cover.target;
        let rel = compute_layers(&m, m2, Depth::Full);
        let n_worlds = m.world_count();
        for _ in 0..4 {
            let w = rng.below(n_worlds);
            let w2 = w + n_worlds * rng.below(2);
            assert!(rel.fixpoint()[w].contains(w2), "product certification");
            let f = random_formula(&mut rng, 2, m.atoms(), m.agents());
            assert_eq!(
                truth(&m, w, &f).unwrap(),
                truth(m2, w2, &f).unwrap(),
                "world invariance fails for {f}\n{m:?}"
            );
            triples += 1;
            let s = rng.subset(m.all_worlds());
            let s2: WorldSet = s.iter().flat_map(|u| [u, u + n_worlds]).collect();
            assert!(rel.lifted(rel.depth_computed(), s, s2));
            let g = random_formula(&mut rng, 2, m.atoms(), m.agents());
            assert_eq!(
                supports(&m, s, &g).unwrap(),
                supports(m2, s2, &g).unwrap(),
                "state invariance fails for {g}\n{m:?}"
            );
            triples += 1;
        }
    }
    // Harvested route: random pairs that happen to be n-bisimilar, checked
    // against formulae of depth at most n.
    let mut harvested = 0usize;
    while harvested < 200 {
        let nw = 1 + rng.below(3);
        let m = random_model(&mut rng, nw, 1, 1);
        let nw2 = 1 + rng.below(3);
        let m2 = random_model(&mut rng, nw2, 1, 1);
        let rel = compute_layers(&m, &m2, Depth::Bounded(2));
        for n in 0..=2usize {
            for w in 0..m.world_count() {
                for w2 in rel.at(n)[w].iter() {
                    let f = random_formula(&mut rng, n, m.atoms(), m.agents());
                    assert!(f.modal_depth() <= n);
                    assert_eq!(
                        truth(&m, w, &f).unwrap(),
                        truth(&m2, w2, &f).unwrap(),
                        "harvested invariance fails: n={n} {f}\n{m:?}\n{m2:?}"
                    );
                    harvested += 1;
                }
            }
        }
    }
    triples += harvested;
    assert!(triples >= 500);
    pass(
        4,
        "semantics invariance",
        format!("{triples} bisimilar triples, 0 discrepancies"),
        t0,
    );
}

#[test]
fn criterion_05_persistency_and_ex_falso() {
    let t0 = Instant::now();
    let mut rng = Rng::new(0xD0);
    let mut checks = 0usize;
    while checks < 1000 {
        let (nw, np, na) = (1 + rng.below(4), 1 + rng.below(2), 1 + rng.below(2));
        let m = random_model(&mut rng, nw, np, na);
        let f = random_formula(&mut rng, 2, m.atoms(), m.agents());
        let mut ev = Evaluator::new(&m, &f).unwrap();
        assert!(
            ev.supports(WorldSet::EMPTY).unwrap(),
            "ex falso fails for {f}"
        );
        let s = rng.subset(m.all_worlds());
        let t = rng.subset(s);
        if ev.supports(s).unwrap() {
            assert!(
                ev.supports(t).unwrap(),
                "persistency fails: {f} at {s:?} ⊇ {t:?}\n{m:?}"
            );
        }
        checks += 1;
    }
    pass(
        5,
        "persistency + ex falso",
        format!("{checks} random (M,s,t,φ), 0 discrepancies"),
        t0,
    );
}

#[test]
fn criterion_06_kripke_agreement() {
    let t0 = Instant::now();
    let mut rng = Rng::new(0xCA);
    let mut checks = 0usize;
    while checks < 500 {
        let (nw, np, na) = (1 + rng.below(4), 1 + rng.below(2), 1 + rng.below(2));
        let m = random_model(&mut rng, nw, np, na);
        let k = m.kripke_reduct();
        let f = random_kripke_formula(&mut rng, 2, m.atoms(), m.agents());
        for w in 0..m.world_count() {
            assert_eq!(
                truth(&m, w, &f).unwrap(),
                kripke_truth(&k, w, &f).unwrap(),
                "Kripke agreement fails for {f} at {w}\n{m:?}"
            );
        }
        checks += 1;
    }
    pass(
        6,
        "Kripke agreement",
        format!("{checks} ⫾/⊞-free formulae, all worlds, 0 discrepancies"),
        t0,
    );
}

fn has_box(f: &Formula) -> bool {
    match f.node() {
        Node::Atom(_) | Node::Bottom => false,
        Node::And(a, b) | Node::Implies(a, b) | Node::Idisj(a, b) => has_box(a) || has_box(b),
        Node::Box(_, _) => true,
        Node::BoxPlus(_, g) => has_box(g),
    }
}

#[test]
fn criterion_07_standard_translation_correspondence() {
    let t0 = Instant::now();
    let mut rng = Rng::new(0x57);
    let mut formulas = 0usize;
    let mut box_free = 0usize;
    while formulas < 200 {
        let (nw, np) = (1 + rng.below(4), 1 + rng.below(2));
        let m = random_model(&mut rng, nw, np, 1);
        let f = random_formula(&mut rng, 2, m.atoms(), m.agents());
        let lf = encode_relational(&m, EncodeMode::LocallyFull, None).unwrap();
        let st = lf.as_structure();
        let trw = inqkit_core::fo::standard_translate(&f, TranslationMode::World);
        let mut evw = FOEvaluator::new(st, &trw);
        let wv = free_var(TranslationMode::World);
        for w in 0..m.world_count() {
            assert_eq!(
                evw.eval_with(&[(wv, Element::World(w))]).unwrap(),
                truth(&m, w, &f).unwrap(),
                "ST_w diverges for {f} at {w}\n{m:?}"
            );
        }
        let trs = inqkit_core::fo::standard_translate(&f, TranslationMode::State);
        let mut evs = FOEvaluator::new(st, &trs);
        let sv = free_var(TranslationMode::State);
        for (i, &ext) in st.states.iter().enumerate() {
            assert_eq!(
                evs.eval_with(&[(sv, Element::State(i))]).unwrap(),
                supports(&m, ext, &f).unwrap(),
                "ST_s diverges for {f} at state {i}\n{m:?}"
            );
        }
        // □-free formulae additionally correspond on the minimal encoding.
        if !has_box(&f) {
            let min = encode_relational(&m, EncodeMode::Minimal, None).unwrap();
            let stm = min.as_structure();
            let mut evw = FOEvaluator::new(stm, &trw);
            for w in 0..m.world_count() {
                assert_eq!(
                    evw.eval_with(&[(wv, Element::World(w))]).unwrap(),
                    truth(&m, w, &f).unwrap(),
                    "□-free ST_w diverges on minimal encoding for {f}\n{m:?}"
                );
            }
            let mut evs = FOEvaluator::new(stm, &trs);
            for (i, &ext) in stm.states.iter().enumerate() {
                assert_eq!(
                    evs.eval_with(&[(sv, Element::State(i))]).unwrap(),
                    supports(&m, ext, &f).unwrap(),
                    "□-free ST_s diverges on minimal encoding for {f}\n{m:?}"
                );
            }
            box_free += 1;
        }
        formulas += 1;
    }
    assert!(
        box_free >= 20,
        "want a healthy □-free sample, got {box_free}"
    );

    // Constructed divergence witness: a non-locally-full encoding makes the
    // σ-graph guard vacuous, so ST_w(□?q) comes out true against a false
    // truth value.
    let m = fixtures::knows_p_wonders_q();
    let min = encode_relational(&m, EncodeMode::Minimal, None).unwrap();
    assert!(!min.is_locally_full());
    let f = parse("[a]?q").unwrap();
    let tr = inqkit_core::fo::standard_translate(&f, TranslationMode::World);
    let wv = free_var(TranslationMode::World);
    let diverged = fo_eval(min.as_structure(), &tr, &[(wv, Element::World(0))]).unwrap();
    assert!(diverged);
    assert!(!truth(&m, 0, &f).unwrap());

    pass(
        7,
        "standard translation correspondence",
        format!("{formulas} formulae ({box_free} □-free, minimal too), witness constructed"),
        t0,
    );
}

#[test]
fn criterion_08_transform_certification() {
    let t0 = Instant::now();
    let mut rng = Rng::new(0x8A);
    let mut models = 0usize;
    while models < 50 {
        let (nw, np, na) = (2 + rng.below(4), 1 + rng.below(2), 1 + rng.below(2));
        let m = random_s5_model(&mut rng, nw, np, na);
        for k in 1..=3usize {
            let cover = rich_cover(&m, k).unwrap();
            assert!(inqkit_core::transforms::verify_covering(&cover).pass());
            assert!(k_rich_report(&cover.target, k).pass(), "{m:?}");
        }
        let simple = simplify(&m).unwrap();
        assert!(simple_report(&simple).pass(), "{m:?}");
        for w in 0..m.world_count() {
            assert!(equiv(
                Pointed::world(&m, w),
                Pointed::world(&simple, w),
                Depth::Full
            ));
        }
        let twice = simplify(&simple).unwrap();
        for a in 0..m.agents().len() {
            for w in 0..m.world_count() {
                assert_eq!(twice.state_map(a, w), simple.state_map(a, w), "idempotence");
            }
        }
        // Simplification preserves richness; the product preserves
        // simplicity.
        if k_rich_report(&m, 2).pass() {
            assert!(k_rich_report(&simple, 2).pass());
        }
        assert!(simple_report(&rich_cover(&simple, 2).unwrap().target).pass());

        for policy in [StratifyPolicy::Minimal, StratifyPolicy::LocallyFull] {
            let point = Point::World(rng.below(m.world_count()));
            let (out, out_point) = stratify(&m, point, StratifyDepth::Even(2), policy).unwrap();
            let report = stratified_report(out.as_structure(), 2, out_point);
            assert!(report.pass(), "{report}\n{m:?}");
            let decoded = decode_relational(&out);
            assert!(equiv(
                Pointed {
                    model: &decoded,
                    point: out_point
                },
                Pointed { model: &m, point },
                Depth::Full
            ));
        }
        models += 1;
    }
    assert!(t0.elapsed() < Duration::from_secs(300));
    pass(
        8,
        "transform certification",
        format!("{models} S5 models × (3 covers + simplify + 2 stratifications), 0 failures"),
        t0,
    );
}

#[test]
fn criterion_09_stratified_cutoff() {
    let t0 = Instant::now();
    let mut rng = Rng::new(0x9C);
    let mut pairs = 0usize;
    let mut nonvacuous = 0usize;
    while pairs < 30 {
        let nw = 1 + rng.below(3);
        let m = random_model(&mut rng, nw, 1, 1);
        // Every third pair opposes a model against its product double, which
        // guarantees equivalent restrictions; the rest are random.
        let m2 = if pairs % 3 == 0 {
            rich_cover(&m, 2).unwrap().target
        } else {
            let nw2 = 1 + rng.below(3);
            random_model(&mut rng, nw2, 1, 1)
        };
        let (s1, p1) = stratify(
            &m,
            Point::World(0),
            StratifyDepth::Even(2),
            StratifyPolicy::Minimal,
        )
        .unwrap();
        let (s2, p2) = stratify(
            &m2,
            Point::World(0),
            StratifyDepth::Even(2),
            StratifyPolicy::Minimal,
        )
        .unwrap();
        let (r1, q1) = stratified_restriction(s1.as_structure(), 2, p1).unwrap();
        let (r2, q2) = stratified_restriction(s2.as_structure(), 2, p2).unwrap();
        let d1 = decode_structure(&r1).unwrap();
        let d2 = decode_structure(&r2).unwrap();
        let pd1 = Pointed {
            model: &d1,
            point: q1,
        };
        let pd2 = Pointed {
            model: &d2,
            point: q2,
        };
        if equiv(pd1, pd2, Depth::Bounded(1)) {
            nonvacuous += 1;
            assert!(
                equiv(pd1, pd2, Depth::Full),
                "cutoff violated: 1-equivalent restrictions not fully equivalent\n{d1:?}\n{d2:?}"
            );
        }
        pairs += 1;
    }
    assert!(nonvacuous >= 10, "only {nonvacuous} non-vacuous pairs");
    pass(
        9,
        "stratified cutoff",
        format!("{pairs} pairs, {nonvacuous} non-vacuous, 0 counterexamples"),
        t0,
    );
}

#[test]
fn criterion_10_threshold_equiv_against_term_enumeration() {
    let t0 = Instant::now();
    let mut rng = Rng::new(0x10);
    let mut instances = 0usize;
    let mut disagreed_with_naive = 0usize;
    while instances < 500 {
        let u = 1 + rng.below(6);
        let u2 = 1 + rng.below(6);
        let k = 1 + rng.below(3);
        let ps: Vec<WorldSet> = (0..k).map(|_| rng.subset(WorldSet::full(u))).collect();
        let qs: Vec<WorldSet> = (0..k).map(|_| rng.subset(WorldSet::full(u2))).collect();
        let d = rng.below(8);

        // Oracle: enumerate boolean terms up to depth 3 as synchronized
        // value pairs, closing under complement, union and intersection.
        let fullu = WorldSet::full(u);
        let fullu2 = WorldSet::full(u2);
        let mut terms: BTreeSet<(u128, u128)> = ps
            .iter()
            .zip(&qs)
            .map(|(&p, &q)| (p.bits(), q.bits()))
            .collect();
        for _ in 0..3 {
            let mut next = terms.clone();
            for &(a, a2) in &terms {
                let (wa, wa2) = (WorldSet::from_bits(a), WorldSet::from_bits(a2));
                next.insert((fullu.difference(wa).bits(), fullu2.difference(wa2).bits()));
                for &(b, b2) in &terms {
                    let (wb, wb2) = (WorldSet::from_bits(b), WorldSet::from_bits(b2));
                    next.insert((wa.union(wb).bits(), wa2.union(wb2).bits()));
                    next.insert((wa.intersect(wb).bits(), wa2.intersect(wb2).bits()));
                }
            }
            terms = next;
        }
        let eq_d = |a: usize, b: usize| a == b || (a >= d && b >= d);
        let oracle = terms
            .iter()
            .all(|&(a, a2)| eq_d(WorldSet::from_bits(a).len(), WorldSet::from_bits(a2).len()));
        let verdict = threshold_equiv(u, &ps, u2, &qs, d).unwrap();
        if verdict != oracle {
            disagreed_with_naive += 1;
        }
        assert_eq!(verdict, oracle, "threshold mismatch at d={d} {ps:?} {qs:?}");
        instances += 1;
    }
    assert_eq!(disagreed_with_naive, 0);
    pass(
        10,
        "threshold counting equivalence",
        format!("{instances} instances vs depth-3 term enumeration, exact agreement"),
        t0,
    );
}
