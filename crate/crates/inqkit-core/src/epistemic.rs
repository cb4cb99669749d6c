//! S5-specific structure: agent classes, local structures with colourings,
//! richness/simplicity/acyclicity predicates and the threshold counting
//! equivalence.

use crate::bisim::{compute_layers, Depth};
use crate::inqstate::InqState;
use crate::model::InqModel;
use crate::validate::{Failure, Report};
use crate::worldset::WorldSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EpistemicError {
    #[error("model is not S5: {0}")]
    NotS5(String),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("tuples have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
}

/// Factivity and full introspection for every agent.
pub fn s5_report(m: &InqModel) -> Report {
    let mut failures = Vec::new();
    'outer: for a in 0..m.agents().len() {
        for w in 0..m.world_count() {
            let sigma = m.sigma_set(a, w);
            if !sigma.contains(w) {
                failures.push(Failure::new(
                    "factivity",
                    format!(
                        "{} ∉ σ_{}({})",
                        m.world_label(w),
                        m.agents()[a],
                        m.world_label(w)
                    ),
                ));
                break 'outer;
            }
            for v in sigma.iter() {
                if m.state_map(a, v) != m.state_map(a, w) {
                    failures.push(Failure::new(
                        "full-introspection",
                        format!(
                            "{} ∈ σ_{}({}) but Σ_{}({}) ≠ Σ_{}({})",
                            m.world_label(v),
                            m.agents()[a],
                            m.world_label(w),
                            m.agents()[a],
                            m.world_label(v),
                            m.agents()[a],
                            m.world_label(w)
                        ),
                    ));
                    break 'outer;
                }
            }
        }
    }
    Report::new("s5", failures)
}

fn require_s5(m: &InqModel) -> Result<(), EpistemicError> {
    let report = s5_report(m);
    if report.pass() {
        Ok(())
    } else {
        Err(EpistemicError::NotS5(report.to_string()))
    }
}

/// The R_a-equivalence class `[w]_a`, which in an S5 model equals σ_a(w).
pub fn a_class(m: &InqModel, agent: usize, w: usize) -> Result<WorldSet, EpistemicError> {
    require_s5(m)?;
    Ok(m.sigma_set(agent, w))
}

pub fn a_class_by_label(
    m: &InqModel,
    agent: &str,
    world: &str,
) -> Result<WorldSet, EpistemicError> {
    let a = m
        .agent_index(agent)
        .ok_or_else(|| EpistemicError::Unknown {
            kind: "agent",
            name: agent.to_string(),
        })?;
    let w = m
        .world_index(world)
        .ok_or_else(|| EpistemicError::Unknown {
            kind: "world",
            name: world.to_string(),
        })?;
    a_class(m, a, w)
}

/// Colouring granularity: a finite bisimilarity level or the full fixpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Granularity {
    Level(usize),
    Full,
}

/// Colours worlds by their bisimilarity class in `m`; ids are assigned by
/// first occurrence in world-index order.
pub fn colouring(m: &InqModel, gran: Granularity) -> Vec<u32> {
    let rel = compute_layers(
        m,
        m,
        match gran {
            Granularity::Level(n) => Depth::Bounded(n),
            Granularity::Full => Depth::Full,
        },
    );
    let layer = match gran {
        Granularity::Level(n) => rel.at(n),
        Granularity::Full => rel.fixpoint(),
    };
    let n = m.world_count();
    let mut colour = vec![u32::MAX; n];
    let mut next = 0u32;
    for w in 0..n {
        if colour[w] == u32::MAX {
            colour[w] = next;
            for v in layer[w].iter() {
                if v > w && colour[v] == u32::MAX {
                    colour[v] = next;
                }
            }
            next += 1;
        }
    }
    colour
}

/// An agent class seen as a mono-modal structure: its carrier, the constant
/// family on it, and the ambient-model colouring of its worlds.
#[derive(Clone, Debug)]
pub struct LocalAStructure {
    pub agent: String,
    pub carrier: WorldSet,
    pub inqstate: InqState,
    /// (world index, colour id) for every carrier world, ascending.
    pub colouring: Vec<(usize, u32)>,
}

pub fn local_a_structure(
    m: &InqModel,
    agent: usize,
    w: usize,
    gran: Granularity,
) -> Result<LocalAStructure, EpistemicError> {
    let carrier = a_class(m, agent, w)?;
    let colours = colouring(m, gran);
    Ok(LocalAStructure {
        agent: m.agents()[agent].clone(),
        carrier,
        inqstate: m.state_map(agent, w).clone(),
        colouring: carrier.iter().map(|v| (v, colours[v])).collect(),
    })
}

impl LocalAStructure {
    /// Multiplicity of each colour on the carrier, by colour id.
    pub fn colour_multiplicities(&self) -> Vec<(u32, usize)> {
        let mut counts: Vec<(u32, usize)> = Vec::new();
        for &(_, c) in &self.colouring {
            match counts.iter_mut().find(|(cc, _)| *cc == c) {
                Some((_, k)) => *k += 1,
                None => counts.push((c, 1)),
            }
        }
        counts.sort_unstable();
        counts
    }
}

/// Iterates the distinct a-classes of an S5 model as (agent, representative
/// world, class) triples, in agent then world order.
pub fn classes(m: &InqModel) -> Result<Vec<(usize, usize, WorldSet)>, EpistemicError> {
    require_s5(m)?;
    let mut out = Vec::new();
    for a in 0..m.agents().len() {
        let mut seen = WorldSet::EMPTY;
        for w in 0..m.world_count() {
            if seen.contains(w) {
                continue;
            }
            let class = m.sigma_set(a, w);
            seen = seen.union(class);
            out.push((a, w, class));
        }
    }
    Ok(out)
}

fn class_colour_set(class: WorldSet, colours: &[u32]) -> Vec<u32> {
    let mut cs: Vec<u32> = class.iter().map(|w| colours[w]).collect();
    cs.sort_unstable();
    cs.dedup();
    cs
}

/// K-richness: inside every class, every maximal state must realize each
/// colour of the class with multiplicity ≥ K or not at all. (Every family
/// member extends into a maximal state, so checking maxima suffices.)
pub fn k_rich_report(m: &InqModel, k: usize) -> Report {
    let mut failures = Vec::new();
    match classes(m) {
        Err(e) => failures.push(Failure::new("s5", e.to_string())),
        Ok(cls) => {
            let colours = colouring(m, Granularity::Full);
            'outer: for (a, w, class) in cls {
                for &mx in m.state_map(a, w).maximal() {
                    for c in class_colour_set(class, &colours) {
                        let cells: WorldSet = class.iter().filter(|&v| colours[v] == c).collect();
                        let hit = cells.intersect(mx).len();
                        if hit != 0 && hit < k {
                            failures.push(Failure::new(
                                "k-rich",
                                format!(
                                    "in [{}]_{} the maximal state {} realizes colour {} only {} < {} times",
                                    m.world_label(w),
                                    m.agents()[a],
                                    m.state_label(mx),
                                    c,
                                    hit,
                                    k
                                ),
                            ));
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    Report::new(format!("k-rich({k})"), failures)
}

/// Simplicity: every maximal state of every class family is a union of full
/// colour classes of its carrier.
pub fn simple_report(m: &InqModel) -> Report {
    let mut failures = Vec::new();
    match classes(m) {
        Err(e) => failures.push(Failure::new("s5", e.to_string())),
        Ok(cls) => {
            let colours = colouring(m, Granularity::Full);
            'outer: for (a, w, class) in cls {
                for &mx in m.state_map(a, w).maximal() {
                    let saturated: WorldSet = class
                        .iter()
                        .filter(|&v| mx.iter().any(|u| colours[u] == colours[v]))
                        .collect();
                    if saturated != mx {
                        failures.push(Failure::new(
                            "simple",
                            format!(
                                "maximal state {} of [{}]_{} is not colour-saturated (its saturation is {})",
                                m.state_label(mx),
                                m.world_label(w),
                                m.agents()[a],
                                m.state_label(saturated)
                            ),
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    Report::new("simple", failures)
}

/// N-acyclicity of the pattern of overlapping classes: no two distinct
/// classes share two worlds, and no simple cycle of up to N classes with
/// pairwise distinct connecting worlds exists.
pub fn n_acyclic_report(m: &InqModel, n: usize) -> Report {
    let mut failures = Vec::new();
    let cls = match classes(m) {
        Err(e) => {
            failures.push(Failure::new("s5", e.to_string()));
            return Report::new(format!("n-acyclic({n})"), failures);
        }
        Ok(cls) => cls,
    };
    let describe = |i: usize| {
        let (a, w, _) = cls[i];
        format!("[{}]_{}", m.world_label(w), m.agents()[a])
    };

    // Pairwise overlaps: classes of distinct agents sharing two or more
    // worlds. (Distinct classes of one agent are disjoint outright.)
    for i in 0..cls.len() {
        for j in i + 1..cls.len() {
            if cls[i].0 == cls[j].0 {
                continue;
            }
            let shared = cls[i].2.intersect(cls[j].2);
            if shared.len() >= 2 {
                failures.push(Failure::new(
                    "class-overlap",
                    format!(
                        "{} and {} share {}",
                        describe(i),
                        describe(j),
                        m.state_label(shared)
                    ),
                ));
                return Report::new(format!("n-acyclic({n})"), failures);
            }
        }
    }

    // Simple cycles of classes, alternating through distinct worlds.
    fn dfs(
        cls: &[(usize, usize, WorldSet)],
        start: usize,
        current: usize,
        path: &mut Vec<usize>,
        used_worlds: WorldSet,
        max_len: usize,
    ) -> Option<(Vec<usize>, WorldSet)> {
        if path.len() >= 2 {
            // Try to close the cycle back to start.
            let closing = cls[current]
                .2
                .intersect(cls[start].2)
                .difference(used_worlds);
            if !closing.is_empty() {
                let mut worlds = used_worlds;
                worlds.insert(closing.min_world().unwrap());
                return Some((path.clone(), worlds));
            }
        }
        if path.len() == max_len {
            return None;
        }
        for next in 0..cls.len() {
            if path.contains(&next) {
                continue;
            }
            let shared = cls[current]
                .2
                .intersect(cls[next].2)
                .difference(used_worlds);
            for w in shared.iter() {
                path.push(next);
                let mut worlds = used_worlds;
                worlds.insert(w);
                if let Some(found) = dfs(cls, start, next, path, worlds, max_len) {
                    return Some(found);
                }
                path.pop();
            }
        }
        None
    }

    for start in 0..cls.len() {
        let mut path = vec![start];
        if let Some((cycle, worlds)) = dfs(&cls, start, start, &mut path, WorldSet::EMPTY, n) {
            failures.push(Failure::new(
                "class-cycle",
                format!(
                    "classes {} form a cycle through {}",
                    cycle
                        .iter()
                        .map(|&i| describe(i))
                        .collect::<Vec<_>>()
                        .join(" – "),
                    m.state_label(worlds)
                ),
            ));
            break;
        }
    }
    Report::new(format!("n-acyclic({n})"), failures)
}

/// |P| =_d |P'|: equal, or both at least d.
fn eq_d(a: usize, b: usize, d: usize) -> bool {
    a == b || (a >= d && b >= d)
}

/// Threshold equivalence of two tuples of sets: every boolean term over the
/// tuples has =_d-matching cardinalities. Decided cell-wise over the atoms
/// of the generated algebras; each term is a disjoint union of cells, so
/// cell-wise agreement is exactly term-wise agreement.
pub fn threshold_equiv(
    universe: usize,
    ps: &[WorldSet],
    universe2: usize,
    qs: &[WorldSet],
    d: usize,
) -> Result<bool, EpistemicError> {
    if ps.len() != qs.len() {
        return Err(EpistemicError::LengthMismatch(ps.len(), qs.len()));
    }
    let k = ps.len();
    let cell = |sets: &[WorldSet], u: usize, mask: usize| -> usize {
        let all = WorldSet::full(u);
        let mut acc = all;
        for (i, &s) in sets.iter().enumerate() {
            acc = if mask & (1 << i) != 0 {
                acc.intersect(s)
            } else {
                acc.intersect(all.difference(s))
            };
        }
        acc.len()
    };
    for mask in 0..(1usize << k) {
        if !eq_d(cell(ps, universe, mask), cell(qs, universe2, mask), d) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ws(ids: &[usize]) -> WorldSet {
        ids.iter().copied().collect()
    }

    #[test]
    fn worked_model_is_s5_and_has_two_classes() {
        let m = fixtures::knows_p_wonders_q();
        assert!(s5_report(&m).pass());
        assert_eq!(a_class_by_label(&m, "a", "w_pq").unwrap(), ws(&[0, 1]));
        let cls = classes(&m).unwrap();
        assert_eq!(cls, vec![(0, 0, ws(&[0, 1])), (0, 2, ws(&[2, 3]))]);
        // Classes are invariant under choice of representative.
        assert_eq!(a_class(&m, 0, 0).unwrap(), a_class(&m, 0, 1).unwrap());
    }

    #[test]
    fn granularity_pair_is_not_s5() {
        let (m1, _) = fixtures::issue_granularity_pair();
        let report = s5_report(&m1);
        assert!(!report.pass());
        assert_eq!(report.failures()[0].condition, "factivity");
        assert!(a_class(&m1, 0, 0).is_err());
    }

    #[test]
    fn reflexive_singleton_class() {
        let m = crate::model::ModelBuilder::new("unit")
            .agents(["a"])
            .atoms(["p"])
            .world("w", &["p"])
            .sigma("a", "w", &[&["w"]])
            .build()
            .unwrap();
        assert_eq!(a_class(&m, 0, 0).unwrap(), WorldSet::singleton(0));
    }

    #[test]
    fn local_structure_colours_by_valuation_at_level_zero() {
        let m = fixtures::knows_p_wonders_q();
        let ls = local_a_structure(&m, 0, 0, Granularity::Level(0)).unwrap();
        assert_eq!(ls.carrier, ws(&[0, 1]));
        assert_eq!(ls.colouring.len(), 2);
        assert_ne!(ls.colouring[0].1, ls.colouring[1].1);
        assert_eq!(ls.colour_multiplicities(), vec![(0, 1), (1, 1)]);
    }

    #[test]
    fn finer_granularity_refines_coarser() {
        let mut rng = crate::gen::Rng::new(31);
        for _ in 0..20 {
            let m = crate::gen::random_s5_model(&mut rng, 5, 2, 2);
            let c0 = colouring(&m, Granularity::Level(0));
            let c1 = colouring(&m, Granularity::Level(1));
            let cf = colouring(&m, Granularity::Full);
            for w in 0..m.world_count() {
                for v in 0..m.world_count() {
                    if c1[w] == c1[v] {
                        assert_eq!(c0[w], c0[v], "level-1 colours refine level-0");
                    }
                    if cf[w] == cf[v] {
                        assert_eq!(c1[w], c1[v], "full colours refine level-1");
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_constant_on_classes_in_s5() {
        let mut rng = crate::gen::Rng::new(8);
        for _ in 0..20 {
            let m = crate::gen::random_s5_model(&mut rng, 5, 2, 2);
            for (a, w, class) in classes(&m).unwrap() {
                for v in class.iter() {
                    assert_eq!(m.state_map(a, v), m.state_map(a, w));
                }
            }
        }
    }

    #[test]
    fn s5_reduct_relations_are_equivalences() {
        let mut rng = crate::gen::Rng::new(0x55);
        for _ in 0..20 {
            let m = crate::gen::random_s5_model(&mut rng, 5, 1, 2);
            let k = m.kripke_reduct();
            for a in 0..m.agents().len() {
                for w in 0..m.world_count() {
                    let succ = k.successors(a, w);
                    assert!(succ.contains(w), "reflexive");
                    for v in succ.iter() {
                        assert_eq!(k.successors(a, v), succ, "class structure");
                    }
                }
            }
        }
    }

    // The full bisimulation type of a world determines the colour profile
    // of its families.
    #[test]
    fn type_determines_colour_profile() {
        let mut rng = crate::gen::Rng::new(0xCDF);
        for _ in 0..25 {
            let m = crate::gen::random_s5_model(&mut rng, 5, 1, 2);
            let colours = colouring(&m, Granularity::Full);
            let profile = |a: usize, w: usize| -> std::collections::BTreeSet<Vec<u32>> {
                m.state_map(a, w)
                    .members()
                    .into_iter()
                    .map(|s| {
                        let mut cs: Vec<u32> = s.iter().map(|v| colours[v]).collect();
                        cs.sort_unstable();
                        cs.dedup();
                        cs
                    })
                    .collect()
            };
            for w in 0..m.world_count() {
                for v in 0..m.world_count() {
                    if colours[w] == colours[v] {
                        for a in 0..m.agents().len() {
                            assert_eq!(profile(a, w), profile(a, v), "{m:?}");
                        }
                    }
                }
            }
        }
    }

    // In a validated-simple model, family membership is determined by the
    // colouring: s ∈ Σ_a(w) iff some member realizes exactly s's colours.
    #[test]
    fn simple_families_are_determined_by_colours() {
        let mut rng = crate::gen::Rng::new(0x51a);
        for _ in 0..20 {
            let base = crate::gen::random_s5_model(&mut rng, 4, 2, 1);
            let m = crate::transforms::simplify(&base).unwrap();
            assert!(simple_report(&m).pass());
            let colours = colouring(&m, Granularity::Full);
            let colour_set = |s: WorldSet| -> Vec<u32> {
                let mut cs: Vec<u32> = s.iter().map(|v| colours[v]).collect();
                cs.sort_unstable();
                cs.dedup();
                cs
            };
            for (a, w, class) in classes(&m).unwrap() {
                let fam = m.state_map(a, w);
                let realized: std::collections::BTreeSet<Vec<u32>> =
                    fam.members().into_iter().map(colour_set).collect();
                for s in class.subsets() {
                    assert_eq!(
                        fam.contains(s),
                        realized.contains(&colour_set(s)),
                        "membership not colour-determined at {s:?}\n{m:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn rich_cover_local_structure_has_doubled_multiplicities() {
        let m = fixtures::knows_p_wonders_q();
        let cover = crate::transforms::rich_cover(&m, 2).unwrap();
        let t = &cover.target;
        let w = t.world_index("w_pq.0").unwrap();
        let ls = local_a_structure(t, 0, w, Granularity::Full).unwrap();
        assert_eq!(ls.carrier.len(), 4);
        let mult = ls.colour_multiplicities();
        assert_eq!(mult.len(), 2);
        assert!(mult.iter().all(|&(_, k)| k == 2));
    }

    #[test]
    fn threshold_equiv_worked_examples() {
        // {1,2,3} in a 5-universe vs {1,2,3,4} in a 6-universe.
        let p = [ws(&[0, 1, 2])];
        let q = [ws(&[0, 1, 2, 3])];
        assert!(threshold_equiv(5, &p, 6, &q, 3).unwrap());
        assert!(!threshold_equiv(5, &p, 6, &q, 4).unwrap());
        assert!(threshold_equiv(5, &p, 5, &p, 7).unwrap());
        assert!(matches!(
            threshold_equiv(5, &p, 5, &[], 1),
            Err(EpistemicError::LengthMismatch(1, 0))
        ));
    }

    #[test]
    fn threshold_equiv_true_at_d_implies_true_below() {
        let mut rng = crate::gen::Rng::new(77);
        for _ in 0..200 {
            let u = 1 + rng.below(6);
            let u2 = 1 + rng.below(6);
            let k = 1 + rng.below(3);
            let ps: Vec<WorldSet> = (0..k).map(|_| rng.subset(WorldSet::full(u))).collect();
            let qs: Vec<WorldSet> = (0..k).map(|_| rng.subset(WorldSet::full(u2))).collect();
            for d in (1..=6).rev() {
                if threshold_equiv(u, &ps, u2, &qs, d).unwrap() {
                    for d2 in 1..=d {
                        assert!(threshold_equiv(u, &ps, u2, &qs, d2).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn overlapping_classes_are_caught() {
        // Two agents whose classes overlap in two worlds.
        let m = crate::model::ModelBuilder::new("overlap")
            .agents(["a", "b"])
            .atoms([] as [&str; 0])
            .world("u", &[])
            .world("v", &[])
            .sigma("a", "u", &[&["u", "v"]])
            .sigma("a", "v", &[&["u", "v"]])
            .sigma("b", "u", &[&["u", "v"]])
            .sigma("b", "v", &[&["u", "v"]])
            .build()
            .unwrap();
        let report = n_acyclic_report(&m, 4);
        assert!(!report.pass());
        assert_eq!(report.failures()[0].condition, "class-overlap");

        // A triangle of single-overlap classes is a 3-cycle.
        let tri = crate::model::ModelBuilder::new("tri")
            .agents(["a", "b", "c"])
            .atoms([] as [&str; 0])
            .world("x", &[])
            .world("y", &[])
            .world("z", &[])
            .sigma("a", "x", &[&["x", "y"]])
            .sigma("a", "y", &[&["x", "y"]])
            .sigma("a", "z", &[&["z"]])
            .sigma("b", "y", &[&["y", "z"]])
            .sigma("b", "z", &[&["y", "z"]])
            .sigma("b", "x", &[&["x"]])
            .sigma("c", "z", &[&["z", "x"]])
            .sigma("c", "x", &[&["z", "x"]])
            .sigma("c", "y", &[&["y"]])
            .build()
            .unwrap();
        let report = n_acyclic_report(&tri, 3);
        assert!(!report.pass());
        assert_eq!(report.failures()[0].condition, "class-cycle");
        // With the cycle bound below the triangle, it passes.
        assert!(n_acyclic_report(&tri, 2).pass());
    }
}
