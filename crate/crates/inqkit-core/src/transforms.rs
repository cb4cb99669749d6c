//! Bisimilarity-preserving model surgery.
//!
//! Every transform certifies its own output with the bisimulation fixpoint
//! before returning; a certification failure is an error, never a silent
//! wrong answer.

use std::collections::BTreeSet;

use crate::bisim::{compute_layers, equiv, Depth};
use crate::epistemic::{colouring, s5_report, Granularity};
use crate::inqstate::InqState;
use crate::model::{InqModel, Point, Pointed};
use crate::relational::{
    decode_relational, encode_relational_capped, EncodeMode, RelationalModel, Structure,
};
use crate::validate::{Failure, Report};
use crate::worldset::{WorldSet, MAX_WORLDS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("stratification depth must be a nonzero even number, got {0}")]
    BadDepth(usize),
    #[error("world budget of {0} exhausted before the unfolding closed")]
    BudgetExhausted(usize),
    #[error("result would hold {0} worlds, the limit is {MAX_WORLDS}")]
    TooManyWorlds(usize),
    #[error("model is not S5: {0}")]
    NotS5(String),
    #[error("point out of model")]
    BadPoint,
    #[error("output failed its bisimilarity certification: {0}")]
    Certification(String),
    #[error(transparent)]
    Relational(#[from] crate::relational::RelationalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StratifyDepth {
    /// Unfold to the given even depth, gluing the original model at the
    /// frontier.
    Even(usize),
    /// Unfold until the frontier dies out, up to a world budget.
    Unbounded { budget: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StratifyPolicy {
    /// Each stratum carries exactly the states the frontier worlds need.
    Minimal,
    /// Each stratum carries every state of the encoding; preserves local
    /// fullness.
    LocallyFull,
}

impl StratifyPolicy {
    fn mode(self) -> EncodeMode {
        match self {
            StratifyPolicy::Minimal => EncodeMode::Minimal,
            StratifyPolicy::LocallyFull => EncodeMode::LocallyFull,
        }
    }
}

/// Unfolds a pointed model into a stratified relational model, fully
/// bisimilar at the point. With `Even(ℓ)` the original model is glued back
/// at stage ℓ/2, keeping the result finite and stratified to depth ℓ.
pub fn stratify(
    m: &InqModel,
    point: Point,
    depth: StratifyDepth,
    policy: StratifyPolicy,
) -> Result<(RelationalModel, Point), TransformError> {
    match point {
        Point::World(w) if w >= m.world_count() => return Err(TransformError::BadPoint),
        Point::State(s) if !s.is_subset(m.all_worlds()) => return Err(TransformError::BadPoint),
        _ => {}
    }
    let point_state = match point {
        Point::State(s) => Some(s),
        Point::World(_) => None,
    };
    let rel = encode_relational_capped(m, policy.mode(), point_state, MAX_WORLDS)?;
    let src = rel.as_structure();
    let n_orig = m.world_count();

    let (stages, budget) = match depth {
        StratifyDepth::Even(l) => {
            if l == 0 || l % 2 != 0 {
                return Err(TransformError::BadDepth(l));
            }
            // A state point is measured through its (ℓ+1)-neighbourhood, so
            // its unfolding truncates one stage deeper.
            let extra = match point {
                Point::World(_) => 0,
                Point::State(_) => 1,
            };
            (Some(l / 2 + extra), usize::MAX)
        }
        StratifyDepth::Unbounded { budget } => (None, budget),
    };

    // Tagged worlds per level; tagged states per level hold original state
    // extensions. With a frontier at stage n, level-n worlds attach to the
    // original states directly (a level-n tagged state would duplicate the
    // extension of its original).
    let mut level_worlds: Vec<Vec<usize>> = Vec::new(); // original indices per level
    let mut level_states: Vec<Vec<WorldSet>> = Vec::new(); // original extensions per level

    let state_family = |u: usize| -> BTreeSet<WorldSet> {
        let mut fam = BTreeSet::new();
        for rows in &src.edges {
            fam.extend(rows[u].iter().map(|&i| src.states[i]));
        }
        fam
    };

    let mut frontier: Vec<usize> = match point {
        Point::World(w) => {
            level_worlds.push(vec![w]);
            vec![w]
        }
        Point::State(_) => {
            level_worlds.push(Vec::new());
            Vec::new()
        }
    };
    let mut level = 0usize;
    loop {
        // States of this level.
        let states: BTreeSet<WorldSet> = match (level, point) {
            (0, Point::State(s)) => s.subsets().collect(),
            _ => match policy {
                StratifyPolicy::Minimal => frontier.iter().flat_map(|&u| state_family(u)).collect(),
                StratifyPolicy::LocallyFull => src.states.iter().copied().collect(),
            },
        };
        let next_frontier: Vec<usize> = {
            let mut all = WorldSet::EMPTY;
            for &s in &states {
                all = all.union(s);
            }
            all.iter().collect()
        };
        if let Some(n) = stages {
            if level == n {
                // Frontier worlds of stage n attach to the glued original.
                break;
            }
        } else if next_frontier.is_empty() {
            level_states.push(states.into_iter().collect());
            break;
        }
        level_states.push(states.into_iter().collect());
        level_worlds.push(next_frontier.clone());
        frontier = next_frontier;
        level += 1;
        let so_far: usize = level_worlds.iter().map(Vec::len).sum();
        if so_far > budget {
            return Err(TransformError::BudgetExhausted(budget));
        }
    }
    let glue = stages.is_some();

    // Assemble the output structure.
    let tagged_total: usize = level_worlds.iter().map(Vec::len).sum();
    let total_worlds = tagged_total + if glue { n_orig } else { 0 };
    if total_worlds > MAX_WORLDS {
        return Err(TransformError::TooManyWorlds(total_worlds));
    }

    let mut worlds: Vec<String> = Vec::with_capacity(total_worlds);
    // world_at[level][orig] = output index
    let mut world_at: Vec<Vec<Option<usize>>> = Vec::new();
    for (lev, lw) in level_worlds.iter().enumerate() {
        let mut slots = vec![None; n_orig];
        for &u in lw {
            slots[u] = Some(worlds.len());
            worlds.push(format!("{}@{lev}", m.world_label(u)));
        }
        world_at.push(slots);
    }
    let orig_base = worlds.len();
    if glue {
        for u in 0..n_orig {
            worlds.push(m.world_label(u).to_string());
        }
    }

    let lift = |lev: usize, s: WorldSet| -> WorldSet {
        s.iter()
            .map(|u| world_at[lev][u].expect("member world materialized"))
            .collect()
    };
    let last_level = level_worlds.len() - 1;

    let mut states: Vec<WorldSet> = vec![WorldSet::EMPTY];
    // state_slot[level] maps original extension -> output state index
    let mut state_slot: Vec<std::collections::BTreeMap<WorldSet, usize>> = Vec::new();
    for (lev, ls) in level_states.iter().enumerate() {
        let mut slots = std::collections::BTreeMap::new();
        for &s in ls {
            if s.is_empty() {
                slots.insert(s, 0);
                continue;
            }
            let ext = if glue && lev == last_level {
                WorldSet::from_bits(s.bits() << orig_base)
            } else {
                lift(lev + 1, s)
            };
            slots.insert(s, states.len());
            states.push(ext);
        }
        state_slot.push(slots);
    }
    let mut orig_state_slot: std::collections::BTreeMap<WorldSet, usize> =
        std::collections::BTreeMap::new();
    if glue {
        for &s in &src.states {
            if s.is_empty() {
                orig_state_slot.insert(s, 0);
            } else {
                orig_state_slot.insert(s, states.len());
                states.push(WorldSet::from_bits(s.bits() << orig_base));
            }
        }
    }

    let agents = m.agents().to_vec();
    let mut edges: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); total_worlds]; agents.len()];
    for (a, rows) in src.edges.iter().enumerate() {
        for (lev, lw) in level_worlds.iter().enumerate() {
            for &u in lw {
                let out_w = world_at[lev][u].unwrap();
                let mut row: Vec<usize> = rows[u]
                    .iter()
                    .map(|&i| {
                        let ext = src.states[i];
                        if glue && lev == last_level {
                            orig_state_slot[&ext]
                        } else {
                            state_slot[lev][&ext]
                        }
                    })
                    .collect();
                row.sort_unstable();
                row.dedup();
                edges[a][out_w] = row;
            }
        }
        if glue {
            for u in 0..n_orig {
                let mut row: Vec<usize> = rows[u]
                    .iter()
                    .map(|&i| orig_state_slot[&src.states[i]])
                    .collect();
                row.sort_unstable();
                row.dedup();
                edges[a][orig_base + u] = row;
            }
        }
    }

    // Canonical state order.
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by_key(|&i| states[i]);
    let mut rank = vec![usize::MAX; states.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let final_states: Vec<WorldSet> = order.iter().map(|&i| states[i]).collect();
    for rows in &mut edges {
        for row in rows.iter_mut() {
            for s in row.iter_mut() {
                *s = rank[*s];
            }
            row.sort_unstable();
        }
    }

    let mut valuation: Vec<WorldSet> = Vec::new();
    for p in 0..m.atoms().len() {
        let base = m.valuation(p);
        let mut v = WorldSet::EMPTY;
        for (lev, lw) in level_worlds.iter().enumerate() {
            for &u in lw {
                if base.contains(u) {
                    v.insert(world_at[lev][u].unwrap());
                }
            }
        }
        if glue {
            v = v.union(WorldSet::from_bits(base.bits() << orig_base));
        }
        valuation.push(v);
    }

    let out = Structure {
        name: format!("{}_strat", m.name),
        worlds,
        agents,
        atoms: m.atoms().to_vec(),
        states: final_states,
        edges,
        valuation,
    }
    .into_relational()?;

    let out_point = match point {
        Point::World(w) => Point::World(world_at[0][w].unwrap()),
        Point::State(s) => Point::State(lift(1, s)),
    };

    // Certification: the decoded unfolding is fully bisimilar at the point.
    let decoded = decode_relational(&out);
    let ok = equiv(
        Pointed {
            model: &decoded,
            point: out_point,
        },
        Pointed { model: m, point },
        Depth::Full,
    );
    if !ok {
        return Err(TransformError::Certification(
            "stratified unfolding is not fully bisimilar to its input".into(),
        ));
    }
    Ok((out, out_point))
}

/// The ℓ-restriction around a point used by the stratified predicate and
/// the cutoff arguments: the Gaifman neighbourhood taken in the structure
/// without the empty state (which otherwise trivializes distance), with ∅
/// and its E-links put back afterwards. For a state point the radius is
/// ℓ+1.
pub fn stratified_restriction(
    st: &Structure,
    depth: usize,
    point: Point,
) -> Result<(Structure, Point), TransformError> {
    if depth == 0 || depth % 2 != 0 {
        return Err(TransformError::BadDepth(depth));
    }
    let radius = match point {
        Point::World(_) => depth,
        Point::State(_) => depth + 1,
    };
    // Indices of the non-empty states, in order: position = index in the
    // ∅-less structure.
    let nonempty: Vec<usize> = (0..st.state_count())
        .filter(|&i| !st.states[i].is_empty())
        .collect();
    let dropped = st.drop_empty_state();
    let start = match point {
        Point::World(w) => {
            if w >= dropped.world_count() {
                return Err(TransformError::BadPoint);
            }
            crate::fo::Element::World(w)
        }
        Point::State(s) => match dropped.state_index(s) {
            Some(i) => crate::fo::Element::State(i),
            None => return Err(TransformError::BadPoint),
        },
    };
    let dist = crate::fo::gaifman_distances(&dropped, start);
    let keep_worlds: Vec<usize> = (0..dropped.world_count())
        .filter(|&w| dist.world(w).is_some_and(|d| d <= radius))
        .collect();
    let mut keep_states: Vec<usize> = (0..dropped.state_count())
        .filter(|&s| dist.state(s).is_some_and(|d| d <= radius))
        .map(|s| nonempty[s])
        .collect();
    if let Some(empty_ix) = st.state_index(WorldSet::EMPTY) {
        keep_states.push(empty_ix);
        keep_states.sort_unstable();
    }
    let restr = st.restrict(keep_worlds.clone(), &keep_states);
    let new_point = match point {
        Point::World(w) => Point::World(
            keep_worlds
                .iter()
                .position(|&old| old == w)
                .expect("start world kept"),
        ),
        Point::State(s) => {
            let remapped: WorldSet = s
                .iter()
                .map(|w| {
                    keep_worlds
                        .iter()
                        .position(|&old| old == w)
                        .expect("point members kept")
                })
                .collect();
            Point::State(remapped)
        }
    };
    Ok((restr, new_point))
}

/// Checks that the restriction of `st` around the point is stratified: the
/// empty state is exempt from the strata, and every other E-edge and
/// membership must connect adjacent strata.
pub fn stratified_report(st: &Structure, depth: usize, point: Point) -> Report {
    let property = format!("stratified({depth})");
    let mut failures = Vec::new();
    if let Point::State(s) = point {
        if s.is_empty() {
            return Report::new(property, failures);
        }
    }
    let (restr, point) = match stratified_restriction(st, depth, point) {
        Ok(pair) => pair,
        Err(e) => {
            failures.push(Failure::new("restriction", e.to_string()));
            return Report::new(property, failures);
        }
    };

    // Strata as equality constraints: stratum(state) = stratum(world) for
    // E-edges, stratum(member) = stratum(state) + 1. Propagate from the
    // anchor and report the first conflict.
    let nw = restr.world_count();
    let ns = restr.state_count();
    let mut wstr: Vec<Option<i64>> = vec![None; nw];
    let mut sstr: Vec<Option<i64>> = vec![None; ns];

    match point {
        Point::World(w) => {
            wstr[w] = Some(0);
        }
        Point::State(s) => {
            // S_0 is the powerset of the point; all subsets must be present.
            for t in s.subsets() {
                if t.is_empty() {
                    continue;
                }
                let Some(ix) = restr.state_index(t) else {
                    failures.push(Failure::new(
                        "powerset-at-point",
                        format!("subset {} of the point is missing", restr.state_label(t)),
                    ));
                    return Report::new(property, failures);
                };
                sstr[ix] = Some(0);
            }
        }
    }

    let mut changed = true;
    while changed && failures.is_empty() {
        changed = false;
        for a in 0..restr.agents.len() {
            for w in 0..nw {
                for &s in &restr.edges[a][w] {
                    if restr.states[s].is_empty() {
                        continue;
                    }
                    match (wstr[w], sstr[s]) {
                        (Some(x), None) => {
                            sstr[s] = Some(x);
                            changed = true;
                        }
                        (None, Some(y)) => {
                            wstr[w] = Some(y);
                            changed = true;
                        }
                        (Some(x), Some(y)) if x != y => {
                            failures.push(Failure::new(
                                "strata",
                                format!(
                                    "E-edge from {} (stratum {x}) to {} (stratum {y})",
                                    restr.worlds[w],
                                    restr.state_label(restr.states[s])
                                ),
                            ));
                        }
                        _ => {}
                    }
                }
            }
        }
        for s in 0..ns {
            for u in restr.states[s].iter() {
                match (sstr[s], wstr[u]) {
                    (Some(x), None) => {
                        wstr[u] = Some(x + 1);
                        changed = true;
                    }
                    (None, Some(y)) => {
                        sstr[s] = Some(y - 1);
                        changed = true;
                    }
                    (Some(x), Some(y)) if y != x + 1 => {
                        failures.push(Failure::new(
                            "strata",
                            format!(
                                "world {} (stratum {y}) belongs to state {} (stratum {x})",
                                restr.worlds[u],
                                restr.state_label(restr.states[s])
                            ),
                        ));
                    }
                    _ => {}
                }
            }
        }
    }
    if failures.is_empty() {
        for w in 0..nw {
            match wstr[w] {
                None => failures.push(Failure::new(
                    "strata",
                    format!("world {} is unreachable from the point", restr.worlds[w]),
                )),
                Some(x) if x < 0 => failures.push(Failure::new(
                    "strata",
                    format!("world {} sits below the root stratum", restr.worlds[w]),
                )),
                Some(0) if matches!(point, Point::World(w0) if w0 != w) => {
                    failures.push(Failure::new(
                        "root-stratum",
                        format!("stratum 0 holds {} besides the point", restr.worlds[w]),
                    ));
                }
                _ => {}
            }
            if !failures.is_empty() {
                break;
            }
        }
    }
    if failures.is_empty() {
        for s in 0..ns {
            if sstr[s].is_none() && !restr.states[s].is_empty() {
                failures.push(Failure::new(
                    "strata",
                    format!(
                        "state {} is unreachable from the point",
                        restr.state_label(restr.states[s])
                    ),
                ));
                break;
            }
        }
    }
    Report::new(property, failures)
}

/// A surjective world projection commuting with Σ and V.
#[derive(Clone, Debug)]
pub struct Covering {
    pub source: InqModel,
    pub target: InqModel,
    /// projection[target world] = source world
    pub projection: Vec<usize>,
}

/// The product covering with K tagged copies of every world: target states
/// are the full preimages of source states, realized by the maximal
/// antichain of preimages.
pub fn rich_cover(m: &InqModel, k: usize) -> Result<Covering, TransformError> {
    assert!(k >= 1, "rich_cover needs K >= 1");
    let n = m.world_count();
    if n * k > MAX_WORLDS {
        return Err(TransformError::TooManyWorlds(n * k));
    }
    let preimage = |s: WorldSet| -> WorldSet {
        let mut out = WorldSet::EMPTY;
        for c in 0..k {
            out = out.union(WorldSet::from_bits(s.bits() << (c * n)));
        }
        out
    };
    let worlds: Vec<String> = (0..k)
        .flat_map(|c| (0..n).map(move |w| (c, w)))
        .map(|(c, w)| format!("{}.{c}", m.world_label(w)))
        .collect();
    let sigma = (0..m.agents().len())
        .map(|a| {
            (0..n * k)
                .map(|idx| {
                    let src = idx % n;
                    InqState::from_states(
                        m.state_map(a, src).maximal().iter().map(|&mx| preimage(mx)),
                    )
                })
                .collect()
        })
        .collect();
    let valuation = (0..m.atoms().len())
        .map(|p| preimage(m.valuation(p)))
        .collect();
    let target = InqModel::new(
        format!("{}_x{k}", m.name),
        worlds,
        m.agents().to_vec(),
        m.atoms().to_vec(),
        sigma,
        valuation,
    );
    let cover = Covering {
        source: m.clone(),
        target,
        projection: (0..n * k).map(|idx| idx % n).collect(),
    };
    let report = verify_covering(&cover);
    if !report.pass() {
        return Err(TransformError::Certification(report.to_string()));
    }
    Ok(cover)
}

/// Saturates every family of an S5 model along its full bisimilarity
/// colouring, yielding a simple companion with the same Kripke reduct and
/// the same per-world bisimulation type.
pub fn simplify(m: &InqModel) -> Result<InqModel, TransformError> {
    let out = simplify_with(m, Granularity::Full)?;
    // Certification for the full colouring: the type of every world is
    // preserved.
    let rel = compute_layers(m, &out, Depth::Full);
    let bad = (0..m.world_count()).find(|&w| !rel.fixpoint()[w].contains(w));
    if let Some(w) = bad {
        return Err(TransformError::Certification(format!(
            "saturation changed the type of {}",
            m.world_label(w)
        )));
    }
    Ok(out)
}

/// Saturation at a coarser colouring (a finite bisimilarity level); the
/// full-type certification only applies at `Granularity::Full`.
pub fn simplify_with(m: &InqModel, gran: Granularity) -> Result<InqModel, TransformError> {
    let report = s5_report(m);
    if !report.pass() {
        return Err(TransformError::NotS5(report.to_string()));
    }
    let colours = colouring(m, gran);
    let mut sigma: Vec<Vec<InqState>> = Vec::new();
    for a in 0..m.agents().len() {
        let mut row: Vec<Option<InqState>> = vec![None; m.world_count()];
        for (agent, w, class) in crate::epistemic::classes(m)
            .expect("validated S5")
            .into_iter()
            .filter(|&(aa, _, _)| aa == a)
        {
            debug_assert_eq!(agent, a);
            let saturate = |s: WorldSet| -> WorldSet {
                class
                    .iter()
                    .filter(|&v| s.iter().any(|u| colours[u] == colours[v]))
                    .collect()
            };
            let fam =
                InqState::from_states(m.state_map(a, w).maximal().iter().map(|&mx| saturate(mx)));
            for v in class.iter() {
                row[v] = Some(fam.clone());
            }
        }
        sigma.push(
            row.into_iter()
                .map(|s| s.expect("classes cover W"))
                .collect(),
        );
    }
    let out = InqModel::new(
        format!("{}_simple", m.name),
        m.worlds().to_vec(),
        m.agents().to_vec(),
        m.atoms().to_vec(),
        sigma,
        (0..m.atoms().len()).map(|p| m.valuation(p)).collect(),
    );
    // The families only grow.
    for a in 0..m.agents().len() {
        for w in 0..m.world_count() {
            for &mx in m.state_map(a, w).maximal() {
                if !out.state_map(a, w).contains(mx) {
                    return Err(TransformError::Certification(format!(
                        "Σ_{}({}) lost the state {}",
                        m.agents()[a],
                        m.world_label(w),
                        m.state_label(mx)
                    )));
                }
            }
        }
    }
    Ok(out)
}

/// Checks all covering conditions, reporting the first failure: a
/// surjective projection, both commuting squares, and the back&forth
/// conditions of the lifted projection graph.
pub fn verify_covering(c: &Covering) -> Report {
    let mut failures = Vec::new();
    let src = &c.source;
    let tgt = &c.target;

    if c.projection.len() != tgt.world_count()
        || c.projection.iter().any(|&w| w >= src.world_count())
    {
        failures.push(Failure::new(
            "projection",
            "map does not cover the target worlds",
        ));
        return Report::new("covering", failures);
    }
    let project = |s: WorldSet| -> WorldSet { s.iter().map(|w| c.projection[w]).collect() };

    // Surjectivity.
    let image: WorldSet = (0..tgt.world_count()).map(|w| c.projection[w]).collect();
    if image != src.all_worlds() {
        let missing = src.all_worlds().difference(image).min_world().unwrap();
        failures.push(Failure::new(
            "surjectivity",
            format!("{} has no preimage", src.world_label(missing)),
        ));
        return Report::new("covering", failures);
    }

    if src.agents() != tgt.agents() || src.atoms() != tgt.atoms() {
        failures.push(Failure::new("signature", "agent or atom lists differ"));
        return Report::new("covering", failures);
    }

    // Σ-square, pointwise on maximal antichains.
    for a in 0..src.agents().len() {
        for w in 0..tgt.world_count() {
            let pushed = tgt.state_map(a, w).map_worlds(project);
            let expect = src.state_map(a, c.projection[w]);
            if &pushed != expect {
                failures.push(Failure::new(
                    "sigma-commutes",
                    format!(
                        "π(Σ_{}({})) = {:?} but Σ_{}({}) = {:?}",
                        tgt.agents()[a],
                        tgt.world_label(w),
                        pushed,
                        src.agents()[a],
                        src.world_label(c.projection[w]),
                        expect
                    ),
                ));
                return Report::new("covering", failures);
            }
        }
    }

    // V-square.
    for p in 0..src.atoms().len() {
        let pushed = project(tgt.valuation(p));
        if pushed != src.valuation(p) {
            failures.push(Failure::new(
                "valuation-commutes",
                format!("π(V({0})) differs from V({0})", src.atoms()[p]),
            ));
            return Report::new("covering", failures);
        }
    }

    // The lifted projection graph as a bisimulation: atom equivalence per
    // pair, then back&forth through preimages.
    for w in 0..tgt.world_count() {
        for p in 0..src.atoms().len() {
            if tgt.valuation(p).contains(w) != src.valuation(p).contains(c.projection[w]) {
                failures.push(Failure::new(
                    "atom-equivalence",
                    format!(
                        "{} and {} disagree on {}",
                        tgt.world_label(w),
                        src.world_label(c.projection[w]),
                        src.atoms()[p]
                    ),
                ));
                return Report::new("covering", failures);
            }
        }
    }
    for a in 0..src.agents().len() {
        for w in 0..tgt.world_count() {
            let srcfam = src.state_map(a, c.projection[w]);
            for &mx in tgt.state_map(a, w).maximal() {
                if !srcfam.contains(project(mx)) {
                    failures.push(Failure::new(
                        "back-forth",
                        format!(
                            "π({}) ∉ Σ_{}({})",
                            tgt.state_label(mx),
                            src.agents()[a],
                            src.world_label(c.projection[w])
                        ),
                    ));
                    return Report::new("covering", failures);
                }
            }
            for &s in srcfam.maximal() {
                let fiber: WorldSet = (0..tgt.world_count())
                    .filter(|&v| s.contains(c.projection[v]))
                    .collect();
                // A member above s exists iff some maximal state restricted
                // to the fiber of s projects back onto all of s.
                let found = tgt
                    .state_map(a, w)
                    .maximal()
                    .iter()
                    .any(|&mx| project(mx.intersect(fiber)) == s);
                if !found {
                    failures.push(Failure::new(
                        "back-forth",
                        format!(
                            "{} ∈ Σ_{}({}) has no state above it at {}",
                            src.state_label(s),
                            src.agents()[a],
                            src.world_label(c.projection[w]),
                            tgt.world_label(w)
                        ),
                    ));
                    return Report::new("covering", failures);
                }
            }
        }
    }
    Report::new("covering", failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::relational::encode_relational;

    #[test]
    fn stratify_reflexive_singleton_is_a_chain_into_the_glued_model() {
        let m = crate::model::ModelBuilder::new("unit")
            .agents(["a"])
            .atoms(["p"])
            .world("w", &["p"])
            .sigma("a", "w", &[&["w"]])
            .build()
            .unwrap();
        let (out, point) = stratify(
            &m,
            Point::World(0),
            StratifyDepth::Even(2),
            StratifyPolicy::Minimal,
        )
        .unwrap();
        assert_eq!(out.worlds, vec!["w@0", "w@1", "w"]);
        assert_eq!(point, Point::World(0));
        let report = stratified_report(out.as_structure(), 2, point);
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn stratify_worked_model_validates_and_certifies() {
        let m = fixtures::knows_p_wonders_q();
        for policy in [StratifyPolicy::Minimal, StratifyPolicy::LocallyFull] {
            let (out, point) =
                stratify(&m, Point::World(0), StratifyDepth::Even(2), policy).unwrap();
            let report = stratified_report(out.as_structure(), 2, point);
            assert!(report.pass(), "{report}");
        }
    }

    #[test]
    fn stratify_state_pointed_starts_with_the_powerset() {
        let m = fixtures::knows_p_wonders_q();
        let s: WorldSet = [0usize, 1].into_iter().collect();
        let (out, point) = stratify(
            &m,
            Point::State(s),
            StratifyDepth::Even(2),
            StratifyPolicy::Minimal,
        )
        .unwrap();
        let Point::State(ps) = point else {
            panic!("state point expected")
        };
        // W_0 is empty: no world is tagged @0; S_0 = ℘(s) lives at the point.
        assert!(out.worlds.iter().all(|l| !l.ends_with("@0")));
        for t in ps.subsets() {
            assert!(out.state_index(t).is_some(), "missing subset of the point");
        }
        let report = stratified_report(out.as_structure(), 2, point);
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn stratify_deeper_and_state_pointed_locally_full() {
        let m = fixtures::knows_p_wonders_q();
        let (out, point) = stratify(
            &m,
            Point::World(0),
            StratifyDepth::Even(4),
            StratifyPolicy::Minimal,
        )
        .unwrap();
        assert!(stratified_report(out.as_structure(), 4, point).pass());

        let s: WorldSet = [0usize, 1].into_iter().collect();
        let (out, point) = stratify(
            &m,
            Point::State(s),
            StratifyDepth::Even(2),
            StratifyPolicy::LocallyFull,
        )
        .unwrap();
        assert!(stratified_report(out.as_structure(), 2, point).pass());
        assert!(out.is_locally_full());
    }

    #[test]
    fn stratify_handles_trivial_families_and_two_agents() {
        let m = crate::model::ModelBuilder::new("quiet")
            .agents(["a", "b"])
            .atoms(["p"])
            .world("w", &["p"])
            .world("v", &[])
            .sigma("a", "w", &[&[]])
            .sigma("a", "v", &[&["v"]])
            .sigma("b", "w", &[&["w", "v"]])
            .sigma("b", "v", &[&["v"]])
            .build()
            .unwrap();
        for point in [Point::World(0), Point::State(WorldSet::singleton(0))] {
            let (out, out_point) =
                stratify(&m, point, StratifyDepth::Even(2), StratifyPolicy::Minimal).unwrap();
            let report = stratified_report(out.as_structure(), 2, out_point);
            assert!(report.pass(), "{report}");
        }
    }

    #[test]
    fn stratify_rejects_bad_depths_and_budgets() {
        let m = fixtures::knows_p_wonders_q();
        assert!(matches!(
            stratify(
                &m,
                Point::World(0),
                StratifyDepth::Even(3),
                StratifyPolicy::Minimal
            ),
            Err(TransformError::BadDepth(3))
        ));
        assert!(matches!(
            stratify(
                &m,
                Point::World(0),
                StratifyDepth::Unbounded { budget: 6 },
                StratifyPolicy::Minimal
            ),
            Err(TransformError::BudgetExhausted(6))
        ));
    }

    #[test]
    fn unbounded_stratification_terminates_when_the_frontier_dies() {
        // A world whose issues are settled: Σ = {∅} downstream.
        let m = crate::model::ModelBuilder::new("sink")
            .agents(["a"])
            .atoms([] as [&str; 0])
            .world("w", &[])
            .world("v", &[])
            .sigma("a", "w", &[&["v"]])
            .sigma("a", "v", &[&[]])
            .build()
            .unwrap();
        let (out, point) = stratify(
            &m,
            Point::World(0),
            StratifyDepth::Unbounded { budget: 100 },
            StratifyPolicy::Minimal,
        )
        .unwrap();
        assert_eq!(out.worlds, vec!["w@0", "v@1"]);
        let report = stratified_report(out.as_structure(), 2, point);
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn locally_full_policy_preserves_local_fullness() {
        let m = fixtures::knows_p_wonders_q();
        let (out, _) = stratify(
            &m,
            Point::World(0),
            StratifyDepth::Even(2),
            StratifyPolicy::LocallyFull,
        )
        .unwrap();
        assert!(out.is_locally_full());
    }

    #[test]
    fn rich_cover_world_limit() {
        let n = 50;
        let worlds: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        let sigma = vec![(0..n)
            .map(|w| InqState::from_states([WorldSet::singleton(w)]))
            .collect()];
        let m = InqModel::new("wide", worlds, vec!["a".into()], vec![], sigma, vec![]);
        assert!(matches!(
            rich_cover(&m, 3),
            Err(TransformError::TooManyWorlds(150))
        ));
    }

    #[test]
    fn rich_cover_multiplies_worlds_and_verifies() {
        let m = fixtures::knows_p_wonders_q();
        let c = rich_cover(&m, 2).unwrap();
        assert_eq!(c.target.world_count(), 8);
        assert!(verify_covering(&c).pass());
        assert!(crate::epistemic::k_rich_report(&c.target, 2).pass());
        // The covering projection preserves each world's full type.
        assert!(equiv(
            Pointed::world(&c.target, 4),
            Pointed::world(&m, 0),
            Depth::Full
        ));
        // K = 1 is the identity product.
        let c1 = rich_cover(&m, 1).unwrap();
        assert_eq!(c1.target.world_count(), 4);
        for a in 0..m.agents().len() {
            for w in 0..4 {
                assert_eq!(c1.target.state_map(a, w), m.state_map(a, w));
            }
        }
    }

    #[test]
    fn identity_covering_verifies() {
        let m = fixtures::knows_p_wonders_q();
        let c = Covering {
            source: m.clone(),
            target: m.clone(),
            projection: (0..4).collect(),
        };
        assert!(verify_covering(&c).pass());
    }

    #[test]
    fn covering_with_flipped_valuation_bit_fails_on_atom_equivalence() {
        let m = fixtures::knows_p_wonders_q();
        let mut cover = rich_cover(&m, 2).unwrap();
        // Flip atom p at the second copy of w_pq.
        let mut v = cover.target.valuation(0);
        v.remove(4);
        let mut val: Vec<WorldSet> = (0..2).map(|p| cover.target.valuation(p)).collect();
        val[0] = v;
        cover.target = InqModel::new(
            cover.target.name.clone(),
            cover.target.worlds().to_vec(),
            cover.target.agents().to_vec(),
            cover.target.atoms().to_vec(),
            (0..1)
                .map(|a| {
                    (0..8)
                        .map(|w| cover.target.state_map(a, w).clone())
                        .collect()
                })
                .collect(),
            val,
        );
        let report = verify_covering(&cover);
        assert!(!report.pass());
        assert!(report
            .failures()
            .iter()
            .any(|f| f.condition == "valuation-commutes" || f.condition == "atom-equivalence"));
    }

    #[test]
    fn simplify_fixes_the_worked_model() {
        let m = fixtures::knows_p_wonders_q();
        // All four worlds have distinct types, so every state is saturated.
        let out = simplify(&m).unwrap();
        for a in 0..1 {
            for w in 0..4 {
                assert_eq!(out.state_map(a, w), m.state_map(a, w));
            }
        }
        assert!(crate::epistemic::simple_report(&out).pass());
    }

    #[test]
    fn simplify_saturates_twin_worlds() {
        // Two bisimilar worlds u, u2 in one class with Σ maximal {{u}}:
        // saturation grows the state to {u,u2}.
        let m = crate::model::ModelBuilder::new("twins")
            .agents(["a"])
            .atoms(["p"])
            .world("u", &["p"])
            .world("u2", &["p"])
            .sigma("a", "u", &[&["u"], &["u2"]])
            .sigma("a", "u2", &[&["u"], &["u2"]])
            .build()
            .unwrap();
        let out = simplify(&m).unwrap();
        let expect: WorldSet = [0usize, 1].into_iter().collect();
        assert_eq!(out.state_map(0, 0).maximal(), &[expect]);
        assert!(crate::epistemic::simple_report(&out).pass());
        // Idempotent.
        assert_eq!(simplify(&out).unwrap().state_map(0, 0), out.state_map(0, 0));
    }

    #[test]
    fn disjoint_sum_commutes_with_decoding() {
        let (m1, m2) = fixtures::issue_granularity_pair();
        let r1 = encode_relational(&m1, EncodeMode::Minimal, None).unwrap();
        let r2 = encode_relational(&m2, EncodeMode::Minimal, None).unwrap();
        let sum = crate::relational::disjoint_sum(&[(&r1, 1), (&r2, 1)]).unwrap();
        let dm = decode_relational(&sum);
        // The decoded sum restricts to copies fully bisimilar to each part.
        for w in 0..3 {
            assert!(equiv(
                Pointed::world(&dm, w),
                Pointed::world(&m1, w),
                Depth::Full
            ));
            assert!(equiv(
                Pointed::world(&dm, w + 3),
                Pointed::world(&m2, w),
                Depth::Full
            ));
        }
    }
}
