//! Two-sorted relational structures and relational encodings of models.
//!
//! A [`Structure`] is a plain two-sorted carrier: worlds, an extensional
//! second sort of information states, relations E_a ⊆ W × S, the membership
//! relation ε derived from state extensions, and unary predicates for atoms.
//! A [`RelationalModel`] is a structure that has passed the four relational
//! model conditions (extensionality, local powerset, non-emptiness, downward
//! closure). Operations that can leave the class of relational models
//! (dropping the empty state, neighbourhood restriction) return a plain
//! [`Structure`].

use std::collections::BTreeSet;

use crate::inqstate::InqState;
use crate::model::InqModel;
use crate::validate::{Failure, Report};
use crate::worldset::{WorldSet, MAX_WORLDS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelationalError {
    #[error(
        "full encoding of {worlds} worlds exceeds the cap of {cap}; raise the cap to override"
    )]
    FullCapExceeded { worlds: usize, cap: usize },
    #[error("result would hold {0} worlds, the limit is {MAX_WORLDS}")]
    TooManyWorlds(usize),
    #[error("invalid relational model: {0}")]
    Invalid(String),
}

/// Default cap on |W| for materializing the full encoding (2^|W| states).
pub const DEFAULT_FULL_CAP: usize = 16;

/// Which second sort a relational encoding carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncodeMode {
    /// S = image(Σ): exactly the member states of the inquisitive map.
    Minimal,
    /// S = all subsets of all σ_a(w): the least locally full choice.
    LocallyFull,
    /// S = the full powerset of W.
    Full,
}

impl EncodeMode {
    pub fn parse(s: &str) -> Option<EncodeMode> {
        match s {
            "minimal" => Some(EncodeMode::Minimal),
            "locally-full" => Some(EncodeMode::LocallyFull),
            "full" => Some(EncodeMode::Full),
            _ => None,
        }
    }
}

/// A plain two-sorted structure over the relational signature.
#[derive(Clone, PartialEq, Eq)]
pub struct Structure {
    pub name: String,
    pub worlds: Vec<String>,
    pub agents: Vec<String>,
    pub atoms: Vec<String>,
    /// Second sort; extensions over world indices. Kept sorted at
    /// construction, duplicates representable (extensionality is a checked
    /// condition, not a representation invariant).
    pub states: Vec<WorldSet>,
    /// `edges[agent][world]` = sorted state indices with (w,s) ∈ E_a.
    pub edges: Vec<Vec<Vec<usize>>>,
    /// `valuation[atom]`
    pub valuation: Vec<WorldSet>,
}

impl Structure {
    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn eps(&self, w: usize, s: usize) -> bool {
        self.states[s].contains(w)
    }

    pub fn edge(&self, agent: usize, w: usize, s: usize) -> bool {
        self.edges[agent][w].binary_search(&s).is_ok()
    }

    pub fn state_index(&self, extension: WorldSet) -> Option<usize> {
        self.states.iter().position(|&s| s == extension)
    }

    pub fn world_index(&self, label: &str) -> Option<usize> {
        self.worlds.iter().position(|l| l == label)
    }

    /// Checks the four relational model conditions, reporting every
    /// violated condition with a witness.
    pub fn validate_relational(&self) -> Report {
        let mut failures = Vec::new();
        // extensionality
        'ext: for i in 0..self.states.len() {
            for j in i + 1..self.states.len() {
                if self.states[i] == self.states[j] {
                    failures.push(Failure::new(
                        "extensionality",
                        format!(
                            "states #{i} and #{j} share the extension {}",
                            self.state_label(self.states[i])
                        ),
                    ));
                    break 'ext;
                }
            }
        }
        // local powerset
        let present: BTreeSet<WorldSet> = self.states.iter().copied().collect();
        'lp: for &s in &self.states {
            for t in s.subsets() {
                if !present.contains(&t) {
                    failures.push(Failure::new(
                        "local-powerset",
                        format!(
                            "{} is a state but its subset {} is missing from the second sort",
                            self.state_label(s),
                            self.state_label(t)
                        ),
                    ));
                    break 'lp;
                }
            }
        }
        // non-emptiness
        'ne: for (a, rows) in self.edges.iter().enumerate() {
            for (w, row) in rows.iter().enumerate() {
                if row.is_empty() {
                    failures.push(Failure::new(
                        "non-emptiness",
                        format!("E_{}[{}] is empty", self.agents[a], self.worlds[w]),
                    ));
                    break 'ne;
                }
            }
        }
        // downward closure
        'dc: for (a, rows) in self.edges.iter().enumerate() {
            for (w, row) in rows.iter().enumerate() {
                let in_row: BTreeSet<WorldSet> = row.iter().map(|&i| self.states[i]).collect();
                for &i in row {
                    let s = self.states[i];
                    for (j, &t) in self.states.iter().enumerate() {
                        if t.is_subset(s) && !in_row.contains(&t) {
                            failures.push(Failure::new(
                                "downward-closure",
                                format!(
                                    "E_{}[{}] holds {} but not its represented subset {} (state #{j})",
                                    self.agents[a],
                                    self.worlds[w],
                                    self.state_label(s),
                                    self.state_label(t)
                                ),
                            ));
                            break 'dc;
                        }
                    }
                }
            }
        }
        Report::new("relational-valid", failures)
    }

    pub fn into_relational(self) -> Result<RelationalModel, RelationalError> {
        let report = self.validate_relational();
        if report.pass() {
            Ok(RelationalModel(self))
        } else {
            Err(RelationalError::Invalid(report.to_string()))
        }
    }

    /// The same structure with the empty information state removed from the
    /// second sort. The result generally violates the relational model
    /// conditions and is kept as a plain structure.
    pub fn drop_empty_state(&self) -> Structure {
        let keep: Vec<usize> = (0..self.states.len())
            .filter(|&i| !self.states[i].is_empty())
            .collect();
        self.restrict(self.all_worlds_vec(), &keep)
    }

    fn all_worlds_vec(&self) -> Vec<usize> {
        (0..self.worlds.len()).collect()
    }

    /// Induced substructure on the given worlds and states (indices into the
    /// current sorts; order preserved). State extensions are restricted to
    /// the kept worlds.
    pub fn restrict(&self, worlds: Vec<usize>, states: &[usize]) -> Structure {
        let mut new_index = vec![usize::MAX; self.worlds.len()];
        for (new, &old) in worlds.iter().enumerate() {
            new_index[old] = new;
        }
        let remap = |s: WorldSet| -> WorldSet {
            s.iter()
                .filter(|&w| new_index[w] != usize::MAX)
                .map(|w| new_index[w])
                .collect()
        };
        let mut state_new = vec![usize::MAX; self.states.len()];
        for (new, &old) in states.iter().enumerate() {
            state_new[old] = new;
        }
        Structure {
            name: self.name.clone(),
            worlds: worlds.iter().map(|&w| self.worlds[w].clone()).collect(),
            agents: self.agents.clone(),
            atoms: self.atoms.clone(),
            states: states.iter().map(|&i| remap(self.states[i])).collect(),
            edges: self
                .edges
                .iter()
                .map(|rows| {
                    worlds
                        .iter()
                        .map(|&w| {
                            rows[w]
                                .iter()
                                .filter(|&&s| state_new[s] != usize::MAX)
                                .map(|&s| state_new[s])
                                .collect()
                        })
                        .collect()
                })
                .collect(),
            valuation: self.valuation.iter().map(|&v| remap(v)).collect(),
        }
    }

    /// Local fullness: every subset of every σ_a(w) = `⋃E_a[w]` is present in
    /// the second sort.
    pub fn is_locally_full(&self) -> bool {
        let present: BTreeSet<WorldSet> = self.states.iter().copied().collect();
        self.edges.iter().all(|rows| {
            rows.iter().all(|row| {
                let sigma = row
                    .iter()
                    .fold(WorldSet::EMPTY, |acc, &i| acc.union(self.states[i]));
                sigma.subsets().all(|t| present.contains(&t))
            })
        })
    }

    /// Structural equality up to names and labels: same sort sizes, same
    /// state extensions, edges and valuation, in the same index order.
    pub fn same_shape(&self, other: &Structure) -> bool {
        self.worlds.len() == other.worlds.len()
            && self.agents == other.agents
            && self.atoms == other.atoms
            && self.states == other.states
            && self.edges == other.edges
            && self.valuation == other.valuation
    }

    pub fn state_label(&self, s: WorldSet) -> String {
        let mut out = String::from("{");
        for (k, w) in s.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&self.worlds[w]);
        }
        out.push('}');
        out
    }
}

impl std::fmt::Debug for Structure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "structure {} |W|={} |S|={}",
            self.name,
            self.worlds.len(),
            self.states.len()
        )
    }
}

/// A structure satisfying the relational model conditions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RelationalModel(Structure);

impl std::ops::Deref for RelationalModel {
    type Target = Structure;

    fn deref(&self) -> &Structure {
        &self.0
    }
}

impl RelationalModel {
    pub fn as_structure(&self) -> &Structure {
        &self.0
    }

    pub fn into_structure(self) -> Structure {
        self.0
    }
}

/// Encodes an inquisitive model as a relational model. A state point, when
/// given, augments the second sort by the powerset of that state.
pub fn encode_relational(
    m: &InqModel,
    mode: EncodeMode,
    point: Option<WorldSet>,
) -> Result<RelationalModel, RelationalError> {
    encode_relational_capped(m, mode, point, DEFAULT_FULL_CAP)
}

pub fn encode_relational_capped(
    m: &InqModel,
    mode: EncodeMode,
    point: Option<WorldSet>,
    full_cap: usize,
) -> Result<RelationalModel, RelationalError> {
    let n = m.world_count();
    let mut states: BTreeSet<WorldSet> = BTreeSet::new();
    match mode {
        EncodeMode::Minimal => {
            for a in 0..m.agents().len() {
                for w in 0..n {
                    states.extend(m.state_map(a, w).members());
                }
            }
        }
        EncodeMode::LocallyFull => {
            for a in 0..m.agents().len() {
                for w in 0..n {
                    states.extend(m.sigma_set(a, w).subsets());
                }
            }
        }
        EncodeMode::Full => {
            if n > full_cap {
                return Err(RelationalError::FullCapExceeded {
                    worlds: n,
                    cap: full_cap,
                });
            }
            states.extend(m.all_worlds().subsets());
        }
    }
    states.insert(WorldSet::EMPTY);
    if let Some(s) = point {
        states.extend(s.subsets());
    }
    let states: Vec<WorldSet> = states.into_iter().collect();
    let index_of = |s: WorldSet| states.binary_search(&s).expect("state present");

    let edges = (0..m.agents().len())
        .map(|a| {
            (0..n)
                .map(|w| {
                    m.state_map(a, w)
                        .members()
                        .into_iter()
                        .map(index_of)
                        .collect()
                })
                .collect()
        })
        .collect();

    let st = Structure {
        name: m.name.clone(),
        worlds: m.worlds().to_vec(),
        agents: m.agents().to_vec(),
        atoms: m.atoms().to_vec(),
        states,
        edges,
        valuation: (0..m.atoms().len()).map(|i| m.valuation(i)).collect(),
    };
    debug_assert!(st.validate_relational().pass());
    Ok(RelationalModel(st))
}

/// The inquisitive model determined by a relational model: Σ_a(w) = `E_a[w]`,
/// V(p_i) = P_i.
pub fn decode_relational(rel: &RelationalModel) -> InqModel {
    let st = rel.as_structure();
    InqModel::new(
        st.name.clone(),
        st.worlds.clone(),
        st.agents.clone(),
        st.atoms.clone(),
        st.edges
            .iter()
            .map(|rows| {
                rows.iter()
                    .map(|row| InqState::from_states(row.iter().map(|&i| st.states[i])))
                    .collect()
            })
            .collect(),
        st.valuation.clone(),
    )
}

/// Decodes an unvalidated structure, validating it first.
pub fn decode_structure(st: &Structure) -> Result<InqModel, RelationalError> {
    Ok(decode_relational(&st.clone().into_relational()?))
}

/// Essentially disjoint union: copies share exactly the empty state of the
/// second sort. World labels are tagged `label.k` with a global copy index.
pub fn disjoint_sum(
    parts: &[(&RelationalModel, usize)],
) -> Result<RelationalModel, RelationalError> {
    assert!(!parts.is_empty(), "disjoint_sum needs at least one part");
    let total_worlds: usize = parts.iter().map(|(m, k)| m.world_count() * k).sum();
    if total_worlds > MAX_WORLDS {
        return Err(RelationalError::TooManyWorlds(total_worlds));
    }

    let mut agents: Vec<String> = Vec::new();
    let mut atoms: Vec<String> = Vec::new();
    for (m, _) in parts {
        for a in &m.agents {
            if !agents.contains(a) {
                agents.push(a.clone());
            }
        }
        for p in &m.atoms {
            if !atoms.contains(p) {
                atoms.push(p.clone());
            }
        }
    }

    let mut worlds = Vec::new();
    let mut states: Vec<WorldSet> = vec![WorldSet::EMPTY];
    let mut edges: Vec<Vec<Vec<usize>>> = vec![Vec::new(); agents.len()];
    let mut valuation = vec![WorldSet::EMPTY; atoms.len()];

    let mut copy_idx = 0usize;
    for (m, mult) in parts {
        for _ in 0..*mult {
            let base = worlds.len();
            for label in &m.worlds {
                worlds.push(format!("{label}.{copy_idx}"));
            }
            let shift = |s: WorldSet| -> WorldSet { WorldSet::from_bits(s.bits() << base) };
            // Map this copy's states into the shared second sort.
            let mut local: Vec<usize> = Vec::with_capacity(m.states.len());
            for &s in &m.states {
                if s.is_empty() {
                    local.push(0);
                } else {
                    states.push(shift(s));
                    local.push(states.len() - 1);
                }
            }
            for (ai, a) in m.agents.iter().enumerate() {
                let slot = agents.iter().position(|x| x == a).unwrap();
                for row in &m.edges[ai] {
                    edges[slot].push(row.iter().map(|&i| local[i]).collect());
                }
            }
            // Agents absent from this part get the trivial family on its worlds.
            for (slot, a) in agents.iter().enumerate() {
                if !m.agents.iter().any(|x| x == a) {
                    for _ in 0..m.world_count() {
                        edges[slot].push(vec![0]);
                    }
                }
            }
            for (pi, p) in m.atoms.iter().enumerate() {
                let slot = atoms.iter().position(|x| x == p).unwrap();
                valuation[slot] = valuation[slot].union(shift(m.valuation[pi]));
            }
            copy_idx += 1;
        }
    }

    // Canonical state order, remapping edges accordingly.
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by_key(|&i| states[i]);
    let mut rank = vec![0usize; states.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let states: Vec<WorldSet> = order.iter().map(|&i| states[i]).collect();
    for rows in &mut edges {
        for row in rows.iter_mut() {
            for s in row.iter_mut() {
                *s = rank[*s];
            }
            row.sort_unstable();
        }
    }

    let name = parts
        .iter()
        .map(|(m, k)| {
            if *k == 1 {
                m.name.clone()
            } else {
                format!("{}x{k}", m.name)
            }
        })
        .collect::<Vec<_>>()
        .join("+");
    Structure {
        name,
        worlds,
        agents,
        atoms,
        states,
        edges,
        valuation,
    }
    .into_relational()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ws(ids: &[usize]) -> WorldSet {
        ids.iter().copied().collect()
    }

    // Oracle: the minimal second sort is the downward closure of the maximal
    // states, computed here by naive enumeration.
    fn naive_minimal_second_sort(m: &InqModel) -> BTreeSet<WorldSet> {
        let mut all = BTreeSet::new();
        for a in 0..m.agents().len() {
            for w in 0..m.world_count() {
                for mx in m.state_map(a, w).maximal() {
                    all.extend(mx.subsets());
                }
            }
        }
        all.insert(WorldSet::EMPTY);
        all
    }

    #[test]
    fn minimal_encoding_of_worked_model_has_six_states() {
        let m = fixtures::knows_p_wonders_q();
        let rel = encode_relational(&m, EncodeMode::Minimal, None).unwrap();
        let oracle = naive_minimal_second_sort(&m);
        assert_eq!(rel.states.len(), 6);
        assert_eq!(rel.states.iter().copied().collect::<BTreeSet<_>>(), oracle);
        assert_eq!(
            rel.states,
            vec![
                WorldSet::EMPTY,
                ws(&[0]),
                ws(&[1]),
                ws(&[2]),
                ws(&[3]),
                ws(&[2, 3]),
            ]
        );
    }

    #[test]
    fn full_encoding_has_the_whole_powerset() {
        let m = fixtures::knows_p_wonders_q();
        let rel = encode_relational(&m, EncodeMode::Full, None).unwrap();
        assert_eq!(rel.states.len(), 16);
        assert!(rel.validate_relational().pass());
    }

    #[test]
    fn parsimony_ordering_of_encodings() {
        let m = fixtures::knows_p_wonders_q();
        let min = encode_relational(&m, EncodeMode::Minimal, None).unwrap();
        let lf = encode_relational(&m, EncodeMode::LocallyFull, None).unwrap();
        let full = encode_relational(&m, EncodeMode::Full, None).unwrap();
        let sets = |r: &RelationalModel| r.states.iter().copied().collect::<BTreeSet<_>>();
        assert!(sets(&min).is_subset(&sets(&lf)));
        assert!(sets(&lf).is_subset(&sets(&full)));
        for r in [&min, &lf, &full] {
            assert!(r.validate_relational().pass());
        }
    }

    #[test]
    fn state_point_augments_the_second_sort() {
        let m = fixtures::knows_p_wonders_q();
        let cross: WorldSet = [0usize, 2].into_iter().collect();
        let plain = encode_relational(&m, EncodeMode::Minimal, None).unwrap();
        assert!(plain.state_index(cross).is_none());
        let pointed = encode_relational(&m, EncodeMode::Minimal, Some(cross)).unwrap();
        for t in cross.subsets() {
            assert!(pointed.state_index(t).is_some());
        }
        assert!(pointed.validate_relational().pass());
    }

    #[test]
    fn full_cap_is_enforced() {
        let m = fixtures::knows_p_wonders_q();
        assert!(matches!(
            encode_relational_capped(&m, EncodeMode::Full, None, 3),
            Err(RelationalError::FullCapExceeded { worlds: 4, cap: 3 })
        ));
    }

    #[test]
    fn decode_inverts_every_encoding() {
        let m = fixtures::knows_p_wonders_q();
        for mode in [
            EncodeMode::Minimal,
            EncodeMode::LocallyFull,
            EncodeMode::Full,
        ] {
            let rel = encode_relational(&m, mode, None).unwrap();
            assert_eq!(decode_relational(&rel), m);
        }
        // Re-encoding a decoded model minimally stays inside the original
        // second sort.
        let lf = encode_relational(&m, EncodeMode::LocallyFull, None).unwrap();
        let again = encode_relational(&decode_relational(&lf), EncodeMode::Minimal, None).unwrap();
        let outer: BTreeSet<WorldSet> = lf.states.iter().copied().collect();
        assert!(again.states.iter().all(|s| outer.contains(s)));
    }

    #[test]
    fn invalid_structures_are_rejected_with_witnesses() {
        let m = fixtures::knows_p_wonders_q();
        let rel = encode_relational(&m, EncodeMode::LocallyFull, None).unwrap();

        // Deleting one subset of a σ-set breaks the local powerset.
        let mut broken = rel.as_structure().clone();
        let victim = broken.state_index(ws(&[0])).unwrap();
        broken.states.remove(victim);
        for rows in &mut broken.edges {
            for row in rows.iter_mut() {
                row.retain(|&s| s != victim);
                for s in row.iter_mut() {
                    if *s > victim {
                        *s -= 1;
                    }
                }
            }
        }
        let report = broken.validate_relational();
        assert!(!report.pass());
        assert!(report
            .failures()
            .iter()
            .any(|f| f.condition == "local-powerset"));

        // Emptying an E-row breaks non-emptiness, and decode refuses it.
        let mut no_edges = rel.as_structure().clone();
        no_edges.edges[0][0].clear();
        let report = no_edges.validate_relational();
        assert!(report
            .failures()
            .iter()
            .any(|f| f.condition == "non-emptiness"));
        assert!(decode_structure(&no_edges).is_err());
    }

    #[test]
    fn drop_empty_state_removes_exactly_the_empty_extension() {
        let m = fixtures::knows_p_wonders_q();
        let rel = encode_relational(&m, EncodeMode::Minimal, None).unwrap();
        let dropped = rel.drop_empty_state();
        assert_eq!(dropped.states.len(), 5);
        assert!(dropped.states.iter().all(|s| !s.is_empty()));
        // Dropping again is a no-op.
        assert!(dropped.drop_empty_state().same_shape(&dropped));
    }

    #[test]
    fn disjoint_sum_identity_and_sharing() {
        let m = fixtures::knows_p_wonders_q();
        let rel = encode_relational(&m, EncodeMode::Minimal, None).unwrap();
        let sum1 = disjoint_sum(&[(&rel, 1)]).unwrap();
        assert!(sum1.as_structure().same_shape(rel.as_structure()));

        let (m1, m2) = fixtures::issue_granularity_pair();
        let r1 = encode_relational(&m1, EncodeMode::Minimal, None).unwrap();
        let r2 = encode_relational(&m2, EncodeMode::Minimal, None).unwrap();
        let sum = disjoint_sum(&[(&r1, 1), (&r2, 1)]).unwrap();
        // The second sorts unite, sharing exactly one empty state.
        assert_eq!(sum.states.len(), r1.states.len() + r2.states.len() - 1);
        assert!(sum.validate_relational().pass());
    }

    #[test]
    fn disjoint_sum_pads_missing_agents_with_the_trivial_family() {
        let m = fixtures::knows_p_wonders_q(); // agent a
        let (m1, _) = fixtures::issue_granularity_pair(); // agent x
        let ra = encode_relational(&m, EncodeMode::Minimal, None).unwrap();
        let rx = encode_relational(&m1, EncodeMode::Minimal, None).unwrap();
        let sum = disjoint_sum(&[(&ra, 1), (&rx, 1)]).unwrap();
        assert_eq!(sum.agents, vec!["a".to_string(), "x".to_string()]);
        assert!(sum.validate_relational().pass());
        let dm = decode_relational(&sum);
        // On the copy that lacks the agent, it entertains nothing.
        let a = dm.agent_index("a").unwrap();
        assert!(dm.state_map(a, 4).is_trivial());
        let x = dm.agent_index("x").unwrap();
        assert!(dm.state_map(x, 0).is_trivial());
        assert!(!dm.state_map(a, 0).is_trivial());
    }

    #[test]
    fn disjoint_sum_world_limit() {
        let m = fixtures::knows_p_wonders_q();
        let rel = encode_relational(&m, EncodeMode::Minimal, None).unwrap();
        assert!(matches!(
            disjoint_sum(&[(&rel, 40)]),
            Err(RelationalError::TooManyWorlds(160))
        ));
    }
}
