//! Inquisitive modal models and their Kripke reducts.

use crate::inqstate::InqState;
use crate::worldset::{WorldSet, MAX_WORLDS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("model holds {0} worlds, the limit is {MAX_WORLDS}")]
    TooManyWorlds(usize),
    #[error("sigma for agent `{agent}` at world `{world}` lists no states; pass allow-trivial to repair it to {{∅}}")]
    EmptySigma { agent: String, world: String },
    #[error("world index {0} out of range")]
    WorldOutOfRange(usize),
}

/// A finite multi-agent inquisitive modal model.
#[derive(Clone, PartialEq, Eq)]
pub struct InqModel {
    pub name: String,
    worlds: Vec<String>,
    agents: Vec<String>,
    atoms: Vec<String>,
    /// `sigma[agent][world]`
    sigma: Vec<Vec<InqState>>,
    /// `valuation[atom]`
    valuation: Vec<WorldSet>,
}

impl InqModel {
    /// Direct constructor for programmatic model building; inputs must be
    /// consistent in length. Use [`ModelBuilder`] for validated construction
    /// from named parts.
    pub fn new(
        name: impl Into<String>,
        worlds: Vec<String>,
        agents: Vec<String>,
        atoms: Vec<String>,
        sigma: Vec<Vec<InqState>>,
        valuation: Vec<WorldSet>,
    ) -> InqModel {
        assert!(worlds.len() <= MAX_WORLDS);
        assert_eq!(sigma.len(), agents.len());
        assert!(sigma.iter().all(|row| row.len() == worlds.len()));
        assert_eq!(valuation.len(), atoms.len());
        InqModel {
            name: name.into(),
            worlds,
            agents,
            atoms,
            sigma,
            valuation,
        }
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn world_label(&self, w: usize) -> &str {
        &self.worlds[w]
    }

    pub fn world_index(&self, label: &str) -> Option<usize> {
        self.worlds.iter().position(|l| l == label)
    }

    pub fn agent_index(&self, label: &str) -> Option<usize> {
        self.agents.iter().position(|l| l == label)
    }

    pub fn atom_index(&self, label: &str) -> Option<usize> {
        self.atoms.iter().position(|l| l == label)
    }

    pub fn all_worlds(&self) -> WorldSet {
        WorldSet::full(self.worlds.len())
    }

    /// The inquisitive state Σ_a(w).
    pub fn state_map(&self, agent: usize, w: usize) -> &InqState {
        &self.sigma[agent][w]
    }

    /// σ_a(w), the union of Σ_a(w).
    pub fn sigma_set(&self, agent: usize, w: usize) -> WorldSet {
        self.sigma[agent][w].union_all()
    }

    pub fn valuation(&self, atom: usize) -> WorldSet {
        self.valuation[atom]
    }

    /// Checked σ lookup by labels.
    pub fn sigma_by_label(&self, agent: &str, world: &str) -> Result<WorldSet, ModelError> {
        let a = self.agent_index(agent).ok_or_else(|| ModelError::Unknown {
            kind: "agent",
            name: agent.to_string(),
        })?;
        let w = self.world_index(world).ok_or_else(|| ModelError::Unknown {
            kind: "world",
            name: world.to_string(),
        })?;
        Ok(self.sigma_set(a, w))
    }

    /// The associated standard Kripke model: R_a = {(w,w') : w' ∈ σ_a(w)}.
    pub fn kripke_reduct(&self) -> KripkeModel {
        KripkeModel {
            name: self.name.clone(),
            worlds: self.worlds.clone(),
            agents: self.agents.clone(),
            atoms: self.atoms.clone(),
            rel: self
                .sigma
                .iter()
                .map(|row| row.iter().map(|st| st.union_all()).collect())
                .collect(),
            valuation: self.valuation.clone(),
        }
    }

    /// Renders a state as `{w1,w2}` with labels in index order.
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

impl std::fmt::Debug for InqModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "model {} worlds={:?}", self.name, self.worlds)?;
        for (a, row) in self.sigma.iter().enumerate() {
            for (w, st) in row.iter().enumerate() {
                writeln!(
                    f,
                    "  sigma {} {} = {:?}",
                    self.agents[a], self.worlds[w], st
                )?;
            }
        }
        for (i, v) in self.valuation.iter().enumerate() {
            writeln!(f, "  V({}) = {:?}", self.atoms[i], v)?;
        }
        Ok(())
    }
}

/// The Kripke reduct: plain accessibility relations R_a.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    pub name: String,
    pub worlds: Vec<String>,
    pub agents: Vec<String>,
    pub atoms: Vec<String>,
    /// `rel[agent][world]` = successor set
    pub rel: Vec<Vec<WorldSet>>,
    pub valuation: Vec<WorldSet>,
}

impl KripkeModel {
    pub fn successors(&self, agent: usize, w: usize) -> WorldSet {
        self.rel[agent][w]
    }
}

/// A distinguished world or information state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Point {
    World(usize),
    State(WorldSet),
}

impl Point {
    /// The state view of the point (a world becomes its singleton).
    pub fn as_state(self) -> WorldSet {
        match self {
            Point::World(w) => WorldSet::singleton(w),
            Point::State(s) => s,
        }
    }
}

/// A model together with a distinguished point.
#[derive(Clone, Copy)]
pub struct Pointed<'m> {
    pub model: &'m InqModel,
    pub point: Point,
}

impl<'m> Pointed<'m> {
    pub fn world(model: &'m InqModel, w: usize) -> Pointed<'m> {
        Pointed {
            model,
            point: Point::World(w),
        }
    }

    pub fn state(model: &'m InqModel, s: WorldSet) -> Pointed<'m> {
        Pointed {
            model,
            point: Point::State(s),
        }
    }
}

/// Named parts of a model description, validated into an [`InqModel`].
#[derive(Default, Clone)]
pub struct ModelBuilder {
    pub name: String,
    pub agents: Vec<String>,
    pub atoms: Vec<String>,
    /// (label, true atoms)
    pub worlds: Vec<(String, Vec<String>)>,
    /// (agent, world, maximal states as label lists)
    pub sigma: Vec<(String, String, Vec<Vec<String>>)>,
    /// Repair missing or empty sigma entries to the trivial family {∅}.
    pub allow_trivial: bool,
}

impl ModelBuilder {
    pub fn new(name: impl Into<String>) -> ModelBuilder {
        ModelBuilder {
            name: name.into(),
            ..ModelBuilder::default()
        }
    }

    pub fn agents<S: Into<String>, I: IntoIterator<Item = S>>(mut self, it: I) -> Self {
        self.agents = it.into_iter().map(Into::into).collect();
        self
    }

    pub fn atoms<S: Into<String>, I: IntoIterator<Item = S>>(mut self, it: I) -> Self {
        self.atoms = it.into_iter().map(Into::into).collect();
        self
    }

    pub fn world<S: Into<String>>(mut self, label: S, true_atoms: &[&str]) -> Self {
        self.worlds.push((
            label.into(),
            true_atoms.iter().map(|s| s.to_string()).collect(),
        ));
        self
    }

    /// Declares the maximal states of Σ_agent(world); downward closure is
    /// implicit.
    pub fn sigma(mut self, agent: &str, world: &str, maximal: &[&[&str]]) -> Self {
        self.sigma.push((
            agent.to_string(),
            world.to_string(),
            maximal
                .iter()
                .map(|s| s.iter().map(|w| w.to_string()).collect())
                .collect(),
        ));
        self
    }

    pub fn allow_trivial(mut self, yes: bool) -> Self {
        self.allow_trivial = yes;
        self
    }

    pub fn build(self) -> Result<InqModel, ModelError> {
        if self.worlds.len() > MAX_WORLDS {
            return Err(ModelError::TooManyWorlds(self.worlds.len()));
        }
        let mut world_labels = Vec::new();
        for (label, _) in &self.worlds {
            if world_labels.contains(label) {
                return Err(ModelError::Duplicate {
                    kind: "world",
                    name: label.clone(),
                });
            }
            world_labels.push(label.clone());
        }
        for (kind, list) in [("agent", &self.agents), ("atom", &self.atoms)] {
            for (i, name) in list.iter().enumerate() {
                if list[..i].contains(name) {
                    return Err(ModelError::Duplicate {
                        kind,
                        name: name.clone(),
                    });
                }
            }
        }
        let world_index = |label: &str| -> Result<usize, ModelError> {
            world_labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| ModelError::Unknown {
                    kind: "world",
                    name: label.to_string(),
                })
        };

        let mut valuation = vec![WorldSet::EMPTY; self.atoms.len()];
        for (w, (_, true_atoms)) in self.worlds.iter().enumerate() {
            for atom in true_atoms {
                let i = self.atoms.iter().position(|a| a == atom).ok_or_else(|| {
                    ModelError::Unknown {
                        kind: "atom",
                        name: atom.clone(),
                    }
                })?;
                valuation[i].insert(w);
            }
        }

        let mut sigma: Vec<Vec<Option<InqState>>> =
            vec![vec![None; world_labels.len()]; self.agents.len()];
        for (agent, world, states) in &self.sigma {
            let a =
                self.agents
                    .iter()
                    .position(|x| x == agent)
                    .ok_or_else(|| ModelError::Unknown {
                        kind: "agent",
                        name: agent.clone(),
                    })?;
            let w = world_index(world)?;
            if states.is_empty() && !self.allow_trivial {
                return Err(ModelError::EmptySigma {
                    agent: agent.clone(),
                    world: world.clone(),
                });
            }
            let mut sets = Vec::new();
            for state in states {
                let mut ws = WorldSet::EMPTY;
                for label in state {
                    ws.insert(world_index(label)?);
                }
                sets.push(ws);
            }
            sigma[a][w] = Some(InqState::from_states(sets));
        }
        let mut rows = Vec::new();
        for (a, row) in sigma.into_iter().enumerate() {
            let mut out = Vec::new();
            for (w, st) in row.into_iter().enumerate() {
                match st {
                    Some(st) => out.push(st),
                    None if self.allow_trivial => out.push(InqState::trivial()),
                    None => {
                        return Err(ModelError::EmptySigma {
                            agent: self.agents[a].clone(),
                            world: world_labels[w].clone(),
                        })
                    }
                }
            }
            rows.push(out);
        }

        Ok(InqModel {
            name: self.name,
            worlds: world_labels,
            agents: self.agents,
            atoms: self.atoms,
            sigma: rows,
            valuation,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn worked_model_matches_its_description() {
        let m = fixtures::knows_p_wonders_q();
        assert_eq!(m.world_count(), 4);
        let w_pq = m.world_index("w_pq").unwrap();
        let st = m.state_map(0, w_pq);
        assert_eq!(
            st.maximal(),
            &[
                WorldSet::singleton(m.world_index("w_pq").unwrap()),
                WorldSet::singleton(m.world_index("w_pq'").unwrap())
            ]
        );
        // The agent's knowledge state at w_pq is {w_pq, w_pq'}.
        let sigma = m.sigma_by_label("a", "w_pq").unwrap();
        assert_eq!(sigma, [0usize, 1].into_iter().collect());
    }

    #[test]
    fn singleton_reflexive_model_builds() {
        let m = ModelBuilder::new("unit")
            .agents(["a"])
            .atoms(["p"])
            .world("w", &["p"])
            .sigma("a", "w", &[&["w"]])
            .build()
            .unwrap();
        assert_eq!(m.sigma_set(0, 0), WorldSet::singleton(0));
        let k = m.kripke_reduct();
        assert_eq!(k.successors(0, 0), WorldSet::singleton(0));
    }

    #[test]
    fn undeclared_world_in_sigma_is_rejected() {
        let err = ModelBuilder::new("bad")
            .agents(["a"])
            .atoms(["p"])
            .world("w", &["p"])
            .sigma("a", "w", &[&["v"]])
            .build()
            .unwrap_err();
        assert_eq!(
            err,
            ModelError::Unknown {
                kind: "world",
                name: "v".into()
            }
        );
    }

    #[test]
    fn empty_sigma_needs_allow_trivial() {
        let base = || {
            ModelBuilder::new("m")
                .agents(["a"])
                .atoms(["p"])
                .world("w", &[])
        };
        assert!(matches!(
            base().sigma("a", "w", &[]).build(),
            Err(ModelError::EmptySigma { .. })
        ));
        let m = base()
            .sigma("a", "w", &[])
            .allow_trivial(true)
            .build()
            .unwrap();
        assert!(m.state_map(0, 0).is_trivial());
        assert_eq!(m.sigma_set(0, 0), WorldSet::EMPTY);
        // An explicitly listed empty state is fine without the flag.
        let m2 = base().sigma("a", "w", &[&[]]).build().unwrap();
        assert!(m2.state_map(0, 0).is_trivial());
        // Union of singletons.
        let m3 = ModelBuilder::new("m3")
            .agents(["a"])
            .atoms([] as [&str; 0])
            .world("u", &[])
            .world("v", &[])
            .sigma("a", "u", &[&["u"], &["v"]])
            .sigma("a", "v", &[&["v"]])
            .build()
            .unwrap();
        assert_eq!(m3.sigma_set(0, 0), [0usize, 1].into_iter().collect());
    }

    #[test]
    fn trivial_families_give_an_empty_reduct() {
        let m = ModelBuilder::new("void")
            .agents(["a"])
            .atoms(["p"])
            .world("w", &["p"])
            .world("v", &[])
            .sigma("a", "w", &[&[]])
            .sigma("a", "v", &[&[]])
            .build()
            .unwrap();
        let k = m.kripke_reduct();
        for w in 0..2 {
            assert!(k.successors(0, w).is_empty());
        }
    }

    #[test]
    fn kripke_reduct_of_worked_model_has_two_classes() {
        let m = fixtures::knows_p_wonders_q();
        let k = m.kripke_reduct();
        let left: WorldSet = [0usize, 1].into_iter().collect();
        let right: WorldSet = [2usize, 3].into_iter().collect();
        for w in 0..2 {
            assert_eq!(k.successors(0, w), left);
        }
        for w in 2..4 {
            assert_eq!(k.successors(0, w), right);
        }
    }
}
