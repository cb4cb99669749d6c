//! Support and truth evaluation.
//!
//! Support at an information state is the primary notion; truth at a world
//! is support at the singleton. The implication clause enumerates all
//! subsets of the current state and the ⊞ clause all members of the
//! inquisitive state, so evaluation is exponential in the state size;
//! a per-query memo table keyed by (subformula, state) keeps it workable
//! for the model sizes this crate targets.

use std::collections::HashMap;

use crate::formula::{Formula, Node};
use crate::model::{InqModel, KripkeModel};
use crate::worldset::WorldSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("formula mentions {kind} `{name}` not declared in model `{model}`")]
    SignatureMismatch {
        kind: &'static str,
        name: String,
        model: String,
    },
    #[error("state {0:?} mentions worlds outside the model")]
    StateOutOfModel(WorldSet),
    #[error("world index {0} out of range")]
    WorldOutOfRange(usize),
    #[error("formula contains an inquisitive disjunction or ⊞, outside standard Kripke semantics")]
    NotKripkeFragment,
    #[error("model has {worlds} worlds, over the brute-force cap of {cap}")]
    CapExceeded { worlds: usize, cap: usize },
}

/// Default cap on |W| for the 2^|W| truth-conditionality sweep.
pub const DEFAULT_FLATNESS_CAP: usize = 12;

#[derive(Clone, Copy)]
enum RNode {
    Atom(usize),
    Bottom,
    And(usize, usize),
    Implies(usize, usize),
    Idisj(usize, usize),
    Box(usize, usize),
    BoxPlus(usize, usize),
}

/// A formula resolved against one model, with query memoization.
///
/// The memo lives as long as the evaluator; concurrent queries should use
/// separate evaluators (construction is cheap).
pub struct Evaluator<'m> {
    m: &'m InqModel,
    nodes: Vec<RNode>,
    /// Syntactic flatness certificate per node (truth-conditional by shape).
    flat: Vec<bool>,
    root: usize,
    memo: Vec<HashMap<u128, bool>>,
    /// Lazily computed member lists of Σ_a(w).
    members: Vec<Vec<Option<Vec<WorldSet>>>>,
}

impl<'m> Evaluator<'m> {
    pub fn new(m: &'m InqModel, f: &Formula) -> Result<Evaluator<'m>, SemanticsError> {
        let mut nodes = Vec::new();
        let mut flat = Vec::new();
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let root = resolve(m, f, &mut nodes, &mut flat, &mut seen)?;
        let memo = (0..nodes.len()).map(|_| HashMap::new()).collect();
        Ok(Evaluator {
            m,
            nodes,
            flat,
            root,
            memo,
            members: vec![vec![None; m.world_count()]; m.agents().len()],
        })
    }

    pub fn supports(&mut self, s: WorldSet) -> Result<bool, SemanticsError> {
        if !s.is_subset(self.m.all_worlds()) {
            return Err(SemanticsError::StateOutOfModel(s));
        }
        Ok(self.eval(self.root, s))
    }

    pub fn truth(&mut self, w: usize) -> Result<bool, SemanticsError> {
        if w >= self.m.world_count() {
            return Err(SemanticsError::WorldOutOfRange(w));
        }
        Ok(self.eval(self.root, WorldSet::singleton(w)))
    }

    fn sigma_members(&mut self, a: usize, w: usize) -> Vec<WorldSet> {
        if self.members[a][w].is_none() {
            self.members[a][w] = Some(self.m.state_map(a, w).members());
        }
        self.members[a][w].clone().unwrap()
    }

    fn eval(&mut self, id: usize, s: WorldSet) -> bool {
        if let Some(&v) = self.memo[id].get(&s.bits()) {
            return v;
        }
        let v = match self.nodes[id] {
            RNode::Atom(p) => s.is_subset(self.m.valuation(p)),
            RNode::Bottom => s.is_empty(),
            RNode::And(a, b) => self.eval(a, s) && self.eval(b, s),
            RNode::Idisj(a, b) => self.eval(a, s) || self.eval(b, s),
            RNode::Implies(a, b) => {
                if self.flat[a] && self.flat[b] {
                    // Flat arguments: only the set of antecedent worlds matters.
                    let t: WorldSet = s
                        .iter()
                        .filter(|&w| self.eval(a, WorldSet::singleton(w)))
                        .collect();
                    self.eval(b, t)
                } else {
                    s.subsets().all(|t| !self.eval(a, t) || self.eval(b, t))
                }
            }
            RNode::Box(ag, g) => s.iter().all(|w| {
                let sig = self.m.sigma_set(ag, w);
                self.eval(g, sig)
            }),
            RNode::BoxPlus(ag, g) => s.iter().all(|w| {
                self.sigma_members(ag, w)
                    .into_iter()
                    .all(|t| self.eval(g, t))
            }),
        };
        self.memo[id].insert(s.bits(), v);
        v
    }
}

fn resolve(
    m: &InqModel,
    f: &Formula,
    nodes: &mut Vec<RNode>,
    flat: &mut Vec<bool>,
    seen: &mut HashMap<usize, usize>,
) -> Result<usize, SemanticsError> {
    if let Some(&id) = seen.get(&f.key()) {
        return Ok(id);
    }
    let missing = |kind: &'static str, name: &str| SemanticsError::SignatureMismatch {
        kind,
        name: name.to_string(),
        model: m.name.clone(),
    };
    let (node, is_flat) = match f.node() {
        Node::Atom(p) => {
            let i = m.atom_index(p).ok_or_else(|| missing("atom", p))?;
            (RNode::Atom(i), true)
        }
        Node::Bottom => (RNode::Bottom, true),
        Node::And(a, b) => {
            let x = resolve(m, a, nodes, flat, seen)?;
            let y = resolve(m, b, nodes, flat, seen)?;
            (RNode::And(x, y), flat[x] && flat[y])
        }
        Node::Implies(a, b) => {
            let x = resolve(m, a, nodes, flat, seen)?;
            let y = resolve(m, b, nodes, flat, seen)?;
            (RNode::Implies(x, y), flat[x] && flat[y])
        }
        Node::Idisj(a, b) => {
            let x = resolve(m, a, nodes, flat, seen)?;
            let y = resolve(m, b, nodes, flat, seen)?;
            (RNode::Idisj(x, y), false)
        }
        Node::Box(ag, g) => {
            let a = m.agent_index(ag).ok_or_else(|| missing("agent", ag))?;
            let x = resolve(m, g, nodes, flat, seen)?;
            (RNode::Box(a, x), true)
        }
        Node::BoxPlus(ag, g) => {
            let a = m.agent_index(ag).ok_or_else(|| missing("agent", ag))?;
            let x = resolve(m, g, nodes, flat, seen)?;
            (RNode::BoxPlus(a, x), true)
        }
    };
    nodes.push(node);
    flat.push(is_flat);
    let id = nodes.len() - 1;
    seen.insert(f.key(), id);
    Ok(id)
}

/// M,s ⊨ φ.
pub fn supports(m: &InqModel, s: WorldSet, f: &Formula) -> Result<bool, SemanticsError> {
    Evaluator::new(m, f)?.supports(s)
}

/// M,w ⊨ φ, i.e. support at the singleton state.
pub fn truth(m: &InqModel, w: usize, f: &Formula) -> Result<bool, SemanticsError> {
    Evaluator::new(m, f)?.truth(w)
}

/// Brute-force flatness over this model: support equals worldwise truth on
/// all 2^|W| states. Model-relative by necessity; a pass is evidence, not a
/// proof of flatness over all models.
pub fn is_truth_conditional(m: &InqModel, f: &Formula) -> Result<bool, SemanticsError> {
    is_truth_conditional_capped(m, f, DEFAULT_FLATNESS_CAP)
}

pub fn is_truth_conditional_capped(
    m: &InqModel,
    f: &Formula,
    cap: usize,
) -> Result<bool, SemanticsError> {
    if m.world_count() > cap {
        return Err(SemanticsError::CapExceeded {
            worlds: m.world_count(),
            cap,
        });
    }
    let mut ev = Evaluator::new(m, f)?;
    let truths: Vec<bool> = (0..m.world_count())
        .map(|w| ev.eval(ev.root, WorldSet::singleton(w)))
        .collect();
    for s in m.all_worlds().subsets() {
        let pointwise = s.iter().all(|w| truths[w]);
        if ev.eval(ev.root, s) != pointwise {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Standard Kripke evaluation of a ⫾-free, ⊞-free formula.
pub fn kripke_truth(k: &KripkeModel, w: usize, f: &Formula) -> Result<bool, SemanticsError> {
    if !f.is_kripke_fragment() {
        return Err(SemanticsError::NotKripkeFragment);
    }
    if w >= k.worlds.len() {
        return Err(SemanticsError::WorldOutOfRange(w));
    }
    fn go(k: &KripkeModel, w: usize, f: &Formula) -> Result<bool, SemanticsError> {
        let missing = |kind: &'static str, name: &str| SemanticsError::SignatureMismatch {
            kind,
            name: name.to_string(),
            model: k.name.clone(),
        };
        Ok(match f.node() {
            Node::Atom(p) => {
                let i = k
                    .atoms
                    .iter()
                    .position(|a| a == p.as_ref())
                    .ok_or_else(|| missing("atom", p))?;
                k.valuation[i].contains(w)
            }
            Node::Bottom => false,
            Node::And(a, b) => go(k, w, a)? && go(k, w, b)?,
            Node::Implies(a, b) => !go(k, w, a)? || go(k, w, b)?,
            Node::Idisj(_, _) | Node::BoxPlus(_, _) => {
                return Err(SemanticsError::NotKripkeFragment)
            }
            Node::Box(ag, g) => {
                let a = k
                    .agents
                    .iter()
                    .position(|x| x == ag.as_ref())
                    .ok_or_else(|| missing("agent", ag))?;
                let mut ok = true;
                for v in k.successors(a, w).iter() {
                    if !go(k, v, g)? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
        })
    }
    go(k, w, f)
}
