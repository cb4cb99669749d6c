//! Layered bisimulation relations and game transcripts.
//!
//! The layered relation Y_0 ⊇ Y_1 ⊇ … is the purely world-based form of the
//! back&forth systems: Y_0 relates atom-equivalent worlds and Y_{i+1} keeps
//! the pairs whose inquisitive states match under the lifting of Y_i. On
//! finite models the sequence stabilizes; the stable layer is full
//! bisimilarity.
//!
//! The world-to-state conditions quantify over every member of a downward
//! closed family, but both quantifiers reduce to the maximal antichain:
//! if a maximal state has a lifted match then so does each of its subsets
//! (restrict the match), and the candidate match for a state s inside a
//! maximal state m' can always be taken to be the set of worlds of m'
//! related to some world of s. `layer_agrees_with_naive_members` checks this
//! reduction against literal member-by-member enumeration.

use crate::inqstate::InqState;
use crate::model::{InqModel, Pointed};
use crate::worldset::WorldSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Depth {
    Bounded(usize),
    Full,
}

/// One layer, as a matrix: `rows[w]` is the set of worlds of the second
/// model related to world `w` of the first.
pub type Layer = Vec<WorldSet>;

/// The decreasing family Y_0 ⊇ Y_1 ⊇ … of world relations between two
/// models.
#[derive(Clone, Debug)]
pub struct LayeredWorldRelation {
    layers: Vec<Layer>,
    /// True when the last stored layer equals its refinement.
    stabilized: bool,
}

impl LayeredWorldRelation {
    /// The layer for depth `i`, clamped to the stable layer once reached.
    pub fn at(&self, i: usize) -> &Layer {
        if i < self.layers.len() {
            &self.layers[i]
        } else {
            debug_assert!(self.stabilized, "requested layer beyond computed depth");
            self.layers.last().expect("at least one layer")
        }
    }

    pub fn fixpoint(&self) -> &Layer {
        debug_assert!(self.stabilized);
        self.layers.last().expect("at least one layer")
    }

    pub fn depth_computed(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn stabilized(&self) -> bool {
        self.stabilized
    }

    pub fn related(&self, i: usize, w: usize, w2: usize) -> bool {
        self.at(i)[w].contains(w2)
    }

    /// The lifted relation between information states at layer `i`.
    pub fn lifted(&self, i: usize, s: WorldSet, s2: WorldSet) -> bool {
        lifted(self.at(i), s, s2)
    }
}

fn lifted(layer: &Layer, s: WorldSet, s2: WorldSet) -> bool {
    if s.iter().any(|u| layer[u].intersect(s2).is_empty()) {
        return false;
    }
    s2.iter().all(|u2| s.iter().any(|u| layer[u].contains(u2)))
}

/// Does the family `fam` have, for each of its members, a lifted match in
/// `fam2`? Both sides work on maximal antichains (see module docs).
fn family_forth(layer: &Layer, fam: &InqState, fam2: &InqState) -> bool {
    fam.maximal().iter().all(|&m| {
        let image = m.iter().fold(WorldSet::EMPTY, |acc, u| acc.union(layer[u]));
        fam2.maximal().iter().any(|&m2| {
            let candidate = m2.intersect(image);
            m.iter().all(|u| !layer[u].intersect(candidate).is_empty())
        })
    })
}

fn transpose(layer: &Layer, n2: usize) -> Layer {
    let mut t = vec![WorldSet::EMPTY; n2];
    for (w, row) in layer.iter().enumerate() {
        for w2 in row.iter() {
            t[w2].insert(w);
        }
    }
    t
}

/// Computes the layered world relation between two models, either to a fixed
/// depth or until the layers stabilize.
pub fn compute_layers(m: &InqModel, m2: &InqModel, depth: Depth) -> LayeredWorldRelation {
    let n = m.world_count();
    let n2 = m2.world_count();

    // Atom equivalence over the union of the two signatures.
    let mut atoms: Vec<String> = m.atoms().to_vec();
    for p in m2.atoms() {
        if !atoms.contains(p) {
            atoms.push(p.clone());
        }
    }
    let profile = |model: &InqModel, w: usize| -> u64 {
        let mut mask = 0u64;
        for (i, p) in atoms.iter().enumerate() {
            if let Some(ix) = model.atom_index(p) {
                if model.valuation(ix).contains(w) {
                    mask |= 1 << i;
                }
            }
        }
        mask
    };
    let profiles2: Vec<u64> = (0..n2).map(|w2| profile(m2, w2)).collect();
    let mut y0: Layer = vec![WorldSet::EMPTY; n];
    for (w, row) in y0.iter_mut().enumerate() {
        let pw = profile(m, w);
        for (w2, &p2) in profiles2.iter().enumerate() {
            if pw == p2 {
                row.insert(w2);
            }
        }
    }

    // Refinement quantifies over the union of the agent sets; an agent
    // missing on one side fails the back&forth for every pair.
    let mut agents: Vec<String> = m.agents().to_vec();
    for a in m2.agents() {
        if !agents.contains(a) {
            agents.push(a.clone());
        }
    }
    let agent_pairs: Vec<(Option<usize>, Option<usize>)> = agents
        .iter()
        .map(|a| (m.agent_index(a), m2.agent_index(a)))
        .collect();

    let refine = |y: &Layer| -> Layer {
        let yt = transpose(y, n2);
        let mut next = vec![WorldSet::EMPTY; n];
        for w in 0..n {
            'pair: for w2 in y[w].iter() {
                for &(a, a2) in &agent_pairs {
                    let (Some(a), Some(a2)) = (a, a2) else {
                        continue 'pair;
                    };
                    let fam = m.state_map(a, w);
                    let fam2 = m2.state_map(a2, w2);
                    if !family_forth(y, fam, fam2) {
                        continue 'pair;
                    }
                    // Backward direction through the transposed layer.
                    if !family_forth_rev(&yt, fam2, fam) {
                        continue 'pair;
                    }
                }
                next[w].insert(w2);
            }
        }
        next
    };

    let mut layers = vec![y0];
    let bound = match depth {
        Depth::Bounded(k) => Some(k),
        Depth::Full => None,
    };
    let stabilized = loop {
        if let Some(k) = bound {
            if layers.len() > k {
                // We may happen to have stabilized already.
                break layers.len() >= 2 && layers[layers.len() - 1] == layers[layers.len() - 2];
            }
        }
        let next = refine(layers.last().expect("non-empty"));
        if &next == layers.last().unwrap() {
            break true;
        }
        layers.push(next);
    };
    LayeredWorldRelation { layers, stabilized }
}

fn family_forth_rev(layer_t: &Layer, fam2: &InqState, fam: &InqState) -> bool {
    family_forth(layer_t, fam2, fam)
}

/// n-bisimilarity (or full bisimilarity) of two pointed models. A world
/// point is treated as its singleton state; the two notions coincide there.
pub fn equiv(p: Pointed<'_>, p2: Pointed<'_>, depth: Depth) -> bool {
    let rel = compute_layers(p.model, p2.model, depth);
    let layer = match depth {
        Depth::Bounded(k) => rel.at(k),
        Depth::Full => rel.fixpoint(),
    };
    lifted(layer, p.point.as_state(), p2.point.as_state())
}

// ---------------------------------------------------------------------------
// Distinguishing plays.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A winning strategy tree for the challenger, starting at a world position
/// that is not n-bisimilar. Every defender option is enumerated and refuted.
#[derive(Clone, Debug)]
pub enum Play {
    /// The current world pair already differs on an atom: loss at round 0.
    AtomicLoss {
        left: String,
        right: String,
        atom: String,
    },
    /// The challenger proposes a state on `side`; each defender response is
    /// listed with its refutation.
    StateMove {
        agent: String,
        side: Side,
        state: Vec<String>,
        responses: Vec<StateResponse>,
    },
}

#[derive(Clone, Debug)]
pub struct StateResponse {
    pub state: Vec<String>,
    pub next: WorldPhase,
}

#[derive(Clone, Debug)]
pub enum WorldPhase {
    /// The defender must pick from an empty state.
    Stuck {
        challenger_world: String,
        side: Side,
    },
    Move {
        side: Side,
        world: String,
        replies: Vec<(String, Play)>,
    },
}

#[derive(Clone, Debug)]
pub struct Transcript {
    pub rounds: usize,
    pub root: Play,
}

/// Searches the n-round game for a challenger win; `None` when the points
/// are n-bisimilar. The challenger always takes the lexicographically least
/// winning move (agent order, left before right, states/worlds ascending).
pub fn distinguishing_play(p: Pointed<'_>, p2: Pointed<'_>, n: usize) -> Option<Transcript> {
    let rel = compute_layers(p.model, p2.model, Depth::Bounded(n));
    let s = p.point.as_state();
    let s2 = p2.point.as_state();
    if rel.lifted(n, s, s2) {
        return None;
    }
    let ctx = PlayCtx {
        m: p.model,
        m2: p2.model,
        rel: &rel,
    };
    // A state-pointed start is one half-round: the challenger picks a world
    // in either state whose every reply fails at depth n.
    let root = match (p.point, p2.point) {
        (crate::model::Point::World(w), crate::model::Point::World(w2)) => ctx.world_play(w, w2, n),
        _ => {
            let (side, world) = ctx
                .losing_world_choice(s, s2, n)
                .expect("unlifted state pair has a winning world choice");
            let phase = ctx.world_phase(side, world, s, s2, n);
            Play::StateMove {
                agent: String::new(),
                side: Side::Left,
                state: ctx.labels(Side::Left, s),
                responses: vec![StateResponse {
                    state: ctx.labels(Side::Right, s2),
                    next: phase,
                }],
            }
        }
    };
    Some(Transcript { rounds: n, root })
}

struct PlayCtx<'a> {
    m: &'a InqModel,
    m2: &'a InqModel,
    rel: &'a LayeredWorldRelation,
}

impl<'a> PlayCtx<'a> {
    fn labels(&self, side: Side, s: WorldSet) -> Vec<String> {
        let model = match side {
            Side::Left => self.m,
            Side::Right => self.m2,
        };
        s.iter().map(|w| model.world_label(w).to_string()).collect()
    }

    /// Challenger's winning play from a world position with `i` rounds left;
    /// requires the pair to fail at layer `i`.
    fn world_play(&self, w: usize, w2: usize, i: usize) -> Play {
        debug_assert!(!self.rel.related(i, w, w2));
        if !self.rel.related(0, w, w2) {
            let atom = self.differing_atom(w, w2);
            return Play::AtomicLoss {
                left: self.m.world_label(w).to_string(),
                right: self.m2.world_label(w2).to_string(),
                atom,
            };
        }
        debug_assert!(i > 0);
        // Find the least winning state move: an agent and a maximal state on
        // one side with no lifted match among the opposite members.
        let mut agents: Vec<String> = self.m.agents().to_vec();
        for a in self.m2.agents() {
            if !agents.contains(a) {
                agents.push(a.clone());
            }
        }
        for agent in &agents {
            let (ia, ia2) = (self.m.agent_index(agent), self.m2.agent_index(agent));
            for side in [Side::Left, Side::Right] {
                let Some(play) = self.try_state_move(agent, side, ia, ia2, w, w2, i) else {
                    continue;
                };
                return play;
            }
        }
        unreachable!("pair fails layer {i} but no winning state move found");
    }

    fn try_state_move(
        &self,
        agent: &str,
        side: Side,
        ia: Option<usize>,
        ia2: Option<usize>,
        w: usize,
        w2: usize,
        i: usize,
    ) -> Option<Play> {
        // The family the challenger draws from, and the responding family.
        let (mine, theirs) = match side {
            Side::Left => (
                ia.map(|a| self.m.state_map(a, w)),
                ia2.map(|a| self.m2.state_map(a, w2)),
            ),
            Side::Right => (
                ia2.map(|a| self.m2.state_map(a, w2)),
                ia.map(|a| self.m.state_map(a, w)),
            ),
        };
        let mine = mine?;
        let their_members: Vec<WorldSet> = theirs?.members();
        let lifted_at = |s: WorldSet, s2: WorldSet| match side {
            Side::Left => self.rel.lifted(i - 1, s, s2),
            Side::Right => self.rel.lifted(i - 1, s2, s),
        };
        for &mv in mine.maximal() {
            if their_members.iter().any(|&resp| lifted_at(mv, resp)) {
                continue;
            }
            // Winning: refute every response.
            let responses = their_members
                .iter()
                .map(|&resp| {
                    let (sl, sr) = match side {
                        Side::Left => (mv, resp),
                        Side::Right => (resp, mv),
                    };
                    let (wside, world) = self
                        .losing_world_choice(sl, sr, i - 1)
                        .expect("unlifted response has a winning world choice");
                    StateResponse {
                        state: self.labels(side.flip(), resp),
                        next: self.world_phase(wside, world, sl, sr, i - 1),
                    }
                })
                .collect();
            return Some(Play::StateMove {
                agent: agent.to_string(),
                side,
                state: self.labels(side, mv),
                responses,
            });
        }
        None
    }

    /// From an unlifted state position (sl, sr), the least world choice all
    /// of whose replies fail at layer `i`.
    fn losing_world_choice(&self, sl: WorldSet, sr: WorldSet, i: usize) -> Option<(Side, usize)> {
        for u in sl.iter() {
            if self.rel.at(i)[u].intersect(sr).is_empty() {
                return Some((Side::Left, u));
            }
        }
        let yt = transpose(self.rel.at(i), self.m2.world_count());
        for u2 in sr.iter() {
            if yt[u2].intersect(sl).is_empty() {
                return Some((Side::Right, u2));
            }
        }
        None
    }

    fn world_phase(
        &self,
        side: Side,
        world: usize,
        sl: WorldSet,
        sr: WorldSet,
        i: usize,
    ) -> WorldPhase {
        let opposite = match side {
            Side::Left => sr,
            Side::Right => sl,
        };
        let model = match side {
            Side::Left => self.m,
            Side::Right => self.m2,
        };
        if opposite.is_empty() {
            return WorldPhase::Stuck {
                challenger_world: model.world_label(world).to_string(),
                side,
            };
        }
        let replies = opposite
            .iter()
            .map(|reply| {
                let (w, w2) = match side {
                    Side::Left => (world, reply),
                    Side::Right => (reply, world),
                };
                let label = match side {
                    Side::Left => self.m2.world_label(reply),
                    Side::Right => self.m.world_label(reply),
                };
                (label.to_string(), self.world_play(w, w2, i))
            })
            .collect();
        WorldPhase::Move {
            side,
            world: model.world_label(world).to_string(),
            replies,
        }
    }

    fn differing_atom(&self, w: usize, w2: usize) -> String {
        let mut atoms: Vec<String> = self.m.atoms().to_vec();
        for p in self.m2.atoms() {
            if !atoms.contains(p) {
                atoms.push(p.clone());
            }
        }
        for p in &atoms {
            let v1 = self
                .m
                .atom_index(p)
                .map(|i| self.m.valuation(i).contains(w))
                .unwrap_or(false);
            let v2 = self
                .m2
                .atom_index(p)
                .map(|i| self.m2.valuation(i).contains(w2))
                .unwrap_or(false);
            if v1 != v2 {
                return p.clone();
            }
        }
        unreachable!("atomically distinct pair expected")
    }
}

impl Transcript {
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_play(&self.root, 0, &mut out);
        out
    }
}

/// Replays a transcript against freshly computed layers: every node must sit
/// at a failing position, every defender option must be enumerated, and
/// every leaf must be an atomic discrepancy or a stuck defender.
pub fn verify_transcript(p: Pointed<'_>, p2: Pointed<'_>, t: &Transcript) -> Result<(), String> {
    let rel = compute_layers(p.model, p2.model, Depth::Bounded(t.rounds));
    let s = p.point.as_state();
    let s2 = p2.point.as_state();
    if rel.lifted(t.rounds, s, s2) {
        return Err("transcript exists but the points are equivalent".into());
    }
    match (p.point, p2.point) {
        (crate::model::Point::World(w), crate::model::Point::World(w2)) => {
            replay_play(p.model, p2.model, &rel, &t.root, w, w2, t.rounds)
        }
        _ => match &t.root {
            Play::StateMove { responses, .. } if responses.len() == 1 => {
                replay_world_phase(p.model, p2.model, &rel, &responses[0].next, s, s2, t.rounds)
            }
            _ => Err("state-pointed transcript must hold one world phase".into()),
        },
    }
}

fn resolve_state(model: &InqModel, labels: &[String]) -> Result<WorldSet, String> {
    labels
        .iter()
        .map(|l| {
            model
                .world_index(l)
                .ok_or_else(|| format!("unknown world `{l}` in transcript"))
        })
        .collect()
}

fn replay_play(
    m: &InqModel,
    m2: &InqModel,
    rel: &LayeredWorldRelation,
    play: &Play,
    w: usize,
    w2: usize,
    n: usize,
) -> Result<(), String> {
    if rel.related(n, w, w2) {
        return Err(format!(
            "transcript visits ({},{}) which is {n}-bisimilar",
            m.world_label(w),
            m2.world_label(w2)
        ));
    }
    match play {
        Play::AtomicLoss { atom, .. } => {
            let v1 = m
                .atom_index(atom)
                .map(|i| m.valuation(i).contains(w))
                .unwrap_or(false);
            let v2 = m2
                .atom_index(atom)
                .map(|i| m2.valuation(i).contains(w2))
                .unwrap_or(false);
            if v1 == v2 {
                return Err(format!(
                    "claimed atomic discrepancy on `{atom}` does not hold"
                ));
            }
            Ok(())
        }
        Play::StateMove {
            agent,
            side,
            state,
            responses,
        } => {
            if n == 0 {
                return Err("state move with no rounds left".into());
            }
            let (mover, opp, mover_w, opp_w) = match side {
                Side::Left => (m, m2, w, w2),
                Side::Right => (m2, m, w2, w),
            };
            let a_mover = mover
                .agent_index(agent)
                .ok_or_else(|| format!("unknown agent `{agent}`"))?;
            let a_opp = opp
                .agent_index(agent)
                .ok_or_else(|| format!("unknown agent `{agent}`"))?;
            let mv = resolve_state(mover, state)?;
            if !mover.state_map(a_mover, mover_w).contains(mv) {
                return Err("challenger state is not in the family".into());
            }
            let members = opp.state_map(a_opp, opp_w).members();
            if members.len() != responses.len() {
                return Err(format!(
                    "defender options not exhausted: {} responses for {} members",
                    responses.len(),
                    members.len()
                ));
            }
            for (resp, &member) in responses.iter().zip(&members) {
                if resolve_state(opp, &resp.state)? != member {
                    return Err("defender responses out of order".into());
                }
                let (sl, sr) = match side {
                    Side::Left => (mv, member),
                    Side::Right => (member, mv),
                };
                if rel.lifted(n - 1, sl, sr) {
                    return Err("a defender response is actually matching".into());
                }
                replay_world_phase(m, m2, rel, &resp.next, sl, sr, n - 1)?;
            }
            Ok(())
        }
    }
}

fn replay_world_phase(
    m: &InqModel,
    m2: &InqModel,
    rel: &LayeredWorldRelation,
    phase: &WorldPhase,
    sl: WorldSet,
    sr: WorldSet,
    n: usize,
) -> Result<(), String> {
    match phase {
        WorldPhase::Stuck { side, .. } => {
            let target = match side {
                Side::Left => sr,
                Side::Right => sl,
            };
            if !target.is_empty() {
                return Err("claimed stuck position but the defender has worlds".into());
            }
            Ok(())
        }
        WorldPhase::Move {
            side,
            world,
            replies,
        } => {
            let (wm, om) = match side {
                Side::Left => (m, m2),
                Side::Right => (m2, m),
            };
            let u = wm
                .world_index(world)
                .ok_or_else(|| format!("unknown world `{world}`"))?;
            let own = match side {
                Side::Left => sl,
                Side::Right => sr,
            };
            if !own.contains(u) {
                return Err("challenger world outside the chosen state".into());
            }
            let opposite = match side {
                Side::Left => sr,
                Side::Right => sl,
            };
            if opposite.len() != replies.len() {
                return Err("defender world options not exhausted".into());
            }
            for ((label, next), u2) in replies.iter().zip(opposite.iter()) {
                if om.world_index(label) != Some(u2) {
                    return Err("defender world replies out of order".into());
                }
                let (nw, nw2) = match side {
                    Side::Left => (u, u2),
                    Side::Right => (u2, u),
                };
                replay_play(m, m2, rel, next, nw, nw2, n)?;
            }
            Ok(())
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn set_text(labels: &[String]) -> String {
    format!("{{{}}}", labels.join(","))
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}

fn render_play(play: &Play, depth: usize, out: &mut String) {
    match play {
        Play::AtomicLoss { left, right, atom } => {
            indent(out, depth);
            out.push_str(&format!(
                "position ({left},{right}): atomic discrepancy on `{atom}`\n"
            ));
        }
        Play::StateMove {
            agent,
            side,
            state,
            responses,
        } => {
            indent(out, depth);
            if agent.is_empty() {
                out.push_str(&format!(
                    "start at state position ({},*)\n",
                    set_text(state)
                ));
            } else {
                out.push_str(&format!(
                    "I picks {} in Sigma_{agent} on the {} side\n",
                    set_text(state),
                    side_name(*side)
                ));
            }
            for resp in responses {
                indent(out, depth + 1);
                out.push_str(&format!("II answers {}\n", set_text(&resp.state)));
                match &resp.next {
                    WorldPhase::Stuck {
                        challenger_world,
                        side,
                    } => {
                        indent(out, depth + 2);
                        out.push_str(&format!(
                            "I picks world {challenger_world} on the {} side; II is stuck (empty state)\n",
                            side_name(*side)
                        ));
                    }
                    WorldPhase::Move {
                        side,
                        world,
                        replies,
                    } => {
                        indent(out, depth + 2);
                        out.push_str(&format!(
                            "I picks world {world} on the {} side\n",
                            side_name(*side)
                        ));
                        for (reply, next) in replies {
                            indent(out, depth + 3);
                            out.push_str(&format!("II replies {reply}\n"));
                            render_play(next, depth + 4, out);
                        }
                    }
                }
            }
        }
    }
}
