//! Synthesis of characteristic formulae for bounded-bisimilarity classes.
//!
//! The recursion works at the level of bisimilarity types rather than raw
//! worlds and states: a state's type at depth n is the set of world classes
//! it realizes, and a family's type is the set of its members' types. Since
//! the formula for a state depends only on its type, enumerating types
//! instead of subsets keeps the conjunct sets logically equivalent while
//! sharing every synthesized piece through per-type caches.

use std::collections::HashMap;

use crate::bisim::{compute_layers, Depth, LayeredWorldRelation};
use crate::formula::Formula;
use crate::inqstate::InqState;
use crate::model::{InqModel, Point, Pointed};
use crate::worldset::WorldSet;

pub const DEFAULT_DEPTH_CAP: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CharformError {
    #[error("requested depth {n} exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("point out of model")]
    BadPoint,
}

/// Builder context for one model: layered classes plus caches keyed by
/// class and type. Formulae produced by one synthesizer share structure.
pub struct Synthesizer<'m> {
    m: &'m InqModel,
    cap: usize,
    rel: LayeredWorldRelation,
    /// class[level][world] — canonical ids by first occurrence.
    class: Vec<Vec<u32>>,
    /// reps[level][class id] — least world of the class.
    reps: Vec<Vec<usize>>,
    world_cache: HashMap<(usize, u32), Formula>,
    state_cache: HashMap<(usize, u128), Formula>,
    family_cache: HashMap<(usize, Vec<u128>), Formula>,
}

impl<'m> Synthesizer<'m> {
    pub fn new(m: &'m InqModel) -> Synthesizer<'m> {
        Synthesizer::with_cap(m, DEFAULT_DEPTH_CAP)
    }

    pub fn with_cap(m: &'m InqModel, cap: usize) -> Synthesizer<'m> {
        let rel = compute_layers(m, m, Depth::Bounded(cap));
        let mut class = Vec::new();
        let mut reps = Vec::new();
        for level in 0..=cap {
            let layer = rel.at(level);
            let mut ids = vec![u32::MAX; m.world_count()];
            let mut rep = Vec::new();
            for w in 0..m.world_count() {
                if ids[w] == u32::MAX {
                    let id = rep.len() as u32;
                    ids[w] = id;
                    rep.push(w);
                    for v in layer[w].iter() {
                        if v > w && ids[v] == u32::MAX {
                            ids[v] = id;
                        }
                    }
                }
            }
            class.push(ids);
            reps.push(rep);
        }
        Synthesizer {
            m,
            cap,
            rel,
            class,
            reps,
            world_cache: HashMap::new(),
            state_cache: HashMap::new(),
            family_cache: HashMap::new(),
        }
    }

    pub fn relation(&self) -> &LayeredWorldRelation {
        &self.rel
    }

    fn check(&self, n: usize) -> Result<(), CharformError> {
        if n > self.cap {
            Err(CharformError::CapExceeded { n, cap: self.cap })
        } else {
            Ok(())
        }
    }

    /// The type of a state at a level: the set of world classes it meets.
    fn state_type(&self, level: usize, s: WorldSet) -> u128 {
        let mut mask = 0u128;
        for w in s.iter() {
            mask |= 1u128 << self.class[level][w];
        }
        mask
    }

    /// The member types of a family at a level: all subsets of the types of
    /// its maximal states, ascending.
    fn family_types(&self, level: usize, fam: &InqState) -> Vec<u128> {
        let mut types: Vec<u128> = Vec::new();
        for &mx in fam.maximal() {
            let top = self.state_type(level, mx);
            // Submask enumeration, ascending.
            let mut sub = 0u128;
            loop {
                types.push(sub);
                if sub == top {
                    break;
                }
                sub = sub.wrapping_sub(top) & top;
            }
        }
        types.sort_unstable();
        types.dedup();
        types
    }

    /// χ for a world at depth n: its class formula.
    pub fn chi_world(&mut self, w: usize, n: usize) -> Result<Formula, CharformError> {
        self.check(n)?;
        if w >= self.m.world_count() {
            return Err(CharformError::BadPoint);
        }
        Ok(self.world_formula(w, n))
    }

    fn world_formula(&mut self, w: usize, n: usize) -> Formula {
        let key = (n, self.class[n][w]);
        if let Some(f) = self.world_cache.get(&key) {
            return f.clone();
        }
        let out = if n == 0 {
            // Conjunction of literals in atom order.
            let lits = (0..self.m.atoms().len()).map(|p| {
                let atom = Formula::atom(&self.m.atoms()[p]);
                if self.m.valuation(p).contains(w) {
                    atom
                } else {
                    Formula::not(atom)
                }
            });
            Formula::conj(lits)
        } else {
            let d = n - 1;
            let mut parts = vec![self.world_formula(w, d)];
            for a in 0..self.m.agents().len() {
                let agent = self.m.agents()[a].to_string();
                let fam = self.m.state_map(a, w).clone();
                let realized = self.family_types(d, &fam);
                let whole = self.family_formula(d, &realized);
                parts.push(Formula::boxplus(&agent, whole));
                // Refute every proper sub-collection of the realized types
                // that is itself the type set of an inquisitive state: such
                // collections are downward closed (a non-closed collection's
                // formula is entailed by its closure, and would make χ
                // unsatisfiable) and contain the empty type (every family
                // holds ∅). A collection with fewer disjuncts entails one
                // with more, so dropping one maximal type at a time carries
                // all the others.
                for &t in &realized {
                    if t == 0 {
                        continue;
                    }
                    let dominated = realized.iter().any(|&u| u != t && t & u == t);
                    if dominated {
                        continue;
                    }
                    let sub: Vec<u128> = realized.iter().copied().filter(|&u| u != t).collect();
                    let f = self.family_formula(d, &sub);
                    parts.push(Formula::not(Formula::boxplus(&agent, f)));
                }
            }
            Formula::conj(parts)
        };
        self.world_cache.insert(key, out.clone());
        out
    }

    /// χ for an information state at depth n: the classical disjunction of
    /// its worlds' formulae, deduplicated by class.
    pub fn chi_state(&mut self, s: WorldSet, n: usize) -> Result<Formula, CharformError> {
        self.check(n)?;
        if !s.is_subset(self.m.all_worlds()) {
            return Err(CharformError::BadPoint);
        }
        let mask = self.state_type(n, s);
        Ok(self.state_formula(n, mask))
    }

    fn state_formula(&mut self, n: usize, mask: u128) -> Formula {
        if let Some(f) = self.state_cache.get(&(n, mask)) {
            return f.clone();
        }
        let mut parts = Vec::new();
        let mut bits = mask;
        while bits != 0 {
            let c = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rep = self.reps[n][c];
            parts.push(self.world_formula(rep, n));
        }
        let out = Formula::disj(parts);
        self.state_cache.insert((n, mask), out.clone());
        out
    }

    /// χ for an inquisitive state at depth n: the inquisitive disjunction of
    /// its members' formulae, deduplicated by type.
    pub fn chi_inqstate(&mut self, fam: &InqState, n: usize) -> Result<Formula, CharformError> {
        self.check(n)?;
        if !fam.union_all().is_subset(self.m.all_worlds()) {
            return Err(CharformError::BadPoint);
        }
        let types = self.family_types(n, fam);
        Ok(self.family_formula(n, &types))
    }

    fn family_formula(&mut self, n: usize, types: &[u128]) -> Formula {
        let key = (n, types.to_vec());
        if let Some(f) = self.family_cache.get(&key) {
            return f.clone();
        }
        let parts: Vec<Formula> = types.iter().map(|&t| self.state_formula(n, t)).collect();
        let out = Formula::idisj_all(parts);
        self.family_cache.insert(key, out.clone());
        out
    }
}

pub fn chi_world(m: &InqModel, w: usize, n: usize) -> Result<Formula, CharformError> {
    Synthesizer::new(m).chi_world(w, n)
}

pub fn chi_state(m: &InqModel, s: WorldSet, n: usize) -> Result<Formula, CharformError> {
    Synthesizer::new(m).chi_state(s, n)
}

pub fn chi_inqstate(m: &InqModel, fam: &InqState, n: usize) -> Result<Formula, CharformError> {
    Synthesizer::new(m).chi_inqstate(fam, n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    World,
    State,
}

/// The defining formula of a class of pointed models: the (classical or
/// inquisitive) disjunction of the representatives' formulae, deduplicated.
pub fn class_formula(
    reps: &[Pointed<'_>],
    n: usize,
    kind: ClassKind,
) -> Result<Formula, CharformError> {
    class_formula_with_cap(reps, n, kind, DEFAULT_DEPTH_CAP)
}

pub fn class_formula_with_cap(
    reps: &[Pointed<'_>],
    n: usize,
    kind: ClassKind,
    cap: usize,
) -> Result<Formula, CharformError> {
    if n > cap {
        return Err(CharformError::CapExceeded { n, cap });
    }
    let mut parts: Vec<Formula> = Vec::new();
    for p in reps {
        let mut synth = Synthesizer::with_cap(p.model, cap);
        let f = match (kind, p.point) {
            (ClassKind::World, Point::World(w)) => synth.chi_world(w, n)?,
            (ClassKind::State, point) => synth.chi_state(point.as_state(), n)?,
            (ClassKind::World, Point::State(_)) => return Err(CharformError::BadPoint),
        };
        if !parts.contains(&f) {
            parts.push(f);
        }
    }
    Ok(match kind {
        ClassKind::World => Formula::disj(parts),
        ClassKind::State => Formula::idisj_all(parts),
    })
}
