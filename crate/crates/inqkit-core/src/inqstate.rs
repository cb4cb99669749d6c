//! Downward-closed families of information states.
//!
//! An inquisitive state is a non-empty family of world sets closed under
//! subsets. We store only the maximal antichain; membership is "subset of
//! some maximal element". The denoted family always contains the empty set.

use crate::worldset::WorldSet;

/// A non-empty, downward-closed family of information states, stored by its
/// maximal antichain (sorted ascending, no element contained in another).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct InqState {
    maximal: Vec<WorldSet>,
}

impl InqState {
    /// The trivial family `{∅}`.
    pub fn trivial() -> InqState {
        InqState {
            maximal: vec![WorldSet::EMPTY],
        }
    }

    /// Normalizes an arbitrary collection of states into an antichain.
    /// An empty collection yields the trivial family `{∅}`.
    pub fn from_states<I: IntoIterator<Item = WorldSet>>(states: I) -> InqState {
        let mut sets: Vec<WorldSet> = states.into_iter().collect();
        sets.sort();
        sets.dedup();
        let mut maximal: Vec<WorldSet> = Vec::new();
        for (i, &s) in sets.iter().enumerate() {
            let dominated = sets[i + 1..].iter().any(|&t| s != t && s.is_subset(t));
            if !dominated {
                maximal.push(s);
            }
        }
        if maximal.is_empty() {
            return InqState::trivial();
        }
        InqState { maximal }
    }

    pub fn maximal(&self) -> &[WorldSet] {
        &self.maximal
    }

    /// Membership in the denoted downward closure.
    pub fn contains(&self, s: WorldSet) -> bool {
        self.maximal.iter().any(|&m| s.is_subset(m))
    }

    /// The union of the family, i.e. the induced accessibility set σ.
    pub fn union_all(&self) -> WorldSet {
        self.maximal
            .iter()
            .fold(WorldSet::EMPTY, |acc, &m| acc.union(m))
    }

    pub fn is_trivial(&self) -> bool {
        self.maximal.len() == 1 && self.maximal[0].is_empty()
    }

    /// Every member of the denoted family, deduplicated, ascending.
    pub fn members(&self) -> Vec<WorldSet> {
        let mut out: Vec<WorldSet> = Vec::new();
        for &m in &self.maximal {
            out.extend(m.subsets());
        }
        out.sort();
        out.dedup();
        out
    }

    /// Image of the family under a world map, renormalized.
    pub fn map_worlds<F: Fn(WorldSet) -> WorldSet>(&self, f: F) -> InqState {
        InqState::from_states(self.maximal.iter().map(|&m| f(m)))
    }
}

impl std::fmt::Debug for InqState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "↓{:?}", self.maximal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn ws(ids: &[usize]) -> WorldSet {
        ids.iter().copied().collect()
    }

    #[test]
    fn normalization_drops_dominated_states() {
        let fam = InqState::from_states([ws(&[0]), ws(&[0, 1]), ws(&[2]), WorldSet::EMPTY]);
        assert_eq!(fam.maximal(), &[ws(&[0, 1]), ws(&[2])]);
        assert!(fam.contains(ws(&[0])));
        assert!(fam.contains(WorldSet::EMPTY));
        assert!(!fam.contains(ws(&[0, 2])));
        assert_eq!(fam.union_all(), ws(&[0, 1, 2]));
    }

    #[test]
    fn empty_input_is_trivial_family() {
        let fam = InqState::from_states([]);
        assert!(fam.is_trivial());
        assert!(fam.contains(WorldSet::EMPTY));
        assert_eq!(fam.union_all(), WorldSet::EMPTY);
        assert_eq!(fam.members(), vec![WorldSet::EMPTY]);
    }

    // Membership through the antichain must agree with the naive downward
    // closure computed by exhaustive subset enumeration.
    #[test]
    fn antichain_membership_matches_naive_closure() {
        let gens = [ws(&[0, 1, 3]), ws(&[1, 2]), ws(&[4])];
        let fam = InqState::from_states(gens);
        let mut naive: BTreeSet<WorldSet> = BTreeSet::new();
        for g in gens {
            naive.extend(g.subsets());
        }
        for s in ws(&[0, 1, 2, 3, 4]).subsets() {
            assert_eq!(fam.contains(s), naive.contains(&s));
        }
        assert_eq!(fam.members(), naive.into_iter().collect::<Vec<_>>());
    }
}
