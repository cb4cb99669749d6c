//! Deterministic random model and formula generators.
//!
//! Used by the randomized test sweeps; seeded explicitly so every run is
//! reproducible. The generator is a SplitMix64.

use crate::inqstate::InqState;
use crate::model::InqModel;
use crate::worldset::WorldSet;
use crate::Formula;

pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in 0..n.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    pub fn chance(&mut self, num: u32, den: u32) -> bool {
        (self.next_u64() % den as u64) < num as u64
    }

    /// A uniformly random subset of `universe`.
    pub fn subset(&mut self, universe: WorldSet) -> WorldSet {
        universe.iter().filter(|_| self.chance(1, 2)).collect()
    }

    /// A random nonempty subset of `universe` (which must be nonempty).
    pub fn nonempty_subset(&mut self, universe: WorldSet) -> WorldSet {
        loop {
            let s = self.subset(universe);
            if !s.is_empty() {
                return s;
            }
        }
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A random plain inquisitive model with exactly `worlds` worlds. Each Σ is
/// generated from one to three random maximal states; occasionally a trivial
/// {∅} family appears, exercising the empty-σ corner.
pub fn random_model(rng: &mut Rng, worlds: usize, atoms: usize, agents: usize) -> InqModel {
    let universe = WorldSet::full(worlds);
    let valuation = (0..atoms).map(|_| rng.subset(universe)).collect();
    let sigma = (0..agents)
        .map(|_| {
            (0..worlds)
                .map(|_| {
                    if rng.chance(1, 12) {
                        InqState::trivial()
                    } else {
                        let k = 1 + rng.below(3);
                        InqState::from_states((0..k).map(|_| rng.nonempty_subset(universe)))
                    }
                })
                .collect()
        })
        .collect();
    InqModel::new(
        format!("rnd{}", rng.next_u64() % 100000),
        names("w", worlds),
        names("a", agents),
        names("p", atoms),
        sigma,
        valuation,
    )
}

/// A random inquisitive epistemic (S5) model: for each agent a random
/// partition into classes, with a constant family on each class whose union
/// is the class.
pub fn random_s5_model(rng: &mut Rng, worlds: usize, atoms: usize, agents: usize) -> InqModel {
    let universe = WorldSet::full(worlds);
    let valuation: Vec<WorldSet> = (0..atoms).map(|_| rng.subset(universe)).collect();
    let mut sigma = Vec::new();
    for _ in 0..agents {
        // Random partition: assign each world one of up to `worlds` blocks.
        let block_count = 1 + rng.below(worlds);
        let blocks: Vec<usize> = (0..worlds).map(|_| rng.below(block_count)).collect();
        let mut classes: Vec<WorldSet> = Vec::new();
        for b in 0..block_count {
            let class: WorldSet = (0..worlds).filter(|&w| blocks[w] == b).collect();
            if !class.is_empty() {
                classes.push(class);
            }
        }
        let mut row: Vec<Option<InqState>> = vec![None; worlds];
        for class in classes {
            // One to three maximal states inside the class, patched so the
            // union covers the class (factivity).
            let k = 1 + rng.below(3);
            let mut states: Vec<WorldSet> = (0..k).map(|_| rng.nonempty_subset(class)).collect();
            let covered = states.iter().fold(WorldSet::EMPTY, |acc, &s| acc.union(s));
            for w in class.difference(covered).iter() {
                states.push(WorldSet::singleton(w));
            }
            let fam = InqState::from_states(states);
            for w in class.iter() {
                row[w] = Some(fam.clone());
            }
        }
        sigma.push(row.into_iter().map(|s| s.unwrap()).collect());
    }
    InqModel::new(
        format!("s5rnd{}", rng.next_u64() % 100000),
        names("w", worlds),
        names("a", agents),
        names("p", atoms),
        sigma,
        valuation,
    )
}

/// A random formula of modal depth at most `depth` over the given signature.
pub fn random_formula(rng: &mut Rng, depth: usize, atoms: &[String], agents: &[String]) -> Formula {
    let leaf = |rng: &mut Rng| {
        if atoms.is_empty() || rng.chance(1, 8) {
            Formula::bottom()
        } else {
            Formula::atom(&atoms[rng.below(atoms.len())])
        }
    };
    if depth == 0 {
        // Propositional shapes only.
        return match rng.below(6) {
            0 => leaf(rng),
            1 => Formula::and(random_formula(rng, 0, atoms, agents), leaf(rng)),
            2 => Formula::implies(random_formula(rng, 0, atoms, agents), leaf(rng)),
            3 => Formula::idisj(leaf(rng), leaf(rng)),
            4 => Formula::question(leaf(rng)),
            _ => Formula::not(leaf(rng)),
        };
    }
    match rng.below(8) {
        0 => leaf(rng),
        1 => Formula::and(
            random_formula(rng, depth, atoms, agents),
            random_formula(rng, depth.saturating_sub(1), atoms, agents),
        ),
        2 => Formula::implies(
            random_formula(rng, depth.saturating_sub(1), atoms, agents),
            random_formula(rng, depth, atoms, agents),
        ),
        3 => Formula::idisj(
            random_formula(rng, depth, atoms, agents),
            random_formula(rng, depth.saturating_sub(1), atoms, agents),
        ),
        4 => Formula::question(random_formula(rng, depth.saturating_sub(1), atoms, agents)),
        _ => {
            let a = &agents[rng.below(agents.len())];
            let inner = random_formula(rng, depth - 1, atoms, agents);
            if rng.chance(1, 2) {
                Formula::boxm(a, inner)
            } else {
                Formula::boxplus(a, inner)
            }
        }
    }
}

/// A random ⫾-free, ⊞-free formula (the standard Kripke fragment).
pub fn random_kripke_formula(
    rng: &mut Rng,
    depth: usize,
    atoms: &[String],
    agents: &[String],
) -> Formula {
    let leaf = |rng: &mut Rng| {
        if atoms.is_empty() || rng.chance(1, 8) {
            Formula::bottom()
        } else {
            Formula::atom(&atoms[rng.below(atoms.len())])
        }
    };
    if depth == 0 {
        return match rng.below(4) {
            0 => leaf(rng),
            1 => Formula::and(random_kripke_formula(rng, 0, atoms, agents), leaf(rng)),
            2 => Formula::implies(random_kripke_formula(rng, 0, atoms, agents), leaf(rng)),
            _ => Formula::not(leaf(rng)),
        };
    }
    match rng.below(6) {
        0 => leaf(rng),
        1 => Formula::and(
            random_kripke_formula(rng, depth, atoms, agents),
            random_kripke_formula(rng, depth - 1, atoms, agents),
        ),
        2 => Formula::implies(
            random_kripke_formula(rng, depth - 1, atoms, agents),
            random_kripke_formula(rng, depth, atoms, agents),
        ),
        3 => Formula::not(random_kripke_formula(rng, depth - 1, atoms, agents)),
        _ => {
            let a = &agents[rng.below(agents.len())];
            Formula::boxm(a, random_kripke_formula(rng, depth - 1, atoms, agents))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_a_seed() {
        let mut r1 = Rng::new(42);
        let mut r2 = Rng::new(42);
        let m1 = random_model(&mut r1, 4, 2, 2);
        let m2 = random_model(&mut r2, 4, 2, 2);
        assert_eq!(m1, m2);
    }

    #[test]
    fn s5_models_satisfy_the_s5_validator() {
        let mut rng = Rng::new(99);
        for _ in 0..50 {
            let m = random_s5_model(&mut rng, 5, 2, 2);
            let report = crate::epistemic::s5_report(&m);
            assert!(report.pass(), "{report}\n{m:?}");
        }
    }

    #[test]
    fn kripke_formulas_stay_in_fragment() {
        let mut rng = Rng::new(5);
        let atoms = vec!["p".to_string()];
        let agents = vec!["a".to_string()];
        for _ in 0..50 {
            let f = random_kripke_formula(&mut rng, 2, &atoms, &agents);
            assert!(f.is_kripke_fragment());
            assert!(f.modal_depth() <= 2);
        }
    }

    #[test]
    fn random_formula_respects_depth() {
        let mut rng = Rng::new(6);
        let atoms = vec!["p".to_string(), "q".to_string()];
        let agents = vec!["a".to_string()];
        for _ in 0..100 {
            let f = random_formula(&mut rng, 2, &atoms, &agents);
            assert!(f.modal_depth() <= 2);
        }
    }
}
