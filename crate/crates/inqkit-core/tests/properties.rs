//! Property tests for the representation invariants: parser/printer round
//! trips on random core ASTs and antichain semantics of the state families.

use std::collections::BTreeSet;

use proptest::prelude::*;

use inqkit_core::formula::parse;
use inqkit_core::{Formula, InqState, WorldSet};

fn formula_strategy() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::bottom()),
        prop_oneof![Just("p"), Just("q"), Just("r")].prop_map(Formula::atom),
    ];
    leaf.prop_recursive(5, 64, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::idisj(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::question),
            (prop_oneof![Just("a"), Just("b")], inner.clone())
                .prop_map(|(ag, f)| Formula::boxm(ag, f)),
            (prop_oneof![Just("a"), Just("b")], inner).prop_map(|(ag, f)| Formula::boxplus(ag, f)),
        ]
    })
}

proptest! {
    // Printing then parsing is the identity on core ASTs, across every
    // sugar-folding path of the printer.
    #[test]
    fn print_parse_round_trip(f in formula_strategy()) {
        let printed = f.to_string();
        let back = parse(&printed).unwrap();
        prop_assert_eq!(back, f.clone(), "printed as {}", printed);
    }

    // Negation sugar never changes modal depth.
    #[test]
    fn negation_preserves_modal_depth(f in formula_strategy()) {
        prop_assert_eq!(Formula::not(f.clone()).modal_depth(), f.modal_depth());
    }

    // The antichain representation denotes exactly the downward closure of
    // the generating states.
    #[test]
    fn antichain_matches_naive_downward_closure(
        gens in proptest::collection::vec(0u128..(1 << 7), 0..5)
    ) {
        let fam = InqState::from_states(gens.iter().map(|&b| WorldSet::from_bits(b)));
        let mut naive: BTreeSet<u128> = BTreeSet::new();
        for &g in &gens {
            for t in WorldSet::from_bits(g).subsets() {
                naive.insert(t.bits());
            }
        }
        naive.insert(0);
        for bits in 0u128..(1 << 7) {
            prop_assert_eq!(
                fam.contains(WorldSet::from_bits(bits)),
                naive.contains(&bits)
            );
        }
        // The antichain is strict: no element contains another.
        let maxima = fam.maximal();
        for (i, &a) in maxima.iter().enumerate() {
            for (j, &b) in maxima.iter().enumerate() {
                if i != j {
                    prop_assert!(!a.is_subset(b));
                }
            }
        }
    }
}
