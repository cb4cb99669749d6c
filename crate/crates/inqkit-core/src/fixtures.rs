//! Small worked models used across tests, docs and the CLI examples.

use crate::model::{InqModel, ModelBuilder};

/// Single-agent epistemic model over atoms p, q with four worlds named by
/// their valuation (a trailing `'` marks the preceding atom false).
///
/// In the p-worlds the agent knows p, does not know whether q, and
/// entertains settling q: the maximal states of Σ split the knowledge state
/// {w_pq, w_pq'} into the two q-alternatives. In the ¬p-worlds the agent
/// knows ¬p and entertains no further issue: the single maximal state is the
/// whole knowledge state {w_p'q, w_p'q'}.
pub fn knows_p_wonders_q() -> InqModel {
    ModelBuilder::new("ex1")
        .agents(["a"])
        .atoms(["p", "q"])
        .world("w_pq", &["p", "q"])
        .world("w_pq'", &["p"])
        .world("w_p'q", &["q"])
        .world("w_p'q'", &[])
        .sigma("a", "w_pq", &[&["w_pq"], &["w_pq'"]])
        .sigma("a", "w_pq'", &[&["w_pq"], &["w_pq'"]])
        .sigma("a", "w_p'q", &[&["w_p'q", "w_p'q'"]])
        .sigma("a", "w_p'q'", &[&["w_p'q", "w_p'q'"]])
        .build()
        .expect("fixture is well-formed")
}

/// A pair of three-world models with identical universe W = {v,u,u'} and
/// valuation V(p) = {v}, differing only in the granularity of the constant
/// issue map: the first has maximal states {v},{u}, the second the single
/// maximal state {v,u}. They agree on every formula of classical
/// neighbourhood-style modal logic but are separated by `[+x]?p` and by one
/// round of the bisimulation game.
pub fn issue_granularity_pair() -> (InqModel, InqModel) {
    let base = |name: &str| {
        ModelBuilder::new(name)
            .agents(["x"])
            .atoms(["p"])
            .world("v", &["p"])
            .world("u", &[])
            .world("u'", &[])
    };
    let fine = |b: ModelBuilder, w: &str| b.sigma("x", w, &[&["v"], &["u"]]);
    let coarse = |b: ModelBuilder, w: &str| b.sigma("x", w, &[&["v", "u"]]);
    let mut b1 = base("m1");
    let mut b2 = base("m2");
    for w in ["v", "u", "u'"] {
        b1 = fine(b1, w);
        b2 = coarse(b2, w);
    }
    (
        b1.build().expect("fixture is well-formed"),
        b2.build().expect("fixture is well-formed"),
    )
}
