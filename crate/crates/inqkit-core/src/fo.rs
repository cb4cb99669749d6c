//! Two-sorted first-order logic over the relational signature: syntax, the
//! standard translation, a finite Tarskian evaluator, a brute-force
//! Ehrenfeucht–Fraïssé game, and Gaifman neighbourhoods.
//!
//! The defined predicates `s ⊆ t` and `e(w,t)` (the graph of σ) are expanded
//! eagerly at construction; quantifier rank is measured post-expansion.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::formula::{Formula, Node};
use crate::relational::Structure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    World,
    State,
}

/// A sorted variable; display names are `w{id}` and `s{id}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub sort: Sort,
    pub id: u32,
}

impl Var {
    fn name(self) -> String {
        match self.sort {
            Sort::World => format!("w{}", self.id),
            Sort::State => format!("s{}", self.id),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FOFormula {
    Bottom,
    /// P_i(w)
    Pred(String, Var),
    /// ε(w, s)
    Eps(Var, Var),
    /// E_a(w, s)
    Edge(String, Var, Var),
    /// Equality within one sort.
    Eq(Var, Var),
    Not(Box<FOFormula>),
    And(Box<FOFormula>, Box<FOFormula>),
    Or(Box<FOFormula>, Box<FOFormula>),
    Implies(Box<FOFormula>, Box<FOFormula>),
    Iff(Box<FOFormula>, Box<FOFormula>),
    Forall(Var, Box<FOFormula>),
    Exists(Var, Box<FOFormula>),
}

impl FOFormula {
    pub fn quantifier_rank(&self) -> usize {
        match self {
            FOFormula::Bottom
            | FOFormula::Pred(_, _)
            | FOFormula::Eps(_, _)
            | FOFormula::Edge(_, _, _)
            | FOFormula::Eq(_, _) => 0,
            FOFormula::Not(a) => a.quantifier_rank(),
            FOFormula::And(a, b)
            | FOFormula::Or(a, b)
            | FOFormula::Implies(a, b)
            | FOFormula::Iff(a, b) => a.quantifier_rank().max(b.quantifier_rank()),
            FOFormula::Forall(_, a) | FOFormula::Exists(_, a) => 1 + a.quantifier_rank(),
        }
    }

    pub fn free_vars(&self) -> Vec<Var> {
        fn go(f: &FOFormula, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
            let touch = |v: Var, bound: &Vec<Var>, out: &mut Vec<Var>| {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            };
            match f {
                FOFormula::Bottom => {}
                FOFormula::Pred(_, v) => touch(*v, bound, out),
                FOFormula::Eps(a, b) | FOFormula::Edge(_, a, b) | FOFormula::Eq(a, b) => {
                    touch(*a, bound, out);
                    touch(*b, bound, out);
                }
                FOFormula::Not(a) => go(a, bound, out),
                FOFormula::And(a, b)
                | FOFormula::Or(a, b)
                | FOFormula::Implies(a, b)
                | FOFormula::Iff(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                FOFormula::Forall(v, a) | FOFormula::Exists(v, a) => {
                    bound.push(*v);
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// S-expression rendering, also accepted back by [`parse_fo`].
    pub fn to_sexp(&self) -> String {
        match self {
            FOFormula::Bottom => "(bot)".into(),
            FOFormula::Pred(p, w) => format!("(P {p} {})", w.name()),
            FOFormula::Eps(w, s) => format!("(eps {} {})", w.name(), s.name()),
            FOFormula::Edge(a, w, s) => format!("(E {a} {} {})", w.name(), s.name()),
            FOFormula::Eq(a, b) => format!("(= {} {})", a.name(), b.name()),
            FOFormula::Not(a) => format!("(not {})", a.to_sexp()),
            FOFormula::And(a, b) => format!("(and {} {})", a.to_sexp(), b.to_sexp()),
            FOFormula::Or(a, b) => format!("(or {} {})", a.to_sexp(), b.to_sexp()),
            FOFormula::Implies(a, b) => format!("(-> {} {})", a.to_sexp(), b.to_sexp()),
            FOFormula::Iff(a, b) => format!("(<-> {} {})", a.to_sexp(), b.to_sexp()),
            FOFormula::Forall(v, a) => format!("(forall {} {})", v.name(), a.to_sexp()),
            FOFormula::Exists(v, a) => format!("(exists {} {})", v.name(), a.to_sexp()),
        }
    }
}

fn forall(v: Var, f: FOFormula) -> FOFormula {
    FOFormula::Forall(v, Box::new(f))
}

fn exists(v: Var, f: FOFormula) -> FOFormula {
    FOFormula::Exists(v, Box::new(f))
}

fn implies(a: FOFormula, b: FOFormula) -> FOFormula {
    FOFormula::Implies(Box::new(a), Box::new(b))
}

/// s ⊆ t, expanded: ∀w (ε(w,s) → ε(w,t)).
fn subseteq(s: Var, t: Var, fresh: &mut u32) -> FOFormula {
    let w = Var {
        sort: Sort::World,
        id: next(fresh),
    };
    forall(w, implies(FOFormula::Eps(w, s), FOFormula::Eps(w, t)))
}

/// e_a(w,t): t is exactly σ_a(w), expanded:
/// ∀v (ε(v,t) ↔ ∃s (E_a(w,s) ∧ ε(v,s))).
fn sigma_graph(agent: &str, w: Var, t: Var, fresh: &mut u32) -> FOFormula {
    let v = Var {
        sort: Sort::World,
        id: next(fresh),
    };
    let s = Var {
        sort: Sort::State,
        id: next(fresh),
    };
    forall(
        v,
        FOFormula::Iff(
            Box::new(FOFormula::Eps(v, t)),
            Box::new(exists(
                s,
                FOFormula::And(
                    Box::new(FOFormula::Edge(agent.to_string(), w, s)),
                    Box::new(FOFormula::Eps(v, s)),
                ),
            )),
        ),
    )
}

fn next(fresh: &mut u32) -> u32 {
    *fresh += 1;
    *fresh
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TranslationMode {
    World,
    State,
}

/// The free variable of a translation: `w0` in world mode, `s0` in state
/// mode.
pub fn free_var(mode: TranslationMode) -> Var {
    match mode {
        TranslationMode::World => Var {
            sort: Sort::World,
            id: 0,
        },
        TranslationMode::State => Var {
            sort: Sort::State,
            id: 0,
        },
    }
}

/// The standard translation into two-sorted first-order logic.
pub fn standard_translate(f: &Formula, mode: TranslationMode) -> FOFormula {
    let mut fresh = 0u32;
    match mode {
        TranslationMode::World => st_world(f, free_var(mode), &mut fresh),
        TranslationMode::State => st_state(f, free_var(mode), &mut fresh),
    }
}

fn st_world(f: &Formula, w: Var, fresh: &mut u32) -> FOFormula {
    match f.node() {
        Node::Atom(p) => FOFormula::Pred(p.to_string(), w),
        Node::Bottom => FOFormula::Bottom,
        Node::And(a, b) => FOFormula::And(
            Box::new(st_world(a, w, fresh)),
            Box::new(st_world(b, w, fresh)),
        ),
        Node::Idisj(a, b) => FOFormula::Or(
            Box::new(st_world(a, w, fresh)),
            Box::new(st_world(b, w, fresh)),
        ),
        Node::Implies(a, b) => implies(st_world(a, w, fresh), st_world(b, w, fresh)),
        Node::BoxPlus(agent, g) => {
            let s = Var {
                sort: Sort::State,
                id: next(fresh),
            };
            forall(
                s,
                implies(
                    FOFormula::Edge(agent.to_string(), w, s),
                    st_state(g, s, fresh),
                ),
            )
        }
        Node::Box(agent, g) => {
            let s = Var {
                sort: Sort::State,
                id: next(fresh),
            };
            forall(
                s,
                implies(sigma_graph(agent, w, s, fresh), st_state(g, s, fresh)),
            )
        }
    }
}

fn st_state(f: &Formula, s: Var, fresh: &mut u32) -> FOFormula {
    let worldwise = |inner: FOFormula, w: Var| forall(w, implies(FOFormula::Eps(w, s), inner));
    match f.node() {
        Node::Atom(p) => {
            let w = Var {
                sort: Sort::World,
                id: next(fresh),
            };
            worldwise(FOFormula::Pred(p.to_string(), w), w)
        }
        Node::Bottom => {
            let w = Var {
                sort: Sort::World,
                id: next(fresh),
            };
            worldwise(FOFormula::Bottom, w)
        }
        Node::And(a, b) => FOFormula::And(
            Box::new(st_state(a, s, fresh)),
            Box::new(st_state(b, s, fresh)),
        ),
        Node::Idisj(a, b) => FOFormula::Or(
            Box::new(st_state(a, s, fresh)),
            Box::new(st_state(b, s, fresh)),
        ),
        Node::Implies(a, b) => {
            let t = Var {
                sort: Sort::State,
                id: next(fresh),
            };
            forall(
                t,
                implies(
                    subseteq(t, s, fresh),
                    implies(st_state(a, t, fresh), st_state(b, t, fresh)),
                ),
            )
        }
        // Modal formulae are truth-conditional: support is worldwise truth.
        Node::Box(_, _) | Node::BoxPlus(_, _) => {
            let w = Var {
                sort: Sort::World,
                id: next(fresh),
            };
            worldwise(st_world(f, w, fresh), w)
        }
    }
}

/// An element of a two-sorted structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    World(usize),
    State(usize),
}

impl Element {
    pub fn sort(self) -> Sort {
        match self {
            Element::World(_) => Sort::World,
            Element::State(_) => Sort::State,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FOError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("sort mismatch for variable {0}")]
    SortMismatch(String),
    #[error("element out of range")]
    ElementOutOfRange,
    #[error("EF game caps exceeded: q={q} (cap {q_cap}), |A|+|B|={size} (cap {size_cap})")]
    GameCapExceeded {
        q: usize,
        q_cap: usize,
        size: usize,
        size_cap: usize,
    },
    #[error("s-expression syntax error at byte {0}")]
    Sexp(usize),
}

/// Classical Tarskian evaluation by enumeration over both sorts.
pub fn fo_eval(
    st: &Structure,
    f: &FOFormula,
    assignment: &[(Var, Element)],
) -> Result<bool, FOError> {
    FOEvaluator::new(st, f).eval_with(assignment)
}

/// Evaluation context for one formula on one structure. Subformula results
/// are memoized on the values of their free variables, which keeps nested
/// quantifier blocks polynomial; the memo is shared across queries on the
/// same context.
pub struct FOEvaluator<'a> {
    st: &'a Structure,
    f: &'a FOFormula,
    /// Free variables per subformula, keyed by subformula address.
    free: HashMap<*const FOFormula, Vec<Var>>,
    memo: HashMap<(*const FOFormula, Vec<Element>), bool>,
}

impl<'a> FOEvaluator<'a> {
    pub fn new(st: &'a Structure, f: &'a FOFormula) -> FOEvaluator<'a> {
        let mut free = HashMap::new();
        collect_free(f, &mut free);
        FOEvaluator {
            st,
            f,
            free,
            memo: HashMap::new(),
        }
    }

    pub fn eval_with(&mut self, assignment: &[(Var, Element)]) -> Result<bool, FOError> {
        for (v, e) in assignment {
            if v.sort != e.sort() {
                return Err(FOError::SortMismatch(v.name()));
            }
            let ok = match e {
                Element::World(w) => *w < self.st.world_count(),
                Element::State(s) => *s < self.st.state_count(),
            };
            if !ok {
                return Err(FOError::ElementOutOfRange);
            }
        }
        let mut env: Vec<(Var, Element)> = assignment.to_vec();
        let f = self.f;
        self.eval_memo(f, &mut env)
    }

    fn eval_memo(
        &mut self,
        f: &'a FOFormula,
        env: &mut Vec<(Var, Element)>,
    ) -> Result<bool, FOError> {
        let key_vars = self.free[&(f as *const FOFormula)].clone();
        let mut key_vals = Vec::with_capacity(key_vars.len());
        for v in &key_vars {
            key_vals.push(lookup(env, *v)?);
        }
        let key = (f as *const FOFormula, key_vals);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let out = match f {
            FOFormula::Bottom
            | FOFormula::Pred(_, _)
            | FOFormula::Eps(_, _)
            | FOFormula::Edge(_, _, _)
            | FOFormula::Eq(_, _) => eval_atomic(self.st, f, env)?,
            FOFormula::Not(a) => !self.eval_memo(a, env)?,
            FOFormula::And(a, b) => self.eval_memo(a, env)? && self.eval_memo(b, env)?,
            FOFormula::Or(a, b) => self.eval_memo(a, env)? || self.eval_memo(b, env)?,
            FOFormula::Implies(a, b) => !self.eval_memo(a, env)? || self.eval_memo(b, env)?,
            FOFormula::Iff(a, b) => self.eval_memo(a, env)? == self.eval_memo(b, env)?,
            FOFormula::Forall(v, a) => {
                let mut all = true;
                for e in elements_of_sort(self.st, v.sort) {
                    env.push((*v, e));
                    let r = self.eval_memo(a, env);
                    env.pop();
                    if !r? {
                        all = false;
                        break;
                    }
                }
                all
            }
            FOFormula::Exists(v, a) => {
                let mut any = false;
                for e in elements_of_sort(self.st, v.sort) {
                    env.push((*v, e));
                    let r = self.eval_memo(a, env);
                    env.pop();
                    if r? {
                        any = true;
                        break;
                    }
                }
                any
            }
        };
        self.memo.insert(key, out);
        Ok(out)
    }
}

fn collect_free(f: &FOFormula, out: &mut HashMap<*const FOFormula, Vec<Var>>) {
    let vars = f.free_vars();
    out.insert(f as *const FOFormula, vars);
    match f {
        FOFormula::Bottom
        | FOFormula::Pred(_, _)
        | FOFormula::Eps(_, _)
        | FOFormula::Edge(_, _, _)
        | FOFormula::Eq(_, _) => {}
        FOFormula::Not(a) => collect_free(a, out),
        FOFormula::And(a, b)
        | FOFormula::Or(a, b)
        | FOFormula::Implies(a, b)
        | FOFormula::Iff(a, b) => {
            collect_free(a, out);
            collect_free(b, out);
        }
        FOFormula::Forall(_, a) | FOFormula::Exists(_, a) => collect_free(a, out),
    }
}

fn eval_atomic(
    st: &Structure,
    f: &FOFormula,
    env: &mut Vec<(Var, Element)>,
) -> Result<bool, FOError> {
    eval(st, f, env)
}

fn lookup(env: &[(Var, Element)], v: Var) -> Result<Element, FOError> {
    env.iter()
        .rev()
        .find(|(u, _)| *u == v)
        .map(|&(_, e)| e)
        .ok_or_else(|| FOError::Unbound(v.name()))
}

fn eval(st: &Structure, f: &FOFormula, env: &mut Vec<(Var, Element)>) -> Result<bool, FOError> {
    Ok(match f {
        FOFormula::Bottom => false,
        FOFormula::Pred(p, w) => {
            let Element::World(w) = lookup(env, *w)? else {
                return Err(FOError::SortMismatch(w.name()));
            };
            st.atoms
                .iter()
                .position(|a| a == p)
                .map(|i| st.valuation[i].contains(w))
                .unwrap_or(false)
        }
        FOFormula::Eps(w, s) => {
            let (Element::World(w), Element::State(s)) = (lookup(env, *w)?, lookup(env, *s)?)
            else {
                return Err(FOError::SortMismatch(w.name()));
            };
            st.eps(w, s)
        }
        FOFormula::Edge(agent, w, s) => {
            let (Element::World(w), Element::State(s)) = (lookup(env, *w)?, lookup(env, *s)?)
            else {
                return Err(FOError::SortMismatch(w.name()));
            };
            st.agents
                .iter()
                .position(|a| a == agent)
                .map(|a| st.edge(a, w, s))
                .unwrap_or(false)
        }
        FOFormula::Eq(a, b) => {
            let (x, y) = (lookup(env, *a)?, lookup(env, *b)?);
            if x.sort() != y.sort() {
                return Err(FOError::SortMismatch(a.name()));
            }
            x == y
        }
        FOFormula::Not(a) => !eval(st, a, env)?,
        FOFormula::And(a, b) => eval(st, a, env)? && eval(st, b, env)?,
        FOFormula::Or(a, b) => eval(st, a, env)? || eval(st, b, env)?,
        FOFormula::Implies(a, b) => !eval(st, a, env)? || eval(st, b, env)?,
        FOFormula::Iff(a, b) => eval(st, a, env)? == eval(st, b, env)?,
        FOFormula::Forall(v, a) => {
            let mut all = true;
            for e in elements_of_sort(st, v.sort) {
                env.push((*v, e));
                let r = eval(st, a, env)?;
                env.pop();
                if !r {
                    all = false;
                    break;
                }
            }
            all
        }
        FOFormula::Exists(v, a) => {
            let mut any = false;
            for e in elements_of_sort(st, v.sort) {
                env.push((*v, e));
                let r = eval(st, a, env)?;
                env.pop();
                if r {
                    any = true;
                    break;
                }
            }
            any
        }
    })
}

fn elements_of_sort(st: &Structure, sort: Sort) -> Vec<Element> {
    match sort {
        Sort::World => (0..st.world_count()).map(Element::World).collect(),
        Sort::State => (0..st.state_count()).map(Element::State).collect(),
    }
}

// ---------------------------------------------------------------------------
// Ehrenfeucht–Fraïssé game.

pub const DEFAULT_EF_ROUND_CAP: usize = 3;
pub const DEFAULT_EF_SIZE_CAP: usize = 40;

/// Brute-force q-round EF game between pointed structures: true iff the
/// duplicator wins, i.e. the structures agree on all FO formulae of
/// quantifier rank q around the given tuples.
pub fn fo_ef_equiv(
    a: &Structure,
    abar: &[Element],
    b: &Structure,
    bbar: &[Element],
    q: usize,
) -> Result<bool, FOError> {
    fo_ef_equiv_capped(
        a,
        abar,
        b,
        bbar,
        q,
        DEFAULT_EF_ROUND_CAP,
        DEFAULT_EF_SIZE_CAP,
    )
}

pub fn fo_ef_equiv_capped(
    a: &Structure,
    abar: &[Element],
    b: &Structure,
    bbar: &[Element],
    q: usize,
    q_cap: usize,
    size_cap: usize,
) -> Result<bool, FOError> {
    let size = a.world_count() + a.state_count() + b.world_count() + b.state_count();
    if q > q_cap || size > size_cap {
        return Err(FOError::GameCapExceeded {
            q,
            q_cap,
            size,
            size_cap,
        });
    }
    if abar.len() != bbar.len() {
        return Ok(false);
    }
    let mut memo = HashMap::new();
    Ok(game(a, b, abar, bbar, q, &mut memo))
}

type Position = (Vec<(Element, Element)>, usize);

fn game(
    a: &Structure,
    b: &Structure,
    abar: &[Element],
    bbar: &[Element],
    q: usize,
    memo: &mut HashMap<Position, bool>,
) -> bool {
    if !partial_iso(a, b, abar, bbar) {
        return false;
    }
    if q == 0 {
        return true;
    }
    let mut pairs: Vec<(Element, Element)> =
        abar.iter().copied().zip(bbar.iter().copied()).collect();
    pairs.sort_unstable();
    pairs.dedup();
    let key = (pairs, q);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    // Provisional entry breaks no cycles (the game tree is finite in q) but
    // guards against redundant recomputation.
    let extend = |xs: &[Element], x: Element| -> Vec<Element> {
        let mut v = xs.to_vec();
        v.push(x);
        v
    };
    let mut ok = true;
    // Spoiler on the left.
    'left: for x in all_elements(a) {
        let na = extend(abar, x);
        if !all_elements_sorted(b, x.sort())
            .into_iter()
            .any(|y| game(a, b, &na, &extend(bbar, y), q - 1, memo))
        {
            ok = false;
            break 'left;
        }
    }
    if ok {
        'right: for y in all_elements(b) {
            let nb = extend(bbar, y);
            if !all_elements_sorted(a, y.sort())
                .into_iter()
                .any(|x| game(a, b, &extend(abar, x), &nb, q - 1, memo))
            {
                ok = false;
                break 'right;
            }
        }
    }
    memo.insert(key, ok);
    ok
}

fn all_elements(st: &Structure) -> Vec<Element> {
    let mut v: Vec<Element> = (0..st.world_count()).map(Element::World).collect();
    v.extend((0..st.state_count()).map(Element::State));
    v
}

fn all_elements_sorted(st: &Structure, sort: Sort) -> Vec<Element> {
    elements_of_sort(st, sort)
}

/// Atomic-type preservation of the pebbled tuples: sorts, equalities, unary
/// predicates, ε and every E_a.
fn partial_iso(a: &Structure, b: &Structure, abar: &[Element], bbar: &[Element]) -> bool {
    let n = abar.len();
    for i in 0..n {
        if abar[i].sort() != bbar[i].sort() {
            return false;
        }
        for j in 0..n {
            if (abar[i] == abar[j]) != (bbar[i] == bbar[j]) {
                return false;
            }
        }
    }
    let mut atoms: Vec<&String> = a.atoms.iter().collect();
    for p in &b.atoms {
        if !atoms.contains(&p) {
            atoms.push(p);
        }
    }
    let mut agents: Vec<&String> = a.agents.iter().collect();
    for g in &b.agents {
        if !agents.contains(&g) {
            agents.push(g);
        }
    }
    let holds_p = |st: &Structure, p: &String, w: usize| {
        st.atoms
            .iter()
            .position(|x| x == p)
            .map(|i| st.valuation[i].contains(w))
            .unwrap_or(false)
    };
    let holds_e = |st: &Structure, g: &String, w: usize, s: usize| {
        st.agents
            .iter()
            .position(|x| x == g)
            .map(|i| st.edge(i, w, s))
            .unwrap_or(false)
    };
    for i in 0..n {
        if let (Element::World(wa), Element::World(wb)) = (abar[i], bbar[i]) {
            for p in &atoms {
                if holds_p(a, p, wa) != holds_p(b, p, wb) {
                    return false;
                }
            }
        }
        for j in 0..n {
            if let (Element::World(wa), Element::State(sa)) = (abar[i], abar[j]) {
                let (Element::World(wb), Element::State(sb)) = (bbar[i], bbar[j]) else {
                    unreachable!("sorts already matched");
                };
                if a.eps(wa, sa) != b.eps(wb, sb) {
                    return false;
                }
                for g in &agents {
                    if holds_e(a, g, wa, sa) != holds_e(b, g, wb, sb) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Gaifman distance and neighbourhoods.

/// Distances from a start element in the undirected bipartite graph whose
/// edges are all E_a and ε links.
pub struct Distances {
    worlds: Vec<Option<usize>>,
    states: Vec<Option<usize>>,
}

impl Distances {
    pub fn world(&self, w: usize) -> Option<usize> {
        self.worlds[w]
    }

    pub fn state(&self, s: usize) -> Option<usize> {
        self.states[s]
    }
}

pub fn gaifman_distances(st: &Structure, start: Element) -> Distances {
    let nw = st.world_count();
    let ns = st.state_count();
    let mut dw = vec![None; nw];
    let mut ds = vec![None; ns];
    // Adjacency between worlds and states.
    let mut w_adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nw];
    let mut s_adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ns];
    for rows in &st.edges {
        for (w, row) in rows.iter().enumerate() {
            for &s in row {
                w_adj[w].insert(s);
                s_adj[s].insert(w);
            }
        }
    }
    for (s, ext) in st.states.iter().enumerate() {
        for w in ext.iter() {
            w_adj[w].insert(s);
            s_adj[s].insert(w);
        }
    }
    let mut queue = VecDeque::new();
    match start {
        Element::World(w) => {
            dw[w] = Some(0);
            queue.push_back(Element::World(w));
        }
        Element::State(s) => {
            ds[s] = Some(0);
            queue.push_back(Element::State(s));
        }
    }
    while let Some(e) = queue.pop_front() {
        match e {
            Element::World(w) => {
                let d = dw[w].unwrap();
                for &s in &w_adj[w] {
                    if ds[s].is_none() {
                        ds[s] = Some(d + 1);
                        queue.push_back(Element::State(s));
                    }
                }
            }
            Element::State(s) => {
                let d = ds[s].unwrap();
                for &w in &s_adj[s] {
                    if dw[w].is_none() {
                        dw[w] = Some(d + 1);
                        queue.push_back(Element::World(w));
                    }
                }
            }
        }
    }
    Distances {
        worlds: dw,
        states: ds,
    }
}

/// The induced substructure on all elements at Gaifman distance ≤ ℓ from
/// `x`, with the distinguished element remapped. The empty state, when
/// present, links every world, so neighbourhoods in structures that carry it
/// collapse quickly; locality arguments drop it first.
pub fn neighbourhood(st: &Structure, x: Element, radius: usize) -> (Structure, Element) {
    let dist = gaifman_distances(st, x);
    let keep_worlds: Vec<usize> = (0..st.world_count())
        .filter(|&w| dist.world(w).is_some_and(|d| d <= radius))
        .collect();
    let keep_states: Vec<usize> = (0..st.state_count())
        .filter(|&s| dist.state(s).is_some_and(|d| d <= radius))
        .collect();
    let out = st.restrict(keep_worlds.clone(), &keep_states);
    let x2 = match x {
        Element::World(w) => Element::World(
            keep_worlds
                .iter()
                .position(|&o| o == w)
                .expect("start kept"),
        ),
        Element::State(s) => Element::State(
            keep_states
                .iter()
                .position(|&o| o == s)
                .expect("start kept"),
        ),
    };
    (out, x2)
}

/// An even-radius world neighbourhood of a relational model, validated as a
/// relational model again. Validation holds when every kept state sits in a
/// kept E-row, as in restrictions of stratified unfoldings; a state that is
/// only ε-close can leave a subset at odd distance just outside the radius
/// and genuinely fail the local powerset.
pub fn neighbourhood_relational(
    rel: &crate::relational::RelationalModel,
    world: usize,
    radius: usize,
) -> Result<(crate::relational::RelationalModel, usize), crate::relational::RelationalError> {
    assert!(radius > 0 && radius % 2 == 0, "needs a nonzero even radius");
    let (st, x) = neighbourhood(rel.as_structure(), Element::World(world), radius);
    let Element::World(w) = x else {
        unreachable!("world start stays a world")
    };
    Ok((st.into_relational()?, w))
}

/// ℓ-local r-equivalence: agreement on rank-r formulae relativized to the
/// ℓ-neighbourhoods of the distinguished elements, decided by the EF game on
/// the restricted structures.
pub fn locally_equiv(
    a: &Structure,
    x: Element,
    b: &Structure,
    y: Element,
    radius: usize,
    rank: usize,
) -> Result<bool, FOError> {
    let (na, xa) = neighbourhood(a, x, radius);
    let (nb, yb) = neighbourhood(b, y, radius);
    fo_ef_equiv(&na, &[xa], &nb, &[yb], rank)
}

// ---------------------------------------------------------------------------
// S-expression parsing (round trip of `to_sexp`).

pub fn parse_fo(text: &str) -> Result<FOFormula, FOError> {
    let mut p = SexpParser {
        text: text.as_bytes(),
        pos: 0,
    };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos != p.text.len() {
        return Err(FOError::Sexp(p.pos));
    }
    Ok(f)
}

struct SexpParser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> SexpParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), FOError> {
        self.skip_ws();
        if self.text.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(FOError::Sexp(self.pos))
        }
    }

    fn word(&mut self) -> Result<String, FOError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() {
            let c = self.text[self.pos];
            if c.is_ascii_whitespace() || c == b'(' || c == b')' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(FOError::Sexp(self.pos));
        }
        Ok(std::str::from_utf8(&self.text[start..self.pos])
            .unwrap()
            .to_string())
    }

    fn var(&mut self) -> Result<Var, FOError> {
        let at = self.pos;
        let w = self.word()?;
        let (sort, rest) = match w.split_at(1) {
            ("w", rest) => (Sort::World, rest),
            ("s", rest) => (Sort::State, rest),
            _ => return Err(FOError::Sexp(at)),
        };
        let id: u32 = rest.parse().map_err(|_| FOError::Sexp(at))?;
        Ok(Var { sort, id })
    }

    fn formula(&mut self) -> Result<FOFormula, FOError> {
        self.expect(b'(')?;
        let head = self.word()?;
        let out = match head.as_str() {
            "bot" => FOFormula::Bottom,
            "P" => {
                let p = self.word()?;
                FOFormula::Pred(p, self.var()?)
            }
            "eps" => FOFormula::Eps(self.var()?, self.var()?),
            "E" => {
                let a = self.word()?;
                FOFormula::Edge(a, self.var()?, self.var()?)
            }
            "=" => FOFormula::Eq(self.var()?, self.var()?),
            "not" => FOFormula::Not(Box::new(self.formula()?)),
            "and" => FOFormula::And(Box::new(self.formula()?), Box::new(self.formula()?)),
            "or" => FOFormula::Or(Box::new(self.formula()?), Box::new(self.formula()?)),
            "->" => FOFormula::Implies(Box::new(self.formula()?), Box::new(self.formula()?)),
            "<->" => FOFormula::Iff(Box::new(self.formula()?), Box::new(self.formula()?)),
            "forall" => {
                let v = self.var()?;
                FOFormula::Forall(v, Box::new(self.formula()?))
            }
            "exists" => {
                let v = self.var()?;
                FOFormula::Exists(v, Box::new(self.formula()?))
            }
            _ => return Err(FOError::Sexp(self.pos)),
        };
        self.expect(b')')?;
        Ok(out)
    }
}
