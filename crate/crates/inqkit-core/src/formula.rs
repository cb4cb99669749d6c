//! Abstract syntax for the modal language, with parser and printer.
//!
//! Core connectives are ∧, →, inquisitive disjunction, ⊥ and the two
//! modalities □_a (`[a]`) and ⊞_a (`[+a]`). Negation `!`, classical
//! disjunction `|`, the question operator `?` and the verum `T` are sugar and
//! are expanded at construction time; they never appear in the core AST.
//!
//! Subtrees are reference-counted so that synthesized formulae can share
//! structure; equality is structural with a pointer fast path.

use std::collections::HashMap;
use std::rc::Rc;

#[derive(Debug)]
pub enum Node {
    Atom(Rc<str>),
    Bottom,
    And(Formula, Formula),
    Implies(Formula, Formula),
    /// Inquisitive disjunction.
    Idisj(Formula, Formula),
    /// □_a.
    Box(Rc<str>, Formula),
    /// ⊞_a.
    BoxPlus(Rc<str>, Formula),
}

#[derive(Clone, Debug)]
pub struct Formula(Rc<Node>);

impl Formula {
    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Stable identity of the shared node, used as a memoization key.
    pub fn key(&self) -> usize {
        Rc::as_ptr(&self.0) as usize
    }

    pub fn atom(name: &str) -> Formula {
        Formula(Rc::new(Node::Atom(name.into())))
    }

    pub fn bottom() -> Formula {
        Formula(Rc::new(Node::Bottom))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula(Rc::new(Node::And(a, b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula(Rc::new(Node::Implies(a, b)))
    }

    pub fn idisj(a: Formula, b: Formula) -> Formula {
        Formula(Rc::new(Node::Idisj(a, b)))
    }

    pub fn boxm(agent: &str, f: Formula) -> Formula {
        Formula(Rc::new(Node::Box(agent.into(), f)))
    }

    pub fn boxplus(agent: &str, f: Formula) -> Formula {
        Formula(Rc::new(Node::BoxPlus(agent.into(), f)))
    }

    // Defined connectives.

    pub fn not(f: Formula) -> Formula {
        Formula::implies(f, Formula::bottom())
    }

    pub fn verum() -> Formula {
        Formula::implies(Formula::bottom(), Formula::bottom())
    }

    /// Classical disjunction `a | b`, i.e. ¬(¬a ∧ ¬b).
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// The polar question `?f`, i.e. f ⫾ ¬f.
    pub fn question(f: Formula) -> Formula {
        let neg = Formula::not(f.clone());
        Formula::idisj(f, neg)
    }

    // The n-ary connectives fold balanced so that wide conjunctions stay
    // logarithmically deep.
    fn fold_balanced(mut parts: Vec<Formula>, op: fn(Formula, Formula) -> Formula) -> Formula {
        while parts.len() > 1 {
            let mut next = Vec::with_capacity(parts.len().div_ceil(2));
            let mut it = parts.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(op(a, b)),
                    None => next.push(a),
                }
            }
            parts = next;
        }
        parts.into_iter().next().expect("non-empty")
    }

    /// Conjunction of a sequence; empty yields `T`.
    pub fn conj<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let parts: Vec<Formula> = parts.into_iter().collect();
        if parts.is_empty() {
            Formula::verum()
        } else {
            Formula::fold_balanced(parts, Formula::and)
        }
    }

    /// Classical disjunction of a sequence; empty yields `_|_`.
    pub fn disj<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let parts: Vec<Formula> = parts.into_iter().collect();
        if parts.is_empty() {
            Formula::bottom()
        } else {
            Formula::fold_balanced(parts, Formula::or)
        }
    }

    /// Inquisitive disjunction of a sequence; empty yields `_|_`.
    pub fn idisj_all<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let parts: Vec<Formula> = parts.into_iter().collect();
        if parts.is_empty() {
            Formula::bottom()
        } else {
            Formula::fold_balanced(parts, Formula::idisj)
        }
    }

    /// Maximum nesting of □/⊞, computed once per shared node.
    pub fn modal_depth(&self) -> usize {
        fn go(f: &Formula, memo: &mut HashMap<usize, usize>) -> usize {
            if let Some(&d) = memo.get(&f.key()) {
                return d;
            }
            let d = match f.node() {
                Node::Atom(_) | Node::Bottom => 0,
                Node::And(a, b) | Node::Implies(a, b) | Node::Idisj(a, b) => {
                    go(a, memo).max(go(b, memo))
                }
                Node::Box(_, g) | Node::BoxPlus(_, g) => 1 + go(g, memo),
            };
            memo.insert(f.key(), d);
            d
        }
        go(self, &mut HashMap::new())
    }

    /// True when the formula contains neither ⫾ nor ⊞ (the fragment that
    /// matches standard Kripke semantics).
    pub fn is_kripke_fragment(&self) -> bool {
        fn go(f: &Formula, memo: &mut HashMap<usize, bool>) -> bool {
            if let Some(&v) = memo.get(&f.key()) {
                return v;
            }
            let v = match f.node() {
                Node::Atom(_) | Node::Bottom => true,
                Node::And(a, b) | Node::Implies(a, b) => go(a, memo) && go(b, memo),
                Node::Idisj(_, _) => false,
                Node::Box(_, g) => go(g, memo),
                Node::BoxPlus(_, _) => false,
            };
            memo.insert(f.key(), v);
            v
        }
        go(self, &mut HashMap::new())
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        if Rc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (self.node(), other.node()) {
            (Node::Atom(a), Node::Atom(b)) => a == b,
            (Node::Bottom, Node::Bottom) => true,
            (Node::And(a, b), Node::And(c, d))
            | (Node::Implies(a, b), Node::Implies(c, d))
            | (Node::Idisj(a, b), Node::Idisj(c, d)) => a == c && b == d,
            (Node::Box(x, a), Node::Box(y, b)) | (Node::BoxPlus(x, a), Node::BoxPlus(y, b)) => {
                x == y && a == b
            }
            _ => false,
        }
    }
}

impl Eq for Formula {}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown agent tag `{0}`")]
    UnknownAgent(String),
    #[error("`[]`/`[+]` shorthand needs exactly one declared agent")]
    AmbiguousShorthand,
}

/// Parses a formula without an agent signature: explicit `[a]`/`[+a]` tags
/// are taken at face value and the bare `[]`/`[+]` shorthand is rejected.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    Parser::new(text, None).run()
}

/// Parses against a declared agent list: agent tags are checked and the
/// `[]`/`[+]` shorthand resolves to the sole declared agent.
pub fn parse_with_agents(text: &str, agents: &[String]) -> Result<Formula, ParseError> {
    Parser::new(text, Some(agents)).run()
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    agents: Option<&'a [String]>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, agents: Option<&'a [String]>) -> Parser<'a> {
        Parser {
            text: text.as_bytes(),
            pos: 0,
            agents,
        }
    }

    fn run(mut self) -> Result<Formula, ParseError> {
        let f = self.implication()?;
        self.skip_ws();
        if self.pos != self.text.len() {
            return Err(self.err("trailing input"));
        }
        Ok(f)
    }

    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() {
            let c = self.text[self.pos];
            if c.is_ascii_alphanumeric() || c == b'_' || c == b'\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.err("expected identifier"));
        }
        Ok(std::str::from_utf8(&self.text[start..self.pos])
            .unwrap()
            .to_string())
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            let rhs = self.implication()?; // right-associative
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        loop {
            // `\/` is the inquisitive disjunction, `|` the classical sugar.
            if self.eat("\\/") {
                let rhs = self.conjunction()?;
                acc = Formula::idisj(acc, rhs);
            } else if self.peek() == Some(b'|') && !self.text[self.pos..].starts_with(b"|_") {
                self.pos += 1;
                let rhs = self.conjunction()?;
                acc = Formula::or(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.prefix()?;
        while self.eat("&") {
            let rhs = self.prefix()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn agent_tag(&mut self, plus: bool) -> Result<String, ParseError> {
        self.skip_ws();
        if self.peek() == Some(b']') {
            self.pos += 1;
            return match self.agents {
                Some([a]) => Ok(a.clone()),
                Some(_) => Err(ParseError::AmbiguousShorthand),
                None => Err(ParseError::AmbiguousShorthand),
            };
        }
        let name = self.ident()?;
        if !self.eat("]") {
            return Err(self.err(if plus {
                "expected `]` after `[+agent`"
            } else {
                "expected `]` after `[agent`"
            }));
        }
        if let Some(agents) = self.agents {
            if !agents.iter().any(|a| a == &name) {
                return Err(ParseError::UnknownAgent(name));
            }
        }
        Ok(name)
    }

    fn prefix(&mut self) -> Result<Formula, ParseError> {
        if self.eat("!") {
            return Ok(Formula::not(self.prefix()?));
        }
        if self.eat("?") {
            return Ok(Formula::question(self.prefix()?));
        }
        if self.eat("[+") {
            let agent = self.agent_tag(true)?;
            return Ok(Formula::boxplus(&agent, self.prefix()?));
        }
        if self.eat("[") {
            let agent = self.agent_tag(false)?;
            return Ok(Formula::boxm(&agent, self.prefix()?));
        }
        self.atom_expr()
    }

    fn atom_expr(&mut self) -> Result<Formula, ParseError> {
        if self.eat("_|_") {
            return Ok(Formula::bottom());
        }
        if self.eat("(") {
            let f = self.implication()?;
            if !self.eat(")") {
                return Err(self.err("expected `)`"));
            }
            return Ok(f);
        }
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let name = self.ident()?;
                if name == "T" {
                    Ok(Formula::verum())
                } else {
                    Ok(Formula::atom(&name))
                }
            }
            _ => Err(self.err("expected formula")),
        }
    }
}

// Printing. Sugar is re-folded where it is recognizable (T, !, ?, |), which
// re-parses to the identical core AST.

const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_PREFIX: u8 = 4;
const PREC_ATOM: u8 = 5;

fn is_bottom(f: &Formula) -> bool {
    matches!(f.node(), Node::Bottom)
}

/// Recognizes printable sugar on a core node.
enum Sugar<'f> {
    Verum,
    Not(&'f Formula),
    Question(&'f Formula),
    Or(&'f Formula, &'f Formula),
}

fn sugar_of(f: &Formula) -> Option<Sugar<'_>> {
    match f.node() {
        Node::Implies(a, b) if is_bottom(b) => {
            if is_bottom(a) {
                return Some(Sugar::Verum);
            }
            // ¬(¬x ∧ ¬y) prints as x | y.
            if let Node::And(na, nb) = a.node() {
                if let (Node::Implies(x, bx), Node::Implies(y, by)) = (na.node(), nb.node()) {
                    if is_bottom(bx) && is_bottom(by) {
                        return Some(Sugar::Or(x, y));
                    }
                }
            }
            Some(Sugar::Not(a))
        }
        Node::Idisj(x, neg) => {
            if let Node::Implies(x2, b) = neg.node() {
                if is_bottom(b) && x == x2 {
                    return Some(Sugar::Question(x));
                }
            }
            None
        }
        _ => None,
    }
}

fn fmt_prec(f: &Formula, prec: u8, out: &mut String) {
    let own = match sugar_of(f) {
        Some(Sugar::Verum) => PREC_ATOM,
        Some(Sugar::Not(_)) | Some(Sugar::Question(_)) => PREC_PREFIX,
        Some(Sugar::Or(_, _)) => PREC_OR,
        None => match f.node() {
            Node::Atom(_) | Node::Bottom => PREC_ATOM,
            Node::Implies(_, _) => PREC_IMPLIES,
            Node::Idisj(_, _) => PREC_OR,
            Node::And(_, _) => PREC_AND,
            Node::Box(_, _) | Node::BoxPlus(_, _) => PREC_PREFIX,
        },
    };
    let paren = own < prec;
    if paren {
        out.push('(');
    }
    match sugar_of(f) {
        Some(Sugar::Verum) => out.push('T'),
        Some(Sugar::Not(x)) => {
            out.push('!');
            fmt_prec(x, PREC_PREFIX, out);
        }
        Some(Sugar::Question(x)) => {
            out.push('?');
            fmt_prec(x, PREC_PREFIX, out);
        }
        Some(Sugar::Or(x, y)) => {
            fmt_prec(x, PREC_OR, out);
            out.push_str(" | ");
            fmt_prec(y, PREC_OR + 1, out);
        }
        None => match f.node() {
            Node::Atom(p) => out.push_str(p),
            Node::Bottom => out.push_str("_|_"),
            Node::And(a, b) => {
                fmt_prec(a, PREC_AND, out);
                out.push_str(" & ");
                fmt_prec(b, PREC_AND + 1, out);
            }
            Node::Implies(a, b) => {
                fmt_prec(a, PREC_IMPLIES + 1, out);
                out.push_str(" -> ");
                fmt_prec(b, PREC_IMPLIES, out);
            }
            Node::Idisj(a, b) => {
                fmt_prec(a, PREC_OR, out);
                out.push_str(" \\/ ");
                fmt_prec(b, PREC_OR + 1, out);
            }
            Node::Box(a, g) => {
                out.push('[');
                out.push_str(a);
                out.push(']');
                fmt_prec(g, PREC_PREFIX, out);
            }
            Node::BoxPlus(a, g) => {
                out.push_str("[+");
                out.push_str(a);
                out.push(']');
                fmt_prec(g, PREC_PREFIX, out);
            }
        },
    }
    if paren {
        out.push(')');
    }
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = String::new();
        fmt_prec(self, 0, &mut s);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn question_expands_to_primitive_connectives() {
        let f = parse("?p").unwrap();
        let expected = Formula::idisj(
            Formula::atom("p"),
            Formula::implies(Formula::atom("p"), Formula::bottom()),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn boxplus_with_question_sugar() {
        let f = parse("[+a]?q").unwrap();
        let q = Formula::atom("q");
        let expected = Formula::boxplus(
            "a",
            Formula::idisj(q.clone(), Formula::implies(q, Formula::bottom())),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse("p -> q -> r").unwrap();
        let expected = Formula::implies(
            Formula::atom("p"),
            Formula::implies(Formula::atom("q"), Formula::atom("r")),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn precedence_and_binds_tighter_than_disjunctions() {
        assert_eq!(
            parse("p & q \\/ r").unwrap(),
            Formula::idisj(
                Formula::and(Formula::atom("p"), Formula::atom("q")),
                Formula::atom("r")
            )
        );
        assert_eq!(
            parse("p | q -> r").unwrap(),
            Formula::implies(
                Formula::or(Formula::atom("p"), Formula::atom("q")),
                Formula::atom("r")
            )
        );
    }

    #[test]
    fn shorthand_box_resolves_sole_agent() {
        let agents = vec!["a".to_string()];
        assert_eq!(
            parse_with_agents("[]p", &agents).unwrap(),
            Formula::boxm("a", Formula::atom("p"))
        );
        assert_eq!(
            parse_with_agents("[+]p", &agents).unwrap(),
            Formula::boxplus("a", Formula::atom("p"))
        );
        let two = vec!["a".to_string(), "b".to_string()];
        assert_eq!(
            parse_with_agents("[]p", &two),
            Err(ParseError::AmbiguousShorthand)
        );
        assert_eq!(
            parse_with_agents("[c]p", &two),
            Err(ParseError::UnknownAgent("c".into()))
        );
    }

    #[test]
    fn modal_depth_examples() {
        assert_eq!(parse("p & ?q").unwrap().modal_depth(), 0);
        assert_eq!(parse("[+a]?q").unwrap().modal_depth(), 1);
        assert_eq!(parse("[a]([+a]p -> q)").unwrap().modal_depth(), 2);
        // Sugar expansion of negation does not add modal depth.
        let f = parse("[a]p").unwrap();
        assert_eq!(Formula::not(f.clone()).modal_depth(), f.modal_depth());
    }

    #[test]
    fn print_folds_sugar_and_round_trips() {
        for src in [
            "?p",
            "!(p & q)",
            "p | q",
            "T",
            "_|_",
            "[a](p -> q -> r)",
            "[+a]?q & p",
            "p \\/ q | r",
        ] {
            let f = parse(src).unwrap();
            let printed = f.to_string();
            let back = parse(&printed).unwrap();
            assert_eq!(back, f, "round trip failed: {src} -> {printed}");
        }
    }

    #[test]
    fn syntax_error_reports_position() {
        match parse("p &") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }
}
