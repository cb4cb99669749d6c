//! The line-oriented model text formats.
//!
//! Plain models:
//!
//! ```text
//! # comment
//! model ex1
//! agents a
//! atoms p q
//! world w_pq p q
//! sigma a w_pq : {w_pq} {w_pq'}
//! point world w_pq
//! ```
//!
//! `sigma` lists the maximal states; downward closure is implicit. A
//! relational file replaces `sigma` lines by an explicit second sort and
//! edge relation: `state {w_pq,w_pq'}` lines (indexed 0,1,… in file order)
//! and `edge <agent> <world> <state-index>` lines. A covering file has three
//! `%%`-separated sections: source model, target model, and a projection
//! table of `<target-world> <source-world>` pairs.

use crate::model::{InqModel, ModelBuilder, ModelError, Point};
use crate::relational::Structure;
use crate::transforms::Covering;
use crate::worldset::WorldSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TextError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("line {line}: unknown {kind} `{name}`")]
    Unknown {
        line: usize,
        kind: &'static str,
        name: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("file mixes sigma and state/edge lines")]
    MixedKinds,
    #[error("covering file needs source, target and projection sections")]
    BadCovering,
}

/// A parsed model file: either a plain model or a relational structure,
/// with an optional distinguished point.
pub struct ModelFile {
    pub kind: ModelKind,
    pub point: Option<Point>,
}

pub enum ModelKind {
    Plain(InqModel),
    Relational(Structure),
}

impl ModelFile {
    /// The plain model view: a relational file is decoded (and validated).
    pub fn to_model(&self) -> Result<InqModel, crate::relational::RelationalError> {
        match &self.kind {
            ModelKind::Plain(m) => Ok(m.clone()),
            ModelKind::Relational(st) => crate::relational::decode_structure(st),
        }
    }
}

fn err(line: usize, msg: impl Into<String>) -> TextError {
    TextError::Line {
        line,
        msg: msg.into(),
    }
}

fn parse_state_token(
    tok: &str,
    line: usize,
    lookup: &dyn Fn(&str) -> Option<usize>,
) -> Result<WorldSet, TextError> {
    let inner = tok
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| {
            err(
                line,
                format!("expected a state like {{w1,w2}}, got `{tok}`"),
            )
        })?;
    let mut s = WorldSet::EMPTY;
    for part in inner.split(',') {
        let name = part.trim();
        if name.is_empty() {
            continue;
        }
        let w = lookup(name).ok_or(TextError::Unknown {
            line,
            kind: "world",
            name: name.to_string(),
        })?;
        s.insert(w);
    }
    Ok(s)
}

/// Parses a plain or relational model file.
pub fn parse_model_file(text: &str, allow_trivial: bool) -> Result<ModelFile, TextError> {
    let mut name = String::from("model");
    let mut agents: Vec<String> = Vec::new();
    let mut atoms: Vec<String> = Vec::new();
    let mut worlds: Vec<(String, Vec<String>)> = Vec::new();
    let mut sigma_lines: Vec<(usize, String, String, Vec<String>)> = Vec::new();
    let mut state_lines: Vec<(usize, String)> = Vec::new();
    let mut edge_lines: Vec<(usize, String, String, String)> = Vec::new();
    let mut point_line: Option<(usize, Vec<String>)> = None;

    for (ix, raw) in text.lines().enumerate() {
        let line_no = ix + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let head = it.next().unwrap();
        let rest: Vec<String> = it.map(|s| s.to_string()).collect();
        match head {
            "model" => {
                name = rest
                    .first()
                    .ok_or_else(|| err(line_no, "model needs a name"))?
                    .clone();
            }
            "agents" => agents.extend(rest),
            "atoms" => atoms.extend(rest),
            "world" => {
                let mut parts = rest.into_iter();
                let label = parts
                    .next()
                    .ok_or_else(|| err(line_no, "world needs a label"))?;
                worlds.push((label, parts.collect()));
            }
            "sigma" => {
                // sigma <agent> <world> : {..} {..}
                let joined = rest.join(" ");
                let (lhs, rhs) = joined
                    .split_once(':')
                    .ok_or_else(|| err(line_no, "sigma needs a `:`"))?;
                let mut lhs_it = lhs.split_whitespace();
                let agent = lhs_it
                    .next()
                    .ok_or_else(|| err(line_no, "sigma needs an agent"))?
                    .to_string();
                let world = lhs_it
                    .next()
                    .ok_or_else(|| err(line_no, "sigma needs a world"))?
                    .to_string();
                if lhs_it.next().is_some() {
                    return Err(err(line_no, "sigma takes one agent and one world"));
                }
                let states: Vec<String> = rhs.split_whitespace().map(|s| s.to_string()).collect();
                sigma_lines.push((line_no, agent, world, states));
            }
            "state" => {
                let tok = rest
                    .first()
                    .ok_or_else(|| err(line_no, "state needs {..}"))?
                    .clone();
                state_lines.push((line_no, tok));
            }
            "edge" => {
                if rest.len() != 3 {
                    return Err(err(line_no, "edge takes <agent> <world> <state-index>"));
                }
                edge_lines.push((line_no, rest[0].clone(), rest[1].clone(), rest[2].clone()));
            }
            "point" => {
                point_line = Some((line_no, rest));
            }
            other => return Err(err(line_no, format!("unknown directive `{other}`"))),
        }
    }

    if !sigma_lines.is_empty() && !(state_lines.is_empty() && edge_lines.is_empty()) {
        return Err(TextError::MixedKinds);
    }

    let world_index = |label: &str| worlds.iter().position(|(l, _)| l == label);

    let kind = if state_lines.is_empty() && edge_lines.is_empty() {
        let mut builder = ModelBuilder::new(name).allow_trivial(allow_trivial);
        builder.agents = agents;
        builder.atoms = atoms;
        builder.worlds = worlds.clone();
        for (line_no, agent, world, states) in sigma_lines {
            let mut maximal = Vec::new();
            for tok in states {
                let s = parse_state_token(&tok, line_no, &world_index)?;
                maximal.push(s.iter().map(|w| worlds[w].0.clone()).collect());
            }
            builder.sigma.push((agent, world, maximal));
        }
        ModelKind::Plain(builder.build()?)
    } else {
        let mut states = Vec::new();
        for (line_no, tok) in state_lines {
            states.push(parse_state_token(&tok, line_no, &world_index)?);
        }
        let mut edges = vec![vec![Vec::new(); worlds.len()]; agents.len()];
        for (line_no, agent, world, sidx) in edge_lines {
            let a = agents
                .iter()
                .position(|x| *x == agent)
                .ok_or(TextError::Unknown {
                    line: line_no,
                    kind: "agent",
                    name: agent,
                })?;
            let w = world_index(&world).ok_or(TextError::Unknown {
                line: line_no,
                kind: "world",
                name: world,
            })?;
            let s: usize = sidx
                .parse()
                .ok()
                .filter(|&s| s < states.len())
                .ok_or_else(|| err(line_no, format!("bad state index `{sidx}`")))?;
            edges[a][w].push(s);
        }
        for rows in &mut edges {
            for row in rows.iter_mut() {
                row.sort_unstable();
                row.dedup();
            }
        }
        let mut valuation = vec![WorldSet::EMPTY; atoms.len()];
        for (w, (label, true_atoms)) in worlds.iter().enumerate() {
            for atom in true_atoms {
                let i = atoms
                    .iter()
                    .position(|a| a == atom)
                    .ok_or(TextError::Unknown {
                        line: 0,
                        kind: "atom",
                        name: format!("{atom} (world {label})"),
                    })?;
                valuation[i].insert(w);
            }
        }
        ModelKind::Relational(Structure {
            name,
            worlds: worlds.iter().map(|(l, _)| l.clone()).collect(),
            agents,
            atoms,
            states,
            edges,
            valuation,
        })
    };

    let point = match point_line {
        None => None,
        Some((line_no, parts)) => Some(match parts.first().map(|s| s.as_str()) {
            Some("world") => {
                let label = parts
                    .get(1)
                    .ok_or_else(|| err(line_no, "point world needs a label"))?;
                Point::World(world_index(label).ok_or(TextError::Unknown {
                    line: line_no,
                    kind: "world",
                    name: label.clone(),
                })?)
            }
            Some("state") => {
                let tok = parts
                    .get(1)
                    .ok_or_else(|| err(line_no, "point state needs {..}"))?;
                Point::State(parse_state_token(tok, line_no, &world_index)?)
            }
            _ => return Err(err(line_no, "point takes `world <id>` or `state {..}`")),
        }),
    };

    Ok(ModelFile { kind, point })
}

fn state_token(worlds: &[String], s: WorldSet) -> String {
    let mut out = String::from("{");
    for (k, w) in s.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push_str(&worlds[w]);
    }
    out.push('}');
    out
}

fn header(out: &mut String, name: &str, agents: &[String], atoms: &[String]) {
    out.push_str(&format!("model {name}\n"));
    if !agents.is_empty() {
        out.push_str(&format!("agents {}\n", agents.join(" ")));
    }
    if !atoms.is_empty() {
        out.push_str(&format!("atoms {}\n", atoms.join(" ")));
    }
}

fn world_lines(
    out: &mut String,
    worlds: &[String],
    atoms: &[String],
    val: &dyn Fn(usize) -> WorldSet,
) {
    for (w, label) in worlds.iter().enumerate() {
        out.push_str("world ");
        out.push_str(label);
        for (p, atom) in atoms.iter().enumerate() {
            if val(p).contains(w) {
                out.push(' ');
                out.push_str(atom);
            }
        }
        out.push('\n');
    }
}

fn point_line(out: &mut String, worlds: &[String], point: Option<Point>) {
    match point {
        None => {}
        Some(Point::World(w)) => out.push_str(&format!("point world {}\n", worlds[w])),
        Some(Point::State(s)) => out.push_str(&format!("point state {}\n", state_token(worlds, s))),
    }
}

/// Canonical plain-model text.
pub fn print_model(m: &InqModel, point: Option<Point>) -> String {
    let mut out = String::new();
    header(&mut out, &m.name, m.agents(), m.atoms());
    world_lines(&mut out, m.worlds(), m.atoms(), &|p| m.valuation(p));
    for (a, agent) in m.agents().iter().enumerate() {
        for w in 0..m.world_count() {
            out.push_str(&format!("sigma {agent} {} :", m.world_label(w)));
            for &mx in m.state_map(a, w).maximal() {
                out.push(' ');
                out.push_str(&state_token(m.worlds(), mx));
            }
            out.push('\n');
        }
    }
    point_line(&mut out, m.worlds(), point);
    out
}

/// Canonical relational text: explicit `state` and `edge` lines.
pub fn print_structure(st: &Structure, point: Option<Point>) -> String {
    let mut out = String::new();
    header(&mut out, &st.name, &st.agents, &st.atoms);
    world_lines(&mut out, &st.worlds, &st.atoms, &|p| st.valuation[p]);
    for &s in &st.states {
        out.push_str(&format!("state {}\n", state_token(&st.worlds, s)));
    }
    for (a, agent) in st.agents.iter().enumerate() {
        for (w, label) in st.worlds.iter().enumerate() {
            for &s in &st.edges[a][w] {
                out.push_str(&format!("edge {agent} {label} {s}\n"));
            }
        }
    }
    point_line(&mut out, &st.worlds, point);
    out
}

/// Covering file: `%% source`, `%% target`, `%% projection` sections.
pub fn print_covering(c: &Covering) -> String {
    let mut out = String::from("%% source\n");
    out.push_str(&print_model(&c.source, None));
    out.push_str("%% target\n");
    out.push_str(&print_model(&c.target, None));
    out.push_str("%% projection\n");
    for (w, &src) in c.projection.iter().enumerate() {
        out.push_str(&format!(
            "{} {}\n",
            c.target.world_label(w),
            c.source.world_label(src)
        ));
    }
    out
}

pub fn parse_covering(text: &str) -> Result<Covering, TextError> {
    let mut sections: Vec<(String, Vec<&str>)> = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.trim().strip_prefix("%%") {
            sections.push((rest.trim().to_string(), Vec::new()));
        } else if let Some((_, body)) = sections.last_mut() {
            body.push(line);
        } else if !line.trim().is_empty() && !line.trim_start().starts_with('#') {
            return Err(TextError::BadCovering);
        }
    }
    let get = |name: &str| {
        sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, body)| body.join("\n"))
            .ok_or(TextError::BadCovering)
    };
    let source = match parse_model_file(&get("source")?, false)?.kind {
        ModelKind::Plain(m) => m,
        ModelKind::Relational(_) => return Err(TextError::BadCovering),
    };
    let target = match parse_model_file(&get("target")?, false)?.kind {
        ModelKind::Plain(m) => m,
        ModelKind::Relational(_) => return Err(TextError::BadCovering),
    };
    let mut projection = vec![usize::MAX; target.world_count()];
    for (ix, line) in get("projection")?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(t), Some(s), None) = (it.next(), it.next(), it.next()) else {
            return Err(err(ix + 1, "projection lines are `<target> <source>`"));
        };
        let tw = target.world_index(t).ok_or(TextError::Unknown {
            line: ix + 1,
            kind: "world",
            name: t.to_string(),
        })?;
        let sw = source.world_index(s).ok_or(TextError::Unknown {
            line: ix + 1,
            kind: "world",
            name: s.to_string(),
        })?;
        projection[tw] = sw;
    }
    if projection.contains(&usize::MAX) {
        return Err(TextError::BadCovering);
    }
    Ok(Covering {
        source,
        target,
        projection,
    })
}
