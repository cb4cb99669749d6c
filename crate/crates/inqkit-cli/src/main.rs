//! Command-line front end: deterministic output, exit code 0 for
//! success/true, 1 for a semantic "false", 2 for errors.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use inqkit_core::bisim::{compute_layers, distinguishing_play, equiv, Depth};
use inqkit_core::charform::Synthesizer;
use inqkit_core::epistemic::{
    a_class_by_label, classes, k_rich_report, local_a_structure, n_acyclic_report, s5_report,
    simple_report, Granularity,
};
use inqkit_core::fo::{
    fo_ef_equiv_capped, fo_eval, free_var, parse_fo, standard_translate, Element, FOFormula,
    TranslationMode,
};
use inqkit_core::formula::parse_with_agents;
use inqkit_core::model::{InqModel, Point};
use inqkit_core::relational::{encode_relational_capped, EncodeMode, DEFAULT_FULL_CAP};
use inqkit_core::semantics::{supports, truth};
use inqkit_core::textio::{
    parse_covering, parse_model_file, print_covering, print_model, print_structure, ModelFile,
    ModelKind,
};
use inqkit_core::transforms::{
    rich_cover, simplify, simplify_with, stratify, verify_covering, StratifyDepth, StratifyPolicy,
};
use inqkit_core::validate::{validate_model, validate_structure, Property, Report};
use inqkit_core::{Formula, Pointed, Structure, WorldSet};

const HEADER: &str = concat!("inqkit ", env!("CARGO_PKG_VERSION"));

#[derive(Parser)]
#[command(
    name = "inqkit",
    version,
    about = "Finite inquisitive modal model tooling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    World,
    State,
}

impl ModeArg {
    fn mode(self) -> TranslationMode {
        match self {
            ModeArg::World => TranslationMode::World,
            ModeArg::State => TranslationMode::State,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodeModeArg {
    Minimal,
    #[value(name = "locally-full")]
    LocallyFull,
    Full,
}

impl EncodeModeArg {
    fn mode(self) -> EncodeMode {
        match self {
            EncodeModeArg::Minimal => EncodeMode::Minimal,
            EncodeModeArg::LocallyFull => EncodeMode::LocallyFull,
            EncodeModeArg::Full => EncodeMode::Full,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Minimal,
    #[value(name = "locally-full")]
    LocallyFull,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    Stratify,
    #[value(name = "rich-cover")]
    RichCover,
    Simplify,
}

#[derive(Args)]
struct OutputArg {
    /// Write the result to a file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula at a world or information state.
    Check {
        model: PathBuf,
        formula: String,
        /// World to evaluate at (defaults to the file's point).
        #[arg(long)]
        at: Option<String>,
        /// Information state to evaluate at, written {w1,w2}.
        #[arg(long)]
        state: Option<String>,
        #[arg(long)]
        allow_trivial: bool,
    },
    /// Compare two pointed models up to a bisimilarity depth.
    Bisim {
        model1: PathBuf,
        /// World label or state {w1,w2} in the first model.
        point1: String,
        model2: PathBuf,
        /// World label or state {w1,w2} in the second model.
        point2: String,
        /// A round count, or `full`.
        #[arg(long, default_value = "full")]
        depth: String,
        /// Print a distinguishing play when the points differ.
        #[arg(long)]
        transcript: bool,
    },
    /// Synthesize a characteristic formula.
    Charform {
        model: PathBuf,
        /// World point.
        #[arg(long)]
        world: Option<String>,
        /// State point, written {w1,w2}.
        #[arg(long)]
        state: Option<String>,
        /// Inquisitive state point, written agent:world.
        #[arg(long)]
        family: Option<String>,
        /// Bisimilarity depth of the formula.
        #[arg(long)]
        n: usize,
        /// Raise the synthesis depth cap.
        #[arg(long, default_value_t = inqkit_core::charform::DEFAULT_DEPTH_CAP)]
        cap: usize,
    },
    /// Translate a formula into two-sorted first-order logic.
    Translate {
        formula: String,
        #[arg(long, value_enum)]
        mode: ModeArg,
    },
    /// Evaluate first-order formulae over an exported relational model.
    FoEval {
        model: PathBuf,
        /// A modal formula to translate and evaluate.
        #[arg(long, conflicts_with = "fo")]
        formula: Option<String>,
        #[arg(long, value_enum, requires = "formula")]
        mode: Option<ModeArg>,
        /// A raw first-order formula in the s-expression syntax.
        #[arg(long)]
        fo: Option<String>,
        /// World bound to the free world variable w0.
        #[arg(long)]
        at: Option<String>,
        /// State bound to the free state variable s0, written {w1,w2}.
        #[arg(long)]
        state: Option<String>,
        /// Drop the empty information state first.
        #[arg(long)]
        drop_empty: bool,
    },
    /// Brute-force first-order game equivalence of two structures.
    Ef {
        model1: PathBuf,
        model2: PathBuf,
        #[arg(long)]
        q: usize,
        /// Pebble on the first structure: world label or state {..}.
        #[arg(long)]
        point1: Option<String>,
        #[arg(long)]
        point2: Option<String>,
        #[arg(long)]
        drop_empty: bool,
        #[arg(long, default_value_t = inqkit_core::fo::DEFAULT_EF_ROUND_CAP)]
        q_cap: usize,
        #[arg(long, default_value_t = inqkit_core::fo::DEFAULT_EF_SIZE_CAP)]
        size_cap: usize,
    },
    /// Encode a model as a relational structure.
    Encode {
        model: PathBuf,
        #[arg(long, value_enum)]
        mode: EncodeModeArg,
        /// Augment the second sort by the powerset of this state.
        #[arg(long)]
        point_state: Option<String>,
        #[arg(long, default_value_t = DEFAULT_FULL_CAP)]
        full_cap: usize,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Bisimilarity-preserving model surgery.
    Transform {
        model: PathBuf,
        #[arg(long, value_enum)]
        op: OpArg,
        /// Point for stratification: world label or state {..} (defaults to
        /// the file's point).
        #[arg(long)]
        point: Option<String>,
        /// Even stratification depth.
        #[arg(long)]
        depth: Option<usize>,
        /// Unfold without gluing, within a world budget.
        #[arg(long)]
        unbounded: bool,
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[arg(long, value_enum, default_value = "minimal")]
        policy: PolicyArg,
        /// Copy count for rich-cover.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Colour granularity for simplify (a number, or `full`).
        #[arg(long, default_value = "full")]
        granularity: String,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Check a covering file (source, target, projection).
    VerifyCover { covering: PathBuf },
    /// Validate a model property.
    Validate {
        model: PathBuf,
        /// One of: relational-valid, s5, downward-closed, simple,
        /// k-rich:K, n-acyclic:N, stratified:DEPTH.
        #[arg(long)]
        property: String,
        /// Point for stratified (defaults to the file's point).
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        allow_trivial: bool,
    },
    /// S5 structure reports.
    Epistemic {
        model: PathBuf,
        #[command(subcommand)]
        sub: EpistemicCommand,
    },
    /// Render the model as Graphviz DOT.
    ExportDot {
        model: PathBuf,
        #[command(flatten)]
        out: OutputArg,
    },
}

#[derive(Subcommand)]
enum EpistemicCommand {
    /// List the agent classes.
    Classes,
    /// Show a local agent structure with its colouring.
    Local {
        #[arg(long)]
        agent: String,
        #[arg(long)]
        world: String,
        /// A bisimilarity level, or `full`.
        #[arg(long, default_value = "full")]
        granularity: String,
    },
    CheckRich {
        #[arg(long)]
        k: usize,
    },
    CheckSimple,
    CheckAcyclic {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug)]
struct CliError(String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> CliError {
        CliError(e.to_string())
    }
}

fn fail(msg: impl Into<String>) -> CliError {
    CliError(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &PathBuf, allow_trivial: bool) -> Result<ModelFile, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    Ok(parse_model_file(&text, allow_trivial)?)
}

fn load_model(path: &PathBuf, allow_trivial: bool) -> Result<(InqModel, Option<Point>), CliError> {
    let file = load(path, allow_trivial)?;
    let m = file.to_model()?;
    Ok((m, file.point))
}

fn load_structure(path: &PathBuf) -> Result<(Structure, Option<Point>), CliError> {
    let file = load(path, true)?;
    match file.kind {
        ModelKind::Relational(st) => Ok((st, file.point)),
        ModelKind::Plain(_) => Err(fail(format!(
            "{} is a plain model file; `encode` it first",
            path.display()
        ))),
    }
}

/// A point argument: a bare world label or a `{w1,w2}` state.
fn parse_point(m: &InqModel, text: &str) -> Result<Point, CliError> {
    if text.starts_with('{') {
        Ok(Point::State(parse_state(text, &|l| m.world_index(l))?))
    } else {
        m.world_index(text)
            .map(Point::World)
            .ok_or_else(|| fail(format!("unknown world `{text}`")))
    }
}

fn parse_state(text: &str, lookup: &dyn Fn(&str) -> Option<usize>) -> Result<WorldSet, CliError> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| fail(format!("expected a state like {{w1,w2}}, got `{text}`")))?;
    let mut s = WorldSet::EMPTY;
    for part in inner.split(',') {
        let name = part.trim();
        if name.is_empty() {
            continue;
        }
        s.insert(lookup(name).ok_or_else(|| fail(format!("unknown world `{name}`")))?);
    }
    Ok(s)
}

fn parse_formula_for(m: &InqModel, text: &str) -> Result<Formula, CliError> {
    Ok(parse_with_agents(text, m.agents())?)
}

fn emit(out: &OutputArg, text: &str) -> Result<(), CliError> {
    match &out.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| fail(format!("{}: {e}", path.display())))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn report_verdict(report: &Report) -> bool {
    println!("{HEADER}");
    println!("{report}");
    report.pass()
}

fn granularity_arg(text: &str) -> Result<Granularity, CliError> {
    if text == "full" {
        Ok(Granularity::Full)
    } else {
        text.parse::<usize>()
            .map(Granularity::Level)
            .map_err(|_| fail("granularity is a number or `full`"))
    }
}

fn run(cmd: Command) -> Result<bool, CliError> {
    match cmd {
        Command::Check {
            model,
            formula,
            at,
            state,
            allow_trivial,
        } => {
            let (m, file_point) = load_model(&model, allow_trivial)?;
            let f = parse_formula_for(&m, &formula)?;
            let point = match (at, state) {
                (Some(w), None) => parse_point(&m, &w)?,
                (None, Some(s)) => Point::State(parse_state(&s, &|l| m.world_index(l))?),
                (None, None) => file_point
                    .ok_or_else(|| fail("no point: pass --at/--state or add one to the file"))?,
                (Some(_), Some(_)) => return Err(fail("--at and --state are exclusive")),
            };
            let verdict = match point {
                Point::World(w) => truth(&m, w, &f)?,
                Point::State(s) => supports(&m, s, &f)?,
            };
            println!("{verdict}");
            Ok(verdict)
        }

        Command::Bisim {
            model1,
            point1,
            model2,
            point2,
            depth,
            transcript,
        } => {
            let (m1, _) = load_model(&model1, true)?;
            let (m2, _) = load_model(&model2, true)?;
            let p1 = parse_point(&m1, &point1)?;
            let p2 = parse_point(&m2, &point2)?;
            let (d, label) = if depth == "full" {
                (Depth::Full, "fully ".to_string())
            } else {
                let n: usize = depth
                    .parse()
                    .map_err(|_| fail("--depth takes a number or `full`"))?;
                (Depth::Bounded(n), format!("{n}-"))
            };
            let pd1 = Pointed {
                model: &m1,
                point: p1,
            };
            let pd2 = Pointed {
                model: &m2,
                point: p2,
            };
            let verdict = equiv(pd1, pd2, d);
            println!("{HEADER}");
            println!("{}{label}bisimilar", if verdict { "" } else { "not " });
            let rel = compute_layers(&m1, &m2, d);
            for i in 0..=rel.depth_computed() {
                let mut line = format!("layer {i}:");
                for w in 0..m1.world_count() {
                    for w2 in rel.at(i)[w].iter() {
                        write!(line, " ({},{})", m1.world_label(w), m2.world_label(w2)).unwrap();
                    }
                }
                println!("{line}");
            }
            if rel.stabilized() {
                println!("stable at layer {}", rel.depth_computed());
            }
            if transcript && !verdict {
                let n = match d {
                    Depth::Bounded(n) => n,
                    Depth::Full => rel.depth_computed(),
                };
                match distinguishing_play(pd1, pd2, n) {
                    Some(t) => {
                        println!("transcript ({} rounds):", t.rounds);
                        print!("{}", t.render());
                    }
                    None => println!("no distinguishing play within {n} rounds"),
                }
            }
            Ok(verdict)
        }

        Command::Charform {
            model,
            world,
            state,
            family,
            n,
            cap,
        } => {
            let (m, _) = load_model(&model, true)?;
            let mut synth = Synthesizer::with_cap(&m, cap);
            let f = match (world, state, family) {
                (Some(w), None, None) => {
                    let ix = m
                        .world_index(&w)
                        .ok_or_else(|| fail(format!("unknown world `{w}`")))?;
                    synth.chi_world(ix, n)?
                }
                (None, Some(s), None) => {
                    let set = parse_state(&s, &|l| m.world_index(l))?;
                    synth.chi_state(set, n)?
                }
                (None, None, Some(spec)) => {
                    let (agent, w) = spec
                        .split_once(':')
                        .ok_or_else(|| fail("--family takes agent:world"))?;
                    let a = m
                        .agent_index(agent)
                        .ok_or_else(|| fail(format!("unknown agent `{agent}`")))?;
                    let ix = m
                        .world_index(w)
                        .ok_or_else(|| fail(format!("unknown world `{w}`")))?;
                    let fam = m.state_map(a, ix).clone();
                    synth.chi_inqstate(&fam, n)?
                }
                _ => return Err(fail("pass exactly one of --world, --state, --family")),
            };
            println!("{f}");
            Ok(true)
        }

        Command::Translate { formula, mode } => {
            let f = inqkit_core::formula::parse(&formula)?;
            let tr = standard_translate(&f, mode.mode());
            println!("{}", tr.to_sexp());
            Ok(true)
        }

        Command::FoEval {
            model,
            formula,
            mode,
            fo,
            at,
            state,
            drop_empty,
        } => {
            let (st0, _) = load_structure(&model)?;
            let st = if drop_empty {
                st0.drop_empty_state()
            } else {
                st0
            };
            let fof: FOFormula = match (formula, fo) {
                (Some(text), None) => {
                    let mode = mode.ok_or_else(|| fail("--formula needs --mode"))?;
                    let f = inqkit_core::formula::parse(&text)?;
                    standard_translate(&f, mode.mode())
                }
                (None, Some(sexp)) => parse_fo(&sexp)?,
                _ => return Err(fail("pass exactly one of --formula, --fo")),
            };
            let mut assignment = Vec::new();
            if let Some(w) = at {
                let ix = st
                    .world_index(&w)
                    .ok_or_else(|| fail(format!("unknown world `{w}`")))?;
                assignment.push((free_var(TranslationMode::World), Element::World(ix)));
            }
            if let Some(s) = state {
                let set = parse_state(&s, &|l| st.world_index(l))?;
                let ix = st
                    .state_index(set)
                    .ok_or_else(|| fail("state not in the second sort"))?;
                assignment.push((free_var(TranslationMode::State), Element::State(ix)));
            }
            let verdict = fo_eval(&st, &fof, &assignment)?;
            println!("{verdict}");
            Ok(verdict)
        }

        Command::Ef {
            model1,
            model2,
            q,
            point1,
            point2,
            drop_empty,
            q_cap,
            size_cap,
        } => {
            let (a0, _) = load_structure(&model1)?;
            let (b0, _) = load_structure(&model2)?;
            let (a, b) = if drop_empty {
                (a0.drop_empty_state(), b0.drop_empty_state())
            } else {
                (a0, b0)
            };
            let elem = |st: &Structure, text: Option<String>| -> Result<Vec<Element>, CliError> {
                match text {
                    None => Ok(Vec::new()),
                    Some(t) if t.starts_with('{') => {
                        let set = parse_state(&t, &|l| st.world_index(l))?;
                        let ix = st
                            .state_index(set)
                            .ok_or_else(|| fail("state not in the second sort"))?;
                        Ok(vec![Element::State(ix)])
                    }
                    Some(t) => {
                        let ix = st
                            .world_index(&t)
                            .ok_or_else(|| fail(format!("unknown world `{t}`")))?;
                        Ok(vec![Element::World(ix)])
                    }
                }
            };
            let abar = elem(&a, point1)?;
            let bbar = elem(&b, point2)?;
            let verdict = fo_ef_equiv_capped(&a, &abar, &b, &bbar, q, q_cap, size_cap)?;
            println!(
                "{}equivalent at quantifier rank {q}",
                if verdict { "" } else { "not " }
            );
            Ok(verdict)
        }

        Command::Encode {
            model,
            mode,
            point_state,
            full_cap,
            out,
        } => {
            let (m, file_point) = load_model(&model, true)?;
            let point = match point_state {
                Some(s) => Some(parse_state(&s, &|l| m.world_index(l))?),
                None => match file_point {
                    Some(Point::State(s)) => Some(s),
                    _ => None,
                },
            };
            let rel = encode_relational_capped(&m, mode.mode(), point, full_cap)?;
            emit(&out, &print_structure(rel.as_structure(), file_point))?;
            Ok(true)
        }

        Command::Transform {
            model,
            op,
            point,
            depth,
            unbounded,
            budget,
            policy,
            k,
            granularity,
            out,
        } => {
            let (m, file_point) = load_model(&model, true)?;
            match op {
                OpArg::Stratify => {
                    let point = match point {
                        Some(p) => parse_point(&m, &p)?,
                        None => file_point
                            .ok_or_else(|| fail("stratify needs --point or a point in the file"))?,
                    };
                    let d = if unbounded {
                        StratifyDepth::Unbounded { budget }
                    } else {
                        StratifyDepth::Even(
                            depth.ok_or_else(|| fail("stratify needs --depth or --unbounded"))?,
                        )
                    };
                    let pol = match policy {
                        PolicyArg::Minimal => StratifyPolicy::Minimal,
                        PolicyArg::LocallyFull => StratifyPolicy::LocallyFull,
                    };
                    let (rel, new_point) = stratify(&m, point, d, pol)?;
                    emit(&out, &print_structure(rel.as_structure(), Some(new_point)))?;
                }
                OpArg::RichCover => {
                    let cover = rich_cover(&m, k)?;
                    emit(&out, &print_covering(&cover))?;
                }
                OpArg::Simplify => {
                    let gran = granularity_arg(&granularity)?;
                    let simple = match gran {
                        Granularity::Full => simplify(&m)?,
                        g => simplify_with(&m, g)?,
                    };
                    emit(&out, &print_model(&simple, file_point))?;
                }
            }
            Ok(true)
        }

        Command::VerifyCover { covering } => {
            let text = std::fs::read_to_string(&covering)
                .map_err(|e| fail(format!("{}: {e}", covering.display())))?;
            let cover = parse_covering(&text)?;
            Ok(report_verdict(&verify_covering(&cover)))
        }

        Command::Validate {
            model,
            property,
            point,
            allow_trivial,
        } => {
            let file = load(&model, allow_trivial)?;
            let prop = {
                let (name, arg) = match property.split_once(':') {
                    Some((n, a)) => (n, Some(a)),
                    None => (property.as_str(), None),
                };
                let num = |what: &str| -> Result<usize, CliError> {
                    arg.ok_or_else(|| fail(format!("{name} needs :{what}")))?
                        .parse()
                        .map_err(|_| fail(format!("{name} takes a numeric {what}")))
                };
                match name {
                    "relational-valid" => Property::RelationalValid,
                    "s5" => Property::S5,
                    "downward-closed" => Property::DownwardClosed,
                    "simple" => Property::Simple,
                    "k-rich" => Property::KRich(num("K")?),
                    "n-acyclic" => Property::NAcyclic(num("N")?),
                    "stratified" => {
                        let depth = num("depth")?;
                        let m_for_point = file.to_model()?;
                        let p = match &point {
                            Some(text) => parse_point(&m_for_point, text)?,
                            None => file.point.ok_or_else(|| {
                                fail("stratified needs --point or a point in the file")
                            })?,
                        };
                        Property::Stratified { depth, point: p }
                    }
                    other => return Err(fail(format!("unknown property `{other}`"))),
                }
            };
            let report = match &file.kind {
                ModelKind::Relational(st) => validate_structure(st, &prop),
                ModelKind::Plain(m) => match prop {
                    // Second-sort properties of a plain model are checked on
                    // its minimal encoding.
                    Property::RelationalValid | Property::Stratified { .. } => {
                        let point_state = match prop {
                            Property::Stratified {
                                point: Point::State(s),
                                ..
                            } => Some(s),
                            _ => None,
                        };
                        let rel = encode_relational_capped(
                            m,
                            EncodeMode::Minimal,
                            point_state,
                            DEFAULT_FULL_CAP,
                        )?;
                        validate_structure(rel.as_structure(), &prop)
                    }
                    _ => validate_model(m, &prop)?,
                },
            };
            Ok(report_verdict(&report))
        }

        Command::Epistemic { model, sub } => {
            let (m, _) = load_model(&model, true)?;
            match sub {
                EpistemicCommand::Classes => {
                    println!("{HEADER}");
                    for (a, _, class) in classes(&m)? {
                        println!("{} {}", m.agents()[a], m.state_label(class));
                    }
                    Ok(true)
                }
                EpistemicCommand::Local {
                    agent,
                    world,
                    granularity,
                } => {
                    let gran = granularity_arg(&granularity)?;
                    let a = m
                        .agent_index(&agent)
                        .ok_or_else(|| fail(format!("unknown agent `{agent}`")))?;
                    let w = m
                        .world_index(&world)
                        .ok_or_else(|| fail(format!("unknown world `{world}`")))?;
                    let _ = a_class_by_label(&m, &agent, &world)?;
                    let local = local_a_structure(&m, a, w, gran)?;
                    println!("{HEADER}");
                    println!("carrier {}", m.state_label(local.carrier));
                    let maximal = local
                        .inqstate
                        .maximal()
                        .iter()
                        .map(|&s| m.state_label(s))
                        .collect::<Vec<_>>()
                        .join(" ");
                    println!("maximal {maximal}");
                    for (w, c) in &local.colouring {
                        println!("colour {} {}", m.world_label(*w), c);
                    }
                    Ok(true)
                }
                EpistemicCommand::CheckRich { k } => Ok(report_verdict(&k_rich_report(&m, k))),
                EpistemicCommand::CheckSimple => Ok(report_verdict(&simple_report(&m))),
                EpistemicCommand::CheckAcyclic { n } => {
                    let s5 = s5_report(&m);
                    if !s5.pass() {
                        return Ok(report_verdict(&s5));
                    }
                    Ok(report_verdict(&n_acyclic_report(&m, n)))
                }
            }
        }

        Command::ExportDot { model, out } => {
            let (m, _) = load_model(&model, true)?;
            emit(&out, &inqkit_core::dot::export_dot(&m))?;
            Ok(true)
        }
    }
}
