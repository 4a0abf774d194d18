use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cls_core::inference::{infer, StepError, TypedSystem};
use cls_core::matching::MatchError;
use cls_core::rewrite::{explore, parse_rules, untyped_step, Rule, Transition, TransitionGraph};
use cls_core::syntax::{parse_pattern, parse_term, Element, Term};
use cls_core::typesys::{type_of_term, PreType, TypeEnv, TypeSet};
use serde_json::{json, Value};
use thiserror::Error;

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "cls", version, about = "Typed Calculus of Looping Sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical form of a term.
    Fmt { file: PathBuf },
    /// Type-check a term.
    Check {
        #[arg(long)]
        env: PathBuf,
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Principal typing of a pattern.
    Infer {
        #[arg(long)]
        env: PathBuf,
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// One-step successors of a term.
    Step {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        json: bool,
    },
    /// Bounded exploration of the reachable states.
    Run {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        max_states: u64,
        #[arg(long, default_value_t = 100)]
        max_depth: usize,
        /// Write the transition graph in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    env: PathBuf,
    #[arg(long)]
    rules: PathBuf,
    #[arg(long)]
    term: PathBuf,
    /// Ignore types and use the plain rewrite semantics.
    #[arg(long)]
    untyped: bool,
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Load(String),
    #[error("{message}")]
    Type {
        message: String,
        json: Option<Value>,
    },
}

impl Failure {
    fn load(path: &Path, e: impl std::fmt::Display) -> Self {
        Failure::Load(format!("{}: {e}", path.display()))
    }

    fn json_if(self, on: bool) -> Self {
        match self {
            Failure::Type { message, json } => Failure::Type {
                message,
                json: json.filter(|_| on),
            },
            other => other,
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Type { .. } => 1,
            Failure::Load(_) => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::load(path, e))
}

fn load_env(path: &Path) -> Result<TypeEnv, Failure> {
    TypeEnv::parse(&read(path)?).map_err(|e| Failure::load(path, e))
}

fn load_term(path: &Path) -> Result<Term, Failure> {
    parse_term(&read(path)?).map_err(|e| Failure::load(path, e))
}

fn undeclared<'a>(
    env: &TypeEnv,
    elems: impl IntoIterator<Item = &'a Element>,
) -> Option<&'a Element> {
    elems.into_iter().find(|e| env.type_of(e).is_none())
}

struct Model {
    env: TypeEnv,
    rules: Vec<Rule>,
    term: Term,
}

fn load_model(args: &ModelArgs) -> Result<Model, Failure> {
    let env = load_env(&args.env)?;
    let rules = parse_rules(&read(&args.rules)?).map_err(|e| Failure::load(&args.rules, e))?;
    let term = load_term(&args.term)?;
    for r in &rules {
        let elems = r.lhs.elements().into_iter().chain(r.rhs.elements());
        if let Some(e) = undeclared(&env, elems) {
            return Err(Failure::load(
                &args.rules,
                format!("rule {}: undeclared element {e}", r.name),
            ));
        }
    }
    if let Some(e) = undeclared(&env, term.elements()) {
        return Err(Failure::load(&args.term, format!("undeclared element {e}")));
    }
    Ok(Model { env, rules, term })
}

fn names(set: &TypeSet) -> Value {
    set.iter().map(|t| t.name()).collect()
}

fn type_json(ty: &PreType) -> Value {
    json!({"present": names(&ty.present), "required": names(&ty.required)})
}

fn braces(set: &TypeSet) -> String {
    let items: Vec<&str> = set.iter().map(|t| t.name()).collect();
    format!("{{{}}}", items.join(", "))
}

fn error_json(kind: &str, message: &str) -> Value {
    json!({"schema": SCHEMA, "error": {"kind": kind, "message": message}})
}

fn emit(json: bool, value: Value, text: String) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("JSON values serialize")
        );
    } else if !text.is_empty() {
        println!("{text}");
    }
}

fn step_failure(e: StepError) -> Failure {
    match e {
        StepError::IllTypedState { .. } => Failure::Type {
            json: Some(error_json("ill_typed_state", &e.to_string())),
            message: e.to_string(),
        },
        other => Failure::Load(other.to_string()),
    }
}

fn match_failure(e: MatchError) -> Failure {
    Failure::Load(e.to_string())
}

fn successors(model: &Model, untyped: bool) -> Result<Vec<Transition>, Failure> {
    if untyped {
        untyped_step(&model.rules, &model.term).map_err(match_failure)
    } else {
        let sys = TypedSystem::new(model.env.clone(), model.rules.clone())
            .map_err(|e| Failure::Load(e.to_string()))?;
        sys.step(&model.term).map_err(step_failure)
    }
}

fn graph(
    model: &Model,
    untyped: bool,
    max_states: usize,
    max_depth: usize,
) -> Result<TransitionGraph, Failure> {
    if untyped {
        explore(
            |t| untyped_step(&model.rules, t),
            &model.term,
            max_states,
            max_depth,
        )
        .map_err(match_failure)
    } else {
        let sys = TypedSystem::new(model.env.clone(), model.rules.clone())
            .map_err(|e| Failure::Load(e.to_string()))?;
        explore(|t| sys.step(t), &model.term, max_states, max_depth).map_err(step_failure)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Fmt { file } => {
            println!("{}", load_term(&file)?);
        }
        Command::Check { env, file, json } => {
            let env = load_env(&env)?;
            let term = load_term(&file)?;
            match type_of_term(&term, &env) {
                Ok(ty) => emit(
                    json,
                    json!({"schema": SCHEMA, "type": type_json(&ty)}),
                    format!("P = {}; R = {}", braces(&ty.present), braces(&ty.required)),
                ),
                Err(e) => {
                    return Err(Failure::Type {
                        json: json.then(|| error_json("type_error", &e.to_string())),
                        message: e.to_string(),
                    })
                }
            }
        }
        Command::Infer { env, file, json } => {
            let env = load_env(&env)?;
            let pattern = parse_pattern(&read(&file)?).map_err(|e| Failure::load(&file, e))?;
            let r = infer(&pattern, &env).map_err(|e| Failure::load(&file, e))?;
            let scheme: serde_json::Map<String, Value> = r
                .basis_scheme
                .iter()
                .map(|(v, (phi, psi))| (v.to_string(), json!([phi.to_string(), psi.to_string()])))
                .collect();
            let constraints: Vec<String> = r.constraints.iter().map(|c| c.to_string()).collect();
            emit(
                json,
                json!({
                    "schema": SCHEMA,
                    "scheme": scheme,
                    "type": {"present": r.phi.to_string(), "required": r.psi.to_string()},
                    "constraints": constraints,
                }),
                r.to_string(),
            );
        }
        Command::Step { model, json } => {
            let untyped = model.untyped;
            let m = load_model(&model)?;
            let out = successors(&m, untyped).map_err(|f| f.json_if(json))?;
            let list: Vec<Value> = out
                .iter()
                .map(|x| json!({"rule": &*x.rule, "term": x.target.to_string()}))
                .collect();
            let text: Vec<String> = out
                .iter()
                .map(|x| format!("{}: {}", x.rule, x.target))
                .collect();
            emit(
                json,
                json!({"schema": SCHEMA, "successors": list}),
                text.join("\n"),
            );
        }
        Command::Run {
            model,
            max_states,
            max_depth,
            dot,
            json,
        } => {
            let untyped = model.untyped;
            let m = load_model(&model)?;
            let max_states = usize::try_from(max_states).unwrap_or(usize::MAX);
            let g = graph(&m, untyped, max_states, max_depth).map_err(|f| f.json_if(json))?;
            if let Some(path) = &dot {
                fs::write(path, g.to_dot()).map_err(|e| Failure::load(path, e))?;
            }
            let states: Vec<String> = g.states.iter().map(|t| t.to_string()).collect();
            let edges: Vec<Value> = g
                .edges
                .iter()
                .map(|e| json!({"from": e.from, "rule": &*e.rule, "to": e.to}))
                .collect();
            emit(
                json,
                json!({"schema": SCHEMA, "states": states, "edges": edges, "truncated": g.truncated}),
                format!(
                    "states: {}\nedges: {}\ntruncated: {}",
                    g.states.len(),
                    g.edges.len(),
                    g.truncated
                ),
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Failure::Type { json: Some(v), .. } = &f {
                println!(
                    "{}",
                    serde_json::to_string_pretty(v).expect("JSON values serialize")
                );
            }
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
