use std::fs;
use std::path::Path;
use std::process::ExitCode;

use ahl_core::assertions::{DomainError, FiniteDomain, VarDomain};
use ahl_core::calculus::{
    check_derivation, check_triple_semantic, dualize, Derivation, Flavor, Triple, TripleReport, TripleVerdict,
};
use ahl_core::semantics::{run as run_program, ExecOutcome, State, Value};
use ahl_core::syntax::{parse_program, Program};
use ahl_core::transformers::{check_corollary, sp_semantic, sp_syntactic, wp_semantic, CorollaryVerdict, StateSet};
use ahl_core::vcgen::{verify as verify_triple, VcError, VerifyVerdict};
use serde_json::{json, Map, Value as Json};

use crate::state_arg::parse_state;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Ok = 0,
    Failed = 1,
    Qualified = 2,
    Usage = 3,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> ExitCode {
        ExitCode::from(e as u8)
    }
}

/// Fields of the report after `command` and `file`, the exit status, and an
/// optional message for stderr.
pub struct Outcome {
    pub exit: Exit,
    pub report: Map<String, Json>,
    pub message: Option<String>,
}

impl Outcome {
    fn new(exit: Exit, report: Json) -> Outcome {
        let Json::Object(report) = report else {
            panic!("reports are objects");
        };
        Outcome {
            exit,
            report,
            message: None,
        }
    }

    fn error(exit: Exit, kind: &str, message: impl Into<String>) -> Outcome {
        let message = message.into();
        let mut o = Outcome::new(exit, json!({ "verdict": "error", "error": { "kind": kind, "message": message } }));
        o.message = Some(message);
        o
    }

    fn domain(e: DomainError) -> Outcome {
        match e {
            DomainError::CapExceeded { .. } => Outcome::error(Exit::Qualified, "cap_exceeded", e.to_string()),
            _ => Outcome::error(Exit::Usage, "domain", e.to_string()),
        }
    }
}

pub struct Context {
    pub program: Program,
    pub dom: FiniteDomain,
    pub fuel: u64,
}

impl Context {
    pub fn load(path: &Path, fuel: u64, statecap: Option<u64>) -> Result<Context, Outcome> {
        let src = fs::read_to_string(path)
            .map_err(|e| Outcome::error(Exit::Usage, "io", format!("{}: {e}", path.display())))?;
        let program = parse_program(&src).map_err(|e| Outcome::error(Exit::Usage, "parse", e.to_string()))?;
        let mut dom = program.domain.clone();
        if let Some(cap) = statecap {
            dom.state_cap = cap;
        }
        Ok(Context { program, dom, fuel })
    }

    fn triple(&self, flavor: Flavor) -> Result<Triple, Outcome> {
        let (Some(pre), Some(post)) = (&self.program.pre, &self.program.post) else {
            return Err(Outcome::error(Exit::Usage, "usage", "file needs both `pre:` and `post:`"));
        };
        Ok(Triple {
            flavor,
            pre: pre.clone(),
            prog: self.program.body.clone(),
            post: post.clone(),
        })
    }

    fn post(&self) -> Result<&ahl_core::syntax::Assertion, Outcome> {
        self.program
            .post
            .as_ref()
            .ok_or_else(|| Outcome::error(Exit::Usage, "usage", "file needs a `post:` section"))
    }
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(o) => return o,
        }
    };
}

fn triple_exit(r: &TripleReport) -> Exit {
    match r.verdict {
        TripleVerdict::Valid { qualified: false } => Exit::Ok,
        TripleVerdict::Valid { qualified: true } => Exit::Qualified,
        TripleVerdict::Invalid { .. } => Exit::Failed,
    }
}

fn merge(into: &mut Json, from: Json) {
    if let (Json::Object(a), Json::Object(b)) = (into, from) {
        a.extend(b);
    }
}

pub fn check(ctx: &Context, flavor: Flavor) -> Outcome {
    let t = attempt!(ctx.triple(flavor));
    let r = attempt!(check_triple_semantic(&t, &ctx.program.env, &ctx.dom, ctx.fuel).map_err(Outcome::domain));
    let mut v = json!({ "flavor": flavor.name(), "triple": t.to_string() });
    merge(&mut v, r.to_json());
    v["qualified"] = json!(matches!(r.verdict, TripleVerdict::Valid { qualified: true }));
    Outcome::new(triple_exit(&r), v)
}

pub fn verify(ctx: &Context, emit: Option<&Path>) -> Outcome {
    let t = attempt!(ctx.triple(Flavor::Access));
    let r = match verify_triple(&t, &ctx.program.env, &ctx.dom, ctx.fuel) {
        Ok(r) => r,
        Err(VcError::MissingInvariant(at)) => {
            let mut o = Outcome::new(
                Exit::Qualified,
                json!({ "verdict": "missing_invariant", "location": at.to_string() }),
            );
            o.message = Some(format!("while loop at {at} has no invariant"));
            return o;
        }
        Err(VcError::Domain(e)) => return Outcome::domain(e),
        Err(e) => return Outcome::error(Exit::Usage, "vcgen", e.to_string()),
    };
    let mut v = json!({ "triple": t.to_string() });
    merge(&mut v, r.to_json());
    v["loop_obligations"] = json!(r.obligations.len() - 1);
    v["qualified"] = json!(r.verdict == VerifyVerdict::Qualified);
    if let (Some(path), Some(d)) = (emit, &r.derivation) {
        let text = serde_json::to_string_pretty(&d.to_json()).expect("json") + "\n";
        if let Err(e) = fs::write(path, text) {
            return Outcome::error(Exit::Usage, "io", format!("{}: {e}", path.display()));
        }
        v["derivation_file"] = json!(path.display().to_string());
    }
    let exit = match r.verdict {
        VerifyVerdict::Proved => Exit::Ok,
        VerifyVerdict::Failed { .. } => Exit::Failed,
        VerifyVerdict::Qualified | VerifyVerdict::Rejected { .. } => Exit::Qualified,
    };
    Outcome::new(exit, v)
}

fn corollary(ctx: &Context, q: &ahl_core::syntax::Assertion, v: &mut Json) -> Result<Exit, Outcome> {
    let r = check_corollary(&ctx.program.body, q, &ctx.program.env, &ctx.dom, ctx.fuel).map_err(Outcome::domain)?;
    v["corollary"] = r.to_json();
    Ok(match r.verdict {
        CorollaryVerdict::Holds => Exit::Ok,
        CorollaryVerdict::Qualified { .. } => Exit::Qualified,
        CorollaryVerdict::Counterexample { .. } => Exit::Failed,
    })
}

pub fn sp(ctx: &Context, syntactic: bool, with_corollary: bool) -> Outcome {
    let q = attempt!(ctx.post());
    let env = &ctx.program.env;
    let r = attempt!(sp_semantic(&ctx.program.body, q, env, &ctx.dom, ctx.fuel).map_err(Outcome::domain));
    let mut v = json!({
        "verdict": if r.qualified { "qualified" } else { "ok" },
        "post": q.to_string(),
        "sp": r.to_json(),
        "qualified": r.qualified,
    });
    let mut exit = if r.qualified { Exit::Qualified } else { Exit::Ok };
    if syntactic {
        let syn = match sp_syntactic(&ctx.program.body, q) {
            Ok(a) => a,
            Err(e) => return Outcome::error(Exit::Usage, "syntactic", e.to_string()),
        };
        let set = attempt!(StateSet::of_assertion(&syn, env, &ctx.dom).map_err(Outcome::domain));
        v["syntactic"] = json!({ "assertion": syn.to_string(), "agrees": set == r.set });
        if set != r.set {
            exit = exit.max(Exit::Failed);
        }
    }
    if with_corollary {
        exit = exit.max(attempt!(corollary(ctx, q, &mut v)));
    }
    Outcome::new(exit, v)
}

pub fn wp(ctx: &Context, with_corollary: bool) -> Outcome {
    let q = attempt!(ctx.post());
    let r = attempt!(wp_semantic(&ctx.program.body, q, &ctx.program.env, &ctx.dom, ctx.fuel).map_err(Outcome::domain));
    let mut v = json!({
        "verdict": if r.qualified { "qualified" } else { "ok" },
        "post": q.to_string(),
        "wp": r.to_json(),
        "qualified": r.qualified,
    });
    let mut exit = if r.qualified { Exit::Qualified } else { Exit::Ok };
    if with_corollary {
        exit = exit.max(attempt!(corollary(ctx, q, &mut v)));
    }
    Outcome::new(exit, v)
}

pub fn prove(ctx: &Context, path: &Path) -> Outcome {
    let text = attempt!(fs::read_to_string(path)
        .map_err(|e| Outcome::error(Exit::Usage, "io", format!("{}: {e}", path.display()))));
    let raw: Json = attempt!(serde_json::from_str(&text).map_err(|e| Outcome::error(Exit::Usage, "json", e.to_string())));
    let d = attempt!(Derivation::from_json(&raw, &ctx.program.env)
        .map_err(|e| Outcome::error(Exit::Usage, "derivation", e.to_string())));
    let r = attempt!(check_derivation(&d, &ctx.program.env, &ctx.dom, ctx.fuel).map_err(Outcome::domain));
    let matches = match (&ctx.program.pre, &ctx.program.post) {
        (Some(pre), Some(post)) => Some(
            d.conclusion.flavor == Flavor::Access
                && &d.conclusion.pre == pre
                && &d.conclusion.post == post
                && d.prog().erase_invariants() == ctx.program.body.erase_invariants(),
        ),
        _ => None,
    };
    let mut v = json!({ "conclusion": d.conclusion.to_string(), "matches_file": matches });
    merge(&mut v, r.to_json());
    v["qualified"] = json!(r.verdict() == "qualified");
    if matches == Some(false) && r.accepted() {
        v["verdict"] = json!("rejected");
        v["reason"] = json!("conclusion differs from the file's triple");
    }
    let exit = match v["verdict"].as_str() {
        Some("accepted") => Exit::Ok,
        Some("qualified") => Exit::Qualified,
        _ => Exit::Failed,
    };
    Outcome::new(exit, v)
}

fn least(d: &VarDomain) -> Value {
    match d {
        VarDomain::Int { lo, .. } => Value::int(*lo),
        VarDomain::Bool => Value::Bool(false),
        VarDomain::List { .. } => Value::List(vec![]),
    }
}

pub fn run(ctx: &Context, state: &str) -> Outcome {
    let mut init: State = ctx.dom.iter().map(|(name, d)| (name.to_string(), least(d))).collect();
    let given = attempt!(parse_state(state).map_err(|e| Outcome::error(Exit::Usage, "state", e)));
    for (name, value) in given {
        match ctx.program.env.sort_of(&name) {
            None => return Outcome::error(Exit::Usage, "state", format!("unknown variable `{name}`")),
            Some(s) if s != value.sort() => {
                return Outcome::error(Exit::Usage, "state", format!("`{name}` has sort {s}, given a {}", value.sort()))
            }
            Some(_) => init.set(name, value),
        }
    }
    let r = run_program(&ctx.program.body, &init, ctx.fuel);
    let mut v = json!({ "initial": init.to_json(), "fuel_used": r.fuel_used });
    let exit = match &r.outcome {
        ExecOutcome::Terminated(s) => {
            v["verdict"] = json!("terminated");
            v["final"] = s.to_json();
            Exit::Ok
        }
        ExecOutcome::FuelExhausted => {
            v["verdict"] = json!("fuel_exhausted");
            Exit::Qualified
        }
        ExecOutcome::RuntimeError(e) => {
            v["verdict"] = json!("runtime_error");
            v["error"] = json!(e.to_string());
            Exit::Failed
        }
    };
    v["qualified"] = json!(exit == Exit::Qualified);
    Outcome::new(exit, v)
}

pub fn dual(ctx: &Context, flavor: Flavor, check: bool) -> Outcome {
    let t = attempt!(ctx.triple(flavor));
    let d = dualize(&t);
    let mut v = json!({ "verdict": "ok", "triple": t.to_string(), "dual": d.to_string() });
    if !check {
        return Outcome::new(Exit::Ok, v);
    }
    let env = &ctx.program.env;
    let a = attempt!(check_triple_semantic(&t, env, &ctx.dom, ctx.fuel).map_err(Outcome::domain));
    let b = attempt!(check_triple_semantic(&d, env, &ctx.dom, ctx.fuel).map_err(Outcome::domain));
    let exit = triple_exit(&a).max(triple_exit(&b));
    v["verdict"] = json!(match exit {
        Exit::Ok => "valid",
        Exit::Failed => "invalid",
        _ => "qualified",
    });
    v["agree"] = json!(a.is_definitely_valid() == b.is_definitely_valid());
    v["triple_check"] = a.to_json();
    v["dual_check"] = b.to_json();
    v["qualified"] = json!(exit == Exit::Qualified);
    Outcome::new(exit, v)
}
