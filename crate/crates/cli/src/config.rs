//! Experiment configuration: JSON schema, defaults and validation.
//!
//! Validation never stops at the first problem. It reports unknown fields
//! (compared against the serialized defaults of each section), type errors and
//! range violations together, each with a field path and, where the key can be
//! found in the source text, a line number.

use std::path::{Path, PathBuf};

use fsps_core::baselines::DinkelbachConfig;
use fsps_core::problem::ProblemSpec;
use fsps_core::problems::sharp_ratio::SCENARIOS;
use fsps_core::registry::{SartConfig, SolverRegistry};
use fsps_core::solvers::{FspsConfig, StageOverride};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, Diagnostic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ToyBetaSweep,
    Diverge,
    SharpRatio,
    Ct,
    Custom,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::ToyBetaSweep,
        ExperimentKind::Diverge,
        ExperimentKind::SharpRatio,
        ExperimentKind::Ct,
        ExperimentKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ToyBetaSweep => "toy-beta-sweep",
            ExperimentKind::Diverge => "diverge",
            ExperimentKind::SharpRatio => "sharp-ratio",
            ExperimentKind::Ct => "ct",
            ExperimentKind::Custom => "custom",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentKind::ToyBetaSweep => {
                "2-D sparse recovery; iterations to RErr < 1e-6 for each extrapolation beta"
            }
            ExperimentKind::Diverge => "gamma = 0 cycling instance; emits the exact 2-cycle",
            ExperimentKind::SharpRatio => {
                "robust sharp-ratio portfolios on the simplex; mean obj/infeas/stat/CPU per scenario"
            }
            ExperimentKind::Ct => "limited-angle parallel-beam CT of the Shepp-Logan phantom; SSIM/RMSE per range",
            ExperimentKind::Custom => "any problem given as a JSON specification",
        }
    }

    /// Solvers that can run on this kind of instance.
    pub fn allows(self, solver: &str) -> bool {
        match self {
            ExperimentKind::Diverge => false,
            ExperimentKind::ToyBetaSweep => matches!(solver, "fsps" | "adaptive" | "nls"),
            ExperimentKind::Ct => true,
            ExperimentKind::SharpRatio | ExperimentKind::Custom => solver != "sart",
        }
    }

    pub fn default_solvers(self) -> Vec<SolverEntry> {
        let names: &[&str] = match self {
            ExperimentKind::ToyBetaSweep => &["fsps"],
            ExperimentKind::Diverge => &[],
            ExperimentKind::SharpRatio => &["nls", "dinkelbach"],
            ExperimentKind::Ct => &["nls", "sart"],
            ExperimentKind::Custom => &["adaptive"],
        };
        names
            .iter()
            .map(|n| SolverEntry {
                name: n.to_string(),
                params: Value::Null,
            })
            .collect()
    }

    /// Parameters used unless the configuration overrides them.
    pub fn default_params(self, solver: &str) -> Value {
        match (self, solver) {
            (ExperimentKind::ToyBetaSweep, "fsps") => json!({
                "max_iter": 200000, "tol": 1e-6, "stop_rule": "relative_error",
                "schedules": {
                    "gamma": {"kind": "geometric", "gamma0": 1.0, "ratio": 0.9999},
                    "delta": {"kind": "standard", "offset": 5.0}
                }
            }),
            (ExperimentKind::ToyBetaSweep, _) => {
                json!({"max_iter": 200000, "tol": 1e-6, "stop_rule": "relative_error"})
            }
            (ExperimentKind::SharpRatio, "nls" | "adaptive" | "fsps") => json!({
                "beta": 1.6, "nu": 20.0, "q": 0.995, "gamma_budget": 10000, "mu": 1e-3,
                "eta": 1.5, "c": 1e-4, "memory": 5, "ls_budget": 250, "max_iter": 500,
                "tol": 1e-6, "stop_rule": "relative_next"
            }),
            (ExperimentKind::Ct, "nls" | "adaptive" | "fsps") => json!({
                "mu": 0.4, "eta": 1.2, "q": 0.998, "memory": 5, "c": 2e-4, "ls_budget": 250,
                "gamma_budget": 1000, "tol": 1e-5, "stop_rule": "relative_previous",
                "stages": [
                    {"beta": 1.1, "nu": 1000.0, "max_iter": 50},
                    {"beta": 1.45, "nu": 350.0, "max_iter": 3000}
                ]
            }),
            (ExperimentKind::Ct, "sart") => json!({"iterations": 5000, "relaxation": 1.0}),
            _ => json!({}),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverEntry {
    pub name: String,
    #[serde(default)]
    pub params: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToyParams {
    pub betas: Vec<f64>,
}

impl Default for ToyParams {
    fn default() -> Self {
        Self {
            betas: vec![0.2, 0.6, 1.0, 1.4, 1.8],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DivergeParams {
    pub iterations: usize,
}

impl Default for DivergeParams {
    fn default() -> Self {
        Self { iterations: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SharpParams {
    /// `(n, m1, m2)` triples.
    pub scenarios: Vec<[usize; 3]>,
}

impl Default for SharpParams {
    fn default() -> Self {
        Self {
            scenarios: SCENARIOS.iter().map(|&(n, a, b)| [n, a, b]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CtParams {
    pub side: usize,
    pub ranges: Vec<f64>,
    pub sigma: f64,
    /// SART sweeps from zero that produce the start of the other solvers.
    pub warm_start_sweeps: usize,
}

impl Default for CtParams {
    fn default() -> Self {
        Self {
            side: 64,
            ranges: vec![90.0, 120.0, 150.0],
            sigma: 0.0,
            warm_start_sweeps: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomParams {
    pub spec: ProblemSpec,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ProblemParams {
    Toy(ToyParams),
    Diverge(DivergeParams),
    Sharp(SharpParams),
    Ct(CtParams),
    Custom(Box<CustomParams>),
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

const TOP_LEVEL: [&str; 6] = ["experiment", "solvers", "problem", "seeds", "trials", "output"];

/// A solver with its effective parameters (defaults merged with overrides).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedSolver {
    pub name: String,
    pub params: Value,
}

/// A validated configuration ready to run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub experiment: ExperimentKind,
    pub solvers: Vec<ResolvedSolver>,
    pub problem: ProblemParams,
    pub seeds: Vec<u64>,
    pub output: Option<PathBuf>,
}

impl Resolved {
    /// Replaces the seed list by `seed, seed+1, …` keeping the trial count.
    pub fn with_seed(mut self, seed: u64, trials: Option<usize>) -> Self {
        let count = trials.unwrap_or(self.seeds.len()).max(1);
        self.seeds = (0..count as u64).map(|i| seed + i).collect();
        self
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses and validates; all problems are returned together.
pub fn resolve(text: &str) -> Result<Resolved, Vec<Diagnostic>> {
    let root: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            return Err(vec![Diagnostic::at(
                format!("line {}, column {}", e.line(), e.column()),
                strip_position(&e.to_string()),
            )])
        }
    };
    let mut diags = Vec::new();
    let Some(obj) = root.as_object() else {
        return Err(vec![Diagnostic::at("line 1", "configuration must be a JSON object")]);
    };
    let loc = |path: &str| locate(text, path);

    for key in obj.keys() {
        if !TOP_LEVEL.contains(&key.as_str()) {
            diags.push(Diagnostic::at(
                loc(key),
                format!("unknown field `{key}` (expected one of {})", TOP_LEVEL.join(", ")),
            ));
        }
    }

    let kind = match obj.get("experiment") {
        None => {
            diags.push(Diagnostic::at("experiment", "missing required field"));
            None
        }
        Some(Value::String(s)) => {
            let k = ExperimentKind::parse(s);
            if k.is_none() {
                let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                diags.push(Diagnostic::at(
                    loc("experiment"),
                    format!("unknown experiment `{s}` (expected one of {})", names.join(", ")),
                ));
            }
            k
        }
        Some(_) => {
            diags.push(Diagnostic::at(loc("experiment"), "must be a string"));
            None
        }
    };

    let seeds: Vec<u64> = match obj.get("seeds") {
        None => default_seeds(),
        Some(v) => match serde_json::from_value::<Vec<u64>>(v.clone()) {
            Ok(s) if s.is_empty() => {
                diags.push(Diagnostic::at(loc("seeds"), "seed list must not be empty"));
                Vec::new()
            }
            Ok(s) => s,
            Err(e) => {
                diags.push(Diagnostic::at(loc("seeds"), format!("expected a list of nonnegative integers: {e}")));
                Vec::new()
            }
        },
    };
    let trials = match obj.get("trials") {
        None | Some(Value::Null) => None,
        Some(v) => match v.as_u64() {
            Some(0) | None => {
                diags.push(Diagnostic::at(loc("trials"), "trials must be a positive integer"));
                None
            }
            Some(t) => Some(t as usize),
        },
    };
    let output = match obj.get("output") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => {
            diags.push(Diagnostic::at(loc("output"), "must be a path string"));
            None
        }
    };

    let Some(kind) = kind else {
        return Err(diags);
    };

    let problem = check_problem(kind, obj.get("problem").unwrap_or(&Value::Null), text, &mut diags);
    let solvers = check_solvers(kind, obj.get("solvers"), text, &mut diags);

    if !diags.is_empty() {
        return Err(diags);
    }
    let mut seeds = seeds;
    if let Some(t) = trials {
        // consecutive integers after the last listed seed
        let mut next = *seeds.last().expect("nonempty seeds") + 1;
        while seeds.len() < t {
            seeds.push(next);
            next += 1;
        }
        seeds.truncate(t);
    }
    Ok(Resolved {
        experiment: kind,
        solvers,
        problem: problem.expect("no diagnostics means the problem parsed"),
        seeds,
        output,
    })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

/// `path` plus the 1-based line of the first occurrence of its last key.
fn locate(text: &str, path: &str) -> String {
    let key = path.rsplit('.').next().unwrap_or(path);
    let key = key.split('[').next().unwrap_or(key);
    let needle = format!("\"{key}\"");
    match text.find(&needle) {
        Some(pos) => format!("{path} (line {})", text[..pos].matches('\n').count() + 1),
        None => path.to_string(),
    }
}

/// Reports keys of `given` absent from the serialized `template`.
fn unknown_keys(given: &Value, template: &Value, path: &str, text: &str, diags: &mut Vec<Diagnostic>) {
    let (Some(g), Some(t)) = (given.as_object(), template.as_object()) else {
        return;
    };
    for key in g.keys() {
        if !t.contains_key(key) {
            let mut known: Vec<&str> = t.keys().map(String::as_str).collect();
            known.sort_unstable();
            diags.push(Diagnostic::at(
                locate(text, &format!("{path}.{key}")),
                format!("unknown field `{key}` (known: {})", known.join(", ")),
            ));
        }
    }
}

fn without_keys(given: &Value, template: &Value) -> Value {
    match (given.as_object(), template.as_object()) {
        (Some(g), Some(t)) => Value::Object(
            g.iter()
                .filter(|(k, _)| t.contains_key(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        ),
        _ => given.clone(),
    }
}

/// Unknown-key check, then typed parse of the known keys.
fn parse_section<T: DeserializeOwned>(
    given: &Value,
    template: &Value,
    path: &str,
    text: &str,
    diags: &mut Vec<Diagnostic>,
) -> Option<T> {
    if !given.is_null() && !given.is_object() {
        diags.push(Diagnostic::at(locate(text, path), "must be an object"));
        return None;
    }
    unknown_keys(given, template, path, text, diags);
    let known = if given.is_null() {
        json!({})
    } else {
        without_keys(given, template)
    };
    match serde_json::from_value(known) {
        Ok(v) => Some(v),
        Err(e) => {
            diags.push(Diagnostic::at(locate(text, path), e.to_string()));
            None
        }
    }
}

fn check_problem(kind: ExperimentKind, given: &Value, text: &str, diags: &mut Vec<Diagnostic>) -> Option<ProblemParams> {
    let before = diags.len();
    let out = match kind {
        ExperimentKind::ToyBetaSweep => {
            let p: ToyParams = parse_section(given, &to_value(&ToyParams::default()), "problem", text, diags)?;
            if p.betas.is_empty() {
                diags.push(Diagnostic::at(locate(text, "problem.betas"), "beta list must not be empty"));
            }
            for b in &p.betas {
                if !(*b > 0.0 && *b < 2.0) {
                    diags.push(Diagnostic::at(
                        locate(text, "problem.betas"),
                        format!("beta = {b} must lie in (0, 2)"),
                    ));
                }
            }
            ProblemParams::Toy(p)
        }
        ExperimentKind::Diverge => {
            let p: DivergeParams =
                parse_section(given, &to_value(&DivergeParams::default()), "problem", text, diags)?;
            if p.iterations < 2 {
                diags.push(Diagnostic::at(locate(text, "problem.iterations"), "need at least 2 iterations"));
            }
            ProblemParams::Diverge(p)
        }
        ExperimentKind::SharpRatio => {
            let p: SharpParams = parse_section(given, &to_value(&SharpParams::default()), "problem", text, diags)?;
            if p.scenarios.is_empty() {
                diags.push(Diagnostic::at(locate(text, "problem.scenarios"), "scenario list must not be empty"));
            }
            for s in &p.scenarios {
                if s.contains(&0) {
                    diags.push(Diagnostic::at(
                        locate(text, "problem.scenarios"),
                        format!("scenario {s:?} has a zero dimension"),
                    ));
                }
            }
            ProblemParams::Sharp(p)
        }
        ExperimentKind::Ct => {
            let p: CtParams = parse_section(given, &to_value(&CtParams::default()), "problem", text, diags)?;
            if p.side < 8 {
                diags.push(Diagnostic::at(locate(text, "problem.side"), format!("side = {} must be at least 8", p.side)));
            }
            if p.ranges.is_empty() {
                diags.push(Diagnostic::at(locate(text, "problem.ranges"), "range list must not be empty"));
            }
            for r in &p.ranges {
                if !(*r >= 1.0 && *r <= 180.0) {
                    diags.push(Diagnostic::at(
                        locate(text, "problem.ranges"),
                        format!("range {r} must lie in [1, 180] degrees"),
                    ));
                }
            }
            if !(p.sigma >= 0.0) {
                diags.push(Diagnostic::at(locate(text, "problem.sigma"), "sigma must be nonnegative"));
            }
            if p.warm_start_sweeps == 0 {
                diags.push(Diagnostic::at(
                    locate(text, "problem.warm_start_sweeps"),
                    "at least one sweep is needed: the zero image has f(Kx) = 0",
                ));
            }
            ProblemParams::Ct(p)
        }
        ExperimentKind::Custom => {
            if given.is_null() {
                diags.push(Diagnostic::at("problem", "custom experiments need `problem.spec`"));
                return None;
            }
            let p: CustomParams = match serde_json::from_value(given.clone()) {
                Ok(p) => p,
                Err(e) => {
                    diags.push(Diagnostic::at(locate(text, "problem"), e.to_string()));
                    return None;
                }
            };
            match p.spec.build() {
                Ok(problem) => {
                    if let Some(x0) = &p.x0 {
                        if x0.len() != problem.dim() {
                            diags.push(Diagnostic::at(
                                locate(text, "problem.x0"),
                                format!("x0 has {} entries, the problem has {}", x0.len(), problem.dim()),
                            ));
                        } else if !problem.set.contains(x0, fsps_core::set::MEMBERSHIP_TOL) {
                            diags.push(Diagnostic::at(locate(text, "problem.x0"), "x0 is not in S"));
                        }
                    }
                }
                Err(e) => diags.push(Diagnostic::at(locate(text, "problem.spec"), e.to_string())),
            }
            ProblemParams::Custom(Box::new(p))
        }
    };
    (diags.len() == before).then_some(out)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("defaults serialize")
}

fn merge(base: &Value, over: &Value) -> Value {
    let mut out = base.as_object().cloned().unwrap_or_default();
    if let Some(o) = over.as_object() {
        for (k, v) in o {
            out.insert(k.clone(), v.clone());
        }
    }
    Value::Object(out)
}

fn check_solvers(
    kind: ExperimentKind,
    given: Option<&Value>,
    text: &str,
    diags: &mut Vec<Diagnostic>,
) -> Vec<ResolvedSolver> {
    let entries: Vec<SolverEntry> = match given {
        None | Some(Value::Null) => kind.default_solvers(),
        Some(v) => match serde_json::from_value(v.clone()) {
            Ok(e) => e,
            Err(e) => {
                diags.push(Diagnostic::at(
                    locate(text, "solvers"),
                    format!("expected a list of {{\"name\", \"params\"}} objects: {e}"),
                ));
                return Vec::new();
            }
        },
    };
    if kind == ExperimentKind::Diverge && !entries.is_empty() {
        diags.push(Diagnostic::at(
            locate(text, "solvers"),
            "the diverge experiment runs its own fixed iteration; leave `solvers` out",
        ));
        return Vec::new();
    }
    if kind != ExperimentKind::Diverge && entries.is_empty() {
        diags.push(Diagnostic::at(locate(text, "solvers"), "solver list must not be empty"));
    }
    let registry = SolverRegistry::with_defaults();
    let mut out = Vec::new();
    for (i, entry) in entries.iter().enumerate() {
        let path = format!("solvers[{i}].params");
        if !registry.contains(&entry.name) {
            diags.push(Diagnostic::at(
                locate(text, &format!("solvers[{i}].name")),
                format!("unknown solver `{}` (known: {})", entry.name, registry.names().join(", ")),
            ));
            continue;
        }
        if !kind.allows(&entry.name) {
            diags.push(Diagnostic::at(
                format!("solvers[{i}]"),
                format!("solver `{}` cannot run a {} experiment", entry.name, kind.name()),
            ));
            continue;
        }
        let params = merge(&kind.default_params(&entry.name), &entry.params);
        if !entry.params.is_null() && !entry.params.is_object() {
            diags.push(Diagnostic::at(path.clone(), "must be an object"));
            continue;
        }
        for msg in param_violations(&entry.name, &params, &path, text, diags) {
            diags.push(Diagnostic::at(path.clone(), msg));
        }
        out.push(ResolvedSolver {
            name: entry.name.clone(),
            params,
        });
    }
    out
}

/// Unknown fields go straight to `diags`; range violations are returned.
fn param_violations(name: &str, params: &Value, path: &str, text: &str, diags: &mut Vec<Diagnostic>) -> Vec<String> {
    match name {
        "fsps" | "adaptive" | "nls" => {
            let mut template = to_value(&FspsConfig::default());
            if name == "fsps" {
                template["schedules"] = Value::Null;
            }
            if let Some(stages) = params.get("stages").and_then(Value::as_array) {
                let stage_template = to_value(&StageOverride::default());
                for (j, s) in stages.iter().enumerate() {
                    unknown_keys(s, &stage_template, &format!("{path}.stages[{j}]"), text, diags);
                }
            }
            let mut known = without_keys(params, &template);
            let schedules = known.as_object_mut().and_then(|o| o.remove("schedules"));
            if let Some(stages) = known.get_mut("stages").and_then(Value::as_array_mut) {
                let stage_template = to_value(&StageOverride::default());
                for s in stages.iter_mut() {
                    *s = without_keys(s, &stage_template);
                }
            }
            unknown_keys(params, &template, path, text, diags);
            let mut v = match serde_json::from_value::<FspsConfig>(known) {
                Ok(cfg) => cfg.violations(),
                Err(e) => vec![e.to_string()],
            };
            if name == "fsps" {
                match schedules {
                    None | Some(Value::Null) => v.push("fsps needs `schedules` with `gamma` and `delta`".into()),
                    Some(s) => {
                        if let Err(e) = serde_json::from_value::<fsps_core::solvers::conceptual::Schedules>(s) {
                            v.push(format!("schedules: {e}"));
                        }
                    }
                }
            }
            v
        }
        "dinkelbach" => {
            let template = to_value(&DinkelbachConfig::default());
            unknown_keys(params, &template, path, text, diags);
            match serde_json::from_value::<DinkelbachConfig>(without_keys(params, &template)) {
                Ok(cfg) => cfg.violations(),
                Err(e) => vec![e.to_string()],
            }
        }
        "sart" => {
            let template = to_value(&SartConfig::default());
            unknown_keys(params, &template, path, text, diags);
            match serde_json::from_value::<SartConfig>(without_keys(params, &template)) {
                Ok(cfg) => {
                    let mut v = Vec::new();
                    if cfg.iterations == 0 {
                        v.push("iterations must be at least 1".into());
                    }
                    if !(cfg.relaxation > 0.0 && cfg.relaxation < 2.0) {
                        v.push(format!("relaxation = {} must lie in (0, 2)", cfg.relaxation));
                    }
                    v
                }
                Err(e) => vec![e.to_string()],
            }
        }
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_for_every_kind() {
        for kind in ExperimentKind::ALL {
            if kind == ExperimentKind::Custom {
                continue;
            }
            let text = format!("{{\"experiment\": \"{}\"}}", kind.name());
            let r = resolve(&text).unwrap();
            assert_eq!(r.experiment, kind);
            assert_eq!(r.seeds, vec![0]);
        }
    }

    #[test]
    fn trials_extend_the_seed_list() {
        let r = resolve(r#"{"experiment": "sharp-ratio", "seeds": [4, 9], "trials": 4}"#).unwrap();
        assert_eq!(r.seeds, vec![4, 9, 10, 11]);
        let r = resolve(r#"{"experiment": "sharp-ratio", "seeds": [4, 9, 12], "trials": 2}"#).unwrap();
        assert_eq!(r.seeds, vec![4, 9]);
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let d = resolve("{\n  \"experiment\": \"ct\",\n  \"seeds\": [1,,]\n}").unwrap_err();
        assert_eq!(d.len(), 1);
        assert!(d[0].location.starts_with("line 3, column"), "{}", d[0]);
    }

    #[test]
    fn all_violations_are_listed() {
        let text = r#"{
  "experiment": "sharp-ratio",
  "bogus": 1,
  "solvers": [{"name": "nls", "params": {"beta": 2.5, "q": 1.0, "speed": 3}}]
}"#;
        let d = resolve(text).unwrap_err();
        let all: Vec<String> = d.iter().map(ToString::to_string).collect();
        assert!(all.iter().any(|m| m.contains("bogus") && m.contains("line 3")), "{all:#?}");
        assert!(all.iter().any(|m| m.contains("speed")), "{all:#?}");
        assert!(all.iter().any(|m| m.contains("(0, 2)")), "{all:#?}");
        assert!(all.iter().any(|m| m.contains("q = 1") && m.contains("(0, 1)")), "{all:#?}");
    }
}
