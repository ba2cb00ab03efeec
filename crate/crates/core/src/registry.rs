//! Name-indexed solver registry.
//!
//! Every method implements [`Solver`]; a [`SolverRegistry`] maps names to
//! factories that build a configured solver from JSON parameters.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::baselines::{dinkelbach_run, sart_run, DinkelbachConfig};
use crate::error::{Error, Result};
use crate::operator::Csr;
use crate::problem::FractionalProblem;
use crate::solvers::conceptual::{fsps_run, Schedules};
use crate::solvers::{
    adaptive::adaptive_fsps_run, nls::nls_run, Clock, FspsConfig, RunOutput, RunReport, Start,
    Termination, Trace,
};

/// Measurement data for methods that work on the raw linear system.
#[derive(Debug, Clone)]
pub struct Tomography {
    pub projector: Arc<Csr>,
    pub measurements: Vec<f64>,
    pub bounds: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub problem: FractionalProblem,
    pub tomography: Option<Tomography>,
}

impl Instance {
    pub fn new(problem: FractionalProblem) -> Self {
        Self {
            problem,
            tomography: None,
        }
    }
}

pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, instance: &Instance, start: &Start) -> Result<RunOutput>;
}

type Factory = Box<dyn Fn(&Value) -> Result<Box<dyn Solver>> + Send + Sync>;

pub struct SolverRegistry {
    factories: BTreeMap<String, Factory>,
}

impl Default for SolverRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

fn parse<T: serde::de::DeserializeOwned + Default>(params: &Value) -> Result<T> {
    if params.is_null() {
        return Ok(T::default());
    }
    Ok(serde_json::from_value(params.clone())?)
}

impl SolverRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    /// Registry with `fsps`, `adaptive`, `nls`, `dinkelbach` and `sart`.
    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register("fsps", |p| {
            let params: FspsParams = parse(p)?;
            params.config.validate()?;
            Ok(Box::new(FspsSolver {
                config: params.config,
                schedules: params
                    .schedules
                    .ok_or_else(|| Error::InvalidArgument("fsps needs gamma/delta schedules".into()))?,
            }))
        });
        r.register("adaptive", |p| {
            let config: FspsConfig = parse(p)?;
            config.validate()?;
            Ok(Box::new(AdaptiveSolver { config }))
        });
        r.register("nls", |p| {
            let config: FspsConfig = parse(p)?;
            config.validate()?;
            Ok(Box::new(NlsSolver { config }))
        });
        r.register("dinkelbach", |p| {
            let config: DinkelbachConfig = parse(p)?;
            let v = config.violations();
            if !v.is_empty() {
                return Err(Error::InvalidArgument(v.join("; ")));
            }
            Ok(Box::new(DinkelbachSolver { config }))
        });
        r.register("sart", |p| {
            let config: SartConfig = parse(p)?;
            if config.iterations == 0 {
                return Err(Error::InvalidArgument("sart iterations must be at least 1".into()));
            }
            Ok(Box::new(SartSolver { config }))
        });
        r
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&Value) -> Result<Box<dyn Solver>> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn create(&self, name: &str, params: &Value) -> Result<Box<dyn Solver>> {
        let factory = self.factories.get(name).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown solver '{name}' (known: {})",
                self.names().join(", ")
            ))
        })?;
        factory(params)
    }
}

/// Parameters of the schedule-driven solver: the usual configuration plus
/// `schedules`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FspsParams {
    pub config: FspsConfig,
    pub schedules: Option<Schedules>,
}

impl<'de> Deserialize<'de> for FspsParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let mut v = Value::deserialize(d)?;
        let schedules = match v.as_object_mut() {
            Some(obj) => obj.remove("schedules"),
            None => return Err(D::Error::custom("fsps parameters must be an object")),
        };
        let config = serde_json::from_value(v).map_err(D::Error::custom)?;
        let schedules = schedules
            .map(serde_json::from_value)
            .transpose()
            .map_err(D::Error::custom)?;
        Ok(Self { config, schedules })
    }
}

pub struct FspsSolver {
    pub config: FspsConfig,
    pub schedules: Schedules,
}

impl Solver for FspsSolver {
    fn name(&self) -> &'static str {
        "fsps"
    }
    fn solve(&self, instance: &Instance, start: &Start) -> Result<RunOutput> {
        fsps_run(&instance.problem, &self.config, &self.schedules, start)
    }
}

pub struct AdaptiveSolver {
    pub config: FspsConfig,
}

impl Solver for AdaptiveSolver {
    fn name(&self) -> &'static str {
        "adaptive"
    }
    fn solve(&self, instance: &Instance, start: &Start) -> Result<RunOutput> {
        adaptive_fsps_run(&instance.problem, &self.config, start)
    }
}

pub struct NlsSolver {
    pub config: FspsConfig,
}

impl Solver for NlsSolver {
    fn name(&self) -> &'static str {
        "nls"
    }
    fn solve(&self, instance: &Instance, start: &Start) -> Result<RunOutput> {
        nls_run(&instance.problem, &self.config, start)
    }
}

pub struct DinkelbachSolver {
    pub config: DinkelbachConfig,
}

impl Solver for DinkelbachSolver {
    fn name(&self) -> &'static str {
        "dinkelbach"
    }
    fn solve(&self, instance: &Instance, start: &Start) -> Result<RunOutput> {
        dinkelbach_run(&instance.problem, &self.config, start)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SartConfig {
    pub iterations: usize,
    pub relaxation: f64,
}

impl Default for SartConfig {
    fn default() -> Self {
        Self {
            iterations: 5000,
            relaxation: 1.0,
        }
    }
}

pub struct SartSolver {
    pub config: SartConfig,
}

impl Solver for SartSolver {
    fn name(&self) -> &'static str {
        "sart"
    }
    /// Starts from zero unless a start is given.
    fn solve(&self, instance: &Instance, start: &Start) -> Result<RunOutput> {
        let tomo = instance
            .tomography
            .as_ref()
            .ok_or_else(|| Error::Unsupported("sart needs tomography data".into()))?;
        let x0 = start
            .x0
            .clone()
            .unwrap_or_else(|| vec![0.0; instance.problem.dim()]);
        let clock = Clock::new(false);
        let run = sart_run(
            &tomo.projector,
            &tomo.measurements,
            &x0,
            self.config.iterations,
            self.config.relaxation,
            tomo.bounds,
        )?;
        let mut trace = Trace::new("sart", 0.0);
        trace.records = Vec::new();
        Ok(RunOutput {
            report: RunReport {
                method: "sart".into(),
                termination: Termination::Completed,
                iterations: self.config.iterations,
                objective: instance.problem.objective_or_inf(&run.x),
                wall_time_s: clock.elapsed(),
            },
            x: run.x,
            state: None,
            trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn default_names_and_unknown() {
        let r = SolverRegistry::with_defaults();
        assert_eq!(r.names(), vec!["adaptive", "dinkelbach", "fsps", "nls", "sart"]);
        assert!(r.create("admm", &Value::Null).is_err());
        assert!(r.create("nls", &json!({"beta": 2.5})).is_err());
        assert!(r.create("nls", &json!({"bogus": 1})).is_err());
        assert!(r.create("fsps", &Value::Null).is_err());
        let s = r
            .create(
                "fsps",
                &json!({"beta": 1.0, "schedules": {
                    "gamma": {"kind": "geometric", "gamma0": 1.0, "ratio": 0.9999},
                    "delta": {"kind": "standard", "offset": 5.0}}}),
            )
            .unwrap();
        assert_eq!(s.name(), "fsps");
    }
}
