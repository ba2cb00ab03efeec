//! Runs a resolved configuration and writes per-run artifacts plus an aggregate table.
//!
//! Runs execute on a rayon pool; results are collected in task order and
//! aggregated sequentially, so outputs do not depend on the thread count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use fsps_core::baselines::{divergence_harness, sart_run};
use fsps_core::io::{write_json, write_matrix_csv, write_pgm, write_trace_csv};
use fsps_core::linalg;
use fsps_core::metrics::{infeas, rerr, rmse, ssim, stat_residual, MetricReport};
use fsps_core::problems::{make_ct_problem, make_sharp_ratio, make_toy_recovery, CtInstance};
use fsps_core::registry::{Instance, SolverRegistry, Tomography};
use fsps_core::set::SetKind;
use fsps_core::solvers::{RunOutput, Start, Trace};
use fsps_core::FractionalProblem;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CtParams, ExperimentKind, ProblemParams, Resolved, ResolvedSolver};
use crate::error::CliError;

pub const DIVERGE_NOTE: &str = "no convergence (expected)";

#[derive(Debug, Clone)]
pub struct Options {
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub quiet: bool,
}

/// What a finished command reports back.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub runs: usize,
    pub failed: usize,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Group {
    Toy { beta: f64 },
    Sharp { n: usize, m1: usize, m2: usize },
    Ct { range: f64 },
    Custom,
}

impl Group {
    fn dir(&self) -> String {
        match self {
            Group::Toy { beta } => format!("beta-{beta}"),
            Group::Sharp { n, m1, m2 } => format!("n{n}-m{m1}-m{m2}"),
            Group::Ct { range } => format!("range-{range}"),
            Group::Custom => "custom".into(),
        }
    }

    fn label(&self) -> Value {
        match self {
            Group::Toy { beta } => json!({"beta": beta}),
            Group::Sharp { n, m1, m2 } => json!({"n": n, "m1": m1, "m2": m2}),
            Group::Ct { range } => json!({"range_deg": range}),
            Group::Custom => json!({}),
        }
    }
}

struct Task {
    group: Group,
    solver: ResolvedSolver,
    seed: u64,
    dir: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
struct Summary {
    experiment: &'static str,
    group: Value,
    solver: String,
    seed: u64,
    #[serde(flatten)]
    metrics: MetricReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

struct Finished {
    group: Group,
    solver: String,
    summary: Summary,
}

pub fn run(resolved: &Resolved, opts: &Options) -> Result<Outcome, CliError> {
    fs::create_dir_all(&opts.out)?;
    write_json(&opts.out.join("config.json"), resolved)?;
    if let ProblemParams::Diverge(p) = &resolved.problem {
        return run_diverge(p.iterations, opts);
    }

    let tasks = plan(resolved, &opts.out);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()?;
    let registry = SolverRegistry::with_defaults();
    let ctx = Context::new(resolved)?;
    let results: Vec<Result<Finished, CliError>> =
        pool.install(|| tasks.par_iter().map(|t| execute(t, resolved, &ctx, &registry)).collect());

    let mut finished = Vec::with_capacity(results.len());
    for r in results {
        finished.push(r?);
    }
    let failed = finished.iter().filter(|f| f.summary.error.is_some()).count();
    if !opts.quiet {
        for f in &finished {
            let m = &f.summary.metrics;
            let status = f.summary.error.as_deref().unwrap_or(&m.termination);
            println!(
                "{:<16} {:<10} seed {:<4} obj {:<14.6e} iters {:<6} {}",
                f.group.dir(),
                f.solver,
                f.summary.seed,
                m.obj,
                m.iterations,
                status
            );
        }
    }
    fs::write(opts.out.join("aggregate.csv"), aggregate(resolved.experiment, &finished))?;
    Ok(Outcome {
        runs: finished.len(),
        failed,
        notes: Vec::new(),
    })
}

fn plan(resolved: &Resolved, out: &Path) -> Vec<Task> {
    let groups: Vec<Group> = match &resolved.problem {
        ProblemParams::Toy(p) => p.betas.iter().map(|&beta| Group::Toy { beta }).collect(),
        ProblemParams::Sharp(p) => p
            .scenarios
            .iter()
            .map(|&[n, m1, m2]| Group::Sharp { n, m1, m2 })
            .collect(),
        ProblemParams::Ct(p) => p.ranges.iter().map(|&range| Group::Ct { range }).collect(),
        ProblemParams::Custom(_) => vec![Group::Custom],
        ProblemParams::Diverge(_) => Vec::new(),
    };
    // the toy instance is deterministic; one seed suffices
    let seeds: &[u64] = match resolved.experiment {
        ExperimentKind::ToyBetaSweep => &resolved.seeds[..1],
        _ => &resolved.seeds,
    };
    let mut tasks = Vec::new();
    for g in &groups {
        for s in &resolved.solvers {
            for &seed in seeds {
                tasks.push(Task {
                    group: g.clone(),
                    solver: s.clone(),
                    seed,
                    dir: out.join(g.dir()).join(&s.name).join(format!("seed-{seed}")),
                });
            }
        }
    }
    tasks
}

/// Instances shared by all solvers of a group, built once up front.
struct Context {
    ct: Vec<(f64, u64, Arc<CtInstance>, Vec<f64>)>,
}

impl Context {
    fn new(resolved: &Resolved) -> Result<Self, CliError> {
        let mut ct = Vec::new();
        if let ProblemParams::Ct(p) = &resolved.problem {
            for &range in &p.ranges {
                for &seed in &resolved.seeds {
                    let inst = make_ct_problem(p.side, range, p.sigma, seed)?;
                    let warm = warm_start(&inst, p)?;
                    ct.push((range, seed, Arc::new(inst), warm));
                }
            }
        }
        Ok(Self { ct })
    }

    fn ct(&self, range: f64, seed: u64) -> (&CtInstance, &[f64]) {
        let (_, _, inst, warm) = self
            .ct
            .iter()
            .find(|(r, s, _, _)| *r == range && *s == seed)
            .expect("every planned range/seed was built");
        (inst, warm)
    }
}

fn warm_start(inst: &CtInstance, p: &CtParams) -> Result<Vec<f64>, CliError> {
    let zero = vec![0.0; inst.side * inst.side];
    let run = sart_run(
        &inst.projector,
        &inst.measurements,
        &zero,
        p.warm_start_sweeps,
        1.0,
        (inst.lower, inst.upper),
    )?;
    Ok(run.x)
}

fn execute(task: &Task, resolved: &Resolved, ctx: &Context, registry: &SolverRegistry) -> Result<Finished, CliError> {
    fs::create_dir_all(&task.dir)?;
    let mut params = task.solver.params.clone();
    if let Group::Toy { beta } = task.group {
        params["beta"] = json!(beta);
    }
    write_json(
        &task.dir.join("config.json"),
        &json!({
            "experiment": resolved.experiment.name(),
            "group": task.group.label(),
            "solver": task.solver.name,
            "seed": task.seed,
            "params": params,
        }),
    )?;

    let (instance, start, eval, ct): (Instance, Start, Option<FractionalProblem>, Option<&CtInstance>) =
        match (&task.group, &resolved.problem) {
            (Group::Toy { .. }, _) => {
                let toy = make_toy_recovery();
                (Instance::new(toy.problem), toy.start, None, None)
            }
            (Group::Sharp { n, m1, m2 }, _) => {
                let inst = make_sharp_ratio(*n, *m1, *m2, task.seed)?;
                let start = Start::at(vec![1.0 / *n as f64; *n]);
                (Instance::new(inst.problem), start, Some(inst.original), None)
            }
            (Group::Ct { range }, _) => {
                let (inst, warm) = ctx.ct(*range, task.seed);
                let start = if task.solver.name == "sart" {
                    Start::default()
                } else {
                    Start::at(warm.to_vec())
                };
                let instance = Instance {
                    problem: inst.problem.clone(),
                    tomography: Some(Tomography {
                        projector: Arc::clone(&inst.projector),
                        measurements: inst.measurements.clone(),
                        bounds: (inst.lower, inst.upper),
                    }),
                };
                (instance, start, None, Some(inst))
            }
            (Group::Custom, ProblemParams::Custom(p)) => {
                let problem = p.spec.build()?;
                let x0 = match &p.x0 {
                    Some(x) => x.clone(),
                    None => problem.sample_feasible(1, task.seed).remove(0),
                };
                (Instance::new(problem), Start::at(x0), None, None)
            }
            (Group::Custom, _) => unreachable!("custom groups come from custom problems"),
        };

    let x0 = start
        .x0
        .clone()
        .unwrap_or_else(|| vec![0.0; instance.problem.dim()]);
    let x0_obj = instance.problem.objective_or_inf(&x0);
    let trace_path = task.dir.join("trace.csv");
    let solved = registry
        .create(&task.solver.name, &params)
        .and_then(|s| s.solve(&instance, &start));

    let summary = match solved {
        Ok(out) => {
            write_trace_csv(&trace_path, &out.trace, x0_obj)?;
            let metrics = measure(&out, eval.as_ref().unwrap_or(&instance.problem), ct)?;
            if let Some(inst) = ct {
                write_ct_artifacts(&task.dir, &out.x, inst)?;
            }
            Summary {
                experiment: resolved.experiment.name(),
                group: task.group.label(),
                solver: task.solver.name.clone(),
                seed: task.seed,
                metrics,
                error: None,
            }
        }
        Err(e) => {
            let partial = e.trace().cloned().unwrap_or_else(|| Trace::new(&task.solver.name, x0_obj));
            write_trace_csv(&trace_path, &partial, x0_obj)?;
            Summary {
                experiment: resolved.experiment.name(),
                group: task.group.label(),
                solver: task.solver.name.clone(),
                seed: task.seed,
                metrics: MetricReport {
                    obj: f64::NAN,
                    infeas: f64::NAN,
                    wall_time_s: 0.0,
                    iterations: partial.len(),
                    termination: "error".into(),
                    ..MetricReport::default()
                },
                error: Some(e.to_string()),
            }
        }
    };
    write_json(&task.dir.join("summary.json"), &summary)?;
    Ok(Finished {
        group: task.group.clone(),
        solver: task.solver.name.clone(),
        summary,
    })
}

fn measure(out: &RunOutput, eval: &FractionalProblem, ct: Option<&CtInstance>) -> Result<MetricReport, CliError> {
    let x = &out.x;
    let infeasibility = match eval.set.kind() {
        SetKind::Simplex => infeas(x),
        _ => linalg::dist(x, &eval.set.project(x)),
    };
    // the stationarity solve needs a feasible point with f(Kx) > 0
    let stat = match ct {
        Some(_) => None,
        None => stat_residual(eval, x).ok(),
    };
    let termination = serde_json::to_value(out.report.termination)?
        .as_str()
        .unwrap_or("unknown")
        .to_string();
    Ok(MetricReport {
        obj: eval.objective_or_inf(x),
        infeas: infeasibility,
        stat: stat.map(|s| s.value),
        stat_upper_bound: stat.is_some_and(|s| s.upper_bound),
        rmse: ct.map(|c| rmse(x, &c.phantom)).transpose()?,
        ssim: ct.map(|c| ssim(x, &c.phantom, c.side)).transpose()?,
        rerr: eval.x_true.as_ref().map(|t| rerr(x, t)).transpose()?,
        wall_time_s: out.report.wall_time_s,
        iterations: out.report.iterations,
        termination,
    })
}

fn write_ct_artifacts(dir: &Path, x: &[f64], inst: &CtInstance) -> Result<(), CliError> {
    let n = inst.side;
    write_pgm(&dir.join("reconstruction.pgm"), x, n, n, inst.lower, inst.upper)?;
    write_matrix_csv(&dir.join("reconstruction.csv"), x, n, n)?;
    write_matrix_csv(
        &dir.join("sinogram.csv"),
        &inst.measurements,
        inst.angles_deg.len(),
        inst.detectors,
    )?;
    let phantom = dir
        .parent()
        .and_then(Path::parent)
        .map(|group| group.join("phantom.pgm"));
    if let Some(p) = phantom {
        if !p.exists() {
            write_pgm(&p, &inst.phantom, n, n, inst.lower, inst.upper)?;
        }
    }
    Ok(())
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Means over successful trials, one row per (group, solver) in plan order.
fn aggregate(kind: ExperimentKind, finished: &[Finished]) -> String {
    let header = match kind {
        ExperimentKind::ToyBetaSweep => "beta,solver,trials,iterations,rerr,obj,wall_time_s",
        ExperimentKind::SharpRatio => "n,m1,m2,solver,trials,obj,infeas,stat,cpu_s,iterations",
        ExperimentKind::Ct => "range_deg,solver,trials,ssim,rmse,obj,cpu_s,iterations",
        _ => "solver,trials,obj,infeas,stat,cpu_s,iterations",
    };
    let mut csv = format!("{header}\n");
    let mut keys: Vec<(&Group, &str)> = Vec::new();
    for f in finished {
        if !keys.iter().any(|(g, s)| **g == f.group && *s == f.solver) {
            keys.push((&f.group, &f.solver));
        }
    }
    for (group, solver) in keys {
        let ok: Vec<&MetricReport> = finished
            .iter()
            .filter(|f| f.group == *group && f.solver == solver && f.summary.error.is_none())
            .map(|f| &f.summary.metrics)
            .collect();
        let m = |get: &dyn Fn(&MetricReport) -> Option<f64>| mean(ok.iter().filter_map(|r| get(r)));
        let obj = cell(m(&|r| Some(r.obj)));
        let iters = cell(m(&|r| Some(r.iterations as f64)));
        let time = cell(m(&|r| Some(r.wall_time_s)));
        let trials = ok.len();
        let _ = match group {
            Group::Toy { beta } => writeln!(
                csv,
                "{beta},{solver},{trials},{iters},{},{obj},{time}",
                cell(m(&|r| r.rerr))
            ),
            Group::Sharp { n, m1, m2 } => writeln!(
                csv,
                "{n},{m1},{m2},{solver},{trials},{obj},{},{},{time},{iters}",
                cell(m(&|r| Some(r.infeas))),
                cell(m(&|r| r.stat))
            ),
            Group::Ct { range } => writeln!(
                csv,
                "{range},{solver},{trials},{},{},{obj},{time},{iters}",
                cell(m(&|r| r.ssim)),
                cell(m(&|r| r.rmse))
            ),
            Group::Custom => writeln!(
                csv,
                "{solver},{trials},{obj},{},{},{time},{iters}",
                cell(m(&|r| Some(r.infeas))),
                cell(m(&|r| r.stat))
            ),
        };
    }
    csv
}

fn run_diverge(iterations: usize, opts: &Options) -> Result<Outcome, CliError> {
    let dir = opts.out.join("diverge");
    fs::create_dir_all(&dir)?;
    let run = divergence_harness(iterations)?;
    write_trace_csv(&dir.join("trace.csv"), &run.trace, run.trace.theta0)?;

    let mut csv = String::from("k,x1,x2,y1,y2,z1,z2,theta\n");
    for it in &run.iterates {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            it.k, it.x[0], it.x[1], it.y[0], it.y[1], it.z[0], it.z[1], it.theta
        );
    }
    fs::write(dir.join("iterates.csv"), csv)?;

    let mut distinct: Vec<&Vec<f64>> = Vec::new();
    for it in &run.iterates {
        if !distinct.contains(&&it.x) {
            distinct.push(&it.x);
        }
    }
    let thetas = run.iterates.iter().map(|i| i.theta);
    let lo = thetas.clone().fold(f64::INFINITY, f64::min);
    let hi = thetas.fold(f64::NEG_INFINITY, f64::max);
    write_json(
        &dir.join("summary.json"),
        &json!({
            "experiment": ExperimentKind::Diverge.name(),
            "iterations": iterations,
            "distinct_points": distinct.len(),
            "theta_min": lo,
            "theta_max": hi,
            "note": DIVERGE_NOTE,
        }),
    )?;
    fs::write(
        opts.out.join("aggregate.csv"),
        format!(
            "iterations,distinct_points,theta_min,theta_max,note\n{iterations},{},{lo},{hi},{DIVERGE_NOTE}\n",
            distinct.len()
        ),
    )?;
    if !opts.quiet {
        println!("diverge: {} iterates cycle through {} points; {DIVERGE_NOTE}", iterations, distinct.len());
    }
    Ok(Outcome {
        runs: 1,
        failed: 0,
        notes: vec![DIVERGE_NOTE.to_string()],
    })
}
