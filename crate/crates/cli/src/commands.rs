//! One function per subcommand. Each returns the files it wants written;
//! `main` does the writing.

use std::f64::consts::PI;
use std::path::PathBuf;

use pauliflow::evolution::expm_oracle;
use pauliflow::linalg::Real3;
use pauliflow::trajectory::grid_len;
use pauliflow::{
    apply_map, bloch_to_density, build_map_general, build_map_separable, canonicalize_coupling, density_to_tensor,
    evolve_oracle, evolve_schedule, evolve_tensor, find_bell_time, measure_by_id, optimize_schedule, reduced_bloch,
    simulate_collisions_full, simulate_collisions_maps, tensor_to_density, BathSpec, Collision, CorrelatedContext,
    DurationSpec, GeneralHamiltonian, ObjectiveMode, OptimizationProblem, Sample, ScenarioRng, Schedule, Segment,
    SegmentTemplate, Side, Trajectory,
};
use serde::Serialize;

use crate::config::{
    bloch, coupling, missing, BathConfig, BlochSource, DurationValue, Hamiltonian, InitialState, RunConfig,
};
use crate::error::CliError;
use crate::output;

pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_SAMPLES_PER_COLLISION: usize = 10;
pub const DEFAULT_ORACLE_SAMPLES: usize = 1000;
pub const DEFAULT_ORACLE_SEED: u64 = 42;
pub const ORACLE_TOL: f64 = 1e-10;
pub const COLLISION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Evolve,
    Map,
    Collide,
    Optimize,
    Bell,
    OracleCheck,
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub t: Option<f64>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub gnuplot: bool,
}

/// Text bound for a file, or for stdout when `path` is `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct Emission {
    pub path: Option<PathBuf>,
    pub contents: String,
}

/// Everything a command produced, plus a failure to report after writing.
#[derive(Debug, Default)]
pub struct Report {
    pub emissions: Vec<Emission>,
    pub failure: Option<CliError>,
}

impl From<Vec<Emission>> for Report {
    fn from(emissions: Vec<Emission>) -> Self {
        Report { emissions, failure: None }
    }
}

pub fn run(cmd: Command, cfg: &RunConfig, opts: &Options) -> Result<Report, CliError> {
    match cmd {
        Command::Evolve => cmd_evolve(cfg, opts).map(Into::into),
        Command::Map => cmd_map(cfg, opts).map(Into::into),
        Command::Collide => cmd_collide(cfg, opts).map(Into::into),
        Command::Optimize => cmd_optimize(cfg, opts).map(Into::into),
        Command::Bell => cmd_bell(cfg, opts).map(Into::into),
        Command::OracleCheck => cmd_oracle_check(cfg, opts),
    }
}

fn out_path(cfg: &RunConfig, opts: &Options) -> Option<PathBuf> {
    opts.out.clone().or_else(|| cfg.output.path.clone())
}

fn positive(field: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Config(format!("{field} must be positive, got {x}")))
    }
}

fn non_negative(field: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(CliError::Config(format!("{field} must be non-negative, got {x}")))
    }
}

/// Trajectory CSV plus, if asked, the matching plot script.
fn csv_emissions(traj: &Trajectory, path: Option<PathBuf>, gnuplot: bool) -> Result<Vec<Emission>, CliError> {
    let mut out = vec![Emission { path: path.clone(), contents: output::trajectory_csv(traj) }];
    if gnuplot {
        let csv = path.ok_or_else(|| CliError::Config("--gnuplot needs an output path (--out)".into()))?;
        out.push(Emission { path: Some(csv.with_extension("gp")), contents: output::trajectory_gnuplot(&csv) });
    }
    Ok(out)
}

fn fixed_schedule(cfg: &RunConfig) -> Result<Option<Schedule>, CliError> {
    let Some(entries) = &cfg.schedule else { return Ok(None) };
    let segments = entries
        .iter()
        .enumerate()
        .map(|(i, s)| match &s.duration {
            DurationValue::Time(d) => Ok(Segment {
                coupling: coupling(&format!("schedule[{i}].gamma"), s.gamma)?,
                duration: non_negative(&format!("schedule[{i}].duration"), *d)?,
            }),
            DurationValue::Symbol(sym) => Err(CliError::Config(format!(
                "schedule[{i}].duration: `{sym}` is only allowed in `optimize`; give a number"
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(Schedule::new(segments)?))
}

pub fn cmd_evolve(cfg: &RunConfig, opts: &Options) -> Result<Vec<Emission>, CliError> {
    let e = cfg.initial_state()?.tensor();
    let dt = positive("dt", opts.dt.or(cfg.dt).unwrap_or(DEFAULT_DT))?;
    let t_max = opts.t_max.or(cfg.t_max);

    let traj = match (fixed_schedule(cfg)?, &cfg.hamiltonian) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either `hamiltonian` or `schedule`, not both".into())),
        (None, None) => return Err(CliError::Config("`evolve` needs a `hamiltonian` or a `schedule`".into())),
        (Some(schedule), None) => {
            if t_max.is_some() {
                return Err(CliError::Config(
                    "t_max applies to a single hamiltonian; a schedule sets its own length".into(),
                ));
            }
            evolve_schedule(&e, &schedule, dt)?.trajectory
        }
        (None, Some(_)) => {
            let t_max = non_negative("t_max", t_max.ok_or_else(|| missing("t_max"))?)?;
            match cfg.hamiltonian()? {
                Hamiltonian::Canonical(g) => evolve_schedule(&e, &Schedule::single(g, t_max)?, dt)?.trajectory,
                Hamiltonian::General(h) => {
                    let c = canonicalize_coupling(&h)?;
                    let samples = (0..grid_len(t_max, dt))
                        .map(|k| {
                            let t = k as f64 * dt;
                            Sample::from_tensor(t, &c.evolve(&e, t))
                        })
                        .collect();
                    Trajectory { samples }
                }
            }
        }
    };
    csv_emissions(&traj, out_path(cfg, opts), opts.gnuplot)
}

pub fn cmd_map(cfg: &RunConfig, opts: &Options) -> Result<Vec<Emission>, CliError> {
    let t = non_negative("t", opts.t.or(cfg.t).ok_or_else(|| missing("t"))?)?;
    let g = cfg.canonical_coupling("map")?;
    let map = match cfg.initial_state()? {
        InitialState::Product { b, .. } => build_map_separable(&b, &g, t),
        InitialState::Tensor(e) => build_map_general(&CorrelatedContext::from_tensor(&e), &g, t),
    };
    Ok(vec![Emission { path: out_path(cfg, opts), contents: output::map_json(&map)? }])
}

/// Explicit list or seeded generator.
pub fn build_bath(bath: &BathConfig, seed_override: Option<u64>) -> Result<BathSpec, CliError> {
    let collisions = match bath {
        BathConfig::List(list) => list
            .iter()
            .enumerate()
            .map(|(i, c)| {
                Ok(Collision {
                    environment: bloch(&format!("bath[{i}].b"), c.b)?,
                    coupling: coupling(&format!("bath[{i}].gamma"), c.gamma)?,
                    duration: non_negative(&format!("bath[{i}].tau"), c.tau)?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?,
        BathConfig::Generator(g) => {
            let tau = non_negative("bath.tau", g.tau)?;
            let gamma = coupling("bath.gamma", g.gamma)?;
            let fixed = match &g.b {
                BlochSource::Fixed(v) => Some(bloch("bath.b", *v)?),
                BlochSource::Keyword(k) if k == "random" => None,
                BlochSource::Keyword(k) => {
                    return Err(CliError::Config(format!("bath.b: expected a vector or \"random\", got \"{k}\"")))
                }
            };
            let mut rng = ScenarioRng::new(seed_override.or(g.seed).unwrap_or(0));
            (0..g.count)
                .map(|_| {
                    let environment = fixed.unwrap_or_else(|| rng.bloch(1.0));
                    Collision { environment, coupling: gamma, duration: rng.exponential(tau) }
                })
                .collect()
        }
    };
    Ok(BathSpec::new(collisions)?)
}

pub fn cmd_collide(cfg: &RunConfig, opts: &Options) -> Result<Vec<Emission>, CliError> {
    let a = match cfg.initial_state()? {
        InitialState::Product { a, .. } => a,
        InitialState::Tensor(_) => {
            return Err(CliError::Config("`collide` takes the system state as initial.a, not a tensor".into()))
        }
    };
    let bath = build_bath(cfg.bath.as_ref().ok_or_else(|| missing("bath"))?, opts.seed)?;
    let per = cfg.samples_per_collision.unwrap_or(DEFAULT_SAMPLES_PER_COLLISION);
    let run = simulate_collisions_full(&bloch_to_density(&a), &bath, per)?;
    csv_emissions(&run.trajectory, out_path(cfg, opts), opts.gnuplot)
}

pub fn optimization_problem(cfg: &RunConfig) -> Result<OptimizationProblem, CliError> {
    let entries = cfg.schedule.as_ref().ok_or_else(|| missing("schedule"))?;
    let mut bounds = Vec::new();
    let mut segments = Vec::new();
    for (i, s) in entries.iter().enumerate() {
        let g = coupling(&format!("schedule[{i}].gamma"), s.gamma)?;
        let duration = match &s.duration {
            DurationValue::Time(d) => DurationSpec::Fixed(non_negative(&format!("schedule[{i}].duration"), *d)?),
            DurationValue::Symbol(sym) if sym == "FREE" => {
                let [lo, hi] = s
                    .bounds
                    .ok_or_else(|| CliError::Config(format!("schedule[{i}]: a FREE duration needs `bounds`")))?;
                bounds.push((lo, hi));
                DurationSpec::Free(bounds.len() - 1)
            }
            DurationValue::Symbol(sym) if sym == "REMAINDER" => DurationSpec::Remainder,
            DurationValue::Symbol(sym) => {
                return Err(CliError::Config(format!(
                    "schedule[{i}].duration: expected a number, \"FREE\" or \"REMAINDER\", got \"{sym}\""
                )))
            }
        };
        if s.bounds.is_some() && !matches!(duration, DurationSpec::Free(_)) {
            return Err(CliError::Config(format!("schedule[{i}]: `bounds` only applies to FREE durations")));
        }
        segments.push(SegmentTemplate { coupling: g, duration });
    }
    let objective = match cfg.objective.as_deref() {
        None | Some("final_time") => ObjectiveMode::FinalTime,
        Some("max_over_tail") => ObjectiveMode::MaxOverTail,
        Some(other) => {
            return Err(CliError::Config(format!(
                "objective: expected \"final_time\" or \"max_over_tail\", got \"{other}\""
            )))
        }
    };
    let mut p = OptimizationProblem::new(cfg.initial_state()?.tensor(), segments, bounds)
        .with_measure(measure_by_id(cfg.measure.as_deref().unwrap_or("linear_entropy"))?)
        .with_objective(objective);
    p.total_time = cfg.total_time;
    Ok(p)
}

pub fn cmd_optimize(cfg: &RunConfig, opts: &Options) -> Result<Vec<Emission>, CliError> {
    let p = optimization_problem(cfg)?;
    let res = optimize_schedule(&p)?;
    let out = out_path(cfg, opts);
    let curve_path = cfg
        .output
        .curve
        .clone()
        .or_else(|| out.as_ref().map(|o| o.with_extension("curve.csv")))
        .filter(|_| !res.curve.is_empty());
    let mut emissions = vec![Emission {
        path: out,
        contents: output::to_json(&output::OptResultJson::new(&res, curve_path.as_deref())),
    }];
    if let Some(path) = &curve_path {
        emissions.push(Emission { path: Some(path.clone()), contents: output::curve_csv(&res.curve) });
    }
    if opts.gnuplot {
        let csv = curve_path
            .ok_or_else(|| CliError::Config("--gnuplot needs a single-parameter problem and an output path".into()))?;
        emissions.push(Emission { path: Some(csv.with_extension("gp")), contents: output::curve_gnuplot(&csv) });
    }
    Ok(emissions)
}

pub fn cmd_bell(cfg: &RunConfig, opts: &Options) -> Result<Vec<Emission>, CliError> {
    let (a, b) = match cfg.initial_state()? {
        InitialState::Product { a, b } => (a, b),
        InitialState::Tensor(_) => return Err(CliError::Config("`bell` takes a product start {a, b}".into())),
    };
    let g = cfg.canonical_coupling("bell")?;
    let [lo, hi] = cfg.window.unwrap_or([0.0, PI]);
    let json = match find_bell_time(&a, &b, &g, (lo, hi)) {
        Ok(bt) => output::BellJson { t_bell: Some(bt.t_bell), e_max: Some(bt.e_max), degenerate: false },
        Err(pauliflow::Error::FlatObjective) => output::BellJson { t_bell: None, e_max: None, degenerate: true },
        Err(e) => return Err(e.into()),
    };
    Ok(vec![Emission { path: out_path(cfg, opts), contents: output::to_json(&json) }])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleCheck {
    pub name: &'static str,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<OracleCheck>,
    pub passed: bool,
}

fn check(name: &'static str, cases: usize, max_error: f64, tolerance: f64) -> OracleCheck {
    OracleCheck { name, cases, max_error, tolerance, passed: max_error < tolerance }
}

/// Closed forms against brute-force matrices on seeded random scenarios.
pub fn oracle_suite(samples: usize, seed: u64) -> OracleReport {
    let mut rng = ScenarioRng::new(seed);
    let minor = (samples / 10).max(1);
    let mut checks = Vec::new();

    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let e = rng.physical_tensor();
        let g = rng.coupling(3.0);
        let t = rng.uniform(0.0, PI);
        worst = worst.max(evolve_tensor(&e, &g, t).max_abs_diff(&evolve_oracle(&e, &g, t)));
    }
    checks.push(check("evolution", samples, worst, ORACLE_TOL));

    let mut worst: f64 = 0.0;
    for _ in 0..minor {
        let gamma: Real3 = std::array::from_fn(|_| std::array::from_fn(|_| rng.uniform(-2.0, 2.0)));
        let h = GeneralHamiltonian::nonlocal(gamma);
        let c = canonicalize_coupling(&h).expect("no local terms");
        let e = rng.physical_tensor();
        let t = rng.uniform(0.0, PI);
        let u = expm_oracle(&h, t);
        let want = density_to_tensor(&(u * tensor_to_density(&e) * u.adjoint())).expect("unitary image is Hermitian");
        worst = worst.max(c.evolve(&e, t).max_abs_diff(&want));
    }
    checks.push(check("canonical frame", minor, worst, ORACLE_TOL));

    let mut worst: f64 = 0.0;
    for _ in 0..minor {
        let b = rng.bloch(1.0);
        let g = rng.coupling(3.0);
        let t = rng.uniform(0.0, PI);
        let m = build_map_separable(&b, &g, t);
        for _ in 0..10 {
            let a = rng.bloch(1.0);
            let got = apply_map(&m, &bloch_to_density(&a)).bloch();
            let want = reduced_bloch(&evolve_oracle(&pauliflow::product_tensor(&a, &b), &g, t), Side::A);
            worst = worst.max(got.max_abs_diff(&want));
        }
    }
    checks.push(check("separable map", minor * 10, worst, ORACLE_TOL));

    let mut worst: f64 = 0.0;
    for _ in 0..minor {
        let e = rng.physical_tensor();
        let g = rng.coupling(3.0);
        let t = rng.uniform(0.0, PI);
        let m = build_map_general(&CorrelatedContext::from_tensor(&e), &g, t);
        let got = apply_map(&m, &bloch_to_density(&reduced_bloch(&e, Side::A))).bloch();
        worst = worst.max(got.max_abs_diff(&reduced_bloch(&evolve_oracle(&e, &g, t), Side::A)));
    }
    checks.push(check("correlated map", minor, worst, ORACLE_TOL));

    let mut worst: f64 = 0.0;
    let baths = (samples / 100).max(1);
    for _ in 0..baths {
        let collisions = (0..10)
            .map(|_| Collision {
                environment: rng.bloch(1.0),
                coupling: rng.coupling(2.0),
                duration: rng.uniform(0.0, 1.0),
            })
            .collect();
        let bath = BathSpec::new(collisions).expect("valid bath");
        let rho = bloch_to_density(&rng.bloch(1.0));
        let full = simulate_collisions_full(&rho, &bath, 1).expect("valid bath").final_state;
        worst = worst.max(full.matrix().max_abs_diff(simulate_collisions_maps(&rho, &bath).matrix()));
    }
    checks.push(check("collision routes", baths, worst, COLLISION_TOL));

    let passed = checks.iter().all(|c| c.passed);
    OracleReport { samples, seed, checks, passed }
}

pub fn cmd_oracle_check(cfg: &RunConfig, opts: &Options) -> Result<Report, CliError> {
    let samples = opts.samples.or(cfg.samples).unwrap_or(DEFAULT_ORACLE_SAMPLES);
    if samples == 0 {
        return Err(CliError::Config("samples must be at least 1".into()));
    }
    let seed = opts.seed.or(cfg.seed).unwrap_or(DEFAULT_ORACLE_SEED);
    let report = oracle_suite(samples, seed);
    let failure = (!report.passed).then(|| {
        let names: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        CliError::OracleFailure(names.join(", "))
    });
    Ok(Report { emissions: vec![Emission { path: out_path(cfg, opts), contents: output::to_json(&report) }], failure })
}
