//! Experiment harness around `bmk-core`: TOML configuration, the five
//! verification experiments, and CSV/JSON report emission.

pub mod config;
pub mod report;

use bmk_core::bmk::{max_residual_per_level, reproduce_residual, SingularQuadratureConfig};
use bmk_core::expr::parse_field;
use bmk_core::friedrichs::{convergence_report, ConvergenceRow, HalfSpaceField, HalfSpaceGrid};
use bmk_core::geometry::{make_domain, Domain, Region};
use bmk_core::qops::{green_stokes_residual, FirstOrderOperator};
use bmk_core::young::{
    admissible_exponents, empirical_norm, Case, log_bound_fit, log_majorant_integral, Exponent, KernelExponents, KernelSpec,
};
use bmk_core::{DifferentialForm, Field};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;
use thiserror::Error;

pub use config::{Experiment, ExperimentConfig, Format, Thresholds};
pub use report::{emit_report, sidecar_path, Check, Metadata, Report, Verdict};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(String),
    #[error("serialization: {0}")]
    Serialize(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Serialize(e.to_string())
    }
}

/// Fixed CSV columns of each experiment.
pub fn columns(e: Experiment) -> &'static [&'static str] {
    match e {
        Experiment::BmkVerify | Experiment::BmkLp => &[
            "level",
            "point",
            "z",
            "residual",
            "boundary_term",
            "volume_term",
            "potential_dbar",
            "excluded",
        ],
        Experiment::Mollify => &ConvergenceRow::COLUMNS,
        Experiment::GreenStokes => &[
            "level",
            "qu_v_re",
            "qu_v_im",
            "u_qstar_v_re",
            "u_qstar_v_im",
            "boundary_re",
            "boundary_im",
            "residual",
        ],
        Experiment::YoungScan => &["p", "case", "r", "empirical_norm", "samples"],
    }
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Measured rows plus checks, before metadata is attached.
struct Outcome {
    rows: Vec<Vec<String>>,
    checks: Vec<Check>,
    extra: Vec<(String, f64)>,
}

enum Failure {
    Usage(CliError),
    /// Numerical error with the rows produced before it.
    Numerical(Vec<Vec<String>>, String),
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Failure::Usage(e)
    }
}

type Run = std::result::Result<Outcome, Failure>;

fn fail(rows: &[Vec<String>], e: impl std::fmt::Display) -> Failure {
    Failure::Numerical(rows.to_vec(), e.to_string())
}

/// Run the configured experiment. Configuration problems are usage errors;
/// numerical failures produce a report with a fail verdict.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report, CliError> {
    let cfg = config.resolved()?;
    let e = cfg.experiment()?;
    let start = Instant::now();
    let result = match e {
        Experiment::BmkVerify | Experiment::BmkLp => run_bmk(&cfg, e == Experiment::BmkLp),
        Experiment::Mollify => run_mollify(&cfg),
        Experiment::GreenStokes => run_green_stokes(&cfg),
        Experiment::YoungScan => run_young(&cfg),
    };
    let (outcome, error) = match result {
        Ok(o) => (o, None),
        Err(Failure::Usage(e)) => return Err(e),
        Err(Failure::Numerical(rows, msg)) => (
            Outcome {
                rows,
                checks: Vec::new(),
                extra: Vec::new(),
            },
            Some(msg),
        ),
    };
    let verdict = Report::verdict_from(&outcome.checks, &error);
    let echo = toml::to_string(&cfg).map_err(|e| CliError::Serialize(e.to_string()))?;
    Ok(Report {
        experiment: e.name().to_string(),
        columns: columns(e).iter().map(|s| s.to_string()).collect(),
        rows: outcome.rows,
        checks: outcome.checks,
        verdict,
        metadata: Metadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: echo,
            wall_time_s: start.elapsed().as_secs_f64(),
            error,
            extra: outcome.extra,
        },
    })
}

fn parse(text: &str, nvars: usize, key: &str) -> Result<Field, CliError> {
    parse_field(text, nvars).map_err(|e| CliError::Usage(format!("{key}: {e}")))
}

fn domain(cfg: &ExperimentConfig) -> Result<Domain, CliError> {
    match &cfg.domain {
        Some(spec) => make_domain(spec).map_err(|e| CliError::Usage(format!("domain: {e}"))),
        None => Err(CliError::Usage("domain: not set".into())),
    }
}

fn operator(cfg: &ExperimentConfig, dim: usize) -> Result<FirstOrderOperator, CliError> {
    let op = cfg.operator.as_ref().ok_or_else(|| CliError::Usage("operator: not set".into()))?;
    let a: Vec<&str> = op.a.iter().map(String::as_str).collect();
    let q = FirstOrderOperator::parse(&a, &op.b).map_err(|e| CliError::Usage(format!("operator: {e}")))?;
    if q.m != dim {
        return Err(CliError::Usage(format!("operator.a: expected {dim} coefficients, got {}", q.m)));
    }
    Ok(q)
}

/// `count` points drawn uniformly from the ball of radius `radius` about
/// `center` (rejection sampling, ChaCha8 seeded from `seed`).
pub fn sample_points(center: &[f64], radius: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = center.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            out.push(x.iter().zip(center).map(|(v, c)| c + radius * v).collect());
        }
    }
    out
}

fn run_bmk(cfg: &ExperimentConfig, lp: bool) -> Run {
    let n = cfg.n.unwrap_or(1);
    let dom = domain(cfg)?;
    if dom.dim() != 2 * n {
        return Err(CliError::Usage(format!("domain: real dimension {} does not match n = {n}", dom.dim())).into());
    }
    if cfg.q > n {
        return Err(CliError::Usage(format!("q: must be at most n = {n}")).into());
    }
    let dzb: Vec<usize> = (1..=cfg.q).collect();
    let form = |text: &str, key: &str| -> Result<DifferentialForm, CliError> {
        DifferentialForm::monomial(n, &[], &dzb, parse(text, 2 * n, key)?).map_err(|e| CliError::Usage(format!("{key}: {e}")))
    };
    let f = form(cfg.f.as_deref().unwrap_or("0"), "f")?;
    let fb = match &cfg.f_boundary {
        Some(t) => form(t, "f_boundary")?,
        None => f.clone(),
    };
    let df = f.dbar().map_err(|e| fail(&[], e))?;
    let center = match &cfg.domain {
        Some(bmk_core::geometry::DomainSpec::Ball { center, .. }) => center.clone(),
        _ => vec![0.0; 2 * n],
    };
    let points = sample_points(&center, cfg.point_radius.unwrap_or(0.5), cfg.points, cfg.seed);
    let quad = SingularQuadratureConfig {
        base_level: cfg.level.unwrap_or(0),
        exclusion_factor: cfg.exclusion_factor,
        refinement_steps: cfg.refinement_steps,
    };
    let rows = reproduce_residual(&f, &fb, &df, &dom, &points, cfg.margin, &quad).map_err(|e| fail(&[], e))?;
    let out_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let k = points.iter().position(|p| *p == r.z).unwrap_or(usize::MAX);
            vec![
                r.level.to_string(),
                k.to_string(),
                r.z.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" "),
                num(r.residual),
                num(r.boundary_term_norm),
                num(r.volume_term_norm),
                num(r.potential_dbar_norm),
                r.excluded.to_string(),
            ]
        })
        .collect();
    let per_level: Vec<f64> = max_residual_per_level(&rows).iter().map(|x| x.1).collect();
    let finest = per_level.last().copied().unwrap_or(f64::NAN);
    let bound = if n == 1 {
        cfg.thresholds.residual_c1
    } else {
        cfg.thresholds.residual_cn
    };
    let mut checks = vec![Check::at_most("finest_max_residual", finest, bound)];
    if lp {
        let decreasing = per_level.len() >= 3 && per_level.windows(2).all(|w| w[1] < w[0]);
        checks.push(Check::holds("residual_decreasing_over_levels", decreasing));
    }
    let extra = per_level
        .iter()
        .enumerate()
        .map(|(k, v)| (format!("max_residual_level_{}", quad.base_level + k), *v))
        .collect();
    Ok(Outcome {
        rows: out_rows,
        checks,
        extra,
    })
}

fn run_mollify(cfg: &ExperimentConfig) -> Run {
    let grid = HalfSpaceGrid::uniform(vec![-1.0, -1.0], vec![0.0, 1.0], cfg.grid).map_err(|e| CliError::Usage(format!("grid: {e}")))?;
    let mut fe = parse(cfg.f.as_deref().unwrap_or("0"), 2, "f")?;
    if let Some(r) = cfg.bump_radius {
        fe = fe.mul(&Field::bump(vec![0.0, 0.0], r));
    }
    let q = operator(cfg, 2)?;
    let qf = q.apply(&fe).map_err(|e| fail(&[], e))?;
    let f = HalfSpaceField::from_field(grid.clone(), fe.clone());
    let qfh = HalfSpaceField::from_field(grid, qf);
    let trace = fe.clone();
    let rows = convergence_report(&q, &f, &qfh, &move |x| trace.eval(x), &cfg.eps, cfg.p).map_err(|e| fail(&[], e))?;
    let out_rows = rows.iter().map(|r| r.values().iter().map(|v| num(*v)).collect()).collect();
    let col = |k: usize| rows.iter().map(|r| r.values()[k]).collect::<Vec<f64>>();
    let tail_nonincreasing = (2..6).all(|k| col(k).iter().skip(1).collect::<Vec<_>>().windows(2).all(|w| w[1] <= w[0]));
    let t = &cfg.thresholds;
    let checks = vec![
        Check::holds("diagnostics_nonincreasing_after_first_halving", tail_nonincreasing),
        Check::at_most("final_trace_error", rows.last().map_or(f64::NAN, |r| r.trace_err), t.trace_error),
        Check::at_most("max_commutator_ratio", col(4).into_iter().fold(0.0, f64::max), t.commutator_ratio),
    ];
    Ok(Outcome {
        rows: out_rows,
        checks,
        extra: Vec::new(),
    })
}

fn run_green_stokes(cfg: &ExperimentConfig) -> Run {
    let dom = domain(cfg)?;
    let m = dom.dim();
    let q = operator(cfg, m)?;
    let u = parse(cfg.u.as_deref().unwrap_or("0"), m, "u")?;
    let v = parse(cfg.v.as_deref().unwrap_or("0"), m, "v")?;
    let finest = cfg.level.unwrap_or(2);
    let mut rows = Vec::new();
    let mut last = f64::NAN;
    for level in 0..=finest {
        let g = green_stokes_residual(&q, &u, &v, &dom, level).map_err(|e| fail(&rows, e))?;
        last = g.residual;
        rows.push(vec![
            level.to_string(),
            num(g.qu_v.re),
            num(g.qu_v.im),
            num(g.u_qstar_v.re),
            num(g.u_qstar_v.im),
            num(g.boundary_term.re),
            num(g.boundary_term.im),
            num(g.residual),
        ]);
    }
    Ok(Outcome {
        rows,
        checks: vec![Check::at_most("finest_residual", last, cfg.thresholds.green_stokes)],
        extra: Vec::new(),
    })
}

fn run_young(cfg: &ExperimentConfig) -> Run {
    let y = &cfg.young;
    let exps = KernelExponents::new(y.t, y.s, Exponent::new(y.a), Exponent::new(y.b))
        .map_err(|e| CliError::Usage(format!("young: {e}")))?;
    let disc = Domain::unit_ball(1);
    let spec = KernelSpec {
        x: (disc.clone(), Region::Boundary),
        y: (disc.clone(), Region::Interior),
        kernel: Arc::new(|x: &[f64], y: &[f64]| 1.0 / (2.0 * PI * (x[0] - y[0]).hypot(x[1] - y[1]))),
        exponents: exps,
        x_level_offset: y.x_level_offset,
    };
    let level = cfg.level.unwrap_or(1);
    let mut rows = Vec::new();
    let mut norms_finite = true;
    // with t = 1 and b = inf case III reads 1/r = 1/p, capped at t(a(s-t)/s + 1)
    let r_equals_p_setting = y.t == 1.0 && y.b.is_infinite();
    let cap = y.t * (y.a * (y.s - y.t) / y.s + 1.0);
    let mut r_equals_p = true;
    for &p in &y.p_grid {
        let pe = Exponent::new(p);
        for pair in admissible_exponents(&spec, pe) {
            let norm = if pair.r.is_infinite() {
                f64::NAN
            } else {
                let est = empirical_norm(&spec, pe, pair.r, y.samples, level, cfg.seed).map_err(|e| fail(&rows, e))?;
                norms_finite &= est.estimate.is_finite();
                est.estimate
            };
            if r_equals_p_setting && pair.case == Case::III {
                let expect = p.min(cap);
                r_equals_p &= (pair.r.value() - expect).abs() <= cfg.thresholds.exponent_tol * expect;
            }
            rows.push(vec![num(p), pair.case.to_string(), pair.r.to_string(), num(norm), y.samples.to_string()]);
        }
    }
    let fit = log_bound_fit(&disc, 1.0, y.fit_level).map_err(|e| fail(&rows, e))?;
    let mut extra = vec![("c0".to_string(), fit.c0), ("c1".to_string(), fit.c1), ("fit_residual".to_string(), fit.fit_residual)];
    let mut integrals_finite = true;
    for a in [1.0, 2.0, 4.0] {
        let v = log_majorant_integral(&disc, fit.c0, fit.c1, a, 5).map_err(|e| fail(&rows, e))?;
        integrals_finite &= v.is_finite();
        extra.push((format!("log_majorant_integral_a{a}"), v));
    }
    let mut checks = Vec::new();
    if r_equals_p_setting {
        checks.push(Check::holds("case_three_r_equals_p", r_equals_p));
    }
    checks.extend([
        Check::holds("empirical_norms_finite", norms_finite),
        Check::at_most("log_fit_residual", fit.fit_residual, cfg.thresholds.log_fit_residual),
        Check::holds("log_majorant_integrals_finite", integrals_finite),
    ]);
    Ok(Outcome { rows, checks, extra })
}
