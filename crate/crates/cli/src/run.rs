use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use lfp_core::composite::{self, random_tilt, EntropicInstance};
use lfp_core::dlfp::{default_fixed_point_budget, verify_recursions_with, Tolerance};
use lfp_core::lfp::{
    self, global_complexity_estimate, locality_constants, theorem4_bound, Checkpoints, LfpConfig,
    LocalityEstimate, MonteCarloConfig, SIGMA2_CEILING,
};
use lfp_core::{
    run_dlfp, solve_fixed_point, JointState, PayoffMatrix, RegularizedGame, SaddlePoint,
    StepSchedule,
};

use crate::config::{Experiment, RunConfig, Tilt, DEFAULT_FIXED_POINT_TOL};
use crate::error::{CliError, Stage};
use crate::output::{aggregate_csv, fmt_num, trace_csv, write_json, write_text};
use crate::payoff::load_payoff;

/// What a successful run produced.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// `false` only when a verify run found a failing check.
    pub verified: bool,
}

impl Outcome {
    /// 0, or 3 for a failed verification.
    pub fn exit_code(&self) -> i32 {
        if self.verified {
            0
        } else {
            3
        }
    }
}

#[derive(Serialize)]
struct GameInfo {
    payoff: String,
    rows: usize,
    cols: usize,
    eta: f64,
    kappa: f64,
}

fn game_info(cfg: &RunConfig, game: &RegularizedGame) -> GameInfo {
    GameInfo {
        payoff: cfg.payoff.clone(),
        rows: game.m(),
        cols: game.n(),
        eta: *game.eta(),
        kappa: game.kappa(),
    }
}

#[derive(Serialize)]
struct SaddleInfo {
    x_star: Vec<f64>,
    y_star: Vec<f64>,
    residual: f64,
    gap: f64,
    iterations: u64,
    tol: f64,
}

fn saddle_info(sp: &SaddlePoint, tol: f64) -> SaddleInfo {
    SaddleInfo {
        x_star: sp.x_star.probs().to_vec(),
        y_star: sp.y_star.probs().to_vec(),
        residual: sp.residual,
        gap: sp.gap,
        iterations: sp.iterations,
        tol,
    }
}

#[derive(Serialize)]
struct LocalityInfo {
    r_x: f64,
    r_y: f64,
    l_x: f64,
    l_y: f64,
    kappa_x: f64,
    kappa_y: f64,
    sigma2_x: f64,
    sigma2_y: f64,
    c_bar: f64,
}

impl From<&LocalityEstimate> for LocalityInfo {
    fn from(l: &LocalityEstimate) -> Self {
        Self {
            r_x: l.r_x,
            r_y: l.r_y,
            l_x: l.l_x,
            l_y: l.l_y,
            kappa_x: l.kappa_x,
            kappa_y: l.kappa_y,
            sigma2_x: l.sigma2_x,
            sigma2_y: l.sigma2_y,
            c_bar: l.c_bar,
        }
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    files: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.cfg.out.join(name)
    }

    fn text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let p = self.path(name);
        write_text(&p, text)?;
        self.files.push(p);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<(), CliError> {
        let p = self.path(name);
        write_json(&p, v)?;
        self.files.push(p);
        Ok(())
    }
}

fn game(cfg: &RunConfig) -> Result<RegularizedGame, CliError> {
    let a = load_payoff(&cfg.payoff)?;
    RegularizedGame::new(a, cfg.eta()?).map_err(|e| CliError::config(e.to_string()))
}

fn schedule(cfg: &RunConfig, default: &str, kappa: f64) -> Result<StepSchedule, CliError> {
    let name = cfg.schedule.as_deref().unwrap_or(default);
    StepSchedule::parse(name, kappa).map_err(|e| CliError::config(e.to_string()))
}

fn checkpoints(cfg: &RunConfig) -> Checkpoints {
    cfg.stride.map_or(Checkpoints::Standard, Checkpoints::Every)
}

fn fixed_point_tol(cfg: &RunConfig) -> f64 {
    cfg.tol.unwrap_or(DEFAULT_FIXED_POINT_TOL)
}

fn saddle(game: &RegularizedGame, tol: f64) -> Result<SaddlePoint, CliError> {
    let budget = default_fixed_point_budget(game, tol).stage("fixed point")?;
    solve_fixed_point(game, tol, budget).stage("fixed point")
}

fn tilt(cfg: &RunConfig, n: usize) -> Result<Vec<f64>, CliError> {
    let values = match &cfg.tilt {
        None => return Ok(vec![0.0; n]),
        Some(Tilt::Values(v)) => v.clone(),
        Some(Tilt::Spec(s)) => {
            if let Some(seed) = s.strip_prefix("random:") {
                let seed = seed
                    .parse()
                    .map_err(|_| CliError::config(format!("bad tilt seed {seed:?}")))?;
                random_tilt(n, seed)
            } else {
                s.split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<f64>()
                            .map_err(|_| CliError::config(format!("bad tilt entry {c:?}")))
                    })
                    .collect::<Result<_, _>>()?
            }
        }
    };
    if values.len() != n {
        return Err(CliError::config(format!(
            "tilt has {} entries, the payoff has {n} columns",
            values.len()
        )));
    }
    Ok(values)
}

/// Execute `cfg`, writing its files under `cfg.out`.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    fs::create_dir_all(&cfg.out).map_err(|source| CliError::Io {
        path: cfg.out.clone(),
        source,
    })?;
    let clock = Instant::now();
    let mut ctx = Ctx {
        cfg,
        files: Vec::new(),
    };
    let verified = match cfg.experiment {
        Experiment::Dlfp => run_dlfp_cmd(&mut ctx)?,
        Experiment::Lfp => run_lfp_cmd(&mut ctx)?,
        Experiment::LfpMc => run_mc_cmd(&mut ctx)?,
        Experiment::Composite => run_composite_cmd(&mut ctx)?,
        Experiment::Verify => run_verify_cmd(&mut ctx)?,
        Experiment::FixedPoint => run_fixed_point_cmd(&mut ctx)?,
        Experiment::Complexity => run_complexity_cmd(&mut ctx)?,
    };
    eprintln!(
        "{} finished in {:.3}s",
        cfg.experiment.name(),
        clock.elapsed().as_secs_f64()
    );
    Ok(Outcome {
        files: ctx.files,
        verified,
    })
}

#[derive(Serialize)]
struct DlfpSummary {
    experiment: &'static str,
    game: GameInfo,
    schedule: String,
    iters: u64,
    initial_gap: f64,
    final_gap: f64,
    final_bound: Option<f64>,
}

fn run_dlfp_cmd(ctx: &mut Ctx) -> Result<bool, CliError> {
    let cfg = ctx.cfg;
    let game = game(cfg)?;
    let sched = schedule(cfg, "constant", game.kappa())?;
    let init = JointState::uniform(game.n(), game.m());
    let trace = run_dlfp(&game, &init, &sched, cfg.iters, false).stage("dlfp run")?;
    ctx.text("trace.csv", &trace_csv(&trace, &[]))?;
    let last = trace.records.last().expect("non-empty trace");
    ctx.json(
        "summary.json",
        &DlfpSummary {
            experiment: "dlfp",
            game: game_info(cfg, &game),
            schedule: sched.name(),
            iters: cfg.iters,
            initial_gap: trace.records[0].gap,
            final_gap: last.gap,
            final_bound: last.bound,
        },
    )?;
    Ok(true)
}

#[derive(Serialize)]
struct LfpSummary {
    experiment: &'static str,
    game: GameInfo,
    schedule: String,
    iters: u64,
    seed: u64,
    final_gap: f64,
}

fn run_lfp_cmd(ctx: &mut Ctx) -> Result<bool, CliError> {
    let cfg = ctx.cfg;
    let game = game(cfg)?;
    let sched = schedule(cfg, "fw", game.kappa())?;
    let lcfg = LfpConfig {
        checkpoints: checkpoints(cfg),
        allow_constant_step: cfg.allow_constant_step,
        ..LfpConfig::new(sched, cfg.iters, cfg.seed)
    };
    let trace = lfp::run_lfp(&game, &lcfg).stage("lfp run")?;
    ctx.text("trace.csv", &trace_csv(&trace, &[]))?;
    ctx.json(
        "summary.json",
        &LfpSummary {
            experiment: "lfp",
            game: game_info(cfg, &game),
            schedule: sched.name(),
            iters: cfg.iters,
            seed: cfg.seed,
            final_gap: *trace.final_gap().expect("non-empty trace"),
        },
    )?;
    Ok(true)
}

#[derive(Serialize)]
struct McSummary {
    experiment: &'static str,
    game: GameInfo,
    schedule: String,
    iters: u64,
    seed: u64,
    replicas: usize,
    burn_in: u64,
    saddle: SaddleInfo,
    locality: LocalityInfo,
    replicas_in_event: usize,
    event_fraction: f64,
    final_mean_gap: f64,
    final_conditional_mean_gap: Option<f64>,
}

fn run_mc_cmd(ctx: &mut Ctx) -> Result<bool, CliError> {
    let cfg = ctx.cfg;
    let game = game(cfg)?;
    let sched = schedule(cfg, "fw", game.kappa())?;
    let tol = fixed_point_tol(cfg);
    let sp = saddle(&game, tol)?;
    let loc = locality_constants(&game, &sp, SIGMA2_CEILING, SIGMA2_CEILING)
        .stage("locality constants")?;
    let mc = MonteCarloConfig {
        checkpoints: checkpoints(cfg),
        allow_constant_step: cfg.allow_constant_step,
        ..MonteCarloConfig::new(
            sched,
            cfg.iters,
            cfg.replicas,
            cfg.seed,
            (loc.r_x, loc.r_y),
            cfg.burn_in,
        )
    };
    let agg = lfp::monte_carlo(&game, &mc, &sp).stage("replica harness")?;
    let bound = |t: u64| {
        (t >= 1)
            .then(|| theorem4_bound(&loc, &sched, t).ok())
            .flatten()
    };
    ctx.text("aggregate.csv", &aggregate_csv(&agg, bound))?;
    let last = agg.rows.last().expect("non-empty aggregate");
    ctx.json(
        "summary.json",
        &McSummary {
            experiment: "lfp-mc",
            game: game_info(cfg, &game),
            schedule: sched.name(),
            iters: cfg.iters,
            seed: cfg.seed,
            replicas: cfg.replicas,
            burn_in: cfg.burn_in,
            saddle: saddle_info(&sp, tol),
            locality: (&loc).into(),
            replicas_in_event: agg.replicas_in_event,
            event_fraction: agg.event_fraction(),
            final_mean_gap: last.mean_gap,
            final_conditional_mean_gap: last.conditional_mean_gap,
        },
    )?;
    Ok(true)
}

#[derive(Serialize)]
struct CompositeSummary {
    experiment: &'static str,
    payoff: String,
    eta_x: f64,
    eta_y: f64,
    tilt: Vec<f64>,
    gfw_schedule: String,
    dlfp_alpha: f64,
    kappa_bar: f64,
    iters: u64,
    f_ref_lower: f64,
    f_ref_upper: f64,
    gfw_final_certificate: f64,
    dlfp_final_gap: f64,
}

fn run_composite_cmd(ctx: &mut Ctx) -> Result<bool, CliError> {
    let cfg = ctx.cfg;
    let a: PayoffMatrix = load_payoff(&cfg.payoff)?;
    let (ex, ey) = cfg.eta_xy()?;
    let b = tilt(cfg, a.cols())?;
    let problem =
        EntropicInstance::new(a, ex, ey, b).map_err(|e| CliError::config(e.to_string()))?;
    let sched = schedule(cfg, "nesterov-gfw", composite::kappa_bar(&problem))?;
    let cmp =
        composite::run_comparison(&problem, cfg.iters, &sched, None).stage("composite run")?;

    let mut gfw = String::from("iteration,step_size,gap,theory_bound,primal_gap,f_value\n");
    for r in &cmp.gfw {
        gfw.push_str(&format!(
            "{},{},{},,{},{}\n",
            r.t,
            fmt_num(r.alpha),
            fmt_num(r.certificate()),
            fmt_num(r.primal_gap),
            fmt_num(r.f_value)
        ));
    }
    let mut dl = String::from("iteration,step_size,gap,theory_bound,f_value\n");
    for r in &cmp.dlfp {
        dl.push_str(&format!(
            "{},{},{},{},{}\n",
            r.t,
            fmt_num(r.alpha),
            fmt_num(r.gap),
            r.bound.map(fmt_num).unwrap_or_default(),
            fmt_num(r.f_value)
        ));
    }
    ctx.text("gfw_trace.csv", &gfw)?;
    ctx.text("dlfp_trace.csv", &dl)?;
    ctx.json(
        "summary.json",
        &CompositeSummary {
            experiment: "composite",
            payoff: cfg.payoff.clone(),
            eta_x: ex,
            eta_y: ey,
            tilt: problem.tilt().to_vec(),
            gfw_schedule: sched.name(),
            dlfp_alpha: cmp.dlfp_alpha,
            kappa_bar: cmp.kappa_bar,
            iters: cfg.iters,
            f_ref_lower: cmp.f_ref_lower,
            f_ref_upper: cmp.f_ref_upper,
            gfw_final_certificate: cmp.gfw.last().expect("non-empty").certificate(),
            dlfp_final_gap: cmp.dlfp.last().expect("non-empty").gap,
        },
    )?;
    Ok(true)
}

#[derive(Serialize)]
struct KindCount {
    kind: &'static str,
    checked: usize,
    failed: usize,
}

#[derive(Serialize)]
struct FailedCheck {
    kind: &'static str,
    t: u64,
    lhs: f64,
    rhs: f64,
    tolerance: f64,
    slack: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    experiment: &'static str,
    game: GameInfo,
    schedule: String,
    iters: u64,
    tolerance_rel: f64,
    tolerance_floor: f64,
    checks: usize,
    passed: usize,
    failed: usize,
    by_kind: Vec<KindCount>,
    /// First 100 failures in check order.
    failures: Vec<FailedCheck>,
}

fn run_verify_cmd(ctx: &mut Ctx) -> Result<bool, CliError> {
    let cfg = ctx.cfg;
    let game = game(cfg)?;
    let sched = schedule(cfg, "constant", game.kappa())?;
    let init = JointState::uniform(game.n(), game.m());
    let trace = run_dlfp(&game, &init, &sched, cfg.iters, true).stage("dlfp run")?;
    let tol = Tolerance {
        rel: cfg.tol.unwrap_or(Tolerance::default().rel),
        ..Tolerance::default()
    };
    let report = verify_recursions_with(&game, &trace, tol).stage("verification")?;
    ctx.text("trace.csv", &trace_csv(&trace, &[]))?;
    ctx.json(
        "report.json",
        &VerifyReport {
            experiment: "verify",
            game: game_info(cfg, &game),
            schedule: sched.name(),
            iters: cfg.iters,
            tolerance_rel: tol.rel,
            tolerance_floor: tol.floor,
            checks: report.checks.len(),
            passed: report.passed(),
            failed: report.failed(),
            by_kind: report
                .summary()
                .into_iter()
                .map(|(k, checked, failed)| KindCount {
                    kind: k.name(),
                    checked,
                    failed,
                })
                .collect(),
            failures: report
                .failures()
                .take(100)
                .map(|c| FailedCheck {
                    kind: c.kind.name(),
                    t: c.t,
                    lhs: c.lhs,
                    rhs: c.rhs,
                    tolerance: c.tolerance,
                    slack: c.slack,
                })
                .collect(),
        },
    )?;
    Ok(report.all_passed())
}

fn run_fixed_point_cmd(ctx: &mut Ctx) -> Result<bool, CliError> {
    let game = game(ctx.cfg)?;
    let tol = fixed_point_tol(ctx.cfg);
    let sp = saddle(&game, tol)?;
    ctx.json("saddle.json", &saddle_info(&sp, tol))?;
    Ok(true)
}

#[derive(Serialize)]
struct ComplexityReport {
    experiment: &'static str,
    game: GameInfo,
    epsilon: f64,
    saddle: SaddleInfo,
    locality: LocalityInfo,
    tail_iterations: u64,
    v_bar: f64,
    delta: f64,
    /// Always null: no bound on the time to enter the local regime is known.
    burn_in_iterations: Option<u64>,
    burn_in_status: &'static str,
}

fn run_complexity_cmd(ctx: &mut Ctx) -> Result<bool, CliError> {
    let cfg = ctx.cfg;
    let game = game(cfg)?;
    let tol = fixed_point_tol(cfg);
    let sp = saddle(&game, tol)?;
    let loc = locality_constants(&game, &sp, SIGMA2_CEILING, SIGMA2_CEILING)
        .stage("locality constants")?;
    let est = global_complexity_estimate(&game, &loc, cfg.epsilon).stage("complexity estimate")?;
    ctx.json(
        "complexity.json",
        &ComplexityReport {
            experiment: "complexity",
            game: game_info(cfg, &game),
            epsilon: cfg.epsilon,
            saddle: saddle_info(&sp, tol),
            locality: (&loc).into(),
            tail_iterations: est.tail_iterations,
            v_bar: est.v_bar,
            delta: est.delta,
            burn_in_iterations: est.burn_in,
            burn_in_status: "unknown",
        },
    )?;
    Ok(true)
}

/// Paths of the files `experiment` writes, relative to the output directory.
pub fn output_files(experiment: Experiment) -> &'static [&'static str] {
    match experiment {
        Experiment::Dlfp | Experiment::Lfp => &["trace.csv", "summary.json"],
        Experiment::LfpMc => &["aggregate.csv", "summary.json"],
        Experiment::Composite => &["gfw_trace.csv", "dlfp_trace.csv", "summary.json"],
        Experiment::Verify => &["trace.csv", "report.json"],
        Experiment::FixedPoint => &["saddle.json"],
        Experiment::Complexity => &["complexity.json"],
    }
}
