//! Sampled logistic fictitious play.
//!
//! Each player draws an action from its smoothed best response and mixes
//! the realized vertex into its running strategy:
//!
//! ```text
//! i_{t+1} ~ P_x(y^t),  x^{t+1} = (1 − α_t) x^t + α_t e_{i_{t+1}}
//! j_{t+1} ~ P_y(x^t),  y^{t+1} = (1 − α_t) y^t + α_t e_{j_{t+1}}
//! ```
//!
//! The realized noise is `ζ = e_{sampled} − response`. Draws happen in the
//! fixed order i then j from one generator per trajectory (see [`crate::rng`]).

use std::time::Instant;

use rayon::prelude::*;

use crate::dlfp::SaddlePoint;
use crate::error::{Error, Result};
use crate::game::{RegularizedGame, SimplexPoint};
use crate::rng::{self, Rng};
use crate::schedule::{lemma4_bound, StepSchedule};
use crate::trace::{Trace, TraceMeta, TraceRecord};

#[derive(Clone, Debug, PartialEq)]
pub struct LfpState {
    pub x: SimplexPoint,
    pub y: SimplexPoint,
    /// Last sampled `(i, j)`, zero-based; `i` indexes player I's actions.
    pub last_actions: (usize, usize),
}

impl LfpState {
    /// The pure pair `(e_{i0}, e_{j0})`.
    pub fn from_actions(game: &RegularizedGame, i0: usize, j0: usize) -> Result<Self> {
        if i0 >= game.n() || j0 >= game.m() {
            return Err(Error::invalid(format!(
                "initial actions ({i0}, {j0}) out of range for {} x {} strategies",
                game.n(),
                game.m()
            )));
        }
        Ok(Self {
            x: SimplexPoint::vertex(game.n(), i0),
            y: SimplexPoint::vertex(game.m(), j0),
            last_actions: (i0, j0),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseRecord {
    pub zeta_x: Vec<f64>,
    pub zeta_y: Vec<f64>,
}

impl NoiseRecord {
    pub fn l1_x(&self) -> f64 {
        self.zeta_x.iter().map(|v| v.abs()).sum()
    }

    pub fn l1_y(&self) -> f64 {
        self.zeta_y.iter().map(|v| v.abs()).sum()
    }
}

fn toward_vertex(p: &SimplexPoint, index: usize, alpha: f64) -> SimplexPoint {
    let keep = 1.0 - alpha;
    SimplexPoint::from_vec_unchecked(
        p.probs()
            .iter()
            .enumerate()
            .map(|(k, &v)| keep * v + if k == index { alpha } else { 0.0 })
            .collect(),
    )
}

fn noise(dist: &SimplexPoint, index: usize) -> Vec<f64> {
    dist.probs()
        .iter()
        .enumerate()
        .map(|(k, &v)| if k == index { 1.0 - v } else { -v })
        .collect()
}

pub fn lfp_step(
    game: &RegularizedGame,
    state: &LfpState,
    alpha: f64,
    g: &mut Rng,
) -> Result<(LfpState, NoiseRecord)> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("step size {alpha} outside [0, 1]")));
    }
    let v = game.logit_response_x(&state.y)?;
    let s = game.logit_response_y(&state.x)?;
    let i = rng::sample_categorical(v.probs(), g);
    let j = rng::sample_categorical(s.probs(), g);
    let next = LfpState {
        x: toward_vertex(&state.x, i, alpha),
        y: toward_vertex(&state.y, j, alpha),
        last_actions: (i, j),
    };
    let rec = NoiseRecord {
        zeta_x: noise(&v, i),
        zeta_y: noise(&s, j),
    };
    Ok((next, rec))
}

/// Which iterations are recorded. `t = 0` and the final iteration always are.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Checkpoints {
    Every(u64),
    /// Every step up to `t = 1000`, then every 10th.
    Standard,
}

impl Default for Checkpoints {
    fn default() -> Self {
        Self::Standard
    }
}

impl Checkpoints {
    pub fn includes(&self, t: u64, last: u64) -> bool {
        if t == 0 || t == last {
            return true;
        }
        match *self {
            Self::Every(k) => t % k.max(1) == 0,
            Self::Standard => t <= 1000 || t % 10 == 0,
        }
    }

    pub fn list(&self, last: u64) -> Vec<u64> {
        (0..=last).filter(|&t| self.includes(t, last)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LfpConfig {
    pub schedule: StepSchedule,
    pub iters: u64,
    pub seed: u64,
    /// `(i0, j0)`, zero-based.
    pub init_actions: (usize, usize),
    pub checkpoints: Checkpoints,
    /// Constant steps do not satisfy the stochastic-approximation step
    /// conditions; they run only when this is set.
    pub allow_constant_step: bool,
}

impl LfpConfig {
    pub fn new(schedule: StepSchedule, iters: u64, seed: u64) -> Self {
        Self {
            schedule,
            iters,
            seed,
            init_actions: (0, 0),
            checkpoints: Checkpoints::Standard,
            allow_constant_step: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.iters == 0 {
            return Err(Error::invalid("iteration count must be at least 1"));
        }
        match self.schedule {
            StepSchedule::Constant(_) if !self.allow_constant_step => Err(Error::Config(
                "constant step sizes do not make sampled play converge; pass the override to run anyway"
                    .into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Drive one trajectory, calling `observe(t, state, noise)` after every step
/// (`noise` is `None` at `t = 0`).
pub fn simulate(
    game: &RegularizedGame,
    cfg: &LfpConfig,
    g: &mut Rng,
    mut observe: impl FnMut(u64, &LfpState, Option<&NoiseRecord>) -> Result<()>,
) -> Result<LfpState> {
    cfg.validate()?;
    let mut state = LfpState::from_actions(game, cfg.init_actions.0, cfg.init_actions.1)?;
    observe(0, &state, None)?;
    for t in 0..cfg.iters {
        let (next, rec) = lfp_step(game, &state, cfg.schedule.step_size(t), g)?;
        state = next;
        observe(t + 1, &state, Some(&rec))?;
    }
    Ok(state)
}

/// One seeded trajectory with the gap recorded at checkpoints.
pub fn run_lfp(game: &RegularizedGame, cfg: &LfpConfig) -> Result<Trace> {
    let clock = Instant::now();
    let mut g = rng::seeded(cfg.seed);
    let mut records = Vec::new();
    simulate(game, cfg, &mut g, |t, s, _| {
        if cfg.checkpoints.includes(t, cfg.iters) {
            records.push(TraceRecord {
                t,
                alpha: cfg.schedule.step_size(t),
                gap: game.duality_gap(&s.x, &s.y)?,
                bound: None,
                state: None,
            });
        }
        Ok(())
    })?;
    Ok(Trace {
        records,
        meta: TraceMeta {
            game: format!("{}x{} eta={}", game.m(), game.n(), game.eta()),
            schedule: Some(cfg.schedule),
            eta: *game.eta(),
            kappa: game.kappa(),
            seed: Some(cfg.seed),
            wall_seconds: clock.elapsed().as_secs_f64(),
        },
    })
}

/// One checkpoint row of [`AggregateTrace`].
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub t: u64,
    pub step_size: f64,
    pub mean_gap: f64,
    /// Sample standard deviation across replicas.
    pub std_gap: f64,
    /// `1.96 · std / √R`.
    pub ci95_halfwidth: f64,
    /// Fraction of replicas inside both balls at every checkpoint `≥ t`: the
    /// empirical estimate of the event starting at `t`.
    pub event_fraction: f64,
    /// Statistics over replicas in the event starting at `burn_in`; `None`
    /// when no replica is in it.
    pub conditional_mean_gap: Option<f64>,
    pub conditional_std_gap: Option<f64>,
    pub conditional_ci95: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateTrace {
    pub rows: Vec<AggregateRow>,
    /// Replicas inside both balls at every checkpoint `≥ burn_in`.
    pub replicas_in_event: usize,
    pub replicas: usize,
    pub seed: u64,
    pub schedule: StepSchedule,
    pub burn_in: u64,
    pub radii: (f64, f64),
}

impl AggregateTrace {
    pub fn event_fraction(&self) -> f64 {
        self.replicas_in_event as f64 / self.replicas as f64
    }

    pub fn row_at(&self, t: u64) -> Option<&AggregateRow> {
        self.rows
            .binary_search_by_key(&t, |r| r.t)
            .ok()
            .map(|k| &self.rows[k])
    }
}

#[derive(Clone, Debug)]
pub struct MonteCarloConfig {
    pub schedule: StepSchedule,
    pub iters: u64,
    pub replicas: usize,
    pub seed: u64,
    pub burn_in: u64,
    pub radii: (f64, f64),
    pub init_actions: (usize, usize),
    pub checkpoints: Checkpoints,
    pub allow_constant_step: bool,
    /// Per-replica seed derivation; [`rng::replica_seed`] by default.
    pub seed_fn: fn(u64, usize) -> u64,
}

impl MonteCarloConfig {
    pub fn new(
        schedule: StepSchedule,
        iters: u64,
        replicas: usize,
        seed: u64,
        radii: (f64, f64),
        burn_in: u64,
    ) -> Self {
        Self {
            schedule,
            iters,
            replicas,
            seed,
            burn_in,
            radii,
            init_actions: (0, 0),
            checkpoints: Checkpoints::Standard,
            allow_constant_step: false,
            seed_fn: rng::replica_seed,
        }
    }
}

/// Gap and ball membership at each checkpoint of one replica.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicaPath {
    pub seed: u64,
    pub gaps: Vec<f64>,
    pub inside: Vec<bool>,
}

pub fn run_replica(
    game: &RegularizedGame,
    cfg: &MonteCarloConfig,
    saddle: &SaddlePoint,
    replica: usize,
) -> Result<ReplicaPath> {
    let seed = (cfg.seed_fn)(cfg.seed, replica);
    let lcfg = LfpConfig {
        schedule: cfg.schedule,
        iters: cfg.iters,
        seed,
        init_actions: cfg.init_actions,
        checkpoints: cfg.checkpoints,
        allow_constant_step: cfg.allow_constant_step,
    };
    let mut g = rng::seeded(seed);
    let (mut gaps, mut inside) = (Vec::new(), Vec::new());
    simulate(game, &lcfg, &mut g, |t, s, _| {
        if cfg.checkpoints.includes(t, cfg.iters) {
            gaps.push(game.duality_gap(&s.x, &s.y)?);
            inside.push(
                s.x.l1_distance(&saddle.x_star) <= cfg.radii.0
                    && s.y.l1_distance(&saddle.y_star) <= cfg.radii.1,
            );
        }
        Ok(())
    })?;
    Ok(ReplicaPath { seed, gaps, inside })
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (usize, f64, f64) {
    let n = values.clone().count();
    let mean = values.clone().sum::<f64>() / n as f64;
    let var = if n > 1 {
        values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    (n, mean, var.sqrt())
}

/// Independent replicas (run in parallel, aggregated by replica index) with
/// unconditional and event-conditional gap statistics at each checkpoint.
///
/// The event is checked at checkpoints only, a surrogate for membership at
/// every `t ≥ burn_in` within the horizon.
pub fn monte_carlo(
    game: &RegularizedGame,
    cfg: &MonteCarloConfig,
    saddle: &SaddlePoint,
) -> Result<AggregateTrace> {
    if cfg.replicas < 2 {
        return Err(Error::invalid(
            "the replica harness needs at least 2 replicas",
        ));
    }
    if saddle.x_star.len() != game.n() || saddle.y_star.len() != game.m() {
        return Err(Error::invalid(
            "saddle point dimensions do not match the game",
        ));
    }
    let paths: Vec<ReplicaPath> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| run_replica(game, cfg, saddle, r))
        .collect::<Result<_>>()?;
    Ok(aggregate(cfg, &paths))
}

pub fn aggregate(cfg: &MonteCarloConfig, paths: &[ReplicaPath]) -> AggregateTrace {
    let times = cfg.checkpoints.list(cfg.iters);
    let k_burn = times.partition_point(|&t| t < cfg.burn_in);
    // inside_from[r][k]: replica r inside at every checkpoint k' >= k.
    let inside_from: Vec<Vec<bool>> = paths
        .iter()
        .map(|p| {
            let mut acc = vec![true; p.inside.len() + 1];
            for k in (0..p.inside.len()).rev() {
                acc[k] = acc[k + 1] && p.inside[k];
            }
            acc
        })
        .collect();
    let in_event: Vec<bool> = inside_from.iter().map(|a| a[k_burn]).collect();
    let replicas_in_event = in_event.iter().filter(|&&b| b).count();
    let z = 1.96;

    let rows = times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let (n, mean, std) = mean_std(paths.iter().map(|p| p.gaps[k]));
            let cond = paths
                .iter()
                .zip(&in_event)
                .filter(|(_, &e)| e)
                .map(|(p, _)| p.gaps[k]);
            let (cn, cmean, cstd) = if replicas_in_event > 0 {
                mean_std(cond)
            } else {
                (0, f64::NAN, f64::NAN)
            };
            let present = cn > 0;
            AggregateRow {
                t,
                step_size: cfg.schedule.step_size(t),
                mean_gap: mean,
                std_gap: std,
                ci95_halfwidth: z * std / (n as f64).sqrt(),
                event_fraction: inside_from.iter().filter(|a| a[k]).count() as f64
                    / paths.len() as f64,
                conditional_mean_gap: present.then_some(cmean),
                conditional_std_gap: present.then_some(cstd),
                conditional_ci95: present.then(|| z * cstd / (cn as f64).sqrt()),
            }
        })
        .collect();

    AggregateTrace {
        rows,
        replicas_in_event,
        replicas: paths.len(),
        seed: cfg.seed,
        schedule: cfg.schedule,
        burn_in: cfg.burn_in,
        radii: cfg.radii,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseStats {
    /// Mean of `‖ζ_x‖₁²`.
    pub sigma2_x: f64,
    pub sigma2_y: f64,
    pub mean_zeta_x: Vec<f64>,
    pub mean_zeta_y: Vec<f64>,
}

pub fn estimate_noise_stats(records: &[NoiseRecord]) -> Result<NoiseStats> {
    let first = records
        .first()
        .ok_or_else(|| Error::invalid("no noise records"))?;
    let (n, m) = (first.zeta_x.len(), first.zeta_y.len());
    let mut mx = vec![0.0; n];
    let mut my = vec![0.0; m];
    let (mut sx, mut sy) = (0.0, 0.0);
    for r in records {
        if r.zeta_x.len() != n || r.zeta_y.len() != m {
            return Err(Error::invalid("noise records of mixed dimensions"));
        }
        for (a, b) in mx.iter_mut().zip(&r.zeta_x) {
            *a += b;
        }
        for (a, b) in my.iter_mut().zip(&r.zeta_y) {
            *a += b;
        }
        sx += r.l1_x().powi(2);
        sy += r.l1_y().powi(2);
    }
    let k = records.len() as f64;
    mx.iter_mut().chain(my.iter_mut()).for_each(|v| *v /= k);
    Ok(NoiseStats {
        sigma2_x: sx / k,
        sigma2_y: sy / k,
        mean_zeta_x: mx,
        mean_zeta_y: my,
    })
}

/// Radii, local smoothness and the local-rate constant around a saddle.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalityEstimate {
    pub r_x: f64,
    pub r_y: f64,
    pub l_x: f64,
    pub l_y: f64,
    pub kappa_x: f64,
    pub kappa_y: f64,
    pub sigma2_x: f64,
    pub sigma2_y: f64,
    /// `(κ² + κ_x) η (4 + σ_x²) + (κ² + κ_y) η (4 + σ_y²)`.
    pub c_bar: f64,
}

/// Worst-case `σ²`, from `‖ζ‖₁ ≤ 2`.
pub const SIGMA2_CEILING: f64 = 4.0;

/// `r = min(p*)/2`; on that ℓ₁ ball every coordinate stays above `min(p*)/2`,
/// so the entropy Hessian `diag(1/p)` is bounded by `L = 2/min(p*)`.
pub fn locality_constants(
    game: &RegularizedGame,
    saddle: &SaddlePoint,
    sigma2_x: f64,
    sigma2_y: f64,
) -> Result<LocalityEstimate> {
    let (mx, my) = (
        saddle.x_star.min_coordinate(),
        saddle.y_star.min_coordinate(),
    );
    if !(mx > 0.0 && my > 0.0) {
        return Err(Error::invalid(
            "saddle point must have strictly positive coordinates",
        ));
    }
    for s in [sigma2_x, sigma2_y] {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::invalid(format!(
                "variance bound {s} must be finite and >= 0"
            )));
        }
    }
    let eta = *game.eta();
    let k2 = game.kappa().powi(2);
    let (l_x, l_y) = (2.0 / mx, 2.0 / my);
    let (kappa_x, kappa_y) = (l_x / eta, l_y / eta);
    Ok(LocalityEstimate {
        r_x: mx / 2.0,
        r_y: my / 2.0,
        l_x,
        l_y,
        kappa_x,
        kappa_y,
        sigma2_x,
        sigma2_y,
        c_bar: (k2 + kappa_x) * eta * (4.0 + sigma2_x) + (k2 + kappa_y) * eta * (4.0 + sigma2_y),
    })
}

/// Local expected-gap bound `C̄(1 + ln t)/t` (harmonic) or `4C̄/(t + 1)` (fw).
pub fn theorem4_bound(loc: &LocalityEstimate, schedule: &StepSchedule, t: u64) -> Result<f64> {
    match schedule {
        StepSchedule::RationalQ(1) | StepSchedule::RationalQ(2) => {
            lemma4_bound(loc.c_bar, schedule, t)
        }
        other => Err(Error::UnsupportedSchedule(format!(
            "local rate is stated for q = 1 or 2, got {other}"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexityEstimate {
    /// `⌈8C̄/ε⌉ − 1`, iterations after the local regime is entered.
    pub tail_iterations: u64,
    /// `V̄`, the largest gap over the strategy space.
    pub v_bar: f64,
    /// `ε / (2V̄)`.
    pub delta: f64,
    /// Iterations needed to enter the local regime with probability
    /// `1 − δ`. No bound is known, so this is always `None`.
    pub burn_in: Option<u64>,
}

pub fn global_complexity_estimate(
    game: &RegularizedGame,
    loc: &LocalityEstimate,
    epsilon: f64,
) -> Result<ComplexityEstimate> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let v_bar = game.gap_upper_bound()?;
    let tail = (8.0 * loc.c_bar / epsilon).ceil();
    Ok(ComplexityEstimate {
        tail_iterations: (tail as u64).saturating_sub(1),
        v_bar,
        delta: epsilon / (2.0 * v_bar),
        burn_in: None,
    })
}
