//! Deterministic logistic fictitious play.
//!
//! Both players move toward their smoothed best response to the other's
//! current mixed strategy:
//!
//! ```text
//! x^{t+1} = (1 − α_t) x^t + α_t P_x(y^t)
//! y^{t+1} = (1 − α_t) y^t + α_t P_y(x^t)
//! ```
//!
//! Both responses are evaluated at the incoming pair (Jacobi, not
//! Gauss-Seidel).

use std::fmt;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::game::{JointState, RegularizedGame, Responses, SimplexPoint};
use crate::real::{self, Real};
use crate::schedule::{constant_optimal_step, contraction_factor, rho_in, StepSchedule};
use crate::trace::{Trace, TraceMeta, TraceRecord};

fn check_alpha<T: Real>(alpha: &T) -> Result<()> {
    if !(*alpha >= T::zero() && *alpha <= T::one()) {
        return Err(Error::invalid(format!(
            "step size {alpha:?} outside [0, 1]"
        )));
    }
    Ok(())
}

fn check_state<T: Real>(game: &RegularizedGame<T>, state: &JointState<T>) -> Result<()> {
    if state.x.len() != game.n() {
        return Err(Error::dims("x", game.n(), state.x.len()));
    }
    if state.y.len() != game.m() {
        return Err(Error::dims("y", game.m(), state.y.len()));
    }
    Ok(())
}

fn step_from<T: Real>(state: &JointState<T>, resp: &Responses<T>, alpha: &T) -> JointState<T> {
    JointState::new(
        state.x.interpolate(&resp.x.probs, alpha),
        state.y.interpolate(&resp.y.probs, alpha),
    )
}

pub fn dlfp_step<T: Real>(
    game: &RegularizedGame<T>,
    state: &JointState<T>,
    alpha: &T,
) -> Result<JointState<T>> {
    check_alpha(alpha)?;
    check_state(game, state)?;
    let resp = game.responses(state)?;
    Ok(step_from(state, &resp, alpha))
}

/// Rate bound tracked in the working precision, so linear-rate bounds far
/// below the `f64` range stay meaningful.
enum BoundTracker<T> {
    None,
    Linear { rho: T },
    LogOverT { c: T },
    OneOverT { c: T },
}

impl<T: Real> BoundTracker<T> {
    fn new(game: &RegularizedGame<T>, schedule: &StepSchedule) -> Self {
        let kappa = game.kappa();
        let c = T::from_f64(4.0) * game.eta() * &kappa * &kappa;
        match *schedule {
            StepSchedule::Constant(a) => {
                let rho = if a == constant_optimal_step(kappa.to_f64()) {
                    rho_in(&(kappa.clone() * &kappa))
                } else {
                    contraction_factor(&kappa, &T::from_f64(a))
                };
                if rho < T::one() {
                    Self::Linear { rho }
                } else {
                    Self::None
                }
            }
            StepSchedule::RationalQ(1) => Self::LogOverT { c },
            StepSchedule::RationalQ(2) => Self::OneOverT { c },
            _ => Self::None,
        }
    }

    fn eval(&self, t: u64, v0: &T) -> Option<T> {
        if t == 0 {
            return None;
        }
        let tt = T::from_f64(t as f64);
        match self {
            Self::None => None,
            Self::Linear { rho } => Some(rho.powu(t) * v0),
            Self::LogOverT { c } => Some(c.clone() * (T::one() + tt.ln()) / tt),
            Self::OneOverT { c } => Some(T::from_f64(4.0) * c / (tt + T::one())),
        }
    }
}

/// Run `iters` DLFP steps from `init`, recording `t = 0..=iters`.
pub fn run_dlfp<T: Real>(
    game: &RegularizedGame<T>,
    init: &JointState<T>,
    schedule: &StepSchedule,
    iters: u64,
    record_states: bool,
) -> Result<Trace<T>> {
    if iters == 0 {
        return Err(Error::invalid("iteration count must be at least 1"));
    }
    check_state(game, init)?;
    let clock = Instant::now();
    let tracker = BoundTracker::new(game, schedule);
    let mut state = init.clone();
    let mut records = Vec::with_capacity(iters as usize + 1);
    let mut v0 = T::zero();
    for t in 0..=iters {
        let resp = game.responses(&state)?;
        let gap = game.gap_from_responses(&state, &resp);
        if t == 0 {
            v0 = gap.clone();
        }
        let alpha = schedule.step_size_in::<T>(t);
        check_alpha(&alpha)?;
        let next = (t < iters).then(|| step_from(&state, &resp, &alpha));
        records.push(TraceRecord {
            t,
            alpha,
            bound: tracker.eval(t, &v0),
            gap,
            state: record_states.then(|| state.clone()),
        });
        if let Some(next) = next {
            state = next;
        }
    }
    Ok(Trace {
        records,
        meta: TraceMeta {
            game: format!("{}x{} eta={}", game.m(), game.n(), game.eta().to_f64()),
            schedule: Some(*schedule),
            eta: game.eta().to_f64(),
            kappa: game.kappa().to_f64(),
            seed: None,
            wall_seconds: clock.elapsed().as_secs_f64(),
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckKind {
    /// Recorded gap equals the gap recomputed from the recorded state.
    GapConsistency,
    /// `V_{t+1} ≤ (1 − α_t + κ²α_t²) V_t`.
    MultiplicativeRecursion,
    /// `V_{t+1} ≤ (1 − α_t) V_t + 4 α_t² η κ²`.
    AdditiveRecursion,
    /// `V_t ≤` the schedule's rate bound.
    RateBound,
}

impl CheckKind {
    pub const ALL: [CheckKind; 4] = [
        Self::GapConsistency,
        Self::MultiplicativeRecursion,
        Self::AdditiveRecursion,
        Self::RateBound,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::GapConsistency => "gap_consistency",
            Self::MultiplicativeRecursion => "multiplicative_recursion",
            Self::AdditiveRecursion => "additive_recursion",
            Self::RateBound => "rate_bound",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One checked inequality `lhs ≤ rhs + tolerance`. The decision is made in
/// the trace's working precision; the stored numbers are rounded to `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub kind: CheckKind,
    pub t: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    /// `rhs − lhs`.
    pub slack: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// `(kind, checked, failed)` for every kind.
    pub fn summary(&self) -> Vec<(CheckKind, usize, usize)> {
        CheckKind::ALL
            .iter()
            .map(|&k| {
                let of_kind = self.checks.iter().filter(|c| c.kind == k);
                let total = of_kind.clone().count();
                let failed = of_kind.filter(|c| !c.pass).count();
                (k, total, failed)
            })
            .collect()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> + '_ {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Tolerance `rel · max(floor, V_t)` used by [`verify_recursions_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub floor: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-9,
            floor: 1.0,
        }
    }
}

/// Check both gap recursions, the recorded gaps, and the recorded rate bound
/// along a trace with states. Gaps are recomputed from the states.
pub fn verify_recursions<T: Real>(
    game: &RegularizedGame<T>,
    trace: &Trace<T>,
) -> Result<VerificationReport> {
    verify_recursions_with(game, trace, Tolerance::default())
}

pub fn verify_recursions_with<T: Real>(
    game: &RegularizedGame<T>,
    trace: &Trace<T>,
    tol: Tolerance,
) -> Result<VerificationReport> {
    if !trace.has_states() {
        return Err(Error::invalid(
            "verification needs a trace with recorded states",
        ));
    }
    let mut gaps = Vec::with_capacity(trace.len());
    for r in &trace.records {
        let s = r.state.as_ref().expect("checked above");
        check_state(game, s)?;
        gaps.push(game.duality_gap(&s.x, &s.y)?);
    }
    let kappa = game.kappa();
    let k2 = kappa.clone() * &kappa;
    let four_eta_k2 = T::from_f64(4.0) * game.eta() * &k2;
    let rel = T::from_f64(tol.rel);
    let floor = T::from_f64(tol.floor);
    let tol_at = |v: &T| rel.clone() * v.clone().max(floor.clone());

    let mut checks = Vec::new();
    let mut push = |kind, t, lhs: T, rhs: T, tolerance: T| {
        let pass = lhs <= rhs.clone() + &tolerance;
        checks.push(Check {
            kind,
            t,
            slack: (rhs.clone() - &lhs).to_f64(),
            lhs: lhs.to_f64(),
            rhs: rhs.to_f64(),
            tolerance: tolerance.to_f64(),
            pass,
        });
    };

    for (r, v) in trace.records.iter().zip(&gaps) {
        push(
            CheckKind::GapConsistency,
            r.t,
            (r.gap.clone() - v).abs(),
            T::zero(),
            tol_at(v),
        );
    }
    for (k, pair) in trace.records.windows(2).enumerate() {
        let (cur, next) = (&pair[0], &pair[1]);
        if next.t != cur.t + 1 {
            return Err(Error::invalid(format!(
                "trace records are not consecutive at t = {}",
                cur.t
            )));
        }
        let (v, v_next) = (&gaps[k], &gaps[k + 1]);
        let a = &cur.alpha;
        let tolerance = tol_at(v);
        push(
            CheckKind::MultiplicativeRecursion,
            next.t,
            v_next.clone(),
            (T::one() - a + k2.clone() * a * a) * v,
            tolerance.clone(),
        );
        push(
            CheckKind::AdditiveRecursion,
            next.t,
            v_next.clone(),
            (T::one() - a) * v + a.clone() * a * &four_eta_k2,
            tolerance,
        );
    }
    for (r, v) in trace.records.iter().zip(&gaps) {
        if let Some(b) = &r.bound {
            push(CheckKind::RateBound, r.t, v.clone(), b.clone(), tol_at(v));
        }
    }
    Ok(VerificationReport { checks })
}

/// Approximate saddle point `(x*, y*)` of the regularized game.
#[derive(Clone, Debug, PartialEq)]
pub struct SaddlePoint {
    pub x_star: SimplexPoint,
    pub y_star: SimplexPoint,
    /// `‖P_x(y*) − x*‖₁ + ‖P_y(x*) − y*‖₁`.
    pub residual: f64,
    pub gap: f64,
    /// DLFP steps taken.
    pub iterations: u64,
}

fn residual_of<T: Real>(state: &JointState<T>, resp: &Responses<T>) -> T {
    real::l1_distance(state.x.probs(), &resp.x.probs)
        + real::l1_distance(state.y.probs(), &resp.y.probs)
}

/// Iterations after which the linear rate guarantees `V_t ≤ tol`:
/// `⌈ln(V₀/tol) / (−ln ρ(κ²))⌉`, or `None` when `κ = 0`.
pub fn guaranteed_iterations(kappa: f64, v0: f64, tol: f64) -> Option<u64> {
    if kappa == 0.0 {
        return None;
    }
    let rho = rho_in(&(kappa * kappa));
    if v0 <= tol {
        return Some(0);
    }
    Some(((v0 / tol).ln() / -rho.ln()).ceil() as u64)
}

/// Iteration budget used when callers do not pick one: four times the
/// guaranteed count from the uniform start, plus 1000.
pub fn default_fixed_point_budget(game: &RegularizedGame, tol: f64) -> Result<u64> {
    let u = JointState::uniform(game.n(), game.m());
    let v0 = game.duality_gap(&u.x, &u.y)?;
    let cap = guaranteed_iterations(game.kappa(), v0, tol).unwrap_or(0);
    Ok(cap.saturating_mul(4).saturating_add(1000))
}

/// Constant-step DLFP from the uniform pair until both the gap and the
/// fixed-point residual are at most `tol`.
///
/// The gap alone is quadratic in the distance to the saddle point, so
/// `gap ≤ tol` only pins the residual to `O(√(tol/η))`; requiring both makes
/// the returned residual directly certified.
pub fn solve_fixed_point(game: &RegularizedGame, tol: f64, max_iter: u64) -> Result<SaddlePoint> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let alpha = constant_optimal_step(game.kappa());
    let mut state = JointState::uniform(game.n(), game.m());
    let mut best: Option<SaddlePoint> = None;
    for t in 0..=max_iter {
        let resp = game.responses(&state)?;
        let gap = game.gap_from_responses(&state, &resp);
        let residual = residual_of(&state, &resp);
        let better = best
            .as_ref()
            .map_or(true, |b| (gap, residual) < (b.gap, b.residual));
        if better {
            best = Some(SaddlePoint {
                x_star: state.x.clone(),
                y_star: state.y.clone(),
                residual,
                gap,
                iterations: t,
            });
        }
        if gap <= tol && residual <= tol {
            return Ok(SaddlePoint {
                x_star: state.x,
                y_star: state.y,
                residual,
                gap,
                iterations: t,
            });
        }
        if t < max_iter {
            state = step_from(&state, &resp, &alpha);
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter as usize,
        best: Box::new(best.expect("at least one iterate")),
    })
}
