//! Step-size rules and the rate bounds attached to them.

use std::fmt;

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepSchedule {
    /// `α_t = c` for all `t`.
    Constant(f64),
    /// `α_t = q / (t + q)`. `q = 1` is the harmonic rule, `q = 2` the
    /// Frank-Wolfe rule.
    RationalQ(u32),
    /// `α_t = 6(t + 1) / ((t + 2)(2t + 3))`.
    NesterovGfw,
}

impl StepSchedule {
    pub fn constant(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::invalid(format!("constant step {c} outside [0, 1]")));
        }
        Ok(Self::Constant(c))
    }

    pub fn rational(q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("rational schedule needs q >= 1"));
        }
        Ok(Self::RationalQ(q))
    }

    pub fn step_size(&self, t: u64) -> f64 {
        match *self {
            Self::Constant(c) => c,
            Self::RationalQ(q) => q as f64 / (t as f64 + q as f64),
            Self::NesterovGfw => {
                let t = t as f64;
                6.0 * (t + 1.0) / ((t + 2.0) * (2.0 * t + 3.0))
            }
        }
    }

    /// `α_t` evaluated in `T`. Rational rules are formed from exact integers
    /// so the result is correctly rounded in the working precision.
    pub fn step_size_in<T: Real>(&self, t: u64) -> T {
        match *self {
            Self::Constant(c) => T::from_f64(c),
            Self::RationalQ(q) => T::from_f64(q as f64) / T::from_f64(t as f64 + q as f64),
            Self::NesterovGfw => {
                let t = t as f64;
                T::from_f64(6.0 * (t + 1.0)) / (T::from_f64(t + 2.0) * T::from_f64(2.0 * t + 3.0))
            }
        }
    }

    /// Parse a CLI schedule name. Bare `constant` resolves to
    /// [`constant_optimal_step`] for the supplied `kappa`.
    pub fn parse(name: &str, kappa: f64) -> Result<Self> {
        let name = name.trim();
        match name {
            "constant" => return Self::constant(constant_optimal_step(kappa)),
            "harmonic" => return Ok(Self::RationalQ(1)),
            "fw" => return Ok(Self::RationalQ(2)),
            "nesterov-gfw" => return Ok(Self::NesterovGfw),
            _ => {}
        }
        if let Some(v) = name.strip_prefix("constant:") {
            let c: f64 = v
                .parse()
                .map_err(|_| Error::Config(format!("bad constant step {v:?}")))?;
            return Self::constant(c).map_err(|e| Error::Config(e.to_string()));
        }
        if let Some(v) = name.strip_prefix("rational:") {
            let q: u32 = v
                .parse()
                .map_err(|_| Error::Config(format!("bad rational order {v:?}")))?;
            return Self::rational(q).map_err(|e| Error::Config(e.to_string()));
        }
        Err(Error::Config(format!(
            "unknown schedule {name:?} (expected constant[:c], harmonic, fw, rational:q, nesterov-gfw)"
        )))
    }

    /// Canonical name; [`StepSchedule::parse`] reads it back.
    pub fn name(&self) -> String {
        match *self {
            Self::Constant(c) => format!("constant:{c}"),
            Self::RationalQ(1) => "harmonic".into(),
            Self::RationalQ(2) => "fw".into(),
            Self::RationalQ(q) => format!("rational:{q}"),
            Self::NesterovGfw => "nesterov-gfw".into(),
        }
    }
}

impl fmt::Display for StepSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `min{1/(2κ²), 1}`, with `1` at `κ = 0`.
pub fn constant_optimal_step(kappa: f64) -> f64 {
    if kappa == 0.0 {
        return 1.0;
    }
    (1.0 / (2.0 * kappa * kappa)).min(1.0)
}

/// Same rule evaluated in `T`.
pub fn constant_optimal_step_in<T: Real>(kappa: &T) -> T {
    let k2 = kappa.clone() * kappa;
    if k2.is_zero() {
        return T::one();
    }
    (T::one() / (T::from_f64(2.0) * k2)).min(T::one())
}

/// `ρ(z) = 1 − 1/(4z)` for `z ≥ 1/2`, `z` below.
pub fn rho(z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::invalid(format!("rho needs z >= 0, got {z}")));
    }
    Ok(rho_in(&z))
}

pub fn rho_in<T: Real>(z: &T) -> T {
    if *z >= T::from_f64(0.5) {
        T::one() - T::one() / (T::from_f64(4.0) * z)
    } else {
        z.clone()
    }
}

/// Per-step factor of the first gap recursion, `1 − α + κ²α²`.
pub fn contraction_factor<T: Real>(kappa: &T, alpha: &T) -> T {
    T::one() - alpha + kappa.clone() * kappa * alpha * alpha
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateBound {
    /// `ρ^t V₀`.
    Linear { rho: f64, v0: f64 },
    /// `C (1 + ln t) / t`.
    LogOverT { c: f64 },
    /// `4C / (t + 1)`.
    OneOverT { c: f64 },
}

impl RateBound {
    pub fn eval(&self, t: u64) -> f64 {
        let tf = t as f64;
        match *self {
            Self::Linear { rho, v0 } => {
                if v0 == 0.0 {
                    0.0
                } else {
                    rho.powf(tf) * v0
                }
            }
            Self::LogOverT { c } => c * (1.0 + tf.ln()) / tf,
            Self::OneOverT { c } => 4.0 * c / (tf + 1.0),
        }
    }
}

/// The deterministic-play rate bound for `schedule`:
///
/// * constant `α`: `ρ^t V₀` with `ρ = ρ(κ²)` at the optimal step and
///   `1 − α + κ²α²` otherwise (must be `< 1`);
/// * `q = 1`: `4ηκ² (1 + ln t)/t`;
/// * `q = 2`: `16ηκ²/(t + 1)`.
pub fn theorem3_rate(kappa: f64, eta: f64, schedule: &StepSchedule, v0: f64) -> Result<RateBound> {
    let c = 4.0 * eta * kappa * kappa;
    match *schedule {
        StepSchedule::Constant(a) => {
            let rho = if a == constant_optimal_step(kappa) {
                rho_in(&(kappa * kappa))
            } else {
                contraction_factor(&kappa, &a)
            };
            if !(rho < 1.0) {
                return Err(Error::UnsupportedSchedule(format!(
                    "constant step {a} does not contract (factor {rho})"
                )));
            }
            Ok(RateBound::Linear { rho, v0 })
        }
        StepSchedule::RationalQ(1) => Ok(RateBound::LogOverT { c }),
        StepSchedule::RationalQ(2) => Ok(RateBound::OneOverT { c }),
        other => Err(Error::UnsupportedSchedule(format!(
            "no deterministic rate bound for {other}"
        ))),
    }
}

pub fn theorem3_bound(
    kappa: f64,
    eta: f64,
    schedule: &StepSchedule,
    v0: f64,
    t: u64,
) -> Result<f64> {
    if t == 0 {
        return Err(Error::invalid("rate bounds are stated for t >= 1"));
    }
    Ok(theorem3_rate(kappa, eta, schedule, v0)?.eval(t))
}

/// Bound on `V_t` for the recursion `V_{t+1} ≤ (1 − α_t)V_t + α_t² C` under
/// `α_t = q/(t+q)`.
pub fn lemma4_bound(c: f64, schedule: &StepSchedule, t: u64) -> Result<f64> {
    if t == 0 {
        return Err(Error::invalid("rate bounds are stated for t >= 1"));
    }
    let q = match *schedule {
        StepSchedule::RationalQ(q) => q,
        other => {
            return Err(Error::UnsupportedSchedule(format!(
                "recursion bound needs a rational schedule, got {other}"
            )))
        }
    };
    Ok(match q {
        1 => RateBound::LogOverT { c }.eval(t),
        2 => RateBound::OneOverT { c }.eval(t),
        _ => c * rational_q_sum(q as f64, t),
    })
}

/// `Σ_{i<t} (q/(i+q)) binom(i+q−1, q−1) / binom(t+q−1, q)`.
///
/// The ratio `r_i = binom(i+q−1, q−1)/binom(t+q−1, q)` is run backwards from
/// `r_{t−1} = q/(t+q−1)`, so every intermediate lies in `[0, 1]`.
fn rational_q_sum(q: f64, t: u64) -> f64 {
    let mut r = q / (t as f64 + q - 1.0);
    let mut total = 0.0;
    for i in (0..t).rev() {
        let i = i as f64;
        total += q / (i + q) * r;
        if i > 0.0 {
            r *= i / (i + q - 1.0);
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepSizeVerdict {
    Satisfies,
    /// `Σ α_t² = ∞`.
    SquaresDiverge,
    /// `Σ α_t < ∞` (only the zero constant).
    SumConverges,
}

impl StepSizeVerdict {
    pub fn describe(&self) -> &'static str {
        match self {
            Self::Satisfies => "satisfies: sum diverges, squares summable",
            Self::SquaresDiverge => "violates: squares diverge",
            Self::SumConverges => "violates: steps are summable",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSizeReport {
    pub horizon: u64,
    pub sum_alpha: f64,
    pub sum_alpha_sq: f64,
    pub verdict: StepSizeVerdict,
}

/// Partial sums `Σ_{t<horizon} α_t`, `Σ_{t<horizon} α_t²` and a verdict that
/// is decided by schedule kind, not by the sums.
pub fn check_step_size_conditions(schedule: &StepSchedule, horizon: u64) -> StepSizeReport {
    let (mut s1, mut s2) = (0.0, 0.0);
    for t in 0..horizon {
        let a = schedule.step_size(t);
        s1 += a;
        s2 += a * a;
    }
    let verdict = match *schedule {
        StepSchedule::Constant(c) if c > 0.0 => StepSizeVerdict::SquaresDiverge,
        StepSchedule::Constant(_) => StepSizeVerdict::SumConverges,
        StepSchedule::RationalQ(_) | StepSchedule::NesterovGfw => StepSizeVerdict::Satisfies,
    };
    StepSizeReport {
        horizon,
        sum_alpha: s1,
        sum_alpha_sq: s2,
        verdict,
    }
}
