//! Logistic fictitious play for entropy-regularized zero-sum games.
//!
//! * [`game`]: payoff matrices, simplex points, smoothed best responses,
//!   conjugates and the duality gap.
//! * [`schedule`]: step-size rules and their rate bounds.
//! * [`dlfp`]: deterministic play, recursion verification, fixed points.
//! * [`lfp`]: sampled play, noise accounting and the replica harness.
//! * [`composite`]: strongly convex composite problems, generalized
//!   Frank-Wolfe versus play with an explicit dual iterate.

pub mod composite;
pub mod dlfp;
pub mod error;
pub mod game;
pub mod lfp;
pub mod real;
pub mod rng;
pub mod schedule;
pub mod trace;

pub use dlfp::{
    dlfp_step, run_dlfp, solve_fixed_point, verify_recursions, CheckKind, SaddlePoint,
    VerificationReport,
};
pub use error::{Error, Result};
pub use game::{entropy, JointState, PayoffMatrix, RegularizedGame, SimplexPoint};
#[cfg(feature = "mpfr")]
pub use real::Mp;
pub use real::Real;
pub use schedule::{RateBound, StepSchedule};
pub use trace::{Trace, TraceMeta, TraceRecord};
