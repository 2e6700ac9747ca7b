use crate::game::JointState;
use crate::real::Real;
use crate::schedule::StepSchedule;

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord<T = f64> {
    pub t: u64,
    /// Step size `α_t` applied to move from `t` to `t + 1`.
    pub alpha: T,
    /// `V_t = G(x^t, y^t)`.
    pub gap: T,
    pub bound: Option<T>,
    pub state: Option<JointState<T>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TraceMeta {
    pub game: String,
    pub schedule: Option<StepSchedule>,
    pub eta: f64,
    pub kappa: f64,
    pub seed: Option<u64>,
    /// Excluded from every emitted file so outputs stay reproducible.
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace<T = f64> {
    pub records: Vec<TraceRecord<T>>,
    pub meta: TraceMeta,
}

impl<T: Real> Trace<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn gaps(&self) -> impl Iterator<Item = &T> + '_ {
        self.records.iter().map(|r| &r.gap)
    }

    pub fn final_gap(&self) -> Option<&T> {
        self.records.last().map(|r| &r.gap)
    }

    pub fn has_states(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.state.is_some())
    }

    /// Round every scalar to `f64`.
    pub fn to_f64(&self) -> Trace<f64> {
        Trace {
            records: self
                .records
                .iter()
                .map(|r| TraceRecord {
                    t: r.t,
                    alpha: r.alpha.to_f64(),
                    gap: r.gap.to_f64(),
                    bound: r.bound.as_ref().map(Real::to_f64),
                    state: r.state.as_ref().map(|s| {
                        JointState::new(
                            crate::game::SimplexPoint::from_vec_unchecked(
                                s.x.probs().iter().map(Real::to_f64).collect(),
                            ),
                            crate::game::SimplexPoint::from_vec_unchecked(
                                s.y.probs().iter().map(Real::to_f64).collect(),
                            ),
                        )
                    }),
                })
                .collect(),
            meta: self.meta.clone(),
        }
    }
}
