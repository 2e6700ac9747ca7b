//! Entropy-regularized zero-sum games.
//!
//! Player I picks `x ∈ Δ_n` to minimize and player II picks `y ∈ Δ_m` to
//! maximize the saddle function
//!
//! ```text
//! S(x, y) = η h(x) + ⟨A x, y⟩ − η h(y),      h(p) = Σ p_i ln p_i.
//! ```
//!
//! The smoothed (logit) best responses are softmaxes:
//! `P_x(y) = softmax(−Aᵀy / η)` and `P_y(x) = softmax(A x / η)`. The
//! conjugates `g_x(w) = η·logsumexp(w/η)`, `g_y(u) = η·logsumexp(u/η)` have
//! those softmaxes as gradients.
//!
//! The duality gap is evaluated in three algebraically equal ways:
//!
//! * [`RegularizedGame::duality_gap`]: `η KL(x ‖ P_x(y)) + η KL(y ‖ P_y(x))`,
//!   the conjugate form with the bilinear terms cancelled symbolically. It is
//!   a sum of nonnegative terms and stays relatively accurate near the
//!   saddle point, which the engines rely on.
//! * [`RegularizedGame::duality_gap_conjugate`]:
//!   `η h(x) + g_y(Ax) + g_x(−Aᵀy) + η h(y)` evaluated literally.
//! * [`RegularizedGame::duality_gap_alt`]: `S(x, P_y(x)) − S(P_x(y), y)`.

mod kernel;
mod matrix;
mod simplex;

pub use kernel::{kl_to_softmax, log_sum_exp, neg_entropy, softmax, Softmax};
pub use matrix::PayoffMatrix;
pub use simplex::{JointState, SimplexPoint, SIMPLEX_SUM_TOL};

use crate::error::{Error, Result};
use crate::real::{self, Real};

/// `Σ p_i ln p_i` (nonpositive; `0 ln 0 = 0`).
pub fn entropy<T: Real>(p: &SimplexPoint<T>) -> T {
    neg_entropy(p.probs())
}

/// Payoff matrix plus regularization strength `η > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularizedGame<T = f64> {
    payoff: PayoffMatrix<T>,
    eta: T,
}

impl RegularizedGame<f64> {
    pub fn new(payoff: PayoffMatrix, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::invalid(format!(
                "regularization must be positive and finite, got {eta}"
            )));
        }
        Ok(Self { payoff, eta })
    }

    pub fn to_precision<U: Real>(&self) -> RegularizedGame<U> {
        RegularizedGame {
            payoff: self.payoff.to_precision(),
            eta: U::from_f64(self.eta),
        }
    }
}

/// Both smoothed best responses at one joint state.
#[derive(Clone, Debug)]
pub struct Responses<T> {
    /// `P_x(y)`, player I's response (length `n`).
    pub x: Softmax<T>,
    /// `P_y(x)`, player II's response (length `m`).
    pub y: Softmax<T>,
}

impl<T: Real> RegularizedGame<T> {
    pub fn payoff(&self) -> &PayoffMatrix<T> {
        &self.payoff
    }

    pub fn eta(&self) -> &T {
        &self.eta
    }

    /// Number of player I actions (`x` dimension).
    pub fn n(&self) -> usize {
        self.payoff.cols()
    }

    /// Number of player II actions (`y` dimension).
    pub fn m(&self) -> usize {
        self.payoff.rows()
    }

    fn check_x(&self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(Error::dims("x", self.n(), len));
        }
        Ok(())
    }

    fn check_y(&self, len: usize) -> Result<()> {
        if len != self.m() {
            return Err(Error::dims("y", self.m(), len));
        }
        Ok(())
    }

    fn scaled(&self, w: &[T], sign_negative: bool) -> Vec<T> {
        w.iter()
            .map(|v| {
                let s = v.clone() / &self.eta;
                if sign_negative {
                    -s
                } else {
                    s
                }
            })
            .collect()
    }

    fn response_x_softmax(&self, y: &[T]) -> Result<Softmax<T>> {
        self.check_y(y.len())?;
        let cost = self.payoff.apply_transpose(y)?;
        softmax(&self.scaled(&cost, true))
    }

    fn response_y_softmax(&self, x: &[T]) -> Result<Softmax<T>> {
        self.check_x(x.len())?;
        let gain = self.payoff.apply(x)?;
        softmax(&self.scaled(&gain, false))
    }

    /// `P_x(y) = argmin_{x ∈ Δ_n} ⟨Aᵀy, x⟩ + η h(x) = softmax(−Aᵀy/η)`.
    pub fn logit_response_x(&self, y: &SimplexPoint<T>) -> Result<SimplexPoint<T>> {
        Ok(SimplexPoint::from_vec_unchecked(
            self.response_x_softmax(y.probs())?.probs,
        ))
    }

    /// `P_y(x) = argmax_{y ∈ Δ_m} ⟨Ax, y⟩ − η h(y) = softmax(Ax/η)`.
    pub fn logit_response_y(&self, x: &SimplexPoint<T>) -> Result<SimplexPoint<T>> {
        Ok(SimplexPoint::from_vec_unchecked(
            self.response_y_softmax(x.probs())?.probs,
        ))
    }

    /// Both responses at `state`, evaluated at the same incoming iterate.
    pub fn responses(&self, state: &JointState<T>) -> Result<Responses<T>> {
        Ok(Responses {
            x: self.response_x_softmax(state.y.probs())?,
            y: self.response_y_softmax(state.x.probs())?,
        })
    }

    /// Duality gap at `state` given its precomputed responses.
    pub fn gap_from_responses(&self, state: &JointState<T>, resp: &Responses<T>) -> T {
        let kl = kl_to_softmax(state.x.probs(), &resp.x) + kl_to_softmax(state.y.probs(), &resp.y);
        self.eta.clone() * kl
    }

    fn conjugate(&self, w: &[T]) -> Result<T> {
        if let Some(v) = w.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite conjugate argument {v:?}"
            )));
        }
        Ok(self.eta.clone() * log_sum_exp(&self.scaled(w, false))?)
    }

    fn conjugate_grad(&self, w: &[T]) -> Result<SimplexPoint<T>> {
        if let Some(v) = w.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite conjugate argument {v:?}"
            )));
        }
        Ok(SimplexPoint::from_vec_unchecked(
            softmax(&self.scaled(w, false))?.probs,
        ))
    }

    /// `g_x(w) = max_{x ∈ Δ_n} ⟨w, x⟩ − η h(x) = η logsumexp(w/η)`.
    pub fn conjugate_x(&self, w: &[T]) -> Result<T> {
        self.check_x(w.len())?;
        self.conjugate(w)
    }

    /// `g_y(u)`, the same transform over `Δ_m`.
    pub fn conjugate_y(&self, u: &[T]) -> Result<T> {
        self.check_y(u.len())?;
        self.conjugate(u)
    }

    /// `∇g_x(w) = softmax(w/η)`, the maximizer defining `g_x(w)`.
    pub fn conjugate_grad_x(&self, w: &[T]) -> Result<SimplexPoint<T>> {
        self.check_x(w.len())?;
        self.conjugate_grad(w)
    }

    pub fn conjugate_grad_y(&self, u: &[T]) -> Result<SimplexPoint<T>> {
        self.check_y(u.len())?;
        self.conjugate_grad(u)
    }

    /// `S(x, y) = η h(x) + yᵀAx − η h(y)`.
    pub fn saddle_value(&self, x: &SimplexPoint<T>, y: &SimplexPoint<T>) -> Result<T> {
        self.check_x(x.len())?;
        self.check_y(y.len())?;
        let ax = self.payoff.apply(x.probs())?;
        Ok(self.eta.clone() * entropy(x) + real::dot(&ax, y.probs())
            - self.eta.clone() * entropy(y))
    }

    pub fn duality_gap(&self, x: &SimplexPoint<T>, y: &SimplexPoint<T>) -> Result<T> {
        let state = JointState::new(x.clone(), y.clone());
        let resp = self.responses(&state)?;
        Ok(self.gap_from_responses(&state, &resp))
    }

    pub fn duality_gap_conjugate(&self, x: &SimplexPoint<T>, y: &SimplexPoint<T>) -> Result<T> {
        self.check_x(x.len())?;
        self.check_y(y.len())?;
        let ax = self.payoff.apply(x.probs())?;
        let neg_aty: Vec<T> = self
            .payoff
            .apply_transpose(y.probs())?
            .into_iter()
            .map(|v| -v)
            .collect();
        Ok(self.eta.clone() * entropy(x)
            + self.conjugate(&ax)?
            + self.conjugate(&neg_aty)?
            + self.eta.clone() * entropy(y))
    }

    pub fn duality_gap_alt(&self, x: &SimplexPoint<T>, y: &SimplexPoint<T>) -> Result<T> {
        let s = self.logit_response_y(x)?;
        let v = self.logit_response_x(y)?;
        Ok(self.saddle_value(x, &s)? - self.saddle_value(&v, y)?)
    }

    /// `κ = ‖A‖_{1→∞} / η`.
    pub fn kappa(&self) -> T {
        self.payoff.max_abs() / &self.eta
    }

    /// `V̄ = max_{Δ_n × Δ_m} G`. The maximum sits at a vertex pair, where
    /// both entropies vanish and `G(e_j, e_i) = g_y(A e_j) + g_x(−Aᵀ e_i)`
    /// separates over the two indices.
    pub fn gap_upper_bound(&self) -> Result<T> {
        let mut best_col: Option<T> = None;
        for j in 0..self.n() {
            let g = self.conjugate(&self.payoff.column(j))?;
            best_col = Some(match best_col {
                Some(b) => b.max(g),
                None => g,
            });
        }
        let mut best_row: Option<T> = None;
        for i in 0..self.m() {
            let neg_row: Vec<T> = self.payoff.row(i).iter().map(|v| -v.clone()).collect();
            let g = self.conjugate(&neg_row)?;
            best_row = Some(match best_row {
                Some(b) => b.max(g),
                None => g,
            });
        }
        Ok(best_col.expect("n >= 1") + best_row.expect("m >= 1"))
    }
}
