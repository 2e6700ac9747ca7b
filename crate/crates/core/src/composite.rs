//! Strongly convex composite problems
//!
//! ```text
//! min_{x ∈ X} F(x) = ℓ(Ax) + f_x(x),    ℓ(u) = max_{y ∈ Y} ⟨u, y⟩ − f_y(y)
//! ```
//!
//! solved two ways: generalized Frank-Wolfe, which recomputes the dual point
//! `s = ∇ℓ(Ax)` from scratch every step, and the play variant, which carries
//! an explicit dual iterate and interpolates it like the primal one.

use crate::error::{Error, Result};
use crate::game::{kl_to_softmax, neg_entropy, softmax, PayoffMatrix, SimplexPoint};
use crate::real;
use crate::schedule::{rho_in, StepSchedule};

/// Oracle bundle for a composite problem. Points are plain coordinate
/// vectors so non-simplex sets can implement it.
pub trait CompositeProblem: Sync {
    fn matrix(&self) -> &PayoffMatrix;
    /// Strong-convexity modulus of `f_x` w.r.t. ℓ₁.
    fn mu_x(&self) -> f64;
    fn mu_y(&self) -> f64;

    /// `‖A‖_{1→∞}`.
    fn norm_a(&self) -> f64 {
        self.matrix().max_abs()
    }

    /// `argmin_{x ∈ X} ⟨c, x⟩ + f_x(x)`.
    fn x_oracle(&self, c: &[f64]) -> Result<Vec<f64>>;
    /// `argmax_{y ∈ Y} ⟨u, y⟩ − f_y(y) = ∇ℓ(u)`.
    fn y_oracle(&self, u: &[f64]) -> Result<Vec<f64>>;
    fn ell(&self, u: &[f64]) -> Result<f64>;
    fn fx_value(&self, x: &[f64]) -> Result<f64>;
    fn fy_value(&self, y: &[f64]) -> Result<f64>;
    fn check_x(&self, x: &[f64]) -> Result<()>;
    fn check_y(&self, y: &[f64]) -> Result<()>;
    fn initial_x(&self) -> Vec<f64>;
    fn initial_y(&self) -> Vec<f64>;

    /// `F(x) − Φ(y)` with `Φ(y) = min_x ⟨Ax, y⟩ + f_x(x) − f_y(y)`.
    fn duality_gap(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let a = self.matrix();
        let v = self.x_oracle(&a.apply_transpose(y)?)?;
        let dual = real::dot(&a.apply(&v)?, y) + self.fx_value(&v)? - self.fy_value(y)?;
        Ok(primal_value(self, x)? - dual)
    }
}

/// `X = Δ_n`, `Y = Δ_m`, `f_x = η_x h + ⟨b, ·⟩`, `f_y = η_y h`.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropicInstance {
    matrix: PayoffMatrix,
    eta_x: f64,
    eta_y: f64,
    tilt: Vec<f64>,
}

impl EntropicInstance {
    pub fn new(matrix: PayoffMatrix, eta_x: f64, eta_y: f64, tilt: Vec<f64>) -> Result<Self> {
        for (name, e) in [("eta_x", eta_x), ("eta_y", eta_y)] {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {e}")));
            }
        }
        if tilt.len() != matrix.cols() {
            return Err(Error::dims("tilt", matrix.cols(), tilt.len()));
        }
        if tilt.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("tilt entries must be finite"));
        }
        Ok(Self {
            matrix,
            eta_x,
            eta_y,
            tilt,
        })
    }

    pub fn untilted(matrix: PayoffMatrix, eta: f64) -> Result<Self> {
        let n = matrix.cols();
        Self::new(matrix, eta, eta, vec![0.0; n])
    }

    pub fn eta_x(&self) -> f64 {
        self.eta_x
    }

    pub fn eta_y(&self) -> f64 {
        self.eta_y
    }

    pub fn tilt(&self) -> &[f64] {
        &self.tilt
    }

    fn x_logits(&self, c: &[f64]) -> Vec<f64> {
        c.iter()
            .zip(&self.tilt)
            .map(|(ci, bi)| -(ci + bi) / self.eta_x)
            .collect()
    }

    fn y_logits(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|v| v / self.eta_y).collect()
    }
}

fn check_simplex(p: &[f64], len: usize, what: &'static str) -> Result<()> {
    if p.len() != len {
        return Err(Error::dims(what, len, p.len()));
    }
    SimplexPoint::new(p.to_vec()).map(|_| ())
}

impl CompositeProblem for EntropicInstance {
    fn matrix(&self) -> &PayoffMatrix {
        &self.matrix
    }

    fn mu_x(&self) -> f64 {
        self.eta_x
    }

    fn mu_y(&self) -> f64 {
        self.eta_y
    }

    fn x_oracle(&self, c: &[f64]) -> Result<Vec<f64>> {
        if c.len() != self.matrix.cols() {
            return Err(Error::dims("x oracle input", self.matrix.cols(), c.len()));
        }
        Ok(softmax(&self.x_logits(c))?.probs)
    }

    fn y_oracle(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.matrix.rows() {
            return Err(Error::dims("y oracle input", self.matrix.rows(), u.len()));
        }
        Ok(softmax(&self.y_logits(u))?.probs)
    }

    fn ell(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.matrix.rows() {
            return Err(Error::dims("ell input", self.matrix.rows(), u.len()));
        }
        Ok(self.eta_y * softmax(&self.y_logits(u))?.log_sum_exp)
    }

    fn fx_value(&self, x: &[f64]) -> Result<f64> {
        self.check_x(x)?;
        Ok(self.eta_x * neg_entropy(x) + real::dot(&self.tilt, x))
    }

    fn fy_value(&self, y: &[f64]) -> Result<f64> {
        self.check_y(y)?;
        Ok(self.eta_y * neg_entropy(y))
    }

    fn check_x(&self, x: &[f64]) -> Result<()> {
        check_simplex(x, self.matrix.cols(), "x")
    }

    fn check_y(&self, y: &[f64]) -> Result<()> {
        check_simplex(y, self.matrix.rows(), "y")
    }

    fn initial_x(&self) -> Vec<f64> {
        SimplexPoint::<f64>::uniform(self.matrix.cols()).into_vec()
    }

    fn initial_y(&self) -> Vec<f64> {
        SimplexPoint::<f64>::uniform(self.matrix.rows()).into_vec()
    }

    /// `η_x KL(x ‖ v) + η_y KL(y ‖ s)`: the same quantity as the default,
    /// with the linear terms cancelled so small gaps keep their accuracy.
    fn duality_gap(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_x(x)?;
        self.check_y(y)?;
        let v = softmax(&self.x_logits(&self.matrix.apply_transpose(y)?))?;
        let s = softmax(&self.y_logits(&self.matrix.apply(x)?))?;
        Ok(self.eta_x * kl_to_softmax(x, &v) + self.eta_y * kl_to_softmax(y, &s))
    }
}

/// Tilt entries uniform on `[-0.5, 0.5]` from the seeded generator.
pub fn random_tilt(n: usize, seed: u64) -> Vec<f64> {
    let mut g = crate::rng::seeded(seed);
    (0..n)
        .map(|_| crate::rng::uniform01(&mut g) - 0.5)
        .collect()
}

/// `κ̄ = ‖A‖_{1→∞} / √(μ_x μ_y)`.
pub fn kappa_bar<P: CompositeProblem + ?Sized>(problem: &P) -> f64 {
    problem.norm_a() / (problem.mu_x() * problem.mu_y()).sqrt()
}

/// `F(x) = ℓ(Ax) + f_x(x)`.
pub fn primal_value<P: CompositeProblem + ?Sized>(problem: &P, x: &[f64]) -> Result<f64> {
    problem.check_x(x)?;
    Ok(problem.ell(&problem.matrix().apply(x)?)? + problem.fx_value(x)?)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("step size {alpha} outside [0, 1]")));
    }
    Ok(())
}

fn mix(a: &[f64], b: &[f64], alpha: f64) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(p, q)| (1.0 - alpha) * p + alpha * q)
        .collect()
}

/// `x ← (1 − α)x + α v̄` with `v̄ = x_oracle(Aᵀ y_oracle(Ax))`.
pub fn gfw_step<P: CompositeProblem + ?Sized>(
    problem: &P,
    x: &[f64],
    alpha: f64,
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    problem.check_x(x)?;
    let a = problem.matrix();
    let s = problem.y_oracle(&a.apply(x)?)?;
    let v = problem.x_oracle(&a.apply_transpose(&s)?)?;
    Ok(mix(x, &v, alpha))
}

/// Simultaneous update of both iterates toward their oracle responses at the
/// incoming pair.
pub fn dlfp_composite_step<P: CompositeProblem + ?Sized>(
    problem: &P,
    state: (&[f64], &[f64]),
    alpha: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_alpha(alpha)?;
    let (x, y) = state;
    problem.check_x(x)?;
    problem.check_y(y)?;
    let a = problem.matrix();
    let v = problem.x_oracle(&a.apply_transpose(y)?)?;
    let s = problem.y_oracle(&a.apply(x)?)?;
    Ok((mix(x, &v, alpha), mix(y, &s, alpha)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GfwRecord {
    pub t: u64,
    pub alpha: f64,
    pub f_value: f64,
    /// `F(x^t) − f_ref_lower`, an upper bound on `F(x^t) − F*`. Differences
    /// at the round-off level of `F` may read as 0.
    pub primal_gap: f64,
    /// `G(x^t, s^t)` with `s^t = ∇ℓ(Ax^t)`, also an upper bound on
    /// `F(x^t) − F*`, evaluated without cancellation.
    pub pairing_gap: f64,
}

impl GfwRecord {
    /// The certificate used when comparing against the play variant: the
    /// pairing gap, which stays accurate after `F(x^t) − f_ref` has sunk
    /// into round-off.
    pub fn certificate(&self) -> f64 {
        self.pairing_gap
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DlfpCompositeRecord {
    pub t: u64,
    pub alpha: f64,
    pub f_value: f64,
    /// `V_t = G(x^t, y^t)`.
    pub gap: f64,
    /// `ρ(κ̄²)^t V₀` when the step is the optimal constant.
    pub bound: Option<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub gfw: Vec<GfwRecord>,
    pub dlfp: Vec<DlfpCompositeRecord>,
    /// Certified bracket `[max_t F(x^t) − V_t, min_t F(x^t)]` around `F*`.
    pub f_ref_lower: f64,
    pub f_ref_upper: f64,
    pub kappa_bar: f64,
    pub dlfp_alpha: f64,
}

/// `min{1/(2κ̄²), 1}`, or `1` when `κ̄ = 0`.
pub fn default_dlfp_alpha(kappa_bar: f64) -> f64 {
    crate::schedule::constant_optimal_step(kappa_bar)
}

/// Linear-rate factor `ρ(κ̄²)`; `1 − 1/(4κ̄²)` once `κ̄² ≥ 1/2`.
pub fn linear_rate(kappa_bar: f64) -> f64 {
    rho_in(&(kappa_bar * kappa_bar))
}

fn run_gfw<P: CompositeProblem + ?Sized>(
    problem: &P,
    iters: u64,
    schedule: &StepSchedule,
) -> Result<Vec<(u64, f64, Vec<f64>, f64, f64)>> {
    let a = problem.matrix();
    let mut x = problem.initial_x();
    let mut out = Vec::with_capacity(iters as usize + 1);
    for t in 0..=iters {
        let alpha = schedule.step_size(t);
        let s = problem.y_oracle(&a.apply(&x)?)?;
        let f = primal_value(problem, &x)?;
        let pairing = problem.duality_gap(&x, &s)?;
        let next = (t < iters)
            .then(|| gfw_step(problem, &x, alpha))
            .transpose()?;
        out.push((t, alpha, x.clone(), f, pairing));
        if let Some(n) = next {
            x = n;
        }
    }
    Ok(out)
}

fn run_dlfp_variant<P: CompositeProblem + ?Sized>(
    problem: &P,
    iters: u64,
    alpha: f64,
    optimal: bool,
    kb: f64,
) -> Result<Vec<DlfpCompositeRecord>> {
    let (mut x, mut y) = (problem.initial_x(), problem.initial_y());
    let rho = linear_rate(kb);
    let mut out = Vec::with_capacity(iters as usize + 1);
    let mut v0 = 0.0;
    for t in 0..=iters {
        let gap = problem.duality_gap(&x, &y)?;
        if t == 0 {
            v0 = gap;
        }
        let bound = (optimal && t > 0).then(|| {
            if v0 == 0.0 {
                0.0
            } else {
                rho.powf(t as f64) * v0
            }
        });
        let f_value = primal_value(problem, &x)?;
        let next = (t < iters)
            .then(|| dlfp_composite_step(problem, (&x, &y), alpha))
            .transpose()?;
        out.push(DlfpCompositeRecord {
            t,
            alpha,
            f_value,
            gap,
            bound,
            x: x.clone(),
            y: y.clone(),
        });
        if let Some((nx, ny)) = next {
            x = nx;
            y = ny;
        }
    }
    Ok(out)
}

/// Both methods from the uniform start for `iters` steps. `dlfp_alpha`
/// defaults to [`default_dlfp_alpha`].
pub fn run_comparison<P: CompositeProblem + ?Sized>(
    problem: &P,
    iters: u64,
    gfw_schedule: &StepSchedule,
    dlfp_alpha: Option<f64>,
) -> Result<Comparison> {
    if iters == 0 {
        return Err(Error::invalid("iteration count must be at least 1"));
    }
    let kb = kappa_bar(problem);
    let optimal_alpha = default_dlfp_alpha(kb);
    let alpha = dlfp_alpha.unwrap_or(optimal_alpha);
    check_alpha(alpha)?;
    let (gfw, dlfp) = rayon::join(
        || run_gfw(problem, iters, gfw_schedule),
        || run_dlfp_variant(problem, iters, alpha, alpha == optimal_alpha, kb),
    );
    let (gfw, dlfp) = (gfw?, dlfp?);

    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for r in &dlfp {
        lower = lower.max(r.f_value - r.gap);
        upper = upper.min(r.f_value);
    }
    for (_, _, _, f, pairing) in &gfw {
        lower = lower.max(f - pairing);
        upper = upper.min(*f);
    }
    // Round-off in F can cross the two ends by a few ulps.
    lower = lower.min(upper);
    let gfw = gfw
        .into_iter()
        .map(|(t, alpha, _, f_value, pairing_gap)| GfwRecord {
            t,
            alpha,
            f_value,
            primal_gap: (f_value - lower).max(0.0),
            pairing_gap,
        })
        .collect();
    Ok(Comparison {
        gfw,
        dlfp,
        f_ref_lower: lower,
        f_ref_upper: upper,
        kappa_bar: kb,
        dlfp_alpha: alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_instance(m: usize, n: usize, ex: f64, ey: f64) -> EntropicInstance {
        EntropicInstance::new(PayoffMatrix::zeros(m, n).unwrap(), ex, ey, vec![0.0; n]).unwrap()
    }

    #[test]
    fn kappa_bar_examples() {
        let a = PayoffMatrix::from_rows(vec![vec![2.0, -1.0], vec![0.0, 1.0]]).unwrap();
        let p = EntropicInstance::new(a, 1.0, 4.0, vec![0.0; 2]).unwrap();
        assert_eq!(kappa_bar(&p), 1.0);
        assert_eq!(kappa_bar(&zero_instance(2, 2, 1.0, 1.0)), 0.0);
        let g = crate::game::RegularizedGame::new(PayoffMatrix::matching_pennies(), 0.3).unwrap();
        let p = EntropicInstance::untilted(PayoffMatrix::matching_pennies(), 0.3).unwrap();
        assert!((kappa_bar(&p) - g.kappa()).abs() < 1e-15);
    }

    #[test]
    fn primal_value_examples() {
        let p = zero_instance(3, 4, 0.7, 0.2);
        let u = p.initial_x();
        let want = 0.2 * 3f64.ln() - 0.7 * 4f64.ln();
        assert!((primal_value(&p, &u).unwrap() - want).abs() < 1e-15);
        let e = SimplexPoint::<f64>::vertex(4, 0).into_vec();
        assert!((primal_value(&p, &e).unwrap() - 0.2 * 3f64.ln()).abs() < 1e-15);
        assert!(primal_value(&p, &[0.5, 0.5, 0.5, 0.5]).is_err());
    }

    #[test]
    fn step_endpoints() {
        let a = PayoffMatrix::random(3, 4, 5).unwrap();
        let p = EntropicInstance::new(a, 0.4, 0.6, vec![0.1, -0.2, 0.0, 0.3]).unwrap();
        let x = vec![0.1, 0.2, 0.3, 0.4];
        assert_eq!(gfw_step(&p, &x, 0.0).unwrap(), x);
        let s = p.y_oracle(&p.matrix().apply(&x).unwrap()).unwrap();
        let v = p
            .x_oracle(&p.matrix().apply_transpose(&s).unwrap())
            .unwrap();
        assert_eq!(gfw_step(&p, &x, 1.0).unwrap(), v);
        let y = p.initial_y();
        assert_eq!(
            dlfp_composite_step(&p, (&x, &y), 0.0).unwrap(),
            (x.clone(), y.clone())
        );
    }

    #[test]
    fn kl_gap_matches_default_gap() {
        struct Plain<'a>(&'a EntropicInstance);
        impl CompositeProblem for Plain<'_> {
            fn matrix(&self) -> &PayoffMatrix {
                self.0.matrix()
            }
            fn mu_x(&self) -> f64 {
                self.0.mu_x()
            }
            fn mu_y(&self) -> f64 {
                self.0.mu_y()
            }
            fn x_oracle(&self, c: &[f64]) -> Result<Vec<f64>> {
                self.0.x_oracle(c)
            }
            fn y_oracle(&self, u: &[f64]) -> Result<Vec<f64>> {
                self.0.y_oracle(u)
            }
            fn ell(&self, u: &[f64]) -> Result<f64> {
                self.0.ell(u)
            }
            fn fx_value(&self, x: &[f64]) -> Result<f64> {
                self.0.fx_value(x)
            }
            fn fy_value(&self, y: &[f64]) -> Result<f64> {
                self.0.fy_value(y)
            }
            fn check_x(&self, x: &[f64]) -> Result<()> {
                self.0.check_x(x)
            }
            fn check_y(&self, y: &[f64]) -> Result<()> {
                self.0.check_y(y)
            }
            fn initial_x(&self) -> Vec<f64> {
                self.0.initial_x()
            }
            fn initial_y(&self) -> Vec<f64> {
                self.0.initial_y()
            }
        }
        let a = PayoffMatrix::random(4, 3, 9).unwrap();
        let p = EntropicInstance::new(a, 0.3, 0.8, vec![0.5, -0.5, 0.25]).unwrap();
        let x = [0.2, 0.5, 0.3];
        let y = [0.1, 0.2, 0.3, 0.4];
        let kl = p.duality_gap(&x, &y).unwrap();
        let plain = Plain(&p).duality_gap(&x, &y).unwrap();
        assert!((kl - plain).abs() < 1e-13, "{kl} vs {plain}");
    }

    #[test]
    fn zero_matrix_jumps_to_minimizer() {
        let p = EntropicInstance::new(
            PayoffMatrix::zeros(3, 3).unwrap(),
            0.5,
            0.5,
            vec![0.2, -0.1, 0.0],
        )
        .unwrap();
        let c = run_comparison(&p, 5, &StepSchedule::NesterovGfw, None).unwrap();
        assert_eq!(c.dlfp_alpha, 1.0);
        for r in &c.dlfp[1..] {
            assert!(r.gap <= 1e-12);
        }
        for r in &c.gfw[1..] {
            assert!(r.pairing_gap <= 1e-12 && r.primal_gap <= 1e-12);
        }
    }
}
