//! Max-shifted softmax / log-sum-exp and entropy-type sums.

use crate::error::{Error, Result};
use crate::real::Real;

/// Result of a softmax evaluation: probabilities, their logarithms, and the
/// log-partition `log Σ exp(z_i)`.
#[derive(Clone, Debug)]
pub struct Softmax<T> {
    pub probs: Vec<T>,
    pub log_probs: Vec<T>,
    pub log_sum_exp: T,
}

fn max_finite<T: Real>(z: &[T]) -> Result<T> {
    let mut hi = match z.first() {
        Some(v) => v.clone(),
        None => return Err(Error::invalid("softmax of an empty vector")),
    };
    for v in z {
        if !v.is_finite() {
            return Err(Error::Numeric(format!("non-finite logit {v:?}")));
        }
        if *v > hi {
            hi = v.clone();
        }
    }
    Ok(hi)
}

pub fn softmax<T: Real>(z: &[T]) -> Result<Softmax<T>> {
    let hi = max_finite(z)?;
    let shifted: Vec<T> = z.iter().map(|v| v.clone() - &hi).collect();
    let weights: Vec<T> = shifted.iter().map(Real::exp).collect();
    let total = crate::real::sum(&weights);
    let log_total = total.ln();
    let mut probs = Vec::with_capacity(z.len());
    for (i, w) in weights.into_iter().enumerate() {
        let p = w / &total;
        if !(p > T::zero()) {
            return Err(Error::Numeric(format!(
                "softmax coordinate {i} underflowed to zero"
            )));
        }
        probs.push(p);
    }
    let log_probs = shifted.into_iter().map(|s| s - &log_total).collect();
    Ok(Softmax {
        probs,
        log_probs,
        log_sum_exp: hi + log_total,
    })
}

pub fn log_sum_exp<T: Real>(z: &[T]) -> Result<T> {
    let hi = max_finite(z)?;
    let mut total = T::zero();
    for v in z {
        total += (v.clone() - &hi).exp();
    }
    Ok(hi + total.ln())
}

/// `Σ p_i ln p_i` with `0 ln 0 = 0`.
pub fn neg_entropy<T: Real>(p: &[T]) -> T {
    let mut acc = T::zero();
    for pi in p {
        if *pi > T::zero() {
            acc += pi.clone() * pi.ln();
        }
    }
    acc
}

/// `(1 + r) ln(1 + r) - r` for `r > -1`, accurate when `r` is tiny.
fn bregman_kernel<T: Real>(r: &T) -> T {
    // Past this point the first omitted series term r^6/30 is below
    // machine precision relative to r^2/2.
    let cutoff = (T::from_f64(15.0) * T::epsilon()).sqrt().sqrt();
    if r.abs() < cutoff {
        let r2 = r.clone() * r;
        let r3 = r2.clone() * r;
        let r4 = r2.clone() * &r2;
        let r5 = r4.clone() * r;
        r2 / T::from_f64(2.0) - r3 / T::from_f64(6.0) + r4 / T::from_f64(12.0)
            - r5 / T::from_f64(20.0)
    } else {
        (T::one() + r) * r.ln_1p() - r
    }
}

/// `KL(p ‖ q) = Σ p_i ln(p_i / q_i)` where `q` is a strictly positive
/// softmax. Summed as nonnegative Bregman terms `p ln(p/q) - p + q`, so the
/// result keeps relative accuracy as `p → q`.
pub fn kl_to_softmax<T: Real>(p: &[T], q: &Softmax<T>) -> T {
    debug_assert_eq!(p.len(), q.probs.len());
    let half = T::from_f64(0.5);
    let mut acc = T::zero();
    for ((pi, qi), log_qi) in p.iter().zip(&q.probs).zip(&q.log_probs) {
        if pi.is_zero() {
            acc += qi;
            continue;
        }
        let r = (pi.clone() - qi) / qi;
        if r.abs() <= half {
            acc += qi.clone() * bregman_kernel(&r);
        } else {
            acc += pi.clone() * (pi.ln() - log_qi) - pi + qi;
        }
    }
    acc
}
