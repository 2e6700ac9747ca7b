//! Acceptance run: one PASS/FAIL line per criterion, then a summary.
//!
//! `cargo test -p lfp-cli --release --test acceptance` runs everything;
//! numeric arguments (`-- 3 8`) restrict the run to those criteria.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use lfp_core::composite::{linear_rate, random_tilt, run_comparison, EntropicInstance};
use lfp_core::dlfp::{default_fixed_point_budget, verify_recursions_with};
use lfp_core::dlfp::{guaranteed_iterations, Tolerance};
use lfp_core::lfp::{
    estimate_noise_stats, lfp_step, locality_constants, monte_carlo, simulate, AggregateTrace,
    LfpConfig, LfpState, MonteCarloConfig, NoiseRecord,
};
use lfp_core::rng::{seeded, uniform01, Rng};
use lfp_core::schedule::{constant_optimal_step, lemma4_bound};
use lfp_core::{
    entropy, run_dlfp, solve_fixed_point, JointState, Mp, PayoffMatrix, Real, RegularizedGame,
    SimplexPoint, StepSchedule,
};

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// Worst relative recursion slack over a set of trajectories.
#[derive(Default)]
struct RecursionTally {
    trajectories: usize,
    checks: usize,
    failed: usize,
    worst: f64,
}

impl RecursionTally {
    fn new() -> Self {
        Self {
            worst: f64::INFINITY,
            ..Self::default()
        }
    }

    fn record(&mut self, pass: bool, rel_slack: f64) {
        self.checks += 1;
        self.failed += !pass as usize;
        self.worst = self.worst.min(rel_slack);
    }
}

/// The fixed game set shared by criteria 1 and 2.
fn instance(k: usize) -> (RegularizedGame, u64) {
    let sizes = [5usize, 10, 20];
    let (n, m) = (sizes[k % 3], sizes[(k / 3) % 3]);
    let a = PayoffMatrix::random(m, n, 1000 + k as u64).unwrap();
    if k % 2 == 0 {
        (RegularizedGame::new(a, 0.05).unwrap(), 100_000)
    } else {
        (RegularizedGame::new(a, 0.5).unwrap(), 10_000)
    }
}

/// Both recursions from the recorded gaps, relative tolerance 1e-9.
fn recursions_from_gaps<T: Real>(
    game: &RegularizedGame<T>,
    trace: &lfp_core::Trace<T>,
    tally: &mut RecursionTally,
) {
    let k2 = game.kappa() * &game.kappa();
    let c = T::from_f64(4.0) * game.eta() * &k2;
    let rel = T::from_f64(1e-9);
    for w in trace.records.windows(2) {
        let (v, v1, a) = (&w[0].gap, &w[1].gap, &w[0].alpha);
        let tol = rel.clone() * v;
        let mult = (T::one() - a + k2.clone() * a * a) * v;
        let add = (T::one() - a) * v + a.clone() * a * &c;
        for rhs in [mult, add] {
            let pass = *v1 <= rhs.clone() + &tol;
            let scale = if v.is_zero() { T::one() } else { v.clone() };
            tally.record(pass, ((rhs - v1) / scale).to_f64());
        }
    }
    tally.trajectories += 1;
}

fn linear_run<T: Real>(k: usize, tally: &mut RecursionTally) -> (f64, u64, f64) {
    let (g, iters) = instance(k);
    let sched = StepSchedule::Constant(constant_optimal_step(g.kappa()));
    let gt = g.to_precision::<T>();
    let n = g.n();
    let m = g.m();
    let tr = run_dlfp(&gt, &JointState::uniform(n, m), &sched, iters, false).unwrap();
    let mut worst = (f64::INFINITY, 0);
    for r in &tr.records[1..] {
        let b = r.bound.clone().expect("constant schedule carries a bound");
        let slack = if b.is_zero() {
            if r.gap.is_zero() {
                0.0
            } else {
                -1.0
            }
        } else {
            ((b.clone() - &r.gap) / b).to_f64()
        };
        if slack < worst.0 {
            worst = (slack, r.t);
        }
    }
    recursions_from_gaps(&gt, &tr, tally);
    (worst.0, worst.1, tr.records.last().unwrap().gap.to_f64())
}

fn criterion_1(tally: &mut RecursionTally) -> Verdict {
    let mut worst = (f64::INFINITY, 0usize, 0u64);
    let mut ok = true;
    for k in 0..20 {
        let (slack, t, last) = if k % 2 == 0 {
            linear_run::<Mp<256>>(k, tally)
        } else {
            // At η = 0.5 the gap itself reaches ~1e-1300 by t = 10⁴.
            linear_run::<Mp<2560>>(k, tally)
        };
        ok &= slack >= -1e-9;
        if slack < worst.0 {
            worst = (slack, k, t);
        }
        eprintln!("  [1] game {k}: worst relative slack {slack:.3e} at t={t}, V_T={last:.3e}");
    }
    Verdict::new(
        ok,
        format!(
            "20 games, worst relative slack {:.3e} (game {}, t={})",
            worst.0, worst.1, worst.2
        ),
    )
}

fn criterion_2(tally: &mut RecursionTally) -> Verdict {
    let mut ok = true;
    let mut worst = (f64::INFINITY, String::new());
    for k in 0..20 {
        let (g, _) = instance(k);
        let c = 4.0 * g.eta() * g.kappa() * g.kappa();
        for q in [1u32, 2] {
            let sched = StepSchedule::RationalQ(q);
            let tr =
                run_dlfp(&g, &JointState::uniform(g.n(), g.m()), &sched, 10_000, true).unwrap();
            for r in &tr.records[1..] {
                let t = r.t as f64;
                let b = if q == 1 {
                    c * (1.0 + t.ln()) / t
                } else {
                    4.0 * c / (t + 1.0)
                };
                let slack = (b - r.gap) / b;
                ok &= r.gap <= b;
                if slack < worst.0 {
                    worst = (slack, format!("game {k}, q={q}, t={}", r.t));
                }
            }
            let rep = verify_recursions_with(
                &g,
                &tr,
                Tolerance {
                    rel: 1e-9,
                    floor: 0.0,
                },
            )
            .unwrap();
            for ch in &rep.checks {
                if matches!(
                    ch.kind,
                    lfp_core::CheckKind::MultiplicativeRecursion
                        | lfp_core::CheckKind::AdditiveRecursion
                ) {
                    let scale = if ch.lhs > 0.0 {
                        ch.lhs.max(ch.rhs)
                    } else {
                        1.0
                    };
                    tally.record(ch.pass, ch.slack / scale);
                } else if !ch.pass {
                    tally.record(false, ch.slack);
                }
            }
            tally.trajectories += 1;
        }
    }
    Verdict::new(
        ok,
        format!(
            "40 trajectories, worst relative slack {:.3e} ({})",
            worst.0, worst.1
        ),
    )
}

fn criterion_3(tally: &RecursionTally) -> Verdict {
    Verdict::new(
        tally.trajectories == 60 && tally.failed == 0,
        format!(
            "{} trajectories, {} checks, {} failed, worst relative slack {:.3e}",
            tally.trajectories, tally.checks, tally.failed, tally.worst
        ),
    )
}

fn criterion_4() -> Verdict {
    let mut failed = 0;
    let mut checks = 0;
    for q in 1..=3u32 {
        let s = StepSchedule::RationalQ(q);
        for c in [0.0, 0.5, 1.0, 10.0] {
            let mut v = 1.0;
            for t in 0..10_000u64 {
                let a = s.step_size(t);
                v = (1.0 - a) * v + a * a * c;
                let b = lemma4_bound(c, &s, t + 1).unwrap();
                checks += 1;
                failed += (v > b * (1.0 + 1e-12)) as usize;
            }
        }
    }
    Verdict::new(failed == 0, format!("{checks} checks, {failed} failed"))
}

fn random_simplex(g: &mut Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| 1e-3 + uniform01(g)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

fn random_vec(g: &mut Rng, n: usize, half_width: f64) -> Vec<f64> {
    (0..n)
        .map(|_| half_width * (2.0 * uniform01(g) - 1.0))
        .collect()
}

fn dim(g: &mut Rng, max: usize) -> usize {
    1 + (uniform01(g) * max as f64) as usize
}

fn criterion_5() -> Verdict {
    const DRAWS: usize = 1000;
    let mut g = seeded(5);
    let mut fails = [0usize; 3];
    for _ in 0..DRAWS {
        // Bregman divergence of negative entropy is KL; Pinsker bounds it below.
        let n = 1 + dim(&mut g, 7);
        let p = SimplexPoint::new(random_simplex(&mut g, n)).unwrap();
        let q = SimplexPoint::new(random_simplex(&mut g, n)).unwrap();
        let lin: f64 = p
            .probs()
            .iter()
            .zip(q.probs())
            .map(|(a, b)| (b.ln() + 1.0) * (a - b))
            .sum();
        let kl = entropy(&p) - entropy(&q) - lin;
        let l1 = p.l1_distance(&q);
        fails[0] += (kl - 0.5 * l1 * l1 < -1e-12) as usize;

        let n = dim(&mut g, 8);
        let eta = 0.01 + 4.99 * uniform01(&mut g);
        let game = RegularizedGame::new(PayoffMatrix::zeros(1, n).unwrap(), eta).unwrap();
        let w = random_vec(&mut g, n, 3.0);
        let w2 = random_vec(&mut g, n, 3.0);
        let grad = game.conjugate_grad_x(&w).unwrap();
        let sup = w
            .iter()
            .zip(&w2)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let lin: f64 = grad
            .probs()
            .iter()
            .zip(w2.iter().zip(&w))
            .map(|(p, (a, b))| p * (a - b))
            .sum();
        let rhs = game.conjugate_x(&w).unwrap() + lin + sup * sup / (2.0 * eta);
        fails[1] += (rhs - game.conjugate_x(&w2).unwrap() < -1e-10) as usize;

        let n = dim(&mut g, 8);
        let eta = 0.05 + 1.95 * uniform01(&mut g);
        let game = RegularizedGame::new(PayoffMatrix::zeros(1, n).unwrap(), eta).unwrap();
        let w = random_vec(&mut g, n, 1.0);
        let grad = game.conjugate_grad_x(&w).unwrap();
        let h = 1e-5;
        let mut err = 0.0f64;
        for i in 0..n {
            let (mut up, mut dn) = (w.clone(), w.clone());
            up[i] += h;
            dn[i] -= h;
            let fd = (game.conjugate_x(&up).unwrap() - game.conjugate_x(&dn).unwrap()) / (2.0 * h);
            err = err.max((fd - grad.probs()[i]).abs());
        }
        let scale = grad.probs().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        fails[2] += (err > 1e-6 * scale) as usize;
    }
    Verdict::new(
        fails == [0; 3],
        format!(
            "{DRAWS} draws each: Pinsker {} failed, descent lemma {} failed, Danskin {} failed",
            fails[0], fails[1], fails[2]
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut g = seeded(6);
    let (mut accepted, mut drawn, mut failed) = (0, 0, 0);
    let mut worst = 0.0f64;
    while accepted < 1000 {
        drawn += 1;
        let (m, n) = (dim(&mut g, 5), dim(&mut g, 5));
        let a = PayoffMatrix::from_row_major(m, n, random_vec(&mut g, m * n, 1.0)).unwrap();
        let game = RegularizedGame::new(a, 0.05 + 1.95 * uniform01(&mut g)).unwrap();
        let x = SimplexPoint::new(random_simplex(&mut g, n)).unwrap();
        let y = SimplexPoint::new(random_simplex(&mut g, m)).unwrap();
        let v = game.duality_gap(&x, &y).unwrap();
        if v > 10.0 {
            continue;
        }
        accepted += 1;
        let d = (v - game.duality_gap_alt(&x, &y).unwrap()).abs();
        worst = worst.max(d);
        failed += (d > 1e-9) as usize;
    }
    Verdict::new(
        failed == 0,
        format!("{accepted} triples ({drawn} drawn), {failed} failed, max difference {worst:.3e}"),
    )
}

fn criterion_7() -> Verdict {
    let tol = 1e-10;
    let mp = RegularizedGame::new(PayoffMatrix::matching_pennies(), 0.2).unwrap();
    let budget = default_fixed_point_budget(&mp, tol).unwrap();
    let sp = solve_fixed_point(&mp, tol, budget).unwrap();
    let half = SimplexPoint::uniform(2);
    let err = sp
        .x_star
        .l1_distance(&half)
        .max(sp.y_star.l1_distance(&half));
    let mut ok = err <= 1e-8;
    let mut detail = format!("matching pennies l1 error {err:.3e}");
    let sizes = [5usize, 10, 20];
    let etas = [0.05, 0.1, 0.5];
    let mut worst = (0.0f64, 0i64);
    for k in 0..10 {
        let (n, m) = (sizes[k % 3], sizes[(k / 3) % 3]);
        let g = RegularizedGame::new(
            PayoffMatrix::random(m, n, 700 + k as u64).unwrap(),
            etas[k % 3],
        )
        .unwrap();
        let v0 = g
            .duality_gap(&SimplexPoint::uniform(n), &SimplexPoint::uniform(m))
            .unwrap();
        let cap = guaranteed_iterations(g.kappa(), v0, tol).unwrap() + 1;
        match solve_fixed_point(&g, tol, cap) {
            Ok(sp) => {
                ok &= sp.residual <= 1e-8 && sp.iterations <= cap;
                worst.0 = worst.0.max(sp.residual);
                worst.1 = worst.1.max(sp.iterations as i64 - cap as i64);
            }
            Err(e) => {
                ok = false;
                detail.push_str(&format!("; game {k}: {e}"));
            }
        }
    }
    detail.push_str(&format!(
        "; 10 random games: max residual {:.3e}, max iterations minus cap {}",
        worst.0, worst.1
    ));
    Verdict::new(ok, detail)
}

/// Least-squares slope of `ln y` against `ln t`.
fn log_log_slope(points: &[(u64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .map(|&(t, v)| ((t as f64).ln(), v.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// 21 log-spaced times over `[lo, hi]`, each snapped to `available`.
fn log_grid(lo: u64, hi: u64, available: &[u64]) -> Vec<u64> {
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<u64> = (0..=20)
        .map(|k| (a + (b - a) * k as f64 / 20.0).exp())
        .map(|t| {
            *available
                .iter()
                .min_by(|p, q| {
                    ((**p as f64) - t)
                        .abs()
                        .total_cmp(&((**q as f64) - t).abs())
                })
                .unwrap()
        })
        .collect();
    out.dedup();
    out
}

fn criterion_8() -> Vec<(&'static str, Verdict)> {
    let g = RegularizedGame::new(PayoffMatrix::matching_pennies(), 0.2).unwrap();
    let sp = solve_fixed_point(&g, 1e-12, default_fixed_point_budget(&g, 1e-12).unwrap()).unwrap();
    let loc = locality_constants(&g, &sp, 4.0, 4.0).unwrap();
    let run = |q: u32| -> AggregateTrace {
        let cfg = MonteCarloConfig::new(
            StepSchedule::RationalQ(q),
            10_000,
            1000,
            2024,
            (loc.r_x, loc.r_y),
            100,
        );
        monte_carlo(&g, &cfg, &sp).unwrap()
    };
    let (a1, a2) = (run(1), run(2));
    let (f1, f2) = (a1.event_fraction(), a2.event_fraction());
    let a = Verdict::new(
        f1 >= 0.9 && f2 >= 0.9,
        format!(
            "event fraction q=1 {f1:.3}, q=2 {f2:.3} (radii {:.3}, {:.3})",
            loc.r_x, loc.r_y
        ),
    );

    let (l1, l2) = (a1.rows.last().unwrap(), a2.rows.last().unwrap());
    let b = match (l1.conditional_mean_gap, l2.conditional_mean_gap) {
        (Some(m1), Some(m2)) => {
            let margin = (l1.conditional_ci95.unwrap().powi(2)
                + l2.conditional_ci95.unwrap().powi(2))
            .sqrt();
            Verdict::new(
                m2 <= m1 + margin,
                format!(
                    "t=1e4 conditional mean q=2 {m2:.4e}, q=1 {m1:.4e}, 95% margin {margin:.2e}"
                ),
            )
        }
        _ => Verdict::new(false, "no replica stayed in the event"),
    };

    let times: Vec<u64> = a2.rows.iter().map(|r| r.t).collect();
    let pts: Vec<(u64, f64)> = log_grid(100, 10_000, &times)
        .into_iter()
        .filter_map(|t| {
            a2.row_at(t)
                .and_then(|r| r.conditional_mean_gap)
                .map(|v| (t, v))
        })
        .collect();
    let c = if pts.len() >= 2 {
        let s = log_log_slope(&pts);
        Verdict::new(
            (-1.3..=-0.6).contains(&s),
            format!("q=2 conditional slope {s:.3} over {} times", pts.len()),
        )
    } else {
        Verdict::new(false, "no conditional means to fit")
    };
    vec![("8a", a), ("8b", b), ("8c", c)]
}

fn criterion_9() -> Verdict {
    let g = RegularizedGame::new(PayoffMatrix::random(3, 3, 4).unwrap(), 0.1).unwrap();
    let cfg = LfpConfig::new(StepSchedule::RationalQ(2), 1_000_000, 4);
    let (mut steps, mut over) = (0u64, 0u64);
    let mut largest = 0.0f64;
    simulate(&g, &cfg, &mut seeded(cfg.seed), |_, _, rec| {
        if let Some(r) = rec {
            steps += 1;
            over += (r.l1_x() > 2.0 || r.l1_y() > 2.0) as u64;
            largest = largest.max(r.l1_x()).max(r.l1_y());
        }
        Ok(())
    })
    .unwrap();

    let g = RegularizedGame::new(PayoffMatrix::random(3, 4, 21).unwrap(), 0.25).unwrap();
    let s = LfpState {
        x: SimplexPoint::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap(),
        y: SimplexPoint::new(vec![0.6, 0.3, 0.1]).unwrap(),
        last_actions: (0, 0),
    };
    let mut r = seeded(99);
    let recs: Vec<NoiseRecord> = (0..100_000)
        .map(|_| lfp_step(&g, &s, 0.1, &mut r).unwrap().1)
        .collect();
    let stats = estimate_noise_stats(&recs).unwrap();
    let v = g.logit_response_x(&s.y).unwrap();
    let w = g.logit_response_y(&s.x).unwrap();
    let n = recs.len() as f64;
    let mut worst_z = 0.0f64;
    for (mean, p) in stats
        .mean_zeta_x
        .iter()
        .zip(v.probs())
        .chain(stats.mean_zeta_y.iter().zip(w.probs()))
    {
        worst_z = worst_z.max(mean.abs() / (p * (1.0 - p) / n).sqrt());
    }
    Verdict::new(
        steps == 1_000_000 && over == 0 && worst_z <= 6.0,
        format!("{steps} steps, {over} with l1 > 2 (max {largest}); frozen-state mean max {worst_z:.2} SE"),
    )
}

fn criterion_10() -> Vec<(&'static str, Verdict)> {
    let (mut a_ok, mut b_ok, mut c_ok, mut d_ok) = (true, true, true, true);
    let (mut a_d, mut b_d, mut c_d, mut d_d) = (vec![], vec![], vec![], vec![]);
    for seed in [10u64, 11, 12] {
        let p = EntropicInstance::new(
            PayoffMatrix::random(10, 10, seed).unwrap(),
            0.5,
            0.5,
            random_tilt(10, seed + 100),
        )
        .unwrap();
        let probe = run_comparison(&p, 1, &StepSchedule::NesterovGfw, None).unwrap();
        let kb = probe.kappa_bar;
        let v0 = probe.dlfp[0].gap;
        let tb = ((v0 / 1e-10).ln() / -(1.0 - 1.0 / (4.0 * kb * kb)).ln())
            .ceil()
            .max(0.0) as u64;
        let c = run_comparison(&p, 1000.max(tb), &StepSchedule::NesterovGfw, None).unwrap();

        let rho = linear_rate(kb);
        let worst = c.dlfp[1..=1000]
            .iter()
            .map(|r| {
                let b = rho.powf(r.t as f64) * v0;
                (b - r.gap) / b
            })
            .fold(f64::INFINITY, f64::min);
        a_ok &= worst >= -1e-9;
        a_d.push(format!("{worst:.2e}"));

        let at = c.dlfp[tb as usize].gap;
        b_ok &= at <= 1e-10;
        b_d.push(format!("V_{tb}={at:.2e}"));

        let pts: Vec<(u64, f64)> = log_grid(100, 1000, &(100..=1000).collect::<Vec<_>>())
            .into_iter()
            .map(|t| (t, c.gfw[t as usize].certificate()))
            .collect();
        let s = log_log_slope(&pts);
        c_ok &= (-2.6..=-1.6).contains(&s);
        c_d.push(format!("{s:.3}"));

        let (dl, gf) = (c.dlfp[1000].gap, c.gfw[1000].certificate());
        d_ok &= dl < gf;
        d_d.push(format!("{dl:.2e} < {gf:.2e}"));
    }
    vec![
        (
            "10a",
            Verdict::new(
                a_ok,
                format!("worst relative slack per seed [{}]", a_d.join(", ")),
            ),
        ),
        ("10b", Verdict::new(b_ok, format!("[{}]", b_d.join(", ")))),
        (
            "10c",
            Verdict::new(c_ok, format!("GFW certificate slopes [{}]", c_d.join(", "))),
        ),
        (
            "10d",
            Verdict::new(d_ok, format!("DLFP vs GFW at t=1000 [{}]", d_d.join(", "))),
        ),
    ]
}

fn criterion_11() -> Verdict {
    let mut worst = 0.0f64;
    for (k, eta) in [(0u64, 0.05), (1, 0.2), (2, 0.5), (3, 1.0)] {
        let a = PayoffMatrix::random(6 + k as usize, 8, 300 + k).unwrap();
        let g = RegularizedGame::new(a.clone(), eta).unwrap();
        let p = EntropicInstance::untilted(a, eta).unwrap();
        let c = run_comparison(&p, 1000, &StepSchedule::NesterovGfw, None).unwrap();
        let sched = StepSchedule::Constant(c.dlfp_alpha);
        let tr = run_dlfp(&g, &JointState::uniform(g.n(), g.m()), &sched, 1000, true).unwrap();
        for (r, d) in tr.records.iter().zip(&c.dlfp) {
            let s = r.state.as_ref().unwrap();
            for (u, v) in
                s.x.probs()
                    .iter()
                    .zip(&d.x)
                    .chain(s.y.probs().iter().zip(&d.y))
            {
                worst = worst.max((u - v).abs());
            }
        }
    }
    Verdict::new(
        worst <= 1e-12,
        format!("4 games x 1001 iterates, max coordinate difference {worst:.3e}"),
    )
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion_12() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_lfp");
    let runs: [(&str, &[&str]); 7] = [
        (
            "dlfp",
            &["--payoff", "random:5x4:3", "--eta", "0.3", "--iters", "500"],
        ),
        (
            "verify",
            &["--payoff", "random:5x4:3", "--eta", "0.3", "--iters", "300"],
        ),
        ("fixed-point", &["--payoff", "random:6x5:8", "--eta", "0.2"]),
        (
            "composite",
            &[
                "--payoff",
                "random:6x6:2",
                "--eta",
                "0.5",
                "--tilt",
                "random:9",
                "--iters",
                "300",
            ],
        ),
        (
            "complexity",
            &["--payoff", "matching-pennies", "--eta", "0.2"],
        ),
        (
            "lfp",
            &[
                "--payoff",
                "random:4x4:1",
                "--eta",
                "0.2",
                "--iters",
                "20000",
                "--seed",
                "7",
            ],
        ),
        (
            "lfp-mc",
            &[
                "--payoff",
                "matching-pennies",
                "--eta",
                "0.2",
                "--iters",
                "2000",
                "--replicas",
                "20",
                "--seed",
                "3",
            ],
        ),
    ];
    let root = tempfile::tempdir().unwrap();
    let mut bad = vec![];
    let mut files = 0;
    for (name, args) in runs {
        let mut outputs = vec![];
        for rep in 0..2 {
            let out = root.path().join(format!("{name}-{rep}"));
            let st = Command::new(bin)
                .arg(name)
                .args(args)
                .arg("--out")
                .arg(&out)
                .output()
                .unwrap();
            if !st.status.success() {
                bad.push(format!("{name} exited {:?}", st.status.code()));
            }
            outputs.push(read_dir_bytes(&out));
        }
        files += outputs[0].len();
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            bad.push(format!("{name} differs"));
        }
    }
    let detail = if bad.is_empty() {
        format!("7 subcommands, {files} files byte-identical across reruns")
    } else {
        bad.join("; ")
    };
    Verdict::new(bad.is_empty(), detail)
}

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let want = |n: u32| selected.is_empty() || selected.contains(&n);
    let mut results: Vec<(String, Verdict, f64)> = vec![];
    let mut report = |id: &str, v: Verdict, secs: f64| {
        println!(
            "criterion {id:<3} {} {} [{secs:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        results.push((id.to_string(), v, secs));
    };
    let timed = |f: &mut dyn FnMut() -> Verdict| {
        let t0 = Instant::now();
        let v = f();
        (v, t0.elapsed().as_secs_f64())
    };

    let mut tally = RecursionTally::new();
    if want(1) || want(3) {
        let (v, s) = timed(&mut || criterion_1(&mut tally));
        report("1", v, s);
    }
    if want(2) || want(3) {
        let (v, s) = timed(&mut || criterion_2(&mut tally));
        report("2", v, s);
    }
    if want(3) {
        report("3", criterion_3(&tally), 0.0);
    }
    let singles: [(u32, fn() -> Verdict); 5] = [
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (9, criterion_9),
    ];
    for (n, f) in singles.iter().take(4) {
        if want(*n) {
            let (v, s) = timed(&mut || f());
            report(&n.to_string(), v, s);
        }
    }
    if want(8) {
        let t0 = Instant::now();
        let parts = criterion_8();
        let secs = t0.elapsed().as_secs_f64();
        for (id, v) in parts {
            report(id, v, secs);
        }
    }
    if want(9) {
        let (v, s) = timed(&mut || singles[4].1());
        report("9", v, s);
    }
    if want(10) {
        let t0 = Instant::now();
        let parts = criterion_10();
        let secs = t0.elapsed().as_secs_f64();
        for (id, v) in parts {
            report(id, v, secs);
        }
    }
    if want(11) {
        let (v, s) = timed(&mut || criterion_11());
        report("11", v, s);
    }
    if want(12) {
        let (v, s) = timed(&mut || criterion_12());
        report("12", v, s);
    }

    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.1.pass)
        .map(|r| r.0.as_str())
        .collect();
    println!(
        "acceptance: {} passed, {} failed{}",
        results.len() - failed.len(),
        failed.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(" ({})", failed.join(", "))
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
