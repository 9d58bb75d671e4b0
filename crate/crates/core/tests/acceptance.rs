//! Acceptance suite. Prints one `[PASS]` / `[FAIL]` line per criterion and
//! exits non-zero if any criterion fails.
//!
//! Run with `cargo test -p memflow --test acceptance`.

mod common;

use std::time::{Duration, Instant};

use common::*;
use memflow::analysis::{cp_scan, cp_temperature_threshold, divisibility_scan, positivity_scan, tau_grid, CP_TOL};
use memflow::dynamics::SnapshotSource;
use memflow::flow::{flow_report, measure, FlowKernel};
use memflow::oracle::{closed_form_trajectory, integrate_augmented, integrate_quadrature, integrate_tcl, GeneratorMatrix, TimeGrid};
use memflow::{snapshot, xi, EquationKind, MapParams, QubitState, StatePair};
use rayon::prelude::*;

use EquationKind::{MemoryKernel, PostMarkovian};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn identity_initialization() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut exact = true;
    for kind in EquationKind::ALL {
        for r in log_space(1e-3, 1e2, 20) {
            for n in [0.0, 1.0, 10.0] {
                let p = MapParams::from_ratio(r, n).unwrap();
                let s = snapshot(kind, &p, 0.0).unwrap();
                exact &= s.lambda1 == 1.0 && s.lambda3 == 1.0 && s.t3 == 0.0;
            }
            worst = worst.max((xi(kind, r, 0.0).unwrap() - 1.0).abs());
        }
    }
    outcome(exact && worst <= f64::EPSILON, format!("snapshot(0) exact: {exact}, max |xi(0) - 1| = {worst:e}"))
}

fn oracle_triangle() -> Outcome {
    let grid = TimeGrid::uniform(10.0, 201).unwrap();
    let mut rng = rng(2024);
    let mut cases = Vec::new();
    for (kind, p) in physical_grid() {
        for _ in 0..5 {
            cases.push((kind, p, random_state(&mut rng)));
        }
    }
    let worst = cases
        .par_iter()
        .map(|(kind, p, s0)| {
            let exact = closed_form_trajectory(*kind, p, s0, &grid);
            let ode = integrate_augmented(*kind, p, s0, &grid, 1e-10).unwrap();
            let quad = integrate_quadrature(*kind, &GeneratorMatrix::thermal(p), p, s0, 10.0, 2000).unwrap();
            let a = ode.max_deviation(&exact).unwrap();
            let b = quad.max_deviation(&exact).unwrap();
            let c = quad.max_deviation(&ode).unwrap();
            a.max(b).max(c)
        })
        .reduce(|| 0.0, f64::max);
    outcome(worst <= 1e-5, format!("{} trajectories, max element gap {worst:.3e} (tol 1e-5)", cases.len()))
}

fn sigma_non_positive() -> Outcome {
    let taus: Vec<f64> = (0..1000).map(|i| 20.0 * i as f64 / 999.0).collect();
    let worst = physical_grid()
        .par_iter()
        .enumerate()
        .map(|(k, (kind, p))| {
            let kernel = FlowKernel::new(*kind, p);
            let prof: Vec<[f64; 4]> = taus.iter().map(|&t| kernel.profiles(t)).collect();
            let mut rng = rng(300 + k as u64);
            let mut worst = f64::NEG_INFINITY;
            let mut pairs = 0;
            while pairs < 500 {
                let pair = StatePair::new(random_state(&mut rng), random_state(&mut rng));
                if pair.is_degenerate() {
                    continue;
                }
                pairs += 1;
                let a0 = pair.a0();
                let coh = pair.b0().norm_sqr();
                for pr in &prof {
                    worst = worst.max(kernel.sample(a0 * a0, coh, pr).sigma);
                }
            }
            worst
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    outcome(worst <= 1e-10, format!("24 points x 500 pairs x 1000 times, max sigma {worst:.3e}"))
}

fn zero_measure() -> Outcome {
    let mut points: Vec<(EquationKind, MapParams<f64>)> = Vec::new();
    for r in RATIOS {
        for n in OCCUPATIONS {
            points.push((MemoryKernel, MapParams::from_ratio(r, n).unwrap()));
        }
    }
    for r in RATIOS.iter().copied().chain([0.5, 1.0, 5.0]) {
        for n in OCCUPATIONS {
            points.push((PostMarkovian, MapParams::from_ratio(r, n).unwrap()));
        }
    }
    let mut worst: f64 = 0.0;
    let mut certified = true;
    for (kind, p) in &points {
        let m = measure(*kind, p, 20.0, 1000).unwrap();
        worst = worst.max(m.value).max(m.report_gain);
        certified &= m.tail.is_certified();
    }
    outcome(
        worst <= 1e-8 && certified,
        format!("{} points, budget 1000, max value {worst:e}, tails certified: {certified}", points.len()),
    )
}

/// Extremes of the rates over `(0, 20]` on a 1000-point grid.
fn rate_extremes(kind: EquationKind) -> (f64, f64, f64) {
    let (mut g3_max, mut g1_min, mut g2_min) = (f64::NEG_INFINITY, f64::INFINITY, f64::INFINITY);
    for r in RATIOS {
        for n in OCCUPATIONS {
            let src = SnapshotSource::new(kind, &MapParams::from_ratio(r, n).unwrap());
            for i in 1..=1000 {
                let g = src.rates(20.0 * i as f64 / 1000.0).unwrap();
                g3_max = g3_max.max(g.gamma3);
                g1_min = g1_min.min(g.gamma1);
                g2_min = g2_min.min(g.gamma2);
            }
        }
    }
    (g3_max, g1_min, g2_min)
}

fn gamma3_negative(kind: EquationKind) -> Outcome {
    let (g3, g1, g2) = rate_extremes(kind);
    outcome(
        g3 < 0.0 && g1 > 0.0 && g2 > 0.0,
        format!("{kind}: max gamma3 {g3:.3e}, min gamma1 {g1:.3e}, min gamma2 {g2:.3e}"),
    )
}

fn nondivisible_zero_measure() -> Outcome {
    let p = MapParams::from_ratio(0.2, 1.0).unwrap();
    let d = divisibility_scan(MemoryKernel, &p, 20.0, 200, 1e-9).unwrap();
    let m = measure(MemoryKernel, &p, 20.0, 1000).unwrap();
    outcome(
        d.min_eigenvalue <= -1e-6 && m.value <= 1e-8,
        format!(
            "min Choi eigenvalue {:.3e} at (tau1, tau2) = ({:.3}, {:.3}), measure {:e}",
            d.min_eigenvalue, d.tau1, d.tau2, m.value
        ),
    )
}

fn post_markovian_cp() -> Outcome {
    let taus = tau_grid(20.0, 200).unwrap();
    let rs = log_space(1e-2, 1e2, 20);
    let worst = rs
        .par_iter()
        .map(|&r| {
            [0.0, 0.1, 1.0, 10.0, 100.0]
                .iter()
                .map(|&n| cp_scan(PostMarkovian, &MapParams::from_ratio(r, n).unwrap(), &taus, CP_TOL).min_eigenvalue)
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    outcome(worst >= -1e-10, format!("100 points x 200 times, min Choi eigenvalue {worst:.3e}"))
}

/// Evaluated at zero temperature, where trigonometric profiles push the
/// excited population below the ground state.
fn positivity_threshold() -> Outcome {
    let taus = tau_grid(20.0, 401).unwrap();
    let pair = StatePair::new(QubitState::excited(), QubitState::ground());
    let mut pass = true;
    let mut parts = Vec::new();
    for four_r in [0.5, 0.9, 1.0, 1.2, 2.0, 4.0] {
        let p = MapParams::from_ratio(four_r / 4.0, 0.0).unwrap();
        let s = positivity_scan(MemoryKernel, &p, &taus, 2562).unwrap();
        let expect_positive = four_r <= 1.0;
        let mut ok = s.positive == expect_positive;
        if !expect_positive {
            let rep = flow_report(MemoryKernel, &p, &pair, 20.0, 2001).unwrap();
            ok &= !rep.positive_intervals.is_empty();
        }
        pass &= ok;
        parts.push(format!("4R={four_r}: max norm {:.4} at tau {:.2}{}", s.max_norm, s.tau, if ok { "" } else { " (!)" }));
    }
    outcome(pass, format!("N = 0; {}", parts.join(", ")))
}

fn low_temperature_cp() -> Outcome {
    let taus = tau_grid(20.0, 401).unwrap();
    let mut witness = None;
    let mut hot_worst = f64::INFINITY;
    let mut thresholds = Vec::new();
    for r in RATIOS {
        for n in [0.0, 0.1, 0.2] {
            let s = cp_scan(MemoryKernel, &MapParams::from_ratio(r, n).unwrap(), &taus, CP_TOL);
            if !s.completely_positive && witness.is_none() {
                witness = Some((r, n, s.min_eigenvalue, s.tau));
            }
        }
        hot_worst = hot_worst.min(cp_scan(MemoryKernel, &MapParams::from_ratio(r, 10.0).unwrap(), &taus, CP_TOL).min_eigenvalue);
        let th = cp_temperature_threshold(MemoryKernel, r, &taus, 10.0, 1e-4, CP_TOL).unwrap();
        thresholds.push(format!("R={r}: {}", th.map_or("none".into(), |t| format!("{t:.4}"))));
    }
    let pass = witness.is_some() && hot_worst >= -CP_TOL;
    let w = witness.map_or("none".into(), |(r, n, e, t)| format!("R={r} N={n} eig {e:.3e} at tau {t:.2}"));
    outcome(
        pass,
        format!("witness {w}; N=10 min eig {hot_worst:.3e}; N thresholds [{}]", thresholds.join(", ")),
    )
}

fn markov_limit() -> Outcome {
    let r = 1e-3;
    let mut worst: f64 = 0.0;
    for kind in EquationKind::ALL {
        for i in 0..=5000 {
            let t = i as f64 * 1e-3;
            worst = worst.max((xi(kind, r, t).unwrap() - (-r * t).exp()).abs());
        }
    }
    outcome(worst <= 1e-2, format!("sup |xi - exp(-R tau)| = {worst:.3e}"))
}

fn tcl_exactness() -> Outcome {
    let grid = TimeGrid::uniform(10.0, 201).unwrap();
    let mut rng = rng(11);
    let cases: Vec<_> = physical_grid().into_iter().map(|(k, p)| (k, p, random_state(&mut rng))).collect();
    let worst = cases
        .par_iter()
        .map(|(kind, p, s0)| {
            let tcl = integrate_tcl(*kind, p, s0, &grid, 1e-10).unwrap();
            tcl.max_deviation(&closed_form_trajectory(*kind, p, s0, &grid)).unwrap()
        })
        .reduce(|| 0.0, f64::max);
    outcome(worst <= 1e-6, format!("24 points, max element gap {worst:.3e}"))
}

fn reduction_limit() -> Outcome {
    let gap = |r: f64| {
        (0..=5000)
            .map(|i| i as f64 * 1e-3)
            .map(|t| (xi(PostMarkovian, r, t).unwrap() - xi(MemoryKernel, r, t).unwrap()).abs())
            .fold(0.0, f64::max)
    };
    let gaps: Vec<f64> = [0.05, 0.02, 0.01, 0.005].iter().map(|&r| gap(r)).collect();
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    outcome(
        gaps[2] <= 5e-2 && monotone,
        format!(
            "max |xi_P - xi_M| for R = 0.05, 0.02, 0.01, 0.005: {}",
            gaps.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn main() {
    type Check = (&'static str, Box<dyn Fn() -> Outcome>, Option<Duration>);
    let checks: Vec<Check> = vec![
        ("1  identity initialization", Box::new(identity_initialization), Some(Duration::from_secs(1))),
        ("2  oracle triangle", Box::new(oracle_triangle), Some(Duration::from_secs(60))),
        ("3  sigma <= 0 in the physical regime", Box::new(sigma_non_positive), Some(Duration::from_secs(60))),
        ("4  zero measure", Box::new(zero_measure), Some(Duration::from_secs(120))),
        ("5a gamma3 < 0, memory kernel", Box::new(|| gamma3_negative(MemoryKernel)), None),
        ("5b gamma3 < 0, post-Markovian", Box::new(|| gamma3_negative(PostMarkovian)), None),
        ("6  nondivisible with zero measure", Box::new(nondivisible_zero_measure), None),
        ("7  post-Markovian CP", Box::new(post_markovian_cp), None),
        ("8  memory-kernel positivity threshold", Box::new(positivity_threshold), None),
        ("9  low-temperature CP breakdown", Box::new(low_temperature_cp), None),
        ("10 Markovian limit", Box::new(markov_limit), None),
        ("11 TCL exactness", Box::new(tcl_exactness), None),
        ("12 reduction limit", Box::new(reduction_limit), None),
    ];
    let mut failed = 0;
    for (name, check, limit) in checks {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        let timing = match limit {
            Some(l) => format!("{:.2}s / {}s", elapsed.as_secs_f64(), l.as_secs()),
            None => format!("{:.2}s", elapsed.as_secs_f64()),
        };
        println!("[{}] {name}: {} ({timing})", if pass { "PASS" } else { "FAIL" }, out.detail);
    }
    println!("acceptance: {failed} failing");
    if failed > 0 {
        std::process::exit(1);
    }
}
