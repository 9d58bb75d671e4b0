use anyhow::{bail, Result};
use memflow::analysis::{choi_of, classify, divisibility_scan, ClassifyOptions, PositivityProbe, RegimeReport};
use memflow::dynamics::{DecayProfile, SnapshotSource};
use memflow::flow::{flow_report_with, measure_with, MeasureOptions, MeasureResult, SigmaMethod};
use memflow::oracle::{closed_form_trajectory, integrate_augmented, integrate_quadrature, integrate_tcl, GeneratorMatrix, TimeGrid};
use memflow::{bloch_of, trace_distance, EquationKind, MapParams, QubitState, StatePair};

use crate::args::{GridArgs, OutputArgs, ParamArgs};
use crate::table::{emit, fmt_num, Cell, Format, Table};

pub fn write(table: &Table, out: &OutputArgs) -> Result<()> {
    emit(&table.render(out.format)?, out.out.as_deref())
}

/// Stderr notice for parameters outside the regime the equation is built for.
pub fn regime_warning(kind: EquationKind, r: f64) {
    if kind == EquationKind::MemoryKernel && 4.0 * r > 1.0 + 1e-12 {
        eprintln!("regime: trigonometric (4R>1), positivity not guaranteed");
    }
}

pub fn xi(kind: EquationKind, r: f64, grid: &GridArgs) -> Result<Table> {
    if !(r.is_finite() && r >= 0.0) {
        bail!("--r must be finite and non-negative, got {r}");
    }
    regime_warning(kind, r);
    let prof = DecayProfile::new(kind, r);
    let mut t = Table::new(&["tau", "xi", "dxi"]);
    for tau in grid.taus()? {
        let (x, dx) = prof.eval(tau);
        t.push(vec![tau.into(), x.into(), dx.into()]);
    }
    Ok(t)
}

pub fn solve(pa: &ParamArgs, s0: &QubitState<f64>, grid: &GridArgs) -> Result<Table> {
    let p = pa.params()?;
    regime_warning(pa.kind, p.r());
    let src = SnapshotSource::new(pa.kind, &p);
    let mut t = Table::new(&["tau", "p_e", "re_b", "im_b", "valid"]);
    let mut flagged = false;
    for tau in grid.taus()? {
        let img = src.at(tau).apply(s0);
        if !img.is_valid && !flagged {
            eprintln!("warning: image leaves the state space at tau = {}", fmt_num(tau));
            flagged = true;
        }
        let b = img.state.coherence();
        t.push(vec![tau.into(), img.state.population_e().into(), b.re.into(), b.im.into(), img.is_valid.into()]);
    }
    Ok(t)
}

pub fn trace_distance_table(a: &QubitState<f64>, b: &QubitState<f64>) -> Result<Table> {
    let mut t = Table::new(&["distance"]);
    t.push(vec![trace_distance(a, b)?.into()]);
    Ok(t)
}

pub fn sigma(pa: &ParamArgs, pair: &StatePair<f64>, grid: &GridArgs, method: SigmaMethod) -> Result<Table> {
    let p = pa.params()?;
    regime_warning(pa.kind, p.r());
    let rep = flow_report_with(pa.kind, &p, pair, grid.tau_end, grid.points, method)?;
    eprintln!(
        "positive intervals: {}, total gain: {}",
        rep.positive_intervals.len(),
        fmt_num(rep.total_gain)
    );
    for iv in &rep.positive_intervals {
        eprintln!("  [{}, {}] gain {}", fmt_num(iv.start), fmt_num(iv.end), fmt_num(iv.gain));
    }
    let mut t = Table::new(&["tau", "distance", "sigma", "sigma_discrete"]);
    for i in 0..rep.grid.len() {
        t.push(vec![
            rep.grid[i].into(),
            rep.distance_path[i].into(),
            rep.sigma_path[i].into(),
            rep.sigma_discrete[i].into(),
        ]);
    }
    Ok(t)
}

pub const MEASURE_COLUMNS: [&str; 16] = [
    "kind", "r", "n", "value", "evaluations", "method", "tail", "report_gain", "first_x", "first_y", "first_z",
    "second_x", "second_y", "second_z", "classification", "in_validity_regime",
];

pub fn measure_row(kind: EquationKind, p: &MapParams<f64>, m: &MeasureResult<f64>, verdict: &str) -> Vec<Cell> {
    let a = bloch_of(&m.argmax_pair.first);
    let b = bloch_of(&m.argmax_pair.second);
    let tail = match m.tail {
        memflow::flow::TailCertificate::Monotone => "monotone".to_string(),
        memflow::flow::TailCertificate::Envelope { bound } => format!("envelope {}", fmt_num(bound)),
        memflow::flow::TailCertificate::Uncertified { bound } => format!("uncertified {}", fmt_num(bound)),
    };
    vec![
        kind.tag().into(),
        p.r().into(),
        p.n_occ().into(),
        m.value.into(),
        m.evaluations.into(),
        m.method.tag().into(),
        tail.into(),
        m.report_gain.into(),
        a[0].into(),
        a[1].into(),
        a[2].into(),
        b[0].into(),
        b[1].into(),
        b[2].into(),
        verdict.into(),
        p.in_validity_regime(kind).into(),
    ]
}

pub fn measure(pa: &ParamArgs, opts: &MeasureOptions<f64>) -> Result<Table> {
    let p = pa.params()?;
    regime_warning(pa.kind, p.r());
    let m = measure_with(pa.kind, &p, opts)?;
    let copts = ClassifyOptions {
        tau_end: opts.tau_end,
        measure_budget: opts.budget,
        seed: opts.seed,
        ..ClassifyOptions::default()
    };
    let report = classify(pa.kind, &p, &copts)?;
    let mut t = Table::new(&MEASURE_COLUMNS);
    t.push(measure_row(pa.kind, &p, &m, &report.verdict.to_string()));
    Ok(t)
}

pub fn tcl_rates(pa: &ParamArgs, grid: &GridArgs) -> Result<Table> {
    let p = pa.params()?;
    let src = SnapshotSource::new(pa.kind, &p);
    let mut t = Table::new(&["tau", "gamma1", "gamma2", "gamma3"]);
    for tau in grid.taus()? {
        match src.rates(tau) {
            Ok(g) => t.push(vec![tau.into(), g.gamma1.into(), g.gamma2.into(), g.gamma3.into()]),
            Err(e) => {
                eprintln!("warning: {e}; table stops here");
                break;
            }
        }
    }
    Ok(t)
}

pub fn choi(pa: &ParamArgs, grid: &GridArgs, tol: f64) -> Result<Table> {
    let p = pa.params()?;
    let src = SnapshotSource::new(pa.kind, &p);
    let mut t = Table::new(&["tau", "eig0", "eig1", "eig2", "eig3", "completely_positive"]);
    for tau in grid.taus()? {
        let e = choi_of(&src.at(tau)).eigenvalues();
        t.push(vec![tau.into(), e[0].into(), e[1].into(), e[2].into(), e[3].into(), (e[0] >= -tol).into()]);
    }
    Ok(t)
}

pub fn divisibility(pa: &ParamArgs, tau_end: f64, grid: usize, tol: f64) -> Result<Table> {
    let p = pa.params()?;
    let d = divisibility_scan(pa.kind, &p, tau_end, grid, tol)?;
    let mut t = Table::new(&["min_eigenvalue", "tau1", "tau2", "divisible", "evaluated", "skipped"]);
    t.push(vec![
        d.min_eigenvalue.into(),
        d.tau1.into(),
        d.tau2.into(),
        d.divisible.into(),
        d.evaluated.into(),
        d.skipped.into(),
    ]);
    Ok(t)
}

pub fn positivity(pa: &ParamArgs, grid: &GridArgs, samples: usize) -> Result<Table> {
    let p = pa.params()?;
    regime_warning(pa.kind, p.r());
    let probe = PositivityProbe::new(samples)?;
    let src = SnapshotSource::new(pa.kind, &p);
    let mut t = Table::new(&["tau", "max_norm", "positive", "witness_x", "witness_y", "witness_z"]);
    for tau in grid.taus()? {
        let v = probe.check(&src.at(tau));
        let w = bloch_of(&v.witness);
        t.push(vec![tau.into(), v.max_norm.into(), v.positive.into(), w[0].into(), w[1].into(), w[2].into()]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleMethod {
    Augmented,
    Quadrature,
    Tcl,
}

/// Agreement threshold reported by the oracle command.
pub const ORACLE_THRESHOLD: f64 = 1e-6;

#[allow(clippy::too_many_arguments)]
pub fn oracle(
    pa: &ParamArgs,
    s0: &QubitState<f64>,
    tau_end: f64,
    points: usize,
    tol: f64,
    method: OracleMethod,
    steps: usize,
) -> Result<Table> {
    if !(1e-12..=1e-4).contains(&tol) {
        bail!("--tol must lie in [1e-12, 1e-4], got {tol}");
    }
    let p = pa.params()?;
    let t_end = tau_end / p.gamma();
    let grid = TimeGrid::uniform(t_end, points)?;
    let traj = match method {
        OracleMethod::Augmented => integrate_augmented(pa.kind, &p, s0, &grid, tol)?,
        OracleMethod::Tcl => integrate_tcl(pa.kind, &p, s0, &grid, tol)?,
        OracleMethod::Quadrature => {
            if !steps.is_multiple_of(points - 1) {
                bail!("--steps must be a multiple of points - 1 = {}", points - 1);
            }
            integrate_quadrature(pa.kind, &GeneratorMatrix::thermal(&p), &p, s0, t_end, steps)?
        }
    };
    let exact = closed_form_trajectory(pa.kind, &p, s0, &grid);
    let dev = traj.max_deviation(&exact)?;
    let stride = (traj.len() - 1) / (points - 1);
    eprintln!(
        "steps: {}, rejected: {}, max|Δ| = {}",
        traj.stats.steps,
        traj.stats.rejected,
        fmt_num(dev)
    );
    eprintln!(
        "max|Δ| ≤ 1e−6: {}",
        if dev <= ORACLE_THRESHOLD { "PASS" } else { "FAIL" }
    );
    let mut t = Table::new(&["t", "p_e", "re_b", "im_b", "p_e_exact", "re_b_exact", "im_b_exact"]);
    for (i, e) in exact.states.iter().enumerate() {
        let s = &traj.states[i * stride];
        t.push(vec![
            exact.times[i].into(),
            s.population_e().into(),
            s.coherence().re.into(),
            s.coherence().im.into(),
            e.population_e().into(),
            e.coherence().re.into(),
            e.coherence().im.into(),
        ]);
    }
    Ok(t)
}

pub const CLASSIFY_COLUMNS: [&str; 15] = [
    "kind", "r", "n", "verdict", "in_validity_regime", "positive", "max_norm", "completely_positive",
    "min_choi_eigenvalue", "divisible", "min_intermediate_eigenvalue", "measure", "backflow", "gamma3_min",
    "gamma3_max",
];

pub fn classify_row(rep: &RegimeReport<f64>) -> Vec<Cell> {
    vec![
        rep.kind.tag().into(),
        rep.r.into(),
        rep.n_occ.into(),
        rep.verdict.to_string().into(),
        rep.in_validity_regime.into(),
        rep.positivity.positive.into(),
        rep.positivity.max_norm.into(),
        rep.cp.completely_positive.into(),
        rep.cp.min_eigenvalue.into(),
        rep.divisibility.divisible.into(),
        rep.divisibility.min_eigenvalue.into(),
        rep.measure.value.into(),
        rep.backflow.into(),
        rep.gamma3_min.into(),
        rep.gamma3_max.into(),
    ]
}

pub fn classify_cmd(pa: &ParamArgs, opts: &ClassifyOptions<f64>, format: Format) -> Result<Vec<u8>> {
    let p = pa.params()?;
    regime_warning(pa.kind, p.r());
    let rep = classify(pa.kind, &p, opts)?;
    match format {
        Format::Json => crate::table::render_json(&rep),
        Format::Csv => {
            let mut t = Table::new(&CLASSIFY_COLUMNS);
            t.push(classify_row(&rep));
            t.render(Format::Csv)
        }
    }
}
