//! Parameter sweeps driven by a TOML or JSON configuration file.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use memflow::analysis::{classify, ClassifyOptions, RegimeReport};
use memflow::dynamics::SnapshotSource;
use memflow::{EquationKind, MapParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commands::{classify_row, measure_row, CLASSIFY_COLUMNS, MEASURE_COLUMNS};
use crate::table::{render_json, Cell, Format, Table};

pub const ANALYSES: [&str; 5] = ["measure", "rates", "choi", "divisibility", "positivity"];

/// Explicit values or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    List(Vec<f64>),
    Range {
        from: f64,
        to: f64,
        points: usize,
        #[serde(default)]
        log: bool,
    },
}

impl Values {
    pub fn expand(&self) -> Result<Vec<f64>> {
        match *self {
            Values::List(ref v) => Ok(v.clone()),
            Values::Range { from, to, points, log } => {
                if points == 0 {
                    bail!("range needs at least one point");
                }
                if points == 1 {
                    return Ok(vec![from]);
                }
                if log && !(from > 0.0 && to > 0.0) {
                    bail!("log range needs positive ends");
                }
                Ok((0..points)
                    .map(|i| {
                        let f = i as f64 / (points - 1) as f64;
                        if log {
                            (from.ln() + (to.ln() - from.ln()) * f).exp()
                        } else {
                            from + (to - from) * f
                        }
                    })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// `mem` and/or `post`.
    pub kinds: Vec<String>,
    /// Ratios R; excludes `gamma0`/`gamma`.
    #[serde(default)]
    pub r: Option<Values>,
    #[serde(default)]
    pub gamma0: Option<Values>,
    #[serde(default)]
    pub gamma: Option<f64>,
    pub n: Values,
    #[serde(default = "default_tau_end")]
    pub tau_end: f64,
    #[serde(default = "default_tau_points")]
    pub tau_points: usize,
    pub analyses: Vec<String>,
    #[serde(default = "default_format")]
    pub format: Format,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_div_grid")]
    pub divisibility_grid: usize,
    #[serde(default = "default_samples")]
    pub positivity_samples: usize,
}

fn default_tau_end() -> f64 {
    20.0
}
fn default_tau_points() -> usize {
    201
}
fn default_format() -> Format {
    Format::Json
}
fn default_budget() -> usize {
    1000
}
fn default_div_grid() -> usize {
    200
}
fn default_samples() -> usize {
    1000
}

/// One parameter point of the sweep, in configuration order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub index: usize,
    pub kind: EquationKind,
    pub params: MapParams<f64>,
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: SweepConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        } else {
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.analyses.is_empty() {
            bail!("config error: no analyses selected (choose from {})", ANALYSES.join(", "));
        }
        for a in &self.analyses {
            if !ANALYSES.contains(&a.as_str()) {
                bail!("config error: unknown analysis '{a}' (choose from {})", ANALYSES.join(", "));
            }
        }
        if self.kinds.is_empty() {
            bail!("config error: no equation kinds");
        }
        if !(self.tau_end.is_finite() && self.tau_end > 0.0) {
            bail!("config error: tau_end must be positive");
        }
        if self.tau_points < 2 {
            bail!("config error: tau_points must be at least 2");
        }
        match (&self.r, &self.gamma0, self.gamma) {
            (Some(_), None, None) | (None, Some(_), Some(_)) => {}
            _ => bail!("config error: give either r, or gamma0 together with gamma"),
        }
        for r in self.r.as_ref().map(Values::expand).transpose()?.unwrap_or_default() {
            if !(r.is_finite() && r > 0.0) {
                bail!("config error: every R must be positive, got {r}");
            }
        }
        for n in self.n.expand()? {
            if !(n.is_finite() && n >= 0.0) {
                bail!("config error: every N must be non-negative, got {n}");
            }
        }
        Ok(())
    }

    pub fn points(&self) -> Result<Vec<Point>> {
        let mut out = Vec::new();
        let ns = self.n.expand()?;
        for k in &self.kinds {
            let kind: EquationKind = k.parse()?;
            let firsts = match (&self.r, &self.gamma0) {
                (Some(r), _) => r.expand()?,
                (None, Some(g0)) => g0.expand()?,
                _ => unreachable!("validated"),
            };
            for &x in &firsts {
                for &n in &ns {
                    let params = match self.gamma {
                        Some(g) if self.r.is_none() => MapParams::new(x, g, n)?,
                        _ => MapParams::from_ratio(x, n)?,
                    };
                    out.push(Point { index: out.len(), kind, params });
                }
            }
        }
        Ok(out)
    }

    fn classify_options(&self) -> ClassifyOptions<f64> {
        ClassifyOptions {
            tau_end: self.tau_end,
            tau_points: self.tau_points,
            positivity_samples: self.positivity_samples,
            divisibility_grid: self.divisibility_grid,
            measure_budget: self.budget,
            seed: self.seed,
            ..ClassifyOptions::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub kind: EquationKind,
    pub r: f64,
    pub n: f64,
    pub gamma0: f64,
    pub gamma: f64,
    pub classification: Option<String>,
    pub report: Option<RegimeReport<f64>>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: SweepConfig,
    pub points: Vec<PointRecord>,
    pub failures: Vec<String>,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
}

struct PointOutcome {
    record: PointRecord,
    rates: Table,
}

fn rates_table(point: &Point, taus: &[f64], errors: &mut Vec<String>) -> Table {
    let src = SnapshotSource::new(point.kind, &point.params);
    let mut t = Table::new(&["index", "kind", "r", "n", "tau", "gamma1", "gamma2", "gamma3"]);
    for &tau in taus {
        match src.rates(tau) {
            Ok(g) => t.push(vec![
                point.index.into(),
                point.kind.tag().into(),
                point.params.r().into(),
                point.params.n_occ().into(),
                tau.into(),
                g.gamma1.into(),
                g.gamma2.into(),
                g.gamma3.into(),
            ]),
            Err(e) => {
                errors.push(format!("rates: {e}"));
                break;
            }
        }
    }
    t
}

fn run_point(cfg: &SweepConfig, point: &Point, taus: &[f64], want_rates: bool) -> PointOutcome {
    let mut errors = Vec::new();
    let report = match classify(point.kind, &point.params, &cfg.classify_options()) {
        Ok(r) => Some(r),
        Err(e) => {
            errors.push(format!("classify: {e}"));
            None
        }
    };
    let rates = if want_rates {
        rates_table(point, taus, &mut errors)
    } else {
        Table::default()
    };
    PointOutcome {
        record: PointRecord {
            index: point.index,
            kind: point.kind,
            r: point.params.r(),
            n: point.params.n_occ(),
            gamma0: point.params.gamma0(),
            gamma: point.params.gamma(),
            classification: report.as_ref().map(|r| r.verdict.to_string()),
            report,
            errors,
        },
        rates,
    }
}

fn analysis_table(name: &str, outcomes: &[PointOutcome]) -> Table {
    let mut t = match name {
        "measure" => Table::new(&MEASURE_COLUMNS),
        "choi" => Table::new(&["index", "kind", "r", "n", "completely_positive", "min_eigenvalue", "tau"]),
        "divisibility" => Table::new(&["index", "kind", "r", "n", "divisible", "min_eigenvalue", "tau1", "tau2"]),
        "positivity" => Table::new(&["index", "kind", "r", "n", "positive", "max_norm", "tau"]),
        "rates" => {
            let mut t = Table::new(&["index", "kind", "r", "n", "tau", "gamma1", "gamma2", "gamma3"]);
            for o in outcomes {
                t.extend(o.rates.clone());
            }
            return t;
        }
        _ => unreachable!("validated"),
    };
    for o in outcomes {
        let Some(rep) = &o.record.report else { continue };
        let head: Vec<Cell> = vec![
            o.record.index.into(),
            rep.kind.tag().into(),
            rep.r.into(),
            rep.n_occ.into(),
        ];
        let row = match name {
            "measure" => {
                let p = MapParams::new(o.record.gamma0, o.record.gamma, o.record.n).expect("validated");
                measure_row(rep.kind, &p, &rep.measure, &rep.verdict.to_string())
            }
            "choi" => [head, vec![rep.cp.completely_positive.into(), rep.cp.min_eigenvalue.into(), rep.cp.tau.into()]].concat(),
            "divisibility" => [
                head,
                vec![
                    rep.divisibility.divisible.into(),
                    rep.divisibility.min_eigenvalue.into(),
                    rep.divisibility.tau1.into(),
                    rep.divisibility.tau2.into(),
                ],
            ]
            .concat(),
            "positivity" => [
                head,
                vec![rep.positivity.positive.into(), rep.positivity.max_norm.into(), rep.positivity.tau.into()],
            ]
            .concat(),
            _ => unreachable!(),
        };
        t.push(row);
    }
    t
}

/// Runs the sweep, writes one file per analysis plus `classification` and
/// `run_record.json` into `out_dir`, and returns the record.
pub fn run(cfg: SweepConfig, out_dir: &Path) -> Result<RunRecord> {
    let start = Instant::now();
    cfg.validate()?;
    let points = cfg.points()?;
    let taus = memflow::analysis::tau_grid(cfg.tau_end, cfg.tau_points)?;
    let wanted: BTreeSet<&str> = cfg.analyses.iter().map(String::as_str).collect();
    let outcomes: Vec<PointOutcome> = points
        .par_iter()
        .map(|p| run_point(&cfg, p, &taus, wanted.contains("rates")))
        .collect();

    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut outputs = Vec::new();
    let mut write = |name: &str, table: &Table| -> Result<()> {
        let file: PathBuf = out_dir.join(format!("{name}.{}", cfg.format.extension()));
        fs::write(&file, table.render(cfg.format)?).with_context(|| format!("writing {}", file.display()))?;
        outputs.push(file.display().to_string());
        Ok(())
    };
    for name in ANALYSES.iter().filter(|a| wanted.contains(*a)) {
        write(name, &analysis_table(name, &outcomes))?;
    }
    let mut classes = Table::new(&CLASSIFY_COLUMNS);
    for o in &outcomes {
        if let Some(rep) = &o.record.report {
            classes.push(classify_row(rep));
        }
    }
    write("classification", &classes)?;

    let failures = outcomes
        .iter()
        .flat_map(|o| o.record.errors.iter().map(move |e| format!("point {}: {e}", o.record.index)))
        .collect();
    let record_path = out_dir.join("run_record.json");
    outputs.push(record_path.display().to_string());
    let record = RunRecord {
        tool: "memflow",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        points: outcomes.into_iter().map(|o| o.record).collect(),
        failures,
        outputs,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    fs::write(&record_path, render_json(&record)?).with_context(|| format!("writing {}", record_path.display()))?;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SweepConfig {
        toml::from_str(
            r#"
            kinds = ["mem"]
            r = [0.1]
            n = [1.0]
            analyses = ["measure"]
            "#,
        )
        .unwrap()
    }

    #[test]
    fn empty_analyses_is_a_config_error() {
        let mut c = base();
        c.analyses.clear();
        assert!(c.validate().unwrap_err().to_string().contains("no analyses"));
    }

    #[test]
    fn rejects_mixed_parameter_styles() {
        let mut c = base();
        c.gamma0 = Some(Values::List(vec![0.1]));
        c.gamma = Some(1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn ranges_expand() {
        let v = Values::Range { from: 0.01, to: 1.0, points: 3, log: true }.expand().unwrap();
        assert!((v[1] - 0.1).abs() < 1e-15);
        let c: SweepConfig = toml::from_str(
            r#"
            kinds = ["mem", "post"]
            r = { from = 0.05, to = 0.2, points = 4 }
            n = [0.5, 1.0]
            analyses = ["rates"]
            "#,
        )
        .unwrap();
        assert_eq!(c.points().unwrap().len(), 16);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let res: Result<SweepConfig, _> = toml::from_str("kinds = [\"mem\"]\nr = [0.1]\nn = [1]\nanalyses = [\"measure\"]\ncolour = 1\n");
        assert!(res.is_err());
    }
}
