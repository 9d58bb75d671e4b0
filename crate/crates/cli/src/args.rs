use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use memflow::{EquationKind, MapParams, QubitState};

use crate::table::Format;

fn parse_kind(s: &str) -> Result<EquationKind, String> {
    s.parse().map_err(|e: memflow::Error| e.to_string())
}

/// Model parameters, either as `(R, N)` or as `(gamma0, gamma, N)`.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Equation: `mem` (memory kernel) or `post` (post-Markovian).
    #[arg(long, value_parser = parse_kind)]
    pub kind: EquationKind,
    /// Dimensionless ratio R = gamma0 (2N + 1) / gamma.
    #[arg(long)]
    pub r: Option<f64>,
    /// Dissipation constant; requires --gamma, excludes --r.
    #[arg(long)]
    pub gamma0: Option<f64>,
    /// Kernel decay rate, the unit of time; requires --gamma0, excludes --r.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Mean reservoir occupation.
    #[arg(long, default_value_t = 0.0)]
    pub n: f64,
}

impl ParamArgs {
    pub fn params(&self) -> Result<MapParams<f64>> {
        build_params(self.r, self.gamma0, self.gamma, self.n)
    }
}

pub fn build_params(r: Option<f64>, gamma0: Option<f64>, gamma: Option<f64>, n: f64) -> Result<MapParams<f64>> {
    Ok(match (r, gamma0, gamma) {
        (Some(r), None, None) => MapParams::from_ratio(r, n)?,
        (None, Some(g0), Some(g)) => MapParams::new(g0, g, n)?,
        (Some(_), _, _) => bail!("give either --r or --gamma0/--gamma, not both"),
        (None, Some(_), None) | (None, None, Some(_)) => bail!("--gamma0 and --gamma must be given together"),
        (None, None, None) => bail!("missing parameters: give --r, or --gamma0 and --gamma"),
    })
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// End of the dimensionless time grid.
    #[arg(long, default_value_t = 20.0)]
    pub tau_end: f64,
    /// Number of grid points, including both ends.
    #[arg(long, default_value_t = 201)]
    pub points: usize,
}

impl GridArgs {
    pub fn taus(&self) -> Result<Vec<f64>> {
        if self.points == 1 {
            return Ok(vec![0.0]);
        }
        Ok(memflow::analysis::tau_grid(self.tau_end, self.points)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Bloch vector `x,y,z` with norm at most one.
pub fn parse_bloch(s: &str) -> Result<QubitState<f64>, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad component '{p}': {e}")))
        .collect::<Result<_, _>>()?;
    let v: [f64; 3] = parts
        .try_into()
        .map_err(|_| "expected three comma-separated components x,y,z".to_string())?;
    QubitState::from_bloch(v).map_err(|e| e.to_string())
}
