use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_theta, ParametricModel};
use crate::error::{Error, Result};
use crate::io::{read_json, MatrixJson};
use crate::linalg::{PositiveOperator, DEFAULT_HERMITIAN_TOL};

/// Trace tolerance for tabulated states.
const TRACE_TOL: f64 = 1e-10;
/// Two parameter vectors name the same grid point when they differ by at most this.
const GRID_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TabulatedPoint {
    pub theta: Vec<f64>,
    pub state: MatrixJson,
}

/// Wire form of a tabulated model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TabulatedJson {
    #[serde(default)]
    pub name: Option<String>,
    pub dim: usize,
    pub theta_dim: usize,
    pub theta0: Vec<f64>,
    pub points: Vec<TabulatedPoint>,
}

/// A model known only on a finite parameter grid. Evaluation off the grid fails
/// with [`Error::ThetaNotOnGrid`]; nothing is interpolated.
#[derive(Debug, Clone)]
pub struct TabulatedModel {
    name: String,
    dim: usize,
    theta0: Vec<f64>,
    points: Vec<(Vec<f64>, PositiveOperator)>,
}

impl TabulatedModel {
    pub fn from_json(table: TabulatedJson) -> Result<Self> {
        check_theta(&table.theta0, table.theta_dim)?;
        let mut points = Vec::with_capacity(table.points.len());
        for p in table.points {
            check_theta(&p.theta, table.theta_dim)?;
            if p.state.dim != table.dim {
                return Err(Error::DimensionMismatch { expected: table.dim, got: p.state.dim });
            }
            let state = p.state.to_positive(DEFAULT_HERMITIAN_TOL, crate::linalg::default_cutoff())?;
            if (state.trace() - 1.0).abs() > TRACE_TOL {
                return Err(Error::NotDensity(format!(
                    "tabulated state at {:?} has trace {}",
                    p.theta,
                    state.trace()
                )));
            }
            points.push((p.theta, state));
        }
        let model = Self {
            name: table.name.unwrap_or_else(|| "tabulated".into()),
            dim: table.dim,
            theta0: table.theta0,
            points,
        };
        model.lookup(&model.theta0)?;
        Ok(model)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(read_json(path)?)
    }

    fn lookup(&self, theta: &[f64]) -> Result<&PositiveOperator> {
        self.points
            .iter()
            .find(|(t, _)| t.iter().zip(theta).all(|(a, b)| (a - b).abs() <= GRID_MATCH_TOL))
            .map(|(_, s)| s)
            .ok_or_else(|| Error::ThetaNotOnGrid(theta.to_vec()))
    }
}

impl ParametricModel for TabulatedModel {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn theta_dim(&self) -> usize {
        self.theta0.len()
    }
    fn theta0(&self) -> Vec<f64> {
        self.theta0.clone()
    }
    fn state_at(&self, theta: &[f64]) -> Result<PositiveOperator> {
        check_theta(theta, self.theta_dim())?;
        self.lookup(theta).cloned()
    }
}
