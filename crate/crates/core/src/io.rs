//! JSON schemas and file helpers shared with the command line front end.
//!
//! Matrices are `{"dim": d, "entries": [[re, im], ...]}`, row-major. Floats are
//! written with 17 significant digits so that every value round-trips, and the
//! same input always produces byte-identical output.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::decomp::{LebesgueDecomposition, Route};
use crate::error::{Error, Result};
use crate::gaussian::GaussianSpec;
use crate::linalg::{hermitize_with_tol, CMat, ComplexMatrix, PositiveOperator, C64};

/// Wire form of a square matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat) -> Self {
        assert!(m.is_square(), "matrix JSON holds square matrices");
        let dim = m.nrows();
        let entries = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
            .collect();
        Self { dim, entries }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let entries = self.entries.iter().map(|&[a, b]| C64::new(a, b)).collect();
        ComplexMatrix::new(self.dim, self.dim, entries)
    }

    /// Validates Hermiticity within `hermitian_tol` and positivity at `cutoff`.
    pub fn to_positive(&self, hermitian_tol: f64, cutoff: f64) -> Result<PositiveOperator> {
        let h = hermitize_with_tol(&self.to_matrix()?, hermitian_tol)?;
        PositiveOperator::with_cutoff(h, cutoff)
    }
}

/// Wire form of a [`LebesgueDecomposition`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub sigma_ac: MatrixJson,
    pub sigma_sing: MatrixJson,
    pub witness_r: MatrixJson,
    pub route: Route,
}

impl From<&LebesgueDecomposition> for DecompositionJson {
    fn from(d: &LebesgueDecomposition) -> Self {
        Self {
            sigma_ac: MatrixJson::from_matrix(d.sigma_ac.matrix()),
            sigma_sing: MatrixJson::from_matrix(d.sigma_sing.matrix()),
            witness_r: MatrixJson::from_matrix(d.witness_r.matrix()),
            route: d.route,
        }
    }
}

/// Wire form of a [`GaussianSpec`]: `{"dim": d, "mean": [...], "j": M}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianJson {
    pub dim: usize,
    pub mean: Vec<f64>,
    pub j: MatrixJson,
}

impl From<&GaussianSpec> for GaussianJson {
    fn from(g: &GaussianSpec) -> Self {
        Self { dim: g.dim(), mean: g.mean().to_vec(), j: MatrixJson::from_matrix(g.j()) }
    }
}

impl TryFrom<&GaussianJson> for GaussianSpec {
    type Error = Error;

    fn try_from(g: &GaussianJson) -> Result<Self> {
        if g.j.dim != g.dim {
            return Err(Error::DimensionMismatch { expected: g.dim, got: g.j.dim });
        }
        GaussianSpec::new(g.mean.clone(), g.j.to_matrix()?.into_matrix())
    }
}

/// Formatter writing every float as `d.dddddddddddddddde±x` (17 significant digits).
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedPrecision;

impl serde_json::ser::Formatter for FixedPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes with [`FixedPrecision`] floats.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedPrecision);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Two-column CSV `n,error`.
pub fn convergence_csv(n_values: &[u64], errors: &[f64]) -> String {
    let mut out = String::from("n,error\n");
    for (n, e) in n_values.iter().zip(errors) {
        out.push_str(&format!("{n},{e:.16e}\n"));
    }
    out
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes `contents` to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
