//! The fully resolved configuration embedded in every report.

use std::path::Path;

use qleb::gaussian::QcfQuery;
use qleb::C64;
use serde::Serialize;

use crate::args::{CheckKind, Format, Study};
use crate::Failure;

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub cutoff: f64,
    pub format: Format,
    pub out: Option<String>,
    #[serde(flatten)]
    pub detail: Detail,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Detail {
    Pair {
        rho: String,
        sigma: String,
        hermitian_tol: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        route_tol: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        check: Option<CheckKind>,
    },
    Qlan {
        model: String,
        studies: Vec<Study>,
        n_grid: Vec<u64>,
        h: Vec<f64>,
        /// Query grid: queries, each a list of vectors of `[re, im]` pairs.
        queries: Vec<Vec<Vec<[f64; 2]>>>,
        radii: Vec<f64>,
        directions: usize,
    },
}

pub fn display(path: &Path) -> String {
    path.display().to_string()
}

pub fn require_positive(name: &str, value: f64) -> Result<(), Failure> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Failure::input(format!("{name} must be positive, got {value}")))
    }
}

/// Parses one query: vectors separated by `;`, components by `,`, each
/// component `re` or `re:im`. A value starting with `[` is read as JSON,
/// a list of vectors of `[re, im]` pairs.
pub fn parse_query(text: &str) -> Result<Vec<Vec<C64>>, Failure> {
    let bad = |why: String| Failure::input(format!("invalid --xi {text:?}: {why}"));
    if text.trim_start().starts_with('[') {
        let raw: Vec<Vec<[f64; 2]>> = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        return Ok(raw.into_iter().map(|v| v.into_iter().map(|[a, b]| C64::new(a, b)).collect()).collect());
    }
    text.split(';')
        .map(|vector| {
            vector
                .split(',')
                .map(|component| {
                    let component = component.trim();
                    let (re, im) = component.split_once(':').unwrap_or((component, "0"));
                    let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
                    Ok(C64::new(parse(re)?, parse(im)?))
                })
                .collect()
        })
        .collect()
}

pub fn query_to_wire(q: &QcfQuery) -> Vec<Vec<[f64; 2]>> {
    q.xis().iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect()
}
