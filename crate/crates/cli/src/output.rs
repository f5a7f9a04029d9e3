use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::Failure;

/// Every JSON report: the library version, the resolved config, then the payload.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub version: &'static str,
    pub config: &'a RunConfig,
    #[serde(flatten)]
    pub body: T,
}

pub fn json<T: Serialize>(config: &RunConfig, body: T) -> Result<String, Failure> {
    let envelope = Envelope { version: qleb::VERSION, config, body };
    qleb::io::to_json_string(&envelope).map_err(Failure::from)
}

/// Writes atomically to `path`, or to stdout without one.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => qleb::io::write_atomic(p, text.as_bytes())
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `report.csv` becomes `report.qclt.csv` when several studies share one `--out`.
pub fn per_study_path(path: &Path, study: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{study}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{study}"),
    };
    path.with_file_name(name)
}
