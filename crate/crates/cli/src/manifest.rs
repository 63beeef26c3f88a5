//! Evaluation manifests: a CSV with `image,gt,fov` columns.
//!
//! `fov` may be left empty. Relative paths resolve against the manifest's
//! own directory so a dataset folder can be moved as a whole.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Read { path: PathBuf, source: csv::Error },
    #[error("manifest {path}, row {row}: {source}")]
    Row { path: PathBuf, row: usize, source: csv::Error },
    #[error("manifest {0} lists no images")]
    Empty(PathBuf),
    #[error("manifest {path} lists image id `{id}` twice")]
    Duplicate { path: PathBuf, id: String },
}

#[derive(Debug, Deserialize)]
struct Row {
    image: String,
    gt: String,
    #[serde(default)]
    fov: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    /// File stem of the image; used as the row key in reports.
    pub id: String,
    pub image: PathBuf,
    pub gt: PathBuf,
    pub fov: Option<PathBuf>,
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, ManifestError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|source| ManifestError::Read { path: path.into(), source })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut entries: Vec<ManifestEntry> = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        // row numbers count the header as row 1
        let row = row.map_err(|source| ManifestError::Row { path: path.into(), row: i + 2, source })?;
        let image = resolve(base, &row.image);
        let id = image.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| row.image.clone());
        if entries.iter().any(|e| e.id == id) {
            return Err(ManifestError::Duplicate { path: path.into(), id });
        }
        entries.push(ManifestEntry {
            id,
            image,
            gt: resolve(base, &row.gt),
            fov: row.fov.filter(|f| !f.is_empty()).map(|f| resolve(base, &f)),
        });
    }
    if entries.is_empty() {
        return Err(ManifestError::Empty(path.into()));
    }
    Ok(entries)
}
