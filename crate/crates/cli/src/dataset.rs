//! Writing synthetic datasets to disk in the layout `eval` reads.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use discseg_core::phantom::{phantom_suite, PhantomConfig};

use crate::io::{save_gray, save_mask};

/// Write `count` phantoms under `dir`:
///
/// ```text
/// dir/images/phantom_000.png   dir/gt/phantom_000.png   dir/fov/phantom_000.png
/// dir/manifest.csv             (image,gt,fov with relative paths)
/// ```
///
/// Returns the manifest path.
pub fn write_phantom_set(dir: &Path, count: usize, seed: u64, cfg: &PhantomConfig) -> Result<PathBuf> {
    for sub in ["images", "gt", "fov"] {
        fs::create_dir_all(dir.join(sub)).with_context(|| format!("creating {}", dir.join(sub).display()))?;
    }
    let mut manifest = csv::Writer::from_path(dir.join("manifest.csv")).context("creating manifest.csv")?;
    manifest.write_record(["image", "gt", "fov"])?;
    for (i, p) in phantom_suite(cfg, count, seed)?.into_iter().enumerate() {
        let name = format!("phantom_{i:03}.png");
        let rel = |sub: &str| format!("{sub}/{name}");
        save_gray(&p.image, &dir.join(rel("images")))?;
        save_mask(&p.disk, &dir.join(rel("gt")))?;
        save_mask(&p.fov, &dir.join(rel("fov")))?;
        manifest.write_record([rel("images"), rel("gt"), rel("fov")])?;
    }
    manifest.flush()?;
    Ok(dir.join("manifest.csv"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::read_manifest;

    #[test]
    fn layout_matches_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PhantomConfig { width: 200, height: 210, ..PhantomConfig::default() };
        let path = write_phantom_set(dir.path(), 3, 5, &cfg).unwrap();
        let entries = read_manifest(&path).unwrap();
        assert_eq!(entries.len(), 3);
        for e in &entries {
            assert!(e.image.exists() && e.gt.exists());
            assert!(e.fov.as_ref().unwrap().exists());
        }
        assert_eq!(entries[2].id, "phantom_002");
    }
}
