use std::io::{BufWriter, Write};
use std::path::{Component, Path, PathBuf};

use spanalign::{Error, Result};

/// The only directory a run writes into. Files appear atomically: each is
/// written to a temporary file beside its destination and renamed.
#[derive(Debug)]
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(OutDir { root: root.to_path_buf() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Resolves a file name, refusing anything that would leave the directory.
    pub fn path(&self, name: &str) -> Result<PathBuf> {
        let rel = Path::new(name);
        let plain = rel.components().all(|c| matches!(c, Component::Normal(_)));
        if name.is_empty() || !plain {
            return Err(Error::Config(format!(
                "output name {name:?} must be a relative path inside the output directory"
            )));
        }
        Ok(self.root.join(rel))
    }

    pub fn write<F>(&self, name: &str, fill: F) -> Result<PathBuf>
    where
        F: FnOnce(&mut dyn Write) -> Result<()>,
    {
        let dest = self.path(name)?;
        let parent = dest.parent().unwrap_or(&self.root).to_path_buf();
        std::fs::create_dir_all(&parent).map_err(|e| Error::io(&parent, e))?;
        let tmp = tempfile::NamedTempFile::new_in(&parent).map_err(|e| Error::io(&parent, e))?;
        let mut w = BufWriter::new(tmp);
        fill(&mut w)?;
        let tmp = w.into_inner().map_err(|e| Error::io(&dest, e.into_error()))?;
        tmp.persist(&dest).map_err(|e| Error::io(&dest, e.error))?;
        log::info!("wrote {}", dest.display());
        Ok(dest)
    }
}

/// Adapts an `io::Result` from a writer to a located error.
pub fn io_at<T>(path: &str, r: std::io::Result<T>) -> Result<T> {
    r.map_err(|e| Error::io(path, e))
}
