//! Append-only certificate cache, persisted as a JSON array.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::certificate::{Certificate, Mode, Verdict};
use crate::error::{Error, Result};
use crate::segre::Problem;

#[derive(Debug, Default)]
pub struct CertStore {
    path: Option<PathBuf>,
    certs: Vec<Certificate>,
}

/// `stored` answers `query`: at most the query's dims, at least its `(k, p)`.
pub fn dominates(stored: &Problem, query: &Problem) -> bool {
    stored.n() == query.n()
        && stored
            .dims
            .dims()
            .iter()
            .zip(query.dims.dims())
            .all(|(s, q)| s <= q)
        && query.params_le(stored)
}

impl CertStore {
    pub fn in_memory() -> Self {
        CertStore::default()
    }

    /// Loads `path`, or starts empty if it does not exist yet.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let certs = match fs::read_to_string(&path) {
            Ok(text) => {
                let values: Vec<serde_json::Value> = serde_json::from_str(&text)?;
                values
                    .into_iter()
                    .map(|v| Certificate::from_json(&v.to_string()))
                    .collect::<Result<Vec<_>>>()?
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(CertStore {
            path: Some(path),
            certs,
        })
    }

    pub fn certificates(&self) -> &[Certificate] {
        &self.certs
    }

    pub fn len(&self) -> usize {
        self.certs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.certs.is_empty()
    }

    /// A stored PASS for `query` under `mode`: an exact match, or for
    /// not-weakly-defective bases any dominating problem.
    pub fn lookup(&self, query: &Problem, mode: Mode) -> Option<&Certificate> {
        self.certs.iter().find(|c| {
            c.verdict == Verdict::Pass
                && c.config.mode == mode
                && (c.problem == *query || c.basis.is_monotone() && dominates(&c.problem, query))
        })
    }

    pub fn insert(&mut self, cert: Certificate) -> Result<()> {
        self.certs.push(cert);
        self.save()
    }

    /// Writes to a temporary sibling, then renames over the target.
    fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let values: Vec<serde_json::Value> = self
            .certs
            .iter()
            .map(serde_json::to_value)
            .collect::<std::result::Result<_, _>>()?;
        let mut text = serde_json::to_string_pretty(&values)?;
        text.push('\n');
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let name = path
            .file_name()
            .ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?;
        let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(text.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }
}
