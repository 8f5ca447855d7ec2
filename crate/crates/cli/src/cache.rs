//! Coefficient cache directory, owned by one process through a lock file.

use crate::error::{CliError, CliResult};
use critline::forms::{build_coeff_table, read_coeff_cache, write_coeff_cache, CoeffTable, FormSpec};
use std::fs::{File, OpenOptions};
use std::io::{BufReader, BufWriter, ErrorKind, Write};
use std::path::{Path, PathBuf};

/// Environment variable selecting the cache directory.
pub const CACHE_ENV: &str = "CRITLINE_CACHE_DIR";
pub const LOCK_FILE: &str = "critline.lock";

/// Holds the lock for its lifetime.
#[derive(Debug)]
pub struct Cache {
    dir: PathBuf,
    lock: PathBuf,
}

impl Cache {
    /// Opens `$CRITLINE_CACHE_DIR`, or `fallback` when it is unset.
    pub fn open(fallback: &Path) -> CliResult<Self> {
        let dir = std::env::var_os(CACHE_ENV).map_or_else(|| fallback.to_path_buf(), PathBuf::from);
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::Cache(format!("cannot create {}: {e}", dir.display())))?;
        let lock = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
            }
            Err(e) if e.kind() == ErrorKind::AlreadyExists => {
                return Err(CliError::Cache(format!(
                    "{} is locked by another process; remove {} if it is stale",
                    dir.display(),
                    lock.display()
                )));
            }
            Err(e) => return Err(CliError::Cache(format!("cannot lock {}: {e}", dir.display()))),
        }
        Ok(Self { dir, lock })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn table_path(&self, form: &FormSpec, n_max: usize) -> PathBuf {
        self.dir.join(format!("{}-n{n_max}.csv", form.id))
    }

    /// Reads the cached table for exactly `n_max`, or builds and stores it.
    pub fn table(&self, form: &FormSpec, n_max: usize) -> CliResult<CoeffTable> {
        let path = self.table_path(form, n_max);
        if path.exists() {
            let f = File::open(&path)?;
            return Ok(read_coeff_cache(form, BufReader::new(f))?);
        }
        let table = build_coeff_table(form, n_max)?;
        let tmp = path.with_extension("csv.tmp");
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            write_coeff_cache(&table, &mut w)?;
            w.flush()?;
        }
        std::fs::rename(&tmp, &path)?;
        Ok(table)
    }
}

impl Drop for Cache {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.lock);
    }
}
