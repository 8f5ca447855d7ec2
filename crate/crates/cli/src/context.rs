use crate::cache::Cache;
use crate::config::RunConfig;
use crate::error::CliResult;
use critline::forms::{build_from_prime_table, load_prime_table, CoeffTable, FormSpec};

/// A validated configuration with its form and the locked cache.
pub struct Ctx {
    pub cfg: RunConfig,
    pub form: FormSpec,
    pub cache: Cache,
}

impl Ctx {
    pub fn new(cfg: RunConfig) -> CliResult<Self> {
        cfg.validate()?;
        let form = match &cfg.table {
            Some(path) => load_prime_table(path)?,
            None => FormSpec::builtin(&cfg.form)?,
        };
        let cache = Cache::open(&cfg.out_dir.join("cache"))?;
        Ok(Self { cfg, form, cache })
    }

    /// Custom prime tables are rebuilt each run; built-in forms go through
    /// the cache.
    pub fn table(&self, n_max: usize) -> CliResult<CoeffTable> {
        if self.cfg.table.is_some() {
            Ok(build_from_prime_table(&self.form, n_max)?)
        } else {
            self.cache.table(&self.form, n_max)
        }
    }
}
