//! One pass over a corpus, fanned out across a worker pool.

use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use super::aggregate::{accumulate, merge, AggregateMap};
use super::corpus::{column_id, corpus_files, read_columns, Column, CorpusError};
use super::format::{CorpusIndex, IndexParams};
use super::scan::{scan_column, ScanOptions};
use crate::pattern::Hierarchy;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("corpus has no usable columns")]
    EmptyCorpus,
    #[error("invalid build options: {0}")]
    InvalidOptions(String),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub scan: ScanOptions,
    /// Worker threads; 0 lets the pool pick.
    pub workers: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { scan: ScanOptions::default(), workers: 0 }
    }
}

impl BuildOptions {
    fn validate(&self) -> Result<(), BuildError> {
        if self.scan.tau < 1 || self.scan.tau > u32::MAX as usize {
            return Err(BuildError::InvalidOptions("tau must be at least 1".into()));
        }
        if self.scan.cap < 1 {
            return Err(BuildError::InvalidOptions("cap must be at least 1".into()));
        }
        Ok(())
    }

    fn params(&self, hierarchy: &Hierarchy) -> IndexParams {
        IndexParams { tau: self.scan.tau as u32, cap: self.scan.cap, fingerprint: hierarchy.fingerprint() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub files: u64,
    pub unreadable_files: u64,
    pub columns: u64,
    /// Columns that produced at least one pattern.
    pub usable_columns: u64,
    pub patterns: u64,
}

impl BuildStats {
    fn combine(self, o: Self) -> Self {
        BuildStats {
            files: self.files + o.files,
            unreadable_files: self.unreadable_files + o.unreadable_files,
            columns: self.columns + o.columns,
            usable_columns: self.usable_columns + o.usable_columns,
            patterns: self.patterns + o.patterns,
        }
    }
}

type Partial = (AggregateMap, BuildStats);

fn scan_into(partial: &mut Partial, column: &Column, hierarchy: &Hierarchy, opts: &ScanOptions) {
    let imp = scan_column(&column.id, &column.values, hierarchy, opts);
    partial.1.columns += 1;
    if !imp.is_empty() {
        partial.1.usable_columns += 1;
        accumulate(&mut partial.0, &imp);
    }
}

fn reduce(a: Partial, b: Partial) -> Partial {
    (merge(a.0, b.0), a.1.combine(b.1))
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, BuildError> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers).build()?)
}

fn finish(partial: Partial, opts: &BuildOptions, hierarchy: &Hierarchy) -> Result<(CorpusIndex, BuildStats), BuildError> {
    let (map, mut stats) = partial;
    if stats.usable_columns == 0 {
        return Err(BuildError::EmptyCorpus);
    }
    stats.patterns = map.len() as u64;
    Ok((CorpusIndex::from_aggregates(opts.params(hierarchy), &map), stats))
}

/// Scans every column file under `dir` and aggregates the results.
pub fn build_index(dir: &Path, hierarchy: &Hierarchy, opts: &BuildOptions) -> Result<(CorpusIndex, BuildStats), BuildError> {
    opts.validate()?;
    let files = corpus_files(dir)?;
    let partial = pool(opts.workers)?.install(|| {
        files
            .par_iter()
            .map(|path| {
                let mut partial = Partial::default();
                partial.1.files = 1;
                match read_columns(path, &column_id(dir, path)) {
                    Ok(cols) => {
                        for col in &cols {
                            scan_into(&mut partial, col, hierarchy, &opts.scan);
                        }
                    }
                    Err(e) => {
                        log::warn!("skipping {}: {e}", path.display());
                        partial.1.unreadable_files = 1;
                    }
                }
                partial
            })
            .reduce(Partial::default, reduce)
    });
    finish(partial, opts, hierarchy)
}

/// Same as [`build_index`] over columns already in memory.
pub fn build_index_from_columns(
    columns: &[Column],
    hierarchy: &Hierarchy,
    opts: &BuildOptions,
) -> Result<(CorpusIndex, BuildStats), BuildError> {
    opts.validate()?;
    let partial = pool(opts.workers)?.install(|| {
        columns
            .par_iter()
            .fold(Partial::default, |mut p, col| {
                scan_into(&mut p, col, hierarchy, &opts.scan);
                p
            })
            .reduce(Partial::default, reduce)
    });
    finish(partial, opts, hierarchy)
}
