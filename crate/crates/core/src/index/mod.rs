//! Offline corpus scan and the persisted pattern index.

mod aggregate;
mod build;
mod corpus;
mod format;
mod scan;

pub use aggregate::{accumulate, merge, AggregateMap, ImpuritySum, PatternAggregate, IMPURITY_SCALE};
pub use build::{build_index, build_index_from_columns, BuildError, BuildOptions, BuildStats};
pub use corpus::{column_id, corpus_files, read_columns, read_corpus, split_lines, Column, CorpusError};
pub use format::{CorpusIndex, IndexEntry, IndexFormatError, IndexParams, FORMAT_VERSION, MAGIC};
pub use scan::{column_impurity, scan_column, ColumnImpurities, Impurity, ScanOptions, DEFAULT_TAU};
