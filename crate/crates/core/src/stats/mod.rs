//! Descendant fitness and the statistics relating it to structure.

mod bootstrap;
mod corpus;
mod hypothesis;
mod ks;
mod pearson;
mod report;
mod wilcoxon;

pub use bootstrap::{
    bootstrap_ci, quantile, BootstrapCi, Statistic, DEFAULT_LEVEL, DEFAULT_RESAMPLES,
};
pub use corpus::{descendant_counts, fitness, score_corpus, Corpus, CorpusRecord, LinkRow};
pub use hypothesis::{TestKind, TestReport};
pub use ks::{ks_one_sample, KsResult};
pub use pearson::pearson;
pub use report::{
    bin_table, corpus_report, linear_fit, Bin, CorpusReport, LinearFit, Outcome, ReportConfig,
    ResidualReport, DEFAULT_BINS,
};
pub use wilcoxon::{
    average_ranks, wilcoxon_signed_rank, wilcoxon_with, WilcoxonMethod, EXACT_MAX_N,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("unknown genome {0}")]
    UnknownGenome(String),
    #[error("all values are zero")]
    AllZeros,
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("need at least 2 values, got {0}")]
    TooSmall(usize),
    #[error("samples differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("values must be finite")]
    NonFinite,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
