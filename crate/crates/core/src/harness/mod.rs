//! Seeded experiments over every algorithm combination, with statistics
//! and ranking reports.

pub mod combo;
pub mod experiment;
pub mod report;
pub mod stats;

pub use combo::{enumerate_combos, ComboFilter, ComboId};
pub use experiment::{
    default_max_range, run, run_experiment, run_experiment_detailed, ExperimentRun, ExperimentSeeds, OffsetRecord,
    RunConfig,
};
pub use report::{aggregate, rank, rank_and_report, ComboStats, RankKey};
pub use stats::{describe, Summary};
