//! Run orchestration: episodes, training, evaluation, metrics and outputs.

pub mod episode;
pub mod metrics;
pub mod output;
pub mod runs;
pub mod train;

pub use episode::{run_episode, Environment, Operator, SlotSnapshot};
pub use metrics::{compute_cdf, performance_gains, CostTable, EpisodeSummary, PgSamples};
pub use train::{evaluate, train, Evaluated, TrainRun};
pub use runs::{eval_run, train_run, EvalTarget, RunReport};
