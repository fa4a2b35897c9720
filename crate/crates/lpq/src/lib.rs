//! LP quantization search: a block-wise genetic algorithm over per-layer
//! LP formats. Fitness combines a global-local contrastive divergence over
//! pooled intermediate representations with a compression penalty,
//! `L_F = L_CO * L_CR^lambda` (lower is better).

mod candidate;
mod config;
mod export;
mod fitness;
mod search;
mod stats;

pub use candidate::{Candidate, Fitness, PopulationState, UpdateRecord};
pub use config::{CompressionCount, FitnessKind, SearchConfig, SfCenterMode};
pub use export::{delta_from_json_str, delta_to_json_string, history_to_csv};
pub use fitness::{compression_loss, FitnessContext};
pub use search::{
    crossover_mutate, diversity_select, init_population, run, sf_centers, update_population,
    SearchOutcome,
};
pub use stats::{contrastive_loss, kurtosis3, pooled_representation};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("calibration set is empty")]
    EmptyCalibration,
    #[error("kurtosis needs at least 2 elements, got {0}")]
    KurtosisInput(usize),
    #[error("no intermediate representations to pool")]
    EmptyRepresentation,
    #[error("pooled vectors have mismatched lengths or counts")]
    PooledShape,
    #[error("tau must be positive, got {0}")]
    TauNonPositive(f64),
    #[error("population size must be at least 2")]
    PopulationTooSmall,
    #[error(transparent)]
    Infer(#[from] lp_infer::InferError),
    #[error("malformed quantization document: {0}")]
    MalformedDelta(String),
}
