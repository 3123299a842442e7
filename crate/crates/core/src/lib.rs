//! Orderings of the k-subsets of `n` spikes that minimise the expected number
//! of queries needed to hit a subset made only of true stars.
//!
//! The crate covers exact scoring, the random-ordering baselines, stateless
//! generators, greedy builders and exhaustive optimum search for small `n`.

pub mod combinatorics;
pub mod error;
pub mod exact_search;
pub mod format;
pub mod generators;
pub mod goal_driven;
pub mod scene;
pub mod scoring;

pub use combinatorics::{binomial, digit_reversed_count, rank, unrank, ReferenceOrder};
pub use error::{Error, Result};
pub use exact_search::{branch_and_prune, brute_force, SearchOptions, SearchResult};
pub use format::{parse_sequence, sequence_to_string, write_sequence};
pub use generators::{generate, generate_sequence, GeneratorSpec, PatternReference};
pub use goal_driven::{gse, mis};
pub use scene::{
    discovers, enumerate_scenes, relabel, scene_count, ProblemParams, Query, QuerySequence, Scene,
    SpikeRelabeling,
};
pub use scoring::{
    check_monotonicity, expected_random_score, score_by_elimination, score_by_scenes, sigma,
    DiscoveryProfile, ExactScore,
};
