//! Shared fixtures for the criterion benches.

use korder::{ProblemParams, QuerySequence};

/// `(n, k)` pairs the benches sweep, all within the scene enumeration cap.
pub const GRID: &[(u32, u32)] = &[(10, 3), (14, 3), (16, 4)];

pub fn params(n: u32, k: u32) -> ProblemParams {
    ProblemParams::new(n, k).expect("bench grid holds valid parameters")
}

pub fn lex_sequence(n: u32, k: u32) -> QuerySequence {
    korder::generate_sequence(&korder::GeneratorSpec::Lex, params(n, k))
        .expect("lex generation cannot fail inside the grid")
}
