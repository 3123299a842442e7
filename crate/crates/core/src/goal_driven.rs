//! Greedy sequence builders: greedy scene elimination (GSE) and minimally
//! intersecting subsets (MIS).
//!
//! Candidates are indexed by lexicographic rank, so scanning them in index
//! order implements the lexicographic tie-break.

use crate::combinatorics::{colex_rank, for_each_k_subset_of};
use crate::error::Result;
use crate::scene::{
    query_masks_lex, scene_count, scene_masks, ProblemParams, Query, QuerySequence,
    DEFAULT_SCENE_CAP,
};
use crate::scoring::DiscoveryProfile;

/// Which of several equally scored candidates wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LexFirst,
    LexLast,
}

/// GSE normally takes the candidate discovering the most scenes; the reversed
/// mode takes the fewest and reproduces the worst-case behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GreedyDirection {
    #[default]
    MostScenes,
    FewestScenes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GseOptions {
    pub tie_break: TieBreak,
    pub direction: GreedyDirection,
    pub scene_cap: u32,
}

impl Default for GseOptions {
    fn default() -> Self {
        Self {
            tie_break: TieBreak::default(),
            direction: GreedyDirection::default(),
            scene_cap: DEFAULT_SCENE_CAP,
        }
    }
}

/// Heuristic value `delta` of a candidate query; larger is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidateScore {
    pub query: Query,
    pub value: i64,
}

/// Index of the best unused candidate. `better(a, b)` is true when `a` beats
/// `b` strictly; ties fall to the tie-break.
fn select<T: Copy>(
    values: &[T],
    used: &[bool],
    tie_break: TieBreak,
    better: impl Fn(T, T) -> bool,
) -> usize {
    let mut best: Option<usize> = None;
    let mut consider = |i: usize| {
        if used[i] {
            return;
        }
        match best {
            Some(b) if !better(values[i], values[b]) => {}
            _ => best = Some(i),
        }
    };
    match tie_break {
        TieBreak::LexFirst => (0..values.len()).for_each(&mut consider),
        TieBreak::LexLast => (0..values.len()).rev().for_each(&mut consider),
    }
    best.expect("at least one unused candidate")
}

pub fn gse(params: ProblemParams) -> Result<(QuerySequence, DiscoveryProfile)> {
    gse_with(params, GseOptions::default())
}

/// Greedy scene elimination.
///
/// `D` for every candidate is kept current: when a query removes its live
/// supersets, each removed scene decrements the counter of every k-subset it
/// contains. Across the whole run that touches `N * 2^(n-k)` counters.
pub fn gse_with(
    params: ProblemParams,
    opts: GseOptions,
) -> Result<(QuerySequence, DiscoveryProfile)> {
    params.require_scene_cap(opts.scene_cap)?;
    let k = params.k();
    let queries = query_masks_lex(params);
    let count = queries.len();
    let mut lex_index = vec![0u32; count];
    for (i, &q) in queries.iter().enumerate() {
        lex_index[colex_rank(q) as usize] = i as u32;
    }

    let mut live = scene_masks(params, opts.scene_cap)?;
    let mut discover = vec![1u64 << (params.n() - k); count];
    let mut used = vec![false; count];
    let mut order = Vec::with_capacity(count);
    let mut profile = Vec::with_capacity(count);

    for _ in 0..count {
        let pick = match opts.direction {
            GreedyDirection::MostScenes => select(&discover, &used, opts.tie_break, |a, b| a > b),
            GreedyDirection::FewestScenes => select(&discover, &used, opts.tie_break, |a, b| a < b),
        };
        used[pick] = true;
        let q = queries[pick];
        profile.push(discover[pick]);
        order.push(Query::from_mask_unchecked(q));

        let mut j = 0;
        while j < live.len() {
            let s = live[j];
            if s & q == q {
                live.swap_remove(j);
                for_each_k_subset_of(s, k, |sub| {
                    discover[lex_index[colex_rank(sub) as usize] as usize] -= 1;
                });
            } else {
                j += 1;
            }
        }
        debug_assert_eq!(discover[pick], 0);
    }
    debug_assert!(live.is_empty());
    debug_assert_eq!(profile.iter().sum::<u64>(), scene_count(params)?);

    Ok((
        QuerySequence::from_parts_unchecked(params, order),
        DiscoveryProfile::new(profile),
    ))
}

/// `-sum_h (2^|q ∩ h| - 1)`: the overlap penalty against the history,
/// ignoring the empty intersection.
pub fn delta_mis(q: Query, history: &[Query]) -> i64 {
    -history
        .iter()
        .map(|h| (1i64 << (q.mask() & h.mask()).count_ones()) - 1)
        .sum::<i64>()
}

/// Scenes discoverable by both queries: `2^(n - |q1 ∪ q2|)`, which equals
/// `2^(n - 2k + |q1 ∩ q2|)`.
pub fn intersection_scene_count(q1: Query, q2: Query, params: ProblemParams) -> Result<u64> {
    params.require_mask_width()?;
    params.check_query(q1)?;
    params.check_query(q2)?;
    Ok(1u64 << (params.n() - (q1.mask() | q2.mask()).count_ones()))
}

pub fn mis(params: ProblemParams) -> Result<QuerySequence> {
    mis_with(params, TieBreak::default())
}

/// Minimally intersecting subsets. Each candidate keeps a running penalty,
/// updated with the newest history element only.
pub fn mis_with(params: ProblemParams, tie_break: TieBreak) -> Result<QuerySequence> {
    params.require_mask_width()?;
    let queries = query_masks_lex(params);
    let count = queries.len();
    let mut penalty = vec![0u64; count];
    let mut used = vec![false; count];
    let mut order = Vec::with_capacity(count);
    for _ in 0..count {
        let pick = select(&penalty, &used, tie_break, |a, b| a < b);
        used[pick] = true;
        let q = queries[pick];
        order.push(Query::from_mask_unchecked(q));
        for (c, pen) in queries.iter().zip(penalty.iter_mut()) {
            *pen += (1u64 << (c & q).count_ones()) - 1;
        }
    }
    Ok(QuerySequence::from_parts_unchecked(params, order))
}

/// Scores every unused candidate under the MIS heuristic, for inspection.
pub fn mis_candidates(params: ProblemParams, history: &[Query]) -> Result<Vec<CandidateScore>> {
    params.require_mask_width()?;
    Ok(query_masks_lex(params)
        .into_iter()
        .map(Query::from_mask_unchecked)
        .filter(|q| !history.contains(q))
        .map(|query| CandidateScore {
            query,
            value: delta_mis(query, history),
        })
        .collect())
}
