//! Exhaustive optimum finders for small `(n, k)`.
//!
//! Both searches index scenes by position in the ascending scene list and hold
//! the live scene set in one `u64`, so `n <= 6` (at most 63 scenes) is a hard
//! limit of this module. Queries are indexed by lexicographic rank.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::goal_driven::gse;
use crate::scene::{low_bits, query_masks_lex, scene_masks, ProblemParams, Query, QuerySequence};
use crate::scoring::{score_by_elimination, ExactScore};

/// Largest `N` the brute-force enumeration accepts (`10! ≈ 3.6e6` leaves).
pub const BRUTE_FORCE_MAX_QUERIES: u64 = 10;

/// Largest `n` the scene bitset can hold.
pub const EXACT_MAX_N: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// P1: prune when the lower bound reaches the incumbent.
    pub score_bound: bool,
    /// P2: children may not discover more scenes than their parent.
    pub monotonicity: bool,
    /// P3: new spike labels enter in ascending order.
    pub canonical_labels: bool,
    /// P4: close a node exactly once no candidate discovers more than one scene.
    pub singleton_tail: bool,
    /// Start from the GSE score instead of an infinite incumbent.
    pub seed_incumbent: bool,
    /// Keep searching ties and count the optimal leaves reached.
    pub count_optima: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            score_bound: true,
            monotonicity: true,
            canonical_labels: true,
            singleton_tail: true,
            seed_incumbent: true,
            count_optima: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct PruneCounts {
    pub p1: u64,
    pub p2: u64,
    pub p3: u64,
    pub p4: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub best: QuerySequence,
    pub score: ExactScore,
    pub nodes_expanded: u64,
    pub pruned: PruneCounts,
    /// Number of optimal leaves (brute force: optimal sequences). Only
    /// populated by brute force and by `count_optima` searches.
    pub optimal_count: Option<u128>,
    /// Brute force only: the worst sequence and how many share its score.
    pub worst: Option<(QuerySequence, ExactScore, u128)>,
}

/// JSON-facing view of a [`SearchResult`].
#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub n: u32,
    pub k: u32,
    #[serde(rename = "optimal_U")]
    pub optimal_u: u64,
    pub scene_count: u64,
    pub score: f64,
    pub sequence: Vec<Vec<u32>>,
    pub nodes_expanded: u64,
    pub pruned: PruneCounts,
}

impl SearchResult {
    pub fn report(&self) -> SearchReport {
        let p = self.best.params();
        SearchReport {
            n: p.n(),
            k: p.k(),
            optimal_u: self.score.numerator,
            scene_count: self.score.denominator,
            score: self.score.value(),
            sequence: self.best.iter().map(|q| q.elements()).collect(),
            nodes_expanded: self.nodes_expanded,
            pruned: self.pruned,
        }
    }
}

/// Summary of a search tree node sufficient for bounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchNode {
    /// Queries placed so far (`i`).
    pub position: u64,
    /// `sum_{j <= i} j * D(q_j)`.
    pub partial_u: u64,
    /// Scenes not yet discovered (`R`).
    pub remaining: u64,
    /// Most scenes any later query may discover.
    pub cap: u64,
}

/// Partial `U` plus the cheapest conceivable tail: `min(cap, R)` scenes at
/// each following position until none remain. Infeasible nodes (`cap = 0`
/// with scenes left) bound to `u64::MAX`.
pub fn lower_bound(node: &SearchNode) -> u64 {
    let SearchNode {
        position: i,
        partial_u,
        remaining: r,
        cap: c,
    } = *node;
    if r == 0 {
        return partial_u;
    }
    if c == 0 {
        return u64::MAX;
    }
    let full = r / c;
    let rest = r % c;
    // positions i+1 ..= i+full take c each, position i+full+1 takes the rest
    let full_positions = full * i + full * (full + 1) / 2;
    partial_u + c * full_positions + (i + full + 1) * rest
}

struct Model {
    params: ProblemParams,
    queries: Vec<u64>,
    discovers: Vec<u64>,
    scenes: u64,
}

impl Model {
    fn new(params: ProblemParams) -> Result<Self> {
        if params.n() > EXACT_MAX_N {
            return Err(Error::Capacity(format!(
                "exact search supports n <= {EXACT_MAX_N}, got {params}"
            )));
        }
        let scenes = scene_masks(params, EXACT_MAX_N)?;
        let queries = query_masks_lex(params);
        let discovers = queries
            .iter()
            .map(|&q| {
                scenes
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| s & q == q)
                    .fold(0u64, |acc, (i, _)| acc | 1 << i)
            })
            .collect();
        Ok(Self {
            params,
            queries,
            discovers,
            scenes: scenes.len() as u64,
        })
    }

    fn all_live(&self) -> u64 {
        low_bits(self.scenes as u32)
    }

    fn sequence(&self, path: &[usize]) -> QuerySequence {
        QuerySequence::from_parts_unchecked(
            self.params,
            path.iter()
                .map(|&i| Query::from_mask_unchecked(self.queries[i]))
                .collect(),
        )
    }

    fn score(&self, u: u64) -> ExactScore {
        ExactScore {
            numerator: u,
            denominator: self.scenes,
        }
    }

    /// `path` followed by the unused queries in ascending rank.
    fn complete(&self, path: &[usize], used: u64) -> Vec<usize> {
        let mut out = path.to_vec();
        out.extend((0..self.queries.len()).filter(|i| used >> i & 1 == 0));
        out
    }
}

fn factorial(m: u64) -> u128 {
    (1..=m as u128).product()
}

/// Totals over every complete sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct EnumerationStats {
    pub total_u: u128,
    pub sequence_count: u128,
    pub scene_count: u64,
}

struct Enumerator<'a> {
    model: &'a Model,
    path: Vec<usize>,
    nodes: u64,
    total_u: u128,
    sequences: u128,
    min: Option<(u64, Vec<usize>, u128)>,
    max: Option<(u64, Vec<usize>, u128)>,
}

impl Enumerator<'_> {
    fn run(&mut self, live: u64, used: u64, u: u64) {
        self.nodes += 1;
        let depth = self.path.len() as u64;
        if live == 0 {
            // every ordering of the unused queries adds nothing to U
            let ways = factorial(self.model.queries.len() as u64 - depth);
            self.total_u += u as u128 * ways;
            self.sequences += ways;
            let model = self.model;
            let path = &self.path;
            let record = |slot: &mut Option<(u64, Vec<usize>, u128)>,
                          better: fn(u64, u64) -> bool| {
                match slot {
                    Some((best, _, count)) if *best == u => *count += ways,
                    Some((best, _, _)) if !better(u, *best) => {}
                    _ => *slot = Some((u, model.complete(path, used), ways)),
                }
            };
            record(&mut self.min, |a, b| a < b);
            record(&mut self.max, |a, b| a > b);
            return;
        }
        for q in 0..self.model.queries.len() {
            if used >> q & 1 == 1 {
                continue;
            }
            let disc = self.model.discovers[q];
            let d = (live & disc).count_ones() as u64;
            self.path.push(q);
            self.run(live & !disc, used | 1 << q, u + (depth + 1) * d);
            self.path.pop();
        }
    }
}

fn run_enumeration(model: &Model) -> Enumerator<'_> {
    let mut e = Enumerator {
        model,
        path: Vec::new(),
        nodes: 0,
        total_u: 0,
        sequences: 0,
        min: None,
        max: None,
    };
    e.run(model.all_live(), 0, 0);
    e
}

fn brute_force_model(params: ProblemParams) -> Result<Model> {
    if params.query_count() > BRUTE_FORCE_MAX_QUERIES {
        return Err(Error::Capacity(format!(
            "brute force enumerates N! sequences; N={} exceeds {BRUTE_FORCE_MAX_QUERIES}",
            params.query_count()
        )));
    }
    Model::new(params)
}

pub(crate) fn enumerate_all_sequences(params: ProblemParams) -> Result<EnumerationStats> {
    let model = brute_force_model(params)?;
    let e = run_enumeration(&model);
    Ok(EnumerationStats {
        total_u: e.total_u,
        sequence_count: e.sequences,
        scene_count: model.scenes,
    })
}

/// Scores every complete sequence. The best and worst reported are the
/// lexicographically least (by query ranks) among their ties.
pub fn brute_force(params: ProblemParams) -> Result<SearchResult> {
    let model = brute_force_model(params)?;
    let e = run_enumeration(&model);
    let (min_u, min_path, min_count) = e.min.clone().expect("at least one sequence");
    let (max_u, max_path, max_count) = e.max.clone().expect("at least one sequence");
    Ok(SearchResult {
        best: model.sequence(&min_path),
        score: model.score(min_u),
        nodes_expanded: e.nodes,
        pruned: PruneCounts::default(),
        optimal_count: Some(min_count),
        worst: Some((model.sequence(&max_path), model.score(max_u), max_count)),
    })
}

pub fn branch_and_prune(params: ProblemParams) -> Result<SearchResult> {
    branch_and_prune_with(params, SearchOptions::default())
}

struct Pruner<'a> {
    model: &'a Model,
    opts: SearchOptions,
    path: Vec<usize>,
    best_u: u64,
    best_path: Option<Vec<usize>>,
    optimal: u128,
    nodes: u64,
    pruned: PruneCounts,
}

impl Pruner<'_> {
    fn beaten(&self, bound: u64) -> bool {
        if self.opts.count_optima {
            bound > self.best_u
        } else {
            bound >= self.best_u
        }
    }

    fn leaf(&mut self, total: u64, sequence: impl FnOnce() -> Vec<usize>) {
        if total < self.best_u {
            self.best_u = total;
            self.best_path = Some(sequence());
            self.optimal = 1;
        } else if total == self.best_u {
            if self.best_path.is_none() {
                self.best_path = Some(sequence());
            }
            self.optimal += 1;
        }
    }

    /// Lexicographically least optimal tail once every candidate discovers at
    /// most one scene: repeatedly take the first query still discovering one.
    fn singleton_completion(&self, mut live: u64, mut used: u64) -> Vec<usize> {
        let mut out = self.path.clone();
        while live != 0 {
            let q = (0..self.model.queries.len())
                .find(|&q| used >> q & 1 == 0 && live & self.model.discovers[q] != 0)
                .expect("live scenes remain discoverable");
            out.push(q);
            used |= 1 << q;
            live &= !self.model.discovers[q];
        }
        self.model.complete(&out, used)
    }

    fn search(&mut self, live: u64, used: u64, u: u64, cap: u64, next_label: u32) {
        self.nodes += 1;
        let depth = self.path.len() as u64;
        let remaining = live.count_ones() as u64;
        if remaining == 0 {
            let done = self.model.complete(&self.path, used);
            self.leaf(u, || done);
            return;
        }

        let count = self.model.queries.len();
        let mut discovered = [0u64; 64];
        let mut max_d = 0;
        for (q, d) in discovered.iter_mut().enumerate().take(count) {
            if used >> q & 1 == 0 {
                *d = (live & self.model.discovers[q]).count_ones() as u64;
                max_d = max_d.max(*d);
            }
        }

        if self.opts.singleton_tail && max_d == 1 {
            self.pruned.p4 += 1;
            // positions depth+1 ..= depth+remaining each discover one scene
            let total = u + remaining * depth + remaining * (remaining + 1) / 2;
            if total < self.best_u || (total == self.best_u && self.opts.count_optima) {
                let tail = self.singleton_completion(live, used);
                self.leaf(total, || tail);
            }
            return;
        }

        #[allow(clippy::needless_range_loop)]
        for q in 0..count {
            if used >> q & 1 == 1 {
                continue;
            }
            let mask = self.model.queries[q];
            let mut label = next_label;
            if self.opts.canonical_labels {
                let fresh = mask & !low_bits(next_label);
                let j = fresh.count_ones();
                if fresh != low_bits(j) << next_label {
                    self.pruned.p3 += 1;
                    continue;
                }
                label += j;
            }
            let d = discovered[q];
            if self.opts.monotonicity && (d > cap || d == 0) {
                self.pruned.p2 += 1;
                continue;
            }
            let child_u = u + (depth + 1) * d;
            if self.opts.score_bound {
                let node = SearchNode {
                    position: depth + 1,
                    partial_u: child_u,
                    remaining: remaining - d,
                    cap: if self.opts.monotonicity { d } else { max_d },
                };
                if self.beaten(lower_bound(&node)) {
                    self.pruned.p1 += 1;
                    continue;
                }
            }
            self.path.push(q);
            self.search(
                live & !self.model.discovers[q],
                used | 1 << q,
                child_u,
                d,
                label,
            );
            self.path.pop();
        }
    }
}

/// Depth-first branch and prune. Children are visited in ascending
/// lexicographic rank and the incumbent only moves on strict improvement, so
/// the returned optimum is the first one met in that order.
pub fn branch_and_prune_with(params: ProblemParams, opts: SearchOptions) -> Result<SearchResult> {
    let model = Model::new(params)?;
    if model.queries.len() > 64 {
        return Err(Error::Capacity(format!(
            "branch and prune tracks at most 64 queries, {params} has {}",
            model.queries.len()
        )));
    }
    let mut best_u = u64::MAX;
    if opts.seed_incumbent {
        let (_, profile) = gse(params)?;
        let gse_u = profile.weighted_sum();
        best_u = if opts.count_optima { gse_u } else { gse_u + 1 };
    }
    let mut pruner = Pruner {
        model: &model,
        opts,
        path: Vec::new(),
        best_u,
        best_path: None,
        optimal: 0,
        nodes: 0,
        pruned: PruneCounts::default(),
    };
    let root_cap = (1u64 << (params.n() - params.k())) + 1;
    pruner.search(model.all_live(), 0, 0, root_cap, 0);

    let path = pruner
        .best_path
        .clone()
        .ok_or_else(|| Error::Config("search exhausted without a complete sequence".into()))?;
    let best = model.sequence(&path);
    let (score, _) = score_by_elimination(&best)?;
    debug_assert_eq!(score.numerator, pruner.best_u);
    Ok(SearchResult {
        best,
        score,
        nodes_expanded: pruner.nodes,
        pruned: pruner.pruned,
        optimal_count: opts.count_optima.then_some(pruner.optimal),
        worst: None,
    })
}
