//! Expected time to discovery and its baselines.
//!
//! A sequence is scored by the exact pair `(U, |S|)` where `U` sums the
//! discovery index over all scenes. The two formulations (per scene, and per
//! query via the discovery profile) must agree exactly.

use std::cmp::Ordering;
use std::fmt;
use std::io::{self, Write};

use num_rational::Ratio;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::binomial_f64;
use crate::error::{Error, Result};
use crate::scene::{
    scene_count, scene_masks, ProblemParams, Query, QuerySequence, Scene, DEFAULT_SCENE_CAP,
};

/// `T = U / |S|` held as integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ExactScore {
    /// `U`, the sum of discovery indices over all scenes.
    pub numerator: u64,
    /// `|S|`.
    pub denominator: u64,
}

impl ExactScore {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl PartialOrd for ExactScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactScore {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.numerator as u128 * other.denominator as u128;
        let rhs = other.numerator as u128 * self.denominator as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for ExactScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// Newly discovered scenes `D(q_i)` per position.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DiscoveryProfile {
    pub counts: Vec<u64>,
}

impl DiscoveryProfile {
    pub fn new(counts: Vec<u64>) -> Self {
        Self { counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `U = sum_i i * D(q_i)` with one-based positions.
    pub fn weighted_sum(&self) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, d)| (i as u64 + 1) * d)
            .sum()
    }

    pub fn score(&self, scene_count: u64) -> ExactScore {
        ExactScore {
            numerator: self.weighted_sum(),
            denominator: scene_count,
        }
    }

    /// Scenes still undiscovered after each query.
    pub fn remaining(&self, scene_count: u64) -> Vec<u64> {
        let mut left = scene_count;
        self.counts
            .iter()
            .map(|d| {
                left -= d;
                left
            })
            .collect()
    }
}

/// One-based index of the first query discovering `s`.
pub fn tau(seq: &QuerySequence, s: Scene) -> Result<usize> {
    seq.iter()
        .position(|q| q.mask() & s.mask() == q.mask())
        .map(|i| i + 1)
        .ok_or_else(|| Error::UndiscoverableScene(s.to_string()))
}

fn prepare(seq: &QuerySequence) -> Result<u64> {
    seq.params().require_scene_cap(DEFAULT_SCENE_CAP)?;
    seq.validate_complete()?;
    scene_count(seq.params())
}

/// Averages `tau` over every scene.
pub fn score_by_scenes(seq: &QuerySequence) -> Result<ExactScore> {
    let total_scenes = prepare(seq)?;
    let params = seq.params();
    let k = params.k();
    let masks: Vec<u64> = seq.iter().map(|q| q.mask()).collect();
    let numerator = (0..=params.full_mask())
        .into_par_iter()
        .filter(|s| s.count_ones() >= k)
        .map(|s| {
            masks
                .iter()
                .position(|&q| q & s == q)
                .map(|i| i as u64 + 1)
                .expect("complete sequences discover every scene")
        })
        .sum();
    Ok(ExactScore {
        numerator,
        denominator: total_scenes,
    })
}

/// Removes discovered scenes query by query, recording `D(q_i)`.
pub fn score_by_elimination(seq: &QuerySequence) -> Result<(ExactScore, DiscoveryProfile)> {
    let total_scenes = prepare(seq)?;
    let profile = eliminate(seq.queries(), scene_masks(seq.params(), DEFAULT_SCENE_CAP)?);
    let score = profile.score(total_scenes);
    Ok((score, profile))
}

/// Scene elimination over an arbitrary query list, without completeness checks.
pub(crate) fn eliminate(queries: &[Query], mut live: Vec<u64>) -> DiscoveryProfile {
    let mut counts = Vec::with_capacity(queries.len());
    for q in queries {
        let q = q.mask();
        let mut d = 0;
        let mut j = 0;
        while j < live.len() {
            if live[j] & q == q {
                live.swap_remove(j);
                d += 1;
            } else {
                j += 1;
            }
        }
        counts.push(d);
    }
    DiscoveryProfile::new(counts)
}

/// Mean of `T` over all `N!` complete sequences, in closed form.
///
/// For a scene with `t` stars, `C(t, k)` of the `N` queries discover it; the
/// probability that position `i` is the first hit is accumulated until the
/// hit becomes certain.
pub fn sigma(params: ProblemParams) -> f64 {
    let n = params.n() as u64;
    let k = params.k() as u64;
    let big_n = params.query_count();
    let mut weighted = 0.0;
    let mut scenes = 0.0;
    for t in k..=n {
        let hits = binomial_f64(t, k);
        let mut survive = 1.0;
        let mut expected_index = 0.0;
        for i in 1..=big_n {
            let left = (big_n - i + 1) as f64;
            if hits >= left {
                expected_index += i as f64 * survive;
                break;
            }
            let p = hits / left;
            expected_index += i as f64 * p * survive;
            survive *= 1.0 - p;
        }
        let s_t = binomial_f64(n, t);
        weighted += s_t * expected_index;
        scenes += s_t;
    }
    weighted / scenes
}

/// Exact mean of `T` over every complete sequence, by enumeration (`N <= 10`).
pub fn sigma_bruteforce(params: ProblemParams) -> Result<Ratio<u128>> {
    let stats = crate::exact_search::enumerate_all_sequences(params)?;
    Ok(Ratio::new(
        stats.total_u,
        stats.sequence_count * stats.scene_count as u128,
    ))
}

/// Expected score of uniformly random queries drawn with repetition.
pub fn expected_random_score(params: ProblemParams) -> f64 {
    let n = params.n() as u64;
    let k = params.k() as u64;
    let big_n = params.query_count() as f64;
    let mut weighted = 0.0;
    let mut scenes = 0.0;
    for t in k..=n {
        let s_t = binomial_f64(n, t);
        weighted += s_t * big_n / binomial_f64(t, k);
        scenes += s_t;
    }
    weighted / scenes
}

/// Expected undiscovered scenes after each of the `N` positions of a random
/// complete sequence.
pub fn sigma_remaining_curve(params: ProblemParams) -> Vec<f64> {
    let n = params.n() as u64;
    let k = params.k() as u64;
    let big_n = params.query_count();
    let mut curve = vec![0.0; big_n as usize];
    for t in k..=n {
        let hits = binomial_f64(t, k);
        let s_t = binomial_f64(n, t);
        let mut survive = 1.0;
        for i in 1..=big_n {
            let left = (big_n - i + 1) as f64;
            if hits >= left {
                break;
            }
            survive *= 1.0 - hits / left;
            curve[i as usize - 1] += s_t * survive;
        }
    }
    curve
}

/// Expected undiscovered scenes after `i = 1..=len` random queries with repetition.
pub fn random_remaining_curve(params: ProblemParams, len: usize) -> Vec<f64> {
    let n = params.n() as u64;
    let k = params.k() as u64;
    let big_n = params.query_count() as f64;
    (1..=len)
        .map(|i| {
            (k..=n)
                .map(|t| binomial_f64(n, t) * (1.0 - binomial_f64(t, k) / big_n).powi(i as i32))
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    /// Samples that hit the cutoff; they contribute the cutoff value to the mean.
    pub censored: u64,
}

const MC_CHUNK: u64 = 4096;

/// Samples scenes uniformly from `S` and counts random queries (with
/// repetition) until discovery. Deterministic for a fixed seed, independent
/// of the thread count.
pub fn monte_carlo_random_score(
    params: ProblemParams,
    trials: u64,
    seed: u64,
    cutoff: u64,
) -> Result<MonteCarloEstimate> {
    params.require_mask_width()?;
    if trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    if cutoff == 0 {
        return Err(Error::Config("cutoff must be positive".into()));
    }
    let n = params.n();
    let k = params.k();
    let weights: Vec<f64> = (k..=n).map(|t| binomial_f64(n as u64, t as u64)).collect();
    let sizes = WeightedIndex::new(&weights).map_err(|e| Error::Config(e.to_string()))?;
    let chunks = trials.div_ceil(MC_CHUNK);

    let partials: Vec<(f64, f64, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = MC_CHUNK.min(trials - c * MC_CHUNK);
            let (mut sum, mut sum_sq, mut censored) = (0.0, 0.0, 0u64);
            for _ in 0..count {
                let t = k + sizes.sample(&mut rng) as u32;
                let scene = random_subset(&mut rng, n, t);
                let hit = (1..=cutoff).find(|_| {
                    let q = random_subset(&mut rng, n, k);
                    q & scene == q
                });
                let x = hit.unwrap_or(cutoff) as f64;
                sum += x;
                sum_sq += x * x;
                if hit.is_none() {
                    censored += 1;
                }
            }
            (sum, sum_sq, censored)
        })
        .collect();

    let (sum, sum_sq, censored) = partials
        .iter()
        .fold((0.0, 0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let m = trials as f64;
    let mean = sum / m;
    let var = if trials > 1 {
        ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        mean,
        std_error: (var / m).sqrt(),
        trials,
        censored,
    })
}

fn random_subset<R: Rng>(rng: &mut R, n: u32, size: u32) -> u64 {
    rand::seq::index::sample(rng, n as usize, size as usize)
        .iter()
        .fold(0u64, |m, e| m | 1 << e)
}

/// True when `D(q_i)` never increases.
pub fn check_monotonicity(profile: &DiscoveryProfile) -> bool {
    profile.counts.windows(2).all(|w| w[0] >= w[1])
}

/// `U(Q) - U(Q')` where `Q'` swaps the queries at one-based positions `i` and
/// `i + 1`. Positive means the swap improves the score.
pub fn swap_improvement(seq: &QuerySequence, i: usize) -> Result<i64> {
    if i == 0 || i >= seq.len() {
        return Err(Error::IndexOutOfRange {
            position: i,
            len: seq.len(),
        });
    }
    prepare(seq)?;
    let queries = seq.queries();
    let mut live = scene_masks(seq.params(), DEFAULT_SCENE_CAP)?;
    for q in &queries[..i - 1] {
        let q = q.mask();
        live.retain(|&s| s & q != q);
    }
    // Only positions i and i+1 change. With a and b the live supersets of
    // q_i and q_{i+1} before position i, the overlap cancels and the
    // difference reduces to b - a.
    let a = queries[i - 1].mask();
    let b = queries[i].mask();
    let count = |q: u64| live.iter().filter(|&&s| s & q == q).count() as i64;
    Ok(count(b) - count(a))
}

/// Profile as CSV: `i,query,D,scenes_remaining,cumulative_U`. Query spikes
/// are joined with `-` so no field needs quoting.
pub fn write_profile_csv<W: Write>(
    seq: &QuerySequence,
    profile: &DiscoveryProfile,
    scene_count: u64,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "i,query,D,scenes_remaining,cumulative_U")?;
    let mut remaining = scene_count;
    let mut cumulative = 0u64;
    for (idx, (q, d)) in seq.iter().zip(&profile.counts).enumerate() {
        let i = idx as u64 + 1;
        remaining -= d;
        cumulative += i * d;
        let ids: Vec<String> = q.elements().iter().map(u32::to_string).collect();
        writeln!(out, "{i},{},{d},{remaining},{cumulative}", ids.join("-"))?;
    }
    Ok(())
}
