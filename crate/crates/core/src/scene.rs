//! Queries, scenes and sequences as 64-bit masks.

use std::collections::HashSet;
use std::fmt;

use crate::combinatorics::{self, binom, ReferenceOrder};
use crate::error::{Error, Result};

/// Largest spike count representable in a single mask word.
pub const MAX_MASK_N: u32 = 63;

/// Default cap on `n` for operations that materialise the scene universe.
pub const DEFAULT_SCENE_CAP: u32 = 30;

/// Spike count `n` and query size `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProblemParams {
    n: u32,
    k: u32,
    query_count: u64,
}

impl ProblemParams {
    /// Requires `1 <= k <= n` and `C(n, k)` to fit in 64 bits.
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidParams(format!(
                "need 1 <= k <= n, got n={n} k={k}"
            )));
        }
        let query_count = combinatorics::binomial(n as u64, k as u64)?;
        Ok(Self { n, k, query_count })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `N = C(n, k)`.
    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    /// Mask of the whole spike set `{0, .., n-1}`.
    pub fn full_mask(&self) -> u64 {
        low_bits(self.n)
    }

    pub(crate) fn require_mask_width(&self) -> Result<()> {
        if self.n > MAX_MASK_N {
            return Err(Error::Capacity(format!(
                "n={} exceeds the {MAX_MASK_N}-spike mask width",
                self.n
            )));
        }
        Ok(())
    }

    pub(crate) fn require_scene_cap(&self, cap: u32) -> Result<()> {
        if self.n > cap.min(MAX_MASK_N) {
            return Err(Error::Capacity(format!(
                "n={} exceeds the scene enumeration cap of {cap}",
                self.n
            )));
        }
        Ok(())
    }

    pub(crate) fn check_query(&self, q: Query) -> Result<()> {
        if q.mask() & !self.full_mask() != 0 {
            return Err(Error::InvalidQuery(format!(
                "{{{q}}} uses spikes outside 0..{}",
                self.n
            )));
        }
        if q.len() != self.k {
            return Err(Error::InvalidQuery(format!(
                "{{{q}}} has {} elements, expected {}",
                q.len(),
                self.k
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ProblemParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} k={}", self.n, self.k)
    }
}

pub(crate) fn low_bits(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A k-subset of spike IDs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Query(u64);

impl Query {
    pub fn from_elements(elements: &[u32]) -> Result<Self> {
        Ok(Self(mask_from_elements(elements)?))
    }

    pub(crate) fn from_mask_unchecked(mask: u64) -> Self {
        Self(mask)
    }

    pub fn from_mask(mask: u64) -> Self {
        Self(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Ascending spike IDs.
    pub fn elements(self) -> Vec<u32> {
        elements_of(self.0)
    }

    pub fn contains(self, spike: u32) -> bool {
        spike < 64 && self.0 >> spike & 1 == 1
    }
}

impl fmt::Display for Query {
    /// Comma-separated ascending IDs, e.g. `0,1,2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in self.elements() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
            first = false;
        }
        Ok(())
    }
}

/// Ground-truth set of true stars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scene(u64);

impl Scene {
    pub fn from_elements(elements: &[u32]) -> Result<Self> {
        Ok(Self(mask_from_elements(elements)?))
    }

    pub fn from_mask(mask: u64) -> Self {
        Self(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    /// Number of true stars `t`.
    pub fn size(self) -> u32 {
        self.0.count_ones()
    }

    pub fn elements(self) -> Vec<u32> {
        elements_of(self.0)
    }
}

impl fmt::Display for Scene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.elements().iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

fn mask_from_elements(elements: &[u32]) -> Result<u64> {
    let mut mask = 0u64;
    for &e in elements {
        if e > MAX_MASK_N {
            return Err(Error::InvalidQuery(format!(
                "spike id {e} exceeds {MAX_MASK_N}"
            )));
        }
        if mask >> e & 1 == 1 {
            return Err(Error::InvalidQuery(format!("spike id {e} repeated")));
        }
        mask |= 1 << e;
    }
    Ok(mask)
}

pub(crate) fn elements_of(mut mask: u64) -> Vec<u32> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros());
        mask &= mask - 1;
    }
    out
}

/// `q` discovers `s` when every spike of `q` is a true star in `s`.
#[inline]
pub fn discovers(q: Query, s: Scene) -> bool {
    q.0 & s.0 == q.0
}

/// `|S|`: number of n-bit sets with at least `k` members.
pub fn scene_count(params: ProblemParams) -> Result<u64> {
    let n = params.n() as u64;
    let mut total: u64 = 0;
    for t in params.k() as u64..=n {
        total = total
            .checked_add(combinatorics::binomial(n, t)?)
            .ok_or_else(|| Error::Overflow(format!("|S| for {params} does not fit in 64 bits")))?;
    }
    Ok(total)
}

/// Every scene with at least `k` stars, ascending by mask value.
pub fn enumerate_scenes(params: ProblemParams) -> Result<impl Iterator<Item = Scene>> {
    enumerate_scenes_capped(params, DEFAULT_SCENE_CAP)
}

pub fn enumerate_scenes_capped(
    params: ProblemParams,
    cap: u32,
) -> Result<impl Iterator<Item = Scene>> {
    params.require_scene_cap(cap)?;
    let k = params.k();
    Ok((0..=params.full_mask())
        .filter(move |m| m.count_ones() >= k)
        .map(Scene))
}

/// Scene masks collected into a flat vector.
pub(crate) fn scene_masks(params: ProblemParams, cap: u32) -> Result<Vec<u64>> {
    let mut v = Vec::with_capacity(scene_count(params)? as usize);
    v.extend(enumerate_scenes_capped(params, cap)?.map(Scene::mask));
    Ok(v)
}

/// Ordered list of queries over a fixed `(n, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySequence {
    params: ProblemParams,
    queries: Vec<Query>,
}

impl QuerySequence {
    /// Checks that every query is a k-subset of `0..n`; does not require completeness.
    pub fn new(params: ProblemParams, queries: Vec<Query>) -> Result<Self> {
        params.require_mask_width()?;
        for &q in &queries {
            params.check_query(q)?;
        }
        Ok(Self { params, queries })
    }

    pub(crate) fn from_parts_unchecked(params: ProblemParams, queries: Vec<Query>) -> Self {
        Self { params, queries }
    }

    pub fn from_elements(params: ProblemParams, queries: &[&[u32]]) -> Result<Self> {
        let qs = queries
            .iter()
            .map(|e| Query::from_elements(e))
            .collect::<Result<Vec<_>>>()?;
        Self::new(params, qs)
    }

    pub fn params(&self) -> ProblemParams {
        self.params
    }

    pub fn queries(&self) -> &[Query] {
        &self.queries
    }

    pub fn into_queries(self) -> Vec<Query> {
        self.queries
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Query> {
        self.queries.iter()
    }

    pub fn is_complete(&self) -> bool {
        self.validate_complete().is_ok()
    }

    /// Errors name the first repeated query or the lexicographically first absent one.
    pub fn validate_complete(&self) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.queries.len());
        for q in &self.queries {
            if !seen.insert(q.mask()) {
                return Err(Error::IncompleteSequence(format!(
                    "query {{{q}}} is repeated"
                )));
            }
        }
        let n = self.params.n();
        let k = self.params.k();
        if (self.queries.len() as u64) < self.params.query_count() {
            for r in 0..self.params.query_count() {
                let m = combinatorics::unrank_mask(ReferenceOrder::Lexicographic, n, k, r);
                if !seen.contains(&m) {
                    return Err(Error::IncompleteSequence(format!(
                        "query {{{}}} is absent",
                        Query(m)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Swaps the queries at zero-based positions `a` and `b`.
    pub fn swap(&mut self, a: usize, b: usize) {
        self.queries.swap(a, b);
    }
}

impl<'a> IntoIterator for &'a QuerySequence {
    type Item = &'a Query;
    type IntoIter = std::slice::Iter<'a, Query>;

    fn into_iter(self) -> Self::IntoIter {
        self.queries.iter()
    }
}

/// A bijection on `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeRelabeling {
    perm: Vec<u32>,
}

impl SpikeRelabeling {
    pub fn new(perm: Vec<u32>) -> Result<Self> {
        let n = perm.len();
        if n > 64 {
            return Err(Error::InvalidPermutation(format!(
                "{n} labels exceed the mask width"
            )));
        }
        let mut seen = 0u64;
        for &p in &perm {
            if p as usize >= n || seen >> p & 1 == 1 {
                return Err(Error::InvalidPermutation(format!(
                    "{perm:?} is not a bijection on 0..{n}"
                )));
            }
            seen |= 1 << p;
        }
        Ok(Self { perm })
    }

    pub fn identity(n: u32) -> Self {
        Self {
            perm: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn apply(&self, mask: u64) -> u64 {
        let mut m = mask;
        let mut out = 0;
        while m != 0 {
            let e = m.trailing_zeros();
            out |= 1 << self.perm[e as usize];
            m &= m - 1;
        }
        out
    }
}

/// Maps every spike of every query through `p`, keeping the order of queries.
pub fn relabel(seq: &QuerySequence, p: &SpikeRelabeling) -> Result<QuerySequence> {
    if p.len() != seq.params().n() as usize {
        return Err(Error::InvalidPermutation(format!(
            "relabeling has {} labels but n={}",
            p.len(),
            seq.params().n()
        )));
    }
    let queries = seq.iter().map(|q| Query(p.apply(q.mask()))).collect();
    Ok(QuerySequence::from_parts_unchecked(seq.params(), queries))
}

/// Number of scenes discovered by `q` alone: supersets of `q` inside `0..n`.
pub fn single_query_discoveries(params: ProblemParams) -> u64 {
    1u64 << (params.n() - params.k())
}

pub(crate) fn query_masks_lex(params: ProblemParams) -> Vec<u64> {
    let (n, k) = (params.n(), params.k());
    (0..binom(n, k))
        .map(|r| combinatorics::unrank_mask(ReferenceOrder::Lexicographic, n, k, r))
        .collect()
}
