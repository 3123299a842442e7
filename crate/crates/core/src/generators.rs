//! Stateless sequence generators.
//!
//! None of these look at scenes or remember previously emitted queries; each
//! keeps O(k) (or O(1)) state and streams the complete sequence.

use std::fmt;
use std::iter;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{binom, digits_needed, unrank_mask, DigitReversedCount, ReferenceOrder};
use crate::error::{Error, Result};
use crate::scene::{low_bits, ProblemParams, Query, QuerySequence};

/// What pattern shifting extends with spike 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternReference {
    Order(ReferenceOrder),
    /// Pattern shifting applied to itself on `(n-1, k-1)`, down to `k = 0`.
    Recursive,
}

impl PatternReference {
    /// Lexicographic reference; reproduces the original k=3 triple loop.
    pub const LEXICOGRAPHIC: PatternReference =
        PatternReference::Order(ReferenceOrder::Lexicographic);

    fn order(self) -> Option<ReferenceOrder> {
        match self {
            PatternReference::Order(o) => Some(o),
            PatternReference::Recursive => None,
        }
    }
}

impl Default for PatternReference {
    fn default() -> Self {
        Self::LEXICOGRAPHIC
    }
}

impl fmt::Display for PatternReference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order() {
            Some(o) => write!(f, "{o}"),
            None => f.write_str("recursive"),
        }
    }
}

impl FromStr for PatternReference {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recursive" => Ok(PatternReference::Recursive),
            other => Ok(PatternReference::Order(other.parse()?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    Lex,
    Colex,
    RevDoor,
    PatternShift {
        reference: PatternReference,
    },
    BaseUnrank {
        base: u64,
        reference: ReferenceOrder,
    },
    PrngPerm {
        seed: u64,
        reference: ReferenceOrder,
    },
}

impl GeneratorSpec {
    pub fn pattern_shift() -> Self {
        GeneratorSpec::PatternShift {
            reference: PatternReference::default(),
        }
    }

    /// Base 2 over the revolving door order.
    pub fn base_unrank() -> Self {
        GeneratorSpec::BaseUnrank {
            base: 2,
            reference: ReferenceOrder::RevolvingDoor,
        }
    }

    pub fn prng(seed: u64) -> Self {
        GeneratorSpec::PrngPerm {
            seed,
            reference: ReferenceOrder::RevolvingDoor,
        }
    }

    /// Short identifier, e.g. `base-unrank` or `pattern-shift`.
    pub fn kind(&self) -> &'static str {
        match self {
            GeneratorSpec::Lex => "lex",
            GeneratorSpec::Colex => "colex",
            GeneratorSpec::RevDoor => "revdoor",
            GeneratorSpec::PatternShift { .. } => "pattern-shift",
            GeneratorSpec::BaseUnrank { .. } => "base-unrank",
            GeneratorSpec::PrngPerm { .. } => "prng-perm",
        }
    }

    fn validate(&self, params: ProblemParams) -> Result<()> {
        params.require_mask_width()?;
        if let GeneratorSpec::BaseUnrank { base, .. } = self {
            if *base < 2 {
                return Err(Error::InvalidBase(*base));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::PatternShift { reference } => write!(f, "pattern-shift[{reference}]"),
            GeneratorSpec::BaseUnrank { base, reference } => {
                write!(f, "base-unrank[b={base},{reference}]")
            }
            GeneratorSpec::PrngPerm { seed, reference } => {
                write!(f, "prng-perm[seed={seed},{reference}]")
            }
            other => f.write_str(other.kind()),
        }
    }
}

type MaskIter = Box<dyn Iterator<Item = u64> + Send>;

/// Streaming generator output.
pub struct QueryStream {
    inner: MaskIter,
}

impl Iterator for QueryStream {
    type Item = Query;

    fn next(&mut self) -> Option<Query> {
        self.inner.next().map(Query::from_mask_unchecked)
    }
}

pub fn generate(spec: &GeneratorSpec, params: ProblemParams) -> Result<QueryStream> {
    spec.validate(params)?;
    let (n, k) = (params.n(), params.k());
    let inner: MaskIter = match *spec {
        GeneratorSpec::Lex => Box::new(OrderStream::new(ReferenceOrder::Lexicographic, n, k)),
        GeneratorSpec::Colex => Box::new(OrderStream::new(ReferenceOrder::Colexicographic, n, k)),
        GeneratorSpec::RevDoor => Box::new(OrderStream::new(ReferenceOrder::RevolvingDoor, n, k)),
        GeneratorSpec::PatternShift { reference } => pattern_shift_masks(n, k, reference),
        GeneratorSpec::BaseUnrank { base, reference } => {
            let ranks = base_unrank_ranks(params, base)?;
            Box::new(ranks.map(move |r| unrank_mask(reference, n, k, r)))
        }
        GeneratorSpec::PrngPerm { seed, reference } => {
            let ranks = FullCyclePermutation::new(params.query_count(), seed);
            Box::new(ranks.map(move |r| unrank_mask(reference, n, k, r)))
        }
    };
    Ok(QueryStream { inner })
}

pub fn generate_sequence(spec: &GeneratorSpec, params: ProblemParams) -> Result<QuerySequence> {
    let queries = generate(spec, params)?.collect();
    Ok(QuerySequence::from_parts_unchecked(params, queries))
}

/// Reference order walked by rank.
struct OrderStream {
    order: ReferenceOrder,
    n: u32,
    k: u32,
    rank: u64,
    count: u64,
}

impl OrderStream {
    fn new(order: ReferenceOrder, n: u32, k: u32) -> Self {
        Self {
            order,
            n,
            k,
            rank: 0,
            count: binom(n, k),
        }
    }
}

impl Iterator for OrderStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.rank == self.count {
            return None;
        }
        let m = unrank_mask(self.order, self.n, self.k, self.rank);
        self.rank += 1;
        Some(m)
    }
}

/// Extends every reference `(k-1)`-subset of `{1, .., n-1}` with spike 0, then
/// shifts all spikes up by one until spike `n-1` is reached.
struct PatternShift {
    last: u64,
    reference: MaskIter,
    current: Option<u64>,
}

impl Iterator for PatternShift {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let next = match self.current {
            Some(q) if q & self.last == 0 => q << 1,
            _ => (self.reference.next()? << 1) | 1,
        };
        self.current = Some(next);
        Some(next)
    }
}

fn pattern_shift_masks(n: u32, k: u32, reference: PatternReference) -> MaskIter {
    if k == 0 {
        return Box::new(iter::once(0));
    }
    let inner: MaskIter = match reference.order() {
        Some(order) => Box::new(OrderStream::new(order, n - 1, k - 1)),
        None => pattern_shift_masks(n - 1, k - 1, PatternReference::Recursive),
    };
    Box::new(PatternShift {
        last: 1 << (n - 1),
        reference: inner,
        current: None,
    })
}

pub fn pattern_shift(params: ProblemParams, reference: PatternReference) -> Result<QuerySequence> {
    generate_sequence(&GeneratorSpec::PatternShift { reference }, params)
}

/// Pattern shifting over a caller-supplied reference: `C(n-1, k-1)` distinct
/// `(k-1)`-subsets of `{0, .., n-2}`, relabelled internally to `{1, .., n-1}`.
pub fn pattern_shift_from(params: ProblemParams, reference: &[Query]) -> Result<QuerySequence> {
    params.require_mask_width()?;
    let (n, k) = (params.n(), params.k());
    let expected = binom(n - 1, k - 1);
    let mut seen = std::collections::HashSet::new();
    for q in reference {
        if q.len() != k - 1 || q.mask() & !low_bits(n - 1) != 0 {
            return Err(Error::IncompleteReference(format!(
                "{{{q}}} is not a {}-subset of 0..{}",
                k - 1,
                n - 1
            )));
        }
        if !seen.insert(q.mask()) {
            return Err(Error::IncompleteReference(format!("{{{q}}} is repeated")));
        }
    }
    if seen.len() as u64 != expected {
        return Err(Error::IncompleteReference(format!(
            "{} subsets given, C({}, {}) = {expected} required",
            seen.len(),
            n - 1,
            k - 1
        )));
    }
    let masks: Vec<u64> = reference.iter().map(|q| q.mask()).collect();
    let stream = PatternShift {
        last: 1 << (n - 1),
        reference: Box::new(masks.into_iter()),
        current: None,
    };
    Ok(QuerySequence::from_parts_unchecked(
        params,
        stream.map(Query::from_mask_unchecked).collect(),
    ))
}

/// Rank stream of base unranking: digit-reversed counting over
/// `L = ceil(log_b N)` digits, skipping ranks `>= N`.
pub fn base_unrank_ranks(params: ProblemParams, base: u64) -> Result<DigitReversedCount> {
    let count = params.query_count();
    DigitReversedCount::new(base, digits_needed(base, count)?, count)
}

pub fn base_unrank(
    params: ProblemParams,
    base: u64,
    reference: ReferenceOrder,
) -> Result<QuerySequence> {
    generate_sequence(&GeneratorSpec::BaseUnrank { base, reference }, params)
}

/// Pseudorandom order over the revolving door ranks.
pub fn prng_permutation(params: ProblemParams, seed: u64) -> Result<QuerySequence> {
    generate_sequence(&GeneratorSpec::prng(seed), params)
}

/// Full-period permutation of `0..limit` with constant state.
///
/// A linear congruential generator modulo `2^m` (with `2^m >= limit`, odd
/// increment and multiplier `= 1 mod 4`) visits every residue once per
/// period. Each state is passed through a seeded bijective mixer on `m` bits
/// and values `>= limit` are skipped.
#[derive(Debug, Clone)]
pub struct FullCyclePermutation {
    mask: u64,
    limit: u64,
    state: u64,
    mul: u64,
    inc: u64,
    key: u64,
    mix_a: u64,
    mix_b: u64,
    shift: u32,
    remaining: u128,
}

impl FullCyclePermutation {
    pub fn new(limit: u64, seed: u64) -> Self {
        let bits = if limit <= 1 {
            0
        } else {
            64 - (limit - 1).leading_zeros()
        };
        let mask = low_bits(bits);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            mask,
            limit,
            state: rng.random::<u64>() & mask,
            mul: (rng.random::<u64>() << 2) | 1,
            inc: rng.random::<u64>() | 1,
            key: rng.random(),
            mix_a: rng.random::<u64>() | 1,
            mix_b: rng.random::<u64>() | 1,
            shift: (bits / 2).max(1),
            remaining: 1u128 << bits,
        }
    }

    fn mix(&self, x: u64) -> u64 {
        let m = self.mask;
        let mut x = (x ^ self.key) & m;
        x = x.wrapping_mul(self.mix_a) & m;
        x ^= x >> self.shift;
        x = x.wrapping_mul(self.mix_b) & m;
        x ^ (x >> self.shift)
    }
}

impl Iterator for FullCyclePermutation {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.remaining > 0 {
            self.remaining -= 1;
            let out = self.mix(self.state);
            self.state = self.state.wrapping_mul(self.mul).wrapping_add(self.inc) & self.mask;
            if out < self.limit {
                return Some(out);
            }
        }
        None
    }
}
