//! Binomial coefficients, rank/unrank bijections for k-subsets and the
//! digit-reversed counter behind the base-unrank rank stream.
//!
//! Subsets are passed around as bit masks: bit `e` is set when spike `e`
//! belongs to the subset. All elements are zero-based.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scene::{ProblemParams, Query};

const TABLE_SIZE: usize = 65;

static BINOM: [[u64; TABLE_SIZE]; TABLE_SIZE] = pascal();

const fn pascal() -> [[u64; TABLE_SIZE]; TABLE_SIZE] {
    let mut t = [[0u64; TABLE_SIZE]; TABLE_SIZE];
    let mut n = 0;
    while n < TABLE_SIZE {
        t[n][0] = 1;
        let mut k = 1;
        while k <= n {
            t[n][k] = t[n - 1][k - 1] + t[n - 1][k];
            k += 1;
        }
        n += 1;
    }
    t
}

/// Table lookup for `n <= 64`. Returns 0 when `k > n`.
#[inline]
pub(crate) fn binom(n: u32, k: u32) -> u64 {
    if k > n {
        0
    } else {
        BINOM[n as usize][k as usize]
    }
}

/// `C(n, k)` with overflow detection. `C(n, k) = 0` for `k > n`.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    if n < TABLE_SIZE as u64 {
        return Ok(BINOM[n as usize][k as usize]);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is always integral.
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::Overflow(format!(
                "C({n}, {k}) does not fit in 64 bits"
            )));
        }
    }
    Ok(acc as u64)
}

/// `C(n, k)` in floating point, for closed forms over large `n`.
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Total orders over the k-subsets of `{0, .., n-1}` with a rank/unrank bijection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ReferenceOrder {
    Lexicographic,
    Colexicographic,
    #[default]
    RevolvingDoor,
}

impl ReferenceOrder {
    pub const ALL: [ReferenceOrder; 3] = [
        ReferenceOrder::Lexicographic,
        ReferenceOrder::Colexicographic,
        ReferenceOrder::RevolvingDoor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReferenceOrder::Lexicographic => "lex",
            ReferenceOrder::Colexicographic => "colex",
            ReferenceOrder::RevolvingDoor => "revdoor",
        }
    }
}

impl fmt::Display for ReferenceOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReferenceOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lex" | "lexicographic" => Ok(ReferenceOrder::Lexicographic),
            "colex" | "co-lexicographic" | "colexicographic" => Ok(ReferenceOrder::Colexicographic),
            "revdoor" | "revolving-door" => Ok(ReferenceOrder::RevolvingDoor),
            other => Err(Error::Config(format!("unknown reference order `{other}`"))),
        }
    }
}

/// Returns the `(r+1)`-th k-subset of the given order.
pub fn unrank(order: ReferenceOrder, r: u64, params: ProblemParams) -> Result<Query> {
    params.require_mask_width()?;
    let count = params.query_count();
    if r >= count {
        return Err(Error::RankOutOfRange { rank: r, count });
    }
    Ok(Query::from_mask_unchecked(unrank_mask(
        order,
        params.n(),
        params.k(),
        r,
    )))
}

/// Inverse of [`unrank`].
pub fn rank(order: ReferenceOrder, q: Query, params: ProblemParams) -> Result<u64> {
    params.require_mask_width()?;
    params.check_query(q)?;
    Ok(rank_mask(order, params.n(), params.k(), q.mask()))
}

/// Unchecked unrank on raw `(n, k)`; `k = 0` yields the empty set.
pub(crate) fn unrank_mask(order: ReferenceOrder, n: u32, k: u32, r: u64) -> u64 {
    match order {
        ReferenceOrder::Lexicographic => {
            // lex rank of A is N-1 minus the colex rank of {n-1-a : a in A}
            let mirrored = colex_unrank(n, k, binom(n, k) - 1 - r);
            mirror(mirrored, n)
        }
        ReferenceOrder::Colexicographic => colex_unrank(n, k, r),
        ReferenceOrder::RevolvingDoor => revdoor_unrank(n, k, r),
    }
}

pub(crate) fn rank_mask(order: ReferenceOrder, n: u32, k: u32, mask: u64) -> u64 {
    match order {
        ReferenceOrder::Lexicographic => binom(n, k) - 1 - colex_rank(mirror(mask, n)),
        ReferenceOrder::Colexicographic => colex_rank(mask),
        ReferenceOrder::RevolvingDoor => revdoor_rank(mask, k),
    }
}

fn mirror(mask: u64, n: u32) -> u64 {
    if n == 0 {
        return 0;
    }
    mask.reverse_bits() >> (64 - n)
}

/// Colex rank: sum of `C(e_i, i)` over the ascending elements, `i` one-based.
#[inline]
pub(crate) fn colex_rank(mut mask: u64) -> u64 {
    let mut r = 0;
    let mut i = 1;
    while mask != 0 {
        let e = mask.trailing_zeros();
        r += binom(e, i);
        i += 1;
        mask &= mask - 1;
    }
    r
}

fn colex_unrank(n: u32, k: u32, mut r: u64) -> u64 {
    let mut mask = 0u64;
    let mut x = n;
    for i in (1..=k).rev() {
        // largest x with C(x, i) <= r
        x -= 1;
        while binom(x, i) > r {
            x -= 1;
        }
        mask |= 1 << x;
        r -= binom(x, i);
    }
    mask
}

// Revolving door order over one-based elements t_1 < .. < t_k, shifted to
// zero-based bits on the way in and out.
fn revdoor_rank(mask: u64, k: u32) -> u64 {
    let mut elems = [0u32; 64];
    let mut m = mask;
    for slot in elems.iter_mut().take(k as usize) {
        *slot = m.trailing_zeros() + 1;
        m &= m - 1;
    }
    let mut r: i128 = -((k % 2) as i128);
    let mut sign = 1i128;
    for i in (1..=k).rev() {
        r += sign * binom(elems[i as usize - 1], i) as i128;
        sign = -sign;
    }
    r as u64
}

fn revdoor_unrank(n: u32, k: u32, r: u64) -> u64 {
    let mut r = r as i128;
    let mut x = n;
    let mut mask = 0u64;
    for i in (1..=k).rev() {
        while binom(x, i) as i128 > r {
            x -= 1;
        }
        // element x + 1 (one-based) is bit x
        mask |= 1 << x;
        r = binom(x + 1, i) as i128 - r - 1;
    }
    mask
}

/// Smallest `L` with `base^L >= count`.
pub fn digits_needed(base: u64, count: u64) -> Result<u32> {
    if base < 2 {
        return Err(Error::InvalidBase(base));
    }
    let mut digits = 0;
    let mut span: u128 = 1;
    while span < count as u128 {
        span *= base as u128;
        digits += 1;
    }
    Ok(digits)
}

/// Counts `0..base^digits`, reverses the `digits` base-`base` digits of each
/// count and skips results `>= limit`.
#[derive(Debug, Clone)]
pub struct DigitReversedCount {
    base: u128,
    digits: u32,
    limit: u128,
    counter: u128,
    end: u128,
}

impl DigitReversedCount {
    pub fn new(base: u64, digits: u32, limit: u64) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base));
        }
        let end = (base as u128)
            .checked_pow(digits)
            .filter(|e| *e <= u64::MAX as u128 * base as u128)
            .ok_or_else(|| Error::Overflow(format!("{base}^{digits} is too large")))?;
        if limit as u128 > end {
            return Err(Error::InvalidParams(format!(
                "limit {limit} exceeds {base}^{digits}"
            )));
        }
        Ok(Self {
            base: base as u128,
            digits,
            limit: limit as u128,
            counter: 0,
            end,
        })
    }

    fn reversed(&self, mut value: u128) -> u128 {
        let mut out = 0;
        for _ in 0..self.digits {
            out = out * self.base + value % self.base;
            value /= self.base;
        }
        out
    }
}

impl Iterator for DigitReversedCount {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.counter < self.end {
            let r = self.reversed(self.counter);
            self.counter += 1;
            if r < self.limit {
                return Some(r as u64);
            }
        }
        None
    }
}

/// Convenience wrapper producing the ranks as a vector.
pub fn digit_reversed_count(base: u64, digits: u32, limit: u64) -> Result<Vec<u64>> {
    Ok(DigitReversedCount::new(base, digits, limit)?.collect())
}

/// Visits every k-subset of the set bits of `mask`, handing each sub-mask to `f`.
pub(crate) fn for_each_k_subset_of(mask: u64, k: u32, mut f: impl FnMut(u64)) {
    let mut bits = [0u64; 64];
    let mut t = 0usize;
    let mut m = mask;
    while m != 0 {
        bits[t] = m & m.wrapping_neg();
        m &= m - 1;
        t += 1;
    }
    let k = k as usize;
    if k > t {
        return;
    }
    if k == 0 {
        f(0);
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(idx.iter().fold(0, |acc, &i| acc | bits[i]));
        // advance to the next combination of indices
        let mut j = k;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            if idx[j] < t - k + j {
                break;
            }
            if j == 0 {
                return;
            }
        }
        idx[j] += 1;
        for l in j + 1..k {
            idx[l] = idx[l - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal_oracle(n: u64, k: u64) -> u64 {
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![1u64; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row.get(k as usize).copied().unwrap_or(0)
    }

    fn elems(mask: u64) -> Vec<u32> {
        (0..64).filter(|b| mask >> b & 1 == 1).collect()
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 3).unwrap(), 10);
        assert_eq!(binomial(7, 0).unwrap(), 1);
        assert_eq!(binomial(3, 5).unwrap(), 0);
        assert_eq!(binomial(20, 10).unwrap(), pascal_oracle(20, 10));
        assert_eq!(binomial(20, 10).unwrap(), 184756);
        assert_eq!(binomial(100, 3).unwrap(), 161700);
        for n in 0..67 {
            for k in 0..=n {
                assert_eq!(binomial(n, k).unwrap(), pascal_oracle(n, k), "C({n},{k})");
            }
        }
    }

    #[test]
    fn binomial_overflow() {
        assert!(matches!(binomial(200, 100), Err(Error::Overflow(_))));
        assert!(binomial(67, 33).is_ok());
        assert!(binomial(70, 35).is_err());
    }

    #[test]
    fn lex_examples() {
        let p = ProblemParams::new(5, 3).unwrap();
        let lex = ReferenceOrder::Lexicographic;
        assert_eq!(unrank(lex, 0, p).unwrap().elements(), vec![0, 1, 2]);
        assert_eq!(unrank(lex, 1, p).unwrap().elements(), vec![0, 1, 3]);
        assert_eq!(unrank(lex, 2, p).unwrap().elements(), vec![0, 1, 4]);
        assert_eq!(
            rank(lex, Query::from_elements(&[0, 1, 2]).unwrap(), p).unwrap(),
            0
        );
        assert_eq!(
            rank(lex, Query::from_elements(&[2, 3, 4]).unwrap(), p).unwrap(),
            9
        );
    }

    #[test]
    fn lex_matches_sorted_enumeration() {
        for n in 1..=9u32 {
            for k in 1..=n {
                let mut all: Vec<Vec<u32>> = (0u64..1 << n)
                    .filter(|m| m.count_ones() == k)
                    .map(elems)
                    .collect();
                all.sort();
                for (r, e) in all.iter().enumerate() {
                    assert_eq!(
                        &elems(unrank_mask(ReferenceOrder::Lexicographic, n, k, r as u64)),
                        e
                    );
                }
            }
        }
    }

    #[test]
    fn colex_matches_sorted_enumeration() {
        for n in 1..=9u32 {
            for k in 1..=n {
                let mut all: Vec<Vec<u32>> = (0u64..1 << n)
                    .filter(|m| m.count_ones() == k)
                    .map(|m| {
                        let mut e = elems(m);
                        e.reverse();
                        e
                    })
                    .collect();
                all.sort();
                for (r, e) in all.iter().enumerate() {
                    let mut got =
                        elems(unrank_mask(ReferenceOrder::Colexicographic, n, k, r as u64));
                    got.reverse();
                    assert_eq!(&got, e);
                }
            }
        }
    }

    #[test]
    fn round_trip_and_bijective_all_orders() {
        for order in ReferenceOrder::ALL {
            for n in 1..=12u32 {
                for k in 0..=n {
                    let count = binom(n, k);
                    let mut seen = std::collections::HashSet::new();
                    for r in 0..count {
                        let m = unrank_mask(order, n, k, r);
                        assert_eq!(m.count_ones(), k);
                        assert!(m < 1 << n);
                        assert_eq!(rank_mask(order, n, k, m), r, "{order} n={n} k={k} r={r}");
                        assert!(seen.insert(m));
                    }
                }
            }
        }
    }

    #[test]
    fn colex_round_trip_example() {
        let p = ProblemParams::new(5, 3).unwrap();
        let q = unrank(ReferenceOrder::Colexicographic, 7, p).unwrap();
        assert_eq!(rank(ReferenceOrder::Colexicographic, q, p).unwrap(), 7);
    }

    #[test]
    fn revolving_door_minimal_change() {
        for n in 2..=12u32 {
            for k in 1..n {
                let count = binom(n, k);
                for r in 1..count {
                    let a = unrank_mask(ReferenceOrder::RevolvingDoor, n, k, r - 1);
                    let b = unrank_mask(ReferenceOrder::RevolvingDoor, n, k, r);
                    assert_eq!((a ^ b).count_ones(), 2, "n={n} k={k} r={r}");
                }
            }
        }
    }

    #[test]
    fn unrank_errors() {
        let p = ProblemParams::new(5, 3).unwrap();
        assert!(matches!(
            unrank(ReferenceOrder::Lexicographic, 10, p),
            Err(Error::RankOutOfRange {
                rank: 10,
                count: 10
            })
        ));
        let bad = Query::from_elements(&[0, 1]).unwrap();
        assert!(matches!(
            rank(ReferenceOrder::Lexicographic, bad, p),
            Err(Error::InvalidQuery(_))
        ));
    }

    #[test]
    fn digit_reversal_examples() {
        assert_eq!(
            digit_reversed_count(2, 4, 16).unwrap(),
            vec![0, 8, 4, 12, 2, 10, 6, 14, 1, 9, 5, 13, 3, 11, 7, 15]
        );
        assert_eq!(
            digit_reversed_count(2, 4, 10).unwrap(),
            vec![0, 8, 4, 2, 6, 1, 9, 5, 3, 7]
        );
        assert_eq!(digit_reversed_count(2, 1, 2).unwrap(), vec![0, 1]);
        assert_eq!(
            digit_reversed_count(10, 1, 10).unwrap(),
            (0..10).collect::<Vec<_>>()
        );
        assert!(matches!(
            digit_reversed_count(1, 4, 1),
            Err(Error::InvalidBase(1))
        ));
        assert!(digit_reversed_count(2, 3, 9).is_err());
    }

    #[test]
    fn digit_reversal_is_permutation() {
        for base in 2..=7u64 {
            for digits in 0..=4 {
                let end = base.pow(digits);
                let mut v = digit_reversed_count(base, digits, end).unwrap();
                v.sort();
                assert_eq!(v, (0..end).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn digits_needed_values() {
        assert_eq!(digits_needed(2, 10).unwrap(), 4);
        assert_eq!(digits_needed(10, 10).unwrap(), 1);
        assert_eq!(digits_needed(2, 16).unwrap(), 4);
        assert_eq!(digits_needed(2, 17).unwrap(), 5);
        assert_eq!(digits_needed(3, 1).unwrap(), 0);
    }

    #[test]
    fn k_subsets_of_mask() {
        let mut got = Vec::new();
        for_each_k_subset_of(0b10110, 2, |m| got.push(m));
        assert_eq!(got, vec![0b00110, 0b10010, 0b10100]);
        let mut count = 0;
        for_each_k_subset_of((1 << 10) - 1, 3, |_| count += 1);
        assert_eq!(count, 120);
        let mut none = 0;
        for_each_k_subset_of(0b11, 3, |_| none += 1);
        assert_eq!(none, 0);
    }
}
