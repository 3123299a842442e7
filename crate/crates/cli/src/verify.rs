//! Invariant suites behind `korder verify`.

use std::ops::RangeInclusive;

use korder::exact_search::EXACT_MAX_N;
use korder::generators::FullCyclePermutation;
use korder::goal_driven::{gse, intersection_scene_count};
use korder::scoring::sigma_bruteforce;
use korder::{
    check_monotonicity, enumerate_scenes, parse_sequence, rank, relabel, score_by_elimination,
    score_by_scenes, sequence_to_string, sigma, unrank, ProblemParams, Query, QuerySequence,
    ReferenceOrder, SpikeRelabeling,
};

use crate::algo::{self, Algo, AlgoOptions};
use crate::CliError;

/// Scene-dependent checks stop here; beyond it a desk run takes too long.
const SCENE_CHECK_MAX_N: u32 = 16;
const ROUND_TRIP_MAX_QUERIES: u64 = 100_000;
const SIGMA_ORACLE_MAX_QUERIES: u64 = 8;
const INTERSECTION_ORACLE_MAX_N: u32 = 8;

const ALL_ALGOS: [Algo; 9] = [
    Algo::Lex,
    Algo::Colex,
    Algo::Revdoor,
    Algo::PatternShift,
    Algo::BaseUnrank,
    Algo::PrngPerm,
    Algo::Gse,
    Algo::GseReversed,
    Algo::Mis,
];

const INVARIANTS: [&str; 7] = [
    "completeness",
    "round-trip",
    "scoring-equivalence",
    "profile-partition",
    "monotonicity",
    "relabeling",
    "oracle",
];

#[derive(Default)]
struct Tally {
    cases: [u64; INVARIANTS.len()],
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, invariant: &str, ok: bool, detail: impl FnOnce() -> String) {
        let idx = INVARIANTS
            .iter()
            .position(|&i| i == invariant)
            .expect("known invariant");
        self.cases[idx] += 1;
        if !ok {
            self.failures.push(format!("{invariant}: {}", detail()));
        }
    }

    fn finish(self) -> Result<(), CliError> {
        for (name, cases) in INVARIANTS.iter().zip(self.cases) {
            let failed = self
                .failures
                .iter()
                .filter(|f| f.starts_with(&format!("{name}:")))
                .count();
            let verdict = if failed == 0 { "PASS" } else { "FAIL" };
            println!("{verdict} {name} cases={cases} failures={failed}");
        }
        for f in &self.failures {
            eprintln!("{f}");
        }
        if self.failures.is_empty() {
            Ok(())
        } else {
            Err(CliError::Verification(format!(
                "{} invariant violations",
                self.failures.len()
            )))
        }
    }
}

pub fn run_suites(
    ns: RangeInclusive<u32>,
    ks: RangeInclusive<u32>,
    seed: u64,
) -> Result<(), CliError> {
    let mut tally = Tally::default();
    for n in ns {
        for k in ks.clone() {
            if k == 0 || k > n {
                continue;
            }
            let params = ProblemParams::new(n, k)?;
            check_params(&mut tally, params, seed)?;
        }
    }
    tally.finish()
}

fn check_params(tally: &mut Tally, p: ProblemParams, seed: u64) -> Result<(), CliError> {
    let (n, k) = (p.n(), p.k());
    let at = |what: &str| format!("{what} at n={n} k={k}");
    let with_scenes = n <= SCENE_CHECK_MAX_N;
    let opts = AlgoOptions {
        base: 2,
        reference: None,
        seed,
        scene_cap: SCENE_CHECK_MAX_N,
    };

    if p.query_count() <= ROUND_TRIP_MAX_QUERIES {
        for order in ReferenceOrder::ALL {
            let ok = (0..p.query_count())
                .all(|r| unrank(order, r, p).and_then(|q| rank(order, q, p)).ok() == Some(r));
            tally.check("round-trip", ok, || at(&format!("{order} rank/unrank")));
        }
    }

    for algo in ALL_ALGOS {
        if algo.needs_scenes() && !with_scenes {
            continue;
        }
        let seq = algo::build(algo, p, &opts)?;
        let complete = seq.validate_complete();
        tally.check("completeness", complete.is_ok(), || {
            format!("{} ({})", at(algo.name()), complete.as_ref().unwrap_err())
        });
        let text = sequence_to_string(&seq);
        let back = parse_sequence(&text).ok();
        tally.check("round-trip", back.as_ref() == Some(&seq), || {
            at(&format!("{} file", algo.name()))
        });

        if !with_scenes || complete.is_err() {
            continue;
        }
        check_scores(tally, &seq, algo.name(), seed)?;
    }

    if with_scenes {
        let (_, profile) = gse(p)?;
        tally.check("monotonicity", check_monotonicity(&profile), || {
            at("gse profile")
        });
    }

    if n <= EXACT_MAX_N && p.query_count() <= SIGMA_ORACLE_MAX_QUERIES {
        let exact = sigma_bruteforce(p)?;
        let exact = *exact.numer() as f64 / *exact.denom() as f64;
        let closed = sigma(p);
        tally.check("oracle", (exact - closed).abs() <= 1e-9, || {
            at(&format!(
                "sigma closed form {closed} vs enumeration {exact}"
            ))
        });
    }

    if n <= INTERSECTION_ORACLE_MAX_N {
        let queries: Vec<Query> = (0..p.query_count())
            .map(|r| unrank(ReferenceOrder::Lexicographic, r, p))
            .collect::<korder::Result<_>>()?;
        let scenes: Vec<u64> = enumerate_scenes(p)?.map(|s| s.mask()).collect();
        let mut ok = true;
        for &a in &queries {
            for &b in &queries {
                let u = a.mask() | b.mask();
                let direct = scenes.iter().filter(|&&s| s & u == u).count() as u64;
                ok &= intersection_scene_count(a, b, p)? == direct;
            }
        }
        tally.check("oracle", ok, || at("pairwise scene intersection"));
    }

    if k == 3 && n >= 3 {
        let seq = algo::build(
            Algo::PatternShift,
            p,
            &AlgoOptions {
                reference: Some("lex".into()),
                ..opts
            },
        )?;
        let got: Vec<Vec<u32>> = seq.iter().map(|q| q.elements()).collect();
        tally.check("oracle", got == triple_loop(n), || {
            at("pattern-shift vs triple loop")
        });
    }
    Ok(())
}

fn check_scores(
    tally: &mut Tally,
    seq: &QuerySequence,
    name: &str,
    seed: u64,
) -> Result<(), CliError> {
    let p = seq.params();
    let at = |what: &str| format!("{name} {what} at n={} k={}", p.n(), p.k());
    let direct = score_by_scenes(seq)?;
    let (score, profile) = score_by_elimination(seq)?;
    tally.check("scoring-equivalence", direct == score, || {
        at(&format!("per-scene {direct} vs elimination {score}"))
    });
    tally.check(
        "profile-partition",
        profile.total() == score.denominator,
        || {
            at(&format!(
                "profile sums to {} of {} scenes",
                profile.total(),
                score.denominator
            ))
        },
    );
    let perm: Vec<u32> = FullCyclePermutation::new(p.n() as u64, seed ^ 0x5eed)
        .map(|x| x as u32)
        .collect();
    let relabeled = relabel(seq, &SpikeRelabeling::new(perm)?)?;
    let (moved, _) = score_by_elimination(&relabeled)?;
    tally.check("relabeling", moved == score, || {
        at(&format!("{score} became {moved}"))
    });
    Ok(())
}

/// Direct k = 3 loop over gaps: `(x, x+dy, x+dy+dz)`.
fn triple_loop(n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for dy in 1..=n - 2 {
        for dz in 1..=n - dy - 1 {
            for x in 0..=n - dy - dz - 1 {
                out.push(vec![x, x + dy, x + dy + dz]);
            }
        }
    }
    out
}

/// Completeness and scoring checks for one sequence file.
pub fn check_file(seq: &QuerySequence) -> Result<(), CliError> {
    if let Err(e) = seq.validate_complete() {
        println!("FAIL completeness");
        return Err(CliError::Verification(format!("completeness: {e}")));
    }
    println!("PASS completeness");
    if seq.params().n() > SCENE_CHECK_MAX_N {
        println!("SKIP scoring-equivalence (n above {SCENE_CHECK_MAX_N})");
        return Ok(());
    }
    let direct = score_by_scenes(seq)?;
    let (score, _) = score_by_elimination(seq)?;
    if direct != score {
        println!("FAIL scoring-equivalence");
        return Err(CliError::Verification(format!(
            "scoring-equivalence: per-scene {direct} vs elimination {score}"
        )));
    }
    println!(
        "PASS scoring-equivalence U={} |S|={}",
        score.numerator, score.denominator
    );
    Ok(())
}
