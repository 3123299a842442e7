use clap::ValueEnum;
use korder::goal_driven::{gse_with, mis, GreedyDirection, GseOptions};
use korder::{
    generate_sequence, GeneratorSpec, PatternReference, ProblemParams, QuerySequence,
    ReferenceOrder,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Lex,
    Colex,
    Revdoor,
    PatternShift,
    BaseUnrank,
    PrngPerm,
    Gse,
    /// GSE taking the query that discovers the fewest scenes.
    GseReversed,
    Mis,
}

impl Algo {
    pub const COMPARE_DEFAULT: [Algo; 8] = [
        Algo::Lex,
        Algo::Colex,
        Algo::Revdoor,
        Algo::PatternShift,
        Algo::BaseUnrank,
        Algo::PrngPerm,
        Algo::Gse,
        Algo::Mis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Lex => "lex",
            Algo::Colex => "colex",
            Algo::Revdoor => "revdoor",
            Algo::PatternShift => "pattern-shift",
            Algo::BaseUnrank => "base-unrank",
            Algo::PrngPerm => "prng-perm",
            Algo::Gse => "gse",
            Algo::GseReversed => "gse-reversed",
            Algo::Mis => "mis",
        }
    }

    pub fn needs_scenes(self) -> bool {
        matches!(self, Algo::Gse | Algo::GseReversed)
    }
}

/// Generator knobs shared by every verb that builds a sequence.
#[derive(Debug, Clone)]
pub struct AlgoOptions {
    pub base: u64,
    pub reference: Option<String>,
    pub seed: u64,
    pub scene_cap: u32,
}

pub fn build(
    algo: Algo,
    params: ProblemParams,
    opts: &AlgoOptions,
) -> korder::Result<QuerySequence> {
    let order = |default: ReferenceOrder| -> korder::Result<ReferenceOrder> {
        match &opts.reference {
            Some(r) => r.parse(),
            None => Ok(default),
        }
    };
    let spec = match algo {
        Algo::Lex => GeneratorSpec::Lex,
        Algo::Colex => GeneratorSpec::Colex,
        Algo::Revdoor => GeneratorSpec::RevDoor,
        Algo::PatternShift => GeneratorSpec::PatternShift {
            reference: match &opts.reference {
                Some(r) => r.parse()?,
                None => PatternReference::default(),
            },
        },
        Algo::BaseUnrank => GeneratorSpec::BaseUnrank {
            base: opts.base,
            reference: order(ReferenceOrder::RevolvingDoor)?,
        },
        Algo::PrngPerm => GeneratorSpec::PrngPerm {
            seed: opts.seed,
            reference: order(ReferenceOrder::RevolvingDoor)?,
        },
        Algo::Gse | Algo::GseReversed => {
            let direction = if algo == Algo::Gse {
                GreedyDirection::MostScenes
            } else {
                GreedyDirection::FewestScenes
            };
            let gse_opts = GseOptions {
                direction,
                scene_cap: opts.scene_cap,
                ..GseOptions::default()
            };
            return gse_with(params, gse_opts).map(|(seq, _)| seq);
        }
        Algo::Mis => return mis(params),
    };
    generate_sequence(&spec, params)
}
