//! Seeded random instance generators.
//!
//! Trials draw from ChaCha8 (`rand_chacha`), a portable stream cipher RNG, so
//! a given seed produces the same instances on every platform. Each trial gets
//! its own stream keyed by (master seed, check id, trial index), which makes
//! results independent of the order trials run in.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ueq_core::{
    Carrier, ElementSet, EquivRel, PseudoMetric, Rational, TransitivePseudoMetric, UeqClass,
};

pub type TrialRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a64(s: &str) -> u64 {
    s.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Sub-seed for one trial: SplitMix64 over the master seed, an FNV-1a hash of
/// the check id and the trial index.
pub fn trial_seed(master: u64, check_id: &str, trial: u64) -> u64 {
    splitmix64(splitmix64(master ^ fnv1a64(check_id)) ^ splitmix64(trial))
}

pub fn trial_rng(master: u64, check_id: &str, trial: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(trial_seed(master, check_id, trial))
}

pub fn carrier(n: usize) -> Carrier {
    Carrier::new(n).expect("generators never ask for an empty carrier")
}

pub fn size(rng: &mut TrialRng, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi.max(lo))
}

/// A relation with a random number of blocks.
pub fn relation(rng: &mut TrialRng, n: usize) -> EquivRel {
    let k = rng.random_range(1..=n);
    EquivRel::from_labels((0..n).map(|_| rng.random_range(0..k))).expect("n >= 1")
}

/// A class generated by `1..=max_gens` random relations.
pub fn class(rng: &mut TrialRng, n: usize, max_gens: usize) -> UeqClass {
    let k = rng.random_range(1..=max_gens.max(1));
    let gens = (0..k).map(|_| relation(rng, n)).collect();
    UeqClass::generate(carrier(n), gens).expect("nonempty generators")
}

/// A class that contains `X²`.
pub fn rich_class(rng: &mut TrialRng, n: usize, max_gens: usize) -> UeqClass {
    let k = rng.random_range(0..max_gens.max(1));
    let mut gens = vec![EquivRel::full(carrier(n))];
    gens.extend((0..k).map(|_| relation(rng, n)));
    UeqClass::generate(carrier(n), gens).expect("nonempty generators")
}

/// A class whose bottom relation is `ΔX`.
pub fn separated_class(rng: &mut TrialRng, n: usize, max_gens: usize) -> UeqClass {
    let base = class(rng, n, max_gens.saturating_sub(1).max(1));
    let bottom = base.bottom();
    if bottom.is_delta() {
        return base;
    }
    let mut gens = base.generators().to_vec();
    gens.push(transversal(&bottom));
    UeqClass::generate(carrier(n), gens).expect("nonempty generators")
}

/// A relation meeting `u` exactly in `ΔX`: each element is labelled by its
/// rank inside its `u`-block.
pub fn transversal(u: &EquivRel) -> EquivRel {
    EquivRel::from_labels(rank_in_block(u)).expect("nonempty")
}

/// `rank[x]` is the number of smaller elements sharing `x`'s block.
pub fn rank_in_block(u: &EquivRel) -> Vec<usize> {
    let mut seen = vec![0usize; u.size()];
    (0..u.size())
        .map(|x| {
            let b = u.label(x);
            let r = seen[b];
            seen[b] += 1;
            r
        })
        .collect()
}

/// A connected class: every generator is `X²`.
pub fn connected_class(n: usize) -> UeqClass {
    UeqClass::singleton(EquivRel::full(carrier(n)))
}

pub fn map_values(rng: &mut TrialRng, n: usize, m: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..m)).collect()
}

/// An injection `0..n → 0..m`, `n ≤ m`.
pub fn injection(rng: &mut TrialRng, n: usize, m: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..m).collect();
    pool.shuffle(rng);
    pool.truncate(n);
    pool
}

/// A surjection `0..n → 0..m`, `n ≥ m`.
pub fn surjection(rng: &mut TrialRng, n: usize, m: usize) -> Vec<usize> {
    let mut values: Vec<usize> = (0..m).collect();
    values.extend((m..n).map(|_| rng.random_range(0..m)));
    values.shuffle(rng);
    values
}

pub fn subset(rng: &mut TrialRng, n: usize) -> ElementSet {
    ElementSet::from_elements(n, (0..n).filter(|_| rng.random_bool(0.5)))
}

pub fn nonempty_subset(rng: &mut TrialRng, n: usize) -> ElementSet {
    let mut s = subset(rng, n);
    if s.is_empty() {
        s.insert(rng.random_range(0..n));
    }
    s
}

pub fn pick<'a, T>(rng: &mut TrialRng, items: &'a [T]) -> &'a T {
    &items[rng.random_range(0..items.len())]
}

/// A transitive pseudo-metric from a random chain of coarsening partitions:
/// points first merged at level `i` sit at the `i`-th of an increasing list of
/// random rational distances.
pub fn transitive_metric(rng: &mut TrialRng, n: usize) -> TransitivePseudoMetric {
    let mut level_rel = relation(rng, n);
    let mut chain = vec![level_rel.clone()];
    while !level_rel.is_full() && chain.len() < 4 {
        let coarser = relation(rng, n);
        let labels: Vec<usize> = (0..n).map(|x| coarser.label(level_rel.label(x))).collect();
        let next = EquivRel::from_labels(labels).expect("n >= 1");
        if next != level_rel {
            chain.push(next.clone());
        }
        level_rel = next;
    }
    // thresholds[i] is the distance for pairs first merged at chain level i + 1
    let mut thresholds = Vec::new();
    let mut acc = Rational::from_integer(0);
    for _ in 0..chain.len() {
        acc += Rational::new(rng.random_range(1..=8), rng.random_range(1..=4));
        thresholds.push(acc);
    }
    let matrix = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| match chain.iter().position(|r| r.related(x, y)) {
                    Some(0) => Rational::from_integer(0),
                    Some(level) => thresholds[level - 1],
                    None => thresholds[chain.len() - 1],
                })
                .collect()
        })
        .collect();
    TransitivePseudoMetric::from_matrix(matrix).expect("hierarchical distances are ultrametric")
}

/// A pseudo-metric that is usually not transitive: distances between random
/// points on a line.
pub fn line_metric(rng: &mut TrialRng, n: usize) -> PseudoMetric {
    let pts: Vec<i64> = (0..n).map(|_| rng.random_range(0..6)).collect();
    let matrix = pts
        .iter()
        .map(|a| {
            pts.iter()
                .map(|b| Rational::from_integer((a - b).abs()))
                .collect()
        })
        .collect();
    PseudoMetric::new(matrix).expect("line distances form a pseudo-metric")
}
