//! Brute-force reference computations.
//!
//! Everything here works on explicit pair sets and open-set families, never
//! on the partition shortcuts the core library uses.

use std::collections::BTreeSet;

use num_integer::Integer;

use ueq_core::{ElementSet, EquivRel, PseudoMetric, Rational, TransitivePseudoMetric, UeqClass};

pub type Pairs = BTreeSet<(usize, usize)>;

pub fn pairs_of(u: &EquivRel) -> Pairs {
    let n = u.size();
    (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| u.related(x, y))
        .collect()
}

pub fn meet_pairs(a: &EquivRel, b: &EquivRel) -> Pairs {
    pairs_of(a).intersection(&pairs_of(b)).copied().collect()
}

pub fn block_pairs(p: &Pairs, x: usize, n: usize) -> ElementSet {
    ElementSet::from_elements(n, p.iter().filter(|&&(a, _)| a == x).map(|&(_, b)| b))
}

/// Every union of sets drawn from `base`, including the empty union.
pub fn unions(n: usize, base: impl IntoIterator<Item = ElementSet>) -> BTreeSet<Vec<usize>> {
    let mut family: BTreeSet<ElementSet> = BTreeSet::new();
    family.insert(ElementSet::empty(n));
    for b in base.into_iter().collect::<BTreeSet<_>>() {
        let grown: Vec<ElementSet> = family.iter().map(|s| s.union(&b)).collect();
        family.extend(grown);
    }
    family.iter().map(ElementSet::to_vec).collect()
}

/// Opens of `T_U` from the literal base `{U[x] | U ∈ 𝒰, x ∈ X}`.
pub fn topology_from_literal_base(class: &UeqClass) -> BTreeSet<Vec<usize>> {
    let n = class.carrier().size();
    let base = class.members().iter().flat_map(|u| {
        let p = pairs_of(u);
        (0..n).map(move |x| block_pairs(&p, x, n)).collect::<Vec<_>>()
    });
    unions(n, base)
}

/// Opens generated by a sub-base: close under pairwise intersection, then
/// take all unions.
pub fn topology_from_subbase(n: usize, subbase: &[ElementSet]) -> BTreeSet<Vec<usize>> {
    let mut base: BTreeSet<ElementSet> = subbase.iter().cloned().collect();
    base.insert(ElementSet::full(n));
    loop {
        let snapshot: Vec<ElementSet> = base.iter().cloned().collect();
        let mut grew = false;
        for a in &snapshot {
            for b in &snapshot {
                grew |= base.insert(a.intersection(b));
            }
        }
        if !grew {
            break;
        }
    }
    unions(n, base)
}

/// Complement of the largest open set inside the complement of `s`.
pub fn closure_by_complement(opens: &BTreeSet<Vec<usize>>, n: usize, s: &ElementSet) -> ElementSet {
    let comp = s.complement();
    let inner = opens
        .iter()
        .map(|g| ElementSet::from_elements(n, g.iter().copied()))
        .filter(|g| g.is_subset(&comp))
        .fold(ElementSet::empty(n), |acc, g| acc.union(&g));
    inner.complement()
}

/// A radius grid fine enough to hit every attained distance: multiples of
/// `1/L` up to `max + 1`, where `L` is the lcm of all denominators.
pub fn radius_grid(d: &PseudoMetric) -> Vec<Rational> {
    let lcm = d
        .matrix()
        .iter()
        .flatten()
        .fold(1i64, |acc, r| acc.lcm(r.denom()));
    let top = (d.max_distance() + Rational::from_integer(1)) * Rational::from_integer(lcm);
    let steps = top.ceil().to_integer();
    (1..=steps).map(|k| Rational::new(k, lcm)).collect()
}

/// Transitivity by testing every radius on the grid.
pub fn transitive_by_sampling(d: &PseudoMetric) -> bool {
    let n = d.size();
    radius_grid(d).into_iter().all(|r| {
        (0..n).all(|x| {
            (0..n).all(|y| {
                (0..n).all(|z| !(d.d(x, y) < r && d.d(y, z) < r) || d.d(x, z) < r)
            })
        })
    })
}

/// Opens generated by every metric ball `B_d(x, r)` on the radius grid.
pub fn metric_ball_topology(metrics: &[TransitivePseudoMetric]) -> BTreeSet<Vec<usize>> {
    let n = metrics[0].carrier().size();
    let mut subbase = BTreeSet::new();
    for m in metrics {
        for r in radius_grid(m.metric()) {
            for x in 0..n {
                subbase.insert(m.ball(x, r));
            }
        }
    }
    let subbase: Vec<ElementSet> = subbase.into_iter().collect();
    topology_from_subbase(n, &subbase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ueq_core::Carrier;

    #[test]
    fn grid_covers_denominators() {
        let half = Rational::new(1, 2);
        let third = Rational::new(1, 3);
        let z = Rational::from_integer(0);
        let d = PseudoMetric::new(vec![
            vec![z, half, third + half],
            vec![half, z, third + half],
            vec![third + half, third + half, z],
        ])
        .unwrap();
        let grid = radius_grid(&d);
        assert!(grid.contains(&half));
        assert!(grid.contains(&(third + half)));
        assert!(transitive_by_sampling(&d));
    }

    #[test]
    fn literal_base_for_two_blocks() {
        let c = Carrier::new(4).unwrap();
        let u = EquivRel::from_blocks(c, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let opens = topology_from_literal_base(&UeqClass::singleton(u));
        assert_eq!(opens.len(), 4);
    }
}
