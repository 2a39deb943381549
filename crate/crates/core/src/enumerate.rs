//! Exhaustive enumeration of partitions and small classes.
//!
//! These are exponential and meant for carriers of a handful of elements.

use std::collections::BTreeSet;

use crate::class::UeqClass;
use crate::relation::{Carrier, EquivRel};

/// Every equivalence relation on the carrier, via restricted growth strings.
pub fn all_partitions(carrier: Carrier) -> Vec<EquivRel> {
    let n = carrier.size();
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        out.push(EquivRel::from_labels(rgs.iter().copied()).expect("n >= 1"));
        // next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return out;
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for slot in &mut rgs[i + 1..] {
                    *slot = 0;
                }
                break;
            }
        }
    }
}

/// Every distinct class generated by between 1 and `max_generators`
/// partitions, deduplicated by member set.
pub fn all_classes(carrier: Carrier, max_generators: usize) -> Vec<UeqClass> {
    let parts = all_partitions(carrier);
    let mut seen: BTreeSet<Vec<EquivRel>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn rec(
        start: usize,
        left: usize,
        parts: &[EquivRel],
        chosen: &mut Vec<EquivRel>,
        carrier: Carrier,
        seen: &mut BTreeSet<Vec<EquivRel>>,
        out: &mut Vec<UeqClass>,
    ) {
        if !chosen.is_empty() {
            let cls = UeqClass::generate(carrier, chosen.clone()).expect("nonempty");
            let key: Vec<EquivRel> = cls.members().iter().cloned().collect();
            if seen.insert(key) {
                out.push(cls);
            }
        }
        if left == 0 {
            return;
        }
        for i in start..parts.len() {
            chosen.push(parts[i].clone());
            rec(i + 1, left - 1, parts, chosen, carrier, seen, out);
            chosen.pop();
        }
    }
    rec(0, max_generators, &parts, &mut chosen, carrier, &mut seen, &mut out);
    out
}

/// Every nonempty subset of the carrier (carrier size below 64).
pub fn nonempty_subsets(carrier: Carrier) -> impl Iterator<Item = crate::set::ElementSet> {
    let n = carrier.size();
    assert!(n < 64, "subset enumeration needs a carrier below 64 elements");
    (1u64..(1u64 << n)).map(move |m| crate::set::ElementSet::from_mask(n, m))
}
