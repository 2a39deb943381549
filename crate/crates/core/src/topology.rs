//! Finite topologies, stored by minimal open neighborhoods.
//!
//! On a finite carrier every topology is determined by `N(x)`, the smallest
//! open set containing `x`. For a class-induced topology `N(x)` is the block
//! of `x` in the class's bottom relation, so most operations here reduce to
//! partition arithmetic.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use petgraph::unionfind::UnionFind;

use crate::class::UeqClass;
use crate::error::{Error, Result};
use crate::map::block_table;
use crate::relation::{Carrier, ProductShape};
use crate::set::ElementSet;

#[derive(Debug, Clone)]
pub struct FiniteTopology {
    carrier: Carrier,
    min_nbhd: Vec<ElementSet>,
    opens: OnceLock<Vec<ElementSet>>,
}

impl PartialEq for FiniteTopology {
    fn eq(&self, other: &Self) -> bool {
        self.carrier == other.carrier && self.min_nbhd == other.min_nbhd
    }
}

impl Eq for FiniteTopology {}

/// A topology on a subset, re-indexed, with the inclusion it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    pub topology: FiniteTopology,
    pub inclusion: Vec<usize>,
}

impl FiniteTopology {
    /// Validates that each `N(x)` contains `x` and is itself open.
    pub fn from_min_nbhds(carrier: Carrier, min_nbhd: Vec<ElementSet>) -> Result<Self> {
        if min_nbhd.len() != carrier.size() {
            return Err(Error::NotATopology(format!(
                "expected {} neighborhoods, got {}",
                carrier.size(),
                min_nbhd.len()
            )));
        }
        for (x, n) in min_nbhd.iter().enumerate() {
            if n.capacity() != carrier.size() {
                return Err(Error::CarrierMismatch {
                    left: carrier.size(),
                    right: n.capacity(),
                });
            }
            if !n.contains(x) {
                return Err(Error::NotATopology(format!(
                    "neighborhood of {x} does not contain it"
                )));
            }
            if let Some(y) = n.iter().find(|&y| !min_nbhd[y].is_subset(n)) {
                return Err(Error::NotATopology(format!(
                    "neighborhood of {x} contains {y} but not its neighborhood"
                )));
            }
        }
        Ok(Self::new_unchecked(carrier, min_nbhd))
    }

    fn new_unchecked(carrier: Carrier, min_nbhd: Vec<ElementSet>) -> Self {
        FiniteTopology {
            carrier,
            min_nbhd,
            opens: OnceLock::new(),
        }
    }

    /// Builds a topology from its full open-set family, checking the axioms.
    pub fn from_open_sets(carrier: Carrier, opens: &[ElementSet]) -> Result<Self> {
        let n = carrier.size();
        if let Some(bad) = opens.iter().find(|g| g.capacity() != n) {
            return Err(Error::CarrierMismatch {
                left: n,
                right: bad.capacity(),
            });
        }
        let family: BTreeSet<&ElementSet> = opens.iter().collect();
        let empty = carrier.empty_set();
        let full = carrier.full_set();
        if !family.contains(&empty) || !family.contains(&full) {
            return Err(Error::NotATopology(
                "open sets must include the empty set and the carrier".into(),
            ));
        }
        for a in &family {
            for b in &family {
                if !family.contains(&a.union(b)) || !family.contains(&a.intersection(b)) {
                    return Err(Error::NotATopology(format!(
                        "open sets not closed under union/intersection: {a:?}, {b:?}"
                    )));
                }
            }
        }
        let min_nbhd = carrier
            .elements()
            .map(|x| {
                family
                    .iter()
                    .filter(|g| g.contains(x))
                    .fold(full.clone(), |acc, g| acc.intersection(g))
            })
            .collect();
        Ok(Self::new_unchecked(carrier, min_nbhd))
    }

    /// Topology generated by a sub-base: `N(x)` is the intersection of every
    /// sub-base set containing `x`.
    pub fn from_subbase(carrier: Carrier, subbase: &[ElementSet]) -> Result<Self> {
        let full = carrier.full_set();
        if let Some(bad) = subbase.iter().find(|g| g.capacity() != carrier.size()) {
            return Err(Error::CarrierMismatch {
                left: carrier.size(),
                right: bad.capacity(),
            });
        }
        let min_nbhd = carrier
            .elements()
            .map(|x| {
                subbase
                    .iter()
                    .filter(|s| s.contains(x))
                    .fold(full.clone(), |acc, s| acc.intersection(s))
            })
            .collect();
        Ok(Self::new_unchecked(carrier, min_nbhd))
    }

    pub fn discrete(carrier: Carrier) -> Self {
        let n = carrier.size();
        Self::new_unchecked(
            carrier,
            carrier.elements().map(|x| ElementSet::singleton(n, x)).collect(),
        )
    }

    pub fn indiscrete(carrier: Carrier) -> Self {
        Self::new_unchecked(carrier, vec![carrier.full_set(); carrier.size()])
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn min_nbhd(&self, x: usize) -> &ElementSet {
        &self.min_nbhd[x]
    }

    pub fn min_nbhds(&self) -> &[ElementSet] {
        &self.min_nbhd
    }

    /// Every open set, sorted. Exponential in the number of distinct
    /// neighborhoods; computed once.
    pub fn opens(&self) -> &[ElementSet] {
        self.opens.get_or_init(|| {
            let mut family: BTreeSet<ElementSet> = BTreeSet::new();
            family.insert(self.carrier.empty_set());
            let generators: BTreeSet<&ElementSet> = self.min_nbhd.iter().collect();
            for g in generators {
                let grown: Vec<ElementSet> = family.iter().map(|s| s.union(g)).collect();
                family.extend(grown);
            }
            family.into_iter().collect()
        })
    }

    pub fn is_open(&self, g: &ElementSet) -> bool {
        g.iter().all(|x| self.min_nbhd[x].is_subset(g))
    }

    pub fn is_closed(&self, s: &ElementSet) -> bool {
        self.is_open(&s.complement())
    }

    /// `{x | N(x) ∩ s ≠ ∅}`.
    pub fn closure(&self, s: &ElementSet) -> ElementSet {
        ElementSet::from_elements(
            self.carrier.size(),
            self.carrier
                .elements()
                .filter(|&x| self.min_nbhd[x].intersects(s)),
        )
    }

    pub fn interior(&self, s: &ElementSet) -> ElementSet {
        ElementSet::from_elements(
            self.carrier.size(),
            s.iter().filter(|&x| self.min_nbhd[x].is_subset(s)),
        )
    }

    pub fn is_dense(&self, d: &ElementSet) -> bool {
        self.closure(d).is_full()
    }

    /// Connected iff the graph linking `x` to every point of `N(x)` is.
    pub fn is_connected(&self) -> bool {
        let n = self.carrier.size();
        let mut uf = UnionFind::<usize>::new(n);
        for x in 0..n {
            for y in self.min_nbhd[x].iter() {
                uf.union(x, y);
            }
        }
        (1..n).all(|x| uf.equiv(0, x))
    }

    /// Specialization preorder: `x ≤ y` iff `x ∈ cl{y}` iff `y ∈ N(x)`.
    /// Returns the pairs with `x ≠ y`, ordered lexicographically.
    pub fn specialization_edges(&self) -> Vec<(usize, usize)> {
        self.carrier
            .elements()
            .flat_map(|x| {
                self.min_nbhd[x]
                    .iter()
                    .filter(move |&y| y != x)
                    .map(move |y| (x, y))
            })
            .collect()
    }

    /// Trace topology on `y`, re-indexed to `0..|y|`.
    pub fn subspace(&self, y: &ElementSet) -> Result<Subspace> {
        if y.capacity() != self.carrier.size() {
            return Err(Error::CarrierMismatch {
                left: self.carrier.size(),
                right: y.capacity(),
            });
        }
        if y.is_empty() {
            return Err(Error::EmptySubset);
        }
        let inclusion = y.to_vec();
        let mut position = vec![usize::MAX; self.carrier.size()];
        for (i, &x) in inclusion.iter().enumerate() {
            position[x] = i;
        }
        let m = inclusion.len();
        let min_nbhd = inclusion
            .iter()
            .map(|&x| {
                ElementSet::from_elements(
                    m,
                    self.min_nbhd[x].intersection(y).iter().map(|z| position[z]),
                )
            })
            .collect();
        Ok(Subspace {
            topology: Self::new_unchecked(Carrier::new(m)?, min_nbhd),
            inclusion,
        })
    }

    /// Same carrier and same minimal neighborhoods.
    pub fn equals(&self, other: &FiniteTopology) -> Result<bool> {
        self.carrier.ensure_same(other.carrier)?;
        Ok(self.min_nbhd == other.min_nbhd)
    }

    /// Transports this topology along a bijection `f` onto `0..n`.
    pub fn transport(&self, f: &[usize]) -> Result<FiniteTopology> {
        let n = self.carrier.size();
        if f.len() != n {
            return Err(Error::NotTotal {
                expected: n,
                actual: f.len(),
            });
        }
        let mut inv = vec![usize::MAX; n];
        for (x, &y) in f.iter().enumerate() {
            self.carrier.check(y)?;
            if inv[y] != usize::MAX {
                return Err(Error::NotATopology("transport map is not a bijection".into()));
            }
            inv[y] = x;
        }
        let min_nbhd = (0..n)
            .map(|y| ElementSet::from_elements(n, self.min_nbhd[inv[y]].iter().map(|z| f[z])))
            .collect();
        Ok(Self::new_unchecked(self.carrier, min_nbhd))
    }
}

/// `T_U`: neighborhoods are the blocks of the bottom relation.
pub fn induce_topology(space: &UeqClass) -> FiniteTopology {
    FiniteTopology::new_unchecked(space.carrier(), block_table(&space.bottom()))
}

pub fn topologies_equal(a: &FiniteTopology, b: &FiniteTopology) -> Result<bool> {
    a.equals(b)
}

pub fn subspace_topology(t: &FiniteTopology, y: &ElementSet) -> Result<Subspace> {
    t.subspace(y)
}

/// Product topology on the mixed-radix product carrier.
pub fn product_topology(factors: &[&FiniteTopology]) -> Result<(ProductShape, FiniteTopology)> {
    let carriers: Vec<Carrier> = factors.iter().map(|t| t.carrier()).collect();
    let shape = ProductShape::new(&carriers)?;
    let size = shape.carrier().size();
    let min_nbhd = shape
        .carrier()
        .elements()
        .map(|t| {
            let coords = shape.decode(t);
            ElementSet::from_elements(
                size,
                (0..size).filter(|&s| {
                    shape
                        .decode(s)
                        .iter()
                        .zip(&coords)
                        .zip(factors)
                        .all(|((&si, &ti), f)| f.min_nbhd(ti).contains(si))
                }),
            )
        })
        .collect();
    Ok((shape.clone(), FiniteTopology::new_unchecked(shape.carrier(), min_nbhd)))
}

/// Continuity between finite topologies: `f(N(x)) ⊆ N(f(x))` for every `x`.
pub fn is_continuous_between(
    source: &FiniteTopology,
    target: &FiniteTopology,
    f: &[usize],
) -> Result<bool> {
    check_map(source, target, f)?;
    Ok(source.carrier().elements().all(|x| {
        source
            .min_nbhd(x)
            .iter()
            .all(|z| target.min_nbhd(f[x]).contains(f[z]))
    }))
}

/// Injective, continuous, and a homeomorphism onto its image with the
/// subspace topology.
pub fn is_topological_embedding(
    source: &FiniteTopology,
    target: &FiniteTopology,
    f: &[usize],
) -> Result<bool> {
    check_map(source, target, f)?;
    let image = ElementSet::from_elements(target.carrier().size(), f.iter().copied());
    if image.len() != f.len() {
        return Ok(false);
    }
    if !is_continuous_between(source, target, f)? {
        return Ok(false);
    }
    let sub = target.subspace(&image)?;
    let mut position = vec![usize::MAX; target.carrier().size()];
    for (i, &y) in sub.inclusion.iter().enumerate() {
        position[y] = i;
    }
    let onto: Vec<usize> = f.iter().map(|&y| position[y]).collect();
    source.transport(&onto)?.equals(&sub.topology)
}

fn check_map(source: &FiniteTopology, target: &FiniteTopology, f: &[usize]) -> Result<()> {
    if f.len() != source.carrier().size() {
        return Err(Error::NotTotal {
            expected: source.carrier().size(),
            actual: f.len(),
        });
    }
    f.iter().try_for_each(|&y| target.carrier().check(y))
}

/// U-equivalent density, checked against topological density.
pub fn is_dense(space: &UeqClass, d: &ElementSet) -> Result<bool> {
    if d.capacity() != space.carrier().size() {
        return Err(Error::CarrierMismatch {
            left: space.carrier().size(),
            right: d.capacity(),
        });
    }
    let by_def = space.members().iter().all(|u| {
        space
            .carrier()
            .elements()
            .all(|x| d.iter().any(|a| u.related(a, x)))
    });
    let by_closure = induce_topology(space).is_dense(d);
    if by_def != by_closure {
        return Err(Error::CharacterizationMismatch(format!(
            "density: quantifier says {by_def}, closure says {by_closure}"
        )));
    }
    Ok(by_def)
}

/// Connectedness of `T_U`, checked against `bottom = X²`.
pub fn is_connected(space: &UeqClass) -> Result<bool> {
    let topological = induce_topology(space).is_connected();
    let structural = space.bottom().is_full();
    if topological != structural {
        return Err(Error::CharacterizationMismatch(format!(
            "connectedness: topology says {topological}, bottom relation says {structural}"
        )));
    }
    Ok(topological)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::EquivRel;

    fn c(n: usize) -> Carrier {
        Carrier::new(n).unwrap()
    }

    fn rel(n: usize, blocks: &[&[usize]]) -> EquivRel {
        EquivRel::from_blocks(c(n), blocks.iter().map(|b| b.iter().copied())).unwrap()
    }

    fn set(n: usize, v: &[usize]) -> ElementSet {
        ElementSet::from_elements(n, v.iter().copied())
    }

    fn two_blocks() -> UeqClass {
        UeqClass::singleton(rel(4, &[&[0, 1], &[2, 3]]))
    }

    #[test]
    fn induced_examples() {
        let d = induce_topology(&UeqClass::singleton(EquivRel::delta(c(3))));
        assert_eq!(d, FiniteTopology::discrete(c(3)));
        assert_eq!(d.opens().len(), 8);
        let i = induce_topology(&UeqClass::singleton(EquivRel::full(c(3))));
        assert_eq!(i.opens().len(), 2);
        let t = induce_topology(&two_blocks());
        let mut opens: Vec<Vec<usize>> = t.opens().iter().map(ElementSet::to_vec).collect();
        opens.sort();
        assert_eq!(opens, vec![vec![], vec![0, 1], vec![0, 1, 2, 3], vec![2, 3]]);
    }

    #[test]
    fn open_and_closure() {
        let t = induce_topology(&two_blocks());
        assert!(t.is_open(&set(4, &[])));
        assert!(t.is_open(&set(4, &[0, 1, 2, 3])));
        assert!(!t.is_open(&set(4, &[0])));
        assert!(t.closure(&set(4, &[])).is_empty());
        assert_eq!(t.closure(&set(4, &[0])).to_vec(), vec![0, 1]);
        let i = FiniteTopology::indiscrete(c(3));
        assert!(i.closure(&set(3, &[2])).is_full());
    }

    #[test]
    fn density_and_connectedness() {
        let cls = two_blocks();
        assert!(is_dense(&cls, &set(4, &[0, 1, 2, 3])).unwrap());
        assert!(is_dense(&cls, &set(4, &[0, 2])).unwrap());
        let sep = UeqClass::singleton(EquivRel::delta(c(3)));
        assert!(!is_dense(&sep, &set(3, &[0, 1])).unwrap());

        assert!(is_connected(&UeqClass::singleton(EquivRel::full(c(3)))).unwrap());
        assert!(!is_connected(&sep).unwrap());
        let cross = UeqClass::generate(
            c(4),
            vec![rel(4, &[&[0, 1], &[2, 3]]), rel(4, &[&[0, 2], &[1, 3]])],
        )
        .unwrap();
        assert!(!is_connected(&cross).unwrap());
    }

    #[test]
    fn subspaces() {
        let t = induce_topology(&two_blocks());
        assert_eq!(t.subspace(&set(4, &[0, 1, 2, 3])).unwrap().topology, t);
        let d = FiniteTopology::discrete(c(4));
        assert_eq!(
            d.subspace(&set(4, &[1, 3])).unwrap().topology,
            FiniteTopology::discrete(c(2))
        );
        let s = t.subspace(&set(4, &[0, 2])).unwrap();
        assert_eq!(s.topology, FiniteTopology::discrete(c(2)));
        assert_eq!(s.inclusion, vec![0, 2]);
        assert_eq!(t.subspace(&set(4, &[])), Err(Error::EmptySubset));
    }

    #[test]
    fn products() {
        let d = FiniteTopology::discrete(c(2));
        let i = FiniteTopology::indiscrete(c(2));
        assert_eq!(product_topology(&[&d, &d]).unwrap().1, FiniteTopology::discrete(c(4)));
        assert_eq!(product_topology(&[&i, &i]).unwrap().1, FiniteTopology::indiscrete(c(4)));
        let (shape, p) = product_topology(&[&d, &i]).unwrap();
        for t in 0..4 {
            let a = shape.decode(t)[0];
            let expect = set(4, &[shape.encode(&[a, 0]).unwrap(), shape.encode(&[a, 1]).unwrap()]);
            assert_eq!(p.min_nbhd(t), &expect);
        }
        let big = FiniteTopology::discrete(c(64));
        assert!(matches!(
            product_topology(&[&big, &big, &big]),
            Err(Error::TooManyFactors { .. })
        ));
    }

    #[test]
    fn equality() {
        let t = induce_topology(&two_blocks());
        assert!(topologies_equal(&t, &t).unwrap());
        assert!(!topologies_equal(&FiniteTopology::discrete(c(2)), &FiniteTopology::indiscrete(c(2))).unwrap());
        assert!(topologies_equal(&t, &FiniteTopology::discrete(c(3))).is_err());
        let from_opens = FiniteTopology::from_open_sets(c(4), t.opens()).unwrap();
        assert!(topologies_equal(&t, &from_opens).unwrap());
    }

    #[test]
    fn axioms_are_checked() {
        let sierpinski = [set(2, &[]), set(2, &[0]), set(2, &[0, 1])];
        let t = FiniteTopology::from_open_sets(c(2), &sierpinski).unwrap();
        assert_eq!(t.min_nbhd(1), &set(2, &[0, 1]));
        assert!(FiniteTopology::from_open_sets(c(2), &[set(2, &[0]), set(2, &[0, 1])]).is_err());
        let not_closed = [set(3, &[]), set(3, &[0]), set(3, &[1]), set(3, &[0, 1, 2])];
        assert!(FiniteTopology::from_open_sets(c(3), &not_closed).is_err());
        assert!(FiniteTopology::from_min_nbhds(c(2), vec![set(2, &[1]), set(2, &[1])]).is_err());
        assert!(
            FiniteTopology::from_min_nbhds(c(3), vec![set(3, &[0, 1]), set(3, &[1, 2]), set(3, &[2])])
                .is_err()
        );
    }

    #[test]
    fn specialization() {
        assert!(FiniteTopology::discrete(c(3)).specialization_edges().is_empty());
        assert_eq!(
            FiniteTopology::indiscrete(c(2)).specialization_edges(),
            vec![(0, 1), (1, 0)]
        );
    }

    #[test]
    fn maps_between_topologies() {
        let d = FiniteTopology::discrete(c(2));
        let i = FiniteTopology::indiscrete(c(2));
        assert!(is_continuous_between(&d, &i, &[0, 1]).unwrap());
        assert!(!is_continuous_between(&i, &d, &[0, 1]).unwrap());
        assert!(!is_topological_embedding(&d, &i, &[0, 1]).unwrap());
        let t = induce_topology(&two_blocks());
        assert!(is_topological_embedding(&d, &t, &[0, 2]).unwrap());
        assert!(!is_topological_embedding(&d, &t, &[0, 1]).unwrap());
    }
}
