//! U-equivalence classes: finite families of equivalence relations closed
//! under binary meet.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::relation::{Carrier, EquivRel, ProductShape};
use crate::set::ElementSet;

/// A meet-closed family of equivalence relations on one carrier.
///
/// `members` is the full meet-closure of `generators`, materialized eagerly
/// and kept in a sorted set so iteration order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UeqClass {
    carrier: Carrier,
    generators: Vec<EquivRel>,
    members: BTreeSet<EquivRel>,
}

/// Centers whose blocks under `relation` cover the carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverWitness {
    pub relation: EquivRel,
    pub centers: Vec<usize>,
}

impl CoverWitness {
    pub fn covers(&self) -> bool {
        let centers = ElementSet::from_elements(self.relation.size(), self.centers.iter().copied());
        self.relation
            .saturate(&centers)
            .map(|s| s.is_full())
            .unwrap_or(false)
    }
}

/// A class on a subset, re-indexed to `0..|A|`, with its inclusion map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeSpace {
    pub class: UeqClass,
    /// `inclusion[i]` is the original element that `i` stands for.
    pub inclusion: Vec<usize>,
}

/// A product class with the shape that encodes its carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSpace {
    pub shape: ProductShape,
    pub class: UeqClass,
}

impl UeqClass {
    /// `⟨S⟩`: all finite meets of the generators.
    pub fn generate(carrier: Carrier, generators: Vec<EquivRel>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyGeneratorSet);
        }
        for g in &generators {
            carrier.ensure_same(g.carrier())?;
        }
        let distinct: Vec<EquivRel> = generators
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut members: BTreeSet<EquivRel> = distinct.iter().cloned().collect();
        // Every member is a meet of generators, so meeting the newest members
        // with generators until nothing new appears reaches the closure.
        let mut frontier: Vec<EquivRel> = distinct.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for m in &frontier {
                for g in &distinct {
                    let r = m.meet(g)?;
                    if !members.contains(&r) {
                        members.insert(r.clone());
                        next.push(r);
                    }
                }
            }
            frontier = next;
        }
        Ok(UeqClass {
            carrier,
            generators,
            members,
        })
    }

    /// Shorthand for a class generated by a single relation.
    pub fn singleton(rel: EquivRel) -> Self {
        let carrier = rel.carrier();
        Self::generate(carrier, vec![rel]).expect("one generator on its own carrier")
    }

    /// The class of all equivalence relations on the carrier.
    pub fn discrete(carrier: Carrier) -> Self {
        let all = crate::enumerate::all_partitions(carrier);
        Self::generate(carrier, all).expect("nonempty partition list")
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn generators(&self) -> &[EquivRel] {
        &self.generators
    }

    pub fn members(&self) -> &BTreeSet<EquivRel> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, u: &EquivRel) -> Result<bool> {
        self.carrier.ensure_same(u.carrier())?;
        Ok(self.members.contains(u))
    }

    /// Same member set, regardless of generators.
    pub fn same_members(&self, other: &UeqClass) -> bool {
        self.carrier == other.carrier && self.members == other.members
    }

    /// Every member of `self` is a member of `other`.
    pub fn is_subclass_of(&self, other: &UeqClass) -> bool {
        self.carrier == other.carrier && self.members.is_subset(&other.members)
    }

    /// The finest member: the meet of all generators.
    pub fn bottom(&self) -> EquivRel {
        let mut it = self.generators.iter();
        let first = it.next().expect("classes have generators").clone();
        it.fold(first, |acc, g| acc.meet(g).expect("same carrier"))
    }

    pub fn is_rich(&self) -> bool {
        self.members.contains(&EquivRel::full(self.carrier))
    }

    pub fn is_separated(&self) -> bool {
        self.bottom().is_delta()
    }

    /// Minimal covers by blocks, one center per block (its minimum).
    pub fn totally_bounded_witness(&self) -> Vec<CoverWitness> {
        self.members
            .iter()
            .map(|u| CoverWitness {
                relation: u.clone(),
                centers: u.representatives(),
            })
            .collect()
    }

    /// Class on `a` made of the traces of members, plus the inclusion map.
    pub fn relative(&self, a: &ElementSet) -> Result<RelativeSpace> {
        if a.capacity() != self.carrier.size() {
            return Err(Error::CarrierMismatch {
                left: self.carrier.size(),
                right: a.capacity(),
            });
        }
        if a.is_empty() {
            return Err(Error::EmptySubset);
        }
        let inclusion = a.to_vec();
        let class = induced_class(Carrier::new(inclusion.len())?, &[(&inclusion, self)])?;
        Ok(RelativeSpace { class, inclusion })
    }
}

/// `U^←`: the smallest class on `domain` making every `(map, class)` pair
/// U-equivalently continuous, generated by preimages of all members.
pub fn induced_class(domain: Carrier, maps: &[(&[usize], &UeqClass)]) -> Result<UeqClass> {
    if maps.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut generators = Vec::new();
    for (f, target) in maps {
        if f.len() != domain.size() {
            return Err(Error::NotTotal {
                expected: domain.size(),
                actual: f.len(),
            });
        }
        for v in target.members() {
            generators.push(v.preimage(f)?);
        }
    }
    UeqClass::generate(domain, generators)
}

/// The U-product of finitely many spaces.
pub fn product(factors: &[&UeqClass]) -> Result<ProductSpace> {
    let carriers: Vec<Carrier> = factors.iter().map(|c| c.carrier()).collect();
    let shape = ProductShape::new(&carriers)?;
    let projections = (0..factors.len())
        .map(|i| shape.projection(i))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(&[usize], &UeqClass)> = projections
        .iter()
        .zip(factors)
        .map(|(p, c)| (p.as_slice(), *c))
        .collect();
    let class = induced_class(shape.carrier(), &pairs)?;
    Ok(ProductSpace { shape, class })
}
