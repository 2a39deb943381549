//! Equivalence relations on a finite carrier, stored as canonical partitions.
//!
//! Every relation is kept as a `block_id` vector where each element maps to the
//! minimum element of its block. Two relations are equal as pair sets exactly
//! when their vectors are equal, so derived `Eq`/`Hash`/`Ord` are mathematical
//! equality.

use std::collections::HashMap;
use std::fmt;

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::set::ElementSet;

/// A finite ground set `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Carrier(usize);

impl Carrier {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyCarrier);
        }
        Ok(Carrier(size))
    }

    pub fn size(self) -> usize {
        self.0
    }

    pub fn elements(self) -> std::ops::Range<usize> {
        0..self.0
    }

    pub fn check(self, x: usize) -> Result<()> {
        if x < self.0 {
            Ok(())
        } else {
            Err(Error::Index {
                index: x,
                size: self.0,
            })
        }
    }

    pub fn ensure_same(self, other: Carrier) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::CarrierMismatch {
                left: self.0,
                right: other.0,
            })
        }
    }

    pub fn empty_set(self) -> ElementSet {
        ElementSet::empty(self.0)
    }

    pub fn full_set(self) -> ElementSet {
        ElementSet::full(self.0)
    }
}

/// An equivalence relation in canonical partition form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EquivRel {
    block_id: Vec<usize>,
}

/// Relabels an arbitrary labelling so each element points at the minimum of
/// its class.
fn canonicalize<L: std::hash::Hash + Eq>(labels: impl IntoIterator<Item = L>) -> Vec<usize> {
    let mut first: HashMap<L, usize> = HashMap::new();
    labels
        .into_iter()
        .enumerate()
        .map(|(x, label)| *first.entry(label).or_insert(x))
        .collect()
}

impl EquivRel {
    /// Builds the relation whose blocks are exactly `blocks`.
    pub fn from_blocks<B, I>(carrier: Carrier, blocks: B) -> Result<Self>
    where
        B: IntoIterator<Item = I>,
        I: IntoIterator<Item = usize>,
    {
        let n = carrier.size();
        let mut label = vec![usize::MAX; n];
        for (b, block) in blocks.into_iter().enumerate() {
            for x in block {
                carrier.check(x)?;
                if label[x] != usize::MAX {
                    return Err(Error::Overlap { element: x });
                }
                label[x] = b;
            }
        }
        if let Some(x) = label.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Coverage { element: x });
        }
        Ok(EquivRel {
            block_id: canonicalize(label),
        })
    }

    /// Smallest equivalence relation containing every pair.
    pub fn from_pairs<I>(carrier: Carrier, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut uf = UnionFind::<usize>::new(carrier.size());
        for (x, y) in pairs {
            carrier.check(x)?;
            carrier.check(y)?;
            uf.union(x, y);
        }
        Ok(EquivRel {
            block_id: canonicalize(carrier.elements().map(|x| uf.find(x))),
        })
    }

    /// Relation identifying `x` and `y` iff `labels[x] == labels[y]`.
    pub fn from_labels<L: std::hash::Hash + Eq>(labels: impl IntoIterator<Item = L>) -> Result<Self> {
        let block_id = canonicalize(labels);
        if block_id.is_empty() {
            return Err(Error::EmptyCarrier);
        }
        Ok(EquivRel { block_id })
    }

    /// The diagonal ΔX.
    pub fn delta(carrier: Carrier) -> Self {
        EquivRel {
            block_id: carrier.elements().collect(),
        }
    }

    /// The full relation X².
    pub fn full(carrier: Carrier) -> Self {
        EquivRel {
            block_id: vec![0; carrier.size()],
        }
    }

    pub fn carrier(&self) -> Carrier {
        Carrier(self.block_id.len())
    }

    pub fn size(&self) -> usize {
        self.block_id.len()
    }

    pub fn block_ids(&self) -> &[usize] {
        &self.block_id
    }

    /// Label (block minimum) of `x`. Panics if `x` is out of range.
    pub fn label(&self, x: usize) -> usize {
        self.block_id[x]
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.block_id[x] == self.block_id[y]
    }

    pub fn is_delta(&self) -> bool {
        self.block_id.iter().enumerate().all(|(x, &b)| x == b)
    }

    pub fn is_full(&self) -> bool {
        self.block_id.iter().all(|&b| b == 0)
    }

    pub fn block_count(&self) -> usize {
        self.block_id
            .iter()
            .enumerate()
            .filter(|&(x, &b)| x == b)
            .count()
    }

    /// Block minima in increasing order.
    pub fn representatives(&self) -> Vec<usize> {
        self.block_id
            .iter()
            .enumerate()
            .filter(|&(x, &b)| x == b)
            .map(|(x, _)| x)
            .collect()
    }

    /// Blocks as sorted element lists, ordered by their minimum.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut index = vec![usize::MAX; self.size()];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (x, &b) in self.block_id.iter().enumerate() {
            if index[b] == usize::MAX {
                index[b] = out.len();
                out.push(Vec::new());
            }
            out[index[b]].push(x);
        }
        out
    }

    /// Intersection of two relations.
    pub fn meet(&self, other: &EquivRel) -> Result<EquivRel> {
        self.carrier().ensure_same(other.carrier())?;
        Ok(EquivRel {
            block_id: canonicalize(self.block_id.iter().zip(&other.block_id)),
        })
    }

    /// `U[x]`, the block containing `x`.
    pub fn block_of(&self, x: usize) -> Result<ElementSet> {
        self.carrier().check(x)?;
        let b = self.block_id[x];
        Ok(ElementSet::from_elements(
            self.size(),
            (0..self.size()).filter(|&y| self.block_id[y] == b),
        ))
    }

    /// `U[A]`, the union of the blocks meeting `a`.
    pub fn saturate(&self, a: &ElementSet) -> Result<ElementSet> {
        if a.capacity() != self.size() {
            return Err(Error::CarrierMismatch {
                left: self.size(),
                right: a.capacity(),
            });
        }
        let mut hit = vec![false; self.size()];
        for x in a.iter() {
            hit[self.block_id[x]] = true;
        }
        Ok(ElementSet::from_elements(
            self.size(),
            (0..self.size()).filter(|&y| hit[self.block_id[y]]),
        ))
    }

    /// Whether `self ⊆ other` as pair sets.
    pub fn refines(&self, other: &EquivRel) -> Result<bool> {
        self.carrier().ensure_same(other.carrier())?;
        Ok(self
            .block_id
            .iter()
            .enumerate()
            .all(|(x, &b)| other.block_id[x] == other.block_id[b]))
    }

    /// Pairs `(x, y)` with `x < y` in the relation.
    pub fn off_diagonal_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.size();
        (0..n).flat_map(move |x| {
            (x + 1..n)
                .filter(move |&y| self.block_id[x] == self.block_id[y])
                .map(move |y| (x, y))
        })
    }

    /// `(f×f)⁻¹(self)`: relates `x, y` iff `f(x), f(y)` are related.
    pub fn preimage(&self, f: &[usize]) -> Result<EquivRel> {
        if f.is_empty() {
            return Err(Error::EmptyCarrier);
        }
        for &y in f {
            self.carrier().check(y)?;
        }
        Ok(EquivRel {
            block_id: canonicalize(f.iter().map(|&y| self.block_id[y])),
        })
    }

    /// Trace of the relation on `a`, re-indexed to `0..|a|` in increasing order.
    pub fn restrict(&self, a: &ElementSet) -> Result<EquivRel> {
        let inclusion = a.to_vec();
        self.preimage(&inclusion)
    }
}

impl fmt::Debug for EquivRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.blocks()).finish()
    }
}

/// Mixed-radix encoding of a finite product, most significant factor first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductShape {
    radices: Vec<usize>,
}

/// Largest product carrier the library will build.
pub const MAX_PRODUCT_SIZE: usize = 4096;

impl ProductShape {
    pub fn new(factors: &[Carrier]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let mut size: usize = 1;
        for c in factors {
            size = size.saturating_mul(c.size());
            if size > MAX_PRODUCT_SIZE {
                return Err(Error::TooManyFactors {
                    size,
                    cap: MAX_PRODUCT_SIZE,
                });
            }
        }
        Ok(ProductShape {
            radices: factors.iter().map(|c| c.size()).collect(),
        })
    }

    pub fn factor_count(&self) -> usize {
        self.radices.len()
    }

    pub fn factor(&self, i: usize) -> Carrier {
        Carrier(self.radices[i])
    }

    pub fn carrier(&self) -> Carrier {
        Carrier(self.radices.iter().product())
    }

    pub fn encode(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.radices.len() {
            return Err(Error::CarrierMismatch {
                left: self.radices.len(),
                right: coords.len(),
            });
        }
        let mut code = 0;
        for (&c, &r) in coords.iter().zip(&self.radices) {
            Carrier(r).check(c)?;
            code = code * r + c;
        }
        Ok(code)
    }

    pub fn decode(&self, mut code: usize) -> Vec<usize> {
        let mut coords = vec![0; self.radices.len()];
        for (slot, &r) in coords.iter_mut().zip(&self.radices).rev() {
            *slot = code % r;
            code /= r;
        }
        coords
    }

    /// The `i`-th projection as a value table over the product carrier.
    pub fn projection(&self, i: usize) -> Result<Vec<usize>> {
        if i >= self.radices.len() {
            return Err(Error::Index {
                index: i,
                size: self.radices.len(),
            });
        }
        let stride: usize = self.radices[i + 1..].iter().product();
        let r = self.radices[i];
        Ok(self.carrier().elements().map(|t| t / stride % r).collect())
    }

    /// `(π_i×π_i)⁻¹(u)` on the product carrier.
    pub fn lift(&self, i: usize, u: &EquivRel) -> Result<EquivRel> {
        let pi = self.projection(i)?;
        self.factor(i).ensure_same(u.carrier())?;
        u.preimage(&pi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: usize) -> Carrier {
        Carrier::new(n).unwrap()
    }

    fn rel(n: usize, blocks: &[&[usize]]) -> EquivRel {
        EquivRel::from_blocks(c(n), blocks.iter().map(|b| b.iter().copied())).unwrap()
    }

    #[test]
    fn from_blocks_canonicalizes() {
        assert_eq!(rel(4, &[&[0, 1], &[2, 3]]).block_ids(), &[0, 0, 2, 2]);
        assert_eq!(rel(3, &[&[0], &[1], &[2]]).block_ids(), &[0, 1, 2]);
        assert_eq!(rel(4, &[&[1, 3], &[2, 0]]).block_ids(), &[0, 1, 0, 1]);
    }

    #[test]
    fn from_blocks_errors() {
        assert_eq!(
            EquivRel::from_blocks(c(3), vec![vec![0, 1], vec![1, 2]]),
            Err(Error::Overlap { element: 1 })
        );
        assert_eq!(
            EquivRel::from_blocks(c(3), vec![vec![0, 1]]),
            Err(Error::Coverage { element: 2 })
        );
        assert!(matches!(
            EquivRel::from_blocks(c(2), vec![vec![0, 1, 5]]),
            Err(Error::Index { index: 5, .. })
        ));
        assert_eq!(Carrier::new(0), Err(Error::EmptyCarrier));
    }

    #[test]
    fn from_pairs_closure() {
        assert_eq!(EquivRel::from_pairs(c(3), []).unwrap(), EquivRel::delta(c(3)));
        assert_eq!(
            EquivRel::from_pairs(c(4), [(0, 1), (1, 2)]).unwrap(),
            rel(4, &[&[0, 1, 2], &[3]])
        );
        assert_eq!(EquivRel::from_pairs(c(2), [(0, 1)]).unwrap(), EquivRel::full(c(2)));
        assert!(matches!(
            EquivRel::from_pairs(c(2), [(0, 2)]),
            Err(Error::Index { index: 2, .. })
        ));
    }

    #[test]
    fn delta_and_full() {
        assert_eq!(EquivRel::delta(c(1)), EquivRel::full(c(1)));
        assert_eq!(EquivRel::full(c(3)).block_ids(), &[0, 0, 0]);
        assert_eq!(EquivRel::delta(c(4)).block_count(), 4);
        assert_eq!(EquivRel::full(c(5)).blocks(), vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn meet_examples() {
        let a = rel(4, &[&[0, 1], &[2, 3]]);
        let b = rel(4, &[&[0, 1, 2], &[3]]);
        assert_eq!(a.meet(&b).unwrap(), rel(4, &[&[0, 1], &[2], &[3]]));
        assert_eq!(a.meet(&a).unwrap(), a);
        assert_eq!(a.meet(&EquivRel::delta(c(4))).unwrap(), EquivRel::delta(c(4)));
        assert_eq!(
            a.meet(&EquivRel::delta(c(3))),
            Err(Error::CarrierMismatch { left: 4, right: 3 })
        );
    }

    #[test]
    fn blocks_and_saturation() {
        let a = rel(4, &[&[0, 1], &[2, 3]]);
        assert_eq!(a.block_of(2).unwrap().to_vec(), vec![2, 3]);
        assert_eq!(EquivRel::delta(c(4)).block_of(1).unwrap().to_vec(), vec![1]);
        assert!(EquivRel::full(c(4)).block_of(3).unwrap().is_full());
        assert!(a.block_of(4).is_err());
        let s = |v: &[usize]| ElementSet::from_elements(4, v.iter().copied());
        assert_eq!(a.saturate(&s(&[0])).unwrap().to_vec(), vec![0, 1]);
        assert!(a.saturate(&s(&[])).unwrap().is_empty());
        assert_eq!(a.saturate(&s(&[1, 2])).unwrap().to_vec(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn refinement() {
        let u = rel(4, &[&[0, 1], &[2, 3]]);
        assert!(EquivRel::delta(c(4)).refines(&u).unwrap());
        assert!(u.refines(&EquivRel::full(c(4))).unwrap());
        assert!(!u.refines(&rel(4, &[&[0, 2], &[1, 3]])).unwrap());
    }

    #[test]
    fn preimage_examples() {
        let v = EquivRel::delta(c(2));
        assert_eq!(v.preimage(&[0, 0, 1]).unwrap(), rel(3, &[&[0, 1], &[2]]));
        assert!(EquivRel::full(c(2)).preimage(&[1, 0, 1]).unwrap().is_full());
        let u = rel(4, &[&[0, 3], &[1], &[2]]);
        assert_eq!(u.preimage(&[0, 1, 2, 3]).unwrap(), u);
        assert!(v.preimage(&[0, 2]).is_err());
    }

    #[test]
    fn product_shape_round_trip() {
        let shape = ProductShape::new(&[c(2), c(3), c(2)]).unwrap();
        assert_eq!(shape.carrier().size(), 12);
        for t in 0..12 {
            assert_eq!(shape.encode(&shape.decode(t)).unwrap(), t);
        }
        assert_eq!(shape.decode(1), vec![0, 0, 1]);
        assert_eq!(shape.encode(&[1, 0, 0]).unwrap(), 6);
        assert!(matches!(
            ProductShape::new(&[c(64), c(65)]),
            Err(Error::TooManyFactors { .. })
        ));
        assert_eq!(ProductShape::new(&[]), Err(Error::EmptyFamily));
    }

    #[test]
    fn product_lift_examples() {
        let shape = ProductShape::new(&[c(2), c(2)]).unwrap();
        // tuples (0,0)=0 (0,1)=1 (1,0)=2 (1,1)=3
        assert_eq!(
            shape.lift(0, &EquivRel::delta(c(2))).unwrap(),
            rel(4, &[&[0, 1], &[2, 3]])
        );
        assert!(shape.lift(1, &EquivRel::full(c(2))).unwrap().is_full());
        let single = ProductShape::new(&[c(3)]).unwrap();
        let u = rel(3, &[&[0, 2], &[1]]);
        assert_eq!(single.lift(0, &u).unwrap(), u);
    }
}
