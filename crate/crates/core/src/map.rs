//! Maps between U-equivalence spaces and the predicates on them.
//!
//! Every quantifier is evaluated exhaustively over members and elements.

use crate::class::{induced_class, UeqClass};
use crate::error::{Error, Result};
use crate::relation::{Carrier, EquivRel};
use crate::set::ElementSet;

/// A total function between the carriers of two spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceMap {
    source: UeqClass,
    target: UeqClass,
    values: Vec<usize>,
}

impl SpaceMap {
    pub fn new(source: UeqClass, target: UeqClass, values: Vec<usize>) -> Result<Self> {
        if values.len() != source.carrier().size() {
            return Err(Error::NotTotal {
                expected: source.carrier().size(),
                actual: values.len(),
            });
        }
        for &y in &values {
            target.carrier().check(y)?;
        }
        Ok(SpaceMap {
            source,
            target,
            values,
        })
    }

    /// The identity on a space.
    pub fn identity(space: UeqClass) -> Self {
        let values = space.carrier().elements().collect();
        SpaceMap {
            source: space.clone(),
            target: space,
            values,
        }
    }

    pub fn source(&self) -> &UeqClass {
        &self.source
    }

    pub fn target(&self) -> &UeqClass {
        &self.target
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    pub fn image(&self) -> ElementSet {
        ElementSet::from_elements(self.target.carrier().size(), self.values.iter().copied())
    }

    /// `f(A)` for a subset of the source.
    pub fn image_of(&self, a: &ElementSet) -> ElementSet {
        ElementSet::from_elements(
            self.target.carrier().size(),
            a.iter().map(|x| self.values[x]),
        )
    }

    pub fn is_injective(&self) -> bool {
        self.image().len() == self.values.len()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().is_full()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SpaceMap) -> Result<SpaceMap> {
        self.target.carrier().ensure_same(other.source.carrier())?;
        Ok(SpaceMap {
            source: self.source.clone(),
            target: other.target.clone(),
            values: self.values.iter().map(|&y| other.values[y]).collect(),
        })
    }

    /// The inverse of a bijection, with source and target swapped.
    pub fn inverse(&self) -> Option<SpaceMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.values.len()];
        for (x, &y) in self.values.iter().enumerate() {
            inv[y] = x;
        }
        Some(SpaceMap {
            source: self.target.clone(),
            target: self.source.clone(),
            values: inv,
        })
    }

    /// Preimages of target members all lie in the source class.
    pub fn is_continuous(&self) -> bool {
        self.target.members().iter().all(|v| {
            let pre = v.preimage(&self.values).expect("validated map");
            self.source.members().contains(&pre)
        })
    }

    /// `∀U ∃V ∀x: V[f(x)] ⊆ f(U[x])`.
    pub fn is_open_map(&self) -> bool {
        let n = self.source.carrier().size();
        let target_blocks: Vec<Vec<ElementSet>> = self
            .target
            .members()
            .iter()
            .map(|v| block_table(v))
            .collect();
        self.source.members().iter().all(|u| {
            let u_blocks = block_table(u);
            let images: Vec<ElementSet> = (0..n).map(|x| self.image_of(&u_blocks[x])).collect();
            target_blocks
                .iter()
                .any(|vb| (0..n).all(|x| vb[self.values[x]].is_subset(&images[x])))
        })
    }

    /// `∀y ∀V ∃x: y ∈ V[f(x)]`.
    pub fn is_u_surjection(&self) -> bool {
        let m = self.target.carrier().size();
        self.target.members().iter().all(|v| {
            (0..m).all(|y| self.values.iter().any(|&fx| v.related(fx, y)))
        })
    }

    /// Bijective with both directions U-equivalently continuous.
    pub fn is_u_equivalence(&self) -> bool {
        match self.inverse() {
            Some(inv) => self.is_continuous() && inv.is_continuous(),
            None => false,
        }
    }

    /// Definitional embedding test: injective, and a U-equivalence onto the
    /// image with its relative class.
    pub fn is_u_embedding_by_definition(&self) -> bool {
        if !self.is_injective() {
            return false;
        }
        let rel = self
            .target
            .relative(&self.image())
            .expect("image of a map on a nonempty carrier is nonempty");
        let mut position = vec![usize::MAX; self.target.carrier().size()];
        for (i, &y) in rel.inclusion.iter().enumerate() {
            position[y] = i;
        }
        let corestriction = SpaceMap {
            source: self.source.clone(),
            target: rel.class,
            values: self.values.iter().map(|&y| position[y]).collect(),
        };
        corestriction.is_u_equivalence()
    }

    /// Characterization: injective, continuous and the source class equals the
    /// class induced from the target.
    pub fn is_u_embedding_by_characterization(&self) -> bool {
        self.is_injective()
            && self.is_continuous()
            && self.pulled_back_class().same_members(&self.source)
    }

    /// Class induced on the source carrier by the target class along this map.
    pub fn pulled_back_class(&self) -> UeqClass {
        induced_class(self.source.carrier(), &[(&self.values, &self.target)])
            .expect("single total map")
    }

    /// Evaluates both embedding tests and fails if they disagree.
    pub fn is_u_embedding(&self) -> Result<bool> {
        let by_def = self.is_u_embedding_by_definition();
        let by_char = self.is_u_embedding_by_characterization();
        if by_def != by_char {
            return Err(Error::CharacterizationMismatch(format!(
                "embedding: definition says {by_def}, characterization says {by_char}"
            )));
        }
        Ok(by_def)
    }
}

/// `table[x]` is the block of `x`.
pub(crate) fn block_table(u: &EquivRel) -> Vec<ElementSet> {
    let n = u.size();
    let mut by_label: Vec<Option<ElementSet>> = vec![None; n];
    for x in 0..n {
        by_label[u.label(x)]
            .get_or_insert_with(|| ElementSet::empty(n))
            .insert(x);
    }
    (0..n)
        .map(|x| by_label[u.label(x)].clone().expect("label filled"))
        .collect()
}

/// Checks `g ∘ f = id` and returns whether `f` is a U-embedding.
///
/// When both maps are U-equivalently continuous the answer is always `true`.
pub fn left_inverse_embedding_check(f: &SpaceMap, g: &SpaceMap) -> Result<bool> {
    f.target.carrier().ensure_same(g.source.carrier())?;
    g.target.carrier().ensure_same(f.source.carrier())?;
    for x in f.source.carrier().elements() {
        if g.values[f.values[x]] != x {
            return Err(Error::NotLeftInverse { element: x });
        }
    }
    f.is_u_embedding()
}

/// Some member `U` of the class meets the kernel of `phi` exactly in `ΔX`.
pub fn is_transverse(space: &UeqClass, phi: &[usize]) -> Result<bool> {
    let kernel = kernel(space.carrier(), phi)?;
    Ok(space
        .members()
        .iter()
        .any(|u| kernel.meet(u).expect("same carrier").is_delta()))
}

/// `(φ×φ)⁻¹(ΔZ)`.
pub fn kernel(carrier: Carrier, phi: &[usize]) -> Result<EquivRel> {
    if phi.len() != carrier.size() {
        return Err(Error::NotTotal {
            expected: carrier.size(),
            actual: phi.len(),
        });
    }
    EquivRel::from_labels(phi.iter().copied())
}

/// `C(α, β) = {x | α(x) = β(x)}`.
pub fn coincidence_set(alpha: &SpaceMap, beta: &SpaceMap) -> Result<ElementSet> {
    alpha.source.carrier().ensure_same(beta.source.carrier())?;
    alpha.target.carrier().ensure_same(beta.target.carrier())?;
    let n = alpha.values.len();
    Ok(ElementSet::from_elements(
        n,
        (0..n).filter(|&x| alpha.values[x] == beta.values[x]),
    ))
}

/// The inclusion of the relative space on `a` into `space`.
pub fn inclusion_map(space: &UeqClass, a: &ElementSet) -> Result<SpaceMap> {
    let rel = space.relative(a)?;
    SpaceMap::new(rel.class, space.clone(), rel.inclusion)
}

/// `a` is U-equivalently open: its inclusion map is U-equivalently open.
///
/// For rich classes the block-containment criterion is evaluated as well and
/// must agree.
pub fn is_u_open_subset(space: &UeqClass, a: &ElementSet) -> Result<bool> {
    let by_def = inclusion_map(space, a)?.is_open_map();
    if space.is_rich() {
        let by_blocks = has_block_inside(space, a)?;
        if by_def != by_blocks {
            return Err(Error::CharacterizationMismatch(format!(
                "u-open subset: inclusion map says {by_def}, block criterion says {by_blocks}"
            )));
        }
    }
    Ok(by_def)
}

/// `∀U ∃V ∀x ∈ A: V[x] ⊆ U[x] ∩ A`.
pub fn refines_within(space: &UeqClass, a: &ElementSet) -> Result<bool> {
    check_subset(space, a)?;
    let tables: Vec<Vec<ElementSet>> = space.members().iter().map(block_table).collect();
    Ok(tables.iter().all(|ub| {
        tables
            .iter()
            .any(|vb| a.iter().all(|x| vb[x].is_subset(&ub[x].intersection(a))))
    }))
}

/// `∃V₀ ∀x ∈ A: V₀[x] ⊆ A`.
pub fn has_block_inside(space: &UeqClass, a: &ElementSet) -> Result<bool> {
    check_subset(space, a)?;
    Ok(space
        .members()
        .iter()
        .any(|v| v.saturate(a).expect("checked capacity") == *a))
}

fn check_subset(space: &UeqClass, a: &ElementSet) -> Result<()> {
    if a.capacity() != space.carrier().size() {
        return Err(Error::CarrierMismatch {
            left: space.carrier().size(),
            right: a.capacity(),
        });
    }
    Ok(())
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

    fn full(n: usize) -> UeqClass {
        UeqClass::singleton(EquivRel::full(c(n)))
    }

    fn delta(n: usize) -> UeqClass {
        UeqClass::singleton(EquivRel::delta(c(n)))
    }

    fn set(n: usize, v: &[usize]) -> ElementSet {
        ElementSet::from_elements(n, v.iter().copied())
    }

    #[test]
    fn new_validates() {
        assert!(matches!(
            SpaceMap::new(delta(2), delta(2), vec![0]),
            Err(Error::NotTotal { .. })
        ));
        assert!(matches!(
            SpaceMap::new(delta(2), delta(2), vec![0, 2]),
            Err(Error::Index { index: 2, .. })
        ));
    }

    #[test]
    fn continuity() {
        let u = UeqClass::generate(c(3), vec![rel(3, &[&[0, 1], &[2]])]).unwrap();
        assert!(SpaceMap::identity(u.clone()).is_continuous());
        assert!(SpaceMap::new(full(3), full(2), vec![0, 1, 1]).unwrap().is_continuous());
        assert!(!SpaceMap::new(delta(2), full(2), vec![0, 1]).unwrap().is_continuous());
        assert!(!SpaceMap::new(full(2), delta(2), vec![0, 1]).unwrap().is_continuous());
    }

    #[test]
    fn openness() {
        let u = UeqClass::generate(c(3), vec![rel(3, &[&[0, 1], &[2]])]).unwrap();
        let f = SpaceMap::new(u.clone(), UeqClass::discrete(c(2)), vec![1, 0, 0]).unwrap();
        assert!(f.is_open_map());
        assert!(SpaceMap::identity(u).is_open_map());
        assert!(!SpaceMap::new(delta(2), full(2), vec![0, 0]).unwrap().is_open_map());
    }

    #[test]
    fn u_surjection() {
        assert!(SpaceMap::new(delta(3), delta(2), vec![0, 1, 1]).unwrap().is_u_surjection());
        assert!(SpaceMap::new(delta(3), full(3), vec![2, 2, 2]).unwrap().is_u_surjection());
        assert!(!SpaceMap::new(delta(3), delta(3), vec![2, 2, 0]).unwrap().is_u_surjection());
    }

    #[test]
    fn u_equivalence_and_embedding() {
        let u = UeqClass::generate(c(3), vec![rel(3, &[&[0, 1], &[2]])]).unwrap();
        let id = SpaceMap::identity(u.clone());
        assert!(id.is_u_equivalence());
        assert!(id.is_u_embedding().unwrap());

        let d = UeqClass::discrete(c(2));
        let f = SpaceMap::new(d, full(2), vec![0, 1]).unwrap();
        assert!(f.is_continuous() && f.is_injective());
        assert!(!f.is_u_equivalence());
        assert!(!f.is_u_embedding().unwrap());

        assert!(!SpaceMap::new(full(2), full(2), vec![0, 0]).unwrap().is_u_equivalence());

        // bijection with source class = pulled back target class
        let v = UeqClass::generate(c(3), vec![rel(3, &[&[0, 2], &[1]])]).unwrap();
        let perm = vec![2, 1, 0];
        let pulled = induced_class(c(3), &[(&perm, &v)]).unwrap();
        let g = SpaceMap::new(pulled, v, perm).unwrap();
        assert!(g.is_u_embedding().unwrap());
    }

    #[test]
    fn inclusion_is_embedding() {
        let u = UeqClass::generate(
            c(4),
            vec![rel(4, &[&[0, 1], &[2, 3]]), rel(4, &[&[0, 2], &[1], &[3]])],
        )
        .unwrap();
        let inc = inclusion_map(&u, &set(4, &[1, 2, 3])).unwrap();
        assert!(inc.is_u_embedding().unwrap());
    }

    #[test]
    fn left_inverse() {
        // retraction of 3 points onto {0, 1}
        let x = UeqClass::singleton(rel(2, &[&[0], &[1]]));
        let y = UeqClass::generate(c(3), vec![rel(3, &[&[0, 2], &[1]])]).unwrap();
        let f = SpaceMap::new(x.clone(), y.clone(), vec![0, 1]).unwrap();
        let g = SpaceMap::new(y, x.clone(), vec![0, 1, 0]).unwrap();
        assert!(f.is_continuous() && g.is_continuous());
        assert!(left_inverse_embedding_check(&f, &g).unwrap());

        let id = SpaceMap::identity(x.clone());
        assert!(left_inverse_embedding_check(&id, &id).unwrap());

        let swap = SpaceMap::new(x.clone(), x, vec![1, 0]).unwrap();
        assert_eq!(
            left_inverse_embedding_check(&swap, &id),
            Err(Error::NotLeftInverse { element: 0 })
        );
    }

    #[test]
    fn transversality() {
        assert!(is_transverse(&full(3), &[2, 0, 1]).unwrap());
        assert!(is_transverse(&delta(3), &[0, 0, 0]).unwrap());
        assert!(!is_transverse(&full(3), &[0, 0, 0]).unwrap());
    }

    #[test]
    fn coincidence() {
        let a = SpaceMap::new(delta(3), delta(2), vec![0, 1, 0]).unwrap();
        let b = SpaceMap::new(delta(3), delta(2), vec![0, 0, 0]).unwrap();
        let e = SpaceMap::new(delta(3), delta(2), vec![1, 1, 1]).unwrap();
        assert_eq!(coincidence_set(&a, &b).unwrap().to_vec(), vec![0, 2]);
        assert!(coincidence_set(&a, &a).unwrap().is_full());
        assert!(coincidence_set(&b, &e).unwrap().is_empty());
        let other = SpaceMap::new(delta(2), delta(2), vec![0, 0]).unwrap();
        assert!(coincidence_set(&a, &other).is_err());
    }

    #[test]
    fn u_open_subsets() {
        let u = UeqClass::generate(c(4), vec![rel(4, &[&[0, 1], &[2, 3]])]).unwrap();
        assert!(is_u_open_subset(&u, &set(4, &[0, 1, 2, 3])).unwrap());
        let rich = UeqClass::generate(
            c(4),
            vec![EquivRel::full(c(4)), rel(4, &[&[0, 1], &[2, 3]])],
        )
        .unwrap();
        assert!(is_u_open_subset(&rich, &set(4, &[0, 1])).unwrap());
        assert!(!is_u_open_subset(&rich, &set(4, &[0, 2])).unwrap());
        assert!(!is_u_open_subset(&full(4), &set(4, &[1])).unwrap());
        assert_eq!(is_u_open_subset(&u, &set(4, &[])), Err(Error::EmptySubset));
    }
}
