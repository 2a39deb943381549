//! Transitive pseudo-metrics with exact rational distances.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::class::{product, UeqClass};
use crate::error::{Error, Result};
use crate::map::SpaceMap;
use crate::relation::{Carrier, EquivRel, ProductShape};
use crate::set::ElementSet;
use crate::topology::{induce_topology, FiniteTopology};

pub type Rational = num_rational::Ratio<i64>;

/// A validated pseudo-metric: zero diagonal, symmetric, nonnegative, and
/// satisfying the triangle inequality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PseudoMetric {
    dist: Vec<Vec<Rational>>,
}

impl PseudoMetric {
    pub fn new(dist: Vec<Vec<Rational>>) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::EmptyCarrier);
        }
        for (x, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotAPseudoMetric(format!(
                    "row {x} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if !row[x].is_zero() {
                return Err(Error::NotAPseudoMetric(format!("d({x},{x}) is not zero")));
            }
            for y in 0..n {
                if row[y] < Rational::zero() {
                    return Err(Error::NotAPseudoMetric(format!("d({x},{y}) is negative")));
                }
                if row[y] != dist[y][x] {
                    return Err(Error::NotAPseudoMetric(format!(
                        "d({x},{y}) differs from d({y},{x})"
                    )));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if dist[x][z] > dist[x][y] + dist[y][z] {
                        return Err(Error::NotAPseudoMetric(format!(
                            "triangle inequality fails for ({x},{y},{z})"
                        )));
                    }
                }
            }
        }
        Ok(PseudoMetric { dist })
    }

    pub fn carrier(&self) -> Carrier {
        Carrier::new(self.dist.len()).expect("validated nonempty")
    }

    pub fn size(&self) -> usize {
        self.dist.len()
    }

    pub fn d(&self, x: usize, y: usize) -> Rational {
        self.dist[x][y]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    /// Distinct nonzero distances, increasing.
    pub fn positive_distances(&self) -> Vec<Rational> {
        self.dist
            .iter()
            .flatten()
            .filter(|v| !v.is_zero())
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn max_distance(&self) -> Rational {
        self.dist
            .iter()
            .flatten()
            .copied()
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `d(x,y) < r ∧ d(y,z) < r ⇒ d(x,z) < r` for all triples.
    pub fn is_r_transitive(&self, r: Rational) -> Result<bool> {
        if r <= Rational::zero() {
            return Err(Error::NonPositiveRadius);
        }
        let n = self.size();
        for x in 0..n {
            for y in 0..n {
                if self.dist[x][y] >= r {
                    continue;
                }
                for z in 0..n {
                    if self.dist[y][z] < r && self.dist[x][z] >= r {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// `d(x,z) ≤ max(d(x,y), d(y,z))` for all triples.
    pub fn satisfies_strong_triangle(&self) -> bool {
        let n = self.size();
        (0..n).all(|x| {
            (0..n).all(|y| (0..n).all(|z| self.dist[x][z] <= self.dist[x][y].max(self.dist[y][z])))
        })
    }

    /// r-transitive for every `r > 0`.
    ///
    /// A violation at `r` needs `max(d(x,y), d(y,z)) < r ≤ d(x,z)`, so it also
    /// shows up at `r = d(x,z)`; testing the attained positive distances is
    /// enough. The result is cross-checked against the strong triangle law.
    pub fn is_transitive(&self) -> Result<bool> {
        let mut sweep = true;
        for r in self.positive_distances() {
            if !self.is_r_transitive(r)? {
                sweep = false;
                break;
            }
        }
        let strong = self.satisfies_strong_triangle();
        if sweep != strong {
            return Err(Error::CharacterizationMismatch(format!(
                "transitivity: threshold sweep says {sweep}, strong triangle says {strong}"
            )));
        }
        Ok(sweep)
    }
}

/// A pseudo-metric known to be transitive, so every strict ball relation is
/// an equivalence relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitivePseudoMetric {
    inner: PseudoMetric,
}

impl TransitivePseudoMetric {
    pub fn new(metric: PseudoMetric) -> Result<Self> {
        if !metric.is_transitive()? {
            return Err(Error::NotTransitive);
        }
        Ok(TransitivePseudoMetric { inner: metric })
    }

    pub fn from_matrix(dist: Vec<Vec<Rational>>) -> Result<Self> {
        Self::new(PseudoMetric::new(dist)?)
    }

    /// `d_α`: distance `α` between distinct points.
    pub fn d_alpha(carrier: Carrier, alpha: Rational) -> Result<Self> {
        if alpha <= Rational::zero() {
            return Err(Error::NonPositiveAlpha);
        }
        let n = carrier.size();
        let dist = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| if x == y { Rational::zero() } else { alpha })
                    .collect()
            })
            .collect();
        Ok(TransitivePseudoMetric {
            inner: PseudoMetric { dist },
        })
    }

    /// Distance 0 inside blocks of `u` and 1 across them.
    pub fn two_valued(u: &EquivRel) -> Self {
        let n = u.size();
        let dist = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| {
                        if u.related(x, y) {
                            Rational::zero()
                        } else {
                            Rational::one()
                        }
                    })
                    .collect()
            })
            .collect();
        TransitivePseudoMetric {
            inner: PseudoMetric { dist },
        }
    }

    pub fn metric(&self) -> &PseudoMetric {
        &self.inner
    }

    pub fn carrier(&self) -> Carrier {
        self.inner.carrier()
    }

    /// `B_d(r) = {(x,y) | d(x,y) < r}`.
    pub fn ball_relation(&self, r: Rational) -> Result<EquivRel> {
        if r <= Rational::zero() {
            return Err(Error::NonPositiveRadius);
        }
        let n = self.inner.size();
        let labels = (0..n).map(|x| {
            (0..n)
                .find(|&y| self.inner.dist[x][y] < r)
                .expect("d(x,x) = 0 < r")
        });
        EquivRel::from_labels(labels)
    }

    /// `B_d(x, r)`.
    pub fn ball(&self, x: usize, r: Rational) -> ElementSet {
        let n = self.inner.size();
        ElementSet::from_elements(n, (0..n).filter(|&y| self.inner.dist[x][y] < r))
    }

    /// Radii at which the ball relation can change: every attained positive
    /// distance plus one value above the maximum.
    pub fn critical_radii(&self) -> Vec<Rational> {
        let mut radii = self.inner.positive_distances();
        radii.push(self.inner.max_distance() + Rational::one());
        radii
    }

    /// Every distinct ball relation, finest first.
    pub fn ball_relations(&self) -> Vec<EquivRel> {
        let mut out: Vec<EquivRel> = Vec::new();
        for r in self.critical_radii() {
            let b = self.ball_relation(r).expect("positive radius");
            if out.last() != Some(&b) {
                out.push(b);
            }
        }
        out
    }

    /// `U_d`, the class of all ball relations.
    pub fn class(&self) -> UeqClass {
        UeqClass::generate(self.carrier(), self.ball_relations()).expect("at least one radius")
    }
}

/// Transitivity checks on a raw matrix; see [`PseudoMetric::is_r_transitive`].
pub fn is_r_transitive(dist: Vec<Vec<Rational>>, r: Rational) -> Result<bool> {
    PseudoMetric::new(dist)?.is_r_transitive(r)
}

pub fn is_transitive(dist: Vec<Vec<Rational>>) -> Result<bool> {
    PseudoMetric::new(dist)?.is_transitive()
}

/// A nonempty family of transitive pseudo-metrics on one carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricFamily {
    carrier: Carrier,
    metrics: Vec<TransitivePseudoMetric>,
}

impl MetricFamily {
    pub fn new(metrics: Vec<TransitivePseudoMetric>) -> Result<Self> {
        let first = metrics.first().ok_or(Error::EmptyFamily)?;
        let carrier = first.carrier();
        for m in &metrics {
            carrier.ensure_same(m.carrier())?;
        }
        Ok(MetricFamily { carrier, metrics })
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn metrics(&self) -> &[TransitivePseudoMetric] {
        &self.metrics
    }

    /// `U_D`, generated by every ball relation of every metric.
    pub fn class(&self) -> UeqClass {
        let generators = self
            .metrics
            .iter()
            .flat_map(|m| m.ball_relations())
            .collect();
        UeqClass::generate(self.carrier, generators).expect("nonempty family")
    }

    /// All balls `B_d(x, r)` at the critical radii.
    pub fn subbase(&self) -> Vec<ElementSet> {
        let mut out = BTreeSet::new();
        for m in &self.metrics {
            for r in m.critical_radii() {
                for x in self.carrier.elements() {
                    out.insert(m.ball(x, r));
                }
            }
        }
        out.into_iter().collect()
    }

    /// Topology generated by metric balls as a sub-base, checked against the
    /// topology induced by `U_D`.
    pub fn topology(&self) -> Result<FiniteTopology> {
        let from_balls = FiniteTopology::from_subbase(self.carrier, &self.subbase())?;
        let from_class = induce_topology(&self.class());
        if !from_balls.equals(&from_class)? {
            return Err(Error::CharacterizationMismatch(
                "metric sub-base topology differs from class-induced topology".into(),
            ));
        }
        Ok(from_balls)
    }

    /// One two-valued metric per member of `class`.
    ///
    /// Any `U_D` contains `X²` (large balls), so the round trip through
    /// [`MetricFamily::class`] reproduces `class` exactly when it is rich and
    /// adds `X²` otherwise.
    pub fn from_class(class: &UeqClass) -> Self {
        let metrics = class
            .members()
            .iter()
            .map(TransitivePseudoMetric::two_valued)
            .collect();
        MetricFamily {
            carrier: class.carrier(),
            metrics,
        }
    }

    /// The spaces `(X, U_d)` and their product.
    pub fn factor_classes(&self) -> Vec<UeqClass> {
        self.metrics.iter().map(|m| m.class()).collect()
    }

    /// `x ↦ (x, …, x)` from `(X, U_D)` into `Π (X, U_d)`.
    pub fn evaluation_embedding(&self) -> Result<EvaluationEmbedding> {
        let factors = self.factor_classes();
        let refs: Vec<&UeqClass> = factors.iter().collect();
        let prod = product(&refs)?;
        let k = self.metrics.len();
        let values = self
            .carrier
            .elements()
            .map(|x| prod.shape.encode(&vec![x; k]))
            .collect::<Result<Vec<_>>>()?;
        let map = SpaceMap::new(self.class(), prod.class, values)?;
        Ok(EvaluationEmbedding {
            shape: prod.shape,
            map,
        })
    }
}

/// The evaluation map together with the product shape of its target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationEmbedding {
    pub shape: ProductShape,
    pub map: SpaceMap,
}

/// Whether `t` is the topology induced by `c`.
pub fn is_equivalently_uniformisable_via(t: &FiniteTopology, c: &UeqClass) -> Result<bool> {
    t.equals(&induce_topology(c))
}

/// A class inducing `t`, if one exists.
///
/// A class-induced topology has the bottom-relation blocks as minimal
/// neighborhoods, so `t` is realizable exactly when its minimal
/// neighborhoods partition the carrier; that partition alone then works.
pub fn uniformising_class(t: &FiniteTopology) -> Option<UeqClass> {
    let labels: Vec<usize> = t
        .carrier()
        .elements()
        .map(|x| t.min_nbhd(x).first().expect("x ∈ N(x)"))
        .collect();
    let rel = EquivRel::from_labels(labels).ok()?;
    let candidate = UeqClass::singleton(rel);
    is_equivalently_uniformisable_via(t, &candidate)
        .ok()
        .filter(|&ok| ok)
        .map(|_| candidate)
}
