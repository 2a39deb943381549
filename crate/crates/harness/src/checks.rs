//! Proposition-indexed property checks and the report they produce.
//!
//! Each check samples instances that honor the hypotheses of one result,
//! evaluates its conclusion, and classifies the trial as a pass, a failure or
//! vacuous (hypotheses not met). Failures carry the sampled instances in the
//! instance-file format so they can be replayed through the CLI.

use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;
use ueq_core::enumerate::nonempty_subsets;
use ueq_core::{
    coincidence_set, has_block_inside, induce_topology, induced_class, inclusion_map,
    is_connected, is_dense, is_topological_embedding, is_transverse, is_u_open_subset,
    left_inverse_embedding_check, product, product_topology, refines_within, uniformising_class,
    ElementSet, EquivRel, Error, FiniteTopology, MetricFamily, PseudoMetric, SpaceMap, UeqClass,
};

use crate::gen::{self, TrialRng};
use crate::instance::{FamilyDoc, InstanceDoc, MapDoc, MetricDoc, SpaceDoc, SubsetDoc, TopologyDoc};
use crate::oracle;

/// Size limits for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub max_carrier: usize,
    pub exhaustive_carrier: usize,
    pub max_generators: usize,
    pub max_factors: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_carrier: 6,
            exhaustive_carrier: 4,
            max_generators: 4,
            max_factors: 3,
        }
    }
}

pub const DEFAULT_TRIALS: u64 = 500;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Vacuous,
    Fail(String),
}

impl Outcome {
    fn expect(ok: bool, why: impl FnOnce() -> String) -> Outcome {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail(why())
        }
    }
}

type CheckResult = Result<Outcome, Error>;

/// Instances sampled during one trial, keyed by role.
#[derive(Debug, Default)]
pub struct Trace {
    docs: Map<String, Value>,
}

impl Trace {
    fn put(&mut self, name: impl Into<String>, doc: InstanceDoc) {
        let value = serde_json::to_value(doc).expect("documents serialize");
        self.docs.insert(name.into(), value);
    }

    fn space(&mut self, name: impl Into<String>, c: &UeqClass) {
        self.put(name, InstanceDoc::Space(SpaceDoc::from_class(c)));
    }

    fn map(&mut self, name: impl Into<String>, f: &SpaceMap) {
        self.put(name, InstanceDoc::Map(MapDoc::from_map(f)));
    }

    fn subset(&mut self, name: impl Into<String>, c: &UeqClass, a: &ElementSet) {
        self.put(name, InstanceDoc::Subset(SubsetDoc::new(c, a)));
    }

    fn metric(&mut self, name: impl Into<String>, d: &PseudoMetric) {
        self.put(name, InstanceDoc::Metric(MetricDoc::from_metric(d)));
    }

    fn family(&mut self, name: impl Into<String>, f: &MetricFamily) {
        self.put(name, InstanceDoc::Family(FamilyDoc::from_family(f)));
    }

    fn topology(&mut self, name: impl Into<String>, t: &FiniteTopology) {
        self.put(name, InstanceDoc::Topology(TopologyDoc::from_topology(t)));
    }

    fn values(&mut self, name: impl Into<String>, v: &[usize]) {
        self.docs.insert(name.into(), Value::from(v.to_vec()));
    }
}

type CheckFn = fn(&mut TrialRng, &Caps, &mut Trace) -> CheckResult;

pub struct PropertyCheck {
    pub id: &'static str,
    pub title: &'static str,
    run: CheckFn,
}

impl PropertyCheck {
    /// Runs trial `index` under `seed`, returning the verdict and the trace.
    pub fn trial(&self, seed: u64, index: u64, caps: &Caps) -> (Outcome, Value) {
        let mut rng = gen::trial_rng(seed, self.id, index);
        let mut trace = Trace::default();
        let outcome = match (self.run)(&mut rng, caps, &mut trace) {
            Ok(o) => o,
            Err(e) => Outcome::Fail(e.to_string()),
        };
        (outcome, Value::Object(trace.docs))
    }
}

pub fn registry() -> &'static [PropertyCheck] {
    &REGISTRY
}

pub fn find(id: &str) -> Option<&'static PropertyCheck> {
    REGISTRY.iter().find(|c| c.id == id)
}

static REGISTRY: [PropertyCheck; 27] = [
    PropertyCheck { id: "P2.2", title: "induced class is the smallest making the maps continuous", run: induced_is_smallest },
    PropertyCheck { id: "P2.3", title: "single-map induced class is the set of preimages", run: induced_is_preimages },
    PropertyCheck { id: "P2.4", title: "continuity through an induced class composes", run: composition_continuity },
    PropertyCheck { id: "P2.6", title: "embedding definition agrees with its characterization", run: embedding_characterization },
    PropertyCheck { id: "P2.7", title: "a continuous left inverse forces an embedding", run: left_inverse },
    PropertyCheck { id: "P2.8", title: "covers of a finite cover assemble into a cover", run: cover_assembly },
    PropertyCheck { id: "P2.9", title: "induced classes inherit covers through preimage points", run: induced_cover },
    PropertyCheck { id: "P2.10", title: "maps into a product are continuous iff their coordinates are", run: product_continuity },
    PropertyCheck { id: "P2.11", title: "products of separated classes are separated", run: separated_product },
    PropertyCheck { id: "P2.12", title: "induced product topology is the product topology (separated factors)", run: product_topology_separated },
    PropertyCheck { id: "P2.12u", title: "induced product topology is the product topology (any factors)", run: product_topology_any },
    PropertyCheck { id: "P3.1", title: "three descriptions of open subsets agree for rich classes", run: open_subset_equivalence },
    PropertyCheck { id: "P3.2", title: "nonempty coincidence sets are open", run: coincidence_open },
    PropertyCheck { id: "P3.4", title: "open u-surjections from rich spaces are surjective", run: open_u_surjection },
    PropertyCheck { id: "P3.6", title: "open dense subsets of rich spaces are full", run: open_dense_full },
    PropertyCheck { id: "P3.7", title: "dense coincidence forces equality", run: dense_coincidence },
    PropertyCheck { id: "P3.8", title: "nonempty subsets of connected spaces are dense", run: connected_dense },
    PropertyCheck { id: "P3.9", title: "open subsets of connected spaces are empty or full", run: connected_open },
    PropertyCheck { id: "P3.10", title: "one coincidence point in a connected space forces equality", run: connected_coincidence },
    PropertyCheck { id: "P4.2", title: "homeomorphic images of induced topologies are induced", run: homeomorphic_uniformisable },
    PropertyCheck { id: "P4.3", title: "relative class induces the subspace topology", run: relative_is_subspace },
    PropertyCheck { id: "P4.4", title: "topological embeddings pull back inducing classes", run: embedding_pullback },
    PropertyCheck { id: "P4.5", title: "transitivity sweep agrees with sampling; balls nest", run: transitivity },
    PropertyCheck { id: "P4.6", title: "embeddings into metric products are uniformisable", run: metric_product_chain },
    PropertyCheck { id: "P4.8", title: "metric ball sub-base generates the class-induced topology", run: family_topology },
    PropertyCheck { id: "P4.9", title: "the evaluation map is an embedding", run: evaluation_embedding },
    PropertyCheck { id: "P4.10", title: "class to metrics round trip and topological evaluation embedding", run: round_trip },
];

#[derive(Debug, Error)]
#[error("unknown check id `{0}`")]
pub struct UnknownCheckId(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub title: String,
    pub passes: u64,
    pub failures: u64,
    pub vacuous: u64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl CheckReport {
    pub fn non_vacuous_rate(&self) -> f64 {
        let total = self.passes + self.failures + self.vacuous;
        if total == 0 {
            return 0.0;
        }
        (self.passes + self.failures) as f64 / total as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub trials: u64,
    pub caps: Caps,
    pub checks: Vec<CheckReport>,
}

impl VerificationReport {
    /// No failures, and no check whose every trial was vacuous.
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn check(&self, id: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.check_id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Runs `trials` trials of each listed check. Trials run in parallel; the
/// report depends only on the arguments.
pub fn run_checks(
    ids: &[String],
    seed: u64,
    trials: u64,
    caps: Caps,
) -> Result<VerificationReport, UnknownCheckId> {
    let selected = ids
        .iter()
        .map(|id| find(id).ok_or_else(|| UnknownCheckId(id.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let checks = selected
        .into_iter()
        .map(|check| run_one(check, seed, trials, &caps))
        .collect();
    Ok(VerificationReport {
        seed,
        trials,
        caps,
        checks,
    })
}

pub fn all_ids() -> Vec<String> {
    REGISTRY.iter().map(|c| c.id.to_string()).collect()
}

fn run_one(check: &PropertyCheck, seed: u64, trials: u64, caps: &Caps) -> CheckReport {
    let outcomes: Vec<(Outcome, Value)> = (0..trials)
        .into_par_iter()
        .map(|t| check.trial(seed, t, caps))
        .collect();
    let mut report = CheckReport {
        check_id: check.id.to_string(),
        title: check.title.to_string(),
        passes: 0,
        failures: 0,
        vacuous: 0,
        status: Status::Pass,
        counterexample: None,
    };
    for (t, (outcome, trace)) in outcomes.into_iter().enumerate() {
        match outcome {
            Outcome::Pass => report.passes += 1,
            Outcome::Vacuous => report.vacuous += 1,
            Outcome::Fail(reason) => {
                report.failures += 1;
                if report.counterexample.is_none() {
                    report.counterexample = Some(serde_json::json!({
                        "trial": t,
                        "reason": reason,
                        "instances": trace,
                    }));
                }
            }
        }
    }
    report.status = if report.failures > 0 {
        Status::Fail
    } else if trials > 0 && report.passes == 0 {
        Status::Vacuous
    } else {
        Status::Pass
    };
    report
}

// ---------------------------------------------------------------- helpers

fn space_map(source: &UeqClass, target: &UeqClass, values: Vec<usize>) -> Result<SpaceMap, Error> {
    SpaceMap::new(source.clone(), target.clone(), values)
}

fn preimages(class: &UeqClass, f: &[usize]) -> Result<Vec<EquivRel>, Error> {
    class.members().iter().map(|v| v.preimage(f)).collect()
}

/// A nonempty subset that is, half the time, a union of blocks of a member.
fn saturated_or_random(rng: &mut TrialRng, c: &UeqClass) -> Result<ElementSet, Error> {
    let n = c.carrier().size();
    let seed = gen::nonempty_subset(rng, n);
    if rng.random_bool(0.5) {
        let members: Vec<&EquivRel> = c.members().iter().collect();
        gen::pick(rng, &members).saturate(&seed)
    } else {
        Ok(seed)
    }
}

/// Factor sizes keep the product carrier at most 36.
fn factor_cap(k: usize, caps: &Caps) -> usize {
    let per = if k <= 2 { 6 } else { 3 };
    per.min(caps.max_carrier)
}

fn compose(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&y| outer[y]).collect()
}

fn fiber_pick(rng: &mut TrialRng, phi: &[usize], y: usize) -> usize {
    let fiber: Vec<usize> = (0..phi.len()).filter(|&z| phi[z] == phi[y]).collect();
    *gen::pick(rng, &fiber)
}

// ------------------------------------------------------------- section 2

fn induced_is_smallest(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let n = gen::size(rng, 1, caps.max_carrier);
    let k = gen::size(rng, 1, 2);
    let mut targets = Vec::new();
    let mut maps = Vec::new();
    for _ in 0..k {
        let m = gen::size(rng, 1, caps.max_carrier);
        targets.push(gen::class(rng, m, caps.max_generators));
        maps.push(gen::map_values(rng, n, m));
    }
    let pairs: Vec<(&[usize], &UeqClass)> = maps.iter().map(Vec::as_slice).zip(&targets).collect();
    let induced = induced_class(gen::carrier(n), &pairs)?;
    for (i, (f, v)) in pairs.iter().enumerate() {
        let map = space_map(&induced, v, f.to_vec())?;
        tr.map(format!("map{i}"), &map);
        if !map.is_continuous() {
            return Ok(Outcome::Fail(format!("map {i} is not continuous for the induced class")));
        }
    }
    // preimages of generators alone generate the same class
    let mut gens = Vec::new();
    for (f, v) in &pairs {
        for g in v.generators() {
            gens.push(g.preimage(f)?);
        }
    }
    let from_gens = UeqClass::generate(gen::carrier(n), gens.clone())?;
    if !from_gens.same_members(&induced) {
        return Ok(Outcome::Fail("generator preimages generate a different class".into()));
    }
    // any other class making every map continuous contains the induced one
    for _ in 0..gen::size(rng, 0, 2) {
        gens.push(gen::relation(rng, n));
    }
    let competitor = UeqClass::generate(gen::carrier(n), gens)?;
    tr.space("competitor", &competitor);
    for (f, v) in &pairs {
        if !space_map(&competitor, v, f.to_vec())?.is_continuous() {
            return Ok(Outcome::Vacuous);
        }
    }
    Ok(Outcome::expect(induced.is_subclass_of(&competitor), || {
        "induced class is not contained in a competing class".into()
    }))
}

fn induced_is_preimages(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let n = gen::size(rng, 1, caps.max_carrier);
    let m = gen::size(rng, 1, caps.max_carrier);
    let v = gen::class(rng, m, caps.max_generators);
    let f = gen::map_values(rng, n, m);
    let induced = induced_class(gen::carrier(n), &[(&f, &v)])?;
    tr.map("map", &space_map(&induced, &v, f.clone())?);
    let direct: BTreeSet<EquivRel> = preimages(&v, &f)?.into_iter().collect();
    Ok(Outcome::expect(induced.members() == &direct, || {
        "induced members differ from the set of preimages".into()
    }))
}

fn composition_continuity(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let n = gen::size(rng, 1, caps.max_carrier);
    let m = gen::size(rng, 1, caps.max_carrier);
    let p = gen::size(rng, 1, caps.max_carrier);
    let w = gen::class(rng, p, caps.max_generators);
    let psi = gen::map_values(rng, m, p);
    let v = induced_class(gen::carrier(m), &[(&psi, &w)])?;
    let phi = gen::map_values(rng, n, m);
    let u = if rng.random_bool(0.5) {
        let mut gens = preimages(&v, &phi)?;
        if rng.random_bool(0.5) {
            gens.swap_remove(rng.random_range(0..gens.len()));
        }
        if gens.is_empty() || rng.random_bool(0.3) {
            gens.push(gen::relation(rng, n));
        }
        UeqClass::generate(gen::carrier(n), gens)?
    } else {
        gen::class(rng, n, caps.max_generators)
    };
    let phi_map = space_map(&u, &v, phi.clone())?;
    let psi_map = space_map(&v, &w, psi.clone())?;
    let both = phi_map.then(&psi_map)?;
    tr.map("phi", &phi_map);
    tr.map("psi", &psi_map);
    let left = phi_map.is_continuous();
    let right = both.is_continuous();
    Ok(Outcome::expect(left == right, || {
        format!("phi continuous: {left}, psi after phi continuous: {right}")
    }))
}

fn embedding_characterization(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let n = gen::size(rng, 1, caps.max_carrier);
    let m = gen::size(rng, 1, caps.max_carrier);
    let v = gen::class(rng, m, caps.max_generators);
    let f = if n <= m && rng.random_bool(0.5) {
        gen::injection(rng, n, m)
    } else {
        gen::map_values(rng, n, m)
    };
    let u = if rng.random_bool(0.5) {
        induced_class(gen::carrier(n), &[(&f, &v)])?
    } else {
        gen::class(rng, n, caps.max_generators)
    };
    let map = space_map(&u, &v, f)?;
    tr.map("map", &map);
    // the comparison itself lives in is_u_embedding; a disagreement is an error
    map.is_u_embedding()?;
    Ok(Outcome::Pass)
}

fn left_inverse(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let n = gen::size(rng, 1, caps.max_carrier);
    let m = gen::size(rng, n, caps.max_carrier);
    let f = gen::injection(rng, n, m);
    let mut g = gen::map_values(rng, m, n);
    for (x, &y) in f.iter().enumerate() {
        g[y] = x;
    }
    let u = gen::class(rng, n, caps.max_generators);
    let mut gens = preimages(&u, &g)?;
    if rng.random_bool(0.5) {
        gens.push(gen::relation(rng, m));
    }
    let v = UeqClass::generate(gen::carrier(m), gens)?;
    let fm = space_map(&u, &v, f)?;
    let gm = space_map(&v, &u, g)?;
    tr.map("f", &fm);
    tr.map("g", &gm);
    if !(fm.is_continuous() && gm.is_continuous()) {
        return Ok(Outcome::Vacuous);
    }
    Ok(Outcome::expect(left_inverse_embedding_check(&fm, &gm)?, || {
        "f has a continuous left inverse but is not an embedding".into()
    }))
}

fn cover_assembly(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let n = gen::size(rng, 1, caps.max_carrier);
    let c = gen::class(rng, n, caps.max_generators);
    let j = gen::size(rng, 1, 3);
    let mut pieces = vec![ElementSet::empty(n); j];
    for x in 0..n {
        pieces[rng.random_range(0..j)].insert(x);
        for piece in pieces.iter_mut() {
            if rng.random_bool(0.2) {
                piece.insert(x);
            }
        }
    }
    pieces.retain(|p| !p.is_empty());
    tr.space("space", &c);
    for (i, p) in pieces.iter().enumerate() {
        tr.subset(format!("piece{i}"), &c, p);
    }
    let relatives = pieces
        .iter()
        .map(|p| c.relative(p))
        .collect::<Result<Vec<_>, _>>()?;
    for u in c.members() {
        let mut centers = ElementSet::empty(n);
        for (p, rel) in pieces.iter().zip(&relatives) {
            let trace = u.restrict(p)?;
            let Some(w) = rel
                .class
                .totally_bounded_witness()
                .into_iter()
                .find(|w| w.relation == trace)
            else {
                return Ok(Outcome::Fail(format!("{u:?} has no trace in a relative class")));
            };
            if !w.covers() {
                return Ok(Outcome::Fail("relative witness does not cover its piece".into()));
            }
            for &i in &w.centers {
                centers.insert(rel.inclusion[i]);
            }
        }
        if !u.saturate(&centers)?.is_full() {
            return Ok(Outcome::Fail(format!("assembled centers do not cover under {u:?}")));
        }
    }
    Ok(Outcome::Pass)
}

fn induced_cover(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let n = gen::size(rng, 1, caps.max_carrier);
    let m = gen::size(rng, 1, caps.max_carrier);
    let v = gen::class(rng, m, caps.max_generators);
    let phi = gen::map_values(rng, n, m);
    let u = induced_class(gen::carrier(n), &[(&phi, &v)])?;
    tr.map("phi", &space_map(&u, &v, phi.clone())?);
    for w in v.totally_bounded_witness() {
        let pulled = w.relation.preimage(&phi)?;
        if !u.contains(&pulled)? {
            return Ok(Outcome::Fail("a preimage relation is missing from the induced class".into()));
        }
        // one point from each nonempty preimage of a center's block
        let points = w
            .centers
            .iter()
            .filter_map(|&y| (0..n).find(|&x| w.relation.related(phi[x], y)));
        let centers = ElementSet::from_elements(n, points);
        if !pulled.saturate(&centers)?.is_full() {
            return Ok(Outcome::Fail(format!("preimage points do not cover under {pulled:?}")));
        }
    }
    Ok(Outcome::Pass)
}

fn product_continuity(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let k = gen::size(rng, 1, caps.max_factors);
    let cap = factor_cap(k, caps);
    let factors: Vec<UeqClass> = (0..k)
        .map(|_| {
            let m = gen::size(rng, 1, cap);
            gen::class(rng, m, caps.max_generators)
        })
        .collect();
    let refs: Vec<&UeqClass> = factors.iter().collect();
    let prod = product(&refs)?;
    let a = gen::size(rng, 1, caps.max_carrier);
    let phi = gen::map_values(rng, a, prod.shape.carrier().size());
    let coords = (0..k)
        .map(|j| prod.shape.projection(j).map(|p| compose(&p, &phi)))
        .collect::<Result<Vec<_>, _>>()?;
    let u = if rng.random_bool(0.5) {
        let pairs: Vec<(&[usize], &UeqClass)> = coords.iter().map(Vec::as_slice).zip(&factors).collect();
        induced_class(gen::carrier(a), &pairs)?
    } else {
        gen::class(rng, a, caps.max_generators)
    };
    for (j, f) in factors.iter().enumerate() {
        tr.space(format!("factor{j}"), f);
    }
    tr.space("domain", &u);
    tr.values("phi", &phi);
    let whole = space_map(&u, &prod.class, phi)?.is_continuous();
    let mut each = true;
    for (f, c) in factors.iter().zip(coords) {
        each &= space_map(&u, f, c)?.is_continuous();
    }
    Ok(Outcome::expect(whole == each, || {
        format!("map continuous: {whole}, all coordinates continuous: {each}")
    }))
}

fn factors(rng: &mut TrialRng, caps: &Caps, separated: bool) -> Vec<UeqClass> {
    let k = gen::size(rng, 1, caps.max_factors);
    let cap = factor_cap(k, caps);
    (0..k)
        .map(|_| {
            let m = gen::size(rng, 1, cap);
            if separated {
                gen::separated_class(rng, m, caps.max_generators)
            } else {
                gen::class(rng, m, caps.max_generators)
            }
        })
        .collect()
}

fn separated_product(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let fs = factors(rng, caps, true);
    for (j, f) in fs.iter().enumerate() {
        tr.space(format!("factor{j}"), f);
    }
    if !fs.iter().all(UeqClass::is_separated) {
        return Ok(Outcome::Vacuous);
    }
    let refs: Vec<&UeqClass> = fs.iter().collect();
    Ok(Outcome::expect(product(&refs)?.class.is_separated(), || {
        "product of separated classes is not separated".into()
    }))
}

/// Compares the topology of the product class with the product of the
/// factor topologies.
pub fn product_topologies_agree(fs: &[UeqClass]) -> Result<bool, Error> {
    let refs: Vec<&UeqClass> = fs.iter().collect();
    let prod = product(&refs)?;
    let tops: Vec<FiniteTopology> = fs.iter().map(induce_topology).collect();
    let top_refs: Vec<&FiniteTopology> = tops.iter().collect();
    let (shape, pt) = product_topology(&top_refs)?;
    Ok(shape == prod.shape && induce_topology(&prod.class).equals(&pt)?)
}

fn product_topology_check(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace, separated: bool) -> CheckResult {
    let fs = factors(rng, caps, separated);
    for (j, f) in fs.iter().enumerate() {
        tr.space(format!("factor{j}"), f);
    }
    Ok(Outcome::expect(product_topologies_agree(&fs)?, || {
        "topology of the product class differs from the product topology".into()
    }))
}

fn product_topology_separated(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    product_topology_check(rng, caps, tr, true)
}

fn product_topology_any(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    product_topology_check(rng, caps, tr, false)
}

// ------------------------------------------------------------- section 3

fn open_subset_equivalence(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let n = gen::size(rng, 1, caps.max_carrier);
    let c = gen::rich_class(rng, n, caps.max_generators);
    let a = saturated_or_random(rng, &c)?;
    tr.subset("subset", &c, &a);
    let by_inclusion = inclusion_map(&c, &a)?.is_open_map();
    let by_refinement = refines_within(&c, &a)?;
    let by_block = has_block_inside(&c, &a)?;
    if !(by_inclusion == by_refinement && by_refinement == by_block) {
        return Ok(Outcome::Fail(format!(
            "inclusion open: {by_inclusion}, refinement: {by_refinement}, block inside: {by_block}"
        )));
    }
    Ok(Outcome::expect(!by_block || induce_topology(&c).is_open(&a), || {
        "block criterion holds but the subset is not open".into()
    }))
}

struct CoincidenceInstance {
    u: UeqClass,
    v: UeqClass,
    alpha: SpaceMap,
    beta: SpaceMap,
    phi: Vec<usize>,
}

impl CoincidenceInstance {
    fn record(&self, tr: &mut Trace) {
        tr.map("alpha", &self.alpha);
        tr.map("beta", &self.beta);
        tr.values("phi", &self.phi);
    }

    /// Continuity of both maps, transversality, `φα = φβ` and richness.
    fn premises_hold(&self) -> Result<bool, Error> {
        let agree = compose(&self.phi, self.alpha.values()) == compose(&self.phi, self.beta.values());
        Ok(self.alpha.is_continuous()
            && self.beta.is_continuous()
            && agree
            && self.u.is_rich()
            && is_transverse(&self.v, &self.phi)?)
    }

    /// A member of `V` meeting the kernel of φ in the diagonal.
    fn transversal_member(&self) -> Result<Option<&EquivRel>, Error> {
        let ker = ueq_core::kernel(self.v.carrier(), &self.phi)?;
        Ok(self
            .v
            .members()
            .iter()
            .find(|m| ker.meet(m).map(|k| k.is_delta()).unwrap_or(false)))
    }
}

/// `phi` usually ranks points inside the blocks of a member of `V`, which
/// makes it transverse; `beta` agrees with `alpha` up to the fibers of `phi`.
fn coincidence_instance(
    rng: &mut TrialRng,
    caps: &Caps,
    beta_equal: f64,
) -> Result<CoincidenceInstance, Error> {
    let m = gen::size(rng, 1, caps.max_carrier);
    let v = gen::class(rng, m, caps.max_generators);
    let members: Vec<&EquivRel> = v.members().iter().collect();
    let phi = if rng.random_bool(0.85) {
        gen::rank_in_block(*gen::pick(rng, &members))
    } else {
        gen::map_values(rng, m, m)
    };
    let n = gen::size(rng, 1, caps.max_carrier);
    let alpha = gen::map_values(rng, n, m);
    let beta: Vec<usize> = if rng.random_bool(beta_equal) {
        alpha.clone()
    } else {
        alpha
            .iter()
            .map(|&y| if rng.random_bool(0.5) { y } else { fiber_pick(rng, &phi, y) })
            .collect()
    };
    // rich, and usually making both maps continuous
    let mut gens = vec![EquivRel::full(gen::carrier(n))];
    gens.extend(preimages(&v, &alpha)?);
    if rng.random_bool(0.85) {
        gens.extend(preimages(&v, &beta)?);
    }
    if rng.random_bool(0.3) {
        gens.push(gen::relation(rng, n));
    }
    let u = UeqClass::generate(gen::carrier(n), gens)?;
    Ok(CoincidenceInstance {
        alpha: space_map(&u, &v, alpha)?,
        beta: space_map(&u, &v, beta)?,
        u,
        v,
        phi,
    })
}

fn coincidence_open(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let inst = coincidence_instance(rng, caps, 0.1)?;
    inst.record(tr);
    if !inst.premises_hold()? {
        return Ok(Outcome::Vacuous);
    }
    let c = coincidence_set(&inst.alpha, &inst.beta)?;
    if c.is_empty() {
        return Ok(Outcome::Vacuous);
    }
    if !is_u_open_subset(&inst.u, &c)? {
        return Ok(Outcome::Fail(format!("coincidence set {:?} is not open", c.to_vec())));
    }
    // the block that witnesses openness in the argument
    let v0 = inst.transversal_member()?.expect("transverse");
    let u0 = v0
        .preimage(inst.alpha.values())?
        .meet(&v0.preimage(inst.beta.values())?)?;
    let inside = c.iter().all(|x| u0.block_of(x).map(|b| b.is_subset(&c)).unwrap_or(false));
    Ok(Outcome::expect(inside, || {
        "pulled-back transversal member has a block leaving the coincidence set".into()
    }))
}

fn open_u_surjection(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let m = gen::size(rng, 1, caps.max_carrier);
    let n = gen::size(rng, m, caps.max_carrier);
    let u = gen::rich_class(rng, n, caps.max_generators);
    let mut gens = gen::class(rng, m, caps.max_generators).generators().to_vec();
    if rng.random_bool(0.7) {
        gens.push(EquivRel::delta(gen::carrier(m)));
    }
    let v = UeqClass::generate(gen::carrier(m), gens)?;
    let f = if rng.random_bool(0.6) {
        gen::surjection(rng, n, m)
    } else {
        gen::map_values(rng, n, m)
    };
    let map = space_map(&u, &v, f)?;
    tr.map("map", &map);
    if !(map.is_u_surjection() && map.is_open_map()) {
        return Ok(Outcome::Vacuous);
    }
    Ok(Outcome::expect(map.is_surjective(), || {
        "open u-surjection from a rich space is not surjective".into()
    }))
}

fn open_dense_full(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let n = gen::size(rng, 1, caps.max_carrier);
    let c = gen::rich_class(rng, n, caps.max_generators);
    let a = if rng.random_bool(0.5) {
        ElementSet::full(n)
    } else {
        saturated_or_random(rng, &c)?
    };
    tr.subset("subset", &c, &a);
    if !(is_u_open_subset(&c, &a)? && is_dense(&c, &a)?) {
        return Ok(Outcome::Vacuous);
    }
    Ok(Outcome::expect(a.is_full(), || "open dense subset is proper".into()))
}

fn dense_coincidence(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let inst = coincidence_instance(rng, caps, 0.5)?;
    inst.record(tr);
    if !inst.premises_hold()? {
        return Ok(Outcome::Vacuous);
    }
    let c = coincidence_set(&inst.alpha, &inst.beta)?;
    if !is_dense(&inst.u, &c)? {
        return Ok(Outcome::Vacuous);
    }
    Ok(Outcome::expect(inst.alpha.values() == inst.beta.values(), || {
        "maps differ despite a dense coincidence set".into()
    }))
}

fn connected_or_random(rng: &mut TrialRng, n: usize, caps: &Caps) -> UeqClass {
    if rng.random_bool(0.6) {
        gen::connected_class(n)
    } else {
        gen::class(rng, n, caps.max_generators)
    }
}

fn connected_dense(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let n = gen::size(rng, 1, caps.max_carrier);
    let c = connected_or_random(rng, n, caps);
    let a = gen::nonempty_subset(rng, n);
    tr.subset("subset", &c, &a);
    // closure(U[A]) ⊆ U[U[A]] ⊆ U[A] in any space
    let t = induce_topology(&c);
    for u in c.members() {
        let ua = u.saturate(&a)?;
        let uua = u.saturate(&ua)?;
        if !(t.closure(&ua).is_subset(&uua) && uua.is_subset(&ua)) {
            return Ok(Outcome::Fail(format!("closure inclusions fail for {u:?}")));
        }
    }
    if !is_connected(&c)? {
        return Ok(Outcome::Vacuous);
    }
    for s in nonempty_subsets(c.carrier()) {
        if !is_dense(&c, &s)? {
            return Ok(Outcome::Fail(format!("{:?} is not dense", s.to_vec())));
        }
    }
    Ok(Outcome::Pass)
}

fn connected_open(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let n = gen::size(rng, 1, caps.max_carrier.min(5));
    let c = connected_or_random(rng, n, caps);
    tr.space("space", &c);
    if !is_connected(&c)? {
        return Ok(Outcome::Vacuous);
    }
    for s in nonempty_subsets(c.carrier()) {
        if is_u_open_subset(&c, &s)? && !s.is_full() {
            return Ok(Outcome::Fail(format!("{:?} is open and proper", s.to_vec())));
        }
    }
    Ok(Outcome::Pass)
}

fn connected_coincidence(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let m = gen::size(rng, 1, caps.max_carrier);
    let v = gen::class(rng, m, caps.max_generators);
    let members: Vec<&EquivRel> = v.members().iter().collect();
    let phi = if rng.random_bool(0.8) {
        gen::rank_in_block(*gen::pick(rng, &members))
    } else {
        gen::map_values(rng, m, m)
    };
    let n = gen::size(rng, 1, caps.max_carrier);
    let u = if rng.random_bool(0.7) {
        gen::connected_class(n)
    } else {
        gen::rich_class(rng, n, caps.max_generators)
    };
    // continuity from a connected space pins the image inside one bottom block
    let bottom = v.bottom();
    let block = bottom.block_of(rng.random_range(0..m))?.to_vec();
    let alpha: Vec<usize> = (0..n).map(|_| *gen::pick(rng, &block)).collect();
    let beta: Vec<usize> = if rng.random_bool(0.5) {
        alpha.clone()
    } else {
        alpha
            .iter()
            .enumerate()
            .map(|(x, &y)| {
                if x == 0 || rng.random_bool(0.5) {
                    y
                } else {
                    fiber_pick(rng, &phi, y)
                }
            })
            .collect()
    };
    let inst = CoincidenceInstance {
        alpha: space_map(&u, &v, alpha)?,
        beta: space_map(&u, &v, beta)?,
        u,
        v,
        phi,
    };
    inst.record(tr);
    let meets = !coincidence_set(&inst.alpha, &inst.beta)?.is_empty();
    if !(inst.premises_hold()? && meets && is_connected(&inst.u)?) {
        return Ok(Outcome::Vacuous);
    }
    Ok(Outcome::expect(inst.alpha.values() == inst.beta.values(), || {
        "maps agree at a point of a connected space but differ".into()
    }))
}

// ------------------------------------------------------------- section 4

fn homeomorphic_uniformisable(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let m = gen::size(rng, 1, caps.max_carrier);
    let v = gen::class(rng, m, caps.max_generators);
    let f = gen::injection(rng, m, m);
    let mut f_inv = vec![0; m];
    for (x, &y) in f.iter().enumerate() {
        f_inv[y] = x;
    }
    let tv = induce_topology(&v);
    let t = tv.transport(&f_inv)?;
    tr.topology("topology", &t);
    tr.space("target", &v);
    tr.values("map", &f);
    if !is_topological_embedding(&t, &tv, &f)? {
        return Ok(Outcome::Fail("transported topology is not homeomorphic".into()));
    }
    let u = induced_class(gen::carrier(m), &[(&f, &v)])?;
    if !induce_topology(&u).equals(&t)? {
        return Ok(Outcome::Fail("pulled-back class does not induce the topology".into()));
    }
    Ok(Outcome::expect(uniformising_class(&t).is_some(), || {
        "no uniformising class found".into()
    }))
}

fn relative_is_subspace(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let n = gen::size(rng, 1, caps.max_carrier);
    let c = gen::class(rng, n, caps.max_generators);
    let y = gen::nonempty_subset(rng, n);
    tr.subset("subset", &c, &y);
    Ok(Outcome::expect(relative_agrees_with_subspace(&c, &y)?, || {
        "relative class induces a different topology than the subspace".into()
    }))
}

pub fn relative_agrees_with_subspace(c: &UeqClass, y: &ElementSet) -> Result<bool, Error> {
    let rel = c.relative(y)?;
    let sub = induce_topology(c).subspace(y)?;
    Ok(rel.inclusion == sub.inclusion && induce_topology(&rel.class).equals(&sub.topology)?)
}

fn embedding_pullback(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let m = gen::size(rng, 1, caps.max_carrier);
    let v = gen::class(rng, m, caps.max_generators);
    let n = gen::size(rng, 1, m);
    let f = gen::injection(rng, n, m);
    let tv = induce_topology(&v);
    let t = if rng.random_bool(0.7) {
        let nbhds = (0..n)
            .map(|x| ElementSet::from_elements(n, (0..n).filter(|&z| tv.min_nbhd(f[x]).contains(f[z]))))
            .collect();
        FiniteTopology::from_min_nbhds(gen::carrier(n), nbhds)?
    } else {
        induce_topology(&gen::class(rng, n, caps.max_generators))
    };
    tr.topology("topology", &t);
    tr.space("target", &v);
    tr.values("map", &f);
    if !is_topological_embedding(&t, &tv, &f)? {
        return Ok(Outcome::Vacuous);
    }
    let u = induced_class(gen::carrier(n), &[(&f, &v)])?;
    Ok(Outcome::expect(induce_topology(&u).equals(&t)?, || {
        "pulled-back class does not induce the embedded topology".into()
    }))
}

fn transitivity(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let n = gen::size(rng, 1, caps.max_carrier);
    let d = if rng.random_bool(0.5) {
        gen::transitive_metric(rng, n).metric().clone()
    } else {
        gen::line_metric(rng, n)
    };
    tr.metric("metric", &d);
    let swept = d.is_transitive()?;
    let sampled = oracle::transitive_by_sampling(&d);
    if swept != sampled {
        return Ok(Outcome::Fail(format!("sweep says {swept}, sampling says {sampled}")));
    }
    if !swept {
        return Ok(Outcome::Pass);
    }
    let t = ueq_core::TransitivePseudoMetric::new(d.clone())?;
    let grid = oracle::radius_grid(&d);
    let balls = grid
        .iter()
        .map(|&r| t.ball_relation(r))
        .collect::<Result<Vec<_>, _>>()?;
    for pair in balls.windows(2) {
        if !pair[0].refines(&pair[1])? {
            return Ok(Outcome::Fail("ball relations are not nested".into()));
        }
    }
    let distinct: BTreeSet<&EquivRel> = balls.iter().collect();
    let swept = t.class();
    let swept_members: BTreeSet<&EquivRel> = swept.members().iter().collect();
    Ok(Outcome::expect(distinct == swept_members, || {
        "critical-radius class misses a ball relation".into()
    }))
}

/// Per-metric topologies and their product.
fn factor_product_topology(fam: &MetricFamily) -> Result<FiniteTopology, Error> {
    let tops = fam
        .metrics()
        .iter()
        .map(|m| MetricFamily::new(vec![m.clone()])?.topology())
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&FiniteTopology> = tops.iter().collect();
    Ok(product_topology(&refs)?.1)
}

fn small_rich_class(rng: &mut TrialRng, caps: &Caps) -> UeqClass {
    let n = gen::size(rng, 1, caps.max_carrier.min(4));
    gen::rich_class(rng, n, 3)
}

fn metric_product_chain(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let c = small_rich_class(rng, caps);
    let n = c.carrier().size();
    let fam = MetricFamily::from_class(&c);
    let eval = fam.evaluation_embedding()?;
    let t = if rng.random_bool(0.7) {
        fam.topology()?
    } else {
        induce_topology(&gen::class(rng, n, caps.max_generators))
    };
    tr.family("family", &fam);
    tr.topology("topology", &t);
    let pt = factor_product_topology(&fam)?;
    if !is_topological_embedding(&t, &pt, eval.map.values())? {
        return Ok(Outcome::Vacuous);
    }
    let u = induced_class(gen::carrier(n), &[(eval.map.values(), eval.map.target())])?;
    Ok(Outcome::expect(induce_topology(&u).equals(&t)?, || {
        "class pulled back from the metric product does not induce the topology".into()
    }))
}

fn random_family(rng: &mut TrialRng, caps: &Caps) -> Result<MetricFamily, Error> {
    let n = gen::size(rng, 1, caps.max_carrier);
    let k = gen::size(rng, 1, 2);
    MetricFamily::new((0..k).map(|_| gen::transitive_metric(rng, n)).collect())
}

fn family_topology(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let fam = random_family(rng, caps)?;
    tr.family("family", &fam);
    // the sub-base and class constructions are compared inside topology()
    let t = fam.topology()?;
    let oracle_opens = oracle::metric_ball_topology(fam.metrics());
    let opens: BTreeSet<Vec<usize>> = t.opens().iter().map(ElementSet::to_vec).collect();
    Ok(Outcome::expect(opens == oracle_opens, || {
        "ball topology on the dense radius grid differs".into()
    }))
}

fn evaluation_embedding(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let fam = random_family(rng, caps)?;
    tr.family("family", &fam);
    Ok(Outcome::expect(fam.evaluation_embedding()?.map.is_u_embedding()?, || {
        "evaluation map is not an embedding".into()
    }))
}

/// Round trip of a rich class through its two-valued metrics, followed by
/// the topological evaluation embedding.
pub fn round_trip_holds(c: &UeqClass) -> Result<Result<(), String>, Error> {
    let fam = MetricFamily::from_class(c);
    if !fam.class().same_members(c) {
        return Ok(Err("metric family generates a different class".into()));
    }
    let eval = fam.evaluation_embedding()?;
    if !eval.map.is_u_embedding()? {
        return Ok(Err("evaluation map is not a u-embedding".into()));
    }
    let pt = factor_product_topology(&fam)?;
    if !is_topological_embedding(&fam.topology()?, &pt, eval.map.values())? {
        return Ok(Err("evaluation map is not a topological embedding".into()));
    }
    Ok(Ok(()))
}

fn round_trip(rng: &mut TrialRng, caps: &Caps, tr: &mut Trace) -> CheckResult {
    let c = small_rich_class(rng, caps);
    tr.space("space", &c);
    if let Err(why) = round_trip_holds(&c)? {
        return Ok(Outcome::Fail(why));
    }
    // a class without X² comes back with exactly X² added
    let n = c.carrier().size();
    let plain = gen::class(rng, n, 3);
    tr.space("plain", &plain);
    let back = MetricFamily::from_class(&plain).class();
    let mut expected: BTreeSet<EquivRel> = plain.members().clone();
    expected.insert(EquivRel::full(gen::carrier(n)));
    Ok(Outcome::expect(back.members() == &expected, || {
        "round trip of a class changes more than adding the full relation".into()
    }))
}
