//! Reference path consistency over binary networks, plus brute-force
//! atomic enumeration. Both are deliberately naive; they exist to check
//! the relation-variable model against.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bitset::ValueSet;
use crate::calculi::Calculus;
use crate::engine::{Propagation, VarId};
use crate::scenarios::{build, AspectDecl, Decision, Network, Scenario};

/// Largest network [`enumerate_atomic`] accepts.
pub const MAX_ENUMERATION_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{n} objects exceed the enumeration limit of {MAX_ENUMERATION_SIZE}")]
    TooLarge { n: usize },
}

/// `n × n` relation sets over one calculus, with `rel[i][i] = {identity}`
/// and `rel[j][i]` kept equal to the converse of `rel[i][j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryNetwork {
    calculus: Arc<Calculus>,
    n: usize,
    rel: Vec<ValueSet>,
}

impl BinaryNetwork {
    /// All off-diagonal cells full.
    pub fn new(calculus: Arc<Calculus>, n: usize) -> Self {
        let mut rel = vec![calculus.full(); n * n];
        for i in 0..n {
            rel[i * n + i] = ValueSet::singleton(calculus.identity());
        }
        BinaryNetwork { calculus, n, rel }
    }

    pub fn calculus(&self) -> &Arc<Calculus> {
        &self.calculus
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> ValueSet {
        self.rel[i * self.n + j]
    }

    /// Intersects `rel[i][j]` with `set`, and `rel[j][i]` with its converse.
    pub fn constrain(&mut self, i: usize, j: usize, set: &ValueSet) {
        let n = self.n;
        let ij = self.rel[i * n + j].intersection(set);
        let ji = self.rel[j * n + i].intersection(&self.calculus.converse_set(&ij));
        self.rel[j * n + i] = ji;
        self.rel[i * n + j] = self.calculus.converse_set(&ji);
    }

    pub fn has_empty_cell(&self) -> bool {
        self.rel.iter().any(ValueSet::is_empty)
    }

    pub fn cells(&self) -> &[ValueSet] {
        &self.rel
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PcOutcome {
    Fixpoint(BinaryNetwork),
    EmptyRelation,
}

/// PC-1: sweeps every triple `(i, j, k)` with
/// `rel[i][k] ∩= rel[i][j] ∘ rel[j][k]` until a sweep changes nothing.
pub fn pc_enforce(net: &BinaryNetwork) -> PcOutcome {
    let mut net = net.clone();
    let n = net.n;
    if net.has_empty_cell() {
        return PcOutcome::EmptyRelation;
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let via = net.calculus.compose_sets(&net.get(i, j), &net.get(j, k));
                    let before = net.get(i, k);
                    let after = before.intersection(&via);
                    if after != before {
                        net.constrain(i, k, &after);
                        if net.get(i, k).is_empty() {
                            return PcOutcome::EmptyRelation;
                        }
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return PcOutcome::Fixpoint(net);
        }
    }
}

/// Outcome of [`enumerate_atomic`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enumeration {
    /// One base relation per ordered pair (row-major, diagonal included).
    Consistent(Vec<usize>),
    Inconsistent,
}

/// Searches base-relation choices pair by pair, checking every triple of
/// assigned pairs against the composition table. No propagation.
pub fn enumerate_atomic(net: &BinaryNetwork) -> Result<Enumeration, OracleError> {
    let mut first = None;
    count_atomic(net, Some(1), |w| first = Some(w.to_vec()))?;
    Ok(match first {
        Some(w) => Enumeration::Consistent(w),
        None => Enumeration::Inconsistent,
    })
}

/// Counts atomic refinements (up to `limit`), passing each to `witness`.
pub fn count_atomic(
    net: &BinaryNetwork,
    limit: Option<usize>,
    mut witness: impl FnMut(&[usize]),
) -> Result<usize, OracleError> {
    let n = net.n;
    if n > MAX_ENUMERATION_SIZE {
        return Err(OracleError::TooLarge { n });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut atom = vec![usize::MAX; n * n];
    for i in 0..n {
        atom[i * n + i] = net.calculus.identity();
    }
    let mut count = 0;
    go(net, &pairs, 0, &mut atom, &mut count, limit, &mut witness);
    Ok(count)
}

fn go(
    net: &BinaryNetwork,
    pairs: &[(usize, usize)],
    at: usize,
    atom: &mut [usize],
    count: &mut usize,
    limit: Option<usize>,
    witness: &mut dyn FnMut(&[usize]),
) {
    if limit.is_some_and(|l| *count >= l) {
        return;
    }
    let n = net.n;
    let c = &net.calculus;
    let Some(&(i, j)) = pairs.get(at) else {
        *count += 1;
        witness(atom);
        return;
    };
    for r in net.get(i, j).iter() {
        let r_inv = c.converse(r);
        if !net.get(j, i).contains(r_inv) {
            continue;
        }
        atom[i * n + j] = r;
        atom[j * n + i] = r_inv;
        // every triple through (i, j) whose other two pairs are assigned
        let ok = (0..n).filter(|&k| k != i && k != j).all(|k| {
            let (ik, kj) = (atom[i * n + k], atom[k * n + j]);
            if ik == usize::MAX || kj == usize::MAX {
                return true;
            }
            let triple_ok = |a: usize, b: usize, m: usize| c.compose(atom[a * n + m], atom[m * n + b]).contains(atom[a * n + b]);
            triple_ok(i, j, k) && triple_ok(i, k, j) && triple_ok(k, j, i) && triple_ok(j, i, k) && triple_ok(k, i, j) && triple_ok(j, k, i)
        });
        if ok {
            go(net, pairs, at + 1, atom, count, limit, witness);
        }
        atom[i * n + j] = usize::MAX;
        atom[j * n + i] = usize::MAX;
        if limit.is_some_and(|l| *count >= l) {
            return;
        }
    }
}

/// Cell-by-cell comparison of path consistency against GAC on the
/// relation-variable model of the same network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcGacReport {
    /// `None` when PC emptied a relation.
    pub pc: Option<Vec<ValueSet>>,
    /// `None` when propagation failed.
    pub gac: Option<Vec<ValueSet>>,
    /// Off-diagonal cells where both reached a fixpoint but differ.
    pub mismatches: Vec<(usize, usize)>,
}

impl PcGacReport {
    pub fn equal(&self) -> bool {
        match (&self.pc, &self.gac) {
            (None, None) => true,
            (Some(_), Some(_)) => self.mismatches.is_empty(),
            _ => false,
        }
    }
}

/// Runs [`pc_enforce`] and the scenario pipeline on `net` and compares.
pub fn compare_pc_gac(net: &BinaryNetwork) -> PcGacReport {
    let n = net.n;
    let pc = match pc_enforce(net) {
        PcOutcome::Fixpoint(f) => Some(f.rel),
        PcOutcome::EmptyRelation => None,
    };

    let (mut network, vars) = relation_network(net);
    let gac = match network.store_mut().propagate() {
        Propagation::Failure => None,
        Propagation::Fixpoint => Some(
            vars.iter()
                .enumerate()
                .map(|(cell, v)| match v {
                    Some(v) => *network.store().domain(*v).bits(),
                    None => net.rel[cell],
                })
                .collect::<Vec<_>>(),
        ),
    };

    let mut mismatches = Vec::new();
    if let (Some(p), Some(g)) = (&pc, &gac) {
        for i in 0..n {
            for j in 0..n {
                if i != j && p[i * n + j] != g[i * n + j] {
                    mismatches.push((i, j));
                }
            }
        }
    }
    PcGacReport { pc, gac, mismatches }
}

impl BinaryNetwork {
    /// The relation-variable model: one aspect named `rel` over objects
    /// `o0, o1, ...`, each cell's set imposed on its variable. Also returns
    /// the variable of each cell (`None` on the diagonal).
    pub fn to_network(&self) -> (Network, Vec<Option<VarId>>) {
        relation_network(self)
    }
}

fn relation_network(net: &BinaryNetwork) -> (Network, Vec<Option<VarId>>) {
    let n = net.n;
    let mut scenario = Scenario::new((0..n).map(|i| format!("o{i}"))).expect("distinct object names");
    scenario
        .add_aspect(AspectDecl::binary("rel", net.calculus.clone()))
        .expect("single aspect");
    let mut network = build(&scenario).expect("scenario without restrictions builds");
    let vars: Vec<Option<VarId>> = (0..n * n).map(|c| network.var_at(0, 0, &[c / n, c % n])).collect();
    for (cell, var) in vars.iter().enumerate() {
        if let Some(v) = var {
            network.store_mut().restrict(*v, &net.rel[cell]);
        }
    }
    (network, vars)
}

/// True when search on the relation-variable model and [`enumerate_atomic`]
/// reach the same verdict.
pub fn decide_matches_enumeration(net: &BinaryNetwork) -> Result<bool, OracleError> {
    let brute = enumerate_atomic(net)?;
    let (mut network, _) = relation_network(net);
    let searched = network.decide();
    Ok(matches!(
        (brute, searched),
        (Enumeration::Consistent(_), Decision::Consistent(_)) | (Enumeration::Inconsistent, Decision::Inconsistent)
    ))
}

/// Instances of the verification suite: one generator seeded with `seed`,
/// each instance drawing its size uniformly from `3..=max_n`.
pub fn seeded_instances(calculus: Arc<Calculus>, count: usize, max_n: usize, seed: u64) -> Vec<BinaryNetwork> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(3..=max_n.max(3));
            random_network(calculus.clone(), n, &mut rng)
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub instances: usize,
    pub pc_gac_equal: usize,
    /// Instances with at most [`DECIDE_CHECK_SIZE`] objects.
    pub small: usize,
    pub decide_agrees: usize,
    pub inconsistent: usize,
    /// Indices of instances failing either comparison.
    pub failures: Vec<usize>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.pc_gac_equal == self.instances && self.decide_agrees == self.small
    }
}

/// Instances up to this size are also decided and enumerated.
pub const DECIDE_CHECK_SIZE: usize = 4;

/// Compares PC with GAC on every instance, and search with enumeration on
/// the small ones.
pub fn verify(instances: &[BinaryNetwork]) -> VerifyReport {
    let mut report = VerifyReport {
        instances: instances.len(),
        ..Default::default()
    };
    for (idx, net) in instances.iter().enumerate() {
        let cmp = compare_pc_gac(net);
        let mut ok = cmp.equal();
        report.pc_gac_equal += ok as usize;
        report.inconsistent += cmp.pc.is_none() as usize;
        if net.len() <= DECIDE_CHECK_SIZE {
            report.small += 1;
            let agrees = decide_matches_enumeration(net).expect("small instance");
            report.decide_agrees += agrees as usize;
            ok &= agrees;
        }
        if !ok {
            report.failures.push(idx);
        }
    }
    report
}

/// Each pair `i < j` keeps every base relation independently with
/// probability 1/2 (redrawn if nothing is kept); `rel[j][i]` is the
/// converse.
pub fn random_network<R: Rng + ?Sized>(calculus: Arc<Calculus>, n: usize, rng: &mut R) -> BinaryNetwork {
    let mut net = BinaryNetwork::new(calculus, n);
    let k = net.calculus.size();
    for i in 0..n {
        for j in i + 1..n {
            let set = loop {
                let s: ValueSet = (0..k).filter(|_| rng.gen_bool(0.5)).collect();
                if !s.is_empty() {
                    break s;
                }
            };
            net.constrain(i, j, &set);
        }
    }
    net
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculi::{derive_point_cd, derive_size_pa, load_rcc8};

    fn rcc8() -> Arc<Calculus> {
        Arc::new(load_rcc8())
    }

    #[test]
    fn full_network_is_a_fixpoint() {
        let net = BinaryNetwork::new(rcc8(), 5);
        assert_eq!(pc_enforce(&net), PcOutcome::Fixpoint(net.clone()));
        assert!(compare_pc_gac(&net).equal());
    }

    #[test]
    fn pc_prunes_through_composition() {
        let c = rcc8();
        let i = |s| c.index_of(s).unwrap();
        let mut net = BinaryNetwork::new(c.clone(), 3);
        net.constrain(0, 1, &ValueSet::singleton(i("NTPP")));
        net.constrain(1, 2, &ValueSet::singleton(i("EC")));
        let PcOutcome::Fixpoint(f) = pc_enforce(&net) else {
            panic!()
        };
        assert!(!f.get(0, 2).contains(i("NTPP")));
        assert_eq!(f.get(0, 2), c.compose(i("NTPP"), i("EC")));
        assert_eq!(f.get(2, 0), c.converse_set(&f.get(0, 2)));

        net.constrain(0, 2, &ValueSet::singleton(i("NTPP")));
        assert_eq!(pc_enforce(&net), PcOutcome::EmptyRelation);
        assert_eq!(enumerate_atomic(&net).unwrap(), Enumeration::Inconsistent);
        assert!(compare_pc_gac(&net).equal());
    }

    #[test]
    fn empty_cell_fails() {
        let mut net = BinaryNetwork::new(rcc8(), 3);
        net.constrain(0, 1, &ValueSet::EMPTY);
        assert_eq!(pc_enforce(&net), PcOutcome::EmptyRelation);
        assert_eq!(enumerate_atomic(&net).unwrap(), Enumeration::Inconsistent);
        let report = compare_pc_gac(&net);
        assert!(report.equal() && report.pc.is_none() && report.gac.is_none());
    }

    #[test]
    fn enumeration_examples() {
        let c = rcc8();
        let mut two = BinaryNetwork::new(c.clone(), 2);
        two.constrain(0, 1, &ValueSet::singleton(c.index_of("TPP").unwrap()));
        assert!(matches!(enumerate_atomic(&two).unwrap(), Enumeration::Consistent(_)));
        assert_eq!(count_atomic(&BinaryNetwork::new(c.clone(), 3), None, |_| {}).unwrap(), 193);
        assert_eq!(count_atomic(&BinaryNetwork::new(c.clone(), 2), None, |_| {}).unwrap(), 8);
        assert_eq!(count_atomic(&BinaryNetwork::new(Arc::new(derive_size_pa()), 3), None, |_| {}).unwrap(), 13);
        assert_eq!(
            enumerate_atomic(&BinaryNetwork::new(c, 6)),
            Err(OracleError::TooLarge { n: 6 })
        );
    }

    #[test]
    fn witnesses_are_closed() {
        let c = rcc8();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let net = random_network(c.clone(), 4, &mut rng);
            count_atomic(&net, Some(50), |w| {
                for a in 0..4 {
                    for b in 0..4 {
                        assert!(net.get(a, b).contains(w[a * 4 + b]));
                        assert_eq!(w[b * 4 + a], c.converse(w[a * 4 + b]));
                        for m in 0..4 {
                            assert!(c.compose(w[a * 4 + m], w[m * 4 + b]).contains(w[a * 4 + b]));
                        }
                    }
                }
            })
            .unwrap();
        }
    }

    #[test]
    fn pc_properties_on_random_networks() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for calc in [rcc8(), Arc::new(derive_point_cd())] {
            for _ in 0..100 {
                let n = rng.gen_range(3..=5);
                let net = random_network(calc.clone(), n, &mut rng);
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(net.get(j, i), calc.converse_set(&net.get(i, j)));
                    }
                }
                let out = pc_enforce(&net);
                if let PcOutcome::Fixpoint(f) = &out {
                    // idempotent and pointwise below the input
                    assert_eq!(pc_enforce(f), out);
                    for (a, b) in f.cells().iter().zip(net.cells()) {
                        assert!(a.is_subset(b));
                    }
                }
                // soundness: a closed atomic refinement survives PC
                if let Enumeration::Consistent(w) = enumerate_atomic(&net).unwrap() {
                    let PcOutcome::Fixpoint(f) = &out else {
                        panic!("PC rejected a consistent network")
                    };
                    for (cell, &r) in w.iter().enumerate() {
                        assert!(f.cells()[cell].contains(r));
                    }
                }
            }
        }
    }

    #[test]
    fn verify_is_deterministic() {
        let a = verify(&seeded_instances(rcc8(), 40, 5, 3));
        let b = verify(&seeded_instances(rcc8(), 40, 5, 3));
        assert_eq!(a, b);
        assert!(a.passed(), "{a:?}");
        assert!(a.small > 0 && a.small < a.instances);
        let empty = verify(&[]);
        assert!(empty.passed() && empty.instances == 0);
    }

    #[test]
    fn pc_matches_gac() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for calc in [rcc8(), Arc::new(derive_size_pa()), Arc::new(derive_point_cd())] {
            for _ in 0..60 {
                let n = rng.gen_range(3..=6);
                let net = random_network(calc.clone(), n, &mut rng);
                let r = compare_pc_gac(&net);
                assert!(r.equal(), "{} n={n}: {:?}", calc.name(), r.mismatches);
            }
        }
    }
}
