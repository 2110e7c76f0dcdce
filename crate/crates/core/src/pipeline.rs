//! Relation discovery among finite multiple zeta values of a fixed weight.
//!
//! Every index of `K_w` is represented by its tuple of mod-`p_l` harmonic
//! sums. The tuples are scanned in canonical order with a dynamic MITM search
//! whose dictionary is keyed by the first `L^L` coordinates only; a bucket hit
//! is confirmed on the remaining `L - L^L` coordinates. Indices that no bounded
//! combination of earlier generators reaches become basis elements.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dynamic::RebuildPolicy;
use crate::error::{Error, Result};
use crate::harmonic::{check_primes, mod_harmonic_sums, HarmonicSums};
use crate::indices::{k_count, Index};
use crate::mitm::{tuples, BucketStorage, CoefficientArray, MitmDictionary};
use crate::modarith::{add_mod, modulus_product, mul_mod, reduce_signed, sub_mod, Prime};

/// Default for [`PipelineConfig::safety_factor`].
pub const DEFAULT_SAFETY_FACTOR: u64 = 1_000_000;

/// How many coordinates key the dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitPolicy {
    /// Start at 0 and grow with the `CostL` comparison whenever `D^L` grows.
    #[default]
    CostModel,
    /// Fixed key length, clamped to the prime count.
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub weight: u32,
    pub primes: Vec<Prime>,
    pub bound: u32,
    pub safety_factor: u64,
    pub workers: usize,
    pub keys_only: bool,
    pub rebuild: RebuildPolicy,
    pub split: SplitPolicy,
}

impl PipelineConfig {
    pub fn new(weight: u32, primes: Vec<Prime>, bound: u32) -> Self {
        PipelineConfig {
            weight,
            primes,
            bound,
            safety_factor: DEFAULT_SAFETY_FACTOR,
            workers: 1,
            keys_only: false,
            rebuild: RebuildPolicy::CostModel,
            split: SplitPolicy::CostModel,
        }
    }

    /// Primes must be distinct and exceed both the bound and the weight.
    pub fn validate(&self) -> Result<()> {
        if self.primes.is_empty() {
            return Err(Error::Config("at least one prime is required".into()));
        }
        check_primes(&self.primes, self.bound.max(self.weight) as u64).map_err(|e| match e {
            Error::DuplicatePrime(p) => Error::Config(format!("duplicate prime {p}")),
            Error::PrimeTooSmall { prime, .. } => Error::Config(format!(
                "prime {prime} must exceed the bound {} and the weight {}",
                self.bound, self.weight
            )),
            other => other,
        })
    }

    /// `N = Π p_l`.
    pub fn modulus(&self) -> BigUint {
        modulus_product(&self.primes)
    }
}

/// `B^{D^L}·L^L + (H - h)·B^{D^R + 1}·⌊B^{D^L} / N⌋`, saturating at `u64::MAX`.
#[allow(clippy::too_many_arguments)]
pub fn cost_l(
    bound: u64,
    _generators: u32,
    left_len: u32,
    right_len: u32,
    total: u64,
    processed: u64,
    key_len: u32,
    partial_modulus: &BigUint,
) -> u64 {
    assert!(processed <= total, "h must not exceed H");
    assert!(!partial_modulus.is_zero(), "N must be positive");
    let b = BigUint::from(bound);
    let left = b.pow(left_len);
    let cost = &left * BigUint::from(key_len)
        + BigUint::from(total - processed) * b.pow(right_len + 1) * (&left / partial_modulus);
    cost.to_u64().unwrap_or(u64::MAX)
}

/// `d_w` from `d_w = d_{w-2} + d_{w-3}` with `d_0 = d_3 = 1`, `d_1 = d_2 = 0`.
pub fn dimension_recursion(w: u32) -> u64 {
    let mut d = vec![1u64, 0, 0, 1];
    for i in 4..=w as usize {
        d.push(d[i - 2] + d[i - 3]);
    }
    d[w as usize]
}

#[derive(Debug, Clone, PartialEq)]
pub enum GuardVerdict {
    Pass,
    /// `N / threshold`.
    Warning(f64),
}

/// Comparison of `N` against the accidental-vanishing threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct GuardReport {
    pub modulus: BigUint,
    /// `#K_w · B^{2d + 2}`.
    pub threshold: BigUint,
    /// `#K_w · B^d`, the smaller figure used in the weight-10 discussion.
    pub short_threshold: BigUint,
    pub safety_factor: u64,
    pub verdict: GuardVerdict,
    /// Verdict against `short_threshold`.
    pub short_verdict: GuardVerdict,
}

fn ratio(n: &BigUint, t: &BigUint) -> f64 {
    let (nf, tf) = (
        n.to_f64().unwrap_or(f64::INFINITY),
        t.to_f64().unwrap_or(f64::INFINITY),
    );
    nf / tf
}

/// Pass iff `N >= safety_factor · #K_w · B^{2d+2}`.
pub fn vanishing_guard(config: &PipelineConfig, d_estimate: u32) -> GuardReport {
    let n = config.modulus();
    let count = BigUint::from(k_count(config.weight));
    let b = BigUint::from(config.bound);
    let threshold = &count * b.pow(2 * d_estimate + 2);
    let short_threshold = &count * b.pow(d_estimate);
    let verdict_for = |t: &BigUint| {
        if t.is_zero() || n >= t * BigUint::from(config.safety_factor) {
            GuardVerdict::Pass
        } else {
            GuardVerdict::Warning(ratio(&n, t))
        }
    };
    GuardReport {
        verdict: verdict_for(&threshold),
        short_verdict: verdict_for(&short_threshold),
        modulus: n,
        threshold,
        short_threshold,
        safety_factor: config.safety_factor,
    }
}

/// `Σ_i coefficients[i]·ζ(basis[i]) + coefficients[last]·ζ(target) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationRecord {
    pub basis: Vec<Index>,
    pub target: Index,
    pub coefficients: Vec<i64>,
}

impl RelationRecord {
    /// The trivial record for an index whose residue vector vanishes.
    pub fn vanishing(basis: Vec<Index>, target: Index) -> Self {
        let mut coefficients = vec![0; basis.len()];
        coefficients.push(1);
        RelationRecord {
            basis,
            target,
            coefficients,
        }
    }

    pub fn target_coefficient(&self) -> i64 {
        *self.coefficients.last().expect("target coefficient")
    }

    fn terms(&self) -> impl Iterator<Item = (&Index, i64)> + '_ {
        self.basis
            .iter()
            .chain(std::iter::once(&self.target))
            .zip(self.coefficients.iter().copied())
    }

    /// Common weight of all indices.
    pub fn weight(&self) -> Result<u32> {
        let w = self.target.weight();
        for k in &self.basis {
            if k.weight() != w {
                return Err(Error::WeightMismatch(k.weight(), w));
            }
        }
        Ok(w)
    }
}

/// Per-prime residues of a relation's linear combination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub primes: Vec<u64>,
    pub residues: Vec<u64>,
}

impl VerificationReport {
    pub fn holds(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }
}

/// Evaluates a relation against precomputed harmonic sums of its weight.
pub fn verify_relation_with(
    rec: &RelationRecord,
    sums: &HarmonicSums,
) -> Result<VerificationReport> {
    let w = rec.weight()?;
    if w != sums.weight() {
        return Err(Error::WeightMismatch(w, sums.weight()));
    }
    if rec.coefficients.len() != rec.basis.len() + 1 {
        return Err(Error::Parse(format!(
            "relation for {} has {} coefficients for {} basis elements",
            rec.target,
            rec.coefficients.len(),
            rec.basis.len()
        )));
    }
    let primes = sums.primes();
    let mut residues = vec![0u64; primes.len()];
    for (k, c) in rec.terms() {
        let v = sums.get(k).expect("every weight-w index has sums");
        for (l, p) in primes.iter().enumerate() {
            let m = p.get();
            residues[l] = add_mod(
                residues[l],
                mul_mod(reduce_signed(c, m), v.entries[l].value(), m),
                m,
            );
        }
    }
    Ok(VerificationReport {
        primes: primes.iter().map(|p| p.get()).collect(),
        residues,
    })
}

/// Recomputes the harmonic sums and evaluates the relation modulo each prime.
pub fn verify_relation(rec: &RelationRecord, primes: &[Prime]) -> Result<VerificationReport> {
    let w = rec.weight()?;
    let tree = crate::indices::IndexTree::from_indices(rec.basis.iter().chain([&rec.target]));
    check_primes(primes, w as u64)?;
    let tables: Vec<_> = primes
        .iter()
        .map(|&p| crate::harmonic::parallel_horizontal_dp(p, &tree))
        .collect();
    let mut residues = Vec::with_capacity(primes.len());
    for table in &tables {
        let m = table.prime().get();
        let r = rec.terms().fold(0u64, |acc, (k, c)| {
            let v = table.get(k).expect("index is a tree node").value();
            add_mod(acc, mul_mod(reduce_signed(c, m), v, m), m)
        });
        residues.push(r);
    }
    Ok(VerificationReport {
        primes: primes.iter().map(|p| p.get()).collect(),
        residues,
    })
}

/// How each index of `K_w` was classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Basis,
    ZeroVector,
    Related,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub basis: Vec<Index>,
    /// One record per non-basis index, in canonical order.
    pub relations: Vec<RelationRecord>,
    /// Classification of every index of `K_w`, in canonical order.
    pub classes: Vec<(Index, Classification)>,
    pub left_len: usize,
    pub key_len: usize,
    pub rebuilds: usize,
}

impl PipelineOutput {
    pub fn count(&self, class: Classification) -> usize {
        self.classes.iter().filter(|(_, c)| *c == class).count()
    }
}

/// Packs residues of the first `key_len` primes into a byte key.
struct KeyCodec {
    widths: Vec<usize>,
}

impl KeyCodec {
    fn new(primes: &[Prime]) -> Self {
        let widths = primes
            .iter()
            .map(|p| (64 - (p.get() - 1).leading_zeros() as usize).div_ceil(8))
            .collect();
        KeyCodec { widths }
    }

    fn encode(&self, values: &[u64]) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.widths[..values.len()].iter().sum());
        for (&v, &w) in values.iter().zip(&self.widths) {
            out.extend_from_slice(&v.to_le_bytes()[..w]);
        }
        out
    }
}

struct Search<'a> {
    primes: &'a [Prime],
    coeffs: CoefficientArray,
    codec: KeyCodec,
    storage: BucketStorage,
    /// Residue vectors of accepted generators.
    generators: Vec<Vec<u64>>,
    /// `rows[d][b][l] = c_b · z_{l, x_d} mod p_l`.
    rows: Vec<Vec<Vec<u64>>>,
    left_len: usize,
    key_len: usize,
    partial_modulus: BigUint,
    dict: MitmDictionary<Vec<u8>>,
    rebuilds: usize,
}

impl<'a> Search<'a> {
    fn add_into(&self, acc: &mut [u64], row: &[u64]) {
        for ((a, &r), p) in acc.iter_mut().zip(row).zip(self.primes) {
            *a = add_mod(*a, r, p.get());
        }
    }

    fn neg_key(&self, y: &[u64]) -> Vec<u8> {
        let neg: Vec<u64> = y[..self.key_len]
            .iter()
            .zip(self.primes)
            .map(|(&v, p)| sub_mod(0, v, p.get()))
            .collect();
        self.codec.encode(&neg)
    }

    fn rebuild(&mut self) {
        let left_rows = &self.rows[..self.left_len];
        let key_len = self.key_len;
        let primes = self.primes;
        let codec = &self.codec;
        self.dict = MitmDictionary::build_with(&self.coeffs, self.left_len, self.storage, |t| {
            let mut acc = vec![0u64; key_len];
            for (&b, row) in t.iter().zip(left_rows) {
                for l in 0..key_len {
                    acc[l] = add_mod(acc[l], row[b][l], primes[l].get());
                }
            }
            codec.encode(&acc)
        });
        self.rebuilds += 1;
    }

    /// First `(tuple, c)` with `Σ c_{b_d} x_d + c·z = 0`, scanning `c = 1..=B`,
    /// then right tuples, then bucket entries in ascending order.
    fn find(&self, z: &[u64]) -> Option<(Vec<usize>, i64)> {
        let right_rows = &self.rows[self.left_len..];
        let l_all = self.primes.len();
        for c in 1..=self.coeffs.bound() as i64 {
            let cz: Vec<u64> = z
                .iter()
                .zip(self.primes)
                .map(|(&v, p)| mul_mod(c as u64 % p.get(), v, p.get()))
                .collect();
            for right in tuples(self.coeffs.len(), right_rows.len()) {
                let mut y = cz.clone();
                for (&b, row) in right.iter().zip(right_rows) {
                    self.add_into(&mut y, &row[b]);
                }
                for &rank in self.dict.bucket(&self.neg_key(&y)) {
                    let left = self.coeffs.decode(rank, self.left_len);
                    let mut rest = y[self.key_len..].to_vec();
                    for (&b, row) in left.iter().zip(&self.rows[..self.left_len]) {
                        for (i, l) in (self.key_len..l_all).enumerate() {
                            rest[i] = add_mod(rest[i], row[b][l], self.primes[l].get());
                        }
                    }
                    if rest.iter().all(|&v| v == 0) {
                        let mut tuple = left;
                        tuple.extend_from_slice(&right);
                        return Some((tuple, c));
                    }
                }
            }
        }
        None
    }
}

/// Runs the discovery pipeline on precomputed harmonic sums.
pub fn run_pipeline_on(config: &PipelineConfig, sums: &HarmonicSums) -> Result<PipelineOutput> {
    config.validate()?;
    let primes = sums.primes();
    let l_all = primes.len();
    let coeffs = CoefficientArray::new(config.bound);
    let storage = if config.keys_only {
        BucketStorage::Representative
    } else {
        BucketStorage::Tuples
    };
    let initial_key = match (config.keys_only, config.split) {
        (true, _) => l_all,
        (false, SplitPolicy::Fixed(k)) => k.min(l_all),
        (false, SplitPolicy::CostModel) => 0,
    };
    let codec = KeyCodec::new(primes);
    let mut search = Search {
        primes,
        dict: MitmDictionary::trivial(codec.encode(&vec![0; initial_key]), storage),
        codec,
        coeffs,
        storage,
        generators: Vec::new(),
        rows: Vec::new(),
        left_len: 0,
        key_len: initial_key,
        partial_modulus: modulus_product(&primes[..initial_key]),
        rebuilds: 0,
    };
    let bound = config.bound as u64;
    let vectors = sums.vectors();
    let total = vectors.len() as u64;

    enum Found {
        Zero,
        Relation(Vec<usize>, i64),
        Generator,
    }
    let mut found = Vec::with_capacity(vectors.len());
    for (h, v) in vectors.iter().enumerate() {
        let z = v.values();
        if z.iter().all(|&x| x == 0) {
            found.push(Found::Zero);
            continue;
        }
        if let Some((tuple, c)) = search.find(&z) {
            found.push(Found::Relation(tuple, c));
            continue;
        }
        found.push(Found::Generator);
        search.rows.push(
            search
                .coeffs
                .values()
                .iter()
                .map(|&c| {
                    z.iter()
                        .zip(primes)
                        .map(|(&x, p)| mul_mod(reduce_signed(c, p.get()), x, p.get()))
                        .collect()
                })
                .collect(),
        );
        search.generators.push(z);
        let d = search.generators.len() as u32;
        let right_len = (search.generators.len() - 1 - search.left_len) as u32;
        if config.rebuild.should_grow_left(
            bound,
            search.left_len as u32,
            right_len,
            total,
            h as u64,
        ) {
            search.left_len += 1;
            if config.split == SplitPolicy::CostModel && !config.keys_only && search.key_len < l_all
            {
                let (dl, dr) = (search.left_len as u32, right_len);
                let stay = cost_l(
                    bound,
                    d,
                    dl,
                    dr,
                    total,
                    h as u64,
                    search.key_len as u32,
                    &search.partial_modulus,
                );
                let next_modulus =
                    &search.partial_modulus * BigUint::from(primes[search.key_len].get());
                let grow = cost_l(
                    bound,
                    d,
                    dl,
                    dr,
                    total,
                    h as u64,
                    search.key_len as u32 + 1,
                    &next_modulus,
                );
                if stay > grow {
                    search.key_len += 1;
                    search.partial_modulus = next_modulus;
                }
            }
            search.rebuild();
        }
    }

    let basis: Vec<Index> = vectors
        .iter()
        .zip(&found)
        .filter(|(_, f)| matches!(f, Found::Generator))
        .map(|(v, _)| v.index.clone())
        .collect();
    let mut relations = Vec::new();
    let mut classes = Vec::with_capacity(vectors.len());
    for (v, f) in vectors.iter().zip(found) {
        let class = match f {
            Found::Generator => Classification::Basis,
            Found::Zero => {
                relations.push(RelationRecord::vanishing(basis.clone(), v.index.clone()));
                Classification::ZeroVector
            }
            Found::Relation(tuple, c) => {
                let mut coefficients = search.coeffs.resolve(&tuple);
                coefficients.resize(basis.len(), 0);
                coefficients.push(c);
                relations.push(RelationRecord {
                    basis: basis.clone(),
                    target: v.index.clone(),
                    coefficients,
                });
                Classification::Related
            }
        };
        classes.push((v.index.clone(), class));
    }
    Ok(PipelineOutput {
        basis,
        relations,
        classes,
        left_len: search.left_len,
        key_len: search.key_len,
        rebuilds: search.rebuilds,
    })
}

/// Computes the harmonic sums and runs the discovery pipeline.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineOutput> {
    config.validate()?;
    let sums = mod_harmonic_sums(&config.primes, config.weight, config.workers)?;
    run_pipeline_on(config, &sums)
}
