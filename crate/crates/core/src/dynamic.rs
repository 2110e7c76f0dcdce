//! Greedy minimal generating systems with a persistent MITM dictionary.
//!
//! Elements of `S` are processed in order. An element is accepted as a new
//! generator exactly when the generators accepted so far do not generate it.
//! The dictionary over the first `D^L` generators is kept between elements
//! and rebuilt only when the cost model says a longer left half pays off.

use crate::mitm::{
    scaled_rows, tuples, AbelianGroup, BucketStorage, CoefficientArray, MitmDictionary,
};

/// Expected scan cost `B^{D^R}·(H - h)` for the rest of the input,
/// saturating at `u64::MAX`.
pub fn cost_d(bound: u64, right_len: u32, total: u64, processed: u64) -> u64 {
    assert!(processed <= total, "h must not exceed H");
    let remaining = (total - processed) as u128;
    match (bound as u128).checked_pow(right_len) {
        Some(p) => p
            .checked_mul(remaining)
            .map_or(u64::MAX, |v| v.min(u64::MAX as u128) as u64),
        None if remaining == 0 => 0,
        None => u64::MAX,
    }
}

/// `B^e` saturating at `u64::MAX`.
pub(crate) fn sat_pow(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).unwrap_or(u64::MAX)
}

/// When to move a freshly accepted generator into the left (dictionary) half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RebuildPolicy {
    /// Grow `D^L` when `CostD(D^R + 1) > B^{D^L+1} + CostD(D^R)`.
    #[default]
    CostModel,
    Always,
    Never,
}

impl RebuildPolicy {
    pub(crate) fn should_grow_left(
        self,
        bound: u64,
        left_len: u32,
        right_len: u32,
        total: u64,
        processed: u64,
    ) -> bool {
        match self {
            RebuildPolicy::Always => true,
            RebuildPolicy::Never => false,
            RebuildPolicy::CostModel => {
                let stay = cost_d(bound, right_len, total, processed);
                let grow_right = cost_d(bound, right_len + 1, total, processed);
                let rebuild = sat_pow(bound, left_len + 1);
                grow_right > rebuild.saturating_add(stay)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DynamicOptions {
    pub policy: RebuildPolicy,
    /// Keep only dictionary keys, not the tuples under them.
    pub keys_only: bool,
}

impl DynamicOptions {
    fn storage(&self) -> BucketStorage {
        if self.keys_only {
            BucketStorage::KeysOnly
        } else {
            BucketStorage::Tuples
        }
    }
}

/// Result of [`minimal_generating_system_with`].
#[derive(Debug, Clone)]
pub struct GeneratingSystem<E> {
    pub generators: Vec<E>,
    /// Position in `S` of each generator.
    pub positions: Vec<usize>,
    pub left_len: usize,
    pub rebuilds: usize,
}

/// State of the dynamic search between elements.
pub struct DynamicState<'a, G: AbelianGroup> {
    group: &'a G,
    coeffs: &'a CoefficientArray,
    options: DynamicOptions,
    generators: Vec<G::Elem>,
    left_len: usize,
    dict: MitmDictionary<G::Elem>,
    /// `c_b·x_d` rows for the right half.
    right_rows: Vec<Vec<G::Elem>>,
    total: u64,
    rebuilds: usize,
}

impl<'a, G: AbelianGroup> DynamicState<'a, G> {
    pub fn new(
        group: &'a G,
        coeffs: &'a CoefficientArray,
        total: usize,
        options: DynamicOptions,
    ) -> Self {
        DynamicState {
            group,
            coeffs,
            options,
            generators: Vec::new(),
            left_len: 0,
            dict: MitmDictionary::trivial(group.zero(), options.storage()),
            right_rows: Vec::new(),
            total: total as u64,
            rebuilds: 0,
        }
    }

    pub fn generators(&self) -> &[G::Elem] {
        &self.generators
    }

    pub fn left_len(&self) -> usize {
        self.left_len
    }

    pub fn right_len(&self) -> usize {
        self.generators.len() - self.left_len
    }

    /// Whether the current generators generate `s`: some nonzero `c_b` and
    /// right tuple with `-(Σ_right + c_b·s)` present in the dictionary.
    pub fn generates(&self, s: &G::Elem) -> bool {
        let g = self.group;
        for &c in self.coeffs.values() {
            if c == 0 {
                continue;
            }
            let cs = g.scale(c, s);
            for right in tuples(self.coeffs.len(), self.right_rows.len()) {
                let y = right
                    .iter()
                    .zip(&self.right_rows)
                    .fold(cs.clone(), |acc, (&b, row)| g.add(&acc, &row[b]));
                if self.dict.contains(&g.neg(&y)) {
                    return true;
                }
            }
        }
        false
    }

    /// Processes the `h`-th element; returns whether it became a generator.
    pub fn push(&mut self, h: usize, s: &G::Elem) -> bool {
        if self.generates(s) {
            return false;
        }
        self.generators.push(s.clone());
        let bound = self.coeffs.bound() as u64;
        let grow_left = self.options.policy.should_grow_left(
            bound,
            self.left_len as u32,
            self.right_rows.len() as u32,
            self.total,
            h as u64,
        );
        if grow_left {
            self.left_len += 1;
            self.dict = MitmDictionary::build(
                self.group,
                &self.generators[..self.left_len],
                self.coeffs,
                self.options.storage(),
            );
            self.rebuilds += 1;
        }
        self.right_rows = scaled_rows(self.group, &self.generators[self.left_len..], self.coeffs);
        true
    }
}

/// Greedy minimal generating system of `s` over `coeffs` with the default
/// cost-model policy.
pub fn minimal_generating_system<G: AbelianGroup>(
    group: &G,
    s: &[G::Elem],
    coeffs: &CoefficientArray,
) -> Vec<G::Elem> {
    minimal_generating_system_with(group, s, coeffs, DynamicOptions::default()).generators
}

pub fn minimal_generating_system_with<G: AbelianGroup>(
    group: &G,
    s: &[G::Elem],
    coeffs: &CoefficientArray,
    options: DynamicOptions,
) -> GeneratingSystem<G::Elem> {
    let mut state = DynamicState::new(group, coeffs, s.len(), options);
    let mut positions = Vec::new();
    for (h, elem) in s.iter().enumerate() {
        if state.push(h, elem) {
            positions.push(h);
        }
    }
    GeneratingSystem {
        left_len: state.left_len,
        rebuilds: state.rebuilds,
        generators: state.generators,
        positions,
    }
}
