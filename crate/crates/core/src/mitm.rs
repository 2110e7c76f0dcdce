//! Meet-in-the-middle search for bounded additive relations over a finite
//! abelian group.
//!
//! Given `x_0, …, x_{D-1}` and the coefficient alphabet `c_0, …, c_{2B}`
//! (every integer in `[-B, B]`), find a coefficient-index tuple `b` with
//! `Σ c_{b_d} x_d = 0`. The first `D^L` coordinates are tabulated in a
//! [`MitmDictionary`]; each right tuple is then answered by one lookup of
//! `-Σ_right c·x`.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use crate::modarith::{add_mod, mul_mod, reduce_signed, sub_mod, Prime};

/// A finite abelian group. `Elem` is its canonical (reduced) representation,
/// so equality and hashing of `Elem` are equality and hashing in the group.
pub trait AbelianGroup {
    type Elem: Clone + Eq + Hash + Debug;

    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;

    /// `n·a`. The default is signed double-and-add.
    fn scale(&self, n: i64, a: &Self::Elem) -> Self::Elem {
        let mut acc = self.zero();
        let mut base = if n < 0 { self.neg(a) } else { a.clone() };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }
}

/// `Z/NZ` with `2 <= N < 2^62`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cyclic {
    modulus: u64,
}

impl Cyclic {
    pub fn new(modulus: u64) -> crate::Result<Self> {
        crate::modarith::ModResidue::new(0, modulus)?;
        Ok(Cyclic { modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn elem(&self, v: i64) -> u64 {
        reduce_signed(v, self.modulus)
    }
}

impl AbelianGroup for Cyclic {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b, self.modulus)
    }

    fn neg(&self, a: &u64) -> u64 {
        sub_mod(0, *a, self.modulus)
    }

    fn scale(&self, n: i64, a: &u64) -> u64 {
        mul_mod(reduce_signed(n, self.modulus), *a, self.modulus)
    }
}

/// `F_{p_0} × … × F_{p_{L-1}}`, isomorphic to `Z/NZ` with `N = Π p_l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueTuples {
    primes: Vec<Prime>,
}

impl ResidueTuples {
    pub fn new(primes: Vec<Prime>) -> Self {
        ResidueTuples { primes }
    }

    pub fn primes(&self) -> &[Prime] {
        &self.primes
    }
}

impl AbelianGroup for ResidueTuples {
    type Elem = Vec<u64>;

    fn zero(&self) -> Vec<u64> {
        vec![0; self.primes.len()]
    }

    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        self.primes
            .iter()
            .zip(a.iter().zip(b))
            .map(|(p, (&x, &y))| add_mod(x, y, p.get()))
            .collect()
    }

    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        self.primes
            .iter()
            .zip(a)
            .map(|(p, &x)| sub_mod(0, x, p.get()))
            .collect()
    }

    fn scale(&self, n: i64, a: &Vec<u64>) -> Vec<u64> {
        self.primes
            .iter()
            .zip(a)
            .map(|(p, &x)| mul_mod(reduce_signed(n, p.get()), x, p.get()))
            .collect()
    }
}

/// Every integer in `[-B, B]` ordered by absolute value, positive first:
/// `0, 1, -1, 2, -2, …, B, -B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientArray {
    bound: u32,
    values: Vec<i64>,
}

impl CoefficientArray {
    pub fn new(bound: u32) -> Self {
        let mut values = Vec::with_capacity(2 * bound as usize + 1);
        values.push(0);
        for a in 1..=bound as i64 {
            values.push(a);
            values.push(-a);
        }
        CoefficientArray { bound, values }
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// `2B + 1`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, b: usize) -> i64 {
        self.values[b]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Position of the value `v`, if `|v| <= B`.
    pub fn position(&self, v: i64) -> Option<usize> {
        if v.unsigned_abs() > self.bound as u64 {
            return None;
        }
        Some(match v {
            0 => 0,
            v if v > 0 => 2 * v as usize - 1,
            v => 2 * v.unsigned_abs() as usize,
        })
    }

    /// Number of tuples of the given length, or `None` on overflow.
    pub fn tuple_count(&self, len: usize) -> Option<u64> {
        (self.len() as u64).checked_pow(len as u32)
    }

    /// Decodes a tuple rank (first coordinate most significant).
    pub fn decode(&self, mut rank: u64, len: usize) -> Vec<usize> {
        let radix = self.len() as u64;
        let mut out = vec![0usize; len];
        for slot in out.iter_mut().rev() {
            *slot = (rank % radix) as usize;
            rank /= radix;
        }
        out
    }

    pub fn resolve(&self, tuple: &[usize]) -> Vec<i64> {
        tuple.iter().map(|&b| self.values[b]).collect()
    }
}

/// Iterates all index tuples of length `len` in ascending order.
pub(crate) fn tuples(radix: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (radix as u64)
        .checked_pow(len as u32)
        .expect("tuple space overflows u64");
    let mut cur = vec![0usize; len];
    let mut first = true;
    (0..total).map(move |_| {
        if first {
            first = false;
        } else {
            for slot in cur.iter_mut().rev() {
                *slot += 1;
                if *slot < radix {
                    break;
                }
                *slot = 0;
            }
        }
        cur.clone()
    })
}

/// `c_b·x_d` for every `b`, one row per generator.
pub(crate) fn scaled_rows<G: AbelianGroup>(
    group: &G,
    x: &[G::Elem],
    coeffs: &CoefficientArray,
) -> Vec<Vec<G::Elem>> {
    x.iter()
        .map(|xd| {
            coeffs
                .values()
                .iter()
                .map(|&c| group.scale(c, xd))
                .collect()
        })
        .collect()
}

fn tuple_sum<G: AbelianGroup>(group: &G, rows: &[Vec<G::Elem>], tuple: &[usize]) -> G::Elem {
    tuple
        .iter()
        .zip(rows)
        .fold(group.zero(), |acc, (&b, row)| group.add(&acc, &row[b]))
}

/// What a [`MitmDictionary`] keeps under each key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BucketStorage {
    /// Every left tuple.
    Tuples,
    /// Only the first (smallest) left tuple.
    Representative,
    /// Nothing; only key presence is recorded.
    KeysOnly,
}

/// Map from left partial sums `Σ_{d<D^L} c_{b_d} x_d` to the ranks of the
/// left tuples producing them. Buckets list ranks in ascending order.
#[derive(Debug, Clone)]
pub struct MitmDictionary<K: Eq + Hash> {
    left_len: usize,
    storage: BucketStorage,
    buckets: HashMap<K, Vec<u64>>,
}

impl<K: Eq + Hash + Clone> MitmDictionary<K> {
    /// Builds over all `(2B+1)^{left_len}` left tuples, keying each by `key(tuple)`.
    pub fn build_with(
        coeffs: &CoefficientArray,
        left_len: usize,
        storage: BucketStorage,
        mut key: impl FnMut(&[usize]) -> K,
    ) -> Self {
        let mut buckets: HashMap<K, Vec<u64>> = HashMap::new();
        for (rank, t) in tuples(coeffs.len(), left_len).enumerate() {
            let bucket = buckets.entry(key(&t)).or_default();
            match storage {
                BucketStorage::Tuples => bucket.push(rank as u64),
                BucketStorage::Representative if bucket.is_empty() => bucket.push(rank as u64),
                _ => {}
            }
        }
        MitmDictionary {
            left_len,
            storage,
            buckets,
        }
    }

    /// The `D^L = 0` dictionary: the empty tuple under `key`.
    pub fn trivial(key: K, storage: BucketStorage) -> Self {
        let mut buckets = HashMap::new();
        let bucket = match storage {
            BucketStorage::KeysOnly => Vec::new(),
            _ => vec![0],
        };
        buckets.insert(key, bucket);
        MitmDictionary {
            left_len: 0,
            storage,
            buckets,
        }
    }

    pub fn left_len(&self) -> usize {
        self.left_len
    }

    pub fn storage(&self) -> BucketStorage {
        self.storage
    }

    pub fn contains(&self, key: &K) -> bool {
        self.buckets.contains_key(key)
    }

    /// Tuple ranks under `key`; always empty in keys-only mode.
    pub fn bucket(&self, key: &K) -> &[u64] {
        self.buckets.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn key_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn tuple_count(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &[u64])> + '_ {
        self.buckets.iter().map(|(k, v)| (k, v.as_slice()))
    }
}

impl<E: Eq + Hash + Clone + Debug> MitmDictionary<E> {
    /// Dictionary keyed by group elements over the generators `x_left`.
    pub fn build<G: AbelianGroup<Elem = E>>(
        group: &G,
        x_left: &[E],
        coeffs: &CoefficientArray,
        storage: BucketStorage,
    ) -> Self {
        let rows = scaled_rows(group, x_left, coeffs);
        Self::build_with(coeffs, x_left.len(), storage, |t| {
            tuple_sum(group, &rows, t)
        })
    }
}

/// A zero-sum coefficient assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSolution {
    /// Positions in the [`CoefficientArray`].
    pub tuple: Vec<usize>,
    /// `c_{b_d}` for each position.
    pub coefficients: Vec<i64>,
}

impl RelationSolution {
    pub fn from_tuple(tuple: Vec<usize>, coeffs: &CoefficientArray) -> Self {
        let coefficients = coeffs.resolve(&tuple);
        RelationSolution {
            tuple,
            coefficients,
        }
    }

    /// Re-evaluates `Σ c_d x_d`.
    pub fn evaluate<G: AbelianGroup>(&self, group: &G, x: &[G::Elem]) -> G::Elem {
        self.coefficients
            .iter()
            .zip(x)
            .fold(group.zero(), |acc, (&c, xd)| {
                group.add(&acc, &group.scale(c, xd))
            })
    }
}

/// Generic meet-in-the-middle search for the decipher problem: return some
/// `(x0, x1)` with `h(x0) = g'(x1)` and `member(x0, x1)`. The dictionary is
/// built over `x0s` first, then `x1s` is scanned in order.
pub fn mitm_decipher<X0, X1, Y, H, Gp, M>(
    x0s: impl IntoIterator<Item = X0>,
    x1s: impl IntoIterator<Item = X1>,
    h: H,
    g_prime: Gp,
    member: M,
) -> Option<(X0, X1)>
where
    X0: Clone,
    Y: Eq + Hash,
    H: Fn(&X0) -> Y,
    Gp: Fn(&X1) -> Y,
    M: Fn(&X0, &X1) -> bool,
{
    let mut dict: HashMap<Y, Vec<X0>> = HashMap::new();
    for x0 in x0s {
        dict.entry(h(&x0)).or_default().push(x0);
    }
    for x1 in x1s {
        if let Some(bucket) = dict.get(&g_prime(&x1)) {
            if let Some(x0) = bucket.iter().find(|x0| member(x0, &x1)) {
                return Some((x0.clone(), x1));
            }
        }
    }
    None
}

/// Solves the bounded additive relation problem with the split `D^L = ⌊D/2⌋`.
///
/// `admissible` receives the full coefficient-index tuple.
pub fn solve_bounded_relation<G: AbelianGroup>(
    group: &G,
    x: &[G::Elem],
    coeffs: &CoefficientArray,
    admissible: impl Fn(&[usize]) -> bool,
) -> Option<RelationSolution> {
    solve_bounded_relation_split(group, x, coeffs, x.len() / 2, admissible)
}

/// [`solve_bounded_relation`] with an explicit left length `0 <= D^L <= D`.
///
/// Right tuples are scanned in ascending order; within a bucket left tuples
/// are tried in ascending order.
pub fn solve_bounded_relation_split<G: AbelianGroup>(
    group: &G,
    x: &[G::Elem],
    coeffs: &CoefficientArray,
    left_len: usize,
    admissible: impl Fn(&[usize]) -> bool,
) -> Option<RelationSolution> {
    assert!(left_len <= x.len());
    let (x_left, x_right) = x.split_at(left_len);
    let dict = MitmDictionary::build(group, x_left, coeffs, BucketStorage::Tuples);
    let right_rows = scaled_rows(group, x_right, coeffs);
    let mut full = vec![0usize; x.len()];
    for right in tuples(coeffs.len(), x_right.len()) {
        let target = group.neg(&tuple_sum(group, &right_rows, &right));
        for &rank in dict.bucket(&target) {
            let left = coeffs.decode(rank, left_len);
            full[..left_len].copy_from_slice(&left);
            full[left_len..].copy_from_slice(&right);
            if admissible(&full) {
                return Some(RelationSolution::from_tuple(full, coeffs));
            }
        }
    }
    None
}

/// Nontrivial relations: not every coefficient is zero.
pub fn nonzero_tuple(t: &[usize]) -> bool {
    t.iter().any(|&b| b != 0)
}

/// Whether `x` generates `y` over `coeffs`: a relation on `x⌢y` whose last
/// coefficient is nonzero.
pub fn generates_over<G: AbelianGroup>(
    group: &G,
    x: &[G::Elem],
    coeffs: &CoefficientArray,
    y: &G::Elem,
) -> Option<RelationSolution> {
    let mut xs = x.to_vec();
    xs.push(y.clone());
    solve_bounded_relation(group, &xs, coeffs, |t| {
        t.last().is_some_and(|&b| coeffs.get(b) != 0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_order() {
        let c = CoefficientArray::new(3);
        assert_eq!(c.values(), &[0, 1, -1, 2, -2, 3, -3]);
        for (i, &v) in c.values().iter().enumerate() {
            assert_eq!(c.position(v), Some(i));
        }
        assert_eq!(c.position(4), None);
        assert_eq!(CoefficientArray::new(0).values(), &[0]);
        assert_eq!(c.decode(7 * 7 + 3, 3), vec![1, 0, 3]);
    }

    #[test]
    fn tuple_iteration_is_ascending() {
        let all: Vec<Vec<usize>> = tuples(3, 2).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[8], vec![2, 2]);
        assert_eq!(tuples(5, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn worked_examples() {
        let z7 = Cyclic::new(7).unwrap();
        let sol =
            solve_bounded_relation(&z7, &[2, 3], &CoefficientArray::new(2), nonzero_tuple).unwrap();
        assert_eq!(sol.coefficients, vec![2, 1]);

        let z100 = Cyclic::new(100).unwrap();
        let sol = solve_bounded_relation(&z100, &[2, 3], &CoefficientArray::new(3), nonzero_tuple)
            .unwrap();
        assert_eq!(sol.coefficients, vec![-3, 2]);

        assert!(
            solve_bounded_relation(&z100, &[2, 3], &CoefficientArray::new(2), nonzero_tuple)
                .is_none()
        );
    }

    #[test]
    fn decipher_trivial_and_empty() {
        let r = mitm_decipher([0u8], [0u8], |_| 0, |_| 0, |_, _| true);
        assert_eq!(r, Some((0, 0)));
        let r = mitm_decipher([0u8], Vec::<u8>::new(), |_| 0, |_| 0, |_, _| true);
        assert_eq!(r, None);
    }

    #[test]
    fn decipher_delegation_matches_solver() {
        let z7 = Cyclic::new(7).unwrap();
        let c = CoefficientArray::new(2);
        let x = [2u64, 3];
        let r = mitm_decipher(
            tuples(c.len(), 1),
            tuples(c.len(), 1),
            |l| z7.scale(c.get(l[0]), &x[0]),
            |r| z7.neg(&z7.scale(c.get(r[0]), &x[1])),
            |l, r| l[0] != 0 || r[0] != 0,
        )
        .unwrap();
        let direct = solve_bounded_relation(&z7, &x, &c, nonzero_tuple).unwrap();
        assert_eq!(vec![r.0[0], r.1[0]], direct.tuple);
    }

    #[test]
    fn generates_examples() {
        let z5 = Cyclic::new(5).unwrap();
        let c = CoefficientArray::new(2);
        let sol = generates_over(&z5, &[1], &c, &2).unwrap();
        assert!(sol.coefficients == vec![2, -1] || sol.coefficients == vec![-2, 1]);
        assert_eq!(z5.elem(sol.coefficients[0] + 2 * sol.coefficients[1]), 0);

        let sol = generates_over(&z5, &[1, 3], &c, &0).unwrap();
        assert_eq!(sol.coefficients, vec![0, 0, 1]);

        assert!(generates_over(&z5, &[], &c, &1).is_none());
    }

    #[test]
    fn dictionary_buckets_reevaluate() {
        let g = Cyclic::new(31).unwrap();
        let c = CoefficientArray::new(2);
        let x = [4u64, 9, 17];
        let d = MitmDictionary::build(&g, &x, &c, BucketStorage::Tuples);
        assert_eq!(d.tuple_count(), 125);
        let rows = scaled_rows(&g, &x, &c);
        for (k, bucket) in d.iter() {
            assert!(bucket.windows(2).all(|w| w[0] < w[1]));
            for &r in bucket {
                assert_eq!(tuple_sum(&g, &rows, &c.decode(r, 3)), *k);
            }
        }
        let keys = MitmDictionary::build(&g, &x, &c, BucketStorage::KeysOnly);
        assert_eq!(keys.key_count(), d.key_count());
        assert_eq!(keys.tuple_count(), 0);
        let reps = MitmDictionary::build(&g, &x, &c, BucketStorage::Representative);
        assert_eq!(reps.tuple_count(), d.key_count());
        for (k, bucket) in reps.iter() {
            assert_eq!(bucket[0], d.bucket(k)[0]);
        }
    }

    #[test]
    fn residue_tuples_group() {
        let g = ResidueTuples::new(vec![Prime::new(5).unwrap(), Prime::new(7).unwrap()]);
        let a = vec![2, 3];
        assert_eq!(g.scale(-1, &a), vec![3, 4]);
        assert_eq!(g.add(&a, &g.neg(&a)), g.zero());
        // Z/35Z: 12 -> (2, 5); 2·12 + 1·11 = 35.
        let sol = solve_bounded_relation(
            &g,
            &[vec![2, 5], vec![1, 4]],
            &CoefficientArray::new(2),
            nonzero_tuple,
        )
        .unwrap();
        assert_eq!(sol.evaluate(&g, &[vec![2, 5], vec![1, 4]]), g.zero());
    }

    #[test]
    fn default_scale_matches_repeated_addition() {
        struct Z(u64);
        impl AbelianGroup for Z {
            type Elem = u64;
            fn zero(&self) -> u64 {
                0
            }
            fn add(&self, a: &u64, b: &u64) -> u64 {
                (a + b) % self.0
            }
            fn neg(&self, a: &u64) -> u64 {
                (self.0 - a) % self.0
            }
        }
        let z = Z(13);
        for n in -20i64..=20 {
            for a in 0..13 {
                assert_eq!(z.scale(n, &a), (n * a as i64).rem_euclid(13) as u64);
            }
        }
    }
}
