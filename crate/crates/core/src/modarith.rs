//! Exact arithmetic in prime fields `F_p` and in `Z/NZ`.
//!
//! Moduli are capped below 2^62 so every product of two reduced values fits
//! in a `u128` intermediate. Below 2^32 the product fits in a `u64`, which is
//! the fast path taken by the hot loops in [`crate::harmonic`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exclusive upper bound on every modulus handled by this module.
pub const MODULUS_LIMIT: u64 = 1 << 62;

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        (a * b) % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduces a signed integer into `[0, m)`.
#[inline]
pub fn reduce_signed(v: i64, m: u64) -> u64 {
    let r = (v as i128).rem_euclid(m as i128);
    r as u64
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm, if it exists.
pub(crate) fn inv_mod_euclid(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    // Deterministic for every n < 2^64.
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// An odd prime below [`MODULUS_LIMIT`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    /// Checks primality with deterministic Miller-Rabin.
    pub fn new(value: u64) -> Result<Self> {
        if !(3..MODULUS_LIMIT).contains(&value) || !is_prime_u64(value) {
            return Err(Error::NotPrime(value));
        }
        Ok(Prime(value))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// Residue of a signed integer.
    pub fn residue(self, v: i64) -> Residue {
        Residue {
            value: reduce_signed(v, self.0),
            modulus: self,
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;

    fn try_from(v: u64) -> Result<Self> {
        Prime::new(v)
    }
}

/// Parses a comma separated list of primes, e.g. `"10007,10009"`.
pub fn parse_prime_list(s: &str) -> Result<Vec<Prime>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::Parse(format!("invalid prime `{t}`")))
                .and_then(Prime::new)
        })
        .collect()
}

/// Product of the given primes as an exact integer.
pub fn modulus_product(primes: &[Prime]) -> BigUint {
    primes
        .iter()
        .fold(BigUint::one(), |acc, p| acc * BigUint::from(p.get()))
}

/// An element of `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: Prime,
}

impl Residue {
    pub fn new(value: u64, modulus: Prime) -> Self {
        Residue {
            value: value % modulus.get(),
            modulus,
        }
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> Prime {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, exp: u64) -> Residue {
        Residue {
            value: pow_mod(self.value, exp, self.modulus.get()),
            modulus: self.modulus,
        }
    }

    fn check(self, other: Residue) {
        assert_eq!(
            self.modulus, other.modulus,
            "residues with different moduli"
        );
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        self.check(rhs);
        Residue {
            value: add_mod(self.value, rhs.value, self.modulus.get()),
            modulus: self.modulus,
        }
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self.check(rhs);
        Residue {
            value: sub_mod(self.value, rhs.value, self.modulus.get()),
            modulus: self.modulus,
        }
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        self.check(rhs);
        Residue {
            value: mul_mod(self.value, rhs.value, self.modulus.get()),
            modulus: self.modulus,
        }
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue {
            value: sub_mod(0, self.value, self.modulus.get()),
            modulus: self.modulus,
        }
    }
}

/// An element of `Z/NZ` for an arbitrary modulus `2 <= N < 2^62`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModResidue {
    value: u64,
    modulus: u64,
}

impl ModResidue {
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        if !(2..MODULUS_LIMIT).contains(&modulus) {
            return Err(Error::BadModulus(modulus));
        }
        Ok(ModResidue {
            value: value % modulus,
            modulus,
        })
    }

    pub fn from_signed(value: i64, modulus: u64) -> Result<Self> {
        let r = ModResidue::new(0, modulus)?;
        Ok(ModResidue {
            value: reduce_signed(value, modulus),
            ..r
        })
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.modulus
    }

    /// Inverse when `gcd(value, N) = 1`.
    pub fn inverse(self) -> Option<ModResidue> {
        inv_mod_euclid(self.value, self.modulus).map(|v| ModResidue { value: v, ..self })
    }
}

impl Add for ModResidue {
    type Output = ModResidue;
    fn add(self, rhs: ModResidue) -> ModResidue {
        assert_eq!(self.modulus, rhs.modulus);
        ModResidue {
            value: add_mod(self.value, rhs.value, self.modulus),
            ..self
        }
    }
}

impl Sub for ModResidue {
    type Output = ModResidue;
    fn sub(self, rhs: ModResidue) -> ModResidue {
        assert_eq!(self.modulus, rhs.modulus);
        ModResidue {
            value: sub_mod(self.value, rhs.value, self.modulus),
            ..self
        }
    }
}

impl Mul for ModResidue {
    type Output = ModResidue;
    fn mul(self, rhs: ModResidue) -> ModResidue {
        assert_eq!(self.modulus, rhs.modulus);
        ModResidue {
            value: mul_mod(self.value, rhs.value, self.modulus),
            ..self
        }
    }
}

impl Neg for ModResidue {
    type Output = ModResidue;
    fn neg(self) -> ModResidue {
        ModResidue {
            value: sub_mod(0, self.value, self.modulus),
            ..self
        }
    }
}

/// Inverse by the extended Euclidean algorithm.
pub fn inv_euclid(a: Residue) -> Result<Residue> {
    if a.is_zero() {
        return Err(Error::ZeroInverse);
    }
    let v = inv_mod_euclid(a.value, a.modulus.get()).ok_or(Error::ZeroInverse)?;
    Ok(Residue {
        value: v,
        modulus: a.modulus,
    })
}

/// Inverse as `a^(p-2)` by binary exponentiation.
pub fn inv_pow(a: Residue) -> Result<Residue> {
    if a.is_zero() {
        return Err(Error::ZeroInverse);
    }
    Ok(a.pow(a.modulus.get() - 2))
}

/// Table of `j^{-1} mod p` for every `1 <= j < p`.
#[derive(Debug, Clone)]
pub struct InverseTable {
    modulus: Prime,
    inverses: Vec<u64>,
}

/// Default memory budget, in entries, for choosing a table over per-call inversion.
pub const DEFAULT_TABLE_BUDGET: u64 = 1 << 27;

/// Builds all inverses in linear time with
/// `inv[j] = -(p / j) * inv[p mod j] mod p`.
pub fn build_inverse_table(p: Prime) -> InverseTable {
    let m = p.get();
    let mut inverses = vec![0u64; m as usize];
    inverses[1] = 1;
    for j in 2..m {
        let q = m / j;
        let r = (m % j) as usize;
        inverses[j as usize] = sub_mod(0, mul_mod(q, inverses[r], m), m);
    }
    InverseTable {
        modulus: p,
        inverses,
    }
}

impl InverseTable {
    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    /// `j^{-1}` for `1 <= j < p`; `None` for zero or out-of-range `j`.
    pub fn get(&self, j: u64) -> Option<Residue> {
        if j == 0 || j >= self.modulus.get() {
            return None;
        }
        Some(Residue {
            value: self.inverses[j as usize],
            modulus: self.modulus,
        })
    }

    /// Raw slice indexed by `j`; entry 0 is unused and holds 0.
    pub fn as_slice(&self) -> &[u64] {
        &self.inverses
    }

    pub fn fits_budget(p: Prime, budget: u64) -> bool {
        p.get() <= budget
    }
}

/// Chinese-remainder reconstruction by Garner's mixed-radix method.
///
/// Returns the unique `x` in `[0, prod moduli)` with `x = value_i mod modulus_i`.
pub fn garner(residues: &[(u64, u64)]) -> Result<BigUint> {
    for (i, &(v, m)) in residues.iter().enumerate() {
        if !(2..MODULUS_LIMIT).contains(&m) {
            return Err(Error::BadModulus(m));
        }
        if v >= m {
            return Err(Error::Parse(format!("residue {v} not reduced mod {m}")));
        }
        for &(_, m2) in &residues[..i] {
            if gcd(m, m2) != 1 {
                return Err(Error::NotCoprime(m2, m));
            }
        }
    }
    // Mixed-radix digits: x = a_0 + a_1 m_0 + a_2 m_0 m_1 + ...
    let mut digits: Vec<u64> = Vec::with_capacity(residues.len());
    for (i, &(v, m)) in residues.iter().enumerate() {
        // Evaluate the partial sum mod m and solve for the next digit.
        let mut acc = 0u64;
        let mut radix = 1u64;
        for (j, &a) in digits.iter().enumerate() {
            acc = add_mod(acc, mul_mod(a % m, radix, m), m);
            radix = mul_mod(radix, residues[j].1 % m, m);
        }
        let inv = inv_mod_euclid(radix, m).ok_or(Error::NotCoprime(residues[i].1, m))?;
        digits.push(mul_mod(sub_mod(v, acc, m), inv, m));
    }
    let mut x = BigUint::zero();
    let mut radix = BigUint::one();
    for (a, &(_, m)) in digits.iter().zip(residues) {
        x += &radix * BigUint::from(*a);
        radix *= BigUint::from(m);
    }
    Ok(x)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn primality() {
        assert!(Prime::new(2).is_err());
        assert!(Prime::new(9).is_err());
        assert!(Prime::new(10007).is_ok());
        assert!(Prime::new(10011).is_err());
        // Carmichael number and a strong pseudoprime to small bases.
        assert!(Prime::new(561).is_err());
        assert!(Prime::new(3_215_031_751).is_err());
        assert!(Prime::new((1 << 61) - 1).is_ok());
        assert!(Prime::new(MODULUS_LIMIT + 1).is_err());
    }

    #[test]
    fn primality_matches_trial_division() {
        let trial = |n: u64| {
            n >= 2
                && (2..)
                    .take_while(|d| d * d <= n)
                    .all(|d| !n.is_multiple_of(d))
        };
        for n in 3..5000u64 {
            assert_eq!(Prime::new(n).is_ok(), trial(n), "n = {n}");
        }
    }

    #[test]
    fn euclid_examples() {
        assert_eq!(inv_euclid(p(7).residue(1)).unwrap().value(), 1);
        assert_eq!(inv_euclid(p(5).residue(2)).unwrap().value(), 3);
        let q = p(10007);
        let brute = (1..10007u64).find(|x| 4 * x % 10007 == 1).unwrap();
        assert_eq!(inv_euclid(q.residue(4)).unwrap().value(), brute);
        assert!(matches!(inv_euclid(q.residue(0)), Err(Error::ZeroInverse)));
    }

    #[test]
    fn pow_examples() {
        assert_eq!(inv_pow(p(5).residue(3)).unwrap().value(), 2);
        for m in [3, 5, 101, 10007] {
            assert_eq!(inv_pow(p(m).residue(1)).unwrap().value(), 1);
        }
        assert!(inv_pow(p(5).residue(5)).is_err());
        let q = p(101);
        for a in 1..101 {
            assert_eq!(
                inv_pow(q.residue(a)).unwrap(),
                inv_euclid(q.residue(a)).unwrap()
            );
        }
    }

    #[test]
    fn table_examples() {
        assert_eq!(build_inverse_table(p(5)).as_slice()[1..], [1, 3, 2, 4]);
        assert_eq!(build_inverse_table(p(3)).as_slice()[1..], [1, 2]);
        let q = p(10007);
        let t = build_inverse_table(q);
        for j in 1..10007 {
            assert_eq!(t.get(j), Some(inv_euclid(q.residue(j as i64)).unwrap()));
        }
        assert_eq!(t.get(0), None);
    }

    #[test]
    fn all_inverse_routes_agree_below_ten_thousand() {
        for m in (3..10_000u64).filter(|&m| is_prime_u64(m)).step_by(37) {
            let q = p(m);
            let t = build_inverse_table(q);
            for a in 1..m {
                let r = q.residue(a as i64);
                let e = inv_euclid(r).unwrap();
                assert_eq!(e, inv_pow(r).unwrap());
                assert_eq!(Some(e), t.get(a));
                assert_eq!((r * e).value(), 1);
            }
        }
    }

    #[test]
    fn garner_examples() {
        assert_eq!(garner(&[(0, 3), (0, 5)]).unwrap(), BigUint::zero());
        let x = (0..15u64).find(|x| x % 3 == 2 && x % 5 == 3).unwrap();
        assert_eq!(garner(&[(2, 3), (3, 5)]).unwrap(), BigUint::from(x));
        assert_eq!(garner(&[(1, 10007), (1, 10009)]).unwrap(), BigUint::one());
        assert!(matches!(
            garner(&[(1, 6), (1, 9)]),
            Err(Error::NotCoprime(6, 9))
        ));
        assert_eq!(garner(&[]).unwrap(), BigUint::zero());
    }

    #[test]
    fn ring_ops_match_wide_arithmetic() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let primes = [p(3), p(10007), p((1 << 61) - 1), p(4_294_967_311)];
        for _ in 0..100_000 {
            let q = primes[rng.gen_range(0..primes.len())];
            let m = q.get() as u128;
            let a = rng.gen_range(0..q.get());
            let b = rng.gen_range(0..q.get());
            let (ra, rb) = (Residue::new(a, q), Residue::new(b, q));
            assert_eq!((ra + rb).value() as u128, (a as u128 + b as u128) % m);
            assert_eq!((ra - rb).value() as u128, (a as u128 + m - b as u128) % m);
            assert_eq!((ra * rb).value() as u128, (a as u128 * b as u128) % m);
        }
    }

    #[test]
    fn mod_residue_composite() {
        let a = ModResidue::from_signed(-3, 100).unwrap();
        assert_eq!(a.value(), 97);
        assert_eq!((a + ModResidue::new(5, 100).unwrap()).value(), 2);
        assert!(ModResidue::new(2, 100).unwrap().inverse().is_none());
        assert_eq!(
            ModResidue::new(3, 100).unwrap().inverse().unwrap().value(),
            67
        );
        assert!(ModResidue::new(0, 1).is_err());
    }

    proptest! {
        #[test]
        fn garner_reproduces_inputs(a in 0u64..10007, b in 0u64..10009, c in 0u64..65537) {
            let moduli = [10007u64, 10009, 65537];
            let x = garner(&[(a, moduli[0]), (b, moduli[1]), (c, moduli[2])]).unwrap();
            for (v, m) in [a, b, c].into_iter().zip(moduli) {
                prop_assert_eq!(&x % BigUint::from(m), BigUint::from(v));
            }
            prop_assert!(x < BigUint::from(10007u64 * 10009 * 65537));
        }
    }
}
