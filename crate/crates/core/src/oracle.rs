//! Brute-force reference implementations.
//!
//! Nothing here calls into the optimised engines: arithmetic, tuple
//! enumeration and summation are written out again from the definitions so
//! the two sides can be compared in tests.

use crate::error::{Error, Result};
use crate::mitm::{AbelianGroup, CoefficientArray, RelationSolution};

/// Largest search space the oracles will enumerate.
pub const BRUTE_LIMIT: u128 = 100_000_000;

/// First tuple in ascending order (first coordinate most significant) with
/// `Σ c_{b_d} x_d = 0` that satisfies `admissible`.
pub fn brute_relation<G: AbelianGroup>(
    group: &G,
    x: &[G::Elem],
    coeffs: &CoefficientArray,
    admissible: impl Fn(&[usize]) -> bool,
) -> Result<Option<RelationSolution>> {
    let radix = coeffs.values().len();
    let size = (radix as u128)
        .checked_pow(x.len() as u32)
        .unwrap_or(u128::MAX);
    if size > BRUTE_LIMIT {
        return Err(Error::TooLarge(size));
    }
    let mut tuple = vec![0usize; x.len()];
    loop {
        let mut sum = group.zero();
        for (d, &b) in tuple.iter().enumerate() {
            let mut term = group.zero();
            let c = coeffs.values()[b];
            // Repeated addition keeps this independent of `scale`.
            for _ in 0..c.unsigned_abs() {
                term = group.add(&term, &x[d]);
            }
            if c < 0 {
                term = group.neg(&term);
            }
            sum = group.add(&sum, &term);
        }
        if sum == group.zero() && admissible(&tuple) {
            let coefficients = tuple.iter().map(|&b| coeffs.values()[b]).collect();
            return Ok(Some(RelationSolution {
                tuple,
                coefficients,
            }));
        }
        // advance the odometer
        let mut d = tuple.len();
        loop {
            if d == 0 {
                return Ok(None);
            }
            d -= 1;
            tuple[d] += 1;
            if tuple[d] < radix {
                break;
            }
            tuple[d] = 0;
        }
    }
}

/// Greedy generating system, testing every element with [`brute_relation`].
pub fn brute_generating_system<G: AbelianGroup>(
    group: &G,
    s: &[G::Elem],
    coeffs: &CoefficientArray,
) -> Result<Vec<G::Elem>> {
    let mut gens: Vec<G::Elem> = Vec::new();
    for y in s {
        let mut xs = gens.clone();
        xs.push(y.clone());
        let found = brute_relation(group, &xs, coeffs, |t| {
            coeffs.values()[*t.last().expect("non-empty")] != 0
        })?;
        if found.is_none() {
            gens.push(y.clone());
        }
    }
    Ok(gens)
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn inverse(a: u64, p: u64) -> u64 {
    // Fermat
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        e >>= 1;
    }
    acc
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k as u128 {
        r = r.saturating_mul(n as u128 - i) / (i + 1);
    }
    r
}

/// `Σ_{0 < m_0 < … < m_{L-1} <= j} Π m_l^{-k_l} mod p` by nested loops over
/// every strictly increasing sequence.
pub fn harmonic_oracle(p: u64, k: &[u32], j: u64) -> Result<u64> {
    assert!(j < p);
    let depth = k.len();
    if depth == 0 {
        return Ok(1);
    }
    let size = binomial(j, depth as u64);
    if size > BRUTE_LIMIT {
        return Err(Error::TooLarge(size));
    }
    if (j as usize) < depth {
        return Ok(0);
    }
    let inv: Vec<u64> = (0..=j)
        .map(|m| if m == 0 { 0 } else { inverse(m, p) })
        .collect();
    let mut m: Vec<u64> = (1..=depth as u64).collect();
    let mut total = 0u64;
    loop {
        let mut term = 1u64;
        for (l, &ml) in m.iter().enumerate() {
            for _ in 0..k[l] {
                term = mulmod(term, inv[ml as usize], p);
            }
        }
        total = (total + term) % p;
        // next strictly increasing sequence with entries <= j
        let mut l = depth;
        loop {
            if l == 0 {
                return Ok(total);
            }
            l -= 1;
            if m[l] < j - (depth - 1 - l) as u64 {
                m[l] += 1;
                for t in l + 1..depth {
                    m[t] = m[t - 1] + 1;
                }
                break;
            }
        }
    }
}
