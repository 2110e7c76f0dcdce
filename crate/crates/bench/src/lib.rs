//! Seeded instance generators shared by the benchmarks.

use fmzv_core::{Cyclic, Prime};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// First prime `>= n`.
pub fn prime_at_least(n: u64) -> Prime {
    (n.max(3)..)
        .find_map(|v| Prime::new(v).ok())
        .expect("primes are unbounded")
}

/// `count` consecutive primes starting at or after `n`.
pub fn primes_from(n: u64, count: usize) -> Vec<Prime> {
    let mut out = Vec::with_capacity(count);
    let mut next = n;
    while out.len() < count {
        let p = prime_at_least(next);
        next = p.get() + 1;
        out.push(p);
    }
    out
}

/// `len` random elements of `Z/NZ`.
pub fn random_elements(seed: u64, modulus: u64, len: usize) -> (Cyclic, Vec<u64>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let group = Cyclic::new(modulus).expect("modulus >= 2");
    let xs = (0..len).map(|_| rng.gen_range(0..modulus)).collect();
    (group, xs)
}
