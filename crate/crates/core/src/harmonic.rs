//! Mod-`p` multiple harmonic sums.
//!
//! `rdp_p(k, j)` sums `prod m_l^{-k_l}` over `0 < m_0 < … < m_{L-1} <= j`.
//! Every engine here works from the recurrence
//!
//! ```text
//! rdp_p(k⌢a, 0) = 0
//! rdp_p(k⌢a, j) = rdp_p(k⌢a, j-1) + rdp_p(k, j-1) * j^{-a}
//! ```
//!
//! with `rdp_p((), j) = 1`. The horizontal engine keeps one value per prefix
//! and sweeps `j`; the vertical engine keeps one value per `j` and sweeps the
//! prefixes; the tree engine runs the horizontal sweep over every node of an
//! [`IndexTree`] at once.

use std::collections::HashMap;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::indices::{bounded_weight_tree, enumerate_k, Index, IndexTree};
use crate::modarith::{
    add_mod, build_inverse_table, inv_mod_euclid, mul_mod, pow_mod, InverseTable, Prime, Residue,
    DEFAULT_TABLE_BUDGET,
};

/// Harmonic-sum engine selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Naive,
    Horizontal,
    Vertical,
    Tree,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Engine::Naive),
            "horizontal" => Ok(Engine::Horizontal),
            "vertical" => Ok(Engine::Vertical),
            "tree" => Ok(Engine::Tree),
            other => Err(Error::Parse(format!("unknown engine `{other}`"))),
        }
    }
}

impl Engine {
    /// Horizontal when `depth <= log2(p)`, vertical otherwise.
    pub fn auto(p: Prime, depth: usize) -> Engine {
        if depth as u32 <= p.get().ilog2() {
            Engine::Horizontal
        } else {
            Engine::Vertical
        }
    }

    /// `rdp_p(k, p-1)` with this engine.
    pub fn eval(self, p: Prime, k: &Index) -> Residue {
        match self {
            Engine::Naive => rdp_naive(p, k, p.get() - 1),
            Engine::Horizontal => *rdp_horizontal(p, k).last().expect("root entry"),
            Engine::Vertical => rdp_vertical(p, k),
            Engine::Tree => parallel_horizontal_dp(p, &crate::indices::prefix_tree(k))
                .get(k)
                .expect("k is a node of its prefix tree"),
        }
    }
}

/// Direct enumeration of all strictly increasing `m`. Cost `Θ(j^depth)`.
pub fn rdp_naive(p: Prime, k: &Index, j: u64) -> Residue {
    let m = p.get();
    assert!(j < m, "j must be below p");
    if k.is_empty() {
        return p.residue(1);
    }
    // inv_pows[l][x] = x^{-k_l}
    let inv_pows: Vec<Vec<u64>> = k
        .parts()
        .iter()
        .map(|&part| {
            (0..=j)
                .map(|x| match x {
                    0 => 0,
                    x => pow_mod(inv_mod_euclid(x, m).expect("0 < x < p"), part as u64, m),
                })
                .collect()
        })
        .collect();
    fn rec(rows: &[Vec<u64>], lo: u64, j: u64, m: u64, acc: u64) -> u64 {
        let Some((row, rest)) = rows.split_first() else {
            return acc;
        };
        let mut total = 0;
        // Leave room for the remaining parts.
        let hi = j.saturating_sub(rest.len() as u64);
        for x in lo..=hi {
            let term = mul_mod(acc, row[x as usize], m);
            total = add_mod(total, rec(rest, x + 1, j, m, term), m);
        }
        total
    }
    Residue::new(rec(&inv_pows, 1, j, m, 1), p)
}

/// Horizontal DP over the prefixes of `k`. Returns `rdp_p(prefix_l, p-1)` for
/// `l = 0..=depth`. `Θ(p·depth)` time, `Θ(depth)` space.
pub fn rdp_horizontal(p: Prime, k: &Index) -> Vec<Residue> {
    let m = p.get();
    let parts = k.parts();
    let mut row = vec![0u64; parts.len() + 1];
    row[0] = 1;
    for j in 1..m {
        let inv = inv_mod_euclid(j, m).expect("0 < j < p");
        // Descending so that row[l-1] still holds its value at j-1.
        for l in (1..row.len()).rev() {
            let term = mul_mod(row[l - 1], pow_mod(inv, parts[l - 1] as u64, m), m);
            row[l] = add_mod(row[l], term, m);
        }
    }
    row.into_iter().map(|v| Residue::new(v, p)).collect()
}

/// Vertical DP: one pass over `j` per appended part. `Θ(p·depth)` time,
/// `Θ(p)` space.
pub fn rdp_vertical(p: Prime, k: &Index) -> Residue {
    let table = InverseTable::fits_budget(p, DEFAULT_TABLE_BUDGET).then(|| build_inverse_table(p));
    rdp_vertical_with(p, k, table.as_ref())
}

/// [`rdp_vertical`] with an optional precomputed inverse table; without one
/// each `j^{-1}` is computed as `j^{p-2}`.
pub fn rdp_vertical_with(p: Prime, k: &Index, table: Option<&InverseTable>) -> Residue {
    let m = p.get();
    let inv = |j: u64| match table {
        Some(t) => t.as_slice()[j as usize],
        None => pow_mod(j, m - 2, m),
    };
    // col[j] = rdp_p(current prefix, j)
    let mut col = vec![1u64; m as usize];
    for &part in k.parts() {
        let mut prev_old = col[0];
        col[0] = 0;
        for j in 1..m as usize {
            let old = col[j];
            let term = mul_mod(prev_old, pow_mod(inv(j as u64), part as u64, m), m);
            col[j] = add_mod(col[j - 1], term, m);
            prev_old = old;
        }
    }
    Residue::new(col[m as usize - 1], p)
}

/// `rdp_p(k, p-1)` for every node `k` of a tree of indices.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    prime: Prime,
    values: HashMap<Index, u64>,
}

impl HarmonicTable {
    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn get(&self, k: &Index) -> Option<Residue> {
        self.values.get(k).map(|&v| Residue::new(v, self.prime))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Index, Residue)> + '_ {
        self.values
            .iter()
            .map(|(k, &v)| (k, Residue::new(v, self.prime)))
    }
}

/// Raw per-node values (indexed by node id) of the tree DP.
pub fn tree_dp_values(p: Prime, t: &IndexTree) -> Vec<u64> {
    let m = p.get();
    let edges = t.postorder_edges();
    let max_label = t.max_label() as usize;
    let mut vals = vec![0u64; t.len()];
    vals[IndexTree::ROOT] = 1;
    let mut powers = vec![1u64; max_label + 1];
    for j in 1..m {
        let inv = inv_mod_euclid(j, m).expect("0 < j < p");
        for e in 1..=max_label {
            powers[e] = mul_mod(powers[e - 1], inv, m);
        }
        for &(parent, child, label) in &edges {
            let term = mul_mod(vals[parent], powers[label as usize], m);
            vals[child] = add_mod(vals[child], term, m);
        }
    }
    vals
}

/// Runs the horizontal DP simultaneously over all nodes of `t`, visiting edges
/// in post-order for each `j`. `Θ(p·#V)` time, `Θ(#V)` space.
pub fn parallel_horizontal_dp(p: Prime, t: &IndexTree) -> HarmonicTable {
    let vals = tree_dp_values(p, t);
    let values = vals
        .into_iter()
        .enumerate()
        .map(|(n, v)| (t.index(n), v))
        .collect();
    HarmonicTable { prime: p, values }
}

/// `(rdp_{p_l}(k, p_l - 1))_l` for one index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueVector {
    pub index: Index,
    pub entries: Vec<Residue>,
}

impl ResidueVector {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|r| r.is_zero())
    }

    pub fn values(&self) -> Vec<u64> {
        self.entries.iter().map(|r| r.value()).collect()
    }
}

/// Harmonic sums of every index of weight `w` modulo each configured prime,
/// in canonical `K_w` order.
#[derive(Debug, Clone)]
pub struct HarmonicSums {
    weight: u32,
    primes: Vec<Prime>,
    vectors: Vec<ResidueVector>,
    position: HashMap<Index, usize>,
}

impl HarmonicSums {
    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn primes(&self) -> &[Prime] {
        &self.primes
    }

    pub fn vectors(&self) -> &[ResidueVector] {
        &self.vectors
    }

    pub fn get(&self, k: &Index) -> Option<&ResidueVector> {
        self.position.get(k).map(|&i| &self.vectors[i])
    }
}

pub(crate) fn check_primes(primes: &[Prime], must_exceed: u64) -> Result<()> {
    for (i, p) in primes.iter().enumerate() {
        if primes[..i].contains(p) {
            return Err(Error::DuplicatePrime(p.get()));
        }
        if p.get() <= must_exceed {
            return Err(Error::PrimeTooSmall {
                prime: p.get(),
                bound: must_exceed,
            });
        }
    }
    Ok(())
}

/// Runs `f` on each prime with up to `workers` threads; results keep prime order.
pub(crate) fn per_prime<T: Send>(
    primes: &[Prime],
    workers: usize,
    f: impl Fn(Prime) -> T + Sync,
) -> Vec<T> {
    let workers = workers.clamp(1, primes.len().max(1));
    if workers == 1 {
        return primes.iter().map(|&p| f(p)).collect();
    }
    let mut slots: Vec<Option<T>> = primes.iter().map(|_| None).collect();
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                s.spawn(move || {
                    primes
                        .iter()
                        .enumerate()
                        .skip(w)
                        .step_by(workers)
                        .map(|(i, &p)| (i, f(p)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, v) in h.join().expect("harmonic worker panicked") {
                slots[i] = Some(v);
            }
        }
    });
    slots
        .into_iter()
        .map(|v| v.expect("every prime computed"))
        .collect()
}

/// One tree DP per prime over `K_{<=w}`, restricted to the weight-`w` nodes.
pub fn mod_harmonic_sums(primes: &[Prime], w: u32, workers: usize) -> Result<HarmonicSums> {
    check_primes(primes, w as u64)?;
    let tree = bounded_weight_tree(w);
    let per_prime_vals = per_prime(primes, workers, |p| tree_dp_values(p, &tree));
    let mut by_index: HashMap<Index, Vec<Residue>> = HashMap::new();
    for node in tree.dfs_preorder() {
        if tree.weight(node) == w {
            let entries = primes
                .iter()
                .zip(&per_prime_vals)
                .map(|(&p, vals)| Residue::new(vals[node], p))
                .collect();
            by_index.insert(tree.index(node), entries);
        }
    }
    let vectors: Vec<ResidueVector> = enumerate_k(w)
        .into_iter()
        .map(|k| {
            let entries = by_index.remove(&k).expect("tree covers K_w");
            ResidueVector { index: k, entries }
        })
        .collect();
    let position = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| (v.index.clone(), i))
        .collect();
    Ok(HarmonicSums {
        weight: w,
        primes: primes.to_vec(),
        vectors,
        position,
    })
}
