//! Relation tables, harmonic-sum dumps and pipeline configuration files.
//!
//! Relation tables are CSV with header `target,coefficients`, one row per
//! non-basis index: `"(6,1,1,1,1)","(-80,47,2,64)"`. The basis is not part of
//! the CSV; it travels separately (or inside the JSON form).

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::{mod_harmonic_sums, Engine};
use crate::indices::{enumerate_k, Index};
use crate::modarith::{parse_prime_list, Prime};
use crate::pipeline::{
    dimension_recursion, verify_relation_with, GuardReport, GuardVerdict, PipelineConfig,
    PipelineOutput, RelationRecord, VerificationReport, DEFAULT_SAFETY_FACTOR,
};

const BUILTIN_W10_CSV: &str = include_str!("../data/w10_relations.csv");

/// Name accepted by the CLI for the bundled weight-10 table.
pub const BUILTIN_W10: &str = "builtin-w10";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub target: Index,
    pub coefficients: Vec<i64>,
}

/// A basis plus one coefficient row per non-basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationTable {
    pub basis: Vec<Index>,
    pub rows: Vec<TableRow>,
}

/// Formats `(a,b,c)`.
pub fn format_coefficients(c: &[i64]) -> String {
    let parts: Vec<String> = c.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

pub fn parse_coefficients(s: &str) -> Result<Vec<i64>> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("coefficients must be parenthesised: `{s}`")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad coefficient `{t}` in `{s}`")))
        })
        .collect()
}

/// Parses `(8,1,1);(7,2,1)` style basis lists; `;` or whitespace separated.
pub fn parse_basis(s: &str) -> Result<Vec<Index>> {
    s.split(|c: char| c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

impl RelationTable {
    /// The weight-10 table over the basis `(8,1,1), (7,2,1), (6,3,1)`: 509 rows
    /// in canonical order.
    pub fn builtin_w10() -> RelationTable {
        let basis = vec![
            crate::idx![8, 1, 1],
            crate::idx![7, 2, 1],
            crate::idx![6, 3, 1],
        ];
        RelationTable::read_csv(BUILTIN_W10_CSV.as_bytes(), basis)
            .expect("bundled table is well formed")
    }

    pub fn from_output(out: &PipelineOutput) -> RelationTable {
        RelationTable {
            basis: out.basis.clone(),
            rows: out
                .relations
                .iter()
                .map(|r| TableRow {
                    target: r.target.clone(),
                    coefficients: r.coefficients.clone(),
                })
                .collect(),
        }
    }

    pub fn records(&self) -> Vec<RelationRecord> {
        self.rows
            .iter()
            .map(|r| RelationRecord {
                basis: self.basis.clone(),
                target: r.target.clone(),
                coefficients: r.coefficients.clone(),
            })
            .collect()
    }

    /// Common weight of basis and targets; `None` for an empty table.
    pub fn weight(&self) -> Result<Option<u32>> {
        let mut it = self.basis.iter().chain(self.rows.iter().map(|r| &r.target));
        let Some(first) = it.next() else {
            return Ok(None);
        };
        let w = first.weight();
        for k in it {
            if k.weight() != w {
                return Err(Error::WeightMismatch(w, k.weight()));
            }
        }
        Ok(Some(w))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["target", "coefficients"])?;
        for r in &self.rows {
            wtr.write_record([r.target.to_string(), format_coefficients(&r.coefficients)])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: Read>(r: R, basis: Vec<Index>) -> Result<RelationTable> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["target", "coefficients"] {
            return Err(Error::Parse(format!(
                "expected header `target,coefficients`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let target: Index = rec[0].parse()?;
            let coefficients = parse_coefficients(&rec[1])?;
            if coefficients.len() != basis.len() + 1 {
                return Err(Error::Parse(format!(
                    "row {target}: expected {} coefficients, found {}",
                    basis.len() + 1,
                    coefficients.len()
                )));
            }
            rows.push(TableRow {
                target,
                coefficients,
            });
        }
        Ok(RelationTable { basis, rows })
    }
}

/// Outcome of checking one table row.
#[derive(Debug, Clone)]
pub struct RowVerdict {
    pub target: Index,
    pub report: VerificationReport,
}

/// Verifies every row against one harmonic pre-computation per prime.
pub fn verify_table(
    table: &RelationTable,
    primes: &[Prime],
    workers: usize,
) -> Result<Vec<RowVerdict>> {
    let Some(w) = table.weight()? else {
        return Ok(Vec::new());
    };
    let sums = mod_harmonic_sums(primes, w, workers)?;
    table
        .records()
        .into_iter()
        .map(|rec| {
            Ok(RowVerdict {
                report: verify_relation_with(&rec, &sums)?,
                target: rec.target,
            })
        })
        .collect()
}

/// Harmonic-sum rows `(index, prime, value)` for every index of weight `w`,
/// canonical order × prime order. `engine = None` picks horizontal or vertical
/// per index.
pub fn harmonic_rows(
    primes: &[Prime],
    w: u32,
    engine: Option<Engine>,
    workers: usize,
) -> Result<Vec<(Index, u64, u64)>> {
    let rows = match engine {
        Some(Engine::Tree) => {
            let sums = mod_harmonic_sums(primes, w, workers)?;
            sums.vectors()
                .iter()
                .flat_map(|v| {
                    v.entries
                        .iter()
                        .map(|r| (v.index.clone(), r.modulus().get(), r.value()))
                })
                .collect()
        }
        other => {
            crate::harmonic::check_primes(primes, w as u64)?;
            let mut out = Vec::new();
            for k in enumerate_k(w) {
                for &p in primes {
                    let e = other.unwrap_or_else(|| Engine::auto(p, k.depth()));
                    out.push((k.clone(), p.get(), e.eval(p, &k).value()));
                }
            }
            out
        }
    };
    Ok(rows)
}

pub fn write_harmonic_csv<W: Write>(rows: &[(Index, u64, u64)], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["index", "prime", "value"])?;
    for (k, p, v) in rows {
        wtr.write_record([k.to_string(), p.to_string(), v.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Parses the `key = value` configuration format. Blank lines and lines
/// starting with `#` are ignored; `:` is accepted in place of `=`.
pub fn parse_config(text: &str) -> Result<PipelineConfig> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
        let key = k.trim().to_string();
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Config(format!("duplicate key `{key}`")));
        }
    }
    let take = |map: &mut BTreeMap<String, String>, key: &str| map.remove(key);
    let num = |key: &str, v: String| -> Result<u64> {
        v.parse::<u64>().map_err(|_| {
            Error::Config(format!("`{key}` must be a non-negative integer, got `{v}`"))
        })
    };
    let weight =
        take(&mut map, "weight").ok_or_else(|| Error::Config("missing `weight`".into()))?;
    let primes =
        take(&mut map, "primes").ok_or_else(|| Error::Config("missing `primes`".into()))?;
    let bound = take(&mut map, "bound").ok_or_else(|| Error::Config("missing `bound`".into()))?;
    let primes = parse_prime_list(&primes).map_err(|e| Error::Config(e.to_string()))?;
    let mut cfg = PipelineConfig::new(
        num("weight", weight)? as u32,
        primes,
        num("bound", bound)? as u32,
    );
    cfg.safety_factor = match take(&mut map, "safety_factor") {
        Some(v) => num("safety_factor", v)?,
        None => DEFAULT_SAFETY_FACTOR,
    };
    if let Some(v) = take(&mut map, "workers") {
        cfg.workers = num("workers", v)?.max(1) as usize;
    }
    if let Some(v) = take(&mut map, "keys_only") {
        cfg.keys_only = match v.as_str() {
            "true" | "1" | "yes" => true,
            "false" | "0" | "no" => false,
            _ => {
                return Err(Error::Config(format!(
                    "`keys_only` must be a boolean, got `{v}`"
                )))
            }
        };
    }
    if let Some(k) = map.keys().next() {
        return Err(Error::Config(format!("unknown key `{k}`")));
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JsonConfig {
    pub weight: u32,
    pub primes: Vec<u64>,
    pub bound: u32,
    pub safety_factor: u64,
    pub keys_only: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JsonGuard {
    pub modulus: String,
    pub threshold: String,
    pub short_threshold: String,
    pub pass: bool,
    pub short_pass: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JsonRelation {
    pub target: Index,
    pub coefficients: Vec<i64>,
    pub residues: Vec<u64>,
}

/// JSON form of a pipeline run: config, basis, guard and verified relations.
#[derive(Debug, Serialize, Deserialize)]
pub struct JsonReport {
    pub config: JsonConfig,
    pub expected_dimension: u64,
    pub basis: Vec<Index>,
    pub guard: JsonGuard,
    pub relations: Vec<JsonRelation>,
}

impl JsonReport {
    pub fn new(
        config: &PipelineConfig,
        out: &PipelineOutput,
        guard: &GuardReport,
        residues: Vec<VerificationReport>,
    ) -> Self {
        JsonReport {
            config: JsonConfig {
                weight: config.weight,
                primes: config.primes.iter().map(|p| p.get()).collect(),
                bound: config.bound,
                safety_factor: config.safety_factor,
                keys_only: config.keys_only,
            },
            expected_dimension: dimension_recursion(config.weight),
            basis: out.basis.clone(),
            guard: JsonGuard {
                modulus: guard.modulus.to_string(),
                threshold: guard.threshold.to_string(),
                short_threshold: guard.short_threshold.to_string(),
                pass: guard.verdict == GuardVerdict::Pass,
                short_pass: guard.short_verdict == GuardVerdict::Pass,
            },
            relations: out
                .relations
                .iter()
                .zip(residues)
                .map(|(r, v)| JsonRelation {
                    target: r.target.clone(),
                    coefficients: r.coefficients.clone(),
                    residues: v.residues,
                })
                .collect(),
        }
    }

    pub fn table(&self) -> RelationTable {
        RelationTable {
            basis: self.basis.clone(),
            rows: self
                .relations
                .iter()
                .map(|r| TableRow {
                    target: r.target.clone(),
                    coefficients: r.coefficients.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idx;

    #[test]
    fn builtin_fixture_shape() {
        let t = RelationTable::builtin_w10();
        assert_eq!(t.rows.len(), 509);
        assert_eq!(t.weight().unwrap(), Some(10));
        assert!(t.rows.iter().all(|r| *r.coefficients.last().unwrap() > 0));
        assert!(t.rows.iter().all(|r| r.coefficients.len() == 4));
        // canonical order with the basis removed
        let expected: Vec<Index> = enumerate_k(10)
            .into_iter()
            .filter(|k| !t.basis.contains(k))
            .collect();
        let got: Vec<Index> = t.rows.iter().map(|r| r.target.clone()).collect();
        assert_eq!(got, expected);
        let row = t
            .rows
            .iter()
            .find(|r| r.target == idx![6, 1, 1, 1, 1])
            .unwrap();
        assert_eq!(row.coefficients, vec![-80, 47, 2, 64]);
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let t = RelationTable::builtin_w10();
        let text = t.to_csv_string();
        assert_eq!(text, BUILTIN_W10_CSV);
        let back = RelationTable::read_csv(text.as_bytes(), t.basis.clone()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn csv_errors() {
        assert!(RelationTable::read_csv("a,b\n".as_bytes(), vec![]).is_err());
        let short = "target,coefficients\n\"(2,1)\",\"(1)\"\n";
        assert!(RelationTable::read_csv(short.as_bytes(), vec![idx![3]]).is_err());
        let bad = "target,coefficients\n(3),\"(1,x)\"\n";
        assert!(RelationTable::read_csv(bad.as_bytes(), vec![idx![2, 1]]).is_err());
    }

    #[test]
    fn coefficient_format() {
        assert_eq!(format_coefficients(&[-80, 47, 2, 64]), "(-80,47,2,64)");
        assert_eq!(
            parse_coefficients("(-80, 47,2,64)").unwrap(),
            vec![-80, 47, 2, 64]
        );
        assert_eq!(parse_coefficients("()").unwrap(), Vec::<i64>::new());
        assert!(parse_coefficients("1,2").is_err());
        assert_eq!(
            parse_basis("(8,1,1);(7,2,1) (6,3,1)").unwrap(),
            vec![idx![8, 1, 1], idx![7, 2, 1], idx![6, 3, 1]]
        );
    }

    #[test]
    fn config_parsing() {
        let cfg = parse_config(
            "# small run\nweight = 3\nprimes = 101, 103\nbound: 5\nworkers = 2\nkeys_only = true\n",
        )
        .unwrap();
        assert_eq!(cfg.weight, 3);
        assert_eq!(cfg.primes.len(), 2);
        assert_eq!(cfg.bound, 5);
        assert_eq!(cfg.workers, 2);
        assert!(cfg.keys_only);
        assert_eq!(cfg.safety_factor, DEFAULT_SAFETY_FACTOR);

        for bad in [
            "weight = 3\nbound = 5\n",
            "weight = 3\nprimes = 101,1o3\nbound = 5\n",
            "weight = 3\nprimes = 101,101\nbound = 5\n",
            "weight = 3\nprimes = 101\nbound = 5\ncolour = red\n",
            "weight = 3\nprimes = 101\nbound = 5\nkeys_only = maybe\n",
            "weight 3\n",
        ] {
            assert!(matches!(parse_config(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn harmonic_rows_examples() {
        let p5 = [Prime::new(5).unwrap()];
        let rows = harmonic_rows(&p5, 1, Some(Engine::Tree), 1).unwrap();
        assert_eq!(rows, vec![(idx![1], 5, 0)]);
        let mut buf = Vec::new();
        write_harmonic_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "index,prime,value\n(1),5,0\n"
        );

        let rows = harmonic_rows(&p5, 0, None, 1).unwrap();
        assert_eq!(rows, vec![(Index::empty(), 5, 1)]);

        let p11 = [Prime::new(11).unwrap()];
        let tree = harmonic_rows(&p11, 4, Some(Engine::Tree), 1).unwrap();
        assert_eq!(tree.len(), 8);
        for e in [Engine::Naive, Engine::Horizontal, Engine::Vertical] {
            assert_eq!(harmonic_rows(&p11, 4, Some(e), 1).unwrap(), tree);
        }
        assert_eq!(harmonic_rows(&p11, 4, None, 1).unwrap(), tree);
    }
}
