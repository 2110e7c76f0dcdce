//! Acceptance criteria, one line each. Criteria 1-6 and 8 are hard; 7 reports
//! EXPECTED-FAIL on a deviation from the conjectured dimensions; 9 is soft.

use std::process::{Command, Output};
use std::time::Instant;

use fmzv_core::dynamic::{minimal_generating_system_with, DynamicOptions, RebuildPolicy};
use fmzv_core::harmonic::{mod_harmonic_sums, parallel_horizontal_dp, Engine};
use fmzv_core::indices::{bounded_weight_tree, enumerate_k};
use fmzv_core::mitm::{nonzero_tuple, solve_bounded_relation};
use fmzv_core::modarith::{modulus_product, parse_prime_list};
use fmzv_core::oracle::{brute_relation, harmonic_oracle};
use fmzv_core::pipeline::{dimension_recursion, run_pipeline_on, SplitPolicy};
use fmzv_core::{AbelianGroup, CoefficientArray, Cyclic, Index, PipelineConfig, Prime, W10_PRIMES};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

enum Verdict {
    Pass(String),
    Fail(String),
    ExpectedFail(String),
    Soft(String),
}

fn fmzv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fmzv"))
        .args(args)
        .env_remove("FMZV_WORKERS")
        .output()
        .expect("run fmzv")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn w10_primes() -> String {
    W10_PRIMES.map(|p| p.to_string()).join(",")
}

fn verify_builtin(primes: &str) -> Verdict {
    let t = Instant::now();
    let out = fmzv(&["verify", "builtin-w10", "--primes", primes]);
    let text = stdout(&out);
    let summary = text.lines().last().unwrap_or("").to_string();
    let msg = format!("{summary} [{:.1}s]", t.elapsed().as_secs_f64());
    if out.status.success() && summary.starts_with("509/509 ") {
        Verdict::Pass(msg)
    } else {
        Verdict::Fail(msg)
    }
}

fn criterion_1() -> Verdict {
    verify_builtin(&w10_primes())
}

fn criterion_2() -> Verdict {
    verify_builtin("10103,10111,10133")
}

fn criterion_3() -> Verdict {
    let cases = [
        ("7", "2", "(2,1)"),
        ("100", "3", "(-3,2)"),
        ("100", "2", "none"),
    ];
    let mut got = Vec::new();
    for (n, b, want) in cases {
        let out = fmzv(&["solve", "--modulus", n, "--elements", "2,3", "--bound", b]);
        let line = stdout(&out).trim().to_string();
        // any witness is acceptable; it must actually vanish
        let ok = match want {
            "none" => line == "none",
            _ => {
                let c: Vec<i64> = line
                    .trim_matches(|ch| ch == '(' || ch == ')')
                    .split(',')
                    .filter_map(|t| t.parse().ok())
                    .collect();
                let n: i64 = n.parse().unwrap();
                c.len() == 2 && c != [0, 0] && (2 * c[0] + 3 * c[1]).rem_euclid(n) == 0
            }
        };
        if !ok || !out.status.success() {
            return Verdict::Fail(format!("Z/{n}Z B={b}: got `{line}`, expected {want}"));
        }
        got.push(line);
    }
    Verdict::Pass(got.join(" / "))
}

fn criterion_4() -> Verdict {
    let indices: Vec<Index> = (0..=5)
        .flat_map(enumerate_k)
        .filter(|k| !k.is_empty())
        .collect();
    let tree = bounded_weight_tree(5);
    let mut checks = 0;
    for p in [5u64, 7, 11, 13, 101] {
        let prime = Prime::new(p).unwrap();
        let table = parallel_horizontal_dp(prime, &tree);
        for k in &indices {
            let want = harmonic_oracle(p, k.parts(), p - 1).unwrap();
            let got = [
                Engine::Naive.eval(prime, k).value(),
                Engine::Horizontal.eval(prime, k).value(),
                Engine::Vertical.eval(prime, k).value(),
                table.get(k).unwrap().value(),
            ];
            if got.iter().any(|&v| v != want) {
                return Verdict::Fail(format!("p={p} k={k}: oracle {want}, engines {got:?}"));
            }
            checks += 1;
        }
    }
    Verdict::Pass(format!(
        "{} indices x 5 primes, {checks} agreements",
        indices.len()
    ))
}

fn criterion_5() -> Verdict {
    let mut rng = StdRng::seed_from_u64(5);
    let mut found = 0;
    for i in 0..200 {
        let n = rng.gen_range(2..=1_000_000u64);
        let d = rng.gen_range(1..=6usize);
        let b = rng.gen_range(0..=5u32);
        let g = Cyclic::new(n).unwrap();
        let xs: Vec<u64> = (0..d).map(|_| rng.gen_range(0..n)).collect();
        let c = CoefficientArray::new(b);
        let fast = solve_bounded_relation(&g, &xs, &c, nonzero_tuple);
        let slow = brute_relation(&g, &xs, &c, nonzero_tuple).unwrap();
        if fast.is_some() != slow.is_some() {
            return Verdict::Fail(format!("instance {i}: N={n} x={xs:?} B={b}"));
        }
        if let Some(sol) = fast {
            if sol.evaluate(&g, &xs) != g.zero() || !nonzero_tuple(&sol.tuple) {
                return Verdict::Fail(format!("instance {i}: witness does not vanish"));
            }
            found += 1;
        }
    }
    Verdict::Pass(format!(
        "200 instances agree ({found} with witnesses, all re-verified)"
    ))
}

fn criterion_6() -> Verdict {
    let mut rng = StdRng::seed_from_u64(6);
    for i in 0..50 {
        let n = rng.gen_range(2..=10_000u64);
        let g = Cyclic::new(n).unwrap();
        let s: Vec<u64> = (0..rng.gen_range(0..=30))
            .map(|_| rng.gen_range(0..n))
            .collect();
        let c = CoefficientArray::new(rng.gen_range(0..=3));
        let run = |policy| {
            minimal_generating_system_with(
                &g,
                &s,
                &c,
                DynamicOptions {
                    policy,
                    keys_only: false,
                },
            )
            .generators
        };
        let cost = run(RebuildPolicy::CostModel);
        if run(RebuildPolicy::Always) != cost || run(RebuildPolicy::Never) != cost {
            return Verdict::Fail(format!("instance {i}: policies disagree"));
        }
    }
    let primes = parse_prime_list("101,103,107,109").unwrap();
    for w in 0..=6 {
        let base = PipelineConfig::new(w, primes.clone(), 30);
        let sums = mod_harmonic_sums(&primes, w, 1).unwrap();
        let bases: Vec<Vec<Index>> = [
            SplitPolicy::Fixed(0),
            SplitPolicy::CostModel,
            SplitPolicy::Fixed(4),
        ]
        .into_iter()
        .map(|split| {
            run_pipeline_on(
                &PipelineConfig {
                    split,
                    ..base.clone()
                },
                &sums,
            )
            .unwrap()
            .basis
        })
        .collect();
        if bases.windows(2).any(|p| p[0] != p[1]) {
            return Verdict::Fail(format!("w={w}: basis depends on key length"));
        }
    }
    Verdict::Pass(
        "50 generating-system instances x 3 policies; pipeline w<=6 x 3 key lengths".into(),
    )
}

fn criterion_7() -> Verdict {
    let primes = parse_prime_list("101,103,107,109").unwrap();
    let mut parts = Vec::new();
    let mut deviations = Vec::new();
    for w in 3..=7 {
        let cfg = PipelineConfig::new(w, primes.clone(), 30);
        let sums = mod_harmonic_sums(&primes, w, 1).unwrap();
        let out = run_pipeline_on(&cfg, &sums).unwrap();
        let want = dimension_recursion(w);
        parts.push(format!("w={w}:{}", out.basis.len()));
        if out.basis.len() as u64 != want {
            let basis: Vec<String> = out.basis.iter().map(|k| k.to_string()).collect();
            deviations.push(format!("w={w} basis {} vs d_w={want}", basis.join(" ")));
        }
    }
    let summary = parts.join(" ");
    if deviations.is_empty() {
        Verdict::Pass(summary)
    } else {
        Verdict::ExpectedFail(format!("{summary}; {}", deviations.join("; ")))
    }
}

fn criterion_8() -> Verdict {
    let k10 = enumerate_k(10).len();
    let tree_ok = (1..=12).all(|w| bounded_weight_tree(w).len() == 1 << w);
    let primes: Vec<Prime> = W10_PRIMES.iter().map(|&p| Prime::new(p).unwrap()).collect();
    let n = modulus_product(&primes).to_string();
    let msg = format!("|K_10| = {k10}, tree sizes 2^w: {tree_ok}, N = {n}");
    if k10 == 512 && tree_ok && n == "106700590455862347842907841856033238416352421" {
        Verdict::Pass(msg)
    } else {
        Verdict::Fail(msg)
    }
}

fn criterion_9() -> Verdict {
    let out = fmzv(&["bench", "--weight", "10", "--primes", "10007,20011"]);
    let text = stdout(&out);
    let line = text
        .lines()
        .find(|l| l.starts_with("ratio"))
        .unwrap_or("no ratio reported");
    Verdict::Soft(line.to_string())
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 weight-10 table, 11 discovery primes", criterion_1),
        ("2 weight-10 table, fresh primes", criterion_2),
        ("3 worked solve examples", criterion_3),
        ("4 engine equivalence", criterion_4),
        ("5 MITM vs brute force", criterion_5),
        ("6 policy invariance", criterion_6),
        ("7 small-weight dimensions", criterion_7),
        ("8 structural counts", criterion_8),
        ("9 scaling sanity (soft)", criterion_9),
    ];
    let mut hard_failures = 0;
    for (name, check) in criteria {
        let (tag, msg) = match check() {
            Verdict::Pass(m) => ("PASS", m),
            Verdict::Fail(m) => {
                hard_failures += 1;
                ("FAIL", m)
            }
            Verdict::ExpectedFail(m) => ("EXPECTED-FAIL", m),
            Verdict::Soft(m) => ("SOFT", m),
        };
        println!("criterion {name}: {tag}: {msg}");
    }
    if hard_failures > 0 {
        eprintln!("{hard_failures} hard criteria failed");
        std::process::exit(1);
    }
}
