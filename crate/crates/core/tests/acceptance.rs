//! Acceptance suite. One PASS/FAIL line per criterion; exits non-zero on any FAIL.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rand::seq::SliceRandom;
use radii_lab::linalg::{max_abs, op_norm};
use radii_lab::mq::{block_evaluate, build_mq_poly, mq_agler_upper, MqSpec};
use radii_lab::operator::{
    agler_ratio_search, check_positivity_lemma, defect_full, indicator, random_commuting_tuple,
    AglerSearchOptions,
};
use radii_lab::poly::random_poly;
use radii_lab::radii::{ka_lower_closed, ka_lower_root, kd_lower_bk, sa3_upper_grinshpan, sa_lower, sa_upper_dixon,
    ka_upper_mq};
use radii_lab::rng::stream;
use radii_lab::series::{geometric_sqrt_d_series, polylog_neg_half, solve_root};
use radii_lab::steiner::{greedy_steiner, steiner_bounds, GreedyMode};
use radii_lab::transfer::{coefficient, quadrature_check, random_colligation, verify_lemma};
use radii_lab::MultiIndex;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn c1_polylog_root() -> Outcome {
    let t = Instant::now();
    let r = solve_root(polylog_neg_half, 0.5, (0.0, 0.9), 1e-9).map_err(|e| e.to_string())?;
    within_time(t.elapsed(), Duration::from_secs(1))?;
    // mpmath: polylog(-1/2, r) = 1/2
    let reference = 0.3006282829859008;
    ensure((r - reference).abs() <= 1e-6, || format!("root {r} vs {reference}"))?;
    ensure(r >= 0.3006, || format!("root {r} < 0.3006"))?;
    Ok(format!("root = {r:.9}"))
}

fn c2_bk_root() -> Outcome {
    let t = Instant::now();
    let r = kd_lower_bk(2, 1e-10).map_err(|e| e.to_string())?;
    within_time(t.elapsed(), Duration::from_secs(1))?;
    ensure((r - 0.287347).abs() <= 1e-6, || format!("root {r}"))?;
    Ok(format!("root = {r:.9}"))
}

fn c3_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 1..=30u64 {
        let closed = ka_lower_closed(d);
        let hi = 0.999 / (d as f64).sqrt();
        let solved = solve_root(|r, tol| geometric_sqrt_d_series(d, r, tol), 0.5, (0.0, hi), 1e-12)
            .map_err(|e| format!("d={d}: {e}"))?;
        worst = worst.max((closed - solved).abs());
        ensure((closed - solved).abs() <= 1e-10, || format!("d={d}: {closed} vs {solved}"))?;
        let root = ka_lower_root(d, 1e-12).map_err(|e| format!("d={d}: {e}"))?;
        ensure(root >= closed, || format!("d={d}: root {root} < closed {closed}"))?;
    }
    Ok(format!("max |closed - bisection| = {worst:.2e}"))
}

fn c4_mq() -> Outcome {
    let t = Instant::now();
    let cases = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 2)];
    let mut worst_ratio: f64 = 0.0;
    for (ci, &(q, m)) in cases.iter().enumerate() {
        let spec = MqSpec::new(q, m).map_err(|e| e.to_string())?;
        let p = build_mq_poly(&spec).map_err(|e| e.to_string())?;
        let expected = q.pow(m as u32);
        ensure(p.len() == expected, || format!("(q,m)=({q},{m}): {} terms", p.len()))?;
        for (_, c) in p.terms() {
            ensure((c.norm() - 1.0).abs() <= 1e-12, || format!("(q,m)=({q},{m}): |c| = {}", c.norm()))?;
        }
        ensure((p.l1_norm() - expected as f64).abs() <= 1e-9, || format!("l1 = {}", p.l1_norm()))?;
        let bound = mq_agler_upper(&spec);
        let mut rng = stream(4, ci as u64);
        for _ in 0..50 {
            let tuple = random_commuting_tuple(&mut rng, spec.variables(), 8, 1.0 - 1e-6);
            let val = block_evaluate(&spec, &tuple).map_err(|e| e.to_string())?;
            let norm = op_norm(&val);
            worst_ratio = worst_ratio.max(norm / bound);
            ensure(norm <= bound + 1e-6, || format!("(q,m)=({q},{m}): ||P(T)|| = {norm} > {bound}"))?;
        }
    }
    within_time(t.elapsed(), Duration::from_secs(30))?;
    Ok(format!("max ||P(T)||/bound = {worst_ratio:.4}"))
}

fn c5_transfer() -> Outcome {
    let t = Instant::now();
    let mut rng = stream(5, 0);
    let mut quad_checks = 0usize;
    let mut min_margin = f64::INFINITY;
    for i in 0..200u64 {
        let d = rng.random_range(2..=4usize);
        let blocks: Vec<usize> = (0..d).map(|_| rng.random_range(1..=3usize)).collect();
        let col = random_colligation(1000 + i, &blocks).map_err(|e| e.to_string())?;
        let rep = verify_lemma(&col, 6, 1e-8).map_err(|e| e.to_string())?;
        let bad = rep.violations(1e-8);
        ensure(bad.is_empty(), || format!("colligation {i}: {} violations", bad.len()))?;
        for row in &rep.rows {
            min_margin = min_margin.min(row.margin);
        }
        {
            for k in 1..=6u32 {
                let qc = quadrature_check(&col, k).map_err(|e| e.to_string())?;
                ensure(qc.agrees(1e-10), || {
                    format!("colligation {i}, k={k}: quadrature {} vs exact {}", qc.quadrature, qc.exact)
                })?;
                ensure(qc.within_bound(1e-10), || format!("colligation {i}, k={k}: exceeds |B|^2"))?;
                quad_checks += 1;
            }
        }
    }
    within_time(t.elapsed(), Duration::from_secs(120))?;
    Ok(format!("min margin = {min_margin:.3e}, {quad_checks} quadrature checks"))
}

fn c6_positivity() -> Outcome {
    let t = Instant::now();
    let mut rng = stream(6, 0);
    let mut min_eig = f64::INFINITY;
    let mut worst_identity: f64 = 0.0;
    for i in 0..500 {
        let d = rng.random_range(1..=5usize);
        let tuple = random_commuting_tuple(&mut rng, d, 8, 1.0);
        let size = rng.random_range(1..=d);
        let mut s: Vec<usize> = (0..d).collect();
        s.shuffle(&mut rng);
        s.truncate(size);
        let scaled = tuple.scaled_each(
            &(0..d)
                .map(|j| if s.contains(&j) { 1.0 / (size as f64).sqrt() } else { 1.0 })
                .collect::<Vec<_>>(),
        );
        let check = check_positivity_lemma(&scaled, &s, 1e-8).map_err(|e| e.to_string())?;
        ensure(check.holds_hypothesis, || format!("tuple {i}: hypothesis fails"))?;
        min_eig = min_eig.min(check.min_eig);
        ensure(check.min_eig >= -1e-8, || format!("tuple {i}: min eigenvalue {}", check.min_eig))?;

        let chain = common::inductive_defects(&scaled, &s);
        for k in 1..=s.len() {
            let direct = defect_full(&scaled, &indicator(d, &s[..k])).map_err(|e| e.to_string())?;
            let diff = max_abs(&(direct - &chain[k]));
            worst_identity = worst_identity.max(diff);
            ensure(diff <= 1e-10, || format!("tuple {i}, step {k}: identity off by {diff:e}"))?;
        }
    }
    within_time(t.elapsed(), Duration::from_secs(60))?;
    Ok(format!("min eigenvalue = {min_eig:.3e}, identity residual = {worst_identity:.2e}"))
}

#[allow(clippy::approx_constant)]
fn c7_sa3() -> Outcome {
    let up = sa3_upper_grinshpan();
    let lo = sa_lower(3).map_err(|e| e.to_string())?;
    ensure((up - 0.90167).abs() <= 1e-4 && up <= 0.902, || format!("upper {up}"))?;
    ensure((lo - 0.70710).abs() <= 1e-4, || format!("lower {lo}"))?;
    Ok(format!("{lo:.5} <= SA_3 <= {up:.5}"))
}

fn c8_oracles() -> Outcome {
    let mut rng = stream(8, 0);
    let mut worst_coeff: f64 = 0.0;
    for i in 0..20u64 {
        let d = rng.random_range(1..=3usize);
        let blocks: Vec<usize> = (0..d).map(|_| rng.random_range(1..=3usize)).collect();
        let col = random_colligation(800 + i, &blocks).map_err(|e| e.to_string())?;
        for k in 0..=4u32 {
            for alpha in MultiIndex::all_of_degree(d, k) {
                let fast = coefficient(&col, &alpha).map_err(|e| e.to_string())?;
                let brute = common::word_sum_coefficient(&col, &alpha);
                let diff = (fast - brute).norm();
                worst_coeff = worst_coeff.max(diff);
                ensure(diff <= 1e-12, || format!("colligation {i}, alpha {alpha:?}: {fast} vs {brute}"))?;
            }
        }
    }
    let cases = [(2, 2), (3, 2), (2, 3), (4, 2)];
    let mut worst_block: f64 = 0.0;
    for i in 0..20 {
        let (q, m) = cases[i % cases.len()];
        let spec = MqSpec::new(q, m).map_err(|e| e.to_string())?;
        let p = build_mq_poly(&spec).map_err(|e| e.to_string())?;
        let tuple = random_commuting_tuple(&mut rng, spec.variables(), 6, 1.0 - 1e-6);
        let fast = block_evaluate(&spec, &tuple).map_err(|e| e.to_string())?;
        let naive = common::naive_eval(&p, &tuple);
        let diff = max_abs(&(fast - naive));
        worst_block = worst_block.max(diff);
        ensure(diff <= 1e-8, || format!("tuple {i} (q,m)=({q},{m}): off by {diff:e}"))?;
    }
    Ok(format!("coefficient residual {worst_coeff:.1e}, block residual {worst_block:.1e}"))
}

fn ceil_rational(q: &BigRational) -> BigInt {
    let (n, d) = (q.numer(), q.denom());
    (n + d - 1u32) / d
}

fn c9_steiner() -> Outcome {
    let t = Instant::now();
    let mut triples = 0usize;
    for d in 1..=30u64 {
        for k in 1..=d {
            for tt in 1..=k {
                let b = steiner_bounds(tt, k, d).map_err(|e| e.to_string())?;
                ensure(b.dixon_lower <= b.upper, || format!("({tt},{k},{d}): dixon > upper"))?;
                triples += 1;
            }
        }
    }
    let mut crude_bad: Vec<(u64, u64, u64)> = Vec::new();
    for d in 1..=60u64 {
        for k in 1..=d / 2 {
            for tt in 1..=k {
                let b = steiner_bounds(tt, k, d).map_err(|e| e.to_string())?;
                let crude = b.crude_lower.ok_or_else(|| format!("({tt},{k},{d}): no crude bound"))?;
                if crude > b.dixon_lower {
                    crude_bad.push((tt, k, d));
                }
            }
        }
    }
    let mut greedy_runs = 0usize;
    for d in 1..=30u64 {
        for k in 1..=d {
            if radii_lab::binom::binomial(d, k).to_u64().is_none_or(|c| c > 100_000) {
                continue;
            }
            for tt in 1..=k {
                let b = steiner_bounds(tt, k, d).map_err(|e| e.to_string())?;
                let out = greedy_steiner(tt, k, d, 0).map_err(|e| e.to_string())?;
                ensure(out.mode == GreedyMode::Exhaustive, || format!("({tt},{k},{d}): not exhaustive"))?;
                out.system.validate().map_err(|e| e.to_string())?;
                let need = ceil_rational(&b.dixon_lower);
                ensure(BigInt::from(out.system.len()) >= need, || {
                    format!("({tt},{k},{d}): {} blocks < {need}", out.system.len())
                })?;
                greedy_runs += 1;
            }
        }
    }
    within_time(t.elapsed(), Duration::from_secs(120))?;
    if let Some(&(tt, k, d)) = crude_bad.first() {
        return Err(format!(
            "crude > dixon at {} triples, first ({tt},{k},{d}); dixon <= upper and greedy parts hold",
            crude_bad.len()
        ));
    }
    Ok(format!("{triples} bound triples, {greedy_runs} greedy runs"))
}

fn c10_von_neumann_ando() -> Outcome {
    let t = Instant::now();
    let mut rng = stream(10, 0);
    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let d = rng.random_range(1..=2usize);
        let deg = rng.random_range(1..=4u32);
        let n_terms = rng.random_range(1..=6usize);
        let f = random_poly(&mut rng, d, deg, n_terms);
        let opts = AglerSearchOptions { budget: 10_000, seed: 100 + i, ..AglerSearchOptions::default() };
        let res = agler_ratio_search(&f, &opts).map_err(|e| e.to_string())?;
        worst = worst.max(res.ratio);
        ensure(res.ratio <= 1.0 + 1e-6, || format!("poly {i} (d={d}): ratio {}", res.ratio))?;
    }
    within_time(t.elapsed(), Duration::from_secs(60))?;
    Ok(format!("max ratio = {worst:.6}"))
}

fn c11_corridors() -> Outcome {
    let mut lines = Vec::new();
    for d in [100u64, 1_000, 10_000, 100_000] {
        let ld = (d as f64).ln() / d as f64;
        let mq = ka_upper_mq(d).map_err(|e| e.to_string())?;
        let r_mq = mq.value / ld.sqrt();
        ensure((0.5..=3.0).contains(&r_mq), || format!("d={d}: MQ ratio {r_mq}"))?;
        let dx = sa_upper_dixon(d).map_err(|e| e.to_string())?;
        let r_dx = dx.value / ld.powf(0.25);
        ensure((0.5..=10.0).contains(&r_dx), || format!("d={d}: Dixon ratio {r_dx}"))?;
        lines.push(format!("d={d}: {r_mq:.3}/{r_dx:.3}"));
    }
    Ok(lines.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("polylog root", c1_polylog_root),
        ("Boas-Khavinson root d=2", c2_bk_root),
        ("closed form vs bisection", c3_closed_form),
        ("MQ polynomial", c4_mq),
        ("transfer-function lemma", c5_transfer),
        ("positivity lemma", c6_positivity),
        ("SA_3 arithmetic", c7_sa3),
        ("oracle equivalence", c8_oracles),
        ("Steiner sweep", c9_steiner),
        ("von Neumann/Ando", c10_von_neumann_ando),
        ("asymptotic corridors", c11_corridors),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok(detail) => println!("PASS  {:>2} {name} ({ms:.0} ms): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2} {name} ({ms:.0} ms): {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
