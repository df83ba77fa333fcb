//! End-to-end acceptance suite. Each criterion prints one pass/fail line;
//! the test fails if any criterion fails.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use geodesic_gaps::arithmetic_subgroups::{
    congruence_gap_scan, gamma_n_witness, quaternion_witness,
};
use geodesic_gaps::bouquet_liouville::{density_demo, liouville_construct, DigitReal};
use geodesic_gaps::metric_graph::{
    bouquet, convergence_probe, disk_grid, rational_gap_check, right_grid, theta_graph,
    trace_identity_residual, x_a, x_a_contraction_limit, x_a_deletion_limit, zeta_det,
    zeta_product, MetricGraph,
};
use geodesic_gaps::modular_spectrum::{
    count_geodesics, gap_decreasing_at, gap_exceeds_one, gap_minus_one_le_3_over_a2,
    subgroup_monotonicity_check,
};
use geodesic_gaps::quadratic_orders::count_units_below;

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Criterion 1: modular gaps — exact certificates up to trace 10⁴ in ≤ 10 s.
fn criterion_1() -> Result<(), String> {
    let start = Instant::now();
    for a in 3..=10_000i64 {
        if !gap_exceeds_one(a) {
            return Err(format!("gap at trace {a} does not exceed 1"));
        }
        if a >= 4 && !gap_decreasing_at(a) {
            return Err(format!("gaps not decreasing at trace {a}"));
        }
        if a >= 10 && !gap_minus_one_le_3_over_a2(a) {
            return Err(format!("quadratic envelope fails at trace {a}"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() > 10.0 {
        return Err(format!("runtime {elapsed:?} exceeds 10 s"));
    }
    Ok(())
}

/// Criterion 2: unit counting matches x − 2 within 3 at x ∈ {10², 10³, 10⁴}.
fn criterion_2() -> Result<(), String> {
    for x in [100i64, 1_000, 10_000] {
        let count = count_units_below(&rat(x, 1), false).map_err(|e| e.to_string())?;
        let expected = x - 2;
        let dev = (count as i64 - expected).abs();
        if dev > 3 {
            return Err(format!("x={x}: count {count}, expected {expected} ± 3"));
        }
    }
    Ok(())
}

/// Criterion 3: Γ(N) witnesses verify for N ∈ {2,3,4,5}, c = 1..100.
fn criterion_3() -> Result<(), String> {
    for n in 2..=5i64 {
        for c in 1..=100i64 {
            // gamma_n_witness internally re-verifies det, trace, congruence,
            // and divisibility, returning Err on any failure.
            let w = gamma_n_witness(n, c).map_err(|e| format!("N={n}, c={c}: {e}"))?;
            if w.det() != 1 || w.trace() != i128::from(w.a) {
                return Err(format!("N={n}, c={c}: bad matrix"));
            }
        }
    }
    Ok(())
}

/// Criterion 4: congruence progression gaps — N=2 in (16, 16.05) decreasing,
/// N=3 in (81, 81.01).
fn criterion_4() -> Result<(), String> {
    let scan2 = congruence_gap_scan(2, 50).map_err(|e| e.to_string())?;
    let mut prev = f64::INFINITY;
    for (i, g) in scan2.gaps.gaps.iter().enumerate() {
        let v = g.to_f64();
        if !(16.0 < v && v < 16.05) {
            return Err(format!("N=2 gap {i} = {v} outside (16, 16.05)"));
        }
        if v >= prev {
            return Err(format!("N=2 gaps not decreasing at index {i}"));
        }
        prev = v;
    }
    let scan3 = congruence_gap_scan(3, 50).map_err(|e| e.to_string())?;
    for (i, g) in scan3.gaps.gaps.iter().enumerate() {
        let v = g.to_f64();
        if !(81.0 < v && v < 81.01) {
            return Err(format!("N=3 gap {i} = {v} outside (81, 81.01)"));
        }
    }
    Ok(())
}

/// Criterion 5: quaternion ramification at odd primes; 2-adic discrepancy
/// flagged for S = {2,3}.
fn criterion_5() -> Result<(), String> {
    for c in (1..=50i64).filter(|c| c % 2 != 0 && c % 3 != 0 && c % 5 != 0) {
        let rep = quaternion_witness(&[3, 5], c).map_err(|e| format!("c={c}: {e}"))?;
        for f in &rep.per_prime {
            if !(f.ramified && f.paper_maximal && f.conductor_maximal) {
                return Err(format!("c={c}, p={}: odd ramification check failed", f.p));
            }
        }
    }
    let mut flagged = 0usize;
    for c in (1..=50i64).filter(|c| c % 2 != 0 && c % 3 != 0) {
        let rep = quaternion_witness(&[2, 3], c).map_err(|e| format!("c={c}: {e}"))?;
        let p2 = rep
            .per_prime
            .iter()
            .find(|f| f.p == 2)
            .ok_or("missing p=2 flags")?;
        if !p2.paper_maximal || !p2.conductor_maximal {
            flagged += 1;
        }
    }
    if flagged == 0 {
        return Err("2-adic discrepancy never flagged for S={2,3}".into());
    }
    Ok(())
}

/// Criterion 6: Ihara determinant identity on four graphs; Euler product vs
/// determinant; 2-bouquet closed form.
fn criterion_6() -> Result<(), String> {
    let one = rat(1, 1);
    let graphs: Vec<(&str, MetricGraph)> = vec![
        ("loop", bouquet(&[one.clone()])),
        ("2-bouquet", bouquet(&[one.clone(), one.clone()])),
        ("theta", theta_graph()),
        ("X_1", x_a(&one).map_err(|e| e.to_string())?),
    ];
    let samples = [
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(1.0, 1.0),
    ];
    for (name, mg) in &graphs {
        for &s in &samples {
            for n in 1..=10 {
                let r = trace_identity_residual(mg, s, n).map_err(|e| e.to_string())?;
                if r >= 1e-10 {
                    return Err(format!("{name}: trace residual {r:.3e} at s={s}, n={n}"));
                }
            }
        }
        let s = Complex64::new(4.0, 0.0);
        let gap = (zeta_product(mg, s, 14).map_err(|e| e.to_string())? - zeta_det(mg, s)).norm();
        if gap >= 1e-8 {
            return Err(format!("{name}: |product − det| = {gap:.3e} at Re s = 4"));
        }
    }
    let two = bouquet(&[one.clone(), one]);
    for i in 0..10 {
        let s = Complex64::new(1.0 + 0.3 * i as f64, 0.1 * i as f64);
        let u = (-s).exp();
        let closed = (1.0 - 3.0 * u) * (1.0 + u) * (1.0 - u) * (1.0 - u);
        let gap = (zeta_det(&two, s) - closed).norm();
        if gap >= 1e-12 {
            return Err(format!("2-bouquet closed form off by {gap:.3e} at s={s}"));
        }
    }
    Ok(())
}

/// Criterion 7: rational gap divergence on the unit theta graph to length 12.
fn criterion_7() -> Result<(), String> {
    let out = rational_gap_check(&theta_graph(), &rat(1, 1), &rat(12, 1))
        .map_err(|e| e.to_string())?;
    if !out.holds {
        return Err(format!("violation: {:?}", out.violation));
    }
    if out.rows.is_empty() {
        return Err("no gap rows checked".into());
    }
    Ok(())
}

/// Criterion 8: degeneration convergence — contraction residuals strictly
/// decrease; deletion residuals admit an exponential envelope.
fn criterion_8() -> Result<(), String> {
    let contract_family: Vec<(f64, MetricGraph)> = [rat(1, 10), rat(1, 100), rat(1, 1000)]
        .iter()
        .map(|a| Ok((a.to_f64().unwrap(), x_a(a)?)))
        .collect::<Result<_, geodesic_gaps::Error>>()
        .map_err(|e| e.to_string())?;
    let limit = x_a_contraction_limit().map_err(|e| e.to_string())?.metric_graph;
    let table = convergence_probe(&contract_family, &limit, &disk_grid())
        .map_err(|e| e.to_string())?;
    if !table.strictly_decreasing {
        return Err(format!("contraction maxima not decreasing: {:?}", table.max_per_member));
    }
    let delete_family: Vec<(f64, MetricGraph)> = [5i64, 10, 20]
        .iter()
        .map(|&a| Ok((a as f64, x_a(&rat(a, 1))?)))
        .collect::<Result<_, geodesic_gaps::Error>>()
        .map_err(|e| e.to_string())?;
    let limit = x_a_deletion_limit().map_err(|e| e.to_string())?.metric_graph;
    let table = convergence_probe(&delete_family, &limit, &right_grid())
        .map_err(|e| e.to_string())?;
    if !table.strictly_decreasing {
        return Err(format!("deletion maxima not decreasing: {:?}", table.max_per_member));
    }
    let k = table.envelope_constant(1.0);
    if !k.is_finite() || k <= 0.0 {
        return Err(format!("bad envelope constant K = {k}"));
    }
    for (a, r) in table.a_values.iter().zip(&table.max_per_member) {
        if *r > k * (-a).exp() * (1.0 + 1e-9) {
            return Err(format!("a={a}: residual {r:.3e} above K·e^-a with K={k:.3e}"));
        }
    }
    println!("  (deletion envelope constant K = {k:.6e})");
    Ok(())
}

/// Criterion 9: Liouville construction — 5 certified pairs, scales growing by
/// at least e, and the density demo lands within 0.1 of each target. ≤ 60 s.
fn criterion_9() -> Result<(), String> {
    let start = Instant::now();
    let seed = DigitReal::parse("0.3").map_err(|e| e.to_string())?;
    let c = rat(1, 1000);
    let (_, pairs) = liouville_construct(&seed, &c, 5).map_err(|e| e.to_string())?;
    if pairs.len() != 5 {
        return Err(format!("expected 5 certified pairs, got {}", pairs.len()));
    }
    for w in pairs.windows(2) {
        // scale exponents are integers; a step of ≥ 1 gives a factor ≥ e
        let step = &w[1].scale_exponent - &w[0].scale_exponent;
        if step < BigInt::from(1) {
            return Err(format!("scale exponent step {step} < 1"));
        }
    }
    for p in &pairs {
        if !(p.gap_lower > 0.0 && p.gap_upper < 1e-3) {
            return Err(format!(
                "pair gap [{:.3e}, {:.3e}] not certified below C",
                p.gap_lower, p.gap_upper
            ));
        }
    }
    let targets: Vec<BigRational> = (1..=9).map(|k| rat(k, 10)).collect();
    let demo = density_demo(&targets, &c, 5).map_err(|e| e.to_string())?;
    for ((_, dist), t) in demo.iter().zip(&targets) {
        if *dist >= 0.1 {
            return Err(format!("target {t}: distance bound {dist} ≥ 0.1"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() > 60.0 {
        return Err(format!("runtime {elapsed:?} exceeds 60 s"));
    }
    Ok(())
}

/// Criterion 10: prime geodesic theorem sanity at x = 500.
fn criterion_10() -> Result<(), String> {
    let (count, ratio) = count_geodesics(&rat(500, 1)).map_err(|e| e.to_string())?;
    if !(0.3..=3.0).contains(&ratio) {
        return Err(format!("ratio {ratio} outside [0.3, 3] (count {count})"));
    }
    Ok(())
}

/// Criterion 11: Γ(2)-progression min gap ≥ full-spectrum min gap (exact).
fn criterion_11() -> Result<(), String> {
    let full: Vec<i64> = (3..=1_000).collect();
    let sub: Vec<i64> = (1..=62).map(|c| 2 + 16 * c).filter(|a| *a <= 1_000).collect();
    if !subgroup_monotonicity_check(&sub, &full).map_err(|e| e.to_string())? {
        return Err("subsequence min gap below full-spectrum min gap".into());
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, fn() -> Result<(), String>)> = vec![
        ("1 modular gaps to trace 10^4", criterion_1),
        ("2 unit counting", criterion_2),
        ("3 congruence witnesses", criterion_3),
        ("4 congruence gap bands", criterion_4),
        ("5 quaternion ramification", criterion_5),
        ("6 Ihara determinant identity", criterion_6),
        ("7 rational gap divergence", criterion_7),
        ("8 degeneration convergence", criterion_8),
        ("9 Liouville construction", criterion_9),
        ("10 geodesic counting sanity", criterion_10),
        ("11 subgroup monotonicity", criterion_11),
    ];
    let mut failures = Vec::new();
    for (name, f) in criteria {
        match f() {
            Ok(()) => println!("criterion {name}: PASS"),
            Err(msg) => {
                println!("criterion {name}: FAIL — {msg}");
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
