//! The ascending norm sequence of the modular group: entries `ε(a) = (a+√(a²−4))/2`
//! for hyperbolic traces `a ≥ 3`, gap statistics, limit-gap estimates, and
//! Prime Geodesic Theorem counts.
//!
//! Gap certificates are exact: adjacent gaps exceed 1 and decrease strictly,
//! shown by integer arithmetic (squaring out the surds), never by floats.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::precision::{certify_digits, certify_sign, working_bits, Interval};
use crate::quadratic_orders::{
    class_number, factor_u64, trace_value_le, unit_from_trace, Discriminant, TraceUnit,
};

/// Digits certified in reported gap values.
pub const GAP_DIGITS: usize = 12;

/// One geodesic-norm value of the modular spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectrumEntry {
    pub trace: i64,
    pub b: i64,
    pub d0: Discriminant,
    /// Total number of proper form classes over all splits `a²−4 = b²D`.
    pub multiplicity: u64,
}

impl SpectrumEntry {
    pub fn value_interval(&self, bits: usize) -> Interval {
        TraceUnit { trace: self.trace, b: self.b, d0: self.d0 }.value_interval(bits)
    }
}

/// A value that can be evaluated to a certified enclosure at any precision.
pub trait CertifiedReal {
    fn eval(&self, bits: usize) -> Interval;
}

impl CertifiedReal for SpectrumEntry {
    fn eval(&self, bits: usize) -> Interval {
        self.value_interval(bits)
    }
}

impl CertifiedReal for TraceUnit {
    fn eval(&self, bits: usize) -> Interval {
        self.value_interval(bits)
    }
}

/// Adjacent differences of an ascending sequence with the running minimum.
#[derive(Clone, Debug)]
pub struct GapReport {
    /// Certified adjacent differences, `gaps[i] = x[i+1] − x[i]`.
    pub gaps: Vec<Interval>,
    /// Index `i` of the minimal gap (between entries `i` and `i+1`).
    pub argmin: usize,
}

impl GapReport {
    pub fn min_gap(&self) -> &Interval {
        &self.gaps[self.argmin]
    }

    /// Running minima are non-increasing by construction.
    pub fn running_min(&self) -> Vec<&Interval> {
        let mut out = Vec::with_capacity(self.gaps.len());
        let mut cur = 0usize;
        for (i, g) in self.gaps.iter().enumerate() {
            if g.hi().partial_cmp(self.gaps[cur].lo()) == Some(Ordering::Less) {
                cur = i;
            }
            out.push(&self.gaps[cur]);
        }
        out
    }
}

/// Certified gap scan over an ascending list of values.
pub fn gap_scan<T: CertifiedReal>(values: &[T]) -> Result<GapReport> {
    if values.len() < 2 {
        return Err(Error::Precondition("gap scan needs at least 2 entries".into()));
    }
    let bits0 = working_bits();
    let mut gaps = Vec::with_capacity(values.len() - 1);
    for w in values.windows(2) {
        let g = certify_digits(
            |bits| w[1].eval(bits).sub(&w[0].eval(bits)),
            GAP_DIGITS,
            bits0,
        )?;
        if !g.lo().is_positive() {
            return Err(Error::Precondition("sequence is not strictly ascending".into()));
        }
        gaps.push(g);
    }
    let argmin = argmin_intervals(&gaps)?;
    Ok(GapReport { gaps, argmin })
}

fn argmin_intervals(gaps: &[Interval]) -> Result<usize> {
    let mut best = 0usize;
    for i in 1..gaps.len() {
        match gaps[i].cmp_certified(&gaps[best]) {
            Some(Ordering::Less) => best = i,
            Some(_) => {}
            None => {
                // ambiguous at stored precision; keep the earlier index only if
                // its upper bound does not exceed the candidate's
                if gaps[i].hi().partial_cmp(gaps[best].hi()) == Some(Ordering::Less) {
                    best = i;
                }
            }
        }
    }
    Ok(best)
}

/// Spectrum entries for `a = 3..=trace_max`, ascending, with class-number
/// multiplicities.
pub fn spectrum(trace_max: i64) -> Result<Vec<SpectrumEntry>> {
    if trace_max < 3 {
        return Err(Error::Precondition(format!(
            "trace_max = {trace_max} < 3: no hyperbolic traces"
        )));
    }
    let mut h_cache: HashMap<i64, u64> = HashMap::new();
    (3..=trace_max)
        .map(|a| {
            let tu = unit_from_trace(a)?;
            let multiplicity = multiplicity_of_trace(a, &mut h_cache)?;
            Ok(SpectrumEntry { trace: a, b: tu.b, d0: tu.d0, multiplicity })
        })
        .collect()
}

/// Sum of `h(D)` over all splits `a²−4 = b²·D` with `D` a valid discriminant.
pub fn multiplicity_of_trace(a: i64, h_cache: &mut HashMap<i64, u64>) -> Result<u64> {
    if a < 3 {
        return Err(Error::Precondition("trace below 3".into()));
    }
    let n = a * a - 4;
    // merged factorization of (a−2)(a+2)
    let mut factors = factor_u64((a - 2) as u64);
    for (p, e) in factor_u64((a + 2) as u64) {
        match factors.iter_mut().find(|(q, _)| *q == p) {
            Some((_, e0)) => *e0 += e,
            None => factors.push((p, e)),
        }
    }
    let mut squares = vec![1u64];
    for &(p, e) in &factors {
        let mut next = Vec::new();
        for &s in &squares {
            let mut pk = 1u64;
            for _ in 0..=(e / 2) {
                next.push(s * pk);
                pk *= p;
            }
        }
        squares = next;
    }
    let mut total = 0u64;
    for b in squares {
        let d = n / (b * b) as i64;
        if let Ok(disc) = Discriminant::new(d) {
            let h = *h_cache.entry(d).or_insert_with(|| class_number(disc));
            total += h;
        }
    }
    Ok(total)
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Exact test `√x > c + √y` for nonnegative integers `x, y` and integer `c`.
pub fn sqrt_gt_int_plus_sqrt(x: &BigInt, c: &BigInt, y: &BigInt) -> bool {
    // rhs may be negative only through c
    if c.is_negative() {
        // √x − √y vs c < 0: true unless √y − √x ≥ |c|
        let t = -c;
        return !sqrt_gt_int_plus_sqrt_nonneg(y, &t, x, true);
    }
    sqrt_gt_int_plus_sqrt_nonneg(x, c, y, false)
}

// √x > c + √y with c ≥ 0; `or_equal` turns the test into ≥.
fn sqrt_gt_int_plus_sqrt_nonneg(x: &BigInt, c: &BigInt, y: &BigInt, or_equal: bool) -> bool {
    // square once: x vs c² + y + 2c√y  ⇔  x − c² − y vs 2c√y
    let lhs = x - c * c - y;
    if lhs.is_negative() {
        return false;
    }
    let l2 = &lhs * &lhs;
    let r2 = BigInt::from(4) * c * c * y;
    if or_equal {
        l2 >= r2
    } else {
        l2 > r2
    }
}

/// Exact test `√v + √y < 2√w` (all arguments nonnegative).
pub fn sum_sqrt_lt_twice_sqrt(v: &BigInt, y: &BigInt, w: &BigInt) -> bool {
    // square: v + y + 2√(vy) < 4w  ⇔  2√(vy) < 4w − v − y
    let rhs = BigInt::from(4) * w - v - y;
    if !rhs.is_positive() {
        return false;
    }
    BigInt::from(4) * v * y < &rhs * &rhs
}

/// Exact test `A(√w − √y) ≤ B` with `w ≥ y ≥ 0`, `A, B ≥ 0`.
pub fn scaled_sqrt_diff_le(a: &BigInt, w: &BigInt, y: &BigInt, b: &BigInt) -> bool {
    // (A√w − A√y)² = A²(w+y) − 2A²√(wy) ≤ B²  ⇔  A²(w+y) − B² ≤ 2A²√(wy)
    let lhs = a * a * (w + y) - b * b;
    if !lhs.is_positive() {
        return true;
    }
    &lhs * &lhs <= BigInt::from(4) * a * a * a * a * w * y
}

fn rad(a: i64) -> BigInt {
    big(a) * big(a) - big(4)
}

/// Exact: `ε(a+1) − ε(a) > 1`.
pub fn gap_exceeds_one(a: i64) -> bool {
    // (1 + √((a+1)²−4) − √(a²−4))/2 > 1  ⇔  √((a+1)²−4) > 1 + √(a²−4)
    sqrt_gt_int_plus_sqrt(&rad(a + 1), &BigInt::from(1), &rad(a))
}

/// Exact: `gap(a+1) < gap(a)` (gaps strictly decreasing in the trace).
pub fn gap_decreasing_at(a: i64) -> bool {
    // √((a+2)²−4) + √(a²−4) < 2√((a+1)²−4)
    sum_sqrt_lt_twice_sqrt(&rad(a + 2), &rad(a), &rad(a + 1))
}

/// Exact: `gap(a) − 1 ≤ 3/a²`.
pub fn gap_minus_one_le_3_over_a2(a: i64) -> bool {
    // (√w − √y − 1)/2 ≤ 3/a²  ⇔  a²(√w − √y) ≤ a² + 6
    let a2 = big(a) * big(a);
    let bound = &a2 + big(6);
    scaled_sqrt_diff_le(&a2, &rad(a + 1), &rad(a), &bound)
}

/// Trend certificate accompanying a limit-gap window minimum.
#[derive(Clone, Copy, Debug)]
pub struct TrendCertificate {
    /// Every adjacent gap in the window exceeds 1 (exact).
    pub all_gaps_exceed_one: bool,
    /// Gaps strictly decrease with the trace (exact).
    pub strictly_decreasing: bool,
    /// `gap(a) − 1 ≤ 3/a²` for every `a ≥ 10` in the window (exact).
    pub quadratic_envelope: bool,
}

/// Window minimum of the adjacent gaps for traces `3..=trace_max`, with the
/// monotone-trend certificate. The minimum is the last gap whenever the
/// decreasing certificate holds.
pub fn limit_gap_estimate(trace_max: i64) -> Result<(Interval, TrendCertificate)> {
    if trace_max < 4 {
        return Err(Error::Precondition("limit_gap_estimate needs trace_max ≥ 4".into()));
    }
    let mut cert = TrendCertificate {
        all_gaps_exceed_one: true,
        strictly_decreasing: true,
        quadratic_envelope: true,
    };
    for a in 3..trace_max {
        if !gap_exceeds_one(a) {
            cert.all_gaps_exceed_one = false;
        }
        if a + 1 < trace_max && !gap_decreasing_at(a) {
            cert.strictly_decreasing = false;
        }
        if a >= 10 && !gap_minus_one_le_3_over_a2(a) {
            cert.quadratic_envelope = false;
        }
    }
    let min_a = if cert.strictly_decreasing { trace_max - 1 } else {
        // fall back to an interval argmin over the whole window
        let entries: Vec<TraceUnit> = (3..=trace_max)
            .map(unit_from_trace)
            .collect::<Result<_>>()?;
        let report = gap_scan(&entries)?;
        report.argmin as i64 + 3
    };
    let lo = unit_from_trace(min_a)?;
    let hi = unit_from_trace(min_a + 1)?;
    let min_gap = certify_digits(
        |bits| hi.value_interval(bits).sub(&lo.value_interval(bits)),
        GAP_DIGITS,
        working_bits(),
    )?;
    Ok((min_gap, cert))
}

/// Geodesic count with multiplicity and the Prime Geodesic Theorem ratio
/// `v(x) / (x²/log x²)`.
pub fn count_geodesics(x: &BigRational) -> Result<(u64, f64)> {
    if x <= &BigRational::from(BigInt::from(1)) {
        return Err(Error::Precondition("count_geodesics requires x > 1".into()));
    }
    let mut h_cache: HashMap<i64, u64> = HashMap::new();
    let mut count = 0u64;
    let mut a = 3i64;
    while trace_value_le(a, x) {
        count += multiplicity_of_trace(a, &mut h_cache)?;
        a += 1;
    }
    let xf = x.to_f64().ok_or_else(|| Error::Parse("x out of f64 range".into()))?;
    let pgt = xf * xf / (xf * xf).ln();
    Ok((count, count as f64 / pgt))
}

/// Certified min-gap comparison: minimum adjacent gap of `sub` is at least that
/// of `full`, restricted to the common trace range. `sub` must be a
/// subsequence of `full`.
pub fn subgroup_monotonicity_check(sub: &[i64], full: &[i64]) -> Result<bool> {
    if sub.len() < 2 || full.len() < 2 {
        return Err(Error::Precondition("sequences need at least 2 entries".into()));
    }
    let mut it = full.iter();
    for s in sub {
        if !it.any(|f| f == s) {
            return Err(Error::Precondition(format!(
                "trace {s} of the subsequence does not appear in the full sequence in order"
            )));
        }
    }
    let (lo, hi) = (sub[0], *sub.last().unwrap());
    let clipped: Vec<i64> = full.iter().copied().filter(|&a| a >= lo && a <= hi).collect();
    if clipped.len() < 2 {
        return Err(Error::Precondition("common range holds fewer than 2 entries".into()));
    }
    let sub_min = argmin_gap_pair(sub)?;
    let full_min = argmin_gap_pair(&clipped)?;
    if sub_min == full_min {
        return Ok(true);
    }
    let sign = certify_sign(
        |bits| gap_of_pair(sub_min, bits).sub(&gap_of_pair(full_min, bits)),
        working_bits(),
    )?;
    Ok(sign != Ordering::Less)
}

fn gap_of_pair(pair: (i64, i64), bits: usize) -> Interval {
    let lo = unit_from_trace(pair.0).expect("valid trace");
    let hi = unit_from_trace(pair.1).expect("valid trace");
    hi.value_interval(bits).sub(&lo.value_interval(bits))
}

fn argmin_gap_pair(traces: &[i64]) -> Result<(i64, i64)> {
    let mut best = (traces[0], traces[1]);
    for w in traces.windows(2) {
        let cand = (w[0], w[1]);
        if cand == best {
            continue;
        }
        let sign = certify_sign(
            |bits| gap_of_pair(cand, bits).sub(&gap_of_pair(best, bits)),
            working_bits(),
        )?;
        if sign == Ordering::Less {
            best = cand;
        }
    }
    Ok(best)
}
