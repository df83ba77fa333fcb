//! Witness constructions inside arithmetic subgroups: explicit Γ(N) matrices
//! along the progression `a = 2 + cN⁴`, and ramification/maximality reports
//! for quaternion-unit lattices along `a = 2 + 4cR`.
//!
//! Every witness matrix is re-verified (determinant, trace, congruence,
//! divisibilities) before it is returned; a failure there is a bug, not an
//! input error.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modular_spectrum::{gap_scan, GapReport};
use crate::quadratic_orders::{decompose_trace, factor_u64, unit_from_trace, TraceUnit};

/// Largest admissible trace: `a² − 4` must stay inside `i64`.
const MAX_TRACE: i64 = 3_000_000_000;

/// An explicit hyperbolic element of Γ(N) with trace `a = 2 + cN⁴`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessMatrix {
    pub n: i64,
    pub c: i64,
    pub a: i64,
    pub b: i64,
    pub d: i64,
    /// Row-major entries `[[(a+bD)/2, bD(1−D)/4], [b, (a−bD)/2]]`.
    pub entries: [[i128; 2]; 2],
}

impl WitnessMatrix {
    pub fn det(&self) -> i128 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> i128 {
        self.entries[0][0] + self.entries[1][1]
    }
}

/// Builds the Γ(N) witness with trace `a = 2 + cN⁴` and verifies the theorem's
/// claims on it exactly.
pub fn gamma_n_witness(n: i64, c: i64) -> Result<WitnessMatrix> {
    if n < 2 {
        return Err(Error::Precondition(format!("level N = {n} must be ≥ 2")));
    }
    if c < 1 {
        return Err(Error::Precondition(format!(
            "c = {c} must be ≥ 1 (a = 2 is parabolic)"
        )));
    }
    let n4 = n
        .checked_pow(4)
        .and_then(|n4| n4.checked_mul(c))
        .ok_or_else(|| Error::Precondition("cN⁴ overflows".into()))?;
    let a = 2 + n4;
    if a > MAX_TRACE {
        return Err(Error::Precondition(format!("trace {a} exceeds supported range")));
    }
    let (b, d0) = decompose_trace(a)?;
    let d = d0.value();
    let (ai, bi, di) = (a as i128, b as i128, d as i128);
    let m = [
        [(ai + bi * di) / 2, bi * di * (1 - di) / 4],
        [bi, (ai - bi * di) / 2],
    ];
    let w = WitnessMatrix { n, c, a, b, d, entries: m };
    // built-in theorem checks; any failure is a bug in the construction
    if w.det() != 1 {
        return Err(Error::Internal(format!("witness determinant {} ≠ 1", w.det())));
    }
    if w.trace() != ai {
        return Err(Error::Internal("witness trace mismatch".into()));
    }
    if b % n != 0 {
        return Err(Error::Internal(format!("N = {n} does not divide b = {b}")));
    }
    let ni = n as i128;
    if m[0][1] % ni != 0 || m[1][0] % ni != 0 {
        return Err(Error::Internal("off-diagonal entries not divisible by N".into()));
    }
    if !gamma_n_membership(&m, n)? {
        return Err(Error::Internal("witness not ≡ ±I mod N".into()));
    }
    Ok(w)
}

/// Γ(N) membership in PSL₂: `M ≡ +I or −I (mod N)`.
pub fn gamma_n_membership(m: &[[i128; 2]; 2], n: i64) -> Result<bool> {
    if n < 2 {
        return Err(Error::Precondition(format!("level N = {n} must be ≥ 2")));
    }
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det != 1 {
        return Err(Error::Precondition(format!("matrix determinant {det} ≠ 1")));
    }
    let ni = n as i128;
    let r = |x: i128| x.rem_euclid(ni);
    let is = |diag: i128| {
        r(m[0][0]) == r(diag) && r(m[1][1]) == r(diag) && r(m[0][1]) == 0 && r(m[1][0]) == 0
    };
    Ok(is(1) || is(-1))
}

/// A trace progression together with the gap report of its norm values.
#[derive(Clone, Debug)]
pub struct ProgressionScan {
    pub traces: Vec<i64>,
    pub units: Vec<TraceUnit>,
    pub gaps: GapReport,
}

fn scan_traces(traces: Vec<i64>) -> Result<ProgressionScan> {
    let units: Vec<TraceUnit> = traces
        .iter()
        .map(|&a| unit_from_trace(a))
        .collect::<Result<_>>()?;
    let gaps = gap_scan(&units)?;
    Ok(ProgressionScan { traces, units, gaps })
}

/// Gap scan of `{ε(2 + cN⁴) : 1 ≤ c ≤ c_max}`; gaps tend to `N⁴` from above.
pub fn congruence_gap_scan(n: i64, c_max: i64) -> Result<ProgressionScan> {
    if n < 2 {
        return Err(Error::Precondition(format!("level N = {n} must be ≥ 2")));
    }
    if c_max < 2 {
        return Err(Error::Precondition(format!("c_max = {c_max} must be ≥ 2")));
    }
    let n4 = n
        .checked_pow(4)
        .ok_or_else(|| Error::Precondition("N⁴ overflows".into()))?;
    let traces: Vec<i64> = (1..=c_max)
        .map(|c| {
            n4.checked_mul(c)
                .map(|t| t + 2)
                .filter(|&a| a <= MAX_TRACE)
                .ok_or_else(|| Error::Precondition("trace exceeds supported range".into()))
        })
        .collect::<Result<_>>()?;
    scan_traces(traces)
}

/// Per-prime ramification and maximality flags of a quaternion witness.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub struct PrimeFlags {
    pub p: i64,
    /// `p` divides disc(K), i.e. `p` ramifies in `K = ℚ(√D)`.
    pub ramified: bool,
    /// The criterion used in the source argument: `p | disc ∧ p² ∤ disc`.
    pub paper_maximal: bool,
    /// Conductor criterion: `p ∤ f` where `D = f²·disc`.
    pub conductor_maximal: bool,
}

/// Arithmetic of one quaternion-lattice trace witness `a = 2 + 4cR`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub struct QuaternionReport {
    pub s: Vec<i64>,
    /// Radical: product of the primes in `s`.
    pub r: i64,
    pub c: i64,
    pub a: i64,
    /// `D = a² − 4 = 16cR(1 + cR)`.
    pub d: i64,
    /// Square-free part of `D`.
    pub delta: i64,
    /// Field discriminant: `Δ` if `Δ ≡ 1 mod 4`, else `4Δ`.
    pub disc: i64,
    /// Conductor `f` with `D = f²·disc`.
    pub conductor: i64,
    pub per_prime: Vec<PrimeFlags>,
}

fn is_prime(p: i64) -> bool {
    p >= 2 && factor_u64(p as u64) == vec![(p as u64, 1)]
}

fn validate_s(s: &[i64]) -> Result<i64> {
    if s.len() < 2 {
        return Err(Error::Precondition(format!(
            "S must have at least two elements, got {}",
            s.len()
        )));
    }
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != s.len() {
        return Err(Error::Precondition("S contains repeated primes".into()));
    }
    let mut r = 1i64;
    for &p in &sorted {
        if !is_prime(p) {
            return Err(Error::Precondition(format!("{p} ∈ S is not prime")));
        }
        r = r
            .checked_mul(p)
            .ok_or_else(|| Error::Precondition("radical overflows".into()))?;
    }
    Ok(r)
}

/// Builds the quaternion report for `a = 2 + 4cR` and checks the ramification
/// claims for the odd primes of `S`.
pub fn quaternion_witness(s: &[i64], c: i64) -> Result<QuaternionReport> {
    let r = validate_s(s)?;
    if c < 1 {
        return Err(Error::Precondition(format!("c = {c} must be ≥ 1")));
    }
    if c.gcd(&(2 * r)) != 1 {
        return Err(Error::Precondition(format!("c = {c} is not coprime to 2R = {}", 2 * r)));
    }
    let a = (4 * c)
        .checked_mul(r)
        .map(|t| t + 2)
        .filter(|&a| a <= MAX_TRACE)
        .ok_or_else(|| Error::Precondition("trace exceeds supported range".into()))?;
    let d = a * a - 4;
    debug_assert_eq!(d, 16 * c * r * (1 + c * r));
    let (f, d0) = decompose_trace(a)?;
    let disc = d0.value();
    let delta = if disc % 4 == 0 { disc / 4 } else { disc };
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    let per_prime: Vec<PrimeFlags> = sorted
        .iter()
        .map(|&p| PrimeFlags {
            p,
            ramified: disc % p == 0,
            paper_maximal: disc % p == 0 && (disc / p) % p != 0,
            conductor_maximal: f % p != 0,
        })
        .collect();
    for flags in per_prime.iter().filter(|fl| fl.p % 2 == 1) {
        if !flags.ramified || !flags.paper_maximal {
            return Err(Error::Internal(format!(
                "odd prime {} fails the ramification claim (disc = {disc})",
                flags.p
            )));
        }
    }
    Ok(QuaternionReport {
        s: sorted,
        r,
        c,
        a,
        d,
        delta,
        disc,
        conductor: f,
        per_prime,
    })
}

/// Gap scan of `{ε(2 + 4cR) : gcd(c, 2R) = 1, 1 ≤ c ≤ c_max}`.
pub fn quaternion_gap_scan(s: &[i64], c_max: i64) -> Result<ProgressionScan> {
    let r = validate_s(s)?;
    let admissible: Vec<i64> = (1..=c_max).filter(|c| c.gcd(&(2 * r)) == 1).collect();
    if admissible.len() < 2 {
        return Err(Error::Precondition(format!(
            "fewer than two admissible c values up to {c_max}"
        )));
    }
    let traces: Vec<i64> = admissible
        .iter()
        .map(|&c| {
            (4 * c)
                .checked_mul(r)
                .map(|t| t + 2)
                .filter(|&a| a <= MAX_TRACE)
                .ok_or_else(|| Error::Precondition("trace exceeds supported range".into()))
        })
        .collect::<Result<_>>()?;
    scan_traces(traces)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_examples() {
        let w = gamma_n_witness(2, 1).unwrap();
        assert_eq!((w.a, w.b, w.d), (18, 8, 5));
        assert_eq!(w.entries, [[29, -40], [8, -11]]);
        assert_eq!(w.det(), 1);

        let w = gamma_n_witness(3, 1).unwrap();
        assert_eq!((w.a, w.b, w.d), (83, 9, 85));
        assert_eq!(w.entries, [[424, -16065], [9, -341]]);
        assert_eq!(w.det(), 1);

        assert!(gamma_n_witness(2, 0).is_err());
        assert!(gamma_n_witness(1, 1).is_err());
    }

    #[test]
    fn witness_divisibilities_sweep() {
        for n in 2..=7i64 {
            for c in 1..=12i64 {
                let w = gamma_n_witness(n, c).unwrap();
                assert_eq!(w.det(), 1, "N={n} c={c}");
                assert_eq!(w.trace(), w.a as i128);
                assert_eq!(w.b % n, 0);
                assert_eq!(w.entries[0][1] % n as i128, 0);
                assert_eq!(w.entries[1][0] % n as i128, 0);
                assert!(gamma_n_membership(&w.entries, n).unwrap());
                // witness trace decomposes onto the same (b, D) as the unit map
                let tu = unit_from_trace(w.a).unwrap();
                assert_eq!((tu.b, tu.d0.value()), (w.b, w.d));
            }
        }
    }

    #[test]
    fn membership_examples() {
        assert!(gamma_n_membership(&[[29, -40], [8, -11]], 2).unwrap());
        assert!(gamma_n_membership(&[[1, 0], [0, 1]], 5).unwrap());
        assert!(!gamma_n_membership(&[[1, 1], [0, 1]], 2).unwrap());
        // −I mod N accepted (PSL₂ convention)
        assert!(gamma_n_membership(&[[-1, 0], [0, -1]], 3).unwrap());
        assert!(gamma_n_membership(&[[2, 3], [3, 5]], 3).unwrap());
        assert!(gamma_n_membership(&[[2, 0], [0, 2]], 3).is_err()); // det 4
    }

    #[test]
    fn congruence_scan_examples() {
        let scan = congruence_gap_scan(2, 2).unwrap();
        assert_eq!(scan.traces, vec![18, 34]);
        assert!((scan.gaps.gaps[0].to_f64() - 16.0262).abs() < 1e-3);

        let scan = congruence_gap_scan(2, 50).unwrap();
        for (i, g) in scan.gaps.gaps.iter().enumerate() {
            let v = g.to_f64();
            assert!(v > 16.0 && v < 16.03, "gap {i} = {v}");
            if i > 0 {
                assert!(v < scan.gaps.gaps[i - 1].to_f64(), "gaps must decrease");
            }
        }

        assert!(congruence_gap_scan(1, 10).is_err());
        assert!(congruence_gap_scan(2, 1).is_err());
    }

    #[test]
    fn quaternion_witness_examples() {
        let rep = quaternion_witness(&[3, 5], 1).unwrap();
        assert_eq!((rep.r, rep.a, rep.d), (15, 62, 3840));
        assert_eq!((rep.delta, rep.disc, rep.conductor), (15, 60, 8));
        for fl in &rep.per_prime {
            assert!(fl.ramified && fl.paper_maximal && fl.conductor_maximal);
        }

        let rep = quaternion_witness(&[2, 3], 1).unwrap();
        assert_eq!((rep.r, rep.a, rep.d), (6, 26, 672));
        assert_eq!((rep.delta, rep.disc, rep.conductor), (42, 168, 2));
        let p2 = rep.per_prime.iter().find(|f| f.p == 2).unwrap();
        assert!(p2.ramified);
        // the flagged p=2 discrepancy: 4 | 168 and the conductor is even
        assert!(!p2.paper_maximal && !p2.conductor_maximal);
        let p3 = rep.per_prime.iter().find(|f| f.p == 3).unwrap();
        assert!(p3.ramified && p3.paper_maximal && p3.conductor_maximal);

        assert!(quaternion_witness(&[7], 1).is_err());
        assert!(quaternion_witness(&[3, 5], 3).is_err()); // gcd(3, 30) ≠ 1
        assert!(quaternion_witness(&[3, 5], 2).is_err()); // even c
        assert!(quaternion_witness(&[4, 5], 1).is_err()); // non-prime
    }

    #[test]
    fn quaternion_report_serializes_camel_case() {
        let rep = quaternion_witness(&[3, 5], 1).unwrap();
        let js = serde_json::to_value(&rep).unwrap();
        assert_eq!(js["disc"], 60);
        assert!(js["perPrime"][0]["paperMaximal"].as_bool().unwrap());
        assert!(js["perPrime"][0]["conductorMaximal"].as_bool().unwrap());
    }

    #[test]
    fn quaternion_scan_examples() {
        // admissible c for R=15: 1, 7, 11, 13, ...
        let scan = quaternion_gap_scan(&[3, 5], 7).unwrap();
        assert_eq!(scan.traces, vec![62, 422]);
        assert!((scan.gaps.gaps[0].to_f64() - 360.0).abs() < 0.1);

        let scan = quaternion_gap_scan(&[3, 5], 13).unwrap();
        assert_eq!(scan.traces, vec![62, 422, 662, 782]);
        // consecutive coprime c with Δc = 2 → gap ≈ 4·2·R = 120
        assert!((scan.gaps.gaps[2].to_f64() - 120.0).abs() < 0.1);

        assert!(quaternion_gap_scan(&[3, 5], 1).is_err());
    }
}
