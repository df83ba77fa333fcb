//! Shared sequence plumbing: strictly ascending value sequences with
//! provenance, exact-dedup merging, and the liminf-proxy gap report.
//!
//! Values are kept symbolic ([`ValueKey`]) so equality is decided exactly:
//! two keys denote the same real iff they are the same key. Cross-kind
//! collisions cannot occur — quadratic units are algebraic irrationals while
//! `e^l` (l rational ≠ 0) is transcendental.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::precision::{bf_to_f64, working_bits, Interval, MAX_BITS};
use crate::quadratic_orders::unit_from_trace;

/// Where a sequence value came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Modular/congruence spectrum entry with this trace.
    Trace(i64),
    /// Closed geodesic of a metric graph, by canonical word.
    Word(String),
    /// Bouquet geodesic class (m, n).
    Pair(u64, u64),
    /// Free-form tag.
    Label(String),
}

/// Exact description of a sequence value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueKey {
    /// `ε(a) = (a + √(a²−4))/2`.
    Unit { trace: i64 },
    /// `e^l` for exact rational `l > 0`.
    ExpRational(BigRational),
    /// An exact rational.
    Rational(BigRational),
}

impl ValueKey {
    pub fn eval(&self, bits: usize) -> Interval {
        match self {
            ValueKey::Unit { trace } => unit_from_trace(*trace)
                .expect("validated trace")
                .value_interval(bits),
            ValueKey::ExpRational(l) => Interval::from_ratio(l, bits).exp(),
            ValueKey::Rational(r) => Interval::from_ratio(r, bits),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ValueKey::Unit { trace } => unit_from_trace(*trace).map(|_| ()),
            ValueKey::ExpRational(l) if l.is_zero() => Err(Error::Precondition(
                "e^0 = 1 is excluded; use a rational key instead".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Exact comparison of two value keys, escalating precision for distinct keys.
pub fn cmp_keys(a: &ValueKey, b: &ValueKey) -> Result<Ordering> {
    if a == b {
        return Ok(Ordering::Equal);
    }
    let mut bits = working_bits();
    loop {
        if let Some(ord) = a.eval(bits).cmp_certified(&b.eval(bits)) {
            return Ok(ord);
        }
        bits *= 2;
        if bits > MAX_BITS {
            return Err(Error::Certification(format!(
                "could not separate {a:?} and {b:?} below {MAX_BITS} bits"
            )));
        }
    }
}

/// One sequence entry; merges concatenate provenance on exact collisions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub key: ValueKey,
    pub provenance: Vec<Provenance>,
}

/// Strictly increasing sequence of exact values.
#[derive(Clone, Debug, Default)]
pub struct AscendingSequence {
    entries: Vec<Entry>,
}

impl AscendingSequence {
    pub fn new(items: Vec<(ValueKey, Provenance)>) -> Result<Self> {
        for (k, _) in &items {
            k.validate()?;
        }
        for w in items.windows(2) {
            if cmp_keys(&w[0].0, &w[1].0)? != Ordering::Less {
                return Err(Error::Precondition(
                    "input sequence is not strictly ascending".into(),
                ));
            }
        }
        Ok(AscendingSequence {
            entries: items
                .into_iter()
                .map(|(key, p)| Entry { key, provenance: vec![p] })
                .collect(),
        })
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Sorted union with exact-comparison dedup; provenance lists concatenate on
/// collision. Associative and commutative up to provenance order.
pub fn merge(seqs: &[AscendingSequence]) -> Result<AscendingSequence> {
    let mut out: Vec<Entry> = Vec::new();
    for seq in seqs {
        let mut merged = Vec::with_capacity(out.len() + seq.entries.len());
        let (mut i, mut j) = (0usize, 0usize);
        while i < out.len() && j < seq.entries.len() {
            match cmp_keys(&out[i].key, &seq.entries[j].key)? {
                Ordering::Less => {
                    merged.push(out[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    merged.push(seq.entries[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let mut e = out[i].clone();
                    e.provenance.extend(seq.entries[j].provenance.iter().cloned());
                    merged.push(e);
                    i += 1;
                    j += 1;
                }
            }
        }
        merged.extend_from_slice(&out[i..]);
        merged.extend_from_slice(&seq.entries[j..]);
        out = merged;
    }
    Ok(AscendingSequence { entries: out })
}

/// Desk-scale liminf verdict; no claim about the true limit is ever made.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Tail-window minimum inside the configured `[epsilon, max]` band.
    Bounded,
    /// Window minima grow past the divergence factor.
    Diverging,
    Inconclusive,
}

/// Band for the bounded-gaps verdict: `0 < LG < ∞` at desk scale means the
/// tail minimum lies in `[epsilon, max]`.
#[derive(Clone, Copy, Debug)]
pub struct LimitGapConfig {
    pub epsilon: f64,
    pub max: f64,
    /// Tail min must exceed the global min by this factor to call divergence.
    pub divergence_factor: f64,
}

impl Default for LimitGapConfig {
    fn default() -> Self {
        LimitGapConfig { epsilon: 1e-9, max: 1e9, divergence_factor: std::f64::consts::E }
    }
}

/// Gap statistics of an ascending sequence: global minimum, per-window
/// minima, monotone-trend flag, and the bounded-gaps verdict.
#[derive(Clone, Debug)]
pub struct LimitGapReport {
    /// Certified enclosures of all adjacent gaps.
    pub gaps: Vec<Interval>,
    pub global_min: f64,
    pub global_min_index: usize,
    pub window_minima: Vec<f64>,
    /// Window minima never increase along the sequence.
    pub trend_nonincreasing: bool,
    pub verdict: Verdict,
}

pub fn limit_gap_report(
    seq: &AscendingSequence,
    tail_windows: usize,
    config: &LimitGapConfig,
) -> Result<LimitGapReport> {
    if seq.len() < 3 {
        return Err(Error::Precondition("need at least 3 elements".into()));
    }
    if tail_windows < 1 {
        return Err(Error::Precondition("need at least one window".into()));
    }
    let bits = working_bits();
    let gaps: Vec<Interval> = seq
        .entries
        .windows(2)
        .map(|w| {
            crate::precision::certify_digits(
                |b| w[1].key.eval(b).sub(&w[0].key.eval(b)),
                12,
                bits,
            )
        })
        .collect::<Result<_>>()?;
    let mids: Vec<f64> = gaps.iter().map(|g| g.to_f64()).collect();
    let (global_min_index, _) = mids
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let global_min = bf_to_f64(gaps[global_min_index].lo());
    let windows = tail_windows.min(gaps.len());
    let base = gaps.len() / windows;
    let rem = gaps.len() % windows;
    let mut window_minima = Vec::with_capacity(windows);
    let mut idx = 0usize;
    for w in 0..windows {
        let size = base + usize::from(w < rem);
        let slice = &mids[idx..idx + size];
        window_minima.push(slice.iter().copied().fold(f64::INFINITY, f64::min));
        idx += size;
    }
    let trend_nonincreasing = window_minima.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let tail_min = *window_minima.last().unwrap();
    let verdict = if tail_min > mids[global_min_index] * config.divergence_factor
        && window_minima.windows(2).all(|w| w[1] >= w[0])
    {
        Verdict::Diverging
    } else if tail_min >= config.epsilon && tail_min <= config.max {
        Verdict::Bounded
    } else {
        Verdict::Inconclusive
    };
    Ok(LimitGapReport {
        gaps,
        global_min,
        global_min_index,
        window_minima,
        trend_nonincreasing,
        verdict,
    })
}
