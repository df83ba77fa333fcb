//! The two-loop bouquet Y_a with loop lengths `a` and `1`: geodesic lengths
//! `am + n`, minimal-gap scans, and the digit-stream construction of
//! parameters `a` whose norm sequence has certified arbitrarily small gaps.
//!
//! Every certificate is sound against the *unknown tail* of the digit stream:
//! a prefix of `d` digits pins `a` inside `[prefix, prefix + 10^{−d}]`, and
//! all comparisons are interval-certified over that range. The proof's
//! linearization `e^x − 1 ≈ x` is replaced by the exact two-sided evaluation
//! of `e^x − 1` in interval arithmetic.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::precision::{bf_to_f64, working_bits, Interval, MAX_BITS};

/// Hard ceiling on the digits a construction may emit.
pub const DIGIT_BUDGET: usize = 1_000_000;

/// A number in (0,1) given by a finite, extendable decimal digit prefix.
/// The represented real lies in `[prefix, prefix + 10^{−d}]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitReal {
    digits: Vec<u8>,
}

impl DigitReal {
    pub fn from_digits(digits: Vec<u8>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::Parse("digit stream needs at least one digit".into()));
        }
        if digits.iter().any(|&d| d > 9) {
            return Err(Error::Parse("digits must be 0..9".into()));
        }
        if digits.iter().all(|&d| d == 0) {
            return Err(Error::Parse("digit stream must represent a number in (0,1)".into()));
        }
        Ok(DigitReal { digits })
    }

    /// Parses `"0.3"`, `".304"`, or a bare digit string `"304"`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix("0.").or_else(|| t.strip_prefix('.')).unwrap_or(t);
        let digits: Vec<u8> = t
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in {s:?}")))
            })
            .collect::<Result<_>>()?;
        Self::from_digits(digits)
    }

    pub fn digit_count(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// Exact value of the prefix: `p / 10^d`.
    pub fn prefix_value(&self) -> BigRational {
        BigRational::new(self.prefix_numerator(), pow10_big(self.digits.len()))
    }

    /// The prefix digits as an integer `p` (so the prefix is `p/10^d`).
    pub fn prefix_numerator(&self) -> BigInt {
        let mut p = BigInt::zero();
        for &d in &self.digits {
            p = p * 10 + d;
        }
        p
    }

    /// Enclosure of every possible extension of the prefix.
    pub fn interval(&self, bits: usize) -> Interval {
        let lo = self.prefix_value();
        let hi = &lo + BigRational::new(BigInt::one(), pow10_big(self.digits.len()));
        Interval::from_ratio(&lo, bits).hull_with(&Interval::from_ratio(&hi, bits))
    }

    fn push_zeros(&mut self, count: usize) {
        self.digits.extend(std::iter::repeat(0).take(count));
    }

    fn push_one(&mut self) {
        self.digits.push(1);
    }
}

impl fmt::Display for DigitReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0.")?;
        for &d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

fn pow10_big(k: usize) -> BigInt {
    BigInt::from(10u32).pow(k as u32)
}

/// Two distinct geodesic classes `(m,n)` and `(k,l)` of Y_a, compared through
/// their norms `e^{am+n}` and `e^{ak+l}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicPair {
    pub m: BigInt,
    pub n: BigInt,
    pub k: BigInt,
    pub l: BigInt,
}

impl GeodesicPair {
    pub fn new(m: BigInt, n: BigInt, k: BigInt, l: BigInt) -> Result<Self> {
        if m.is_negative() || n.is_negative() || k.is_negative() || l.is_negative() {
            return Err(Error::Precondition("pair entries must be nonnegative".into()));
        }
        if (m.is_zero() && n.is_zero()) || (k.is_zero() && l.is_zero()) {
            return Err(Error::Precondition("(0,0) is not a geodesic class".into()));
        }
        if m == k && n == l {
            return Err(Error::Precondition("the two classes must differ".into()));
        }
        Ok(GeodesicPair { m, n, k, l })
    }
}

/// A pair together with its certified gap and scale data.
#[derive(Clone, Debug)]
pub struct CertifiedPair {
    pub pair: GeodesicPair,
    /// Certified bounds on `|e^{am+n} − e^{ak+l}|`.
    pub gap_lower: f64,
    pub gap_upper: f64,
    /// Exact exponent of the scale `e^{ak+l}` at `k = 0`, i.e. `l`.
    pub scale_exponent: BigInt,
    pub scale: f64,
}

/// Geodesic length `l(m,n) = a·m + n` as a certified enclosure.
pub fn length(m: u64, n: u64, a: &DigitReal) -> Result<Interval> {
    if m == 0 && n == 0 {
        return Err(Error::Precondition("(0,0) is not a geodesic class".into()));
    }
    let bits = working_bits();
    let ai = a.interval(bits);
    Ok(ai
        .mul(&Interval::from_i64(m as i64, bits))
        .add(&Interval::from_i64(n as i64, bits)))
}

fn norm_interval(m: u64, n: u64, ai: &Interval, bits: usize) -> Interval {
    ai.mul(&Interval::from_i64(m as i64, bits))
        .add(&Interval::from_i64(n as i64, bits))
        .exp()
}

/// Result of [`min_gap_scan`]: the two classes realizing the minimal norm gap.
#[derive(Clone, Debug)]
pub struct MinGapScan {
    pub min_gap: Interval,
    pub argmin: GeodesicPair,
}

/// Minimal `|e^{am+n} − e^{ak+l}|` over all distinct classes in the box
/// `0 ≤ m ≤ m_max`, `0 ≤ n ≤ n_max`, certified against the digit prefix.
pub fn min_gap_scan(a: &DigitReal, m_max: u64, n_max: u64) -> Result<MinGapScan> {
    if m_max == 0 && n_max == 0 {
        return Err(Error::Precondition("scan box must contain a nonzero class".into()));
    }
    let classes: Vec<(u64, u64)> = (0..=m_max)
        .flat_map(|m| (0..=n_max).map(move |n| (m, n)))
        .filter(|&(m, n)| m + n > 0)
        .collect();
    let mut bits = working_bits();
    loop {
        let ai = a.interval(bits);
        let norms: Vec<Interval> = classes
            .iter()
            .map(|&(m, n)| norm_interval(m, n, &ai, bits))
            .collect();
        let mut best: Option<(usize, usize, Interval)> = None;
        let mut ambiguous = false;
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                let d = norms[i].sub(&norms[j]).abs();
                match &best {
                    None => best = Some((i, j, d)),
                    Some((_, _, cur)) => match d.cmp_certified(cur) {
                        Some(Ordering::Less) => best = Some((i, j, d)),
                        Some(_) => {}
                        None => {
                            ambiguous = true;
                            if bf_to_f64(d.hi()) < bf_to_f64(cur.hi()) {
                                best = Some((i, j, d));
                            }
                        }
                    },
                }
            }
        }
        let (i, j, min_gap) = best.expect("at least one pair");
        if !ambiguous {
            // larger-norm class first, matching the m > k, n < l normal form
            let hi_first = norms[i].cmp_certified(&norms[j]) == Some(Ordering::Greater);
            let (big, small) = if hi_first { (i, j) } else { (j, i) };
            let pair = GeodesicPair::new(
                BigInt::from(classes[big].0),
                BigInt::from(classes[big].1),
                BigInt::from(classes[small].0),
                BigInt::from(classes[small].1),
            )?;
            return Ok(MinGapScan { min_gap, argmin: pair });
        }
        bits *= 2;
        if bits > MAX_BITS {
            return Err(Error::Certification(
                "argmin not separable at the available digit prefix; extend the prefix".into(),
            ));
        }
    }
}

/// Certifies the pair `(m,n) = (q, extra)`, `(k,l) = (0, p + extra)` against
/// the stream `a`: the gap `(e^{qa−p} − 1)·e^{p+extra}` must stay below `c`
/// for every admissible tail, and above zero.
fn certify_seed_pair(
    a: &DigitReal,
    p: &BigInt,
    q: &BigInt,
    extra: u64,
    c: &BigRational,
) -> Result<CertifiedPair> {
    let l = p + BigInt::from(extra);
    let pair = GeodesicPair::new(q.clone(), BigInt::from(extra), BigInt::zero(), l.clone())?;
    // x = q·a − p, exactly bracketed by the prefix and its +10^{−d} tail room
    let x_lo = BigRational::from(q.clone()) * a.prefix_value() - BigRational::from(p.clone());
    let x_hi = &x_lo + BigRational::new(q.clone(), pow10_big(a.digit_count()));
    if !x_lo.is_positive() {
        return Err(Error::Certification(format!(
            "prefix does not separate a from {p}/{q}: the gap could vanish"
        )));
    }
    let l_rat = BigRational::from(l.clone());
    let mut bits = working_bits();
    loop {
        let x = Interval::from_ratio(&x_lo, bits).hull_with(&Interval::from_ratio(&x_hi, bits));
        let gap = x
            .exp()
            .sub(&Interval::from_i64(1, bits))
            .mul(&Interval::from_ratio(&l_rat, bits).exp());
        let c_iv = Interval::from_ratio(c, bits);
        if gap.cmp_certified(&c_iv) == Some(Ordering::Less) && gap.lo().is_positive() {
            let scale = Interval::from_ratio(&l_rat, bits).exp();
            return Ok(CertifiedPair {
                pair,
                gap_lower: bf_to_f64(gap.lo()),
                gap_upper: bf_to_f64(gap.hi()),
                scale_exponent: l,
                scale: scale.to_f64(),
            });
        }
        bits *= 2;
        if bits > MAX_BITS {
            return Err(Error::Certification(format!(
                "gap bound {c} not certifiable for pair at scale exponent {l}"
            )));
        }
    }
}

/// Digit-stream construction: starting from the seed prefix `p/q`, appends a
/// zero run and a marker digit 1 per stage, and certifies one geodesic pair
/// per stage with strictly increasing scales (consecutive ratio `e²`).
///
/// All stages certify against the seed approximation `p/q`; the scale grows
/// through the unit-loop count, which keeps the digit cost linear in the
/// stage count instead of doubly exponential.
pub fn liouville_construct(
    seed: &DigitReal,
    c: &BigRational,
    stages: usize,
) -> Result<(DigitReal, Vec<CertifiedPair>)> {
    if !c.is_positive() {
        return Err(Error::Precondition("C must be positive".into()));
    }
    if stages < 1 {
        return Err(Error::Precondition("stages must be ≥ 1".into()));
    }
    let p = seed.prefix_numerator();
    let q = pow10_big(seed.digit_count());
    if p >= q {
        return Err(Error::Precondition("seed must lie in (0,1)".into()));
    }
    let l_max = (&p + BigInt::from(2 * (stages as u64 - 1)))
        .to_f64()
        .unwrap_or(f64::INFINITY);
    let c_f = c.to_f64().unwrap_or(f64::MIN_POSITIVE);
    // zero run sized so that q·tail·e^{l_max+1} stays below C with slack 4
    let z_f = (4.0_f64).log10() + 1.0 + (l_max + 1.0) * std::f64::consts::LOG10_E
        + (seed.digit_count() as f64)
        - c_f.log10();
    let mut zeros = z_f.ceil().max(1.0) as usize + 1;
    loop {
        let needed = seed.digit_count() + stages * (zeros + 1);
        if needed > DIGIT_BUDGET {
            return Err(Error::Precondition(format!(
                "digit budget {DIGIT_BUDGET} exhausted before any stage completed \
                 ({needed} digits required); achieved 0 of {stages} stages"
            )));
        }
        let mut a = seed.clone();
        for _ in 0..stages {
            a.push_zeros(zeros);
            a.push_one();
        }
        let mut pairs = Vec::with_capacity(stages);
        let mut ok = true;
        for j in 0..stages {
            match certify_seed_pair(&a, &p, &q, 2 * j as u64, c) {
                Ok(cp) => pairs.push(cp),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok((a, pairs));
        }
        let achieved = pairs.len();
        zeros *= 2;
        if seed.digit_count() + stages * (zeros + 1) > DIGIT_BUDGET {
            return Err(Error::Precondition(format!(
                "digit budget {DIGIT_BUDGET} exhausted; achieved {achieved} of {stages} stages"
            )));
        }
    }
}

/// Re-verifies small gaps directly from a digit stream: finds `count` pairs
/// with certified gap `< c`, scales pairwise separated by a factor ≥ e and
/// each at least `scale_floor`.
pub fn verify_small_gaps(
    a: &DigitReal,
    c: &BigRational,
    count: usize,
    scale_floor: f64,
) -> Result<Vec<CertifiedPair>> {
    if !c.is_positive() {
        return Err(Error::Precondition("C must be positive".into()));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let digits = a.digits();
    // candidate anchors: prefixes p_d/10^d; the tail after d must be nonzero
    // somewhere or the gap lower bound cannot be separated from zero
    let mut last_err = Error::Certification("no anchor prefix certifies the bound".into());
    for d in 1..digits.len() {
        if digits[d..].iter().all(|&x| x == 0) {
            continue;
        }
        let p = {
            let mut acc = BigInt::zero();
            for &dig in &digits[..d] {
                acc = acc * 10 + dig;
            }
            acc
        };
        if p.is_zero() {
            continue;
        }
        let q = pow10_big(d);
        // lift the scale to the floor through the unit-loop count
        let mut extra = 0u64;
        let p_f = p.to_f64().unwrap_or(f64::INFINITY);
        if scale_floor > 0.0 && scale_floor.ln() > p_f {
            extra = (scale_floor.ln() - p_f).ceil() as u64;
        }
        let attempt: Result<Vec<CertifiedPair>> = (0..count)
            .map(|j| certify_seed_pair(a, &p, &q, extra + 2 * j as u64, c))
            .collect();
        match attempt {
            Ok(pairs) => {
                debug_assert!(pairs
                    .windows(2)
                    .all(|w| &w[1].scale_exponent - &w[0].scale_exponent >= BigInt::from(2)));
                return Ok(pairs);
            }
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// For each target, constructs `a` near it with `stages` certified pairs;
/// returns the stream and a certified upper bound on `|a − target|`.
pub fn density_demo(
    targets: &[BigRational],
    c: &BigRational,
    stages: usize,
) -> Result<Vec<(DigitReal, f64)>> {
    let mut out = Vec::with_capacity(targets.len());
    for t in targets {
        if !t.is_positive() || t >= &BigRational::one() {
            return Err(Error::Precondition(format!("target {t} outside (0,1)")));
        }
        // shortest digit prefix of the target with a nonzero numerator
        let mut d = 1usize;
        let seed = loop {
            let scaled = (t * BigRational::from(pow10_big(d))).floor().to_integer();
            if !scaled.is_zero() {
                let mut digit_vec: Vec<u8> = scaled
                    .to_string()
                    .bytes()
                    .map(|b| b - b'0')
                    .collect();
                while digit_vec.len() < d {
                    digit_vec.insert(0, 0);
                }
                break DigitReal::from_digits(digit_vec)?;
            }
            d += 1;
            if d > 30 {
                return Err(Error::Precondition(format!("target {t} too close to 0")));
            }
        };
        let (a, _pairs) = liouville_construct(&seed, c, stages)?;
        let bits = working_bits();
        let dist = a
            .interval(bits)
            .sub(&Interval::from_ratio(t, bits))
            .abs();
        out.push((a, bf_to_f64(dist.hi())));
    }
    Ok(out)
}
