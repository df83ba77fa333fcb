//! Certified real arithmetic: directed-rounding intervals over arbitrary-precision
//! floats, with automatic precision escalation for sign and digit certification.
//!
//! All spectrum values grow like `e^l`, so fixed doubles lose gap resolution
//! quickly; every comparison that feeds a certificate goes through [`Interval`].

use std::cell::RefCell;
use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{Error, Result};

/// Default working precision in bits.
pub const DEFAULT_BITS: usize = 256;
/// Lower bound on configurable precision.
pub const MIN_BITS: usize = 64;
/// Escalation ceiling; a comparison still ambiguous here is reported, not forced.
pub const MAX_BITS: usize = 1 << 16;

/// Working precision: `GG_PRECISION_BITS` if set, else [`DEFAULT_BITS`], clamped to ≥ 64.
pub fn working_bits() -> usize {
    match std::env::var("GG_PRECISION_BITS") {
        Ok(v) => v.parse::<usize>().map(|b| b.max(MIN_BITS)).unwrap_or(DEFAULT_BITS),
        Err(_) => DEFAULT_BITS,
    }
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

fn bf_from_bigint(n: &BigInt, bits: usize, rm: RoundingMode) -> BigFloat {
    // Round-trip through decimal; exact whenever the integer fits the mantissa.
    with_consts(|cc| BigFloat::parse(&n.to_string(), Radix::Dec, bits, rm, cc))
}

/// A closed interval `[lo, hi]` guaranteed to contain the represented real.
#[derive(Clone, Debug)]
pub struct Interval {
    lo: BigFloat,
    hi: BigFloat,
    bits: usize,
}

impl Interval {
    pub fn new(lo: BigFloat, hi: BigFloat, bits: usize) -> Self {
        debug_assert!(lo.partial_cmp(&hi).map_or(true, |o| o != Ordering::Greater));
        Interval { lo, hi, bits }
    }

    pub fn point(v: BigFloat, bits: usize) -> Self {
        Interval { lo: v.clone(), hi: v, bits }
    }

    pub fn from_i64(v: i64, bits: usize) -> Self {
        Self::point(BigFloat::from_i64(v, bits), bits)
    }

    pub fn from_bigint(n: &BigInt, bits: usize) -> Self {
        Interval {
            lo: bf_from_bigint(n, bits, RoundingMode::Down),
            hi: bf_from_bigint(n, bits, RoundingMode::Up),
            bits,
        }
    }

    pub fn from_ratio(r: &BigRational, bits: usize) -> Self {
        let numer = Interval::from_bigint(r.numer(), bits);
        let denom = Interval::from_bigint(r.denom(), bits);
        numer.div(&denom)
    }

    /// Parses a decimal literal into an enclosing interval.
    pub fn from_decimal(s: &str, bits: usize) -> Self {
        let lo = with_consts(|cc| BigFloat::parse(s, Radix::Dec, bits, RoundingMode::Down, cc));
        let hi = with_consts(|cc| BigFloat::parse(s, Radix::Dec, bits, RoundingMode::Up, cc));
        Interval { lo, hi, bits }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn lo(&self) -> &BigFloat {
        &self.lo
    }

    pub fn hi(&self) -> &BigFloat {
        &self.hi
    }

    pub fn add(&self, rhs: &Interval) -> Interval {
        Interval {
            lo: self.lo.add(&rhs.lo, self.bits, RoundingMode::Down),
            hi: self.hi.add(&rhs.hi, self.bits, RoundingMode::Up),
            bits: self.bits,
        }
    }

    pub fn sub(&self, rhs: &Interval) -> Interval {
        Interval {
            lo: self.lo.sub(&rhs.hi, self.bits, RoundingMode::Down),
            hi: self.hi.sub(&rhs.lo, self.bits, RoundingMode::Up),
            bits: self.bits,
        }
    }

    pub fn neg(&self) -> Interval {
        let mut lo = self.hi.clone();
        lo.inv_sign();
        let mut hi = self.lo.clone();
        hi.inv_sign();
        Interval { lo, hi, bits: self.bits }
    }

    pub fn mul(&self, rhs: &Interval) -> Interval {
        let cands = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        let mut lo: Option<BigFloat> = None;
        let mut hi: Option<BigFloat> = None;
        for (a, b) in cands {
            let dn = a.mul(b, self.bits, RoundingMode::Down);
            let up = a.mul(b, self.bits, RoundingMode::Up);
            lo = Some(match lo {
                Some(cur) if cur.partial_cmp(&dn) != Some(Ordering::Greater) => cur,
                _ => dn,
            });
            hi = Some(match hi {
                Some(cur) if cur.partial_cmp(&up) != Some(Ordering::Less) => cur,
                _ => up,
            });
        }
        Interval { lo: lo.unwrap(), hi: hi.unwrap(), bits: self.bits }
    }

    /// Interval division; the divisor must be sign-definite.
    pub fn div(&self, rhs: &Interval) -> Interval {
        assert!(
            !rhs.contains_zero(),
            "interval division by an interval containing zero"
        );
        let cands = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        let mut lo: Option<BigFloat> = None;
        let mut hi: Option<BigFloat> = None;
        for (a, b) in cands {
            let dn = a.div(b, self.bits, RoundingMode::Down);
            let up = a.div(b, self.bits, RoundingMode::Up);
            lo = Some(match lo {
                Some(cur) if cur.partial_cmp(&dn) != Some(Ordering::Greater) => cur,
                _ => dn,
            });
            hi = Some(match hi {
                Some(cur) if cur.partial_cmp(&up) != Some(Ordering::Less) => cur,
                _ => up,
            });
        }
        Interval { lo: lo.unwrap(), hi: hi.unwrap(), bits: self.bits }
    }

    /// Square root; requires a nonnegative interval.
    pub fn sqrt(&self) -> Interval {
        Interval {
            lo: self.lo.sqrt(self.bits, RoundingMode::Down),
            hi: self.hi.sqrt(self.bits, RoundingMode::Up),
            bits: self.bits,
        }
    }

    pub fn exp(&self) -> Interval {
        with_consts(|cc| Interval {
            lo: self.lo.exp(self.bits, RoundingMode::Down, cc),
            hi: self.hi.exp(self.bits, RoundingMode::Up, cc),
            bits: self.bits,
        })
    }

    /// Natural log; requires a strictly positive interval.
    pub fn ln(&self) -> Interval {
        with_consts(|cc| Interval {
            lo: self.lo.ln(self.bits, RoundingMode::Down, cc),
            hi: self.hi.ln(self.bits, RoundingMode::Up, cc),
            bits: self.bits,
        })
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let neg = self.neg();
            let hi = if self.hi.partial_cmp(&neg.hi) == Some(Ordering::Less) {
                neg.hi
            } else {
                self.hi.clone()
            };
            Interval { lo: BigFloat::from_i64(0, self.bits), hi, bits: self.bits }
        }
    }

    /// Smallest interval containing both operands.
    pub fn hull_with(&self, rhs: &Interval) -> Interval {
        let lo = if self.lo.partial_cmp(&rhs.lo) == Some(Ordering::Greater) {
            rhs.lo.clone()
        } else {
            self.lo.clone()
        };
        let hi = if self.hi.partial_cmp(&rhs.hi) == Some(Ordering::Less) {
            rhs.hi.clone()
        } else {
            self.hi.clone()
        };
        Interval { lo, hi, bits: self.bits }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Certified sign of the represented real, when the interval is separated from zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified comparison against another interval (None when overlapping).
    pub fn cmp_certified(&self, rhs: &Interval) -> Option<Ordering> {
        if self.hi.partial_cmp(&rhs.lo) == Some(Ordering::Less) {
            Some(Ordering::Less)
        } else if self.lo.partial_cmp(&rhs.hi) == Some(Ordering::Greater) {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    pub fn width(&self) -> BigFloat {
        self.hi.sub(&self.lo, self.bits, RoundingMode::Up)
    }

    /// True when `hi − lo ≤ |mid| · 10^{−digits}` (relative certification).
    pub fn certified_rel_digits(&self, digits: usize) -> bool {
        let w = self.width();
        if w.is_zero() {
            return true;
        }
        let mid = self.mid();
        if mid.is_zero() {
            return false;
        }
        let tol = mid
            .abs()
            .mul(&pow10(-(digits as i64), self.bits), self.bits, RoundingMode::Down);
        w.partial_cmp(&tol) != Some(Ordering::Greater)
    }

    pub fn mid(&self) -> BigFloat {
        let two = BigFloat::from_i64(2, self.bits);
        self.lo
            .add(&self.hi, self.bits, RoundingMode::ToEven)
            .div(&two, self.bits, RoundingMode::ToEven)
    }

    pub fn to_f64(&self) -> f64 {
        bf_to_f64(&self.mid())
    }

    /// Midpoint as a decimal string with the stated number of significant digits,
    /// annotated only when the interval actually certifies them.
    pub fn decimal(&self, sig_digits: usize) -> String {
        format_sig(&self.mid(), sig_digits, self.bits)
    }
}

/// 10^k as a point float.
pub fn pow10(k: i64, bits: usize) -> BigFloat {
    let ten = BigFloat::from_i64(10, bits);
    ten.powi(k.unsigned_abs() as usize, bits, RoundingMode::ToEven)
        .reciprocal_if(k < 0, bits)
}

trait ReciprocalIf {
    fn reciprocal_if(self, cond: bool, bits: usize) -> BigFloat;
}

impl ReciprocalIf for BigFloat {
    fn reciprocal_if(self, cond: bool, bits: usize) -> BigFloat {
        if cond {
            self.reciprocal(bits, RoundingMode::ToEven)
        } else {
            self
        }
    }
}

pub fn bf_to_f64(v: &BigFloat) -> f64 {
    format!("{}", v).parse::<f64>().unwrap_or(f64::NAN)
}

fn format_sig(v: &BigFloat, sig: usize, bits: usize) -> String {
    let _ = bits;
    let s = with_consts(|cc| v.format(Radix::Dec, RoundingMode::ToEven, cc))
        .unwrap_or_else(|_| format!("{}", v));
    trim_to_sig(&s, sig)
}

fn trim_to_sig(s: &str, sig: usize) -> String {
    // Format is like "-1.2345e+6"; keep `sig` mantissa digits.
    if let Some(epos) = s.find(['e', 'E']) {
        let (mant, exp) = s.split_at(epos);
        let mut digits = 0usize;
        let mut out = String::new();
        for ch in mant.chars() {
            if ch.is_ascii_digit() {
                if digits >= sig {
                    continue;
                }
                digits += 1;
            }
            out.push(ch);
        }
        out.push_str(exp);
        out
    } else {
        s.to_string()
    }
}

/// Evaluates `f` at escalating precision until the result certifies `digits`
/// significant decimal digits.
pub fn certify_digits<F>(f: F, digits: usize, start_bits: usize) -> Result<Interval>
where
    F: Fn(usize) -> Interval,
{
    let mut bits = start_bits.max(MIN_BITS);
    loop {
        let iv = f(bits);
        if iv.certified_rel_digits(digits) {
            return Ok(iv);
        }
        bits *= 2;
        if bits > MAX_BITS {
            return Err(Error::Certification(format!(
                "could not certify {digits} digits below {MAX_BITS} bits"
            )));
        }
    }
}

/// Certified sign of `f` under precision escalation.
pub fn certify_sign<F>(f: F, start_bits: usize) -> Result<Ordering>
where
    F: Fn(usize) -> Interval,
{
    let mut bits = start_bits.max(MIN_BITS);
    loop {
        if let Some(s) = f(bits).sign() {
            return Ok(s);
        }
        bits *= 2;
        if bits > MAX_BITS {
            return Err(Error::Certification(format!(
                "sign not separable below {MAX_BITS} bits"
            )));
        }
    }
}

/// Exact integer square root (floor).
pub fn isqrt_big(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative");
    n.sqrt()
}

/// Exact perfect-square test via integer square root.
pub fn is_square_big(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &(&r * &r) == n
}
