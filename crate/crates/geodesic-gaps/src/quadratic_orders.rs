//! Exact arithmetic in real quadratic orders: discriminants, fundamental units,
//! class numbers via reduction cycles of indefinite forms, and the trace→unit map.
//!
//! The order of discriminant `D` is `O_D = {(a+b√D)/2 : a ≡ bD (mod 2)}`. Its
//! norm-one unit group is generated by a unique fundamental unit `ε_D > 1`,
//! obtained here from the automorph of the principal reduction cycle, which is
//! the matrix form of the continued-fraction expansion of the principal root.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::precision::{working_bits, Interval};

/// A valid (not necessarily fundamental) positive discriminant:
/// `D > 0`, `D ≡ 0,1 (mod 4)`, `D` not a perfect square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        if is_discriminant(d) {
            Ok(Discriminant(d))
        } else {
            Err(Error::Precondition(format!("{d} is not a valid discriminant")))
        }
    }

    pub fn value(self) -> i64 {
        self.0
    }

    /// True when `D` is square-free, or `D/4` is square-free, respectively.
    pub fn is_fundamental(self) -> bool {
        match fundamental_decompose(self.0) {
            Ok((f, _)) => f == 1,
            Err(_) => false,
        }
    }
}

impl std::fmt::Display for Discriminant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Total test for the discriminant condition.
pub fn is_discriminant(d: i64) -> bool {
    if d <= 0 {
        return false;
    }
    let r = d % 4;
    if r != 0 && r != 1 {
        return false;
    }
    !is_square_i64(d)
}

pub fn isqrt_i64(n: i64) -> i64 {
    assert!(n >= 0);
    (n as u64).isqrt() as i64
}

pub fn is_square_i64(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt_i64(n);
    r * r == n
}

/// Trial-division factorization.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |p: u64, e: u32| {
        if e > 0 {
            out.push((p, e));
        }
    };
    for p in [2u64, 3, 5] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        push(p, e);
    }
    // 2,3,5 wheel
    let inc = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut i = 0usize;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        push(p, e);
        p += inc[i];
        i = (i + 1) % inc.len();
    }
    push(n, u32::from(n > 1));
    out.sort_unstable();
    out
}

fn squarefree_split(factors: &[(u64, u32)]) -> (u64, u64) {
    // n = m² · Δ with Δ square-free; returns (m, Δ)
    let mut m = 1u64;
    let mut delta = 1u64;
    for &(p, e) in factors {
        for _ in 0..e / 2 {
            m *= p;
        }
        if e % 2 == 1 {
            delta *= p;
        }
    }
    (m, delta)
}

/// Writes `n = f²·D0` with `D0` the fundamental discriminant of the same field.
pub fn fundamental_decompose(n: i64) -> Result<(i64, Discriminant)> {
    if n <= 0 || (n % 4 != 0 && n % 4 != 1) {
        return Err(Error::Precondition(format!("{n} ≢ 0,1 (mod 4) or not positive")));
    }
    if is_square_i64(n) {
        return Err(Error::Precondition(format!("{n} is a perfect square")));
    }
    let factors = factor_u64(n as u64);
    let (m, delta) = squarefree_split(&factors);
    let (f, d0) = if delta % 4 == 1 {
        (m, delta)
    } else {
        // m must be even here since n ≡ 0,1 (mod 4)
        debug_assert_eq!(m % 2, 0);
        (m / 2, 4 * delta)
    };
    Ok((f as i64, Discriminant::new(d0 as i64)?))
}

/// Same decomposition for `a²−4`, factoring `a−2` and `a+2` separately.
pub fn decompose_trace(a: i64) -> Result<(i64, Discriminant)> {
    if a < 3 {
        return Err(Error::Precondition(format!(
            "trace {a} is not hyperbolic (need a ≥ 3)"
        )));
    }
    let mut factors = factor_u64((a - 2) as u64);
    for (p, e) in factor_u64((a + 2) as u64) {
        match factors.iter_mut().find(|(q, _)| *q == p) {
            Some((_, e0)) => *e0 += e,
            None => factors.push((p, e)),
        }
    }
    factors.sort_unstable();
    let (m, delta) = squarefree_split(&factors);
    let (f, d0) = if delta % 4 == 1 { (m, delta) } else { (m / 2, 4 * delta) };
    Ok((f as i64, Discriminant::new(d0 as i64)?))
}

/// An element `(a+b√D)/2` of the order `O_D`; requires `a ≡ bD (mod 2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticInteger {
    a: BigInt,
    b: BigInt,
    d: Discriminant,
}

impl QuadraticInteger {
    pub fn new(a: BigInt, b: BigInt, d: Discriminant) -> Result<Self> {
        let parity = (&a - &b * BigInt::from(d.value())) % 2u8;
        if !parity.is_zero() {
            return Err(Error::Precondition(format!(
                "({a}+{b}√{d})/2 violates a ≡ bD (mod 2)"
            )));
        }
        Ok(QuadraticInteger { a, b, d })
    }

    pub fn half_trace_parts(&self) -> (&BigInt, &BigInt) {
        (&self.a, &self.b)
    }

    pub fn discriminant(&self) -> Discriminant {
        self.d
    }

    /// Field trace `α + ᾱ = a`.
    pub fn trace(&self) -> BigInt {
        self.a.clone()
    }

    pub fn conjugate(&self) -> QuadraticInteger {
        QuadraticInteger { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// Field norm `α·ᾱ = (a²−b²D)/4`, always an integer on `O_D`.
    pub fn norm(&self) -> BigInt {
        let num = &self.a * &self.a - &self.b * &self.b * BigInt::from(self.d.value());
        debug_assert!((&num % 4u8).is_zero());
        num / 4u8
    }

    pub fn mul(&self, rhs: &QuadraticInteger) -> Result<QuadraticInteger> {
        if self.d != rhs.d {
            return Err(Error::Precondition("mixed discriminants".into()));
        }
        let d = BigInt::from(self.d.value());
        let a = (&self.a * &rhs.a + &self.b * &rhs.b * &d) / 2u8;
        let b = (&self.a * &rhs.b + &self.b * &rhs.a) / 2u8;
        QuadraticInteger::new(a, b, self.d)
    }

    /// Enclosure of the real value `(a+b√D)/2`.
    pub fn value_interval(&self, bits: usize) -> Interval {
        let sqrt_d = Interval::from_i64(self.d.value(), bits).sqrt();
        let a = Interval::from_bigint(&self.a, bits);
        let b = Interval::from_bigint(&self.b, bits);
        a.add(&b.mul(&sqrt_d)).mul(&Interval::from_ratio(
            &num_rational::BigRational::new(BigInt::one(), BigInt::from(2)),
            bits,
        ))
    }
}

/// The fundamental norm-(+1) unit `ε_D > 1` of `O_D`.
#[derive(Clone, Debug)]
pub struct FundamentalUnit {
    pub unit: QuadraticInteger,
    pub real_value: Interval,
}

/// A primitive indefinite binary quadratic form `Ax²+Bxy+Cy²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    pub fn new(a: i64, b: i64, c: i64, d: Discriminant) -> Result<Self> {
        if b * b - 4 * a * c != d.value() {
            return Err(Error::Precondition("form has wrong discriminant".into()));
        }
        if gcd3(a, b, c) != 1 {
            return Err(Error::Precondition("form is not primitive".into()));
        }
        Ok(Form { a, b, c })
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Reduced indefinite form: `0 < b < √D` and `√D − b < 2|a| < √D + b`.
    pub fn is_reduced(&self) -> bool {
        let d = self.discriminant();
        if d <= 0 {
            return false;
        }
        let b = self.b;
        if b <= 0 || b * b >= d {
            return false;
        }
        let ta = 2 * self.a.abs();
        // √D − b < 2|a|  ⇔  (2|a| + b)² > D
        // 2|a| < √D + b  ⇔  2|a| ≤ b, or (2|a| − b)² < D
        (ta + b) * (ta + b) > d && (ta <= b || (ta - b) * (ta - b) < d)
    }

    /// One reduction step; on reduced forms this walks the cycle.
    pub fn rho(&self) -> Form {
        let d = self.discriminant();
        let s = isqrt_i64(d);
        let a2 = self.c;
        let m = 2 * self.c.abs();
        // largest b' ≤ s with b' ≡ −b (mod 2|c|)
        let r = (-self.b).rem_euclid(m);
        let b2 = s - (s - r).rem_euclid(m);
        debug_assert_eq!((b2 * b2 - d) % (4 * self.c), 0);
        let c2 = (b2 * b2 - d) / (4 * self.c);
        Form { a: a2, b: b2, c: c2 }
    }
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    a.abs().gcd(&b.abs()).gcd(&c.abs())
}

/// Reduced principal form `(1, b0, (b0²−D)/4)` with `b0 ≡ D (mod 2)` maximal.
pub fn principal_form(d: Discriminant) -> Form {
    let dv = d.value();
    let mut b0 = isqrt_i64(dv);
    if (b0 - dv).rem_euclid(2) != 0 {
        b0 -= 1;
    }
    let f = Form { a: 1, b: b0, c: (b0 * b0 - dv) / 4 };
    debug_assert!(f.is_reduced());
    f
}

/// Fundamental unit via the automorph of the principal cycle: the product of
/// the per-step matrices `[[0,−1],[1,m]]` over one full cycle gives the minimal
/// solution of `t² − Du² = 4`.
pub fn fundamental_unit(d: Discriminant) -> Result<FundamentalUnit> {
    let f0 = principal_form(d);
    // 2x2 matrix accumulated as (m00, m01, m10, m11)
    let mut m00 = BigInt::one();
    let mut m01 = BigInt::zero();
    let mut m10 = BigInt::zero();
    let mut m11 = BigInt::one();
    let mut f = f0;
    loop {
        let g = f.rho();
        let mq = (f.b + g.b) / (2 * f.c);
        debug_assert_eq!((f.b + g.b) % (2 * f.c), 0);
        // M *= [[0,−1],[1,mq]]
        let q = BigInt::from(mq);
        let (n00, n01) = (m01.clone(), -&m00 + &m01 * &q);
        let (n10, n11) = (m11.clone(), -&m10 + &m11 * &q);
        m00 = n00;
        m01 = n01;
        m10 = n10;
        m11 = n11;
        f = g;
        if f == f0 {
            break;
        }
    }
    let t = (&m00 + &m11).abs();
    let u = m10.abs();
    let check = &t * &t - &u * &u * BigInt::from(d.value());
    if check != BigInt::from(4) {
        return Err(Error::Internal(format!(
            "automorph of D={d} gave t²−Du²={check}, expected 4"
        )));
    }
    let unit = QuadraticInteger::new(t, u, d)?;
    let real_value = unit.value_interval(working_bits());
    Ok(FundamentalUnit { unit, real_value })
}

/// Number of proper equivalence classes of primitive forms of discriminant `D`,
/// counted as rho-cycles over the set of reduced forms.
pub fn class_number(d: Discriminant) -> u64 {
    let forms = reduced_forms(d);
    let mut remaining: std::collections::BTreeSet<Form> = forms.into_iter().collect();
    let mut cycles = 0u64;
    while let Some(&start) = remaining.iter().next() {
        cycles += 1;
        let mut f = start;
        loop {
            remaining.remove(&f);
            f = f.rho();
            if f == start {
                break;
            }
        }
    }
    cycles
}

/// All reduced primitive forms of discriminant `D`.
pub fn reduced_forms(d: Discriminant) -> Vec<Form> {
    let dv = d.value();
    let s = isqrt_i64(dv);
    let mut out = Vec::new();
    let mut b = if dv % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let prod4 = b * b - dv; // = 4ac < 0
        debug_assert_eq!(prod4.rem_euclid(4), 0);
        let prod = prod4 / 4; // ac
        let bound = -prod;
        let mut a_abs = 1;
        while a_abs * a_abs <= bound {
            if bound % a_abs == 0 {
                let c_abs = bound / a_abs;
                for (aa, cc) in [(a_abs, -c_abs), (-a_abs, c_abs)] {
                    let f = Form { a: aa, b, c: cc };
                    if f.is_reduced() && gcd3(aa, b, cc) == 1 {
                        out.push(f);
                    }
                    if a_abs != c_abs {
                        let g = Form { a: cc, b, c: aa };
                        if g.is_reduced() && gcd3(cc, b, aa) == 1 {
                            out.push(g);
                        }
                    }
                }
            }
            a_abs += 1;
        }
        b += 2;
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// The geodesic norm `(a+√(a²−4))/2` attached to a hyperbolic trace, with the
/// decomposition `a²−4 = b²·D0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceUnit {
    pub trace: i64,
    pub b: i64,
    pub d0: Discriminant,
}

impl TraceUnit {
    /// As an element of `O_{D0}`: `(a + b√D0)/2`.
    pub fn unit(&self) -> QuadraticInteger {
        QuadraticInteger::new(BigInt::from(self.trace), BigInt::from(self.b), self.d0)
            .expect("trace unit parity")
    }

    pub fn value_interval(&self, bits: usize) -> Interval {
        self.unit().value_interval(bits)
    }
}

/// Maps a hyperbolic trace `a ≥ 3` to its norm value `ε = (a+√(a²−4))/2`.
pub fn unit_from_trace(a: i64) -> Result<TraceUnit> {
    if a <= 2 {
        return Err(Error::Precondition(format!(
            "trace {a} is non-hyperbolic (parabolic/elliptic classes have no geodesic)"
        )));
    }
    let (b, d0) = decompose_trace(a)?;
    Ok(TraceUnit { trace: a, b, d0 })
}

/// Exact test `ε(a) ≤ x` for rational `x`: `√(a²−4) ≤ 2x − a` by squaring.
pub fn trace_value_le(a: i64, x: &num_rational::BigRational) -> bool {
    let p = x.numer();
    let q = x.denom();
    let lhs = BigInt::from(2) * p - BigInt::from(a) * q; // (2x − a)·q
    if lhs.is_negative() {
        return false;
    }
    let rad = BigInt::from(a) * BigInt::from(a) - BigInt::from(4);
    &lhs * &lhs >= rad * q * q
}

/// Number of distinct norm values `ε(a) ≤ x`, `a ≥ 3`; exact integer comparisons.
pub fn count_units_below(x: &num_rational::BigRational, fundamental_only: bool) -> Result<u64> {
    if x <= &num_rational::BigRational::one() {
        return Err(Error::Precondition("count_units_below requires x > 1".into()));
    }
    let mut count = 0u64;
    let mut a = 3i64;
    while trace_value_le(a, x) {
        if !fundamental_only || decompose_trace(a)?.0 == 1 {
            count += 1;
        }
        a += 1;
    }
    Ok(count)
}
