//! Exact p-adic arithmetic over Q_p.
//!
//! Elements are stored as `unit * p^valuation` where the unit is an integer
//! residue modulo `p^precision`. Precision is relative (number of known
//! p-adic digits starting at the valuation); subtraction that cancels every
//! known digit fails with [`Error::PrecisionExhausted`] instead of guessing.

mod newton;
mod roots;

pub use newton::{newton_polygon, NewtonPolygon, Segment};
pub use roots::{
    count_roots_zp, is_totally_split, projective_roots, roots_in_zp, RootLocation,
};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A p-adic valuation: an integer, or `+inf` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && primal_check::miller_rabin(p)
}

pub fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Largest `k` with `p^k | n`, for nonzero `n`. No primality check.
pub(crate) fn ord_int_unchecked(n: &BigInt, p: u64) -> u64 {
    if n.is_zero() {
        return u64::MAX;
    }
    if p == 2 {
        return n.trailing_zeros().unwrap_or(0);
    }
    let pb = BigInt::from(p);
    let mut k = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        m = q;
        k += 1;
    }
}

pub(crate) fn ord_uint(n: &BigUint, p: u64) -> u64 {
    if n.is_zero() {
        return u64::MAX;
    }
    if p == 2 {
        return n.trailing_zeros().unwrap_or(0);
    }
    let pb = BigUint::from(p);
    let mut k = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        m = q;
        k += 1;
    }
}

/// p-adic valuation of an integer.
pub fn ord_p_int(n: &BigInt, p: u64) -> Result<Valuation> {
    require_prime(p)?;
    Ok(if n.is_zero() {
        Valuation::Infinite
    } else {
        Valuation::Finite(ord_int_unchecked(n, p) as i64)
    })
}

/// p-adic valuation of a rational: `ord(numerator) - ord(denominator)`.
pub fn ord_p(x: &BigRational, p: u64) -> Result<Valuation> {
    require_prime(p)?;
    if x.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let num = ord_int_unchecked(x.numer(), p) as i64;
    let den = ord_int_unchecked(x.denom(), p) as i64;
    Ok(Valuation::Finite(num - den))
}

/// `Some((p, f))` when `q = p^f` for a prime `p` and `f >= 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = smallest_prime_factor(q);
    let mut m = q;
    let mut f = 0;
    while m.is_multiple_of(p) {
        m /= p;
        f += 1;
    }
    (m == 1).then_some((p, f))
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    if is_prime(n) {
        return n;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 2;
    }
    n
}

pub fn pow_u(p: u64, k: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), k as usize)
}

pub(crate) fn pow_i(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let a = BigInt::from_biguint(Sign::Plus, a.clone());
    let m = BigInt::from_biguint(Sign::Plus, m.clone());
    let e = a.extended_gcd(&m);
    if !e.gcd.is_one() {
        return None;
    }
    e.x.mod_floor(&m).to_biguint()
}

/// Reduces a signed integer to `unit * p^k` with the unit modulo `p^digits`.
fn split_integer(n: &BigInt, p: u64, digits: u32) -> Option<(i64, BigUint)> {
    if n.is_zero() {
        return None;
    }
    let k = ord_int_unchecked(n, p);
    let unit = n / pow_i(p, k as u32);
    let m = pow_i(p, digits);
    Some((k as i64, unit.mod_floor(&m).to_biguint().expect("nonnegative")))
}

/// A finite-precision element of Q_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicNumber {
    prime: u64,
    valuation: Valuation,
    unit: BigUint,
    precision: u32,
}

impl PadicNumber {
    /// Exact zero.
    pub fn zero(p: u64) -> Self {
        PadicNumber {
            prime: p,
            valuation: Valuation::Infinite,
            unit: BigUint::zero(),
            precision: 0,
        }
    }

    pub fn one(p: u64, precision: u32) -> Self {
        Self::from_i64(1, p, precision).expect("1 is representable")
    }

    pub fn from_i64(n: i64, p: u64, precision: u32) -> Result<Self> {
        Self::from_integer(&BigInt::from(n), p, precision)
    }

    /// An integer truncated to `precision` relative digits.
    pub fn from_integer(n: &BigInt, p: u64, precision: u32) -> Result<Self> {
        require_prime(p)?;
        check_precision(precision)?;
        Ok(match split_integer(n, p, precision) {
            None => Self::zero(p),
            Some((v, unit)) => PadicNumber {
                prime: p,
                valuation: Valuation::Finite(v),
                unit,
                precision,
            },
        })
    }

    pub fn from_rational(x: &BigRational, p: u64, precision: u32) -> Result<Self> {
        require_prime(p)?;
        check_precision(precision)?;
        if x.is_zero() {
            return Ok(Self::zero(p));
        }
        let (vn, un) = split_integer(x.numer(), p, precision).expect("nonzero");
        let (vd, ud) = split_integer(x.denom(), p, precision).expect("nonzero");
        let m = pow_u(p, precision);
        let inv = mod_inverse(&ud, &m).expect("unit is invertible");
        Ok(PadicNumber {
            prime: p,
            valuation: Valuation::Finite(vn - vd),
            unit: (un * inv) % m,
            precision,
        })
    }

    /// The element whose first `abs_precision` digits are those of `r`, i.e.
    /// `r + O(p^abs_precision)` with `0 <= r < p^abs_precision`.
    ///
    /// A residue that is zero to every known digit is taken as exact zero.
    pub fn from_residue(r: &BigUint, p: u64, abs_precision: u32) -> Result<Self> {
        require_prime(p)?;
        check_precision(abs_precision)?;
        let r = r % pow_u(p, abs_precision);
        if r.is_zero() {
            return Ok(Self::zero(p));
        }
        let k = ord_uint(&r, p) as u32;
        Ok(PadicNumber {
            prime: p,
            valuation: Valuation::Finite(k as i64),
            unit: r / pow_u(p, k),
            precision: abs_precision - k,
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn valuation(&self) -> Valuation {
        self.valuation
    }

    /// Unit part, reduced modulo `p^precision`; zero for the zero element.
    pub fn unit(&self) -> &BigUint {
        &self.unit
    }

    /// Relative precision in p-adic digits.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `valuation + precision`; `None` for exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        self.valuation
            .finite()
            .map(|v| v + self.precision as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.valuation.is_infinite()
    }

    pub fn is_unit(&self) -> bool {
        self.valuation == Valuation::Finite(0)
    }

    /// Normalized absolute value `p^(-v)`.
    pub fn abs(&self) -> f64 {
        match self.valuation {
            Valuation::Infinite => 0.0,
            Valuation::Finite(v) => (self.prime as f64).powi(-(v as i32)),
        }
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.prime == other.prime {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// Multiplies by `p^k`; exact.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = self.clone();
        if let Valuation::Finite(v) = out.valuation {
            out.valuation = Valuation::Finite(v + k);
        }
        out
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let m = pow_u(self.prime, self.precision);
        let unit = (&m - &self.unit) % &m;
        PadicNumber { unit, ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let (va, vb) = match (self.valuation, other.valuation) {
            (Valuation::Infinite, _) => return Ok(other.clone()),
            (_, Valuation::Infinite) => return Ok(self.clone()),
            (Valuation::Finite(a), Valuation::Finite(b)) => (a, b),
        };
        let p = self.prime;
        let m = va.min(vb);
        let abs = (va + self.precision as i64).min(vb + other.precision as i64);
        let width = (abs - m) as u32;
        let modulus = pow_u(p, width);
        let sa = &self.unit * pow_u(p, (va - m) as u32);
        let sb = &other.unit * pow_u(p, (vb - m) as u32);
        let s = (sa + sb) % &modulus;
        if s.is_zero() {
            return Err(Error::PrecisionExhausted(format!(
                "sum vanishes modulo {p}^{abs}"
            )));
        }
        let k = ord_uint(&s, p) as u32;
        Ok(PadicNumber {
            prime: p,
            valuation: Valuation::Finite(m + k as i64),
            unit: s / pow_u(p, k),
            precision: width - k,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let (va, vb) = match (self.valuation, other.valuation) {
            (Valuation::Finite(a), Valuation::Finite(b)) => (a, b),
            _ => return Ok(Self::zero(self.prime)),
        };
        let precision = self.precision.min(other.precision);
        let unit = (&self.unit * &other.unit) % pow_u(self.prime, precision);
        Ok(PadicNumber {
            prime: self.prime,
            valuation: Valuation::Finite(va + vb),
            unit,
            precision,
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        let v = self
            .valuation
            .finite()
            .ok_or_else(|| Error::InvalidArgument("inverse of zero".into()))?;
        let m = pow_u(self.prime, self.precision);
        let unit = mod_inverse(&self.unit, &m).expect("unit part is invertible");
        Ok(PadicNumber {
            prime: self.prime,
            valuation: Valuation::Finite(-v),
            unit,
            precision: self.precision,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inverse()?)
    }

    /// The integer `unit * p^v mod p^digits` for an integral element, the
    /// standard representative of `self` modulo `p^digits`.
    pub fn residue(&self, digits: u32) -> Result<BigUint> {
        match self.valuation {
            Valuation::Infinite => Ok(BigUint::zero()),
            Valuation::Finite(v) if v < 0 => Err(Error::InvalidArgument(format!(
                "residue of a non-integral element (valuation {v})"
            ))),
            Valuation::Finite(v) => {
                if v >= digits as i64 {
                    return Ok(BigUint::zero());
                }
                if self.abs_precision().unwrap() < digits as i64 {
                    return Err(Error::PrecisionExhausted(format!(
                        "{} digits requested, {} known",
                        digits,
                        self.abs_precision().unwrap()
                    )));
                }
                Ok((&self.unit * pow_u(self.prime, v as u32)) % pow_u(self.prime, digits))
            }
        }
    }

    /// Compares valuations; zero is the largest.
    pub fn cmp_valuation(&self, other: &Self) -> Ordering {
        self.valuation.cmp(&other.valuation)
    }
}

fn check_precision(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("p-adic precision must be at least 1".into()))
    } else {
        Ok(())
    }
}

impl fmt::Display for PadicNumber {
    /// `unit*p^v`, or `0` for exact zero. Precision is carried by the context.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.valuation {
            Valuation::Infinite => write!(f, "0"),
            Valuation::Finite(v) => write!(f, "{}*{}^{}", self.unit, self.prime, v),
        }
    }
}

/// Parses the `unit*p^v` form given the prime and relative precision.
pub fn parse_padic(s: &str, p: u64, precision: u32) -> Result<PadicNumber> {
    let s = s.trim();
    if s == "0" {
        return Ok(PadicNumber::zero(p));
    }
    let bad = || Error::Parse(format!("expected unit*p^v, got {s:?}"));
    let (unit, rest) = s.split_once('*').ok_or_else(bad)?;
    let (base, exp) = rest.split_once('^').ok_or_else(bad)?;
    let unit = BigUint::from_str(unit.trim()).map_err(|_| bad())?;
    let base: u64 = base.trim().parse().map_err(|_| bad())?;
    let v: i64 = exp.trim().parse().map_err(|_| bad())?;
    if base != p {
        return Err(Error::ContextMismatch);
    }
    require_prime(p)?;
    check_precision(precision)?;
    let unit = unit % pow_u(p, precision);
    if unit.is_zero() || ord_uint(&unit, p) != 0 {
        return Err(Error::Parse(format!("{s:?}: unit part divisible by {p}")));
    }
    Ok(PadicNumber {
        prime: p,
        valuation: Valuation::Finite(v),
        unit,
        precision,
    })
}

impl PadicNumber {
    /// Lossy conversion of a small integral element to `i64`, for display.
    pub fn to_i64_lossy(&self) -> Option<i64> {
        let v = self.valuation.finite()?;
        if v < 0 {
            return None;
        }
        (&self.unit * pow_u(self.prime, v as u32)).to_i64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ord_examples() {
        assert_eq!(ord_p(&q(12, 1), 2).unwrap(), Valuation::Finite(2));
        assert_eq!(ord_p(&q(0, 1), 5).unwrap(), Valuation::Infinite);
        assert_eq!(ord_p(&q(5, 8), 2).unwrap(), Valuation::Finite(-3));
        assert_eq!(ord_p(&q(12, 1), 4), Err(Error::NotPrime(4)));
        assert_eq!(ord_p(&q(12, 1), 1), Err(Error::NotPrime(1)));
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(1_000_000_007), Some((1_000_000_007, 1)));
    }

    #[test]
    fn abs_examples() {
        assert_eq!(PadicNumber::from_i64(2, 2, 10).unwrap().abs(), 0.5);
        let third = PadicNumber::from_rational(&q(1, 3), 3, 10).unwrap();
        assert_eq!(third.abs(), 3.0);
        assert_eq!(PadicNumber::from_i64(7, 5, 10).unwrap().abs(), 1.0);
        assert_eq!(PadicNumber::zero(5).abs(), 0.0);
    }

    #[test]
    fn cancellation_is_detected() {
        let a = PadicNumber::from_i64(5, 5, 3).unwrap();
        let b = PadicNumber::from_i64(5 + 5i64.pow(4), 5, 3).unwrap();
        // equal to three relative digits: difference invisible
        assert!(matches!(a.sub(&b), Err(Error::PrecisionExhausted(_))));
        let c = PadicNumber::from_i64(5 + 5i64.pow(2), 5, 3).unwrap();
        let d = a.sub(&c).unwrap();
        assert_eq!(d.valuation(), Valuation::Finite(2));
        assert_eq!(d.precision(), 2);
    }

    #[test]
    fn rational_round_trip() {
        let x = PadicNumber::from_rational(&q(2, 3), 5, 8).unwrap();
        let three = PadicNumber::from_i64(3, 5, 8).unwrap();
        let back = x.mul(&three).unwrap();
        assert_eq!(back, PadicNumber::from_i64(2, 5, 8).unwrap());
        assert_eq!(x.inverse().unwrap().mul(&x).unwrap(), PadicNumber::one(5, 8));
    }

    #[test]
    fn display_and_parse() {
        let x = PadicNumber::from_i64(12, 2, 6).unwrap();
        assert_eq!(x.to_string(), "3*2^2");
        assert_eq!(parse_padic("3*2^2", 2, 6).unwrap(), x);
        assert!(parse_padic("4*2^2", 2, 6).is_err());
        assert!(parse_padic("3*3^2", 2, 6).is_err());
        assert_eq!(parse_padic("0", 2, 6).unwrap(), PadicNumber::zero(2));
    }

    #[test]
    fn residues() {
        let x = PadicNumber::from_residue(&BigUint::from(20u32), 2, 8).unwrap();
        assert_eq!(x.valuation(), Valuation::Finite(2));
        assert_eq!(x.precision(), 6);
        assert_eq!(x.residue(8).unwrap(), BigUint::from(20u32));
        assert!(PadicNumber::from_residue(&BigUint::from(256u32), 2, 8)
            .unwrap()
            .is_zero());
    }

    proptest! {
        #[test]
        fn valuation_is_additive_and_ultrametric(
            a in -100_000i64..100_000,
            b in -100_000i64..100_000,
            pi in 0usize..5,
        ) {
            let p = [2u64, 3, 5, 7, 11][pi];
            let oa = ord_p_int(&a.into(), p).unwrap();
            let ob = ord_p_int(&b.into(), p).unwrap();
            let oab = ord_p_int(&(BigInt::from(a) * b), p).unwrap();
            match (oa, ob) {
                (Valuation::Finite(x), Valuation::Finite(y)) => {
                    prop_assert_eq!(oab, Valuation::Finite(x + y))
                }
                _ => prop_assert_eq!(oab, Valuation::Infinite),
            }
            let osum = ord_p_int(&BigInt::from(a + b), p).unwrap();
            prop_assert!(osum >= oa.min(ob));
            if oa != ob {
                prop_assert_eq!(osum, oa.min(ob));
            }
        }

        #[test]
        fn padic_ops_match_integer_ops(
            a in 1i64..1_000_000,
            b in 1i64..1_000_000,
            pi in 0usize..3,
        ) {
            let p = [2u64, 3, 5][pi];
            let n = 40;
            let pa = PadicNumber::from_i64(a, p, n).unwrap();
            let pb = PadicNumber::from_i64(b, p, n).unwrap();
            prop_assert_eq!(pa.mul(&pb).unwrap(), PadicNumber::from_i64(a * b, p, n).unwrap());
            if a != b {
                let d = pa.sub(&pb).unwrap();
                prop_assert_eq!(d.valuation(), ord_p_int(&BigInt::from(a - b), p).unwrap());
            }
        }
    }
}
