//! Dense univariate polynomials with big-integer coefficients.
//!
//! Coefficients are stored constant term first and kept trimmed, so the last
//! stored coefficient is always the (nonzero) leading coefficient. The zero
//! polynomial is the empty coefficient vector; it is only produced internally
//! (remainders, differences) and rejected by the public constructors.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<String>")]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Builds a polynomial from coefficients, constant term first. Trailing
    /// zeros are trimmed; an all-zero input is rejected.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        let p = Self::from_coeffs_unchecked(coeffs);
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(p)
    }

    pub fn from_i64s(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub(crate) fn from_coeffs_unchecked(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub(crate) fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub(crate) fn constant(c: BigInt) -> Self {
        Self::from_coeffs_unchecked(vec![c])
    }

    /// The monic linear polynomial `x - r`.
    pub fn linear_root(r: i64) -> Self {
        Self::from_coeffs_unchecked(vec![BigInt::from(-r), BigInt::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        Self::from_coeffs_unchecked(coeffs)
    }

    /// Gcd of the coefficients, nonnegative.
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Content-free part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        Self::from_coeffs_unchecked(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// `f(x + r)`.
    pub fn taylor_shift(&self, r: &BigInt) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &c[j + 1] * r;
                c[j] += t;
            }
        }
        Self::from_coeffs_unchecked(c)
    }

    /// `f(s * x)`.
    pub fn scale_variable(&self, s: &BigInt) -> Self {
        let mut pow = BigInt::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * &pow);
            pow *= s;
        }
        Self::from_coeffs_unchecked(out)
    }

    /// `x^n f(1/x)` with `n = deg f`. The result has lower degree when the
    /// constant term vanishes.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::from_coeffs_unchecked(c)
    }

    pub fn divide_exact_scalar(&self, d: &BigInt) -> Self {
        Self::from_coeffs_unchecked(self.coeffs.iter().map(|c| c / d).collect())
    }

    /// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) * a mod b`.
    pub fn pseudo_rem(&self, b: &Self) -> Self {
        assert!(!b.is_zero(), "pseudo-division by zero polynomial");
        if self.is_zero() || self.degree() < b.degree() {
            return self.clone();
        }
        let lb = b.leading();
        let db = b.degree();
        let mut r = self.coeffs.clone();
        let mut steps = self.degree() - db + 1;
        while r.len() > db && !r.is_empty() {
            let dr = r.len() - 1;
            let lr = r[dr].clone();
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (k, bc) in b.coeffs.iter().enumerate() {
                r[dr - db + k] -= &lr * bc;
            }
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
            steps -= 1;
        }
        if steps > 0 {
            let f = num_traits::pow(lb, steps);
            for c in r.iter_mut() {
                *c *= &f;
            }
        }
        Self::from_coeffs_unchecked(r)
    }

    /// Primitive gcd over Z[x], positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.primitive_part(), other.primitive_part())
        } else {
            (other.primitive_part(), self.primitive_part())
        };
        if b.is_zero() {
            return a;
        }
        loop {
            let r = a.pseudo_rem(&b);
            if r.is_zero() {
                return b;
            }
            if r.degree() == 0 {
                return Self::constant(BigInt::one());
            }
            a = b;
            b = r.primitive_part();
        }
    }

    pub fn is_squarefree(&self) -> bool {
        if self.degree() == 0 {
            return true;
        }
        self.gcd(&self.derivative()).degree() == 0
    }

    pub fn require_squarefree(&self) -> Result<()> {
        if self.is_squarefree() {
            Ok(())
        } else {
            Err(Error::NotSquarefree)
        }
    }

    /// Exact division by `d` in Z[x]; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.degree() < d.degree() {
            return None;
        }
        let ld = d.leading();
        let dd = d.degree();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); self.degree() - dd + 1];
        for i in (0..q.len()).rev() {
            let (qi, rem) = r[i + dd].div_rem(&ld);
            if !rem.is_zero() {
                return None;
            }
            for (k, dc) in d.coeffs.iter().enumerate() {
                r[i + k] -= &qi * dc;
            }
            q[i] = qi;
        }
        if r.iter().all(Zero::is_zero) {
            Some(Self::from_coeffs_unchecked(q))
        } else {
            None
        }
    }

    /// Resultant by the subresultant pseudo-remainder sequence.
    pub fn resultant(&self, other: &Self) -> BigInt {
        if self.is_zero() || other.is_zero() {
            return BigInt::zero();
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        let mut s = BigInt::one();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
            if a.degree() % 2 == 1 && b.degree() % 2 == 1 {
                s = -s;
            }
        }
        let ca = a.content();
        let cb = b.content();
        let t = num_traits::pow(ca.clone(), b.degree()) * num_traits::pow(cb.clone(), a.degree());
        a = a.divide_exact_scalar(&ca);
        b = b.divide_exact_scalar(&cb);
        if b.degree() == 0 {
            return s * t * num_traits::pow(b.leading(), a.degree());
        }
        let mut g = BigInt::one();
        let mut h = BigInt::one();
        loop {
            let delta = a.degree() - b.degree();
            if a.degree() % 2 == 1 && b.degree() % 2 == 1 {
                s = -s;
            }
            let r = a.pseudo_rem(&b);
            if r.is_zero() {
                return BigInt::zero();
            }
            let divisor = &g * num_traits::pow(h.clone(), delta);
            a = b;
            b = r.divide_exact_scalar(&divisor);
            g = a.leading();
            h = match delta {
                0 => h,
                1 => g.clone(),
                _ => num_traits::pow(g.clone(), delta) / num_traits::pow(h, delta - 1),
            };
            if b.degree() == 0 {
                break;
            }
        }
        let da = a.degree();
        let last = num_traits::pow(b.leading(), da) / num_traits::pow(h, da - 1);
        s * t * last
    }

    /// `(-1)^(n(n-1)/2) Res(f, f') / lead(f)`.
    pub fn discriminant(&self) -> Result<BigInt> {
        let n = self.degree();
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if n < 2 {
            return Err(Error::DegreeTooSmall { got: n, min: 2 });
        }
        let res = self.resultant(&self.derivative());
        let d = res / self.leading();
        Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
    }

    /// Sign-and-reversal canonical representative: the lexicographically
    /// smaller of `f` and `x^n f(1/x)` up to an overall sign making the
    /// leading coefficient positive. Only defined for nonzero constant term.
    pub fn canonical(&self) -> Self {
        let pos = |p: &Self| if p.leading().is_negative() { -p.clone() } else { p.clone() };
        let a = pos(self);
        if self.coeff(0).is_zero() {
            return a;
        }
        let b = pos(&self.reversed());
        if b.coeffs < a.coeffs {
            b
        } else {
            a
        }
    }
}

impl Neg for IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::from_coeffs_unchecked(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::from_coeffs_unchecked((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::from_coeffs_unchecked((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::from_coeffs_unchecked(out)
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    /// Comma-separated integers, constant term first: `"-1,-1,1"` is `x^2 - x - 1`.
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|e| Error::Parse(format!("coefficient {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }
}

impl TryFrom<Vec<i64>> for IntPolynomial {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::from_i64s(&v)
    }
}

impl From<IntPolynomial> for Vec<String> {
    fn from(p: IntPolynomial) -> Vec<String> {
        p.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl IntPolynomial {
    /// Comma-separated coefficient list, the inverse of `FromStr`.
    pub fn to_csv_string(&self) -> String {
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_mag = i == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c).unwrap()
    }

    #[test]
    fn discriminants() {
        assert_eq!(p(&[-1, -1, 1]).discriminant().unwrap(), BigInt::from(5));
        assert_eq!(p(&[1, 0, 1]).discriminant().unwrap(), BigInt::from(-4));
        assert_eq!(p(&[-2, 0, 0, 1]).discriminant().unwrap(), BigInt::from(-108));
        assert_eq!(p(&[1, -3, 0, 1]).discriminant().unwrap(), BigInt::from(81));
        // b^2 - 4ac with a non-monic leading coefficient
        assert_eq!(p(&[1, 5, 3]).discriminant().unwrap(), BigInt::from(13));
        assert!(matches!(p(&[1, 1]).discriminant(), Err(Error::DegreeTooSmall { .. })));
    }

    #[test]
    fn squarefree_detection() {
        assert!(p(&[-1, -1, 1]).is_squarefree());
        assert!(!p(&[1, 2, 1]).is_squarefree());
        let f = &p(&[-1, 1]) * &p(&[2, 0, 1]);
        assert!(f.is_squarefree());
        assert!(!(&f * &p(&[2, 0, 1])).is_squarefree());
    }

    #[test]
    fn parse_and_display() {
        let f: IntPolynomial = "-1, -1, 1".parse().unwrap();
        assert_eq!(f, p(&[-1, -1, 1]));
        assert_eq!(f.to_string(), "x^2 - x - 1");
        assert_eq!(p(&[0, -3, 0, 2]).to_string(), "2x^3 - 3x");
        assert!("0,0".parse::<IntPolynomial>().is_err());
        assert!("1,a".parse::<IntPolynomial>().is_err());
        assert_eq!(f.to_csv_string(), "-1,-1,1");
    }

    #[test]
    fn shift_scale_reverse() {
        let f = p(&[-1, -1, 1]);
        // f(3 + 5X) = 25X^2 + 25X + 5
        let g = f.taylor_shift(&BigInt::from(3)).scale_variable(&BigInt::from(5));
        assert_eq!(g, p(&[5, 25, 25]));
        assert_eq!(p(&[1, 2, 3]).reversed(), p(&[3, 2, 1]));
        assert_eq!(p(&[0, 2, 3]).reversed(), p(&[3, 2]));
    }

    #[test]
    fn exact_division() {
        let a = p(&[-1, 1]);
        let b = p(&[2, 0, 3]);
        let f = &a * &b;
        assert_eq!(f.div_exact(&b), Some(a.clone()));
        assert_eq!(f.div_exact(&p(&[1, 1])), None);
    }

    #[test]
    fn canonical_form_merges_sign_and_reversal() {
        let f = p(&[2, 3, -1]);
        let g = -p(&[-1, 3, 2]);
        assert_eq!(f.canonical(), g.canonical());
    }
}
