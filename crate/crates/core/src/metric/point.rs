use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{require_prime, PadicNumber, Valuation};

/// Ground field of a point: R or C with the usual absolute value, or Q_p
/// with digits carried to a working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldContext {
    Archimedean,
    Padic { prime: u64, precision: u32 },
}

impl FieldContext {
    pub fn padic(prime: u64, precision: u32) -> Result<Self> {
        require_prime(prime)?;
        if precision == 0 {
            return Err(Error::InvalidArgument("precision must be at least 1".into()));
        }
        Ok(FieldContext::Padic { prime, precision })
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            FieldContext::Archimedean => None,
            FieldContext::Padic { prime, .. } => Some(*prime),
        }
    }

    /// Two contexts are compatible when they describe the same field;
    /// working precision may differ.
    pub fn compatible(&self, other: &Self) -> bool {
        self.prime() == other.prime()
    }
}

impl fmt::Display for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldContext::Archimedean => write!(f, "R"),
            FieldContext::Padic { prime, precision } => write!(f, "Q_{prime} (N={precision})"),
        }
    }
}

/// A point `(x0 : x1)` of P^1, standing for `x0/x1`, so `(1 : 0)` is infinity.
///
/// Points are kept in a canonical chart form: one coordinate is exactly `1`
/// and the other has absolute value at most `1`. In particular
/// `max(|x0|, |x1|) = 1` always holds, and two points are equal iff their
/// stored coordinates are equal.
#[derive(Clone, Debug, PartialEq)]
pub enum ProjectivePoint {
    Archimedean { x0: Complex64, x1: Complex64 },
    Padic { x0: PadicNumber, x1: PadicNumber },
}

impl ProjectivePoint {
    pub fn archimedean(x0: Complex64, x1: Complex64) -> Result<Self> {
        let (a0, a1) = (x0.norm(), x1.norm());
        if !(a0.is_finite() && a1.is_finite()) || (a0 == 0.0 && a1 == 0.0) {
            return Err(Error::DegeneratePoint);
        }
        let one = Complex64::new(1.0, 0.0);
        Ok(if a1 >= a0 {
            ProjectivePoint::Archimedean { x0: x0 / x1, x1: one }
        } else {
            ProjectivePoint::Archimedean { x0: one, x1: x1 / x0 }
        })
    }

    /// The real number `x`, as `(x : 1)` or `(1 : 1/x)`.
    pub fn real(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::DegeneratePoint);
        }
        Self::archimedean(Complex64::new(x, 0.0), Complex64::new(1.0, 0.0))
    }

    /// `(1 : w)` for real `|w| <= 1`: the point `1/w`, infinity when `w = 0`.
    pub fn real_inverse(w: f64) -> Result<Self> {
        Self::archimedean(Complex64::new(1.0, 0.0), Complex64::new(w, 0.0))
    }

    pub fn complex(z: Complex64) -> Result<Self> {
        Self::archimedean(z, Complex64::new(1.0, 0.0))
    }

    pub fn archimedean_infinity() -> Self {
        ProjectivePoint::Archimedean {
            x0: Complex64::new(1.0, 0.0),
            x1: Complex64::new(0.0, 0.0),
        }
    }

    pub fn padic(x0: PadicNumber, x1: PadicNumber) -> Result<Self> {
        if x0.prime() != x1.prime() {
            return Err(Error::ContextMismatch);
        }
        if x0.is_zero() && x1.is_zero() {
            return Err(Error::DegeneratePoint);
        }
        let p = x0.prime();
        let Some(precision) = chart_precision(&x0, &x1) else {
            return Err(Error::DegeneratePoint);
        };
        let one = PadicNumber::one(p, precision.max(1));
        Ok(if x1.valuation() <= x0.valuation() {
            ProjectivePoint::Padic { x0: x0.div(&x1)?, x1: one }
        } else {
            ProjectivePoint::Padic { x0: one, x1: x1.div(&x0)? }
        })
    }

    /// The p-adic integer-or-rational `n` as `(n : 1)`.
    pub fn padic_integer(n: i64, p: u64, precision: u32) -> Result<Self> {
        Self::padic(
            PadicNumber::from_integer(&BigInt::from(n), p, precision)?,
            PadicNumber::one(p, precision),
        )
    }

    pub fn padic_infinity(p: u64, precision: u32) -> Result<Self> {
        require_prime(p)?;
        Ok(ProjectivePoint::Padic {
            x0: PadicNumber::one(p, precision),
            x1: PadicNumber::zero(p),
        })
    }

    pub fn context(&self) -> FieldContext {
        match self {
            ProjectivePoint::Archimedean { .. } => FieldContext::Archimedean,
            ProjectivePoint::Padic { x0, x1 } => FieldContext::Padic {
                prime: x0.prime(),
                precision: x0.precision().max(x1.precision()),
            },
        }
    }

    /// For real points, the affine coordinate (`inf` at infinity).
    pub fn to_real(&self) -> Option<f64> {
        match self {
            ProjectivePoint::Archimedean { x0, x1 } if x0.im == 0.0 && x1.im == 0.0 => {
                Some(if x1.re == 0.0 { f64::INFINITY } else { x0.re / x1.re })
            }
            _ => None,
        }
    }

    /// `Some(true)` when the point lies in the unit ball chart `(a : 1)`.
    pub fn is_finite_chart(&self) -> bool {
        match self {
            ProjectivePoint::Archimedean { x1, .. } => *x1 == Complex64::new(1.0, 0.0),
            ProjectivePoint::Padic { x1, .. } => x1.valuation() == Valuation::Finite(0)
                && x1.unit() == &num_bigint::BigUint::from(1u32),
        }
    }
}

/// Precision for the unit coordinate of a canonical point: the absolute
/// precision the quotient is known to.
fn chart_precision(x0: &PadicNumber, x1: &PadicNumber) -> Option<u32> {
    let rel = match (x0.is_zero(), x1.is_zero()) {
        (true, true) => return None,
        (true, false) => x1.precision(),
        (false, true) => x0.precision(),
        (false, false) => x0.precision().min(x1.precision()),
    };
    Some(rel)
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectivePoint::Archimedean { x0, x1 } => write!(f, "({x0} : {x1})"),
            ProjectivePoint::Padic { x0, x1 } => write!(f, "({x0} : {x1})"),
        }
    }
}

/// A 2x2 matrix acting on homogeneous coordinates:
/// `(x0 : x1) -> (a x0 + b x1 : c x0 + d x1)`, i.e. `z -> (az + b)/(cz + d)`.
#[derive(Clone, Debug, PartialEq)]
pub enum MobiusMap {
    Archimedean([[Complex64; 2]; 2]),
    Padic([[PadicNumber; 2]; 2]),
}

impl MobiusMap {
    pub fn archimedean(m: [[f64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularMatrix);
        }
        let c = |x: f64| Complex64::new(x, 0.0);
        Ok(MobiusMap::Archimedean([
            [c(m[0][0]), c(m[0][1])],
            [c(m[1][0]), c(m[1][1])],
        ]))
    }

    /// An integer matrix read in Q_p at the given precision.
    pub fn padic_from_integers(m: [[i64; 2]; 2], p: u64, precision: u32) -> Result<Self> {
        let det = m[0][0] as i128 * m[1][1] as i128 - m[0][1] as i128 * m[1][0] as i128;
        if det == 0 {
            return Err(Error::SingularMatrix);
        }
        let e = |x: i64| PadicNumber::from_i64(x, p, precision);
        Ok(MobiusMap::Padic([
            [e(m[0][0])?, e(m[0][1])?],
            [e(m[1][0])?, e(m[1][1])?],
        ]))
    }

    /// In the p-adic case: all entries integral and the determinant a unit,
    /// i.e. the map lies in PGL_2(Z_p). Archimedean maps report `false`.
    pub fn is_integral_unimodular(&self) -> Result<bool> {
        match self {
            MobiusMap::Archimedean(_) => Ok(false),
            MobiusMap::Padic(m) => {
                let integral = m
                    .iter()
                    .flatten()
                    .all(|e| e.valuation() >= Valuation::Finite(0));
                let det = m[0][0].mul(&m[1][1])?.sub(&m[0][1].mul(&m[1][0])?)?;
                Ok(integral && det.valuation() == Valuation::Finite(0))
            }
        }
    }

    pub fn apply(&self, x: &ProjectivePoint) -> Result<ProjectivePoint> {
        match (self, x) {
            (MobiusMap::Archimedean(m), ProjectivePoint::Archimedean { x0, x1 }) => {
                ProjectivePoint::archimedean(
                    m[0][0] * x0 + m[0][1] * x1,
                    m[1][0] * x0 + m[1][1] * x1,
                )
            }
            (MobiusMap::Padic(m), ProjectivePoint::Padic { x0, x1 }) => {
                if m[0][0].prime() != x0.prime() {
                    return Err(Error::ContextMismatch);
                }
                let y0 = m[0][0].mul(x0)?.add(&m[0][1].mul(x1)?)?;
                let y1 = m[1][0].mul(x0)?.add(&m[1][1].mul(x1)?)?;
                ProjectivePoint::padic(y0, y1)
            }
            _ => Err(Error::ContextMismatch),
        }
    }
}
