//! Closed-form lower and upper bounds for heights in fields with prescribed
//! local splitting.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::equilibrium::zeta3;
use crate::error::{Error, Result};
use crate::metric::LogMultiple;
use crate::padic::{pow_u, prime_power, require_prime};

/// A rational place of Q: a prime or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" | "infinity" => Ok(Place::Infinite),
            t => {
                let p: u64 = t
                    .parse()
                    .map_err(|_| Error::InvalidPlace(format!("{t:?} is neither a prime nor inf")))?;
                require_prime(p)?;
                Ok(Place::Finite(p))
            }
        }
    }
}

/// A place `v` of the base field together with the local data of the
/// extension `L_v / K_v` prescribed there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlaceSpec {
    pub place: Place,
    /// `[K_v : Q_v] / [K : Q]`.
    #[serde(serialize_with = "ser_rational")]
    pub local_degree: BigRational,
    /// Residue field size of `K_v`; finite places only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residue_size: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inertia: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ramification: Option<u32>,
}

fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

fn check_local_degree(n: &BigRational) -> Result<()> {
    if n.is_zero() || n < &BigRational::zero() || n > &BigRational::one() {
        return Err(Error::InvalidPlace(format!("local degree {n} outside (0, 1]")));
    }
    Ok(())
}

impl PlaceSpec {
    pub fn finite(
        p: u64,
        local_degree: BigRational,
        q: u64,
        ramification: u32,
        inertia: u32,
    ) -> Result<Self> {
        require_prime(p)?;
        check_local_degree(&local_degree)?;
        match prime_power(q) {
            Some((base, _)) if base == p => {}
            _ => return Err(Error::InvalidPlace(format!("q = {q} is not a power of {p}"))),
        }
        if ramification == 0 || inertia == 0 {
            return Err(Error::InvalidPlace("e and f must be at least 1".into()));
        }
        Ok(PlaceSpec {
            place: Place::Finite(p),
            local_degree,
            residue_size: Some(q),
            inertia: Some(inertia),
            ramification: Some(ramification),
        })
    }

    /// `Q_p` itself: `N = 1`, `q = p`, `e = f = 1`.
    pub fn rational_prime(p: u64) -> Result<Self> {
        Self::finite(p, BigRational::one(), p, 1, 1)
    }

    pub fn archimedean(local_degree: BigRational) -> Result<Self> {
        check_local_degree(&local_degree)?;
        Ok(PlaceSpec {
            place: Place::Infinite,
            local_degree,
            residue_size: None,
            inertia: None,
            ramification: None,
        })
    }

    /// The real place of Q with `L_v = R`.
    pub fn real() -> Self {
        Self::archimedean(BigRational::one()).expect("1 is a valid local degree")
    }

    pub fn for_place(place: Place) -> Result<Self> {
        match place {
            Place::Finite(p) => Self::rational_prime(p),
            Place::Infinite => Ok(Self::real()),
        }
    }

    /// The contribution of this place, exactly.
    pub fn exact_contribution(&self) -> ExactTerm {
        let n = &self.local_degree;
        match self.place {
            Place::Infinite => ExactTerm::Zeta3OverPi2 {
                coefficient: n * BigRational::new(7.into(), 4.into()),
            },
            Place::Finite(p) => {
                let q = self.residue_size.expect("finite place");
                let f = self.inertia.expect("finite place");
                let e = self.ramification.expect("finite place");
                let qf = BigInt::from(pow_u(q, f));
                let den = BigInt::from(2 * e as u64) * (&qf * &qf - 1);
                ExactTerm::LogPrime(LogMultiple {
                    prime: p,
                    coefficient: n * BigRational::new(qf, den),
                })
            }
        }
    }
}

impl fmt::Display for PlaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.residue_size, self.ramification, self.inertia) {
            (Some(q), Some(e), Some(fv)) => {
                write!(f, "{}(N={},q={},e={},f={})", self.place, self.local_degree, q, e, fv)
            }
            _ => write!(f, "{}(N={})", self.place, self.local_degree),
        }
    }
}

/// A bound term with an exact symbolic form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExactTerm {
    /// `coefficient * log p`.
    LogPrime(LogMultiple),
    /// `coefficient * zeta(3) / pi^2`.
    Zeta3OverPi2 {
        #[serde(serialize_with = "ser_rational")]
        coefficient: BigRational,
    },
}

impl ExactTerm {
    pub fn value(&self) -> f64 {
        match self {
            ExactTerm::LogPrime(l) => l.value(),
            ExactTerm::Zeta3OverPi2 { coefficient } => {
                coefficient.to_f64().unwrap_or(f64::NAN) * zeta3()
                    / (std::f64::consts::PI * std::f64::consts::PI)
            }
        }
    }
}

impl fmt::Display for ExactTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactTerm::LogPrime(l) => write!(f, "{l}"),
            ExactTerm::Zeta3OverPi2 { coefficient } => write!(f, "{coefficient}*zeta(3)/pi^2"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundTerm {
    pub place: PlaceSpec,
    pub value: f64,
    pub exact: ExactTerm,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub contributions: Vec<BoundTerm>,
    pub total: f64,
    /// Over the finite primes of `S`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bombieri_zannier: Option<f64>,
    /// When `S` contains the real place.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schinzel: Option<f64>,
    /// When `S` consists of finite primes only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
}

/// Checks `sum N_v <= 1` over the places above each rational place.
pub fn validate_places(places: &[PlaceSpec]) -> Result<()> {
    if places.is_empty() {
        return Err(Error::EmptyPlaceSet);
    }
    let mut totals: BTreeMap<Place, BigRational> = BTreeMap::new();
    for s in places {
        *totals.entry(s.place).or_insert_with(BigRational::zero) += &s.local_degree;
    }
    for (place, total) in totals {
        if total > BigRational::one() {
            return Err(Error::InvalidPlace(format!(
                "local degrees above {place} sum to {total} > 1"
            )));
        }
    }
    Ok(())
}

fn finite_primes(places: &[PlaceSpec]) -> Vec<u64> {
    let mut ps: Vec<u64> = places
        .iter()
        .filter_map(|s| match s.place {
            Place::Finite(p) => Some(p),
            Place::Infinite => None,
        })
        .collect();
    ps.sort_unstable();
    ps.dedup();
    ps
}

/// `sum_{v finite} (N_v/2) q^f log p / (e (q^{2f} - 1)) + sum_{v | inf} N_v 7 zeta(3) / (4 pi^2)`.
pub fn general_bound(places: &[PlaceSpec]) -> Result<BoundReport> {
    validate_places(places)?;
    let contributions: Vec<BoundTerm> = places
        .iter()
        .map(|s| {
            let exact = s.exact_contribution();
            BoundTerm { place: s.clone(), value: exact.value(), exact }
        })
        .collect();
    let total = contributions.iter().map(|t| t.value).sum();
    let primes = finite_primes(places);
    let has_arch = places.iter().any(|s| s.place == Place::Infinite);
    Ok(BoundReport {
        contributions,
        total,
        bombieri_zannier: (!primes.is_empty()).then(|| bz_sum(&primes)),
        schinzel: has_arch.then(schinzel_bound),
        upper: (!has_arch && !primes.is_empty()).then(|| upper_sum(&primes)),
    })
}

fn check_primes(s: &[u64]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptyPlaceSet);
    }
    s.iter().try_for_each(|&p| require_prime(p))
}

fn bz_sum(s: &[u64]) -> f64 {
    s.iter().map(|&p| (p as f64).ln() / (p as f64 + 1.0)).sum::<f64>() / 2.0
}

fn upper_sum(s: &[u64]) -> f64 {
    s.iter().map(|&p| (p as f64).ln() / (p as f64 - 1.0)).sum()
}

/// `(1/2) sum_{p in S} log p / (p + 1)`.
pub fn bombieri_zannier_bound(s: &[u64]) -> Result<f64> {
    check_primes(s)?;
    Ok(bz_sum(s))
}

/// Rejects infinity in a set that must consist of primes.
pub fn primes_only(s: &[Place]) -> Result<Vec<u64>> {
    s.iter()
        .map(|p| match p {
            Place::Finite(p) => Ok(*p),
            Place::Infinite => Err(Error::InvalidPlace("infinity is not allowed here".into())),
        })
        .collect()
}

/// `(1/2) log((1 + sqrt 5) / 2)`.
pub fn schinzel_bound() -> f64 {
    0.5 * ((1.0 + 5f64.sqrt()) / 2.0).ln()
}

/// `sum_{p in S} log p / (p - 1)`.
pub fn totp_upper_bound(s: &[u64]) -> Result<f64> {
    check_primes(s)?;
    Ok(upper_sum(s))
}

/// `(1/2) sum_{p in S} log p / (p - 1)`.
pub fn integer_bound(s: &[u64]) -> Result<f64> {
    check_primes(s)?;
    Ok(upper_sum(s) / 2.0)
}
