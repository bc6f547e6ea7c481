//! Root counting and Hensel lifting in Z_p and P^1(Q_p) over exact integers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;

use super::{ord_int_unchecked, pow_i, require_prime, PadicNumber};
use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

/// Divides out the largest power of `p` dividing every coefficient.
fn strip_p_content(f: &IntPolynomial, p: u64) -> IntPolynomial {
    let m = f
        .coeffs()
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| ord_int_unchecked(c, p))
        .min()
        .unwrap_or(0);
    if m == 0 {
        f.clone()
    } else {
        f.divide_exact_scalar(&pow_i(p, m as u32))
    }
}

/// Recursion budget for the residue-class descent: `ord_p(disc f) + 1`.
fn depth_bound(f: &IntPolynomial, p: u64) -> u32 {
    if f.degree() < 2 {
        return 1;
    }
    let disc = f.discriminant().expect("degree >= 2");
    ord_int_unchecked(&disc, p) as u32 + 1
}

/// `f(r + pX) / p^m` with `m` the minimal coefficient valuation.
fn zoom(f: &IntPolynomial, r: &BigInt, p: u64) -> IntPolynomial {
    let g = f.taylor_shift(r).scale_variable(&BigInt::from(p));
    strip_p_content(&g, p)
}

fn residues_to_try(p: u64, only_zero: bool) -> impl Iterator<Item = BigInt> {
    let end = if only_zero { 1 } else { p };
    (0..end).map(BigInt::from)
}

fn count_rec(
    f: &IntPolynomial,
    p: u64,
    only_zero: bool,
    depth: u32,
    max_depth: u32,
) -> Result<usize> {
    let pb = BigInt::from(p);
    let df = f.derivative();
    let mut count = 0;
    for r in residues_to_try(p, only_zero) {
        if !f.eval(&r).mod_floor(&pb).is_zero() {
            continue;
        }
        if !df.eval(&r).mod_floor(&pb).is_zero() {
            count += 1;
            continue;
        }
        if depth >= max_depth {
            return Err(Error::DepthExceeded(max_depth));
        }
        count += count_rec(&zoom(f, &r, p), p, false, depth + 1, max_depth)?;
    }
    Ok(count)
}

/// Number of roots of a squarefree `f` in Z_p, counted exactly.
///
/// Simple roots modulo `p` lift uniquely (Hensel); a multiple root `r`
/// modulo `p` is resolved by recursing on `f(r + pX) / p^m`.
pub fn count_roots_zp(f: &IntPolynomial, p: u64) -> Result<usize> {
    require_prime(p)?;
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    f.require_squarefree()?;
    let g = strip_p_content(f, p);
    count_rec(&g, p, false, 0, depth_bound(&g, p))
}

fn count_in_pzp(f: &IntPolynomial, p: u64) -> Result<usize> {
    let g = strip_p_content(f, p);
    count_rec(&g, p, true, 0, depth_bound(&g, p))
}

/// True iff `f` has `deg f` roots in P^1(Q_p): its roots in Z_p together with
/// the roots of `x^n f(1/x)` in pZ_p (the points near infinity).
pub fn is_totally_split(f: &IntPolynomial, p: u64) -> Result<bool> {
    let n = f.degree();
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if n == 0 {
        return Err(Error::DegreeTooSmall { got: 0, min: 1 });
    }
    let inner = count_roots_zp(f, p)?;
    if inner == n {
        return Ok(true);
    }
    let outer = count_in_pzp(&f.reversed(), p)?;
    Ok(inner + outer == n)
}

fn hensel_lift(f: &IntPolynomial, df: &IntPolynomial, r: &BigInt, p: u64, prec: u32) -> BigInt {
    let mut x = r.clone();
    let mut k = 1u32;
    while k < prec {
        k = (2 * k).min(prec);
        let m = pow_i(p, k);
        let fx = f.eval(&x).mod_floor(&m);
        let dfx = df.eval(&x).mod_floor(&m);
        let inv = dfx.extended_gcd(&m).x.mod_floor(&m);
        x = (x - fx * inv).mod_floor(&m);
    }
    x.mod_floor(&pow_i(p, prec))
}

fn roots_rec(
    f: &IntPolynomial,
    p: u64,
    prec: u32,
    only_zero: bool,
    depth: u32,
    max_depth: u32,
) -> Result<Vec<BigInt>> {
    let pb = BigInt::from(p);
    let df = f.derivative();
    let mut out = Vec::new();
    for r in residues_to_try(p, only_zero) {
        if !f.eval(&r).mod_floor(&pb).is_zero() {
            continue;
        }
        if !df.eval(&r).mod_floor(&pb).is_zero() {
            out.push(hensel_lift(f, &df, &r, p, prec));
            continue;
        }
        if depth >= max_depth {
            return Err(Error::DepthExceeded(max_depth));
        }
        let g = zoom(f, &r, p);
        // roots of g: precision drops by one digit per zoom
        let sub = if prec > 1 {
            roots_rec(&g, p, prec - 1, false, depth + 1, max_depth)?
        } else {
            // at least one root of g mod p means roots of f collide here
            let n = count_rec(&g, p, false, depth + 1, max_depth)?;
            if n > 0 {
                return Err(Error::PrecisionExhausted(format!(
                    "roots agree to every one of the requested digits modulo {p}"
                )));
            }
            Vec::new()
        };
        let m = pow_i(p, prec);
        out.extend(sub.into_iter().map(|x| (&r + &pb * x).mod_floor(&m)));
    }
    Ok(out)
}

/// Roots of a squarefree `f` in Z_p as residues modulo `p^prec`, in
/// increasing order of their residue.
pub fn roots_in_zp(f: &IntPolynomial, p: u64, prec: u32) -> Result<Vec<BigUint>> {
    require_prime(p)?;
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if prec == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    f.require_squarefree()?;
    let g = strip_p_content(f, p);
    let mut roots: Vec<BigUint> = roots_rec(&g, p, prec, false, 0, depth_bound(&g, p))?
        .into_iter()
        .map(|x| x.to_biguint().expect("reduced residue"))
        .collect();
    roots.sort();
    Ok(roots)
}

/// Where a root of `f` in P^1(Q_p) sits: inside Z_p as `(alpha : 1)`, or
/// outside as `(1 : beta)` with `beta = 1/alpha` in pZ_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootLocation {
    Integral(PadicNumber),
    NearInfinity(PadicNumber),
}

impl RootLocation {
    /// Homogeneous coordinates `(x0, x1)` with the point equal to `x0/x1`.
    pub fn homogeneous(&self) -> (PadicNumber, PadicNumber) {
        match self {
            RootLocation::Integral(a) => (a.clone(), PadicNumber::one(a.prime(), prec_of(a))),
            RootLocation::NearInfinity(b) => (PadicNumber::one(b.prime(), prec_of(b)), b.clone()),
        }
    }
}

fn prec_of(x: &PadicNumber) -> u32 {
    x.abs_precision().map(|a| a.max(1) as u32).unwrap_or(1)
}

fn residue_to_padic(
    r: &BigUint,
    poly_at_zero_vanishes: bool,
    p: u64,
    prec: u32,
) -> Result<PadicNumber> {
    if r.is_zero() && !poly_at_zero_vanishes {
        return Err(Error::PrecisionExhausted(format!(
            "root is divisible by {p}^{prec}"
        )));
    }
    PadicNumber::from_residue(r, p, prec)
}

/// All roots of `f` in P^1(Q_p), Hensel-lifted to `prec` absolute digits in
/// their chart. Fails with [`Error::PrecisionExhausted`] when two roots
/// cannot be separated at that precision.
pub fn projective_roots(f: &IntPolynomial, p: u64, prec: u32) -> Result<Vec<RootLocation>> {
    let inner = roots_in_zp(f, p, prec)?;
    let zero_is_root = f.coeff(0).is_zero();
    let mut out = Vec::with_capacity(f.degree());
    for r in &inner {
        out.push(RootLocation::Integral(residue_to_padic(r, zero_is_root, p, prec)?));
    }
    let rev = strip_p_content(&f.reversed(), p);
    if rev.degree() >= 1 {
        let outer = roots_rec(&rev, p, prec, true, 0, depth_bound(&rev, p))?;
        let mut outer: Vec<BigUint> = outer
            .into_iter()
            .map(|x| x.to_biguint().expect("reduced residue"))
            .collect();
        outer.sort();
        for r in &outer {
            out.push(RootLocation::NearInfinity(residue_to_padic(r, false, p, prec)?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Valuation;
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c).unwrap()
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_roots_zp(&poly(&[0, -1, 1]), 7).unwrap(), 2);
        assert_eq!(count_roots_zp(&poly(&[1, 0, 1]), 5).unwrap(), 2);
        assert_eq!(count_roots_zp(&poly(&[-1, -1, 1]), 5).unwrap(), 0);
        assert_eq!(count_roots_zp(&poly(&[1, 2, 1]), 5), Err(Error::NotSquarefree));
        assert_eq!(count_roots_zp(&poly(&[1, 1]), 9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn split_examples() {
        assert!(is_totally_split(&poly(&[-1, -1, 1]), 11).unwrap());
        assert!(!is_totally_split(&poly(&[-1, -1, 1]), 5).unwrap());
        assert!(!is_totally_split(&poly(&[1, 0, 1]), 3).unwrap());
        // roots 1/2 and 3 in Q_2: one of them lives near infinity
        assert!(is_totally_split(&poly(&[3, -7, 2]), 2).unwrap());
        // x^2 - 17 splits over Q_2 (17 = 1 mod 8) though it is inseparable mod 2
        assert!(is_totally_split(&poly(&[-17, 0, 1]), 2).unwrap());
        assert!(!is_totally_split(&poly(&[-5, 0, 1]), 2).unwrap());
    }

    #[test]
    fn lifted_roots_are_roots() {
        let f = poly(&[-17, 0, 1]);
        let roots = roots_in_zp(&f, 2, 20).unwrap();
        assert_eq!(roots.len(), 2);
        let m = pow_i(2, 20);
        for r in roots {
            let v = f.eval(&BigInt::from(r)).mod_floor(&m);
            // x^2 - 17 has derivative divisible by 2, so only 19 digits survive
            assert!(ord_int_unchecked(&v, 2) >= 19 || v.is_zero());
        }
    }

    #[test]
    fn projective_roots_cover_infinity() {
        let f = poly(&[3, -7, 2]);
        let roots = projective_roots(&f, 2, 16).unwrap();
        assert_eq!(roots.len(), 2);
        let outer: Vec<_> = roots
            .iter()
            .filter_map(|r| match r {
                RootLocation::NearInfinity(b) => Some(b.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(outer.len(), 1);
        assert_eq!(outer[0].valuation(), Valuation::Finite(1));
        assert_eq!(outer[0].to_i64_lossy(), Some(2));
    }

    #[test]
    fn exact_zero_root() {
        let roots = projective_roots(&poly(&[0, -1, 1]), 3, 10).unwrap();
        assert!(roots.contains(&RootLocation::Integral(PadicNumber::zero(3))));
    }

    /// Strong Hensel lemma oracle: a residue `x mod p^K` with
    /// `ord f(x) > 2 ord f'(x)` lies over a unique root, and two such residues
    /// lie over the same root iff `ord(x - y) > ord f'(x)`.
    fn brute_force_count(f: &IntPolynomial, p: u64, k: u32) -> usize {
        let m = pow_i(p, k);
        let df = f.derivative();
        let ord = |x: &BigInt| -> u64 {
            let r = x.mod_floor(&m);
            if r.is_zero() {
                k as u64
            } else {
                ord_int_unchecked(&r, p).min(k as u64)
            }
        };
        let mut reps: Vec<(BigInt, u64)> = Vec::new();
        let mut x = BigInt::zero();
        while x < m {
            let of = ord(&f.eval(&x));
            let od = ord(&df.eval(&x));
            if 2 * od < of && od < k as u64 {
                let same = reps.iter().any(|(y, oy)| ord(&(&x - y)) > *oy.min(&od));
                if !same {
                    reps.push((x.clone(), od));
                }
            }
            x += 1;
        }
        reps.len()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn count_matches_brute_force(
            c in proptest::collection::vec(-6i64..=6, 2..=5),
            pi in 0usize..4,
        ) {
            let p = [2u64, 3, 5, 7][pi];
            prop_assume!(*c.last().unwrap() != 0);
            let f = poly(&c);
            prop_assume!(f.is_squarefree());
            let g = strip_p_content(&f, p);
            let k = if g.degree() >= 2 {
                ord_int_unchecked(&g.discriminant().unwrap(), p) as u32 + 2
            } else {
                2
            };
            prop_assume!((p as f64).powi(k as i32) <= 200_000.0);
            prop_assert_eq!(count_roots_zp(&f, p).unwrap(), brute_force_count(&g, p, k));
        }

        #[test]
        fn distinct_roots_mod_p_imply_split(
            c in proptest::collection::vec(-20i64..=20, 2..=5),
            pi in 0usize..4,
        ) {
            let p = [3u64, 5, 7, 11][pi];
            let lead = *c.last().unwrap();
            prop_assume!(lead.rem_euclid(p as i64) != 0);
            let f = poly(&c);
            prop_assume!(f.is_squarefree());
            let pb = BigInt::from(p);
            let roots_mod_p = (0..p)
                .filter(|&r| f.eval(&BigInt::from(r)).mod_floor(&pb).is_zero())
                .count();
            let simple = (0..p).all(|r| {
                let r = BigInt::from(r);
                !f.eval(&r).mod_floor(&pb).is_zero()
                    || !f.derivative().eval(&r).mod_floor(&pb).is_zero()
            });
            if roots_mod_p == f.degree() && simple {
                prop_assert!(is_totally_split(&f, p).unwrap());
            }
        }
    }
}
