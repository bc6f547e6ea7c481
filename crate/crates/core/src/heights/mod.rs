//! Weil heights of algebraic numbers given by squarefree integer
//! polynomials, and their decomposition into local discrepancies.

mod roots;
mod search;

pub use roots::{
    certified_roots, complex_roots, is_totally_real, sturm_real_roots, sturm_sequence,
    CertifiedRoots, CERTIFIED_RADIUS,
};
pub use search::{search_l_s, SearchConfig, SearchHit, SearchReport};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::bounds::Place;
use crate::error::{Error, Result};
use crate::metric::{LogMultiple, PointSet, ProjectivePoint};
use crate::padic::{
    is_prime, is_totally_split, newton_polygon, ord_int_unchecked, projective_roots,
    require_prime,
};
use crate::poly::IntPolynomial;

/// Trial-division limit used when collecting the primes dividing `a * disc`.
pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

fn log_plus(z: Complex64) -> f64 {
    z.norm().ln().max(0.0)
}

fn require_degree(f: &IntPolynomial, min: usize) -> Result<()> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.degree() < min {
        return Err(Error::DegreeTooSmall { got: f.degree(), min });
    }
    Ok(())
}

/// `(1/n) (log|a| + sum log+ |alpha_i|)` for the primitive part of `f`.
pub fn weil_height(f: &IntPolynomial) -> Result<f64> {
    require_degree(f, 1)?;
    let g = f.primitive_part();
    let roots = complex_roots(&g)?;
    Ok(height_from_roots(&g, &roots))
}

fn height_from_roots(g: &IntPolynomial, roots: &[Complex64]) -> f64 {
    let a = g.leading().abs().to_f64().unwrap_or(f64::INFINITY).ln();
    let s: f64 = roots.iter().map(|z| log_plus(*z)).sum();
    ((a + s) / roots.len() as f64).max(0.0)
}

/// A local discrepancy `D_v`; finite places carry the exact coefficient of
/// `log p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalDiscrepancyReport {
    pub place: Place,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<LogMultiple>,
}

/// `(1/(n(n-1))) sum_{i != j} [-log|a_i - a_j| + log+|a_i| + log+|a_j|]` over
/// the complex roots.
pub fn local_discrepancy_arch(f: &IntPolynomial) -> Result<LocalDiscrepancyReport> {
    require_degree(f, 2)?;
    let roots = complex_roots(f)?;
    Ok(LocalDiscrepancyReport {
        place: Place::Infinite,
        value: arch_from_roots(&roots),
        exact: None,
    })
}

fn arch_from_roots(roots: &[Complex64]) -> f64 {
    let n = roots.len();
    let mut pairs = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            pairs -= (roots[i] - roots[j]).norm().ln();
        }
    }
    let lp: f64 = roots.iter().map(|z| log_plus(*z)).sum();
    (2.0 * pairs + 2.0 * (n - 1) as f64 * lp) / (n * (n - 1)) as f64
}

/// The same quantity as [`local_discrepancy_arch`], with the pair sum taken
/// from the discriminant instead of the root differences.
pub fn local_discrepancy_arch_via_disc(f: &IntPolynomial) -> Result<f64> {
    require_degree(f, 2)?;
    let n = f.degree();
    let roots = complex_roots(f)?;
    let disc = f.discriminant()?;
    let a = f.leading();
    // prod_{i != j} |a_i - a_j| = |disc| / |a|^(2n-2)
    let pairs = -(big_ln(&disc.abs()) - (2 * n - 2) as f64 * big_ln(&a.abs()));
    let lp: f64 = roots.iter().map(|z| log_plus(*z)).sum();
    Ok((pairs + 2.0 * (n - 1) as f64 * lp) / (n * (n - 1)) as f64)
}

fn big_ln(x: &BigInt) -> f64 {
    match x.to_f64() {
        Some(v) if v.is_finite() => v.ln(),
        _ => {
            let bits = x.bits();
            let shift = bits.saturating_sub(60);
            let top: BigInt = x >> shift;
            top.to_f64().expect("small").ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

/// Exact `D_p`, aggregated over the places above `p`:
/// `[(ord_p disc - (2n-2) ord_p a) + 2(n-1) S_p] / (n(n-1))` times `log p`,
/// with `S_p = sum_i max(0, -ord_p alpha_i)` read off the Newton polygon.
pub fn local_discrepancy_padic(f: &IntPolynomial, p: u64) -> Result<LocalDiscrepancyReport> {
    require_prime(p)?;
    require_degree(f, 2)?;
    f.require_squarefree()?;
    let n = f.degree() as i64;
    let disc = f.discriminant()?;
    let od = ord_int_unchecked(&disc, p) as i64;
    let oa = ord_int_unchecked(&f.leading(), p) as i64;
    let s = newton_polygon(f, p)?.negative_valuation_mass();
    let s = BigRational::new(BigInt::from(*s.numer()), BigInt::from(*s.denom()));
    let nn = BigInt::from(n * (n - 1));
    let coefficient = BigRational::new(BigInt::from(od - (2 * n - 2) * oa), nn)
        + s * BigRational::new(2.into(), n.into());
    let exact = LogMultiple { prime: p, coefficient };
    Ok(LocalDiscrepancyReport { place: Place::Finite(p), value: exact.value(), exact: Some(exact) })
}

/// Distinct prime divisors of a nonzero integer: trial division up to
/// `trial_bound`, then a primality test on the cofactor. A cofactor that is
/// neither 1 nor a provable prime is an error, never silently dropped.
pub fn prime_divisors(n: &BigInt, trial_bound: u64) -> Result<Vec<u64>> {
    if n.is_zero() {
        return Err(Error::Factorization("zero has no finite factorization".into()));
    }
    let mut m: BigUint = n.abs().to_biguint().expect("nonnegative");
    let mut out = Vec::new();
    let mut d = 2u64;
    while d <= trial_bound {
        if BigUint::from(d) * BigUint::from(d) > m {
            break;
        }
        if (&m % d).is_zero() {
            out.push(d);
            while (&m % d).is_zero() {
                m /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m.is_one() {
        return Ok(out);
    }
    let exhausted = BigUint::from(d) * BigUint::from(d) > m;
    match m.to_u64() {
        Some(c) if exhausted || is_prime(c) => {
            out.push(c);
            out.sort_unstable();
            Ok(out)
        }
        _ => Err(Error::Factorization(format!(
            "cofactor {m} has no prime factor below {trial_bound} and is not a provable prime"
        ))),
    }
}

/// Primes at which `D_p` can be nonzero: those dividing `a * disc(f)`.
pub fn bad_primes(f: &IntPolynomial, trial_bound: u64) -> Result<Vec<u64>> {
    let g = f.primitive_part();
    prime_divisors(&(g.leading() * g.discriminant()?), trial_bound)
}

/// The two sides of `2 h = D_inf + sum_p D_p`.
#[derive(Clone, Debug, Serialize)]
pub struct ProductFormulaCheck {
    pub height: f64,
    pub archimedean: LocalDiscrepancyReport,
    pub finite: Vec<LocalDiscrepancyReport>,
    pub residual: f64,
}

pub fn verify_product_formula(f: &IntPolynomial) -> Result<ProductFormulaCheck> {
    verify_product_formula_with(f, DEFAULT_TRIAL_BOUND)
}

pub fn verify_product_formula_with(f: &IntPolynomial, trial_bound: u64) -> Result<ProductFormulaCheck> {
    require_degree(f, 2)?;
    let g = f.primitive_part();
    let roots = complex_roots(&g)?;
    let height = height_from_roots(&g, &roots);
    let archimedean = LocalDiscrepancyReport {
        place: Place::Infinite,
        value: arch_from_roots(&roots),
        exact: None,
    };
    let finite = bad_primes(&g, trial_bound)?
        .into_iter()
        .map(|p| local_discrepancy_padic(&g, p))
        .collect::<Result<Vec<_>>>()?;
    let sum = archimedean.value + finite.iter().map(|r| r.value).sum::<f64>();
    Ok(ProductFormulaCheck { height, archimedean, finite, residual: 2.0 * height - sum })
}

/// The roots of a polynomial that splits completely over Q_p, Hensel-lifted
/// to `precision` digits and assembled into a point set.
pub fn padic_root_pointset(f: &IntPolynomial, p: u64, precision: u32) -> Result<PointSet> {
    require_degree(f, 2)?;
    f.require_squarefree()?;
    if !is_totally_split(f, p)? {
        return Err(Error::InvalidArgument(format!("{f} does not split completely over Q_{p}")));
    }
    let pts = projective_roots(f, p, precision)?
        .iter()
        .map(|r| {
            let (x0, x1) = r.homogeneous();
            ProjectivePoint::padic(x0, x1)
        })
        .collect::<Result<Vec<_>>>()?;
    PointSet::new(pts)
}

fn positive_divisors(n: &BigInt) -> Result<Vec<u64>> {
    let n = n
        .abs()
        .to_u64()
        .ok_or_else(|| Error::Factorization(format!("leading coefficient {n} too large")))?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Irreducibility over Q. Every candidate factor `d prod_{i in I} (x - a_i)`
/// with `d | lc(f)` and `|I| <= n/2` is rounded to integers and tested by
/// exact division; a reported factorization is therefore always genuine.
pub fn is_irreducible(f: &IntPolynomial) -> Result<bool> {
    require_degree(f, 1)?;
    let g = f.primitive_part();
    let n = g.degree();
    if n == 1 {
        return Ok(true);
    }
    if g.coeff(0).is_zero() {
        return Ok(false);
    }
    let roots = complex_roots(&g)?;
    let divisors = positive_divisors(&g.leading())?;
    for k in 1..=n / 2 {
        for set in subsets(n, k) {
            let mut prod = vec![Complex64::new(1.0, 0.0)];
            for &i in &set {
                let mut next = vec![Complex64::new(0.0, 0.0); prod.len() + 1];
                for (j, c) in prod.iter().enumerate() {
                    next[j + 1] += c;
                    next[j] -= c * roots[i];
                }
                prod = next;
            }
            if prod.iter().any(|c| c.im.abs() > 1e-6 * c.norm().max(1.0)) {
                continue;
            }
            for &d in &divisors {
                let scaled: Vec<f64> = prod.iter().map(|c| c.re * d as f64).collect();
                if scaled.iter().any(|c| (c - c.round()).abs() > 1e-6 * c.abs().max(1.0)) {
                    continue;
                }
                let Some(h) = scaled
                    .iter()
                    .map(|c| BigInt::from_f64(c.round()))
                    .collect::<Option<Vec<_>>>()
                else {
                    continue;
                };
                let h = IntPolynomial::from_coeffs_unchecked(h);
                if h.degree() == k && g.div_exact(&h).is_some() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Euler's totient, for small arguments.
fn totient(m: u64) -> u64 {
    let mut n = m;
    let mut out = m;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            while n.is_multiple_of(d) {
                n /= d;
            }
            out -= out / d;
        }
        d += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// True iff the roots of the irreducible `f` are `0` or roots of unity,
/// i.e. `f` is `x` or a cyclotomic polynomial up to sign: exactly the
/// algebraic numbers of height zero.
pub fn is_zero_or_root_of_unity(f: &IntPolynomial) -> Result<bool> {
    require_degree(f, 1)?;
    let g = f.primitive_part();
    let n = g.degree() as u64;
    if n == 1 && g.coeff(0).is_zero() {
        return Ok(true);
    }
    if !g.leading().abs().is_one() {
        return Ok(false);
    }
    // phi(m) >= sqrt(m / 2), so phi(m) = n forces m <= 2 n^2
    for m in 1..=(2 * n * n).max(2) {
        if totient(m) != n {
            continue;
        }
        let mut c = vec![BigInt::zero(); m as usize + 1];
        c[0] = BigInt::from(-1);
        c[m as usize] = BigInt::one();
        if IntPolynomial::from_coeffs_unchecked(c).div_exact(&g).is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Whether a rational place splits `f` completely: real roots only at
/// infinity, `deg f` roots in P^1(Q_p) at a prime.
pub fn splits_at(f: &IntPolynomial, place: Place) -> Result<bool> {
    match place {
        Place::Infinite => is_totally_real(f),
        Place::Finite(p) => is_totally_split(f, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c).unwrap()
    }

    fn coef(r: &LocalDiscrepancyReport) -> BigRational {
        r.exact.as_ref().unwrap().coefficient.clone()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn height_examples() {
        assert!((weil_height(&poly(&[-2, 1])).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((weil_height(&poly(&[-1, 2])).unwrap() - 2f64.ln()).abs() < 1e-15);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let h = weil_height(&poly(&[-1, -1, 1])).unwrap();
        assert!((h - 0.5 * phi.ln()).abs() < 1e-12);
        assert!((h - 0.240_605_9).abs() < 1e-7);
        // content does not change the algebraic numbers
        assert!((weil_height(&poly(&[-4, 2])).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(weil_height(&poly(&[1, 1, 1])).unwrap().abs() < 1e-12);
    }

    #[test]
    fn archimedean_examples() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let d = local_discrepancy_arch(&poly(&[-1, -1, 1])).unwrap().value;
        assert!((d - (phi.ln() - 0.5 * 5f64.ln())).abs() < 1e-12);
        // roots +-i: one pair term -log 2 per ordered pair
        let d = local_discrepancy_arch(&poly(&[1, 0, 1])).unwrap().value;
        assert!((d + 2f64.ln()).abs() < 1e-12);
        let d = local_discrepancy_arch(&poly(&[0, -2, 1])).unwrap().value;
        assert!(d.abs() < 1e-12);
        assert!(local_discrepancy_arch(&poly(&[-2, 1])).is_err());
    }

    #[test]
    fn padic_examples() {
        let f = poly(&[-1, -1, 1]);
        assert_eq!(coef(&local_discrepancy_padic(&f, 5).unwrap()), q(1, 2));
        assert_eq!(coef(&local_discrepancy_padic(&f, 7).unwrap()), q(0, 1));
        assert_eq!(coef(&local_discrepancy_padic(&poly(&[-4, 0, 1]), 2).unwrap()), q(2, 1));
        assert_eq!(coef(&local_discrepancy_padic(&poly(&[1, 0, 1]), 2).unwrap()), q(1, 1));
        // roots 1/2 and 1/3 at p = 2: -log|1/2 - 1/3|_2 = -log 2 per ordered
        // pair, log+|1/2|_2 = log 2, log+|1/3|_2 = 0
        let f = poly(&[1, -5, 6]);
        let direct = q(1, 2) * q(-2 + 2, 1);
        assert_eq!(coef(&local_discrepancy_padic(&f, 2).unwrap()), direct);
        // at p = 3 the roles swap
        assert_eq!(coef(&local_discrepancy_padic(&f, 3).unwrap()), direct);
    }

    #[test]
    fn product_formula_examples() {
        for c in [&[-1, -1, 1][..], &[1, 0, 1], &[-2, 0, 0, 1], &[1, -5, 6], &[3, 1, 0, 7]] {
            let chk = verify_product_formula(&poly(c)).unwrap();
            assert!(chk.residual.abs() < 1e-9, "{c:?}: {}", chk.residual);
        }
        let chk = verify_product_formula(&poly(&[1, 0, 1])).unwrap();
        assert_eq!(chk.finite.len(), 1);
        assert!((chk.archimedean.value + 2f64.ln()).abs() < 1e-12);
        assert!(verify_product_formula(&poly(&[-2, 1])).is_err());
    }

    #[test]
    fn discriminant_route_matches_roots() {
        for c in [&[-1, -1, 1][..], &[1, -3, 0, 1], &[5, 0, -3, 2, 1], &[1, 1, 1, 1, 1]] {
            let f = poly(c);
            let a = local_discrepancy_arch(&f).unwrap().value;
            let b = local_discrepancy_arch_via_disc(&f).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn factoring() {
        assert_eq!(prime_divisors(&BigInt::from(-108), 100).unwrap(), vec![2, 3]);
        assert_eq!(prime_divisors(&BigInt::from(1_000_000_007u64 * 4), 100).unwrap(), vec![2, 1_000_000_007]);
        let big = BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64);
        assert!(matches!(prime_divisors(&big, 1000), Err(Error::Factorization(_))));
        let semi = BigInt::from(1_000_003u64 * 1_000_033);
        assert!(prime_divisors(&semi, 1000).is_err());
        assert_eq!(prime_divisors(&semi, 1_000_010).unwrap(), vec![1_000_003, 1_000_033]);
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&poly(&[-1, -1, 1])).unwrap());
        assert!(!is_irreducible(&poly(&[-1, 0, 1])).unwrap());
        assert!(!is_irreducible(&poly(&[2, 0, 3, 0, 1])).unwrap());
        assert!(is_irreducible(&poly(&[-2, 0, 0, 0, 1])).unwrap());
        assert!(!is_irreducible(&poly(&[-1, 0, 0, 0, 4])).unwrap());
        assert!(is_irreducible(&poly(&[-3, 1, 6])).unwrap());
        assert!(!is_irreducible(&poly(&[-1, 1, 6])).unwrap());
    }

    #[test]
    fn roots_of_unity() {
        assert!(is_zero_or_root_of_unity(&poly(&[0, 1])).unwrap());
        assert!(is_zero_or_root_of_unity(&poly(&[1, 1])).unwrap());
        assert!(is_zero_or_root_of_unity(&poly(&[1, -1, 1])).unwrap());
        assert!(is_zero_or_root_of_unity(&poly(&[1, 0, 0, 0, 1])).unwrap());
        assert!(!is_zero_or_root_of_unity(&poly(&[-1, -1, 1])).unwrap());
        assert!(!is_zero_or_root_of_unity(&poly(&[-2, 1])).unwrap());
    }

    #[test]
    fn hensel_pointset_matches_exact_discrepancy() {
        use crate::metric::discrepancy;
        for (c, p) in [(&[-17, 0, 1][..], 2u64), (&[6, -5, 1], 3), (&[-1, -1, 1], 11)] {
            let f = poly(c);
            let z = padic_root_pointset(&f, p, 32).unwrap();
            let d = discrepancy(&z).unwrap().exact.unwrap();
            assert_eq!(d, local_discrepancy_padic(&f, p).unwrap().exact.unwrap());
        }
        assert!(padic_root_pointset(&poly(&[-1, -1, 1]), 5, 32).is_err());
    }
}
