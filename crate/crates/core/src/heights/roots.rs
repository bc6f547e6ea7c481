//! Certified complex roots and exact real-root counting.

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

const MAX_ABERTH_ITERATIONS: usize = 1000;
const POLISH_STEPS: usize = 3;
/// Largest certified inclusion radius accepted, relative to `max(|z|, 1)`.
pub const CERTIFIED_RADIUS: f64 = 1e-12;

/// Error-free transformations for double-double arithmetic.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    fn from_big(c: &BigInt) -> Dd {
        let hi = c.to_f64().unwrap_or(f64::INFINITY);
        let lo = BigInt::from_f64(hi)
            .and_then(|b| (c - b).to_f64())
            .unwrap_or(0.0);
        Dd { hi, lo }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// `f(z)` and `f'(z)` by Horner's rule carried in double-double, for `z`
/// given exactly as a pair of doubles.
fn eval_dd(coeffs: &[Dd], z: Complex64) -> (Complex64, Complex64) {
    let zero = Dd { hi: 0.0, lo: 0.0 };
    let (mut pr, mut pi) = (zero, zero);
    let (mut dr, mut di) = (zero, zero);
    for c in coeffs.iter().rev() {
        // d = d z + p
        let ndr = dr.mul_f64(z.re).add(di.mul_f64(z.im).neg()).add(pr);
        let ndi = dr.mul_f64(z.im).add(di.mul_f64(z.re)).add(pi);
        dr = ndr;
        di = ndi;
        // p = p z + c
        let npr = pr.mul_f64(z.re).add(pi.mul_f64(z.im).neg()).add(*c);
        let npi = pr.mul_f64(z.im).add(pi.mul_f64(z.re));
        pr = npr;
        pi = npi;
    }
    (
        Complex64::new(pr.value(), pi.value()),
        Complex64::new(dr.value(), di.value()),
    )
}

/// Certified root approximations with their inclusion radii.
#[derive(Clone, Debug)]
pub struct CertifiedRoots {
    pub roots: Vec<Complex64>,
    /// Each disk `|z - roots[i]| <= radii[i]` contains exactly one root.
    pub radii: Vec<f64>,
}

/// All complex roots of a squarefree polynomial, by Aberth-Ehrlich
/// iteration polished with double-double Newton steps.
///
/// The result is certified with the inclusion disks `|z - z_i| <= n |W_i|`,
/// `W_i` the Weierstrass correction: pairwise disjoint disks each hold
/// exactly one root. Fails when any radius exceeds [`CERTIFIED_RADIUS`]
/// relative to `max(|z_i|, 1)` or when disks overlap.
pub fn complex_roots(f: &IntPolynomial) -> Result<Vec<Complex64>> {
    Ok(certified_roots(f)?.roots)
}

pub fn certified_roots(f: &IntPolynomial) -> Result<CertifiedRoots> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    f.require_squarefree()?;
    let n = f.degree();
    if n == 0 {
        return Ok(CertifiedRoots { roots: vec![], radii: vec![] });
    }
    let dd: Vec<Dd> = f.coeffs().iter().map(Dd::from_big).collect();
    if dd.iter().any(|c| !c.hi.is_finite()) {
        return Err(Error::RootCertification("coefficients exceed double range".into()));
    }
    let lead = dd[n].value();
    if n == 1 {
        let z = Complex64::new(-dd[0].value() / lead, 0.0);
        let mut out = CertifiedRoots { roots: vec![z], radii: vec![0.0] };
        polish(&dd, &mut out.roots);
        out.radii = inclusion_radii(&dd, &out.roots);
        return check(out);
    }

    let mut z = initial_guesses(&dd);
    let mut converged = false;
    for _ in 0..MAX_ABERTH_ITERATIONS {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval_dd(&dd, z[i]);
            if p == Complex64::zero() {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[i] -= w;
            max_step = max_step.max(w.norm() / z[i].norm().max(1.0));
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::RootCertification(format!(
            "simultaneous iteration did not converge for {f}"
        )));
    }
    polish(&dd, &mut z);
    let radii = inclusion_radii(&dd, &z);
    check(CertifiedRoots { roots: z, radii })
}

fn initial_guesses(dd: &[Dd]) -> Vec<Complex64> {
    let n = dd.len() - 1;
    let lead = dd[n].value().abs();
    // Fujiwara-type bound on the root moduli
    let bound = (1..=n)
        .map(|k| (dd[n - k].value().abs() / lead).powf(1.0 / k as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let r = bound * 0.9;
    (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(r, theta)
        })
        .collect()
}

fn polish(dd: &[Dd], z: &mut [Complex64]) {
    for zi in z.iter_mut() {
        for _ in 0..POLISH_STEPS {
            let (p, dp) = eval_dd(dd, *zi);
            if p == Complex64::zero() || dp == Complex64::zero() {
                break;
            }
            let step = p / dp;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *zi -= step;
        }
    }
}

/// `n |W_i|` with `W_i = f(z_i) / (a prod_{j != i} (z_i - z_j))`, inflated to
/// cover the rounding in the product.
fn inclusion_radii(dd: &[Dd], z: &[Complex64]) -> Vec<f64> {
    let n = z.len();
    let lead = dd[n].value();
    (0..n)
        .map(|i| {
            let (p, _) = eval_dd(dd, z[i]);
            let prod: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| z[i] - z[j])
                .fold(Complex64::new(lead, 0.0), |acc, d| acc * d);
            let w = p.norm() / prod.norm();
            n as f64 * w * (1.0 + 4.0 * n as f64 * f64::EPSILON) + f64::MIN_POSITIVE
        })
        .collect()
}

fn check(c: CertifiedRoots) -> Result<CertifiedRoots> {
    let n = c.roots.len();
    for i in 0..n {
        let r = c.radii[i];
        if !r.is_finite() || r > CERTIFIED_RADIUS * c.roots[i].norm().max(1.0) {
            return Err(Error::RootCertification(format!(
                "inclusion radius {r:e} at root {}",
                c.roots[i]
            )));
        }
        for j in i + 1..n {
            if (c.roots[i] - c.roots[j]).norm() <= c.radii[i] + c.radii[j] {
                return Err(Error::RootCertification(format!(
                    "inclusion disks around {} and {} overlap",
                    c.roots[i], c.roots[j]
                )));
            }
        }
    }
    Ok(c)
}

fn sign_at_pos_inf(p: &IntPolynomial) -> Sign {
    p.leading().sign()
}

fn sign_at_neg_inf(p: &IntPolynomial) -> Sign {
    let s = p.leading().sign();
    if p.degree() % 2 == 1 {
        -s
    } else {
        s
    }
}

fn sign_changes(signs: impl Iterator<Item = Sign>) -> usize {
    let mut last = Sign::NoSign;
    let mut count = 0;
    for s in signs.filter(|s| *s != Sign::NoSign) {
        if last != Sign::NoSign && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Sturm sequence `f, f', -rem(f, f'), ...` with pseudo-remainders rescaled
/// by positive factors only, so signs are those of the true sequence.
pub fn sturm_sequence(f: &IntPolynomial) -> Vec<IntPolynomial> {
    let mut seq = vec![f.clone()];
    if f.degree() == 0 {
        return seq;
    }
    let df = f.derivative();
    let c = df.content();
    seq.push(df.divide_exact_scalar(&c));
    loop {
        let a = &seq[seq.len() - 2];
        let b = &seq[seq.len() - 1];
        if b.degree() == 0 {
            break;
        }
        let r = a.pseudo_rem(b);
        if r.is_zero() {
            break;
        }
        // prem = lc(b)^d a - q b with d = deg a - deg b + 1
        let d = a.degree() - b.degree() + 1;
        let factor_negative = b.leading().is_negative() && d % 2 == 1;
        let next = if factor_negative { r } else { -r };
        let c = next.content();
        seq.push(next.divide_exact_scalar(&c));
    }
    seq
}

/// Number of distinct real roots, exactly.
pub fn sturm_real_roots(f: &IntPolynomial) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let seq = sturm_sequence(f);
    let at_neg = sign_changes(seq.iter().map(sign_at_neg_inf));
    let at_pos = sign_changes(seq.iter().map(sign_at_pos_inf));
    Ok(at_neg - at_pos)
}

/// All roots real (and distinct, for squarefree input).
pub fn is_totally_real(f: &IntPolynomial) -> Result<bool> {
    Ok(sturm_real_roots(f)? == f.degree())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c).unwrap()
    }

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn root_examples() {
        let r = sorted_re(complex_roots(&poly(&[1, 0, 1])).unwrap());
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        let r = sorted_re(complex_roots(&poly(&[-1, -1, 1])).unwrap());
        assert!((r[0].re + 0.618_033_988_749_894_8).abs() < 1e-14);
        assert!((r[1].re - 1.618_033_988_749_895).abs() < 1e-14);
        let r = complex_roots(&poly(&[-2, 0, 0, 1])).unwrap();
        let c = 2f64.cbrt();
        assert_eq!(r.iter().filter(|z| z.im.abs() < 1e-12).count(), 1);
        assert!(r.iter().all(|z| (z.norm() - c).abs() < 1e-13));
        let r = sorted_re(complex_roots(&poly(&[0, -2, 1])).unwrap());
        assert_eq!(r[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_repeated_roots() {
        assert!(matches!(complex_roots(&poly(&[1, 2, 1])), Err(Error::NotSquarefree)));
    }

    #[test]
    fn sturm_examples() {
        assert_eq!(sturm_real_roots(&poly(&[-1, -1, 1])).unwrap(), 2);
        assert_eq!(sturm_real_roots(&poly(&[1, 0, 1])).unwrap(), 0);
        assert_eq!(sturm_real_roots(&poly(&[1, -3, 0, 1])).unwrap(), 3);
        assert_eq!(sturm_real_roots(&poly(&[-2, 0, 0, 1])).unwrap(), 1);
        // negative leading coefficient
        assert_eq!(sturm_real_roots(&poly(&[1, 3, 0, -1])).unwrap(), 3);
        assert!(is_totally_real(&poly(&[-1, -1, 1])).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn roots_reproduce_polynomial(c in prop::collection::vec(-5i64..=5, 2..=7)) {
            prop_assume!(c.iter().any(|&x| x != 0));
            let f = poly(&c);
            prop_assume!(f.degree() >= 1 && f.is_squarefree());
            let Ok(cr) = certified_roots(&f) else { return Ok(()); };
            prop_assert_eq!(cr.roots.len(), f.degree());
            // Vieta: the sum of the roots is -a_{n-1}/a_n
            let n = f.degree();
            let s: Complex64 = cr.roots.iter().sum();
            let expect = -f.coeff(n - 1).to_f64().unwrap() / f.leading().to_f64().unwrap();
            prop_assert!((s - expect).norm() < 1e-9);
            // the Sturm count matches the certified real roots
            let real = cr
                .roots
                .iter()
                .zip(&cr.radii)
                .filter(|(z, r)| z.im.abs() <= **r)
                .count();
            prop_assert_eq!(real, sturm_real_roots(&f).unwrap());
        }
    }
}
