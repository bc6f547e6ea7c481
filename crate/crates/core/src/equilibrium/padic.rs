use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::{FieldContext, PointSampler, ProjectivePoint};
use crate::padic::{pow_u, prime_power, require_prime, PadicNumber};

pub const DEFAULT_SAMPLE_PRECISION: u32 = 32;

fn check_level(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("ball level must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `mu(B(0, p^-n)) = 1 / (p^(n-1) (p+1))`.
pub fn ball_mass_padic(p: u64, n: u32) -> Result<BigRational> {
    require_prime(p)?;
    check_level(n)?;
    let den = BigInt::from(pow_u(p, n - 1)) * BigInt::from(p + 1);
    Ok(BigRational::new(1.into(), den))
}

/// `mu({|x| = p^-n}) = (p-1) / (p^n (p+1))`.
pub fn sphere_mass_padic(p: u64, n: u32) -> Result<BigRational> {
    require_prime(p)?;
    check_level(n)?;
    let den = BigInt::from(pow_u(p, n)) * BigInt::from(p + 1);
    Ok(BigRational::new(BigInt::from(p - 1), den))
}

fn check_prime_power(q: u64) -> Result<f64> {
    prime_power(q)
        .map(|_| q as f64)
        .ok_or_else(|| Error::InvalidArgument(format!("{q} is not a prime power")))
}

/// `q log q / (q^2 - 1)` for a residue field of size `q`.
pub fn minimal_energy_padic(q: u64) -> Result<f64> {
    let qf = check_prime_power(q)?;
    Ok(qf * qf.ln() / (qf * qf - 1.0))
}

/// `((q-1) log q / (q+1)) sum_{n>=1} n q^-n`, summed until terms vanish.
pub fn minimal_energy_padic_series(q: u64) -> Result<f64> {
    let qf = check_prime_power(q)?;
    let mut terms = Vec::new();
    let mut pw = 1.0;
    for n in 1.. {
        pw /= qf;
        let t = n as f64 * pw;
        terms.push(t);
        if t < 1e-20 {
            break;
        }
    }
    let s: f64 = terms.iter().rev().sum();
    Ok((qf - 1.0) * qf.ln() / (qf + 1.0) * s)
}

/// Sampler for the invariant measure on P^1(Q_p): a uniformly random
/// primitive pair `(u, v)` modulo `p^N`, normalized.
#[derive(Clone, Debug)]
pub struct PadicEquilibrium {
    prime: u64,
    precision: u32,
    chunk_digits: u32,
}

impl PadicEquilibrium {
    pub fn new(prime: u64, precision: u32) -> Result<Self> {
        require_prime(prime)?;
        if precision == 0 {
            return Err(Error::InvalidArgument("sampling precision must be at least 1".into()));
        }
        let mut chunk_digits = 1;
        let mut pk = prime;
        while let Some(next) = pk.checked_mul(prime) {
            pk = next;
            chunk_digits += 1;
        }
        Ok(PadicEquilibrium { prime, precision, chunk_digits })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Uniform integer in `[0, p^N)`, built from base-`p^k` chunks.
    fn uniform_residue(&self, rng: &mut ChaCha8Rng) -> BigUint {
        let mut out = BigUint::zero();
        let mut left = self.precision;
        let mut shift = 0;
        while left > 0 {
            let k = left.min(self.chunk_digits);
            let bound = self.prime.pow(k);
            let chunk = rng.gen_range(0..bound);
            out += BigUint::from(chunk) * pow_u(self.prime, shift);
            shift += k;
            left -= k;
        }
        out
    }
}

impl PointSampler for PadicEquilibrium {
    fn context(&self) -> FieldContext {
        FieldContext::Padic { prime: self.prime, precision: self.precision }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<ProjectivePoint> {
        let p = BigUint::from(self.prime);
        loop {
            let u = self.uniform_residue(rng);
            let v = self.uniform_residue(rng);
            if (&u % &p).is_zero() && (&v % &p).is_zero() {
                continue;
            }
            return ProjectivePoint::padic(
                PadicNumber::from_residue(&u, self.prime, self.precision)?,
                PadicNumber::from_residue(&v, self.prime, self.precision)?,
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ball_masses() {
        assert_eq!(ball_mass_padic(2, 1).unwrap(), q(1, 3));
        assert_eq!(ball_mass_padic(3, 2).unwrap(), q(1, 12));
        assert_eq!(sphere_mass_padic(2, 1).unwrap(), q(1, 6));
        assert!(ball_mass_padic(4, 1).is_err());
        assert!(ball_mass_padic(2, 0).is_err());
        // ball = sphere + next ball
        for p in [2u64, 3, 5, 7] {
            for n in 1..6 {
                let lhs = ball_mass_padic(p, n).unwrap();
                let rhs = sphere_mass_padic(p, n).unwrap() + ball_mass_padic(p, n + 1).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn minimal_energies() {
        assert!((minimal_energy_padic(2).unwrap() - 0.462_098).abs() < 1e-6);
        assert!((minimal_energy_padic(3).unwrap() - 0.411_980).abs() < 1e-6);
        assert!((minimal_energy_padic(2).unwrap() - 2.0 * 2f64.ln() / 3.0).abs() < 1e-15);
        for qq in [2u64, 3, 4, 5, 7, 8, 9, 25, 101] {
            let a = minimal_energy_padic(qq).unwrap();
            let b = minimal_energy_padic_series(qq).unwrap();
            assert!((a - b).abs() < 1e-14, "{qq}: {a} vs {b}");
        }
        assert!(minimal_energy_padic(6).is_err());
    }

    #[test]
    fn large_prime_chunks() {
        let s = PadicEquilibrium::new(1_000_000_007, 5).unwrap();
        assert_eq!(s.chunk_digits, 2);
        let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        let r = s.uniform_residue(&mut rng);
        assert!(r < pow_u(1_000_000_007, 5));
    }
}
