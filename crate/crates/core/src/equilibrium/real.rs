use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::quadrature::{integrate, integrate_pieces};
use crate::error::{Error, Result};
use crate::metric::{FieldContext, PointSampler, ProjectivePoint};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
pub const DEFAULT_TABLE_SIZE: usize = 4096;

const PI2: f64 = PI * PI;

/// Density without the argument checks; infinite at `+-1`.
fn rho(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        2.0 / PI2
    } else if a < 1.0 {
        2.0 * a.atanh() / (PI2 * a)
    } else if a > 1.0 {
        2.0 * (1.0 / a).atanh() / (PI2 * a)
    } else {
        f64::INFINITY
    }
}

/// Density of the pushforward under `t = 1/x`, i.e. `rho(1/t) / t^2`.
fn rho_inverted(t: f64) -> f64 {
    if t == 0.0 {
        2.0 / PI2
    } else {
        rho(1.0 / t) / (t * t)
    }
}

/// `(1/(pi^2 x)) log|(x+1)/(x-1)|`, equal to `2/pi^2` at `0`.
pub fn density_real(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("density at {x}")));
    }
    if x.abs() == 1.0 {
        return Err(Error::Singularity(x));
    }
    Ok(rho(x))
}

/// `mu([a, b])` with `-inf <= a <= b <= +inf`.
pub fn real_mass(a: f64, b: f64) -> Result<f64> {
    real_mass_with_tol(a, b, DEFAULT_QUAD_TOL)
}

pub fn real_mass_with_tol(a: f64, b: f64, tol: f64) -> Result<f64> {
    if a.is_nan() || b.is_nan() || a > b {
        return Err(Error::InvalidArgument(format!("mass of [{a}, {b}]")));
    }
    let tol = tol / 3.0;
    let mut total = 0.0;
    // |x| <= 1 directly
    let (lo, hi) = (a.max(-1.0), b.min(1.0));
    if lo < hi {
        let mut pts = vec![lo, hi];
        if lo < 0.0 && 0.0 < hi {
            pts.push(0.0);
        }
        total += integrate_pieces(&rho, &pts, &[-1.0, 1.0], tol)?;
    }
    // x >= 1 through t = 1/x in (0, 1]
    if b > 1.0 {
        let (t_lo, t_hi) = (1.0 / b, 1.0 / a.max(1.0));
        total += integrate_pieces(&rho_inverted, &[t_lo, t_hi], &[1.0], tol)?;
    }
    // x <= -1 through t = 1/x in [-1, 0)
    if a < -1.0 {
        let (t_lo, t_hi) = (1.0 / b.min(-1.0), 1.0 / a);
        total += integrate_pieces(&rho_inverted, &[t_lo, t_hi], &[-1.0], tol)?;
    }
    Ok(total)
}

/// `zeta(3)`: direct summation with an Euler-Maclaurin tail starting at `M`.
pub fn zeta3() -> f64 {
    const M: u32 = 200;
    let mut s = 0.0;
    for n in (1..M).rev() {
        let n = n as f64;
        s += 1.0 / (n * n * n);
    }
    let m = M as f64;
    let tail = 1.0 / (2.0 * m * m) + 1.0 / (2.0 * m.powi(3)) + 1.0 / (4.0 * m.powi(4))
        - 1.0 / (12.0 * m.powi(6));
    s + tail
}

/// `7 zeta(3) / (2 pi^2)`.
pub fn minimal_energy_real() -> f64 {
    7.0 * zeta3() / (2.0 * PI2)
}

/// `(4/pi^2) sum_{n>=0} (2n+1)^{-3}`, the value of the potential at `0`.
pub fn minimal_energy_real_series() -> f64 {
    const M: u32 = 200;
    let mut s = 0.0;
    for n in (0..M).rev() {
        let u = 2.0 * n as f64 + 1.0;
        s += 1.0 / (u * u * u);
    }
    let u = 2.0 * M as f64 + 1.0;
    let tail = 1.0 / (4.0 * u * u) + 1.0 / (2.0 * u.powi(3)) + 1.0 / (2.0 * u.powi(4))
        - 2.0 / (3.0 * u.powi(6));
    4.0 * (s + tail) / PI2
}

/// `int -log delta(x, y) dmu(y)`; `x = +-inf` gives the potential at infinity.
pub fn potential_real(x: f64) -> Result<f64> {
    potential_real_with_tol(x, DEFAULT_QUAD_TOL)
}

pub fn potential_real_with_tol(x: f64, tol: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::InvalidArgument("potential at NaN".into()));
    }
    if x.abs() == 1.0 {
        return Err(Error::Singularity(x));
    }
    let tol = tol / 2.0;
    let big = x.abs() > 1.0;
    // x as (x : 1) when |x| < 1, as (1 : w) with w = 1/x otherwise
    let w = 1.0 / x;

    // y in [-1, 1] as (y : 1)
    let inner = |y: f64| {
        let k = if big { -(1.0 - w * y).abs().ln() } else { -(x - y).abs().ln() };
        k * rho(y)
    };
    let mut pts = vec![-1.0, 0.0, 1.0];
    let mut sing = vec![-1.0, 1.0];
    if !big {
        pts.push(x);
        sing.push(x);
    }
    let p_inner = integrate_pieces(&inner, &pts, &sing, tol)?;

    // |y| >= 1 as (1 : t) with t = 1/y
    let outer = |t: f64| {
        let k = if big { -(t - w).abs().ln() } else { -(x * t - 1.0).abs().ln() };
        k * rho_inverted(t)
    };
    let mut pts = vec![-1.0, 0.0, 1.0];
    let mut sing = vec![-1.0, 1.0];
    if big {
        pts.push(w);
        sing.push(w);
    }
    let p_outer = integrate_pieces(&outer, &pts, &sing, tol)?;
    Ok(p_inner + p_outer)
}

/// Tabulated CDF of the equilibrium measure on `[0, 1]`, used for sampling.
#[derive(Clone, Debug)]
pub struct RealEquilibrium {
    xs: Vec<f64>,
    fs: Vec<f64>,
    slopes: Vec<f64>,
    tol: f64,
}

impl RealEquilibrium {
    pub fn new() -> Result<Self> {
        Self::with_options(DEFAULT_TABLE_SIZE, DEFAULT_QUAD_TOL)
    }

    pub fn with_options(table_size: usize, tol: f64) -> Result<Self> {
        if table_size < 2 {
            return Err(Error::InvalidArgument("CDF table needs at least 2 cells".into()));
        }
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidArgument(format!("quadrature tolerance {tol}")));
        }
        let n = table_size;
        let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let cell_tol = tol / n as f64;
        let mut fs = Vec::with_capacity(n + 1);
        fs.push(0.0);
        let mut acc = 0.0;
        for i in 0..n {
            let last = i == n - 1;
            acc += integrate_pieces(&rho, &[xs[i], xs[i + 1]], if last { &[1.0] } else { &[] }, cell_tol)?;
            fs.push(acc);
        }
        if (acc - 0.25).abs() > 10.0 * tol {
            return Err(Error::Quadrature { a: 0.0, b: 1.0, estimate: (acc - 0.25).abs() });
        }
        let slopes = pchip_slopes(&fs, &xs);
        Ok(RealEquilibrium { xs, fs, slopes, tol })
    }

    pub fn table_size(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Total tabulated mass of `[0, 1]`, nominally `1/4`.
    pub fn quadrant_mass(&self) -> f64 {
        *self.fs.last().expect("nonempty")
    }

    fn cell_of_x(&self, x: f64) -> usize {
        let n = self.table_size();
        ((x * n as f64) as usize).min(n - 1)
    }

    fn cell_of_f(&self, u: f64) -> usize {
        let i = self.fs.partition_point(|&f| f <= u);
        i.saturating_sub(1).min(self.table_size() - 1)
    }

    /// `mu([0, x])` for `0 <= x <= 1`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidArgument(format!("cdf at {x} outside [0, 1]")));
        }
        if x == 1.0 {
            return Ok(self.quadrant_mass());
        }
        let i = self.cell_of_x(x);
        Ok(self.fs[i] + integrate(&rho, self.xs[i], x, self.tol * 1e-3)?)
    }

    /// The `x` in `[0, 1]` with `mu([0, x]) = u`, for `0 <= u < 1/4`.
    pub fn inverse_cdf(&self, u: f64) -> Result<f64> {
        if !(0.0..=self.quadrant_mass()).contains(&u) {
            return Err(Error::InvalidArgument(format!("inverse cdf at {u}")));
        }
        let i = self.cell_of_f(u);
        let (f0, f1) = (self.fs[i], self.fs[i + 1]);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = f1 - f0;
        let t = (u - f0) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        let guess = h00 * x0 + h10 * h * self.slopes[i] + h01 * x1 + h11 * h * self.slopes[i + 1];
        let mut x = guess.clamp(x0, x1);
        // Newton on F(x) - u, bracketed by the cell; the interpolant is
        // already close except in the last cell, where dx/dF vanishes at 1
        let (mut lo, mut hi) = (x0, x1);
        for _ in 0..MAX_NEWTON {
            if x >= 1.0 {
                break;
            }
            let r = f0 + integrate(&rho, x0, x, self.tol * 1e-3)? - u;
            if r.abs() <= NEWTON_RESIDUAL {
                break;
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let next = x - r / rho(x);
            x = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        }
        Ok(x)
    }
}

const MAX_NEWTON: usize = 8;
const NEWTON_RESIDUAL: f64 = 1e-13;

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

/// Fritsch-Butland monotone slopes for data `(u_i, x_i)`.
fn pchip_slopes(u: &[f64], x: &[f64]) -> Vec<f64> {
    let n = u.len();
    let h: Vec<f64> = u.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|i| (x[i + 1] - x[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    m
}

impl PointSampler for RealEquilibrium {
    fn context(&self) -> FieldContext {
        FieldContext::Archimedean
    }

    /// Inverse CDF on `[0, 1)`, then an independent sign and inversion.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<ProjectivePoint> {
        let u: f64 = rng.gen::<f64>() * self.quadrant_mass();
        let negate: bool = rng.gen();
        let invert: bool = rng.gen();
        let x = self.inverse_cdf(u)?;
        let x = if negate { -x } else { x };
        if invert {
            ProjectivePoint::real_inverse(x)
        } else {
            ProjectivePoint::real(x)
        }
    }
}
