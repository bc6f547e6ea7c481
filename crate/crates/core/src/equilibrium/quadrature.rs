//! Adaptive Gauss–Kronrod (7/15) quadrature, with an exponential change of
//! variables for endpoints carrying integrable logarithmic singularities.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

/// One Kronrod panel: (estimate, error estimate).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive integral of `f` over finite `[a, b]` to absolute error `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (r, e) = gk15(f, a, b);
    let mut panels = vec![(a, b, r, e)];
    let mut err = e;
    while err > tol {
        if panels.len() >= MAX_INTERVALS || !err.is_finite() {
            return Err(Error::Quadrature { a, b, estimate: err });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("nonempty");
        let (pa, pb, _, pe) = panels.swap_remove(worst);
        let m = 0.5 * (pa + pb);
        if m <= pa || m >= pb {
            return Err(Error::Quadrature { a, b, estimate: err });
        }
        let (r1, e1) = gk15(f, pa, m);
        let (r2, e2) = gk15(f, m, pb);
        err += e1 + e2 - pe;
        panels.push((pa, m, r1, e1));
        panels.push((m, pb, r2, e2));
    }
    Ok(panels.iter().map(|p| p.2).sum())
}

/// Smallest distance to a singular endpoint that the substitution reaches;
/// the neglected sliver contributes `O(eps log eps)`.
const SINGULAR_CUTOFF: f64 = 1e-15;

/// Integral over `[a, b]` where `f` may have an integrable log-type
/// singularity at either endpoint. Near a singular endpoint `s` the variable
/// `x = s -+ w e^{-t}` turns the singularity into an exponentially decaying
/// smooth integrand.
pub fn integrate_singular<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    left: bool,
    right: bool,
    tol: f64,
) -> Result<f64> {
    if a >= b {
        return Ok(0.0);
    }
    match (left, right) {
        (false, false) => integrate(f, a, b, tol),
        (true, true) => {
            let m = 0.5 * (a + b);
            Ok(integrate_singular(f, a, m, true, false, 0.5 * tol)?
                + integrate_singular(f, m, b, false, true, 0.5 * tol)?)
        }
        (false, true) => {
            let w = b - a;
            let tmax = (w / (SINGULAR_CUTOFF * b.abs().max(1.0))).ln().max(1.0);
            let g = |t: f64| {
                let d = w * (-t).exp();
                f(b - d) * d
            };
            integrate(&g, 0.0, tmax, tol)
        }
        (true, false) => {
            let w = b - a;
            let tmax = (w / (SINGULAR_CUTOFF * a.abs().max(1.0))).ln().max(1.0);
            let g = |t: f64| {
                let d = w * (-t).exp();
                f(a + d) * d
            };
            integrate(&g, 0.0, tmax, tol)
        }
    }
}

/// Sum of integrals over consecutive breakpoints; a breakpoint listed in
/// `singular` is treated as a singular endpoint of both adjacent pieces.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: &F,
    breakpoints: &[f64],
    singular: &[f64],
    tol: f64,
) -> Result<f64> {
    let mut pts: Vec<f64> = breakpoints.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let pieces = pts.len().saturating_sub(1).max(1) as f64;
    let is_sing = |x: f64| singular.contains(&x);
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += integrate_singular(f, w[0], w[1], is_sing(w[0]), is_sing(w[1]), tol / pieces)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let (r, _) = gk15(&|x: f64| x.powi(20), 0.0, 1.0);
        assert!((r - 1.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_integrand() {
        let r = integrate(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-13).unwrap();
        assert!((r - 2.0).abs() < 1e-13);
    }

    #[test]
    fn log_singular_endpoints() {
        // int_0^1 -ln x dx = 1
        let r = integrate_singular(&|x: f64| -x.ln(), 0.0, 1.0, true, false, 1e-12).unwrap();
        assert!((r - 1.0).abs() < 1e-12, "{r}");
        // int_0^1 -ln(1-x) dx = 1
        let r = integrate_singular(&|x: f64| -(1.0 - x).ln(), 0.0, 1.0, false, true, 1e-12).unwrap();
        assert!((r - 1.0).abs() < 1e-12, "{r}");
        // int_{-1}^{1} -ln|x| dx = 2, singular at the interior breakpoint 0
        let r = integrate_pieces(&|x: f64| -x.abs().ln(), &[-1.0, 0.0, 1.0], &[0.0], 1e-12).unwrap();
        assert!((r - 2.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn nonconvergence_is_an_error() {
        let r = integrate(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-12);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
