//! The acceptance checks, shared by the `acceptance` test target and the
//! `all-checks` subcommand.

use std::time::{Duration, Instant};

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{bombieri_zannier_bound, general_bound, schinzel_bound, Place, PlaceSpec};
use crate::equilibrium::{
    ball_mass_padic, minimal_energy_padic, minimal_energy_real, minimal_energy_real_series,
    potential_real, real_mass, zeta3, PadicEquilibrium, RealEquilibrium,
};
use crate::error::Result;
use crate::heights::{
    is_irreducible, local_discrepancy_arch, local_discrepancy_padic, padic_root_pointset,
    search_l_s, verify_product_formula, weil_height, SearchConfig,
};
use crate::metric::{
    discrepancy, mc_energy_estimate, padic_delta_exponent, sample_batch, MobiusMap, PointSet,
    ProjectivePoint,
};
use crate::padic::{is_totally_split, Valuation};
use crate::poly::IntPolynomial;

const PRECISION: u32 = 32;

/// Published decimal values the checks compare against.
#[derive(Clone, Debug)]
pub struct Reference {
    pub real_energy: f64,
    pub golden_height: f64,
    pub bound_2_inf: f64,
    pub bound_2: f64,
    pub bound_inf: f64,
    pub bombieri_zannier_2: f64,
    pub schinzel: f64,
}

impl Default for Reference {
    fn default() -> Self {
        Self {
            real_energy: 0.426_278,
            golden_height: 0.240_605_9,
            bound_2_inf: 0.444_188,
            bound_2: 0.231_049,
            bound_inf: 0.213_139,
            bombieri_zannier_2: 0.115_525,
            schinzel: 0.240_605,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct CheckConfig {
    /// Smaller samples and search box, for smoke runs.
    pub quick: bool,
    pub reference: Reference,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
    /// `None` when the check has no runtime limit.
    pub budget_seconds: Option<f64>,
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn binomial_ok(hits: usize, n: usize, p: f64) -> bool {
    let sd = (p * (1.0 - p) / n as f64).sqrt();
    ((hits as f64 / n as f64) - p).abs() <= 3.0 * sd
}

/// Agreement to six significant digits, by rounding or by truncation of `v`.
pub fn six_digits(v: f64, target: f64) -> bool {
    let scale = 10f64.powi(5 - target.abs().log10().floor() as i32);
    let t = (target * scale).round();
    (v * scale).round() == t || (v * scale).trunc() == t
}

fn c1_constants(r: &Reference) -> Result<Outcome> {
    let e = minimal_energy_real();
    let closed = 7.0 * zeta3() / (2.0 * std::f64::consts::PI.powi(2));
    let series = minimal_energy_real_series();
    let pass = (e - closed).abs() <= 1e-12 && (e - series).abs() <= 1e-12 && six_digits(e, r.real_energy);
    Ok(outcome(
        pass,
        format!("I = {e:.15}, series = {series:.15}, |diff| = {:.1e}", (e - series).abs()),
    ))
}

fn c2_mass() -> Result<Outcome> {
    let t = real_mass(f64::NEG_INFINITY, f64::INFINITY)?;
    let u = real_mass(0.0, 1.0)?;
    Ok(outcome(
        (t - 1.0).abs() <= 1e-8 && (u - 0.25).abs() <= 1e-8,
        format!("mass(R) = {t:.12}, mass(0,1) = {u:.12}"),
    ))
}

fn c3_potential(r: &Reference) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for x in [0.0, 0.3, 0.5, 2.0, 5.0, -7.0] {
        worst = worst.max((potential_real(x)? - r.real_energy).abs());
    }
    Ok(outcome(worst <= 1e-5, format!("max |p(x) - {}| = {worst:.2e}", r.real_energy)))
}

fn c4_padic_masses(quick: bool) -> Result<Outcome> {
    let n = if quick { 10_000 } else { 100_000 };
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, seed) in [(2u64, 41u64), (3, 42), (5, 43)] {
        let s = PadicEquilibrium::new(p, PRECISION)?;
        let pts = sample_batch(&s, n, seed)?;
        let zero = ProjectivePoint::padic_integer(0, p, PRECISION)?;
        let mut levels = [0usize; 4];
        for y in &pts {
            let k = match padic_delta_exponent(&zero, y)? {
                Valuation::Infinite => 3,
                Valuation::Finite(k) => k.clamp(0, 3) as usize,
            };
            for hits in levels.iter_mut().take(k + 1).skip(1) {
                *hits += 1;
            }
        }
        for level in 1..=3u32 {
            let mass = ball_mass_padic(p, level)?.to_f64().unwrap_or(f64::NAN);
            let hits = levels[level as usize];
            ok &= binomial_ok(hits, n, mass);
            parts.push(format!("p={p},n={level}: {:.5}/{mass:.5}", hits as f64 / n as f64));
        }
    }
    Ok(outcome(ok, parts.join("; ")))
}

fn c5_monte_carlo(quick: bool) -> Result<Outcome> {
    let n = if quick { 4_000 } else { 20_000 };
    let real = mc_energy_estimate(&RealEquilibrium::new()?, n, 2024)?;
    let mut ok = (real - minimal_energy_real()).abs() < 0.01;
    let mut parts = vec![format!("N = {n}; R: {real:.5}/{:.5}", minimal_energy_real())];
    for p in [2u64, 3, 5] {
        let d = mc_energy_estimate(&PadicEquilibrium::new(p, PRECISION)?, n, 2024 + p)?;
        let target = minimal_energy_padic(p)?;
        ok &= (d - target).abs() < 0.01;
        parts.push(format!("Q_{p}: {d:.5}/{target:.5}"));
    }
    Ok(outcome(ok, parts.join("; ")))
}

fn random_unimodular(rng: &mut ChaCha8Rng, p: u64) -> [[i64; 2]; 2] {
    loop {
        let m = [
            [rng.gen_range(-50..=50), rng.gen_range(-50..=50)],
            [rng.gen_range(-50..=50), rng.gen_range(-50..=50)],
        ];
        let det: i64 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det != 0 && det.rem_euclid(p as i64) != 0 {
            return m;
        }
    }
}

fn c6_invariance(quick: bool) -> Result<Outcome> {
    let per_prime = if quick { 20 } else { 100 };
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut maps = 0;
    for p in [2u64, 3, 5] {
        let s = PadicEquilibrium::new(p, PRECISION)?;
        let mut pts = sample_batch(&s, 40, 600 + p)?;
        pts.push(ProjectivePoint::padic_infinity(p, PRECISION)?);
        pts.push(ProjectivePoint::padic_integer(0, p, PRECISION)?);
        let z = PointSet::new(pts)?;
        let base = discrepancy(&z)?;
        for _ in 0..per_prime {
            let g = MobiusMap::padic_from_integers(random_unimodular(&mut rng, p), p, PRECISION)?;
            if !g.is_integral_unimodular()? {
                return Ok(outcome(false, "generated map not in PGL2(Z_p)"));
            }
            let w = z.map(|x| g.apply(x))?;
            for (i, (a0, b0)) in z.points().iter().zip(w.points()).enumerate() {
                for (j, (a1, b1)) in z.points().iter().zip(w.points()).enumerate() {
                    if padic_delta_exponent(a0, a1)? != padic_delta_exponent(b0, b1)? {
                        return Ok(outcome(false, format!("p={p}: delta changed at ({i},{j})")));
                    }
                }
            }
            let d = discrepancy(&w)?;
            if d.value.to_bits() != base.value.to_bits() || d.exact != base.exact {
                return Ok(outcome(false, format!("p={p}: discrepancy changed")));
            }
            maps += 1;
        }
    }
    Ok(outcome(
        true,
        format!("{maps} maps, 42 points each, all pair exponents and discrepancies identical"),
    ))
}

/// Deterministic corpus of squarefree polynomials of degree 2..=6 with
/// coefficients in [-5, 5].
pub fn corpus(size: usize, seed: u64) -> Vec<IntPolynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let d = rng.gen_range(2..=6usize);
        let mut c: Vec<i64> = (0..=d).map(|_| rng.gen_range(-5..=5)).collect();
        if c[d] == 0 {
            c[d] = if rng.gen() { 1 } else { -1 } * rng.gen_range(1..=5);
        }
        if let Ok(f) = IntPolynomial::from_i64s(&c) {
            if f.is_squarefree() {
                out.push(f);
            }
        }
    }
    out
}

fn c7_heights(r: &Reference, polys: &[IntPolynomial]) -> Result<Outcome> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let h = weil_height(&IntPolynomial::from_i64s(&[-1, -1, 1])?)?;
    let mut worst: f64 = 0.0;
    for f in polys {
        worst = worst.max(verify_product_formula(f)?.residual.abs());
    }
    Ok(outcome(
        (h - 0.5 * phi.ln()).abs() <= 1e-10 && (h - r.golden_height).abs() < 1e-7 && worst <= 1e-9,
        format!("h(phi) = {h:.12}; {} polynomials, max residual {worst:.2e}", polys.len()),
    ))
}

/// A polynomial with roots in distinct residue classes mod `p`, so it splits
/// over Z_p; sometimes reversed to put roots near infinity.
fn split_case(rng: &mut ChaCha8Rng, p: u64) -> Result<IntPolynomial> {
    let n = rng.gen_range(2..=(p as usize).min(5));
    let mut residues: Vec<i64> = (0..p as i64).collect();
    for i in 0..n {
        let j = rng.gen_range(i..residues.len());
        residues.swap(i, j);
    }
    let mut f = IntPolynomial::from_i64s(&[1])?;
    for &r in &residues[..n] {
        f = &f * &IntPolynomial::linear_root(r);
    }
    let mut g: Vec<i64> = (0..n).map(|_| p as i64 * rng.gen_range(-3..=3)).collect();
    g.push(0);
    if g.iter().any(|&c| c != 0) {
        f = &f + &IntPolynomial::from_i64s(&g)?;
    }
    Ok(if rng.gen() && !f.coeff(0).is_zero() { f.reversed() } else { f })
}

fn c8_cross_path() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let primes = [3u64, 5, 7, 11, 13];
    let mut checked = 0;
    let mut irreducible = 0;
    while checked < 20 {
        let p = primes[checked % primes.len()];
        let f = split_case(&mut rng, p)?;
        if f.degree() < 2 || !f.is_squarefree() || !is_totally_split(&f, p)? {
            continue;
        }
        let lhs = discrepancy(&padic_root_pointset(&f, p, PRECISION)?)?.exact;
        let rhs = local_discrepancy_padic(&f, p)?.exact;
        if lhs != rhs {
            return Ok(outcome(false, format!("{f} at {p}: {lhs:?} vs {rhs:?}")));
        }
        if is_irreducible(&f)? {
            irreducible += 1;
        }
        checked += 1;
    }
    Ok(outcome(
        true,
        format!("{checked} pairs equal as rational multiples of log p ({irreducible} irreducible)"),
    ))
}

fn c9_bounds(r: &Reference) -> Result<Outcome> {
    let two = PlaceSpec::rational_prime(2)?;
    let inf = PlaceSpec::real();
    let rows = [
        ("S={2,inf}", general_bound(&[two.clone(), inf.clone()])?.total, r.bound_2_inf),
        ("S={2}", general_bound(&[two])?.total, r.bound_2),
        ("S={inf}", general_bound(&[inf])?.total, r.bound_inf),
        ("BZ{2}", bombieri_zannier_bound(&[2])?, r.bombieri_zannier_2),
        ("Schinzel", schinzel_bound(), r.schinzel),
    ];
    let ok = rows.iter().all(|(_, v, t)| six_digits(*v, *t));
    let detail = rows
        .iter()
        .map(|(n, v, t)| format!("{n} {v:.8} (ref {t})"))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(outcome(ok, detail))
}

fn c10_search(quick: bool) -> Result<Outcome> {
    let cfg = SearchConfig {
        places: vec![Place::Finite(2), Place::Infinite],
        degree_max: if quick { 3 } else { 4 },
        coeff_max: if quick { 4 } else { 8 },
        padic_precision: None,
    };
    let r = search_l_s(&cfg)?;
    let bad = r.violations(1e-9);
    let nontrivial = r.hits.iter().filter(|h| h.nontrivial).count();
    let min = match (&r.min_height, &r.min_poly) {
        (Some(h), Some(f)) => format!("min h = {h:.6} at {f}"),
        _ => "no nontrivial hits".into(),
    };
    let mut detail = format!(
        "degree <= {}, |coeff| <= {}: {} examined, {} hits, {nontrivial} irreducible non-torsion; {min}; bound {:.6}",
        cfg.degree_max,
        cfg.coeff_max,
        r.examined,
        r.hits.len(),
        r.bound
    );
    if let Some(b) = bad.first() {
        detail += &format!("; {} below bound, e.g. {} h={:.6}", bad.len(), b.poly, b.height);
    }
    Ok(outcome(bad.is_empty(), detail))
}

fn c11_mahler(polys: &[IntPolynomial]) -> Result<Outcome> {
    let mut min_margin = f64::INFINITY;
    for f in polys {
        let n = f.degree() as f64;
        min_margin = min_margin.min(local_discrepancy_arch(f)?.value + n.ln() / (n - 1.0));
    }
    Ok(outcome(
        min_margin >= -1e-12,
        format!("{} polynomials, min D_inf + log n/(n-1) = {min_margin:.3e}", polys.len()),
    ))
}

/// Runs every check in order and reports each result with its timing.
/// A check passes only if it meets its runtime budget too.
pub fn run_checks(cfg: &CheckConfig) -> Vec<CheckResult> {
    let polys = corpus(if cfg.quick { 100 } else { 600 }, 7);
    let r = &cfg.reference;
    let q = cfg.quick;
    type Check<'a> = (&'static str, Option<u64>, Box<dyn Fn() -> Result<Outcome> + 'a>);
    let checks: Vec<Check> = vec![
        ("constants", Some(1), Box::new(|| c1_constants(r))),
        ("real mass", Some(5), Box::new(c2_mass)),
        ("constant potential", Some(30), Box::new(|| c3_potential(r))),
        ("p-adic ball masses", Some(30), Box::new(|| c4_padic_masses(q))),
        ("Monte Carlo energies", Some(300), Box::new(|| c5_monte_carlo(q))),
        ("Mobius invariance", None, Box::new(|| c6_invariance(q))),
        ("heights and product formula", Some(120), Box::new(|| c7_heights(r, &polys))),
        ("cross-path p-adic discrepancy", None, Box::new(c8_cross_path)),
        ("bounds table", Some(1), Box::new(|| c9_bounds(r))),
        ("search consistency", Some(600), Box::new(|| c10_search(q))),
        ("Mahler inequality", None, Box::new(|| c11_mahler(&polys))),
    ];
    checks
        .into_iter()
        .enumerate()
        .map(|(i, (name, budget, check))| {
            let t = Instant::now();
            let o = check().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
            let took = t.elapsed();
            let in_budget = budget.is_none_or(|b| took <= Duration::from_secs(b));
            CheckResult {
                id: i + 1,
                name,
                pass: o.pass && in_budget,
                detail: o.detail,
                seconds: took.as_secs_f64(),
                budget_seconds: budget.map(|b| b as f64),
            }
        })
        .collect()
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {:>2} {}: {}: {} [{:.2}s",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )?;
        if let Some(b) = self.budget_seconds {
            write!(f, ", budget {b}s")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_digit_agreement() {
        assert!(six_digits(0.444_188_26, 0.444_188));
        assert!(six_digits(0.240_605_91, 0.240_605));
        assert!(!six_digits(0.444_198, 0.444_188));
    }

    #[test]
    fn corpus_is_deterministic_and_squarefree() {
        let a = corpus(50, 1);
        assert_eq!(a, corpus(50, 1));
        assert!(a.iter().all(|f| f.is_squarefree() && (2..=6).contains(&f.degree())));
    }

    #[test]
    fn corrupted_reference_fails() {
        let mut r = Reference::default();
        assert!(c9_bounds(&r).unwrap().pass);
        r.bound_2_inf = 0.444_288;
        assert!(!c9_bounds(&r).unwrap().pass);
        let r = Reference { real_energy: 0.426_378, ..Default::default() };
        assert!(!c1_constants(&r).unwrap().pass);
        assert!(!c3_potential(&r).unwrap().pass);
    }
}
