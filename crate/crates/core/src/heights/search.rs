//! Exhaustive search for small-height algebraic numbers with prescribed
//! complete splitting.

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    complex_roots, height_from_roots, is_irreducible, is_zero_or_root_of_unity,
    local_discrepancy_padic, padic_root_pointset, splits_at, arch_from_roots,
    LocalDiscrepancyReport,
};
use crate::bounds::{general_bound, Place, PlaceSpec};
use crate::error::{Error, Result};
use crate::metric::{discrepancy, Discrepancy};
use crate::poly::IntPolynomial;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub places: Vec<Place>,
    pub degree_max: usize,
    pub coeff_max: i64,
    /// When set, hits also carry the discrepancy of their Hensel-lifted
    /// roots at each prime of `S`, lifted to this many digits.
    pub padic_precision: Option<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchHit {
    /// Canonical representative up to sign and `x -> 1/x`.
    #[serde(serialize_with = "ser_poly")]
    pub poly: IntPolynomial,
    pub degree: usize,
    pub height: f64,
    pub irreducible: bool,
    /// Irreducible with roots other than `0` and roots of unity.
    pub nontrivial: bool,
    /// `D_v` for each place of `S` (degree at least 2 only).
    pub local: Vec<LocalDiscrepancyReport>,
    /// Discrepancies of the Hensel-lifted root sets, one per prime of `S`.
    pub padic_pointsets: Vec<(u64, Discrepancy)>,
}

fn ser_poly<S: serde::Serializer>(p: &IntPolynomial, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&p.to_csv_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub places: Vec<Place>,
    pub degree_max: usize,
    pub coeff_max: i64,
    /// Canonical squarefree primitive polynomials examined.
    pub examined: usize,
    pub hits: Vec<SearchHit>,
    /// The lower bound for the places of `S` with trivial local extensions.
    pub bound: f64,
    /// Smallest height among nontrivial hits, with its polynomial.
    pub min_height: Option<f64>,
    #[serde(serialize_with = "ser_opt_poly")]
    pub min_poly: Option<IntPolynomial>,
}

fn ser_opt_poly<S: serde::Serializer>(
    p: &Option<IntPolynomial>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match p {
        Some(p) => s.collect_str(&p.to_csv_string()),
        None => s.serialize_none(),
    }
}

impl SearchReport {
    /// Nontrivial hits whose height falls below the bound by more than `tol`.
    pub fn violations(&self, tol: f64) -> Vec<&SearchHit> {
        self.hits
            .iter()
            .filter(|h| h.nontrivial && h.height < self.bound - tol)
            .collect()
    }
}

/// Coefficient vector number `idx` of degree `d`, leading coefficient in
/// `1..=c` and the rest in `-c..=c`.
fn nth_poly(idx: u64, d: usize, c: i64) -> Vec<i64> {
    let width = (2 * c + 1) as u64;
    let mut rest = idx;
    let mut coeffs = Vec::with_capacity(d + 1);
    for _ in 0..d {
        coeffs.push((rest % width) as i64 - c);
        rest /= width;
    }
    coeffs.push(rest as i64 + 1);
    coeffs
}

fn examine(f: IntPolynomial, cfg: &SearchConfig) -> Result<Option<SearchHit>> {
    for &place in &cfg.places {
        if !splits_at(&f, place)? {
            return Ok(None);
        }
    }
    let roots = complex_roots(&f)?;
    let height = height_from_roots(&f, &roots);
    let irreducible = is_irreducible(&f)?;
    let nontrivial = irreducible && !is_zero_or_root_of_unity(&f)?;
    let mut local = Vec::new();
    let mut padic_pointsets = Vec::new();
    if f.degree() >= 2 {
        for &place in &cfg.places {
            match place {
                Place::Infinite => local.push(LocalDiscrepancyReport {
                    place,
                    value: arch_from_roots(&roots),
                    exact: None,
                }),
                Place::Finite(p) => {
                    local.push(local_discrepancy_padic(&f, p)?);
                    if let Some(prec) = cfg.padic_precision {
                        let z = padic_root_pointset(&f, p, prec)?;
                        padic_pointsets.push((p, discrepancy(&z)?));
                    }
                }
            }
        }
    }
    Ok(Some(SearchHit {
        degree: f.degree(),
        poly: f,
        height,
        irreducible,
        nontrivial,
        local,
        padic_pointsets,
    }))
}

/// Enumerates primitive squarefree integer polynomials of degree
/// `1..=degree_max` with coefficients in `[-coeff_max, coeff_max]`, one per
/// class under sign and reversal, and keeps those splitting completely at
/// every place of `S`. The report order is deterministic.
pub fn search_l_s(cfg: &SearchConfig) -> Result<SearchReport> {
    if cfg.places.is_empty() {
        return Err(Error::EmptyPlaceSet);
    }
    if cfg.degree_max == 0 || cfg.coeff_max < 1 {
        return Err(Error::InvalidArgument("degree_max and coeff_max must be positive".into()));
    }
    let mut places = cfg.places.clone();
    places.sort();
    places.dedup();
    let specs = places
        .iter()
        .map(|&p| PlaceSpec::for_place(p))
        .collect::<Result<Vec<_>>>()?;
    let bound = general_bound(&specs)?.total;
    let cfg = SearchConfig { places: places.clone(), ..cfg.clone() };

    let width = (2 * cfg.coeff_max + 1) as u64;
    let mut examined = 0;
    let mut hits = Vec::new();
    for d in 1..=cfg.degree_max {
        let count = width
            .checked_pow(d as u32)
            .and_then(|w| w.checked_mul(cfg.coeff_max as u64))
            .ok_or_else(|| Error::InvalidArgument("search space too large".into()))?;
        let found: Vec<(usize, Option<SearchHit>)> = (0..count)
            .into_par_iter()
            .map(|idx| {
                let f = IntPolynomial::from_i64s(&nth_poly(idx, d, cfg.coeff_max))?;
                if !f.content().is_one() || f.canonical() != f || !f.is_squarefree() {
                    return Ok((0, None));
                }
                Ok((1, examine(f, &cfg)?))
            })
            .collect::<Result<Vec<_>>>()?;
        for (n, hit) in found {
            examined += n;
            hits.extend(hit);
        }
    }
    let best = hits
        .iter()
        .filter(|h| h.nontrivial)
        .min_by(|a, b| a.height.total_cmp(&b.height));
    Ok(SearchReport {
        places,
        degree_max: cfg.degree_max,
        coeff_max: cfg.coeff_max,
        examined,
        min_height: best.map(|h| h.height),
        min_poly: best.map(|h| h.poly.clone()),
        hits,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(places: &[Place], d: usize, c: i64) -> SearchConfig {
        SearchConfig { places: places.to_vec(), degree_max: d, coeff_max: c, padic_precision: None }
    }

    #[test]
    fn golden_ratio_is_found_at_infinity() {
        let r = search_l_s(&cfg(&[Place::Infinite], 2, 1)).unwrap();
        let phi = IntPolynomial::from_i64s(&[-1, -1, 1]).unwrap().canonical();
        let hit = r.hits.iter().find(|h| h.poly == phi).expect("x^2 - x - 1");
        assert!((hit.height - 0.240_605_9).abs() < 1e-7);
        assert!(hit.nontrivial);
    }

    #[test]
    fn golden_ratio_excluded_at_five() {
        let r = search_l_s(&cfg(&[Place::Finite(5)], 2, 1)).unwrap();
        let phi = IntPolynomial::from_i64s(&[-1, -1, 1]).unwrap().canonical();
        assert!(r.hits.iter().all(|h| h.poly != phi));
    }

    #[test]
    fn every_hit_splits_and_report_is_deterministic() {
        let c = SearchConfig { padic_precision: Some(20), ..cfg(&[Place::Finite(2), Place::Infinite], 3, 3) };
        let a = search_l_s(&c).unwrap();
        for h in &a.hits {
            assert!(splits_at(&h.poly, Place::Infinite).unwrap());
            assert!(splits_at(&h.poly, Place::Finite(2)).unwrap());
            for ((_, d), rep) in h.padic_pointsets.iter().zip(h.local.iter().filter(|r| r.exact.is_some())) {
                assert_eq!(d.exact, rep.exact);
            }
        }
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| search_l_s(&c).unwrap());
        let ka: Vec<_> = a.hits.iter().map(|h| h.poly.clone()).collect();
        let kb: Vec<_> = b.hits.iter().map(|h| h.poly.clone()).collect();
        assert_eq!(ka, kb);
        assert!(a.violations(1e-9).is_empty());
    }
}
