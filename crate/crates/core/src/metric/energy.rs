use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::point::{FieldContext, ProjectivePoint};
use crate::error::{Error, Result};
use crate::padic::{parse_padic, pow_u, PadicNumber, Valuation};

/// `delta(x, y) = |x0 y1 - y0 x1| / (max(|x0|,|x1|) max(|y0|,|y1|))`.
pub fn delta(x: &ProjectivePoint, y: &ProjectivePoint) -> Result<f64> {
    match (x, y) {
        (
            ProjectivePoint::Archimedean { x0, x1 },
            ProjectivePoint::Archimedean { x0: y0, x1: y1 },
        ) => Ok(arch_delta(*x0, *x1, *y0, *y1)),
        (ProjectivePoint::Padic { .. }, ProjectivePoint::Padic { .. }) => {
            let p = x.context().prime().expect("p-adic");
            Ok(match padic_delta_exponent(x, y)? {
                Valuation::Infinite => 0.0,
                Valuation::Finite(k) => (p as f64).powi(-(k as i32)),
            })
        }
        _ => Err(Error::ContextMismatch),
    }
}

fn arch_delta(x0: Complex64, x1: Complex64, y0: Complex64, y1: Complex64) -> f64 {
    let cross = (x0 * y1 - y0 * x1).norm();
    cross / (x0.norm().max(x1.norm()) * y0.norm().max(y1.norm()))
}

/// `k` such that `delta(x, y) = p^(-k)`, computed from exact valuations.
/// `Infinite` when `x = y`.
pub fn padic_delta_exponent(x: &ProjectivePoint, y: &ProjectivePoint) -> Result<Valuation> {
    let (ProjectivePoint::Padic { x0, x1 }, ProjectivePoint::Padic { x0: y0, x1: y1 }) = (x, y)
    else {
        return Err(Error::ContextMismatch);
    };
    if x0.prime() != y0.prime() {
        return Err(Error::ContextMismatch);
    }
    if x == y {
        return Ok(Valuation::Infinite);
    }
    let cross = x0.mul(y1)?.sub(&y0.mul(x1)?)?;
    let Valuation::Finite(vc) = cross.valuation() else {
        return Ok(Valuation::Infinite);
    };
    let vx = x0.valuation().min(x1.valuation()).finite().expect("nonzero point");
    let vy = y0.valuation().min(y1.valuation()).finite().expect("nonzero point");
    Ok(Valuation::Finite(vc - vx - vy))
}

/// `-log delta(x, y)` in nats; `+inf` on the diagonal.
pub fn neg_log_delta(x: &ProjectivePoint, y: &ProjectivePoint) -> Result<f64> {
    match (x, y) {
        (ProjectivePoint::Padic { x0, .. }, ProjectivePoint::Padic { .. }) => {
            let logp = (x0.prime() as f64).ln();
            Ok(match padic_delta_exponent(x, y)? {
                Valuation::Infinite => f64::INFINITY,
                Valuation::Finite(k) => k as f64 * logp,
            })
        }
        _ => Ok(-delta(x, y)?.ln()),
    }
}

/// A finite set of pairwise distinct points over one field.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    context: FieldContext,
    points: Vec<ProjectivePoint>,
}

impl PointSet {
    pub fn new(points: Vec<ProjectivePoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints {
                got: points.len(),
                min: 2,
            });
        }
        let context = points[0].context();
        if points.iter().any(|q| !q.context().compatible(&context)) {
            return Err(Error::ContextMismatch);
        }
        let context = match context {
            FieldContext::Archimedean => context,
            FieldContext::Padic { prime, .. } => FieldContext::Padic {
                prime,
                precision: points
                    .iter()
                    .map(|q| q.context())
                    .filter_map(|c| match c {
                        FieldContext::Padic { precision, .. } => Some(precision),
                        _ => None,
                    })
                    .max()
                    .unwrap_or(1),
            },
        };
        if let Some(i) = first_repeat(&points) {
            return Err(Error::RepeatedPoint(i));
        }
        Ok(PointSet { context, points })
    }

    pub fn context(&self) -> FieldContext {
        self.context
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Applies `f` to every point, keeping the set structure.
    pub fn map<F>(&self, f: F) -> Result<PointSet>
    where
        F: Fn(&ProjectivePoint) -> Result<ProjectivePoint> + Sync + Send,
    {
        let pts = self.points.par_iter().map(f).collect::<Result<Vec<_>>>()?;
        PointSet::new(pts)
    }
}

/// Index of the first point equal to an earlier one. Canonical coordinates
/// make equality structural.
fn first_repeat(points: &[ProjectivePoint]) -> Option<usize> {
    let mut seen: HashMap<Vec<u8>, usize> = HashMap::with_capacity(points.len());
    for (i, q) in points.iter().enumerate() {
        let key = match q {
            ProjectivePoint::Archimedean { x0, x1 } => [x0.re, x0.im, x1.re, x1.im]
                .iter()
                .flat_map(|v| {
                    // -0.0 and 0.0 are the same coordinate
                    let v = if *v == 0.0 { 0.0 } else { *v };
                    v.to_bits().to_le_bytes()
                })
                .collect(),
            ProjectivePoint::Padic { x0, x1 } => format!("{x0}|{x1}|{}|{}", x0.precision(), x1.precision()).into_bytes(),
        };
        if seen.insert(key, i).is_some() {
            return Some(i);
        }
    }
    None
}

/// A discrepancy value. In the p-adic case it is exactly `coefficient * log p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<LogMultiple>,
}

/// `coefficient * log(prime)` with an exact rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogMultiple {
    pub prime: u64,
    #[serde(serialize_with = "ser_rational")]
    pub coefficient: BigRational,
}

pub(crate) fn ser_rational<S: serde::Serializer>(
    r: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl LogMultiple {
    pub fn value(&self) -> f64 {
        self.coefficient.to_f64().unwrap_or(f64::NAN) * (self.prime as f64).ln()
    }
}

impl std::fmt::Display for LogMultiple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}*log({})", self.coefficient, self.prime)
    }
}

/// Energy sum `D(Z) = 1/(N(N-1)) sum_{a != b} -log delta(a, b)` over ordered
/// pairs.
///
/// Archimedean sets are summed row by row in index order, so the result does
/// not depend on the thread count. p-adic sets use exact valuation counting:
/// in each chart, `sum ord(a - b)` over pairs equals the number of pairs that
/// agree modulo `p^k`, summed over `k >= 1`.
pub fn discrepancy(z: &PointSet) -> Result<Discrepancy> {
    match z.context {
        FieldContext::Archimedean => arch_discrepancy(z),
        FieldContext::Padic { prime, .. } => {
            let total = padic_valuation_sum(z, prime)?;
            Ok(exact_discrepancy(total, z.len(), prime))
        }
    }
}

fn exact_discrepancy(total: BigInt, n: usize, prime: u64) -> Discrepancy {
    let pairs = BigInt::from(n) * BigInt::from(n - 1);
    let exact = LogMultiple {
        prime,
        coefficient: BigRational::new(total, pairs),
    };
    Discrepancy {
        value: exact.value(),
        exact: Some(exact),
    }
}

fn arch_discrepancy(z: &PointSet) -> Result<Discrepancy> {
    let pts = &z.points;
    let n = pts.len();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in 0..n {
                if j != i {
                    s += neg_log_delta(&pts[i], &pts[j]).expect("same context");
                }
            }
            s
        })
        .collect();
    let total: f64 = rows.iter().sum();
    if !total.is_finite() {
        return Err(Error::RepeatedPoint(0));
    }
    Ok(Discrepancy {
        value: total / (n as f64 * (n - 1) as f64),
        exact: None,
    })
}

/// Chart coordinate of a canonical p-adic point and its known digits.
fn chart_key(q: &ProjectivePoint) -> (bool, &PadicNumber) {
    match q {
        ProjectivePoint::Padic { x0, x1 } => {
            if q.is_finite_chart() {
                (true, x0)
            } else {
                (false, x1)
            }
        }
        _ => unreachable!("p-adic set"),
    }
}

fn padic_valuation_sum(z: &PointSet, p: u64) -> Result<BigInt> {
    let mut total = BigInt::from(0);
    for finite in [true, false] {
        let coords: Vec<&PadicNumber> = z
            .points
            .iter()
            .map(chart_key)
            .filter(|(f, _)| *f == finite)
            .map(|(_, c)| c)
            .collect();
        if coords.len() < 2 {
            continue;
        }
        // digits certified for every coordinate in this chart
        let digits = coords
            .iter()
            .filter_map(|c| c.abs_precision())
            .min()
            .unwrap_or(i64::MAX)
            .min(u32::MAX as i64) as u32;
        let digits = if digits == u32::MAX {
            // only exact zeros: at most one of them, handled by repeat check
            continue;
        } else {
            digits
        };
        let residues: Vec<BigUint> = coords
            .iter()
            .map(|c| c.residue(digits))
            .collect::<Result<_>>()?;
        for k in 1..=digits {
            let m = pow_u(p, k);
            let mut classes: HashMap<BigUint, u64> = HashMap::new();
            for r in &residues {
                *classes.entry(r % &m).or_default() += 1;
            }
            let agreeing: u64 = classes.values().map(|&c| c * (c - 1)).sum();
            if agreeing == 0 {
                break;
            }
            if k == digits {
                return Err(Error::PrecisionExhausted(format!(
                    "two points agree modulo {p}^{digits}"
                )));
            }
            total += agreeing;
        }
    }
    Ok(total)
}

/// Reference O(N^2) evaluation of the energy sum straight from `delta`.
pub fn discrepancy_pairwise(z: &PointSet) -> Result<Discrepancy> {
    let pts = &z.points;
    let n = pts.len();
    match z.context {
        FieldContext::Archimedean => arch_discrepancy(z),
        FieldContext::Padic { prime, .. } => {
            let mut total = BigInt::from(0);
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    match padic_delta_exponent(&pts[i], &pts[j])? {
                        Valuation::Finite(k) => total += k,
                        Valuation::Infinite => return Err(Error::RepeatedPoint(j)),
                    }
                }
            }
            Ok(exact_discrepancy(total, n, prime))
        }
    }
}

/// Discrete potential `(1/N) sum_a -log delta(x, a)`; `+inf` when `x` is in `Z`.
pub fn discrete_potential(z: &PointSet, x: &ProjectivePoint) -> Result<f64> {
    if !x.context().compatible(&z.context) {
        return Err(Error::ContextMismatch);
    }
    let terms = z
        .points
        .par_iter()
        .map(|a| neg_log_delta(x, a))
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().sum::<f64>() / z.len() as f64)
}

/// A source of random points of P^1 over a fixed field.
pub trait PointSampler: Sync {
    fn context(&self) -> FieldContext;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<ProjectivePoint>;
}

/// Points drawn per sampler RNG stream.
pub const STREAM_CHUNK: usize = 1024;

/// `n` draws, reproducible from `seed` regardless of thread count: draw `i`
/// comes from stream `i / STREAM_CHUNK` of a ChaCha8 generator keyed by `seed`.
pub fn sample_batch<S: PointSampler + ?Sized>(
    sampler: &S,
    n: usize,
    seed: u64,
) -> Result<Vec<ProjectivePoint>> {
    let chunks = n.div_ceil(STREAM_CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = STREAM_CHUNK.min(n - c * STREAM_CHUNK);
            (0..len).map(|_| sampler.sample(&mut rng)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// Monte Carlo estimate of the minimal energy: the discrepancy of `n`
/// independent draws.
pub fn mc_energy_estimate<S: PointSampler + ?Sized>(sampler: &S, n: usize, seed: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewPoints { got: n, min: 2 });
    }
    let pts = sample_batch(sampler, n, seed)?;
    Ok(discrepancy(&PointSet::new(pts)?)?.value)
}

#[derive(Serialize, Deserialize)]
struct PointSetJson {
    context: FieldContext,
    points: Vec<[CoordJson; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoordJson {
    Complex([f64; 2]),
    Padic(String),
}

impl PointSet {
    /// JSON form: a field context header and a list of `[x0, x1]` pairs.
    /// Archimedean coordinates are `[re, im]`; p-adic ones are `"unit*p^v"`
    /// strings read at the context precision.
    pub fn to_json(&self) -> serde_json::Value {
        let points = self
            .points
            .iter()
            .map(|q| match q {
                ProjectivePoint::Archimedean { x0, x1 } => [
                    CoordJson::Complex([x0.re, x0.im]),
                    CoordJson::Complex([x1.re, x1.im]),
                ],
                ProjectivePoint::Padic { x0, x1 } => {
                    [CoordJson::Padic(x0.to_string()), CoordJson::Padic(x1.to_string())]
                }
            })
            .collect();
        serde_json::to_value(PointSetJson {
            context: self.context,
            points,
        })
        .expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let js: PointSetJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let pts = js
            .points
            .iter()
            .map(|[a, b]| match (js.context, a, b) {
                (FieldContext::Archimedean, CoordJson::Complex(a), CoordJson::Complex(b)) => {
                    ProjectivePoint::archimedean(Complex64::new(a[0], a[1]), Complex64::new(b[0], b[1]))
                }
                (FieldContext::Padic { prime, precision }, CoordJson::Padic(a), CoordJson::Padic(b)) => {
                    ProjectivePoint::padic(
                        parse_padic(a, prime, precision)?,
                        parse_padic(b, prime, precision)?,
                    )
                }
                _ => Err(Error::Parse("coordinate kind does not match context".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(pts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MobiusMap;
    use proptest::prelude::*;

    fn re(x: f64) -> ProjectivePoint {
        ProjectivePoint::real(x).unwrap()
    }

    fn pz(n: i64, p: u64) -> ProjectivePoint {
        ProjectivePoint::padic_integer(n, p, 20).unwrap()
    }

    #[test]
    fn delta_examples() {
        let inf = ProjectivePoint::archimedean_infinity();
        assert_eq!(delta(&re(0.0), &inf).unwrap(), 1.0);
        assert_eq!(delta(&re(1.0), &re(-1.0)).unwrap(), 2.0);
        assert_eq!(delta(&pz(2, 2), &pz(4, 2)).unwrap(), 0.5);
        assert_eq!(delta(&re(0.3), &re(0.3)).unwrap(), 0.0);
        assert_eq!(delta(&pz(6, 3), &pz(6, 3)).unwrap(), 0.0);
        assert_eq!(delta(&re(0.3), &pz(6, 3)), Err(Error::ContextMismatch));
    }

    #[test]
    fn neg_log_delta_examples() {
        let l2 = 2f64.ln();
        assert!((neg_log_delta(&re(1.0), &re(-1.0)).unwrap() + l2).abs() < 1e-15);
        // |3 - 12|_3 = 1/9
        assert_eq!(neg_log_delta(&pz(3, 3), &pz(12, 3)).unwrap(), 2.0 * 3f64.ln());
        assert_eq!(
            neg_log_delta(&re(0.0), &ProjectivePoint::archimedean_infinity()).unwrap(),
            0.0
        );
        assert_eq!(neg_log_delta(&pz(5, 7), &pz(5, 7)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn discrepancy_examples() {
        let z = PointSet::new(vec![re(0.0), ProjectivePoint::archimedean_infinity()]).unwrap();
        assert_eq!(discrepancy(&z).unwrap().value, 0.0);
        let z = PointSet::new(vec![re(1.0), re(-1.0)]).unwrap();
        assert!((discrepancy(&z).unwrap().value + 2f64.ln()).abs() < 1e-15);
        for p in [2u64, 3, 5, 7] {
            let z = PointSet::new(vec![pz(0, p), pz(1, p), ProjectivePoint::padic_infinity(p, 20).unwrap()])
                .unwrap();
            let d = discrepancy(&z).unwrap();
            assert_eq!(d.value, 0.0);
            assert_eq!(d, discrepancy_pairwise(&z).unwrap());
        }
        assert_eq!(PointSet::new(vec![re(0.5), re(0.5)]), Err(Error::RepeatedPoint(1)));
        assert!(matches!(PointSet::new(vec![re(0.5)]), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn potential_examples() {
        let z = PointSet::new(vec![ProjectivePoint::archimedean_infinity(), re(0.5)]).unwrap();
        let one = PointSet::new(vec![ProjectivePoint::archimedean_infinity(), ProjectivePoint::archimedean_infinity()]);
        assert!(one.is_err());
        assert!(discrete_potential(&z, &re(0.5)).unwrap().is_infinite());

        let z = PointSet::new(vec![re(1.0), re(-1.0)]).unwrap();
        assert_eq!(discrete_potential(&z, &re(0.0)).unwrap(), 0.0);

        let p = 5;
        let z = PointSet::new(vec![pz(0, p), ProjectivePoint::padic_infinity(p, 20).unwrap()]).unwrap();
        // delta(5, 0) = 1/5 and delta(5, inf) = 1
        let v = discrete_potential(&z, &pz(5, p)).unwrap();
        assert!((v - 0.5 * 5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn precision_exhaustion_is_reported() {
        let a = ProjectivePoint::padic_integer(1, 2, 4).unwrap();
        let b = ProjectivePoint::padic_integer(17, 2, 5).unwrap();
        assert!(matches!(delta(&a, &b), Err(Error::PrecisionExhausted(_))));
        let z = PointSet::new(vec![a, b]).unwrap();
        assert!(matches!(discrepancy(&z), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn json_round_trip() {
        let z = PointSet::new(vec![pz(0, 3), pz(12, 3), ProjectivePoint::padic_infinity(3, 20).unwrap()]).unwrap();
        let back = PointSet::from_json(&z.to_json()).unwrap();
        assert_eq!(discrepancy(&back).unwrap(), discrepancy(&z).unwrap());
        let z = PointSet::new(vec![re(0.25), re(-3.0)]).unwrap();
        assert_eq!(PointSet::from_json(&z.to_json()).unwrap(), z);
    }

    fn arb_padic(p: u64) -> impl Strategy<Value = ProjectivePoint> {
        (any::<u64>(), any::<u64>()).prop_filter_map("both divisible by p", move |(a, b)| {
            let m = p.pow(10);
            let (a, b) = ((a % m) as i64, (b % m) as i64);
            if a % p as i64 == 0 && b % p as i64 == 0 {
                return None;
            }
            ProjectivePoint::padic(
                PadicNumber::from_i64(a, p, 30).ok()?,
                PadicNumber::from_i64(b, p, 30).ok()?,
            )
            .ok()
        })
    }

    fn arb_arch() -> impl Strategy<Value = ProjectivePoint> {
        (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0).prop_filter_map("degenerate", |(a, b, c, d)| {
            ProjectivePoint::archimedean(Complex64::new(a, b), Complex64::new(c, d)).ok()
        })
    }

    proptest! {
        #[test]
        fn padic_metric_axioms(x in arb_padic(3), y in arb_padic(3), z in arb_padic(3)) {
            let dxy = delta(&x, &y).unwrap();
            prop_assert_eq!(dxy, delta(&y, &x).unwrap());
            prop_assert!((0.0..=1.0).contains(&dxy));
            prop_assert_eq!(dxy == 0.0, x == y);
            let dxz = delta(&x, &z).unwrap();
            let dyz = delta(&y, &z).unwrap();
            prop_assert!(dxz <= dxy.max(dyz));
        }

        #[test]
        fn arch_metric_axioms(x in arb_arch(), y in arb_arch()) {
            let dxy = delta(&x, &y).unwrap();
            prop_assert!((dxy - delta(&y, &x).unwrap()).abs() <= 1e-15);
            prop_assert!((0.0..=2.0 + 1e-12).contains(&dxy));
            prop_assert!(neg_log_delta(&x, &y).unwrap() >= -(2f64.ln()) - 1e-12);
        }

        #[test]
        fn arch_delta_scaling_invariance(x in arb_arch(), y in arb_arch(), s in 0.1f64..10.0, t in 0.0f64..std::f64::consts::TAU) {
            let c = Complex64::from_polar(s, t);
            let (ProjectivePoint::Archimedean { x0, x1 }, ProjectivePoint::Archimedean { x0: y0, x1: y1 }) = (&x, &y) else { unreachable!() };
            let raw = arch_delta(*x0, *x1, *y0, *y1);
            let scaled = arch_delta(c * x0, c * x1, *y0, *y1);
            prop_assert!((raw - scaled).abs() <= 1e-12 * raw.max(1e-300));
        }

        #[test]
        fn padic_delta_is_mobius_invariant(
            x in arb_padic(5),
            y in arb_padic(5),
            m in proptest::array::uniform4(-30i64..30),
        ) {
            let map = MobiusMap::padic_from_integers([[m[0], m[1]], [m[2], m[3]]], 5, 30);
            prop_assume!(map.is_ok());
            let map = map.unwrap();
            prop_assume!(map.is_integral_unimodular().unwrap());
            let (fx, fy) = (map.apply(&x).unwrap(), map.apply(&y).unwrap());
            prop_assert_eq!(padic_delta_exponent(&fx, &fy).unwrap(), padic_delta_exponent(&x, &y).unwrap());
        }

        #[test]
        fn counting_matches_pairwise(pts in proptest::collection::vec(arb_padic(2), 2..12)) {
            if let Ok(z) = PointSet::new(pts) {
                prop_assert_eq!(discrepancy(&z).unwrap(), discrepancy_pairwise(&z).unwrap());
            }
        }
    }
}
