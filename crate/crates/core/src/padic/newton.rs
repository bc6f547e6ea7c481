use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{ord_int_unchecked, require_prime};
use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

/// One edge of a Newton polygon. A segment of slope `s` and horizontal
/// length `l` accounts for `l` roots of valuation `-s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    #[serde(serialize_with = "ser_ratio")]
    pub slope: Ratio<i64>,
    pub length: usize,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    pub prime: u64,
    /// Slopes strictly increasing.
    pub segments: Vec<Segment>,
    /// Multiplicity of the root 0 (index of the first nonzero coefficient).
    pub zero_roots: usize,
}

impl NewtonPolygon {
    /// `(valuation, multiplicity)` pairs for the nonzero roots.
    pub fn root_valuations(&self) -> Vec<(Ratio<i64>, usize)> {
        self.segments.iter().map(|s| (-s.slope, s.length)).collect()
    }

    /// `sum_i max(0, -ord(alpha_i))`, so that `sum_i log+|alpha_i|_p` is this
    /// times `log p`.
    pub fn negative_valuation_mass(&self) -> Ratio<i64> {
        self.segments
            .iter()
            .filter(|s| s.slope.is_positive())
            .map(|s| s.slope * Ratio::from_integer(s.length as i64))
            .fold(Ratio::zero(), |a, b| a + b)
    }
}

/// Lower convex hull of `(i, ord_p(a_i))` over the nonzero coefficients.
pub fn newton_polygon(f: &IntPolynomial, p: u64) -> Result<NewtonPolygon> {
    require_prime(p)?;
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let pts: Vec<(i64, i64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as i64, ord_int_unchecked(c, p) as i64))
        .collect();
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(pts.len());
    for &pt in &pts {
        // pop while the last turn is not strictly convex (collinear merges)
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let cross = (x2 - x1) * (pt.1 - y1) - (y2 - y1) * (pt.0 - x1);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let segments = hull
        .windows(2)
        .map(|w| Segment {
            slope: Ratio::new(w[1].1 - w[0].1, w[1].0 - w[0].0),
            length: (w[1].0 - w[0].0) as usize,
        })
        .collect();
    Ok(NewtonPolygon {
        prime: p,
        segments,
        zero_roots: pts[0].0 as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seg(n: i64, d: i64, len: usize) -> Segment {
        Segment {
            slope: Ratio::new(n, d),
            length: len,
        }
    }

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c).unwrap()
    }

    #[test]
    fn examples() {
        let np = newton_polygon(&poly(&[-2, 0, 1]), 2).unwrap();
        assert_eq!(np.segments, vec![seg(-1, 2, 2)]);
        assert_eq!(np.root_valuations(), vec![(Ratio::new(1, 2), 2)]);

        let np = newton_polygon(&poly(&[-1, -1, 1]), 5).unwrap();
        assert_eq!(np.segments, vec![seg(0, 1, 2)]);

        let np = newton_polygon(&poly(&[-1, 2]), 2).unwrap();
        assert_eq!(np.segments, vec![seg(1, 1, 1)]);
        assert_eq!(np.negative_valuation_mass(), Ratio::from_integer(1));
    }

    #[test]
    fn zero_roots_and_errors() {
        let np = newton_polygon(&poly(&[0, 0, 4, 1]), 2).unwrap();
        assert_eq!(np.zero_roots, 2);
        assert_eq!(np.segments, vec![seg(-2, 1, 1)]);
        assert!(newton_polygon(&poly(&[1, 1]), 6).is_err());
    }

    fn sorted_valuations(f: &IntPolynomial, p: u64) -> Vec<Ratio<i64>> {
        let np = newton_polygon(f, p).unwrap();
        let mut v: Vec<_> = np
            .root_valuations()
            .into_iter()
            .flat_map(|(s, l)| std::iter::repeat_n(s, l))
            .collect();
        v.sort();
        v
    }

    proptest! {
        #[test]
        fn product_merges_root_valuations(
            a in proptest::collection::vec(-50i64..50, 2..5),
            b in proptest::collection::vec(-50i64..50, 2..5),
            pi in 0usize..3,
        ) {
            let p = [2u64, 3, 5][pi];
            prop_assume!(a[0] != 0 && *a.last().unwrap() != 0);
            prop_assume!(b[0] != 0 && *b.last().unwrap() != 0);
            let f = poly(&a);
            let g = poly(&b);
            let mut expect = sorted_valuations(&f, p);
            expect.extend(sorted_valuations(&g, p));
            expect.sort();
            prop_assert_eq!(sorted_valuations(&(&f * &g), p), expect);
        }
    }
}
