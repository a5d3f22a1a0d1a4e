//! Newton polygons of monic integral polynomials at a prime.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::poly::Poly;
use super::ring::Rationals;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolygonResult {
    pub vertices: Vec<(usize, u32)>,
    pub slope_zero_length: usize,
}

fn valuation(c: &BigInt, p: &BigInt) -> Option<u32> {
    if c.is_zero() {
        return None;
    }
    let mut v = 0;
    let mut n = c.abs();
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// Lower convex hull of the points (i, v_p(c_i)) and the run of its slope-zero segment.
pub fn newton_unit_root_count(f: &Poly<Rationals>, p: u64) -> Result<NewtonPolygonResult> {
    if !f.is_monic() {
        return Err(Error::Normalization("polynomial is not monic".into()));
    }
    let pb = BigInt::from(p);
    let mut pts: Vec<(usize, u32)> = Vec::new();
    for (i, c) in f.coeffs().iter().enumerate() {
        if !c.is_integer() {
            return Err(Error::Normalization(format!("coefficient of x^{i} is not an integer")));
        }
        if let Some(v) = valuation(c.numer(), &pb) {
            pts.push((i, v));
        }
    }
    let mut hull: Vec<(usize, u32)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // Drop the middle point unless it lies strictly below the chord.
            let cross = (x2 as i64 - x1 as i64) * (pt.1 as i64 - y1 as i64)
                - (y2 as i64 - y1 as i64) * (pt.0 as i64 - x1 as i64);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let n = f.degree().unwrap();
    let first_unit = pts.iter().find(|(_, v)| *v == 0).map(|(i, _)| *i).unwrap_or(n);
    Ok(NewtonPolygonResult { vertices: hull, slope_zero_length: n - first_unit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> Poly<Rationals> {
        Poly::from_i64(&Rationals, c)
    }

    #[test]
    fn quadratic_at_five() {
        let r = newton_unit_root_count(&poly(&[5, -3, 1]), 5).unwrap();
        assert_eq!(r.vertices, vec![(0, 1), (1, 0), (2, 0)]);
        assert_eq!(r.slope_zero_length, 1);
    }

    #[test]
    fn pure_power_and_cubic() {
        for n in 1..6 {
            let mut c = vec![0; n];
            c.push(1);
            assert_eq!(newton_unit_root_count(&poly(&c), 3).unwrap().slope_zero_length, 0);
        }
        assert_eq!(newton_unit_root_count(&poly(&[0, -1, 0, 1]), 7).unwrap().slope_zero_length, 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(newton_unit_root_count(&poly(&[1, 2]), 3).is_err());
        let half = Poly::new(
            &Rationals,
            vec![num_rational::BigRational::new(1.into(), 2.into()), Rationals_one()],
        );
        assert!(newton_unit_root_count(&half, 3).is_err());
    }

    #[allow(non_snake_case)]
    fn Rationals_one() -> num_rational::BigRational {
        num_rational::BigRational::from_integer(1.into())
    }

    proptest! {
        #[test]
        fn additive_under_products(a in proptest::collection::vec(-30i64..30, 1..5),
                                   b in proptest::collection::vec(-30i64..30, 1..5),
                                   pi in 0usize..3) {
            let p = [3u64, 5, 7][pi];
            let mut a = a; a.push(1);
            let mut b = b; b.push(1);
            let (fa, fb) = (poly(&a), poly(&b));
            let lhs = newton_unit_root_count(&fa.mul(&fb), p).unwrap().slope_zero_length;
            let rhs = newton_unit_root_count(&fa, p).unwrap().slope_zero_length
                + newton_unit_root_count(&fb, p).unwrap().slope_zero_length;
            prop_assert_eq!(lhs, rhs);
        }
    }
}
