//! The Cartier operator V on differentials: global rewrite formulas, the local formula as
//! a cross-check, Hasse–Witt invariants and pole improvement.

use serde::Serialize;

use super::local::expand;
use super::model::{CurveKind, CurveModel, MeroDifferential, Place};
use super::ratfunc::RatFunc;
use super::space::{DifferentialSpace, DivisorData};
use crate::algebra::arith::binom;
use crate::algebra::{FiniteField, Matrix, Poly};
use crate::error::{Error, Result};
use crate::semilinear::{fitting_decompose, SemilinearOperator};

/// V(g dx) on the x-line, using g = a·b^{p−1}/b^p.
pub fn cartier_x<F: FiniteField>(g: &RatFunc<F>) -> RatFunc<F> {
    let f = g.field();
    let p = f.prime() as usize;
    if g.is_zero() {
        return g.clone();
    }
    let c = g.num().mul(&g.den().pow(p as u64 - 1));
    let mut out = Vec::new();
    let mut i = p - 1;
    while i < c.coeffs().len() {
        out.push(f.frob(&c.coeffs()[i], -1));
        i += p;
    }
    RatFunc::new(Poly::new(f, out), g.den().clone())
}

pub fn cartier_apply<F: FiniteField>(c: &CurveModel<F>, w: &MeroDifferential<F>) -> MeroDifferential<F> {
    let f = c.field();
    let mut out = c.zero_differential();
    match c.kind() {
        CurveKind::ProjectiveLine => out.g[0] = cartier_x(&w.g[0]),
        CurveKind::Hyperelliptic { h, .. } => {
            out.g[0] = cartier_x(&w.g[0]);
            // y = y^p · h^{−(p−1)/2}.
            let hr = RatFunc::from_poly(h.clone()).pow(-((c.p() as i64 - 1) / 2));
            out.g[1] = cartier_x(&w.g[1].mul(&hr));
        }
        CurveKind::ArtinSchreier { f: rhs, .. } => {
            // y = y^p − f, so y^j = Σ_l C(j,l) y^{pl} (−f)^{j−l}.
            let mf = rhs.neg();
            for (j, g) in w.g.iter().enumerate() {
                if g.is_zero() {
                    continue;
                }
                for l in 0..=j {
                    let coef = f.from_prime(binom(j as u64, l as u64));
                    let term = g.mul(&mf.pow((j - l) as i64)).scale(&coef);
                    out.g[l] = out.g[l].add(&cartier_x(&term));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalCheck {
    pub agrees: bool,
    pub compared_up_to: i64,
}

/// Compares the expansion of the global V(ω) with the local formula applied to the expansion of ω.
pub fn check_local_global<F: FiniteField>(
    c: &CurveModel<F>,
    w: &MeroDifferential<F>,
    place: &Place<F::Elem>,
    terms: i64,
) -> Result<LocalCheck> {
    let p = c.p() as i64;
    let vw = cartier_apply(c, w);
    let base = expand(c, w, place, 0)?;
    let low = base.valuation().unwrap_or(0).min(0);
    let upto = (low + terms) * p + p;
    let local = expand(c, w, place, upto)?.cartier_local(c.p())?;
    let global = expand(c, &vw, place, local.precision() - 1)?;
    let n = local.precision().min(global.precision());
    if n <= low.div_euclid(p) {
        return Err(Error::Precision("expansions too short to compare".into()));
    }
    let agrees = local.sub(&global).truncate(n).is_zero();
    Ok(LocalCheck { agrees, compared_up_to: n - 1 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HasseWitt<F: FiniteField> {
    /// Matrix of V in the holomorphic basis; V acts as M∘φ^{-1}.
    pub matrix: Matrix<F>,
    pub gamma: usize,
}

/// Matrix of V on H⁰(Ω¹(D)) when V preserves it.
pub fn cartier_matrix<F: FiniteField>(space: &DifferentialSpace<F>) -> Result<Matrix<F>> {
    let c = space.curve();
    let f = c.field();
    let cols = space
        .basis()
        .iter()
        .map(|b| {
            space
                .coords(&cartier_apply(c, b))
                .ok_or_else(|| Error::Consistency("V leaves the space of differentials".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(f, space.dim(), &cols))
}

pub fn cartier_operator<F: FiniteField>(space: &DifferentialSpace<F>) -> Result<SemilinearOperator<F>> {
    SemilinearOperator::new(cartier_matrix(space)?, -1)
}

pub fn hasse_witt<F: FiniteField>(c: &CurveModel<F>) -> Result<HasseWitt<F>> {
    let space = DifferentialSpace::new(c, &DivisorData::zero())?;
    let op = cartier_operator(&space)?;
    let gamma = fitting_decompose(&op).ordinary.len();
    Ok(HasseWitt { matrix: op.matrix().clone(), gamma })
}

/// V maps H⁰(Ω¹(nD)) into H⁰(Ω¹(⌈n/p⌉D)).
pub fn pole_improvement_check<F: FiniteField>(c: &CurveModel<F>, d: &DivisorData<F::Elem>, n: i64) -> Result<bool> {
    let src = DifferentialSpace::new(c, &d.multiple(n))?;
    let dst = DifferentialSpace::new(c, &d.multiple(n).ceil_div(c.p() as i64))?;
    Ok(src.basis().iter().all(|b| dst.coords(&cartier_apply(c, b)).is_some()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ExtField, PrimeField, Ring};
    use crate::curves::local::residue_at;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dx<F: FiniteField>(c: &CurveModel<F>, g: RatFunc<F>) -> MeroDifferential<F> {
        let mut w = c.zero_differential();
        w.g[0] = g;
        w
    }

    #[test]
    fn local_formula_examples() {
        let f = PrimeField::new(5).unwrap();
        let c = CurveModel::projective_line(&f);
        let x = RatFunc::x(&f);
        assert!(cartier_apply(&c, &dx(&c, RatFunc::one(&f))).is_zero());
        assert_eq!(cartier_apply(&c, &dx(&c, x.pow(4))), dx(&c, RatFunc::one(&f)));
        let dlog = dx(&c, x.pow(-1));
        assert_eq!(cartier_apply(&c, &dlog), dlog);
    }

    #[test]
    fn point_count_ordinarity_agrees() {
        for p in [5u64, 7, 11, 13] {
            let f = PrimeField::new(p).unwrap();
            for a4 in 0..p {
                for a6 in 0..p {
                    let Ok(e) = CurveModel::elliptic(&f, [0, 0, 0, a4, a6]) else { continue };
                    let mut count = 1u64;
                    for x in 0..p {
                        let rhs = (x * x % p * x + a4 * x + a6) % p;
                        count += (0..p).filter(|y| y * y % p == rhs).count() as u64;
                    }
                    let trace = (p + 1) as i64 - count as i64;
                    let ordinary = trace.rem_euclid(p as i64) != 0;
                    assert_eq!(hasse_witt(&e).unwrap().gamma, usize::from(ordinary), "p={p} a4={a4} a6={a6}");
                }
            }
        }
    }

    #[test]
    fn spec_elliptic_examples() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(hasse_witt(&CurveModel::elliptic(&f, [0, 0, 0, 1, 1]).unwrap()).unwrap().gamma, 1);
        assert_eq!(hasse_witt(&CurveModel::elliptic(&f, [0, 0, 0, 0, 1]).unwrap()).unwrap().gamma, 0);
        assert_eq!(hasse_witt(&CurveModel::projective_line(&f)).unwrap().gamma, 0);
    }

    #[test]
    fn local_and_global_agree_on_random_differentials() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = ExtField::new(3, 2).unwrap();
        let rhs = RatFunc::pole(&f, &f.zero(), 1).add(&RatFunc::x(&f).pow(2));
        let c = CurveModel::artin_schreier(&f, rhs).unwrap();
        let d = DivisorData::reduced(&c.branch_places()).multiple(4);
        let space = DifferentialSpace::new(&c, &d).unwrap();
        for _ in 0..5 {
            let v: Vec<_> = (0..space.dim()).map(|_| f.random(&mut rng)).collect();
            let w = space.from_coords(&v);
            for pl in c.branch_places() {
                let chk = check_local_global(&c, &w, &pl, 4).unwrap();
                assert!(chk.agrees);
                let r = residue_at(&c, &w, &pl).unwrap();
                let rv = residue_at(&c, &cartier_apply(&c, &w), &pl).unwrap();
                assert_eq!(f.frob(&rv, 1), r);
            }
        }
    }

    #[test]
    fn pole_improvement() {
        let f = PrimeField::new(3).unwrap();
        let rhs = RatFunc::pole(&f, &0, 1).add(&RatFunc::pole(&f, &1, 1));
        let c = CurveModel::artin_schreier(&f, rhs).unwrap();
        let d = DivisorData::reduced(&c.branch_places());
        for n in 1..=9 {
            assert!(pole_improvement_check(&c, &d, n).unwrap());
        }
        assert_eq!(f.one(), 1);
    }
}
