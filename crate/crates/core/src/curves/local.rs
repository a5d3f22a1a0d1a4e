//! Local parameters and Laurent expansions at places.

use super::model::{CurveKind, CurveModel, MeroDifferential, Place};
use super::ratfunc::RatFunc;
use crate::algebra::{FiniteField, Poly, Series};
use crate::error::{Error, Result};

/// x = base + s(t), or x = 1/s(t) when `base` is `None`; y = y(t).
#[derive(Clone, Debug)]
pub struct Chart<F: FiniteField> {
    pub base: Option<F::Elem>,
    pub s: Series<F>,
    pub y: Option<Series<F>>,
}

impl<F: FiniteField> Chart<F> {
    pub fn dx_dt(&self) -> Result<Series<F>> {
        let ds = self.s.derivative();
        match self.base {
            Some(_) => Ok(ds),
            None => Ok(ds.mul(&self.s.pow(-2)?).neg()),
        }
    }
}

fn t_series<F: FiniteField>(f: &F, prec: i64) -> Series<F> {
    Series::monomial(f, f.one(), 1, prec)
}

fn rev_series<F: FiniteField>(p: &Poly<F>, prec: i64) -> Series<F> {
    let f = p.ring();
    Series::from_poly(&Poly::new(f, p.coeffs().iter().rev().cloned().collect()), prec)
}

/// −Σ_k g^{p^k}, the solution z of z^p − z = g for g of positive valuation.
fn artin_schreier_root<F: FiniteField>(g: &Series<F>, p: u64) -> Result<Series<F>> {
    let prec = g.precision();
    let mut acc = Series::zero(g.ring(), prec);
    let mut term = g.clone();
    loop {
        acc = acc.sub(&term);
        if term.is_zero() || term.valuation().unwrap_or(prec) >= prec {
            break;
        }
        term = term.pow(p as i64)?.truncate(prec);
    }
    Ok(acc)
}

/// Chart at a place, with the base parameter known to roughly `work` terms.
pub fn chart<F: FiniteField>(c: &CurveModel<F>, place: &Place<F::Elem>, work: i64) -> Result<Chart<F>> {
    if !c.contains_place(place) {
        return Err(Error::Invalid(format!("{place:?} is not a place of the curve")));
    }
    let f = c.field();
    let p = c.p();
    match (c.kind(), place) {
        (CurveKind::ProjectiveLine, Place::Affine { x, .. }) => {
            Ok(Chart { base: Some(x.clone()), s: t_series(f, work), y: None })
        }
        (CurveKind::ProjectiveLine, Place::Infinity { .. }) => Ok(Chart { base: None, s: t_series(f, work), y: None }),
        (CurveKind::Hyperelliptic { h, .. }, Place::Affine { x, y: Some(b) }) => {
            let hr = RatFunc::from_poly(h.clone());
            if f.is_zero(b) {
                let big = hr.expand_at(x, work)?;
                let r = big.reversion()?;
                let t2 = Series::monomial(f, f.one(), 2, 2 * work);
                Ok(Chart { base: Some(x.clone()), s: r.substitute(&t2)?, y: Some(t_series(f, 2 * work)) })
            } else {
                let ha = f.inv(&h.eval(x)).unwrap();
                let ratio = hr.scale(&ha).expand_at(x, work)?;
                let y = ratio.nth_root_unit(2)?.scale(b);
                Ok(Chart { base: Some(x.clone()), s: t_series(f, work), y: Some(y) })
            }
        }
        (CurveKind::Hyperelliptic { h, .. }, Place::Infinity { .. }) => {
            let g = (h.degree().unwrap() as i64 - 1) / 2;
            let hs = rev_series(h, work);
            let big = hs.inv()?.shift(1);
            let r = big.reversion()?;
            let t2 = Series::monomial(f, f.one(), 2, 2 * work);
            let s = r.substitute(&t2)?;
            let y = s.pow(-g)?.shift(-1);
            Ok(Chart { base: None, s, y: Some(y) })
        }
        (CurveKind::ArtinSchreier { f: rhs, .. }, Place::Branch { x }) => {
            let big = match x {
                Some(a) => rhs.expand_at(a, work)?,
                None => rhs.expand_inf(work)?,
            };
            let m = -big.valuation().unwrap();
            let c0 = big.coeff(-m).unwrap();
            let u = big.shift(m).scale(&f.inv(&c0).unwrap());
            let lam = f.frob(&c0, -1);
            let kappa = f.div(&lam, &c0);
            let ss = u.inv()?.nth_root_unit(m)?.shift(1);
            let r = ss.reversion()?;
            let tp = p as i64;
            let sig_prec = r.precision() * tp + tp;
            let inner = Series::one(f, sig_prec).sub(&Series::monomial(f, kappa, m * (tp - 1), sig_prec));
            let sigma = inner.inv()?.nth_root_unit(m)?.shift(tp);
            let s = r.substitute(&sigma)?;
            let y = Series::monomial(f, lam, -m, s.precision());
            Ok(Chart { base: x.clone(), s, y: Some(y) })
        }
        (CurveKind::ArtinSchreier { f: rhs, .. }, Place::Affine { x, y: Some(y0) }) => {
            let g = rhs.expand_at(x, work)?;
            let g = g.sub(&Series::monomial(f, rhs.eval(x).unwrap(), 0, work));
            let y = artin_schreier_root(&g, p)?.add(&Series::monomial(f, y0.clone(), 0, work));
            Ok(Chart { base: Some(x.clone()), s: t_series(f, work), y: Some(y) })
        }
        (CurveKind::ArtinSchreier { f: rhs, .. }, Place::Infinity { y: Some(y0) }) => {
            let g = rhs.expand_inf(work)?;
            let g = g.sub(&Series::monomial(f, rhs.eval_inf().unwrap(), 0, work));
            let y = artin_schreier_root(&g, p)?.add(&Series::monomial(f, y0.clone(), 0, work));
            Ok(Chart { base: None, s: t_series(f, work), y: Some(y) })
        }
        _ => Err(Error::Unsupported(format!("no chart for {place:?}"))),
    }
}

/// Coefficient series a(t) with ω = a(t) dt, at the given working precision.
pub fn expand_with<F: FiniteField>(c: &CurveModel<F>, w: &MeroDifferential<F>, ch: &Chart<F>) -> Result<Series<F>> {
    let f = c.field();
    let dx = ch.dx_dt()?;
    let mut acc: Option<Series<F>> = None;
    let mut ypow: Option<Series<F>> = None;
    for (j, g) in w.g.iter().enumerate() {
        if j > 0 {
            let y = ch.y.as_ref().unwrap();
            ypow = Some(match ypow {
                None => y.clone(),
                Some(prev) => prev.mul(y),
            });
        }
        if g.is_zero() {
            continue;
        }
        let mut term = g.eval_series(&ch.s, &ch.base)?;
        if let Some(yp) = &ypow {
            term = term.mul(yp);
        }
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    let prec = dx.precision();
    let total = acc.unwrap_or_else(|| Series::zero(f, prec));
    Ok(total.mul(&dx))
}

/// Expansion of ω at a place with all coefficients of t^n, n ≤ `upto`, known.
pub fn expand<F: FiniteField>(
    c: &CurveModel<F>,
    w: &MeroDifferential<F>,
    place: &Place<F::Elem>,
    upto: i64,
) -> Result<Series<F>> {
    let mut work = 12 + upto.max(0);
    loop {
        let ch = chart(c, place, work)?;
        let s = expand_with(c, w, &ch)?;
        if s.precision() > upto {
            return Ok(s);
        }
        if work > 6000 {
            return Err(Error::Precision(format!("could not reach t^{upto} at {place:?}")));
        }
        work *= 2;
    }
}

pub fn residue_at<F: FiniteField>(c: &CurveModel<F>, w: &MeroDifferential<F>, place: &Place<F::Elem>) -> Result<F::Elem> {
    expand(c, w, place, -1)?.residue()
}

/// Order of ω at a place, or `None` if it vanishes to the explored precision.
pub fn order_at<F: FiniteField>(c: &CurveModel<F>, w: &MeroDifferential<F>, place: &Place<F::Elem>, upto: i64) -> Result<Option<i64>> {
    Ok(expand(c, w, place, upto)?.valuation())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{PrimeField, Ring};
    use crate::curves::model::FunctionElem;

    #[test]
    fn chart_relations_hold() {
        let f = PrimeField::new(5).unwrap();
        let c = CurveModel::artin_schreier(&f, RatFunc::x(&f).pow(3)).unwrap();
        let ch = chart(&c, &Place::Branch { x: None }, 20).unwrap();
        let x = ch.s.pow(-1).unwrap();
        let y = ch.y.clone().unwrap();
        let lhs = y.pow(5).unwrap().sub(&y);
        let rhs = x.pow(3).unwrap();
        let n = lhs.precision().min(rhs.precision());
        assert!(n > -15);
        assert!(lhs.sub(&rhs).truncate(n).is_zero());

        let rhs2 = RatFunc::pole(&f, &0, 1).add(&RatFunc::pole(&f, &1, 2));
        let c2 = CurveModel::artin_schreier(&f, rhs2.clone()).unwrap();
        for place in [Place::Branch { x: Some(0) }, Place::Branch { x: Some(1) }] {
            let ch = chart(&c2, &place, 20).unwrap();
            let y = ch.y.clone().unwrap();
            let lhs = y.pow(5).unwrap().sub(&y);
            let rhs = rhs2.eval_series(&ch.s, &ch.base).unwrap();
            let n = lhs.precision().min(rhs.precision());
            assert!(n > 0);
            assert!(lhs.sub(&rhs).truncate(n).is_zero());
        }
    }

    #[test]
    fn hyperelliptic_charts() {
        let f = PrimeField::new(7).unwrap();
        let c = CurveModel::elliptic(&f, [0, 0, 0, 1, 0]).unwrap();
        let h = Poly::from_i64(&f, &[0, 1, 0, 1]);
        for place in [Place::Infinity { y: None }, Place::Affine { x: 0, y: Some(0) }] {
            let ch = chart(&c, &place, 20).unwrap();
            let x = match &ch.base {
                Some(a) => ch.s.add(&Series::monomial(&f, *a, 0, 100)),
                None => ch.s.pow(-1).unwrap(),
            };
            let y = ch.y.clone().unwrap();
            let d = y.mul(&y).sub(&x.eval_poly(&h, x.precision()));
            assert!(d.precision() > 0);
            assert!(d.is_zero());
        }
        // The invariant differential is a unit times dt everywhere.
        let inv = FunctionElem { g: vec![RatFunc::zero(&f), RatFunc::new(Poly::one(&f), h.clone())] };
        for place in [Place::Infinity { y: None }, Place::Affine { x: 0, y: Some(0) }] {
            assert_eq!(order_at(&c, &MeroDifferential { g: inv.g.clone() }, &place, 5).unwrap(), Some(0));
        }
        assert_eq!(f.one(), 1);
    }

    #[test]
    fn projective_line_residues() {
        let f = PrimeField::new(3).unwrap();
        let c = CurveModel::projective_line(&f);
        let w = MeroDifferential { g: vec![RatFunc::pole(&f, &0, 1)] };
        assert_eq!(residue_at(&c, &w, &Place::Affine { x: 0, y: None }).unwrap(), 1);
        assert_eq!(residue_at(&c, &w, &Place::Infinity { y: None }).unwrap(), 2);
        let dx = MeroDifferential { g: vec![RatFunc::one(&f)] };
        assert_eq!(residue_at(&c, &dx, &Place::Affine { x: 2, y: None }).unwrap(), 0);
        assert_eq!(order_at(&c, &dx, &Place::Infinity { y: None }, 3).unwrap(), Some(-2));
    }
}
