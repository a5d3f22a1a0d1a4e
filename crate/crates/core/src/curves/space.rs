//! Spaces H⁰(Ω¹(D)) of differentials with bounded poles, as explicit coordinate spaces.

use serde::Serialize;

use super::model::{CurveKind, CurveModel, MeroDifferential, Place};
use super::ratfunc::RatFunc;
use crate::algebra::{FiniteField, Poly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorData<E> {
    pub parts: Vec<(Place<E>, i64)>,
}

impl<E: Clone + PartialEq> DivisorData<E> {
    pub fn zero() -> Self {
        DivisorData { parts: vec![] }
    }

    pub fn reduced(places: &[Place<E>]) -> Self {
        DivisorData { parts: places.iter().map(|p| (p.clone(), 1)).collect() }
    }

    pub fn multiple(&self, n: i64) -> Self {
        DivisorData { parts: self.parts.iter().map(|(p, m)| (p.clone(), m * n)).collect() }
    }

    /// ⌈D/n⌉ coefficient-wise.
    pub fn ceil_div(&self, n: i64) -> Self {
        DivisorData { parts: self.parts.iter().map(|(p, m)| (p.clone(), m.div_euclid(n) + i64::from(m.rem_euclid(n) != 0))).collect() }
    }

    pub fn mult(&self, place: &Place<E>) -> i64 {
        self.parts.iter().filter(|(p, _)| p == place).map(|(_, m)| *m).sum()
    }

    pub fn degree(&self) -> i64 {
        self.parts.iter().map(|(_, m)| *m).sum()
    }
}

/// Differentials (x^i / denom_j) y^j dx with i ≤ max_deg_j.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialSpace<F: FiniteField> {
    curve: CurveModel<F>,
    denoms: Vec<Poly<F>>,
    max_deg: Vec<i64>,
}

fn ceil_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

impl<F: FiniteField> DifferentialSpace<F> {
    pub fn new(c: &CurveModel<F>, d: &DivisorData<F::Elem>) -> Result<Self> {
        let f = c.field();
        if d.parts.iter().any(|(_, m)| *m < 0) {
            return Err(Error::Invalid("divisor must be effective".into()));
        }
        for (pl, _) in &d.parts {
            if !c.contains_place(pl) {
                return Err(Error::Invalid(format!("{pl:?} is not on the curve")));
            }
        }
        let n = c.y_degree();
        let mut denoms = Vec::with_capacity(n);
        let mut max_deg = Vec::with_capacity(n);
        match c.kind() {
            CurveKind::ProjectiveLine => {
                let mut den = Poly::one(f);
                let mut n_inf = 0;
                for (pl, m) in &d.parts {
                    match pl {
                        Place::Affine { x, .. } => den = den.mul(&Poly::linear(f, x).pow(*m as u64)),
                        _ => n_inf += m,
                    }
                }
                max_deg.push(den.deg_i() - (2 - n_inf));
                denoms.push(den);
            }
            CurveKind::Hyperelliptic { h, .. } => {
                let mut n_inf = 0;
                for (pl, m) in &d.parts {
                    match pl {
                        Place::Infinity { .. } => n_inf += m,
                        _ if *m == 0 => {}
                        _ => return Err(Error::Unsupported("hyperelliptic poles away from infinity".into())),
                    }
                }
                let dh = h.deg_i();
                for j in 0..2i64 {
                    let den = if j == 0 { Poly::one(f) } else { h.clone() };
                    let b_inf = ceil_div(-n_inf + j * dh + 3, 2);
                    max_deg.push(den.deg_i() - b_inf);
                    denoms.push(den);
                }
            }
            CurveKind::ArtinSchreier { poles, pole_inf, .. } => {
                let p = c.p() as i64;
                for (pl, m) in &d.parts {
                    if *m != 0 && !matches!(pl, Place::Branch { .. }) {
                        return Err(Error::Unsupported("Artin–Schreier poles away from the branch locus".into()));
                    }
                }
                for j in 0..p {
                    let mut den = Poly::one(f);
                    for (a, m) in poles {
                        let m = *m as i64;
                        let nd = d.mult(&Place::Branch { x: Some(a.clone()) });
                        let b = ceil_div(-nd + j * m - (m + 1) * (p - 1), p);
                        den = den.mul(&Poly::linear(f, a).pow((-b).max(0) as u64));
                    }
                    let b_inf = if *pole_inf > 0 {
                        let m = *pole_inf as i64;
                        let nd = d.mult(&Place::Branch { x: None });
                        ceil_div(-nd + j * m + 2 * p - (m + 1) * (p - 1), p)
                    } else {
                        2
                    };
                    max_deg.push(den.deg_i() - b_inf);
                    denoms.push(den);
                }
            }
        }
        Ok(DifferentialSpace { curve: c.clone(), denoms, max_deg })
    }

    pub fn curve(&self) -> &CurveModel<F> {
        &self.curve
    }

    pub fn dim(&self) -> usize {
        self.max_deg.iter().map(|m| (m + 1).max(0) as usize).sum()
    }

    pub fn basis(&self) -> Vec<MeroDifferential<F>> {
        let f = self.curve.field();
        let mut out = Vec::new();
        for (j, (den, md)) in self.denoms.iter().zip(&self.max_deg).enumerate() {
            for i in 0..=*md {
                let mut w = self.curve.zero_differential();
                w.g[j] = RatFunc::new(Poly::monomial(f, f.one(), i as usize), den.clone());
                out.push(w);
            }
        }
        out
    }

    /// Coordinates in `basis()`, `None` if ω lies outside the space.
    pub fn coords(&self, w: &MeroDifferential<F>) -> Option<Vec<F::Elem>> {
        let f = self.curve.field();
        let mut out = Vec::with_capacity(self.dim());
        for (j, (den, md)) in self.denoms.iter().zip(&self.max_deg).enumerate() {
            let g = w.g[j].mul(&RatFunc::from_poly(den.clone()));
            if !g.is_poly() || (!g.is_zero() && g.num().deg_i() > *md) {
                return None;
            }
            let scale = g.den().lead().unwrap().clone();
            let si = f.inv(&scale).unwrap();
            for i in 0..=*md {
                out.push(f.mul(&g.num().coeff(i as usize), &si));
            }
        }
        Some(out)
    }

    pub fn from_coords(&self, v: &[F::Elem]) -> MeroDifferential<F> {
        let mut acc = self.curve.zero_differential();
        for (b, c) in self.basis().iter().zip(v) {
            acc = acc.add(&b.scale(c));
        }
        acc
    }
}

pub fn differentials_with_poles_basis<F: FiniteField>(
    c: &CurveModel<F>,
    d: &DivisorData<F::Elem>,
) -> Result<Vec<MeroDifferential<F>>> {
    Ok(DifferentialSpace::new(c, d)?.basis())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{PrimeField, Ring};
    use crate::curves::local::order_at;

    #[test]
    fn small_examples() {
        let f = PrimeField::new(5).unwrap();
        let p1 = CurveModel::projective_line(&f);
        assert!(differentials_with_poles_basis(&p1, &DivisorData::zero()).unwrap().is_empty());
        let e = CurveModel::elliptic(&f, [0, 0, 0, 1, 1]).unwrap();
        let b = differentials_with_poles_basis(&e, &DivisorData::zero()).unwrap();
        assert_eq!(b.len(), 1);
        let h = Poly::from_i64(&f, &[1, 1, 0, 1]);
        assert_eq!(b[0].g[1], RatFunc::new(Poly::one(&f), h));
        let a = CurveModel::artin_schreier(&f, RatFunc::x(&f).pow(3)).unwrap();
        let b = differentials_with_poles_basis(&a, &DivisorData::zero()).unwrap();
        let x = RatFunc::x(&f);
        let one = RatFunc::one(&f);
        let z = RatFunc::zero(&f);
        let expect = vec![
            MeroDifferential { g: vec![one.clone(), z.clone(), z.clone(), z.clone(), z.clone()] },
            MeroDifferential { g: vec![x, z.clone(), z.clone(), z.clone(), z.clone()] },
            MeroDifferential { g: vec![z.clone(), one.clone(), z.clone(), z.clone(), z.clone()] },
            MeroDifferential { g: vec![z.clone(), z.clone(), one, z.clone(), z] },
        ];
        assert_eq!(b, expect);
    }

    #[test]
    fn riemann_roch_dimensions() {
        let f = PrimeField::new(3).unwrap();
        let rhs = RatFunc::pole(&f, &0, 1).add(&RatFunc::pole(&f, &1, 1));
        let c = CurveModel::artin_schreier(&f, rhs).unwrap();
        let g = c.genus() as i64;
        assert_eq!(g, 2);
        let dred = DivisorData::reduced(&c.branch_places());
        for n in 0..=9 {
            let s = DifferentialSpace::new(&c, &dred.multiple(n)).unwrap();
            let expect = if n == 0 { g } else { g - 1 + 2 * n };
            assert_eq!(s.dim() as i64, expect);
        }
        let f7 = PrimeField::new(7).unwrap();
        let e = CurveModel::elliptic(&f7, [0, 0, 0, 3, 1]).unwrap();
        for n in 0..6 {
            let d = DivisorData { parts: vec![(Place::Infinity { y: None }, n)] };
            let expect = if n == 0 { 1 } else { n };
            assert_eq!(DifferentialSpace::new(&e, &d).unwrap().dim() as i64, expect);
        }
    }

    #[test]
    fn basis_respects_pole_bounds() {
        let f = PrimeField::new(5).unwrap();
        let rhs = RatFunc::pole(&f, &0, 2).add(&RatFunc::x(&f));
        let c = CurveModel::artin_schreier(&f, rhs).unwrap();
        let d = DivisorData { parts: vec![(Place::Branch { x: Some(0) }, 3), (Place::Branch { x: None }, 2)] };
        let s = DifferentialSpace::new(&c, &d).unwrap();
        assert_eq!(s.dim() as i64, c.genus() as i64 - 1 + 5);
        for b in s.basis() {
            for (pl, m) in &d.parts {
                let v = order_at(&c, &b, pl, 2).unwrap().unwrap();
                assert!(v >= -m, "{} at {pl:?}: {v}", b.render());
            }
            assert_eq!(s.coords(&b).unwrap().iter().filter(|x| **x != 0).count(), 1);
        }
        assert_eq!(f.one(), 1);
    }
}
