//! The V-ordinary part of H⁰(Y, Ω¹(n·D_red)) on an Artin–Schreier cover as a module over F[Z/p].

use serde::Serialize;

use super::cartier::{cartier_operator, hasse_witt};
use super::model::{CurveKind, CurveModel};
use super::space::{DifferentialSpace, DivisorData};
use crate::algebra::linalg::{coords_in, span_basis};
use crate::algebra::{FiniteField, Matrix};
use crate::error::{Error, Result};
use crate::semilinear::fitting_decompose;
use crate::tower::{CyclicPLevel, GroupRingModule};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NakajimaReport {
    pub p: u64,
    pub branch_points: usize,
    pub expected_rank: i64,
    pub ordinary_dim: usize,
    pub free: bool,
    pub rank: Option<usize>,
    pub independent_of_n: bool,
    pub gamma_cover: usize,
}

struct OrdinaryPart<F: FiniteField> {
    space: DifferentialSpace<F>,
    basis: Vec<Vec<F::Elem>>,
}

fn ordinary_part<F: FiniteField>(c: &CurveModel<F>, d: &DivisorData<F::Elem>) -> Result<OrdinaryPart<F>> {
    let space = DifferentialSpace::new(c, d)?;
    let op = cartier_operator(&space)?;
    Ok(OrdinaryPart { basis: fitting_decompose(&op).ordinary, space })
}

/// The base is the projective line, whose Hasse–Witt invariant is 0, so the expected rank is deg D_red − 1.
pub fn nakajima_check<F: FiniteField>(c: &CurveModel<F>, n_values: &[i64]) -> Result<NakajimaReport> {
    if !matches!(c.kind(), CurveKind::ArtinSchreier { .. }) {
        return Err(Error::Precondition("Nakajima check needs an Artin–Schreier cover".into()));
    }
    let f = c.field();
    let p = c.p();
    let dred = DivisorData::reduced(&c.branch_places());
    if dred.parts.is_empty() {
        return Err(Error::Precondition("cover is unramified".into()));
    }
    let expected_rank = dred.degree() - 1;
    let first = ordinary_part(c, &dred.multiple(*n_values.first().unwrap_or(&1)))?;
    let ob = &first.basis;
    let k = ob.len();
    // σ: y ↦ y+1 restricted to the ordinary part, in coordinates of its basis.
    let cols = ob
        .iter()
        .map(|v| {
            let w = first.space.from_coords(v);
            let sv = first
                .space
                .coords(&c.sigma_differential(&w, 1))
                .ok_or_else(|| Error::Consistency("σ leaves the space".into()))?;
            coords_in(f, ob, &sv).ok_or_else(|| Error::Consistency("σ leaves the ordinary part".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let module = GroupRingModule::new(CyclicPLevel::new(p, 2)?, Matrix::from_columns(f, k, &cols))?;
    let fr = module.is_free_of_rank()?;
    // Ordinary parts for different n must coincide inside the largest space.
    let mut independent = true;
    let parts: Vec<OrdinaryPart<F>> =
        n_values.iter().map(|n| ordinary_part(c, &dred.multiple(*n))).collect::<Result<_>>()?;
    let big = n_values.iter().zip(&parts).max_by_key(|(n, _)| **n).map(|(_, o)| o).unwrap();
    let embed = |o: &OrdinaryPart<F>| -> Result<Vec<Vec<F::Elem>>> {
        o.basis
            .iter()
            .map(|v| {
                big.space
                    .coords(&o.space.from_coords(v))
                    .ok_or_else(|| Error::Consistency("spaces are not nested".into()))
            })
            .collect()
    };
    let reference = span_basis(f, big.space.dim(), &embed(big)?);
    for o in &parts {
        let e = embed(o)?;
        let mut joint = reference.clone();
        joint.extend(e.iter().cloned());
        if e.len() != reference.len() || span_basis(f, big.space.dim(), &joint).len() != reference.len() {
            independent = false;
        }
    }
    Ok(NakajimaReport {
        p,
        branch_points: dred.parts.len(),
        expected_rank,
        ordinary_dim: k,
        free: fr.free && fr.rank == Some(expected_rank.max(0) as usize),
        rank: fr.rank,
        independent_of_n: independent,
        gamma_cover: hasse_witt(c)?.gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PrimeField;
    use crate::curves::ratfunc::RatFunc;

    fn cover(p: u64, poles: &[u64]) -> CurveModel<PrimeField> {
        let f = PrimeField::new(p).unwrap();
        let mut rhs = RatFunc::zero(&f);
        for a in poles {
            rhs = rhs.add(&RatFunc::pole(&f, a, 1));
        }
        CurveModel::artin_schreier(&f, rhs).unwrap()
    }

    #[test]
    fn one_branch_point() {
        let f = PrimeField::new(5).unwrap();
        let c = CurveModel::artin_schreier(&f, RatFunc::x(&f).pow(3)).unwrap();
        let r = nakajima_check(&c, &[1, 5]).unwrap();
        assert_eq!((r.expected_rank, r.ordinary_dim, r.free, r.independent_of_n), (0, 0, true, true));
        assert_eq!(r.gamma_cover, 0);
    }

    #[test]
    fn two_and_three_branch_points() {
        let r = nakajima_check(&cover(3, &[0, 1]), &[1, 3]).unwrap();
        assert_eq!((r.ordinary_dim, r.free, r.rank, r.independent_of_n), (3, true, Some(1), true));
        assert_eq!(r.gamma_cover, 2);
        let r = nakajima_check(&cover(5, &[0, 1, 2]), &[1, 5]).unwrap();
        assert_eq!((r.ordinary_dim, r.free, r.rank, r.independent_of_n), (10, true, Some(2), true));
        assert_eq!(r.gamma_cover, 8);
    }
}
