//! Atkin–Lehner relations at level Np in weight 2, the intersection pairing on cuspidal symbols,
//! and the twisted pairing ⟨x, y⟩ = (x, w U_p* y) on the ordinary part.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::symbols::{HeckeLabel, ModularSymbolSpace};
use crate::algebra::arith::{gcd_u, inv_mod, is_prime};
use crate::algebra::linalg::{charpoly, image, inverse, rank};
use crate::algebra::ring::rational_mod;
use crate::algebra::{newton_unit_root_count, Matrix, PrimeField, Rationals};
use crate::error::{Error, Result};

type Q = BigRational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtkinLehnerReport {
    pub p: u64,
    #[serde(rename = "N")]
    pub tame_level: u64,
    pub level: u64,
    pub cuspidal_dim: usize,
    pub relations: Vec<RelationCheck>,
    pub pairing_antisymmetric: bool,
    pub pairing_nondegenerate: bool,
    pub hecke_adjoint: Vec<RelationCheck>,
    pub twisted_self_adjoint: Vec<RelationCheck>,
    pub ordinary_dim: usize,
    pub ordinary_dim_newton: usize,
    pub twisted_perfect_on_ordinary: bool,
    pub holds: bool,
}

fn mat(space: &ModularSymbolSpace, label: HeckeLabel) -> Result<Matrix<Rationals>> {
    Ok(space.hecke_matrix(&label)?.matrix)
}

/// Corners of Farey triangles, grouped by cusp: for each pair index h, the reference corner of
/// its cusp orbit under h ↦ hT (T = [[1, 1], [0, 1]]) and the number of steps from it.
fn corner_positions(space: &ModularSymbolSpace) -> Vec<(usize, usize)> {
    let m = space.manin();
    let n = m.len();
    let canon = |i: usize| -> usize {
        let (c, d) = m.pair(i);
        let neg = m.index_of(-(c as i64), -(d as i64)).unwrap();
        i.min(neg)
    };
    let mut pos: Vec<Option<(usize, usize)>> = vec![None; n];
    for start in 0..n {
        let start = canon(start);
        if pos[start].is_some() {
            continue;
        }
        let mut h = start;
        let mut steps = 0;
        loop {
            pos[h] = Some((start, steps));
            let (c, d) = m.pair(h);
            h = canon(m.index_of(c as i64, (c + d) as i64).unwrap());
            steps += 1;
            if h == start {
                break;
            }
        }
    }
    (0..n).map(|i| pos[canon(i)].unwrap()).collect()
}

/// Intersection pairing on the cuspidal subspace of weight-2 symbols.
///
/// A cuspidal cycle is pushed off the cusps into a cycle on the dual graph of the Farey
/// tessellation; the pairing counts signed crossings with the edges of the other cycle.
pub fn intersection_gram(space: &ModularSymbolSpace) -> Result<Matrix<Rationals>> {
    if space.weight() != 2 {
        return Err(Error::Unsupported("the intersection pairing is implemented in weight 2".into()));
    }
    let m = space.manin();
    let nf = space.free_symbol_count();
    let pos = corner_positions(space);
    // Crossing an edge E_k rightwards near its upper cusp counts −1 against E_k.
    let edge = |k: usize, c: i64, acc: &mut [Q]| {
        if let Some((f, s)) = space.two_term_class(space.generator_index(0, k)) {
            acc[f] -= Q::from_integer((c * s).into());
        }
    };
    let arc_to = |h: usize, c: i64, acc: &mut [Q]| {
        let (start, steps) = pos[h];
        let mut k = start;
        for _ in 0..steps {
            let (a, b) = m.pair(k);
            k = m.index_of(a as i64, (a + b) as i64).unwrap();
            edge(k, c, acc);
        }
    };
    let tau = |h: usize| -> usize {
        let (c, d) = m.pair(h);
        m.index_of(d as i64, -(c as i64) - d as i64).unwrap()
    };
    let free_of_basis: Vec<usize> = (0..space.dim())
        .map(|j| space.two_term_class(space.basis_generator(j)).expect("basis generators are free").0)
        .collect();
    let pair_of_basis: Vec<usize> = (0..space.dim()).map(|j| space.basis_generator(j)).collect();
    let basis = space.cuspidal_basis();
    let duals: Vec<Vec<Q>> = basis
        .iter()
        .map(|z| {
            let mut acc = vec![Q::zero(); nf];
            for (j, c) in z.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut piece = vec![Q::zero(); nf];
                arc_to(pair_of_basis[j], 1, &mut piece);
                arc_to(tau(pair_of_basis[j]), -1, &mut piece);
                for (a, b) in acc.iter_mut().zip(piece) {
                    *a += c * b;
                }
            }
            acc
        })
        .collect();
    let d = basis.len();
    Ok(Matrix::from_fn(&Rationals, d, d, |i, j| {
        basis[i].iter().enumerate().fold(Q::zero(), |acc, (t, x)| acc + x * &duals[j][free_of_basis[t]])
    }))
}

fn check(relations: &mut Vec<RelationCheck>, name: impl Into<String>, holds: bool) {
    relations.push(RelationCheck { relation: name.into(), holds });
}

fn reduce_mod_p(m: &Matrix<Rationals>, p: u64) -> Result<Matrix<PrimeField>> {
    let f = PrimeField::new(p)?;
    let data = m
        .data()
        .iter()
        .map(|x| rational_mod(x, p).ok_or_else(|| Error::Precondition(format!("matrix is not {p}-integral"))))
        .collect::<Result<Vec<_>>>()?;
    Matrix::new(f, m.rows(), m.cols(), data)
}

/// Relations among w, U_p, U_p*, T_ℓ and diamonds at level Np, and the pairing checks.
pub fn atkin_lehner_check(p: u64, tame_level: u64, primes: &[u64]) -> Result<AtkinLehnerReport> {
    if !is_prime(p) || p == 2 || tame_level % p == 0 {
        return Err(Error::Precondition(format!("need an odd prime p ∤ N, got p={p}, N={tame_level}")));
    }
    let level = tame_level * p;
    let space = ModularSymbolSpace::build(level, 2)?;
    let dim = space.cuspidal_dim();
    if dim == 0 {
        return Err(Error::Precondition(format!("no cusp forms at level {level}")));
    }
    let w = mat(&space, HeckeLabel::AtkinLehner)?;
    let up = mat(&space, HeckeLabel::U(p))?;
    let ups = mat(&space, HeckeLabel::UStar(p))?;
    let w_inv = inverse(&w).ok_or_else(|| Error::Consistency("w is not invertible".into()))?;
    let mut relations = Vec::new();

    let minus_one = mat(&space, HeckeLabel::Diamond(level - 1))?;
    check(&mut relations, "w^2 = <-1>", w.mul(&w) == minus_one);
    for u in (2..level).filter(|u| gcd_u(*u, level) == 1).take(3) {
        let du = mat(&space, HeckeLabel::Diamond(u))?;
        let dinv = mat(&space, HeckeLabel::Diamond(inv_mod(u, level).unwrap()))?;
        check(&mut relations, format!("w <{u}> = <{u}>^-1 w"), w.mul(&du) == dinv.mul(&w));
    }
    check(&mut relations, format!("w U_{p} = U_{p}* w"), w.mul(&up) == ups.mul(&w));
    let mut tstars = Vec::new();
    for &l in primes {
        if !is_prime(l) || level % l == 0 {
            return Err(Error::Precondition(format!("T_{l} needs a prime not dividing {level}")));
        }
        let t = mat(&space, HeckeLabel::T(l))?;
        let dl_inv = mat(&space, HeckeLabel::Diamond(inv_mod(l % level, level).unwrap()))?;
        let tstar = w.mul(&t).mul(&w_inv);
        check(&mut relations, format!("w T_{l} w^-1 = <{l}>^-1 T_{l}"), tstar == dl_inv.mul(&t));
        tstars.push((l, t, tstar));
    }

    let g = intersection_gram(&space)?;
    let antisym = g.transpose() == g.neg();
    let nondeg = rank(&g) == dim;
    let mut hecke_adjoint = Vec::new();
    // (T x, y) = (x, T* y) with T* = w T w⁻¹.
    for (l, t, tstar) in &tstars {
        check(&mut hecke_adjoint, format!("(T_{l} x, y) = (x, T_{l}* y)"), t.transpose().mul(&g) == g.mul(tstar));
    }
    check(&mut hecke_adjoint, format!("(U_{p} x, y) = (x, U_{p}* y)"), up.transpose().mul(&g) == g.mul(&ups));

    let g_tw = g.mul(&w.mul(&ups));
    let mut twisted_self_adjoint = Vec::new();
    let mut stars: Vec<(String, Matrix<Rationals>)> = vec![(format!("U_{p}*"), ups.clone())];
    for (l, _, tstar) in &tstars {
        stars.push((format!("T_{l}*"), tstar.clone()));
    }
    for u in (2..level).filter(|u| gcd_u(*u, level) == 1).take(2) {
        stars.push((format!("<{u}>"), mat(&space, HeckeLabel::Diamond(u))?));
    }
    for (name, ts) in &stars {
        check(&mut twisted_self_adjoint, format!("<{name} x, y> = <x, {name} y>"), ts.transpose().mul(&g_tw) == g_tw.mul(ts));
    }

    let ordinary_dim_newton = newton_unit_root_count(&charpoly(&ups)?, p)?.slope_zero_length;
    let ups_p = reduce_mod_p(&ups, p)?;
    let gtw_p = reduce_mod_p(&g_tw, p)?;
    let proj = ups_p.pow(2 * dim as u64);
    let ord = image(&proj);
    let f = PrimeField::new(p)?;
    let b = Matrix::from_columns(&f, dim, &ord);
    let restricted = b.transpose().mul(&gtw_p).mul(&b);
    let perfect = rank(&restricted) == ord.len();

    let holds = relations.iter().chain(&hecke_adjoint).chain(&twisted_self_adjoint).all(|r| r.holds)
        && antisym
        && nondeg
        && perfect
        && ord.len() == ordinary_dim_newton;
    Ok(AtkinLehnerReport {
        p,
        tame_level,
        level,
        cuspidal_dim: dim,
        relations,
        pairing_antisymmetric: antisym,
        pairing_nondegenerate: nondeg,
        hecke_adjoint,
        twisted_self_adjoint,
        ordinary_dim: ord.len(),
        ordinary_dim_newton,
        twisted_perfect_on_ordinary: perfect,
        holds,
    })
}

/// Primes not dividing the level, for use as T_ℓ in the checks.
pub fn auxiliary_primes(level: u64, count: usize) -> Vec<u64> {
    (2..).filter(|l| is_prime(*l) && level % l != 0).take(count).collect()
}
