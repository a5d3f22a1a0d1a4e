//! Ordinary contraction onto the distinguished components, the Frobenius splitting of the
//! ordinary de Rham sequence, and residue sums of γ-images.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::carrier::{CarrierKind, IgusaCarrier};
use super::hecke::{diamond_section, gamma_map, pullback_i_star, tame_section, up_apply, upstar_apply, MeroSection, Star};
use super::teichmuller::teichmuller_decompose;
use crate::algebra::arith::primitive_root;
use crate::algebra::linalg::{in_span, inverse, rank, solve_matrix, span_basis};
use crate::algebra::{FiniteField, Matrix, PrimeField, Ring};
use crate::error::{Error, Result};
use crate::semilinear::{fitting_decompose, semilinear_dual, SemilinearOperator};
use crate::tower::{CyclicPLevel, Freeness, GroupRingModule};

type Fp = PrimeField;

fn operator_matrix(c: &IgusaCarrier, op: impl Fn(&MeroSection) -> Result<MeroSection>) -> Result<Matrix<Fp>> {
    let dim = MeroSection::zero(c).dim();
    let cols = (0..dim)
        .map(|j| {
            let e: Vec<u64> = (0..dim).map(|i| u64::from(i == j)).collect();
            Ok(op(&MeroSection::unflatten(c, &e))?.flatten())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(c.field(), dim, &cols))
}

fn require_relations(c: &IgusaCarrier) -> Result<()> {
    let bad: Vec<String> = c.verify_relations().into_iter().filter(|x| !x.holds).map(|x| format!("{} at level {}", x.relation, x.level)).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Consistency(format!("carrier relations fail: {}", bad.join("; "))))
    }
}

fn require_designated(c: &IgusaCarrier) -> Result<()> {
    let r = c.r();
    if let Some(d) = c.spec().designated_rank {
        let have = c.ordinary_basis(r).len();
        if have != d * c.group_order(r) {
            return Err(Error::Precondition(format!(
                "F_* is invertible on a part of dimension {have}, not on the designated part of rank {d}"
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionSide {
    pub star: Star,
    pub projector_image_dim: usize,
    /// i* maps the projector image isomorphically onto the F_*-ordinary part.
    pub isomorphism: bool,
    pub gamma_inverts_pullback: bool,
    pub pullback_inverts_gamma: bool,
    pub intertwining: bool,
    pub projector_commutes_with_diamonds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionReport {
    pub p: u64,
    pub r: u32,
    pub kind: CarrierKind,
    pub group_order: usize,
    pub product_dim: usize,
    pub ordinary_dim: usize,
    /// Group-ring rank d of the F_*-ordinary part.
    pub rank: Option<usize>,
    /// Dimensions of the Teichmüller eigenspaces of the ordinary part.
    pub eigenspace_dims: Vec<usize>,
    pub sides: Vec<ContractionSide>,
    pub holds: bool,
}

fn side(c: &IgusaCarrier, star: Star) -> Result<ContractionSide> {
    let r = c.r();
    let f = c.field();
    let hecke = |x: &MeroSection| match star {
        Star::Infinity => up_apply(c, x),
        Star::Zero => upstar_apply(c, x),
    };
    let m = operator_matrix(c, hecke)?;
    let fit = fitting_decompose(&SemilinearOperator::linear(m)?);
    let image = &fit.ordinary;
    let ord = c.ordinary_basis(r);
    let pulled: Vec<Vec<u64>> = image.iter().map(|x| pullback_i_star(&MeroSection::unflatten(c, x), star)).collect();
    let dim_r = c.dim(r);
    let isomorphism =
        image.len() == ord.len() && pulled.iter().all(|v| in_span(f, ord, v)) && span_basis(f, dim_r, &pulled).len() == image.len();
    let mut gamma_inverts_pullback = true;
    for (x, v) in image.iter().zip(&pulled) {
        gamma_inverts_pullback &= gamma_map(c, star, v).map(|g| g.flatten() == *x).unwrap_or(false);
    }
    let mut pullback_inverts_gamma = true;
    let mut intertwining = true;
    for nu in ord {
        let g = gamma_map(c, star, nu)?;
        pullback_inverts_gamma &= pullback_i_star(&g, star) == *nu;
        let moved = match star {
            Star::Infinity => c.frob(r, nu),
            Star::Zero => c.tame_pow(r, -1, &c.frob(r, nu)),
        };
        intertwining &= hecke(&g)? == gamma_map(c, star, &moved)?;
    }
    let p = c.p();
    let g = primitive_root(p).expect("p is an odd prime");
    let e = &fit.projector;
    let mut commutes = true;
    for u in [g, 1 + p] {
        let d = operator_matrix(c, |x| Ok(diamond_section(c, u, x)))?;
        commutes &= e.mul(&d) == d.mul(e);
    }
    let t = operator_matrix(c, |x| Ok(tame_section(c, 1, x)))?;
    commutes &= e.mul(&t) == t.mul(e);
    Ok(ContractionSide {
        star,
        projector_image_dim: image.len(),
        isomorphism,
        gamma_inverts_pullback,
        pullback_inverts_gamma,
        intertwining,
        projector_commutes_with_diamonds: commutes,
    })
}

/// The ordinary projectors of U_p and U_p* on the product contract onto M_r^{ord} via i^∞* and i⁰*.
pub fn ordinary_contraction_check(c: &IgusaCarrier) -> Result<ContractionReport> {
    require_relations(c)?;
    require_designated(c)?;
    let r = c.r();
    let ord = c.ordinary_basis(r);
    let g = primitive_root(c.p()).expect("odd prime");
    let modulus = c.p().pow(r);
    let g = crate::algebra::arith::pow_mod(g, modulus / c.p(), modulus);
    let action = restrict(c.field(), ord, &Matrix::from_columns(c.field(), c.dim(r), &ord.iter().map(|v| c.diamond(r, g, v)).collect::<Vec<_>>()))?;
    let eigenspace_dims = if ord.is_empty() { vec![0; c.p() as usize - 1] } else { teichmuller_decompose(c.field(), c.p(), &action)?.dims };
    let sides = vec![side(c, Star::Infinity)?, side(c, Star::Zero)?];
    let holds = sides.iter().all(|s| {
        s.isomorphism && s.gamma_inverts_pullback && s.pullback_inverts_gamma && s.intertwining && s.projector_commutes_with_diamonds
    });
    Ok(ContractionReport {
        p: c.p(),
        r,
        kind: c.kind(),
        group_order: c.group_order(r),
        product_dim: MeroSection::zero(c).dim(),
        ordinary_dim: ord.len(),
        rank: c.ordinary_rank(),
        eigenspace_dims,
        sides,
        holds,
    })
}

/// Matrix of an operator on span(basis), given its images as columns.
fn restrict(f: &Fp, basis: &[Vec<u64>], images: &Matrix<Fp>) -> Result<Matrix<Fp>> {
    if basis.is_empty() {
        return Ok(Matrix::zeros(f, 0, 0));
    }
    let b = Matrix::from_columns(f, images.rows(), basis);
    solve_matrix(&b, images).ok_or_else(|| Error::Consistency("subspace is not stable".into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplittingReport {
    pub p: u64,
    pub r: u32,
    pub group_order: usize,
    pub h0: Freeness,
    pub middle: Freeness,
    pub h1: Freeness,
    /// Group-ring ranks of H⁰, the middle term and H¹.
    pub ranks: [Option<usize>; 3],
    pub exact: bool,
    /// The section s = F^* ∘ lift ∘ (F^*|_{H¹})^{-1} splits the sequence.
    pub split: bool,
    pub section_equivariant: bool,
    pub section_frobenius_stable: bool,
    pub holds: bool,
}

/// Checks 0 → H⁰ → H → H¹ → 0 with H¹ the contragredient of H⁰, F^* zero on H⁰ and a random
/// equivariant coupling H¹ → H⁰ in the Frobenius of the middle term.
pub fn split_sequence_check(h0: &GroupRingModule<Fp>, frob_h0: &Matrix<Fp>, seed: u64) -> Result<SplittingReport> {
    let f = *h0.field();
    let m = h0.dim();
    let level = h0.level();
    let n = level.order();
    if frob_h0.rows() != m || !frob_h0.is_square() {
        return Err(Error::Dimension("Frobenius on H⁰ has the wrong size".into()));
    }
    let g0 = h0.gamma().clone();
    let g0_inv = inverse(&g0).ok_or_else(|| Error::Invalid("group action is not invertible".into()))?;
    let g1 = g0_inv.transpose();
    let f1 = semilinear_dual(&SemilinearOperator::linear(frob_h0.clone())?, &Matrix::identity(&f, m))?.matrix().clone();
    let f1_inv = inverse(&f1).ok_or_else(|| Error::Precondition("F^* is not invertible on the ordinary part of H¹".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c0 = Matrix::from_fn(&f, m, m, |_, _| f.random(&mut rng));
    let g1_inv = g0.transpose();
    let mut coupling = Matrix::zeros(&f, m, m);
    let (mut a, mut b) = (Matrix::identity(&f, m), Matrix::identity(&f, m));
    for _ in 0..n {
        coupling = coupling.add(&a.mul(&c0).mul(&b));
        a = a.mul(&g0);
        b = b.mul(&g1_inv);
    }
    let zero = Matrix::zeros(&f, m, m);
    let id = Matrix::identity(&f, m);
    let gamma_h = g0.direct_sum(&g1);
    let frob_h = zero.hstack(&coupling).vstack(&zero.hstack(&f1));
    let incl = id.vstack(&zero);
    let proj = zero.hstack(&id);
    let exact = proj.mul(&incl).is_zero() && rank(&incl) == m && rank(&proj) == m;
    let section = frob_h.mul(&zero.vstack(&id)).mul(&f1_inv);
    let split = proj.mul(&section).is_identity();
    let section_equivariant = gamma_h.mul(&section) == section.mul(&g1) && frob_h.mul(&gamma_h) == gamma_h.mul(&frob_h);
    let section_frobenius_stable = frob_h.mul(&section) == section.mul(&f1);
    let h0f = h0.is_free_of_rank()?;
    let middle = GroupRingModule::new(level, gamma_h)?.is_free_of_rank()?;
    let h1 = GroupRingModule::new(level, g1)?.is_free_of_rank()?;
    let ranks = [h0f.rank, middle.rank, h1.rank];
    let ranks_ok = match ranks {
        [Some(d0), Some(d), Some(d1)] => d == 2 * d0 && d1 == d0,
        _ => false,
    };
    let holds = exact && split && section_equivariant && section_frobenius_stable && ranks_ok;
    Ok(SplittingReport {
        p: level.p,
        r: level.r,
        group_order: n,
        h0: h0f,
        middle,
        h1,
        ranks,
        exact,
        split,
        section_equivariant,
        section_frobenius_stable,
        holds,
    })
}

/// Splitting check on the F_*-ordinary part of M_r with its Z/p^{r−1} action.
pub fn frobenius_splitting_check(c: &IgusaCarrier, seed: u64) -> Result<SplittingReport> {
    require_relations(c)?;
    require_designated(c)?;
    let r = c.r();
    let f = c.field();
    let ord = c.ordinary_basis(r);
    let dim = c.dim(r);
    let gamma = restrict(f, ord, &Matrix::from_columns(f, dim, &ord.iter().map(|v| c.diamond(r, 1 + c.p(), v)).collect::<Vec<_>>()))?;
    let frob = restrict(f, ord, &Matrix::from_columns(f, dim, &ord.iter().map(|v| c.frob(r, v)).collect::<Vec<_>>()))?;
    let h0 = GroupRingModule::new(CyclicPLevel::new(c.p(), r)?, gamma)?;
    split_sequence_check(&h0, &frob, seed)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueReport {
    pub star: Star,
    pub skipped: bool,
    pub functionals_valid: bool,
    /// Σ over components of the residue of γ^star(ν) at the crossing.
    pub total: Option<u64>,
    /// res(ν) − res(F_*^{-1} ν).
    pub telescoped: Option<u64>,
    pub holds: bool,
}

pub fn residue_sum_check(c: &IgusaCarrier, star: Star, nu: &[u64]) -> Result<ResidueReport> {
    let r = c.r();
    if !(1..=r).all(|s| c.residue(s, &c.zero(s)).is_some()) {
        return Ok(ResidueReport { star, skipped: true, functionals_valid: false, total: None, telescoped: None, holds: true });
    }
    let functionals_valid = c.verify_relations().iter().filter(|x| x.relation.starts_with("res")).all(|x| x.holds);
    let f = c.field();
    let g = gamma_map(c, star, nu)?;
    let total = g.parts.iter().fold(0, |acc, (i, v)| f.add(&acc, &c.residue(i.level(), v).unwrap()));
    let back = c.frob_inverse_pow(r, 1, nu)?;
    let telescoped = f.sub(&c.residue(r, nu).unwrap(), &c.residue(r, &back).unwrap());
    Ok(ResidueReport {
        star,
        skipped: false,
        functionals_valid,
        total: Some(total),
        telescoped: Some(telescoped),
        holds: functionals_valid && total == 0 && telescoped == 0,
    })
}
