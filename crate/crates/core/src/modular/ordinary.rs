//! Ordinary ranks d_k from Newton polygons of T_p, and the identity γ + δ − 1 = Σ_{k=3}^{p+1} d_k.

use serde::Serialize;

use super::oracles::{gamma_oracle, supersingular_count};
use super::symbols::{HeckeLabel, ModularSymbolSpace};
use crate::algebra::arith::is_prime;
use crate::algebra::linalg::{charpoly, kernel_with_free};
use crate::algebra::{newton_unit_root_count, Matrix, Poly, Rationals};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrdinaryRank {
    pub level: u64,
    pub weight: u32,
    pub p: u64,
    pub cuspidal_dim: usize,
    pub slope_zero_length: usize,
    pub d_k: usize,
    /// Unit-root count of T_p on the star +1 part.
    pub plus_d_k: usize,
    /// Unit-root count of T_p on the star −1 part.
    pub minus_d_k: usize,
}

fn restrict(m: &Matrix<Rationals>, basis: &[Vec<num_rational::BigRational>], free: &[usize]) -> Matrix<Rationals> {
    let cols: Vec<_> = basis
        .iter()
        .map(|b| {
            let img = m.mul_vec(b);
            free.iter().map(|&c| img[c].clone()).collect()
        })
        .collect();
    Matrix::from_columns(&Rationals, basis.len(), &cols)
}

fn star_part(t: &Matrix<Rationals>, star: &Matrix<Rationals>, sign: i64) -> Result<Poly<Rationals>> {
    let n = t.rows();
    let shifted = star.sub(&Matrix::identity(&Rationals, n).scale(&num_rational::BigRational::from_integer(sign.into())));
    let (basis, free) = kernel_with_free(&shifted);
    charpoly(&restrict(t, &basis, &free))
}

/// d_k of a space at a prime p not dividing its level.
pub fn ordinary_rank(s: &ModularSymbolSpace, p: u64) -> Result<OrdinaryRank> {
    let k = s.weight();
    if !is_prime(p) || s.level() % p == 0 {
        return Err(Error::Precondition(format!("need a prime p ∤ {}, got {p}", s.level())));
    }
    if u64::from(k) > p + 1 {
        return Err(Error::Precondition(format!("weight {k} exceeds p + 1 = {}", p + 1)));
    }
    let mut out = OrdinaryRank {
        level: s.level(),
        weight: k,
        p,
        cuspidal_dim: s.cuspidal_dim(),
        slope_zero_length: 0,
        d_k: 0,
        plus_d_k: 0,
        minus_d_k: 0,
    };
    if s.cuspidal_dim() == 0 {
        return Ok(out);
    }
    let t = s.hecke_matrix(&HeckeLabel::T(p))?.matrix;
    let full = charpoly(&t)?;
    let len = newton_unit_root_count(&full, p)?.slope_zero_length;
    if len % 2 == 1 {
        return Err(Error::Consistency(format!("odd slope-zero length {len} for T_{p} at level {}, weight {k}", s.level())));
    }
    let star = s.hecke_matrix(&HeckeLabel::Star)?.matrix;
    if t.mul(&star) != star.mul(&t) {
        return Err(Error::Consistency(format!("T_{p} does not commute with the star involution")));
    }
    let plus = star_part(&t, &star, 1)?;
    let minus = star_part(&t, &star, -1)?;
    if plus.mul(&minus) != full {
        return Err(Error::Consistency("star eigenspace charpolys do not multiply to the full one".into()));
    }
    out.slope_zero_length = len;
    out.d_k = len / 2;
    out.plus_d_k = newton_unit_root_count(&plus, p)?.slope_zero_length;
    out.minus_d_k = newton_unit_root_count(&minus, p)?.slope_zero_length;
    if out.plus_d_k != out.d_k || out.minus_d_k != out.d_k {
        return Err(Error::Consistency(format!(
            "d_{k} disagrees: halved {} vs star parts {} and {}",
            out.d_k, out.plus_d_k, out.minus_d_k
        )));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrdinaryRankTable {
    pub p: u64,
    #[serde(rename = "N")]
    pub level: u64,
    /// Ranks for 2 ≤ k ≤ p + 1 in increasing weight.
    pub ranks: Vec<OrdinaryRank>,
    pub gamma: usize,
    pub delta: u64,
    pub d: i64,
    pub sum_d_k: usize,
    /// γ from the curve oracle equals d_2 from modular symbols.
    pub gamma_matches_d2: bool,
    /// d = Σ_{k=3}^{p+1} d_k.
    pub holds: bool,
    /// d = d_{p+1}, the invariant part under the diamond action.
    pub top_weight_matches: bool,
}

impl OrdinaryRankTable {
    pub fn d_k(&self, k: u32) -> Option<usize> {
        self.ranks.iter().find(|r| r.weight == k).map(|r| r.d_k)
    }
}

/// γ from a curve model, δ from supersingular enumeration and d_k from modular symbols.
pub fn verify_d_identity(p: u64, level: u64) -> Result<OrdinaryRankTable> {
    if !is_prime(p) || p == 2 || level % p == 0 || level * p <= 4 {
        return Err(Error::Precondition(format!("need an odd prime p ∤ N with Np > 4, got p={p}, N={level}")));
    }
    let gamma = gamma_oracle(p, level)?.gamma;
    let delta = supersingular_count(p, level)?.delta;
    let ranks = (2..=(p as u32 + 1))
        .map(|k| ordinary_rank(&ModularSymbolSpace::build(level, k)?, p))
        .collect::<Result<Vec<_>>>()?;
    let sum_d_k = ranks.iter().filter(|r| r.weight >= 3).map(|r| r.d_k).sum();
    let d = gamma as i64 + delta as i64 - 1;
    let gamma_matches_d2 = ranks[0].d_k == gamma;
    let top_weight_matches = ranks.last().map(|r| r.d_k as i64) == Some(d);
    Ok(OrdinaryRankTable {
        p,
        level,
        ranks,
        gamma,
        delta,
        d,
        sum_d_k,
        gamma_matches_d2,
        holds: d == sum_d_k as i64,
        top_weight_matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        let s = ModularSymbolSpace::build(7, 2).unwrap();
        assert_eq!(ordinary_rank(&s, 5).unwrap().d_k, 0);
        let s = ModularSymbolSpace::build(11, 2).unwrap();
        let r = ordinary_rank(&s, 5).unwrap();
        assert_eq!((r.cuspidal_dim, r.d_k), (2, 1));
        // a_3 = −1 for 11a is a unit at 3, and a_2 = −2 is not at 2.
        assert_eq!(ordinary_rank(&s, 3).unwrap().d_k, 1);
        assert_eq!(ordinary_rank(&s, 2).unwrap().d_k, 0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = ModularSymbolSpace::build(5, 4).unwrap();
        assert!(ordinary_rank(&s, 5).is_err());
        assert!(ordinary_rank(&s, 2).is_err());
        assert!(verify_d_identity(3, 1).is_err());
    }

    fn ranks(t: &OrdinaryRankTable) -> Vec<usize> {
        t.ranks.iter().map(|r| r.d_k).collect()
    }

    #[test]
    fn table_at_five_seven() {
        let t = verify_d_identity(5, 7).unwrap();
        assert_eq!((t.gamma, t.delta, t.d), (0, 8, 7));
        assert_eq!(ranks(&t), vec![0, 0, 3, 4, 7]);
        assert_eq!(t.sum_d_k, 14);
        assert!(t.gamma_matches_d2 && t.top_weight_matches && !t.holds);
    }

    #[test]
    fn table_at_five_eleven() {
        let t = verify_d_identity(5, 11).unwrap();
        assert_eq!((t.gamma, t.delta, t.d), (1, 20, 20));
        assert_eq!(ranks(&t), vec![1, 5, 10, 15, 20]);
        assert!(t.gamma_matches_d2 && t.top_weight_matches);
    }
}
