//! Idempotents f_j = (1/(p−1)) Σ_g τ^{−j}(g) ⟨g⟩ for an action of (Z/p)^×.

use serde::Serialize;

use crate::algebra::arith::{is_prime, primitive_root};
use crate::algebra::linalg::rank;
use crate::algebra::{Matrix, PrimeField, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TeichmullerDecomposition {
    /// f_0, …, f_{p−2}.
    pub idempotents: Vec<Matrix<PrimeField>>,
    pub dims: Vec<usize>,
    /// f' = Σ_{j≠0} f_j, the projection away from the 0-eigenspace.
    pub f_prime: Matrix<PrimeField>,
    pub sum_is_identity: bool,
    pub orthogonal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TeichmullerSummary {
    pub dims: Vec<usize>,
    pub sum_is_identity: bool,
    pub orthogonal: bool,
}

impl TeichmullerDecomposition {
    pub fn summary(&self) -> TeichmullerSummary {
        TeichmullerSummary { dims: self.dims.clone(), sum_is_identity: self.sum_is_identity, orthogonal: self.orthogonal }
    }
}

/// `action` is the image of the smallest primitive root mod p. τ is the Teichmüller character
/// when the base has characteristic p, and otherwise a character sending that root to an
/// element of exact order p − 1.
pub fn teichmuller_decompose(field: &PrimeField, p: u64, action: &Matrix<PrimeField>) -> Result<TeichmullerDecomposition> {
    if !is_prime(p) || p == 2 {
        return Err(Error::Invalid(format!("need an odd prime, got {p}")));
    }
    let l = field.p();
    let order = p - 1;
    if order % l == 0 {
        return Err(Error::Precondition(format!("p − 1 = {order} is not invertible in characteristic {l}")));
    }
    if !action.is_square() {
        return Err(Error::Dimension("action must be square".into()));
    }
    let n = action.rows();
    if !action.pow(order).is_identity() {
        return Err(Error::Invalid(format!("the action does not factor through (Z/{p})^×")));
    }
    let g = primitive_root(p).unwrap();
    let tau_g = if l == p {
        g % p
    } else {
        (2..l)
            .find(|x| {
                let xe = field.pow(x, order);
                xe == 1 && crate::algebra::arith::factorize(order).iter().all(|(q, _)| field.pow(x, order / q) != 1)
            })
            .ok_or_else(|| Error::Unsupported(format!("F_{l} has no character of order {order}")))?
    };
    let inv_order = field.inv(&field.from_i64(order as i64)).unwrap();
    let powers: Vec<Matrix<PrimeField>> =
        std::iter::successors(Some(Matrix::identity(field, n)), |m| Some(m.mul(action))).take(order as usize).collect();
    let tau_inv = field.inv(&tau_g).unwrap();
    let idempotents: Vec<Matrix<PrimeField>> = (0..order)
        .map(|j| {
            let step = field.pow(&tau_inv, j);
            let mut coef = field.one();
            let mut acc = Matrix::zeros(field, n, n);
            for m in &powers {
                acc = acc.add(&m.scale(&coef));
                coef = field.mul(&coef, &step);
            }
            acc.scale(&inv_order)
        })
        .collect();
    let dims = idempotents.iter().map(rank).collect();
    let total = idempotents.iter().fold(Matrix::zeros(field, n, n), |a, e| a.add(e));
    let mut orthogonal = true;
    for (i, a) in idempotents.iter().enumerate() {
        for (j, b) in idempotents.iter().enumerate() {
            let prod = a.mul(b);
            orthogonal &= if i == j { prod == *a } else { prod.is_zero() };
        }
    }
    let f_prime = idempotents[1..].iter().fold(Matrix::zeros(field, n, n), |a, e| a.add(e));
    Ok(TeichmullerDecomposition { idempotents, dims, f_prime, sum_is_identity: total.is_identity(), orthogonal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::shift_matrix;

    #[test]
    fn regular_representation() {
        for p in [3u64, 5, 7] {
            let f = PrimeField::new(p).unwrap();
            let d = teichmuller_decompose(&f, p, &shift_matrix(&f, p as usize - 1)).unwrap();
            assert!(d.sum_is_identity && d.orthogonal);
            assert_eq!(d.dims, vec![1; p as usize - 1]);
            let complement = Matrix::identity(&f, p as usize - 1).sub(&d.idempotents[0]);
            assert_eq!(d.f_prime, complement);
        }
    }

    #[test]
    fn trivial_action() {
        let f = PrimeField::new(5).unwrap();
        let d = teichmuller_decompose(&f, 5, &Matrix::identity(&f, 3)).unwrap();
        assert!(d.idempotents[0].is_identity());
        assert!(d.idempotents[1..].iter().all(|e| e.is_zero()));
        assert!(d.f_prime.is_zero());
    }

    #[test]
    fn other_characteristics() {
        // F_13 contains the fourth roots of unity needed for p = 5.
        let f = PrimeField::new(13).unwrap();
        let d = teichmuller_decompose(&f, 5, &shift_matrix(&f, 4)).unwrap();
        assert_eq!(d.dims, vec![1, 1, 1, 1]);
        let f = PrimeField::new(2).unwrap();
        assert!(matches!(teichmuller_decompose(&f, 5, &Matrix::identity(&f, 1)), Err(Error::Precondition(_))));
        let f = PrimeField::new(7).unwrap();
        assert!(matches!(teichmuller_decompose(&f, 5, &Matrix::identity(&f, 1)), Err(Error::Unsupported(_))));
    }
}
