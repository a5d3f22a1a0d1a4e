//! Frobenius-semilinear operators M∘φ^e over finite fields and their Fitting decomposition.

use serde::Serialize;

use crate::algebra::linalg::{image, inverse, kernel, solve_matrix, span_basis};
use crate::algebra::{FiniteField, Matrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SemilinearOperator<F: FiniteField> {
    matrix: Matrix<F>,
    twist: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FittingDecomposition<F: FiniteField> {
    pub ordinary: Vec<Vec<F::Elem>>,
    pub nilpotent: Vec<Vec<F::Elem>>,
    pub projector: Matrix<F>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FittingDims {
    pub ordinary: usize,
    pub nilpotent: usize,
}

impl<F: FiniteField> FittingDecomposition<F> {
    pub fn dims(&self) -> FittingDims {
        FittingDims { ordinary: self.ordinary.len(), nilpotent: self.nilpotent.len() }
    }
}

/// Entry-wise φ^e.
pub fn frob_matrix<F: FiniteField>(m: &Matrix<F>, e: i64) -> Matrix<F> {
    let f = m.ring().clone();
    if e == 0 || f.degree() == 1 {
        return m.clone();
    }
    m.map(|a| f.frob(a, e))
}

pub fn frob_vec<F: FiniteField>(f: &F, v: &[F::Elem], e: i64) -> Vec<F::Elem> {
    if e == 0 || f.degree() == 1 {
        return v.to_vec();
    }
    v.iter().map(|a| f.frob(a, e)).collect()
}

impl<F: FiniteField> SemilinearOperator<F> {
    pub fn new(matrix: Matrix<F>, twist: i64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension("semilinear operator needs a square matrix".into()));
        }
        Ok(SemilinearOperator { matrix, twist })
    }

    pub fn linear(matrix: Matrix<F>) -> Result<Self> {
        Self::new(matrix, 0)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn field(&self) -> &F {
        self.matrix.ring()
    }

    pub fn matrix(&self) -> &Matrix<F> {
        &self.matrix
    }

    pub fn twist(&self) -> i64 {
        self.twist
    }

    pub fn apply(&self, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        if v.len() != self.dim() {
            return Err(Error::Dimension(format!("vector of length {} for dimension {}", v.len(), self.dim())));
        }
        Ok(self.matrix.mul_vec(&frob_vec(self.field(), v, self.twist)))
    }

    /// Matrix part of op^n, which acts as M_n∘φ^{ne}.
    pub fn power_matrix(&self, n: usize) -> Matrix<F> {
        let f = self.field();
        if self.twist == 0 || f.degree() == 1 {
            return self.matrix.pow(n as u64);
        }
        let mut acc = Matrix::identity(f, self.dim());
        for i in 0..n {
            acc = acc.mul(&frob_matrix(&self.matrix, i as i64 * self.twist));
        }
        acc
    }

    pub fn power(&self, n: usize) -> Self {
        SemilinearOperator { matrix: self.power_matrix(n), twist: self.twist * n as i64 }
    }

    /// Restriction to an op-stable subspace, in the coordinates of the given basis.
    pub fn restrict(&self, basis: &[Vec<F::Elem>]) -> Result<Self> {
        let f = self.field();
        let b = Matrix::from_columns(f, self.dim(), basis);
        let images: Vec<Vec<F::Elem>> = basis.iter().map(|v| self.apply(v)).collect::<Result<_>>()?;
        let im = Matrix::from_columns(f, self.dim(), &images);
        let c = solve_matrix(&b, &im).ok_or_else(|| Error::Invalid("subspace is not stable".into()))?;
        SemilinearOperator::new(c, self.twist)
    }
}

pub fn fitting_decompose<F: FiniteField>(op: &SemilinearOperator<F>) -> FittingDecomposition<F> {
    let f = op.field().clone();
    let n = op.dim();
    let mn = op.power_matrix(n);
    let ordinary = span_basis(&f, n, &image(&mn));
    let nilpotent: Vec<Vec<F::Elem>> =
        kernel(&mn).iter().map(|v| frob_vec(&f, v, -(n as i64) * op.twist)).collect();
    let nilpotent = span_basis(&f, n, &nilpotent);
    let projector = if nilpotent.is_empty() {
        Matrix::identity(&f, n)
    } else if ordinary.is_empty() {
        Matrix::zeros(&f, n, n)
    } else {
        let mut cols = ordinary.clone();
        cols.extend(nilpotent.iter().cloned());
        let b = Matrix::from_columns(&f, n, &cols);
        let binv = inverse(&b).expect("ordinary and nilpotent parts are complementary");
        let d: Vec<F::Elem> = (0..n).map(|i| if i < ordinary.len() { f.one() } else { f.zero() }).collect();
        b.mul(&Matrix::diagonal(&f, &d)).mul(&binv)
    };
    FittingDecomposition { ordinary, nilpotent, projector }
}

pub fn ordinary_projector<F: FiniteField>(op: &SemilinearOperator<F>) -> Matrix<F> {
    fitting_decompose(op).projector
}

/// Adjoint with twist −e for ⟨x, y⟩ = xᵀ P y, so that ⟨op x, y⟩ = φ^e⟨x, adj y⟩.
pub fn semilinear_dual<F: FiniteField>(op: &SemilinearOperator<F>, pairing: &Matrix<F>) -> Result<SemilinearOperator<F>> {
    if pairing.rows() != op.dim() || !pairing.is_square() {
        return Err(Error::Dimension("pairing size differs from operator dimension".into()));
    }
    let pinv = inverse(pairing).ok_or(Error::DegeneratePairing)?;
    let inner = frob_matrix(&op.matrix.transpose().mul(pairing), -op.twist);
    SemilinearOperator::new(pinv.mul(&inner), -op.twist)
}

pub fn bilinear<F: FiniteField>(pairing: &Matrix<F>, x: &[F::Elem], y: &[F::Elem]) -> F::Elem {
    crate::algebra::matrix::dot(pairing.ring(), x, &pairing.mul_vec(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::linalg::{in_span, intersect};
    use crate::algebra::{ExtField, PrimeField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_op<F: FiniteField>(f: &F, n: usize, rank_cut: usize, twist: i64, rng: &mut ChaCha8Rng) -> SemilinearOperator<F> {
        // Mixture of an invertible block and a nilpotent block, then a random conjugation.
        let a = Matrix::from_fn(f, n, n, |i, j| {
            if i < rank_cut && j < rank_cut {
                f.random(rng)
            } else if i >= rank_cut && j == i + 1 {
                f.one()
            } else {
                f.zero()
            }
        });
        let mut q = Matrix::from_fn(f, n, n, |_, _| f.random(rng));
        while inverse(&q).is_none() {
            q = Matrix::from_fn(f, n, n, |_, _| f.random(rng));
        }
        let m = q.mul(&a).mul(&inverse(&q).unwrap());
        SemilinearOperator::new(m, twist).unwrap()
    }

    #[test]
    fn apply_examples() {
        let f = ExtField::with_modulus(3, vec![2, 2, 1]).unwrap();
        let op = SemilinearOperator::new(Matrix::identity(&f, 1), 1).unwrap();
        assert_eq!(op.apply(&[f.generator()]).unwrap(), vec![vec![1, 2]]);
        let f5 = PrimeField::new(5).unwrap();
        let m = Matrix::from_i64(&f5, &[vec![1, 2], vec![3, 4]]);
        let op = SemilinearOperator::new(m.clone(), -1).unwrap();
        assert_eq!(op.apply(&[1, 1]).unwrap(), m.mul_vec(&[1, 1]));
        assert!(op.apply(&[1]).is_err());
    }

    #[test]
    fn fitting_examples() {
        let f = PrimeField::new(5).unwrap();
        let z = SemilinearOperator::linear(Matrix::zeros(&f, 3, 3)).unwrap();
        assert_eq!(fitting_decompose(&z).dims(), FittingDims { ordinary: 0, nilpotent: 3 });
        let i = SemilinearOperator::linear(Matrix::identity(&f, 3)).unwrap();
        assert_eq!(fitting_decompose(&i).dims(), FittingDims { ordinary: 3, nilpotent: 0 });
        let d = SemilinearOperator::linear(Matrix::from_i64(&f, &[vec![1, 0], vec![0, 0]])).unwrap();
        assert_eq!(fitting_decompose(&d).dims(), FittingDims { ordinary: 1, nilpotent: 1 });
        let d2 = SemilinearOperator::linear(Matrix::from_i64(&f, &[vec![2, 0], vec![0, 0]])).unwrap();
        assert_eq!(ordinary_projector(&d2), Matrix::from_i64(&f, &[vec![1, 0], vec![0, 0]]));
        let nil = SemilinearOperator::linear(Matrix::from_i64(&f, &[vec![0, 1], vec![0, 0]])).unwrap();
        assert!(ordinary_projector(&nil).is_zero());
    }

    fn check_decomposition<F: FiniteField>(op: &SemilinearOperator<F>) {
        let f = op.field().clone();
        let n = op.dim();
        let fd = fitting_decompose(op);
        assert_eq!(fd.ordinary.len() + fd.nilpotent.len(), n);
        let e = &fd.projector;
        assert_eq!(e.mul(e), *e);
        // e commutes with M∘φ^e exactly when M φ^e(e) = e M.
        assert_eq!(op.matrix().mul(&frob_matrix(e, op.twist())), e.mul(op.matrix()));
        for v in &fd.ordinary {
            assert_eq!(e.mul_vec(v), *v);
        }
        for v in &fd.nilpotent {
            assert!(e.mul_vec(v).iter().all(|x| f.is_zero(x)));
        }
        let ord_op = op.restrict(&fd.ordinary).unwrap();
        assert!(inverse(ord_op.matrix()).is_some() || fd.ordinary.is_empty());
        if !fd.nilpotent.is_empty() {
            let nil_op = op.restrict(&fd.nilpotent).unwrap();
            assert!(nil_op.power_matrix(fd.nilpotent.len()).is_zero());
        }
    }

    #[test]
    fn randomized_up_to_fifty() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let f5 = PrimeField::new(5).unwrap();
        for (n, cut) in [(6, 3), (20, 11), (50, 27)] {
            check_decomposition(&random_op(&f5, n, cut, 0, &mut rng));
        }
        let f9 = ExtField::new(3, 2).unwrap();
        for (n, cut, tw) in [(5, 2, 1), (12, 7, -1), (30, 16, 1)] {
            check_decomposition(&random_op(&f9, n, cut, tw, &mut rng));
        }
    }

    #[test]
    fn uniqueness_on_stable_subspaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let f = ExtField::new(5, 2).unwrap();
        for _ in 0..20 {
            let op = random_op(&f, 8, 4, -1, &mut rng);
            let fd = fitting_decompose(&op);
            // Cyclic subspaces are stable; whenever op is bijective on one it must lie in the ordinary part.
            let v: Vec<_> = (0..8).map(|_| f.random(&mut rng)).collect();
            let mut gens = vec![v.clone()];
            for _ in 0..8 {
                let next = op.apply(gens.last().unwrap()).unwrap();
                gens.push(next);
            }
            let w = span_basis(&f, 8, &gens);
            if w.len() > 6 || w.is_empty() {
                continue;
            }
            let r = op.restrict(&w).unwrap();
            if inverse(r.matrix()).is_some() {
                for x in &w {
                    assert!(in_span(&f, &fd.ordinary, x));
                }
            } else {
                assert!(!intersect(&f, 8, &w, &fd.nilpotent).is_empty());
            }
        }
    }

    #[test]
    fn exactness_on_quotients() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let f = PrimeField::new(7).unwrap();
        for _ in 0..20 {
            let n = 10;
            let op = random_op(&f, n, 6, 0, &mut rng);
            let v: Vec<u64> = (0..n).map(|_| f.random(&mut rng)).collect();
            let mut gens = vec![v];
            for _ in 0..3 {
                let next = op.apply(gens.last().unwrap()).unwrap();
                gens.push(next);
            }
            // U = op-stable span generated by v; extend to a basis by standard vectors.
            let mut all = gens.clone();
            for _ in 0..n {
                let next = op.apply(all.last().unwrap()).unwrap();
                all.push(next);
            }
            let u = span_basis(&f, n, &all);
            let mut complement = Vec::new();
            for i in 0..n {
                let mut e = vec![0u64; n];
                e[i] = 1;
                let mut trial = u.clone();
                trial.extend(complement.iter().cloned());
                trial.push(e.clone());
                if span_basis(&f, n, &trial).len() == trial.len() {
                    complement.push(e);
                }
            }
            let mut basis = u.clone();
            basis.extend(complement.iter().cloned());
            let b = Matrix::from_columns(&f, n, &basis);
            let binv = inverse(&b).unwrap();
            let conj = binv.mul(op.matrix()).mul(&b);
            let k = u.len();
            let quotient = SemilinearOperator::linear(conj.submatrix(k..n, k..n)).unwrap();
            let proj = |x: &[u64]| binv.mul_vec(x)[k..].to_vec();
            let qfd = fitting_decompose(&quotient);
            let images: Vec<Vec<u64>> = fitting_decompose(&op).ordinary.iter().map(|x| proj(x)).collect();
            let span = span_basis(&f, n - k, &images);
            assert_eq!(span.len(), qfd.ordinary.len());
        }
    }

    #[test]
    fn projector_is_a_stable_power_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f = PrimeField::new(5).unwrap();
        for _ in 0..10 {
            let op = random_op(&f, 6, 3, 0, &mut rng);
            let fd = fitting_decompose(&op);
            let ord = op.restrict(&fd.ordinary).unwrap();
            let mut order = 1u64;
            let mut pw = ord.matrix().clone();
            while !pw.is_identity() {
                pw = pw.mul(ord.matrix());
                order += 1;
            }
            let exponent = order * (6 / order + 1);
            assert_eq!(op.matrix().pow(exponent), fd.projector);
        }
    }

    #[test]
    fn duality_exchange() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let f = ExtField::new(3, 2).unwrap();
        for tw in [0i64, 1, -1] {
            let op = random_op(&f, 5, 3, tw, &mut rng);
            let mut pairing = Matrix::from_fn(&f, 5, 5, |_, _| f.random(&mut rng));
            while inverse(&pairing).is_none() {
                pairing = Matrix::from_fn(&f, 5, 5, |_, _| f.random(&mut rng));
            }
            let adj = semilinear_dual(&op, &pairing).unwrap();
            assert_eq!(adj.twist(), -tw);
            for _ in 0..5 {
                let x: Vec<_> = (0..5).map(|_| f.random(&mut rng)).collect();
                let y: Vec<_> = (0..5).map(|_| f.random(&mut rng)).collect();
                let lhs = bilinear(&pairing, &op.apply(&x).unwrap(), &y);
                let rhs = f.frob(&bilinear(&pairing, &x, &adj.apply(&y).unwrap()), tw);
                assert_eq!(lhs, rhs);
            }
            let e = ordinary_projector(&op);
            let e_adj = inverse(&pairing).unwrap().mul(&e.transpose()).mul(&pairing);
            assert_eq!(e_adj, ordinary_projector(&adj));
            assert_eq!(fitting_decompose(&op).dims(), fitting_decompose(&adj).dims());
        }
        let f5 = PrimeField::new(5).unwrap();
        let id = SemilinearOperator::linear(Matrix::identity(&f5, 3)).unwrap();
        assert_eq!(semilinear_dual(&id, &Matrix::identity(&f5, 3)).unwrap().matrix(), &Matrix::identity(&f5, 3));
        assert_eq!(semilinear_dual(&id, &Matrix::zeros(&f5, 3, 3)), Err(Error::DegeneratePairing));
    }
}
