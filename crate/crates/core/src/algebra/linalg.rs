//! Gaussian elimination, kernels, images, inverses and characteristic polynomials.

use serde::Serialize;

use super::matrix::Matrix;
use super::poly::Poly;
use super::ring::{Field, LocalRing, PrimeField};
use crate::error::{Error, Result};

/// Reduced row echelon form together with its pivot columns.
pub fn rref<F: Field>(m: &Matrix<F>) -> (Matrix<F>, Vec<usize>) {
    let f = m.ring().clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<F::Elem>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !f.is_zero(&a[i][c])) else {
            continue;
        };
        a.swap(r, piv);
        let inv = f.inv(&a[r][c]).unwrap();
        for x in a[r][c..].iter_mut() {
            *x = f.mul(x, &inv);
        }
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || f.is_zero(&row[c]) {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row[c..].iter_mut().zip(&prow[c..]) {
                if !f.is_zero(y) {
                    *x = f.sub(x, &f.mul(&factor, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let data = a.into_iter().flatten().collect();
    (Matrix::new(f, rows, cols, data).unwrap(), pivots)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankKernelImage<E> {
    pub rank: usize,
    pub kernel: Vec<Vec<E>>,
    pub image: Vec<Vec<E>>,
    /// True when computed on the reduction to the residue field.
    pub residue_reduced: bool,
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    rref(m).1.len()
}

/// Kernel basis from the reduced echelon form: one vector per free column.
pub fn kernel<F: Field>(m: &Matrix<F>) -> Vec<Vec<F::Elem>> {
    kernel_with_free(m).0
}

/// Kernel basis together with its free columns; vector i is 1 at `free[i]` and 0 at the others.
pub fn kernel_with_free<F: Field>(m: &Matrix<F>) -> (Vec<Vec<F::Elem>>, Vec<usize>) {
    let f = m.ring();
    let (e, pivots) = rref(m);
    let cols = m.cols();
    let mut is_pivot = vec![None; cols];
    for (i, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(i);
    }
    let mut out = Vec::new();
    let mut frees = Vec::new();
    for free in 0..cols {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = vec![f.zero(); cols];
        v[free] = f.one();
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = f.neg(e.get(i, free));
        }
        out.push(v);
        frees.push(free);
    }
    (out, frees)
}

/// Basis of the column space: the pivot columns of the input.
pub fn image<F: Field>(m: &Matrix<F>) -> Vec<Vec<F::Elem>> {
    let (_, pivots) = rref(m);
    pivots.iter().map(|&c| m.col(c)).collect()
}

pub fn mat_rank_kernel_image<F: Field>(m: &Matrix<F>) -> RankKernelImage<F::Elem> {
    let ker = kernel(m);
    let img = image(m);
    RankKernelImage { rank: img.len(), kernel: ker, image: img, residue_reduced: false }
}

pub fn reduce_to_residue<L: LocalRing>(m: &Matrix<L>) -> Matrix<PrimeField> {
    let k = m.ring().residue_field();
    Matrix::from_fn(&k, m.rows(), m.cols(), |i, j| m.ring().reduce(m.get(i, j)))
}

/// Rank, kernel and image over a local truncation ring, computed on the residue field.
pub fn residue_rank_kernel_image<L: LocalRing>(
    m: &Matrix<L>,
    exact_requested: bool,
) -> Result<RankKernelImage<u64>> {
    if exact_requested && !m.ring().is_field() {
        return Err(Error::ResidueFieldOnly);
    }
    let mut out = mat_rank_kernel_image(&reduce_to_residue(m));
    out.residue_reduced = !m.ring().is_field();
    Ok(out)
}

pub fn inverse<F: Field>(m: &Matrix<F>) -> Option<Matrix<F>> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let f = m.ring();
    if n == 0 {
        return Some(m.clone());
    }
    let aug = m.hstack(&Matrix::identity(f, n));
    let (e, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(e.submatrix(0..n, n..2 * n))
}

pub fn determinant<F: Field>(m: &Matrix<F>) -> Result<F::Elem> {
    if !m.is_square() {
        return Err(Error::Dimension("determinant of a non-square matrix".into()));
    }
    let f = m.ring();
    let n = m.rows();
    let mut a: Vec<Vec<F::Elem>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut det = f.one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| !f.is_zero(&a[i][c])) else {
            return Ok(f.zero());
        };
        if piv != c {
            a.swap(c, piv);
            det = f.neg(&det);
        }
        det = f.mul(&det, &a[c][c]);
        let inv = f.inv(&a[c][c]).unwrap();
        for i in c + 1..n {
            if f.is_zero(&a[i][c]) {
                continue;
            }
            let factor = f.mul(&a[i][c], &inv);
            for j in c..n {
                let t = f.mul(&factor, &a[c][j]);
                a[i][j] = f.sub(&a[i][j], &t);
            }
        }
    }
    Ok(det)
}

/// Some solution of A x = b, if one exists.
pub fn solve<F: Field>(a: &Matrix<F>, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let f = a.ring();
    let n = a.cols();
    let bm = Matrix::from_columns(f, a.rows(), &[b.to_vec()]);
    let (e, pivots) = rref(&a.hstack(&bm));
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![f.zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = e.get(i, n).clone();
    }
    Some(x)
}

/// Solves A X = B column by column; `None` if some column is inconsistent.
pub fn solve_matrix<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Option<Matrix<F>> {
    let cols: Option<Vec<Vec<F::Elem>>> = b.columns().iter().map(|c| solve(a, c)).collect();
    Some(Matrix::from_columns(a.ring(), a.cols(), &cols?))
}

/// Characteristic polynomial det(xI − M) via reduction to Hessenberg form.
pub fn charpoly<F: Field>(m: &Matrix<F>) -> Result<Poly<F>> {
    if !m.is_square() {
        return Err(Error::Dimension("characteristic polynomial of a non-square matrix".into()));
    }
    let f = m.ring().clone();
    let n = m.rows();
    let mut h: Vec<Vec<F::Elem>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    for c in 0..n.saturating_sub(2) {
        let Some(piv) = (c + 1..n).find(|&i| !f.is_zero(&h[i][c])) else {
            continue;
        };
        if piv != c + 1 {
            h.swap(piv, c + 1);
            for row in h.iter_mut() {
                row.swap(piv, c + 1);
            }
        }
        let inv = f.inv(&h[c + 1][c]).unwrap();
        for i in c + 2..n {
            if f.is_zero(&h[i][c]) {
                continue;
            }
            let t = f.mul(&h[i][c], &inv);
            for j in 0..n {
                let s = f.mul(&t, &h[c + 1][j]);
                h[i][j] = f.sub(&h[i][j], &s);
            }
            for row in h.iter_mut() {
                let s = f.mul(&t, &row[i]);
                row[c + 1] = f.add(&row[c + 1], &s);
            }
        }
    }
    let x = Poly::x(&f);
    let mut ps: Vec<Poly<F>> = vec![Poly::one(&f)];
    for k in 0..n {
        let mut pk = x.sub(&Poly::constant(&f, h[k][k].clone())).mul(&ps[k]);
        let mut prod = f.one();
        for i in (0..k).rev() {
            prod = f.mul(&prod, &h[i + 1][i]);
            if f.is_zero(&prod) {
                break;
            }
            let c = f.mul(&prod, &h[i][k]);
            pk = pk.sub(&ps[i].scale(&c));
        }
        ps.push(pk);
    }
    Ok(ps.pop().unwrap())
}

/// Basis of the span of the given vectors (rows of the echelon form).
pub fn span_basis<F: Field>(f: &F, dim: usize, vecs: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    if vecs.is_empty() {
        return vec![];
    }
    let m = Matrix::from_rows(f, dim, vecs);
    let (e, pivots) = rref(&m);
    (0..pivots.len()).map(|i| e.row(i).to_vec()).collect()
}

/// Coordinates of v in the given (independent) basis, if v lies in its span.
pub fn coords_in<F: Field>(f: &F, basis: &[Vec<F::Elem>], v: &[F::Elem]) -> Option<Vec<F::Elem>> {
    if basis.is_empty() {
        return if v.iter().all(|x| f.is_zero(x)) { Some(vec![]) } else { None };
    }
    solve(&Matrix::from_columns(f, v.len(), basis), v)
}

pub fn in_span<F: Field>(f: &F, basis: &[Vec<F::Elem>], v: &[F::Elem]) -> bool {
    coords_in(f, basis, v).is_some()
}

/// Basis of the intersection of two subspaces.
pub fn intersect<F: Field>(f: &F, dim: usize, a: &[Vec<F::Elem>], b: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let m = Matrix::from_columns(f, dim, a).hstack(&Matrix::from_columns(f, dim, b));
    let ker = kernel(&m);
    let am = Matrix::from_columns(f, dim, a);
    let vecs: Vec<Vec<F::Elem>> = ker.iter().map(|k| am.mul_vec(&k[..a.len()])).collect();
    span_basis(f, dim, &vecs)
}
