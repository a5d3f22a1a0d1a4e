//! Dense row-major matrices over a coefficient ring.

use super::ring::Ring;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<R: Ring> {
    ring: R,
    rows: usize,
    cols: usize,
    data: Vec<R::Elem>,
}

impl<R: Ring> Matrix<R> {
    pub fn new(ring: R, rows: usize, cols: usize, data: Vec<R::Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { ring, rows, cols, data })
    }

    pub fn zeros(ring: &R, rows: usize, cols: usize) -> Self {
        Matrix { ring: ring.clone(), rows, cols, data: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: &R, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = ring.one();
        }
        m
    }

    pub fn from_fn(ring: &R, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { ring: ring.clone(), rows, cols, data }
    }

    pub fn from_i64(ring: &R, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(ring, r, c, |i, j| ring.from_i64(rows[i][j]))
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(ring: &R, nrows: usize, cols: &[Vec<R::Elem>]) -> Self {
        Self::from_fn(ring, nrows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn from_rows(ring: &R, ncols: usize, rows: &[Vec<R::Elem>]) -> Self {
        Self::from_fn(ring, rows.len(), ncols, |i, j| rows[i][j].clone())
    }

    pub fn diagonal(ring: &R, d: &[R::Elem]) -> Self {
        let n = d.len();
        Self::from_fn(ring, n, n, |i, j| if i == j { d[i].clone() } else { ring.zero() })
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn data(&self) -> &[R::Elem] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &R::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[R::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<R::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<R::Elem>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.ring, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&R::Elem) -> R::Elem) -> Self {
        Matrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let r = &self.ring;
        let mut out = vec![r.zero(); self.rows * o.cols];
        for i in 0..self.rows {
            let orow = &mut out[i * o.cols..(i + 1) * o.cols];
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if r.is_zero(a) {
                    continue;
                }
                let brow = &o.data[k * o.cols..(k + 1) * o.cols];
                for (x, b) in orow.iter_mut().zip(brow) {
                    if !r.is_zero(b) {
                        *x = r.add(x, &r.mul(a, b));
                    }
                }
            }
        }
        Ok(Matrix { ring: r.clone(), rows: self.rows, cols: o.cols, data: out })
    }

    /// Panics on shape mismatch; use `try_mul` for unchecked input.
    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("matrix shape mismatch")
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix shape mismatch");
        let r = &self.ring;
        Matrix {
            ring: r.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| r.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix shape mismatch");
        let r = &self.ring;
        Matrix {
            ring: r.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| r.sub(a, b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|a| self.ring.neg(a))
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        self.map(|a| self.ring.mul(c, a))
    }

    pub fn pow(&self, mut n: u64) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(&self.ring, self.rows);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    pub fn mul_vec(&self, v: &[R::Elem]) -> Vec<R::Elem> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let r = &self.ring;
        (0..self.rows)
            .map(|i| {
                let mut acc = r.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !r.is_zero(a) && !r.is_zero(b) {
                        acc = r.add(&acc, &r.mul(a, b));
                    }
                }
                acc
            })
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[R::Elem]) -> Vec<R::Elem> {
        assert_eq!(v.len(), self.rows, "vector length mismatch");
        let r = &self.ring;
        let mut out = vec![r.zero(); self.cols];
        for (i, c) in v.iter().enumerate() {
            if r.is_zero(c) {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o = r.add(o, &r.mul(c, a));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| self.ring.is_zero(a))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(&self.ring, self.rows)
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        Self::from_fn(&self.ring, rows.len(), cols.len(), |i, j| self.get(rows.start + i, cols.start + j).clone())
    }

    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        Self::from_fn(&self.ring, self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                o.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.cols);
        Self::from_fn(&self.ring, self.rows + o.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                o.get(i - self.rows, j).clone()
            }
        })
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, o: &Self) -> Self {
        let r = &self.ring;
        Self::from_fn(r, self.rows + o.rows, self.cols + o.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                o.get(i - self.rows, j - self.cols).clone()
            } else {
                r.zero()
            }
        })
    }

    pub fn trace(&self) -> R::Elem {
        assert!(self.is_square());
        (0..self.rows).fold(self.ring.zero(), |acc, i| self.ring.add(&acc, self.get(i, i)))
    }

    /// Kronecker product.
    pub fn kron(&self, o: &Self) -> Self {
        let r = &self.ring;
        Self::from_fn(r, self.rows * o.rows, self.cols * o.cols, |i, j| {
            r.mul(self.get(i / o.rows, j / o.cols), o.get(i % o.rows, j % o.cols))
        })
    }

    pub fn render(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|a| self.ring.render(a)).collect()).collect()
    }
}

pub fn vec_add<R: Ring>(r: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    a.iter().zip(b).map(|(x, y)| r.add(x, y)).collect()
}

pub fn vec_sub<R: Ring>(r: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    a.iter().zip(b).map(|(x, y)| r.sub(x, y)).collect()
}

pub fn vec_scale<R: Ring>(r: &R, c: &R::Elem, a: &[R::Elem]) -> Vec<R::Elem> {
    a.iter().map(|x| r.mul(c, x)).collect()
}

pub fn vec_is_zero<R: Ring>(r: &R, a: &[R::Elem]) -> bool {
    a.iter().all(|x| r.is_zero(x))
}

pub fn dot<R: Ring>(r: &R, a: &[R::Elem], b: &[R::Elem]) -> R::Elem {
    a.iter().zip(b).fold(r.zero(), |acc, (x, y)| r.add(&acc, &r.mul(x, y)))
}
