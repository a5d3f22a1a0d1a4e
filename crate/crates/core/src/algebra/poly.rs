//! Dense univariate polynomials, coefficients stored from low to high degree.

use super::matrix::Matrix;
use super::ring::{Field, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<R: Ring> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

impl<R: Ring> Eq for Poly<R> {}

impl<R: Ring> Poly<R> {
    pub fn new(ring: &R, mut coeffs: Vec<R::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            coeffs.pop();
        }
        Poly { ring: ring.clone(), coeffs }
    }

    pub fn from_i64(ring: &R, c: &[i64]) -> Self {
        Self::new(ring, c.iter().map(|x| ring.from_i64(*x)).collect())
    }

    pub fn zero(ring: &R) -> Self {
        Poly { ring: ring.clone(), coeffs: vec![] }
    }

    pub fn one(ring: &R) -> Self {
        Self::constant(ring, ring.one())
    }

    pub fn constant(ring: &R, c: R::Elem) -> Self {
        Self::new(ring, vec![c])
    }

    pub fn x(ring: &R) -> Self {
        Self::monomial(ring, ring.one(), 1)
    }

    pub fn monomial(ring: &R, c: R::Elem, n: usize) -> Self {
        let mut v = vec![ring.zero(); n + 1];
        v[n] = c;
        Self::new(ring, v)
    }

    /// x − a.
    pub fn linear(ring: &R, a: &R::Elem) -> Self {
        Self::new(ring, vec![ring.neg(a), ring.one()])
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with −1 for the zero polynomial.
    pub fn deg_i(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, i: usize) -> R::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn lead(&self) -> Option<&R::Elem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_some_and(|c| self.ring.is_one(c))
    }

    pub fn add(&self, o: &Self) -> Self {
        let r = &self.ring;
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(r, (0..n).map(|i| r.add(&self.coeff(i), &o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let r = &self.ring;
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(r, (0..n).map(|i| r.sub(&self.coeff(i), &o.coeff(i))).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(|c| self.ring.neg(c)).collect())
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(|a| self.ring.mul(c, a)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let r = &self.ring;
        if self.is_zero() || o.is_zero() {
            return Self::zero(r);
        }
        let mut out = vec![r.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if r.is_zero(a) {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = r.add(&out[i + j], &r.mul(a, b));
            }
        }
        Self::new(r, out)
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    /// Multiplication by x^n.
    pub fn shift(&self, n: usize) -> Self {
        let mut v = vec![self.ring.zero(); n];
        v.extend(self.coeffs.iter().cloned());
        Self::new(&self.ring, v)
    }

    pub fn eval(&self, x: &R::Elem) -> R::Elem {
        let r = &self.ring;
        self.coeffs.iter().rev().fold(r.zero(), |acc, c| r.add(&r.mul(&acc, x), c))
    }

    pub fn derivative(&self) -> Self {
        let r = &self.ring;
        Self::new(
            r,
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| r.mul(&r.from_i64(i as i64), c)).collect(),
        )
    }

    /// self(g(x)).
    pub fn compose(&self, g: &Self) -> Self {
        let r = &self.ring;
        self.coeffs.iter().rev().fold(Self::zero(r), |acc, c| acc.mul(g).add(&Self::constant(r, c.clone())))
    }

    /// Division with remainder by a polynomial whose leading coefficient is a unit.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let r = &self.ring;
        let dd = d.degree().ok_or_else(|| Error::Invalid("division by zero polynomial".into()))?;
        let linv = r
            .inv(d.lead().unwrap())
            .ok_or_else(|| Error::NotUnit("leading coefficient of divisor".into()))?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(r), self.clone()));
        }
        let mut q = vec![r.zero(); rem.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r.mul(&rem[k + dd], &linv);
            if r.is_zero(&c) {
                continue;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] = r.sub(&rem[k + i], &r.mul(&c, dc));
            }
            q[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(r, q), Self::new(r, rem)))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).expect("divisor with unit leading coefficient").1
    }

    /// Evaluation at a square matrix.
    pub fn eval_matrix(&self, m: &Matrix<R>) -> Matrix<R> {
        let r = &self.ring;
        let n = m.rows();
        self.coeffs.iter().rev().fold(Matrix::zeros(r, n, n), |acc, c| {
            acc.mul(m).add(&Matrix::identity(r, n).scale(c))
        })
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if self.ring.is_zero(c) {
                continue;
            }
            let cs = self.ring.render(c);
            terms.push(match i {
                0 => cs,
                1 => format!("({cs})x"),
                _ => format!("({cs})x^{i}"),
            });
        }
        terms.join(" + ")
    }
}

impl<F: Field> Poly<F> {
    pub fn monic(&self) -> Self {
        match self.lead() {
            None => self.clone(),
            Some(l) => self.scale(&self.ring.inv(l).unwrap()),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ring::PrimeField;

    #[test]
    fn division_and_gcd() {
        let f = PrimeField::new(7).unwrap();
        let a = Poly::from_i64(&f, &[-1, 0, 1]);
        let b = Poly::from_i64(&f, &[-1, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, Poly::from_i64(&f, &[1, 1]));
        let c = Poly::from_i64(&f, &[1, 0, 1]);
        assert_eq!(a.gcd(&c), Poly::one(&f));
        assert_eq!(a.gcd(&b.mul(&c)), b);
    }

    #[test]
    fn compose_and_derivative() {
        let f = PrimeField::new(5).unwrap();
        let a = Poly::from_i64(&f, &[1, 2, 3]);
        let g = Poly::from_i64(&f, &[1, 1]);
        let c = a.compose(&g);
        for x in 0..5u64 {
            assert_eq!(c.eval(&x), a.eval(&g.eval(&x)));
        }
        assert_eq!(a.derivative(), Poly::from_i64(&f, &[2, 6]));
    }
}
