//! Truncated Laurent series Σ a_n t^n with an absolute precision bound.

use super::poly::Poly;
use super::ring::Ring;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Series<R: Ring> {
    ring: R,
    /// Exponent of `coeffs[0]`; equals `prec` for a series that is zero to precision.
    val: i64,
    coeffs: Vec<R::Elem>,
    /// Exponents ≥ prec are unknown.
    prec: i64,
}

impl<R: Ring> Series<R> {
    pub fn new(ring: &R, lowest: i64, coeffs: Vec<R::Elem>, prec: i64) -> Self {
        let mut s = Series { ring: ring.clone(), val: lowest, coeffs, prec };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let keep = (self.prec - self.val).max(0) as usize;
        if self.coeffs.len() > keep {
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().position(|c| !self.ring.is_zero(c));
        match lead {
            None => {
                self.coeffs.clear();
                self.val = self.prec;
            }
            Some(k) => {
                self.coeffs.drain(..k);
                self.val += k as i64;
                while self.coeffs.last().is_some_and(|c| self.ring.is_zero(c)) {
                    self.coeffs.pop();
                }
            }
        }
    }

    pub fn zero(ring: &R, prec: i64) -> Self {
        Self::new(ring, prec, vec![], prec)
    }

    pub fn one(ring: &R, prec: i64) -> Self {
        Self::new(ring, 0, vec![ring.one()], prec)
    }

    pub fn monomial(ring: &R, c: R::Elem, n: i64, prec: i64) -> Self {
        Self::new(ring, n, vec![c], prec)
    }

    pub fn from_poly(p: &Poly<R>, prec: i64) -> Self {
        Self::new(p.ring(), 0, p.coeffs().to_vec(), prec)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// Lowest exponent with a nonzero coefficient, `None` if zero to precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn lowest(&self) -> i64 {
        self.val
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of t^n, `None` if beyond the precision.
    pub fn coeff(&self, n: i64) -> Option<R::Elem> {
        if n >= self.prec {
            return None;
        }
        if n < self.val {
            return Some(self.ring.zero());
        }
        Some(self.coeffs.get((n - self.val) as usize).cloned().unwrap_or_else(|| self.ring.zero()))
    }

    /// Coefficient of t^n, erroring beyond the precision.
    pub fn coeff_checked(&self, n: i64) -> Result<R::Elem> {
        self.coeff(n)
            .ok_or_else(|| Error::Precision(format!("coefficient t^{n} needed, precision {}", self.prec)))
    }

    pub fn residue(&self) -> Result<R::Elem> {
        self.coeff_checked(-1)
    }

    pub fn truncate(&self, prec: i64) -> Self {
        Self::new(&self.ring, self.val, self.coeffs.clone(), prec.min(self.prec))
    }

    pub fn add(&self, o: &Self) -> Self {
        let r = &self.ring;
        let prec = self.prec.min(o.prec);
        let lo = self.val.min(o.val).min(prec);
        let n = (prec - lo).max(0) as usize;
        let coeffs = (0..n)
            .map(|i| {
                let e = lo + i as i64;
                r.add(&self.coeff(e).unwrap(), &o.coeff(e).unwrap())
            })
            .collect();
        Self::new(r, lo, coeffs, prec)
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.ring, self.val, self.coeffs.iter().map(|c| self.ring.neg(c)).collect(), self.prec)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        Self::new(&self.ring, self.val, self.coeffs.iter().map(|a| self.ring.mul(c, a)).collect(), self.prec)
    }

    /// Multiplication by t^n.
    pub fn shift(&self, n: i64) -> Self {
        Self::new(&self.ring, self.val + n, self.coeffs.clone(), self.prec.saturating_add(n))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let r = &self.ring;
        let prec = (self.val + o.prec).min(o.val + self.prec);
        let val = self.val + o.val;
        let n = (prec - val).max(0) as usize;
        let mut out = vec![r.zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= n {
                break;
            }
            if r.is_zero(a) {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n - i) {
                out[i + j] = r.add(&out[i + j], &r.mul(a, b));
            }
        }
        Self::new(r, val, out, prec)
    }

    /// Inverse; the leading coefficient must be a unit.
    pub fn inv(&self) -> Result<Self> {
        let r = &self.ring;
        let Some(v) = self.valuation() else {
            return Err(Error::NotUnit("series is zero to its precision".into()));
        };
        let a0inv = r
            .inv(&self.coeffs[0])
            .ok_or_else(|| Error::NotUnit("leading coefficient of series".into()))?;
        let rel = (self.prec - v) as usize;
        let mut b = vec![r.zero(); rel];
        b[0] = a0inv.clone();
        for n in 1..rel {
            let mut s = r.zero();
            for k in 1..=n.min(self.coeffs.len() - 1) {
                s = r.add(&s, &r.mul(&self.coeffs[k], &b[n - k]));
            }
            b[n] = r.neg(&r.mul(&a0inv, &s));
        }
        Ok(Self::new(r, -v, b, -v + rel as i64))
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Series::one(&self.ring, i64::MAX / 4);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        let r = &self.ring;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| r.mul(&r.from_i64(self.val + i as i64), c))
            .collect();
        Self::new(r, self.val - 1, coeffs, self.prec - 1)
    }

    /// Evaluates a polynomial at this series by Horner's rule.
    pub fn eval_poly(&self, p: &Poly<R>, prec_cap: i64) -> Self {
        let r = &self.ring;
        let mut acc = Series::zero(r, prec_cap);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&Series::monomial(r, c.clone(), 0, prec_cap));
        }
        acc
    }

    /// self(g(t)) for g of positive valuation; negative exponents use g^{-1}.
    pub fn substitute(&self, g: &Self) -> Result<Self> {
        let r = &self.ring;
        let gv = g.valuation().ok_or_else(|| Error::Precision("substituting a zero series".into()))?;
        if gv < 1 {
            return Err(Error::Invalid("substituted series must have positive valuation".into()));
        }
        if self.prec >= i64::MAX / 8 {
            return Err(Error::Precision("substitution into an exact series of unbounded length".into()));
        }
        // The unknown tail O(t^prec) becomes O(t^{prec·v(g)}); each term carries its own bound.
        let out_prec = self.prec * gv;
        let mut acc = Series::zero(r, out_prec);
        let ginv = if self.val < 0 { Some(g.inv()?) } else { None };
        for (i, c) in self.coeffs.iter().enumerate() {
            if r.is_zero(c) {
                continue;
            }
            let e = self.val + i as i64;
            let term = if e >= 0 {
                g.pow(e)?
            } else {
                ginv.as_ref().unwrap().pow(-e)?
            };
            acc = acc.add(&term.scale(c).truncate(out_prec));
        }
        Ok(acc.truncate(out_prec))
    }

    /// Compositional inverse of a series g = c_1 t + c_2 t² + … with c_1 a unit.
    pub fn reversion(&self) -> Result<Self> {
        let r = &self.ring;
        if self.valuation() != Some(1) {
            return Err(Error::Invalid("reversion needs valuation exactly 1".into()));
        }
        let c1inv = r.inv(&self.coeffs[0]).ok_or_else(|| Error::NotUnit("linear coefficient".into()))?;
        let prec = self.prec;
        let t = Series::monomial(r, r.one(), 1, prec);
        // h ← h − c1^{-1}(g(h) − t), one correct coefficient per step.
        let mut h = Series::monomial(r, c1inv.clone(), 1, prec);
        for _ in 0..prec {
            let gh = self.substitute(&h)?;
            let err = gh.sub(&t);
            if err.is_zero() {
                break;
            }
            h = h.sub(&err.scale(&c1inv)).truncate(prec);
        }
        Ok(h)
    }

    /// n-th root of a series with constant term 1, for n a unit in the ring.
    pub fn nth_root_unit(&self, n: i64) -> Result<Self> {
        let r = &self.ring;
        if self.valuation() != Some(0) || !r.is_one(&self.coeffs[0]) {
            return Err(Error::Invalid("root extraction needs constant term 1".into()));
        }
        let ninv = r.inv(&r.from_i64(n)).ok_or_else(|| Error::NotUnit(format!("{n} in the coefficient ring")))?;
        let prec = self.prec;
        // Coefficient recursion: s = y^n, y_0 = 1, n·y_k = s_k − [t^k](y_{<k})^n.
        let mut y = Series::one(r, prec);
        for k in 1..prec {
            let cur = y.pow(n)?.truncate(prec);
            let diff = r.sub(&self.coeff(k).unwrap(), &cur.coeff(k).unwrap());
            if !r.is_zero(&diff) {
                y = y.add(&Series::monomial(r, r.mul(&ninv, &diff), k, prec));
            }
        }
        Ok(y)
    }

    /// Applies φ^e to every coefficient.
    pub fn frobenius_coeffs(&self, e: i64) -> Result<Self> {
        let r = &self.ring;
        let coeffs: Option<Vec<R::Elem>> = self.coeffs.iter().map(|c| r.frobenius(c, e)).collect();
        Ok(Self::new(r, self.val, coeffs.ok_or(Error::NotPerfect)?, self.prec))
    }

    /// The local Cartier formula on η = Σ a_n t^n dt:
    /// V(η) = Σ_{n ≡ −1 mod p} φ^{-1}(a_n) t^{(n+1)/p − 1} dt.
    pub fn cartier_local(&self, p: u64) -> Result<Self> {
        let r = &self.ring;
        let p = p as i64;
        let out_prec = self.prec.div_euclid(p);
        let lo = (self.val + 1).div_euclid(p) - 1;
        let mut coeffs = Vec::new();
        for j in lo..out_prec {
            let n = p * (j + 1) - 1;
            let a = self.coeff(n).unwrap();
            coeffs.push(r.frobenius(&a, -1).ok_or(Error::NotPerfect)?);
        }
        Ok(Self::new(r, lo, coeffs, out_prec))
    }

    pub fn render(&self) -> String {
        let mut terms: Vec<String> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !self.ring.is_zero(c) {
                terms.push(format!("({})t^{}", self.ring.render(c), self.val + i as i64));
            }
        }
        terms.push(format!("O(t^{})", self.prec));
        terms.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ring::{ExtField, FiniteField, PadicTrunc, PrimeField};
    use proptest::prelude::*;

    fn s(f: &PrimeField, lo: i64, c: &[i64], prec: i64) -> Series<PrimeField> {
        Series::new(f, lo, c.iter().map(|x| f.elem(*x)).collect(), prec)
    }

    #[test]
    fn product_and_inverse() {
        let f = PrimeField::new(7).unwrap();
        let a = s(&f, 0, &[1, 1], 10);
        let b = s(&f, 0, &[1, -1], 10);
        assert_eq!(a.mul(&b), s(&f, 0, &[1, 0, -1], 10));
        let inv = s(&f, 0, &[1, 1], 3).inv().unwrap();
        assert_eq!(inv, s(&f, 0, &[1, -1, 1], 3));
        let z = s(&f, 1, &[1], 5);
        assert!(matches!(s(&f, 0, &[0], 5).inv(), Err(Error::NotUnit(_))));
        assert_eq!(z.inv().unwrap().valuation(), Some(-1));
    }

    #[test]
    fn coefficient_root_over_f25() {
        let f = ExtField::new(5, 2).unwrap();
        let a = f.generator();
        let ser = Series::new(&f, 1, vec![a.clone()], 4);
        let root = ser.frobenius_coeffs(-1).unwrap();
        assert_eq!(root.coeff(1).unwrap(), f.pow(&a, 5));
    }

    #[test]
    fn non_perfect_ring_rejected() {
        let r = PadicTrunc::new(5, 2).unwrap();
        let ser = Series::new(&r, 0, vec![3], 4);
        assert_eq!(ser.frobenius_coeffs(-1), Err(Error::NotPerfect));
    }

    #[test]
    fn reversion_roundtrip() {
        let f = PrimeField::new(5).unwrap();
        let g = s(&f, 1, &[2, 1, 3, 4], 12);
        let h = g.reversion().unwrap();
        let id = g.substitute(&h).unwrap();
        assert_eq!(id.coeff(1), Some(1));
        for k in 2..id.precision() {
            assert_eq!(id.coeff(k), Some(0));
        }
    }

    #[test]
    fn roots_of_unit_series() {
        let f = ExtField::new(7, 2).unwrap();
        let one = f.one();
        let ser = Series::new(&f, 0, vec![one.clone(), f.generator(), f.from_i64(3)], 9);
        let r3 = ser.nth_root_unit(3).unwrap();
        assert_eq!(r3.pow(3).unwrap().truncate(9), ser);
        let _ = f.elements();
    }

    #[test]
    fn local_cartier_basics() {
        let f = PrimeField::new(5).unwrap();
        // V(dt) = 0, V(t^{p−1} dt) = dt, V(dt/t) = dt/t.
        assert!(s(&f, 0, &[1], 20).cartier_local(5).unwrap().is_zero());
        let v = s(&f, 4, &[1], 20).cartier_local(5).unwrap();
        assert_eq!((v.valuation(), v.coeff(0)), (Some(0), Some(1)));
        let v = s(&f, -1, &[1], 20).cartier_local(5).unwrap();
        assert_eq!((v.valuation(), v.coeff(-1)), (Some(-1), Some(1)));
        assert_eq!(v.precision(), 4);
    }

    fn arb_series() -> impl Strategy<Value = (i64, Vec<u64>, i64)> {
        (-3i64..3, proptest::collection::vec(0u64..7, 1..6), 4i64..9)
    }

    fn build(f: &PrimeField, x: &(i64, Vec<u64>, i64)) -> Series<PrimeField> {
        Series::new(f, x.0, x.1.clone(), x.0 + x.2)
    }

    proptest! {
        #[test]
        fn multiplication_associative_commutative(a in arb_series(), b in arb_series(), c in arb_series()) {
            let f = PrimeField::new(7).unwrap();
            let (a, b, c) = (build(&f, &a), build(&f, &b), build(&f, &c));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            let l = a.mul(&b).mul(&c);
            let r = a.mul(&b.mul(&c));
            let prec = l.precision().min(r.precision());
            prop_assert_eq!(l.truncate(prec), r.truncate(prec));
        }
    }
}
