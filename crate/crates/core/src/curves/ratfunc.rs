//! Rational functions in one variable, kept in lowest terms with a monic denominator.

use crate::algebra::{Field, FiniteField, Poly, Series};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc<F: Field> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Field> RatFunc<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let f = num.ring().clone();
        if num.is_zero() {
            return RatFunc { num, den: Poly::one(&f) };
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num.div_rem(&g).unwrap().0, den.div_rem(&g).unwrap().0);
        let l = f.inv(d.lead().unwrap()).unwrap();
        n = n.scale(&l);
        d = d.scale(&l);
        RatFunc { num: n, den: d }
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        let f = p.ring().clone();
        RatFunc { num: p, den: Poly::one(&f) }
    }

    pub fn zero(f: &F) -> Self {
        Self::from_poly(Poly::zero(f))
    }

    pub fn one(f: &F) -> Self {
        Self::from_poly(Poly::one(f))
    }

    pub fn constant(f: &F, c: F::Elem) -> Self {
        Self::from_poly(Poly::constant(f, c))
    }

    pub fn x(f: &F) -> Self {
        Self::from_poly(Poly::x(f))
    }

    /// 1/(x − a)^n.
    pub fn pole(f: &F, a: &F::Elem, n: u64) -> Self {
        Self::new(Poly::one(f), Poly::linear(f, a).pow(n))
    }

    pub fn field(&self) -> &F {
        self.num.ring()
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone());
        }
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        Self::new(self.num.scale(c), self.den.clone())
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::new(self.den.clone(), self.num.clone()))
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv().expect("division by zero rational function"))
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inv().expect("negative power of zero") } else { self.clone() };
        RatFunc { num: base.num.pow(n.unsigned_abs()), den: base.den.pow(n.unsigned_abs()) }
    }

    pub fn derivative(&self) -> Self {
        let (n, d) = (&self.num, &self.den);
        Self::new(n.derivative().mul(d).sub(&n.mul(&d.derivative())), d.mul(d))
    }

    /// Order of vanishing at x = a.
    pub fn val_at(&self, a: &F::Elem) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let f = self.field();
        let lin = Poly::linear(f, a);
        let order = |p: &Poly<F>| {
            let mut k = 0;
            let mut q = p.clone();
            loop {
                let (d, r) = q.div_rem(&lin).unwrap();
                if !r.is_zero() {
                    return k;
                }
                q = d;
                k += 1;
            }
        };
        Some(order(&self.num) - order(&self.den))
    }

    /// Order of vanishing at infinity.
    pub fn val_inf(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.den.deg_i() - self.num.deg_i())
        }
    }

    pub fn eval(&self, a: &F::Elem) -> Option<F::Elem> {
        let f = self.field();
        let d = self.den.eval(a);
        f.inv(&d).map(|di| f.mul(&self.num.eval(a), &di))
    }

    /// Value at infinity, `None` for a pole.
    pub fn eval_inf(&self) -> Option<F::Elem> {
        let f = self.field();
        match self.val_inf() {
            None => Some(f.zero()),
            Some(v) if v > 0 => Some(f.zero()),
            Some(0) => Some(f.div(self.num.lead().unwrap(), self.den.lead().unwrap())),
            Some(_) => None,
        }
    }

    /// Laurent expansion in s where x = a + s.
    pub fn expand_at(&self, a: &F::Elem, prec: i64) -> Result<Series<F>> {
        let f = self.field();
        let sh = Poly::new(f, vec![a.clone(), f.one()]);
        let n = Series::from_poly(&self.num.compose(&sh), prec);
        let d = Series::from_poly(&self.den.compose(&sh), prec);
        Ok(n.mul(&d.inv()?))
    }

    /// Laurent expansion in s = 1/x.
    pub fn expand_inf(&self, prec: i64) -> Result<Series<F>> {
        let f = self.field();
        let rev = |p: &Poly<F>| Poly::new(f, p.coeffs().iter().rev().cloned().collect());
        let n = Series::from_poly(&rev(&self.num), prec);
        let d = Series::from_poly(&rev(&self.den), prec);
        Ok(n.mul(&d.inv()?).shift(self.den.deg_i() - self.num.deg_i()))
    }

    /// Composition with a Laurent series x = x(t) given in the form base + s(t) or 1/s(t).
    pub fn eval_series(&self, s: &Series<F>, at: &Option<F::Elem>) -> Result<Series<F>> {
        let f = self.field();
        let prec = s.precision();
        match at {
            Some(a) => {
                let sh = Poly::new(f, vec![a.clone(), f.one()]);
                let n = s.eval_poly(&self.num.compose(&sh), prec);
                let d = s.eval_poly(&self.den.compose(&sh), prec);
                Ok(n.mul(&d.inv()?))
            }
            None => {
                let rev = |p: &Poly<F>| Poly::new(f, p.coeffs().iter().rev().cloned().collect());
                let n = s.eval_poly(&rev(&self.num), prec);
                let d = s.eval_poly(&rev(&self.den), prec);
                let k = self.den.deg_i() - self.num.deg_i();
                Ok(n.mul(&d.inv()?).mul(&s.pow(k)?))
            }
        }
    }

    pub fn render(&self) -> String {
        if self.is_poly() {
            self.num.render()
        } else {
            format!("({})/({})", self.num.render(), self.den.render())
        }
    }
}

impl<F: FiniteField> RatFunc<F> {
    /// Applies φ^e to every coefficient.
    pub fn frob_coeffs(&self, e: i64) -> Self {
        let f = self.field();
        let m = |p: &Poly<F>| Poly::new(f, p.coeffs().iter().map(|c| f.frob(c, e)).collect());
        RatFunc { num: m(&self.num), den: m(&self.den) }
    }
}
