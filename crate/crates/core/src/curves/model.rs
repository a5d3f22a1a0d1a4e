//! Curve models: the projective line, odd-degree hyperelliptic curves y² = h(x) (including
//! elliptic curves in Weierstrass form) and Artin–Schreier covers y^p − y = f(x).

use serde::Serialize;

use super::ratfunc::RatFunc;
use crate::algebra::arith::binom;
use crate::algebra::{FiniteField, Poly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum CurveKind<F: FiniteField> {
    ProjectiveLine,
    Hyperelliptic {
        h: Poly<F>,
        weierstrass: Option<[F::Elem; 5]>,
    },
    ArtinSchreier {
        f: RatFunc<F>,
        /// Finite poles of f with their orders.
        poles: Vec<(F::Elem, u32)>,
        /// Pole order of f at infinity, 0 when f is regular there.
        pole_inf: u32,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveModel<F: FiniteField> {
    field: F,
    kind: CurveKind<F>,
}

/// A place of a curve, named by its coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Place<E> {
    /// A point with finite x; `y` is absent on the projective line.
    Affine { x: E, y: Option<E> },
    /// A point over x = ∞ at which y is finite or the curve has a single point there.
    Infinity { y: Option<E> },
    /// The totally ramified place of an Artin–Schreier cover over a pole of f.
    Branch { x: Option<E> },
}

/// Σ_j g_j(x) y^j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionElem<F: FiniteField> {
    pub g: Vec<RatFunc<F>>,
}

/// (Σ_j g_j(x) y^j) dx.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeroDifferential<F: FiniteField> {
    pub g: Vec<RatFunc<F>>,
}

impl<F: FiniteField> MeroDifferential<F> {
    pub fn is_zero(&self) -> bool {
        self.g.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        MeroDifferential { g: self.g.iter().zip(&o.g).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        MeroDifferential { g: self.g.iter().zip(&o.g).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        MeroDifferential { g: self.g.iter().map(|a| a.scale(c)).collect() }
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .g
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| match j {
                0 => format!("[{}]dx", c.render()),
                1 => format!("[{}]y dx", c.render()),
                _ => format!("[{}]y^{j} dx", c.render()),
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

fn roots<F: FiniteField>(f: &F, p: &Poly<F>) -> Vec<F::Elem> {
    f.elements().into_iter().filter(|a| f.is_zero(&p.eval(a))).collect()
}

impl<F: FiniteField> CurveModel<F> {
    pub fn projective_line(f: &F) -> Self {
        CurveModel { field: f.clone(), kind: CurveKind::ProjectiveLine }
    }

    /// y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6, rewritten as y'² = h(x) with y' = y + (a1x + a3)/2.
    pub fn elliptic(f: &F, a: [F::Elem; 5]) -> Result<Self> {
        if f.prime() == 2 {
            return Err(Error::Unsupported("Weierstrass models in characteristic 2".into()));
        }
        let [a1, a2, a3, a4, a6] = a.clone();
        let half = f.inv(&f.from_i64(2)).unwrap();
        let lin = Poly::new(f, vec![f.mul(&a3, &half), f.mul(&a1, &half)]);
        let h = Poly::new(f, vec![a6, a4, a2, f.one()]).add(&lin.mul(&lin));
        let mut c = Self::hyperelliptic(f, h)?;
        if let CurveKind::Hyperelliptic { weierstrass, .. } = &mut c.kind {
            *weierstrass = Some(a);
        }
        Ok(c)
    }

    pub fn hyperelliptic(f: &F, h: Poly<F>) -> Result<Self> {
        if f.prime() == 2 {
            return Err(Error::Unsupported("hyperelliptic models in characteristic 2".into()));
        }
        let d = h.degree().unwrap_or(0);
        if d < 3 || d % 2 == 0 {
            return Err(Error::Invalid("h must have odd degree at least 3".into()));
        }
        if h.gcd(&h.derivative()).degree() != Some(0) {
            return Err(Error::Invalid("h is not squarefree; the curve is singular".into()));
        }
        Ok(CurveModel { field: f.clone(), kind: CurveKind::Hyperelliptic { h, weierstrass: None } })
    }

    /// Requires the finite poles of f to be rational and every pole order prime to p.
    pub fn artin_schreier(f: &F, rhs: RatFunc<F>) -> Result<Self> {
        let p = f.prime();
        let den_roots = roots(f, rhs.den());
        let mut poles = Vec::new();
        let mut total = 0;
        for a in den_roots {
            let m = (-rhs.val_at(&a).unwrap()) as u32;
            if m as u64 % p == 0 {
                return Err(Error::Invalid(format!("pole of order {m} divisible by p")));
            }
            total += m as usize;
            poles.push((a, m));
        }
        if total != rhs.den().degree().unwrap() {
            return Err(Error::Unsupported("poles of f must be rational over the base field".into()));
        }
        let pole_inf = (-rhs.val_inf().unwrap_or(0)).max(0) as u32;
        if pole_inf > 0 && pole_inf as u64 % p == 0 {
            return Err(Error::Invalid(format!("pole of order {pole_inf} at infinity divisible by p")));
        }
        if poles.is_empty() && pole_inf == 0 {
            return Err(Error::Invalid("f has no poles; the cover is not geometrically connected and ramified".into()));
        }
        Ok(CurveModel { field: f.clone(), kind: CurveKind::ArtinSchreier { f: rhs, poles, pole_inf } })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn kind(&self) -> &CurveKind<F> {
        &self.kind
    }

    pub fn p(&self) -> u64 {
        self.field.prime()
    }

    /// Degree of the function field over F(x).
    pub fn y_degree(&self) -> usize {
        match &self.kind {
            CurveKind::ProjectiveLine => 1,
            CurveKind::Hyperelliptic { .. } => 2,
            CurveKind::ArtinSchreier { .. } => self.p() as usize,
        }
    }

    pub fn genus(&self) -> usize {
        match &self.kind {
            CurveKind::ProjectiveLine => 0,
            CurveKind::Hyperelliptic { h, .. } => (h.degree().unwrap() - 1) / 2,
            CurveKind::ArtinSchreier { poles, pole_inf, .. } => {
                let p = self.p() as i64;
                let mut s: i64 = poles.iter().map(|(_, m)| *m as i64 + 1).sum();
                if *pole_inf > 0 {
                    s += *pole_inf as i64 + 1;
                }
                ((p - 1) * (s - 2) / 2) as usize
            }
        }
    }

    pub fn branch_places(&self) -> Vec<Place<F::Elem>> {
        match &self.kind {
            CurveKind::ArtinSchreier { poles, pole_inf, .. } => {
                let mut out: Vec<_> = poles.iter().map(|(a, _)| Place::Branch { x: Some(a.clone()) }).collect();
                if *pole_inf > 0 {
                    out.push(Place::Branch { x: None });
                }
                out
            }
            _ => vec![],
        }
    }

    pub fn zero_elem(&self) -> FunctionElem<F> {
        FunctionElem { g: vec![RatFunc::zero(&self.field); self.y_degree()] }
    }

    pub fn zero_differential(&self) -> MeroDifferential<F> {
        MeroDifferential { g: self.zero_elem().g }
    }

    pub fn from_base(&self, g: RatFunc<F>) -> FunctionElem<F> {
        let mut e = self.zero_elem();
        e.g[0] = g;
        e
    }

    pub fn y(&self) -> FunctionElem<F> {
        let mut e = self.zero_elem();
        if e.g.len() > 1 {
            e.g[1] = RatFunc::one(&self.field);
        }
        e
    }

    /// The function ω/dx.
    pub fn differential(&self, g: FunctionElem<F>) -> MeroDifferential<F> {
        MeroDifferential { g: g.g }
    }

    fn reduce(&self, mut c: Vec<RatFunc<F>>) -> Vec<RatFunc<F>> {
        let n = self.y_degree();
        let f = &self.field;
        while c.len() > n {
            let k = c.len() - 1;
            let top = c.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            match &self.kind {
                CurveKind::Hyperelliptic { h, .. } => {
                    c[k - 2] = c[k - 2].add(&top.mul(&RatFunc::from_poly(h.clone())));
                }
                CurveKind::ArtinSchreier { f: rhs, .. } => {
                    c[k - n + 1] = c[k - n + 1].add(&top);
                    c[k - n] = c[k - n].add(&top.mul(rhs));
                }
                CurveKind::ProjectiveLine => unreachable!(),
            }
        }
        c.resize(n, RatFunc::zero(f));
        c
    }

    pub fn mul(&self, a: &FunctionElem<F>, b: &FunctionElem<F>) -> FunctionElem<F> {
        let f = &self.field;
        let mut c = vec![RatFunc::zero(f); a.g.len() + b.g.len() - 1];
        for (i, x) in a.g.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.g.iter().enumerate() {
                if !y.is_zero() {
                    c[i + j] = c[i + j].add(&x.mul(y));
                }
            }
        }
        FunctionElem { g: self.reduce(c) }
    }

    pub fn add(&self, a: &FunctionElem<F>, b: &FunctionElem<F>) -> FunctionElem<F> {
        FunctionElem { g: a.g.iter().zip(&b.g).map(|(x, y)| x.add(y)).collect() }
    }

    pub fn pow(&self, a: &FunctionElem<F>, mut n: u64) -> FunctionElem<F> {
        let mut acc = self.from_base(RatFunc::one(&self.field));
        let mut b = a.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            n >>= 1;
        }
        acc
    }

    pub fn mul_differential(&self, u: &FunctionElem<F>, w: &MeroDifferential<F>) -> MeroDifferential<F> {
        MeroDifferential { g: self.mul(u, &FunctionElem { g: w.g.clone() }).g }
    }

    /// The automorphism y ↦ y + k of an Artin–Schreier cover, or y ↦ (−1)^k y of a hyperelliptic curve.
    pub fn sigma(&self, a: &FunctionElem<F>, k: u64) -> FunctionElem<F> {
        let f = &self.field;
        match &self.kind {
            CurveKind::ProjectiveLine => a.clone(),
            CurveKind::Hyperelliptic { .. } => {
                let mut out = a.clone();
                if k % 2 == 1 {
                    out.g[1] = out.g[1].neg();
                }
                out
            }
            CurveKind::ArtinSchreier { .. } => {
                let n = self.y_degree();
                let mut out = vec![RatFunc::zero(f); n];
                let kk = f.from_prime(k);
                for (j, g) in a.g.iter().enumerate() {
                    if g.is_zero() {
                        continue;
                    }
                    for (l, o) in out.iter_mut().enumerate().take(j + 1) {
                        let c = f.mul(&f.from_prime(binom(j as u64, l as u64)), &f.pow(&kk, (j - l) as u64));
                        *o = o.add(&g.scale(&c));
                    }
                }
                FunctionElem { g: out }
            }
        }
    }

    pub fn sigma_differential(&self, w: &MeroDifferential<F>, k: u64) -> MeroDifferential<F> {
        MeroDifferential { g: self.sigma(&FunctionElem { g: w.g.clone() }, k).g }
    }

    /// Product of the conjugates of a.
    pub fn norm(&self, a: &FunctionElem<F>) -> RatFunc<F> {
        let n = match &self.kind {
            CurveKind::ProjectiveLine => 1,
            CurveKind::Hyperelliptic { .. } => 2,
            CurveKind::ArtinSchreier { .. } => self.p(),
        };
        let mut acc = a.clone();
        for k in 1..n {
            acc = self.mul(&acc, &self.sigma(a, k));
        }
        acc.g[0].clone()
    }

    pub fn inv(&self, a: &FunctionElem<F>) -> Option<FunctionElem<F>> {
        let nm = self.norm(a).inv()?;
        let n = self.y_degree() as u64;
        let mut acc = self.from_base(nm);
        for k in 1..n {
            acc = self.mul(&acc, &self.sigma(a, k));
        }
        Some(acc)
    }

    /// dy/dx.
    pub fn dy_dx(&self) -> FunctionElem<F> {
        match &self.kind {
            CurveKind::ProjectiveLine => self.zero_elem(),
            CurveKind::Hyperelliptic { h, .. } => {
                let f = &self.field;
                let hr = RatFunc::from_poly(h.clone());
                let c = hr.derivative().div(&hr.scale(&f.from_i64(2)));
                let mut e = self.zero_elem();
                e.g[1] = c;
                e
            }
            CurveKind::ArtinSchreier { f: rhs, .. } => self.from_base(rhs.derivative().neg()),
        }
    }

    pub fn d(&self, a: &FunctionElem<F>) -> MeroDifferential<F> {
        let f = &self.field;
        let dy = self.dy_dx();
        let mut out = MeroDifferential { g: a.g.iter().map(|g| g.derivative()).collect() };
        for (j, g) in a.g.iter().enumerate().skip(1) {
            if g.is_zero() {
                continue;
            }
            let mut yj1 = self.from_base(g.scale(&f.from_i64(j as i64)));
            yj1 = self.mul(&yj1, &self.pow(&self.y(), j as u64 - 1));
            out = out.add(&MeroDifferential { g: self.mul(&yj1, &dy).g });
        }
        out
    }

    /// du/u.
    pub fn dlog(&self, a: &FunctionElem<F>) -> Option<MeroDifferential<F>> {
        let ai = self.inv(a)?;
        Some(self.mul_differential(&ai, &self.d(a)))
    }

    pub fn contains_place(&self, place: &Place<F::Elem>) -> bool {
        let f = &self.field;
        match (&self.kind, place) {
            (CurveKind::ProjectiveLine, Place::Affine { y: None, .. }) => true,
            (CurveKind::ProjectiveLine, Place::Infinity { y: None }) => true,
            (CurveKind::Hyperelliptic { h, .. }, Place::Affine { x, y: Some(y) }) => f.mul(y, y) == h.eval(x),
            (CurveKind::Hyperelliptic { .. }, Place::Infinity { y: None }) => true,
            (CurveKind::ArtinSchreier { f: rhs, .. }, Place::Affine { x, y: Some(y) }) => {
                rhs.eval(x).is_some_and(|v| f.sub(&f.pow(y, self.p()), y) == v)
            }
            (CurveKind::ArtinSchreier { f: rhs, pole_inf, .. }, Place::Infinity { y: Some(y) }) => {
                *pole_inf == 0 && rhs.eval_inf().is_some_and(|v| f.sub(&f.pow(y, self.p()), y) == v)
            }
            (CurveKind::ArtinSchreier { poles, pole_inf, .. }, Place::Branch { x }) => match x {
                Some(a) => poles.iter().any(|(b, _)| b == a),
                None => *pole_inf > 0,
            },
            _ => false,
        }
    }

    /// Places lying over a base point, `None` for infinity; errors if some are not rational.
    pub fn places_over(&self, x: &Option<F::Elem>) -> Result<Vec<Place<F::Elem>>> {
        let f = &self.field;
        let ys = |v: F::Elem, deg: usize| -> Vec<F::Elem> {
            f.elements()
                .into_iter()
                .filter(|y| {
                    if deg == 2 {
                        f.mul(y, y) == v
                    } else {
                        f.sub(&f.pow(y, self.p()), y) == v
                    }
                })
                .collect()
        };
        let out = match (&self.kind, x) {
            (CurveKind::ProjectiveLine, Some(a)) => vec![Place::Affine { x: a.clone(), y: None }],
            (CurveKind::ProjectiveLine, None) => vec![Place::Infinity { y: None }],
            (CurveKind::Hyperelliptic { h, .. }, Some(a)) => {
                let v = h.eval(a);
                let r: Vec<_> = ys(v.clone(), 2).into_iter().map(|y| Place::Affine { x: a.clone(), y: Some(y) }).collect();
                if r.is_empty() {
                    return Err(Error::Unsupported("places over this point are not rational".into()));
                }
                r
            }
            (CurveKind::Hyperelliptic { .. }, None) => vec![Place::Infinity { y: None }],
            (CurveKind::ArtinSchreier { f: rhs, poles, pole_inf }, x) => {
                let branch = match x {
                    Some(a) => poles.iter().any(|(b, _)| b == a),
                    None => *pole_inf > 0,
                };
                if branch {
                    vec![Place::Branch { x: x.clone() }]
                } else {
                    let v = match x {
                        Some(a) => rhs.eval(a).unwrap(),
                        None => rhs.eval_inf().unwrap(),
                    };
                    let r: Vec<_> = ys(v, self.y_degree())
                        .into_iter()
                        .map(|y| match x {
                            Some(a) => Place::Affine { x: a.clone(), y: Some(y) },
                            None => Place::Infinity { y: Some(y) },
                        })
                        .collect();
                    if r.len() != self.y_degree() {
                        return Err(Error::Unsupported("places over this point are not rational".into()));
                    }
                    r
                }
            }
        };
        Ok(out)
    }

    /// Base points where some coefficient of ω has a pole, plus infinity.
    pub fn candidate_poles(&self, w: &MeroDifferential<F>) -> Vec<Option<F::Elem>> {
        let f = &self.field;
        let mut out: Vec<Option<F::Elem>> = Vec::new();
        let push = |a: F::Elem, out: &mut Vec<Option<F::Elem>>| {
            if !out.contains(&Some(a.clone())) {
                out.push(Some(a));
            }
        };
        for g in &w.g {
            for a in roots(f, g.den()) {
                push(a, &mut out);
            }
        }
        match &self.kind {
            CurveKind::Hyperelliptic { h, .. } => {
                for a in roots(f, h) {
                    push(a, &mut out);
                }
            }
            CurveKind::ArtinSchreier { poles, .. } => {
                for (a, _) in poles {
                    push(a.clone(), &mut out);
                }
            }
            CurveKind::ProjectiveLine => {}
        }
        out.push(None);
        out
    }
}
