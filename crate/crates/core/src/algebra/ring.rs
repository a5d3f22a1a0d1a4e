//! Coefficient rings: prime fields, extension fields, truncated p-adic and
//! cyclotomic rings, and the rationals.

use std::fmt::Debug;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng as RandRng;
use serde::{Deserialize, Serialize};

use super::arith::{inv_mod, is_prime, mul_mod, pow_mod};
use crate::error::{Error, Result};

/// Serializable description of a coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum CoefficientRing {
    PrimeField { p: u64 },
    ExtensionField { p: u64, m: u32, modulus: Vec<u64> },
    PadicTruncation { p: u64, m: u32 },
    TruncatedCyclotomic { p: u64, r: u32, m: u32 },
    Rationals,
}

impl CoefficientRing {
    pub fn validate(&self) -> Result<()> {
        let check_p = |p: u64| {
            if p > 2 && is_prime(p) {
                Ok(())
            } else {
                Err(Error::InvalidRing(format!("p = {p} must be an odd prime")))
            }
        };
        match self {
            CoefficientRing::PrimeField { p } => check_p(*p),
            CoefficientRing::ExtensionField { p, m, modulus } => {
                check_p(*p)?;
                ExtField::with_modulus(*p, modulus.clone()).and_then(|f| {
                    if f.m == *m {
                        Ok(())
                    } else {
                        Err(Error::InvalidRing("modulus degree differs from m".into()))
                    }
                })
            }
            CoefficientRing::PadicTruncation { p, m } => {
                check_p(*p)?;
                if *m == 0 {
                    return Err(Error::InvalidRing("precision exponent must be positive".into()));
                }
                Ok(())
            }
            CoefficientRing::TruncatedCyclotomic { p, r, m } => {
                check_p(*p)?;
                if *m == 0 || *r == 0 {
                    return Err(Error::InvalidRing("r and m must be positive".into()));
                }
                Ok(())
            }
            CoefficientRing::Rationals => Ok(()),
        }
    }
}

pub trait Ring: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + Debug + Send + Sync + 'static;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Inverse of a unit, `None` otherwise.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_field(&self) -> bool;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    fn spec(&self) -> CoefficientRing;

    /// `φ^e` where `φ` is the p-power map; `None` when the ring has no such automorphism.
    fn frobenius(&self, _a: &Self::Elem, _e: i64) -> Option<Self::Elem> {
        None
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut n: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    fn render(&self, a: &Self::Elem) -> String {
        format!("{a:?}")
    }

    /// Size of an element, used to prefer small pivots.
    fn height(&self, _a: &Self::Elem) -> u64 {
        0
    }
}

pub trait Field: Ring {
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b).expect("division by zero"))
    }
}

pub trait FiniteField: Field {
    fn prime(&self) -> u64;
    fn degree(&self) -> u32;

    fn order(&self) -> u64 {
        self.prime().pow(self.degree())
    }

    /// Element whose base-p digits are the coordinates.
    fn elem_from_index(&self, idx: u64) -> Self::Elem;

    fn elements(&self) -> Vec<Self::Elem> {
        (0..self.order()).map(|i| self.elem_from_index(i)).collect()
    }

    fn random<G: RandRng>(&self, rng: &mut G) -> Self::Elem {
        self.elem_from_index(rng.gen_range(0..self.order()))
    }

    fn frob(&self, a: &Self::Elem, e: i64) -> Self::Elem {
        self.frobenius(a, e).expect("finite fields are perfect")
    }

    /// Image of an F_p element.
    fn from_prime(&self, c: u64) -> Self::Elem {
        self.from_i64((c % self.prime()) as i64)
    }

    /// Coordinates over F_p in the power basis.
    fn coords(&self, a: &Self::Elem) -> Vec<u64>;
}

/// Local rings with residue field F_p.
pub trait LocalRing: Ring {
    fn residue_field(&self) -> PrimeField;
    fn reduce(&self, a: &Self::Elem) -> u64;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Any prime is accepted here; the odd-prime rule applies to configured rings.
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidRing(format!("{p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    /// Symmetric lift to (-p/2, p/2].
    pub fn lift(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

impl Ring for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_i64(&self, n: i64) -> u64 {
        self.elem(n)
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            inv_mod(*a, self.p)
        }
    }
    fn is_field(&self) -> bool {
        true
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn spec(&self) -> CoefficientRing {
        CoefficientRing::PrimeField { p: self.p }
    }
    fn frobenius(&self, a: &u64, _e: i64) -> Option<u64> {
        Some(*a)
    }
    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
}

impl Field for PrimeField {}

impl FiniteField for PrimeField {
    fn prime(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> u32 {
        1
    }
    fn elem_from_index(&self, idx: u64) -> u64 {
        idx % self.p
    }
    fn coords(&self, a: &u64) -> Vec<u64> {
        vec![*a]
    }
}

/// F_{p^m} = F_p[x]/(f) with f monic irreducible; elements are coefficient vectors of length m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtField {
    p: u64,
    m: u32,
    modulus: Arc<Vec<u64>>,
}

fn upoly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn upoly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(*x, *y, p)) % p;
        }
    }
    upoly_trim(out)
}

fn upoly_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut a = upoly_trim(a.to_vec());
    let df = f.len() - 1;
    let lead_inv = inv_mod(f[df], p).expect("nonzero leading coefficient");
    while a.len() > df {
        let da = a.len() - 1;
        let c = mul_mod(a[da], lead_inv, p);
        for i in 0..=df {
            let t = mul_mod(c, f[i], p);
            a[da - df + i] = (a[da - df + i] + p - t) % p;
        }
        a = upoly_trim(a);
    }
    a
}

fn upoly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = upoly_trim(a.to_vec());
    let mut b = upoly_trim(b.to_vec());
    while !b.is_empty() {
        let r = upoly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn upoly_powmod_x(e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut base = upoly_rem(&[0, 1], f, p);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = upoly_rem(&upoly_mul(&result, &base, p), f, p);
        }
        base = upoly_rem(&upoly_mul(&base, &base, p), f, p);
        e >>= 1;
    }
    result
}

/// x^(p^k) mod f by repeated p-th powering.
fn upoly_frob_x(k: u32, f: &[u64], p: u64) -> Vec<u64> {
    let mut cur = upoly_rem(&[0, 1], f, p);
    for _ in 0..k {
        let mut acc = vec![1u64];
        let mut base = cur.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = upoly_rem(&upoly_mul(&acc, &base, p), f, p);
            }
            base = upoly_rem(&upoly_mul(&base, &base, p), f, p);
            e >>= 1;
        }
        cur = acc;
    }
    cur
}

/// Rabin's irreducibility test over F_p for a monic polynomial (coefficients low to high).
pub fn is_irreducible_mod_p(f: &[u64], p: u64) -> bool {
    let f = upoly_trim(f.iter().map(|c| c % p).collect());
    if f.len() < 2 {
        return false;
    }
    let m = (f.len() - 1) as u32;
    if m == 1 {
        return true;
    }
    let sub_x = |mut g: Vec<u64>| {
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = (g[1] + p - 1) % p;
        upoly_trim(g)
    };
    let full = sub_x(upoly_frob_x(m, &f, p));
    if !full.is_empty() {
        return false;
    }
    for (q, _) in super::arith::factorize(m as u64) {
        let h = sub_x(upoly_frob_x(m / q as u32, &f, p));
        let g = upoly_gcd(&f, &h, p);
        if g.len() != 1 {
            return false;
        }
    }
    let _ = upoly_powmod_x;
    true
}

impl ExtField {
    /// F_{p^m} with the first monic irreducible modulus in lexicographic order.
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) || m == 0 {
            return Err(Error::InvalidRing(format!("bad field parameters p={p}, m={m}")));
        }
        let count = p.pow(m);
        for idx in 0..count {
            let mut f: Vec<u64> = Vec::with_capacity(m as usize + 1);
            let mut t = idx;
            for _ in 0..m {
                f.push(t % p);
                t /= p;
            }
            f.push(1);
            if is_irreducible_mod_p(&f, p) {
                return Self::with_modulus(p, f);
            }
        }
        Err(Error::InvalidRing("no irreducible modulus found".into()))
    }

    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidRing(format!("{p} is not prime")));
        }
        let modulus: Vec<u64> = upoly_trim(modulus.iter().map(|c| c % p).collect());
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidRing("modulus must be monic of positive degree".into()));
        }
        if !is_irreducible_mod_p(&modulus, p) {
            return Err(Error::InvalidRing("modulus is reducible".into()));
        }
        let m = (modulus.len() - 1) as u32;
        Ok(ExtField { p, m, modulus: Arc::new(modulus) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The class of x.
    pub fn generator(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.m as usize];
        if self.m == 1 {
            v[0] = (self.p - self.modulus[0]) % self.p;
        } else {
            v[1] = 1;
        }
        v
    }

    pub fn from_coords(&self, c: &[u64]) -> Vec<u64> {
        let r = upoly_rem(c, &self.modulus, self.p);
        let mut out = vec![0u64; self.m as usize];
        out[..r.len()].copy_from_slice(&r);
        out
    }
}

impl Ring for ExtField {
    type Elem = Vec<u64>;

    fn zero(&self) -> Vec<u64> {
        vec![0; self.m as usize]
    }
    fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = 1;
        v
    }
    fn from_i64(&self, n: i64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = n.rem_euclid(self.p as i64) as u64;
        v
    }
    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }
    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| (self.p - x) % self.p).collect()
    }
    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + self.p - y) % self.p).collect()
    }
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let m = self.m as usize;
        let p = self.p;
        let mut prod = vec![0u64; 2 * m - 1];
        for i in 0..m {
            if a[i] == 0 {
                continue;
            }
            for j in 0..m {
                prod[i + j] = (prod[i + j] + mul_mod(a[i], b[j], p)) % p;
            }
        }
        for d in (m..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..m {
                let t = mul_mod(c, self.modulus[i], p);
                prod[d - m + i] = (prod[d - m + i] + p - t) % p;
            }
        }
        prod.truncate(m);
        prod
    }
    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|x| *x == 0)
    }
    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.p.pow(self.m) - 2))
    }
    fn is_field(&self) -> bool {
        true
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn spec(&self) -> CoefficientRing {
        CoefficientRing::ExtensionField { p: self.p, m: self.m, modulus: self.modulus.to_vec() }
    }
    fn frobenius(&self, a: &Vec<u64>, e: i64) -> Option<Vec<u64>> {
        let k = e.rem_euclid(self.m as i64) as u32;
        let mut out = a.clone();
        for _ in 0..k {
            out = self.pow(&out, self.p);
        }
        Some(out)
    }
    fn render(&self, a: &Vec<u64>) -> String {
        let terms: Vec<String> = a
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}a"),
                _ => format!("{c}a^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

impl Field for ExtField {}

impl FiniteField for ExtField {
    fn prime(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> u32 {
        self.m
    }
    fn elem_from_index(&self, idx: u64) -> Vec<u64> {
        let mut t = idx;
        (0..self.m)
            .map(|_| {
                let c = t % self.p;
                t /= self.p;
                c
            })
            .collect()
    }
    fn coords(&self, a: &Vec<u64>) -> Vec<u64> {
        a.clone()
    }
}

/// Z/p^m, the truncation of Z_p at precision m.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PadicTrunc {
    p: u64,
    m: u32,
    modulus: u64,
}

impl PadicTrunc {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        CoefficientRing::PadicTruncation { p, m }.validate()?;
        let modulus = p
            .checked_pow(m)
            .filter(|q| *q < (1u64 << 62))
            .ok_or_else(|| Error::InvalidRing("p^m too large".into()))?;
        Ok(PadicTrunc { p, m, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl Ring for PadicTrunc {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.modulus as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.modulus
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.modulus - a) % self.modulus
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.modulus)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if a % self.p == 0 {
            None
        } else {
            inv_mod(*a, self.modulus)
        }
    }
    fn is_field(&self) -> bool {
        self.m == 1
    }
    fn characteristic(&self) -> u64 {
        self.modulus
    }
    fn spec(&self) -> CoefficientRing {
        CoefficientRing::PadicTruncation { p: self.p, m: self.m }
    }
    fn frobenius(&self, a: &u64, _e: i64) -> Option<u64> {
        if self.m == 1 {
            Some(*a)
        } else {
            None
        }
    }
    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
}

impl LocalRing for PadicTrunc {
    fn residue_field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }
    fn reduce(&self, a: &u64) -> u64 {
        a % self.p
    }
}

/// Z[x]/(Φ_{p^r}(x), p^m): the ring of integers of Q_p(μ_{p^r}) at finite precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclotomicTrunc {
    p: u64,
    r: u32,
    m: u32,
    modulus: u64,
    deg: usize,
    step: usize,
}

impl CyclotomicTrunc {
    pub fn new(p: u64, r: u32, m: u32) -> Result<Self> {
        CoefficientRing::TruncatedCyclotomic { p, r, m }.validate()?;
        let modulus = p
            .checked_pow(m)
            .filter(|q| *q < (1u64 << 62))
            .ok_or_else(|| Error::InvalidRing("p^m too large".into()))?;
        let step = p.pow(r - 1) as usize;
        Ok(CyclotomicTrunc { p, r, m, modulus, deg: (p as usize - 1) * step, step })
    }

    /// The root of unity ε = class of x.
    pub fn epsilon(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.deg];
        if self.deg > 1 {
            v[1] = 1;
        } else {
            v[0] = self.modulus - 1;
        }
        v
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    fn reduce_poly(&self, mut prod: Vec<u64>) -> Vec<u64> {
        let q = self.modulus;
        // Φ_{p^r} = Σ_{i<p} x^{i·step}; its leading term is x^deg.
        for d in (self.deg..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..(self.p as usize - 1) {
                let idx = d - self.deg + i * self.step;
                prod[idx] = (prod[idx] + q - c) % q;
            }
        }
        prod.resize(self.deg, 0);
        prod
    }

    fn mul_matrix(&self, a: &[u64]) -> Vec<Vec<u64>> {
        let mut cols = Vec::with_capacity(self.deg);
        let mut basis = vec![0u64; self.deg];
        for j in 0..self.deg {
            basis.iter_mut().for_each(|x| *x = 0);
            basis[j] = 1;
            cols.push(self.mul(&a.to_vec(), &basis));
        }
        (0..self.deg).map(|i| (0..self.deg).map(|j| cols[j][i]).collect()).collect()
    }
}

/// Solves A x = b over Z/q with q = p^m by elimination on unit pivots.
pub(crate) fn solve_local(mut a: Vec<Vec<u64>>, mut b: Vec<u64>, q: u64, p: u64) -> Option<Vec<u64>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] % p != 0)?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = inv_mod(a[col][col], q)?;
        for x in a[col].iter_mut() {
            *x = mul_mod(*x, inv, q);
        }
        b[col] = mul_mod(b[col], inv, q);
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..n {
                    let t = mul_mod(f, a[col][c], q);
                    a[r][c] = (a[r][c] + q - t) % q;
                }
                let t = mul_mod(f, b[col], q);
                b[r] = (b[r] + q - t) % q;
            }
        }
    }
    Some(b)
}

impl Ring for CyclotomicTrunc {
    type Elem = Vec<u64>;

    fn zero(&self) -> Vec<u64> {
        vec![0; self.deg]
    }
    fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = 1 % self.modulus;
        v
    }
    fn from_i64(&self, n: i64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = n.rem_euclid(self.modulus as i64) as u64;
        v
    }
    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.modulus).collect()
    }
    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| (self.modulus - x) % self.modulus).collect()
    }
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let q = self.modulus;
        let mut prod = vec![0u64; 2 * self.deg];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(*x, *y, q)) % q;
            }
        }
        self.reduce_poly(prod)
    }
    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|x| *x == 0)
    }
    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        if self.reduce(a) == 0 {
            return None;
        }
        solve_local(self.mul_matrix(a), self.one(), self.modulus, self.p)
    }
    fn is_field(&self) -> bool {
        false
    }
    fn characteristic(&self) -> u64 {
        self.modulus
    }
    fn spec(&self) -> CoefficientRing {
        CoefficientRing::TruncatedCyclotomic { p: self.p, r: self.r, m: self.m }
    }
}

impl LocalRing for CyclotomicTrunc {
    fn residue_field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }
    /// The maximal ideal is generated by ε − 1, so reduction evaluates at 1.
    fn reduce(&self, a: &Vec<u64>) -> u64 {
        a.iter().fold(0u64, |acc, c| (acc + c % self.p) % self.p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_field(&self) -> bool {
        true
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn spec(&self) -> CoefficientRing {
        CoefficientRing::Rationals
    }
    fn height(&self, a: &BigRational) -> u64 {
        a.numer().bits() + a.denom().bits()
    }
    fn render(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}

impl Field for Rationals {}

/// Reduces an integral rational modulo a prime; `None` if the denominator is divisible by it.
pub fn rational_mod(a: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let d = a.denom().mod_floor_big(&pb);
    let d = u64::try_from(d).ok()?;
    let dinv = inv_mod(d, p)?;
    let n = u64::try_from(a.numer().mod_floor_big(&pb)).ok()?;
    Some(mul_mod(n, dinv, p))
}

trait ModFloorBig {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt;
}

impl ModFloorBig for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt {
        let r = self % m;
        if r.is_negative() {
            r + m
        } else {
            r
        }
    }
}

pub fn pow_u(b: u64, e: u64, m: u64) -> u64 {
    pow_mod(b, e, m)
}
