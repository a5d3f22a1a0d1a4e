//! Independent oracles: the p-rank γ of X₁(N) mod p and the supersingular count δ.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::dimension::{genus_x1, jordan_j2};
use crate::algebra::arith::is_prime;
use crate::algebra::{ExtField, FiniteField, PrimeField, Ring};
use crate::curves::{hasse_witt, CurveModel};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaOracle {
    pub p: u64,
    pub level: u64,
    pub genus: u64,
    pub gamma: usize,
    /// Weierstrass coefficients [a1, a2, a3, a4, a6] of the genus-one model used, if any.
    pub model: Option<[i64; 5]>,
    /// a_p = p + 1 − #E(F_p) for the genus-one model.
    pub trace_of_frobenius: Option<i64>,
}

/// Models of the genus-one curves X₁(11), X₁(14), X₁(15).
pub fn genus_one_model(level: u64) -> Option<[i64; 5]> {
    match level {
        11 => Some([0, -1, 1, 0, 0]),
        14 => Some([1, 0, 1, -1, 0]),
        15 => Some([1, 1, 1, 0, 0]),
        _ => None,
    }
}

fn affine_point_count(p: u64, a: &[i64; 5]) -> u64 {
    let pi = p as i64;
    let mut count = 0;
    for x in 0..pi {
        for y in 0..pi {
            let lhs = y * y + a[0] * x * y + a[2] * y;
            let rhs = x * x * x + a[1] * x * x + a[3] * x + a[4];
            if (lhs - rhs).rem_euclid(pi) == 0 {
                count += 1;
            }
        }
    }
    count
}

pub fn gamma_oracle(p: u64, level: u64) -> Result<GammaOracle> {
    if !is_prime(p) || p < 3 || level % p == 0 {
        return Err(Error::Precondition(format!("need an odd prime p ∤ N, got p={p}, N={level}")));
    }
    let genus = genus_x1(level);
    match genus {
        0 => Ok(GammaOracle { p, level, genus, gamma: 0, model: None, trace_of_frobenius: None }),
        1 => {
            let a = genus_one_model(level).expect("every genus-one X₁(N) has a stored model");
            let f = PrimeField::new(p)?;
            let e = CurveModel::elliptic(&f, a.map(|c| f.from_i64(c)))?;
            let gamma = hasse_witt(&e)?.gamma;
            let ap = p as i64 + 1 - (affine_point_count(p, &a) as i64 + 1);
            if usize::from(ap.rem_euclid(p as i64) != 0) != gamma {
                return Err(Error::Consistency(format!("Hasse–Witt and a_{p} = {ap} disagree on ordinarity")));
            }
            Ok(GammaOracle { p, level, genus, gamma, model: Some(a), trace_of_frobenius: Some(ap) })
        }
        g => Err(Error::Unsupported(format!("no curve model for X₁({level}) of genus {g}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupersingularJ {
    /// Coordinates of j in F_p[t]/(m(t)) with m the modulus of F_{p²}.
    pub j: Vec<u64>,
    pub automorphisms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupersingularCount {
    pub p: u64,
    pub level: u64,
    pub invariants: Vec<SupersingularJ>,
    /// Σ 1/#Aut as (numerator, denominator).
    pub mass: (i64, i64),
    pub delta: u64,
}

/// Number of points of y² = x³ + Ax + B over the field, via quadratic characters.
fn curve_point_count(f: &ExtField, a: &[u64], b: &[u64]) -> u64 {
    let q = f.order();
    let half = (q - 1) / 2;
    let mut count = 1;
    for x in f.elements() {
        let x3 = f.mul(&f.mul(&x, &x), &x);
        let r = f.add(&f.add(&x3, &f.mul(&a.to_vec(), &x)), &b.to_vec());
        if f.is_zero(&r) {
            count += 1;
        } else if f.is_one(&f.pow(&r, half)) {
            count += 2;
        }
    }
    count
}

/// Enumerates supersingular j ∈ F_{p²} and weights the Γ₁(N)-structures by automorphisms.
pub fn supersingular_count(p: u64, level: u64) -> Result<SupersingularCount> {
    if !is_prime(p) || p < 5 {
        return Err(Error::Unsupported(format!("supersingular enumeration needs p ≥ 5, got {p}")));
    }
    if level < 4 || level % p == 0 {
        return Err(Error::Precondition(format!("need N ≥ 4 and p ∤ N, got N={level}")));
    }
    let f = ExtField::new(p, 2)?;
    let q = f.order();
    let j1728 = f.from_i64(1728);
    let mut invariants = Vec::new();
    for j in f.elements() {
        let (a, b, aut) = if f.is_zero(&j) {
            (f.zero(), f.one(), 6)
        } else if j == j1728 {
            (f.one(), f.zero(), 4)
        } else {
            let t = f.sub(&j1728, &j);
            (f.mul(&f.from_i64(3), &f.mul(&j, &t)), f.mul(&f.from_i64(2), &f.mul(&j, &f.mul(&t, &t))), 2)
        };
        let n = curve_point_count(&f, &a, &b);
        // #E(F_{p²}) = p² + 1 − t with p | t exactly for supersingular E.
        if (q as i64 + 1 - n as i64).rem_euclid(p as i64) == 0 {
            invariants.push(SupersingularJ { j, automorphisms: aut });
        }
    }
    let mass = invariants.iter().fold(BigRational::zero(), |acc, s| {
        acc + BigRational::new(BigInt::from(1), BigInt::from(s.automorphisms))
    });
    let expected = BigRational::new(BigInt::from(p - 1), BigInt::from(24));
    if mass != expected {
        return Err(Error::Consistency(format!("mass {mass} differs from (p−1)/24 = {expected}")));
    }
    let j2 = jordan_j2(level);
    let mut delta = 0;
    for s in &invariants {
        if j2 % s.automorphisms != 0 {
            return Err(Error::Consistency(format!("{} level structures do not split into free orbits", j2)));
        }
        delta += j2 / s.automorphisms;
    }
    let m = |x: &BigInt| -> i64 { x.try_into().unwrap() };
    Ok(SupersingularCount { p, level, invariants, mass: (m(mass.numer()), m(mass.denom())), delta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supersingular_examples() {
        let s = supersingular_count(5, 7).unwrap();
        assert_eq!(s.delta, 8);
        assert_eq!(s.invariants.len(), 1);
        assert_eq!(s.invariants[0].automorphisms, 6);
        for p in [5u64, 7, 11, 13] {
            let s = supersingular_count(p, 4).unwrap();
            assert_eq!(s.mass, { let g = crate::algebra::arith::gcd(p as i64 - 1, 24); ((p as i64 - 1) / g, 24 / g) });
            assert_eq!(s.delta, jordan_j2(4) * (p - 1) / 24);
        }
        assert_eq!(supersingular_count(11, 4).unwrap().invariants.len(), 2);
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_oracle(5, 7).unwrap().gamma, 0);
        let g = gamma_oracle(5, 11).unwrap();
        assert_eq!((g.gamma, g.trace_of_frobenius), (1, Some(1)));
        assert_eq!(gamma_oracle(5, 14).unwrap().genus, 1);
        assert!(gamma_oracle(5, 13).is_err());
        assert!(gamma_oracle(11, 11).is_err());
    }
}
