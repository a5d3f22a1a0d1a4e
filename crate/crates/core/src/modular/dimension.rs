//! Closed-form invariants of Γ₁(N): index, elliptic points, cusps, genus and dim S_k.

use serde::Serialize;

use crate::algebra::arith::{divisors, euler_phi, factorize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Gamma1Invariants {
    pub level: u64,
    /// Index of ±Γ₁(N) in PSL₂(Z).
    pub index: u64,
    pub e2: u64,
    pub e3: u64,
    pub cusps: u64,
    pub irregular_cusps: u64,
    pub genus: u64,
    pub contains_minus_one: bool,
}

/// #{(c, d) ∈ (Z/N)² of exact order N} = N² Π(1 − ℓ⁻²).
pub fn jordan_j2(n: u64) -> u64 {
    factorize(n).iter().fold(n * n, |acc, &(l, _)| acc / (l * l) * (l * l - 1))
}

pub fn gamma1_invariants(n: u64) -> Gamma1Invariants {
    assert!(n >= 1);
    let index = match n {
        1 => 1,
        2 => 3,
        _ => jordan_j2(n) / 2,
    };
    let e2 = u64::from(n <= 2);
    let e3 = u64::from(n == 1 || n == 3);
    let cusps = match n {
        1 => 1,
        2 | 3 => 2,
        4 => 3,
        _ => divisors(n).iter().map(|d| euler_phi(*d) * euler_phi(n / d)).sum::<u64>() / 2,
    };
    let irregular_cusps = u64::from(n == 4);
    let twelve_g = 12 + index as i64 - 3 * e2 as i64 - 4 * e3 as i64 - 6 * cusps as i64;
    assert!(twelve_g >= 0 && twelve_g % 12 == 0);
    Gamma1Invariants {
        level: n,
        index,
        e2,
        e3,
        cusps,
        irregular_cusps,
        genus: (twelve_g / 12) as u64,
        contains_minus_one: n <= 2,
    }
}

pub fn genus_x1(n: u64) -> u64 {
    gamma1_invariants(n).genus
}

/// dim S_k(Γ₁(N)) for k ≥ 2.
pub fn dim_cusp_forms_gamma1(n: u64, k: u32) -> u64 {
    assert!(k >= 2);
    let inv = gamma1_invariants(n);
    if k == 2 {
        return inv.genus;
    }
    let k = k as i64;
    let g = inv.genus as i64;
    let (e2, e3) = (inv.e2 as i64, inv.e3 as i64);
    let extra = (k / 4) * e2 + (k / 3) * e3;
    let twice = if k % 2 == 0 {
        2 * ((k - 1) * (g - 1) + (k / 2 - 1) * inv.cusps as i64 + extra)
    } else {
        if inv.contains_minus_one {
            return 0;
        }
        let irr = inv.irregular_cusps as i64;
        let reg = inv.cusps as i64 - irr;
        2 * (k - 1) * (g - 1) + (k - 2) * reg + (k - 1) * irr + 2 * extra
    };
    assert!(twice >= 0 && twice % 2 == 0);
    (twice / 2) as u64
}
