//! Components I_{(a,b,u)} of the special fiber at level p^r.

use std::fmt;

use serde::Serialize;

use crate::algebra::arith::{gcd_u, is_prime};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ComponentIndex {
    pub a: u32,
    pub b: u32,
    /// Unit modulo p^{min(a,b)}, equal to 1 when min(a,b) = 0.
    pub u: u64,
}

impl ComponentIndex {
    pub fn new(p: u64, a: u32, b: u32, u: u64) -> Result<Self> {
        let m = p.pow(a.min(b));
        let u = reduce_unit(u, m);
        if gcd_u(u, p) != 1 {
            return Err(Error::Invalid(format!("{u} is not a unit modulo {m}")));
        }
        Ok(ComponentIndex { a, b, u })
    }

    pub fn r(&self) -> u32 {
        self.a + self.b
    }

    /// Igusa level of the component.
    pub fn level(&self) -> u32 {
        self.a.max(self.b)
    }

    pub fn unit_exponent(&self) -> u32 {
        self.a.min(self.b)
    }
}

impl fmt::Display for ComponentIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.u)
    }
}

/// u mod m, with the single class of Z/1 written as 1.
pub fn reduce_unit(u: u64, m: u64) -> u64 {
    if m == 1 {
        1
    } else {
        u % m
    }
}

/// Units of Z/m in increasing order, with Z/1 contributing 1.
pub fn unit_list(m: u64) -> Vec<u64> {
    if m == 1 {
        return vec![1];
    }
    (1..m).filter(|u| gcd_u(*u, m) == 1).collect()
}

/// Units of Z/p^e reducing to u modulo p^f, f ≤ e.
pub fn unit_lifts(p: u64, u: u64, f: u32, e: u32) -> Vec<u64> {
    let small = p.pow(f);
    unit_list(p.pow(e)).into_iter().filter(|v| reduce_unit(*v, small) == reduce_unit(u, small)).collect()
}

pub fn list_components(p: u64, r: u32) -> Result<Vec<ComponentIndex>> {
    if !is_prime(p) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    if r == 0 {
        return Err(Error::Precondition("the component model needs r ≥ 1".into()));
    }
    let mut out = Vec::new();
    for a in (0..=r).rev() {
        let b = r - a;
        for u in unit_list(p.pow(a.min(b))) {
            out.push(ComponentIndex { a, b, u });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_index_sets() {
        let c = list_components(5, 1).unwrap();
        assert_eq!(c, vec![ComponentIndex { a: 1, b: 0, u: 1 }, ComponentIndex { a: 0, b: 1, u: 1 }]);
        let c = list_components(5, 2).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c.iter().filter(|x| x.a == 1).map(|x| x.u).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert_eq!(list_components(3, 3).unwrap().len(), 6);
        assert_eq!(list_components(3, 4).unwrap().len(), 2 + 2 * 2 + 6);
        assert!(list_components(5, 0).is_err());
    }

    #[test]
    fn lifts() {
        assert_eq!(unit_lifts(3, 2, 1, 2), vec![2, 5, 8]);
        assert_eq!(unit_lifts(5, 1, 0, 1), vec![1, 2, 3, 4]);
        assert!(ComponentIndex::new(5, 1, 1, 5).is_err());
        assert_eq!(ComponentIndex::new(5, 2, 0, 3).unwrap().u, 1);
    }
}
