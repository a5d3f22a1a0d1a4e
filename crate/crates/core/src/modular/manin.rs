//! Rows (c, d) mod N of exact order N, lifts to SL₂(Z), and Heilbronn matrices.

use std::collections::HashMap;

use crate::algebra::arith::{ext_gcd, gcd, gcd_u, mod_pos};

/// A 2×2 integer matrix [[a, b], [c, d]].
pub type Mat2 = [i64; 4];

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

pub fn det(x: &Mat2) -> i64 {
    x[0] * x[3] - x[1] * x[2]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManinList {
    level: u64,
    pairs: Vec<(u64, u64)>,
    index: HashMap<(u64, u64), usize>,
}

impl ManinList {
    pub fn new(level: u64) -> Self {
        assert!(level >= 1);
        let mut pairs = Vec::new();
        for c in 0..level {
            for d in 0..level {
                if gcd_u(gcd_u(c, d), level) == 1 || level == 1 {
                    pairs.push((c, d));
                }
            }
        }
        let index = pairs.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        ManinList { level, pairs, index }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, i: usize) -> (u64, u64) {
        self.pairs[i]
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    /// Index of (c, d) reduced mod N, or `None` if the row does not have exact order N.
    pub fn index_of(&self, c: i64, d: i64) -> Option<usize> {
        let n = self.level as i64;
        self.index.get(&(mod_pos(c, n) as u64, mod_pos(d, n) as u64)).copied()
    }

    /// A matrix in SL₂(Z) with bottom row ≡ (c, d) mod N.
    pub fn lift_to_sl2(&self, i: usize) -> Mat2 {
        let n = self.level as i64;
        let (c, d) = self.pairs[i];
        let c = if c == 0 { n } else { c as i64 };
        let mut d = d as i64;
        while gcd(c, d) != 1 {
            d += n;
        }
        let (_, x, y) = ext_gcd(d as i128, c as i128);
        // x d + y c = 1, so a = x, b = −y.
        [x as i64, -(y as i64), c, d]
    }
}

/// Heilbronn matrices of determinant p in Cremona's form.
pub fn heilbronn_cremona(p: u64) -> Vec<Mat2> {
    let p = p as i64;
    if p == 2 {
        return vec![[1, 0, 0, 2], [2, 0, 0, 1], [2, 1, 0, 1], [1, 0, 1, 2]];
    }
    let mut out = vec![[1, 0, 0, p]];
    for r in -(p / 2)..=(p / 2) {
        let (mut x1, mut x2, mut y1, mut y2) = (p, -r, 0i64, 1i64);
        let (mut a, mut b) = (-p, r);
        out.push([x1, x2, y1, y2]);
        while b != 0 {
            let q = (a as f64 / b as f64).round() as i64;
            let c = a - b * q;
            a = -b;
            b = c;
            let x3 = q * x2 - x1;
            x1 = x2;
            x2 = x3;
            let y3 = q * y2 - y1;
            y1 = y2;
            y2 = y3;
            out.push([x1, x2, y1, y2]);
        }
    }
    out
}

/// Matrices g_j ∈ SL₂(Z) with {0, u/v} = Σ_j {g_j 0, g_j ∞}; v = 0 means the cusp ∞.
pub fn continued_fraction_path(u: i64, v: i64) -> Vec<Mat2> {
    let mut out = vec![[1, 0, 0, 1]];
    if v == 0 {
        return out;
    }
    let g = gcd(u, v);
    let (mut a, mut b) = (u / g, v / g);
    if b < 0 {
        a = -a;
        b = -b;
    }
    // Convergents p_j/q_j, starting from p_{-2}/q_{-2} = 0/1 and p_{-1}/q_{-1} = 1/0.
    let (mut pm2, mut qm2, mut pm1, mut qm1) = (0i64, 1i64, 1i64, 0i64);
    loop {
        let q = a.div_euclid(b);
        let r = a.rem_euclid(b);
        let (pj, qj) = (q * pm1 + pm2, q * qm1 + qm2);
        // p_j q_{j−1} − p_{j−1} q_j = ±1.
        let s = pj * qm1 - pm1 * qj;
        out.push([s * pj, pm1, s * qj, qm1]);
        pm2 = pm1;
        qm2 = qm1;
        pm1 = pj;
        qm1 = qj;
        if r == 0 {
            break;
        }
        a = b;
        b = r;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_counts_and_lifts() {
        for n in [1u64, 4, 7, 11, 12] {
            let l = ManinList::new(n);
            assert_eq!(l.len() as u64, crate::modular::dimension::jordan_j2(n).max(1));
            for i in 0..l.len() {
                let g = l.lift_to_sl2(i);
                assert_eq!(det(&g), 1);
                assert_eq!(l.index_of(g[2], g[3]), Some(i));
            }
        }
    }

    #[test]
    fn heilbronn_determinants() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let h = heilbronn_cremona(p);
            assert!(h.iter().all(|m| det(m) == p as i64));
        }
    }

    #[test]
    fn paths_telescope() {
        for (u, v) in [(3, 7), (-5, 12), (7, 1), (0, 5), (22, -7)] {
            let path = continued_fraction_path(u, v);
            assert!(path.iter().all(|m| det(m) == 1));
            // Consecutive endpoints chain from 0 to u/v.
            assert_eq!((path[0][1], path[0][3]), (0, 1));
            for w in path.windows(2) {
                assert_eq!(w[0][0] * w[1][3] - w[0][2] * w[1][1], 0);
            }
            let last = path.last().unwrap();
            assert_eq!(last[0] * v - last[2] * u, 0);
        }
    }
}
