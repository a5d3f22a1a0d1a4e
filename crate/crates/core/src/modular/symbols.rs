//! Weight-k modular symbols for Γ₁(N), presented by Manin symbols [X^i Y^{k−2−i}, (c, d)].
//!
//! Matrices act on the right of Manin symbols by
//! [P, (u, v)]·h = [P(aX + bY, cX + dY), (u, v)h], and on the left of general symbols by
//! g·P{α, β} = (gP){gα, gβ} with (gP)(X, Y) = P(dX − bY, −cX + aY).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::dimension::dim_cusp_forms_gamma1;
use super::manin::{continued_fraction_path, heilbronn_cremona, mat_mul, ManinList, Mat2};
use crate::algebra::arith::{binom, gcd, gcd_u, is_prime, mod_pos};
use crate::algebra::linalg::kernel_with_free;
use crate::algebra::sparse::{sparse_quotient, SparseVec};
use crate::algebra::{Matrix, Rationals, Ring};
use crate::error::{Error, Result};

type Q = BigRational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum HeckeLabel {
    /// T_ℓ through Heilbronn matrices; for ℓ | N this is U_ℓ.
    T(u64),
    Diamond(u64),
    /// Σ_j [[1, j], [0, p]] for p | N.
    U(u64),
    /// Σ_j [[p, 0], [Nj, 1]] for p | N.
    UStar(u64),
    /// [[0, −1], [N, 0]].
    AtkinLehner,
    Star,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeckeData {
    pub label: HeckeLabel,
    /// Action on the cuspidal subspace, in the basis of `cuspidal_basis`; columns are images.
    pub matrix: Matrix<Rationals>,
}

#[derive(Clone, Debug)]
pub struct ModularSymbolSpace {
    level: u64,
    weight: u32,
    manin: ManinList,
    gen_class: Vec<SparseVec<Q>>,
    basis_gens: Vec<usize>,
    two_term: Vec<Option<(usize, i64)>>,
    free_gens: Vec<usize>,
    free_class: Vec<SparseVec<Q>>,
    boundary: Matrix<Rationals>,
    cuspidal: Vec<Vec<Q>>,
    cusp_free: Vec<usize>,
}

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Coefficients of (aX + bY)^i (cX + dY)^j, indexed by the power of X.
fn linear_product(m: &Mat2, i: u32, j: u32) -> Vec<i128> {
    let pw = |x: i64, y: i64, e: u32| -> Vec<i128> {
        (0..=e).map(|t| binom(e as u64, t as u64) as i128 * (x as i128).pow(t) * (y as i128).pow(e - t)).collect()
    };
    let (l, r) = (pw(m[0], m[1], i), pw(m[2], m[3], j));
    let mut out = vec![0i128; (i + j + 1) as usize];
    for (s, x) in l.iter().enumerate() {
        for (t, y) in r.iter().enumerate() {
            out[s + t] += x * y;
        }
    }
    out
}

/// P(aX + bY, cX + dY) for P given by its coefficients on X^i Y^{w−i}.
fn poly_subst(p: &[Q], m: &Mat2) -> Vec<Q> {
    let w = p.len() - 1;
    let lin = |x: i64, y: i64| -> Vec<Vec<BigInt>> {
        let mut pows = vec![vec![BigInt::one()]];
        for e in 1..=w {
            let prev = &pows[e - 1];
            let mut next = vec![BigInt::zero(); e + 1];
            for (s, c) in prev.iter().enumerate() {
                next[s + 1] += c * x;
                next[s] += c * y;
            }
            pows.push(next);
        }
        pows
    };
    let (a, b) = (lin(m[0], m[1]), lin(m[2], m[3]));
    let mut out = vec![Q::zero(); w + 1];
    for (i, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (s, x) in a[i].iter().enumerate() {
            for (t, y) in b[w - i].iter().enumerate() {
                out[s + t] += c * Q::from_integer(x * y);
            }
        }
    }
    out
}

struct SignedUnionFind {
    parent: Vec<usize>,
    coef: Vec<i64>,
    zero: Vec<bool>,
}

impl SignedUnionFind {
    fn new(n: usize) -> Self {
        SignedUnionFind { parent: (0..n).collect(), coef: vec![1; n], zero: vec![false; n] }
    }

    /// (root, c) with x_a = c·x_root.
    fn find(&mut self, a: usize) -> (usize, i64) {
        if self.parent[a] == a {
            return (a, 1);
        }
        let (r, c) = self.find(self.parent[a]);
        self.parent[a] = r;
        self.coef[a] *= c;
        (r, self.coef[a])
    }

    /// Imposes x_a = s·x_b.
    fn relate(&mut self, a: usize, b: usize, s: i64) {
        let (ra, ca) = self.find(a);
        let (rb, cb) = self.find(b);
        if ra == rb {
            if ca != s * cb {
                self.zero[ra] = true;
            }
            return;
        }
        self.parent[ra] = rb;
        self.coef[ra] = s * cb * ca;
        self.zero[rb] |= self.zero[ra];
    }
}

fn sign_pow(e: u32) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

impl ModularSymbolSpace {
    pub fn build(level: u64, weight: u32) -> Result<Self> {
        if level == 0 || weight < 2 {
            return Err(Error::Invalid(format!("need N ≥ 1 and k ≥ 2, got N={level}, k={weight}")));
        }
        if level > 60 {
            return Err(Error::Unsupported(format!("level {level} exceeds 60")));
        }
        let manin = ManinList::new(level);
        let w = weight - 2;
        let nw = (w + 1) as usize;
        let ngens = manin.len() * nw;
        let gen = |i: u32, pair: usize| pair * nw + i as usize;

        let mut uf = SignedUnionFind::new(ngens);
        for pi in 0..manin.len() {
            let (c, d) = manin.pair(pi);
            let (c, d) = (c as i64, d as i64);
            let s_pair = manin.index_of(d, -c).unwrap();
            let j_pair = manin.index_of(-c, -d).unwrap();
            for i in 0..=w {
                // x·σ = (−1)^i [X^{w−i} Y^i, (d, −c)] and x + x·σ = 0.
                uf.relate(gen(i, pi), gen(w - i, s_pair), -sign_pow(i));
                // x·J = (−1)^k [P, (−c, −d)] and x = x·J.
                uf.relate(gen(i, pi), gen(i, j_pair), sign_pow(weight));
            }
        }
        let mut free_of_root: HashMap<usize, usize> = HashMap::new();
        let mut free_gens = Vec::new();
        let mut two_term = Vec::with_capacity(ngens);
        for g in 0..ngens {
            let (r, c) = uf.find(g);
            if uf.zero[r] {
                two_term.push(None);
                continue;
            }
            let idx = *free_of_root.entry(r).or_insert_with(|| {
                free_gens.push(r);
                free_gens.len() - 1
            });
            two_term.push(Some((idx, c)));
        }

        let mut space = ModularSymbolSpace {
            level,
            weight,
            manin,
            gen_class: vec![],
            basis_gens: vec![],
            two_term,
            free_gens,
            free_class: vec![],
            boundary: Matrix::zeros(&Rationals, 0, 0),
            cuspidal: vec![],
            cusp_free: vec![],
        };

        let tau: Mat2 = [0, -1, 1, -1];
        let tau2: Mat2 = [-1, 1, -1, 0];
        let mut rels: Vec<SparseVec<Q>> = Vec::new();
        for pi in 0..space.manin.len() {
            for i in 0..=w {
                let mut row: HashMap<usize, i128> = HashMap::new();
                let mut add = |terms: Vec<(usize, i128)>| {
                    for (g, c) in terms {
                        if let Some((f, s)) = space.two_term[g] {
                            *row.entry(f).or_insert(0) += c * s as i128;
                        }
                    }
                };
                add(vec![(gen(i, pi), 1)]);
                add(space.right_action_gen(i, pi, &tau));
                add(space.right_action_gen(i, pi, &tau2));
                let r: SparseVec<Q> =
                    row.into_iter().filter(|(_, c)| *c != 0).map(|(f, c)| (f, Q::from_integer(BigInt::from(c)))).collect();
                if !r.is_empty() {
                    rels.push(r);
                }
            }
        }
        let quot = sparse_quotient(&Rationals, space.free_gens.len(), &rels);
        space.basis_gens = quot.free.iter().map(|f| space.free_gens[*f]).collect();
        space.free_class = quot.image;
        space.gen_class = space
            .two_term
            .iter()
            .map(|t| match t {
                None => vec![],
                Some((f, s)) => space.free_class[*f].iter().map(|(j, v)| (*j, v * q(*s))).collect(),
            })
            .collect();

        space.boundary = space.boundary_matrix();
        let (cusp, free) = kernel_with_free(&space.boundary);
        space.cuspidal = cusp;
        space.cusp_free = free;
        let expected = 2 * dim_cusp_forms_gamma1(level, weight) as usize;
        if space.cuspidal.len() != expected {
            return Err(Error::Consistency(format!(
                "cuspidal dimension {} differs from 2·dim S_{weight}(Γ₁({level})) = {expected}",
                space.cuspidal.len()
            )));
        }
        Ok(space)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Dimension of the full space of modular symbols.
    pub fn dim(&self) -> usize {
        self.basis_gens.len()
    }

    pub fn cuspidal_dim(&self) -> usize {
        self.cuspidal.len()
    }

    /// Cuspidal basis in full-space coordinates.
    pub fn cuspidal_basis(&self) -> &[Vec<Q>] {
        &self.cuspidal
    }

    pub fn manin(&self) -> &ManinList {
        &self.manin
    }

    fn nw(&self) -> usize {
        (self.weight - 1) as usize
    }

    fn gen_parts(&self, g: usize) -> (u32, usize) {
        ((g % self.nw()) as u32, g / self.nw())
    }

    /// [X^i Y^{w−i}, pair]·h as generator terms.
    fn right_action_gen(&self, i: u32, pair: usize, h: &Mat2) -> Vec<(usize, i128)> {
        let (u, v) = self.manin.pair(pair);
        let (u, v) = (u as i64, v as i64);
        let Some(np) = self.manin.index_of(u * h[0] + v * h[2], u * h[1] + v * h[3]) else {
            return vec![];
        };
        let w = self.weight - 2;
        linear_product(h, i, w - i)
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0)
            .map(|(m, c)| (np * self.nw() + m, c))
            .collect()
    }

    fn add_gen(&self, acc: &mut [Q], g: usize, c: &Q) {
        for (j, v) in &self.gen_class[g] {
            acc[*j] += c * v;
        }
    }

    /// Class of a generator in full-space coordinates.
    pub fn generator_vector(&self, g: usize) -> Vec<Q> {
        let mut acc = vec![Q::zero(); self.dim()];
        self.add_gen(&mut acc, g, &Q::one());
        acc
    }

    /// Images of the full-space basis under x ↦ Σ_h x·h.
    pub fn right_action_images(&self, hs: &[Mat2]) -> Vec<Vec<Q>> {
        self.basis_gens
            .iter()
            .map(|&g| {
                let (i, pair) = self.gen_parts(g);
                let mut acc = vec![Q::zero(); self.dim()];
                for h in hs {
                    for (t, c) in self.right_action_gen(i, pair, h) {
                        self.add_gen(&mut acc, t, &Q::from_integer(BigInt::from(c)));
                    }
                }
                acc
            })
            .collect()
    }

    /// P{0, u/v} in full-space coordinates, added into `acc`.
    fn add_zero_to(&self, acc: &mut [Q], p: &[Q], u: i64, v: i64, sign: &Q) {
        for g in continued_fraction_path(u, v) {
            let pair = self.manin.index_of(g[2], g[3]).expect("SL₂ rows have exact order N");
            for (m, c) in poly_subst(p, &g).iter().enumerate() {
                if !c.is_zero() {
                    self.add_gen(acc, pair * self.nw() + m, &(c * sign));
                }
            }
        }
    }

    /// P{α, β} for cusps given as (numerator, denominator) with (1, 0) = ∞.
    pub fn symbol(&self, p: &[Q], alpha: (i64, i64), beta: (i64, i64)) -> Vec<Q> {
        assert_eq!(p.len(), self.nw());
        let mut acc = vec![Q::zero(); self.dim()];
        self.add_zero_to(&mut acc, p, beta.0, beta.1, &Q::one());
        self.add_zero_to(&mut acc, p, alpha.0, alpha.1, &-Q::one());
        acc
    }

    /// Images of the full-space basis under x ↦ Σ_m m·x.
    pub fn left_action_images(&self, ms: &[Mat2]) -> Vec<Vec<Q>> {
        self.basis_gens
            .iter()
            .map(|&g| {
                let (i, pair) = self.gen_parts(g);
                let lift = self.manin.lift_to_sl2(pair);
                let mut p0 = vec![Q::zero(); self.nw()];
                p0[i as usize] = Q::one();
                let mut acc = vec![Q::zero(); self.dim()];
                for m in ms {
                    let h = mat_mul(m, &lift);
                    let ph = poly_subst(&p0, &[h[3], -h[1], -h[2], h[0]]);
                    self.add_zero_to(&mut acc, &ph, h[0], h[2], &Q::one());
                    self.add_zero_to(&mut acc, &ph, h[1], h[3], &-Q::one());
                }
                acc
            })
            .collect()
    }

    fn diamond_images(&self, d: u64) -> Vec<Vec<Q>> {
        let d = d as i64;
        self.basis_gens
            .iter()
            .map(|&g| {
                let (i, pair) = self.gen_parts(g);
                let (u, v) = self.manin.pair(pair);
                let np = self.manin.index_of(d * u as i64, d * v as i64).unwrap();
                self.generator_vector(np * self.nw() + i as usize)
            })
            .collect()
    }

    /// Class of the cusp vector (x, y), with sign, or `None` if it vanishes in weight k.
    fn cusp_class(&self, x: i64, y: i64) -> Option<((i64, i64), i64)> {
        let n = self.level as i64;
        let canon = |x: i64, y: i64| {
            let y = mod_pos(y, n);
            let g = gcd(y, n);
            (mod_pos(x, g), y)
        };
        let pos = canon(x, y);
        let neg = canon(-x, -y);
        if pos == neg {
            return if self.weight % 2 == 1 { None } else { Some((pos, 1)) };
        }
        if pos < neg {
            Some((pos, 1))
        } else {
            Some((neg, sign_pow(self.weight)))
        }
    }

    fn boundary_matrix(&self) -> Matrix<Rationals> {
        let w = self.weight - 2;
        let mut cusps: HashMap<(i64, i64), usize> = HashMap::new();
        let mut cols: Vec<Vec<(usize, i64)>> = Vec::new();
        for &g in &self.basis_gens {
            let (i, pair) = self.gen_parts(g);
            let m = self.manin.lift_to_sl2(pair);
            let mut col = Vec::new();
            let mut push = |x: i64, y: i64, s: i64, col: &mut Vec<(usize, i64)>| {
                if let Some((key, t)) = self.cusp_class(x, y) {
                    let n = cusps.len();
                    let idx = *cusps.entry(key).or_insert(n);
                    col.push((idx, s * t));
                }
            };
            if i == w {
                push(m[0], m[2], 1, &mut col);
            }
            if i == 0 {
                push(m[1], m[3], -1, &mut col);
            }
            cols.push(col);
        }
        let mut b = Matrix::zeros(&Rationals, cusps.len(), self.dim());
        for (j, col) in cols.iter().enumerate() {
            for (r, s) in col {
                let v = Rationals.add(b.get(*r, j), &q(*s));
                b.set(*r, j, v);
            }
        }
        b
    }

    pub fn is_cuspidal(&self, v: &[Q]) -> bool {
        self.boundary.mul_vec(v).iter().all(|x| x.is_zero())
    }

    /// Full-space images of the basis for an operator label.
    pub fn full_images(&self, label: &HeckeLabel) -> Result<Vec<Vec<Q>>> {
        let n = self.level;
        match label {
            HeckeLabel::T(l) => {
                if !is_prime(*l) {
                    return Err(Error::Invalid(format!("T_{l}: only prime indices are supported")));
                }
                Ok(self.right_action_images(&heilbronn_cremona(*l)))
            }
            HeckeLabel::Diamond(d) => {
                if gcd_u(*d, n) != 1 {
                    return Err(Error::Invalid(format!("⟨{d}⟩ needs gcd({d}, {n}) = 1")));
                }
                Ok(self.diamond_images(*d % n))
            }
            HeckeLabel::U(p) | HeckeLabel::UStar(p) => {
                if !is_prime(*p) || n % p != 0 {
                    return Err(Error::Invalid(format!("U_{p} needs a prime dividing the level {n}")));
                }
                let p = *p as i64;
                let ms: Vec<Mat2> = (0..p)
                    .map(|j| if matches!(label, HeckeLabel::U(_)) { [1, j, 0, p] } else { [p, 0, n as i64 * j, 1] })
                    .collect();
                Ok(self.left_action_images(&ms))
            }
            HeckeLabel::AtkinLehner => Ok(self.left_action_images(&[[0, -1, n as i64, 0]])),
            HeckeLabel::Star => Ok(self.right_action_images(&[[-1, 0, 0, 1]])),
        }
    }

    /// Coordinates of a cuspidal vector in `cuspidal_basis`.
    pub fn cuspidal_coords(&self, v: &[Q]) -> Result<Vec<Q>> {
        if !self.is_cuspidal(v) {
            return Err(Error::Consistency("vector is not cuspidal".into()));
        }
        Ok(self.cusp_free.iter().map(|&c| v[c].clone()).collect())
    }

    /// Restriction of an operator, given by full-space images, to the cuspidal subspace.
    pub fn restrict_to_cuspidal(&self, images: &[Vec<Q>]) -> Result<Matrix<Rationals>> {
        let d = self.dim();
        let cols = self
            .cuspidal
            .iter()
            .map(|c| {
                let mut acc = vec![Q::zero(); d];
                for (j, cj) in c.iter().enumerate() {
                    if cj.is_zero() {
                        continue;
                    }
                    for (i, t) in images[j].iter().enumerate() {
                        if !t.is_zero() {
                            acc[i] += cj * t;
                        }
                    }
                }
                self.cuspidal_coords(&acc)
                    .map_err(|_| Error::Consistency("operator does not preserve the cuspidal subspace".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(&Rationals, self.cuspidal_dim(), &cols))
    }

    pub fn hecke_matrix(&self, label: &HeckeLabel) -> Result<HeckeData> {
        let images = self.full_images(label)?;
        Ok(HeckeData { label: label.clone(), matrix: self.restrict_to_cuspidal(&images)? })
    }

    /// Hecke data for several labels, failing if two of them do not commute.
    pub fn commuting_family(&self, labels: &[HeckeLabel]) -> Result<Vec<HeckeData>> {
        let out = labels.iter().map(|l| self.hecke_matrix(l)).collect::<Result<Vec<_>>>()?;
        for (i, a) in out.iter().enumerate() {
            for b in &out[i + 1..] {
                if a.matrix.mul(&b.matrix) != b.matrix.mul(&a.matrix) {
                    return Err(Error::Consistency(format!("{:?} and {:?} do not commute", a.label, b.label)));
                }
            }
        }
        Ok(out)
    }

    /// A matrix of SL₂(Z) congruent to [[d⁻¹, *], [0, d]] mod N.
    pub fn sigma_matrix(&self, d: u64) -> Result<Mat2> {
        if gcd_u(d, self.level) != 1 {
            return Err(Error::Invalid(format!("{d} is not a unit mod {}", self.level)));
        }
        let pair = self.manin.index_of(0, d as i64).expect("unit row");
        Ok(self.manin.lift_to_sl2(pair))
    }

    pub fn two_term_class(&self, g: usize) -> Option<(usize, i64)> {
        self.two_term[g]
    }

    pub fn free_symbol_count(&self) -> usize {
        self.free_gens.len()
    }

    pub fn free_symbol_generator(&self, f: usize) -> usize {
        self.free_gens[f]
    }

    pub fn free_symbol_class(&self, f: usize) -> &SparseVec<Q> {
        &self.free_class[f]
    }

    /// Generator of full-space basis vector j.
    pub fn basis_generator(&self, j: usize) -> usize {
        self.basis_gens[j]
    }

    pub fn generator_index(&self, i: u32, pair: usize) -> usize {
        pair * self.nw() + i as usize
    }
}
