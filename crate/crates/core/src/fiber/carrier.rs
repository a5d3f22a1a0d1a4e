//! Carrier modules M_s for Igusa levels 1 ≤ s ≤ r with F_*, ρ_*, ρ^*, diamonds and ⟨p⟩_N.
//!
//! M_s = V ⊗ F_p[Z/p^{s−1}], where Z/p^{s−1} is generated by the image of 1 + p in
//! (Z/p^s)^× and the Teichmüller part of (Z/p^s)^× acts on V through a grading.
//! F_* and ⟨p⟩_N are matrices over the top-level group ring, folded down to each level.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::components::reduce_unit;
use crate::algebra::arith::{is_prime, pow_mod};
use crate::algebra::linalg::{inverse, kernel_with_free, solve};
use crate::algebra::ring::rational_mod;
use crate::algebra::{Matrix, PrimeField, Rationals, Ring};
use crate::error::{Error, Result};
use crate::modular::{HeckeLabel, ModularSymbolSpace};
use crate::semilinear::{fitting_decompose, SemilinearOperator};
use crate::tower::{fold_group_ring, group_ring_mult};

/// Square matrix whose entries are group ring elements Σ_j c_j γ^j, stored as coefficient lists.
pub type GroupRingMatrix = Vec<Vec<Vec<u64>>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarrierKind {
    Synthetic,
    Modular,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarrierSpec {
    pub p: u64,
    pub r: u32,
    pub kind: CarrierKind,
    /// Teichmüller grade j of each basis vector of V: ⟨ζ⟩ acts by ζ^j.
    pub grades: Vec<usize>,
    /// Entries have length p^{r−1}.
    pub frob: GroupRingMatrix,
    pub tame: GroupRingMatrix,
    /// λ on V; the residue at level s is λ ⊗ augmentation.
    #[serde(default)]
    pub residue: Option<Vec<u64>>,
    /// Expected rank of the F_*-ordinary part over the group ring.
    #[serde(default)]
    pub designated_rank: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
struct Level {
    n: usize,
    frob: GroupRingMatrix,
    frob_matrix: Matrix<PrimeField>,
    tame_matrix: Matrix<PrimeField>,
    tame_inv: Matrix<PrimeField>,
    ordinary: Vec<Vec<u64>>,
    /// F_* in the coordinates of `ordinary`, inverted.
    frob_ord_inv: Matrix<PrimeField>,
    /// dlog_{1+p} on 1-units mod p^s.
    dlog: Vec<(u64, usize)>,
    residue: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub level: u32,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IgusaCarrier {
    spec: CarrierSpec,
    field: PrimeField,
    levels: Vec<Level>,
}

fn conv(f: &PrimeField, a: &[u64], x: &[u64], out: &mut [u64]) {
    let n = x.len();
    for (h, c) in a.iter().enumerate() {
        if *c == 0 {
            continue;
        }
        for g in 0..n {
            let t = f.mul(c, &x[g]);
            let k = (g + h) % n;
            out[k] = f.add(&out[k], &t);
        }
    }
}

fn expand(f: &PrimeField, m: &GroupRingMatrix, n: usize) -> Matrix<PrimeField> {
    let d = m.len();
    let blocks: Vec<Vec<Matrix<PrimeField>>> =
        m.iter().map(|row| row.iter().map(|e| group_ring_mult(f, &fold_group_ring(f, e, n))).collect()).collect();
    Matrix::from_fn(f, d * n, d * n, |i, j| *blocks[i / n][j / n].get(i % n, j % n))
}

impl IgusaCarrier {
    pub fn new(spec: CarrierSpec) -> Result<Self> {
        let p = spec.p;
        if !is_prime(p) || p == 2 {
            return Err(Error::Config(format!("carrier needs an odd prime, got {p}")));
        }
        if spec.r == 0 {
            return Err(Error::Config("carrier needs r ≥ 1".into()));
        }
        let f = PrimeField::new(p)?;
        let d = spec.grades.len();
        let top = p.pow(spec.r - 1) as usize;
        for (name, m) in [("F_*", &spec.frob), ("<p>_N", &spec.tame)] {
            if m.len() != d || m.iter().any(|row| row.len() != d || row.iter().any(|e| e.len() != top)) {
                return Err(Error::Config(format!("{name} must be a {d}×{d} matrix of group ring elements of length {top}")));
            }
            if m.iter().flatten().flatten().any(|c| *c >= p) {
                return Err(Error::Config(format!("{name} has entries outside F_{p}")));
            }
        }
        if spec.grades.iter().any(|g| *g >= (p - 1) as usize) {
            return Err(Error::Config(format!("grades must lie in 0..{}", p - 1)));
        }
        if let Some(l) = &spec.residue {
            if l.len() != d || l.iter().any(|c| *c >= p) {
                return Err(Error::Config("residue functional has the wrong shape".into()));
            }
        }
        let mut levels = Vec::new();
        for s in 1..=spec.r {
            let n = p.pow(s - 1) as usize;
            let frob: GroupRingMatrix =
                spec.frob.iter().map(|row| row.iter().map(|e| fold_group_ring(&f, e, n)).collect()).collect();
            let frob_matrix = expand(&f, &spec.frob, n);
            let tame_matrix = expand(&f, &spec.tame, n);
            let tame_inv = inverse(&tame_matrix).ok_or_else(|| Error::Config("<p>_N is not invertible".into()))?;
            let op = SemilinearOperator::linear(frob_matrix.clone())?;
            let ordinary = fitting_decompose(&op).ordinary;
            let frob_ord_inv = if ordinary.is_empty() {
                Matrix::zeros(&f, 0, 0)
            } else {
                let restricted = op.restrict(&ordinary)?;
                inverse(restricted.matrix()).ok_or_else(|| Error::Consistency("F_* is not invertible on its ordinary part".into()))?
            };
            let modulus = p.pow(s);
            let dlog = (0..n).map(|k| (pow_mod(1 + p, k as u64, modulus), k)).collect();
            let residue = spec.residue.as_ref().map(|l| l.iter().flat_map(|c| std::iter::repeat(*c).take(n)).collect());
            levels.push(Level { n, frob, frob_matrix, tame_matrix, tame_inv, ordinary, frob_ord_inv, dlog, residue });
        }
        Ok(IgusaCarrier { spec, field: f, levels })
    }

    pub fn spec(&self) -> &CarrierSpec {
        &self.spec
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn r(&self) -> u32 {
        self.spec.r
    }

    pub fn kind(&self) -> CarrierKind {
        self.spec.kind
    }

    /// Rank of V, the group-ring rank of every M_s.
    pub fn rank(&self) -> usize {
        self.spec.grades.len()
    }

    pub fn group_order(&self, s: u32) -> usize {
        self.level(s).n
    }

    pub fn dim(&self, s: u32) -> usize {
        self.rank() * self.level(s).n
    }

    fn level(&self, s: u32) -> &Level {
        assert!(s >= 1 && s <= self.spec.r, "level {s} outside 1..={}", self.spec.r);
        &self.levels[s as usize - 1]
    }

    pub fn has_residues(&self) -> bool {
        self.spec.residue.is_some()
    }

    pub fn zero(&self, s: u32) -> Vec<u64> {
        vec![0; self.dim(s)]
    }

    pub fn frob(&self, s: u32, v: &[u64]) -> Vec<u64> {
        let lv = self.level(s);
        let n = lv.n;
        let mut out = vec![0; v.len()];
        for (i, row) in lv.frob.iter().enumerate() {
            for (k, e) in row.iter().enumerate() {
                conv(&self.field, e, &v[k * n..(k + 1) * n], &mut out[i * n..(i + 1) * n]);
            }
        }
        out
    }

    pub fn frob_pow(&self, s: u32, e: u32, v: &[u64]) -> Vec<u64> {
        (0..e).fold(v.to_vec(), |acc, _| self.frob(s, &acc))
    }

    pub fn frob_matrix(&self, s: u32) -> &Matrix<PrimeField> {
        &self.level(s).frob_matrix
    }

    /// Basis of the Fitting-ordinary part of F_* on M_s.
    pub fn ordinary_basis(&self, s: u32) -> &[Vec<u64>] {
        &self.level(s).ordinary
    }

    /// F_*^{-e} on the ordinary part of M_s.
    pub fn frob_inverse_pow(&self, s: u32, e: u32, v: &[u64]) -> Result<Vec<u64>> {
        let lv = self.level(s);
        if v.iter().all(|c| *c == 0) {
            return Ok(v.to_vec());
        }
        let b = Matrix::from_columns(&self.field, v.len(), &lv.ordinary);
        let coords = if lv.ordinary.is_empty() { None } else { solve(&b, v) };
        let coords = coords.ok_or_else(|| Error::Precondition("vector is not in the F_*-ordinary part".into()))?;
        let c = lv.frob_ord_inv.pow(e as u64).mul_vec(&coords);
        Ok(b.mul_vec(&c))
    }

    /// ⟨p⟩_N^e.
    pub fn tame_pow(&self, s: u32, e: i64, v: &[u64]) -> Vec<u64> {
        let lv = self.level(s);
        let m = if e >= 0 { &lv.tame_matrix } else { &lv.tame_inv };
        (0..e.unsigned_abs()).fold(v.to_vec(), |acc, _| m.mul_vec(&acc))
    }

    /// ρ_*: M_s → M_{s−1}.
    pub fn trace_down(&self, s: u32, v: &[u64]) -> Vec<u64> {
        let (hi, lo) = (self.level(s).n, self.level(s - 1).n);
        let mut out = vec![0; self.rank() * lo];
        for i in 0..self.rank() {
            for g in 0..hi {
                let k = i * lo + g % lo;
                out[k] = self.field.add(&out[k], &v[i * hi + g]);
            }
        }
        out
    }

    /// ρ^*: M_s → M_{s+1}.
    pub fn pull_up(&self, s: u32, v: &[u64]) -> Vec<u64> {
        let (lo, hi) = (self.level(s).n, self.level(s + 1).n);
        let mut out = vec![0; self.rank() * hi];
        for i in 0..self.rank() {
            for g in 0..hi {
                out[i * hi + g] = v[i * lo + g % lo];
            }
        }
        out
    }

    /// ⟨u⟩ for a unit u of Z/p^s; only u mod p^s matters.
    pub fn diamond(&self, s: u32, u: u64, v: &[u64]) -> Vec<u64> {
        let p = self.spec.p;
        let lv = self.level(s);
        let modulus = p.pow(s);
        let u = u % modulus;
        let zeta = u % p;
        assert!(zeta != 0, "{u} is not a unit");
        let teich = pow_mod(zeta, p.pow(s - 1), modulus);
        let teich_inv = crate::algebra::arith::inv_mod(teich, modulus).unwrap();
        let one_unit = (u as u128 * teich_inv as u128 % modulus as u128) as u64;
        let shift = lv.dlog.iter().find(|(x, _)| *x == one_unit).map(|(_, k)| *k).expect("1 + p generates the 1-units");
        let n = lv.n;
        let mut out = vec![0; v.len()];
        for (i, grade) in self.spec.grades.iter().enumerate() {
            let c = pow_mod(zeta, *grade as u64, p);
            for g in 0..n {
                out[i * n + (g + shift) % n] = self.field.mul(&c, &v[i * n + g]);
            }
        }
        out
    }

    pub fn diamond_inv(&self, s: u32, u: u64, v: &[u64]) -> Vec<u64> {
        let modulus = self.spec.p.pow(s);
        self.diamond(s, crate::algebra::arith::inv_mod(u % modulus, modulus).expect("unit"), v)
    }

    pub fn residue(&self, s: u32, v: &[u64]) -> Option<u64> {
        let l = self.level(s).residue.as_ref()?;
        Some(crate::algebra::matrix::dot(&self.field, l, v))
    }

    /// Replaces the level-s residue functional; used to build carriers violating its relations.
    pub fn with_level_residue(mut self, s: u32, functional: Vec<u64>) -> Result<Self> {
        if functional.len() != self.dim(s) {
            return Err(Error::Dimension("residue functional length".into()));
        }
        self.levels[s as usize - 1].residue = Some(functional);
        Ok(self)
    }

    fn basis(&self, s: u32) -> Vec<Vec<u64>> {
        let n = self.dim(s);
        (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect()
    }

    fn same_on_basis(&self, s: u32, lhs: impl Fn(&[u64]) -> Vec<u64>, rhs: impl Fn(&[u64]) -> Vec<u64>) -> bool {
        self.basis(s).iter().all(|e| lhs(e) == rhs(e))
    }

    /// The declared relations among F_*, ρ_*, ρ^*, diamonds, ⟨p⟩_N and residues.
    pub fn verify_relations(&self) -> Vec<RelationCheck> {
        let p = self.spec.p;
        let mut out = Vec::new();
        let mut push = |relation: &str, level: u32, holds: bool| {
            out.push(RelationCheck { relation: relation.into(), level, holds });
        };
        let g = crate::algebra::arith::primitive_root(p).unwrap();
        for s in 1..=self.spec.r {
            let modulus = p.pow(s);
            let gens = [g, (1 + p) % modulus];
            push(
                "F_* commutes with diamonds",
                s,
                gens.iter().all(|u| self.same_on_basis(s, |v| self.frob(s, &self.diamond(s, *u, v)), |v| self.diamond(s, *u, &self.frob(s, v)))),
            );
            push("F_* commutes with <p>_N", s, self.same_on_basis(s, |v| self.frob(s, &self.tame_pow(s, 1, v)), |v| self.tame_pow(s, 1, &self.frob(s, v))));
            push(
                "<p>_N commutes with diamonds",
                s,
                gens.iter().all(|u| self.same_on_basis(s, |v| self.tame_pow(s, 1, &self.diamond(s, *u, v)), |v| self.diamond(s, *u, &self.tame_pow(s, 1, v)))),
            );
            let order = (p - 1) * p.pow(s - 1);
            push(
                "diamonds factor through (Z/p^s)^×",
                s,
                self.same_on_basis(s, |v| (0..order).fold(v.to_vec(), |acc, _| self.diamond(s, g, &acc)), |v| v.to_vec())
                    && self.same_on_basis(s, |v| self.diamond(s, g + modulus, v), |v| self.diamond(s, g, v)),
            );
            if s < self.spec.r {
                push("rho_* rho^* = 0", s, self.same_on_basis(s, |v| self.trace_down(s + 1, &self.pull_up(s, v)), |v| vec![0; v.len()]));
                let kernel: Vec<u64> = (0..p).map(|t| 1 + t * modulus).collect();
                push(
                    "rho^* rho_* = sum of <d> over 1 + p^s",
                    s + 1,
                    self.same_on_basis(
                        s + 1,
                        |v| self.pull_up(s, &self.trace_down(s + 1, v)),
                        |v| kernel.iter().fold(vec![0; v.len()], |acc, d| crate::algebra::matrix::vec_add(&self.field, &acc, &self.diamond(s + 1, *d, v))),
                    ),
                );
                push("F_* commutes with rho_*", s + 1, self.same_on_basis(s + 1, |v| self.trace_down(s + 1, &self.frob(s + 1, v)), |v| self.frob(s, &self.trace_down(s + 1, v))));
                push("F_* commutes with rho^*", s, self.same_on_basis(s, |v| self.pull_up(s, &self.frob(s, v)), |v| self.frob(s + 1, &self.pull_up(s, v))));
                push(
                    "rho_* is diamond-equivariant",
                    s + 1,
                    gens.iter().all(|u| self.same_on_basis(s + 1, |v| self.trace_down(s + 1, &self.diamond(s + 1, *u, v)), |v| self.diamond(s, *u, &self.trace_down(s + 1, v)))),
                );
                push("rho^* is injective", s, self.basis(s).iter().all(|e| self.pull_up(s, e).iter().any(|c| *c != 0)));
            }
            if self.levels[s as usize - 1].residue.is_some() {
                let res = |v: &[u64]| self.residue(s, v).unwrap();
                push("res is diamond-invariant", s, gens.iter().all(|u| self.basis(s).iter().all(|e| res(&self.diamond(s, *u, e)) == res(e))));
                push("res(F_* w) = res(w)", s, self.basis(s).iter().all(|e| res(&self.frob(s, e)) == res(e)));
                push("res(<p>_N w) = res(w)", s, self.basis(s).iter().all(|e| res(&self.tame_pow(s, 1, e)) == res(e)));
                if s < self.spec.r {
                    push(
                        "res(rho_* w) = res(w)",
                        s + 1,
                        self.basis(s + 1).iter().all(|e| self.residue(s, &self.trace_down(s + 1, e)).unwrap() == self.residue(s + 1, e).unwrap()),
                    );
                }
            }
        }
        out
    }

    /// Random carrier with an F_*-ordinary part free of rank `ordinary` and a nilpotent part of rank `nilpotent`.
    pub fn random(p: u64, r: u32, ordinary: usize, nilpotent: usize, with_residue: bool, seed: u64) -> Result<Self> {
        if !is_prime(p) || p == 2 || r == 0 {
            return Err(Error::Config(format!("random carrier needs an odd prime and r ≥ 1, got p={p}, r={r}")));
        }
        if with_residue && ordinary == 0 {
            return Err(Error::Config("residues need a nonzero ordinary part".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PrimeField::new(p)?;
        let n = p.pow(r - 1) as usize;
        let d = ordinary + nilpotent;
        let grades: Vec<usize> = (0..d).map(|i| if with_residue && i == 0 { 0 } else { rng.gen_range(0..(p - 1) as usize) }).collect();
        let zero = || vec![0u64; n];
        let rand_elem = |rng: &mut ChaCha8Rng| -> Vec<u64> { (0..n).map(|_| rng.gen_range(0..p)).collect() };
        let frob = loop {
            let mut m: GroupRingMatrix = vec![vec![zero(); d]; d];
            for i in 0..d {
                for k in 0..d {
                    if grades[i] != grades[k] {
                        continue;
                    }
                    let live = if i < ordinary { true } else { k > i };
                    if live {
                        m[i][k] = rand_elem(&mut rng);
                    }
                }
            }
            if with_residue {
                m[0] = vec![zero(); d];
                m[0][0][0] = 1;
            }
            let aug = Matrix::from_fn(&f, ordinary, ordinary, |i, k| m[i][k].iter().fold(0, |a, c| f.add(&a, c)));
            if inverse(&aug).is_some() {
                break m;
            }
        };
        let mut tame: GroupRingMatrix = vec![vec![zero(); d]; d];
        let mut scalars = vec![0u64; (p - 1) as usize];
        let mut shifts = vec![0usize; (p - 1) as usize];
        for j in 0..(p - 1) as usize {
            scalars[j] = if with_residue && j == 0 { 1 } else { rng.gen_range(1..p) };
            shifts[j] = rng.gen_range(0..n);
        }
        for i in 0..d {
            tame[i][i][shifts[grades[i]]] = scalars[grades[i]];
        }
        let residue = with_residue.then(|| (0..d).map(|i| u64::from(i == 0)).collect::<Vec<u64>>());
        // Scalar change of basis within each grade.
        let change = loop {
            let c = Matrix::from_fn(&f, d, d, |i, k| if grades[i] == grades[k] { rng.gen_range(0..p) } else { 0 });
            if let Some(ci) = inverse(&c) {
                break (c, ci);
            }
        };
        let conj = |m: &GroupRingMatrix| -> GroupRingMatrix {
            let (c, ci) = &change;
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|k| {
                            let mut e = zero();
                            for j in 0..d {
                                for l in 0..d {
                                    let coef = f.mul(ci.get(i, j), c.get(l, k));
                                    if coef == 0 {
                                        continue;
                                    }
                                    for (t, x) in m[j][l].iter().enumerate() {
                                        e[t] = f.add(&e[t], &f.mul(&coef, x));
                                    }
                                }
                            }
                            e
                        })
                        .collect()
                })
                .collect()
        };
        let residue = residue.map(|l| change.0.vec_mul(&l));
        IgusaCarrier::new(CarrierSpec {
            p,
            r,
            kind: CarrierKind::Synthetic,
            grades,
            frob: conj(&frob),
            tame: conj(&tame),
            residue,
            designated_rank: Some(ordinary),
        })
    }

    /// Level-one carrier from cusp forms of weights 3..p+1: V = ⊕_k S_k(Γ₁(N)) realized as
    /// star +1 modular symbols mod p, F_* = T_p, ⟨p⟩_N the diamond operator, grade k − 2.
    pub fn from_modular(p: u64, level: u64) -> Result<Self> {
        if !is_prime(p) || p == 2 || level % p == 0 {
            return Err(Error::Precondition(format!("need an odd prime p ∤ N, got p={p}, N={level}")));
        }
        let f = PrimeField::new(p)?;
        let mut grades = Vec::new();
        let mut blocks: Vec<(Matrix<PrimeField>, Matrix<PrimeField>)> = Vec::new();
        for k in 3..=(p as u32 + 1) {
            let space = ModularSymbolSpace::build(level, k)?;
            if space.cuspidal_dim() == 0 {
                continue;
            }
            let star = space.hecke_matrix(&HeckeLabel::Star)?.matrix;
            let t = space.hecke_matrix(&HeckeLabel::T(p))?.matrix;
            let dia = space.hecke_matrix(&HeckeLabel::Diamond(p % level))?.matrix;
            let nq = star.rows();
            let shifted = star.sub(&Matrix::identity(&Rationals, nq));
            let (basis, free) = kernel_with_free(&shifted);
            let restrict = |m: &Matrix<Rationals>| -> Result<Matrix<PrimeField>> {
                let mut data = vec![0; basis.len() * basis.len()];
                for (j, b) in basis.iter().enumerate() {
                    let img = m.mul_vec(b);
                    for (i, c) in free.iter().enumerate() {
                        data[i * basis.len() + j] = rational_mod(&img[*c], p)
                            .ok_or_else(|| Error::Unsupported(format!("weight {k} Hecke matrix is not {p}-integral on the plus part")))?;
                    }
                }
                Matrix::new(f, basis.len(), basis.len(), data)
            };
            let (tm, dm) = (restrict(&t)?, restrict(&dia)?);
            grades.extend(std::iter::repeat((k as usize - 2) % (p as usize - 1)).take(tm.rows()));
            blocks.push((tm, dm));
        }
        let d = grades.len();
        let mut frob: GroupRingMatrix = vec![vec![vec![0]; d]; d];
        let mut tame = frob.clone();
        let mut off = 0;
        for (tm, dm) in &blocks {
            for i in 0..tm.rows() {
                for j in 0..tm.rows() {
                    frob[off + i][off + j] = vec![*tm.get(i, j)];
                    tame[off + i][off + j] = vec![*dm.get(i, j)];
                }
            }
            off += tm.rows();
        }
        let carrier = IgusaCarrier::new(CarrierSpec { p, r: 1, kind: CarrierKind::Modular, grades, frob, tame, residue: None, designated_rank: None })?;
        let rank = carrier.ordinary_basis(1).len();
        let mut spec = carrier.spec.clone();
        spec.designated_rank = Some(rank);
        IgusaCarrier::new(spec)
    }

    /// Group-ring rank of the F_*-ordinary part at the top level, if it is a multiple of the group order.
    pub fn ordinary_rank(&self) -> Option<usize> {
        let s = self.spec.r;
        let (dim, n) = (self.ordinary_basis(s).len(), self.group_order(s));
        (dim % n == 0).then_some(dim / n)
    }

    pub fn unit_modulus(&self, e: u32) -> u64 {
        self.spec.p.pow(e)
    }

    pub fn reduce(&self, u: u64, e: u32) -> u64 {
        reduce_unit(u, self.unit_modulus(e))
    }
}
