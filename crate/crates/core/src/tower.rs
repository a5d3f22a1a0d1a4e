//! Modules over F[Δ₁/Δ_r] ≅ F[Z/p^{r−1}], truncated towers of them, and group-ring valued pairings.
//!
//! Base rings are the same field at every level.

use serde::Serialize;

use crate::algebra::linalg::{inverse, kernel, rank, span_basis};
use crate::algebra::matrix::{dot, vec_add};
use crate::algebra::{Field, FiniteField, Matrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicPLevel {
    pub p: u64,
    pub r: u32,
}

impl CyclicPLevel {
    pub fn new(p: u64, r: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::Invalid("level must be at least 1".into()));
        }
        if !crate::algebra::arith::is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        Ok(CyclicPLevel { p, r })
    }

    pub fn order(&self) -> usize {
        self.p.pow(self.r - 1) as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupRingModule<F: Field> {
    level: CyclicPLevel,
    gamma: Matrix<F>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Freeness {
    pub free: bool,
    pub rank: Option<usize>,
    pub kernel_dims: Vec<usize>,
}

/// Cyclic shift e_i ↦ e_{i+1 mod n}.
pub fn shift_matrix<F: Field>(f: &F, n: usize) -> Matrix<F> {
    Matrix::from_fn(f, n, n, |i, j| if i == (j + 1) % n { f.one() } else { f.zero() })
}

/// Multiplication by Σ a_j γ^j on the regular module.
pub fn group_ring_mult<F: Field>(f: &F, a: &[F::Elem]) -> Matrix<F> {
    let n = a.len();
    Matrix::from_fn(f, n, n, |i, j| a[(i + n - j) % n].clone())
}

/// Image of a group ring element under F[Z/n] → F[Z/m], m | n.
pub fn fold_group_ring<F: Field>(f: &F, a: &[F::Elem], m: usize) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); m];
    for (j, c) in a.iter().enumerate() {
        out[j % m] = f.add(&out[j % m], c);
    }
    out
}

impl<F: Field> GroupRingModule<F> {
    pub fn new(level: CyclicPLevel, gamma: Matrix<F>) -> Result<Self> {
        if !gamma.is_square() {
            return Err(Error::Dimension("group action must be square".into()));
        }
        if !gamma.pow(level.order() as u64).is_identity() {
            return Err(Error::Invalid(format!("γ^{} is not the identity", level.order())));
        }
        Ok(GroupRingModule { level, gamma })
    }

    pub fn regular(f: &F, level: CyclicPLevel, d: usize) -> Self {
        let s = shift_matrix(f, level.order());
        let mut g = Matrix::zeros(f, 0, 0);
        for _ in 0..d {
            g = g.direct_sum(&s);
        }
        GroupRingModule { level, gamma: g }
    }

    pub fn field(&self) -> &F {
        self.gamma.ring()
    }

    pub fn level(&self) -> CyclicPLevel {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.gamma.rows()
    }

    pub fn gamma(&self) -> &Matrix<F> {
        &self.gamma
    }

    pub fn gamma_pow(&self, j: usize) -> Matrix<F> {
        let n = self.level.order();
        self.gamma.pow((j % n) as u64)
    }

    /// Free of rank d iff dim ker (γ−1)^i = d·i for 0 ≤ i ≤ |G|.
    pub fn is_free_of_rank(&self) -> Result<Freeness> {
        let f = self.field();
        if f.characteristic() != self.level.p {
            return Err(Error::Unsupported("freeness test needs a base field of characteristic p".into()));
        }
        let n = self.level.order();
        let dim = self.dim();
        let nil = self.gamma.sub(&Matrix::identity(f, dim));
        let mut pw = Matrix::identity(f, dim);
        let mut kernel_dims = vec![0];
        for _ in 0..n {
            pw = pw.mul(&nil);
            kernel_dims.push(dim - rank(&pw));
        }
        let free = dim % n == 0 && kernel_dims.iter().enumerate().all(|(i, k)| *k == (dim / n) * i);
        Ok(Freeness { free, rank: free.then_some(dim / n), kernel_dims })
    }

    /// Dimension of M/(γ−1)M, the reduction modulo the maximal ideal.
    pub fn cotangent_dim(&self) -> usize {
        let f = self.field();
        self.dim() - rank(&self.gamma.sub(&Matrix::identity(f, self.dim())))
    }

    /// Vectors whose images span M/(γ−1)M.
    pub fn minimal_generators(&self) -> Vec<Vec<F::Elem>> {
        let f = self.field();
        let dim = self.dim();
        let aug = span_basis(f, dim, &self.gamma.sub(&Matrix::identity(f, dim)).columns());
        let mut gens = Vec::new();
        let mut acc = aug.clone();
        for i in 0..dim {
            let mut e = vec![f.zero(); dim];
            e[i] = f.one();
            let mut trial = acc.clone();
            trial.push(e.clone());
            if span_basis(f, dim, &trial).len() == trial.len() {
                acc.push(e.clone());
                gens.push(e);
            }
        }
        gens
    }

    /// The vectors γ^j b_i, ordered block by block.
    pub fn orbit_basis(&self, gens: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
        let mut out = Vec::new();
        for g in gens {
            let mut v = g.clone();
            for _ in 0..self.level.order() {
                out.push(v.clone());
                v = self.gamma.mul_vec(&v);
            }
        }
        out
    }
}

/// Levels 1..r_max with maps ρ_{r+1,r}: M_{r+1} → M_r.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedTower<F: Field> {
    modules: Vec<GroupRingModule<F>>,
    transitions: Vec<Matrix<F>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hypothesis {
    Equivariance,
    Freeness,
    Surjectivity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub level: u32,
    pub free: bool,
    pub rank: Option<usize>,
    pub equivariant: Option<bool>,
    pub surjective: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerReport {
    pub levels: Vec<LevelReport>,
    pub common_rank: Option<usize>,
    pub holds: bool,
    pub first_failure: Option<(u32, Hypothesis)>,
    pub synthetic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ControlResult<E> {
    pub r: u32,
    pub s: u32,
    pub holds: bool,
    pub cokernel_dim: usize,
    pub kernel_excess: usize,
    pub witness: Vec<Vec<E>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedLimit<F: Field> {
    pub module: GroupRingModule<F>,
    pub basis: Vec<Vec<F::Elem>>,
    pub level_bases: Vec<Vec<Vec<F::Elem>>>,
}

impl<F: Field> TruncatedTower<F> {
    pub fn new(modules: Vec<GroupRingModule<F>>, transitions: Vec<Matrix<F>>) -> Result<Self> {
        if modules.is_empty() {
            return Err(Error::Invalid("tower needs at least one level".into()));
        }
        if transitions.len() + 1 != modules.len() {
            return Err(Error::Invalid("need one transition per consecutive pair of levels".into()));
        }
        let p = modules[0].level.p;
        for (i, m) in modules.iter().enumerate() {
            if m.level != CyclicPLevel::new(p, i as u32 + 1)? {
                return Err(Error::Invalid(format!("module {} sits at the wrong level", i + 1)));
            }
        }
        for (i, t) in transitions.iter().enumerate() {
            if t.rows() != modules[i].dim() || t.cols() != modules[i + 1].dim() {
                return Err(Error::Dimension(format!("transition {}→{} has the wrong shape", i + 2, i + 1)));
            }
        }
        Ok(TruncatedTower { modules, transitions })
    }

    pub fn r_max(&self) -> u32 {
        self.modules.len() as u32
    }

    pub fn p(&self) -> u64 {
        self.modules[0].level.p
    }

    pub fn field(&self) -> &F {
        self.modules[0].field()
    }

    pub fn module(&self, r: u32) -> &GroupRingModule<F> {
        &self.modules[r as usize - 1]
    }

    pub fn modules(&self) -> &[GroupRingModule<F>] {
        &self.modules
    }

    pub fn transitions(&self) -> &[Matrix<F>] {
        &self.transitions
    }

    /// ρ_{r,s} as a composite of consecutive transitions.
    pub fn rho(&self, r: u32, s: u32) -> Matrix<F> {
        assert!(1 <= s && s <= r && r <= self.r_max());
        let mut m = Matrix::identity(self.field(), self.module(r).dim());
        for k in (s..r).rev() {
            m = self.transitions[k as usize - 1].mul(&m);
        }
        m
    }

    /// `ideal_exponents[r−1] = k` stands for I_r = p^k A_r, which is zero in characteristic p once k ≥ 1.
    pub fn check_hypotheses(&self, ideal_exponents: &[u32]) -> Result<TowerReport> {
        if ideal_exponents.len() != self.modules.len() {
            return Err(Error::Invalid("one ideal per level is required".into()));
        }
        if ideal_exponents.contains(&0) {
            return Err(Error::Invalid("ideals must be proper".into()));
        }
        if ideal_exponents.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Invalid("ideal chain is not mapped into itself".into()));
        }
        let mut levels = Vec::new();
        let mut common_rank: Option<usize> = None;
        for (i, m) in self.modules.iter().enumerate() {
            let fr = m.is_free_of_rank()?;
            let mut free = fr.free;
            if free {
                match common_rank {
                    None => common_rank = fr.rank,
                    Some(d) => free = fr.rank == Some(d),
                }
            }
            let (equivariant, surjective) = match self.transitions.get(i) {
                Some(t) => (
                    Some(t.mul(self.modules[i + 1].gamma()) == m.gamma().mul(t)),
                    Some(rank(t) == m.dim()),
                ),
                None => (None, None),
            };
            levels.push(LevelReport { level: i as u32 + 1, free, rank: fr.rank, equivariant, surjective });
        }
        // A transition r+1 → r is charged to level r+1.
        let mut failures: Vec<(u32, Hypothesis)> = Vec::new();
        for lr in &levels {
            if lr.equivariant == Some(false) {
                failures.push((lr.level + 1, Hypothesis::Equivariance));
            }
            if !lr.free {
                failures.push((lr.level, Hypothesis::Freeness));
            }
            if lr.surjective == Some(false) {
                failures.push((lr.level + 1, Hypothesis::Surjectivity));
            }
        }
        let first_failure = failures.into_iter().min_by_key(|(l, h)| (*l, *h as u8));
        Ok(TowerReport {
            holds: first_failure.is_none(),
            levels,
            common_rank: if first_failure.is_none() { common_rank } else { None },
            first_failure,
            synthetic: true,
        })
    }

    /// Induced map M_r/(γ^{|G_s|}−1)M_r → M_s without checking hypotheses first.
    pub fn control_map(&self, r: u32, s: u32) -> Result<ControlResult<F::Elem>> {
        if s == 0 || s > r || r > self.r_max() {
            return Err(Error::Invalid(format!("levels ({r}, {s}) out of range")));
        }
        let f = self.field();
        let mr = self.module(r);
        let ms = self.module(s);
        let rho = self.rho(r, s);
        let dim = mr.dim();
        let kgen = mr.gamma_pow(ms.level.order()).sub(&Matrix::identity(f, dim));
        let k = span_basis(f, dim, &kgen.columns());
        let kills = k.iter().all(|v| rho.mul_vec(v).iter().all(|x| f.is_zero(x)));
        let mut acc = k.clone();
        let mut complement = Vec::new();
        for i in 0..dim {
            let mut e = vec![f.zero(); dim];
            e[i] = f.one();
            let mut trial = acc.clone();
            trial.push(e.clone());
            if span_basis(f, dim, &trial).len() == trial.len() {
                acc.push(e.clone());
                complement.push(e);
            }
        }
        let witness: Vec<Vec<F::Elem>> = complement.iter().map(|v| rho.mul_vec(v)).collect();
        let rk = rank(&rho);
        let cokernel_dim = ms.dim() - rk;
        let kernel_excess = if kills { (dim - k.len()) - rk } else { dim - k.len() };
        let holds = kills && cokernel_dim == 0 && complement.len() == ms.dim() && kernel_excess == 0;
        Ok(ControlResult { r, s, holds, cokernel_dim, kernel_excess, witness })
    }

    pub fn control_isomorphism(&self, r: u32, s: u32) -> Result<ControlResult<F::Elem>> {
        let rep = self.check_hypotheses(&vec![1; self.modules.len()])?;
        if !rep.holds {
            return Err(Error::Precondition(format!("tower hypotheses fail: {:?}", rep.first_failure)));
        }
        self.control_map(r, s)
    }

    /// A group ring basis at the top level whose images give group ring bases at every level.
    pub fn truncated_limit(&self) -> Result<TruncatedLimit<F>> {
        let rep = self.check_hypotheses(&vec![1; self.modules.len()])?;
        if !rep.holds {
            return Err(Error::Precondition(format!("tower hypotheses fail: {:?}", rep.first_failure)));
        }
        let f = self.field();
        let top = self.module(self.r_max()).clone();
        let basis = top.minimal_generators();
        let mut level_bases = Vec::new();
        for s in 1..=self.r_max() {
            let rho = self.rho(self.r_max(), s);
            let imgs: Vec<Vec<F::Elem>> = basis.iter().map(|v| rho.mul_vec(v)).collect();
            let ms = self.module(s);
            let orbit = ms.orbit_basis(&imgs);
            if orbit.len() != ms.dim() || span_basis(f, ms.dim(), &orbit).len() != ms.dim() {
                return Err(Error::Consistency(format!("images of the top basis do not freely generate level {s}")));
            }
            if !self.control_map(self.r_max(), s)?.holds {
                return Err(Error::Consistency(format!("specialization to level {s} is not an isomorphism")));
            }
            level_bases.push(imgs);
        }
        Ok(TruncatedLimit { module: top, basis, level_bases })
    }
}

/// Per-level forms ⟨m, m'⟩_r = mᵀ P_r m' between two towers.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingFamily<F: Field> {
    pub forms: Vec<Matrix<F>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingViolation {
    pub r: u32,
    pub s: u32,
    pub m: usize,
    pub m_prime: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaPairing<F: Field> {
    /// Gram matrices over F[G_r], entries are coefficient vectors in the powers of γ.
    pub grams: Vec<Vec<Vec<Vec<F::Elem>>>>,
    pub perfect: Vec<bool>,
    pub bilinear: Vec<bool>,
    pub specializes: Vec<bool>,
}

/// (m, m')_r = Σ_δ ⟨m, δ^{-1} m'⟩_r δ as coefficients of γ^0, …, γ^{n−1}.
pub fn lambda_value<F: Field>(
    form: &Matrix<F>,
    gamma_prime: &Matrix<F>,
    order: usize,
    m: &[F::Elem],
    mp: &[F::Elem],
) -> Vec<F::Elem> {
    let f = form.ring();
    let ginv = gamma_prime.pow(order as u64 - 1);
    let mut v = mp.to_vec();
    let mut out = Vec::with_capacity(order);
    for _ in 0..order {
        out.push(dot(f, m, &form.mul_vec(&v)));
        v = ginv.mul_vec(&v);
    }
    out
}

fn group_ring_mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    group_ring_mult(f, a).mul_vec(b)
}

fn unit_vectors<F: Field>(f: &F, n: usize) -> Vec<Vec<F::Elem>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { f.one() } else { f.zero() }).collect())
        .collect()
}

pub fn verify_pairing_compat<F: Field>(
    pf: &PairingFamily<F>,
    t: &TruncatedTower<F>,
    tp: &TruncatedTower<F>,
) -> Result<Option<PairingViolation>> {
    check_family_shape(pf, t, tp)?;
    let f = t.field();
    for r in 1..=t.r_max() {
        for s in 1..r {
            let rho = t.rho(r, s);
            let rhop = tp.rho(r, s);
            let step = t.module(s).level.order();
            let count = t.module(r).level.order() / step;
            let gstep = tp.module(r).gamma_pow(step);
            let ginv = gstep.pow(count as u64 - 1);
            let form_r = &pf.forms[r as usize - 1];
            let form_s = &pf.forms[s as usize - 1];
            let ubasis = unit_vectors(f, t.module(r).dim());
            let ubasis_p = unit_vectors(f, tp.module(r).dim());
            for (i, m) in ubasis.iter().enumerate() {
                for (k, mp) in ubasis_p.iter().enumerate() {
                    let lhs = dot(f, &rho.mul_vec(m), &form_s.mul_vec(&rhop.mul_vec(mp)));
                    let mut rhs = f.zero();
                    let mut v = mp.clone();
                    for _ in 0..count {
                        rhs = f.add(&rhs, &dot(f, m, &form_r.mul_vec(&v)));
                        v = ginv.mul_vec(&v);
                    }
                    if lhs != rhs {
                        return Ok(Some(PairingViolation { r, s, m: i, m_prime: k }));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn check_family_shape<F: Field>(pf: &PairingFamily<F>, t: &TruncatedTower<F>, tp: &TruncatedTower<F>) -> Result<()> {
    if t.r_max() != tp.r_max() || pf.forms.len() != t.modules.len() {
        return Err(Error::Invalid("towers and pairing family have different heights".into()));
    }
    for (i, form) in pf.forms.iter().enumerate() {
        if form.rows() != t.modules[i].dim() || form.cols() != tp.modules[i].dim() {
            return Err(Error::Dimension(format!("form at level {} has the wrong shape", i + 1)));
        }
    }
    Ok(())
}

/// Builds (·,·)_r on the truncated-limit bases of both towers and checks perfectness, bilinearity and specialization.
pub fn build_lambda_pairing<F: Field>(
    t: &TruncatedTower<F>,
    tp: &TruncatedTower<F>,
    pf: &PairingFamily<F>,
) -> std::result::Result<LambdaPairing<F>, PairingError> {
    check_family_shape(pf, t, tp).map_err(PairingError::Malformed)?;
    for (i, form) in pf.forms.iter().enumerate() {
        let (g, gp) = (t.modules[i].gamma(), tp.modules[i].gamma());
        if g.transpose().mul(form) != form.mul(gp) {
            return Err(PairingError::NotSelfAdjoint(i as u32 + 1));
        }
    }
    if let Some(v) = verify_pairing_compat(pf, t, tp).map_err(PairingError::Malformed)? {
        return Err(PairingError::Incompatible(v));
    }
    let lim = t.truncated_limit().map_err(PairingError::Malformed)?;
    let limp = tp.truncated_limit().map_err(PairingError::Malformed)?;
    let f = t.field();
    let mut grams = Vec::new();
    let mut perfect = Vec::new();
    let mut bilinear = Vec::new();
    let mut specializes = Vec::new();
    for r in 1..=t.r_max() {
        let idx = r as usize - 1;
        let (m, mp) = (t.module(r), tp.module(r));
        let n = m.level.order();
        let form = &pf.forms[idx];
        let bs = &lim.level_bases[idx];
        let bps = &limp.level_bases[idx];
        let gram: Vec<Vec<Vec<F::Elem>>> = bs
            .iter()
            .map(|b| bps.iter().map(|bp| lambda_value(form, mp.gamma(), n, b, bp)).collect())
            .collect();
        let reduced = Matrix::from_fn(f, bs.len(), bps.len(), |i, k| {
            gram[i][k].iter().fold(f.zero(), |acc, c| f.add(&acc, c))
        });
        perfect.push(reduced.is_square() && inverse(&reduced).is_some());
        let mut gamma_elem = vec![f.zero(); n];
        gamma_elem[1 % n] = f.one();
        let mut bil = true;
        for b in bs {
            for bp in bps {
                let base = lambda_value(form, mp.gamma(), n, b, bp);
                let shifted = group_ring_mul(f, &gamma_elem, &base);
                bil &= lambda_value(form, mp.gamma(), n, &m.gamma().mul_vec(b), bp) == shifted;
                bil &= lambda_value(form, mp.gamma(), n, b, &mp.gamma().mul_vec(bp)) == shifted;
                let sum = vec_add(f, b, &m.gamma().mul_vec(b));
                let lin = vec_add(f, &base, &lambda_value(form, mp.gamma(), n, &m.gamma().mul_vec(b), bp));
                bil &= lambda_value(form, mp.gamma(), n, &sum, bp) == lin;
            }
        }
        bilinear.push(bil);
        let mut spec = true;
        for s in 1..=r {
            let ns = t.module(s).level.order();
            let (rho, rhop) = (t.rho(r, s), tp.rho(r, s));
            for b in bs {
                for bp in bps {
                    let folded = fold_group_ring(f, &lambda_value(form, mp.gamma(), n, b, bp), ns);
                    let low = lambda_value(
                        &pf.forms[s as usize - 1],
                        tp.module(s).gamma(),
                        ns,
                        &rho.mul_vec(b),
                        &rhop.mul_vec(bp),
                    );
                    spec &= folded == low;
                }
            }
        }
        specializes.push(spec);
        grams.push(gram);
    }
    Ok(LambdaPairing { grams, perfect, bilinear, specializes })
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PairingError {
    #[error("group action is not self-adjoint at level {0}")]
    NotSelfAdjoint(u32),
    #[error("compatibility fails at levels ({}, {}) on basis pair ({}, {})", .0.r, .0.s, .0.m, .0.m_prime)]
    Incompatible(PairingViolation),
    #[error(transparent)]
    Malformed(Error),
}

/// The pairing ⟨g, h⟩ = [gh = 1] on the regular module.
pub fn trace_form<F: Field>(f: &F, level: CyclicPLevel, d: usize) -> Matrix<F> {
    let n = level.order();
    let block = Matrix::from_fn(f, n, n, |i, j| if (i + j) % n == 0 { f.one() } else { f.zero() });
    let mut out = Matrix::zeros(f, 0, 0);
    for _ in 0..d {
        out = out.direct_sum(&block);
    }
    out
}

pub fn regular_tower<F: Field>(f: &F, p: u64, r_max: u32, d: usize) -> Result<TruncatedTower<F>> {
    let mut modules = Vec::new();
    for r in 1..=r_max {
        modules.push(GroupRingModule::regular(f, CyclicPLevel::new(p, r)?, d));
    }
    let transitions = (1..r_max as usize)
        .map(|i| {
            let (lo, hi) = (modules[i - 1].level.order(), modules[i].level.order());
            projection(f, lo, hi, d)
        })
        .collect();
    TruncatedTower::new(modules, transitions)
}

/// F[Z/hi]^d → F[Z/lo]^d reducing exponents mod lo.
fn projection<F: Field>(f: &F, lo: usize, hi: usize, d: usize) -> Matrix<F> {
    Matrix::from_fn(f, lo * d, hi * d, |i, j| {
        if i / lo == j / hi && i % lo == (j % hi) % lo {
            f.one()
        } else {
            f.zero()
        }
    })
}

fn random_invertible<F: FiniteField, G: rand::Rng>(f: &F, n: usize, rng: &mut G) -> (Matrix<F>, Matrix<F>) {
    loop {
        let c = Matrix::from_fn(f, n, n, |_, _| f.random(rng));
        if let Some(ci) = inverse(&c) {
            return (c, ci);
        }
    }
}

/// Conjugates the modules of `base` by `changes` and twists each transition by a group ring automorphism.
fn twisted_tower<F: Field>(
    base: &TruncatedTower<F>,
    changes: &[(Matrix<F>, Matrix<F>)],
    autos: &[Matrix<F>],
) -> Result<TruncatedTower<F>> {
    let modules = base
        .modules()
        .iter()
        .zip(changes)
        .map(|(m, (c, ci))| GroupRingModule::new(m.level, ci.mul(m.gamma()).mul(c)))
        .collect::<Result<Vec<_>>>()?;
    let transitions = base
        .transitions()
        .iter()
        .enumerate()
        .map(|(i, t)| changes[i].1.mul(&autos[i]).mul(t).mul(&changes[i + 1].0))
        .collect();
    TruncatedTower::new(modules, transitions)
}

/// Random free tower: regular modules twisted by group ring automorphisms and a random change of F-basis per level.
pub fn random_free_tower<F: FiniteField, G: rand::Rng>(
    f: &F,
    p: u64,
    r_max: u32,
    d: usize,
    rng: &mut G,
) -> Result<TruncatedTower<F>> {
    let base = regular_tower(f, p, r_max, d)?;
    let changes: Vec<_> = base.modules().iter().map(|m| random_invertible(f, m.dim(), rng)).collect();
    let autos: Vec<_> = (0..base.transitions().len())
        .map(|i| random_group_ring_automorphism(f, base.modules()[i].level.order(), d, rng))
        .collect();
    twisted_tower(&base, &changes, &autos)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairedTowers<F: Field> {
    pub left: TruncatedTower<F>,
    pub right: TruncatedTower<F>,
    pub pairing: PairingFamily<F>,
}

/// Two random free towers with a compatible family: forms C_rᵀ B_r C'_r over the trace forms B_r,
/// with the right automorphisms A' = B⁻¹ A⁻ᵀ B.
pub fn random_paired_towers<F: FiniteField, G: rand::Rng>(
    f: &F,
    p: u64,
    r_max: u32,
    d: usize,
    rng: &mut G,
) -> Result<PairedTowers<F>> {
    let base = regular_tower(f, p, r_max, d)?;
    let traces: Vec<_> = base.modules().iter().map(|m| trace_form(f, m.level, d)).collect();
    let left_changes: Vec<_> = base.modules().iter().map(|m| random_invertible(f, m.dim(), rng)).collect();
    let right_changes: Vec<_> = base.modules().iter().map(|m| random_invertible(f, m.dim(), rng)).collect();
    let mut left_autos = Vec::new();
    let mut right_autos = Vec::new();
    for i in 0..base.transitions().len() {
        let a = random_group_ring_automorphism(f, base.modules()[i].level.order(), d, rng);
        let b = &traces[i];
        let (ai, bi) = (inverse(&a).unwrap(), inverse(b).unwrap());
        right_autos.push(bi.mul(&ai.transpose()).mul(b));
        left_autos.push(a);
    }
    let forms = (0..traces.len())
        .map(|i| left_changes[i].0.transpose().mul(&traces[i]).mul(&right_changes[i].0))
        .collect();
    Ok(PairedTowers {
        left: twisted_tower(&base, &left_changes, &left_autos)?,
        right: twisted_tower(&base, &right_changes, &right_autos)?,
        pairing: PairingFamily { forms },
    })
}

/// Deliberately broken copies of a hypothesis-compliant tower, each failing first at `level`.
pub fn break_tower<F: FiniteField>(t: &TruncatedTower<F>, level: u32, kind: Hypothesis) -> Result<TruncatedTower<F>> {
    if level == 0 || level > t.r_max() {
        return Err(Error::Invalid(format!("level {level} out of range")));
    }
    let f = t.field();
    let k = level as usize - 1;
    let mut modules = t.modules().to_vec();
    let mut trs = t.transitions().to_vec();
    match kind {
        Hypothesis::Surjectivity | Hypothesis::Equivariance if level == 1 => {
            return Err(Error::Invalid("transitions start at level 2".into()));
        }
        Hypothesis::Freeness if level == 1 => {
            return Err(Error::Invalid("every module over the trivial group is free".into()));
        }
        Hypothesis::Surjectivity => {
            let nil = t.module(level - 1).gamma().sub(&Matrix::identity(f, t.module(level - 1).dim()));
            trs[k - 1] = nil.mul(&trs[k - 1]);
        }
        Hypothesis::Equivariance => {
            let n = t.module(level).dim();
            let lo = t.module(level - 1);
            let found = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).find_map(|(i, j)| {
                let mut e = Matrix::identity(f, n);
                e.set(i, j, f.one());
                let cand = trs[k - 1].mul(&e);
                (cand.mul(t.module(level).gamma()) != lo.gamma().mul(&cand)).then_some(cand)
            });
            trs[k - 1] = found.ok_or_else(|| Error::Precondition("every elementary twist is equivariant".into()))?;
        }
        Hypothesis::Freeness => {
            let m = &modules[k];
            let n = m.dim();
            modules[k] = GroupRingModule::new(m.level, m.gamma().direct_sum(&Matrix::identity(f, 1)))?;
            if k > 0 {
                trs[k - 1] = trs[k - 1].hstack(&Matrix::zeros(f, trs[k - 1].rows(), 1));
            }
            if k < trs.len() {
                trs[k] = trs[k].vstack(&Matrix::zeros(f, 1, trs[k].cols()));
            }
            debug_assert_eq!(modules[k].dim(), n + 1);
        }
    }
    TruncatedTower::new(modules, trs)
}

/// A d×d matrix over F[Z/n] with invertible augmentation, acting on F[Z/n]^d.
pub fn random_group_ring_automorphism<F: FiniteField, G: rand::Rng>(f: &F, n: usize, d: usize, rng: &mut G) -> Matrix<F> {
    loop {
        let entries: Vec<Vec<Vec<F::Elem>>> =
            (0..d).map(|_| (0..d).map(|_| (0..n).map(|_| f.random(rng)).collect()).collect()).collect();
        let aug = Matrix::from_fn(f, d, d, |i, k| entries[i][k].iter().fold(f.zero(), |a, c| f.add(&a, c)));
        if inverse(&aug).is_none() {
            continue;
        }
        let blocks: Vec<Vec<Matrix<F>>> =
            entries.iter().map(|row| row.iter().map(|e| group_ring_mult(f, e)).collect()).collect();
        return Matrix::from_fn(f, n * d, n * d, |i, j| blocks[i / n][j / n].get(i % n, j % n).clone());
    }
}

/// Kernel of M_r → M_s, spanned by (γ^{|G_s|}−1)M_r when control holds.
pub fn transition_kernel<F: Field>(t: &TruncatedTower<F>, r: u32, s: u32) -> Vec<Vec<F::Elem>> {
    kernel(&t.rho(r, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ExtField, PrimeField, Ring};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lvl(p: u64, r: u32) -> CyclicPLevel {
        CyclicPLevel::new(p, r).unwrap()
    }

    #[test]
    fn regular_modules_are_free() {
        for p in [2u64, 3, 5] {
            let f = PrimeField::new(p).unwrap();
            for r in 1..=3 {
                for d in 1..=4 {
                    if p.pow(r - 1) as usize * d > 100 {
                        continue;
                    }
                    let m = GroupRingModule::regular(&f, lvl(p, r), d);
                    let fr = m.is_free_of_rank().unwrap();
                    assert_eq!((fr.free, fr.rank), (true, Some(d)));
                    assert_eq!(m.cotangent_dim(), d);
                }
            }
        }
    }

    #[test]
    fn non_free_examples() {
        let f = PrimeField::new(3).unwrap();
        let triv = GroupRingModule::new(lvl(3, 2), Matrix::identity(&f, 1)).unwrap();
        assert!(!triv.is_free_of_rank().unwrap().free);
        let mixed = GroupRingModule::new(lvl(3, 2), shift_matrix(&f, 3).direct_sum(&Matrix::identity(&f, 1))).unwrap();
        let fr = mixed.is_free_of_rank().unwrap();
        assert!(!fr.free);
        assert_eq!(fr.kernel_dims, vec![0, 2, 3, 4]);
        assert!(GroupRingModule::new(lvl(3, 2), shift_matrix(&f, 2)).is_err());
        let q = crate::algebra::Rationals;
        let m = GroupRingModule::new(lvl(3, 1), Matrix::identity(&q, 2)).unwrap();
        assert!(matches!(m.is_free_of_rank(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn regular_tower_hypotheses_and_limit() {
        let f = PrimeField::new(3).unwrap();
        let t = regular_tower(&f, 3, 3, 1).unwrap();
        let rep = t.check_hypotheses(&[1, 1, 1]).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.common_rank, Some(1));
        let lim = t.truncated_limit().unwrap();
        assert_eq!(lim.basis.len(), 1);
        for s in 1..=3 {
            assert!(t.control_isomorphism(3, s).unwrap().holds);
        }
        assert!(t.check_hypotheses(&[1, 1]).is_err());
        assert!(t.check_hypotheses(&[1, 0, 1]).is_err());
        assert!(t.check_hypotheses(&[1, 1, 2]).is_err());
    }

    #[test]
    fn random_towers_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for p in [3u64, 5] {
            let f = PrimeField::new(p).unwrap();
            for d in 1..=3 {
                let r_max = if p == 5 { 2 } else { 3 };
                let t = random_free_tower(&f, p, r_max, d, &mut rng).unwrap();
                let rep = t.check_hypotheses(&vec![1; r_max as usize]).unwrap();
                assert!(rep.holds, "{rep:?}");
                assert_eq!(rep.common_rank, Some(d));
                for r in 1..=r_max {
                    for s in 1..=r {
                        assert!(t.control_isomorphism(r, s).unwrap().holds);
                    }
                }
                let lim = t.truncated_limit().unwrap();
                assert_eq!(lim.basis.len(), d);
            }
        }
    }

    #[test]
    fn broken_transition_is_caught() {
        let f = PrimeField::new(3).unwrap();
        let t = regular_tower(&f, 3, 3, 1).unwrap();
        let nil = t.module(2).gamma().sub(&Matrix::identity(&f, 3));
        let mut trs = t.transitions().to_vec();
        trs[1] = nil.mul(&trs[1]);
        let bad = TruncatedTower::new(t.modules().to_vec(), trs).unwrap();
        let rep = bad.check_hypotheses(&[1, 1, 1]).unwrap();
        assert_eq!(rep.first_failure, Some((3, Hypothesis::Surjectivity)));
        let c = bad.control_map(3, 2).unwrap();
        assert!(!c.holds);
        assert!(c.cokernel_dim > 0);
        assert!(bad.control_isomorphism(3, 2).is_err());
        assert!(bad.truncated_limit().is_err());
    }

    #[test]
    fn single_level_and_extension_field() {
        let f = ExtField::new(3, 2).unwrap();
        let t = regular_tower(&f, 3, 1, 2).unwrap();
        let lim = t.truncated_limit().unwrap();
        assert_eq!(lim.basis.len(), 2);
        assert!(t.control_isomorphism(1, 1).unwrap().holds);
    }

    #[test]
    fn trace_form_pairing() {
        let f = PrimeField::new(3).unwrap();
        let t = regular_tower(&f, 3, 3, 1).unwrap();
        let pf = PairingFamily { forms: (1..=3).map(|r| trace_form(&f, lvl(3, r), 1)).collect() };
        assert_eq!(verify_pairing_compat(&pf, &t, &t).unwrap(), None);
        let lp = build_lambda_pairing(&t, &t, &pf).unwrap();
        assert!(lp.perfect.iter().all(|x| *x));
        assert!(lp.bilinear.iter().all(|x| *x));
        assert!(lp.specializes.iter().all(|x| *x));
        assert_eq!(lp.grams[0][0][0], vec![1]);
        let mut bad = pf.clone();
        bad.forms[1] = bad.forms[1].scale(&2);
        match build_lambda_pairing(&t, &t, &bad) {
            Err(PairingError::Incompatible(v)) => assert!(v.r == 2 || v.s == 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trivial_group_pairing_is_the_form() {
        let f = PrimeField::new(5).unwrap();
        let t = regular_tower(&f, 5, 1, 2).unwrap();
        let form = Matrix::from_i64(&f, &[vec![1, 2], vec![3, 4]]);
        let pf = PairingFamily { forms: vec![form.clone()] };
        let lp = build_lambda_pairing(&t, &t, &pf).unwrap();
        let lim = t.truncated_limit().unwrap();
        for (i, b) in lim.basis.iter().enumerate() {
            for (k, bp) in lim.basis.iter().enumerate() {
                assert_eq!(lp.grams[0][i][k], vec![dot(&f, b, &form.mul_vec(bp))]);
            }
        }
        assert!(lp.perfect[0]);
        let _ = f.one();
    }

    #[test]
    fn paired_random_towers_are_compatible() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (p, r_max, d) in [(3u64, 3u32, 2usize), (5, 2, 2), (3, 2, 3)] {
            let f = PrimeField::new(p).unwrap();
            let pt = random_paired_towers(&f, p, r_max, d, &mut rng).unwrap();
            assert!(pt.left.check_hypotheses(&vec![1; r_max as usize]).unwrap().holds);
            assert!(pt.right.check_hypotheses(&vec![1; r_max as usize]).unwrap().holds);
            let lp = build_lambda_pairing(&pt.left, &pt.right, &pt.pairing).unwrap();
            assert!(lp.perfect.iter().chain(&lp.bilinear).chain(&lp.specializes).all(|x| *x));
        }
    }

    #[test]
    fn broken_fixtures_fail_at_their_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let f = PrimeField::new(3).unwrap();
        let t = random_free_tower(&f, 3, 3, 2, &mut rng).unwrap();
        for level in 1..=3 {
            for kind in [Hypothesis::Equivariance, Hypothesis::Freeness, Hypothesis::Surjectivity] {
                let Ok(bad) = break_tower(&t, level, kind) else {
                    assert_eq!(level, 1);
                    continue;
                };
                let rep = bad.check_hypotheses(&[1, 1, 1]).unwrap();
                assert_eq!(rep.first_failure, Some((level, kind)));
            }
        }
    }
}
