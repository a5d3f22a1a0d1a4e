use igusa_core::algebra::{FiniteField, PrimeField, Ring};
use igusa_core::curves::cartier::check_local_global;
use igusa_core::curves::{
    cartier_apply, hasse_witt, nakajima_check, pole_improvement_check, residue_at, CurveKind, CurveModel,
    DifferentialSpace, DivisorData, MeroDifferential, NakajimaReport, Place,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::CurveSpec;
use crate::error::Result;
use crate::report::SuiteResult;

pub const SUITE: &str = "cartier";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CartierDetails {
    pub p: u64,
    pub genus: usize,
    pub gamma: usize,
    pub expected_gamma: Option<usize>,
    pub support: usize,
    pub space_dim: usize,
    pub samples: usize,
    pub local_global_agree: bool,
    /// res(Vω)^p = res(ω) at every support place.
    pub residue_identity: bool,
    /// Residues of ω and Vω over the support sum to zero.
    pub residue_theorem: bool,
    pub pole_improvement: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nakajima: Option<NakajimaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nakajima_gamma_matches: Option<bool>,
}

/// Rational places where the sampled differentials may have poles.
fn support(c: &CurveModel<PrimeField>) -> Vec<Place<u64>> {
    match c.kind() {
        CurveKind::ArtinSchreier { .. } => c.branch_places(),
        CurveKind::ProjectiveLine => vec![Place::Affine { x: 0, y: None }, Place::Infinity { y: None }],
        CurveKind::Hyperelliptic { .. } => vec![Place::Infinity { y: None }],
    }
}

fn residue_total(c: &CurveModel<PrimeField>, w: &MeroDifferential<PrimeField>, places: &[Place<u64>]) -> Result<u64> {
    let f = c.field();
    let mut total = f.zero();
    for pl in places {
        total = f.add(&total, &residue_at(c, w, pl)?);
    }
    Ok(total)
}

pub fn check_curve(spec: &CurveSpec, samples: usize, seed: u64) -> Result<CartierDetails> {
    let c = spec.build()?;
    let f = *c.field();
    let p = c.p();
    let gamma = hasse_witt(&c)?.gamma;
    let places = support(&c);
    let reduced = DivisorData::reduced(&places);
    let space = DifferentialSpace::new(&c, &reduced.multiple(2))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut local_global_agree, mut residue_identity, mut residue_theorem) = (true, true, true);
    for _ in 0..samples {
        let coords: Vec<u64> = (0..space.dim()).map(|_| f.random(&mut rng)).collect();
        let w = space.from_coords(&coords);
        let vw = cartier_apply(&c, &w);
        for pl in &places {
            local_global_agree &= check_local_global(&c, &w, pl, 3)?.agrees;
            let (r, rv) = (residue_at(&c, &w, pl)?, residue_at(&c, &vw, pl)?);
            residue_identity &= f.frob(&rv, 1) == r;
        }
        residue_theorem &= residue_total(&c, &w, &places)? == 0 && residue_total(&c, &vw, &places)? == 0;
    }
    let mut pole_improvement = true;
    if !places.is_empty() {
        for n in [1, 2, p as i64, p as i64 + 1] {
            pole_improvement &= pole_improvement_check(&c, &reduced, n)?;
        }
    }
    let (nakajima, nakajima_gamma_matches) = match c.kind() {
        CurveKind::ArtinSchreier { .. } => {
            let rep = nakajima_check(&c, &[1, p as i64])?;
            let s = c.branch_places().len() as u64;
            let matches = rep.gamma_cover as u64 == (s - 1) * (p - 1);
            (Some(rep), Some(matches))
        }
        _ => (None, None),
    };
    Ok(CartierDetails {
        p,
        genus: c.genus(),
        gamma,
        expected_gamma: spec.expected_gamma(),
        support: places.len(),
        space_dim: space.dim(),
        samples,
        local_global_agree,
        residue_identity,
        residue_theorem,
        pole_improvement,
        nakajima,
        nakajima_gamma_matches,
    })
}

impl CartierDetails {
    pub fn passed(&self) -> bool {
        let nakajima_ok = self.nakajima.as_ref().map_or(true, |n| {
            n.free
                && n.rank.map(|r| r as i64) == Some(n.expected_rank)
                && n.independent_of_n
                && n.ordinary_dim as i64 == n.expected_rank * n.p as i64
        });
        self.expected_gamma.map_or(true, |g| g == self.gamma)
            && self.local_global_agree
            && self.residue_identity
            && self.residue_theorem
            && self.pole_improvement
            && nakajima_ok
            && self.nakajima_gamma_matches != Some(false)
    }
}

pub fn run_curve(spec: &CurveSpec, samples: usize, seed: u64) -> SuiteResult {
    match check_curve(spec, samples, seed) {
        Ok(d) => SuiteResult::ok(SUITE, spec.label(), d.passed(), &d),
        Err(e) => SuiteResult::failed(SUITE, spec.label(), e),
    }
}
