use igusa_core::algebra::PrimeField;
use igusa_core::tower::{
    break_tower, build_lambda_pairing, random_paired_towers, Hypothesis, PairingError, TruncatedTower,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::TowerSpec;
use crate::error::Result;
use crate::report::SuiteResult;

pub const SUITE: &str = "tower";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerRecord {
    pub hypotheses: bool,
    pub common_rank: Option<usize>,
    pub control: bool,
    pub limit_rank: usize,
    pub pairing_perfect: bool,
    pub pairing_bilinear: bool,
    pub pairing_specializes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureRecord {
    pub level: u32,
    pub broken: Hypothesis,
    pub first_failure: Option<(u32, Hypothesis)>,
    pub rejected_at_level: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerDetails {
    pub p: u64,
    pub r_max: u32,
    pub d: usize,
    pub towers: Vec<TowerRecord>,
    pub fixtures: Vec<FixtureRecord>,
    /// A rescaled form is reported as incompatible; only meaningful when r_max ≥ 2.
    pub incompatible_pairing_rejected: Option<bool>,
}

impl TowerDetails {
    pub fn passed(&self) -> bool {
        self.towers.iter().all(|t| {
            t.hypotheses
                && t.common_rank == Some(self.d)
                && t.control
                && t.limit_rank == self.d
                && t.pairing_perfect
                && t.pairing_bilinear
                && t.pairing_specializes
        }) && self.fixtures.iter().all(|x| x.rejected_at_level)
            && self.incompatible_pairing_rejected != Some(false)
    }
}

fn control_holds(t: &TruncatedTower<PrimeField>) -> Result<bool> {
    for r in 1..=t.r_max() {
        for s in 1..=r {
            if !t.control_isomorphism(r, s)?.holds {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn check_tower(spec: &TowerSpec, default_r_max: u32, seed: u64) -> Result<TowerDetails> {
    let r_max = spec.r_max.unwrap_or(default_r_max);
    let f = PrimeField::new(spec.p)?;
    let ideals = vec![1; r_max as usize];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut towers = Vec::new();
    let mut fixtures = Vec::new();
    let mut incompatible_pairing_rejected = None;
    for i in 0..spec.count {
        let pt = random_paired_towers(&f, spec.p, r_max, spec.d, &mut rng)?;
        let rep = pt.left.check_hypotheses(&ideals)?;
        let rep_right = pt.right.check_hypotheses(&ideals)?;
        let control = control_holds(&pt.left)? && control_holds(&pt.right)?;
        let limit_rank = pt.left.truncated_limit()?.basis.len();
        let record = match build_lambda_pairing(&pt.left, &pt.right, &pt.pairing) {
            Ok(lp) => TowerRecord {
                hypotheses: rep.holds && rep_right.holds,
                common_rank: rep.common_rank,
                control,
                limit_rank,
                pairing_perfect: lp.perfect.iter().all(|x| *x),
                pairing_bilinear: lp.bilinear.iter().all(|x| *x),
                pairing_specializes: lp.specializes.iter().all(|x| *x),
            },
            Err(_) => TowerRecord {
                hypotheses: rep.holds && rep_right.holds,
                common_rank: rep.common_rank,
                control,
                limit_rank,
                pairing_perfect: false,
                pairing_bilinear: false,
                pairing_specializes: false,
            },
        };
        towers.push(record);
        if i == 0 && spec.fixtures {
            for level in 1..=r_max {
                for kind in [Hypothesis::Equivariance, Hypothesis::Freeness, Hypothesis::Surjectivity] {
                    let Ok(bad) = break_tower(&pt.left, level, kind) else { continue };
                    let first_failure = bad.check_hypotheses(&ideals)?.first_failure;
                    fixtures.push(FixtureRecord {
                        level,
                        broken: kind,
                        first_failure,
                        rejected_at_level: first_failure == Some((level, kind)),
                    });
                }
            }
            if r_max >= 2 && spec.p > 2 {
                let mut bad = pt.pairing.clone();
                bad.forms[1] = bad.forms[1].scale(&2);
                incompatible_pairing_rejected =
                    Some(matches!(build_lambda_pairing(&pt.left, &pt.right, &bad), Err(PairingError::Incompatible(_))));
            }
        }
    }
    Ok(TowerDetails { p: spec.p, r_max, d: spec.d, towers, fixtures, incompatible_pairing_rejected })
}

pub fn run_tower(spec: &TowerSpec, default_r_max: u32, seed: u64) -> SuiteResult {
    let case = format!("p={} r_max={} d={}", spec.p, spec.r_max.unwrap_or(default_r_max), spec.d);
    match check_tower(spec, default_r_max, seed) {
        Ok(d) => SuiteResult::ok(SUITE, case, d.passed(), &d),
        Err(e) => SuiteResult::failed(SUITE, case, e),
    }
}
