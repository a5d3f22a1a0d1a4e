use igusa_core::fiber::{
    degeneracy_table, factorization_checks, frobenius_splitting_check, inertia_composes, inertia_description,
    list_components, ordinary_contraction_check, residue_sum_check, up_power_closed_form,
    upstar_power_closed_form, ContractionReport, IgusaCarrier, MapLabel, MeroSection, SplittingReport, Star, TableRow,
};
use igusa_core::fiber::hecke::{diamond_section, iterate};
use igusa_core::algebra::arith::primitive_root;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::FiberSpec;
use crate::error::Result;
use crate::report::SuiteResult;

pub const SUITE: &str = "fiber";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableDump {
    pub p: u64,
    pub r: u32,
    pub components: Vec<String>,
    /// Degeneracy maps out of level r, present when r ≥ 2.
    pub degeneracy: Vec<TableRow>,
    pub factorizations_hold: Option<bool>,
    pub inertia: Vec<TableRow>,
    pub inertia_composes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormRecord {
    pub star: Star,
    pub n: u32,
    pub matches_iteration: bool,
    /// Agreement on a diamond-twisted input.
    pub matches_twisted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CarrierDetails {
    pub p: u64,
    pub r: u32,
    pub ordinary_rank: Option<usize>,
    pub relations_hold: bool,
    pub closed_forms: Vec<ClosedFormRecord>,
    pub contraction: ContractionReport,
    pub splitting: SplittingReport,
    /// None when the carrier has no residue functionals.
    pub residues_hold: Option<bool>,
}

impl CarrierDetails {
    pub fn passed(&self) -> bool {
        self.relations_hold
            && self.closed_forms.iter().all(|c| c.matches_iteration && c.matches_twisted)
            && self.contraction.holds
            && self.splitting.holds
            && self.residues_hold != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum FiberDetails {
    Table(TableDump),
    Carrier(Box<CarrierDetails>),
}

pub fn table_dump(p: u64, r: u32) -> Result<TableDump> {
    let comps = list_components(p, r)?;
    let mut degeneracy = Vec::new();
    let mut factorizations_hold = None;
    if r >= 2 {
        for label in [MapLabel::RhoBar, MapLabel::SigmaBar, MapLabel::Pi] {
            degeneracy.extend(degeneracy_table(p, r - 1, label)?);
        }
        factorizations_hold = Some(factorization_checks(p, r - 1)?.iter().all(|c| c.holds));
    }
    let g = primitive_root(p.pow(r)).unwrap_or(1);
    let inertia = comps.iter().map(|i| inertia_description(p, r, g, i)).collect::<igusa_core::Result<Vec<_>>>()?;
    Ok(TableDump {
        p,
        r,
        components: comps.iter().map(|c| c.to_string()).collect(),
        degeneracy,
        factorizations_hold,
        inertia,
        inertia_composes: inertia_composes(p, r, g, 1 + p)?,
    })
}

fn random_section(c: &IgusaCarrier, rng: &mut ChaCha8Rng) -> MeroSection {
    MeroSection::from_fn(c, |i| (0..c.dim(i.level())).map(|_| rng.gen_range(0..c.p())).collect())
}

pub fn carrier_details(c: &IgusaCarrier, seed: u64) -> Result<CarrierDetails> {
    let (p, r) = (c.p(), c.r());
    let relations_hold = c.verify_relations().iter().all(|x| x.holds);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eta = random_section(c, &mut rng);
    let twist = 1 + p;
    let twisted = diamond_section(c, twist, &eta);
    let mut closed_forms = Vec::new();
    for n in r..=r.max(6) {
        for star in [Star::Infinity, Star::Zero] {
            let closed = |x: &MeroSection| match star {
                Star::Infinity => up_power_closed_form(c, x, n),
                Star::Zero => upstar_power_closed_form(c, x, n),
            };
            closed_forms.push(ClosedFormRecord {
                star,
                n,
                matches_iteration: closed(&eta)? == iterate(c, star, &eta, n)?,
                matches_twisted: closed(&twisted)? == iterate(c, star, &twisted, n)?,
            });
        }
    }
    let contraction = ordinary_contraction_check(c)?;
    let splitting = frobenius_splitting_check(c, seed)?;
    let residues_hold = if c.has_residues() {
        let mut ok = true;
        for star in [Star::Infinity, Star::Zero] {
            for nu in c.ordinary_basis(r) {
                ok &= residue_sum_check(c, star, nu)?.holds;
            }
        }
        Some(ok)
    } else {
        None
    };
    Ok(CarrierDetails {
        p,
        r,
        ordinary_rank: c.ordinary_rank(),
        relations_hold,
        closed_forms,
        contraction,
        splitting,
        residues_hold,
    })
}

pub fn check_fiber(spec: &FiberSpec, seed: u64) -> Result<(bool, FiberDetails)> {
    match *spec {
        FiberSpec::Table { p, r } => {
            let t = table_dump(p, r)?;
            let ok = t.factorizations_hold != Some(false) && t.inertia_composes;
            Ok((ok, FiberDetails::Table(t)))
        }
        FiberSpec::Synthetic { p, r, ordinary, nilpotent, residue } => {
            let c = IgusaCarrier::random(p, r, ordinary, nilpotent, residue, seed)?;
            let d = carrier_details(&c, seed)?;
            Ok((d.passed(), FiberDetails::Carrier(Box::new(d))))
        }
        FiberSpec::Modular { p, n } => {
            let c = IgusaCarrier::from_modular(p, n)?;
            let d = carrier_details(&c, seed)?;
            Ok((d.passed(), FiberDetails::Carrier(Box::new(d))))
        }
    }
}

pub fn run_fiber(spec: &FiberSpec, seed: u64) -> SuiteResult {
    match check_fiber(spec, seed) {
        Ok((ok, d)) => SuiteResult::ok(SUITE, spec.label(), ok, &d),
        Err(e) => SuiteResult::failed(SUITE, spec.label(), e),
    }
}
