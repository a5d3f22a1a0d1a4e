use std::path::{Path, PathBuf};

use igusa_core::algebra::arith::is_prime;
use igusa_core::algebra::{Poly, PrimeField, Ring};
use igusa_core::curves::{CurveModel, RatFunc};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_PAIRS: [(u64, u64); 6] = [(5, 7), (5, 11), (7, 4), (7, 5), (11, 4), (13, 4)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleTerm {
    pub at: i64,
    pub order: u64,
    #[serde(default = "one")]
    pub coeff: i64,
}

fn one() -> i64 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    ProjectiveLine {
        p: u64,
    },
    /// y² + a1 xy + a3 y = x³ + a2 x² + a4 x + a6.
    Elliptic {
        p: u64,
        a: [i64; 5],
        #[serde(default)]
        gamma: Option<usize>,
    },
    /// y² = h(x), coefficients from the constant term up.
    Hyperelliptic {
        p: u64,
        h: Vec<i64>,
        #[serde(default)]
        gamma: Option<usize>,
    },
    /// y^p − y = poly(x) + Σ coeff/(x − at)^order.
    ArtinSchreier {
        p: u64,
        #[serde(default)]
        poly: Vec<i64>,
        #[serde(default)]
        poles: Vec<PoleTerm>,
    },
}

impl CurveSpec {
    pub fn p(&self) -> u64 {
        match self {
            CurveSpec::ProjectiveLine { p }
            | CurveSpec::Elliptic { p, .. }
            | CurveSpec::Hyperelliptic { p, .. }
            | CurveSpec::ArtinSchreier { p, .. } => *p,
        }
    }

    pub fn expected_gamma(&self) -> Option<usize> {
        match self {
            CurveSpec::ProjectiveLine { .. } => Some(0),
            CurveSpec::Elliptic { gamma, .. } | CurveSpec::Hyperelliptic { gamma, .. } => *gamma,
            CurveSpec::ArtinSchreier { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            CurveSpec::ProjectiveLine { p } => format!("P1/F_{p}"),
            CurveSpec::Elliptic { p, a, .. } => format!("elliptic {a:?}/F_{p}"),
            CurveSpec::Hyperelliptic { p, h, .. } => format!("hyperelliptic {h:?}/F_{p}"),
            CurveSpec::ArtinSchreier { p, poly, poles } => {
                let ps: Vec<_> = poles.iter().map(|t| format!("{}/(x-{})^{}", t.coeff, t.at, t.order)).collect();
                format!("artin-schreier {poly:?} + [{}]/F_{p}", ps.join(", "))
            }
        }
    }

    pub fn build(&self) -> Result<CurveModel<PrimeField>> {
        let p = self.p();
        if p == 2 {
            return Err(CliError::Config(format!("curve {}: characteristic 2 is not supported", self.label())));
        }
        let f = PrimeField::new(p).map_err(|e| CliError::Config(format!("curve {}: {e}", self.label())))?;
        let built = match self {
            CurveSpec::ProjectiveLine { .. } => Ok(CurveModel::projective_line(&f)),
            CurveSpec::Elliptic { a, .. } => CurveModel::elliptic(&f, a.map(|x| f.from_i64(x))),
            CurveSpec::Hyperelliptic { h, .. } => CurveModel::hyperelliptic(&f, Poly::from_i64(&f, h)),
            CurveSpec::ArtinSchreier { poly, poles, .. } => {
                let mut rhs = RatFunc::from_poly(Poly::from_i64(&f, poly));
                for t in poles {
                    let term = RatFunc::pole(&f, &f.from_i64(t.at), t.order).scale(&f.from_i64(t.coeff));
                    rhs = rhs.add(&term);
                }
                CurveModel::artin_schreier(&f, rhs)
            }
        };
        built.map_err(|e| CliError::Config(format!("curve {}: {e}", self.label())))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSpec {
    pub p: u64,
    /// Falls back to the run's r_max.
    #[serde(default)]
    pub r_max: Option<u32>,
    pub d: usize,
    #[serde(default = "default_count")]
    pub count: usize,
    /// Also run the deliberately broken fixtures.
    #[serde(default = "yes")]
    pub fixtures: bool,
}

fn default_count() -> usize {
    4
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FiberSpec {
    Synthetic {
        p: u64,
        r: u32,
        ordinary: usize,
        #[serde(default)]
        nilpotent: usize,
        #[serde(default = "yes")]
        residue: bool,
    },
    Modular {
        p: u64,
        n: u64,
    },
    Table {
        p: u64,
        r: u32,
    },
}

impl FiberSpec {
    pub fn label(&self) -> String {
        match self {
            FiberSpec::Synthetic { p, r, ordinary, nilpotent, .. } => {
                format!("synthetic p={p} r={r} ordinary={ordinary} nilpotent={nilpotent}")
            }
            FiberSpec::Modular { p, n } => format!("modular p={p} N={n}"),
            FiberSpec::Table { p, r } => format!("tables p={p} r={r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_pairs")]
    pub pairs: Vec<(u64, u64)>,
    #[serde(default = "default_r_max")]
    pub r_max: u32,
    #[serde(default = "default_curves")]
    pub curves: Vec<CurveSpec>,
    /// Random differentials tested per curve.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_towers")]
    pub towers: Vec<TowerSpec>,
    #[serde(default = "default_fibers")]
    pub fibers: Vec<FiberSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_pairs() -> Vec<(u64, u64)> {
    DEFAULT_PAIRS.to_vec()
}

fn default_r_max() -> u32 {
    3
}

fn default_samples() -> usize {
    100
}

fn default_curves() -> Vec<CurveSpec> {
    let as_cover = |p: u64, poles: &[i64]| CurveSpec::ArtinSchreier {
        p,
        poly: vec![0, 0, 1],
        poles: poles.iter().map(|&at| PoleTerm { at, order: 1, coeff: 1 }).collect(),
    };
    vec![
        CurveSpec::ProjectiveLine { p: 5 },
        CurveSpec::Elliptic { p: 5, a: [0, 0, 0, 1, 1], gamma: Some(1) },
        CurveSpec::Elliptic { p: 5, a: [0, 0, 0, 0, 1], gamma: Some(0) },
        CurveSpec::Elliptic { p: 7, a: [0, 0, 0, 1, 0], gamma: Some(0) },
        CurveSpec::Elliptic { p: 7, a: [0, 0, 0, 0, 1], gamma: Some(1) },
        as_cover(3, &[]),
        as_cover(3, &[0]),
        as_cover(3, &[0, 1]),
        as_cover(5, &[]),
        as_cover(5, &[0]),
        as_cover(5, &[0, 1]),
        as_cover(7, &[0]),
    ]
}

fn default_towers() -> Vec<TowerSpec> {
    vec![
        TowerSpec { p: 3, r_max: None, d: 1, count: 4, fixtures: true },
        TowerSpec { p: 3, r_max: None, d: 2, count: 4, fixtures: true },
        TowerSpec { p: 3, r_max: None, d: 3, count: 4, fixtures: false },
        TowerSpec { p: 5, r_max: Some(2), d: 2, count: 4, fixtures: true },
        TowerSpec { p: 5, r_max: None, d: 1, count: 4, fixtures: false },
    ]
}

fn default_fibers() -> Vec<FiberSpec> {
    vec![
        FiberSpec::Table { p: 5, r: 2 },
        FiberSpec::Table { p: 3, r: 3 },
        FiberSpec::Synthetic { p: 3, r: 1, ordinary: 2, nilpotent: 1, residue: true },
        FiberSpec::Synthetic { p: 5, r: 2, ordinary: 2, nilpotent: 1, residue: true },
        FiberSpec::Synthetic { p: 3, r: 3, ordinary: 2, nilpotent: 1, residue: true },
        FiberSpec::Modular { p: 5, n: 7 },
    ]
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pairs: default_pairs(),
            r_max: default_r_max(),
            curves: default_curves(),
            samples: default_samples(),
            towers: default_towers(),
            fibers: default_fibers(),
            seed: 0,
            out: None,
        }
    }
}

/// p > 2 prime, p ∤ N and Np > 4.
pub fn validate_pair(p: u64, n: u64) -> Result<()> {
    if !is_prime(p) || p == 2 {
        return Err(CliError::Config(format!("({p}, {n}): p must be an odd prime")));
    }
    if n == 0 || n % p == 0 {
        return Err(CliError::Config(format!("({p}, {n}): p must not divide N")));
    }
    if n * p <= 4 {
        return Err(CliError::Config(format!("({p}, {n}): need Np > 4")));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for &(p, n) in &self.pairs {
            validate_pair(p, n)?;
        }
        if self.r_max == 0 {
            return Err(CliError::Config("r_max must be at least 1".into()));
        }
        for c in &self.curves {
            c.build()?;
        }
        for t in &self.towers {
            if !is_prime(t.p) || t.d == 0 || t.r_max == Some(0) {
                return Err(CliError::Config(format!("tower p={} d={}: need a prime p, d ≥ 1 and r_max ≥ 1", t.p, t.d)));
            }
        }
        for s in &self.fibers {
            let (p, r) = match s {
                FiberSpec::Synthetic { p, r, .. } | FiberSpec::Table { p, r } => (*p, *r),
                FiberSpec::Modular { p, n } => {
                    validate_pair(*p, *n)?;
                    (*p, 1)
                }
            };
            if !is_prime(p) || p == 2 || r == 0 {
                return Err(CliError::Config(format!("{}: need an odd prime and r ≥ 1", s.label())));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn pair_constraints() {
        assert!(validate_pair(5, 5).is_err());
        assert!(validate_pair(2, 7).is_err());
        assert!(validate_pair(3, 1).is_err());
        assert!(validate_pair(5, 1).is_ok());
        assert!(validate_pair(9, 4).is_err());
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(RunConfig::from_json(r#"{"pairs": [[5, 5]]}"#), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::from_json(r#"{"curves": [{"kind": "quartic", "p": 5}]}"#), Err(CliError::Parse(_))));
        assert!(matches!(RunConfig::from_json(r#"{"pear": []}"#), Err(CliError::Parse(_))));
        // A pole order divisible by p is not in standard form.
        let bad = r#"{"curves": [{"kind": "artin_schreier", "p": 3, "poles": [{"at": 0, "order": 3}]}]}"#;
        assert!(matches!(RunConfig::from_json(bad), Err(CliError::Config(_))));
        let singular = r#"{"curves": [{"kind": "elliptic", "p": 5, "a": [0, 0, 0, 0, 0]}]}"#;
        assert!(matches!(RunConfig::from_json(singular), Err(CliError::Config(_))));
    }
}
