//! Differentials on a union of smooth curves meeting at common crossing points, with simple
//! poles at the crossings and vanishing residue sum at each crossing.

use serde::Serialize;

use super::local::residue_at;
use super::model::{CurveModel, MeroDifferential, Place};
use super::space::{DifferentialSpace, DivisorData};
use crate::algebra::linalg::kernel;
use crate::algebra::{FiniteField, Matrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CrossedUnion<F: FiniteField> {
    pub components: Vec<CurveModel<F>>,
    /// `crossings[c][i]` is the place of crossing c on component i.
    pub crossings: Vec<Vec<Place<F::Elem>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RosenlichtSections<F: FiniteField> {
    pub sections: Vec<Vec<MeroDifferential<F>>>,
    pub summary: RosenlichtSummary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RosenlichtSummary {
    pub dim: usize,
    pub arithmetic_genus: usize,
    pub matches: bool,
}

impl<F: FiniteField> CrossedUnion<F> {
    pub fn validate(&self) -> Result<()> {
        let n = self.components.len();
        for (ci, row) in self.crossings.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Invalid(format!("crossing {ci} does not name a place on every component")));
            }
            for (i, pl) in row.iter().enumerate() {
                if !self.components[i].contains_place(pl) {
                    return Err(Error::Invalid(format!("crossing {ci} is not on component {i}")));
                }
            }
        }
        for i in 0..n {
            for a in 0..self.crossings.len() {
                for b in a + 1..self.crossings.len() {
                    if self.crossings[a][i] == self.crossings[b][i] {
                        return Err(Error::Invalid(format!("crossings {a} and {b} coincide on component {i}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Σ g_i + (#crossings − 1)(#components − 1) for a connected union.
    pub fn arithmetic_genus(&self) -> usize {
        let g: usize = self.components.iter().map(|c| c.genus()).sum();
        let (k, n) = (self.crossings.len(), self.components.len());
        if k == 0 {
            g
        } else {
            g + (k - 1) * (n - 1)
        }
    }
}

pub fn rosenlicht_sections_simple<F: FiniteField>(u: &CrossedUnion<F>) -> Result<RosenlichtSections<F>> {
    u.validate()?;
    let f = u.components[0].field().clone();
    let spaces: Vec<DifferentialSpace<F>> = u
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let places: Vec<_> = u.crossings.iter().map(|row| row[i].clone()).collect();
            DifferentialSpace::new(c, &DivisorData::reduced(&places))
        })
        .collect::<Result<_>>()?;
    let mut columns: Vec<(usize, MeroDifferential<F>)> = Vec::new();
    for (i, s) in spaces.iter().enumerate() {
        for b in s.basis() {
            columns.push((i, b));
        }
    }
    let mut res = Matrix::zeros(&f, u.crossings.len(), columns.len());
    for (ci, row) in u.crossings.iter().enumerate() {
        for (k, (i, b)) in columns.iter().enumerate() {
            res.set(ci, k, residue_at(&u.components[*i], b, &row[*i])?);
        }
    }
    let ker = if u.crossings.is_empty() {
        (0..columns.len())
            .map(|k| (0..columns.len()).map(|j| if j == k { f.one() } else { f.zero() }).collect())
            .collect()
    } else {
        kernel(&res)
    };
    let sections: Vec<Vec<MeroDifferential<F>>> = ker
        .iter()
        .map(|v| {
            let mut tuple: Vec<MeroDifferential<F>> = u.components.iter().map(|c| c.zero_differential()).collect();
            for ((i, b), c) in columns.iter().zip(v) {
                tuple[*i] = tuple[*i].add(&b.scale(c));
            }
            tuple
        })
        .collect();
    let dim = sections.len();
    let arithmetic_genus = u.arithmetic_genus();
    Ok(RosenlichtSections { sections, summary: RosenlichtSummary { dim, arithmetic_genus, matches: dim == arithmetic_genus } })
}
