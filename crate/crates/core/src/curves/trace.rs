//! Pullback and trace of differentials along the degree-n map (x, y) ↦ x.

use super::model::{CurveKind, CurveModel, MeroDifferential};
use super::ratfunc::RatFunc;
use crate::algebra::FiniteField;

/// ρ^*: g dx on the line becomes g dx on the cover.
pub fn pullback<F: FiniteField>(c: &CurveModel<F>, g: &RatFunc<F>) -> MeroDifferential<F> {
    let mut w = c.zero_differential();
    w.g[0] = g.clone();
    w
}

/// ρ_*(Σ g_j y^j dx) = Σ g_j Tr(y^j) dx.
pub fn trace_pushforward<F: FiniteField>(c: &CurveModel<F>, w: &MeroDifferential<F>) -> RatFunc<F> {
    let f = c.field();
    match c.kind() {
        CurveKind::ProjectiveLine => w.g[0].clone(),
        CurveKind::Hyperelliptic { .. } => w.g[0].scale(&f.from_i64(2)),
        // Tr(y^j) = Σ_{i∈F_p} (y+i)^j vanishes for j < p−1 and is −1 for j = p−1.
        CurveKind::ArtinSchreier { .. } => w.g[c.p() as usize - 1].neg(),
    }
}
