//! Degeneracy maps X̄_{r+1} ⇉ X̄_r, the maps Ȳ_r ⇉ X̄_r, and inertia, restricted to components.
//!
//! Each row sends a component to a component through a word in F, ρ, ⟨u⟩ and ⟨p⟩_N. These
//! operators commute up to moving diamonds across ρ, so a word is kept in the normal form
//! F^f ⟨u⟩ ⟨p⟩_N^t ρ^k with u read on the target.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::carrier::IgusaCarrier;
use super::components::{list_components, reduce_unit, ComponentIndex};
use crate::algebra::arith::inv_mod;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapLabel {
    /// ρ̄: X̄_{r+1} → X̄_r.
    RhoBar,
    /// σ̄: X̄_{r+1} → X̄_r.
    SigmaBar,
    /// π̄₁: Ȳ_r → X̄_r.
    Pi1,
    /// π̄₂: Ȳ_r → X̄_r.
    Pi2,
    /// π̄: X̄_{r+1} → Ȳ_r, read off from ρ = π₂∘π and σ = π₁∘π.
    Pi,
    /// Geometric inertia γ̄ on X̄_r.
    Inertia,
}

impl MapLabel {
    pub const ALL: [MapLabel; 5] = [MapLabel::RhoBar, MapLabel::SigmaBar, MapLabel::Pi1, MapLabel::Pi2, MapLabel::Pi];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Word {
    pub frob: u32,
    pub rho: u32,
    /// Diamond unit and its modulus; modulus 1 means no diamond.
    pub unit: u64,
    pub modulus: u64,
    pub tame: i64,
}

impl Word {
    pub const ID: Word = Word { frob: 0, rho: 0, unit: 1, modulus: 1, tame: 0 };

    pub fn f() -> Self {
        Word { frob: 1, ..Self::ID }
    }

    pub fn rho() -> Self {
        Word { rho: 1, ..Self::ID }
    }

    pub fn tame(t: i64) -> Self {
        Word { tame: t, ..Self::ID }
    }

    pub fn diamond(u: u64, modulus: u64) -> Self {
        Word { unit: reduce_unit(u, modulus), modulus, ..Self::ID }
    }

    pub fn diamond_inv(u: u64, modulus: u64) -> Self {
        let inv = if modulus == 1 { 1 } else { inv_mod(u % modulus, modulus).expect("unit") };
        Self::diamond(inv, modulus)
    }

    /// `self` after `first`.
    pub fn then_after(&self, first: &Word) -> Word {
        let modulus = match (self.modulus, first.modulus) {
            (1, m) | (m, 1) => m,
            (a, b) => a.min(b),
        };
        let unit = reduce_unit(reduce_unit(self.unit, modulus) * reduce_unit(first.unit, modulus), modulus);
        Word { frob: self.frob + first.frob, rho: self.rho + first.rho, unit, modulus, tame: self.tame + first.tame }
    }

    pub fn compose(words: &[Word]) -> Word {
        words.iter().fold(Word::ID, |acc, w| w.then_after(&acc))
    }

    fn normalized(&self) -> (u32, u32, u64, u64, i64) {
        let (u, m) = if reduce_unit(self.unit, self.modulus) == 1 { (1, 1) } else { (self.unit, self.modulus) };
        (self.frob, self.rho, u, m, self.tame)
    }

    /// Equality as operators.
    pub fn same_as(&self, o: &Word) -> bool {
        self.normalized() == o.normalized()
    }

    /// Push-forward of a differential on Ig_s along the word.
    pub fn push_forward(&self, c: &IgusaCarrier, s: u32, v: &[u64]) -> Result<Vec<u64>> {
        if self.rho >= s {
            return Err(Error::Precondition(format!("cannot apply ρ^{} on level {s}", self.rho)));
        }
        let mut x = c.frob_pow(s, self.frob, v);
        x = c.tame_pow(s, self.tame, &x);
        for t in (s - self.rho + 1..=s).rev() {
            x = c.trace_down(t, &x);
        }
        let target = s - self.rho;
        if self.modulus != 1 {
            x = c.diamond(target, self.unit, &x);
        }
        Ok(x)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.modulus != 1 && self.unit != 1 {
            parts.push(format!("<{}>", self.unit));
        }
        match self.tame {
            0 => {}
            1 => parts.push("<p>_N".into()),
            t => parts.push(format!("<p>_N^{t}")),
        }
        match self.frob {
            0 => {}
            1 => parts.push("F".into()),
            k => parts.push(format!("F^{k}")),
        }
        match self.rho {
            0 => {}
            1 => parts.push("rho".into()),
            k => parts.push(format!("rho^{k}")),
        }
        if parts.is_empty() {
            write!(f, "id")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub label: MapLabel,
    pub source: ComponentIndex,
    pub target: ComponentIndex,
    pub word: Word,
    pub rendered: String,
}

fn comp(p: u64, a: u32, b: u32, u: u64) -> ComponentIndex {
    ComponentIndex { a, b, u: reduce_unit(u, p.pow(a.min(b))) }
}

fn check_source(p: u64, r: u32, idx: &ComponentIndex) -> Result<()> {
    let valid = list_components(p, r + 1)?;
    if r == 0 || !valid.contains(idx) {
        return Err(Error::Invalid(format!("{idx} is not a component at level {}", r + 1)));
    }
    Ok(())
}

/// Restriction of a degeneracy map to the (a,b,u)-component, a + b = r + 1.
pub fn degeneracy_description(p: u64, r: u32, label: MapLabel, idx: &ComponentIndex) -> Result<TableRow> {
    check_source(p, r, idx)?;
    let (a, b, u) = (idx.a, idx.b, idx.u);
    let um = |e: u32| p.pow(e);
    let (target, word) = match label {
        MapLabel::SigmaBar => {
            if a == 0 {
                (comp(p, 0, r, 1), Word::tame(1).then_after(&Word::rho()))
            } else if b < a {
                (comp(p, a - 1, b, u), Word::f().then_after(&Word::rho()))
            } else if a == b {
                (comp(p, a - 1, b, u), Word::diamond_inv(u, um(a)).then_after(&Word::f()))
            } else {
                (comp(p, a - 1, b, u), Word::f())
            }
        }
        MapLabel::RhoBar => {
            if b == 0 {
                (comp(p, r, 0, 1), Word::rho())
            } else if b <= a {
                (comp(p, a, b - 1, u), Word::f())
            } else if a + 1 == b {
                (comp(p, a, b - 1, u), Word::compose(&[Word::rho(), Word::f(), Word::diamond(u, um(a))]))
            } else {
                (comp(p, a, b - 1, u), Word::f().then_after(&Word::rho()))
            }
        }
        MapLabel::Pi1 => {
            if b == 0 {
                (comp(p, r, 0, 1), Word::f())
            } else if a == 0 {
                (comp(p, 0, r, 1), Word::tame(1))
            } else if b < a {
                (comp(p, a - 1, b, u), Word::rho())
            } else if a == b {
                (comp(p, a - 1, b, u), Word::diamond_inv(u, um(a)))
            } else {
                (comp(p, a - 1, b, u), Word::ID)
            }
        }
        MapLabel::Pi2 => {
            if b == 0 {
                (comp(p, r, 0, 1), Word::ID)
            } else if a == 0 {
                (comp(p, 0, r, 1), Word::f())
            } else if b <= a {
                (comp(p, a, b - 1, u), Word::ID)
            } else if a + 1 == b {
                (comp(p, a, b - 1, u), Word::diamond(u, um(a)).then_after(&Word::rho()))
            } else {
                (comp(p, a, b - 1, u), Word::rho())
            }
        }
        MapLabel::Pi => {
            let w = if a == 0 || b == 0 { Word::rho() } else { Word::f() };
            (*idx, w)
        }
        MapLabel::Inertia => return Err(Error::Invalid("inertia rows come from inertia_description".into())),
    };
    Ok(TableRow { label, source: *idx, target, rendered: word.to_string(), word })
}

pub fn degeneracy_table(p: u64, r: u32, label: MapLabel) -> Result<Vec<TableRow>> {
    list_components(p, r + 1)?.iter().map(|i| degeneracy_description(p, r, label, i)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationCheck {
    pub source: ComponentIndex,
    pub map: MapLabel,
    pub holds: bool,
}

/// σ̄ = π̄₁∘π̄ and ρ̄ = π̄₂∘π̄ on every component of X̄_{r+1}.
pub fn factorization_checks(p: u64, r: u32) -> Result<Vec<FactorizationCheck>> {
    let mut out = Vec::new();
    for idx in list_components(p, r + 1)? {
        let pi = degeneracy_description(p, r, MapLabel::Pi, &idx)?;
        for (whole, part) in [(MapLabel::SigmaBar, MapLabel::Pi1), (MapLabel::RhoBar, MapLabel::Pi2)] {
            let w = degeneracy_description(p, r, whole, &idx)?;
            let q = degeneracy_description(p, r, part, &pi.target)?;
            let holds = w.target == q.target && w.word.same_as(&q.word.then_after(&pi.word));
            out.push(FactorizationCheck { source: idx, map: whole, holds });
        }
    }
    Ok(out)
}

/// Inertia row for χ ∈ (Z/p^r)^× on the (a,b,u)-component, a + b = r.
pub fn inertia_description(p: u64, r: u32, chi: u64, idx: &ComponentIndex) -> Result<TableRow> {
    if !list_components(p, r)?.contains(idx) {
        return Err(Error::Invalid(format!("{idx} is not a component at level {r}")));
    }
    let modulus = p.pow(r);
    if chi % p == 0 {
        return Err(Error::Invalid(format!("{chi} is not a unit")));
    }
    let chi = chi % modulus;
    let target = comp(p, idx.a, idx.b, reduce_unit(chi * idx.u, p.pow(idx.a.min(idx.b))));
    let word = if idx.b <= idx.a { Word::ID } else { Word::diamond_inv(chi, p.pow(idx.b)) };
    Ok(TableRow { label: MapLabel::Inertia, source: *idx, target, rendered: word.to_string(), word })
}

/// Inertia for χ₁ after inertia for χ₂ agrees with inertia for χ₁χ₂.
pub fn inertia_composes(p: u64, r: u32, chi1: u64, chi2: u64) -> Result<bool> {
    let m = p.pow(r);
    for idx in list_components(p, r)? {
        let first = inertia_description(p, r, chi2, &idx)?;
        let second = inertia_description(p, r, chi1, &first.target)?;
        let both = inertia_description(p, r, chi1 * chi2 % m, &idx)?;
        if second.target != both.target || !second.word.then_after(&first.word).same_as(&both.word) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ci(a: u32, b: u32, u: u64) -> ComponentIndex {
        ComponentIndex { a, b, u }
    }

    #[test]
    fn quoted_rows() {
        for r in 1..=3 {
            let row = degeneracy_description(5, r, MapLabel::Pi2, &ci(r + 1, 0, 1)).unwrap();
            assert_eq!((row.target, row.rendered.as_str()), (ci(r, 0, 1), "id"));
            let row = degeneracy_description(5, r, MapLabel::Pi1, &ci(0, r + 1, 1)).unwrap();
            assert_eq!((row.target, row.rendered.as_str()), (ci(0, r, 1), "<p>_N"));
            let row = degeneracy_description(5, r, MapLabel::SigmaBar, &ci(0, r + 1, 1)).unwrap();
            assert_eq!((row.target, row.rendered.as_str()), (ci(0, r, 1), "<p>_N rho"));
        }
        let row = degeneracy_description(5, 1, MapLabel::SigmaBar, &ci(1, 1, 2)).unwrap();
        assert_eq!((row.target, row.rendered.as_str()), (ci(0, 1, 1), "<3> F"));
        let row = degeneracy_description(5, 2, MapLabel::RhoBar, &ci(1, 2, 3)).unwrap();
        assert_eq!((row.target, row.rendered.as_str()), (ci(1, 1, 3), "<3> F rho"));
        assert!(degeneracy_description(5, 2, MapLabel::RhoBar, &ci(1, 1, 3)).is_err());
    }

    #[test]
    fn factorizations_hold() {
        for (p, r) in [(3, 1), (3, 2), (5, 1), (5, 2), (3, 3), (7, 2)] {
            let checks = factorization_checks(p, r).unwrap();
            assert!(checks.iter().all(|c| c.holds), "{:?}", checks.iter().filter(|c| !c.holds).collect::<Vec<_>>());
        }
    }

    #[test]
    fn inertia_rows() {
        let row = inertia_description(5, 2, 7, &ci(2, 0, 1)).unwrap();
        assert_eq!((row.target, row.rendered.as_str()), (ci(2, 0, 1), "id"));
        let row = inertia_description(5, 2, 2, &ci(1, 1, 3)).unwrap();
        assert_eq!(row.target, ci(1, 1, 1));
        let row = inertia_description(5, 2, 2, &ci(0, 2, 1)).unwrap();
        assert_eq!(row.rendered, "<13>");
        for idx in list_components(5, 2).unwrap() {
            let row = inertia_description(5, 2, 1, &idx).unwrap();
            assert_eq!((row.target, row.rendered.as_str()), (idx, "id"));
        }
        assert!(inertia_composes(5, 2, 2, 7).unwrap());
        assert!(inertia_composes(3, 3, 4, 5).unwrap());
    }

    #[test]
    fn chaining_degeneracies() {
        // ρ̄ twice from (r+2,0,1) is ρ² onto (r,0,1).
        let first = degeneracy_description(3, 2, MapLabel::RhoBar, &ci(3, 0, 1)).unwrap();
        let second = degeneracy_description(3, 1, MapLabel::RhoBar, &first.target).unwrap();
        assert_eq!(second.target, ci(1, 0, 1));
        assert!(second.word.then_after(&first.word).same_as(&Word { rho: 2, ..Word::ID }));
    }

    #[test]
    fn words_act_on_carriers() {
        let c = IgusaCarrier::random(3, 2, 1, 1, false, 2).unwrap();
        let v: Vec<u64> = (0..c.dim(2)).map(|i| (i % 3) as u64).collect();
        let w = Word::compose(&[Word::rho(), Word::f(), Word::diamond(2, 3)]);
        let expected = c.diamond(1, 2, &c.frob(1, &c.trace_down(2, &v)));
        assert_eq!(w.push_forward(&c, 2, &v).unwrap(), expected);
        assert!(Word { rho: 2, ..Word::ID }.push_forward(&c, 2, &v).is_err());
    }

    fn word() -> impl Strategy<Value = Word> {
        (0u32..3, 0u32..3, prop::sample::select(vec![1u64, 2, 4, 5, 7, 8]), -2i64..3).prop_map(|(f, k, u, t)| Word {
            frob: f,
            rho: k,
            unit: u,
            modulus: 9,
            tame: t,
        })
    }

    proptest! {
        #[test]
        fn composition_is_associative(x in word(), y in word(), z in word()) {
            let left = x.then_after(&y).then_after(&z);
            let right = x.then_after(&y.then_after(&z));
            prop_assert!(left.same_as(&right));
        }

        #[test]
        fn inertia_is_an_action(c1 in prop::sample::select(vec![1u64, 2, 4, 5, 7, 8, 10, 11]), c2 in prop::sample::select(vec![1u64, 2, 4, 5, 7, 8, 13, 26])) {
            prop_assert!(inertia_composes(3, 3, c1, c2).unwrap());
        }
    }
}
