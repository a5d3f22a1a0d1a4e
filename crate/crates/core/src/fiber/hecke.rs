//! U_p and U_p* on tuples of differentials indexed by components, their high powers, and the
//! maps γ^∞, γ⁰ with the pullbacks i^∞*, i⁰*.

use serde::{Deserialize, Serialize};

use super::carrier::IgusaCarrier;
use super::components::{list_components, reduce_unit, unit_lifts, unit_list, ComponentIndex};
use crate::algebra::matrix::vec_add;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Star {
    Infinity,
    Zero,
}

/// A tuple (η_{(a,b,u)}) with η_{(a,b,u)} ∈ M_{max(a,b)}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeroSection {
    pub r: u32,
    pub parts: Vec<(ComponentIndex, Vec<u64>)>,
}

impl MeroSection {
    pub fn zero(c: &IgusaCarrier) -> Self {
        let parts = list_components(c.p(), c.r())
            .expect("carrier parameters are valid")
            .into_iter()
            .map(|i| (i, c.zero(i.level())))
            .collect();
        MeroSection { r: c.r(), parts }
    }

    pub fn from_fn(c: &IgusaCarrier, mut f: impl FnMut(ComponentIndex) -> Vec<u64>) -> Self {
        let mut s = Self::zero(c);
        for (i, v) in s.parts.iter_mut() {
            *v = f(*i);
        }
        s
    }

    pub fn get(&self, idx: &ComponentIndex) -> &[u64] {
        &self.parts.iter().find(|(i, _)| i == idx).unwrap_or_else(|| panic!("no component {idx}")).1
    }

    pub fn dim(&self) -> usize {
        self.parts.iter().map(|(_, v)| v.len()).sum()
    }

    pub fn flatten(&self) -> Vec<u64> {
        self.parts.iter().flat_map(|(_, v)| v.iter().copied()).collect()
    }

    pub fn unflatten(c: &IgusaCarrier, flat: &[u64]) -> Self {
        let mut off = 0;
        Self::from_fn(c, |i| {
            let n = c.dim(i.level());
            off += n;
            flat[off - n..off].to_vec()
        })
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|(_, v)| v.iter().all(|c| *c == 0))
    }

    /// Keeps only the given component.
    pub fn restrict_to(&self, idx: &ComponentIndex) -> Self {
        let parts = self.parts.iter().map(|(i, v)| (*i, if i == idx { v.clone() } else { vec![0; v.len()] })).collect();
        MeroSection { r: self.r, parts }
    }
}

fn sum(c: &IgusaCarrier, len: usize, terms: impl Iterator<Item = Vec<u64>>) -> Vec<u64> {
    terms.fold(vec![0; len], |acc, t| vec_add(c.field(), &acc, &t))
}

fn idx(p: u64, a: u32, b: u32, u: u64) -> ComponentIndex {
    ComponentIndex { a, b, u: reduce_unit(u, p.pow(a.min(b))) }
}

fn check_shape(c: &IgusaCarrier, eta: &MeroSection) -> Result<()> {
    let expected = list_components(c.p(), c.r())?;
    if eta.r != c.r() || eta.parts.len() != expected.len() || eta.parts.iter().zip(&expected).any(|((i, v), e)| i != e || v.len() != c.dim(i.level())) {
        return Err(Error::Config("section does not match the carrier's component set".into()));
    }
    Ok(())
}

/// U_p, component by component.
pub fn up_apply(c: &IgusaCarrier, eta: &MeroSection) -> Result<MeroSection> {
    check_shape(c, eta)?;
    let (p, r) = (c.p(), c.r());
    Ok(MeroSection::from_fn(c, |t| {
        let (a, b, u) = (t.a, t.b, t.u);
        let len = c.dim(t.level());
        if b == 0 {
            c.frob(r, eta.get(&t))
        } else if b <= a {
            c.trace_down(a + 1, eta.get(&idx(p, a + 1, b - 1, u)))
        } else if r % 2 == 1 && a + 1 == b {
            let src = eta.get(&idx(p, a + 1, b - 1, u));
            sum(c, len, unit_lifts(p, u, a, a + 1).into_iter().map(|v| c.diamond(b, v, src)))
        } else if r % 2 == 0 && a + 2 == b {
            sum(c, len, unit_lifts(p, u, a, a + 1).into_iter().map(|v| c.pull_up(b - 1, &c.diamond(b - 1, v, eta.get(&idx(p, a + 1, b - 1, v))))))
        } else {
            sum(c, len, unit_lifts(p, u, a, a + 1).into_iter().map(|v| c.pull_up(b - 1, eta.get(&idx(p, a + 1, b - 1, v)))))
        }
    }))
}

/// U_p*, component by component.
pub fn upstar_apply(c: &IgusaCarrier, eta: &MeroSection) -> Result<MeroSection> {
    check_shape(c, eta)?;
    let (p, r) = (c.p(), c.r());
    Ok(MeroSection::from_fn(c, |t| {
        let (a, b, u) = (t.a, t.b, t.u);
        let len = c.dim(t.level());
        if a == 0 {
            c.tame_pow(r, -1, &c.frob(r, eta.get(&t)))
        } else if a < b {
            c.trace_down(b + 1, eta.get(&idx(p, a - 1, b + 1, u)))
        } else if a == b {
            c.diamond_inv(a, u, &c.trace_down(a + 1, eta.get(&idx(p, a - 1, b + 1, u))))
        } else if b + 1 == a {
            let src = eta.get(&idx(p, a - 1, b + 1, u));
            sum(c, len, unit_lifts(p, u, b, b + 1).into_iter().map(|v| c.diamond_inv(a, v, src)))
        } else {
            sum(c, len, unit_lifts(p, u, b, b + 1).into_iter().map(|v| c.pull_up(a - 1, eta.get(&idx(p, a - 1, b + 1, v)))))
        }
    }))
}

pub fn iterate(c: &IgusaCarrier, star: Star, eta: &MeroSection, n: u32) -> Result<MeroSection> {
    let mut x = eta.clone();
    for _ in 0..n {
        x = match star {
            Star::Infinity => up_apply(c, &x)?,
            Star::Zero => upstar_apply(c, &x)?,
        };
    }
    Ok(x)
}

fn trace_down_to(c: &IgusaCarrier, from: u32, to: u32, v: &[u64]) -> Vec<u64> {
    (to + 1..=from).rev().fold(v.to_vec(), |acc, s| c.trace_down(s, &acc))
}

/// U_p^n for n ≥ r, which only reads the (r,0,1)-component.
pub fn up_power_closed_form(c: &IgusaCarrier, eta: &MeroSection, n: u32) -> Result<MeroSection> {
    check_shape(c, eta)?;
    let (p, r) = (c.p(), c.r());
    if n < r {
        return Err(Error::Precondition(format!("closed form needs n ≥ r, got n={n}, r={r}")));
    }
    let top = eta.get(&ComponentIndex { a: r, b: 0, u: 1 });
    Ok(MeroSection::from_fn(c, |t| {
        let (a, b, u) = (t.a, t.b, t.u);
        let x = c.frob_pow(r, n - b, top);
        if b <= a {
            trace_down_to(c, r, a, &x)
        } else {
            let y = trace_down_to(c, r, b, &x);
            sum(c, y.len(), unit_lifts(p, u, a, b).into_iter().map(|v| c.diamond(b, v, &y)))
        }
    }))
}

/// U_p*^n for n ≥ r, which only reads the (0,r,1)-component.
pub fn upstar_power_closed_form(c: &IgusaCarrier, eta: &MeroSection, n: u32) -> Result<MeroSection> {
    check_shape(c, eta)?;
    let (p, r) = (c.p(), c.r());
    if n < r {
        return Err(Error::Precondition(format!("closed form needs n ≥ r, got n={n}, r={r}")));
    }
    let top = eta.get(&ComponentIndex { a: 0, b: r, u: 1 });
    Ok(MeroSection::from_fn(c, |t| {
        let (a, b, u) = (t.a, t.b, t.u);
        let x = c.tame_pow(r, a as i64 - n as i64, &c.frob_pow(r, n - a, top));
        if a < b {
            trace_down_to(c, r, b, &x)
        } else {
            let y = trace_down_to(c, r, a, &x);
            sum(c, y.len(), unit_lifts(p, u, b, a).into_iter().map(|v| c.diamond_inv(a, v, &y)))
        }
    }))
}

/// γ^∞ or γ⁰ of an F_*-ordinary ν ∈ M_r.
pub fn gamma_map(c: &IgusaCarrier, star: Star, nu: &[u64]) -> Result<MeroSection> {
    let (p, r) = (c.p(), c.r());
    if nu.len() != c.dim(r) {
        return Err(Error::Dimension(format!("ν has length {}, expected {}", nu.len(), c.dim(r))));
    }
    let mut inv = Vec::with_capacity(r as usize + 1);
    for e in 0..=r {
        inv.push(c.frob_inverse_pow(r, e, nu)?);
    }
    Ok(MeroSection::from_fn(c, |t| {
        let (a, b, u) = (t.a, t.b, t.u);
        match star {
            Star::Infinity => {
                if b <= a {
                    trace_down_to(c, r, a, &inv[b as usize])
                } else {
                    let y = trace_down_to(c, r, b, &inv[b as usize]);
                    sum(c, y.len(), unit_lifts(p, u, a, b).into_iter().map(|v| c.diamond(b, v, &y)))
                }
            }
            Star::Zero => {
                let x = c.tame_pow(r, a as i64, &inv[a as usize]);
                if a < b {
                    trace_down_to(c, r, b, &x)
                } else {
                    let y = trace_down_to(c, r, a, &x);
                    sum(c, y.len(), unit_lifts(p, u, b, a).into_iter().map(|v| c.diamond_inv(a, v, &y)))
                }
            }
        }
    }))
}

/// Projection onto the (r,0,1)- or (0,r,1)-component.
pub fn pullback_i_star(eta: &MeroSection, star: Star) -> Vec<u64> {
    let r = eta.r;
    let i = match star {
        Star::Infinity => ComponentIndex { a: r, b: 0, u: 1 },
        Star::Zero => ComponentIndex { a: 0, b: r, u: 1 },
    };
    eta.get(&i).to_vec()
}

/// ⟨v⟩ for v ∈ Z_p^× and ⟨p⟩_N^e acting componentwise.
pub fn diamond_section(c: &IgusaCarrier, v: u64, eta: &MeroSection) -> MeroSection {
    MeroSection { r: eta.r, parts: eta.parts.iter().map(|(i, x)| (*i, c.diamond(i.level(), v, x))).collect() }
}

pub fn tame_section(c: &IgusaCarrier, e: i64, eta: &MeroSection) -> MeroSection {
    MeroSection { r: eta.r, parts: eta.parts.iter().map(|(i, x)| (*i, c.tame_pow(i.level(), e, x))).collect() }
}

/// Number of components over the unit group sizes, a quick sanity figure.
pub fn component_count(p: u64, r: u32) -> usize {
    (0..=r).map(|a| unit_list(p.pow(a.min(r - a))).len()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_section(c: &IgusaCarrier, rng: &mut ChaCha8Rng) -> MeroSection {
        MeroSection::from_fn(c, |i| (0..c.dim(i.level())).map(|_| rng.gen_range(0..c.p())).collect())
    }

    /// Second transcription of U_p: each source component scatters into the targets that read it.
    fn up_scatter(c: &IgusaCarrier, eta: &MeroSection) -> MeroSection {
        let (p, r) = (c.p(), c.r());
        let mut out = MeroSection::zero(c);
        let add = |out: &mut MeroSection, t: ComponentIndex, v: Vec<u64>| {
            let slot = &mut out.parts.iter_mut().find(|(i, _)| *i == t).unwrap().1;
            *slot = vec_add(c.field(), slot, &v);
        };
        for (src, x) in &eta.parts {
            let (a, b) = (src.a, src.b);
            if b == 0 {
                add(&mut out, *src, c.frob(r, x));
            }
            // Targets (a−1, b+1, ·) read this component.
            if a == 0 {
                continue;
            }
            let (ta, tb) = (a - 1, b + 1);
            let m_t = p.pow(ta.min(tb));
            if tb <= ta {
                for t in unit_list(m_t).into_iter().filter(|t| reduce_unit(*t, p.pow(b)) == src.u) {
                    add(&mut out, ComponentIndex { a: ta, b: tb, u: t }, c.trace_down(a, x));
                }
            } else if ta + 1 == tb {
                let sum: Vec<u64> = unit_list(p.pow(tb)).into_iter().filter(|v| reduce_unit(*v, m_t) == src.u).fold(vec![0; x.len()], |acc, v| vec_add(c.field(), &acc, &c.diamond(tb, v, x)));
                add(&mut out, ComponentIndex { a: ta, b: tb, u: src.u }, sum);
            } else {
                let t = reduce_unit(src.u, m_t);
                let y = if ta + 2 == tb { c.diamond(a, src.u, x) } else { x.clone() };
                add(&mut out, ComponentIndex { a: ta, b: tb, u: t }, c.pull_up(tb - 1, &y));
            }
        }
        out
    }

    #[test]
    fn up_matches_scatter_transcription() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, r, seed) in [(3, 1, 1), (5, 2, 2), (3, 2, 3), (3, 3, 4), (5, 3, 5), (3, 4, 6)] {
            let c = IgusaCarrier::random(p, r, 2, 1, false, seed).unwrap();
            for _ in 0..3 {
                let eta = random_section(&c, &mut rng);
                assert_eq!(up_apply(&c, &eta).unwrap(), up_scatter(&c, &eta), "p={p} r={r}");
            }
        }
    }

    #[test]
    fn level_one_shape() {
        let c = IgusaCarrier::random(5, 1, 2, 1, false, 3).unwrap();
        let top = ComponentIndex { a: 1, b: 0, u: 1 };
        let other = ComponentIndex { a: 0, b: 1, u: 1 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let eta = random_section(&c, &mut rng).restrict_to(&top);
        let x = eta.get(&top);
        let out = up_apply(&c, &eta).unwrap();
        assert_eq!(out.get(&top), c.frob(1, x).as_slice());
        let expected = (1..5).fold(vec![0; x.len()], |acc, u| vec_add(c.field(), &acc, &c.diamond(1, u, x)));
        assert_eq!(out.get(&other), expected.as_slice());
        assert!(up_apply(&c, &MeroSection::zero(&c)).unwrap().is_zero());
    }

    #[test]
    fn closed_forms_match_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, r, seed) in [(3, 1, 1), (5, 1, 2), (3, 2, 3), (5, 2, 4), (3, 3, 5), (5, 3, 6)] {
            let c = IgusaCarrier::random(p, r, 2, 1, false, seed).unwrap();
            let eta = random_section(&c, &mut rng);
            for n in r..=2 * r {
                assert_eq!(up_power_closed_form(&c, &eta, n).unwrap(), iterate(&c, Star::Infinity, &eta, n).unwrap(), "U_p p={p} r={r} n={n}");
                assert_eq!(upstar_power_closed_form(&c, &eta, n).unwrap(), iterate(&c, Star::Zero, &eta, n).unwrap(), "U_p* p={p} r={r} n={n}");
            }
            assert!(up_power_closed_form(&c, &eta, r - 1).is_err() || r == 0);
        }
    }

    #[test]
    fn gamma_maps_intertwine_and_invert() {
        for (p, r, seed) in [(3, 1, 1), (5, 2, 2), (3, 3, 3)] {
            let c = IgusaCarrier::random(p, r, 2, 1, false, seed).unwrap();
            for nu in c.ordinary_basis(r) {
                let g = gamma_map(&c, Star::Infinity, nu).unwrap();
                assert_eq!(up_apply(&c, &g).unwrap(), gamma_map(&c, Star::Infinity, &c.frob(r, nu)).unwrap());
                assert_eq!(pullback_i_star(&g, Star::Infinity), *nu);
                let g0 = gamma_map(&c, Star::Zero, nu).unwrap();
                let twisted = c.tame_pow(r, -1, &c.frob(r, nu));
                assert_eq!(upstar_apply(&c, &g0).unwrap(), gamma_map(&c, Star::Zero, &twisted).unwrap());
                assert_eq!(pullback_i_star(&g0, Star::Zero), *nu);
            }
            assert!(gamma_map(&c, Star::Infinity, &c.zero(r)).unwrap().is_zero());
        }
    }

    #[test]
    fn gamma_at_level_one() {
        let c = IgusaCarrier::random(5, 1, 2, 0, false, 8).unwrap();
        let nu = c.ordinary_basis(1)[0].clone();
        let g = gamma_map(&c, Star::Infinity, &nu).unwrap();
        let back = c.frob_inverse_pow(1, 1, &nu).unwrap();
        let expected = (1..5).fold(vec![0; nu.len()], |acc, u| vec_add(c.field(), &acc, &c.diamond(1, u, &back)));
        assert_eq!(g.get(&ComponentIndex { a: 1, b: 0, u: 1 }), nu.as_slice());
        assert_eq!(g.get(&ComponentIndex { a: 0, b: 1, u: 1 }), expected.as_slice());
    }

    #[test]
    fn component_counts() {
        assert_eq!(component_count(5, 2), 6);
        assert_eq!(component_count(3, 3), 6);
    }
}
