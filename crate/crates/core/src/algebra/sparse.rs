//! Quotients of a coordinate space by sparse relations.

use std::collections::BTreeMap;

use super::ring::Field;

pub type SparseVec<E> = Vec<(usize, E)>;

/// The quotient of F^n by the span of some relations.
///
/// `free` lists the columns kept as a basis of the quotient; `image[c]` is the class of
/// column c in that basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseQuotient<E> {
    pub free: Vec<usize>,
    pub image: Vec<SparseVec<E>>,
}

fn axpy<F: Field>(f: &F, row: &mut BTreeMap<usize, F::Elem>, c: &F::Elem, other: &BTreeMap<usize, F::Elem>) {
    for (k, v) in other {
        let t = f.mul(c, v);
        let e = row.entry(*k).or_insert_with(|| f.zero());
        *e = f.add(e, &t);
        if f.is_zero(e) {
            row.remove(k);
        }
    }
}

pub fn sparse_quotient<F: Field>(f: &F, ncols: usize, relations: &[SparseVec<F::Elem>]) -> SparseQuotient<F::Elem> {
    let mut pivot_rows: BTreeMap<usize, BTreeMap<usize, F::Elem>> = BTreeMap::new();
    let mut order = Vec::new();
    for rel in relations {
        let mut row: BTreeMap<usize, F::Elem> = BTreeMap::new();
        for (c, v) in rel {
            let e = row.entry(*c).or_insert_with(|| f.zero());
            *e = f.add(e, v);
        }
        row.retain(|_, v| !f.is_zero(v));
        loop {
            let hit = row.keys().find(|k| pivot_rows.contains_key(k)).copied();
            let Some(k) = hit else { break };
            let c = f.neg(&row[&k]);
            axpy(f, &mut row, &c, &pivot_rows[&k]);
        }
        let Some((&k, v)) = row.iter().rev().min_by_key(|(_, v)| f.height(v)) else { continue };
        let inv = f.inv(v).unwrap();
        for x in row.values_mut() {
            *x = f.mul(x, &inv);
        }
        pivot_rows.insert(k, row);
        order.push(k);
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivot_rows.contains_key(c)).collect();
    let mut image: Vec<Option<SparseVec<F::Elem>>> = vec![None; ncols];
    for (i, &c) in free.iter().enumerate() {
        image[c] = Some(vec![(i, f.one())]);
    }
    // A pivot row only involves columns that became pivots later.
    for &k in order.iter().rev() {
        let mut acc: BTreeMap<usize, F::Elem> = BTreeMap::new();
        for (c, v) in &pivot_rows[&k] {
            if *c == k {
                continue;
            }
            let coef = f.neg(v);
            for (j, w) in image[*c].as_ref().expect("unresolved column") {
                let t = f.mul(&coef, w);
                let e = acc.entry(*j).or_insert_with(|| f.zero());
                *e = f.add(e, &t);
            }
        }
        image[k] = Some(acc.into_iter().filter(|(_, v)| !f.is_zero(v)).collect());
    }
    SparseQuotient { free, image: image.into_iter().map(|v| v.unwrap()).collect() }
}
