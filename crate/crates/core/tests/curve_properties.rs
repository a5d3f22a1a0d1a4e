use igusa_core::algebra::{FiniteField, Poly, PrimeField, Ring};
use igusa_core::curves::{
    cartier_apply, residue_at, CurveModel, DifferentialSpace, DivisorData, FunctionElem, MeroDifferential, RatFunc,
};
use proptest::prelude::*;

const P: u64 = 5;

fn field() -> PrimeField {
    PrimeField::new(P).unwrap()
}

/// num / Π (x − a_i)^{e_i}, so every pole is rational.
fn ratfunc(f: &PrimeField, num: &[u64], poles: &[(u64, u64)]) -> RatFunc<PrimeField> {
    let n = Poly::new(f, num.to_vec());
    let mut r = RatFunc::from_poly(n);
    for &(a, e) in poles {
        r = r.mul(&RatFunc::pole(f, &a, e));
    }
    r
}

fn coeffs() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0..P, 0..5)
}

fn poles() -> impl Strategy<Value = Vec<(u64, u64)>> {
    prop::collection::vec((0..P, 1..4u64), 0..3)
}

fn line_differential(c: &CurveModel<PrimeField>, g: RatFunc<PrimeField>) -> MeroDifferential<PrimeField> {
    let mut w = c.zero_differential();
    w.g[0] = g;
    w
}

fn elliptic() -> CurveModel<PrimeField> {
    CurveModel::elliptic(&field(), [0, 0, 0, 1, 1]).unwrap()
}

fn elliptic_function(c: &CurveModel<PrimeField>, g0: RatFunc<PrimeField>, g1: RatFunc<PrimeField>) -> FunctionElem<PrimeField> {
    c.add(&c.from_base(g0), &c.mul(&c.from_base(g1), &c.y()))
}

fn residue_sum(c: &CurveModel<PrimeField>, w: &MeroDifferential<PrimeField>) -> u64 {
    let f = c.field();
    let mut total = f.zero();
    for x in c.candidate_poles(w) {
        for pl in c.places_over(&x).unwrap() {
            total = f.add(&total, &residue_at(c, w, &pl).unwrap());
        }
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cartier_is_additive(a in coeffs(), pa in poles(), b in coeffs(), pb in poles()) {
        let f = field();
        let c = CurveModel::projective_line(&f);
        let w1 = line_differential(&c, ratfunc(&f, &a, &pa));
        let w2 = line_differential(&c, ratfunc(&f, &b, &pb));
        prop_assert_eq!(cartier_apply(&c, &w1.add(&w2)), cartier_apply(&c, &w1).add(&cartier_apply(&c, &w2)));
    }

    #[test]
    fn cartier_is_inverse_frobenius_linear(a in coeffs(), pa in poles(), b in coeffs(), pb in poles()) {
        let f = field();
        let c = CurveModel::projective_line(&f);
        let u = c.from_base(ratfunc(&f, &a, &pa));
        let w = line_differential(&c, ratfunc(&f, &b, &pb));
        let lhs = cartier_apply(&c, &c.mul_differential(&c.pow(&u, P), &w));
        prop_assert_eq!(lhs, c.mul_differential(&u, &cartier_apply(&c, &w)));
    }

    #[test]
    fn exact_differentials_are_killed(a in coeffs(), pa in poles(), b in coeffs(), pb in poles()) {
        let f = field();
        let c = CurveModel::projective_line(&f);
        let u = c.from_base(ratfunc(&f, &a, &pa));
        prop_assert!(cartier_apply(&c, &c.d(&u)).is_zero());
        let e = elliptic();
        let v = elliptic_function(&e, ratfunc(&f, &a, &pa), ratfunc(&f, &b, &pb));
        prop_assert!(cartier_apply(&e, &e.d(&v)).is_zero());
    }

    #[test]
    fn logarithmic_differentials_are_fixed(a in coeffs(), pa in poles(), b in coeffs(), pb in poles()) {
        let f = field();
        let c = CurveModel::projective_line(&f);
        let u = c.from_base(ratfunc(&f, &a, &pa));
        if let Some(w) = c.dlog(&u) {
            prop_assert_eq!(cartier_apply(&c, &w), w);
        }
        let e = elliptic();
        let v = elliptic_function(&e, ratfunc(&f, &a, &pa), ratfunc(&f, &b, &pb));
        if let Some(w) = e.dlog(&v) {
            prop_assert_eq!(cartier_apply(&e, &w), w);
        }
    }

    #[test]
    fn residues_sum_to_zero_on_the_line(a in coeffs(), pa in poles()) {
        let f = field();
        let c = CurveModel::projective_line(&f);
        let w = line_differential(&c, ratfunc(&f, &a, &pa));
        prop_assert_eq!(residue_sum(&c, &w), 0);
        prop_assert_eq!(residue_sum(&c, &cartier_apply(&c, &w)), 0);
    }

    #[test]
    fn residues_sum_to_zero_on_a_cover(v in prop::collection::vec(0..3u64, 32)) {
        let f = PrimeField::new(3).unwrap();
        let rhs = RatFunc::pole(&f, &0, 1).add(&RatFunc::x(&f).pow(2));
        let c = CurveModel::artin_schreier(&f, rhs).unwrap();
        let d = DivisorData::reduced(&c.branch_places()).multiple(3);
        let space = DifferentialSpace::new(&c, &d).unwrap();
        let w = space.from_coords(&v[..space.dim()]);
        let total = c.branch_places().iter().fold(0, |acc, pl| f.add(&acc, &residue_at(&c, &w, pl).unwrap()));
        prop_assert_eq!(total, 0);
        for pl in c.branch_places() {
            let r = residue_at(&c, &w, &pl).unwrap();
            let rv = residue_at(&c, &cartier_apply(&c, &w), &pl).unwrap();
            prop_assert_eq!(f.frob(&rv, 1), r);
        }
    }
}
