//! Property tests for the exact-arithmetic kernels: ring axioms, hull
//! properties, characteristic-polynomial and Smith-form oracles, and the
//! product inequalities that drive perturbation arguments.

use proptest::prelude::*;

use drinfeld_core::algebra::berkowitz::charpoly_reciprocal;
use drinfeld_core::algebra::matrix::PolyMatrix;
use drinfeld_core::algebra::smith::elementary_divisors;
use drinfeld_core::algebra::trunc::{TruncSeries, TruncVal};
use drinfeld_core::algebra::xpoly::{diff_valuations, newton_polygon, XPoly};
use drinfeld_core::{FieldSpec, Poly, Val};

fn f3() -> FieldSpec {
    FieldSpec::prime(3).unwrap()
}

fn poly_strategy(max_deg: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(0i64..3, 0..=max_deg + 1)
}

fn to_poly(f: &FieldSpec, coeffs: &[i64]) -> Poly {
    Poly::from_ints(f, coeffs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly_strategy(5), b in poly_strategy(5), c in poly_strategy(5)) {
        let f = f3();
        let (a, b, c) = (to_poly(&f, &a), to_poly(&f, &b), to_poly(&f, &c));
        // associativity and distributivity
        prop_assert_eq!(a.mul(&b, &f).mul(&c, &f), a.mul(&b.mul(&c, &f), &f));
        prop_assert_eq!(
            a.mul(&b.add(&c, &f), &f),
            a.mul(&b, &f).add(&a.mul(&c, &f), &f)
        );
        prop_assert_eq!(a.add(&b, &f).sub(&b, &f), a.clone());
    }

    #[test]
    fn divrem_identity(a in poly_strategy(7), b in poly_strategy(4)) {
        let f = f3();
        let a = to_poly(&f, &a);
        let b = to_poly(&f, &b);
        prop_assume!(!b.is_zero());
        let (q, r) = a.divrem(&b, &f).unwrap();
        prop_assert_eq!(q.mul(&b, &f).add(&r, &f), a);
        if let Some(rd) = r.degree() {
            prop_assert!(rd < b.degree().unwrap());
        }
    }

    #[test]
    fn charpoly_against_leibniz(entries in proptest::collection::vec(poly_strategy(2), 9)) {
        let f = f3();
        let m = PolyMatrix::from_fn(3, 3, |i, j| to_poly(&f, &entries[3 * i + j]));
        let cp = charpoly_reciprocal(&m, &f).unwrap();
        prop_assert_eq!(cp, leibniz_reciprocal(&m, &f));
    }

    #[test]
    fn newton_polygon_hull_property(coeffs in proptest::collection::vec((0i64..3, 0usize..8), 1..8)) {
        let f = f3();
        let p = XPoly::from_coeffs(
            coeffs
                .iter()
                .map(|&(c, v)| Poly::from_ints(&f, &[c]).mul(&Poly::one(&f).shift_up(v), &f))
                .collect(),
        );
        prop_assume!(!p.is_zero());
        let np = newton_polygon(&p, &f).unwrap();
        prop_assert_eq!(np.total_length(), np.end_index() - np.start_index());
        // every finite point lies on or above the hull
        let mut x0 = np.start_index() as i128;
        let verts = np.vertices();
        let mut y0 = verts[0].1 as i128;
        let mut checked = 0;
        for &(slope, len) in np.segments() {
            let x1 = x0 + len as i128;
            for (l, c) in p.coeffs().iter().enumerate() {
                if let Val::Fin(v) = c.t_valuation() {
                    let l = l as i128;
                    if l >= x0 && l <= x1 {
                        let lhs = (v as i128 - y0) * slope.den() as i128;
                        let rhs = slope.num() as i128 * (l - x0);
                        prop_assert!(lhs >= rhs);
                        checked += 1;
                    }
                }
            }
            y0 += slope.num() as i128 * len as i128 / slope.den() as i128;
            x0 = x1;
        }
        let _ = checked;
    }

    #[test]
    fn eldiv_unimodular_invariance_and_minors(
        powers in proptest::collection::vec(0usize..4, 3),
        g_entries in proptest::collection::vec(poly_strategy(2), 9),
        h_entries in proptest::collection::vec(poly_strategy(2), 9),
    ) {
        let f = f3();
        let mut m = PolyMatrix::zero(3, 3);
        for (i, &p) in powers.iter().enumerate() {
            *m.at_mut(i, i) = Poly::one(&f).shift_up(p);
        }
        // force constant-term-invertible transforms: unit triangulars
        let mut g = PolyMatrix::identity(3, &f);
        let mut h = PolyMatrix::identity(3, &f);
        for i in 0..3 {
            for j in 0..3 {
                if i < j {
                    *g.at_mut(i, j) = to_poly(&f, &g_entries[3 * i + j]);
                }
                if i > j {
                    *h.at_mut(i, j) = to_poly(&f, &h_entries[3 * i + j]);
                }
            }
        }
        let prod = g.mul(&m, &f).mul(&h, &f);
        let cap = powers.iter().max().unwrap() + 2;
        let expect: Vec<TruncVal> = {
            let mut sorted = powers.clone();
            sorted.sort();
            sorted.into_iter().map(TruncVal::Exact).collect()
        };
        prop_assert_eq!(elementary_divisors(&prod, &f, cap), expect.clone());
        // gcd-of-minors oracle on the transformed matrix
        prop_assert_eq!(minors_oracle(&prod, &f, cap), expect);
    }

    #[test]
    fn kedlaya_product_domination(
        a_entries in proptest::collection::vec(poly_strategy(3), 9),
        b_entries in proptest::collection::vec(poly_strategy(3), 9),
    ) {
        let f = f3();
        let a = PolyMatrix::from_fn(3, 3, |i, j| to_poly(&f, &a_entries[3 * i + j]));
        let b = PolyMatrix::from_fn(3, 3, |i, j| to_poly(&f, &b_entries[3 * i + j]));
        let cap = 12;
        let sa = elementary_divisors(&a, &f, cap);
        for prod in [a.mul(&b, &f), b.mul(&a, &f)] {
            let sp = elementary_divisors(&prod, &f, cap);
            for (s, sp) in sa.iter().zip(sp.iter()) {
                prop_assert!(sp.lower_bound() >= s.lower_bound().min(cap));
            }
        }
    }

    #[test]
    fn diff_valuations_symmetry_and_unit_invariance(
        r1 in poly_strategy(3),
        r2 in poly_strategy(3),
        r3 in poly_strategy(3),
    ) {
        let f = f3();
        let linear = |a: &Poly| XPoly::from_coeffs(vec![a.neg(&f), Poly::one(&f)]);
        let p1 = linear(&to_poly(&f, &r1)).mul(&linear(&to_poly(&f, &r2)), &f);
        let p2 = linear(&to_poly(&f, &r3));
        let d12 = diff_valuations(&p1, &p2, &f).unwrap();
        let d21 = diff_valuations(&p2, &p1, &f).unwrap();
        prop_assert_eq!(d12.valuations(), d21.valuations());
        prop_assert_eq!(d12.coincident, d21.coincident);
        // unit rescaling changes nothing
        let two = Poly::from_ints(&f, &[2]);
        let d_scaled = diff_valuations(&p1.scale(&two, &f), &p2, &f).unwrap();
        prop_assert_eq!(d_scaled.valuations(), d12.valuations());
    }

    #[test]
    fn trunc_series_division(u in poly_strategy(4), v in poly_strategy(4), shift in 0usize..3) {
        let f = f3();
        let u = to_poly(&f, &u);
        let v = to_poly(&f, &v);
        prop_assume!(!u.is_zero() && !v.is_zero());
        prop_assume!(!u.coeff(0).is_zero() && !v.coeff(0).is_zero());
        let prec = 10;
        let a = TruncSeries::from_poly(&u.shift_up(shift), prec);
        let b = TruncSeries::from_poly(&v, prec);
        let q = a.div(&b, &f).unwrap();
        prop_assert_eq!(q.mul(&b.with_prec(q.prec()), &f), a.with_prec(q.prec()));
    }
}

/// Brute-force reciprocal characteristic polynomial: Leibniz expansion of
/// det(I − MX) over F_q\[t\]\[X\].
fn leibniz_reciprocal(m: &PolyMatrix, f: &FieldSpec) -> XPoly {
    let n = m.rows();
    let x = XPoly::from_coeffs(vec![Poly::zero(), Poly::one(f)]);
    let entry = |i: usize, j: usize| -> XPoly {
        let mx = XPoly::from_coeffs(vec![m.at(i, j).clone()]).mul(&x, f).neg(f);
        if i == j {
            XPoly::one(f).add(&mx, f)
        } else {
            mx
        }
    };
    let mut acc = XPoly::zero();
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p, sign| {
        let mut term = XPoly::one(f);
        for (i, &j) in p.iter().enumerate() {
            term = term.mul(&entry(i, j), f);
        }
        if sign < 0 {
            term = term.neg(f);
        }
        acc = acc.add(&term, f);
    });
    acc
}

fn permute(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize], i32)) {
    let n = perm.len();
    if k == n {
        // compute sign by counting inversions
        let mut sign = 1;
        for i in 0..n {
            for j in i + 1..n {
                if perm[i] > perm[j] {
                    sign = -sign;
                }
            }
        }
        visit(perm, sign);
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

/// Elementary divisors through the gcd-of-minors definition: s_i equals the
/// difference of successive minimal minor valuations.
fn minors_oracle(m: &PolyMatrix, f: &FieldSpec, cap: usize) -> Vec<TruncVal> {
    let n = m.rows();
    let mut prev = 0i64;
    let mut out = Vec::new();
    for size in 1..=n {
        let mut best: Option<u64> = None;
        for rows in combinations(n, size) {
            for cols in combinations(n, size) {
                let sub = PolyMatrix::from_fn(size, size, |i, j| m.at(rows[i], cols[j]).clone());
                let det = sub.det_bareiss(f).unwrap();
                if let Val::Fin(v) = det.t_valuation() {
                    best = Some(best.map_or(v, |b: u64| b.min(v)));
                }
            }
        }
        // s_i = δ_i − δ_{i−1}; the divisors ascend, so once a difference
        // reaches the cap (or the minors vanish) every later one saturates.
        match best {
            Some(v) if (v as i64 - prev) < cap as i64 => {
                out.push(TruncVal::Exact((v as i64 - prev) as usize));
                prev = v as i64;
            }
            _ => {
                while out.len() < n {
                    out.push(TruncVal::AtLeast(cap));
                }
                return out;
            }
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
