use ellcan::series::{Budgets, Lattice, Monomial, QDiffShift, Series, Var, VarMap, Watermark};
use ellcan::theta::{ThetaArg, ThetaCtx};
use num::BigRational;
use proptest::prelude::*;

const D: i64 = 48;

fn lat() -> Lattice {
    Lattice::default()
}

prop_compose! {
    fn monomial()(q in -2i64..6, a in -3i64..4, z in -3i64..4, v in -3i64..4) -> Monomial {
        Monomial::new(q * 24, a * 24, z * 24, v * 24)
    }
}

prop_compose! {
    fn budgets()(a in 0i64..3, z in 0i64..3, v in 0i64..3) -> Budgets {
        Budgets::new(a * 12, z * 12, v * 12)
    }
}

prop_compose! {
    fn series()(
        terms in prop::collection::vec((monomial(), -3i64..4), 0..5),
        exact in prop::bool::weighted(0.2),
        w in 1i64..8,
        b in budgets(),
    ) -> Series {
        let items = terms.into_iter().map(|(m, c)| (m, BigRational::from_integer(c.into())));
        if exact {
            Series::truncated(lat(), items, Watermark::Infinite, Budgets::NONE)
        } else {
            Series::truncated(lat(), items, Watermark::Finite(w * 24), b)
        }
    }
}

/// A signed permutation of a, z, v with q-shifts of at most `cap` each.
fn signed_perm(cap: i64) -> impl Strategy<Value = VarMap> {
    (0usize..6, prop::array::uniform3(prop::bool::ANY), prop::array::uniform3(-cap..=cap)).prop_map(
        move |(p, signs, shifts)| {
            let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let vars = [Var::A, Var::Z, Var::V];
            let mut map = VarMap::identity(lat());
            for i in 0..3 {
                let mut img = Monomial::var(vars[perms[p][i]], if signs[i] { D } else { -D });
                img.q = shifts[i] * 12;
                map = map.with(vars[i], img);
            }
            map
        },
    )
}

fn agree(x: &Series, y: &Series) -> bool {
    x.equal_up_to(y).unwrap().equal
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn add_commutes(x in series(), y in series()) {
        prop_assert!(agree(&x.add(&y).unwrap(), &y.add(&x).unwrap()));
    }

    #[test]
    fn add_associates(x in series(), y in series(), z in series()) {
        let l = x.add(&y).unwrap().add(&z).unwrap();
        let r = x.add(&y.add(&z).unwrap()).unwrap();
        prop_assert!(agree(&l, &r));
    }

    #[test]
    fn mul_commutes(x in series(), y in series()) {
        prop_assert!(agree(&x.mul(&y).unwrap(), &y.mul(&x).unwrap()));
    }

    #[test]
    fn mul_associates(x in series(), y in series(), z in series()) {
        let l = x.mul(&y).unwrap().mul(&z).unwrap();
        let r = x.mul(&y.mul(&z).unwrap()).unwrap();
        prop_assert!(agree(&l, &r));
    }

    #[test]
    fn mul_distributes(x in series(), y in series(), z in series()) {
        let l = x.mul(&y.add(&z).unwrap()).unwrap();
        let r = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
        prop_assert!(agree(&l, &r));
    }

    #[test]
    fn substitution_is_multiplicative(x in series(), y in series(), map in signed_perm(0)) {
        let l = x.mul(&y).unwrap().substitute_all(&map).unwrap();
        let r = x.substitute_all(&map).unwrap().mul(&y.substitute_all(&map).unwrap()).unwrap();
        prop_assert!(agree(&l, &r));
    }

    #[test]
    fn shifted_substitution_is_multiplicative(x in series(), y in series(), map in signed_perm(1)) {
        let l = x.mul(&y).unwrap().substitute_all(&map);
        let r = x.substitute_all(&map).and_then(|a| y.substitute_all(&map).map(|b| (a, b)));
        // budgets may refuse; when admitted both sides must agree
        if let (Ok(l), Ok((a, b))) = (l, r) {
            prop_assert!(agree(&l, &a.mul(&b).unwrap()));
        }
    }

    #[test]
    fn qdiff_is_additive(
        a1 in -1i64..=1, z1 in -1i64..=1, v1 in -1i64..=1,
        a2 in -1i64..=1, z2 in -1i64..=1, v2 in -1i64..=1,
        xa in -2i64..=2, xz in -2i64..=2, xv in -2i64..=2,
    ) {
        prop_assume!(xa != 0 || xz != 0 || xv != 0);
        let u = QDiffShift::new(a1 * 12, z1 * 12, v1 * 12);
        let w = QDiffShift::new(a2 * 12, z2 * 12, v2 * 12);
        let need = u.budgets().max(&w.budgets()).max(&u.plus(&w).budgets());
        let total = Budgets::new(need.a * 2, need.z * 2, need.v * 2);
        let ctx = ThetaCtx::new(lat(), 3 * D, total);
        let t = ctx.tilde(ThetaArg::ints(lat(), 0, xa, xz, xv).unwrap()).unwrap();
        let l = t.qdiff(&u).unwrap().qdiff(&w).unwrap();
        let r = t.qdiff(&u.plus(&w)).unwrap();
        prop_assert!(agree(&l, &r));
    }

    #[test]
    fn bar_is_an_involutive_homomorphism(x in series(), y in series()) {
        prop_assert_eq!(x.bar_v().bar_v(), x.clone());
        let l = x.mul(&y).unwrap().bar_v();
        let r = x.bar_v().mul(&y.bar_v()).unwrap();
        prop_assert!(agree(&l, &r));
        prop_assert!(agree(&x.add(&y).unwrap().bar_v(), &x.bar_v().add(&y.bar_v()).unwrap()));
    }

    #[test]
    fn raising_the_order_keeps_lower_terms(
        xa in -2i64..=2, xz in -2i64..=2, xv in -2i64..=2,
        order in 1i64..4, extra in 1i64..3, b in budgets(), shift in -1i64..=1,
    ) {
        prop_assume!(xa != 0 || xz != 0 || xv != 0);
        let a = ThetaArg::ints(lat(), 0, xa, xz, xv).unwrap();
        let lo = ThetaCtx::new(lat(), order * D, b);
        let hi = ThetaCtx::new(lat(), (order + extra) * D, b);
        let small = lo.tilde(a).unwrap().mul(&lo.theta1(a).unwrap()).unwrap();
        let big = hi.tilde(a).unwrap().mul(&hi.theta1(a).unwrap()).unwrap();
        prop_assert!(agree(&small, &big));
        let t = shift * b.z;
        let ss = small.shift(Var::Z, t).unwrap();
        let bs = big.shift(Var::Z, t).unwrap();
        prop_assert!(agree(&ss, &bs));
        if let Some(w) = ss.watermark().finite() {
            for (m, c) in ss.terms() {
                prop_assert!(ss.budgets().reach(m, lat()) < w as i128 * D as i128);
                prop_assert_eq!(bs.coeff(m), c.clone());
            }
        }
    }
}
