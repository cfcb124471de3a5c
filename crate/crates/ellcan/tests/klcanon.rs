use ellcan::geometry::stab::stab_ell;
use ellcan::geometry::{hilb2_model, LaurentFraction, LaurentMatrix, Point, Slope, SlopeKind};
use ellcan::klcanon::{
    bar_apply, canonical_basis, canonical_closed_form, canonical_solve, canonical_wall, check_canonical,
    check_wall_form, default_window, label_of, transition, transition_closed_form, wall_crossing_map, xi_classes, BarData, CanLabel,
};
use ellcan::report::all_passed;
use ellcan::series::{Lattice, Monomial, Series};
use num::rational::Ratio;

const D: i64 = 48;

fn lat() -> Lattice {
    Lattice::default()
}

fn slope(n: i64, d: i64) -> Slope {
    Slope::new(lat(), Ratio::new(n, d)).unwrap()
}

/// `(coeff, a, z, v)` with integer exponents.
fn ints(terms: &[(i64, i64, i64, i64)]) -> Series {
    Series::exact(lat(), terms.iter().map(|&(c, a, z, v)| (c, Monomial::new(0, a * D, z * D, v * D))))
}

fn poly(terms: &[(i64, i64, i64, i64)]) -> LaurentFraction {
    LaurentFraction::poly(ints(terms)).unwrap()
}

fn frac(num: &[(i64, i64, i64, i64)], den: &[(i64, i64, i64, i64)]) -> LaurentFraction {
    LaurentFraction::new(ints(num), ints(den)).unwrap()
}

fn bar_data(s: Slope) -> BarData {
    BarData::at_slope(&hilb2_model(), &stab_ell(lat()), s).unwrap()
}

/// `E^{-1} S` at a generic slope, with `t = -1` for the positive chamber and
/// `t = +1` for `-v S^-`.
fn generic_transition(s: Slope, t: i64) -> LaurentMatrix {
    let m = s.floor();
    let (up, down) = if s.lower_half() { (-2 * m - 1, 2 * m - 1) } else { (-2 * m - 3, 2 * m + 1) };
    LaurentMatrix::from_columns(
        [poly(&[(1, 0, 0, 0)]), poly(&[(-1, down, 0, t)])],
        [poly(&[(-1, up, 0, t)]), poly(&[(1, 0, 0, 0)])],
    )
}

fn integer_wall_transition(m: i64, t: i64) -> LaurentMatrix {
    LaurentMatrix::from_columns(
        [
            frac(&[(1, 0, 0, 0), (-1, -1, -1, 2 * t)], &[(1, 0, 0, 0), (-1, 0, -2, t)]),
            frac(&[(-1, 2 * m - 1, 0, t), (1, 2 * m, -1, t)], &[(1, 0, 0, 0), (-1, 0, -2, t)]),
        ],
        [
            frac(&[(-1, -2 * m - 1, 0, t), (1, -2 * m, -1, -t)], &[(1, 0, 0, 0), (-1, 0, -2, -t)]),
            frac(&[(1, 0, 0, 0), (-1, -1, -1, 0)], &[(1, 0, 0, 0), (-1, 0, -2, -t)]),
        ],
    )
}

fn half_wall_transition(m: i64, t: i64) -> LaurentMatrix {
    LaurentMatrix::from_columns(
        [
            frac(&[(1, 0, 0, 0), (1, -2, -2, 2 * t)], &[(1, 0, 0, 0), (-1, 0, -2, t)]),
            frac(&[(-1, 2 * m + 1, 0, t)], &[(1, 0, 0, 0), (-1, 0, -2, t)]),
        ],
        [
            frac(&[(-1, -2 * m - 3, 0, t), (-1, -2 * m - 1, -2, -t)], &[(1, 0, 0, 0), (-1, 0, -2, -t)]),
            frac(&[(1, 0, 0, 0)], &[(1, 0, 0, 0), (-1, 0, -2, -t)]),
        ],
    )
}

fn minus_v_opposite(bd: &BarData) -> LaurentMatrix {
    bd.s_minus.scale(&poly(&[(-1, 0, 0, 1)]))
}

#[test]
fn quarter_slope_basis() {
    let s = slope(1, 4);
    let sol = canonical_solve(&bar_data(s), default_window(s)).unwrap();
    assert_eq!(sol.basis.column(0), [poly(&[(1, 1, 0, 0)]), poly(&[(1, 0, 0, 0)])]);
    assert_eq!(sol.basis.column(1), [poly(&[(1, 0, 0, 1)]), poly(&[(1, 1, 0, 1)])]);
}

#[test]
fn solver_matches_closed_forms_and_transitions() {
    for (n, d) in [(1, 4), (3, 4), (-1, 4), (-3, 4), (5, 4), (-5, 4), (7, 4), (1, 8), (-7, 3), (9, 4)] {
        let s = slope(n, d);
        let bd = bar_data(s);
        let sol = canonical_solve(&bd, default_window(s)).unwrap();
        assert_eq!(sol.basis, canonical_closed_form(s).unwrap(), "s={s}\n{}", sol.basis);
        assert_eq!(sol.transition, generic_transition(s, -1), "s={s}\n{}", sol.transition);
        let opp = transition(&sol.basis, &minus_v_opposite(&bd)).unwrap();
        assert_eq!(opp, generic_transition(s, 1), "s={s}\n{opp}");
        assert!(all_passed(&check_canonical(&bd, &sol.basis).unwrap()));
    }
}

#[test]
fn too_small_window_has_no_solution() {
    let s = slope(9, 4);
    assert!(canonical_solve(&bar_data(s), 0).is_err());
}

#[test]
fn bar_is_an_involution() {
    for (n, d) in [(1, 4), (-5, 4), (1, 1), (1, 2)] {
        let bd = bar_data(slope(n, d));
        let r = bd.bar_matrix().unwrap();
        assert_eq!(r.mul(&r.bar_v()), LaurentMatrix::identity(lat()), "s={}", bd.slope);
    }
}

#[test]
fn bar_moves_a_generic_class() {
    let bd = bar_data(slope(1, 4));
    let x = [poly(&[(1, 0, 0, 1), (2, 1, 0, -1)]), poly(&[(1, -1, 0, 0)])];
    let once = bar_apply(&bd, &x).unwrap();
    assert_ne!(once, x);
    assert_eq!(bar_apply(&bd, &once).unwrap(), x);
}

#[test]
fn wall_bases_and_transitions() {
    for m in [-2, -1, 0, 1, 2] {
        let s = slope(m, 1);
        let bd = bar_data(s);
        let e = canonical_wall(s).unwrap();
        assert!(all_passed(&check_canonical(&bd, &e).unwrap()), "s={s}");
        assert_eq!(transition(&e, &bd.s_plus).unwrap(), integer_wall_transition(m, -1), "s={s}");
        assert_eq!(transition(&e, &minus_v_opposite(&bd)).unwrap(), integer_wall_transition(m, 1), "s={s}");

        let s = slope(2 * m + 1, 2);
        let bd = bar_data(s);
        let e = canonical_wall(s).unwrap();
        assert!(all_passed(&check_canonical(&bd, &e).unwrap()), "s={s}");
        assert_eq!(transition(&e, &bd.s_plus).unwrap(), half_wall_transition(m, -1), "s={s}");
        assert_eq!(transition(&e, &minus_v_opposite(&bd)).unwrap(), half_wall_transition(m, 1), "s={s}");
    }
}

#[test]
fn wall_form_holds() {
    let model = hilb2_model();
    for k in -4..=4 {
        let s = slope(k, 2);
        let bd = bar_data(s);
        let plus = canonical_basis(slope(4 * k + 1, 8)).unwrap();
        let minus = canonical_basis(slope(4 * k - 1, 8)).unwrap();
        let out = check_wall_form(&model, &bd, &canonical_wall(s).unwrap(), &plus, &minus).unwrap();
        assert!(all_passed(&out), "s={s}: {out:?}");
    }
}

#[test]
fn wall_term_at_zero() {
    // E_0([2]) = E_0+([2]) - z^-1 (1, a) and (1, a) = v^-1 E_0+([1,1])
    let e = canonical_wall(slope(0, 1)).unwrap();
    let plus = canonical_closed_form(slope(1, 8)).unwrap();
    assert_eq!(e.column(0)[1], poly(&[(1, 0, 0, 0), (-1, 1, -1, 0)]));
    let w = [poly(&[(1, 0, 0, 0)]), poly(&[(1, 1, 0, 0)])];
    let c = plus.inverse().unwrap().apply(&w);
    assert_eq!(c, [poly(&[]), poly(&[(1, 0, 0, -1)])]);
}

#[test]
fn labels_of_quarter_slope_basis() {
    let model = hilb2_model();
    let e = canonical_closed_form(slope(1, 4)).unwrap();
    assert_eq!(label_of(&model, &e.column(0)), Some((1, CanLabel { eps: 1, m: -1, n: -1 })));
    assert_eq!(label_of(&model, &e.column(1)), Some((1, CanLabel { eps: 0, m: -1, n: 0 })));
    assert_eq!(label_of(&model, &[poly(&[(1, 0, 0, 0)]), poly(&[(1, 1, 0, 1), (1, 0, 0, 0)])]), None);
}

#[test]
fn periodicity_of_labels() {
    let model = hilb2_model();
    for (n, d) in [(1, 4), (3, 4), (-1, 4)] {
        let e0 = canonical_closed_form(slope(n, d)).unwrap();
        let e1 = canonical_closed_form(slope(n + d, d)).unwrap();
        for p in Point::ALL {
            let (_, l0) = label_of(&model, &e0.column(p.index())).unwrap();
            let (_, l1) = label_of(&model, &e1.column(p.index())).unwrap();
            assert_eq!((l1.eps, l1.n - l0.n, (l1.m - l0.m).abs()), (l0.eps, 1, 1), "{p} s={n}/{d}");
        }
    }
}

#[test]
fn wall_crossing_generators() {
    let model = hilb2_model();
    for m in -3..=3 {
        let w = wall_crossing_map(&model, slope(m, 1)).unwrap();
        let two = w[Point::Two.index()];
        assert_eq!((two.plus.eps, two.plus.n, two.minus.eps, two.minus.n), (1, m - 1, -1, m), "s={m}");
        assert_eq!(two.plus.m, two.minus.m);
        let oo = w[Point::OneOne.index()];
        assert_eq!((oo.plus.eps, oo.minus.eps, oo.minus.n - oo.plus.n), (0, 0, -1), "s={m}");
        assert_eq!(oo.plus.m, oo.minus.m);

        let w = wall_crossing_map(&model, slope(2 * m + 1, 2)).unwrap();
        let two = w[Point::Two.index()];
        assert_eq!((two.beta_max, two.plus), (0, two.minus));
        let oo = w[Point::OneOne.index()];
        assert_eq!((oo.plus.eps, oo.minus.eps, oo.minus.n - oo.plus.n, oo.sign), (-1, 1, -2, 1), "s={m}+1/2");
        assert_eq!(oo.plus.m, oo.minus.m);
    }
}

#[test]
fn index_set_has_two_classes() {
    let model = hilb2_model();
    let xi = xi_classes(&model, lat(), 3).unwrap();
    assert_eq!(xi.classes.len(), 2);
    let eps0 = xi.class_of(&CanLabel { eps: 0, m: 0, n: 0 }).unwrap();
    let eps1 = xi.class_of(&CanLabel { eps: 1, m: 0, n: 0 }).unwrap();
    assert_ne!(eps0, eps1);
    assert_eq!(xi.class_of(&CanLabel { eps: -1, m: 2, n: -3 }), Some(eps1));
    assert_eq!(xi.iota[eps0], Some(Point::OneOne));
    assert_eq!(xi.iota[eps1], Some(Point::Two));
}

#[test]
fn distant_labels_are_related() {
    let model = hilb2_model();
    let xi = xi_classes(&model, lat(), 6).unwrap();
    let a = xi.class_of(&CanLabel { eps: 1, m: 0, n: 0 }).unwrap();
    assert_eq!(xi.class_of(&CanLabel { eps: -1, m: 0, n: -5 }), Some(a));
}

#[test]
fn library_transitions_match_displays() {
    for (n, d) in [(1, 4), (3, 4), (-5, 4), (0, 1), (2, 1), (1, 2), (-3, 2)] {
        let s = slope(n, d);
        let (plus, minus) = match s.kind() {
            SlopeKind::Generic => (generic_transition(s, -1), generic_transition(s, 1)),
            SlopeKind::IntegerWall => (integer_wall_transition(s.floor(), -1), integer_wall_transition(s.floor(), 1)),
            SlopeKind::HalfIntegerWall => (half_wall_transition(s.floor(), -1), half_wall_transition(s.floor(), 1)),
        };
        assert_eq!(transition_closed_form(s, false), plus, "s={s}");
        assert_eq!(transition_closed_form(s, true), minus, "s={s}");
        assert_eq!(ellcan::klcanon::minus_v_opposite(&bar_data(s)), minus_v_opposite(&bar_data(s)));
    }
}
