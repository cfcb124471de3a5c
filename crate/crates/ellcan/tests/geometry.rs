use ellcan::geometry::laurent::exact_div;
use ellcan::geometry::stab::{
    check_normalization, check_sigma_duality, check_stab_qdiff, k_limit, k_stab, k_stab_closed_form, k_stab_opposite,
    stab_dual, stab_ell, stab_opposite,
};
use ellcan::geometry::{
    check_dual_pair_axioms, flop_pair_model, hilb2_model, Kappa, LaurentFraction, Point, ShiftVar, Slope, SlopeKind,
    Weight,
};
use ellcan::report::all_passed;
use ellcan::series::{Lattice, Monomial, Series, Var};
use ellcan::theta::{ThetaArg, ThetaCtx, ThetaExpr};
use num::rational::Ratio;

const D: i64 = 48;

fn lat() -> Lattice {
    Lattice::default()
}

fn arg(a: i64, z: i64, v: i64) -> ThetaArg {
    ThetaArg::ints(lat(), 0, a, z, v).unwrap()
}

fn slope(n: i64, d: i64) -> Slope {
    Slope::new(lat(), Ratio::new(n, d)).unwrap()
}

/// Laurent polynomial from `(coeff, a, z, v)` with exponents in units of 1/2.
fn halves(terms: &[(i64, i64, i64, i64)]) -> Series {
    Series::exact(lat(), terms.iter().map(|&(c, a, z, v)| (c, Monomial::new(0, a * D / 2, z * D / 2, v * D / 2))))
}

fn lf(num: &[(i64, i64, i64, i64)], den: &[(i64, i64, i64, i64)]) -> LaurentFraction {
    LaurentFraction::new(halves(num), halves(den)).unwrap()
}

fn poly(num: &[(i64, i64, i64, i64)]) -> LaurentFraction {
    lf(num, &[(1, 0, 0, 0)])
}

#[test]
fn hilb2_fixed_point_data() {
    let m = hilb2_model();
    assert_eq!(m.x.line[Point::Two.index()], Weight::new(2, -1));
    assert_eq!(m.x.line[Point::OneOne.index()], Weight::new(2, 1));
    assert_eq!(m.x.n_minus(Point::Two), vec![Weight::new(0, -2)]);
    assert_eq!(m.x.n_plus(Point::Two), vec![Weight::new(-2, 2)]);
    assert_eq!(m.x.n_minus(Point::OneOne), vec![Weight::new(-2, -2)]);
    assert_eq!(m.x.n_plus(Point::OneOne), vec![Weight::new(0, 2)]);
    assert_eq!(m.to_dual(Point::Two), Point::OneOne);
    for p in Point::ALL {
        assert_eq!(m.sigma(p), 1, "{p}");
    }
}

#[test]
fn polarization_reproduces_tangent_space() {
    let m = hilb2_model();
    // det T^{1/2} = v^{-4} a^3 O(1)
    for p in Point::ALL {
        let det = m.x.polarization[p.index()].det();
        assert_eq!(det, m.x.line_bundle(p, 1, 3) * Weight::new(-4, 0), "{p}");
    }
    let check = check_dual_pair_axioms(&m);
    assert!(check.iter().filter(|c| c.check.contains("T^1/2 +")).all(|c| c.passed()));
}

#[test]
fn self_dual_pair_axioms_hold() {
    let out = check_dual_pair_axioms(&hilb2_model());
    assert!(all_passed(&out), "{out:#?}");
}

#[test]
fn flop_pair_axioms_hold() {
    let out = check_dual_pair_axioms(&flop_pair_model());
    assert!(all_passed(&out), "{out:#?}");
}

#[test]
fn altered_kappa_is_rejected() {
    let out = check_dual_pair_axioms(&hilb2_model().with_kappa(Kappa { lambda: 1, alpha: 2 }));
    let failed: Vec<_> = out.iter().filter(|c| !c.passed()).map(|c| c.check.as_str()).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| c.contains("det T^1/2")), "{failed:?}");
}

#[test]
fn stab_entries_match_display() {
    let s = stab_ell(lat());
    assert_eq!(*s.entry(Point::Two, Point::Two), ThetaExpr::thetas(&[arg(-2, 0, 0), arg(0, -2, -2)]));
    assert!(s.entry(Point::Two, Point::OneOne).is_zero());
    assert_eq!(*s.entry(Point::OneOne, Point::OneOne), ThetaExpr::thetas(&[arg(-2, 0, -2), arg(0, -2, 0)]));
    assert_eq!(s.entry(Point::OneOne, Point::Two).den, {
        let mut d = vec![arg(1, 0, -1), arg(0, 1, 1)];
        d.sort();
        d
    });
}

#[test]
fn diagonal_normalization() {
    let out = check_normalization(&hilb2_model(), &stab_ell(lat()), &ThetaCtx::plain(lat(), 2)).unwrap();
    assert!(all_passed(&out), "{out:#?}");
}

#[test]
fn opposite_chamber_entries() {
    let s = stab_opposite(&hilb2_model(), &stab_ell(lat())).unwrap();
    assert!(s.entry(Point::OneOne, Point::Two).is_zero());
    assert_eq!(*s.entry(Point::OneOne, Point::OneOne), ThetaExpr::thetas(&[arg(2, 0, 0), arg(0, -2, -2)]));
    assert_eq!(*s.entry(Point::Two, Point::Two), ThetaExpr::thetas(&[arg(2, 0, -2), arg(0, -2, 0)]));
    let off = s.entry(Point::Two, Point::OneOne);
    let want = ThetaExpr::thetas(&[arg(0, 0, -2)])
        .mul(&ThetaExpr::thetas(&[arg(2, 0, 0), arg(1, 2, 1), arg(0, 1, -1)]).add(&ThetaExpr::thetas(&[
            arg(1, 0, -1),
            arg(2, 1, 1),
            arg(0, -2, 0),
        ])))
        .over(&[arg(-1, 0, -1), arg(0, 1, 1)]);
    assert_eq!(*off, want);
    let back = stab_opposite(&hilb2_model(), &s).unwrap();
    assert_eq!(back, stab_ell(lat()));
}

#[test]
fn opposite_normalization_on_flop_pair() {
    let s = stab_opposite(&hilb2_model(), &stab_ell(lat())).unwrap();
    let out = check_normalization(&flop_pair_model(), &s, &ThetaCtx::plain(lat(), 2));
    let out = out.unwrap();
    // the vanishing entry sits above the diagonal on this side
    assert!(out[..2].iter().all(|c| c.passed()), "{out:#?}");
}

#[test]
fn qdiff_factors_for_off_diagonal_entry() {
    let m = hilb2_model();
    let f = |v| ellcan::geometry::stab::qdiff_factor(&m, v, 1, Point::Two, Point::OneOne, lat());
    assert_eq!(f(ShiftVar::A), Monomial::new(0, 0, 2 * D, 0));
    assert_eq!(f(ShiftVar::Z), Monomial::new(0, 2 * D, 0, 0));
    assert_eq!(f(ShiftVar::V), Monomial::new(-2 * D, 0, 0, -4 * D));
}

#[test]
fn stab_qdiff_unit_shifts() {
    let m = hilb2_model();
    let s = stab_ell(lat());
    for var in ShiftVar::ALL {
        for k in [1, -1] {
            let out = check_stab_qdiff(&m, &s, var, k, 2).unwrap();
            assert!(all_passed(&out), "{var:?} {k}: {out:#?}");
        }
    }
}

#[test]
fn stab_qdiff_detects_wrong_factor() {
    // swapping the roles of a and z in the model breaks the equations
    let mut m = hilb2_model();
    m.dual.line = [Weight::new(2, 1), Weight::new(2, -1)];
    let out = check_stab_qdiff(&m, &stab_ell(lat()), ShiftVar::A, 1, 2).unwrap();
    assert!(!all_passed(&out));
}

#[test]
fn sigma_duality_all_pairs() {
    let s = stab_ell(lat());
    let out = check_sigma_duality(&hilb2_model(), &s, &stab_dual(&s).unwrap(), &ThetaCtx::plain(lat(), 2)).unwrap();
    assert_eq!(out.len(), 4);
    assert!(all_passed(&out), "{out:#?}");
}

#[test]
fn slope_classification() {
    assert_eq!(slope(1, 4).kind(), SlopeKind::Generic);
    assert_eq!(slope(-3, 4).kind(), SlopeKind::Generic);
    assert_eq!(slope(0, 1).kind(), SlopeKind::IntegerWall);
    assert_eq!(slope(-1, 1).kind(), SlopeKind::IntegerWall);
    assert_eq!(slope(1, 2).kind(), SlopeKind::HalfIntegerWall);
    assert_eq!(slope(-3, 2).kind(), SlopeKind::HalfIntegerWall);
    assert_eq!(slope(-3, 4).floor(), -1);
    assert!(Slope::new(lat(), Ratio::new(1, 7)).is_err());
}

#[test]
fn limit_rule() {
    // theta(x y) / theta(y) with x = a, y = z^{-1}, so delta_z^{-s} sends y to y q^s
    let e = ThetaExpr::thetas(&[arg(1, -1, 0)]).over(&[arg(0, -1, 0)]);
    let x_pow = |k2: i64| poly(&[(1, k2, 0, 0)]);
    assert_eq!(k_limit(&e, slope(1, 4)).unwrap(), x_pow(-1));
    assert_eq!(k_limit(&e, slope(3, 4)).unwrap(), x_pow(-1));
    assert_eq!(k_limit(&e, slope(-3, 4)).unwrap(), x_pow(1));
    assert_eq!(k_limit(&e, slope(7, 4)).unwrap(), x_pow(-3));
    // integer s: x^{-s-1/2} (1 - x y) / (1 - y)
    let wall = |s: i64| lf(&[(1, 0, 0, 0), (-1, 2, -2, 0)], &[(1, 0, 0, 0), (-1, 0, -2, 0)]).mul(&x_pow(-2 * s - 1));
    for s in [-1, 0, 1, 2] {
        assert_eq!(k_limit(&e, slope(s, 1)).unwrap(), wall(s), "s={s}");
    }
    let same = ThetaExpr::thetas(&[arg(1, -1, 0)]).over(&[arg(1, -1, 0)]);
    assert_eq!(k_limit(&same, slope(1, 3)).unwrap(), poly(&[(1, 0, 0, 0)]));
}

#[test]
fn limit_divergence_is_reported() {
    // theta(y q^s) grows like q^{-s/2} and worse
    let e = ThetaExpr::thetas(&[arg(0, -1, 0), arg(0, -1, 0)]);
    assert!(k_limit(&e, slope(3, 2)).is_err());
}

#[test]
fn k_stab_quarter_slope() {
    let k = k_stab(&hilb2_model(), &stab_ell(lat()), slope(1, 4)).unwrap();
    let col = k.column(Point::Two.index());
    assert_eq!(col[0], poly(&[(1, 2, 0, 0), (-1, -2, 0, 0)]));
    assert!(col[1].is_zero());
}

#[test]
fn k_stab_integer_wall_entry() {
    let k = k_stab(&hilb2_model(), &stab_ell(lat()), slope(0, 1)).unwrap();
    // (a - a^{-1})(1 - v^{-2} z^{-2}) / (1 - v^{-1} z^{-2})
    let want = lf(
        &[(1, 2, 0, 0), (-1, -2, 0, 0), (-1, 2, -4, -4), (1, -2, -4, -4)],
        &[(1, 0, 0, 0), (-1, 0, -4, -2)],
    );
    assert_eq!(*k.get(0, 0), want);
}

#[test]
fn k_stab_half_wall_entry() {
    let k = k_stab(&hilb2_model(), &stab_ell(lat()), slope(1, 2)).unwrap();
    // v a^{-1} (v - v^{-1}) (a^{-1} + z^{-1}) (1 - a z^{-1}) / (1 - v z^{-2})
    let num = poly(&[(1, -2, 0, 2)])
        .mul(&poly(&[(1, 0, 0, 2), (-1, 0, 0, -2)]))
        .mul(&poly(&[(1, -2, 0, 0), (1, 0, -2, 0)]))
        .mul(&poly(&[(1, 0, 0, 0), (-1, 2, -2, 0)]));
    let want = num.div(&poly(&[(1, 0, 0, 0), (-1, 0, -4, 2)])).unwrap();
    assert_eq!(*k.get(0, 1), want);
}

#[test]
fn k_stab_matches_closed_forms() {
    let m = hilb2_model();
    let s = stab_ell(lat());
    for (n, d) in [(-1, 1), (-3, 4), (-1, 2), (-1, 4), (0, 1), (1, 4), (1, 2), (3, 4), (1, 1), (3, 2), (5, 4), (-5, 2), (7, 3)] {
        let sl = slope(n, d);
        let k = k_stab(&m, &s, sl).unwrap();
        assert_eq!(k, k_stab_closed_form(sl), "s={sl}\n{k}");
    }
}

#[test]
fn generic_limits_are_kahler_independent() {
    let m = hilb2_model();
    let s = stab_ell(lat());
    for (n, d) in [(1, 4), (3, 4), (-5, 4), (1, 3), (5, 6)] {
        let k = k_stab(&m, &s, slope(n, d)).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert!(k.get(r, c).free_of(Var::Z), "s={n}/{d}");
                assert!(k.get(r, c).as_polynomial().is_some());
            }
        }
    }
}

#[test]
fn wall_denominators() {
    let m = hilb2_model();
    let s = stab_ell(lat());
    let walls = [halves(&[(1, 0, 0, 0), (-1, 0, -4, 2)]), halves(&[(1, 0, 0, 0), (-1, 0, -4, -2)])];
    for (n, d) in [(0, 1), (1, 2), (-1, 1), (3, 2)] {
        let k = k_stab(&m, &s, slope(n, d)).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let e = k.get(r, c);
                // every denominator divides a power of the two wall factors
                let w = walls[0].mul(&walls[1]).unwrap();
                assert!(exact_div(&w.mul(&w).unwrap(), e.den()).is_some(), "s={n}/{d} ({r},{c}): {e}");
            }
        }
    }
}

#[test]
fn unit_periodicity() {
    let m = hilb2_model();
    let s = stab_ell(lat());
    let v2 = Monomial::new(0, 0, 0, 2 * D);
    for (n, d) in [(1, 4), (3, 4), (0, 1), (1, 2)] {
        let k0 = k_stab(&m, &s, slope(n, d)).unwrap();
        let k1 = k_stab(&m, &s, slope(n + d, d)).unwrap();
        // the [2] column scales by v^2; the [1,1] column also picks up a^{-2} on top
        assert_eq!(*k1.get(0, 0), k0.get(0, 0).mul_monomial(&v2, 1));
        assert_eq!(*k1.get(1, 1), k0.get(1, 1).mul_monomial(&v2, 1));
        assert_eq!(*k1.get(0, 1), k0.get(0, 1).mul_monomial(&Monomial::new(0, -2 * D, 0, 2 * D), 1));
    }
}

#[test]
fn opposite_limit_by_conjugation() {
    let s = stab_ell(lat());
    let opp = stab_opposite(&hilb2_model(), &s).unwrap();
    for (n, d) in [(1, 4), (0, 1), (1, 2), (-3, 4)] {
        let sl = slope(n, d);
        let direct = k_stab(&flop_pair_model(), &opp, sl).unwrap();
        let conj = k_stab_opposite(&k_stab(&hilb2_model(), &s, sl).unwrap(), lat()).unwrap();
        assert_eq!(direct, conj, "s={sl}");
    }
}
