use ellcan::elliptic::{
    check_bar_invariance, check_duality, check_h_constraints, check_property_a, check_qdiff_a, check_qdiff_v,
    check_qdiff_z, check_r_functions, check_theta_identity, e11_sum, f_ab, line_power, Coefficients, EllFamily,
    EllipticError, FCoeffs, GMatrix, Preset,
};
use ellcan::geometry::{Point, Slope};
use ellcan::report::{all_passed, CheckOutcome, Status};
use ellcan::series::{Budgets, Lattice, Monomial, Series};
use ellcan::theta::{ThetaArg, ThetaCtx};
use num::rational::Ratio;

const D: i64 = 48;

fn lat() -> Lattice {
    Lattice::default()
}

fn show(out: &[CheckOutcome]) -> String {
    out.iter()
        .filter(|o| o.status == Status::Fail)
        .map(|o| format!("{} [{:?}] {:?} {}", o.check, o.order, o.residual_sample, o.detail))
        .collect::<Vec<_>>()
        .join("\n")
}

fn failing<'a>(out: &'a [CheckOutcome], prefix: &str) -> Vec<&'a CheckOutcome> {
    out.iter().filter(|o| o.status == Status::Fail && o.check.starts_with(prefix)).collect()
}

fn slope(n: i64, d: i64) -> Slope {
    Slope::new(lat(), Ratio::new(n, d)).unwrap()
}

/// `q^{q/D} v^{v}` with integer `v`.
fn qv(terms: &[(i64, i64, i64)]) -> Series {
    Series::exact(lat(), terms.iter().map(|&(c, q, v)| (c, Monomial::new(q, 0, 0, v * D))))
}

#[test]
fn minimal_upsilon_is_theta_zero() {
    let ctx = ThetaCtx::new(lat(), 2 * D, Budgets::NONE);
    let fam = EllFamily::from_preset(Preset::Minimal, &ctx).unwrap();
    // 1 + q (v^2 + v^-2) below q^2
    assert_eq!(fam.upsilon, Series::truncated(lat(), qv(&[(1, 0, 0), (1, D, 2), (1, D, -2)]).terms().map(|(m, c)| (*m, c.clone())), fam.upsilon.watermark(), Budgets::NONE));
}

#[test]
fn theta_preset_invariants() {
    let ctx = ThetaCtx::new(lat(), 3 * D, Budgets::NONE);
    let f = Preset::Theta.coeffs(&ctx).unwrap();
    f.validate().unwrap();
    assert_eq!([f.leading_order(0), f.leading_order(1), f.leading_order(2)], [Some(0), Some(0), Some(5 * D / 4)]);
    assert!((0..3).all(|i| f.is_v_symmetric(i)));
}

#[test]
fn invalid_coefficients_are_rejected() {
    let one = || Series::one(lat());
    let bad_lead = FCoeffs::new(one(), Series::int(lat(), 2), Series::zero(lat()));
    assert!(matches!(bad_lead.validate(), Err(EllipticError::Invariant { index: 1, .. })));
    let close = FCoeffs::new(one(), one(), qv(&[(1, D / 4, 0)]));
    assert!(matches!(close.validate(), Err(EllipticError::Invariant { index: 2, .. })));
    let off_grid = FCoeffs::new(one(), one(), qv(&[(1, D, 0)]));
    assert!(off_grid.validate().is_err());
    assert!("nonsense".parse::<Preset>().is_err());
    assert_eq!("theta".parse::<Preset>().unwrap(), Preset::Theta);
}

#[test]
fn e11_leading_term_at_one_one() {
    let ctx = ThetaCtx::new(lat(), D / 4, Budgets::NONE);
    let s = e11_sum(&ctx, Point::OneOne).unwrap();
    // z^{1/2} O(1/2)|_[1,1] = z^{1/2} v a^{1/2}
    let m = Monomial::new(D / 8, D / 2, D / 2, D);
    assert_eq!(s.coeff(&m), num::BigRational::from_integer(1.into()));
    assert_eq!(line_power(lat(), Point::OneOne, Ratio::new(1, 2)).unwrap(), Monomial::new(0, D / 2, 0, D));
}

#[test]
fn duality_for_presets() {
    for p in Preset::VALID {
        let out = check_duality(&p.into(), lat(), 2 * D).unwrap();
        assert!(all_passed(&out), "{p}:\n{}", show(&out));
        assert_eq!(out.len(), 4);
    }
}

#[test]
fn duality_with_shifted_leading_orders() {
    // c1 = 1/2, c2 = 5/4
    let f = FCoeffs::new(
        Series::one(lat()),
        qv(&[(1, D / 2, 0), (1, D, 1), (1, D, -1)]),
        qv(&[(1, 5 * D / 4, 0), (-1, 7 * D / 4, 2), (-1, 7 * D / 4, -2)]),
    );
    f.validate().unwrap();
    let out = check_duality(&Coefficients::Custom(Box::new(f)), lat(), 2 * D).unwrap();
    assert!(all_passed(&out), "{}", show(&out));
}

#[test]
fn odd_class_breaks_duality() {
    let out = check_duality(&Preset::BrokenOdd.into(), lat(), 2 * D).unwrap();
    let bad = failing(&out, "duality ([1,1],[2])");
    assert_eq!(bad.len(), 1, "{}", show(&out));
    assert!(!bad[0].residual_sample.is_empty());
}

#[test]
fn z_shift_equations() {
    for p in Preset::VALID {
        let out = check_qdiff_z(&p.into(), lat(), 2 * D, GMatrix::HILB2).unwrap();
        assert!(all_passed(&out), "{p}:\n{}", show(&out));
    }
    // -q^{-1} z^{-2} in place of -q^{-3/2} z^{-3}
    let wrong = GMatrix { two: 2, one_one: 1 };
    let out = check_qdiff_z(&Preset::Minimal.into(), lat(), 2 * D, wrong).unwrap();
    assert_eq!(failing(&out, "delta_z E([2])").len(), 2);
    assert!(failing(&out, "delta_z E([1,1])").is_empty());
}

#[test]
fn a_shift_equations() {
    for p in Preset::VALID {
        let out = check_qdiff_a(&p.into(), lat(), 2 * D).unwrap();
        assert!(all_passed(&out), "{p}:\n{}", show(&out));
        assert!(out.iter().any(|o| o.check.starts_with("delta_a F|")));
        assert!(out.iter().any(|o| o.check.starts_with("delta_a g_")));
    }
}

#[test]
fn v_shift_equations() {
    let theta = check_qdiff_v(&Preset::Theta.into(), lat(), 2 * D).unwrap();
    assert!(all_passed(&theta.outcomes), "{}", show(&theta.outcomes));
    assert!(theta.outcomes.iter().all(|o| o.status != Status::Skip));
    for p in Point::ALL {
        // x_p = q^-2 z^-2 O(-2)|_p
        let want = Monomial::new(-2 * D, 0, -2 * D, 0).mul(&line_power(lat(), p, Ratio::from(-2)).unwrap());
        assert_eq!(theta.x[p.index()], Some((1, want)), "{p}");
    }

    let minimal = check_qdiff_v(&Preset::Minimal.into(), lat(), 2 * D).unwrap();
    assert!(all_passed(&minimal.outcomes), "{}", show(&minimal.outcomes));
    assert!(minimal.outcomes.iter().any(|o| o.status == Status::Skip && o.detail.contains("degenerate")));
    assert_eq!(minimal.x, [None, None]);
}

#[test]
fn bar_invariance() {
    for p in Preset::VALID {
        let out = check_bar_invariance(&p.into(), lat(), 2 * D).unwrap();
        assert!(all_passed(&out), "{p}:\n{}", show(&out));
    }
    let lopsided = FCoeffs::new(Series::one(lat()), qv(&[(1, 0, 0), (1, D, 2)]), Series::zero(lat()));
    assert!(check_bar_invariance(&Coefficients::Custom(Box::new(lopsided)), lat(), D).is_err());
}

#[test]
fn five_theta_identity() {
    for eps in [0, 1] {
        let out = check_theta_identity(eps, lat(), 2 * D).unwrap();
        assert!(all_passed(&out), "eps={eps}:\n{}", show(&out));
    }
}

#[test]
fn f_ab_values() {
    let r = |n, d| Ratio::new(n, d);
    // 21/2 b^2 + ((A+B)/2 - 3) b + A^2/8 - AB/12 + B^2/8 + 1/4 + 3/2 (c+1/2)^2 + 3 d^2
    assert_eq!(f_ab(0, 0, r(0, 1), r(-1, 2), r(0, 1)), r(1, 4));
    assert_eq!(f_ab(1, 1, r(1, 1), r(0, 1), r(1, 3)), r(21, 2) - r(2, 1) + r(1, 8) - r(1, 12) + r(1, 8) + r(1, 4) + r(3, 8) + r(1, 3));
    assert_eq!(f_ab(1, 1, r(1, 6), r(2, 3), r(1, 6)), f_ab(1, 1, r(1, 6), r(-5, 3), r(1, 6)));
}

#[test]
fn h_constraints() {
    let out = check_h_constraints(lat(), 3 * D).unwrap();
    assert!(all_passed(&out), "{}", show(&out));
    assert!(out.iter().any(|o| o.check.contains("h_1 = 0")));
}

#[test]
fn r_functions() {
    assert!(all_passed(&check_r_functions()));
}

#[test]
fn property_a_on_presets() {
    for p in Preset::VALID {
        for (n, d) in [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)] {
            let (out, rep) = check_property_a(&p.into(), slope(n, d)).unwrap();
            assert!(all_passed(&out), "{p} s={n}/{d}:\n{}", show(&out));
            assert!(rep.r.iter().all(Option::is_some));
        }
    }
}

#[test]
fn quarter_slope_normalization() {
    let (out, rep) = check_property_a(&Preset::Theta.into(), slope(1, 4)).unwrap();
    assert!(out.iter().any(|o| o.check.starts_with("normalization of E([1,1])") && o.status == Status::Pass));
    // r_[1,1](1/4) = 1/2 * 1/2 * (-1/2 + 1/2) = 0, r_[2](1/4) = -1/8 + 1/8 = 0
    assert_eq!(rep.r, [Some(Ratio::from(0)), Some(Ratio::from(0))]);
    let two = &rep.slices[Point::Two.index()];
    // v z^{1/2} O(-1/2)|_[2] = z^{1/2} a^{1/2}
    assert_eq!(two[0], Series::mono(lat(), Monomial::new(0, D / 2, D / 2, 0)));
}

#[test]
fn integer_slope_two_term_slice() {
    let (_, rep) = check_property_a(&Preset::Minimal.into(), slope(0, 1)).unwrap();
    let oo = &rep.slices[Point::OneOne.index()][Point::OneOne.index()];
    // z^{1/2} O(1/2) - z^{-1/2} O(-1/2) at [1,1]
    let want = Series::exact(lat(), [(1, Monomial::new(0, D / 2, D / 2, D)), (-1, Monomial::new(0, -D / 2, -D / 2, -D))]);
    assert_eq!(*oo, want);
}

#[test]
fn broken_lead_fails_normalization() {
    let (out, _) = check_property_a(&Preset::BrokenLead.into(), slope(1, 4)).unwrap();
    let bad = failing(&out, "normalization of E([2])");
    assert_eq!(bad.len(), 1);
    assert!(!bad[0].residual_sample.is_empty());
}

#[test]
fn close_c2_breaks_dominance_at_half() {
    let (out, _) = check_property_a(&Preset::BrokenC2.into(), slope(1, 2)).unwrap();
    let bad = failing(&out, "f1 part dominates");
    assert_eq!(bad.len(), 1, "{}", show(&out));
    assert!(!bad[0].residual_sample.is_empty());
}

#[test]
fn theta_arg_sanity() {
    assert!(ThetaArg::ints(lat(), 0, 0, 0, 0).is_err());
}
