use ellcan::elliptic::{EllFamily, Preset};
use ellcan::geometry::Point;
use ellcan::numeric::{
    eval_series, euler_num, five_theta_sides, oracle_suite, sample_points, theta_num, triple_sum, EvalPoint, IdentitySet,
    NumFamily, OracleConfig,
};
use ellcan::series::{Budgets, Lattice, Monomial, Series};
use ellcan::theta::{ThetaArg, ThetaCtx};
use num_complex::Complex64 as C;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const D: i64 = 48;

fn points(n: usize, qmag: f64) -> Vec<EvalPoint> {
    sample_points(&OracleConfig { points: n, qmag, ..OracleConfig::default() }).unwrap().0
}

fn failures(report: &ellcan::numeric::NumericReport) -> Vec<String> {
    report.results.iter().filter(|r| !r.passed()).map(|r| format!("{} {:e}", r.name, r.max_error)).collect()
}

#[test]
fn theta_vanishes_at_one() {
    assert_eq!(theta_num(C::new(1.0, 0.0), C::new(0.1, 0.05)), C::new(0.0, 0.0));
}

#[test]
fn theta_is_odd() {
    let q = C::new(0.06, -0.08);
    for x in [C::new(0.7, 0.4), C::new(-1.3, 0.9), C::new(0.2, -1.6)] {
        let d = theta_num(x.inv(), q) + theta_num(x, q);
        assert!(d.norm() < 1e-12, "{x}: {d}");
    }
}

#[test]
fn triple_product_against_sum() {
    for pt in points(10, 0.1) {
        let prod = theta_num(pt.log_a.exp(), pt.log_q.exp()) * (pt.log_q / 8.0).exp() * euler_num(pt.log_q.exp());
        let sum = triple_sum(pt.log_a, pt.log_q);
        // principal roots on both sides since log_a is the principal log here
        assert!((prod - sum).norm() <= 1e-10 * sum.norm(), "{prod} vs {sum}");
    }
}

#[test]
fn exact_polynomial_evaluation() {
    let lat = Lattice::default();
    // 3 a z^-1 - v^2 q^{1/2}
    let s = Series::exact(lat, [(3, Monomial::new(0, D, -D, 0)), (-1, Monomial::new(D / 2, 0, 0, 2 * D))]);
    let pt = points(1, 0.1)[0];
    let (a, z, v, q) = (pt.log_a.exp(), pt.log_z.exp(), pt.log_v.exp(), pt.log_q.exp());
    let direct = a / z * 3.0 - v * v * (pt.log_q / 2.0).exp();
    let got = eval_series(&s, &pt);
    assert!((got.value - direct).norm() < 1e-13);
    assert_eq!(got.tail, 0.0);
    assert!(q.norm() > 0.0);
}

#[test]
fn tilde_theta_engines_agree() {
    let lat = Lattice::default();
    let ctx = ThetaCtx::new(lat, 3 * D, Budgets::NONE);
    let s = ctx.tilde(ThetaArg::ints(lat, 0, 1, 0, 0).unwrap()).unwrap();
    for pt in points(20, 0.1) {
        let sv = eval_series(&s, &pt);
        let closed = triple_sum(pt.log_a, pt.log_q);
        assert!((sv.value - closed).norm() <= sv.tail, "{} > {}", (sv.value - closed).norm(), sv.tail);
    }
}

#[test]
fn family_engines_agree() {
    // truncation error stays within 10^3 |q|^W; the fitted constant is a few hundred
    let lat = Lattice::default();
    let ctx = ThetaCtx::new(lat, 3 * D, Budgets::NONE);
    for preset in Preset::VALID {
        let fam = EllFamily::from_preset(preset, &ctx).unwrap();
        let num = NumFamily::new(preset);
        for pt in points(10, 0.1) {
            for mu in Point::ALL {
                for p in Point::ALL {
                    let sv = eval_series(fam.restriction(mu, p), &pt);
                    let closed = num.restriction(mu, p, &pt);
                    assert!((sv.value - closed).norm() <= sv.tail, "{preset} E({mu})|_{p}");
                }
            }
            let up = eval_series(&fam.upsilon, &pt);
            assert!((up.value - num.upsilon(&pt)).norm() <= up.tail);
        }
    }
}

#[test]
fn five_theta_identity_numerically() {
    for pt in points(20, 0.1) {
        for e in [0, 1] {
            assert!(five_theta_sides(e, &pt).relative_error() < 1e-9);
        }
    }
}

#[test]
fn oracle_passes_on_valid_presets() {
    let report = oracle_suite(&IdentitySet::all(&Preset::VALID), &OracleConfig::default()).unwrap();
    assert!(report.all_passed(), "{:#?}", failures(&report));
    assert!(report.results.iter().any(|r| r.name.starts_with("duality ([1,1],[2])")));
    let diag: Vec<_> = report.results.iter().filter(|r| r.name.starts_with("Stab([2])|_[2]")).collect();
    assert_eq!(diag.len(), 1);
    assert_eq!(diag[0].tol, 1e-12);
}

#[test]
fn oracle_catches_odd_class() {
    let report = oracle_suite(&[IdentitySet::Duality(Preset::BrokenOdd)], &OracleConfig::default()).unwrap();
    let bad = failures(&report);
    assert!(bad.iter().any(|n| n.starts_with("duality ([1,1],[2])")), "{bad:?}");
    let outcomes = report.outcomes();
    assert!(outcomes.iter().any(|o| !o.passed() && !o.residual_sample.is_empty()));
}

#[test]
fn seeded_runs_are_reproducible() {
    let cfg = OracleConfig { seed: 7, points: 5, ..OracleConfig::default() };
    let sets = [IdentitySet::FiveTheta, IdentitySet::Duality(Preset::Theta)];
    let a = oracle_suite(&sets, &cfg).unwrap();
    let b = oracle_suite(&sets, &cfg).unwrap();
    assert_eq!(a, b);
    let other = oracle_suite(&sets, &OracleConfig { seed: 8, ..cfg }).unwrap();
    assert_ne!(a.results, other.results);
}

#[test]
fn sampled_points_stay_on_the_annulus() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let pt = EvalPoint::sample(&mut rng, 0.1).unwrap();
        for l in [pt.log_a, pt.log_z, pt.log_v] {
            assert!(l.re.exp() > 0.5 && l.re.exp() < 2.0);
        }
        assert!((pt.qmag() - 0.1).abs() < 1e-15);
    }
    assert!(EvalPoint::sample(&mut rng, 1.0).is_err());
}
