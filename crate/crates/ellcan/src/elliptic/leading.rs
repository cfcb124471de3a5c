//! Leading terms of the family after the Kähler shift `z -> q^{-s} z`.

use num::{BigRational, Signed, Zero};

use super::sums::e_sum;
use super::{big, line_power, mono, rat, Coefficients, Result, Q};
use crate::geometry::{hilb2_model, LaurentFraction, LaurentMatrix, Point, Slope, SlopeKind};
use crate::klcanon::{canonical_basis, label_of, wall_crossing_map, xi_classes, CanLabel};
use crate::report::CheckOutcome;
use crate::series::{format_monomial, Budgets, Lattice, Monomial, Series, Var};
use crate::theta::ThetaCtx;

/// `sign v^v z^z O(o)`, natural units.
#[derive(Debug, Clone, Copy)]
struct Term {
    sign: i64,
    v: Q,
    z: Q,
    o: Q,
}

fn term(sign: i64, v: i64, z: Q, o: Q) -> Term {
    Term { sign, v: Q::from(v), z, o }
}

/// Predicted leading exponent (without `c_i`) and slice.
struct Row {
    q: Q,
    terms: Vec<Term>,
}

fn alt(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn e11_row(s: Q) -> Row {
    let h = rat(1, 2);
    if s.is_integer() {
        let n = s.to_integer();
        let sg = alt(n);
        Row { q: -(s * s - rat(1, 4)) / 2, terms: vec![term(sg, 0, s + h, s + h), term(-sg, 0, s - h, s - h)] }
    } else {
        let fl = s.floor();
        let sg = alt(fl.to_integer());
        Row { q: (fl + h) * (-s * 2 + fl + h) / 2, terms: vec![term(sg, 0, fl + h, fl + h)] }
    }
}

fn f1_row(s: Q) -> Row {
    let h = rat(1, 2);
    let fl = s.floor();
    let sg = alt(fl.to_integer());
    if s.is_integer() {
        Row {
            q: -rat(3, 2) * s * s + rat(1, 8),
            terms: vec![term(sg, 1, s * 3 + h, s - h), term(-sg, -1, s * 3 - h, s + h)],
        }
    } else if s - fl == h {
        Row {
            q: -rat(3, 2) * s * s + rat(1, 4),
            terms: vec![term(sg, -1, s * 3 + 1, s + 1), term(sg, 1, s * 3 - 1, s - 1)],
        }
    } else if s < fl + h {
        Row {
            q: rat(3, 2) * fl * fl - s * fl * 3 + fl / 2 - s / 2 + rat(1, 8),
            terms: vec![term(sg, 1, fl * 3 + h, fl - h)],
        }
    } else {
        Row {
            q: rat(3, 2) * fl * fl - s * fl * 3 + fl * rat(5, 2) - s * rat(5, 2) + rat(9, 8),
            terms: vec![term(sg, -1, fl * 3 + rat(5, 2), fl + rat(3, 2))],
        }
    }
}

fn f2_row(s: Q) -> Row {
    let h = rat(1, 2);
    let fl = s.floor();
    let sg = alt(fl.to_integer());
    let th = rat(3, 2);
    if s.is_integer() {
        Row {
            q: -th * s * s + rat(3, 8),
            terms: vec![
                term(sg, 0, s * 3 + th, s + h),
                term(-sg, -2, s * 3 + h, s + th),
                term(sg, 2, s * 3 - h, s - th),
                term(-sg, 0, s * 3 - th, s - h),
            ],
        }
    } else {
        Row { q: th * fl * fl - s * fl * 3 + th * fl - th * s + rat(3, 8), terms: vec![term(sg, 0, fl * 3 + th, fl + h)] }
    }
}

fn row_at(lat: Lattice, row: &Row, p: Point) -> Result<Series> {
    let mut items = Vec::new();
    for t in &row.terms {
        let m = mono(lat, Q::zero(), Q::zero(), t.z, t.v)?.mul(&line_power(lat, p, t.o)?);
        items.push((t.sign, m));
    }
    Ok(Series::exact(lat, items))
}

/// Least q-exponent over both points and the two slices there; `None` if
/// the vector vanishes below the watermark.
fn leading(x: &[Series; 2]) -> Option<(i64, [Series; 2])> {
    let e = x.iter().filter_map(|s| s.min_q()).min()?;
    Some((e, [x[0].slice_at(e), x[1].slice_at(e)]))
}

fn complete(x: &[Series; 2], e: Option<i64>) -> bool {
    let w = x.iter().map(|s| s.watermark()).min().unwrap();
    match e {
        Some(e) => crate::series::Watermark::Finite(e) < w,
        None => false,
    }
}

fn max_term(s: &Series) -> Option<(Monomial, BigRational)> {
    s.terms().max_by_key(|(m, _)| **m).map(|(m, c)| (*m, c.clone()))
}

/// `x = +- t y` for one monomial `t`, with `y` given as fractions.
fn same_class(x: &[Series; 2], y: &[LaurentFraction; 2]) -> Result<Option<(i64, Monomial)>> {
    let cleared: Vec<Series> = (0..2).map(|i| x[i].mul(y[i].den())).collect::<std::result::Result<_, _>>()?;
    let Some(i) = (0..2).find(|&i| !cleared[i].is_exact_zero()) else {
        return Ok(None);
    };
    let (Some((mx, cx)), Some((my, cy))) = (max_term(&cleared[i]), max_term(y[i].num())) else {
        return Ok(None);
    };
    let ratio = cx / cy;
    if ratio.abs() != big(1) {
        return Ok(None);
    }
    let sign = if ratio.is_negative() { -1 } else { 1 };
    let t = mx.div(&my);
    for i in 0..2 {
        if cleared[i] != y[i].num().mul_monomial(&t).scale_int(sign) {
            return Ok(None);
        }
    }
    Ok(Some((sign, t)))
}

/// The family member whose index class contains each canonical column: read
/// from the column's label at generic slopes and from the wall-crossing
/// pairing on walls.
fn column_classes(s: Slope, canon: &LaurentMatrix) -> Result<[Option<Point>; 2]> {
    let model = hilb2_model();
    let labels: Vec<Option<CanLabel>> = if s.kind() == SlopeKind::Generic {
        (0..2).map(|i| label_of(&model, &canon.column(i)).map(|(_, l)| l)).collect()
    } else {
        wall_crossing_map(&model, s)?.iter().map(|w| Some(w.plus)).collect()
    };
    let window = labels.iter().flatten().map(|l| l.m.abs().max(l.n.abs())).max().unwrap_or(0).max(3);
    let xi = xi_classes(&model, s.lattice(), window)?;
    let mut out = [None, None];
    for (i, l) in labels.iter().enumerate() {
        out[i] = l.as_ref().and_then(|l| xi.class_of(l)).and_then(|c| xi.iota[c]);
    }
    Ok(out)
}

/// Extracted leading data at one slope.
#[derive(Debug, Clone)]
pub struct LeadingReport {
    pub slope: Q,
    /// `r_mu(s)`: least q-exponent of `E(mu)` after the shift, indexed by `mu`.
    pub r: [Option<Q>; 2],
    /// Leading slices `[mu][p]`.
    pub slices: [[Series; 2]; 2],
}

fn shifted(x: &Series, t: i64) -> Result<Series> {
    Ok(x.shift(Var::Z, -t)?)
}

/// Leading terms of `E(mu)` at `z -> q^{-s} z` against the case tables,
/// dominance of the `f1` part over the `f2` part, membership in the
/// K-theoretic canonical class up to sign and monomial, and for `0 < s < 1/2`
/// the exact normalization.
pub fn check_property_a(coeffs: &Coefficients, s: Slope) -> Result<(Vec<CheckOutcome>, LeadingReport)> {
    let lat = s.lattice();
    let d = lat.den();
    let t = s.numerator();
    let sr = s.ratio();
    let canon = canonical_basis(s)?;
    let classes = column_classes(s, &canon)?;
    let mut order = 2 * d;
    loop {
        let ctx = ThetaCtx::new(lat, order, Budgets::only(Var::Z, t.abs()));
        let fam = coeffs.family(&ctx)?;
        let f = &fam.f;
        let mut e11 = [Series::zero(lat), Series::zero(lat)];
        let mut e2 = e11.clone();
        let mut part1 = e11.clone();
        let mut part2 = e11.clone();
        for p in Point::ALL {
            let i = p.index();
            e11[i] = shifted(fam.restriction(Point::OneOne, p), t)?;
            e2[i] = shifted(fam.restriction(Point::Two, p), t)?;
            part1[i] = shifted(&f.f[1].mul(&e_sum(&ctx, p, 0)?)?, t)?;
            part2[i] = shifted(&f.f[2].mul(&e_sum(&ctx, p, 1)?)?, t)?;
        }
        let l11 = leading(&e11);
        let l2 = leading(&e2);
        let l1 = leading(&part1);
        let lf2 = leading(&part2);
        let has_f2 = !f.f[2].is_exact_zero();
        let ready = complete(&e11, l11.as_ref().map(|x| x.0))
            && complete(&e2, l2.as_ref().map(|x| x.0))
            && complete(&part1, l1.as_ref().map(|x| x.0))
            && (!has_f2 || complete(&part2, lf2.as_ref().map(|x| x.0)));
        if !ready && order < 8 * d {
            order += d;
            continue;
        }

        let mut out = Vec::new();
        let c = |i: usize| f.leading_order(i).map(|c| lat.to_ratio(c));
        let zero = || [Series::zero(lat), Series::zero(lat)];

        let table = |name: String, got: &Option<(i64, [Series; 2])>, row: Row, c: Option<Q>, scale: &Series| -> Result<CheckOutcome> {
            let Some(c) = c else {
                return Ok(CheckOutcome::skipped(name, "coefficient vanishes"));
            };
            let Some((e, sl)) = got else {
                return Ok(CheckOutcome::new(name, false).with_detail("no term below the watermark"));
            };
            let want_q = c + row.q;
            let mut residual = Series::zero(lat);
            for p in Point::ALL {
                let diff = sl[p.index()].sub(&scale.mul(&row_at(lat, &row, p)?)?)?;
                if residual.is_exact_zero() {
                    residual = diff;
                }
            }
            let ok = lat.to_ratio(*e) == want_q && residual.is_exact_zero();
            Ok(CheckOutcome::new(name, ok)
                .with_residual(&residual)
                .with_detail(format!("leading q^{} (expected q^{})", lat.to_ratio(*e), want_q)))
        };

        let one = Series::one(lat);
        out.push(table(format!("E([1,1]) leading term at s = {sr}"), &l11, e11_row(sr), c(0), &one)?);
        out.push(table(format!("E([2]) f1 leading term at s = {sr}"), &l1, f1_row(sr), c(1), &one)?);
        if has_f2 {
            out.push(table(format!("E([2]) f2 leading term at s = {sr}"), &lf2, f2_row(sr), c(2), &f.leading_slice(2))?);
            let name = format!("f1 part dominates f2 part at s = {sr}");
            let ok = match (&l1, &lf2) {
                (Some((a, _)), Some((b, _))) => a < b,
                _ => false,
            };
            let residual = lf2.as_ref().map_or(Series::zero(lat), |(_, sl)| sl[0].clone());
            let mut o = CheckOutcome::new(name, ok).with_detail(format!(
                "f1 part from q^{}, f2 part from q^{}",
                l1.as_ref().map_or("-".into(), |x| lat.to_ratio(x.0).to_string()),
                lf2.as_ref().map_or("-".into(), |x| lat.to_ratio(x.0).to_string())
            ));
            if !ok {
                o = o.with_residual(&residual);
            }
            out.push(o);
        } else {
            out.push(CheckOutcome::skipped(format!("f1 part dominates f2 part at s = {sr}"), "f2 = 0"));
        }

        let mut slices = [zero(), zero()];
        let mut r = [None, None];
        for (mu, lead) in [(Point::Two, &l2), (Point::OneOne, &l11)] {
            let name = format!("E({mu}) leading class at s = {sr}");
            let Some((e, sl)) = lead else {
                out.push(CheckOutcome::new(name, false).with_detail("no term below the watermark"));
                continue;
            };
            r[mu.index()] = Some(lat.to_ratio(*e));
            slices[mu.index()] = sl.clone();
            let Some(c) = (0..2).find(|&c| classes[c] == Some(mu)) else {
                out.push(CheckOutcome::new(name, false).with_detail("no canonical column in this class"));
                continue;
            };
            out.push(match same_class(sl, &canon.column(c))? {
                Some((sign, m)) => CheckOutcome::new(name, true).with_detail(format!(
                    "{}{} times E^K({})",
                    if sign < 0 { "-" } else { "" },
                    format_monomial(lat, &m),
                    Point::ALL[c]
                )),
                None => CheckOutcome::new(name, false).with_residual(&sl[0]).with_detail(format!("not a monomial multiple of E^K({})", Point::ALL[c])),
            });
        }

        if sr > Q::zero() && sr < rat(1, 2) {
            for (mu, k, v) in [(Point::Two, rat(-1, 2), 1), (Point::OneOne, rat(1, 2), 0)] {
                let name = format!("normalization of E({mu}) at s = {sr}");
                let mut residual = Series::zero(lat);
                for p in Point::ALL {
                    let want = Series::mono(lat, mono(lat, Q::zero(), Q::zero(), rat(1, 2), Q::from(v))?.mul(&line_power(lat, p, k)?));
                    let diff = slices[mu.index()][p.index()].sub(&want)?;
                    if residual.is_exact_zero() {
                        residual = diff;
                    }
                }
                out.push(CheckOutcome::new(name, residual.is_exact_zero()).with_residual(&residual));
            }
        }

        return Ok((out, LeadingReport { slope: sr, r, slices }));
    }
}

/// `r_1(m) = 3/2 (m+1/6)^2`, `r_2(m) = 3/2 (m-1/6)^2`, `r_3(m) = (m+1/2)^2/2`
/// against the matching conditions between neighbouring leading terms.
pub fn check_r_functions() -> Vec<CheckOutcome> {
    let r1 = |m: Q| rat(3, 2) * (m + rat(1, 6)) * (m + rat(1, 6));
    let r2 = |m: Q| rat(3, 2) * (m - rat(1, 6)) * (m - rat(1, 6));
    let r3 = |m: Q| (m + rat(1, 2)) * (m + rat(1, 2)) / 2;
    let h = rat(1, 2);
    let mut ok = [true; 3];
    for m in -4..=4 {
        let m = Q::from(m);
        ok[0] &= r1(m) - (m * 3 + h) * m == r2(m) - (m * 3 - h) * m;
        ok[1] &= r1(m) - (m * 3 + h) * (m + h) == r2(m + 1) - (m * 3 + rat(5, 2)) * (m + h);
        ok[2] &= r3(m) - (m + h) * m == r3(m - 1) - (m - h) * m;
    }
    vec![
        CheckOutcome::new("r_1, r_2 agree at integer slopes", ok[0]),
        CheckOutcome::new("r_1, r_2 agree at half-integer slopes", ok[1]),
        CheckOutcome::new("r_3 agrees at integer slopes", ok[2]),
    ]
}
