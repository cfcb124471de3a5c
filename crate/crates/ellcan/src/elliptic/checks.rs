//! Identity checks on the family: duality with the stable matrix, the
//! q-difference equations, bar invariance, the five-theta identity and the
//! linear constraints on the `h` coefficients.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigRational, Signed, Zero};

use super::sums::{e11_sum, e2_lambda, e_sum, g_sum, lattice_sum, h_class, Summand};
use super::{big, eps, line_power, mono, other, rat, Coefficients, EllFamily, EllipticError, FCoeffs, GMatrix, Result, Q};
use crate::geometry::stab::{stab_ell, stab_opposite};
use crate::geometry::{hilb2_model, Point, StabMatrix};
use crate::report::CheckOutcome;
use crate::series::{format_monomial, Budgets, Lattice, Monomial, Series, Var, VarMap, Watermark};
use crate::theta::{ThetaArg, ThetaCtx, ThetaFraction};

/// A comparison, remembering whether it only failed to reach the target.
pub(crate) struct Probe {
    pub outcome: CheckOutcome,
    pub short: bool,
}

impl Probe {
    pub fn plain(outcome: CheckOutcome) -> Self {
        Probe { outcome, short: false }
    }
}

pub(crate) fn probe(name: impl Into<String>, lhs: &Series, rhs: &Series, target: i64) -> Result<Probe> {
    let c = lhs.equal_up_to(rhs)?;
    Ok(finish(name.into(), lhs.lattice(), c.equal, c.below, &c.residual, target))
}

fn probe_tf(name: impl Into<String>, lhs: &ThetaFraction, rhs: &ThetaFraction, ctx: &ThetaCtx, target: i64) -> Result<Probe> {
    let c = lhs.tf_equal(rhs, ctx)?;
    Ok(finish(name.into(), ctx.lattice, c.equal, c.below, &c.residual, target))
}

fn finish(name: String, lat: Lattice, equal: bool, below: Watermark, residual: &Series, target: i64) -> Probe {
    let reached = below >= Watermark::Finite(target);
    let mut outcome = CheckOutcome::new(name, equal && reached).with_order(lat, below).with_residual(residual);
    if equal && !reached {
        outcome = outcome.with_detail("target order not reached");
    }
    Probe { outcome, short: equal && !reached }
}

/// Reruns `run` at increasing orders until no comparison falls short of
/// `target`.
pub(crate) fn adaptive<T>(
    lat: Lattice,
    target: i64,
    budgets: Budgets,
    run: impl Fn(&ThetaCtx) -> Result<(Vec<Probe>, T)>,
) -> Result<(Vec<CheckOutcome>, T)> {
    let d = lat.den();
    let mut order = target;
    loop {
        let (probes, extra) = run(&ThetaCtx::new(lat, order, budgets))?;
        if !probes.iter().any(|p| p.short) || order >= target + 8 * d {
            return Ok((probes.into_iter().map(|p| p.outcome).collect(), extra));
        }
        order += d / 2;
    }
}

fn only(lat: Lattice, target: i64, budgets: Budgets, run: impl Fn(&ThetaCtx) -> Result<Vec<Probe>>) -> Result<Vec<CheckOutcome>> {
    Ok(adaptive(lat, target, budgets, |ctx| Ok((run(ctx)?, ())))?.0)
}

fn q_mono(lat: Lattice, q: Q, a: Q, z: Q, v: Q) -> Result<Monomial> {
    mono(lat, q, a, z, v)
}

/// `q^{1/4} (q;q)^2 Upsilon Stab = E . E^!^T`, entrywise.
pub fn check_duality(coeffs: &Coefficients, lat: Lattice, target: i64) -> Result<Vec<CheckOutcome>> {
    let stab = stab_ell(lat);
    only(lat, target, Budgets::NONE, |ctx| {
        let fam = coeffs.family(ctx)?;
        duality_probes(&fam, &stab, ctx, target, "duality", |b, at| fam.dual_restriction(b, at), false)
    })
}

/// Entry `(r, c)`: `sign Upsilon Stab[r][c]` against `sum_k E(k)|_r D(k, c)`.
fn duality_probes(
    fam: &EllFamily,
    stab: &StabMatrix,
    ctx: &ThetaCtx,
    target: i64,
    label: &str,
    dual: impl Fn(Point, Point) -> Result<Series>,
    negate: bool,
) -> Result<Vec<Probe>> {
    let lat = ctx.lattice;
    let ups = fam.upsilon_fraction();
    let mut out = Vec::new();
    for r in Point::ALL {
        for c in Point::ALL {
            let mut rhs = Series::zero(lat);
            for k in Point::ALL {
                rhs = rhs.add(&fam.restriction(k, r).mul(&dual(k, c)?)?)?;
            }
            let name = format!("{label} ({r},{c})");
            let entry = stab.entry(c, r);
            if entry.is_zero() {
                out.push(probe(name, &rhs, &Series::zero(lat), target)?);
                continue;
            }
            let mut lhs = entry.expand(ctx)?.mul(&ups)?;
            if negate {
                lhs = lhs.neg();
            }
            out.push(probe_tf(name, &lhs, &ThetaFraction::from_series(rhs), ctx, target)?);
        }
    }
    Ok(out)
}

/// `-q^{-G/2} z^{-G} O(-1)|_p` for the class `mu`.
pub fn z_shift_factor(lat: Lattice, g: GMatrix, mu: Point, p: Point) -> Result<(i64, Monomial)> {
    let gm = Q::from(g.get(mu));
    let m = q_mono(lat, -gm / 2, Q::zero(), -gm, Q::zero())?.mul(&line_power(lat, p, Q::from(-1))?);
    Ok((-1, m))
}

/// `delta_z E(mu)|_p = -q^{-G/2} z^{-G} O(-1)|_p E(mu)|_p`, with the given `G`.
pub fn check_qdiff_z(coeffs: &Coefficients, lat: Lattice, target: i64, g: GMatrix) -> Result<Vec<CheckOutcome>> {
    let d = lat.den();
    only(lat, target, Budgets::only(Var::Z, d), |ctx| {
        let fam = coeffs.family(ctx)?;
        let mut out = Vec::new();
        for mu in Point::ALL {
            for p in Point::ALL {
                let e = fam.restriction(mu, p);
                let (sign, m) = z_shift_factor(lat, g, mu, p)?;
                let rhs = e.mul_monomial(&m).scale_int(sign);
                let mut pr = probe(format!("delta_z E({mu})|_{p}"), &e.shift(Var::Z, d)?, &rhs, target)?;
                pr.outcome.detail = format!("G = {}", g.get(mu));
                out.push(pr);
            }
        }
        Ok(out)
    })
}

/// `delta_a` on the family, the pieces of its z-expansion, and the
/// expansion in the `h`, `g` series.
pub fn check_qdiff_a(coeffs: &Coefficients, lat: Lattice, target: i64) -> Result<Vec<CheckOutcome>> {
    let d = lat.den();
    only(lat, target, Budgets::only(Var::A, d), |ctx| {
        let fam = coeffs.family(ctx)?;
        let mut out = Vec::new();
        for p in Point::ALL {
            let e = Q::from(eps(p));
            let row = q_mono(lat, Q::zero(), Q::zero(), e, e * 2)?;
            for mu in Point::ALL {
                let g = Q::from(GMatrix::HILB2.get(mu));
                let col = q_mono(lat, -g / 2, -g, Q::zero(), Q::zero())?;
                let x = fam.restriction(mu, p);
                let rhs = x.mul_monomial(&row.mul(&col)).neg();
                out.push(probe(format!("delta_a E({mu})|_{p}"), &x.shift(Var::A, d)?, &rhs, target)?);
            }

            // E^[2]_lambda for lambda = 1/2 - j eps/3
            for j in 0..3 {
                let lambda = rat(1, 2) - rat(j, 3) * e;
                let x = e2_lambda(ctx, p, lambda)?;
                let next = e2_lambda(ctx, p, lambda - e / 3)?;
                let m = q_mono(lat, rat(-1, 6), rat(-1, 3), e, e * 2 / 3)?;
                let name = format!("delta_a E^[2]_{lambda}|_{p}");
                out.push(probe(name, &x.shift(Var::A, d)?, &next.mul_monomial(&m), target)?);
            }
            let x = e11_sum(ctx, p)?;
            let m = q_mono(lat, rat(-1, 2), Q::from(-1), e, e * 2)?;
            out.push(probe(format!("delta_a E^[1,1]|_{p}"), &x.shift(Var::A, d)?, &x.mul_monomial(&m).neg(), target)?);

            for k in [0, 2, 4, 6] {
                let lambda = rat(k, 8);
                let x = g_sum(ctx, p, lambda)?;
                let next = g_sum(ctx, p, lambda - e / 3)?;
                let m = q_mono(lat, rat(-4, 3), rat(-8, 3), Q::zero(), e * 4 / 3)?;
                out.push(probe(format!("delta_a g_{lambda}|_{p}"), &x.shift(Var::A, d)?, &next.mul_monomial(&m), target)?);
            }

            let m = q_mono(lat, rat(-4, 3), rat(-8, 3), Q::zero(), e * 4 / 3)?;
            for j in 0..3 {
                let x = fam.f_lambda(p, j)?;
                let next = fam.f_lambda(p, j + 1)?;
                let lambda = rat(1, 2) - rat(j, 3) * e;
                out.push(probe(format!("delta_a F_{lambda}|_{p}"), &x.shift(Var::A, d)?, &next.mul_monomial(&m).neg(), target)?);
            }
            let f0 = &fam.f.f[0];
            out.push(probe(format!("delta_a F|_{p} = F|_{p}"), &f0.shift(Var::A, d)?, f0, target)?);

            let mut rebuilt = Series::zero(lat);
            for j in 0..3 {
                let lambda = rat(1, 2) - rat(j, 3) * e;
                rebuilt = rebuilt.add(&fam.f_lambda(p, j)?.mul(&e2_lambda(ctx, p, lambda)?)?)?;
            }
            out.push(probe(format!("E([2])|_{p} = sum F_lambda E^[2]_lambda"), fam.restriction(Point::Two, p), &rebuilt, target)?);

            let mut classes = Series::zero(lat);
            for k in 0..8 {
                let h = fam.h(k);
                if !h.is_exact_zero() {
                    classes = classes.add(&h.mul(&h_class(ctx, p, k)?)?)?;
                }
            }
            out.push(probe(format!("E([2])|_{p} = sum h_lambda lattice classes"), fam.restriction(Point::Two, p), &classes, target)?);
        }
        Ok(out)
    })
}

/// Outcomes of the `v`-shift checks, with the extracted eigenvalues.
#[derive(Debug, Clone)]
pub struct QDiffV {
    pub outcomes: Vec<CheckOutcome>,
    /// `x_p` as sign and monomial, when the eigen-condition holds.
    pub x: [Option<(i64, Monomial)>; 2],
}

fn min_term(s: &Series) -> Option<(Monomial, BigRational)> {
    s.terms().min_by_key(|(m, _)| **m).map(|(m, c)| (*m, c.clone()))
}

/// `delta_v` on `E([1,1])` and `E([2])` against the coefficient shifts;
/// under `f0 delta_v f_i = q^{-1} v^{-2} f_i delta_v f0` also the common
/// eigenvalue `x_p` of `delta_v` at each point.
pub fn check_qdiff_v(coeffs: &Coefficients, lat: Lattice, target: i64) -> Result<QDiffV> {
    let d = lat.den();
    let (outcomes, x) = adaptive(lat, target, Budgets::only(Var::V, d), |ctx| {
        let fam = coeffs.family(ctx)?;
        let f = &fam.f.f;
        let sf: Vec<Series> = f.iter().map(|s| s.shift(Var::V, d)).collect::<std::result::Result<_, _>>()?;
        let mut out = Vec::new();
        let mut x = [None, None];
        for p in Point::ALL {
            let o2 = line_power(lat, p, Q::from(-2))?;
            let e11 = fam.restriction(Point::OneOne, p);
            let lhs = f[0].mul(&e11.shift(Var::V, d)?)?;
            let m = q_mono(lat, Q::from(-2), Q::zero(), Q::from(-2), Q::zero())?.mul(&o2);
            let rhs = sf[0].mul(&e11.mul_monomial(&m))?;
            out.push(probe(format!("f0 delta_v E([1,1])|_{p}"), &lhs, &rhs, target)?);

            let e2 = fam.restriction(Point::Two, p);
            let m = q_mono(lat, Q::from(-1), Q::zero(), Q::from(-2), Q::from(2))?.mul(&o2);
            let inner = sf[1].mul(&e_sum(ctx, p, 0)?)?.add(&sf[2].mul(&e_sum(ctx, p, 1)?)?)?;
            out.push(probe(format!("delta_v E([2])|_{p}"), &e2.shift(Var::V, d)?, &inner.mul_monomial(&m), target)?);
        }

        let ratio = q_mono(lat, Q::from(-1), Q::zero(), Q::zero(), Q::from(-2))?;
        let mut holds = true;
        for i in [1, 2] {
            let lhs = f[0].mul(&sf[i])?;
            let rhs = f[i].mul(&sf[0])?.mul_monomial(&ratio);
            let c = lhs.equal_up_to(&rhs)?;
            let name = format!("eigen-condition for f{i}");
            if f[i].is_exact_zero() {
                out.push(Probe::plain(CheckOutcome::skipped(name, "degenerate: f2 = 0")));
            } else if c.equal {
                out.push(finish(name, lat, true, c.below, &c.residual, target));
            } else {
                holds = false;
                out.push(Probe::plain(CheckOutcome::skipped(name, "condition fails; Property E not asserted").with_residual(&c.residual)));
            }
        }
        if holds {
            for p in Point::ALL {
                let e11 = fam.restriction(Point::OneOne, p);
                let shifted = e11.shift(Var::V, d)?;
                let (Some((m0, c0)), Some((m1, c1))) = (min_term(e11), min_term(&shifted)) else {
                    out.push(Probe::plain(CheckOutcome::new(format!("x_{p}"), false).with_detail("no terms")));
                    continue;
                };
                let xp = m1.div(&m0);
                let ratio = c1 / c0;
                let sign = if ratio.is_negative() { -1 } else { 1 };
                if ratio.abs() != big(1) {
                    out.push(Probe::plain(CheckOutcome::new(format!("x_{p}"), false).with_detail("coefficient ratio is not a sign")));
                    continue;
                }
                x[p.index()] = Some((sign, xp));
                for mu in Point::ALL {
                    let e = fam.restriction(mu, p);
                    let mut pr = probe(format!("delta_v E({mu})|_{p} = x_{p} E({mu})|_{p}"), &e.shift(Var::V, d)?, &e.mul_monomial(&xp).scale_int(sign), target)?;
                    pr.outcome.detail = format!("x = {}{}", if sign < 0 { "-" } else { "" }, format_monomial(lat, &xp));
                    out.push(pr);
                }
            }
        }
        Ok((out, x))
    })?;
    Ok(QDiffV { outcomes, x })
}

/// The three identities behind bar invariance: `a -> a^{-1}` exchanges the
/// two points, `bar E = -E(a^{-1}, z^{-1})`, and duality with the stable
/// matrix of the opposite side against the flopped dual family.
pub fn check_bar_invariance(coeffs: &Coefficients, lat: Lattice, target: i64) -> Result<Vec<CheckOutcome>> {
    let model = hilb2_model();
    let stab = stab_opposite(&model, &stab_ell(lat))?;
    only(lat, target, Budgets::NONE, |ctx| {
        let fam = coeffs.family(ctx)?;
        for i in 0..3 {
            if !fam.f.is_v_symmetric(i) {
                return Err(EllipticError::Invariant { index: i, reason: "not symmetric under v -> v^-1".into() });
            }
        }
        let inv_a = VarMap::invert(lat, &[Var::A]);
        let inv_az = VarMap::invert(lat, &[Var::A, Var::Z]);
        let mut out = Vec::new();
        for mu in Point::ALL {
            for p in Point::ALL {
                let x = fam.restriction(mu, p).substitute_all(&inv_a)?;
                out.push(probe(format!("E({mu})|_{p} at a^-1 = E({mu})|_{}", other(p)), &x, fam.restriction(mu, other(p)), target)?);
            }
        }
        for mu in Point::ALL {
            for p in Point::ALL {
                let e = fam.restriction(mu, p);
                let rhs = e.substitute_all(&inv_az)?.neg();
                out.push(probe(format!("bar E({mu})|_{p}"), &e.bar_v(), &rhs, target)?);
            }
        }
        let flop = |b: Point, at: Point| -> Result<Series> { Ok(fam.dual_restriction(b, at)?.bar_v()) };
        out.extend(duality_probes(&fam, &stab, ctx, target, "opposite duality", flop, true)?);
        Ok(out)
    })
}

fn targ(lat: Lattice, q: i64, a: i64, z: i64, v: i64) -> Result<ThetaArg> {
    Ok(ThetaArg::ints(lat, q, a, z, v)?)
}

/// Both sides of the five-theta identity times `q^{1/2} (q;q)^4`.
pub fn theta_identity_sides(ctx: &ThetaCtx, parity: u8) -> Result<(Series, Series)> {
    let lat = ctx.lattice;
    let t = |a, z, v| targ(lat, 0, a, z, v);
    let th = |a, z, v| -> Result<Series> { Ok(ctx.theta01(parity, t(a, z, v)?)?) };
    let common = ctx.tilde_product(&[t(1, 0, -1)?, t(0, 1, 1)?, t(1, 1, 0)?])?;
    let left = ctx
        .tilde(t(1, -1, 2)?)?
        .mul(&th(-1, 1, 1)?)?
        .add(&ctx.tilde(t(-1, 1, 2)?)?.mul(&th(1, -1, 1)?)?)?;
    let lhs = common.mul(&left)?;
    let right = ctx
        .tilde_product(&[t(-2, 0, 0)?, t(-1, 2, 1)?, t(0, 1, -1)?])?
        .add(&ctx.tilde_product(&[t(0, -2, 0)?, t(-2, 1, 1)?, t(-1, 0, -1)?])?)?;
    let rhs = right.mul(&ctx.tilde(t(0, 0, -2)?)?)?.mul(&th(0, 0, 1)?)?;
    Ok((lhs, rhs))
}

/// `f_{A,B}(b, c, d)`.
pub fn f_ab(a: i64, b: i64, x: Q, c: Q, d: Q) -> Q {
    let (a, b) = (Q::from(a), Q::from(b));
    let ch = c + rat(1, 2);
    rat(21, 2) * x * x + ((a + b) / 2 - 3) * x + a * a / 8 - a * b / 12 + b * b / 8 + rat(1, 4) + rat(3, 2) * ch * ch + d * d * 3
}

/// Partial sum of `(-1)^{[c]} q^{f}` over `c` in `Z + lambda`, `|c| <= r`,
/// as exponent multiplicities.
fn cancel_sum(a: i64, b: i64, x: Q, d: Q, lambda: Q, r: i64) -> BTreeMap<Q, i64> {
    let mut out = BTreeMap::new();
    for n in -r..=r {
        let c = Q::from(n) + lambda;
        *out.entry(f_ab(a, b, x, c, d)).or_insert(0) += if n.rem_euclid(2) == 0 { 1 } else { -1 };
    }
    out.retain(|_, n| *n != 0);
    out
}

pub fn check_theta_identity(parity: u8, lat: Lattice, target: i64) -> Result<Vec<CheckOutcome>> {
    let mut out = only(lat, target, Budgets::NONE, |ctx| {
        let (lhs, rhs) = theta_identity_sides(ctx, parity)?;
        Ok(vec![probe(format!("five-theta identity, eps = {parity}"), &lhs, &rhs, target)?])
    })?;

    let sixths: Vec<Q> = (-6..=6).map(|k| rat(k, 6)).collect();
    let mut symmetric = true;
    for a in -2..=2 {
        for b in -2..=2 {
            for &x in &sixths {
                for &c in &sixths {
                    for &d in &sixths {
                        symmetric &= f_ab(a, b, x, -c - 1, d) == f_ab(a, b, x, c, d);
                    }
                }
            }
        }
    }
    out.push(CheckOutcome::new("f_{A,B} symmetric under c -> -1 - c", symmetric));

    // the windows Z + lambda, |c| <= r and Z - lambda, |c| <= r map onto each
    // other up to one boundary term, so compare well inside
    let mut cancels = true;
    for lambda in [rat(0, 1), rat(1, 3), rat(1, 6), rat(1, 2)] {
        let plus = cancel_sum(1, 2, rat(1, 6), rat(1, 3), lambda, 12);
        let minus = cancel_sum(1, 2, rat(1, 6), rat(1, 3), -lambda, 12);
        let bound = f_ab(1, 2, rat(1, 6), Q::from(10), rat(1, 3));
        for (e, n) in plus.iter().filter(|(e, _)| **e < bound) {
            cancels &= minus.get(e).copied().unwrap_or(0) == -n;
        }
    }
    out.push(CheckOutcome::new("sum over Z + lambda cancels against Z - lambda", cancels));
    Ok(out)
}

/// Rank and one solution of `M x = b` over Q, `None` when inconsistent.
pub(crate) fn solve(mut rows: Vec<(Vec<BigRational>, BigRational)>, n: usize) -> Option<(usize, Vec<BigRational>)> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i].0[col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = BigRational::from_integer(1.into()) / rows[r].0[col].clone();
        let (pr, pb) = (rows[r].0.iter().map(|x| x * &inv).collect::<Vec<_>>(), &rows[r].1 * &inv);
        rows[r] = (pr, pb);
        for i in 0..rows.len() {
            if i != r && !rows[i].0[col].is_zero() {
                let f = rows[i].0[col].clone();
                let (pr, pb) = rows[r].clone();
                for (x, y) in rows[i].0.iter_mut().zip(pr.iter()) {
                    *x -= &f * y;
                }
                rows[i].1 -= &f * &pb;
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|(_, b)| !b.is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rows[i].1.clone();
    }
    Some((r, x))
}

fn rank(rows: &[Vec<BigRational>], n: usize) -> usize {
    solve(rows.iter().map(|r| (r.clone(), BigRational::zero())).collect(), n).map_or(0, |(r, _)| r)
}

/// Coefficient rows of the series `cols[k]`, one per monomial.
fn coefficient_rows(cols: &[Series], keep: impl Fn(&Monomial) -> bool) -> Vec<(Monomial, Vec<BigRational>)> {
    let mons: BTreeSet<Monomial> = cols.iter().flat_map(|s| s.terms().map(|(m, _)| *m)).filter(|m| keep(m)).collect();
    mons.into_iter().map(|m| (m, cols.iter().map(|s| s.coeff(&m)).collect())).collect()
}

fn unit(n: usize, support: &[usize]) -> Vec<BigRational> {
    (0..n).map(|i| big(support.contains(&i) as i64)).collect()
}

fn satisfies(rows: &[Vec<BigRational>], x: &[BigRational]) -> bool {
    rows.iter().all(|r| r.iter().zip(x).map(|(a, b)| a * b).sum::<BigRational>().is_zero())
}

/// `J = sum (-1)^{l+m} q^{(l+1/2)^2/2 + (m+1/2)^2/2} v^{2m+1} z^{2m+1} a^{2l+1}`.
fn j_sum(ctx: &ThetaCtx) -> Result<Series> {
    lattice_sum(ctx, 0.5, |[l, m]| {
        let (lh, mh) = (Q::from(l) + rat(1, 2), Q::from(m) + rat(1, 2));
        Summand { sign: if (l + m).rem_euclid(2) == 0 { 1 } else { -1 }, q: (lh * lh + mh * mh) / 2, a: lh * 2, z: mh * 2, v: mh * 2 }
    })
}

/// Linear constraints on placeholder `h` coefficients from the off-diagonal
/// and the `([2],[2])` duality components, with `h^p = f0 = 1`.
pub fn check_h_constraints(lat: Lattice, target: i64) -> Result<Vec<CheckOutcome>> {
    let ctx = ThetaCtx::new(lat, target, Budgets::NONE);
    let swap = VarMap::swap_az(lat);
    let mut out = Vec::new();
    let (two, oo) = (Point::Two, Point::OneOne);

    // ([1,1],[2]): E([2])|_[1,1] E^!([1,1])|_[1,1] + E([1,1])|_[1,1] E^!([2])|_[1,1]
    let e11 = e11_sum(&ctx, oo)?;
    let e11_swapped = e11.substitute_all(&swap)?;
    let mut cols = Vec::new();
    for k in 0..8 {
        let l = h_class(&ctx, oo, k)?;
        cols.push(l.mul(&e11_swapped)?.add(&e11.mul(&l.substitute_all(&swap)?)?)?);
    }
    let w = cols.iter().map(|s| s.watermark()).min().unwrap_or(Watermark::Infinite);
    let rows = coefficient_rows(&cols, |_| true);
    let plain: Vec<Vec<BigRational>> = rows.iter().map(|(_, r)| r.clone()).collect();
    let r = rank(&plain, 8);
    let kernel = satisfies(&plain, &unit(8, &[0, 4])) && satisfies(&plain, &unit(8, &[2, 6]));
    out.push(
        CheckOutcome::new("([1,1],[2]) forces h_odd = 0, h_0 = h_4, h_2 = h_6", r == 6 && kernel)
            .with_order(lat, w)
            .with_detail(format!("rank {r} of 8")),
    );
    // h_1 = 0 should follow from the rows at the first order where h_1 enters
    let lowest = cols[1].min_q();
    let mut forced_at = None;
    let e1 = unit(8, &[1]);
    let mut acc: Vec<Vec<BigRational>> = Vec::new();
    for (m, row) in &rows {
        acc.push(row.clone());
        let mut with = acc.clone();
        with.push(e1.clone());
        if rank(&with, 8) == rank(&acc, 8) {
            forced_at = Some(m.q);
            break;
        }
    }
    out.push(
        CheckOutcome::new("h_1 = 0 is forced at the lowest order", forced_at.is_some() && forced_at == lowest)
            .with_detail(format!("forced at q^{}", forced_at.map_or("-".into(), |q| lat.to_ratio(q).to_string()))),
    );

    // ([2],[2]) with h^[1,1] = (alpha, 0, beta, 0, alpha, 0, beta, 0)
    let (alpha, beta) = (2, -1);
    let h11: Vec<i64> = (0..8).map(|k| [alpha, 0, beta, 0][k % 4]).collect();
    let mut e2_oo = Series::zero(lat);
    for (k, h) in h11.iter().enumerate() {
        if *h != 0 {
            e2_oo = e2_oo.add(&h_class(&ctx, oo, k)?.scale_int(*h))?;
        }
    }
    let known = e11_sum(&ctx, two)?.mul(&e2_oo.substitute_all(&swap)?)?;
    let mut cols = Vec::new();
    for k in 0..8 {
        cols.push(h_class(&ctx, two, k)?.mul(&e11_swapped)?);
    }
    let d = lat.den();
    let even = |m: &Monomial| (m.z / d) % 2 == 0 || (m.a / d) % 2 == 0;
    let mut all = cols.clone();
    all.push(known.clone());
    let system: Vec<(Vec<BigRational>, BigRational)> =
        coefficient_rows(&all, even).into_iter().map(|(_, mut r)| { let b = -r.pop().unwrap(); (r, b) }).collect();
    let expected: Vec<BigRational> = h11.iter().map(|h| big(*h)).collect();
    let solved = solve(system, 8);
    let unique = matches!(&solved, Some((8, x)) if *x == expected);
    out.push(
        CheckOutcome::new("([2],[2]) forces h^[2]_lambda = h^[1,1]_lambda", unique)
            .with_detail(match &solved {
                Some((r, _)) => format!("rank {r} of 8"),
                None => "inconsistent".into(),
            }),
    );

    let mut component = known;
    for (k, h) in h11.iter().enumerate() {
        if *h != 0 {
            component = component.add(&cols[k].scale_int(*h))?;
        }
    }
    let v = ThetaArg::ints(lat, 0, 0, 0, 1)?;
    let predicted = ctx.theta1(v)?.scale_int(alpha).sub(&ctx.theta0(v)?.scale_int(beta))?;
    out.push(probe("([2],[2]) component = Upsilon' J", &component, &predicted.mul(&j_sum(&ctx)?)?, target)?.outcome);
    let f = FCoeffs::new(Series::one(lat), Series::int(lat, -beta), Series::int(lat, alpha));
    let fam = EllFamily::build_unchecked(&f, &ctx, false)?;
    out.push(probe("Upsilon' matches the family", &predicted, &fam.upsilon, target)?.outcome);

    // 2x2 lattice-theta matrices at k = (A+B-2)/4
    for k in [rat(-3, 4), rat(-1, 4), rat(1, 4), rat(3, 4)] {
        let part = |odd: i64| {
            lattice_sum::<1>(&ctx, 4.0, |[m]| {
                let mm = Q::from(2 * m + odd);
                Summand { sign: 1, q: (mm - k) * (mm - k), a: Q::zero(), z: Q::zero(), v: mm * 2 }
            })
        };
        let (ev, od) = (part(0)?, part(1)?);
        let det = ev.mul(&ev)?.sub(&od.mul(&od)?)?;
        let ok = match det.leading() {
            crate::series::Leading::Slice { slice, .. } => !slice.is_exact_zero(),
            _ => false,
        };
        out.push(CheckOutcome::new(format!("theta matrix invertible at k = {k}"), ok));
    }
    Ok(out)
}
