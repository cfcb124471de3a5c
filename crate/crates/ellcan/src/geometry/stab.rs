//! Elliptic stable bases of the Hilb^2 model and their K-theory limits.

use std::fmt;

use num::rational::Ratio;
use num::BigRational;

use super::laurent::exact_div;
use super::{DualPairModel, GeometryError, LaurentFraction, LaurentMatrix, Point, Result, Weight};
use crate::report::CheckOutcome;
use crate::series::{Budgets, Lattice, Monomial, Series, Var, VarMap, Watermark};
use crate::theta::{tilde_leading, LeadingRatio, ThetaArg, ThetaCtx, ThetaExpr, ThetaFraction};

/// Symbolic stable-basis matrix; `entries[restriction][basis]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabMatrix {
    pub lattice: Lattice,
    pub entries: [[ThetaExpr; 2]; 2],
}

impl StabMatrix {
    /// `Stab(basis)|_restriction`.
    pub fn entry(&self, basis: Point, restriction: Point) -> &ThetaExpr {
        &self.entries[restriction.index()][basis.index()]
    }

    pub fn substitute_all(&self, map: &VarMap) -> Result<Self> {
        let lat = self.lattice;
        let e = &self.entries;
        let f = |x: &ThetaExpr| x.substitute_all(map, lat);
        Ok(StabMatrix { lattice: lat, entries: [[f(&e[0][0])?, f(&e[0][1])?], [f(&e[1][0])?, f(&e[1][1])?]] })
    }

    pub fn expand(&self, ctx: &ThetaCtx) -> Result<[[ThetaFraction; 2]; 2]> {
        let e = &self.entries;
        let f = |x: &ThetaExpr| x.expand(ctx);
        Ok([[f(&e[0][0])?, f(&e[0][1])?], [f(&e[1][0])?, f(&e[1][1])?]])
    }
}

fn arg(lat: Lattice, a: i64, z: i64, v: i64) -> ThetaArg {
    ThetaArg::ints(lat, 0, a, z, v).expect("nontrivial argument")
}

/// The explicit matrix for the self-dual Hilb^2 model.
pub fn stab_ell(lat: Lattice) -> StabMatrix {
    let t = |args: &[(i64, i64, i64)]| ThetaExpr::thetas(&args.iter().map(|&(a, z, v)| arg(lat, a, z, v)).collect::<Vec<_>>());
    let top_two = t(&[(-2, 0, 0), (0, -2, -2)]);
    let bottom_one_one = t(&[(-2, 0, -2), (0, -2, 0)]);
    let off = t(&[(0, 0, -2)])
        .mul(&t(&[(-2, 0, 0), (-1, 2, 1), (0, 1, -1)]).add(&t(&[(-1, 0, -1), (-2, 1, 1), (0, -2, 0)])))
        .over(&[arg(lat, 1, 0, -1), arg(lat, 0, 1, 1)]);
    StabMatrix { lattice: lat, entries: [[top_two, off], [ThetaExpr::zero(), bottom_one_one]] }
}

/// Stable basis of the dual side, read off by exchanging `a` and `z`.
pub fn stab_dual(stab: &StabMatrix) -> Result<StabMatrix> {
    stab.substitute_all(&VarMap::swap_az(stab.lattice))
}

/// `Stab_{-X}(p1)|_{p2} = Stab_X(flop p1)|_{flop p2}` with `a -> a^{-1}`.
pub fn stab_opposite(model: &DualPairModel, stab: &StabMatrix) -> Result<StabMatrix> {
    let inv = stab.substitute_all(&VarMap::invert(stab.lattice, &[Var::A]))?;
    let mut entries = inv.entries.clone();
    for r in Point::ALL {
        for b in Point::ALL {
            entries[r.index()][b.index()] = inv.entry(model.flop(b), model.flop(r)).clone();
        }
    }
    Ok(StabMatrix { lattice: stab.lattice, entries })
}

/// Diagonal entries against `theta(N_{p,-}) theta(N_{p^!,-})`, and the
/// vanishing entry below the diagonal.
pub fn check_normalization(model: &DualPairModel, stab: &StabMatrix, ctx: &ThetaCtx) -> Result<Vec<CheckOutcome>> {
    let lat = stab.lattice;
    let mut out = Vec::new();
    for p in Point::ALL {
        let mut args: Vec<ThetaArg> = model.x.n_minus(p).iter().map(|w| model.x.theta_arg(*w, lat)).collect();
        let pd = model.to_dual(p);
        args.extend(model.dual.n_minus(pd).iter().map(|w| model.dual.theta_arg(*w, lat)));
        let want = ThetaExpr::thetas(&args);
        let symbolic = *stab.entry(p, p) == want;
        let cmp = stab.entry(p, p).expand(ctx)?.tf_equal(&want.expand(ctx)?, ctx)?;
        out.push(
            CheckOutcome::new(format!("Stab({p})|_{p} = theta(N_-) theta(N^!_-)"), symbolic && cmp.equal)
                .with_order(lat, cmp.below)
                .with_residual(&cmp.residual),
        );
    }
    out.push(CheckOutcome::new("Stab([2])|_[1,1] = 0", stab.entry(Point::Two, Point::OneOne).is_zero()));
    Ok(out)
}

/// Which equivariant or Kähler variable a unit q-shift acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftVar {
    A,
    Z,
    V,
}

impl ShiftVar {
    pub const ALL: [ShiftVar; 3] = [ShiftVar::A, ShiftVar::Z, ShiftVar::V];

    pub fn var(self) -> Var {
        match self {
            ShiftVar::A => Var::A,
            ShiftVar::Z => Var::Z,
            ShiftVar::V => Var::V,
        }
    }
}

/// Expected multiplier of `Stab(p2)|_{p1} / theta(N_{p1,-}) theta(N_{p2^!,-})`
/// under `var -> q^k var`.
pub fn qdiff_factor(model: &DualPairModel, var: ShiftVar, k: i64, p1: Point, p2: Point, lat: Lattice) -> Monomial {
    let (x, y) = (&model.x, &model.dual);
    match var {
        ShiftVar::A => {
            let r = y.line_bundle(model.to_dual(p1), k, 0) * y.line_bundle(model.to_dual(p2), k, 0).dual();
            y.monomial(r, lat)
        }
        ShiftVar::Z => {
            let r = x.line_bundle(p2, k, 0) * x.line_bundle(p1, k, 0).dual();
            x.monomial(r, lat)
        }
        ShiftVar::V => {
            let mx = x.det_n_minus(p2) * x.det_n_minus(p1).dual();
            let my = y.det_n_minus(model.to_dual(p1)) * y.det_n_minus(model.to_dual(p2)).dual();
            let m = x.monomial(mx, lat).mul(&y.monomial(my, lat)).scale(k);
            // v -> q^{k/2} v inside the k-th power
            m.mul(&Monomial::q(k * m.v / 2))
        }
    }
}

/// Runs the three q-difference equations for `var -> q^k var` on every
/// nonzero entry, raising the expansion order until the comparison is
/// exact below `target_order` (in units of q).
pub fn check_stab_qdiff(
    model: &DualPairModel,
    stab: &StabMatrix,
    var: ShiftVar,
    k: i64,
    target_order: i64,
) -> Result<Vec<CheckOutcome>> {
    let lat = stab.lattice;
    let d = lat.den();
    let t = k * d;
    let mut out = Vec::new();
    for p1 in Point::ALL {
        for p2 in Point::ALL {
            let entry = stab.entry(p2, p1);
            let name = format!("delta_{:?}^{k} on Stab({p2})|_{p1}", var).to_lowercase();
            if entry.is_zero() {
                out.push(CheckOutcome::new(name, true).with_detail("entry vanishes").with_order(lat, Watermark::Infinite));
                continue;
            }
            let mut den: Vec<ThetaArg> = model.x.n_minus(p1).iter().map(|w| model.x.theta_arg(*w, lat)).collect();
            den.extend(model.dual.n_minus(model.to_dual(p2)).iter().map(|w| model.dual.theta_arg(*w, lat)));
            let f = entry.clone().over(&den);
            let factor = qdiff_factor(model, var, k, p1, p2, lat);
            let mut order = target_order * d;
            let outcome = loop {
                let ctx = ThetaCtx::new(lat, order, Budgets::only(var.var(), t.abs()));
                let ff = f.expand(&ctx)?;
                let lhs = ff.shift(var.var(), t)?;
                let rhs = ff.mul_monomial(&factor);
                // the lifted denominators are not shifted again, so no budgets here
                let cmp = lhs.tf_equal(&rhs, &ctx.with_budgets(Budgets::NONE))?;
                let reached = cmp.below >= Watermark::Finite(target_order * d);
                if !cmp.equal || reached || order > (target_order + 16) * d {
                    break CheckOutcome::new(name.clone(), cmp.equal && reached)
                        .with_order(lat, cmp.below)
                        .with_residual(&cmp.residual)
                        .with_detail(format!("factor {}", crate::series::format_monomial(lat, &factor)));
                }
                order += d;
            };
            out.push(outcome);
        }
    }
    Ok(out)
}

/// `sigma(p1) Stab(p1)|_{p2} = sigma(p2^!) Stab^!(p2^!)|_{p1^!}` for all pairs.
pub fn check_sigma_duality(model: &DualPairModel, stab: &StabMatrix, dual: &StabMatrix, ctx: &ThetaCtx) -> Result<Vec<CheckOutcome>> {
    let lat = stab.lattice;
    let mut out = Vec::new();
    for p1 in Point::ALL {
        for p2 in Point::ALL {
            let s1 = model.sigma(p1);
            let s2 = model.sigma(p2);
            let one = |s: i64| BigRational::from_integer(s.into());
            let lhs = stab.entry(p1, p2).scale(&one(s1), &Monomial::ONE);
            let rhs = dual.entry(model.to_dual(p2), model.to_dual(p1)).scale(&one(s2), &Monomial::ONE);
            let name = format!("sigma duality at ({p1}, {p2})");
            if lhs.is_zero() || rhs.is_zero() {
                out.push(CheckOutcome::new(name, lhs.is_zero() && rhs.is_zero()).with_order(lat, Watermark::Infinite));
                continue;
            }
            let cmp = lhs.expand(ctx)?.tf_equal(&rhs.expand(ctx)?, ctx)?;
            out.push(CheckOutcome::new(name, cmp.equal).with_order(lat, cmp.below).with_residual(&cmp.residual));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeKind {
    Generic,
    IntegerWall,
    HalfIntegerWall,
}

/// A rational slope on the exponent lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slope {
    lattice: Lattice,
    numerator: i64,
}

impl Slope {
    pub fn new(lattice: Lattice, r: Ratio<i64>) -> Result<Self> {
        let numerator = lattice.from_ratio(r).map_err(|_| GeometryError::SlopeOffLattice(r.to_string()))?;
        Ok(Slope { lattice, numerator })
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.lattice.to_ratio(self.numerator)
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn numerator(&self) -> i64 {
        self.numerator
    }

    pub fn kind(&self) -> SlopeKind {
        let h = self.lattice.den() / 2;
        if self.numerator.rem_euclid(h) != 0 {
            SlopeKind::Generic
        } else if self.numerator.rem_euclid(2 * h) == 0 {
            SlopeKind::IntegerWall
        } else {
            SlopeKind::HalfIntegerWall
        }
    }

    /// `m` with `m <= s < m + 1`.
    pub fn floor(&self) -> i64 {
        self.numerator.div_euclid(self.lattice.den())
    }

    /// Whether `s - floor(s) < 1/2`.
    pub fn lower_half(&self) -> bool {
        self.numerator.rem_euclid(self.lattice.den()) < self.lattice.den() / 2
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ratio())
    }
}

/// `lim_{q -> 0} delta_z^{-s} expr`.
pub fn k_limit(expr: &ThetaExpr, s: Slope) -> Result<LaurentFraction> {
    let lat = s.lattice;
    let shifted = expr.shift(Var::Z, -s.numerator, lat)?;
    match shifted.leading_ratio(lat)? {
        LeadingRatio::Zero => Ok(LaurentFraction::zero(lat)),
        LeadingRatio::Ratio { order, num, .. } => {
            if order > 0 {
                Ok(LaurentFraction::zero(lat))
            } else if order == 0 {
                // cancel the denominator factor by factor; the leading slices
                // of the thetas below are the irreducible pieces
                let mut num = num;
                let mut rest = Series::one(lat);
                for a in &shifted.den {
                    let (_, slice) = tilde_leading(lat, *a)?;
                    match exact_div(&num, &slice) {
                        Some(q) => num = q,
                        None => rest = rest.mul(&slice)?,
                    }
                }
                LaurentFraction::new(num, rest)
            } else {
                Err(GeometryError::Divergent(lat.to_ratio(order).to_string()))
            }
        }
    }
}

/// `sqrt(L(kappa)) (x) Stab^K_{X,s}` in restriction coordinates.
pub fn k_stab(model: &DualPairModel, stab: &StabMatrix, s: Slope) -> Result<LaurentMatrix> {
    let lat = stab.lattice;
    let pref = Monomial::new(0, 0, 0, -lat.den() / 2);
    let mut cols = Vec::new();
    for b in Point::ALL {
        let den: Vec<ThetaArg> = model
            .dual
            .n_minus(model.to_dual(b))
            .iter()
            .map(|w| model.dual.theta_arg(*w * Weight::new(1, 0), lat))
            .collect();
        let mut col = Vec::new();
        for r in Point::ALL {
            let lim = k_limit(&stab.entry(b, r).clone().over(&den), s)?;
            col.push(lim.mul_monomial(&pref, -1));
        }
        cols.push([col[0].clone(), col[1].clone()]);
    }
    Ok(LaurentMatrix::from_columns(cols[0].clone(), cols[1].clone()))
}

/// The opposite chamber: conjugation by the swap and `a -> a^{-1}`.
pub fn k_stab_opposite(k: &LaurentMatrix, lat: Lattice) -> Result<LaurentMatrix> {
    Ok(k.substitute_all(&VarMap::invert(lat, &[Var::A]))?.swapped())
}

fn poly(lat: Lattice, terms: &[(i64, i64, i64, i64)]) -> Series {
    Series::exact(lat, terms.iter().map(|&(c, a, z, v)| (c, Monomial::new(0, a, z, v))))
}

/// Closed forms of `sqrt(L(kappa)) (x) Stab^K_{X,s}` for the Hilb^2 model.
pub fn k_stab_closed_form(s: Slope) -> LaurentMatrix {
    let lat = s.lattice;
    let d = lat.den();
    let m = s.floor();
    let k = if s.lower_half() { 2 * m } else { 2 * m + 1 };
    let vk = Monomial::new(0, 0, 0, k * d);
    let lf = |terms: &[(i64, i64, i64, i64)]| LaurentFraction::poly(poly(lat, terms)).expect("exact");
    let frac = |n: &[(i64, i64, i64, i64)], dd: &[(i64, i64, i64, i64)]| {
        LaurentFraction::new(poly(lat, n), poly(lat, dd)).expect("exact")
    };
    let a_minus = lf(&[(1, d, 0, 0), (-1, -d, 0, 0)]);
    let v_minus = lf(&[(1, 0, 0, d), (-1, 0, 0, -d)]);
    let va = lf(&[(1, d, 0, d), (-1, -d, 0, -d)]);
    let one = LaurentFraction::one(lat);
    let zero = LaurentFraction::zero(lat);
    // 1 - v z^{-2}
    let wall_den = [(1, 0, 0, 0), (-1, 0, -2 * d, d)];
    let (f2, top, bottom) = match s.kind() {
        SlopeKind::Generic => {
            let apow = if s.lower_half() { -2 * m } else { -2 * m - 2 };
            (one.clone(), v_minus.mul_monomial(&Monomial::new(0, apow * d, 0, 0), 1), va.clone())
        }
        kind => {
            let f2 = frac(&[(1, 0, 0, 0), (-1, 0, -2 * d, -2 * d)], &[(1, 0, 0, 0), (-1, 0, -2 * d, -d)]);
            let top_factor = if kind == SlopeKind::IntegerWall {
                // (1 + a z^{-1})(1 - a^{-1} z^{-1})
                frac(&[(1, 0, 0, 0), (1, d, -d, 0), (-1, -d, -d, 0), (-1, 0, -2 * d, 0)], &wall_den)
                    .mul_monomial(&Monomial::new(0, -2 * m * d, 0, 0), 1)
            } else {
                // (a^{-1} + z^{-1})(1 - a z^{-1})
                frac(&[(1, -d, 0, 0), (1, 0, -d, 0), (-1, 0, -d, 0), (-1, d, -2 * d, 0)], &wall_den)
                    .mul_monomial(&Monomial::new(0, (-2 * m - 1) * d, 0, 0), 1)
            };
            let bottom_factor = frac(&[(1, 0, 0, 0), (-1, 0, -2 * d, 0)], &wall_den);
            (f2, v_minus.mul(&top_factor), va.mul(&bottom_factor))
        }
    };
    LaurentMatrix::from_columns([a_minus.mul(&f2), zero], [top, bottom]).map(|x| x.mul_monomial(&vk, 1))
}
