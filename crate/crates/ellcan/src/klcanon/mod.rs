//! K-theoretic bar involution and canonical bases of the Hilb^2 model at any
//! slope, the wall-crossing generators, and the resulting index set.

pub mod qa;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigRational, Signed, Zero};
use thiserror::Error;

use crate::geometry::stab::{k_stab, k_stab_opposite, StabMatrix};
use crate::geometry::{DualPairModel, GeometryError, LaurentFraction, LaurentMatrix, Point, Slope, SlopeKind, Weight};
use crate::report::CheckOutcome;
use crate::series::{Lattice, Monomial, Series, Var};
use qa::{RatA, UPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KlError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("no canonical basis with v-degrees in [-{window}, {window}]")]
    NoSolution { window: i64 },
    #[error("canonical basis not unique: rank {rank} of {unknowns}")]
    NotUnique { rank: usize, unknowns: usize },
    #[error("{0} is not a Laurent polynomial in a and v")]
    NotLaurent(String),
    #[error("slope {0} is not generic")]
    NotGeneric(String),
    #[error("slope {0} is not on a wall")]
    NotWall(String),
}

pub type Result<T> = std::result::Result<T, KlError>;

/// Restriction coordinates of a class.
pub type KClass = [LaurentFraction; 2];

/// Stable bases on both sides of the chamber at one slope.
#[derive(Debug, Clone)]
pub struct BarData {
    pub slope: Slope,
    pub s_plus: LaurentMatrix,
    pub s_minus: LaurentMatrix,
    pub dim_half: u32,
}

fn minus_v(lat: Lattice) -> LaurentFraction {
    LaurentFraction::monomial(lat, Monomial::new(0, 0, 0, lat.den()), -1)
}

impl BarData {
    pub fn at_slope(model: &DualPairModel, stab: &StabMatrix, s: Slope) -> Result<Self> {
        let lat = stab.lattice;
        let s_plus = k_stab(model, stab, s)?;
        let s_minus = k_stab_opposite(&s_plus, lat)?;
        Ok(BarData { slope: s, s_plus, s_minus, dim_half: (model.x.dim / 2) as u32 })
    }

    pub fn lattice(&self) -> Lattice {
        self.s_plus.get(0, 0).lattice()
    }

    fn twist(&self) -> LaurentFraction {
        let lat = self.lattice();
        (0..self.dim_half).fold(LaurentFraction::one(lat), |acc, _| acc.mul(&minus_v(lat)))
    }

    /// Matrix of the bar involution in stable coordinates, `(-v)^{d} S^{-1} S^-`.
    pub fn bar_matrix(&self) -> Result<LaurentMatrix> {
        Ok(self.s_plus.inverse()?.mul(&self.s_minus).scale(&self.twist()))
    }
}

/// `x = S c  ->  (-v)^{d} S^- bar(c)`.
pub fn bar_apply(bd: &BarData, x: &KClass) -> Result<KClass> {
    let c = bd.s_plus.inverse()?.apply(x);
    let cb = [c[0].bar_v(), c[1].bar_v()];
    let out = bd.s_minus.apply(&cb);
    let t = bd.twist();
    Ok([out[0].mul(&t), out[1].mul(&t)])
}

pub fn default_window(s: Slope) -> i64 {
    4 * s.floor().abs() + 8
}

/// A canonical basis together with `E^{-1} S`.
#[derive(Debug, Clone)]
pub struct CanonicalSolution {
    pub basis: LaurentMatrix,
    pub transition: LaurentMatrix,
}

type VPoly = BTreeMap<i64, RatA>;

/// Groups an exact z-free series by powers of v, with integral powers of a
/// carried into Q(a).
fn to_vpoly(s: &Series) -> Result<VPoly> {
    let d = s.lattice().den();
    let mut out: BTreeMap<i64, RatA> = BTreeMap::new();
    for (m, c) in s.terms() {
        if m.z != 0 || m.q != 0 || m.a % d != 0 {
            return Err(KlError::NotLaurent(s.to_string()));
        }
        let term = RatA::monomial(m.a / d, c.clone());
        let e = out.entry(m.v).or_insert_with(RatA::zero);
        *e = e.add(&term);
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

fn rata_series(p: &UPoly, lat: Lattice, shift: &Monomial) -> Series {
    let d = lat.den();
    let mut s = Series::zero(lat);
    for (i, c) in p.coeffs().iter().enumerate() {
        if !c.is_zero() {
            let m = Monomial::new(0, i as i64 * d, 0, 0).mul(shift);
            s = s.add(&Series::monomial(lat, m, c.clone())).expect("shared lattice");
        }
    }
    s
}

fn rata_fraction(x: &RatA, lat: Lattice, vpow: i64) -> LaurentFraction {
    let v = Monomial::new(0, 0, 0, vpow);
    LaurentFraction::new(rata_series(x.num(), lat, &v), rata_series(x.den(), lat, &Monomial::ONE))
        .expect("nonzero denominator")
}

fn polynomial(x: &LaurentFraction) -> Result<Series> {
    x.as_polynomial().cloned().ok_or_else(|| KlError::NotLaurent(x.to_string()))
}

/// Solves for the canonical basis at a generic slope. The unknown is the
/// transition `G = E^{-1} S`, with `G - 1` spanned by `v^{-1} .. v^{-window}`
/// over Q(a); bar invariance reads `G R = bar(G)` with `R` the bar matrix.
pub fn canonical_solve(bd: &BarData, window: i64) -> Result<CanonicalSolution> {
    if bd.slope.kind() != SlopeKind::Generic {
        return Err(KlError::NotGeneric(bd.slope.to_string()));
    }
    let lat = bd.lattice();
    let d = lat.den();
    let kmax = window as usize;
    let det = to_vpoly(&polynomial(&bd.s_plus.det())?)?;
    let nmat = bd.s_plus.adjugate().mul(&bd.s_minus).scale(&bd.twist());
    let mut n = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            n.push(to_vpoly(&polynomial(nmat.get(i, j))?)?);
        }
    }
    let nn = |l: usize, j: usize, e: i64| n[l * 2 + j].get(&e).cloned().unwrap_or_else(RatA::zero);
    let pp = |e: i64| det.get(&e).cloned().unwrap_or_else(RatA::zero);
    let unknowns = 4 * kmax;
    let idx = |i: usize, l: usize, k: usize| (i * 2 + l) * kmax + (k - 1);
    let mut rows = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let mut exps = BTreeSet::new();
            for l in 0..2 {
                for e in n[l * 2 + j].keys() {
                    for k in 0..=kmax as i64 {
                        exps.insert(e - k * d);
                    }
                }
            }
            for e in det.keys() {
                for k in 0..=kmax as i64 {
                    exps.insert(e + k * d);
                }
            }
            for e in exps {
                let mut coef = vec![RatA::zero(); unknowns];
                for l in 0..2 {
                    for k in 1..=kmax {
                        coef[idx(i, l, k)] = coef[idx(i, l, k)].add(&nn(l, j, e + k as i64 * d));
                    }
                }
                for k in 1..=kmax {
                    coef[idx(i, j, k)] = coef[idx(i, j, k)].sub(&pp(e - k as i64 * d));
                }
                let mut rhs = nn(i, j, e).neg();
                if i == j {
                    rhs = rhs.add(&pp(e));
                }
                if coef.iter().all(RatA::is_zero) && rhs.is_zero() {
                    continue;
                }
                rows.push((coef, rhs));
            }
        }
    }
    let (rank, x) = qa::solve(rows, unknowns).ok_or(KlError::NoSolution { window })?;
    if rank < unknowns {
        return Err(KlError::NotUnique { rank, unknowns });
    }
    let mut g = LaurentMatrix::identity(lat);
    for i in 0..2 {
        for l in 0..2 {
            for k in 1..=kmax {
                let c = &x[idx(i, l, k)];
                if !c.is_zero() {
                    g.entries[i][l] = g.entries[i][l].add(&rata_fraction(c, lat, -(k as i64) * d));
                }
            }
        }
    }
    let basis = bd.s_plus.mul(&g.inverse()?);
    Ok(CanonicalSolution { basis, transition: g })
}

fn laurent(lat: Lattice, terms: &[(i64, i64, i64, i64)]) -> LaurentFraction {
    let d = lat.den();
    LaurentFraction::poly(Series::exact(lat, terms.iter().map(|&(c, a, z, v)| (c, Monomial::new(0, a * d, z * d, v * d)))))
        .expect("exact")
}

/// `sqrt(L(kappa)) (x) E^K_s` at a generic slope, in closed form.
pub fn canonical_closed_form(s: Slope) -> Result<LaurentMatrix> {
    if s.kind() != SlopeKind::Generic {
        return Err(KlError::NotGeneric(s.to_string()));
    }
    let lat = s.lattice();
    let m = s.floor();
    let l = |c: i64, a: i64, v: i64| laurent(lat, &[(c, a, 0, v)]);
    Ok(if s.lower_half() {
        LaurentMatrix::from_columns([l(1, 1, 2 * m), l(1, 2 * m, 2 * m)], [l(1, -2 * m, 2 * m + 1), l(1, 1, 2 * m + 1)])
    } else {
        LaurentMatrix::from_columns(
            [l(1, 1, 2 * m + 1), l(1, 2 * m + 2, 2 * m + 1)],
            [l(1, -2 * m - 2, 2 * m + 2), l(1, 1, 2 * m + 2)],
        )
    })
}

/// `sqrt(L(kappa)) (x) E^K_s` on a wall, in closed form.
pub fn canonical_wall(s: Slope) -> Result<LaurentMatrix> {
    let lat = s.lattice();
    let m = s.floor();
    match s.kind() {
        SlopeKind::Generic => Err(KlError::NotWall(s.to_string())),
        SlopeKind::IntegerWall => Ok(LaurentMatrix::from_columns(
            [
                laurent(lat, &[(1, 1, 0, 2 * m), (-1, 0, -1, 2 * m)]),
                laurent(lat, &[(1, 2 * m, 0, 2 * m), (-1, 2 * m + 1, -1, 2 * m)]),
            ],
            [
                laurent(lat, &[(1, -2 * m, 0, 2 * m + 1), (-1, -2 * m + 1, -1, 2 * m - 1)]),
                laurent(lat, &[(1, 1, 0, 2 * m + 1), (-1, 0, -1, 2 * m - 1)]),
            ],
        )),
        SlopeKind::HalfIntegerWall => Ok(LaurentMatrix::from_columns(
            [laurent(lat, &[(1, 1, 0, 2 * m + 1)]), laurent(lat, &[(1, 2 * m + 2, 0, 2 * m + 1)])],
            [
                laurent(lat, &[(1, -2 * m - 2, 0, 2 * m + 2), (1, -2 * m, -2, 2 * m)]),
                laurent(lat, &[(1, 1, 0, 2 * m + 2), (1, -1, -2, 2 * m)]),
            ],
        )),
    }
}

/// Closed form at any slope.
pub fn canonical_basis(s: Slope) -> Result<LaurentMatrix> {
    match s.kind() {
        SlopeKind::Generic => canonical_closed_form(s),
        _ => canonical_wall(s),
    }
}

fn laurent_frac(lat: Lattice, num: &[(i64, i64, i64, i64)], den: &[(i64, i64, i64, i64)]) -> LaurentFraction {
    laurent(lat, num).div(&laurent(lat, den)).expect("nonzero denominator")
}

/// Closed form of `E^{-1} S` against `S` (`opposite = false`) or against
/// `-v S^-` (`opposite = true`).
pub fn transition_closed_form(s: Slope, opposite: bool) -> LaurentMatrix {
    let lat = s.lattice();
    let t = if opposite { 1 } else { -1 };
    let m = s.floor();
    let one = (1, 0, 0, 0);
    let f = |n: &[(i64, i64, i64, i64)], d: &[(i64, i64, i64, i64)]| laurent_frac(lat, n, d);
    match s.kind() {
        SlopeKind::Generic => {
            let (up, down) = if s.lower_half() { (-2 * m - 1, 2 * m - 1) } else { (-2 * m - 3, 2 * m + 1) };
            LaurentMatrix::from_columns(
                [laurent(lat, &[one]), laurent(lat, &[(-1, down, 0, t)])],
                [laurent(lat, &[(-1, up, 0, t)]), laurent(lat, &[one])],
            )
        }
        SlopeKind::IntegerWall => LaurentMatrix::from_columns(
            [
                f(&[one, (-1, -1, -1, 2 * t)], &[one, (-1, 0, -2, t)]),
                f(&[(-1, 2 * m - 1, 0, t), (1, 2 * m, -1, t)], &[one, (-1, 0, -2, t)]),
            ],
            [
                f(&[(-1, -2 * m - 1, 0, t), (1, -2 * m, -1, -t)], &[one, (-1, 0, -2, -t)]),
                f(&[one, (-1, -1, -1, 0)], &[one, (-1, 0, -2, -t)]),
            ],
        ),
        SlopeKind::HalfIntegerWall => LaurentMatrix::from_columns(
            [f(&[one, (1, -2, -2, 2 * t)], &[one, (-1, 0, -2, t)]), f(&[(-1, 2 * m + 1, 0, t)], &[one, (-1, 0, -2, t)])],
            [
                f(&[(-1, -2 * m - 3, 0, t), (-1, -2 * m - 1, -2, -t)], &[one, (-1, 0, -2, -t)]),
                f(&[one], &[one, (-1, 0, -2, -t)]),
            ],
        ),
    }
}

/// `-v S^-`, the second stable basis the transitions are taken against.
pub fn minus_v_opposite(bd: &BarData) -> LaurentMatrix {
    bd.s_minus.scale(&laurent(bd.lattice(), &[(-1, 0, 0, 1)]))
}

/// `E^{-1} S`.
pub fn transition(basis: &LaurentMatrix, stab: &LaurentMatrix) -> Result<LaurentMatrix> {
    Ok(basis.inverse()?.mul(stab))
}

/// Highest power of `v` as `v -> infinity`, treating the other variables as
/// generic; `None` for zero.
pub fn v_degree(x: &LaurentFraction) -> Option<i64> {
    let top = |s: &Series| s.degree_range(Var::V).map(|(_, hi)| hi);
    Some(top(x.num())? - top(x.den())?)
}

/// Bar invariance of each column, and at generic slopes the limit condition
/// on `E^{-1} S`.
pub fn check_canonical(bd: &BarData, basis: &LaurentMatrix) -> Result<Vec<CheckOutcome>> {
    let lat = bd.lattice();
    let mut out = Vec::new();
    for p in Point::ALL {
        let col = basis.column(p.index());
        let barred = bar_apply(bd, &col)?;
        out.push(CheckOutcome::new(format!("bar invariance of E({p}) at s={}", bd.slope), barred == col));
    }
    if bd.slope.kind() != SlopeKind::Generic {
        return Ok(out);
    }
    let t = transition(basis, &bd.s_plus)?;
    // G -> 1 as v -> infinity, which is the same as F -> 1 for F = G^{-1}
    let one = LaurentFraction::one(lat);
    for r in 0..2 {
        for c in 0..2 {
            let e = if r == c { t.get(r, c).sub(&one) } else { t.get(r, c).clone() };
            let ok = v_degree(&e).is_none_or(|deg| deg < 0);
            out.push(CheckOutcome::new(format!("E^-1 S ({r},{c}) tends to delta at s={}", bd.slope), ok).with_detail(t.get(r, c).to_string()));
        }
    }
    Ok(out)
}

/// `v^eps a^m O(n)` as a class of the model, before the `sqrt(L(kappa))` twist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanLabel {
    pub eps: i64,
    pub m: i64,
    pub n: i64,
}

impl fmt::Display for CanLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.eps {
            0 => String::new(),
            1 => "v ".into(),
            e => format!("v^{e} "),
        };
        write!(f, "{v}a^{} O({})", self.m, self.n)
    }
}

fn single_term(x: &LaurentFraction) -> Option<(Monomial, BigRational)> {
    let p = x.as_polynomial()?;
    let mut it = p.terms();
    let (m, c) = it.next()?;
    if it.next().is_some() {
        return None;
    }
    Some((*m, c.clone()))
}

/// Reads `sqrt(L(kappa)) (x) (+-v^eps a^m O(n))` back into a label and a sign.
pub fn label_of(model: &DualPairModel, col: &KClass) -> Option<(i64, CanLabel)> {
    let x = &model.x;
    let lat = col[0].lattice();
    let d = lat.den();
    let mut monos = Vec::new();
    let mut sign = None;
    for p in Point::ALL {
        let (m, c) = single_term(&col[p.index()])?;
        if m.z != 0 || c.abs() != BigRational::from_integer(1.into()) {
            return None;
        }
        let s = if c.is_positive() { 1 } else { -1 };
        if sign.is_some_and(|t| t != s) {
            return None;
        }
        sign = Some(s);
        let lk = x.l_kappa(p);
        // divide by sqrt(L(kappa)); exponents in units of 1/2
        let (v2, a2) = (2 * m.v / d - lk.v, 2 * m.a / d - lk.h);
        if (2 * m.v) % d != 0 || (2 * m.a) % d != 0 || v2 % 2 != 0 || a2 % 2 != 0 {
            return None;
        }
        monos.push(Weight::new(v2 / 2, a2 / 2));
    }
    let l0 = x.line[0];
    let l1 = x.line[1];
    // w_p = v^eps a^m L(1)|_p^n
    let dh = l1.h - l0.h;
    let diff = monos[1].h - monos[0].h;
    if dh == 0 || diff % dh != 0 || monos[1].v - monos[0].v != (l1.v - l0.v) * (diff / dh) {
        return None;
    }
    let n = diff / dh;
    let base = monos[0] * l0.pow(-n);
    Some((sign?, CanLabel { eps: base.v, m: base.h, n }))
}

/// One wall-crossing pairing, `plus ~ minus`, with the sign carried by the
/// `z^{-beta_max}` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WallPairing {
    pub point: Point,
    pub beta_max: i64,
    pub sign: i64,
    pub plus: CanLabel,
    pub minus: CanLabel,
}

/// Coefficient of `z^{-beta}`, with the power of z removed.
fn z_part(x: &LaurentFraction, beta: i64) -> Result<Series> {
    let d = x.lattice().den();
    let p = polynomial(x)?;
    Ok(p.part_with(Var::Z, -beta * d).mul_monomial(&Monomial::new(0, 0, beta * d, 0)))
}

fn z_betas(col: &KClass) -> Result<BTreeSet<i64>> {
    let d = col[0].lattice().den();
    let mut out = BTreeSet::new();
    for e in col {
        for (m, _) in polynomial(e)?.terms() {
            out.insert(-m.z / d);
        }
    }
    Ok(out)
}

fn part_class(col: &KClass, beta: i64) -> Result<KClass> {
    Ok([LaurentFraction::poly(z_part(&col[0], beta)?)?, LaurentFraction::poly(z_part(&col[1], beta)?)?])
}

/// Reads the pairing at a wall from the lowest power of `z` in the closed form.
pub fn wall_crossing_map(model: &DualPairModel, s: Slope) -> Result<Vec<WallPairing>> {
    let e = canonical_wall(s)?;
    let mut out = Vec::new();
    for p in Point::ALL {
        let col = e.column(p.index());
        let beta_max = *z_betas(&col)?.last().expect("nonzero column");
        let lead = part_class(&col, 0)?;
        let (_, plus) = label_of(model, &lead).ok_or_else(|| KlError::NotLaurent(lead[0].to_string()))?;
        let (sign, minus) = if beta_max == 0 {
            (1, plus)
        } else {
            let w = part_class(&col, beta_max)?;
            label_of(model, &w).ok_or_else(|| KlError::NotLaurent(w[0].to_string()))?
        };
        out.push(WallPairing { point: p, beta_max, sign, plus, minus });
    }
    Ok(out)
}

/// Coefficients of `x` in the basis `b`, required to be Laurent polynomials.
fn coefficients(b: &LaurentMatrix, x: &KClass) -> Result<[Series; 2]> {
    let c = b.inverse()?.apply(x);
    Ok([polynomial(&c[0])?, polynomial(&c[1])?])
}

fn v_signs(c: &[Series; 2], negative: bool) -> bool {
    c.iter().all(|s| {
        s.is_integral() && s.terms().all(|(m, _)| if negative { m.v < 0 } else { m.v > 0 })
    })
}

/// The wall form: `E_s = E_{s+} + sum z^{-beta} F_beta +- z^{-beta_max} wc(E_{s+})`
/// with the sign conditions on `F_beta` and `wc`, plus bar invariance.
pub fn check_wall_form(
    model: &DualPairModel,
    bd: &BarData,
    wall: &LaurentMatrix,
    e_plus: &LaurentMatrix,
    e_minus: &LaurentMatrix,
) -> Result<Vec<CheckOutcome>> {
    let s = bd.slope;
    let mut out = Vec::new();
    for p in Point::ALL {
        let col = wall.column(p.index());
        out.push(CheckOutcome::new(format!("s={s} E({p}) bar invariant"), bar_apply(bd, &col)? == col));
        let lead = part_class(&col, 0)?;
        out.push(CheckOutcome::new(format!("s={s} E({p}) starts with E_s+({p})"), lead == e_plus.column(p.index())));
        let betas = z_betas(&col)?;
        let beta_max = *betas.last().expect("nonzero column");
        let ok_range = betas.iter().all(|&b| b >= 0);
        out.push(CheckOutcome::new(format!("s={s} E({p}) has only nonpositive powers of z"), ok_range));
        for &b in betas.iter().filter(|&&b| b > 0 && b < beta_max) {
            let f = part_class(&col, b)?;
            let integral = (s.ratio() * b).is_integer();
            let plus = v_signs(&coefficients(e_plus, &f)?, true);
            let minus = v_signs(&coefficients(e_minus, &f)?, false);
            out.push(CheckOutcome::new(format!("s={s} E({p}) F_{b} sign conditions"), integral && plus && minus));
        }
        if beta_max > 0 {
            let w = part_class(&col, beta_max)?;
            let in_minus = label_of(model, &w).is_some_and(|(_, l)| {
                Point::ALL.iter().any(|q| {
                    label_of(model, &e_minus.column(q.index())).is_some_and(|(_, k)| k.eps == l.eps && k.n == l.n)
                })
            });
            let negative = v_signs(&coefficients(e_plus, &w)?, true);
            out.push(CheckOutcome::new(format!("s={s} E({p}) wall term lies in B_s-"), in_minus));
            out.push(CheckOutcome::new(format!("s={s} E({p}) wall term in v^-1 Z[v^-1] span of B_s+"), negative));
        }
    }
    Ok(out)
}

/// Partition of labels in a window into classes modulo the wall-crossing
/// relation and character twists.
#[derive(Debug, Clone)]
pub struct XiPartition {
    pub classes: Vec<BTreeSet<CanLabel>>,
    /// Fixed point attached to each class.
    pub iota: Vec<Option<Point>>,
}

impl XiPartition {
    pub fn class_of(&self, l: &CanLabel) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(l))
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Generating relations from every wall whose pairings land in the window.
/// Relations are generated on a padded window so that paths leaving the
/// requested one still count.
pub fn xi_classes(model: &DualPairModel, lat: Lattice, window: i64) -> Result<XiPartition> {
    let pad = window + 4;
    let labels: Vec<CanLabel> = (-1..=1)
        .flat_map(|eps| (-pad..=pad).flat_map(move |m| (-pad..=pad).map(move |n| CanLabel { eps, m, n })))
        .collect();
    let pos: BTreeMap<CanLabel, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let mut parent: Vec<usize> = (0..labels.len()).collect();
    let union = |x: &CanLabel, y: &CanLabel, parent: &mut Vec<usize>| {
        if let (Some(&i), Some(&j)) = (pos.get(x), pos.get(y)) {
            let (ri, rj) = (find(parent, i), find(parent, j));
            parent[ri] = rj;
        }
    };
    // character twists
    for l in &labels {
        union(l, &CanLabel { m: l.m + 1, ..*l }, &mut parent);
    }
    let reach = pad + 3;
    for k in (-2 * reach)..=(2 * reach) {
        let s = Slope::new(lat, num::rational::Ratio::new(k, 2))?;
        for w in wall_crossing_map(model, s)? {
            let dm = w.minus.m - w.plus.m;
            for m in -pad..=pad {
                let x = CanLabel { m, ..w.plus };
                let y = CanLabel { m: m + dm, ..w.minus };
                union(&x, &y, &mut parent);
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<CanLabel>> = BTreeMap::new();
    let inside = |l: &CanLabel| l.m.abs() <= window && l.n.abs() <= window;
    for (i, l) in labels.iter().enumerate().filter(|(_, l)| inside(l)) {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().insert(*l);
    }
    let classes: Vec<BTreeSet<CanLabel>> = groups.into_values().collect();
    // iota: the class holding E_{eps}(p) just above s = 0
    let eps = Slope::new(lat, num::rational::Ratio::new(1, 8))?;
    let e = canonical_closed_form(eps)?;
    let mut iota = vec![None; classes.len()];
    for p in Point::ALL {
        if let Some((_, l)) = label_of(model, &e.column(p.index())) {
            let l = CanLabel { m: l.m.clamp(-window, window), ..l };
            if let Some(i) = classes.iter().position(|c| c.contains(&l)) {
                iota[i] = Some(p);
            }
        }
    }
    Ok(XiPartition { classes, iota })
}

impl From<crate::series::SeriesError> for KlError {
    fn from(e: crate::series::SeriesError) -> Self {
        KlError::Geometry(GeometryError::Series(e))
    }
}
