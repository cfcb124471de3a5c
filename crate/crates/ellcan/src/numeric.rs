//! Floating-point oracle. Theta functions come from the product formula and
//! the elliptic family from direct lattice sums, so nothing here goes
//! through truncated series. Both sides of each identity are compared in
//! relative error at seeded random points.

use std::f64::consts::PI;
use std::fmt;

use num::ToPrimitive;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::elliptic::{eps, Preset};
use crate::geometry::stab::{qdiff_factor, stab_ell};
use crate::geometry::{hilb2_model, DualPairModel, Point, ShiftVar, StabMatrix};
use crate::report::CheckOutcome;
use crate::series::{Lattice, Monomial, Series, Var, Watermark};
use crate::theta::{ThetaArg, ThetaExpr};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("no point with every denominator above {floor:e} after {draws} draws")]
    Degenerate { floor: f64, draws: usize },
    #[error("|q| = {0} is outside (0, 1)")]
    BadModulus(f64),
}

pub type Result<T> = std::result::Result<T, NumericError>;

/// Denominators smaller than this trigger a resample.
pub const DEN_FLOOR: f64 = 1e-6;
/// Products and sums stop once the neglected part is below this, relatively.
const CUTOFF: f64 = 1e-20;
/// Constant in front of `|q|^W` in the truncation bound of `eval_series`.
pub const TAIL_MARGIN: f64 = 1000.0;

/// A point given by the logarithms of `q, a, z, v`. Every fractional power
/// is `exp(r log x)` with these logarithms, so `x^r x^s = x^{r+s}` holds
/// exactly and no branch has to be chosen per factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint {
    pub log_q: C,
    pub log_a: C,
    pub log_z: C,
    pub log_v: C,
}

impl EvalPoint {
    /// `a, z, v` on the annulus `1/2 < |x| < 2`, `|q| = qmag`.
    pub fn sample(rng: &mut impl Rng, qmag: f64) -> Result<Self> {
        if !(qmag > 0.0 && qmag < 1.0) {
            return Err(NumericError::BadModulus(qmag));
        }
        let mut unit = || C::new(rng.gen_range(-(2f64.ln())..2f64.ln()), rng.gen_range(-PI..PI));
        let (log_a, log_z, log_v) = (unit(), unit(), unit());
        let log_q = C::new(qmag.ln(), rng.gen_range(-PI..PI));
        Ok(EvalPoint { log_q, log_a, log_z, log_v })
    }

    pub fn qmag(&self) -> f64 {
        self.log_q.re.exp()
    }

    /// Log of `q^{m.q} a^{m.a} z^{m.z} v^{m.v}` on the lattice.
    pub fn log_of(&self, lat: Lattice, m: &Monomial) -> C {
        let d = lat.den() as f64;
        (self.log_q * m.q as f64 + self.log_a * m.a as f64 + self.log_z * m.z as f64 + self.log_v * m.v as f64) / d
    }

    pub fn monomial(&self, lat: Lattice, m: &Monomial) -> C {
        self.log_of(lat, m).exp()
    }

    fn var_mut(&mut self, var: Var) -> &mut C {
        match var {
            Var::A => &mut self.log_a,
            Var::Z => &mut self.log_z,
            Var::V => &mut self.log_v,
        }
    }

    /// `x -> q^k x`.
    pub fn shifted(&self, var: Var, k: f64) -> Self {
        let mut p = *self;
        *p.var_mut(var) += self.log_q * k;
        p
    }

    pub fn inverted(&self, vars: &[Var]) -> Self {
        let mut p = *self;
        for &x in vars {
            *p.var_mut(x) = -*p.var_mut(x);
        }
        p
    }

    pub fn swapped_az(&self) -> Self {
        EvalPoint { log_a: self.log_z, log_z: self.log_a, ..*self }
    }
}

/// Smallest `M` with `|q|^M * scale` below the cutoff.
fn product_length(qmag: f64, scale: f64) -> usize {
    let m = (CUTOFF / scale.max(1.0)).ln() / qmag.ln();
    m.ceil().max(1.0) as usize + 1
}

/// `(x^{1/2} - x^{-1/2}) prod_{m>=1} (1 - q^m x)(1 - q^m / x)` from `log x`, `log q`.
pub fn theta_log(log_x: C, log_q: C) -> C {
    let x = log_x.exp();
    let q = log_q.exp();
    let n = product_length(q.norm(), x.norm().max(1.0 / x.norm()));
    let mut acc = (log_x / 2.0).exp() - (-log_x / 2.0).exp();
    let mut qm = C::new(1.0, 0.0);
    for _ in 0..n {
        qm *= q;
        acc *= (C::new(1.0, 0.0) - qm * x) * (C::new(1.0, 0.0) - qm / x);
    }
    acc
}

/// Product form with the principal square root of `x`.
pub fn theta_num(x: C, q: C) -> C {
    theta_log(x.ln(), q.ln())
}

/// `prod_{m>=1} (1 - q^m)`.
pub fn euler_num(q: C) -> C {
    let n = product_length(q.norm(), 1.0);
    let mut acc = C::new(1.0, 0.0);
    let mut qm = C::new(1.0, 0.0);
    for _ in 0..n {
        qm *= q;
        acc *= C::new(1.0, 0.0) - qm;
    }
    acc
}

/// Sum over `Z^N` of `sign * exp(log)`, grown box by box until the outer
/// shell is negligible. Needs a negative definite real part in `log`.
fn lattice_sum<const N: usize>(term: impl Fn([i64; N]) -> Option<(f64, C)>) -> C {
    let mut total = C::new(0.0, 0.0);
    let mut peak = 0.0f64;
    let mut last_shell = f64::INFINITY;
    for r in 0..400i64 {
        let mut shell_max = 0.0f64;
        let mut idx = [-r; N];
        loop {
            if idx.iter().any(|i| i.abs() == r) {
                if let Some((sign, log)) = term(idx) {
                    let t = log.exp() * sign;
                    shell_max = shell_max.max(t.norm());
                    total += t;
                }
            }
            let mut j = 0;
            while j < N {
                if idx[j] < r {
                    idx[j] += 1;
                    break;
                }
                idx[j] = -r;
                j += 1;
            }
            if j == N {
                break;
            }
        }
        peak = peak.max(shell_max);
        if r >= 2 && shell_max <= last_shell && shell_max <= CUTOFF * peak {
            break;
        }
        last_shell = shell_max;
    }
    total
}

fn parity(m: i64) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `sum (-1)^m q^{(m+1/2)^2/2} x^{m+1/2}`.
pub fn triple_sum(log_x: C, log_q: C) -> C {
    lattice_sum(|[m]| {
        let h = m as f64 + 0.5;
        Some((parity(m), log_q * (h * h / 2.0) + log_x * h))
    })
}

/// `sum q^{(n+e/2)^2} x^{2n+e}`.
pub fn theta01_num(parity_e: u8, log_x: C, log_q: C) -> C {
    let e = parity_e as f64 / 2.0;
    lattice_sum(|[n]| {
        let k = n as f64 + e;
        Some((1.0, log_q * (k * k) + log_x * (2.0 * k)))
    })
}

/// Sum form `q^{1/8} (q;q) theta(x)`.
fn tilde(log_x: C, log_q: C) -> C {
    triple_sum(log_x, log_q)
}

fn arg_theta(pt: &EvalPoint, lat: Lattice, arg: &ThetaArg) -> C {
    theta_log(pt.log_of(lat, &arg.monomial()), pt.log_q)
}

/// Value of a symbolic theta expression.
pub fn eval_expr(expr: &ThetaExpr, lat: Lattice, pt: &EvalPoint) -> C {
    let mut num = C::new(0.0, 0.0);
    for t in &expr.terms {
        let c = t.coeff.to_f64().unwrap_or(f64::NAN);
        let prod: C = t.args.iter().map(|a| arg_theta(pt, lat, a)).product();
        num += pt.monomial(lat, &t.prefactor) * prod * c;
    }
    let den: C = expr.den.iter().map(|a| arg_theta(pt, lat, a)).product();
    num / den
}

/// Value of a series and a bound `TAIL_MARGIN |q|^W` on what truncation left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: C,
    pub tail: f64,
}

pub fn eval_series(s: &Series, pt: &EvalPoint) -> SeriesValue {
    let lat = s.lattice();
    let value = s.terms().map(|(m, c)| pt.monomial(lat, m) * c.to_f64().unwrap_or(f64::NAN)).sum();
    let tail = match s.watermark() {
        Watermark::Infinite => 0.0,
        Watermark::Finite(w) => TAIL_MARGIN * pt.qmag().powf(w as f64 / lat.den() as f64),
    };
    SeriesValue { value, tail }
}

/// The elliptic family of a preset, evaluated from its defining sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NumFamily {
    pub preset: Preset,
}

impl NumFamily {
    pub fn new(preset: Preset) -> Self {
        NumFamily { preset }
    }

    /// `f_i(v; q)`.
    pub fn f(&self, i: usize, pt: &EvalPoint) -> C {
        let one = C::new(1.0, 0.0);
        let zero = C::new(0.0, 0.0);
        match (self.preset, i) {
            (_, 0) => one,
            (Preset::Theta, 1) => theta01_num(0, pt.log_v, pt.log_q),
            (Preset::Theta, _) => pt.log_q.exp() * theta01_num(1, pt.log_v, pt.log_q),
            (Preset::BrokenLead, 1) => C::new(2.0, 0.0),
            (_, 1) => one,
            (Preset::BrokenC2, _) => (pt.log_q / 4.0).exp(),
            _ => zero,
        }
    }

    pub fn upsilon(&self, pt: &EvalPoint) -> C {
        let (lv, lq) = (pt.log_v, pt.log_q);
        self.f(0, pt) * (self.f(1, pt) * theta01_num(0, lv, lq) + self.f(2, pt) * theta01_num(1, lv, lq))
    }

    /// `E(basis)|_at`.
    pub fn restriction(&self, basis: Point, at: Point, pt: &EvalPoint) -> C {
        match basis {
            Point::OneOne => self.f(0, pt) * e11(at, pt),
            Point::Two => {
                let mut x = self.f(1, pt) * e_part(at, 0, pt) + self.f(2, pt) * e_part(at, 1, pt);
                if self.preset.injects_odd_class() {
                    x += odd_class(at, pt);
                }
                x
            }
        }
    }

    /// `E^!(basis)|_at`: the other basis element at the other point, `a <-> z`.
    pub fn dual_restriction(&self, basis: Point, at: Point, pt: &EvalPoint) -> C {
        self.restriction(basis.other(), at.other(), &pt.swapped_az())
    }
}

/// Log of `q^qe a^ae z^ze v^ve O(k)|_p` with `O(k)|_p = v^{2k} a^{-eps_p k}`.
fn line_log(pt: &EvalPoint, p: Point, qe: f64, ze: f64, ve: f64, k: f64) -> C {
    let e = eps(p) as f64;
    pt.log_q * qe + pt.log_a * (-e * k) + pt.log_z * ze + pt.log_v * (ve + 2.0 * k)
}

/// `sum (-1)^m q^{(l+i/2)^2 + (m+1/2)^2/2} v^{-2l-i+2m+1} z^{2l+i+m+1/2} O(2l+i-m-1/2)|_p`.
fn e_part(p: Point, i: i64, pt: &EvalPoint) -> C {
    lattice_sum(|[l, m]| {
        let li = l as f64 + i as f64 / 2.0;
        let mh = m as f64 + 0.5;
        let (lf, mf, i_f) = (l as f64, m as f64, i as f64);
        let log = line_log(pt, p, li * li + mh * mh / 2.0, 2.0 * lf + i_f + mh, -2.0 * lf - i_f + 2.0 * mf + 1.0, 2.0 * lf + i_f - mh);
        Some((parity(m), log))
    })
}

/// `sum (-1)^m q^{(m+1/2)^2/2} z^{m+1/2} O(m+1/2)|_p`.
fn e11(p: Point, pt: &EvalPoint) -> C {
    lattice_sum(|[m]| {
        let mh = m as f64 + 0.5;
        Some((parity(m), line_log(pt, p, mh * mh / 2.0, mh, 0.0, mh)))
    })
}

/// The `L - 3M + 3 = 1 mod 8` class of the double sum behind `E([2])`.
fn odd_class(p: Point, pt: &EvalPoint) -> C {
    let e = eps(p) as f64;
    lattice_sum(|[ll, mm]| {
        if (ll - 3 * mm + 3).rem_euclid(8) != 1 {
            return None;
        }
        let s = (ll + mm + 1) as f64;
        let t = (ll - mm) as f64;
        let log = pt.log_q * (s * s / 16.0 + t * t / 8.0)
            + pt.log_a * (-(ll as f64 + 0.5) * e)
            + pt.log_z * (mm as f64 + 0.5)
            + pt.log_v * (s / 2.0);
        Some((-parity(mm), log))
    })
}

/// Two sides of an identity at one point; `scale` is the size the
/// difference is measured against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sides {
    pub lhs: C,
    pub rhs: C,
    pub scale: f64,
}

impl Sides {
    pub fn new(lhs: C, rhs: C) -> Self {
        Sides { lhs, rhs, scale: lhs.norm().max(rhs.norm()) }
    }

    /// `sum terms = 0`, measured against `sum |terms|`.
    pub fn vanishing(terms: &[C]) -> Self {
        Sides { lhs: terms.iter().sum(), rhs: C::new(0.0, 0.0), scale: terms.iter().map(|t| t.norm()).sum() }
    }

    pub fn relative_error(&self) -> f64 {
        let diff = (self.lhs - self.rhs).norm();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.scale.max(f64::MIN_POSITIVE)
        }
    }
}

type Evaluator = Box<dyn Fn(&EvalPoint) -> Sides + Send + Sync>;

pub struct Identity {
    pub name: String,
    /// Overrides the run tolerance when set.
    pub tol: Option<f64>,
    eval: Evaluator,
}

impl Identity {
    pub fn new(name: impl Into<String>, eval: impl Fn(&EvalPoint) -> Sides + Send + Sync + 'static) -> Self {
        Identity { name: name.into(), tol: None, eval: Box::new(eval) }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = Some(tol);
        self
    }

    pub fn eval(&self, pt: &EvalPoint) -> Sides {
        (self.eval)(pt)
    }
}

impl fmt::Debug for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Identity").field("name", &self.name).field("tol", &self.tol).finish()
    }
}

/// Groups of identities the oracle knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentitySet {
    TripleProduct,
    FiveTheta,
    Stab,
    Duality(Preset),
    QDiff(Preset),
    Bar(Preset),
}

impl IdentitySet {
    /// Every set, with the family sets instantiated for `presets`.
    pub fn all(presets: &[Preset]) -> Vec<IdentitySet> {
        let mut out = vec![IdentitySet::TripleProduct, IdentitySet::FiveTheta, IdentitySet::Stab];
        for &p in presets {
            out.extend([IdentitySet::Duality(p), IdentitySet::QDiff(p), IdentitySet::Bar(p)]);
        }
        out
    }

    pub fn identities(self) -> Vec<Identity> {
        match self {
            IdentitySet::TripleProduct => triple_product_identities(),
            IdentitySet::FiveTheta => (0..2).map(five_theta).collect(),
            IdentitySet::Stab => stab_identities(),
            IdentitySet::Duality(p) => duality_identities(p),
            IdentitySet::QDiff(p) => qdiff_identities(p),
            IdentitySet::Bar(p) => bar_identities(p),
        }
    }
}

fn triple_product_identities() -> Vec<Identity> {
    let lat = Lattice::default();
    let d = lat.den();
    let args = [("a", Monomial::new(0, d, 0, 0)), ("z", Monomial::new(0, 0, d, 0)), ("v^-1 a", Monomial::new(0, d, 0, -d)), ("v^2 z^-1 a", Monomial::new(0, d, -d, 2 * d))];
    args.into_iter()
        .map(|(label, m)| {
            Identity::new(format!("triple product at {label}"), move |pt: &EvalPoint| {
                let lx = pt.log_of(lat, &m);
                let prod = theta_log(lx, pt.log_q) * (pt.log_q / 8.0).exp() * euler_num(pt.log_q.exp());
                Sides::new(prod, triple_sum(lx, pt.log_q))
            })
        })
        .collect()
}

/// Both sides of the five-theta identity, in sum-form thetas.
pub fn five_theta_sides(parity_e: u8, pt: &EvalPoint) -> Sides {
    let lat = Lattice::default();
    let d = lat.den();
    let lx = |a: i64, z: i64, v: i64| pt.log_of(lat, &Monomial::new(0, a * d, z * d, v * d));
    let lq = pt.log_q;
    let t = |a, z, v| tilde(lx(a, z, v), lq);
    let th = |a, z, v| theta01_num(parity_e, lx(a, z, v), lq);
    let lhs = t(1, 0, -1) * t(0, 1, 1) * t(1, 1, 0) * (t(1, -1, 2) * th(-1, 1, 1) + t(-1, 1, 2) * th(1, -1, 1));
    let rhs = (t(-2, 0, 0) * t(-1, 2, 1) * t(0, 1, -1) + t(0, -2, 0) * t(-2, 1, 1) * t(-1, 0, -1)) * t(0, 0, -2) * th(0, 0, 1);
    Sides::new(lhs, rhs)
}

fn five_theta(parity_e: u8) -> Identity {
    Identity::new(format!("five-theta identity, eps = {parity_e}"), move |pt: &EvalPoint| five_theta_sides(parity_e, pt))
}

fn n_args(model: &DualPairModel, lat: Lattice, p: Point, pd: Point) -> Vec<ThetaArg> {
    let mut args: Vec<ThetaArg> = model.x.n_minus(p).iter().map(|w| model.x.theta_arg(*w, lat)).collect();
    args.extend(model.dual.n_minus(pd).iter().map(|w| model.dual.theta_arg(*w, lat)));
    args
}

fn stab_identities() -> Vec<Identity> {
    let lat = Lattice::default();
    let model = hilb2_model();
    let stab = stab_ell(lat);
    let mut out = Vec::new();
    for p in Point::ALL {
        let want = ThetaExpr::thetas(&n_args(&model, lat, p, model.to_dual(p)));
        let entry = stab.entry(p, p).clone();
        out.push(
            Identity::new(format!("Stab({p})|_{p} = theta(N_-) theta(N^!_-)"), move |pt: &EvalPoint| {
                Sides::new(eval_expr(&entry, lat, pt), eval_expr(&want, lat, pt))
            })
            .with_tol(1e-12),
        );
    }
    for var in ShiftVar::ALL {
        for p1 in Point::ALL {
            for p2 in Point::ALL {
                let entry = stab.entry(p2, p1);
                if entry.is_zero() {
                    continue;
                }
                let f = entry.clone().over(&n_args(&model, lat, p1, model.to_dual(p2)));
                let factor = qdiff_factor(&model, var, 1, p1, p2, lat);
                let name = format!("delta_{:?} on Stab({p2})|_{p1}", var).to_lowercase();
                out.push(Identity::new(name, move |pt: &EvalPoint| {
                    let lhs = eval_expr(&f, lat, &pt.shifted(var.var(), 1.0));
                    Sides::new(lhs, pt.monomial(lat, &factor) * eval_expr(&f, lat, pt))
                }));
            }
        }
    }
    for p1 in Point::ALL {
        for p2 in Point::ALL {
            let (s1, s2) = (model.sigma(p1) as f64, model.sigma(p2) as f64);
            let lhs = stab.entry(p1, p2).clone();
            let rhs = stab.entry(model.to_dual(p2), model.to_dual(p1)).clone();
            out.push(Identity::new(format!("sigma duality at ({p1}, {p2})"), move |pt: &EvalPoint| {
                Sides::new(eval_expr(&lhs, lat, pt) * s1, eval_expr(&rhs, lat, &pt.swapped_az()) * s2)
            }));
        }
    }
    out
}

/// `q^{1/4} (q;q)^2`, the normalisation tying product-form thetas to sums.
fn upsilon_norm(pt: &EvalPoint) -> C {
    let e = euler_num(pt.log_q.exp());
    (pt.log_q / 4.0).exp() * e * e
}

/// Entry `(r, c)` of `sign Upsilon Stab = E * D`, with `D(k, c)` the second factor.
fn duality_sides(fam: NumFamily, lhs_entry: C, r: Point, c: Point, pt: &EvalPoint, dual: impl Fn(Point, Point, &EvalPoint) -> C) -> Sides {
    let terms: Vec<C> = Point::ALL.iter().map(|&k| fam.restriction(k, r, pt) * dual(k, c, pt)).collect();
    if lhs_entry == C::new(0.0, 0.0) {
        Sides::vanishing(&terms)
    } else {
        Sides::new(lhs_entry, terms.iter().sum())
    }
}

fn duality_identities(preset: Preset) -> Vec<Identity> {
    let lat = Lattice::default();
    let stab = stab_ell(lat);
    let fam = NumFamily::new(preset);
    let mut out = Vec::new();
    for r in Point::ALL {
        for c in Point::ALL {
            let entry = stab.entry(c, r).clone();
            out.push(Identity::new(format!("duality ({r},{c}) [{preset}]"), move |pt: &EvalPoint| {
                let lhs = if entry.is_zero() { C::new(0.0, 0.0) } else { fam.upsilon(pt) * upsilon_norm(pt) * eval_expr(&entry, lat, pt) };
                duality_sides(fam, lhs, r, c, pt, |k, c, pt| fam.dual_restriction(k, c, pt))
            }));
        }
    }
    out
}

fn qdiff_identities(preset: Preset) -> Vec<Identity> {
    let fam = NumFamily::new(preset);
    let mut out = Vec::new();
    for mu in Point::ALL {
        // -q^{-G/2} z^{-G} O(-1), G = 3 for [2] and 1 for [1,1]
        let g = if mu == Point::Two { 3.0 } else { 1.0 };
        for p in Point::ALL {
            out.push(Identity::new(format!("delta_z E({mu})|_{p} [{preset}]"), move |pt: &EvalPoint| {
                let lhs = fam.restriction(mu, p, &pt.shifted(Var::Z, 1.0));
                let m = -line_log(pt, p, -g / 2.0, -g, 0.0, -1.0).exp();
                Sides::new(lhs, m * fam.restriction(mu, p, pt))
            }));
            out.push(Identity::new(format!("delta_a E({mu})|_{p} [{preset}]"), move |pt: &EvalPoint| {
                let e = eps(p) as f64;
                let lhs = fam.restriction(mu, p, &pt.shifted(Var::A, 1.0));
                let m = -(pt.log_q * (-g / 2.0) + pt.log_a * (-g) + pt.log_z * e + pt.log_v * (2.0 * e)).exp();
                Sides::new(lhs, m * fam.restriction(mu, p, pt))
            }));
        }
    }
    for p in Point::ALL {
        out.push(Identity::new(format!("f0 delta_v E([1,1])|_{p} [{preset}]"), move |pt: &EvalPoint| {
            let up = pt.shifted(Var::V, 1.0);
            let lhs = fam.f(0, pt) * fam.restriction(Point::OneOne, p, &up);
            let m = line_log(pt, p, -2.0, -2.0, 0.0, -2.0).exp();
            Sides::new(lhs, fam.f(0, &up) * m * fam.restriction(Point::OneOne, p, pt))
        }));
        out.push(Identity::new(format!("delta_v E([2])|_{p} [{preset}]"), move |pt: &EvalPoint| {
            let up = pt.shifted(Var::V, 1.0);
            let lhs = fam.restriction(Point::Two, p, &up);
            let inner = fam.f(1, &up) * e_part(p, 0, pt) + fam.f(2, &up) * e_part(p, 1, pt);
            let m = line_log(pt, p, -1.0, -2.0, 2.0, -2.0).exp();
            Sides::new(lhs, m * inner)
        }));
    }
    if preset == Preset::Theta {
        for p in Point::ALL {
            out.push(Identity::new(format!("x_{p} agrees across mu [{preset}]"), move |pt: &EvalPoint| {
                let up = pt.shifted(Var::V, 1.0);
                let (two, oo) = (Point::Two, Point::OneOne);
                // delta_v E([2]) E([1,1]) = delta_v E([1,1]) E([2])
                let lhs = fam.restriction(two, p, &up) * fam.restriction(oo, p, pt);
                Sides::new(lhs, fam.restriction(oo, p, &up) * fam.restriction(two, p, pt))
            }));
        }
    }
    out
}

fn bar_identities(preset: Preset) -> Vec<Identity> {
    let lat = Lattice::default();
    let stab = stab_ell(lat);
    let fam = NumFamily::new(preset);
    let mut out = Vec::new();
    for mu in Point::ALL {
        for p in Point::ALL {
            out.push(Identity::new(format!("E({mu})|_{p} at a^-1 = E({mu})|_{} [{preset}]", p.other()), move |pt: &EvalPoint| {
                Sides::new(fam.restriction(mu, p, &pt.inverted(&[Var::A])), fam.restriction(mu, p.other(), pt))
            }));
            out.push(Identity::new(format!("bar E({mu})|_{p} [{preset}]"), move |pt: &EvalPoint| {
                Sides::new(fam.restriction(mu, p, &pt.inverted(&[Var::V])), -fam.restriction(mu, p, &pt.inverted(&[Var::A, Var::Z])))
            }));
        }
    }
    for r in Point::ALL {
        for c in Point::ALL {
            // Stab_{-X}(c)|_r = Stab(c')|_{r'} at a^-1, primes the flop of points
            let entry = stab.entry(c.other(), r.other()).clone();
            out.push(Identity::new(format!("opposite duality ({r},{c}) [{preset}]"), move |pt: &EvalPoint| {
                let lhs = if entry.is_zero() {
                    C::new(0.0, 0.0)
                } else {
                    -fam.upsilon(pt) * upsilon_norm(pt) * eval_expr(&entry, lat, &pt.inverted(&[Var::A]))
                };
                duality_sides(fam, lhs, r, c, pt, |k, c, pt| fam.dual_restriction(k, c, &pt.inverted(&[Var::V])))
            }));
        }
    }
    out
}

/// Theta arguments that appear in a denominator somewhere in the suites.
fn denominator_args(stab: &StabMatrix, model: &DualPairModel) -> Vec<ThetaArg> {
    let lat = stab.lattice;
    let mut args: Vec<ThetaArg> = stab.entries.iter().flatten().flat_map(|e| e.den.clone()).collect();
    for p in Point::ALL {
        for pd in Point::ALL {
            args.extend(n_args(model, lat, p, pd));
        }
    }
    args.sort();
    args.dedup();
    args
}

/// Smallest denominator theta over the point and the transformed points the
/// identities visit.
pub fn min_denominator(pt: &EvalPoint) -> f64 {
    let lat = Lattice::default();
    let args = denominator_args(&stab_ell(lat), &hilb2_model());
    let mut variants = vec![*pt, pt.inverted(&[Var::A]), pt.swapped_az(), pt.inverted(&[Var::V])];
    variants.extend([Var::A, Var::Z, Var::V].map(|x| pt.shifted(x, 1.0)));
    variants.iter().flat_map(|p| args.iter().map(move |a| arg_theta(p, lat, a).norm())).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub seed: u64,
    pub points: usize,
    pub qmag: f64,
    pub tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { seed: 1, points: 20, qmag: 0.1, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResult {
    pub name: String,
    pub max_error: f64,
    pub worst_point: usize,
    pub tol: f64,
}

impl IdentityResult {
    pub fn passed(&self) -> bool {
        self.max_error < self.tol
    }

    pub fn outcome(&self) -> CheckOutcome {
        let detail = format!("max relative error {:.2e} (tol {:.0e})", self.max_error, self.tol);
        let out = CheckOutcome::new(format!("numeric {}", self.name), self.passed()).with_detail(detail);
        if self.passed() {
            out
        } else {
            CheckOutcome { residual_sample: vec![format!("relative error {:.3e} at point {}", self.max_error, self.worst_point)], ..out }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericReport {
    pub config: OracleConfig,
    /// Draws thrown away because a denominator came too close to zero.
    pub resampled: usize,
    pub results: Vec<IdentityResult>,
}

impl NumericReport {
    pub fn outcomes(&self) -> Vec<CheckOutcome> {
        self.results.iter().map(IdentityResult::outcome).collect()
    }

    pub fn all_passed(&self) -> bool {
        self.results.iter().all(IdentityResult::passed)
    }
}

/// Seeded points avoiding small denominators.
pub fn sample_points(cfg: &OracleConfig) -> Result<(Vec<EvalPoint>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut points = Vec::with_capacity(cfg.points);
    let mut rejected = 0;
    let max_draws = 100 * cfg.points.max(1);
    while points.len() < cfg.points {
        if points.len() + rejected >= max_draws {
            return Err(NumericError::Degenerate { floor: DEN_FLOOR, draws: max_draws });
        }
        let pt = EvalPoint::sample(&mut rng, cfg.qmag)?;
        if min_denominator(&pt) < DEN_FLOOR {
            rejected += 1;
        } else {
            points.push(pt);
        }
    }
    Ok((points, rejected))
}

/// Worst relative error of every identity over the sampled points.
pub fn oracle_suite(sets: &[IdentitySet], cfg: &OracleConfig) -> Result<NumericReport> {
    let (points, resampled) = sample_points(cfg)?;
    let identities: Vec<Identity> = sets.iter().flat_map(|s| s.identities()).collect();
    let results = identities
        .par_iter()
        .map(|id| {
            let errs: Vec<f64> = points.iter().map(|pt| id.eval(pt).relative_error()).collect();
            let (worst_point, max_error) = errs
                .iter()
                .copied()
                .enumerate()
                // NaN counts as the worst possible error
                .fold((0, 0.0f64), |(wi, we), (i, e)| if e.is_nan() || e > we && !we.is_nan() { (i, e) } else { (wi, we) });
            IdentityResult { name: id.name.clone(), max_error, worst_point, tol: id.tol.unwrap_or(cfg.tol) }
        })
        .collect();
    Ok(NumericReport { config: *cfg, resampled, results })
}
