//! Truncated q-series with Laurent monomials in `a`, `z`, `v`.
//!
//! Every exponent is an integer numerator over a shared lattice denominator.
//! A series stores exact coefficients together with a watermark and a set of
//! shift budgets. The stored invariant is: every term whose *reach*
//! `e_q - S_a|e_a| - S_z|e_z| - S_v|e_v|` lies below the watermark is present,
//! and every stored coefficient is exact. With zero budgets this is the usual
//! "exact below q^W" truncation; positive budgets keep the series exact below
//! `W` after substituting `x -> q^t x` for `|t| <= S_x`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_DENOMINATOR: i64 = 48;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("lattice mismatch: 1/{0} vs 1/{1}")]
    LatticeMismatch(i64, i64),
    #[error("denominator {0} is not a positive multiple of 48")]
    BadDenominator(i64),
    #[error("exponent {num}/{den} is not on the lattice 1/{lattice}")]
    OffLattice { num: i64, den: i64, lattice: i64 },
    #[error("shift of {needed}/{lattice} on {var} exceeds budget {available}/{lattice}")]
    BudgetExceeded { var: Var, needed: i64, available: i64, lattice: i64 },
    #[error("substitution on a truncated series must permute a, z, v up to sign")]
    NotSignedPermutation,
    #[error("malformed series interchange: {0}")]
    Interchange(String),
}

pub type Result<T> = std::result::Result<T, SeriesError>;

/// Shared exponent denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice(i64);

impl Default for Lattice {
    fn default() -> Self {
        Lattice(DEFAULT_DENOMINATOR)
    }
}

impl Lattice {
    pub fn new(den: i64) -> Result<Self> {
        if den > 0 && den % 48 == 0 {
            Ok(Lattice(den))
        } else {
            Err(SeriesError::BadDenominator(den))
        }
    }

    pub fn den(self) -> i64 {
        self.0
    }

    /// Numerator of `num/den` on this lattice.
    pub fn frac(self, num: i64, den: i64) -> Result<i64> {
        let scaled = num * self.0;
        if den == 0 || scaled % den != 0 {
            return Err(SeriesError::OffLattice { num, den, lattice: self.0 });
        }
        Ok(scaled / den)
    }

    pub fn int(self, n: i64) -> i64 {
        n * self.0
    }

    /// Exponent as an exact rational.
    pub fn to_ratio(self, numerator: i64) -> num::rational::Ratio<i64> {
        num::rational::Ratio::new(numerator, self.0)
    }

    pub fn from_ratio(self, r: num::rational::Ratio<i64>) -> Result<i64> {
        self.frac(*r.numer(), *r.denom())
    }

    fn check(self, other: Lattice) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(SeriesError::LatticeMismatch(self.0, other.0))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    A,
    Z,
    V,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::A => "a",
            Var::Z => "z",
            Var::V => "v",
        })
    }
}

pub const VARS: [Var; 3] = [Var::A, Var::Z, Var::V];

/// Exponent numerators of `q^q a^a z^z v^v`. Ordered with `q` first so the
/// leading q-slice of a map is its first run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Monomial {
    pub q: i64,
    pub a: i64,
    pub z: i64,
    pub v: i64,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { q: 0, a: 0, z: 0, v: 0 };

    pub fn new(q: i64, a: i64, z: i64, v: i64) -> Self {
        Monomial { q, a, z, v }
    }

    pub fn q(q: i64) -> Self {
        Monomial { q, ..Self::ONE }
    }

    pub fn var(var: Var, e: i64) -> Self {
        let mut m = Self::ONE;
        m.set(var, e);
        m
    }

    pub fn get(&self, var: Var) -> i64 {
        match var {
            Var::A => self.a,
            Var::Z => self.z,
            Var::V => self.v,
        }
    }

    pub fn set(&mut self, var: Var, e: i64) {
        match var {
            Var::A => self.a = e,
            Var::Z => self.z = e,
            Var::V => self.v = e,
        }
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial { q: self.q + o.q, a: self.a + o.a, z: self.z + o.z, v: self.v + o.v }
    }

    pub fn inv(&self) -> Monomial {
        Monomial { q: -self.q, a: -self.a, z: -self.z, v: -self.v }
    }

    pub fn div(&self, o: &Monomial) -> Monomial {
        self.mul(&o.inv())
    }

    pub fn scale(&self, k: i64) -> Monomial {
        Monomial { q: self.q * k, a: self.a * k, z: self.z * k, v: self.v * k }
    }

    /// `self^(num/den)`, failing when an exponent leaves the lattice.
    pub fn pow_frac(&self, num: i64, den: i64, lat: Lattice) -> Result<Monomial> {
        let f = |e: i64| -> Result<i64> {
            let s = e * num;
            if s % den != 0 {
                Err(SeriesError::OffLattice { num: s, den: den * lat.den(), lattice: lat.den() })
            } else {
                Ok(s / den)
            }
        };
        Ok(Monomial { q: f(self.q)?, a: f(self.a)?, z: f(self.z)?, v: f(self.v)? })
    }

    pub fn without_q(&self) -> Monomial {
        Monomial { q: 0, ..*self }
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }
}

/// Upper end of the range in which terms are known to be exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Watermark {
    Finite(i64),
    Infinite,
}

impl Watermark {
    pub fn finite(self) -> Option<i64> {
        match self {
            Watermark::Finite(w) => Some(w),
            Watermark::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Watermark::Infinite
    }

    pub fn shifted(self, by: i64) -> Watermark {
        match self {
            Watermark::Finite(w) => Watermark::Finite(w + by),
            Watermark::Infinite => Watermark::Infinite,
        }
    }
}

/// Admissible q-shift per variable, as lattice numerators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Budgets {
    pub a: i64,
    pub z: i64,
    pub v: i64,
}

impl Budgets {
    pub const NONE: Budgets = Budgets { a: 0, z: 0, v: 0 };

    pub fn new(a: i64, z: i64, v: i64) -> Self {
        assert!(a >= 0 && z >= 0 && v >= 0, "budgets are nonnegative");
        Budgets { a, z, v }
    }

    pub fn uniform(s: i64) -> Self {
        Self::new(s, s, s)
    }

    pub fn only(var: Var, s: i64) -> Self {
        let mut b = Self::NONE;
        b.set(var, s);
        b
    }

    pub fn get(&self, var: Var) -> i64 {
        match var {
            Var::A => self.a,
            Var::Z => self.z,
            Var::V => self.v,
        }
    }

    pub fn set(&mut self, var: Var, s: i64) {
        match var {
            Var::A => self.a = s,
            Var::Z => self.z = s,
            Var::V => self.v = s,
        }
    }

    pub fn min(&self, o: &Budgets) -> Budgets {
        Budgets { a: self.a.min(o.a), z: self.z.min(o.z), v: self.v.min(o.v) }
    }

    pub fn max(&self, o: &Budgets) -> Budgets {
        Budgets { a: self.a.max(o.a), z: self.z.max(o.z), v: self.v.max(o.v) }
    }

    /// Reach of a monomial in units of `1/D^2`.
    pub fn reach(&self, m: &Monomial, lat: Lattice) -> i128 {
        let d = lat.den() as i128;
        m.q as i128 * d
            - self.a as i128 * (m.a as i128).abs()
            - self.z as i128 * (m.z as i128).abs()
            - self.v as i128 * (m.v as i128).abs()
    }
}

/// Simultaneous substitution `x -> image(x)` for `x` in `a, z, v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarMap {
    pub a: Monomial,
    pub z: Monomial,
    pub v: Monomial,
}

impl VarMap {
    pub fn identity(lat: Lattice) -> Self {
        let d = lat.den();
        VarMap { a: Monomial::var(Var::A, d), z: Monomial::var(Var::Z, d), v: Monomial::var(Var::V, d) }
    }

    pub fn image(&self, var: Var) -> &Monomial {
        match var {
            Var::A => &self.a,
            Var::Z => &self.z,
            Var::V => &self.v,
        }
    }

    pub fn with(mut self, var: Var, image: Monomial) -> Self {
        match var {
            Var::A => self.a = image,
            Var::Z => self.z = image,
            Var::V => self.v = image,
        }
        self
    }

    /// `x -> q^t x` on one variable.
    pub fn shift(lat: Lattice, var: Var, t: i64) -> Self {
        let mut img = Monomial::var(var, lat.den());
        img.q = t;
        Self::identity(lat).with(var, img)
    }

    /// `x -> x^{-1}` on the listed variables.
    pub fn invert(lat: Lattice, vars: &[Var]) -> Self {
        let mut m = Self::identity(lat);
        for &x in vars {
            m = m.with(x, Monomial::var(x, -lat.den()));
        }
        m
    }

    /// `a <-> z`.
    pub fn swap_az(lat: Lattice) -> Self {
        let d = lat.den();
        Self::identity(lat).with(Var::A, Monomial::var(Var::Z, d)).with(Var::Z, Monomial::var(Var::A, d))
    }

    pub fn apply(&self, m: &Monomial, lat: Lattice) -> Result<Monomial> {
        let d = lat.den();
        let mut out = Monomial::q(m.q);
        let mut acc = [0i128; 4];
        for x in VARS {
            let e = m.get(x) as i128;
            let img = self.image(x);
            acc[0] += e * img.q as i128;
            acc[1] += e * img.a as i128;
            acc[2] += e * img.z as i128;
            acc[3] += e * img.v as i128;
        }
        let mut parts = [0i64; 4];
        for (i, s) in acc.iter().enumerate() {
            if s % d as i128 != 0 {
                return Err(SeriesError::OffLattice { num: *s as i64, den: d * d, lattice: d });
            }
            parts[i] = (s / d as i128) as i64;
        }
        out.q += parts[0];
        out.a = parts[1];
        out.z = parts[2];
        out.v = parts[3];
        Ok(out)
    }

    /// For a signed permutation, the target variable of `x` and its q-shift.
    fn permutation(&self, lat: Lattice) -> Option<[(Var, i64); 3]> {
        let d = lat.den();
        let mut out = [(Var::A, 0); 3];
        let mut seen = [false; 3];
        for (i, x) in VARS.iter().enumerate() {
            let img = self.image(*x);
            let nonzero: Vec<Var> = VARS.iter().copied().filter(|y| img.get(*y) != 0).collect();
            if nonzero.len() != 1 || img.get(nonzero[0]).abs() != d {
                return None;
            }
            let j = nonzero[0] as usize;
            if seen[j] {
                return None;
            }
            seen[j] = true;
            out[i] = (nonzero[0], img.q);
        }
        Some(out)
    }
}

/// The coefficient slice at the least q-order.
#[derive(Debug, Clone, PartialEq)]
pub enum Leading {
    ExactZero,
    /// No term below the watermark.
    Unresolved(Watermark),
    Slice { order: i64, slice: Series },
}

/// Outcome of comparing two series below their common watermark.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub equal: bool,
    pub below: Watermark,
    pub residual: Series,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    lattice: Lattice,
    terms: BTreeMap<Monomial, BigRational>,
    watermark: Watermark,
    budgets: Budgets,
}

impl Series {
    pub fn zero(lattice: Lattice) -> Self {
        Series { lattice, terms: BTreeMap::new(), watermark: Watermark::Infinite, budgets: Budgets::NONE }
    }

    pub fn one(lattice: Lattice) -> Self {
        Self::monomial(lattice, Monomial::ONE, BigRational::one())
    }

    pub fn constant(lattice: Lattice, c: BigRational) -> Self {
        Self::monomial(lattice, Monomial::ONE, c)
    }

    pub fn int(lattice: Lattice, c: i64) -> Self {
        Self::constant(lattice, BigRational::from_integer(c.into()))
    }

    pub fn monomial(lattice: Lattice, m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Series { lattice, terms, watermark: Watermark::Infinite, budgets: Budgets::NONE }
    }

    pub fn mono(lattice: Lattice, m: Monomial) -> Self {
        Self::monomial(lattice, m, BigRational::one())
    }

    /// Exact Laurent polynomial from `(coefficient, monomial)` pairs.
    pub fn exact<I>(lattice: Lattice, items: I) -> Self
    where
        I: IntoIterator<Item = (i64, Monomial)>,
    {
        let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
        for (c, m) in items {
            *acc.entry(m).or_insert_with(BigRational::zero) += BigRational::from_integer(c.into());
        }
        Self::from_map(lattice, acc, Watermark::Infinite, Budgets::NONE)
    }

    /// Builds a truncated series from candidate terms. Terms whose reach is at
    /// or beyond the watermark are discarded; the caller promises that every
    /// term below it was supplied.
    pub fn truncated<I>(lattice: Lattice, items: I, watermark: Watermark, budgets: Budgets) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
        for (m, c) in items {
            *acc.entry(m).or_insert_with(BigRational::zero) += c;
        }
        Self::from_map(lattice, acc, watermark, budgets)
    }

    fn from_map(lattice: Lattice, acc: HashMap<Monomial, BigRational>, watermark: Watermark, budgets: Budgets) -> Self {
        let limit = watermark.finite().map(|w| w as i128 * lattice.den() as i128);
        let terms = acc
            .into_iter()
            .filter(|(m, c)| !c.is_zero() && limit.is_none_or(|l| budgets.reach(m, lattice) < l))
            .collect();
        Series { lattice, terms, watermark, budgets }
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn watermark(&self) -> Watermark {
        self.watermark
    }

    pub fn budgets(&self) -> Budgets {
        self.budgets
    }

    pub fn is_exact(&self) -> bool {
        self.watermark.is_infinite()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.is_exact() && self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Budgets that constrain a combination with another series; exact
    /// operands impose nothing.
    fn effective_budgets(&self, other: &Series) -> Budgets {
        match (self.is_exact(), other.is_exact()) {
            (true, true) => Budgets::NONE,
            (true, false) => other.budgets,
            (false, true) => self.budgets,
            (false, false) => self.budgets.min(&other.budgets),
        }
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.lattice.check(other.lattice)?;
        let budgets = self.effective_budgets(other);
        let watermark = self.watermark.min(other.watermark);
        let mut acc: HashMap<Monomial, BigRational> = HashMap::with_capacity(self.len() + other.len());
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            *acc.entry(*m).or_insert_with(BigRational::zero) += c;
        }
        Ok(Self::from_map(self.lattice, acc, watermark, budgets))
    }

    pub fn neg(&self) -> Series {
        Series { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> Series {
        if k.is_zero() {
            return Series { terms: BTreeMap::new(), ..self.clone() };
        }
        Series { terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(), ..self.clone() }
    }

    pub fn scale_int(&self, k: i64) -> Series {
        self.scale(&BigRational::from_integer(k.into()))
    }

    /// Multiplication by a monomial; the watermark moves with the q-part.
    pub fn mul_monomial(&self, m: &Monomial) -> Series {
        if self.is_exact() {
            return Series {
                terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
                ..self.clone()
            };
        }
        let one = Series::mono(self.lattice, *m);
        self.mul(&one).expect("same lattice")
    }

    /// Least reach over stored terms capped by the watermark, in `1/D^2`.
    fn floor_reach(&self, budgets: &Budgets) -> Option<i128> {
        let d = self.lattice.den() as i128;
        let stored = self.terms.keys().map(|m| budgets.reach(m, self.lattice)).min();
        let cap = self.watermark.finite().map(|w| w as i128 * d);
        match (stored, cap) {
            (Some(s), Some(c)) => Some(s.min(c)),
            (Some(s), None) => Some(s),
            (None, c) => c,
        }
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.lattice.check(other.lattice)?;
        let lat = self.lattice;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Series::zero(lat));
        }
        let budgets = self.effective_budgets(other);
        let d = lat.den() as i128;
        let watermark = match (self.watermark, other.watermark) {
            (Watermark::Infinite, Watermark::Infinite) => Watermark::Infinite,
            _ => {
                let mut bound: Option<i128> = None;
                if let (Some(w), Some(r)) = (self.watermark.finite(), other.floor_reach(&budgets)) {
                    bound = Some(w as i128 * d + r);
                }
                if let (Some(w), Some(r)) = (other.watermark.finite(), self.floor_reach(&budgets)) {
                    let b = w as i128 * d + r;
                    bound = Some(bound.map_or(b, |x| x.min(b)));
                }
                match bound {
                    Some(b) => Watermark::Finite(b.div_euclid(d) as i64),
                    // a truncated operand with nothing stored and no cap cannot occur
                    None => Watermark::Infinite,
                }
            }
        };
        let limit = watermark.finite().map(|w| w as i128 * d);
        let mut xs: Vec<(i128, &Monomial, &BigRational)> =
            self.terms.iter().map(|(m, c)| (budgets.reach(m, lat), m, c)).collect();
        let mut ys: Vec<(i128, &Monomial, &BigRational)> =
            other.terms.iter().map(|(m, c)| (budgets.reach(m, lat), m, c)).collect();
        xs.sort_by_key(|p| p.0);
        ys.sort_by_key(|p| p.0);
        let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
        for (rx, mx, cx) in &xs {
            for (ry, my, cy) in &ys {
                if let Some(l) = limit {
                    if rx + ry >= l {
                        break;
                    }
                }
                let c = *cx * *cy;
                match acc.entry(mx.mul(my)) {
                    std::collections::hash_map::Entry::Occupied(mut e) => {
                        *e.get_mut() += c;
                    }
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                }
            }
        }
        Ok(Self::from_map(lat, acc, watermark, budgets))
    }

    pub fn pow(&self, n: u32) -> Result<Series> {
        let mut out = Series::one(self.lattice);
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Product of several series.
    pub fn product<'a, I: IntoIterator<Item = &'a Series>>(lattice: Lattice, items: I) -> Result<Series> {
        let mut out = Series::one(lattice);
        for s in items {
            out = out.mul(s)?;
        }
        Ok(out)
    }

    /// Simultaneous substitution of `a`, `z`, `v`. On a truncated series the
    /// map must permute the variables up to sign, and each q-shift must fit
    /// within the budget of the variable it shifts.
    pub fn substitute_all(&self, map: &VarMap) -> Result<Series> {
        let lat = self.lattice;
        let mut budgets = self.budgets;
        if !self.is_exact() {
            let perm = map.permutation(lat).ok_or(SeriesError::NotSignedPermutation)?;
            let mut next = Budgets::NONE;
            for (x, (target, shift)) in VARS.iter().zip(perm.iter()) {
                let have = self.budgets.get(*x);
                if shift.abs() > have {
                    return Err(SeriesError::BudgetExceeded {
                        var: *x,
                        needed: shift.abs(),
                        available: have,
                        lattice: lat.den(),
                    });
                }
                next.set(*target, have - shift.abs());
            }
            budgets = next;
        }
        let mut acc: HashMap<Monomial, BigRational> = HashMap::with_capacity(self.len());
        for (m, c) in &self.terms {
            *acc.entry(map.apply(m, lat)?).or_insert_with(BigRational::zero) += c;
        }
        Ok(Self::from_map(lat, acc, self.watermark, budgets))
    }

    /// Substitutes `var -> image`, leaving the other variables fixed.
    pub fn substitute(&self, var: Var, image: Monomial) -> Result<Series> {
        self.substitute_all(&VarMap::identity(self.lattice).with(var, image))
    }

    /// `var -> q^t var`.
    pub fn shift(&self, var: Var, t: i64) -> Result<Series> {
        self.substitute_all(&VarMap::shift(self.lattice, var, t))
    }

    /// Applies a q-difference operator with the given per-variable shifts.
    pub fn qdiff(&self, shift: &QDiffShift) -> Result<Series> {
        let lat = self.lattice;
        let mut map = VarMap::identity(lat);
        for x in VARS {
            let t = shift.get(x);
            if t != 0 {
                let mut img = Monomial::var(x, lat.den());
                img.q = t;
                map = map.with(x, img);
            }
        }
        self.substitute_all(&map)
    }

    /// `v -> v^{-1}`.
    pub fn bar_v(&self) -> Series {
        self.substitute_all(&VarMap::invert(self.lattice, &[Var::V])).expect("sign flip is always admissible")
    }

    pub fn leading(&self) -> Leading {
        if self.is_exact_zero() {
            return Leading::ExactZero;
        }
        let order = match self.terms.keys().map(|m| m.q).min() {
            Some(o) => o,
            None => return Leading::Unresolved(self.watermark),
        };
        if let Some(w) = self.watermark.finite() {
            if order >= w {
                return Leading::Unresolved(self.watermark);
            }
        }
        let slice = self
            .terms
            .iter()
            .filter(|(m, _)| m.q == order)
            .map(|(m, c)| (m.without_q(), c.clone()));
        Leading::Slice { order, slice: Series::truncated(self.lattice, slice, Watermark::Infinite, Budgets::NONE) }
    }

    /// Least stored q-exponent, if any.
    pub fn min_q(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.q).min()
    }

    /// Coefficient slice (Laurent in a, z, v) at a given q-exponent.
    pub fn slice_at(&self, order: i64) -> Series {
        let items = self.terms.iter().filter(|(m, _)| m.q == order).map(|(m, c)| (m.without_q(), c.clone()));
        Series::truncated(self.lattice, items, Watermark::Infinite, Budgets::NONE)
    }

    /// Drops everything at or above `q^order` and forgets the budgets.
    pub fn truncate(&self, order: i64) -> Series {
        let w = self.watermark.min(Watermark::Finite(order));
        let items = self.terms.iter().filter(|(m, _)| Watermark::Finite(m.q) < w).map(|(m, c)| (*m, c.clone()));
        Series::truncated(self.lattice, items, w, Budgets::NONE)
    }

    pub fn equal_up_to(&self, other: &Series) -> Result<Comparison> {
        let diff = self.sub(other)?;
        Ok(Comparison { equal: diff.terms.is_empty(), below: diff.watermark, residual: diff })
    }

    /// Same lattice sum re-expressed on a finer lattice.
    pub fn relattice(&self, target: Lattice) -> Result<Series> {
        if target.den() % self.lattice.den() != 0 {
            return Err(SeriesError::LatticeMismatch(self.lattice.den(), target.den()));
        }
        let k = target.den() / self.lattice.den();
        let terms = self.terms.iter().map(|(m, c)| (m.scale(k), c.clone())).collect();
        Ok(Series {
            lattice: target,
            terms,
            watermark: match self.watermark {
                Watermark::Finite(w) => Watermark::Finite(w * k),
                Watermark::Infinite => Watermark::Infinite,
            },
            budgets: Budgets { a: self.budgets.a * k, z: self.budgets.z * k, v: self.budgets.v * k },
        })
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// `true` when no stored term depends on `var`.
    pub fn free_of(&self, var: Var) -> bool {
        self.terms.keys().all(|m| m.get(var) == 0)
    }

    /// Largest and smallest exponent of `var` among stored terms.
    pub fn degree_range(&self, var: Var) -> Option<(i64, i64)> {
        let mut it = self.terms.keys().map(|m| m.get(var));
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    /// Terms whose `var` exponent equals `e`.
    pub fn part_with(&self, var: Var, e: i64) -> Series {
        Series {
            terms: self.terms.iter().filter(|(m, _)| m.get(var) == e).map(|(m, c)| (*m, c.clone())).collect(),
            ..self.clone()
        }
    }

    /// First few terms, for reports.
    pub fn sample(&self, n: usize) -> Vec<String> {
        self.terms.iter().take(n).map(|(m, c)| format_term(self.lattice, m, c)).collect()
    }
}

/// Per-variable q-shifts `(lambda_a, lambda_z, lambda_v)` as lattice numerators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct QDiffShift {
    pub a: i64,
    pub z: i64,
    pub v: i64,
}

impl QDiffShift {
    pub fn new(a: i64, z: i64, v: i64) -> Self {
        QDiffShift { a, z, v }
    }

    pub fn on(var: Var, t: i64) -> Self {
        let mut s = QDiffShift::default();
        match var {
            Var::A => s.a = t,
            Var::Z => s.z = t,
            Var::V => s.v = t,
        }
        s
    }

    pub fn get(&self, var: Var) -> i64 {
        match var {
            Var::A => self.a,
            Var::Z => self.z,
            Var::V => self.v,
        }
    }

    pub fn plus(&self, o: &QDiffShift) -> QDiffShift {
        QDiffShift { a: self.a + o.a, z: self.z + o.z, v: self.v + o.v }
    }

    /// Budgets needed to apply this shift.
    pub fn budgets(&self) -> Budgets {
        Budgets::new(self.a.abs(), self.z.abs(), self.v.abs())
    }

    /// Action on a monomial: `x^e -> q^{t e} x^e`.
    pub fn act(&self, m: &Monomial, lat: Lattice) -> Result<Monomial> {
        let d = lat.den();
        let s = self.a as i128 * m.a as i128 + self.z as i128 * m.z as i128 + self.v as i128 * m.v as i128;
        if s % d as i128 != 0 {
            return Err(SeriesError::OffLattice { num: s as i64, den: d * d, lattice: d });
        }
        Ok(Monomial { q: m.q + (s / d as i128) as i64, ..*m })
    }
}

fn fmt_exp(lat: Lattice, e: i64) -> String {
    let r = lat.to_ratio(e);
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text for a monomial, e.g. `q^1/8*a^-1*v`.
pub fn format_monomial(lat: Lattice, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (name, e) in [("q", m.q), ("a", m.a), ("z", m.z), ("v", m.v)] {
        if e == 0 {
            continue;
        }
        if e == lat.den() {
            parts.push(name.to_string());
        } else {
            parts.push(format!("{}^{}", name, fmt_exp(lat, e)));
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

fn format_term(lat: Lattice, m: &Monomial, c: &BigRational) -> String {
    let mono = format_monomial(lat, m);
    if m.is_one() {
        return c.to_string();
    }
    if c.is_one() {
        mono
    } else if (-c).is_one() {
        format!("-{}", mono)
    } else {
        format!("{}*{}", c, mono)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0")?;
        } else {
            let mut first = true;
            for (m, c) in &self.terms {
                let t = format_term(self.lattice, m, c);
                if first {
                    f.write_str(&t)?;
                    first = false;
                } else if let Some(rest) = t.strip_prefix('-') {
                    write!(f, " - {}", rest)?;
                } else {
                    write!(f, " + {}", t)?;
                }
            }
        }
        if let Watermark::Finite(w) = self.watermark {
            write!(f, " + O(q^{})", fmt_exp(self.lattice, w))?;
        }
        Ok(())
    }
}

// Interchange format.

#[derive(Serialize, Deserialize)]
struct TermJson {
    c: [serde_json::Value; 2],
    q: i64,
    a: i64,
    z: i64,
    v: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WatermarkJson {
    Finite { num: i64 },
    Inf(String),
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    denominator: i64,
    watermark: WatermarkJson,
    budgets: Budgets,
    terms: Vec<TermJson>,
}

fn int_to_json(n: &BigInt) -> serde_json::Value {
    match n.to_i64() {
        Some(k) => serde_json::Value::from(k),
        None => serde_json::Value::from(n.to_string()),
    }
}

fn int_from_json(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| SeriesError::Interchange(format!("non-integer coefficient part {}", n))),
        serde_json::Value::String(s) => {
            s.parse::<BigInt>().map_err(|e| SeriesError::Interchange(format!("bad integer {}: {}", s, e)))
        }
        other => Err(SeriesError::Interchange(format!("unexpected coefficient part {}", other))),
    }
}

impl Series {
    pub fn to_json(&self) -> serde_json::Value {
        let sj = SeriesJson {
            denominator: self.lattice.den(),
            watermark: match self.watermark {
                Watermark::Finite(num) => WatermarkJson::Finite { num },
                Watermark::Infinite => WatermarkJson::Inf("inf".into()),
            },
            budgets: self.budgets,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson { c: [int_to_json(c.numer()), int_to_json(c.denom())], q: m.q, a: m.a, z: m.z, v: m.v })
                .collect(),
        };
        serde_json::to_value(sj).expect("series serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Series> {
        let sj: SeriesJson =
            serde_json::from_value(value.clone()).map_err(|e| SeriesError::Interchange(e.to_string()))?;
        let lattice = Lattice::new(sj.denominator)?;
        let watermark = match sj.watermark {
            WatermarkJson::Finite { num } => Watermark::Finite(num),
            WatermarkJson::Inf(s) if s == "inf" => Watermark::Infinite,
            WatermarkJson::Inf(s) => return Err(SeriesError::Interchange(format!("bad watermark {}", s))),
        };
        if sj.budgets.a < 0 || sj.budgets.z < 0 || sj.budgets.v < 0 {
            return Err(SeriesError::Interchange("negative budget".into()));
        }
        let mut terms = BTreeMap::new();
        for t in sj.terms {
            let den = int_from_json(&t.c[1])?;
            if den.is_zero() {
                return Err(SeriesError::Interchange("zero denominator".into()));
            }
            let c = BigRational::new(int_from_json(&t.c[0])?, den);
            let m = Monomial::new(t.q, t.a, t.z, t.v);
            if c.is_zero() || terms.insert(m, c).is_some() {
                return Err(SeriesError::Interchange("zero or repeated term".into()));
            }
        }
        Ok(Series { lattice, terms, watermark, budgets: sj.budgets })
    }
}

/// Sign of a rational, for reports.
pub fn sign_of(c: &BigRational) -> Ordering {
    if c.is_positive() {
        Ordering::Greater
    } else if c.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> Lattice {
        Lattice::default()
    }

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn additive_inverse_is_exact_zero() {
        let l = lat();
        let x = Series::monomial(l, Monomial::new(24, 48, 0, 0), r(1));
        let s = x.add(&x.neg()).unwrap();
        assert!(s.is_exact_zero());
    }

    #[test]
    fn square_of_half_binomial() {
        let l = lat();
        let x = Series::exact(l, [(1, Monomial::var(Var::A, 24)), (-1, Monomial::var(Var::A, -24))]);
        let sq = x.mul(&x).unwrap();
        let want = Series::exact(
            l,
            [(1, Monomial::var(Var::A, 48)), (-2, Monomial::ONE), (1, Monomial::var(Var::A, -48))],
        );
        assert_eq!(sq, want);
    }

    #[test]
    fn binomial_bar() {
        let l = lat();
        let x = Series::exact(l, [(1, Monomial::var(Var::V, 48)), (1, Monomial::new(48, 0, 0, -48))]);
        let got = x.substitute(Var::V, Monomial::var(Var::V, -48)).unwrap();
        let want = Series::exact(l, [(1, Monomial::var(Var::V, -48)), (1, Monomial::new(48, 0, 0, 48))]);
        assert_eq!(got, want);
        let anti = Series::exact(l, [(1, Monomial::var(Var::V, 48)), (-1, Monomial::var(Var::V, -48))]);
        assert_eq!(anti.bar_v(), anti.neg());
    }

    #[test]
    fn leading_slice_and_zero() {
        let l = lat();
        let s = Series::exact(l, [(1, Monomial::new(6, 24, 0, 0)), (-1, Monomial::new(54, 72, 0, 0))]);
        match s.leading() {
            Leading::Slice { order, slice } => {
                assert_eq!(order, 6);
                assert_eq!(slice, Series::mono(l, Monomial::var(Var::A, 24)));
            }
            other => panic!("{:?}", other),
        }
        assert_eq!(Series::zero(l).leading(), Leading::ExactZero);
    }

    #[test]
    fn budget_is_enforced() {
        let l = lat();
        let s = Series::truncated(l, [(Monomial::var(Var::Z, 48), r(1))], Watermark::Finite(48), Budgets::only(Var::Z, 12));
        assert!(s.shift(Var::Z, 12).is_ok());
        assert!(matches!(s.shift(Var::Z, 24), Err(SeriesError::BudgetExceeded { .. })));
        assert!(matches!(s.shift(Var::A, 1), Err(SeriesError::BudgetExceeded { .. })));
    }

    #[test]
    fn lattice_mismatch_is_an_error() {
        let a = Series::one(Lattice::new(48).unwrap());
        let b = Series::one(Lattice::new(96).unwrap());
        assert!(matches!(a.add(&b), Err(SeriesError::LatticeMismatch(48, 96))));
        assert!(Lattice::new(40).is_err());
    }

    #[test]
    fn watermark_of_product_follows_least_orders() {
        let l = lat();
        let x = Series::truncated(l, [(Monomial::q(6), r(1))], Watermark::Finite(96), Budgets::NONE);
        let y = Series::truncated(l, [(Monomial::q(12), r(1))], Watermark::Finite(48), Budgets::NONE);
        let p = x.mul(&y).unwrap();
        assert_eq!(p.watermark(), Watermark::Finite(54));
    }

    #[test]
    fn json_round_trip() {
        let l = lat();
        let s = Series::truncated(
            l,
            [(Monomial::new(6, 24, -48, 0), BigRational::new(3.into(), 7.into()))],
            Watermark::Finite(96),
            Budgets::new(0, 12, 0),
        );
        let back = Series::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);
        let e = Series::exact(l, [(2, Monomial::ONE)]);
        assert_eq!(Series::from_json(&e.to_json()).unwrap(), e);
    }
}
