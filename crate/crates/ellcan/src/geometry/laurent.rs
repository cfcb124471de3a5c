//! Ratios of Laurent polynomials in `a`, `z`, `v`, and 2x2 matrices of them.

use std::fmt;

use num::{BigRational, One, Zero};

use super::{GeometryError, Result};
use crate::series::{format_monomial, Lattice, Monomial, Series, Var, VarMap};

/// `num / den` with both exact and free of `q`.
#[derive(Debug, Clone)]
pub struct LaurentFraction {
    num: Series,
    den: Series,
}

fn check_exact(s: &Series) -> Result<()> {
    if !s.is_exact() || s.terms().any(|(m, _)| m.q != 0) {
        return Err(GeometryError::NotLaurent(s.to_string()));
    }
    Ok(())
}

/// If `s` is a single term, returns it.
fn single_term(s: &Series) -> Option<(Monomial, BigRational)> {
    let mut it = s.terms();
    let (m, c) = it.next()?;
    if it.next().is_some() {
        return None;
    }
    Some((*m, c.clone()))
}

fn leading(s: &Series) -> Option<(Monomial, BigRational)> {
    s.terms().max_by_key(|(m, _)| (m.v, m.a, m.z)).map(|(m, c)| (*m, c.clone()))
}

/// `num / den` when the division is exact, by lexicographic long division.
/// Quotient exponents are confined to the box allowed by the degree ranges,
/// which bounds the loop.
pub fn exact_div(num: &Series, den: &Series) -> Option<Series> {
    let lat = num.lattice();
    let (ld, cd) = leading(den)?;
    let mut bounds = Vec::new();
    for var in [Var::A, Var::Z, Var::V] {
        let (dlo, dhi) = den.degree_range(var)?;
        match num.degree_range(var) {
            Some((nlo, nhi)) => bounds.push((var, nlo - dhi, nhi - dlo)),
            None => return Some(Series::zero(lat)),
        }
    }
    let mut rem = num.clone();
    let mut quot = Series::zero(lat);
    while let Some((lr, cr)) = leading(&rem) {
        let t = lr.div(&ld);
        if bounds.iter().any(|&(var, lo, hi)| t.get(var) < lo || t.get(var) > hi) {
            return None;
        }
        let step = Series::monomial(lat, t, cr / &cd);
        rem = rem.sub(&den.mul(&step).ok()?).ok()?;
        quot = quot.add(&step).ok()?;
    }
    Some(quot)
}

impl LaurentFraction {
    pub fn new(num: Series, den: Series) -> Result<Self> {
        check_exact(&num)?;
        check_exact(&den)?;
        if den.is_empty() {
            return Err(GeometryError::ZeroDenominator);
        }
        Ok(LaurentFraction { num, den }.tidy())
    }

    pub fn poly(num: Series) -> Result<Self> {
        let lat = num.lattice();
        Self::new(num, Series::one(lat))
    }

    pub fn zero(lat: Lattice) -> Self {
        LaurentFraction { num: Series::zero(lat), den: Series::one(lat) }
    }

    pub fn one(lat: Lattice) -> Self {
        LaurentFraction { num: Series::one(lat), den: Series::one(lat) }
    }

    pub fn monomial(lat: Lattice, m: Monomial, c: i64) -> Self {
        LaurentFraction { num: Series::exact(lat, [(c, m)]), den: Series::one(lat) }
    }

    pub fn num(&self) -> &Series {
        &self.num
    }

    pub fn den(&self) -> &Series {
        &self.den
    }

    pub fn lattice(&self) -> Lattice {
        self.num.lattice()
    }

    /// Folds a monomial denominator into the numerator.
    fn tidy(self) -> Self {
        let lat = self.num.lattice();
        if let Some((m, c)) = single_term(&self.den) {
            let inv = BigRational::one() / c;
            return LaurentFraction { num: self.num.mul_monomial(&m.inv()).scale(&inv), den: Series::one(lat) };
        }
        if self.num.is_empty() {
            return Self::zero(lat);
        }
        if let Some(q) = exact_div(&self.num, &self.den) {
            return LaurentFraction { num: q, den: Series::one(lat) };
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let num = self.num.mul(&o.den).and_then(|x| x.add(&o.num.mul(&self.den)?)).expect("shared lattice");
        let den = self.den.mul(&o.den).expect("shared lattice");
        LaurentFraction { num, den }.tidy()
    }

    pub fn neg(&self) -> Self {
        LaurentFraction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let num = self.num.mul(&o.num).expect("shared lattice");
        let den = self.den.mul(&o.den).expect("shared lattice");
        LaurentFraction { num, den }.tidy()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(GeometryError::ZeroDenominator);
        }
        Ok(LaurentFraction { num: self.den.clone(), den: self.num.clone() }.tidy())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn mul_monomial(&self, m: &Monomial, c: i64) -> Self {
        LaurentFraction { num: self.num.mul_monomial(m).scale_int(c), den: self.den.clone() }.tidy()
    }

    pub fn substitute_all(&self, map: &VarMap) -> Result<Self> {
        Ok(LaurentFraction { num: self.num.substitute_all(map)?, den: self.den.substitute_all(map)? }.tidy())
    }

    pub fn bar_v(&self) -> Self {
        LaurentFraction { num: self.num.bar_v(), den: self.den.bar_v() }
    }

    /// Cross-multiplied equality.
    pub fn equals(&self, o: &Self) -> bool {
        let l = self.num.mul(&o.den).expect("shared lattice");
        let r = o.num.mul(&self.den).expect("shared lattice");
        l == r
    }

    pub fn free_of(&self, var: Var) -> bool {
        self.num.free_of(var) && self.den.free_of(var)
    }

    /// The numerator when the denominator is 1.
    pub fn as_polynomial(&self) -> Option<&Series> {
        if self.den == Series::one(self.lattice()) {
            Some(&self.num)
        } else {
            None
        }
    }
}

impl PartialEq for LaurentFraction {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

fn poly_text(s: &Series) -> String {
    if s.is_empty() {
        return "0".into();
    }
    let lat = s.lattice();
    let mut out = String::new();
    // descending in (v, a, z) reads more naturally than the storage order
    let mut terms: Vec<_> = s.terms().collect();
    terms.sort_by_key(|(m, _)| std::cmp::Reverse((m.v, m.a, m.z)));
    for (i, (m, c)) in terms.iter().enumerate() {
        let mono = format_monomial(lat, m);
        let neg = *c < &BigRational::zero();
        let mag = if neg { -(*c).clone() } else { (*c).clone() };
        let body = if m.is_one() {
            mag.to_string()
        } else if mag.is_one() {
            mono
        } else {
            format!("{}*{}", mag, mono)
        };
        match (i, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => out.push_str(&format!("-{}", body)),
            (_, false) => out.push_str(&format!(" + {}", body)),
            (_, true) => out.push_str(&format!(" - {}", body)),
        }
    }
    out
}

impl fmt::Display for LaurentFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Series::one(self.lattice()) {
            write!(f, "{}", poly_text(&self.num))
        } else {
            write!(f, "({}) / ({})", poly_text(&self.num), poly_text(&self.den))
        }
    }
}

/// Rows are restriction points, columns are basis elements.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentMatrix {
    pub entries: [[LaurentFraction; 2]; 2],
}

impl LaurentMatrix {
    pub fn new(entries: [[LaurentFraction; 2]; 2]) -> Self {
        LaurentMatrix { entries }
    }

    pub fn identity(lat: Lattice) -> Self {
        let o = LaurentFraction::one(lat);
        let z = LaurentFraction::zero(lat);
        LaurentMatrix { entries: [[o.clone(), z.clone()], [z, o]] }
    }

    pub fn get(&self, row: usize, col: usize) -> &LaurentFraction {
        &self.entries[row][col]
    }

    pub fn column(&self, col: usize) -> [LaurentFraction; 2] {
        [self.entries[0][col].clone(), self.entries[1][col].clone()]
    }

    pub fn from_columns(c0: [LaurentFraction; 2], c1: [LaurentFraction; 2]) -> Self {
        let [a, b] = c0;
        let [c, d] = c1;
        LaurentMatrix { entries: [[a, c], [b, d]] }
    }

    pub fn map<F: Fn(&LaurentFraction) -> LaurentFraction>(&self, f: F) -> Self {
        let e = &self.entries;
        LaurentMatrix { entries: [[f(&e[0][0]), f(&e[0][1])], [f(&e[1][0]), f(&e[1][1])]] }
    }

    pub fn try_map<F: Fn(&LaurentFraction) -> Result<LaurentFraction>>(&self, f: F) -> Result<Self> {
        let e = &self.entries;
        Ok(LaurentMatrix { entries: [[f(&e[0][0])?, f(&e[0][1])?], [f(&e[1][0])?, f(&e[1][1])?]] })
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (x, y) = (&self.entries, &o.entries);
        let cell = |i: usize, j: usize| x[i][0].mul(&y[0][j]).add(&x[i][1].mul(&y[1][j]));
        LaurentMatrix { entries: [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]] }
    }

    pub fn apply(&self, x: &[LaurentFraction; 2]) -> [LaurentFraction; 2] {
        let e = &self.entries;
        [e[0][0].mul(&x[0]).add(&e[0][1].mul(&x[1])), e[1][0].mul(&x[0]).add(&e[1][1].mul(&x[1]))]
    }

    pub fn det(&self) -> LaurentFraction {
        let e = &self.entries;
        e[0][0].mul(&e[1][1]).sub(&e[0][1].mul(&e[1][0]))
    }

    pub fn adjugate(&self) -> Self {
        let e = &self.entries;
        LaurentMatrix { entries: [[e[1][1].clone(), e[0][1].neg()], [e[1][0].neg(), e[0][0].clone()]] }
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det().inv().map_err(|_| GeometryError::Singular)?;
        Ok(self.adjugate().map(|x| x.mul(&d)))
    }

    /// Conjugation by the swap matrix.
    pub fn swapped(&self) -> Self {
        let e = &self.entries;
        LaurentMatrix { entries: [[e[1][1].clone(), e[1][0].clone()], [e[0][1].clone(), e[0][0].clone()]] }
    }

    pub fn bar_v(&self) -> Self {
        self.map(LaurentFraction::bar_v)
    }

    pub fn substitute_all(&self, map: &VarMap) -> Result<Self> {
        self.try_map(|x| x.substitute_all(map))
    }

    pub fn scale(&self, c: &LaurentFraction) -> Self {
        self.map(|x| x.mul(c))
    }
}

impl fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[{} ; {}]", row[0], row[1])?;
        }
        Ok(())
    }
}
