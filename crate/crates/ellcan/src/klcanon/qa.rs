//! The field Q(a) of rational functions in one variable, used as the
//! coefficient field of the canonical-basis linear system.

use std::fmt;

use num::{BigRational, One, Zero};

/// Dense polynomial over Q, coefficients from degree 0 up, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPoly(Vec<BigRational>);

impl UPoly {
    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn one() -> Self {
        UPoly(vec![BigRational::one()])
    }

    pub fn monomial(deg: usize, c: BigRational) -> Self {
        let mut v = vec![BigRational::zero(); deg + 1];
        v[deg] = c;
        UPoly(v).trim()
    }

    pub fn from_coeffs(c: Vec<BigRational>) -> Self {
        UPoly(c).trim()
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lead(&self) -> Option<&BigRational> {
        self.0.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let z = BigRational::zero();
        UPoly((0..n).map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z)).collect()).trim()
    }

    pub fn neg(&self) -> Self {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        UPoly(self.0.iter().map(|c| c * k).collect()).trim()
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, x) in self.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.0.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        UPoly(out).trim()
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.lead().expect("nonzero").clone();
        let mut rem = self.clone();
        let mut quot = vec![BigRational::zero(); self.0.len().saturating_sub(dd).max(1)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = rem.lead().expect("nonzero") / &lead;
            quot[rd - dd] = c.clone();
            rem = rem.sub(&Self::monomial(rd - dd, c).mul(d));
        }
        (UPoly(quot).trim(), rem)
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            Some(l) => self.scale(&(BigRational::one() / l)),
            None => Self::zero(),
        }
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut x, mut y) = (self.clone(), o.clone());
        while !y.is_zero() {
            let r = x.divrem(&y).1;
            x = y;
            y = r;
        }
        x.monic()
    }

    /// Multiplicity of the root at zero.
    pub fn low_order(&self) -> usize {
        self.0.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }
}

/// Element of Q(a), kept reduced with a monic denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatA {
    num: UPoly,
    den: UPoly,
}

impl RatA {
    pub fn new(num: UPoly, den: UPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator in Q(a)");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (n, _) = num.divrem(&g);
        let (d, _) = den.divrem(&g);
        let l = BigRational::one() / d.lead().expect("nonzero");
        RatA { num: n.scale(&l), den: d.scale(&l) }
    }

    pub fn zero() -> Self {
        RatA { num: UPoly::zero(), den: UPoly::one() }
    }

    pub fn one() -> Self {
        RatA { num: UPoly::one(), den: UPoly::one() }
    }

    pub fn constant(c: BigRational) -> Self {
        RatA::new(UPoly::from_coeffs(vec![c]), UPoly::one())
    }

    /// `c a^e` for any integer `e`.
    pub fn monomial(e: i64, c: BigRational) -> Self {
        if e >= 0 {
            RatA::new(UPoly::monomial(e as usize, c), UPoly::one())
        } else {
            RatA::new(UPoly::from_coeffs(vec![c]), UPoly::monomial((-e) as usize, BigRational::one()))
        }
    }

    pub fn num(&self) -> &UPoly {
        &self.num
    }

    pub fn den(&self) -> &UPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RatA::new(self.num.add(&o.num), self.den.clone());
        }
        RatA::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> Self {
        RatA { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        RatA::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(RatA::new(self.den.clone(), self.num.clone()))
        }
    }

    /// The Laurent polynomial `num / a^k` when the denominator is a power of `a`.
    pub fn as_laurent(&self) -> Option<Vec<(i64, BigRational)>> {
        let d = self.den.degree()?;
        if self.den != UPoly::monomial(d, BigRational::one()) {
            return None;
        }
        Some(
            self.num
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as i64 - d as i64, c.clone()))
                .collect(),
        )
    }
}

impl fmt::Display for RatA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = |u: &UPoly| {
            u.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| format!("{c}*a^{i}"))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        if self.den == UPoly::one() {
            write!(f, "{}", if self.is_zero() { "0".into() } else { p(&self.num) })
        } else {
            write!(f, "({}) / ({})", p(&self.num), p(&self.den))
        }
    }
}

/// Solves `rows * x = rhs` over Q(a). Returns `None` when inconsistent, and
/// the rank alongside a particular solution otherwise.
pub fn solve(mut rows: Vec<(Vec<RatA>, RatA)>, n: usize) -> Option<(usize, Vec<RatA>)> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i].0[col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r].0[col].inv().expect("nonzero pivot");
        let (prow, prhs) = {
            let (c, b) = &rows[r];
            (c.iter().map(|x| x.mul(&inv)).collect::<Vec<_>>(), b.mul(&inv))
        };
        rows[r] = (prow.clone(), prhs.clone());
        for (i, (coeffs, rhs)) in rows.iter_mut().enumerate() {
            if i == r || coeffs[col].is_zero() {
                continue;
            }
            let f = coeffs[col].clone();
            for (j, pj) in prow.iter().enumerate().skip(col) {
                if !pj.is_zero() {
                    coeffs[j] = coeffs[j].sub(&f.mul(pj));
                }
            }
            *rhs = rhs.sub(&f.mul(&prhs));
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|(_, b)| !b.is_zero()) {
        return None;
    }
    let mut x = vec![RatA::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rows[i].1.clone();
    }
    Some((pivots.len(), x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn reduces_common_factors() {
        // (a^2 - 1) / (a - 1) = a + 1
        let x = RatA::new(UPoly::from_coeffs(vec![q(-1), q(0), q(1)]), UPoly::from_coeffs(vec![q(-1), q(1)]));
        assert_eq!(x, RatA::new(UPoly::from_coeffs(vec![q(1), q(1)]), UPoly::one()));
    }

    #[test]
    fn laurent_roundtrip() {
        let x = RatA::monomial(-2, q(3)).add(&RatA::monomial(1, q(1)));
        assert_eq!(x.as_laurent().unwrap(), vec![(-2, q(3)), (1, q(1))]);
    }

    #[test]
    fn small_system() {
        // x + a y = 1, x - y = 0
        let a = RatA::monomial(1, q(1));
        let rows = vec![(vec![RatA::one(), a.clone()], RatA::one()), (vec![RatA::one(), RatA::one().neg()], RatA::zero())];
        let (rank, x) = solve(rows, 2).unwrap();
        assert_eq!(rank, 2);
        let want = RatA::one().inv().unwrap().mul(&RatA::new(UPoly::one(), UPoly::from_coeffs(vec![q(1), q(1)])));
        assert_eq!(x[0], want);
        assert_eq!(x[1], want);
    }
}
