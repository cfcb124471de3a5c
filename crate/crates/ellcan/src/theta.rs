//! Theta series: the triple-product sum, its product form, the even/odd
//! pieces, the Euler product, and fractions with theta denominators.

use std::collections::BTreeMap;

use num::{BigRational, One};
use thiserror::Error;

use crate::series::{Budgets, Lattice, Monomial, Series, SeriesError, Var, VarMap, Watermark, VARS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThetaError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("theta argument has no a, z or v dependence")]
    DegenerateArgument,
}

pub type Result<T> = std::result::Result<T, ThetaError>;

/// A monomial argument of a theta function, coefficient +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaArg(Monomial);

impl ThetaArg {
    pub fn new(m: Monomial) -> Result<Self> {
        if m.a == 0 && m.z == 0 && m.v == 0 {
            Err(ThetaError::DegenerateArgument)
        } else {
            Ok(ThetaArg(m))
        }
    }

    /// Integer exponents `q^q a^a z^z v^v`.
    pub fn ints(lat: Lattice, q: i64, a: i64, z: i64, v: i64) -> Result<Self> {
        let d = lat.den();
        Self::new(Monomial::new(q * d, a * d, z * d, v * d))
    }

    pub fn monomial(&self) -> Monomial {
        self.0
    }

    pub fn inv(&self) -> ThetaArg {
        ThetaArg(self.0.inv())
    }

    pub fn mul(&self, m: &Monomial) -> Result<ThetaArg> {
        ThetaArg::new(self.0.mul(m))
    }

    pub fn map(&self, map: &VarMap, lat: Lattice) -> Result<ThetaArg> {
        ThetaArg::new(map.apply(&self.0, lat)?)
    }
}

/// Truncation order and shift budgets shared by every builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaCtx {
    pub lattice: Lattice,
    /// Watermark numerator.
    pub order: i64,
    pub budgets: Budgets,
}

/// Largest `|k|` for which `D*(alpha k^2 + beta k) - sum S|gamma k|` can be
/// below `order*D`, all quantities as lattice numerators.
fn radius(lat: Lattice, order: i64, budgets: &Budgets, alpha: f64, beta: i64, gamma: &Monomial) -> i64 {
    let d = lat.den() as f64;
    let b = d * beta.abs() as f64
        + VARS.iter().map(|x| budgets.get(*x) as f64 * gamma.get(*x).abs() as f64).sum::<f64>();
    let disc = b * b + 4.0 * d * alpha * order as f64 * d;
    if disc < 0.0 {
        return -1;
    }
    ((b + disc.sqrt()) / (2.0 * d * alpha)).ceil() as i64 + 2
}

impl ThetaCtx {
    pub fn new(lattice: Lattice, order: i64, budgets: Budgets) -> Self {
        ThetaCtx { lattice, order, budgets }
    }

    /// Integer order, no budgets.
    pub fn plain(lattice: Lattice, order: i64) -> Self {
        Self::new(lattice, lattice.int(order), Budgets::NONE)
    }

    pub fn with_budgets(&self, budgets: Budgets) -> Self {
        ThetaCtx { budgets, ..*self }
    }

    pub fn with_order(&self, order: i64) -> Self {
        ThetaCtx { order, ..*self }
    }

    fn finish(&self, terms: Vec<(Monomial, BigRational)>) -> Series {
        Series::truncated(self.lattice, terms, Watermark::Finite(self.order), self.budgets)
    }

    /// `sum_m (-1)^m q^{(m+1/2)^2/2} x^{m+1/2}`.
    pub fn tilde(&self, arg: ThetaArg) -> Result<Series> {
        let lat = self.lattice;
        let d = lat.den();
        let x = arg.0;
        // index k = 2m+1 odd; q-numerator D k^2/8 + k x_q/2, var numerators k x_e/2
        let half = |e: i64, k: i64| -> Result<i64> {
            if (k * e) % 2 != 0 {
                return Err(SeriesError::OffLattice { num: k * e, den: 2 * d, lattice: d }.into());
            }
            Ok(k * e / 2)
        };
        let r = radius(lat, self.order, &self.budgets, d as f64 / 8.0, x.q / 2, &half_mon(&x));
        let mut terms = Vec::new();
        let mut k = -r - 1;
        if k % 2 == 0 {
            k += 1;
        }
        while k <= r + 1 {
            let q = d * k * k / 8 + half(x.q, k)?;
            let m = Monomial::new(q, half(x.a, k)?, half(x.z, k)?, half(x.v, k)?);
            let sign = if ((k - 1) / 2).rem_euclid(2) == 0 { 1 } else { -1 };
            terms.push((m, BigRational::from_integer(sign.into())));
            k += 2;
        }
        Ok(self.finish(terms))
    }

    /// `theta_0` (`parity = 0`) or `theta_1` (`parity = 1`): the sum of
    /// `q^{n^2} x^{2n}` over `n` in `Z` or `Z + 1/2`.
    pub fn theta01(&self, parity: u8, arg: ThetaArg) -> Result<Series> {
        let lat = self.lattice;
        let d = lat.den();
        let x = arg.0;
        // k = 2n; q-numerator D k^2/4 + k x_q, var numerators k x_e
        let r = radius(lat, self.order, &self.budgets, d as f64 / 4.0, x.q, &x.without_q());
        let mut terms = Vec::new();
        let mut k = -r - 2;
        if k.rem_euclid(2) != parity as i64 {
            k += 1;
        }
        while k <= r + 2 {
            let m = Monomial::new(d * k * k / 4 + k * x.q, k * x.a, k * x.z, k * x.v);
            terms.push((m, BigRational::one()));
            k += 2;
        }
        Ok(self.finish(terms))
    }

    pub fn theta0(&self, arg: ThetaArg) -> Result<Series> {
        self.theta01(0, arg)
    }

    pub fn theta1(&self, arg: ThetaArg) -> Result<Series> {
        self.theta01(1, arg)
    }

    /// `(q;q)_inf` via the pentagonal number theorem.
    pub fn euler(&self) -> Series {
        let d = self.lattice.den();
        let mut terms = Vec::new();
        let mut j = 0i64;
        loop {
            let mut any = false;
            for k in if j == 0 { vec![0] } else { vec![j, -j] } {
                let e = d * k * (3 * k - 1) / 2;
                if e < self.order {
                    any = true;
                    let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
                    terms.push((Monomial::q(e), BigRational::from_integer(sign.into())));
                }
            }
            if !any && j > 0 {
                break;
            }
            j += 1;
        }
        Series::truncated(self.lattice, terms, Watermark::Finite(self.order), Budgets::NONE)
    }

    /// Product form `(x^{1/2}-x^{-1/2}) prod_{m>=1} (1-q^m x)(1-q^m x^{-1})`.
    /// Carries no shift budgets.
    pub fn product(&self, arg: ThetaArg) -> Result<Series> {
        let lat = self.lattice;
        let d = lat.den();
        let x = arg.0;
        let c = x.q.abs();
        let xh = x.pow_frac(1, 2, lat)?;
        let pre = Series::exact(lat, [(1, xh), (-1, xh.inv())]);
        let mut factors = Vec::new();
        // lowest q-order any product of the other factors can reach
        let floor_all = -c / 2 + (1..).take_while(|m| d * m < c).map(|m| d * m - c).sum::<i64>();
        let mut m = 1;
        while d * m - c + floor_all < self.order {
            let fa = Series::exact(lat, [(1, Monomial::ONE), (-1, Monomial::q(d * m).mul(&x))]);
            let fb = Series::exact(lat, [(1, Monomial::ONE), (-1, Monomial::q(d * m).mul(&x.inv()))]);
            factors.push(fa);
            factors.push(fb);
            m += 1;
        }
        let min_q = |s: &Series| s.min_q().unwrap_or(0).min(0);
        let mut floors = vec![0i64; factors.len() + 1];
        for i in (0..factors.len()).rev() {
            floors[i] = floors[i + 1] + min_q(&factors[i]);
        }
        let mut acc = pre;
        for (i, f) in factors.iter().enumerate() {
            acc = acc.mul(f)?;
            let cut = self.order - floors[i + 1];
            acc = Series::truncated(
                lat,
                acc.terms().filter(|(k, _)| k.q < cut).map(|(k, c)| (*k, c.clone())),
                Watermark::Infinite,
                Budgets::NONE,
            );
        }
        Ok(Series::truncated(lat, acc.terms().map(|(k, c)| (*k, c.clone())), Watermark::Finite(self.order), Budgets::NONE))
    }

    /// Product of `tilde` over a list of arguments.
    pub fn tilde_product(&self, args: &[ThetaArg]) -> Result<Series> {
        let mut out = Series::one(self.lattice);
        for a in args {
            out = out.mul(&self.tilde(*a)?)?;
        }
        Ok(out)
    }
}

fn half_mon(x: &Monomial) -> Monomial {
    Monomial::new(0, x.a / 2, x.z / 2, x.v / 2)
}

/// `q^{qshift} (q;q)^{euler_pow} num / prod tilde(den)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaFraction {
    pub num: Series,
    pub den: Vec<ThetaArg>,
    pub euler_pow: i64,
    pub qshift: i64,
}

/// Outcome of a cross-multiplied comparison.
#[derive(Debug, Clone)]
pub struct TfComparison {
    pub equal: bool,
    pub below: Watermark,
    pub residual: Series,
}

fn multiset(args: &[ThetaArg]) -> BTreeMap<ThetaArg, usize> {
    let mut m = BTreeMap::new();
    for a in args {
        *m.entry(*a).or_insert(0) += 1;
    }
    m
}

/// Elements of `a` not matched in `b`.
fn minus(a: &BTreeMap<ThetaArg, usize>, b: &BTreeMap<ThetaArg, usize>) -> Vec<ThetaArg> {
    let mut out = Vec::new();
    for (k, n) in a {
        let m = b.get(k).copied().unwrap_or(0);
        for _ in m..*n {
            out.push(*k);
        }
    }
    out
}

impl ThetaFraction {
    pub fn from_series(num: Series) -> Self {
        ThetaFraction { num, den: Vec::new(), euler_pow: 0, qshift: 0 }
    }

    pub fn zero(lat: Lattice) -> Self {
        Self::from_series(Series::zero(lat))
    }

    /// `theta(x) = q^{-1/8} (q;q)^{-1} tilde(x)`.
    pub fn theta(ctx: &ThetaCtx, arg: ThetaArg) -> Result<Self> {
        Ok(ThetaFraction { num: ctx.tilde(arg)?, den: Vec::new(), euler_pow: -1, qshift: -ctx.lattice.den() / 8 })
    }

    /// Product of thetas over a list of arguments.
    pub fn theta_product(ctx: &ThetaCtx, args: &[ThetaArg]) -> Result<Self> {
        let k = args.len() as i64;
        Ok(ThetaFraction {
            num: ctx.tilde_product(args)?,
            den: Vec::new(),
            euler_pow: -k,
            qshift: -k * ctx.lattice.den() / 8,
        })
    }

    /// `1 / prod theta(args)`.
    pub fn inverse_thetas(lat: Lattice, args: &[ThetaArg]) -> Self {
        let k = args.len() as i64;
        ThetaFraction { num: Series::one(lat), den: args.to_vec(), euler_pow: k, qshift: k * lat.den() / 8 }
    }

    pub fn lattice(&self) -> Lattice {
        self.num.lattice()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.num.is_exact_zero()
    }

    pub fn mul(&self, other: &ThetaFraction) -> Result<ThetaFraction> {
        let mut den = self.den.clone();
        den.extend_from_slice(&other.den);
        Ok(ThetaFraction {
            num: self.num.mul(&other.num)?,
            den,
            euler_pow: self.euler_pow + other.euler_pow,
            qshift: self.qshift + other.qshift,
        }
        .sorted_den())
    }

    pub fn mul_series(&self, s: &Series) -> Result<ThetaFraction> {
        Ok(ThetaFraction { num: self.num.mul(s)?, ..self.clone() })
    }

    pub fn mul_monomial(&self, m: &Monomial) -> ThetaFraction {
        ThetaFraction { num: self.num.mul_monomial(&m.without_q()), qshift: self.qshift + m.q, ..self.clone() }
    }

    pub fn neg(&self) -> ThetaFraction {
        ThetaFraction { num: self.num.neg(), ..self.clone() }
    }

    pub(crate) fn sorted_den(mut self) -> ThetaFraction {
        self.den.sort();
        self
    }

    /// Sum over a common denominator; the missing denominator thetas are
    /// expanded with `ctx`.
    pub fn add(&self, other: &ThetaFraction, ctx: &ThetaCtx) -> Result<ThetaFraction> {
        let ma = multiset(&self.den);
        let mb = multiset(&other.den);
        let only_a = minus(&ma, &mb);
        let only_b = minus(&mb, &ma);
        let mut den = self.den.clone();
        den.extend(only_b.iter().copied());
        den.sort();
        let e = self.euler_pow.min(other.euler_pow);
        let s = self.qshift.min(other.qshift);
        let lift = |f: &ThetaFraction, missing: &[ThetaArg]| -> Result<Series> {
            let mut n = f.num.mul(&ctx.tilde_product(missing)?)?;
            for _ in 0..(f.euler_pow - e) {
                n = n.mul(&ctx.euler())?;
            }
            Ok(n.mul_monomial(&Monomial::q(f.qshift - s)))
        };
        let num = lift(self, &only_b)?.add(&lift(other, &only_a)?)?;
        Ok(ThetaFraction { num, den, euler_pow: e, qshift: s })
    }

    pub fn sub(&self, other: &ThetaFraction, ctx: &ThetaCtx) -> Result<ThetaFraction> {
        self.add(&other.neg(), ctx)
    }

    /// Variable substitution; numerators must carry enough budget.
    pub fn substitute_all(&self, map: &VarMap) -> Result<ThetaFraction> {
        let lat = self.lattice();
        let den = self.den.iter().map(|a| a.map(map, lat)).collect::<Result<Vec<_>>>()?;
        Ok(ThetaFraction { num: self.num.substitute_all(map)?, den, ..self.clone() }.sorted_den())
    }

    pub fn bar_v(&self) -> Result<ThetaFraction> {
        self.substitute_all(&VarMap::invert(self.lattice(), &[Var::V]))
    }

    /// Brings `self` and `other` to a pair of numerators over a common
    /// denominator with nonnegative Euler powers and the same q-prefactor.
    pub fn cross(&self, other: &ThetaFraction, ctx: &ThetaCtx) -> Result<(Series, Series)> {
        let ma = multiset(&self.den);
        let mb = multiset(&other.den);
        let only_a = minus(&ma, &mb);
        let only_b = minus(&mb, &ma);
        let e = self.euler_pow.min(other.euler_pow);
        let s = self.qshift.min(other.qshift);
        let lift = |f: &ThetaFraction, missing: &[ThetaArg]| -> Result<Series> {
            let mut n = f.num.mul(&ctx.tilde_product(missing)?)?;
            let eul = ctx.euler();
            for _ in 0..(f.euler_pow - e) {
                n = n.mul(&eul)?;
            }
            Ok(n.mul_monomial(&Monomial::q(f.qshift - s)))
        };
        Ok((lift(self, &only_b)?, lift(other, &only_a)?))
    }

    pub fn tf_equal(&self, other: &ThetaFraction, ctx: &ThetaCtx) -> Result<TfComparison> {
        let (x, y) = self.cross(other, ctx)?;
        let c = x.equal_up_to(&y)?;
        Ok(TfComparison { equal: c.equal, below: c.below, residual: c.residual })
    }

    /// Shifts `var -> q^t var` in both the numerator and the denominator args.
    pub fn shift(&self, var: Var, t: i64) -> Result<ThetaFraction> {
        self.substitute_all(&VarMap::shift(self.lattice(), var, t))
    }
}

/// Least q-exponent of `tilde(arg)`, as a lattice numerator.
pub fn tilde_least_order(lat: Lattice, arg: ThetaArg) -> i64 {
    let d = lat.den();
    let x = arg.0;
    // minimise D k^2/8 + k x_q/2 over odd k; the real minimiser is -2 x_q / D
    let centre = (-2 * x.q).div_euclid(d);
    (centre - 3..=centre + 3)
        .filter(|k| k.rem_euclid(2) == 1)
        .map(|k| d * k * k / 8 + k * x.q / 2)
        .min()
        .expect("window contains odd numbers")
}

/// Leading order and slice of `tilde(arg)`.
pub fn tilde_leading(lat: Lattice, arg: ThetaArg) -> Result<(i64, Series)> {
    let l = tilde_least_order(lat, arg);
    let ctx = ThetaCtx::new(lat, l + lat.den() / 2, Budgets::NONE);
    match ctx.tilde(arg)?.leading() {
        crate::series::Leading::Slice { order, slice } => Ok((order, slice)),
        _ => unreachable!("theta series have a nonzero leading term"),
    }
}

/// `coeff * prefactor * prod theta(args)`, with `theta` the product-form
/// normalisation.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaTerm {
    pub coeff: BigRational,
    pub prefactor: Monomial,
    pub args: Vec<ThetaArg>,
}

/// A sum of theta products over a product of theta denominators, kept
/// symbolic so substitutions act on the arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaExpr {
    pub terms: Vec<ThetaTerm>,
    pub den: Vec<ThetaArg>,
}

/// `q^order num / den` as `q -> 0`, or a vanishing numerator.
#[derive(Debug, Clone, PartialEq)]
pub enum LeadingRatio {
    Zero,
    Ratio { order: i64, num: Series, den: Series },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LimitError {
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error("numerator cancels beyond the search depth")]
    Unresolved,
}

impl ThetaExpr {
    pub fn zero() -> Self {
        ThetaExpr { terms: Vec::new(), den: Vec::new() }
    }

    pub fn thetas(args: &[ThetaArg]) -> Self {
        ThetaExpr {
            terms: vec![ThetaTerm { coeff: BigRational::one(), prefactor: Monomial::ONE, args: args.to_vec() }],
            den: Vec::new(),
        }
    }

    pub fn monomial(m: Monomial) -> Self {
        ThetaExpr { terms: vec![ThetaTerm { coeff: BigRational::one(), prefactor: m, args: Vec::new() }], den: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn over(mut self, den: &[ThetaArg]) -> Self {
        self.den.extend_from_slice(den);
        self.den.sort();
        self
    }

    pub fn scale(&self, c: &BigRational, m: &Monomial) -> Self {
        ThetaExpr {
            terms: self
                .terms
                .iter()
                .map(|t| ThetaTerm { coeff: &t.coeff * c, prefactor: t.prefactor.mul(m), args: t.args.clone() })
                .collect(),
            den: self.den.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one(), &Monomial::ONE)
    }

    pub fn add(&self, other: &ThetaExpr) -> Self {
        let ma = multiset(&self.den);
        let mb = multiset(&other.den);
        let only_a = minus(&ma, &mb);
        let only_b = minus(&mb, &ma);
        let widen = |e: &ThetaExpr, extra: &[ThetaArg]| -> Vec<ThetaTerm> {
            e.terms
                .iter()
                .map(|t| {
                    let mut args = t.args.clone();
                    args.extend_from_slice(extra);
                    ThetaTerm { args, ..t.clone() }
                })
                .collect()
        };
        let mut terms = widen(self, &only_b);
        terms.extend(widen(other, &only_a));
        let mut den = self.den.clone();
        den.extend(only_b);
        den.sort();
        ThetaExpr { terms, den }
    }

    pub fn mul(&self, other: &ThetaExpr) -> Self {
        let mut terms = Vec::new();
        for x in &self.terms {
            for y in &other.terms {
                let mut args = x.args.clone();
                args.extend_from_slice(&y.args);
                terms.push(ThetaTerm { coeff: &x.coeff * &y.coeff, prefactor: x.prefactor.mul(&y.prefactor), args });
            }
        }
        let mut den = self.den.clone();
        den.extend_from_slice(&other.den);
        den.sort();
        ThetaExpr { terms, den }
    }

    /// Symbolic substitution; q-shifts move into the arguments.
    pub fn substitute_all(&self, map: &VarMap, lat: Lattice) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(ThetaTerm {
                    coeff: t.coeff.clone(),
                    prefactor: map.apply(&t.prefactor, lat)?,
                    args: t.args.iter().map(|a| a.map(map, lat)).collect::<Result<Vec<_>>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut den = self.den.iter().map(|a| a.map(map, lat)).collect::<Result<Vec<_>>>()?;
        den.sort();
        Ok(ThetaExpr { terms, den })
    }

    pub fn shift(&self, var: Var, t: i64, lat: Lattice) -> Result<Self> {
        self.substitute_all(&VarMap::shift(lat, var, t), lat)
    }

    fn max_args(&self) -> usize {
        self.terms.iter().map(|t| t.args.len()).max().unwrap_or(0)
    }

    /// Numerator series with every term brought to `k_max` theta factors,
    /// so the whole is `q^{-k_max/8} (q;q)^{-k_max} num`. Each factor is
    /// built at `order_of(arg)`.
    fn numerator_with<F>(&self, lat: Lattice, budgets: Budgets, euler_order: i64, order_of: F) -> Result<Series>
    where
        F: Fn(ThetaArg) -> i64,
    {
        let k_max = self.max_args();
        let eul = ThetaCtx::new(lat, euler_order, Budgets::NONE).euler();
        let mut num = Series::zero(lat);
        for t in &self.terms {
            let mut s = Series::monomial(lat, t.prefactor, t.coeff.clone());
            for a in &t.args {
                s = s.mul(&ThetaCtx::new(lat, order_of(*a), budgets).tilde(*a)?)?;
            }
            let missing = (k_max - t.args.len()) as i64;
            for _ in 0..missing {
                s = s.mul(&eul)?;
            }
            s = s.mul_monomial(&Monomial::q(missing * lat.den() / 8));
            num = num.add(&s)?;
        }
        Ok(num)
    }

    /// Expansion with a shared order and budgets.
    pub fn expand(&self, ctx: &ThetaCtx) -> Result<ThetaFraction> {
        let lat = ctx.lattice;
        let k = self.max_args() as i64;
        let j = self.den.len() as i64;
        let num = self.numerator_with(lat, ctx.budgets, ctx.order, |_| ctx.order)?;
        Ok(ThetaFraction { num, den: self.den.clone(), euler_pow: j - k, qshift: (j - k) * lat.den() / 8 }.sorted_den())
    }

    /// Leading behaviour as `q -> 0`.
    pub fn leading_ratio(&self, lat: Lattice) -> std::result::Result<LeadingRatio, LimitError> {
        if self.is_zero() {
            return Ok(LeadingRatio::Zero);
        }
        let d = lat.den();
        let k = self.max_args() as i64;
        let j = self.den.len() as i64;
        let mut den = Series::one(lat);
        let mut den_order = 0;
        for a in &self.den {
            let (o, sl) = tilde_leading(lat, *a)?;
            den_order += o;
            den = den.mul(&sl).map_err(ThetaError::from)?;
        }
        let mut delta = d / 2;
        while delta <= 32 * d {
            let num = self.numerator_with(lat, Budgets::NONE, delta, |a| tilde_least_order(lat, a) + delta)?;
            match num.leading() {
                crate::series::Leading::Slice { order, slice } => {
                    return Ok(LeadingRatio::Ratio { order: order - den_order + (j - k) * d / 8, num: slice, den });
                }
                crate::series::Leading::ExactZero => return Ok(LeadingRatio::Zero),
                crate::series::Leading::Unresolved(_) => delta *= 2,
            }
        }
        Err(LimitError::Unresolved)
    }
}

impl std::fmt::Display for ThetaFraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let lat = self.lattice();
        write!(f, "q^({}) (q;q)^{} [{}]", lat.to_ratio(self.qshift), self.euler_pow, self.num)?;
        for a in &self.den {
            write!(f, " / tilde({})", crate::series::format_monomial(lat, &a.monomial()))?;
        }
        Ok(())
    }
}
