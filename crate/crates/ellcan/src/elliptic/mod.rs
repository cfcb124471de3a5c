//! The elliptic canonical family on Hilb^2 built from three coefficient
//! series `f0, f1, f2` in `(v, q)`, and checks of its defining identities.

mod checks;
mod leading;
mod sums;

use std::fmt;
use std::str::FromStr;

use num::rational::Ratio;
use num::{BigRational, Zero};
use thiserror::Error;

use crate::geometry::{GeometryError, Point};
use crate::klcanon::KlError;
use crate::series::{Lattice, Monomial, Series, SeriesError, Var, VarMap};
use crate::theta::{ThetaArg, ThetaCtx, ThetaError, ThetaFraction};

pub use checks::{
    check_bar_invariance, check_duality, check_h_constraints, check_qdiff_a, check_qdiff_v, check_qdiff_z,
    check_theta_identity, f_ab, theta_identity_sides, QDiffV,
};
pub use leading::{check_property_a, check_r_functions, LeadingReport};
pub use sums::{e11_sum, e2_lambda, e_sum, g_sum, h_class};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Canonical(#[from] KlError),
    #[error("f{index}: {reason}")]
    Invariant { index: usize, reason: String },
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
}

pub type Result<T> = std::result::Result<T, EllipticError>;

pub(crate) type Q = Ratio<i64>;

pub(crate) fn rat(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

/// `O(k)|_p = v^{2k} a^{-eps_p k}`.
pub fn eps(p: Point) -> i64 {
    match p {
        Point::Two => 1,
        Point::OneOne => -1,
    }
}

pub(crate) fn other(p: Point) -> Point {
    match p {
        Point::Two => Point::OneOne,
        Point::OneOne => Point::Two,
    }
}

/// Monomial from natural-unit exponents.
pub(crate) fn mono(lat: Lattice, q: Q, a: Q, z: Q, v: Q) -> Result<Monomial> {
    Ok(Monomial::new(lat.from_ratio(q)?, lat.from_ratio(a)?, lat.from_ratio(z)?, lat.from_ratio(v)?))
}

/// `O(k)|_p` as a monomial.
pub fn line_power(lat: Lattice, p: Point, k: Q) -> Result<Monomial> {
    mono(lat, Q::zero(), -k * eps(p), Q::zero(), k * 2)
}

/// Exponents `q^{c_i}` of `G_mu` in the z-shift: `delta_z E(mu) = -q^{-G/2} z^{-G} O(-1) E(mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GMatrix {
    pub two: i64,
    pub one_one: i64,
}

impl GMatrix {
    pub const HILB2: GMatrix = GMatrix { two: 3, one_one: 1 };

    pub fn get(&self, mu: Point) -> i64 {
        match mu {
            Point::Two => self.two,
            Point::OneOne => self.one_one,
        }
    }
}

/// The coefficients `f0, f1, f2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FCoeffs {
    pub f: [Series; 3],
}

impl FCoeffs {
    pub fn new(f0: Series, f1: Series, f2: Series) -> Self {
        FCoeffs { f: [f0, f1, f2] }
    }

    pub fn lattice(&self) -> Lattice {
        self.f[0].lattice()
    }

    /// `c_i` as a lattice numerator, `None` for `f_i = 0`.
    pub fn leading_order(&self, i: usize) -> Option<i64> {
        self.f[i].min_q()
    }

    /// `q^{-c_i} f_i` at `q = 0`.
    pub fn leading_slice(&self, i: usize) -> Series {
        match self.leading_order(i) {
            Some(c) => self.f[i].slice_at(c),
            None => Series::zero(self.lattice()),
        }
    }

    pub fn is_v_symmetric(&self, i: usize) -> bool {
        self.f[i].bar_v() == self.f[i]
    }

    pub fn validate(&self) -> Result<()> {
        let lat = self.lattice();
        let half = lat.den() / 2;
        let bad = |index: usize, reason: &str| EllipticError::Invariant { index, reason: reason.to_string() };
        for (i, f) in self.f.iter().enumerate() {
            if !f.free_of(Var::A) || !f.free_of(Var::Z) {
                return Err(bad(i, "depends on a or z"));
            }
            if let Some(c) = f.min_q() {
                if f.terms().any(|(m, _)| (m.q - c) % half != 0) {
                    return Err(bad(i, "q-exponents are not in c + Z/2"));
                }
            }
        }
        for i in [0, 1] {
            if self.leading_order(i).is_none() {
                return Err(bad(i, "vanishes"));
            }
            if self.leading_slice(i) != Series::one(lat) {
                return Err(bad(i, "leading coefficient is not 1"));
            }
        }
        if let (Some(c1), Some(c2)) = (self.leading_order(1), self.leading_order(2)) {
            let gap = c2 - c1;
            if 4 * gap < 3 * lat.den() {
                return Err(bad(2, "c2 < c1 + 3/4"));
            }
            if (gap + lat.den() / 4) % half != 0 {
                return Err(bad(2, "c2 - c1 + 1/4 is not in Z/2"));
            }
        }
        Ok(())
    }
}

/// A preset, or coefficients supplied directly.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Preset(Preset),
    Custom(Box<FCoeffs>),
}

impl Coefficients {
    /// The family on `ctx`; custom coefficients are validated.
    pub fn family(&self, ctx: &ThetaCtx) -> Result<EllFamily> {
        match self {
            Coefficients::Preset(p) => EllFamily::from_preset(*p, ctx),
            Coefficients::Custom(f) => EllFamily::build(f, ctx),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Coefficients::Preset(p) => p.name().to_string(),
            Coefficients::Custom(_) => "custom".to_string(),
        }
    }
}

impl From<Preset> for Coefficients {
    fn from(p: Preset) -> Self {
        Coefficients::Preset(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// `(1, 1, 0)`.
    Minimal,
    /// `(1, theta_0(v), q theta_1(v))`.
    Theta,
    /// Minimal coefficients plus an odd lattice class in `E([2])`.
    BrokenOdd,
    /// `(1, 2, 0)`.
    BrokenLead,
    /// `(1, 1, q^{1/4})`.
    BrokenC2,
}

impl Preset {
    pub const VALID: [Preset; 2] = [Preset::Minimal, Preset::Theta];
    pub const ALL: [Preset; 5] = [Preset::Minimal, Preset::Theta, Preset::BrokenOdd, Preset::BrokenLead, Preset::BrokenC2];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Minimal => "minimal",
            Preset::Theta => "theta",
            Preset::BrokenOdd => "broken-odd",
            Preset::BrokenLead => "broken-lead",
            Preset::BrokenC2 => "broken-c2",
        }
    }

    pub fn injects_odd_class(self) -> bool {
        self == Preset::BrokenOdd
    }

    pub fn coeffs(self, ctx: &ThetaCtx) -> Result<FCoeffs> {
        let lat = ctx.lattice;
        let d = lat.den();
        let one = Series::one(lat);
        Ok(match self {
            Preset::Minimal | Preset::BrokenOdd => FCoeffs::new(one.clone(), one, Series::zero(lat)),
            Preset::BrokenLead => FCoeffs::new(one, Series::int(lat, 2), Series::zero(lat)),
            Preset::BrokenC2 => FCoeffs::new(one.clone(), one, Series::mono(lat, Monomial::q(d / 4))),
            Preset::Theta => {
                let v = ThetaArg::ints(lat, 0, 0, 0, 1)?;
                let f1 = ctx.theta0(v)?;
                let f2 = ctx.with_order(ctx.order - d).theta1(v)?.mul_monomial(&Monomial::q(d));
                FCoeffs::new(one, f1, f2)
            }
        })
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = EllipticError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| EllipticError::UnknownPreset(s.to_string()))
    }
}

/// Restrictions `E(mu)|_p` of the two family members, and `Upsilon`.
#[derive(Debug, Clone)]
pub struct EllFamily {
    pub ctx: ThetaCtx,
    pub f: FCoeffs,
    /// Indexed `[p][mu]`.
    pub restrictions: [[Series; 2]; 2],
    pub upsilon: Series,
}

impl EllFamily {
    pub fn build(f: &FCoeffs, ctx: &ThetaCtx) -> Result<Self> {
        f.validate()?;
        Self::build_unchecked(f, ctx, false)
    }

    /// Builds without validating `f`, optionally adding the odd class
    /// `h_{1/8} = 1` to `E([2])` at both points.
    pub fn build_unchecked(f: &FCoeffs, ctx: &ThetaCtx, odd_class: bool) -> Result<Self> {
        let lat = ctx.lattice;
        let mut restrictions = [[Series::zero(lat), Series::zero(lat)], [Series::zero(lat), Series::zero(lat)]];
        for p in Point::ALL {
            let mut two = f.f[1].mul(&e_sum(ctx, p, 0)?)?;
            if !f.f[2].is_exact_zero() {
                two = two.add(&f.f[2].mul(&e_sum(ctx, p, 1)?)?)?;
            }
            if odd_class {
                two = two.add(&h_class(ctx, p, 1)?)?;
            }
            restrictions[p.index()][Point::Two.index()] = two;
            restrictions[p.index()][Point::OneOne.index()] = f.f[0].mul(&e11_sum(ctx, p)?)?;
        }
        let v = ThetaArg::ints(lat, 0, 0, 0, 1)?;
        let inner = f.f[1].mul(&ctx.theta0(v)?)?.add(&f.f[2].mul(&ctx.theta1(v)?)?)?;
        let upsilon = f.f[0].mul(&inner)?;
        Ok(EllFamily { ctx: *ctx, f: f.clone(), restrictions, upsilon })
    }

    pub fn from_preset(preset: Preset, ctx: &ThetaCtx) -> Result<Self> {
        let f = preset.coeffs(ctx)?;
        match preset {
            Preset::Minimal | Preset::Theta => Self::build(&f, ctx),
            _ => Self::build_unchecked(&f, ctx, preset.injects_odd_class()),
        }
    }

    pub fn lattice(&self) -> Lattice {
        self.ctx.lattice
    }

    /// `E(basis)|_at`.
    pub fn restriction(&self, basis: Point, at: Point) -> &Series {
        &self.restrictions[at.index()][basis.index()]
    }

    /// The dual family: `E^!(basis)|_at` is `E(basis^!)|_{at^!}` with `a` and
    /// `z` exchanged.
    pub fn dual_restriction(&self, basis: Point, at: Point) -> Result<Series> {
        Ok(self.restriction(other(basis), other(at)).substitute_all(&VarMap::swap_az(self.lattice()))?)
    }

    /// `q^{1/4} (q;q)^2 Upsilon`, the factor in front of the stable matrix.
    pub fn upsilon_fraction(&self) -> ThetaFraction {
        ThetaFraction { num: self.upsilon.clone(), den: Vec::new(), euler_pow: 2, qshift: self.lattice().den() / 4 }
    }

    /// `h_{k/8}`, equal at both points: `h_0 = h_4 = f2`, `h_2 = h_6 = -f1`.
    pub fn h(&self, k: usize) -> Series {
        match k % 8 {
            0 | 4 => self.f.f[2].clone(),
            2 | 6 => self.f.f[1].neg(),
            _ => Series::zero(self.lattice()),
        }
    }

    /// `F_{1/2 - j eps_p / 3}|_p = (-1)^j sum_lambda h_lambda g_{lambda - j eps_p/3}`.
    pub fn f_lambda(&self, p: Point, j: i64) -> Result<Series> {
        let mut acc = Series::zero(self.lattice());
        for k in 0..8 {
            let h = self.h(k);
            if h.is_exact_zero() {
                continue;
            }
            let lambda = rat(k as i64, 8) - rat(j * eps(p), 3);
            acc = acc.add(&h.mul(&g_sum(&self.ctx, p, lambda)?)?)?;
        }
        Ok(if j % 2 == 0 { acc } else { acc.neg() })
    }
}

pub(crate) fn big(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}
