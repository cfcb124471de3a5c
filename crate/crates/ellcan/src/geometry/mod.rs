//! The Hilbert scheme of two points as a dual pair: fixed-point data,
//! axiom checks, elliptic stable envelopes and their K-theoretic limits.

pub mod laurent;
pub mod stab;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::report::CheckOutcome;
use crate::series::{Lattice, Monomial, SeriesError, Var};
use crate::theta::{LimitError, ThetaArg, ThetaError};

pub use laurent::{LaurentFraction, LaurentMatrix};
pub use stab::{ShiftVar, Slope, SlopeKind, StabMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error("limit diverges like q^{0}")]
    Divergent(String),
    #[error("not an exact Laurent polynomial: {0}")]
    NotLaurent(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("singular matrix")]
    Singular,
    #[error("slope {0} is not on the exponent lattice")]
    SlopeOffLattice(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// Torus-fixed points, `[2] = (x^2, y)` and `[1,1] = (x, y^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Two,
    OneOne,
}

impl Point {
    pub const ALL: [Point; 2] = [Point::Two, Point::OneOne];

    pub fn index(self) -> usize {
        match self {
            Point::Two => 0,
            Point::OneOne => 1,
        }
    }

    pub fn other(self) -> Point {
        match self {
            Point::Two => Point::OneOne,
            Point::OneOne => Point::Two,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Point::Two => "[2]",
            Point::OneOne => "[1,1]",
        })
    }
}

/// Character `v^v h^h` of the conical torus times the side's own rank-one torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Weight {
    pub v: i64,
    pub h: i64,
}

impl Weight {
    pub const fn new(v: i64, h: i64) -> Self {
        Weight { v, h }
    }

    pub fn pow(self, k: i64) -> Weight {
        Weight::new(self.v * k, self.h * k)
    }

    pub fn dual(self) -> Weight {
        self.pow(-1)
    }
}

impl std::ops::Mul for Weight {
    type Output = Weight;

    fn mul(self, o: Weight) -> Weight {
        Weight::new(self.v + o.v, self.h + o.h)
    }
}

/// Virtual character: weights with signed multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Character(BTreeMap<Weight, i64>);

impl Character {
    pub fn from_weights(ws: &[Weight]) -> Self {
        let mut c = Character::default();
        for w in ws {
            c.push(*w, 1);
        }
        c
    }

    pub fn push(&mut self, w: Weight, n: i64) {
        let e = self.0.entry(w).or_insert(0);
        *e += n;
        if *e == 0 {
            self.0.remove(&w);
        }
    }

    pub fn add(&self, o: &Character) -> Character {
        let mut c = self.clone();
        for (w, n) in &o.0 {
            c.push(*w, *n);
        }
        c
    }

    pub fn scale(&self, k: i64) -> Character {
        Character(self.0.iter().map(|(w, n)| (*w, n * k)).collect())
    }

    pub fn mul(&self, o: &Character) -> Character {
        let mut c = Character::default();
        for (w1, n1) in &self.0 {
            for (w2, n2) in &o.0 {
                c.push(*w1 * *w2, n1 * n2);
            }
        }
        c
    }

    pub fn dual(&self) -> Character {
        Character(self.0.iter().map(|(w, n)| (w.dual(), *n)).collect())
    }

    pub fn twist(&self, w: Weight) -> Character {
        Character(self.0.iter().map(|(x, n)| (*x * w, *n)).collect())
    }

    pub fn det(&self) -> Weight {
        self.0.iter().fold(Weight::default(), |acc, (w, n)| acc * w.pow(*n))
    }

    pub fn multiplicity(&self, w: Weight) -> i64 {
        self.0.get(&w).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Weight, &i64)> {
        self.0.iter()
    }
}

/// `T^{1/2} = V + (v^{-1} h - 1) V^dual V - v^{-1} h`.
pub fn polarization_from_tautological(tautological: &Character) -> Character {
    let vh = Weight::new(-1, 1);
    let mut coeff = Character::from_weights(&[vh]);
    coeff.push(Weight::default(), -1);
    let mut out = tautological.add(&coeff.mul(&tautological.dual().mul(tautological)));
    out.push(vh, -1);
    out
}

/// `(lambda, alpha)` in cocharacters of K times characters of H.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Kappa {
    pub lambda: i64,
    pub alpha: i64,
}

/// One side of a dual pair. `h_var` is the series variable of the side's
/// own torus H; the other rank-one torus K is the one `L` is indexed by.
#[derive(Debug, Clone, PartialEq)]
pub struct SideModel {
    pub name: String,
    pub h_var: Var,
    pub xi: i64,
    pub eta: i64,
    pub kappa: Kappa,
    pub dim: i64,
    pub tangent: [Character; 2],
    pub polarization: [Character; 2],
    /// `L(1)` restricted to each point.
    pub line: [Weight; 2],
    pub eps: [i64; 2],
}

impl SideModel {
    /// Repelling part with respect to `xi`.
    pub fn n_minus(&self, p: Point) -> Vec<Weight> {
        self.split(p, |h| h < 0)
    }

    pub fn n_plus(&self, p: Point) -> Vec<Weight> {
        self.split(p, |h| h > 0)
    }

    fn split(&self, p: Point, keep: impl Fn(i64) -> bool) -> Vec<Weight> {
        let mut out = Vec::new();
        for (w, n) in self.tangent[p.index()].iter() {
            if keep(w.h * self.xi) {
                for _ in 0..*n {
                    out.push(*w);
                }
            }
        }
        out
    }

    pub fn det_n_minus(&self, p: Point) -> Weight {
        Character::from_weights(&self.n_minus(p)).det()
    }

    /// `L(lambda, alpha)|_p = h^alpha L(1)^lambda`.
    pub fn line_bundle(&self, p: Point, lambda: i64, alpha: i64) -> Weight {
        self.line[p.index()].pow(lambda) * Weight::new(0, alpha)
    }

    pub fn l_kappa(&self, p: Point) -> Weight {
        self.line_bundle(p, self.kappa.lambda, self.kappa.alpha)
    }

    /// Rank of the attracting part of the polarization, read as the
    /// multiplicity of the attracting tangent weights in `T^{1/2}|_p`.
    pub fn ind_rank(&self, p: Point) -> i64 {
        self.n_plus(p).iter().map(|w| self.polarization[p.index()].multiplicity(*w)).sum()
    }

    /// Signed count of all attracting summands of `T^{1/2}|_p`.
    pub fn attracting_count(&self, p: Point) -> i64 {
        self.polarization[p.index()].iter().filter(|(w, _)| w.h * self.xi > 0).map(|(_, n)| *n).sum()
    }

    /// Monomial for a weight, on a lattice.
    pub fn monomial(&self, w: Weight, lat: Lattice) -> Monomial {
        let d = lat.den();
        let mut m = Monomial::var(self.h_var, w.h * d);
        m.v = w.v * d;
        m
    }

    pub fn theta_arg(&self, w: Weight, lat: Lattice) -> ThetaArg {
        ThetaArg::new(self.monomial(w, lat)).expect("tangent weights are nontrivial")
    }
}

/// A side together with its dual and the point identifications.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPairModel {
    pub x: SideModel,
    pub dual: SideModel,
    /// `p -> p^!`.
    pub dual_point: [Point; 2],
    /// The involution swapping the roles of the two coordinates.
    pub flop_point: [Point; 2],
}

impl DualPairModel {
    pub fn to_dual(&self, p: Point) -> Point {
        self.dual_point[p.index()]
    }

    pub fn from_dual(&self, q: Point) -> Point {
        Point::ALL.into_iter().find(|p| self.to_dual(*p) == q).expect("bijection")
    }

    pub fn flop(&self, p: Point) -> Point {
        self.flop_point[p.index()]
    }

    pub fn sigma(&self, p: Point) -> i64 {
        let r = self.x.ind_rank(p) + self.dual.ind_rank(self.to_dual(p));
        if r.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// Same with the attracting summands counted with sign.
    pub fn sigma_signed_count(&self, p: Point) -> i64 {
        let r = self.x.attracting_count(p) + self.dual.attracting_count(self.to_dual(p));
        if r.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    pub fn with_kappa(mut self, kappa: Kappa) -> Self {
        self.x.kappa = kappa;
        self
    }
}

fn hilb2_side(name: &str, h_var: Var, xi: i64, eta: i64, kappa: Kappa, line: [Weight; 2]) -> SideModel {
    // V|_[2] = 1 + v h^{-1}, V|_[1,1] = 1 + v h
    let taut = [
        Character::from_weights(&[Weight::new(0, 0), Weight::new(1, -1)]),
        Character::from_weights(&[Weight::new(0, 0), Weight::new(1, 1)]),
    ];
    let tangent = [
        Character::from_weights(&[Weight::new(0, -2), Weight::new(-2, 2)]),
        Character::from_weights(&[Weight::new(-2, -2), Weight::new(0, 2)]),
    ];
    SideModel {
        name: name.to_string(),
        h_var,
        xi,
        eta,
        kappa,
        dim: 2,
        tangent,
        polarization: [polarization_from_tautological(&taut[0]), polarization_from_tautological(&taut[1])],
        line,
        eps: [1, -1],
    }
}

const O1: [Weight; 2] = [Weight::new(2, -1), Weight::new(2, 1)];

/// The self-dual pair: `a^! = z`, `z^! = a`, `[2]^! = [1,1]`.
pub fn hilb2_model() -> DualPairModel {
    let kappa = Kappa { lambda: 1, alpha: 3 };
    DualPairModel {
        x: hilb2_side("X", Var::A, 1, 1, kappa, O1),
        dual: hilb2_side("X!", Var::Z, 1, 1, kappa, O1),
        dual_point: [Point::OneOne, Point::Two],
        flop_point: [Point::OneOne, Point::Two],
    }
}

/// The opposite side paired with the maximal flop. Points of the flop are
/// labelled by the underlying points of the variety, so `p^! = p`.
pub fn flop_pair_model() -> DualPairModel {
    let minus_x = hilb2_side("-X", Var::A, -1, 1, Kappa { lambda: 1, alpha: 3 }, O1);
    let flop_line = [O1[0].dual(), O1[1].dual()];
    let flop = hilb2_side("X!_flop", Var::Z, 1, -1, Kappa { lambda: -1, alpha: 3 }, flop_line);
    DualPairModel { x: minus_x, dual: flop, dual_point: [Point::Two, Point::OneOne], flop_point: [Point::OneOne, Point::Two] }
}

fn wts(ws: &[Weight]) -> String {
    ws.iter().map(|w| format!("v^{} h^{}", w.v, w.h)).collect::<Vec<_>>().join(", ")
}

/// Evaluates the dual-pair axioms on `lambda, lambda^! in -2..=2`, plus the
/// polarization and determinant conditions on each side.
pub fn check_dual_pair_axioms(m: &DualPairModel) -> Vec<CheckOutcome> {
    let (x, y) = (&m.x, &m.dual);
    let mut out = Vec::new();
    out.push(
        CheckOutcome::new("xi = eta^! and eta = xi^!", x.xi == y.eta && x.eta == y.xi)
            .with_detail(format!("xi={} eta={} xi!={} eta!={}", x.xi, x.eta, y.xi, y.eta)),
    );
    for p in Point::ALL {
        let pd = m.to_dual(p);
        let mut pair_h = true;
        let mut s_x = true;
        let mut s_y = true;
        for lam in -2..=2 {
            for lam_d in -2..=2 {
                let lhs = x.line_bundle(p, lam, 0).h * lam_d;
                let rhs = -y.line_bundle(pd, lam_d, 0).h * lam;
                pair_h &= lhs == rhs;
            }
            s_x &= x.line_bundle(p, lam, 0).v == -y.det_n_minus(pd).h * lam;
            s_y &= y.line_bundle(pd, lam, 0).v == -x.det_n_minus(p).h * lam;
        }
        out.push(CheckOutcome::new(format!("H-weight pairing at {p}"), pair_h));
        out.push(CheckOutcome::new(format!("S-weight of L vs det N^!_- at {p}"), s_x));
        out.push(CheckOutcome::new(format!("S-weight of L^! vs det N_- at {p}"), s_y));
        let dims = x.det_n_minus(p).v + x.dim / 2 == -(y.det_n_minus(pd).v + y.dim / 2);
        out.push(CheckOutcome::new(format!("dimension relation at {p}"), dims));
        let par_x = x.n_minus(p).iter().all(|w| (w.v - w.h * y.kappa.lambda).rem_euclid(2) == 0);
        out.push(
            CheckOutcome::new(format!("parity of N_- at {p}"), par_x).with_detail(wts(&x.n_minus(p))),
        );
        let par_y = y.n_minus(pd).iter().all(|w| (w.v - w.h * x.kappa.lambda).rem_euclid(2) == 0);
        out.push(
            CheckOutcome::new(format!("parity of N^!_- at {p}^!"), par_y).with_detail(wts(&y.n_minus(pd))),
        );
    }
    for side in [x, y] {
        for p in Point::ALL {
            let t = &side.polarization[p.index()];
            let full = t.add(&t.dual().twist(Weight::new(-2, 0)));
            out.push(CheckOutcome::new(
                format!("{}: T^1/2 + v^-2 (T^1/2)^dual = T at {p}", side.name),
                full == side.tangent[p.index()],
            ));
            let det = t.det();
            let lk = side.l_kappa(p);
            out.push(
                CheckOutcome::new(format!("{}: det T^1/2 = L(kappa) in Pic^H at {p}", side.name), det.h == lk.h)
                    .with_detail(format!("det h^{} vs L(kappa) h^{}", det.h, lk.h)),
            );
        }
    }
    out
}
