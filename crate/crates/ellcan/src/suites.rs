//! Named verification suites, each a list of check outcomes.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num::rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::elliptic::{
    check_bar_invariance, check_duality, check_h_constraints, check_property_a, check_qdiff_a, check_qdiff_v,
    check_qdiff_z, check_r_functions, check_theta_identity, Coefficients, EllipticError, GMatrix, Preset,
};
use crate::geometry::stab::{
    check_normalization, check_sigma_duality, check_stab_qdiff, k_stab, k_stab_closed_form, k_stab_opposite, stab_dual,
    stab_ell, stab_opposite,
};
use crate::geometry::{check_dual_pair_axioms, flop_pair_model, hilb2_model, GeometryError, Kappa, Point, ShiftVar, Slope, SlopeKind};
use crate::klcanon::{
    canonical_basis, canonical_closed_form, canonical_solve, canonical_wall, check_canonical, check_wall_form,
    default_window, minus_v_opposite, transition, transition_closed_form, wall_crossing_map, xi_classes, BarData,
    CanLabel, KlError,
};
use crate::numeric::{oracle_suite, IdentitySet, NumericError, OracleConfig};
use crate::report::CheckOutcome;
use crate::series::Lattice;
use crate::theta::ThetaCtx;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SuiteError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Canonical(#[from] KlError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

pub type Result<T> = std::result::Result<T, SuiteError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    DualPair,
    StabEll,
    KLimit,
    KCanonical,
    Wall,
    Classes,
    Duality,
    QDiffZ,
    QDiffA,
    QDiffV,
    Bar,
    ThetaId,
    HConstraints,
    PropertyA,
    Numeric,
}

impl Suite {
    pub const ALL: [Suite; 15] = [
        Suite::DualPair,
        Suite::StabEll,
        Suite::KLimit,
        Suite::KCanonical,
        Suite::Wall,
        Suite::Classes,
        Suite::Duality,
        Suite::QDiffZ,
        Suite::QDiffA,
        Suite::QDiffV,
        Suite::Bar,
        Suite::ThetaId,
        Suite::HConstraints,
        Suite::PropertyA,
        Suite::Numeric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::DualPair => "dual-pair",
            Suite::StabEll => "stab-ell",
            Suite::KLimit => "k-limit",
            Suite::KCanonical => "k-canonical",
            Suite::Wall => "wall",
            Suite::Classes => "classes",
            Suite::Duality => "duality",
            Suite::QDiffZ => "qdiff-z",
            Suite::QDiffA => "qdiff-a",
            Suite::QDiffV => "qdiff-v",
            Suite::Bar => "bar",
            Suite::ThetaId => "theta-id",
            Suite::HConstraints => "h-constraints",
            Suite::PropertyA => "property-a",
            Suite::Numeric => "numeric",
        }
    }

    pub fn uses_presets(self) -> bool {
        matches!(self, Suite::Duality | Suite::QDiffZ | Suite::QDiffA | Suite::QDiffV | Suite::Bar | Suite::PropertyA | Suite::Numeric)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| SuiteError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub lattice: Lattice,
    /// Target q-order as a lattice numerator.
    pub order: i64,
    pub presets: Vec<Preset>,
    /// Replaces each suite's own slope list when nonempty.
    pub slopes: Vec<Slope>,
    pub numeric: OracleConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let lattice = Lattice::default();
        SuiteConfig {
            lattice,
            order: lattice.int(3),
            presets: Preset::VALID.to_vec(),
            slopes: Vec::new(),
            numeric: OracleConfig::default(),
        }
    }
}

impl SuiteConfig {
    fn slopes_or(&self, defaults: &[(i64, i64)]) -> Result<Vec<Slope>> {
        if !self.slopes.is_empty() {
            return Ok(self.slopes.clone());
        }
        defaults.iter().map(|&(n, d)| Ok(Slope::new(self.lattice, Ratio::new(n, d))?)).collect()
    }

    /// The order rounded up to a whole power of q.
    fn int_order(&self) -> i64 {
        let d = self.lattice.den();
        (self.order + d - 1).div_euclid(d).max(1)
    }
}

/// Outcomes of one suite with its wall-clock time.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteRun {
    pub suite: String,
    pub outcomes: Vec<CheckOutcome>,
    pub elapsed_ms: u128,
}

/// Runs a suite; an error inside the suite becomes one failing outcome.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> SuiteRun {
    let start = Instant::now();
    let outcomes = match suite_outcomes(suite, cfg) {
        Ok(o) => o,
        Err(e) => vec![CheckOutcome::new(format!("{suite} suite"), false).with_detail(e.to_string())],
    };
    SuiteRun { suite: suite.name().to_string(), outcomes, elapsed_ms: start.elapsed().as_millis() }
}

pub fn suite_outcomes(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    match suite {
        Suite::DualPair => Ok(dual_pair()),
        Suite::StabEll => stab_suite(cfg),
        Suite::KLimit => k_limit_suite(cfg),
        Suite::KCanonical => k_canonical_suite(cfg),
        Suite::Wall => wall_suite(cfg),
        Suite::Classes => classes_suite(cfg),
        Suite::ThetaId => {
            let mut out = check_theta_identity(0, cfg.lattice, cfg.order)?;
            out.extend(check_theta_identity(1, cfg.lattice, cfg.order)?);
            Ok(out)
        }
        Suite::HConstraints => Ok(check_h_constraints(cfg.lattice, cfg.order)?),
        Suite::Numeric => {
            let report = oracle_suite(&IdentitySet::all(&cfg.presets), &cfg.numeric)?;
            let mut out = report.outcomes();
            if report.resampled > 0 {
                for o in &mut out {
                    o.detail = format!("{}; {} points resampled", o.detail, report.resampled);
                }
            }
            Ok(out)
        }
        _ => {
            let mut out = Vec::new();
            for &p in &cfg.presets {
                out.extend(tagged(p, preset_outcomes(suite, p, cfg)?));
            }
            Ok(out)
        }
    }
}

fn tagged(p: Preset, outcomes: Vec<CheckOutcome>) -> Vec<CheckOutcome> {
    outcomes.into_iter().map(|o| CheckOutcome { check: format!("[{p}] {}", o.check), ..o }).collect()
}

fn preset_outcomes(suite: Suite, p: Preset, cfg: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let (lat, order) = (cfg.lattice, cfg.order);
    let c: Coefficients = p.into();
    Ok(match suite {
        Suite::Duality => check_duality(&c, lat, order)?,
        Suite::QDiffZ => check_qdiff_z(&c, lat, order, GMatrix::HILB2)?,
        Suite::QDiffA => check_qdiff_a(&c, lat, order)?,
        Suite::QDiffV => check_qdiff_v(&c, lat, order)?.outcomes,
        Suite::Bar => check_bar_invariance(&c, lat, order)?,
        Suite::PropertyA => {
            let mut out = check_r_functions();
            for s in cfg.slopes_or(&[(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)])? {
                out.extend(check_property_a(&c, s)?.0);
            }
            out
        }
        _ => unreachable!("suite {suite} takes no preset"),
    })
}

fn dual_pair() -> Vec<CheckOutcome> {
    let tag = |label: &str, v: Vec<CheckOutcome>| -> Vec<CheckOutcome> {
        v.into_iter().map(|o| CheckOutcome { check: format!("{label}: {}", o.check), ..o }).collect()
    };
    let mut out = tag("Hilb2", check_dual_pair_axioms(&hilb2_model()));
    out.extend(tag("flop", check_dual_pair_axioms(&flop_pair_model())));
    let mutated = check_dual_pair_axioms(&hilb2_model().with_kappa(Kappa { lambda: 1, alpha: 2 }));
    let failed: Vec<&str> = mutated.iter().filter(|c| !c.passed()).map(|c| c.check.as_str()).collect();
    let rejected = !failed.is_empty() && failed.iter().all(|c| c.contains("det T^1/2"));
    out.push(CheckOutcome::new("kappa = (1,2) is rejected by the det T^1/2 bullet", rejected).with_detail(failed.join("; ")));
    out
}

fn stab_suite(cfg: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let lat = cfg.lattice;
    let model = hilb2_model();
    let stab = stab_ell(lat);
    let ctx = ThetaCtx::new(lat, cfg.order, crate::series::Budgets::NONE);
    let mut out = check_normalization(&model, &stab, &ctx)?;
    for var in ShiftVar::ALL {
        out.extend(check_stab_qdiff(&model, &stab, var, 1, cfg.int_order())?);
    }
    out.extend(check_sigma_duality(&model, &stab, &stab_dual(&stab)?, &ctx)?);
    Ok(out)
}

const LIMIT_SLOPES: [(i64, i64); 10] = [(-1, 1), (-3, 4), (-1, 2), (-1, 4), (0, 1), (1, 4), (1, 2), (3, 4), (1, 1), (3, 2)];

fn k_limit_suite(cfg: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let lat = cfg.lattice;
    let stab = stab_ell(lat);
    let opp = stab_opposite(&hilb2_model(), &stab)?;
    let mut out = Vec::new();
    for s in cfg.slopes_or(&LIMIT_SLOPES)? {
        let k = k_stab(&hilb2_model(), &stab, s)?;
        out.push(CheckOutcome::new(format!("K-limit at s={s} equals the closed form"), k == k_stab_closed_form(s)));
        let direct = k_stab(&flop_pair_model(), &opp, s)?;
        out.push(CheckOutcome::new(format!("opposite K-limit at s={s} by conjugation"), direct == k_stab_opposite(&k, lat)?));
    }
    Ok(out)
}

fn basis_checks(s: Slope, bd: &BarData, e: &crate::geometry::LaurentMatrix) -> Result<Vec<CheckOutcome>> {
    let mut out = check_canonical(bd, e)?;
    out.push(CheckOutcome::new(format!("E^-1 S at s={s}"), transition(e, &bd.s_plus)? == transition_closed_form(s, false)));
    out.push(CheckOutcome::new(
        format!("E^-1 (-v S^-) at s={s}"),
        transition(e, &minus_v_opposite(bd))? == transition_closed_form(s, true),
    ));
    Ok(out)
}

fn k_canonical_suite(cfg: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let stab = stab_ell(cfg.lattice);
    let model = hilb2_model();
    let defaults: Vec<(i64, i64)> = (-2..=2).flat_map(|m| [(4 * m + 1, 4), (4 * m + 3, 4)]).collect();
    let mut out = Vec::new();
    for s in cfg.slopes_or(&defaults)? {
        let bd = BarData::at_slope(&model, &stab, s)?;
        if s.kind() == SlopeKind::Generic {
            let sol = canonical_solve(&bd, default_window(s))?;
            out.push(CheckOutcome::new(format!("solved E at s={s} equals the closed form"), sol.basis == canonical_closed_form(s)?));
            out.extend(basis_checks(s, &bd, &sol.basis)?);
        } else {
            out.extend(basis_checks(s, &bd, &canonical_wall(s)?)?);
        }
    }
    Ok(out)
}

fn wall_suite(cfg: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let lat = cfg.lattice;
    let stab = stab_ell(lat);
    let model = hilb2_model();
    let defaults: Vec<(i64, i64)> = (-4..=4).map(|k| (k, 2)).collect();
    let mut out = Vec::new();
    for s in cfg.slopes_or(&defaults)? {
        if s.kind() == SlopeKind::Generic {
            continue;
        }
        let bd = BarData::at_slope(&model, &stab, s)?;
        let eighth = Ratio::new(1, 8);
        let plus = canonical_basis(Slope::new(lat, s.ratio() + eighth)?)?;
        let minus = canonical_basis(Slope::new(lat, s.ratio() - eighth)?)?;
        let wall = canonical_wall(s)?;
        out.extend(basis_checks(s, &bd, &wall)?);
        out.extend(check_wall_form(&model, &bd, &wall, &plus, &minus)?);
    }
    Ok(out)
}

fn classes_suite(cfg: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let model = hilb2_model();
    let lat = cfg.lattice;
    let xi = xi_classes(&model, lat, 3)?;
    let mut out = vec![CheckOutcome::new("two classes on the window |m|, |n| <= 3", xi.classes.len() == 2)
        .with_detail(format!("{} classes", xi.classes.len()))];
    let class = |eps| xi.class_of(&CanLabel { eps, m: 0, n: 0 });
    let (c0, c1) = (class(0), class(1));
    out.push(CheckOutcome::new("iota: eps = 0 class to [1,1]", c0.and_then(|i| xi.iota[i]) == Some(Point::OneOne)));
    out.push(CheckOutcome::new("iota: eps = +-1 class to [2]", c1.and_then(|i| xi.iota[i]) == Some(Point::Two) && class(-1) == c1));
    let mut generators = true;
    for m in -3..=3 {
        let w = wall_crossing_map(&model, Slope::new(lat, Ratio::from(m))?)?;
        let (two, oo) = (w[Point::Two.index()], w[Point::OneOne.index()]);
        generators &= (two.plus.eps, two.minus.eps, two.minus.n - two.plus.n) == (1, -1, 1);
        generators &= (oo.plus.eps, oo.minus.eps, oo.minus.n - oo.plus.n) == (0, 0, -1);
        let w = wall_crossing_map(&model, Slope::new(lat, Ratio::new(2 * m + 1, 2))?)?;
        let oo = w[Point::OneOne.index()];
        generators &= (oo.plus.eps, oo.minus.eps, oo.minus.n - oo.plus.n) == (-1, 1, -2);
    }
    out.push(CheckOutcome::new("wall-crossing generators (v,n)~(v^-1,n+1), (1,n)~(1,n-1), (v^-1,n)~(v,n-2)", generators));
    Ok(out)
}
