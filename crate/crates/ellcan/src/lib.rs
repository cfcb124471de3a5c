//! Exact and numerical tools for elliptic stable envelopes and their
//! K-theoretic limits on the Hilbert scheme of two points in the plane.

pub mod series;
pub mod theta;
pub mod report;
pub mod geometry;
pub mod klcanon;
pub mod elliptic;
pub mod numeric;
pub mod suites;

pub use series::{Budgets, Lattice, Leading, Monomial, QDiffShift, Series, SeriesError, Var, VarMap, Watermark};
