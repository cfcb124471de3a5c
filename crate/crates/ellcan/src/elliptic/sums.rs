//! Lattice sums over one or two integer indices, truncated by reach.

use num::{ToPrimitive, Zero};

use super::{big, eps, mono, rat, Result, Q};
use crate::geometry::Point;
use crate::series::{Series, Watermark, VARS};
use crate::theta::ThetaCtx;

/// Sign and natural-unit exponents of one summand; a zero sign drops it.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Summand {
    pub sign: i64,
    pub q: Q,
    pub a: Q,
    pub z: Q,
    pub v: Q,
}

impl Summand {
    fn var(&self, i: usize) -> Q {
        [self.a, self.z, self.v][i]
    }
}

fn f(x: Q) -> f64 {
    x.to_f64().unwrap_or(f64::MAX)
}

/// Sums `term` over `Z^N`. The q-exponent must be quadratic with
/// `q(i) - (linear part) >= kappa |i|^2`, the other exponents affine.
pub(crate) fn lattice_sum<const N: usize>(ctx: &ThetaCtx, kappa: f64, term: impl Fn([i64; N]) -> Summand) -> Result<Series> {
    let lat = ctx.lattice;
    let d = lat.den() as f64;
    let budget: Vec<f64> = VARS.iter().map(|x| ctx.budgets.get(*x) as f64 / d).collect();
    let origin = term([0; N]);
    let mut beta = 0.0;
    for j in 0..N {
        let mut unit = [0; N];
        unit[j] = 1;
        let up = term(unit);
        unit[j] = -1;
        let down = term(unit);
        beta += f((up.q - down.q) / 2).abs();
        for (i, b) in budget.iter().enumerate() {
            beta += b * f(up.var(i) - origin.var(i)).abs();
        }
    }
    let gamma = f(origin.q).abs() + (0..3).map(|i| budget[i] * f(origin.var(i)).abs()).sum::<f64>();
    let w = ctx.order as f64 / d;
    let disc = (beta * beta + 4.0 * kappa * (w + gamma)).max(0.0);
    let r = ((beta + disc.sqrt()) / (2.0 * kappa)).ceil() as i64 + 1;

    let mut items = Vec::new();
    let mut idx = [-r; N];
    loop {
        let s = term(idx);
        if s.sign != 0 {
            items.push((mono(lat, s.q, s.a, s.z, s.v)?, big(s.sign)));
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
    Ok(Series::truncated(lat, items, Watermark::Finite(ctx.order), ctx.budgets))
}

fn parity(m: i64) -> i64 {
    if m.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Summand `(-1)^m q^{qe} z^{ze} v^{ve} O(k)|_p`.
fn with_line(p: Point, sign: i64, qe: Q, ze: Q, ve: Q, k: Q) -> Summand {
    Summand { sign, q: qe, a: -k * eps(p), z: ze, v: ve + k * 2 }
}

/// `sum (-1)^m q^{(l+i/2)^2 + (m+1/2)^2/2} v^{-2l-i+2m+1} z^{2l+i+m+1/2} O(2l+i-m-1/2)|_p`.
pub fn e_sum(ctx: &ThetaCtx, p: Point, i: i64) -> Result<Series> {
    let half = rat(1, 2);
    lattice_sum(ctx, 0.5, |[l, m]| {
        let (l, m_) = (Q::from(l), Q::from(m));
        let li = l + rat(i, 2);
        let mh = m_ + half;
        with_line(p, parity(m), li * li + mh * mh / 2, l * 2 + i + mh, -l * 2 - i + m_ * 2 + 1, l * 2 + i - mh)
    })
}

/// `sum (-1)^m q^{(m+1/2)^2/2} z^{m+1/2} O(m+1/2)|_p`.
pub fn e11_sum(ctx: &ThetaCtx, p: Point) -> Result<Series> {
    lattice_sum(ctx, 0.5, |[m]| {
        let mh = Q::from(m) + rat(1, 2);
        with_line(p, parity(m), mh * mh / 2, mh, Q::zero(), mh)
    })
}

/// `sum (-1)^m q^{3/2 (m+lambda)^2} z^{3(m+lambda)} O(m+lambda)|_p`.
pub fn e2_lambda(ctx: &ThetaCtx, p: Point, lambda: Q) -> Result<Series> {
    lattice_sum(ctx, 1.5, |[m]| {
        let x = Q::from(m) + lambda;
        with_line(p, parity(m), x * x * rat(3, 2), x * 3, Q::zero(), x)
    })
}

/// `g_lambda|_p = sum q^{12(l+lambda)^2} v^{4(l+lambda)} a^{-8(l+lambda) eps_p}`.
pub fn g_sum(ctx: &ThetaCtx, p: Point, lambda: Q) -> Result<Series> {
    lattice_sum(ctx, 12.0, |[l]| {
        let x = Q::from(l) + lambda;
        Summand { sign: 1, q: x * x * 12, a: -x * 8 * eps(p), z: Q::zero(), v: x * 4 }
    })
}

/// The part of `E([2])|_p` multiplying `h_{k/8}`: the sum over `L, M` with
/// `L - 3M + 3 = k mod 8` of
/// `(-1)^{M+1} q^{(L+M+1)^2/16 + (L-M)^2/8} v^{(L+M+1)/2} z^{M+1/2} a^{-(L+1/2) eps_p}`.
pub fn h_class(ctx: &ThetaCtx, p: Point, k: usize) -> Result<Series> {
    lattice_sum(ctx, 0.125, |[ll, mm]| {
        let sign = if (ll - 3 * mm + 3).rem_euclid(8) == k as i64 { -parity(mm) } else { 0 };
        let s = Q::from(ll + mm + 1);
        let t = Q::from(ll - mm);
        Summand {
            sign,
            q: s * s / 16 + t * t / 8,
            a: -(Q::from(ll) + rat(1, 2)) * eps(p),
            z: Q::from(mm) + rat(1, 2),
            v: s / 2,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Signed;
    use crate::series::{Budgets, Lattice, Monomial};

    #[test]
    fn e11_leading_term() {
        let lat = Lattice::default();
        let ctx = ThetaCtx::new(lat, lat.den() / 4, Budgets::NONE);
        let s = e11_sum(&ctx, Point::OneOne).unwrap();
        // m = 0 and m = -1 at q^{1/8}
        let d = lat.den();
        assert_eq!(s.len(), 2);
        assert!(s.coeff(&Monomial::new(d / 8, d / 2, d / 2, d)).is_positive());
        assert!(!s.coeff(&Monomial::new(d / 8, -d / 2, -d / 2, -d)).is_zero());
    }
}
