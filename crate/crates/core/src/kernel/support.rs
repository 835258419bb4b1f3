//! Polyhedral support descriptors for lazily generated series.
//!
//! A support is a set of exponent vectors `offset + ℤ^k` whose real parts
//! satisfy finitely many linear inequalities. Fourier–Motzkin elimination
//! gives projections, Minkowski sums, boundedness tests and integer-point
//! enumeration; with at most four or five variables it stays small.

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::scalar::{rational_ceil, rational_floor, Exponent};

/// `Σ coeffs[i]·Re(e_i) ≥ bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ineq {
    pub coeffs: Vec<Rational64>,
    pub bound: Rational64,
}

impl Ineq {
    pub fn new(coeffs: Vec<i64>, bound: i64) -> Self {
        Ineq {
            coeffs: coeffs.into_iter().map(Rational64::from_integer).collect(),
            bound: Rational64::from_integer(bound),
        }
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn normalized(mut self) -> Self {
        let scale = self
            .coeffs
            .iter()
            .find(|c| !c.is_zero())
            .map(|c| c.abs());
        if let Some(s) = scale {
            for c in &mut self.coeffs {
                *c /= s;
            }
            self.bound /= s;
        }
        self
    }

    fn eval(&self, point: &[Rational64]) -> Rational64 {
        self.coeffs
            .iter()
            .zip(point)
            .fold(Rational64::zero(), |acc, (c, x)| acc + c * x)
    }
}

/// Exponent support of a lazily generated series, positional in its variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Support {
    pub offsets: Vec<Exponent>,
    pub rows: Vec<Ineq>,
}

impl Support {
    /// All integral exponents, no constraints.
    pub fn free(nvars: usize) -> Self {
        Support { offsets: vec![Exponent::ZERO; nvars], rows: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.offsets.len()
    }

    pub fn with_offsets(mut self, offsets: Vec<Exponent>) -> Self {
        self.offsets = offsets.into_iter().map(|e| e.mod_integers()).collect();
        self
    }

    pub fn ge(mut self, coeffs: Vec<i64>, bound: i64) -> Self {
        self.rows.push(Ineq::new(coeffs, bound));
        self
    }

    pub fn eq(mut self, coeffs: Vec<i64>, bound: i64) -> Self {
        let neg: Vec<i64> = coeffs.iter().map(|c| -c).collect();
        self.rows.push(Ineq::new(coeffs, bound));
        self.rows.push(Ineq::new(neg, -bound));
        self
    }

    pub fn push_rational(&mut self, coeffs: Vec<Rational64>, bound: Rational64) {
        self.rows.push(Ineq { coeffs, bound });
    }

    /// Whether the real parts of `point` satisfy every row.
    pub fn contains_re(&self, point: &[Rational64]) -> bool {
        self.rows.iter().all(|r| r.eval(point) >= r.bound)
    }

    pub fn congruent(&self, exps: &[Exponent]) -> bool {
        exps.iter().zip(&self.offsets).all(|(e, o)| e.congruent(o))
    }

    /// Lower and upper bounds on the real part of variable `var` implied by the rows;
    /// `None` if the system is infeasible.
    pub fn var_bounds(&self, var: usize) -> Option<(Option<Rational64>, Option<Rational64>)> {
        let others: Vec<usize> = (0..self.nvars()).filter(|&i| i != var).collect();
        let projected = eliminate_all(self.rows.clone(), &others)?;
        single_var_bounds(&projected, var)
    }

    /// Recession-cone test: the support contains no infinite ray.
    pub fn is_bounded(&self) -> bool {
        cone_is_trivial(&homogeneous(&self.rows), self.nvars())
    }
}

fn homogeneous(rows: &[Ineq]) -> Vec<Ineq> {
    rows.iter()
        .map(|r| Ineq { coeffs: r.coeffs.clone(), bound: Rational64::zero() })
        .collect()
}

/// True iff `{d : rows·d ≥ 0}` is `{0}` (rows must be homogeneous).
pub fn cone_is_trivial(rows: &[Ineq], nvars: usize) -> bool {
    (0..nvars).all(|v| match {
        let others: Vec<usize> = (0..nvars).filter(|&i| i != v).collect();
        eliminate_all(rows.to_vec(), &others).and_then(|p| single_var_bounds(&p, v))
    } {
        Some((Some(lo), Some(hi))) => lo >= Rational64::zero() && hi <= Rational64::zero(),
        Some(_) => false,
        None => true,
    })
}

/// Eliminates one variable. Returns `None` when a contradiction `0 ≥ b > 0` appears.
pub fn eliminate(rows: Vec<Ineq>, var: usize) -> Option<Vec<Ineq>> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for r in rows {
        let c = r.coeffs[var];
        if c.is_zero() {
            out.push(r);
        } else if c.is_positive() {
            pos.push(r);
        } else {
            neg.push(r);
        }
    }
    for p in &pos {
        for n in &neg {
            let a = -n.coeffs[var];
            let b = p.coeffs[var];
            let coeffs: Vec<Rational64> = p
                .coeffs
                .iter()
                .zip(&n.coeffs)
                .map(|(x, y)| x * a + y * b)
                .collect();
            out.push(Ineq { coeffs, bound: p.bound * a + n.bound * b });
        }
    }
    let mut cleaned: Vec<Ineq> = Vec::with_capacity(out.len());
    for r in out {
        if r.is_trivial() {
            if r.bound.is_positive() {
                return None;
            }
            continue;
        }
        let r = r.normalized();
        // keep only the tightest row among those with identical left-hand sides
        if let Some(existing) = cleaned.iter_mut().find(|e| e.coeffs == r.coeffs) {
            if r.bound > existing.bound {
                existing.bound = r.bound;
            }
        } else {
            cleaned.push(r);
        }
    }
    Some(cleaned)
}

pub fn eliminate_all(mut rows: Vec<Ineq>, vars: &[usize]) -> Option<Vec<Ineq>> {
    for &v in vars {
        rows = eliminate(rows, v)?;
    }
    Some(rows)
}

fn single_var_bounds(rows: &[Ineq], var: usize) -> Option<(Option<Rational64>, Option<Rational64>)> {
    let mut lo: Option<Rational64> = None;
    let mut hi: Option<Rational64> = None;
    for r in rows {
        let c = r.coeffs[var];
        if c.is_zero() {
            if r.bound.is_positive() {
                return None;
            }
            continue;
        }
        let v = r.bound / c;
        if c.is_positive() {
            lo = Some(lo.map_or(v, |l| l.max(v)));
        } else {
            hi = Some(hi.map_or(v, |h| h.min(v)));
        }
    }
    if let (Some(l), Some(h)) = (lo, hi) {
        if l > h {
            return None;
        }
    }
    Some((lo, hi))
}

/// Enumerates all exponent vectors of `offsets + ℤ^k` whose real parts satisfy `rows`.
/// Returns `None` if the set is unbounded in some variable.
pub fn enumerate(rows: &[Ineq], offsets: &[Exponent]) -> Option<Vec<Vec<Exponent>>> {
    let n = offsets.len();
    if n == 0 {
        return Some(if rows.iter().all(|r| r.bound <= Rational64::zero()) {
            vec![Vec::new()]
        } else {
            Vec::new()
        });
    }
    // systems[k] involves only variables 0..=k
    let mut systems: Vec<Vec<Ineq>> = vec![Vec::new(); n];
    let mut current = rows.to_vec();
    for k in (0..n).rev() {
        systems[k] = current.clone();
        if k > 0 {
            match eliminate(current, k) {
                Some(next) => current = next,
                None => return Some(Vec::new()),
            }
        }
    }
    let mut out = Vec::new();
    let mut point_re: Vec<Rational64> = vec![Rational64::zero(); n];
    let mut point: Vec<Exponent> = vec![Exponent::ZERO; n];
    if !descend(0, &systems, offsets, &mut point_re, &mut point, &mut out) {
        return None;
    }
    Some(out)
}

fn descend(
    k: usize,
    systems: &[Vec<Ineq>],
    offsets: &[Exponent],
    point_re: &mut Vec<Rational64>,
    point: &mut Vec<Exponent>,
    out: &mut Vec<Vec<Exponent>>,
) -> bool {
    let n = offsets.len();
    let mut lo: Option<Rational64> = None;
    let mut hi: Option<Rational64> = None;
    for r in &systems[k] {
        let c = r.coeffs[k];
        let rest: Rational64 = (0..k).fold(Rational64::zero(), |acc, i| acc + r.coeffs[i] * point_re[i]);
        let rhs = r.bound - rest;
        if c.is_zero() {
            if rhs.is_positive() {
                return true;
            }
            continue;
        }
        let v = rhs / c;
        if c.is_positive() {
            lo = Some(lo.map_or(v, |l| l.max(v)));
        } else {
            hi = Some(hi.map_or(v, |h| h.min(v)));
        }
    }
    let (lo, hi) = match (lo, hi) {
        (Some(l), Some(h)) => (l, h),
        _ => return false,
    };
    let off = offsets[k];
    let start = rational_ceil(&(lo - off.re));
    let end = rational_floor(&(hi - off.re));
    for j in start..=end {
        let e = off + Exponent::int(j);
        point_re[k] = e.re;
        point[k] = e;
        if k + 1 == n {
            out.push(point.clone());
        } else if !descend(k + 1, systems, offsets, point_re, point, out) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_enumeration() {
        let s = Support::free(2).ge(vec![1, 0], -1).ge(vec![-1, 0], -1).ge(vec![0, 1], 0).ge(vec![0, -1], -2);
        let pts = enumerate(&s.rows, &s.offsets).unwrap();
        assert_eq!(pts.len(), 9);
    }

    #[test]
    fn equality_plane_is_unbounded() {
        let s = Support::free(3).eq(vec![1, 1, 1], -1).ge(vec![0, 0, 1], 0);
        assert!(!s.is_bounded());
        assert!(enumerate(&s.rows, &s.offsets).is_none());
    }

    #[test]
    fn opposite_half_lines_meet_in_a_point() {
        let s = Support::free(1).ge(vec![1], 0).ge(vec![-1], -3);
        assert!(s.is_bounded());
        assert_eq!(s.var_bounds(0), Some((Some(0.into()), Some(3.into()))));
    }

    #[test]
    fn fractional_offsets_shift_the_lattice() {
        let s = Support::free(1)
            .with_offsets(vec![Exponent::frac(1, 2)])
            .ge(vec![1], 0)
            .ge(vec![-1], -2);
        let pts = enumerate(&s.rows, &s.offsets).unwrap();
        let got: Vec<Exponent> = pts.into_iter().map(|p| p[0]).collect();
        assert_eq!(got, vec![Exponent::frac(1, 2), Exponent::frac(3, 2)]);
    }
}
