use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use serde_json::Value;

use super::generators::Generator;
use super::support::{enumerate, Ineq, Support};
use super::{Monomial, Window};
use crate::error::{Error, Result};
use crate::scalar::{Exponent, Scalar};

/// Coefficient ring (or module over the scalars) of a formal series.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn scale(&self, s: &Scalar) -> Self;
    fn to_json(&self) -> Value;
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn scale(&self, s: &Scalar) -> Self {
        self * s
    }
    fn to_json(&self) -> Value {
        Scalar::to_json(self)
    }
}

/// The space a series lives in, following the usual list
/// W[x], W[x,x⁻¹], W[[x]], W((x)), W[[x,x⁻¹]], W{x}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportClass {
    Polynomial,
    LaurentPolynomial,
    PowerSeries,
    TruncatedLaurent,
    DoublyInfinite,
    ComplexPower,
}

/// A generator together with its cached variable list and support.
#[derive(Clone)]
pub(crate) struct Lazy<C> {
    pub gen: Arc<dyn Generator<C>>,
    pub vars: Vec<String>,
    pub support: Support,
}

impl<C: Coeff> Lazy<C> {
    pub fn new(gen: Arc<dyn Generator<C>>) -> Self {
        let vars = gen.vars();
        let support = gen.support();
        debug_assert_eq!(vars.len(), support.nvars());
        Lazy { gen, vars, support }
    }

    /// Coefficient at positional exponents, zero outside the support.
    pub fn coeff_pos(&self, exps: &[Exponent]) -> Result<C> {
        if !self.support.congruent(exps) {
            return Ok(C::zero());
        }
        let re: Vec<Rational64> = exps.iter().map(|e| e.re).collect();
        if !self.support.contains_re(&re) {
            return Ok(C::zero());
        }
        self.gen.coeff(exps)
    }

    pub fn coeff(&self, m: &Monomial) -> Result<C> {
        match m.positional(&self.vars) {
            Some(exps) => self.coeff_pos(&exps),
            None => Ok(C::zero()),
        }
    }

    fn materialize(&self, window: &Window, out: &mut BTreeMap<Monomial, C>) -> Result<()> {
        let n = self.vars.len();
        let mut rows = self.support.rows.clone();
        for (i, v) in self.vars.iter().enumerate() {
            let (lo, hi) = window
                .var_bounds(v)
                .ok_or_else(|| Error::Schema(format!("window does not bound variable {v}")))?;
            let mut c = vec![Rational64::from_integer(0); n];
            c[i] = Rational64::from_integer(1);
            rows.push(Ineq { coeffs: c.clone(), bound: lo });
            c[i] = Rational64::from_integer(-1);
            rows.push(Ineq { coeffs: c, bound: -hi });
        }
        if let Some((lo, hi)) = window.total_bounds() {
            rows.push(Ineq { coeffs: vec![Rational64::from_integer(1); n], bound: lo });
            rows.push(Ineq { coeffs: vec![Rational64::from_integer(-1); n], bound: -hi });
        }
        let points = enumerate(&rows, &self.support.offsets)
            .ok_or_else(|| Error::UndefinedProduct("window does not bound the support".into()))?;
        for p in points {
            let m = Monomial::from_positional(&self.vars, &p);
            if !window.contains(&m) {
                continue;
            }
            let c = self.gen.coeff(&p)?;
            if !c.is_zero() {
                out.entry(m).or_insert_with(C::zero).add_assign_ref(&c);
            }
        }
        Ok(())
    }
}

/// A formal series: finitely many explicit terms plus a finite sum of lazily generated series.
#[derive(Clone)]
pub struct Series<C: Coeff = Scalar> {
    pub(crate) finite: BTreeMap<Monomial, C>,
    pub(crate) lazy: Vec<Lazy<C>>,
}

impl<C: Coeff> Default for Series<C> {
    fn default() -> Self {
        Series { finite: BTreeMap::new(), lazy: Vec::new() }
    }
}

impl<C: Coeff> Series<C> {
    pub fn zero() -> Self {
        Series::default()
    }

    pub fn term(m: Monomial, c: C) -> Self {
        Series::from_terms(vec![(m, c)])
    }

    pub fn constant(c: C) -> Self {
        Series::term(Monomial::one(), c)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut finite: BTreeMap<Monomial, C> = BTreeMap::new();
        for (m, c) in terms {
            finite.entry(m).or_insert_with(C::zero).add_assign_ref(&c);
        }
        finite.retain(|_, c| !c.is_zero());
        Series { finite, lazy: Vec::new() }
    }

    pub fn from_generator(gen: Arc<dyn Generator<C>>) -> Self {
        Series { finite: BTreeMap::new(), lazy: vec![Lazy::new(gen)] }
    }

    pub fn is_finite(&self) -> bool {
        self.lazy.is_empty()
    }

    /// Explicit terms, available when the series has no lazy part.
    pub fn terms(&self) -> Option<&BTreeMap<Monomial, C>> {
        if self.is_finite() {
            Some(&self.finite)
        } else {
            None
        }
    }

    pub fn coeff(&self, m: &Monomial) -> Result<C> {
        let mut acc = self.finite.get(m).cloned().unwrap_or_else(C::zero);
        for l in &self.lazy {
            acc.add_assign_ref(&l.coeff(m)?);
        }
        Ok(acc)
    }

    pub fn coeff_ints(&self, pairs: &[(&str, i64)]) -> Result<C> {
        self.coeff(&Monomial::ints(pairs))
    }

    /// All nonzero coefficients whose monomials lie in the window.
    pub fn materialize(&self, window: &Window) -> Result<BTreeMap<Monomial, C>> {
        let mut out: BTreeMap<Monomial, C> = self
            .finite
            .iter()
            .filter(|(m, _)| window.contains(m))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        for l in &self.lazy {
            l.materialize(window, &mut out)?;
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// The windowed truncation as an explicit series.
    pub fn truncate(&self, window: &Window) -> Result<Series<C>> {
        Ok(Series { finite: self.materialize(window)?, lazy: Vec::new() })
    }

    pub fn add(&self, other: &Series<C>) -> Series<C> {
        let mut finite = self.finite.clone();
        for (m, c) in &other.finite {
            finite.entry(m.clone()).or_insert_with(C::zero).add_assign_ref(c);
        }
        finite.retain(|_, c| !c.is_zero());
        let mut lazy = self.lazy.clone();
        lazy.extend(other.lazy.iter().cloned());
        Series { finite, lazy }
    }

    pub fn scale(&self, s: &Scalar) -> Series<C> {
        if s.is_zero() {
            return Series::zero();
        }
        if s.is_one() {
            return self.clone();
        }
        let finite = self.finite.iter().map(|(m, c)| (m.clone(), c.scale(s))).collect();
        let lazy = self
            .lazy
            .iter()
            .map(|l| Lazy::new(Arc::new(super::generators::ShiftScale::new(l.clone(), Monomial::one(), s.clone()))))
            .collect();
        Series { finite, lazy }
    }

    pub fn neg(&self) -> Series<C> {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn sub(&self, other: &Series<C>) -> Series<C> {
        self.add(&other.neg())
    }

    /// Multiplies by a monomial (a shift of all exponents).
    pub fn shift(&self, m: &Monomial) -> Series<C> {
        if m.is_one() {
            return self.clone();
        }
        let finite = self.finite.iter().map(|(k, c)| (k.mul(m), c.clone())).collect();
        let lazy = self
            .lazy
            .iter()
            .map(|l| Lazy::new(Arc::new(super::generators::ShiftScale::new(l.clone(), m.clone(), Scalar::one()))))
            .collect();
        Series { finite, lazy }
    }

    /// Every variable that may occur with a nonzero exponent.
    pub fn vars(&self) -> Vec<String> {
        let mut vs: Vec<String> = self
            .finite
            .keys()
            .flat_map(|m| m.vars().map(str::to_string).collect::<Vec<_>>())
            .collect();
        for l in &self.lazy {
            vs.extend(l.vars.iter().cloned());
        }
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn support_class(&self) -> SupportClass {
        let finite_integral = self.finite.keys().all(|m| m.pairs().iter().all(|(_, e)| e.is_integer()));
        let lazy_integral = self
            .lazy
            .iter()
            .all(|l| l.support.offsets.iter().all(|o| o.is_zero()));
        if !(finite_integral && lazy_integral) {
            return SupportClass::ComplexPower;
        }
        let finite_nonneg = self
            .finite
            .keys()
            .all(|m| m.pairs().iter().all(|(_, e)| e.re >= Rational64::from_integer(0)));
        if self.lazy.is_empty() {
            return if finite_nonneg {
                SupportClass::Polynomial
            } else {
                SupportClass::LaurentPolynomial
            };
        }
        let mut lower_bounded = true;
        let mut nonneg = finite_nonneg;
        for l in &self.lazy {
            for i in 0..l.vars.len() {
                match l.support.var_bounds(i) {
                    Some((Some(lo), _)) => {
                        if lo < Rational64::from_integer(0) {
                            nonneg = false;
                        }
                    }
                    Some((None, _)) => lower_bounded = false,
                    None => {}
                }
            }
        }
        match (lower_bounded, nonneg) {
            (true, true) => SupportClass::PowerSeries,
            (true, false) => SupportClass::TruncatedLaurent,
            _ => SupportClass::DoublyInfinite,
        }
    }

    /// First monomial in the window where the two series differ.
    pub fn first_difference(&self, other: &Series<C>, window: &Window) -> Result<Option<(Monomial, C, C)>> {
        let a = self.materialize(window)?;
        let b = other.materialize(window)?;
        let mut keys: Vec<&Monomial> = a.keys().chain(b.keys()).collect();
        keys.sort();
        keys.dedup();
        for k in keys {
            let x = a.get(k).cloned().unwrap_or_else(C::zero);
            let y = b.get(k).cloned().unwrap_or_else(C::zero);
            if x != y {
                return Ok(Some((k.clone(), x, y)));
            }
        }
        Ok(None)
    }

    pub fn agrees_on(&self, other: &Series<C>, window: &Window) -> Result<bool> {
        Ok(self.first_difference(other, window)?.is_none())
    }

    /// Human-readable rendering of the windowed truncation.
    pub fn render(&self, window: &Window) -> Result<String> {
        let terms = self.materialize(window)?;
        Ok(render_terms(&terms))
    }
}

pub(crate) fn render_terms<C: Coeff>(terms: &BTreeMap<Monomial, C>) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let parts: Vec<String> = terms
        .iter()
        .map(|(m, c)| {
            let ct = c.to_string();
            if m.is_one() {
                ct
            } else if ct == "1" {
                m.to_string()
            } else if ct == "-1" {
                format!("-{m}")
            } else {
                format!("({ct})*{m}")
            }
        })
        .collect();
    parts.join(" + ")
}

impl<C: Coeff> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_terms(&self.finite))?;
        if !self.lazy.is_empty() {
            write!(f, " + <{} lazy part(s) in {:?}>", self.lazy.len(), self.vars())?;
        }
        Ok(())
    }
}
