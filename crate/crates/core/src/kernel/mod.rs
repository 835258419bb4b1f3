//! Exact formal series in finitely many named variables.

mod generators;
pub mod identities;
pub mod json;
mod ops;
mod series;
pub mod support;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::Exponent;

pub use generators::{DeltaSigns, Generator};
pub use identities::{verify_delta_identity, DeltaIdentity};
pub use ops::{
    binom_expand, delta, delta3, delta_ratio, derivative, formal_taylor, multiply, residue, BinomArg,
};
pub use series::{Coeff, Series, SupportClass};
pub use support::Support;

/// A product of powers of named variables, kept sorted by name with no zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(String, Exponent)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial::single(name, Exponent::int(1))
    }

    pub fn single(name: &str, e: Exponent) -> Self {
        Monomial::from_pairs(vec![(name.to_string(), e)])
    }

    pub fn from_pairs(pairs: Vec<(String, Exponent)>) -> Self {
        let mut acc: BTreeMap<String, Exponent> = BTreeMap::new();
        for (v, e) in pairs {
            let slot = acc.entry(v).or_insert(Exponent::ZERO);
            *slot = *slot + e;
        }
        Monomial(acc.into_iter().filter(|(_, e)| !e.is_zero()).collect())
    }

    pub fn ints(pairs: &[(&str, i64)]) -> Self {
        Monomial::from_pairs(pairs.iter().map(|(v, e)| (v.to_string(), Exponent::int(*e))).collect())
    }

    pub fn exponent(&self, var: &str) -> Exponent {
        self.0
            .iter()
            .find(|(v, _)| v == var)
            .map(|(_, e)| *e)
            .unwrap_or(Exponent::ZERO)
    }

    pub fn pairs(&self) -> &[(String, Exponent)] {
        &self.0
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(v, _)| v.as_str())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut pairs = self.0.clone();
        pairs.extend(other.0.iter().cloned());
        Monomial::from_pairs(pairs)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        let mut pairs = self.0.clone();
        pairs.extend(other.0.iter().map(|(v, e)| (v.clone(), -*e)));
        Monomial::from_pairs(pairs)
    }

    pub fn with(&self, var: &str, e: Exponent) -> Monomial {
        let mut pairs: Vec<(String, Exponent)> = self.0.iter().filter(|(v, _)| v != var).cloned().collect();
        pairs.push((var.to_string(), e));
        Monomial::from_pairs(pairs)
    }

    pub fn without(&self, var: &str) -> Monomial {
        Monomial(self.0.iter().filter(|(v, _)| v != var).cloned().collect())
    }

    /// Sum of the real parts of all exponents.
    pub fn total_re(&self) -> Rational64 {
        self.0.iter().fold(Rational64::from_integer(0), |acc, (_, e)| acc + e.re)
    }

    /// Exponents listed in the order of `vars`; `None` if the monomial involves another variable.
    pub fn positional(&self, vars: &[String]) -> Option<Vec<Exponent>> {
        let mut out = vec![Exponent::ZERO; vars.len()];
        for (v, e) in &self.0 {
            let i = vars.iter().position(|w| w == v)?;
            out[i] = *e;
        }
        Some(out)
    }

    pub fn from_positional(vars: &[String], exps: &[Exponent]) -> Monomial {
        Monomial::from_pairs(vars.iter().cloned().zip(exps.iter().copied()).collect())
    }

    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (v, e) in &self.0 {
            map.insert(v.clone(), e.to_json());
        }
        Value::Object(map)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Schema("monomial must be an object".into()))?;
        let pairs: Result<Vec<(String, Exponent)>> = obj
            .iter()
            .map(|(k, e)| Ok((k.clone(), Exponent::from_json(e)?)))
            .collect();
        Ok(Monomial::from_pairs(pairs?))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| {
                if *e == Exponent::int(1) {
                    v.clone()
                } else if e.is_integer() && e.re >= Rational64::from_integer(0) {
                    format!("{v}^{e}")
                } else {
                    format!("{v}^({e})")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Finite truncation region: bounds on the real part of each exponent and,
/// optionally, on the sum of all real parts.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Window {
    bounds: BTreeMap<String, (Rational64, Rational64)>,
    total: Option<(Rational64, Rational64)>,
}

impl Window {
    pub fn new() -> Self {
        Window::default()
    }

    pub fn uniform(vars: &[&str], lo: i64, hi: i64) -> Self {
        let mut w = Window::new();
        for v in vars {
            w = w.bound(v, lo, hi);
        }
        w
    }

    pub fn bound(mut self, var: &str, lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty window for {var}");
        self.bounds
            .insert(var.to_string(), (Rational64::from_integer(lo), Rational64::from_integer(hi)));
        self
    }

    pub fn total(mut self, lo: i64, hi: i64) -> Self {
        self.total = Some((Rational64::from_integer(lo), Rational64::from_integer(hi)));
        self
    }

    pub fn var_bounds(&self, var: &str) -> Option<(Rational64, Rational64)> {
        self.bounds.get(var).copied()
    }

    pub fn total_bounds(&self) -> Option<(Rational64, Rational64)> {
        self.total
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.bounds.keys().map(|s| s.as_str())
    }

    /// Whether the monomial lies in the window; variables without bounds must have exponent 0.
    pub fn contains(&self, m: &Monomial) -> bool {
        for (v, e) in m.pairs() {
            match self.bounds.get(v) {
                Some((lo, hi)) if e.re >= *lo && e.re <= *hi => {}
                _ => return false,
            }
        }
        let zero = Rational64::from_integer(0);
        let absent_ok = self
            .bounds
            .iter()
            .filter(|(v, _)| m.exponent(v).is_zero())
            .all(|(_, (lo, hi))| *lo <= zero && zero <= *hi);
        if !absent_ok {
            return false;
        }
        if let Some((lo, hi)) = self.total {
            let t = m.total_re();
            if t < lo || t > hi {
                return false;
            }
        }
        true
    }
}
