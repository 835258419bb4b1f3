//! Canonical JSON form of windowed series.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::series::{Coeff, Series};
use super::{Monomial, Window};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `[{monomial: {var: exponent}, coeff: c}, ...]` in canonical monomial order.
pub fn terms_to_json<C: Coeff>(terms: &BTreeMap<Monomial, C>) -> Value {
    Value::Array(
        terms
            .iter()
            .map(|(m, c)| json!({ "monomial": m.to_json(), "coeff": c.to_json() }))
            .collect(),
    )
}

pub fn series_to_json<C: Coeff>(s: &Series<C>, window: &Window) -> Result<Value> {
    Ok(terms_to_json(&s.materialize(window)?))
}

/// Reads a scalar series written by [`terms_to_json`].
pub fn series_from_json(v: &Value) -> Result<Series<Scalar>> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::Schema("series must be a list of terms".into()))?;
    let terms: Result<Vec<(Monomial, Scalar)>> = items
        .iter()
        .map(|item| {
            let m = item
                .get("monomial")
                .ok_or_else(|| Error::Schema("term without monomial".into()))?;
            let c = item
                .get("coeff")
                .ok_or_else(|| Error::Schema("term without coeff".into()))?;
            Ok((Monomial::from_json(m)?, Scalar::from_json(c)?))
        })
        .collect();
    Ok(Series::from_terms(terms?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exponent;

    #[test]
    fn round_trip() {
        let s = Series::from_terms(vec![
            (Monomial::ints(&[("x", 2), ("y", -1)]), Scalar::from_frac(3, 4)),
            (Monomial::single("x", Exponent::frac(1, 2)), Scalar::gaussian(0, 1, -1, 3)),
        ]);
        let w = Window::uniform(&["x", "y"], -3, 3);
        let v = series_to_json(&s, &w).unwrap();
        let back = series_from_json(&v).unwrap();
        assert_eq!(series_to_json(&back, &w).unwrap(), v);
    }
}
