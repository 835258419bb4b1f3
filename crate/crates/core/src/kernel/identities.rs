//! The two- and three-term delta-function identities, checked coefficientwise on a window.

use serde::{Deserialize, Serialize};

use super::generators::DeltaSigns;
use super::ops::{binom_expand, delta, delta3, multiply, BinomArg};
use super::series::Series;
use super::{Monomial, Window};
use crate::error::{Error, Result};
use crate::report::{CheckReport, Witness};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaIdentity {
    TwoTerm,
    ThreeTerm,
    ThreeTermLhsInequality,
    Substitution,
}

impl DeltaIdentity {
    pub fn name(self) -> &'static str {
        match self {
            DeltaIdentity::TwoTerm => "two_term",
            DeltaIdentity::ThreeTerm => "three_term",
            DeltaIdentity::ThreeTermLhsInequality => "three_term_lhs_inequality",
            DeltaIdentity::Substitution => "substitution",
        }
    }
}

fn compare(report: &mut CheckReport, name: &str, lhs: &Series, rhs: &Series, window: &Window) {
    let outcome = lhs.first_difference(rhs, window).map(|diff| {
        diff.map(|(m, a, b)| Witness::new(name, Some(m.to_string()), a, b))
    });
    report.record(name, format!("window {window:?}"), outcome);
}

/// x₂⁻¹δ((x₁−x₀)/x₂) and x₁⁻¹δ((x₂+x₀)/x₁).
pub fn two_term_sides() -> Result<(Series, Series)> {
    Ok((
        delta3("x2", "x1", "x0", DeltaSigns::STANDARD)?,
        delta3("x1", "x2", "x0", DeltaSigns::PLUS)?,
    ))
}

/// The two left-hand terms x₀⁻¹δ((x₁−x₂)/x₀) and x₀⁻¹δ((x₂−x₁)/(−x₀)), and the right-hand side.
pub fn three_term_sides() -> Result<(Series, Series, Series)> {
    Ok((
        delta3("x0", "x1", "x2", DeltaSigns::STANDARD)?,
        delta3("x0", "x2", "x1", DeltaSigns::NEGATED_OUT)?,
        delta3("x2", "x1", "x0", DeltaSigns::STANDARD)?,
    ))
}

/// A Laurent polynomial in x₁, x₂, y used as the default test function for the substitution check.
pub fn default_substitution_function() -> Series {
    Series::from_terms(vec![
        (Monomial::ints(&[("x1", 2), ("x2", -1), ("y", 1)]), Scalar::from_int(1)),
        (Monomial::ints(&[("x1", -1)]), Scalar::from_int(3)),
        (Monomial::ints(&[("x1", 1), ("y", -2)]), Scalar::from_frac(-1, 2)),
        (Monomial::ints(&[("x1", -2), ("x2", 3)]), Scalar::gaussian(0, 1, 2, 1)),
    ])
}

/// f(x₂ − y, x₂, y) for a Laurent polynomial f in x₁, x₂, y.
fn substitute_x1(f: &Series) -> Result<Series> {
    let terms = f
        .terms()
        .ok_or_else(|| Error::Eval("substitution needs an explicit Laurent polynomial".into()))?;
    let mut acc = Series::zero();
    for (m, c) in terms {
        let a = m.exponent("x1");
        let rest = m.without("x1");
        let expanded = binom_expand(BinomArg::var("x2"), BinomArg::neg("y"), a)?;
        acc = acc.add(&expanded.shift(&rest).scale(c));
    }
    Ok(acc)
}

/// x₁⁻¹δ((x₂−y)/x₁) f(x₁,x₂,y) = x₁⁻¹δ((x₂−y)/x₁) f(x₂−y,x₂,y) for a Laurent polynomial f.
pub fn verify_substitution(f: &Series, window: &Window) -> CheckReport {
    let mut report = CheckReport::new("delta substitution");
    let built = (|| -> Result<(Series, Series)> {
        let d = delta3("x1", "x2", "y", DeltaSigns::STANDARD)?;
        Ok((multiply(&d, f)?, multiply(&d, &substitute_x1(f)?)?))
    })();
    match built {
        Ok((lhs, rhs)) => compare(&mut report, "substitution", &lhs, &rhs, window),
        Err(e) => report.fail("substitution", "", Witness::from_error("substitution", &e)),
    }
    report
}

/// f(x)δ(x) = f(1)δ(x) for a Laurent polynomial f in `var`.
pub fn verify_delta_evaluation(f: &Series, var: &str, window: &Window) -> CheckReport {
    let mut report = CheckReport::new("delta evaluation");
    let outcome = (|| -> Result<Option<Witness>> {
        let terms = f
            .terms()
            .ok_or_else(|| Error::Eval("expected an explicit Laurent polynomial".into()))?;
        let at_one: Scalar = terms.values().cloned().sum();
        let d = delta(var);
        let lhs = multiply(f, &d)?;
        let rhs = d.scale(&at_one);
        Ok(lhs
            .first_difference(&rhs, window)?
            .map(|(m, a, b)| Witness::new(format!("f = {:?}", f), Some(m.to_string()), a, b)))
    })();
    report.record("delta_evaluation", format!("f(1) substitution in {var}"), outcome);
    report
}

pub fn verify_delta_identity(kind: DeltaIdentity, window: &Window) -> CheckReport {
    let mut report = CheckReport::new(format!("delta identity {}", kind.name()));
    match kind {
        DeltaIdentity::TwoTerm => match two_term_sides() {
            Ok((l, r)) => compare(&mut report, kind.name(), &l, &r, window),
            Err(e) => report.fail(kind.name(), "", Witness::from_error(kind.name(), &e)),
        },
        DeltaIdentity::ThreeTerm => match three_term_sides() {
            Ok((a, b, r)) => compare(&mut report, kind.name(), &a.sub(&b), &r, window),
            Err(e) => report.fail(kind.name(), "", Witness::from_error(kind.name(), &e)),
        },
        DeltaIdentity::ThreeTermLhsInequality => match three_term_sides() {
            Ok((a, b, _)) => match a.first_difference(&b, window) {
                Ok(Some((m, x, y))) => report.pass(
                    kind.name(),
                    format!("terms differ at {m}: {x} vs {y}"),
                ),
                Ok(None) => report.fail(
                    kind.name(),
                    "no differing coefficient in window",
                    Witness::new("left-hand terms", None, "equal on window", "expected a difference"),
                ),
                Err(e) => report.fail(kind.name(), "", Witness::from_error(kind.name(), &e)),
            },
            Err(e) => report.fail(kind.name(), "", Witness::from_error(kind.name(), &e)),
        },
        DeltaIdentity::Substitution => {
            report = verify_substitution(&default_substitution_function(), window);
        }
    }
    report
}

/// An exponent window over the three standard variables.
pub fn standard_window(n: i64) -> Window {
    Window::uniform(&["x0", "x1", "x2", "y"], -n, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold_on_small_window() {
        let w = standard_window(4);
        for kind in [
            DeltaIdentity::TwoTerm,
            DeltaIdentity::ThreeTerm,
            DeltaIdentity::ThreeTermLhsInequality,
            DeltaIdentity::Substitution,
        ] {
            let r = verify_delta_identity(kind, &w);
            assert!(r.all_passed(), "{r}");
        }
    }

    #[test]
    fn evaluation_identity() {
        let f = Series::from_terms(vec![
            (Monomial::ints(&[("x", -3)]), Scalar::from_int(2)),
            (Monomial::ints(&[("x", 5)]), Scalar::from_frac(1, 3)),
        ]);
        let r = verify_delta_evaluation(&f, "x", &Window::uniform(&["x"], -6, 6));
        assert!(r.all_passed(), "{r}");
    }
}
