use std::collections::BTreeMap;
use std::sync::Arc;

use super::generators::{
    lazy, Binom, Delta, Delta3, DeltaSigns, Derivative, Product, Residue, Scaled, ShiftScale, Taylor,
};
use super::series::{Coeff, Lazy, Series};
use super::Monomial;
use crate::error::{Error, Result};
use crate::scalar::{binomial, Exponent, Scalar};

pub use super::generators::BinomArg;

/// δ(x) = Σ_{n∈ℤ} xⁿ.
pub fn delta(var: &str) -> Series<Scalar> {
    Series::from_generator(Arc::new(Delta { var: var.to_string() }))
}

fn distinct(vars: &[&str]) -> Result<()> {
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(Error::DuplicateVariable(v.to_string()));
        }
    }
    Ok(())
}

/// out⁻¹ δ((a ∓ b)/(±out)) expanded with the binomial convention.
pub fn delta3(out: &str, a: &str, b: &str, signs: DeltaSigns) -> Result<Series<Scalar>> {
    distinct(&[out, a, b])?;
    Ok(Series::from_generator(Arc::new(Delta3 {
        out: out.into(),
        a: a.into(),
        b: b.into(),
        signs,
        prefactor: true,
    })))
}

/// δ((a ∓ b)/(±out)) without the out⁻¹ prefactor.
pub fn delta_ratio(out: &str, a: &str, b: &str, signs: DeltaSigns) -> Result<Series<Scalar>> {
    distinct(&[out, a, b])?;
    Ok(Series::from_generator(Arc::new(Delta3 {
        out: out.into(),
        a: a.into(),
        b: b.into(),
        signs,
        prefactor: false,
    })))
}

/// (first + second)^λ in nonnegative integral powers of `second`.
pub fn binom_expand(first: BinomArg, second: BinomArg, lambda: Exponent) -> Result<Series<Scalar>> {
    match (first.name(), second.name()) {
        (None, None) => return Err(Error::BothArgumentsNumeric),
        (Some(a), Some(b)) if a == b => return Err(Error::DuplicateVariable(a.to_string())),
        _ => {}
    }
    if !first.factor().is_one() && !lambda.is_integer() {
        return Err(Error::Eval(
            "a negated or numeric first argument needs an integral exponent".into(),
        ));
    }
    if let Some(k) = lambda.as_integer().filter(|k| *k >= 0) {
        // finite polynomial
        let a = first.factor();
        let b = second.factor();
        let mut terms = Vec::new();
        for n in 0..=k {
            let mut c = binomial(&Scalar::from_int(k), n as u64);
            c = &c * &a.powi(k - n).expect("nonnegative");
            c = &c * &b.powi(n).expect("nonnegative");
            let mut pairs = Vec::new();
            if let Some(x) = first.name() {
                pairs.push((x.to_string(), Exponent::int(k - n)));
            }
            if let Some(y) = second.name() {
                pairs.push((y.to_string(), Exponent::int(n)));
            }
            terms.push((Monomial::from_pairs(pairs), c));
        }
        return Ok(Series::from_terms(terms));
    }
    Ok(Series::from_generator(Arc::new(Binom { first, second, lambda })))
}

/// f·g, refusing whenever some coefficient would be an infinite sum.
pub fn multiply<C: Coeff>(f: &Series<Scalar>, g: &Series<C>) -> Result<Series<C>> {
    let mut finite: BTreeMap<Monomial, C> = BTreeMap::new();
    for (mf, cf) in &f.finite {
        for (mg, cg) in &g.finite {
            finite
                .entry(mf.mul(mg))
                .or_insert_with(C::zero)
                .add_assign_ref(&cg.scale(cf));
        }
    }
    finite.retain(|_, c| !c.is_zero());
    let mut out: Vec<Lazy<C>> = Vec::new();
    for (mf, cf) in &f.finite {
        for lg in &g.lazy {
            out.push(Lazy::new(Arc::new(ShiftScale::new(lg.clone(), mf.clone(), cf.clone()))));
        }
    }
    for lf in &f.lazy {
        for (mg, cg) in &g.finite {
            let scaled = lazy(Scaled { inner: lf.clone(), value: cg.clone() });
            out.push(Lazy::new(Arc::new(ShiftScale::new(scaled, mg.clone(), Scalar::one()))));
        }
        for lg in &g.lazy {
            out.push(lazy(Product::new(lf.clone(), lg.clone())?));
        }
    }
    Ok(Series { finite, lazy: out })
}

/// e^{y d/dx} f, which is f(x + y) under the binomial convention.
pub fn formal_taylor<C: Coeff>(f: &Series<C>, x: &str, y: &str) -> Result<Series<C>> {
    if x == y {
        return Err(Error::DuplicateVariable(x.to_string()));
    }
    if f.vars().iter().any(|v| v == y) {
        return Err(Error::VariableCollision(y.to_string()));
    }
    let mut acc: Series<C> = Series::zero();
    for (m, c) in &f.finite {
        let lam = m.exponent(x);
        let rest = m.without(x);
        let expanded = binom_expand(BinomArg::var(x), BinomArg::var(y), lam)?;
        let piece = multiply(&expanded, &Series::constant(c.clone()))?.shift(&rest);
        acc = acc.add(&piece);
    }
    for l in &f.lazy {
        match l.vars.iter().position(|v| v == x) {
            Some(i) => {
                acc.lazy.push(lazy(Taylor { inner: l.clone(), x: i, y: y.to_string() }));
            }
            None => acc.lazy.push(l.clone()),
        }
    }
    Ok(acc)
}

/// Coefficient of x⁻¹, as a series in the remaining variables.
pub fn residue<C: Coeff>(f: &Series<C>, x: &str) -> Series<C> {
    let minus_one = Exponent::int(-1);
    let finite = f
        .finite
        .iter()
        .filter(|(m, _)| m.exponent(x) == minus_one)
        .map(|(m, c)| (m.without(x), c.clone()));
    let mut out = Series::from_terms(finite);
    for l in &f.lazy {
        if let Some(i) = l.vars.iter().position(|v| v == x) {
            if l.support.offsets[i].is_zero() {
                out.lazy.push(lazy(Residue { inner: l.clone(), var: i }));
            }
        }
    }
    out
}

/// Termwise d/dx.
pub fn derivative<C: Coeff>(f: &Series<C>, x: &str) -> Series<C> {
    let finite = f.finite.iter().filter_map(|(m, c)| {
        let e = m.exponent(x);
        if e.is_zero() {
            None
        } else {
            Some((m.with(x, e - Exponent::int(1)), c.scale(&e.to_scalar())))
        }
    });
    let mut out = Series::from_terms(finite);
    for l in &f.lazy {
        if let Some(i) = l.vars.iter().position(|v| v == x) {
            out.lazy.push(lazy(Derivative { inner: l.clone(), var: i }));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{SupportClass, Window};

    fn x() -> BinomArg {
        BinomArg::var("x")
    }
    fn y() -> BinomArg {
        BinomArg::var("y")
    }

    #[test]
    fn delta_window_and_residue() {
        let d = delta("x");
        let w = Window::uniform(&["x"], -2, 2);
        assert_eq!(d.materialize(&w).unwrap().len(), 5);
        assert_eq!(residue(&d, "x").coeff(&Monomial::one()).unwrap(), Scalar::one());
        assert_eq!(d.support_class(), SupportClass::DoublyInfinite);
    }

    #[test]
    fn delta_squared_is_undefined() {
        let d = delta("x");
        assert!(matches!(multiply(&d, &d), Err(Error::UndefinedProduct(_))));
    }

    #[test]
    fn geometric_square() {
        let g = binom_expand(BinomArg::Num(Scalar::one()), BinomArg::neg("x"), Exponent::int(-1)).unwrap();
        let sq = multiply(&g, &g).unwrap();
        for n in 0..8 {
            assert_eq!(sq.coeff_ints(&[("x", n)]).unwrap(), Scalar::from_int(n + 1));
        }
        assert_eq!(sq.coeff_ints(&[("x", -1)]).unwrap(), Scalar::zero());
    }

    #[test]
    fn monomial_times_delta() {
        let d = delta("x");
        let p = multiply(&Series::term(Monomial::var("x"), Scalar::one()), &d).unwrap();
        assert!(p.agrees_on(&d, &Window::uniform(&["x"], -6, 6)).unwrap());
    }

    #[test]
    fn binomial_examples() {
        let sq = binom_expand(x(), y(), Exponent::int(2)).unwrap();
        assert_eq!(sq.coeff_ints(&[("x", 1), ("y", 1)]).unwrap(), Scalar::from_int(2));
        let inv = binom_expand(x(), y(), Exponent::int(-1)).unwrap();
        for n in 0..6 {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(inv.coeff_ints(&[("x", -1 - n), ("y", n)]).unwrap(), Scalar::from_int(sign));
        }
        let half = binom_expand(x(), y(), Exponent::frac(1, 2)).unwrap();
        let m = Monomial::from_pairs(vec![("x".into(), Exponent::frac(-3, 2)), ("y".into(), Exponent::int(2))]);
        assert_eq!(half.coeff(&m).unwrap(), Scalar::from_frac(-1, 8));
        assert_eq!(
            binom_expand(BinomArg::Num(Scalar::one()), BinomArg::Num(Scalar::one()), Exponent::int(2)).err(),
            Some(Error::BothArgumentsNumeric)
        );
    }

    #[test]
    fn derivative_examples() {
        let cube = Series::term(Monomial::ints(&[("x", 3)]), Scalar::one());
        assert_eq!(derivative(&cube, "x").coeff_ints(&[("x", 2)]).unwrap(), Scalar::from_int(3));
        let half = Series::term(Monomial::single("x", Exponent::frac(1, 2)), Scalar::one());
        let d = derivative(&half, "x");
        assert_eq!(d.coeff(&Monomial::single("x", Exponent::frac(-1, 2))).unwrap(), Scalar::from_frac(1, 2));
        let dd = derivative(&delta("x"), "x");
        for n in -4..4 {
            assert_eq!(dd.coeff_ints(&[("x", n - 1)]).unwrap(), Scalar::from_int(n));
        }
    }

    #[test]
    fn taylor_examples() {
        let sq = Series::term(Monomial::ints(&[("x", 2)]), Scalar::one());
        let t = formal_taylor(&sq, "x", "y").unwrap();
        assert_eq!(t.terms().unwrap().len(), 3);
        assert!(matches!(formal_taylor(&t, "x", "y"), Err(Error::VariableCollision(_))));
        let half = Series::term(Monomial::single("x", Exponent::frac(1, 2)), Scalar::one());
        let t = formal_taylor(&half, "x", "y").unwrap();
        let m = Monomial::from_pairs(vec![("x".into(), Exponent::frac(-1, 2)), ("y".into(), Exponent::int(1))]);
        assert_eq!(t.coeff(&m).unwrap(), Scalar::from_frac(1, 2));
    }

    #[test]
    fn residue_skips_fractional_powers() {
        let f = Series::from_terms(vec![
            (Monomial::ints(&[("x", -1)]), Scalar::one()),
            (Monomial::single("x", Exponent::frac(-1, 2)), Scalar::one()),
        ]);
        let r = residue(&f, "x");
        assert_eq!(r.terms().unwrap().len(), 1);
        assert_eq!(r.coeff(&Monomial::one()).unwrap(), Scalar::one());
    }

    #[test]
    fn delta3_sample_coefficients() {
        let d = delta3("x0", "x1", "x2", DeltaSigns::STANDARD).unwrap();
        assert_eq!(d.coeff_ints(&[("x1", -1)]).unwrap(), Scalar::one());
        assert!(matches!(delta3("x0", "x0", "x2", DeltaSigns::STANDARD), Err(Error::DuplicateVariable(_))));
        let r = residue(&delta3("x2", "x1", "x0", DeltaSigns::STANDARD).unwrap(), "x2");
        let w = Window::uniform(&["x0", "x1"], -5, 5);
        let got = r.materialize(&w).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got.get(&Monomial::one()), Some(&Scalar::one()));
    }
}
