use std::sync::Arc;

use num_rational::Rational64;

use super::series::{Coeff, Lazy};
use super::support::{cone_is_trivial, eliminate_all, enumerate, Ineq, Support};
use super::Monomial;
use crate::error::{Error, Result};
use crate::scalar::{binomial, Exponent, Scalar};

/// Coefficient oracle of an infinite series. `coeff` is only called on exponents that lie
/// in `support()` (offset class and inequalities); the two must stay consistent.
pub trait Generator<C>: Send + Sync {
    fn vars(&self) -> Vec<String>;
    fn support(&self) -> Support;
    fn coeff(&self, exps: &[Exponent]) -> Result<C>;
}

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// δ(x) = Σ_{n∈ℤ} xⁿ.
pub(crate) struct Delta {
    pub var: String,
}

impl Generator<Scalar> for Delta {
    fn vars(&self) -> Vec<String> {
        vec![self.var.clone()]
    }
    fn support(&self) -> Support {
        Support::free(1)
    }
    fn coeff(&self, _: &[Exponent]) -> Result<Scalar> {
        Ok(Scalar::one())
    }
}

/// Sign choices inside δ((a ± b)/(±out)).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DeltaSigns {
    /// `a + b` instead of `a − b`.
    pub plus_b: bool,
    /// `−out` in the denominator.
    pub minus_out: bool,
}

impl DeltaSigns {
    pub const STANDARD: DeltaSigns = DeltaSigns { plus_b: false, minus_out: false };
    pub const NEGATED_OUT: DeltaSigns = DeltaSigns { plus_b: false, minus_out: true };
    pub const PLUS: DeltaSigns = DeltaSigns { plus_b: true, minus_out: false };
}

/// out^{-p} δ((a ± b)/(±out)) = Σ_{n∈ℤ, m∈ℕ} (±1)ⁿ (±1)^m C(n,m) out^{-n-p} a^{n-m} b^m,
/// with `p` = 1 when the prefactor is present.
pub(crate) struct Delta3 {
    pub out: String,
    pub a: String,
    pub b: String,
    pub signs: DeltaSigns,
    pub prefactor: bool,
}

impl Generator<Scalar> for Delta3 {
    fn vars(&self) -> Vec<String> {
        vec![self.out.clone(), self.a.clone(), self.b.clone()]
    }
    fn support(&self) -> Support {
        let p = i64::from(self.prefactor);
        Support::free(3).eq(vec![1, 1, 1], -p).ge(vec![0, 0, 1], 0)
    }
    fn coeff(&self, e: &[Exponent]) -> Result<Scalar> {
        let p = i64::from(self.prefactor);
        let (eo, eb) = match (e[0].as_integer(), e[2].as_integer()) {
            (Some(o), Some(b)) => (o, b),
            _ => return Ok(Scalar::zero()),
        };
        let n = -eo - p;
        let m = eb;
        let mut c = binomial(&Scalar::from_int(n), m as u64);
        let mut sign = 1i64;
        if !self.signs.plus_b && m % 2 != 0 {
            sign = -sign;
        }
        if self.signs.minus_out && n.rem_euclid(2) != 0 {
            sign = -sign;
        }
        if sign < 0 {
            c = -c;
        }
        Ok(c)
    }
}

/// One side of a binomial expansion: a variable, a negated variable, or a number.
#[derive(Clone, Debug, PartialEq)]
pub enum BinomArg {
    Var(String),
    NegVar(String),
    Num(Scalar),
}

impl BinomArg {
    pub fn var(name: &str) -> Self {
        BinomArg::Var(name.to_string())
    }

    pub fn neg(name: &str) -> Self {
        BinomArg::NegVar(name.to_string())
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            BinomArg::Var(x) | BinomArg::NegVar(x) => Some(x),
            BinomArg::Num(_) => None,
        }
    }

    /// The value that multiplies the variable (±1), or the number itself.
    pub(crate) fn factor(&self) -> Scalar {
        match self {
            BinomArg::Var(_) => Scalar::one(),
            BinomArg::NegVar(_) => Scalar::from_int(-1),
            BinomArg::Num(a) => a.clone(),
        }
    }
}

/// (first + second)^λ expanded in nonnegative integral powers of `second`.
pub(crate) struct Binom {
    pub first: BinomArg,
    pub second: BinomArg,
    pub lambda: Exponent,
}

impl Generator<Scalar> for Binom {
    fn vars(&self) -> Vec<String> {
        [&self.first, &self.second]
            .iter()
            .filter_map(|a| a.name().map(str::to_string))
            .collect()
    }
    fn support(&self) -> Support {
        let lam = self.lambda;
        match (self.first.name(), self.second.name()) {
            (Some(_), Some(_)) => {
                let mut s = Support::free(2).with_offsets(vec![lam, Exponent::ZERO]).ge(vec![0, 1], 0);
                s.push_rational(vec![r(1), r(1)], lam.re);
                s.push_rational(vec![r(-1), r(-1)], -lam.re);
                s
            }
            (Some(_), None) => {
                let mut s = Support::free(1).with_offsets(vec![lam]);
                s.push_rational(vec![r(-1)], -lam.re);
                s
            }
            _ => Support::free(1).ge(vec![1], 0),
        }
    }
    fn coeff(&self, e: &[Exponent]) -> Result<Scalar> {
        let lam = self.lambda;
        let n = match (self.first.name(), self.second.name()) {
            (Some(_), Some(_)) => {
                if e[0] + e[1] != lam {
                    return Ok(Scalar::zero());
                }
                e[1].as_integer()
            }
            (Some(_), None) => (lam - e[0]).as_integer(),
            _ => e[0].as_integer(),
        };
        let n = match n {
            Some(n) if n >= 0 => n,
            _ => return Ok(Scalar::zero()),
        };
        let mut c = binomial(&lam.to_scalar(), n as u64);
        c = &c * &self.second.factor().powi(n).expect("nonnegative power");
        let a = self.first.factor();
        if !a.is_one() {
            let k = lam
                .as_integer()
                .ok_or_else(|| Error::Eval("a negated or numeric base needs an integral exponent".into()))?;
            c = &c * &a.powi(k - n).ok_or(Error::PoleHit)?;
        }
        Ok(c)
    }
}

/// Variable list of `inner` extended by the variables of `shift`, with positions of the inner ones.
fn union_vars(a: &[String], b: &[String]) -> (Vec<String>, Vec<usize>, Vec<usize>) {
    let mut vars: Vec<String> = a.iter().chain(b.iter()).cloned().collect();
    vars.sort();
    vars.dedup();
    let pos = |xs: &[String]| xs.iter().map(|x| vars.iter().position(|v| v == x).unwrap()).collect();
    let pa = pos(a);
    let pb = pos(b);
    (vars, pa, pb)
}

/// Lifts the rows of a support on a subset of variables to a larger variable list.
fn lift_rows(s: &Support, map: &[usize], n: usize, offset_col: usize) -> Vec<Ineq> {
    s.rows
        .iter()
        .map(|row| {
            let mut c = vec![r(0); n];
            for (j, &p) in map.iter().enumerate() {
                c[offset_col + p] = row.coeffs[j];
            }
            Ineq { coeffs: c, bound: row.bound }
        })
        .collect()
}

fn pin_zero(n: usize, col: usize, value: Rational64) -> [Ineq; 2] {
    let mut c = vec![r(0); n];
    c[col] = r(1);
    let up = Ineq { coeffs: c.clone(), bound: value };
    c[col] = r(-1);
    [up, Ineq { coeffs: c, bound: -value }]
}

/// `factor · shift · inner`.
pub(crate) struct ShiftScale<C> {
    inner: Lazy<C>,
    vars: Vec<String>,
    map: Vec<usize>,
    shift: Vec<Exponent>,
    factor: Scalar,
}

impl<C: Coeff> ShiftScale<C> {
    pub fn new(inner: Lazy<C>, shift: Monomial, factor: Scalar) -> Self {
        let shift_vars: Vec<String> = shift.vars().map(str::to_string).collect();
        let (vars, map, _) = union_vars(&inner.vars, &shift_vars);
        let shift_pos = shift.positional(&vars).expect("shift variables are included");
        ShiftScale { inner, vars, map, shift: shift_pos, factor }
    }
}

impl<C: Coeff> Generator<C> for ShiftScale<C> {
    fn vars(&self) -> Vec<String> {
        self.vars.clone()
    }
    fn support(&self) -> Support {
        let n = self.vars.len();
        let mut offsets: Vec<Exponent> = self.shift.clone();
        for (j, &p) in self.map.iter().enumerate() {
            offsets[p] = offsets[p] + self.inner.support.offsets[j];
        }
        let mut rows = Vec::new();
        for row in lift_rows(&self.inner.support, &self.map, n, 0) {
            let extra = row
                .coeffs
                .iter()
                .zip(&self.shift)
                .fold(r(0), |acc, (c, s)| acc + c * s.re);
            rows.push(Ineq { coeffs: row.coeffs, bound: row.bound + extra });
        }
        for i in 0..n {
            if !self.map.contains(&i) {
                rows.extend(pin_zero(n, i, self.shift[i].re));
            }
        }
        Support { offsets: offsets.into_iter().map(|o| o.mod_integers()).collect(), rows }
    }
    fn coeff(&self, e: &[Exponent]) -> Result<C> {
        for i in 0..self.vars.len() {
            if !self.map.contains(&i) && e[i] != self.shift[i] {
                return Ok(C::zero());
            }
        }
        let inner_e: Vec<Exponent> = self.map.iter().map(|&p| e[p] - self.shift[p]).collect();
        Ok(self.inner.coeff_pos(&inner_e)?.scale(&self.factor))
    }
}

/// A scalar series times a fixed coefficient.
pub(crate) struct Scaled<C> {
    pub inner: Lazy<Scalar>,
    pub value: C,
}

impl<C: Coeff> Generator<C> for Scaled<C> {
    fn vars(&self) -> Vec<String> {
        self.inner.vars.clone()
    }
    fn support(&self) -> Support {
        self.inner.support.clone()
    }
    fn coeff(&self, e: &[Exponent]) -> Result<C> {
        Ok(self.value.scale(&self.inner.coeff_pos(e)?))
    }
}

/// Product of two lazy series whose coefficientwise sums are certified finite.
pub(crate) struct Product<C> {
    f: Lazy<Scalar>,
    g: Lazy<C>,
    vars: Vec<String>,
    fmap: Vec<usize>,
    gmap: Vec<usize>,
    support: Support,
}

impl<C: Coeff> Product<C> {
    pub fn new(f: Lazy<Scalar>, g: Lazy<C>) -> Result<Self> {
        let (vars, fmap, gmap) = union_vars(&f.vars, &g.vars);
        let n = vars.len();
        // recession cone: d in cone(f), -d in cone(g)
        let mut cone = Vec::new();
        for row in lift_rows(&f.support, &fmap, n, 0) {
            cone.push(Ineq { coeffs: row.coeffs, bound: r(0) });
        }
        for row in lift_rows(&g.support, &gmap, n, 0) {
            cone.push(Ineq { coeffs: row.coeffs.iter().map(|c| -c).collect(), bound: r(0) });
        }
        for i in 0..n {
            if !fmap.contains(&i) || !gmap.contains(&i) {
                cone.extend(pin_zero(n, i, r(0)));
            }
        }
        if !cone_is_trivial(&cone, n) {
            return Err(Error::UndefinedProduct(format!(
                "coefficient sums in variables {vars:?} are infinite"
            )));
        }
        // Minkowski sum: z = a + b, columns 0..n hold z, n..2n hold a
        let mut rows = Vec::new();
        for row in lift_rows(&f.support, &fmap, 2 * n, n) {
            rows.push(row);
        }
        for row in lift_rows(&g.support, &gmap, 2 * n, 0) {
            let mut c = row.coeffs.clone();
            for i in 0..n {
                c[n + i] = -row.coeffs[i];
            }
            rows.push(Ineq { coeffs: c, bound: row.bound });
        }
        for i in 0..n {
            if !fmap.contains(&i) {
                rows.extend(pin_zero(2 * n, n + i, r(0)));
            }
            if !gmap.contains(&i) {
                let mut c = vec![r(0); 2 * n];
                c[i] = r(1);
                c[n + i] = r(-1);
                rows.push(Ineq { coeffs: c.clone(), bound: r(0) });
                rows.push(Ineq { coeffs: c.iter().map(|x| -x).collect(), bound: r(0) });
            }
        }
        let a_cols: Vec<usize> = (n..2 * n).collect();
        let projected = eliminate_all(rows, &a_cols).unwrap_or_else(|| {
            // empty support: an unsatisfiable row keeps it empty
            vec![Ineq { coeffs: vec![r(0); 2 * n], bound: r(1) }]
        });
        let rows: Vec<Ineq> = projected
            .into_iter()
            .map(|row| Ineq { coeffs: row.coeffs[..n].to_vec(), bound: row.bound })
            .collect();
        let mut offsets = vec![Exponent::ZERO; n];
        for (j, &p) in fmap.iter().enumerate() {
            offsets[p] = offsets[p] + f.support.offsets[j];
        }
        for (j, &p) in gmap.iter().enumerate() {
            offsets[p] = offsets[p] + g.support.offsets[j];
        }
        let offsets = offsets.into_iter().map(|o| o.mod_integers()).collect();
        Ok(Product { f, g, vars, fmap, gmap, support: Support { offsets, rows } })
    }
}

impl<C: Coeff> Generator<C> for Product<C> {
    fn vars(&self) -> Vec<String> {
        self.vars.clone()
    }
    fn support(&self) -> Support {
        self.support.clone()
    }
    fn coeff(&self, e: &[Exponent]) -> Result<C> {
        let n = self.vars.len();
        let mut rows = lift_rows(&self.f.support, &self.fmap, n, 0);
        for row in lift_rows(&self.g.support, &self.gmap, n, 0) {
            let fixed = row.coeffs.iter().zip(e).fold(r(0), |acc, (c, x)| acc + c * x.re);
            rows.push(Ineq { coeffs: row.coeffs.iter().map(|c| -c).collect(), bound: row.bound - fixed });
        }
        let mut offsets = vec![Exponent::ZERO; n];
        for (j, &p) in self.fmap.iter().enumerate() {
            offsets[p] = self.f.support.offsets[j];
        }
        for i in 0..n {
            if !self.fmap.contains(&i) {
                rows.extend(pin_zero(n, i, r(0)));
            }
            if !self.gmap.contains(&i) {
                rows.extend(pin_zero(n, i, e[i].re));
                offsets[i] = e[i].mod_integers();
            }
        }
        let points = enumerate(&rows, &offsets)
            .ok_or_else(|| Error::UndefinedProduct("unbounded convolution".into()))?;
        let mut acc = C::zero();
        for a in points {
            let fa: Vec<Exponent> = self.fmap.iter().map(|&p| a[p]).collect();
            let fc = self.f.coeff_pos(&fa)?;
            if fc.is_zero() {
                continue;
            }
            let gb: Vec<Exponent> = self.gmap.iter().map(|&p| e[p] - a[p]).collect();
            let gc = self.g.coeff_pos(&gb)?;
            if !gc.is_zero() {
                acc.add_assign_ref(&gc.scale(&fc));
            }
        }
        Ok(acc)
    }
}

/// Termwise d/dx.
pub(crate) struct Derivative<C> {
    pub inner: Lazy<C>,
    pub var: usize,
}

impl<C: Coeff> Generator<C> for Derivative<C> {
    fn vars(&self) -> Vec<String> {
        self.inner.vars.clone()
    }
    fn support(&self) -> Support {
        let mut s = self.inner.support.clone();
        for row in &mut s.rows {
            row.bound -= row.coeffs[self.var];
        }
        s
    }
    fn coeff(&self, e: &[Exponent]) -> Result<C> {
        let mut up = e.to_vec();
        up[self.var] = up[self.var] + Exponent::int(1);
        let factor = up[self.var].to_scalar();
        Ok(self.inner.coeff_pos(&up)?.scale(&factor))
    }
}

/// Coefficient of x⁻¹ in one variable.
pub(crate) struct Residue<C> {
    pub inner: Lazy<C>,
    pub var: usize,
}

impl<C: Coeff> Generator<C> for Residue<C> {
    fn vars(&self) -> Vec<String> {
        let mut v = self.inner.vars.clone();
        v.remove(self.var);
        v
    }
    fn support(&self) -> Support {
        let s = &self.inner.support;
        let mut offsets = s.offsets.clone();
        offsets.remove(self.var);
        let rows = s
            .rows
            .iter()
            .map(|row| {
                let mut c = row.coeffs.clone();
                let cx = c.remove(self.var);
                Ineq { coeffs: c, bound: row.bound + cx }
            })
            .collect();
        Support { offsets, rows }
    }
    fn coeff(&self, e: &[Exponent]) -> Result<C> {
        let mut full = e.to_vec();
        full.insert(self.var, Exponent::int(-1));
        self.inner.coeff_pos(&full)
    }
}

/// e^{y d/dx} applied to a lazy series; `y` is appended as the last variable.
pub(crate) struct Taylor<C> {
    pub inner: Lazy<C>,
    pub x: usize,
    pub y: String,
}

impl<C: Coeff> Generator<C> for Taylor<C> {
    fn vars(&self) -> Vec<String> {
        let mut v = self.inner.vars.clone();
        v.push(self.y.clone());
        v
    }
    fn support(&self) -> Support {
        let s = &self.inner.support;
        let n = s.nvars();
        let mut offsets = s.offsets.clone();
        offsets.push(Exponent::ZERO);
        let mut rows: Vec<Ineq> = s
            .rows
            .iter()
            .map(|row| {
                let mut c = row.coeffs.clone();
                c.push(row.coeffs[self.x]);
                Ineq { coeffs: c, bound: row.bound }
            })
            .collect();
        let mut c = vec![r(0); n + 1];
        c[n] = r(1);
        rows.push(Ineq { coeffs: c, bound: r(0) });
        Support { offsets, rows }
    }
    fn coeff(&self, e: &[Exponent]) -> Result<C> {
        let n = e.len() - 1;
        let k = match e[n].as_integer() {
            Some(k) if k >= 0 => k,
            _ => return Ok(C::zero()),
        };
        let mut src = e[..n].to_vec();
        src[self.x] = src[self.x] + Exponent::int(k);
        let c = binomial(&src[self.x].to_scalar(), k as u64);
        if c.is_zero() {
            return Ok(C::zero());
        }
        Ok(self.inner.coeff_pos(&src)?.scale(&c))
    }
}

pub(crate) fn lazy<C: Coeff, G: Generator<C> + 'static>(g: G) -> Lazy<C> {
    Lazy::new(Arc::new(g))
}
