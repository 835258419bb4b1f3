//! Matrix coefficients of products and iterates of vertex operators, exact
//! rational reconstruction, and the rationality, commutativity and
//! associativity checks.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grading::{pair, BasisId, Vector};
use crate::kernel::{Monomial, Series, Window};
use crate::modules::Module;
use crate::report::{CheckReport, Witness};
use crate::scalar::{binomial_int, Exponent, Scalar};

/// Polynomial in two variables, keyed by (exponent of the first, exponent of the second).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly2(BTreeMap<(u32, u32), Scalar>);

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn constant(c: Scalar) -> Self {
        Poly2::term(0, 0, c)
    }

    pub fn term(i: u32, j: u32, c: Scalar) -> Self {
        let mut p = Poly2::zero();
        p.add_term(i, j, &c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), Scalar)>) -> Self {
        let mut p = Poly2::zero();
        for ((i, j), c) in terms {
            p.add_term(i, j, &c);
        }
        p
    }

    /// a + σ·b.
    pub fn linear(sigma: i64) -> Self {
        Poly2::from_terms([((1, 0), Scalar::one()), ((0, 1), Scalar::from_int(sigma))])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Scalar)> {
        self.0.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Scalar {
        self.0.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry((i, j)).or_default();
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&(i, j));
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.0.keys().map(|(i, j)| i + j).max()
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for ((i, j), c) in &other.0 {
            out.add_term(*i, *j, c);
        }
        out
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> Poly2 {
        Poly2::from_terms(self.0.iter().map(|(k, c)| (*k, c * s)))
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for ((i1, j1), c1) in &self.0 {
            for ((i2, j2), c2) in &other.0 {
                out.add_term(i1 + i2, j1 + j2, &(c1 * c2));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly2 {
        (0..e).fold(Poly2::constant(Scalar::one()), |acc, _| acc.mul(self))
    }

    /// Multiplication by a^i b^j.
    pub fn shift(&self, i: u32, j: u32) -> Poly2 {
        Poly2(self.0.iter().map(|((a, b), c)| ((a + i, b + j), c.clone())).collect())
    }

    /// p(a + σ·b, b).
    pub fn substitute_first(&self, sigma: i64) -> Poly2 {
        let lin = Poly2::linear(sigma);
        let mut out = Poly2::zero();
        for ((i, j), c) in &self.0 {
            out = out.add(&lin.pow(*i).shift(0, *j).scale(c));
        }
        out
    }

    /// Exact quotient by a + σ·b, or `None` if it does not divide.
    pub fn div_linear(&self, sigma: i64) -> Option<Poly2> {
        let mut rem = self.clone();
        let mut quot = Poly2::zero();
        let sigma = Scalar::from_int(sigma);
        loop {
            let lead = rem.0.iter().filter(|((i, _), _)| *i > 0).max_by_key(|((i, j), _)| (*i, *j));
            let Some(((i, j), c)) = lead.map(|(k, c)| (*k, c.clone())) else {
                break;
            };
            quot.add_term(i - 1, j, &c);
            rem.add_term(i, j, &-&c);
            rem.add_term(i - 1, j + 1, &-(&c * &sigma));
        }
        rem.is_zero().then_some(quot)
    }

    fn divide_first(&self) -> Option<Poly2> {
        self.0.keys().all(|(i, _)| *i > 0).then(|| Poly2(self.0.iter().map(|((i, j), c)| ((i - 1, *j), c.clone())).collect()))
    }

    fn divide_second(&self) -> Option<Poly2> {
        self.0.keys().all(|(_, j)| *j > 0).then(|| Poly2(self.0.iter().map(|((i, j), c)| ((*i, j - 1), c.clone())).collect()))
    }

    pub fn eval(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.0
            .iter()
            .map(|((i, j), c)| {
                let ai = a.powi(*i as i64).expect("nonnegative power");
                let bj = b.powi(*j as i64).expect("nonnegative power");
                &(c * &ai) * &bj
            })
            .sum()
    }

    /// First monomial where the two polynomials differ.
    pub fn first_difference(&self, other: &Poly2) -> Option<((u32, u32), Scalar, Scalar)> {
        let d = self.sub(other);
        d.0.keys().next().map(|&(i, j)| ((i, j), self.coeff(i, j), other.coeff(i, j)))
    }

    pub fn render(&self, a: &str, b: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|((i, j), c)| {
                let m = Monomial::ints(&[(a, *i as i64), (b, *j as i64)]);
                if m.is_one() {
                    format!("{c}")
                } else if c.is_one() {
                    format!("{m}")
                } else {
                    format!("({c})*{m}")
                }
            })
            .collect();
        parts.join(" + ")
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.0.iter().map(|((i, j), c)| json!([i, j, c.to_json()])).collect())
    }

    pub fn from_json(v: &Value) -> Result<Poly2> {
        let rows = v.as_array().ok_or_else(|| Error::Schema("polynomial must be a list of [i, j, coeff]".into()))?;
        let mut p = Poly2::zero();
        for row in rows {
            let r = row.as_array().filter(|r| r.len() == 3).ok_or_else(|| Error::Schema(format!("bad polynomial term {row}")))?;
            let exp = |x: &Value| {
                x.as_u64().and_then(|e| u32::try_from(e).ok()).ok_or_else(|| Error::Schema(format!("bad exponent {x}")))
            };
            p.add_term(exp(&r[0])?, exp(&r[1])?, &Scalar::from_json(&r[2])?);
        }
        Ok(p)
    }
}

/// The mixed linear factor of the denominator: a − b or a + b.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mixed {
    Difference,
    Sum,
}

impl Mixed {
    pub fn sign(self) -> i64 {
        match self {
            Mixed::Difference => -1,
            Mixed::Sum => 1,
        }
    }
}

/// g(a, b) / (a^r b^s (a ± b)^t), kept with minimal pole orders.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFn {
    pub vars: [String; 2],
    pub mixed: Mixed,
    pub g: Poly2,
    pub r: i64,
    pub s: i64,
    pub t: i64,
}

impl RationalFn {
    /// g(x1, x2) / (x1^r x2^s (x1 − x2)^t).
    pub fn new(g: Poly2, r: i64, s: i64, t: i64) -> Self {
        RationalFn::with_form(["x1", "x2"], Mixed::Difference, g, r, s, t)
    }

    /// k(x0, x2) / (x0^r x2^s (x0 + x2)^t), the shape of iterate coefficients.
    pub fn iterate(k: Poly2, r: i64, s: i64, t: i64) -> Self {
        RationalFn::with_form(["x0", "x2"], Mixed::Sum, k, r, s, t)
    }

    pub fn with_form(vars: [&str; 2], mixed: Mixed, g: Poly2, r: i64, s: i64, t: i64) -> Self {
        let mut f = RationalFn { vars: vars.map(String::from), mixed, g, r, s, t };
        f.normalize();
        f
    }

    fn normalize(&mut self) {
        if self.g.is_zero() {
            (self.r, self.s, self.t) = (0, 0, 0);
            return;
        }
        if self.r < 0 {
            self.g = self.g.shift(-self.r as u32, 0);
            self.r = 0;
        }
        if self.s < 0 {
            self.g = self.g.shift(0, -self.s as u32);
            self.s = 0;
        }
        if self.t < 0 {
            self.g = self.g.mul(&Poly2::linear(self.mixed.sign()).pow(-self.t as u32));
            self.t = 0;
        }
        while self.r > 0 {
            let Some(q) = self.g.divide_first() else { break };
            self.g = q;
            self.r -= 1;
        }
        while self.s > 0 {
            let Some(q) = self.g.divide_second() else { break };
            self.g = q;
            self.s -= 1;
        }
        while self.t > 0 {
            let Some(q) = self.g.div_linear(self.mixed.sign()) else { break };
            self.g = q;
            self.t -= 1;
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.r == 0 && self.s == 0 && self.t == 0
    }

    /// Value at a point; `PoleHit` where the denominator vanishes.
    pub fn eval(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        let sigma = Scalar::from_int(self.mixed.sign());
        let mixed = a + &(&sigma * b);
        let den = [(a, self.r), (b, self.s), (&mixed, self.t)]
            .into_iter()
            .map(|(x, e)| if e == 0 { Some(Scalar::one()) } else { x.powi(e) })
            .try_fold(Scalar::one(), |acc, f| f.map(|f| &acc * &f))
            .ok_or(Error::PoleHit)?;
        if den.is_zero() {
            return Err(Error::PoleHit);
        }
        Ok(&self.g.eval(a, b) / &den)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "g": self.g.to_json(),
            "r": self.r,
            "s": self.s,
            "t": self.t,
            "vars": self.vars,
            "mixed": match self.mixed { Mixed::Difference => "difference", Mixed::Sum => "sum" },
        })
    }

    pub fn from_json(v: &Value) -> Result<RationalFn> {
        let int = |k: &str| v.get(k).and_then(Value::as_i64).ok_or_else(|| Error::Schema(format!("rational function needs integer {k}")));
        let g = Poly2::from_json(v.get("g").ok_or_else(|| Error::Schema("rational function needs g".into()))?)?;
        let mixed = match v.get("mixed").and_then(Value::as_str) {
            None | Some("difference") => Mixed::Difference,
            Some("sum") => Mixed::Sum,
            Some(other) => return Err(Error::Schema(format!("unknown mixed factor {other}"))),
        };
        let vars = match v.get("vars") {
            None => match mixed {
                Mixed::Difference => ["x1".to_string(), "x2".to_string()],
                Mixed::Sum => ["x0".to_string(), "x2".to_string()],
            },
            Some(vs) => {
                let names: Vec<String> = serde_json::from_value(vs.clone())?;
                <[String; 2]>::try_from(names).map_err(|_| Error::Schema("vars must name two variables".into()))?
            }
        };
        let [a, b] = [vars[0].as_str(), vars[1].as_str()];
        Ok(RationalFn::with_form([a, b], mixed, g, int("r")?, int("s")?, int("t")?))
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = [&self.vars[0], &self.vars[1]];
        write!(f, "({})", self.g.render(a, b))?;
        if self.is_polynomial() {
            return Ok(());
        }
        let op = if self.mixed == Mixed::Difference { '-' } else { '+' };
        write!(f, " / ({a}^{} {b}^{} ({a}{op}{b})^{})", self.r, self.s, self.t)
    }
}

/// Expansion direction: ι_ab keeps finitely many negative powers of b.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    I12,
    I21,
    I20,
    I02,
}

impl Region {
    /// Variables of the rational function, in its own order.
    pub fn vars(self) -> [&'static str; 2] {
        match self {
            Region::I12 | Region::I21 => ["x1", "x2"],
            Region::I20 | Region::I02 => ["x0", "x2"],
        }
    }

    /// Whether the expansion is in nonnegative powers of the second variable.
    fn second_is_small(self) -> bool {
        matches!(self, Region::I12 | Region::I02)
    }

    pub fn mixed(self) -> Mixed {
        match self {
            Region::I12 | Region::I21 => Mixed::Difference,
            Region::I20 | Region::I02 => Mixed::Sum,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Region::I12 => "i12",
            Region::I21 => "i21",
            Region::I20 => "i20",
            Region::I02 => "i02",
        }
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Region> {
        match s {
            "i12" => Ok(Region::I12),
            "i21" => Ok(Region::I21),
            "i20" => Ok(Region::I20),
            "i02" => Ok(Region::I02),
            _ => Err(Error::Schema(format!("unknown region {s}"))),
        }
    }
}

type Grid = BTreeMap<(i64, i64), Scalar>;

#[derive(Clone, Copy, Debug)]
struct Rect {
    a: (i64, i64),
    b: (i64, i64),
}

impl Rect {
    fn of(window: &Window, vars: [&str; 2]) -> Result<Rect> {
        let get = |v: &str| {
            window
                .var_bounds(v)
                .map(|(lo, hi)| (lo.ceil().to_integer(), hi.floor().to_integer()))
                .ok_or_else(|| Error::Schema(format!("window must bound {v}")))
        };
        Ok(Rect { a: get(vars[0])?, b: get(vars[1])? })
    }

    fn contains(&self, p: i64, q: i64) -> bool {
        (self.a.0..=self.a.1).contains(&p) && (self.b.0..=self.b.1).contains(&q)
    }
}

fn check_region(f: &RationalFn, region: Region) -> Result<()> {
    if f.mixed != region.mixed() || f.vars != region.vars().map(String::from) {
        return Err(Error::Schema(format!("region {} does not match variables of {f}", region.name())));
    }
    Ok(())
}

fn iota_grid(f: &RationalFn, region: Region, rect: Rect) -> Grid {
    let sigma = Scalar::from_int(f.mixed.sign());
    let small_second = region.second_is_small();
    // (a + σb)^{−t} = σ^t (b + σa)^{−t} when a is the small variable
    let pref = if !small_second && f.t % 2 != 0 { sigma.clone() } else { Scalar::one() };
    let mut out = Grid::new();
    for ((i, j), c) in f.g.terms() {
        let (i, j) = (*i as i64, *j as i64);
        let mut sig_n = Scalar::one();
        for n in 0i64.. {
            if f.t == 0 && n > 0 {
                break;
            }
            let (p, q) = if small_second {
                (i - f.r - f.t - n, j - f.s + n)
            } else {
                (i - f.r + n, j - f.s - f.t - n)
            };
            let (small, big) = if small_second { (q, p) } else { (p, q) };
            let (small_hi, big_lo) = if small_second { (rect.b.1, rect.a.0) } else { (rect.a.1, rect.b.0) };
            if small > small_hi || big < big_lo {
                break;
            }
            if rect.contains(p, q) {
                let coeff = &(&(c * &pref) * &binomial_int(-f.t, n as u64)) * &sig_n;
                let slot = out.entry((p, q)).or_default();
                *slot += &coeff;
            }
            sig_n = &sig_n * &sigma;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn grid_to_series(grid: &Grid, vars: [&str; 2]) -> Series {
    Series::from_terms(grid.iter().map(|((p, q), c)| (Monomial::ints(&[(vars[0], *p), (vars[1], *q)]), c.clone())))
}

fn series_to_grid(series: &Series, vars: [&str; 2], window: &Window) -> Result<Grid> {
    let mut out = Grid::new();
    for (m, c) in series.materialize(window)? {
        let mut pq = [0i64; 2];
        for (v, e) in m.pairs() {
            let slot = vars.iter().position(|x| x == v).ok_or(Error::NoFit)?;
            pq[slot] = e.as_integer().ok_or(Error::NoFit)?;
        }
        out.insert((pq[0], pq[1]), c);
    }
    Ok(out)
}

/// Expansion of `f` in the given region, truncated to the window.
pub fn iota_expand(f: &RationalFn, region: Region, window: &Window) -> Result<Series> {
    check_region(f, region)?;
    let rect = Rect::of(window, region.vars())?;
    Ok(grid_to_series(&iota_grid(f, region, rect), region.vars()))
}

/// Caller-supplied degree bounds for reconstruction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FitBounds {
    pub r: i64,
    pub s: i64,
    pub t: i64,
    pub deg: i64,
}

impl FitBounds {
    pub const DEFAULT: FitBounds = FitBounds { r: 2, s: 2, t: 2, deg: 4 };

    /// Numerator degree after clearing the largest allowed denominator.
    pub fn cleared_degree(&self) -> i64 {
        self.deg + self.r + self.s + self.t
    }

    fn doubled(&self) -> FitBounds {
        let d = |x: i64| (2 * x).max(1);
        FitBounds { r: d(self.r), s: d(self.s), t: d(self.t), deg: d(self.deg) }
    }

    fn admits(&self, f: &RationalFn) -> bool {
        f.r <= self.r && f.s <= self.s && f.t <= self.t && f.g.degree().map_or(true, |d| d as i64 <= self.deg)
    }
}

impl Default for FitBounds {
    fn default() -> Self {
        FitBounds::DEFAULT
    }
}

impl FromStr for FitBounds {
    type Err = Error;

    fn from_str(s: &str) -> Result<FitBounds> {
        let parts: Vec<i64> = s
            .split(',')
            .map(|p| p.trim().parse::<i64>().map_err(|_| Error::Schema(format!("bad bounds {s}; expected r,s,t,deg"))))
            .collect::<Result<_>>()?;
        match parts[..] {
            [r, s, t, deg] if r >= 0 && s >= 0 && t >= 0 && deg >= 0 => Ok(FitBounds { r, s, t, deg }),
            _ => Err(Error::Schema(format!("bad bounds {s}; expected four nonnegative integers r,s,t,deg"))),
        }
    }
}

fn fit_grid(grid: &Grid, region: Region, bounds: FitBounds, rect: Rect) -> Result<RationalFn> {
    let FitBounds { r, s, t, deg: _ } = bounds;
    let n = bounds.cleared_degree();
    let sigma = region.mixed().sign();
    // ι(F)·a^r b^s (a + σb)^t is the numerator g, whatever the region
    let den: Vec<(i64, i64, Scalar)> = (0..=t)
        .map(|k| (r + t - k, s + k, &binomial_int(t, k as u64) * &Scalar::from_int(sigma.pow(k as u32))))
        .collect();
    let (p_lo, p_hi) = (rect.a.0 + r + t, rect.a.1 + r);
    let (q_lo, q_hi) = (rect.b.0 + s + t, rect.b.1 + s);
    if p_lo > 0 || q_lo > 0 || p_hi < n || q_hi < n {
        return Err(Error::AmbiguousFit);
    }
    let mut g = Poly2::zero();
    for p in p_lo..=p_hi {
        for q in q_lo..=q_hi {
            let mut acc = Scalar::zero();
            for (da, db, c) in &den {
                if let Some(x) = grid.get(&(p - da, q - db)) {
                    acc += &(c * x);
                }
            }
            if acc.is_zero() {
                continue;
            }
            if p < 0 || q < 0 || p + q > n {
                return Err(Error::NoFit);
            }
            g.add_term(p as u32, q as u32, &acc);
        }
    }
    let vars = region.vars();
    let f = RationalFn::with_form(vars, region.mixed(), g, r, s, t);
    if !bounds.admits(&f) || iota_grid(&f, region, rect) != *grid {
        return Err(Error::NoFit);
    }
    Ok(f)
}

/// The unique rational function within `bounds` whose expansion in `region`
/// agrees with `series` on the window.
pub fn reconstruct_rational(series: &Series, region: Region, bounds: FitBounds, window: &Window) -> Result<RationalFn> {
    let rect = Rect::of(window, region.vars())?;
    let grid = series_to_grid(series, region.vars(), window)?;
    fit_grid(&grid, region, bounds, rect)
}

/// Like [`reconstruct_rational`], doubling the bounds after each failed fit
/// until some bound exceeds `cap`.
pub fn reconstruct_escalating(
    series: &Series,
    region: Region,
    bounds: FitBounds,
    window: &Window,
    cap: i64,
) -> Result<(RationalFn, FitBounds)> {
    let rect = Rect::of(window, region.vars())?;
    let grid = series_to_grid(series, region.vars(), window)?;
    let mut b = bounds;
    loop {
        match fit_grid(&grid, region, b, rect) {
            Ok(f) => return Ok((f, b)),
            Err(Error::NoFit) => {
                let next = b.doubled();
                if [next.r, next.s, next.t, next.deg].iter().any(|x| *x > cap) {
                    return Err(Error::NoFit);
                }
                b = next;
            }
            Err(Error::AmbiguousFit) if b != bounds => return Err(Error::NoFit),
            Err(e) => return Err(e),
        }
    }
}

/// Which composition of vertex operators a matrix coefficient is taken of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffKind {
    /// ⟨w′, Y(v1, x1) Y(v2, x2) w⟩
    Product,
    /// ⟨w′, Y(v2, x2) Y(v1, x1) w⟩
    Reversed,
    /// ⟨w′, Y(Y(v1, x0) v2, x2) w⟩
    Iterate,
    /// ⟨w′, Y(v1, x0 + x2) Y(v2, x2) w⟩
    IterateShifted,
}

impl CoeffKind {
    pub fn vars(self) -> [&'static str; 2] {
        match self {
            CoeffKind::Product | CoeffKind::Reversed => ["x1", "x2"],
            CoeffKind::Iterate | CoeffKind::IterateShifted => ["x0", "x2"],
        }
    }
}

impl FromStr for CoeffKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<CoeffKind> {
        match s {
            "product" => Ok(CoeffKind::Product),
            "reversed" => Ok(CoeffKind::Reversed),
            "iterate" => Ok(CoeffKind::Iterate),
            "iterate_shifted" => Ok(CoeffKind::IterateShifted),
            _ => Err(Error::Schema(format!("unknown matrix coefficient kind {s}"))),
        }
    }
}

/// Windowed matrix coefficient ⟨w′, …⟩ of the requested composition on the module.
pub fn matrix_coeff(
    m: &Module,
    kind: CoeffKind,
    wprime: &Vector,
    v1: &Vector,
    v2: &Vector,
    w: &Vector,
    window: &Window,
) -> Result<Series> {
    let rect = Rect::of(window, kind.vars())?;
    let va = m.algebra.bound();
    let wa = m.bound();
    let mut grid = Grid::new();
    let mut put = |p: i64, q: i64, c: Scalar| {
        if !c.is_zero() {
            grid.insert((p, q), c);
        }
    };
    match kind {
        CoeffKind::Product => {
            for q in rect.b.0..=rect.b.1 {
                let x = wa.apply_vec(v2, -q - 1, w)?;
                if x.is_empty() {
                    continue;
                }
                for p in rect.a.0..=rect.a.1 {
                    put(p, q, pair(wprime, &wa.apply_vec(v1, -p - 1, &x)?));
                }
            }
        }
        CoeffKind::Reversed => {
            for p in rect.a.0..=rect.a.1 {
                let x = wa.apply_vec(v1, -p - 1, w)?;
                if x.is_empty() {
                    continue;
                }
                for q in rect.b.0..=rect.b.1 {
                    put(p, q, pair(wprime, &wa.apply_vec(v2, -q - 1, &x)?));
                }
            }
        }
        CoeffKind::Iterate => {
            for p in rect.a.0..=rect.a.1 {
                let u = va.apply_vec(v1, -p - 1, v2)?;
                if u.is_empty() {
                    continue;
                }
                for q in rect.b.0..=rect.b.1 {
                    put(p, q, pair(wprime, &wa.apply_vec(&u, -q - 1, w)?));
                }
            }
        }
        CoeffKind::IterateShifted => {
            // coefficient of x0^a x2^b is Σ_k C(a+k, k) ⟨w′, v1_{−a−1−k} v2_{k−b−1} w⟩
            let mut top: Option<i64> = None;
            for (id, _) in w.iter() {
                let r = wa.range_vec(v2, *id)?;
                if r.is_empty() {
                    continue;
                }
                let hi = r.hi.ok_or_else(|| {
                    Error::UndefinedProduct("modes of v2 on w are not bounded above; the shifted iterate has infinite sums".into())
                })?;
                top = Some(top.map_or(hi, |t: i64| t.max(hi)));
            }
            let Some(top) = top else {
                return Ok(Series::zero());
            };
            let mut inner: BTreeMap<i64, Vector> = BTreeMap::new();
            for b in rect.b.0..=rect.b.1 {
                for a in rect.a.0..=rect.a.1 {
                    let mut acc = Scalar::zero();
                    for k in 0..=(top + b + 1).max(-1) {
                        let n = k - b - 1;
                        if !inner.contains_key(&n) {
                            inner.insert(n, wa.apply_vec(v2, n, w)?);
                        }
                        let x = &inner[&n];
                        if x.is_empty() {
                            continue;
                        }
                        let y = wa.apply_vec(v1, -a - 1 - k, x)?;
                        acc += &(&binomial_int(a + k, k as u64) * &pair(wprime, &y));
                    }
                    put(a, b, acc);
                }
            }
        }
    }
    Ok(grid_to_series(&grid, kind.vars()))
}

/// Polynomial identity f(x1, x2) = h(x1 − x2, x2) after clearing denominators;
/// returns the first differing coefficient.
pub fn associativity_difference(f: &RationalFn, h: &RationalFn) -> Result<Option<((u32, u32), Scalar, Scalar)>> {
    if f.mixed != Mixed::Difference || h.mixed != Mixed::Sum {
        return Err(Error::Schema("associativity compares a product function with an iterate function".into()));
    }
    let diff = Poly2::linear(-1);
    let lhs = f.g.mul(&diff.pow(h.r as u32)).shift(h.t as u32, h.s as u32);
    let rhs = h.g.substitute_first(-1).mul(&diff.pow(f.t as u32)).shift(f.r as u32, f.s as u32);
    Ok(lhs.first_difference(&rhs))
}

fn series_witness(inputs: &str, a: &Series, b: &Series, window: &Window) -> Result<Option<Witness>> {
    Ok(a.first_difference(b, window)?.map(|(m, l, r)| Witness::new(inputs, Some(m.to_string()), l, r)))
}

/// The five duality assertions for one choice of vectors.
pub fn check_duality(
    m: &Module,
    wprime: &Vector,
    v1: &Vector,
    v2: &Vector,
    w: &Vector,
    window: i64,
    bounds: FitBounds,
) -> CheckReport {
    let mut report = CheckReport::new(format!("duality on {}", m.name));
    let inputs = format!("w'={wprime}, v1={v1}, v2={v2}, w={w}");
    let win12 = Window::uniform(&["x1", "x2"], -window, window);
    let win02 = Window::uniform(&["x0", "x2"], -window, window);
    let cap = 4 * window.max(1);
    let detail = format!("window ±{window}, bounds r,s,t,deg = {},{},{},{}", bounds.r, bounds.s, bounds.t, bounds.deg);
    let coeff = |kind, win: &Window| matrix_coeff(m, kind, wprime, v1, v2, w, win);

    let f = coeff(CoeffKind::Product, &win12)
        .and_then(|s| reconstruct_escalating(&s, Region::I12, bounds, &win12, cap).map(|(f, _)| f));
    match &f {
        Ok(f) => report.pass("rationality_of_products", format!("f = {f}")),
        Err(e) => report.fail("rationality_of_products", detail.clone(), Witness::from_error(&inputs, e)),
    }

    match &f {
        Ok(f) => {
            let outcome = (|| {
                let rev = coeff(CoeffKind::Reversed, &win12)?;
                if let Some(wit) = series_witness(&inputs, &rev, &iota_expand(f, Region::I21, &win12)?, &win12)? {
                    return Ok(Some(wit));
                }
                let (g, _) = reconstruct_escalating(&rev, Region::I21, bounds, &win12, cap)?;
                Ok((g != *f).then(|| Witness::new(&inputs, None, format!("from reversed product: {g}"), format!("from product: {f}"))))
            })();
            report.record("commutativity", format!("reversed product = ι21 f on {detail}"), outcome);
        }
        Err(_) => report.fail("commutativity", "needs f", Witness::new(&inputs, None, "no rational function for the product", "-")),
    }

    let h = coeff(CoeffKind::Iterate, &win02)
        .and_then(|s| reconstruct_escalating(&s, Region::I20, bounds, &win02, cap).map(|(h, _)| h));
    match &h {
        Ok(h) => report.pass("rationality_of_iterates", format!("h = {h}")),
        Err(e) => report.fail("rationality_of_iterates", detail.clone(), Witness::from_error(&inputs, e)),
    }

    match (&f, &h) {
        (Ok(f), Ok(h)) => {
            let outcome = associativity_difference(f, h).map(|d| {
                d.map(|((i, j), l, r)| {
                    Witness::new(&inputs, Some(Monomial::ints(&[("x1", i as i64), ("x2", j as i64)]).to_string()), l, r)
                })
            });
            report.record("associativity", "f(x1, x2) = h(x1 − x2, x2) as polynomials after clearing denominators", outcome);
        }
        _ => report.fail("associativity", "needs f and h", Witness::new(&inputs, None, "missing rational function", "-")),
    }

    match &h {
        Ok(h) => {
            let outcome = (|| {
                let shifted = coeff(CoeffKind::IterateShifted, &win02)?;
                series_witness(&inputs, &shifted, &iota_expand(h, Region::I02, &win02)?, &win02)
            })();
            report.record("iterate_shifted", format!("shifted iterate = ι02 h on {detail}"), outcome);
        }
        Err(_) => report.fail("iterate_shifted", "needs h", Witness::new(&inputs, None, "no rational function for the iterate", "-")),
    }
    report
}

/// Partial sum of a windowed series at a point.
pub fn eval_partial(series: &Series, assignments: &[(&str, Scalar)], window: &Window) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for (m, c) in series.materialize(window)? {
        let mut term = c;
        for (v, e) in m.pairs() {
            let z = assignments
                .iter()
                .find(|(name, _)| name == v)
                .map(|(_, z)| z)
                .ok_or_else(|| Error::Eval(format!("no value assigned to {v}")))?;
            let e = e.as_integer().ok_or_else(|| Error::Eval(format!("non-integral power of {v}")))?;
            term = &term * &z.powi(e).ok_or(Error::PoleHit)?;
        }
        acc += &term;
    }
    Ok(acc)
}

/// Sum of the terms of ι f whose small-variable exponent is at most `order`.
pub fn partial_sum(f: &RationalFn, region: Region, point: (&Scalar, &Scalar), order: i64) -> Result<Scalar> {
    check_region(f, region)?;
    let spread = f.r.abs() + f.s.abs() + f.t.abs() + f.g.degree().unwrap_or(0) as i64 + 1;
    let small = (-spread, order);
    let big = (-spread - order, spread);
    let vars = region.vars();
    let (wa, wb) = if region.second_is_small() { (big, small) } else { (small, big) };
    let window = Window::new().bound(vars[0], wa.0, wa.1.max(wa.0)).bound(vars[1], wb.0, wb.1.max(wb.0));
    let series = iota_expand(f, region, &window)?;
    eval_partial(&series, &[(vars[0], point.0.clone()), (vars[1], point.1.clone())], &window)
}

/// Partial sums of ι f at a point against the exact value, for each order N,
/// with |error| ≤ bound(N) required.
pub fn convergence_report(
    f: &RationalFn,
    region: Region,
    point: (&Scalar, &Scalar),
    orders: &[i64],
    bound: impl Fn(i64) -> Scalar,
) -> CheckReport {
    let mut report = CheckReport::new(format!("convergence of {} {f}", region.name()));
    let inputs = format!("({}, {}) = ({}, {})", region.vars()[0], region.vars()[1], point.0, point.1);
    for &n in orders {
        let name = format!("order_{n}");
        let outcome = (|| {
            let value = f.eval(point.0, point.1)?;
            let partial = partial_sum(f, region, point, n)?;
            let err = &partial - &value;
            let tol = bound(n);
            Ok((err.norm_sqr() > tol.norm_sqr()).then(|| Witness::new(&inputs, None, format!("|{partial} - {value}|"), format!("<= {tol}"))))
        })();
        report.record(&name, format!("partial sum within bound at order {n}"), outcome);
    }
    report
}

fn pz_sides(
    m: &Module,
    z: &Scalar,
    ids: (BasisId, BasisId, BasisId, BasisId),
    a: i64,
    b: i64,
) -> Result<(Scalar, Scalar, Scalar)> {
    let (v, w1, w2, wp) = ids;
    let va = m.algebra.bound();
    let wa = m.bound();
    let zero = || (Scalar::zero(), Scalar::zero(), Scalar::zero());
    let total = m.algebra.space.weight(v)? + m.algebra.space.weight(w1)? + m.space.weight(w2)? - m.space.weight(wp)?;
    let Some(kk) = total.as_integer() else {
        return Ok(zero());
    };
    let zpow = |e: i64| z.powi(e).expect("z is nonzero");
    let minus_one = |e: i64| Scalar::from_int(if e.rem_euclid(2) == 0 { 1 } else { -1 });
    let hi = |r: crate::action::ModeRange| -> Result<Option<i64>> {
        if r.is_empty() {
            return Ok(None);
        }
        r.hi.map(Some).ok_or_else(|| Error::UndefinedProduct("modes are not bounded above".into()))
    };
    let wvec = Vector::basis(w2);
    let n = -a - 1;

    // x0^{-1} δ((x1 − z)/x0) Y(v, x1) Y(w1, z) w2
    let mut lhs = Scalar::zero();
    if let Some(qmax) = hi(wa.range(w1, w2)?)? {
        let k_end = qmax - (kk - n + b - 1);
        let k_end = if n >= 0 { k_end.min(n) } else { k_end };
        for k in 0..=k_end {
            let p = n - k - b - 1;
            let q = kk - p - 2;
            let inner = wa.apply(w1, q, &wvec)?;
            if inner.is_empty() {
                continue;
            }
            let c = &(&binomial_int(n, k as u64) * &(&minus_one(k) * &zpow(k))) * &zpow(-q - 1);
            lhs += &(&c * &pair(&Vector::basis(wp), &wa.apply(v, p, &inner)?));
        }
    }

    // z^{-1} δ((x1 − x0)/z) Y(Y(v, x0) w1, z) w2
    let mut rhs1 = Scalar::zero();
    if let Some(mmax) = hi(va.range(v, w1)?)? {
        for mm in (-a - 1)..=mmax {
            let k = a + mm + 1;
            let nn = b + k;
            let q = kk - mm - 2;
            let u = va.apply(v, mm, &Vector::basis(w1))?;
            if u.is_empty() {
                continue;
            }
            let c = &(&binomial_int(nn, k as u64) * &minus_one(k)) * &(&zpow(-nn - 1) * &zpow(-q - 1));
            rhs1 += &(&c * &pair(&Vector::basis(wp), &wa.apply_vec(&u, q, &wvec)?));
        }
    }

    // x0^{-1} δ((z − x1)/(−x0)) Y(w1, z) Y(v, x1) w2
    let mut rhs2 = Scalar::zero();
    if let Some(pmax) = hi(wa.range(v, w2)?)? {
        let k_end = pmax + b + 1;
        let k_end = if n >= 0 { k_end.min(n) } else { k_end };
        for k in 0..=k_end {
            let p = k - b - 1;
            let q = kk - p - 2;
            let inner = wa.apply(v, p, &wvec)?;
            if inner.is_empty() {
                continue;
            }
            let c = &(&(&binomial_int(n, k as u64) * &zpow(n - k)) * &minus_one(k + a + 1)) * &zpow(-q - 1);
            rhs2 += &(&c * &pair(&Vector::basis(wp), &wa.apply(w1, q, &inner)?));
        }
    }
    Ok((lhs, rhs1, rhs2))
}

/// The P(z)-intertwining-map Jacobi identity for I(w1 ⊗ w2) = Y_W(w1, z) w2,
/// paired with every basis functional of weight at most the window and
/// compared on all x0^a x1^b with |a|, |b| ≤ window.
pub fn check_pz_from_module(m: &Module, z: &Scalar, v: &Vector, w1: &Vector, w2: &Vector, window: i64) -> CheckReport {
    let mut report = CheckReport::new(format!("P(z) Jacobi identity on {}", m.name));
    let inputs = format!("z={z}, v={v}, w1={w1}, w2={w2}");
    let name = "pz_jacobi";
    if !(z.is_real() && z.re > num_rational::BigRational::from_integer(0.into())) {
        report.fail(name, "z must be a positive rational", Witness::new(&inputs, None, z, "> 0"));
        return report;
    }
    if !m.is_graded() {
        report.fail(name, "needs a graded module", Witness::new(&inputs, None, "ungraded", "graded"));
        return report;
    }
    let lo = m.space.min_weight().map_or(-window, |w| w.floor().to_integer());
    let functionals = m.space.basis_in_weights(lo, window.max(lo));
    let outcome = (|| {
        let mut count = 0usize;
        for wp in &functionals {
            for a in -window..=window {
                for b in -window..=window {
                    let mut sides = (Scalar::zero(), Scalar::zero(), Scalar::zero());
                    for (iv, cv) in v.iter() {
                        for (i1, c1) in w1.iter() {
                            for (i2, c2) in w2.iter() {
                                let c = &(cv * c1) * c2;
                                let (l, r1, r2) = pz_sides(m, z, (*iv, *i1, *i2, wp.id), a, b)?;
                                sides.0 += &(&c * &l);
                                sides.1 += &(&c * &r1);
                                sides.2 += &(&c * &r2);
                            }
                        }
                    }
                    count += 1;
                    let rhs = &sides.1 + &sides.2;
                    if sides.0 != rhs {
                        let mono = Monomial::ints(&[("x0", a), ("x1", b)]);
                        return Ok((Some(Witness::new(format!("{inputs}, w'={}*", m.space.name(wp.id)), Some(mono.to_string()), &sides.0, rhs)), count));
                    }
                }
            }
        }
        Ok((None, count))
    })();
    match outcome {
        Ok((None, count)) => report.pass(name, format!("{count} coefficients (x0, x1 exponents within ±{window}) at z = {z}")),
        Ok((Some(w), _)) => report.fail(name, format!("window ±{window} at z = {z}"), w),
        Err(e) => report.fail(name, format!("window ±{window} at z = {z}"), Witness::from_error(&inputs, &e)),
    }
    report
}

/// Weight of a homogeneous vector, if it is homogeneous.
pub fn homogeneous_weight(m: &Module, v: &Vector) -> Option<Exponent> {
    let mut wt = None;
    for (id, _) in v.iter() {
        let w = m.space.weight(*id).ok()?;
        if wt.is_some_and(|x| x != w) {
            return None;
        }
        wt = Some(w);
    }
    wt
}
