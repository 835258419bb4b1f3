//! Vertex algebras (plain, Möbius, conformal) given by mode maps, and their axiom suite.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde_json::{json, Value};

use num_traits::Signed;
use crate::action::{apply_op, weight_window_range, ModeMap, ModeRange, Operator};
use crate::error::{Error, Result};
use crate::grading::{audit_space, BasisId, GroupElement, Space, Vector};
use crate::kernel::{Monomial, Series, Window};
use crate::modules::{self, Module};
use crate::report::{CheckReport, Witness};
use crate::scalar::{binomial_int, Exponent, Scalar};

/// The operators L(−1), L(0), L(1).
#[derive(Clone)]
pub struct Sl2 {
    pub lm1: Arc<dyn Operator>,
    pub l0: Arc<dyn Operator>,
    pub lp1: Arc<dyn Operator>,
}

impl Sl2 {
    pub fn get(&self, j: i64) -> Option<Arc<dyn Operator>> {
        match j {
            -1 => Some(self.lm1.clone()),
            0 => Some(self.l0.clone()),
            1 => Some(self.lp1.clone()),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "mobius",
            "L(-1)": self.lm1.describe(),
            "L(0)": self.l0.describe(),
            "L(1)": self.lp1.describe(),
        })
    }
}

#[derive(Clone)]
pub enum AlgebraKind {
    /// A vertex algebra with no sl(2) or Virasoro data.
    Plain,
    Mobius(Sl2),
    Conformal { omega: Vector, central_charge: Scalar },
}

impl AlgebraKind {
    pub fn name(&self) -> &'static str {
        match self {
            AlgebraKind::Plain => "plain",
            AlgebraKind::Mobius(_) => "mobius",
            AlgebraKind::Conformal { .. } => "conformal",
        }
    }

    pub fn is_graded(&self) -> bool {
        !matches!(self, AlgebraKind::Plain)
    }
}

pub struct VertexAlgebra {
    pub name: String,
    pub space: Arc<Space>,
    pub action: Arc<dyn ModeMap>,
    pub vacuum: Vector,
    pub kind: AlgebraKind,
}

/// L(n) = ω_{n+1} on a module, or any fixed vector's mode acting as an operator.
pub struct ModeOperator {
    pub map: Arc<dyn ModeMap>,
    pub vector: Vector,
    pub n: i64,
}

impl Operator for ModeOperator {
    fn apply_basis(&self, id: BasisId) -> Result<Vector> {
        let mut out = Vector::zero();
        for (i, c) in self.vector.iter() {
            out.add_scaled(&self.map.mode(*i, id, self.n)?, c);
        }
        Ok(out)
    }
    fn describe(&self) -> Value {
        json!({ "mode_of": self.vector.to_json(), "n": self.n })
    }
}

/// v ↦ v_{−2}𝟏, the derivation of a plain vertex algebra.
struct VacuumDerivation {
    map: Arc<dyn ModeMap>,
    vacuum: Vector,
}

impl Operator for VacuumDerivation {
    fn apply_basis(&self, id: BasisId) -> Result<Vector> {
        let mut out = Vector::zero();
        for (i, c) in self.vacuum.iter() {
            out.add_scaled(&self.map.mode(id, *i, -2)?, c);
        }
        Ok(out)
    }
    fn describe(&self) -> Value {
        json!("vacuum_derivation")
    }
}

impl VertexAlgebra {
    pub fn bound(&self) -> BoundAction {
        BoundAction {
            map: self.action.clone(),
            source: self.space.clone(),
            target: self.space.clone(),
            graded: self.kind.is_graded(),
            opposite: false,
        }
    }

    /// L(j) for j ∈ {−1, 0, 1} (any j in the conformal case).
    pub fn l(&self, j: i64) -> Option<Arc<dyn Operator>> {
        match &self.kind {
            AlgebraKind::Plain => None,
            AlgebraKind::Mobius(s) => s.get(j),
            AlgebraKind::Conformal { omega, .. } => Some(Arc::new(ModeOperator {
                map: self.action.clone(),
                vector: omega.clone(),
                n: j + 1,
            })),
        }
    }

    /// The translation operator: L(−1) when present, otherwise v ↦ v_{−2}𝟏.
    pub fn derivation(&self) -> Arc<dyn Operator> {
        self.l(-1).unwrap_or_else(|| {
            Arc::new(VacuumDerivation { map: self.action.clone(), vacuum: self.vacuum.clone() })
        })
    }

    pub fn check_id(&self, id: BasisId) -> Result<()> {
        if self.space.basis(id).is_none() {
            return Err(Error::Schema(format!("{}: no basis vector with id {id}", self.name)));
        }
        Ok(())
    }

    /// Integral weight of a basis vector.
    pub fn int_weight(&self, id: BasisId) -> Result<i64> {
        self.space
            .weight(id)?
            .as_integer()
            .ok_or_else(|| Error::Eval(format!("weight of {} is not an integer", self.space.name(id))))
    }

    /// Y(u,x)v = Σ (u_n v) x^{−n−1} on the exponent window of `var`.
    pub fn vertex_op(&self, u: &Vector, v: &Vector, var: &str, window: &Window) -> Result<Series<Vector>> {
        vertex_series(&self.bound(), u, v, var, window)
    }

    pub fn to_json_mode(&self) -> Value {
        match &self.kind {
            AlgebraKind::Plain => json!({ "kind": "plain" }),
            AlgebraKind::Mobius(s) => s.to_json(),
            AlgebraKind::Conformal { omega, central_charge } => json!({
                "kind": "conformal",
                "omega": omega.to_json(),
                "central_charge": central_charge.to_json(),
            }),
        }
    }
}

/// Windowed vertex-operator series for any bound action.
pub fn vertex_series(
    act: &BoundAction,
    u: &Vector,
    v: &Vector,
    var: &str,
    window: &Window,
) -> Result<Series<Vector>> {
    let (lo, hi) = window
        .var_bounds(var)
        .ok_or_else(|| Error::Eval(format!("window has no bounds for {var}")))?;
    let lo = crate::scalar::rational_ceil(&lo);
    let hi = crate::scalar::rational_floor(&hi);
    let mut terms = Vec::new();
    for e in lo..=hi {
        let n = -e - 1;
        let out = act.apply_vec(u, n, v)?;
        if !out.is_empty() {
            terms.push((Monomial::ints(&[(var, e)]), out));
        }
    }
    Ok(Series::from_terms(terms))
}

/// A mode map together with the spaces it acts between.
#[derive(Clone)]
pub struct BoundAction {
    pub map: Arc<dyn ModeMap>,
    pub source: Arc<Space>,
    pub target: Arc<Space>,
    /// Use the weight grading to bound mode ranges.
    pub graded: bool,
    /// Opposite weight rule wt(v_n w) = wt w + n + 1 − wt v.
    pub opposite: bool,
}

impl BoundAction {
    pub fn mode(&self, v: BasisId, w: BasisId, n: i64) -> Result<Vector> {
        self.map.mode(v, w, n)
    }

    pub fn range(&self, v: BasisId, w: BasisId) -> Result<ModeRange> {
        let r = self.map.range(v, w)?;
        if !self.graded || r.is_empty() {
            return Ok(r);
        }
        let wv = self.source.weight(v)?;
        let ww = self.target.weight(w)?;
        let wr = if self.opposite {
            weight_window_range(&self.target, ww + Exponent::int(1) - wv, 1)
        } else {
            weight_window_range(&self.target, wv + ww - Exponent::int(1), -1)
        };
        Ok(r.intersect(&wr))
    }

    /// v_n x for a basis vector v.
    pub fn apply(&self, v: BasisId, n: i64, x: &Vector) -> Result<Vector> {
        let mut out = Vector::zero();
        for (i, c) in x.iter() {
            if !self.range(v, *i)?.contains(n) {
                continue;
            }
            out.add_scaled(&self.mode(v, *i, n)?, c);
        }
        Ok(out)
    }

    /// u_n x for arbitrary vectors.
    pub fn apply_vec(&self, u: &Vector, n: i64, x: &Vector) -> Result<Vector> {
        let mut out = Vector::zero();
        for (j, c) in u.iter() {
            out.add_scaled(&self.apply(*j, n, x)?, c);
        }
        Ok(out)
    }

    /// Union of mode ranges of the components of `u` against basis `w`.
    pub fn range_vec(&self, u: &Vector, w: BasisId) -> Result<ModeRange> {
        let mut r = ModeRange::EMPTY;
        for (j, _) in u.iter() {
            r = r.union(&self.range(*j, w)?);
        }
        Ok(r)
    }
}

/// Parameters shared by the windowed checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    /// Basis vectors with weights in [min_wt, max_wt] are sampled.
    pub min_wt: i64,
    pub max_wt: i64,
    /// Exponent window [−window, window] for every formal variable.
    pub window: i64,
    /// Sampled Jacobi triples satisfy Σ|Re wt| ≤ budget.
    pub triple_budget: i64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { min_wt: -8, max_wt: 8, window: 8, triple_budget: 8 }
    }
}

impl CheckConfig {
    pub fn new(min_wt: i64, max_wt: i64, window: i64) -> Self {
        CheckConfig { min_wt, max_wt, window, triple_budget: min_wt.abs().max(max_wt.abs()) }
    }

    pub fn with_budget(mut self, budget: i64) -> Self {
        self.triple_budget = budget;
        self
    }

    pub fn sample(&self, space: &Space) -> Vec<BasisId> {
        space.basis_in_weights(self.min_wt, self.max_wt).iter().map(|b| b.id).collect()
    }

    pub fn describe(&self) -> String {
        format!(
            "weights [{}, {}], exponents ±{}, triple budget {}",
            self.min_wt, self.max_wt, self.window, self.triple_budget
        )
    }
}

fn abs_weight(space: &Space, id: BasisId) -> i64 {
    space
        .weight(id)
        .map(|w| w.re.abs().ceil().to_integer())
        .unwrap_or(i64::MAX / 4)
}

/// Triples (u, v, w) from the samples with Σ|wt| within the budget.
pub fn sample_triples(vspace: &Space, wspace: &Space, cfg: &CheckConfig) -> Vec<(BasisId, BasisId, BasisId)> {
    let vs = cfg.sample(vspace);
    let ws = cfg.sample(wspace);
    let mut out = Vec::new();
    for &u in &vs {
        for &v in &vs {
            for &w in &ws {
                if abs_weight(vspace, u) + abs_weight(vspace, v) + abs_weight(wspace, w) <= cfg.triple_budget {
                    out.push((u, v, w));
                }
            }
        }
    }
    out
}

/// Nonnegative m with `alpha + sigma·m` inside `r`.
fn m_interval(alpha: i64, sigma: i64, r: ModeRange, what: &str) -> Result<Option<(i64, i64)>> {
    if r.is_empty() {
        return Ok(None);
    }
    let (mlo, mhi) = if sigma > 0 {
        (r.lo.map(|l| l - alpha), r.hi.map(|h| h - alpha))
    } else {
        (r.hi.map(|h| alpha - h), r.lo.map(|l| alpha - l))
    };
    let mhi = mhi.ok_or_else(|| {
        Error::UndefinedProduct(format!("{what}: coefficient is an infinite sum"))
    })?;
    let mlo = mlo.unwrap_or(0).max(0);
    Ok((mlo <= mhi).then_some((mlo, mhi)))
}

fn sign(k: i64) -> Scalar {
    if k.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// Coefficient of x₀^a x₁^b x₂^c in the three Jacobi terms applied to w.
/// Returns (first − second, right-hand side). With `outer.opposite`, the operators on W are
/// opposite vertex operators and the products appear in reversed order.
pub fn jacobi_coefficient(
    inner: &BoundAction,
    outer: &BoundAction,
    (u, v, w): (BasisId, BasisId, BasisId),
    (a, b, c): (i64, i64, i64),
) -> Result<(Vector, Vector)> {
    let n = -a - 1;
    let wv = Vector::basis(w);
    let mut lhs = Vector::zero();
    // x0^{-1} δ((x1 − x2)/x0) · (product at x1, x2)
    let first = if outer.opposite {
        m_interval(n - b - 1, -1, outer.range(u, w)?, "first term")?
    } else {
        m_interval(-c - 1, 1, outer.range(v, w)?, "first term")?
    };
    if let Some((lo, hi)) = first {
        for m in lo..=hi {
            let coef = sign(m) * binomial_int(n, m as u64);
            let p = n - m - b - 1;
            let q = m - c - 1;
            let val = if outer.opposite {
                outer.apply(v, q, &outer.mode(u, w, p)?)?
            } else {
                outer.apply(u, p, &outer.mode(v, w, q)?)?
            };
            lhs.add_scaled(&val, &coef);
        }
    }
    // x0^{-1} δ((x2 − x1)/(−x0)) · (reversed product)
    let second = if outer.opposite {
        m_interval(n - c - 1, -1, outer.range(v, w)?, "second term")?
    } else {
        m_interval(-b - 1, 1, outer.range(u, w)?, "second term")?
    };
    if let Some((lo, hi)) = second {
        for m in lo..=hi {
            let coef = sign(n + m) * binomial_int(n, m as u64);
            let p = m - b - 1;
            let q = n - m - c - 1;
            let val = if outer.opposite {
                outer.apply(u, p, &outer.mode(v, w, q)?)?
            } else {
                outer.apply(v, q, &outer.mode(u, w, p)?)?
            };
            lhs.add_scaled(&val, &(-coef));
        }
    }
    // x2^{-1} δ((x1 − x0)/x2) · Y(Y(u,x0)v, x2)
    let mut rhs = Vector::zero();
    if let Some((lo, hi)) = m_interval(-a - 1, 1, inner.range(u, v)?, "iterate term")? {
        for m in lo..=hi {
            let coef = sign(m) * binomial_int(b + m, m as u64);
            let k = m - a - 1;
            let q = -b - m - c - 2;
            let y = inner.mode(u, v, k)?;
            rhs.add_scaled(&outer.apply_vec(&y, q, &wv)?, &coef);
        }
    }
    Ok((lhs, rhs))
}

/// Memoized products for one triple: the three Jacobi terms reuse the same mode products
/// across many monomials.
struct TripleMemo<'a> {
    inner: &'a BoundAction,
    outer: &'a BoundAction,
    u: BasisId,
    v: BasisId,
    w: BasisId,
    first: HashMap<(i64, i64), Vector>,
    second: HashMap<(i64, i64), Vector>,
    iterate: HashMap<(i64, i64), Vector>,
    ranges: [ModeRange; 3],
}

impl<'a> TripleMemo<'a> {
    fn new(inner: &'a BoundAction, outer: &'a BoundAction, (u, v, w): (BasisId, BasisId, BasisId)) -> Result<Self> {
        let ranges = [outer.range(u, w)?, outer.range(v, w)?, inner.range(u, v)?];
        Ok(TripleMemo {
            inner,
            outer,
            u,
            v,
            w,
            first: HashMap::new(),
            second: HashMap::new(),
            iterate: HashMap::new(),
            ranges,
        })
    }

    /// u_p v_q w (or v°_q u°_p w in the opposite case).
    fn product(&mut self, p: i64, q: i64) -> Result<&Vector> {
        let (o, u, v, w) = (self.outer, self.u, self.v, self.w);
        if !self.first.contains_key(&(p, q)) {
            let val = if o.opposite { o.apply(v, q, &o.mode(u, w, p)?)? } else { o.apply(u, p, &o.mode(v, w, q)?)? };
            self.first.insert((p, q), val);
        }
        Ok(&self.first[&(p, q)])
    }

    /// v_q u_p w (or u°_p v°_q w in the opposite case).
    fn reversed(&mut self, p: i64, q: i64) -> Result<&Vector> {
        let (o, u, v, w) = (self.outer, self.u, self.v, self.w);
        if !self.second.contains_key(&(p, q)) {
            let val = if o.opposite { o.apply(u, p, &o.mode(v, w, q)?)? } else { o.apply(v, q, &o.mode(u, w, p)?)? };
            self.second.insert((p, q), val);
        }
        Ok(&self.second[&(p, q)])
    }

    /// (u_k v)_q w.
    fn iterate(&mut self, k: i64, q: i64) -> Result<&Vector> {
        if !self.iterate.contains_key(&(k, q)) {
            let y = self.inner.mode(self.u, self.v, k)?;
            let val = self.outer.apply_vec(&y, q, &Vector::basis(self.w))?;
            self.iterate.insert((k, q), val);
        }
        Ok(&self.iterate[&(k, q)])
    }

    fn coefficient(&mut self, (a, b, c): (i64, i64, i64)) -> Result<(Vector, Vector)> {
        let n = -a - 1;
        let opposite = self.outer.opposite;
        let cap = |iv: Option<(i64, i64)>| iv.and_then(|(lo, hi)| {
            let hi = if n >= 0 { hi.min(n) } else { hi };
            (lo <= hi).then_some((lo, hi))
        });
        let mut lhs = Vector::zero();
        let first = if opposite {
            m_interval(n - b - 1, -1, self.ranges[0], "first term")?
        } else {
            m_interval(-c - 1, 1, self.ranges[1], "first term")?
        };
        if let Some((lo, hi)) = cap(first) {
            for m in lo..=hi {
                let val = self.product(n - m - b - 1, m - c - 1)?;
                if !val.is_empty() {
                    let coef = sign(m) * binomial_int(n, m as u64);
                    lhs.add_scaled(val, &coef);
                }
            }
        }
        let second = if opposite {
            m_interval(n - c - 1, -1, self.ranges[1], "second term")?
        } else {
            m_interval(-b - 1, 1, self.ranges[0], "second term")?
        };
        if let Some((lo, hi)) = cap(second) {
            for m in lo..=hi {
                let val = self.reversed(m - b - 1, n - m - c - 1)?;
                if !val.is_empty() {
                    let coef = sign(n + m + 1) * binomial_int(n, m as u64);
                    lhs.add_scaled(val, &coef);
                }
            }
        }
        let mut rhs = Vector::zero();
        if let Some((lo, hi)) = m_interval(-a - 1, 1, self.ranges[2], "iterate term")? {
            for m in lo..=hi {
                let val = self.iterate(m - a - 1, -b - m - c - 2)?;
                if !val.is_empty() {
                    let coef = sign(m) * binomial_int(b + m, m as u64);
                    rhs.add_scaled(val, &coef);
                }
            }
        }
        Ok((lhs, rhs))
    }

    /// False when every term of the coefficient of x0^a x1^b x2^c lies outside the weight range of W.
    fn weight_feasible(&self, a: i64, b: i64, c: i64) -> Result<bool> {
        if !self.outer.graded {
            return Ok(true);
        }
        let src = &self.inner.source;
        let base = src.weight(self.u)? + src.weight(self.v)?;
        let ww = self.outer.target.weight(self.w)?;
        // u_p v_q w has weight wt u + wt v + wt w + a + b + c + 1; the opposite rule flips the sign of the shift.
        let total = if self.outer.opposite {
            ww - base - Exponent::int(a + b + c + 1)
        } else {
            base + ww + Exponent::int(a + b + c + 1)
        };
        let t = &self.outer.target;
        Ok(t.min_weight().is_none_or(|lo| total.re >= lo) && t.max_weight().is_none_or(|hi| total.re <= hi))
    }
}

/// Checks the (opposite) Jacobi identity for one triple on the cube [−N, N]³.
pub fn jacobi_triple_witness(
    inner: &BoundAction,
    outer: &BoundAction,
    triple: (BasisId, BasisId, BasisId),
    window: i64,
) -> Result<Option<Witness>> {
    let mut memo = TripleMemo::new(inner, outer, triple)?;
    for a in -window..=window {
        for b in -window..=window {
            for c in -window..=window {
                if !memo.weight_feasible(a, b, c)? {
                    continue;
                }
                let (l, r) = memo.coefficient((a, b, c))?;
                if l != r {
                    let (u, v, w) = triple;
                    return Ok(Some(Witness::new(
                        format!(
                            "u={}, v={}, w={}",
                            inner.source.name(u),
                            inner.source.name(v),
                            outer.target.name(w)
                        ),
                        Some(Monomial::ints(&[("x0", a), ("x1", b), ("x2", c)]).to_string()),
                        l.render(&outer.target),
                        r.render(&outer.target),
                    )));
                }
            }
        }
    }
    Ok(None)
}

/// Runs the Jacobi check over all triples (in parallel), recording the first failure in input order.
pub fn jacobi_over_triples(
    report: &mut CheckReport,
    name: &str,
    inner: &BoundAction,
    outer: &BoundAction,
    triples: &[(BasisId, BasisId, BasisId)],
    window: i64,
) {
    let results = crate::par::map(triples, |t| jacobi_triple_witness(inner, outer, *t, window));
    let outcome = results.into_iter().find(|r| !matches!(r, Ok(None))).unwrap_or(Ok(None));
    report.record(name, format!("{} triples, exponents ±{window}", triples.len()), outcome);
}

/// The Jacobi identity for u, v ∈ V acting on w (vectors, expanded bilinearly).
pub fn check_jacobi_triple(alg: &VertexAlgebra, u: &Vector, v: &Vector, w: &Vector, window: i64) -> CheckReport {
    let mut report = CheckReport::new(format!("{}: Jacobi identity", alg.name));
    let act = alg.bound();
    let outcome = (|| -> Result<Option<Witness>> {
        for a in -window..=window {
            for b in -window..=window {
                for c in -window..=window {
                    let mut l = Vector::zero();
                    let mut r = Vector::zero();
                    for (ui, uc) in u.iter() {
                        for (vi, vc) in v.iter() {
                            for (wi, wc) in w.iter() {
                                let (x, y) = jacobi_coefficient(&act, &act, (*ui, *vi, *wi), (a, b, c))?;
                                let k = &(uc * vc) * wc;
                                l.add_scaled(&x, &k);
                                r.add_scaled(&y, &k);
                            }
                        }
                    }
                    if l != r {
                        return Ok(Some(Witness::new(
                            format!(
                                "u={}, v={}, w={}",
                                u.render(&alg.space),
                                v.render(&alg.space),
                                w.render(&alg.space)
                            ),
                            Some(Monomial::ints(&[("x0", a), ("x1", b), ("x2", c)]).to_string()),
                            l.render(&alg.space),
                            r.render(&alg.space),
                        )));
                    }
                }
            }
        }
        Ok(None)
    })();
    report.record("jacobi", format!("exponents ±{window}"), outcome);
    report
}

/// Runs `f` over items until the first witness or error.
pub(crate) fn first_witness<T>(
    items: impl IntoIterator<Item = T>,
    mut f: impl FnMut(T) -> Result<Option<Witness>>,
) -> Result<Option<Witness>> {
    for it in items {
        if let Some(w) = f(it)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

pub(crate) fn vector_witness(inputs: String, space: &Space, lhs: &Vector, rhs: &Vector) -> Option<Witness> {
    (lhs != rhs).then(|| Witness::new(inputs, None, lhs.render(space), rhs.render(space)))
}

/// The full axiom suite: vacuum, creation, Jacobi, derivative, sl(2) or Virasoro, grading.
pub fn check_axioms(alg: &Arc<VertexAlgebra>, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(format!("{} ({}): axioms, {}", alg.name, alg.kind.name(), cfg.describe()));
    let module = Module::adjoint(alg);
    report.merge(modules::check_module_axioms(&module, cfg));
    report.merge(check_creation(alg, cfg));
    report.merge(check_commutator_formula(alg, cfg));
    if alg.kind.is_graded() {
        report.merge(check_vacuum_sl2(alg));
    }
    report
}

/// u_n 𝟏 = 0 for n ≥ 0 and u_{−1} 𝟏 = u.
pub fn check_creation(alg: &VertexAlgebra, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new("creation");
    let act = alg.bound();
    let sample = cfg.sample(&alg.space);
    let outcome = first_witness(sample, |u| {
        for n in -1..=cfg.window {
            let got = act.apply(u, n, &alg.vacuum)?;
            let want = if n == -1 { Vector::basis(u) } else { Vector::zero() };
            if let Some(w) = vector_witness(
                format!("{}_({n}) 1", alg.space.name(u)),
                &alg.space,
                &got,
                &want,
            ) {
                return Ok(Some(w));
            }
        }
        Ok(None)
    });
    report.record("creation", format!("modes -1..{}", cfg.window), outcome);
    report
}

/// Residue of the Jacobi identity: [u_p, v_q] = Σ_i C(p,i) (u_i v)_{p+q−i}.
pub fn check_commutator_formula(alg: &VertexAlgebra, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new("commutator formula");
    let act = alg.bound();
    let small = CheckConfig { window: cfg.window.min(3), ..cfg.clone() };
    let triples = sample_triples(&alg.space, &alg.space, &small);
    let nw = small.window;
    let outcome = first_witness(triples, |(u, v, w)| {
        for p in -nw..=nw {
            for q in -nw..=nw {
                let wv = Vector::basis(w);
                let lhs = act.apply(u, p, &act.apply(v, q, &wv)?)?.sub(&act.apply(v, q, &act.apply(u, p, &wv)?)?);
                let mut rhs = Vector::zero();
                let r = act.range(u, v)?;
                if let Some(hi) = r.hi {
                    for i in r.lo.unwrap_or(0).max(0)..=hi {
                        let y = act.mode(u, v, i)?;
                        rhs.add_scaled(&act.apply_vec(&y, p + q - i, &wv)?, &binomial_int(p, i as u64));
                    }
                } else if !r.is_empty() {
                    return Err(Error::UndefinedProduct("u_i v nonzero for infinitely many i ≥ 0".into()));
                }
                let inputs = format!(
                    "[{}_({p}), {}_({q})] {}",
                    alg.space.name(u),
                    alg.space.name(v),
                    alg.space.name(w)
                );
                if let Some(wt) = vector_witness(inputs, &alg.space, &lhs, &rhs) {
                    return Ok(Some(wt));
                }
            }
        }
        Ok(None)
    });
    report.record("commutator_formula", format!("modes ±{nw}"), outcome);
    report
}

/// L(j)𝟏 = 0 for j = −1, 0, 1.
pub fn check_vacuum_sl2(alg: &VertexAlgebra) -> CheckReport {
    let mut report = CheckReport::new("sl(2) on vacuum");
    let outcome = first_witness([-1i64, 0, 1], |j| {
        let Some(op) = alg.l(j) else { return Ok(None) };
        let got = apply_op(op.as_ref(), &alg.vacuum)?;
        Ok(vector_witness(format!("L({j}) 1"), &alg.space, &got, &Vector::zero()))
    });
    report.record("vacuum_sl2", "L(j)1 = 0", outcome);
    report
}

/// Strong grading: lower truncation per column, finite cells, v_l V^(β) ⊆ V^(α+β),
/// L(j) preserving degrees, 𝟏 ∈ V^(0)_(0), ω ∈ V^(0)_(2).
pub fn check_strong_grading(alg: &VertexAlgebra, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(format!("{}: strong grading", alg.name));
    let audit = audit_space(&alg.space, cfg.min_wt, cfg.max_wt);
    report.merge(audit);
    let zero = GroupElement::zero(alg.space.group_rank);
    report.record(
        "vacuum_placement",
        "1 in V^(0)_(0)",
        vector_cell_witness(&alg.space, &alg.vacuum, &zero, Exponent::ZERO, "vacuum"),
    );
    if let AlgebraKind::Conformal { omega, .. } = &alg.kind {
        let outcome = if omega.is_empty() {
            Ok(None)
        } else {
            vector_cell_witness(&alg.space, omega, &zero, Exponent::int(2), "omega")
        };
        report.record("omega_placement", "omega in V^(0)_(2)", outcome);
    }
    let act = alg.bound();
    let sample = cfg.sample(&alg.space);
    let outcome = first_witness(sample.iter().flat_map(|u| sample.iter().map(move |v| (*u, *v))), |(u, v)| {
        let r = act.range(u, v)?;
        let lo = r.lo.unwrap_or(-cfg.window).max(-cfg.window - 1);
        let hi = r.hi.unwrap_or(cfg.window).min(cfg.window);
        let target = alg.space.degree(u)?.add(&alg.space.degree(v)?);
        for n in lo..=hi {
            let out = act.mode(u, v, n)?;
            for (id, _) in out.iter() {
                let d = alg.space.degree(*id)?;
                if d != target {
                    return Ok(Some(Witness::new(
                        format!("{}_({n}) {}", alg.space.name(u), alg.space.name(v)),
                        None,
                        format!("degree {:?}", d.0),
                        format!("degree {:?}", target.0),
                    )));
                }
            }
        }
        Ok(None)
    });
    report.record("mode_degrees", "v_l V^(b) in V^(a+b)", outcome);
    let outcome = first_witness(cfg.sample(&alg.space), |v| {
        for j in [-1i64, 0, 1] {
            let Some(op) = alg.l(j) else { continue };
            let d = alg.space.degree(v)?;
            for (id, _) in op.apply_basis(v)?.iter() {
                if alg.space.degree(*id)? != d {
                    return Ok(Some(Witness::new(
                        format!("L({j}) {}", alg.space.name(v)),
                        None,
                        format!("degree {:?}", alg.space.degree(*id)?.0),
                        format!("degree {:?}", d.0),
                    )));
                }
            }
        }
        Ok(None)
    });
    report.record("sl2_degrees", "L(j) preserves degrees", outcome);
    report
}

fn vector_cell_witness(
    space: &Space,
    v: &Vector,
    degree: &GroupElement,
    weight: Exponent,
    label: &str,
) -> Result<Option<Witness>> {
    for (id, _) in v.iter() {
        let b = space.basis(*id).ok_or_else(|| Error::Schema(format!("unknown basis id {id}")))?;
        if &b.degree != degree || b.weight != weight {
            return Ok(Some(Witness::new(
                label,
                None,
                format!("component {} in cell ({:?}, {})", b.name, b.degree.0, b.weight),
                format!("cell ({:?}, {weight})", degree.0),
            )));
        }
    }
    Ok(None)
}

/// wt(u_n v) = wt u + wt v − n − 1 and wt(L(j)v) = wt v − j on the sampled table.
pub fn weight_shift_check(alg: &Arc<VertexAlgebra>, cfg: &CheckConfig) -> CheckReport {
    let module = Module::adjoint(alg);
    let mut report = modules::weight_formula_check(&module, cfg);
    report.subject = format!("{}: weight shifts", alg.name);
    report
}

/// Structure constants of a finite-dimensional algebra as a table of nonzero entries.
pub fn structure_table(alg: &VertexAlgebra) -> Result<BTreeMap<(BasisId, BasisId, i64), Vector>> {
    let ids: Vec<BasisId> = alg.space.all_basis()?.iter().map(|b| b.id).collect();
    Ok(crate::action::TableAction::tabulate(alg.action.as_ref(), &ids, &ids)?.entries)
}
