//! Generalized modules, opposite vertex operators and contragredient modules.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

use crate::action::{apply_op, Cached, ModeMap, ModeRange, Operator};
use crate::algebra::{
    first_witness, jacobi_over_triples, sample_triples, vertex_series, vector_witness, AlgebraKind,
    BoundAction, CheckConfig, ModeOperator, Sl2, VertexAlgebra,
};
use crate::error::{Error, Result};
use crate::grading::{BasisId, Space, Vector};
use crate::kernel::{Series, Window};
use crate::report::{CheckReport, Witness};
use crate::scalar::{binomial_int, Exponent, Scalar};

#[derive(Clone)]
pub enum ModuleOps {
    Plain,
    Mobius(Sl2),
    /// Only L(0) is given.
    Grading(Arc<dyn Operator>),
    /// L(n) = ω_{n+1} through the module action.
    Conformal,
}

/// Sign convention in v^o_n; `Unsigned` drops the factor (−1)^{wt v} and exists as a control.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OppositeSign {
    Standard,
    Unsigned,
}

#[derive(Clone)]
pub enum ModuleOrigin {
    Table,
    Adjoint,
    Contragredient(Arc<Module>),
}

pub struct Module {
    pub name: String,
    pub algebra: Arc<VertexAlgebra>,
    pub space: Arc<Space>,
    pub action: Arc<dyn ModeMap>,
    pub ops: ModuleOps,
    pub opposite_sign: OppositeSign,
    pub origin: ModuleOrigin,
    opposite: Mutex<Option<Arc<dyn ModeMap>>>,
}

impl Module {
    pub fn new(
        name: impl Into<String>,
        algebra: Arc<VertexAlgebra>,
        space: Arc<Space>,
        action: Arc<dyn ModeMap>,
        ops: ModuleOps,
    ) -> Module {
        Module {
            name: name.into(),
            algebra,
            space,
            action: Cached::wrap(action),
            ops,
            opposite_sign: OppositeSign::Standard,
            origin: ModuleOrigin::Table,
            opposite: Mutex::new(None),
        }
    }

    /// V as a module over itself.
    pub fn adjoint(alg: &Arc<VertexAlgebra>) -> Arc<Module> {
        let ops = match &alg.kind {
            AlgebraKind::Plain => ModuleOps::Plain,
            AlgebraKind::Mobius(s) => ModuleOps::Mobius(s.clone()),
            AlgebraKind::Conformal { .. } => ModuleOps::Conformal,
        };
        Arc::new(Module {
            name: alg.name.clone(),
            algebra: alg.clone(),
            space: alg.space.clone(),
            action: alg.action.clone(),
            ops,
            opposite_sign: OppositeSign::Standard,
            origin: ModuleOrigin::Adjoint,
            opposite: Mutex::new(None),
        })
    }

    pub fn with_opposite_sign(mut self, sign: OppositeSign) -> Self {
        self.opposite_sign = sign;
        self
    }

    pub fn with_origin(mut self, origin: ModuleOrigin) -> Self {
        self.origin = origin;
        self
    }

    pub fn is_graded(&self) -> bool {
        self.algebra.kind.is_graded() || !matches!(self.ops, ModuleOps::Plain)
    }

    pub fn bound(&self) -> BoundAction {
        BoundAction {
            map: self.action.clone(),
            source: self.algebra.space.clone(),
            target: self.space.clone(),
            graded: self.is_graded(),
            opposite: false,
        }
    }

    /// L(j) on W when available.
    pub fn l(&self, j: i64) -> Option<Arc<dyn Operator>> {
        match &self.ops {
            ModuleOps::Plain => None,
            ModuleOps::Mobius(s) => s.get(j),
            ModuleOps::Grading(l0) => (j == 0).then(|| l0.clone()),
            ModuleOps::Conformal => match &self.algebra.kind {
                AlgebraKind::Conformal { omega, .. } => Some(Arc::new(ModeOperator {
                    map: self.action.clone(),
                    vector: omega.clone(),
                    n: j + 1,
                }) as Arc<dyn Operator>),
                _ => None,
            },
        }
    }

    pub fn has_sl2(&self) -> bool {
        [-1, 0, 1].iter().all(|j| self.l(*j).is_some())
    }

    /// The opposite action v ↦ v^o_n, memoized.
    pub fn opposite(&self) -> Result<BoundAction> {
        if self.algebra.l(1).is_none() {
            return Err(Error::Eval(format!(
                "{}: opposite vertex operators need L(1) on the algebra",
                self.algebra.name
            )));
        }
        let mut slot = self.opposite.lock().expect("opposite cache");
        let map = match &*slot {
            Some(m) => m.clone(),
            None => {
                let m = Cached::wrap(Arc::new(OppositeAction {
                    algebra: self.algebra.clone(),
                    module: self.bound(),
                    sign: self.opposite_sign,
                    expansions: Mutex::default(),
                }));
                *slot = Some(m.clone());
                m
            }
        };
        Ok(BoundAction {
            map,
            source: self.algebra.space.clone(),
            target: self.space.clone(),
            graded: true,
            opposite: true,
        })
    }

    pub fn module_action(&self, v: &Vector, w: &Vector, var: &str, window: &Window) -> Result<Series<Vector>> {
        vertex_series(&self.bound(), v, w, var, window)
    }

    pub fn ops_json(&self) -> Value {
        match &self.ops {
            ModuleOps::Plain => json!({ "kind": "plain" }),
            ModuleOps::Mobius(s) => s.to_json(),
            ModuleOps::Grading(l0) => json!({ "kind": "grading", "L(0)": l0.describe() }),
            ModuleOps::Conformal => json!({ "kind": "conformal" }),
        }
    }
}

/// v^o_n = (−1)^k Σ_m (1/m!) (L(1)^m v)_{−n−m−2+2k} for v of weight k.
struct OppositeAction {
    algebra: Arc<VertexAlgebra>,
    module: BoundAction,
    sign: OppositeSign,
    expansions: Mutex<HashMap<BasisId, Vec<Vector>>>,
}

const NILPOTENCE_CAP: usize = 256;

/// The nonzero vectors L(1)^m v / m!, m = 0, 1, ...
pub fn l1_expansion(alg: &VertexAlgebra, v: BasisId) -> Result<Vec<Vector>> {
    let l1 = alg
        .l(1)
        .ok_or_else(|| Error::Eval(format!("{} has no L(1)", alg.name)))?;
    let mut out = vec![Vector::basis(v)];
    loop {
        let m = out.len();
        let next = apply_op(l1.as_ref(), &out[m - 1])?.scaled(&Scalar::from_frac(1, m as i64));
        if next.is_empty() {
            return Ok(out);
        }
        if m >= NILPOTENCE_CAP {
            return Err(Error::NotLocallyNilpotent(alg.space.name(v)));
        }
        out.push(next);
    }
}

impl OppositeAction {
    fn expansion(&self, v: BasisId) -> Result<Vec<Vector>> {
        if let Some(e) = self.expansions.lock().expect("expansion cache").get(&v) {
            return Ok(e.clone());
        }
        let e = l1_expansion(&self.algebra, v)?;
        self.expansions.lock().expect("expansion cache").insert(v, e.clone());
        Ok(e)
    }

    fn prefactor(&self, k: i64) -> Scalar {
        match self.sign {
            OppositeSign::Standard if k.rem_euclid(2) == 1 => -Scalar::one(),
            _ => Scalar::one(),
        }
    }
}

impl ModeMap for OppositeAction {
    fn mode(&self, v: BasisId, w: BasisId, n: i64) -> Result<Vector> {
        let k = self.algebra.int_weight(v)?;
        let wv = Vector::basis(w);
        let mut out = Vector::zero();
        for (m, x) in self.expansion(v)?.iter().enumerate() {
            let idx = -n - m as i64 - 2 + 2 * k;
            out.add_scaled(&self.module.apply_vec(x, idx, &wv)?, &Scalar::one());
        }
        Ok(out.scaled(&self.prefactor(k)))
    }

    fn range(&self, v: BasisId, w: BasisId) -> Result<ModeRange> {
        let k = self.algebra.int_weight(v)?;
        let mut r = ModeRange::EMPTY;
        for (m, x) in self.expansion(v)?.iter().enumerate() {
            let inner = self.module.range_vec(x, w)?;
            r = r.union(&inner.negate().shift(-(m as i64) - 2 + 2 * k));
        }
        Ok(r)
    }

    fn describe(&self) -> Value {
        json!("opposite")
    }
}

/// ⟨v_n e_i*, e_k⟩ = ⟨e_i*, v^o_n e_k⟩ on the graded dual.
struct ContragredientAction {
    base: Arc<Module>,
    opposite: BoundAction,
}

impl ModeMap for ContragredientAction {
    fn mode(&self, v: BasisId, i: BasisId, n: i64) -> Result<Vector> {
        let space = &self.base.space;
        let bi = space.basis(i).ok_or_else(|| Error::Schema(format!("no basis vector {i}")))?;
        let vspace = &self.base.algebra.space;
        let wt = bi.weight - Exponent::int(n + 1) + vspace.weight(v)?;
        let deg = bi.degree.add(&vspace.degree(v)?.neg());
        let mut out = Vector::zero();
        for k in space.cell(&deg, wt) {
            let c = self.opposite.mode(v, k, n)?.get(i);
            out.add_term(k, &c);
        }
        Ok(out)
    }

    fn range(&self, _v: BasisId, _i: BasisId) -> Result<ModeRange> {
        Ok(ModeRange::FULL)
    }

    fn describe(&self) -> Value {
        json!("contragredient")
    }
}

/// Transpose of a homogeneous operator of weight `j` on W, acting on the graded dual:
/// (T e_i*)(e_k) = e_i*(base e_k) with wt e_k = wt e_i − j.
pub struct TransposeOp {
    pub base: Arc<dyn Operator>,
    pub space: Arc<Space>,
    pub weight: i64,
}

impl Operator for TransposeOp {
    fn apply_basis(&self, i: BasisId) -> Result<Vector> {
        let bi = self.space.basis(i).ok_or_else(|| Error::Schema(format!("no basis vector {i}")))?;
        let mut out = Vector::zero();
        for k in self.space.cell(&bi.degree, bi.weight - Exponent::int(self.weight)) {
            out.add_term(k, &self.base.apply_basis(k)?.get(i));
        }
        Ok(out)
    }
    fn describe(&self) -> Value {
        json!({ "transpose_of": self.base.describe(), "weight": self.weight })
    }
}

/// W' with (W')^(β)_[n] = (W^(−β)_[n])*, Y' the transpose of Y^o, L'(j) the transpose of L(−j).
pub fn contragredient(m: &Arc<Module>) -> Result<Arc<Module>> {
    if !m.is_graded() {
        return Err(Error::NotStronglyGraded(format!("{} carries no weight grading", m.name)));
    }
    if !m.space.is_finite() && !m.space.lower_bounded() {
        return Err(Error::NotStronglyGraded(format!("{}: weights are not bounded below", m.name)));
    }
    let v = &m.algebra.space;
    let probe: Vec<BasisId> = match v.min_weight() {
        Some(lo) => {
            let lo = lo.floor().to_integer();
            v.basis_in_weights(lo, lo + 16).iter().map(|b| b.id).collect()
        }
        None => v.basis_in_weights(-16, 16).iter().map(|b| b.id).collect(),
    };
    for id in probe {
        l1_expansion(&m.algebra, id)?;
    }
    let opposite = m.opposite()?;
    let dual = Arc::new(Space::dual(&m.space));
    let transpose = |j: i64| -> Option<Arc<dyn Operator>> {
        m.l(-j).map(|op| {
            Arc::new(TransposeOp { base: op, space: m.space.clone(), weight: j }) as Arc<dyn Operator>
        })
    };
    let ops = match &m.ops {
        ModuleOps::Plain => ModuleOps::Plain,
        ModuleOps::Mobius(_) => ModuleOps::Mobius(Sl2 {
            lm1: transpose(-1).expect("mobius"),
            l0: transpose(0).expect("mobius"),
            lp1: transpose(1).expect("mobius"),
        }),
        ModuleOps::Grading(_) => ModuleOps::Grading(transpose(0).expect("grading")),
        ModuleOps::Conformal => ModuleOps::Conformal,
    };
    let action = Arc::new(ContragredientAction { base: m.clone(), opposite });
    Ok(Arc::new(
        Module::new(format!("{}'", m.name), m.algebra.clone(), dual, action, ops)
            .with_origin(ModuleOrigin::Contragredient(m.clone())),
    ))
}

/// The windowed series Y^o(v,x)w.
pub fn opposite_op(m: &Module, v: &Vector, w: &Vector, var: &str, window: &Window) -> Result<Series<Vector>> {
    vertex_series(&m.opposite()?, v, w, var, window)
}

fn mode_window(act: &BoundAction, v: BasisId, w: BasisId, window: i64) -> Result<Option<(i64, i64)>> {
    let r = act.map.range(v, w)?;
    if r.is_empty() {
        return Ok(None);
    }
    let lo = r.lo.unwrap_or(-window - 1).max(-window - 1);
    let hi = r.hi.unwrap_or(window).min(window);
    Ok((lo <= hi).then_some((lo, hi)))
}

fn pairs(vs: &[BasisId], ws: &[BasisId]) -> Vec<(BasisId, BasisId)> {
    vs.iter().flat_map(|v| ws.iter().map(move |w| (*v, *w))).collect()
}

/// Axioms for a (generalized) module: vacuum, Jacobi, derivative, lower truncation,
/// sl(2) or Virasoro relations, weight conditions and grading compatibility.
pub fn check_module_axioms(m: &Module, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(format!("{}: module axioms, {}", m.name, cfg.describe()));
    let alg = &m.algebra;
    let act = m.bound();
    let vs = cfg.sample(&alg.space);
    let ws = cfg.sample(&m.space);
    let nw = cfg.window;

    let outcome = first_witness(ws.iter().copied(), |w| {
        for n in -nw - 1..=nw {
            let got = act.apply_vec(&alg.vacuum, n, &Vector::basis(w))?;
            let want = if n == -1 { Vector::basis(w) } else { Vector::zero() };
            if let Some(x) = vector_witness(format!("1_({n}) {}", m.space.name(w)), &m.space, &got, &want) {
                return Ok(Some(x));
            }
        }
        Ok(None)
    });
    report.record("vacuum", format!("modes ±{nw}"), outcome);

    let triples = sample_triples(&alg.space, &m.space, cfg);
    jacobi_over_triples(&mut report, "jacobi", &alg.bound(), &act, &triples, nw);

    let d = alg.derivation();
    let outcome = first_witness(pairs(&vs, &ws), |(v, w)| {
        let dv = d.apply_basis(v)?;
        for n in -nw..=nw {
            let lhs = act.apply_vec(&dv, n, &Vector::basis(w))?;
            let rhs = act.apply(v, n - 1, &Vector::basis(w))?.scaled(&Scalar::from_int(-n));
            let inputs = format!("(L(-1){})_({n}) {}", alg.space.name(v), m.space.name(w));
            if let Some(x) = vector_witness(inputs, &m.space, &lhs, &rhs) {
                return Ok(Some(x));
            }
        }
        Ok(None)
    });
    report.record("derivative", "Y(L(-1)v,x) = d/dx Y(v,x)", outcome);

    let outcome = first_witness(pairs(&vs, &ws), |(v, w)| {
        let r = act.range(v, w)?;
        Ok((!r.is_empty() && r.hi.is_none()).then(|| {
            Witness::new(
                format!("v={}, w={}", alg.space.name(v), m.space.name(w)),
                None,
                "v_n w nonzero for arbitrarily large n",
                "v_n w = 0 for n large",
            )
        }))
    });
    report.record("lower_truncation", "", outcome);

    if m.has_sl2() {
        report.merge(sl2_bracket_check(&m.space, &|j| m.l(j), &ws));
        if alg.kind.is_graded() {
            report.merge(sl2_commutator_check(m, cfg));
        }
    }
    if let (ModuleOps::Conformal, AlgebraKind::Conformal { central_charge, .. }) = (&m.ops, &alg.kind) {
        report.merge(virasoro_check(m, central_charge, &ws));
    }
    if m.l(0).is_some() {
        if m.space.generalized {
            report.merge(generalized_weight_check(m, cfg));
        } else {
            report.merge(ordinary_weight_check(m, cfg));
        }
    }

    let outcome = first_witness(pairs(&vs, &ws), |(v, w)| {
        let target = alg.space.degree(v)?.add(&m.space.degree(w)?);
        let Some((lo, hi)) = mode_window(&act, v, w, nw)? else { return Ok(None) };
        for n in lo..=hi {
            for (id, _) in act.mode(v, w, n)?.iter() {
                let deg = m.space.degree(*id)?;
                if deg != target {
                    return Ok(Some(Witness::new(
                        format!("{}_({n}) {}", alg.space.name(v), m.space.name(w)),
                        None,
                        format!("degree {:?}", deg.0),
                        format!("degree {:?}", target.0),
                    )));
                }
            }
        }
        Ok(None)
    });
    report.record("grading_compat", "v_l W^(b) in W^(a+b)", outcome);
    report
}

/// [L(0),L(−1)] = L(−1), [L(0),L(1)] = −L(1), [L(−1),L(1)] = −2L(0) on the sample.
pub fn sl2_bracket_check(
    space: &Space,
    l: &dyn Fn(i64) -> Option<Arc<dyn Operator>>,
    sample: &[BasisId],
) -> CheckReport {
    let mut report = CheckReport::new("sl(2) brackets");
    let outcome = (|| -> Result<Option<Witness>> {
        let (Some(lm1), Some(l0), Some(lp1)) = (l(-1), l(0), l(1)) else {
            return Ok(None);
        };
        let br = |a: &Arc<dyn Operator>, b: &Arc<dyn Operator>, w: &Vector| -> Result<Vector> {
            Ok(apply_op(a.as_ref(), &apply_op(b.as_ref(), w)?)?.sub(&apply_op(b.as_ref(), &apply_op(a.as_ref(), w)?)?))
        };
        for &w in sample {
            let wv = Vector::basis(w);
            let cases = [
                ("[L(0),L(-1)] = L(-1)", br(&l0, &lm1, &wv)?, apply_op(lm1.as_ref(), &wv)?),
                ("[L(0),L(1)] = -L(1)", br(&l0, &lp1, &wv)?, apply_op(lp1.as_ref(), &wv)?.scaled(&-Scalar::one())),
                (
                    "[L(-1),L(1)] = -2L(0)",
                    br(&lm1, &lp1, &wv)?,
                    apply_op(l0.as_ref(), &wv)?.scaled(&Scalar::from_int(-2)),
                ),
            ];
            for (label, lhs, rhs) in cases {
                if let Some(x) = vector_witness(format!("{label} on {}", space.name(w)), space, &lhs, &rhs) {
                    return Ok(Some(x));
                }
            }
        }
        Ok(None)
    })();
    report.record("sl2_brackets", format!("{} basis vectors", sample.len()), outcome);
    report
}

/// [L(j), v_n] against the sl(2) commutator formulas, j = −1, 0, 1.
fn sl2_commutator_check(m: &Module, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new("sl(2) commutators");
    let alg = &m.algebra;
    let act = m.bound();
    let vs = cfg.sample(&alg.space);
    let ws = cfg.sample(&m.space);
    let nw = cfg.window;
    let outcome = first_witness(pairs(&vs, &ws), |(v, w)| {
        let lv: Vec<Vector> = [-1i64, 0, 1]
            .iter()
            .map(|j| apply_op(alg.l(*j).expect("sl2").as_ref(), &Vector::basis(v)))
            .collect::<Result<_>>()?;
        let wv = Vector::basis(w);
        for j in [-1i64, 0, 1] {
            let lw = m.l(j).expect("sl2");
            for n in -nw..=nw {
                let lhs = apply_op(lw.as_ref(), &act.apply(v, n, &wv)?)?
                    .sub(&act.apply(v, n, &apply_op(lw.as_ref(), &wv)?)?);
                // Σ_k C(j+1, k) (L(j−k)v)_{n+k}
                let mut rhs = Vector::zero();
                for k in 0..=(j + 1) {
                    let x = &lv[(j - k + 1) as usize];
                    rhs.add_scaled(&act.apply_vec(x, n + k, &wv)?, &binomial_int(j + 1, k as u64));
                }
                let inputs = format!("[L({j}), {}_({n})] {}", alg.space.name(v), m.space.name(w));
                if let Some(x) = vector_witness(inputs, &m.space, &lhs, &rhs) {
                    return Ok(Some(x));
                }
            }
        }
        Ok(None)
    });
    report.record("sl2_commutators", format!("modes ±{nw}"), outcome);
    report
}

/// [L(m),L(n)] = (m−n)L(m+n) + c/12 (m³−m) δ_{m+n,0} for |m|,|n| ≤ 2.
fn virasoro_check(m: &Module, c: &Scalar, sample: &[BasisId]) -> CheckReport {
    let mut report = CheckReport::new("Virasoro relations");
    let outcome = first_witness(sample.iter().copied(), |w| {
        let wv = Vector::basis(w);
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                let (la, lb, lab) = (m.l(a).expect("conformal"), m.l(b).expect("conformal"), m.l(a + b).expect("conformal"));
                let lhs = apply_op(la.as_ref(), &apply_op(lb.as_ref(), &wv)?)?
                    .sub(&apply_op(lb.as_ref(), &apply_op(la.as_ref(), &wv)?)?);
                let mut rhs = apply_op(lab.as_ref(), &wv)?.scaled(&Scalar::from_int(a - b));
                if a + b == 0 {
                    let k = c * &Scalar::from_frac(a * a * a - a, 12);
                    rhs.add_scaled(&wv, &k);
                }
                if let Some(x) = vector_witness(format!("[L({a}),L({b})] {}", m.space.name(w)), &m.space, &lhs, &rhs) {
                    return Ok(Some(x));
                }
            }
        }
        Ok(None)
    });
    report.record("virasoro", "|m|,|n| <= 2", outcome);
    report
}

fn l0_minus_weight(m: &Module, l0: &dyn Operator, x: &Vector) -> Result<Vector> {
    let mut out = apply_op(l0, x)?;
    for (id, c) in x.iter() {
        let wt = m.space.weight(*id)?.to_scalar();
        out.add_term(*id, &-(c * &wt));
    }
    Ok(out)
}

/// (L(0) − n)w = 0 for every w of weight n.
pub fn ordinary_weight_check(m: &Module, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new("ordinary weights");
    let outcome = match m.l(0) {
        None => Err(Error::Eval(format!("{} has no L(0)", m.name))),
        Some(l0) => first_witness(cfg.sample(&m.space), |w| {
            let x = l0_minus_weight(m, l0.as_ref(), &Vector::basis(w))?;
            Ok(vector_witness(format!("(L(0) - wt) {}", m.space.name(w)), &m.space, &x, &Vector::zero()))
        }),
    };
    report.record("ordinary_weight", "L(0)w = (wt w)w", outcome);
    report
}

/// (L(0) − n) preserves each cell and (L(0) − n)^N = 0 with N the cell's chain length.
pub fn generalized_weight_check(m: &Module, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new("generalized weights");
    let outcome = match m.l(0) {
        None => Err(Error::Eval(format!("{} has no L(0)", m.name))),
        Some(l0) => first_witness(cfg.sample(&m.space), |w| {
            let b = m.space.basis(w).expect("sampled");
            let cell = m.space.cell(&b.degree, b.weight);
            let chain = cell
                .iter()
                .filter_map(|id| m.space.basis(*id))
                .map(|x| x.jordan)
                .max()
                .unwrap_or(0);
            let mut x = Vector::basis(w);
            for _ in 0..=chain {
                x = l0_minus_weight(m, l0.as_ref(), &x)?;
                if let Some(id) = x.ids().find(|id| !cell.contains(id)) {
                    return Ok(Some(Witness::new(
                        format!("(L(0) - wt) {}", m.space.name(w)),
                        None,
                        format!("component {} outside the cell", m.space.name(id)),
                        "stays in its cell",
                    )));
                }
            }
            Ok(vector_witness(
                format!("(L(0) - wt)^{} {}", chain + 1, m.space.name(w)),
                &m.space,
                &x,
                &Vector::zero(),
            ))
        }),
    };
    report.record("generalized_weight", "(L(0) - n)^N = 0 on W_[n]", outcome);
    report
}

/// wt(v_n w) = wt v + wt w − n − 1, wt(L(j)w) = wt w − j, and
/// [L(0), v_n] = (L(0)v)_n + (−n−1) v_n on the sampled table.
pub fn weight_formula_check(m: &Module, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(format!("{}: weight formula", m.name));
    let alg = &m.algebra;
    let act = m.bound();
    let vs = cfg.sample(&alg.space);
    let ws = cfg.sample(&m.space);
    let nw = cfg.window;
    let mut entries = 0usize;
    let outcome = first_witness(pairs(&vs, &ws), |(v, w)| {
        let Some((lo, hi)) = mode_window(&act, v, w, nw)? else { return Ok(None) };
        let expect_base = alg.space.weight(v)? + m.space.weight(w)?;
        for n in lo..=hi {
            let out = act.mode(v, w, n)?;
            entries += 1;
            let expect = expect_base - Exponent::int(n + 1);
            for (id, _) in out.iter() {
                let got = m.space.weight(*id)?;
                if got != expect {
                    return Ok(Some(Witness::new(
                        format!("{}_({n}) {}", alg.space.name(v), m.space.name(w)),
                        None,
                        format!("weight {got} ({})", m.space.name(*id)),
                        format!("weight {expect}"),
                    )));
                }
            }
        }
        Ok(None)
    });
    report.record("mode_weights", format!("wt(v_n w) = wt v + wt w - n - 1, modes ±{nw}"), outcome);
    let _ = entries;

    let outcome = first_witness(ws.iter().copied(), |w| {
        for j in [-1i64, 0, 1] {
            let Some(op) = m.l(j) else { continue };
            let expect = m.space.weight(w)? - Exponent::int(j);
            for (id, _) in op.apply_basis(w)?.iter() {
                let got = m.space.weight(*id)?;
                if got != expect {
                    return Ok(Some(Witness::new(
                        format!("L({j}) {}", m.space.name(w)),
                        None,
                        format!("weight {got}"),
                        format!("weight {expect}"),
                    )));
                }
            }
        }
        Ok(None)
    });
    report.record("sl2_weights", "wt(L(j)w) = wt w - j", outcome);

    if let (Some(l0w), Some(l0v)) = (m.l(0), alg.l(0)) {
        let outcome = first_witness(pairs(&vs, &ws), |(v, w)| {
            let wv = Vector::basis(w);
            let l0vv = l0v.apply_basis(v)?;
            for n in -nw..=nw {
                let lhs = apply_op(l0w.as_ref(), &act.apply(v, n, &wv)?)?
                    .sub(&act.apply(v, n, &apply_op(l0w.as_ref(), &wv)?)?);
                let rhs = act
                    .apply_vec(&l0vv, n, &wv)?
                    .add(&act.apply(v, n, &wv)?.scaled(&Scalar::from_int(-n - 1)));
                let inputs = format!("[L(0), {}_({n})] {}", alg.space.name(v), m.space.name(w));
                if let Some(x) = vector_witness(inputs, &m.space, &lhs, &rhs) {
                    return Ok(Some(x));
                }
            }
            Ok(None)
        });
        report.record("l0_commutator", "[L(0),v_n] = (L(0)v)_n + (-n-1)v_n", outcome);
    }
    report
}

/// L(0)_s acts on W_[n] as n.
pub struct SemisimpleL0 {
    pub space: Arc<Space>,
}

impl Operator for SemisimpleL0 {
    fn apply_basis(&self, id: BasisId) -> Result<Vector> {
        Ok(Vector::term(id, self.space.weight(id)?.to_scalar()))
    }
    fn describe(&self) -> Value {
        json!("semisimple_l0")
    }
}

/// L(0) − L(0)_s.
pub struct NilpotentL0 {
    pub l0: Arc<dyn Operator>,
    pub space: Arc<Space>,
}

impl Operator for NilpotentL0 {
    fn apply_basis(&self, id: BasisId) -> Result<Vector> {
        let mut out = self.l0.apply_basis(id)?;
        out.add_term(id, &-self.space.weight(id)?.to_scalar());
        Ok(out)
    }
    fn describe(&self) -> Value {
        json!({ "nilpotent_part_of": self.l0.describe() })
    }
}

/// [L(0)_s, v_n] = [L(0), v_n] and [L(0)_s, L(j)] = [L(0), L(j)] on the window.
pub fn semisimple_part_check(m: &Module, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(format!("{}: semisimple part of L(0)", m.name));
    let Some(l0) = m.l(0) else {
        report.record("semisimple_part", "", Err(Error::Eval(format!("{} has no L(0)", m.name))));
        return report;
    };
    let l0s: Arc<dyn Operator> = Arc::new(SemisimpleL0 { space: m.space.clone() });
    let act = m.bound();
    let alg = &m.algebra;
    let vs = cfg.sample(&alg.space);
    let ws = cfg.sample(&m.space);
    let nw = cfg.window;
    let comm = |a: &dyn Operator, f: &dyn Fn(&Vector) -> Result<Vector>, w: &Vector| -> Result<Vector> {
        Ok(apply_op(a, &f(w)?)?.sub(&f(&apply_op(a, w)?)?))
    };
    let outcome = first_witness(pairs(&vs, &ws), |(v, w)| {
        let wv = Vector::basis(w);
        for n in -nw..=nw {
            let vn = |x: &Vector| act.apply(v, n, x);
            let lhs = comm(l0s.as_ref(), &vn, &wv)?;
            let rhs = comm(l0.as_ref(), &vn, &wv)?;
            let inputs = format!("[L(0)_s, {}_({n})] {}", alg.space.name(v), m.space.name(w));
            if let Some(x) = vector_witness(inputs, &m.space, &lhs, &rhs) {
                return Ok(Some(x));
            }
        }
        Ok(None)
    });
    report.record("semisimple_modes", "[L(0)_s, v_n] = [L(0), v_n]", outcome);
    let outcome = first_witness(ws.iter().copied(), |w| {
        let wv = Vector::basis(w);
        for j in [-1i64, 0, 1] {
            let Some(lj) = m.l(j) else { continue };
            let f = |x: &Vector| apply_op(lj.as_ref(), x);
            let lhs = comm(l0s.as_ref(), &f, &wv)?;
            let rhs = comm(l0.as_ref(), &f, &wv)?;
            if let Some(x) = vector_witness(format!("[L(0)_s, L({j})] {}", m.space.name(w)), &m.space, &lhs, &rhs) {
                return Ok(Some(x));
            }
        }
        Ok(None)
    });
    report.record("semisimple_sl2", "[L(0)_s, L(j)] = [L(0), L(j)]", outcome);
    report
}

/// Opposite Jacobi identity, L(−1)-derivative and sl(2) commutators for Y^o, the opposite
/// weight rule, and x^{L(0)} L(j) x^{−L(0)} = x^{−j} L(j) on ordinary cells.
pub fn check_opposite_identities(m: &Module, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(format!("{}: opposite vertex operators, {}", m.name, cfg.describe()));
    let opp = match m.opposite() {
        Ok(o) => o,
        Err(e) => {
            report.record("opposite_jacobi", "", Err(e));
            return report;
        }
    };
    let alg = &m.algebra;
    let vs = cfg.sample(&alg.space);
    let ws = cfg.sample(&m.space);
    let nw = cfg.window;
    let triples = sample_triples(&alg.space, &m.space, cfg);
    jacobi_over_triples(&mut report, "opposite_jacobi", &alg.bound(), &opp, &triples, nw);

    let d = alg.derivation();
    let outcome = first_witness(pairs(&vs, &ws), |(v, w)| {
        let dv = d.apply_basis(v)?;
        let wv = Vector::basis(w);
        for n in -nw..=nw {
            let lhs = opp.apply_vec(&dv, n, &wv)?;
            let rhs = opp.apply(v, n - 1, &wv)?.scaled(&Scalar::from_int(-n));
            let inputs = format!("(L(-1){})^o_({n}) {}", alg.space.name(v), m.space.name(w));
            if let Some(x) = vector_witness(inputs, &m.space, &lhs, &rhs) {
                return Ok(Some(x));
            }
        }
        Ok(None)
    });
    report.record("opposite_derivative", "d/dx Y^o(v,x) = Y^o(L(-1)v,x)", outcome);

    if m.has_sl2() && alg.l(1).is_some() && alg.l(-1).is_some() {
        let outcome = first_witness(pairs(&vs, &ws), |(v, w)| {
            let lv: Vec<Vector> = [-1i64, 0, 1]
                .iter()
                .map(|j| apply_op(alg.l(*j).expect("sl2").as_ref(), &Vector::basis(v)))
                .collect::<Result<_>>()?;
            let wv = Vector::basis(w);
            for j in [1i64, 0, -1] {
                let lw = m.l(j).expect("sl2");
                for n in -nw..=nw {
                    // [v^o_n, L(j)] = Σ_{k=0}^{1−j} C(1−j, k) (L(−j−k)... written out per case
                    let lhs = opp
                        .apply(v, n, &apply_op(lw.as_ref(), &wv)?)?
                        .sub(&apply_op(lw.as_ref(), &opp.apply(v, n, &wv)?)?);
                    let mut rhs = Vector::zero();
                    let jj = -j;
                    for k in 0..=(jj + 1) {
                        // x^k Y^o(L(jj − k)v, x) contributes (L(jj − k)v)^o_{n+k}
                        let x = &lv[(jj - k + 1) as usize];
                        rhs.add_scaled(&opp.apply_vec(x, n + k, &wv)?, &binomial_int(jj + 1, k as u64));
                    }
                    let inputs = format!("[{}^o_({n}), L({j})] {}", alg.space.name(v), m.space.name(w));
                    if let Some(x) = vector_witness(inputs, &m.space, &lhs, &rhs) {
                        return Ok(Some(x));
                    }
                }
            }
            Ok(None)
        });
        report.record("opposite_sl2", "[Y^o(v,x), L(j)], j = 1, 0, -1", outcome);
    }

    let outcome = first_witness(pairs(&vs, &ws), |(v, w)| {
        let Some((lo, hi)) = mode_window(&opp, v, w, nw)? else { return Ok(None) };
        let expect_base = m.space.weight(w)? - alg.space.weight(v)?;
        for n in lo..=hi {
            let expect = expect_base + Exponent::int(n + 1);
            for (id, _) in opp.mode(v, w, n)?.iter() {
                let got = m.space.weight(*id)?;
                if got != expect {
                    return Ok(Some(Witness::new(
                        format!("{}^o_({n}) {}", alg.space.name(v), m.space.name(w)),
                        None,
                        format!("weight {got}"),
                        format!("weight {expect}"),
                    )));
                }
            }
        }
        Ok(None)
    });
    report.record("opposite_degree", "wt(v^o_n w) = wt w + n + 1 - wt v", outcome);

    let outcome = first_witness(ws.iter().copied(), |w| {
        let b = m.space.basis(w).expect("sampled");
        if b.jordan > 0 {
            return Ok(None);
        }
        for j in [-1i64, 0, 1] {
            let Some(op) = m.l(j) else { continue };
            let out = op.apply_basis(w)?;
            // x^{L(0)} L(j) x^{−L(0)} w = Σ x^{wt(component) − wt w} (component)
            for (id, _) in out.iter() {
                let shift = m.space.weight(*id)? - b.weight;
                if shift != Exponent::int(-j) {
                    return Ok(Some(Witness::new(
                        format!("x^L(0) L({j}) x^-L(0) {}", b.name),
                        None,
                        format!("x^({shift}) {}", m.space.name(*id)),
                        format!("x^({}) L({j})", -j),
                    )));
                }
            }
        }
        Ok(None)
    });
    report.record("conjugation", "x^L(0) L(j) x^-L(0) = x^-j L(j)", outcome);

    if let (ModuleOps::Conformal, AlgebraKind::Conformal { omega, .. }) = (&m.ops, &alg.kind) {
        let outcome = first_witness(ws.iter().copied(), |w| {
            let wv = Vector::basis(w);
            for k in -nw..=nw {
                let lhs = opp.apply_vec(omega, k, &wv)?;
                let rhs = apply_op(m.l(1 - k).expect("conformal").as_ref(), &wv)?;
                if let Some(x) = vector_witness(format!("omega^o_({k}) {}", m.space.name(w)), &m.space, &lhs, &rhs) {
                    return Ok(Some(x));
                }
            }
            Ok(None)
        });
        report.record("opposite_omega", "Y^o(omega,x) = sum L(n) x^(n-2)", outcome);
    }
    report
}

/// Entry-by-entry comparison of two module structures on the same ids.
pub fn compare_structures(a: &Module, b: &Module, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(format!("{} vs {}", a.name, b.name));
    let vs = cfg.sample(&a.algebra.space);
    let ws = cfg.sample(&a.space);
    let nw = cfg.window;
    let (x, y) = (a.bound(), b.bound());
    let outcome = first_witness(pairs(&vs, &ws), |(v, w)| {
        for n in -nw - 1..=nw {
            let l = x.mode(v, w, n)?;
            let r = y.mode(v, w, n)?;
            let inputs = format!("{}_({n}) {}", a.algebra.space.name(v), a.space.name(w));
            if let Some(z) = vector_witness(inputs, &a.space, &l, &r) {
                return Ok(Some(z));
            }
        }
        Ok(None)
    });
    report.record("action_tables", format!("modes ±{nw}"), outcome);
    let outcome = first_witness(ws.iter().copied(), |w| {
        for j in [-1i64, 0, 1] {
            match (a.l(j), b.l(j)) {
                (None, None) => {}
                (Some(p), Some(q)) => {
                    let l = p.apply_basis(w)?;
                    let r = q.apply_basis(w)?;
                    if let Some(z) = vector_witness(format!("L({j}) {}", a.space.name(w)), &a.space, &l, &r) {
                        return Ok(Some(z));
                    }
                }
                _ => {
                    return Ok(Some(Witness::new(format!("L({j})"), None, "present", "absent")));
                }
            }
        }
        Ok(None)
    });
    report.record("operators", "L(-1), L(0), L(1)", outcome);
    report
}

/// A linear map between modules over the same algebra.
pub struct ModuleMap {
    pub source: Arc<Module>,
    pub target: Arc<Module>,
    pub op: Arc<dyn Operator>,
}

/// Grading preservation, f(v_n w) = v_n f(w) and f L(j) = L(j) f on the window.
pub fn check_homomorphism(f: &ModuleMap, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(format!("{} -> {}: homomorphism", f.source.name, f.target.name));
    let (s, t) = (&f.source, &f.target);
    let vs = cfg.sample(&s.algebra.space);
    let ws = cfg.sample(&s.space);
    let nw = cfg.window;
    let outcome = first_witness(ws.iter().copied(), |w| {
        let b = s.space.basis(w).expect("sampled");
        for (id, _) in f.op.apply_basis(w)?.iter() {
            let c = t.space.basis(*id).ok_or_else(|| Error::Schema(format!("no basis vector {id}")))?;
            if c.degree != b.degree || c.weight != b.weight {
                return Ok(Some(Witness::new(
                    format!("f({})", b.name),
                    None,
                    format!("component {} in ({:?}, {})", c.name, c.degree.0, c.weight),
                    format!("cell ({:?}, {})", b.degree.0, b.weight),
                )));
            }
        }
        Ok(None)
    });
    report.record("grading_preserving", "", outcome);
    let (sa, ta) = (s.bound(), t.bound());
    let outcome = first_witness(pairs(&vs, &ws), |(v, w)| {
        let wv = Vector::basis(w);
        for n in -nw - 1..=nw {
            let lhs = apply_op(f.op.as_ref(), &sa.apply(v, n, &wv)?)?;
            let rhs = ta.apply(v, n, &apply_op(f.op.as_ref(), &wv)?)?;
            let inputs = format!("f({}_({n}) {})", s.algebra.space.name(v), s.space.name(w));
            if let Some(x) = vector_witness(inputs, &t.space, &lhs, &rhs) {
                return Ok(Some(x));
            }
        }
        Ok(None)
    });
    report.record("intertwines_action", "", outcome);
    let outcome = first_witness(ws.iter().copied(), |w| {
        let wv = Vector::basis(w);
        for j in [-1i64, 0, 1] {
            let (Some(ls), Some(lt)) = (s.l(j), t.l(j)) else { continue };
            let lhs = apply_op(f.op.as_ref(), &apply_op(ls.as_ref(), &wv)?)?;
            let rhs = apply_op(lt.as_ref(), &apply_op(f.op.as_ref(), &wv)?)?;
            if let Some(x) = vector_witness(format!("f L({j}) {}", s.space.name(w)), &t.space, &lhs, &rhs) {
                return Ok(Some(x));
            }
        }
        Ok(None)
    });
    report.record("intertwines_sl2", "", outcome);
    report
}

/// f′ : W₂′ → W₁′ with ⟨f′(w₂′), w₁⟩ = ⟨w₂′, f(w₁)⟩.
struct DualMapOp {
    f: Arc<dyn Operator>,
    source: Arc<Space>,
    target: Arc<Space>,
}

impl Operator for DualMapOp {
    fn apply_basis(&self, i: BasisId) -> Result<Vector> {
        let bi = self.target.basis(i).ok_or_else(|| Error::Schema(format!("no basis vector {i}")))?;
        let mut out = Vector::zero();
        for k in self.source.cell(&bi.degree, bi.weight) {
            out.add_term(k, &self.f.apply_basis(k)?.get(i));
        }
        Ok(out)
    }
    fn describe(&self) -> Value {
        json!({ "dual_of": self.f.describe() })
    }
}

/// The dual homomorphism between contragredient modules, verified to intertwine Y′.
pub fn dual_hom(f: &ModuleMap, cfg: &CheckConfig) -> Result<(ModuleMap, CheckReport)> {
    let check = check_homomorphism(f, cfg);
    if !check.all_passed() {
        let detail = check
            .failures()
            .next()
            .map(|c| format!("{}: {:?}", c.name, c.witness))
            .unwrap_or_default();
        return Err(Error::NotAHomomorphism(detail));
    }
    let s_dual = contragredient(&f.target)?;
    let t_dual = contragredient(&f.source)?;
    let g = ModuleMap {
        source: s_dual,
        target: t_dual,
        op: Arc::new(DualMapOp { f: f.op.clone(), source: f.source.space.clone(), target: f.target.space.clone() }),
    };
    let report = check_homomorphism(&g, cfg);
    Ok((g, report))
}
