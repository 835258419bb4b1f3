//! Concrete algebras and modules, the sl(2) feasibility solver, and JSON ingestion.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::action::{
    apply_op, mul_vectors, operator_from_json, CommAlgAction, ModeMap, ModeRange, MatrixOp, Multiplication,
    Operator, PolyDerivation, PolyMul, TableAction, TableMul, ZeroOp,
};
use crate::algebra::{AlgebraKind, CheckConfig, Sl2, VertexAlgebra};
use crate::error::{Error, Result};
use crate::grading::{BasisId, BasisVector, GroupElement, Space, Vector};
use crate::linalg::{Matrix, Solution};
use crate::modules::{contragredient, sl2_bracket_check, Module, ModuleOps, OppositeSign};
use crate::report::{CheckReport, Witness};
use crate::scalar::{Exponent, Scalar};

/// The underlying commutative associative algebra.
#[derive(Clone)]
pub enum Carrier {
    /// A finite basis with an explicit multiplication table.
    Finite { space: Space, unit: BasisId, mul: TableMul },
    /// ℂ[t] with wt t^k = weight_sign·k.
    Polynomial { var: String, weight_sign: i64 },
}

/// A commutative associative unital algebra with a derivation.
#[derive(Clone)]
pub struct CommAlgSpec {
    pub name: String,
    pub carrier: Carrier,
    pub derivation: Arc<dyn Operator>,
    pub kind: AlgebraKind,
}

const POLY_PROBE: BasisId = 6;

fn invalid(what: String) -> Error {
    Error::SpecInvalid(what)
}

impl CommAlgSpec {
    fn space(&self) -> Space {
        match &self.carrier {
            Carrier::Finite { space, .. } => space.clone(),
            Carrier::Polynomial { var, weight_sign } => Space::polynomial(var, *weight_sign),
        }
    }

    fn multiplication(&self) -> Arc<dyn Multiplication> {
        match &self.carrier {
            Carrier::Finite { mul, .. } => Arc::new(mul.clone()),
            Carrier::Polynomial { .. } => Arc::new(PolyMul),
        }
    }

    fn unit(&self) -> BasisId {
        match &self.carrier {
            Carrier::Finite { unit, .. } => *unit,
            Carrier::Polynomial { .. } => 0,
        }
    }

    fn probe_basis(&self) -> Vec<BasisId> {
        match &self.carrier {
            Carrier::Finite { space, .. } => (0..space.dim().unwrap_or(0) as BasisId).collect(),
            Carrier::Polynomial { .. } => (0..=POLY_PROBE).collect(),
        }
    }

    /// Unit, commutativity and associativity of the table, and the Leibniz rule for D.
    pub fn validate(&self) -> Result<()> {
        let mul = self.multiplication();
        let basis = self.probe_basis();
        let unit = self.unit();
        if let Carrier::Finite { space, mul: table, .. } = &self.carrier {
            if space.basis(unit).is_none() {
                return Err(invalid(format!("unit id {unit} is not a basis vector")));
            }
            for (&(a, b), v) in &table.0 {
                if space.basis(a).is_none() || space.basis(b).is_none() || v.ids().any(|i| space.basis(i).is_none()) {
                    return Err(invalid(format!("product ({a}, {b}) refers to unknown basis vectors")));
                }
            }
        }
        let name = |i: BasisId| self.space().name(i);
        for &a in &basis {
            if mul.mul_basis(unit, a) != Vector::basis(a) {
                return Err(invalid(format!("1·{} ≠ {}", name(a), name(a))));
            }
            for &b in &basis {
                if mul.mul_basis(a, b) != mul.mul_basis(b, a) {
                    return Err(invalid(format!("{}·{} ≠ {}·{}", name(a), name(b), name(b), name(a))));
                }
                let da = apply_op(self.derivation.as_ref(), &Vector::basis(a))?;
                let db = apply_op(self.derivation.as_ref(), &Vector::basis(b))?;
                let lhs = apply_op(self.derivation.as_ref(), &mul.mul_basis(a, b))?;
                let rhs = mul_vectors(mul.as_ref(), &da, &Vector::basis(b))
                    .add(&mul_vectors(mul.as_ref(), &Vector::basis(a), &db));
                if lhs != rhs {
                    return Err(invalid(format!("D({}·{}) violates the Leibniz rule", name(a), name(b))));
                }
                if matches!(self.carrier, Carrier::Finite { .. }) {
                    for &c in &basis {
                        let l = mul_vectors(mul.as_ref(), &mul.mul_basis(a, b), &Vector::basis(c));
                        let r = mul_vectors(mul.as_ref(), &Vector::basis(a), &mul.mul_basis(b, c));
                        if l != r {
                            return Err(invalid(format!("({}·{})·{} ≠ {}·({}·{})", name(a), name(b), name(c), name(a), name(b), name(c))));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn generators_json(&self) -> Value {
        let multiplication = match &self.carrier {
            Carrier::Finite { mul, .. } => Value::Array(
                mul.0.iter().map(|((a, b), v)| json!([a, b, v.to_json()])).collect(),
            ),
            Carrier::Polynomial { .. } => json!("polynomial"),
        };
        json!({
            "preset": "comm_alg",
            "unit": self.unit(),
            "multiplication": multiplication,
            "derivation": self.derivation.describe(),
        })
    }
}

/// Smallest M with D^M a = 0, searched up to `cap` steps.
fn nilpotence_index(d: &dyn Operator, a: BasisId, cap: u32) -> Option<u32> {
    let mut x = Vector::basis(a);
    for m in 1..=cap {
        x = apply_op(d, &x).ok()?;
        if x.is_empty() {
            return Some(m);
        }
    }
    None
}

/// Y(a,x)b = (e^{xD}a)·b.
pub fn build_comm_alg_va(spec: &CommAlgSpec) -> Result<Arc<VertexAlgebra>> {
    spec.validate()?;
    let d = spec.derivation.clone();
    let carrier = spec.carrier.clone();
    let nil_bound: Box<dyn Fn(BasisId) -> Option<u32> + Send + Sync> = Box::new(move |a| match &carrier {
        Carrier::Finite { space, .. } => nilpotence_index(d.as_ref(), a, space.dim().unwrap_or(0) as u32 + 1),
        // D lowers degree by at most one, so D^{k+1} t^k = 0 whenever D is nilpotent on t^k.
        Carrier::Polynomial { .. } => nilpotence_index(d.as_ref(), a, a + 1),
    });
    let action = CommAlgAction::new(
        spec.multiplication(),
        spec.derivation.clone(),
        nil_bound,
        json!({ "generators": spec.generators_json() }),
    );
    Ok(Arc::new(VertexAlgebra {
        name: spec.name.clone(),
        space: Arc::new(spec.space()),
        action: crate::action::Cached::wrap(Arc::new(action)),
        vacuum: Vector::basis(spec.unit()),
        kind: spec.kind.clone(),
    }))
}

fn poly_derivation(terms: &[(u32, i64)]) -> Arc<dyn Operator> {
    let coeffs: Vec<(u32, Scalar)> = terms.iter().map(|(j, c)| (*j, Scalar::from_int(*c))).collect();
    Arc::new(PolyDerivation::new(&coeffs))
}

/// ℂ[t] with D = −d/dt and (L(−1), L(0), L(1)) = (D, tD, t²D); wt t^k = −k.
pub fn build_poly() -> Arc<VertexAlgebra> {
    let spec = CommAlgSpec {
        name: "C[t], D = -d/dt".into(),
        carrier: Carrier::Polynomial { var: "t".into(), weight_sign: -1 },
        derivation: poly_derivation(&[(0, -1)]),
        kind: AlgebraKind::Mobius(Sl2 {
            lm1: poly_derivation(&[(0, -1)]),
            l0: poly_derivation(&[(1, -1)]),
            lp1: poly_derivation(&[(2, -1)]),
        }),
    };
    build_comm_alg_va(&spec).expect("polynomial spec is valid")
}

/// ℂ[t] with D = t²d/dt and (L(−1), L(0), L(1)) = (t²d/dt, t d/dt, d/dt); wt t^k = k.
pub fn build_poly_mobius_lb() -> Arc<VertexAlgebra> {
    let spec = CommAlgSpec {
        name: "C[t], D = t^2 d/dt".into(),
        carrier: Carrier::Polynomial { var: "t".into(), weight_sign: 1 },
        derivation: poly_derivation(&[(2, 1)]),
        kind: AlgebraKind::Mobius(Sl2 {
            lm1: poly_derivation(&[(2, 1)]),
            l0: poly_derivation(&[(1, 1)]),
            lp1: poly_derivation(&[(0, 1)]),
        }),
    };
    build_comm_alg_va(&spec).expect("polynomial spec is valid")
}

fn finite_carrier(names: &[&str], unit: BasisId, products: &[(BasisId, BasisId, Vector)]) -> Carrier {
    let space = Space::simple(&names.iter().map(|n| (*n, 0)).collect::<Vec<_>>());
    let mut mul = BTreeMap::new();
    for (a, b, v) in products {
        mul.insert((*a, *b), v.clone());
        mul.insert((*b, *a), v.clone());
    }
    Carrier::Finite { space, unit, mul: TableMul(mul) }
}

/// A = ℂ1 ⊕ ℂa with a² = 0, D(1) = 0, D(a) = a.
pub fn build_two_dim() -> Arc<VertexAlgebra> {
    let spec = CommAlgSpec {
        name: "C1 + Ca, a^2 = 0, D(a) = a".into(),
        carrier: finite_carrier(
            &["1", "a"],
            0,
            &[(0, 0, Vector::basis(0)), (0, 1, Vector::basis(1))],
        ),
        derivation: Arc::new(MatrixOp::from_columns([(1, Vector::basis(1))])),
        kind: AlgebraKind::Plain,
    };
    build_comm_alg_va(&spec).expect("two-dimensional spec is valid")
}

/// ℂ[t]/(t^k) with zero derivation, all weights 0.
pub fn build_truncated_poly_trivial_d(k: u32) -> Arc<VertexAlgebra> {
    let names: Vec<String> = (0..k)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "t".to_string(),
            _ => format!("t^{i}"),
        })
        .collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut products = Vec::new();
    for i in 0..k {
        for j in i..k {
            if i + j < k {
                products.push((i, j, Vector::basis(i + j)));
            }
        }
    }
    let spec = CommAlgSpec {
        name: format!("C[t]/(t^{k}), D = 0"),
        carrier: finite_carrier(&name_refs, 0, &products),
        derivation: Arc::new(ZeroOp),
        kind: AlgebraKind::Plain,
    };
    build_comm_alg_va(&spec).expect("truncated polynomial spec is valid")
}

fn trivial_table() -> Arc<dyn ModeMap> {
    let mut entries = BTreeMap::new();
    entries.insert((0, 0, -1), Vector::basis(0));
    Arc::new(TableAction::new(entries))
}

/// V = ℂ𝟏 with L(j) = 0.
pub fn build_trivial() -> Arc<VertexAlgebra> {
    Arc::new(VertexAlgebra {
        name: "trivial".into(),
        space: Arc::new(Space::simple(&[("1", 0)])),
        action: trivial_table(),
        vacuum: Vector::basis(0),
        kind: AlgebraKind::Mobius(Sl2 { lm1: Arc::new(ZeroOp), l0: Arc::new(ZeroOp), lp1: Arc::new(ZeroOp) }),
    })
}

/// V = ℂ𝟏 with ω = 0 and c = 0.
pub fn build_degenerate_conformal() -> Arc<VertexAlgebra> {
    Arc::new(VertexAlgebra {
        name: "trivial conformal".into(),
        space: Arc::new(Space::simple(&[("1", 0)])),
        action: trivial_table(),
        vacuum: Vector::basis(0),
        kind: AlgebraKind::Conformal { omega: Vector::zero(), central_charge: Scalar::zero() },
    })
}

/// W = ℂw₀ ⊕ ℂw₁ over V = ℂ𝟏 with L(0) = [[n,1],[0,n]].
pub fn build_jordan_toy(n: i64) -> Arc<Module> {
    let alg = build_trivial();
    let basis = (0..2)
        .map(|k| BasisVector {
            id: k,
            name: format!("w{k}"),
            degree: GroupElement::zero(0),
            weight: Exponent::int(n),
            jordan: k,
        })
        .collect();
    let space = Space::explicit(0, basis).expect("ids are positions");
    let mut entries = BTreeMap::new();
    entries.insert((0, 0, -1), Vector::basis(0));
    entries.insert((0, 1, -1), Vector::basis(1));
    let l0 = MatrixOp::from_columns([
        (0, Vector::term(0, Scalar::from_int(n))),
        (1, Vector::from_pairs([(0, Scalar::one()), (1, Scalar::from_int(n))])),
    ]);
    Arc::new(Module::new(
        "Jordan block",
        alg,
        Arc::new(space),
        Arc::new(TableAction::new(entries)),
        ModuleOps::Grading(Arc::new(l0)),
    ))
}

/// Outcome of the sl(2) search on a finite-dimensional vertex algebra.
#[derive(Clone, Debug)]
pub enum Sl2Feasibility {
    Infeasible { certificate: String },
    Feasible { l0: Vec<Scalar>, l1: Matrix },
    /// The algebra's own operators satisfy every constraint on the degree window only.
    WindowFeasible { max_degree: i64 },
}

struct Equation {
    coeffs: Vec<(usize, Scalar)>,
    rhs: Scalar,
    label: String,
}

fn system_matrix(eqs: &[Equation], unknowns: usize) -> (Matrix, Vec<Scalar>) {
    let mut m = Matrix::zero(eqs.len(), unknowns);
    for (r, e) in eqs.iter().enumerate() {
        for (c, x) in &e.coeffs {
            let cur = m.get(r, *c).clone();
            m.set(r, *c, &cur + x);
        }
    }
    (m, eqs.iter().map(|e| e.rhs.clone()).collect())
}

/// Solves the system; on inconsistency, names the shortest inconsistent prefix.
fn solve_with_certificate(eqs: &[Equation], unknowns: usize) -> std::result::Result<Vec<Scalar>, String> {
    let (m, b) = system_matrix(eqs, unknowns);
    match m.solve(&b) {
        Solution::Unique(x) | Solution::Underdetermined { particular: x, .. } => Ok(x),
        Solution::Inconsistent { .. } => {
            let (mut lo, mut hi) = (1usize, eqs.len());
            while lo < hi {
                let mid = (lo + hi) / 2;
                let (m, b) = system_matrix(&eqs[..mid], unknowns);
                if matches!(m.solve(&b), Solution::Inconsistent { .. }) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            let last = &eqs[lo - 1];
            let mut merged: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (i, c) in &last.coeffs {
                *merged.entry(*i).or_default() += c;
            }
            Err(if merged.values().all(Scalar::is_zero) {
                format!("{} reduces to 0 = {}", last.label, last.rhs)
            } else if lo == 2 {
                format!("{} contradicts the constraint before it", last.label)
            } else {
                format!("{} contradicts the {} constraints before it", last.label, lo - 1)
            })
        }
    }
}

fn mode_matrix(alg: &VertexAlgebra, v: BasisId, n: i64, dim: usize) -> Result<Matrix> {
    let mut m = Matrix::zero(dim, dim);
    for j in 0..dim {
        for (i, c) in alg.action.mode(v, j as BasisId, n)?.iter() {
            m.set(*i as usize, j, c.clone());
        }
    }
    Ok(m)
}

fn op_matrix(op: &dyn Operator, dim: usize) -> Result<Matrix> {
    let mut m = Matrix::zero(dim, dim);
    for j in 0..dim {
        for (i, c) in op.apply_basis(j as BasisId)?.iter() {
            m.set(*i as usize, j, c.clone());
        }
    }
    Ok(m)
}

/// Searches for L(−1), L(0), L(1) making a finite-dimensional vertex algebra Möbius.
/// L(−1) is forced to be v ↦ v₋₂𝟏; L(0) is sought as an integral diagonal operator obeying
/// L(0)𝟏 = 0, [L(0), L(−1)] = L(−1) and the weight formula; L(1) is then a linear unknown.
pub fn prove_no_sl2(alg: &VertexAlgebra, window: i64) -> Result<(Sl2Feasibility, CheckReport)> {
    let dim = alg.space.dim().ok_or(Error::NotFiniteDimensional)?;
    let mut report = CheckReport::new(format!("{}: sl(2) feasibility, modes ±{window}", alg.name));
    let d = op_matrix(alg.derivation().as_ref(), dim)?;
    let name = |i: usize| alg.space.name(i as BasisId);

    let mut eqs = Vec::new();
    for (i, c) in alg.vacuum.iter() {
        if !c.is_zero() {
            eqs.push(Equation {
                coeffs: vec![(*i as usize, Scalar::one())],
                rhs: Scalar::zero(),
                label: format!("L(0)1 = 0 at {}", name(*i as usize)),
            });
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            if !d.get(i, j).is_zero() {
                // ([L(0), D] − D)_{ij} = (h_i − h_j − 1) D_{ij}
                eqs.push(Equation {
                    coeffs: vec![(i, Scalar::one()), (j, -Scalar::one())],
                    rhs: Scalar::one(),
                    label: format!(
                        "[L(0), L(-1)] = L(-1) with L(-1){} = {} (coefficient of {})",
                        name(j),
                        Vector::from_pairs((0..dim).map(|k| (k as BasisId, d.get(k, j).clone()))).render(&alg.space),
                        name(i)
                    ),
                });
            }
        }
    }
    let mut modes: BTreeMap<(usize, i64), Matrix> = BTreeMap::new();
    for u in 0..dim {
        for n in -window - 3..=window + 2 {
            modes.insert((u, n), mode_matrix(alg, u as BasisId, n, dim)?);
        }
    }
    for ((u, n), m) in &modes {
        for v in 0..dim {
            for w in 0..dim {
                if !m.get(w, v).is_zero() {
                    let mut coeffs = vec![(w, Scalar::one()), (*u, -Scalar::one()), (v, -Scalar::one())];
                    coeffs.retain(|(_, c)| !c.is_zero());
                    eqs.push(Equation {
                        coeffs,
                        rhs: Scalar::from_int(-n - 1),
                        label: format!("wt({}_({n}) {}) with component {}", name(*u), name(v), name(w)),
                    });
                }
            }
        }
    }
    let h = match solve_with_certificate(&eqs, dim) {
        Ok(h) => h,
        Err(cert) => {
            report.record(
                "l0_constraints",
                format!("{} linear constraints on diagonal L(0)", eqs.len()),
                Ok(Some(Witness::new("diagonal L(0)", None, cert.clone(), "a consistent system"))),
            );
            return Ok((Sl2Feasibility::Infeasible { certificate: cert }, report));
        }
    };
    if let Some(i) = h.iter().position(|x| !(x.is_real() && x.re.is_integer())) {
        let cert = format!("the weight of {} is forced to be {}, not an integer", name(i), h[i]);
        report.record("l0_constraints", "", Ok(Some(Witness::new("diagonal L(0)", None, cert.clone(), "integral weights"))));
        return Ok((Sl2Feasibility::Infeasible { certificate: cert }, report));
    }
    report.record("l0_constraints", format!("{} constraints, weights {:?}", eqs.len(), h.iter().map(|x| x.to_string()).collect::<Vec<_>>()), Ok(None));

    let l0 = Matrix::from_rows((0..dim).map(|i| (0..dim).map(|j| if i == j { h[i].clone() } else { Scalar::zero() }).collect()).collect())?;
    // sl2-1 and sl2-2 involve only L(−1) and L(0).
    for ((u, n), m) in &modes {
        if *n < -window - 1 || *n > window {
            continue;
        }
        let du = d.apply(&unit_col(*u, dim));
        let lhs1 = d.commutator(m)?;
        let rhs1 = combo(&modes, &du, *n, dim);
        let l0u = l0.apply(&unit_col(*u, dim));
        let lhs2 = l0.commutator(m)?;
        let rhs2 = combo(&modes, &l0u, *n, dim).add(&combo(&modes, &du, n + 1, dim))?;
        for (label, l, r) in [("[L(-1), v_n] = (L(-1)v)_n", lhs1, rhs1), ("[L(0), v_n] = (L(0)v)_n + (L(-1)v)_(n+1)", lhs2, rhs2)] {
            if let Some((i, j, a, b)) = l.first_difference(&r) {
                let cert = format!("{label} fails for v = {}, n = {n} at ({}, {}): {a} vs {b}", name(*u), name(i), name(j));
                report.record("sl2_commutators", "", Ok(Some(Witness::new(format!("v={}, n={n}", name(*u)), None, a, b))));
                return Ok((Sl2Feasibility::Infeasible { certificate: cert }, report));
            }
        }
    }
    report.record("sl2_commutators", "L(-1) and L(0) relations", Ok(None));

    let x = |i: usize, j: usize| i * dim + j;
    let mut eqs = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            // [L(0), X] = −X
            let c = &(&h[i] - &h[j]) + &Scalar::one();
            if !c.is_zero() {
                eqs.push(Equation { coeffs: vec![(x(i, j), c)], rhs: Scalar::zero(), label: format!("[L(0), L(1)] = -L(1) at ({}, {})", name(i), name(j)) });
            }
            // [L(−1), X] = −2 L(0)
            let mut coeffs = Vec::new();
            for k in 0..dim {
                coeffs.push((x(k, j), d.get(i, k).clone()));
                coeffs.push((x(i, k), -d.get(k, j).clone()));
            }
            coeffs.retain(|(_, c)| !c.is_zero());
            let rhs = if i == j { &Scalar::from_int(-2) * &h[i] } else { Scalar::zero() };
            eqs.push(Equation { coeffs, rhs, label: format!("[L(-1), L(1)] = -2L(0) at ({}, {})", name(i), name(j)) });
        }
        let coeffs: Vec<_> = alg.vacuum.iter().map(|(j, c)| (x(i, *j as usize), c.clone())).collect();
        eqs.push(Equation { coeffs, rhs: Scalar::zero(), label: format!("L(1)1 = 0 at {}", name(i)) });
    }
    for ((u, n), m) in &modes {
        if *n < -window - 1 || *n > window {
            continue;
        }
        let du = d.apply(&unit_col(*u, dim));
        let rhs_m = m_at(&modes, *u, n + 1, dim)
            .scale(&(&Scalar::from_int(2) * &h[*u]))
            .add(&combo(&modes, &du, n + 2, dim))?;
        for i in 0..dim {
            for j in 0..dim {
                // (X M − M X − Σ_k X_{k u} M_k)_{ij}
                let mut coeffs = Vec::new();
                for l in 0..dim {
                    coeffs.push((x(i, l), m.get(l, j).clone()));
                    coeffs.push((x(l, j), -m.get(i, l).clone()));
                    coeffs.push((x(l, *u), -m_at(&modes, l, *n, dim).get(i, j).clone()));
                }
                coeffs.retain(|(_, c)| !c.is_zero());
                if coeffs.is_empty() && rhs_m.get(i, j).is_zero() {
                    continue;
                }
                eqs.push(Equation {
                    coeffs,
                    rhs: rhs_m.get(i, j).clone(),
                    label: format!("[L(1), {}_({n})] at ({}, {})", name(*u), name(i), name(j)),
                });
            }
        }
    }
    match solve_with_certificate(&eqs, dim * dim) {
        Ok(sol) => {
            let l1 = Matrix::from_rows((0..dim).map(|i| (0..dim).map(|j| sol[x(i, j)].clone()).collect()).collect())?;
            report.record("l1_constraints", format!("{} linear constraints on L(1)", eqs.len()), Ok(None));
            Ok((Sl2Feasibility::Feasible { l0: h, l1 }, report))
        }
        Err(cert) => {
            report.record("l1_constraints", "", Ok(Some(Witness::new("L(1)", None, cert.clone(), "a consistent system"))));
            Ok((Sl2Feasibility::Infeasible { certificate: cert }, report))
        }
    }
}

fn unit_col(u: usize, dim: usize) -> Vec<Scalar> {
    (0..dim).map(|i| if i == u { Scalar::one() } else { Scalar::zero() }).collect()
}

fn m_at(modes: &BTreeMap<(usize, i64), Matrix>, u: usize, n: i64, dim: usize) -> Matrix {
    modes.get(&(u, n)).cloned().unwrap_or_else(|| Matrix::zero(dim, dim))
}

/// Σ_k c_k M(k, n).
fn combo(modes: &BTreeMap<(usize, i64), Matrix>, c: &[Scalar], n: i64, dim: usize) -> Matrix {
    let mut out = Matrix::zero(dim, dim);
    for (k, ck) in c.iter().enumerate() {
        if !ck.is_zero() {
            out = out.add(&m_at(modes, k, n, dim).scale(ck)).expect("square");
        }
    }
    out
}

/// The infinite-dimensional case: checks that the algebra's own sl(2) operators satisfy the
/// constraints on basis vectors of degree at most `max_degree`.
pub fn prove_no_sl2_windowed(alg: &Arc<VertexAlgebra>, max_degree: i64, window: i64) -> Result<(Sl2Feasibility, CheckReport)> {
    let mut report = CheckReport::new(format!("{}: sl(2) feasibility on degrees <= {max_degree}", alg.name));
    let AlgebraKind::Mobius(s) = &alg.kind else {
        return Err(Error::Eval(format!("{} carries no sl(2) operators to test", alg.name)));
    };
    let sample: Vec<BasisId> = (0..=max_degree as BasisId).filter(|i| alg.space.basis(*i).is_some()).collect();
    let d = alg.derivation();
    let outcome = crate::algebra::first_witness(sample.iter().copied(), |v| {
        let l = s.lm1.apply_basis(v)?;
        let r = d.apply_basis(v)?;
        Ok(crate::algebra::vector_witness(format!("L(-1){}", alg.space.name(v)), &alg.space, &l, &r))
    });
    report.record("derivation_forced", "L(-1)v = v_(-2)1", outcome);
    report.merge(sl2_bracket_check(&alg.space, &|j| s.get(j), &sample));
    let cfg = CheckConfig::new(-max_degree, max_degree, window);
    let mut axioms = crate::algebra::check_vacuum_sl2(alg);
    axioms.merge(crate::modules::weight_formula_check(&Module::adjoint(alg), &cfg));
    report.merge(axioms);
    let outcome = if report.all_passed() {
        Sl2Feasibility::WindowFeasible { max_degree }
    } else {
        Sl2Feasibility::Infeasible {
            certificate: report.failures().next().map(|c| c.name.clone()).unwrap_or_default(),
        }
    };
    Ok((outcome, report))
}

/// For a commutative vertex algebra ω₀ = 0, so L(−1) = D must vanish; reports the obstruction.
pub fn conformal_vector_search(alg: &VertexAlgebra, cfg: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::new(format!("{}: conformal vector search", alg.name));
    let sample = cfg.sample(&alg.space);
    let act = alg.bound();
    let commutative = crate::algebra::first_witness(
        sample.iter().flat_map(|u| sample.iter().map(move |v| (*u, *v))),
        |(u, v)| {
            let r = act.range(u, v)?;
            Ok(r.hi.filter(|h| *h >= 0).map(|h| {
                Witness::new(format!("{}_({h}) {}", alg.space.name(u), alg.space.name(v)), None, "nonzero", "0")
            }))
        },
    );
    let commutative_ok = matches!(commutative, Ok(None));
    report.record("nonnegative_modes_vanish", "u_n v = 0 for n >= 0", commutative);
    if !commutative_ok {
        return report;
    }
    let d = alg.derivation();
    let outcome = crate::algebra::first_witness(sample.iter().copied(), |v| {
        let dv = d.apply_basis(v)?;
        Ok((!dv.is_empty()).then(|| {
            Witness::new(
                format!("v = {}", alg.space.name(v)),
                None,
                format!("L(-1)v = v_(-2)1 = {}", dv.render(&alg.space)),
                "omega_0 v = 0 for every omega",
            )
        }))
    });
    report.record("conformal_vector", "omega_0 = L(-1) = D forces D = 0", outcome);
    if matches!(report.failures().next(), None) {
        let outcome = crate::algebra::first_witness(sample.iter().copied(), |v| {
            let w = alg.space.weight(v)?;
            Ok((w != Exponent::ZERO).then(|| {
                Witness::new(format!("v = {}", alg.space.name(v)), None, format!("weight {w}"), "weight 0 since omega = 0")
            }))
        });
        report.record("zero_omega_weights", "L(0) = omega_1 = 0", outcome);
    }
    report
}

/// An algebra, module or Lie-module file.
pub enum Structure {
    Algebra(Arc<VertexAlgebra>),
    Module(Arc<Module>),
    Lie(crate::lie::LieFile),
}

pub fn ingest_file(path: &Path) -> Result<Structure> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)?;
    ingest_value(&v, path.parent())
}

pub fn ingest_value(v: &Value, base: Option<&Path>) -> Result<Structure> {
    if v.get("bracket_constants").is_some() {
        return Ok(Structure::Lie(crate::lie::LieFile::from_json(v)?));
    }
    if v.get("over").is_some() || v.get("contragredient_of").is_some() {
        return Ok(Structure::Module(module_from_json(v, base)?));
    }
    Ok(Structure::Algebra(algebra_from_json(v)?))
}

fn violation(name: &str, witness: String) -> Error {
    Error::InvariantViolation { name: name.into(), witness }
}

fn check_vector(space: &Space, v: &Vector, what: &str) -> Result<()> {
    match v.ids().find(|i| space.basis(*i).is_none()) {
        Some(i) => Err(violation("basis_ids", format!("{what} refers to unknown basis id {i}"))),
        None => Ok(()),
    }
}

fn mode_from_json(v: Option<&Value>, space: &Space) -> Result<AlgebraKind> {
    let Some(mode) = v else { return Ok(AlgebraKind::Plain) };
    match mode.get("kind").and_then(Value::as_str).unwrap_or("plain") {
        "plain" => Ok(AlgebraKind::Plain),
        "mobius" => {
            let op = |k: &str| {
                operator_from_json(mode.get(k).ok_or_else(|| Error::Schema(format!("mobius mode needs {k}")))?)
            };
            Ok(AlgebraKind::Mobius(Sl2 { lm1: op("L(-1)")?, l0: op("L(0)")?, lp1: op("L(1)")? }))
        }
        "conformal" => {
            let omega = Vector::from_json(mode.get("omega").ok_or_else(|| Error::Schema("conformal mode needs omega".into()))?)?;
            check_vector(space, &omega, "omega")?;
            let c = match mode.get("central_charge") {
                Some(c) => Scalar::from_json(c)?,
                None => Scalar::zero(),
            };
            Ok(AlgebraKind::Conformal { omega, central_charge: c })
        }
        k => Err(Error::Schema(format!("unknown mode kind {k:?}"))),
    }
}

/// Table entries take precedence over the generator.
struct Overlay {
    table: TableAction,
    base: Arc<dyn ModeMap>,
}

impl ModeMap for Overlay {
    fn mode(&self, v: BasisId, w: BasisId, n: i64) -> Result<Vector> {
        match self.table.entries.get(&(v, w, n)) {
            Some(x) => Ok(x.clone()),
            None => self.base.mode(v, w, n),
        }
    }
    fn range(&self, v: BasisId, w: BasisId) -> Result<ModeRange> {
        Ok(self.table.range(v, w)?.union(&self.base.range(v, w)?))
    }
    fn describe(&self) -> Value {
        let mut out = match self.base.describe() {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        out.insert("y_table".into(), self.table.to_json());
        Value::Object(out)
    }
}

fn generators_from_json(g: &Value, space: &Space, kind: &AlgebraKind, name: &str) -> Result<Arc<VertexAlgebra>> {
    if g.get("preset").and_then(Value::as_str) != Some("comm_alg") {
        return Err(Error::Schema(format!("unknown generator preset in {g}")));
    }
    let derivation = operator_from_json(g.get("derivation").ok_or_else(|| Error::Schema("comm_alg needs a derivation".into()))?)?;
    let unit = g.get("unit").and_then(Value::as_u64).unwrap_or(0) as BasisId;
    let carrier = match g.get("multiplication") {
        Some(Value::String(s)) if s == "polynomial" => match &space.shape {
            crate::grading::SpaceShape::Polynomial { var, weight_sign } => {
                Carrier::Polynomial { var: var.clone(), weight_sign: *weight_sign }
            }
            _ => return Err(Error::Schema("polynomial multiplication needs a polynomial space".into())),
        },
        Some(Value::Array(rows)) => {
            let mut mul = BTreeMap::new();
            for r in rows {
                let r = r.as_array().filter(|r| r.len() == 3).ok_or_else(|| Error::Schema("product must be [a, b, vector]".into()))?;
                let id = |x: &Value| x.as_u64().map(|i| i as BasisId).ok_or_else(|| Error::Schema("bad product id".into()));
                mul.insert((id(&r[0])?, id(&r[1])?), Vector::from_json(&r[2])?);
            }
            Carrier::Finite { space: space.clone(), unit, mul: TableMul(mul) }
        }
        _ => return Err(Error::Schema("comm_alg needs a multiplication".into())),
    };
    build_comm_alg_va(&CommAlgSpec { name: name.into(), carrier, derivation, kind: kind.clone() })
}

/// Loads and validates a vertex algebra: ids, vacuum and ω placement, weight homogeneity of the table.
pub fn algebra_from_json(v: &Value) -> Result<Arc<VertexAlgebra>> {
    let name = v.get("name").and_then(Value::as_str).unwrap_or("algebra").to_string();
    let space = Space::from_json(v.get("space").ok_or_else(|| Error::Schema("algebra needs a space".into()))?)?;
    let vacuum = Vector::from_json(v.get("vacuum").ok_or_else(|| Error::Schema("algebra needs a vacuum".into()))?)?;
    check_vector(&space, &vacuum, "vacuum")?;
    let kind = mode_from_json(v.get("mode"), &space)?;
    let zero_degree = GroupElement::zero(space.group_rank);
    for id in vacuum.ids() {
        let b = space.basis(id).expect("checked");
        if b.degree != zero_degree || b.weight != Exponent::ZERO {
            return Err(violation(
                "vacuum_placement",
                format!("vacuum component {} has degree {:?} and weight {}", b.name, b.degree.0, b.weight),
            ));
        }
    }
    if let AlgebraKind::Conformal { omega, .. } = &kind {
        for id in omega.ids() {
            let b = space.basis(id).expect("checked");
            if b.degree != zero_degree || b.weight != Exponent::int(2) {
                return Err(violation(
                    "omega_placement",
                    format!("omega component {} has degree {:?} and weight {}", b.name, b.degree.0, b.weight),
                ));
            }
        }
    }
    let table = match v.get("y_table") {
        Some(t) => Some(TableAction::from_json(t)?),
        None => None,
    };
    if let Some(t) = &table {
        for ((a, b, n), out) in &t.entries {
            for id in [*a, *b].into_iter().chain(out.ids()) {
                if space.basis(id).is_none() {
                    return Err(violation("basis_ids", format!("y_table entry ({a}, {b}, {n}) refers to unknown id {id}")));
                }
            }
            if kind.is_graded() {
                let expect = space.weight(*a)? + space.weight(*b)? - Exponent::int(n + 1);
                if let Some(id) = out.ids().find(|i| space.weight(*i).map(|w| w != expect).unwrap_or(true)) {
                    return Err(violation(
                        "weight_homogeneity",
                        format!("{}_({n}) {} has component {} of weight {}, expected {expect}", space.name(*a), space.name(*b), space.name(id), space.weight(id)?),
                    ));
                }
            }
        }
    }
    let action: Arc<dyn ModeMap> = match (v.get("generators"), table) {
        (Some(g), t) => {
            let base = generators_from_json(g, &space, &kind, &name)?;
            if base.vacuum != vacuum {
                return Err(violation("vacuum_placement", "vacuum differs from the generator's unit".into()));
            }
            match t {
                Some(table) => crate::action::Cached::wrap(Arc::new(Overlay { table, base: base.action.clone() })),
                None => base.action.clone(),
            }
        }
        (None, Some(t)) => Arc::new(t),
        (None, None) => return Err(Error::Schema("algebra needs a y_table or generators".into())),
    };
    Ok(Arc::new(VertexAlgebra { name, space: Arc::new(space), action, vacuum, kind }))
}

pub fn algebra_to_json(alg: &VertexAlgebra) -> Value {
    let mut out = Map::new();
    out.insert("name".into(), json!(alg.name));
    out.insert("space".into(), alg.space.to_json());
    out.insert("vacuum".into(), alg.vacuum.to_json());
    out.insert("mode".into(), alg.to_json_mode());
    if let Value::Object(m) = alg.action.describe() {
        out.extend(m);
    }
    Value::Object(out)
}

fn resolve_over(v: &Value, base: Option<&Path>) -> Result<Arc<VertexAlgebra>> {
    match v {
        Value::String(p) => {
            let path = base.map(|b| b.join(p)).unwrap_or_else(|| p.into());
            match ingest_file(&path)? {
                Structure::Algebra(a) => Ok(a),
                _ => Err(Error::Schema(format!("{p} is not a vertex algebra file"))),
            }
        }
        other => algebra_from_json(other),
    }
}

/// Loads a module: an explicit table, the adjoint module, or a contragredient.
pub fn module_from_json(v: &Value, base: Option<&Path>) -> Result<Arc<Module>> {
    if let Some(inner) = v.get("contragredient_of") {
        let m = module_from_json(inner, base)?;
        return contragredient(&m);
    }
    let alg = resolve_over(v.get("over").expect("dispatched on over"), base)?;
    let sign = match v.get("opposite_convention").and_then(Value::as_str) {
        None | Some("standard") => OppositeSign::Standard,
        Some("unsigned") => OppositeSign::Unsigned,
        Some(s) => return Err(Error::Schema(format!("unknown opposite_convention {s:?}"))),
    };
    if v.get("adjoint").and_then(Value::as_bool) == Some(true) {
        let adj = Module::adjoint(&alg);
        let mut m = Module::new(
            v.get("name").and_then(Value::as_str).unwrap_or(&alg.name),
            alg.clone(),
            adj.space.clone(),
            adj.action.clone(),
            adj.ops.clone(),
        )
        .with_opposite_sign(sign);
        m = m.with_origin(crate::modules::ModuleOrigin::Adjoint);
        return Ok(Arc::new(m));
    }
    let name = v.get("name").and_then(Value::as_str).unwrap_or("module").to_string();
    let space = Space::from_json(v.get("space").ok_or_else(|| Error::Schema("module needs a space".into()))?)?;
    let table = TableAction::from_json(
        v.get("y_table").ok_or_else(|| Error::Schema("module needs a y_table or adjoint: true".into()))?,
    )?;
    for ((a, b, n), out) in &table.entries {
        if alg.space.basis(*a).is_none() || space.basis(*b).is_none() || out.ids().any(|i| space.basis(i).is_none()) {
            return Err(violation("basis_ids", format!("y_table entry ({a}, {b}, {n}) refers to unknown ids")));
        }
    }
    let ops = match v.get("ops") {
        None => ModuleOps::Plain,
        Some(o) => match o.get("kind").and_then(Value::as_str).unwrap_or("plain") {
            "plain" => ModuleOps::Plain,
            "grading" => ModuleOps::Grading(operator_from_json(
                o.get("L(0)").ok_or_else(|| Error::Schema("grading ops need L(0)".into()))?,
            )?),
            "conformal" => ModuleOps::Conformal,
            "mobius" => match mode_from_json(Some(o), &space)? {
                AlgebraKind::Mobius(s) => ModuleOps::Mobius(s),
                _ => unreachable!("kind is mobius"),
            },
            k => return Err(Error::Schema(format!("unknown module ops kind {k:?}"))),
        },
    };
    Ok(Arc::new(Module::new(name, alg, Arc::new(space), Arc::new(table), ops).with_opposite_sign(sign)))
}

pub fn module_to_json(m: &Module) -> Value {
    use crate::modules::ModuleOrigin;
    let sign = match m.opposite_sign {
        OppositeSign::Standard => "standard",
        OppositeSign::Unsigned => "unsigned",
    };
    match &m.origin {
        ModuleOrigin::Contragredient(inner) => json!({ "name": m.name, "contragredient_of": module_to_json(inner) }),
        ModuleOrigin::Adjoint => json!({
            "name": m.name,
            "over": algebra_to_json(&m.algebra),
            "adjoint": true,
            "opposite_convention": sign,
        }),
        ModuleOrigin::Table => {
            let mut out = Map::new();
            out.insert("name".into(), json!(m.name));
            out.insert("over".into(), algebra_to_json(&m.algebra));
            out.insert("space".into(), m.space.to_json());
            if let Value::Object(t) = m.action.describe() {
                out.extend(t);
            }
            out.insert("ops".into(), m.ops_json());
            out.insert("opposite_convention".into(), json!(sign));
            Value::Object(out)
        }
    }
}
