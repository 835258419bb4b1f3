//! Doubly graded vector spaces: a grading by ℤ^r and a (generalized) weight grading.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernel::Coeff;
use crate::report::{CheckReport, Witness};
use crate::scalar::{Exponent, Scalar};

pub type BasisId = u32;

/// Element of the grading group ℤ^r.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(pub Vec<i64>);

impl GroupElement {
    pub fn zero(rank: usize) -> Self {
        GroupElement(vec![0; rank])
    }

    pub fn add(&self, other: &GroupElement) -> GroupElement {
        GroupElement(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> GroupElement {
        GroupElement(self.0.iter().map(|a| -a).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|a| *a == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisVector {
    pub id: BasisId,
    pub name: String,
    pub degree: GroupElement,
    pub weight: Exponent,
    /// Position in an L(0) Jordan chain; 0 for eigenvectors.
    pub jordan: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpaceShape {
    /// Finitely many basis vectors listed explicitly; ids are positions.
    Explicit(Vec<BasisVector>),
    /// Monomials `var^k`, k ≥ 0, with id k, trivial group degree and weight `weight_sign·k`.
    Polynomial { var: String, weight_sign: i64 },
    /// Graded dual: same ids and weights, negated degrees, reversed Jordan positions.
    Dual(Arc<Space>),
}

/// A vector space with a basis of homogeneous vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Space {
    pub shape: SpaceShape,
    pub group_rank: usize,
    /// Generalized (Jordan chains allowed) rather than ordinary weight spaces.
    pub generalized: bool,
}

impl Space {
    pub fn explicit(group_rank: usize, basis: Vec<BasisVector>) -> Result<Space> {
        for (i, b) in basis.iter().enumerate() {
            if b.id as usize != i {
                return Err(Error::Schema(format!("basis id {} at position {i}", b.id)));
            }
            if b.degree.0.len() != group_rank {
                return Err(Error::Schema(format!("degree of {} has wrong rank", b.name)));
            }
        }
        let generalized = basis.iter().any(|b| b.jordan > 0);
        Ok(Space { shape: SpaceShape::Explicit(basis), group_rank, generalized })
    }

    /// Basis with the given names and weights, trivial group, ordinary.
    pub fn simple(names_weights: &[(&str, i64)]) -> Space {
        let basis = names_weights
            .iter()
            .enumerate()
            .map(|(i, (n, w))| BasisVector {
                id: i as BasisId,
                name: n.to_string(),
                degree: GroupElement::zero(0),
                weight: Exponent::int(*w),
                jordan: 0,
            })
            .collect();
        Space { shape: SpaceShape::Explicit(basis), group_rank: 0, generalized: false }
    }

    pub fn polynomial(var: &str, weight_sign: i64) -> Space {
        Space {
            shape: SpaceShape::Polynomial { var: var.to_string(), weight_sign },
            group_rank: 0,
            generalized: false,
        }
    }

    pub fn dual(space: &Arc<Space>) -> Space {
        Space {
            shape: SpaceShape::Dual(space.clone()),
            group_rank: space.group_rank,
            generalized: space.generalized,
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.shape {
            SpaceShape::Explicit(_) => true,
            SpaceShape::Polynomial { .. } => false,
            SpaceShape::Dual(s) => s.is_finite(),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.shape {
            SpaceShape::Explicit(b) => Some(b.len()),
            SpaceShape::Polynomial { .. } => None,
            SpaceShape::Dual(s) => s.dim(),
        }
    }

    pub fn basis(&self, id: BasisId) -> Option<BasisVector> {
        match &self.shape {
            SpaceShape::Explicit(b) => b.get(id as usize).cloned(),
            SpaceShape::Polynomial { var, weight_sign } => Some(BasisVector {
                id,
                name: poly_name(var, id),
                degree: GroupElement::zero(0),
                weight: Exponent::int(weight_sign * i64::from(id)),
                jordan: 0,
            }),
            SpaceShape::Dual(s) => s.basis(id).map(|b| {
                let top = s.chain_top(&b);
                BasisVector {
                    id,
                    name: format!("{}*", b.name),
                    degree: b.degree.neg(),
                    weight: b.weight,
                    jordan: top - b.jordan,
                }
            }),
        }
    }

    /// Largest Jordan position in the cell of `b`.
    fn chain_top(&self, b: &BasisVector) -> u32 {
        self.cell(&b.degree, b.weight)
            .iter()
            .filter_map(|id| self.basis(*id))
            .map(|v| v.jordan)
            .max()
            .unwrap_or(0)
    }

    pub fn weight(&self, id: BasisId) -> Result<Exponent> {
        self.basis(id)
            .map(|b| b.weight)
            .ok_or_else(|| Error::Schema(format!("no basis vector with id {id}")))
    }

    pub fn degree(&self, id: BasisId) -> Result<GroupElement> {
        self.basis(id)
            .map(|b| b.degree)
            .ok_or_else(|| Error::Schema(format!("no basis vector with id {id}")))
    }

    pub fn name(&self, id: BasisId) -> String {
        self.basis(id).map(|b| b.name).unwrap_or_else(|| format!("#{id}"))
    }

    pub fn id_of(&self, name: &str) -> Option<BasisId> {
        match &self.shape {
            SpaceShape::Explicit(b) => b.iter().find(|v| v.name == name).map(|v| v.id),
            SpaceShape::Polynomial { var, .. } => parse_poly_name(var, name),
            SpaceShape::Dual(s) => name.strip_suffix('*').and_then(|n| s.id_of(n)),
        }
    }

    /// Basis vectors whose weight has real part in `[lo, hi]`, in id order.
    pub fn basis_in_weights(&self, lo: i64, hi: i64) -> Vec<BasisVector> {
        match &self.shape {
            SpaceShape::Explicit(b) => b
                .iter()
                .filter(|v| v.weight.re >= Rational64::from_integer(lo) && v.weight.re <= Rational64::from_integer(hi))
                .cloned()
                .collect(),
            SpaceShape::Polynomial { weight_sign, .. } => {
                let (kmin, kmax) = if *weight_sign >= 0 { (lo.max(0), hi) } else { ((-hi).max(0), -lo) };
                (kmin..=kmax.max(kmin - 1))
                    .filter_map(|k| self.basis(k as BasisId))
                    .collect()
            }
            SpaceShape::Dual(s) => s
                .basis_in_weights(lo, hi)
                .iter()
                .filter_map(|b| self.basis(b.id))
                .collect(),
        }
    }

    /// All basis vectors of a finite space.
    pub fn all_basis(&self) -> Result<Vec<BasisVector>> {
        match &self.shape {
            SpaceShape::Explicit(b) => Ok(b.clone()),
            SpaceShape::Polynomial { .. } => Err(Error::NotFiniteDimensional),
            SpaceShape::Dual(s) => Ok(s.all_basis()?.iter().filter_map(|b| self.basis(b.id)).collect()),
        }
    }

    /// Ids of the cell with the given degree and weight.
    pub fn cell(&self, degree: &GroupElement, weight: Exponent) -> Vec<BasisId> {
        let w = weight.re.floor().to_integer();
        let lo = w - 1;
        let hi = w + 1;
        self.basis_in_weights(lo, hi)
            .into_iter()
            .filter(|b| &b.degree == degree && b.weight == weight)
            .map(|b| b.id)
            .collect()
    }

    /// Minimal real part of the weights, if the space is lower bounded.
    pub fn min_weight(&self) -> Option<Rational64> {
        match &self.shape {
            SpaceShape::Explicit(b) => b.iter().map(|v| v.weight.re).min(),
            SpaceShape::Polynomial { weight_sign, .. } => {
                if *weight_sign >= 0 {
                    Some(Rational64::from_integer(0))
                } else {
                    None
                }
            }
            SpaceShape::Dual(s) => s.min_weight(),
        }
    }

    pub fn max_weight(&self) -> Option<Rational64> {
        match &self.shape {
            SpaceShape::Explicit(b) => b.iter().map(|v| v.weight.re).max(),
            SpaceShape::Polynomial { weight_sign, .. } => {
                if *weight_sign <= 0 {
                    Some(Rational64::from_integer(0))
                } else {
                    None
                }
            }
            SpaceShape::Dual(s) => s.max_weight(),
        }
    }

    pub fn lower_bounded(&self) -> bool {
        self.min_weight().is_some()
    }

    pub fn to_json(&self) -> Value {
        match &self.shape {
            SpaceShape::Explicit(basis) => {
                let mut cells: Vec<Value> = Vec::new();
                let mut i = 0;
                while i < basis.len() {
                    let b = &basis[i];
                    let mut j = i;
                    while j < basis.len() && basis[j].degree == b.degree && basis[j].weight == b.weight {
                        j += 1;
                    }
                    let run = &basis[i..j];
                    cells.push(json!({
                        "degree": b.degree.0,
                        "weight": b.weight.to_json(),
                        "dim": run.len(),
                        "jordan": run.iter().map(|v| v.jordan).collect::<Vec<_>>(),
                        "names": run.iter().map(|v| v.name.clone()).collect::<Vec<_>>(),
                    }));
                    i = j;
                }
                json!({
                    "group_rank": self.group_rank,
                    "flags": { "generalized": self.generalized },
                    "cells": cells,
                })
            }
            SpaceShape::Polynomial { var, weight_sign } => json!({
                "group_rank": 0,
                "flags": { "generalized": false },
                "generators": { "preset": "polynomial", "var": var, "weight_sign": weight_sign },
            }),
            SpaceShape::Dual(s) => json!({ "dual_of": s.to_json() }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Space> {
        if let Some(inner) = v.get("dual_of") {
            return Ok(Space::dual(&Arc::new(Space::from_json(inner)?)));
        }
        let rank = v.get("group_rank").and_then(Value::as_u64).unwrap_or(0) as usize;
        let generalized = v
            .get("flags")
            .and_then(|f| f.get("generalized"))
            .and_then(Value::as_bool)
            .unwrap_or(false);
        if let Some(g) = v.get("generators") {
            let preset = g.get("preset").and_then(Value::as_str).unwrap_or("");
            if preset != "polynomial" {
                return Err(Error::Schema(format!("unknown space preset {preset:?}")));
            }
            let var = g.get("var").and_then(Value::as_str).unwrap_or("t");
            let sign = g.get("weight_sign").and_then(Value::as_i64).unwrap_or(1);
            return Ok(Space::polynomial(var, sign));
        }
        let cells = v
            .get("cells")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Schema("space needs cells or generators".into()))?;
        let mut basis = Vec::new();
        for cell in cells {
            let degree: Vec<i64> = match cell.get("degree") {
                Some(d) => serde_json::from_value(d.clone())?,
                None => vec![0; rank],
            };
            let weight = Exponent::from_json(
                cell.get("weight")
                    .ok_or_else(|| Error::Schema("cell without weight".into()))?,
            )?;
            let dim = cell
                .get("dim")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Schema("cell without dim".into()))? as usize;
            let jordan: Vec<u32> = match cell.get("jordan") {
                Some(j) => serde_json::from_value(j.clone())?,
                None => vec![0; dim],
            };
            let names: Vec<String> = match cell.get("names") {
                Some(n) => serde_json::from_value(n.clone())?,
                None => (0..dim).map(|k| format!("e{}", basis.len() + k)).collect(),
            };
            if jordan.len() != dim || names.len() != dim {
                return Err(Error::Schema("cell lists do not match dim".into()));
            }
            for k in 0..dim {
                basis.push(BasisVector {
                    id: basis.len() as BasisId,
                    name: names[k].clone(),
                    degree: GroupElement(degree.clone()),
                    weight,
                    jordan: jordan[k],
                });
            }
        }
        let mut s = Space::explicit(rank, basis)?;
        s.generalized = s.generalized || generalized;
        Ok(s)
    }
}

fn poly_name(var: &str, k: BasisId) -> String {
    match k {
        0 => "1".to_string(),
        1 => var.to_string(),
        _ => format!("{var}^{k}"),
    }
}

fn parse_poly_name(var: &str, name: &str) -> Option<BasisId> {
    if name == "1" {
        return Some(0);
    }
    if name == var {
        return Some(1);
    }
    name.strip_prefix(var)?.strip_prefix('^')?.parse().ok()
}

/// A finite linear combination of basis vectors.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Vector(BTreeMap<BasisId, Scalar>);

impl Vector {
    pub fn zero() -> Self {
        Vector::default()
    }

    pub fn basis(id: BasisId) -> Self {
        Vector::term(id, Scalar::one())
    }

    pub fn term(id: BasisId, c: Scalar) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(id, c);
        }
        Vector(m)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (BasisId, Scalar)>) -> Self {
        let mut v = Vector::zero();
        for (id, c) in pairs {
            v.add_term(id, &c);
        }
        v
    }

    pub fn add_term(&mut self, id: BasisId, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(id).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&id);
        }
    }

    pub fn get(&self, id: BasisId) -> Scalar {
        self.0.get(&id).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisId, &Scalar)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        for (id, c) in &other.0 {
            out.add_term(*id, c);
        }
        out
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        for (id, c) in &other.0 {
            out.add_term(*id, &-c);
        }
        out
    }

    pub fn scaled(&self, s: &Scalar) -> Vector {
        if s.is_zero() {
            return Vector::zero();
        }
        Vector(self.0.iter().map(|(id, c)| (*id, c * s)).collect())
    }

    pub fn add_scaled(&mut self, other: &Vector, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        for (id, c) in &other.0 {
            self.add_term(*id, &(c * s));
        }
    }

    /// Sum of the coefficient-wise products with another vector over the same basis.
    pub fn dot(&self, other: &Vector) -> Scalar {
        self.0
            .iter()
            .filter_map(|(id, c)| other.0.get(id).map(|d| c * d))
            .sum()
    }

    pub fn ids(&self) -> impl Iterator<Item = BasisId> + '_ {
        self.0.keys().copied()
    }

    pub fn render(&self, space: &Space) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        self.0
            .iter()
            .map(|(id, c)| {
                let n = space.name(*id);
                if c.is_one() {
                    n
                } else {
                    format!("({c})*{n}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.0.iter().map(|(id, c)| json!([id, c.to_json()])).collect())
    }

    pub fn from_json(v: &Value) -> Result<Vector> {
        let items = v
            .as_array()
            .ok_or_else(|| Error::Schema("vector must be a list of [id, scalar]".into()))?;
        let mut out = Vector::zero();
        for item in items {
            let pair = item
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Schema("vector entry must be [id, scalar]".into()))?;
            let id = pair[0]
                .as_u64()
                .ok_or_else(|| Error::Schema("vector id must be a nonnegative integer".into()))?;
            out.add_term(id as BasisId, &Scalar::from_json(&pair[1])?);
        }
        Ok(out)
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|(id, c)| format!("{c}·e{id}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Coeff for Vector {
    fn zero() -> Self {
        Vector::zero()
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (id, c) in &other.0 {
            self.add_term(*id, c);
        }
    }
    fn scale(&self, s: &Scalar) -> Self {
        self.scaled(s)
    }
    fn to_json(&self) -> Value {
        Vector::to_json(self)
    }
}

/// An element of the formal completion, known on finitely many weights.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CompletionElement(pub BTreeMap<Exponent, Vector>);

impl CompletionElement {
    pub fn from_vector(v: &Vector, space: &Space) -> Result<Self> {
        let mut out: BTreeMap<Exponent, Vector> = BTreeMap::new();
        for (id, c) in v.iter() {
            out.entry(space.weight(*id)?).or_default().add_term(*id, c);
        }
        Ok(CompletionElement(out))
    }

    pub fn component(&self, n: Exponent) -> Vector {
        self.0.get(&n).cloned().unwrap_or_default()
    }
}

/// π_n: the weight-n homogeneous component.
pub fn project(v: &Vector, space: &Space, n: Exponent) -> Result<Vector> {
    let mut out = Vector::zero();
    for (id, c) in v.iter() {
        if space.weight(*id)? == n {
            out.add_term(*id, c);
        }
    }
    Ok(out)
}

/// Canonical pairing of an element of the graded dual (same ids) with a vector.
/// Dual basis vectors pair only with their own cell, so the pairing is id-wise.
pub fn pair(wprime: &Vector, w: &Vector) -> Scalar {
    wprime.dot(w)
}

/// Pairing with a completion element: only the matching weight component contributes.
pub fn pair_completion(wprime: &Vector, w: &CompletionElement) -> Scalar {
    w.0.values().map(|v| wprime.dot(v)).sum()
}

/// Basis ids grouped by the class of their weight modulo ℤ.
pub fn congruence_decompose(basis: &[BasisVector]) -> BTreeMap<Exponent, Vec<BasisId>> {
    let mut out: BTreeMap<Exponent, Vec<BasisId>> = BTreeMap::new();
    for b in basis {
        out.entry(b.weight.mod_integers()).or_default().push(b.id);
    }
    out
}

/// Structural audit of a space on a weight window: unique cells, ordinary spaces without
/// Jordan positions, lower truncation in each (degree, class) column, global lower bound.
pub fn audit_space(space: &Space, lo: i64, hi: i64) -> CheckReport {
    let mut report = CheckReport::new("grading audit");
    let basis = space.basis_in_weights(lo, hi);
    let mut seen = std::collections::BTreeSet::new();
    let dup = basis.iter().find(|b| !seen.insert(b.id));
    match dup {
        None => report.pass("grading_cells", format!("{} basis vectors in weights [{lo}, {hi}]", basis.len())),
        Some(b) => report.fail(
            "grading_cells",
            "",
            Witness::new(b.name.clone(), None, "listed twice", "exactly one cell"),
        ),
    }
    let bad_jordan = basis.iter().find(|b| !space.generalized && b.jordan > 0);
    match bad_jordan {
        None => report.pass("ordinary_jordan", ""),
        Some(b) => report.fail(
            "ordinary_jordan",
            "",
            Witness::new(b.name.clone(), None, format!("jordan {}", b.jordan), "0"),
        ),
    }
    // columns (degree, weight class): the window must reach the bottom of each column
    let mut columns: BTreeMap<(GroupElement, Exponent), Rational64> = BTreeMap::new();
    for b in &basis {
        let key = (b.degree.clone(), b.weight.mod_integers());
        let e = columns.entry(key).or_insert(b.weight.re);
        if b.weight.re < *e {
            *e = b.weight.re;
        }
    }
    let deeper = space.basis_in_weights(lo - 1, lo - 1);
    let unbounded = deeper.iter().find(|b| {
        columns.contains_key(&(b.degree.clone(), b.weight.mod_integers())) || space.min_weight().is_none()
    });
    match (space.min_weight(), unbounded) {
        (Some(_), None) => report.pass("weight_lower_bound", format!("{} columns bounded below", columns.len())),
        (_, Some(b)) => report.fail(
            "weight_lower_bound",
            "weights continue below the window",
            Witness::new(b.name.clone(), None, format!("weight {}", b.weight), format!("weight ≥ {lo}")),
        ),
        (None, None) => report.fail(
            "weight_lower_bound",
            "space is not lower bounded",
            Witness::new("space", None, "no minimal weight", "a minimal weight"),
        ),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> Space {
        Space::simple(&[("b0", 0), ("b1", 1)])
    }

    #[test]
    fn projection() {
        let s = two();
        let v = Vector::from_pairs(vec![(0, Scalar::one()), (1, Scalar::from_int(2))]);
        assert_eq!(project(&v, &s, Exponent::int(0)).unwrap(), Vector::basis(0));
        assert!(project(&v, &s, Exponent::int(5)).unwrap().is_empty());
    }

    #[test]
    fn pairing() {
        assert_eq!(pair(&Vector::basis(0), &Vector::basis(1)), Scalar::zero());
        assert_eq!(pair(&Vector::basis(0), &Vector::term(0, Scalar::from_int(3))), Scalar::from_int(3));
        let s = two();
        let v = Vector::from_pairs(vec![(0, Scalar::from_int(4)), (1, Scalar::from_int(2))]);
        let c = CompletionElement::from_vector(&v, &s).unwrap();
        assert_eq!(pair_completion(&Vector::basis(1), &c), Scalar::from_int(2));
    }

    #[test]
    fn congruence_classes() {
        let s = Space::explicit(
            0,
            vec![
                BasisVector { id: 0, name: "a".into(), degree: GroupElement(vec![]), weight: Exponent::int(0), jordan: 0 },
                BasisVector { id: 1, name: "b".into(), degree: GroupElement(vec![]), weight: Exponent::frac(1, 2), jordan: 0 },
                BasisVector { id: 2, name: "c".into(), degree: GroupElement(vec![]), weight: Exponent::int(1), jordan: 0 },
            ],
        )
        .unwrap();
        let classes = congruence_decompose(&s.all_basis().unwrap());
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[&Exponent::ZERO], vec![0, 2]);
    }

    #[test]
    fn polynomial_spaces() {
        let up = Space::polynomial("t", 1);
        assert_eq!(up.basis_in_weights(0, 3).len(), 4);
        assert!(up.lower_bounded());
        let down = Space::polynomial("t", -1);
        assert_eq!(down.basis_in_weights(-8, 0).len(), 9);
        assert!(!down.lower_bounded());
        assert!(audit_space(&up, 0, 8).all_passed());
        assert!(audit_space(&down, -8, 0).failed("weight_lower_bound"));
        assert_eq!(up.id_of("t^3"), Some(3));
    }

    #[test]
    fn dual_flips_degree() {
        let s = Arc::new(
            Space::explicit(
                1,
                vec![BasisVector { id: 0, name: "a".into(), degree: GroupElement(vec![2]), weight: Exponent::int(1), jordan: 0 }],
            )
            .unwrap(),
        );
        let d = Space::dual(&s);
        assert_eq!(d.degree(0).unwrap(), GroupElement(vec![-2]));
        let json = s.to_json();
        assert_eq!(Space::from_json(&json).unwrap(), *s);
    }
}
