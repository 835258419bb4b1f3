//! Mode maps (v, w, n) ↦ v_n w and linear operators on graded spaces.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grading::{BasisId, Space, Vector};
use crate::scalar::{Exponent, Scalar};

/// Range of mode indices n for which v_n w may be nonzero.
/// `lo > hi` encodes the empty range; `None` means unbounded on that side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeRange {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl ModeRange {
    pub const FULL: ModeRange = ModeRange { lo: None, hi: None };
    pub const EMPTY: ModeRange = ModeRange { lo: Some(1), hi: Some(0) };

    pub fn new(lo: Option<i64>, hi: Option<i64>) -> Self {
        ModeRange { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        matches!((self.lo, self.hi), (Some(l), Some(h)) if l > h)
    }

    pub fn contains(&self, n: i64) -> bool {
        self.lo.map_or(true, |l| n >= l) && self.hi.map_or(true, |h| n <= h)
    }

    pub fn intersect(&self, other: &ModeRange) -> ModeRange {
        let lo = match (self.lo, other.lo) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        ModeRange { lo, hi }
    }

    pub fn union(&self, other: &ModeRange) -> ModeRange {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        let lo = match (self.lo, other.lo) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        };
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        ModeRange { lo, hi }
    }

    pub fn shift(&self, k: i64) -> ModeRange {
        if self.is_empty() {
            return *self;
        }
        ModeRange { lo: self.lo.map(|l| l + k), hi: self.hi.map(|h| h + k) }
    }

    /// {−n : n in range}.
    pub fn negate(&self) -> ModeRange {
        if self.is_empty() {
            return *self;
        }
        ModeRange { lo: self.hi.map(|h| -h), hi: self.lo.map(|l| -l) }
    }
}

/// The modes of a vertex operator map on basis vectors.
pub trait ModeMap: Send + Sync {
    fn mode(&self, v: BasisId, w: BasisId, n: i64) -> Result<Vector>;

    /// Indices outside the returned range give v_n w = 0.
    fn range(&self, v: BasisId, w: BasisId) -> Result<ModeRange>;

    /// JSON description (table or generator preset).
    fn describe(&self) -> Value;
}

/// Memoizing wrapper around a mode map.
pub struct Cached {
    inner: Arc<dyn ModeMap>,
    modes: Mutex<HashMap<(BasisId, BasisId, i64), Vector>>,
    ranges: Mutex<HashMap<(BasisId, BasisId), ModeRange>>,
}

impl Cached {
    pub fn wrap(inner: Arc<dyn ModeMap>) -> Arc<dyn ModeMap> {
        Arc::new(Cached { inner, modes: Mutex::default(), ranges: Mutex::default() })
    }
}

impl ModeMap for Cached {
    fn mode(&self, v: BasisId, w: BasisId, n: i64) -> Result<Vector> {
        if let Some(hit) = self.modes.lock().expect("mode cache").get(&(v, w, n)) {
            return Ok(hit.clone());
        }
        let out = self.inner.mode(v, w, n)?;
        self.modes.lock().expect("mode cache").insert((v, w, n), out.clone());
        Ok(out)
    }

    fn range(&self, v: BasisId, w: BasisId) -> Result<ModeRange> {
        if let Some(hit) = self.ranges.lock().expect("range cache").get(&(v, w)) {
            return Ok(*hit);
        }
        let out = self.inner.range(v, w)?;
        self.ranges.lock().expect("range cache").insert((v, w), out);
        Ok(out)
    }

    fn describe(&self) -> Value {
        self.inner.describe()
    }
}

/// An explicit structure-constant table; absent entries are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TableAction {
    pub entries: BTreeMap<(BasisId, BasisId, i64), Vector>,
}

impl TableAction {
    pub fn new(entries: BTreeMap<(BasisId, BasisId, i64), Vector>) -> Self {
        let entries = entries.into_iter().filter(|(_, v)| !v.is_empty()).collect();
        TableAction { entries }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::Schema("table must be a list of [u, v, n, vector]".into()))?;
        let mut entries = BTreeMap::new();
        for row in rows {
            let r = row
                .as_array()
                .filter(|r| r.len() == 4)
                .ok_or_else(|| Error::Schema("table row must be [u, v, n, vector]".into()))?;
            let id = |x: &Value| {
                x.as_u64()
                    .map(|i| i as BasisId)
                    .ok_or_else(|| Error::Schema("table ids must be nonnegative integers".into()))
            };
            let n = r[2].as_i64().ok_or_else(|| Error::Schema("mode index must be an integer".into()))?;
            let vec = Vector::from_json(&r[3])?;
            let slot: &mut Vector = entries.entry((id(&r[0])?, id(&r[1])?, n)).or_default();
            *slot = slot.add(&vec);
        }
        Ok(TableAction::new(entries))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.entries
                .iter()
                .map(|((u, v, n), vec)| json!([u, v, n, vec.to_json()]))
                .collect(),
        )
    }

    /// Tabulates every nonzero mode of `map` on the given basis pairs.
    pub fn tabulate(map: &dyn ModeMap, vs: &[BasisId], ws: &[BasisId]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for &v in vs {
            for &w in ws {
                let r = map.range(v, w)?;
                if r.is_empty() {
                    continue;
                }
                let (Some(lo), Some(hi)) = (r.lo, r.hi) else {
                    return Err(Error::UndefinedProduct(format!(
                        "mode range of ({v}, {w}) is unbounded; cannot tabulate"
                    )));
                };
                for n in lo..=hi {
                    let out = map.mode(v, w, n)?;
                    if !out.is_empty() {
                        entries.insert((v, w, n), out);
                    }
                }
            }
        }
        Ok(TableAction { entries })
    }
}

impl ModeMap for TableAction {
    fn mode(&self, v: BasisId, w: BasisId, n: i64) -> Result<Vector> {
        Ok(self.entries.get(&(v, w, n)).cloned().unwrap_or_default())
    }

    fn range(&self, v: BasisId, w: BasisId) -> Result<ModeRange> {
        let mut it = self.entries.range((v, w, i64::MIN)..=(v, w, i64::MAX)).map(|((_, _, n), _)| *n);
        match it.next() {
            None => Ok(ModeRange::EMPTY),
            Some(first) => {
                let last = it.last().unwrap_or(first);
                Ok(ModeRange::new(Some(first), Some(last)))
            }
        }
    }

    fn describe(&self) -> Value {
        json!({ "y_table": self.to_json() })
    }
}

/// A linear operator given on basis vectors.
pub trait Operator: Send + Sync {
    fn apply_basis(&self, id: BasisId) -> Result<Vector>;
    fn describe(&self) -> Value;
}

pub fn apply_op(op: &dyn Operator, v: &Vector) -> Result<Vector> {
    let mut out = Vector::zero();
    for (id, c) in v.iter() {
        out.add_scaled(&op.apply_basis(*id)?, c);
    }
    Ok(out)
}

pub struct ZeroOp;

impl Operator for ZeroOp {
    fn apply_basis(&self, _id: BasisId) -> Result<Vector> {
        Ok(Vector::zero())
    }
    fn describe(&self) -> Value {
        json!("zero")
    }
}

/// Sparse matrix by columns; absent columns are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MatrixOp(pub BTreeMap<BasisId, Vector>);

impl MatrixOp {
    pub fn from_columns(cols: impl IntoIterator<Item = (BasisId, Vector)>) -> Self {
        MatrixOp(cols.into_iter().filter(|(_, v)| !v.is_empty()).collect())
    }

    pub fn to_json(&self) -> Value {
        json!({ "matrix": self.0.iter().map(|(id, v)| json!([id, v.to_json()])).collect::<Vec<_>>() })
    }
}

impl Operator for MatrixOp {
    fn apply_basis(&self, id: BasisId) -> Result<Vector> {
        Ok(self.0.get(&id).cloned().unwrap_or_default())
    }
    fn describe(&self) -> Value {
        self.to_json()
    }
}

/// p(t)·d/dt on ℂ[t] with basis id k ↔ t^k.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyDerivation {
    pub coeffs: BTreeMap<u32, Scalar>,
}

impl PolyDerivation {
    pub fn new(coeffs: &[(u32, Scalar)]) -> Self {
        PolyDerivation {
            coeffs: coeffs.iter().filter(|(_, c)| !c.is_zero()).cloned().collect(),
        }
    }

    /// Local nilpotence on t^k: true unless p has a term of degree ≥ 1.
    pub fn is_locally_nilpotent(&self) -> bool {
        self.coeffs.keys().all(|j| *j == 0)
    }

    pub fn to_json(&self) -> Value {
        json!({ "poly_derivation": self.coeffs.iter().map(|(j, c)| json!([j, c.to_json()])).collect::<Vec<_>>() })
    }
}

impl Operator for PolyDerivation {
    fn apply_basis(&self, k: BasisId) -> Result<Vector> {
        if k == 0 {
            return Ok(Vector::zero());
        }
        let kk = Scalar::from_int(i64::from(k));
        Ok(Vector::from_pairs(self.coeffs.iter().map(|(j, c)| (k - 1 + j, c * &kk))))
    }
    fn describe(&self) -> Value {
        self.to_json()
    }
}

pub fn operator_from_json(v: &Value) -> Result<Arc<dyn Operator>> {
    if v.as_str() == Some("zero") {
        return Ok(Arc::new(ZeroOp));
    }
    if let Some(cols) = v.get("matrix") {
        let cols = cols.as_array().ok_or_else(|| Error::Schema("matrix must be a list".into()))?;
        let mut out = BTreeMap::new();
        for c in cols {
            let pair = c
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Schema("matrix column must be [id, vector]".into()))?;
            let id = pair[0].as_u64().ok_or_else(|| Error::Schema("bad column id".into()))? as BasisId;
            out.insert(id, Vector::from_json(&pair[1])?);
        }
        return Ok(Arc::new(MatrixOp::from_columns(out)));
    }
    if let Some(p) = v.get("poly_derivation") {
        return Ok(Arc::new(poly_derivation_from_json(p)?));
    }
    Err(Error::Schema(format!("unknown operator description {v}")))
}

pub fn poly_derivation_from_json(p: &Value) -> Result<PolyDerivation> {
    let items = p.as_array().ok_or_else(|| Error::Schema("poly_derivation must be a list".into()))?;
    let mut coeffs = Vec::new();
    for it in items {
        let pair = it
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Error::Schema("poly_derivation term must be [power, scalar]".into()))?;
        let j = pair[0].as_u64().ok_or_else(|| Error::Schema("bad power".into()))? as u32;
        coeffs.push((j, Scalar::from_json(&pair[1])?));
    }
    Ok(PolyDerivation::new(&coeffs))
}

/// Multiplication of a commutative associative algebra on basis vectors.
pub trait Multiplication: Send + Sync {
    fn mul_basis(&self, a: BasisId, b: BasisId) -> Vector;
}

pub fn mul_vectors(m: &dyn Multiplication, a: &Vector, b: &Vector) -> Vector {
    let mut out = Vector::zero();
    for (i, x) in a.iter() {
        for (j, y) in b.iter() {
            out.add_scaled(&m.mul_basis(*i, *j), &(x * y));
        }
    }
    out
}

/// t^i · t^j = t^{i+j}.
pub struct PolyMul;

impl Multiplication for PolyMul {
    fn mul_basis(&self, a: BasisId, b: BasisId) -> Vector {
        Vector::basis(a + b)
    }
}

/// Explicit multiplication table; absent products are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TableMul(pub BTreeMap<(BasisId, BasisId), Vector>);

impl Multiplication for TableMul {
    fn mul_basis(&self, a: BasisId, b: BasisId) -> Vector {
        self.0.get(&(a, b)).cloned().unwrap_or_default()
    }
}

/// Y(a,x)b = (e^{xD}a)·b, i.e. a_{−1−m} b = (D^m a / m!)·b and a_n b = 0 for n ≥ 0.
pub struct CommAlgAction {
    mul: Arc<dyn Multiplication>,
    derivation: Arc<dyn Operator>,
    /// Cap on the search for D^m a = 0; `None` when D is known never to vanish on a.
    nilpotence: Box<dyn Fn(BasisId) -> Option<u32> + Send + Sync>,
    powers: Mutex<HashMap<BasisId, Vec<Vector>>>,
    description: Value,
}

impl CommAlgAction {
    /// `nil_bound(a)` returns Some(M) with D^M a = 0 when D is nilpotent on a.
    pub fn new(
        mul: Arc<dyn Multiplication>,
        derivation: Arc<dyn Operator>,
        nil_bound: Box<dyn Fn(BasisId) -> Option<u32> + Send + Sync>,
        description: Value,
    ) -> Self {
        CommAlgAction { mul, derivation, nilpotence: nil_bound, powers: Mutex::default(), description }
    }

    /// D^m a / m!.
    pub fn divided_power(&self, a: BasisId, m: usize) -> Result<Vector> {
        {
            let cache = self.powers.lock().expect("power cache");
            if let Some(p) = cache.get(&a).and_then(|v| v.get(m)) {
                return Ok(p.clone());
            }
        }
        let mut seq = self
            .powers
            .lock()
            .expect("power cache")
            .get(&a)
            .cloned()
            .unwrap_or_else(|| vec![Vector::basis(a)]);
        while seq.len() <= m {
            let k = seq.len();
            let next = apply_op(self.derivation.as_ref(), &seq[k - 1])?
                .scaled(&Scalar::from_frac(1, k as i64));
            seq.push(next);
        }
        let out = seq[m].clone();
        self.powers.lock().expect("power cache").insert(a, seq);
        Ok(out)
    }
}

impl ModeMap for CommAlgAction {
    fn mode(&self, a: BasisId, b: BasisId, n: i64) -> Result<Vector> {
        if n >= 0 {
            return Ok(Vector::zero());
        }
        let m = (-1 - n) as usize;
        if let Some(bound) = (self.nilpotence)(a) {
            if m >= bound as usize {
                return Ok(Vector::zero());
            }
        }
        let p = self.divided_power(a, m)?;
        Ok(mul_vectors(self.mul.as_ref(), &p, &Vector::basis(b)))
    }

    fn range(&self, a: BasisId, _b: BasisId) -> Result<ModeRange> {
        match (self.nilpotence)(a) {
            Some(0) => Ok(ModeRange::EMPTY),
            Some(bound) => Ok(ModeRange::new(Some(-i64::from(bound)), Some(-1))),
            None => Ok(ModeRange::new(None, Some(-1))),
        }
    }

    fn describe(&self) -> Value {
        self.description.clone()
    }
}

/// The mode range allowed by the weight grading of the target space:
/// `shift(n)` is the weight change of the mode with index n, affine in n with slope `slope` (±1).
pub fn weight_window_range(target: &Space, start: Exponent, slope: i64) -> ModeRange {
    use crate::scalar::{rational_ceil, rational_floor};
    // weight of result = start.re + slope·n must lie in [min, max]
    let lo_w = target.min_weight();
    let hi_w = target.max_weight();
    let bound = |w: num_rational::Rational64, ceil: bool| {
        let x = (w - start.re) * num_rational::Rational64::from_integer(slope);
        if ceil {
            rational_ceil(&x)
        } else {
            rational_floor(&x)
        }
    };
    if slope > 0 {
        ModeRange::new(lo_w.map(|w| bound(w, true)), hi_w.map(|w| bound(w, false)))
    } else {
        ModeRange::new(hi_w.map(|w| bound(w, true)), lo_w.map(|w| bound(w, false)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let a = ModeRange::new(Some(-3), Some(-1));
        assert!(a.contains(-2) && !a.contains(0));
        assert!(a.intersect(&ModeRange::new(Some(0), None)).is_empty());
        assert_eq!(a.negate(), ModeRange::new(Some(1), Some(3)));
        assert_eq!(a.union(&ModeRange::EMPTY), a);
    }

    #[test]
    fn poly_derivation_divided_powers() {
        // D = t²d/dt: D^m t / m! = t^{m+1}
        let act = CommAlgAction::new(
            Arc::new(PolyMul),
            Arc::new(PolyDerivation::new(&[(2, Scalar::one())])),
            Box::new(|a| if a == 0 { Some(1) } else { None }),
            Value::Null,
        );
        for m in 0..6 {
            assert_eq!(act.divided_power(1, m).unwrap(), Vector::basis(1 + m as u32));
        }
        assert_eq!(act.mode(1, 1, -3).unwrap(), Vector::basis(4));
        assert!(act.mode(0, 3, -2).unwrap().is_empty());
        assert_eq!(act.mode(0, 3, -1).unwrap(), Vector::basis(3));
    }

    #[test]
    fn weight_range_bounds() {
        // wt(v_n w) = 3 − n on a space with weights ≥ 0 ⇒ n ≤ 3
        let s = Space::polynomial("t", 1);
        let r = weight_window_range(&s, Exponent::int(3), -1);
        assert_eq!(r, ModeRange::new(None, Some(3)));
    }
}
