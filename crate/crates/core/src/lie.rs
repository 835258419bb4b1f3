//! Finite-dimensional Lie algebra modules: tensor products, intertwining maps,
//! contragredients, the triple-dual embeddings and the associativity isomorphism.
//!
//! Tensor bases are flattened lexicographically: e_i ⊗ e_j ↦ i·d₂ + j.

use std::sync::Arc;

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::report::{CheckReport, Witness};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    pub name: String,
    pub basis: Vec<String>,
    /// c[i][j][k]: [e_i, e_j] = Σ_k c[i][j][k] e_k.
    pub structure: Vec<Vec<Vec<Scalar>>>,
}

impl LieAlgebra {
    pub fn new(name: impl Into<String>, basis: Vec<String>, structure: Vec<Vec<Vec<Scalar>>>) -> Result<Self> {
        let d = basis.len();
        if structure.len() != d || structure.iter().any(|r| r.len() != d || r.iter().any(|c| c.len() != d)) {
            return Err(Error::Dimension(format!("structure constants must be {d}×{d}×{d}")));
        }
        let alg = LieAlgebra { name: name.into(), basis, structure };
        alg.validate()?;
        Ok(alg)
    }

    /// sl(2) with basis e, f, h: [e,f] = h, [h,e] = 2e, [h,f] = −2f.
    pub fn sl2() -> Arc<LieAlgebra> {
        let mut c = vec![vec![vec![Scalar::zero(); 3]; 3]; 3];
        let (e, f, h) = (0, 1, 2);
        let mut set = |i: usize, j: usize, k: usize, v: i64| {
            c[i][j][k] = Scalar::from_int(v);
            c[j][i][k] = Scalar::from_int(-v);
        };
        set(e, f, h, 1);
        set(h, e, e, 2);
        set(h, f, f, -2);
        Arc::new(LieAlgebra::new("sl2", vec!["e".into(), "f".into(), "h".into()], c).expect("sl2 is a Lie algebra"))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let d = self.dim();
        let mut out = vec![Scalar::zero(); d];
        for i in 0..d {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y[j].is_zero() {
                    continue;
                }
                let xy = &x[i] * &y[j];
                for k in 0..d {
                    out[k] += &(&xy * &self.structure[i][j][k]);
                }
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Vec<Scalar> {
        (0..self.dim()).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }).collect()
    }

    /// Antisymmetry and the Jacobi identity on basis triples.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                let a = self.bracket(&self.unit(i), &self.unit(j));
                let b = self.bracket(&self.unit(j), &self.unit(i));
                if a.iter().zip(&b).any(|(x, y)| !(x + y).is_zero()) {
                    return Err(Error::InvariantViolation {
                        name: "antisymmetry".into(),
                        witness: format!("[{0},{1}] ≠ -[{1},{0}]", self.basis[i], self.basis[j]),
                    });
                }
                for k in 0..d {
                    let (x, y, z) = (self.unit(i), self.unit(j), self.unit(k));
                    let t1 = self.bracket(&x, &self.bracket(&y, &z));
                    let t2 = self.bracket(&y, &self.bracket(&z, &x));
                    let t3 = self.bracket(&z, &self.bracket(&x, &y));
                    if (0..d).any(|m| !(&(&t1[m] + &t2[m]) + &t3[m]).is_zero()) {
                        return Err(Error::InvariantViolation {
                            name: "lie_jacobi".into(),
                            witness: format!("({}, {}, {})", self.basis[i], self.basis[j], self.basis[k]),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// ad(e_i) as a matrix.
    pub fn ad(&self, i: usize) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zero(d, d);
        for j in 0..d {
            for k in 0..d {
                m.set(k, j, self.structure[i][j][k].clone());
            }
        }
        m
    }

    /// κ(e_i, e_j) = tr(ad e_i ad e_j).
    pub fn killing(&self) -> Matrix {
        let d = self.dim();
        let ads: Vec<Matrix> = (0..d).map(|i| self.ad(i)).collect();
        let mut k = Matrix::zero(d, d);
        for i in 0..d {
            for j in 0..d {
                k.set(i, j, ads[i].mul(&ads[j]).expect("square").trace());
            }
        }
        k
    }

    pub fn to_json(&self) -> Value {
        let mut consts = Vec::new();
        for (i, row) in self.structure.iter().enumerate() {
            for (j, col) in row.iter().enumerate() {
                for (k, c) in col.iter().enumerate() {
                    if !c.is_zero() {
                        consts.push(json!([i, j, k, c.to_json()]));
                    }
                }
            }
        }
        json!({ "name": self.name, "basis": self.basis, "bracket_constants": consts })
    }

    pub fn from_json(v: &Value) -> Result<Arc<LieAlgebra>> {
        if v.get("bracket_constants").and_then(Value::as_str) == Some("sl2") {
            return Ok(LieAlgebra::sl2());
        }
        let basis: Vec<String> = serde_json::from_value(
            v.get("basis").cloned().ok_or_else(|| Error::Schema("Lie algebra needs a basis".into()))?,
        )?;
        let d = basis.len();
        let mut c = vec![vec![vec![Scalar::zero(); d]; d]; d];
        let rows = v
            .get("bracket_constants")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Schema("bracket_constants must be \"sl2\" or a list".into()))?;
        for r in rows {
            let r = r
                .as_array()
                .filter(|r| r.len() == 4)
                .ok_or_else(|| Error::Schema("bracket constant must be [i, j, k, c]".into()))?;
            let idx = |x: &Value| {
                x.as_u64()
                    .map(|i| i as usize)
                    .filter(|i| *i < d)
                    .ok_or_else(|| Error::Schema("bracket index out of range".into()))
            };
            c[idx(&r[0])?][idx(&r[1])?][idx(&r[2])?] = Scalar::from_json(&r[3])?;
        }
        let name = v.get("name").and_then(Value::as_str).unwrap_or("lie");
        Ok(Arc::new(LieAlgebra::new(name, basis, c)?))
    }
}

/// A finite-dimensional module: π(e_i) for each basis element.
#[derive(Clone, Debug, PartialEq)]
pub struct LieRep {
    pub algebra: Arc<LieAlgebra>,
    pub dim: usize,
    pub matrices: Vec<Matrix>,
}

impl LieRep {
    /// Validates that π is a homomorphism.
    pub fn new(algebra: Arc<LieAlgebra>, matrices: Vec<Matrix>) -> Result<Self> {
        if matrices.len() != algebra.dim() {
            return Err(Error::Dimension(format!("{} action matrices for a {}-dimensional algebra", matrices.len(), algebra.dim())));
        }
        let dim = matrices.first().map_or(0, Matrix::rows);
        if matrices.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::Dimension("action matrices must be square of one size".into()));
        }
        let rep = LieRep { algebra, dim, matrices };
        if let Some(w) = rep.homomorphism_witness() {
            return Err(Error::InvariantViolation { name: "representation".into(), witness: w });
        }
        Ok(rep)
    }

    pub fn trivial(algebra: Arc<LieAlgebra>, dim: usize) -> Self {
        let matrices = vec![Matrix::zero(dim, dim); algebra.dim()];
        LieRep { algebra, dim, matrices }
    }

    /// The (n+1)-dimensional irreducible sl(2)-module with highest weight n.
    pub fn sl2_irrep(n: usize) -> Self {
        let d = n + 1;
        let (mut e, mut f, mut h) = (Matrix::zero(d, d), Matrix::zero(d, d), Matrix::zero(d, d));
        // basis v_k = f^k v_0 / k!, h v_k = (n − 2k) v_k
        for k in 0..d {
            h.set(k, k, Scalar::from_int(n as i64 - 2 * k as i64));
            if k + 1 < d {
                f.set(k + 1, k, Scalar::from_int(k as i64 + 1));
                e.set(k, k + 1, Scalar::from_int(n as i64 - k as i64));
            }
        }
        LieRep::new(LieAlgebra::sl2(), vec![e, f, h]).expect("irreducible sl2-module")
    }

    /// π(Σ x_i e_i).
    pub fn act(&self, x: &[Scalar]) -> Matrix {
        let mut m = Matrix::zero(self.dim, self.dim);
        for (i, c) in x.iter().enumerate() {
            if !c.is_zero() {
                m = m.add(&self.matrices[i].scale(c)).expect("square");
            }
        }
        m
    }

    fn homomorphism_witness(&self) -> Option<String> {
        let d = self.algebra.dim();
        for i in 0..d {
            for j in 0..d {
                let br = self.act(&self.algebra.bracket(&self.algebra.unit(i), &self.algebra.unit(j)));
                let comm = self.matrices[i].commutator(&self.matrices[j]).expect("square");
                if let Some((r, c, a, b)) = br.first_difference(&comm) {
                    return Some(format!(
                        "π([{0},{1}]) ≠ [π({0}),π({1})] at ({r},{c}): {a} vs {b}",
                        self.algebra.basis[i], self.algebra.basis[j]
                    ));
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> Value {
        json!({ "dim": self.dim, "action_matrices": self.matrices.iter().map(Matrix::to_json).collect::<Vec<_>>() })
    }

    pub fn from_json(algebra: &Arc<LieAlgebra>, v: &Value) -> Result<Self> {
        if let Some(n) = v.get("sl2_irrep").and_then(Value::as_u64) {
            if algebra.basis != LieAlgebra::sl2().basis {
                return Err(Error::AlgebraMismatch);
            }
            return Ok(LieRep::sl2_irrep(n as usize));
        }
        let dim = v.get("dim").and_then(Value::as_u64).ok_or_else(|| Error::Schema("module needs dim".into()))? as usize;
        let mats = match v.get("action_matrices") {
            Some(Value::Array(ms)) => ms.iter().map(Matrix::from_json).collect::<Result<Vec<_>>>()?,
            None => return Ok(LieRep::trivial(algebra.clone(), dim)),
            _ => return Err(Error::Schema("action_matrices must be a list".into())),
        };
        let rep = LieRep::new(algebra.clone(), mats)?;
        if rep.dim != dim {
            return Err(Error::Dimension(format!("declared dim {dim}, matrices of size {}", rep.dim)));
        }
        Ok(rep)
    }
}

fn same_algebra(a: &LieRep, b: &LieRep) -> Result<()> {
    if Arc::ptr_eq(&a.algebra, &b.algebra) || a.algebra == b.algebra {
        Ok(())
    } else {
        Err(Error::AlgebraMismatch)
    }
}

/// A linear map W₁⊗W₂ → W₃ on the flattened tensor basis.
#[derive(Clone, Debug, PartialEq)]
pub struct IntertwiningMap {
    pub matrix: Matrix,
}

/// W₁⊗W₂ with the diagonal action π₁⊗1 + 1⊗π₂.
pub fn tensor_rep(w1: &LieRep, w2: &LieRep) -> Result<LieRep> {
    same_algebra(w1, w2)?;
    let (i1, i2) = (Matrix::identity(w1.dim), Matrix::identity(w2.dim));
    let matrices = w1
        .matrices
        .iter()
        .zip(&w2.matrices)
        .map(|(a, b)| a.kron(&i2).add(&i1.kron(b)).expect("same size"))
        .collect();
    Ok(LieRep { algebra: w1.algebra.clone(), dim: w1.dim * w2.dim, matrices })
}

/// W₁⊠W₂ together with the canonical intertwining map ⊠, verified before returning.
pub fn tensor_diag(w1: &LieRep, w2: &LieRep) -> Result<(LieRep, IntertwiningMap)> {
    let t = tensor_rep(w1, w2)?;
    let boxmap = IntertwiningMap { matrix: Matrix::identity(t.dim) };
    let report = check_intertwining(&boxmap, w1, w2, &t);
    if !report.all_passed() {
        return Err(Error::InvariantViolation { name: "canonical_map".into(), witness: report.to_string() });
    }
    Ok((t, boxmap))
}

/// π′(x) = −π(x)ᵀ.
pub fn contragredient_rep(w: &LieRep) -> LieRep {
    LieRep {
        algebra: w.algebra.clone(),
        dim: w.dim,
        matrices: w.matrices.iter().map(|m| m.transpose().scale(&-Scalar::one())).collect(),
    }
}

fn matrix_witness(inputs: String, lhs: &Matrix, rhs: &Matrix) -> Option<Witness> {
    if lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols() {
        return Some(Witness::new(inputs, None, format!("{}×{}", lhs.rows(), lhs.cols()), format!("{}×{}", rhs.rows(), rhs.cols())));
    }
    lhs.first_difference(rhs)
        .map(|(i, j, a, b)| Witness::new(inputs, Some(format!("entry ({i}, {j})")), a, b))
}

/// π₃(x)I = I(π₁(x)⊗1 + 1⊗π₂(x)) for every basis element x.
pub fn check_intertwining(map: &IntertwiningMap, w1: &LieRep, w2: &LieRep, w3: &LieRep) -> CheckReport {
    let mut report = CheckReport::new("intertwining map");
    let outcome = (|| -> Result<Option<Witness>> {
        same_algebra(w1, w2)?;
        same_algebra(w1, w3)?;
        let m = &map.matrix;
        if m.rows() != w3.dim || m.cols() != w1.dim * w2.dim {
            return Err(Error::Dimension(format!(
                "map is {}×{}, expected {}×{}",
                m.rows(),
                m.cols(),
                w3.dim,
                w1.dim * w2.dim
            )));
        }
        let t = tensor_rep(w1, w2)?;
        for (i, name) in w1.algebra.basis.iter().enumerate() {
            let lhs = w3.matrices[i].mul(m)?;
            let rhs = m.mul(&t.matrices[i])?;
            if let Some(w) = matrix_witness(format!("x = {name}"), &lhs, &rhs) {
                return Ok(Some(w));
            }
        }
        Ok(None)
    })();
    report.record("intertwining", "pi3(x) I = I (pi1(x) x 1 + 1 x pi2(x))", outcome);
    report
}

/// F : W₁⊗W₂⊗W₃ → W₄ with π₄(x)F = F(π₁⊗1⊗1 + 1⊗π₂⊗1 + 1⊗1⊗π₃).
pub fn check_triple_intertwining(f: &Matrix, w: [&LieRep; 4]) -> CheckReport {
    let mut report = CheckReport::new("triple intertwining map");
    let outcome = (|| -> Result<Option<Witness>> {
        let t = tensor_rep(&tensor_rep(w[0], w[1])?, w[2])?;
        same_algebra(&t, w[3])?;
        for (i, name) in t.algebra.basis.iter().enumerate() {
            let lhs = w[3].matrices[i].mul(f)?;
            let rhs = f.mul(&t.matrices[i])?;
            if let Some(x) = matrix_witness(format!("x = {name}"), &lhs, &rhs) {
                return Ok(Some(x));
            }
        }
        Ok(None)
    })();
    report.record("triple_intertwining", "", outcome);
    report
}

/// μ⁽¹⁾_λ : W₁ → (W₂⊗W₃)* and μ⁽²⁾_λ : W₃ → (W₁⊗W₂)* for λ ∈ (W₁⊗W₂⊗W₃)*.
pub fn mu_maps(lambda: &[Scalar], dims: [usize; 3]) -> Result<(Matrix, Matrix)> {
    let [d1, d2, d3] = dims;
    if lambda.len() != d1 * d2 * d3 {
        return Err(Error::Dimension(format!("functional of length {} on a space of dimension {}", lambda.len(), d1 * d2 * d3)));
    }
    let mut mu1 = Matrix::zero(d2 * d3, d1);
    let mut mu2 = Matrix::zero(d1 * d2, d3);
    for i in 0..d1 {
        for j in 0..d2 {
            for k in 0..d3 {
                let c = lambda[(i * d2 + j) * d3 + k].clone();
                mu1.set(j * d3 + k, i, c.clone());
                mu2.set(i * d2 + j, k, c);
            }
        }
    }
    Ok((mu1, mu2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bracketing {
    /// ν ↦ ν(w₁⊠(w₂⊠w₃)).
    Inj1,
    /// ν ↦ ν((w₁⊠w₂)⊠w₃).
    Inj2,
}

/// The map W₁⊗W₂⊗W₃ → target realizing the bracketing, and the target module.
fn bracketed(which: Bracketing, w1: &LieRep, w2: &LieRep, w3: &LieRep) -> Result<(Matrix, LieRep)> {
    match which {
        Bracketing::Inj1 => {
            let (w23, b23) = tensor_diag(w2, w3)?;
            let (w1_23, b1_23) = tensor_diag(w1, &w23)?;
            let m = b1_23.matrix.mul(&Matrix::identity(w1.dim).kron(&b23.matrix))?;
            Ok((m, w1_23))
        }
        Bracketing::Inj2 => {
            let (w12, b12) = tensor_diag(w1, w2)?;
            let (w12_3, b12_3) = tensor_diag(&w12, w3)?;
            let m = b12_3.matrix.mul(&b12.matrix.kron(&Matrix::identity(w3.dim)))?;
            Ok((m, w12_3))
        }
    }
}

/// The embedding of the dual of the bracketed product into (W₁⊗W₂⊗W₃)*, as a matrix on
/// functionals, verified to intertwine the contragredient actions and to be bijective.
pub fn embed_inj(which: Bracketing, w1: &LieRep, w2: &LieRep, w3: &LieRep) -> Result<(Matrix, CheckReport)> {
    let (m, target) = bracketed(which, w1, w2, w3)?;
    let inj = m.transpose();
    let mut report = CheckReport::new(format!("{which:?} embedding"));
    let triple_dual = contragredient_rep(&tensor_rep(&tensor_rep(w1, w2)?, w3)?);
    let target_dual = contragredient_rep(&target);
    let outcome = (|| -> Result<Option<Witness>> {
        for (i, name) in w1.algebra.basis.iter().enumerate() {
            let lhs = inj.mul(&target_dual.matrices[i])?;
            let rhs = triple_dual.matrices[i].mul(&inj)?;
            if let Some(w) = matrix_witness(format!("x = {name}"), &lhs, &rhs) {
                return Ok(Some(w));
            }
        }
        Ok(None)
    })();
    report.record("intertwines_dual_action", "", outcome);
    let n = w1.dim * w2.dim * w3.dim;
    let rank = inj.rank();
    report.record(
        "bijective",
        format!("rank {rank} of {n}"),
        Ok((rank != n).then(|| Witness::new("embedding", None, format!("rank {rank}"), format!("rank {n}")))),
    );
    Ok((inj, report))
}

/// Column spaces of two matrices coincide.
pub fn same_image(a: &Matrix, b: &Matrix) -> Result<bool> {
    let ra = a.rank();
    let rb = b.rank();
    let mut rows = Vec::new();
    for i in 0..a.rows() {
        let mut r = a.row(i).to_vec();
        r.extend_from_slice(b.row(i));
        rows.push(r);
    }
    let joint = Matrix::from_rows(rows)?.rank();
    Ok(ra == rb && ra == joint)
}

/// (W₁⊠W₂)⊠W₃ → W₁⊠(W₂⊠W₃), (w₁⊠w₂)⊠w₃ ↦ w₁⊠(w₂⊠w₃), with its verification report.
pub fn associativity_iso(w1: &LieRep, w2: &LieRep, w3: &LieRep) -> Result<(Matrix, CheckReport)> {
    let (b1, target) = bracketed(Bracketing::Inj1, w1, w2, w3)?;
    let (b2, source) = bracketed(Bracketing::Inj2, w1, w2, w3)?;
    let inv = b2
        .inverse()
        .ok_or_else(|| Error::Dimension("canonical map onto (W1 W2) W3 is not invertible".into()))?;
    let a = b1.mul(&inv)?;
    let mut report = CheckReport::new("associativity isomorphism");
    let outcome = (|| -> Result<Option<Witness>> {
        for (i, name) in w1.algebra.basis.iter().enumerate() {
            let lhs = target.matrices[i].mul(&a)?;
            let rhs = a.mul(&source.matrices[i])?;
            if let Some(w) = matrix_witness(format!("x = {name}"), &lhs, &rhs) {
                return Ok(Some(w));
            }
        }
        Ok(None)
    })();
    report.record("module_homomorphism", "", outcome);
    report.record(
        "invertible",
        "",
        Ok(a.inverse().is_none().then(|| Witness::new("associativity map", None, "singular", "invertible"))),
    );
    let outcome = (|| -> Result<Option<Witness>> {
        let n = w1.dim * w2.dim * w3.dim;
        for t in 0..n {
            let (i, j, k) = (t / (w2.dim * w3.dim), (t / w3.dim) % w2.dim, t % w3.dim);
            let e = Matrix::column((0..n).map(|s| if s == t { Scalar::one() } else { Scalar::zero() }).collect());
            let lhs = a.mul(&b2.mul(&e)?)?;
            let rhs = b1.mul(&e)?;
            if let Some(w) = matrix_witness(format!("(e{i} e{j}) e{k}"), &lhs, &rhs) {
                return Ok(Some(w));
            }
        }
        Ok(None)
    })();
    report.record("basis_triples", format!("{} triples", w1.dim * w2.dim * w3.dim), outcome);
    let outcome = (|| -> Result<Option<Witness>> {
        let (inj1, _) = embed_inj(Bracketing::Inj1, w1, w2, w3)?;
        let (inj2, _) = embed_inj(Bracketing::Inj2, w1, w2, w3)?;
        let lhs = inj2.mul(&a.transpose())?;
        Ok(matrix_witness("inj2 A^T = inj1".into(), &lhs, &inj1))
    })();
    report.record("induced_by_embeddings", "the re-bracketing map induced by inj1 and inj2", outcome);
    Ok((a, report))
}

/// Compares the two re-bracketing paths ((12)3)4 → 1(2(34)).
pub fn pentagon(w: [&LieRep; 4]) -> Result<CheckReport> {
    let [w1, w2, w3, w4] = w;
    let w12 = tensor_rep(w1, w2)?;
    let w23 = tensor_rep(w2, w3)?;
    let w34 = tensor_rep(w3, w4)?;
    let id = |r: &LieRep| Matrix::identity(r.dim);
    let (a1, _) = associativity_iso(&w12, w3, w4)?;
    let (a2, _) = associativity_iso(w1, w2, &w34)?;
    let path1 = a2.mul(&a1)?;
    let (b1, _) = associativity_iso(w1, w2, w3)?;
    let b1 = b1.kron(&id(w4));
    let (b2, _) = associativity_iso(w1, &w23, w4)?;
    let (b3, _) = associativity_iso(w2, w3, w4)?;
    let b3 = id(w1).kron(&b3);
    let path2 = b3.mul(&b2.mul(&b1)?)?;
    let mut report = CheckReport::new("four-factor coherence");
    report.record("pentagon", "((12)3)4 -> 1(2(34)) along both paths", Ok(matrix_witness("paths".into(), &path1, &path2)));
    let source = tensor_rep(&tensor_rep(&w12, w3)?, w4)?;
    let target = tensor_rep(w1, &tensor_rep(w2, &w34)?)?;
    let outcome = (|| -> Result<Option<Witness>> {
        for (i, name) in w1.algebra.basis.iter().enumerate() {
            let lhs = target.matrices[i].mul(&path1)?;
            let rhs = path1.mul(&source.matrices[i])?;
            if let Some(x) = matrix_witness(format!("x = {name}"), &lhs, &rhs) {
                return Ok(Some(x));
            }
        }
        Ok(None)
    })();
    report.record("path_homomorphism", "", outcome);
    Ok(report)
}

/// Writes a triple intertwining map F as I₁∘(1⊗I₂) with M₁ = W₂⊗W₃, I₂ = ⊠ and I₁ = F.
pub fn factorization(f: &Matrix, w: [&LieRep; 4]) -> Result<CheckReport> {
    let [w1, w2, w3, w4] = w;
    let mut report = check_triple_intertwining(f, w);
    let (m1, i2) = tensor_diag(w2, w3)?;
    let i1 = IntertwiningMap { matrix: f.clone() };
    report.merge(check_intertwining(&i1, w1, &m1, w4));
    let composed = i1.matrix.mul(&Matrix::identity(w1.dim).kron(&i2.matrix))?;
    report.record("factorization", "F = I1 (1 x I2)", Ok(matrix_witness("I1 (1 x I2)".into(), &composed, f)));
    Ok(report)
}

/// Casimir operator Σ κ^{ab} π(e_a)π(e_b) of the Killing form.
pub fn casimir(w: &LieRep) -> Result<Matrix> {
    let kinv = w
        .algebra
        .killing()
        .inverse()
        .ok_or_else(|| Error::Eval(format!("Killing form of {} is degenerate", w.algebra.name)))?;
    let d = w.algebra.dim();
    let mut c = Matrix::zero(w.dim, w.dim);
    for a in 0..d {
        for b in 0..d {
            let k = kinv.get(a, b);
            if !k.is_zero() {
                c = c.add(&w.matrices[a].mul(&w.matrices[b])?.scale(k))?;
            }
        }
    }
    Ok(c)
}

/// Decomposes an sl(2)-module into spins via the Casimir, eigenvalue j(j+1)/2 on spin j.
/// Returns (spin, multiplicity) pairs.
pub fn sl2_spins(w: &LieRep) -> Result<Vec<(BigRational, usize)>> {
    let c = casimir(w)?;
    let mut out = Vec::new();
    let mut covered = 0;
    for twice in 0..w.dim {
        let j = BigRational::new((twice as i64).into(), 2.into());
        let lambda = &j * (&j + BigRational::from_integer(1.into())) / BigRational::from_integer(2.into());
        let shifted = c.sub(&Matrix::identity(w.dim).scale(&Scalar::real(lambda)))?;
        let nullity = w.dim - shifted.rank();
        if nullity > 0 {
            if nullity % (twice + 1) != 0 {
                return Err(Error::Eval(format!("eigenspace of spin {j} has dimension {nullity}")));
            }
            out.push((j, nullity / (twice + 1)));
            covered += nullity;
        }
    }
    if covered != w.dim {
        return Err(Error::Eval(format!("Casimir is not diagonalizable: eigenspaces cover {covered} of {}", w.dim)));
    }
    Ok(out)
}

/// A declared map between modules of a Lie file: source modules (a, b), target c.
#[derive(Clone, Debug)]
pub struct LieMapSpec {
    pub name: String,
    pub source: (usize, usize),
    pub target: usize,
    pub matrix: Matrix,
}

#[derive(Clone, Debug)]
pub struct LieFile {
    pub algebra: Arc<LieAlgebra>,
    pub modules: Vec<LieRep>,
    pub maps: Vec<LieMapSpec>,
}

impl LieFile {
    pub fn from_json(v: &Value) -> Result<Self> {
        let algebra = LieAlgebra::from_json(v)?;
        let modules = v
            .get("modules")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Schema("Lie file needs modules".into()))?
            .iter()
            .map(|m| LieRep::from_json(&algebra, m))
            .collect::<Result<Vec<_>>>()?;
        let mut maps = Vec::new();
        for (k, m) in v.get("maps").and_then(Value::as_array).into_iter().flatten().enumerate() {
            let ty: Vec<usize> = serde_json::from_value(
                m.get("type").cloned().ok_or_else(|| Error::Schema("map needs a type [a, b, c]".into()))?,
            )?;
            if ty.len() != 3 || ty.iter().any(|i| *i >= modules.len()) {
                return Err(Error::Schema("map type must name three modules".into()));
            }
            maps.push(LieMapSpec {
                name: m.get("name").and_then(Value::as_str).map_or_else(|| format!("map{k}"), str::to_string),
                source: (ty[0], ty[1]),
                target: ty[2],
                matrix: Matrix::from_json(m.get("matrix").ok_or_else(|| Error::Schema("map needs a matrix".into()))?)?,
            });
        }
        Ok(LieFile { algebra, modules, maps })
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.algebra.to_json();
        v["modules"] = Value::Array(self.modules.iter().map(LieRep::to_json).collect());
        v["maps"] = Value::Array(
            self.maps
                .iter()
                .map(|m| json!({ "name": m.name, "type": [m.source.0, m.source.1, m.target], "matrix": m.matrix.to_json() }))
                .collect(),
        );
        v
    }
}
