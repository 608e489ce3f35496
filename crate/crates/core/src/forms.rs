//! (p,0)-forms with polynomial coefficients and the operators D, D*, and the
//! box operator of the complex they generate.
//!
//! A form is stored over strictly increasing index tuples only; the wedge sign
//! convention moves dz_k into increasing position with the permutation parity,
//! which makes the displayed formulas for D and D* mutually adjoint. The
//! duality test pins that convention rather than assuming it.

use crate::error::{CoreError, Result};
use crate::fock::{fock_inner, FockPoly, FockScalar};
use crate::scalar::GaussianRational;
use crate::weyl::SymbolPoly;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Sub};

/// A (p,0)-form Σ'_J u_J dz_J over increasing multiindices J, with
/// polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PForm {
    dim: usize,
    degree: usize,
    components: BTreeMap<Vec<usize>, FockPoly>,
}

impl PForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(degree <= dim, "form degree {degree} exceeds dimension {dim}");
        PForm {
            dim,
            degree,
            components: BTreeMap::new(),
        }
    }

    /// A 0-form from a plain polynomial.
    pub fn function(poly: FockPoly) -> Self {
        let mut form = Self::zero(poly.dim(), 0);
        form.add_component(Vec::new(), poly);
        form
    }

    /// A (1,0)-form Σ_j u_j dz_j from its component list (length = dimension).
    pub fn one_form(components: Vec<FockPoly>) -> Self {
        let dim = components.len();
        assert!(dim > 0, "a one-form needs at least one component");
        let mut form = Self::zero(dim, 1);
        for (j, poly) in components.into_iter().enumerate() {
            assert_eq!(poly.dim(), dim, "component dimension mismatch");
            form.add_component(vec![j], poly);
        }
        form
    }

    pub fn try_new(
        dim: usize,
        degree: usize,
        components: Vec<(Vec<usize>, FockPoly)>,
    ) -> Result<Self> {
        if degree > dim {
            return Err(CoreError::InvalidForm(format!(
                "degree {degree} exceeds dimension {dim}"
            )));
        }
        let mut form = Self::zero(dim, degree);
        for (idx, poly) in components {
            if idx.len() != degree {
                return Err(CoreError::InvalidForm(format!(
                    "index tuple {idx:?} has length {} but the form degree is {degree}",
                    idx.len()
                )));
            }
            if !idx.windows(2).all(|w| w[0] < w[1]) {
                return Err(CoreError::InvalidForm(format!(
                    "index tuple {idx:?} is not strictly increasing"
                )));
            }
            if idx.iter().any(|&j| j >= dim) {
                return Err(CoreError::InvalidForm(format!(
                    "index tuple {idx:?} out of range for dimension {dim}"
                )));
            }
            if poly.dim() != dim {
                return Err(CoreError::DimensionMismatch {
                    expected: dim,
                    found: poly.dim(),
                });
            }
            form.add_component(idx, poly);
        }
        Ok(form)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &FockPoly)> {
        self.components.iter()
    }

    /// Component at an increasing index tuple, zero if absent.
    pub fn component(&self, idx: &[usize]) -> FockPoly {
        self.components
            .get(idx)
            .cloned()
            .unwrap_or_else(|| FockPoly::zero(self.dim))
    }

    /// Component u_j of a (1,0)-form (j is 0-based).
    pub fn one_form_component(&self, j: usize) -> FockPoly {
        assert_eq!(self.degree, 1, "not a one-form");
        self.component(&[j])
    }

    pub fn add_component(&mut self, idx: Vec<usize>, poly: FockPoly) {
        assert_eq!(idx.len(), self.degree, "index tuple length mismatch");
        assert!(idx.windows(2).all(|w| w[0] < w[1]), "index tuple not increasing");
        assert_eq!(poly.dim(), self.dim, "component dimension mismatch");
        if poly.is_zero() {
            return;
        }
        match self.components.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(poly);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &poly;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> PForm {
        let mut out = PForm::zero(self.dim, self.degree);
        for (idx, poly) in &self.components {
            out.add_component(idx.clone(), poly.scale(c));
        }
        out
    }

    /// (u, v)/πⁿ = Σ'_J (u_J, v_J)/πⁿ.
    pub fn inner(&self, other: &PForm) -> FockScalar {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        assert_eq!(self.degree, other.degree, "form degree mismatch");
        let mut acc = FockScalar::zero();
        for (idx, poly) in &self.components {
            if let Some(q) = other.components.get(idx) {
                acc = acc + fock_inner(poly, q);
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> FockScalar {
        self.inner(self)
    }

    /// JSON form: `{n, p, components: [{J: [1-based ints], poly: ...}]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.dim,
            "p": self.degree,
            "components": self.components.iter().map(|(idx, poly)| {
                json!({
                    "J": idx.iter().map(|j| j + 1).collect::<Vec<usize>>(),
                    "poly": poly.to_json(),
                })
            }).collect::<Vec<Value>>(),
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let dim = value
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| CoreError::Json("form missing 'n'".into()))? as usize;
        let degree = value
            .get("p")
            .and_then(Value::as_u64)
            .ok_or_else(|| CoreError::Json("form missing 'p'".into()))? as usize;
        let comps = value
            .get("components")
            .and_then(Value::as_array)
            .ok_or_else(|| CoreError::Json("form missing 'components'".into()))?;
        let mut list = Vec::new();
        for comp in comps {
            let idx = comp
                .get("J")
                .and_then(Value::as_array)
                .ok_or_else(|| CoreError::Json("component missing 'J'".into()))?
                .iter()
                .map(|v| {
                    v.as_u64()
                        .filter(|&j| j >= 1)
                        .map(|j| (j - 1) as usize)
                        .ok_or_else(|| CoreError::Json("J entries must be 1-based ints".into()))
                })
                .collect::<Result<Vec<usize>>>()?;
            let poly = FockPoly::from_json(
                comp.get("poly")
                    .ok_or_else(|| CoreError::Json("component missing 'poly'".into()))?,
                dim,
            )?;
            list.push((idx, poly));
        }
        Self::try_new(dim, degree, list)
    }
}

impl Add for &PForm {
    type Output = PForm;
    fn add(self, rhs: Self) -> PForm {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        assert_eq!(self.degree, rhs.degree, "form degree mismatch");
        let mut out = self.clone();
        for (idx, poly) in &rhs.components {
            out.add_component(idx.clone(), poly.clone());
        }
        out
    }
}

impl Sub for &PForm {
    type Output = PForm;
    fn sub(self, rhs: Self) -> PForm {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        assert_eq!(self.degree, rhs.degree, "form degree mismatch");
        let mut out = self.clone();
        for (idx, poly) in &rhs.components {
            out.add_component(idx.clone(), -poly);
        }
        out
    }
}

impl fmt::Display for PForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, poly) in &self.components {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if idx.is_empty() {
                write!(f, "{poly}")?;
            } else {
                let wedge = idx
                    .iter()
                    .map(|j| format!("dz{}", j + 1))
                    .collect::<Vec<_>>()
                    .join("^");
                write!(f, "({poly}) {wedge}")?;
            }
        }
        Ok(())
    }
}

/// The tuple (p₁,…,p_n) of constant-coefficient operators defining D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorFamily {
    dim: usize,
    symbols: Vec<SymbolPoly>,
}

impl OperatorFamily {
    pub fn new(symbols: Vec<SymbolPoly>) -> Result<Self> {
        let dim = symbols.len();
        if dim == 0 {
            return Err(CoreError::InvalidForm("empty operator family".into()));
        }
        for s in &symbols {
            if s.dim() != dim {
                return Err(CoreError::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
        }
        Ok(OperatorFamily { dim, symbols })
    }

    /// Parse a semicolon-separated family, e.g. `"d1*d2; d1^2+d2^2"`. The
    /// number of entries is the dimension.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(';').collect();
        let dim = parts.len();
        let symbols = parts
            .iter()
            .map(|part| SymbolPoly::parse(part.trim(), dim))
            .collect::<Result<Vec<_>>>()?;
        Self::new(symbols)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symbol(&self, j: usize) -> &SymbolPoly {
        &self.symbols[j]
    }

    pub fn symbols(&self) -> &[SymbolPoly] {
        &self.symbols
    }

    /// p_j(∂) as an operator (j is 0-based).
    pub fn diff_op(&self, j: usize) -> crate::weyl::WeylOp {
        self.symbols[j].diff_op()
    }

    /// p_j*(z): multiplication by the conjugated symbol.
    pub fn adjoint_multiplier(&self, j: usize) -> crate::weyl::WeylOp {
        self.symbols[j].adjoint_multiplier_op()
    }
}

/// Sign and position for dz_k ∧ dz_J reordered to increasing; None if k ∈ J.
fn wedge_insert(k: usize, idx: &[usize]) -> Option<(i32, Vec<usize>)> {
    if idx.contains(&k) {
        return None;
    }
    let pos = idx.iter().filter(|&&j| j < k).count();
    let mut out = idx.to_vec();
    out.insert(pos, k);
    let sign = if pos % 2 == 0 { 1 } else { -1 };
    Some((sign, out))
}

/// Du = Σ'_J Σ_k p_k(u_J) dz_k ∧ dz_J, a (p+1,0)-form.
pub fn d_apply(family: &OperatorFamily, u: &PForm) -> Result<PForm> {
    if family.dim() != u.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: family.dim(),
            found: u.dim(),
        });
    }
    if u.degree() == u.dim() {
        return Err(CoreError::DegreeTooHighForD {
            degree: u.degree(),
            dim: u.dim(),
        });
    }
    let mut out = PForm::zero(u.dim(), u.degree() + 1);
    let ops: Vec<_> = (0..family.dim()).map(|k| family.diff_op(k)).collect();
    for (idx, poly) in u.components() {
        for k in 0..family.dim() {
            if let Some((sign, target)) = wedge_insert(k, idx) {
                let applied = ops[k].apply(poly);
                out.add_component(
                    target,
                    applied.scale(&GaussianRational::from_int(sign as i64)),
                );
            }
        }
    }
    Ok(out)
}

/// D*v = Σ'_K Σ_j p_j*·v_{jK} dz_K, a (p−1,0)-form; v_{jK} is the signed
/// antisymmetric extension of the stored components.
pub fn dstar_apply(family: &OperatorFamily, v: &PForm) -> Result<PForm> {
    if family.dim() != v.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: family.dim(),
            found: v.dim(),
        });
    }
    if v.degree() == 0 {
        return Err(CoreError::DegreeZeroForDStar);
    }
    let mut out = PForm::zero(v.dim(), v.degree() - 1);
    let multipliers: Vec<_> = (0..family.dim())
        .map(|j| family.adjoint_multiplier(j))
        .collect();
    for (idx, poly) in v.components() {
        for (pos, &j) in idx.iter().enumerate() {
            let mut rest = idx.clone();
            rest.remove(pos);
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            let scaled = multipliers[j]
                .apply(poly)
                .scale(&GaussianRational::from_int(sign));
            out.add_component(rest, scaled);
        }
    }
    Ok(out)
}

/// The box operator D*D + DD*, with the degenerate piece dropped at the
/// boundary degrees p = 0 and p = n.
pub fn box_apply(family: &OperatorFamily, u: &PForm) -> Result<PForm> {
    if family.dim() != u.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: family.dim(),
            found: u.dim(),
        });
    }
    let mut out = PForm::zero(u.dim(), u.degree());
    if u.degree() < u.dim() {
        out = &out + &dstar_apply(family, &d_apply(family, u)?)?;
    }
    if u.degree() > 0 {
        out = &out + &d_apply(family, &dstar_apply(family, u)?)?;
    }
    Ok(out)
}

/// Both sides of (Du, v) = (u, D*v), exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityReport {
    pub lhs: FockScalar,
    pub rhs: FockScalar,
    pub equal: bool,
}

pub fn duality_check(family: &OperatorFamily, u: &PForm, v: &PForm) -> Result<DualityReport> {
    if family.dim() != u.dim() || u.dim() != v.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: family.dim(),
            found: if family.dim() != u.dim() { u.dim() } else { v.dim() },
        });
    }
    if v.degree() != u.degree() + 1 {
        return Err(CoreError::FormDegreeMismatch {
            expected: u.degree() + 1,
            found: v.degree(),
        });
    }
    let lhs = d_apply(family, u)?.inner(v);
    let rhs = u.inner(&dstar_apply(family, v)?);
    let equal = lhs == rhs;
    Ok(DualityReport { lhs, rhs, equal })
}
