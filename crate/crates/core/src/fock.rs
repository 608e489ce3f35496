//! Polynomials as elements of the Segal-Bargmann space A²(Cⁿ, e^{-|z|²}).
//!
//! Monomials z^α are pairwise orthogonal with ‖z^α‖² = πⁿ·α!, so every inner
//! product of polynomials is πⁿ times a Gaussian rational. All values in this
//! module carry the implicit unit πⁿ; no numerical integration is involved
//! anywhere, orthogonality of monomials replaces quadrature.

use crate::error::{CoreError, Result};
use crate::scalar::{GaussianRational, MultiIndex};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// A polynomial in z₁,…,z_n with Gaussian-rational coefficients, held in
/// canonical sparse form (no zero coefficients stored).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, GaussianRational>,
}

impl FockPoly {
    pub fn zero(dim: usize) -> Self {
        FockPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::zeros(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, GaussianRational::one())
    }

    /// c·z^α.
    pub fn monomial(alpha: MultiIndex, c: GaussianRational) -> Self {
        let mut p = Self::zero(alpha.dim());
        p.add_term(alpha, c);
        p
    }

    /// The coordinate function z_{j+1} (j is 0-based).
    pub fn var(dim: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, j), GaussianRational::one())
    }

    /// Parse the polynomial DSL (z-variables only), e.g. `z1^2*z2 - i*z2`.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        crate::dsl::parse_fock_poly(text, dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|a| a.order()).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> GaussianRational {
        self.terms.get(alpha).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: GaussianRational) {
        assert_eq!(alpha.dim(), self.dim, "multiindex dimension mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(alpha) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> FockPoly {
        let mut out = FockPoly::zero(self.dim);
        for (a, v) in &self.terms {
            out.add_term(a.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &FockPoly) -> FockPoly {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = FockPoly::zero(self.dim);
        for (a, u) in &self.terms {
            for (b, v) in &other.terms {
                out.add_term(a.plus(b), u * v);
            }
        }
        out
    }

    /// ∂/∂z_{j+1} applied exactly (j is 0-based).
    pub fn derivative(&self, j: usize) -> FockPoly {
        assert!(j < self.dim, "variable index out of range");
        let mut out = FockPoly::zero(self.dim);
        for (a, c) in &self.terms {
            let e = a.entry(j);
            if e > 0 {
                out.add_term(
                    a.with_entry(j, e - 1),
                    c * &GaussianRational::from_int(e as i64),
                );
            }
        }
        out
    }

    pub fn conj_coefficients(&self) -> FockPoly {
        FockPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c.conj())).collect(),
        }
    }

    /// JSON form: list of `{alpha: [ints], re: "p/q", im: "p/q"}`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(a, c)| {
                    json!({
                        "alpha": a.entries(),
                        "re": fmt_ratio(c.re()),
                        "im": fmt_ratio(c.im()),
                    })
                })
                .collect(),
        )
    }

    pub fn from_json(value: &Value, dim: usize) -> Result<Self> {
        let arr = value
            .as_array()
            .ok_or_else(|| CoreError::Json("polynomial must be a JSON array".into()))?;
        let mut out = FockPoly::zero(dim);
        for item in arr {
            let alpha = item
                .get("alpha")
                .and_then(Value::as_array)
                .ok_or_else(|| CoreError::Json("term missing 'alpha' array".into()))?
                .iter()
                .map(|v| {
                    v.as_u64()
                        .map(|e| e as u32)
                        .ok_or_else(|| CoreError::Json("alpha entries must be nonnegative ints".into()))
                })
                .collect::<Result<Vec<u32>>>()?;
            if alpha.len() != dim {
                return Err(CoreError::DimensionMismatch {
                    expected: dim,
                    found: alpha.len(),
                });
            }
            let part = |key: &str| -> Result<num_rational::BigRational> {
                let s = item
                    .get(key)
                    .and_then(Value::as_str)
                    .ok_or_else(|| CoreError::Json(format!("term missing '{key}' string")))?;
                s.parse()
                    .map_err(|e| CoreError::Json(format!("bad rational '{s}': {e}")))
            };
            out.add_term(
                MultiIndex::new(alpha),
                GaussianRational::new(part("re")?, part("im")?),
            );
        }
        Ok(out)
    }
}

pub(crate) fn fmt_ratio(r: &num_rational::BigRational) -> String {
    use num_traits::One;
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Add for &FockPoly {
    type Output = FockPoly;
    fn add(self, rhs: Self) -> FockPoly {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }
}

impl Sub for &FockPoly {
    type Output = FockPoly;
    fn sub(self, rhs: Self) -> FockPoly {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), -c);
        }
        out
    }
}

impl Neg for &FockPoly {
    type Output = FockPoly;
    fn neg(self) -> FockPoly {
        FockPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for FockPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(String, GaussianRational)> = self
            .terms
            .iter()
            .map(|(a, c)| (crate::dsl::monomial_string(a, 'z'), c.clone()))
            .collect();
        write!(f, "{}", crate::dsl::format_terms(&terms))
    }
}

/// An inner product value, expressed in units of πⁿ: the true inner product
/// is `value · πⁿ` where n is the ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockScalar(pub GaussianRational);

impl FockScalar {
    pub fn zero() -> Self {
        FockScalar(GaussianRational::zero())
    }

    pub fn value(&self) -> &GaussianRational {
        &self.0
    }

    pub fn is_real(&self) -> bool {
        self.0.is_real()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl Add for FockScalar {
    type Output = FockScalar;
    fn add(self, rhs: Self) -> FockScalar {
        FockScalar(self.0 + rhs.0)
    }
}

impl Sub for FockScalar {
    type Output = FockScalar;
    fn sub(self, rhs: Self) -> FockScalar {
        FockScalar(self.0 - rhs.0)
    }
}

impl fmt::Display for FockScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// (u, v)/πⁿ = Σ_α u_α·conj(v_α)·α!, exact. Conjugate-linear in `v`.
pub fn fock_inner(u: &FockPoly, v: &FockPoly) -> FockScalar {
    assert_eq!(u.dim(), v.dim(), "dimension mismatch");
    let mut acc = GaussianRational::zero();
    for (a, uc) in u.terms() {
        if let Some(vc) = v.terms.get(a) {
            let weight = GaussianRational::from_bigint(a.factorial());
            acc = acc + (uc * &vc.conj()) * weight;
        }
    }
    FockScalar(acc)
}

/// ‖u‖²/πⁿ; real and nonnegative, zero iff u = 0.
pub fn norm_sq(u: &FockPoly) -> FockScalar {
    fock_inner(u, u)
}
