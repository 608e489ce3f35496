//! The Weyl algebra in n variables: normal-ordered polynomial coefficient
//! operators generated by multiplications z_j and derivatives ∂_j with
//! [∂_j, z_j] = 1.
//!
//! Every operator is kept in normal order (all multiplications to the left of
//! all derivatives), so equality of operators is equality of coefficient maps.
//! [`WeylOp::multiply`] computes compositions by pushing derivatives across
//! multiplications with the single rewrite rule ∂_j z_j → z_j ∂_j + 1;
//! [`hamil_expansion`] assembles the same product from symbol derivatives and
//! serves as an independent cross-check.

use crate::error::{CoreError, Result};
use crate::fock::FockPoly;
use crate::scalar::{GaussianRational, MultiIndex};
use num_bigint::BigInt;
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Sub};

/// A normal-ordered finite sum of terms c·z^α∂^β.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylOp {
    dim: usize,
    terms: BTreeMap<(MultiIndex, MultiIndex), GaussianRational>,
}

impl WeylOp {
    pub fn zero(dim: usize) -> Self {
        WeylOp {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, GaussianRational::one())
    }

    pub fn scalar(dim: usize, c: GaussianRational) -> Self {
        let mut op = Self::zero(dim);
        op.add_term(MultiIndex::zeros(dim), MultiIndex::zeros(dim), c);
        op
    }

    /// Multiplication by z_{j+1} (j is 0-based).
    pub fn z(dim: usize, j: usize) -> Self {
        let mut op = Self::zero(dim);
        op.add_term(
            MultiIndex::unit(dim, j),
            MultiIndex::zeros(dim),
            GaussianRational::one(),
        );
        op
    }

    /// The derivative ∂/∂z_{j+1} (j is 0-based).
    pub fn d(dim: usize, j: usize) -> Self {
        let mut op = Self::zero(dim);
        op.add_term(
            MultiIndex::zeros(dim),
            MultiIndex::unit(dim, j),
            GaussianRational::one(),
        );
        op
    }

    /// Parse the operator DSL, e.g. `i*d1*d2` or `z1^2*d1 - 1/2`.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        crate::dsl::parse_weyl_op(text, dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex, beta: &MultiIndex) -> GaussianRational {
        self.terms
            .get(&(alpha.clone(), beta.clone()))
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn add_term(&mut self, alpha: MultiIndex, beta: MultiIndex, c: GaussianRational) {
        assert_eq!(alpha.dim(), self.dim, "multiindex dimension mismatch");
        assert_eq!(beta.dim(), self.dim, "multiindex dimension mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry((alpha, beta)) {
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

    pub fn scale(&self, c: &GaussianRational) -> WeylOp {
        let mut out = WeylOp::zero(self.dim);
        for ((a, b), v) in &self.terms {
            out.add_term(a.clone(), b.clone(), v * c);
        }
        out
    }

    /// Right-multiplies every term by z_j, restoring normal order by iterating
    /// ∂_j z_j → z_j ∂_j + 1 to completion.
    fn right_mul_z(&self, j: usize) -> WeylOp {
        let mut out = WeylOp::zero(self.dim);
        for ((a, b), c) in &self.terms {
            let m = b.entry(j);
            // f(0) = z_j; f(s) = f(s-1)·∂_j + ∂_j^{s-1}, so f(m) = ∂_j^m z_j
            // normal ordered. Entries are (z-exponent, ∂-exponent, coefficient)
            // in the single variable j.
            let mut f: Vec<(u32, u32, BigInt)> = vec![(1, 0, BigInt::one())];
            for s in 1..=m {
                for entry in f.iter_mut() {
                    entry.1 += 1;
                }
                if let Some(entry) = f.iter_mut().find(|e| e.0 == 0 && e.1 == s - 1) {
                    entry.2 += BigInt::one();
                } else {
                    f.push((0, s - 1, BigInt::one()));
                }
            }
            for (x, y, k) in f {
                let alpha = a.with_entry(j, a.entry(j) + x);
                let beta = b.with_entry(j, b.entry(j) - m + y);
                out.add_term(alpha, beta, c * &GaussianRational::from_bigint(k));
            }
        }
        out
    }

    /// Normal-ordered composition self ∘ rhs (apply `rhs` first).
    pub fn multiply(&self, rhs: &WeylOp) -> WeylOp {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = WeylOp::zero(self.dim);
        for ((qa, qb), qc) in &rhs.terms {
            let mut acc = self.clone();
            for j in 0..self.dim {
                for _ in 0..qa.entry(j) {
                    acc = acc.right_mul_z(j);
                }
            }
            for ((a, b), c) in acc.terms {
                out.add_term(a, b.plus(qb), &c * qc);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> WeylOp {
        let mut acc = WeylOp::identity(self.dim);
        for _ in 0..e {
            acc = acc.multiply(self);
        }
        acc
    }

    /// The formal adjoint in the Fock inner product: z_j ↔ ∂_j, coefficients
    /// conjugated, factor order reversed (automatic in normal order).
    pub fn adjoint(&self) -> WeylOp {
        let mut out = WeylOp::zero(self.dim);
        for ((a, b), c) in &self.terms {
            out.add_term(b.clone(), a.clone(), c.conj());
        }
        out
    }

    /// multiply(self, rhs) − multiply(rhs, self).
    pub fn commutator(&self, rhs: &WeylOp) -> WeylOp {
        &self.multiply(rhs) - &rhs.multiply(self)
    }

    /// Exact action on a polynomial: each term c·z^α∂^β maps z^γ to
    /// c·(γ!/(γ−β)!)·z^{γ−β+α}.
    pub fn apply(&self, f: &FockPoly) -> FockPoly {
        assert_eq!(self.dim, f.dim(), "dimension mismatch");
        let mut out = FockPoly::zero(self.dim);
        for ((a, b), c) in &self.terms {
            for (g, fc) in f.terms() {
                if let Some(rest) = g.checked_sub(b) {
                    let coeff = &(c * fc) * &GaussianRational::from_bigint(g.falling(b));
                    out.add_term(rest.plus(a), coeff);
                }
            }
        }
        out
    }

    /// Reinterprets a multiplication-only operator as a polynomial.
    pub fn into_polynomial(self) -> Result<FockPoly> {
        let mut p = FockPoly::zero(self.dim);
        for ((a, b), c) in self.terms {
            if !b.is_zero() {
                return Err(CoreError::NotAPolynomial);
            }
            p.add_term(a, c);
        }
        Ok(p)
    }
}

impl Add for &WeylOp {
    type Output = WeylOp;
    fn add(self, rhs: Self) -> WeylOp {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self.clone();
        for ((a, b), c) in &rhs.terms {
            out.add_term(a.clone(), b.clone(), c.clone());
        }
        out
    }
}

impl Sub for &WeylOp {
    type Output = WeylOp;
    fn sub(self, rhs: Self) -> WeylOp {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self.clone();
        for ((a, b), c) in &rhs.terms {
            out.add_term(a.clone(), b.clone(), -c);
        }
        out
    }
}

impl fmt::Display for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(String, GaussianRational)> = self
            .terms
            .iter()
            .map(|((a, b), c)| (crate::dsl::weyl_monomial_string(a, b), c.clone()))
            .collect();
        write!(f, "{}", crate::dsl::format_terms(&terms))
    }
}

/// Parse the operator DSL into a normal-ordered operator.
pub fn parse_operator(text: &str, dim: usize) -> Result<WeylOp> {
    WeylOp::parse(text, dim)
}

/// The smallest dimension the expression fits in: the largest variable index
/// mentioned (0 when the expression is a scalar).
pub fn infer_dimension(text: &str) -> Result<usize> {
    crate::dsl::max_variable_index(text)
}

/// The polynomial symbol p(w₁,…,w_n) of a constant-coefficient operator p(∂).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolPoly {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, GaussianRational>,
}

impl SymbolPoly {
    pub fn zero(dim: usize) -> Self {
        SymbolPoly {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    /// Parse from diff-operator DSL text, e.g. `d1^2 + d2` for w₁² + w₂.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        Self::try_from_op(&WeylOp::parse(text, dim)?)
    }

    /// Extracts the symbol of a pure constant-coefficient diff operator.
    pub fn try_from_op(op: &WeylOp) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for ((a, b), c) in op.terms() {
            if !a.is_zero() {
                return Err(CoreError::NotADiffOperator);
            }
            coeffs.insert(b.clone(), c.clone());
        }
        Ok(SymbolPoly {
            dim: op.dim(),
            coeffs,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Total degree; None for the zero symbol.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|a| a.order()).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &GaussianRational)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> GaussianRational {
        self.coeffs.get(alpha).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: GaussianRational) {
        assert_eq!(alpha.dim(), self.dim, "multiindex dimension mismatch");
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(alpha).or_insert_with(GaussianRational::zero);
        *entry = &*entry + &c;
        self.coeffs.retain(|_, v| !v.is_zero());
    }

    /// ∂^α of the symbol, exact.
    pub fn derivative(&self, alpha: &MultiIndex) -> SymbolPoly {
        assert_eq!(alpha.dim(), self.dim, "multiindex dimension mismatch");
        let mut out = SymbolPoly::zero(self.dim);
        for (g, c) in &self.coeffs {
            if let Some(rest) = g.checked_sub(alpha) {
                out.add_term(rest, c * &GaussianRational::from_bigint(g.falling(alpha)));
            }
        }
        out
    }

    /// Derivative with respect to the j-th variable (0-based).
    pub fn derivative_var(&self, j: usize) -> SymbolPoly {
        self.derivative(&MultiIndex::unit(self.dim, j))
    }

    pub fn conj(&self) -> SymbolPoly {
        SymbolPoly {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(a, c)| (a.clone(), c.conj())).collect(),
        }
    }

    /// p(∂): the symbol as a constant-coefficient differential operator.
    pub fn diff_op(&self) -> WeylOp {
        let mut op = WeylOp::zero(self.dim);
        for (a, c) in &self.coeffs {
            op.add_term(MultiIndex::zeros(self.dim), a.clone(), c.clone());
        }
        op
    }

    /// p(z): the symbol as a multiplication operator (no conjugation).
    pub fn multiplier_op(&self) -> WeylOp {
        let mut op = WeylOp::zero(self.dim);
        for (a, c) in &self.coeffs {
            op.add_term(a.clone(), MultiIndex::zeros(self.dim), c.clone());
        }
        op
    }

    /// p*(z): multiplication by the symbol with conjugated coefficients — the
    /// formal adjoint of `diff_op`.
    pub fn adjoint_multiplier_op(&self) -> WeylOp {
        self.conj().multiplier_op()
    }
}

impl fmt::Display for SymbolPoly {
    /// Symbols are displayed in diff-operator form (`d1^2 + d2`), matching the
    /// DSL they are entered in.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.diff_op().fmt(f)
    }
}

/// The finite expansion Σ_{|α|≥0} (1/α!)·P^{(α)}(z)·Q^{(α)}(∂), assembled
/// directly from symbol derivatives without any normal ordering. Equals
/// `q.diff_op().multiply(&p.multiplier_op())` identically.
pub fn hamil_expansion(q: &SymbolPoly, p: &SymbolPoly) -> WeylOp {
    assert_eq!(q.dim(), p.dim(), "dimension mismatch");
    hamil_tail(q, p, 0)
}

/// The α-sum of `hamil_expansion` restricted to |α| ≥ min_order.
pub(crate) fn hamil_tail(q: &SymbolPoly, p: &SymbolPoly, min_order: u32) -> WeylOp {
    let dim = q.dim();
    let mut out = WeylOp::zero(dim);
    let bound = match (q.degree(), p.degree()) {
        (Some(dq), Some(dp)) => dq.min(dp),
        _ => return out,
    };
    for alpha in MultiIndex::all_up_to(dim, bound) {
        if alpha.order() < min_order {
            continue;
        }
        let inv_fact = GaussianRational::from_bigint(alpha.factorial()).inv();
        let pd = p.derivative(&alpha);
        let qd = q.derivative(&alpha);
        for (g, pc) in pd.terms() {
            for (d, qc) in qd.terms() {
                out.add_term(g.clone(), d.clone(), &(pc * qc) * &inv_fact);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fock_inner, FockPoly};
    use crate::scalar::MultiIndex as Mi;
    use crate::test_support::*;
    use proptest::prelude::*;

    fn one_var(k: u32) -> FockPoly {
        FockPoly::monomial(Mi::new(vec![k]), GaussianRational::one())
    }

    #[test]
    fn parse_examples() {
        let op = WeylOp::parse("d1", 1).unwrap();
        assert_eq!(op.num_terms(), 1);
        assert_eq!(
            op.coeff(&Mi::zeros(1), &Mi::new(vec![1])),
            GaussianRational::one()
        );

        // ∂z = 1 + z∂, checked structurally and against its action on z^k
        let op = WeylOp::parse("d1*z1", 1).unwrap();
        let mut expected = WeylOp::identity(1);
        expected.add_term(Mi::new(vec![1]), Mi::new(vec![1]), GaussianRational::one());
        assert_eq!(op, expected);
        for k in 0..=3u32 {
            let lhs = op.apply(&one_var(k));
            let by_hand = one_var(k).scale(&GaussianRational::from_int((k + 1) as i64));
            assert_eq!(lhs, by_hand, "∂(z·z^{k}) = (k+1)z^{k}");
        }

        let op = WeylOp::parse("i*d1*d2", 2).unwrap();
        assert_eq!(op.num_terms(), 1);
        assert_eq!(
            op.coeff(&Mi::zeros(2), &Mi::new(vec![1, 1])),
            GaussianRational::i()
        );
    }

    #[test]
    fn multiply_examples() {
        let d = WeylOp::d(1, 0);
        let z = WeylOp::z(1, 0);
        let mut expected = WeylOp::identity(1);
        expected.add_term(Mi::new(vec![1]), Mi::new(vec![1]), GaussianRational::one());
        assert_eq!(d.multiply(&z), expected);

        let q = WeylOp::parse("z1^2*d1 + i", 1).unwrap();
        assert_eq!(WeylOp::identity(1).multiply(&q), q);

        // ∂² ∘ z² = 2 + 4z∂ + z²∂²; oracle: apply both sides to z^k, k ≤ 4
        let lhs = WeylOp::parse("d1^2", 1).unwrap().multiply(&WeylOp::parse("z1^2", 1).unwrap());
        let rhs = WeylOp::parse("2 + 4*z1*d1 + z1^2*d1^2", 1).unwrap();
        assert_eq!(lhs, rhs);
        for k in 0..=4u32 {
            let via_product = lhs.apply(&one_var(k));
            let direct = WeylOp::parse("d1^2", 1)
                .unwrap()
                .apply(&WeylOp::parse("z1^2", 1).unwrap().apply(&one_var(k)));
            assert_eq!(via_product, direct);
        }
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(WeylOp::d(1, 0).adjoint(), WeylOp::z(1, 0));

        let mut op = WeylOp::zero(2);
        let c: GaussianRational = "1/2 - 3*i".parse().unwrap();
        op.add_term(Mi::new(vec![2, 0]), Mi::new(vec![0, 1]), c.clone());
        let adj = op.adjoint();
        assert_eq!(adj.coeff(&Mi::new(vec![0, 1]), &Mi::new(vec![2, 0])), c.conj());

        // (i∂₁∂₂)* = −i·z₁z₂
        let p = WeylOp::parse("i*d1*d2", 2).unwrap();
        assert_eq!(p.adjoint(), WeylOp::parse("-i*z1*z2", 2).unwrap());
    }

    #[test]
    fn commutator_examples() {
        let d = WeylOp::d(1, 0);
        let z = WeylOp::z(1, 0);
        assert_eq!(d.commutator(&z), WeylOp::identity(1));

        let p = WeylOp::parse("z1^2*d1 - i*d1^3", 1).unwrap();
        assert!(p.commutator(&p).is_zero());

        let lhs = WeylOp::parse("d1^2", 1)
            .unwrap()
            .commutator(&WeylOp::parse("z1^2", 1).unwrap());
        assert_eq!(lhs, WeylOp::parse("2 + 4*z1*d1", 1).unwrap());
    }

    #[test]
    fn symbol_derivative_examples() {
        let p = SymbolPoly::parse("d1*d2", 2).unwrap();
        assert_eq!(
            p.derivative(&Mi::new(vec![1, 0])),
            SymbolPoly::parse("d2", 2).unwrap()
        );

        let p = SymbolPoly::parse("d1^2 + d2^2", 2).unwrap();
        assert_eq!(
            p.derivative(&Mi::new(vec![2, 0])),
            SymbolPoly::parse("2", 2).unwrap()
        );

        let p = SymbolPoly::parse("d1^2*d2 - i*d2", 2).unwrap();
        assert_eq!(p.derivative(&Mi::zeros(2)), p);
    }

    #[test]
    fn hamil_examples() {
        let w1 = SymbolPoly::parse("d1", 1).unwrap();
        let mut expected = WeylOp::identity(1);
        expected.add_term(Mi::new(vec![1]), Mi::new(vec![1]), GaussianRational::one());
        assert_eq!(hamil_expansion(&w1, &w1), expected);

        let c = SymbolPoly::parse("2 - i", 2).unwrap();
        let p = SymbolPoly::parse("d1^2 + d1*d2", 2).unwrap();
        let expected = p
            .multiplier_op()
            .scale(&"2 - i".parse::<GaussianRational>().unwrap());
        assert_eq!(hamil_expansion(&c, &p), expected);

        // the module's central cross-check at a fixed pair
        let w1sq = SymbolPoly::parse("d1^2", 1).unwrap();
        assert_eq!(
            hamil_expansion(&w1sq, &w1sq),
            w1sq.diff_op().multiply(&w1sq.multiplier_op())
        );
    }

    #[test]
    fn apply_examples() {
        let d = WeylOp::d(1, 0);
        for k in 1..=5u32 {
            assert_eq!(
                d.apply(&one_var(k)),
                one_var(k - 1).scale(&GaussianRational::from_int(k as i64))
            );
        }
        let number_op = WeylOp::parse("z1*d1", 1).unwrap();
        for k in 0..=5u32 {
            assert_eq!(
                number_op.apply(&one_var(k)),
                one_var(k).scale(&GaussianRational::from_int(k as i64))
            );
        }
        let op = WeylOp::parse("d1*d2", 2).unwrap();
        let f = FockPoly::parse("z1^2*z2^3", 2).unwrap();
        assert_eq!(op.apply(&f), FockPoly::parse("6*z1*z2^2", 2).unwrap());
    }

    #[test]
    fn print_examples() {
        assert_eq!(
            WeylOp::parse("d1^2*z1^2", 1).unwrap().to_string(),
            "2 + 4*z1*d1 + z1^2*d1^2"
        );
        assert_eq!(WeylOp::zero(2).to_string(), "0");
        assert_eq!(
            WeylOp::parse("(1+2*i)*z2 - d1", 2).unwrap().to_string(),
            "-d1 + (1 + 2*i)*z2"
        );
    }

    fn dim_ops(max_order: u32) -> impl Strategy<Value = (usize, WeylOp, WeylOp)> {
        (1usize..=3).prop_flat_map(move |dim| {
            (
                Just(dim),
                arb_weyl_op(dim, max_order),
                arb_weyl_op(dim, max_order),
            )
        })
    }

    fn triple_with_poly() -> impl Strategy<Value = (WeylOp, WeylOp, WeylOp, FockPoly)> {
        (1usize..=3).prop_flat_map(|dim| {
            (
                arb_weyl_op(dim, 3),
                arb_weyl_op(dim, 3),
                arb_weyl_op(dim, 3),
                arb_poly(dim, 4),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn multiply_associative_bilinear((p, q, r, _) in triple_with_poly(), c in arb_gaussian()) {
            prop_assert_eq!(p.multiply(&q).multiply(&r), p.multiply(&q.multiply(&r)));
            let lhs = p.multiply(&(&q + &r.scale(&c)));
            let rhs = &p.multiply(&q) + &p.multiply(&r).scale(&c);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn normal_ordering_is_faithful((p, q, _, f) in triple_with_poly()) {
            prop_assert_eq!(p.multiply(&q).apply(&f), p.apply(&q.apply(&f)));
        }

        #[test]
        fn adjoint_is_antihomomorphism((_, p, q) in dim_ops(3)) {
            prop_assert_eq!(p.adjoint().adjoint(), p.clone());
            prop_assert_eq!(p.multiply(&q).adjoint(), q.adjoint().multiply(&p.adjoint()));
        }

        #[test]
        fn adjoint_duality_in_fock(
            (p, u, v) in (1usize..=3).prop_flat_map(|dim| {
                (arb_weyl_op(dim, 3), arb_poly(dim, 5), arb_poly(dim, 5))
            })
        ) {
            let lhs = fock_inner(&p.apply(&u), &v);
            let rhs = fock_inner(&u, &p.adjoint().apply(&v));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn hamil_matches_normal_ordered_product(
            (q, p) in (1usize..=3).prop_flat_map(|dim| (arb_symbol(dim, 3), arb_symbol(dim, 3)))
        ) {
            let expansion = hamil_expansion(&q, &p);
            let product = q.diff_op().multiply(&p.multiplier_op());
            prop_assert_eq!(expansion, product);
        }

        #[test]
        fn parse_print_roundtrip((_, p, _) in dim_ops(3)) {
            let text = p.to_string();
            let back = WeylOp::parse(&text, p.dim()).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
