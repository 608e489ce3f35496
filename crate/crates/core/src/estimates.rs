//! The commutator quadratic form Q(u) = Σ_{j,k}([p_k, p_j*]u_j, u_k), the
//! energy identity behind the basic estimate, the one-dimensional commutator
//! identity, the symbol-derivative expansion of commutators, the dimension-2
//! condition checkers with their coercivity constants, and a counterexample
//! scanner.

use crate::error::{CoreError, Result};
use crate::fock::{fock_inner, norm_sq, FockPoly, FockScalar};
use crate::forms::{d_apply, dstar_apply, OperatorFamily, PForm};
use crate::scalar::{binomial, GaussianRational, MultiIndex};
use crate::weyl::{hamil_tail, SymbolPoly, WeylOp};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Value and per-pair breakdown of the commutator quadratic form, in units
/// of πⁿ. `per_pair[(j,k)]` is ([p_k, p_j*]u_j, u_k) with 1-based (j,k).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticFormReport {
    pub dim: usize,
    pub value: FockScalar,
    pub per_pair: BTreeMap<(usize, usize), FockScalar>,
    pub decomposition: Option<Vec<DecompositionPiece>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionPiece {
    pub label: String,
    pub value: FockScalar,
}

/// The matrix of commutators [p_k, p_j*], indexed comms[j][k] (0-based).
pub(crate) fn commutator_matrix(family: &OperatorFamily) -> Vec<Vec<WeylOp>> {
    let n = family.dim();
    (0..n)
        .map(|j| {
            let adj = family.adjoint_multiplier(j);
            (0..n)
                .map(|k| family.diff_op(k).commutator(&adj))
                .collect()
        })
        .collect()
}

pub(crate) fn quadratic_form_value(
    comms: &[Vec<WeylOp>],
    components: &[FockPoly],
) -> GaussianRational {
    let mut total = GaussianRational::zero();
    for (j, uj) in components.iter().enumerate() {
        if uj.is_zero() {
            continue;
        }
        for (k, uk) in components.iter().enumerate() {
            if uk.is_zero() {
                continue;
            }
            total = total + fock_inner(&comms[j][k].apply(uj), uk).0;
        }
    }
    total
}

/// Computes Q(u) = Σ_{j,k}([p_k, p_j*]u_j, u_k) exactly for a (1,0)-form.
/// The total is always real; this is asserted.
pub fn quadratic_form(family: &OperatorFamily, u: &PForm) -> QuadraticFormReport {
    assert_eq!(family.dim(), u.dim(), "dimension mismatch");
    assert_eq!(u.degree(), 1, "quadratic form is defined on (1,0)-forms");
    let n = family.dim();
    let comms = commutator_matrix(family);
    let components: Vec<FockPoly> = (0..n).map(|j| u.one_form_component(j)).collect();
    let mut per_pair = BTreeMap::new();
    let mut total = GaussianRational::zero();
    for j in 0..n {
        for k in 0..n {
            let entry = fock_inner(&comms[j][k].apply(&components[j]), &components[k]);
            total = total + entry.0.clone();
            per_pair.insert((j + 1, k + 1), entry);
        }
    }
    assert!(
        total.is_real(),
        "commutator quadratic form must be real, got {total}"
    );
    QuadraticFormReport {
        dim: n,
        value: FockScalar(total),
        per_pair,
        decomposition: None,
    }
}

/// The four quantities of the energy identity
/// ‖Du‖² + ‖D*u‖² = Σ_{j,k}‖p_k(u_j)‖² + Q(u), all in units πⁿ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergyIdentityReport {
    pub du_norm_sq: FockScalar,
    pub dstar_norm_sq: FockScalar,
    pub derivative_norm_sq: FockScalar,
    pub quadratic_form: FockScalar,
    pub equal: bool,
}

/// Checks the energy identity exactly; the left side is computed through the
/// forms module, the right side through operators and inner products.
pub fn energy_identity_check(family: &OperatorFamily, u: &PForm) -> EnergyIdentityReport {
    assert_eq!(family.dim(), u.dim(), "dimension mismatch");
    assert_eq!(u.degree(), 1, "energy identity is about (1,0)-forms");
    let n = family.dim();
    let du_norm_sq = if n >= 2 {
        d_apply(family, u).expect("degree 1 < n").norm_sq()
    } else {
        // all (2,0)-forms vanish in one variable
        FockScalar::zero()
    };
    let dstar_norm_sq = dstar_apply(family, u).expect("degree 1 > 0").norm_sq();
    let mut derivative_norm_sq = FockScalar::zero();
    for j in 0..n {
        let uj = u.one_form_component(j);
        if uj.is_zero() {
            continue;
        }
        for k in 0..n {
            derivative_norm_sq = derivative_norm_sq + norm_sq(&family.diff_op(k).apply(&uj));
        }
    }
    let q = quadratic_form(family, u).value;
    let lhs = du_norm_sq.clone() + dstar_norm_sq.clone();
    let rhs = derivative_norm_sq.clone() + q.clone();
    EnergyIdentityReport {
        du_norm_sq,
        dstar_norm_sq,
        derivative_norm_sq,
        quadratic_form: q,
        equal: lhs == rhs,
    }
}

/// Both sides of the one-dimensional commutator identity, in units of π.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorIdentityReport {
    pub lhs: FockScalar,
    pub rhs: FockScalar,
    pub equal: bool,
}

/// For p = a₀ + a₁∂ + … + a_m∂^m and a polynomial u, checks
/// ([p, p*]u, u) = Σ_{ℓ=1}^m ℓ!·‖Σ_{k=ℓ}^m C(k,ℓ)·a_k·u^{(k−ℓ)}‖²
/// exactly. The left side goes through the commutator machinery, the right
/// side through binomial sums of norms.
pub fn commutator_identity_1d(coeffs: &[GaussianRational], u: &FockPoly) -> CommutatorIdentityReport {
    assert_eq!(u.dim(), 1, "the identity is one-dimensional");
    let m = coeffs.len().saturating_sub(1);

    let mut p = WeylOp::zero(1);
    for (k, a) in coeffs.iter().enumerate() {
        p.add_term(MultiIndex::zeros(1), MultiIndex::new(vec![k as u32]), a.clone());
    }
    let lhs = fock_inner(&p.commutator(&p.adjoint()).apply(u), u);

    // u^{(j)} for j up to m
    let mut derivatives = vec![u.clone()];
    for _ in 0..m {
        derivatives.push(derivatives.last().unwrap().derivative(0));
    }
    let mut rhs = GaussianRational::zero();
    for ell in 1..=m {
        let mut inner_sum = FockPoly::zero(1);
        for k in ell..=m {
            let c = GaussianRational::from_bigint(binomial(k as u32, ell as u32));
            inner_sum = &inner_sum + &derivatives[k - ell].scale(&(&c * &coeffs[k]));
        }
        let weight = GaussianRational::from_bigint(crate::scalar::factorial(ell as u32));
        rhs = rhs + weight * norm_sq(&inner_sum).0;
    }
    let rhs = FockScalar(rhs);
    let equal = lhs == rhs;
    CommutatorIdentityReport { lhs, rhs, equal }
}

/// The operator Σ_{|α|≥1} (1/α!)·(q^{(α)})*(z)·p^{(α)}(∂), assembled from
/// symbol derivatives. Equals the normal-ordered commutator
/// [p(∂), q*(z)] identically.
pub fn commutator_expansion(p: &SymbolPoly, q: &SymbolPoly) -> WeylOp {
    assert_eq!(p.dim(), q.dim(), "dimension mismatch");
    hamil_tail(p, &q.conj(), 1)
}

/// Which theorem's condition set a family satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoremTag {
    /// Cross-variable first-order pairings (degree-2 families, variant one).
    Dim2,
    /// Same-variable first-order pairings (degree-2 families, variant two).
    Dim23,
}

impl fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoremTag::Dim2 => write!(f, "dim2"),
            TheoremTag::Dim23 => write!(f, "dim23"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignChoice {
    Plus,
    Minus,
}

impl SignChoice {
    pub fn factor(&self) -> GaussianRational {
        match self {
            SignChoice::Plus => GaussianRational::one(),
            SignChoice::Minus => -GaussianRational::one(),
        }
    }
}

impl fmt::Display for SignChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignChoice::Plus => write!(f, "+1"),
            SignChoice::Minus => write!(f, "-1"),
        }
    }
}

/// A violated operator identity, with both sides printed in DSL form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityViolation {
    pub condition: String,
    pub lhs: String,
    pub rhs: String,
}

/// Outcome of the degree-2, dimension-2 condition check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionVerdict {
    /// The condition set that was satisfied; None if neither.
    pub theorem: Option<TheoremTag>,
    /// The consistent sign σ; None when vacuous (both signs work) or failed.
    pub sign: Option<SignChoice>,
    pub first_order_ok: bool,
    pub second_order_ok: bool,
    pub c1: BigRational,
    pub c2: BigRational,
    /// 1/min(C₁,C₂); present iff all checks pass and min(C₁,C₂) > 0.
    pub estimate_constant: Option<BigRational>,
    pub failures: Vec<IdentityViolation>,
}

impl ConditionVerdict {
    pub fn passed(&self) -> bool {
        self.theorem.is_some() && self.first_order_ok && self.second_order_ok
    }
}

/// (p_j^{(e_i)})*(z) ∘ p_k^{(e_i)}(∂) as a normal-ordered operator.
fn first_order_product(p: &[&SymbolPoly; 2], i: usize, j: usize, k: usize) -> WeylOp {
    let pj = p[j].derivative_var(i);
    let pk = p[k].derivative_var(i);
    pj.adjoint_multiplier_op().multiply(&pk.diff_op())
}

/// Checks the two degree-2 condition sets for a pair (p₁, p₂) in dimension 2,
/// computes the constants C₁, C₂ from the second-order derivatives, and on
/// success reports the coercivity constant 1/min(C₁,C₂).
pub fn check_conditions_dim2(p1: &SymbolPoly, p2: &SymbolPoly) -> Result<ConditionVerdict> {
    if p1.dim() != 2 || p2.dim() != 2 {
        return Err(CoreError::DimensionMismatch {
            expected: 2,
            found: if p1.dim() != 2 { p1.dim() } else { p2.dim() },
        });
    }
    for p in [p1, p2] {
        if let Some(d) = p.degree() {
            if d > 2 {
                return Err(CoreError::DegreeTooHigh { max: 2, found: d });
            }
        }
    }
    let p = [p1, p2];

    // Second-order data, shared by both condition sets: for every |α| = 2 the
    // products p_j^{(α)*}p_k^{(α)} are constants; off-diagonal ones must
    // vanish, diagonal ones are c_{j,α} = |p_j^{(α)}|² ≥ 0 automatically.
    let mut second_failures = Vec::new();
    let mut c = [BigRational::zero(), BigRational::zero()];
    for alpha in MultiIndex::all_up_to(2, 2) {
        if alpha.order() != 2 {
            continue;
        }
        let d1 = p[0].derivative(&alpha).coeff(&MultiIndex::zeros(2));
        let d2 = p[1].derivative(&alpha).coeff(&MultiIndex::zeros(2));
        let cross = &d1.conj() * &d2;
        if !cross.is_zero() {
            second_failures.push(IdentityViolation {
                condition: format!("second-order cross product at alpha = {alpha}"),
                lhs: format!("p1^({alpha})* p2^({alpha}) = {cross}"),
                rhs: "0".to_string(),
            });
        }
        let inv_fact = BigRational::from_integer(alpha.factorial()).recip();
        c[0] += d1.norm_sqr() * inv_fact.clone();
        c[1] += d2.norm_sqr() * inv_fact;
    }
    let degenerate = c[0].is_zero() || c[1].is_zero();
    if degenerate {
        second_failures.push(IdentityViolation {
            condition: "second-order constants must be positive".to_string(),
            lhs: format!("C1 = {}, C2 = {}", c[0], c[1]),
            rhs: "C1 > 0 and C2 > 0".to_string(),
        });
    }
    let second_order_ok = second_failures.is_empty();

    // First-order identities of the two condition sets. Each is a pair of
    // exact operator equalities with one consistent sign σ for the set.
    let identity_sets: [(TheoremTag, [( &str, WeylOp, WeylOp); 2]); 2] = [
        (
            TheoremTag::Dim23,
            [
                (
                    "p2^(e1)* p1^(e1) = ± p1^(e1)* p2^(e1)",
                    first_order_product(&p, 0, 1, 0),
                    first_order_product(&p, 0, 0, 1),
                ),
                (
                    "p1^(e2)* p2^(e2) = ± p2^(e2)* p1^(e2)",
                    first_order_product(&p, 1, 0, 1),
                    first_order_product(&p, 1, 1, 0),
                ),
            ],
        ),
        (
            TheoremTag::Dim2,
            [
                (
                    "p2^(e1)* p1^(e1) = ± p1^(e2)* p2^(e2)",
                    first_order_product(&p, 0, 1, 0),
                    first_order_product(&p, 1, 0, 1),
                ),
                (
                    "p1^(e1)* p2^(e1) = ± p2^(e2)* p1^(e2)",
                    first_order_product(&p, 0, 0, 1),
                    first_order_product(&p, 1, 1, 0),
                ),
            ],
        ),
    ];

    let mut chosen: Option<(TheoremTag, Option<SignChoice>)> = None;
    let mut first_failures = Vec::new();
    for (tag, identities) in &identity_sets {
        let mut works = Vec::new();
        for sign in [SignChoice::Plus, SignChoice::Minus] {
            let ok = identities
                .iter()
                .all(|(_, lhs, rhs)| *lhs == rhs.scale(&sign.factor()));
            if ok {
                works.push(sign);
            }
        }
        if !works.is_empty() {
            if chosen.is_none() {
                let sign = if works.len() == 2 { None } else { Some(works[0]) };
                chosen = Some((*tag, sign));
            }
        } else {
            // per-identity signs, to surface mixed-sign near misses
            let mut per_identity: Vec<Vec<SignChoice>> = Vec::new();
            for (label, lhs, rhs) in identities {
                let signs: Vec<SignChoice> = [SignChoice::Plus, SignChoice::Minus]
                    .into_iter()
                    .filter(|s| *lhs == rhs.scale(&s.factor()))
                    .collect();
                if signs.is_empty() {
                    first_failures.push(IdentityViolation {
                        condition: format!("{tag}: {label}"),
                        lhs: lhs.to_string(),
                        rhs: rhs.to_string(),
                    });
                }
                per_identity.push(signs);
            }
            if per_identity.iter().all(|s| !s.is_empty()) {
                first_failures.push(IdentityViolation {
                    condition: format!(
                        "{tag}: identities hold only with opposite signs (mixed ±, not covered)"
                    ),
                    lhs: format!("{:?}", per_identity[0]),
                    rhs: format!("{:?}", per_identity[1]),
                });
            }
        }
    }

    let first_order_ok = chosen.is_some();
    if first_order_ok {
        // one condition set holds; the other's violations are irrelevant
        first_failures.clear();
    }
    let (theorem, sign) = match chosen {
        Some((tag, sign)) => (Some(tag), sign),
        None => (None, None),
    };
    let mut failures = first_failures;
    failures.extend(second_failures);

    let estimate_constant = if first_order_ok && second_order_ok {
        let min = if c[0] <= c[1] { c[0].clone() } else { c[1].clone() };
        if min.is_positive() {
            Some(min.recip())
        } else {
            None
        }
    } else {
        None
    };

    Ok(ConditionVerdict {
        theorem,
        sign,
        first_order_ok,
        second_order_ok,
        c1: c[0].clone(),
        c2: c[1].clone(),
        estimate_constant,
        failures,
    })
}

/// Splits Q(u) into the proof's nonnegative pieces
/// C₁‖u₁‖² + C₂‖u₂‖² + Σ_i ‖p₁^{(e_i)}u₁ ± p₂^{(e_i)}u₂‖²
/// for a verdict that passed; the pieces sum to the quadratic form value.
pub fn decompose_quadratic_form(
    p1: &SymbolPoly,
    p2: &SymbolPoly,
    u: &PForm,
    verdict: &ConditionVerdict,
) -> Result<QuadraticFormReport> {
    if !verdict.passed() {
        return Err(CoreError::VerdictNotPassed);
    }
    let family = OperatorFamily::new(vec![p1.clone(), p2.clone()])?;
    let mut report = quadratic_form(&family, u);

    let sign = verdict.sign.unwrap_or(SignChoice::Plus);
    let u1 = u.one_form_component(0);
    let u2 = u.one_form_component(1);
    let mut pieces = Vec::new();
    for (j, (cj, uj)) in [(&verdict.c1, &u1), (&verdict.c2, &u2)].into_iter().enumerate() {
        pieces.push(DecompositionPiece {
            label: format!("C{} * ||u{}||^2", j + 1, j + 1),
            value: FockScalar(
                GaussianRational::from_rational(cj.clone()) * norm_sq(uj).0,
            ),
        });
    }
    let op = if sign == SignChoice::Plus { "+" } else { "-" };
    for i in 0..2 {
        let g1 = p1.derivative_var(i).diff_op().apply(&u1);
        let g2 = p2.derivative_var(i).diff_op().apply(&u2);
        let combo = &g1 + &g2.scale(&sign.factor());
        pieces.push(DecompositionPiece {
            label: format!("||p1^(e{}) u1 {} p2^(e{}) u2||^2", i + 1, op, i + 1),
            value: norm_sq(&combo),
        });
    }
    report.decomposition = Some(pieces);
    Ok(report)
}

/// A negative value of the quadratic form found by the scanner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexampleHit {
    pub form: PForm,
    pub value: FockScalar,
}

/// The default scanner coefficient set: the fourth roots of unity.
pub fn unit_coefficients() -> Vec<GaussianRational> {
    vec![
        GaussianRational::one(),
        -GaussianRational::one(),
        GaussianRational::i(),
        -GaussianRational::i(),
    ]
}

/// Scans two-component monomial forms u = c₁z^α dz₁ + c₂z^β dz₂ with
/// |α|, |β| ≤ max_degree and coefficients from the fourth roots of unity,
/// returning every form with strictly negative quadratic form value, sorted
/// by value (then by a canonical key, so the output order is deterministic).
pub fn scan_counterexample(
    p1: &SymbolPoly,
    p2: &SymbolPoly,
    max_degree: u32,
) -> Result<Vec<CounterexampleHit>> {
    scan_counterexample_with(p1, p2, max_degree, &unit_coefficients())
}

/// Like [`scan_counterexample`] with a caller-chosen coefficient grid.
pub fn scan_counterexample_with(
    p1: &SymbolPoly,
    p2: &SymbolPoly,
    max_degree: u32,
    coefficients: &[GaussianRational],
) -> Result<Vec<CounterexampleHit>> {
    if p1.dim() != 2 || p2.dim() != 2 {
        return Err(CoreError::DimensionMismatch {
            expected: 2,
            found: if p1.dim() != 2 { p1.dim() } else { p2.dim() },
        });
    }
    let family = OperatorFamily::new(vec![p1.clone(), p2.clone()])?;
    let comms = commutator_matrix(&family);
    let monomials = MultiIndex::all_up_to(2, max_degree);
    let mut hits = Vec::new();
    for (ai, alpha) in monomials.iter().enumerate() {
        let za = FockPoly::monomial(alpha.clone(), GaussianRational::one());
        for (bi, beta) in monomials.iter().enumerate() {
            let zb = FockPoly::monomial(beta.clone(), GaussianRational::one());
            // pairings of the unit monomials; coefficients enter bilinearly
            let units = [&za, &zb];
            let mut base = vec![vec![GaussianRational::zero(); 2]; 2];
            for j in 0..2 {
                for k in 0..2 {
                    base[j][k] = fock_inner(&comms[j][k].apply(units[j]), units[k]).0;
                }
            }
            for (ci, c1) in coefficients.iter().enumerate() {
                for (di, c2) in coefficients.iter().enumerate() {
                    let cs = [c1, c2];
                    let mut value = GaussianRational::zero();
                    for j in 0..2 {
                        for k in 0..2 {
                            value = value + &(cs[j] * &cs[k].conj()) * &base[j][k];
                        }
                    }
                    debug_assert!(value.is_real());
                    if value.re() < &BigRational::zero() {
                        let u1 = FockPoly::monomial(alpha.clone(), c1.clone());
                        let u2 = FockPoly::monomial(beta.clone(), c2.clone());
                        hits.push(((ai, bi, ci, di), value, u1, u2));
                    }
                }
            }
        }
    }
    hits.sort_by(|(ka, va, ..), (kb, vb, ..)| va.re().cmp(vb.re()).then(ka.cmp(kb)));
    Ok(hits
        .into_iter()
        .map(|(_, value, u1, u2)| CounterexampleHit {
            form: PForm::one_form(vec![u1, u2]),
            value: FockScalar(value),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn sym(text: &str) -> SymbolPoly {
        SymbolPoly::parse(text, 2).unwrap()
    }

    fn family(text: &str) -> OperatorFamily {
        OperatorFamily::parse(text).unwrap()
    }

    fn q(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn one_form(u1: &str, u2: &str) -> PForm {
        PForm::one_form(vec![
            FockPoly::parse(u1, 2).unwrap(),
            FockPoly::parse(u2, 2).unwrap(),
        ])
    }

    // the paper-style closed form for the family p₁ = ∂₁²+∂₂, p₂ = ∂₁+∂₂²:
    // 3(‖u₁‖²+‖u₂‖²) + 4(‖∂₁u₁‖²+‖∂₂u₂‖²)
    //   + 2(u₁,z₂u₂) + 2(z₁u₁,u₂) + 2(u₂,z₁u₁) + 2(z₂u₂,u₁)
    fn family_d_display_oracle(u1: &FockPoly, u2: &FockPoly) -> GaussianRational {
        let z1u1 = FockPoly::var(2, 0).mul(u1);
        let z2u2 = FockPoly::var(2, 1).mul(u2);
        let three = q(3);
        let four = q(4);
        let two = q(2);
        three.clone() * (norm_sq(u1).0 + norm_sq(u2).0)
            + four * (norm_sq(&u1.derivative(0)).0 + norm_sq(&u2.derivative(1)).0)
            + two.clone() * fock_inner(u1, &z2u2).0
            + two.clone() * fock_inner(&z1u1, u2).0
            + two.clone() * fock_inner(u2, &z1u1).0
            + two * fock_inner(&z2u2, u1).0
    }

    #[test]
    fn quadratic_form_family_c_sample() {
        // p₁ = ∂₁², p₂ = ∂₂², u = z₁dz₁: 2·1 + 4·1 = 6
        let f = family("d1^2; d2^2");
        let u = one_form("z1", "0");
        let report = quadratic_form(&f, &u);
        assert_eq!(report.value.value(), &q(6));
    }

    #[test]
    fn quadratic_form_family_a_sample() {
        // p₁ = ∂₁∂₂, p₂ = ∂₁²+∂₂², u = z₁dz₁ + z₂dz₂: 1 + 4 + |1+2|² = 14
        let f = family("d1*d2; d1^2 + d2^2");
        let u = one_form("z1", "z2");
        let report = quadratic_form(&f, &u);
        assert_eq!(report.value.value(), &q(14));
        // per-pair entries sum to the value
        let sum = report
            .per_pair
            .values()
            .fold(GaussianRational::zero(), |acc, v| acc + v.0.clone());
        assert_eq!(&sum, report.value.value());
    }

    #[test]
    fn quadratic_form_family_d_sample() {
        // p₁ = ∂₁²+∂₂, p₂ = ∂₁+∂₂², u = z₂ⁿdz₁ − z₂ⁿ⁻¹dz₂. The commutator
        // route must match the displayed closed form; both give
        // (3n−1)·(n−1)! — positive for every n.
        let f = family("d1^2 + d2; d1 + d2^2");
        for n in [3u32, 8, 9, 10] {
            let u1 = FockPoly::monomial(MultiIndex::new(vec![0, n]), q(1));
            let u2 = FockPoly::monomial(MultiIndex::new(vec![0, n - 1]), q(-1));
            let u = PForm::one_form(vec![u1.clone(), u2.clone()]);
            let report = quadratic_form(&f, &u);
            let display = family_d_display_oracle(&u1, &u2);
            assert_eq!(report.value.value(), &display);
            let expected = GaussianRational::from_bigint(
                crate::scalar::factorial(n - 1) * BigInt::from(3 * n - 1),
            );
            assert_eq!(report.value.value(), &expected);
        }
    }

    #[test]
    fn energy_identity_family_d_sample() {
        let f = family("d1^2 + d2; d1 + d2^2");
        let u = one_form("z2^8", "-z2^7");
        let report = energy_identity_check(&f, &u);
        assert!(report.equal);
        // ‖Du‖² = 63²·6!, ‖D*u‖² = 2!·8! + 7!, Σ‖p_k(u_j)‖² known exactly
        assert_eq!(report.du_norm_sq.value(), &q(2857680));
        assert_eq!(report.dstar_norm_sq.value(), &q(85680));
        assert_eq!(report.derivative_norm_sq.value(), &q(2827440));
        assert_eq!(report.quadratic_form.value(), &q(115920));
    }

    #[test]
    fn energy_identity_zero_form() {
        let f = family("d1^2 + d2; d1 + d2^2");
        let report = energy_identity_check(&f, &one_form("0", "0"));
        assert!(report.equal);
        assert!(report.quadratic_form.is_zero());
        assert!(report.du_norm_sq.is_zero());
    }

    #[test]
    fn conditions_require_dimension_two() {
        let p = SymbolPoly::parse("d1^2", 1).unwrap();
        assert!(matches!(
            check_conditions_dim2(&p, &p),
            Err(CoreError::DimensionMismatch { expected: 2, .. })
        ));
    }

    #[test]
    fn commutator_identity_examples() {
        // m = 1, a = (0,1): both sides k!
        for k in 0..=4u32 {
            let u = FockPoly::monomial(MultiIndex::new(vec![k]), q(1));
            let report = commutator_identity_1d(&[q(0), q(1)], &u);
            assert!(report.equal);
            assert_eq!(
                report.lhs.value(),
                &GaussianRational::from_bigint(crate::scalar::factorial(k))
            );
        }

        let report = commutator_identity_1d(&[q(1), GaussianRational::i(), q(2)], &FockPoly::zero(1));
        assert!(report.equal);
        assert!(report.lhs.is_zero());

        let u = FockPoly::parse("1 + z1^2", 1).unwrap();
        let report = commutator_identity_1d(&[q(1), GaussianRational::i(), q(2)], &u);
        assert!(report.equal, "lhs = {}, rhs = {}", report.lhs, report.rhs);
    }

    #[test]
    fn commutator_expansion_examples() {
        let w1 = SymbolPoly::parse("d1", 1).unwrap();
        assert_eq!(commutator_expansion(&w1, &w1), WeylOp::identity(1));

        let p = sym("d1*d2");
        let qq = sym("d1^2 + d2^2");
        let expansion = commutator_expansion(&p, &qq);
        assert_eq!(expansion, WeylOp::parse("2*z1*d2 + 2*z2*d1", 2).unwrap());
        // oracle: the direct normal-ordered commutator
        let direct = p.diff_op().commutator(&qq.adjoint_multiplier_op());
        assert_eq!(expansion, direct);

        let c = sym("3 - i");
        assert!(commutator_expansion(&c, &qq).is_zero());
        assert!(commutator_expansion(&p, &c).is_zero());
    }

    #[test]
    fn conditions_family_a() {
        let v = check_conditions_dim2(&sym("d1*d2"), &sym("d1^2 + d2^2")).unwrap();
        assert!(v.passed());
        assert_eq!(v.theorem, Some(TheoremTag::Dim2));
        assert_eq!(v.sign, Some(SignChoice::Plus));
        assert_eq!(v.c1, BigRational::from_integer(1.into()));
        assert_eq!(v.c2, BigRational::from_integer(4.into()));
        assert_eq!(v.estimate_constant, Some(BigRational::from_integer(1.into())));
    }

    #[test]
    fn conditions_family_b() {
        let v = check_conditions_dim2(&sym("i*d1*d2"), &sym("d1^2 + d2^2")).unwrap();
        assert!(v.passed());
        assert_eq!(v.theorem, Some(TheoremTag::Dim2));
        assert_eq!(v.sign, Some(SignChoice::Minus));
        assert_eq!(v.c1, BigRational::from_integer(1.into()));
        assert_eq!(v.c2, BigRational::from_integer(4.into()));
    }

    #[test]
    fn conditions_family_c() {
        let v = check_conditions_dim2(&sym("d1^2"), &sym("d2^2")).unwrap();
        assert!(v.passed());
        assert_eq!(v.theorem, Some(TheoremTag::Dim23));
        assert_eq!(v.sign, None); // vacuous: both signs work
        assert_eq!(v.c1, BigRational::from_integer(2.into()));
        assert_eq!(v.c2, BigRational::from_integer(2.into()));
        assert_eq!(
            v.estimate_constant,
            Some(BigRational::new(1.into(), 2.into()))
        );
    }

    #[test]
    fn conditions_family_d_fails_both() {
        let v = check_conditions_dim2(&sym("d1^2 + d2"), &sym("d1 + d2^2")).unwrap();
        assert!(!v.passed());
        assert_eq!(v.theorem, None);
        assert!(!v.first_order_ok);
        assert!(v.failures.iter().any(|f| f.condition.starts_with("dim2:")));
        assert!(v.failures.iter().any(|f| f.condition.starts_with("dim23:")));
    }

    #[test]
    fn conditions_degenerate_family() {
        // degree-1 symbols have no second-order part: C_j = 0, degenerate
        let v = check_conditions_dim2(&sym("d1"), &sym("d2")).unwrap();
        assert!(!v.passed());
        assert!(!v.second_order_ok);
        assert!(v.estimate_constant.is_none());
    }

    #[test]
    fn conditions_reject_high_degree() {
        assert!(matches!(
            check_conditions_dim2(&sym("d1^3"), &sym("d2^2")),
            Err(CoreError::DegreeTooHigh { .. })
        ));
    }

    #[test]
    fn decompose_family_a() {
        let p1 = sym("d1*d2");
        let p2 = sym("d1^2 + d2^2");
        let v = check_conditions_dim2(&p1, &p2).unwrap();
        let u = one_form("z1", "z2");
        let report = decompose_quadratic_form(&p1, &p2, &u, &v).unwrap();
        let pieces = report.decomposition.as_ref().unwrap();
        let values: Vec<&GaussianRational> = pieces.iter().map(|p| p.value.value()).collect();
        assert_eq!(values, vec![&q(1), &q(4), &q(0), &q(9)]);
        let sum = pieces
            .iter()
            .fold(GaussianRational::zero(), |acc, p| acc + p.value.0.clone());
        assert_eq!(&sum, report.value.value());
        assert_eq!(report.value.value(), &q(14));
    }

    #[test]
    fn decompose_family_b_constant_form() {
        let p1 = sym("i*d1*d2");
        let p2 = sym("d1^2 + d2^2");
        let v = check_conditions_dim2(&p1, &p2).unwrap();
        let u = one_form("1", "0");
        let report = decompose_quadratic_form(&p1, &p2, &u, &v).unwrap();
        let pieces = report.decomposition.as_ref().unwrap();
        let values: Vec<&GaussianRational> = pieces.iter().map(|p| p.value.value()).collect();
        assert_eq!(values, vec![&q(1), &q(0), &q(0), &q(0)]);
        assert_eq!(report.value.value(), &q(1));
    }

    #[test]
    fn decompose_zero_form() {
        let p1 = sym("d1^2");
        let p2 = sym("d2^2");
        let v = check_conditions_dim2(&p1, &p2).unwrap();
        let u = one_form("0", "0");
        let report = decompose_quadratic_form(&p1, &p2, &u, &v).unwrap();
        assert!(report.value.is_zero());
        assert!(report
            .decomposition
            .unwrap()
            .iter()
            .all(|p| p.value.is_zero()));
    }

    #[test]
    fn decompose_requires_passed_verdict() {
        let p1 = sym("d1^2 + d2");
        let p2 = sym("d1 + d2^2");
        let v = check_conditions_dim2(&p1, &p2).unwrap();
        let u = one_form("z1", "0");
        assert!(matches!(
            decompose_quadratic_form(&p1, &p2, &u, &v),
            Err(CoreError::VerdictNotPassed)
        ));
    }

    #[test]
    fn scan_family_d_is_empty() {
        // The family-(d) quadratic form is positive on every scanned monomial
        // pair; the display oracle cross-checks a sampling of scan values.
        let p1 = sym("d1^2 + d2");
        let p2 = sym("d1 + d2^2");
        let hits = scan_counterexample(&p1, &p2, 8).unwrap();
        assert!(hits.is_empty());

        let comms = commutator_matrix(&OperatorFamily::new(vec![p1, p2]).unwrap());
        for alpha in MultiIndex::all_up_to(2, 3) {
            for beta in MultiIndex::all_up_to(2, 3) {
                let u1 = FockPoly::monomial(alpha.clone(), q(1));
                let u2 = FockPoly::monomial(beta.clone(), q(-1));
                let via_comms = quadratic_form_value(&comms, &[u1.clone(), u2.clone()]);
                assert_eq!(via_comms, family_d_display_oracle(&u1, &u2));
            }
        }
    }

    #[test]
    fn scan_family_a_and_c_empty() {
        assert!(scan_counterexample(&sym("d1*d2"), &sym("d1^2 + d2^2"), 6)
            .unwrap()
            .is_empty());
        assert!(scan_counterexample(&sym("d1^2"), &sym("d2^2"), 0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn scan_finds_planted_negative() {
        // p₁ = ∂₁, p₂ = ∂₁² couples ∂₁u₁ against u₂ with too little diagonal
        // to compensate: Q(z₁dz₁ − dz₂) = 1 − 2 − 2 + 2 = −1.
        let p1 = SymbolPoly::parse("d1", 2).unwrap();
        let p2 = SymbolPoly::parse("d1^2", 2).unwrap();
        let hits = scan_counterexample(&p1, &p2, 1).unwrap();
        assert!(!hits.is_empty());
        let fam = OperatorFamily::new(vec![p1, p2]).unwrap();
        for hit in &hits {
            let direct = quadratic_form(&fam, &hit.form);
            assert_eq!(direct.value, hit.value);
            assert!(hit.value.value().re() < &BigRational::zero());
        }
        assert!(hits
            .windows(2)
            .all(|w| w[0].value.value().re() <= w[1].value.value().re()));
        let witness = PForm::one_form(vec![
            FockPoly::parse("z1", 2).unwrap(),
            FockPoly::parse("-1", 2).unwrap(),
        ]);
        assert!(hits
            .iter()
            .any(|h| h.form == witness && h.value.value() == &q(-1)));
    }

    fn arb_family_n(dim: usize, max_order: u32) -> impl Strategy<Value = OperatorFamily> {
        proptest::collection::vec(arb_symbol(dim, max_order), dim)
            .prop_map(|symbols| OperatorFamily::new(symbols).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn quadratic_form_is_real(
            (fam, u) in (1usize..=3).prop_flat_map(|dim| {
                (arb_family_n(dim, 2), arb_pform(dim, 1, 3))
            })
        ) {
            let report = quadratic_form(&fam, &u);
            prop_assert!(report.value.is_real());
        }

        #[test]
        fn energy_identity_random(
            (fam, u) in (1usize..=3).prop_flat_map(|dim| {
                (arb_family_n(dim, 2), arb_pform(dim, 1, 4))
            })
        ) {
            let report = energy_identity_check(&fam, &u);
            prop_assert!(report.equal);
        }

        #[test]
        fn comm11_random(
            coeffs in proptest::collection::vec(arb_gaussian(), 1..=5),
            u in arb_poly(1, 6),
        ) {
            let report = commutator_identity_1d(&coeffs, &u);
            prop_assert!(report.equal, "lhs = {}, rhs = {}", report.lhs, report.rhs);
        }

        #[test]
        fn hamil2_random(
            (p, qq) in (1usize..=3).prop_flat_map(|dim| {
                (arb_symbol(dim, 3), arb_symbol(dim, 3))
            })
        ) {
            let expansion = commutator_expansion(&p, &qq);
            let direct = p.diff_op().commutator(&qq.adjoint_multiplier_op());
            prop_assert_eq!(expansion, direct);
        }

        #[test]
        fn coercivity_when_conditions_pass(u in arb_pform(2, 1, 4)) {
            // family (a) passes with min(C₁,C₂) = 1
            let p1 = SymbolPoly::parse("d1*d2", 2).unwrap();
            let p2 = SymbolPoly::parse("d1^2 + d2^2", 2).unwrap();
            let fam = OperatorFamily::new(vec![p1.clone(), p2.clone()]).unwrap();
            let v = check_conditions_dim2(&p1, &p2).unwrap();
            let min_c = if v.c1 <= v.c2 { v.c1.clone() } else { v.c2.clone() };
            let qf = quadratic_form(&fam, &u);
            let bound = GaussianRational::from_rational(min_c) * u.norm_sq().0;
            let slack = qf.value.0 - bound;
            prop_assert!(slack.re() >= &BigRational::zero());

            // decomposition pieces sum back to the quadratic form, exactly
            let report = decompose_quadratic_form(&p1, &p2, &u, &v).unwrap();
            let sum = report.decomposition.unwrap().iter().fold(
                GaussianRational::zero(),
                |acc, piece| acc + piece.value.0.clone(),
            );
            prop_assert_eq!(&sum, report.value.value());
        }
    }
}
