//! Shared proptest strategies for the in-crate test modules.

use crate::fock::FockPoly;
use crate::forms::PForm;
use crate::scalar::{GaussianRational, MultiIndex};
use crate::weyl::{SymbolPoly, WeylOp};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

pub fn arb_rational() -> impl Strategy<Value = BigRational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

pub fn arb_gaussian() -> impl Strategy<Value = GaussianRational> {
    (arb_rational(), arb_rational()).prop_map(|(re, im)| GaussianRational::new(re, im))
}

pub fn arb_multiindex(dim: usize, max_order: u32) -> impl Strategy<Value = MultiIndex> {
    let all = MultiIndex::all_up_to(dim, max_order);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

/// Random sparse polynomial of total degree ≤ max_order with up to 4 terms.
pub fn arb_poly(dim: usize, max_order: u32) -> impl Strategy<Value = FockPoly> {
    proptest::collection::vec((arb_multiindex(dim, max_order), arb_gaussian()), 0..=4).prop_map(
        move |terms| {
            let mut p = FockPoly::zero(dim);
            for (a, c) in terms {
                p.add_term(a, c);
            }
            p
        },
    )
}

pub fn arb_nonzero_poly(dim: usize, max_order: u32) -> impl Strategy<Value = FockPoly> {
    arb_poly(dim, max_order).prop_filter("nonzero polynomial", |p| !p.is_zero())
}

/// Random normal-ordered operator with up to 3 terms, each z^α∂^β with
/// |α|, |β| ≤ max_order.
pub fn arb_weyl_op(dim: usize, max_order: u32) -> impl Strategy<Value = WeylOp> {
    proptest::collection::vec(
        (
            arb_multiindex(dim, max_order),
            arb_multiindex(dim, max_order),
            arb_gaussian(),
        ),
        0..=3,
    )
    .prop_map(move |terms| {
        let mut op = WeylOp::zero(dim);
        for (a, b, c) in terms {
            op.add_term(a, b, c);
        }
        op
    })
}

pub fn arb_symbol(dim: usize, max_order: u32) -> impl Strategy<Value = SymbolPoly> {
    proptest::collection::vec((arb_multiindex(dim, max_order), arb_gaussian()), 0..=3).prop_map(
        move |terms| {
            let mut p = SymbolPoly::zero(dim);
            for (a, c) in terms {
                p.add_term(a, c);
            }
            p
        },
    )
}

/// Random (p,0)-form with polynomial components of degree ≤ max_order.
pub fn arb_pform(dim: usize, degree: usize, max_order: u32) -> impl Strategy<Value = PForm> {
    let tuples = increasing_tuples(dim, degree);
    let n = tuples.len();
    proptest::collection::vec(arb_poly(dim, max_order), n).prop_map(move |polys| {
        let mut form = PForm::zero(dim, degree);
        for (idx, poly) in tuples.iter().zip(polys) {
            form.add_component(idx.clone(), poly);
        }
        form
    })
}

/// All strictly increasing index tuples of the given length from 0..dim.
pub fn increasing_tuples(dim: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, dim: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for j in start..dim {
            cur.push(j);
            rec(j + 1, dim, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, dim, len, &mut Vec::new(), &mut out);
    out
}
