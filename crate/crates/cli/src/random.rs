//! Seeded generators for randomized identity checks. A fixed seed makes every
//! run reproducible; the CLI threads its `--seed` through here.

use dcomplex_core::fock::FockPoly;
use dcomplex_core::forms::{OperatorFamily, PForm};
use dcomplex_core::scalar::{GaussianRational, MultiIndex};
use dcomplex_core::weyl::SymbolPoly;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rand_gaussian(rng: &mut ChaCha8Rng) -> GaussianRational {
    GaussianRational::from_ratios(
        rng.gen_range(-4..=4),
        rng.gen_range(1..=3),
        rng.gen_range(-4..=4),
        rng.gen_range(1..=3),
    )
}

pub fn rand_poly(rng: &mut ChaCha8Rng, dim: usize, max_deg: u32) -> FockPoly {
    let monos = MultiIndex::all_up_to(dim, max_deg);
    let mut p = FockPoly::zero(dim);
    for _ in 0..rng.gen_range(1..=4) {
        let alpha = monos[rng.gen_range(0..monos.len())].clone();
        p.add_term(alpha, rand_gaussian(rng));
    }
    p
}

pub fn rand_symbol(rng: &mut ChaCha8Rng, dim: usize, max_deg: u32) -> SymbolPoly {
    let monos = MultiIndex::all_up_to(dim, max_deg);
    let mut p = SymbolPoly::zero(dim);
    for _ in 0..rng.gen_range(0..=3) {
        let alpha = monos[rng.gen_range(0..monos.len())].clone();
        p.add_term(alpha, rand_gaussian(rng));
    }
    p
}

pub fn rand_family(rng: &mut ChaCha8Rng, dim: usize, max_deg: u32) -> OperatorFamily {
    OperatorFamily::new((0..dim).map(|_| rand_symbol(rng, dim, max_deg)).collect())
        .expect("generated family is valid")
}

pub fn rand_one_form(rng: &mut ChaCha8Rng, dim: usize, max_deg: u32) -> PForm {
    PForm::one_form((0..dim).map(|_| rand_poly(rng, dim, max_deg)).collect())
}

fn increasing_tuples(dim: usize, len: usize) -> Vec<Vec<usize>> {
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

pub fn rand_pform(rng: &mut ChaCha8Rng, dim: usize, degree: usize, max_deg: u32) -> PForm {
    let mut form = PForm::zero(dim, degree);
    for idx in increasing_tuples(dim, degree) {
        form.add_component(idx, rand_poly(rng, dim, max_deg));
    }
    form
}
