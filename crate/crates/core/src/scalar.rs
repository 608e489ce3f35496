//! Exact arithmetic foundation: Gaussian rationals, multiindices, factorials.
//!
//! Every coefficient in the symbolic part of the crate is a [`GaussianRational`],
//! an element of the field Q(i). All operations are exact; nothing here ever
//! rounds. The floating-point world enters only in the `spectral` module.

use crate::error::{CoreError, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// k! as an exact integer.
pub fn factorial(k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    acc
}

/// Binomial coefficient C(n, k), zero when k > n.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Falling factorial n·(n−1)···(n−k+1) = n!/(n−k)!, zero when k > n.
pub fn falling_factorial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(n - i);
    }
    acc
}

/// A complex number with rational real and imaginary parts.
///
/// The coefficient field for all exact work in this crate. Closed under the
/// four field operations and conjugation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// re + im·i from integer parts.
    pub fn from_parts(re: i64, im: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    /// (a/b) + (c/d)·i. Panics if a denominator is zero.
    pub fn from_ratios(a: i64, b: i64, c: i64, d: i64) -> Self {
        GaussianRational {
            re: BigRational::new(BigInt::from(a), BigInt::from(b)),
            im: BigRational::new(BigInt::from(c), BigInt::from(d)),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        GaussianRational {
            re: r,
            im: BigRational::zero(),
        }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// |x|² = x·conj(x), always a nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero GaussianRational");
        let n = self.norm_sqr();
        GaussianRational {
            re: &self.re / &n,
            im: -&self.im / &n,
        }
    }

    /// Lossy conversion for the spectral module.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.re.to_f64().expect("rational out of f64 range"),
            self.im.to_f64().expect("rational out of f64 range"),
        )
    }
}

impl From<BigRational> for GaussianRational {
    fn from(r: BigRational) -> Self {
        Self::from_rational(r)
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> Self {
        GaussianRational {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> Self {
        GaussianRational {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl Div for GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv()
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> Self {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Textual form `a/b + c/d*i` with optional parts; `parse ∘ print` is the identity.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let im_str = |im: &BigRational| -> String {
            if im.abs().is_one() && im.denom().is_one() {
                "i".to_string()
            } else {
                format!("{}*i", fmt_rational(&im.abs()))
            }
        };
        if self.im.is_zero() {
            write!(f, "{}", fmt_rational(&self.re))
        } else if self.re.is_zero() {
            let s = im_str(&self.im);
            if self.im.is_negative() {
                write!(f, "-{s}")
            } else {
                write!(f, "{s}")
            }
        } else {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            write!(f, "{} {} {}", fmt_rational(&self.re), sign, im_str(&self.im))
        }
    }
}

impl FromStr for GaussianRational {
    type Err = CoreError;

    /// Parses `a/b + c/d*i` with optional parts, e.g. `1`, `-i`, `3/2*i`, `1 - 2*i`.
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |pos: usize, message: &str| CoreError::Parse {
            pos,
            message: message.to_string(),
        };
        let bytes: Vec<char> = s.chars().collect();
        let mut pos = 0usize;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_whitespace() {
                *pos += 1;
            }
        };
        // one signed part: [sign] (rational ['*' 'i'] | 'i')
        let part = |pos: &mut usize, first: bool| -> Result<Option<GaussianRational>> {
            skip_ws(pos);
            if *pos >= bytes.len() {
                return if first {
                    Err(parse_err(*pos, "empty scalar"))
                } else {
                    Ok(None)
                };
            }
            let mut negative = false;
            if bytes[*pos] == '+' || bytes[*pos] == '-' {
                negative = bytes[*pos] == '-';
                *pos += 1;
                skip_ws(pos);
            } else if !first {
                return Err(parse_err(*pos, "expected '+' or '-' between scalar parts"));
            }
            if *pos < bytes.len() && bytes[*pos] == 'i' {
                *pos += 1;
                let v = GaussianRational::i();
                return Ok(Some(if negative { -v } else { v }));
            }
            let start = *pos;
            while *pos < bytes.len() && (bytes[*pos].is_ascii_digit() || bytes[*pos] == '/') {
                *pos += 1;
            }
            if start == *pos {
                return Err(parse_err(start, "expected a rational number or 'i'"));
            }
            let text: String = bytes[start..*pos].iter().collect();
            let r = BigRational::from_str(&text)
                .map_err(|e| parse_err(start, &format!("invalid rational '{text}': {e}")))?;
            skip_ws(pos);
            let imaginary = if *pos < bytes.len() && bytes[*pos] == '*' {
                *pos += 1;
                skip_ws(pos);
                if *pos < bytes.len() && bytes[*pos] == 'i' {
                    *pos += 1;
                    true
                } else {
                    return Err(parse_err(*pos, "expected 'i' after '*'"));
                }
            } else {
                false
            };
            let r = if negative { -r } else { r };
            Ok(Some(if imaginary {
                GaussianRational::new(BigRational::zero(), r)
            } else {
                GaussianRational::from_rational(r)
            }))
        };

        let mut value = part(&mut pos, true)?.expect("first part present");
        while let Some(next) = part(&mut pos, false)? {
            value = value + next;
        }
        skip_ws(&mut pos);
        if pos != bytes.len() {
            return Err(parse_err(pos, "trailing input after scalar"));
        }
        Ok(value)
    }
}

/// An ordered tuple of nonnegative integer exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// The j-th standard unit multiindex e_j (0-based).
    pub fn unit(dim: usize, j: usize) -> Self {
        assert!(j < dim, "unit index {j} out of range for dimension {dim}");
        let mut v = vec![0; dim];
        v[j] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn entry(&self, j: usize) -> u32 {
        self.0[j]
    }

    /// |α| = Σ entries.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// α! = Π entries!.
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&e| factorial(e)).product()
    }

    /// Componentwise partial order.
    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// α − β, defined only when β ≤ α.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if other.leq(self) {
            Some(MultiIndex(
                self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
            ))
        } else {
            None
        }
    }

    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn with_entry(&self, j: usize, value: u32) -> MultiIndex {
        let mut v = self.0.clone();
        v[j] = value;
        MultiIndex(v)
    }

    /// Π_j falling_factorial(α_j, β_j): the exact coefficient of ∂^β z^α.
    pub fn falling(&self, other: &MultiIndex) -> BigInt {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| falling_factorial(a, b))
            .product()
    }

    /// All multiindices of the given dimension with |α| ≤ max_order, in graded
    /// lexicographic order.
    pub fn all_up_to(dim: usize, max_order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = vec![0u32; dim];
        for total in 0..=max_order {
            fn recurse(dim: usize, pos: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
                if pos == dim {
                    if left == 0 {
                        out.push(MultiIndex(current.clone()));
                    }
                    return;
                }
                if pos + 1 == dim {
                    current[pos] = left;
                    out.push(MultiIndex(current.clone()));
                    return;
                }
                for e in (0..=left).rev() {
                    current[pos] = e;
                    recurse(dim, pos + 1, left - e, current, out);
                }
            }
            if dim == 0 {
                if total == 0 {
                    out.push(MultiIndex(Vec::new()));
                }
            } else {
                recurse(dim, 0, total, &mut current, &mut out);
            }
        }
        out
    }
}

/// Graded lexicographic order: compare |α| first, then lexicographically with
/// earlier variables dominant (z₁² precedes z₁z₂ precedes z₂²).
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub fn arb_rational() -> impl Strategy<Value = BigRational> {
        (-6i64..=6, 1i64..=4)
            .prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn arb_gaussian() -> impl Strategy<Value = GaussianRational> {
        (arb_rational(), arb_rational()).prop_map(|(re, im)| GaussianRational::new(re, im))
    }

    #[test]
    fn factorial_values() {
        // direct multiplication oracle
        let direct = |k: u32| (1..=k).map(BigInt::from).product::<BigInt>();
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(7), direct(7));
        assert_eq!(factorial(7), BigInt::from(5040));
        assert_eq!(factorial(9), direct(9));
        assert_eq!(factorial(9), BigInt::from(362880));
    }

    #[test]
    fn multiindex_factorial_values() {
        assert_eq!(MultiIndex::new(vec![0, 0]).factorial(), BigInt::from(1));
        assert_eq!(MultiIndex::new(vec![1, 1]).factorial(), BigInt::from(1));
        // 3!·2! = 6·2
        assert_eq!(MultiIndex::new(vec![3, 2]).factorial(), BigInt::from(12));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(3, 5), BigInt::from(0));
        assert_eq!(binomial(5, 0), BigInt::from(1));
    }

    #[test]
    fn scalar_display_roundtrip_cases() {
        for s in ["0", "1", "-i", "3/2*i", "1 + i", "1/2 - 3/4*i", "-5"] {
            let v: GaussianRational = s.parse().unwrap();
            assert_eq!(v.to_string(), s, "canonical form of {s}");
            let back: GaussianRational = v.to_string().parse().unwrap();
            assert_eq!(back, v);
        }
        // non-canonical inputs normalize
        let v: GaussianRational = "2/4 + 2/2*i".parse().unwrap();
        assert_eq!(v.to_string(), "1/2 + i");
    }

    #[test]
    fn scalar_parse_errors_carry_position() {
        let err = "1 + $".parse::<GaussianRational>().unwrap_err();
        match err {
            CoreError::Parse { pos, .. } => assert_eq!(pos, 4),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn multiindex_order_is_graded_lex() {
        let a = MultiIndex::new(vec![0, 2]);
        let b = MultiIndex::new(vec![1, 0]);
        assert!(b < a); // |b| = 1 < |a| = 2
        let c = MultiIndex::new(vec![2, 0]);
        assert!(c < a); // same order, earlier variables dominant
    }

    #[test]
    fn all_up_to_enumerates_simplex() {
        let all = MultiIndex::all_up_to(2, 2);
        assert_eq!(all.len(), 6); // (0,0),(1,0),(0,1),(2,0),(1,1),(0,2)
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_gaussian(), b in arb_gaussian(), c in arb_gaussian()) {
            // associativity and commutativity
            prop_assert_eq!((&a + &b) + c.clone(), &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a * &b) * c.clone(), &a * &(&b * &c));
            // distributivity
            prop_assert_eq!(&a * &(&b + &c), (&a * &b) + (&a * &c));
            // inverse
            if !a.is_zero() {
                prop_assert_eq!(a.clone() * a.inv(), GaussianRational::one());
            }
        }

        #[test]
        fn conj_is_ring_involution(a in arb_gaussian(), b in arb_gaussian()) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            let n = a.norm_sqr();
            prop_assert!(n >= BigRational::zero());
        }

        #[test]
        fn factorial_recurrence(k in 0u32..12) {
            prop_assert_eq!(factorial(k + 1), BigInt::from(k + 1) * factorial(k));
        }

        #[test]
        fn scalar_print_parse_roundtrip(a in arb_gaussian()) {
            let s = a.to_string();
            let back: GaussianRational = s.parse().unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
