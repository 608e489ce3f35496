//! Floating-point truncated-basis realization of the one-dimensional complex:
//! coercivity verification for the multiplication operator and least-squares
//! computation of canonical solutions of Du = α.
//!
//! Matrices act on the orthonormal basis e_k = z^k/√(k!) (inner products in
//! units of π, matching the exact side): multiplication by z is the weighted
//! shift e_k ↦ √(k+1)·e_{k+1}, differentiation the adjoint shift
//! e_k ↦ √k·e_{k−1}. Degree bookkeeping is explicit — multiplication by a
//! degree-m polynomial maps degrees ≤ N into degrees ≤ N+m without any
//! silent truncation, which is what keeps the coercivity bound valid at every
//! finite cutoff.

use crate::error::{CoreError, Result};
use crate::fock::FockPoly;
use crate::scalar::GaussianRational;
use nalgebra::{Complex, DMatrix, DVector};
use serde_json::{json, Value};

pub type C64 = Complex<f64>;

/// Singular values below this relative threshold count as kernel directions.
pub const RANK_TOL: f64 = 1e-12;
/// Assertion tolerance for spectral bounds.
pub const BOUND_TOL: f64 = 1e-9;

/// A dense matrix of an operator between truncated degree ranges.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    /// Source space: polynomials of degree ≤ this.
    pub source_max_degree: usize,
    /// Target space: polynomials of degree ≤ this.
    pub target_max_degree: usize,
    /// (target_max_degree+1) × (source_max_degree+1) matrix in the
    /// orthonormal basis.
    pub matrix: DMatrix<C64>,
}

/// Drops trailing (near-)zero coefficients; returns (coeffs, m).
fn trim(coeffs: &[C64]) -> Result<(Vec<C64>, usize)> {
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1].norm() == 0.0 {
        end -= 1;
    }
    if end == 0 {
        return Err(CoreError::ZeroLeadingCoefficient);
    }
    Ok((coeffs[..end].to_vec(), end - 1))
}

pub fn complex_coeffs(coeffs: &[GaussianRational]) -> Vec<C64> {
    coeffs
        .iter()
        .map(|c| {
            let (re, im) = c.to_f64_pair();
            Complex::new(re, im)
        })
        .collect()
}

/// √((j+k)!/j!) without forming factorials.
fn raise_weight(j: usize, k: usize) -> f64 {
    (1..=k).map(|t| (j + t) as f64).product::<f64>().sqrt()
}

/// Multiplication by p*(z) = Σ conj(a_k)·z^k from degrees ≤ N to ≤ N+m:
/// the z^k part sends e_j to √((j+k)!/j!)·e_{j+k}.
pub fn assemble_dstar_1d(coeffs: &[C64], cutoff: usize) -> Result<TruncatedOperator> {
    let (coeffs, m) = trim(coeffs)?;
    let rows = cutoff + m + 1;
    let cols = cutoff + 1;
    let mut matrix = DMatrix::<C64>::zeros(rows, cols);
    for (k, a) in coeffs.iter().enumerate() {
        if a.norm() == 0.0 {
            continue;
        }
        for j in 0..cols {
            matrix[(j + k, j)] += a.conj() * Complex::new(raise_weight(j, k), 0.0);
        }
    }
    Ok(TruncatedOperator {
        source_max_degree: cutoff,
        target_max_degree: cutoff + m,
        matrix,
    })
}

/// p(∂) = Σ a_k·∂^k on degrees ≤ N (derivatives never raise the degree):
/// the ∂^k part sends e_j to √(j!/(j−k)!)·e_{j−k}.
pub fn assemble_d_1d(coeffs: &[C64], cutoff: usize) -> Result<TruncatedOperator> {
    let (coeffs, _m) = trim(coeffs)?;
    let n = cutoff + 1;
    let mut matrix = DMatrix::<C64>::zeros(n, n);
    for (k, a) in coeffs.iter().enumerate() {
        if a.norm() == 0.0 {
            continue;
        }
        for j in k..n {
            matrix[(j - k, j)] += a * Complex::new(raise_weight(j - k, k), 0.0);
        }
    }
    Ok(TruncatedOperator {
        source_max_degree: cutoff,
        target_max_degree: cutoff,
        matrix,
    })
}

#[derive(Clone, Debug)]
pub struct CoercivityReport {
    pub cutoff: usize,
    /// Smallest eigenvalue of (D*)ᴴ(D*) on the degree-≤cutoff subspace.
    pub lambda_min: f64,
    /// m!·|a_m|².
    pub bound: f64,
    /// lambda_min ≥ bound − 1e−9. Holds at every cutoff because truncated
    /// vectors are themselves polynomials.
    pub satisfied: bool,
}

impl CoercivityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "cutoff": self.cutoff,
            "lambda_min": self.lambda_min,
            "bound": self.bound,
            "satisfied": self.satisfied,
        })
    }
}

/// Verifies ‖p*u‖² ≥ m!·|a_m|²·‖u‖² on the truncated space by computing the
/// smallest eigenvalue of the exact Gram matrix of the multiplication
/// operator (its range is never truncated).
pub fn coercivity_bound_1d(coeffs: &[C64], cutoff: usize) -> Result<CoercivityReport> {
    let (coeffs, m) = trim(coeffs)?;
    let dstar = assemble_dstar_1d(&coeffs, cutoff)?;
    let gram = dstar.matrix.adjoint() * &dstar.matrix;
    let eigen = gram.symmetric_eigen();
    let lambda_min = eigen.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let am = coeffs[m];
    let bound = (1..=m).map(|t| t as f64).product::<f64>() * am.norm_sqr();
    Ok(CoercivityReport {
        cutoff,
        lambda_min,
        bound,
        satisfied: lambda_min >= bound - BOUND_TOL,
    })
}

/// The truncated canonical solution of Du = α and its quality measures.
#[derive(Clone, Debug)]
pub struct CanonicalSolution {
    pub cutoff: usize,
    /// Monomial coefficients of the datum α.
    pub alpha_monomial: Vec<C64>,
    /// Monomial coefficients of u₀ = D*v where (DD*)v = α in least squares.
    pub u0_monomial: Vec<C64>,
    /// ‖Du₀ − α‖ on the truncated space.
    pub residual_norm: f64,
    /// Norm of the projection of u₀ onto the computed kernel of D.
    pub orthogonality_defect: f64,
    /// ‖u₀(cutoff) − u₀(cutoff/2)‖, a truncation-stability indicator.
    pub convergence_estimate: f64,
    pub u0_norm: f64,
    pub alpha_norm: f64,
    /// C = 1/(m!·|a_m|²); the solution satisfies ‖u₀‖² ≤ C·‖α‖².
    pub bound_constant: f64,
    pub norm_bound_satisfied: bool,
}

impl CanonicalSolution {
    pub fn to_json(&self) -> Value {
        let vec_json = |v: &[C64]| {
            Value::Array(
                v.iter()
                    .map(|c| json!({"re": c.re, "im": c.im}))
                    .collect(),
            )
        };
        json!({
            "basis": "monomial",
            "cutoff": self.cutoff,
            "alpha": vec_json(&self.alpha_monomial),
            "u0": vec_json(&self.u0_monomial),
            "residual_norm": self.residual_norm,
            "orthogonality_defect": self.orthogonality_defect,
            "convergence_estimate": self.convergence_estimate,
            "u0_norm": self.u0_norm,
            "alpha_norm": self.alpha_norm,
            "bound_constant": self.bound_constant,
            "norm_bound_satisfied": self.norm_bound_satisfied,
        })
    }
}

/// Monomial coefficient vector (length max_degree+1) of a 1-D polynomial.
fn poly_to_monomial(alpha: &FockPoly, max_degree: usize) -> Vec<C64> {
    assert_eq!(alpha.dim(), 1, "spectral solver is one-dimensional");
    let mut out = vec![Complex::new(0.0, 0.0); max_degree + 1];
    for (idx, c) in alpha.terms() {
        let (re, im) = c.to_f64_pair();
        out[idx.entry(0) as usize] = Complex::new(re, im);
    }
    out
}

fn mono_to_ortho(mono: &[C64]) -> DVector<C64> {
    DVector::from_iterator(
        mono.len(),
        mono.iter()
            .enumerate()
            .map(|(k, c)| c * Complex::new(raise_weight(0, k), 0.0)),
    )
}

fn ortho_to_mono(ortho: &DVector<C64>) -> Vec<C64> {
    ortho
        .iter()
        .enumerate()
        .map(|(k, c)| c / Complex::new(raise_weight(0, k), 0.0))
        .collect()
}

struct SolveOnce {
    u0_ortho: DVector<C64>,
    residual: f64,
    defect: f64,
}

fn solve_once(coeffs: &[C64], alpha: &FockPoly, cutoff: usize) -> Result<SolveOnce> {
    let (coeffs, m) = trim(coeffs)?;
    let dstar = assemble_dstar_1d(&coeffs, cutoff)?;
    let d_full = assemble_d_1d(&coeffs, cutoff + m)?;
    // B = D∘D* maps the trial space (deg ≤ N) into deg ≤ N+m with no
    // truncation error on polynomials.
    let b = &d_full.matrix * &dstar.matrix;
    let rhs = mono_to_ortho(&poly_to_monomial(alpha, cutoff + m));

    let svd = b.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = if sigma_max > 0.0 { RANK_TOL * sigma_max } else { RANK_TOL };
    let v = svd
        .solve(&rhs, eps)
        .map_err(|e| CoreError::InvalidForm(format!("least-squares solve failed: {e}")))?;
    let v = v.column(0).into_owned();
    let u0 = &dstar.matrix * &v;
    let residual = (&b * &v - &rhs).norm();

    // kernel of D on the space where u₀ lives
    let svd_d = d_full.matrix.clone().svd(true, true);
    let v_t = svd_d.v_t.as_ref().expect("svd computed with vectors");
    let smax_d = svd_d.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol_d = if smax_d > 0.0 { RANK_TOL * smax_d } else { RANK_TOL };
    let mut defect_sq = 0.0;
    let ns = svd_d.singular_values.len();
    for i in 0..ns {
        if svd_d.singular_values[i] <= tol_d {
            let kvec = v_t.row(i).adjoint();
            let proj: C64 = kvec.dotc(&u0);
            defect_sq += proj.norm_sqr();
        }
    }
    // rows of v_t only cover min(rows, cols) directions; the remaining null
    // directions (if the matrix were rectangular) do not occur here since
    // d_full is square.
    Ok(SolveOnce {
        u0_ortho: u0,
        residual,
        defect: defect_sq.sqrt(),
    })
}

/// Solves (DD*)v = α in the least-squares sense on the truncated space and
/// returns u₀ = D*v together with its residual, kernel-orthogonality defect,
/// a half-cutoff convergence estimate, and the norm bound check
/// ‖u₀‖² ≤ ‖α‖²/(m!·|a_m|²).
pub fn solve_canonical_1d(
    coeffs: &[C64],
    alpha: &FockPoly,
    cutoff: usize,
) -> Result<CanonicalSolution> {
    let (coeffs, m) = trim(coeffs)?;
    let alpha_degree = alpha.degree().unwrap_or(0) as usize;
    if alpha_degree + m > cutoff {
        return Err(CoreError::CutoffTooSmall {
            cutoff,
            required: alpha_degree + m,
        });
    }
    let full = solve_once(&coeffs, alpha, cutoff)?;

    let half_cutoff = (cutoff / 2).max(alpha_degree + m);
    let half = solve_once(&coeffs, alpha, half_cutoff)?;
    let mut diff_sq = 0.0;
    for k in 0..full.u0_ortho.len() {
        let a = full.u0_ortho[k];
        let b = if k < half.u0_ortho.len() {
            half.u0_ortho[k]
        } else {
            Complex::new(0.0, 0.0)
        };
        diff_sq += (a - b).norm_sqr();
    }

    let am = coeffs[m];
    let bound_constant = 1.0 / ((1..=m).map(|t| t as f64).product::<f64>() * am.norm_sqr());
    let alpha_vec = mono_to_ortho(&poly_to_monomial(alpha, cutoff + m));
    let u0_norm = full.u0_ortho.norm();
    let alpha_norm = alpha_vec.norm();
    let norm_bound_satisfied =
        u0_norm * u0_norm <= bound_constant * alpha_norm * alpha_norm + BOUND_TOL;

    Ok(CanonicalSolution {
        cutoff,
        alpha_monomial: poly_to_monomial(alpha, cutoff + m),
        u0_monomial: ortho_to_mono(&full.u0_ortho),
        residual_norm: full.residual,
        orthogonality_defect: full.defect,
        convergence_estimate: diff_sq.sqrt(),
        u0_norm,
        alpha_norm,
        bound_constant,
        norm_bound_satisfied,
    })
}
