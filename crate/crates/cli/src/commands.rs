//! Command implementations. Every command validates its full input into a
//! job description first, then computes, then renders either a human table or
//! JSON; identical inputs (including the seed) give byte-identical JSON.

use crate::random::*;
use anyhow::{anyhow, bail, Context, Result};
use dcomplex_core::estimates::{
    check_conditions_dim2, commutator_identity_1d, decompose_quadratic_form,
    energy_identity_check, quadratic_form, scan_counterexample_with, unit_coefficients,
    ConditionVerdict, CounterexampleHit,
};
use dcomplex_core::fock::FockPoly;
use dcomplex_core::forms::{d_apply, duality_check, OperatorFamily, PForm};
use dcomplex_core::scalar::GaussianRational;
use dcomplex_core::spectral::{complex_coeffs, solve_canonical_1d};
use dcomplex_core::weyl::{hamil_expansion, infer_dimension, SymbolPoly, WeylOp};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::Path;

/// What a command produced: a JSON document, a human rendering of the same
/// content, and the process exit code.
pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub code: u8,
}

fn ok(json: Value, text: String) -> Outcome {
    Outcome { json, text, code: 0 }
}

pub fn cmd_eval(expr: &str, operand: &str, dim: Option<usize>) -> Result<Outcome> {
    let inferred = infer_dimension(expr)?.max(infer_dimension(operand)?);
    let dim = dim.unwrap_or(inferred).max(1);
    let op = WeylOp::parse(expr, dim)?;
    let poly = FockPoly::parse(operand, dim)?;
    let result = op.apply(&poly);
    let text = format!("{result}");
    let json = json!({
        "command": "eval",
        "dim": dim,
        "expr": expr,
        "operand": operand,
        "result": result.to_string(),
        "result_terms": result.to_json(),
    });
    Ok(ok(json, text))
}

fn parse_family(text: &str) -> Result<OperatorFamily> {
    OperatorFamily::parse(text).with_context(|| format!("invalid operator family '{text}'"))
}

/// A (1,0)-form from semicolon-separated component polynomials.
fn parse_one_form(text: &str, dim: usize) -> Result<PForm> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != dim {
        bail!(
            "form has {} components but the family dimension is {dim}",
            parts.len()
        );
    }
    let components = parts
        .iter()
        .map(|part| FockPoly::parse(part.trim(), dim))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(PForm::one_form(components))
}

fn load_form_file(path: &Path) -> Result<PForm> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read form file {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).context("form file is not valid JSON")?;
    Ok(PForm::from_json(&value)?)
}

pub struct CheckArgs<'a> {
    pub identity: &'a str,
    pub trials: usize,
    pub seed: u64,
    pub family: Option<&'a str>,
    pub form: Option<&'a str>,
    pub form_file: Option<&'a Path>,
}

struct TrialFailure {
    trial: usize,
    detail: String,
    lhs: String,
    rhs: String,
}

pub fn cmd_check(args: CheckArgs<'_>) -> Result<Outcome> {
    let family = args.family.map(parse_family).transpose()?;
    let form = match (args.form, args.form_file) {
        (Some(_), Some(_)) => bail!("give either --form or --form-file, not both"),
        (Some(text), None) => {
            let fam = family
                .as_ref()
                .ok_or_else(|| anyhow!("--form requires --family to fix the dimension"))?;
            Some(parse_one_form(text, fam.dim())?)
        }
        (None, Some(path)) => Some(load_form_file(path)?),
        (None, None) => None,
    };
    if let (Some(fam), Some(f)) = (&family, &form) {
        if fam.dim() != f.dim() {
            bail!(
                "family dimension {} does not match form dimension {}",
                fam.dim(),
                f.dim()
            );
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    // a fixed input is a single trial
    let trials = if form.is_some() { 1 } else { args.trials };
    let mut failure: Option<TrialFailure> = None;
    let mut passed = 0usize;
    let mut extra_text = String::new();

    for trial in 0..trials {
        let result: Option<TrialFailure> = match args.identity {
            "hamil" => {
                let dim = rng.gen_range(1..=3);
                let q = rand_symbol(&mut rng, dim, 3);
                let p = rand_symbol(&mut rng, dim, 3);
                let lhs = hamil_expansion(&q, &p);
                let rhs = q.diff_op().multiply(&p.multiplier_op());
                (lhs != rhs).then(|| TrialFailure {
                    trial,
                    detail: format!("Q = {q}, P = {p}"),
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                })
            }
            "comm11" => {
                let m = rng.gen_range(0..=4);
                let coeffs: Vec<GaussianRational> =
                    (0..=m).map(|_| rand_gaussian(&mut rng)).collect();
                let u = rand_poly(&mut rng, 1, 6);
                let report = commutator_identity_1d(&coeffs, &u);
                (!report.equal).then(|| TrialFailure {
                    trial,
                    detail: format!("m = {m}, u = {u}"),
                    lhs: report.lhs.to_string(),
                    rhs: report.rhs.to_string(),
                })
            }
            "energy" => {
                let (fam, u) = match (&family, &form) {
                    (Some(fam), Some(f)) => (fam.clone(), f.clone()),
                    (Some(fam), None) => {
                        let u = rand_one_form(&mut rng, fam.dim(), 4);
                        (fam.clone(), u)
                    }
                    (None, _) => {
                        let dim = rng.gen_range(1..=3);
                        (rand_family(&mut rng, dim, 2), rand_one_form(&mut rng, dim, 4))
                    }
                };
                if u.degree() != 1 {
                    bail!("the energy identity takes a (1,0)-form");
                }
                let report = energy_identity_check(&fam, &u);
                if form.is_some() {
                    let n = fam.dim();
                    writeln!(
                        extra_text,
                        "||Du||^2 = {}, ||D*u||^2 = {}, sum of ||p_k(u_j)||^2 = {}, Q = {} (units pi^{n})",
                        report.du_norm_sq, report.dstar_norm_sq,
                        report.derivative_norm_sq, report.quadratic_form
                    )?;
                }
                (!report.equal).then(|| TrialFailure {
                    trial,
                    detail: "energy identity".to_string(),
                    lhs: format!(
                        "||Du||^2 + ||D*u||^2 = {}",
                        report.du_norm_sq.clone() + report.dstar_norm_sq.clone()
                    ),
                    rhs: format!(
                        "sum ||p_k(u_j)||^2 + Q = {}",
                        report.derivative_norm_sq.clone() + report.quadratic_form.clone()
                    ),
                })
            }
            "duality" => {
                let (fam, dim) = match &family {
                    Some(fam) => (fam.clone(), fam.dim()),
                    None => {
                        let dim = rng.gen_range(1..=3);
                        (rand_family(&mut rng, dim, 2), dim)
                    }
                };
                let p = rng.gen_range(0..dim);
                let u = rand_pform(&mut rng, dim, p, 3);
                let v = rand_pform(&mut rng, dim, p + 1, 3);
                let report = duality_check(&fam, &u, &v)?;
                (!report.equal).then(|| TrialFailure {
                    trial,
                    detail: format!("degree {p} against {}", p + 1),
                    lhs: format!("(Du, v) = {}", report.lhs),
                    rhs: format!("(u, D*v) = {}", report.rhs),
                })
            }
            "d_squared" => {
                let (fam, dim) = match &family {
                    Some(fam) => (fam.clone(), fam.dim()),
                    None => {
                        let dim = rng.gen_range(2..=3);
                        (rand_family(&mut rng, dim, 2), dim)
                    }
                };
                if dim < 2 {
                    bail!("d_squared needs dimension at least 2");
                }
                let p = rng.gen_range(0..=dim - 2);
                let u = rand_pform(&mut rng, dim, p, 3);
                let ddu = d_apply(&fam, &d_apply(&fam, &u)?)?;
                (!ddu.is_zero()).then(|| TrialFailure {
                    trial,
                    detail: format!("degree {p} form"),
                    lhs: format!("D^2 u = {ddu}"),
                    rhs: "0".to_string(),
                })
            }
            other => bail!(
                "unknown identity '{other}' (expected hamil, comm11, energy, duality, d_squared)"
            ),
        };
        match result {
            None => passed += 1,
            Some(f) => {
                failure = Some(f);
                break;
            }
        }
    }

    let all_passed = failure.is_none();
    let mut text = String::new();
    if !extra_text.is_empty() {
        text.push_str(&extra_text);
    }
    match &failure {
        None => writeln!(
            text,
            "check {}: {passed}/{trials} trials passed (seed {})",
            args.identity, args.seed
        )?,
        Some(f) => writeln!(
            text,
            "check {}: FAILED at trial {} ({})\n  lhs: {}\n  rhs: {}",
            args.identity, f.trial, f.detail, f.lhs, f.rhs
        )?,
    }
    let json = json!({
        "command": "check",
        "identity": args.identity,
        "seed": args.seed,
        "trials": trials,
        "passed": passed,
        "all_passed": all_passed,
        "first_failure": failure.as_ref().map(|f| json!({
            "trial": f.trial,
            "detail": f.detail,
            "lhs": f.lhs,
            "rhs": f.rhs,
        })),
    });
    Ok(Outcome {
        json,
        text,
        code: u8::from(!all_passed),
    })
}

fn verdict_json(v: &ConditionVerdict) -> Value {
    json!({
        "passed": v.passed(),
        "theorem": v.theorem.map(|t| t.to_string()),
        "sign": v.sign.map(|s| s.to_string()),
        "first_order_ok": v.first_order_ok,
        "second_order_ok": v.second_order_ok,
        "C1": v.c1.to_string(),
        "C2": v.c2.to_string(),
        "estimate_constant": v.estimate_constant.as_ref().map(|c| c.to_string()),
        "failures": v.failures.iter().map(|f| json!({
            "condition": f.condition,
            "lhs": f.lhs,
            "rhs": f.rhs,
        })).collect::<Vec<_>>(),
    })
}

fn verdict_text(v: &ConditionVerdict) -> String {
    let mut text = String::new();
    match (v.passed(), v.theorem) {
        (true, Some(tag)) => {
            let sign = v
                .sign
                .map(|s| format!(", sign {s}"))
                .unwrap_or_else(|| ", sign indifferent".to_string());
            let _ = writeln!(text, "conditions satisfied ({tag}{sign})");
        }
        _ => {
            let _ = writeln!(text, "conditions NOT satisfied");
        }
    }
    let _ = writeln!(
        text,
        "first-order identities: {}",
        if v.first_order_ok { "ok" } else { "violated" }
    );
    let _ = writeln!(
        text,
        "second-order products:  {}",
        if v.second_order_ok { "ok" } else { "violated or degenerate" }
    );
    let _ = writeln!(text, "C1 = {}, C2 = {}", v.c1, v.c2);
    match &v.estimate_constant {
        Some(c) => {
            let _ = writeln!(text, "estimate constant 1/min(C1,C2) = {c}");
        }
        None => {
            let _ = writeln!(text, "estimate constant: not applicable");
        }
    }
    for f in &v.failures {
        let _ = writeln!(text, "  violated: {}\n    lhs = {}\n    rhs = {}", f.condition, f.lhs, f.rhs);
    }
    text
}

fn two_symbols(family: &OperatorFamily) -> Result<(SymbolPoly, SymbolPoly)> {
    if family.dim() != 2 {
        bail!("this command needs a family of exactly two operators");
    }
    Ok((family.symbol(0).clone(), family.symbol(1).clone()))
}

pub fn cmd_conditions(family_text: &str) -> Result<Outcome> {
    let family = parse_family(family_text)?;
    let (p1, p2) = two_symbols(&family)?;
    let verdict = check_conditions_dim2(&p1, &p2)?;
    let text = verdict_text(&verdict);
    let json = json!({
        "command": "conditions",
        "family": [p1.to_string(), p2.to_string()],
        "verdict": verdict_json(&verdict),
    });
    Ok(Outcome {
        code: u8::from(!verdict.passed()),
        json,
        text,
    })
}

/// The widened coefficient grid: a + b·i with a, b ∈ {0, ±1/2, ±1, ±2},
/// nonzero overall.
fn wide_grid() -> Vec<GaussianRational> {
    let steps: [(i64, i64); 7] = [(0, 1), (1, 2), (-1, 2), (1, 1), (-1, 1), (2, 1), (-2, 1)];
    let mut out = Vec::new();
    for (an, ad) in steps {
        for (bn, bd) in steps {
            let c = GaussianRational::from_ratios(an, ad, bn, bd);
            if !c.is_zero() {
                out.push(c);
            }
        }
    }
    out
}

fn hits_json(hits: &[CounterexampleHit]) -> Vec<Value> {
    hits.iter()
        .map(|hit| {
            json!({
                "value": hit.value.to_string(),
                "form": hit.form.to_json(),
                "form_text": hit.form.to_string(),
            })
        })
        .collect()
}

pub fn cmd_scan(family_text: &str, max_degree: u32, wide: bool) -> Result<Outcome> {
    let family = parse_family(family_text)?;
    let (p1, p2) = two_symbols(&family)?;
    let grid = if wide { wide_grid() } else { unit_coefficients() };
    let hits = scan_counterexample_with(&p1, &p2, max_degree, &grid)?;
    let mut text = String::new();
    if hits.is_empty() {
        writeln!(
            text,
            "no negative values found up to degree {max_degree} (units pi^2)"
        )?;
    } else {
        writeln!(text, "{} negative forms found (units pi^2):", hits.len())?;
        for hit in &hits {
            writeln!(text, "  Q = {:>12}  at u = {}", hit.value.to_string(), hit.form)?;
        }
    }
    let json = json!({
        "command": "scan",
        "family": [p1.to_string(), p2.to_string()],
        "max_degree": max_degree,
        "coefficient_grid": if wide { "wide" } else { "units" },
        "unit": "pi^2",
        "count": hits.len(),
        "hits": hits_json(&hits),
    });
    Ok(ok(json, text))
}

pub fn cmd_solve(coeffs_text: &str, alpha_text: &str, cutoff: usize) -> Result<Outcome> {
    let coeffs: Vec<GaussianRational> = coeffs_text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<GaussianRational>()
                .map_err(|e| anyhow!("bad coefficient '{part}': {e}"))
        })
        .collect::<Result<_>>()?;
    if coeffs.is_empty() {
        bail!("--coeffs must list a0,a1,...");
    }
    let alpha = FockPoly::parse(alpha_text, 1)?;
    let solution = solve_canonical_1d(&complex_coeffs(&coeffs), &alpha, cutoff)?;

    let mut text = String::new();
    writeln!(text, "canonical solution of Du = alpha at cutoff {cutoff}")?;
    let mut terms = Vec::new();
    for (k, c) in solution.u0_monomial.iter().enumerate() {
        if c.norm() > 1e-12 {
            let coeff = if c.im.abs() > 1e-12 {
                format!("({:.16e} + {:.16e}i)", c.re, c.im)
            } else {
                format!("{:.16e}", c.re)
            };
            terms.push(match k {
                0 => coeff,
                1 => format!("{coeff}*z1"),
                _ => format!("{coeff}*z1^{k}"),
            });
        }
    }
    writeln!(
        text,
        "u0 = {}",
        if terms.is_empty() { "0".to_string() } else { terms.join(" + ") }
    )?;
    writeln!(text, "residual norm ||Du0 - alpha|| = {:.16e}", solution.residual_norm)?;
    writeln!(text, "orthogonality defect        = {:.16e}", solution.orthogonality_defect)?;
    writeln!(text, "convergence (N vs N/2)      = {:.16e}", solution.convergence_estimate)?;
    writeln!(
        text,
        "||u0||^2 <= C*||alpha||^2 with C = {:.16e}: {}",
        solution.bound_constant,
        if solution.norm_bound_satisfied { "satisfied" } else { "VIOLATED" }
    )?;
    let json = json!({
        "command": "solve",
        "coeffs": coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "alpha": alpha_text,
        "solution": solution.to_json(),
    });
    Ok(ok(json, text))
}

struct ExampleFamily {
    name: &'static str,
    family: &'static str,
    sample_form: &'static str,
}

const EXAMPLE_FAMILIES: [ExampleFamily; 4] = [
    ExampleFamily {
        name: "a",
        family: "d1*d2; d1^2 + d2^2",
        sample_form: "z1; z2",
    },
    ExampleFamily {
        name: "b",
        family: "i*d1*d2; d1^2 + d2^2",
        sample_form: "1; 0",
    },
    ExampleFamily {
        name: "c",
        family: "d1^2; d2^2",
        sample_form: "z1; 0",
    },
    ExampleFamily {
        name: "d",
        family: "d1^2 + d2; d1 + d2^2",
        sample_form: "z2^8; -z2^7",
    },
];

pub fn cmd_examples(max_degree: u32) -> Result<Outcome> {
    let mut text = String::new();
    let mut families_json = Vec::new();
    let mut all_identities_ok = true;

    for entry in &EXAMPLE_FAMILIES {
        let family = parse_family(entry.family)?;
        let (p1, p2) = two_symbols(&family)?;
        let verdict = check_conditions_dim2(&p1, &p2)?;
        let u = parse_one_form(entry.sample_form, 2)?;
        let qf = quadratic_form(&family, &u);
        let energy = energy_identity_check(&family, &u);
        all_identities_ok &= energy.equal;
        let hits = scan_counterexample_with(&p1, &p2, max_degree, &unit_coefficients())?;

        writeln!(text, "family ({}): p1 = {p1}, p2 = {p2}", entry.name)?;
        match (verdict.passed(), verdict.theorem) {
            (true, Some(tag)) => writeln!(
                text,
                "  conditions: satisfied ({tag}), C1 = {}, C2 = {}, constant {}",
                verdict.c1,
                verdict.c2,
                verdict
                    .estimate_constant
                    .as_ref()
                    .map(|c| c.to_string())
                    .unwrap_or_default()
            )?,
            _ => writeln!(
                text,
                "  conditions: NOT satisfied ({} violations)",
                verdict.failures.len()
            )?,
        }
        writeln!(
            text,
            "  Q at sample u = [{}]: {} (units pi^2), energy identity {}",
            entry.sample_form,
            qf.value,
            if energy.equal { "holds" } else { "FAILS" }
        )?;
        writeln!(
            text,
            "  scan to degree {max_degree}: {}",
            if hits.is_empty() {
                "no negative values".to_string()
            } else {
                format!("{} negative forms, most negative {}", hits.len(), hits[0].value)
            }
        )?;

        let decomposition = if verdict.passed() {
            let report = decompose_quadratic_form(&p1, &p2, &u, &verdict)?;
            let pieces = report.decomposition.unwrap_or_default();
            let rendered: Vec<String> = pieces
                .iter()
                .map(|p| format!("{} = {}", p.label, p.value))
                .collect();
            writeln!(text, "  decomposition: {}", rendered.join(", "))?;
            Some(
                pieces
                    .iter()
                    .map(|p| json!({"label": p.label, "value": p.value.to_string()}))
                    .collect::<Vec<_>>(),
            )
        } else {
            None
        };

        families_json.push(json!({
            "name": entry.name,
            "operators": [p1.to_string(), p2.to_string()],
            "conditions": verdict_json(&verdict),
            "sample_form": entry.sample_form,
            "quadratic_form_value": qf.value.to_string(),
            "unit": "pi^2",
            "energy_identity_holds": energy.equal,
            "decomposition": decomposition,
            "scan": {
                "max_degree": max_degree,
                "count": hits.len(),
                "hits": hits_json(&hits),
            },
        }));
    }

    let json = json!({
        "command": "examples",
        "families": families_json,
        "all_identities_ok": all_identities_ok,
    });
    Ok(Outcome {
        json,
        text,
        code: u8::from(!all_identities_ok),
    })
}
