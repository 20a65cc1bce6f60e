//! One function per subcommand, each producing a [`RunReport`].
//!
//! Library errors split three ways: malformed input (exit 3), parameters out
//! of domain (exit 4), and failures of the mathematical property under test,
//! which become a failed report carrying the error's details (exit 2).

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};
use snowflake_embed::embedding::RESIDUAL_LIMIT;
use snowflake_embed::group::DEFAULT_GROUP_TOL;
use snowflake_embed::negative_type::{DEFAULT_TOL, NegativeTypeReport};
use snowflake_embed::quotient::SCALE_NOTE;
use snowflake_embed::schoenberg::validate_schoenberg_constant;
use snowflake_embed::{
    check_negative_type, check_strict_negative_type, close_group, embed as embed_metric,
    euclidean_metric, lift_orbits, qng_embed, quadratic_form, snowflake, snowflake_embed,
    squared_distance_matrix, validate_metric, verify_power_identity, Error, FiniteMetricSpace,
    OrthogonalAction, PointCloud, QuadratureSpec, SnowflakeExponent,
};

use crate::input::{self, GroupSource, MetricSource};
use crate::report::{self, InputDigest, Outcome, RunReport};
use crate::{CliError, EmbedArgs, NegtypeArgs, QuotientArgs, SchoenbergArgs, ValidateArgs};

/// Result of a command body: did the property hold, the evidence, and the
/// human summary.
struct Verdict {
    passed: bool,
    payload: Value,
    summary: Vec<String>,
}

enum Disposition {
    Input,
    Usage,
    Property,
}

fn disposition(e: &Error) -> Disposition {
    match e {
        Error::NotSquare { .. } | Error::Empty | Error::NonFinite { .. } | Error::DimensionMismatch { .. } => {
            Disposition::Input
        }
        Error::Domain(_) => Disposition::Usage,
        _ => Disposition::Property,
    }
}

/// Machine-readable form of a library error.
fn error_payload(e: &Error) -> Value {
    let details = match e {
        Error::NotSymmetric { i, j, a, b } => json!({ "i": i, "j": j, "d_ij": a, "d_ji": b }),
        Error::NonzeroDiagonal { i, value } => json!({ "i": i, "value": value }),
        Error::NonpositiveOffDiagonal { i, j, value } => json!({ "i": i, "j": j, "value": value }),
        Error::TriangleViolation { i, j, k, direct, detour } => {
            json!({ "i": i, "j": j, "k": k, "direct": direct, "detour": detour })
        }
        Error::DuplicatePoints { i, j } => json!({ "i": i, "j": j }),
        Error::NotEmbeddable { eigenvalue, witness } => json!({ "eigenvalue": eigenvalue, "witness": witness }),
        Error::NotStrict { min_eigenvalue, witness } => {
            json!({ "min_eigenvalue": min_eigenvalue, "witness": witness })
        }
        Error::TheoremViolation { expected, found, spectrum } => {
            json!({ "expected_rank": expected, "rank": found, "spectrum": spectrum })
        }
        Error::ResidualExceeded { residual, limit } => json!({ "residual": residual, "limit": limit }),
        Error::QuadratureNonconvergence { subdivisions, error_estimate } => {
            json!({ "subdivisions": subdivisions, "error_estimate": error_estimate })
        }
        Error::NotOrthogonal { index, defect } => json!({ "matrix": index, "defect": defect }),
        Error::OrderExceeded { max_order } => json!({ "max_order": max_order }),
        Error::NumericalAmbiguity { distance, tol } => json!({ "distance": distance, "tol": tol }),
        Error::NonFreeOrbit { orbit, g, h } => json!({ "orbit": orbit, "g": g, "h": h }),
        Error::OrbitCollision { first, second } => json!({ "first": first, "second": second }),
        Error::InvarianceViolation { defect } => json!({ "defect": defect }),
        Error::VerificationFailure { max_abs_error, limit, report } => {
            json!({ "max_abs_error": max_abs_error, "limit": limit, "report": report })
        }
        Error::BadPartition { positive, negative } => json!({ "positive": positive, "negative": negative }),
        Error::BadWeights { sum } => json!({ "sum": sum }),
        _ => json!({}),
    };
    let kind = format!("{e:?}");
    let kind = kind.split([' ', '(', '{']).next().unwrap_or_default().to_string();
    json!({ "kind": kind, "message": e.to_string(), "details": details })
}

/// Converts a failed body into a failed report, or into a [`CliError`] when
/// the failure is not about the property under test.
fn settle(body: Result<Verdict, Error>) -> Result<Verdict, CliError> {
    match body {
        Ok(v) => Ok(v),
        Err(e) => match disposition(&e) {
            Disposition::Input => Err(CliError::Input(e.to_string())),
            Disposition::Usage => Err(CliError::Usage(e.to_string())),
            Disposition::Property => Ok(Verdict {
                passed: false,
                summary: vec![e.to_string()],
                payload: json!({ "error": error_payload(&e) }),
            }),
        },
    }
}

fn finish(
    command: &'static str,
    inputs: Vec<InputDigest>,
    tolerances: Value,
    body: Result<Verdict, Error>,
) -> Result<RunReport, CliError> {
    let verdict = settle(body)?;
    let tolerances = match tolerances {
        Value::Object(map) => map,
        _ => Map::new(),
    };
    Ok(RunReport {
        command,
        inputs,
        outcome: if verdict.passed { Outcome::Pass } else { Outcome::Fail },
        payload: verdict.payload,
        tolerances,
        summary: verdict.summary,
    })
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn exponent(alpha: f64) -> Result<SnowflakeExponent, CliError> {
    SnowflakeExponent::new(alpha).map_err(|e| CliError::Usage(e.to_string()))
}

/// Builds the metric of a loaded source, validating its axioms.
fn metric_space(source: &MetricSource, tol: f64) -> Result<FiniteMetricSpace, Error> {
    match source {
        MetricSource::Distances(rows) => validate_metric(input::to_matrix(rows), tol),
        MetricSource::Points(rows) => euclidean_metric(&PointCloud::from_rows(rows)?),
    }
}

pub fn validate(args: &ValidateArgs) -> Result<RunReport, CliError> {
    let (source, digest) = input::metric(&args.input.metric, args.input.points)?;
    let body = metric_space(&source, args.tol).map(|x| Verdict {
        passed: true,
        summary: vec![format!(
            "{} points satisfy the metric axioms (largest distance {:.6e})",
            x.len(),
            x.max_distance()
        )],
        payload: json!({ "valid": true, "n": x.len(), "max_distance": x.max_distance() }),
    });
    let body = match body {
        Err(e) if matches!(disposition(&e), Disposition::Property) => Ok(Verdict {
            passed: false,
            summary: vec![format!("not a metric: {e}")],
            payload: json!({ "valid": false, "violation": error_payload(&e) }),
        }),
        other => other,
    };
    finish(
        "validate",
        vec![digest],
        json!({ "triangle_relative_slack": args.tol }),
        body,
    )
}

fn negtype_payload(r: &NegativeTypeReport, tol: f64) -> Value {
    json!({
        "is_negative_type": r.is_negative_type,
        "is_strict": r.is_strict,
        "min_eigenvalue": r.min_eigenvalue,
        "spectral_radius": r.spectral_radius,
        "negative_type_threshold": -tol * r.spectral_radius,
        "strict_threshold": tol * r.spectral_radius,
    })
}

pub fn negtype(args: &NegtypeArgs) -> Result<RunReport, CliError> {
    let (source, digest) = input::metric(&args.input.metric, args.input.points)?;
    let alpha = args.alpha.map(exponent).transpose()?;
    let tol = args.tol;
    let body = metric_space(&source, snowflake_embed::metric::DEFAULT_TRIANGLE_TOL).and_then(|x| {
        let target = alpha.map_or_else(|| x.clone(), |a| snowflake(&x, a));
        let report = check_negative_type(&target, tol);
        let mut payload = negtype_payload(&report, tol);
        payload["n"] = json!(x.len());
        payload["alpha"] = json!(alpha.map(SnowflakeExponent::value));
        payload["strict"] = json!(args.strict);

        let passed = if args.strict {
            let a = alpha.unwrap_or_else(|| exponent(1.0).expect("1 is a valid exponent"));
            match check_strict_negative_type(&x, a, tol) {
                Ok(_) => true,
                Err(e @ (Error::NotEmbeddable { .. } | Error::NotStrict { .. })) => {
                    payload["error"] = error_payload(&e);
                    false
                }
                Err(e) => return Err(e),
            }
        } else {
            report.is_negative_type
        };

        let mut summary = vec![format!(
            "{} of {} points{}: smallest eigenvalue {:.6e} (spectral radius {:.6e}, tol {tol:e})",
            if args.strict { "strict negative type" } else { "negative type" },
            x.len(),
            alpha.map(|a| format!(", exponent {}", a.value())).unwrap_or_default(),
            report.min_eigenvalue,
            report.spectral_radius,
        )];
        if !passed {
            if let Some(w) = report.witness.as_ref() {
                let value = quadratic_form(&squared_distance_matrix(&target), w)?;
                payload["witness"] = json!(w.0);
                payload["witness_form_value"] = json!(value);
                summary.push(format!("witness Λ = {:?} gives ΛDΛᵀ = {value:.6e}", w.0));
            }
        }
        Ok(Verdict {
            passed,
            payload,
            summary,
        })
    });
    finish(
        "negtype",
        vec![digest],
        json!({ "eigenvalue_relative_tol": tol, "triangle_relative_slack": snowflake_embed::metric::DEFAULT_TRIANGLE_TOL }),
        body,
    )
}

pub fn embed(args: &EmbedArgs) -> Result<RunReport, CliError> {
    let (source, digest) = input::metric(&args.input.metric, args.input.points)?;
    let alpha = exponent(args.alpha)?;
    let tol = args.tol;
    let body = metric_space(&source, snowflake_embed::metric::DEFAULT_TRIANGLE_TOL).and_then(|x| {
        let n = x.len();
        let theorem_applies = alpha.is_proper();
        let e = if theorem_applies {
            snowflake_embed(&x, alpha, tol)?
        } else {
            embed_metric(&snowflake(&x, alpha), tol)?
        };
        let expected = n - 1;
        let top = e.largest_eigenvalue();
        let mut payload = json!({
            "n": n,
            "alpha": alpha.value(),
            "rank": e.rank,
            "expected_rank": expected,
            "theorem_applies": theorem_applies,
            "rank_deficient": e.rank < expected,
            "eigenvalues": e.eigenvalues,
            "eigenvalue_cutoff": tol * top,
            "smallest_kept_eigenvalue": e.smallest_kept_eigenvalue(),
            "residual": e.residual,
            "residual_limit": RESIDUAL_LIMIT,
        });
        let mut summary = vec![format!(
            "{n} points, exponent {}: rank {} (n − 1 = {expected}), residual {:.3e} (limit {RESIDUAL_LIMIT:e})",
            alpha.value(),
            e.rank,
            e.residual
        )];
        if !theorem_applies {
            let note = format!(
                "exponent {} lies outside (0, 1), so full rank n − 1 is not guaranteed",
                alpha.value()
            );
            summary.push(note.clone());
            payload["note"] = json!(note);
        }
        Ok((e, payload, summary))
    });
    // coordinates are written only for successful embeddings
    let body = match body {
        Ok((e, payload, summary)) => {
            if let Some(path) = &args.out {
                report::write_json(path, &json!({ "coordinates": rows(&e.coordinates) }))?;
            }
            Ok(Verdict {
                passed: true,
                payload,
                summary,
            })
        }
        Err(e) => Err(e),
    };
    finish(
        "embed",
        vec![digest],
        json!({
            "eigenvalue_relative_tol": tol,
            "residual_limit": RESIDUAL_LIMIT,
            "triangle_relative_slack": snowflake_embed::metric::DEFAULT_TRIANGLE_TOL,
        }),
        body,
    )
}

pub fn schoenberg(args: &SchoenbergArgs) -> Result<RunReport, CliError> {
    let spec = QuadratureSpec::default();
    let a = args.alpha;
    let limit = args.quad_tol;
    let body = (|| {
        let constant = validate_schoenberg_constant(a, &spec)?;
        let mut passed = constant.rel_diff <= limit;
        let mut summary = vec![format!(
            "c({a}) = {:.15} (closed form), {:.15} (quadrature), rel diff {:.3e}",
            constant.closed_form, constant.quadrature, constant.rel_diff
        )];
        let mut grid = Vec::new();
        for &t in &args.t_grid {
            let p = verify_power_identity(t, a, &spec)?;
            passed &= p.rel_err <= limit;
            summary.push(format!(
                "t = {t}: t^(2a) = {:.15}, integral = {:.15}, rel err {:.3e}",
                p.lhs, p.rhs, p.rel_err
            ));
            grid.push(json!({ "t": t, "lhs": p.lhs, "rhs": p.rhs, "rel_err": p.rel_err, "limit": limit }));
        }
        Ok(Verdict {
            passed,
            summary,
            payload: json!({
                "a": a,
                "constant": {
                    "closed_form": constant.closed_form,
                    "quadrature": constant.quadrature,
                    "rel_diff": constant.rel_diff,
                    "limit": limit,
                },
                "grid": grid,
            }),
        })
    })();
    finish(
        "schoenberg",
        Vec::new(),
        json!({
            "quad_tol": limit,
            "quadrature_rel_tol": spec.rel_tol,
            "quadrature_abs_tol": spec.abs_tol,
            "quadrature_max_subdivisions": spec.max_subdivisions,
        }),
        body,
    )
}

fn action(source: &GroupSource) -> Result<OrthogonalAction, Error> {
    match source {
        GroupSource::Generators {
            dim,
            generators,
            tolerance,
        } => {
            let tol = tolerance.unwrap_or(DEFAULT_GROUP_TOL);
            if generators.is_empty() {
                Ok(OrthogonalAction::trivial(*dim))
            } else {
                close_group(generators, tol, snowflake_embed::group::DEFAULT_MAX_ORDER)
            }
        }
        GroupSource::Closed { matrices, tolerance } => {
            let tol = tolerance.unwrap_or(DEFAULT_GROUP_TOL);
            OrthogonalAction::from_matrices(matrices.clone(), tol)
        }
    }
}

pub fn quotient_embed(args: &QuotientArgs) -> Result<RunReport, CliError> {
    let (group, group_digest) = input::group(&args.group)?;
    let (reps, reps_digest) = input::representatives(&args.representatives)?;
    let alpha = exponent(args.alpha)?;
    let tol = args.tol;
    let group_tol = match &group {
        GroupSource::Generators { tolerance, .. } | GroupSource::Closed { tolerance, .. } => {
            tolerance.unwrap_or(DEFAULT_GROUP_TOL)
        }
    };
    let body = (|| {
        let action = action(&group)?;
        let config = lift_orbits(&PointCloud::from_rows(&reps)?, &action, args.separation_tol)?;
        let e = qng_embed(&config, alpha, tol)?;
        let limit = tol * (1.0 + e.max_target());
        let zero_count = e.zero_eigenvalues(DEFAULT_TOL);
        let passed = e.max_abs_error() <= limit && e.equivariance_defect <= tol && zero_count == 1;
        let points = json!({ "points": e.points, "report": e.report, "scale_note": SCALE_NOTE });
        let verdict = Verdict {
            passed,
            summary: vec![
                format!(
                    "group of order {} on E^{}, {} orbits, {} lifted points, exponent {}",
                    action.order(),
                    action.dim(),
                    config.orbit_count(),
                    config.lifted_count(),
                    alpha.value()
                ),
                format!("max abs distance error {:.3e} (limit {limit:.3e})", e.max_abs_error()),
                format!("equivariance defect {:.3e} (limit {tol:e})", e.equivariance_defect),
                format!("zero eigenvalues of B: {zero_count} (expected 1)"),
            ],
            payload: json!({
                "group_order": action.order(),
                "dim": action.dim(),
                "alpha": alpha.value(),
                "orbits": config.orbit_count(),
                "lifted_points": config.lifted_count(),
                "max_abs_error": e.max_abs_error(),
                "max_abs_error_limit": limit,
                "equivariance_defect": e.equivariance_defect,
                "equivariance_defect_limit": tol,
                "spectrum": e.spectrum,
                "zero_eigenvalues": zero_count,
                "zero_eigenvalue_relative_tol": DEFAULT_TOL,
                "report": e.report,
                "scale_note": SCALE_NOTE,
            }),
        };
        Ok((verdict, points))
    })();
    // points are written only for successful embeddings
    let body = match body {
        Ok((verdict, points)) => {
            if let Some(path) = &args.out {
                report::write_json(path, &points)?;
            }
            Ok(verdict)
        }
        Err(e) => Err(e),
    };
    finish(
        "quotient-embed",
        vec![group_digest, reps_digest],
        json!({
            "verification_tol": tol,
            "separation_tol": args.separation_tol,
            "group_tol": group_tol,
            "zero_eigenvalue_relative_tol": DEFAULT_TOL,
        }),
        body,
    )
}
