use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::Value;

use super::document::{Document, LabelledSpinC};
use super::report::{int, int128, int64, ints, object, rat, rat_abs, Report};
use crate::error::{Error, Result};
use crate::exterior::Rational;
use crate::spinc::cz::conley_zehnder;
use crate::spinc::{
    admissibility, divisibility_check, euler_characteristic, formal_dimension,
    formal_dimension_from, grading_modulus, monotonicity_flags, nu_function, w_lambda,
};
use crate::symprod::{restriction_classes, EtaThetaClass};
use crate::tqft::{
    alexander_fibered, alexander_weighted_sum, evaluate_cycle_with_threads, worked_example,
    ElementaryMove,
};

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// Formal dimension, admissibility and point counts for each spin-c structure.
pub fn dim(doc: &Document) -> Result<Report> {
    let d = doc.fibration()?;
    let structures = doc.spinc_structures()?;
    let euler = euler_characteristic(d);
    let mut report = Report::new("dim");
    report
        .set("euler", int64(euler))
        .set("signature", int64(d.signature))
        .set("formula", "d = (c1^2 - 2e - 3sigma)/4");

    let chis: Vec<i64> = d.regions.iter().map(|r| r.fiber_euler()).collect();
    let mut rows = Vec::with_capacity(structures.len());
    for LabelledSpinC {
        label,
        spinc: s,
        beta,
    } in &structures
    {
        let c1_squared = s.c1_squared(&d.h2)?;
        let dimension = formal_dimension(s, d)?;
        let adm = admissibility(s, d)?;
        let mut row = serde_json::Map::new();
        row.insert("label".into(), Value::from(label.as_str()));
        row.insert("c1".into(), ints(s.c1()));
        if let Some(beta) = beta {
            row.insert("beta".into(), ints(beta));
        }
        row.insert("c1_squared".into(), int64(c1_squared));
        row.insert("d".into(), int64(dimension));
        row.insert("admissibility".into(), to_value(&adm.class));
        row.insert("fibers".into(), to_value(&adm.fibers));

        // ν needs one level ⟨c1, fiber⟩ shared by every region
        let levels: Option<Vec<i64>> = d
            .regions
            .iter()
            .map(|r| d.region_class(r).map(|c| s.pairing(&d.h2, &c)))
            .collect::<Option<Result<Vec<_>>>>()
            .transpose()?;
        match levels {
            Some(levels) if levels.windows(2).all(|w| w[0] == w[1]) && !levels.is_empty() => {
                row.insert("level".into(), int64(levels[0]));
                match nu_function(&chis, levels[0]) {
                    Ok(nu) => row.insert("nu".into(), ints(&nu)),
                    Err(e) => row.insert("nu".into(), Value::from(format!("unavailable: {e}"))),
                };
            }
            Some(_) => {
                row.insert(
                    "nu".into(),
                    Value::from("unavailable: fiber pairings differ between regions"),
                );
            }
            None => {
                row.insert("nu".into(), Value::from("unavailable: missing fiber class"));
            }
        }
        rows.push(Value::Object(row));
    }
    report.set("structures", Value::Array(rows));
    Ok(report)
}

/// Supertrace of a closed Morse cycle; single twists are checked against the
/// Alexander polynomial formula.
pub fn tqft_eval(doc: &Document, threads: usize) -> Result<Report> {
    let cycle = doc.morse_cycle()?;
    let ev = evaluate_cycle_with_threads(&cycle, threads)?;
    let mut report = Report::new("tqft-eval");
    report
        .set("genus", int64(cycle.genus() as i64))
        .set("points", int64(cycle.points() as i64))
        .set("dimension", int64(ev.dimension as i64))
        .set("value", rat_abs(&ev.value))
        .set("signed_value", rat(&ev.value))
        .set("sign_ambiguous", true)
        .set(
            "trace",
            Value::Array(
                cycle
                    .moves()
                    .iter()
                    .zip(&ev.states)
                    .map(|(m, (g, n))| {
                        object([
                            ("move", Value::from(m.to_string())),
                            ("genus", int64(*g as i64)),
                            ("points", int64(*n as i64)),
                        ])
                    })
                    .collect(),
            ),
        );
    match ev.separating_move {
        Some(k) => {
            report.set("reason", "separating vanishing");
            report.set("zero_move", int64(k as i64));
            if !ev.value.is_zero() {
                return Err(Error::Inconsistent(format!(
                    "cycle through separating move {k} evaluated to {}",
                    ev.value
                )));
            }
        }
        None => {
            report.set("reason", "supertrace of monodromy");
        }
    }
    if let [ElementaryMove::Twist(m)] = cycle.moves() {
        let a = alexander_fibered(m)?;
        let expected = alexander_weighted_sum(&a, cycle.points(), cycle.genus());
        let agrees = Rational::from_integer(expected.abs()) == ev.value.abs();
        report.set(
            "fibered",
            object([
                ("alexander", Value::from(a.to_string())),
                (
                    "alexander_coefficients",
                    Value::Array(std::iter::once(a.a0()).chain(a.higher()).map(int).collect()),
                ),
                (
                    "offset",
                    int64(cycle.genus() as i64 - 1 - cycle.points() as i64),
                ),
                ("formula", Value::from("sum_i i * a_(g-1-n+i)")),
                ("value", int(&expected.abs())),
                (
                    "agreement",
                    Value::from(if agrees { "pass" } else { "fail" }),
                ),
            ]),
        );
        if !agrees {
            return Err(Error::Inconsistent(format!(
                "supertrace {} disagrees with Alexander value {expected}",
                ev.value
            )));
        }
    }
    Ok(report)
}

/// A worked closed-manifold invariant, by name.
pub fn example(name: &str, m: i64, n: i64) -> Result<Report> {
    let ex = worked_example(name, m, n)?;
    let mut report = Report::new("example");
    report
        .set("name", ex.name.as_str())
        .set("m", int64(m))
        .set("n", int64(n))
        .set("invariant", ex.invariant.as_str())
        .set(
            "exponent",
            ex.exponent
                .map(|e| int(&BigInt::from(e)))
                .unwrap_or(Value::Null),
        )
        .set("value", int(&ex.value.abs()))
        .set("sign_ambiguous", ex.sign_ambiguous);
    if name == "s2xs2" {
        // c1 = (2+2m, 2+2n) on the hyperbolic form, e = 4, sigma = 0
        let c1_squared = 8 * (1 + m as i128) * (1 + n as i128);
        let c1_squared = i64::try_from(c1_squared).map_err(|_| Error::Overflow("c1^2"))?;
        let d = formal_dimension_from(c1_squared, 4, 0)?;
        let mut check = vec![("formal_dimension", int64(d))];
        if let Some(e) = ex.exponent {
            check.push(("matches_exponent", Value::from(d as i128 == 2 * e as i128)));
        }
        report.set("dimension_check", object(check));
    }
    Ok(report)
}

/// Conley–Zehnder index of each sampled path and their sum.
pub fn cz(doc: &Document) -> Result<Report> {
    let paths = doc.cz_paths()?;
    let mut total: i128 = 0;
    let mut rows = Vec::with_capacity(paths.len());
    for p in &paths {
        let r = conley_zehnder(p)?;
        total += r.index as i128;
        rows.push(object([
            ("dimension", int64(p.dim() as i64)),
            ("samples", int64(p.samples().len() as i64)),
            ("index", int64(r.index)),
            ("endpoint_sign", int64(r.endpoint_sign as i64)),
            ("parity_consistent", Value::from(r.parity_consistent)),
        ]));
    }
    let mut report = Report::new("cz");
    report
        .set("paths", Value::Array(rows))
        .set("total", int128(total));
    Ok(report)
}

fn class_value(c: &EtaThetaClass) -> Value {
    object([("eta", rat(&c.eta)), ("theta", rat(&c.theta))])
}

/// Grading modulus, divisibility, monotonicity thresholds and fiber classes.
pub fn gradings(doc: &Document) -> Result<Report> {
    let qy = doc.query()?;
    let split = match (qy.g1, qy.g2) {
        (Some(a), Some(b)) => {
            if a + b != qy.g {
                return Err(Error::InvalidParameter(format!(
                    "g1 + g2 = {} does not equal g = {}",
                    a + b,
                    qy.g
                )));
            }
            Some((a, b))
        }
        (None, None) => None,
        _ => {
            return Err(Error::Schema(
                "'g1' and 'g2' must be given together".to_string(),
            ))
        }
    };
    let mut report = Report::new("gradings");
    report
        .set("n", int64(qy.n as i64))
        .set("g", int64(qy.g as i64))
        .set("flags", to_value(&monotonicity_flags(qy.n, qy.g, split)));

    let rc = restriction_classes(qy.n, qy.g as usize);
    let vertical = rc.vertical_chern_class();
    let consistent = vertical == rc.macdonald;
    report.set(
        "restrictions",
        object([
            ("one_two", class_value(&rc.one_two)),
            ("vertical_c1", class_value(&rc.vertical_c1)),
            ("macdonald", class_value(&rc.macdonald)),
            ("half_sum", class_value(&vertical)),
            ("consistent", Value::from(consistent)),
        ]),
    );
    if !consistent {
        return Err(Error::Inconsistent(
            "fiber restriction of (c1(T^v)^[1] + 1^[2])/2 differs from c1(Sym^n)".to_string(),
        ));
    }

    if let Some(c1) = &qy.c1 {
        report.set("modulus", int(&BigInt::from(grading_modulus(c1))));
        if let Some(n_gamma) = qy.n_gamma {
            report.set(
                "divisibility",
                divisibility_check(c1, n_gamma, qy.n as i64, qy.g as i64),
            );
        }
    }
    if let Some(lambda) = &qy.lambda {
        let lambda = Rational::from_str(lambda)
            .map_err(|e| Error::Schema(format!("lambda '{lambda}': {e}")))?;
        let (Some(c1), Some(gamma)) = (&qy.c1, &qy.gamma) else {
            return Err(Error::Schema("'lambda' needs 'c1' and 'gamma'".to_string()));
        };
        let chi = 2 - 2 * qy.g as i64;
        let w = w_lambda(qy.n, chi, lambda, gamma, c1)?;
        report.set(
            "w_lambda",
            object([
                ("lambda", rat(&w.lambda)),
                ("w", Value::Array(w.w.iter().map(rat).collect())),
                ("prefactor", rat(&w.prefactor)),
                ("one_two_coefficient", rat(&w.one_two_coeff)),
            ]),
        );
    }
    Ok(report)
}
