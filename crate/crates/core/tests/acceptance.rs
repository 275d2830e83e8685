mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use lagmatch::cli::{fixtures, parse};
use lagmatch::exterior::{SpMatrix, SymplecticLattice};
use lagmatch::spinc::{
    formal_dimension, formal_dimension_from, FiberComponent, FibrationDescriptor, H2Model, Region,
    SpinC,
};
use lagmatch::symprod::{basis, poincare_polynomial_dimension, restriction_classes, EtaThetaClass};
use lagmatch::tqft::{
    connected_sum_invariant, evaluate_cycle, segal_donaldson_dimension, worked_example,
    ElementaryMove, MorseCycle,
};
use num_traits::{Signed, Zero};
use proptest::strategy::{Just, Strategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> T) -> Result<T, String> {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    ensure!(elapsed < limit, "{what} took {elapsed:?}, limit {limit:?}");
    Ok(out)
}

fn s2xs2_descriptor() -> FibrationDescriptor {
    FibrationDescriptor {
        regions: vec![Region {
            name: "base".into(),
            base_euler: 2,
            fibers: vec![FiberComponent {
                genus: 0,
                class: None,
            }],
        }],
        round_circles: vec![],
        lefschetz_points: 0,
        signature: 0,
        h2: H2Model {
            labels: vec!["F".into(), "S".into()],
            form: vec![vec![0, 1], vec![1, 0]],
            canonical: vec![-2, -2],
            fiber: Some(vec![1, 0]),
        },
    }
}

fn formal_dimensions() -> Outcome {
    let limit = Duration::from_millis(1);
    for (name, c1_squared, euler, expected) in [("torus", 8, 2, 1), ("klein", 24, 4, 4)] {
        let doc = parse(fixtures::get(name).unwrap()).map_err(|e| e.to_string())?;
        let structures = doc.spinc_structures().map_err(|e| e.to_string())?;
        let d = doc.fibration().unwrap();
        let s = &structures[0].spinc;
        let got = timed(limit, name, || formal_dimension(s, d))?.map_err(|e| e.to_string())?;
        ensure!(got == expected, "{name}: d = {got}, expected {expected}");
        let direct = timed(limit, name, || formal_dimension_from(c1_squared, euler, 0))?
            .map_err(|e| e.to_string())?;
        ensure!(direct == expected, "{name}: closed form gave {direct}");
    }
    let d = s2xs2_descriptor();
    for m in -2i64..=4 {
        for n in -2i64..=4 {
            let s = SpinC::new(vec![2 + 2 * m, 2 + 2 * n], &d.h2).map_err(|e| e.to_string())?;
            let got =
                timed(limit, "s2xs2", || formal_dimension(&s, &d))?.map_err(|e| e.to_string())?;
            let expected = 2 * (m * n + m + n);
            ensure!(
                got == expected,
                "s2xs2({m},{n}): d = {got}, expected {expected}"
            );
        }
    }
    Ok(())
}

fn worked_examples() -> Outcome {
    let limit = Duration::from_millis(10);
    for m in -2i64..=4 {
        for n in 0i64..=4 {
            let r = timed(limit, "s2xs2", || worked_example("s2xs2", m, n))?
                .map_err(|e| e.to_string())?;
            if m < 0 {
                ensure!(
                    r.value.is_zero() && r.invariant == "0",
                    "s2xs2({m},{n}) = {}",
                    r.invariant
                );
            } else {
                let k = ((m + 1) * (n + 1) - 1) as u128;
                ensure!(
                    r.exponent == Some(k) && r.value == 1.into(),
                    "s2xs2({m},{n}): got {} (value {}), expected U^{k}",
                    r.invariant,
                    r.value
                );
            }
        }
        for n in 1i64..=4 {
            let r = timed(limit, "s1s3_sum", || worked_example("s1s3_sum", m, n))?
                .map_err(|e| e.to_string())?;
            if m < 0 {
                ensure!(
                    r.value.is_zero() && r.invariant == "0",
                    "s1s3_sum({m},{n}) = {}",
                    r.invariant
                );
            } else {
                let expected = format!("±U^{} ⊗ λ", n - 1);
                let shown = if n == 1 {
                    "±1 ⊗ λ".to_string()
                } else {
                    expected
                };
                ensure!(
                    r.exponent == Some((n - 1) as u128)
                        && r.value.abs() == 1.into()
                        && r.invariant == shown
                        && r.sign_ambiguous,
                    "s1s3_sum({m},{n}): got {} (value {})",
                    r.invariant,
                    r.value
                );
            }
        }
    }
    Ok(())
}

fn random_symplectic(rng: &mut ChaCha8Rng, g: usize) -> SpMatrix {
    let word: Vec<(Vec<i64>, bool)> = (0..rng.gen_range(0..=4))
        .map(|_| {
            (
                (0..2 * g).map(|_| rng.gen_range(-2..=2)).collect(),
                rng.gen(),
            )
        })
        .collect();
    symplectic(g, &word)
}

fn connected_sums() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..12 {
        let g = rng.gen_range(1..=3usize);
        let n = rng.gen_range(1..=3u32);
        let zero = |genus: usize| vector(genus, &vec![0; 2 * genus]);
        let moves = vec![
            ElementaryMove::Twist(random_symplectic(&mut rng, g)),
            ElementaryMove::down(zero(g)),
            ElementaryMove::Twist(random_symplectic(&mut rng, g - 1)),
            ElementaryMove::up(zero(g)),
            ElementaryMove::Twist(random_symplectic(&mut rng, g)),
        ];
        let cycle = MorseCycle::new(g, n, moves).map_err(|e| e.to_string())?;
        let ev = evaluate_cycle(&cycle).map_err(|e| e.to_string())?;
        ensure!(
            ev.value.is_zero(),
            "trial {trial} (g={g}, n={n}): value {}",
            ev.value
        );
        let report = connected_sum_invariant(&cycle).map_err(|e| e.to_string())?;
        ensure!(
            report.value.is_zero() && report.zero_move == 1,
            "trial {trial}: {report:?}"
        );
    }
    Ok(())
}

fn fibered_grid() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa1e);
    let start = Instant::now();
    let mut nonzero = 0;
    for g in 0..=2usize {
        for n in 0..=2u32 {
            for _ in 0..12 {
                let m = random_symplectic(&mut rng, g);
                let value = fibered_value(&m, n);
                let expected = alexander_oracle(&m, n).abs();
                ensure!(
                    value.abs() == q(expected as i64),
                    "g={g} n={n} M={:?}: supertrace {value}, oracle {expected}",
                    m.rows()
                );
                nonzero += usize::from(expected != 0);
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "grid took {elapsed:?}");
    ensure!(nonzero > 0, "every oracle value vanished");
    Ok(())
}

fn dimension_counts() -> Outcome {
    for g in 0..=3usize {
        for n in 0..=6u32 {
            let sd = segal_donaldson_dimension(g as i64 - 1 - n as i64, g);
            let count = basis(n, SymplecticLattice::new(g)).len() as u128;
            let poincare = poincare_polynomial_dimension(n, g);
            ensure!(
                sd == count && count == poincare,
                "g={g} n={n}: {sd}, {count}, {poincare}"
            );
            if n as i64 >= 2 * g as i64 - 1 {
                let stable = (n as u128 + 1 - g as u128) << (2 * g);
                ensure!(sd == stable, "g={g} n={n}: {sd} != {stable}");
            }
        }
    }
    Ok(())
}

fn class_identity() -> Outcome {
    for g in 0..=4usize {
        for n in 0..=8u32 {
            let half = restriction_classes(n, g).vertical_chern_class();
            let expected = EtaThetaClass::from_ints(n as i64 + 1 - g as i64, -1);
            ensure!(half == expected, "g={g} n={n}: {half:?}");
        }
    }
    Ok(())
}

fn run_suite<S: Strategy>(name: &str, strategy: S, check: impl Fn(S::Value) -> Check) -> Outcome {
    runner(128)
        .run(&strategy, check)
        .map_err(|e| format!("{name}: {e}"))
}

fn property_suites() -> Outcome {
    run_suite(
        "graded Leibniz",
        (1usize..=3).prop_flat_map(|g| (Just(g), primitive(g), ext_terms(g), ext_terms(g))),
        |(g, l, x, y)| check_leibniz(g, &l, &x, &y),
    )?;
    run_suite(
        "down after up",
        (1usize..=3).prop_flat_map(|g| (Just(g), 1u32..=3, primitive(g))),
        |(g, n, l)| check_down_up(g, n, &l),
    )?;
    run_suite(
        "U and theta equivariance",
        (1usize..=3).prop_flat_map(|g| {
            (2u32..=4).prop_flat_map(move |n| (Just((g, n)), primitive(g), sym_terms(g, n)))
        }),
        |((g, n), l, x)| check_down_equivariance(g, n, &l, &x),
    )?;
    run_suite("supertrace cyclicity", graded_pair(), |(b, x, y)| {
        check_supertrace_cyclic(&b, &x, &y)
    })?;
    run_suite(
        "sphere period",
        (0u32..=8, proptest::collection::vec(-5i64..=5, 9)),
        |(n, c)| check_g0_period(n, &c),
    )?;
    run_suite("CZ parity", cz_inputs(), |(n, upper)| {
        check_cz_parity(n, &upper)
    })?;
    Ok(())
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_lagmatch");
    let runs: Vec<Vec<String>> = vec![
        vec!["dim".into(), "--fixture".into(), "torus".into()],
        vec!["dim".into(), "--fixture".into(), "klein".into()],
        vec!["dim".into(), "--fixture".into(), "s2xs2".into()],
        vec!["tqft-eval".into(), "--fixture".into(), "anosov".into()],
        vec!["tqft-eval".into(), "--fixture".into(), "separating".into()],
        vec![
            "tqft-eval".into(),
            "--fixture".into(),
            "sphere_identity".into(),
        ],
        vec!["cz".into(), "--fixture".into(), "cz_pair".into()],
        vec!["gradings".into(), "--fixture".into(), "gradings".into()],
        vec![
            "example".into(),
            "s2xs2".into(),
            "--m".into(),
            "2".into(),
            "--n".into(),
            "1".into(),
        ],
        vec![
            "example".into(),
            "s1s3_sum".into(),
            "--m".into(),
            "1".into(),
            "--n".into(),
            "2".into(),
        ],
    ];
    for args in &runs {
        for json in [false, true] {
            let mut outputs = Vec::new();
            for threads in ["1", "4", "1", "4"] {
                let mut cmd = Command::new(bin);
                cmd.args(args).env("LAGMATCH_THREADS", threads);
                if json {
                    cmd.arg("--json");
                }
                let out = cmd.output().map_err(|e| e.to_string())?;
                ensure!(
                    out.status.success(),
                    "{args:?} failed: {}",
                    String::from_utf8_lossy(&out.stderr)
                );
                outputs.push(out.stdout);
            }
            ensure!(
                outputs.windows(2).all(|w| w[0] == w[1]),
                "{args:?} (json={json}) differs between runs"
            );
        }
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("formal dimension golden values", formal_dimensions),
        ("worked closed-manifold invariants", worked_examples),
        ("connected sums vanish", connected_sums),
        ("fibered value matches Alexander oracle", fibered_grid),
        ("dimension counts agree", dimension_counts),
        ("vertical Chern class identity", class_identity),
        ("property suites", property_suites),
        ("deterministic CLI output", determinism),
    ];
    let mut failures = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(()) => println!("criterion {}: PASS  {name}", i + 1),
            Err(e) => {
                println!("criterion {}: FAIL  {name}: {e}", i + 1);
                failures.push(i + 1);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
