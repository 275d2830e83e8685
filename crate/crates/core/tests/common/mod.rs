//! Strategies, oracles and property checks shared by the property suite and
//! the acceptance target.
#![allow(dead_code)]

use std::collections::BTreeMap;

use lagmatch::exterior::{
    contract, ExtElement, GradedEndomorphism, H1Vector, LatticeMap, QMatrix, Rational, SpMatrix,
    Subset, SymplecticLattice,
};
use lagmatch::spinc::cz::{conley_zehnder, SymplecticPath};
use lagmatch::symprod::{cap_u_quantum_g0, cap_u_quantum_g0_power, Monomial, SymClass};
use lagmatch::tqft::{down_map, evaluate_cycle, twist_map, up_map, MorseCycle};
use lagmatch::Error;
use nalgebra::DMatrix;
use num_integer::Integer;
use num_traits::Signed;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub type Check = std::result::Result<(), TestCaseError>;

pub fn q(x: i64) -> Rational {
    Rational::from_integer(x.into())
}

fn fail(e: Error) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

// ---------- strategies ----------

pub fn ext_terms(g: usize) -> impl Strategy<Value = Vec<(u64, i64)>> {
    let top = 1u64 << (2 * g);
    prop::collection::vec((0..top, -3i64..=3), 0..6)
}

pub fn ext_from(g: usize, terms: &[(u64, i64)]) -> ExtElement {
    let lattice = SymplecticLattice::new(g);
    let mut x = ExtElement::zero(lattice);
    for &(mask, c) in terms {
        let idx: Vec<usize> = (0..2 * g).filter(|i| mask >> i & 1 == 1).collect();
        let m = ExtElement::monomial(lattice, Subset::from_indices(&idx)).scale(&q(c));
        x = x.add(&m).unwrap();
    }
    x
}

/// A nonzero primitive vector of genus `g >= 1`.
pub fn primitive(g: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 2 * g)
        .prop_filter("nonzero", |v| v.iter().any(|&x| x != 0))
        .prop_map(|v| {
            let d = v.iter().fold(0i64, |a, &b| a.gcd(&b));
            v.into_iter().map(|x| x / d).collect()
        })
}

pub fn vector(g: usize, coords: &[i64]) -> H1Vector {
    H1Vector::new(SymplecticLattice::new(g), coords.to_vec()).unwrap()
}

/// Words in Dehn twists and their inverses.
pub fn twist_word(g: usize) -> impl Strategy<Value = Vec<(Vec<i64>, bool)>> {
    prop::collection::vec(
        (prop::collection::vec(-2i64..=2, 2 * g), any::<bool>()),
        0..4,
    )
}

pub fn symplectic(g: usize, word: &[(Vec<i64>, bool)]) -> SpMatrix {
    let mut m = SpMatrix::identity(g);
    for (v, inv) in word {
        let t = SpMatrix::dehn_twist(&vector(g, v)).unwrap();
        let t = if *inv { t.inverse() } else { t };
        m = m.mul(&t).unwrap();
    }
    m
}

/// Monomials `U^u ⊗ e_S` with `u + |S| + slack <= n`, with coefficients.
pub fn sym_terms(g: usize, n: u32) -> impl Strategy<Value = Vec<(u32, u64, i64)>> {
    let top = 1u64 << (2 * g);
    prop::collection::vec((0..=n, 0..top, -3i64..=3), 0..6)
}

pub fn sym_from(g: usize, n: u32, slack: u32, terms: &[(u32, u64, i64)]) -> SymClass {
    let lattice = SymplecticLattice::new(g);
    let mut x = SymClass::zero(n, lattice);
    for &(u, mask, c) in terms {
        if u + mask.count_ones() + slack > n {
            continue;
        }
        let idx: Vec<usize> = (0..2 * g).filter(|i| mask >> i & 1 == 1).collect();
        x.add_term(Monomial::new(u, Subset::from_indices(&idx)), q(c))
            .unwrap();
    }
    x
}

// ---------- oracles ----------

/// Determinant by fraction-free elimination.
pub fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// `E_k`: sum of the principal `k x k` minors.
pub fn principal_minor_sums(m: &SpMatrix) -> Vec<i128> {
    let d = m.dim();
    let mut e = vec![0i128; d + 1];
    for mask in 0u64..(1u64 << d) {
        let idx: Vec<usize> = (0..d).filter(|i| mask >> i & 1 == 1).collect();
        let sub: Vec<Vec<i128>> = idx
            .iter()
            .map(|&r| idx.iter().map(|&c| m.get(r, c) as i128).collect())
            .collect();
        e[idx.len()] += det_i128(&sub);
    }
    e
}

/// `Σ_{i>=0} i a_{g-1-n+i}` where `t^{-g} det(tI − M) = Σ_k a_k t^k`.
pub fn alexander_oracle(m: &SpMatrix, n: u32) -> i128 {
    let g = m.genus() as i64;
    let e = principal_minor_sums(m);
    // coefficient of t^{g+k} in det(tI − M) is (−1)^{g−k} E_{g−k}
    let a = |k: i64| -> i128 {
        let k = k.abs();
        if k > g {
            0
        } else {
            let s = if (g - k) % 2 == 0 { 1 } else { -1 };
            s * e[(g - k) as usize]
        }
    };
    let offset = g - 1 - n as i64;
    (0..=(2 * g + n as i64 + 2))
        .map(|i| i as i128 * a(offset + i))
        .sum()
}

/// Direct Lefschetz sum `Σ_k (−1)^k (n − k + 1) tr Λ^k M` over the monomial model.
pub fn lefschetz_oracle(m: &SpMatrix, n: u32) -> i128 {
    let e = principal_minor_sums(m);
    (0..=(n as usize).min(m.dim()))
        .map(|k| {
            let s = if k % 2 == 0 { 1 } else { -1 };
            s * (n as i128 - k as i128 + 1) * e[k]
        })
        .sum()
}

pub fn fibered_value(m: &SpMatrix, n: u32) -> Rational {
    evaluate_cycle(&MorseCycle::fibered(m.clone(), n))
        .unwrap()
        .value
}

// ---------- property checks ----------

pub fn check_leibniz(g: usize, l: &[i64], x: &[(u64, i64)], y: &[(u64, i64)]) -> Check {
    let lattice = SymplecticLattice::new(g);
    let id = LatticeMap::identity(lattice);
    let l = vector(g, l);
    let k = x.first().map(|t| t.0.count_ones()).unwrap_or(0);
    let x: Vec<(u64, i64)> = x
        .iter()
        .copied()
        .filter(|t| t.0.count_ones() == k)
        .collect();
    let (x, y) = (ext_from(g, &x), ext_from(g, y));
    let lhs = contract(&l, &x.wedge(&y).map_err(fail)?, &id).map_err(fail)?;
    let left = contract(&l, &x, &id)
        .map_err(fail)?
        .wedge(&y)
        .map_err(fail)?;
    let mut right = x
        .wedge(&contract(&l, &y, &id).map_err(fail)?)
        .map_err(fail)?;
    if k % 2 == 1 {
        right = right.neg();
    }
    prop_assert_eq!(lhs, left.add(&right).map_err(fail)?);
    Ok(())
}

pub fn check_contract_squared(g: usize, l: &[i64], x: &[(u64, i64)]) -> Check {
    let id = LatticeMap::identity(SymplecticLattice::new(g));
    let l = vector(g, l);
    let once = contract(&l, &ext_from(g, x), &id).map_err(fail)?;
    prop_assert!(contract(&l, &once, &id).map_err(fail)?.is_zero());
    Ok(())
}

pub fn check_down_up(g: usize, n: u32, l: &[i64]) -> Check {
    let l = vector(g, l);
    let down = down_map(&l, n, None).map_err(fail)?;
    let up = up_map(&l, n, None).map_err(fail)?;
    prop_assert!(down.compose(&up).map_err(fail)?.is_zero());
    Ok(())
}

pub fn check_down_equivariance(g: usize, n: u32, l: &[i64], x: &[(u32, u64, i64)]) -> Check {
    let l = vector(g, l);
    let down = down_map(&l, n, None).map_err(fail)?;
    let xu = sym_from(g, n, 1, x);
    prop_assert_eq!(
        down.apply(&xu.shift_u().map_err(fail)?).map_err(fail)?,
        down.apply(&xu).map_err(fail)?.shift_u().map_err(fail)?
    );
    let xt = sym_from(g, n, 2, x);
    prop_assert_eq!(
        down.apply(&xt.wedge_theta().map_err(fail)?).map_err(fail)?,
        down.apply(&xt).map_err(fail)?.wedge_theta().map_err(fail)?
    );
    Ok(())
}

pub fn graded_pair() -> impl Strategy<Value = (Vec<(i64, usize)>, Vec<i64>, Vec<i64>)> {
    prop::collection::vec((-3i64..=3, 0usize..=3), 1..4).prop_flat_map(|blocks| {
        let size: usize = blocks.iter().map(|b| b.1 * b.1).sum();
        (
            Just(blocks),
            prop::collection::vec(-4i64..=4, size),
            prop::collection::vec(-4i64..=4, size),
        )
    })
}

fn graded_from(blocks: &[(i64, usize)], entries: &[i64]) -> GradedEndomorphism {
    let mut map = BTreeMap::new();
    let mut it = entries.iter();
    for &(d, s) in blocks {
        let mut m = QMatrix::zeros(s, s);
        for r in 0..s {
            for c in 0..s {
                m.set(r, c, q(*it.next().unwrap()));
            }
        }
        // repeated degrees keep the last block, as a map would
        map.insert(d, m);
    }
    GradedEndomorphism::new(map).unwrap()
}

pub fn check_supertrace_cyclic(blocks: &[(i64, usize)], a: &[i64], b: &[i64]) -> Check {
    let mut seen = BTreeMap::new();
    for &(d, s) in blocks {
        seen.insert(d, s);
    }
    let blocks: Vec<(i64, usize)> = seen.into_iter().collect();
    let size: usize = blocks.iter().map(|b| b.1 * b.1).sum();
    let (f, h) = (
        graded_from(&blocks, &a[..size]),
        graded_from(&blocks, &b[..size]),
    );
    let fh = f.compose(&h).map_err(fail)?.supertrace();
    let hf = h.compose(&f).map_err(fail)?.supertrace();
    prop_assert_eq!(fh, hf);
    Ok(())
}

pub fn check_twist_cyclic(n: u32, a: &SpMatrix, b: &SpMatrix) -> Check {
    let (ta, tb) = (
        twist_map(a, n).map_err(fail)?,
        twist_map(b, n).map_err(fail)?,
    );
    prop_assert_eq!(
        ta.compose(&tb).map_err(fail)?.supertrace().map_err(fail)?,
        tb.compose(&ta).map_err(fail)?.supertrace().map_err(fail)?
    );
    Ok(())
}

pub fn check_g0_period(n: u32, coeffs: &[i64]) -> Check {
    let lattice = SymplecticLattice::new(0);
    let mut x = SymClass::zero(n, lattice);
    for (u, &c) in coeffs.iter().enumerate().take(n as usize + 1) {
        x.add_term(Monomial::new(u as u32, Subset::EMPTY), q(c))
            .map_err(fail)?;
    }
    let mut y = x.clone();
    for _ in 0..=n {
        y = cap_u_quantum_g0(&y).map_err(fail)?;
    }
    prop_assert_eq!(&y, &x);
    prop_assert_eq!(
        cap_u_quantum_g0_power(&x, (n + 1) as u128).map_err(fail)?,
        x
    );
    Ok(())
}

/// Symmetric `2n x 2n` matrix from its upper triangle.
pub fn symmetric(n: usize, upper: &[f64]) -> DMatrix<f64> {
    let d = 2 * n;
    let mut s = DMatrix::zeros(d, d);
    let mut it = upper.iter();
    for r in 0..d {
        for c in r..d {
            let v = *it.next().unwrap();
            s[(r, c)] = v;
            s[(c, r)] = v;
        }
    }
    s
}

pub fn standard_j(d: usize) -> DMatrix<f64> {
    let n = d / 2;
    DMatrix::from_fn(d, d, |r, c| {
        if c == r + n {
            1.0
        } else if r == c + n {
            -1.0
        } else {
            0.0
        }
    })
}

pub fn cz_inputs() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1usize..=2).prop_flat_map(|n| {
        let d = 2 * n;
        (
            Just(n),
            prop::collection::vec(-2.0f64..2.0, d * (d + 1) / 2),
        )
    })
}

pub fn check_cz_parity(n: usize, upper: &[f64]) -> Check {
    let d = 2 * n;
    let a = standard_j(d) * symmetric(n, upper);
    let path = SymplecticPath::sample(400, |t| (&a * t).exp()).map_err(fail)?;
    let end = path.end().clone();
    let det = (DMatrix::<f64>::identity(d, d) - &end).determinant();
    prop_assume!(det.abs() > 1e-3);
    let cz = match conley_zehnder(&path) {
        Ok(cz) => cz,
        Err(Error::DegenerateEndpoint(_)) => return Err(TestCaseError::reject("degenerate")),
        Err(e) => return Err(fail(e)),
    };
    let predicted = if (n as i64 - cz.index).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    prop_assert_eq!(predicted, det.signum());
    prop_assert!(cz.parity_consistent);
    Ok(())
}

pub fn check_fibered(m: &SpMatrix, n: u32) -> Check {
    let value = fibered_value(m, n);
    let alexander = alexander_oracle(m, n);
    let lefschetz = lefschetz_oracle(m, n);
    prop_assert_eq!(alexander.abs(), lefschetz.abs());
    prop_assert_eq!(value.abs(), Rational::from_integer(alexander.abs().into()));
    Ok(())
}

pub fn check_conjugation(n: u32, m: &SpMatrix, p: &SpMatrix) -> Check {
    let conj = p.mul(m).and_then(|x| x.mul(&p.inverse())).map_err(fail)?;
    prop_assert_eq!(fibered_value(&conj, n), fibered_value(m, n));
    Ok(())
}

/// Deterministic runner with `cases` accepted cases.
pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}
