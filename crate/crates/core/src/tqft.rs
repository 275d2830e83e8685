//! Field theory on symmetric-product homology: elementary cobordism maps,
//! mapping-class twists, closed evaluation by supertrace, and the fibered
//! Alexander-polynomial oracle.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::{
    contract, ext_power_action, q, ExtElement, GradedEndomorphism, H1Vector, LatticeMap, QMatrix,
    Rational, SpMatrix, Subset, SymplecticLattice,
};
use crate::symprod::{basis, binomial_signed, cap_u_quantum_g0_power, Monomial, SymClass};

/// A linear map between monomial models, stored by columns over the source basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMap {
    source_n: u32,
    source: SymplecticLattice,
    target_n: u32,
    target: SymplecticLattice,
    domain: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
    columns: Vec<SymClass>,
}

impl SymMap {
    fn from_fn<F>(
        (source_n, source): (u32, SymplecticLattice),
        (target_n, target): (u32, SymplecticLattice),
        f: F,
    ) -> Result<Self>
    where
        F: Fn(Monomial) -> Result<SymClass>,
    {
        let domain = basis(source_n, source);
        let index = domain.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let columns = domain.iter().map(|m| f(*m)).collect::<Result<Vec<_>>>()?;
        Ok(SymMap {
            source_n,
            source,
            target_n,
            target,
            domain,
            index,
            columns,
        })
    }

    pub fn zero(
        source: (u32, SymplecticLattice),
        target: (u32, SymplecticLattice),
    ) -> Result<Self> {
        Self::from_fn(source, target, |_| Ok(SymClass::zero(target.0, target.1)))
    }

    pub fn identity(n: u32, lattice: SymplecticLattice) -> Result<Self> {
        Self::from_fn((n, lattice), (n, lattice), |m| {
            SymClass::monomial(n, lattice, m)
        })
    }

    pub fn source(&self) -> (u32, SymplecticLattice) {
        (self.source_n, self.source)
    }

    pub fn target(&self) -> (u32, SymplecticLattice) {
        (self.target_n, self.target)
    }

    pub fn domain(&self) -> &[Monomial] {
        &self.domain
    }

    pub fn column(&self, m: Monomial) -> Option<&SymClass> {
        self.index.get(&m).map(|&i| &self.columns[i])
    }

    pub fn entry(&self, row: Monomial, col: Monomial) -> Rational {
        self.column(col)
            .map(|c| c.coeff(row))
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(SymClass::is_zero)
    }

    pub fn apply(&self, x: &SymClass) -> Result<SymClass> {
        if (x.n(), x.lattice()) != self.source() {
            return Err(Error::DimensionMismatch {
                expected: self.source_n as usize,
                actual: x.n() as usize,
            });
        }
        let mut out = SymClass::zero(self.target_n, self.target);
        for (m, c) in x.terms() {
            let col = &self.columns[self.index[m]];
            out = out.add(&col.scale(c))?;
        }
        Ok(out)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &SymMap) -> Result<SymMap> {
        if first.target() != self.source() {
            return Err(Error::DimensionMismatch {
                expected: self.source_n as usize,
                actual: first.target_n as usize,
            });
        }
        Self::from_fn(first.source(), self.target(), |m| {
            self.apply(first.column(m).expect("basis monomial"))
        })
    }

    /// `Σ (−1)^{|S|} ⟨e_m, F e_m⟩` for an endomorphism.
    pub fn supertrace(&self) -> Result<Rational> {
        self.check_endo()?;
        let mut acc = Rational::zero();
        for (m, col) in self.domain.iter().zip(&self.columns) {
            let d = col.coeff(*m);
            if m.parity() == 0 {
                acc += d;
            } else {
                acc -= d;
            }
        }
        Ok(acc)
    }

    /// The same endomorphism split into homological-degree blocks.
    pub fn to_graded(&self) -> Result<GradedEndomorphism> {
        self.check_endo()?;
        let size = self.domain.len();
        let mut m = QMatrix::zeros(size, size);
        for (c, col) in self.columns.iter().enumerate() {
            for (mono, v) in col.terms() {
                m.set(self.index[mono], c, v.clone());
            }
        }
        let degrees: Vec<i64> = self
            .domain
            .iter()
            .map(|x| x.degree(self.source_n))
            .collect();
        GradedEndomorphism::from_matrix(&m, &degrees)
    }

    fn check_endo(&self) -> Result<()> {
        if self.source() != self.target() {
            return Err(Error::DimensionMismatch {
                expected: self.source_n as usize,
                actual: self.target_n as usize,
            });
        }
        Ok(())
    }
}

fn check_circle(l: &H1Vector, lattice: SymplecticLattice) -> Result<()> {
    if l.lattice() != lattice {
        return Err(Error::LatticeMismatch {
            left: lattice.genus(),
            right: l.lattice().genus(),
        });
    }
    if !l.is_zero() && !l.is_primitive() {
        return Err(Error::NotPrimitive(l.to_string()));
    }
    Ok(())
}

/// Symplectic change of basis sending `l` to `a_1`; validates a supplied one.
pub fn resolve_basis_change(l: &H1Vector, supplied: Option<&SpMatrix>) -> Result<SpMatrix> {
    match supplied {
        None => SpMatrix::adapted_basis(l),
        Some(b) => {
            if b.genus() != l.lattice().genus() {
                return Err(Error::LatticeMismatch {
                    left: l.lattice().genus(),
                    right: b.genus(),
                });
            }
            if b.apply(l)? != l.lattice().a(1) {
                return Err(Error::Inconsistent(format!(
                    "basis change does not send circle {l} to a1"
                )));
            }
            Ok(b.clone())
        }
    }
}

/// The lattice map `q ∘ B : H_1(Σ) → H_1(Σ̄)` used by [`down_map`].
pub fn down_projection(l: &H1Vector, basis_change: Option<&SpMatrix>) -> Result<LatticeMap> {
    let lattice = l.lattice();
    let b = resolve_basis_change(l, basis_change)?;
    let proj = LatticeMap::standard_projection(lattice)?;
    let rows: Vec<Vec<i64>> = (0..proj.target().rank())
        .map(|r| {
            (0..lattice.rank())
                .map(|c| {
                    let col = b.apply(&H1Vector::basis(lattice, c)).expect("same lattice");
                    proj.apply(&col).expect("same lattice").coords()[r]
                })
                .collect()
        })
        .collect();
    LatticeMap::new(lattice, proj.target(), rows)
}

/// Map induced by the elementary cobordism killing the circle `L`:
/// `SymClass(n, g) → SymClass(n-1, g-1)`.
///
/// After a symplectic basis change `B` with `B L = a_1`, a monomial
/// `U^i ⊗ ω` goes to `U^i ⊗ contract(a_1, Λ(B) ω)`. A separating circle
/// (`L = 0`) gives the zero map.
pub fn down_map(l: &H1Vector, n: u32, basis_change: Option<&SpMatrix>) -> Result<SymMap> {
    let lattice = l.lattice();
    if n == 0 || lattice.genus() == 0 {
        return Err(Error::NoTarget);
    }
    check_circle(l, lattice)?;
    let target = SymplecticLattice::new(lattice.genus() - 1);
    if l.is_zero() {
        return SymMap::zero((n, lattice), (n - 1, target));
    }
    let b = resolve_basis_change(l, basis_change)?;
    let proj = LatticeMap::standard_projection(lattice)?;
    let a1 = lattice.a(1);
    SymMap::from_fn((n, lattice), (n - 1, target), |m| {
        let moved = ext_power_action(&b, &ExtElement::monomial(lattice, m.wedge))?;
        let image = contract(&a1, &moved, &proj)?;
        SymClass::from_ext(n - 1, m.u, &image)
    })
}

/// Map induced by the reversed elementary cobordism:
/// `SymClass(n-1, g-1) → SymClass(n, g)`, `U^i ⊗ ω ↦ U^i ⊗ Λ(B⁻¹)(a_1 ∧ ι ω)`.
///
/// `l` lives in the genus-`g` lattice.
pub fn up_map(l: &H1Vector, n: u32, basis_change: Option<&SpMatrix>) -> Result<SymMap> {
    let lattice = l.lattice();
    if n == 0 || lattice.genus() == 0 {
        return Err(Error::NoTarget);
    }
    check_circle(l, lattice)?;
    let source = SymplecticLattice::new(lattice.genus() - 1);
    if l.is_zero() {
        return SymMap::zero((n - 1, source), (n, lattice));
    }
    let b_inv = resolve_basis_change(l, basis_change)?.inverse();
    let incl = LatticeMap::standard_inclusion(source);
    let a1 = lattice.a(1).to_ext();
    SymMap::from_fn((n - 1, source), (n, lattice), |m| {
        let lifted = incl.apply_ext(&ExtElement::monomial(source, m.wedge))?;
        let image = ext_power_action(&b_inv, &a1.wedge(&lifted)?)?;
        SymClass::from_ext(n, m.u, &image)
    })
}

/// `U^i ⊗ ω ↦ U^i ⊗ Λ(M) ω` on `SymClass(n, g)`.
pub fn twist_map(m: &SpMatrix, n: u32) -> Result<SymMap> {
    let lattice = m.lattice();
    SymMap::from_fn((n, lattice), (n, lattice), |mono| {
        let image = ext_power_action(m, &ExtElement::monomial(lattice, mono.wedge))?;
        SymClass::from_ext(n, mono.u, &image)
    })
}

/// One step of a circle-valued Morse function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementaryMove {
    /// Index-1 critical point: the fiber loses the handle dual to `circle`
    /// (genus drops by one, point count by one).
    Down {
        circle: H1Vector,
        basis_change: Option<SpMatrix>,
    },
    /// Index-2 critical point: a handle is added along `circle`, which lives
    /// in the larger fiber.
    Up {
        circle: H1Vector,
        basis_change: Option<SpMatrix>,
    },
    /// Monodromy between critical values.
    Twist(SpMatrix),
}

impl ElementaryMove {
    pub fn down(circle: H1Vector) -> Self {
        ElementaryMove::Down {
            circle,
            basis_change: None,
        }
    }

    pub fn up(circle: H1Vector) -> Self {
        ElementaryMove::Up {
            circle,
            basis_change: None,
        }
    }

    pub fn is_separating(&self) -> bool {
        match self {
            ElementaryMove::Down { circle, .. } | ElementaryMove::Up { circle, .. } => {
                circle.is_zero()
            }
            ElementaryMove::Twist(_) => false,
        }
    }

    /// The move's linear map starting from `n` points on a genus-`g` fiber.
    pub fn map(&self, g: usize, n: u32) -> Result<SymMap> {
        match self {
            ElementaryMove::Down {
                circle,
                basis_change,
            } => {
                if circle.lattice().genus() != g {
                    return Err(Error::GenusMismatch {
                        expected: g,
                        actual: circle.lattice().genus(),
                    });
                }
                down_map(circle, n, basis_change.as_ref())
            }
            ElementaryMove::Up {
                circle,
                basis_change,
            } => {
                if circle.lattice().genus() != g + 1 {
                    return Err(Error::GenusMismatch {
                        expected: g + 1,
                        actual: circle.lattice().genus(),
                    });
                }
                up_map(circle, n + 1, basis_change.as_ref())
            }
            ElementaryMove::Twist(m) => {
                if m.genus() != g {
                    return Err(Error::GenusMismatch {
                        expected: g,
                        actual: m.genus(),
                    });
                }
                twist_map(m, n)
            }
        }
    }
}

impl fmt::Display for ElementaryMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementaryMove::Down { circle, .. } => write!(f, "down {circle}"),
            ElementaryMove::Up { circle, .. } => write!(f, "up {circle}"),
            ElementaryMove::Twist(m) => write!(f, "twist {:?}", m.rows()),
        }
    }
}

/// A closed sequence of elementary moves starting from `points` points on a
/// genus-`genus` fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorseCycle {
    genus: usize,
    points: u32,
    moves: Vec<ElementaryMove>,
}

impl MorseCycle {
    pub fn new(genus: usize, points: u32, moves: Vec<ElementaryMove>) -> Result<Self> {
        let cycle = MorseCycle {
            genus,
            points,
            moves,
        };
        let states = cycle.states()?;
        let last = *states.last().expect("at least the start state");
        if last != (genus, points) {
            return Err(Error::NonClosingCycle(format!(
                "starts at genus {genus} with {points} points, ends at genus {} with {} points",
                last.0, last.1
            )));
        }
        Ok(cycle)
    }

    /// A fibered cycle with a single monodromy.
    pub fn fibered(m: SpMatrix, points: u32) -> Self {
        MorseCycle {
            genus: m.genus(),
            points,
            moves: vec![ElementaryMove::Twist(m)],
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn points(&self) -> u32 {
        self.points
    }

    pub fn moves(&self) -> &[ElementaryMove] {
        &self.moves
    }

    /// `(genus, points)` before each move and after the last one.
    pub fn states(&self) -> Result<Vec<(usize, u32)>> {
        let mut out = vec![(self.genus, self.points)];
        let (mut g, mut n) = (self.genus, self.points);
        for (k, mv) in self.moves.iter().enumerate() {
            match mv {
                ElementaryMove::Down { circle, .. } => {
                    if g == 0 || n == 0 {
                        return Err(Error::NonClosingCycle(format!(
                            "move {k} goes below genus 0 or point count 0"
                        )));
                    }
                    check_genus(k, circle.lattice().genus(), g)?;
                    g -= 1;
                    n -= 1;
                }
                ElementaryMove::Up { circle, .. } => {
                    check_genus(k, circle.lattice().genus(), g + 1)?;
                    g += 1;
                    n += 1;
                }
                ElementaryMove::Twist(m) => check_genus(k, m.genus(), g)?,
            }
            out.push((g, n));
        }
        Ok(out)
    }

    pub fn separating_move(&self) -> Option<usize> {
        self.moves.iter().position(ElementaryMove::is_separating)
    }

    /// The move maps in order of application.
    pub fn maps(&self) -> Result<Vec<SymMap>> {
        let states = self.states()?;
        self.moves
            .iter()
            .zip(&states)
            .map(|(mv, &(g, n))| mv.map(g, n))
            .collect()
    }
}

fn check_genus(k: usize, actual: usize, expected: usize) -> Result<()> {
    if actual != expected {
        return Err(Error::NonClosingCycle(format!(
            "move {k} is given on genus {actual}, fiber there has genus {expected}"
        )));
    }
    Ok(())
}

/// Result of closing up a [`MorseCycle`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleEvaluation {
    /// Supertrace of the monodromy of the cycle, defined up to an overall sign.
    pub value: Rational,
    pub dimension: usize,
    pub states: Vec<(usize, u32)>,
    pub separating_move: Option<usize>,
}

/// Supertrace of the composite of all move maps, on `SymClass(n_0, g_0)`.
pub fn evaluate_cycle(c: &MorseCycle) -> Result<CycleEvaluation> {
    evaluate_cycle_with_threads(c, 1)
}

/// As [`evaluate_cycle`], propagating basis vectors on `threads` workers.
///
/// The result does not depend on `threads`: each column is computed exactly
/// and the diagonal is summed in basis order.
pub fn evaluate_cycle_with_threads(c: &MorseCycle, threads: usize) -> Result<CycleEvaluation> {
    let maps = c.maps()?;
    let lattice = SymplecticLattice::new(c.genus);
    let domain = basis(c.points, lattice);
    let run = |m: &Monomial| -> Result<Rational> {
        let mut x = SymClass::monomial(c.points, lattice, *m)?;
        for f in &maps {
            if x.is_zero() {
                break;
            }
            x = f.apply(&x)?;
        }
        let d = x.coeff(*m);
        Ok(if m.parity() == 0 { d } else { -d })
    };
    let diagonal: Vec<Rational> = if threads <= 1 {
        domain.iter().map(run).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| domain.par_iter().map(run).collect::<Result<_>>())?
    };
    let value = diagonal.into_iter().fold(Rational::zero(), |a, b| a + b);
    Ok(CycleEvaluation {
        value,
        dimension: domain.len(),
        states: c.states()?,
        separating_move: c.separating_move(),
    })
}

/// Vanishing for connected sums: a separating circle makes one factor of the
/// composite the zero map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectedSumReport {
    pub value: Rational,
    pub zero_move: usize,
}

pub fn connected_sum_invariant(c: &MorseCycle) -> Result<ConnectedSumReport> {
    let k = c
        .separating_move()
        .ok_or_else(|| Error::InvalidParameter("cycle has no separating circle".to_string()))?;
    let states = c.states()?;
    let (g, n) = states[k];
    let map = c.moves[k].map(g, n)?;
    if !map.is_zero() {
        return Err(Error::Inconsistent(format!(
            "map of separating move {k} is not zero"
        )));
    }
    Ok(ConnectedSumReport {
        value: Rational::zero(),
        zero_move: k,
    })
}

/// Symmetric Laurent polynomial `a_0 + Σ_{i≥1} a_i (t^i + t^{-i})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlexanderForm {
    a0: BigInt,
    a: Vec<BigInt>,
}

impl AlexanderForm {
    /// Trims trailing zeros and makes the leading nonzero coefficient positive.
    pub fn new(a0: BigInt, mut a: Vec<BigInt>) -> Self {
        while a.last().is_some_and(Zero::is_zero) {
            a.pop();
        }
        let leading = a.last().unwrap_or(&a0);
        if leading.is_negative() {
            return AlexanderForm {
                a0: -a0,
                a: a.into_iter().map(|x| -x).collect(),
            };
        }
        AlexanderForm { a0, a }
    }

    pub fn from_ints(a0: i64, a: &[i64]) -> Self {
        Self::new(
            BigInt::from(a0),
            a.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    /// `a_1, a_2, ...` without trailing zeros.
    pub fn higher(&self) -> &[BigInt] {
        &self.a
    }

    pub fn degree(&self) -> usize {
        self.a.len()
    }

    /// `a_k` with `a_{-k} = a_k`.
    pub fn coeff(&self, k: i64) -> BigInt {
        let k = k.unsigned_abs() as usize;
        if k == 0 {
            self.a0.clone()
        } else {
            self.a.get(k - 1).cloned().unwrap_or_default()
        }
    }
}

impl fmt::Display for AlexanderForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.a0)?;
        for (i, c) in self.a.iter().enumerate() {
            write!(f, " + {c}(t^{0} + t^-{0})", i + 1)?;
        }
        Ok(())
    }
}

/// Coefficients `c_0..c_d` of `det(tI − M) = Σ c_k t^k`, by Faddeev–LeVerrier.
pub fn characteristic_polynomial(m: &SpMatrix) -> Result<Vec<BigInt>> {
    let d = m.dim();
    let a = QMatrix::from_rows(
        m.rows()
            .into_iter()
            .map(|r| r.into_iter().map(q).collect())
            .collect(),
    )?;
    let mut coeffs = vec![Rational::zero(); d + 1];
    coeffs[d] = Rational::one();
    let mut mk = QMatrix::zeros(d, d);
    for k in 1..=d {
        // M_k = A M_{k-1} + c_{d-k+1} I
        let mut next = a.mul(&mk)?;
        for i in 0..d {
            let v = next.get(i, i) + &coeffs[d - k + 1];
            next.set(i, i, v);
        }
        let t = a.mul(&next)?.trace();
        coeffs[d - k] = -t / q(k as i64);
        mk = next;
    }
    coeffs
        .into_iter()
        .map(|c| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(Error::Inconsistent(format!(
                    "non-integral characteristic coefficient {c}"
                )))
            }
        })
        .collect()
}

/// Normalized Alexander polynomial of the mapping torus: `det(tI − M) / t^g`.
pub fn alexander_fibered(m: &SpMatrix) -> Result<AlexanderForm> {
    let g = m.genus();
    let c = characteristic_polynomial(m)?;
    for k in 0..=2 * g {
        if c[k] != c[2 * g - k] {
            return Err(Error::NonPalindromic);
        }
    }
    Ok(AlexanderForm::new(c[g].clone(), c[g + 1..].to_vec()))
}

/// `Σ_{i≥0} i · a_{D+i}` with `D = g − 1 − n`.
pub fn alexander_weighted_sum(a: &AlexanderForm, n: u32, g: usize) -> BigInt {
    let d = g as i64 - 1 - n as i64;
    let top = a.degree() as i64;
    let mut acc = BigInt::zero();
    let mut i = 0i64;
    while d + i <= top {
        if i > 0 {
            acc += a.coeff(d + i) * BigInt::from(i);
        }
        i += 1;
    }
    acc
}

/// `Σ_{j≥1} j · C(2g, g − d − j)`.
pub fn segal_donaldson_dimension(d: i64, g: usize) -> u128 {
    let top = g as i64 - d;
    (1..=top.max(0))
        .map(|j| j as u128 * binomial_signed(2 * g as u64, g as i64 - d - j))
        .sum()
}

/// A worked closed-manifold invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExampleReport {
    pub name: String,
    pub m: i64,
    pub n: i64,
    /// The invariant in monomial notation, e.g. `U^5` or `±U^1 ⊗ λ`.
    pub invariant: String,
    /// U-power of the invariant, absent when it vanishes.
    pub exponent: Option<u128>,
    /// Pairing of the relative invariants, up to sign when `sign_ambiguous`.
    pub value: BigInt,
    pub sign_ambiguous: bool,
}

pub const EXAMPLE_NAMES: &[&str] = &["s2xs2", "s1s3_sum"];

pub fn worked_example(name: &str, m: i64, n: i64) -> Result<ExampleReport> {
    match name {
        "s2xs2" => s2xs2(m, n),
        "s1s3_sum" => s1s3_sum(m, n),
        _ => Err(Error::UnknownExample {
            name: name.to_string(),
            available: EXAMPLE_NAMES.join(", "),
        }),
    }
}

fn model_points(n: i64, min: i64) -> Result<u32> {
    if n < min {
        return Err(Error::InvalidParameter(format!(
            "n must be at least {min}, got {n}"
        )));
    }
    u32::try_from(n).map_err(|_| Error::InvalidParameter(format!("n = {n} is too large")))
}

fn u_power_text(k: u128) -> String {
    match k {
        0 => "1".to_string(),
        k => format!("U^{k}"),
    }
}

/// Trivial sphere bundle over a sphere: the relative invariants over the two
/// discs are `1` and the point class in `H^*(CP^n)`, glued by `U^{mn+m+n}`.
fn s2xs2(m: i64, n: i64) -> Result<ExampleReport> {
    let points = model_points(n, 0)?;
    let mut report = ExampleReport {
        name: "s2xs2".to_string(),
        m,
        n,
        invariant: "0".to_string(),
        exponent: None,
        value: BigInt::zero(),
        sign_ambiguous: false,
    };
    if m < 0 {
        return Ok(report);
    }
    let k = (m as i128 + 1)
        .checked_mul(n as i128 + 1)
        .ok_or_else(|| Error::InvalidParameter("exponent overflows".to_string()))?
        - 1;
    let k = k as u128;
    let lattice = SymplecticLattice::new(0);
    let start = SymClass::one(points, lattice);
    let end = cap_u_quantum_g0_power(&start, k)?;
    let top = Monomial::new(points, Subset::EMPTY);
    report.value = rational_to_int(&end.coeff(top))?;
    if !report.value.is_zero() {
        report.exponent = Some(k);
        report.invariant = u_power_text(k);
    }
    Ok(report)
}

/// `(S^1 × S^3) # (S^2 × S^2)`: the class `Φ(b_1)` on the torus side passes
/// through the vanishing-cycle map to `∓Φ(1)` in `H^*(CP^{n-1})`, and is then
/// moved by `U^{n(m+1)−1}` before pairing with the point class.
fn s1s3_sum(m: i64, n: i64) -> Result<ExampleReport> {
    let points = model_points(n, 1)?;
    let mut report = ExampleReport {
        name: "s1s3_sum".to_string(),
        m,
        n,
        invariant: "0".to_string(),
        exponent: None,
        value: BigInt::zero(),
        sign_ambiguous: true,
    };
    if m < 0 {
        return Ok(report);
    }
    let torus = SymplecticLattice::new(1);
    let start = SymClass::from_ext(points, 0, &torus.b(1).to_ext())?;
    let after_down = down_map(&torus.a(1), points, None)?.apply(&start)?;
    let k = (n as i128)
        .checked_mul(m as i128 + 1)
        .ok_or_else(|| Error::InvalidParameter("exponent overflows".to_string()))?
        - 1;
    let end = cap_u_quantum_g0_power(&after_down, k as u128)?;
    let top = Monomial::new(points - 1, Subset::EMPTY);
    report.value = rational_to_int(&end.coeff(top))?;
    if !report.value.is_zero() {
        let e = (points - 1) as u128;
        report.exponent = Some(e);
        report.invariant = format!("±{} ⊗ λ", u_power_text(e));
    }
    Ok(report)
}

fn rational_to_int(r: &Rational) -> Result<BigInt> {
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(Error::Inconsistent(format!("non-integral pairing {r}")))
    }
}

/// Absolute value of an exact integer-valued rational as `i128`, when it fits.
pub fn small_abs(r: &Rational) -> Option<i128> {
    if r.is_integer() {
        r.to_integer().abs().to_i128()
    } else {
        None
    }
}
