//! Monomial model of `H^*(Sym^n Σ_g; Q)`: basis `U^i ⊗ e_S` with `i + |S| <= n`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exterior::{k_subsets, q, ExtElement, H1Vector, Rational, Subset, SymplecticLattice};

/// `U^u ⊗ e_S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub u: u32,
    pub wedge: Subset,
}

impl Monomial {
    pub fn new(u: u32, wedge: Subset) -> Self {
        Monomial { u, wedge }
    }

    /// Homological degree `2(n - i) - |S|`.
    pub fn degree(&self, n: u32) -> i64 {
        2 * (n as i64 - self.u as i64) - self.wedge.len() as i64
    }

    /// `|S| mod 2`.
    pub fn parity(&self) -> u8 {
        (self.wedge.len() % 2) as u8
    }

    pub fn in_range(&self, n: u32) -> bool {
        self.u as usize + self.wedge.len() <= n as usize
    }
}

/// All monomials of `SymClass(n, g)`, ordered by U-power and then by subset.
pub fn basis(n: u32, lattice: SymplecticLattice) -> Vec<Monomial> {
    let mut out = Vec::new();
    for u in 0..=n {
        let room = (n - u) as usize;
        for k in 0..=room.min(lattice.rank()) {
            for s in k_subsets(lattice.rank(), k) {
                out.push(Monomial::new(u, Subset::from_indices(&s)));
            }
        }
    }
    out
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub(crate) fn binomial_signed(n: u64, k: i64) -> u128 {
    if k < 0 {
        0
    } else {
        binomial(n, k as u64)
    }
}

/// `Σ_{k=0}^{min(n,2g)} (n+1-k) C(2g,k)`.
pub fn poincare_polynomial_dimension(n: u32, g: usize) -> u128 {
    let top = (n as u64).min(2 * g as u64);
    (0..=top)
        .map(|k| (n as u128 + 1 - k as u128) * binomial(2 * g as u64, k))
        .sum()
}

/// An element of the monomial model of `H^*(Sym^n Σ; Q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymClass {
    n: u32,
    lattice: SymplecticLattice,
    terms: BTreeMap<Monomial, Rational>,
}

impl SymClass {
    pub fn zero(n: u32, lattice: SymplecticLattice) -> Self {
        SymClass {
            n,
            lattice,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(n: u32, lattice: SymplecticLattice, m: Monomial) -> Result<Self> {
        let mut out = Self::zero(n, lattice);
        out.add_term(m, Rational::one())?;
        Ok(out)
    }

    /// `Φ(U^u ⊗ ω)`.
    pub fn from_ext(n: u32, u: u32, omega: &ExtElement) -> Result<Self> {
        let mut out = Self::zero(n, omega.lattice());
        for (s, c) in omega.terms() {
            out.add_term(Monomial::new(u, *s), c.clone())?;
        }
        Ok(out)
    }

    /// `Φ(1)`.
    pub fn one(n: u32, lattice: SymplecticLattice) -> Self {
        let mut out = Self::zero(n, lattice);
        out.terms
            .insert(Monomial::new(0, Subset::EMPTY), Rational::one());
        out
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn lattice(&self) -> SymplecticLattice {
        self.lattice
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Monomial) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c · m`, rejecting monomials outside `i + |S| <= n`.
    pub fn add_term(&mut self, m: Monomial, c: Rational) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        if !m.in_range(self.n) {
            return Err(Error::RelationNeeded {
                u_power: m.u,
                wedge_degree: m.wedge.len(),
                n: self.n,
            });
        }
        if m.wedge.mask() >> self.lattice.rank() != 0 {
            return Err(Error::DimensionMismatch {
                expected: self.lattice.rank(),
                actual: 64 - m.wedge.mask().leading_zeros() as usize,
            });
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
        Ok(())
    }

    fn check_same(&self, other: &SymClass) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch {
                left: self.lattice.genus(),
                right: other.lattice.genus(),
            });
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n as usize,
                actual: other.n as usize,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &SymClass) -> Result<SymClass> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> SymClass {
        let mut out = SymClass::zero(self.n, self.lattice);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(m, x)| (*m, x * c)).collect();
        }
        out
    }

    pub fn neg(&self) -> SymClass {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &SymClass) -> Result<SymClass> {
        self.add(&other.neg())
    }

    /// The `Λ`-factor attached to `U^u`.
    pub fn ext_part(&self, u: u32) -> ExtElement {
        ExtElement::from_terms(
            self.lattice,
            self.terms
                .iter()
                .filter(|(m, _)| m.u == u)
                .map(|(m, c)| (m.wedge, c.clone())),
        )
    }

    /// Applies `f` to the `Λ`-factor of every monomial, keeping the U-power.
    pub fn map_ext<F>(&self, n: u32, lattice: SymplecticLattice, mut f: F) -> Result<SymClass>
    where
        F: FnMut(&ExtElement) -> Result<ExtElement>,
    {
        let mut out = SymClass::zero(n, lattice);
        for (m, c) in &self.terms {
            let image = f(&ExtElement::monomial(self.lattice, m.wedge))?;
            for (s, d) in image.terms() {
                out.add_term(Monomial::new(m.u, *s), d * c)?;
            }
        }
        Ok(out)
    }

    /// Shifts every U-power by one (the classical action of `U = η`),
    /// without checking the regime in which it agrees with the quantum one.
    pub fn shift_u(&self) -> Result<SymClass> {
        let mut out = SymClass::zero(self.n, self.lattice);
        for (m, c) in &self.terms {
            out.add_term(Monomial::new(m.u + 1, m.wedge), c.clone())?;
        }
        Ok(out)
    }

    /// Wedges the `Λ`-factor with `θ`.
    pub fn wedge_theta(&self) -> Result<SymClass> {
        let theta = self.lattice.theta();
        self.map_ext(self.n, self.lattice, |w| theta.wedge(w))
    }

    /// Homogeneous degree if all terms share one.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.degree(self.n));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(Monomial::parity);
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }
}

impl fmt::Display for SymClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if !mag.is_one() {
                write!(f, "{mag} ")?;
            }
            write!(f, "{}", render_monomial(m, self.lattice))?;
        }
        Ok(())
    }
}

/// `U^i ⊗ a1^b1`, with `U^0` written as `1` and an empty wedge omitted.
pub fn render_monomial(m: &Monomial, lattice: SymplecticLattice) -> String {
    let u = match m.u {
        0 => "1".to_string(),
        1 => "U".to_string(),
        k => format!("U^{k}"),
    };
    if m.wedge.is_empty() {
        return u;
    }
    let word: Vec<String> = m
        .wedge
        .indices()
        .iter()
        .map(|&i| lattice.label(i))
        .collect();
    format!("{u} ⊗ {}", word.join("^"))
}

/// `μ(l) ∩ x`: wedges the `Λ`-factor with `l`.
pub fn cap_mu(l: &H1Vector, x: &SymClass) -> Result<SymClass> {
    if l.lattice() != x.lattice {
        return Err(Error::LatticeMismatch {
            left: l.lattice().genus(),
            right: x.lattice.genus(),
        });
    }
    let lv = l.to_ext();
    x.map_ext(x.n, x.lattice, |w| lv.wedge(w))
}

/// Action of `U` when quantum and classical products agree (`2n <= g - 1`).
pub fn cap_u_classical(x: &SymClass) -> Result<SymClass> {
    let g = x.lattice.genus() as i64;
    if 2 * x.n as i64 > g - 1 {
        return Err(Error::RegimeViolation(format!(
            "classical U-action needs n <= (g-1)/2, got n={} g={g}",
            x.n
        )));
    }
    x.shift_u()
}

/// Quantum `U`-action on `Sym^n(S^2) = CP^n`: `U^i ↦ U^{i+1}`, `U^n ↦ 1`.
pub fn cap_u_quantum_g0(x: &SymClass) -> Result<SymClass> {
    if x.lattice.genus() != 0 {
        return Err(Error::GenusMismatch {
            expected: 0,
            actual: x.lattice.genus(),
        });
    }
    let mut out = SymClass::zero(x.n, x.lattice);
    for (m, c) in &x.terms {
        let u = if m.u == x.n { 0 } else { m.u + 1 };
        out.add_term(Monomial::new(u, Subset::EMPTY), c.clone())?;
    }
    Ok(out)
}

/// `k`-fold iterate of [`cap_u_quantum_g0`], reduced modulo its period `n + 1`.
pub fn cap_u_quantum_g0_power(x: &SymClass, k: u128) -> Result<SymClass> {
    if x.lattice.genus() != 0 {
        return Err(Error::GenusMismatch {
            expected: 0,
            actual: x.lattice.genus(),
        });
    }
    let period = x.n as u128 + 1;
    let shift = (k % period) as u32;
    let mut out = SymClass::zero(x.n, x.lattice);
    for (m, c) in &x.terms {
        let u = ((m.u as u128 + shift as u128) % period) as u32;
        out.add_term(Monomial::new(u, Subset::EMPTY), c.clone())?;
    }
    Ok(out)
}

/// `U · Φ(η^i) = Φ(η^{i+1} + θ_{g-n+i} - θ_{g-n} η^i)` for `n >= g > 0`.
pub fn cap_u_quantum_eta_power(i: u32, n: u32, lattice: SymplecticLattice) -> Result<SymClass> {
    let g = lattice.genus();
    if g == 0 || (n as usize) < g {
        return Err(Error::RegimeViolation(format!(
            "quantum eta-power formula needs n >= g > 0, got n={n} g={g}"
        )));
    }
    if i >= n {
        return Err(Error::RegimeViolation(format!(
            "eta^{} lies outside the quoted range (i must be below n={n})",
            i + 1
        )));
    }
    let (gi, ni, ii) = (g as i64, n as i64, i as i64);
    let mut out = SymClass::one(n, lattice).shift_power(i + 1)?;
    out = out.add(&SymClass::from_ext(
        n,
        0,
        &lattice.theta_divided(gi - ni + ii),
    )?)?;
    let last = SymClass::from_ext(n, i, &lattice.theta_divided(gi - ni))?;
    out.sub(&last)
}

impl SymClass {
    fn shift_power(&self, k: u32) -> Result<SymClass> {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.shift_u()?;
        }
        Ok(out)
    }
}

/// A class `a η + b θ` in `H^2(Sym^n Σ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaThetaClass {
    pub eta: Rational,
    pub theta: Rational,
}

impl EtaThetaClass {
    pub fn new(eta: Rational, theta: Rational) -> Self {
        EtaThetaClass { eta, theta }
    }

    pub fn from_ints(eta: i64, theta: i64) -> Self {
        Self::new(q(eta), q(theta))
    }

    pub fn add(&self, other: &EtaThetaClass) -> EtaThetaClass {
        Self::new(&self.eta + &other.eta, &self.theta + &other.theta)
    }

    pub fn scale(&self, c: &Rational) -> EtaThetaClass {
        Self::new(&self.eta * c, &self.theta * c)
    }
}

/// Fiber restrictions of `1^[2]`, `c_1(T^v Y)^[1]` and `c_1(Sym^n Σ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionClasses {
    pub one_two: EtaThetaClass,
    pub vertical_c1: EtaThetaClass,
    pub macdonald: EtaThetaClass,
}

impl RestrictionClasses {
    /// `(c_1(T^v Y)^[1] + 1^[2]) / 2`.
    pub fn vertical_chern_class(&self) -> EtaThetaClass {
        self.vertical_c1
            .add(&self.one_two)
            .scale(&Rational::new(1.into(), 2.into()))
    }
}

pub fn restriction_classes(n: u32, g: usize) -> RestrictionClasses {
    let (n, g) = (n as i64, g as i64);
    RestrictionClasses {
        one_two: EtaThetaClass::from_ints(2 * n, -2),
        vertical_c1: EtaThetaClass::from_ints(2 - 2 * g, 0),
        macdonald: EtaThetaClass::from_ints(n + 1 - g, -1),
    }
}
