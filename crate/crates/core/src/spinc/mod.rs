//! Topological bookkeeping for broken fibrations: Euler characteristic,
//! formal dimension, Taubes conversion, admissibility, monotonicity
//! thresholds, grading moduli and index arithmetic.
//!
//! Second homology is user-supplied as a lattice with a symmetric intersection
//! form `Q`. Cohomology classes such as `c_1` are stored by their Poincaré
//! duals in the same basis, so `c_1^2 = cᵀ Q c` and `⟨c_1, x⟩ = (Q c) · x`.

pub mod cz;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{q, Rational};
use crate::symprod::EtaThetaClass;

/// One connected component of the fiber over a region.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberComponent {
    pub genus: u32,
    /// Homology class of the component; defaults to `h2.fiber` for connected fibers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<Vec<i64>>,
}

impl FiberComponent {
    pub fn euler(&self) -> i64 {
        2 - 2 * self.genus as i64
    }
}

/// A region of the base over which the fibration is a surface bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    #[serde(default)]
    pub name: String,
    pub base_euler: i64,
    pub fibers: Vec<FiberComponent>,
}

impl Region {
    pub fn fiber_euler(&self) -> i64 {
        self.fibers.iter().map(FiberComponent::euler).sum()
    }
}

/// A round critical circle; `orientable` says whether its attaching surface
/// is a torus rather than a Klein bottle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundCircle {
    pub orientable: bool,
}

/// Second homology with its intersection form and distinguished classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct H2Model {
    #[serde(default)]
    pub labels: Vec<String>,
    pub form: Vec<Vec<i64>>,
    /// `c_1` of the canonical spin-c structure on the complement of the round locus.
    pub canonical: Vec<i64>,
    /// Class of a regular (connected) fiber.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<Vec<i64>>,
}

impl H2Model {
    pub fn rank(&self) -> usize {
        self.form.len()
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.rank();
        for (i, row) in self.form.iter().enumerate() {
            if row.len() != r {
                return Err(Error::Inconsistent(format!(
                    "intersection form row {i} has length {}, expected {r}",
                    row.len()
                )));
            }
        }
        for (i, row) in self.form.iter().enumerate() {
            if let Some(j) = (0..r).find(|&j| row[j] != self.form[j][i]) {
                return Err(Error::Inconsistent(format!(
                    "intersection form is not symmetric at ({i},{j})"
                )));
            }
        }
        if !self.labels.is_empty() && self.labels.len() != r {
            return Err(Error::Inconsistent(format!(
                "{} labels for a rank-{r} lattice",
                self.labels.len()
            )));
        }
        self.check_vector("canonical class", &self.canonical)?;
        if let Some(f) = &self.fiber {
            self.check_vector("fiber class", f)?;
        }
        check_characteristic(self, &self.canonical, "canonical class")
    }

    fn check_vector(&self, what: &str, v: &[i64]) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::Inconsistent(format!(
                "{what} has {} coordinates, lattice rank is {}",
                v.len(),
                self.rank()
            )));
        }
        Ok(())
    }

    /// `Q x`.
    pub fn dual(&self, x: &[i64]) -> Result<Vec<i64>> {
        self.check_vector("class", x)?;
        self.form
            .iter()
            .map(|row| {
                let s: i128 = row
                    .iter()
                    .zip(x)
                    .map(|(a, b)| *a as i128 * *b as i128)
                    .sum();
                i64::try_from(s).map_err(|_| Error::Overflow("intersection form"))
            })
            .collect()
    }

    /// `xᵀ Q y`.
    pub fn pair(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        self.check_vector("class", y)?;
        let qx = self.dual(x)?;
        let s: i128 = qx.iter().zip(y).map(|(a, b)| *a as i128 * *b as i128).sum();
        i64::try_from(s).map_err(|_| Error::Overflow("intersection form"))
    }
}

fn check_characteristic(h2: &H2Model, c: &[i64], what: &str) -> Result<()> {
    let qc = h2.dual(c)?;
    for (i, v) in qc.iter().enumerate() {
        if (v - h2.form[i][i]).rem_euclid(2) != 0 {
            return Err(Error::Inconsistent(format!(
                "{what} is not characteristic: pairing with basis class {i} is {v}, self-intersection {}",
                h2.form[i][i]
            )));
        }
    }
    Ok(())
}

/// Combinatorial data of a broken fibration over a closed surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibrationDescriptor {
    pub regions: Vec<Region>,
    #[serde(default)]
    pub round_circles: Vec<RoundCircle>,
    #[serde(default)]
    pub lefschetz_points: i64,
    pub signature: i64,
    pub h2: H2Model,
}

impl FibrationDescriptor {
    pub fn validate(&self) -> Result<()> {
        self.h2.validate()?;
        for r in &self.regions {
            if r.fibers.is_empty() {
                return Err(Error::Inconsistent(format!(
                    "region '{}' has no fiber",
                    r.name
                )));
            }
            for f in &r.fibers {
                if let Some(c) = &f.class {
                    self.h2.check_vector("fiber component class", c)?;
                }
            }
        }
        if self.lefschetz_points < 0 {
            return Err(Error::Inconsistent(
                "negative Lefschetz point count".to_string(),
            ));
        }
        Ok(())
    }

    /// Class of a fiber component, falling back to the regular fiber class for
    /// connected fibers.
    pub fn component_class(&self, region: &Region, index: usize) -> Option<Vec<i64>> {
        let f = &region.fibers[index];
        match (&f.class, region.fibers.len()) {
            (Some(c), _) => Some(c.clone()),
            (None, 1) => self.h2.fiber.clone(),
            _ => None,
        }
    }

    /// Class of the whole fiber over a region.
    pub fn region_class(&self, region: &Region) -> Option<Vec<i64>> {
        let mut acc = vec![0i64; self.h2.rank()];
        for i in 0..region.fibers.len() {
            let c = self.component_class(region, i)?;
            for (a, b) in acc.iter_mut().zip(c) {
                *a += b;
            }
        }
        Some(acc)
    }
}

/// `Σ χ(base region) χ(fiber) + #Lefschetz points`; round circles add nothing.
pub fn euler_characteristic(d: &FibrationDescriptor) -> i64 {
    d.regions
        .iter()
        .map(|r| r.base_euler * r.fiber_euler())
        .sum::<i64>()
        + d.lefschetz_points
}

/// A spin-c structure, recorded by (the Poincaré dual of) its first Chern class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinC {
    c1: Vec<i64>,
}

impl SpinC {
    /// Checks that `c1` is characteristic for the intersection form.
    pub fn new(c1: Vec<i64>, h2: &H2Model) -> Result<Self> {
        h2.check_vector("c1", &c1)?;
        check_characteristic(h2, &c1, "c1")?;
        Ok(SpinC { c1 })
    }

    pub fn c1(&self) -> &[i64] {
        &self.c1
    }

    pub fn c1_squared(&self, h2: &H2Model) -> Result<i64> {
        h2.pair(&self.c1, &self.c1)
    }

    /// `⟨c_1, x⟩`.
    pub fn pairing(&self, h2: &H2Model, x: &[i64]) -> Result<i64> {
        h2.pair(&self.c1, x)
    }
}

/// `(c_1^2 − 2χ − 3σ) / 4`, rejecting non-integral values.
pub fn formal_dimension_from(c1_squared: i64, euler: i64, signature: i64) -> Result<i64> {
    let num = c1_squared as i128 - 2 * euler as i128 - 3 * signature as i128;
    if num.rem_euclid(4) != 0 {
        return Err(Error::Inconsistent(format!(
            "c1^2 - 2e - 3sigma = {num} is not divisible by 4"
        )));
    }
    i64::try_from(num / 4).map_err(|_| Error::Overflow("formal_dimension"))
}

pub fn formal_dimension(s: &SpinC, d: &FibrationDescriptor) -> Result<i64> {
    formal_dimension_from(s.c1_squared(&d.h2)?, euler_characteristic(d), d.signature)
}

/// `c_1 = c_1(canonical) + 2β`.
pub fn taubes_convert(beta: &[i64], d: &FibrationDescriptor) -> Result<SpinC> {
    d.h2.check_vector("beta", beta)?;
    let c1 =
        d.h2.canonical
            .iter()
            .zip(beta)
            .map(|(k, b)| {
                b.checked_mul(2)
                    .and_then(|x| x.checked_add(*k))
                    .ok_or(Error::Overflow("taubes_convert"))
            })
            .collect::<Result<Vec<_>>>()?;
    SpinC::new(c1, &d.h2)
}

/// Inverse of [`taubes_convert`].
pub fn taubes_inverse(s: &SpinC, d: &FibrationDescriptor) -> Result<Vec<i64>> {
    s.c1.iter()
        .zip(&d.h2.canonical)
        .map(|(c, k)| {
            let diff = c - k;
            if diff.rem_euclid(2) != 0 {
                Err(Error::Inconsistent(format!(
                    "c1 - c1(canonical) has odd coordinate {diff}"
                )))
            } else {
                Ok(diff / 2)
            }
        })
        .collect()
}

/// `ν = (const − χ) / 2` for each region, from `2ν + χ = const`.
pub fn nu_function(chis: &[i64], constant: i64) -> Result<Vec<i64>> {
    chis.iter()
        .map(|&chi| {
            let diff = constant - chi;
            if diff.rem_euclid(2) != 0 {
                Err(Error::Inadmissible(format!(
                    "2nu + chi = {constant} has no solution for chi = {chi}"
                )))
            } else if diff < 0 {
                Err(Error::Inadmissible(format!(
                    "negative point count for chi = {chi} at level {constant}"
                )))
            } else {
                Ok(diff / 2)
            }
        })
        .collect()
}

/// Which clause of admissibility a fiber satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberClause {
    /// `⟨c_1, F⟩ <= χ(F)/2`.
    Negative,
    /// `⟨c_1, F⟩ > 0`.
    Monotone,
    /// `χ(F) <= ⟨c_1, F⟩ <= χ(F)/2` on a component of a disconnected fiber.
    TwoComponent,
    /// Fails `⟨c_1, F⟩ >= χ(F)`.
    BelowEuler,
    /// Satisfies neither clause.
    Neither,
}

/// Clause satisfied by a connected fiber of genus `genus` with `⟨c_1, F⟩ = pairing`.
pub fn classify_connected_fiber(genus: u32, pairing: i64) -> FiberClause {
    let chi = 2 - 2 * genus as i64;
    if pairing < chi {
        FiberClause::BelowEuler
    } else if 2 * pairing <= chi {
        FiberClause::Negative
    } else if pairing > 0 {
        FiberClause::Monotone
    } else {
        FiberClause::Neither
    }
}

/// Clause satisfied by one component of a two-component fiber.
pub fn classify_component(genus: u32, pairing: i64) -> FiberClause {
    let chi = 2 - 2 * genus as i64;
    if pairing < chi {
        FiberClause::BelowEuler
    } else if 2 * pairing <= chi {
        FiberClause::TwoComponent
    } else {
        FiberClause::Neither
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Admissibility {
    MonotoneRegime,
    NegativeRegime,
    /// Every fiber is admitted, some by the negative clause and some by the
    /// monotone one.
    MixedRegime,
    Inadmissible,
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        !matches!(self, Admissibility::Inadmissible)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberVerdict {
    pub region: String,
    pub component: usize,
    pub genus: u32,
    pub pairing: i64,
    pub clause: FiberClause,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub class: Admissibility,
    pub fibers: Vec<FiberVerdict>,
}

/// Checks the admissibility inequalities on every fiber component.
pub fn admissibility(s: &SpinC, d: &FibrationDescriptor) -> Result<AdmissibilityReport> {
    let two_component = d.regions.iter().any(|r| r.fibers.len() == 2);
    let mut fibers = Vec::new();
    for r in &d.regions {
        if r.fibers.len() > 2 {
            return Err(Error::Inadmissible(format!(
                "region '{}' has {} fiber components; at most two are supported",
                r.name,
                r.fibers.len()
            )));
        }
        for (i, f) in r.fibers.iter().enumerate() {
            let class = d.component_class(r, i).ok_or_else(|| {
                Error::Inconsistent(format!(
                    "component {i} of region '{}' needs a homology class",
                    r.name
                ))
            })?;
            let pairing = s.pairing(&d.h2, &class)?;
            let clause = if two_component {
                classify_component(f.genus, pairing)
            } else {
                classify_connected_fiber(f.genus, pairing)
            };
            fibers.push(FiberVerdict {
                region: r.name.clone(),
                component: i,
                genus: f.genus,
                pairing,
                clause,
            });
        }
    }
    let all = |c: FiberClause| fibers.iter().all(|f| f.clause == c);
    let ok = |f: &FiberVerdict| {
        matches!(
            f.clause,
            FiberClause::Negative | FiberClause::Monotone | FiberClause::TwoComponent
        )
    };
    let class = if fibers.is_empty() || !fibers.iter().all(ok) {
        Admissibility::Inadmissible
    } else if all(FiberClause::Monotone) {
        Admissibility::MonotoneRegime
    } else if fibers
        .iter()
        .all(|f| matches!(f.clause, FiberClause::Negative | FiberClause::TwoComponent))
    {
        Admissibility::NegativeRegime
    } else {
        Admissibility::MixedRegime
    };
    Ok(AdmissibilityReport { class, fibers })
}

/// Thresholds for `Sym^n` of a genus-`g` surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityFlags {
    /// `n >= g`.
    pub monotone: bool,
    /// `n <= (2g − 1)/4`.
    pub correspondence_2negative: bool,
    /// `n <= (g − 1)/2`.
    pub three_negative: bool,
    /// `n <= min(g_1, g_2)/2`, when a separating splitting is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separating_ok: Option<bool>,
    /// Minimal Chern number `|n + 1 − g|`.
    pub c_min: u64,
}

pub fn monotonicity_flags(n: u32, g: u32, split: Option<(u32, u32)>) -> MonotonicityFlags {
    let (n64, g64) = (n as i64, g as i64);
    MonotonicityFlags {
        monotone: n >= g,
        correspondence_2negative: 4 * n64 < 2 * g64,
        three_negative: 2 * n64 < g64,
        separating_ok: split.map(|(g1, g2)| 2 * n <= g1.min(g2)),
        c_min: (n64 + 1 - g64).unsigned_abs(),
    }
}

/// The class `w_λ` and the coefficients of `W_λ = (1+λn) w_λ^[1] − (λ/2) 1^[2]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WLambda {
    pub lambda: Rational,
    pub n: u32,
    pub chi: i64,
    pub w: Vec<Rational>,
    /// `1 + λn`.
    pub prefactor: Rational,
    /// `−λ/2`.
    pub one_two_coeff: Rational,
}

/// `w_λ = (λγ + c_1/(χ + 2n)) / (1 + λn)`.
pub fn w_lambda(n: u32, chi: i64, lambda: Rational, gamma: &[i64], c1: &[i64]) -> Result<WLambda> {
    if gamma.len() != c1.len() {
        return Err(Error::DimensionMismatch {
            expected: gamma.len(),
            actual: c1.len(),
        });
    }
    let prefactor = Rational::one() + &lambda * q(n as i64);
    if prefactor <= Rational::zero() {
        return Err(Error::InvalidParameter(format!(
            "lambda = {lambda} must exceed -1/n for n = {n}"
        )));
    }
    let level = chi + 2 * n as i64;
    if level == 0 {
        return Err(Error::InvalidParameter(
            "chi + 2n vanishes; w_lambda is undefined".to_string(),
        ));
    }
    let w = gamma
        .iter()
        .zip(c1)
        .map(|(&gm, &c)| (&lambda * q(gm) + Rational::new(c.into(), level.into())) / &prefactor)
        .collect();
    let one_two_coeff = -&lambda / q(2);
    Ok(WLambda {
        lambda,
        n,
        chi,
        w,
        prefactor,
        one_two_coeff,
    })
}

impl WLambda {
    /// `⟨w_λ, Σ⟩` from the pairings of `γ` and `c_1` with the fiber.
    pub fn fiber_pairing(&self, gamma_fiber: i64, c1_fiber: i64) -> Rational {
        let level = q(self.chi + 2 * self.n as i64);
        (&self.lambda * q(gamma_fiber) + q(c1_fiber) / level) / &self.prefactor
    }

    /// Restriction of `W_λ` to a fiber of `Sym^n`, in the `(η, θ)` basis,
    /// using `1^[2]| = 2nη − 2θ`.
    pub fn fiber_restriction(&self, gamma_fiber: i64, c1_fiber: i64) -> EtaThetaClass {
        let w = self.fiber_pairing(gamma_fiber, c1_fiber);
        let one_two = EtaThetaClass::from_ints(2 * self.n as i64, -2);
        EtaThetaClass::new(&self.prefactor * w, Rational::zero())
            .add(&one_two.scale(&self.one_two_coeff))
    }
}

/// Divisibility of a class: gcd of its coordinates, 0 for torsion.
pub fn grading_modulus(c1: &[i64]) -> u64 {
    c1.iter().fold(0u64, |acc, &c| acc.gcd(&c.unsigned_abs()))
}

fn divides(a: i128, b: i128) -> bool {
    if a == 0 {
        b == 0
    } else {
        b % a == 0
    }
}

/// `Div(c_1) | 2N_γ` and `N_γ | n + 1 − g`.
pub fn divisibility_check(c1: &[i64], n_gamma: i64, n: i64, g: i64) -> bool {
    let div = grading_modulus(c1) as i128;
    divides(div, 2 * n_gamma as i128) && divides(n_gamma as i128, n as i128 + 1 - g as i128)
}

/// Index of a Lefschetz-fibration section: `A·A + ⟨c_1(TX), A⟩`.
pub fn lefschetz_index(a_self_intersection: i64, c1_pairing: i64) -> i64 {
    a_self_intersection + c1_pairing
}

/// `μ_Q + Σ rank_i χ_i`.
pub fn matched_index(mu_q: i64, ranks: &[i64], chis: &[i64]) -> Result<i64> {
    if ranks.len() != chis.len() {
        return Err(Error::DimensionMismatch {
            expected: ranks.len(),
            actual: chis.len(),
        });
    }
    Ok(mu_q + ranks.iter().zip(chis).map(|(r, c)| r * c).sum::<i64>())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MaslovDisc {
    /// `k + 1 − 2g_1`.
    pub index: i64,
    /// `2k − (k − 1 + 2g_1)`, the count it is derived from.
    pub count_check: i64,
}

/// Maslov index of the disc bounded by a vanishing cycle with `k` points.
pub fn maslov_vanishing_disc(k: i64, g1: i64) -> Result<MaslovDisc> {
    if g1 <= 0 || k < 0 {
        return Err(Error::InvalidParameter(format!(
            "need k >= 0 and g1 > 0, got k={k} g1={g1}"
        )));
    }
    Ok(MaslovDisc {
        index: k + 1 - 2 * g1,
        count_check: 2 * k - (k - 1 + 2 * g1),
    })
}
