//! Exact exterior algebra over the first homology of a closed oriented surface.
//!
//! The lattice `H_1(Σ_g; Z)` carries the ordered basis `a_1..a_g, b_1..b_g`
//! (internal indices `0..g` and `g..2g`) with `a_i · b_i = +1`. Elements of
//! `Λ* H_1(Σ; Q)` are sparse maps from strictly increasing index subsets to
//! nonzero rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Largest genus supported by the bitmask representation of subsets.
pub const MAX_GENUS: usize = 32;

pub(crate) fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `H_1` of a closed oriented genus-`g` surface with its intersection form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymplecticLattice {
    genus: usize,
}

impl SymplecticLattice {
    /// # Panics
    /// Panics if `genus > MAX_GENUS`.
    pub fn new(genus: usize) -> Self {
        assert!(genus <= MAX_GENUS, "genus {genus} exceeds {MAX_GENUS}");
        SymplecticLattice { genus }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    /// Entry `(r, c)` of the standard intersection matrix `J`.
    pub fn form_entry(&self, r: usize, c: usize) -> i64 {
        let g = self.genus;
        if r < g && c == r + g {
            1
        } else if r >= g && c + g == r {
            -1
        } else {
            0
        }
    }

    pub fn intersection_matrix(&self) -> Vec<Vec<i64>> {
        (0..self.rank())
            .map(|r| (0..self.rank()).map(|c| self.form_entry(r, c)).collect())
            .collect()
    }

    /// `a_i`, 1-based.
    pub fn a(&self, i: usize) -> H1Vector {
        assert!(i >= 1 && i <= self.genus);
        H1Vector::basis(*self, i - 1)
    }

    /// `b_i`, 1-based.
    pub fn b(&self, i: usize) -> H1Vector {
        assert!(i >= 1 && i <= self.genus);
        H1Vector::basis(*self, self.genus + i - 1)
    }

    pub fn label(&self, index: usize) -> String {
        if index < self.genus {
            format!("a{}", index + 1)
        } else {
            format!("b{}", index - self.genus + 1)
        }
    }

    /// `xᵀ J y`.
    pub fn intersection(&self, x: &H1Vector, y: &H1Vector) -> Result<i64> {
        self.check(x.genus)?;
        self.check(y.genus)?;
        let g = self.genus;
        let mut acc: i128 = 0;
        for i in 0..g {
            acc += x.coords[i] as i128 * y.coords[i + g] as i128;
            acc -= x.coords[i + g] as i128 * y.coords[i] as i128;
        }
        i64::try_from(acc).map_err(|_| Error::Overflow("intersection"))
    }

    /// `θ = Σ a_i ∧ b_i`.
    pub fn theta(&self) -> ExtElement {
        let mut out = ExtElement::zero(*self);
        for i in 0..self.genus {
            out.terms
                .insert(Subset::from_indices(&[i, i + self.genus]), Rational::one());
        }
        out
    }

    /// `θ^m / m!` for `m >= 0`, zero for `m < 0`.
    ///
    /// Expanded directly: the coefficient of `a_{i1} b_{i1} ... a_{im} b_{im}` in
    /// `θ^m / m!` is 1 once the pairs are reordered into sorted position.
    pub fn theta_divided(&self, m: i64) -> ExtElement {
        if m < 0 || m as usize > self.genus {
            return ExtElement::zero(*self);
        }
        let m = m as usize;
        let g = self.genus;
        let mut out = ExtElement::zero(*self);
        for choice in k_subsets(g, m) {
            // a_{i1} b_{i1} a_{i2} b_{i2} ... reordered to sorted order
            let mut mask = 0u64;
            let mut sign = false;
            for &i in &choice {
                let pair = Subset::from_indices(&[i, i + g]);
                let (s, ok) = koszul(mask, pair.0);
                debug_assert!(ok);
                sign ^= s;
                mask |= pair.0;
            }
            let coeff = if sign {
                -Rational::one()
            } else {
                Rational::one()
            };
            out.terms.insert(Subset(mask), coeff);
        }
        out
    }

    fn check(&self, other: usize) -> Result<()> {
        if self.genus != other {
            return Err(Error::LatticeMismatch {
                left: self.genus,
                right: other,
            });
        }
        Ok(())
    }
}

pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Sign of moving the wedge `e_A ∧ e_B` into sorted order, and whether the
/// product is nonzero.
fn koszul(a: u64, b: u64) -> (bool, bool) {
    if a & b != 0 {
        return (false, false);
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> (j + 1)).count_ones();
    }
    (inversions % 2 == 1, true)
}

/// A strictly increasing subset of `{0, .., 2g-1}`.
///
/// Ordered by size first, then lexicographically on the sorted indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Subset(pub(crate) u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_indices(indices: &[usize]) -> Subset {
        let mut mask = 0u64;
        for &i in indices {
            assert!(i < 64);
            mask |= 1 << i;
        }
        Subset(mask)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut rest = self.0;
        while rest != 0 {
            out.push(rest.trailing_zeros() as usize);
            rest &= rest - 1;
        }
        out
    }

    pub fn mask(&self) -> u64 {
        self.0
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.indices().cmp(&other.indices()))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An integral class in `H_1(Σ_g; Z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct H1Vector {
    genus: usize,
    coords: Vec<i64>,
}

impl H1Vector {
    pub fn new(lattice: SymplecticLattice, coords: Vec<i64>) -> Result<Self> {
        if coords.len() != lattice.rank() {
            return Err(Error::DimensionMismatch {
                expected: lattice.rank(),
                actual: coords.len(),
            });
        }
        Ok(H1Vector {
            genus: lattice.genus(),
            coords,
        })
    }

    pub fn zero(lattice: SymplecticLattice) -> Self {
        H1Vector {
            genus: lattice.genus(),
            coords: vec![0; lattice.rank()],
        }
    }

    pub fn basis(lattice: SymplecticLattice, index: usize) -> Self {
        let mut v = Self::zero(lattice);
        v.coords[index] = 1;
        v
    }

    pub fn lattice(&self) -> SymplecticLattice {
        SymplecticLattice::new(self.genus)
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// gcd of the coordinates is 1.
    pub fn is_primitive(&self) -> bool {
        self.coords.iter().fold(0i64, |acc, &c| acc.gcd(&c)) == 1
    }

    pub fn to_ext(&self) -> ExtElement {
        let mut out = ExtElement::zero(self.lattice());
        for (i, &c) in self.coords.iter().enumerate() {
            if c != 0 {
                out.terms.insert(Subset(1 << i), q(c));
            }
        }
        out
    }
}

impl fmt::Display for H1Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// An element of `Λ* H_1(Σ_g; Q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtElement {
    genus: usize,
    terms: BTreeMap<Subset, Rational>,
}

impl ExtElement {
    pub fn zero(lattice: SymplecticLattice) -> Self {
        ExtElement {
            genus: lattice.genus(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(lattice: SymplecticLattice) -> Self {
        Self::scalar(lattice, Rational::one())
    }

    pub fn scalar(lattice: SymplecticLattice, c: Rational) -> Self {
        let mut out = Self::zero(lattice);
        if !c.is_zero() {
            out.terms.insert(Subset::EMPTY, c);
        }
        out
    }

    /// The basis monomial `e_S`.
    pub fn monomial(lattice: SymplecticLattice, subset: Subset) -> Self {
        assert!(subset.0 >> lattice.rank() == 0, "subset outside lattice");
        let mut out = Self::zero(lattice);
        out.terms.insert(subset, Rational::one());
        out
    }

    /// Builds an element from `(subset, coefficient)` pairs, dropping zeros and
    /// summing repeats.
    pub fn from_terms<I>(lattice: SymplecticLattice, terms: I) -> Self
    where
        I: IntoIterator<Item = (Subset, Rational)>,
    {
        let mut out = Self::zero(lattice);
        for (s, c) in terms {
            assert!(s.0 >> lattice.rank() == 0, "subset outside lattice");
            out.add_term(s, c);
        }
        out
    }

    pub fn lattice(&self) -> SymplecticLattice {
        SymplecticLattice::new(self.genus)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Subset, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, subset: Subset) -> Rational {
        self.terms
            .get(&subset)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common degree if the element is homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Subset::len);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Degree-`k` component.
    pub fn part(&self, k: usize) -> ExtElement {
        ExtElement {
            genus: self.genus,
            terms: self
                .terms
                .iter()
                .filter(|(s, _)| s.len() == k)
                .map(|(s, c)| (*s, c.clone()))
                .collect(),
        }
    }

    pub(crate) fn add_term(&mut self, s: Subset, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(s).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn add(&self, other: &ExtElement) -> Result<ExtElement> {
        self.lattice().check(other.genus)?;
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(*s, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ExtElement) -> Result<ExtElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ExtElement {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> ExtElement {
        if c.is_zero() {
            return ExtElement::zero(self.lattice());
        }
        ExtElement {
            genus: self.genus,
            terms: self.terms.iter().map(|(s, x)| (*s, x * c)).collect(),
        }
    }

    /// `self ∧ other`.
    pub fn wedge(&self, other: &ExtElement) -> Result<ExtElement> {
        self.lattice().check(other.genus)?;
        let mut out = ExtElement::zero(self.lattice());
        for (sa, ca) in &self.terms {
            for (sb, cb) in &other.terms {
                let (neg, nonzero) = koszul(sa.0, sb.0);
                if !nonzero {
                    continue;
                }
                let c = ca * cb;
                out.add_term(Subset(sa.0 | sb.0), if neg { -c } else { c });
            }
        }
        Ok(out)
    }

    /// Wedge of a list of elements, left to right. Empty list gives 1.
    pub fn wedge_all(lattice: SymplecticLattice, factors: &[ExtElement]) -> Result<ExtElement> {
        let mut acc = ExtElement::one(lattice);
        for f in factors {
            acc = acc.wedge(f)?;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for ExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let lattice = self.lattice();
        for (k, (s, c)) in self.terms.iter().enumerate() {
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if k == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let word: Vec<String> = s.indices().iter().map(|&i| lattice.label(i)).collect();
            if s.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", word.join("^"))?;
            } else {
                write!(f, "{mag} {}", word.join("^"))?;
            }
        }
        Ok(())
    }
}

/// An integral linear map between two surface lattices, stored as a
/// `rank(target) × rank(source)` matrix acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeMap {
    source: SymplecticLattice,
    target: SymplecticLattice,
    matrix: Vec<Vec<i64>>,
}

impl LatticeMap {
    pub fn new(
        source: SymplecticLattice,
        target: SymplecticLattice,
        matrix: Vec<Vec<i64>>,
    ) -> Result<Self> {
        if matrix.len() != target.rank() {
            return Err(Error::DimensionMismatch {
                expected: target.rank(),
                actual: matrix.len(),
            });
        }
        for row in &matrix {
            if row.len() != source.rank() {
                return Err(Error::DimensionMismatch {
                    expected: source.rank(),
                    actual: row.len(),
                });
            }
        }
        Ok(LatticeMap {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(lattice: SymplecticLattice) -> Self {
        let n = lattice.rank();
        let matrix = (0..n)
            .map(|r| (0..n).map(|c| i64::from(r == c)).collect())
            .collect();
        LatticeMap {
            source: lattice,
            target: lattice,
            matrix,
        }
    }

    /// `Σ_g → Σ_{g-1}`: kills `a_1, b_1` and sends `a_i, b_i` to `a_{i-1}, b_{i-1}`.
    pub fn standard_projection(source: SymplecticLattice) -> Result<Self> {
        let g = source.genus();
        if g == 0 {
            return Err(Error::NoTarget);
        }
        let target = SymplecticLattice::new(g - 1);
        let mut matrix = vec![vec![0; source.rank()]; target.rank()];
        for i in 1..g {
            matrix[i - 1][i] = 1;
            matrix[(g - 1) + (i - 1)][g + i] = 1;
        }
        LatticeMap::new(source, target, matrix)
    }

    /// `Σ_g → Σ_{g+1}`: sends `a_i, b_i` to `a_{i+1}, b_{i+1}`, leaving room
    /// for a new first pair.
    pub fn standard_inclusion(source: SymplecticLattice) -> Self {
        let g = source.genus();
        let target = SymplecticLattice::new(g + 1);
        let mut matrix = vec![vec![0; source.rank()]; target.rank()];
        for i in 0..g {
            matrix[i + 1][i] = 1;
            matrix[(g + 1) + (i + 1)][g + i] = 1;
        }
        LatticeMap {
            source,
            target,
            matrix,
        }
    }

    pub fn source(&self) -> SymplecticLattice {
        self.source
    }

    pub fn target(&self) -> SymplecticLattice {
        self.target
    }

    pub fn apply(&self, v: &H1Vector) -> Result<H1Vector> {
        self.source.check(v.genus)?;
        let coords = self
            .matrix
            .iter()
            .map(|row| row.iter().zip(&v.coords).map(|(a, b)| a * b).sum())
            .collect();
        H1Vector::new(self.target, coords)
    }

    /// Image of the basis vector `e_index` as a degree-1 element.
    fn column(&self, index: usize) -> ExtElement {
        let mut out = ExtElement::zero(self.target);
        for (r, row) in self.matrix.iter().enumerate() {
            if row[index] != 0 {
                out.terms.insert(Subset(1 << r), q(row[index]));
            }
        }
        out
    }

    fn columns(&self) -> Vec<ExtElement> {
        (0..self.source.rank()).map(|i| self.column(i)).collect()
    }

    /// The induced algebra map `Λ* source → Λ* target`.
    pub fn apply_ext(&self, x: &ExtElement) -> Result<ExtElement> {
        self.source.check(x.genus)?;
        pushforward(self.target, &self.columns(), x)
    }
}

fn pushforward(
    target: SymplecticLattice,
    columns: &[ExtElement],
    x: &ExtElement,
) -> Result<ExtElement> {
    let mut out = ExtElement::zero(target);
    for (s, c) in &x.terms {
        let factors: Vec<ExtElement> = s.indices().iter().map(|&i| columns[i].clone()).collect();
        let image = ExtElement::wedge_all(target, &factors)?;
        for (t, d) in image.terms {
            out.add_term(t, d * c);
        }
    }
    Ok(out)
}

/// Contraction with the functional `x ↦ x · L`, followed by `q` on the
/// surviving factors:
///
/// `contract(L, x_1 ∧ … ∧ x_k) = Σ_j (−1)^{j−1} (x_j · L) q(x_1) ∧ … x̂_j … ∧ q(x_k)`.
pub fn contract(l: &H1Vector, omega: &ExtElement, proj: &LatticeMap) -> Result<ExtElement> {
    let lattice = omega.lattice();
    lattice.check(l.genus)?;
    if proj.source != lattice {
        return Err(Error::DimensionMismatch {
            expected: lattice.rank(),
            actual: proj.source.rank(),
        });
    }
    // pairing[s] = e_s · L
    let pairing: Vec<i64> = (0..lattice.rank())
        .map(|s| lattice.intersection(&H1Vector::basis(lattice, s), l))
        .collect::<Result<_>>()?;
    let columns = proj.columns();
    let target = proj.target;
    let mut out = ExtElement::zero(target);
    for (s, c) in &omega.terms {
        let idx = s.indices();
        for (j, &sj) in idx.iter().enumerate() {
            if pairing[sj] == 0 {
                continue;
            }
            let rest: Vec<ExtElement> = idx
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &i)| columns[i].clone())
                .collect();
            let image = ExtElement::wedge_all(target, &rest)?;
            let mut factor = c * q(pairing[sj]);
            if j % 2 == 1 {
                factor = -factor;
            }
            for (t, d) in image.terms {
                out.add_term(t, d * &factor);
            }
        }
    }
    Ok(out)
}

/// An integral symplectic matrix, `Mᵀ J M = J`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpMatrix {
    genus: usize,
    entries: Vec<i64>,
}

impl SpMatrix {
    /// Row-major `2g × 2g` entries.
    pub fn new(genus: usize, entries: Vec<i64>) -> Result<Self> {
        let n = 2 * genus;
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: entries.len(),
            });
        }
        if genus > MAX_GENUS {
            return Err(Error::InvalidParameter(format!("genus {genus} too large")));
        }
        let m = SpMatrix { genus, entries };
        if !m.is_symplectic() {
            return Err(Error::NotSymplectic);
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "symplectic matrices have even size, got {n}"
            )));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        SpMatrix::new(n / 2, entries)
    }

    pub fn identity(genus: usize) -> Self {
        let n = 2 * genus;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        SpMatrix { genus, entries }
    }

    /// Action of the Dehn twist about a curve of class `v`:
    /// `x ↦ x + (x · v) v`.
    pub fn dehn_twist(v: &H1Vector) -> Result<Self> {
        let lattice = v.lattice();
        let n = lattice.rank();
        let mut entries = vec![0i64; n * n];
        for c in 0..n {
            let pairing = lattice.intersection(&H1Vector::basis(lattice, c), v)?;
            for r in 0..n {
                let delta = pairing
                    .checked_mul(v.coords[r])
                    .ok_or(Error::Overflow("dehn_twist"))?;
                entries[r * n + c] = i64::from(r == c) + delta;
            }
        }
        SpMatrix::new(lattice.genus(), entries)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn dim(&self) -> usize {
        2 * self.genus
    }

    pub fn lattice(&self) -> SymplecticLattice {
        SymplecticLattice::new(self.genus)
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.dim() + c]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        if self.dim() == 0 {
            return Vec::new();
        }
        self.entries
            .chunks(self.dim())
            .map(<[i64]>::to_vec)
            .collect()
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn trace(&self) -> i64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    fn is_symplectic(&self) -> bool {
        let lattice = self.lattice();
        let n = self.dim();
        // (Mᵀ J M)_{rc} = Σ_{i,j} M_{ir} J_{ij} M_{jc}
        for r in 0..n {
            for c in 0..n {
                let mut acc: i128 = 0;
                for i in 0..n {
                    let mir = self.get(i, r) as i128;
                    if mir == 0 {
                        continue;
                    }
                    for j in 0..n {
                        let jij = lattice.form_entry(i, j) as i128;
                        if jij != 0 {
                            acc += mir * jij * self.get(j, c) as i128;
                        }
                    }
                }
                if acc != lattice.form_entry(r, c) as i128 {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul(&self, other: &SpMatrix) -> Result<SpMatrix> {
        if self.genus != other.genus {
            return Err(Error::LatticeMismatch {
                left: self.genus,
                right: other.genus,
            });
        }
        let n = self.dim();
        let mut entries = vec![0i64; n * n];
        for r in 0..n {
            for c in 0..n {
                let mut acc: i128 = 0;
                for k in 0..n {
                    acc += self.get(r, k) as i128 * other.get(k, c) as i128;
                }
                entries[r * n + c] =
                    i64::try_from(acc).map_err(|_| Error::Overflow("SpMatrix::mul"))?;
            }
        }
        Ok(SpMatrix {
            genus: self.genus,
            entries,
        })
    }

    /// `M⁻¹ = −J Mᵀ J`.
    pub fn inverse(&self) -> SpMatrix {
        let g = self.genus;
        let n = self.dim();
        let mut entries = vec![0i64; n * n];
        // −J Mᵀ J on blocks: with M = [[A,B],[C,D]], M⁻¹ = [[Dᵀ,−Bᵀ],[−Cᵀ,Aᵀ]].
        for r in 0..n {
            for c in 0..n {
                let (rb, ri) = (r / g.max(1), r % g.max(1));
                let (cb, ci) = (c / g.max(1), c % g.max(1));
                let v = match (rb, cb) {
                    (0, 0) => self.get(g + ci, g + ri),
                    (0, 1) => -self.get(ci, g + ri),
                    (1, 0) => -self.get(g + ci, ri),
                    _ => self.get(ci, ri),
                };
                entries[r * n + c] = v;
            }
        }
        SpMatrix { genus: g, entries }
    }

    pub fn apply(&self, v: &H1Vector) -> Result<H1Vector> {
        self.lattice().check(v.genus)?;
        let n = self.dim();
        let coords = (0..n)
            .map(|r| (0..n).map(|c| self.get(r, c) * v.coords[c]).sum())
            .collect();
        H1Vector::new(self.lattice(), coords)
    }

    pub fn as_lattice_map(&self) -> LatticeMap {
        LatticeMap {
            source: self.lattice(),
            target: self.lattice(),
            matrix: self.rows(),
        }
    }

    /// A symplectic `B` with `B·l = a_1`, for primitive `l`.
    ///
    /// Reduction by symplectic row operations: first an `SL(2, Z)` Euclid on
    /// each `(a_i, b_i)` pair clears the `b` coordinates, then `GL(g, Z)` row
    /// operations on the `a` block (with the inverse transpose on the `b`
    /// block) collect the gcd into `a_1`.
    pub fn adapted_basis(l: &H1Vector) -> Result<SpMatrix> {
        if !l.is_primitive() {
            return Err(Error::NotPrimitive(l.to_string()));
        }
        let g = l.genus;
        let mut v: Vec<i64> = l.coords.clone();
        let mut b = SpMatrix::identity(g);
        let n = 2 * g;
        let row_add = |m: &mut Vec<i64>, dst: usize, src: usize, c: i64| {
            for k in 0..n {
                m[dst * n + k] += c * m[src * n + k];
            }
        };
        for i in 0..g {
            let (ai, bi) = (i, g + i);
            while v[bi] != 0 {
                let qt = v[ai] / v[bi];
                // x -= q y
                v[ai] -= qt * v[bi];
                row_add(&mut b.entries, ai, bi, -qt);
                // (x, y) -> (y, -x)
                let (x, y) = (v[ai], v[bi]);
                v[ai] = y;
                v[bi] = -x;
                for k in 0..n {
                    let (ra, rb) = (b.entries[ai * n + k], b.entries[bi * n + k]);
                    b.entries[ai * n + k] = rb;
                    b.entries[bi * n + k] = -ra;
                }
            }
        }
        // all b-coordinates vanish; Euclid across the a-block into a_1
        if g > 0 && v[0] == 0 {
            if let Some(j) = (1..g).find(|&j| v[j] != 0) {
                swap_pairs(&mut v, &mut b.entries, g, 0, j);
            }
        }
        for j in 1..g {
            while v[j] != 0 {
                let qt = v[0] / v[j];
                // x_0 -= q x_j, paired with y_j += q y_0
                v[0] -= qt * v[j];
                row_add(&mut b.entries, 0, j, -qt);
                row_add(&mut b.entries, g + j, g, qt);
                swap_pairs(&mut v, &mut b.entries, g, 0, j);
            }
        }
        if g > 0 && v[0] == -1 {
            v[0] = 1;
            for k in 0..n {
                b.entries[k] = -b.entries[k];
                b.entries[g * n + k] = -b.entries[g * n + k];
            }
        }
        let b = SpMatrix::new(g, b.entries)?;
        debug_assert_eq!(b.apply(l)?, H1Vector::basis(l.lattice(), 0));
        Ok(b)
    }
}

fn swap_pairs(v: &mut [i64], m: &mut [i64], g: usize, i: usize, j: usize) {
    let n = 2 * g;
    v.swap(i, j);
    v.swap(g + i, g + j);
    for k in 0..n {
        m.swap(i * n + k, j * n + k);
        m.swap((g + i) * n + k, (g + j) * n + k);
    }
}

/// `Λ*M`: the induced action on the exterior algebra (columns are images).
pub fn ext_power_action(m: &SpMatrix, omega: &ExtElement) -> Result<ExtElement> {
    m.lattice().check(omega.genus)?;
    m.as_lattice_map().apply_ext(omega)
}

/// Dense matrix over `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    actual: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(QMatrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.data[r * other.cols + c] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .fold(Rational::zero(), |a, b| a + b)
    }
}

/// A degree-preserving endomorphism of a `Z`-graded space, stored as one
/// square block per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedEndomorphism {
    blocks: BTreeMap<i64, QMatrix>,
}

impl GradedEndomorphism {
    pub fn new(blocks: BTreeMap<i64, QMatrix>) -> Result<Self> {
        for m in blocks.values() {
            if m.rows != m.cols {
                return Err(Error::DimensionMismatch {
                    expected: m.rows,
                    actual: m.cols,
                });
            }
        }
        Ok(GradedEndomorphism { blocks })
    }

    /// Splits a square matrix on a graded basis into its degree blocks,
    /// rejecting entries that connect different degrees.
    pub fn from_matrix(m: &QMatrix, degrees: &[i64]) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::DimensionMismatch {
                expected: m.rows,
                actual: m.cols,
            });
        }
        if degrees.len() != m.rows {
            return Err(Error::DimensionMismatch {
                expected: m.rows,
                actual: degrees.len(),
            });
        }
        for r in 0..m.rows {
            for c in 0..m.cols {
                if degrees[r] != degrees[c] && !m.get(r, c).is_zero() {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({r},{c}) maps degree {} to degree {}",
                        degrees[c], degrees[r]
                    )));
                }
            }
        }
        let mut index: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, &d) in degrees.iter().enumerate() {
            index.entry(d).or_default().push(i);
        }
        let blocks = index
            .into_iter()
            .map(|(d, idx)| {
                let mut b = QMatrix::zeros(idx.len(), idx.len());
                for (bi, &r) in idx.iter().enumerate() {
                    for (bj, &c) in idx.iter().enumerate() {
                        b.set(bi, bj, m.get(r, c).clone());
                    }
                }
                (d, b)
            })
            .collect();
        Ok(GradedEndomorphism { blocks })
    }

    pub fn blocks(&self) -> &BTreeMap<i64, QMatrix> {
        &self.blocks
    }

    pub fn compose(&self, other: &GradedEndomorphism) -> Result<GradedEndomorphism> {
        let mut blocks = BTreeMap::new();
        for (d, a) in &self.blocks {
            match other.blocks.get(d) {
                Some(b) => {
                    blocks.insert(*d, a.mul(b)?);
                }
                None if a.rows == 0 => {}
                None => {
                    return Err(Error::InvalidParameter(format!(
                        "degree {d} missing from right factor"
                    )))
                }
            }
        }
        GradedEndomorphism::new(blocks)
    }

    pub fn supertrace(&self) -> Rational {
        supertrace(self)
    }
}

/// `Σ_k (−1)^k tr(F | degree k)`.
pub fn supertrace(f: &GradedEndomorphism) -> Rational {
    let mut acc = Rational::zero();
    for (d, m) in &f.blocks {
        let t = m.trace();
        if d.rem_euclid(2) == 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    acc
}

/// `Λ*M` on the whole exterior algebra as a graded endomorphism.
pub fn exterior_endomorphism(m: &SpMatrix) -> Result<GradedEndomorphism> {
    let lattice = m.lattice();
    let mut blocks = BTreeMap::new();
    for k in 0..=lattice.rank() {
        let basis: Vec<Subset> = k_subsets(lattice.rank(), k)
            .iter()
            .map(|s| Subset::from_indices(s))
            .collect();
        let mut block = QMatrix::zeros(basis.len(), basis.len());
        for (c, s) in basis.iter().enumerate() {
            let image = ext_power_action(m, &ExtElement::monomial(lattice, *s))?;
            for (r, t) in basis.iter().enumerate() {
                block.set(r, c, image.coeff(*t));
            }
        }
        blocks.insert(k as i64, block);
    }
    GradedEndomorphism::new(blocks)
}
