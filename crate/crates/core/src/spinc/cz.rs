//! Conley–Zehnder index of a sampled path of symplectic matrices.
//!
//! The graph of `Ψ(t)` is a Lagrangian in `(R^{2n} ⊕ R^{2n}, (−ω) ⊕ ω)`. Writing
//! an orthonormal frame of it as a unitary `U` and the diagonal likewise as `V`,
//! the symmetric unitary `W = Vᴴ U Uᵀ V̄` has eigenvalue 1 exactly where the graph
//! meets the diagonal, i.e. where `Ψ(t)` has eigenvalue 1. The index is the
//! spectral flow of the eigenvalues of `W` through 1, with half weight at the
//! start where all of them sit at 1.

use nalgebra::{Complex, DMatrix, Schur};

use crate::error::{Error, Result};

/// Largest eigenvalue-angle change tolerated between consecutive samples.
pub const MAX_STEP: f64 = 0.5;

const SYMPLECTIC_TOL: f64 = 1e-6;
const DEGENERATE_TOL: f64 = 1e-9;

fn standard_j(dim: usize) -> DMatrix<f64> {
    let n = dim / 2;
    let mut j = DMatrix::zeros(dim, dim);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// A path `[0,1] → Sp(2n, R)` given by samples, starting at the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticPath {
    samples: Vec<DMatrix<f64>>,
}

impl SymplecticPath {
    pub fn new(samples: Vec<DMatrix<f64>>) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::InvalidParameter("path has no samples".to_string()))?;
        let dim = first.nrows();
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "samples must be square of positive even size, got {dim}"
            )));
        }
        let j = standard_j(dim);
        for (k, m) in samples.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::InvalidParameter(format!(
                    "sample {k} is {}x{}, expected {dim}x{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!("sample {k} is not finite")));
            }
            let scale = m.amax().max(1.0);
            let defect = (m.transpose() * &j * m - &j).amax();
            if defect > SYMPLECTIC_TOL * scale * scale {
                return Err(Error::Inconsistent(format!(
                    "sample {k} is not symplectic (defect {defect:e})"
                )));
            }
        }
        let start = (first - DMatrix::identity(dim, dim)).amax();
        if start > SYMPLECTIC_TOL {
            return Err(Error::Inconsistent(format!(
                "path must start at the identity (distance {start:e})"
            )));
        }
        Ok(SymplecticPath { samples })
    }

    pub fn from_rows(samples: &[Vec<Vec<f64>>]) -> Result<Self> {
        let mats = samples
            .iter()
            .enumerate()
            .map(|(k, rows)| {
                let r = rows.len();
                if rows.iter().any(|row| row.len() != r) {
                    return Err(Error::InvalidParameter(format!("sample {k} is not square")));
                }
                Ok(DMatrix::from_fn(r, r, |i, j| rows[i][j]))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mats)
    }

    /// Samples `t ↦ f(t)` at `steps + 1` evenly spaced times.
    pub fn sample<F>(steps: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> DMatrix<f64>,
    {
        let steps = steps.max(1);
        Self::new((0..=steps).map(|k| f(k as f64 / steps as f64)).collect())
    }

    pub fn dim(&self) -> usize {
        self.samples[0].nrows()
    }

    pub fn samples(&self) -> &[DMatrix<f64>] {
        &self.samples
    }

    pub fn end(&self) -> &DMatrix<f64> {
        self.samples.last().expect("nonempty")
    }

    /// Block-diagonal sum of two paths with the same number of samples.
    pub fn direct_sum(&self, other: &SymplecticPath) -> Result<SymplecticPath> {
        if self.samples.len() != other.samples.len() {
            return Err(Error::InvalidParameter(format!(
                "direct sum needs equal sample counts, got {} and {}",
                self.samples.len(),
                other.samples.len()
            )));
        }
        let (a, b) = (self.dim() / 2, other.dim() / 2);
        let n = a + b;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(x, y)| {
                // interleave so the result is symplectic for the standard form
                let mut m = DMatrix::zeros(2 * n, 2 * n);
                let place = |i: usize, off: usize, half: usize| {
                    if i < half {
                        off + i
                    } else {
                        n + off + (i - half)
                    }
                };
                for i in 0..2 * a {
                    for j in 0..2 * a {
                        m[(place(i, 0, a), place(j, 0, a))] = x[(i, j)];
                    }
                }
                for i in 0..2 * b {
                    for j in 0..2 * b {
                        m[(place(i, a, b), place(j, a, b))] = y[(i, j)];
                    }
                }
                m
            })
            .collect();
        SymplecticPath::new(samples)
    }
}

/// Outcome of [`conley_zehnder`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CzIndex {
    pub index: i64,
    /// Sign of `det(I − Ψ(1))`.
    pub endpoint_sign: i8,
    /// `(−1)^{n − CZ}` equals the endpoint sign.
    pub parity_consistent: bool,
    /// Largest eigenvalue-angle change between consecutive samples.
    pub max_step: f64,
}

/// Unitary frame of the graph of `m`, in complex coordinates `x + iy` where
/// `(x, y)` are Darboux coordinates for `(−ω) ⊕ ω`.
fn graph_frame(m: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    let d = m.nrows();
    let n = d / 2;
    let mut graph = DMatrix::zeros(2 * d, d);
    graph
        .view_mut((0, 0), (d, d))
        .copy_from(&DMatrix::identity(d, d));
    graph.view_mut((d, 0), (d, d)).copy_from(m);
    let q = graph.qr().q();
    // rows: p_a = 0..n, p_b = n..2n, q_a = 2n..3n, q_b = 3n..4n
    // x = (p_b, q_a), y = (p_a, q_b)
    DMatrix::from_fn(d, d, |r, c| {
        let (xr, yr) = if r < n {
            (n + r, r)
        } else {
            (d + (r - n), d + n + (r - n))
        };
        Complex::new(q[(xr, c)], q[(yr, c)])
    })
}

fn souriau(u: &DMatrix<Complex<f64>>) -> DMatrix<Complex<f64>> {
    u * u.transpose()
}

fn eigen_angles(w: &DMatrix<Complex<f64>>) -> Result<Vec<f64>> {
    let schur = Schur::try_new(w.clone(), 1e-13, 10_000)
        .ok_or_else(|| Error::Resolution("eigenvalue iteration did not converge".to_string()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)].arg()).collect())
}

fn wrap(x: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut y = x.rem_euclid(tau);
    if y > std::f64::consts::PI {
        y -= tau;
    }
    y
}

/// Matches new eigenvalue angles to the previous lifts, keeping cyclic order.
fn advance(lifts: &mut [f64], angles: &[f64]) -> f64 {
    let tau = std::f64::consts::TAU;
    let m = lifts.len();
    let mut prev: Vec<usize> = (0..m).collect();
    prev.sort_by(|&a, &b| {
        lifts[a]
            .rem_euclid(tau)
            .total_cmp(&lifts[b].rem_euclid(tau))
    });
    let mut next: Vec<f64> = angles.iter().map(|a| a.rem_euclid(tau)).collect();
    next.sort_by(f64::total_cmp);
    let mut best: Option<(f64, usize)> = None;
    for s in 0..m {
        let cost = (0..m)
            .map(|i| wrap(next[(i + s) % m] - lifts[prev[i]]).abs())
            .fold(0.0, f64::max);
        if best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, s));
        }
    }
    let (cost, s) = best.unwrap_or((0.0, 0));
    for i in 0..m {
        let k = prev[i];
        lifts[k] += wrap(next[(i + s) % m] - lifts[k]);
    }
    cost
}

/// Conley–Zehnder index of a path starting at the identity with
/// nondegenerate endpoint.
///
/// Normalized so that `t ↦ exp(πt J_0)` in `Sp(2)` has index 1 and
/// hyperbolic paths have index 0.
pub fn conley_zehnder(path: &SymplecticPath) -> Result<CzIndex> {
    let d = path.dim();
    let n = d / 2;
    let end = path.end();
    let det = (DMatrix::identity(d, d) - end).determinant();
    let scale = end.amax().max(1.0).powi(d as i32);
    if det.abs() <= DEGENERATE_TOL * scale {
        return Err(Error::DegenerateEndpoint(det.abs()));
    }
    let v = graph_frame(&DMatrix::identity(d, d));
    let v_adj = v.adjoint();
    let v_bar = v.map(|z| z.conj());
    let rel = |m: &DMatrix<f64>| &v_adj * souriau(&graph_frame(m)) * &v_bar;

    let mut lifts = vec![0.0; d];
    let mut max_step: f64 = 0.0;
    for (k, m) in path.samples().iter().enumerate().skip(1) {
        let angles = eigen_angles(&rel(m))?;
        let step = advance(&mut lifts, &angles);
        if step > MAX_STEP {
            return Err(Error::Resolution(format!(
                "eigenvalue angle jumps by {step:.3} rad at sample {k}; sample the path more finely"
            )));
        }
        max_step = max_step.max(step);
    }
    let tau = std::f64::consts::TAU;
    let mut floors: i64 = 0;
    for &theta in &lifts {
        let r = theta / tau;
        if (r - r.round()).abs() < 1e-7 {
            return Err(Error::DegenerateEndpoint(det.abs()));
        }
        floors += r.floor() as i64;
    }
    // each branch contributes floor(θ/2π) + 1/2; there are 2n branches
    let index = floors + n as i64;
    let endpoint_sign: i8 = if det > 0.0 { 1 } else { -1 };
    let parity_sign: i8 = if (n as i64 - index).rem_euclid(2) == 0 {
        1
    } else {
        -1
    };
    Ok(CzIndex {
        index,
        endpoint_sign,
        parity_consistent: parity_sign == endpoint_sign,
        max_step,
    })
}
