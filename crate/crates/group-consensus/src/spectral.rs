//! Dense nonsymmetric eigenvalue computation and the spectral quantities the
//! consensus theorems consume: zero-eigenvalue counts, the minimum nonzero
//! real part of the full Laplacian spectrum, and Hurwitz checks of the
//! per-eigenvalue closed-loop blocks.
//!
//! One zero-classification tolerance is used everywhere:
//! `1e-8 * (1 + inf_norm)`, overridable through the `GCL_TOL_ZERO`
//! environment variable (absolute value).

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Default relative pairing tolerance for complex eigenvalue multisets.
pub const PAIRING_TOLERANCE: f64 = 1e-6;

/// The full complex spectrum of a real square matrix, sorted by (Re, Im).
#[derive(Debug, Clone)]
pub struct Spectrum {
    values: Vec<C64>,
    source_dim: usize,
    zero_tolerance: f64,
}

pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Zero-classification tolerance for a matrix of the given infinity norm.
pub fn zero_tolerance(inf_norm: f64) -> f64 {
    if let Ok(text) = std::env::var("GCL_TOL_ZERO") {
        if let Ok(v) = text.trim().parse::<f64>() {
            if v > 0.0 {
                return v;
            }
        }
    }
    1e-8 * (1.0 + inf_norm)
}

fn schur_iteration_budget(dim: usize) -> usize {
    200 * dim + 1000
}

/// Full complex spectrum of a real matrix via the QR/Schur iteration.
/// Non-convergence surfaces as an explicit error.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Spectrum> {
    let dim = m.nrows();
    if dim != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("matrix has nonfinite entries".into()));
    }
    let tol = zero_tolerance(inf_norm(m));
    if dim == 0 {
        return Ok(Spectrum {
            values: Vec::new(),
            source_dim: 0,
            zero_tolerance: tol,
        });
    }
    if dim == 1 {
        return Ok(Spectrum {
            values: vec![C64::new(m[(0, 0)], 0.0)],
            source_dim: 1,
            zero_tolerance: tol,
        });
    }
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, schur_iteration_budget(dim))
        .ok_or(Error::EigNonConvergence(dim))?;
    let mut values: Vec<C64> = schur.complex_eigenvalues().iter().copied().collect();
    sort_complex(&mut values);
    Ok(Spectrum {
        values,
        source_dim: dim,
        zero_tolerance: tol,
    })
}

/// Spectrum of a complex matrix via the complex Schur form (diagonal of T).
pub fn complex_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    let dim = m.nrows();
    if dim != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if dim == 0 {
        return Ok(Vec::new());
    }
    if dim == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, schur_iteration_budget(dim))
        .ok_or(Error::EigNonConvergence(dim))?;
    let (_, t) = schur.unpack();
    let mut values: Vec<C64> = (0..dim).map(|i| t[(i, i)]).collect();
    sort_complex(&mut values);
    Ok(values)
}

pub fn sort_complex(values: &mut [C64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

impl Spectrum {
    pub fn from_values(mut values: Vec<C64>, zero_tolerance: f64) -> Self {
        sort_complex(&mut values);
        let source_dim = values.len();
        Spectrum {
            values,
            source_dim,
            zero_tolerance,
        }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn zero_tolerance(&self) -> f64 {
        self.zero_tolerance
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of eigenvalues with |lambda| within the zero tolerance.
    pub fn zero_eig_count(&self) -> usize {
        self.values
            .iter()
            .filter(|v| v.norm() <= self.zero_tolerance)
            .count()
    }

    /// Minimum real part over eigenvalues not classified as zero. Errors when
    /// every eigenvalue is zero.
    pub fn min_nonzero_real_part(&self) -> Result<f64> {
        self.values
            .iter()
            .filter(|v| v.norm() > self.zero_tolerance)
            .map(|v| v.re)
            .fold(None, |acc: Option<f64>, re| {
                Some(acc.map_or(re, |a| a.min(re)))
            })
            .ok_or_else(|| Error::Numerical("spectrum has no nonzero eigenvalue".into()))
    }

    /// Minimum real part over all eigenvalues; +inf for the empty spectrum
    /// (a 0x0 reduced Laplacian is trivially feasible).
    pub fn min_real_part(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.re)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_real_part(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Greedy complex multiset pairing: sort both sides by (Re, Im) and match
/// each left value to the nearest unused right value. Returns the worst
/// pairing distance, or None when the sizes differ.
pub fn pairing_distance(a: &[C64], b: &[C64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut left = a.to_vec();
    let mut right = b.to_vec();
    sort_complex(&mut left);
    sort_complex(&mut right);
    let mut used = vec![false; right.len()];
    let mut worst = 0.0f64;
    for la in &left {
        let mut best: Option<(usize, f64)> = None;
        for (idx, rb) in right.iter().enumerate() {
            if used[idx] {
                continue;
            }
            let d = (la - rb).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((idx, d));
            }
        }
        let (idx, d) = best?;
        used[idx] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

/// Multiset equality within an absolute tolerance.
pub fn multisets_match(a: &[C64], b: &[C64], tol: f64) -> bool {
    pairing_distance(a, b).is_some_and(|d| d <= tol)
}

/// Stability verdict for `I (x) A - delta Lhat (x) B K` by the Kronecker
/// spectral mapping: for every eigenvalue of the reduced Laplacian, the block
/// `A - delta * lambda * B K` must be Hurwitz. Returns the verdict and the
/// stability margin (minus the worst real part; +inf when the spectrum is
/// empty).
pub fn hurwitz_check(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    k: &DMatrix<f64>,
    delta: f64,
    lhat_spectrum: &Spectrum,
) -> Result<(bool, f64)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch("A must be square".into()));
    }
    if b.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "B has {} rows, expected {}",
            b.nrows(),
            n
        )));
    }
    if k.nrows() != b.ncols() || k.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "K is {}x{}, expected {}x{}",
            k.nrows(),
            k.ncols(),
            b.ncols(),
            n
        )));
    }

    let bk = b * k;
    let a_c = a.map(|x| C64::new(x, 0.0));
    let bk_c = bk.map(|x| C64::new(x, 0.0));

    let mut worst_re = f64::NEG_INFINITY;
    for &lambda in lhat_spectrum.values() {
        let block = &a_c - &bk_c * (lambda * C64::new(delta, 0.0));
        let eigs = complex_eigenvalues(&block)?;
        for e in eigs {
            worst_re = worst_re.max(e.re);
        }
    }
    if worst_re == f64::NEG_INFINITY {
        // Empty reduced spectrum: nothing transversal to stabilize.
        return Ok((true, f64::INFINITY));
    }
    Ok((worst_re < 0.0, -worst_re))
}
