//! Riccati-based gain design and the two coupling-strength thresholds.
//!
//! The algebraic Riccati equation `PA + A'P - PBB'P = -Q` is solved through
//! the stable invariant subspace of the 2n x 2n Hamiltonian
//! `[[A, -BB'], [-Q, -A']]`: complex Schur form, unitary swaps reordering the
//! stable eigenvalues to the leading block, then `P = X2 X1^-1` from the
//! leading Schur vectors.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::graph::ClusteredDigraph;
use crate::reduction;
use crate::spectral::{self, C64, Spectrum};

/// Relative Frobenius-norm bound on the Riccati residual.
pub const RICCATI_RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Agent dynamics (A, B) with the Riccati weight Q, validated at
/// construction: (A, B) stabilizable by the PBH test, Q symmetric positive
/// definite.
#[derive(Debug, Clone)]
pub struct Dynamics {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    q: DMatrix<f64>,
}

impl Dynamics {
    /// Dynamics with the default weight Q = I.
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let q = DMatrix::identity(n, n);
        Self::with_weight(a, b, q)
    }

    pub fn with_weight(a: DMatrix<f64>, b: DMatrix<f64>, q: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch("A must be square".into()));
        }
        if b.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows, A is {}x{}",
                b.nrows(),
                n,
                n
            )));
        }
        if b.ncols() == 0 {
            return Err(Error::DimensionMismatch("B must have at least one column".into()));
        }
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Q is {}x{}, expected {}x{}",
                q.nrows(),
                q.ncols(),
                n,
                n
            )));
        }
        let sym_defect = (&q - q.transpose()).abs().max();
        if sym_defect > 1e-10 * (1.0 + spectral::inf_norm(&q)) {
            return Err(Error::InvalidScenario("Q is not symmetric".into()));
        }
        let q_sym = (&q + q.transpose()) * 0.5;
        let min_eig = q_sym
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig <= 0.0 {
            return Err(Error::InvalidScenario(format!(
                "Q must be positive definite (min eigenvalue {:.3e})",
                min_eig
            )));
        }
        check_stabilizable(&a, &b)?;
        Ok(Dynamics { a, b, q: q_sym })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }
}

/// PBH test: every eigenvalue of A in the closed right half-plane must keep
/// `[A - lambda I, B]` at full row rank.
fn check_stabilizable(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<()> {
    let n = a.nrows();
    let scale = spectral::inf_norm(a) + spectral::inf_norm(b) + 1.0;
    let eigs = spectral::eigenvalues(a)?;
    for &lambda in eigs.values() {
        if lambda.re < -1e-9 * scale {
            continue;
        }
        let mut pencil = DMatrix::<C64>::zeros(n, n + b.ncols());
        for r in 0..n {
            for c in 0..n {
                pencil[(r, c)] = C64::new(a[(r, c)], 0.0);
            }
            pencil[(r, r)] -= lambda;
            for c in 0..b.ncols() {
                pencil[(r, n + c)] = C64::new(b[(r, c)], 0.0);
            }
        }
        let sv = pencil.svd(false, false).singular_values;
        let smallest = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if smallest <= 1e-9 * scale {
            return Err(Error::NotStabilizable(format!(
                "lambda = {:.6} + {:.6}i",
                lambda.re, lambda.im
            )));
        }
    }
    Ok(())
}

/// Swaps adjacent diagonal entries (k, k+1) of a complex upper-triangular T,
/// accumulating the unitary into Q.
fn swap_schur_entries(t: &mut DMatrix<C64>, q: &mut DMatrix<C64>, k: usize) {
    let a = t[(k, k)];
    let b = t[(k, k + 1)];
    let c = t[(k + 1, k + 1)];
    // Eigenvector of [[a, b], [0, c]] for eigenvalue c.
    let v1 = b;
    let v2 = c - a;
    let norm = (v1.norm_sqr() + v2.norm_sqr()).sqrt();
    if norm == 0.0 {
        return; // equal eigenvalues, already in either order
    }
    let u1 = v1 / norm;
    let u2 = v2 / norm;
    let g = DMatrix::<C64>::from_row_slice(2, 2, &[u1, -u2.conj(), u2, u1.conj()]);
    let gh = g.adjoint();

    let cols = t.columns(k, 2).clone_owned();
    t.columns_mut(k, 2).copy_from(&(&cols * &g));
    let rows = t.rows(k, 2).clone_owned();
    t.rows_mut(k, 2).copy_from(&(&gh * &rows));
    t[(k + 1, k)] = C64::new(0.0, 0.0);

    let qcols = q.columns(k, 2).clone_owned();
    q.columns_mut(k, 2).copy_from(&(&qcols * &g));
}

/// Stabilizing solution of `PA + A'P - PBB'P = -Q`.
/// Returns P (symmetrized) and the Frobenius norm of the residual.
pub fn solve_riccati(dyn_: &Dynamics) -> Result<(DMatrix<f64>, f64)> {
    let n = dyn_.state_dim();
    let a = dyn_.a();
    let b = dyn_.b();
    let q = dyn_.q();

    let s = b * b.transpose();
    let mut hamiltonian = DMatrix::<f64>::zeros(2 * n, 2 * n);
    hamiltonian.view_mut((0, 0), (n, n)).copy_from(a);
    hamiltonian.view_mut((0, n), (n, n)).copy_from(&(-&s));
    hamiltonian.view_mut((n, 0), (n, n)).copy_from(&(-q));
    hamiltonian
        .view_mut((n, n), (n, n))
        .copy_from(&(-a.transpose()));

    let ham_c = hamiltonian.map(|x| C64::new(x, 0.0));
    let schur = ham_c
        .try_schur(f64::EPSILON, 400 * n + 2000)
        .ok_or(Error::EigNonConvergence(2 * n))?;
    let (mut qm, mut tm) = schur.unpack();

    // Selection sort on the Schur diagonal: stable eigenvalues first.
    let dim = 2 * n;
    for target in 0..n {
        let mut p = target;
        while p < dim && tm[(p, p)].re >= 0.0 {
            p += 1;
        }
        if p == dim {
            return Err(Error::Numerical(format!(
                "Hamiltonian has only {} stable eigenvalues, expected {}; \
                 the Riccati equation has no stabilizing solution",
                target, n
            )));
        }
        while p > target {
            swap_schur_entries(&mut tm, &mut qm, p - 1);
            p -= 1;
        }
    }

    let x1 = qm.view((0, 0), (n, n)).clone_owned();
    let x2 = qm.view((n, 0), (n, n)).clone_owned();
    let x1_inv_applied = x1
        .lu()
        .solve(&DMatrix::<C64>::identity(n, n))
        .ok_or_else(|| Error::Numerical("stable subspace basis X1 is singular".into()))?;
    let p_c = &x2 * x1_inv_applied;

    let p_raw = p_c.map(|z| z.re);
    let p = (&p_raw + p_raw.transpose()) * 0.5;

    let residual = &p * a + a.transpose() * &p - &p * &s * &p + q;
    let residual_norm = residual.norm();
    let bound = RICCATI_RESIDUAL_TOLERANCE * q.norm();
    if residual_norm > bound {
        return Err(Error::Numerical(format!(
            "Riccati residual {:.3e} exceeds {:.3e}",
            residual_norm, bound
        )));
    }
    if p.clone().cholesky().is_none() {
        return Err(Error::Numerical(
            "Riccati solution is not positive definite".into(),
        ));
    }
    Ok((p, residual_norm))
}

/// K = B'P.
pub fn gain(p: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if p.nrows() != p.ncols() || b.nrows() != p.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "P is {}x{}, B is {}x{}",
            p.nrows(),
            p.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(b.transpose() * p)
}

/// The two coupling-strength thresholds of a feasible topology.
#[derive(Debug, Clone, Copy)]
pub struct CouplingThresholds {
    /// 1 / (2 min Re lambda(Lhat)): group consensus. Zero when the reduced
    /// matrix is empty (all clusters are singletons: any delta > 0 works).
    pub delta_group: f64,
    /// 1 / (2 lambda_min_nonzero(L)): the Theorem 3 consensus pattern.
    pub delta_pattern: f64,
}

/// Computes both thresholds from the graph spectra. Errors when the topology
/// is infeasible (the reduced matrix has an eigenvalue at zero).
pub fn coupling_thresholds(g: &ClusteredDigraph) -> Result<CouplingThresholds> {
    let report = reduction::reduced_laplacian(g)?;
    let lhat_spec = &report.lhat_spectrum;

    let delta_group = if lhat_spec.is_empty() {
        0.0
    } else {
        let min_re = lhat_spec.min_real_part();
        if lhat_spec.zero_eig_count() > 0 || min_re <= 0.0 {
            return Err(Error::Infeasible(format!(
                "min Re lambda(Lhat) = {:.3e} is not positive",
                min_re
            )));
        }
        1.0 / (2.0 * min_re)
    };

    let full_spec = spectral::eigenvalues(g.laplacian().matrix())?;
    let delta_pattern = match full_spec.min_nonzero_real_part() {
        Ok(lambda_lower) => 1.0 / (2.0 * lambda_lower),
        // Single agent: the Laplacian is 1x1 zero, any delta works.
        Err(_) => 0.0,
    };

    Ok(CouplingThresholds {
        delta_group,
        delta_pattern,
    })
}

/// Bundle of the synthesized controller and thresholds.
#[derive(Debug, Clone)]
pub struct ControlDesign {
    pub p: DMatrix<f64>,
    pub k: DMatrix<f64>,
    pub residual_norm: f64,
    pub thresholds: CouplingThresholds,
}

pub fn design(g: &ClusteredDigraph, dyn_: &Dynamics) -> Result<ControlDesign> {
    let (p, residual_norm) = solve_riccati(dyn_)?;
    let k = gain(&p, dyn_.b())?;
    let thresholds = coupling_thresholds(g)?;
    Ok(ControlDesign {
        p,
        k,
        residual_norm,
        thresholds,
    })
}

/// Numerical transcription of the proof's Lyapunov chain: for each eigenvalue
/// of the reduced Laplacian, the Hermitian part of
/// `(A - delta lambda BK)* P + P (A - delta lambda BK) + Q` must be negative
/// semidefinite. Returns the worst eigenvalue found (<= tolerance when the
/// chain holds).
pub fn lyapunov_chain_excess(
    dyn_: &Dynamics,
    p: &DMatrix<f64>,
    k: &DMatrix<f64>,
    delta: f64,
    lhat_spectrum: &Spectrum,
) -> Result<f64> {
    let a_c = dyn_.a().map(|x| C64::new(x, 0.0));
    let bk = dyn_.b() * k;
    let bk_c = bk.map(|x| C64::new(x, 0.0));
    let p_c = p.map(|x| C64::new(x, 0.0));
    let q_c = dyn_.q().map(|x| C64::new(x, 0.0));

    let mut worst = f64::NEG_INFINITY;
    for &lambda in lhat_spectrum.values() {
        let acl = &a_c - &bk_c * (lambda * Complex::new(delta, 0.0));
        let lyap = acl.adjoint() * &p_c + &p_c * &acl + &q_c;
        // Hermitian by construction up to rounding; symmetrize before eigen.
        let herm = (&lyap + lyap.adjoint()) * C64::new(0.5, 0.0);
        let max_eig = herm
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(max_eig);
    }
    if worst == f64::NEG_INFINITY {
        worst = 0.0; // empty spectrum: nothing to check
    }
    Ok(worst)
}
