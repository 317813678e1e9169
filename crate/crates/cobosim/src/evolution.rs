//! Exact time evolution on an invariant block.
//!
//! The block matrix is diagonalized once by a cyclic complex Jacobi sweep;
//! U(t) = V·e^{−iΛt}·V† then evaluates at any time without stepping error.
//! A scaled-and-squared Taylor expansion of e^{−iHt} serves as an independent
//! cross-check of the spectral propagator.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockBlock, OccupationVector, StateVector};
use crate::hamiltonian::HermitianOperator;
use crate::tol;

/// Eigenvalues in ascending order and matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    block: Arc<FockBlock>,
    values: Vec<f64>,
    vectors: Vec<Vec<Complex64>>,
}

impl EigenSystem {
    pub fn block(&self) -> &Arc<FockBlock> {
        &self.block
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvector k over the block basis.
    pub fn vector(&self, k: usize) -> &[Complex64] {
        &self.vectors[k]
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

fn off_diagonal_norm(h: &[Vec<Complex64>]) -> f64 {
    let dim = h.len();
    let mut sum = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                sum += h[i][j].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Diagonalizes by cyclic Jacobi rotations.
///
/// Each rotation zeroes one off-diagonal pair exactly; the off-diagonal
/// Frobenius mass decreases monotonically and the sweep stops once it falls
/// below [`tol::JACOBI_OFF`] relative to the matrix norm.
pub fn eigendecompose(op: &HermitianOperator) -> Result<EigenSystem> {
    let dim = op.dim();
    // symmetrized working copy; assembly produces this exactly already
    let mut h: Vec<Vec<Complex64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| (op.entry(i, j) + op.entry(j, i).conj()) * 0.5)
                .collect()
        })
        .collect();
    let mut v: Vec<Vec<Complex64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();
    let threshold = tol::JACOBI_OFF * op.frobenius_norm();
    let mut sweeps = 0;
    while off_diagonal_norm(&h) > threshold {
        if sweeps == tol::JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let gamma = h[p][q];
                let g = gamma.norm();
                if g == 0.0 {
                    continue;
                }
                let phase = gamma / g;
                let alpha = h[p][p].re;
                let beta = h[q][q].re;
                let theta = (beta - alpha) / (2.0 * g);
                // smaller-magnitude root of t² − 2θt − 1 = 0
                let sgn = if theta < 0.0 { -1.0 } else { 1.0 };
                let t = -sgn / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = phase * (t * c);
                // rows: h ← G†h
                for j in 0..dim {
                    let hp = h[p][j];
                    let hq = h[q][j];
                    h[p][j] = c * hp + s * hq;
                    h[q][j] = -s.conj() * hp + c * hq;
                }
                // columns: h ← hG, v ← vG
                for j in 0..dim {
                    let hp = h[j][p];
                    let hq = h[j][q];
                    h[j][p] = c * hp + s.conj() * hq;
                    h[j][q] = -s * hp + c * hq;
                    let vp = v[j][p];
                    let vq = v[j][q];
                    v[j][p] = c * vp + s.conj() * vq;
                    v[j][q] = -s * vp + c * vq;
                }
                h[p][q] = Complex64::new(0.0, 0.0);
                h[q][p] = Complex64::new(0.0, 0.0);
                h[p][p].im = 0.0;
                h[q][q].im = 0.0;
            }
        }
        sweeps += 1;
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        h[a][a]
            .re
            .partial_cmp(&h[b][b].re)
            .expect("eigenvalue is NaN")
            .then(a.cmp(&b))
    });
    let values: Vec<f64> = order.iter().map(|&k| h[k][k].re).collect();
    let mut vectors = Vec::with_capacity(dim);
    for &k in &order {
        let mut col: Vec<Complex64> = (0..dim).map(|i| v[i][k]).collect();
        // fix the gauge: largest component made real positive
        let mut best = 0;
        for (i, a) in col.iter().enumerate() {
            if a.norm_sqr() > col[best].norm_sqr() {
                best = i;
            }
        }
        let mag = col[best].norm();
        if mag > 0.0 {
            let rot = col[best].conj() / mag;
            for a in &mut col {
                *a *= rot;
            }
            col[best] = Complex64::new(col[best].re, 0.0);
        }
        vectors.push(col);
    }
    Ok(EigenSystem { block: op.block().clone(), values, vectors })
}

/// ψ(t) = V·e^{−iΛt}·V†·ψ(0). At t = 0 the propagator is the identity and
/// the input amplitudes are returned unchanged.
pub fn evolve(eig: &EigenSystem, psi: &StateVector, t: f64) -> Result<StateVector> {
    if eig.block.as_ref() != psi.block().as_ref() {
        return Err(Error::BlockMismatch);
    }
    if t == 0.0 {
        return Ok(psi.clone());
    }
    let dim = eig.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for k in 0..dim {
        let vk = &eig.vectors[k];
        let overlap: Complex64 = vk
            .iter()
            .zip(psi.amplitudes())
            .map(|(v, a)| v.conj() * a)
            .sum();
        let rot = Complex64::from_polar(1.0, -eig.values[k] * t) * overlap;
        for i in 0..dim {
            out[i] += vk[i] * rot;
        }
    }
    StateVector::new(eig.block.clone(), out)
}

/// |⟨occ|ψ⟩|²; zero when the occupation lies outside the state's block.
pub fn probability(psi: &StateVector, occ: &OccupationVector) -> f64 {
    psi.amplitude(occ).norm_sqr()
}

/// Probability of detecting `stay` at time t, starting from `init`.
pub fn null_check(
    eig: &EigenSystem,
    init: &StateVector,
    stay: &OccupationVector,
    t: f64,
) -> Result<f64> {
    Ok(probability(&evolve(eig, init, t)?, stay))
}

/// Detection probabilities for a set of outcomes over a time grid.
#[derive(Debug, Clone)]
pub struct ProbabilityTrace {
    pub times: Vec<f64>,
    pub outcomes: Vec<OccupationVector>,
    /// probs[t][o] = probability of outcomes[o] at times[t].
    pub probs: Vec<Vec<f64>>,
}

pub fn trace(
    eig: &EigenSystem,
    init: &StateVector,
    outcomes: &[OccupationVector],
    times: &[f64],
) -> Result<ProbabilityTrace> {
    let mut probs = Vec::with_capacity(times.len());
    for &t in times {
        let psi = evolve(eig, init, t)?;
        probs.push(outcomes.iter().map(|o| probability(&psi, o)).collect());
    }
    Ok(ProbabilityTrace {
        times: times.to_vec(),
        outcomes: outcomes.to_vec(),
        probs,
    })
}

fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let dim = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i][k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// e^{−iHt}ψ by scaled-and-squared Taylor series.
///
/// Independent of [`eigendecompose`]; used only to cross-check it.
pub fn taylor_evolve(op: &HermitianOperator, psi: &StateVector, t: f64) -> Result<StateVector> {
    if op.block().as_ref() != psi.block().as_ref() {
        return Err(Error::BlockMismatch);
    }
    let dim = op.dim();
    let mut scale = 1.0;
    let mut squarings = 0u32;
    while op.frobenius_norm() * t.abs() * scale > tol::TAYLOR_SCALE {
        scale *= 0.5;
        squarings += 1;
    }
    // A = −iHt·2^−s
    let a: Vec<Vec<Complex64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| op.entry(i, j) * Complex64::new(0.0, -t * scale))
                .collect()
        })
        .collect();
    let mut u: Vec<Vec<Complex64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();
    let mut term = u.clone();
    for order in 1..=tol::TAYLOR_ORDER {
        term = matmul(&term, &a);
        let inv = 1.0 / order as f64;
        for row in &mut term {
            for e in row {
                *e *= inv;
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                u[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        u = matmul(&u, &u);
    }
    let amps: Vec<Complex64> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| u[i][j] * psi.amplitudes()[j])
                .sum()
        })
        .collect();
    StateVector::new(op.block().clone(), amps)
}
