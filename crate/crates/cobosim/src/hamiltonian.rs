//! Ladder monomials, Hermitian couplers, and their dense matrix form on a
//! block, plus the exact integer conservation laws a coupler implies.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{apply_monomial, FockBlock};
use crate::tol;

/// One term c·∏ₘ(âₘ†)^pₘ(âₘ)^qₘ; lowering acts before raising.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderMonomial {
    coeff: Complex64,
    raise: Vec<u32>,
    lower: Vec<u32>,
}

impl LadderMonomial {
    pub fn new(coeff: Complex64, raise: Vec<u32>, lower: Vec<u32>) -> Result<Self> {
        if raise.len() != lower.len() {
            return Err(Error::ModeMismatch { left: raise.len(), right: lower.len() });
        }
        if raise.is_empty() {
            return Err(Error::NoModes);
        }
        if coeff == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroCoefficient);
        }
        if raise.iter().all(|&p| p == 0) && lower.iter().all(|&q| q == 0) {
            return Err(Error::EmptyMonomial);
        }
        Ok(LadderMonomial { coeff, raise, lower })
    }

    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }

    pub fn raise(&self) -> &[u32] {
        &self.raise
    }

    pub fn lower(&self) -> &[u32] {
        &self.lower
    }

    pub fn modes(&self) -> usize {
        self.raise.len()
    }

    /// Hermitian conjugate: coefficient conjugated, raise and lower swapped.
    pub fn conjugate(&self) -> LadderMonomial {
        LadderMonomial {
            coeff: self.coeff.conj(),
            raise: self.lower.clone(),
            lower: self.raise.clone(),
        }
    }

    /// Exact structural test, conjugated coefficients compared bit for bit.
    pub fn is_conjugate_of(&self, other: &LadderMonomial) -> bool {
        self.raise == other.lower && self.lower == other.raise && self.coeff == other.coeff.conj()
    }
}

/// A Hermitian sum of ladder monomials.
#[derive(Debug, Clone)]
pub struct Coupler {
    terms: Vec<LadderMonomial>,
    modes: usize,
}

impl Coupler {
    /// Closes a term list under Hermitian conjugation.
    ///
    /// Terms already paired (or self-adjoint) are kept as given; missing
    /// conjugates are appended in input order. Idempotent.
    pub fn hermitian_close(terms: Vec<LadderMonomial>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::EmptyCoupler);
        };
        let modes = first.modes();
        for t in &terms {
            if t.modes() != modes {
                return Err(Error::ModeMismatch { left: modes, right: t.modes() });
            }
        }
        let mut unmatched: Vec<usize> = (0..terms.len()).collect();
        let mut missing = Vec::new();
        while let Some(i) = unmatched.first().copied() {
            unmatched.remove(0);
            let t = &terms[i];
            if t.is_conjugate_of(t) {
                continue;
            }
            match unmatched.iter().position(|&j| terms[j].is_conjugate_of(t)) {
                Some(k) => {
                    unmatched.remove(k);
                }
                None => missing.push(t.conjugate()),
            }
        }
        let mut terms = terms;
        terms.extend(missing);
        Ok(Coupler { terms, modes })
    }

    pub fn terms(&self) -> &[LadderMonomial] {
        &self.terms
    }

    pub fn modes(&self) -> usize {
        self.modes
    }
}

/// Dense Hermitian matrix over a block's basis, row-major.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    block: Arc<FockBlock>,
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianOperator {
    /// Accepts a matrix whose Hermiticity defect is within [`tol::HERMITICITY`]
    /// of its Frobenius norm.
    pub fn new(block: Arc<FockBlock>, entries: Vec<Complex64>) -> Result<Self> {
        let dim = block.dim();
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { amps: entries.len(), dim: dim * dim });
        }
        let op = HermitianOperator { block, dim, entries };
        let scale = op.frobenius_norm().max(1.0);
        if op.hermiticity_defect() > tol::HERMITICITY * scale {
            return Err(Error::NotHermitian);
        }
        Ok(op)
    }

    pub fn block(&self) -> &Arc<FockBlock> {
        &self.block
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |H[i][j] − conj(H[j][i])| over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.entry(i, j) - self.entry(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Builds the coupler's matrix on a block.
///
/// Every term image of every block state must land back inside the block;
/// anything else means the block is not invariant.
pub fn assemble(block: Arc<FockBlock>, coupler: &Coupler) -> Result<HermitianOperator> {
    if coupler.modes() != block.modes() {
        return Err(Error::ModeMismatch { left: coupler.modes(), right: block.modes() });
    }
    let dim = block.dim();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (col, s) in block.states().iter().enumerate() {
        for term in coupler.terms() {
            if let Some((amp, out)) = apply_monomial(term, s)? {
                let row = block.position(&out).ok_or_else(|| Error::NotClosed {
                    from: s.label(),
                    to: out.label(),
                })?;
                entries[row * dim + col] += amp;
            }
        }
    }
    HermitianOperator::new(block, entries)
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Reduced rational with positive denominator; arithmetic aborts on overflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Frac {
    num: i128,
    den: i128,
}

impl Frac {
    const ZERO: Frac = Frac { num: 0, den: 1 };

    fn new(num: i128, den: i128) -> Frac {
        debug_assert!(den != 0);
        if num == 0 {
            return Frac::ZERO;
        }
        let g = gcd_i128(num, den);
        let sign = if den < 0 { -1 } else { 1 };
        Frac { num: sign * num / g, den: sign * den / g }
    }

    fn from_int(n: i128) -> Frac {
        Frac { num: n, den: 1 }
    }

    fn is_zero(self) -> bool {
        self.num == 0
    }

    fn mul(self, other: Frac) -> Frac {
        let num = self.num.checked_mul(other.num).expect("rational overflow");
        let den = self.den.checked_mul(other.den).expect("rational overflow");
        Frac::new(num, den)
    }

    fn sub(self, other: Frac) -> Frac {
        let left = self.num.checked_mul(other.den).expect("rational overflow");
        let right = other.num.checked_mul(self.den).expect("rational overflow");
        let num = left.checked_sub(right).expect("rational overflow");
        let den = self.den.checked_mul(other.den).expect("rational overflow");
        Frac::new(num, den)
    }

    fn div(self, other: Frac) -> Frac {
        debug_assert!(!other.is_zero());
        let num = self.num.checked_mul(other.den).expect("rational overflow");
        let den = self.den.checked_mul(other.num).expect("rational overflow");
        Frac::new(num, den)
    }

    fn neg(self) -> Frac {
        Frac { num: -self.num, den: self.den }
    }
}

/// Integer basis of { w : Σₘ wₘ·(pₘ−qₘ) = 0 for every term }.
///
/// Exact rational Gauss-Jordan elimination, one primitive integer vector per
/// free column, sorted lexicographically.
fn integer_nullspace(rows: Vec<Vec<i128>>, cols: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<Frac>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(Frac::from_int).collect())
        .collect();
    let nrows = m.len();
    let mut pivot_col_of_row = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pivot) = (row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pivot);
        let lead = m[row][col];
        for c in 0..cols {
            m[row][c] = m[row][c].div(lead);
        }
        for r in 0..nrows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col];
                for c in 0..cols {
                    let delta = factor.mul(m[row][c]);
                    m[r][c] = m[r][c].sub(delta);
                }
            }
        }
        pivot_col_of_row.push(col);
        row += 1;
        if row == nrows {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivot_col_of_row.clone();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut x = vec![Frac::ZERO; cols];
        x[free] = Frac::from_int(1);
        for (r, &pc) in pivot_cols.iter().enumerate() {
            x[pc] = m[r][free].neg();
        }
        // clear denominators, then divide out the common factor
        let mut lcm: i128 = 1;
        for f in &x {
            let g = gcd_i128(lcm, f.den);
            lcm = (lcm / g).checked_mul(f.den).expect("rational overflow");
        }
        let mut ints: Vec<i128> = x.iter().map(|f| f.num * (lcm / f.den)).collect();
        let mut g = 0;
        for &v in &ints {
            g = gcd_i128(g, v);
        }
        if g > 1 {
            for v in &mut ints {
                *v /= g;
            }
        }
        if let Some(&first) = ints.iter().find(|&&v| v != 0) {
            if first < 0 {
                for v in &mut ints {
                    *v = -*v;
                }
            }
        }
        basis.push(
            ints.into_iter()
                .map(|v| i64::try_from(v).expect("conserved weight exceeds i64"))
                .collect(),
        );
    }
    basis.sort();
    basis
}

/// Integer weight vector w with Σₘ wₘ·nₘ constant under the coupler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConservedWeight(pub Vec<i64>);

/// Basis of all conserved weight vectors of the coupler.
///
/// A weight w is conserved exactly when it is orthogonal to the net
/// occupation change p−q of every term.
pub fn conserved_weights(coupler: &Coupler) -> Vec<ConservedWeight> {
    let cols = coupler.modes();
    let rows: Vec<Vec<i128>> = coupler
        .terms()
        .iter()
        .map(|t| {
            t.raise()
                .iter()
                .zip(t.lower())
                .map(|(&p, &q)| i128::from(p) - i128::from(q))
                .collect()
        })
        .collect();
    integer_nullspace(rows, cols)
        .into_iter()
        .map(ConservedWeight)
        .collect()
}

/// Checks one weight vector against an assembled matrix: every entry joining
/// states of different charge must vanish.
pub fn verify_conservation(op: &HermitianOperator, weight: &ConservedWeight) -> Result<bool> {
    let block = op.block();
    let mut charges = Vec::with_capacity(block.dim());
    for s in block.states() {
        charges.push(crate::fock::weight_of(s, &weight.0)?);
    }
    for i in 0..op.dim() {
        for j in 0..op.dim() {
            if charges[i] != charges[j] && op.entry(i, j).norm_sqr() > 0.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{block_closure, OccupationVector};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn occ(counts: &[u32]) -> OccupationVector {
        OccupationVector::new(counts.to_vec()).unwrap()
    }

    fn pair_coupler() -> Coupler {
        let t = LadderMonomial::new(c(1.0, 0.0), vec![2, 0], vec![0, 2]).unwrap();
        Coupler::hermitian_close(vec![t]).unwrap()
    }

    #[test]
    fn monomial_validation() {
        assert!(LadderMonomial::new(c(0.0, 0.0), vec![1], vec![0]).is_err());
        assert!(LadderMonomial::new(c(1.0, 0.0), vec![0], vec![0]).is_err());
        assert!(LadderMonomial::new(c(1.0, 0.0), vec![1, 0], vec![0]).is_err());
        assert!(LadderMonomial::new(c(1.0, 0.0), vec![], vec![]).is_err());
    }

    #[test]
    fn conjugate_swaps_and_conjugates() {
        let t = LadderMonomial::new(c(0.0, 2.0), vec![2, 0], vec![0, 2]).unwrap();
        let ct = t.conjugate();
        assert_eq!(ct.raise(), &[0, 2]);
        assert_eq!(ct.lower(), &[2, 0]);
        assert_eq!(ct.coeff(), c(0.0, -2.0));
        assert!(ct.is_conjugate_of(&t));
        assert!(t.is_conjugate_of(&ct));
        assert_eq!(ct.conjugate(), t);
    }

    #[test]
    fn hermitian_close_appends_missing_conjugate() {
        let t = LadderMonomial::new(c(1.0, 0.0), vec![2, 0], vec![0, 2]).unwrap();
        let coupler = Coupler::hermitian_close(vec![t.clone()]).unwrap();
        assert_eq!(coupler.terms().len(), 2);
        assert!(coupler.terms()[1].is_conjugate_of(&t));
    }

    #[test]
    fn hermitian_close_is_idempotent() {
        let t = LadderMonomial::new(c(1.0, 0.0), vec![2, 0], vec![0, 2]).unwrap();
        let once = Coupler::hermitian_close(vec![t]).unwrap();
        let twice = Coupler::hermitian_close(once.terms().to_vec()).unwrap();
        assert_eq!(once.terms().len(), twice.terms().len());
    }

    #[test]
    fn hermitian_close_keeps_self_adjoint_term() {
        // â†b̂†âb̂ is its own conjugate
        let t = LadderMonomial::new(c(0.5, 0.0), vec![1, 1], vec![1, 1]).unwrap();
        let coupler = Coupler::hermitian_close(vec![t]).unwrap();
        assert_eq!(coupler.terms().len(), 1);
    }

    #[test]
    fn empty_coupler_rejected() {
        assert!(matches!(
            Coupler::hermitian_close(vec![]),
            Err(Error::EmptyCoupler)
        ));
    }

    #[test]
    fn assembled_pair_exchange_matrix() {
        let coupler = pair_coupler();
        let block =
            Arc::new(block_closure(&[occ(&[2, 2])], &coupler, crate::fock::DEFAULT_DIM_CAP).unwrap());
        let op = assemble(block.clone(), &coupler).unwrap();
        // basis order (0,4), (2,2), (4,0); couplings are √24
        let g = 24f64.sqrt();
        let idx = |s: &[u32]| block.position(&occ(s)).unwrap();
        let (a, b, d) = (idx(&[0, 4]), idx(&[2, 2]), idx(&[4, 0]));
        assert!((op.entry(a, b).re - g).abs() < 1e-13);
        assert!((op.entry(d, b).re - g).abs() < 1e-13);
        assert!((op.entry(b, a).re - g).abs() < 1e-13);
        assert_eq!(op.entry(a, d), c(0.0, 0.0));
        assert_eq!(op.entry(a, a), c(0.0, 0.0));
        assert_eq!(op.hermiticity_defect(), 0.0);
    }

    #[test]
    fn assembled_offdiagonals_match_ladder_factors() {
        // x = ⟨n+k,0|H|n,k⟩ and y = ⟨k,n|H|0,n+k⟩ for H = (â†)ⁿb̂ᵏ + h.c.
        for n in 1..=6u32 {
            for k in 1..=6u32 {
                let t = LadderMonomial::new(c(1.0, 0.0), vec![n, 0], vec![0, k]).unwrap();
                let coupler = Coupler::hermitian_close(vec![t]).unwrap();
                let block = Arc::new(
                    block_closure(&[occ(&[n, k])], &coupler, crate::fock::DEFAULT_DIM_CAP).unwrap(),
                );
                let op = assemble(block.clone(), &coupler).unwrap();
                let term = &coupler.terms()[0];
                let (x, top) = apply_monomial(term, &occ(&[n, k])).unwrap().unwrap();
                let i = block.position(&top).unwrap();
                let j = block.position(&occ(&[n, k])).unwrap();
                assert!((op.entry(i, j) - x).norm() < 1e-12 * x.norm().max(1.0));
                assert!(op.hermiticity_defect() == 0.0);
            }
        }
    }

    #[test]
    fn assemble_rejects_non_invariant_block() {
        let coupler = pair_coupler();
        let block = Arc::new(FockBlock::new(vec![occ(&[2, 2]), occ(&[4, 0])]).unwrap());
        assert!(matches!(
            assemble(block, &coupler),
            Err(Error::NotClosed { .. })
        ));
    }

    #[test]
    fn conserved_weights_pair_exchange() {
        let weights = conserved_weights(&pair_coupler());
        assert_eq!(weights, vec![ConservedWeight(vec![1, 1])]);
    }

    #[test]
    fn conserved_weights_two_to_one() {
        // (â†)²b̂ + h.c.: Δ = (2,−1) ⇒ weight (1,2)
        let t = LadderMonomial::new(c(1.0, 0.0), vec![2, 0], vec![0, 1]).unwrap();
        let coupler = Coupler::hermitian_close(vec![t]).unwrap();
        assert_eq!(conserved_weights(&coupler), vec![ConservedWeight(vec![1, 2])]);
    }

    #[test]
    fn conserved_weights_three_mode_exchange() {
        // â†b̂†ĉ + h.c.: Δ = ±(1,1,−1) ⇒ weights (1,−1,0) and (1,0,1)
        let t = LadderMonomial::new(c(1.0, 0.0), vec![1, 1, 0], vec![0, 0, 1]).unwrap();
        let coupler = Coupler::hermitian_close(vec![t]).unwrap();
        assert_eq!(
            conserved_weights(&coupler),
            vec![
                ConservedWeight(vec![1, -1, 0]),
                ConservedWeight(vec![1, 0, 1]),
            ]
        );
    }

    #[test]
    fn verify_conservation_accepts_true_weight_rejects_tampered_matrix() {
        let coupler = pair_coupler();
        let block =
            Arc::new(block_closure(&[occ(&[2, 2])], &coupler, crate::fock::DEFAULT_DIM_CAP).unwrap());
        let op = assemble(block.clone(), &coupler).unwrap();
        let w = ConservedWeight(vec![1, 1]);
        assert!(verify_conservation(&op, &w).unwrap());
        // an entry joining total-4 to nothing: fake a charge-violating coupling
        let bad_w = ConservedWeight(vec![1, 0]);
        assert!(!verify_conservation(&op, &bad_w).unwrap());
    }

    #[test]
    fn nullspace_of_empty_row_set_is_full_lattice() {
        let basis = integer_nullspace(vec![], 2);
        assert_eq!(basis, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn nullspace_handles_redundant_rows() {
        let basis = integer_nullspace(vec![vec![2, -2], vec![-4, 4], vec![2, -2]], 2);
        assert_eq!(basis, vec![vec![1, 1]]);
    }

    #[test]
    fn hermitian_operator_rejects_asymmetric_matrix() {
        let block = Arc::new(FockBlock::new(vec![occ(&[0, 2]), occ(&[2, 0])]).unwrap());
        let entries = vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(
            HermitianOperator::new(block, entries),
            Err(Error::NotHermitian)
        ));
    }
}
