//! Occupation-number states, invariant blocks, and the action of ladder
//! monomials on them.
//!
//! Lowering a mode from n by q contributes √(n!/(n−q)!), raising the result
//! by p contributes √((n−q+p)!/(n−q)!). A monomial therefore maps each basis
//! state to at most one other basis state, and repeated application of a
//! coupler's terms generates a finite invariant block.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::{Arc, LazyLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{Coupler, LadderMonomial};
use crate::tol;

/// Largest occupation a single mode may hold; keeps ln-factorials finite in f64.
pub const MAX_OCCUPATION: u32 = 170;

/// Default cap on invariant-block dimension.
pub const DEFAULT_DIM_CAP: usize = 4096;

static LN_FACTORIAL: LazyLock<[f64; MAX_OCCUPATION as usize + 1]> = LazyLock::new(|| {
    let mut table = [0.0; MAX_OCCUPATION as usize + 1];
    for n in 2..table.len() {
        table[n] = table[n - 1] + (n as f64).ln();
    }
    table
});

/// √(hi!/lo!); exact 64-bit integers up to 20!, ln-factorial differences above.
pub(crate) fn sqrt_factorial_ratio(hi: u32, lo: u32) -> f64 {
    debug_assert!(lo <= hi && hi <= MAX_OCCUPATION);
    if hi <= 20 {
        let mut prod: u64 = 1;
        for i in lo + 1..=hi {
            prod *= u64::from(i);
        }
        (prod as f64).sqrt()
    } else {
        (0.5 * (LN_FACTORIAL[hi as usize] - LN_FACTORIAL[lo as usize])).exp()
    }
}

/// Photon counts per mode; the basis label |n₁,n₂,…⟩.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    /// Rejects empty mode lists and occupations beyond [`MAX_OCCUPATION`].
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::NoModes);
        }
        if let Some(&n) = counts.iter().find(|&&n| n > MAX_OCCUPATION) {
            return Err(Error::OccupationOverflow { occ: u64::from(n), max: MAX_OCCUPATION });
        }
        Ok(OccupationVector(counts))
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&n| u64::from(n)).sum()
    }

    /// Counts joined by colons, `n1:n2:…`; used in CSV headers and messages.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        parts.join(":")
    }
}

impl fmt::Debug for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}⟩", self.label())
    }
}

/// Distinct occupation states in ascending lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBlock {
    modes: usize,
    states: Vec<OccupationVector>,
}

impl FockBlock {
    /// Sorts and deduplicates; every state must agree on mode count.
    pub fn new(states: Vec<OccupationVector>) -> Result<Self> {
        let Some(first) = states.first() else {
            return Err(Error::EmptyBlock);
        };
        let modes = first.modes();
        for s in &states {
            if s.modes() != modes {
                return Err(Error::ModeMismatch { left: modes, right: s.modes() });
            }
        }
        let mut states = states;
        states.sort();
        states.dedup();
        Ok(FockBlock { modes, states })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn states(&self) -> &[OccupationVector] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &OccupationVector {
        &self.states[i]
    }

    /// Index of `occ` in the sorted state list; exact inverse of [`FockBlock::state`].
    pub fn position(&self, occ: &OccupationVector) -> Option<usize> {
        self.states.binary_search(occ).ok()
    }

    pub fn contains(&self, occ: &OccupationVector) -> bool {
        self.position(occ).is_some()
    }
}

/// Complex amplitudes over a block's states; unit norm within [`tol::NORM`].
#[derive(Debug, Clone)]
pub struct StateVector {
    block: Arc<FockBlock>,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(block: Arc<FockBlock>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != block.dim() {
            return Err(Error::DimensionMismatch { amps: amps.len(), dim: block.dim() });
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > tol::NORM {
            return Err(Error::NotNormalized { norm2 });
        }
        Ok(StateVector { block, amps })
    }

    /// Rescales an arbitrary nonzero amplitude vector to unit norm.
    pub fn normalized(block: Arc<FockBlock>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != block.dim() {
            return Err(Error::DimensionMismatch { amps: amps.len(), dim: block.dim() });
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::ZeroState);
        }
        let inv = 1.0 / norm2.sqrt();
        let amps = amps.into_iter().map(|a| a * inv).collect();
        Ok(StateVector { block, amps })
    }

    /// The basis state |occ⟩.
    pub fn basis(block: Arc<FockBlock>, occ: &OccupationVector) -> Result<Self> {
        let i = block
            .position(occ)
            .ok_or_else(|| Error::StateOutsideBlock { state: occ.label() })?;
        let mut amps = vec![Complex64::new(0.0, 0.0); block.dim()];
        amps[i] = Complex64::new(1.0, 0.0);
        Ok(StateVector { block, amps })
    }

    pub fn block(&self) -> &Arc<FockBlock> {
        &self.block
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude on |occ⟩; zero for occupations outside the block.
    pub fn amplitude(&self, occ: &OccupationVector) -> Complex64 {
        match self.block.position(occ) {
            Some(i) => self.amps[i],
            None => Complex64::new(0.0, 0.0),
        }
    }
}

/// Applies one ladder monomial to a basis state.
///
/// Returns the image state and its amplitude, coefficient included, or `None`
/// when a lowering power exceeds the occupation. Raising past
/// [`MAX_OCCUPATION`] is a capacity error.
pub fn apply_monomial(
    term: &LadderMonomial,
    occ: &OccupationVector,
) -> Result<Option<(Complex64, OccupationVector)>> {
    if term.modes() != occ.modes() {
        return Err(Error::ModeMismatch { left: term.modes(), right: occ.modes() });
    }
    let mut factor = 1.0;
    let mut counts = Vec::with_capacity(occ.modes());
    for (m, &n) in occ.counts().iter().enumerate() {
        let q = term.lower()[m];
        let p = term.raise()[m];
        if n < q {
            return Ok(None);
        }
        let mid = n - q;
        let top = u64::from(mid) + u64::from(p);
        if top > u64::from(MAX_OCCUPATION) {
            return Err(Error::OccupationOverflow { occ: top, max: MAX_OCCUPATION });
        }
        let top = top as u32;
        factor *= sqrt_factorial_ratio(n, mid) * sqrt_factorial_ratio(top, mid);
        counts.push(top);
    }
    Ok(Some((term.coeff() * factor, OccupationVector(counts))))
}

/// Smallest state set containing `seeds` and closed under every coupler term.
///
/// Breadth-first expansion; fails once the set would exceed `dim_cap`.
pub fn block_closure(
    seeds: &[OccupationVector],
    coupler: &Coupler,
    dim_cap: usize,
) -> Result<FockBlock> {
    let Some(first) = seeds.first() else {
        return Err(Error::NoSeeds);
    };
    let modes = first.modes();
    for s in seeds {
        if s.modes() != modes {
            return Err(Error::ModeMismatch { left: modes, right: s.modes() });
        }
    }
    if coupler.modes() != modes {
        return Err(Error::ModeMismatch { left: coupler.modes(), right: modes });
    }
    let mut seen: BTreeSet<OccupationVector> = seeds.iter().cloned().collect();
    if seen.len() > dim_cap {
        return Err(Error::BlockTooLarge { cap: dim_cap });
    }
    let mut queue: VecDeque<OccupationVector> = seen.iter().cloned().collect();
    while let Some(s) = queue.pop_front() {
        for term in coupler.terms() {
            if let Some((_, next)) = apply_monomial(term, &s)? {
                if seen.insert(next.clone()) {
                    if seen.len() > dim_cap {
                        return Err(Error::BlockTooLarge { cap: dim_cap });
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(FockBlock { modes, states: seen.into_iter().collect() })
}

/// Σₘ weights[m]·occ[m], the conserved charge of one weight vector.
pub fn weight_of(occ: &OccupationVector, weights: &[i64]) -> Result<i64> {
    if weights.len() != occ.modes() {
        return Err(Error::ModeMismatch { left: weights.len(), right: occ.modes() });
    }
    let sum: i128 = occ
        .counts()
        .iter()
        .zip(weights)
        .map(|(&n, &w)| i128::from(n) * i128::from(w))
        .sum();
    Ok(i64::try_from(sum).expect("conserved charge exceeds i64"))
}

/// |⟨a|b⟩|²; the states must share a block.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.block.as_ref() != b.block.as_ref() {
        return Err(Error::BlockMismatch);
    }
    let ip: Complex64 = a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum();
    Ok(ip.norm_sqr())
}
