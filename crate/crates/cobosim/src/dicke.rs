//! Two two-level emitters sharing a cavity mode, mapped onto three bosonic
//! modes: cavity photons, ground-state count, excited-state count.
//!
//! Collective emission is the single monomial â†b̂\u{2081}†b̂\u{2082}: one photon appears,
//! one emitter moves from excited to ground. With one photon and one excited
//! emitter the invariant block is a three-state chain with couplings 2 and
//! √2, so the cavity-empty split is 2/3 up, 1/3 down, not an equal half.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{eigendecompose, evolve, probability};
use crate::fock::{block_closure, FockBlock, OccupationVector, StateVector, DEFAULT_DIM_CAP};
use crate::hamiltonian::{assemble, Coupler, LadderMonomial};

/// Cavity photon count plus number of excited emitters (0, 1, or 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DickeState {
    photons: u32,
    excited: u8,
}

impl DickeState {
    pub fn new(photons: u32, excited: u8) -> Result<Self> {
        if excited > 2 {
            return Err(Error::ExcitedOutOfRange(excited));
        }
        Ok(DickeState { photons, excited })
    }

    pub fn photons(&self) -> u32 {
        self.photons
    }

    pub fn excited(&self) -> u8 {
        self.excited
    }

    /// Bosonic image (photons, ground count, excited count).
    pub fn schwinger_map(&self) -> Result<OccupationVector> {
        OccupationVector::new(vec![
            self.photons,
            2 - u32::from(self.excited),
            u32::from(self.excited),
        ])
    }
}

/// â†b̂₁†b̂₂ + h.c. on modes (cavity, ground, excited).
pub fn dicke_coupler() -> Coupler {
    let term = LadderMonomial::new(Complex64::new(1.0, 0.0), vec![1, 1, 0], vec![0, 0, 1])
        .expect("valid emission monomial");
    Coupler::hermitian_close(vec![term]).expect("nonempty term list")
}

/// Invariant block of one photon plus one excited emitter.
pub fn dicke_block() -> Result<FockBlock> {
    let seed = DickeState::new(1, 1)?.schwinger_map()?;
    block_closure(&[seed], &dicke_coupler(), DEFAULT_DIM_CAP)
}

/// First time the initial state empties: π/(2√6).
pub fn dicke_null_time() -> f64 {
    std::f64::consts::PI / (2.0 * 6f64.sqrt())
}

/// Snapshot of the emitter-cavity dynamics at one time.
#[derive(Debug, Clone)]
pub struct DickeDemo {
    pub time: f64,
    pub state: StateVector,
    /// Probability per block state, in block order.
    pub probabilities: Vec<(OccupationVector, f64)>,
    /// Probability of remaining in the initial configuration.
    pub stay: f64,
    /// Branch weights x²/λ² and y²/λ² the chain couplings dictate at the null.
    pub computed_weights: (f64, f64),
    /// The equal split those weights are often assumed to be.
    pub equal_split_hypothesis: (f64, f64),
    pub note: String,
}

pub fn dicke_demo(t: f64) -> Result<DickeDemo> {
    let coupler = dicke_coupler();
    let block = Arc::new(dicke_block()?);
    let op = assemble(block.clone(), &coupler)?;
    let eig = eigendecompose(&op)?;
    let init_occ = DickeState::new(1, 1)?.schwinger_map()?;
    let init = StateVector::basis(block.clone(), &init_occ)?;
    let state = evolve(&eig, &init, t)?;
    let probabilities: Vec<(OccupationVector, f64)> = block
        .states()
        .iter()
        .map(|s| (s.clone(), probability(&state, s)))
        .collect();
    let stay = probability(&state, &init_occ);
    let (x2, y2) = (4.0, 2.0);
    let l2 = x2 + y2;
    Ok(DickeDemo {
        time: t,
        state,
        probabilities,
        stay,
        computed_weights: (x2 / l2, y2 / l2),
        equal_split_hypothesis: (0.5, 0.5),
        note: "chain couplings are 2 upward and \u{221a}2 downward, so when the \
               initial state empties the branches carry 2/3 and 1/3; an equal \
               1/2:1/2 split would need equal couplings"
            .into(),
    })
}
