//! Scenario documents, named presets, and deterministic report emission.
//!
//! A scenario is a single JSON document; complex numbers are two-element
//! arrays [re, im]. The invariant block is always derived from the initial
//! state by closure, and terms are Hermitian-closed automatically.

use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::find_nulls;
use crate::error::{Error, Result};
use crate::evolution::{eigendecompose, evolve, trace, EigenSystem, ProbabilityTrace};
use crate::fock::{
    apply_monomial, block_closure, FockBlock, OccupationVector, StateVector, DEFAULT_DIM_CAP,
};
use crate::hamiltonian::{assemble, Coupler, HermitianOperator, LadderMonomial};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub modes: u32,
    pub terms: Vec<TermSpec>,
    pub initial: InitialSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: [f64; 2],
    pub raise: Vec<u32>,
    pub lower: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialSpec {
    Occupation(Vec<u32>),
    Superposition(Vec<ComponentSpec>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub occupation: Vec<u32>,
    pub amplitude: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeSpec {
    Grid { max: f64, steps: u32 },
    At { at: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eigen,
    Trace,
    Null,
    State,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eigen" => Ok(Command::Eigen),
            "trace" => Ok(Command::Trace),
            "null" => Ok(Command::Null),
            "state" => Ok(Command::State),
            other => Err(Error::UnknownCommand(other.to_string())),
        }
    }
}

fn parse_count(preset: &str, what: &str, raw: &str) -> Result<u32> {
    raw.parse().map_err(|_| {
        Error::Scenario(format!(
            "preset {preset}: {what} must be a non-negative integer, got '{raw}'"
        ))
    })
}

fn expect_params(preset: &str, params: &[String], usage: &str, n: usize) -> Result<()> {
    if params.len() != n {
        return Err(Error::Scenario(format!(
            "preset {preset} takes {usage}, got {} parameter(s)",
            params.len()
        )));
    }
    Ok(())
}

fn term_spec(coeff: f64, raise: Vec<u32>, lower: Vec<u32>) -> TermSpec {
    TermSpec { coeff: [coeff, 0.0], raise, lower }
}

/// Both halves of c·T + c̄·T†, written out explicitly.
fn hermitian_pair(coeff: f64, raise: Vec<u32>, lower: Vec<u32>) -> Vec<TermSpec> {
    vec![
        term_spec(coeff, raise.clone(), lower.clone()),
        term_spec(coeff, lower, raise),
    ]
}

/// Oscillation eigenvalue √(x²+y²) of the chain the term generates from
/// `init`, with x and y the upward and downward ladder amplitudes.
fn chain_lambda(term: &LadderMonomial, init: &OccupationVector) -> Result<f64> {
    let up = apply_monomial(term, init)?
        .map(|(a, _)| a.norm())
        .unwrap_or(0.0);
    let down = apply_monomial(&term.conjugate(), init)?
        .map(|(a, _)| a.norm())
        .unwrap_or(0.0);
    if up + down <= 0.0 {
        return Err(Error::Scenario(
            "initial state is annihilated by the coupler; no oscillation scale".into(),
        ));
    }
    Ok(up.hypot(down))
}

fn default_grid(lambda: f64) -> TimeSpec {
    TimeSpec::Grid { max: 2.0 * std::f64::consts::PI / lambda, steps: 1000 }
}

/// One full period of the two-mode chain of (â†)ⁿb̂ᵏ + h.c. from (n+s, k+r).
fn two_mode_scenario(n: u32, k: u32, s: u32, r: u32) -> Result<Scenario> {
    let one = Complex64::new(1.0, 0.0);
    let term = LadderMonomial::new(one, vec![n, 0], vec![0, k])?;
    let init = OccupationVector::new(vec![n + s, k + r])?;
    let lambda = chain_lambda(&term, &init)?;
    Ok(Scenario {
        modes: 2,
        terms: hermitian_pair(1.0, vec![n, 0], vec![0, k]),
        initial: InitialSpec::Occupation(vec![n + s, k + r]),
        outcomes: None,
        time: Some(default_grid(lambda)),
    })
}

/// Builds the named canonical experiment.
///
/// Names: hom4, nboson n, general n k, shifted n k s r, threemode n k,
/// dicke, perturbed c. Every preset fixes the initial occupation and a
/// default 1000-step grid over one period [0, 2π/λ].
pub fn preset(name: &str, params: &[String]) -> Result<Scenario> {
    match name {
        "hom4" => {
            expect_params(name, params, "no parameters", 0)?;
            two_mode_scenario(2, 2, 0, 0)
        }
        "nboson" => {
            expect_params(name, params, "one parameter (n)", 1)?;
            let n = parse_count(name, "n", &params[0])?;
            if n == 0 {
                return Err(Error::Scenario("preset nboson: n must be positive".into()));
            }
            two_mode_scenario(n, n, 0, 0)
        }
        "general" => {
            expect_params(name, params, "two parameters (n k)", 2)?;
            let n = parse_count(name, "n", &params[0])?;
            let k = parse_count(name, "k", &params[1])?;
            if n == 0 || k == 0 {
                return Err(Error::Scenario(
                    "preset general: n and k must be positive".into(),
                ));
            }
            two_mode_scenario(n, k, 0, 0)
        }
        "shifted" => {
            expect_params(name, params, "four parameters (n k s r)", 4)?;
            let n = parse_count(name, "n", &params[0])?;
            let k = parse_count(name, "k", &params[1])?;
            let s = parse_count(name, "s", &params[2])?;
            let r = parse_count(name, "r", &params[3])?;
            if n == 0 || k == 0 {
                return Err(Error::Scenario(
                    "preset shifted: n and k must be positive".into(),
                ));
            }
            two_mode_scenario(n, k, s, r)
        }
        "threemode" => {
            expect_params(name, params, "two parameters (n k)", 2)?;
            let n = parse_count(name, "n", &params[0])?;
            let k = parse_count(name, "k", &params[1])?;
            if n == 0 || k == 0 {
                return Err(Error::Scenario(
                    "preset threemode: n and k must be positive".into(),
                ));
            }
            let one = Complex64::new(1.0, 0.0);
            let term = LadderMonomial::new(one, vec![n, 0, 0], vec![0, k, k])?;
            let init = OccupationVector::new(vec![n, k, k])?;
            let lambda = chain_lambda(&term, &init)?;
            Ok(Scenario {
                modes: 3,
                terms: hermitian_pair(1.0, vec![n, 0, 0], vec![0, k, k]),
                initial: InitialSpec::Occupation(vec![n, k, k]),
                outcomes: None,
                time: Some(default_grid(lambda)),
            })
        }
        "dicke" => {
            expect_params(name, params, "no parameters", 0)?;
            let one = Complex64::new(1.0, 0.0);
            let term = LadderMonomial::new(one, vec![1, 1, 0], vec![0, 0, 1])?;
            let init = OccupationVector::new(vec![1, 1, 1])?;
            let lambda = chain_lambda(&term, &init)?;
            Ok(Scenario {
                modes: 3,
                terms: hermitian_pair(1.0, vec![1, 1, 0], vec![0, 0, 1]),
                initial: InitialSpec::Occupation(vec![1, 1, 1]),
                outcomes: None,
                time: Some(default_grid(lambda)),
            })
        }
        "perturbed" => {
            expect_params(name, params, "one parameter (coefficient)", 1)?;
            let c: f64 = params[0].parse().map_err(|_| {
                Error::Scenario(format!(
                    "preset perturbed: coefficient must be a real number, got '{}'",
                    params[0]
                ))
            })?;
            if !c.is_finite() || c == 0.0 {
                return Err(Error::Scenario(
                    "preset perturbed: coefficient must be finite and nonzero".into(),
                ));
            }
            let one = Complex64::new(1.0, 0.0);
            let term = LadderMonomial::new(one, vec![2, 0], vec![0, 2])?;
            let init = OccupationVector::new(vec![2, 2])?;
            let lambda = chain_lambda(&term, &init)?;
            let mut terms = hermitian_pair(1.0, vec![2, 0], vec![0, 2]);
            terms.extend(hermitian_pair(c, vec![4, 0], vec![0, 4]));
            Ok(Scenario {
                modes: 2,
                terms,
                initial: InitialSpec::Occupation(vec![2, 2]),
                outcomes: None,
                time: Some(default_grid(lambda)),
            })
        }
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// A scenario resolved into concrete simulation objects.
pub struct BuiltScenario {
    pub coupler: Coupler,
    pub block: Arc<FockBlock>,
    pub init: StateVector,
    /// Set when the initial state is a single basis state.
    pub init_occupation: Option<OccupationVector>,
    pub outcomes: Vec<OccupationVector>,
    pub operator: HermitianOperator,
    pub eigen: EigenSystem,
    pub warnings: Vec<String>,
}

fn occupation_from(counts: &[u32], modes: usize, role: &str) -> Result<OccupationVector> {
    if counts.len() != modes {
        return Err(Error::Scenario(format!(
            "{role} has {} mode(s); the scenario declares {modes}",
            counts.len()
        )));
    }
    OccupationVector::new(counts.to_vec())
}

pub fn build(doc: &Scenario) -> Result<BuiltScenario> {
    if doc.modes == 0 {
        return Err(Error::Scenario("modes must be positive".into()));
    }
    let modes = doc.modes as usize;
    let mut terms = Vec::with_capacity(doc.terms.len());
    for (i, t) in doc.terms.iter().enumerate() {
        if t.raise.len() != modes || t.lower.len() != modes {
            return Err(Error::Scenario(format!(
                "term {i} power lists must have length {modes}"
            )));
        }
        if !t.coeff[0].is_finite() || !t.coeff[1].is_finite() {
            return Err(Error::Scenario(format!("term {i} coefficient must be finite")));
        }
        terms.push(LadderMonomial::new(
            Complex64::new(t.coeff[0], t.coeff[1]),
            t.raise.clone(),
            t.lower.clone(),
        )?);
    }
    let coupler = Coupler::hermitian_close(terms)?;
    let seeds: Vec<OccupationVector> = match &doc.initial {
        InitialSpec::Occupation(counts) => {
            vec![occupation_from(counts, modes, "initial occupation")?]
        }
        InitialSpec::Superposition(components) => {
            if components.is_empty() {
                return Err(Error::Scenario(
                    "initial superposition needs at least one component".into(),
                ));
            }
            components
                .iter()
                .map(|c| occupation_from(&c.occupation, modes, "superposition component"))
                .collect::<Result<_>>()?
        }
    };
    let block = Arc::new(block_closure(&seeds, &coupler, DEFAULT_DIM_CAP)?);
    let (init, init_occupation) = match &doc.initial {
        InitialSpec::Occupation(_) => {
            let occ = seeds[0].clone();
            (StateVector::basis(block.clone(), &occ)?, Some(occ))
        }
        InitialSpec::Superposition(components) => {
            let mut amps = vec![Complex64::new(0.0, 0.0); block.dim()];
            for (c, occ) in components.iter().zip(&seeds) {
                if !c.amplitude[0].is_finite() || !c.amplitude[1].is_finite() {
                    return Err(Error::Scenario(
                        "superposition amplitudes must be finite".into(),
                    ));
                }
                let i = block.position(occ).expect("seed states are in the closure");
                amps[i] += Complex64::new(c.amplitude[0], c.amplitude[1]);
            }
            (StateVector::normalized(block.clone(), amps)?, None)
        }
    };
    let mut warnings = Vec::new();
    let outcomes = match &doc.outcomes {
        Some(list) => {
            let mut out = Vec::with_capacity(list.len());
            for counts in list {
                let occ = occupation_from(counts, modes, "outcome")?;
                if !block.contains(&occ) {
                    warnings.push(format!(
                        "outcome {} lies outside the invariant block; its probability is 0",
                        occ.label()
                    ));
                }
                out.push(occ);
            }
            out
        }
        None => block.states().to_vec(),
    };
    let operator = assemble(block.clone(), &coupler)?;
    let eigen = eigendecompose(&operator)?;
    Ok(BuiltScenario {
        coupler,
        block,
        init,
        init_occupation,
        outcomes,
        operator,
        eigen,
        warnings,
    })
}

/// Command-line overrides for the scenario's time specification.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub window: Option<f64>,
    pub steps: Option<u32>,
}

fn grid_times(max: f64, steps: u32) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::Scenario("time grid needs at least 1 step".into()));
    }
    if !max.is_finite() || max < 0.0 {
        return Err(Error::Scenario(
            "time grid max must be finite and non-negative".into(),
        ));
    }
    if steps == 1 {
        return Ok(vec![0.0]);
    }
    let last = f64::from(steps - 1);
    Ok((0..steps).map(|i| max * f64::from(i) / last).collect())
}

fn resolve_times(doc: &Scenario, opts: &RunOptions) -> Result<Vec<f64>> {
    let grid_base = match &doc.time {
        Some(TimeSpec::Grid { max, steps }) => Some((*max, *steps)),
        _ => None,
    };
    if opts.window.is_some() || opts.steps.is_some() {
        let max = opts
            .window
            .or(grid_base.map(|(m, _)| m))
            .ok_or_else(|| Error::Scenario("no time grid: pass --window".into()))?;
        let steps = opts.steps.or(grid_base.map(|(_, s)| s)).unwrap_or(1000);
        return grid_times(max, steps);
    }
    match &doc.time {
        Some(TimeSpec::Grid { max, steps }) => grid_times(*max, *steps),
        Some(TimeSpec::At { at }) => {
            if at.is_empty() {
                return Err(Error::Scenario("time list must not be empty".into()));
            }
            if at.iter().any(|t| !t.is_finite()) {
                return Err(Error::Scenario("times must be finite".into()));
            }
            Ok(at.clone())
        }
        None => Err(Error::Scenario(
            "scenario has no time specification: add one or pass --window/--steps".into(),
        )),
    }
}

fn resolve_window(doc: &Scenario, opts: &RunOptions) -> Result<f64> {
    if let Some(w) = opts.window {
        return Ok(w);
    }
    match &doc.time {
        Some(TimeSpec::Grid { max, .. }) => Ok(*max),
        _ => Err(Error::Scenario(
            "null search window: pass --window or give the scenario a time grid".into(),
        )),
    }
}

/// Rounds to 12 significant digits; all floats in reports pass through this.
fn sig12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("12-digit round-trip")
}

fn pair(z: Complex64) -> [f64; 2] {
    [sig12(z.re), sig12(z.im)]
}

/// Writes `t,P[n1:n2:…],…` rows in 12-significant-digit scientific notation.
pub fn emit_csv<W: Write>(tr: &ProbabilityTrace, dest: &mut W) -> Result<()> {
    let mut header = String::from("t");
    for o in &tr.outcomes {
        header.push_str(",P[");
        header.push_str(&o.label());
        header.push(']');
    }
    writeln!(dest, "{header}")?;
    for (row, &t) in tr.times.iter().enumerate() {
        write!(dest, "{t:.11e}")?;
        for p in &tr.probs[row] {
            write!(dest, ",{p:.11e}")?;
        }
        writeln!(dest)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct EigenReport {
    schema_version: u32,
    command: &'static str,
    block: Vec<String>,
    eigenvalues: Vec<f64>,
    /// eigenvectors[k][i] = [re, im] over the block basis.
    eigenvectors: Vec<Vec<[f64; 2]>>,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct MinimumReport {
    time: f64,
    probability: f64,
}

#[derive(Serialize)]
struct NullJsonReport {
    schema_version: u32,
    command: &'static str,
    block: Vec<String>,
    stay: String,
    window: f64,
    predicted: f64,
    found: Vec<f64>,
    residuals: Vec<f64>,
    minima: Vec<MinimumReport>,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct StateAtTime {
    t: f64,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct StateReport {
    schema_version: u32,
    command: &'static str,
    block: Vec<String>,
    states: Vec<StateAtTime>,
    warnings: Vec<String>,
}

/// A finished report plus the warnings it carried.
pub struct Run {
    /// Full output document bytes (JSON text or CSV).
    pub output: String,
    pub warnings: Vec<String>,
}

fn to_json<T: Serialize>(report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// Executes one command against a scenario and renders its report.
///
/// Output is deterministic: identical bytes for identical input.
pub fn run_scenario(doc: &Scenario, command: Command, opts: &RunOptions) -> Result<Run> {
    let built = build(doc)?;
    let labels: Vec<String> = built.block.states().iter().map(|s| s.label()).collect();
    let warnings = built.warnings.clone();
    let output = match command {
        Command::Eigen => {
            let eig = &built.eigen;
            let report = EigenReport {
                schema_version: 1,
                command: "eigen",
                block: labels,
                eigenvalues: eig.values().iter().map(|&v| sig12(v)).collect(),
                eigenvectors: (0..eig.dim())
                    .map(|k| eig.vector(k).iter().map(|&z| pair(z)).collect())
                    .collect(),
                warnings: warnings.clone(),
            };
            to_json(&report)?
        }
        Command::Trace => {
            let times = resolve_times(doc, opts)?;
            let tr = trace(&built.eigen, &built.init, &built.outcomes, &times)?;
            let mut bytes = Vec::new();
            emit_csv(&tr, &mut bytes)?;
            String::from_utf8(bytes).expect("CSV is ASCII")
        }
        Command::Null => {
            let stay = built.init_occupation.clone().ok_or_else(|| {
                Error::Scenario(
                    "null search requires a single initial occupation, not a superposition"
                        .into(),
                )
            })?;
            let window = resolve_window(doc, opts)?;
            let report = find_nulls(&built.eigen, &built.init, &stay, window)?;
            let json = NullJsonReport {
                schema_version: 1,
                command: "null",
                block: labels,
                stay: stay.label(),
                window: sig12(window),
                predicted: sig12(report.predicted),
                found: report.found.iter().map(|&t| sig12(t)).collect(),
                residuals: report.residuals.iter().map(|&p| sig12(p)).collect(),
                minima: report
                    .minima
                    .iter()
                    .map(|&(t, p)| MinimumReport { time: sig12(t), probability: sig12(p) })
                    .collect(),
                warnings: warnings.clone(),
            };
            to_json(&json)?
        }
        Command::State => {
            let times = resolve_times(doc, opts)?;
            let mut states = Vec::with_capacity(times.len());
            for &t in &times {
                let psi = evolve(&built.eigen, &built.init, t)?;
                states.push(StateAtTime {
                    t: sig12(t),
                    amplitudes: psi.amplitudes().iter().map(|&z| pair(z)).collect(),
                });
            }
            let report = StateReport {
                schema_version: 1,
                command: "state",
                block: labels,
                states,
                warnings: warnings.clone(),
            };
            to_json(&report)?
        }
    };
    Ok(Run { output, warnings })
}
