//! Logical readout of the surface code: nearest-codeword decoding of
//! single-shot bitstrings, logical tomography of injected states and logical
//! decay under frequency drift with optional echoes.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeSpec};
use crate::noise::{
    corrupt_dist, corrupt_shots, idle_with_drift, rng_stream, sample_dephasing, with_gate_noise, DdScheme, DriftModel,
    GateNoise, ReadoutModel,
};
use crate::prep::{injection_circuit, logical_state_circuit, xl_half_circuit, LogicalState};
use crate::sim::{exact_probs, expectation, run_seeded, sample_shots, Backend, InitialState, ProbDist, QuantumState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    /// +1 or -1.
    pub logical_value: i8,
    pub flipped_qubits: Vec<usize>,
    /// Both logical classes were equally close; resolved to +1.
    pub ambiguous: bool,
    pub hamming_distance: u32,
}

/// Brute-force nearest-codeword decoder for one measurement basis.
///
/// In the Z basis the codewords of `|0_L⟩` are the XOR combinations of the
/// plaquette supports, and `|1_L⟩` adds the `X_L` support. In the X basis
/// stars and `Z_L` play those roles.
#[derive(Debug, Clone)]
pub struct Decoder {
    pub basis: Basis,
    pub qubit_count: usize,
    /// Mask of the logical operator read in this basis.
    pub readout_mask: u64,
    classes: [Vec<u64>; 2],
}

fn mask(qs: &[usize]) -> u64 {
    qs.iter().fold(0u64, |m, &q| m | (1 << q))
}

fn span(gens: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64];
    for &g in gens {
        let more: Vec<u64> = out.iter().map(|&c| c ^ g).collect();
        out.extend(more);
    }
    out.sort_unstable();
    out.dedup();
    out
}

impl Decoder {
    pub fn new(lattice: &LatticeSpec, basis: Basis) -> Result<Self> {
        if lattice.boundary != Boundary::Mixed {
            return Err(Error::UnsupportedBoundary {
                op: "decode",
                detail: "logical decoding needs a mixed-boundary lattice".into(),
            });
        }
        let d = lattice.plaquette_rows;
        if d != 3 && d != 5 {
            return Err(Error::UnsupportedDistance(d));
        }
        let (gens, flip, read) = match basis {
            Basis::Z => (
                &lattice.plaquettes,
                &lattice.logical_x_support,
                &lattice.logical_z_support,
            ),
            Basis::X => (&lattice.stars, &lattice.logical_z_support, &lattice.logical_x_support),
        };
        let gens: Vec<u64> = gens.iter().map(|g| mask(g)).collect();
        let zero = span(&gens);
        let f = mask(flip);
        let one = zero.iter().map(|&c| c ^ f).collect();
        Ok(Decoder {
            basis,
            qubit_count: lattice.qubit_count,
            readout_mask: mask(read),
            classes: [zero, one],
        })
    }

    /// Codewords of the +1 (index 0) or -1 (index 1) logical class.
    pub fn codewords(&self, class: usize) -> &[u64] {
        &self.classes[class]
    }

    /// Raw parity of the logical operator.
    pub fn raw_value(&self, bits: u64) -> i8 {
        if (bits & self.readout_mask).count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn decode(&self, bits: u64) -> DecodeOutcome {
        let nearest = |class: &[u64]| {
            class
                .iter()
                .map(|&c| ((c ^ bits).count_ones(), c))
                .min()
                .expect("non-empty class")
        };
        let (d0, c0) = nearest(&self.classes[0]);
        let (d1, c1) = nearest(&self.classes[1]);
        let (value, dist, word) = if d1 < d0 { (-1, d1, c1) } else { (1, d0, c0) };
        let diff = word ^ bits;
        DecodeOutcome {
            logical_value: value,
            flipped_qubits: (0..self.qubit_count).filter(|&q| (diff >> q) & 1 == 1).collect(),
            ambiguous: d0 == d1,
            hamming_distance: dist,
        }
    }
}

/// Decodes a `0`/`1` string listed qubit 0 first.
pub fn decode(bitstring: &str, basis: Basis, lattice: &LatticeSpec) -> Result<DecodeOutcome> {
    if bitstring.len() != lattice.qubit_count {
        return Err(Error::DimensionMismatch(format!(
            "bitstring of length {} for {} qubits",
            bitstring.len(),
            lattice.qubit_count
        )));
    }
    let bits = crate::sim::dist::parse_bitstring(bitstring)
        .ok_or_else(|| Error::InvalidParameter(format!("not a bitstring: {bitstring:?}")))?;
    Ok(Decoder::new(lattice, basis)?.decode(bits))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicalStats {
    pub shots: usize,
    /// Mean of the ±1 outcomes.
    pub mean: f64,
    pub minus_fraction: f64,
    pub ambiguous_fraction: f64,
}

impl LogicalStats {
    /// Fraction of shots disagreeing with the ideal value `expected` (±1).
    pub fn error(&self, expected: i8) -> f64 {
        if expected > 0 {
            self.minus_fraction
        } else {
            1.0 - self.minus_fraction
        }
    }
}

/// Per-shot logical values: decoded when `correct`, otherwise the raw parity.
pub fn logical_measure(samples: &[u64], decoder: &Decoder, correct: bool) -> LogicalStats {
    let mut minus = 0usize;
    let mut amb = 0usize;
    for &s in samples {
        let v = if correct {
            let o = decoder.decode(s);
            amb += o.ambiguous as usize;
            o.logical_value
        } else {
            decoder.raw_value(s)
        };
        minus += (v < 0) as usize;
    }
    let n = samples.len().max(1) as f64;
    LogicalStats {
        shots: samples.len(),
        mean: 1.0 - 2.0 * minus as f64 / n,
        minus_fraction: minus as f64 / n,
        ambiguous_fraction: amb as f64 / n,
    }
}

/// Noise seen by logical experiments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LogicalNoise {
    pub readout: Option<ReadoutModel>,
    pub gate: GateNoise,
}

impl LogicalNoise {
    pub fn noiseless() -> Self {
        Self::default()
    }
}

fn with_basis_change(prep: &Circuit, basis: Basis) -> Result<Circuit> {
    let mut c = prep.clone();
    if basis == Basis::X {
        c.push_layer((0..c.qubit_count).map(Gate::h).collect())?;
    }
    Ok(c)
}

/// Samples all-qubit readouts of `prep` in `basis`: per-shot gate-noise
/// trajectories if any, then readout flips. Substreams: 0 ideal sampling,
/// 1 readout, 2 gate noise.
pub fn sample_logical_shots(
    prep: &Circuit,
    basis: Basis,
    shots: usize,
    noise: &LogicalNoise,
    backend: Backend,
    seed: u64,
) -> Result<Vec<u64>> {
    let c = with_basis_change(prep, basis)?;
    let mut samples = if noise.gate.is_noiseless() {
        let s = run_seeded(&c, backend, &InitialState::Zeros, seed)?;
        sample_shots(&s, shots, rng_stream(seed, 0).random())?
    } else {
        let noisy = with_gate_noise(&c, noise.gate)?;
        let mut rng = rng_stream(seed, 2);
        let mut out = Vec::with_capacity(shots);
        for _ in 0..shots {
            let s = run_seeded(&noisy.sample(&mut rng), backend, &InitialState::Zeros, rng.random())?;
            out.extend(sample_shots(&s, 1, rng.random())?);
        }
        out
    };
    if let Some(m) = &noise.readout {
        samples = corrupt_shots(&samples, c.qubit_count, m, &mut rng_stream(seed, 1));
    }
    Ok(samples)
}

/// Exact decoded expectation `Σ_s P(s) v(s)` of a state measured in `basis`.
fn exact_logical_mean(
    state_circuit: &Circuit,
    basis: Basis,
    decoder: &Decoder,
    readout: Option<&ReadoutModel>,
    correct: bool,
) -> Result<f64> {
    let c = with_basis_change(state_circuit, basis)?;
    let s = run_seeded(&c, Backend::Auto, &InitialState::Zeros, 0)?;
    let n = c.qubit_count;
    if n > 16 {
        // every noiseless outcome is a codeword, so decoding equals the raw parity
        if readout.is_some_and(|m| !m.is_noiseless()) {
            return Err(Error::QubitCountExceeded { n, max: 16 });
        }
        let op = crate::pauli::PauliString::uniform(
            (0..n).filter(|&q| (decoder.readout_mask >> q) & 1 == 1),
            crate::pauli::Pauli::Z,
        );
        return expectation(&s, &op);
    }
    let all: Vec<usize> = (0..n).collect();
    let mut dist: ProbDist = exact_probs(&s, &all)?;
    if let Some(m) = readout {
        dist = corrupt_dist(&dist, m);
    }
    Ok(dist
        .probs
        .iter()
        .map(|(&b, &p)| {
            let v = if correct {
                decoder.decode(b).logical_value
            } else {
                decoder.raw_value(b)
            };
            p * v as f64
        })
        .sum())
}

/// Logical Bloch vector `(⟨X_L⟩, ⟨Y_L⟩, ⟨Z_L⟩)` of the injected state
/// `α|0_L⟩ + β|1_L⟩`. `Y_L` is read as `Z_L` after `X_L^{1/2}`. With
/// `shots = None` the decoded means are computed from exact distributions.
pub fn logical_tomography(
    alpha: C64,
    beta: C64,
    lattice: &LatticeSpec,
    noise: &LogicalNoise,
    shots: Option<usize>,
    correct: bool,
    seed: u64,
) -> Result<[f64; 3]> {
    if lattice.qubit_count > crate::sim::dense::MAX_DENSE_QUBITS {
        return Err(Error::QubitCountExceeded {
            n: lattice.qubit_count,
            max: crate::sim::dense::MAX_DENSE_QUBITS,
        });
    }
    let inj = injection_circuit(lattice, alpha, beta)?;
    let mut rot = inj.clone();
    rot.extend(&xl_half_circuit(lattice)?)?;
    let dz = Decoder::new(lattice, Basis::Z)?;
    let dx = Decoder::new(lattice, Basis::X)?;
    let jobs = [(&inj, Basis::X, &dx), (&rot, Basis::Z, &dz), (&inj, Basis::Z, &dz)];
    let mut out = [0.0; 3];
    for (k, (c, basis, dec)) in jobs.into_iter().enumerate() {
        out[k] = match shots {
            None if noise.gate.is_noiseless() => exact_logical_mean(c, basis, dec, noise.readout.as_ref(), correct)?,
            None => {
                return Err(Error::InvalidParameter(
                    "gate noise needs finite shots for logical tomography".into(),
                ))
            }
            Some(n) => {
                let s = sample_logical_shots(c, basis, n, noise, Backend::Dense, seed.wrapping_add(k as u64))?;
                logical_measure(&s, dec, correct).mean
            }
        };
    }
    Ok(out)
}

/// Bloch vector of `α|0⟩ + β|1⟩`.
pub fn bloch_of(alpha: C64, beta: C64) -> [f64; 3] {
    let c = alpha.conj() * beta;
    [2.0 * c.re, 2.0 * c.im, alpha.norm_sqr() - beta.norm_sqr()]
}

impl LogicalState {
    /// Measurement basis and ideal value.
    pub fn readout(self) -> (Basis, i8) {
        match self {
            LogicalState::Zero => (Basis::Z, 1),
            LogicalState::One => (Basis::Z, -1),
            LogicalState::Plus => (Basis::X, 1),
            LogicalState::Minus => (Basis::X, -1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub t: f64,
    pub raw_error: f64,
    pub corrected_error: f64,
    pub dd: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayConfig {
    pub state: LogicalState,
    pub wait_grid: Vec<f64>,
    pub drift: DriftModel,
    pub dd: DdScheme,
    pub shots: usize,
    pub noise: LogicalNoise,
    pub seed: u64,
}

/// Logical error versus idle time. Zero-mean drift is applied as its exact
/// shot-averaged dephasing channel (Z flips with probability `q(t)`), which
/// keeps the run on the stabilizer backend; a static offset falls back to
/// dense per-shot rotations. Substreams: 0 ideal sampling, 1 readout,
/// 2 gate noise, 3 drift.
pub fn decay_experiment(lattice: &LatticeSpec, cfg: &DecayConfig) -> Result<Vec<DecayPoint>> {
    let (basis, expected) = cfg.state.readout();
    let dec = Decoder::new(lattice, basis)?;
    let prep = logical_state_circuit(lattice, cfg.state)?;
    let mut out = Vec::with_capacity(cfg.wait_grid.len());
    for (i, &t) in cfg.wait_grid.iter().enumerate() {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidParameter(format!("wait time {t} must be >= 0")));
        }
        let seed = cfg.seed.wrapping_add(1_000_003 * i as u64);
        let samples = match cfg.drift.dephasing_probability(t, cfg.dd) {
            Some(q) => {
                let mut s = sample_logical_shots(
                    &prep,
                    basis,
                    cfg.shots,
                    &LogicalNoise {
                        readout: None,
                        gate: cfg.noise.gate,
                    },
                    Backend::Tableau,
                    seed,
                )?;
                if basis == Basis::X && q > 0.0 {
                    // Z errors before the basis change flip X-basis outcomes
                    let mut rng = rng_stream(seed, 3);
                    for shot in s.iter_mut() {
                        let z = sample_dephasing(lattice.qubit_count, q, &mut rng);
                        for &qb in z.factors().keys() {
                            *shot ^= 1 << qb;
                        }
                    }
                }
                if let Some(m) = &cfg.noise.readout {
                    s = corrupt_shots(&s, lattice.qubit_count, m, &mut rng_stream(seed, 1));
                }
                s
            }
            None => {
                if lattice.qubit_count > 12 {
                    return Err(Error::QubitCountExceeded {
                        n: lattice.qubit_count,
                        max: 12,
                    });
                }
                let mut rng = rng_stream(seed, 3);
                let mut s = Vec::with_capacity(cfg.shots);
                for _ in 0..cfg.shots {
                    let c = idle_with_drift(&prep, t, &cfg.drift, cfg.dd, &mut rng)?;
                    s.extend(sample_logical_shots(
                        &c,
                        basis,
                        1,
                        &LogicalNoise {
                            readout: None,
                            gate: cfg.noise.gate,
                        },
                        Backend::Dense,
                        rng.random(),
                    )?);
                }
                if let Some(m) = &cfg.noise.readout {
                    s = corrupt_shots(&s, lattice.qubit_count, m, &mut rng_stream(seed, 1));
                }
                s
            }
        };
        out.push(DecayPoint {
            t,
            raw_error: logical_measure(&samples, &dec, false).error(expected),
            corrected_error: logical_measure(&samples, &dec, true).error(expected),
            dd: cfg.dd == DdScheme::XX,
        });
    }
    Ok(out)
}

pub fn decay_csv(points: &[DecayPoint]) -> String {
    let mut s = String::from("t,raw_error,corrected_error,dd_flag\n");
    for p in points {
        s.push_str(&format!(
            "{},{},{},{}\n",
            p.t, p.raw_error, p.corrected_error, p.dd as u8
        ));
    }
    s
}

/// Final state of a logical-state circuit (used by tests and the CLI).
pub fn logical_state(lattice: &LatticeSpec, which: LogicalState) -> Result<QuantumState> {
    run_seeded(
        &logical_state_circuit(lattice, which)?,
        Backend::Tableau,
        &InitialState::Zeros,
        0,
    )
}
