//! Parameterized noise: uncorrelated readout flips, depolarizing gate noise
//! and quasi-static frequency drift during idles.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::mat2;
use crate::pauli::{Pauli, PauliString};
use crate::sim::ProbDist;
use crate::transpile;

/// Independent RNG substream `stream` of `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidParameter(format!("{name} = {p} outside [0, 1]")));
    }
    Ok(())
}

/// Uncorrelated readout error: `e0` is P(read 1 | 0), `e1` is P(read 0 | 1).
/// Per-qubit rates, when present, are indexed by bit position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutModel {
    pub e0: f64,
    pub e1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_qubit: Option<Vec<(f64, f64)>>,
}

impl ReadoutModel {
    pub fn new(e0: f64, e1: f64) -> Result<Self> {
        check_prob("e0", e0)?;
        check_prob("e1", e1)?;
        Ok(ReadoutModel {
            e0,
            e1,
            per_qubit: None,
        })
    }

    pub fn noiseless() -> Self {
        ReadoutModel {
            e0: 0.0,
            e1: 0.0,
            per_qubit: None,
        }
    }

    pub fn per_qubit(rates: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &rates {
            check_prob("e0", a)?;
            check_prob("e1", b)?;
        }
        Ok(ReadoutModel {
            e0: 0.0,
            e1: 0.0,
            per_qubit: Some(rates),
        })
    }

    pub fn rates(&self, bit: usize) -> (f64, f64) {
        match &self.per_qubit {
            Some(v) => v.get(bit).copied().unwrap_or((self.e0, self.e1)),
            None => (self.e0, self.e1),
        }
    }

    pub fn is_noiseless(&self) -> bool {
        match &self.per_qubit {
            Some(v) => v.iter().all(|&(a, b)| a == 0.0 && b == 0.0),
            None => self.e0 == 0.0 && self.e1 == 0.0,
        }
    }

    /// Column-stochastic single-bit matrix `[[1-e0, e1], [e0, 1-e1]]`.
    pub fn matrix(&self, bit: usize) -> [[f64; 2]; 2] {
        let (e0, e1) = self.rates(bit);
        [[1.0 - e0, e1], [e0, 1.0 - e1]]
    }
}

/// Applies the product response matrix to a distribution, one bit at a time.
pub fn corrupt_dist(dist: &ProbDist, model: &ReadoutModel) -> ProbDist {
    let mut probs = dist.probs.clone();
    for bit in 0..dist.bits {
        let (e0, e1) = model.rates(bit);
        if e0 == 0.0 && e1 == 0.0 {
            continue;
        }
        let mut next: BTreeMap<u64, f64> = BTreeMap::new();
        for (&s, &p) in &probs {
            let one = (s >> bit) & 1 == 1;
            let flip = if one { e1 } else { e0 };
            if flip < 1.0 {
                *next.entry(s).or_default() += p * (1.0 - flip);
            }
            if flip > 0.0 {
                *next.entry(s ^ (1 << bit)).or_default() += p * flip;
            }
        }
        probs = next;
    }
    ProbDist {
        bits: dist.bits,
        probs,
        shot_count: dist.shot_count,
        unfolded: dist.unfolded,
    }
}

/// Flips each bit of each shot independently.
pub fn corrupt_shots<R: Rng + ?Sized>(shots: &[u64], bits: usize, model: &ReadoutModel, rng: &mut R) -> Vec<u64> {
    if model.is_noiseless() {
        return shots.to_vec();
    }
    let rates: Vec<(f64, f64)> = (0..bits).map(|b| model.rates(b)).collect();
    shots
        .iter()
        .map(|&s| {
            let mut out = s;
            for (b, &(e0, e1)) in rates.iter().enumerate() {
                let p = if (s >> b) & 1 == 1 { e1 } else { e0 };
                if p > 0.0 && rng.random::<f64>() < p {
                    out ^= 1 << b;
                }
            }
            out
        })
        .collect()
}

/// Gate-noise parameters: two-qubit depolarizing after every CZ and
/// (optionally) single-qubit depolarizing after every 1q gate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GateNoise {
    pub p_cz: f64,
    #[serde(default)]
    pub p_1q: f64,
}

impl GateNoise {
    pub fn new(p_cz: f64, p_1q: f64) -> Result<Self> {
        check_prob("p_cz", p_cz)?;
        check_prob("p_1q", p_1q)?;
        Ok(GateNoise { p_cz, p_1q })
    }

    pub fn is_noiseless(&self) -> bool {
        self.p_cz == 0.0 && self.p_1q == 0.0
    }
}

const PAULIS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

fn pauli_gate(q: usize, p: Pauli) -> Gate {
    match p {
        Pauli::X => Gate::x(q),
        Pauli::Y => Gate::y(q),
        Pauli::Z => Gate::z(q),
    }
}

/// Trajectory sampler for a CZ-native compilation of a circuit.
#[derive(Debug, Clone)]
pub struct NoisyCircuit {
    pub circuit: Circuit,
    pub noise: GateNoise,
}

/// Compiles `c` to CZ form (controlled Paulis expanded, CNOTs replaced) and
/// attaches depolarizing noise: after each CZ, with probability `p` one of the
/// 15 non-identity two-qubit Paulis is applied uniformly at random.
pub fn depolarize_after_cz(c: &Circuit, p: f64) -> Result<NoisyCircuit> {
    with_gate_noise(c, GateNoise::new(p, 0.0)?)
}

pub fn with_gate_noise(c: &Circuit, noise: GateNoise) -> Result<NoisyCircuit> {
    Ok(NoisyCircuit {
        circuit: transpile::cnot_to_cz(c)?,
        noise,
    })
}

impl NoisyCircuit {
    /// One stochastic realisation: error layers are inserted after the
    /// layers where faults occurred.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Circuit {
        if self.noise.is_noiseless() {
            return self.circuit.clone();
        }
        let mut out = Circuit::new(self.circuit.qubit_count);
        out.metadata = self.circuit.metadata.clone();
        for layer in &self.circuit.layers {
            let mut faults = Vec::new();
            for g in layer {
                match g.kind {
                    GateKind::CZ if self.noise.p_cz > 0.0 && rng.random::<f64>() < self.noise.p_cz => {
                        let k = rng.random_range(1..16usize);
                        let (a, b) = (k / 4, k % 4);
                        if a > 0 {
                            faults.push(pauli_gate(g.qubits[0], PAULIS[a - 1]));
                        }
                        if b > 0 {
                            faults.push(pauli_gate(g.qubits[1], PAULIS[b - 1]));
                        }
                    }
                    GateKind::MeasureZ | GateKind::PrepareZ | GateKind::CZ => {}
                    _ if g.kind.arity() == 1 && self.noise.p_1q > 0.0 && rng.random::<f64>() < self.noise.p_1q => {
                        faults.push(pauli_gate(g.qubits[0], PAULIS[rng.random_range(0..3usize)]));
                    }
                    _ => {}
                }
            }
            out.layers.push(layer.clone());
            if !faults.is_empty() {
                out.layers.push(faults);
            }
        }
        out
    }
}

/// Quasi-static frequency drift: every shot draws per-qubit offsets
/// `Δf ~ N(offset_f, sigma_f²)` (Hz) that stay constant during the shot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftModel {
    pub sigma_f: f64,
    #[serde(default)]
    pub offset_f: f64,
}

impl DriftModel {
    pub fn new(sigma_f: f64) -> Result<Self> {
        if sigma_f.is_nan() || sigma_f < 0.0 {
            return Err(Error::InvalidParameter(format!("sigma_f = {sigma_f} must be >= 0")));
        }
        Ok(DriftModel { sigma_f, offset_f: 0.0 })
    }

    pub fn with_offset(mut self, offset_f: f64) -> Self {
        self.offset_f = offset_f;
        self
    }

    /// Accumulated Z-rotation angles `2π Δf t` for one shot.
    pub fn sample_phases<R: Rng + ?Sized>(&self, n: usize, wait_t: f64, rng: &mut R) -> Vec<f64> {
        let tau = 2.0 * std::f64::consts::PI * wait_t;
        if self.sigma_f == 0.0 {
            return vec![tau * self.offset_f; n];
        }
        let normal = Normal::new(self.offset_f, self.sigma_f).expect("sigma_f checked non-negative");
        (0..n).map(|_| tau * normal.sample(rng)).collect()
    }

    /// For zero-mean offsets the shot-averaged idle is exactly the dephasing
    /// channel `ρ → (1-q)ρ + q ZρZ` with `q = (1 - exp(-σ_φ²/2))/2`. With a
    /// static offset the average has a coherent part and `None` is returned.
    pub fn dephasing_probability(&self, wait_t: f64, dd: DdScheme) -> Option<f64> {
        if self.offset_f != 0.0 {
            return None;
        }
        if dd == DdScheme::XX {
            return Some(0.0);
        }
        let s = 2.0 * std::f64::consts::PI * self.sigma_f * wait_t;
        Some(0.5 * (1.0 - (-0.5 * s * s).exp()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum DdScheme {
    #[default]
    None,
    /// X on every qubit at t/4 and 3t/4.
    XX,
}

impl std::str::FromStr for DdScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "off" => Ok(DdScheme::None),
            "xx" | "x" | "on" => Ok(DdScheme::XX),
            _ => Err(Error::InvalidParameter(format!("unknown echo scheme {s:?}"))),
        }
    }
}

/// Appends one shot of an idle of length `wait_t` to `prep`. Without echoes
/// each qubit picks up `Rz(φ)`; with `XX` the idle is split as
/// `Rz(φ/4) X Rz(φ/2) X Rz(φ/4)`, which is the identity for constant `φ`.
pub fn idle_with_drift<R: Rng + ?Sized>(
    prep: &Circuit,
    wait_t: f64,
    model: &DriftModel,
    dd: DdScheme,
    rng: &mut R,
) -> Result<Circuit> {
    if wait_t.is_nan() || wait_t < 0.0 {
        return Err(Error::InvalidParameter(format!("wait_t = {wait_t} must be >= 0")));
    }
    let n = prep.qubit_count;
    let mut c = prep.clone();
    if wait_t == 0.0 {
        return Ok(c);
    }
    let phases = model.sample_phases(n, wait_t, rng);
    let rz_layer = |frac: f64| -> Result<Vec<Gate>> {
        phases
            .iter()
            .enumerate()
            .map(|(q, &phi)| Gate::u1q(q, mat2::rz(phi * frac)))
            .collect()
    };
    match dd {
        DdScheme::None => c.push_layer(rz_layer(1.0)?)?,
        DdScheme::XX => {
            c.push_layer(rz_layer(0.25)?)?;
            c.push_layer((0..n).map(Gate::x).collect())?;
            c.push_layer(rz_layer(0.5)?)?;
            c.push_layer((0..n).map(Gate::x).collect())?;
            c.push_layer(rz_layer(0.25)?)?;
        }
    }
    Ok(c)
}

/// Samples the Z errors of the equivalent dephasing channel for one shot.
pub fn sample_dephasing<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> PauliString {
    PauliString::uniform((0..n).filter(|_| q > 0.0 && rng.random::<f64>() < q), Pauli::Z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{run, Backend, DenseState, InitialState, QuantumState};

    #[test]
    fn readout_single_bit() {
        let m = ReadoutModel::new(0.0, 0.05).unwrap();
        let d = corrupt_dist(&ProbDist::point(1, 1), &m);
        assert!((d.prob(1) - 0.95).abs() < 1e-15);
        assert!((d.prob(0) - 0.05).abs() < 1e-15);
        let same = corrupt_dist(&ProbDist::point(3, 5), &ReadoutModel::noiseless());
        assert_eq!(same.probs, ProbDist::point(3, 5).probs);
    }

    #[test]
    fn readout_matches_explicit_matrix() {
        // dense Kronecker oracle on 9 bits
        let bits = 9;
        let m = ReadoutModel::new(0.01, 0.05).unwrap();
        let mut rng = rng_stream(3, 0);
        let raw: Vec<f64> = (0..1 << bits).map(|_| rng.random::<f64>()).collect();
        let tot: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|x| x / tot).collect();
        let got = corrupt_dist(&ProbDist::from_dense(&p, None), &m).to_dense().unwrap();
        for (o, g) in got.iter().enumerate() {
            let mut want = 0.0;
            for (t, pt) in p.iter().enumerate() {
                let mut r = 1.0;
                for b in 0..bits {
                    let mb = m.matrix(b);
                    r *= mb[(o >> b) & 1][(t >> b) & 1];
                }
                want += r * pt;
            }
            assert!((g - want).abs() < 1e-14);
        }
    }

    #[test]
    fn shot_mode_agrees_with_exact() {
        let m = ReadoutModel::new(0.02, 0.07).unwrap();
        let shots = vec![0b01u64; 100_000];
        let mut rng = rng_stream(11, 0);
        let noisy = ProbDist::from_samples(2, &corrupt_shots(&shots, 2, &m, &mut rng));
        let exact = corrupt_dist(&ProbDist::point(2, 1), &m);
        for s in 0..4 {
            let p = exact.prob(s);
            let sigma = (p * (1.0 - p) / 1e5).sqrt();
            assert!((noisy.prob(s) - p).abs() <= 3.0 * sigma + 1e-12, "s={s}");
        }
    }

    #[test]
    fn invalid_rates_rejected() {
        assert!(ReadoutModel::new(-0.1, 0.0).is_err());
        assert!(GateNoise::new(1.5, 0.0).is_err());
        assert!(DriftModel::new(-1.0).is_err());
    }

    #[test]
    fn zero_noise_is_noiseless() {
        let mut c = Circuit::new(2);
        c.push_layer(vec![Gate::h(0)]).unwrap();
        c.push_layer(vec![Gate::cnot(0, 1)]).unwrap();
        let nc = depolarize_after_cz(&c, 0.0).unwrap();
        let mut rng = rng_stream(0, 0);
        assert_eq!(nc.sample(&mut rng).layers, nc.circuit.layers);
    }

    #[test]
    fn full_depolarizing_scrambles_bell_parity() {
        let mut c = Circuit::new(2);
        c.push_layer(vec![Gate::h(0)]).unwrap();
        c.push_layer(vec![Gate::cnot(0, 1)]).unwrap();
        let nc = depolarize_after_cz(&c, 1.0).unwrap();
        let zz: PauliString = "Z0*Z1".parse().unwrap();
        let mut rng = rng_stream(5, 0);
        let shots = 3000;
        let mut sum = 0.0;
        for _ in 0..shots {
            let s = run(&nc.sample(&mut rng), Backend::Tableau, &InitialState::Zeros).unwrap();
            sum += crate::sim::expectation(&s, &zz).unwrap();
        }
        // 7 of the 15 faults commute with the final ZZ, 8 anticommute
        let mean = sum / shots as f64;
        assert!((mean + 1.0 / 15.0).abs() < 0.06, "{mean}");
    }

    fn dense(c: &Circuit) -> DenseState {
        match run(c, Backend::Dense, &InitialState::Zeros).unwrap() {
            QuantumState::Dense(d) => d,
            _ => unreachable!(),
        }
    }

    #[test]
    fn static_offset_gives_pi_rotation() {
        let mut prep = Circuit::new(1);
        prep.push_layer(vec![Gate::h(0)]).unwrap();
        let m = DriftModel::new(0.0).unwrap().with_offset(500e3);
        let mut rng = rng_stream(0, 0);
        let c = idle_with_drift(&prep, 1e-6, &m, DdScheme::None, &mut rng).unwrap();
        let b = dense(&c).bloch_vector(0).unwrap();
        assert!((b[0] + 1.0).abs() < 1e-12);
        let c = idle_with_drift(&prep, 1e-6, &m, DdScheme::XX, &mut rng).unwrap();
        let b = dense(&c).bloch_vector(0).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dephasing_channel_matches_average() {
        let m = DriftModel::new(100e3).unwrap();
        let t = 2e-6;
        let q = m.dephasing_probability(t, DdScheme::None).unwrap();
        let mut prep = Circuit::new(1);
        prep.push_layer(vec![Gate::h(0)]).unwrap();
        let mut rng = rng_stream(9, 0);
        let shots = 20_000;
        let mut x = 0.0;
        for _ in 0..shots {
            let c = idle_with_drift(&prep, t, &m, DdScheme::None, &mut rng).unwrap();
            x += dense(&c).bloch_vector(0).unwrap()[0];
        }
        let mean = x / shots as f64;
        // <X> after dephasing is 1 - 2q; per-shot cos φ has variance below 1/2
        assert!(
            (mean - (1.0 - 2.0 * q)).abs() < 4.0 * (0.5 / shots as f64).sqrt(),
            "{mean} vs {}",
            1.0 - 2.0 * q
        );
        assert_eq!(m.dephasing_probability(t, DdScheme::XX), Some(0.0));
        assert_eq!(m.with_offset(1.0).dephasing_probability(t, DdScheme::None), None);
    }

    #[test]
    fn substreams_differ() {
        let a: u64 = rng_stream(1, 0).random();
        let b: u64 = rng_stream(1, 1).random();
        assert_ne!(a, b);
    }
}
