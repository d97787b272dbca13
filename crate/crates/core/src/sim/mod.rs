//! Circuit execution on the stabilizer-tableau and dense-statevector backends.

pub mod dense;
pub mod dist;
pub mod local;
pub mod tableau;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::mat2;
use crate::pauli::PauliString;
use crate::transpile;

pub use dense::DenseState;
pub use dist::{ProbDist, ShotCounts};
pub use local::LocalState;
pub use tableau::Tableau;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    Tableau,
    Dense,
    /// Tableau for Clifford circuits with stabilizer inputs, dense otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProductState {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
    /// alpha|0⟩ + beta|1⟩.
    Custom(C64, C64),
}

impl ProductState {
    fn prep(&self) -> Option<mat2::M2> {
        use ProductState::*;
        match self {
            Zero => None,
            One => Some(mat2::X),
            Plus => Some(mat2::H),
            Minus => Some(mat2::mul(&mat2::Z, &mat2::H)),
            PlusI => Some(mat2::mul(&mat2::S, &mat2::H)),
            MinusI => Some(mat2::mul(&mat2::SDG, &mat2::H)),
            Custom(a, b) => Some(mat2::state_prep(*a, *b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub enum InitialState {
    #[default]
    Zeros,
    /// One entry per qubit.
    Product(Vec<ProductState>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Stabilizer(Tableau),
    Dense(DenseState),
}

/// Runs a circuit; mid-circuit measurement outcomes use seed 0.
pub fn run(c: &Circuit, backend: Backend, initial: &InitialState) -> Result<QuantumState> {
    run_seeded(c, backend, initial, 0)
}

pub fn run_seeded(c: &Circuit, backend: Backend, initial: &InitialState, seed: u64) -> Result<QuantumState> {
    c.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = c.qubit_count;
    let preps: Vec<(usize, mat2::M2)> = match initial {
        InitialState::Zeros => Vec::new(),
        InitialState::Product(v) => {
            if v.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "initial state has {} qubits, circuit {}",
                    v.len(),
                    n
                )));
            }
            v.iter()
                .enumerate()
                .filter_map(|(q, s)| s.prep().map(|m| (q, m)))
                .collect()
        }
    };
    let backend = match backend {
        Backend::Auto => {
            let clifford_inputs = preps.iter().all(|(_, m)| mat2::clifford_images(m).is_some());
            if c.is_clifford() && clifford_inputs {
                Backend::Tableau
            } else {
                Backend::Dense
            }
        }
        b => b,
    };
    match backend {
        Backend::Tableau => {
            let mut t = Tableau::new(n);
            for (q, m) in &preps {
                t.apply_1q(*q, m)
                    .map_err(|_| Error::NonCliffordOnTableau("initial state".into()))?;
            }
            let c = transpile::expand_controlled_paulis(c)?;
            for g in c.gates() {
                let q = &g.qubits;
                match &g.kind {
                    GateKind::H => t.h(q[0]),
                    GateKind::S => t.s(q[0]),
                    GateKind::Sdg => t.sdg(q[0]),
                    GateKind::X => t.x(q[0]),
                    GateKind::Y => t.y(q[0]),
                    GateKind::Z => t.z(q[0]),
                    GateKind::SqrtY => t.apply_1q(q[0], &mat2::SQRT_Y)?,
                    GateKind::U1q(m) => t.apply_1q(q[0], m)?,
                    GateKind::CNOT => t.cnot(q[0], q[1]),
                    GateKind::CZ => t.cz(q[0], q[1]),
                    GateKind::SWAP => t.swap(q[0], q[1]),
                    GateKind::PrepareZ => t.reset(q[0], &mut rng),
                    GateKind::MeasureZ => {
                        t.measure(q[0], &mut rng);
                    }
                    GateKind::ControlledPauli(_) => unreachable!("expanded above"),
                }
            }
            Ok(QuantumState::Stabilizer(t))
        }
        Backend::Dense | Backend::Auto => {
            let mut s = DenseState::new(n)?;
            for (q, m) in &preps {
                s.apply_1q(*q, m);
            }
            apply_dense(&mut s, c, &mut rng)?;
            Ok(QuantumState::Dense(s))
        }
    }
}

/// Applies a circuit to an existing dense state.
pub fn apply_dense<R: rand::Rng + ?Sized>(s: &mut DenseState, c: &Circuit, rng: &mut R) -> Result<()> {
    if c.qubit_count > s.num_qubits() {
        return Err(Error::DimensionMismatch("circuit wider than state".into()));
    }
    for g in c.gates() {
        let q = &g.qubits;
        match &g.kind {
            GateKind::CNOT => s.cnot(q[0], q[1]),
            GateKind::CZ => s.cz(q[0], q[1]),
            GateKind::SWAP => s.swap(q[0], q[1]),
            GateKind::ControlledPauli(p) => s.apply_pauli(p, Some(q[0])),
            GateKind::PrepareZ => s.reset(q[0], rng),
            GateKind::MeasureZ => {
                s.measure(q[0], rng);
            }
            k => s.apply_1q(q[0], &k.matrix().expect("single-qubit gate")),
        }
    }
    Ok(())
}

impl QuantumState {
    pub fn num_qubits(&self) -> usize {
        match self {
            QuantumState::Stabilizer(t) => t.num_qubits(),
            QuantumState::Dense(d) => d.num_qubits(),
        }
    }

    pub fn as_dense(&self) -> Option<&DenseState> {
        match self {
            QuantumState::Dense(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_tableau(&self) -> Option<&Tableau> {
        match self {
            QuantumState::Stabilizer(t) => Some(t),
            _ => None,
        }
    }
}

pub fn expectation(state: &QuantumState, p: &PauliString) -> Result<f64> {
    match state {
        QuantumState::Stabilizer(t) => t.expectation(p),
        QuantumState::Dense(d) => d.expectation(p),
    }
}

/// Raw computational-basis samples over all qubits (bit q = qubit q).
pub fn sample_shots(state: &QuantumState, shots: usize, seed: u64) -> Result<Vec<u64>> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match state {
        QuantumState::Stabilizer(t) => {
            let (x0, basis) = t.support_coset(&mut rng)?;
            Ok((0..shots)
                .map(|_| {
                    basis
                        .iter()
                        .fold(x0, |acc, &b| if rng.random::<bool>() { acc ^ b } else { acc })
                })
                .collect())
        }
        QuantumState::Dense(d) => {
            let mut cdf = d.probabilities();
            let mut acc = 0.0;
            for p in cdf.iter_mut() {
                acc += *p;
                *p = acc;
            }
            Ok((0..shots)
                .map(|_| {
                    let u = rng.random::<f64>() * acc;
                    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1) as u64
                })
                .collect())
        }
    }
}

pub fn sample(state: &QuantumState, shots: usize, seed: u64) -> Result<ProbDist> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be >= 1".into()));
    }
    let s = sample_shots(state, shots, seed)?;
    Ok(ProbDist::from_samples(state.num_qubits(), &s))
}

pub fn exact_probs(state: &QuantumState, subset: &[usize]) -> Result<ProbDist> {
    let n = state.num_qubits();
    for &q in subset {
        if q >= n {
            return Err(Error::QubitOutOfRange { qubit: q, n });
        }
    }
    match state {
        QuantumState::Stabilizer(t) => {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let (x0, basis) = t.support_coset(&mut rng)?;
            let x0 = dist::project(x0, subset);
            let proj = tableau::reduce_basis(basis.iter().map(|&b| dist::project(b, subset)).collect());
            if proj.len() > 26 {
                return Err(Error::QubitCountExceeded { n: proj.len(), max: 26 });
            }
            let p = 1.0 / (1u64 << proj.len()) as f64;
            let mut probs = std::collections::BTreeMap::new();
            for m in 0..(1u64 << proj.len()) {
                let s = proj
                    .iter()
                    .enumerate()
                    .fold(x0, |acc, (i, &b)| if (m >> i) & 1 == 1 { acc ^ b } else { acc });
                probs.insert(s, p);
            }
            Ok(ProbDist::exact(subset.len(), probs))
        }
        QuantumState::Dense(d) => Ok(ProbDist::from_dense(&d.marginal(subset), None)),
    }
}

/// Second Rényi entropy (natural log) of a subsystem.
pub fn exact_renyi2(state: &QuantumState, subsystem: &[usize]) -> Result<f64> {
    match state {
        QuantumState::Stabilizer(t) => Ok(t.renyi2_bits(subsystem)? as f64 * std::f64::consts::LN_2),
        QuantumState::Dense(d) => d.renyi2(subsystem),
    }
}

pub fn reduced_density_matrix(state: &DenseState, subsystem: &[usize]) -> Result<nalgebra::DMatrix<C64>> {
    state.reduced_density_matrix(subsystem)
}

/// (⟨X⟩, ⟨Y⟩, ⟨Z⟩) of one qubit; works on either backend.
pub fn bloch_vector(state: &QuantumState, qubit: usize) -> Result<[f64; 3]> {
    match state {
        QuantumState::Dense(d) => d.bloch_vector(qubit),
        QuantumState::Stabilizer(t) => {
            use crate::pauli::Pauli;
            Ok([
                t.expectation(&PauliString::single(qubit, Pauli::X))?,
                t.expectation(&PauliString::single(qubit, Pauli::Y))?,
                t.expectation(&PauliString::single(qubit, Pauli::Z))?,
            ])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    fn bell() -> Circuit {
        let mut c = Circuit::new(2);
        c.layer(vec![Gate::h(0)]);
        c.layer(vec![Gate::cnot(0, 1)]);
        c
    }

    #[test]
    fn bell_sampling_both_backends() {
        for b in [Backend::Tableau, Backend::Dense] {
            let s = run(&bell(), b, &InitialState::Zeros).unwrap();
            let d = sample(&s, 100_000, 11).unwrap();
            assert!((d.prob(0) - 0.5).abs() < 0.005, "{b:?}");
            assert!((d.prob(3) - 0.5).abs() < 0.005, "{b:?}");
            let m = exact_probs(&s, &[1]).unwrap();
            assert!((m.prob(0) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_state_samples_zero() {
        let s = run(&Circuit::new(4), Backend::Tableau, &InitialState::Zeros).unwrap();
        let d = sample(&s, 100, 1).unwrap();
        assert_eq!(d.prob(0), 1.0);
    }

    #[test]
    fn non_clifford_rejected_on_tableau() {
        let mut c = Circuit::new(1);
        c.layer(vec![Gate::u1q(0, mat2::rz(0.1)).unwrap()]);
        assert!(matches!(
            run(&c, Backend::Tableau, &InitialState::Zeros),
            Err(Error::NonCliffordOnTableau(_))
        ));
        assert!(matches!(
            run(&c, Backend::Auto, &InitialState::Zeros),
            Ok(QuantumState::Dense(_))
        ));
    }

    #[test]
    fn dense_cap() {
        let c = Circuit::new(27);
        assert!(matches!(
            run(&c, Backend::Dense, &InitialState::Zeros),
            Err(Error::QubitCountExceeded { .. })
        ));
    }

    #[test]
    fn product_initial_states() {
        use ProductState::*;
        let init = InitialState::Product(vec![One, Plus, Minus, PlusI, MinusI, Zero]);
        let c = Circuit::new(6);
        for b in [Backend::Tableau, Backend::Dense] {
            let s = run(&c, b, &init).unwrap();
            let bl: Vec<[f64; 3]> = (0..6).map(|q| bloch_vector(&s, q).unwrap()).collect();
            let want = [
                [0.0, 0.0, -1.0],
                [1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, -1.0, 0.0],
                [0.0, 0.0, 1.0],
            ];
            for q in 0..6 {
                for k in 0..3 {
                    assert!((bl[q][k] - want[q][k]).abs() < 1e-12, "{b:?} q{q}");
                }
            }
        }
    }
}
