//! Reduced states of small subsystems, used to compute outcome distributions
//! under many different local measurement bases.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::mat2::{self, M2};
use crate::pauli::{Pauli, PauliString};

use super::QuantumState;

#[derive(Debug, Clone)]
pub enum LocalState {
    /// `ρ = 2^-k Σ_{g ∈ G} g` for the listed group elements (k = `qubits`).
    Stabilizer {
        qubits: usize,
        group: Vec<PauliString>,
    },
    Density(DMatrix<C64>),
}

impl LocalState {
    /// Reduced state of `subsystem` (local qubit j = `subsystem[j]`).
    pub fn from_state(state: &QuantumState, subsystem: &[usize]) -> Result<LocalState> {
        if subsystem.is_empty() {
            return Err(Error::EmptySubsystem);
        }
        match state {
            QuantumState::Stabilizer(t) => {
                let gens = t.local_generators(subsystem)?;
                if gens.len() > 20 {
                    return Err(Error::QubitCountExceeded { n: gens.len(), max: 20 });
                }
                let mut group = vec![PauliString::identity()];
                for g in &gens {
                    let more: Vec<PauliString> = group.iter().map(|h| h.mul(g)).collect();
                    group.extend(more);
                }
                Ok(LocalState::Stabilizer {
                    qubits: subsystem.len(),
                    group,
                })
            }
            QuantumState::Dense(d) => {
                if subsystem.len() > 12 {
                    return Err(Error::QubitCountExceeded {
                        n: subsystem.len(),
                        max: 12,
                    });
                }
                Ok(LocalState::Density(d.reduced_density_matrix(subsystem)?))
            }
        }
    }

    pub fn qubits(&self) -> usize {
        match self {
            LocalState::Stabilizer { qubits, .. } => *qubits,
            LocalState::Density(m) => m.nrows().trailing_zeros() as usize,
        }
    }

    pub fn purity(&self) -> f64 {
        match self {
            LocalState::Stabilizer { qubits, group } => group.len() as f64 / (1u64 << qubits) as f64,
            LocalState::Density(m) => m.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// Outcome probabilities after applying `u[j]` to local qubit j and
    /// measuring in the computational basis.
    pub fn probabilities(&self, u: &[M2]) -> Result<Vec<f64>> {
        let k = self.qubits();
        if u.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "{} unitaries for {} qubits",
                u.len(),
                k
            )));
        }
        match self {
            LocalState::Stabilizer { group, .. } => {
                // ⟨0|u P u†|0⟩ per qubit and Pauli; ⟨1|…|1⟩ is its negative
                let v: Vec<[f64; 3]> = u
                    .iter()
                    .map(|m| {
                        let ud = mat2::dagger(m);
                        [Pauli::X, Pauli::Y, Pauli::Z].map(|p| mat2::mul(&mat2::mul(m, &mat2::pauli(p)), &ud)[0][0].re)
                    })
                    .collect();
                let dim = 1usize << k;
                let mut f = vec![0.0; dim];
                for g in group {
                    let mut c = g.sign()?;
                    let mut mask = 0usize;
                    for (&q, &p) in g.factors() {
                        let idx = match p {
                            Pauli::X => 0,
                            Pauli::Y => 1,
                            Pauli::Z => 2,
                        };
                        c *= v[q][idx];
                        mask |= 1 << q;
                    }
                    f[mask] += c;
                }
                walsh_hadamard(&mut f);
                let norm = 1.0 / dim as f64;
                Ok(f.into_iter().map(|x| x * norm).collect())
            }
            LocalState::Density(rho) => {
                let mut r = rho.clone();
                let dim = r.nrows();
                for (q, m) in u.iter().enumerate() {
                    let bit = 1usize << q;
                    // rows: r ← U r
                    for col in 0..dim {
                        for i in 0..dim {
                            if i & bit == 0 {
                                let (a, b) = (r[(i, col)], r[(i | bit, col)]);
                                r[(i, col)] = m[0][0] * a + m[0][1] * b;
                                r[(i | bit, col)] = m[1][0] * a + m[1][1] * b;
                            }
                        }
                    }
                    // columns: r ← r U†
                    for row in 0..dim {
                        for j in 0..dim {
                            if j & bit == 0 {
                                let (a, b) = (r[(row, j)], r[(row, j | bit)]);
                                r[(row, j)] = a * m[0][0].conj() + b * m[0][1].conj();
                                r[(row, j | bit)] = a * m[1][0].conj() + b * m[1][1].conj();
                            }
                        }
                    }
                }
                Ok((0..dim).map(|i| r[(i, i)].re.max(0.0)).collect())
            }
        }
    }
}

/// In-place unnormalized transform `f̂(s) = Σ_m f(m) (-1)^{|s∧m|}`.
pub fn walsh_hadamard(f: &mut [f64]) {
    let n = f.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (f[j], f[j + h]);
                f[j] = a + b;
                f[j + h] = a - b;
            }
        }
        h *= 2;
    }
}
