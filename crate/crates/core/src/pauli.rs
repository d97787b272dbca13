//! Sparse Pauli operators with exact phase tracking.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// Symplectic (x, z) bits. Y is (1, 1).
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Option<Pauli> {
        match (x, z) {
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
            (false, false) => None,
        }
    }

    /// Product `a * b` as (phase exponent of i, result).
    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Pauli, b: Pauli) -> (u8, Option<Pauli>) {
        use Pauli::*;
        match (a, b) {
            (X, X) | (Y, Y) | (Z, Z) => (0, None),
            (X, Y) => (1, Some(Z)),
            (Y, Z) => (1, Some(X)),
            (Z, X) => (1, Some(Y)),
            (Y, X) => (3, Some(Z)),
            (Z, Y) => (3, Some(X)),
            (X, Z) => (3, Some(Y)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A multi-qubit Pauli operator `i^phase * P_{q1} P_{q2} ...`.
///
/// Identity factors are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PauliString {
    factors: BTreeMap<usize, Pauli>,
    phase: u8,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(q: usize, p: Pauli) -> Self {
        let mut s = Self::identity();
        s.factors.insert(q, p);
        s
    }

    /// Builds from (qubit, Pauli) pairs. Repeated qubits are multiplied in order.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Pauli)>>(pairs: I) -> Self {
        let mut s = Self::identity();
        for (q, p) in pairs {
            s = s.mul(&Self::single(q, p));
        }
        s
    }

    pub fn uniform<I: IntoIterator<Item = usize>>(qubits: I, p: Pauli) -> Self {
        Self::from_pairs(qubits.into_iter().map(|q| (q, p)))
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn factors(&self) -> &BTreeMap<usize, Pauli> {
        &self.factors
    }

    pub fn get(&self, q: usize) -> Option<Pauli> {
        self.factors.get(&q).copied()
    }

    pub fn weight(&self) -> usize {
        self.factors.len()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        self.factors.keys().copied().collect()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.factors.keys().next_back().copied()
    }

    /// Hermitian iff the phase is real (±1).
    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// Real sign for Hermitian strings.
    pub fn sign(&self) -> Result<f64> {
        match self.phase {
            0 => Ok(1.0),
            2 => Ok(-1.0),
            p => Err(Error::NotHermitian(p)),
        }
    }

    /// Exact product `self * other`.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        let mut factors = self.factors.clone();
        let mut phase = (self.phase + other.phase) % 4;
        for (&q, &b) in &other.factors {
            match factors.get(&q).copied() {
                None => {
                    factors.insert(q, b);
                }
                Some(a) => {
                    let (ph, r) = Pauli::mul(a, b);
                    phase = (phase + ph) % 4;
                    match r {
                        Some(p) => {
                            factors.insert(q, p);
                        }
                        None => {
                            factors.remove(&q);
                        }
                    }
                }
            }
        }
        PauliString { factors, phase }
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut anti = 0usize;
        let (small, large) = if self.weight() <= other.weight() {
            (self, other)
        } else {
            (other, self)
        };
        for (q, a) in &small.factors {
            if let Some(b) = large.factors.get(q) {
                if a != b {
                    anti += 1;
                }
            }
        }
        anti % 2 == 0
    }

    /// Remaps qubit indices through `f`.
    pub fn map_qubits<F: Fn(usize) -> usize>(&self, f: F) -> PauliString {
        PauliString {
            factors: self.factors.iter().map(|(&q, &p)| (f(q), p)).collect(),
            phase: self.phase,
        }
    }

    /// Restriction to a qubit subset (phase kept).
    pub fn restrict(&self, keep: &[usize]) -> PauliString {
        PauliString {
            factors: self
                .factors
                .iter()
                .filter(|(q, _)| keep.contains(q))
                .map(|(&q, &p)| (q, p))
                .collect(),
            phase: self.phase,
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}")?;
        if self.factors.is_empty() {
            return write!(f, "I");
        }
        for (i, (q, p)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{}{}", p.as_char(), q)?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses the `Display` form, e.g. `-iX0*Z3` or `+I`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse {
            line: 0,
            msg: format!("pauli string {s:?}: {m}"),
        };
        let s = s.trim();
        let (phase, body) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else {
            (0, s)
        };
        if body == "I" {
            return Ok(PauliString::identity().with_phase(phase));
        }
        let mut pairs = Vec::new();
        for tok in body.split('*') {
            let mut chars = tok.chars();
            let p = match chars.next() {
                Some('X') => Pauli::X,
                Some('Y') => Pauli::Y,
                Some('Z') => Pauli::Z,
                _ => return Err(bad("expected X, Y or Z")),
            };
            let q: usize = chars.as_str().parse().map_err(|_| bad("bad qubit index"))?;
            pairs.push((q, p));
        }
        let mut out = PauliString::from_pairs(pairs.iter().copied());
        if out.weight() != pairs.len() {
            return Err(bad("repeated qubit"));
        }
        out.phase = phase;
        Ok(out)
    }
}

/// Convenience for `pauli_mul` as a free function.
pub fn pauli_mul(p: &PauliString, q: &PauliString) -> PauliString {
    p.mul(q)
}
