//! Dense statevector backend. Qubit `q` is bit `q` of the amplitude index.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::mat2::M2;
use crate::pauli::{Pauli, PauliString};

pub const MAX_DENSE_QUBITS: usize = 26;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<C64>,
}

impl DenseState {
    /// |0…0⟩.
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_DENSE_QUBITS {
            return Err(Error::QubitCountExceeded {
                n,
                max: MAX_DENSE_QUBITS,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        Ok(DenseState { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::DimensionMismatch("length is not a power of two".into()));
        }
        let n = amps.len().trailing_zeros() as usize;
        if n > MAX_DENSE_QUBITS {
            return Err(Error::QubitCountExceeded {
                n,
                max: MAX_DENSE_QUBITS,
            });
        }
        Ok(DenseState { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &DenseState) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &DenseState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn apply_1q(&mut self, q: usize, m: &M2) {
        let bit = 1usize << q;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for i in base..base + bit {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += 2 * bit;
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        let m = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & m == m {
                *amp = -*amp;
            }
        }
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        let (cb, tb) = (1usize << c, 1usize << t);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        let (ab, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ab != 0 && i & bb == 0 {
                self.amps.swap(i, (i ^ ab) | bb);
            }
        }
    }

    /// Applies `P` (including its phase) on the subspace where `control` is 1,
    /// or everywhere when `control` is `None`.
    pub fn apply_pauli(&mut self, p: &PauliString, control: Option<usize>) {
        let mut flip = 0usize;
        let mut zmask = 0usize;
        let mut ys = 0u32;
        for (&q, &pl) in p.factors() {
            let (x, z) = pl.bits();
            if x {
                flip |= 1 << q;
            }
            if z {
                zmask |= 1 << q;
            }
            if pl == Pauli::Y {
                ys += 1;
            }
        }
        // P = i^phase * i^{#Y} * X^flip Z^zmask (Y = iXZ)
        let base = C64::i().powu((p.phase() as u32 + ys) % 4);
        let cmask = control.map(|c| 1usize << c).unwrap_or(0);
        let mut out = self.amps.clone();
        for (i, &a) in self.amps.iter().enumerate() {
            if i & cmask != cmask {
                continue;
            }
            let sign = if (i & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[i ^ flip] = base * sign * a;
        }
        self.amps = out;
    }

    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if let Some(q) = p.max_qubit() {
            if q >= self.n {
                return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
            }
        }
        let mut t = self.clone();
        t.apply_pauli(p, None);
        let v = self.inner(&t);
        Ok(v.re)
    }

    /// Probability of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal probabilities over `subset` (bit i of the outcome = subset[i]).
    pub fn marginal(&self, subset: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; 1 << subset.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut s = 0usize;
            for (j, &q) in subset.iter().enumerate() {
                s |= ((i >> q) & 1) << j;
            }
            out[s] += p;
        }
        out
    }

    /// Projective Z measurement; returns `true` for outcome 1.
    pub fn measure<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> bool {
        let bit = 1usize << q;
        let p1: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        let outcome = rng.random::<f64>() < p1;
        let keep = if outcome { p1 } else { 1.0 - p1 };
        let s = 1.0 / keep.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit) != 0) == outcome {
                *a *= s;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        outcome
    }

    pub fn reset<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) {
        if self.measure(q, rng) {
            self.apply_1q(q, &crate::mat2::X);
        }
    }

    /// Reduced density matrix on `subsystem`; row index bit j = subsystem[j].
    pub fn reduced_density_matrix(&self, subsystem: &[usize]) -> Result<DMatrix<C64>> {
        for &q in subsystem {
            if q >= self.n {
                return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
            }
        }
        let k = subsystem.len();
        let mut sub_mask = 0usize;
        for &q in subsystem {
            sub_mask |= 1 << q;
        }
        let rest: Vec<usize> = (0..self.n).filter(|q| sub_mask & (1 << q) == 0).collect();
        let dim = 1usize << k;
        let mut rho = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        let spread = |s: usize, qs: &[usize]| -> usize {
            qs.iter()
                .enumerate()
                .fold(0usize, |acc, (j, &q)| acc | (((s >> j) & 1) << q))
        };
        let sub_index: Vec<usize> = (0..dim).map(|s| spread(s, subsystem)).collect();
        let mut col = vec![C64::new(0.0, 0.0); dim];
        for e in 0..(1usize << rest.len()) {
            let base = spread(e, &rest);
            for s in 0..dim {
                col[s] = self.amps[base | sub_index[s]];
            }
            for a in 0..dim {
                if col[a] == C64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..dim {
                    rho[(a, b)] += col[a] * col[b].conj();
                }
            }
        }
        Ok(rho)
    }

    /// Second Rényi entropy (natural log) of `subsystem`.
    pub fn renyi2(&self, subsystem: &[usize]) -> Result<f64> {
        if subsystem.is_empty() {
            return Ok(0.0);
        }
        let rho = self.reduced_density_matrix(subsystem)?;
        let purity: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
        Ok(-purity.ln())
    }

    pub fn bloch_vector(&self, q: usize) -> Result<[f64; 3]> {
        let rho = self.reduced_density_matrix(&[q])?;
        Ok([
            2.0 * rho[(1, 0)].re,
            2.0 * rho[(1, 0)].im,
            (rho[(0, 0)] - rho[(1, 1)]).re,
        ])
    }
}
