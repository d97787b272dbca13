//! Stabilizer tableau with destabilizers.
//!
//! Storage is column-major: for every qubit a packed bit column over the
//! `2n` rows (destabilizers `0..n`, stabilizers `n..2n`), so single- and
//! two-qubit gates are a handful of word operations per 64 rows.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2;
use crate::mat2::{self, M2};
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, PartialEq)]
pub struct Tableau {
    n: usize,
    w: usize,
    xs: Vec<Vec<u64>>,
    zs: Vec<Vec<u64>>,
    r: Vec<u64>,
}

/// Exponent of i in the product of single-qubit Paulis (x1,z1)·(x2,z2).
#[inline]
fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 as i32 - x2 as i32,
        (true, false) => z2 as i32 * (2 * x2 as i32 - 1),
        (false, true) => x2 as i32 * (1 - 2 * z2 as i32),
    }
}

/// A single row extracted from a tableau: Hermitian Pauli with sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Row {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
    pub neg: bool,
}

impl Row {
    fn identity(n: usize) -> Row {
        Row {
            x: vec![false; n],
            z: vec![false; n],
            neg: false,
        }
    }

    /// self ← other · self
    fn left_mul(&mut self, other: &Row) {
        let mut e = 2 * (self.neg as i32) + 2 * (other.neg as i32);
        for j in 0..self.x.len() {
            e += g(other.x[j], other.z[j], self.x[j], self.z[j]);
            self.x[j] ^= other.x[j];
            self.z[j] ^= other.z[j];
        }
        self.neg = e.rem_euclid(4) == 2;
    }

    fn to_pauli(&self) -> PauliString {
        let pairs = (0..self.x.len()).filter_map(|j| Pauli::from_bits(self.x[j], self.z[j]).map(|p| (j, p)));
        PauliString::from_pairs(pairs).with_phase(if self.neg { 2 } else { 0 })
    }
}

impl Tableau {
    /// |0…0⟩.
    pub fn new(n: usize) -> Self {
        let w = gf2::words(2 * n).max(1);
        let mut t = Tableau {
            n,
            w,
            xs: vec![vec![0; w]; n],
            zs: vec![vec![0; w]; n],
            r: vec![0; w],
        };
        for q in 0..n {
            gf2::set(&mut t.xs[q], q, true);
            gf2::set(&mut t.zs[q], n + q, true);
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
        }
        Ok(())
    }

    pub fn h(&mut self, q: usize) {
        for k in 0..self.w {
            self.r[k] ^= self.xs[q][k] & self.zs[q][k];
        }
        std::mem::swap(&mut self.xs[q], &mut self.zs[q]);
    }

    pub fn s(&mut self, q: usize) {
        for k in 0..self.w {
            let x = self.xs[q][k];
            self.r[k] ^= x & self.zs[q][k];
            self.zs[q][k] ^= x;
        }
    }

    pub fn sdg(&mut self, q: usize) {
        self.z(q);
        self.s(q);
    }

    pub fn x(&mut self, q: usize) {
        for k in 0..self.w {
            self.r[k] ^= self.zs[q][k];
        }
    }

    pub fn z(&mut self, q: usize) {
        for k in 0..self.w {
            self.r[k] ^= self.xs[q][k];
        }
    }

    pub fn y(&mut self, q: usize) {
        for k in 0..self.w {
            self.r[k] ^= self.xs[q][k] ^ self.zs[q][k];
        }
    }

    pub fn cnot(&mut self, a: usize, b: usize) {
        for k in 0..self.w {
            let (xa, za, xb, zb) = (self.xs[a][k], self.zs[a][k], self.xs[b][k], self.zs[b][k]);
            self.r[k] ^= xa & zb & !(xb ^ za);
            self.xs[b][k] = xb ^ xa;
            self.zs[a][k] = za ^ zb;
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        for k in 0..self.w {
            let (xa, za, xb, zb) = (self.xs[a][k], self.zs[a][k], self.xs[b][k], self.zs[b][k]);
            self.r[k] ^= xa & xb & (za ^ zb);
            self.zs[a][k] = za ^ xb;
            self.zs[b][k] = zb ^ xa;
        }
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        self.xs.swap(a, b);
        self.zs.swap(a, b);
    }

    /// Applies a single-qubit Clifford given by its matrix.
    pub fn apply_1q(&mut self, q: usize, u: &M2) -> Result<()> {
        let imgs = mat2::clifford_images(u).ok_or_else(|| Error::NonCliffordOnTableau("U1q".into()))?;
        let bits = |p: Pauli| p.bits();
        let [(nx, px), (ny, py), (nz, pz)] = imgs;
        for k in 0..self.w {
            let (x, z) = (self.xs[q][k], self.zs[q][k]);
            let mx = x & !z;
            let my = x & z;
            let mz = z & !x;
            let sel = |m: u64, b: bool| if b { m } else { 0 };
            self.xs[q][k] = sel(mx, bits(px).0) | sel(my, bits(py).0) | sel(mz, bits(pz).0);
            self.zs[q][k] = sel(mx, bits(px).1) | sel(my, bits(py).1) | sel(mz, bits(pz).1);
            self.r[k] ^= sel(mx, nx) | sel(my, ny) | sel(mz, nz);
        }
        Ok(())
    }

    fn row(&self, i: usize) -> Row {
        Row {
            x: (0..self.n).map(|q| gf2::get(&self.xs[q], i)).collect(),
            z: (0..self.n).map(|q| gf2::get(&self.zs[q], i)).collect(),
            neg: gf2::get(&self.r, i),
        }
    }

    fn set_row(&mut self, i: usize, row: &Row) {
        for q in 0..self.n {
            gf2::set(&mut self.xs[q], i, row.x[q]);
            gf2::set(&mut self.zs[q], i, row.z[q]);
        }
        gf2::set(&mut self.r, i, row.neg);
    }

    /// rows[h] ← rows[i] · rows[h]
    fn rowsum(&mut self, h: usize, i: usize) {
        let mut e = 2 * (gf2::get(&self.r, h) as i32) + 2 * (gf2::get(&self.r, i) as i32);
        for q in 0..self.n {
            let (xi, zi) = (gf2::get(&self.xs[q], i), gf2::get(&self.zs[q], i));
            let (xh, zh) = (gf2::get(&self.xs[q], h), gf2::get(&self.zs[q], h));
            e += g(xi, zi, xh, zh);
            gf2::set(&mut self.xs[q], h, xh ^ xi);
            gf2::set(&mut self.zs[q], h, zh ^ zi);
        }
        gf2::set(&mut self.r, h, e.rem_euclid(4) == 2);
    }

    /// Z-basis measurement; returns `true` for outcome 1.
    pub fn measure<R: Rng + ?Sized>(&mut self, a: usize, rng: &mut R) -> bool {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&i| gf2::get(&self.xs[a], i)) {
            for i in 0..2 * n {
                if i != p && gf2::get(&self.xs[a], i) {
                    self.rowsum(i, p);
                }
            }
            let prow = self.row(p);
            self.set_row(p - n, &prow);
            let outcome: bool = rng.random();
            let mut zrow = Row::identity(n);
            zrow.z[a] = true;
            zrow.neg = outcome;
            self.set_row(p, &zrow);
            outcome
        } else {
            let mut acc = Row::identity(n);
            for i in 0..n {
                if gf2::get(&self.xs[a], i) {
                    acc.left_mul(&self.row(i + n));
                }
            }
            acc.neg
        }
    }

    /// Resets a qubit to |0⟩.
    pub fn reset<R: Rng + ?Sized>(&mut self, a: usize, rng: &mut R) {
        if self.measure(a, rng) {
            self.x(a);
        }
    }

    pub fn stabilizer(&self, i: usize) -> PauliString {
        self.row(self.n + i).to_pauli()
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        (0..self.n).map(|i| self.stabilizer(i)).collect()
    }

    fn pauli_row(&self, p: &PauliString) -> Result<Row> {
        let mut row = Row::identity(self.n);
        for (&q, &pl) in p.factors() {
            self.check(q)?;
            let (x, z) = pl.bits();
            row.x[q] = x;
            row.z[q] = z;
        }
        row.neg = p.sign()? < 0.0;
        Ok(row)
    }

    /// Exact expectation: +1, -1 or 0.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        let target = self.pauli_row(p)?;
        let anticommutes = |i: usize| -> bool {
            let mut par = false;
            for (&q, &pl) in p.factors() {
                let (x, z) = pl.bits();
                par ^= (x & gf2::get(&self.zs[q], i)) ^ (z & gf2::get(&self.xs[q], i));
            }
            par
        };
        if (self.n..2 * self.n).any(anticommutes) {
            return Ok(0.0);
        }
        let mut acc = Row::identity(self.n);
        for i in 0..self.n {
            if anticommutes(i) {
                acc.left_mul(&self.row(i + self.n));
            }
        }
        debug_assert_eq!((&acc.x, &acc.z), (&target.x, &target.z));
        Ok(if acc.neg == target.neg { 1.0 } else { -1.0 })
    }

    /// A computational-basis outcome (bit q = qubit q) together with a basis of
    /// the linear space the support is a coset of.
    pub fn support_coset<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(u64, Vec<u64>)> {
        if self.n > 64 {
            return Err(Error::QubitCountExceeded { n: self.n, max: 64 });
        }
        let mut t = self.clone();
        let mut x0 = 0u64;
        for q in 0..self.n {
            if t.measure(q, rng) {
                x0 |= 1 << q;
            }
        }
        let gens: Vec<u64> = (self.n..2 * self.n)
            .map(|i| (0..self.n).fold(0u64, |acc, q| acc | ((gf2::get(&self.xs[q], i) as u64) << q)))
            .collect();
        Ok((x0, reduce_basis(gens)))
    }

    /// Rényi-2 entropy in bits: rank of the generators restricted to `sub` minus |sub|.
    pub fn renyi2_bits(&self, sub: &[usize]) -> Result<usize> {
        for &q in sub {
            self.check(q)?;
        }
        let k = sub.len();
        let rows = (self.n..2 * self.n)
            .map(|i| {
                let mut row = vec![0u64; gf2::words(2 * k).max(1)];
                for (j, &q) in sub.iter().enumerate() {
                    gf2::set(&mut row, j, gf2::get(&self.xs[q], i));
                    gf2::set(&mut row, k + j, gf2::get(&self.zs[q], i));
                }
                row
            })
            .collect();
        Ok(gf2::rank(rows, 2 * k) - k)
    }

    /// Generators (with signs) of the stabilizer subgroup supported inside `sub`,
    /// re-indexed so that `sub[j]` becomes qubit `j`.
    pub fn local_generators(&self, sub: &[usize]) -> Result<Vec<PauliString>> {
        for &q in sub {
            self.check(q)?;
        }
        let n = self.n;
        let mut inside = vec![false; n];
        for &q in sub {
            inside[q] = true;
        }
        let outside: Vec<usize> = (0..n).filter(|&q| !inside[q]).collect();
        let mut rows: Vec<Row> = (n..2 * n).map(|i| self.row(i)).collect();
        // eliminate on the outside columns; rows left with no outside support
        // generate the local subgroup
        let mut pivot_row = 0;
        for &q in &outside {
            for bit in 0..2 {
                let get = |r: &Row| if bit == 0 { r.x[q] } else { r.z[q] };
                let Some(p) = (pivot_row..rows.len()).find(|&i| get(&rows[i])) else {
                    continue;
                };
                rows.swap(pivot_row, p);
                let pr = rows[pivot_row].clone();
                for (i, r) in rows.iter_mut().enumerate() {
                    if i != pivot_row && get(r) {
                        r.left_mul(&pr);
                    }
                }
                pivot_row += 1;
            }
        }
        let pos: std::collections::HashMap<usize, usize> = sub.iter().enumerate().map(|(j, &q)| (q, j)).collect();
        Ok(rows[pivot_row..]
            .iter()
            .map(|r| r.to_pauli().map_qubits(|q| pos[&q]))
            .collect())
    }
}

/// Row-reduced basis of a set of packed vectors.
pub(crate) fn reduce_basis(mut v: Vec<u64>) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for bit in 0..64 {
        let m = 1u64 << bit;
        if let Some(p) = v.iter().position(|&x| x & m != 0) {
            let piv = v.swap_remove(p);
            for x in v.iter_mut() {
                if *x & m != 0 {
                    *x ^= piv;
                }
            }
            for b in basis.iter_mut() {
                if *b & m != 0 {
                    *b ^= piv;
                }
            }
            basis.push(piv);
        }
    }
    basis
}
