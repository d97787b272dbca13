//! Circuit rewriting passes. All passes preserve the circuit unitary up to a
//! global phase.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::Result;
use crate::mat2::{self, M2};
use crate::pauli::{Pauli, PauliString};

/// Expands every `ControlledPauli` into basis changes, a CNOT ladder and a
/// single controlled-X. A negative sign adds a Z on the control.
pub fn expand_controlled_paulis(c: &Circuit) -> Result<Circuit> {
    if !c.gates().any(|g| matches!(g.kind, GateKind::ControlledPauli(_))) {
        return Ok(c.clone());
    }
    let mut out = Circuit::new(c.qubit_count);
    out.metadata = c.metadata.clone();
    for layer in &c.layers {
        let mut seqs: Vec<Vec<Vec<Gate>>> = Vec::new();
        let mut plain = Vec::new();
        for g in layer {
            match &g.kind {
                GateKind::ControlledPauli(p) => seqs.push(controlled_pauli_layers(g.qubits[0], p)?),
                _ => plain.push(g.clone()),
            }
        }
        let depth = seqs.iter().map(|s| s.len()).max().unwrap_or(0).max(1);
        for t in 0..depth {
            let mut l = if t == 0 { std::mem::take(&mut plain) } else { Vec::new() };
            for s in &seqs {
                if let Some(sl) = s.get(t) {
                    l.extend(sl.iter().cloned());
                }
            }
            out.push_layer(l)?;
        }
    }
    Ok(out)
}

fn controlled_pauli_layers(control: usize, p: &PauliString) -> Result<Vec<Vec<Gate>>> {
    let sign = p.sign()?;
    let targets: Vec<(usize, Pauli)> = p.factors().iter().map(|(&q, &pl)| (q, pl)).collect();
    let mut layers: Vec<Vec<Gate>> = Vec::new();
    if targets.is_empty() {
        if sign < 0.0 {
            layers.push(vec![Gate::z(control)]);
        }
        return Ok(layers);
    }
    // V maps each target Pauli onto X
    let pre: Vec<Gate> = targets
        .iter()
        .filter_map(|&(q, pl)| match pl {
            Pauli::X => None,
            Pauli::Z => Some(Gate::h(q)),
            Pauli::Y => Some(Gate::sdg(q)),
        })
        .collect();
    let post: Vec<Gate> = targets
        .iter()
        .filter_map(|&(q, pl)| match pl {
            Pauli::X => None,
            Pauli::Z => Some(Gate::h(q)),
            Pauli::Y => Some(Gate::s(q)),
        })
        .collect();
    if !pre.is_empty() {
        layers.push(pre);
    }
    let t: Vec<usize> = targets.iter().map(|&(q, _)| q).collect();
    // ladder M = C(t0→t1)…C(t_{k-2}→t_{k-1}); temporally the last link first
    for i in (0..t.len().saturating_sub(1)).rev() {
        layers.push(vec![Gate::cnot(t[i], t[i + 1])]);
    }
    let mut mid = vec![Gate::cnot(control, t[0])];
    if sign < 0.0 {
        // Z on the control commutes with the controlled-X
        layers.push(std::mem::take(&mut mid));
        layers.push(vec![Gate::z(control)]);
    } else {
        layers.push(mid);
    }
    for i in 0..t.len().saturating_sub(1) {
        layers.push(vec![Gate::cnot(t[i], t[i + 1])]);
    }
    if !post.is_empty() {
        layers.push(post);
    }
    Ok(layers)
}

/// Replaces CNOT by H(target)·CZ·H(target) and SWAP by three CNOTs. Each
/// CNOT layer becomes one CZ layer framed by Hadamard layers.
pub fn cnot_to_cz(c: &Circuit) -> Result<Circuit> {
    let c = expand_controlled_paulis(c)?;
    let mut out = Circuit::new(c.qubit_count);
    out.metadata = c.metadata.clone();
    for layer in &c.layers {
        // SWAP(a,b) = CNOT(a,b) CNOT(b,a) CNOT(a,b)
        let swaps: Vec<&Gate> = layer.iter().filter(|g| g.kind == GateKind::SWAP).collect();
        let sublayers: Vec<Vec<Gate>> = if swaps.is_empty() {
            vec![layer.clone()]
        } else {
            let mut a: Vec<Gate> = layer
                .iter()
                .map(|g| match g.kind {
                    GateKind::SWAP => Gate::cnot(g.qubits[0], g.qubits[1]),
                    _ => g.clone(),
                })
                .collect();
            let b: Vec<Gate> = swaps.iter().map(|g| Gate::cnot(g.qubits[1], g.qubits[0])).collect();
            let c2: Vec<Gate> = swaps.iter().map(|g| Gate::cnot(g.qubits[0], g.qubits[1])).collect();
            a.sort_by_key(|g| g.qubits[0]);
            vec![a, b, c2]
        };
        for l in sublayers {
            if !l.iter().any(|g| g.kind == GateKind::CNOT) {
                out.push_layer(l)?;
                continue;
            }
            let mut pre = Vec::new();
            let mut mid = Vec::new();
            let mut post = Vec::new();
            for g in l {
                match g.kind {
                    GateKind::CNOT => {
                        pre.push(Gate::h(g.qubits[1]));
                        mid.push(Gate::cz(g.qubits[0], g.qubits[1]));
                        post.push(Gate::h(g.qubits[1]));
                    }
                    GateKind::CZ => mid.push(g),
                    _ => pre.push(g),
                }
            }
            out.push_layer(pre)?;
            out.push_layer(mid)?;
            out.push_layer(post)?;
        }
    }
    Ok(out)
}

/// Named gate equal to `m` up to global phase, `None` for the identity.
pub fn canonical_gate(q: usize, m: &M2) -> Option<Gate> {
    const TOL: f64 = 1e-10;
    if mat2::eq_up_to_phase(m, &mat2::IDENTITY, TOL) {
        return None;
    }
    let named = [
        (GateKind::H, mat2::H),
        (GateKind::X, mat2::X),
        (GateKind::Y, mat2::Y),
        (GateKind::Z, mat2::Z),
        (GateKind::S, mat2::S),
        (GateKind::Sdg, mat2::SDG),
        (GateKind::SqrtY, mat2::SQRT_Y),
    ];
    for (k, nm) in named {
        if mat2::eq_up_to_phase(m, &nm, TOL) {
            return Some(Gate::new(k, vec![q]));
        }
    }
    Some(Gate::new(GateKind::U1q(*m), vec![q]))
}

/// Alternating normal form: `ones[0] czs[0] ones[1] … czs[m-1] ones[m]`.
struct Slots {
    n: usize,
    ones: Vec<Vec<Option<M2>>>,
    czs: Vec<Vec<(usize, usize)>>,
}

impl Slots {
    fn new(n: usize) -> Self {
        Slots {
            n,
            ones: vec![vec![None; n]],
            czs: Vec::new(),
        }
    }

    fn push_1q(&mut self, q: usize, m: &M2) {
        let slot = self.ones.last_mut().unwrap();
        slot[q] = Some(match slot[q] {
            Some(prev) => mat2::mul(m, &prev),
            None => *m,
        });
    }

    fn push_cz_layer(&mut self, l: Vec<(usize, usize)>) {
        self.czs.push(l);
        self.ones.push(vec![None; self.n]);
    }

    fn emit(&self, out: &mut Circuit) -> Result<()> {
        for k in 0..self.ones.len() {
            let l: Vec<Gate> = self.ones[k]
                .iter()
                .enumerate()
                .filter_map(|(q, m)| m.as_ref().and_then(|m| canonical_gate(q, m)))
                .collect();
            if !l.is_empty() {
                out.push_layer(l)?;
            }
            if k < self.czs.len() {
                out.push_layer(self.czs[k].iter().map(|&(a, b)| Gate::cz(a, b)).collect())?;
            }
        }
        Ok(())
    }
}

enum Segment {
    Unitary(Slots),
    Barrier(Vec<Gate>),
}

/// Splits a CZ+1q circuit into unitary segments in normal form separated by
/// measurement/reset layers.
fn segments(c: &Circuit) -> Result<Vec<Segment>> {
    let c = cnot_to_cz(c)?;
    let n = c.qubit_count;
    let mut segs = Vec::new();
    let mut cur = Slots::new(n);
    for layer in &c.layers {
        if layer
            .iter()
            .any(|g| matches!(g.kind, GateKind::MeasureZ | GateKind::PrepareZ))
        {
            segs.push(Segment::Unitary(std::mem::replace(&mut cur, Slots::new(n))));
            segs.push(Segment::Barrier(layer.clone()));
            continue;
        }
        let czs: Vec<(usize, usize)> = layer
            .iter()
            .filter(|g| g.kind == GateKind::CZ)
            .map(|g| (g.qubits[0], g.qubits[1]))
            .collect();
        for g in layer {
            if let Some(m) = g.kind.matrix() {
                cur.push_1q(g.qubits[0], &m);
            }
        }
        if !czs.is_empty() {
            cur.push_cz_layer(czs);
        }
    }
    segs.push(Segment::Unitary(cur));
    Ok(segs)
}

fn rebuild<F: FnMut(&mut Slots)>(c: &Circuit, mut f: F) -> Result<Circuit> {
    let mut out = Circuit::new(c.qubit_count);
    out.metadata = c.metadata.clone();
    for seg in segments(c)? {
        match seg {
            Segment::Unitary(mut s) => {
                f(&mut s);
                s.emit(&mut out)?;
            }
            Segment::Barrier(l) => out.push_layer(l)?,
        }
    }
    Ok(out)
}

/// Moves every single-qubit gate as late as possible: into the slot right
/// before the qubit's next CZ (or the final slot), merging on the way.
pub fn defer_hadamards(c: &Circuit) -> Result<Circuit> {
    rebuild(c, |s| {
        let m = s.czs.len();
        for q in 0..s.n {
            let mut pending: Option<M2> = None;
            for k in 0..=m {
                if let Some(g) = s.ones[k][q].take() {
                    pending = Some(match pending {
                        Some(p) => mat2::mul(&g, &p),
                        None => g,
                    });
                }
                let busy = k < m && s.czs[k].iter().any(|&(a, b)| a == q || b == q);
                if busy || k == m {
                    s.ones[k][q] = pending.take();
                }
            }
        }
    })
}

/// Pauli frame as per-qubit (x, z) bits; phases are irrelevant here.
#[derive(Clone)]
struct Frame(Vec<(bool, bool)>);

impl Frame {
    fn through_cz(&mut self, a: usize, b: usize) {
        let (xa, za) = self.0[a];
        let (xb, zb) = self.0[b];
        self.0[a] = (xa, za ^ xb);
        self.0[b] = (xb, zb ^ xa);
    }

    fn matrix(&self, q: usize) -> Option<M2> {
        Pauli::from_bits(self.0[q].0, self.0[q].1).map(mat2::pauli)
    }

    fn set_from(&mut self, q: usize, p: Option<(bool, Pauli)>) {
        self.0[q] = p.map(|(_, pl)| pl.bits()).unwrap_or((false, false));
    }
}

/// Fills every empty single-qubit slot between CZ layers of an already active
/// qubit with an X. The inserted Paulis are tracked as a frame through the CZ
/// layers and absorbed by non-Clifford gates and by the final layer.
#[allow(clippy::needless_range_loop)]
pub fn insert_echoes(c: &Circuit) -> Result<Circuit> {
    rebuild(c, |s| {
        let m = s.czs.len();
        let n = s.n;
        let mut frame = Frame(vec![(false, false); n]);
        let mut active = vec![false; n];
        for k in 0..=m {
            for q in 0..n {
                let gate = s.ones[k][q];
                if k == m {
                    // final slot absorbs the frame
                    if let Some(f) = frame.matrix(q) {
                        let g = gate.unwrap_or(mat2::IDENTITY);
                        s.ones[k][q] = Some(mat2::mul(&g, &f));
                    }
                    continue;
                }
                match gate {
                    Some(g) => {
                        active[q] = true;
                        match mat2::clifford_images(&g) {
                            Some(_) => {
                                // frame passes through: F' = g F g†
                                if let Some(pl) = Pauli::from_bits(frame.0[q].0, frame.0[q].1) {
                                    frame.set_from(q, mat2::conjugate_pauli(&g, pl));
                                }
                            }
                            None => {
                                if let Some(f) = frame.matrix(q) {
                                    s.ones[k][q] = Some(mat2::mul(&g, &f));
                                }
                                frame.0[q] = (false, false);
                            }
                        }
                    }
                    None if active[q] && k > 0 => {
                        s.ones[k][q] = Some(mat2::X);
                        frame.0[q].0 ^= true;
                    }
                    None => {}
                }
            }
            if k < m {
                for &(a, b) in &s.czs[k] {
                    frame.through_cz(a, b);
                }
            }
        }
    })
}

/// Pauli twirling of every CZ layer: a uniformly random Pauli on the CZ
/// qubits before the layer and its conjugate after it, both merged into the
/// neighbouring single-qubit slots. Measurement layers are not twirled.
pub fn randomized_compile(c: &Circuit, seed: u64) -> Result<Circuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rebuild(c, |s| {
        for k in 0..s.czs.len() {
            let layer = s.czs[k].clone();
            let mut frame = Frame(vec![(false, false); s.n]);
            let mut qs: Vec<usize> = layer.iter().flat_map(|&(a, b)| [a, b]).collect();
            qs.sort_unstable();
            for &q in &qs {
                let r: u8 = rng.random_range(0..4);
                frame.0[q] = [(false, false), (true, false), (true, true), (false, true)][r as usize];
                if let Some(p) = frame.matrix(q) {
                    let g = s.ones[k][q].unwrap_or(mat2::IDENTITY);
                    s.ones[k][q] = Some(mat2::mul(&p, &g));
                }
            }
            for &(a, b) in &layer {
                frame.through_cz(a, b);
            }
            for &q in &qs {
                if let Some(p) = frame.matrix(q) {
                    let g = s.ones[k + 1][q].unwrap_or(mat2::IDENTITY);
                    s.ones[k + 1][q] = Some(mat2::mul(&g, &p));
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{apply_dense, DenseState};
    use num_complex::Complex64 as C64;

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> DenseState {
        let mut v: Vec<C64> = (0..1 << n)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        DenseState::from_amplitudes(v).unwrap()
    }

    fn equivalent(a: &Circuit, b: &Circuit) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        (0..5).all(|_| {
            let s = random_state(a.qubit_count, &mut rng);
            let (mut x, mut y) = (s.clone(), s);
            apply_dense(&mut x, a, &mut rng).unwrap();
            apply_dense(&mut y, b, &mut rng).unwrap();
            (x.fidelity(&y) - 1.0).abs() < 1e-9
        })
    }

    #[test]
    fn single_cnot() {
        let mut c = Circuit::new(2);
        c.layer(vec![Gate::cnot(0, 1)]);
        let z = cnot_to_cz(&c).unwrap();
        assert_eq!(z.layers, vec![vec![Gate::h(1)], vec![Gate::cz(0, 1)], vec![Gate::h(1)]]);
        assert!(equivalent(&c, &z));
        assert_eq!(cnot_to_cz(&Circuit::new(3)).unwrap(), Circuit::new(3));
    }

    #[test]
    fn swap_expansion() {
        let mut c = Circuit::new(3);
        c.layer(vec![Gate::h(0), Gate::x(2)]);
        c.layer(vec![Gate::swap(0, 1), Gate::s(2)]);
        assert!(equivalent(&c, &cnot_to_cz(&c).unwrap()));
    }

    #[test]
    fn controlled_pauli_expansion() {
        let p: PauliString = "-X1*Y2*Z4".parse().unwrap();
        let mut c = Circuit::new(5);
        c.layer(vec![Gate::h(0), Gate::h(3)]);
        c.layer(vec![Gate::controlled_pauli(0, p).unwrap(), Gate::s(3)]);
        let e = expand_controlled_paulis(&c).unwrap();
        assert!(!e.gates().any(|g| matches!(g.kind, GateKind::ControlledPauli(_))));
        assert!(equivalent(&c, &e));
    }
}
