//! Circuit builders: toric-code ground states, surface-code logical states,
//! state injection, the logical X^{1/2} gate, excitation strings and
//! interferometry.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::lattice::{self, Boundary, Coord, LatticeSpec, Tile};
use crate::mat2;
use crate::pauli::{Pauli, PauliString};

fn require(lattice: &LatticeSpec, b: Boundary, op: &'static str) -> Result<()> {
    if lattice.boundary != b {
        return Err(Error::UnsupportedBoundary {
            op,
            detail: format!("expected {b:?} boundary, got {:?}", lattice.boundary),
        });
    }
    Ok(())
}

/// Ground state of a matching-boundary lattice: Hadamards on the plaquette
/// representatives (top edges) followed by a middle-out CNOT network of depth
/// `3 + 2⌊(N-1)/2⌋` for `N` plaquette columns.
pub fn ground_state_circuit(lattice: &LatticeSpec) -> Result<Circuit> {
    require(lattice, Boundary::Matching, "ground_state_circuit")?;
    let (rows, cols) = (lattice.plaquette_rows as i32, lattice.plaquette_cols as i32);
    let q = |c: Coord| lattice.qubit_at(c).expect("edge inside lattice");
    // top edge of plaquette (i, j) and the vertical edge left of it
    let t = |i: i32, j: i32| q((2 * i, 2 * j + 1));
    let v = |i: i32, j: i32| q((2 * i + 1, 2 * j));

    let w0 = if cols % 2 == 1 { 1 } else { 2 };
    let k_max = (cols - w0) / 2;
    let c0 = k_max; // leftmost centre column
    let depth = (3 + 2 * k_max) as usize;
    let mut layers: Vec<Vec<Gate>> = vec![Vec::new(); depth];
    for i in 0..rows {
        if w0 == 1 {
            let c = c0;
            layers[0].push(Gate::cnot(t(i, c), v(i, c)));
            layers[1].push(Gate::cnot(t(i, c), v(i, c + 1)));
            layers[2].push(Gate::cnot(v(i, c), t(i + 1, c)));
        } else {
            let c = c0;
            layers[0].push(Gate::cnot(t(i, c), v(i, c + 1)));
            layers[0].push(Gate::cnot(t(i, c + 1), v(i, c + 2)));
            layers[1].push(Gate::cnot(t(i, c + 1), v(i, c + 1)));
            layers[1].push(Gate::cnot(t(i, c), v(i, c)));
            layers[2].push(Gate::cnot(v(i, c), t(i + 1, c)));
            layers[2].push(Gate::cnot(v(i, c + 2), t(i + 1, c + 1)));
        }
        for k in 1..=k_max {
            let (ti, tr) = ((2 * k + 1) as usize, (2 * k + 2) as usize);
            // left ring: outer side is the left edge
            let j = c0 - k;
            layers[0].push(Gate::cnot(t(i, j), v(i, j)));
            layers[ti].push(Gate::cnot(t(i, j), v(i, j + 1)));
            layers[tr].push(Gate::cnot(v(i, j), t(i + 1, j)));
            // right ring: mirrored
            let j = c0 + w0 - 1 + k;
            layers[0].push(Gate::cnot(t(i, j), v(i, j + 1)));
            layers[ti].push(Gate::cnot(t(i, j), v(i, j)));
            layers[tr].push(Gate::cnot(v(i, j + 1), t(i + 1, j)));
        }
    }
    let mut c = Circuit::new(lattice.qubit_count);
    c.metadata.insert("circuit".into(), "ground_state".into());
    c.push_layer(lattice.representative.iter().map(|&r| Gate::h(r)).collect())?;
    for l in layers {
        c.push_layer(l)?;
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalState {
    Zero,
    One,
    Plus,
    Minus,
}

impl std::str::FromStr for LogicalState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zero" | "0" => Ok(LogicalState::Zero),
            "one" | "1" => Ok(LogicalState::One),
            "plus" | "+" => Ok(LogicalState::Plus),
            "minus" | "-" => Ok(LogicalState::Minus),
            _ => Err(Error::InvalidParameter(format!("unknown logical state {s:?}"))),
        }
    }
}

impl std::fmt::Display for LogicalState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LogicalState::Zero => "zero",
            LogicalState::One => "one",
            LogicalState::Plus => "plus",
            LogicalState::Minus => "minus",
        })
    }
}

/// Names accepted by [`circuit_by_name`].
pub const CIRCUIT_NAMES: [&str; 5] = [
    "ground_state",
    "logical_zero",
    "logical_one",
    "logical_plus",
    "logical_minus",
];

/// Looks up a preparation builder by name: `ground_state` for matching
/// lattices, `logical_<state>` for mixed ones.
pub fn circuit_by_name(lattice: &LatticeSpec, name: &str) -> Result<Circuit> {
    match name {
        "ground_state" => ground_state_circuit(lattice),
        _ => match name.strip_prefix("logical_") {
            Some(st) => logical_state_circuit(lattice, st.parse()?),
            None => Err(Error::InvalidParameter(format!(
                "unknown circuit {name:?}, expected one of {CIRCUIT_NAMES:?}"
            ))),
        },
    }
}

/// CNOT network that turns `|+⟩` on each tile representative into the
/// equal superposition over tile supports (X-type stabilizers on the tiles).
/// Tiles are given in a frame where the centre column is never a control;
/// `idx` maps frame cells to qubits. Returns (representatives, CNOT layers).
fn tile_network(tiles: &[Tile], d: i32, idx: &dyn Fn(Coord) -> usize) -> (Vec<usize>, Vec<Vec<Gate>>) {
    let ctr = d / 2;
    let depth = ((d + 3) / 2) as usize;
    let mut layers: Vec<Vec<Gate>> = vec![Vec::new(); depth];
    let mut reps = Vec::new();
    for &tile in tiles {
        let (r, c) = match tile {
            Tile::Square(r, c) | Tile::HPair(r, c) => (r, c),
            Tile::VPair(..) => unreachable!("network tiles are squares or horizontal pairs"),
        };
        let (outer, inner, time) = if c < ctr {
            let k = ctr - c;
            (c, c + 1, k as usize) // layer index of time k + 1
        } else {
            let k = c - ctr + 1;
            (c + 1, c, (k + 1) as usize) // time k + 2
        };
        let rep = idx((r, outer));
        reps.push(rep);
        match tile {
            Tile::Square(..) => {
                let relay = idx((r + 1, outer));
                layers[0].push(Gate::cnot(rep, relay));
                layers[time].push(Gate::cnot(rep, idx((r, inner))));
                layers[time].push(Gate::cnot(relay, idx((r + 1, inner))));
            }
            _ => layers[time].push(Gate::cnot(rep, idx((r, inner)))),
        }
    }
    (reps, layers)
}

fn transpose_tile(t: Tile) -> Tile {
    match t {
        Tile::Square(r, c) => Tile::Square(c, r),
        Tile::HPair(r, c) => Tile::VPair(c, r),
        Tile::VPair(r, c) => Tile::HPair(c, r),
    }
}

/// Logical basis states of a mixed-boundary lattice in `(d+3)/2` CNOT layers.
/// `Plus` prepares the star superposition in the transposed frame followed by
/// a transversal Hadamard; `One = X_L·Zero`, `Minus = Z_L·Plus`.
pub fn logical_state_circuit(lattice: &LatticeSpec, which: LogicalState) -> Result<Circuit> {
    require(lattice, Boundary::Mixed, "logical_state_circuit")?;
    let d = lattice.plaquette_rows as i32;
    let n = lattice.qubit_count;
    let mut c = Circuit::new(n);
    c.metadata
        .insert("circuit".into(), format!("logical_{which:?}").to_lowercase());
    let (reps, layers) = match which {
        LogicalState::Zero | LogicalState::One => {
            let tiles = lattice::mixed_plaquette_tiles(d);
            tile_network(&tiles, d, &|(r, c)| (r * d + c) as usize)
        }
        LogicalState::Plus | LogicalState::Minus => {
            let tiles: Vec<Tile> = lattice::mixed_star_tiles(d).into_iter().map(transpose_tile).collect();
            tile_network(&tiles, d, &|(r, c)| (c * d + r) as usize)
        }
    };
    c.push_layer(reps.iter().map(|&r| Gate::h(r)).collect())?;
    for l in layers {
        c.push_layer(l)?;
    }
    match which {
        LogicalState::Zero => {}
        LogicalState::One => c.push_layer(lattice.logical_x_support.iter().map(|&q| Gate::x(q)).collect())?,
        LogicalState::Plus => c.push_layer((0..n).map(Gate::h).collect())?,
        LogicalState::Minus => {
            c.push_layer((0..n).map(Gate::h).collect())?;
            c.push_layer(lattice.logical_z_support.iter().map(|&q| Gate::z(q)).collect())?;
        }
    }
    Ok(c)
}

/// Single-qubit state on the centre qubit spread along the centre column:
/// produces `(α·I + β·X_L)|0…0⟩`.
pub fn injection_ghz_circuit(lattice: &LatticeSpec, alpha: C64, beta: C64) -> Result<Circuit> {
    require(lattice, Boundary::Mixed, "injection_circuit")?;
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(norm));
    }
    let d = lattice.plaquette_rows as i32;
    let ctr = d / 2;
    let q = |r: i32| (r * d + ctr) as usize;
    let mut c = Circuit::new(lattice.qubit_count);
    c.push_layer(vec![Gate::u1q(q(ctr), mat2::state_prep(alpha, beta))?])?;
    for s in 1..=ctr + 1 {
        let mut l = Vec::new();
        if s <= ctr {
            l.push(Gate::cnot(q(ctr - s + 1), q(ctr - s)));
        }
        if s >= 2 {
            l.push(Gate::cnot(q(ctr + s - 2), q(ctr + s - 1)));
        }
        c.push_layer(l)?;
    }
    Ok(c)
}

/// Encodes `α|0⟩ + β|1⟩` into `α|0_L⟩ + β|1_L⟩`. The centre column is never a
/// control in the logical-zero network, so `X_L` commutes through it.
pub fn injection_circuit(lattice: &LatticeSpec, alpha: C64, beta: C64) -> Result<Circuit> {
    let mut c = injection_ghz_circuit(lattice, alpha, beta)?;
    c.metadata.insert("circuit".into(), "injection".into());
    let zero = logical_state_circuit(lattice, LogicalState::Zero)?;
    // first layer of the zero-state circuit holds the representative Hadamards
    c.layers[0].extend(zero.layers[0].iter().cloned());
    for l in &zero.layers[1..] {
        c.push_layer(l.clone())?;
    }
    Ok(c)
}

/// `(I - i X_L)/√2`: a CNOT ladder shrinks `X_L` onto two centre-column
/// qubits, `exp(-iπ/4 XX)` is applied with one CZ, and the ladder is undone.
pub fn xl_half_circuit(lattice: &LatticeSpec) -> Result<Circuit> {
    require(lattice, Boundary::Mixed, "xl_half_circuit")?;
    let d = lattice.plaquette_rows as i32;
    if d < 3 || d % 2 == 0 {
        return Err(Error::UnsupportedDistance(d as usize));
    }
    let ctr = d / 2;
    let q = |r: i32| (r * d + ctr) as usize;
    let (mut top, mut bot) = (0, d - 1);
    let mut shrink: Vec<Vec<Gate>> = Vec::new();
    while bot - top + 1 > 2 {
        let mut l = vec![Gate::cnot(q(top + 1), q(top))];
        top += 1;
        if bot - top + 1 > 2 {
            l.push(Gate::cnot(q(bot - 1), q(bot)));
            bot -= 1;
        }
        shrink.push(l);
    }
    let (a, b) = (q(top), q(bot));
    let mut c = Circuit::new(lattice.qubit_count);
    c.metadata.insert("circuit".into(), "xl_half".into());
    for l in &shrink {
        c.push_layer(l.clone())?;
    }
    c.push_layer(vec![Gate::h(a), Gate::h(b)])?;
    c.push_layer(vec![Gate::s(a), Gate::s(b)])?;
    c.push_layer(vec![Gate::cz(a, b)])?;
    c.push_layer(vec![Gate::h(a), Gate::h(b)])?;
    for l in shrink.iter().rev() {
        c.push_layer(l.clone())?;
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Anyon {
    /// Star violation, created by X strings along edges sharing vertices.
    E,
    /// Plaquette violation, created by Z strings along edges sharing faces.
    M,
}

/// Pauli string along a path of edges: X for `e`, Z for `m`.
pub fn excitation_string(lattice: &LatticeSpec, anyon: Anyon, path: &[usize]) -> Result<PauliString> {
    for &qb in path {
        if qb >= lattice.qubit_count {
            return Err(Error::QubitOutOfRange {
                qubit: qb,
                n: lattice.qubit_count,
            });
        }
    }
    for w in path.windows(2) {
        let linked = match anyon {
            Anyon::E => {
                let a = lattice.endpoints(w[0]);
                let b = lattice.endpoints(w[1]);
                a.iter().any(|p| b.contains(p))
            }
            Anyon::M => {
                let a = lattice.faces(w[0]);
                let b = lattice.faces(w[1]);
                a.iter().any(|p| b.contains(p))
            }
        };
        if !linked {
            return Err(Error::DisconnectedPath(format!(
                "edges {} and {} are not adjacent",
                w[0], w[1]
            )));
        }
    }
    let p = match anyon {
        Anyon::E => Pauli::X,
        Anyon::M => Pauli::Z,
    };
    Ok(PauliString::from_pairs(path.iter().map(|&q| (q, p))))
}

/// Circuit applying a Pauli string as a layer of single-qubit gates.
pub fn pauli_layer(n: usize, p: &PauliString) -> Result<Circuit> {
    let mut c = Circuit::new(n);
    let gates = p
        .factors()
        .iter()
        .map(|(&q, &pl)| match pl {
            Pauli::X => Gate::x(q),
            Pauli::Y => Gate::y(q),
            Pauli::Z => Gate::z(q),
        })
        .collect();
    c.push_layer(gates)?;
    Ok(c)
}

/// Appends an auxiliary qubit in |+⟩ (index `n`) and a controlled `u`, so that
/// the auxiliary ends with `⟨X⟩ + i⟨Y⟩ = ⟨φ|u|φ⟩`. With `dual_aux`, a second
/// auxiliary (index `n+1`) forms a Bell pair with the first, each controls
/// half of `u`, and a final CNOT disentangles it again.
pub fn interferometry_circuit(prep: &Circuit, u: &PauliString, dual_aux: bool) -> Result<Circuit> {
    let n = prep.qubit_count;
    if !u.is_hermitian() {
        return Err(Error::NotHermitian(u.phase()));
    }
    if let Some(q) = u.max_qubit() {
        if q >= n {
            return Err(Error::AuxiliaryOverlap(q));
        }
    }
    let a = n;
    let width = if dual_aux { n + 2 } else { n + 1 };
    let mut c = prep.widened(width);
    c.metadata.insert("aux".into(), a.to_string());
    c.push_layer(vec![Gate::h(a)])?;
    if !dual_aux {
        c.push_layer(vec![Gate::controlled_pauli(a, u.clone())?])?;
        return Ok(c);
    }
    let b = n + 1;
    c.push_layer(vec![Gate::cnot(a, b)])?;
    let support = u.support();
    let half = support.len().div_ceil(2);
    let first = u.restrict(&support[..half]);
    let second = u.restrict(&support[half..]).with_phase(0);
    let mut l = vec![Gate::controlled_pauli(a, first)?];
    if !second.is_identity() {
        l.push(Gate::controlled_pauli(b, second)?);
    }
    c.push_layer(l)?;
    c.push_layer(vec![Gate::cnot(a, b)])?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, surface_code};
    use crate::sim::{expectation, run, Backend, InitialState};

    #[test]
    fn ground_state_layer_counts() {
        for n in 1..=6 {
            let l = build_lattice(2, n, Boundary::Matching).unwrap();
            let c = ground_state_circuit(&l).unwrap();
            assert_eq!(c.cnot_layers(), 3 + 2 * ((n - 1) / 2), "N={n}");
        }
    }

    #[test]
    fn ground_state_stabilizers() {
        let l = build_lattice(3, 4, Boundary::Matching).unwrap();
        let s = run(
            &ground_state_circuit(&l).unwrap(),
            Backend::Tableau,
            &InitialState::Zeros,
        )
        .unwrap();
        for p in l.stabilizers() {
            assert_eq!(expectation(&s, &p).unwrap(), 1.0, "{p}");
        }
    }

    #[test]
    fn logical_states() {
        for d in [3, 5] {
            let l = surface_code(d).unwrap();
            for (which, op, val) in [
                (LogicalState::Zero, l.logical_z(), 1.0),
                (LogicalState::One, l.logical_z(), -1.0),
                (LogicalState::Plus, l.logical_x(), 1.0),
                (LogicalState::Minus, l.logical_x(), -1.0),
            ] {
                let c = logical_state_circuit(&l, which).unwrap();
                assert_eq!(c.cnot_layers(), (d + 3) / 2);
                let s = run(&c, Backend::Tableau, &InitialState::Zeros).unwrap();
                for p in l.stabilizers() {
                    assert_eq!(expectation(&s, &p).unwrap(), 1.0, "d={d} {which:?} {p}");
                }
                assert_eq!(expectation(&s, &op).unwrap(), val, "d={d} {which:?}");
            }
        }
    }

    #[test]
    fn excitation_path_checks() {
        let l = build_lattice(2, 2, Boundary::Matching).unwrap();
        let a = l.qubit_at((0, 1)).unwrap();
        let b = l.qubit_at((0, 3)).unwrap();
        let far = l.qubit_at((4, 3)).unwrap();
        assert!(excitation_string(&l, Anyon::E, &[a, b]).is_ok());
        assert!(excitation_string(&l, Anyon::M, &[a, b]).is_err());
        assert!(excitation_string(&l, Anyon::E, &[a, far]).is_err());
    }

    #[test]
    fn interferometry_rejects_overlap() {
        let c = Circuit::new(3);
        let u: PauliString = "X3".parse().unwrap();
        assert!(matches!(
            interferometry_circuit(&c, &u, false),
            Err(Error::AuxiliaryOverlap(3))
        ));
    }

    fn dense(c: &Circuit) -> crate::sim::DenseState {
        match run(c, Backend::Dense, &InitialState::Zeros).unwrap() {
            crate::sim::QuantumState::Dense(d) => d,
            _ => unreachable!(),
        }
    }

    fn superpose(a: &crate::sim::DenseState, b: &crate::sim::DenseState, x: C64, y: C64) -> crate::sim::DenseState {
        let amps = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(p, q)| x * p + y * q)
            .collect();
        crate::sim::DenseState::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn injection_encodes_amplitudes() {
        let l = surface_code(3).unwrap();
        let zero = dense(&logical_state_circuit(&l, LogicalState::Zero).unwrap());
        let one = dense(&logical_state_circuit(&l, LogicalState::One).unwrap());
        let (a, b) = (C64::new(0.6, 0.0), C64::new(0.0, 0.8) * C64::from_polar(1.0, 0.3));
        let got = dense(&injection_circuit(&l, a, b).unwrap());
        assert!((got.fidelity(&superpose(&zero, &one, a, b)) - 1.0).abs() < 1e-10);

        // intermediate: (α + β X_L)|0…0⟩
        let ghz = dense(&injection_ghz_circuit(&l, a, b).unwrap());
        let vac = crate::sim::DenseState::new(9).unwrap();
        let mut flipped = vac.clone();
        flipped.apply_pauli(&l.logical_x(), None);
        assert!((ghz.fidelity(&superpose(&vac, &flipped, a, b)) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn xl_half_rotates_logical_zero() {
        let l = surface_code(3).unwrap();
        let mut c = logical_state_circuit(&l, LogicalState::Zero).unwrap();
        let half = xl_half_circuit(&l).unwrap();
        c.extend(&half).unwrap();
        let got = dense(&c);
        let zero = dense(&logical_state_circuit(&l, LogicalState::Zero).unwrap());
        let one = dense(&logical_state_circuit(&l, LogicalState::One).unwrap());
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let want = superpose(&zero, &one, C64::new(r, 0.0), C64::new(0.0, -r));
        assert!((got.fidelity(&want) - 1.0).abs() < 1e-10);
        assert_eq!(crate::transpile::cnot_to_cz(&half).unwrap().cz_layers(), 3);
    }

    #[test]
    fn xl_half_cz_depth_d5() {
        let l = surface_code(5).unwrap();
        let c = crate::transpile::cnot_to_cz(&xl_half_circuit(&l).unwrap()).unwrap();
        assert_eq!(c.cz_layers(), 5);
    }

    #[test]
    fn interferometry_reads_expectation() {
        let l = build_lattice(1, 2, Boundary::Matching).unwrap();
        let mut prep = ground_state_circuit(&l).unwrap();
        let e = excitation_string(&l, Anyon::E, &[l.qubit_at((0, 1)).unwrap()]).unwrap();
        prep.extend(&pauli_layer(l.qubit_count, &e).unwrap()).unwrap();
        for dual in [false, true] {
            for (u, want) in [
                (l.plaquette_operator(0), 1.0),
                (l.star_operator(l.star_at((0, 0)).unwrap()), -1.0),
            ] {
                let c = interferometry_circuit(&prep, &u, dual).unwrap();
                let s = run(&c, Backend::Tableau, &InitialState::Zeros).unwrap();
                let b = crate::sim::bloch_vector(&s, l.qubit_count).unwrap();
                assert!((b[0] - want).abs() < 1e-12 && b[1].abs() < 1e-12, "dual={dual} {u}");
                if dual {
                    let z = crate::sim::bloch_vector(&s, l.qubit_count + 1).unwrap();
                    assert!((z[2] - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
