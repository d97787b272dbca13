//! Layered circuit representation and its line-oriented text format.
//!
//! Text format: a `qubits N` header, optional `meta KEY VALUE` lines, then one
//! layer per line with gates separated by `|`. An empty layer is written `-`.
//!
//! ```text
//! qubits 3
//! meta name bell
//! H 0
//! CNOT 0 1 | X 2
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::{self, M2};
use crate::pauli::PauliString;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
    SqrtY,
    CNOT,
    CZ,
    SWAP,
    U1q(M2),
    /// Controlled Pauli string; `qubits` holds only the control.
    ControlledPauli(PauliString),
    PrepareZ,
    MeasureZ,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::SqrtY => "SQRTY",
            GateKind::CNOT => "CNOT",
            GateKind::CZ => "CZ",
            GateKind::SWAP => "SWAP",
            GateKind::U1q(_) => "U",
            GateKind::ControlledPauli(_) => "CP",
            GateKind::PrepareZ => "PREP",
            GateKind::MeasureZ => "MEAS",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::CNOT | GateKind::CZ | GateKind::SWAP => 2,
            _ => 1,
        }
    }

    /// Matrix of a single-qubit unitary gate.
    pub fn matrix(&self) -> Option<M2> {
        Some(match self {
            GateKind::H => mat2::H,
            GateKind::S => mat2::S,
            GateKind::Sdg => mat2::SDG,
            GateKind::X => mat2::X,
            GateKind::Y => mat2::Y,
            GateKind::Z => mat2::Z,
            GateKind::SqrtY => mat2::SQRT_Y,
            GateKind::U1q(m) => *m,
            _ => return None,
        })
    }

    pub fn is_single_qubit_unitary(&self) -> bool {
        self.matrix().is_some()
    }

    pub fn is_two_qubit(&self) -> bool {
        self.arity() == 2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Self {
        Gate { kind, qubits }
    }
    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q])
    }
    pub fn s(q: usize) -> Self {
        Self::new(GateKind::S, vec![q])
    }
    pub fn sdg(q: usize) -> Self {
        Self::new(GateKind::Sdg, vec![q])
    }
    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q])
    }
    pub fn y(q: usize) -> Self {
        Self::new(GateKind::Y, vec![q])
    }
    pub fn z(q: usize) -> Self {
        Self::new(GateKind::Z, vec![q])
    }
    pub fn cnot(c: usize, t: usize) -> Self {
        Self::new(GateKind::CNOT, vec![c, t])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::new(GateKind::CZ, vec![a, b])
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::SWAP, vec![a, b])
    }
    pub fn measure(q: usize) -> Self {
        Self::new(GateKind::MeasureZ, vec![q])
    }
    pub fn prepare(q: usize) -> Self {
        Self::new(GateKind::PrepareZ, vec![q])
    }

    /// Arbitrary single-qubit unitary; rejects non-unitary matrices.
    pub fn u1q(q: usize, m: M2) -> Result<Self> {
        if !mat2::is_unitary(&m, 1e-10) {
            return Err(Error::InvalidCircuit(format!("U1q on {q} is not unitary")));
        }
        Ok(Self::new(GateKind::U1q(m), vec![q]))
    }

    /// Controlled Hermitian Pauli string.
    pub fn controlled_pauli(control: usize, target: PauliString) -> Result<Self> {
        if !target.is_hermitian() {
            return Err(Error::NotHermitian(target.phase()));
        }
        if target.get(control).is_some() {
            return Err(Error::InvalidCircuit(format!(
                "control {control} inside its own target"
            )));
        }
        Ok(Self::new(GateKind::ControlledPauli(target), vec![control]))
    }

    /// Every qubit the gate touches.
    pub fn support(&self) -> Vec<usize> {
        let mut v = self.qubits.clone();
        if let GateKind::ControlledPauli(p) = &self.kind {
            v.extend(p.support());
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Circuit {
    pub qubit_count: usize,
    pub layers: Vec<Vec<Gate>>,
    pub metadata: BTreeMap<String, String>,
}

impl Circuit {
    pub fn new(qubit_count: usize) -> Self {
        Circuit {
            qubit_count,
            ..Default::default()
        }
    }

    /// Appends a layer after validating operands.
    pub fn push_layer(&mut self, gates: Vec<Gate>) -> Result<()> {
        self.check_layer(&gates)?;
        self.layers.push(gates);
        Ok(())
    }

    /// Appends a layer, panicking on invalid operands.
    #[cfg(test)]
    pub(crate) fn layer(&mut self, gates: Vec<Gate>) {
        self.push_layer(gates).expect("builder produced a valid layer");
    }

    fn check_layer(&self, gates: &[Gate]) -> Result<()> {
        let mut used = vec![false; self.qubit_count];
        for g in gates {
            if g.qubits.len() != g.kind.arity() {
                return Err(Error::InvalidCircuit(format!(
                    "{} expects {} operand(s)",
                    g.kind.name(),
                    g.kind.arity()
                )));
            }
            for q in g.support() {
                if q >= self.qubit_count {
                    return Err(Error::QubitOutOfRange {
                        qubit: q,
                        n: self.qubit_count,
                    });
                }
                if used[q] {
                    return Err(Error::InvalidCircuit(format!("qubit {q} appears twice in one layer")));
                }
                used[q] = true;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.layers.iter().try_for_each(|l| self.check_layer(l))
    }

    /// Appends all layers of `other` (same width).
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.qubit_count > self.qubit_count {
            return Err(Error::DimensionMismatch(format!(
                "appending {} qubits onto {}",
                other.qubit_count, self.qubit_count
            )));
        }
        for l in &other.layers {
            self.push_layer(l.clone())?;
        }
        Ok(())
    }

    /// The same circuit on a wider register.
    pub fn widened(&self, n: usize) -> Circuit {
        let mut c = self.clone();
        c.qubit_count = c.qubit_count.max(n);
        c
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flatten()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn gate_count(&self) -> usize {
        self.gates().count()
    }

    /// Number of layers containing at least one gate of the given two-qubit kind.
    pub fn layers_with(&self, kind: &GateKind) -> usize {
        self.layers.iter().filter(|l| l.iter().any(|g| &g.kind == kind)).count()
    }

    pub fn cnot_layers(&self) -> usize {
        self.layers_with(&GateKind::CNOT)
    }

    pub fn cz_layers(&self) -> usize {
        self.layers_with(&GateKind::CZ)
    }

    /// True when every gate is in the Clifford group (U1q checked numerically).
    pub fn is_clifford(&self) -> bool {
        self.gates().all(|g| match &g.kind {
            GateKind::U1q(m) => mat2::clifford_images(m).is_some(),
            _ => true,
        })
    }

    /// Inverse of a unitary circuit.
    pub fn inverse(&self) -> Result<Circuit> {
        let mut out = Circuit::new(self.qubit_count);
        out.metadata = self.metadata.clone();
        for l in self.layers.iter().rev() {
            let mut nl = Vec::with_capacity(l.len());
            for g in l {
                let kind = match &g.kind {
                    GateKind::S => GateKind::Sdg,
                    GateKind::Sdg => GateKind::S,
                    GateKind::SqrtY => GateKind::U1q(mat2::dagger(&mat2::SQRT_Y)),
                    GateKind::U1q(m) => GateKind::U1q(mat2::dagger(m)),
                    GateKind::PrepareZ | GateKind::MeasureZ => {
                        return Err(Error::InvalidCircuit("non-unitary gate has no inverse".into()))
                    }
                    k => k.clone(),
                };
                nl.push(Gate::new(kind, g.qubits.clone()));
            }
            out.layers.push(nl);
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "qubits {}", self.qubit_count).unwrap();
        for (k, v) in &self.metadata {
            writeln!(s, "meta {k} {v}").unwrap();
        }
        for l in &self.layers {
            if l.is_empty() {
                s.push_str("-\n");
                continue;
            }
            let toks: Vec<String> = l.iter().map(gate_text).collect();
            s.push_str(&toks.join(" | "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let perr = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        let (ln, head) = lines.next().ok_or_else(|| perr(0, "empty input"))?;
        let n: usize = head
            .strip_prefix("qubits ")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| perr(ln, "expected `qubits N`"))?;
        let mut c = Circuit::new(n);
        for (ln, line) in lines {
            if let Some(rest) = line.strip_prefix("meta ") {
                let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
                c.metadata.insert(k.to_string(), v.to_string());
                continue;
            }
            let mut layer = Vec::new();
            if line != "-" {
                for tok in line.split('|') {
                    layer.push(parse_gate(tok.trim()).map_err(|m| perr(ln, &m))?);
                }
            }
            c.push_layer(layer).map_err(|e| perr(ln, &e.to_string()))?;
        }
        Ok(c)
    }
}

fn gate_text(g: &Gate) -> String {
    let qs: Vec<String> = g.qubits.iter().map(|q| q.to_string()).collect();
    let mut s = format!("{} {}", g.kind.name(), qs.join(" "));
    match &g.kind {
        GateKind::U1q(m) => {
            for row in m {
                for z in row {
                    write!(s, " {:?} {:?}", z.re, z.im).unwrap();
                }
            }
        }
        GateKind::ControlledPauli(p) => {
            write!(s, " {p}").unwrap();
        }
        _ => {}
    }
    s
}

fn parse_gate(tok: &str) -> std::result::Result<Gate, String> {
    let parts: Vec<&str> = tok.split_whitespace().collect();
    let (name, args) = parts.split_first().ok_or("empty gate")?;
    let qubit = |i: usize| -> std::result::Result<usize, String> {
        args.get(i)
            .ok_or(format!("{name}: missing operand"))?
            .parse()
            .map_err(|_| format!("{name}: bad operand"))
    };
    let one = |k: GateKind| -> std::result::Result<Gate, String> {
        if args.len() != 1 {
            return Err(format!("{name}: expected 1 operand"));
        }
        Ok(Gate::new(k, vec![qubit(0)?]))
    };
    let two = |k: GateKind| -> std::result::Result<Gate, String> {
        if args.len() != 2 {
            return Err(format!("{name}: expected 2 operands"));
        }
        Ok(Gate::new(k, vec![qubit(0)?, qubit(1)?]))
    };
    match *name {
        "H" => one(GateKind::H),
        "S" => one(GateKind::S),
        "SDG" => one(GateKind::Sdg),
        "X" => one(GateKind::X),
        "Y" => one(GateKind::Y),
        "Z" => one(GateKind::Z),
        "SQRTY" => one(GateKind::SqrtY),
        "PREP" => one(GateKind::PrepareZ),
        "MEAS" => one(GateKind::MeasureZ),
        "CNOT" => two(GateKind::CNOT),
        "CZ" => two(GateKind::CZ),
        "SWAP" => two(GateKind::SWAP),
        "U" => {
            if args.len() != 9 {
                return Err("U: expected qubit and 8 reals".into());
            }
            let v: Vec<f64> = args[1..]
                .iter()
                .map(|a| a.parse::<f64>().map_err(|_| "U: bad real".to_string()))
                .collect::<std::result::Result<_, _>>()?;
            let m = [
                [C64::new(v[0], v[1]), C64::new(v[2], v[3])],
                [C64::new(v[4], v[5]), C64::new(v[6], v[7])],
            ];
            Gate::u1q(qubit(0)?, m).map_err(|e| e.to_string())
        }
        "CP" => {
            if args.len() != 2 {
                return Err("CP: expected control and pauli string".into());
            }
            let p: PauliString = args[1].parse().map_err(|e: Error| e.to_string())?;
            Gate::controlled_pauli(qubit(0)?, p).map_err(|e| e.to_string())
        }
        other => Err(format!("unknown gate {other}")),
    }
}
