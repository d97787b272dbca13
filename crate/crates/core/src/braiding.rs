//! Anyon interferometry: an auxiliary qubit controls a closed string operator
//! `U` on an excited state `|φ⟩`, and its Bloch vector gives `⟨φ|U|φ⟩`.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::lattice::{build_lattice, Boundary, Coord, LatticeSpec};
use crate::noise::{rng_stream, with_gate_noise, GateNoise, ReadoutModel};
use crate::pauli::{Pauli, PauliString};
use crate::prep::{ground_state_circuit, interferometry_circuit, pauli_layer};
use crate::sim::{expectation, run_seeded, Backend, InitialState};
use crate::transpile;

/// Below this mean transverse Bloch length no phase is reported.
pub const PHASE_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct BraidExperiment {
    /// Prepares `|φ⟩` on the system qubits.
    pub base: Circuit,
    pub pauli_string: PauliString,
    pub n_instances: usize,
    /// `None` uses exact expectations instead of finite tomography shots.
    pub shots_per_tomo_axis: Option<u64>,
    /// Noise trajectories averaged per instance (ignored without gate noise).
    pub trajectories: usize,
    pub gate_noise: GateNoise,
    pub readout: ReadoutModel,
    pub randomized_compiling: bool,
    pub dual_aux: bool,
    pub backend: Backend,
    pub seed: u64,
}

impl BraidExperiment {
    pub fn new(base: Circuit, pauli_string: PauliString) -> Self {
        BraidExperiment {
            base,
            pauli_string,
            n_instances: 30,
            shots_per_tomo_axis: None,
            trajectories: 100,
            gate_noise: GateNoise::default(),
            readout: ReadoutModel::noiseless(),
            randomized_compiling: true,
            dual_aux: false,
            backend: Backend::Tableau,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_instances == 0 {
            return Err(Error::InvalidParameter("n_instances must be >= 1".into()));
        }
        if let Some(q) = self.pauli_string.max_qubit() {
            if q >= self.base.qubit_count {
                return Err(Error::AuxiliaryOverlap(q));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseResult {
    /// Radians in (-π, π].
    pub theta: f64,
    pub std_err: f64,
    /// Per-instance (⟨X⟩, ⟨Y⟩) of the auxiliary qubit.
    pub bloch_xy: Vec<[f64; 2]>,
    /// Length of the instance-averaged transverse Bloch vector.
    pub bloch_len: f64,
}

fn wrap(a: f64) -> f64 {
    let t = a.sin().atan2(a.cos());
    if t <= -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        t
    }
}

fn angle(x: f64, y: f64) -> f64 {
    // atan2(±0, -1) would give ±π; report π for both
    wrap(y.atan2(x))
}

fn mean_xy(v: &[[f64; 2]], skip: Option<usize>) -> [f64; 2] {
    let mut m = [0.0, 0.0];
    let mut n = 0.0;
    for (i, p) in v.iter().enumerate() {
        if Some(i) != skip {
            m[0] += p[0];
            m[1] += p[1];
            n += 1.0;
        }
    }
    [m[0] / n, m[1] / n]
}

/// Phase of the mean vector and the delete-1 jackknife error
/// `σ = [(n-1)/n Σ (θ_i - θ)²]^{1/2}`, with angle differences wrapped.
pub fn jackknife_phase(instance_blochs: &[[f64; 2]]) -> Result<(f64, f64)> {
    let n = instance_blochs.len();
    if n < 2 {
        return Err(Error::TooFewSamples { need: 2, got: n });
    }
    let m = mean_xy(instance_blochs, None);
    let theta = angle(m[0], m[1]);
    let ss: f64 = (0..n)
        .map(|i| {
            let mi = mean_xy(instance_blochs, Some(i));
            wrap(angle(mi[0], mi[1]) - theta).powi(2)
        })
        .sum();
    let nf = n as f64;
    Ok((theta, ((nf - 1.0) / nf * ss).sqrt()))
}

/// Readout-corrupted Z expectation, optionally estimated from `shots`.
fn tomo_axis<R: Rng + ?Sized>(ez: f64, readout: &ReadoutModel, bit: usize, shots: Option<u64>, rng: &mut R) -> f64 {
    let (e0, e1) = readout.rates(bit);
    let p1 = (1.0 - ez) / 2.0;
    let read1 = (e0 * (1.0 - p1) + (1.0 - e1) * p1).clamp(0.0, 1.0);
    match shots {
        None => 1.0 - 2.0 * read1,
        Some(n) => {
            let k = Binomial::new(n, read1).expect("probability in [0, 1]").sample(rng);
            1.0 - 2.0 * k as f64 / n as f64
        }
    }
}

/// Trajectory-averaged auxiliary (⟨X⟩, ⟨Y⟩, ⟨Z⟩) for one compiled instance.
fn instance_expectations(e: &BraidExperiment, instance: usize) -> Result<[f64; 3]> {
    let circuit = interferometry_circuit(&e.base, &e.pauli_string, e.dual_aux)?;
    let aux = e.base.qubit_count;
    let mut compiled = transpile::cnot_to_cz(&circuit)?;
    if e.randomized_compiling {
        compiled = transpile::randomized_compile(
            &compiled,
            e.seed ^ (instance as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        )?;
    }
    let noisy = with_gate_noise(&compiled, e.gate_noise)?;
    let trajectories = if e.gate_noise.is_noiseless() {
        1
    } else {
        e.trajectories.max(1)
    };
    let mut rng = rng_stream(e.seed, 2 * instance as u64);
    let axes = [Pauli::X, Pauli::Y, Pauli::Z].map(|p| PauliString::single(aux, p));
    let mut acc = [0.0; 3];
    for _ in 0..trajectories {
        let c = noisy.sample(&mut rng);
        let s = run_seeded(&c, e.backend, &InitialState::Zeros, rng.random())?;
        for (a, p) in acc.iter_mut().zip(&axes) {
            *a += expectation(&s, p)?;
        }
    }
    Ok(acc.map(|a| a / trajectories as f64))
}

/// Runs all instances; each axis is read out as `(E₊ - E₋)/2` from the
/// direct and the flipped tomography sequence, which cancels readout bias.
pub fn run_braid(e: &BraidExperiment) -> Result<PhaseResult> {
    e.validate()?;
    let aux = e.base.qubit_count;
    let per: Vec<Result<[f64; 3]>> = (0..e.n_instances)
        .into_par_iter()
        .map(|i| {
            let exact = instance_expectations(e, i)?;
            let mut rng = rng_stream(e.seed, 2 * i as u64 + 1);
            Ok(exact.map(|v| {
                let plus = tomo_axis(v, &e.readout, aux, e.shots_per_tomo_axis, &mut rng);
                let minus = tomo_axis(-v, &e.readout, aux, e.shots_per_tomo_axis, &mut rng);
                (plus - minus) / 2.0
            }))
        })
        .collect();
    let mut bloch_xy = Vec::with_capacity(e.n_instances);
    for r in per {
        let v = r?;
        bloch_xy.push([v[0], v[1]]);
    }
    let m = mean_xy(&bloch_xy, None);
    let len = (m[0] * m[0] + m[1] * m[1]).sqrt();
    if len < PHASE_THRESHOLD {
        return Err(Error::NoDefinedPhase(len));
    }
    let (theta, std_err) = if bloch_xy.len() >= 2 {
        jackknife_phase(&bloch_xy)?
    } else {
        (angle(m[0], m[1]), 0.0)
    };
    Ok(PhaseResult {
        theta,
        std_err,
        bloch_xy,
        bloch_len: len,
    })
}

/// Mean star and plaquette parities of the system before (`base` only) and
/// after the controlled operation, averaged over noise trajectories.
pub fn parity_profile(e: &BraidExperiment, lattice: &LatticeSpec, trajectories: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let stabs = lattice.stabilizers();
    let before_c = transpile::cnot_to_cz(&e.base)?;
    let after_c = transpile::cnot_to_cz(&interferometry_circuit(&e.base, &e.pauli_string, e.dual_aux)?)?;
    let mut out = Vec::new();
    for (k, c) in [before_c, after_c].into_iter().enumerate() {
        let noisy = with_gate_noise(&c, e.gate_noise)?;
        let t = if e.gate_noise.is_noiseless() {
            1
        } else {
            trajectories.max(1)
        };
        let mut rng = rng_stream(e.seed, u64::MAX - k as u64);
        let mut acc = vec![0.0; stabs.len()];
        for _ in 0..t {
            let s = run_seeded(&noisy.sample(&mut rng), e.backend, &InitialState::Zeros, rng.random())?;
            for (a, p) in acc.iter_mut().zip(&stabs) {
                *a += expectation(&s, p)?;
            }
        }
        out.push(acc.into_iter().map(|a| a / t as f64).collect());
    }
    let after = out.pop().expect("two profiles");
    let before = out.pop().expect("two profiles");
    Ok((before, after))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BraidKind {
    Mutual,
    Exchange,
}

/// One row of the braiding table.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteCase {
    pub id: &'static str,
    pub kind: BraidKind,
    /// Excitations applied to the ground state.
    pub excitation: PauliString,
    pub operator: PauliString,
    /// Expected phase in radians.
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteEntry {
    pub case: SuiteCase,
    pub result: Result<PhaseResult>,
}

/// The nine braid and exchange cases on the 2×2-plaquette lattice. Labels:
/// `P(i,j)` is the plaquette in row i, column j; `S11` is the interior star.
pub fn suite_cases(lattice: &LatticeSpec) -> Result<Vec<SuiteCase>> {
    use std::f64::consts::PI;
    if lattice.boundary != Boundary::Matching || lattice.plaquette_rows < 2 || lattice.plaquette_cols < 2 {
        return Err(Error::InvalidLattice(
            "braiding suite needs a matching lattice of at least 2x2".into(),
        ));
    }
    let q = |c: Coord| lattice.qubit_at(c).expect("edge on lattice");
    let h = |i: i32, j: i32| q((2 * i, 2 * j + 1));
    let v = |i: i32, j: i32| q((2 * i + 1, 2 * j));
    let plaq =
        |i: i32, j: i32| lattice.plaquette_operator(lattice.plaquette_at((2 * i + 1, 2 * j + 1)).expect("plaquette"));
    let star = |x: i32, y: i32| lattice.star_operator(lattice.star_at((x, y)).expect("star"));
    let x = |qb: usize| PauliString::single(qb, Pauli::X);
    let z = |qb: usize| PauliString::single(qb, Pauli::Z);

    // e pair on the second row of vertices, m pair in P00 and P01
    let e_mid = x(h(1, 0));
    let m_top = z(v(0, 1));
    let psi = e_mid.mul(&m_top);
    let p01_corners = star(0, 2).mul(&star(0, 4)).mul(&star(2, 2)).mul(&star(2, 4));
    let exch_e = x(v(0, 0));
    let exch_m = z(v(1, 1));
    // X X Y Y Z Z with + sign, equal to -B(P00)·A(S11)
    let ribbon = plaq(0, 0).mul(&star(2, 2)).mul(&PauliString::identity().with_phase(2));

    Ok(vec![
        SuiteCase {
            id: "e-m",
            kind: BraidKind::Mutual,
            excitation: psi.clone(),
            operator: plaq(0, 0),
            expected: PI,
        },
        SuiteCase {
            id: "e-e",
            kind: BraidKind::Mutual,
            excitation: e_mid,
            operator: plaq(0, 0).mul(&plaq(0, 1)).mul(&plaq(1, 0)).mul(&plaq(1, 1)),
            expected: 0.0,
        },
        SuiteCase {
            id: "m-m",
            kind: BraidKind::Mutual,
            excitation: m_top,
            operator: p01_corners,
            expected: 0.0,
        },
        SuiteCase {
            id: "e-psi",
            kind: BraidKind::Mutual,
            excitation: psi.clone(),
            operator: plaq(0, 1),
            expected: PI,
        },
        SuiteCase {
            id: "m-psi",
            kind: BraidKind::Mutual,
            excitation: psi.clone(),
            operator: star(2, 2),
            expected: PI,
        },
        SuiteCase {
            id: "psi-psi",
            kind: BraidKind::Mutual,
            excitation: psi,
            operator: plaq(0, 1).mul(&star(2, 2)),
            expected: 0.0,
        },
        SuiteCase {
            id: "exchange-e",
            kind: BraidKind::Exchange,
            excitation: exch_e.clone(),
            operator: plaq(0, 0),
            expected: 0.0,
        },
        SuiteCase {
            id: "exchange-m",
            kind: BraidKind::Exchange,
            excitation: exch_m.clone(),
            operator: star(2, 2),
            expected: 0.0,
        },
        SuiteCase {
            id: "exchange-psi",
            kind: BraidKind::Exchange,
            excitation: exch_e.mul(&exch_m),
            operator: ribbon,
            expected: PI,
        },
    ])
}

/// Ground state followed by the excitation string.
pub fn excited_state_circuit(lattice: &LatticeSpec, excitation: &PauliString) -> Result<Circuit> {
    let mut c = ground_state_circuit(lattice)?;
    if !excitation.is_identity() {
        c.extend(&pauli_layer(lattice.qubit_count, excitation)?)?;
    }
    Ok(c)
}

/// Settings shared by every suite entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub n_instances: usize,
    pub shots_per_tomo_axis: Option<u64>,
    pub trajectories: usize,
    pub gate_noise: GateNoise,
    pub readout: ReadoutModel,
    pub randomized_compiling: bool,
    pub dual_aux: bool,
    pub backend: Backend,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n_instances: 30,
            shots_per_tomo_axis: None,
            trajectories: 100,
            gate_noise: GateNoise::default(),
            readout: ReadoutModel::noiseless(),
            randomized_compiling: true,
            dual_aux: false,
            backend: Backend::Tableau,
        }
    }
}

pub fn braiding_suite(cfg: &SuiteConfig, seed: u64) -> Result<Vec<SuiteEntry>> {
    let lattice = build_lattice(2, 2, Boundary::Matching)?;
    let cases = suite_cases(&lattice)?;
    let mut out = Vec::new();
    for (k, case) in cases.into_iter().enumerate() {
        let base = excited_state_circuit(&lattice, &case.excitation)?;
        let e = BraidExperiment {
            base,
            pauli_string: case.operator.clone(),
            n_instances: cfg.n_instances,
            shots_per_tomo_axis: cfg.shots_per_tomo_axis,
            trajectories: cfg.trajectories,
            gate_noise: cfg.gate_noise,
            readout: cfg.readout.clone(),
            randomized_compiling: cfg.randomized_compiling,
            dual_aux: cfg.dual_aux,
            backend: cfg.backend,
            seed: seed.wrapping_add(k as u64),
        };
        let result = run_braid(&e);
        out.push(SuiteEntry { case, result });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::run;

    #[test]
    fn jackknife_closed_form() {
        let eps: f64 = 0.1;
        let v = [[eps.cos(), eps.sin()], [eps.cos(), -eps.sin()]];
        let (theta, sigma) = jackknife_phase(&v).unwrap();
        assert!(theta.abs() < 1e-15);
        // delete-1 means are the single vectors at ±ε
        assert!((sigma - (0.5f64 * 2.0 * eps * eps).sqrt()).abs() < 1e-12);
        let same = [[0.0, 1.0]; 4];
        assert_eq!(jackknife_phase(&same).unwrap().1, 0.0);
        assert!(jackknife_phase(&same[..1]).is_err());
    }

    #[test]
    fn jackknife_wraps_across_pi() {
        let eps: f64 = 0.05;
        let pi = std::f64::consts::PI;
        let v = [
            [(pi - eps).cos(), (pi - eps).sin()],
            [(pi + eps).cos(), (pi + eps).sin()],
        ];
        let (theta, sigma) = jackknife_phase(&v).unwrap();
        assert!((theta - pi).abs() < 1e-12);
        assert!((sigma - eps).abs() < 1e-12);
    }

    #[test]
    fn suite_operators_are_exact_eigenvalues() {
        let l = build_lattice(2, 2, Boundary::Matching).unwrap();
        for case in suite_cases(&l).unwrap() {
            let s = run(
                &excited_state_circuit(&l, &case.excitation).unwrap(),
                Backend::Tableau,
                &InitialState::Zeros,
            )
            .unwrap();
            let v = expectation(&s, &case.operator).unwrap();
            assert_eq!(v, case.expected.cos(), "{}", case.id);
        }
    }

    #[test]
    fn noiseless_suite_matches_table() {
        let cfg = SuiteConfig {
            n_instances: 3,
            ..SuiteConfig::default()
        };
        for entry in braiding_suite(&cfg, 1).unwrap() {
            let r = entry.result.unwrap();
            assert!(wrap(r.theta - entry.case.expected).abs() < 1e-9, "{}", entry.case.id);
            assert!((r.bloch_len - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn non_eigenstate_has_no_phase() {
        let l = build_lattice(1, 1, Boundary::Matching).unwrap();
        let u = l.plaquette_operator(0);
        let mut e = BraidExperiment::new(Circuit::new(l.qubit_count), u);
        e.n_instances = 2;
        assert!(matches!(run_braid(&e), Err(Error::NoDefinedPhase(x)) if x.abs() < 1e-12));
    }

    #[test]
    fn immediate_tomography_of_plus() {
        // identity string: the auxiliary stays in |+⟩
        let mut e = BraidExperiment::new(Circuit::new(1), PauliString::identity());
        e.n_instances = 5;
        e.shots_per_tomo_axis = Some(2000);
        e.readout = ReadoutModel::new(0.02, 0.06).unwrap();
        let r = run_braid(&e).unwrap();
        assert!(r.theta.abs() < 0.1, "{}", r.theta);
    }

    #[test]
    fn rejects_operator_on_aux() {
        let e = BraidExperiment::new(Circuit::new(2), "X2".parse().unwrap());
        assert!(matches!(run_braid(&e), Err(Error::AuxiliaryOverlap(2))));
    }
}
