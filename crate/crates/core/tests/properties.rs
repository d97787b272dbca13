use num_complex::Complex64 as C64;
use proptest::prelude::*;

use toricsim::lattice::surface_code;
use toricsim::logical::{Basis, Decoder};
use toricsim::mitigation::{ibu_unfold, ResponseMatrix};
use toricsim::noise::{corrupt_dist, ReadoutModel};
use toricsim::sim::{run, InitialState};
use toricsim::transpile::{cnot_to_cz, randomized_compile};
use toricsim::{mat2, Backend, Circuit, Gate, Pauli, PauliString, ProbDist};

fn pauli() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    (proptest::collection::vec(proptest::option::of(pauli()), n), 0u8..4).prop_map(|(ps, ph)| {
        PauliString::from_pairs(ps.into_iter().enumerate().filter_map(|(q, p)| p.map(|p| (q, p)))).with_phase(ph)
    })
}

/// Dense matrix of a Pauli string on `n` qubits, qubit 0 least significant.
fn dense(p: &PauliString, n: usize) -> Vec<C64> {
    let dim = 1 << n;
    let phase = C64::i().powu(p.phase() as u32);
    let mut m = vec![C64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let mut row = col;
        let mut amp = phase;
        for q in 0..n {
            if let Some(f) = p.get(q) {
                let b = (col >> q) & 1;
                let pm = mat2::pauli(f);
                let nb = if pm[0][b].norm() > 0.5 { 0 } else { 1 };
                amp *= pm[nb][b];
                row = (row & !(1 << q)) | (nb << q);
            }
        }
        m[row * dim + col] = amp;
    }
    m
}

fn matmul(a: &[C64], b: &[C64], dim: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            for j in 0..dim {
                out[i * dim + j] += a[i * dim + k] * b[k * dim + j];
            }
        }
    }
    out
}

fn random_circuit(n: usize) -> impl Strategy<Value = Circuit> {
    let gate = (0usize..6, 0..n, 0..n);
    proptest::collection::vec(proptest::collection::vec(gate, 1..4), 1..12).prop_map(move |layers| {
        let mut c = Circuit::new(n);
        for l in layers {
            let mut used = vec![false; n];
            let mut layer = Vec::new();
            for (k, a, b) in l {
                if used[a] || (k >= 4 && (a == b || used[b])) {
                    continue;
                }
                used[a] = true;
                layer.push(match k {
                    0 => Gate::h(a),
                    1 => Gate::s(a),
                    2 => Gate::x(a),
                    3 => Gate::sdg(a),
                    4 => {
                        used[b] = true;
                        Gate::cnot(a, b)
                    }
                    _ => {
                        used[b] = true;
                        Gate::cz(a, b)
                    }
                });
            }
            c.push_layer(layer).unwrap();
        }
        c
    })
}

fn final_overlap(a: &Circuit, b: &Circuit) -> f64 {
    let sa = run(a, Backend::Dense, &InitialState::Zeros).unwrap();
    let sb = run(b, Backend::Dense, &InitialState::Zeros).unwrap();
    sa.as_dense().unwrap().fidelity(sb.as_dense().unwrap())
}

fn distribution(bits: usize) -> impl Strategy<Value = ProbDist> {
    proptest::collection::vec(0.0f64..1.0, 1 << bits).prop_map(|w| {
        let t: f64 = w.iter().sum::<f64>() + 1e-9;
        let p: Vec<f64> = w.iter().map(|x| (x + 1e-9 / w.len() as f64) / t).collect();
        ProbDist::from_dense(&p, None)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pauli_product_is_associative(a in pauli_string(5), b in pauli_string(5), c in pauli_string(5)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn pauli_product_matches_matrices(a in pauli_string(3), b in pauli_string(3)) {
        let want = matmul(&dense(&a, 3), &dense(&b, 3), 8);
        let got = dense(&a.mul(&b), 3);
        for (x, y) in want.iter().zip(&got) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn commutation_matches_matrices(a in pauli_string(3), b in pauli_string(3)) {
        let ab = matmul(&dense(&a, 3), &dense(&b, 3), 8);
        let ba = matmul(&dense(&b, 3), &dense(&a, 3), 8);
        let same = ab.iter().zip(&ba).all(|(x, y)| (x - y).norm() < 1e-12);
        prop_assert_eq!(a.commutes_with(&b), same);
    }

    #[test]
    fn pauli_text_roundtrip(a in pauli_string(12)) {
        let back: PauliString = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn circuit_text_roundtrip(c in random_circuit(6)) {
        let back = Circuit::from_text(&c.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), c.to_text());
        prop_assert_eq!(back.gate_count(), c.gate_count());
    }

    #[test]
    fn cz_compilation_preserves_state(c in random_circuit(5)) {
        let t = cnot_to_cz(&c).unwrap();
        prop_assert_eq!(t.cnot_layers(), 0);
        prop_assert!((final_overlap(&c, &t) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn randomized_compiling_preserves_state(c in random_circuit(5), seed in any::<u64>()) {
        let t = cnot_to_cz(&c).unwrap();
        let rc = randomized_compile(&t, seed).unwrap();
        prop_assert!((final_overlap(&t, &rc) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn readout_corruption_preserves_mass(d in distribution(4), e0 in 0.0f64..0.3, e1 in 0.0f64..0.3) {
        let m = ReadoutModel::new(e0, e1).unwrap();
        let c = corrupt_dist(&d, &m);
        prop_assert!((c.total() - 1.0).abs() < 1e-12);
        prop_assert!(c.probs.values().all(|&p| p >= 0.0));
    }

    #[test]
    fn unfolding_stays_on_simplex(d in distribution(3), e0 in 0.0f64..0.2, e1 in 0.0f64..0.2, it in 1usize..30) {
        let m = ReadoutModel::new(e0, e1).unwrap();
        let r = ResponseMatrix::from_model(&m, 3).unwrap();
        let u = ibu_unfold(&corrupt_dist(&d, &m), &r, it).unwrap();
        prop_assert!((u.dist.total() - 1.0).abs() < 1e-9);
        prop_assert!(u.dist.probs.values().all(|&p| p >= -1e-15));
    }

    #[test]
    fn decoding_ignores_stabilizer_shifts(word in 0usize..16, err in any::<u16>(), x_basis in any::<bool>()) {
        let l = surface_code(3).unwrap();
        let basis = if x_basis { Basis::X } else { Basis::Z };
        let dec = Decoder::new(&l, basis).unwrap();
        let e = (err as u64) & 0x1ff;
        let base = dec.decode(e);
        let shifted = dec.decode(e ^ dec.codewords(0)[word]);
        prop_assert_eq!(base.logical_value, shifted.logical_value);
        prop_assert_eq!(base.hamming_distance, shifted.hamming_distance);
        prop_assert_eq!(base.ambiguous, shifted.ambiguous);
    }
}
