//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails. Run with
//! `cargo test -p toricsim-core --test acceptance`.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toricsim::braiding::{braiding_suite, SuiteConfig};
use toricsim::entropy::{
    estimate_with_errors, measure_settings, pauli_exhaustive, region_purities, renyi2, s_topo, settings,
    MitigationConfig, Region, Resampling, SettingMode,
};
use toricsim::lattice::{enumerate_partitions, surface_code, BlockShape};
use toricsim::logical::{
    bloch_of, decay_experiment, logical_measure, logical_tomography, sample_logical_shots, DecayConfig, Decoder,
    LogicalNoise,
};
use toricsim::noise::{DdScheme, DriftModel, ReadoutModel};
use toricsim::prep::{ground_state_circuit, logical_state_circuit, LogicalState};
use toricsim::sim::{exact_renyi2, expectation, run, run_seeded, sample_shots, InitialState};
use toricsim::{build_lattice, Backend, Boundary, Circuit, Gate, Pauli, PauliString};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ground_state(rows: usize, cols: usize) -> (toricsim::LatticeSpec, toricsim::QuantumState) {
    let l = build_lattice(rows, cols, Boundary::Matching).unwrap();
    let s = run(
        &ground_state_circuit(&l).unwrap(),
        Backend::Tableau,
        &InitialState::Zeros,
    )
    .unwrap();
    (l, s)
}

fn ground_state_exactness() -> Check {
    let (l, s) = ground_state(3, 4);
    let mut worst: f64 = 0.0;
    for p in l.stabilizers() {
        worst = worst.max((expectation(&s, &p).unwrap() - 1.0).abs());
    }
    ensure(
        l.qubit_count == 31 && worst == 0.0,
        format!(
            "{} qubits, {} stabilizers, max |<S> - 1| = {worst}",
            l.qubit_count,
            l.stabilizers().len()
        ),
    )
}

fn depth_formulas() -> Check {
    let mut bad = Vec::new();
    for rows in 1..=3 {
        for n in 1..=6 {
            let l = build_lattice(rows, n, Boundary::Matching).unwrap();
            let got = ground_state_circuit(&l).unwrap().cnot_layers();
            if got != 3 + 2 * ((n - 1) / 2) {
                bad.push(format!("{rows}x{n}: {got}"));
            }
        }
    }
    for d in [3usize, 5] {
        let l = surface_code(d).unwrap();
        for st in [
            LogicalState::Zero,
            LogicalState::One,
            LogicalState::Plus,
            LogicalState::Minus,
        ] {
            let got = logical_state_circuit(&l, st).unwrap().cnot_layers();
            if got != (d + 3) / 2 {
                bad.push(format!("d={d} {st}: {got}"));
            }
        }
    }
    ensure(
        bad.is_empty(),
        format!("18 matching lattices and 8 logical preps; mismatches {bad:?}"),
    )
}

fn entropy_identity() -> Check {
    let (l, s) = ground_state(3, 4);
    let mut worst_purity: f64 = 0.0;
    let mut worst_topo: f64 = 0.0;
    let mut count = 0;
    for shape in [BlockShape::S2x2, BlockShape::S2x3] {
        for (_, parts) in enumerate_partitions(&l, shape).unwrap() {
            for p in parts {
                let qubits = Region::ABC.qubits(&p);
                let sets = pauli_exhaustive(qubits.len());
                let dists = measure_settings(&s, &qubits, &sets, None, None, 0).unwrap();
                let rows = region_purities(&p, &dists, None).unwrap();
                let mut ent = BTreeMap::new();
                for (j, region) in Region::ALL.into_iter().enumerate() {
                    let purity = rows.iter().map(|r| r[j]).sum::<f64>() / rows.len() as f64;
                    let want = exact_renyi2(&s, &region.qubits(&p)).unwrap();
                    worst_purity = worst_purity.max((purity - (-want).exp()).abs());
                    ent.insert(region, renyi2(purity).unwrap());
                }
                worst_topo = worst_topo.max((s_topo(&ent).unwrap() + LN_2).abs());
                count += 1;
            }
        }
    }
    ensure(
        count > 0 && worst_purity < 1e-9 && worst_topo < 1e-9,
        format!("{count} partitions, max purity error {worst_purity:.1e}, max |S_topo + ln 2| {worst_topo:.1e}"),
    )
}

fn sampled_3x3() -> Check {
    let (l, s) = ground_state(3, 4);
    let parts: Vec<_> = enumerate_partitions(&l, BlockShape::S3x3)
        .unwrap()
        .into_iter()
        .flat_map(|(_, ps)| ps)
        .collect();
    let mut topo = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        let seed = 4000 + i as u64;
        let qubits = Region::ABC.qubits(p);
        let sets = settings(SettingMode::HaarRandom, qubits.len(), 1000, seed);
        let dists = measure_settings(&s, &qubits, &sets, Some(10_000), None, seed).unwrap();
        let rows = region_purities(p, &dists, None).unwrap();
        let est = estimate_with_errors(&rows, Resampling::Bootstrap, 50, seed).unwrap();
        topo.push(est[7].value / LN_2);
    }
    let mean = topo.iter().sum::<f64>() / topo.len() as f64;
    let (lo, hi) = topo
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
    ensure(
        (-1.1..=-0.9).contains(&mean),
        format!(
            "mean S_topo/ln2 = {mean:.4} over {} partitions (per-partition range {lo:.3}..{hi:.3})",
            topo.len()
        ),
    )
}

fn mitigation_pipeline() -> Check {
    let (l, s) = ground_state(3, 4);
    let (_, parts) = enumerate_partitions(&l, BlockShape::S2x3).unwrap().remove(0);
    let p = &parts[0];
    let qubits = Region::ABC.qubits(p);
    let exact = exact_renyi2(&s, &qubits).unwrap();
    let ro = ReadoutModel::new(0.01, 0.05).unwrap();
    let sets = settings(SettingMode::HaarRandom, qubits.len(), 400, 55);
    let mut lines = Vec::new();
    let mut results: BTreeMap<(bool, u64), (f64, f64)> = BTreeMap::new();
    for shots in [100u64, 1000, 10_000] {
        let dists = measure_settings(&s, &qubits, &sets, Some(shots), Some(&ro), 500 + shots).unwrap();
        for cov in [true, false] {
            let cfg = MitigationConfig {
                iterations: 50,
                covariance_correction: cov,
                calibration_shots: None,
            };
            let rows = region_purities(p, &dists, Some((&cfg, &ro, 9))).unwrap();
            let est = estimate_with_errors(&rows, Resampling::Bootstrap, 200, 77).unwrap();
            let e = &est[6];
            results.insert((cov, shots), (e.value, e.std_err));
            lines.push(format!(
                "{}N={shots}: {:.3}±{:.3}",
                if cov { "cov " } else { "raw " },
                e.value,
                e.std_err
            ));
        }
    }
    let (ref_v, ref_e) = results[&(true, 10_000)];
    let consistent = [100u64, 1000].iter().all(|n| {
        let (v, e) = results[&(true, *n)];
        (v - ref_v).abs() <= 2.0 * (e * e + ref_e * ref_e).sqrt()
    });
    let (raw_small, raw_small_e) = results[&(false, 100)];
    let (raw_big, raw_big_e) = results[&(false, 10_000)];
    let biased = (raw_big - raw_small) > 3.0 * (raw_small_e.powi(2) + raw_big_e.powi(2)).sqrt();
    ensure(
        consistent && biased,
        format!(
            "S2(2x3 block), exact {exact:.3}; {}; corrected consistent={consistent}, uncorrected biased={biased}",
            lines.join(", ")
        ),
    )
}

fn braiding_table() -> Check {
    let entries = braiding_suite(&SuiteConfig::default(), 3).unwrap();
    let want = [
        ("e-m", PI),
        ("e-e", 0.0),
        ("m-m", 0.0),
        ("e-psi", PI),
        ("m-psi", PI),
        ("psi-psi", 0.0),
        ("exchange-e", 0.0),
        ("exchange-m", 0.0),
        ("exchange-psi", PI),
    ];
    let mut worst: f64 = 0.0;
    let mut ids = Vec::new();
    for (e, (id, w)) in entries.iter().zip(want) {
        ids.push(e.case.id);
        let theta = match &e.result {
            Ok(r) => r.theta,
            Err(err) => return Err(format!("{id}: {err}")),
        };
        let d = (theta - w).rem_euclid(2.0 * PI);
        worst = worst.max(d.min(2.0 * PI - d));
    }
    let names_ok = ids == want.map(|w| w.0);
    ensure(
        entries.len() == 9 && names_ok && worst < 1e-9,
        format!("9 entries, max phase error {worst:.1e}"),
    )
}

fn decoder_correctness() -> Check {
    let mut checked = 0usize;
    let mut failures = 0usize;
    for (d, max_w) in [(3usize, 1usize), (5, 2)] {
        let l = surface_code(d).unwrap();
        let n = l.qubit_count;
        let mut errors: Vec<u64> = (0..n).map(|q| 1u64 << q).collect();
        if max_w >= 2 {
            for a in 0..n {
                for b in a + 1..n {
                    errors.push((1 << a) | (1 << b));
                }
            }
        }
        for st in [
            LogicalState::Zero,
            LogicalState::One,
            LogicalState::Plus,
            LogicalState::Minus,
        ] {
            let (basis, value) = st.readout();
            let dec = Decoder::new(&l, basis).unwrap();
            let prep = logical_state_circuit(&l, st).unwrap();
            let shots =
                sample_logical_shots(&prep, basis, 24, &LogicalNoise::noiseless(), Backend::Tableau, d as u64).unwrap();
            for &s in &shots {
                for &e in &errors {
                    let o = dec.decode(s ^ e);
                    checked += 1;
                    if o.logical_value != value || o.ambiguous {
                        failures += 1;
                    }
                }
            }
        }
    }
    ensure(
        failures == 0,
        format!("{checked} decoded shots, {failures} wrong or ambiguous"),
    )
}

fn correction_benefit() -> Check {
    let l = surface_code(5).unwrap();
    let noise = LogicalNoise {
        readout: Some(ReadoutModel::new(0.019, 0.05).unwrap()),
        ..LogicalNoise::default()
    };
    let mut parts = Vec::new();
    let mut ok = true;
    for st in [
        LogicalState::Zero,
        LogicalState::One,
        LogicalState::Plus,
        LogicalState::Minus,
    ] {
        let (basis, value) = st.readout();
        let dec = Decoder::new(&l, basis).unwrap();
        let prep = logical_state_circuit(&l, st).unwrap();
        let shots = sample_logical_shots(&prep, basis, 10_000, &noise, Backend::Tableau, 21).unwrap();
        let raw = logical_measure(&shots, &dec, false).error(value);
        let corr = logical_measure(&shots, &dec, true).error(value);
        ok &= corr * 2.0 <= raw;
        parts.push(format!("{st}: raw {raw:.4} corrected {corr:.4}"));
    }
    ensure(ok, parts.join(", "))
}

fn injection_round_trip() -> Check {
    let l = surface_code(3).unwrap();
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut worst: f64 = 0.0;
    for i in 0..128 {
        let z: f64 = 1.0 - 2.0 * (i as f64 + 0.5) / 128.0;
        let (theta, phi) = (z.acos(), golden * i as f64);
        let a = C64::new((theta / 2.0).cos(), 0.0);
        let b = C64::from_polar((theta / 2.0).sin(), phi);
        let got = logical_tomography(a, b, &l, &LogicalNoise::noiseless(), None, true, 0).unwrap();
        let want = bloch_of(a, b);
        for k in 0..3 {
            worst = worst.max((got[k] - want[k]).abs());
        }
    }
    ensure(
        worst < 1e-6,
        format!("128 states at d=3, max Bloch component error {worst:.1e}"),
    )
}

fn dynamical_decoupling() -> Check {
    let l = surface_code(5).unwrap();
    let grid: Vec<f64> = [0.0, 0.5, 1.0, 1.5, 2.0].iter().map(|t| t * 1e-6).collect();
    let shots = 10_000usize;
    let noise = LogicalNoise {
        readout: Some(ReadoutModel::new(0.019, 0.05).unwrap()),
        ..LogicalNoise::default()
    };
    let series = |st: LogicalState, dd: DdScheme, seed: u64| -> Vec<f64> {
        let cfg = DecayConfig {
            state: st,
            wait_grid: grid.clone(),
            drift: DriftModel::new(1.0e5).unwrap(),
            dd,
            shots,
            noise: noise.clone(),
            seed,
        };
        decay_experiment(&l, &cfg)
            .unwrap()
            .iter()
            .map(|p| p.corrected_error)
            .collect()
    };
    // binomial tolerance for comparing two independent error rates
    let tol = |a: f64, b: f64| 4.0 * ((a * (1.0 - a) + b * (1.0 - b)) / shots as f64).sqrt() + 1e-3;
    let flat = |v: &[f64]| v.iter().all(|&x| (x - v[0]).abs() <= tol(x, v[0]));
    let same = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(&x, &y)| (x - y).abs() <= tol(x, y));

    let plus = series(LogicalState::Plus, DdScheme::None, 1);
    let plus_dd = series(LogicalState::Plus, DdScheme::XX, 2);
    let one = series(LogicalState::One, DdScheme::None, 3);
    let one_dd = series(LogicalState::One, DdScheme::XX, 4);
    let zero = series(LogicalState::Zero, DdScheme::None, 5);
    let zero_dd = series(LogicalState::Zero, DdScheme::XX, 6);

    let grows = plus.windows(2).all(|w| w[1] + tol(w[0], w[1]) >= w[0]) && plus[4] > plus[0] + 0.1;
    let checks = [
        ("+ grows", grows),
        ("1 flat", flat(&one)),
        ("+ with echo flat", flat(&plus_dd)),
        ("0 unchanged by echo", same(&zero, &zero_dd)),
        ("1 unchanged by echo", same(&one, &one_dd)),
    ];
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join("/");
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    ensure(
        failed.is_empty(),
        format!(
            "+: {} | +dd: {} | 1: {} | 0: {}; failed {failed:?}",
            fmt(&plus),
            fmt(&plus_dd),
            fmt(&one),
            fmt(&zero)
        ),
    )
}

fn random_clifford<R: Rng>(n: usize, depth: usize, rng: &mut R) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..depth {
        let mut free: Vec<usize> = (0..n).collect();
        let mut layer = Vec::new();
        while !free.is_empty() {
            let a = free.swap_remove(rng.random_range(0..free.len()));
            if !free.is_empty() && rng.random_bool(0.4) {
                let b = free.swap_remove(rng.random_range(0..free.len()));
                layer.push(match rng.random_range(0..3) {
                    0 => Gate::cnot(a, b),
                    1 => Gate::cz(a, b),
                    _ => Gate::swap(a, b),
                });
            } else {
                layer.push(match rng.random_range(0..6) {
                    0 => Gate::h(a),
                    1 => Gate::s(a),
                    2 => Gate::sdg(a),
                    3 => Gate::x(a),
                    4 => Gate::y(a),
                    _ => Gate::z(a),
                });
            }
        }
        c.push_layer(layer).unwrap();
    }
    c
}

fn backend_cross_validation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut compared = 0usize;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=12);
        let c = random_clifford(n, rng.random_range(1..=20), &mut rng);
        let t = run_seeded(&c, Backend::Tableau, &InitialState::Zeros, 0).unwrap();
        let d = run_seeded(&c, Backend::Dense, &InitialState::Zeros, 0).unwrap();
        let stabs = t.as_tableau().unwrap().stabilizers();
        let mut ops: Vec<PauliString> = Vec::new();
        for _ in 0..6 {
            // products of stabilizers have expectation ±1, random strings mostly 0
            let mut p = PauliString::identity();
            for s in &stabs {
                if rng.random_bool(0.5) {
                    p = p.mul(s);
                }
            }
            ops.push(p);
            let q = PauliString::from_pairs((0..n).filter_map(|q| match rng.random_range(0..4) {
                0 => None,
                1 => Some((q, Pauli::X)),
                2 => Some((q, Pauli::Y)),
                _ => Some((q, Pauli::Z)),
            }));
            ops.push(q);
        }
        for p in &ops {
            let a = expectation(&t, p).unwrap();
            let b = expectation(&d, p).unwrap();
            worst = worst.max((a - b).abs());
            compared += 1;
        }
        let st = sample_shots(&t, 4, 1).unwrap();
        let pd = toricsim::sim::exact_probs(&d, &(0..n).collect::<Vec<_>>()).unwrap();
        if st.iter().any(|&s| pd.prob(s) < 1e-12) {
            return Err("tableau sampled an outcome the dense state forbids".into());
        }
    }
    ensure(
        worst < 1e-9,
        format!("1000 circuits, {compared} expectations, max difference {worst:.1e}"),
    )
}

type Criterion = (&'static str, Duration, fn() -> Check);

fn main() {
    let criteria: [Criterion; 11] = [
        ("ground-state exactness", Duration::from_secs(1), ground_state_exactness),
        ("depth formulas", Duration::from_secs(60), depth_formulas),
        ("entropy estimator identity", Duration::from_secs(60), entropy_identity),
        ("sampled 3x3 S_topo", Duration::from_secs(600), sampled_3x3),
        ("mitigation pipeline", Duration::from_secs(600), mitigation_pipeline),
        ("braiding table", Duration::from_secs(30), braiding_table),
        ("decoder correctness", Duration::from_secs(60), decoder_correctness),
        ("correction benefit", Duration::from_secs(60), correction_benefit),
        ("injection round-trip", Duration::from_secs(300), injection_round_trip),
        ("dynamical decoupling", Duration::from_secs(300), dynamical_decoupling),
        (
            "backend cross-validation",
            Duration::from_secs(60),
            backend_cross_validation,
        ),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if took <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {:?} budget", budget)),
            Err(d) => (false, d),
        };
        failed += !pass as usize;
        println!(
            "{} {:>2} {name}: {detail} [{:.2} s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
