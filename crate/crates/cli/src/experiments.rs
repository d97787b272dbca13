use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use toricsim::braiding::{braiding_suite, BraidKind, SuiteConfig};
use toricsim::entropy::{
    basis_rotation, estimate_with_errors, measure_settings, region_purities, settings, MeasurementSetting,
    MitigationConfig, Region, Resampling, SettingMode,
};
use toricsim::lattice::{enumerate_partitions, surface_code, BlockShape};
use toricsim::logical::{
    bloch_of, decay_csv, decay_experiment, logical_tomography, sample_logical_shots, Basis, DecayConfig, LogicalNoise,
};
use toricsim::mitigation::{calibrate_response, ibu_unfold_with, IbuOptions};
use toricsim::noise::{rng_stream, DdScheme, DriftModel, GateNoise, ReadoutModel};
use toricsim::prep::{circuit_by_name, ground_state_circuit, LogicalState};
use toricsim::sim::{expectation, run_seeded, InitialState};
use toricsim::{build_lattice, Backend, Boundary, Pauli, PauliString};

use crate::config::{parse_size, Config, DEFAULT_SIGMA_F};
use crate::{CliError, Context};

/// Output file name to contents.
pub type Artifacts = BTreeMap<String, String>;

pub fn run(cfg: &Config) -> Result<Artifacts, CliError> {
    let (body, mut files) = match cfg.experiment.as_str() {
        "ground-state" => ground_state(cfg)?,
        "entropy" => entropy(cfg)?,
        "braiding-suite" => braiding(cfg)?,
        "logical-decay" => logical_decay(cfg)?,
        "inject-tomography" => inject_tomography(cfg)?,
        "unfold-demo" => unfold_demo(cfg)?,
        other => return Err(CliError::UnknownExperiment(other.into())),
    };
    let block = match cfg.experiment.as_str() {
        "ground-state" => json!(cfg.ground_state),
        "entropy" => json!(cfg.entropy),
        "braiding-suite" => json!(cfg.braiding),
        "logical-decay" => json!(cfg.logical_decay),
        "inject-tomography" => json!(cfg.inject_tomography),
        _ => json!(cfg.unfold_demo),
    };
    let result = json!({
        "experiment": cfg.experiment,
        "seed": cfg.seed,
        "noise": cfg.noise,
        "parameters": block,
        "result": body,
    });
    files.insert(
        "result.json".into(),
        serde_json::to_string_pretty(&result).expect("json values serialize") + "\n",
    );
    Ok(files)
}

fn readout(cfg: &Config, default: (f64, f64)) -> Result<ReadoutModel, CliError> {
    ReadoutModel::new(cfg.noise.e0.unwrap_or(default.0), cfg.noise.e1.unwrap_or(default.1)).ctx("noise")
}

fn gate_noise(cfg: &Config) -> Result<GateNoise, CliError> {
    GateNoise::new(cfg.noise.p_cz, cfg.noise.p_1q).ctx("noise")
}

fn matching_lattice(size: &str) -> Result<toricsim::LatticeSpec, CliError> {
    let (r, c) = parse_size(size)?;
    build_lattice(r, c, Boundary::Matching).ctx("lattice")
}

fn parity(bits: u64, support: &[usize]) -> f64 {
    if support.iter().filter(|&&q| (bits >> q) & 1 == 1).count() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn ground_state(cfg: &Config) -> Result<(Value, Artifacts), CliError> {
    let g = &cfg.ground_state;
    let lattice = if g.circuit == "ground_state" {
        matching_lattice(&g.size)?
    } else {
        surface_code(g.distance).ctx("lattice")?
    };
    let circuit = circuit_by_name(&lattice, &g.circuit).ctx("state-prep")?;
    let ro = readout(cfg, (0.0, 0.0))?;
    let noise = LogicalNoise {
        readout: (!ro.is_noiseless()).then_some(ro),
        gate: gate_noise(cfg)?,
    };
    let exact = g.shots.is_none();
    if exact && (noise.readout.is_some() || !noise.gate.is_noiseless()) {
        return Err(CliError::Config("noisy ground-state runs need --shots".into()));
    }
    let (stars, plaquettes): (Vec<f64>, Vec<f64>) = if exact {
        let s = run_seeded(&circuit, Backend::Tableau, &InitialState::Zeros, cfg.seed).ctx("sim-backends")?;
        let ev = |p: PauliString| expectation(&s, &p).ctx("sim-backends");
        (
            (0..lattice.stars.len())
                .map(|i| ev(lattice.star_operator(i)))
                .collect::<Result<_, _>>()?,
            (0..lattice.plaquettes.len())
                .map(|i| ev(lattice.plaquette_operator(i)))
                .collect::<Result<_, _>>()?,
        )
    } else {
        let n = g.shots.unwrap_or(0);
        let sample = |basis, stream| {
            sample_logical_shots(
                &circuit,
                basis,
                n,
                &noise,
                Backend::Tableau,
                rng_stream(cfg.seed, stream).random(),
            )
            .ctx("logical")
        };
        let xs = sample(Basis::X, 0)?;
        let zs = sample(Basis::Z, 1)?;
        let mean = |shots: &[u64], sup: &[usize]| shots.iter().map(|&b| parity(b, sup)).sum::<f64>() / n as f64;
        (
            // stars are Z-type, plaquettes X-type
            lattice.stars.iter().map(|s| mean(&zs, s)).collect(),
            lattice.plaquettes.iter().map(|p| mean(&xs, p)).collect(),
        )
    };
    let mut csv = String::from("kind,index,x,y,value\n");
    let mut entries = |kind: &str, vals: &[f64], centers: &[(i32, i32)]| {
        vals.iter()
            .zip(centers)
            .enumerate()
            .map(|(i, (&v, &(x, y)))| {
                csv.push_str(&format!("{kind},{i},{x},{y},{v}\n"));
                json!({ "index": i, "center": [x, y], "value": v })
            })
            .collect::<Vec<_>>()
    };
    let star_json = entries("star", &stars, &lattice.star_centers);
    let plaq_json = entries("plaquette", &plaquettes, &lattice.plaquette_centers);
    let all: Vec<f64> = stars.iter().chain(&plaquettes).copied().collect();
    let body = json!({
        "circuit": g.circuit,
        "lattice": {
            "rows": lattice.plaquette_rows,
            "cols": lattice.plaquette_cols,
            "boundary": lattice.boundary,
            "qubit_count": lattice.qubit_count,
        },
        "cnot_layers": circuit.cnot_layers(),
        "depth": circuit.depth(),
        "exact": exact,
        "shots": g.shots,
        "mean_parity": all.iter().sum::<f64>() / all.len().max(1) as f64,
        "min_parity": all.iter().copied().fold(f64::INFINITY, f64::min),
        "stars": star_json,
        "plaquettes": plaq_json,
    });
    let mut files = Artifacts::new();
    files.insert("parity_map.csv".into(), csv);
    files.insert("circuit.txt".into(), circuit.to_text());
    Ok((body, files))
}

fn entropy(cfg: &Config) -> Result<(Value, Artifacts), CliError> {
    let e = &cfg.entropy;
    let lattice = matching_lattice(&e.size)?;
    let shape: BlockShape = e.shape.parse().ctx("lattice")?;
    let mode: SettingMode = e.mode.parse().ctx("entropy")?;
    let ro = readout(cfg, (0.0, 0.0))?;
    let state = run_seeded(
        &ground_state_circuit(&lattice).ctx("state-prep")?,
        Backend::Tableau,
        &InitialState::Zeros,
        cfg.seed,
    )
    .ctx("sim-backends")?;
    let mut parts: Vec<_> = enumerate_partitions(&lattice, shape)
        .ctx("lattice")?
        .into_iter()
        .flat_map(|(block, ps)| ps.into_iter().map(move |p| (block.clone(), p)))
        .collect();
    if parts.is_empty() {
        return Err(CliError::Config(format!(
            "no {shape} blocks fit on a {} lattice",
            e.size
        )));
    }
    if let Some(m) = e.max_partitions {
        parts.truncate(m);
    }
    let k = parts[0].1.union().len();
    let sets = settings(mode, k, e.settings, cfg.seed);
    let mitigation = MitigationConfig {
        iterations: e.ibu_iterations,
        covariance_correction: e.covariance_correction,
        calibration_shots: e.calibration_shots,
    };
    let mitigate = !ro.is_noiseless() && e.ibu_iterations > 0;
    let method = Resampling::for_mode(mode);
    let results: Vec<_> = parts
        .par_iter()
        .enumerate()
        .map(|(i, (_, p))| {
            let seed = rng_stream(cfg.seed, 1 + i as u64).random::<u64>();
            let qubits = Region::ABC.qubits(p);
            let dists = measure_settings(&state, &qubits, &sets, e.shots, Some(&ro), seed).ctx("entropy")?;
            let rows = region_purities(p, &dists, mitigate.then_some((&mitigation, &ro, seed))).ctx("mitigation")?;
            estimate_with_errors(&rows, method, e.bootstrap, seed).ctx("entropy")
        })
        .collect::<Result<_, CliError>>()?;

    let mut csv =
        String::from("partition,block_row,block_col,height,width,orientation,s_topo,std_err,s_topo_over_ln2\n");
    let mut rows = Vec::new();
    let mut topo = Vec::new();
    for (i, ((block, p), est)) in parts.iter().zip(&results).enumerate() {
        let st = &est[7];
        topo.push(st.value);
        csv.push_str(&format!(
            "{i},{},{},{},{},{},{},{},{}\n",
            block.origin.0,
            block.origin.1,
            block.height,
            block.width,
            p.orientation_id,
            st.value,
            st.std_err,
            st.value / LN_2
        ));
        rows.push(json!({
            "index": i,
            "block": { "origin": [block.origin.0, block.origin.1], "height": block.height, "width": block.width },
            "regions": { "A": p.region_a, "B": p.region_b, "C": p.region_c },
            "orientation": p.orientation_id,
            "estimates": est,
        }));
    }
    let n = topo.len() as f64;
    let mean = topo.iter().sum::<f64>() / n;
    let spread = if topo.len() > 1 {
        (topo.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    let mut hist = String::from("bin_lo_ln2,bin_hi_ln2,count\n");
    for b in 0..30 {
        let lo = -2.0 + 0.1 * b as f64;
        let hi = lo + 0.1;
        let count = topo.iter().filter(|t| (lo..hi).contains(&(*t / LN_2))).count();
        hist.push_str(&format!("{lo:.1},{hi:.1},{count}\n"));
    }
    let body = json!({
        "shape": shape,
        "mode": mode,
        "qubits_per_block": k,
        "settings": sets.len(),
        "shots_per_setting": e.shots,
        "mitigated": mitigate,
        "resampling": method,
        "summary": {
            "partitions": parts.len(),
            "mean_s_topo": mean,
            "mean_s_topo_over_ln2": mean / LN_2,
            "std_err_of_mean": spread,
        },
        "partitions": rows,
    });
    let mut files = Artifacts::new();
    files.insert("s_topo.csv".into(), csv);
    files.insert("histogram.csv".into(), hist);
    Ok((body, files))
}

fn braiding(cfg: &Config) -> Result<(Value, Artifacts), CliError> {
    let b = &cfg.braiding;
    let suite = SuiteConfig {
        n_instances: b.instances,
        shots_per_tomo_axis: b.shots,
        trajectories: b.trajectories,
        gate_noise: gate_noise(cfg)?,
        readout: readout(cfg, (0.0, 0.0))?,
        randomized_compiling: b.randomized_compiling,
        dual_aux: b.dual_aux,
        backend: Backend::Tableau,
    };
    let entries = braiding_suite(&suite, cfg.seed).ctx("braiding")?;
    let mut csv = String::from("id,kind,expected,theta,std_err,bloch_len,status\n");
    let mut rows = Vec::new();
    for en in &entries {
        let kind = match en.case.kind {
            BraidKind::Mutual => "mutual",
            BraidKind::Exchange => "exchange",
        };
        match &en.result {
            Ok(r) => {
                csv.push_str(&format!(
                    "{},{kind},{},{},{},{},ok\n",
                    en.case.id, en.case.expected, r.theta, r.std_err, r.bloch_len
                ));
                rows.push(json!({
                    "id": en.case.id,
                    "kind": kind,
                    "operator": en.case.operator.to_string(),
                    "expected": en.case.expected,
                    "theta": r.theta,
                    "std_err": r.std_err,
                    "bloch_len": r.bloch_len,
                }));
            }
            Err(err) => {
                csv.push_str(&format!(
                    "{},{kind},{},,,,{}\n",
                    en.case.id,
                    en.case.expected,
                    err.kind()
                ));
                rows.push(json!({
                    "id": en.case.id,
                    "kind": kind,
                    "expected": en.case.expected,
                    "error": { "kind": err.kind(), "message": err.to_string() },
                }));
            }
        }
    }
    let mut files = Artifacts::new();
    files.insert("phases.csv".into(), csv);
    Ok((json!({ "entries": rows }), files))
}

fn logical_decay(cfg: &Config) -> Result<(Value, Artifacts), CliError> {
    let d = &cfg.logical_decay;
    let lattice = surface_code(d.distance).ctx("lattice")?;
    let drift = DriftModel::new(cfg.noise.sigma_f.unwrap_or(DEFAULT_SIGMA_F))
        .ctx("noise")?
        .with_offset(d.offset_f);
    let ro = readout(cfg, (0.0, 0.0))?;
    let noise = LogicalNoise {
        readout: (!ro.is_noiseless()).then_some(ro),
        gate: gate_noise(cfg)?,
    };
    let schemes: &[DdScheme] = match d.dd.as_str() {
        "none" => &[DdScheme::None],
        "xx" => &[DdScheme::XX],
        _ => &[DdScheme::None, DdScheme::XX],
    };
    let wait_grid: Vec<f64> = d.times_us.iter().map(|t| t * 1e-6).collect();
    let mut files = Artifacts::new();
    let mut series = Vec::new();
    for (si, name) in d.states.iter().enumerate() {
        let state: LogicalState = name.parse().ctx("logical")?;
        let mut points = Vec::new();
        for (di, &dd) in schemes.iter().enumerate() {
            let run = DecayConfig {
                state,
                wait_grid: wait_grid.clone(),
                drift,
                dd,
                shots: d.shots,
                noise: noise.clone(),
                seed: rng_stream(cfg.seed, (si * schemes.len() + di) as u64).random(),
            };
            points.extend(decay_experiment(&lattice, &run).ctx("logical")?);
        }
        files.insert(format!("decay_{state}.csv"), decay_csv(&points));
        series.push(json!({ "state": state.to_string(), "points": points }));
    }
    let body = json!({
        "distance": d.distance,
        "sigma_f_hz": drift.sigma_f,
        "series": series,
    });
    Ok((body, files))
}

/// Fibonacci-sphere sweep of single-qubit states.
fn sweep(points: usize) -> Vec<(f64, f64)> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..points)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / points as f64;
            (z.clamp(-1.0, 1.0).acos(), (golden * i as f64).rem_euclid(2.0 * PI))
        })
        .collect()
}

fn inject_tomography(cfg: &Config) -> Result<(Value, Artifacts), CliError> {
    let t = &cfg.inject_tomography;
    let lattice = surface_code(t.distance).ctx("lattice")?;
    let ro = readout(cfg, (0.0, 0.0))?;
    let noise = LogicalNoise {
        readout: (!ro.is_noiseless()).then_some(ro),
        gate: gate_noise(cfg)?,
    };
    let pts = sweep(t.points);
    let measured: Vec<[f64; 3]> = pts
        .par_iter()
        .enumerate()
        .map(|(i, &(theta, phi))| {
            let (a, b) = (
                C64::new((theta / 2.0).cos(), 0.0),
                C64::from_polar((theta / 2.0).sin(), phi),
            );
            let seed = rng_stream(cfg.seed, i as u64).random();
            logical_tomography(a, b, &lattice, &noise, t.shots, t.correct, seed).ctx("logical")
        })
        .collect::<Result<_, _>>()?;
    let mut csv = String::from("index,theta,phi,ideal_x,ideal_y,ideal_z,x,y,z,deviation\n");
    let mut devs = Vec::new();
    for (i, (&(theta, phi), m)) in pts.iter().zip(&measured).enumerate() {
        let want = bloch_of(
            C64::new((theta / 2.0).cos(), 0.0),
            C64::from_polar((theta / 2.0).sin(), phi),
        );
        let dev = (0..3).map(|k| (m[k] - want[k]).powi(2)).sum::<f64>().sqrt();
        devs.push(dev);
        csv.push_str(&format!(
            "{i},{theta},{phi},{},{},{},{},{},{},{dev}\n",
            want[0], want[1], want[2], m[0], m[1], m[2]
        ));
    }
    let body = json!({
        "distance": t.distance,
        "points": t.points,
        "shots": t.shots,
        "corrected": t.correct,
        "max_deviation": devs.iter().copied().fold(0.0, f64::max),
        "mean_deviation": devs.iter().sum::<f64>() / devs.len() as f64,
    });
    let mut files = Artifacts::new();
    files.insert("tomography.csv".into(), csv);
    Ok((body, files))
}

fn unfold_demo(cfg: &Config) -> Result<(Value, Artifacts), CliError> {
    let u = &cfg.unfold_demo;
    let lattice = matching_lattice(&u.size)?;
    let shape: BlockShape = u.shape.parse().ctx("lattice")?;
    let ro = readout(cfg, (0.019, 0.050))?;
    let (block, _) = enumerate_partitions(&lattice, shape)
        .ctx("lattice")?
        .into_iter()
        .next()
        .ok_or_else(|| CliError::Config(format!("no {shape} blocks fit on a {} lattice", u.size)))?;
    let k = block.qubits.len();
    let state = run_seeded(
        &ground_state_circuit(&lattice).ctx("state-prep")?,
        Backend::Tableau,
        &InitialState::Zeros,
        cfg.seed,
    )
    .ctx("sim-backends")?;
    let z = MeasurementSetting {
        setting_id: 0,
        mode: SettingMode::PauliExhaustive,
        labels: Some(vec![Pauli::Z; k]),
        unitaries: vec![basis_rotation(Pauli::Z); k],
    };
    let sets = [z];
    let exact = measure_settings(&state, &block.qubits, &sets, None, None, 0)
        .ctx("entropy")?
        .remove(0);
    let measured = measure_settings(&state, &block.qubits, &sets, Some(u.shots), Some(&ro), cfg.seed)
        .ctx("entropy")?
        .remove(0);
    let response =
        calibrate_response(&ro, k, u.calibration_shots, rng_stream(cfg.seed, 1).random()).ctx("mitigation")?;
    let unfolded = ibu_unfold_with(
        &measured,
        &response,
        &IbuOptions {
            iterations: u.iterations,
            tol: None,
            propagate_covariance: true,
        },
    )
    .ctx("mitigation")?;
    let body = json!({
        "qubits": block.qubits,
        "shots": u.shots,
        "iterations": u.iterations,
        "e0": ro.e0,
        "e1": ro.e1,
        "tv_measured": measured.total_variation(&exact),
        "tv_unfolded": unfolded.dist.total_variation(&exact),
        "unfolded": unfolded.to_json(),
    });
    let mut files = Artifacts::new();
    files.insert("exact.csv".into(), exact.to_csv());
    files.insert("measured.csv".into(), measured.to_csv());
    files.insert("unfolded.csv".into(), unfolded.dist.to_csv());
    files.insert("response.csv".into(), response.to_csv());
    Ok((body, files))
}
