//! Second Rényi entropies from randomized local measurements and the
//! topological entanglement entropy of three-region partitions.
//!
//! For local rotations `u` and outcome distribution `P_u`, the per-setting
//! estimate `2^k Σ_{s,s'} (-2)^{-H(s,s')} P_u(s) P_u(s')` averages to `Tr ρ²`
//! over all Pauli bases or over Haar-random unitaries.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::SubsystemPartition;
use crate::mat2::{self, M2};
use crate::mitigation::{calibrate_response, ibu_unfold_with, IbuOptions, UnfoldResult};
use crate::noise::{corrupt_dist, rng_stream, ReadoutModel};
use crate::pauli::Pauli;
use crate::sim::dist::{multinomial, project};
use crate::sim::{LocalState, ProbDist, QuantumState};

/// Purities below this are clamped before taking the logarithm.
pub const PURITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SettingMode {
    /// All `3^k` Pauli bases, each once.
    PauliExhaustive,
    /// Independent Haar-random single-qubit unitaries.
    HaarRandom,
    /// Pauli bases drawn uniformly with replacement.
    PauliRandom,
}

impl FromStr for SettingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pauli" | "pauli-exhaustive" | "exhaustive" => Ok(SettingMode::PauliExhaustive),
            "haar" | "haar-random" => Ok(SettingMode::HaarRandom),
            "pauli-random" | "pauli-sampled" => Ok(SettingMode::PauliRandom),
            _ => Err(Error::InvalidParameter(format!("unknown measurement mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetting {
    pub setting_id: usize,
    pub mode: SettingMode,
    /// Basis labels for the Pauli modes.
    pub labels: Option<Vec<Pauli>>,
    /// Rotation applied to each local qubit before a Z-basis readout.
    pub unitaries: Vec<M2>,
}

/// Rotation mapping the eigenbasis of `p` to the computational basis.
pub fn basis_rotation(p: Pauli) -> M2 {
    match p {
        Pauli::X => mat2::H,
        Pauli::Y => mat2::mul(&mat2::H, &mat2::SDG),
        Pauli::Z => mat2::IDENTITY,
    }
}

fn pauli_setting(setting_id: usize, mode: SettingMode, labels: Vec<Pauli>) -> MeasurementSetting {
    MeasurementSetting {
        setting_id,
        mode,
        unitaries: labels.iter().map(|&p| basis_rotation(p)).collect(),
        labels: Some(labels),
    }
}

const BASES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

pub fn pauli_exhaustive(k: usize) -> Vec<MeasurementSetting> {
    let total = 3usize.pow(k as u32);
    (0..total)
        .map(|id| {
            let mut r = id;
            let labels = (0..k)
                .map(|_| {
                    let p = BASES[r % 3];
                    r /= 3;
                    p
                })
                .collect();
            pauli_setting(id, SettingMode::PauliExhaustive, labels)
        })
        .collect()
}

pub fn pauli_random(k: usize, count: usize, seed: u64) -> Vec<MeasurementSetting> {
    (0..count)
        .map(|id| {
            let mut rng = rng_stream(seed, id as u64);
            let labels = (0..k).map(|_| BASES[rng.random_range(0..3usize)]).collect();
            pauli_setting(id, SettingMode::PauliRandom, labels)
        })
        .collect()
}

/// Haar-random 2×2 unitary: Gram-Schmidt (QR with positive diagonal) of a
/// complex Gaussian matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R) -> M2 {
    let mut g = || C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let (a0, a1, b0, b1) = (g(), g(), g(), g());
    let n1 = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
    let (q0, q1) = (a0 / n1, a1 / n1);
    let proj = q0.conj() * b0 + q1.conj() * b1;
    let (v0, v1) = (b0 - proj * q0, b1 - proj * q1);
    let n2 = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    [[q0, v0 / n2], [q1, v1 / n2]]
}

pub fn haar_random(k: usize, count: usize, seed: u64) -> Vec<MeasurementSetting> {
    (0..count)
        .map(|id| {
            let mut rng = rng_stream(seed, id as u64);
            MeasurementSetting {
                setting_id: id,
                mode: SettingMode::HaarRandom,
                labels: None,
                unitaries: (0..k).map(|_| haar_unitary(&mut rng)).collect(),
            }
        })
        .collect()
}

/// Settings for `mode`; `count` is ignored for the exhaustive mode.
pub fn settings(mode: SettingMode, k: usize, count: usize, seed: u64) -> Vec<MeasurementSetting> {
    match mode {
        SettingMode::PauliExhaustive => pauli_exhaustive(k),
        SettingMode::HaarRandom => haar_random(k, count, seed),
        SettingMode::PauliRandom => pauli_random(k, count, seed),
    }
}

/// `pᵀ K p` with `K = ⊗ [[1, -1/2], [-1/2, 1]]`.
fn kernel_form(p: &[f64]) -> f64 {
    let mut kp = p.to_vec();
    let mut h = 1;
    while h < kp.len() {
        for i in 0..kp.len() {
            if i & h == 0 {
                let (a, b) = (kp[i], kp[i | h]);
                kp[i] = a - 0.5 * b;
                kp[i | h] = b - 0.5 * a;
            }
        }
        h <<= 1;
    }
    p.iter().zip(&kp).map(|(a, b)| a * b).sum()
}

/// `Σ_{s,s'} (-1/2)^{H(s,s')} C(s,s')`.
fn kernel_trace(c: &DMatrix<f64>) -> f64 {
    let dim = c.nrows();
    let mut w = vec![1.0; dim];
    for (x, wx) in w.iter_mut().enumerate() {
        *wx = (-0.5f64).powi(x.count_ones() as i32);
    }
    let mut t = 0.0;
    for j in 0..dim {
        for i in 0..dim {
            t += w[i ^ j] * c[(i, j)];
        }
    }
    t
}

/// Second-moment information attached to one estimated distribution.
#[derive(Debug, Clone)]
pub enum Moments {
    Exact,
    /// Raw multinomial data from `n` shots.
    Multinomial(u64),
    /// Covariance of an unfolded distribution.
    Covariance(DMatrix<f64>),
    /// Plug-in estimate without bias correction.
    Uncorrected,
}

/// Single-setting purity estimate from dense probabilities over `k` bits.
pub fn setting_purity(p: &[f64], moments: &Moments) -> Result<f64> {
    let k = p.len().trailing_zeros() as i32;
    let q = kernel_form(p);
    let scale = 2f64.powi(k);
    match moments {
        Moments::Exact | Moments::Uncorrected => Ok(scale * q),
        Moments::Multinomial(n) => {
            if *n < 2 {
                return Err(Error::TooFewSamples {
                    need: 2,
                    got: *n as usize,
                });
            }
            let n = *n as f64;
            let total: f64 = p.iter().sum();
            Ok(scale * (n * q - total) / (n - 1.0))
        }
        Moments::Covariance(c) => {
            if c.nrows() != p.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{}-entry distribution, {}x{} covariance",
                    p.len(),
                    c.nrows(),
                    c.ncols()
                )));
            }
            Ok(scale * (q - kernel_trace(c)))
        }
    }
}

fn moments_of(d: &ProbDist) -> Result<Moments> {
    match d.shot_count {
        None => Ok(Moments::Exact),
        Some(_) if d.unfolded => Err(Error::MissingCovariance),
        Some(n) => Ok(Moments::Multinomial(n)),
    }
}

/// Average of per-setting estimates over all settings, every `P(s)P(s')`
/// term debiased according to how the distribution was obtained.
pub fn purity_estimate(settings: &[MeasurementSetting], dists: &[ProbDist], k: usize) -> Result<f64> {
    if settings.len() != dists.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} settings, {} distributions",
            settings.len(),
            dists.len()
        )));
    }
    if dists.is_empty() {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    let mut sum = 0.0;
    for (s, d) in settings.iter().zip(dists) {
        if d.bits != k || s.unitaries.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "setting {} has {} bits, expected {k}",
                s.setting_id, d.bits
            )));
        }
        sum += setting_purity(&d.to_dense()?, &moments_of(d)?)?;
    }
    Ok(sum / dists.len() as f64)
}

/// Same as [`purity_estimate`] for unfolded data, using the propagated covariance.
pub fn purity_estimate_unfolded(unfolded: &[UnfoldResult]) -> Result<f64> {
    if unfolded.is_empty() {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    let mut sum = 0.0;
    for u in unfolded {
        sum += setting_purity(&u.dist.to_dense()?, &Moments::Covariance(u.covariance.clone()))?;
    }
    Ok(sum / unfolded.len() as f64)
}

pub fn renyi2(purity: f64) -> Result<f64> {
    if purity.is_nan() || purity <= 0.0 {
        return Err(Error::NonPositivePurity(purity));
    }
    Ok(-purity.ln())
}

/// `-ln max(purity, PURITY_FLOOR)` and whether clamping happened.
pub fn renyi2_clamped(purity: f64) -> (f64, bool) {
    if purity.is_nan() || purity < PURITY_FLOOR {
        (-PURITY_FLOOR.ln(), true)
    } else {
        (-purity.ln(), false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    A,
    B,
    C,
    AB,
    BC,
    AC,
    ABC,
}

impl Region {
    pub const ALL: [Region; 7] = [
        Region::A,
        Region::B,
        Region::C,
        Region::AB,
        Region::BC,
        Region::AC,
        Region::ABC,
    ];

    /// Sign in `S_A + S_B + S_C - S_AB - S_BC - S_AC + S_ABC`.
    pub fn sign(self) -> f64 {
        match self {
            Region::A | Region::B | Region::C | Region::ABC => 1.0,
            _ => -1.0,
        }
    }

    fn parts(self) -> [bool; 3] {
        match self {
            Region::A => [true, false, false],
            Region::B => [false, true, false],
            Region::C => [false, false, true],
            Region::AB => [true, true, false],
            Region::BC => [false, true, true],
            Region::AC => [true, false, true],
            Region::ABC => [true, true, true],
        }
    }

    pub fn qubits(self, p: &SubsystemPartition) -> Vec<usize> {
        let [a, b, c] = self.parts();
        let mut out = Vec::new();
        if a {
            out.extend(&p.region_a);
        }
        if b {
            out.extend(&p.region_b);
        }
        if c {
            out.extend(&p.region_c);
        }
        out
    }

    /// Bit positions of this region inside the `A ++ B ++ C` ordering.
    pub fn positions(self, p: &SubsystemPartition) -> Vec<usize> {
        let [a, b, c] = self.parts();
        let (na, nb, nc) = (p.region_a.len(), p.region_b.len(), p.region_c.len());
        let mut out = Vec::new();
        if a {
            out.extend(0..na);
        }
        if b {
            out.extend(na..na + nb);
        }
        if c {
            out.extend(na + nb..na + nb + nc);
        }
        out
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub fn s_topo(entropies: &BTreeMap<Region, f64>) -> Result<f64> {
    let mut t = 0.0;
    for r in Region::ALL {
        let s = entropies.get(&r).ok_or_else(|| Error::MissingRegion(r.to_string()))?;
        t += r.sign() * s;
    }
    Ok(t)
}

/// Covariance of the marginal over `positions` of a distribution over `bits` bits.
pub fn marginal_covariance(c: &DMatrix<f64>, positions: &[usize]) -> DMatrix<f64> {
    let dim = 1usize << positions.len();
    let mut out = DMatrix::zeros(dim, dim);
    let proj: Vec<usize> = (0..c.nrows()).map(|s| project(s as u64, positions) as usize).collect();
    for j in 0..c.ncols() {
        for i in 0..c.nrows() {
            out[(proj[i], proj[j])] += c[(i, j)];
        }
    }
    out
}

/// Readout-error mitigation applied per setting before estimation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MitigationConfig {
    pub iterations: usize,
    /// Subtract the propagated covariance from second moments.
    pub covariance_correction: bool,
    /// Shots per basis state for calibration; `None` uses the exact matrix.
    pub calibration_shots: Option<u64>,
}

/// Outcome distributions of `state` restricted to `qubits` under each setting.
/// With `shots`, every setting gets an independent multinomial sample
/// (substream = setting id) of the readout-corrupted distribution.
pub fn measure_settings(
    state: &QuantumState,
    qubits: &[usize],
    settings: &[MeasurementSetting],
    shots: Option<u64>,
    readout: Option<&ReadoutModel>,
    seed: u64,
) -> Result<Vec<ProbDist>> {
    let local = LocalState::from_state(state, qubits)?;
    settings
        .iter()
        .map(|s| {
            let p = local.probabilities(&s.unitaries)?;
            let mut d = ProbDist::from_dense(&p, None);
            if let Some(m) = readout {
                d = corrupt_dist(&d, m);
            }
            match shots {
                None => Ok(d),
                Some(n) => {
                    let mut rng = rng_stream(seed, s.setting_id as u64);
                    let dense = d.to_dense()?;
                    let counts = multinomial(&dense, n, &mut rng);
                    let map = counts
                        .into_iter()
                        .enumerate()
                        .filter(|(_, c)| *c > 0)
                        .map(|(i, c)| (i as u64, c))
                        .collect();
                    Ok(ProbDist::from_counts(d.bits, &map))
                }
            }
        })
        .collect()
}

/// Per-setting purity estimates of the seven regions of a partition from one
/// shared dataset over `A ++ B ++ C`. Row = setting, column = `Region::ALL`.
pub fn region_purities(
    partition: &SubsystemPartition,
    dists: &[ProbDist],
    mitigation: Option<(&MitigationConfig, &ReadoutModel, u64)>,
) -> Result<Vec<[f64; 7]>> {
    let k = partition.region_a.len() + partition.region_b.len() + partition.region_c.len();
    let response = match mitigation {
        Some((cfg, model, seed)) => Some(calibrate_response(model, k, cfg.calibration_shots, seed)?),
        None => None,
    };
    let mut rows = Vec::with_capacity(dists.len());
    for d in dists {
        if d.bits != k {
            return Err(Error::DimensionMismatch(format!(
                "{}-bit distribution for {k} qubits",
                d.bits
            )));
        }
        let (full, cov): (ProbDist, Option<DMatrix<f64>>) = match (&response, mitigation) {
            (Some(r), Some((cfg, _, _))) => {
                let opts = IbuOptions {
                    iterations: cfg.iterations,
                    tol: None,
                    propagate_covariance: cfg.covariance_correction && d.shot_count.is_some(),
                };
                let u = ibu_unfold_with(d, r, &opts)?;
                let cov = opts.propagate_covariance.then_some(u.covariance);
                (u.dist, cov)
            }
            _ => (d.clone(), None),
        };
        let mut row = [0.0; 7];
        for (slot, region) in row.iter_mut().zip(Region::ALL) {
            let pos = region.positions(partition);
            let marg = full.marginal(&pos);
            let moments = match (&cov, full.shot_count, full.unfolded) {
                (Some(c), _, _) => Moments::Covariance(marginal_covariance(c, &pos)),
                (None, None, _) => Moments::Exact,
                (None, Some(_), true) => Moments::Uncorrected,
                (None, Some(n), false) => Moments::Multinomial(n),
            };
            *slot = setting_purity(&marg.to_dense()?, &moments)?;
        }
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Resampling {
    Bootstrap,
    Jackknife,
}

impl Resampling {
    /// Bootstrap for Haar and exhaustive data, jackknife for Pauli sampling
    /// with replacement.
    pub fn for_mode(mode: SettingMode) -> Self {
        match mode {
            SettingMode::PauliRandom => Resampling::Jackknife,
            _ => Resampling::Bootstrap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    /// Natural-log units.
    pub value: f64,
    pub std_err: f64,
    pub method: Resampling,
    pub subsystem: String,
    /// Delete-1 jackknife bias-corrected value (jackknife only).
    pub bias_corrected: Option<f64>,
    /// Some purity fell below the floor and was clamped.
    pub clamped: bool,
}

fn entropies_from_means(means: &[f64; 7]) -> ([f64; 7], bool) {
    let mut out = [0.0; 7];
    let mut clamped = false;
    for (o, &p) in out.iter_mut().zip(means) {
        let (s, c) = renyi2_clamped(p);
        *o = s;
        clamped |= c;
    }
    (out, clamped)
}

fn topo(s: &[f64; 7]) -> f64 {
    Region::ALL.iter().zip(s).map(|(r, v)| r.sign() * v).sum()
}

fn mean_rows(rows: &[[f64; 7]], idx: impl Iterator<Item = usize>) -> [f64; 7] {
    let mut m = [0.0; 7];
    let mut n = 0usize;
    for i in idx {
        for (a, b) in m.iter_mut().zip(&rows[i]) {
            *a += b;
        }
        n += 1;
    }
    m.map(|x| x / n as f64)
}

/// Estimates of the seven region entropies followed by `S_topo` (eight
/// entries, in `Region::ALL` order then "S_topo"), with resampling errors over
/// settings.
pub fn estimate_with_errors(
    rows: &[[f64; 7]],
    method: Resampling,
    bootstrap_samples: usize,
    seed: u64,
) -> Result<Vec<EntropyEstimate>> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::TooFewSamples { need: 2, got: n });
    }
    let (central, clamped) = entropies_from_means(&mean_rows(rows, 0..n));
    let mut values: Vec<f64> = central.to_vec();
    values.push(topo(&central));

    let reps: Vec<Vec<f64>> = match method {
        Resampling::Bootstrap => {
            let mut rng = rng_stream(seed, u64::MAX);
            (0..bootstrap_samples.max(2))
                .map(|_| {
                    let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                    let (s, _) = entropies_from_means(&mean_rows(rows, idx.into_iter()));
                    let mut v = s.to_vec();
                    v.push(topo(&s));
                    v
                })
                .collect()
        }
        Resampling::Jackknife => (0..n)
            .map(|leave| {
                let (s, _) = entropies_from_means(&mean_rows(rows, (0..n).filter(|&i| i != leave)));
                let mut v = s.to_vec();
                v.push(topo(&s));
                v
            })
            .collect(),
    };
    let names: Vec<String> = Region::ALL
        .iter()
        .map(|r| r.to_string())
        .chain(std::iter::once("S_topo".to_string()))
        .collect();
    let m = reps.len() as f64;
    Ok((0..8)
        .map(|j| {
            let mean = reps.iter().map(|r| r[j]).sum::<f64>() / m;
            // identical replicates give exactly zero rather than rounding noise
            let ss: f64 = if reps.iter().all(|r| r[j] == reps[0][j]) {
                0.0
            } else {
                reps.iter().map(|r| (r[j] - mean).powi(2)).sum()
            };
            let (std_err, bias_corrected) = match method {
                Resampling::Bootstrap => ((ss / (m - 1.0)).sqrt(), None),
                Resampling::Jackknife => {
                    let nf = n as f64;
                    (((nf - 1.0) / nf * ss).sqrt(), Some(nf * values[j] - (nf - 1.0) * mean))
                }
            };
            EntropyEstimate {
                value: values[j],
                std_err,
                method,
                subsystem: names[j].clone(),
                bias_corrected,
                clamped,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Circuit, Gate};
    use crate::lattice::{build_lattice, enumerate_partitions, BlockShape, Boundary};
    use crate::prep::ground_state_circuit;
    use crate::sim::{exact_renyi2, run, Backend, InitialState};

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = rng_stream(1, 0);
        for _ in 0..100 {
            assert!(mat2::is_unitary(&haar_unitary(&mut rng), 1e-12));
        }
    }

    #[test]
    fn basis_rotations_diagonalize() {
        for p in BASES {
            let u = basis_rotation(p);
            let img = mat2::mul(&mat2::mul(&u, &mat2::pauli(p)), &mat2::dagger(&u));
            assert!(mat2::max_diff(&img, &mat2::Z) < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn kernel_form_matches_hamming_sum() {
        let p = [0.1, 0.2, 0.3, 0.05, 0.05, 0.1, 0.15, 0.05];
        let mut want = 0.0;
        for s in 0..8usize {
            for t in 0..8usize {
                want += (-0.5f64).powi((s ^ t).count_ones() as i32) * p[s] * p[t];
            }
        }
        assert!((kernel_form(&p) - want).abs() < 1e-15);
    }

    #[test]
    fn simple_purities() {
        let mut c = Circuit::new(2);
        c.push_layer(vec![Gate::h(0)]).unwrap();
        c.push_layer(vec![Gate::cnot(0, 1)]).unwrap();
        let s = run(&c, Backend::Tableau, &InitialState::Zeros).unwrap();
        let set = pauli_exhaustive(1);
        let d = measure_settings(&s, &[1], &set, None, None, 0).unwrap();
        assert!((purity_estimate(&set, &d, 1).unwrap() - 0.5).abs() < 1e-12);
        let zero = run(&Circuit::new(1), Backend::Tableau, &InitialState::Zeros).unwrap();
        let d = measure_settings(&zero, &[0], &set, None, None, 0).unwrap();
        assert!((purity_estimate(&set, &d, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn renyi_values() {
        assert_eq!(renyi2(1.0).unwrap(), 0.0);
        assert!((renyi2(0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((renyi2(2f64.powi(-6)).unwrap() - 6.0 * 2f64.ln()).abs() < 1e-12);
        assert!(renyi2(0.0).is_err());
        assert!(renyi2_clamped(-0.1).1);
    }

    #[test]
    fn s_topo_needs_all_regions() {
        let mut m: BTreeMap<Region, f64> = Region::ALL.iter().map(|&r| (r, 0.7)).collect();
        assert!((s_topo(&m).unwrap() - 0.7).abs() < 1e-15);
        m.remove(&Region::AC);
        assert!(matches!(s_topo(&m), Err(Error::MissingRegion(_))));
    }

    #[test]
    fn exhaustive_exact_matches_oracle_on_2x2_blocks() {
        let l = build_lattice(2, 3, Boundary::Matching).unwrap();
        let s = run(
            &ground_state_circuit(&l).unwrap(),
            Backend::Tableau,
            &InitialState::Zeros,
        )
        .unwrap();
        let set = pauli_exhaustive(4);
        for (_, parts) in enumerate_partitions(&l, BlockShape::S2x2).unwrap() {
            for p in parts {
                let qs = Region::ABC.qubits(&p);
                let d = measure_settings(&s, &qs, &set, None, None, 0).unwrap();
                let rows = region_purities(&p, &d, None).unwrap();
                let est = estimate_with_errors(&rows, Resampling::Bootstrap, 10, 0).unwrap();
                for (i, r) in Region::ALL.iter().enumerate() {
                    let exact = exact_renyi2(&s, &r.qubits(&p)).unwrap();
                    assert!((est[i].value - exact).abs() < 1e-9, "{r}");
                }
                assert!((est[7].value + 2f64.ln()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_variance_rows_have_zero_error() {
        let rows = vec![[0.5; 7]; 5];
        for m in [Resampling::Bootstrap, Resampling::Jackknife] {
            let e = estimate_with_errors(&rows, m, 50, 3).unwrap();
            assert!(e.iter().all(|x| x.std_err == 0.0));
        }
        assert!(estimate_with_errors(&rows[..1], Resampling::Jackknife, 0, 0).is_err());
    }

    #[test]
    fn raw_shot_estimator_is_unbiased() {
        let set = vec![pauli_setting(0, SettingMode::PauliRandom, vec![Pauli::X])];
        let zero = run(&Circuit::new(1), Backend::Tableau, &InitialState::Zeros).unwrap();
        let mut acc = 0.0;
        let reps = 4000;
        for r in 0..reps {
            let d = measure_settings(&zero, &[0], &set, Some(10), None, r).unwrap();
            acc += purity_estimate(&set, &d, 1).unwrap();
        }
        // X basis on |0⟩: uniform outcomes, per-setting value 2·(1/2 - 1/4)
        let mean = acc / reps as f64;
        assert!((mean - 0.5).abs() < 0.03, "{mean}");
    }
}
