//! Experiment configuration: one JSON document with an `experiment`
//! discriminator and a parameter block per experiment.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const EXPERIMENTS: [&str; 6] = [
    "ground-state",
    "entropy",
    "braiding-suite",
    "logical-decay",
    "inject-tomography",
    "unfold-demo",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiment: String,
    #[serde(default)]
    pub seed: u64,
    /// Thread cap; does not affect results.
    #[serde(default, skip_serializing)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub noise: NoiseParams,
    #[serde(default)]
    pub ground_state: GroundStateParams,
    #[serde(default)]
    pub entropy: EntropyParams,
    #[serde(default)]
    pub braiding: BraidingParams,
    #[serde(default)]
    pub logical_decay: DecayParams,
    #[serde(default)]
    pub inject_tomography: TomographyParams,
    #[serde(default)]
    pub unfold_demo: UnfoldParams,
}

/// Unset rates fall back to the experiment default (noiseless everywhere
/// except `unfold-demo`, which uses e0 = 0.019, e1 = 0.050).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseParams {
    pub e0: Option<f64>,
    pub e1: Option<f64>,
    pub p_cz: f64,
    pub p_1q: f64,
    /// Standard deviation of the quasi-static frequency drift in Hz.
    pub sigma_f: Option<f64>,
}

/// Illustrative drift strength (100 kHz) used when `sigma_f` is unset.
pub const DEFAULT_SIGMA_F: f64 = 1.0e5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroundStateParams {
    /// Plaquette rows x columns of a matching lattice.
    pub size: String,
    pub circuit: String,
    /// Code distance for the `logical_*` circuits.
    pub distance: usize,
    /// Sampled parities; `None` gives exact expectations (noiseless only).
    pub shots: Option<usize>,
}

impl Default for GroundStateParams {
    fn default() -> Self {
        GroundStateParams {
            size: "3x4".into(),
            circuit: "ground_state".into(),
            distance: 3,
            shots: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntropyParams {
    pub size: String,
    pub shape: String,
    pub mode: String,
    /// Random settings per partition (ignored for exhaustive Pauli).
    pub settings: usize,
    /// Shots per setting; `None` uses exact probabilities.
    pub shots: Option<u64>,
    pub ibu_iterations: usize,
    pub covariance_correction: bool,
    pub calibration_shots: Option<u64>,
    pub bootstrap: usize,
    pub max_partitions: Option<usize>,
}

impl Default for EntropyParams {
    fn default() -> Self {
        EntropyParams {
            size: "3x4".into(),
            shape: "2x3".into(),
            mode: "pauli".into(),
            settings: 200,
            shots: Some(10_000),
            ibu_iterations: 50,
            covariance_correction: true,
            calibration_shots: None,
            bootstrap: 200,
            max_partitions: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BraidingParams {
    pub instances: usize,
    pub trajectories: usize,
    pub shots: Option<u64>,
    pub randomized_compiling: bool,
    pub dual_aux: bool,
}

impl Default for BraidingParams {
    fn default() -> Self {
        BraidingParams {
            instances: 30,
            trajectories: 100,
            shots: None,
            randomized_compiling: true,
            dual_aux: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayParams {
    pub distance: usize,
    pub states: Vec<String>,
    /// Idle times in microseconds.
    pub times_us: Vec<f64>,
    /// `none`, `xx` or `both`.
    pub dd: String,
    pub shots: usize,
    /// Static frequency offset in Hz added to the drift.
    pub offset_f: f64,
}

impl Default for DecayParams {
    fn default() -> Self {
        DecayParams {
            distance: 5,
            states: vec!["zero".into(), "one".into(), "plus".into()],
            times_us: vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
            dd: "both".into(),
            shots: 10_000,
            offset_f: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TomographyParams {
    pub distance: usize,
    pub points: usize,
    pub shots: Option<usize>,
    pub correct: bool,
}

impl Default for TomographyParams {
    fn default() -> Self {
        TomographyParams {
            distance: 3,
            points: 128,
            shots: None,
            correct: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnfoldParams {
    pub size: String,
    pub shape: String,
    pub shots: u64,
    pub iterations: usize,
    pub calibration_shots: Option<u64>,
}

impl Default for UnfoldParams {
    fn default() -> Self {
        UnfoldParams {
            size: "3x4".into(),
            shape: "2x3".into(),
            shots: 10_000,
            iterations: 50,
            calibration_shots: None,
        }
    }
}

impl Config {
    pub fn new(experiment: &str) -> Self {
        Config {
            experiment: experiment.into(),
            seed: 0,
            workers: None,
            noise: NoiseParams::default(),
            ground_state: GroundStateParams::default(),
            entropy: EntropyParams::default(),
            braiding: BraidingParams::default(),
            logical_decay: DecayParams::default(),
            inject_tomography: TomographyParams::default(),
            unfold_demo: UnfoldParams::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let c: Config = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.check_experiment()?;
        Ok(c)
    }

    pub fn check_experiment(&self) -> Result<(), CliError> {
        if EXPERIMENTS.contains(&self.experiment.as_str()) {
            Ok(())
        } else {
            Err(CliError::UnknownExperiment(self.experiment.clone()))
        }
    }

    /// Range checks not already enforced by the library constructors.
    pub fn validate(&self) -> Result<(), CliError> {
        self.check_experiment()?;
        let bad = |m: String| Err(CliError::Config(m));
        for (name, v) in [("e0", self.noise.e0), ("e1", self.noise.e1)] {
            if let Some(v) = v {
                if !(0.0..=1.0).contains(&v) {
                    return bad(format!("{name} = {v} must lie in [0, 1]"));
                }
            }
        }
        for (name, v) in [("p_cz", self.noise.p_cz), ("p_1q", self.noise.p_1q)] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} = {v} must lie in [0, 1]"));
            }
        }
        if self.noise.sigma_f.is_some_and(|s| !(s >= 0.0 && s.is_finite())) {
            return bad("sigma_f must be finite and >= 0".into());
        }
        match self.experiment.as_str() {
            "entropy" => {
                let e = &self.entropy;
                if e.shots == Some(0) || e.bootstrap == 0 || e.settings < 2 {
                    return bad("entropy needs shots > 0, bootstrap > 0 and settings >= 2".into());
                }
                if e.max_partitions == Some(0) {
                    return bad("max_partitions must be positive".into());
                }
            }
            "braiding-suite" => {
                let b = &self.braiding;
                if b.instances < 2 || b.trajectories == 0 || b.shots == Some(0) {
                    return bad("braiding needs instances >= 2, trajectories > 0 and shots > 0".into());
                }
            }
            "logical-decay" => {
                let d = &self.logical_decay;
                if d.shots == 0 || d.times_us.is_empty() || d.states.is_empty() {
                    return bad("logical-decay needs shots > 0 and non-empty states and times".into());
                }
                if d.times_us.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                    return bad("idle times must be finite and >= 0".into());
                }
                if !matches!(d.dd.as_str(), "none" | "xx" | "both") {
                    return bad(format!("dd = {:?}, expected none, xx or both", d.dd));
                }
            }
            "inject-tomography" => {
                let t = &self.inject_tomography;
                if t.points == 0 || t.shots == Some(0) {
                    return bad("inject-tomography needs points > 0 and shots > 0".into());
                }
            }
            "unfold-demo" => {
                let u = &self.unfold_demo;
                if u.shots < 2 || u.calibration_shots == Some(0) {
                    return bad("unfold-demo needs shots >= 2 and calibration_shots > 0".into());
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Parses `RxC` into plaquette rows and columns.
pub fn parse_size(s: &str) -> Result<(usize, usize), CliError> {
    let err = || CliError::Config(format!("size {s:?} is not of the form RxC"));
    let (r, c) = s.split_once(['x', 'X']).ok_or_else(err)?;
    Ok((
        r.trim().parse().map_err(|_| err())?,
        c.trim().parse().map_err(|_| err())?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip() {
        let c = Config::new("entropy");
        let back = Config::parse(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_unknown() {
        assert!(matches!(
            Config::parse(r#"{"experiment": "teleport"}"#),
            Err(CliError::UnknownExperiment(_))
        ));
        assert!(matches!(
            Config::parse(r#"{"experiment": "entropy", "bogus": 1}"#),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_size("3x4").unwrap(), (3, 4));
        assert!(parse_size("34").is_err());
    }

    #[test]
    fn range_checks() {
        let mut c = Config::new("ground-state");
        c.noise.e0 = Some(1.5);
        assert!(c.validate().is_err());
        let mut c = Config::new("logical-decay");
        c.logical_decay.dd = "sometimes".into();
        assert!(c.validate().is_err());
    }
}
