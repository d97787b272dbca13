use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod config;
mod experiments;

use config::Config;

/// Output root used when `--out` is not given.
pub const OUT_ENV: &str = "TORICSIM_OUT";

#[derive(Debug)]
pub enum CliError {
    Config(String),
    UnknownExperiment(String),
    Io(String),
    Library {
        module: &'static str,
        source: toricsim::Error,
    },
}

impl CliError {
    fn to_json(&self) -> serde_json::Value {
        let (kind, module, message) = match self {
            CliError::Config(m) => ("Config", None, m.clone()),
            CliError::UnknownExperiment(e) => (
                "UnknownExperiment",
                None,
                format!("unknown experiment {e:?}, expected one of {:?}", config::EXPERIMENTS),
            ),
            CliError::Io(m) => ("Io", None, m.clone()),
            CliError::Library { module, source } => (source.kind(), Some(*module), source.to_string()),
        };
        serde_json::json!({ "error": { "kind": kind, "module": module, "message": message } })
    }
}

/// Attaches the module name to library errors.
pub trait Context<T> {
    fn ctx(self, module: &'static str) -> Result<T, CliError>;
}

impl<T> Context<T> for toricsim::Result<T> {
    fn ctx(self, module: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Library { module, source })
    }
}

#[derive(Parser, Debug)]
#[command(name = "toricsim", version, about = "Run toric-code and surface-code experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// JSON config; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output root (default: $TORICSIM_OUT or ./results).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run directory name (default: a timestamp).
    #[arg(long)]
    label: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
struct NoiseArgs {
    #[arg(long)]
    e0: Option<f64>,
    #[arg(long)]
    e1: Option<f64>,
    #[arg(long)]
    p_cz: Option<f64>,
    #[arg(long)]
    p_1q: Option<f64>,
    /// Drift standard deviation in Hz.
    #[arg(long)]
    sigma_f: Option<f64>,
    /// Zero every noise rate.
    #[arg(long)]
    noiseless: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the experiment named in a config file.
    Run {
        config_path: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Stabilizer parities of a prepared state.
    GroundState {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        size: Option<String>,
        /// Builder name: ground_state or logical_{zero,one,plus,minus}.
        #[arg(long)]
        circuit: Option<String>,
        #[arg(long)]
        distance: Option<usize>,
        #[arg(long)]
        shots: Option<usize>,
    },
    /// Topological entanglement entropy from randomized measurements.
    Entropy {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        size: Option<String>,
        #[arg(long)]
        shape: Option<String>,
        /// pauli, haar or pauli-random.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        settings: Option<usize>,
        #[arg(long)]
        shots: Option<u64>,
        /// Use exact outcome probabilities instead of shots.
        #[arg(long, conflicts_with = "shots")]
        exact: bool,
        #[arg(long)]
        ibu_iterations: Option<usize>,
        #[arg(long)]
        no_covariance: bool,
        #[arg(long)]
        calibration_shots: Option<u64>,
        #[arg(long)]
        bootstrap: Option<usize>,
        #[arg(long)]
        max_partitions: Option<usize>,
    },
    /// Braiding and exchange phases of the anyons.
    BraidingSuite {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long)]
        trajectories: Option<usize>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        no_rc: bool,
        #[arg(long)]
        dual_aux: bool,
    },
    /// Logical error versus idle time under frequency drift.
    LogicalDecay {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        distance: Option<usize>,
        /// Comma-separated list of zero, one, plus, minus.
        #[arg(long, value_delimiter = ',')]
        states: Option<Vec<String>>,
        /// Comma-separated idle times in microseconds.
        #[arg(long, value_delimiter = ',')]
        times_us: Option<Vec<f64>>,
        /// none, xx or both.
        #[arg(long)]
        dd: Option<String>,
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long)]
        offset_f: Option<f64>,
    },
    /// Logical tomography of injected states over the Bloch sphere.
    InjectTomography {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        distance: Option<usize>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long)]
        raw: bool,
    },
    /// Readout corruption and iterative Bayesian unfolding of one block.
    UnfoldDemo {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        size: Option<String>,
        #[arg(long)]
        shape: Option<String>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        calibration_shots: Option<u64>,
    },
}

fn base_config(name: &str, common: &Common) -> Result<Config, CliError> {
    let c = match &common.config {
        Some(p) => {
            let c = Config::load(p)?;
            if c.experiment != name {
                return Err(CliError::Config(format!(
                    "config is for {:?} but the {name} subcommand was used",
                    c.experiment
                )));
            }
            c
        }
        None => Config::new(name),
    };
    Ok(c)
}

fn apply_noise(c: &mut Config, n: &NoiseArgs) {
    if n.noiseless {
        c.noise = config::NoiseParams {
            e0: Some(0.0),
            e1: Some(0.0),
            sigma_f: Some(0.0),
            ..Default::default()
        };
        c.braiding.shots = None;
        return;
    }
    if n.e0.is_some() {
        c.noise.e0 = n.e0;
    }
    if n.e1.is_some() {
        c.noise.e1 = n.e1;
    }
    if let Some(p) = n.p_cz {
        c.noise.p_cz = p;
    }
    if let Some(p) = n.p_1q {
        c.noise.p_1q = p;
    }
    if n.sigma_f.is_some() {
        c.noise.sigma_f = n.sigma_f;
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn resolve(cmd: Command) -> Result<(Config, Common), CliError> {
    let (cfg, common) = match cmd {
        Command::Run { config_path, common } => {
            let mut c = Config::load(&config_path)?;
            c.check_experiment()?;
            set(&mut c.seed, common.seed);
            (c, common)
        }
        Command::GroundState {
            common,
            noise,
            size,
            circuit,
            distance,
            shots,
        } => {
            let mut c = base_config("ground-state", &common)?;
            apply_noise(&mut c, &noise);
            let g = &mut c.ground_state;
            set(&mut g.size, size);
            set(&mut g.circuit, circuit);
            set(&mut g.distance, distance);
            if shots.is_some() {
                g.shots = shots;
            }
            (c, common)
        }
        Command::Entropy {
            common,
            noise,
            size,
            shape,
            mode,
            settings,
            shots,
            exact,
            ibu_iterations,
            no_covariance,
            calibration_shots,
            bootstrap,
            max_partitions,
        } => {
            let mut c = base_config("entropy", &common)?;
            apply_noise(&mut c, &noise);
            let e = &mut c.entropy;
            set(&mut e.size, size);
            set(&mut e.shape, shape);
            set(&mut e.mode, mode);
            set(&mut e.settings, settings);
            if exact {
                e.shots = None;
            } else if shots.is_some() {
                e.shots = shots;
            }
            set(&mut e.ibu_iterations, ibu_iterations);
            if no_covariance {
                e.covariance_correction = false;
            }
            if calibration_shots.is_some() {
                e.calibration_shots = calibration_shots;
            }
            set(&mut e.bootstrap, bootstrap);
            if max_partitions.is_some() {
                e.max_partitions = max_partitions;
            }
            (c, common)
        }
        Command::BraidingSuite {
            common,
            noise,
            instances,
            trajectories,
            shots,
            no_rc,
            dual_aux,
        } => {
            let mut c = base_config("braiding-suite", &common)?;
            let b = &mut c.braiding;
            set(&mut b.instances, instances);
            set(&mut b.trajectories, trajectories);
            if shots.is_some() {
                b.shots = shots;
            }
            if no_rc {
                b.randomized_compiling = false;
            }
            b.dual_aux |= dual_aux;
            apply_noise(&mut c, &noise);
            (c, common)
        }
        Command::LogicalDecay {
            common,
            noise,
            distance,
            states,
            times_us,
            dd,
            shots,
            offset_f,
        } => {
            let mut c = base_config("logical-decay", &common)?;
            apply_noise(&mut c, &noise);
            let d = &mut c.logical_decay;
            set(&mut d.distance, distance);
            set(&mut d.states, states);
            set(&mut d.times_us, times_us);
            set(&mut d.dd, dd);
            set(&mut d.shots, shots);
            set(&mut d.offset_f, offset_f);
            (c, common)
        }
        Command::InjectTomography {
            common,
            noise,
            distance,
            points,
            shots,
            raw,
        } => {
            let mut c = base_config("inject-tomography", &common)?;
            apply_noise(&mut c, &noise);
            let t = &mut c.inject_tomography;
            set(&mut t.distance, distance);
            set(&mut t.points, points);
            if shots.is_some() {
                t.shots = shots;
            }
            if raw {
                t.correct = false;
            }
            (c, common)
        }
        Command::UnfoldDemo {
            common,
            noise,
            size,
            shape,
            shots,
            iterations,
            calibration_shots,
        } => {
            let mut c = base_config("unfold-demo", &common)?;
            apply_noise(&mut c, &noise);
            let u = &mut c.unfold_demo;
            set(&mut u.size, size);
            set(&mut u.shape, shape);
            set(&mut u.shots, shots);
            set(&mut u.iterations, iterations);
            if calibration_shots.is_some() {
                u.calibration_shots = calibration_shots;
            }
            (c, common)
        }
    };
    let mut cfg = cfg;
    set(&mut cfg.seed, common.seed);
    if common.workers.is_some() {
        cfg.workers = common.workers;
    }
    cfg.validate()?;
    Ok((cfg, common))
}

fn out_dir(cfg: &Config, common: &Common) -> PathBuf {
    let root = common
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"));
    let label = common.label.clone().unwrap_or_else(|| {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!("run-{secs}")
    });
    root.join(&cfg.experiment).join(label)
}

fn execute(cmd: Command) -> Result<PathBuf, CliError> {
    let (cfg, common) = resolve(cmd)?;
    if let Some(w) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    }
    let artifacts = experiments::run(&cfg)?;
    let dir = out_dir(&cfg, &common);
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    for (name, body) in &artifacts {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(dir)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
