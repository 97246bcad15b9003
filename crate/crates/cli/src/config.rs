//! Run configuration: a TOML file with top-level run keys and one optional
//! section per experiment. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use dgsim_core::experiments::FtlSetup;
use dgsim_core::gpvm::Base;
use dgsim_core::{Grid1D, Interval, Potential, PotentialShape};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Final time of `evolve`; `ftl` falls back to its own default.
    pub t_final: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub potential: PotentialConfig,
    #[serde(default)]
    pub evolve: EvolveConfig,
    #[serde(default)]
    pub overlap: OverlapConfig,
    #[serde(default)]
    pub ftl: FtlSetup,
    #[serde(default)]
    pub mixture: MixtureConfig,
    #[serde(default)]
    pub momentum: MomentumConfig,
    #[serde(default)]
    pub conservation: ConservationConfig,
    #[serde(default)]
    pub logic: LogicConfig,
    #[serde(default)]
    pub gpvm: GpvmConfig,
}

fn default_dt() -> f64 {
    1e-3
}

fn default_seed() -> u64 {
    42
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("dgsim-out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n: 4096,
            x_min: -8.0,
            x_max: 8.0,
        }
    }
}

/// Potential shape plus an optional switching window; a missing `t_on` or
/// `t_off` leaves that side of the window open.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    Zero,
    Harmonic {
        omega: f64,
        #[serde(default)]
        center: f64,
        t_on: Option<f64>,
        t_off: Option<f64>,
    },
    Gaussian {
        height: f64,
        width: f64,
        #[serde(default)]
        center: f64,
        t_on: Option<f64>,
        t_off: Option<f64>,
    },
    Barrier {
        height: f64,
        a: f64,
        b: f64,
        t_on: Option<f64>,
        t_off: Option<f64>,
    },
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self::Zero
    }
}

impl PotentialConfig {
    pub fn build(&self) -> dgsim_core::Result<Potential> {
        let window = |on: Option<f64>, off: Option<f64>| {
            (on.unwrap_or(f64::NEG_INFINITY), off.unwrap_or(f64::INFINITY))
        };
        let (shape, (t_on, t_off)) = match *self {
            Self::Zero => return Ok(Potential::zero()),
            Self::Harmonic { omega, center, t_on, t_off } => {
                (PotentialShape::Harmonic { omega, center }, window(t_on, t_off))
            }
            Self::Gaussian { height, width, center, t_on, t_off } => {
                (PotentialShape::Gaussian { height, width, center }, window(t_on, t_off))
            }
            Self::Barrier { height, a, b, t_on, t_off } => {
                (PotentialShape::Barrier { height, a, b }, window(t_on, t_off))
            }
        };
        Potential::new(shape, t_on, t_off)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    Dg,
    Linear,
}

/// Initial state `N (exp(-(x-c)^2/(2 sigma^2)) + pedestal) e^{i k0 x}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub dynamics: Dynamics,
    pub center: f64,
    pub sigma: f64,
    pub k0: f64,
    pub pedestal: f64,
    /// Also integrate the nonlinear equation directly and compare.
    pub direct_crosscheck: bool,
    /// Also report the Hamiltonian conjugation gap of the initial state.
    pub hamiltonian_gap: bool,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            dynamics: Dynamics::Dg,
            center: 0.0,
            sigma: 1.0,
            k0: 0.0,
            pedestal: 0.0,
            direct_crosscheck: false,
            hamiltonian_gap: false,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OverlapConfig {
    /// Point counts for the misaligned-grid convergence table.
    pub convergence_ns: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixtureConfig {
    pub centers: [f64; 2],
    pub sigma: f64,
    pub times: Vec<f64>,
    pub probe_lo: f64,
    pub probe_hi: f64,
    pub probes: usize,
}

impl Default for MixtureConfig {
    fn default() -> Self {
        Self {
            centers: [-1.0, 1.0],
            sigma: 1.0,
            times: vec![0.0, 0.5],
            probe_lo: -3.0,
            probe_hi: 3.0,
            probes: 16,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentumConfig {
    pub set: Interval,
    pub center: f64,
    pub sigma: f64,
    pub k0: f64,
    pub times: Vec<f64>,
    /// Gauge parameter of the companion run used for the conjugation
    /// identity.
    pub identity_d: f64,
}

impl Default for MomentumConfig {
    fn default() -> Self {
        Self {
            set: Interval { a: 0.0, b: f64::INFINITY },
            center: 0.0,
            sigma: 1.0,
            k0: 0.0,
            times: vec![4.0, 8.0, 16.0, 32.0],
            identity_d: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestState {
    /// `Phi_+`: 1 on (-1, 0), e^{pi/(4D)} on (0, 1).
    TwoPlateau,
    Gaussian,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConservationConfig {
    pub state: TestState,
    pub center: f64,
    pub sigma: f64,
    pub k0: f64,
    pub set: Interval,
    pub times: Vec<f64>,
}

impl Default for ConservationConfig {
    fn default() -> Self {
        Self {
            state: TestState::TwoPlateau,
            center: 0.0,
            sigma: 1.0,
            k0: 0.0,
            set: Interval { a: 0.0, b: f64::INFINITY },
            times: vec![0.0, 0.5, 1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogicConfig {
    pub states: usize,
    pub projections: usize,
    pub transport_time: f64,
    pub intertwiner_states: usize,
}

impl Default for LogicConfig {
    fn default() -> Self {
        Self {
            states: 100,
            projections: 20,
            transport_time: 0.5,
            intertwiner_states: 100,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpvmConfig {
    pub base: Base,
    /// Number of random sample states.
    pub states: usize,
    /// Partition edges, increasing; may start at `-inf` and end at `inf`.
    #[serde(with = "edge_list")]
    pub edges: Vec<f64>,
    pub random_pairs: usize,
    pub conservation_set: Interval,
    pub conservation_time: f64,
    pub additivity_sets: [Interval; 2],
    /// Also run the axioms on `N_c ∘ chi_B(p)` with `c = negative_control_d`.
    pub negative_control: bool,
    pub negative_control_d: f64,
}

impl Default for GpvmConfig {
    fn default() -> Self {
        Self {
            base: Base::Momentum,
            states: 8,
            edges: vec![
                f64::NEG_INFINITY,
                -4.0,
                -2.0,
                -1.0,
                -0.5,
                0.0,
                0.25,
                0.5,
                1.0,
                2.0,
                4.0,
                f64::INFINITY,
            ],
            random_pairs: 20,
            conservation_set: Interval { a: 0.0, b: f64::INFINITY },
            conservation_time: 1.0,
            additivity_sets: [Interval { a: -3.0, b: 0.0 }, Interval { a: 0.0, b: 3.0 }],
            negative_control: true,
            negative_control_d: 1.0,
        }
    }
}

/// A list of endpoints in the same encoding as [`Interval`] uses.
mod edge_list {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(transparent)]
    struct Edge(#[serde(with = "dgsim_core::interval::endpoint")] f64);

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&x| Edge(x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<Edge>::deserialize(d)?.into_iter().map(|e| e.0).collect())
    }
}

impl RunConfig {
    pub fn grid(&self) -> dgsim_core::Result<Grid1D> {
        Grid1D::new(self.grid.n, self.grid.x_min, self.grid.x_max)
    }

    /// Checks every parameter that a run may touch.
    pub fn validate(&self) -> Result<(), String> {
        let finite = |name: &str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be finite, got {x}"))
            }
        };
        finite("D", self.d)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(format!("dt must be positive, got {}", self.dt));
        }
        if let Some(t) = self.t_final {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(format!("t_final must be non-negative, got {t}"));
            }
            if t > 0.0 && self.dt > t {
                return Err(format!("dt = {} exceeds t_final = {t}", self.dt));
            }
        }
        self.grid().map_err(|e| e.to_string())?;
        self.potential.build().map_err(|e| e.to_string())?;

        let e = &self.evolve;
        finite("evolve.center", e.center)?;
        finite("evolve.k0", e.k0)?;
        if !(e.sigma > 0.0) {
            return Err(format!("evolve.sigma must be positive, got {}", e.sigma));
        }
        if !(e.pedestal >= 0.0 && e.pedestal.is_finite()) {
            return Err(format!("evolve.pedestal must be non-negative, got {}", e.pedestal));
        }
        for &n in &self.overlap.convergence_ns {
            Grid1D::new(n, -2.0, 2.0).map_err(|e| format!("overlap.convergence_ns: {e}"))?;
        }

        let f = &self.ftl;
        Grid1D::new(f.lab_n, -f.lab_half_width, f.lab_half_width).map_err(|e| format!("ftl lab grid: {e}"))?;
        Grid1D::new(f.moon_n, -f.moon_half_width, f.moon_half_width).map_err(|e| format!("ftl moon grid: {e}"))?;
        if !(f.lab_sigma > 0.0 && f.moon_sigma > 0.0 && f.barrier_width > 0.0) {
            return Err("ftl widths must be positive".into());
        }
        if !(f.pulse_on <= f.pulse_off) {
            return Err(format!("ftl pulse window [{}, {}) is reversed", f.pulse_on, f.pulse_off));
        }
        if !(f.distance_factor > 0.0) {
            return Err("ftl.distance_factor must be positive".into());
        }

        let m = &self.mixture;
        if !(m.sigma > 0.0) || m.probes < 2 || !(m.probe_lo < m.probe_hi) {
            return Err("mixture needs sigma > 0, probes >= 2 and probe_lo < probe_hi".into());
        }
        if m.times.iter().any(|t| !(*t >= 0.0)) {
            return Err("mixture.times must be non-negative".into());
        }

        let p = &self.momentum;
        Interval::new(p.set.a, p.set.b).map_err(|e| format!("momentum.set: {e}"))?;
        if !(p.sigma > 0.0) {
            return Err("momentum.sigma must be positive".into());
        }
        if p.times.is_empty() || p.times[0] <= 0.0 || p.times.windows(2).any(|w| w[0] >= w[1]) {
            return Err("momentum.times must be positive and increasing".into());
        }

        let c = &self.conservation;
        Interval::new(c.set.a, c.set.b).map_err(|e| format!("conservation.set: {e}"))?;
        if !(c.sigma > 0.0) || c.times.iter().any(|t| !t.is_finite()) {
            return Err("conservation needs sigma > 0 and finite times".into());
        }

        let l = &self.logic;
        if l.states == 0 || l.projections == 0 || l.intertwiner_states == 0 {
            return Err("logic counts must be positive".into());
        }
        finite("logic.transport_time", l.transport_time)?;

        let g = &self.gpvm;
        if g.states == 0 {
            return Err("gpvm.states must be positive".into());
        }
        dgsim_core::Partition::from_edges(&g.edges).map_err(|e| format!("gpvm.edges: {e}"))?;
        Interval::new(g.conservation_set.a, g.conservation_set.b).map_err(|e| format!("gpvm.conservation_set: {e}"))?;
        for s in &g.additivity_sets {
            Interval::new(s.a, s.b).map_err(|e| format!("gpvm.additivity_sets: {e}"))?;
        }
        finite("gpvm.conservation_time", g.conservation_time)?;
        if g.negative_control && !(g.negative_control_d.is_finite() && g.negative_control_d != 0.0) {
            return Err("gpvm.negative_control_d must be finite and nonzero".into());
        }
        Ok(())
    }
}

/// Reads, parses and validates a config file.
pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_config_str(&text).map_err(|message| CliError::Config {
        path: path.to_path_buf(),
        message,
    })
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, String> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
    cfg.validate()?;
    Ok(cfg)
}
