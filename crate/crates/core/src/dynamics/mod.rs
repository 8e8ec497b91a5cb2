//! Reduced density-matrix propagation: HEOM, Bloch–Redfield and
//! spectrally bundled Lindblad dissipators (SBD).

mod heom;
mod redfield;
mod sbd;
mod superop;

use serde::{Deserialize, Serialize};

use crate::bath::{BathSpec, Decomposition};
use crate::density::DensityMatrix;
use crate::error::{invalid, Error, Result};
use crate::io::config_hash;
use crate::system::ExcitonSystem;
use crate::trajectory::{Trajectory, TrajectoryMetadata};
use crate::units::{fs_to_internal, rate_per_ps_to_wavenumber};
use crate::C64;

pub use heom::{count_ados, HeomStats};
pub use redfield::{redfield_generator, RedfieldVariant};
pub use sbd::{default_sbd_config, Bundle, MatrixEntry, OperatorSpec, RateSchedule, SbdConfig};

/// Propagation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Redfield,
    Heom,
    Sbd,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Redfield => "redfield",
            Method::Heom => "heom",
            Method::Sbd => "sbd",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "redfield" => Ok(Method::Redfield),
            "heom" => Ok(Method::Heom),
            "sbd" => Ok(Method::Sbd),
            other => invalid(format!("unknown method '{other}' (expected redfield, heom or sbd)")),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_store_every() -> f64 {
    10.0
}

fn default_vibronic_weight() -> usize {
    DEFAULT_VIBRONIC_TIER_WEIGHT
}

/// Default tier cost of one vibronic-mode excitation in the hierarchy.
pub const DEFAULT_VIBRONIC_TIER_WEIGHT: usize = 4;

/// Hierarchy and integrator settings (also used for the step size of the
/// Markovian propagators).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HierarchyConfig {
    /// Maximum hierarchy tier.
    pub depth: usize,
    /// Number of thermal (Bose-function) poles in the correlation expansion.
    pub n_matsubara: usize,
    /// ADOs whose largest entry falls below this are dropped after each step.
    pub truncation_threshold: f64,
    /// Integrator step (fs).
    pub dt: f64,
    /// Storage cadence (fs); rounded to a whole number of steps.
    #[serde(default = "default_store_every")]
    pub store_every_fs: f64,
    /// Tier cost of one quantum in an underdamped-mode term. The hierarchy
    /// keeps index vectors with Σ n_drude + weight·Σ n_mode ≤ depth; weight 1
    /// is the plain triangular truncation.
    #[serde(default = "default_vibronic_weight")]
    pub vibronic_tier_weight: usize,
    #[serde(default)]
    pub decomposition: Decomposition,
}

impl Default for HierarchyConfig {
    fn default() -> Self {
        Self {
            depth: 5,
            n_matsubara: 12,
            truncation_threshold: 1e-8,
            dt: 1.0,
            store_every_fs: default_store_every(),
            vibronic_tier_weight: DEFAULT_VIBRONIC_TIER_WEIGHT,
            decomposition: Decomposition::Pade,
        }
    }
}

impl HierarchyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return invalid("hierarchy depth must be positive");
        }
        if !(self.dt > 0.0 && self.dt <= 2.0) {
            return invalid(format!("dt must lie in (0, 2] fs, got {}", self.dt));
        }
        if !(self.truncation_threshold > 0.0 && self.truncation_threshold <= 1e-6) {
            return invalid(format!("truncation threshold must lie in (0, 1e-6], got {}", self.truncation_threshold));
        }
        if !(self.store_every_fs > 0.0 && self.store_every_fs.is_finite()) {
            return invalid("store_every_fs must be positive");
        }
        if self.vibronic_tier_weight == 0 {
            return invalid("vibronic_tier_weight must be >= 1");
        }
        Ok(())
    }

    /// Number of integrator steps between stored frames.
    pub fn store_stride(&self) -> usize {
        ((self.store_every_fs / self.dt).round() as usize).max(1)
    }
}

/// Incoherent renewal of the excitation: at rate κ the system state is
/// replaced by `rho_pump` (bath re-equilibrated), which keeps the trace at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousPumping {
    pub rho_pump: DensityMatrix,
    /// κ in ps⁻¹.
    pub rate_per_ps: f64,
}

/// Optional knobs beyond the core propagate signature.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PropagateOptions {
    #[serde(default)]
    pub pumping: Option<ContinuousPumping>,
    #[serde(default)]
    pub redfield_variant: RedfieldVariant,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Label describing how the initial state was prepared.
    #[serde(default)]
    pub initial_condition: Option<String>,
    /// Fault injection for harness self-tests: the state is scaled by
    /// (1 − leak) after every step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_leak: Option<f64>,
}

/// Maximum tolerated trace drift before a run is declared divergent.
pub const DIVERGENCE_TRACE_DRIFT: f64 = 1e-6;

/// Propagates `rho0` to `t_max_fs` and returns the stored frames.
pub fn propagate(
    system: &ExcitonSystem,
    bath: &BathSpec,
    rho0: &DensityMatrix,
    t_max_fs: f64,
    cfg: &HierarchyConfig,
    method: Method,
    sbd: Option<&SbdConfig>,
) -> Result<Trajectory> {
    propagate_with(system, bath, rho0, t_max_fs, cfg, method, sbd, &PropagateOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn propagate_with(
    system: &ExcitonSystem,
    bath: &BathSpec,
    rho0: &DensityMatrix,
    t_max_fs: f64,
    cfg: &HierarchyConfig,
    method: Method,
    sbd: Option<&SbdConfig>,
    opts: &PropagateOptions,
) -> Result<Trajectory> {
    cfg.validate()?;
    if rho0.dim() != system.n_sites() {
        return invalid(format!("initial state dimension {} does not match {} sites", rho0.dim(), system.n_sites()));
    }
    rho0.validate().map_err(|e| Error::InvalidInput(format!("initial state: {e}")))?;
    if !(t_max_fs >= 0.0 && t_max_fs.is_finite()) {
        return invalid("t_max must be finite and >= 0");
    }
    match (method, sbd) {
        (Method::Sbd, None) => return invalid("method sbd requires an SBD configuration"),
        (Method::Sbd, Some(c)) => c.validate(system.n_sites())?,
        (_, Some(_)) => return invalid("an SBD configuration is only accepted with method sbd"),
        _ => {}
    }
    if let Some(p) = &opts.pumping {
        if p.rho_pump.dim() != system.n_sites() || !(p.rate_per_ps >= 0.0) {
            return invalid("continuous pumping needs a matching state and a non-negative rate");
        }
    }

    let n_steps = (t_max_fs / cfg.dt).round() as usize;
    let mut run = Run::new(system, bath, rho0, cfg, method, sbd, opts)?;
    let stride = cfg.store_stride();
    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    for step in 1..=n_steps {
        let t0 = (step - 1) as f64 * cfg.dt;
        run.step(t0, cfg.dt);
        if let Some(leak) = opts.trace_leak {
            run.scale(1.0 - leak);
        }
        let tr = run.trace();
        let drift = (tr - 1.0).norm();
        if !(drift <= DIVERGENCE_TRACE_DRIFT) {
            return Err(Error::Divergence { step, time_fs: step as f64 * cfg.dt, drift });
        }
        if step % stride == 0 || step == n_steps {
            times.push(step as f64 * cfg.dt);
            states.push(DensityMatrix::from_matrix_unchecked(run.rho())?);
        }
    }

    let mut notes = Vec::new();
    if let Some(p) = &opts.pumping {
        notes.push(format!("continuous pumping: renewal rate {} ps^-1", p.rate_per_ps));
    }
    let heom_stats = run.heom_stats();
    let hash = config_hash(&(system, bath, rho0, t_max_fs, cfg, method, sbd, opts))?;
    let metadata = TrajectoryMetadata {
        method,
        seed: opts.seed,
        config_hash: hash,
        hierarchy: cfg.clone(),
        temperature_k: bath.temperature(),
        initial_condition: opts.initial_condition.clone().unwrap_or_else(|| "user".into()),
        pumping_mode: if opts.pumping.is_some() { "continuous".into() } else { "initial_state".into() },
        redfield_variant: (method == Method::Redfield).then_some(opts.redfield_variant),
        heom: heom_stats,
        notes,
    };
    Trajectory::new(times, states, metadata)
}

enum Run {
    Heom(heom::HeomRun),
    Liouville(superop::LiouvilleRun),
}

impl Run {
    fn new(
        system: &ExcitonSystem,
        bath: &BathSpec,
        rho0: &DensityMatrix,
        cfg: &HierarchyConfig,
        method: Method,
        sbd: Option<&SbdConfig>,
        opts: &PropagateOptions,
    ) -> Result<Self> {
        let pumping = opts
            .pumping
            .as_ref()
            .map(|p| (p.rho_pump.matrix().clone(), rate_per_ps_to_wavenumber(p.rate_per_ps)));
        Ok(match method {
            Method::Heom => Run::Heom(heom::HeomRun::new(system, bath, rho0, cfg, pumping)?),
            Method::Redfield => {
                let l = redfield::redfield_generator(system, bath, cfg.n_matsubara, cfg.decomposition, opts.redfield_variant);
                Run::Liouville(superop::LiouvilleRun::constant(l, rho0, pumping, fs_to_internal(cfg.dt)))
            }
            Method::Sbd => {
                let cfg_sbd = sbd.expect("checked above");
                Run::Liouville(sbd::sbd_run(system, cfg_sbd, rho0, pumping, fs_to_internal(cfg.dt))?)
            }
        })
    }

    fn step(&mut self, t0_fs: f64, dt_fs: f64) {
        match self {
            Run::Heom(r) => r.step(fs_to_internal(dt_fs)),
            Run::Liouville(r) => r.step(t0_fs),
        }
    }

    fn scale(&mut self, f: f64) {
        match self {
            Run::Heom(r) => r.scale(f),
            Run::Liouville(r) => r.scale(f),
        }
    }

    fn trace(&self) -> C64 {
        self.rho().trace()
    }

    fn rho(&self) -> crate::CMatrix {
        match self {
            Run::Heom(r) => r.rho(),
            Run::Liouville(r) => r.rho(),
        }
    }

    fn heom_stats(&self) -> Option<HeomStats> {
        match self {
            Run::Heom(r) => Some(r.stats()),
            Run::Liouville(_) => None,
        }
    }
}

/// Classic fixed-step RK4 on a flat complex state.
pub(crate) struct Rk4 {
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl Rk4 {
    pub(crate) fn new(n: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }

    /// y ← y + dt·(k1 + 2k2 + 2k3 + k4)/6 for the autonomous rhs `f`.
    pub(crate) fn step<F: FnMut(&[C64], &mut [C64])>(&mut self, y: &mut [C64], dt: f64, mut f: F) {
        f(y, &mut self.k1);
        for ((t, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
            *t = y + k * (0.5 * dt);
        }
        f(&self.tmp, &mut self.k2);
        for ((t, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
            *t = y + k * (0.5 * dt);
        }
        f(&self.tmp, &mut self.k3);
        for ((t, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
            *t = y + k * dt;
        }
        f(&self.tmp, &mut self.k4);
        let w = dt / 6.0;
        for i in 0..y.len() {
            y[i] += (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]) * w;
        }
    }
}
