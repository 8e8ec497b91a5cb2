//! Twelve-test numerical validation harness: convergence, physical
//! consistency and robustness checks with configurable thresholds.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bath::BathSpec;
use crate::density::{thermal_state, DensityMatrix};
use crate::dynamics::{propagate_with, HierarchyConfig, Method, PropagateOptions};
use crate::error::{invalid, Error, Result};
use crate::illumination::{exciton_mixture, pumping_rates, PumpingModel, SolarSpectrum, TransmissionProfile};
use crate::metrics::{etr, EtrConfig};
use crate::optimizer::{EtrResponse, EvalContext};
use crate::system::{apply_static_disorder, build_fmo_system, ExcitonSystem};
use crate::trajectory::Trajectory;
use crate::{C64, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Convergence,
    Physical,
    Robustness,
}

/// Pass criteria. Population comparisons are maximum absolute differences
/// of site populations over the stored frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub heom_benchmark: f64,
    pub matsubara: f64,
    pub time_step: f64,
    pub truncation: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
    /// Relative energy drift (fraction).
    pub energy_drift: f64,
    pub boltzmann: f64,
    /// Relative change of η_quantum under ±ΔT.
    pub temperature: f64,
    /// Lower bound the bootstrap CI of the mean η_quantum must exceed.
    pub disorder_ci_floor: f64,
    pub peak_shift_nm: f64,
    pub markov_limit: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            heom_benchmark: 0.02,
            matsubara: 0.005,
            time_step: 0.001,
            truncation: 0.01,
            trace: 1e-12,
            min_eigenvalue: -1e-10,
            energy_drift: 0.001,
            boltzmann: 0.02,
            temperature: 0.16,
            disorder_ci_floor: 0.0,
            peak_shift_nm: 5.0,
            markov_limit: 0.02,
        }
    }
}

/// Run sizes, seeds and thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidationConfig {
    pub thresholds: Thresholds,
    pub seed: u64,
    /// Hierarchy settings of the FMO reference runs.
    pub hierarchy: HierarchyConfig,
    /// Horizon of the FMO convergence runs (tests 2–6).
    pub convergence_fs: f64,
    /// Three-site benchmark: nearest-neighbour coupling, horizon, reference
    /// hierarchy depth and the method tested against it.
    pub benchmark_coupling: f64,
    pub benchmark_fs: f64,
    pub benchmark_depth: usize,
    pub benchmark_method: Method,
    pub energy_fs: f64,
    pub energy_dt: f64,
    pub boltzmann_fs: f64,
    pub boltzmann_dt: f64,
    pub temperature_delta_k: f64,
    pub etr_t_max_fs: f64,
    pub disorder_sigma: f64,
    pub ensemble_size: usize,
    pub bootstrap_resamples: usize,
    pub bath_variation: f64,
    /// Filter-centre scan (nm) and band FWHM for the bath-variation test.
    pub scan_nm: (f64, f64, f64),
    pub scan_fwhm_nm: f64,
    pub markov_temperature: f64,
    pub markov_fs: f64,
    /// Fault injection for the negative control (see PropagateOptions).
    #[serde(default)]
    pub trace_leak: Option<f64>,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            thresholds: Thresholds::default(),
            seed: 2024,
            hierarchy: HierarchyConfig::default(),
            convergence_fs: 500.0,
            benchmark_coupling: -50.0,
            benchmark_fs: 1000.0,
            benchmark_depth: 8,
            benchmark_method: Method::Redfield,
            energy_fs: 100_000.0,
            energy_dt: 1.0,
            boltzmann_fs: 4500.0,
            boltzmann_dt: 2.0,
            temperature_delta_k: 10.0,
            etr_t_max_fs: 500.0,
            disorder_sigma: 50.0,
            ensemble_size: 20,
            bootstrap_resamples: 2000,
            bath_variation: 0.2,
            scan_nm: (700.0, 900.0, 0.5),
            scan_fwhm_nm: 50.0,
            markov_temperature: 500.0,
            markov_fs: 500.0,
            trace_leak: None,
        }
    }
}

impl ValidationConfig {
    /// Small sizes for smoke runs; thresholds unchanged.
    pub fn quick() -> Self {
        Self {
            convergence_fs: 60.0,
            benchmark_fs: 200.0,
            benchmark_depth: 5,
            energy_fs: 2000.0,
            boltzmann_fs: 200.0,
            etr_t_max_fs: 60.0,
            ensemble_size: 3,
            bootstrap_resamples: 200,
            scan_nm: (780.0, 830.0, 1.0),
            markov_fs: 60.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.hierarchy.validate()?;
        for (name, v) in [
            ("convergence_fs", self.convergence_fs),
            ("benchmark_fs", self.benchmark_fs),
            ("energy_fs", self.energy_fs),
            ("boltzmann_fs", self.boltzmann_fs),
            ("etr_t_max_fs", self.etr_t_max_fs),
            ("markov_fs", self.markov_fs),
            ("scan_fwhm_nm", self.scan_fwhm_nm),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("{name} must be positive"));
            }
        }
        if self.ensemble_size < 2 || self.bootstrap_resamples == 0 {
            return invalid("ensemble_size must be >= 2 and bootstrap_resamples >= 1");
        }
        let (lo, hi, step) = self.scan_nm;
        if !(lo < hi && step > 0.0) {
            return invalid("scan range must satisfy lo < hi with a positive step");
        }
        if !(0.0..1.0).contains(&self.bath_variation) {
            return invalid("bath_variation must lie in [0, 1)");
        }
        Ok(())
    }
}

/// Outcome of one test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub id: usize,
    pub name: String,
    pub category: Category,
    pub measured: f64,
    pub threshold: f64,
    /// How `measured` is compared with `threshold`.
    pub criterion: String,
    pub pass: bool,
    pub runtime_s: f64,
    #[serde(default)]
    pub details: BTreeMap<String, f64>,
    #[serde(default)]
    pub diagnostics: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tests: Vec<TestResult>,
    pub passed: usize,
    pub total: usize,
    pub all_pass: bool,
    pub wall_time_s: f64,
}

impl ValidationReport {
    /// 0 when every test passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass {
            0
        } else {
            1
        }
    }

    pub fn to_table(&self) -> String {
        let mut s = format!("{:<3} {:<12} {:<28} {:>14} {:>4} {:>12} {:>6} {:>8}\n", "#", "category", "test", "measured", "", "threshold", "pass", "time_s");
        for t in &self.tests {
            let cat = match t.category {
                Category::Convergence => "convergence",
                Category::Physical => "physical",
                Category::Robustness => "robustness",
            };
            s.push_str(&format!(
                "{:<3} {:<12} {:<28} {:>14.6e} {:>4} {:>12.3e} {:>6} {:>8.1}\n",
                t.id,
                cat,
                t.name,
                t.measured,
                t.criterion,
                t.threshold,
                if t.pass { "PASS" } else { "FAIL" },
                t.runtime_s
            ));
            if !t.diagnostics.is_empty() {
                s.push_str(&format!("    {}\n", t.diagnostics));
            }
        }
        s.push_str(&format!("overall: {}/{} passed in {:.1} s\n", self.passed, self.total, self.wall_time_s));
        s
    }
}

/// Test names in report order.
pub const TEST_NAMES: [(&str, Category); 12] = [
    ("heom benchmark", Category::Convergence),
    ("matsubara cutoff", Category::Convergence),
    ("time step", Category::Convergence),
    ("hierarchy truncation", Category::Convergence),
    ("trace preservation", Category::Physical),
    ("positivity", Category::Physical),
    ("energy conservation", Category::Physical),
    ("detailed balance", Category::Physical),
    ("temperature sensitivity", Category::Robustness),
    ("static disorder", Category::Robustness),
    ("bath parameters", Category::Robustness),
    ("markovian limit", Category::Robustness),
];

/// Maximum absolute site-population difference over frames stored at the
/// same times.
pub fn max_population_deviation(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    let n = a.len().min(b.len());
    let mut m: f64 = 0.0;
    for k in 0..n {
        if (a.times()[k] - b.times()[k]).abs() > 1e-9 {
            return invalid("trajectories are stored on different time grids");
        }
        let (pa, pb) = (a.states()[k].populations(), b.states()[k].populations());
        for (x, y) in pa.iter().zip(&pb) {
            m = m.max((x - y).abs());
        }
    }
    Ok(m)
}

struct Outcome {
    measured: f64,
    details: BTreeMap<String, f64>,
    diagnostics: String,
}

impl Outcome {
    fn new(measured: f64) -> Self {
        Self { measured, details: BTreeMap::new(), diagnostics: String::new() }
    }

    fn detail(mut self, k: &str, v: f64) -> Self {
        self.details.insert(k.into(), v);
        self
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.diagnostics = s.into();
        self
    }
}

/// Shared state of one suite run.
struct Suite<'a> {
    cfg: &'a ValidationConfig,
    fmo: ExcitonSystem,
    bath: BathSpec,
    baseline: Option<Trajectory>,
}

impl<'a> Suite<'a> {
    fn opts(&self) -> PropagateOptions {
        PropagateOptions { trace_leak: self.cfg.trace_leak, ..Default::default() }
    }

    fn run(&self, system: &ExcitonSystem, bath: &BathSpec, rho0: &DensityMatrix, t: f64, h: &HierarchyConfig, m: Method) -> Result<Trajectory> {
        propagate_with(system, bath, rho0, t, h, m, None, &self.opts())
    }

    fn site1(&self) -> DensityMatrix {
        DensityMatrix::pure_site(self.fmo.n_sites(), 0).expect("FMO has site 1")
    }

    fn baseline(&mut self) -> Result<Trajectory> {
        if self.baseline.is_none() {
            let t = self.run(&self.fmo, &self.bath, &self.site1(), self.cfg.convergence_fs, &self.cfg.hierarchy, Method::Heom)?;
            self.baseline = Some(t);
        }
        Ok(self.baseline.clone().expect("set above"))
    }

    fn fmo_variant(&self, h: &HierarchyConfig) -> Result<Trajectory> {
        self.run(&self.fmo, &self.bath, &self.site1(), self.cfg.convergence_fs, h, Method::Heom)
    }

    /// η_quantum = ETR_HEOM/ETR_Redfield − 1 under AM1.5G pumping.
    fn quantum_advantage(&self, system: &ExcitonSystem, bath: &BathSpec) -> Result<(f64, f64, f64)> {
        let pm = PumpingModel::for_system(system, crate::illumination::DEFAULT_LINE_WIDTH_NM)?;
        let rates = pumping_rates(&SolarSpectrum::am15g(), system, &pm)?;
        let rho0 = exciton_mixture(system, &rates)?;
        let ec = EtrConfig::new(crate::metrics::DEFAULT_K_RC_PER_PS, self.cfg.etr_t_max_fs, system.trap_site())?;
        let h = etr(&self.run(system, bath, &rho0, self.cfg.etr_t_max_fs, &self.cfg.hierarchy, Method::Heom)?, &ec)?.normalized;
        let r = etr(&self.run(system, bath, &rho0, self.cfg.etr_t_max_fs, &self.cfg.hierarchy, Method::Redfield)?, &ec)?.normalized;
        Ok((h / r - 1.0, h, r))
    }

    fn test(&mut self, id: usize) -> Result<Outcome> {
        let cfg = self.cfg;
        match id {
            1 => {
                let j = cfg.benchmark_coupling;
                let sys = ExcitonSystem::new(
                    vec![12000.0, 12100.0, 12200.0],
                    vec![vec![0.0, j, 0.0], vec![j, 0.0, j], vec![0.0, j, 0.0]],
                    0,
                )?;
                let bath = BathSpec::drude_only(35.0, crate::bath::FMO_DRUDE_GAMMA, 295.0)?;
                let rho0 = DensityMatrix::pure_site(3, 2)?;
                let mut h = cfg.hierarchy.clone();
                h.depth = cfg.benchmark_depth;
                let reference = self.run(&sys, &bath, &rho0, cfg.benchmark_fs, &h, Method::Heom)?;
                let fast = if cfg.benchmark_method == Method::Sbd {
                    let sbd = crate::dynamics::default_sbd_config(&sys, &bath);
                    propagate_with(&sys, &bath, &rho0, cfg.benchmark_fs, &cfg.hierarchy, Method::Sbd, Some(&sbd), &self.opts())?
                } else {
                    self.run(&sys, &bath, &rho0, cfg.benchmark_fs, &cfg.hierarchy, cfg.benchmark_method)?
                };
                let d = max_population_deviation(&reference, &fast)?;
                let fin = max_population_deviation(
                    &Trajectory::new(vec![0.0], vec![reference.final_state().clone()], reference.metadata().clone())?,
                    &Trajectory::new(vec![0.0], vec![fast.final_state().clone()], fast.metadata().clone())?,
                )?;
                Ok(Outcome::new(d)
                    .detail("final_deviation", fin)
                    .note(format!("{} vs HEOM (depth {})", cfg.benchmark_method, cfg.benchmark_depth)))
            }
            2 => {
                let base = self.baseline()?;
                let mut h = cfg.hierarchy.clone();
                h.n_matsubara = 10;
                let other = self.fmo_variant(&h)?;
                Ok(Outcome::new(max_population_deviation(&base, &other)?).note(format!("N_Mat 10 vs {}", cfg.hierarchy.n_matsubara)))
            }
            3 => {
                let base = self.baseline()?;
                let mut h = cfg.hierarchy.clone();
                h.dt = cfg.hierarchy.dt / 2.0;
                let other = self.fmo_variant(&h)?;
                Ok(Outcome::new(max_population_deviation(&base, &other)?).note(format!("dt {} vs {} fs", h.dt, cfg.hierarchy.dt)))
            }
            4 => {
                let mut a = cfg.hierarchy.clone();
                a.truncation_threshold = 1e-7;
                let mut b = cfg.hierarchy.clone();
                b.truncation_threshold = 1e-9;
                let (ta, tb) = (self.fmo_variant(&a)?, self.fmo_variant(&b)?);
                Ok(Outcome::new(max_population_deviation(&ta, &tb)?).note("truncation 1e-7 vs 1e-9"))
            }
            5 => {
                let r = self.baseline()?.invariant_report();
                Ok(Outcome::new(r.max_trace_error).detail("hermiticity_error", r.max_hermiticity_error))
            }
            6 => Ok(Outcome::new(self.baseline()?.invariant_report().min_eigenvalue)),
            7 => {
                let bath = BathSpec::drude_only(0.0, crate::bath::FMO_DRUDE_GAMMA, self.bath.temperature())?;
                let mut h = cfg.hierarchy.clone();
                h.dt = cfg.energy_dt;
                h.store_every_fs = (cfg.energy_fs / 200.0).max(h.dt);
                let t = self.run(&self.fmo, &bath, &self.site1(), cfg.energy_fs, &h, Method::Heom)?;
                let hs = self.fmo.hamiltonian_complex();
                let e: Vec<f64> = t.states().iter().map(|s| energy(&hs, s.matrix())).collect();
                let drift = e.iter().map(|x| (x - e[0]).abs()).fold(0.0, f64::max);
                Ok(Outcome::new(drift / e[0].abs()).detail("absolute_drift_cm", drift).note(format!("lambda = 0 over {} fs", cfg.energy_fs)))
            }
            8 => {
                let mut h = cfg.hierarchy.clone();
                h.dt = cfg.boltzmann_dt;
                h.store_every_fs = 100.0;
                let t = self.run(&self.fmo, &self.bath, &self.site1(), cfg.boltzmann_fs, &h, Method::Heom)?;
                let th = thermal_state(&self.fmo, self.bath.temperature())?.populations();
                let p = t.final_state().populations();
                let d = p.iter().zip(&th).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                let rel = p.iter().zip(&th).map(|(a, b)| (a / b - 1.0).abs()).fold(0.0, f64::max);
                Ok(Outcome::new(d).detail("max_relative_deviation", rel).note(format!("HEOM populations at {} fs vs exp(-H/kT)/Z", cfg.boltzmann_fs)))
            }
            9 => {
                let t0 = self.bath.temperature();
                let (eta0, _, _) = self.quantum_advantage(&self.fmo, &self.bath)?;
                let mut worst: f64 = 0.0;
                let mut out = Outcome::new(0.0).detail("eta_reference", eta0);
                for dt in [-cfg.temperature_delta_k, cfg.temperature_delta_k] {
                    let (eta, _, _) = self.quantum_advantage(&self.fmo, &self.bath.with_temperature(t0 + dt)?)?;
                    worst = worst.max((eta - eta0).abs() / eta0.abs());
                    out = out.detail(&format!("eta_{}K", t0 + dt), eta);
                }
                out.measured = worst;
                Ok(out)
            }
            10 => {
                let (eta_clean, _, _) = self.quantum_advantage(&self.fmo, &self.bath)?;
                let mut etas = Vec::with_capacity(cfg.ensemble_size);
                for k in 0..cfg.ensemble_size {
                    let sys = apply_static_disorder(&self.fmo, cfg.disorder_sigma, cfg.seed.wrapping_add(k as u64))?;
                    etas.push(self.quantum_advantage(&sys, &self.bath)?.0);
                }
                let (mean, lo, hi) = bootstrap_mean_ci(&etas, cfg.bootstrap_resamples, cfg.seed)?;
                Ok(Outcome::new(lo)
                    .detail("mean_eta", mean)
                    .detail("ci_low", lo)
                    .detail("ci_high", hi)
                    .detail("eta_disorder_free", eta_clean)
                    .detail("ensemble_size", etas.len() as f64)
                    .note(format!("95% bootstrap CI of mean eta: [{lo:.4}, {hi:.4}]")))
            }
            11 => {
                let mut peaks = Vec::new();
                for f in [1.0, 1.0 - cfg.bath_variation, 1.0 + cfg.bath_variation] {
                    peaks.push(etr_peak_center(&self.fmo, &self.bath.scaled(f)?, cfg)?);
                }
                let shift = peaks[1..].iter().map(|p| (p - peaks[0]).abs()).fold(0.0, f64::max);
                Ok(Outcome::new(shift)
                    .detail("peak_nominal_nm", peaks[0])
                    .detail("peak_minus_nm", peaks[1])
                    .detail("peak_plus_nm", peaks[2]))
            }
            12 => {
                let bath = self.bath.with_temperature(cfg.markov_temperature)?;
                let h = self.run(&self.fmo, &bath, &self.site1(), cfg.markov_fs, &cfg.hierarchy, Method::Heom)?;
                let r = self.run(&self.fmo, &bath, &self.site1(), cfg.markov_fs, &cfg.hierarchy, Method::Redfield)?;
                Ok(Outcome::new(max_population_deviation(&h, &r)?).note(format!("HEOM vs Redfield at {} K", cfg.markov_temperature)))
            }
            _ => invalid(format!("no test {id}")),
        }
    }
}

fn energy(h: &CMatrix, rho: &CMatrix) -> f64 {
    let mut e = C64::new(0.0, 0.0);
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            e += h[(i, j)] * rho[(j, i)];
        }
    }
    e.re
}

/// Filter centre maximizing the Redfield ETR of a single band.
fn etr_peak_center(system: &ExcitonSystem, bath: &BathSpec, cfg: &ValidationConfig) -> Result<f64> {
    let mut ctx = EvalContext::fmo_default();
    ctx.system = system.clone();
    ctx.bath = bath.clone();
    ctx.hierarchy = cfg.hierarchy.clone();
    ctx.pumping = PumpingModel::for_system(system, crate::illumination::DEFAULT_LINE_WIDTH_NM)?;
    ctx.etr.t_max_fs = cfg.etr_t_max_fs;
    ctx.etr.trap_site = system.trap_site();
    let resp = EtrResponse::compute(&ctx)?;
    let (lo, hi, step) = cfg.scan_nm;
    let mut best = (f64::NEG_INFINITY, lo);
    let n = ((hi - lo) / step).round() as usize;
    for k in 0..=n {
        let c = lo + k as f64 * step;
        let design = TransmissionProfile::single(1.0, c, cfg.scan_fwhm_nm)?;
        let plant = crate::illumination::filtered_spectrum(&design, &ctx.solar);
        let v = resp.etr_for_rates(&pumping_rates(&plant, system, &ctx.pumping)?).0;
        if v > best.0 {
            best = (v, c);
        }
    }
    Ok(best.1)
}

/// Mean and percentile 95% bootstrap interval of the mean.
pub fn bootstrap_mean_ci(x: &[f64], resamples: usize, seed: u64) -> Result<(f64, f64, f64)> {
    if x.is_empty() || resamples == 0 {
        return invalid("bootstrap needs samples and at least one resample");
    }
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| x[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let q = |p: f64| means[((p * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
    Ok((mean, q(0.025), q(0.975)))
}

fn passes(id: usize, v: f64, t: &Thresholds) -> (bool, f64, &'static str) {
    match id {
        1 => (v < t.heom_benchmark, t.heom_benchmark, "<"),
        2 => (v < t.matsubara, t.matsubara, "<"),
        3 => (v < t.time_step, t.time_step, "<"),
        4 => (v < t.truncation, t.truncation, "<"),
        5 => (v <= t.trace, t.trace, "<="),
        6 => (v >= t.min_eigenvalue, t.min_eigenvalue, ">="),
        7 => (v < t.energy_drift, t.energy_drift, "<"),
        8 => (v < t.boltzmann, t.boltzmann, "<"),
        9 => (v <= t.temperature, t.temperature, "<="),
        10 => (v > t.disorder_ci_floor, t.disorder_ci_floor, ">"),
        11 => (v < t.peak_shift_nm, t.peak_shift_nm, "<"),
        _ => (v < t.markov_limit, t.markov_limit, "<"),
    }
}

/// Runs the selected tests (all twelve when `only` is empty). A failing or
/// panicking test is reported as a failure; the suite keeps going.
pub fn run_suite_subset(cfg: &ValidationConfig, only: &[usize]) -> Result<ValidationReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mut suite = Suite { cfg, fmo: build_fmo_system(), bath: BathSpec::fmo_default(), baseline: None };
    let mut tests = Vec::new();
    for (k, (name, category)) in TEST_NAMES.iter().enumerate() {
        let id = k + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(|| suite.test(id)))
            .unwrap_or_else(|p| Err(Error::InvalidInput(format!("test panicked: {}", panic_message(&p)))));
        let (_, threshold, criterion) = passes(id, 0.0, &cfg.thresholds);
        let result = match r {
            Ok(o) => {
                let (pass, _, _) = passes(id, o.measured, &cfg.thresholds);
                TestResult {
                    id,
                    name: name.to_string(),
                    category: *category,
                    measured: o.measured,
                    threshold,
                    criterion: criterion.into(),
                    pass: pass && o.measured.is_finite(),
                    runtime_s: 0.0,
                    details: o.details,
                    diagnostics: o.diagnostics,
                }
            }
            Err(e) => TestResult {
                id,
                name: name.to_string(),
                category: *category,
                measured: f64::NAN,
                threshold,
                criterion: criterion.into(),
                pass: false,
                runtime_s: 0.0,
                details: BTreeMap::new(),
                diagnostics: format!("error: {e}"),
            },
        };
        tests.push(TestResult { runtime_s: t0.elapsed().as_secs_f64(), ..result });
    }
    let passed = tests.iter().filter(|t| t.pass).count();
    let total = tests.len();
    Ok(ValidationReport { passed, total, all_pass: passed == total, tests, wall_time_s: start.elapsed().as_secs_f64() })
}

pub fn run_suite(cfg: &ValidationConfig) -> Result<ValidationReport> {
    run_suite_subset(cfg, &[])
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bootstrap_of_constant_is_degenerate() {
        let (m, lo, hi) = bootstrap_mean_ci(&[0.3; 5], 50, 1).unwrap();
        assert_eq!((m, lo, hi), (0.3, 0.3, 0.3));
    }

    #[test]
    fn leak_breaks_trace_test() {
        let cfg = ValidationConfig { trace_leak: Some(1e-9), ..ValidationConfig::quick() };
        let r = run_suite_subset(&cfg, &[5]).unwrap();
        assert!(!r.all_pass);
        assert_eq!(r.exit_code(), 1);
    }
}
