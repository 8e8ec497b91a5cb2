//! Coherence, delocalization, entropy, QFI, concurrence and transport
//! metrics on density matrices and trajectories.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::density::{hermitian_eigen, DensityMatrix};
use crate::error::{invalid, Error, Result};
use crate::io::header_comment;
use crate::trajectory::Trajectory;
use crate::{CMatrix, C64};

/// Eigenvalue pairs with λ_k + λ_l below this are skipped in the QFI sum.
pub const QFI_EPS: f64 = 1e-12;

/// A scalar metric sampled along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl MetricSeries {
    pub fn new(name: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return invalid("metric series needs equal numbers of times and values");
        }
        Ok(Self { name: name.into(), parameters: BTreeMap::new(), times, values })
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    /// `time_fs,value` with a provenance header.
    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut out = header_comment(config_hash);
        out.push_str(&format!(" metric={}", self.name));
        for (k, v) in &self.parameters {
            out.push_str(&format!(" {k}={v}"));
        }
        out.push_str("\ntime_fs,value\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            out.push_str(&format!("{t},{v:.12e}\n"));
        }
        out
    }

    /// (index, value) of the maximum.
    pub fn argmax(&self) -> Option<(usize, f64)> {
        self.values.iter().copied().enumerate().max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Σ_{i≠j} |ρ_ij|.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let d = m.nrows();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += m[(i, j)].norm();
            }
        }
    }
    s
}

/// Exponential fit |x(t)| ≈ A e^{−t/τ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// τ in fs; `f64::INFINITY` when the magnitude does not decay.
    pub tau_fs: f64,
    /// Root-mean-square residual of the log-linear fit.
    pub residual: f64,
    pub n_points: usize,
}

/// Least-squares fit of ln|x| against t over the leading window where
/// |x| > 0.05·|x(t₀)|.
pub fn fit_exponential_decay(times: &[f64], magnitudes: &[f64]) -> Result<DecayFit> {
    if times.len() != magnitudes.len() || times.is_empty() {
        return invalid("decay fit needs equal, non-empty series");
    }
    let x0 = magnitudes[0];
    if !(x0 > 1e-6) {
        return invalid(format!("initial magnitude {x0:e} is too small to fit a decay"));
    }
    let cut = 0.05 * x0;
    let n = magnitudes.iter().take_while(|&&m| m > cut).count();
    if n < 5 {
        return invalid(format!("only {n} points above 5% of the initial magnitude; need at least 5"));
    }
    let t = &times[..n];
    let y: Vec<f64> = magnitudes[..n].iter().map(|m| m.ln()).collect();
    let tm = t.iter().sum::<f64>() / n as f64;
    let ym = y.iter().sum::<f64>() / n as f64;
    let sxy: f64 = t.iter().zip(&y).map(|(a, b)| (a - tm) * (b - ym)).sum();
    let sxx: f64 = t.iter().map(|a| (a - tm) * (a - tm)).sum();
    if sxx == 0.0 {
        return invalid("decay fit needs distinct times");
    }
    let slope = sxy / sxx;
    let icpt = ym - slope * tm;
    let residual = (t.iter().zip(&y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum::<f64>() / n as f64).sqrt();
    let tau_fs = if slope < -1e-14 { -1.0 / slope } else { f64::INFINITY };
    Ok(DecayFit { tau_fs, residual, n_points: n })
}

/// Decay time of |ρ_ij(t)|.
pub fn coherence_lifetime(traj: &Trajectory, pair: (usize, usize)) -> Result<DecayFit> {
    let (i, j) = pair;
    if i >= traj.dim() || j >= traj.dim() || i == j {
        return invalid(format!("invalid site pair ({i}, {j})"));
    }
    let mags: Vec<f64> = traj.element_series(i, j).iter().map(|z| z.norm()).collect();
    fit_exponential_decay(traj.times(), &mags)
}

/// 1/Σ p_n² for a probability vector.
pub fn ipr(populations: &[f64]) -> Result<f64> {
    if populations.is_empty() || populations.iter().any(|p| !(*p >= -1e-12)) {
        return invalid("populations must be non-negative");
    }
    let s: f64 = populations.iter().sum();
    if (s - 1.0).abs() > 1e-8 {
        return invalid(format!("populations must sum to 1, got {s}"));
    }
    Ok(1.0 / populations.iter().map(|p| p * p).sum::<f64>())
}

/// Purity, von Neumann entropy and linear entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurityEntropies {
    pub purity: f64,
    pub von_neumann: f64,
    pub linear_entropy: f64,
}

pub fn purity_entropies(rho: &DensityMatrix) -> PurityEntropies {
    let d = rho.dim();
    let ev = rho.eigenvalues();
    let purity: f64 = {
        let m = rho.matrix();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += (m[(i, j)] * m[(j, i)]).re;
            }
        }
        s
    };
    let von_neumann = ev.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum::<f64>().max(0.0);
    let linear_entropy = if d > 1 { d as f64 / (d as f64 - 1.0) * (1.0 - purity) } else { 0.0 };
    PurityEntropies { purity, von_neumann, linear_entropy }
}

fn hermitian_error(m: &CMatrix) -> f64 {
    let mut e: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            e = e.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    e
}

/// F_Q = 2 Σ_{λ_k+λ_l>ε} (λ_k − λ_l)²/(λ_k + λ_l) |⟨k|O|l⟩|².
pub fn qfi(rho: &DensityMatrix, generator: &CMatrix) -> Result<f64> {
    let d = rho.dim();
    if generator.nrows() != d || generator.ncols() != d {
        return invalid("generator dimension does not match the state");
    }
    let scale = generator.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    if hermitian_error(generator) > 1e-10 * scale {
        return invalid("QFI generator must be Hermitian");
    }
    let (lam, v) = hermitian_eigen(rho.matrix());
    let o = v.adjoint() * generator * &v;
    let mut f = 0.0;
    for k in 0..d {
        for l in 0..d {
            let s = lam[k] + lam[l];
            if s > QFI_EPS {
                let diff = lam[k] - lam[l];
                f += diff * diff / s * o[(k, l)].norm_sqr();
            }
        }
    }
    Ok(2.0 * f)
}

/// Wootters concurrence of a two-qubit density matrix (basis |00⟩,|01⟩,|10⟩,|11⟩).
///
/// The λ_i are the singular values of √ρ Y √ρ*, Y = σ_y⊗σ_y, which equal the
/// square roots of the eigenvalues of ρ(Yρ*Y).
pub fn two_qubit_concurrence(rho: &CMatrix) -> Result<f64> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return invalid("two-qubit concurrence needs a 4x4 matrix");
    }
    let (lam, v) = hermitian_eigen(rho);
    let sqrt_d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        4,
        lam.iter().map(|&l| C64::new(l.max(0.0).sqrt(), 0.0)),
    ));
    let sqrt_rho = &v * sqrt_d * v.adjoint();
    let mut y = CMatrix::zeros(4, 4);
    for (r, c, s) in [(0, 3, -1.0), (1, 2, 1.0), (2, 1, 1.0), (3, 0, -1.0)] {
        y[(r, c)] = C64::new(s, 0.0);
    }
    let a = &sqrt_rho * y * sqrt_rho.map(|z| z.conj());
    let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok((sv[0] - sv[1] - sv[2] - sv[3]).max(0.0))
}

/// Two-qubit reduced state of sites (i, j) for a single-excitation state:
/// |10⟩ ↔ excitation on i, |01⟩ ↔ on j, |00⟩ ↔ elsewhere or ground.
pub fn pair_reduced_state(rho: &DensityMatrix, i: usize, j: usize) -> Result<CMatrix> {
    let d = rho.dim();
    if i >= d || j >= d || i == j {
        return invalid(format!("invalid site pair ({i}, {j}) for dimension {d}"));
    }
    let m = rho.matrix();
    let pi = m[(i, i)].re;
    let pj = m[(j, j)].re;
    let mut r = CMatrix::zeros(4, 4);
    r[(0, 0)] = C64::new(1.0 - pi - pj, 0.0);
    r[(1, 1)] = C64::new(pj, 0.0);
    r[(2, 2)] = C64::new(pi, 0.0);
    r[(2, 1)] = m[(i, j)];
    r[(1, 2)] = m[(j, i)];
    Ok(r)
}

pub fn pairwise_concurrence(rho: &DensityMatrix, i: usize, j: usize) -> Result<f64> {
    two_qubit_concurrence(&pair_reduced_state(rho, i, j)?)
}

/// Settings of the trap-population ETR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtrConfig {
    /// Charge-separation rate k_RC (ps⁻¹).
    pub k_rc_per_ps: f64,
    pub t_max_fs: f64,
    pub trap_site: usize,
}

/// Default k_RC (ps⁻¹).
pub const DEFAULT_K_RC_PER_PS: f64 = 1.0;

impl EtrConfig {
    pub fn new(k_rc_per_ps: f64, t_max_fs: f64, trap_site: usize) -> Result<Self> {
        let c = Self { k_rc_per_ps, t_max_fs, trap_site };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_rc_per_ps > 0.0 && self.k_rc_per_ps.is_finite()) {
            return invalid("k_RC must be positive");
        }
        if !(self.t_max_fs > 0.0 && self.t_max_fs.is_finite()) {
            return invalid("ETR t_max must be positive");
        }
        Ok(())
    }
}

/// Both ETR normalizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtrValue {
    /// k_RC ∫₀^{t_max} p_trap dt (dimensionless: ps⁻¹ × ps).
    pub absolute: f64,
    /// Time-averaged trap population ∫p_trap dt / t_max, in [0, 1].
    pub normalized: f64,
    pub k_rc_per_ps: f64,
    pub t_max_fs: f64,
}

/// Trapezoidal ∫₀^{t_max} of a sampled series, interpolating at t_max.
pub fn integrate_to(times: &[f64], values: &[f64], t_max: f64) -> Result<f64> {
    if times.is_empty() || times.len() != values.len() {
        return invalid("integration needs equal, non-empty series");
    }
    let horizon = times[times.len() - 1];
    if t_max > horizon * (1.0 + 1e-12) {
        return invalid(format!("t_max {t_max} fs exceeds the trajectory horizon {horizon} fs"));
    }
    let mut s = 0.0;
    for k in 1..times.len() {
        let (t0, t1) = (times[k - 1], times[k]);
        if t0 >= t_max {
            break;
        }
        let (v0, v1) = (values[k - 1], values[k]);
        if t1 <= t_max {
            s += 0.5 * (t1 - t0) * (v0 + v1);
        } else {
            let vm = v0 + (v1 - v0) * (t_max - t0) / (t1 - t0);
            s += 0.5 * (t_max - t0) * (v0 + vm);
        }
    }
    Ok(s)
}

/// ETR from the trap-site population of a trajectory.
pub fn etr(traj: &Trajectory, cfg: &EtrConfig) -> Result<EtrValue> {
    cfg.validate()?;
    if cfg.trap_site >= traj.dim() {
        return invalid(format!("trap site {} out of range", cfg.trap_site));
    }
    etr_from_series(traj.times(), &traj.population_series(cfg.trap_site), cfg)
}

pub fn etr_from_series(times: &[f64], trap_population: &[f64], cfg: &EtrConfig) -> Result<EtrValue> {
    cfg.validate()?;
    let integral_fs = integrate_to(times, trap_population, cfg.t_max_fs)?;
    Ok(EtrValue {
        absolute: cfg.k_rc_per_ps * integral_fs * 1e-3,
        normalized: integral_fs / cfg.t_max_fs,
        k_rc_per_ps: cfg.k_rc_per_ps,
        t_max_fs: cfg.t_max_fs,
    })
}

/// η_quantum = ETR_nonMarkov / ETR_Markov − 1.
pub fn quantum_advantage(etr_nonmarkov: f64, etr_markov: f64) -> Result<f64> {
    if etr_markov == 0.0 || !etr_markov.is_finite() {
        return Err(Error::InvalidInput("Markovian ETR must be nonzero".into()));
    }
    Ok(etr_nonmarkov / etr_markov - 1.0)
}

/// Metrics available as trajectory series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    L1Coherence,
    PopulationIpr,
    Purity,
    VonNeumann,
    LinearEntropy,
    Qfi,
    Concurrence,
    TrapPopulation,
}

impl MetricKind {
    pub const ALL: [MetricKind; 8] = [
        MetricKind::L1Coherence,
        MetricKind::PopulationIpr,
        MetricKind::Purity,
        MetricKind::VonNeumann,
        MetricKind::LinearEntropy,
        MetricKind::Qfi,
        MetricKind::Concurrence,
        MetricKind::TrapPopulation,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MetricKind::L1Coherence => "l1_coherence",
            MetricKind::PopulationIpr => "population_ipr",
            MetricKind::Purity => "purity",
            MetricKind::VonNeumann => "von_neumann",
            MetricKind::LinearEntropy => "linear_entropy",
            MetricKind::Qfi => "qfi",
            MetricKind::Concurrence => "concurrence",
            MetricKind::TrapPopulation => "trap_population",
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MetricKind::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown metric '{s}'")))
    }
}

/// Extra inputs of the series builders.
#[derive(Debug, Clone, Default)]
pub struct SeriesOptions {
    /// QFI generator; defaults to H_S when absent.
    pub generator: Option<CMatrix>,
    /// Site pair for concurrence (default (0, 1)).
    pub pair: Option<(usize, usize)>,
    pub trap_site: Option<usize>,
}

/// Evaluates one metric on every stored frame.
pub fn metric_series(traj: &Trajectory, kind: MetricKind, opts: &SeriesOptions, h_sys: &CMatrix) -> Result<MetricSeries> {
    let times = traj.times().to_vec();
    let states = traj.states();
    let (values, series) = match kind {
        MetricKind::L1Coherence => (states.iter().map(l1_coherence).collect::<Vec<_>>(), None),
        MetricKind::PopulationIpr => {
            let v = states
                .iter()
                .map(|s| {
                    let p: Vec<f64> = s.populations().iter().map(|x| x.max(0.0)).collect();
                    let t: f64 = p.iter().sum();
                    ipr(&p.iter().map(|x| x / t).collect::<Vec<_>>())
                })
                .collect::<Result<Vec<_>>>()?;
            (v, None)
        }
        MetricKind::Purity => (states.iter().map(|s| purity_entropies(s).purity).collect(), None),
        MetricKind::VonNeumann => (states.iter().map(|s| purity_entropies(s).von_neumann).collect(), None),
        MetricKind::LinearEntropy => (states.iter().map(|s| purity_entropies(s).linear_entropy).collect(), None),
        MetricKind::Qfi => {
            let g = opts.generator.clone().unwrap_or_else(|| h_sys.clone());
            let v = states.iter().map(|s| qfi(s, &g)).collect::<Result<Vec<_>>>()?;
            let label = if opts.generator.is_some() { "user" } else { "H_S (cm^-1)" };
            (v, Some(("generator", label.to_string())))
        }
        MetricKind::Concurrence => {
            let (i, j) = opts.pair.unwrap_or((0, 1));
            let v = states.iter().map(|s| pairwise_concurrence(s, i, j)).collect::<Result<Vec<_>>>()?;
            (v, Some(("pair", format!("{}-{}", i + 1, j + 1))))
        }
        MetricKind::TrapPopulation => {
            let site = opts.trap_site.unwrap_or(0);
            if site >= traj.dim() {
                return invalid("trap site out of range");
            }
            (traj.population_series(site), Some(("trap_site", (site + 1).to_string())))
        }
    };
    let mut out = MetricSeries::new(kind.as_str(), times, values)?.with_param("method", traj.method());
    if let Some((k, v)) = series {
        out = out.with_param(k, v);
    }
    if kind == MetricKind::PopulationIpr {
        out = out.with_param("note", "population IPR (site populations of a mixed state)");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrate_to_interpolates_inside_last_interval() {
        let t = [0.0, 10.0, 20.0];
        let v = [1.0, 1.0, 1.0];
        assert!((integrate_to(&t, &v, 15.0).unwrap() - 15.0).abs() < 1e-12);
        assert!(integrate_to(&t, &v, 25.0).is_err());
    }

    #[test]
    fn decay_fit_rejects_short_windows() {
        let t = [0.0, 1.0, 2.0];
        assert!(fit_exponential_decay(&t, &[1.0, 0.5, 0.25]).is_err());
    }
}
