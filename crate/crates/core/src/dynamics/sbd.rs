//! Spectrally bundled dissipators: Lindblad channels
//! p_α(t)·(L_α ρ L_α† − ½{L_α†L_α, ρ}) with piecewise-constant weights.

use serde::{Deserialize, Serialize};

use super::superop::{hamiltonian_superop, lindblad_superop, LiouvilleRun, ScheduledPart};
use crate::bath::{mode_coupling_density, BathSpec, CorrelationExpansion, Decomposition, TermKind};
use crate::density::DensityMatrix;
use crate::error::{invalid, Result};
use crate::system::ExcitonSystem;
use crate::units::{rate_per_ps_to_wavenumber, wavenumber_to_rate_per_ps};
use crate::{CMatrix, C64};

/// One nonzero entry of a jump operator in the site basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub row: usize,
    pub col: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Jump operator L_α over the sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorSpec {
    /// |s⟩⟨s|.
    SiteProjector { site: usize },
    /// |to⟩⟨from|.
    Transfer { from: usize, to: usize },
    /// General sparse matrix.
    Matrix { entries: Vec<MatrixEntry> },
}

impl OperatorSpec {
    pub fn to_matrix(&self, n: usize) -> Result<CMatrix> {
        let mut m = CMatrix::zeros(n, n);
        match self {
            OperatorSpec::SiteProjector { site } => {
                if *site >= n {
                    return invalid(format!("projector site {site} out of range"));
                }
                m[(*site, *site)] = C64::new(1.0, 0.0);
            }
            OperatorSpec::Transfer { from, to } => {
                if *from >= n || *to >= n {
                    return invalid("transfer operator site out of range");
                }
                m[(*to, *from)] = C64::new(1.0, 0.0);
            }
            OperatorSpec::Matrix { entries } => {
                for e in entries {
                    if e.row >= n || e.col >= n {
                        return invalid(format!("operator entry ({}, {}) out of range", e.row, e.col));
                    }
                    if !(e.re.is_finite() && e.im.is_finite()) {
                        return invalid("operator entries must be finite");
                    }
                    m[(e.row, e.col)] += C64::new(e.re, e.im);
                }
            }
        }
        Ok(m)
    }
}

/// Piecewise-constant rate p(t): `rates_per_ps[i]` holds on
/// [`breakpoints_fs[i]`, `breakpoints_fs[i+1]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSchedule {
    pub breakpoints_fs: Vec<f64>,
    pub rates_per_ps: Vec<f64>,
}

impl RateSchedule {
    pub fn constant(rate_per_ps: f64) -> Self {
        Self { breakpoints_fs: vec![0.0], rates_per_ps: vec![rate_per_ps] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.breakpoints_fs.is_empty() || self.breakpoints_fs.len() != self.rates_per_ps.len() {
            return invalid("rate schedule needs matching, non-empty breakpoints and rates");
        }
        if self.breakpoints_fs[0] != 0.0 {
            return invalid("rate schedule must start at t = 0");
        }
        if self.breakpoints_fs.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("rate schedule breakpoints must be strictly increasing");
        }
        if self.rates_per_ps.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
            return invalid("bundle rates must be finite and non-negative");
        }
        Ok(())
    }

    /// p(t) in ps⁻¹.
    pub fn rate_at(&self, t_fs: f64) -> f64 {
        let i = self.breakpoints_fs.partition_point(|&b| b <= t_fs).saturating_sub(1);
        self.rates_per_ps[i]
    }

    pub(crate) fn internal_rate_at(&self, t_fs: f64) -> f64 {
        rate_per_ps_to_wavenumber(self.rate_at(t_fs))
    }
}

/// A named dissipative channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub label: String,
    pub operator: OperatorSpec,
    pub schedule: RateSchedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbdConfig {
    pub bundles: Vec<Bundle>,
}

impl SbdConfig {
    pub fn validate(&self, n_sites: usize) -> Result<()> {
        if self.bundles.is_empty() {
            return invalid("an SBD configuration needs at least one bundle");
        }
        for b in &self.bundles {
            b.schedule.validate()?;
            b.operator.to_matrix(n_sites)?;
        }
        Ok(())
    }
}

/// Default bundles for a system coupled to `bath` through site projectors.
///
/// * one dephasing bundle per site, L = |s⟩⟨s|, with the Markovian Drude
///   dephasing rate 2 Re Γ_D(0);
/// * per vibronic mode, a downhill and an uphill exciton-relaxation bundle
///   L = Σ_{E_a>E_b} c_ab |b⟩⟨a| (and its adjoint), c_ab² = Σ_s |U_sa U_sb|²,
///   with rates 2J_k(ω̄)(n̄+1) and 2J_k(ω̄)n̄ at the mean exciton gap ω̄.
pub fn default_sbd_config(system: &ExcitonSystem, bath: &BathSpec) -> SbdConfig {
    let n = system.n_sites();
    let mut bundles = Vec::new();
    if bath.drude_lambda() > 0.0 {
        let drude = CorrelationExpansion::new(&bath.without_modes(), 64, Decomposition::Pade);
        let re_gamma0: f64 = drude
            .terms
            .iter()
            .filter(|t| matches!(t.kind, TermKind::Drude | TermKind::Thermal { .. }))
            .map(|t| (t.coeff / t.rate).re)
            .sum();
        let rate = wavenumber_to_rate_per_ps(2.0 * re_gamma0);
        for s in 0..n {
            bundles.push(Bundle {
                label: format!("drude_dephasing_site{}", s + 1),
                operator: OperatorSpec::SiteProjector { site: s },
                schedule: RateSchedule::constant(rate),
            });
        }
    }
    if n > 1 && !bath.vibronic_modes().is_empty() {
        let (e, u) = system.exciton_basis();
        let mut gaps = Vec::new();
        for a in 0..n {
            for b in 0..a {
                gaps.push(e[a] - e[b]);
            }
        }
        let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let mut down = CMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..a {
                let c: f64 = (0..n).map(|s| (u[(s, a)] * u[(s, b)]).powi(2)).sum::<f64>().sqrt();
                // |b⟩⟨a| in the site basis
                for i in 0..n {
                    for j in 0..n {
                        down[(i, j)] += C64::new(c * u[(i, b)] * u[(j, a)], 0.0);
                    }
                }
            }
        }
        let up = down.adjoint();
        let occ = 1.0 / ((bath.beta() * mean_gap).exp() - 1.0);
        for (k, mode) in bath.vibronic_modes().iter().enumerate() {
            if mode.huang_rhys == 0.0 {
                continue;
            }
            let j = mode_coupling_density(mean_gap, mode);
            for (label, op, rate) in [("down", &down, 2.0 * j * (occ + 1.0)), ("up", &up, 2.0 * j * occ)] {
                bundles.push(Bundle {
                    label: format!("mode{}_{label}", k + 1),
                    operator: dense_operator(op),
                    schedule: RateSchedule::constant(wavenumber_to_rate_per_ps(rate)),
                });
            }
        }
    }
    SbdConfig { bundles }
}

fn dense_operator(m: &CMatrix) -> OperatorSpec {
    let mut entries = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            if v.norm() > 1e-15 {
                entries.push(MatrixEntry { row: i, col: j, re: v.re, im: v.im });
            }
        }
    }
    OperatorSpec::Matrix { entries }
}

pub(crate) fn sbd_run(
    system: &ExcitonSystem,
    cfg: &SbdConfig,
    rho0: &DensityMatrix,
    pumping: Option<(CMatrix, f64)>,
    dt: f64,
) -> Result<LiouvilleRun> {
    let n = system.n_sites();
    let shift = system.mean_site_energy();
    let mut h = system.hamiltonian_complex();
    for i in 0..n {
        h[(i, i)] -= C64::new(shift, 0.0);
    }
    let base = hamiltonian_superop(&h);
    let mut parts = Vec::with_capacity(cfg.bundles.len());
    for b in &cfg.bundles {
        let l = b.operator.to_matrix(n)?;
        parts.push(ScheduledPart { superop: lindblad_superop(&l), schedule: b.schedule.clone() });
    }
    Ok(LiouvilleRun::scheduled(base, parts, rho0, pumping, dt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_lookup() {
        let s = RateSchedule { breakpoints_fs: vec![0.0, 100.0, 250.0], rates_per_ps: vec![1.0, 2.0, 3.0] };
        s.validate().unwrap();
        assert_eq!(s.rate_at(0.0), 1.0);
        assert_eq!(s.rate_at(99.9), 1.0);
        assert_eq!(s.rate_at(100.0), 2.0);
        assert_eq!(s.rate_at(1e6), 3.0);
    }

    #[test]
    fn rejects_negative_rates_and_empty_configs() {
        let s = RateSchedule { breakpoints_fs: vec![0.0], rates_per_ps: vec![-1.0] };
        assert!(s.validate().is_err());
        assert!(SbdConfig { bundles: vec![] }.validate(2).is_err());
    }

    #[test]
    fn default_bundles_for_fmo() {
        let cfg = default_sbd_config(&crate::system::build_fmo_system(), &BathSpec::fmo_default());
        assert_eq!(cfg.bundles.len(), 7 + 2 * 4);
        cfg.validate(7).unwrap();
        // Drude dephasing rate 4λ/(βγ) in ps⁻¹
        let b = BathSpec::fmo_default().beta();
        let expected = wavenumber_to_rate_per_ps(4.0 * 35.0 / (b * 50.0));
        let got = cfg.bundles[0].schedule.rate_at(0.0);
        assert!((got - expected).abs() < 1e-6 * expected, "{got} vs {expected}");
    }
}
