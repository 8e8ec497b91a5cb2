//! PCE/ETR design evaluation and the constrained Pareto search.
//!
//! The ETR of a design is evaluated through a linear-response table: with the
//! initial state ρ₀ = Σ_n w_n |e_n⟩⟨e_n|, the trap-population integral is
//! linear in the weights, so one propagation per exciton state gives the exact
//! ETR of every design afterwards.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bath::BathSpec;
use crate::dynamics::{propagate_with, HierarchyConfig, Method, PropagateOptions, RedfieldVariant, SbdConfig};
use crate::error::{invalid, Error, Result};
use crate::illumination::{
    exciton_mixture, filtered_spectrum, pce, pumping_rates, Band, PVEfficiencyCurve, PumpingModel, SolarSpectrum,
    TransmissionProfile,
};
use crate::io::header_comment;
use crate::metrics::{etr, EtrConfig};
use crate::system::ExcitonSystem;

/// Minimum commercially viable PCE.
pub const DEFAULT_PCE_MIN: f64 = 0.15;
/// Upper bound used to normalize PCE in the scalarized objective.
pub const PCE_NORMALIZATION: f64 = 0.25;
/// Paper-reported PCE of the energy-focused, balanced and agriculture-focused
/// designs (reference metadata only).
pub const REFERENCE_NAMED_PCE: [f64; 3] = [0.221, 0.1883, 0.154];
/// Paper-reported balanced-design PCE and system ETR (reference only).
pub const REFERENCE_BALANCED: (f64, f64) = (0.1883, 0.8051);

/// Box constraints on the filter parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignBounds {
    pub n_bands: usize,
    pub center_nm: (f64, f64),
    pub fwhm_nm: (f64, f64),
    pub t_peak: (f64, f64),
}

impl Default for DesignBounds {
    fn default() -> Self {
        Self { n_bands: 2, center_nm: (380.0, 900.0), fwhm_nm: (50.0, 200.0), t_peak: (0.0, 1.0) }
    }
}

impl DesignBounds {
    pub fn validate(&self) -> Result<()> {
        if !(self.n_bands == 1 || self.n_bands == 2) {
            return invalid("n_bands must be 1 or 2");
        }
        for (name, (lo, hi)) in [("center", self.center_nm), ("fwhm", self.fwhm_nm), ("t_peak", self.t_peak)] {
            if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
                return invalid(format!("{name} bounds must satisfy lo <= hi"));
            }
        }
        if self.t_peak.0 < 0.0 || self.t_peak.1 > 1.0 || self.fwhm_nm.0 <= 0.0 {
            return invalid("t_peak bounds must lie in [0, 1] and fwhm bounds must be positive");
        }
        Ok(())
    }

    /// Genome layout: [T_peak, c₁, fwhm₁] or [T_peak, c₁, fwhm₁, c₂, fwhm₂, w₁].
    pub fn genome_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![self.t_peak.0, self.center_nm.0, self.fwhm_nm.0];
        let mut hi = vec![self.t_peak.1, self.center_nm.1, self.fwhm_nm.1];
        if self.n_bands == 2 {
            lo.extend([self.center_nm.0, self.fwhm_nm.0, 0.0]);
            hi.extend([self.center_nm.1, self.fwhm_nm.1, 1.0]);
        }
        (lo, hi)
    }

    pub fn decode(&self, x: &[f64]) -> Result<TransmissionProfile> {
        if self.n_bands == 1 {
            TransmissionProfile::single(x[0], x[1], x[2])
        } else {
            let w = x[5].clamp(0.0, 1.0);
            TransmissionProfile::new(
                x[0],
                vec![
                    Band { center_nm: x[1], fwhm_nm: x[2], weight: w },
                    Band { center_nm: x[3], fwhm_nm: x[4], weight: 1.0 - w },
                ],
            )
        }
    }
}

/// Unclipped T_peak Σ w_i G_i(λ).
pub fn raw_transmission(profile: &TransmissionProfile, lambda_nm: f64) -> f64 {
    profile.peak()
        * profile
            .bands()
            .iter()
            .map(|b| {
                let d = (lambda_nm - b.center_nm) / b.sigma_nm();
                b.weight * (-0.5 * d * d).exp()
            })
            .sum::<f64>()
}

/// Violations of the transmission-range and parameter-bound constraints.
pub fn bound_violations(profile: &TransmissionProfile, bounds: &DesignBounds) -> Vec<String> {
    let mut v = Vec::new();
    if profile.bands().len() > bounds.n_bands {
        v.push(format!("{} bands exceed the allowed {}", profile.bands().len(), bounds.n_bands));
    }
    let p = profile.peak();
    if !(bounds.t_peak.0..=bounds.t_peak.1).contains(&p) {
        v.push(format!("T_peak {p} outside [{}, {}]", bounds.t_peak.0, bounds.t_peak.1));
    }
    for (i, b) in profile.bands().iter().enumerate() {
        if !(bounds.center_nm.0..=bounds.center_nm.1).contains(&b.center_nm) {
            v.push(format!("band {i} center {} nm out of bounds", b.center_nm));
        }
        if !(bounds.fwhm_nm.0..=bounds.fwhm_nm.1).contains(&b.fwhm_nm) {
            v.push(format!("band {i} fwhm {} nm out of bounds", b.fwhm_nm));
        }
        if b.weight < 0.0 {
            v.push(format!("band {i} weight negative"));
        }
    }
    let wsum: f64 = profile.bands().iter().map(|b| b.weight).sum();
    if (wsum - 1.0).abs() > 1e-9 {
        v.push(format!("weights sum to {wsum}"));
    }
    let mut lam = 280.0;
    while lam <= 4000.0 {
        let t = raw_transmission(profile, lam);
        if !(-1e-12..=1.0 + 1e-12).contains(&t) {
            v.push(format!("T({lam} nm) = {t} outside [0, 1]"));
            break;
        }
        lam += 1.0;
    }
    v
}

/// Objective values of one design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    pub pce: f64,
    /// Time-averaged trap population × excitation fraction, in [0, 1].
    pub etr: f64,
    /// k_RC ∫ p_trap dt × excitation fraction.
    pub etr_absolute: f64,
    pub feasible: bool,
    pub constraint_violations: Vec<String>,
}

/// Everything needed to score a design.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalContext {
    pub solar: SolarSpectrum,
    pub pv: PVEfficiencyCurve,
    pub system: ExcitonSystem,
    pub bath: BathSpec,
    pub hierarchy: HierarchyConfig,
    pub method: Method,
    #[serde(default)]
    pub sbd: Option<SbdConfig>,
    #[serde(default)]
    pub redfield_variant: RedfieldVariant,
    pub pumping: PumpingModel,
    pub etr: EtrConfig,
    pub pce_min: f64,
    pub bounds: DesignBounds,
}

impl EvalContext {
    /// FMO with the default bath, AM1.5G, the default PV curve, Redfield
    /// dynamics and a 1 ps ETR window.
    pub fn fmo_default() -> Self {
        let system = crate::system::build_fmo_system();
        let pumping = PumpingModel::for_system(&system, crate::illumination::DEFAULT_LINE_WIDTH_NM)
            .expect("default line width is positive");
        let trap = system.trap_site();
        Self {
            solar: SolarSpectrum::am15g(),
            pv: PVEfficiencyCurve::default_curve(),
            system,
            bath: BathSpec::fmo_default(),
            hierarchy: HierarchyConfig::default(),
            method: Method::Redfield,
            sbd: None,
            redfield_variant: RedfieldVariant::default(),
            pumping,
            etr: EtrConfig { k_rc_per_ps: crate::metrics::DEFAULT_K_RC_PER_PS, t_max_fs: 1000.0, trap_site: trap },
            pce_min: DEFAULT_PCE_MIN,
            bounds: DesignBounds::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pumping.validate(self.system.n_sites())?;
        self.etr.validate()?;
        self.bounds.validate()?;
        self.hierarchy.validate()?;
        if self.etr.trap_site >= self.system.n_sites() {
            return invalid("ETR trap site out of range");
        }
        if !(0.0..=1.0).contains(&self.pce_min) {
            return invalid("pce_min must lie in [0, 1]");
        }
        if self.method == Method::Sbd && self.sbd.is_none() {
            return invalid("method sbd requires an SBD configuration");
        }
        Ok(())
    }

    fn options(&self) -> PropagateOptions {
        PropagateOptions { redfield_variant: self.redfield_variant, ..Default::default() }
    }

    fn sbd(&self) -> Option<&SbdConfig> {
        if self.method == Method::Sbd {
            self.sbd.as_ref()
        } else {
            None
        }
    }
}

/// Per-exciton trap-population integrals and the unfiltered reference rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtrResponse {
    /// Normalized ETR when starting in exciton state n.
    pub per_state: Vec<f64>,
    /// Pumping rates under the unfiltered reference spectrum.
    pub reference_rates: Vec<f64>,
    pub k_rc_per_ps: f64,
    pub t_max_fs: f64,
    pub method: Method,
}

impl EtrResponse {
    pub fn compute(ctx: &EvalContext) -> Result<Self> {
        ctx.validate()?;
        let n = ctx.system.n_sites();
        let mut per_state = Vec::with_capacity(n);
        for k in 0..n {
            let mut w = vec![0.0; n];
            w[k] = 1.0;
            let rho0 = exciton_mixture(&ctx.system, &w)?;
            let traj = propagate_with(
                &ctx.system,
                &ctx.bath,
                &rho0,
                ctx.etr.t_max_fs,
                &ctx.hierarchy,
                ctx.method,
                ctx.sbd(),
                &ctx.options(),
            )?;
            per_state.push(etr(&traj, &ctx.etr)?.normalized);
        }
        let reference_rates = pumping_rates(&ctx.solar, &ctx.system, &ctx.pumping)?;
        if !(reference_rates.iter().sum::<f64>() > 0.0) {
            return Err(Error::Unavailable("reference spectrum excites no exciton state".into()));
        }
        Ok(Self { per_state, reference_rates, k_rc_per_ps: ctx.etr.k_rc_per_ps, t_max_fs: ctx.etr.t_max_fs, method: ctx.method })
    }

    /// (normalized, absolute) ETR for the given pumping rates. The excitation
    /// fraction Σrates/Σreference scales the mixture result.
    pub fn etr_for_rates(&self, rates: &[f64]) -> (f64, f64) {
        let reference: f64 = self.reference_rates.iter().sum();
        let norm: f64 = rates.iter().zip(&self.per_state).map(|(r, e)| r * e).sum::<f64>() / reference;
        (norm, norm * self.k_rc_per_ps * self.t_max_fs * 1e-3)
    }
}

/// Scores designs against a fixed context.
#[derive(Debug, Clone)]
pub struct Evaluator {
    pub ctx: EvalContext,
    pub response: EtrResponse,
}

impl Evaluator {
    pub fn new(ctx: EvalContext) -> Result<Self> {
        let response = EtrResponse::compute(&ctx)?;
        Ok(Self { ctx, response })
    }

    pub fn evaluate(&self, design: &TransmissionProfile) -> Result<Objectives> {
        let p = pce(design, &self.ctx.solar, &self.ctx.pv)?;
        let plant = filtered_spectrum(design, &self.ctx.solar);
        let rates = pumping_rates(&plant, &self.ctx.system, &self.ctx.pumping)?;
        let (etr_n, etr_a) = self.response.etr_for_rates(&rates);
        let mut violations = bound_violations(design, &self.ctx.bounds);
        if p < self.ctx.pce_min {
            violations.push(format!("pce {p:.4} below pce_min {}", self.ctx.pce_min));
        }
        Ok(Objectives { pce: p, etr: etr_n, etr_absolute: etr_a, feasible: violations.is_empty(), constraint_violations: violations })
    }
}

/// Direct evaluation by propagating the pumped mixture (no response table).
pub fn evaluate_design(design: &TransmissionProfile, ctx: &EvalContext) -> Result<Objectives> {
    ctx.validate()?;
    let p = pce(design, &ctx.solar, &ctx.pv)?;
    let rates = pumping_rates(&filtered_spectrum(design, &ctx.solar), &ctx.system, &ctx.pumping)?;
    let reference: f64 = pumping_rates(&ctx.solar, &ctx.system, &ctx.pumping)?.iter().sum();
    let total: f64 = rates.iter().sum();
    let (etr_n, etr_a) = if total > 0.0 {
        let rho0 = exciton_mixture(&ctx.system, &rates)?;
        let traj = propagate_with(&ctx.system, &ctx.bath, &rho0, ctx.etr.t_max_fs, &ctx.hierarchy, ctx.method, ctx.sbd(), &ctx.options())?;
        let v = etr(&traj, &ctx.etr)?;
        let frac = total / reference;
        (v.normalized * frac, v.absolute * frac)
    } else {
        (0.0, 0.0)
    };
    let mut violations = bound_violations(design, &ctx.bounds);
    if p < ctx.pce_min {
        violations.push(format!("pce {p:.4} below pce_min {}", ctx.pce_min));
    }
    Ok(Objectives { pce: p, etr: etr_n, etr_absolute: etr_a, feasible: violations.is_empty(), constraint_violations: violations })
}

/// Differential-evolution settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    pub population: usize,
    pub generations: usize,
    pub f: f64,
    pub cr: f64,
    pub seed: u64,
    /// Scalarization weights λ_w on the first objective.
    pub sweep: Vec<f64>,
}

impl DeConfig {
    pub fn new(population: usize, generations: usize, seed: u64) -> Self {
        Self { population, generations, f: 0.8, cr: 0.9, seed, sweep: (0..=10).map(|k| k as f64 / 10.0).collect() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 8 {
            return invalid("population must be >= 8");
        }
        if self.generations == 0 {
            return invalid("generations must be >= 1");
        }
        if !(self.f > 0.0 && self.f <= 2.0) || !(0.0..=1.0).contains(&self.cr) {
            return invalid("F must lie in (0, 2] and CR in [0, 1]");
        }
        if self.sweep.is_empty() || self.sweep.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return invalid("sweep weights must lie in [0, 1]");
        }
        Ok(())
    }
}

/// A feasible evaluated point of the generic search.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchivePoint {
    pub x: Vec<f64>,
    pub f: (f64, f64),
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for (sweep, generation, individual).
fn stream(seed: u64, sweep: usize, generation: usize, individual: usize) -> ChaCha8Rng {
    let s = splitmix(splitmix(splitmix(seed ^ sweep as u64) ^ generation as u64) ^ individual as u64);
    ChaCha8Rng::seed_from_u64(s)
}

/// Scalarized rand/1/bin DE sweep over two maximized objectives. `eval`
/// returns `None` for infeasible points; feasibility acts by rejection.
/// Returns every feasible evaluated point, in evaluation order.
pub fn de_sweep<F>(lower: &[f64], upper: &[f64], cfg: &DeConfig, scale: (f64, f64), eval: F) -> Result<Vec<ArchivePoint>>
where
    F: Fn(&[f64]) -> Option<(f64, f64)>,
{
    cfg.validate()?;
    if lower.len() != upper.len() || lower.is_empty() {
        return invalid("genome bounds must be non-empty and of equal length");
    }
    let dim = lower.len();
    let np = cfg.population;
    let mut archive = Vec::new();
    for (k, &lw) in cfg.sweep.iter().enumerate() {
        let fitness = |f: (f64, f64)| lw * f.0 / scale.0 + (1.0 - lw) * f.1 / scale.1;
        let mut pop: Vec<Vec<f64>> = (0..np)
            .map(|i| {
                let mut rng = stream(cfg.seed, k, 0, i);
                (0..dim).map(|d| lower[d] + rng.random::<f64>() * (upper[d] - lower[d])).collect()
            })
            .collect();
        let mut objs: Vec<Option<(f64, f64)>> = pop.iter().map(|x| eval(x)).collect();
        for (x, o) in pop.iter().zip(&objs) {
            if let Some(f) = o {
                archive.push(ArchivePoint { x: x.clone(), f: *f });
            }
        }
        for g in 1..=cfg.generations {
            let trials: Vec<Vec<f64>> = (0..np)
                .map(|i| {
                    let mut rng = stream(cfg.seed, k, g, i);
                    let mut pick = |excl: &[usize]| loop {
                        let r = rng.random_range(0..np);
                        if !excl.contains(&r) {
                            break r;
                        }
                    };
                    let r1 = pick(&[i]);
                    let r2 = pick(&[i, r1]);
                    let r3 = pick(&[i, r1, r2]);
                    let jrand = rng.random_range(0..dim);
                    (0..dim)
                        .map(|d| {
                            if d == jrand || rng.random::<f64>() < cfg.cr {
                                let v = pop[r1][d] + cfg.f * (pop[r2][d] - pop[r3][d]);
                                v.clamp(lower[d], upper[d])
                            } else {
                                pop[i][d]
                            }
                        })
                        .collect()
                })
                .collect();
            // generation barrier: all trials built from the previous population
            for (i, trial) in trials.into_iter().enumerate() {
                let o = eval(&trial);
                if let Some(f) = o {
                    archive.push(ArchivePoint { x: trial.clone(), f });
                    let better = match objs[i] {
                        None => true,
                        Some(cur) => fitness(f) >= fitness(cur),
                    };
                    if better {
                        pop[i] = trial;
                        objs[i] = o;
                    }
                }
            }
        }
    }
    Ok(archive)
}

/// Indices of the non-dominated points (maximization). Equal objective
/// pairs keep only the first in (f1, f2, key) order.
pub fn non_dominated<K: PartialOrd>(points: &[(f64, f64)], keys: &[K]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[b]
            .0
            .total_cmp(&points[a].0)
            .then(points[b].1.total_cmp(&points[a].1))
            .then(keys[a].partial_cmp(&keys[b]).unwrap_or(std::cmp::Ordering::Equal))
    });
    let mut best = f64::NEG_INFINITY;
    let mut keep = Vec::new();
    for i in idx {
        if points[i].1 > best {
            best = points[i].1;
            keep.push(i);
        }
    }
    keep.reverse();
    keep
}

/// `p` dominates `q` when it is no worse in both and better in one.
pub fn dominates(p: (f64, f64), q: (f64, f64)) -> bool {
    p.0 >= q.0 && p.1 >= q.1 && (p.0 > q.0 || p.1 > q.1)
}

/// Area dominated by a maximization front relative to `reference`.
pub fn hypervolume(front: &[(f64, f64)], reference: (f64, f64)) -> f64 {
    let mut pts: Vec<(f64, f64)> = front.iter().copied().filter(|p| p.0 > reference.0 && p.1 > reference.1).collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut hv = 0.0;
    let mut top = reference.1;
    for (x, y) in pts {
        if y > top {
            hv += (x - reference.0) * (y - top);
            top = y;
        }
    }
    hv
}

/// One member of the design front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoMember {
    pub design: TransmissionProfile,
    pub objectives: Objectives,
    pub method: Method,
}

/// Non-dominated designs sorted by ascending PCE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub members: Vec<ParetoMember>,
    pub seed: u64,
    pub evaluations: usize,
}

impl ParetoFront {
    pub fn objectives(&self) -> Vec<(f64, f64)> {
        self.members.iter().map(|m| (m.objectives.pce, m.objectives.etr)).collect()
    }

    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut s = header_comment(config_hash) + "\n";
        s.push_str("pce,etr,etr_absolute,t_peak,n_bands,center1_nm,fwhm1_nm,weight1,center2_nm,fwhm2_nm,weight2,method\n");
        for m in &self.members {
            let b = m.design.bands();
            let band = |i: usize| {
                b.get(i)
                    .map(|b| format!("{},{},{}", b.center_nm, b.fwhm_nm, b.weight))
                    .unwrap_or_else(|| ",,".into())
            };
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                m.objectives.pce,
                m.objectives.etr,
                m.objectives.etr_absolute,
                m.design.peak(),
                b.len(),
                band(0),
                band(1),
                m.method
            ));
        }
        s
    }
}

/// Full constrained search: DE sweep over scalarizations, then the
/// non-dominated subset of every feasible design evaluated.
pub fn optimize_pareto(evaluator: &Evaluator, cfg: &DeConfig) -> Result<ParetoFront> {
    let bounds = &evaluator.ctx.bounds;
    let (lo, hi) = bounds.genome_bounds();
    let eval = |x: &[f64]| -> Option<(f64, f64)> {
        let d = bounds.decode(x).ok()?;
        let o = evaluator.evaluate(&d).ok()?;
        o.feasible.then_some((o.pce, o.etr))
    };
    let archive = de_sweep(&lo, &hi, cfg, (PCE_NORMALIZATION, 1.0), eval)?;
    let evaluations = cfg.sweep.len() * cfg.population * (cfg.generations + 1);
    if archive.is_empty() {
        return Err(Error::EmptyFeasibleSet(format!(
            "no feasible design found in {evaluations} evaluations (pce_min = {})",
            evaluator.ctx.pce_min
        )));
    }
    let pts: Vec<(f64, f64)> = archive.iter().map(|a| a.f).collect();
    let keys: Vec<String> = archive.iter().map(|a| format!("{:?}", a.x)).collect();
    let mut members = Vec::new();
    for i in non_dominated(&pts, &keys) {
        let design = bounds.decode(&archive[i].x)?;
        let objectives = evaluator.evaluate(&design)?;
        members.push(ParetoMember { design, objectives, method: evaluator.ctx.method });
    }
    members.sort_by(|a, b| a.objectives.pce.total_cmp(&b.objectives.pce));
    Ok(ParetoFront { members, seed: cfg.seed, evaluations })
}

/// The three operating points picked from a front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedConfigs {
    pub balanced: ParetoMember,
    pub energy_focused: ParetoMember,
    pub agriculture_focused: ParetoMember,
}

/// Max-PCE, max-ETR and knee members. The knee maximizes the smaller of its
/// normalized distances to the two extremes.
pub fn select_named_configs(front: &ParetoFront) -> Result<NamedConfigs> {
    let m = &front.members;
    if m.is_empty() {
        return Err(Error::EmptyFeasibleSet("empty front".into()));
    }
    let by = |key: fn(&Objectives) -> f64| {
        (0..m.len()).max_by(|&a, &b| key(&m[a].objectives).total_cmp(&key(&m[b].objectives))).expect("non-empty")
    };
    let e = by(|o| o.pce);
    let a = by(|o| o.etr);
    let (p0, p1) = (m[a].objectives.pce, m[e].objectives.pce);
    let (r0, r1) = (m[e].objectives.etr, m[a].objectives.etr);
    let norm = |v: f64, lo: f64, hi: f64| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
    let point = |k: usize| (norm(m[k].objectives.pce, p0, p1), norm(m[k].objectives.etr, r0, r1));
    let (pe, pa) = (point(e), point(a));
    let dist = |x: (f64, f64), y: (f64, f64)| ((x.0 - y.0).powi(2) + (x.1 - y.1).powi(2)).sqrt();
    let knee = (0..m.len())
        .max_by(|&x, &y| {
            let dx = dist(point(x), pe).min(dist(point(x), pa));
            let dy = dist(point(y), pe).min(dist(point(y), pa));
            dx.total_cmp(&dy).then(y.cmp(&x))
        })
        .expect("non-empty");
    Ok(NamedConfigs { balanced: m[knee].clone(), energy_focused: m[e].clone(), agriculture_focused: m[a].clone() })
}

/// Published balanced dual-band design. The two band amplitudes
/// (0.984, 0.998) are renormalized into weights under T_peak = 1.
pub fn reference_balanced_design() -> TransmissionProfile {
    TransmissionProfile::normalized(
        1.0,
        vec![
            Band { center_nm: 668.4, fwhm_nm: 97.9, weight: 0.984 },
            Band { center_nm: 440.4, fwhm_nm: 87.6, weight: 0.998 },
        ],
    )
    .expect("reference design is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_dominated_handles_ties() {
        let pts = [(1.0, 1.0), (1.0, 1.0), (0.5, 2.0), (0.4, 1.5), (2.0, 0.1)];
        let keys = ["b", "a", "c", "d", "e"];
        let k = non_dominated(&pts, &keys);
        assert_eq!(k, vec![2, 1, 4]);
    }

    #[test]
    fn hypervolume_of_staircase() {
        let hv = hypervolume(&[(1.0, 0.0), (0.5, 0.5), (0.0, 1.0)], (0.0, 0.0));
        assert!((hv - 0.25).abs() < 1e-12);
    }
}
