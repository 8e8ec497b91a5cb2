//! Site climate, atmospheric attenuation, soiling and the year-long
//! degradation ledger.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::illumination::{trapezoid, Transmission, TransmissionProfile};
use crate::io::header_comment;
use crate::optimizer::Evaluator;

const SITES_JSON: &str = include_str!("../data/sites.json");

/// Mass-per-area to film thickness: assumed dust density (g/cm³).
pub const DUST_DENSITY_G_CM3: f64 = 2.0;
/// Air-mass cap near the horizon.
pub const AIR_MASS_CAP: f64 = 38.0;

/// Periodic washing: each listed day multiplies the dust mass by
/// (1 − wash_fraction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleaningSchedule {
    pub first_day: u32,
    pub last_day: u32,
    pub every_days: u32,
    pub wash_fraction: f64,
}

impl Default for CleaningSchedule {
    fn default() -> Self {
        Self { first_day: 270, last_day: 300, every_days: 1, wash_fraction: 0.028 }
    }
}

impl CleaningSchedule {
    pub fn none() -> Self {
        Self { first_day: 0, last_day: 0, every_days: 1, wash_fraction: 0.0 }
    }

    pub fn washes_on(&self, day: u32) -> bool {
        self.wash_fraction > 0.0
            && day >= self.first_day
            && day <= self.last_day
            && (day - self.first_day).is_multiple_of(self.every_days.max(1))
    }
}

fn d_initial_dust() -> f64 {
    0.023
}
fn d_gamma() -> f64 {
    0.1
}
fn d_one() -> f64 {
    1.0
}
fn d_humidity_mean() -> f64 {
    0.5
}
fn d_humidity_amp() -> f64 {
    0.2
}
fn d_jitter() -> f64 {
    0.05
}
fn d_kt() -> f64 {
    0.6
}
fn d_kt_sigma() -> f64 {
    0.12
}

/// Geographic and atmospheric parameters of one site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteClimate {
    pub name: String,
    #[serde(default)]
    pub climate: String,
    pub latitude_deg: f64,
    pub turbidity_beta: f64,
    pub angstrom_alpha: f64,
    pub water_vapor_cm: f64,
    /// r_dep, mg·cm⁻²·day⁻¹.
    pub dust_deposition: f64,
    /// r_clean, fraction removed by continuous natural cleaning.
    pub cleaning_fraction: f64,
    #[serde(default)]
    pub cleaning_events: CleaningSchedule,
    pub temperature_mean_k: f64,
    pub temperature_annual_amp_k: f64,
    pub temperature_diurnal_amp_k: f64,
    #[serde(default = "d_humidity_mean")]
    pub humidity_mean: f64,
    #[serde(default = "d_humidity_amp")]
    pub humidity_amp: f64,
    /// Dust mass at day 0 (mg·cm⁻²).
    #[serde(default = "d_initial_dust")]
    pub initial_dust_mg_cm2: f64,
    /// γ_dust, m²·g⁻¹.
    #[serde(default = "d_gamma")]
    pub gamma_dust: f64,
    /// Clean-surface transmission T₀.
    #[serde(default = "d_one")]
    pub clean_transmission: f64,
    /// Relative standard deviation of the daily turbidity.
    #[serde(default = "d_jitter")]
    pub aod_jitter: f64,
    #[serde(default = "d_kt")]
    pub clearness_mean: f64,
    #[serde(default = "d_kt_sigma")]
    pub clearness_sigma: f64,
}

impl SiteClimate {
    /// Temperate reference site used for the default year-long run.
    pub fn default_site() -> Self {
        Self {
            name: "default".into(),
            climate: "temperate".into(),
            latitude_deg: 50.0,
            turbidity_beta: 0.1,
            angstrom_alpha: 1.3,
            water_vapor_cm: 1.5,
            dust_deposition: 0.1,
            cleaning_fraction: 0.999,
            cleaning_events: CleaningSchedule::default(),
            temperature_mean_k: 293.0,
            temperature_annual_amp_k: 8.0,
            temperature_diurnal_amp_k: 2.0,
            humidity_mean: d_humidity_mean(),
            humidity_amp: d_humidity_amp(),
            initial_dust_mg_cm2: d_initial_dust(),
            gamma_dust: d_gamma(),
            clean_transmission: 1.0,
            aod_jitter: d_jitter(),
            clearness_mean: d_kt(),
            clearness_sigma: d_kt_sigma(),
        }
    }

    /// Clean, transparent atmosphere with constant weather.
    pub fn static_conditions(latitude_deg: f64) -> Self {
        Self {
            name: "static".into(),
            latitude_deg,
            turbidity_beta: 0.0,
            water_vapor_cm: 0.0,
            dust_deposition: 0.0,
            cleaning_events: CleaningSchedule::none(),
            temperature_annual_amp_k: 0.0,
            temperature_diurnal_amp_k: 0.0,
            humidity_amp: 0.0,
            initial_dust_mg_cm2: 0.0,
            aod_jitter: 0.0,
            clearness_sigma: 0.0,
            ..Self::default_site()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.latitude_deg) {
            return invalid(format!("{}: latitude must lie in [-90, 90]", self.name));
        }
        if !(0.0..=1.0).contains(&self.cleaning_fraction) || !(0.0..=1.0).contains(&self.cleaning_events.wash_fraction) {
            return invalid(format!("{}: cleaning fractions must lie in [0, 1]", self.name));
        }
        for (what, v) in [
            ("turbidity", self.turbidity_beta),
            ("angstrom exponent", self.angstrom_alpha),
            ("water vapor", self.water_vapor_cm),
            ("dust deposition", self.dust_deposition),
            ("initial dust", self.initial_dust_mg_cm2),
            ("AOD jitter", self.aod_jitter),
            ("clearness sigma", self.clearness_sigma),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return invalid(format!("{}: {what} must be finite and >= 0", self.name));
            }
        }
        if !(0.0..=1.0).contains(&self.clean_transmission) || !(0.0..=1.0).contains(&self.clearness_mean) {
            return invalid(format!("{}: T0 and mean clearness must lie in [0, 1]", self.name));
        }
        if !(self.gamma_dust > 0.0) {
            return invalid(format!("{}: gamma_dust must be positive", self.name));
        }
        if self.humidity_mean - self.humidity_amp.abs() < 0.0 || self.humidity_mean + self.humidity_amp.abs() > 1.0 {
            return invalid(format!("{}: humidity sinusoid must stay in [0, 1]", self.name));
        }
        Ok(())
    }

    /// Parameters outside their nominal ranges (accepted, but reported).
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !(0.05..=0.2).contains(&self.turbidity_beta) {
            w.push(format!("turbidity beta {} outside the nominal [0.05, 0.2]", self.turbidity_beta));
        }
        if !(1.0..=1.5).contains(&self.angstrom_alpha) {
            w.push(format!("angstrom alpha {} outside the nominal [1.0, 1.5]", self.angstrom_alpha));
        }
        if !(0.05..=0.15).contains(&self.gamma_dust) {
            w.push(format!("gamma_dust {} outside the nominal [0.05, 0.15] m^2/g", self.gamma_dust));
        }
        w
    }
}

/// The nine bundled sites.
pub fn site_database() -> Vec<SiteClimate> {
    serde_json::from_str(SITES_JSON).expect("bundled site database is valid")
}

/// Reads a user site database (JSON array of site records).
pub fn load_site_database(text: &str) -> Result<Vec<SiteClimate>> {
    let sites: Vec<SiteClimate> = serde_json::from_str(text)?;
    for s in &sites {
        s.validate()?;
    }
    Ok(sites)
}

/// Sun position for one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SunGeometry {
    pub declination_deg: f64,
    pub zenith_deg: f64,
    /// 1/cos θz capped at 38; +∞ while the sun is below the horizon.
    pub air_mass: f64,
}

/// δ(d) = −23.45°·cos(360/365·(d + 10)), cos θz = sin φ sin δ + cos φ cos δ cos h.
pub fn sun_geometry(latitude_deg: f64, day_of_year: f64, hour_angle_deg: f64) -> Result<SunGeometry> {
    if !(0.0..=365.0).contains(&day_of_year) {
        return invalid(format!("day of year {day_of_year} outside [0, 365]"));
    }
    if !(-90.0..=90.0).contains(&latitude_deg) {
        return invalid("latitude must lie in [-90, 90]");
    }
    let delta = -23.45 * (360.0 / 365.0 * (day_of_year + 10.0)).to_radians().cos();
    let (phi, d, h) = (latitude_deg.to_radians(), delta.to_radians(), hour_angle_deg.to_radians());
    let cz = (phi.sin() * d.sin() + phi.cos() * d.cos() * h.cos()).clamp(-1.0, 1.0);
    let air_mass = if cz <= 0.0 { f64::INFINITY } else { (1.0 / cz).min(AIR_MASS_CAP) };
    Ok(SunGeometry { declination_deg: delta, zenith_deg: cz.acos().to_degrees(), air_mass })
}

/// One Gaussian absorption feature of water vapor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionPeak {
    pub center_nm: f64,
    pub sigma_nm: f64,
    /// Peak k_H2O (cm⁻¹ of precipitable water).
    pub amplitude: f64,
}

/// k_H2O(λ) as a sum of Gaussian peaks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaterVaporCurve {
    pub peaks: Vec<AbsorptionPeak>,
}

impl Default for WaterVaporCurve {
    fn default() -> Self {
        Self {
            peaks: vec![
                AbsorptionPeak { center_nm: 940.0, sigma_nm: 20.0, amplitude: 0.3 },
                AbsorptionPeak { center_nm: 1100.0, sigma_nm: 25.0, amplitude: 0.5 },
                AbsorptionPeak { center_nm: 1400.0, sigma_nm: 35.0, amplitude: 2.0 },
            ],
        }
    }
}

impl WaterVaporCurve {
    pub fn eval(&self, lambda_nm: f64) -> f64 {
        self.peaks
            .iter()
            .map(|p| {
                let d = (lambda_nm - p.center_nm) / p.sigma_nm;
                p.amplitude * (-0.5 * d * d).exp()
            })
            .sum()
    }
}

/// τ_aer = β(λ/1000 nm)^(−α).
pub fn aerosol_optical_depth(lambda_nm: f64, beta: f64, alpha: f64) -> f64 {
    beta * (lambda_nm / 1000.0).powf(-alpha)
}

/// exp[−τ_aer·AM]·exp[−k_H2O·w·AM]. An infinite air mass gives 0.
pub fn atmospheric_transmission(lambda_nm: f64, air_mass: f64, site: &SiteClimate, water: &WaterVaporCurve) -> Result<f64> {
    if !(air_mass >= 1.0) {
        return invalid(format!("air mass must be >= 1, got {air_mass}"));
    }
    let tau = aerosol_optical_depth(lambda_nm, site.turbidity_beta, site.angstrom_alpha)
        + water.eval(lambda_nm) * site.water_vapor_cm;
    if tau == 0.0 {
        return Ok(1.0);
    }
    Ok((-tau * air_mass).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkyCategory {
    Clear,
    PartlyCloudy,
    Overcast,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkyState {
    pub clearness_index: f64,
    pub category: SkyCategory,
    pub diffuse_fraction: f64,
}

/// Clear above 0.65, overcast below 0.35. The diffuse fraction is an
/// artifact-defined piecewise-linear correlation: 0.95 below 0.35, linear
/// to 0.15 at 0.65, 0.15 above.
pub fn classify_sky(k_t: f64) -> Result<SkyState> {
    if !(0.0..=1.0).contains(&k_t) {
        return invalid(format!("clearness index {k_t} outside [0, 1]"));
    }
    let category = if k_t > 0.65 {
        SkyCategory::Clear
    } else if k_t >= 0.35 {
        SkyCategory::PartlyCloudy
    } else {
        SkyCategory::Overcast
    };
    let diffuse_fraction = if k_t < 0.35 {
        0.95
    } else if k_t <= 0.65 {
        0.95 - (k_t - 0.35) / 0.30 * 0.80
    } else {
        0.15
    };
    Ok(SkyState { clearness_index: k_t, category, diffuse_fraction })
}

/// Accumulated dust on the panel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoilingState {
    pub mass_mg_cm2: f64,
    pub gamma_dust: f64,
    pub clean_transmission: f64,
}

impl SoilingState {
    pub fn initial(site: &SiteClimate) -> Self {
        Self { mass_mg_cm2: site.initial_dust_mg_cm2, gamma_dust: site.gamma_dust, clean_transmission: site.clean_transmission }
    }

    /// Equivalent film thickness (µm) at the assumed dust density.
    pub fn thickness_um(&self) -> f64 {
        self.mass_mg_cm2 * 1e-3 / DUST_DENSITY_G_CM3 * 1e4
    }
}

/// m += r_dep(1 − r_clean)·dt.
pub fn dust_step(state: &SoilingState, site: &SiteClimate, dt_days: f64) -> Result<SoilingState> {
    if !(dt_days >= 0.0) {
        return invalid("dt must be >= 0");
    }
    let mut s = *state;
    s.mass_mg_cm2 += site.dust_deposition * (1.0 - site.cleaning_fraction) * dt_days;
    Ok(s)
}

/// Scales the mass by (1 − wash_fraction).
pub fn dust_wash(state: &SoilingState, wash_fraction: f64) -> SoilingState {
    SoilingState { mass_mg_cm2: state.mass_mg_cm2 * (1.0 - wash_fraction), ..*state }
}

/// T₀·exp(−γ m), with m converted from mg·cm⁻² to g·m⁻² (×10).
pub fn dust_transmission(state: &SoilingState) -> f64 {
    state.clean_transmission * (-state.gamma_dust * 10.0 * state.mass_mg_cm2).exp()
}

/// Mean + annual + diurnal sinusoids. The annual term peaks near day 91
/// and the diurnal term at 15:00.
pub fn temperature_profile(site: &SiteClimate, day: f64, hour: f64) -> f64 {
    use std::f64::consts::TAU;
    site.temperature_mean_k
        + site.temperature_annual_amp_k * (TAU * day / 365.0).sin()
        + site.temperature_diurnal_amp_k * (TAU * (hour - 9.0) / 24.0).sin()
}

/// Relative-humidity proxy: annual cosine with its maximum at day 45.
pub fn humidity_profile(site: &SiteClimate, day: f64) -> f64 {
    site.humidity_mean + site.humidity_amp * (std::f64::consts::TAU * (day - 45.0) / 365.0).cos()
}

/// Settings of the year-long run beyond the site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualConfig {
    pub seed: u64,
    #[serde(default)]
    pub water: WaterVaporCurve,
    #[serde(default = "d_days")]
    pub days: u32,
}

fn d_days() -> u32 {
    365
}

impl AnnualConfig {
    pub fn new(seed: u64) -> Self {
        Self { seed, water: WaterVaporCurve::default(), days: 365 }
    }
}

/// One hourly ledger row. Relative metrics are `None` at night.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub day: u32,
    pub hour: u32,
    pub temp_k: f64,
    pub humidity: f64,
    pub dust_um: f64,
    pub rel_pce: Option<f64>,
    pub rel_etr: Option<f64>,
    pub dust_transmission: f64,
    /// Smallest atmospheric transmission over the grid at this hour.
    pub min_atmospheric_transmission: f64,
}

/// Daily means reported at the quarter marks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub label: String,
    pub day: u32,
    pub temp_k: f64,
    pub humidity: f64,
    pub dust_um: f64,
    pub rel_pce: f64,
    pub rel_etr: f64,
    pub pce: f64,
    pub etr: f64,
}

/// Published Day-0 row (comparison metadata only).
pub const REFERENCE_DAY0: (f64, f64) = (0.1688, 0.8936);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradationLedger {
    pub site: String,
    pub seed: u64,
    pub rows: Vec<LedgerRow>,
    pub summary: Vec<SummaryRow>,
    /// 100·(1 − last-day mean / first-day mean) of the daylight values.
    pub pce_degradation_pct: f64,
    pub etr_degradation_pct: f64,
    /// Clean-panel, reference-spectrum PCE and normalized ETR.
    pub reference_pce: f64,
    pub reference_etr: f64,
    pub sky_days: [usize; 3],
    pub reference_day0_pce_etr: (f64, f64),
    pub warnings: Vec<String>,
}

impl DegradationLedger {
    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut s = header_comment(config_hash) + "\n";
        s.push_str("day,hour,temp_K,humidity,dust_um,rel_pce,rel_etr\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.8}")).unwrap_or_default();
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{:.4},{:.4},{:.6},{},{}\n",
                r.day,
                r.hour,
                r.temp_k,
                r.humidity,
                r.dust_um,
                opt(r.rel_pce),
                opt(r.rel_etr)
            ));
        }
        s
    }
}

/// Per-hour spectral integrals on the solar grid with the design fixed.
struct Kernel {
    lambda: Vec<f64>,
    solar: Vec<f64>,
    absorbed_pv: Vec<f64>,
    pump: Vec<Vec<f64>>,
}

impl Kernel {
    fn new(ev: &Evaluator, design: &TransmissionProfile) -> Result<Self> {
        let lambda = ev.ctx.solar.wavelengths().to_vec();
        let solar = ev.ctx.solar.irradiance().to_vec();
        let mut absorbed_pv = Vec::with_capacity(lambda.len());
        for &l in &lambda {
            let eta = ev.ctx.pv.at(l).ok_or_else(|| crate::Error::InvalidInput(format!("PV curve does not cover {l} nm")))?;
            absorbed_pv.push((1.0 - design.transmission(l)) * eta);
        }
        let pump = ev
            .ctx
            .pumping
            .lineshapes
            .iter()
            .map(|ls| lambda.iter().map(|&l| ev.ctx.pumping.scale * ls.eval(l) * design.transmission(l)).collect())
            .collect();
        Ok(Self { lambda, solar, absorbed_pv, pump })
    }

    /// (PCE, normalized ETR) per unit incident irradiance for the spectrum
    /// solar × atm, behind a gray dust layer `t_dust`.
    fn metrics(&self, ev: &Evaluator, atm: &[f64], t_dust: f64) -> (f64, f64) {
        let incident: Vec<f64> = self.solar.iter().zip(atm).map(|(s, a)| s * a).collect();
        let total = trapezoid(&self.lambda, &incident);
        if !(total > 0.0) {
            return (0.0, 0.0);
        }
        let y: Vec<f64> = incident.iter().zip(&self.absorbed_pv).map(|(s, k)| s * k).collect();
        let pce = t_dust * trapezoid(&self.lambda, &y) / total;
        let ref_total = trapezoid(&self.lambda, &self.solar);
        let rates: Vec<f64> = self
            .pump
            .iter()
            .map(|p| {
                let y: Vec<f64> = incident.iter().zip(p).map(|(s, k)| s * k).collect();
                t_dust * trapezoid(&self.lambda, &y) * ref_total / total
            })
            .collect();
        (pce, ev.response.etr_for_rates(&rates).0)
    }
}

/// Hourly year-long simulation of one site for a fixed filter design.
///
/// The incident spectrum at each hour is the reference spectrum reshaped by
/// T_atm(λ, AM)/T_atm(λ, 1.5); both metrics are taken per unit incident
/// irradiance, so cloud cover and the diurnal intensity cycle cancel while
/// spectral reshaping and soiling remain. Temperature and humidity are
/// reported but do not feed back on the metrics.
pub fn annual_simulation(site: &SiteClimate, design: &TransmissionProfile, ev: &Evaluator, cfg: &AnnualConfig) -> Result<DegradationLedger> {
    site.validate()?;
    if cfg.days < 2 {
        return invalid("an annual run needs at least two days");
    }
    let kernel = Kernel::new(ev, design)?;
    let ones = vec![1.0; kernel.lambda.len()];
    let (ref_pce, ref_etr) = kernel.metrics(ev, &ones, 1.0);
    if !(ref_pce > 0.0 && ref_etr > 0.0) {
        return invalid("design has zero reference PCE or ETR; relative metrics undefined");
    }
    let site_seed = crate::io::config_hash(&site.name)?;
    let seed = cfg.seed ^ u64::from_str_radix(&site_seed[..16], 16).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");

    let water: Vec<f64> = kernel.lambda.iter().map(|&l| cfg.water.eval(l)).collect();
    let tau_at = |beta: f64| -> Vec<f64> {
        kernel
            .lambda
            .iter()
            .zip(&water)
            .map(|(&l, &k)| aerosol_optical_depth(l, beta, site.angstrom_alpha) + k * site.water_vapor_cm)
            .collect()
    };

    let mut soil = SoilingState::initial(site);
    let mut rows = Vec::with_capacity(cfg.days as usize * 24);
    let mut sky_days = [0usize; 3];
    for day in 0..cfg.days {
        let jitter = 1.0 + site.aod_jitter * normal.sample(&mut rng);
        let beta = (site.turbidity_beta * jitter).max(0.0);
        let kt = (site.clearness_mean + site.clearness_sigma * normal.sample(&mut rng)).clamp(0.0, 1.0);
        let sky = classify_sky(kt)?;
        sky_days[match sky.category {
            SkyCategory::Clear => 0,
            SkyCategory::PartlyCloudy => 1,
            SkyCategory::Overcast => 2,
        }] += 1;
        let tau = tau_at(beta);
        let humidity = humidity_profile(site, day as f64);
        for hour in 0..24u32 {
            if hour > 0 {
                soil = dust_step(&soil, site, 1.0 / 24.0)?;
            }
            let geo = sun_geometry(site.latitude_deg, day as f64, 15.0 * (hour as f64 - 12.0))?;
            let t_dust = dust_transmission(&soil);
            let (rel_pce, rel_etr, min_atm) = if geo.air_mass.is_finite() {
                let atm: Vec<f64> = tau.iter().map(|t| (-t * (geo.air_mass - 1.5)).exp()).collect();
                let min_atm = tau.iter().map(|t| (-t * geo.air_mass).exp()).fold(1.0, f64::min);
                let (p, e) = kernel.metrics(ev, &atm, t_dust);
                (Some(p / ref_pce), Some(e / ref_etr), min_atm)
            } else {
                (None, None, 0.0)
            };
            rows.push(LedgerRow {
                day,
                hour,
                temp_k: temperature_profile(site, day as f64, hour as f64),
                humidity,
                dust_um: soil.thickness_um(),
                rel_pce,
                rel_etr,
                dust_transmission: t_dust,
                min_atmospheric_transmission: min_atm,
            });
        }
        soil = dust_step(&soil, site, 1.0 / 24.0)?;
        if site.cleaning_events.washes_on(day) {
            soil = dust_wash(&soil, site.cleaning_events.wash_fraction);
        }
    }

    let daily = |day: u32| -> (f64, f64, f64, f64, f64) {
        let r: Vec<&LedgerRow> = rows.iter().filter(|r| r.day == day).collect();
        let lit: Vec<&&LedgerRow> = r.iter().filter(|r| r.rel_pce.is_some()).collect();
        let mean = |f: &dyn Fn(&LedgerRow) -> f64, v: &[&LedgerRow]| v.iter().map(|r| f(r)).sum::<f64>() / v.len().max(1) as f64;
        let lit_rows: Vec<&LedgerRow> = lit.iter().map(|r| **r).collect();
        (
            mean(&|r| r.temp_k, &r),
            mean(&|r| r.humidity, &r),
            mean(&|r| r.dust_um, &r),
            mean(&|r| r.rel_pce.unwrap_or(0.0), &lit_rows),
            mean(&|r| r.rel_etr.unwrap_or(0.0), &lit_rows),
        )
    };
    let last = cfg.days - 1;
    let marks: Vec<(String, u32)> = [("day 0", 0), ("Q1", 91), ("Q2", 182), ("Q3", 273), ("Q4", last)]
        .iter()
        .filter(|(_, d)| *d <= last)
        .map(|(l, d)| (format!("{l} (day {d})"), *d))
        .collect();
    let summary = marks
        .into_iter()
        .map(|(label, d)| {
            let (t, h, du, p, e) = daily(d);
            SummaryRow { label, day: d, temp_k: t, humidity: h, dust_um: du, rel_pce: p, rel_etr: e, pce: p * ref_pce, etr: e * ref_etr }
        })
        .collect();
    // Annual loss compares the first and last day under the nominal
    // atmosphere, so day-to-day turbidity noise does not enter it.
    let tau_nominal = tau_at(site.turbidity_beta);
    let nominal_day = |day: u32| -> (f64, f64) {
        let (mut p, mut e, mut n) = (0.0, 0.0, 0usize);
        for r in rows.iter().filter(|r| r.day == day && r.rel_pce.is_some()) {
            let am = sun_geometry(site.latitude_deg, day as f64, 15.0 * (r.hour as f64 - 12.0)).map(|g| g.air_mass).unwrap_or(f64::INFINITY);
            let atm: Vec<f64> = tau_nominal.iter().map(|t| (-t * (am - 1.5)).exp()).collect();
            let (pp, ee) = kernel.metrics(ev, &atm, r.dust_transmission);
            p += pp / ref_pce;
            e += ee / ref_etr;
            n += 1;
        }
        let n = n.max(1) as f64;
        (p / n, e / n)
    };
    let (p0, e0) = nominal_day(0);
    let (p1, e1) = nominal_day(last);
    let degr = |a: f64, b: f64| if a > 0.0 { 100.0 * (1.0 - b / a) } else { 0.0 };
    Ok(DegradationLedger {
        site: site.name.clone(),
        seed: cfg.seed,
        pce_degradation_pct: degr(p0, p1),
        etr_degradation_pct: degr(e0, e1),
        rows,
        summary,
        reference_pce: ref_pce,
        reference_etr: ref_etr,
        sky_days,
        reference_day0_pce_etr: REFERENCE_DAY0,
        warnings: site.warnings(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_sites_load() {
        let s = site_database();
        assert_eq!(s.len(), 9);
        for site in &s {
            site.validate().unwrap();
        }
    }

    #[test]
    fn sky_thresholds() {
        assert_eq!(classify_sky(0.70).unwrap().category, SkyCategory::Clear);
        assert_eq!(classify_sky(0.50).unwrap().category, SkyCategory::PartlyCloudy);
        assert_eq!(classify_sky(0.20).unwrap().category, SkyCategory::Overcast);
        assert!(classify_sky(1.2).is_err());
    }
}
