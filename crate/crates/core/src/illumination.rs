//! Solar spectra, OPV transmission filters, PCE and the conversion of
//! filtered light into exciton excitation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{invalid, Error, Result};
use crate::io::parse_numeric_csv;
use crate::system::ExcitonSystem;
use crate::units::{nm_to_wavenumber, wavenumber_to_nm};
use crate::{CMatrix, C64};

/// FWHM = 2√(2 ln 2)·σ.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949;

/// Photosynthetically active band (nm).
pub const PAR_BAND_NM: (f64, f64) = (400.0, 700.0);

const AM15G_CSV: &str = include_str!("../data/am15g.csv");

/// Trapezoidal ∫ y dx.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1])).sum()
}

/// Linear interpolation on an increasing grid; `None` outside [x₀, x_last].
pub fn interp_linear(x: &[f64], y: &[f64], at: f64) -> Option<f64> {
    if x.is_empty() || at < x[0] || at > x[x.len() - 1] {
        return None;
    }
    let i = x.partition_point(|&v| v <= at);
    if i == x.len() {
        return Some(y[x.len() - 1]);
    }
    if i == 0 {
        return Some(y[0]);
    }
    let (x0, x1) = (x[i - 1], x[i]);
    let t = (at - x0) / (x1 - x0);
    Some(y[i - 1] + t * (y[i] - y[i - 1]))
}

/// Spectral irradiance on a wavelength grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum")]
pub struct SolarSpectrum {
    wavelengths: Vec<f64>,
    irradiance: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSpectrum {
    wavelengths: Vec<f64>,
    irradiance: Vec<f64>,
}

impl TryFrom<RawSpectrum> for SolarSpectrum {
    type Error = Error;
    fn try_from(r: RawSpectrum) -> Result<Self> {
        SolarSpectrum::new(r.wavelengths, r.irradiance)
    }
}

impl SolarSpectrum {
    /// Wavelengths in nm (strictly increasing, inside [280, 4000]) and
    /// irradiance in W·m⁻²·nm⁻¹.
    pub fn new(wavelengths: Vec<f64>, irradiance: Vec<f64>) -> Result<Self> {
        if wavelengths.len() != irradiance.len() || wavelengths.len() < 2 {
            return invalid("spectrum needs at least two samples and equal-length columns");
        }
        for (i, w) in wavelengths.windows(2).enumerate() {
            if w[1] == w[0] {
                return invalid(format!("duplicate wavelength {} nm (row {})", w[1], i + 2));
            }
            if !(w[1] > w[0]) {
                return invalid(format!("wavelengths must increase: {} nm follows {} nm (row {})", w[1], w[0], i + 2));
            }
        }
        if !(wavelengths[0] >= 280.0 && wavelengths[wavelengths.len() - 1] <= 4000.0) {
            return invalid("spectrum wavelengths must lie within [280, 4000] nm");
        }
        if let Some(i) = irradiance.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
            return invalid(format!("irradiance must be finite and non-negative (row {})", i + 1));
        }
        Ok(Self { wavelengths, irradiance })
    }

    /// Bundled ASTM G173-03 AM1.5 global-tilt reference spectrum.
    pub fn am15g() -> Self {
        Self::parse_csv(AM15G_CSV).expect("bundled spectrum is valid")
    }

    /// Two-column CSV `wavelength_nm,irradiance_w_m2_nm`; `#` comments and
    /// a header line are allowed.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let rows = parse_numeric_csv(text, 2)?;
        let (w, v) = rows.into_iter().map(|r| (r[0], r[1])).unzip();
        Self::new(w, v)
    }

    pub fn wavelengths(&self) -> &[f64] {
        &self.wavelengths
    }

    pub fn irradiance(&self) -> &[f64] {
        &self.irradiance
    }

    pub fn len(&self) -> usize {
        self.wavelengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavelengths.is_empty()
    }

    /// Total irradiance (W·m⁻²).
    pub fn integral(&self) -> f64 {
        trapezoid(&self.wavelengths, &self.irradiance)
    }

    /// ∫ over [lo, hi], with the integrand interpolated at the band edges.
    pub fn band_integral(&self, lo: f64, hi: f64) -> f64 {
        let (w, v) = (&self.wavelengths, &self.irradiance);
        let lo = lo.max(w[0]);
        let hi = hi.min(w[w.len() - 1]);
        if !(hi > lo) {
            return 0.0;
        }
        let mut xs = vec![lo];
        let mut ys = vec![interp_linear(w, v, lo).unwrap_or(0.0)];
        for (x, y) in w.iter().zip(v) {
            if *x > lo && *x < hi {
                xs.push(*x);
                ys.push(*y);
            }
        }
        xs.push(hi);
        ys.push(interp_linear(w, v, hi).unwrap_or(0.0));
        trapezoid(&xs, &ys)
    }

    /// Irradiance at λ (linear interpolation, 0 outside the grid).
    pub fn at(&self, lambda_nm: f64) -> f64 {
        interp_linear(&self.wavelengths, &self.irradiance, lambda_nm).unwrap_or(0.0)
    }

    /// Same grid, irradiance multiplied pointwise by `f(λ)`.
    pub fn map_pointwise(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let irr = self.wavelengths.iter().zip(&self.irradiance).map(|(&l, &v)| f(l) * v).collect();
        Self::new(self.wavelengths.clone(), irr)
    }

    /// a·self + b·other on the grid of `self` (other interpolated).
    pub fn linear_combination(&self, a: f64, other: &SolarSpectrum, b: f64) -> Result<Self> {
        let irr = self.wavelengths.iter().zip(&self.irradiance).map(|(&l, &v)| a * v + b * other.at(l)).collect();
        Self::new(self.wavelengths.clone(), irr)
    }
}

/// Reads a solar spectrum CSV file.
pub fn load_solar_spectrum(path: &Path) -> Result<SolarSpectrum> {
    let text = std::fs::read_to_string(path)?;
    SolarSpectrum::parse_csv(&text)
}

/// Band integral [400, 700] nm over the total integral.
pub fn par_fraction(spectrum: &SolarSpectrum) -> f64 {
    let total = spectrum.integral();
    if total == 0.0 {
        return 0.0;
    }
    spectrum.band_integral(PAR_BAND_NM.0, PAR_BAND_NM.1) / total
}

/// One Gaussian transmission window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub center_nm: f64,
    pub fwhm_nm: f64,
    pub weight: f64,
}

impl Band {
    pub fn sigma_nm(&self) -> f64 {
        self.fwhm_nm / FWHM_PER_SIGMA
    }
}

/// Anything that maps a wavelength to a transmission in [0, 1].
pub trait Transmission {
    fn transmission(&self, lambda_nm: f64) -> f64;
}

/// T(λ) = T_peak Σ_i w_i exp(−(λ − c_i)²/2σ_i²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct TransmissionProfile {
    peak: f64,
    bands: Vec<Band>,
}

#[derive(Deserialize)]
struct RawProfile {
    peak: f64,
    bands: Vec<Band>,
}

impl TryFrom<RawProfile> for TransmissionProfile {
    type Error = Error;
    fn try_from(r: RawProfile) -> Result<Self> {
        TransmissionProfile::new(r.peak, r.bands)
    }
}

/// Tolerance on Σ w_i = 1.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

impl TransmissionProfile {
    pub fn new(peak: f64, bands: Vec<Band>) -> Result<Self> {
        if !(0.0..=1.0).contains(&peak) {
            return invalid(format!("T_peak must lie in [0, 1], got {peak}"));
        }
        if bands.is_empty() {
            return invalid("a transmission profile needs at least one band");
        }
        for b in &bands {
            if !(b.center_nm > 0.0 && b.center_nm.is_finite()) {
                return invalid("band centers must be positive");
            }
            if !(b.fwhm_nm > 0.0 && b.fwhm_nm.is_finite()) {
                return invalid("band FWHM must be positive");
            }
            if !(b.weight >= 0.0 && b.weight.is_finite()) {
                return invalid("band weights must be non-negative");
            }
        }
        let sum: f64 = bands.iter().map(|b| b.weight).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return invalid(format!("band weights must sum to 1, got {sum}"));
        }
        Ok(Self { peak, bands })
    }

    pub fn single(peak: f64, center_nm: f64, fwhm_nm: f64) -> Result<Self> {
        Self::new(peak, vec![Band { center_nm, fwhm_nm, weight: 1.0 }])
    }

    /// Bands with arbitrary non-negative weights, renormalized to sum to 1.
    pub fn normalized(peak: f64, mut bands: Vec<Band>) -> Result<Self> {
        let sum: f64 = bands.iter().map(|b| b.weight).sum();
        if !(sum > 0.0) {
            return invalid("at least one band weight must be positive");
        }
        for b in &mut bands {
            b.weight /= sum;
        }
        Self::new(peak, bands)
    }

    pub fn peak(&self) -> f64 {
        self.peak
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn with_peak(&self, peak: f64) -> Result<Self> {
        Self::new(peak, self.bands.clone())
    }
}

impl Transmission for TransmissionProfile {
    fn transmission(&self, lambda_nm: f64) -> f64 {
        transmission_eval(lambda_nm, self)
    }
}

/// Wavelength-independent transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform(pub f64);

impl Transmission for Uniform {
    fn transmission(&self, _lambda_nm: f64) -> f64 {
        self.0.clamp(0.0, 1.0)
    }
}

pub fn transmission_eval(lambda_nm: f64, profile: &TransmissionProfile) -> f64 {
    let s: f64 = profile
        .bands
        .iter()
        .map(|b| {
            let sig = b.sigma_nm();
            let d = lambda_nm - b.center_nm;
            b.weight * (-d * d / (2.0 * sig * sig)).exp()
        })
        .sum();
    (profile.peak * s).clamp(0.0, 1.0)
}

/// J_plant = T × J_solar on the solar grid.
pub fn filtered_spectrum(profile: &impl Transmission, solar: &SolarSpectrum) -> SolarSpectrum {
    solar.map_pointwise(|l| profile.transmission(l)).expect("transmission lies in [0, 1]")
}

/// Wavelength-dependent PV conversion efficiency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPv")]
pub struct PVEfficiencyCurve {
    wavelengths: Vec<f64>,
    efficiency: Vec<f64>,
}

#[derive(Deserialize)]
struct RawPv {
    wavelengths: Vec<f64>,
    efficiency: Vec<f64>,
}

impl TryFrom<RawPv> for PVEfficiencyCurve {
    type Error = Error;
    fn try_from(r: RawPv) -> Result<Self> {
        PVEfficiencyCurve::new(r.wavelengths, r.efficiency)
    }
}

/// Flat efficiency of the default curve inside its absorption window.
pub const DEFAULT_PV_EFFICIENCY: f64 = 0.35;
/// Absorption window of the default curve (nm).
pub const DEFAULT_PV_WINDOW_NM: (f64, f64) = (300.0, 900.0);

impl PVEfficiencyCurve {
    pub fn new(wavelengths: Vec<f64>, efficiency: Vec<f64>) -> Result<Self> {
        if wavelengths.len() != efficiency.len() || wavelengths.len() < 2 {
            return invalid("efficiency curve needs at least two samples and equal-length columns");
        }
        if wavelengths.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("efficiency curve wavelengths must be strictly increasing");
        }
        if efficiency.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return invalid("efficiencies must lie in [0, 1]");
        }
        Ok(Self { wavelengths, efficiency })
    }

    /// Constant efficiency over [280, 4000] nm.
    pub fn flat(eta: f64) -> Result<Self> {
        Self::new(vec![280.0, 4000.0], vec![eta, eta])
    }

    /// Flat `eta` inside [lo, hi] nm and zero elsewhere on [280, 4000].
    pub fn windowed(eta: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(280.0 < lo && lo < hi && hi < 4000.0) {
            return invalid("window must lie strictly inside [280, 4000] nm");
        }
        let edge = 1e-6;
        Self::new(
            vec![280.0, lo - edge, lo, hi, hi + edge, 4000.0],
            vec![0.0, 0.0, eta, eta, 0.0, 0.0],
        )
    }

    /// Flat 0.35 over 300–900 nm.
    pub fn default_curve() -> Self {
        Self::windowed(DEFAULT_PV_EFFICIENCY, DEFAULT_PV_WINDOW_NM.0, DEFAULT_PV_WINDOW_NM.1).unwrap()
    }

    /// CSV `wavelength_nm,efficiency`.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let rows = parse_numeric_csv(text, 2)?;
        let (w, e) = rows.into_iter().map(|r| (r[0], r[1])).unzip();
        Self::new(w, e)
    }

    pub fn wavelengths(&self) -> &[f64] {
        &self.wavelengths
    }

    pub fn efficiency(&self) -> &[f64] {
        &self.efficiency
    }

    pub fn at(&self, lambda_nm: f64) -> Option<f64> {
        interp_linear(&self.wavelengths, &self.efficiency, lambda_nm)
    }
}

/// ∫[1 − T]J η dλ / ∫J dλ on the solar grid.
pub fn pce(profile: &impl Transmission, solar: &SolarSpectrum, pv: &PVEfficiencyCurve) -> Result<f64> {
    let w = solar.wavelengths();
    let mut y = Vec::with_capacity(w.len());
    for (&l, &j) in w.iter().zip(solar.irradiance()) {
        let eta = pv
            .at(l)
            .ok_or_else(|| Error::InvalidInput(format!("PV efficiency curve does not cover {l} nm")))?;
        y.push((1.0 - profile.transmission(l)) * j * eta);
    }
    let total = solar.integral();
    if !(total > 0.0) {
        return invalid("solar spectrum integrates to zero");
    }
    Ok(trapezoid(w, &y) / total)
}

/// Largest PCE reachable with the given curve (opaque panel, T ≡ 0).
pub fn pce_max(solar: &SolarSpectrum, pv: &PVEfficiencyCurve) -> Result<f64> {
    pce(&Uniform(0.0), solar, pv)
}

/// Fraction of PAR energy that passes the filter.
pub fn transmitted_par_fraction(profile: &impl Transmission, solar: &SolarSpectrum) -> f64 {
    let par = solar.band_integral(PAR_BAND_NM.0, PAR_BAND_NM.1);
    if par == 0.0 {
        return 0.0;
    }
    filtered_spectrum(profile, solar).band_integral(PAR_BAND_NM.0, PAR_BAND_NM.1) / par
}

/// Absorption lineshape of one exciton state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lineshape {
    pub center_nm: f64,
    /// Gaussian standard deviation (nm).
    pub width_nm: f64,
    /// Relative absorption cross-section.
    pub cross_section: f64,
}

impl Lineshape {
    /// cross_section × unit-area Gaussian.
    pub fn eval(&self, lambda_nm: f64) -> f64 {
        let d = (lambda_nm - self.center_nm) / self.width_nm;
        self.cross_section * (-0.5 * d * d).exp() / (self.width_nm * (2.0 * std::f64::consts::PI).sqrt())
    }
}

/// Light-to-exciton coupling: one lineshape per exciton state (ascending
/// energy) and a rate per unit spectral overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpingModel {
    pub lineshapes: Vec<Lineshape>,
    /// ps⁻¹ per W·m⁻² of overlap.
    pub scale: f64,
}

/// Default absorption width (σ, nm) of an exciton line.
pub const DEFAULT_LINE_WIDTH_NM: f64 = 5.0;

impl PumpingModel {
    /// Identical unit cross-sections centred on the exciton transition
    /// wavelengths of `system`.
    pub fn for_system(system: &ExcitonSystem, width_nm: f64) -> Result<Self> {
        if !(width_nm > 0.0) {
            return invalid("line width must be positive");
        }
        let (e, _) = system.exciton_basis();
        let lineshapes = e
            .iter()
            .map(|&nu| Lineshape { center_nm: wavenumber_to_nm(nu), width_nm, cross_section: 1.0 })
            .collect();
        Ok(Self { lineshapes, scale: 1.0 })
    }

    pub fn validate(&self, n_states: usize) -> Result<()> {
        if self.lineshapes.len() != n_states {
            return invalid(format!("pumping model has {} lineshapes for {n_states} exciton states", self.lineshapes.len()));
        }
        if self.lineshapes.iter().any(|l| !(l.width_nm > 0.0 && l.cross_section >= 0.0)) {
            return invalid("lineshape widths must be positive and cross-sections non-negative");
        }
        if !(self.scale >= 0.0 && self.scale.is_finite()) {
            return invalid("pump scale must be finite and >= 0");
        }
        Ok(())
    }
}

/// rate_n = scale·∫A_n(λ)J(λ)dλ for each exciton state n (ps⁻¹).
pub fn pumping_rates(plant: &SolarSpectrum, system: &ExcitonSystem, model: &PumpingModel) -> Result<Vec<f64>> {
    model.validate(system.n_sites())?;
    let w = plant.wavelengths();
    Ok(model
        .lineshapes
        .iter()
        .map(|ls| {
            let y: Vec<f64> = w.iter().zip(plant.irradiance()).map(|(&l, &j)| ls.eval(l) * j).collect();
            model.scale * trapezoid(w, &y)
        })
        .collect())
}

/// Σ_n w_n |e_n⟩⟨e_n| in the site basis with w ∝ `rates`.
pub fn exciton_mixture(system: &ExcitonSystem, rates: &[f64]) -> Result<DensityMatrix> {
    let n = system.n_sites();
    if rates.len() != n {
        return invalid("one rate per exciton state required");
    }
    let total: f64 = rates.iter().sum();
    if !(total > 0.0) || rates.iter().any(|r| *r < 0.0) {
        return Err(Error::Unavailable("no excitation: all pumping rates are zero".into()));
    }
    let (_, u) = system.exciton_basis();
    let m = CMatrix::from_fn(n, n, |i, j| {
        C64::new((0..n).map(|a| rates[a] / total * u[(i, a)] * u[(j, a)]).sum(), 0.0)
    });
    DensityMatrix::new(m)
}

/// Nearest vibronic sideband (exciton energy ± mode quantum) to one filter band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceEntry {
    pub center_nm: f64,
    pub filter_cm: f64,
    pub exciton: usize,
    pub mode: usize,
    /// +1 for E + ω_k, −1 for E − ω_k.
    pub sign: i8,
    pub detuning_cm: f64,
}

/// Detuning report of each band against the sidebands E_a ± ω_k. A
/// diagnostic only; it never constrains a design.
pub fn resonance_report(
    profile: &TransmissionProfile,
    system: &ExcitonSystem,
    bath: &crate::bath::BathSpec,
) -> Vec<ResonanceEntry> {
    let (e, _) = system.exciton_basis();
    profile
        .bands()
        .iter()
        .filter_map(|b| {
            let f = nm_to_wavenumber(b.center_nm);
            let mut best: Option<ResonanceEntry> = None;
            for (a, &ea) in e.iter().enumerate() {
                for (k, m) in bath.vibronic_modes().iter().enumerate() {
                    for sign in [1i8, -1] {
                        let det = f - (ea + sign as f64 * m.omega);
                        if best.as_ref().is_none_or(|x| det.abs() < x.detuning_cm.abs()) {
                            best = Some(ResonanceEntry {
                                center_nm: b.center_nm,
                                filter_cm: f,
                                exciton: a,
                                mode: k,
                                sign,
                                detuning_cm: det,
                            });
                        }
                    }
                }
            }
            best
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_edges() {
        let x = [1.0, 2.0, 4.0];
        let y = [0.0, 1.0, 3.0];
        assert_eq!(interp_linear(&x, &y, 1.0), Some(0.0));
        assert_eq!(interp_linear(&x, &y, 4.0), Some(3.0));
        assert_eq!(interp_linear(&x, &y, 3.0), Some(2.0));
        assert_eq!(interp_linear(&x, &y, 4.5), None);
    }

    #[test]
    fn band_integral_of_linear_function_is_exact() {
        let s = SolarSpectrum::new(vec![300.0, 500.0, 900.0], vec![0.0, 2.0, 6.0]).unwrap();
        let got = s.band_integral(400.0, 700.0);
        let direct = trapezoid(&[400.0, 500.0, 700.0], &[1.0, 2.0, 4.0]);
        assert!((got - direct).abs() < 1e-12);
    }

    #[test]
    fn weights_must_be_normalized() {
        let b = Band { center_nm: 700.0, fwhm_nm: 80.0, weight: 0.6 };
        assert!(TransmissionProfile::new(0.5, vec![b]).is_err());
        assert!(TransmissionProfile::normalized(0.5, vec![b]).is_ok());
    }

    #[test]
    fn windowed_curve_has_sharp_edges() {
        let pv = PVEfficiencyCurve::default_curve();
        assert_eq!(pv.at(299.0), Some(0.0));
        assert_eq!(pv.at(300.0), Some(0.35));
        assert_eq!(pv.at(900.0), Some(0.35));
        assert_eq!(pv.at(901.0), Some(0.0));
    }
}
