//! Structured harmonic baths: spectral densities and exponential
//! decompositions of the bath correlation function.
//!
//! Two spectral densities live here. [`spectral_density_eval`] is the closed
//! form used for reporting (Drude term plus one Lorentzian peak per mode).
//! The dynamics use [`coupling_density`], which keeps the Drude term and
//! replaces each mode peak by the odd, antisymmetrized Lorentzian whose
//! reorganization energy is exactly `λ_k = S_k ω_k`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::units::{beta, fs_to_internal};
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// One underdamped intramolecular mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VibronicMode {
    /// Mode frequency ω_k (cm⁻¹).
    pub omega: f64,
    /// Huang–Rhys factor S_k.
    pub huang_rhys: f64,
    /// Damping γ_k (cm⁻¹).
    pub gamma: f64,
}

impl VibronicMode {
    pub fn new(omega: f64, huang_rhys: f64, gamma: f64) -> Self {
        Self { omega, huang_rhys, gamma }
    }

    /// λ_k = S_k ω_k.
    pub fn reorganization(&self) -> f64 {
        self.huang_rhys * self.omega
    }
}

/// FMO vibronic modes (ω, S, γ).
pub const FMO_VIBRONIC_MODES: [(f64, f64, f64); 4] =
    [(150.0, 0.05, 10.0), (200.0, 0.02, 10.0), (575.0, 0.01, 20.0), (1185.0, 0.005, 30.0)];
pub const FMO_DRUDE_LAMBDA: f64 = 35.0;
pub const FMO_DRUDE_GAMMA: f64 = 50.0;
pub const PHYSIOLOGICAL_TEMPERATURE: f64 = 295.0;

/// Drude–Lorentz plus underdamped-mode environment at temperature T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBath")]
pub struct BathSpec {
    drude_lambda: f64,
    drude_gamma: f64,
    vibronic_modes: Vec<VibronicMode>,
    temperature: f64,
}

#[derive(Deserialize)]
struct RawBath {
    drude_lambda: f64,
    drude_gamma: f64,
    #[serde(default)]
    vibronic_modes: Vec<VibronicMode>,
    temperature: f64,
}

impl TryFrom<RawBath> for BathSpec {
    type Error = Error;
    fn try_from(r: RawBath) -> Result<Self> {
        BathSpec::new(r.drude_lambda, r.drude_gamma, r.vibronic_modes, r.temperature)
    }
}

impl BathSpec {
    pub fn new(drude_lambda: f64, drude_gamma: f64, vibronic_modes: Vec<VibronicMode>, temperature: f64) -> Result<Self> {
        if !(drude_lambda >= 0.0 && drude_lambda.is_finite()) {
            return invalid("drude_lambda must be finite and >= 0");
        }
        if !(drude_gamma > 0.0 && drude_gamma.is_finite()) {
            return invalid("drude_gamma must be finite and > 0");
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return invalid("temperature must be finite and > 0");
        }
        for (k, m) in vibronic_modes.iter().enumerate() {
            if !(m.omega > 0.0 && m.gamma > 0.0 && m.omega.is_finite() && m.gamma.is_finite()) {
                return invalid(format!("mode {k}: frequency and damping must be > 0"));
            }
            if !(m.huang_rhys >= 0.0 && m.huang_rhys.is_finite()) {
                return invalid(format!("mode {k}: Huang-Rhys factor must be >= 0"));
            }
        }
        Ok(Self { drude_lambda, drude_gamma, vibronic_modes, temperature })
    }

    /// Drude λ = 35 cm⁻¹, γ = 50 cm⁻¹, four FMO modes, 295 K.
    pub fn fmo_default() -> Self {
        let modes = FMO_VIBRONIC_MODES.iter().map(|&(w, s, g)| VibronicMode::new(w, s, g)).collect();
        Self::new(FMO_DRUDE_LAMBDA, FMO_DRUDE_GAMMA, modes, PHYSIOLOGICAL_TEMPERATURE).unwrap()
    }

    pub fn drude_only(lambda: f64, gamma: f64, temperature: f64) -> Result<Self> {
        Self::new(lambda, gamma, Vec::new(), temperature)
    }

    pub fn drude_lambda(&self) -> f64 {
        self.drude_lambda
    }

    pub fn drude_gamma(&self) -> f64 {
        self.drude_gamma
    }

    pub fn vibronic_modes(&self) -> &[VibronicMode] {
        &self.vibronic_modes
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn beta(&self) -> f64 {
        beta(self.temperature)
    }

    pub fn mode_reorganizations(&self) -> Vec<f64> {
        self.vibronic_modes.iter().map(VibronicMode::reorganization).collect()
    }

    /// λ_D + Σ S_k ω_k.
    pub fn total_reorganization(&self) -> f64 {
        self.drude_lambda + self.mode_reorganizations().iter().sum::<f64>()
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        Self::new(self.drude_lambda, self.drude_gamma, self.vibronic_modes.clone(), temperature)
    }

    pub fn with_drude_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda, self.drude_gamma, self.vibronic_modes.clone(), self.temperature)
    }

    pub fn without_modes(&self) -> Self {
        Self { vibronic_modes: Vec::new(), ..self.clone() }
    }

    /// Scales λ, γ and every mode frequency/damping by `factor`
    /// (Huang–Rhys factors are kept, so mode reorganizations scale too).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let modes = self
            .vibronic_modes
            .iter()
            .map(|m| VibronicMode::new(m.omega * factor, m.huang_rhys, m.gamma * factor))
            .collect();
        Self::new(self.drude_lambda * factor, self.drude_gamma * factor, modes, self.temperature)
    }
}

/// Drude part 2λγω/(ω²+γ²).
pub fn drude_spectral_density(omega: f64, bath: &BathSpec) -> f64 {
    let (l, g) = (bath.drude_lambda, bath.drude_gamma);
    2.0 * l * g * omega / (omega * omega + g * g)
}

/// Σ 2λ_k ω_k² γ_k / ((ω − ω_k)² + γ_k²).
pub fn mode_spectral_density(omega: f64, bath: &BathSpec) -> f64 {
    bath.vibronic_modes
        .iter()
        .map(|m| {
            let d = omega - m.omega;
            2.0 * m.reorganization() * m.omega * m.omega * m.gamma / (d * d + m.gamma * m.gamma)
        })
        .sum()
}

/// J(ω) = Drude term + Lorentzian mode peaks (cm⁻¹), for ω ≥ 0.
pub fn spectral_density_eval(omega: f64, bath: &BathSpec) -> Result<f64> {
    if !(omega >= 0.0) {
        return invalid(format!("spectral density requires omega >= 0, got {omega}"));
    }
    Ok(drude_spectral_density(omega, bath) + mode_spectral_density(omega, bath))
}

/// Prefactor A_k = λ_k(ω_k² + γ_k²)/ω_k of the antisymmetrized Lorentzian.
fn mode_amplitude(m: &VibronicMode) -> f64 {
    m.reorganization() * (m.omega * m.omega + m.gamma * m.gamma) / m.omega
}

/// Spectral density driving the dynamics, odd in ω.
///
/// Drude term plus A_k[γ_k/((ω−ω_k)²+γ_k²) − γ_k/((ω+ω_k)²+γ_k²)] per mode,
/// normalized so (1/π)∫₀^∞ J_k(ω)/ω dω = S_k ω_k.
pub fn coupling_density(omega: f64, bath: &BathSpec) -> f64 {
    coupling_density_complex(C64::new(omega, 0.0), bath).re
}

/// Contribution of a single mode to [`coupling_density`].
pub fn mode_coupling_density(omega: f64, mode: &VibronicMode) -> f64 {
    let g = mode.gamma;
    let a = mode_amplitude(mode);
    let dm = omega - mode.omega;
    let dp = omega + mode.omega;
    a * (g / (dm * dm + g * g) - g / (dp * dp + g * g))
}

fn coupling_density_complex(z: C64, bath: &BathSpec) -> C64 {
    let (l, g) = (bath.drude_lambda, bath.drude_gamma);
    let mut j = 2.0 * l * g * z / (z * z + g * g);
    for m in &bath.vibronic_modes {
        let a = mode_amplitude(m);
        let dm = z - m.omega;
        let dp = z + m.omega;
        j += a * (m.gamma / (dm * dm + m.gamma * m.gamma) - m.gamma / (dp * dp + m.gamma * m.gamma));
    }
    j
}

/// How the poles of the Bose function are represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Decomposition {
    /// Matsubara frequencies ν_j = 2πj/β.
    Matsubara,
    /// [N−1/N] Padé spectrum decomposition of the Bose function.
    #[default]
    Pade,
}

/// Origin of an exponential term in C(t).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    /// Pole of the Drude term at ω = −iγ.
    Drude,
    /// Pole of mode `mode` at ±ω_k − iγ_k (`positive` selects +ω_k).
    Mode { mode: usize, positive: bool },
    /// Thermal pole of the Bose function (Matsubara or Padé).
    Thermal { index: usize },
}

/// c·exp(−ν t) with t in internal units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    pub coeff: C64,
    pub rate: C64,
    pub kind: TermKind,
}

impl ExpTerm {
    pub fn is_thermal(&self) -> bool {
        matches!(self.kind, TermKind::Thermal { .. })
    }
}

/// C(t) = Σ_k c_k exp(−ν_k t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationExpansion {
    pub terms: Vec<ExpTerm>,
    pub decomposition: Decomposition,
    pub beta: f64,
}

/// Poles (ξ_j, η_j) of the Bose function 1/(1 − e^{−x}) ≈ 1/x + 1/2 + Σ 2η_j x/(x² + ξ_j²).
pub fn bose_poles(n: usize, decomposition: Decomposition) -> Vec<(f64, f64)> {
    match decomposition {
        Decomposition::Matsubara => (1..=n).map(|j| (2.0 * PI * j as f64, 1.0)).collect(),
        Decomposition::Pade => pade_poles(n),
    }
}

/// 2/e for the `count` largest eigenvalues e of a symmetric matrix, ascending.
fn inverse_top_eigs(m: DMatrix<f64>, count: usize) -> Vec<f64> {
    let eig = SymmetricEigen::new(m);
    let mut e: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| b.total_cmp(a));
    let mut v: Vec<f64> = e.into_iter().take(count).map(|x| 2.0 / x).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// [N−1/N] Padé spectrum decomposition of the Bose function.
pub fn pade_poles(n: usize) -> Vec<(f64, f64)> {
    if n == 0 {
        return Vec::new();
    }
    let b = |m: usize| (2 * m + 1) as f64;
    let size = 2 * n;
    let mut lam = DMatrix::zeros(size, size);
    for m in 1..size {
        let v = 1.0 / (b(m) * b(m + 1)).sqrt();
        lam[(m - 1, m)] = v;
        lam[(m, m - 1)] = v;
    }
    let xi = inverse_top_eigs(lam, n);
    let size2 = 2 * n - 1;
    let mut lam2 = DMatrix::zeros(size2, size2);
    for m in 1..size2 {
        let v = 1.0 / (b(m + 1) * b(m + 2)).sqrt();
        lam2[(m - 1, m)] = v;
        lam2[(m, m - 1)] = v;
    }
    let zeta = inverse_top_eigs(lam2, n - 1);
    let prefactor = n as f64 * b(n + 1) / 2.0;
    (0..n)
        .map(|j| {
            let x2 = xi[j] * xi[j];
            // paired ratios keep the products finite for large n
            let ratio: f64 = zeta
                .iter()
                .zip((0..n).filter(|&k| k != j))
                .map(|(z, k)| (z * z - x2) / (xi[k] * xi[k] - x2))
                .product();
            (xi[j], prefactor * ratio)
        })
        .collect()
}

/// Pole-expanded Bose function evaluated at complex x.
pub fn bose_expanded(x: C64, poles: &[(f64, f64)]) -> C64 {
    let mut f = 1.0 / x + 0.5;
    for &(xi, eta) in poles {
        f += 2.0 * eta * x / (x * x + xi * xi);
    }
    f
}

impl CorrelationExpansion {
    /// Exponential expansion of C(t) for the bath's coupling density with
    /// `n_thermal` Bose-function poles.
    pub fn new(bath: &BathSpec, n_thermal: usize, decomposition: Decomposition) -> Self {
        let beta = bath.beta();
        let poles = bose_poles(n_thermal, decomposition);
        let occupation = |z: C64| -> C64 {
            match decomposition {
                Decomposition::Matsubara => 1.0 / (1.0 - (-beta * z).exp()),
                Decomposition::Pade => bose_expanded(beta * z, &poles),
            }
        };
        let mut terms = Vec::new();
        // For a pole p of J in the lower half plane with residue r, the
        // contribution is −2i r n(p) e^{−i p t}.
        if bath.drude_lambda > 0.0 {
            let g = bath.drude_gamma;
            let p = C64::new(0.0, -g);
            let r = bath.drude_lambda * g;
            terms.push(ExpTerm { coeff: -2.0 * I * r * occupation(p), rate: I * p, kind: TermKind::Drude });
        }
        for (k, m) in bath.vibronic_modes.iter().enumerate() {
            if m.huang_rhys == 0.0 {
                continue;
            }
            let a = mode_amplitude(m);
            for (positive, sign) in [(true, 1.0), (false, -1.0)] {
                let p = C64::new(sign * m.omega, -m.gamma);
                let r = sign * I * a / 2.0;
                terms.push(ExpTerm {
                    coeff: -2.0 * I * r * occupation(p),
                    rate: I * p,
                    kind: TermKind::Mode { mode: k, positive },
                });
            }
        }
        for (j, &(xi, eta)) in poles.iter().enumerate() {
            let nu = xi / beta;
            let c = -2.0 * I / beta * eta * coupling_density_complex(C64::new(0.0, -nu), bath);
            terms.push(ExpTerm { coeff: c, rate: C64::new(nu, 0.0), kind: TermKind::Thermal { index: j } });
        }
        Self { terms, decomposition, beta }
    }

    /// C(t) for t given in internal units (cm).
    pub fn eval_internal(&self, t: f64) -> C64 {
        self.terms.iter().map(|k| k.coeff * (-k.rate * t).exp()).sum()
    }

    /// C(t) for t in fs, t ≥ 0.
    pub fn eval(&self, t_fs: f64) -> C64 {
        self.eval_internal(fs_to_internal(t_fs))
    }

    /// Γ(ω) = ∫₀^∞ C(t) e^{iωt} dt = Σ c_k/(ν_k − iω).
    pub fn half_fourier(&self, omega: f64) -> C64 {
        self.terms.iter().map(|k| k.coeff / (k.rate - I * omega)).sum()
    }

    /// Lineshape function g(t) = ∫₀^t∫₀^s C(u) du ds, t in fs.
    pub fn lineshape(&self, t_fs: f64) -> C64 {
        let t = fs_to_internal(t_fs);
        self.terms
            .iter()
            .map(|k| k.coeff / (k.rate * k.rate) * ((-k.rate * t).exp() + k.rate * t - 1.0))
            .sum()
    }

    /// Index of the term whose rate is the complex conjugate of term `k`'s.
    pub fn conjugate_partner(&self, k: usize) -> usize {
        let target = self.terms[k].rate.conj();
        let mut best = k;
        let mut best_d = f64::INFINITY;
        for (j, t) in self.terms.iter().enumerate() {
            let d = (t.rate - target).norm();
            if d < best_d {
                best = j;
                best_d = d;
            }
        }
        best
    }

    /// c̄_k such that C*(t) = Σ c̄_k e^{−ν_k t}.
    pub fn conjugate_coeffs(&self) -> Vec<C64> {
        (0..self.terms.len()).map(|k| self.terms[self.conjugate_partner(k)].coeff.conj()).collect()
    }
}

/// C(t) for t ≥ 0 (fs), using the Padé decomposition with `n_matsubara`
/// thermal poles.
pub fn bath_correlation(t_fs: f64, bath: &BathSpec, n_matsubara: usize) -> Result<C64> {
    if !(t_fs >= 0.0) {
        return invalid(format!("bath correlation requires t >= 0, got {t_fs}"));
    }
    Ok(CorrelationExpansion::new(bath, n_matsubara, Decomposition::Pade).eval(t_fs))
}

/// C(t) on the whole real line, C(−t) = C(t)*.
pub fn bath_correlation_extended(t_fs: f64, bath: &BathSpec, n_matsubara: usize) -> C64 {
    let c = CorrelationExpansion::new(bath, n_matsubara, Decomposition::Pade).eval(t_fs.abs());
    if t_fs < 0.0 {
        c.conj()
    } else {
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pade_reproduces_bose_function() {
        let poles = pade_poles(12);
        for x in [0.05, 0.5, 1.0, 3.0, 10.0, 30.0] {
            let exact = 1.0 / (1.0 - f64::exp(-x));
            let approx = bose_expanded(C64::new(x, 0.0), &poles).re;
            assert!((approx - exact).abs() < 1e-8 * exact, "x={x}: {approx} vs {exact}");
        }
    }

    #[test]
    fn low_pade_poles_match_matsubara() {
        let poles = pade_poles(12);
        for (j, &(xi, eta)) in poles.iter().take(4).enumerate() {
            assert!((xi - 2.0 * PI * (j + 1) as f64).abs() < 1e-6);
            assert!((eta - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn drude_pole_coefficient_is_cot_form() {
        let bath = BathSpec::drude_only(35.0, 50.0, 295.0).unwrap();
        let exp = CorrelationExpansion::new(&bath, 0, Decomposition::Matsubara);
        let b = bath.beta();
        let c = exp.terms[0].coeff;
        let expected = C64::new(35.0 * 50.0 / (b * 50.0 / 2.0).tan(), -35.0 * 50.0);
        assert!((c - expected).norm() < 1e-9 * expected.norm());
    }

    #[test]
    fn matsubara_drude_coefficients() {
        let bath = BathSpec::drude_only(35.0, 50.0, 295.0).unwrap();
        let exp = CorrelationExpansion::new(&bath, 3, Decomposition::Matsubara);
        let b = bath.beta();
        for j in 1..=3 {
            let nu = 2.0 * PI * j as f64 / b;
            let c = 4.0 * 35.0 * 50.0 * nu / (b * (nu * nu - 2500.0));
            let t = exp.terms[j];
            assert!((t.rate.re - nu).abs() < 1e-9);
            assert!((t.coeff.re - c).abs() < 1e-9 * c.abs() && t.coeff.im.abs() < 1e-9);
        }
    }

    #[test]
    fn reorganization_of_coupling_density() {
        // (1/π)∫ J_k(ω)/ω dω via a fine midpoint rule
        let m = VibronicMode::new(575.0, 0.01, 20.0);
        let dw = 0.01;
        let mut s = 0.0;
        let mut w = dw / 2.0;
        while w < 2.0e5 {
            s += mode_coupling_density(w, &m) / w * dw;
            w += dw;
        }
        assert!((s / PI - 5.75).abs() < 2e-3, "{}", s / PI);
    }

    #[test]
    fn markovian_dephasing_rate_is_slope_over_beta() {
        let bath = BathSpec::drude_only(35.0, 50.0, 295.0).unwrap();
        let exp = CorrelationExpansion::new(&bath, 40, Decomposition::Pade);
        let re = exp.half_fourier(0.0).re;
        let expected = 2.0 * 35.0 / (bath.beta() * 50.0);
        assert!((re - expected).abs() < 1e-6 * expected);
    }

    #[test]
    fn conjugate_partners() {
        let exp = CorrelationExpansion::new(&BathSpec::fmo_default(), 4, Decomposition::Pade);
        for k in 0..exp.terms.len() {
            let p = exp.conjugate_partner(k);
            assert!((exp.terms[p].rate - exp.terms[k].rate.conj()).norm() < 1e-9);
        }
    }
}
