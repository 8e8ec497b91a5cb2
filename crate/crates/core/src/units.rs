//! Unit conventions.
//!
//! Energies are wavenumbers (cm⁻¹) with ħ = 1/(2πc) absorbed, so an energy
//! `E` in cm⁻¹ is also an angular frequency `E · 2πc`. Internally the
//! propagators work with time expressed in cm (i.e. `t_fs * CM_PER_FS`), which
//! makes `exp(-i E t)` dimensionless.

use std::f64::consts::PI;

/// Speed of light in cm/fs.
pub const SPEED_OF_LIGHT_CM_PER_FS: f64 = 2.997_924_58e-5;

/// Angular frequency of 1 cm⁻¹ in rad/fs (2π · 0.0299792458 rad/ps).
pub const CM_PER_FS: f64 = 2.0 * PI * SPEED_OF_LIGHT_CM_PER_FS;

/// Boltzmann constant in cm⁻¹/K.
pub const KB_CM_PER_K: f64 = 0.695_034;

/// Planck constant times speed of light, in eV·nm (photon energy conversion).
pub const HC_EV_NM: f64 = 1_239.841_984;

/// Converts a time in fs to the internal time unit.
pub fn fs_to_internal(t_fs: f64) -> f64 {
    t_fs * CM_PER_FS
}

/// Converts a rate in cm⁻¹ to ps⁻¹.
pub fn wavenumber_to_rate_per_ps(rate_cm: f64) -> f64 {
    rate_cm * CM_PER_FS * 1000.0
}

/// Converts a rate in ps⁻¹ to cm⁻¹.
pub fn rate_per_ps_to_wavenumber(rate_ps: f64) -> f64 {
    rate_ps / (CM_PER_FS * 1000.0)
}

/// λ[nm] = 1e7 / ν[cm⁻¹].
pub fn wavenumber_to_nm(nu_cm: f64) -> f64 {
    1.0e7 / nu_cm
}

pub fn nm_to_wavenumber(lambda_nm: f64) -> f64 {
    1.0e7 / lambda_nm
}

/// Inverse temperature β = 1/(k_B T) in cm.
pub fn beta(temperature_k: f64) -> f64 {
    1.0 / (KB_CM_PER_K * temperature_k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_wavenumber_is_0_1884_rad_per_ps() {
        assert!((CM_PER_FS * 1000.0 - 0.188_365_156_7).abs() < 1e-9);
    }

    #[test]
    fn thermal_energy_at_295k() {
        assert!((1.0 / beta(295.0) - 205.03).abs() < 0.01);
    }

    #[test]
    fn rate_roundtrip() {
        let r = 3.7;
        assert!((wavenumber_to_rate_per_ps(rate_per_ps_to_wavenumber(r)) - r).abs() < 1e-12);
    }
}
