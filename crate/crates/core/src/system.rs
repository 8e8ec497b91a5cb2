//! Exciton Hamiltonians of chromophore networks.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::units::wavenumber_to_nm;
use crate::{CMatrix, RMatrix, C64};

/// FMO site energies (cm⁻¹), Adolphs–Renger parameterization.
pub const FMO_SITE_ENERGIES: [f64; 7] = [12410.0, 12530.0, 12210.0, 12320.0, 12480.0, 12630.0, 12440.0];

/// FMO inter-site couplings (cm⁻¹).
pub const FMO_COUPLINGS: [[f64; 7]; 7] = [
    [0.0, -87.7, 5.5, -5.9, 6.7, -13.7, -9.9],
    [-87.7, 0.0, 30.8, 8.2, 0.7, 11.8, 4.3],
    [5.5, 30.8, 0.0, -53.5, -2.2, -9.6, 6.0],
    [-5.9, 8.2, -53.5, 0.0, -70.7, -17.0, -63.3],
    [6.7, 0.7, -2.2, -70.7, 0.0, 81.1, -1.3],
    [-13.7, 11.8, -9.6, -17.0, 81.1, 0.0, 39.7],
    [-9.9, 4.3, 6.0, -63.3, -1.3, 39.7, 0.0],
];

/// Tabulated transition wavelengths (nm) of the seven FMO sites.
pub const FMO_SITE_WAVELENGTHS_NM: [f64; 7] = [806.0, 798.0, 819.0, 812.0, 801.0, 792.0, 804.0];

/// Default reaction-centre-proximal site (site 1, zero-based index 0).
pub const FMO_DEFAULT_TRAP_SITE: usize = 0;

/// Site energies, couplings and trap site of an N-chromophore network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExcitonSystem")]
pub struct ExcitonSystem {
    site_energies: Vec<f64>,
    couplings: Vec<Vec<f64>>,
    trap_site: usize,
}

#[derive(Deserialize)]
struct RawExcitonSystem {
    site_energies: Vec<f64>,
    couplings: Vec<Vec<f64>>,
    #[serde(default)]
    trap_site: usize,
}

impl TryFrom<RawExcitonSystem> for ExcitonSystem {
    type Error = Error;
    fn try_from(raw: RawExcitonSystem) -> Result<Self> {
        ExcitonSystem::new(raw.site_energies, raw.couplings, raw.trap_site)
    }
}

impl ExcitonSystem {
    pub fn new(site_energies: Vec<f64>, couplings: Vec<Vec<f64>>, trap_site: usize) -> Result<Self> {
        let n = site_energies.len();
        if n == 0 {
            return invalid("an exciton system needs at least one site");
        }
        if site_energies.iter().any(|e| !e.is_finite()) {
            return invalid("site energies must be finite");
        }
        if couplings.len() != n || couplings.iter().any(|row| row.len() != n) {
            return invalid(format!("coupling matrix must be {n}x{n}"));
        }
        for i in 0..n {
            if couplings[i][i] != 0.0 {
                return invalid(format!("coupling diagonal entry {i} is nonzero"));
            }
            for j in 0..n {
                if !couplings[i][j].is_finite() {
                    return invalid("couplings must be finite");
                }
                if couplings[i][j] != couplings[j][i] {
                    return invalid(format!("coupling matrix is not symmetric at ({i},{j})"));
                }
            }
        }
        if trap_site >= n {
            return invalid(format!("trap site {trap_site} out of range for {n} sites"));
        }
        Ok(Self { site_energies, couplings, trap_site })
    }

    /// Uncoupled sites with the given energies.
    pub fn uncoupled(site_energies: Vec<f64>) -> Result<Self> {
        let n = site_energies.len();
        Self::new(site_energies, vec![vec![0.0; n]; n], 0)
    }

    pub fn n_sites(&self) -> usize {
        self.site_energies.len()
    }

    pub fn site_energies(&self) -> &[f64] {
        &self.site_energies
    }

    pub fn couplings(&self) -> &[Vec<f64>] {
        &self.couplings
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i][j]
    }

    pub fn trap_site(&self) -> usize {
        self.trap_site
    }

    pub fn with_trap_site(mut self, trap_site: usize) -> Result<Self> {
        if trap_site >= self.n_sites() {
            return invalid(format!("trap site {trap_site} out of range"));
        }
        self.trap_site = trap_site;
        Ok(self)
    }

    /// Copy with every coupling multiplied by `factor`.
    pub fn scaled_couplings(&self, factor: f64) -> Self {
        let couplings = self
            .couplings
            .iter()
            .map(|row| row.iter().map(|c| c * factor).collect())
            .collect();
        Self { couplings, ..self.clone() }
    }

    /// Transition wavelength of a site, 1e7 / ε.
    pub fn site_wavelength_nm(&self, site: usize) -> f64 {
        wavenumber_to_nm(self.site_energies[site])
    }

    pub fn mean_site_energy(&self) -> f64 {
        self.site_energies.iter().sum::<f64>() / self.n_sites() as f64
    }

    /// H_S in the site basis.
    pub fn hamiltonian(&self) -> RMatrix {
        let n = self.n_sites();
        DMatrix::from_fn(n, n, |i, j| if i == j { self.site_energies[i] } else { self.couplings[i][j] })
    }

    pub fn hamiltonian_complex(&self) -> CMatrix {
        self.hamiltonian().map(|x| C64::new(x, 0.0))
    }

    /// Exciton energies in ascending order with eigenvectors as columns.
    pub fn exciton_basis(&self) -> (Vec<f64>, RMatrix) {
        sorted_eigen(self.hamiltonian())
    }
}

/// Symmetric eigendecomposition sorted by ascending eigenvalue.
pub(crate) fn sorted_eigen(m: RMatrix) -> (Vec<f64>, RMatrix) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = RMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(k).clone_owned();
        // fix the sign so the largest component is positive
        let (imax, _) = v.iter().enumerate().fold((0, 0.0), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc });
        if v[imax] < 0.0 {
            v = -v;
        }
        vectors.set_column(col, &v);
    }
    (values, vectors)
}

/// The seven-site FMO complex with trap site 1.
pub fn build_fmo_system() -> ExcitonSystem {
    let couplings = FMO_COUPLINGS.iter().map(|row| row.to_vec()).collect();
    ExcitonSystem::new(FMO_SITE_ENERGIES.to_vec(), couplings, FMO_DEFAULT_TRAP_SITE)
        .expect("tabulated FMO parameters are valid")
}

/// Adds i.i.d. Gaussian offsets (mean 0, std `sigma`) to the site energies.
pub fn apply_static_disorder(system: &ExcitonSystem, sigma: f64, seed: u64) -> Result<ExcitonSystem> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return invalid("disorder width must be finite and non-negative");
    }
    if sigma == 0.0 {
        return Ok(system.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut out = system.clone();
    for e in out.site_energies.iter_mut() {
        *e += normal.sample(&mut rng);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_couplings() {
        let r = ExcitonSystem::new(vec![0.0, 1.0], vec![vec![0.0, 1.0], vec![2.0, 0.0]], 0);
        assert!(r.is_err());
    }

    #[test]
    fn rejects_nonzero_diagonal_and_bad_trap() {
        assert!(ExcitonSystem::new(vec![0.0, 1.0], vec![vec![1.0, 0.0], vec![0.0, 0.0]], 0).is_err());
        assert!(ExcitonSystem::new(vec![0.0, 1.0], vec![vec![0.0; 2]; 2], 2).is_err());
    }

    #[test]
    fn exciton_basis_diagonalizes() {
        let s = build_fmo_system();
        let (e, u) = s.exciton_basis();
        let d = u.transpose() * s.hamiltonian() * &u;
        for i in 0..7 {
            assert!((d[(i, i)] - e[i]).abs() < 1e-9);
            if i > 0 {
                assert!(e[i] >= e[i - 1]);
            }
        }
    }

    #[test]
    fn deserialization_validates() {
        let bad = r#"{"site_energies":[1.0,2.0],"couplings":[[0.0,1.0],[0.5,0.0]]}"#;
        assert!(serde_json::from_str::<ExcitonSystem>(bad).is_err());
        let good = r#"{"site_energies":[1.0,2.0],"couplings":[[0.0,1.0],[1.0,0.0]],"trap_site":1}"#;
        assert_eq!(serde_json::from_str::<ExcitonSystem>(good).unwrap().trap_site(), 1);
    }
}
