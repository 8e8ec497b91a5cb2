//! Density matrices and thermal states.

use nalgebra::{DVector, SymmetricEigen};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::system::ExcitonSystem;
use crate::units::beta;
use crate::{CMatrix, C64};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// A reduced density matrix in the site basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(m)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps a square matrix without checking the state invariants.
    pub fn from_matrix_unchecked(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return invalid("density matrix must be square and non-empty");
        }
        Ok(Self { m })
    }

    /// |i⟩⟨i|.
    pub fn pure_site(dim: usize, site: usize) -> Result<Self> {
        if site >= dim {
            return invalid(format!("site {site} out of range for dimension {dim}"));
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(site, site)] = C64::new(1.0, 0.0);
        Ok(Self { m })
    }

    /// |ψ⟩⟨ψ| for a state vector, normalized.
    pub fn from_state_vector(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || norm == 0.0 || !norm.is_finite() {
            return invalid("state vector must be non-zero and finite");
        }
        let v = DVector::from_iterator(psi.len(), psi.iter().map(|c| c / norm));
        Ok(Self { m: &v * v.adjoint() })
    }

    /// Diagonal state with the given (normalized) populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let s: f64 = populations.iter().sum();
        if populations.is_empty() || populations.iter().any(|p| *p < 0.0) || !(s > 0.0) {
            return invalid("populations must be non-negative with positive sum");
        }
        let n = populations.len();
        Ok(Self { m: CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(populations[i] / s, 0.0) } else { C64::new(0.0, 0.0) }) })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim]).expect("dim > 0")
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)].re).collect()
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut e: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                e = e.max((self.m[(i, j)] - self.m[(j, i)].conj()).norm());
            }
        }
        e
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let (vals, _) = hermitian_eigen(&self.m);
        vals
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Checks the state invariants with the default tolerances.
    pub fn validate(&self) -> Result<()> {
        let h = self.hermiticity_error();
        if !(h <= HERMITICITY_TOL) {
            return invalid(format!("density matrix is not Hermitian (deviation {h:.3e})"));
        }
        let tr = self.trace();
        if !((tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL) {
            return invalid(format!("density matrix trace is {tr}, expected 1"));
        }
        let e = self.min_eigenvalue();
        if !(e >= -POSITIVITY_TOL) {
            return invalid(format!("density matrix has negative eigenvalue {e:.3e}"));
        }
        Ok(())
    }

    /// ρ in the exciton basis, U†ρU.
    pub fn to_basis(&self, u: &CMatrix) -> Self {
        Self { m: u.adjoint() * &self.m * u }
    }
}

/// Eigen-decomposition of the Hermitian part of `m`; eigenvalues ascending,
/// eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut u = CMatrix::zeros(n, n);
    for (c, &k) in order.iter().enumerate() {
        u.set_column(c, &eig.eigenvectors.column(k));
    }
    (values, u)
}

/// ρ = exp(−H_S/k_BT)/Z in the site basis.
pub fn thermal_state(system: &ExcitonSystem, temperature: f64) -> Result<DensityMatrix> {
    if !(temperature > 0.0) {
        return invalid("temperature must be > 0");
    }
    let (e, u) = system.exciton_basis();
    let b = if temperature.is_infinite() { 0.0 } else { beta(temperature) };
    let e0 = e[0];
    let w: Vec<f64> = e.iter().map(|x| (-(x - e0) * b).exp()).collect();
    let z: f64 = w.iter().sum();
    let n = system.n_sites();
    let m = CMatrix::from_fn(n, n, |i, j| {
        let v: f64 = (0..n).map(|k| u[(i, k)] * w[k] * u[(j, k)]).sum();
        C64::new(v / z, 0.0)
    });
    DensityMatrix::new(m).map_err(|e| Error::InvalidInput(format!("thermal state: {e}")))
}

#[derive(Serialize, Deserialize)]
struct RawDensity {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let re = (0..n).map(|i| (0..n).map(|j| self.m[(i, j)].re).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| self.m[(i, j)].im).collect()).collect();
        RawDensity { re, im }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDensity::deserialize(d)?;
        let n = raw.re.len();
        if raw.im.len() != n || raw.re.iter().chain(raw.im.iter()).any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("density matrix must be square"));
        }
        let m = CMatrix::from_fn(n, n, |i, j| C64::new(raw.re[i][j], raw.im[i][j]));
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_eigen_of_complex_matrix() {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(1.0, 0.0)]);
        let (vals, u) = hermitian_eigen(&m);
        assert!((vals[0] - 0.0).abs() < 1e-12 && (vals[1] - 2.0).abs() < 1e-12);
        let d = u.adjoint() * &m * &u;
        assert!((d[(0, 1)]).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(0.5, 0.0);
        m[(1, 1)] = C64::new(0.5, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let rho = DensityMatrix::from_state_vector(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let s = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&s).unwrap();
        assert!((back.matrix() - rho.matrix()).norm() < 1e-15);
    }
}
