//! Python bindings for `qbath`.
//!
//! Numeric series cross the boundary as lists of floats; compound results
//! (Pareto fronts, ledgers, reports) as JSON strings.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use qbath::dynamics::{default_sbd_config, propagate_with, PropagateOptions, RedfieldVariant};
use qbath::ecodesign::{self, EcoInputs, MoleculeDescriptors, DEFAULT_B_WEIGHTS};
use qbath::environment::{annual_simulation, site_database, AnnualConfig, SiteClimate};
use qbath::illumination::{self, Band, PVEfficiencyCurve, SolarSpectrum};
use qbath::metrics::{self, EtrConfig, MetricKind, SeriesOptions, DEFAULT_K_RC_PER_PS};
use qbath::optimizer::{self, DeConfig, EvalContext, Evaluator};
use qbath::validation::{run_suite_subset, ValidationConfig};

create_exception!(pyqbath, QbathError, PyException);

fn err(e: qbath::Error) -> PyErr {
    match e {
        qbath::Error::InvalidInput(m) => PyValueError::new_err(m),
        other => QbathError::new_err(other.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Excitonic system: site energies and couplings in cm⁻¹.
#[pyclass(name = "ExcitonSystem", from_py_object)]
#[derive(Clone)]
struct PyExcitonSystem {
    inner: qbath::ExcitonSystem,
}

#[pymethods]
impl PyExcitonSystem {
    #[new]
    #[pyo3(signature = (site_energies, couplings, trap_site = 0))]
    fn new(site_energies: Vec<f64>, couplings: Vec<Vec<f64>>, trap_site: usize) -> PyResult<Self> {
        Ok(Self { inner: qbath::ExcitonSystem::new(site_energies, couplings, trap_site).map_err(err)? })
    }

    /// Seven-site FMO monomer.
    #[staticmethod]
    fn fmo() -> Self {
        Self { inner: qbath::build_fmo_system() }
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.inner.n_sites()
    }

    #[getter]
    fn site_energies(&self) -> Vec<f64> {
        self.inner.site_energies().to_vec()
    }

    #[getter]
    fn trap_site(&self) -> usize {
        self.inner.trap_site()
    }

    fn hamiltonian(&self) -> Vec<Vec<f64>> {
        let h = self.inner.hamiltonian();
        (0..h.nrows()).map(|i| (0..h.ncols()).map(|j| h[(i, j)]).collect()).collect()
    }

    /// Exciton energies in ascending order.
    fn exciton_energies(&self) -> Vec<f64> {
        self.inner.exciton_basis().0
    }

    fn with_disorder(&self, sigma: f64, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: qbath::apply_static_disorder(&self.inner, sigma, seed).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("ExcitonSystem(n_sites={}, trap_site={})", self.inner.n_sites(), self.inner.trap_site())
    }
}

/// Drude-Lorentz bath with optional underdamped vibronic modes.
#[pyclass(name = "BathSpec", from_py_object)]
#[derive(Clone)]
struct PyBathSpec {
    inner: qbath::BathSpec,
}

#[pymethods]
impl PyBathSpec {
    #[staticmethod]
    fn fmo_default() -> Self {
        Self { inner: qbath::BathSpec::fmo_default() }
    }

    #[staticmethod]
    fn drude(reorganization: f64, cutoff: f64, temperature: f64) -> PyResult<Self> {
        Ok(Self { inner: qbath::BathSpec::drude_only(reorganization, cutoff, temperature).map_err(err)? })
    }

    fn with_temperature(&self, temperature: f64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.with_temperature(temperature).map_err(err)? })
    }

    #[getter]
    fn temperature(&self) -> f64 {
        self.inner.temperature()
    }

    #[getter]
    fn total_reorganization(&self) -> f64 {
        self.inner.total_reorganization()
    }

    fn spectral_density(&self, omega: f64) -> PyResult<f64> {
        qbath::bath::spectral_density_eval(omega, &self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "BathSpec(lambda={}, gamma={}, modes={}, T={})",
            self.inner.drude_lambda(),
            self.inner.drude_gamma(),
            self.inner.vibronic_modes().len(),
            self.inner.temperature()
        )
    }
}

/// Time-resolved reduced density matrix.
#[pyclass(name = "Trajectory")]
struct PyTrajectory {
    inner: qbath::Trajectory,
    system: qbath::ExcitonSystem,
}

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.times().to_vec()
    }

    #[getter]
    fn method(&self) -> String {
        self.inner.method().to_string()
    }

    fn populations(&self) -> Vec<Vec<f64>> {
        self.inner.populations()
    }

    /// Final density matrix as nested lists of complex numbers.
    fn final_state(&self) -> Vec<Vec<num_complex_pair::Pair>> {
        let m = self.inner.final_state().matrix();
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| num_complex_pair::Pair(m[(i, j)].re, m[(i, j)].im)).collect()).collect()
    }

    /// (max trace error, max hermiticity error, min eigenvalue).
    fn invariants(&self) -> (f64, f64, f64) {
        let r = self.inner.invariant_report();
        (r.max_trace_error, r.max_hermiticity_error, r.min_eigenvalue)
    }

    /// Metric time series by name (e.g. "purity", "l1_coherence", "qfi").
    fn metric(&self, name: &str) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let kind: MetricKind = name.parse().map_err(err)?;
        let opts = SeriesOptions { trap_site: Some(self.system.trap_site()), ..Default::default() };
        let s = metrics::metric_series(&self.inner, kind, &opts, &self.system.hamiltonian_complex()).map_err(err)?;
        Ok((s.times, s.values))
    }

    /// Returns (absolute, normalized) energy-transfer rate over the trajectory.
    #[pyo3(signature = (k_rc_per_ps = DEFAULT_K_RC_PER_PS))]
    fn etr(&self, k_rc_per_ps: f64) -> PyResult<(f64, f64)> {
        let cfg = EtrConfig::new(k_rc_per_ps, self.inner.horizon(), self.system.trap_site()).map_err(err)?;
        let v = metrics::etr(&self.inner, &cfg).map_err(err)?;
        Ok((v.absolute, v.normalized))
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

mod num_complex_pair {
    use pyo3::prelude::*;
    use pyo3::types::PyComplex;

    pub struct Pair(pub f64, pub f64);

    impl<'py> IntoPyObject<'py> for Pair {
        type Target = PyComplex;
        type Output = Bound<'py, PyComplex>;
        type Error = std::convert::Infallible;

        fn into_pyobject(self, py: Python<'py>) -> Result<Self::Output, Self::Error> {
            Ok(PyComplex::from_doubles(py, self.0, self.1))
        }
    }
}

/// Propagate from a pure site state (or the sunlight-pumped exciton mixture
/// when `initial_site` is None).
#[pyfunction]
#[pyo3(signature = (system, bath, t_max_fs, method = "heom", initial_site = Some(0), depth = 5, dt = 1.0, seed = 0, secular = false))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    system: &PyExcitonSystem,
    bath: &PyBathSpec,
    t_max_fs: f64,
    method: &str,
    initial_site: Option<usize>,
    depth: usize,
    dt: f64,
    seed: u64,
    secular: bool,
) -> PyResult<PyTrajectory> {
    let method: qbath::Method = method.parse().map_err(err)?;
    let sys = &system.inner;
    let rho0 = match initial_site {
        Some(s) => qbath::DensityMatrix::pure_site(sys.n_sites(), s).map_err(err)?,
        None => {
            let pm = illumination::PumpingModel::for_system(sys, illumination::DEFAULT_LINE_WIDTH_NM).map_err(err)?;
            let rates = illumination::pumping_rates(&SolarSpectrum::am15g(), sys, &pm).map_err(err)?;
            illumination::exciton_mixture(sys, &rates).map_err(err)?
        }
    };
    let cfg = qbath::HierarchyConfig { depth, dt, ..Default::default() };
    let sbd = (method == qbath::Method::Sbd).then(|| default_sbd_config(sys, &bath.inner));
    let opts = PropagateOptions {
        redfield_variant: if secular { RedfieldVariant::Secular } else { RedfieldVariant::Full },
        seed: Some(seed),
        ..Default::default()
    };
    let traj = propagate_with(sys, &bath.inner, &rho0, t_max_fs, &cfg, method, sbd.as_ref(), &opts).map_err(err)?;
    Ok(PyTrajectory { inner: traj, system: sys.clone() })
}

/// Thermal (Gibbs) site populations at `temperature`.
#[pyfunction]
fn thermal_populations(system: &PyExcitonSystem, temperature: f64) -> PyResult<Vec<f64>> {
    Ok(qbath::thermal_state(&system.inner, temperature).map_err(err)?.populations())
}

fn profile(t_peak: f64, bands: Vec<(f64, f64, f64)>) -> PyResult<illumination::TransmissionProfile> {
    let bands = bands.into_iter().map(|(c, f, w)| Band { center_nm: c, fwhm_nm: f, weight: w }).collect();
    illumination::TransmissionProfile::new(t_peak, bands).map_err(err)
}

/// Filter transmission at each wavelength; bands are (center_nm, fwhm_nm, weight).
#[pyfunction]
fn transmission(t_peak: f64, bands: Vec<(f64, f64, f64)>, wavelengths_nm: Vec<f64>) -> PyResult<Vec<f64>> {
    let p = profile(t_peak, bands)?;
    Ok(wavelengths_nm.iter().map(|&l| illumination::transmission_eval(l, &p)).collect())
}

/// PV efficiency of the absorbed (non-transmitted) AM1.5G light.
#[pyfunction]
fn pce(t_peak: f64, bands: Vec<(f64, f64, f64)>) -> PyResult<f64> {
    illumination::pce(&profile(t_peak, bands)?, &SolarSpectrum::am15g(), &PVEfficiencyCurve::default_curve()).map_err(err)
}

/// Evaluate a filter design in the default FMO context: returns (pce, etr, feasible).
#[pyfunction]
fn evaluate_design(t_peak: f64, bands: Vec<(f64, f64, f64)>) -> PyResult<(f64, f64, bool)> {
    let ev = Evaluator::new(EvalContext::fmo_default()).map_err(err)?;
    let o = ev.evaluate(&profile(t_peak, bands)?).map_err(err)?;
    Ok((o.pce, o.etr, o.feasible))
}

/// PCE/ETR Pareto search; returns the front as JSON.
#[pyfunction]
#[pyo3(signature = (population = 20, generations = 40, seed = 0, pce_min = optimizer::DEFAULT_PCE_MIN))]
fn optimize(py: Python<'_>, population: usize, generations: usize, seed: u64, pce_min: f64) -> PyResult<String> {
    let mut ctx = EvalContext::fmo_default();
    ctx.pce_min = pce_min;
    let de = DeConfig::new(population, generations, seed);
    de.validate().map_err(err)?;
    let front = py.detach(|| -> qbath::Result<_> {
        let ev = Evaluator::new(ctx)?;
        optimizer::optimize_pareto(&ev, &de)
    });
    serde_json::to_string(&front.map_err(err)?).map_err(json_err)
}

/// Names of the bundled climate sites.
#[pyfunction]
fn sites() -> Vec<String> {
    std::iter::once("default".to_string()).chain(site_database().into_iter().map(|s| s.name)).collect()
}

/// Year-long soiling simulation for a named site with the reference design;
/// returns (pce_degradation_pct, etr_degradation_pct, ledger_csv).
#[pyfunction]
#[pyo3(signature = (site = "default", seed = 0))]
fn annual(py: Python<'_>, site: &str, seed: u64) -> PyResult<(f64, f64, String)> {
    let s: SiteClimate = if site == "default" {
        SiteClimate::default_site()
    } else {
        site_database().into_iter().find(|s| s.name == site).ok_or_else(|| PyValueError::new_err(format!("unknown site '{site}'")))?
    };
    let ledger = py
        .detach(|| -> qbath::Result<_> {
            let ev = Evaluator::new(EvalContext::fmo_default())?;
            annual_simulation(&s, &optimizer::reference_balanced_design(), &ev, &AnnualConfig::new(seed))
        })
        .map_err(err)?;
    Ok((ledger.pce_degradation_pct, ledger.etr_degradation_pct, ledger.to_csv("")))
}

/// Electrophilicity ω = μ²/(2η) in eV.
#[pyfunction]
fn electrophilicity(mu_ev: f64, eta_ev: f64) -> PyResult<f64> {
    Ok(ecodesign::descriptors_from_mu_eta(mu_ev, eta_ev).map_err(err)?.electrophilicity_ev)
}

/// Biodegradability class label for a B-index score.
#[pyfunction]
fn classify_b_index(score: f64) -> String {
    ecodesign::classify_b_index(score).label().to_string()
}

/// Reactivity report for a JSON molecule record (or the bundled reference
/// molecules when None); returns a JSON array of reports.
#[pyfunction]
#[pyo3(signature = (molecule_json = None, homo_reference_ev = None))]
fn reactivity(molecule_json: Option<&str>, homo_reference_ev: Option<f64>) -> PyResult<String> {
    let molecules: Vec<MoleculeDescriptors> = match molecule_json {
        Some(t) => vec![serde_json::from_str(t).map_err(json_err)?],
        None => ecodesign::reference_molecules().into_iter().filter(|m| m.ionization_ev.is_some() || m.homo_ev.is_some()).collect(),
    };
    let reports = molecules
        .iter()
        .map(|m| ecodesign::reactivity_report(m, homo_reference_ev, DEFAULT_B_WEIGHTS, &EcoInputs::default()))
        .collect::<qbath::Result<Vec<_>>>()
        .map_err(err)?;
    serde_json::to_string(&reports).map_err(json_err)
}

/// Run validation tests (all when `tests` is empty); returns the report JSON.
#[pyfunction]
#[pyo3(signature = (tests = Vec::new(), quick = true))]
fn validate(py: Python<'_>, tests: Vec<usize>, quick: bool) -> PyResult<String> {
    let cfg = if quick { ValidationConfig::quick() } else { ValidationConfig::default() };
    let report = py.detach(|| run_suite_subset(&cfg, &tests)).map_err(err)?;
    serde_json::to_string(&report).map_err(json_err)
}

#[pymodule]
fn pyqbath(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", qbath::VERSION)?;
    m.add("QbathError", m.py().get_type::<QbathError>())?;
    m.add_class::<PyExcitonSystem>()?;
    m.add_class::<PyBathSpec>()?;
    m.add_class::<PyTrajectory>()?;
    for f in [
        wrap_pyfunction!(simulate, m)?,
        wrap_pyfunction!(thermal_populations, m)?,
        wrap_pyfunction!(transmission, m)?,
        wrap_pyfunction!(pce, m)?,
        wrap_pyfunction!(evaluate_design, m)?,
        wrap_pyfunction!(optimize, m)?,
        wrap_pyfunction!(sites, m)?,
        wrap_pyfunction!(annual, m)?,
        wrap_pyfunction!(electrophilicity, m)?,
        wrap_pyfunction!(classify_b_index, m)?,
        wrap_pyfunction!(reactivity, m)?,
        wrap_pyfunction!(validate, m)?,
    ] {
        m.add_function(f)?;
    }
    Ok(())
}
