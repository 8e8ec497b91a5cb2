//! Time series of density matrices with provenance.

use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::dynamics::{HeomStats, HierarchyConfig, Method, RedfieldVariant};
use crate::error::{invalid, Error, Result};
use crate::io::{header_comment, parse_numeric_csv};
use crate::{CMatrix, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetadata {
    pub method: Method,
    pub seed: Option<u64>,
    pub config_hash: String,
    pub hierarchy: HierarchyConfig,
    pub temperature_k: f64,
    /// How ρ(0) was prepared ("user", "pure_site", "pumped_exciton_mixture", …).
    pub initial_condition: String,
    /// "initial_state" or "continuous".
    pub pumping_mode: String,
    pub redfield_variant: Option<RedfieldVariant>,
    pub heom: Option<HeomStats>,
    pub notes: Vec<String>,
}

impl TrajectoryMetadata {
    /// Metadata for series assembled outside the propagators.
    pub fn synthetic(method: Method) -> Self {
        Self {
            method,
            seed: None,
            config_hash: String::new(),
            hierarchy: HierarchyConfig::default(),
            temperature_k: f64::NAN,
            initial_condition: "synthetic".into(),
            pumping_mode: "initial_state".into(),
            redfield_variant: None,
            heom: None,
            notes: Vec::new(),
        }
    }
}

/// Worst-case state-invariant violations over a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    metadata: TrajectoryMetadata,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<DensityMatrix>, metadata: TrajectoryMetadata) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return invalid("trajectory needs equal, non-zero numbers of times and states");
        }
        if times[0] != 0.0 {
            return invalid("trajectory must start at t = 0");
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("trajectory times must be strictly increasing");
        }
        let d = states[0].dim();
        if states.iter().any(|s| s.dim() != d) {
            return invalid("all trajectory states must share one dimension");
        }
        Ok(Self { times, states, metadata })
    }

    pub fn method(&self) -> Method {
        self.metadata.method
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn metadata(&self) -> &TrajectoryMetadata {
        &self.metadata
    }

    pub fn metadata_mut(&mut self) -> &mut TrajectoryMetadata {
        &mut self.metadata
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// Last stored time (fs).
    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().unwrap()
    }

    /// Site populations, one vector per frame.
    pub fn populations(&self) -> Vec<Vec<f64>> {
        self.states.iter().map(DensityMatrix::populations).collect()
    }

    pub fn population_series(&self, site: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.get(site, site).re).collect()
    }

    pub fn element_series(&self, i: usize, j: usize) -> Vec<C64> {
        self.states.iter().map(|s| s.get(i, j)).collect()
    }

    pub fn invariant_report(&self) -> InvariantReport {
        let mut r = InvariantReport { max_trace_error: 0.0, max_hermiticity_error: 0.0, min_eigenvalue: f64::INFINITY };
        for s in &self.states {
            r.max_trace_error = r.max_trace_error.max((s.trace() - 1.0).norm());
            r.max_hermiticity_error = r.max_hermiticity_error.max(s.hermiticity_error());
            r.min_eigenvalue = r.min_eigenvalue.min(s.min_eigenvalue());
        }
        r
    }

    /// CSV with a provenance comment, then `time_fs,re_0_0,im_0_0,re_0_1,…`.
    pub fn to_csv(&self) -> String {
        let d = self.dim();
        let mut out = header_comment(&self.metadata.config_hash);
        out.push_str(&format!(" method={}\ntime_fs", self.metadata.method));
        for i in 0..d {
            for j in 0..d {
                out.push_str(&format!(",re_{i}_{j},im_{i}_{j}"));
            }
        }
        out.push('\n');
        for (t, s) in self.times.iter().zip(&self.states) {
            out.push_str(&format!("{t}"));
            for i in 0..d {
                for j in 0..d {
                    let v = s.get(i, j);
                    out.push_str(&format!(",{:e},{:e}", v.re, v.im));
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`Trajectory::to_csv`] output; metadata is supplied by the caller.
    pub fn from_csv(text: &str, metadata: TrajectoryMetadata) -> Result<Self> {
        let first = text
            .lines()
            .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .ok_or_else(|| Error::InvalidInput("empty trajectory CSV".into()))?;
        let cols = first.split(',').count();
        let d = (((cols.saturating_sub(1)) / 2) as f64).sqrt().round() as usize;
        if d == 0 || 1 + 2 * d * d != cols {
            return invalid(format!("trajectory CSV has {cols} columns, not 1 + 2d²"));
        }
        let rows = parse_numeric_csv(text, cols)?;
        let mut times = Vec::with_capacity(rows.len());
        let mut states = Vec::with_capacity(rows.len());
        for r in rows {
            times.push(r[0]);
            let m = CMatrix::from_fn(d, d, |i, j| C64::new(r[1 + 2 * (i * d + j)], r[2 + 2 * (i * d + j)]));
            states.push(DensityMatrix::from_matrix_unchecked(m)?);
        }
        Self::new(times, states, metadata)
    }

    /// JSON envelope: metadata plus times and states.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
