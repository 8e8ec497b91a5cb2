//! Liouville-space helpers. Density matrices are vectorized row-major:
//! vec(ρ)[i·d + j] = ρ_ij.

use super::sbd::RateSchedule;
use super::Rk4;
use crate::density::DensityMatrix;
use crate::{CMatrix, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Superoperator of ρ ↦ AρB.
pub(crate) fn sandwich(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let d = a.nrows();
    CMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (c / d, c % d);
        a[(i, k)] * b[(l, j)]
    })
}

/// Superoperator of ρ ↦ −i[H, ρ].
pub(crate) fn hamiltonian_superop(h: &CMatrix) -> CMatrix {
    let id = CMatrix::identity(h.nrows(), h.ncols());
    (sandwich(h, &id) - sandwich(&id, h)) * (-I)
}

/// Superoperator of ρ ↦ LρL† − ½{L†L, ρ}.
pub(crate) fn lindblad_superop(l: &CMatrix) -> CMatrix {
    let id = CMatrix::identity(l.nrows(), l.ncols());
    let ld = l.adjoint();
    let ldl = &ld * l;
    let half = C64::new(0.5, 0.0);
    sandwich(l, &ld) - (sandwich(&ldl, &id) + sandwich(&id, &ldl)) * half
}

/// Superoperator of ρ ↦ κ(ρ_pump Tr ρ − ρ).
pub(crate) fn renewal_superop(rho_pump: &CMatrix, kappa: f64) -> CMatrix {
    let d = rho_pump.nrows();
    let n = d * d;
    CMatrix::from_fn(n, n, |r, c| {
        let (k, l) = (c / d, c % d);
        let src = if k == l { rho_pump[(r / d, r % d)] } else { C64::new(0.0, 0.0) };
        let sink = if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        (src - sink) * kappa
    })
}

pub(crate) fn vectorize(m: &CMatrix) -> Vec<C64> {
    let d = m.nrows();
    (0..d * d).map(|r| m[(r / d, r % d)]).collect()
}

pub(crate) fn unvectorize(v: &[C64], d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

/// Row-major copy of a generator for fast mat-vec products.
struct Dense {
    n: usize,
    data: Vec<C64>,
}

impl Dense {
    fn new(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(m[(r, c)]);
            }
        }
        Self { n, data }
    }

    fn apply(&self, y: &[C64], out: &mut [C64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.n..(r + 1) * self.n];
            let mut acc = C64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(y) {
                acc += a * b;
            }
            *o = acc;
        }
    }
}

/// Time-dependent part of a generator: Σ_α p_α(t) D_α.
pub(crate) struct ScheduledPart {
    pub superop: CMatrix,
    pub schedule: RateSchedule,
}

/// Propagation under a (piecewise-constant) Liouvillian.
pub(crate) struct LiouvilleRun {
    d: usize,
    base: CMatrix,
    parts: Vec<ScheduledPart>,
    current_rates: Option<Vec<f64>>,
    gen: Dense,
    y: Vec<C64>,
    rk: Rk4,
    dt: f64,
}

impl LiouvilleRun {
    pub(crate) fn constant(l: CMatrix, rho0: &DensityMatrix, pumping: Option<(CMatrix, f64)>, dt: f64) -> Self {
        Self::scheduled(l, Vec::new(), rho0, pumping, dt)
    }

    /// `base` is time-independent; each part is scaled by its schedule (in
    /// internal rate units) evaluated at the start of every step.
    pub(crate) fn scheduled(
        mut base: CMatrix,
        parts: Vec<ScheduledPart>,
        rho0: &DensityMatrix,
        pumping: Option<(CMatrix, f64)>,
        dt: f64,
    ) -> Self {
        if let Some((rho_p, kappa)) = pumping {
            base += renewal_superop(&rho_p, kappa);
        }
        let d = rho0.dim();
        let gen = Dense::new(&base);
        let y = vectorize(rho0.matrix());
        let n = y.len();
        Self { d, base, parts, current_rates: None, gen, y, rk: Rk4::new(n), dt }
    }

    pub(crate) fn step(&mut self, t0_fs: f64) {
        if !self.parts.is_empty() {
            let rates: Vec<f64> = self.parts.iter().map(|p| p.schedule.internal_rate_at(t0_fs)).collect();
            if self.current_rates.as_ref() != Some(&rates) {
                let mut g = self.base.clone();
                for (p, r) in self.parts.iter().zip(&rates) {
                    g += &p.superop * C64::new(*r, 0.0);
                }
                self.gen = Dense::new(&g);
                self.current_rates = Some(rates);
            }
        }
        let gen = &self.gen;
        self.rk.step(&mut self.y, self.dt, |y, out| gen.apply(y, out));
    }

    pub(crate) fn scale(&mut self, f: f64) {
        for v in &mut self.y {
            *v *= f;
        }
    }

    pub(crate) fn rho(&self) -> CMatrix {
        unvectorize(&self.y, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sandwich_matches_direct_product() {
        let a = CMatrix::from_fn(3, 3, |i, j| C64::new(i as f64 + 1.0, j as f64 - 0.5));
        let b = CMatrix::from_fn(3, 3, |i, j| C64::new((i * j) as f64, 1.0));
        let rho = CMatrix::from_fn(3, 3, |i, j| C64::new(0.1 * i as f64, 0.2 * j as f64));
        let direct = &a * &rho * &b;
        let v = vectorize(&rho);
        let s = sandwich(&a, &b);
        let out: Vec<C64> = (0..9).map(|r| (0..9).map(|c| s[(r, c)] * v[c]).sum()).collect();
        assert!((unvectorize(&out, 3) - direct).norm() < 1e-12);
    }
}
