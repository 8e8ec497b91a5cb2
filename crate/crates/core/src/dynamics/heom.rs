//! Hierarchical equations of motion with scaled auxiliary density operators.
//!
//! With C(t) = Σ_k c_k e^{−ν_k t} per site and ρ̃_n = ρ_n / Π_k √(n_k! |c_k|^{n_k}):
//!
//! dρ̃_n/dt = −(iL_S + Σ_k n_k ν_k) ρ̃_n
//!           − i Σ_k √((n_k+1)|c_k|) [Q_k, ρ̃_{n+e_k}]
//!           − i Σ_k √(n_k/|c_k|) (c_k Q_k ρ̃_{n−e_k} − c̄_k ρ̃_{n−e_k} Q_k)
//!           − Δ Σ_s [Q_s, [Q_s, ρ̃_n]]
//!
//! where c̄_k belongs to the expansion of C*(t). Drude and vibronic poles are
//! explicit; the thermal (Matsubara/Padé) poles enter through the
//! white-noise terminator Δ = Σ_j c_j/ν_j.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{HierarchyConfig, Rk4};
use crate::bath::{BathSpec, CorrelationExpansion, TermKind};
use crate::density::DensityMatrix;
use crate::error::{invalid, Result};
use crate::system::ExcitonSystem;
use crate::{CMatrix, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Upper bound on the number of auxiliary density operators.
pub const MAX_ADOS: usize = 500_000;

/// Hierarchy size and filtering statistics reported with a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeomStats {
    pub n_ados: usize,
    pub n_explicit_terms: usize,
    pub max_active_ados: usize,
    /// Δ of the white-noise terminator (cm⁻¹).
    pub terminator: f64,
}

#[derive(Debug, Clone, Copy)]
struct Term {
    site: usize,
    nu: C64,
    c: C64,
    cbar: C64,
    weight: usize,
    /// Index of the term whose rate is conj(ν).
    partner: usize,
}

struct Explicit {
    terms: Vec<Term>,
    terminator: f64,
}

fn explicit_terms(n_sites: usize, bath: &BathSpec, cfg: &HierarchyConfig) -> Explicit {
    let corr = CorrelationExpansion::new(bath, cfg.n_matsubara, cfg.decomposition);
    let cbar = corr.conjugate_coeffs();
    let mut per_site = Vec::new();
    let mut terminator = 0.0;
    for (k, t) in corr.terms.iter().enumerate() {
        match t.kind {
            TermKind::Thermal { .. } => terminator += (t.coeff / t.rate).re,
            _ if t.coeff.norm() == 0.0 => {}
            TermKind::Drude => per_site.push((k, 1)),
            TermKind::Mode { .. } => per_site.push((k, cfg.vibronic_tier_weight)),
        }
    }
    let local = |k: usize| per_site.iter().position(|&(j, _)| j == k).unwrap_or(0);
    let mut terms = Vec::new();
    for site in 0..n_sites {
        for &(k, weight) in &per_site {
            let t = &corr.terms[k];
            let partner = site * per_site.len() + local(corr.conjugate_partner(k));
            terms.push(Term { site, nu: t.rate, c: t.coeff, cbar: cbar[k], weight, partner });
        }
    }
    Explicit { terms, terminator }
}

/// Index vectors with Σ_k weight_k n_k ≤ depth, ordered by tier.
fn enumerate(weights: &[usize], depth: usize, limit: usize) -> Result<Vec<Vec<u8>>> {
    fn rec(k: usize, left: usize, weights: &[usize], cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>, limit: usize) -> bool {
        if k == weights.len() {
            out.push(cur.clone());
            return out.len() <= limit;
        }
        let max_n = left / weights[k];
        for n in 0..=max_n {
            cur[k] = n as u8;
            if !rec(k + 1, left - n * weights[k], weights, cur, out, limit) {
                return false;
            }
        }
        cur[k] = 0;
        true
    }
    let mut out = Vec::new();
    let mut cur = vec![0u8; weights.len()];
    if !rec(0, depth, weights, &mut cur, &mut out, limit) {
        return invalid(format!("hierarchy exceeds {limit} auxiliary density operators; reduce depth or raise vibronic_tier_weight"));
    }
    out.sort_by(|a, b| {
        let ta: usize = a.iter().map(|&x| x as usize).sum();
        let tb: usize = b.iter().map(|&x| x as usize).sum();
        ta.cmp(&tb).then_with(|| b.cmp(a))
    });
    Ok(out)
}

/// Number of auxiliary density operators (tier 0 included) for a system.
pub fn count_ados(n_sites: usize, bath: &BathSpec, cfg: &HierarchyConfig) -> Result<usize> {
    let ex = explicit_terms(n_sites, bath, cfg);
    let weights: Vec<usize> = ex.terms.iter().map(|t| t.weight).collect();
    Ok(enumerate(&weights, cfg.depth, MAX_ADOS)?.len())
}

#[derive(Clone, Copy)]
struct Up {
    site: u32,
    target: u32,
    factor: C64,
}

#[derive(Clone, Copy)]
struct Down {
    site: u32,
    target: u32,
    left: C64,
    right: C64,
}

pub(crate) struct HeomRun {
    d: usize,
    n_ados: usize,
    n_terms: usize,
    h: Vec<f64>,
    damping: Vec<C64>,
    /// ADO index of n̄ (n with every term swapped for its conjugate partner);
    /// ρ_n̄ = ρ_n† and filtering keeps or drops both together.
    mirror: Vec<usize>,
    up_start: Vec<usize>,
    up: Vec<Up>,
    down_start: Vec<usize>,
    down: Vec<Down>,
    terminator: f64,
    pumping: Option<(Vec<C64>, f64)>,
    y: Vec<C64>,
    rk: Rk4,
    active: Vec<bool>,
    update: Vec<bool>,
    threshold: f64,
    max_active: usize,
}

impl HeomRun {
    pub(crate) fn new(
        system: &ExcitonSystem,
        bath: &BathSpec,
        rho0: &DensityMatrix,
        cfg: &HierarchyConfig,
        pumping: Option<(CMatrix, f64)>,
    ) -> Result<Self> {
        let d = system.n_sites();
        let dd = d * d;
        let ex = explicit_terms(d, bath, cfg);
        let weights: Vec<usize> = ex.terms.iter().map(|t| t.weight).collect();
        let ados = enumerate(&weights, cfg.depth, MAX_ADOS)?;
        let n_ados = ados.len();
        let index: HashMap<&[u8], usize> = ados.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
        let scale: Vec<f64> = ex.terms.iter().map(|t| t.c.norm().sqrt()).collect();

        let mut damping = Vec::with_capacity(n_ados);
        let mut up_start = vec![0];
        let mut up = Vec::new();
        let mut down_start = vec![0];
        let mut down = Vec::new();
        let mut probe = vec![0u8; weights.len()];
        let mut mirror = Vec::with_capacity(n_ados);
        for n in &ados {
            for (k, t) in ex.terms.iter().enumerate() {
                probe[t.partner] = n[k];
            }
            mirror.push(index[probe.as_slice()]);
            damping.push(n.iter().zip(&ex.terms).map(|(&nk, t)| t.nu * nk as f64).sum());
            probe.copy_from_slice(n);
            for (k, t) in ex.terms.iter().enumerate() {
                let nk = n[k] as f64;
                probe[k] += 1;
                if let Some(&target) = index.get(probe.as_slice()) {
                    up.push(Up { site: t.site as u32, target: target as u32, factor: -I * ((nk + 1.0).sqrt() * scale[k]) });
                }
                probe[k] -= 1;
                if n[k] > 0 {
                    probe[k] -= 1;
                    let target = index[probe.as_slice()];
                    let f = nk.sqrt() / scale[k];
                    down.push(Down { site: t.site as u32, target: target as u32, left: -I * f * t.c, right: I * f * t.cbar });
                    probe[k] += 1;
                }
            }
            up_start.push(up.len());
            down_start.push(down.len());
        }

        let shift = system.mean_site_energy();
        let hm = system.hamiltonian();
        let mut h = vec![0.0; dd];
        for i in 0..d {
            for j in 0..d {
                h[i * d + j] = hm[(i, j)] - if i == j { shift } else { 0.0 };
            }
        }
        let mut y = vec![C64::new(0.0, 0.0); n_ados * dd];
        for i in 0..d {
            for j in 0..d {
                y[i * d + j] = rho0.get(i, j);
            }
        }
        let mut active = vec![false; n_ados];
        active[0] = true;
        let pumping = pumping.map(|(m, k)| ((0..dd).map(|r| m[(r / d, r % d)]).collect(), k));
        let mut run = Self {
            d,
            n_ados,
            n_terms: ex.terms.len(),
            h,
            damping,
            mirror,
            up_start,
            up,
            down_start,
            down,
            terminator: ex.terminator,
            pumping,
            rk: Rk4::new(y.len()),
            y,
            active,
            update: vec![false; n_ados],
            threshold: cfg.truncation_threshold,
            max_active: 1,
        };
        run.refresh_update_set();
        Ok(run)
    }

    fn refresh_update_set(&mut self) {
        for m in 0..self.n_ados {
            let mut u = self.active[m];
            if !u {
                u = self.up[self.up_start[m]..self.up_start[m + 1]].iter().any(|e| self.active[e.target as usize])
                    || self.down[self.down_start[m]..self.down_start[m + 1]].iter().any(|e| self.active[e.target as usize]);
            }
            self.update[m] = u;
        }
    }

    fn filter(&mut self) {
        let dd = self.d * self.d;
        let big: Vec<bool> = (0..self.n_ados)
            .map(|m| {
                self.update[m]
                    && self.y[m * dd..(m + 1) * dd]
                        .iter()
                        .any(|v| v.re.abs() >= self.threshold || v.im.abs() >= self.threshold)
            })
            .collect();
        let mut count = 1;
        for m in 1..self.n_ados {
            if !self.update[m] {
                continue;
            }
            let keep = big[m] || big[self.mirror[m]];
            if keep {
                count += 1;
            } else {
                self.y[m * dd..(m + 1) * dd].iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            }
            self.active[m] = keep;
        }
        self.max_active = self.max_active.max(count);
        self.refresh_update_set();
    }

    pub(crate) fn step(&mut self, dt: f64) {
        let mut y = std::mem::take(&mut self.y);
        let mut rk = std::mem::replace(&mut self.rk, Rk4::new(0));
        rk.step(&mut y, dt, |x, out| self.rhs(x, out));
        self.y = y;
        self.rk = rk;
        self.filter();
    }

    fn rhs(&self, x: &[C64], out: &mut [C64]) {
        let d = self.d;
        let dd = d * d;
        let h = &self.h;
        let two_delta = 2.0 * self.terminator;
        for m in 0..self.n_ados {
            let o = &mut out[m * dd..(m + 1) * dd];
            if !self.update[m] {
                o.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                continue;
            }
            let r = &x[m * dd..(m + 1) * dd];
            let damp = self.damping[m];
            for i in 0..d {
                for j in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..d {
                        acc += r[k * d + j] * h[i * d + k] - r[i * d + k] * h[k * d + j];
                    }
                    let mut v = -I * acc - damp * r[i * d + j];
                    if i != j {
                        v -= r[i * d + j] * two_delta;
                    }
                    o[i * d + j] = v;
                }
            }
            for e in &self.up[self.up_start[m]..self.up_start[m + 1]] {
                let t = e.target as usize;
                if !self.update[t] {
                    continue;
                }
                let s = e.site as usize;
                let xt = &x[t * dd..(t + 1) * dd];
                for j in 0..d {
                    o[s * d + j] += e.factor * xt[s * d + j];
                }
                for i in 0..d {
                    o[i * d + s] -= e.factor * xt[i * d + s];
                }
            }
            for e in &self.down[self.down_start[m]..self.down_start[m + 1]] {
                let t = e.target as usize;
                if !self.update[t] {
                    continue;
                }
                let s = e.site as usize;
                let xt = &x[t * dd..(t + 1) * dd];
                for j in 0..d {
                    o[s * d + j] += e.left * xt[s * d + j];
                }
                for i in 0..d {
                    o[i * d + s] += e.right * xt[i * d + s];
                }
            }
            if let Some((pump, kappa)) = &self.pumping {
                if m == 0 {
                    let tr: C64 = (0..d).map(|i| r[i * d + i]).sum();
                    for q in 0..dd {
                        o[q] += (pump[q] * tr - r[q]) * *kappa;
                    }
                } else {
                    for q in 0..dd {
                        o[q] -= r[q] * *kappa;
                    }
                }
            }
        }
    }

    pub(crate) fn scale(&mut self, f: f64) {
        for v in &mut self.y {
            *v *= f;
        }
    }

    pub(crate) fn rho(&self) -> CMatrix {
        let d = self.d;
        CMatrix::from_fn(d, d, |i, j| self.y[i * d + j])
    }

    pub(crate) fn stats(&self) -> HeomStats {
        HeomStats {
            n_ados: self.n_ados,
            n_explicit_terms: self.n_terms,
            max_active_ados: self.max_active,
            terminator: self.terminator,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drude_only_hierarchy_size_is_binomial() {
        let bath = BathSpec::drude_only(35.0, 50.0, 295.0).unwrap();
        let cfg = HierarchyConfig::default();
        // C(7 + 5, 5)
        assert_eq!(count_ados(7, &bath, &cfg).unwrap(), 792);
    }

    #[test]
    fn vibronic_weight_limits_mode_tiers() {
        let cfg = HierarchyConfig { vibronic_tier_weight: 4, ..Default::default() };
        // 792 Drude-only + 56 single mode quanta times 8 (≤ 1 Drude quantum)
        assert_eq!(count_ados(7, &BathSpec::fmo_default(), &cfg).unwrap(), 792 + 56 * 8);
    }

    #[test]
    fn oversized_hierarchy_is_rejected() {
        let cfg = HierarchyConfig { vibronic_tier_weight: 1, ..Default::default() };
        assert!(count_ados(7, &BathSpec::fmo_default(), &cfg).is_err());
    }
}
