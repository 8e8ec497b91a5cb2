//! Bloch–Redfield generator for independent site baths.
//!
//! dρ/dt = −i[H, ρ] − Σ_s [Q_s, Λ_s ρ − ρ Λ_s†], with (Λ_s)_ab = (Q_s)_ab Γ(−ω_ab)
//! in the exciton basis and Γ(ω) = ∫₀^∞ C(t) e^{iωt} dt.

use serde::{Deserialize, Serialize};

use super::superop::{hamiltonian_superop, sandwich};
use crate::bath::{BathSpec, CorrelationExpansion, Decomposition};
use crate::system::ExcitonSystem;
use crate::{CMatrix, C64};

/// Full (non-secular) tensor or its secular part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RedfieldVariant {
    #[default]
    Full,
    Secular,
}

/// Site-basis Liouvillian (internal rate units, cm⁻¹).
pub fn redfield_generator(
    system: &ExcitonSystem,
    bath: &BathSpec,
    n_thermal: usize,
    decomposition: Decomposition,
    variant: RedfieldVariant,
) -> CMatrix {
    let n = system.n_sites();
    let shift = system.mean_site_energy();
    let mut h = system.hamiltonian_complex();
    for i in 0..n {
        h[(i, i)] -= C64::new(shift, 0.0);
    }
    let (e, u_real) = system.exciton_basis();
    let u = u_real.map(|x| C64::new(x, 0.0));
    let ut = u.adjoint();
    let corr = CorrelationExpansion::new(bath, n_thermal, decomposition);
    let gamma = CMatrix::from_fn(n, n, |a, b| corr.half_fourier(-(e[a] - e[b])));
    let id = CMatrix::identity(n, n);

    let mut l = hamiltonian_superop(&h);
    for s in 0..n {
        let mut q = CMatrix::zeros(n, n);
        q[(s, s)] = C64::new(1.0, 0.0);
        let q_exc = &ut * &q * &u;
        let lam_exc = q_exc.component_mul(&gamma);
        let lam = &u * lam_exc * &ut;
        let lam_d = lam.adjoint();
        l -= sandwich(&(&q * &lam), &id);
        l += sandwich(&q, &lam_d);
        l += sandwich(&lam, &q);
        l -= sandwich(&id, &(&lam_d * &q));
    }

    if variant == RedfieldVariant::Secular {
        let to_exc = sandwich(&ut, &u);
        let to_site = sandwich(&u, &ut);
        let mut le = &to_exc * &l * &to_site;
        let scale = e.iter().fold(1.0_f64, |m, x| m.max((x - shift).abs()));
        for r in 0..n * n {
            for c in 0..n * n {
                let w_r = e[r / n] - e[r % n];
                let w_c = e[c / n] - e[c % n];
                if (w_r - w_c).abs() > 1e-9 * scale {
                    le[(r, c)] = C64::new(0.0, 0.0);
                }
            }
        }
        l = &to_site * le * &to_exc;
    }
    l
}
