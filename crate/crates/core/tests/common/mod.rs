//! Independent reference computations shared by the oracle tests and the
//! acceptance target.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C;

use qbath::bath::coupling_density;
use qbath::units::{beta, CM_PER_FS};
use qbath::BathSpec;

pub type CM = DMatrix<C>;

/// Tail of (1/π)∫_Ω^∞ (a/ω) e^{−iωt} dω via the asymptotic Ci/Si series.
pub fn drude_tail(a: f64, x: f64) -> C {
    let (mut f, mut g) = (0.0, 0.0);
    let (mut tf, mut tg) = (1.0 / x, 1.0 / (x * x));
    for n in 0..6 {
        f += tf;
        g += tg;
        let k = 2.0 * n as f64;
        tf *= -(k + 1.0) * (k + 2.0) / (x * x);
        tg *= -(k + 2.0) * (k + 3.0) / (x * x);
    }
    let (s, c) = x.sin_cos();
    let neg_ci = g * c - f * s;
    let si_rest = f * c + g * s;
    C::new(a * neg_ci, -a * si_rest) / std::f64::consts::PI
}

/// C(t) = (1/π)∫₀^∞ J(ω)[coth(βω/2)cos ωt − i sin ωt] dω by composite Simpson.
pub fn correlation_quadrature(t_fs: f64, bath: &BathSpec) -> C {
    let b = beta(bath.temperature());
    let t = t_fs * CM_PER_FS;
    let omega_max = 2.0e5;
    let n = 800_000usize;
    let h = omega_max / n as f64;
    let f = |w: f64| -> C {
        let w = w.max(1e-9);
        let j = coupling_density(w, bath);
        let coth = 1.0 / (b * w / 2.0).tanh();
        j * C::new(coth * (w * t).cos(), -(w * t).sin())
    };
    let mut s = f(0.0) + f(omega_max);
    for k in 1..n {
        let wgt = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += f(k as f64 * h) * wgt;
    }
    let body = s * h / 3.0 / std::f64::consts::PI;
    // beyond Ω the Drude term is 2λγ/ω and coth(βΩ/2) = 1 to machine precision
    body + drude_tail(2.0 * bath.drude_lambda() * bath.drude_gamma(), omega_max * t)
}

pub fn exact_unitary(h: &DMatrix<f64>, t_fs: f64) -> CM {
    let eig = SymmetricEigen::new(h.clone());
    let n = h.nrows();
    let v = eig.eigenvectors.map(|x| C::new(x, 0.0));
    let phases = CM::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        eig.eigenvalues.iter().map(|&e| C::from_polar(1.0, -e * t_fs * CM_PER_FS)),
    ));
    &v * phases * v.adjoint()
}

pub fn herm_sqrt(m: &CM) -> CM {
    let e = SymmetricEigen::new(m.clone());
    let d = CM::from_diagonal(&e.eigenvalues.map(|x| C::new(x.max(0.0).sqrt(), 0.0)));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

pub fn fidelity(a: &CM, b: &CM) -> f64 {
    let sa = herm_sqrt(a);
    let inner = &sa * b * &sa;
    let inner = (&inner + inner.adjoint()) * C::new(0.5, 0.0);
    SymmetricEigen::new(inner).eigenvalues.iter().map(|x| x.max(0.0).sqrt()).sum::<f64>()
}

/// F_Q from the Bures metric, 8(1 − √F(ρ_θ, ρ_{θ+dθ}))/dθ², Richardson-extrapolated.
pub fn qfi_finite_difference(rho: &CM, g: &CM) -> f64 {
    let eig = SymmetricEigen::new(g.clone());
    let rotate = |th: f64| {
        let d = CM::from_diagonal(&eig.eigenvalues.map(|x| C::from_polar(1.0, -x * th)));
        let u = &eig.eigenvectors * d * eig.eigenvectors.adjoint();
        &u * rho * u.adjoint()
    };
    let est = |h: f64| 8.0 * (1.0 - fidelity(rho, &rotate(h))) / (h * h);
    let h = 2e-3;
    (4.0 * est(h) - est(2.0 * h)) / 3.0
}

pub fn random_state(d: usize, seed: &[f64]) -> CM {
    let mut a = CM::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let k = 2 * (i * d + j);
            a[(i, j)] = C::new(seed[k % seed.len()], seed[(k + 1) % seed.len()]);
        }
    }
    let m = &a * a.adjoint() + CM::identity(d, d) * C::new(0.05, 0.0);
    let tr = m.trace();
    m / tr
}

pub fn random_hermitian(d: usize, seed: &[f64]) -> CM {
    let mut a = CM::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let k = 2 * (i * d + j) + 7;
            a[(i, j)] = C::new(seed[k % seed.len()], seed[(k + 3) % seed.len()]);
        }
    }
    (&a + a.adjoint()) * C::new(0.5, 0.0)
}

/// Full Wootters construction: C = max(0, λ₁−λ₂−λ₃−λ₄), λ² = eig(√ρ ρ̃ √ρ).
pub fn wootters(rho: &CM) -> f64 {
    let z = C::new(0.0, 0.0);
    let o = C::new(1.0, 0.0);
    let sy = CM::from_row_slice(2, 2, &[z, C::new(0.0, -1.0), C::new(0.0, 1.0), z]);
    let yy = sy.kronecker(&sy);
    let tilde = &yy * rho.map(|x| x.conj()) * &yy;
    let s = herm_sqrt(rho);
    let r = &s * tilde * &s;
    let r = (&r + r.adjoint()) * (o * 0.5);
    let mut l: Vec<f64> = SymmetricEigen::new(r).eigenvalues.iter().map(|x| x.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}
