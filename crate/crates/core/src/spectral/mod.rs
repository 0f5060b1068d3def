//! Discrete calculus on the periodic torus: grid/transform infrastructure,
//! fields, inverse-Laplacian Fourier multipliers, the DiPerna-Lions
//! commutators and the Calderón-Zygmund norm split.

mod field;
mod grid;

pub use field::{ScalarField, TensorField, VectorField};
pub use grid::SpectralGrid;

use crate::error::Result;
use num_complex::Complex64;

/// `Δ⁻¹ div v`: spectral symbol `−i·k/|k|²` contracted with `v̂`; the `k = 0`
/// mode is projected out so the output is mean-free.
pub fn inv_lap_div(v: &VectorField) -> ScalarField {
    let grid = v.grid().clone();
    let spectra: Vec<Vec<Complex64>> =
        (0..v.ncomp()).map(|i| v.comp(i).to_spectrum()).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (idx, slot) in out.iter_mut().enumerate() {
        let k2 = grid.deriv_k2(idx);
        if k2 == 0.0 {
            continue;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (axis, spectrum) in spectra.iter().enumerate() {
            acc += Complex64::new(0.0, -grid.deriv_k(idx, axis) / k2) * spectrum[idx];
        }
        *slot = acc;
    }
    ScalarField::from_spectrum(&grid, &out)
}

/// `Δ⁻¹ curl v`: scalar (one component) for `d = 2`, vector for `d = 3`;
/// mean-free like [`inv_lap_div`].
pub fn inv_lap_curl(v: &VectorField) -> VectorField {
    let grid = v.grid().clone();
    let curl = v.curl();
    let mut comps = Vec::with_capacity(curl.ncomp());
    for i in 0..curl.ncomp() {
        let mut spectrum = curl.comp(i).to_spectrum();
        for (idx, value) in spectrum.iter_mut().enumerate() {
            let k2 = grid.deriv_k2(idx);
            *value = if k2 == 0.0 { Complex64::new(0.0, 0.0) } else { -*value / k2 };
        }
        comps.push(ScalarField::from_spectrum(&grid, &spectrum));
    }
    VectorField::from_comps(comps)
}

/// DiPerna-Lions commutator `r_δ¹(a,b)`: component `i` equals
/// `b·∂_i(ω_δ∗a) − ω_δ∗(b·∂_i a)`.
pub fn commutator_r1(a: &ScalarField, b: &ScalarField, delta: f64) -> Result<VectorField> {
    let d = a.grid().d();
    let a_mollified = a.mollify(delta)?;
    let mut comps = Vec::with_capacity(d);
    for axis in 0..d {
        let first = b.mul(&a_mollified.deriv(axis));
        let second = b.mul(&a.deriv(axis)).mollify(delta)?;
        comps.push(first.sub(&second));
    }
    Ok(VectorField::from_comps(comps))
}

/// Commutator variant `r_δ²(a,b)`: component `i` equals
/// `∂_i((ω_δ∗a)·b) − ∂_i(ω_δ∗(a·b))`.
pub fn commutator_r2(a: &ScalarField, b: &ScalarField, delta: f64) -> Result<VectorField> {
    let d = a.grid().d();
    let a_mollified = a.mollify(delta)?;
    let product_mollified = a.mul(b).mollify(delta)?;
    let mut comps = Vec::with_capacity(d);
    for axis in 0..d {
        let first = a_mollified.mul(b).deriv(axis);
        let second = product_mollified.deriv(axis);
        comps.push(first.sub(&second));
    }
    Ok(VectorField::from_comps(comps))
}

/// Convective commutator `Σ_q [u^q, ω_δ∗] ∂_q g = Σ_q (u^q·∂_q(ω_δ∗g) −
/// ω_δ∗(u^q·∂_q g))` — the form entering the Hoff identity residuals.
pub fn convective_commutator(u: &VectorField, g: &ScalarField, delta: f64) -> Result<ScalarField> {
    let grid = g.grid().clone();
    let g_mollified = g.mollify(delta)?;
    let mut transported = ScalarField::zeros(&grid);
    let mut transported_raw = ScalarField::zeros(&grid);
    for axis in 0..grid.d() {
        transported.axpy(1.0, &u.comp(axis).mul(&g_mollified.deriv(axis)));
        transported_raw.axpy(1.0, &u.comp(axis).mul(&g.deriv(axis)));
    }
    Ok(transported.sub(&transported_raw.mollify(delta)?))
}

/// Calderón-Zygmund split: `(‖curl u‖_p, ‖div u‖_p, ‖∇u‖_p)` with grid `L^p`
/// norms. For `p = 2` and mean-free `u` the Plancherel identity
/// `‖∇u‖₂² = ‖div u‖₂² + ‖curl u‖₂²` holds.
pub fn cz_split_norms(u: &VectorField, p: f64) -> (f64, f64, f64) {
    let curl_norm = u.curl().lp_norm(p);
    let div_norm = u.div().lp_norm(p);
    let grad_norm = u.grad().lp_norm(p);
    (curl_norm, div_norm, grad_norm)
}
