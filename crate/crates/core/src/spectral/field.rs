//! Real-valued scalar/vector/matrix fields on a [`SpectralGrid`] and their
//! spectral calculus.
//!
//! All reductions (means, norms, inner products) run in flat index order so
//! results are bit-stable across reruns.

use super::grid::SpectralGrid;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Real scalar samples on the grid.
#[derive(Clone)]
pub struct ScalarField {
    grid: Arc<SpectralGrid>,
    data: Vec<f64>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField").field("grid", &self.grid).finish()
    }
}

impl ScalarField {
    /// Zero field.
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self { grid: grid.clone(), data: vec![0.0; grid.len()] }
    }

    /// Constant field.
    pub fn constant(grid: &Arc<SpectralGrid>, value: f64) -> Self {
        Self { grid: grid.clone(), data: vec![value; grid.len()] }
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: &Arc<SpectralGrid>, f: F) -> Self {
        let data = (0..grid.len())
            .map(|idx| {
                let x = grid.point(idx);
                f(&x[..grid.d()])
            })
            .collect();
        Self { grid: grid.clone(), data }
    }

    /// Wraps raw samples (length must equal `grid.len()`).
    pub fn from_data(grid: &Arc<SpectralGrid>, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "field has {} samples, grid expects {}",
                data.len(),
                grid.len()
            )));
        }
        Ok(Self { grid: grid.clone(), data })
    }

    /// Reconstructs a real field from spectral coefficients.
    pub fn from_spectrum(grid: &Arc<SpectralGrid>, spectrum: &[Complex64]) -> Self {
        Self { grid: grid.clone(), data: grid.inverse(spectrum) }
    }

    /// Grid handle.
    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    /// Raw samples.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Mutable raw samples.
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Forward transform (normalized: entry at `k = 0` is the mean).
    pub fn to_spectrum(&self) -> Vec<Complex64> {
        self.grid.forward(&self.data)
    }

    /// Mean value over the torus.
    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Integral over the torus (cell-weighted sum; spectrally accurate).
    pub fn integral(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.grid.cell_weight()
    }

    /// `L^p` norm with the `(2π)^d` volume element.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let sum: f64 = self.data.iter().map(|v| v.abs().powf(p)).sum();
        (sum * self.grid.cell_weight()).powf(1.0 / p)
    }

    /// `L²` norm.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Squared `L²` norm.
    pub fn l2_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_weight()
    }

    /// `L²` inner product `∫ f·g`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum::<f64>()
            * self.grid.cell_weight()
    }

    /// Minimum sample value.
    pub fn min_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Maximum sample value.
    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Maximum absolute sample value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// True iff every sample is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Pointwise map into a new field.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self { grid: self.grid.clone(), data: self.data.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a * b)
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    /// Pointwise difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    /// Pointwise binary combination.
    pub fn zip<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Self {
        debug_assert_eq!(self.data.len(), other.data.len());
        Self {
            grid: self.grid.clone(),
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, alpha: f64) -> Self {
        self.map(|v| alpha * v)
    }

    /// In-place `self += alpha·other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// Spectral derivative `∂_axis` (multiplication by `i·k`, Nyquist zeroed).
    pub fn deriv(&self, axis: usize) -> Self {
        let mut spectrum = self.to_spectrum();
        for (idx, value) in spectrum.iter_mut().enumerate() {
            let k = self.grid.deriv_k(idx, axis);
            *value *= Complex64::new(0.0, k);
        }
        Self::from_spectrum(&self.grid, &spectrum)
    }

    /// Gradient vector field.
    pub fn grad(&self) -> VectorField {
        let comps = (0..self.grid.d()).map(|axis| self.deriv(axis)).collect();
        VectorField { comps }
    }

    /// Spectral Laplacian (consistent with `div∘grad`, Nyquist zeroed).
    pub fn laplacian(&self) -> Self {
        let mut spectrum = self.to_spectrum();
        for (idx, value) in spectrum.iter_mut().enumerate() {
            *value *= -self.grid.deriv_k2(idx);
        }
        Self::from_spectrum(&self.grid, &spectrum)
    }

    /// Mollification `ω_δ∗f` via the Gaussian symbol `exp(−(δ|k|)²/2)`.
    ///
    /// Mass-preserving (`m_δ(0)=1`), self-adjoint, `0 ≤ m_δ ≤ 1`.
    pub fn mollify(&self, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mollification width delta = {delta} must be > 0"
            )));
        }
        let mut spectrum = self.to_spectrum();
        for (idx, value) in spectrum.iter_mut().enumerate() {
            let k2 = self.grid.mode_k2(idx);
            *value *= (-0.5 * delta * delta * k2).exp();
        }
        Ok(Self::from_spectrum(&self.grid, &spectrum))
    }

    /// Projects onto the 2/3 dealiasing ball (idempotent).
    pub fn dealias(&self) -> Self {
        let mut spectrum = self.to_spectrum();
        for (idx, value) in spectrum.iter_mut().enumerate() {
            if !self.grid.keeps_mode(idx) {
                *value = Complex64::new(0.0, 0.0);
            }
        }
        Self::from_spectrum(&self.grid, &spectrum)
    }
}

/// Real vector field; `comps.len()` equals the grid dimension (or the curl
/// arity for curl outputs).
#[derive(Clone, Debug)]
pub struct VectorField {
    pub(crate) comps: Vec<ScalarField>,
}

impl VectorField {
    /// Zero vector field with `d` components.
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self { comps: (0..grid.d()).map(|_| ScalarField::zeros(grid)).collect() }
    }

    /// Builds from component closures evaluated at grid points.
    pub fn from_fns<F: Fn(usize, &[f64]) -> f64>(grid: &Arc<SpectralGrid>, f: F) -> Self {
        let comps = (0..grid.d())
            .map(|i| ScalarField::from_fn(grid, |x| f(i, x)))
            .collect();
        Self { comps }
    }

    /// Wraps existing components.
    pub fn from_comps(comps: Vec<ScalarField>) -> Self {
        Self { comps }
    }

    /// Number of components.
    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    /// Component accessor.
    pub fn comp(&self, i: usize) -> &ScalarField {
        &self.comps[i]
    }

    /// Mutable component accessor.
    pub fn comp_mut(&mut self, i: usize) -> &mut ScalarField {
        &mut self.comps[i]
    }

    /// Grid handle (from the first component).
    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.comps[0].grid()
    }

    /// Divergence `Σ_i ∂_i v^i`.
    pub fn div(&self) -> ScalarField {
        let mut out = self.comps[0].deriv(0);
        for (axis, comp) in self.comps.iter().enumerate().skip(1) {
            out.axpy(1.0, &comp.deriv(axis));
        }
        out
    }

    /// Curl: one component (`∂₁v² − ∂₂v¹`) for `d = 2`, three for `d = 3`.
    pub fn curl(&self) -> VectorField {
        let d = self.grid().d();
        if d == 2 {
            let mut w = self.comps[1].deriv(0);
            w.axpy(-1.0, &self.comps[0].deriv(1));
            VectorField { comps: vec![w] }
        } else {
            let mut comps = Vec::with_capacity(3);
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                let mut w = self.comps[k].deriv(j);
                w.axpy(-1.0, &self.comps[j].deriv(k));
                comps.push(w);
            }
            VectorField { comps }
        }
    }

    /// Velocity-gradient matrix `G_ij = ∂_j v^i`.
    pub fn grad(&self) -> TensorField {
        let d = self.grid().d();
        let mut comps = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                comps.push(self.comps[i].deriv(j));
            }
        }
        TensorField { d, comps }
    }

    /// Componentwise mollification.
    pub fn mollify(&self, delta: f64) -> Result<Self> {
        let comps = self
            .comps
            .iter()
            .map(|c| c.mollify(delta))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { comps })
    }

    /// Componentwise dealiasing projection.
    pub fn dealias(&self) -> Self {
        Self { comps: self.comps.iter().map(|c| c.dealias()).collect() }
    }

    /// Pointwise magnitude `|v|`.
    pub fn magnitude(&self) -> ScalarField {
        let grid = self.grid().clone();
        let mut data = vec![0.0; grid.len()];
        for comp in &self.comps {
            for (slot, v) in data.iter_mut().zip(comp.data()) {
                *slot += v * v;
            }
        }
        for slot in &mut data {
            *slot = slot.sqrt();
        }
        ScalarField::from_data(&grid, data).expect("shape by construction")
    }

    /// `L^p` norm of the pointwise magnitude.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.magnitude().lp_norm(p)
    }

    /// Squared `L²` norm (sum over components).
    pub fn l2_norm_sq(&self) -> f64 {
        self.comps.iter().map(|c| c.l2_norm_sq()).sum()
    }

    /// `L²` norm.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `L²` inner product summed over components.
    pub fn inner(&self, other: &Self) -> f64 {
        self.comps.iter().zip(&other.comps).map(|(a, b)| a.inner(b)).sum()
    }

    /// Componentwise difference.
    pub fn sub(&self, other: &Self) -> Self {
        Self {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    /// In-place `self += alpha·other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.axpy(alpha, b);
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, alpha: f64) -> Self {
        Self { comps: self.comps.iter().map(|c| c.scale(alpha)).collect() }
    }

    /// Pointwise product with a scalar field, componentwise.
    pub fn mul_scalar_field(&self, s: &ScalarField) -> Self {
        Self { comps: self.comps.iter().map(|c| c.mul(s)).collect() }
    }

    /// True iff all samples are finite.
    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.is_finite())
    }
}

/// Real `d×d` matrix field, row-major components (`comp(i,j)` is entry `ij`).
#[derive(Clone, Debug)]
pub struct TensorField {
    pub(crate) d: usize,
    pub(crate) comps: Vec<ScalarField>,
}

impl TensorField {
    /// Zero matrix field.
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        let d = grid.d();
        Self { d, comps: (0..d * d).map(|_| ScalarField::zeros(grid)).collect() }
    }

    /// Wraps `d²` row-major components.
    pub fn from_comps(d: usize, comps: Vec<ScalarField>) -> Result<Self> {
        if comps.len() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "matrix field needs {} components, got {}",
                d * d,
                comps.len()
            )));
        }
        Ok(Self { d, comps })
    }

    /// Matrix dimension.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Entry accessor.
    pub fn comp(&self, i: usize, j: usize) -> &ScalarField {
        &self.comps[i * self.d + j]
    }

    /// Grid handle.
    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.comps[0].grid()
    }

    /// Divergence `(div T)_i = Σ_j ∂_j T_ij`.
    pub fn divergence(&self) -> VectorField {
        let mut comps = Vec::with_capacity(self.d);
        for i in 0..self.d {
            let mut out = self.comp(i, 0).deriv(0);
            for j in 1..self.d {
                out.axpy(1.0, &self.comp(i, j).deriv(j));
            }
            comps.push(out);
        }
        VectorField { comps }
    }

    /// Pointwise matrix product `(A·B)_ij = Σ_q A_iq B_qj`.
    pub fn matmul(&self, other: &Self) -> Self {
        let grid = self.grid().clone();
        let mut comps = Vec::with_capacity(self.d * self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                let mut out = ScalarField::zeros(&grid);
                for q in 0..self.d {
                    out.axpy(1.0, &self.comp(i, q).mul(other.comp(q, j)));
                }
                comps.push(out);
            }
        }
        Self { d: self.d, comps }
    }

    /// Pointwise Frobenius contraction `Σ_ij A_ij B_ij`.
    pub fn contract(&self, other: &Self) -> ScalarField {
        let grid = self.grid().clone();
        let mut out = ScalarField::zeros(&grid);
        for (a, b) in self.comps.iter().zip(&other.comps) {
            out.axpy(1.0, &a.mul(b));
        }
        out
    }

    /// Pointwise transpose.
    pub fn transpose(&self) -> Self {
        let mut comps = Vec::with_capacity(self.d * self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                comps.push(self.comp(j, i).clone());
            }
        }
        Self { d: self.d, comps }
    }

    /// Pointwise trace.
    pub fn trace(&self) -> ScalarField {
        let grid = self.grid().clone();
        let mut out = ScalarField::zeros(&grid);
        for i in 0..self.d {
            out.axpy(1.0, self.comp(i, i));
        }
        out
    }

    /// Squared Frobenius `L²` norm.
    pub fn l2_norm_sq(&self) -> f64 {
        self.comps.iter().map(|c| c.l2_norm_sq()).sum()
    }

    /// `L^p` norm of the pointwise Frobenius magnitude.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let grid = self.grid().clone();
        let mut data = vec![0.0; grid.len()];
        for comp in &self.comps {
            for (slot, v) in data.iter_mut().zip(comp.data()) {
                *slot += v * v;
            }
        }
        for slot in &mut data {
            *slot = slot.sqrt();
        }
        ScalarField::from_data(&grid, data).expect("shape by construction").lp_norm(p)
    }

    /// Componentwise mollification.
    pub fn mollify(&self, delta: f64) -> Result<Self> {
        let comps = self
            .comps
            .iter()
            .map(|c| c.mollify(delta))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { d: self.d, comps })
    }

    /// In-place `self += alpha·other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.axpy(alpha, b);
        }
    }
}
