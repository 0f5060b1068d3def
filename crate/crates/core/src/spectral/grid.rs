//! Torus discretization and Fourier transforms.
//!
//! The domain is `[0,2π)^d`, `d ∈ {2,3}`, sampled on `n` points per dimension
//! with `n` a power of two. Flat storage is row-major with the last axis
//! contiguous. Wavenumbers follow the standard layout
//! `k = 0, 1, …, n/2, −n/2+1, …, −1`; differentiation multipliers zero the
//! Nyquist mode `k = n/2` so derivatives of real fields stay real.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Immutable torus grid: dimensions, FFT plans, wavenumber tables and the
/// 2/3-rule dealiasing mask. Shared by all fields via `Arc`.
pub struct SpectralGrid {
    d: usize,
    n: usize,
    len: usize,
    h: f64,
    volume: f64,
    forward_plan: Arc<dyn Fft<f64>>,
    inverse_plan: Arc<dyn Fft<f64>>,
    /// Signed wavenumber for each axis index (`k[i] = i` or `i − n`).
    kval: Vec<i64>,
    /// Differentiation wavenumber: as `kval` but zero at the Nyquist index.
    kderiv: Vec<f64>,
    /// Per-mode keep flag for the 2/3 ball `|k| ≤ n/3`.
    dealias_keep: Vec<bool>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("d", &self.d)
            .field("n", &self.n)
            .finish()
    }
}

impl SpectralGrid {
    /// Builds a grid for dimension `d ∈ {2,3}` with `n` points per axis
    /// (power of two, `n ≥ 4`).
    pub fn new(d: usize, n: usize) -> Result<Arc<Self>> {
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidArgument(format!("dimension d = {d} must be 2 or 3")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "grid size n = {n} must be a power of two >= 4"
            )));
        }
        let len = n.pow(d as u32);
        let mut planner = FftPlanner::new();
        let forward_plan = planner.plan_fft_forward(n);
        let inverse_plan = planner.plan_fft_inverse(n);

        let mut kval = Vec::with_capacity(n);
        let mut kderiv = Vec::with_capacity(n);
        for i in 0..n {
            let k = if i <= n / 2 { i as i64 } else { i as i64 - n as i64 };
            kval.push(k);
            kderiv.push(if i == n / 2 { 0.0 } else { k as f64 });
        }

        let cutoff_sq = (n as f64 / 3.0) * (n as f64 / 3.0);
        let mut dealias_keep = Vec::with_capacity(len);
        for idx in 0..len {
            let mut k2 = 0i64;
            let mut rem = idx;
            for _ in 0..d {
                let k = kval[rem % n];
                k2 += k * k;
                rem /= n;
            }
            dealias_keep.push((k2 as f64) <= cutoff_sq + 1e-9);
        }

        Ok(Arc::new(Self {
            d,
            n,
            len,
            h: 2.0 * std::f64::consts::PI / n as f64,
            volume: (2.0 * std::f64::consts::PI).powi(d as i32),
            forward_plan,
            inverse_plan,
            kval,
            kderiv,
            dealias_keep,
        }))
    }

    /// Spatial dimension.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of grid points `n^d`.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True only for degenerate grids (never after construction).
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Grid spacing `2π/n`.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Torus volume `(2π)^d`.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Quadrature weight of one grid point, `volume/len`.
    pub fn cell_weight(&self) -> f64 {
        self.volume / self.len as f64
    }

    /// Integer coordinates of flat index `idx` (only the first `d` entries are
    /// meaningful).
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let mut c = [0usize; 3];
        let mut rem = idx;
        for axis in (0..self.d).rev() {
            c[axis] = rem % self.n;
            rem /= self.n;
        }
        c
    }

    /// Physical coordinates `x = 2π·c/n` of flat index `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let c = self.coords(idx);
        let mut x = [0.0f64; 3];
        for axis in 0..self.d {
            x[axis] = self.h * c[axis] as f64;
        }
        x
    }

    /// Signed wavenumber vector of spectral index `idx`.
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let c = self.coords(idx);
        let mut k = [0i64; 3];
        for axis in 0..self.d {
            k[axis] = self.kval[c[axis]];
        }
        k
    }

    /// Differentiation wavenumber along `axis` for spectral index `idx`
    /// (zero at Nyquist).
    pub fn deriv_k(&self, idx: usize, axis: usize) -> f64 {
        self.kderiv[self.coords(idx)[axis]]
    }

    /// Squared modulus `|k|²` of the signed wavenumber vector.
    pub fn mode_k2(&self, idx: usize) -> f64 {
        let k = self.mode(idx);
        (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
    }

    /// Squared modulus of the differentiation wavenumber vector.
    pub fn deriv_k2(&self, idx: usize) -> f64 {
        let c = self.coords(idx);
        let mut k2 = 0.0;
        for axis in 0..self.d {
            let k = self.kderiv[c[axis]];
            k2 += k * k;
        }
        k2
    }

    /// Whether spectral index `idx` lies inside the 2/3 dealiasing ball.
    pub fn keeps_mode(&self, idx: usize) -> bool {
        self.dealias_keep[idx]
    }

    /// Flat spectral index of the integer mode `k` (entries in
    /// `−n/2+1 ..= n/2`).
    pub fn index_of_mode(&self, k: &[i64]) -> Result<usize> {
        if k.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "mode vector has {} entries, grid dimension is {}",
                k.len(),
                self.d
            )));
        }
        let mut idx = 0usize;
        for &ki in k {
            let half = self.n as i64 / 2;
            if !(-half + 1..=half).contains(&ki) {
                return Err(Error::InvalidArgument(format!("mode component {ki} out of range")));
            }
            let i = if ki >= 0 { ki } else { ki + self.n as i64 } as usize;
            idx = idx * self.n + i;
        }
        Ok(idx)
    }

    fn transform_axis(&self, buf: &mut [Complex64], axis: usize, plan: &Arc<dyn Fft<f64>>) {
        let stride = self.n.pow((self.d - 1 - axis) as u32);
        let block = stride * self.n;
        let mut line = vec![Complex64::new(0.0, 0.0); self.n];
        for base in 0..self.len / block {
            for inner in 0..stride {
                let start = base * block + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = buf[start + j * stride];
                }
                plan.process(&mut line);
                for (j, value) in line.iter().enumerate() {
                    buf[start + j * stride] = *value;
                }
            }
        }
    }

    /// Forward transform of real samples; coefficients are normalized so the
    /// `k = 0` entry equals the mean of the field.
    pub fn forward(&self, data: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(data.len(), self.len);
        let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for axis in 0..self.d {
            self.transform_axis(&mut buf, axis, &self.forward_plan);
        }
        let scale = 1.0 / self.len as f64;
        for value in &mut buf {
            *value *= scale;
        }
        buf
    }

    /// Inverse transform; returns the real part of the reconstruction.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<f64> {
        debug_assert_eq!(spectrum.len(), self.len);
        let mut buf = spectrum.to_vec();
        for axis in 0..self.d {
            self.transform_axis(&mut buf, axis, &self.inverse_plan);
        }
        buf.into_iter().map(|v| v.re).collect()
    }
}
