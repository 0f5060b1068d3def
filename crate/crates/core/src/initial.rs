//! Manufactured initial-data catalog.
//!
//! Every entry produces a density with mean exactly `M` (the perturbations are
//! pure nonzero Fourier modes) and a band-limited velocity, so runs start from
//! well-resolved states.

use crate::error::{Error, Result};
use crate::spectral::{ScalarField, SpectralGrid, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Named initial-data families with their parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// `ρ ≡ M`, `u ≡ 0`.
    Equilibrium,
    /// Compressive mode: `ρ = M(1 + ε sin(k x₁))`, `u = (ε sin(k x₁), 0, …)`.
    Acoustic { k: i64, eps: f64 },
    /// `ρ = M(1 + ε Π_i cos(x_i))`, `u ≡ 0`.
    DensityBump { eps: f64 },
    /// Shear layer: `ρ ≡ M`, `u = (ε sin(k x₂), 0, …)`.
    Shear { k: i64, eps: f64 },
    /// Seeded random band-limited perturbation of both fields, max mode `kmax`.
    RandomBandlimited { seed: u64, kmax: i64, eps: f64 },
}

impl InitialData {
    /// Samples `(ρ₀, u₀)` on the grid for reference density `m_ref`.
    pub fn build(
        &self,
        grid: &Arc<SpectralGrid>,
        m_ref: f64,
    ) -> Result<(ScalarField, VectorField)> {
        match *self {
            InitialData::Equilibrium => Ok((
                ScalarField::constant(grid, m_ref),
                VectorField::zeros(grid),
            )),
            InitialData::Acoustic { k, eps } => {
                check_amplitude(eps)?;
                check_mode(grid, k)?;
                let kf = k as f64;
                let rho = ScalarField::from_fn(grid, |x| m_ref * (1.0 + eps * (kf * x[0]).sin()));
                let u = VectorField::from_fns(grid, |i, x| {
                    if i == 0 {
                        eps * (kf * x[0]).sin()
                    } else {
                        0.0
                    }
                });
                Ok((rho, u))
            }
            InitialData::DensityBump { eps } => {
                check_amplitude(eps)?;
                let rho = ScalarField::from_fn(grid, |x| {
                    let bump: f64 = x.iter().map(|xi| xi.cos()).product();
                    m_ref * (1.0 + eps * bump)
                });
                Ok((rho, VectorField::zeros(grid)))
            }
            InitialData::Shear { k, eps } => {
                check_amplitude(eps)?;
                check_mode(grid, k)?;
                let kf = k as f64;
                let u = VectorField::from_fns(grid, |i, x| {
                    if i == 0 {
                        eps * (kf * x[1]).sin()
                    } else {
                        0.0
                    }
                });
                Ok((ScalarField::constant(grid, m_ref), u))
            }
            InitialData::RandomBandlimited { seed, kmax, eps } => {
                check_amplitude(eps)?;
                check_mode(grid, kmax)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let pert = random_bandlimited_field(grid, &mut rng, kmax, eps);
                let rho = pert.map(|v| m_ref * (1.0 + v));
                let comps = (0..grid.d())
                    .map(|_| random_bandlimited_field(grid, &mut rng, kmax, eps))
                    .collect();
                Ok((rho, VectorField::from_comps(comps)))
            }
        }
    }
}

fn check_amplitude(eps: f64) -> Result<()> {
    if !(eps.abs() < 1.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "perturbation amplitude eps = {eps} must satisfy |eps| < 1"
        )));
    }
    Ok(())
}

fn check_mode(grid: &SpectralGrid, k: i64) -> Result<()> {
    if k <= 0 || k >= grid.n() as i64 / 3 {
        return Err(Error::InvalidArgument(format!(
            "mode k = {k} must lie in (0, n/3) for n = {}",
            grid.n()
        )));
    }
    Ok(())
}

/// Mean-free random trigonometric polynomial with modes `0 < |k|∞ ≤ kmax`,
/// scaled so the max amplitude is at most `eps`. Deterministic in the supplied
/// RNG state; modes are enumerated in a fixed order.
fn random_bandlimited_field(
    grid: &Arc<SpectralGrid>,
    rng: &mut ChaCha8Rng,
    kmax: i64,
    eps: f64,
) -> ScalarField {
    let d = grid.d();
    let mut modes: Vec<([i64; 3], f64, f64)> = Vec::new();
    let range = -kmax..=kmax;
    let mut enumerate = |k: [i64; 3]| {
        if k[..d].iter().all(|&ki| ki == 0) {
            return;
        }
        let amplitude: f64 = rng.gen_range(-1.0..1.0);
        let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        modes.push((k, amplitude, phase));
    };
    for k0 in range.clone() {
        for k1 in range.clone() {
            if d == 2 {
                enumerate([k0, k1, 0]);
            } else {
                for k2 in range.clone() {
                    enumerate([k0, k1, k2]);
                }
            }
        }
    }
    let norm: f64 = modes.iter().map(|(_, a, _)| a.abs()).sum::<f64>().max(1e-12);
    let scale = eps / norm;
    ScalarField::from_fn(grid, |x| {
        let mut value = 0.0;
        for (k, amplitude, phase) in &modes {
            let mut arg = *phase;
            for (axis, xi) in x.iter().enumerate() {
                arg += k[axis] as f64 * xi;
            }
            value += amplitude * arg.cos();
        }
        scale * value
    })
}
