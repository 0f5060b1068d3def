//! Fourth-order viscous-stress tensors `E = (ε_ijkl)`.
//!
//! A tensor is a constant core `eps_core` (d⁴ coefficients, row-major over
//! `(i,j,k,l)`) optionally modulated by a separable factor
//! `amp(t)·profile(x)`. The separable form gives exact analytic `∂_t ε` and
//! `∇ε` — required by the identity-residual integrals — without finite
//! differencing.
//!
//! Structural hypotheses:
//!
//! * **H1** symmetry `ε_ijkl = ε_klij`;
//! * **H2** two-sided coercivity, quantified by the eigenvalues of the
//!   symmetric `d²×d²` matrix `M_(ij),(kl) = ε_ijkl`; the margin `μ − ε_lower`
//!   must stay positive;
//! * **H3** regularity: `∂_t ε` and `∇ε` bounded (automatic here, reported);
//! * **H4** smallness: `sup‖ε‖ ≤ η·min{μ, 2μ+λ}`.

use crate::error::{Error, Result};
use crate::spectral::{ScalarField, SpectralGrid, TensorField, VectorField};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Time factor of the separable modulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Amp {
    /// `amp(t) = 1`.
    Const,
    /// `amp(t) = sin(ω t)`.
    Sin { omega: f64 },
}

impl Amp {
    /// `amp(t)`.
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Amp::Const => 1.0,
            Amp::Sin { omega } => (omega * t).sin(),
        }
    }

    /// Exact derivative `amp'(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Amp::Const => 0.0,
            Amp::Sin { omega } => omega * (omega * t).cos(),
        }
    }
}

/// Space factor of the separable modulation, with analytic gradient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    /// `profile(x) = 1`.
    Const,
    /// `profile(x) = cos(x_axis)`.
    CosAxis { axis: usize },
}

impl Profile {
    /// `profile(x)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Profile::Const => 1.0,
            Profile::CosAxis { axis } => x[*axis].cos(),
        }
    }

    /// Component `axis` of `∇profile(x)`.
    pub fn grad_comp(&self, x: &[f64], comp: usize) -> f64 {
        match self {
            Profile::Const => 0.0,
            Profile::CosAxis { axis } => {
                if comp == *axis {
                    -x[*axis].sin()
                } else {
                    0.0
                }
            }
        }
    }
}

/// Separable space-time modulation `amp(t)·profile(x)` of the constant core.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Modulation {
    pub amp: Amp,
    pub profile: Profile,
}

/// Two-sided coercivity data of the `d²×d²` symmetric representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoercivitySpectrum {
    /// Smallest eigenvalue.
    pub lambda_min: f64,
    /// Largest eigenvalue.
    pub lambda_max: f64,
    /// Upper form bound `ε̄ = max(λ_max, 0)`.
    pub eps_upper: f64,
    /// Lower form bound `ε_lower = max(−λ_min, 0)`.
    pub eps_lower: f64,
}

/// Outcome of the hypothesis checks (H1)–(H4).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesesReport {
    /// Largest `|ε_ijkl − ε_klij|` over the core.
    pub symmetry_violation: f64,
    /// A violating quadruple, if any.
    pub symmetry_witness: Option<(usize, usize, usize, usize)>,
    /// Worst-case spectrum over the sampled modulation factors.
    pub spectrum: CoercivitySpectrum,
    /// Coercivity margin `μ − ε_lower`.
    pub coercivity_margin: f64,
    /// `sup_(t,x,ijkl) |ε_ijkl|` over the samples.
    pub sup_eps: f64,
    /// `sup‖ε‖ / (η·min{μ, 2μ+λ})`; H4 passes iff ≤ 1.
    pub h4_ratio: f64,
    /// `sup‖∂_t ε‖` over the samples (H3, reported).
    pub sup_dt_eps: f64,
    /// `sup‖∇ε‖` over the samples (H3, reported).
    pub sup_grad_eps: f64,
    /// Sufficient-positivity flag `λ_min ≥ 0` (the stronger remark-level option).
    pub positive_form: bool,
    /// Named failures ("H1: …", "H2: …", "H4: …"); empty iff all pass.
    pub failures: Vec<String>,
}

impl HypothesesReport {
    /// True iff every checked hypothesis holds.
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Fourth-order viscous-stress tensor with isotropic part `(μ, λ)`.
#[derive(Debug, Clone)]
pub struct ViscosityTensor {
    mu: f64,
    lambda: f64,
    d: usize,
    eps_core: Vec<f64>,
    modulation: Option<Modulation>,
}

impl ViscosityTensor {
    /// Validating constructor; `eps_core` is row-major over `(i,j,k,l)` with
    /// length `d⁴`. Symmetry is *not* forced here — `check_hypotheses`
    /// reports violations; use [`Self::symmetrize`] to build symmetric cores.
    pub fn new(
        mu: f64,
        lambda: f64,
        d: usize,
        eps_core: Vec<f64>,
        modulation: Option<Modulation>,
    ) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidArgument(format!("dimension d = {d} must be 2 or 3")));
        }
        if !(mu > 0.0) {
            return Err(Error::InvalidArgument(format!("shear viscosity mu = {mu} must be > 0")));
        }
        if mu + lambda < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "viscosities must satisfy mu + lambda >= 0 (mu = {mu}, lambda = {lambda})"
            )));
        }
        if eps_core.len() != d.pow(4) {
            return Err(Error::DimensionMismatch(format!(
                "eps_core has {} entries, expected d^4 = {}",
                eps_core.len(),
                d.pow(4)
            )));
        }
        if let Some(m) = &modulation {
            if let Profile::CosAxis { axis } = m.profile {
                if axis >= d {
                    return Err(Error::InvalidArgument(format!(
                        "profile axis {axis} out of range for d = {d}"
                    )));
                }
            }
        }
        Ok(Self { mu, lambda, d, eps_core, modulation })
    }

    /// Zero anisotropic part.
    pub fn zero(d: usize, mu: f64, lambda: f64) -> Result<Self> {
        Self::new(mu, lambda, d, vec![0.0; d.pow(4)], None)
    }

    /// `ε_ijkl = c·δ_ik δ_jl` (scaled identity on the `d²` strain space).
    pub fn scaled_identity(d: usize, mu: f64, lambda: f64, c: f64) -> Result<Self> {
        let mut core = vec![0.0; d.pow(4)];
        for i in 0..d {
            for j in 0..d {
                core[((i * d + j) * d + i) * d + j] = c;
            }
        }
        Self::new(mu, lambda, d, core, None)
    }

    /// Full isotropic tensor `ε_ijkl = μ̃(δ_ik δ_jl + δ_il δ_jk) + λ̃ δ_ij δ_kl`,
    /// whose divergence is `μ̃Δu + (μ̃+λ̃)∇div u`.
    pub fn isotropic(d: usize, mu: f64, lambda: f64, mu_t: f64, lambda_t: f64) -> Result<Self> {
        let mut core = vec![0.0; d.pow(4)];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut value = 0.0;
                        if i == k && j == l {
                            value += mu_t;
                        }
                        if i == l && j == k {
                            value += mu_t;
                        }
                        if i == j && k == l {
                            value += lambda_t;
                        }
                        core[((i * d + j) * d + k) * d + l] = value;
                    }
                }
            }
        }
        Self::new(mu, lambda, d, core, None)
    }

    /// Random H1-symmetric core with entries in `[−amp, amp]`, reproducible
    /// from `seed`.
    pub fn random_symmetric(d: usize, mu: f64, lambda: f64, seed: u64, amp: f64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..d.pow(4)).map(|_| rng.gen_range(-amp..amp)).collect();
        Self::new(mu, lambda, d, Self::symmetrize(d, &raw), None)
    }

    /// Symmetrizes a coefficient table under `(ij) ↔ (kl)`.
    pub fn symmetrize(d: usize, raw: &[f64]) -> Vec<f64> {
        let idx = |i: usize, j: usize, k: usize, l: usize| ((i * d + j) * d + k) * d + l;
        let mut out = vec![0.0; raw.len()];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        out[idx(i, j, k, l)] = 0.5 * (raw[idx(i, j, k, l)] + raw[idx(k, l, i, j)]);
                    }
                }
            }
        }
        out
    }

    /// Returns a copy with the given modulation attached.
    pub fn with_modulation(mut self, modulation: Option<Modulation>) -> Self {
        self.modulation = modulation;
        self
    }

    /// Shear viscosity μ.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Second viscosity λ.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Spatial dimension.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Core coefficient table (row-major over `(i,j,k,l)`).
    pub fn eps_core(&self) -> &[f64] {
        &self.eps_core
    }

    /// Modulation, if any.
    pub fn modulation(&self) -> Option<&Modulation> {
        self.modulation.as_ref()
    }

    /// Core entry `ε_ijkl`.
    pub fn entry(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.eps_core[((i * self.d + j) * self.d + k) * self.d + l]
    }

    /// Largest `|ε_ijkl − ε_klij|` with a witnessing quadruple.
    pub fn symmetry_violation(&self) -> (f64, Option<(usize, usize, usize, usize)>) {
        let mut worst = 0.0;
        let mut witness = None;
        for i in 0..self.d {
            for j in 0..self.d {
                for k in 0..self.d {
                    for l in 0..self.d {
                        let gap = (self.entry(i, j, k, l) - self.entry(k, l, i, j)).abs();
                        if gap > worst {
                            worst = gap;
                            witness = Some((i, j, k, l));
                        }
                    }
                }
            }
        }
        (worst, witness)
    }

    /// The `d²×d²` matrix `M_(ij),(kl) = ε_ijkl` (symmetrized for numerics).
    pub fn core_matrix(&self) -> DMatrix<f64> {
        let d2 = self.d * self.d;
        let raw = DMatrix::from_fn(d2, d2, |row, col| {
            let (i, j) = (row / self.d, row % self.d);
            let (k, l) = (col / self.d, col % self.d);
            self.entry(i, j, k, l)
        });
        0.5 * (&raw + raw.transpose())
    }

    /// Eigen-decomposition of the core quadratic form; errors when the
    /// coercivity margin `μ − ε_lower` is not positive.
    pub fn coercivity_bounds(&self) -> Result<CoercivitySpectrum> {
        let spectrum = self.core_spectrum();
        if self.mu - spectrum.eps_lower <= 0.0 {
            return Err(Error::Hypothesis {
                name: "H2".into(),
                detail: format!(
                    "coercivity margin mu - eps_lower = {} - {} <= 0",
                    self.mu, spectrum.eps_lower
                ),
            });
        }
        Ok(spectrum)
    }

    /// Spectrum of the core matrix without the margin gate.
    pub fn core_spectrum(&self) -> CoercivitySpectrum {
        let eigen = SymmetricEigen::new(self.core_matrix());
        let lambda_min = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let lambda_max = eigen.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        CoercivitySpectrum {
            lambda_min,
            lambda_max,
            eps_upper: lambda_max.max(0.0),
            eps_lower: (-lambda_min).max(0.0),
        }
    }

    /// Modulation factor `amp(t)·profile(x)` (1 when unmodulated).
    pub fn modulation_factor(&self, t: f64, x: &[f64]) -> f64 {
        match &self.modulation {
            None => 1.0,
            Some(m) => m.amp.value(t) * m.profile.value(x),
        }
    }

    /// Modulation factor sampled on a grid.
    pub fn modulation_field(&self, grid: &Arc<SpectralGrid>, t: f64) -> ScalarField {
        match &self.modulation {
            None => ScalarField::constant(grid, 1.0),
            Some(m) => {
                let amp = m.amp.value(t);
                ScalarField::from_fn(grid, |x| amp * m.profile.value(x))
            }
        }
    }

    /// Exact derivative factors at time `t`:
    /// `∂_t ε = dt_factor(x)·eps_core` and `∇ε = grad_factor(x)·eps_core`.
    pub fn tensor_derivatives(
        &self,
        grid: &Arc<SpectralGrid>,
        t: f64,
    ) -> (ScalarField, VectorField) {
        match &self.modulation {
            None => (ScalarField::zeros(grid), VectorField::zeros(grid)),
            Some(m) => {
                let damp = m.amp.derivative(t);
                let amp = m.amp.value(t);
                let dt_factor = ScalarField::from_fn(grid, |x| damp * m.profile.value(x));
                let grad_factor = VectorField::from_fns(grid, |axis, x| {
                    amp * m.profile.grad_comp(x, axis)
                });
                (dt_factor, grad_factor)
            }
        }
    }

    /// Contraction `(E(∇u))_ij = ε_ijkl(t,x)·G_kl(x)` for a gradient field `G`.
    pub fn apply(&self, grad_u: &TensorField, t: f64) -> Result<TensorField> {
        if grad_u.d() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "gradient field dimension {} vs tensor dimension {}",
                grad_u.d(),
                self.d
            )));
        }
        let grid = grad_u.grid().clone();
        let core_applied = self.core_apply(grad_u);
        match &self.modulation {
            None => Ok(core_applied),
            Some(_) => {
                let factor = self.modulation_field(&grid, t);
                let mut comps = Vec::with_capacity(self.d * self.d);
                for i in 0..self.d {
                    for j in 0..self.d {
                        comps.push(core_applied.comp(i, j).mul(&factor));
                    }
                }
                TensorField::from_comps(self.d, comps)
            }
        }
    }

    /// Core contraction without the modulation factor.
    pub fn core_apply(&self, grad_u: &TensorField) -> TensorField {
        let grid = grad_u.grid().clone();
        let mut comps = Vec::with_capacity(self.d * self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                let mut out = ScalarField::zeros(&grid);
                for k in 0..self.d {
                    for l in 0..self.d {
                        let coeff = self.entry(i, j, k, l);
                        if coeff != 0.0 {
                            out.axpy(coeff, grad_u.comp(k, l));
                        }
                    }
                }
                comps.push(out);
            }
        }
        TensorField::from_comps(self.d, comps).expect("shape by construction")
    }

    /// Pointwise bilinear core contraction `Σ ε_ijkl A_ij(x) B_kl(x)`
    /// (modulation not included; multiply by [`Self::modulation_field`]).
    pub fn core_bilinear(&self, a: &TensorField, b: &TensorField) -> ScalarField {
        let grid = a.grid().clone();
        let mut out = ScalarField::zeros(&grid);
        for i in 0..self.d {
            for j in 0..self.d {
                for k in 0..self.d {
                    for l in 0..self.d {
                        let coeff = self.entry(i, j, k, l);
                        if coeff != 0.0 {
                            out.axpy(coeff, &a.comp(i, j).mul(b.comp(k, l)));
                        }
                    }
                }
            }
        }
        out
    }

    /// Largest `|ε_ijkl|` of the core.
    pub fn core_sup(&self) -> f64 {
        self.eps_core.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Checks hypotheses (H1), (H2), (H4) and reports (H3) sup-norms over the
    /// supplied time and space samples.
    pub fn check_hypotheses(
        &self,
        eta: f64,
        time_samples: &[f64],
        space_samples: &[[f64; 3]],
    ) -> Result<HypothesesReport> {
        if !(eta > 0.0) {
            return Err(Error::InvalidArgument(format!("eta = {eta} must be > 0")));
        }
        if time_samples.is_empty() || space_samples.is_empty() {
            return Err(Error::InvalidArgument("sample sets must be nonempty".into()));
        }
        let (symmetry_violation, symmetry_witness) = self.symmetry_violation();
        let base = self.core_spectrum();
        let core_sup = self.core_sup();

        // Worst-case modulation factors over the sample set. An unmodulated
        // tensor has constant factor 1.
        let mut factor_min = f64::INFINITY;
        let mut factor_max = f64::NEG_INFINITY;
        let mut sup_dt = 0.0f64;
        let mut sup_grad = 0.0f64;
        for &t in time_samples {
            for x in space_samples {
                let c = self.modulation_factor(t, &x[..self.d]);
                factor_min = factor_min.min(c);
                factor_max = factor_max.max(c);
                if let Some(m) = &self.modulation {
                    sup_dt = sup_dt
                        .max((m.amp.derivative(t) * m.profile.value(&x[..self.d])).abs() * core_sup);
                    let mut grad_sq = 0.0;
                    for axis in 0..self.d {
                        let g = m.amp.value(t) * m.profile.grad_comp(&x[..self.d], axis);
                        grad_sq += g * g;
                    }
                    sup_grad = sup_grad.max(grad_sq.sqrt() * core_sup);
                }
            }
        }

        // Eigenvalues of c·M are c·(eigenvalues of M); track the extremes.
        let candidates = [
            factor_min * base.lambda_min,
            factor_min * base.lambda_max,
            factor_max * base.lambda_min,
            factor_max * base.lambda_max,
        ];
        let lambda_min = candidates.iter().copied().fold(f64::INFINITY, f64::min);
        let lambda_max = candidates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let spectrum = CoercivitySpectrum {
            lambda_min,
            lambda_max,
            eps_upper: lambda_max.max(0.0),
            eps_lower: (-lambda_min).max(0.0),
        };

        let sup_eps = core_sup * factor_min.abs().max(factor_max.abs());
        let h4_budget = eta * self.mu.min(2.0 * self.mu + self.lambda);
        let h4_ratio = if h4_budget > 0.0 { sup_eps / h4_budget } else { f64::INFINITY };
        let coercivity_margin = self.mu - spectrum.eps_lower;

        let mut failures = Vec::new();
        if symmetry_violation > 1e-12 {
            let (i, j, k, l) = symmetry_witness.unwrap_or((0, 0, 0, 0));
            failures.push(format!(
                "H1: symmetry violated at (i,j,k,l) = ({i},{j},{k},{l}): |eps_ijkl - eps_klij| = {symmetry_violation:.3e}"
            ));
        }
        if coercivity_margin <= 0.0 {
            failures.push(format!(
                "H2: coercivity margin mu - eps_lower = {} - {} <= 0",
                self.mu, spectrum.eps_lower
            ));
        }
        if h4_ratio > 1.0 {
            failures.push(format!(
                "H4: sup|eps| = {sup_eps:.6e} exceeds eta*min(mu, 2mu+lambda) = {h4_budget:.6e} (ratio {h4_ratio:.3})"
            ));
        }

        Ok(HypothesesReport {
            symmetry_violation,
            symmetry_witness,
            spectrum,
            coercivity_margin,
            sup_eps,
            h4_ratio,
            sup_dt_eps: sup_dt,
            sup_grad_eps: sup_grad,
            positive_form: lambda_min >= 0.0,
            failures,
        })
    }
}
