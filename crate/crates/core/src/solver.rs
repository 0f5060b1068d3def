//! SSP-RK3 time integration of the mollified anisotropic system in
//! conservative variables `(ρ, m)`.
//!
//! The semi-discrete right-hand side is
//!
//! ```text
//! ∂_t ρ = −div m
//! ∂_t m = −div(m ⊗ u) − ∇P(ρ) + μΔu + (μ+λ)∇div u
//!         + ω_δ∗ div(E(∇ ω_δ∗u))          with u = m/ρ pointwise.
//! ```
//!
//! All force terms are spectral divergences/gradients, so the means of `ρ` and
//! `m` are conserved exactly; quadratic products are dealiased by the 2/3
//! rule. Density positivity is enforced by a hard floor — dropping below it is
//! reported as a first-class failure, not a crash.

use crate::diagnostics::{self, Sample};
use crate::error::{Error, Result};
use crate::scalar_laws::PressureLaw;
use crate::spectral::{ScalarField, SpectralGrid, TensorField, VectorField};
use crate::tensor4::ViscosityTensor;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Instantaneous conservative state.
#[derive(Debug, Clone)]
pub struct FluidState {
    /// Mass density.
    pub rho: ScalarField,
    /// Momentum density `m = ρu`.
    pub m: VectorField,
    /// Time.
    pub t: f64,
}

impl FluidState {
    /// Builds a state and checks finiteness.
    pub fn new(rho: ScalarField, m: VectorField, t: f64) -> Result<Self> {
        let state = Self { rho, m, t };
        state.check_finite()?;
        Ok(state)
    }

    /// Builds the conservative state from primitive fields (`m = ρ·u`).
    pub fn from_primitive(rho: ScalarField, u: &VectorField, t: f64) -> Result<Self> {
        let comps = (0..u.ncomp()).map(|i| u.comp(i).mul(&rho)).collect();
        Self::new(rho, VectorField::from_comps(comps), t)
    }

    /// Grid handle.
    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.rho.grid()
    }

    /// Pointwise velocity `u = m/ρ`; fails when density is at or below `floor`.
    pub fn velocity(&self, floor: f64) -> Result<VectorField> {
        let rho_min = self.rho.min_value();
        if rho_min <= floor {
            return Err(Error::Positivity { t: self.t, rho_min });
        }
        let inv = self.rho.map(|r| 1.0 / r);
        Ok(self.m.mul_scalar_field(&inv))
    }

    /// Errors on any NaN/Inf sample.
    pub fn check_finite(&self) -> Result<()> {
        if !self.rho.is_finite() {
            return Err(Error::NonFinite { t: self.t, field: "rho".into() });
        }
        if !self.m.is_finite() {
            return Err(Error::NonFinite { t: self.t, field: "m".into() });
        }
        Ok(())
    }
}

/// Discretization and run-control parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Spatial dimension (2 or 3).
    pub d: usize,
    /// Grid points per axis (power of two).
    pub n: usize,
    /// Mollification width δ.
    pub delta: f64,
    /// Courant number in (0, 1].
    pub cfl: f64,
    /// Final time.
    pub t_end: f64,
    /// Density floor; crossing it aborts the run with a positivity report.
    pub rho_floor: f64,
    /// Apply the 2/3-rule projection to quadratic products.
    pub dealias: bool,
    /// Diagnostic sampling interval.
    pub cadence_dt: f64,
    /// Keep velocity snapshots in the samples (needed by δ-sweeps).
    pub store_velocity: bool,
}

impl SolverConfig {
    /// Validates parameter ranges.
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidArgument(format!("cfl = {} must be in (0, 1]", self.cfl)));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidArgument(format!("delta = {} must be > 0", self.delta)));
        }
        if self.t_end < 0.0 {
            return Err(Error::InvalidArgument(format!("t_end = {} must be >= 0", self.t_end)));
        }
        if !(self.cadence_dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cadence_dt = {} must be > 0",
                self.cadence_dt
            )));
        }
        if !(self.rho_floor >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rho_floor = {} must be >= 0",
                self.rho_floor
            )));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            d: 2,
            n: 64,
            delta: 0.1,
            cfl: 0.5,
            t_end: 1.0,
            rho_floor: 1e-6,
            dealias: true,
            cadence_dt: 0.05,
            store_velocity: false,
        }
    }
}

/// Cap-and-shift regularization of the initial data.
///
/// Finds `ξ_δ` by bisection so that `ρ̃ = min{ξ_δ, ρ₀ + δ}` has mean exactly
/// `m_ref`, then mollifies both fields: `ρ₀^δ = ω_δ∗ρ̃`, `u₀^δ = ω_δ∗u₀`.
/// The pre-mollification density is bounded below by `min{ξ_δ, δ} > 0`.
pub fn regularize_initial_data(
    rho0: &ScalarField,
    u0: &VectorField,
    delta: f64,
    m_ref: f64,
) -> Result<(ScalarField, VectorField)> {
    if !(delta > 0.0 && delta < m_ref) {
        return Err(Error::Regularization(format!(
            "delta = {delta} must lie in (0, M) with M = {m_ref}"
        )));
    }
    if rho0.min_value() < 0.0 {
        return Err(Error::Regularization("initial density has negative samples".into()));
    }
    if (rho0.mean() - m_ref).abs() > 1e-8 * m_ref {
        return Err(Error::Regularization(format!(
            "initial density mean {} differs from M = {m_ref}",
            rho0.mean()
        )));
    }

    let capped_mean = |xi: f64| {
        rho0.data().iter().map(|&r| (r + delta).min(xi)).sum::<f64>() / rho0.data().len() as f64
    };
    let mut lo = 0.0;
    let mut hi = rho0.max_value() + delta;
    if capped_mean(hi) < m_ref {
        return Err(Error::Regularization(
            "bisection cannot bracket the mass cap (degenerate initial density)".into(),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if capped_mean(mid) < m_ref {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 * (1.0 + hi.abs()) {
            break;
        }
    }
    let xi = 0.5 * (lo + hi);
    let capped = rho0.map(|r| (r + delta).min(xi));
    let rho_delta = capped.mollify(delta)?;
    let u_delta = u0.mollify(delta)?;
    Ok((rho_delta, u_delta))
}

/// Viscous-plus-pressure force `μΔu + (μ+λ)∇div u + ω_δ∗div(E(∇ω_δ∗u)) − ∇P(ρ)`
/// — the right-hand side of the momentum balance without convection, i.e.
/// exactly `ρ·u̇`.
fn force_field(
    rho: &ScalarField,
    u: &VectorField,
    tensor: &ViscosityTensor,
    law: &PressureLaw,
    delta: f64,
    t: f64,
) -> Result<VectorField> {
    let mu = tensor.mu();
    let lam = tensor.lambda();

    // Isotropic part.
    let div_u = u.div();
    let grad_div = div_u.grad();
    let mut force = VectorField::from_comps(
        (0..u.ncomp()).map(|i| u.comp(i).laplacian().scale(mu)).collect(),
    );
    force.axpy(mu + lam, &grad_div);

    // Mollified anisotropic part.
    force.axpy(1.0, &anisotropic_force(u, tensor, delta, t)?);

    // Pressure gradient; P(ρ) is evaluated pointwise on the samples.
    let pressure = pressure_field(rho, law)?;
    force.axpy(-1.0, &pressure.grad());
    Ok(force)
}

/// `P(ρ)` sampled pointwise; rejects negative densities.
pub fn pressure_field(rho: &ScalarField, law: &PressureLaw) -> Result<ScalarField> {
    if rho.min_value() < 0.0 {
        return Err(Error::InvalidArgument("negative density in pressure evaluation".into()));
    }
    let gamma = law.gamma;
    let a = law.a;
    Ok(rho.map(|r| a * r.powf(gamma)))
}

/// The mollified anisotropic force `ω_δ∗div(E(∇ω_δ∗u))`.
pub fn anisotropic_force(
    u: &VectorField,
    tensor: &ViscosityTensor,
    delta: f64,
    t: f64,
) -> Result<VectorField> {
    let u_delta = u.mollify(delta)?;
    let stress: TensorField = tensor.apply(&u_delta.grad(), t)?;
    stress.divergence().mollify(delta)
}

/// Semi-discrete right-hand side `(∂_t ρ, ∂_t m)`.
pub fn assemble_rhs(
    state: &FluidState,
    tensor: &ViscosityTensor,
    law: &PressureLaw,
    config: &SolverConfig,
) -> Result<(ScalarField, VectorField)> {
    let u = state.velocity(config.rho_floor)?;
    let d_rho = state.m.div().scale(-1.0);

    // Convection −div(m ⊗ u): row i is −Σ_j ∂_j(m_i u_j).
    let d = u.ncomp();
    let mut conv_comps = Vec::with_capacity(d);
    for i in 0..d {
        let mut flux_comps = Vec::with_capacity(d);
        for j in 0..d {
            let product = state.m.comp(i).mul(u.comp(j));
            flux_comps.push(if config.dealias { product.dealias() } else { product });
        }
        let mut out = flux_comps[0].deriv(0);
        for (j, flux) in flux_comps.iter().enumerate().skip(1) {
            out.axpy(1.0, &flux.deriv(j));
        }
        conv_comps.push(out.scale(-1.0));
    }
    let mut d_m = VectorField::from_comps(conv_comps);
    d_m.axpy(1.0, &force_field(&state.rho, &u, tensor, law, config.delta, state.t)?);
    Ok((d_rho, d_m))
}

/// Material derivative `u̇ = (1/ρ)(μΔu + (μ+λ)∇div u + ω_δ∗div(E(∇u_δ)) − ∇P)`,
/// computed algebraically from the momentum balance (no time differencing).
pub fn material_derivative(
    state: &FluidState,
    tensor: &ViscosityTensor,
    law: &PressureLaw,
    config: &SolverConfig,
) -> Result<VectorField> {
    let u = state.velocity(config.rho_floor)?;
    let force = force_field(&state.rho, &u, tensor, law, config.delta, state.t)?;
    let inv_rho = state.rho.map(|r| 1.0 / r);
    Ok(force.mul_scalar_field(&inv_rho))
}

/// Stable explicit step `Δt = cfl·min(h/(max|u|+c_max), h²/(2d·ν_max))` with
/// `c_max = sqrt(γ a ρ_max^{γ−1})` and `ν_max = (2μ+λ+ε̄)/ρ_min`.
pub fn stable_dt(
    state: &FluidState,
    tensor: &ViscosityTensor,
    law: &PressureLaw,
    config: &SolverConfig,
) -> Result<f64> {
    let u = state.velocity(config.rho_floor)?;
    let mut u_max = 0.0f64;
    for i in 0..u.ncomp() {
        u_max = u_max.max(u.comp(i).max_abs());
    }
    let rho_max = state.rho.max_value();
    let rho_min = state.rho.min_value();
    let c_max = (law.gamma * law.a * rho_max.powf(law.gamma - 1.0)).sqrt();
    let eps_upper = tensor.core_spectrum().eps_upper;
    let nu_max = (2.0 * tensor.mu() + tensor.lambda() + eps_upper) / rho_min;
    let h = state.grid().h();
    let advective = h / (u_max + c_max);
    let diffusive = h * h / (2.0 * config.d as f64 * nu_max);
    Ok(config.cfl * advective.min(diffusive))
}

/// One SSP-RK3 (Shu-Osher) step of size `dt`; every stage is checked for
/// positivity and finiteness.
pub fn step(
    state: &FluidState,
    tensor: &ViscosityTensor,
    law: &PressureLaw,
    config: &SolverConfig,
    dt: f64,
) -> Result<FluidState> {
    let advance = |s: &FluidState, base: &FluidState, weight_base: f64, weight_s: f64, dt_frac: f64, t_new: f64| -> Result<FluidState> {
        let (d_rho, d_m) = assemble_rhs(s, tensor, law, config)?;
        let mut rho = base.rho.scale(weight_base);
        rho.axpy(weight_s, &s.rho);
        rho.axpy(dt_frac * dt, &d_rho);
        let mut m = base.m.scale(weight_base);
        m.axpy(weight_s, &s.m);
        m.axpy(dt_frac * dt, &d_m);
        let next = FluidState::new(rho, m, t_new)?;
        let rho_min = next.rho.min_value();
        if rho_min <= config.rho_floor {
            return Err(Error::Positivity { t: t_new, rho_min });
        }
        Ok(next)
    };

    // u1 = u + dt L(u); u2 = 3/4 u + 1/4 u1 + 1/4 dt L(u1);
    // u_{n+1} = 1/3 u + 2/3 u2 + 2/3 dt L(u2).
    let t0 = state.t;
    let s1 = advance(state, state, 0.0, 1.0, 1.0, t0 + dt)?;
    let s2 = advance(&s1, state, 0.75, 0.25, 0.25, t0 + 0.5 * dt)?;
    advance(&s2, state, 1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, t0 + dt)
}

/// Failure metadata of a truncated run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureInfo {
    /// Time at which the run stopped.
    pub t: f64,
    /// Human-readable reason (positivity or NaN report).
    pub message: String,
}

/// Result of [`run`]: per-cadence raw samples, assembled diagnostic records,
/// the final (or last valid) state, and failure metadata if the run aborted.
pub struct RunOutcome {
    pub samples: Vec<Sample>,
    pub records: Vec<diagnostics::DiagnosticsRecord>,
    pub final_state: FluidState,
    pub failure: Option<FailureInfo>,
}

/// Integrates the regularized data to `t_end`, sampling diagnostics at the
/// configured cadence. Positivity/NaN failures truncate the trajectory and are
/// reported in the outcome rather than raised.
pub fn run(
    config: &SolverConfig,
    tensor: &ViscosityTensor,
    law: &PressureLaw,
    rho0: &ScalarField,
    u0: &VectorField,
    monitor: &diagnostics::MonitorConfig,
) -> Result<RunOutcome> {
    config.validate()?;
    law.validate_for_dimension(config.d)?;
    let (rho_delta, u_delta) = regularize_initial_data(rho0, u0, config.delta, law.m)?;
    let mut state = FluidState::from_primitive(rho_delta, &u_delta, 0.0)?;

    let mut samples =
        vec![diagnostics::compute_sample(&state, tensor, law, config)?];
    let mut failure = None;

    let mut sample_index = 1u64;
    'time_loop: while state.t < config.t_end - 1e-12 {
        let target = (sample_index as f64 * config.cadence_dt).min(config.t_end);
        while state.t < target - 1e-12 {
            let dt = match stable_dt(&state, tensor, law, config) {
                Ok(dt) => dt.min(target - state.t),
                Err(e) => {
                    failure = Some(FailureInfo { t: state.t, message: e.to_string() });
                    break 'time_loop;
                }
            };
            match step(&state, tensor, law, config, dt) {
                Ok(next) => state = next,
                Err(e) => {
                    failure = Some(FailureInfo { t: state.t, message: e.to_string() });
                    break 'time_loop;
                }
            }
        }
        samples.push(diagnostics::compute_sample(&state, tensor, law, config)?);
        sample_index += 1;
    }

    let records = diagnostics::build_records(&samples, tensor, law, monitor)?;
    Ok(RunOutcome { samples, records, final_state: state, failure })
}
