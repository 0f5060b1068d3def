//! Functionals and identity residuals along a trajectory.
//!
//! The solver emits one [`Sample`] per diagnostic cadence point; a sample
//! stores only *space-integrated* scalars (plus an optional velocity snapshot
//! for δ-sweeps), so residuals can be re-evaluated at coarser cadences by
//! striding the sample list without re-running the solver.
//!
//! Implemented functionals, with `σ(t) = min{1,t}` and `u̇` the algebraic
//! material derivative:
//!
//! * energy `E = ∫(H1(ρ/M) + ½ρ|u|²)`;
//! * Hoff functionals
//!   `A1 = ½μ‖∇u‖₂² + (μ+λ)‖div u‖₂² + ∫ε ∂u_δ ∂u_δ + ∫₀ᵗ∫ρ|u̇|²` and
//!   `A2 = σ∫ρ|u̇|²/2 + ∫₀ᵗσ(μ‖∇u̇‖² + (μ+λ)‖div u̇‖² + ∫ε ∂u̇_δ ∂u̇_δ)`;
//! * density functional `B` combining `∫H₂`, `σ∫H₃` and running
//!   `L³/L⁴` pressure integrals;
//! * the effective viscous flux `F = (2μ+λ)div u − (P − P(M))` and its exact
//!   multiplier identity residual;
//! * first/second energy-balance residuals (`res_A1`, `res_A2`) whose
//!   right-hand sides carry the cubic gradient terms, the `∂_tε`/`div(εu)`
//!   terms, the mollifier commutator terms and the pressure terms;
//! * renormalized-equation residuals for `b(ρ) = ρ^α`;
//! * the bootstrap monitor `½A1 + A2 + B` against the threshold `2·C̃·c₀`.
//!
//! All `∫₀ᵗ` terms use composite trapezoid quadrature at the sample cadence,
//! so residuals decay at second order under cadence refinement.

use crate::error::{Error, Result};
use crate::scalar_laws::PressureLaw;
use crate::solver::{self, FluidState, SolverConfig};
use crate::spectral::{self, ScalarField, TensorField, VectorField};
use crate::tensor4::ViscosityTensor;
use serde::{Deserialize, Serialize};

/// Reported-but-never-asserted constants of the theorem statement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorConfig {
    /// Smallness budget `c₀` of the initial data.
    pub c0: f64,
    /// Bootstrap constant `C̃`; the threshold is `2·C̃·c₀`.
    pub c_tilde: f64,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self { c0: 1.0, c_tilde: 1.0 }
    }
}

/// Space-integrated diagnostics of one trajectory instant.
#[derive(Debug, Clone)]
pub struct Sample {
    pub t: f64,
    // Instantaneous quadratic quantities of u and u̇.
    pub u_l2sq: f64,
    pub grad_u_l2sq: f64,
    pub div_u_l2sq: f64,
    pub grad_udot_l2sq: f64,
    pub div_udot_l2sq: f64,
    /// `∫ ε ∂_ℓu_δ^k ∂_ju_δ^i` (modulation included).
    pub aniso_q_u: f64,
    /// `∫ ε ∂_ℓu̇_δ^k ∂_ju̇_δ^i`.
    pub aniso_q_udot: f64,
    /// `∫ ρ|u̇|²`.
    pub rho_udot_sq: f64,
    /// `∫ P(ρ) div u` (the Appendix-bracket bookkeeping term).
    pub p_div_u: f64,
    // Entropy/pressure integrals.
    pub int_h1: f64,
    pub int_h2: f64,
    pub int_h3: f64,
    pub kinetic: f64,
    pub p_diff_l3_cubed: f64,
    pub p_diff_l4_fourth: f64,
    pub grad_u_l3_cubed: f64,
    pub grad_u_l4_fourth: f64,
    // Effective viscous flux.
    pub norm_f2: f64,
    pub norm_f3: f64,
    pub norm_f4: f64,
    pub flux_residual: f64,
    // Identity right-hand sides (space integrals at this instant).
    pub r1_rhs: f64,
    pub r2_rhs: f64,
    /// `∫ρ^α` for α ∈ {2, γ, 2γ}.
    pub renorm_b: [f64; 3],
    /// `(α−1)∫ρ^α div u` for the same α.
    pub renorm_flux: [f64; 3],
    // State statistics.
    pub mean_u: [f64; 3],
    pub momentum_mean: [f64; 3],
    pub mass_mean: f64,
    pub rho_l2: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    /// Velocity snapshot (populated when `store_velocity` is set).
    pub velocity: Option<VectorField>,
}

/// One CSV row of the run output. Field order matches the versioned CSV
/// column order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub sigma: f64,
    pub e: f64,
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
    pub norm_f3: f64,
    pub norm_f4: f64,
    pub int_p3: f64,
    pub int_p4: f64,
    pub int_grad_u3: f64,
    pub int_grad_u4_sigma: f64,
    pub res_a1: f64,
    pub res_a2: f64,
    pub res_flux: f64,
    pub res_renorm: f64,
    pub mean_u_slack: f64,
    pub bootstrap_ratio: f64,
    pub rho_min: f64,
    pub rho_max: f64,
}

fn sigma_of(t: f64) -> f64 {
    t.min(1.0)
}

/// Energy `E(ρ/M, u) = ∫(H1(ρ/M) + ½ρ|u|²)` of a state.
pub fn energy(state: &FluidState, law: &PressureLaw, rho_floor: f64) -> Result<f64> {
    let u = state.velocity(rho_floor)?;
    let h1 = entropy_field(&state.rho, law, 1)?;
    let mut kinetic = ScalarField::zeros(state.grid());
    for i in 0..u.ncomp() {
        kinetic.axpy(0.5, &state.m.comp(i).mul(u.comp(i)));
    }
    Ok(h1.integral() + kinetic.integral())
}

/// Pointwise entropy field `H_level(ρ/M)` with `level ∈ {1,2,3}`.
fn entropy_field(rho: &ScalarField, law: &PressureLaw, level: u8) -> Result<ScalarField> {
    if rho.min_value() < 0.0 {
        return Err(Error::InvalidArgument("negative density in entropy evaluation".into()));
    }
    let law = *law;
    Ok(match level {
        1 => rho.map(|r| law.h1_rel(r).unwrap_or(f64::NAN)),
        2 => rho.map(|r| law.h_ell(r, 2).unwrap_or(f64::NAN)),
        3 => rho.map(|r| law.h_ell(r, 3).unwrap_or(f64::NAN)),
        _ => return Err(Error::InvalidArgument(format!("entropy level {level}"))),
    })
}

/// Computes the full set of space-integrated diagnostics at the state's time.
pub fn compute_sample(
    state: &FluidState,
    tensor: &ViscosityTensor,
    law: &PressureLaw,
    config: &SolverConfig,
) -> Result<Sample> {
    let grid = state.grid().clone();
    let d = grid.d();
    let delta = config.delta;
    let t = state.t;
    let mu = tensor.mu();
    let lam = tensor.lambda();
    let gamma = law.gamma;

    let u = state.velocity(config.rho_floor)?;
    let a = u.grad();
    let a_t = a.transpose();
    let div_u = a.trace();
    let u_delta = u.mollify(delta)?;
    let a_delta = u_delta.grad();

    let udot = solver::material_derivative(state, tensor, law, config)?;
    let adot = udot.grad();
    let div_udot = adot.trace();
    let udot_delta = udot.mollify(delta)?;
    let adot_delta = udot_delta.grad();

    // Separable tensor modulation: value field and the exact factor of
    // ∂_tε + ∂_q(ε u^q) = [amp'·profile + amp·u·∇profile + (amp·profile)·div u]·core.
    let mod_field = tensor.modulation_field(&grid, t);
    let (dt_factor, grad_factor) = tensor.tensor_derivatives(&grid, t);
    let mut phi = dt_factor;
    for axis in 0..d {
        phi.axpy(1.0, &u.comp(axis).mul(grad_factor.comp(axis)));
    }
    phi.axpy(1.0, &mod_field.mul(&div_u));

    // Pressure fields; ρP'(ρ) = γP(ρ) for the power law.
    let p = solver::pressure_field(&state.rho, law)?;
    let p_m = law.pressure(law.m)?;
    let p_diff = p.map(|v| v - p_m);

    // Quadratic instantaneous quantities.
    let u_l2sq = u.l2_norm_sq();
    let grad_u_l2sq = a.l2_norm_sq();
    let div_u_l2sq = div_u.l2_norm_sq();
    let grad_udot_l2sq = adot.l2_norm_sq();
    let div_udot_l2sq = div_udot.l2_norm_sq();
    let aniso_q_u = mod_field.mul(&tensor.core_bilinear(&a_delta, &a_delta)).integral();
    let aniso_q_udot = mod_field.mul(&tensor.core_bilinear(&adot_delta, &adot_delta)).integral();

    let mut udot_sq = ScalarField::zeros(&grid);
    for i in 0..d {
        udot_sq.axpy(1.0, &udot.comp(i).mul(udot.comp(i)));
    }
    let rho_udot_sq = state.rho.mul(&udot_sq).integral();

    let mut kinetic = ScalarField::zeros(&grid);
    for i in 0..d {
        kinetic.axpy(0.5, &state.m.comp(i).mul(u.comp(i)));
    }

    // Effective viscous flux and its multiplier identity. The right-hand side
    // subtracts the anisotropic force because F collects only the isotropic
    // viscous part: Δ⁻¹div(ρu̇ − ω_δ∗div(E∇u_δ)) = (2μ+λ)div u − (P − ∫P).
    let two_mu_lam = 2.0 * mu + lam;
    let f_field = div_u.scale(two_mu_lam).sub(&p_diff);
    let f_mean = f_field.mean();
    let f_meanfree = f_field.map(|v| v - f_mean);
    let rho_udot_vec = udot.mul_scalar_field(&state.rho);
    let aniso_force = solver::anisotropic_force(&u, tensor, delta, t)?;
    let flux_rhs = spectral::inv_lap_div(&rho_udot_vec.sub(&aniso_force));
    let flux_residual = f_meanfree.sub(&flux_rhs).l2_norm() / (1.0 + f_field.l2_norm());

    // Shared matrix products.
    let aa = a.matmul(&a); // (a·a)_ij = ∂_j u^q ∂_q u^i
    let a_at = a.matmul(&a_t); // (a·aᵀ)_iq = Σ_j a_ij a_qj
    let tr_a2 = a.contract(&a_t); // Σ_ij a_ij a_ji
    let g_moll = aa.mollify(delta)?;

    // Convective commutator matrices C_ij = Σ_q [u^q, ω_δ∗] ∂_q(∂_j u^i) and
    // the analogous object for u̇ (differentiated after commutation).
    let mut c_comps = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            c_comps.push(spectral::convective_commutator(&u, a.comp(i, j), delta)?);
        }
    }
    let c_mat = TensorField::from_comps(d, c_comps)?;
    let mut dcc_comps = Vec::with_capacity(d * d);
    for i in 0..d {
        let cc_i = spectral::convective_commutator(&u, udot.comp(i), delta)?;
        for j in 0..d {
            dcc_comps.push(cc_i.deriv(j));
        }
    }
    let dcc_mat = TensorField::from_comps(d, dcc_comps)?;

    // First energy-balance right-hand side:
    //   ∫ρ|u̇|² + d/dt{ (μ/2)‖∇u‖² + ((μ+λ)/2)‖div u‖² + ½∫ε∂u_δ∂u_δ − ∫P div u }
    //   = R1.
    let r1_rhs = -mu * a_at.contract(&a).integral()
        + 0.5 * mu * a.contract(&a).mul(&div_u).integral()
        - (mu + lam) * div_u.mul(&tr_a2).integral()
        + 0.5 * (mu + lam) * div_u.mul(&div_u).mul(&div_u).integral()
        + 0.5 * phi.mul(&tensor.core_bilinear(&a_delta, &a_delta)).integral()
        - mod_field.mul(&tensor.core_bilinear(&g_moll, &a_delta)).integral()
        + mod_field.mul(&tensor.core_bilinear(&c_mat, &a_delta)).integral()
        + p.mul(&tr_a2).integral()
        + (gamma - 1.0) * p.mul(&div_u).mul(&div_u).integral();

    // Second energy-balance right-hand side (σ-weight applied at quadrature
    // time):
    //   d/dt ∫ρ|u̇|²/2 + μ‖∇u̇‖² + (μ+λ)‖div u̇‖² + ∫ε∂u̇_δ∂u̇_δ = R2.
    let k_mat = adot_delta.matmul(&a); // ∂_j u^q ∂_q u̇_δ^i
    let r2_rhs = mu * aa.contract(&adot).integral()
        + mu * a_at.contract(&adot).integral()
        - mu * div_u.mul(&a.contract(&adot)).integral()
        + (mu + lam) * tr_a2.mul(&div_udot).integral()
        + (mu + lam) * div_u.mul(&a_t.contract(&adot)).integral()
        - (mu + lam) * div_u.mul(&div_u).mul(&div_udot).integral()
        - phi.mul(&tensor.core_bilinear(&adot_delta, &a_delta)).integral()
        + mod_field.mul(&tensor.core_bilinear(&adot_delta, &g_moll)).integral()
        + mod_field.mul(&tensor.core_bilinear(&k_mat, &a_delta)).integral()
        - mod_field.mul(&tensor.core_bilinear(&adot_delta, &c_mat)).integral()
        - mod_field.mul(&tensor.core_bilinear(&dcc_mat, &a_delta)).integral()
        - p.mul(&a_t.contract(&adot)).integral()
        - (gamma - 1.0) * p.mul(&div_u).mul(&div_udot).integral();

    // Renormalized-equation ingredients for b(ρ) = ρ^α.
    let alphas = [2.0, gamma, 2.0 * gamma];
    let mut renorm_b = [0.0; 3];
    let mut renorm_flux = [0.0; 3];
    for (slot, &alpha) in alphas.iter().enumerate() {
        let b_field = state.rho.map(|r| r.powf(alpha));
        renorm_b[slot] = b_field.integral();
        renorm_flux[slot] = (alpha - 1.0) * b_field.mul(&div_u).integral();
    }

    let mut mean_u = [0.0; 3];
    let mut momentum_mean = [0.0; 3];
    for i in 0..d {
        mean_u[i] = u.comp(i).mean();
        momentum_mean[i] = state.m.comp(i).mean();
    }

    Ok(Sample {
        t,
        u_l2sq,
        grad_u_l2sq,
        div_u_l2sq,
        grad_udot_l2sq,
        div_udot_l2sq,
        aniso_q_u,
        aniso_q_udot,
        rho_udot_sq,
        p_div_u: p.inner(&div_u),
        int_h1: entropy_field(&state.rho, law, 1)?.integral(),
        int_h2: entropy_field(&state.rho, law, 2)?.integral(),
        int_h3: entropy_field(&state.rho, law, 3)?.integral(),
        kinetic: kinetic.integral(),
        p_diff_l3_cubed: p_diff.map(|v| v.abs().powi(3)).integral(),
        p_diff_l4_fourth: p_diff.map(|v| v.powi(4)).integral(),
        grad_u_l3_cubed: a.lp_norm(3.0).powi(3),
        grad_u_l4_fourth: a.lp_norm(4.0).powi(4),
        norm_f2: f_field.l2_norm(),
        norm_f3: f_field.lp_norm(3.0),
        norm_f4: f_field.lp_norm(4.0),
        flux_residual,
        r1_rhs,
        r2_rhs,
        renorm_b,
        renorm_flux,
        mean_u,
        momentum_mean,
        mass_mean: state.rho.mean(),
        rho_l2: state.rho.l2_norm(),
        rho_min: state.rho.min_value(),
        rho_max: state.rho.max_value(),
        velocity: if config.store_velocity { Some(u) } else { None },
    })
}

/// Trapezoid accumulator over strided samples.
struct Accumulator {
    prev_t: f64,
    values: Vec<f64>,
}

impl Accumulator {
    fn new(t0: f64, n: usize) -> Self {
        Self { prev_t: t0, values: vec![0.0; n] }
    }

    fn advance(&mut self, t: f64, integrands_prev: &[f64], integrands_now: &[f64]) {
        let half_dt = 0.5 * (t - self.prev_t);
        for ((value, &f0), &f1) in
            self.values.iter_mut().zip(integrands_prev).zip(integrands_now)
        {
            *value += half_dt * (f0 + f1);
        }
        self.prev_t = t;
    }
}

// Indices into the accumulator.
const ACC_RHO_UDOT: usize = 0;
const ACC_SIGMA_DISS: usize = 1;
const ACC_W_SIGMA_PRIME: usize = 2;
const ACC_R1: usize = 3;
const ACC_R2_SIGMA: usize = 4;
const ACC_P3: usize = 5;
const ACC_P4_SIGMA: usize = 6;
const ACC_GRADU3: usize = 7;
const ACC_GRADU4_SIGMA: usize = 8;
const ACC_RENORM0: usize = 9; // three consecutive slots
const ACC_COUNT: usize = 12;

fn integrand_vector(sample: &Sample, mu: f64, lam: f64) -> [f64; ACC_COUNT] {
    let sigma = sigma_of(sample.t);
    // σ'(s) = 1 on (0,1), 0 afterwards: weight of the A2 offset term. The
    // endpoint s = 1 keeps full weight so the trapezoid rule for ∫₀¹ W stays
    // second order (the jump itself has measure zero).
    let sigma_prime = if sample.t <= 1.0 { 1.0 } else { 0.0 };
    let mut v = [0.0; ACC_COUNT];
    v[ACC_RHO_UDOT] = sample.rho_udot_sq;
    v[ACC_SIGMA_DISS] = sigma
        * (mu * sample.grad_udot_l2sq + (mu + lam) * sample.div_udot_l2sq + sample.aniso_q_udot);
    v[ACC_W_SIGMA_PRIME] = sigma_prime * 0.5 * sample.rho_udot_sq;
    v[ACC_R1] = sample.r1_rhs;
    v[ACC_R2_SIGMA] = sigma * sample.r2_rhs;
    v[ACC_P3] = sample.p_diff_l3_cubed;
    v[ACC_P4_SIGMA] = sigma * sample.p_diff_l4_fourth;
    v[ACC_GRADU3] = sample.grad_u_l3_cubed;
    v[ACC_GRADU4_SIGMA] = sigma * sample.grad_u_l4_fourth;
    for slot in 0..3 {
        v[ACC_RENORM0 + slot] = sample.renorm_flux[slot];
    }
    v
}

/// Assembles diagnostic records from every `stride`-th sample.
pub fn build_records_strided(
    samples: &[Sample],
    stride: usize,
    tensor: &ViscosityTensor,
    law: &PressureLaw,
    monitor: &MonitorConfig,
) -> Result<Vec<DiagnosticsRecord>> {
    if samples.is_empty() {
        return Err(Error::Cadence("no samples".into()));
    }
    if stride == 0 {
        return Err(Error::Cadence("stride must be >= 1".into()));
    }
    let mu = tensor.mu();
    let lam = tensor.lambda();
    let two_mu_lam = 2.0 * mu + lam;
    let gamma_index = 1; // α = γ slot of the renormalization arrays

    let first = &samples[0];
    let e0 = first.int_h1 + first.kinetic;
    let m_ref = law.m;

    let bracket = |s: &Sample| {
        0.5 * (mu * s.grad_u_l2sq + (mu + lam) * s.div_u_l2sq + s.aniso_q_u) - s.p_div_u
    };
    let bracket0 = bracket(first);

    let mut acc = Accumulator::new(first.t, ACC_COUNT);
    let mut prev_integrands = integrand_vector(first, mu, lam);
    let mut records = Vec::new();

    for (count, sample) in samples.iter().step_by(stride).enumerate() {
        if count > 0 {
            let now = integrand_vector(sample, mu, lam);
            acc.advance(sample.t, &prev_integrands, &now);
            prev_integrands = now;
        }
        let sigma = sigma_of(sample.t);
        let e = sample.int_h1 + sample.kinetic;
        let a1 = 0.5 * mu * sample.grad_u_l2sq
            + (mu + lam) * sample.div_u_l2sq
            + sample.aniso_q_u
            + acc.values[ACC_RHO_UDOT];
        let w = 0.5 * sample.rho_udot_sq;
        let a2 = sigma * w + acc.values[ACC_SIGMA_DISS];
        let b = (1.0 + 2.0 * two_mu_lam) * sample.int_h2
            + sigma * sample.int_h3
            + (acc.values[ACC_P3] + acc.values[ACC_P4_SIGMA]) / (2.0 * two_mu_lam);

        let lhs_a1 = bracket(sample) + acc.values[ACC_RHO_UDOT];
        let res_a1 = (lhs_a1 - bracket0 - acc.values[ACC_R1]).abs() / (1.0 + lhs_a1.abs());
        let res_a2 = (a2 - acc.values[ACC_W_SIGMA_PRIME] - acc.values[ACC_R2_SIGMA]).abs()
            / (1.0 + a2.abs());
        let res_renorm = (sample.renorm_b[gamma_index] - first.renorm_b[gamma_index]
            + acc.values[ACC_RENORM0 + gamma_index])
            .abs()
            / (1.0 + sample.renorm_b[gamma_index].abs());

        let mean_u_max = sample.mean_u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mean_u_slack = (m_ref * e0).sqrt() + sample.rho_l2 * sample.grad_u_l2sq.sqrt()
            - m_ref * mean_u_max;
        let bootstrap_ratio =
            (0.5 * a1 + a2 + b) / (2.0 * monitor.c_tilde * monitor.c0);

        records.push(DiagnosticsRecord {
            t: sample.t,
            sigma,
            e,
            a1,
            a2,
            b,
            norm_f3: sample.norm_f3,
            norm_f4: sample.norm_f4,
            int_p3: acc.values[ACC_P3],
            int_p4: acc.values[ACC_P4_SIGMA],
            int_grad_u3: acc.values[ACC_GRADU3],
            int_grad_u4_sigma: acc.values[ACC_GRADU4_SIGMA],
            res_a1,
            res_a2,
            res_flux: sample.flux_residual,
            res_renorm,
            mean_u_slack,
            bootstrap_ratio,
            rho_min: sample.rho_min,
            rho_max: sample.rho_max,
        });
    }
    Ok(records)
}

/// Records at the native cadence.
pub fn build_records(
    samples: &[Sample],
    tensor: &ViscosityTensor,
    law: &PressureLaw,
    monitor: &MonitorConfig,
) -> Result<Vec<DiagnosticsRecord>> {
    build_records_strided(samples, 1, tensor, law, monitor)
}

/// Final-time A1 identity residual at the given cadence stride.
pub fn a1_identity_residual(
    samples: &[Sample],
    stride: usize,
    tensor: &ViscosityTensor,
    law: &PressureLaw,
) -> Result<f64> {
    let records = build_records_strided(samples, stride, tensor, law, &MonitorConfig::default())?;
    records.last().map(|r| r.res_a1).ok_or_else(|| Error::Cadence("empty record set".into()))
}

/// Final-time A2 identity residual at the given cadence stride.
pub fn a2_identity_residual(
    samples: &[Sample],
    stride: usize,
    tensor: &ViscosityTensor,
    law: &PressureLaw,
) -> Result<f64> {
    let records = build_records_strided(samples, stride, tensor, law, &MonitorConfig::default())?;
    records.last().map(|r| r.res_a2).ok_or_else(|| Error::Cadence("empty record set".into()))
}

/// Final-time renormalized-equation residual for `b(ρ) = ρ^α`.
///
/// `alpha_slot` selects α from {2, γ, 2γ}; the residual is
/// `|∫ρ^α(t) − ∫ρ^α(0) + ∫₀ᵗ(α−1)∫ρ^α div u| / (1 + |∫ρ^α(t)|)`.
pub fn renorm_residual(samples: &[Sample], stride: usize, alpha_slot: usize) -> Result<f64> {
    if alpha_slot >= 3 {
        return Err(Error::InvalidArgument(format!(
            "alpha slot {alpha_slot} out of range (0: α=2, 1: α=γ, 2: α=2γ)"
        )));
    }
    if samples.is_empty() {
        return Err(Error::Cadence("no samples".into()));
    }
    let strided: Vec<&Sample> = samples.iter().step_by(stride).collect();
    if strided.len() < 2 {
        return Ok(0.0);
    }
    let mut integral = 0.0;
    for pair in strided.windows(2) {
        integral += 0.5
            * (pair[1].t - pair[0].t)
            * (pair[0].renorm_flux[alpha_slot] + pair[1].renorm_flux[alpha_slot]);
    }
    let last = strided.last().expect("nonempty");
    Ok((last.renorm_b[alpha_slot] - strided[0].renorm_b[alpha_slot] + integral).abs()
        / (1.0 + last.renorm_b[alpha_slot].abs()))
}

/// Worst excess of the energy inequality
/// `E(t) + ∫₀ᵗ[(μ−ε_lower)‖∇u‖² + (μ+λ)‖div u‖²] ≤ E₀` along the samples,
/// normalized by `E₀` (values ≤ 0 mean the inequality holds strictly).
pub fn energy_inequality_excess(samples: &[Sample], tensor: &ViscosityTensor) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Cadence("no samples".into()));
    }
    let mu_eff = tensor.mu() - tensor.core_spectrum().eps_lower;
    let mu_lam = tensor.mu() + tensor.lambda();
    let e0 = samples[0].int_h1 + samples[0].kinetic;
    let mut dissipated = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for (i, sample) in samples.iter().enumerate() {
        if i > 0 {
            let prev = &samples[i - 1];
            dissipated += 0.5
                * (sample.t - prev.t)
                * (mu_eff * (prev.grad_u_l2sq + sample.grad_u_l2sq)
                    + mu_lam * (prev.div_u_l2sq + sample.div_u_l2sq));
        }
        let lhs = sample.int_h1 + sample.kinetic + dissipated;
        worst = worst.max((lhs - e0) / e0.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Report of the theorem-level monitors (never asserted, only measured).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonitorReport {
    /// Measured `E₀ + ∫H₂(ρ₀/M) + ‖u₀‖_{H¹}²`.
    pub c0_measured: f64,
    /// Configured smallness budget.
    pub c0_configured: f64,
    /// Bootstrap threshold `2·C̃·c₀`.
    pub threshold: f64,
    /// Running maximum of `½A1 + A2 + B`.
    pub max_half_a1_a2_b: f64,
    /// First time the running max crosses the threshold, if any.
    pub crossing_time: Option<f64>,
    /// Largest bootstrap ratio along the run.
    pub max_bootstrap_ratio: f64,
    /// Smallest mean-velocity bound slack along the run.
    pub min_mean_u_slack: f64,
    /// All monitored quantities stayed finite.
    pub all_finite: bool,
}

/// Evaluates the bootstrap/mean-velocity monitors along assembled records.
pub fn theorem_monitor(
    samples: &[Sample],
    records: &[DiagnosticsRecord],
    monitor: &MonitorConfig,
) -> Result<MonitorReport> {
    if samples.is_empty() || records.is_empty() {
        return Err(Error::Cadence("no samples".into()));
    }
    let first = &samples[0];
    let c0_measured =
        first.int_h1 + first.kinetic + first.int_h2 + first.u_l2sq + first.grad_u_l2sq;
    let threshold = 2.0 * monitor.c_tilde * monitor.c0;
    let mut max_half = f64::NEG_INFINITY;
    let mut crossing_time = None;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut min_slack = f64::INFINITY;
    let mut all_finite = true;
    for record in records {
        let half = 0.5 * record.a1 + record.a2 + record.b;
        max_half = max_half.max(half);
        if crossing_time.is_none() && half > threshold {
            crossing_time = Some(record.t);
        }
        max_ratio = max_ratio.max(record.bootstrap_ratio);
        min_slack = min_slack.min(record.mean_u_slack);
        all_finite &= half.is_finite()
            && record.e.is_finite()
            && record.res_a1.is_finite()
            && record.res_a2.is_finite();
    }
    Ok(MonitorReport {
        c0_measured,
        c0_configured: monitor.c0,
        threshold,
        max_half_a1_a2_b: max_half,
        crossing_time,
        max_bootstrap_ratio: max_ratio,
        min_mean_u_slack: min_slack,
        all_finite,
    })
}
