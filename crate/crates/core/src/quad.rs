//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 7-point Gauss / 15-point Kronrod pair with recursive bisection. Used as
//! the independent oracle for the closed-form entropy functionals in
//! [`crate::scalar_laws`]; accuracy target 1e-10 absolute or relative.

use crate::error::{Error, Result};

/// Kronrod abscissae on [0,1] (positive half; the rule is symmetric).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_26,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss weights for the embedded 7-point rule (nodes XGK[1], XGK[3], XGK[5], centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod panel on [a, b]; returns (kronrod value, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let centre = 0.5 * (a + b);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let value = if j == 7 {
            f(centre)
        } else {
            f(centre - half * x) + f(centre + half * x)
        };
        kronrod += wk * value;
        // Odd Kronrod indices (and the centre, j = 7) are the embedded Gauss nodes.
        if j % 2 == 1 {
            gauss += WG[j / 2] * value;
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half.abs())
}

/// Integrates `f` over `[a, b]` (oriented) to absolute/relative tolerance `tol`.
///
/// Recursion depth is capped; exceeding it reports a
/// [`Error::QuadratureAccuracy`] instead of returning a silently inaccurate
/// value.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
        let (value, err) = gk15(f, a, b);
        // The absolute budget halves per split; floor it at machine-relative
        // accuracy of the panel so steep integrands cannot demand precision
        // below what f64 evaluation can deliver.
        if err <= tol.max(1e-14 * value.abs()) {
            return Ok(value);
        }
        if (b - a).abs() <= f64::EPSILON * (a.abs() + b.abs()) {
            return Ok(value);
        }
        if depth >= 48 {
            return Err(Error::QuadratureAccuracy(format!(
                "panel [{a}, {b}] error estimate {err:.3e} above tolerance {tol:.3e}"
            )));
        }
        let mid = 0.5 * (a + b);
        Ok(recurse(f, a, mid, 0.5 * tol, depth + 1)? + recurse(f, mid, b, 0.5 * tol, depth + 1)?)
    }
    recurse(f, a, b, tol, 0)
}

/// Integrates with an interior split point (used where the integrand has a
/// kink, e.g. `s = M` in the entropy integrals).
pub fn integrate_split<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    split: f64,
    b: f64,
    tol: f64,
) -> Result<f64> {
    let inside = (split - a) * (b - split) > 0.0;
    if inside {
        Ok(integrate(f, a, split, tol)? + integrate(f, split, b, tol)?)
    } else {
        integrate(f, a, b, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let value = integrate(&|x: f64| x.powi(6), 0.0, 1.0, 1e-12).unwrap();
        assert!((value - 1.0 / 7.0).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_integrand_converges() {
        let value = integrate(&|x: f64| (10.0 * x).sin(), 0.0, 1.0, 1e-12).unwrap();
        let exact = (1.0 - 10.0f64.cos()) / 10.0;
        assert!((value - exact).abs() < 1e-11);
    }

    #[test]
    fn oriented_interval_flips_sign() {
        let forward = integrate(&|x: f64| x * x, 0.0, 2.0, 1e-12).unwrap();
        let backward = integrate(&|x: f64| x * x, 2.0, 0.0, 1e-12).unwrap();
        assert!((forward + backward).abs() < 1e-13);
    }

    #[test]
    fn split_point_handles_kink() {
        // |x - 1| over [0, 3]: exact value 0.5 + 2.0.
        let value = integrate_split(&|x: f64| (x - 1.0).abs(), 0.0, 1.0, 3.0, 1e-12).unwrap();
        assert!((value - 2.5).abs() < 1e-12);
    }
}
