//! Legendre function of the first kind of degree 1/2.
//!
//! `P_1/2` solves the Legendre equation
//!
//! ```text
//! (1 - t^2) P'' - 2 t P' + 3/4 P = 0,   t in (-1, 1),
//! ```
//!
//! with the normalization `P_1/2(1) = 1`. The function is finite on
//! `(-1, 1]` and has a logarithmic singularity at `t = -1`; its derivative
//! blows up like `1/(1 + t)` there. Both behaviours matter for the cone
//! transmission equation, which evaluates `P_1/2` and `P'_1/2` at
//! `cos(theta)` and `-cos(theta)`.
//!
//! Evaluation runs in two regimes:
//!
//! * `t >= -1/2`: the hypergeometric series
//!   `P_1/2(t) = 2F1(-1/2, 3/2; 1; (1-t)/2)`, whose terms decay
//!   geometrically with ratio `(1-t)/2 <= 3/4`.
//! * `t < -1/2`: the connection expansion around the singular endpoint,
//!   `P_1/2(t) = -(1/pi) * sum c_n (A_n - ln w) w^n` with `w = (1+t)/2`,
//!   which converges with ratio `w < 1/4` and carries the logarithm
//!   explicitly.
//!
//! Derivatives come from term-wise differentiated series, never from
//! numerical differencing. Sums are Kahan-compensated; the truncation
//! remainder is bounded by the first dropped term times the geometric
//! tail factor and reported in [`LegendreEval::est_error`].

use thiserror::Error;

/// Absolute tolerance floor attainable in binary64.
pub const TOL_FLOOR: f64 = 1e-13;

/// Switch point between the direct series and the endpoint expansion.
const REGIME_SPLIT: f64 = -0.5;

const MAX_TERMS: usize = 400;

/// `A_0 = 2 psi(1) - psi(-1/2) - psi(3/2) = 4 ln 2 - 4`.
const A0: f64 = -1.2274112777602189f64; // 4.0 * LN_2 - 4.0

#[derive(Debug, Error, PartialEq)]
pub enum LegendreError {
    #[error("argument {t} outside the domain (-1, 1] of P_1/2")]
    Domain { t: f64 },
    #[error("angle {theta} outside (0, pi)")]
    AngleDomain { theta: f64 },
    #[error("tolerance {requested:e} unattainable (achieved {achieved:e})")]
    Tolerance { requested: f64, achieved: f64 },
}

/// One evaluation of `P_1/2` together with its derivative and an
/// absolute error bound for both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreEval {
    /// Argument in `(-1, 1]`.
    pub t: f64,
    /// `P_1/2(t)`.
    pub value: f64,
    /// `dP_1/2/dt` at `t`.
    pub derivative: f64,
    /// Absolute error bound on `value` covering truncation and rounding.
    /// The derivative is truncated at the same point of the series and is
    /// accurate to `est_error` relative to its own magnitude, which is the
    /// usable notion near `t = -1` where `P'` itself blows up like
    /// `1/(pi (1+t))`.
    pub est_error: f64,
}

/// Evaluates `P_1/2(t)` and its derivative to absolute tolerance `tol`.
pub fn p_half(t: f64, tol: f64) -> Result<LegendreEval, LegendreError> {
    if !(t > -1.0 && t <= 1.0) || t.is_nan() {
        return Err(LegendreError::Domain { t });
    }
    if !(tol > 0.0) {
        return Err(LegendreError::Tolerance {
            requested: tol,
            achieved: TOL_FLOOR,
        });
    }
    if tol < TOL_FLOOR {
        return Err(LegendreError::Tolerance {
            requested: tol,
            achieved: TOL_FLOOR,
        });
    }

    if t == 1.0 {
        // P_nu(1) = 1 and P'_nu(1) = nu (nu + 1) / 2 = 3/8.
        return Ok(LegendreEval {
            t,
            value: 1.0,
            derivative: 0.375,
            est_error: 0.0,
        });
    }

    let eval = if t >= REGIME_SPLIT {
        series_eval(t, tol)
    } else {
        endpoint_eval(t, tol)
    };

    if eval.est_error > tol {
        return Err(LegendreError::Tolerance {
            requested: tol,
            achieved: eval.est_error,
        });
    }
    Ok(eval)
}

/// Evaluates `P_1/2` at `cos(theta)` and at `-cos(theta)`, the two
/// ingredients of the separated cone potential.
pub fn p_half_pair(
    theta: f64,
    tol: f64,
) -> Result<(LegendreEval, LegendreEval), LegendreError> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(LegendreError::AngleDomain { theta });
    }
    let c = theta.cos();
    Ok((p_half(c, tol)?, p_half(-c, tol)?))
}

/// Kahan-compensated accumulator.
#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
        self.abs += x.abs();
    }
}

/// Direct regime: `P_1/2(t) = 2F1(-1/2, 3/2; 1; z)` with `z = (1-t)/2`,
/// derivative `(3/8) * 2F1(1/2, 5/2; 2; z)`.
fn series_eval(t: f64, tol: f64) -> LegendreEval {
    let z = 0.5 * (1.0 - t);
    // Term ratios of both series are strictly below z, so the remainder
    // after the first dropped term is geometric with factor 1/(1-z).
    let tail = 1.0 / (1.0 - z);

    let mut val = Kahan::default();
    let mut der = Kahan::default();
    // Value terms v_k: v_0 = 1, v_{k+1} = v_k (k-1/2)(k+3/2) / (k+1)^2 * z.
    let mut v = 1.0f64;
    // Derivative terms d_k: d_0 = 1, d_{k+1} = d_k (k+1/2)(k+5/2) / ((k+2)(k+1)) * z.
    let mut d = 1.0f64;
    let mut trunc = f64::INFINITY;
    let target = 0.25 * tol.max(TOL_FLOOR);
    for k in 0..MAX_TERMS {
        val.add(v);
        der.add(d);
        let kf = k as f64;
        v *= (kf - 0.5) * (kf + 1.5) / ((kf + 1.0) * (kf + 1.0)) * z;
        d *= (kf + 0.5) * (kf + 2.5) / ((kf + 2.0) * (kf + 1.0)) * z;
        trunc = v.abs() * tail;
        // Require the derivative series to be equally converged in
        // relative terms before stopping.
        if trunc < target && 0.375 * d.abs() * tail < target * der.sum.abs().max(1.0) {
            break;
        }
    }
    let value = val.sum;
    let derivative = 0.375 * der.sum;
    let round = f64::EPSILON * val.abs * 4.0;
    LegendreEval {
        t,
        value,
        derivative,
        est_error: trunc + round,
    }
}

/// Endpoint regime around `t = -1`: with `w = (1+t)/2`,
///
/// ```text
/// P_1/2(t) = -(1/pi) sum_n c_n (A_n - ln w) w^n,
/// ```
///
/// where `c_0 = 1`, `c_{n+1} = c_n (n-1/2)(n+3/2)/(n+1)^2` and
/// `A_{n+1} = A_n + 2/(n+1) - 1/(n-1/2) - 1/(n+3/2)` starting from
/// `A_0 = 4 ln 2 - 4`. Differentiating term-wise in `w` gives the
/// derivative without numerical differencing.
fn endpoint_eval(t: f64, tol: f64) -> LegendreEval {
    let w = 0.5 * (1.0 + t);
    let ln_w = w.ln();
    let tail = 1.0 / (1.0 - w);

    // P = -(1/pi) [S_a - S_c ln w]
    // dP/dw = -(1/pi) (1/w) [S_na - S_n ln w - S_c]
    let mut s_a = Kahan::default();
    let mut s_c = Kahan::default();
    let mut s_na = Kahan::default();
    let mut s_n = Kahan::default();

    let mut c = 1.0f64; // c_n w^n
    let mut a = A0;
    let mut trunc = f64::INFINITY;
    let target = 0.25 * tol.max(TOL_FLOOR);
    let log_mag = ln_w.abs() + 8.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        s_a.add(c * a);
        s_c.add(c);
        s_na.add(nf * c * a);
        s_n.add(nf * c);
        a += 2.0 / (nf + 1.0) - 1.0 / (nf - 0.5) - 1.0 / (nf + 1.5);
        c *= (nf - 0.5) * (nf + 1.5) / ((nf + 1.0) * (nf + 1.0)) * w;
        // Dropped value terms are bounded by |c_{n+1} w^{n+1}| (|A| + |ln w|)
        // times the geometric tail; the n-weighted derivative sums carry an
        // extra factor (n+2) and are required to converge to the same
        // relative level.
        trunc = c.abs() * log_mag * tail;
        if trunc * (nf + 2.0) < target {
            break;
        }
    }
    let inv_pi = 1.0 / std::f64::consts::PI;
    let value = -inv_pi * (s_a.sum - s_c.sum * ln_w);
    let dp_dw = -inv_pi * (s_na.sum - s_n.sum * ln_w - s_c.sum) / w;
    let derivative = 0.5 * dp_dw;
    let round = f64::EPSILON * 4.0 * (s_a.abs + s_c.abs * ln_w.abs());
    LegendreEval {
        t,
        value,
        derivative,
        est_error: trunc + round,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Series oracle: plain term-by-term Gauss series for
    /// 2F1(a, b; c; z), no compensation, no reuse of library code.
    fn oracle_2f1(a: f64, b: f64, c: f64, z: f64, tol: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..2000 {
            let kf = k as f64;
            term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
            sum += term;
            if term.abs() < tol {
                return sum;
            }
        }
        panic!("oracle series did not converge at z = {z}");
    }

    fn oracle_series_value(t: f64) -> f64 {
        oracle_2f1(-0.5, 1.5, 1.0, 0.5 * (1.0 - t), 1e-17)
    }

    fn oracle_series_derivative(t: f64) -> f64 {
        0.375 * oracle_2f1(0.5, 2.5, 2.0, 0.5 * (1.0 - t), 1e-17)
    }

    /// ODE oracle: integrate (1-t^2) P'' - 2t P' + 3/4 P = 0 from t = 1
    /// downwards with classical RK4. The start point is offset from the
    /// singular endpoint by a Taylor step using P(1) = 1, P'(1) = 3/8,
    /// P''(1) = -15/128 (from differentiating the equation once).
    fn oracle_ode(t_target: f64) -> (f64, f64) {
        assert!(t_target < 1.0 && t_target > -0.999);
        let delta = 1e-6;
        let t0 = 1.0 - delta;
        let p0 = 1.0 - 0.375 * delta + 0.5 * delta * delta * (-15.0 / 128.0);
        let dp0 = 0.375 + delta * (15.0 / 128.0);
        let rhs = |t: f64, p: f64, dp: f64| (2.0 * t * dp - 0.75 * p) / (1.0 - t * t);
        let n_steps = 400_000usize;
        let h = (t_target - t0) / n_steps as f64;
        let mut t = t0;
        let mut p = p0;
        let mut dp = dp0;
        for _ in 0..n_steps {
            let k1p = dp;
            let k1d = rhs(t, p, dp);
            let k2p = dp + 0.5 * h * k1d;
            let k2d = rhs(t + 0.5 * h, p + 0.5 * h * k1p, dp + 0.5 * h * k1d);
            let k3p = dp + 0.5 * h * k2d;
            let k3d = rhs(t + 0.5 * h, p + 0.5 * h * k2p, dp + 0.5 * h * k2d);
            let k4p = dp + h * k3d;
            let k4d = rhs(t + h, p + h * k3p, dp + h * k3d);
            p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            dp += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
            t += h;
        }
        (p, dp)
    }

    #[test]
    fn normalization_at_one() {
        let e = p_half(1.0, 1e-12).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.derivative, 0.375);
        assert_eq!(e.est_error, 0.0);
    }

    #[test]
    fn value_at_zero_matches_series_oracle() {
        // Frozen from oracle_2f1(-1/2, 3/2; 1; 1/2) summed to 1e-17.
        let v0 = oracle_series_value(0.0);
        assert!((v0 - 0.5393526011883794).abs() < 1e-15);
        let e = p_half(0.0, 1e-12).unwrap();
        assert!((e.value - v0).abs() <= 1e-12);
        assert!(e.est_error <= 1e-12);
    }

    #[test]
    fn value_at_half_matches_ode_oracle() {
        let (p, dp) = oracle_ode(0.5);
        let e = p_half(0.5, 1e-12).unwrap();
        assert!((e.value - p).abs() < 1e-10, "value {} vs ode {}", e.value, p);
        assert!((e.derivative - dp).abs() < 1e-9);
    }

    #[test]
    fn oracles_agree_with_p_half_on_grid() {
        // 50 points spanning (-0.95, 1]; both oracles within 1e-9.
        for i in 0..50 {
            let t = -0.95 + 1.95 * (i as f64 + 1.0) / 50.0;
            let e = p_half(t, 1e-12).unwrap();
            let sv = oracle_series_value(t);
            assert!(
                (e.value - sv).abs() < 1e-9,
                "series oracle mismatch at t={t}: {} vs {sv}",
                e.value
            );
            let sd = oracle_series_derivative(t);
            assert!((e.derivative - sd).abs() < 1e-9 * sd.abs().max(1.0));
            if t < 0.999 {
                let (ov, od) = oracle_ode(t);
                assert!((e.value - ov).abs() < 1e-9, "ode oracle mismatch at t={t}");
                assert!((e.derivative - od).abs() < 1e-8 * od.abs().max(1.0));
            }
        }
    }

    #[test]
    fn endpoint_expansion_agrees_with_direct_series_in_overlap() {
        // The direct series still converges (slowly) for t in (-1, -1/2);
        // compare against the endpoint expansion used by p_half there.
        for &t in &[-0.55, -0.6, -0.7, -0.8, -0.9, -0.95] {
            let e = p_half(t, 1e-12).unwrap();
            let sv = oracle_series_value(t);
            let sd = oracle_series_derivative(t);
            assert!((e.value - sv).abs() < 1e-11, "t={t}: {} vs {sv}", e.value);
            assert!((e.derivative - sd).abs() < 1e-9 * sd.abs());
        }
    }

    #[test]
    fn ode_residual_from_finite_differences() {
        // Reconstruct P'' from the equation and compare with a central
        // second difference of p_half values; the discrepancy must scale
        // like the h^2 finite-difference error, h^2/12 * P'''', with
        // P'''' estimated by differencing the reconstructed P''.
        let mut rng = ChaCha8Rng::seed_from_u64(0x1eaf);
        let h = 1e-3;
        for _ in 0..200 {
            let t: f64 = rng.gen_range(-0.99..0.995);
            let eval = |x: f64| p_half(x, 1e-12).unwrap();
            let pdd = |x: f64| {
                let e = eval(x);
                (2.0 * x * e.derivative - 0.75 * e.value) / (1.0 - x * x)
            };
            let e0 = eval(t);
            let fd2 = (eval(t + h).value - 2.0 * e0.value + eval(t - h).value) / (h * h);
            let ode2 = pdd(t);
            let p4 = (pdd(t + h) - 2.0 * ode2 + pdd(t - h)) / (h * h);
            let fd_bound = h * h / 12.0 * p4.abs() * 3.0;
            let round_bound = 6.0 * e0.est_error.max(1e-15 * e0.value.abs()) / (h * h);
            assert!(
                (fd2 - ode2).abs() <= fd_bound + round_bound + 1e-7,
                "t={t}: fd2={fd2} ode={ode2} bound={}",
                fd_bound + round_bound
            );
        }
    }

    #[test]
    fn est_error_within_requested_tolerance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let t: f64 = rng.gen_range(-0.9999f64..1.0);
            for &tol in &[1e-8, 1e-10, 1e-12] {
                let e = p_half(t, tol).unwrap();
                assert!(e.est_error <= tol);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(p_half(-1.0, 1e-10), Err(LegendreError::Domain { .. })));
        assert!(matches!(p_half(-1.5, 1e-10), Err(LegendreError::Domain { .. })));
        assert!(matches!(p_half(1.0 + 1e-12, 1e-10), Err(LegendreError::Domain { .. })));
        assert!(matches!(
            p_half(0.3, 1e-20),
            Err(LegendreError::Tolerance { .. })
        ));
        assert!(matches!(
            p_half_pair(0.0, 1e-10),
            Err(LegendreError::AngleDomain { .. })
        ));
        assert!(matches!(
            p_half_pair(std::f64::consts::PI, 1e-10),
            Err(LegendreError::AngleDomain { .. })
        ));
    }

    #[test]
    fn pair_at_right_angle_is_symmetric() {
        // cos(pi/2) rounds to 6.1e-17 rather than 0, so the two
        // evaluations agree to a few ulps, not bitwise.
        let (a, b) = p_half_pair(std::f64::consts::FRAC_PI_2, 1e-12).unwrap();
        assert!((a.value - b.value).abs() < 1e-15);
        assert!(a.t.abs() < 1e-16);
    }

    #[test]
    fn pair_at_third_angle_matches_oracle() {
        let (a, b) = p_half_pair(std::f64::consts::FRAC_PI_3, 1e-12).unwrap();
        assert!((a.t - 0.5).abs() < 1e-15);
        assert!((b.t + 0.5).abs() < 1e-15);
        assert!((a.value - oracle_series_value(0.5)).abs() < 1e-12);
        assert!((b.value - oracle_series_value(-0.5)).abs() < 1e-11);
    }

    #[test]
    fn pair_near_zero_angle_tends_to_one() {
        let (a, _) = p_half_pair(1e-6, 1e-12).unwrap();
        assert!((a.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn logarithmic_blowup_near_minus_one() {
        // P_1/2 -> -inf and P'_1/2 ~ 1/(pi (1+t)) as t -> -1.
        let e = p_half(-1.0 + 1e-9, 1e-10).unwrap();
        assert!(e.value < -5.0);
        let expected_slope = 1.0 / (std::f64::consts::PI * 1e-9);
        assert!((e.derivative / expected_slope - 1.0).abs() < 1e-3);
    }
}
