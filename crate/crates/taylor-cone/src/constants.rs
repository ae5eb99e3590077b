//! Explicit constants of the elliptic regularity chain.
//!
//! Everything here evaluates a printed formula: the Caccioppoli constant
//! `C_S^2 2^(n+8) beta/alpha`, the reverse-Holder pair
//! `C1 = C_S^2 2^10 80^n beta/alpha`, `p = (2C1 - m)/(2C1 - 1)` with
//! `m = n/(n+2)`, the covering constant `2^(2n+1) 5^(np) n^(np/2)
//! omega_n^(p-1)`, the decay radii `theta = (n-1)/(2^(n+1) n)` (and its
//! contrast-scaled variant), the margin `chi`, the smallness threshold
//! `delta_1`, the admissible-angle margin `delta_0`, the dimensional
//! ratio bound `lambda_0`, and the density threshold `eps_0(tau)`.
//!
//! Two representation rules keep these meaningful:
//!
//! * quantities that are rational by construction (`m`, `theta_i`,
//!   `lambda_0`) are carried as exact big rationals, floats are derived;
//! * quantities that collapse in binary64 (`delta_1` is of order
//!   `10^(-10^10)` for realistic inputs) are carried as [`LogValue`],
//!   a linear/log10 pair whose linear half may underflow to zero.
//!
//! The Sobolev-Poincare constant `C_S` is an input with default 1; no
//! value is invented for it, and every ledger is conditional on it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstantsError {
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// A positive quantity carried both linearly and in log10. The linear
/// half underflows to 0 (or overflows to inf) gracefully; `log10` is
/// always finite for a positive quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub linear: f64,
    pub log10: f64,
}

impl LogValue {
    pub fn from_log10(log10: f64) -> Self {
        Self { linear: 10f64.powf(log10), log10 }
    }

    pub fn from_linear(linear: f64) -> Self {
        Self { linear, log10: linear.log10() }
    }

    /// True when the linear half is below the threshold at which the
    /// caller should trust only the log10 field (reported by the CLI as
    /// an underflow warning).
    pub fn underflowed(&self) -> bool {
        self.linear < 1e-300
    }
}

/// Unit-ball volume `omega_n = pi^(n/2) / Gamma(n/2 + 1)`, by the
/// two-step recursion `omega_n = 2 pi omega_{n-2} / n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI * unit_ball_volume(n - 2) / n as f64,
    }
}

/// `m = n/(n+2)` as an exact rational.
pub fn sobolev_exponent_m(n: usize) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(n + 2))
}

fn check_common(n: usize, ratio: f64, c_s: f64) -> Result<(), ConstantsError> {
    if n < 2 {
        return Err(ConstantsError::Domain(format!("n = {n} must be >= 2")));
    }
    if !(ratio >= 1.0) {
        return Err(ConstantsError::Domain(format!("ratio = {ratio} must be >= 1")));
    }
    if !(c_s > 0.0) {
        return Err(ConstantsError::Domain(format!("C_S = {c_s} must be > 0")));
    }
    Ok(())
}

/// Caccioppoli constant `C = C_S^2 2^(n+8) beta/alpha`.
pub fn caccioppoli_constant(n: usize, ratio: f64, c_s: f64) -> Result<f64, ConstantsError> {
    check_common(n, ratio, c_s)?;
    Ok(c_s * c_s * 2f64.powi(n as i32 + 8) * ratio)
}

/// Reverse-Holder pair `(C1, p)`:
/// `C1 = C_S^2 2^10 80^n beta/alpha`, `p = (2 C1 - m)/(2 C1 - 1)`.
///
/// `p - 1 = (1 - m)/(2 C1 - 1)` is returned alongside because forming it
/// from `p` cancels 10+ digits for realistic `C1`; every downstream
/// exponent (`delta_1`, `eps_0`) is built from the exact difference.
#[derive(Debug, Clone, Copy)]
pub struct GehringExponent {
    pub c1: f64,
    pub p: f64,
    /// `p - 1`, computed without cancellation.
    pub p_minus_1: f64,
}

pub fn gehring_exponent(n: usize, ratio: f64, c_s: f64) -> Result<GehringExponent, ConstantsError> {
    check_common(n, ratio, c_s)?;
    let c1 = c_s * c_s * 1024.0 * 80f64.powi(n as i32) * ratio;
    if !(2.0 * c1 > 1.0) {
        return Err(ConstantsError::Domain(format!(
            "C1 = {c1} <= 1/2 leaves the exponent formula p = (2C1 - m)/(2C1 - 1) undefined"
        )));
    }
    let m = n as f64 / (n as f64 + 2.0);
    let p_minus_1 = (1.0 - m) / (2.0 * c1 - 1.0);
    Ok(GehringExponent { c1, p: 1.0 + p_minus_1, p_minus_1 })
}

/// Covering constant of the reverse-Holder inequality,
/// `C = 2^(2n+1) 5^(np) n^(np/2) omega_n^(p-1)`.
pub fn gehring_constant(n: usize, p: f64) -> Result<f64, ConstantsError> {
    if n < 2 {
        return Err(ConstantsError::Domain(format!("n = {n} must be >= 2")));
    }
    if !(p >= 1.0) {
        return Err(ConstantsError::Domain(format!("p = {p} must be >= 1")));
    }
    Ok(10f64.powf(log10_gehring_constant(n, p)?))
}

/// `log10` of the covering constant, assembled termwise so it stays
/// exact when the linear value would overflow for large n.
pub fn log10_gehring_constant(n: usize, p: f64) -> Result<f64, ConstantsError> {
    if n < 2 {
        return Err(ConstantsError::Domain(format!("n = {n} must be >= 2")));
    }
    let nf = n as f64;
    Ok((2.0 * nf + 1.0) * 2f64.log10()
        + nf * p * 5f64.log10()
        + 0.5 * nf * p * nf.log10()
        + (p - 1.0) * unit_ball_volume(n).log10())
}

/// Decay radii and the margin `chi`:
/// `theta_i = (n-1)/(2^(n+1) n)` (density cases), `theta_iii = theta_i
/// (alpha/beta)^2` (flat case), `chi = theta^(n-1)/2 - 2^n (beta/alpha)^2
/// theta^n` evaluated at `theta = theta_iii`.
#[derive(Debug, Clone)]
pub struct DecayRadii {
    pub theta_i: BigRational,
    pub theta_i_f64: f64,
    pub theta_iii: f64,
    pub chi: LogValue,
}

pub fn decay_radii(n: usize, ratio: f64) -> Result<DecayRadii, ConstantsError> {
    if n < 2 {
        return Err(ConstantsError::Domain(format!("n = {n} must be >= 2")));
    }
    if !(ratio >= 1.0) {
        return Err(ConstantsError::Domain(format!("ratio = {ratio} must be >= 1")));
    }
    let theta_i = BigRational::new(BigInt::from(n - 1), BigInt::from(n) * BigInt::from(2u32).pow(n as u32 + 1));
    let theta_i_f64 = rational_to_f64(&theta_i);
    let theta_iii = theta_i_f64 / (ratio * ratio);
    let nf = n as f64;
    // Two-term formula in linear space; at theta = theta_iii it
    // simplifies algebraically to theta^(n-1)/(2n), which is what the
    // log10 half uses (the cancellation-free route for extreme ratios).
    let chi_linear = 0.5 * theta_iii.powi(n as i32 - 1)
        - 2f64.powi(n as i32) * ratio * ratio * theta_iii.powi(n as i32);
    let chi_log10 = (nf - 1.0) * theta_iii.log10() - (2.0 * nf).log10();
    if !(chi_linear > 0.0 || chi_linear == 0.0 && theta_iii.powi(n as i32 - 1) == 0.0) {
        return Err(ConstantsError::Invariant(format!(
            "chi = {chi_linear} must be positive for n = {n}, ratio = {ratio}"
        )));
    }
    Ok(DecayRadii {
        theta_i,
        theta_i_f64,
        theta_iii,
        chi: LogValue { linear: chi_linear, log10: chi_log10 },
    })
}

/// Supremum admissible smallness threshold
/// `delta_1 = [(alpha/beta)^2 C^(-1/p) chi]^(1/(1 - 1/p))`.
///
/// For realistic inputs `1 - 1/p` is of order `1e-11` and the result
/// only exists in log10; the linear half underflows to zero and callers
/// should surface that as a warning, not an error.
pub fn delta1(n: usize, ratio: f64, c_s: f64) -> Result<LogValue, ConstantsError> {
    check_common(n, ratio, c_s)?;
    let geh = gehring_exponent(n, ratio, c_s)?;
    let radii = decay_radii(n, ratio)?;
    let log10_c = log10_gehring_constant(n, geh.p)?;
    // 1 - 1/p = (p-1)/p through the exact difference.
    let one_minus_inv_p = geh.p_minus_1 / geh.p;
    let log10_base = radii.chi.log10 - 2.0 * ratio.log10() - log10_c / geh.p;
    Ok(LogValue::from_log10(log10_base / one_minus_inv_p))
}

/// Dimensional ratio bound
/// `lambda_0 = (n^n + n(n-1)^(n-1) - (n-1)^n) / (n^n - n(n-1)^(n-1) + (n-1)^n)`
/// as an exact rational.
pub fn lambda0(n: usize) -> Result<BigRational, ConstantsError> {
    if n < 2 {
        return Err(ConstantsError::Domain(format!("n = {n} must be >= 2")));
    }
    let nn = BigInt::from(n).pow(n as u32);
    let mid = BigInt::from(n) * BigInt::from(n - 1).pow(n as u32 - 1);
    let low = BigInt::from(n - 1).pow(n as u32);
    Ok(BigRational::new(&nn + &mid - &low, &nn - &mid + &low))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Spherical sector volume
/// `|E_theta cap B_1| = omega_{n-1} (int_0^theta sin^n t dt
///                      + sin^(n-1)(theta) cos(theta) / n)`.
pub fn sector_volume(theta: f64, n: usize) -> Result<f64, ConstantsError> {
    if n < 2 {
        return Err(ConstantsError::Domain(format!("n = {n} must be >= 2")));
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-15).contains(&theta) {
        return Err(ConstantsError::Domain(format!(
            "theta = {theta} outside [0, pi/2]"
        )));
    }
    let nf = n as f64;
    let integral = adaptive_gauss_legendre(&|t: f64| t.sin().powi(n as i32), 0.0, theta, 1e-13);
    let cap = theta.sin().powi(n as i32 - 1) * theta.cos() / nf;
    Ok(unit_ball_volume(n - 1) * (integral + cap))
}

/// Complementary volume `|H \ E_theta| cap B_1 = omega_n/2 - sector`,
/// written as a difference of small quantities so it stays accurate as
/// `theta -> pi/2` (`H` is the half-space the cone flattens into).
pub fn halfspace_gap_volume(theta: f64, n: usize) -> Result<f64, ConstantsError> {
    if n < 2 {
        return Err(ConstantsError::Domain(format!("n = {n} must be >= 2")));
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-15).contains(&theta) {
        return Err(ConstantsError::Domain(format!(
            "theta = {theta} outside [0, pi/2]"
        )));
    }
    let nf = n as f64;
    let integral = adaptive_gauss_legendre(
        &|t: f64| t.sin().powi(n as i32),
        theta,
        std::f64::consts::FRAC_PI_2,
        1e-13,
    );
    let cap = theta.sin().powi(n as i32 - 1) * theta.cos() / nf;
    Ok(unit_ball_volume(n - 1) * (integral - cap))
}

/// Admissible-angle margin `delta_0 = min(theta_small, pi/2 - theta_flat)`:
/// `theta_small` solves `|E_theta cap B_1| = delta_1 omega_n` (vanishing
/// density case) and `theta_flat` solves `|(E_theta Delta H) cap B_1| =
/// delta_1 omega_n` against the tangent half-space (flat case).
#[derive(Debug, Clone, Copy)]
pub struct Delta0 {
    pub delta0: LogValue,
    /// Small-density branch: the angle below which the cone sector is
    /// thinner than the threshold.
    pub theta_small: LogValue,
    /// Flat branch: the distance `pi/2 - theta_flat`.
    pub flat_margin: LogValue,
}

pub fn delta0(n: usize, ratio: f64, c_s: f64) -> Result<Delta0, ConstantsError> {
    let d1 = delta1(n, ratio, c_s)?;
    delta0_from_delta1(n, d1)
}

/// The inversion step of [`delta0`], reusable with a synthetic
/// `delta_1` (tests exercise the bisection branch this way).
pub fn delta0_from_delta1(n: usize, d1: LogValue) -> Result<Delta0, ConstantsError> {
    if n < 2 {
        return Err(ConstantsError::Domain(format!("n = {n} must be >= 2")));
    }
    let omega_n = unit_ball_volume(n);
    let omega_nm1 = unit_ball_volume(n - 1);
    let nf = n as f64;
    let log10_target = d1.log10 + omega_n.log10();

    // Below this the target volume cannot be represented linearly and
    // the leading-order inversion is exact to every representable digit.
    let theta_small;
    let flat_margin;
    if log10_target >= -90.0 {
        let target = 10f64.powf(log10_target);
        if target >= omega_n / 2.0 {
            return Err(ConstantsError::Domain(format!(
                "delta_1 = {} leaves no admissible angle window",
                d1.linear
            )));
        }
        theta_small = LogValue::from_linear(bisect_log(
            &|th| sector_volume(th, n).expect("sector volume in range"),
            target,
            std::f64::consts::FRAC_PI_2,
        ));
        flat_margin = LogValue::from_linear(bisect_log(
            &|s| {
                halfspace_gap_volume(std::f64::consts::FRAC_PI_2 - s, n)
                    .expect("gap volume in range")
            },
            target,
            std::f64::consts::FRAC_PI_2,
        ));
    } else {
        // sector(theta) ~ omega_{n-1} theta^(n-1)/n,
        // gap(pi/2 - s)  ~ omega_{n-1} (n-1) s / n.
        theta_small = LogValue::from_log10(
            (log10_target + (nf / omega_nm1).log10()) / (nf - 1.0),
        );
        flat_margin = LogValue::from_log10(
            log10_target + (nf / ((nf - 1.0) * omega_nm1)).log10(),
        );
    }
    let delta0 = if theta_small.log10 <= flat_margin.log10 {
        theta_small
    } else {
        flat_margin
    };
    Ok(Delta0 { delta0, theta_small, flat_margin })
}

/// Monotone inversion by bisection on log10 of the argument, resolving
/// the root to better than 1e-10 relative.
fn bisect_log(f: &dyn Fn(f64) -> f64, target: f64, hi_arg: f64) -> f64 {
    let mut lo = -150.0f64;
    let mut hi = hi_arg.log10();
    debug_assert!(f(10f64.powf(lo)) < target && f(10f64.powf(hi)) >= target);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(10f64.powf(mid)) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    10f64.powf(0.5 * (lo + hi))
}

/// Density threshold `eps_0 = tau^(n/(1 - 1/p))` of the decay estimate.
pub fn eps0(n: usize, tau: f64, p: f64) -> Result<LogValue, ConstantsError> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(ConstantsError::Domain(format!("tau = {tau} outside (0, 1)")));
    }
    if !(p > 1.0) {
        return Err(ConstantsError::Domain(format!("p = {p} must be > 1")));
    }
    eps0_from_p_minus_1(n, tau, p - 1.0)
}

/// As [`eps0`] but fed the exact `p - 1`, which the ledger keeps to
/// avoid rebuilding a 1e-11-sized difference from `p` itself.
pub fn eps0_from_p_minus_1(n: usize, tau: f64, p_minus_1: f64) -> Result<LogValue, ConstantsError> {
    if n < 2 {
        return Err(ConstantsError::Domain(format!("n = {n} must be >= 2")));
    }
    if !(p_minus_1 > 0.0) {
        return Err(ConstantsError::Domain(format!(
            "p - 1 = {p_minus_1} must be > 0"
        )));
    }
    let p = 1.0 + p_minus_1;
    let exponent = n as f64 * p / p_minus_1; // n / (1 - 1/p)
    Ok(LogValue::from_log10(exponent * tau.log10()))
}

/// Every explicit constant for one `(n, beta/alpha, C_S)` triple.
#[derive(Debug, Clone)]
pub struct ConstantsLedger {
    pub n: usize,
    pub ratio: f64,
    pub c_s: f64,
    pub m: BigRational,
    pub m_f64: f64,
    pub c_cacc: f64,
    pub c1_gehring: f64,
    pub p: f64,
    pub p_minus_1: f64,
    pub c_gehring: f64,
    pub log10_c_gehring: f64,
    pub theta_i: BigRational,
    pub theta_i_f64: f64,
    pub theta_iii: f64,
    pub chi: LogValue,
    pub delta1: LogValue,
    pub lambda0: BigRational,
    pub lambda0_f64: f64,
    pub delta0: LogValue,
    pub theta_small: LogValue,
    pub flat_margin: LogValue,
    /// `eps_0(tau)` at the standard decay fractions.
    pub eps0: Vec<(f64, LogValue)>,
    pub omega_n: f64,
    pub omega_n_minus_1: f64,
}

/// Decay fractions the ledger tabulates `eps_0` at.
pub const EPS0_TAUS: [f64; 2] = [0.5, 0.25];

impl ConstantsLedger {
    pub fn compute(n: usize, ratio: f64, c_s: f64) -> Result<Self, ConstantsError> {
        if !(ratio > 1.0) {
            return Err(ConstantsError::Domain(format!(
                "ledger requires ratio = beta/alpha > 1, got {ratio}"
            )));
        }
        check_common(n, ratio, c_s)?;
        let m = sobolev_exponent_m(n);
        let m_f64 = rational_to_f64(&m);
        let c_cacc = caccioppoli_constant(n, ratio, c_s)?;
        let geh = gehring_exponent(n, ratio, c_s)?;
        let log10_c_gehring = log10_gehring_constant(n, geh.p)?;
        let c_gehring = gehring_constant(n, geh.p)?;
        let radii = decay_radii(n, ratio)?;
        let d1 = delta1(n, ratio, c_s)?;
        let l0 = lambda0(n)?;
        let l0_f64 = rational_to_f64(&l0);
        let d0 = delta0_from_delta1(n, d1)?;
        let mut eps = Vec::new();
        for &tau in EPS0_TAUS.iter() {
            eps.push((tau, eps0_from_p_minus_1(n, tau, geh.p_minus_1)?));
        }

        let ledger = Self {
            n,
            ratio,
            c_s,
            m,
            m_f64,
            c_cacc,
            c1_gehring: geh.c1,
            p: geh.p,
            p_minus_1: geh.p_minus_1,
            c_gehring,
            log10_c_gehring,
            theta_i: radii.theta_i,
            theta_i_f64: radii.theta_i_f64,
            theta_iii: radii.theta_iii,
            chi: radii.chi,
            delta1: d1,
            lambda0: l0,
            lambda0_f64: l0_f64,
            delta0: d0.delta0,
            theta_small: d0.theta_small,
            flat_margin: d0.flat_margin,
            eps0: eps,
            omega_n: unit_ball_volume(n),
            omega_n_minus_1: unit_ball_volume(n - 1),
        };
        ledger.check_invariants()?;
        Ok(ledger)
    }

    fn check_invariants(&self) -> Result<(), ConstantsError> {
        let nf = self.n as f64;
        // p itself may round to exactly 1.0 in binary64 when C1 is huge;
        // the exact difference p - 1 is the meaningful invariant.
        let band = (1.0 - self.m_f64) / (2.0 * self.c1_gehring - 1.0);
        if !(self.p_minus_1 > 0.0 && self.p_minus_1 <= band * (1.0 + 1e-15)) {
            return Err(ConstantsError::Invariant(format!(
                "p - 1 = {} outside (0, {band}]",
                self.p_minus_1
            )));
        }
        if !(self.lambda0_f64 > 1.0) {
            return Err(ConstantsError::Invariant(format!(
                "lambda0 = {} must exceed 1",
                self.lambda0_f64
            )));
        }
        if !(self.theta_i_f64 > 0.0 && self.theta_iii > 0.0) {
            return Err(ConstantsError::Invariant("decay radii must be positive".into()));
        }
        if !(self.delta1.log10 < 0.0) {
            return Err(ConstantsError::Invariant(format!(
                "delta1 = 1e{} must lie in (0, 1)",
                self.delta1.log10
            )));
        }
        if !self.delta0.log10.is_finite() {
            return Err(ConstantsError::Invariant("delta0 must be positive".into()));
        }
        let _ = nf;
        Ok(())
    }
}

/// Adaptive Gauss-Legendre quadrature: 16-point panels, split while the
/// two-half refinement disagrees with the parent panel by more than the
/// local tolerance share.
fn adaptive_gauss_legendre(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let whole = gl16(f, a, b);
    adaptive_rec(f, a, b, whole, tol, 24)
}

fn adaptive_rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> f64 {
    let mid = 0.5 * (a + b);
    let left = gl16(f, a, mid);
    let right = gl16(f, mid, b);
    let refined = left + right;
    if depth == 0 || (refined - whole).abs() <= tol {
        return refined;
    }
    adaptive_rec(f, a, mid, left, 0.5 * tol, depth - 1)
        + adaptive_rec(f, mid, b, right, 0.5 * tol, depth - 1)
}

fn gl16(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl16_rule();
    let half = 0.5 * (b - a);
    let midpt = 0.5 * (a + b);
    let mut acc = 0.0;
    for i in 0..16 {
        acc += weights[i] * f(midpt + half * nodes[i]);
    }
    acc * half
}

/// Nodes and weights of the 16-point rule on [-1, 1], computed once by
/// Newton iteration on the integer-degree Legendre recurrence.
fn gl16_rule() -> (&'static [f64; 16], &'static [f64; 16]) {
    use std::sync::OnceLock;
    static RULE: OnceLock<([f64; 16], [f64; 16])> = OnceLock::new();
    let rule = RULE.get_or_init(|| {
        let n = 16usize;
        let mut nodes = [0.0f64; 16];
        let mut weights = [0.0f64; 16];
        for i in 0..n {
            // Chebyshev-based initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (pn, dpn) = legendre_poly(n, x);
                let dx = pn / dpn;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dpn) = legendre_poly(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dpn * dpn);
        }
        (nodes, weights)
    });
    (&rule.0, &rule.1)
}

/// Integer-degree Legendre polynomial and derivative by the three-term
/// recurrence (quadrature helper, unrelated to `P_1/2`).
fn legendre_poly(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn caccioppoli_formula_values() {
        assert_eq!(caccioppoli_constant(3, 1.0, 1.0).unwrap(), 2048.0);
        assert_eq!(caccioppoli_constant(3, 2.0, 1.0).unwrap(), 4096.0);
        let v = caccioppoli_constant(4, 17.59, 2.0).unwrap();
        assert!((v - 4.0 * 4096.0 * 17.59).abs() < 1e-9 * v);
    }

    #[test]
    fn gehring_exponent_closed_form() {
        let g = gehring_exponent(3, 2.0, 1.0).unwrap();
        let c1 = 2f64.powi(11) * 80f64.powi(3);
        assert_eq!(g.c1, c1);
        let expected_p = (2.0 * c1 - 0.6) / (2.0 * c1 - 1.0);
        assert!((g.p - expected_p).abs() <= 1e-15 * expected_p);
        assert!(g.p > 1.0);
    }

    #[test]
    fn gehring_exponent_monotone_to_one() {
        // p decreases toward 1 as C1 grows.
        let mut last = f64::INFINITY;
        for &cs in &[0.001, 0.01, 0.1, 1.0, 10.0] {
            let g = gehring_exponent(3, 2.0, cs).unwrap();
            assert!(g.p < last);
            last = g.p;
        }
        // For extreme C1 the exponent excess drops below machine epsilon
        // and p rounds to exactly 1.0; p_minus_1 keeps the information.
        let huge = gehring_exponent(3, 1e6, 1e3).unwrap();
        assert!(huge.p_minus_1 > 0.0 && huge.p_minus_1 < 1e-14);
        assert!(huge.p >= 1.0);
    }

    #[test]
    fn appendix_chain_consistency() {
        // C1 = 4 * 40^n * C_cacc exactly, and the chain constant
        // 2^(1/m) 10^n * (4^n C_cacc) stays below it.
        for n in 2..=6 {
            for &ratio in &[1.5, 2.0, 17.59] {
                let c = caccioppoli_constant(n, ratio, 1.0).unwrap();
                let g = gehring_exponent(n, ratio, 1.0).unwrap();
                let bound = 4.0 * 40f64.powi(n as i32) * c;
                assert!((g.c1 - bound).abs() <= 1e-12 * bound, "n={n} ratio={ratio}");
                let m = n as f64 / (n as f64 + 2.0);
                let chain = 2f64.powf(1.0 / m) * 10f64.powi(n as i32) * 4f64.powi(n as i32) * c;
                assert!(chain <= g.c1 * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn gehring_constant_values() {
        // p -> 1 limit.
        for n in 2..=5 {
            let c = gehring_constant(n, 1.0).unwrap();
            let expected =
                2f64.powi(2 * n as i32 + 1) * 5f64.powi(n as i32) * (n as f64).powf(n as f64 / 2.0);
            assert!((c - expected).abs() < 1e-12 * expected);
        }
        let c = gehring_constant(2, 1.001).unwrap();
        let expected = 2f64.powi(5)
            * 5f64.powf(2.002)
            * 2f64.powf(1.001)
            * (std::f64::consts::PI).powf(0.001);
        assert!((c - expected).abs() < 1e-12 * expected);
        // omega_3 = 4 pi / 3 used internally.
        assert!((unit_ball_volume(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn decay_radii_values() {
        let r = decay_radii(3, 2.0).unwrap();
        assert_eq!(r.theta_i, BigRational::new(BigInt::from(1), BigInt::from(24)));
        assert!((r.theta_i_f64 - 1.0 / 24.0).abs() < 1e-18);
        assert!((r.theta_iii - 1.0 / 96.0).abs() < 1e-18);
        let chi_expected = 0.5 / (96.0 * 96.0) - 8.0 * 4.0 / (96.0 * 96.0 * 96.0);
        assert!((r.chi.linear - chi_expected).abs() < 1e-18);
        assert!(r.chi.linear > 0.0);
        // Simplified log10 route agrees with the two-term formula.
        assert!((r.chi.log10 - chi_expected.log10()).abs() < 1e-12);

        let unit = decay_radii(3, 1.0).unwrap();
        assert_eq!(unit.theta_iii, unit.theta_i_f64);
    }

    #[test]
    fn delta1_monotone_in_ratio() {
        let mut last = f64::INFINITY;
        for &ratio in &[2.0, 5.0, 17.59, 30.0, 100.0] {
            let d = delta1(3, ratio, 1.0).unwrap();
            assert!(d.log10 < last, "ratio {ratio}");
            last = d.log10;
        }
    }

    #[test]
    fn delta1_matches_exact_rational_oracle() {
        // Independent assembly: C1, m, p - 1 as exact rationals
        // (ratio 17.59 = 1759/100), logs taken only at the end.
        let n = 3usize;
        let ratio = BigRational::new(BigInt::from(1759), BigInt::from(100));
        let c1 = BigRational::from(BigInt::from(1024)) * BigRational::from(BigInt::from(80).pow(3)) * &ratio;
        let m = BigRational::new(BigInt::from(3), BigInt::from(5));
        let pm1 = (BigRational::one() - &m)
            / (BigRational::from(BigInt::from(2)) * &c1 - BigRational::one());
        let p = BigRational::one() + &pm1;
        let theta_i = BigRational::new(BigInt::from(1), BigInt::from(24));
        let theta_iii = &theta_i / (&ratio * &ratio);
        let two_n = BigRational::from(BigInt::from(8));
        let chi = BigRational::new(BigInt::from(1), BigInt::from(2)) * &theta_iii * &theta_iii
            - &two_n * &ratio * &ratio * &theta_iii * &theta_iii * &theta_iii;
        let p_f = rational_to_f64(&p);
        let log10_c = log10_gehring_constant(n, p_f).unwrap();
        let log10_base =
            rational_to_f64(&chi).log10() - 2.0 * rational_to_f64(&ratio).log10() - log10_c / p_f;
        let one_minus_inv_p = rational_to_f64(&(&pm1 / &p));
        let oracle_log10 = log10_base / one_minus_inv_p;

        let d = delta1(n, 17.59, 1.0).unwrap();
        assert!(d.underflowed(), "delta1 must be far below 1e-300");
        assert!(
            (d.log10 - oracle_log10).abs() <= 1e-10 * oracle_log10.abs(),
            "log10 delta1 {} vs oracle {}",
            d.log10,
            oracle_log10
        );
    }

    #[test]
    fn delta1_defining_equation_reconstruction() {
        // (1 - 1/p) log10(delta1) + log10(C)/p + 2 log10(ratio)
        //   - log10(chi) = 0, in log-space to 1e-12 of the term scale.
        for &(n, ratio) in &[(3usize, 17.59f64), (3, 30.0), (4, 5.0), (2, 2.0)] {
            let geh = gehring_exponent(n, ratio, 1.0).unwrap();
            let radii = decay_radii(n, ratio).unwrap();
            let d = delta1(n, ratio, 1.0).unwrap();
            let log10_c = log10_gehring_constant(n, geh.p).unwrap();
            let lhs = (geh.p_minus_1 / geh.p) * d.log10 + log10_c / geh.p
                + 2.0 * ratio.log10()
                - radii.chi.log10;
            let scale = (log10_c / geh.p).abs() + 2.0 * ratio.log10().abs() + radii.chi.log10.abs();
            assert!(lhs.abs() <= 1e-12 * scale.max(1.0), "n={n} ratio={ratio}: {lhs:e}");
        }
    }

    #[test]
    fn lambda0_values() {
        assert_eq!(lambda0(3).unwrap(), BigRational::new(BigInt::from(31), BigInt::from(23)));
        assert_eq!(lambda0(2).unwrap(), BigRational::new(BigInt::from(5), BigInt::from(3)));
        let mut last = f64::INFINITY;
        for n in 2..=50 {
            let l = rational_to_f64(&lambda0(n).unwrap());
            assert!(l > 1.0, "n={n}");
            assert!(l < last, "lambda0 should approach 1 monotonically at n={n}");
            last = l;
        }
        assert!(last - 1.0 < 0.15, "lambda0(50) = {last} should be near 1");
    }

    #[test]
    fn sector_volume_hemisphere_and_empty() {
        for n in 2..=10 {
            let v = sector_volume(std::f64::consts::FRAC_PI_2, n).unwrap();
            let half = unit_ball_volume(n) / 2.0;
            assert!((v - half).abs() <= 1e-12 * half, "n={n}: {v} vs {half}");
            assert_eq!(sector_volume(0.0, n).unwrap(), 0.0);
        }
    }

    #[test]
    fn sector_volume_matches_antiderivative_recursion() {
        // S_k(x) = int_0^x sin^k: S_0 = x, S_1 = 1 - cos x,
        // S_k = (-sin^(k-1) x cos x + (k-1) S_{k-2}) / k.
        fn sink_integral(k: usize, x: f64) -> f64 {
            match k {
                0 => x,
                1 => 1.0 - x.cos(),
                _ => {
                    (-x.sin().powi(k as i32 - 1) * x.cos()
                        + (k as f64 - 1.0) * sink_integral(k - 2, x))
                        / k as f64
                }
            }
        }
        for n in 2..=10 {
            for &theta in &[0.2, std::f64::consts::FRAC_PI_4, 1.3] {
                let v = sector_volume(theta, n).unwrap();
                let exact = unit_ball_volume(n - 1)
                    * (sink_integral(n, theta)
                        + theta.sin().powi(n as i32 - 1) * theta.cos() / n as f64);
                assert!((v - exact).abs() <= 1e-12, "n={n} theta={theta}");
            }
        }
        // Quarter-cone value for n = 3 against the closed form of int sin^3.
        let t = std::f64::consts::FRAC_PI_4;
        let s3 = -t.cos() + t.cos().powi(3) / 3.0 + 2.0 / 3.0;
        let exact = std::f64::consts::PI * (s3 + t.sin() * t.sin() * t.cos() / 3.0);
        let v = sector_volume(t, 3).unwrap();
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn delta0_moderate_regime_bisection_vs_grid_scan() {
        // A synthetic representable delta_1 exercises the bisection
        // branch; a 1e5-point grid scan is the independent inversion.
        let d1 = LogValue::from_linear(1e-3);
        let d0 = delta0_from_delta1(3, d1).unwrap();
        assert!(d0.delta0.linear > 0.0);
        let target = 1e-3 * unit_ball_volume(3);
        let scan = |f: &dyn Fn(f64) -> f64| -> f64 {
            let n = 100_000;
            let mut prev = 0.0f64;
            for k in 1..=n {
                let x = std::f64::consts::FRAC_PI_2 * k as f64 / n as f64;
                if f(x) >= target {
                    let (mut a, mut b) = (prev, x);
                    for _ in 0..60 {
                        let mid = 0.5 * (a + b);
                        if f(mid) < target {
                            a = mid;
                        } else {
                            b = mid;
                        }
                    }
                    return 0.5 * (a + b);
                }
                prev = x;
            }
            panic!("target not reached");
        };
        let theta_small_scan = scan(&|th| sector_volume(th, 3).unwrap());
        let flat_scan = scan(&|s| {
            halfspace_gap_volume(std::f64::consts::FRAC_PI_2 - s, 3).unwrap()
        });
        assert!((d0.theta_small.linear - theta_small_scan).abs() < 1e-8);
        assert!((d0.flat_margin.linear - flat_scan).abs() < 1e-8);
        assert!((d0.delta0.linear - theta_small_scan.min(flat_scan)).abs() < 1e-8);
    }

    #[test]
    fn delta0_log_regime_matches_asymptotic_oracle() {
        // (n=3, ratio=30, C_S=1): delta_1 is around 1e-1e10, so both the
        // implementation and the oracle live purely in log10. Agreement
        // is relative in log-space; comparing absolutely is meaningless
        // when f64 resolves |log10| ~ 1e10 only to ~1e-6.
        let d0 = delta0(3, 30.0, 1.0).unwrap();
        let d1 = delta1(3, 30.0, 1.0).unwrap();
        assert!(d1.underflowed() && d0.delta0.linear == 0.0);
        let omega3 = unit_ball_volume(3);
        let omega2 = unit_ball_volume(2);
        let log10_target = d1.log10 + omega3.log10();
        // Grid scan over candidate log10(s) of the linearized flat-gap
        // volume; the flat branch dominates (smaller margin) for n = 3.
        let mut best = (f64::INFINITY, 0.0f64);
        let center = log10_target + (3.0 / (2.0 * omega2)).log10();
        let m = 200_001;
        for k in 0..m {
            let ls = center - 1.0 + 2.0 * k as f64 / (m - 1) as f64;
            let lv = ls + (omega2 * 2.0 / 3.0).log10();
            let miss = (lv - log10_target).abs();
            if miss < best.0 {
                best = (miss, ls);
            }
        }
        let oracle = best.1;
        assert!(
            (d0.flat_margin.log10 - oracle).abs() <= 1e-8 * oracle.abs(),
            "flat margin log10 {} vs oracle {}",
            d0.flat_margin.log10,
            oracle
        );
        assert!(d0.delta0.log10 == d0.flat_margin.log10.min(d0.theta_small.log10));
    }

    #[test]
    fn delta0_positive_and_monotone() {
        let mut last = f64::INFINITY;
        for &ratio in &[2.0, 17.59, 30.0, 100.0] {
            let d0 = delta0(3, ratio, 1.0).unwrap();
            assert!(d0.delta0.log10.is_finite());
            assert!(d0.delta0.log10 <= last, "delta0 must not increase with ratio");
            last = d0.delta0.log10;
        }
        // Strict positivity whenever delta_1 > 0, in the representable regime.
        let d0 = delta0_from_delta1(3, LogValue::from_linear(1e-9)).unwrap();
        assert!(d0.delta0.linear > 0.0);
    }

    #[test]
    fn eps0_values_and_limits() {
        // The exponent is n/(1 - 1/p) = 33 exactly; the f64 representation
        // of p = 1.1 limits agreement to ~1e-13 relative.
        let e = eps0(3, 0.5, 1.1).unwrap();
        assert!((e.linear - 2f64.powi(-33)).abs() < 1e-12 * e.linear);
        // tau -> 1 gives eps0 -> 1.
        let near_one = eps0(3, 1.0 - 1e-12, 1.1).unwrap();
        assert!((near_one.linear - 1.0).abs() < 1e-9);
        // p -> 1+ collapses eps0 to 0 (log10 -> -inf scale).
        let tiny_p = eps0(3, 0.5, 1.0 + 1e-9).unwrap();
        assert!(tiny_p.log10 < -1e8);
    }

    #[test]
    fn ledger_dimensional_sweep() {
        for n in 2..=10 {
            let ledger = ConstantsLedger::compute(n, 17.59, 1.0).unwrap();
            assert!(ledger.c_cacc.is_finite() && ledger.c_cacc > 0.0);
            assert!(ledger.c1_gehring.is_finite() && ledger.c1_gehring > 0.0);
            assert!(ledger.p_minus_1 > 0.0 && ledger.p >= 1.0);
            assert!(ledger.c_gehring.is_finite() && ledger.c_gehring > 0.0);
            assert!(ledger.theta_i_f64 > 0.0 && ledger.theta_i_f64 < 1.0);
            assert!(ledger.theta_iii > 0.0 && ledger.theta_iii <= ledger.theta_i_f64);
            assert!(ledger.chi.log10.is_finite());
            assert!(ledger.delta1.log10.is_finite() && ledger.delta1.log10 < 0.0);
            assert!(ledger.lambda0_f64 > 1.0);
            assert!(ledger.delta0.log10.is_finite());
            assert!(ledger.omega_n > 0.0);
            for (_, e) in &ledger.eps0 {
                assert!(e.log10.is_finite() && e.log10 < 0.0);
            }
        }
    }

    #[test]
    fn ledger_exact_rational_subsystem() {
        let ledger = ConstantsLedger::compute(3, 30.0, 1.0).unwrap();
        assert_eq!(ledger.m, BigRational::new(BigInt::from(3), BigInt::from(5)));
        assert_eq!(ledger.theta_i, BigRational::new(BigInt::from(1), BigInt::from(24)));
        assert_eq!(ledger.lambda0, BigRational::new(BigInt::from(31), BigInt::from(23)));
        assert!((ledger.m_f64 - 0.6).abs() < 1e-15);
        assert!((ledger.theta_i_f64 - 1.0 / 24.0).abs() < 1e-15);
        assert!((ledger.lambda0_f64 - 31.0 / 23.0).abs() < 1e-15);
    }

    #[test]
    fn ledger_gehring_constant_same_code_path() {
        let ledger = ConstantsLedger::compute(4, 9.0, 1.0).unwrap();
        // Bit-for-bit: the ledger field is produced by the same function.
        assert_eq!(ledger.c_gehring, gehring_constant(4, ledger.p).unwrap());
        assert_eq!(
            ledger.log10_c_gehring,
            log10_gehring_constant(4, ledger.p).unwrap()
        );
    }

    #[test]
    fn domain_errors() {
        assert!(caccioppoli_constant(1, 2.0, 1.0).is_err());
        assert!(caccioppoli_constant(3, 0.5, 1.0).is_err());
        assert!(caccioppoli_constant(3, 2.0, 0.0).is_err());
        assert!(gehring_constant(3, 0.5).is_err());
        assert!(sector_volume(2.0, 3).is_err());
        assert!(sector_volume(-0.1, 3).is_err());
        assert!(eps0(3, 1.5, 1.1).is_err());
        assert!(eps0(3, 0.5, 1.0).is_err());
        assert!(ConstantsLedger::compute(3, 1.0, 1.0).is_err());
    }
}
