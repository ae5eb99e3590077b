//! Ball-energy diagnostics verifying the decay, monotonicity, higher
//! integrability, and cone lower-bound estimates on discrete fields.
//!
//! Balls are measured with cut-cell weights: cells fully inside count
//! fully, boundary cells by a 4x4 midpoint subsample. Ball averages are
//! formed as (weighted sum) / (measured volume) with the same weights,
//! so the cut-cell error cancels to first order in the ratio.
//!
//! On the axisymmetric shell, ball centers live on the cone axis
//! (`center = (z0, 0)`); the vertex ball is `z0 = 0`.

use super::grid::{AxisymGrid, GridShape, PhaseLayout, ScalarField};
use super::PdeError;
use crate::constants::ConstantsLedger;

const SUBSAMPLE: usize = 4;

/// Per-cell data: center coordinates, gradient-squared, cell volume,
/// conductivity, and whether the cell lies in the `beta` phase.
struct CellIter<'a> {
    field: &'a ScalarField,
}

struct Cell {
    i: usize,
    j: usize,
    grad_sq: f64,
    sigma: f64,
}

impl<'a> CellIter<'a> {
    fn new(field: &'a ScalarField) -> Self {
        Self { field }
    }

    fn cells(&self) -> Vec<Cell> {
        let grid = &self.field.grid;
        let (np, ns) = grid.node_counts();
        let mut out = Vec::with_capacity((np - 1) * (ns - 1));
        for i in 0..np - 1 {
            for j in 0..ns - 1 {
                let u00 = self.field.value(i, j);
                let u01 = self.field.value(i, j + 1);
                let u10 = self.field.value(i + 1, j);
                let u11 = self.field.value(i + 1, j + 1);
                let dp = grid.nodes_primary[i + 1] - grid.nodes_primary[i];
                let ds = grid.nodes_secondary[j + 1] - grid.nodes_secondary[j];
                let du_p = (u10 - u00 + u11 - u01) / (2.0 * dp);
                let du_s = (u01 - u00 + u11 - u10) / (2.0 * ds);
                let grad_sq = match grid.shape {
                    GridShape::HalfSpace2d { .. } => du_p * du_p + du_s * du_s,
                    GridShape::ConeAxisym3d { .. } => {
                        let rho_c = 0.5 * (grid.nodes_primary[i] + grid.nodes_primary[i + 1]);
                        du_p * du_p + (du_s / rho_c) * (du_s / rho_c)
                    }
                };
                out.push(Cell { i, j, grad_sq, sigma: grid.sigma_at(&self.field.sigma, i, j) });
            }
        }
        out
    }
}

/// Fraction of the cell volume inside the ball, and the cell volume.
/// Full/empty cells are classified by corner tests; straddling cells by
/// the midpoint subsample.
fn ball_weight(grid: &AxisymGrid, i: usize, j: usize, center: (f64, f64), rho: f64) -> (f64, f64) {
    let p0 = grid.nodes_primary[i];
    let p1 = grid.nodes_primary[i + 1];
    let s0 = grid.nodes_secondary[j];
    let s1 = grid.nodes_secondary[j + 1];
    match grid.shape {
        GridShape::HalfSpace2d { .. } => {
            let vol = (p1 - p0) * (s1 - s0);
            let d2 = |x: f64, y: f64| {
                let (dx, dy) = (x - center.0, y - center.1);
                dx * dx + dy * dy
            };
            let r2 = rho * rho;
            let corners = [d2(p0, s0), d2(p1, s0), d2(p0, s1), d2(p1, s1)];
            let inside = corners.iter().filter(|&&d| d <= r2).count();
            if inside == 4 {
                return (1.0, vol);
            }
            // A cell can straddle the circle with all corners outside only
            // if it is larger than the ball; grids here are much finer.
            if inside == 0 && corners.iter().all(|&d| d > r2) && d2(0.5 * (p0 + p1), 0.5 * (s0 + s1)) > r2 {
                return (0.0, vol);
            }
            let mut hits = 0usize;
            for a in 0..SUBSAMPLE {
                for b in 0..SUBSAMPLE {
                    let x = p0 + (p1 - p0) * (a as f64 + 0.5) / SUBSAMPLE as f64;
                    let y = s0 + (s1 - s0) * (b as f64 + 0.5) / SUBSAMPLE as f64;
                    if d2(x, y) <= r2 {
                        hits += 1;
                    }
                }
            }
            (hits as f64 / (SUBSAMPLE * SUBSAMPLE) as f64, vol)
        }
        GridShape::ConeAxisym3d { .. } => {
            // Axis-centered ball: |x - z0 e|^2 = rho^2 + z0^2 - 2 rho z0 cos(theta).
            let z0 = center.0;
            let r2 = rho * rho;
            let d2 = |r: f64, t: f64| r * r + z0 * z0 - 2.0 * r * z0 * t.cos();
            let two_pi = 2.0 * std::f64::consts::PI;
            let vol = two_pi * (p1.powi(3) - p0.powi(3)) / 3.0 * (s0.cos() - s1.cos());
            let corners = [d2(p0, s0), d2(p1, s0), d2(p0, s1), d2(p1, s1)];
            let inside = corners.iter().filter(|&&d| d <= r2).count();
            if inside == 4 {
                return (1.0, vol);
            }
            if inside == 0 {
                return (0.0, vol);
            }
            // Subsample with the exact metric per subcell.
            let mut acc = 0.0;
            for a in 0..SUBSAMPLE {
                for b in 0..SUBSAMPLE {
                    let ra0 = p0 + (p1 - p0) * a as f64 / SUBSAMPLE as f64;
                    let ra1 = p0 + (p1 - p0) * (a as f64 + 1.0) / SUBSAMPLE as f64;
                    let ta0 = s0 + (s1 - s0) * b as f64 / SUBSAMPLE as f64;
                    let ta1 = s0 + (s1 - s0) * (b as f64 + 1.0) / SUBSAMPLE as f64;
                    if d2(0.5 * (ra0 + ra1), 0.5 * (ta0 + ta1)) <= r2 {
                        acc += two_pi * (ra1.powi(3) - ra0.powi(3)) / 3.0 * (ta0.cos() - ta1.cos());
                    }
                }
            }
            (acc / vol, vol)
        }
    }
}

fn check_ball_in_domain(grid: &AxisymGrid, center: (f64, f64), rho: f64) -> Result<(), PdeError> {
    match grid.shape {
        GridShape::HalfSpace2d { radius, .. } => {
            if center.0.abs() + rho > radius + 1e-12 || center.1.abs() + rho > radius + 1e-12 {
                return Err(PdeError::Domain(format!(
                    "ball B_{rho}({}, {}) leaves the square of radius {radius}",
                    center.0, center.1
                )));
            }
        }
        GridShape::ConeAxisym3d { radius, .. } => {
            if center.1 != 0.0 {
                return Err(PdeError::Domain(
                    "shell balls must be centered on the axis: center = (z0, 0)".into(),
                ));
            }
            if center.0.abs() + rho > radius + 1e-12 {
                return Err(PdeError::Domain(format!(
                    "ball B_{rho}(z0 = {}) leaves the shell of radius {radius}",
                    center.0
                )));
            }
        }
    }
    Ok(())
}

/// `int_{B_rho(center)} (sigma) |Du|^2` by midpoint quadrature with
/// cut-cell weights.
pub fn dirichlet_energy(
    field: &ScalarField,
    center: (f64, f64),
    rho: f64,
    weighted: bool,
) -> Result<f64, PdeError> {
    let (num, _den) = ball_moments(field, center, rho, weighted)?;
    Ok(num)
}

/// Weighted integral and measured ball volume with the same weights.
fn ball_moments(
    field: &ScalarField,
    center: (f64, f64),
    rho: f64,
    weighted: bool,
) -> Result<(f64, f64), PdeError> {
    if !(rho > 0.0) {
        return Err(PdeError::Domain(format!("rho = {rho} must be > 0")));
    }
    check_ball_in_domain(&field.grid, center, rho)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for cell in CellIter::new(field).cells() {
        let (w, vol) = ball_weight(&field.grid, cell.i, cell.j, center, rho);
        if w > 0.0 {
            let weight = if weighted { cell.sigma } else { 1.0 };
            num += w * vol * weight * cell.grad_sq;
            den += w * vol;
        }
    }
    Ok((num, den))
}

/// Ball average of `sigma |Du|^2`: integral over measured volume, so
/// cut-cell errors cancel to first order.
pub fn ball_average(field: &ScalarField, center: (f64, f64), rho: f64) -> Result<f64, PdeError> {
    let (num, den) = ball_moments(field, center, rho, true)?;
    if den == 0.0 {
        return Err(PdeError::Degenerate("empty ball".into()));
    }
    Ok(num / den)
}

/// Monotonicity report for the half-space configuration: the sequence
/// of ball averages of `sigma |Du|^2` must be non-decreasing up to the
/// discretization tolerance `10 h^2` (relative).
#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub radii: Vec<f64>,
    pub averages: Vec<f64>,
    /// Relative tolerance used, `10 h^2`.
    pub tolerance: f64,
    /// Indices k where `avg[k+1]` dropped below `avg[k]` beyond tolerance.
    pub violations: Vec<usize>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_monotonicity(
    field: &ScalarField,
    center: (f64, f64),
    radii: &[f64],
) -> Result<MonotonicityReport, PdeError> {
    match (&field.grid.shape, &field.grid.layout) {
        (GridShape::HalfSpace2d { .. }, PhaseLayout::HalfSpaceBelow { offset }) => {
            if (center.1 - offset).abs() > 1e-12 {
                return Err(PdeError::Config(format!(
                    "center y = {} is off the interface y = {offset}",
                    center.1
                )));
            }
        }
        _ => {
            return Err(PdeError::Config(
                "monotonicity requires the half-space configuration".into(),
            ));
        }
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PdeError::Config("radii must be strictly increasing".into()));
    }
    let mut averages = Vec::with_capacity(radii.len());
    for &r in radii {
        averages.push(ball_average(field, center, r)?);
    }
    let h = field.grid.h();
    let tolerance = 10.0 * h * h;
    let mut violations = Vec::new();
    for k in 0..averages.len() - 1 {
        let scale = averages[k].abs().max(averages[k + 1].abs()).max(1e-300);
        if averages[k + 1] - averages[k] < -tolerance * scale {
            violations.push(k);
        }
    }
    Ok(MonotonicityReport { radii: radii.to_vec(), averages, tolerance, violations })
}

/// Log-log fit of ball energy against radius.
#[derive(Debug, Clone)]
pub struct DecayFit {
    pub radii: Vec<f64>,
    pub energies: Vec<f64>,
    pub fitted_exponent: f64,
    /// Max absolute deviation of `ln E` from the fitted line.
    pub fit_residual: f64,
}

pub fn decay_fit(field: &ScalarField, center: (f64, f64), radii: &[f64]) -> Result<DecayFit, PdeError> {
    if radii.len() < 5 {
        return Err(PdeError::Config(format!(
            "need at least 5 radii for a decay fit, got {}",
            radii.len()
        )));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PdeError::Config("radii must be strictly increasing".into()));
    }
    let mut energies = Vec::with_capacity(radii.len());
    for &r in radii {
        energies.push(dirichlet_energy(field, center, r, false)?);
    }
    if energies.iter().all(|&e| e < 1e-14) {
        return Err(PdeError::Degenerate(
            "all ball energies below 1e-14; nothing to fit".into(),
        ));
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = energies.iter().map(|e| e.max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let fit_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0f64, f64::max);
    Ok(DecayFit { radii: radii.to_vec(), energies, fitted_exponent: slope, fit_residual })
}

/// Max interface flux mismatch `|alpha du_a/dnu - beta du_b/dnu|` from
/// one-sided second-order stencils. On the shell the inner fifth of the
/// radii is excluded: the separable solution's unbounded gradient at
/// the vertex makes pointwise stencils meaningless there.
pub fn flux_jump(field: &ScalarField) -> Result<f64, PdeError> {
    let grid = &field.grid;
    let j0 = grid.interface_line().ok_or_else(|| {
        PdeError::Config("flux jump needs an interface layout".into())
    })?;
    let (np, ns) = grid.node_counts();
    if j0 < 2 || j0 + 2 >= ns {
        return Err(PdeError::Config(
            "interface too close to the boundary for one-sided stencils".into(),
        ));
    }
    let (alpha, beta) = (field.alpha, field.beta);
    let mut worst = 0.0f64;
    match grid.shape {
        GridShape::HalfSpace2d { .. } => {
            let h_up = grid.nodes_secondary[j0 + 1] - grid.nodes_secondary[j0];
            let h_dn = grid.nodes_secondary[j0] - grid.nodes_secondary[j0 - 1];
            for i in 1..np - 1 {
                let u0 = field.value(i, j0);
                let d_plus =
                    (-3.0 * u0 + 4.0 * field.value(i, j0 + 1) - field.value(i, j0 + 2))
                        / (2.0 * h_up);
                let d_minus =
                    (3.0 * u0 - 4.0 * field.value(i, j0 - 1) + field.value(i, j0 - 2))
                        / (2.0 * h_dn);
                worst = worst.max((alpha * d_plus - beta * d_minus).abs());
            }
        }
        GridShape::ConeAxisym3d { radius, cap, .. } => {
            let h_out = grid.nodes_secondary[j0 + 1] - grid.nodes_secondary[j0];
            let h_in = grid.nodes_secondary[j0] - grid.nodes_secondary[j0 - 1];
            let rho_min = cap + 0.2 * (radius - cap);
            for i in 0..np {
                let rho = grid.nodes_primary[i];
                if rho < rho_min {
                    continue;
                }
                let u0 = field.value(i, j0);
                let d_out = (-3.0 * u0 + 4.0 * field.value(i, j0 + 1) - field.value(i, j0 + 2))
                    / (2.0 * h_out);
                let d_in = (3.0 * u0 - 4.0 * field.value(i, j0 - 1) + field.value(i, j0 - 2))
                    / (2.0 * h_in);
                worst = worst.max(((alpha * d_out - beta * d_in) / rho).abs());
            }
        }
    }
    Ok(worst)
}

/// One measured reverse-Holder ball.
#[derive(Debug, Clone)]
pub struct ReverseHolderEntry {
    pub center: (f64, f64),
    pub r: f64,
    /// Average of `|Du|^(2p)` over `B_r`.
    pub lhs: f64,
    /// Average of `|Du|^2` over `B_2r`, raised to `p`.
    pub rhs_pow: f64,
    /// `lhs / (C rhs_pow)`; soundness requires <= 1.
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct ReverseHolderReport {
    pub p: f64,
    pub c: f64,
    pub entries: Vec<ReverseHolderEntry>,
    pub max_ratio: f64,
    /// Smallest constant that would make every measured ball pass.
    pub smallest_empirical_c: f64,
}

/// Checks the higher-integrability inequality
/// `avg_{B_r} |Du|^(2p) <= C (avg_{B_2r} |Du|^2)^p` with the ledger's
/// `(p, C)` on the given balls.
pub fn reverse_holder_check(
    field: &ScalarField,
    ledger: &ConstantsLedger,
    balls: &[((f64, f64), f64)],
) -> Result<ReverseHolderReport, PdeError> {
    let p = ledger.p;
    let c = ledger.c_gehring;
    let mut entries = Vec::with_capacity(balls.len());
    let mut max_ratio = 0.0f64;
    let mut worst_c = 0.0f64;
    for &(center, r) in balls {
        let (num_small, den_small) = ball_moments_pow(field, center, r, 2.0 * p)?;
        let (num_big, den_big) = ball_moments_pow(field, center, 2.0 * r, 2.0)?;
        if den_small == 0.0 || den_big == 0.0 {
            return Err(PdeError::Degenerate("empty reverse-Holder ball".into()));
        }
        let lhs = num_small / den_small;
        let rhs_pow = (num_big / den_big).powf(p);
        let ratio = lhs / (c * rhs_pow);
        max_ratio = max_ratio.max(ratio);
        worst_c = worst_c.max(lhs / rhs_pow);
        entries.push(ReverseHolderEntry { center, r, lhs, rhs_pow, ratio });
    }
    Ok(ReverseHolderReport { p, c, entries, max_ratio, smallest_empirical_c: worst_c })
}

/// Ball moments of `|Du|^q` (unweighted by sigma).
fn ball_moments_pow(
    field: &ScalarField,
    center: (f64, f64),
    rho: f64,
    q: f64,
) -> Result<(f64, f64), PdeError> {
    if !(rho > 0.0) {
        return Err(PdeError::Domain(format!("rho = {rho} must be > 0")));
    }
    check_ball_in_domain(&field.grid, center, rho)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for cell in CellIter::new(field).cells() {
        let (w, vol) = ball_weight(&field.grid, cell.i, cell.j, center, rho);
        if w > 0.0 {
            num += w * vol * cell.grad_sq.powf(0.5 * q);
            den += w * vol;
        }
    }
    Ok((num, den))
}

/// Inside-phase energy scaling on the cone: fit of
/// `int_{E cap B_rho} |Du|^2` against `rho`, with the saturating
/// constant `c0 = min E_in(rho)/rho^(n-1)`.
#[derive(Debug, Clone)]
pub struct ConeLowerboundReport {
    pub radii: Vec<f64>,
    pub inside_energies: Vec<f64>,
    pub fitted_exponent: f64,
    pub c0: f64,
}

pub fn cone_energy_lowerbound_check(
    field: &ScalarField,
    radii: &[f64],
) -> Result<ConeLowerboundReport, PdeError> {
    match field.grid.layout {
        PhaseLayout::Cone { .. } => {}
        _ => {
            return Err(PdeError::Config(
                "cone lower bound needs a cone interface configuration".into(),
            ));
        }
    }
    if field.alpha == field.beta {
        return Err(PdeError::Config(
            "no phase contrast (alpha = beta): the lower bound hypothesis fails".into(),
        ));
    }
    if radii.len() < 5 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PdeError::Config("need >= 5 strictly increasing radii".into()));
    }
    let cells = CellIter::new(field).cells();
    let mut energies = Vec::with_capacity(radii.len());
    for &r in radii {
        check_ball_in_domain(&field.grid, (0.0, 0.0), r)?;
        let mut acc = 0.0;
        for cell in &cells {
            if cell.sigma == field.beta {
                let (w, vol) = ball_weight(&field.grid, cell.i, cell.j, (0.0, 0.0), r);
                acc += w * vol * cell.grad_sq;
            }
        }
        energies.push(acc);
    }
    if energies.iter().all(|&e| e < 1e-14) {
        return Err(PdeError::Degenerate("inside-phase energy vanished".into()));
    }
    let n_minus_1 = (field.grid.n_eff() - 1) as i32;
    let c0 = radii
        .iter()
        .zip(&energies)
        .map(|(r, e)| e / r.powi(n_minus_1))
        .fold(f64::INFINITY, f64::min);
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = energies.iter().map(|e| e.max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(ConeLowerboundReport {
        radii: radii.to_vec(),
        inside_energies: energies,
        fitted_exponent: sxy / sxx,
        c0,
    })
}
