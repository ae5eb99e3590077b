//! Interface diagnostics of converged states: excess (flatness),
//! rescaled Dirichlet integral, perimeter/energy densities, the weak
//! first-variation inequality, and the volume multiplier bracket.

use super::perimeter::{interface_segments, Segment};
use super::{pde_energy_in_ball, InterfaceState, MinimizerError};

/// Smooth compactly supported vector field with an analytic Jacobian;
/// the first-variation check integrates both.
pub struct VectorField {
    pub eval: Box<dyn Fn(f64, f64) -> (f64, f64)>,
    /// Row-major Jacobian `[[dX1/dx, dX1/dy], [dX2/dx, dX2/dy]]`.
    pub grad: Box<dyn Fn(f64, f64) -> [[f64; 2]; 2]>,
}

impl VectorField {
    /// Compactly supported bump `(1 - |x-c|^2/w^2)_+^4` at `c` pointing
    /// along `dir`; identically zero outside radius `w`.
    pub fn bump(c: (f64, f64), w: f64, dir: (f64, f64)) -> Self {
        let profile = move |x: f64, y: f64| {
            let s = ((x - c.0) * (x - c.0) + (y - c.1) * (y - c.1)) / (w * w);
            if s >= 1.0 {
                0.0
            } else {
                (1.0 - s).powi(4)
            }
        };
        let eval = move |x: f64, y: f64| {
            let p = profile(x, y);
            (dir.0 * p, dir.1 * p)
        };
        let grad = move |x: f64, y: f64| {
            let s = ((x - c.0) * (x - c.0) + (y - c.1) * (y - c.1)) / (w * w);
            if s >= 1.0 {
                return [[0.0, 0.0], [0.0, 0.0]];
            }
            let dp = -4.0 * (1.0 - s).powi(3) / (w * w);
            let px = dp * 2.0 * (x - c.0);
            let py = dp * 2.0 * (y - c.1);
            [[dir.0 * px, dir.0 * py], [dir.1 * px, dir.1 * py]]
        };
        Self { eval: Box::new(eval), grad: Box::new(grad) }
    }

    pub fn negated(&self) -> VectorFieldRef<'_> {
        VectorFieldRef { inner: self, sign: -1.0 }
    }
}

/// Sign-flipped view of a field.
pub struct VectorFieldRef<'a> {
    inner: &'a VectorField,
    sign: f64,
}

impl VectorFieldRef<'_> {
    fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        let (a, b) = (self.inner.eval)(x, y);
        (self.sign * a, self.sign * b)
    }

    fn grad(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let g = (self.inner.grad)(x, y);
        [
            [self.sign * g[0][0], self.sign * g[0][1]],
            [self.sign * g[1][0], self.sign * g[1][1]],
        ]
    }
}

fn segments_in_ball(state: &InterfaceState, x: (f64, f64), r: f64) -> Vec<Segment> {
    interface_segments(&state.domain, &state.phase)
        .into_iter()
        .filter(|s| {
            let (dx, dy) = (s.mid.0 - x.0, s.mid.1 - x.1);
            dx * dx + dy * dy <= r * r
        })
        .collect()
}

fn require_ball_inside(state: &InterfaceState, x: (f64, f64), r: f64) -> Result<(), MinimizerError> {
    let half = 0.5 * state.domain.n as f64 * state.domain.h;
    if x.0.abs() + r > half + 1e-12 || x.1.abs() + r > half + 1e-12 {
        return Err(MinimizerError::Domain(format!(
            "ball B_{r}({}, {}) leaves the unit square",
            x.0, x.1
        )));
    }
    Ok(())
}

fn require_on_interface(state: &InterfaceState, x: (f64, f64)) -> Result<(), MinimizerError> {
    let h = state.domain.h;
    let near = interface_segments(&state.domain, &state.phase).iter().any(|s| {
        let (dx, dy) = (s.mid.0 - x.0, s.mid.1 - x.1);
        dx * dx + dy * dy <= 2.0 * h * h
    })
;
    if !near {
        return Err(MinimizerError::Domain(format!(
            "({}, {}) is not on the discrete interface",
            x.0, x.1
        )));
    }
    Ok(())
}

/// Flatness excess at `(x, r)`: length-weighted squared deviation of
/// segment normals from their optimal common direction, scaled by `2r`
/// (the n = 2 normalization). The minimizing direction of the quadratic
/// form is the normalized length-weighted mean normal.
pub fn excess(state: &InterfaceState, x: (f64, f64), r: f64) -> Result<f64, MinimizerError> {
    require_ball_inside(state, x, r)?;
    require_on_interface(state, x)?;
    let segs = segments_in_ball(state, x, r);
    let total: f64 = segs.iter().map(|s| s.len).sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let mean = segs.iter().fold((0.0, 0.0), |acc, s| {
        (acc.0 + s.len * s.normal.0, acc.1 + s.len * s.normal.1)
    });
    let norm = (mean.0 * mean.0 + mean.1 * mean.1).sqrt();
    if norm == 0.0 {
        // Normals cancel completely; the excess against any direction is
        // maximal; report the worst case.
        return Ok(2.0);
    }
    let nu = (mean.0 / norm, mean.1 / norm);
    let acc: f64 = segs
        .iter()
        .map(|s| {
            let dx = s.normal.0 - nu.0;
            let dy = s.normal.1 - nu.1;
            s.len * (dx * dx + dy * dy)
        })
        .sum();
    Ok(acc / (2.0 * r))
}

/// Rescaled Dirichlet integral `r^-(n-1) int_{B_r} |Du|^2` with n = 2.
pub fn rescaled_dirichlet(
    state: &InterfaceState,
    x: (f64, f64),
    r: f64,
) -> Result<f64, MinimizerError> {
    require_ball_inside(state, x, r)?;
    Ok(pde_energy_in_ball(state, x, r, false)? / r)
}

/// Density survey over every interface point and admissible radius.
#[derive(Debug, Clone)]
pub struct DensityReport {
    /// (point, radius, perimeter density, energy density) samples.
    pub samples: Vec<((f64, f64), f64, f64, f64)>,
    pub min_perimeter_density: f64,
    pub max_energy_density: f64,
    pub median_energy_density: f64,
}

/// Perimeter density `P(E, B_r(x))/r` and energy density
/// `(gamma P + int sigma |Du|^2)/r` at every interface midpoint and
/// ladder radius whose ball stays inside the square.
pub fn density_report(state: &InterfaceState, radii: &[f64]) -> Result<DensityReport, MinimizerError> {
    let segs = interface_segments(&state.domain, &state.phase);
    if segs.is_empty() {
        return Err(MinimizerError::Domain("no interface to survey".into()));
    }
    let mut samples = Vec::new();
    let mut min_p = f64::INFINITY;
    let mut energy_densities = Vec::new();
    for seg in &segs {
        for &r in radii {
            if require_ball_inside(state, seg.mid, r).is_err() {
                continue;
            }
            let per: f64 = segments_in_ball(state, seg.mid, r).iter().map(|s| s.len).sum();
            let dirichlet = pde_energy_in_ball(state, seg.mid, r, true)?;
            let p_density = per / r;
            let e_density = (state.problem.gamma * per + dirichlet) / r;
            min_p = min_p.min(p_density);
            energy_densities.push(e_density);
            samples.push((seg.mid, r, p_density, e_density));
        }
    }
    if samples.is_empty() {
        return Err(MinimizerError::Domain(
            "no (point, radius) pair fits inside the domain".into(),
        ));
    }
    let mut sorted = energy_densities.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite densities"));
    let median = sorted[sorted.len() / 2];
    let max_e = sorted[sorted.len() - 1];
    Ok(DensityReport {
        samples,
        min_perimeter_density: min_p,
        max_energy_density: max_e,
        median_energy_density: median,
    })
}

/// One first-variation evaluation.
#[derive(Debug, Clone, Copy)]
pub struct FirstVariationCheck {
    /// `gamma int div_tau X dH + int sigma (|Du|^2 div X - 2 <DX Du, Du>)`.
    pub lhs: f64,
    /// `Lambda int |X| dH`.
    pub rhs: f64,
    /// Tolerance `K h` the inequality is tested with.
    pub tolerance: f64,
    pub holds: bool,
}

/// Evaluates the weak first-variation inequality `lhs <= rhs + K h` for
/// a compactly supported field. `k_factor` is the recorded empirical
/// constant (the acceptance suite uses 4).
pub fn first_variation_check(
    state: &InterfaceState,
    field: &VectorField,
    k_factor: f64,
) -> Result<FirstVariationCheck, MinimizerError> {
    check_support(state, field)?;
    let vf = VectorFieldRef { inner: field, sign: 1.0 };
    let lhs = first_variation_lhs(state, &vf)?;
    let rhs = first_variation_rhs(state, &vf);
    let tolerance = k_factor * state.domain.h;
    Ok(FirstVariationCheck { lhs, rhs, tolerance, holds: lhs <= rhs + tolerance })
}

/// The same check with the field negated; minimality bounds both signs.
pub fn first_variation_check_negated(
    state: &InterfaceState,
    field: &VectorField,
    k_factor: f64,
) -> Result<FirstVariationCheck, MinimizerError> {
    check_support(state, field)?;
    let vf = field.negated();
    let lhs = first_variation_lhs(state, &vf)?;
    let rhs = first_variation_rhs(state, &vf);
    let tolerance = k_factor * state.domain.h;
    Ok(FirstVariationCheck { lhs, rhs, tolerance, holds: lhs <= rhs + tolerance })
}

fn check_support(state: &InterfaceState, field: &VectorField) -> Result<(), MinimizerError> {
    let n = state.problem.grid;
    let h = state.domain.h;
    let margin = 2.0 * h;
    let half = 0.5;
    // Scan nodes in the margin band.
    let mut worst = 0.0f64;
    for k in 0..=n {
        let t = -half + k as f64 * h;
        for &(x, y) in &[
            (t, -half),
            (t, -half + margin),
            (t, half),
            (t, half - margin),
            (-half, t),
            (-half + margin, t),
            (half, t),
            (half - margin, t),
        ] {
            let (vx, vy) = (field.eval)(x, y);
            worst = worst.max(vx.abs().max(vy.abs()));
        }
    }
    if worst > 1e-9 {
        return Err(MinimizerError::Support(format!(
            "|X| = {worst:e} inside the 2-cell boundary margin"
        )));
    }
    Ok(())
}

fn first_variation_lhs(
    state: &InterfaceState,
    field: &VectorFieldRef<'_>,
) -> Result<f64, MinimizerError> {
    let gamma = state.problem.gamma;
    // Interface term: tangential divergence tau^T DX tau per segment.
    let mut interface_term = 0.0;
    for seg in interface_segments(&state.domain, &state.phase) {
        let tau = ((seg.b.0 - seg.a.0) / seg.len, (seg.b.1 - seg.a.1) / seg.len);
        let g = field.grad(seg.mid.0, seg.mid.1);
        let div_tau = tau.0 * (g[0][0] * tau.0 + g[0][1] * tau.1)
            + tau.1 * (g[1][0] * tau.0 + g[1][1] * tau.1);
        interface_term += div_tau * seg.len;
    }
    // Bulk term over cells: sigma (|Du|^2 div X - 2 <DX Du, Du>).
    let n = state.problem.grid;
    let h = state.domain.h;
    let grid = &state.u.grid;
    let mut bulk = 0.0;
    for iy in 0..n {
        for ix in 0..n {
            let u00 = state.u.values[grid.node_index(ix, iy)];
            let u10 = state.u.values[grid.node_index(ix + 1, iy)];
            let u01 = state.u.values[grid.node_index(ix, iy + 1)];
            let u11 = state.u.values[grid.node_index(ix + 1, iy + 1)];
            let ux = (u10 - u00 + u11 - u01) / (2.0 * h);
            let uy = (u01 - u00 + u11 - u10) / (2.0 * h);
            let cx = -0.5 + (ix as f64 + 0.5) * h;
            let cy = -0.5 + (iy as f64 + 0.5) * h;
            let g = field.grad(cx, cy);
            let div = g[0][0] + g[1][1];
            let grad_sq = ux * ux + uy * uy;
            let dxu = (g[0][0] * ux + g[0][1] * uy, g[1][0] * ux + g[1][1] * uy);
            let inner = dxu.0 * ux + dxu.1 * uy;
            let sigma = if state.phase[iy * n + ix] {
                state.problem.beta
            } else {
                state.problem.alpha
            };
            bulk += sigma * (grad_sq * div - 2.0 * inner) * h * h;
        }
    }
    Ok(gamma * interface_term + bulk)
}

fn first_variation_rhs(state: &InterfaceState, field: &VectorFieldRef<'_>) -> f64 {
    let lambda = state.problem.lambda;
    interface_segments(&state.domain, &state.phase)
        .iter()
        .map(|seg| {
            let (vx, vy) = field.eval(seg.mid.0, seg.mid.1);
            (vx * vx + vy * vy).sqrt() * seg.len
        })
        .sum::<f64>()
        * lambda
}

/// Volume multiplier bracket from discrete normal translations of the
/// whole interface: one cell row up (E grows) and one down (E shrinks),
/// each with a re-solve. With the sign convention of the Euler-Lagrange
/// right side (`lambda = gamma H + beta |Du_b|^2 - alpha |Du_a|^2`),
/// `lambda = -dF/d|E|` along these translations, and convexity of the
/// energy in the interface position brackets it between the two
/// one-sided quotients.
#[derive(Debug, Clone, Copy)]
pub struct MultiplierBracket {
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    pub width: f64,
}

/// Multiplier bracket from the linearized variation: with a normal
/// translation bump `X`, the quotient `-lhs(X) / int X.nu` estimates
/// the Euler-Lagrange multiplier to `O(h)`; both orientations are
/// evaluated (they must agree to rounding, and the weak inequality is
/// checked for each) and the bracket is the estimate widened by the
/// recorded discretization constant `k_rec * h`.
pub fn multiplier_bracket_variational(
    state: &InterfaceState,
    field: &VectorField,
    k_rec: f64,
) -> Result<MultiplierBracket, MinimizerError> {
    let plus = first_variation_check(state, field, k_rec)?;
    let minus = first_variation_check_negated(state, field, k_rec)?;
    if !plus.holds || !minus.holds {
        return Err(MinimizerError::Domain(
            "weak inequality fails for the probe field; state is not minimal".into(),
        ));
    }
    let b: f64 = interface_segments(&state.domain, &state.phase)
        .iter()
        .map(|s| {
            let (vx, vy) = (field.eval)(s.mid.0, s.mid.1);
            (vx * s.normal.0 + vy * s.normal.1) * s.len
        })
        .sum();
    if b.abs() < 1e-12 {
        return Err(MinimizerError::Domain(
            "probe field has no normal mass on the interface".into(),
        ));
    }
    let lambda_plus = -plus.lhs / b;
    let lambda_minus = minus.lhs / b;
    if (lambda_plus - lambda_minus).abs() > 1e-9 * lambda_plus.abs().max(1.0) {
        return Err(MinimizerError::Domain(format!(
            "orientation estimates disagree: {lambda_plus} vs {lambda_minus}"
        )));
    }
    let half_width = k_rec * state.domain.h;
    Ok(MultiplierBracket {
        lower: lambda_plus - half_width,
        upper: lambda_plus + half_width,
        estimate: lambda_plus,
        width: 2.0 * half_width,
    })
}

pub fn multiplier_bracket(
    state: &InterfaceState,
    solve_tol: f64,
) -> Result<MultiplierBracket, MinimizerError> {
    let n = state.problem.grid;
    // Unpenalized interface energy F = gamma P + Dirichlet.
    let base = state.problem.gamma * state.perimeter() + state.dirichlet();

    // The probe translates the interface by one cell along +x / -x
    // (uniform normal motion for a vertical-cut-like interface, the
    // geometry of the reference scenario and of the exact flat critical
    // configuration).
    let shift = |grow: bool| -> Result<(f64, f64), MinimizerError> {
        let mut trial = state.clone();
        let mut flipped = 0i64;
        for iy in 0..n {
            let mut rightmost: Option<usize> = None;
            for ix in 0..n {
                if trial.phase[iy * n + ix] {
                    rightmost = Some(ix);
                }
            }
            if let Some(edge) = rightmost {
                if grow {
                    if edge + 1 < n && !trial.phase[iy * n + edge + 1] {
                        trial.phase[iy * n + edge + 1] = true;
                        flipped += 1;
                    }
                } else {
                    trial.phase[iy * n + edge] = false;
                    flipped -= 1;
                }
            }
        }
        if flipped == 0 {
            return Err(MinimizerError::Domain(
                "interface translation produced no volume change".into(),
            ));
        }
        trial.audit(solve_tol)?;
        let f = trial.problem.gamma * trial.perimeter() + trial.dirichlet();
        let dvol = flipped as f64 * state.domain.h * state.domain.h;
        Ok((f, dvol))
    };

    let (f_up, dv_up) = shift(true)?;
    let (f_dn, dv_dn) = shift(false)?;
    // lambda = -dF/dVol; one-sided difference quotients bracket it.
    let q_up = -(f_up - base) / dv_up;
    let q_dn = -(f_dn - base) / dv_dn;
    let (lower, upper) = if q_up <= q_dn { (q_up, q_dn) } else { (q_dn, q_up) };
    Ok(MultiplierBracket {
        lower,
        upper,
        estimate: 0.5 * (lower + upper),
        width: upper - lower,
    })
}
