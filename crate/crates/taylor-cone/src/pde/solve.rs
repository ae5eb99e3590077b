//! Link assembly and the conjugate-gradient solve.

use super::grid::{AxisymGrid, GridShape, ScalarField};
use super::PdeError;
use crate::cones::MaterialConfig;

/// One symmetric link of the discrete energy `sum T (u_a - u_b)^2`.
#[derive(Debug, Clone, Copy)]
pub(super) struct Link {
    pub a: u32,
    pub b: u32,
    pub t: f64,
}

/// Assembles the link list of the weak form for the given per-cell
/// conductivity.
pub(super) fn assemble_links(grid: &AxisymGrid, sigma: &[f64]) -> Vec<Link> {
    let (np, ns) = grid.node_counts();
    let mut links = Vec::with_capacity(2 * np * ns);
    match grid.shape {
        GridShape::HalfSpace2d { .. } => {
            let nx = np - 1;
            let ny = ns - 1;
            // Links along x: flanking cells share the y-band of the link row.
            for ix in 0..nx {
                for iy in 0..=ny {
                    let mut t = 0.0;
                    if iy > 0 {
                        t += 0.5 * grid.sigma_at(sigma, ix, iy - 1);
                    }
                    if iy < ny {
                        t += 0.5 * grid.sigma_at(sigma, ix, iy);
                    }
                    links.push(Link {
                        a: grid.node_index(ix, iy) as u32,
                        b: grid.node_index(ix + 1, iy) as u32,
                        t,
                    });
                }
            }
            // Links along y.
            for ix in 0..=nx {
                for iy in 0..ny {
                    let mut t = 0.0;
                    if ix > 0 {
                        t += 0.5 * grid.sigma_at(sigma, ix - 1, iy);
                    }
                    if ix < nx {
                        t += 0.5 * grid.sigma_at(sigma, ix, iy);
                    }
                    links.push(Link {
                        a: grid.node_index(ix, iy) as u32,
                        b: grid.node_index(ix, iy + 1) as u32,
                        t,
                    });
                }
            }
        }
        GridShape::ConeAxisym3d { .. } => {
            let rho = &grid.nodes_primary;
            let theta = &grid.nodes_secondary;
            let n_rho = np - 1;
            let n_theta = ns - 1;
            let two_pi = 2.0 * std::f64::consts::PI;
            // theta half-band edges around each node.
            let mid = |j: usize| 0.5 * (theta[j] + theta[j + 1]);
            // Radial links at each theta node; the flux face integrates
            // rho^2 over the radial cell and sin(theta) over the two
            // half-bands around the node.
            for i in 0..n_rho {
                let d_rho = rho[i + 1] - rho[i];
                let r2 = (rho[i + 1].powi(3) - rho[i].powi(3)) / 3.0;
                for j in 0..=n_theta {
                    let mut band = 0.0;
                    if j > 0 {
                        band += grid.sigma_at(sigma, i, j - 1)
                            * (mid(j - 1).cos() - theta[j].cos());
                    }
                    if j < n_theta {
                        band += grid.sigma_at(sigma, i, j) * (theta[j].cos() - mid(j).cos());
                    }
                    links.push(Link {
                        a: grid.node_index(i, j) as u32,
                        b: grid.node_index(i + 1, j) as u32,
                        t: two_pi * r2 * band / (d_rho * d_rho),
                    });
                }
            }
            // Angular links within each theta band, radial extent split
            // between the half-cells around each rho node.
            for j in 0..n_theta {
                let d_theta = theta[j + 1] - theta[j];
                let band = theta[j].cos() - theta[j + 1].cos();
                for i in 0..=n_rho {
                    let mut depth = 0.0;
                    if i > 0 {
                        depth += grid.sigma_at(sigma, i - 1, j) * 0.5 * (rho[i] - rho[i - 1]);
                    }
                    if i < n_rho {
                        depth += grid.sigma_at(sigma, i, j) * 0.5 * (rho[i + 1] - rho[i]);
                    }
                    links.push(Link {
                        a: grid.node_index(i, j) as u32,
                        b: grid.node_index(i, j + 1) as u32,
                        t: two_pi * band * depth / (d_theta * d_theta),
                    });
                }
            }
        }
    }
    links
}

/// True for nodes carrying Dirichlet data.
pub(super) fn is_dirichlet(grid: &AxisymGrid, i: usize, j: usize) -> bool {
    let (np, ns) = grid.node_counts();
    match grid.shape {
        GridShape::HalfSpace2d { .. } => i == 0 || i + 1 == np || j == 0 || j + 1 == ns,
        // Outer sphere only; cap and axis carry natural conditions.
        GridShape::ConeAxisym3d { .. } => i + 1 == np,
    }
}

/// Evaluates Dirichlet data on every boundary node of the grid,
/// leaving interior entries untouched.
fn fill_boundary(grid: &AxisymGrid, data: &dyn Fn(f64, f64) -> f64, values: &mut [f64]) {
    let (np, ns) = grid.node_counts();
    for i in 0..np {
        for j in 0..ns {
            if is_dirichlet(grid, i, j) {
                values[grid.node_index(i, j)] =
                    data(grid.nodes_primary[i], grid.nodes_secondary[j]);
            }
        }
    }
}

/// Solves the transmission problem with the layout's conductivity.
pub fn solve_transmission(
    grid: &AxisymGrid,
    cfg: &MaterialConfig,
    boundary: &dyn Fn(f64, f64) -> f64,
    tol: f64,
) -> Result<ScalarField, PdeError> {
    let sigma = grid.sigma_cells(cfg);
    solve_custom(grid, &sigma, cfg.alpha, cfg.beta, boundary, None, tol)
}

/// Solve with explicit per-cell conductivity (the minimizer feeds its
/// phase bitmap through this) and an optional warm start.
pub fn solve_custom(
    grid: &AxisymGrid,
    sigma: &[f64],
    alpha: f64,
    beta: f64,
    boundary: &dyn Fn(f64, f64) -> f64,
    warm_start: Option<&[f64]>,
    tol: f64,
) -> Result<ScalarField, PdeError> {
    if !(tol > 0.0) {
        return Err(PdeError::Config(format!("tol = {tol} must be > 0")));
    }
    let (np, ns) = grid.node_counts();
    let n_nodes = np * ns;
    if sigma.len() != (np - 1) * (ns - 1) {
        return Err(PdeError::Config(format!(
            "sigma has {} cells, grid needs {}",
            sigma.len(),
            (np - 1) * (ns - 1)
        )));
    }
    let mut values = match warm_start {
        Some(w) if w.len() == n_nodes => w.to_vec(),
        Some(w) => {
            return Err(PdeError::Config(format!(
                "warm start has {} entries, grid has {n_nodes} nodes",
                w.len()
            )))
        }
        None => vec![0.0; n_nodes],
    };
    fill_boundary(grid, boundary, &mut values);

    let links = assemble_links(grid, sigma);
    let (iterations, residual) = cg_solve(grid, &links, &mut values, tol)?;
    let _ = iterations;
    Ok(ScalarField { grid: grid.clone(), values, sigma: sigma.to_vec(), alpha, beta, residual })
}

/// Samples an analytic potential onto the grid nodes (no solve); the
/// conductivity map still follows the layout so diagnostics can weight
/// by phase.
pub fn sample_field(
    grid: &AxisymGrid,
    cfg: &MaterialConfig,
    potential: &dyn Fn(f64, f64) -> f64,
) -> ScalarField {
    let (np, ns) = grid.node_counts();
    let mut values = vec![0.0; np * ns];
    for i in 0..np {
        for j in 0..ns {
            values[grid.node_index(i, j)] =
                potential(grid.nodes_primary[i], grid.nodes_secondary[j]);
        }
    }
    ScalarField {
        grid: grid.clone(),
        values,
        sigma: grid.sigma_cells(cfg),
        alpha: cfg.alpha,
        beta: cfg.beta,
        residual: 0.0,
    }
}

/// Jacobi-preconditioned conjugate gradients on the interior unknowns.
/// Serial and fixed-order, so identical inputs give identical output
/// bits. Returns (iterations, final relative residual).
fn cg_solve(
    grid: &AxisymGrid,
    links: &[Link],
    values: &mut [f64],
    tol: f64,
) -> Result<(usize, f64), PdeError> {
    let (np, ns) = grid.node_counts();
    let n_nodes = np * ns;
    let mut unknown = vec![u32::MAX; n_nodes];
    let mut n_unknown = 0u32;
    for i in 0..np {
        for j in 0..ns {
            if !is_dirichlet(grid, i, j) {
                unknown[grid.node_index(i, j)] = n_unknown;
                n_unknown += 1;
            }
        }
    }
    let n = n_unknown as usize;
    if n == 0 {
        return Ok((0, 0.0));
    }

    // A x = b with A from the link Laplacian; Dirichlet neighbours fold
    // into b. Diagonal doubles as the Jacobi preconditioner.
    let mut diag = vec![0.0f64; n];
    let mut b = vec![0.0f64; n];
    for l in links {
        let (ia, ib) = (l.a as usize, l.b as usize);
        let (ua, ub) = (unknown[ia], unknown[ib]);
        if ua != u32::MAX {
            diag[ua as usize] += l.t;
            if ub == u32::MAX {
                b[ua as usize] += l.t * values[ib];
            }
        }
        if ub != u32::MAX {
            diag[ub as usize] += l.t;
            if ua == u32::MAX {
                b[ub as usize] += l.t * values[ia];
            }
        }
    }
    for (k, d) in diag.iter().enumerate() {
        if !(*d > 0.0) {
            return Err(PdeError::Config(format!(
                "degenerate grid: zero-diagonal unknown {k}"
            )));
        }
    }

    let matvec = |x: &[f64], y: &mut [f64]| {
        y.iter_mut().for_each(|v| *v = 0.0);
        for l in links {
            let (ua, ub) = (unknown[l.a as usize], unknown[l.b as usize]);
            match (ua, ub) {
                (u32::MAX, _) | (_, u32::MAX) => {
                    if ua != u32::MAX {
                        y[ua as usize] += l.t * x[ua as usize];
                    }
                    if ub != u32::MAX {
                        y[ub as usize] += l.t * x[ub as usize];
                    }
                }
                (ua, ub) => {
                    let d = x[ua as usize] - x[ub as usize];
                    y[ua as usize] += l.t * d;
                    y[ub as usize] -= l.t * d;
                }
            }
        }
    };

    let mut x = vec![0.0f64; n];
    for i in 0..np {
        for j in 0..ns {
            let u = unknown[grid.node_index(i, j)];
            if u != u32::MAX {
                x[u as usize] = values[grid.node_index(i, j)];
            }
        }
    }

    let norm_b = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut r = vec![0.0f64; n];
    let mut ax = vec![0.0f64; n];
    matvec(&x, &mut ax);
    for k in 0..n {
        r[k] = b[k] - ax[k];
    }
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let target = if norm_b > 0.0 { tol * norm_b } else { tol };
    let max_iter = 40_000usize;
    let mut res = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut it = 0usize;
    while res > target && it < max_iter {
        matvec(&p, &mut ax);
        let pap: f64 = p.iter().zip(&ax).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(PdeError::Convergence { iterations: it, residual: res, tol });
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ax[k];
        }
        for k in 0..n {
            z[k] = r[k] / diag[k];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
        res = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        it += 1;
    }
    if res > target {
        return Err(PdeError::Convergence { iterations: it, residual: res / norm_b.max(1e-300), tol });
    }

    for i in 0..np {
        for j in 0..ns {
            let u = unknown[grid.node_index(i, j)];
            if u != u32::MAX {
                values[grid.node_index(i, j)] = x[u as usize];
            }
        }
    }
    Ok((it, if norm_b > 0.0 { res / norm_b } else { res }))
}

/// Max-norm of the interior flux-balance residual, scaled by the local
/// diagonal: the Galerkin orthogonality check after a solve.
pub fn interior_residual(field: &ScalarField) -> f64 {
    let grid = &field.grid;
    let links = assemble_links(grid, &field.sigma);
    let n_nodes = field.values.len();
    let mut res = vec![0.0f64; n_nodes];
    let mut diag = vec![0.0f64; n_nodes];
    for l in &links {
        let d = field.values[l.a as usize] - field.values[l.b as usize];
        res[l.a as usize] += l.t * d;
        res[l.b as usize] -= l.t * d;
        diag[l.a as usize] += l.t;
        diag[l.b as usize] += l.t;
    }
    let (np, ns) = grid.node_counts();
    let mut worst = 0.0f64;
    let scale = field
        .values
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    for i in 0..np {
        for j in 0..ns {
            if !is_dirichlet(grid, i, j) {
                let k = grid.node_index(i, j);
                worst = worst.max(res[k].abs() / (diag[k] * scale));
            }
        }
    }
    worst
}

/// Discrete energy of the field: `sum_links T (du)^2`, the quantity the
/// solver minimizes.
pub fn link_energy(field: &ScalarField) -> f64 {
    let links = assemble_links(&field.grid, &field.sigma);
    links
        .iter()
        .map(|l| l.t * (field.values[l.a as usize] - field.values[l.b as usize]).powi(2))
        .sum()
}
