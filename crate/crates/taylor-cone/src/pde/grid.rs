//! Grids, phase layouts, and the discrete field container.

use super::PdeError;
use crate::cones::MaterialConfig;

/// Phase geometry on a grid. The interface is always grid-aligned:
/// every cell lies wholly in one phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseLayout {
    /// `E = {y < offset}` carries `beta`; the upper half carries `alpha`.
    HalfSpaceBelow { offset: f64 },
    /// `E = {theta < theta0}` (around the positive axis) carries `beta`.
    Cone { theta0: f64 },
    /// No interface; every cell carries `alpha`.
    Uniform,
}

/// Geometry of the computational domain.
#[derive(Debug, Clone)]
pub enum GridShape {
    /// Square `[-radius, radius]^2` with `cells x cells` square cells,
    /// Dirichlet data on all four sides. Represents ambient dimension 2.
    HalfSpace2d { radius: f64, cells: usize },
    /// Spherical shell `cap <= rho <= radius`, `0 <= theta <= pi`,
    /// axisymmetric (ambient dimension 3). Dirichlet data on the outer
    /// sphere, natural conditions on the cap and on the axis. The theta
    /// nodes are placed so that `theta0` of a cone layout is exactly a
    /// grid line.
    ConeAxisym3d { radius: f64, cap: f64, n_rho: usize, n_theta: usize },
}

/// Structured grid plus phase layout. Nodes are indexed `(i, j)` with
/// `i` along the primary axis (x or rho) and `j` along the secondary
/// (y or theta); storage is `idx = i * (len secondary) + j`.
#[derive(Debug, Clone)]
pub struct AxisymGrid {
    pub shape: GridShape,
    pub layout: PhaseLayout,
    /// Planar: node coordinates along one side (shared by x and y).
    /// Spherical: rho nodes.
    pub nodes_primary: Vec<f64>,
    /// Planar: same as `nodes_primary`. Spherical: theta nodes.
    pub nodes_secondary: Vec<f64>,
}

impl AxisymGrid {
    /// Planar square grid; a half-space layout must put its interface
    /// on a node line.
    pub fn planar(radius: f64, cells: usize, layout: PhaseLayout) -> Result<Self, PdeError> {
        if cells < 16 {
            return Err(PdeError::Config(format!(
                "resolution {cells} below the minimum of 16 cells per direction"
            )));
        }
        Self::planar_relaxed(radius, cells, layout)
    }

    /// As [`AxisymGrid::planar`] without the resolution floor; the
    /// interface minimizer's brute-force oracle runs on 6x6 grids.
    pub(crate) fn planar_relaxed(
        radius: f64,
        cells: usize,
        layout: PhaseLayout,
    ) -> Result<Self, PdeError> {
        if !(radius > 0.0) {
            return Err(PdeError::Config(format!("radius = {radius} must be > 0")));
        }
        if cells < 2 {
            return Err(PdeError::Config(format!("resolution {cells} below 2")));
        }
        let h = 2.0 * radius / cells as f64;
        let nodes: Vec<f64> = (0..=cells).map(|i| -radius + i as f64 * h).collect();
        match layout {
            PhaseLayout::HalfSpaceBelow { offset } => {
                let aligned = nodes.iter().any(|&y| (y - offset).abs() <= 1e-12 * radius);
                if !aligned {
                    return Err(PdeError::Config(format!(
                        "half-space offset {offset} does not sit on a grid line (h = {h})"
                    )));
                }
            }
            PhaseLayout::Cone { .. } => {
                return Err(PdeError::Config(
                    "cone layouts require the axisymmetric shell shape".into(),
                ));
            }
            PhaseLayout::Uniform => {}
        }
        Ok(Self {
            shape: GridShape::HalfSpace2d { radius, cells },
            layout,
            nodes_secondary: nodes.clone(),
            nodes_primary: nodes,
        })
    }

    /// Axisymmetric spherical shell. For a cone layout the theta nodes
    /// are distributed uniformly on each side of `theta0` so the
    /// interface is a grid line; `cap` defaults to one radial cell when
    /// passed as 0.
    pub fn cone_axisym(
        radius: f64,
        cap: f64,
        n_rho: usize,
        n_theta: usize,
        layout: PhaseLayout,
    ) -> Result<Self, PdeError> {
        if !(radius > 0.0) {
            return Err(PdeError::Config(format!("radius = {radius} must be > 0")));
        }
        if n_rho < 16 || n_theta < 16 {
            return Err(PdeError::Config(format!(
                "resolution {n_rho} x {n_theta} below the minimum of 16"
            )));
        }
        let cap = if cap == 0.0 { radius / n_rho as f64 } else { cap };
        if !(cap > 0.0 && cap < 0.5 * radius) {
            return Err(PdeError::Config(format!(
                "cap = {cap} must lie in (0, radius/2)"
            )));
        }
        let d_rho = (radius - cap) / n_rho as f64;
        let rho_nodes: Vec<f64> = (0..=n_rho).map(|i| cap + i as f64 * d_rho).collect();
        let theta_nodes = match layout {
            PhaseLayout::Cone { theta0 } => {
                if !(theta0 > 0.0 && theta0 < std::f64::consts::FRAC_PI_2) {
                    return Err(PdeError::Config(format!(
                        "cone angle {theta0} outside (0, pi/2)"
                    )));
                }
                // Split n_theta proportionally, at least 8 lines per side.
                let inside = ((n_theta as f64 * theta0 / std::f64::consts::PI).round() as usize)
                    .clamp(8, n_theta - 8);
                let outside = n_theta - inside;
                let mut nodes = Vec::with_capacity(n_theta + 1);
                for j in 0..=inside {
                    nodes.push(theta0 * j as f64 / inside as f64);
                }
                for j in 1..=outside {
                    nodes.push(
                        theta0
                            + (std::f64::consts::PI - theta0) * j as f64 / outside as f64,
                    );
                }
                nodes
            }
            PhaseLayout::Uniform => (0..=n_theta)
                .map(|j| std::f64::consts::PI * j as f64 / n_theta as f64)
                .collect(),
            PhaseLayout::HalfSpaceBelow { .. } => {
                return Err(PdeError::Config(
                    "half-space layouts require the planar shape".into(),
                ));
            }
        };
        Ok(Self {
            shape: GridShape::ConeAxisym3d { radius, cap, n_rho, n_theta },
            layout,
            nodes_primary: rho_nodes,
            nodes_secondary: theta_nodes,
        })
    }

    /// Ambient dimension the grid represents.
    pub fn n_eff(&self) -> usize {
        match self.shape {
            GridShape::HalfSpace2d { .. } => 2,
            GridShape::ConeAxisym3d { .. } => 3,
        }
    }

    /// Domain ball radius.
    pub fn radius(&self) -> f64 {
        match self.shape {
            GridShape::HalfSpace2d { radius, .. } => radius,
            GridShape::ConeAxisym3d { radius, .. } => radius,
        }
    }

    /// Cell size: planar spacing, or the radial spacing for the shell.
    pub fn h(&self) -> f64 {
        self.nodes_primary[1] - self.nodes_primary[0]
    }

    /// Node counts (primary, secondary) including boundaries.
    pub fn node_counts(&self) -> (usize, usize) {
        (self.nodes_primary.len(), self.nodes_secondary.len())
    }

    pub(crate) fn node_index(&self, i: usize, j: usize) -> usize {
        i * self.nodes_secondary.len() + j
    }

    /// Per-cell conductivity for the layout.
    pub fn sigma_cells(&self, cfg: &MaterialConfig) -> Vec<f64> {
        let (np, ns) = self.node_counts();
        let mut sigma = vec![cfg.alpha; (np - 1) * (ns - 1)];
        match (&self.shape, &self.layout) {
            (GridShape::HalfSpace2d { .. }, PhaseLayout::HalfSpaceBelow { offset }) => {
                for iy in 0..ns - 1 {
                    let y_mid = 0.5 * (self.nodes_secondary[iy] + self.nodes_secondary[iy + 1]);
                    if y_mid < *offset {
                        for ix in 0..np - 1 {
                            sigma[iy * (np - 1) + ix] = cfg.beta;
                        }
                    }
                }
            }
            (GridShape::ConeAxisym3d { .. }, PhaseLayout::Cone { theta0 }) => {
                for i in 0..np - 1 {
                    for j in 0..ns - 1 {
                        let t_mid =
                            0.5 * (self.nodes_secondary[j] + self.nodes_secondary[j + 1]);
                        if t_mid < *theta0 {
                            sigma[i * (ns - 1) + j] = cfg.beta;
                        }
                    }
                }
            }
            _ => {}
        }
        sigma
    }

    /// Cell conductivity accessor; planar cells are indexed
    /// `(ix, iy)` and shell cells `(i_rho, j_theta)`.
    pub(super) fn sigma_at(&self, sigma: &[f64], a: usize, b: usize) -> f64 {
        match self.shape {
            GridShape::HalfSpace2d { .. } => {
                let nx = self.nodes_primary.len() - 1;
                sigma[b * nx + a]
            }
            GridShape::ConeAxisym3d { .. } => {
                let nt = self.nodes_secondary.len() - 1;
                sigma[a * nt + b]
            }
        }
    }

    /// Index of the grid line carrying the interface, if any: the y node
    /// row for a half-space, the theta node column for a cone.
    pub fn interface_line(&self) -> Option<usize> {
        match (&self.shape, &self.layout) {
            (GridShape::HalfSpace2d { radius, .. }, PhaseLayout::HalfSpaceBelow { offset }) => self
                .nodes_secondary
                .iter()
                .position(|&y| (y - offset).abs() <= 1e-12 * radius),
            (GridShape::ConeAxisym3d { .. }, PhaseLayout::Cone { theta0 }) => self
                .nodes_secondary
                .iter()
                .position(|&t| (t - theta0).abs() <= 1e-12),
            _ => None,
        }
    }
}

/// Discrete potential on a grid: node values, per-cell conductivity,
/// and the Dirichlet data it was solved (or sampled) with.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: AxisymGrid,
    pub values: Vec<f64>,
    pub sigma: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    /// Solver relative residual, 0 for sampled analytic fields.
    pub residual: f64,
}

impl ScalarField {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.node_index(i, j)]
    }
}
