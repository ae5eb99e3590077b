//! Desk-scale alternating minimization of the volume-penalized
//! interface energy on the unit square (centered at the origin),
//!
//! ```text
//! F_pen(E, u) = gamma * P(E) + sum sigma_E |Du|^2 + Lambda | |E| - V |,
//! ```
//!
//! over binary cell phases `E` and the elastic minimum `u` for the
//! current phase. The move set is single-cell flips (optionally k x k
//! block flips), alternating with re-solves of `u`:
//!
//! 1. *Screening sweeps* evaluate flips against the frozen current `u`.
//!    Because the competitor pair `(F, u)` is admissible, a frozen-`u`
//!    decrease is a certificate of true descent; accepted flips strictly
//!    decrease the energy even before the re-solve.
//! 2. A *sweep-end audit* re-solves `u` and recomputes the energy from
//!    scratch; any regression would revert the sweep (it cannot occur,
//!    the audit is a guard against implementation drift).
//! 3. *Certification sweeps* re-solve `u` per tentative flip (warm-started
//!    conjugate gradients) until no single flip lowers the energy by more
//!    than the convergence threshold. Flips that raise the conductivity
//!    can be skipped without a solve when their geometric terms already
//!    fail: raising sigma can only raise the minimal Dirichlet energy.
//!
//! The returned state is single-flip stable under re-solved energies.
//! Diagnostics (excess, rescaled Dirichlet integral, density report,
//! first-variation inequality, multiplier bracket) live in
//! [`diagnostics`].

pub mod diagnostics;
pub mod perimeter;

use crate::cones::MaterialConfig;
use crate::pde::{self, AxisymGrid, PhaseLayout, ScalarField};
use perimeter::BitmapDomain;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MinimizerError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("field error: {0}")]
    Pde(#[from] pde::PdeError),
    #[error("vector field not supported away from the boundary margin: {0}")]
    Support(String),
    #[error("diagnostic domain error: {0}")]
    Domain(String),
}

/// Named Dirichlet data presets on the centered unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPreset {
    /// `g = x`: uniform left-right drive.
    LinearX,
    /// `g = x^2 - y^2`: harmonic quadrupole drive.
    Quadratic,
    /// Two opposite-sign poles just outside the left and right edges.
    TwoPole,
    /// `g = x / sigma(x)`: the exact transmission profile of a vertical
    /// cut at x = 0 (a true flat critical configuration). Programmatic
    /// only; the config file exposes the three named presets above.
    PwLinearX,
}

impl BoundaryPreset {
    pub fn parse(name: &str) -> Result<Self, MinimizerError> {
        match name {
            "linear-x" => Ok(Self::LinearX),
            "quadratic" => Ok(Self::Quadratic),
            "two-pole" => Ok(Self::TwoPole),
            other => Err(MinimizerError::Config(format!(
                "unknown boundary preset '{other}' (expected linear-x, quadratic, two-pole)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::LinearX => "linear-x",
            Self::Quadratic => "quadratic",
            Self::TwoPole => "two-pole",
            Self::PwLinearX => "pw-linear-x",
        }
    }

    pub fn eval(&self, x: f64, y: f64, alpha: f64, beta: f64) -> f64 {
        match self {
            Self::LinearX => x,
            Self::Quadratic => x * x - y * y,
            Self::TwoPole => {
                let d2m = (x - 0.55).powi(2) + y * y + 0.01;
                let d2p = (x + 0.55).powi(2) + y * y + 0.01;
                0.01 * (1.0 / d2m - 1.0 / d2p)
            }
            Self::PwLinearX => {
                if x >= 0.0 {
                    x / alpha
                } else {
                    x / beta
                }
            }
        }
    }
}

/// Initial phase seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitSeed {
    /// Vertical cut at the target volume fraction (deterministic default).
    VerticalCut,
    /// Centered disk of the target volume.
    Disk,
    /// 4x4-cell blocks filled at the target fraction from the given seed.
    RandomBlocks(u64),
}

/// Move set of the descent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveSet {
    Cells,
    /// Flip k x k aligned blocks as one move (the brute-force oracle
    /// compares against block enumeration).
    Blocks(usize),
}

/// Sweep schedule.
#[derive(Debug, Clone, Copy)]
pub struct Schedule {
    pub max_sweeps: usize,
    /// Elastic solver tolerance (relative residual).
    pub solve_tol: f64,
    /// A flip must beat this energy decrease to be accepted.
    pub flip_threshold: f64,
    pub moves: MoveSet,
}

impl Default for Schedule {
    fn default() -> Self {
        Self { max_sweeps: 200, solve_tol: 1e-10, flip_threshold: 1e-10, moves: MoveSet::Cells }
    }
}

/// Full problem description, parseable from the flat key-value config
/// format of the CLI (`grid = 64`, `boundary = linear-x`, ...).
#[derive(Debug, Clone)]
pub struct MinimizeProblem {
    pub grid: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Volume penalization Lambda; 0 disables the constraint (problem
    /// without prescribed volume).
    pub lambda: f64,
    pub target_volume: f64,
    pub boundary: BoundaryPreset,
    pub seed: InitSeed,
    pub sweeps: usize,
}

impl Default for MinimizeProblem {
    fn default() -> Self {
        Self {
            grid: 64,
            gamma: 0.1,
            alpha: 1.0,
            beta: 5.0,
            lambda: 10.0,
            target_volume: 0.5,
            boundary: BoundaryPreset::LinearX,
            seed: InitSeed::VerticalCut,
            sweeps: 200,
        }
    }
}

impl MinimizeProblem {
    /// Parses `key = value` lines; `#` starts a comment. Unknown keys
    /// are rejected so typos cannot silently fall back to defaults.
    pub fn from_key_values(text: &str) -> Result<Self, MinimizerError> {
        let mut p = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                MinimizerError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |e: &dyn std::fmt::Display| {
                MinimizerError::Config(format!("line {}: {key}: {e}", lineno + 1))
            };
            match key {
                "grid" => p.grid = value.parse().map_err(|e| bad(&e))?,
                "gamma" => p.gamma = value.parse().map_err(|e| bad(&e))?,
                "alpha" => p.alpha = value.parse().map_err(|e| bad(&e))?,
                "beta" => p.beta = value.parse().map_err(|e| bad(&e))?,
                "Lambda" | "lambda" => p.lambda = value.parse().map_err(|e| bad(&e))?,
                "target_volume" => p.target_volume = value.parse().map_err(|e| bad(&e))?,
                "boundary" => p.boundary = BoundaryPreset::parse(value)?,
                "seed" => {
                    p.seed = match value {
                        "vertical-cut" => InitSeed::VerticalCut,
                        "disk" => InitSeed::Disk,
                        other => InitSeed::RandomBlocks(other.parse().map_err(|_| {
                            MinimizerError::Config(format!(
                                "line {}: seed must be vertical-cut, disk, or an integer",
                                lineno + 1
                            ))
                        })?),
                    }
                }
                "sweeps" => p.sweeps = value.parse().map_err(|e| bad(&e))?,
                other => {
                    return Err(MinimizerError::Config(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), MinimizerError> {
        if self.grid < 2 {
            return Err(MinimizerError::Config("grid must be >= 2".into()));
        }
        if !(0.0 < self.alpha && self.alpha < self.beta) {
            return Err(MinimizerError::Config(format!(
                "need 0 < alpha < beta, got {} and {}",
                self.alpha, self.beta
            )));
        }
        if !(self.gamma > 0.0) {
            return Err(MinimizerError::Config("gamma must be > 0".into()));
        }
        if !(self.lambda >= 0.0) {
            return Err(MinimizerError::Config("Lambda must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.target_volume) {
            return Err(MinimizerError::Config("target_volume must be in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn material(&self) -> MaterialConfig {
        MaterialConfig::new(2, self.alpha, self.beta, self.gamma, self.lambda)
            .expect("validated problem")
    }

    fn initial_phase(&self) -> Vec<bool> {
        let n = self.grid;
        let mut phase = vec![false; n * n];
        match self.seed {
            InitSeed::VerticalCut => {
                let cols = (self.target_volume * n as f64).round() as usize;
                for iy in 0..n {
                    for ix in 0..cols.min(n) {
                        phase[iy * n + ix] = true;
                    }
                }
            }
            InitSeed::Disk => {
                let r = (self.target_volume / std::f64::consts::PI).sqrt();
                let h = 1.0 / n as f64;
                for iy in 0..n {
                    for ix in 0..n {
                        let x = -0.5 + (ix as f64 + 0.5) * h;
                        let y = -0.5 + (iy as f64 + 0.5) * h;
                        phase[iy * n + ix] = x * x + y * y < r * r;
                    }
                }
            }
            InitSeed::RandomBlocks(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let bs = 4usize;
                let nb = n.div_ceil(bs);
                for by in 0..nb {
                    for bx in 0..nb {
                        if rng.gen_range(0.0..1.0) < self.target_volume {
                            for iy in (by * bs)..((by + 1) * bs).min(n) {
                                for ix in (bx * bs)..((bx + 1) * bs).min(n) {
                                    phase[iy * n + ix] = true;
                                }
                            }
                        }
                    }
                }
            }
        }
        phase
    }
}

/// Binary phase, its elastic minimum, and the penalized energy.
#[derive(Debug, Clone)]
pub struct InterfaceState {
    pub problem: MinimizeProblem,
    pub domain: BitmapDomain,
    /// Row-major cell indicator, `true` = the beta phase E.
    pub phase: Vec<bool>,
    /// Elastic minimum for the current phase.
    pub u: ScalarField,
    /// Penalized energy, kept consistent with the fields.
    pub energy: f64,
    pub target_volume: f64,
}

/// One audited row of the energy trace.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub sweep: usize,
    pub energy: f64,
    pub perimeter: f64,
    pub dirichlet: f64,
    pub volume: f64,
}

/// Descent result: final state, audited per-sweep trace, and flags.
#[derive(Debug)]
pub struct MinimizeOutcome {
    pub state: InterfaceState,
    pub trace: Vec<TraceRow>,
    /// True when the final state is single-flip stable under re-solves.
    pub converged: bool,
    /// True when the sweep budget ran out first (state is best-so-far).
    pub budget_exceeded: bool,
    pub accepted_flips: usize,
}

fn grid_for(n: usize) -> Result<AxisymGrid, MinimizerError> {
    Ok(AxisymGrid::planar_relaxed(0.5, n, PhaseLayout::Uniform)?)
}

/// Ball Dirichlet energy of the state's field (diagnostics helper).
pub(crate) fn pde_energy_in_ball(
    state: &InterfaceState,
    x: (f64, f64),
    r: f64,
    weighted: bool,
) -> Result<f64, MinimizerError> {
    Ok(pde::dirichlet_energy(&state.u, x, r, weighted)?)
}

fn sigma_from_phase(phase: &[bool], alpha: f64, beta: f64) -> Vec<f64> {
    phase.iter().map(|&e| if e { beta } else { alpha }).collect()
}

impl InterfaceState {
    /// Solves the elastic problem for the given phase and assembles the
    /// penalized energy.
    pub fn new(
        problem: &MinimizeProblem,
        phase: Vec<bool>,
        solve_tol: f64,
    ) -> Result<Self, MinimizerError> {
        problem.validate()?;
        let n = problem.grid;
        if phase.len() != n * n {
            return Err(MinimizerError::Config(format!(
                "phase bitmap has {} cells, grid needs {}",
                phase.len(),
                n * n
            )));
        }
        let domain = BitmapDomain::unit_square_centered(n);
        let grid = grid_for(n)?;
        let sigma = sigma_from_phase(&phase, problem.alpha, problem.beta);
        let boundary = problem.boundary;
        let (al, be) = (problem.alpha, problem.beta);
        let u = pde::solve_custom(
            &grid,
            &sigma,
            al,
            be,
            &|x, y| boundary.eval(x, y, al, be),
            None,
            solve_tol,
        )?;
        let mut state = Self {
            problem: problem.clone(),
            domain,
            phase,
            u,
            energy: 0.0,
            target_volume: problem.target_volume,
        };
        state.energy = state.recompute_energy();
        Ok(state)
    }

    /// Starts from the problem's initial seed.
    pub fn initial(problem: &MinimizeProblem, solve_tol: f64) -> Result<Self, MinimizerError> {
        Self::new(problem, problem.initial_phase(), solve_tol)
    }

    pub fn volume(&self) -> f64 {
        let h2 = self.domain.h * self.domain.h;
        self.phase.iter().filter(|&&e| e).count() as f64 * h2
    }

    pub fn perimeter(&self) -> f64 {
        perimeter::perimeter(&self.domain, &self.phase)
    }

    /// Dirichlet term: the assembled quadratic form the elastic solve
    /// minimizes.
    pub fn dirichlet(&self) -> f64 {
        pde::link_energy(&self.u)
    }

    /// Penalized energy recomputed from scratch.
    pub fn recompute_energy(&self) -> f64 {
        self.problem.gamma * self.perimeter()
            + self.dirichlet()
            + self.problem.lambda * (self.volume() - self.target_volume).abs()
    }

    /// Re-solves `u` for the current phase (warm-started) and refreshes
    /// the energy. Returns the audited energy.
    pub fn audit(&mut self, solve_tol: f64) -> Result<f64, MinimizerError> {
        let grid = grid_for(self.problem.grid)?;
        let sigma = sigma_from_phase(&self.phase, self.problem.alpha, self.problem.beta);
        let boundary = self.problem.boundary;
        let (al, be) = (self.problem.alpha, self.problem.beta);
        self.u = pde::solve_custom(
            &grid,
            &sigma,
            al,
            be,
            &|x, y| boundary.eval(x, y, al, be),
            Some(&self.u.values),
            solve_tol,
        )?;
        self.energy = self.recompute_energy();
        Ok(self.energy)
    }

    /// Frozen-`u` energy change of flipping the cell block
    /// `[ix0, ix0+k) x [iy0, iy0+k)`; exact for the geometric terms,
    /// an upper bound certificate for the re-solved competitor.
    fn frozen_flip_delta(&self, ix0: usize, iy0: usize, k: usize) -> f64 {
        let n = self.problem.grid;
        let h2 = self.domain.h * self.domain.h;
        let contrast = self.problem.beta - self.problem.alpha;

        let mut d_volume_cells = 0i64;
        for iy in iy0..(iy0 + k).min(n) {
            for ix in ix0..(ix0 + k).min(n) {
                d_volume_cells += if self.phase[iy * n + ix] { -1 } else { 1 };
            }
        }
        let vol_old = self.volume();
        let vol_new = vol_old + d_volume_cells as f64 * h2;
        let d_penalty = self.problem.lambda
            * ((vol_new - self.target_volume).abs() - (vol_old - self.target_volume).abs());

        // Perimeter delta over the (k+1) x (k+1) dual-cell window the
        // block touches.
        let window = |phase: &[bool]| -> f64 {
            let mut segs = Vec::new();
            let mut acc = 0.0;
            for dy in iy0 as isize - 1..(iy0 + k).min(n) as isize {
                for dx in ix0 as isize - 1..(ix0 + k).min(n) as isize {
                    perimeter::dual_cell_segments_for(&self.domain, phase, dx, dy, &mut segs);
                    acc += segs.drain(..).map(|s| s.len).sum::<f64>();
                }
            }
            acc
        };
        let local_before = window(&self.phase);
        let mut flipped = self.phase.clone();
        for iy in iy0..(iy0 + k).min(n) {
            for ix in ix0..(ix0 + k).min(n) {
                flipped[iy * n + ix] = !flipped[iy * n + ix];
            }
        }
        let local_after = window(&flipped);
        let d_perimeter = local_after - local_before;

        // Dirichlet delta at frozen u: each link flanking a flipped cell
        // shifts its transmissibility by +-contrast/2.
        let mut d_dirichlet = 0.0;
        let grid = &self.u.grid;
        for iy in iy0..(iy0 + k).min(n) {
            for ix in ix0..(ix0 + k).min(n) {
                let s = if self.phase[iy * n + ix] { -contrast } else { contrast };
                let pairs = [
                    (grid.node_index(ix, iy), grid.node_index(ix + 1, iy)),
                    (grid.node_index(ix, iy + 1), grid.node_index(ix + 1, iy + 1)),
                    (grid.node_index(ix, iy), grid.node_index(ix, iy + 1)),
                    (grid.node_index(ix + 1, iy), grid.node_index(ix + 1, iy + 1)),
                ];
                for (a, b) in pairs {
                    let du = self.u.values[a] - self.u.values[b];
                    d_dirichlet += 0.5 * s * du * du;
                }
            }
        }

        self.problem.gamma * d_perimeter + d_penalty + d_dirichlet
    }

    /// Applies a block flip without re-solving.
    fn apply_flip(&mut self, ix0: usize, iy0: usize, k: usize) {
        let n = self.problem.grid;
        for iy in iy0..(iy0 + k).min(n) {
            for ix in ix0..(ix0 + k).min(n) {
                self.phase[iy * n + ix] = !self.phase[iy * n + ix];
            }
        }
    }

    /// Whether flipping the block only raises cell conductivities
    /// (alpha -> beta everywhere); then the re-solved Dirichlet term
    /// cannot decrease and geometric terms alone decide.
    fn flip_raises_sigma(&self, ix0: usize, iy0: usize, k: usize) -> bool {
        let n = self.problem.grid;
        (iy0..(iy0 + k).min(n))
            .all(|iy| (ix0..(ix0 + k).min(n)).all(|ix| !self.phase[iy * n + ix]))
    }
}

/// Alternating minimization: screening sweeps on the frozen field, an
/// audit re-solve per sweep, then certification sweeps with a re-solve
/// per tentative flip until single-flip stability.
pub fn alternate_minimize(
    init: InterfaceState,
    schedule: &Schedule,
) -> Result<MinimizeOutcome, MinimizerError> {
    let mut state = init;
    let n = state.problem.grid;
    let k = match schedule.moves {
        MoveSet::Cells => 1usize,
        MoveSet::Blocks(k) => {
            if k == 0 || n % k != 0 {
                return Err(MinimizerError::Config(format!(
                    "block size {k} must divide the grid size {n}"
                )));
            }
            k
        }
    };
    let origins: Vec<(usize, usize)> = (0..n / k)
        .flat_map(|by| (0..n / k).map(move |bx| (bx * k, by * k)))
        .collect();

    let thr = schedule.flip_threshold;
    let mut trace = vec![TraceRow {
        sweep: 0,
        energy: state.energy,
        perimeter: state.perimeter(),
        dirichlet: state.dirichlet(),
        volume: state.volume(),
    }];
    let mut accepted_total = 0usize;
    let mut sweep = 0usize;
    let mut converged = false;

    while sweep < schedule.max_sweeps {
        sweep += 1;
        let pre_sweep = state.clone();
        let mut accepted = 0usize;

        // Screening on the frozen field.
        for &(ix0, iy0) in &origins {
            let delta = state.frozen_flip_delta(ix0, iy0, k);
            if delta < -thr {
                state.apply_flip(ix0, iy0, k);
                state.energy += delta;
                accepted += 1;
            }
        }

        if accepted > 0 {
            let audited = state.audit(schedule.solve_tol)?;
            if audited >= pre_sweep.energy - thr {
                // The frozen-u certificate guarantees descent; a
                // regression here means numerical drift. Revert, stop.
                state = pre_sweep;
                break;
            }
            accepted_total += accepted;
            trace.push(TraceRow {
                sweep,
                energy: audited,
                perimeter: state.perimeter(),
                dirichlet: state.dirichlet(),
                volume: state.volume(),
            });
            continue;
        }

        // Certification: re-solve per tentative flip.
        let mut improved = false;
        for &(ix0, iy0) in &origins {
            if state.flip_raises_sigma(ix0, iy0, k) {
                // Dirichlet term cannot decrease; geometric screening
                // already rejected this flip.
                continue;
            }
            let mut trial = state.clone();
            trial.apply_flip(ix0, iy0, k);
            let trial_energy = trial.audit(schedule.solve_tol)?;
            if trial_energy < state.energy - thr {
                state = trial;
                accepted += 1;
                improved = true;
            }
        }
        if improved {
            accepted_total += accepted;
            trace.push(TraceRow {
                sweep,
                energy: state.energy,
                perimeter: state.perimeter(),
                dirichlet: state.dirichlet(),
                volume: state.volume(),
            });
        } else {
            converged = true;
            break;
        }
    }

    // Final audit so the returned state is exactly consistent.
    state.audit(schedule.solve_tol)?;
    Ok(MinimizeOutcome {
        budget_exceeded: !converged && sweep >= schedule.max_sweeps,
        accepted_flips: accepted_total,
        state,
        trace,
        converged,
    })
}

/// Exhaustive single-move stability scan with a full re-solve per move.
/// Returns the best improving move, if any.
pub fn stability_scan(
    state: &InterfaceState,
    schedule: &Schedule,
) -> Result<Option<((usize, usize), f64)>, MinimizerError> {
    let n = state.problem.grid;
    let k = match schedule.moves {
        MoveSet::Cells => 1usize,
        MoveSet::Blocks(k) => k,
    };
    let mut best: Option<((usize, usize), f64)> = None;
    for by in 0..n / k {
        for bx in 0..n / k {
            let (ix0, iy0) = (bx * k, by * k);
            let mut trial = state.clone();
            trial.apply_flip(ix0, iy0, k);
            let e = trial.audit(schedule.solve_tol)?;
            let delta = e - state.energy;
            if delta < -schedule.flip_threshold && best.map_or(true, |(_, d)| delta < d) {
                best = Some(((ix0, iy0), delta));
            }
        }
    }
    Ok(best)
}
