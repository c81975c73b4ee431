//! Implicit finite-difference model of a phreatic aquifer drained by a point
//! sink, posed as one piecewise linear system per day.
//!
//! The aquifer bottom is a paraboloid of revolution on the square
//! `[−L, L]²`, sampled on a `(2N+1) × (2N+1)` grid. Node `(i, j)`, with
//! `i, j ∈ −N..=N`, has coordinates `(iΔ, jΔ)` with `Δ = L/N` and is stored
//! row-major at `(i+N)(2N+1) + (j+N)`. For each day the unknown is
//! `x = h + η`, the water surface measured from the bottom, and the system is
//! `x⁺ + Tx = H + (Δt/ε)φ + Th` with `T` the five-point diffusion operator
//! weighted by the previous day's saturated thickness.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::io::{read_to_string, write_string};
use crate::linalg::{matvec, PentaBandMatrix};
use crate::problem::{positive_part, PwlsProblem, SolveOptions, SolveReport};
use crate::solvers::{solve, Method};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AquiferConfig {
    /// Rim radius of the paraboloid, m.
    #[serde(rename = "L")]
    pub length: f64,
    /// Depth at the center, m.
    pub depth: f64,
    /// Porosity.
    pub epsilon: f64,
    /// Hydraulic conductivity, m/s.
    pub kappa: f64,
    /// Time step, s.
    pub dt: f64,
    /// Sink outflow, m³/s.
    pub q: f64,
    /// Half grid size; the grid has `(2N+1)²` nodes.
    #[serde(rename = "N")]
    pub n_half: usize,
    pub days: usize,
}

impl Default for AquiferConfig {
    fn default() -> Self {
        Self {
            length: 1000.0,
            depth: 10.0,
            epsilon: 0.4,
            kappa: 1.0,
            dt: 86400.0,
            q: 10.0,
            n_half: 25,
            days: 7,
        }
    }
}

impl AquiferConfig {
    pub fn with_grid(mut self, n_half: usize) -> Self {
        self.n_half = n_half;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("L", self.length),
            ("depth", self.depth),
            ("epsilon", self.epsilon),
            ("kappa", self.kappa),
            ("dt", self.dt),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.q >= 0.0 && self.q.is_finite()) {
            return Err(Error::InvalidArgument(format!("q must be nonnegative, got {}", self.q)));
        }
        if self.n_half == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        Ok(())
    }

    /// Nodes per grid side, `2N+1`.
    pub fn side(&self) -> usize {
        2 * self.n_half + 1
    }

    pub fn nodes(&self) -> usize {
        self.side() * self.side()
    }

    /// Grid spacing `Δx = Δy = L/N`.
    pub fn spacing(&self) -> f64 {
        self.length / self.n_half as f64
    }

    /// Storage index of node `(i, j)`, `i, j ∈ −N..=N`.
    pub fn index(&self, i: isize, j: isize) -> usize {
        let n = self.n_half as isize;
        debug_assert!(i.abs() <= n && j.abs() <= n);
        (i + n) as usize * self.side() + (j + n) as usize
    }

    /// Coordinate of grid line `i`, `i ∈ −N..=N`.
    pub fn coordinate(&self, i: isize) -> f64 {
        i as f64 * self.spacing()
    }

    /// `κΔt/(εΔ²)`, the factor in front of every flux coefficient.
    fn flux_scale(&self) -> f64 {
        let d = self.spacing();
        self.kappa * self.dt / (self.epsilon * d * d)
    }

    /// Source term `φ₀₀ = −q/(ΔxΔy)`.
    pub fn sink(&self) -> f64 {
        let d = self.spacing();
        -self.q / (d * d)
    }
}

/// `h(x, y) = max(0, depth·(1 − (x²+y²)/L²))` at every node.
pub fn bottom_elevation(cfg: &AquiferConfig) -> Vec<f64> {
    let n = cfg.n_half as isize;
    let l2 = cfg.length * cfg.length;
    let mut h = Vec::with_capacity(cfg.nodes());
    for i in -n..=n {
        for j in -n..=n {
            let (x, y) = (cfg.coordinate(i), cfg.coordinate(j));
            h.push((cfg.depth * (1.0 - (x * x + y * y) / l2)).max(0.0));
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AquiferState {
    pub day: usize,
    pub h: Vec<f64>,
    pub eta: Vec<f64>,
    /// Saturated thickness `(h + η)⁺`.
    #[serde(rename = "H")]
    pub head: Vec<f64>,
}

impl AquiferState {
    /// Day 0: the water surface sits at the reference level, `η = 0`.
    pub fn initial(cfg: &AquiferConfig) -> Self {
        let h = bottom_elevation(cfg);
        Self {
            day: 0,
            eta: vec![0.0; h.len()],
            head: h.clone(),
            h,
        }
    }

    /// State whose surface is `x = h + η`.
    pub fn from_surface(day: usize, h: Vec<f64>, x: &[f64]) -> Result<Self> {
        check_len(h.len(), x.len())?;
        Ok(Self {
            day,
            eta: x.iter().zip(&h).map(|(x, h)| x - h).collect(),
            head: positive_part(x),
            h,
        })
    }

    /// `h + η`.
    pub fn surface(&self) -> Vec<f64> {
        self.h.iter().zip(&self.eta).map(|(h, e)| h + e).collect()
    }
}

/// The system for one day together with its grid.
#[derive(Debug, Clone)]
pub struct DaySystem {
    pub problem: PwlsProblem,
    pub n_half: usize,
}

impl DaySystem {
    pub fn side(&self) -> usize {
        2 * self.n_half + 1
    }

    /// Storage index of node `(i, j)`, `i, j ∈ −N..=N`.
    pub fn index(&self, i: isize, j: isize) -> usize {
        let n = self.n_half as isize;
        (i + n) as usize * self.side() + (j + n) as usize
    }
}

/// Builds the system advancing `state` by one day.
///
/// The flux weight between adjacent nodes `a`, `b` is
/// `κΔt/(εΔ²)·(Hₐ + H_b)/2`. Boundary nodes have no flux toward missing
/// neighbors, so every row of `T` sums to zero.
pub fn assemble_day(cfg: &AquiferConfig, state: &AquiferState) -> Result<DaySystem> {
    cfg.validate()?;
    let nodes = cfg.nodes();
    check_len(nodes, state.head.len())?;
    check_len(nodes, state.h.len())?;
    if let Some(k) = state.head.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "saturated thickness at node {k} is {}",
            state.head[k]
        )));
    }
    let side = cfg.side();
    let c = cfg.flux_scale();
    let hd = &state.head;
    let weight = |a: usize, b: usize| c * 0.5 * (hd[a] + hd[b]);

    let mut diag = vec![0.0; nodes];
    let mut near = vec![0.0; nodes - 1];
    let mut far = vec![0.0; nodes - side];
    for k in 0..nodes {
        if (k + 1) % side != 0 {
            let w = weight(k, k + 1);
            near[k] = -w;
            diag[k] += w;
            diag[k + 1] += w;
        }
        if k + side < nodes {
            let w = weight(k, k + side);
            far[k] = -w;
            diag[k] += w;
            diag[k + side] += w;
        }
    }
    let t = PentaBandMatrix::symmetric(side, diag, near, far)?;

    let th = matvec(&t, &state.h)?;
    let mut b: Vec<f64> = hd.iter().zip(&th).map(|(hv, t)| hv + t).collect();
    b[cfg.index(0, 0)] += cfg.dt / cfg.epsilon * cfg.sink();

    Ok(DaySystem {
        problem: PwlsProblem::new(t, b)?,
        n_half: cfg.n_half,
    })
}

/// Water volume `ε·Σ Hᵢⱼ·ΔxΔy`.
pub fn water_volume(cfg: &AquiferConfig, state: &AquiferState) -> f64 {
    let d = cfg.spacing();
    cfg.epsilon * state.head.iter().sum::<f64>() * d * d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayResult {
    pub state: AquiferState,
    pub report: SolveReport,
    /// m³.
    pub volume: f64,
}

/// Solves day `state.day + 1`. Without `x0` the iteration starts from the
/// previous day's surface `h + η`.
///
/// A run that does not converge is still returned; check `report.status`.
pub fn step_day(
    cfg: &AquiferConfig,
    state: &AquiferState,
    method: Method,
    x0: Option<&[f64]>,
    opts: &SolveOptions,
) -> Result<DayResult> {
    let system = assemble_day(cfg, state)?;
    let start = match x0 {
        Some(x) => x.to_vec(),
        None => state.surface(),
    };
    let report = solve(&system.problem, method, Some(&start), opts)?;
    let next = AquiferState::from_surface(state.day + 1, state.h.clone(), &report.x)?;
    let volume = water_volume(cfg, &next);
    Ok(DayResult {
        state: next,
        report,
        volume,
    })
}

/// Refines a nodal field from half size `n_half` to `2·n_half`.
///
/// Coincident nodes keep their values, edge midpoints average their two
/// coarse neighbors and cell centers average their four.
pub fn interpolate_refine(coarse: &[f64], n_half: usize) -> Result<Vec<f64>> {
    let cs = 2 * n_half + 1;
    check_len(cs * cs, coarse.len())?;
    let fs = 2 * cs - 1;
    let at = |i: usize, j: usize| coarse[i * cs + j];
    let mut fine = vec![0.0; fs * fs];
    for fi in 0..fs {
        for fj in 0..fs {
            let (i, j) = (fi / 2, fj / 2);
            fine[fi * fs + fj] = match (fi % 2, fj % 2) {
                (0, 0) => at(i, j),
                (0, _) => 0.5 * (at(i, j) + at(i, j + 1)),
                (_, 0) => 0.5 * (at(i, j) + at(i + 1, j)),
                _ => 0.25 * (at(i, j) + at(i + 1, j) + at(i, j + 1) + at(i + 1, j + 1)),
            };
        }
    }
    Ok(fine)
}

/// Daily water levels of a finished run, used to warm-start a finer grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Levels {
    #[serde(rename = "N")]
    pub n_half: usize,
    /// `eta[l]` is `η` at day `l`, day 0 included.
    pub eta: Vec<Vec<f64>>,
}

impl Levels {
    pub fn from_run(cfg: &AquiferConfig, days: &[DayResult]) -> Self {
        let mut eta = vec![vec![0.0; cfg.nodes()]];
        eta.extend(days.iter().map(|d| d.state.eta.clone()));
        Self {
            n_half: cfg.n_half,
            eta,
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let levels: Self = serde_json::from_str(&read_to_string(path)?)?;
        let side = 2 * levels.n_half + 1;
        for day in &levels.eta {
            check_len(side * side, day.len())?;
        }
        Ok(levels)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_string(path, &serde_json::to_string(self)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WarmStart {
    /// Start each day from the previous day's surface.
    PreviousDay,
    /// Start each day from the refined levels of a run at half the grid size.
    RefinedCoarse(PathBuf),
}

impl std::str::FromStr for WarmStart {
    type Err = Error;

    /// `previous-day` or `refine:<path>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "previous-day" => Ok(WarmStart::PreviousDay),
            _ => match s.strip_prefix("refine:") {
                Some(path) if !path.is_empty() => Ok(WarmStart::RefinedCoarse(PathBuf::from(path))),
                _ => Err(Error::UnknownName(s.to_string())),
            },
        }
    }
}

/// Runs `cfg.days` days from `η = 0`. The result holds days `1..=cfg.days`.
pub fn run_simulation(
    cfg: &AquiferConfig,
    method: Method,
    warm_start: &WarmStart,
    opts: &SolveOptions,
) -> Result<Vec<DayResult>> {
    cfg.validate()?;
    let coarse = match warm_start {
        WarmStart::PreviousDay => None,
        WarmStart::RefinedCoarse(path) => {
            let levels = Levels::read(path)?;
            if 2 * levels.n_half != cfg.n_half {
                return Err(Error::InvalidArgument(format!(
                    "levels in {} are for N={}, expected N={}",
                    path.display(),
                    levels.n_half,
                    cfg.n_half / 2
                )));
            }
            Some(levels)
        }
    };
    let mut state = AquiferState::initial(cfg);
    let mut out = Vec::with_capacity(cfg.days);
    for day in 1..=cfg.days {
        let x0 = match coarse.as_ref().and_then(|c| c.eta.get(day)) {
            Some(eta) => {
                let eta = interpolate_refine(eta, cfg.n_half / 2)?;
                Some(state.h.iter().zip(&eta).map(|(h, e)| h + e).collect::<Vec<_>>())
            }
            None => None,
        };
        let result = step_day(cfg, &state, method, x0.as_deref(), opts)?;
        state = result.state.clone();
        out.push(result);
    }
    Ok(out)
}

/// Writes the vertical cut `y = 0`: columns `x`, `bottom` (`−h`) and the
/// surface elevation `H − h` for each state given.
pub fn write_radial_profile(path: &Path, cfg: &AquiferConfig, states: &[&AquiferState]) -> Result<()> {
    use crate::bench::csv_error;
    for s in states {
        check_len(cfg.nodes(), s.head.len())?;
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut header = vec!["x".to_string(), "bottom".to_string()];
    header.extend(states.iter().map(|s| format!("day{}", s.day)));
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    let n = cfg.n_half as isize;
    for i in -n..=n {
        let k = cfg.index(i, 0);
        let bottom = -states.first().map_or_else(|| bottom_elevation(cfg)[k], |s| s.h[k]);
        let mut row = vec![cfg.coordinate(i).to_string(), bottom.to_string()];
        row.extend(states.iter().map(|s| (s.head[k] - s.h[k]).to_string()));
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
