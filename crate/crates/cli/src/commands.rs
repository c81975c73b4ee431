use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use pwls::analysis::{
    brute_force_solutions, diagonal_classify, is_spd, is_symmetric, sassenfeld, smallest_eigenvalue,
    strong_diagonal_dominance, DiagonalClassification, BRUTE_FORCE_CAP,
};
use pwls::bench::{performance_profile, run_grid, write_profile_csv, write_records_csv, GridSpec};
use pwls::boussinesq::{run_simulation, water_volume, write_radial_profile, AquiferConfig, AquiferState, Levels};
use pwls::generators::{self, canonical, GenSpec};
use pwls::io::{load_problem, read_matrix, read_vector, save_bundle};
use pwls::transforms::{ave_to_pwls, pwls_to_ave, qp_to_pwls, AveProblem, QpProblem};
use pwls::{solve as run_solver, Method, PwlsProblem, SolveOptions, Status};
use serde::Serialize;

use crate::{AnalyzeArgs, BenchArgs, BoussinesqArgs, Conversion, GenerateArgs, Input, SolveArgs, TransformArgs};

pub fn exit_code(status: &Status) -> u8 {
    match status {
        Status::Converged => 0,
        Status::CycleDetected { .. } => 2,
        Status::MaxIterations | Status::Stalled => 3,
        Status::SingularStep { .. } => 4,
    }
}

fn load(input: &Input) -> Result<PwlsProblem> {
    match (&input.manifest, &input.matrix, &input.rhs) {
        (Some(m), _, _) => Ok(load_problem(m)?.0),
        (None, Some(t), Some(b)) => Ok(PwlsProblem::new(read_matrix(t)?, read_vector(b)?)?),
        _ => anyhow::bail!("give --manifest or both --matrix and --rhs"),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn options(tol: f64, max_iter: usize, trace: bool) -> Result<SolveOptions> {
    let opts = SolveOptions {
        tolerance: tol,
        max_iterations: max_iter,
        record_trace: trace,
        ..SolveOptions::default()
    };
    opts.validate()?;
    Ok(opts)
}

pub fn solve(a: SolveArgs) -> Result<u8> {
    let p = load(&a.input)?;
    let x0 = a.x0.as_deref().map(read_vector).transpose()?;
    let opts = options(a.solver.tol, a.solver.max_iter, a.trace)?;
    let report = run_solver(&p, a.solver.method, x0.as_deref(), &opts)?;
    eprintln!(
        "{}: {} after {} iterations, residual {:.3e}",
        report.method,
        report.status.label(),
        report.iterations,
        report.final_residual
    );
    if let Some(path) = &a.out {
        write_json(path, &report)?;
    }
    print_json(&report)?;
    Ok(exit_code(&report.status))
}

#[derive(Serialize)]
struct Analysis {
    n: usize,
    storage: pwls::StorageKind,
    symmetric: bool,
    spd: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    smallest_eigenvalue: Option<f64>,
    sdd: bool,
    dominance_ratio: f64,
    sassenfeld: bool,
    /// Absent when some diagonal entry is zero.
    sassenfeld_beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagonal: Option<DiagonalClassification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solutions: Option<Vec<Vec<f64>>>,
}

pub fn analyze(a: AnalyzeArgs) -> Result<u8> {
    let p = load(&a.input)?;
    let t = p.matrix();
    let symmetric = is_symmetric(t);
    let dominance = strong_diagonal_dominance(t);
    let sass = sassenfeld(t).ok();
    let solutions = if a.brute_force {
        anyhow::ensure!(
            p.n() <= BRUTE_FORCE_CAP,
            "--brute-force needs n ≤ {BRUTE_FORCE_CAP}, got {}",
            p.n()
        );
        Some(brute_force_solutions(&p)?)
    } else {
        None
    };
    let report = Analysis {
        n: p.n(),
        storage: p.storage(),
        symmetric,
        spd: symmetric && is_spd(t),
        smallest_eigenvalue: if symmetric { Some(smallest_eigenvalue(t)?) } else { None },
        sdd: dominance.holds,
        dominance_ratio: dominance.worst_row_ratio,
        sassenfeld: sass.as_ref().is_some_and(|s| s.holds),
        sassenfeld_beta: sass.map(|s| s.beta),
        diagonal: diagonal_classify(t, p.rhs()).ok(),
        solutions,
    };
    eprintln!(
        "n = {}: symmetric {}, spd {}, sdd {}, sassenfeld {}",
        report.n, report.symmetric, report.spd, report.sdd, report.sassenfeld
    );
    print_json(&report)?;
    Ok(0)
}

#[derive(Serialize)]
struct BundleOut {
    manifest: String,
    n: usize,
}

pub fn transform(a: TransformArgs) -> Result<u8> {
    let p = load(&a.input)?;
    let (t, b) = match a.to {
        Conversion::PwlsToAve => {
            let ave = pwls_to_ave(&p);
            (ave.t_hat, ave.b_hat)
        }
        Conversion::AveToPwls => {
            let (t, b) = p.into_parts();
            ave_to_pwls(&AveProblem::new(t, b)?)?.into_parts()
        }
        Conversion::QpToPwls => {
            let (t, b) = p.into_parts();
            qp_to_pwls(&QpProblem::new(t.to_dense(), b)?)?.into_parts()
        }
    };
    // A bundle holds any square matrix with a vector; the conversion fixes its meaning.
    let bundle = PwlsProblem::new(t, b)?;
    let manifest = save_bundle(&a.out, &bundle, None, None)?;
    eprintln!("wrote {}", manifest.display());
    print_json(&BundleOut {
        manifest: manifest.display().to_string(),
        n: bundle.n(),
    })?;
    Ok(0)
}

pub fn generate(a: GenerateArgs) -> Result<u8> {
    let (p, spec, name) = match (&a.canonical, a.kind, a.n) {
        (Some(name), _, _) => (canonical(name)?.problem, None, Some(name.clone())),
        (None, Some(kind), Some(n)) => {
            let mut spec = GenSpec::new(kind, n, a.seed);
            if let Some(d) = a.density {
                spec.density = d;
            }
            (generators::generate(&spec)?, Some(spec), None)
        }
        _ => anyhow::bail!("give --canonical or both --kind and --n"),
    };
    let manifest = save_bundle(&a.out, &p, spec, name)?;
    eprintln!("wrote {}", manifest.display());
    print_json(&BundleOut {
        manifest: manifest.display().to_string(),
        n: p.n(),
    })?;
    Ok(0)
}

#[derive(Serialize)]
struct BenchOut {
    records: Vec<pwls::bench::BenchRecord>,
    profiles: Vec<pwls::bench::ProfileCurve>,
}

pub fn bench(a: BenchArgs) -> Result<u8> {
    let grid = match &a.grid {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("invalid grid spec in {}", path.display()))?
        }
        None => GridSpec {
            kind: a.kind,
            n: a.n,
            count: a.count,
            seed: a.seed,
            density: a.density,
            diag_offset: None,
            offdiag_scale: None,
        },
    };
    let methods = if a.methods.is_empty() {
        Method::ALL.to_vec()
    } else {
        a.methods
    };
    let opts = options(a.tol, a.max_iter, false)?;
    let problems = grid.problems()?;
    let records = run_grid(&problems, &methods, &opts, a.repeats, a.jobs)?;
    let profiles = performance_profile(&records)?;
    for c in &profiles {
        eprintln!(
            "{}: solved {:.3}, best on {:.3}",
            c.method,
            c.solved_fraction(),
            c.rho_at(1.0)
        );
    }
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write_records_csv(&dir.join("records.csv"), &records)?;
        write_profile_csv(&dir.join("profile.csv"), &profiles)?;
    }
    print_json(&BenchOut { records, profiles })?;
    Ok(0)
}

#[derive(Serialize)]
struct DaySummary {
    day: usize,
    volume: f64,
    status: Status,
    iterations: usize,
    final_residual: f64,
    wall_time_s: f64,
    cpu_time_s: f64,
}

#[derive(Serialize)]
struct SimulationOut {
    #[serde(rename = "N")]
    n_half: usize,
    method: Method,
    initial_volume: f64,
    days: Vec<DaySummary>,
}

pub fn boussinesq(a: BoussinesqArgs) -> Result<u8> {
    let cfg = AquiferConfig {
        n_half: a.n_half,
        days: a.days,
        ..AquiferConfig::default()
    };
    let opts = options(a.tol, a.max_iter, false)?;
    let initial = AquiferState::initial(&cfg);
    let results = run_simulation(&cfg, a.method, &a.warm_start, &opts)?;
    let days: Vec<DaySummary> = results
        .iter()
        .map(|d| DaySummary {
            day: d.state.day,
            volume: d.volume,
            status: d.report.status,
            iterations: d.report.iterations,
            final_residual: d.report.final_residual,
            wall_time_s: d.report.wall_time_s,
            cpu_time_s: d.report.cpu_time_s,
        })
        .collect();
    for d in &days {
        eprintln!(
            "day {}: volume {:.1} m³, {} after {} iterations",
            d.day,
            d.volume,
            d.status.label(),
            d.iterations
        );
    }
    let out = SimulationOut {
        n_half: cfg.n_half,
        method: a.method,
        initial_volume: water_volume(&cfg, &initial),
        days,
    };
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write_json(&dir.join("days.json"), &out)?;
        Levels::from_run(&cfg, &results).write(&dir.join("levels.json"))?;
        let mut states = vec![&initial];
        states.extend(results.iter().map(|d| &d.state));
        write_radial_profile(&dir.join("profile.csv"), &cfg, &states)?;
    }
    print_json(&out)?;
    let code = results
        .iter()
        .map(|d| exit_code(&d.report.status))
        .find(|&c| c != 0)
        .unwrap_or(0);
    Ok(code)
}
