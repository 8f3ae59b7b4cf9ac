use std::f64::consts::SQRT_2;

use hopf_collapse::collapse::{
    born_probabilities, chsh, collapse_run, collapse_transition, exact_correlation, measure_particle2,
    monte_carlo_correlation_for, singlet, CorrelationMode, ExperimentConfig, Outcome, TransitionReport,
};
use hopf_collapse::connection::{
    chern_report, holonomy, holonomy_ode, phase_distance, LatitudeLoop, LineBundleModel, HOLONOMY_SIGN,
};
use hopf_collapse::exec::with_workers;
use hopf_collapse::hopf::{bloch_point, hopf_project, inclusion_square_defect};
use hopf_collapse::ray::Direction;
use hopf_collapse::{rng, Execution, DEFAULT_TOL};
use serde::Serialize;

use crate::args::{
    BundleKind, ChernArgs, ChshArgs, CollapseArgs, FibrationArgs, Format, HolonomyArgs, ReplayArgs, SweepArgs,
};
use crate::manifest::sha256_hex;
use crate::{read_manifest, to_json, Cli, CliError, Command, Envelope, RunOutput, REPORT_SCHEMA, VERSION};

/// Statistical checks pass within this many standard errors.
const SIGMA_BOUND: f64 = 5.0;
const HOLONOMY_TOL: f64 = 1e-6;
/// Stream offset between rows of a correlation sweep.
const ROW_STREAM_STRIDE: u64 = 1 << 40;

pub(crate) fn dispatch(cli: &Cli) -> Result<RunOutput, CliError> {
    if let Command::Schema = cli.command {
        return Ok(RunOutput {
            body: REPORT_SCHEMA.to_string(),
            passed: true,
            warnings: Vec::new(),
        });
    }
    if let Command::Replay(args) = &cli.command {
        return replay(cli, args);
    }
    let ctx = Ctx { cli };
    with_workers(cli.global.workers, |exec| match &cli.command {
        Command::FibrationCheck(a) => fibration_check(&ctx, a, exec),
        Command::Collapse(a) => collapse(&ctx, a, exec),
        Command::CorrelationSweep(a) => correlation_sweep(&ctx, a, exec),
        Command::Chsh(a) => chsh_cmd(&ctx, a, exec),
        Command::Holonomy(a) => holonomy_cmd(&ctx, a),
        Command::Chern(a) => chern_cmd(&ctx, a, exec),
        Command::Replay(_) | Command::Schema => unreachable!(),
    })?
}

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn tolerance(&self, default: f64) -> Result<f64, CliError> {
        match self.cli.global.tolerance {
            Some(t) if !(t.is_finite() && t >= 0.0) => Err(CliError::Usage(format!("tolerance must be finite and >= 0, got {t}"))),
            Some(t) => Ok(t),
            None => Ok(default),
        }
    }

    fn report<T: Serialize>(&self, tolerance: f64, passed: bool, result: T, warnings: Vec<String>) -> Result<RunOutput, CliError> {
        let parameters = match serde_json::to_value(&self.cli.command)? {
            serde_json::Value::Object(map) => map.into_iter().next().map(|(_, v)| v).unwrap_or_default(),
            other => other,
        };
        let seed = self.cli.command.seed();
        let envelope = Envelope {
            command: self.cli.command.name(),
            version: VERSION,
            parameters,
            seed,
            rng: seed.map(|_| rng::GENERATOR),
            tolerance,
            passed,
            result,
        };
        Ok(RunOutput {
            body: to_json(&envelope, self.cli.global.compact)?,
            passed,
            warnings,
        })
    }
}

fn axis_from(v: &[f64], warnings: &mut Vec<String>) -> Result<Direction, CliError> {
    let [x, y, z] = v else {
        return Err(CliError::Usage(format!("axis needs 3 components, got {}", v.len())));
    };
    let axis = Direction::normalize(*x, *y, *z)?;
    let norm = (x * x + y * y + z * z).sqrt();
    if (norm - 1.0).abs() > DEFAULT_TOL {
        warnings.push(format!("axis ({x}, {y}, {z}) has norm {norm}; normalized"));
    }
    Ok(axis)
}

fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct FibrationResult {
    n: u32,
    trials: u64,
    fibration_max_deviation: f64,
    inclusion_square_max_deviation: f64,
    collapse_square_max_deviation: Option<f64>,
}

fn fibration_check(ctx: &Ctx, a: &FibrationArgs, exec: Execution) -> Result<RunOutput, CliError> {
    let tol = ctx.tolerance(DEFAULT_TOL)?;
    let dim = a.n as usize;
    let trials = exec.map_indexed(a.trials as usize, |i| -> hopf_collapse::Result<[f64; 3]> {
        let mut r = rng::stream(a.seed, i as u64);
        let z = rng::state(&mut r, dim);
        let rho = rng::phase(&mut r);
        let fib = hopf_project(&z).max_abs_diff(&hopf_project(&z.phase_shift(rho)));
        let w = rng::state(&mut r, 2);
        let square = inclusion_square_defect(&w)?;
        let collapse = if dim == 4 {
            let axis = rng::direction(&mut r);
            let record = measure_particle2(&singlet(), &axis, rng::uniform(&mut r))?;
            collapse_transition(&record)?.diagram_deviation
        } else {
            0.0
        };
        Ok([fib, square, collapse])
    });
    let mut max = [0.0f64; 3];
    for t in trials {
        let t = t?;
        for k in 0..3 {
            max[k] = max[k].max(t[k]);
        }
    }
    let passed = max.iter().all(|&d| d <= tol);
    let result = FibrationResult {
        n: a.n,
        trials: a.trials,
        fibration_max_deviation: max[0],
        inclusion_square_max_deviation: max[1],
        collapse_square_max_deviation: (dim == 4).then_some(max[2]),
    };
    ctx.report(tol, passed, result, Vec::new())
}

#[derive(Serialize)]
struct CollapseEvent {
    shot: u64,
    outcome: Outcome,
    jump_distance: f64,
    commutes: bool,
}

#[derive(Serialize)]
struct Branch<'a> {
    outcome: Outcome,
    probability: f64,
    count: u64,
    frequency: f64,
    /// Bloch vector of the effective post-measurement ray of particle 1.
    bloch: Direction,
    transition: &'a TransitionReport,
}

#[derive(Serialize)]
struct CollapseResult<'a> {
    axis: Direction,
    shots: u64,
    branches: [Branch<'a>; 2],
    frequency_deviation: f64,
    frequency_stderr: f64,
    mean_jump_distance: f64,
    all_commute: bool,
    events: Vec<CollapseEvent>,
}

fn collapse(ctx: &Ctx, a: &CollapseArgs, exec: Execution) -> Result<RunOutput, CliError> {
    let mut warnings = Vec::new();
    let axis = axis_from(&a.axis, &mut warnings)?;
    let run = collapse_run(&axis, a.shots, a.seed, DEFAULT_TOL, exec)?;
    let (p_up, p_down) = born_probabilities(&singlet(), &axis)?;
    let n = a.shots as f64;
    let stderr = (p_up * p_down / n).sqrt();
    let freq_up = run.count(Outcome::Up) as f64 / n;
    let deviation = (freq_up - p_up).abs();
    let tol = ctx.tolerance(SIGMA_BOUND * stderr)?;
    let all_commute = run.branches_up.commutes && run.branches_down.commutes;
    let passed = all_commute && deviation <= tol;

    let branch = |outcome, probability| -> Result<Branch<'_>, CliError> {
        let transition = run.report(outcome);
        Ok(Branch {
            outcome,
            probability,
            count: run.count(outcome),
            frequency: run.count(outcome) as f64 / n,
            bloch: bloch_point(&transition.post_effective_ray)?,
            transition,
        })
    };
    let branches = [branch(Outcome::Up, p_up)?, branch(Outcome::Down, p_down)?];
    let mean_jump = branches
        .iter()
        .map(|b| b.count as f64 * b.transition.jump_distance)
        .sum::<f64>()
        / n;

    match a.format {
        Format::Json => {
            let events = run
                .outcomes
                .iter()
                .enumerate()
                .map(|(i, &o)| {
                    let t = run.report(o);
                    CollapseEvent {
                        shot: i as u64,
                        outcome: o,
                        jump_distance: t.jump_distance,
                        commutes: t.commutes,
                    }
                })
                .collect();
            let result = CollapseResult {
                axis,
                shots: a.shots,
                branches,
                frequency_deviation: deviation,
                frequency_stderr: stderr,
                mean_jump_distance: mean_jump,
                all_commute,
                events,
            };
            ctx.report(tol, passed, result, warnings)
        }
        Format::Csv => {
            let mut body = String::from("shot,outcome,bloch_x,bloch_y,bloch_z,jump_distance,commutes\n");
            let rows: Vec<String> = branches
                .iter()
                .map(|b| {
                    let [x, y, z] = b.bloch.as_array();
                    [csv_float(x), csv_float(y), csv_float(z), csv_float(b.transition.jump_distance)].join(",")
                        + &format!(",{}", b.transition.commutes)
                })
                .collect();
            for (i, o) in run.outcomes.iter().enumerate() {
                let (label, row) = match o {
                    Outcome::Up => ("+1/2", &rows[0]),
                    Outcome::Down => ("-1/2", &rows[1]),
                };
                body.push_str(&format!("{i},{label},{row}\n"));
            }
            warnings.push(format!(
                "frequency(+1/2) = {freq_up} (p = {p_up}, deviation {deviation:.3e}, tolerance {tol:.3e}), mean jump {mean_jump}"
            ));
            Ok(RunOutput { body, passed, warnings })
        }
    }
}

fn correlation_sweep(ctx: &Ctx, a: &SweepArgs, exec: Execution) -> Result<RunOutput, CliError> {
    let thetas: Vec<f64> = match &a.thetas {
        Some(t) => t.clone(),
        None => match a.points {
            0 => Vec::new(),
            1 => vec![a.theta_min],
            p => (0..p)
                .map(|i| a.theta_min + (a.theta_max - a.theta_min) * i as f64 / (p - 1) as f64)
                .collect(),
        },
    };
    if thetas.is_empty() {
        return Err(CliError::Usage("empty angle grid".into()));
    }
    if let Some(bad) = thetas.iter().find(|t| !t.is_finite()) {
        return Err(CliError::Usage(format!("non-finite angle {bad}")));
    }
    let shots = if a.exact { None } else { a.shots };
    let mut passed = true;
    let mut warnings = Vec::new();
    let mut body = String::from("theta_rad,E_exact,E_mc,mc_stderr\n");
    let psi = singlet();
    for (row, &theta) in thetas.iter().enumerate() {
        let b = Direction::in_xz_plane(theta);
        let exact = exact_correlation(&psi, &Direction::Z, &b)?;
        if (exact + theta.cos()).abs() > DEFAULT_TOL {
            passed = false;
            warnings.push(format!("theta {theta}: exact correlation {exact} differs from -cos(theta)"));
        }
        let (mc, se) = match shots {
            Some(shots) => {
                let config = ExperimentConfig {
                    axis_a: Direction::Z,
                    axis_b: b,
                    shots,
                    seed: a.seed,
                };
                let est = monte_carlo_correlation_for(&psi, &config, row as u64 * ROW_STREAM_STRIDE, exec)?;
                let tol = ctx.tolerance(SIGMA_BOUND * est.stderr + DEFAULT_TOL)?;
                if (est.mean - exact).abs() > tol {
                    passed = false;
                    warnings.push(format!("theta {theta}: Monte Carlo {} outside {tol:.3e} of {exact}", est.mean));
                }
                (csv_float(est.mean), csv_float(est.stderr))
            }
            None => (String::new(), String::new()),
        };
        body.push_str(&format!("{},{},{mc},{se}\n", csv_float(theta), csv_float(exact)));
    }
    Ok(RunOutput { body, passed, warnings })
}

#[derive(Serialize)]
struct ChshResult {
    mode: &'static str,
    shots: Option<u64>,
    s: f64,
    /// `E(a,b), E(a,b'), E(a',b), E(a',b')`.
    correlations: [f64; 4],
    stderr: f64,
    /// `S` from `E = -a.b`.
    s_expected: f64,
    deviation: f64,
    classical_bound: f64,
    quantum_bound: f64,
    violates_classical_bound: bool,
}

fn chsh_cmd(ctx: &Ctx, a: &ChshArgs, exec: Execution) -> Result<RunOutput, CliError> {
    let [pa, pap, pb, pbp] = a.angles[..] else {
        return Err(CliError::Usage(format!("chsh needs 4 angles, got {}", a.angles.len())));
    };
    let [da, dap, db, dbp] = [pa, pap, pb, pbp].map(Direction::in_xz_plane);
    let e = |x: f64, y: f64| -(x - y).cos();
    let s_expected = (e(pa, pb) - e(pa, pbp)).abs() + (e(pap, pb) + e(pap, pbp)).abs();
    let shots = if a.exact { None } else { a.shots };
    let mode = match shots {
        Some(shots) => CorrelationMode::MonteCarlo { shots, seed: a.seed },
        None => CorrelationMode::Exact,
    };
    let report = chsh(&da, &dap, &db, &dbp, mode, exec)?;
    let deviation = (report.s - s_expected).abs();
    let tol = match shots {
        Some(_) => ctx.tolerance(SIGMA_BOUND * report.stderr + DEFAULT_TOL)?,
        None => ctx.tolerance(DEFAULT_TOL)?,
    };
    let result = ChshResult {
        mode: if shots.is_some() { "monte-carlo" } else { "exact" },
        shots,
        s: report.s,
        correlations: report.correlations,
        stderr: report.stderr,
        s_expected,
        deviation,
        classical_bound: 2.0,
        quantum_bound: 2.0 * SQRT_2,
        violates_classical_bound: report.s > 2.0,
    };
    ctx.report(tol, deviation <= tol, result, Vec::new())
}

#[derive(Serialize)]
struct HolonomyResult {
    axis: Direction,
    theta: f64,
    steps: u64,
    solid_angle: f64,
    sign: f64,
    expected: f64,
    discrete: f64,
    discrete_error: f64,
    rk4: f64,
    rk4_error: f64,
}

fn holonomy_cmd(ctx: &Ctx, a: &HolonomyArgs) -> Result<RunOutput, CliError> {
    let mut warnings = Vec::new();
    let axis = axis_from(&a.axis, &mut warnings)?;
    let tol = ctx.tolerance(HOLONOMY_TOL)?;
    let l = LatitudeLoop::new(axis, a.theta, a.steps as usize)?;
    let expected = l.expected_holonomy();
    let discrete = holonomy(&l.path())?;
    let rk4 = holonomy_ode(&l, a.steps as usize)?;
    let result = HolonomyResult {
        axis,
        theta: a.theta,
        steps: a.steps,
        solid_angle: l.solid_angle(),
        sign: HOLONOMY_SIGN,
        expected,
        discrete,
        discrete_error: phase_distance(discrete, expected),
        rk4,
        rk4_error: phase_distance(rk4, expected),
    };
    let passed = result.discrete_error <= tol;
    ctx.report(tol, passed, result, warnings)
}

#[derive(Serialize)]
struct ChernResult {
    bundle: BundleKind,
    k: Option<i32>,
    mesh: usize,
    chern: i64,
    flux: f64,
    max_plaquette_phase: f64,
    expected: i64,
}

fn chern_cmd(ctx: &Ctx, a: &ChernArgs, exec: Execution) -> Result<RunOutput, CliError> {
    let model = match a.bundle {
        BundleKind::Trivial => LineBundleModel::Trivial,
        BundleKind::Tautological => LineBundleModel::Tautological,
        BundleKind::Dual => LineBundleModel::Dual,
        BundleKind::Power => LineBundleModel::Power(a.k),
    };
    let report = chern_report(&model, a.mesh, exec)?;
    let expected = model.degree();
    let result = ChernResult {
        bundle: a.bundle,
        k: matches!(a.bundle, BundleKind::Power).then_some(a.k),
        mesh: report.mesh,
        chern: report.chern,
        flux: report.flux,
        max_plaquette_phase: report.max_plaquette_phase,
        expected,
    };
    ctx.report(0.0, report.chern == expected, result, Vec::new())
}

#[derive(Serialize)]
struct ReplayResult<'a> {
    command: &'a str,
    manifest: String,
    workers: usize,
    expected_sha256: &'a str,
    actual_sha256: String,
    expected_bytes: usize,
    actual_bytes: usize,
    identical: bool,
}

fn replay(cli: &Cli, a: &ReplayArgs) -> Result<RunOutput, CliError> {
    let manifest = read_manifest(&a.manifest_path)?;
    if manifest.version != VERSION {
        return Err(CliError::Usage(format!(
            "manifest was written by version {}, this is {VERSION}",
            manifest.version
        )));
    }
    let mut again = manifest.invocation.clone();
    again.global.out = None;
    again.global.manifest = None;
    again.global.workers = cli.global.workers;
    let output = dispatch(&again)?;
    let actual = sha256_hex(output.body.as_bytes());
    let identical = actual == manifest.output_sha256 && output.body.len() == manifest.output_bytes;
    let result = ReplayResult {
        command: &manifest.command,
        manifest: a.manifest_path.display().to_string(),
        workers: cli.global.workers,
        expected_sha256: &manifest.output_sha256,
        actual_sha256: actual,
        expected_bytes: manifest.output_bytes,
        actual_bytes: output.body.len(),
        identical,
    };
    let envelope = Envelope {
        command: "replay",
        version: VERSION,
        parameters: serde_json::to_value(&manifest.invocation)?,
        seed: manifest.seed,
        rng: manifest.seed.map(|_| rng::GENERATOR),
        tolerance: 0.0,
        passed: identical,
        result,
    };
    Ok(RunOutput {
        body: to_json(&envelope, cli.global.compact)?,
        passed: identical,
        warnings: output.warnings,
    })
}
