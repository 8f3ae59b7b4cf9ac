//! Singlet preparation, projective spin measurement on one particle, and the
//! bundle change `S⁷ → ℂP³` to `S³ → ℂP¹` that each collapse event realizes.
//!
//! Outcome `±½` of particle 2 along `n̂` leaves the pair in the product state
//! `φ ⊗ χ±` with `χ± = spinor_of(n̂, ±)`; for the singlet `φ = χ∓`. The
//! effective post-measurement state is the particle-1 factor `φ ∈ S³`; the
//! partner spinor is kept in the record.
//!
//! Monte Carlo runs precompute the (deterministic) branch data once and then
//! only compare uniform draws against Born probabilities, block by block.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hopf::{hopf_project, include_ray};
use crate::ray::{
    fubini_study_distance, gauge_fix, inner, norm_sq, spinor_of, tensor_product, Direction, Ray,
    Sign, StateVector,
};
use crate::rng::{self, SHOTS_PER_BLOCK};
use crate::DEFAULT_TOL;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `(↑⊗↓ − ↓⊗↑)/√2 = (0, 1/√2, −1/√2, 0)`.
pub fn singlet() -> StateVector {
    StateVector::from_real(&[0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]).expect("unit vector")
}

/// Exchange the two tensor factors of a two-qubit state.
pub fn swap_factors(state: &StateVector) -> StateVector {
    let c = state.components();
    StateVector::new(vec![c[0], c[2], c[1], c[3]]).expect("permutation keeps the norm")
}

/// Schmidt coefficients `(σ₁, σ₂)`, `σ₁ ≥ σ₂`, of a two-qubit state.
pub fn schmidt_coefficients(state: &StateVector) -> (f64, f64) {
    let c = state.components();
    let frob = norm_sq(c);
    let det = (c[0] * c[3] - c[1] * c[2]).norm();
    let disc = (frob * frob - 4.0 * det * det).max(0.0).sqrt();
    let s1 = ((frob + disc) / 2.0).sqrt();
    let s2 = ((frob - disc) / 2.0).max(0.0).sqrt();
    (s1, s2)
}

/// Unitary `(1 ⊗ U₂)` acting on a two-qubit vector; `u` is row-major 2×2.
fn apply_second(u: &[Complex64; 4], v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; 4];
    for i in 0..2 {
        for j in 0..2 {
            out[2 * i + j] = u[2 * j] * v[2 * i] + u[2 * j + 1] * v[2 * i + 1];
        }
    }
    out
}

/// Spin projection outcome of a measurement along an axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+1/2")]
    Up,
    #[serde(rename = "-1/2")]
    Down,
}

impl Outcome {
    /// Spin projection in units of ħ.
    pub fn spin(self) -> f64 {
        self.sign().value() / 2.0
    }

    /// `±1`, the CHSH convention.
    pub fn sign(self) -> Sign {
        match self {
            Outcome::Up => Sign::Plus,
            Outcome::Down => Sign::Minus,
        }
    }
}

/// Born probabilities `p(±½) = ‖(1 ⊗ Π±)ψ‖²` for particle 2 along `axis`.
pub fn born_probabilities(state: &StateVector, axis: &Direction) -> Result<(f64, f64)> {
    check_two_qubit(state)?;
    let plus = spinor_of(axis, Sign::Plus);
    let minus = spinor_of(axis, Sign::Minus);
    Ok((
        norm_sq(&contract_second(state, &plus)),
        norm_sq(&contract_second(state, &minus)),
    ))
}

/// `(1 ⊗ χ†)ψ`: the unnormalized particle-1 factor after projecting particle 2 on `χ`.
fn contract_second(state: &StateVector, chi: &StateVector) -> Vec<Complex64> {
    let c = state.components();
    let x = chi.components();
    (0..2)
        .map(|i| x[0].conj() * c[2 * i] + x[1].conj() * c[2 * i + 1])
        .collect()
}

fn check_two_qubit(state: &StateVector) -> Result<()> {
    if state.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: state.dim(),
        });
    }
    Ok(())
}

/// One collapse event.
#[derive(Clone, Debug, Serialize)]
pub struct MeasurementRecord {
    pub axis: Direction,
    pub outcome: Outcome,
    /// Born probability of the observed outcome.
    pub probability: f64,
    pub pre_ray: Ray,
    pub post_product_state: StateVector,
    /// Ray of the surviving particle in ℂP¹.
    pub post_effective_ray: Ray,
    /// `post_effective_ray` carried into ℂP³ by [`align_embedding`].
    pub embedded_post_ray: Ray,
    /// Spinor of the measured particle, `spinor_of(axis, outcome)`.
    pub partner_spinor: StateVector,
}

/// Measure particle 2 along `axis`; `draw < p(+½)` selects `+½`.
pub fn measure_particle2(state: &StateVector, axis: &Direction, draw: f64) -> Result<MeasurementRecord> {
    let branches = Branches::new(state, axis)?;
    Ok(branches.select(draw).clone())
}

/// Measure particle 1 by exchanging the factors and measuring particle 2.
/// The returned states are swapped back so particle 1 is again the first
/// factor; `post_effective_ray` is then the ray of particle 2.
pub fn measure_particle1(state: &StateVector, axis: &Direction, draw: f64) -> Result<MeasurementRecord> {
    check_two_qubit(state)?;
    let mut record = measure_particle2(&swap_factors(state), axis, draw)?;
    record.pre_ray = hopf_project(state);
    record.post_product_state = swap_factors(&record.post_product_state);
    record.embedded_post_ray = swap_ray(&record.embedded_post_ray);
    Ok(record)
}

/// `SWAP·P·SWAP` for a two-qubit ray.
pub fn swap_ray(p: &Ray) -> Ray {
    const PERM: [usize; 4] = [0, 2, 1, 3];
    let m = (0..16).map(|k| p.entry(PERM[k / 4], PERM[k % 4])).collect();
    Ray::from_projector(4, m, f64::INFINITY).expect("4x4 shape")
}

/// Both possible collapse records for a fixed state and axis.
#[derive(Clone, Debug)]
pub struct Branches {
    pub up: MeasurementRecord,
    pub down: MeasurementRecord,
}

impl Branches {
    pub fn new(state: &StateVector, axis: &Direction) -> Result<Self> {
        check_two_qubit(state)?;
        let pre_ray = hopf_project(state);
        let build = |outcome: Outcome| -> Result<MeasurementRecord> {
            let chi = spinor_of(axis, outcome.sign());
            let mut phi = contract_second(state, &chi);
            let probability = norm_sq(&phi);
            let effective = if probability > 0.0 {
                gauge_fix(&mut phi);
                StateVector::normalize(phi)?
            } else {
                // unreachable branch; any particle-1 state is a valid placeholder
                StateVector::up()
            };
            let post_effective_ray = hopf_project(&effective);
            Ok(MeasurementRecord {
                axis: *axis,
                outcome,
                probability,
                pre_ray: pre_ray.clone(),
                post_product_state: tensor_product(&effective, &chi),
                embedded_post_ray: align_embedding(axis, outcome, &post_effective_ray)?,
                post_effective_ray,
                partner_spinor: chi,
            })
        };
        Ok(Self {
            up: build(Outcome::Up)?,
            down: build(Outcome::Down)?,
        })
    }

    pub fn p_up(&self) -> f64 {
        self.up.probability
    }

    pub fn select(&self, draw: f64) -> &MeasurementRecord {
        if draw < self.up.probability {
            &self.up
        } else {
            &self.down
        }
    }
}

/// Carry a particle-1 ray into ℂP³ through the block inclusion conjugated by
/// `W = (1 ⊗ U(n̂)Xᵇ)·SWAP`, where `U(n̂)` has columns `(spinor(n̂,+), spinor(n̂,−))`
/// and `b = 1` for outcome `−½`. `W` sends `(z₁, z₂, 0, 0) = ↑ ⊗ z` to
/// `z ⊗ spinor(n̂, outcome)`, so the post-collapse product ray lands in the
/// embedded ℂP¹.
pub fn align_embedding(axis: &Direction, outcome: Outcome, effective: &Ray) -> Result<Ray> {
    let block = include_ray(effective)?;
    let w = alignment_unitary(axis, outcome);
    // W P W†
    let n = 4;
    let mut wp = vec![ZERO; 16];
    for i in 0..n {
        for j in 0..n {
            wp[i * n + j] = (0..n).map(|k| w[i * n + k] * block.entry(k, j)).sum();
        }
    }
    let mut out = vec![ZERO; 16];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).map(|k| wp[i * n + k] * w[j * n + k].conj()).sum();
        }
    }
    Ray::from_projector(4, out, 1e-10)
}

/// The 4×4 unitary used by [`align_embedding`], row-major.
pub fn alignment_unitary(axis: &Direction, outcome: Outcome) -> Vec<Complex64> {
    let (first, second) = match outcome {
        Outcome::Up => (Sign::Plus, Sign::Minus),
        Outcome::Down => (Sign::Minus, Sign::Plus),
    };
    let a = spinor_of(axis, first).into_components();
    let b = spinor_of(axis, second).into_components();
    // U(n̂)Xᵇ with columns (spinor(outcome), spinor(−outcome))
    let u = [a[0], b[0], a[1], b[1]];
    // columns of SWAP are the basis vectors e₀, e₂, e₁, e₃
    let swap_cols = [0usize, 2, 1, 3];
    let mut w = vec![ZERO; 16];
    for (col, &k) in swap_cols.iter().enumerate() {
        let mut e = vec![ZERO; 4];
        e[k] = Complex64::new(1.0, 0.0);
        let image = apply_second(&u, &e);
        for row in 0..4 {
            w[row * 4 + col] = image[row];
        }
    }
    w
}

/// The collapse square for one event.
#[derive(Clone, Debug, Serialize)]
pub struct TransitionReport {
    pub pre_ray: Ray,
    pub post_effective_ray: Ray,
    pub embedded_post_ray: Ray,
    /// Fubini-Study distance from the pre-measurement ray to the branch ray.
    pub jump_distance: f64,
    /// Max deviation between the embedded and directly projected post rays.
    pub diagram_deviation: f64,
    pub commutes: bool,
}

pub fn collapse_transition(record: &MeasurementRecord) -> Result<TransitionReport> {
    collapse_transition_with_tolerance(record, DEFAULT_TOL)
}

pub fn collapse_transition_with_tolerance(record: &MeasurementRecord, tol: f64) -> Result<TransitionReport> {
    let dims = [
        record.pre_ray.dim(),
        record.post_product_state.dim(),
        record.post_effective_ray.dim(),
        record.embedded_post_ray.dim(),
    ];
    if dims != [4, 4, 2, 4] {
        return Err(Error::InconsistentRecord(format!(
            "dimensions (pre, post, effective, embedded) = {dims:?}, expected [4, 4, 2, 4]"
        )));
    }
    let direct = hopf_project(&record.post_product_state);
    let diagram_deviation = record.embedded_post_ray.max_abs_diff(&direct);
    Ok(TransitionReport {
        pre_ray: record.pre_ray.clone(),
        post_effective_ray: record.post_effective_ray.clone(),
        embedded_post_ray: record.embedded_post_ray.clone(),
        jump_distance: fubini_study_distance(&record.pre_ray, &direct)?,
        diagram_deviation,
        commutes: diagram_deviation <= tol,
    })
}

/// Settings for a two-analyzer run on the singlet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub axis_a: Direction,
    pub axis_b: Direction,
    pub shots: u64,
    pub seed: u64,
}

/// Joint probabilities `p[s][t]` for particle 1 along `a` (index 0 = `+½`)
/// and particle 2 along `b`, by the Born rule on the product projector.
pub fn joint_probabilities(state: &StateVector, a: &Direction, b: &Direction) -> Result<[[f64; 2]; 2]> {
    check_two_qubit(state)?;
    let mut p = [[0.0; 2]; 2];
    for (s, sa) in [Sign::Plus, Sign::Minus].into_iter().enumerate() {
        for (t, sb) in [Sign::Plus, Sign::Minus].into_iter().enumerate() {
            let chi = tensor_product(&spinor_of(a, sa), &spinor_of(b, sb));
            p[s][t] = inner(chi.components(), state.components()).norm_sqr();
        }
    }
    Ok(p)
}

/// `E(a, b) = Σ s t p(s, t)` for the given two-qubit state.
pub fn exact_correlation(state: &StateVector, a: &Direction, b: &Direction) -> Result<f64> {
    let p = joint_probabilities(state, a, b)?;
    Ok(p[0][0] - p[0][1] - p[1][0] + p[1][1])
}

/// Monte Carlo estimate of a correlation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub shots: u64,
    /// Counts indexed `[particle-1 outcome][particle-2 outcome]`, 0 = `+½`.
    pub counts: [[u64; 2]; 2],
}

/// Sequential measurement tree: particle 1 along `a`, then particle 2 along `b`
/// on the collapsed state.
struct CorrelationTree {
    p_first_up: f64,
    p_second_up: [f64; 2],
}

impl CorrelationTree {
    fn new(state: &StateVector, a: &Direction, b: &Direction) -> Result<Self> {
        let first = Branches::new(&swap_factors(state), a)?;
        let mut p_second_up = [0.0; 2];
        for (k, rec) in [&first.up, &first.down].into_iter().enumerate() {
            // back in (particle 1, particle 2) order
            let post = swap_factors(&rec.post_product_state);
            p_second_up[k] = born_probabilities(&post, b)?.0;
        }
        Ok(Self {
            p_first_up: first.p_up(),
            p_second_up,
        })
    }

    fn run_block<R: Rng>(&self, rng: &mut R, shots: u64) -> [[u64; 2]; 2] {
        let mut counts = [[0u64; 2]; 2];
        for _ in 0..shots {
            let s = usize::from(rng::uniform(rng) >= self.p_first_up);
            let t = usize::from(rng::uniform(rng) >= self.p_second_up[s]);
            counts[s][t] += 1;
        }
        counts
    }
}

/// Per-block shot counts for `shots` split into [`SHOTS_PER_BLOCK`] blocks.
pub fn block_sizes(shots: u64) -> Vec<u64> {
    let full = shots / SHOTS_PER_BLOCK;
    let rest = shots % SHOTS_PER_BLOCK;
    let mut sizes = vec![SHOTS_PER_BLOCK; full as usize];
    if rest > 0 {
        sizes.push(rest);
    }
    sizes
}

/// Monte Carlo correlation for an arbitrary two-qubit state. Block `k` uses
/// ChaCha stream `stream_base + k`.
pub fn monte_carlo_correlation_for(
    state: &StateVector,
    config: &ExperimentConfig,
    stream_base: u64,
    exec: Execution,
) -> Result<CorrelationEstimate> {
    if config.shots == 0 {
        return Err(Error::ZeroShots);
    }
    let tree = CorrelationTree::new(state, &config.axis_a, &config.axis_b)?;
    let sizes = block_sizes(config.shots);
    let blocks = exec.map_indexed(sizes.len(), |k| {
        let mut rng = rng::stream(config.seed, stream_base + k as u64);
        tree.run_block(&mut rng, sizes[k])
    });
    let mut counts = [[0u64; 2]; 2];
    for b in &blocks {
        for s in 0..2 {
            for t in 0..2 {
                counts[s][t] += b[s][t];
            }
        }
    }
    let n = config.shots as f64;
    let same = (counts[0][0] + counts[1][1]) as f64;
    let mean = (2.0 * same - n) / n;
    let stderr = ((1.0 - mean * mean).max(0.0) / n).sqrt();
    Ok(CorrelationEstimate {
        mean,
        stderr,
        shots: config.shots,
        counts,
    })
}

pub fn monte_carlo_correlation(config: &ExperimentConfig, exec: Execution) -> Result<CorrelationEstimate> {
    monte_carlo_correlation_for(&singlet(), config, 0, exec)
}

/// How correlations are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrelationMode {
    Exact,
    MonteCarlo { shots: u64, seed: u64 },
}

/// Singlet correlation `E(a, b)`, ±1 per outcome.
pub fn correlation(a: &Direction, b: &Direction, mode: CorrelationMode, exec: Execution) -> Result<f64> {
    match mode {
        CorrelationMode::Exact => exact_correlation(&singlet(), a, b),
        CorrelationMode::MonteCarlo { shots, seed } => {
            let config = ExperimentConfig {
                axis_a: *a,
                axis_b: *b,
                shots,
                seed,
            };
            Ok(monte_carlo_correlation(&config, exec)?.mean)
        }
    }
}

/// CHSH value and its four correlations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChshReport {
    pub s: f64,
    /// `E(a,b), E(a,b′), E(a′,b), E(a′,b′)`.
    pub correlations: [f64; 4],
    /// Propagated standard error (zero in exact mode).
    pub stderr: f64,
}

/// Stream offset between the four CHSH terms in Monte Carlo mode.
const CHSH_STREAM_STRIDE: u64 = 1 << 40;

/// `S = |E(a,b) − E(a,b′)| + |E(a′,b) + E(a′,b′)|`.
pub fn chsh(
    a: &Direction,
    a_prime: &Direction,
    b: &Direction,
    b_prime: &Direction,
    mode: CorrelationMode,
    exec: Execution,
) -> Result<ChshReport> {
    let pairs = [(a, b), (a, b_prime), (a_prime, b), (a_prime, b_prime)];
    let mut correlations = [0.0; 4];
    let mut var = 0.0;
    for (k, (x, y)) in pairs.into_iter().enumerate() {
        match mode {
            CorrelationMode::Exact => correlations[k] = exact_correlation(&singlet(), x, y)?,
            CorrelationMode::MonteCarlo { shots, seed } => {
                let config = ExperimentConfig {
                    axis_a: *x,
                    axis_b: *y,
                    shots,
                    seed,
                };
                let est = monte_carlo_correlation_for(&singlet(), &config, k as u64 * CHSH_STREAM_STRIDE, exec)?;
                correlations[k] = est.mean;
                var += est.stderr * est.stderr;
            }
        }
    }
    let [ab, abp, apb, apbp] = correlations;
    Ok(ChshReport {
        s: (ab - abp).abs() + (apb + apbp).abs(),
        correlations,
        stderr: var.sqrt(),
    })
}

/// Coplanar settings `(0°, 90°, 45°, 135°)` that maximize `S` for the singlet.
pub fn optimal_chsh_axes() -> [Direction; 4] {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    [0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4].map(Direction::in_xz_plane)
}

/// Repeated single-particle measurements of fresh singlets along one axis.
#[derive(Clone, Debug, Serialize)]
pub struct CollapseRun {
    pub outcomes: Vec<Outcome>,
    pub branches_up: TransitionReport,
    pub branches_down: TransitionReport,
}

impl CollapseRun {
    pub fn report(&self, outcome: Outcome) -> &TransitionReport {
        match outcome {
            Outcome::Up => &self.branches_up,
            Outcome::Down => &self.branches_down,
        }
    }

    pub fn count(&self, outcome: Outcome) -> u64 {
        self.outcomes.iter().filter(|&&o| o == outcome).count() as u64
    }
}

/// Measure particle 2 of `shots` fresh singlets along `axis`.
pub fn collapse_run(axis: &Direction, shots: u64, seed: u64, tol: f64, exec: Execution) -> Result<CollapseRun> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let branches = Branches::new(&singlet(), axis)?;
    let sizes = block_sizes(shots);
    let blocks = exec.map_indexed(sizes.len(), |k| {
        let mut rng = rng::stream(seed, k as u64);
        (0..sizes[k])
            .map(|_| branches.select(rng::uniform(&mut rng)).outcome)
            .collect::<Vec<_>>()
    });
    Ok(CollapseRun {
        outcomes: blocks.into_iter().flatten().collect(),
        branches_up: collapse_transition_with_tolerance(&branches.up, tol)?,
        branches_down: collapse_transition_with_tolerance(&branches.down, tol)?,
    })
}
