//! The connection on `S²ⁿ⁻¹ → ℂPⁿ⁻¹` induced by the Hermitian metric.
//!
//! At `z` the vertical space is `{i t z}` and the horizontal space is the
//! complex orthogonal complement of `z`; the connection form is
//! `ω(X) = ⟨z, X⟩`. Parallel transport along a path of rays is computed two
//! independent ways:
//!
//! * [`parallel_transport`]: per-step projection `zₖ₊₁ ∝ Pₖ₊₁ zₖ`, which keeps
//!   `⟨zₖ, zₖ₊₁⟩` real and positive and converges at `O(steps⁻²)`;
//! * [`transport_ode`]: classical RK4 on `ż = Ṗ(t) z` for a smooth projector
//!   curve `P(t)`.
//!
//! Orientation: latitude loops run counterclockwise seen from the `+axis`
//! pole. With that orientation the holonomy is `−Ω/2` for enclosed solid
//! angle `Ω` ([`HOLONOMY_SIGN`]).
//!
//! Chern numbers use the lattice field strength on a latitude/longitude mesh
//! with triangulated caps and the sign convention `c₁ = (1/2π) Σ hol(∂□)`,
//! which gives the tautological bundle `c₁ = −1` and its dual `+1`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hopf::{include_ray_into, ray_from_bloch};
use crate::ray::{
    fubini_study_distance, inner, kron, norm_sq, spinor_of, Direction, Ray, Sign, StateVector,
};
use crate::DEFAULT_TOL;

/// Sign `s` in `holonomy = s·Ω/2 (mod 2π)` for counterclockwise latitude loops.
pub const HOLONOMY_SIGN: f64 = -1.0;

/// Smallest admissible Chern mesh.
pub const MIN_CHERN_MESH: usize = 8;

/// Tolerance for "start lies over the first path point".
pub const START_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A tangent vector `X` to the sphere at `z`, i.e. `Re⟨z, X⟩ = 0`.
#[derive(Clone, Debug, Serialize)]
pub struct TangentVector {
    base: StateVector,
    vec: Vec<Complex64>,
}

impl TangentVector {
    pub fn new(base: StateVector, vec: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(base, vec, DEFAULT_TOL)
    }

    /// Tangency is checked relative to `max(1, ‖X‖)`.
    pub fn with_tolerance(base: StateVector, vec: Vec<Complex64>, tol: f64) -> Result<Self> {
        if vec.len() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                found: vec.len(),
            });
        }
        let residual = inner(base.components(), &vec).re;
        if residual.abs() > tol * norm_sq(&vec).sqrt().max(1.0) || !residual.is_finite() {
            return Err(Error::NotTangent { residual });
        }
        Ok(Self { base, vec })
    }

    /// Projects an arbitrary `v ∈ ℂⁿ` onto `T_z S²ⁿ⁻¹` by removing `Re⟨z, v⟩ z`.
    pub fn project(base: StateVector, v: &[Complex64]) -> Result<Self> {
        let r = inner(base.components(), v).re;
        let vec = v.iter().zip(base.components()).map(|(x, z)| x - z * r).collect();
        Self::new(base, vec)
    }

    pub fn base(&self) -> &StateVector {
        &self.base
    }

    pub fn vec(&self) -> &[Complex64] {
        &self.vec
    }
}

/// `X = vertical + horizontal` with `vertical ∈ iℝz` and `⟨z, horizontal⟩ = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitTangent {
    pub vertical: Vec<Complex64>,
    pub horizontal: Vec<Complex64>,
}

/// `ω(X) = ⟨z, X⟩`, purely imaginary for tangent `X`.
pub fn connection_form(t: &TangentVector) -> Complex64 {
    // the real part is zero up to the tangency tolerance; drop it
    Complex64::new(0.0, inner(t.base.components(), &t.vec).im)
}

pub fn split_tangent(t: &TangentVector) -> SplitTangent {
    let w = connection_form(t);
    let vertical: Vec<Complex64> = t.base.components().iter().map(|z| w * z).collect();
    let horizontal = t.vec.iter().zip(&vertical).map(|(x, v)| x - v).collect();
    SplitTangent { vertical, horizontal }
}

/// A sampled path in `ℂPⁿ⁻¹`.
#[derive(Clone, Debug)]
pub struct RayPath {
    points: Vec<Ray>,
}

impl RayPath {
    pub fn new(points: Vec<Ray>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyPath)?;
        let dim = first.dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Ray] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// Distance between the first and last point.
    pub fn closure_gap(&self) -> f64 {
        self.points[0].max_abs_diff(self.points.last().expect("nonempty"))
    }

    /// Push every point through `ℂPⁿ⁻¹ ↪ ℂPᵐ⁻¹`.
    pub fn include_into(&self, target: usize) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| include_ray_into(p, target))
            .collect::<Result<_>>()?;
        Ok(Self { points })
    }

    /// Fails if consecutive rays are `π/4` or more apart.
    pub fn check_mesh(&self) -> Result<()> {
        for (index, w) in self.points.windows(2).enumerate() {
            let gap = fubini_study_distance(&w[0], &w[1])?;
            if gap >= FRAC_PI_4 {
                return Err(Error::MeshTooCoarse { index, gap });
            }
        }
        Ok(())
    }
}

/// A smooth curve of rank-one projectors `P(t)`, `t ∈ [0, 1]`.
pub trait ProjectorCurve: Sync {
    fn dim(&self) -> usize;
    fn projector(&self, t: f64) -> Ray;
    /// `dP/dt`, row-major.
    fn derivative(&self, t: f64) -> Vec<Complex64>;
}

/// The circle of Bloch vectors at polar angle `theta` about `axis`,
/// traversed counterclockwise seen from the `+axis` pole.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LatitudeLoop {
    pub axis: Direction,
    pub theta: f64,
    pub steps: usize,
}

impl LatitudeLoop {
    pub fn new(axis: Direction, theta: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::EmptyPath);
        }
        Ok(Self { axis, theta, steps })
    }

    /// Right-handed frame `(e₁, e₂, axis)`.
    fn frame(&self) -> ([f64; 3], [f64; 3]) {
        let a = self.axis;
        // pick the coordinate axis least aligned with `a`
        let helper = if a.x.abs() <= a.y.abs() && a.x.abs() <= a.z.abs() {
            Direction::X
        } else if a.y.abs() <= a.z.abs() {
            Direction::Y
        } else {
            Direction::Z
        };
        let e1 = a.cross(&helper);
        let norm = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
        let e1 = [e1[0] / norm, e1[1] / norm, e1[2] / norm];
        let e1d = Direction { x: e1[0], y: e1[1], z: e1[2] };
        let e2 = a.cross(&e1d);
        (e1, e2)
    }

    /// Bloch vector at azimuth `phi`.
    pub fn direction(&self, phi: f64) -> Direction {
        let (e1, e2) = self.frame();
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let a = self.axis.as_array();
        let v: Vec<f64> = (0..3).map(|k| ct * a[k] + st * (cp * e1[k] + sp * e2[k])).collect();
        Direction { x: v[0], y: v[1], z: v[2] }
    }

    /// `steps + 1` rays with the last equal to the first.
    pub fn path(&self) -> RayPath {
        let mut points: Vec<Ray> = (0..self.steps)
            .map(|k| ray_from_bloch(&self.direction(TAU * k as f64 / self.steps as f64)))
            .collect();
        points.push(points[0].clone());
        RayPath { points }
    }

    /// Enclosed solid angle `2π(1 − cos θ)`.
    pub fn solid_angle(&self) -> f64 {
        TAU * (1.0 - self.theta.cos())
    }

    /// `s·Ω/2` wrapped to `(−π, π]`.
    pub fn expected_holonomy(&self) -> f64 {
        wrap_phase(HOLONOMY_SIGN * self.solid_angle() / 2.0)
    }
}

impl ProjectorCurve for LatitudeLoop {
    fn dim(&self) -> usize {
        2
    }

    fn projector(&self, t: f64) -> Ray {
        ray_from_bloch(&self.direction(TAU * t))
    }

    fn derivative(&self, t: f64) -> Vec<Complex64> {
        // P = ½(1 + n̂·σ⃗)  ⇒  Ṗ = ½ ṅ·σ⃗
        let (e1, e2) = self.frame();
        let st = self.theta.sin();
        let (sp, cp) = (TAU * t).sin_cos();
        let d: Vec<f64> = (0..3).map(|k| 0.5 * TAU * st * (-sp * e1[k] + cp * e2[k])).collect();
        vec![
            Complex64::new(d[2], 0.0),
            Complex64::new(d[0], -d[1]),
            Complex64::new(d[0], d[1]),
            Complex64::new(-d[2], 0.0),
        ]
    }
}

/// A curve in `ℂPⁿ⁻¹` viewed inside `ℂPᵐ⁻¹` through the block inclusion.
pub struct IncludedCurve<'a, C: ProjectorCurve> {
    pub inner: &'a C,
    pub target: usize,
}

impl<C: ProjectorCurve> ProjectorCurve for IncludedCurve<'_, C> {
    fn dim(&self) -> usize {
        self.target
    }

    fn projector(&self, t: f64) -> Ray {
        include_ray_into(&self.inner.projector(t), self.target).expect("target >= inner dim")
    }

    fn derivative(&self, t: f64) -> Vec<Complex64> {
        let n = self.inner.dim();
        let d = self.inner.derivative(t);
        let mut out = vec![ZERO; self.target * self.target];
        for i in 0..n {
            for j in 0..n {
                out[i * self.target + j] = d[i * n + j];
            }
        }
        out
    }
}

fn check_start(start: &StateVector, first: &Ray) -> Result<()> {
    if start.dim() != first.dim() {
        return Err(Error::DimensionMismatch {
            expected: first.dim(),
            found: start.dim(),
        });
    }
    let distance = fubini_study_distance(&crate::ray::ray_of(start), first)?;
    if distance > START_TOL {
        return Err(Error::NotOverStart { distance });
    }
    Ok(())
}

/// Discrete horizontal lift of `path` starting at `start`; one point per ray.
pub fn horizontal_lift(start: &StateVector, path: &RayPath) -> Result<Vec<StateVector>> {
    check_start(start, &path.points[0])?;
    path.check_mesh()?;
    let mut lift = Vec::with_capacity(path.points.len());
    lift.push(start.clone());
    let mut z = start.components().to_vec();
    for p in &path.points[1..] {
        z = p.apply(&z);
        let norm = norm_sq(&z).sqrt();
        for c in z.iter_mut() {
            *c /= norm;
        }
        lift.push(StateVector::normalize(z.clone())?);
    }
    Ok(lift)
}

/// Endpoint of the discrete horizontal lift.
pub fn parallel_transport(start: &StateVector, path: &RayPath) -> Result<StateVector> {
    let mut lift = horizontal_lift(start, path)?;
    Ok(lift.pop().expect("lift is nonempty"))
}

fn mat_vec(n: usize, m: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    (0..n)
        .map(|i| (0..n).map(|j| m[i * n + j] * v[j]).sum())
        .collect()
}

/// RK4 integration of `ż = Ṗ(t) z` over `t ∈ [0, 1]` in `steps` steps.
pub fn transport_ode<C: ProjectorCurve + ?Sized>(
    start: &StateVector,
    curve: &C,
    steps: usize,
) -> Result<StateVector> {
    if steps == 0 {
        return Err(Error::EmptyPath);
    }
    check_start(start, &curve.projector(0.0))?;
    let n = curve.dim();
    let h = 1.0 / steps as f64;
    let axpy = |z: &[Complex64], k: &[Complex64], a: f64| -> Vec<Complex64> {
        z.iter().zip(k).map(|(x, y)| x + y * a).collect()
    };
    let mut z = start.components().to_vec();
    for s in 0..steps {
        let t = s as f64 * h;
        let d0 = curve.derivative(t);
        let dm = curve.derivative(t + 0.5 * h);
        let d1 = curve.derivative(t + h);
        let k1 = mat_vec(n, &d0, &z);
        let k2 = mat_vec(n, &dm, &axpy(&z, &k1, 0.5 * h));
        let k3 = mat_vec(n, &dm, &axpy(&z, &k2, 0.5 * h));
        let k4 = mat_vec(n, &d1, &axpy(&z, &k3, h));
        for i in 0..n {
            z[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
    }
    StateVector::normalize(z)
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

/// `|a − b|` measured on the circle.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

/// Holonomy `φ` of a closed path: transport of `z₀` is `e^{iφ} z₀`.
pub fn holonomy(path: &RayPath) -> Result<f64> {
    let distance = path.closure_gap();
    if distance > START_TOL {
        return Err(Error::OpenLoop { distance });
    }
    let z0 = path.points[0].representative();
    let end = parallel_transport(&z0, path)?;
    Ok(wrap_phase(inner(z0.components(), end.components()).arg()))
}

/// Holonomy of a smooth closed curve by RK4.
pub fn holonomy_ode<C: ProjectorCurve + ?Sized>(curve: &C, steps: usize) -> Result<f64> {
    let p0 = curve.projector(0.0);
    let distance = p0.max_abs_diff(&curve.projector(1.0));
    if distance > START_TOL {
        return Err(Error::OpenLoop { distance });
    }
    let z0 = p0.representative();
    let end = transport_ode(&z0, curve, steps)?;
    Ok(wrap_phase(inner(z0.components(), end.components()).arg()))
}

/// Holonomies of many loops, in input order.
pub fn holonomy_batch(loops: &[LatitudeLoop], exec: Execution) -> Vec<Result<f64>> {
    exec.map_slice(loops, |l| holonomy(&l.path()))
}

/// Line bundles over `ℂP¹ ≅ S²` given by an explicit frame: a nonzero vector
/// spanning the fibre at each point (not necessarily continuous).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum LineBundleModel {
    /// `ℂP¹ × ℂ`.
    Trivial,
    /// `γᶜ₁`, the fibre over a line is the line itself.
    Tautological,
    /// The dual of `γᶜ₁`.
    Dual,
    /// `k`-th tensor power of the dual; negative `k` means powers of `γᶜ₁`.
    Power(i32),
    /// Tensor product of the listed bundles.
    Tensor(Vec<LineBundleModel>),
}

/// One tensor factor of a frame: a vector and its multiplicity.
pub type FrameFactor = (Vec<Complex64>, u32);

impl LineBundleModel {
    /// Frame as tensor factors at Bloch point `n`. Link variables multiply
    /// across factors, so powers never materialize `2^k`-dimensional vectors.
    pub fn frame_factors(&self, n: &Direction) -> Vec<FrameFactor> {
        let spinor = || spinor_of(n, Sign::Plus).into_components();
        let dual = || spinor().into_iter().map(|c| c.conj()).collect::<Vec<_>>();
        match self {
            LineBundleModel::Trivial => Vec::new(),
            LineBundleModel::Tautological => vec![(spinor(), 1)],
            LineBundleModel::Dual => vec![(dual(), 1)],
            LineBundleModel::Power(0) => Vec::new(),
            LineBundleModel::Power(k) if *k > 0 => vec![(dual(), k.unsigned_abs())],
            LineBundleModel::Power(k) => vec![(spinor(), k.unsigned_abs())],
            LineBundleModel::Tensor(parts) => parts.iter().flat_map(|b| b.frame_factors(n)).collect(),
        }
    }

    /// Frame vector at Bloch point `n` (the Kronecker product of the factors).
    pub fn frame(&self, n: &Direction) -> Vec<Complex64> {
        self.frame_factors(n)
            .into_iter()
            .fold(vec![Complex64::new(1.0, 0.0)], |mut acc, (f, m)| {
                for _ in 0..m {
                    acc = kron(&acc, &f);
                }
                acc
            })
    }

    /// Degree under the convention `c₁(γᶜ₁) = −1`, from the bundle algebra.
    pub fn degree(&self) -> i64 {
        match self {
            LineBundleModel::Trivial => 0,
            LineBundleModel::Tautological => -1,
            LineBundleModel::Dual => 1,
            LineBundleModel::Power(k) => i64::from(*k),
            LineBundleModel::Tensor(parts) => parts.iter().map(LineBundleModel::degree).sum(),
        }
    }
}

/// `⟨u_a, u_b⟩` for factored frames.
pub fn frame_link(a: &[FrameFactor], b: &[FrameFactor]) -> Complex64 {
    a.iter()
        .zip(b)
        .map(|((fa, m), (fb, _))| inner(fa, fb).powu(*m))
        .product()
}

/// Result of a lattice Chern computation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChernReport {
    pub chern: i64,
    /// Raw `Σ hol / 2π` before rounding.
    pub flux: f64,
    pub max_plaquette_phase: f64,
    pub mesh: usize,
}

/// Lattice Chern number on an `M × M` latitude/longitude mesh.
pub fn chern_number(bundle: &LineBundleModel, mesh: usize, exec: Execution) -> Result<i64> {
    chern_report(bundle, mesh, exec).map(|r| r.chern)
}

pub fn chern_report(bundle: &LineBundleModel, mesh: usize, exec: Execution) -> Result<ChernReport> {
    if mesh < MIN_CHERN_MESH {
        return Err(Error::MeshTooSmall {
            mesh,
            min: MIN_CHERN_MESH,
        });
    }
    let m = mesh;
    let north = bundle.frame_factors(&Direction::Z);
    let south = bundle.frame_factors(&Direction::Z.neg());
    // ring i ∈ 1..M holds vertices at θ = πi/M, φ = 2πj/M
    let rings: Vec<Vec<Vec<FrameFactor>>> = exec.map_indexed(m - 1, |r| {
        let theta = PI * (r + 1) as f64 / m as f64;
        (0..m)
            .map(|j| bundle.frame_factors(&Direction::from_spherical(theta, TAU * j as f64 / m as f64)))
            .collect()
    });
    let link = frame_link;
    // each band: (sum of plaquette holonomies, max |phase|)
    let bands: Vec<(f64, f64)> = exec.map_indexed(m, |band| {
        let mut sum = 0.0;
        let mut worst = 0.0f64;
        for j in 0..m {
            let jn = (j + 1) % m;
            // counterclockwise seen from outside: +θ first, then +φ
            let prod = if band == 0 {
                let ring = &rings[0];
                link(&north, &ring[j]) * link(&ring[j], &ring[jn]) * link(&ring[jn], &north)
            } else if band == m - 1 {
                let ring = &rings[m - 2];
                link(&ring[j], &south) * link(&south, &ring[jn]) * link(&ring[jn], &ring[j])
            } else {
                let (top, bottom) = (&rings[band - 1], &rings[band]);
                link(&top[j], &bottom[j])
                    * link(&bottom[j], &bottom[jn])
                    * link(&bottom[jn], &top[jn])
                    * link(&top[jn], &top[j])
            };
            // holonomy around the plaquette is −arg Π⟨uₐ, u_b⟩
            let phase = -prod.arg();
            worst = worst.max(phase.abs());
            sum += phase;
        }
        (sum, worst)
    });
    let max_plaquette_phase = bands.iter().map(|b| b.1).fold(0.0, f64::max);
    if max_plaquette_phase >= FRAC_PI_2 {
        return Err(Error::RefinementRequired {
            phase: max_plaquette_phase,
        });
    }
    let flux = bands.iter().map(|b| b.0).sum::<f64>() / TAU;
    let chern = flux.round();
    if (flux - chern).abs() >= 1e-6 {
        return Err(Error::NonIntegerFlux { value: flux });
    }
    Ok(ChernReport {
        chern: chern as i64,
        flux,
        max_plaquette_phase,
        mesh,
    })
}
