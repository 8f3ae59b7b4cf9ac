//! Complex vectors, unit spinors and rays of ℂPⁿ⁻¹.
//!
//! A [`Ray`] is stored as its rank-one orthogonal projector `z z†`, so two
//! state vectors that differ by a phase give bit-for-bit comparable rays and
//! no chart is ever needed.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::DEFAULT_TOL;

/// Components below this modulus are treated as zero when fixing the gauge.
pub const GAUGE_THRESHOLD: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `Σ conj(aᵢ) bᵢ` on raw slices. Callers check lengths.
#[inline]
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
pub fn norm_sq(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Kronecker product with index `(i, j) ↦ i * b.len() + j`.
pub fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Largest componentwise modulus of `a - b`.
pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Multiply by the phase that makes the first component with modulus above
/// [`GAUGE_THRESHOLD`] real and positive.
pub fn gauge_fix(v: &mut [Complex64]) {
    if let Some(c) = v.iter().copied().find(|c| c.norm() > GAUGE_THRESHOLD) {
        let phase = c.conj() / c.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// A point of the unit sphere `S²ⁿ⁻¹ ⊂ ℂⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateVector {
    components: Vec<Complex64>,
}

impl StateVector {
    /// Checks `‖z‖² = 1` within [`DEFAULT_TOL`].
    pub fn new(components: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(components, DEFAULT_TOL)
    }

    pub fn with_tolerance(components: Vec<Complex64>, tol: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::ZeroVector);
        }
        let norm_sq = norm_sq(&components);
        if (norm_sq - 1.0).abs() > tol || !norm_sq.is_finite() {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { components })
    }

    /// Rescales a nonzero vector onto the sphere.
    pub fn normalize(mut components: Vec<Complex64>) -> Result<Self> {
        let norm = norm_sq(&components).sqrt();
        if components.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        for c in components.iter_mut() {
            *c /= norm;
        }
        Ok(Self { components })
    }

    pub fn from_real(components: &[f64]) -> Result<Self> {
        Self::new(components.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The standard basis vector `eₖ` of ℂⁿ.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut components = vec![ZERO; dim];
        components[k] = ONE;
        Self { components }
    }

    pub fn up() -> Self {
        Self::basis(2, 0)
    }

    pub fn down() -> Self {
        Self::basis(2, 1)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Complex64> {
        self.components
    }

    /// `e^{iρ} z`, the U(1) action on the fibre.
    pub fn phase_shift(&self, rho: f64) -> Self {
        let phase = Complex64::from_polar(1.0, rho);
        Self {
            components: self.components.iter().map(|c| c * phase).collect(),
        }
    }

    /// Multiply by a unit complex number. The modulus is not checked beyond
    /// the usual normalization tolerance.
    pub fn scale_phase(&self, phase: Complex64) -> Result<Self> {
        Self::new(self.components.iter().map(|c| c * phase).collect())
    }

    pub fn gauge_fixed(&self) -> Self {
        let mut components = self.components.clone();
        gauge_fix(&mut components);
        Self { components }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs_diff(&self.components, &other.components)
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.components.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}{:+}i", c.re, c.im)?;
        }
        write!(f, ")")
    }
}

/// `⟨a, b⟩ = Σ conj(aᵢ) bᵢ`, the metric on ℂⁿ.
pub fn hermitian_inner(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(inner(a.components(), b.components()))
}

/// Kronecker product of two spin states, basis `(↑↑, ↑↓, ↓↑, ↓↓)` for two qubits.
pub fn tensor_product(a: &StateVector, b: &StateVector) -> StateVector {
    StateVector {
        components: kron(a.components(), b.components()),
    }
}

/// A point of ℂPⁿ⁻¹ held as the projector onto the line.
#[derive(Clone, Debug, PartialEq)]
pub struct Ray {
    dim: usize,
    projector: Vec<Complex64>,
}

impl Ray {
    /// Validates `P† = P`, `P² = P` and `tr P = 1` within `tol`.
    pub fn from_projector(dim: usize, projector: Vec<Complex64>, tol: f64) -> Result<Self> {
        if projector.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: projector.len(),
            });
        }
        let ray = Self { dim, projector };
        let deviation = ray.projector_defect();
        if deviation > tol || !deviation.is_finite() {
            return Err(Error::InvalidRay { deviation });
        }
        Ok(ray)
    }

    /// Largest of the Hermiticity, idempotence and trace defects.
    pub fn projector_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        let mut trace = ZERO;
        for i in 0..n {
            trace += self.entry(i, i);
            for j in 0..n {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
                let sq: Complex64 = (0..n).map(|k| self.entry(i, k) * self.entry(k, j)).sum();
                worst = worst.max((sq - self.entry(i, j)).norm());
            }
        }
        worst.max((trace - ONE).norm())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.projector[i * self.dim + j]
    }

    /// Row-major projector entries.
    pub fn projector(&self) -> &[Complex64] {
        &self.projector
    }

    /// `P v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.entry(i, j) * v[j]).sum())
            .collect()
    }

    /// `tr(P Q)`, which equals `|⟨p, q⟩|²` for unit representatives.
    pub fn overlap(&self, other: &Ray) -> Result<f64> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.entry(i, j) * other.entry(j, i);
            }
        }
        Ok(acc.re)
    }

    /// Max-entry distance between projectors; infinite for mismatched dims.
    pub fn max_abs_diff(&self, other: &Ray) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        max_abs_diff(&self.projector, &other.projector)
    }

    /// Gauge-fixed unit vector spanning the line. Built from the column with
    /// the largest diagonal entry, then phased so its first nonzero component
    /// is real and nonnegative.
    pub fn representative(&self) -> StateVector {
        let n = self.dim;
        let col = (0..n)
            .max_by(|&a, &b| self.entry(a, a).re.total_cmp(&self.entry(b, b).re))
            .unwrap_or(0);
        let scale = self.entry(col, col).re.sqrt();
        let mut v: Vec<Complex64> = (0..n).map(|i| self.entry(i, col) / scale).collect();
        let norm = norm_sq(&v).sqrt();
        for c in v.iter_mut() {
            *c /= norm;
        }
        gauge_fix(&mut v);
        StateVector { components: v }
    }

    fn check_dim(&self, other: &Ray) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

impl Serialize for Ray {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[Complex64]> = self.projector.chunks(self.dim).collect();
        rows.serialize(serializer)
    }
}

/// `z z†`: the Hopf quotient `z ↦ zℂ*` realized as a projector.
pub fn ray_of(z: &StateVector) -> Ray {
    let c = z.components();
    let n = c.len();
    let mut projector = Vec::with_capacity(n * n);
    for a in c {
        for b in c {
            projector.push(a * b.conj());
        }
    }
    Ray { dim: n, projector }
}

/// Fubini-Study distance `arccos √tr(PQ)`, in `[0, π/2]`.
///
/// Near zero the equivalent `arcsin(‖P − Q‖_F / √2)` is used; `acos` loses
/// half the digits there.
pub fn fubini_study_distance(p: &Ray, q: &Ray) -> Result<f64> {
    let overlap = p.overlap(q)?.clamp(0.0, 1.0);
    let frob = p
        .projector
        .iter()
        .zip(&q.projector)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let sin_d = frob * FRAC_1_SQRT_2;
    if sin_d < 0.5 {
        Ok(sin_d.asin())
    } else {
        Ok(overlap.sqrt().acos())
    }
}

/// A unit vector of ℝ³ (a spin axis or a point of the Bloch sphere).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Direction {
    pub const X: Direction = Direction { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Direction = Direction { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Direction = Direction { x: 0.0, y: 0.0, z: 1.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if (norm * norm - 1.0).abs() > DEFAULT_TOL || !norm.is_finite() {
            return Err(Error::InvalidDirection { norm });
        }
        Ok(Self { x, y, z })
    }

    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidDirection { norm });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Polar angle `θ` from +z and azimuth `φ` from +x.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    /// Unit vector at angle `theta` from +z in the x-z plane.
    pub fn in_xz_plane(theta: f64) -> Self {
        Self::from_spherical(theta, 0.0)
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Direction) -> [f64; 3] {
        [
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        ]
    }

    pub fn neg(&self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Direction) -> f64 {
        let d = [self.x - other.x, self.y - other.y, self.z - other.z];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    /// Spherical angles `(θ, φ)` with `φ ∈ (−π, π]`.
    pub fn spherical(&self) -> (f64, f64) {
        (self.z.clamp(-1.0, 1.0).acos(), self.y.atan2(self.x))
    }
}

/// Eigenvalue sign of `n̂·σ⃗`, equivalently the spin projection `±½`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Pauli matrix `n̂·σ⃗ = [[z, x − iy], [x + iy, −z]]`, row-major.
pub fn pauli_dot(n: &Direction) -> [Complex64; 4] {
    [
        Complex64::new(n.z, 0.0),
        Complex64::new(n.x, -n.y),
        Complex64::new(n.x, n.y),
        Complex64::new(-n.z, 0.0),
    ]
}

/// Unit eigenvector of `n̂·σ⃗` with eigenvalue `sign`, gauge-fixed so the first
/// nonzero component is real and nonnegative.
pub fn spinor_of(n: &Direction, sign: Sign) -> StateVector {
    let (theta, phi) = n.spherical();
    let (s, c) = (theta / 2.0).sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    let mut v = match sign {
        Sign::Plus => vec![Complex64::new(c, 0.0), e * s],
        Sign::Minus => vec![Complex64::new(s, 0.0), -e * c],
    };
    gauge_fix(&mut v);
    StateVector { components: v }
}

#[cfg(test)]
pub(crate) fn plus_x() -> StateVector {
    StateVector {
        components: vec![Complex64::new(FRAC_1_SQRT_2, 0.0); 2],
    }
}

#[cfg(test)]
pub(crate) fn plus_y() -> StateVector {
    StateVector {
        components: vec![Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, FRAC_1_SQRT_2)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_product_examples() {
        let up = StateVector::up();
        let down = StateVector::down();
        assert_eq!(hermitian_inner(&up, &up).unwrap(), c(1.0, 0.0));
        assert_eq!(hermitian_inner(&up, &down).unwrap(), c(0.0, 0.0));
        let a = StateVector::new(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]).unwrap();
        let b = StateVector::new(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)]).unwrap();
        assert!(hermitian_inner(&a, &b).unwrap().norm() < 1e-15);
        // conjugate-linear in the first slot
        let ia = a.scale_phase(Complex64::new(0.0, 1.0)).unwrap();
        let lhs = hermitian_inner(&ia, &a).unwrap();
        assert!((lhs - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_product_dimension_error() {
        let e = hermitian_inner(&StateVector::up(), &StateVector::basis(4, 0)).unwrap_err();
        assert_eq!(e, Error::DimensionMismatch { expected: 2, found: 4 });
    }

    #[test]
    fn tensor_product_examples() {
        let ud = tensor_product(&StateVector::up(), &StateVector::down());
        assert_eq!(ud, StateVector::basis(4, 1));
        let du = tensor_product(&StateVector::down(), &StateVector::up());
        assert_eq!(du, StateVector::basis(4, 2));
        let diff: Vec<Complex64> = ud
            .components()
            .iter()
            .zip(du.components())
            .map(|(a, b)| (a - b) * FRAC_1_SQRT_2)
            .collect();
        assert_eq!(
            diff,
            vec![c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0), c(0.0, 0.0)]
        );
    }

    #[test]
    fn ray_of_examples() {
        let p = ray_of(&StateVector::up());
        assert_eq!(p.projector(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let q = ray_of(&StateVector::up().phase_shift(FRAC_PI_3));
        assert!(p.max_abs_diff(&q) < 1e-15);
        let h = ray_of(&plus_x());
        for e in h.projector() {
            assert!((e - c(0.5, 0.0)).norm() < 1e-15);
        }
        assert!(h.projector_defect() < 1e-15);
    }

    #[test]
    fn normalization_errors() {
        assert!(matches!(
            StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotNormalized { .. })
        ));
        assert_eq!(StateVector::normalize(vec![c(0.0, 0.0)]), Err(Error::ZeroVector));
        assert!(matches!(Direction::new(1.0, 1.0, 0.0), Err(Error::InvalidDirection { .. })));
    }

    #[test]
    fn invalid_projector_rejected() {
        let m = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(Ray::from_projector(2, m, 1e-12), Err(Error::InvalidRay { .. })));
    }

    #[test]
    fn fubini_study_examples() {
        let up = ray_of(&StateVector::up());
        let down = ray_of(&StateVector::down());
        let plus = ray_of(&plus_x());
        assert_eq!(fubini_study_distance(&up, &up).unwrap(), 0.0);
        assert!((fubini_study_distance(&up, &down).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((fubini_study_distance(&up, &plus).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!(fubini_study_distance(&up, &ray_of(&StateVector::basis(4, 0))).is_err());
    }

    #[test]
    fn spinor_examples() {
        assert_eq!(spinor_of(&Direction::Z, Sign::Plus), StateVector::up());
        let m = spinor_of(&Direction::Z, Sign::Minus);
        assert!(m.max_abs_diff(&StateVector::down()) < 1e-15);
        assert!(spinor_of(&Direction::X, Sign::Plus).max_abs_diff(&plus_x()) < 1e-15);
        assert!(spinor_of(&Direction::Y, Sign::Plus).max_abs_diff(&plus_y()) < 1e-15);
        // south pole: (−ẑ, +1) is ↓ with a real positive component
        let s = spinor_of(&Direction::Z.neg(), Sign::Plus);
        assert!(s.max_abs_diff(&StateVector::down()) < 1e-15);
    }

    #[test]
    fn spinor_is_eigenvector() {
        let n = Direction::normalize(0.3, -0.7, 0.2).unwrap();
        let m = pauli_dot(&n);
        for sign in [Sign::Plus, Sign::Minus] {
            let v = spinor_of(&n, sign);
            let z = v.components();
            let mv = [m[0] * z[0] + m[1] * z[1], m[2] * z[0] + m[3] * z[1]];
            for k in 0..2 {
                assert!((mv[k] - z[k] * sign.value()).norm() < 1e-14);
            }
            assert!(z[0].im == 0.0 && z[0].re >= 0.0);
        }
    }

    #[test]
    fn representative_is_gauge_fixed() {
        let z = StateVector::normalize(vec![c(0.0, 0.0), c(0.0, 2.0), c(1.0, 1.0)]).unwrap();
        let rep = ray_of(&z).representative();
        assert_eq!(rep.components()[0], c(0.0, 0.0));
        assert!(rep.components()[1].im.abs() < 1e-15 && rep.components()[1].re > 0.0);
        assert!(ray_of(&rep).max_abs_diff(&ray_of(&z)) < 1e-15);
    }
}
