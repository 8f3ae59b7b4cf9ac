//! The associated line bundle `S²ˡ⁻¹ ×_{U(1)} ℂ` and the tautological bundle
//! `γᶜ` over `ℂPˡ⁻¹`, related by the isomorphism
//! `[(z, w)] ↦ (zℂ*, w z)` and its inverse `(zℂ*, v) ↦ [(z/|z|, λ)]`, `λ z/|z| = v`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hopf::{include_ray_into, include_sphere_into};
use crate::ray::{inner, max_abs_diff, norm_sq, ray_of, Ray, StateVector};
use crate::DEFAULT_TOL;

/// A representative `(z, w)` of a class in `S²ˡ⁻¹ ×_{U(1)} ℂ`.
///
/// Classes are compared with [`AssociatedPoint::approx_eq`], which maps both
/// sides through [`psi`]; `PartialEq` would compare representatives.
#[derive(Clone, Debug, Serialize)]
pub struct AssociatedPoint {
    pub rep_z: StateVector,
    pub rep_w: Complex64,
}

impl AssociatedPoint {
    pub fn new(rep_z: StateVector, rep_w: Complex64) -> Self {
        Self { rep_z, rep_w }
    }

    /// Another representative of the same class: `(z e^{iρ}, e^{−iρ} w)`.
    pub fn act(&self, rho: f64) -> Self {
        Self {
            rep_z: self.rep_z.phase_shift(rho),
            rep_w: self.rep_w * Complex64::from_polar(1.0, -rho),
        }
    }

    /// Class equality within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        psi(self).approx_eq(&psi(other), tol)
    }
}

/// A point of `E(γᶜ)`: a line through the origin and a vector on it.
#[derive(Clone, Debug, Serialize)]
pub struct TautologicalPoint {
    base: Ray,
    vector: Vec<Complex64>,
}

impl TautologicalPoint {
    /// Checks `‖P v − v‖ ≤ tol·max(1, ‖v‖)`.
    pub fn new(base: Ray, vector: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(base, vector, DEFAULT_TOL)
    }

    pub fn with_tolerance(base: Ray, vector: Vec<Complex64>, tol: f64) -> Result<Self> {
        if vector.len() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                found: vector.len(),
            });
        }
        let projected = base.apply(&vector);
        let residual = projected
            .iter()
            .zip(&vector)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale = norm_sq(&vector).sqrt().max(1.0);
        if residual > tol * scale || !residual.is_finite() {
            return Err(Error::NotOnLine { residual });
        }
        Ok(Self { base, vector })
    }

    /// The zero vector over `base`.
    pub fn zero(base: Ray) -> Self {
        let vector = vec![Complex64::new(0.0, 0.0); base.dim()];
        Self { base, vector }
    }

    /// Builds `(zℂ*, v)` from any nonzero `z ∈ ℂˡ` and `v` on its line.
    pub fn from_line(z: Vec<Complex64>, vector: Vec<Complex64>) -> Result<Self> {
        let base = ray_of(&StateVector::normalize(z)?);
        Self::new(base, vector)
    }

    pub fn base(&self) -> &Ray {
        &self.base
    }

    pub fn vector(&self) -> &[Complex64] {
        &self.vector
    }

    /// Fibrewise linear combination `α·self + β·other` over a common base.
    pub fn combine(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        if self.base.max_abs_diff(&other.base) > DEFAULT_TOL {
            return Err(Error::NotOnLine {
                residual: self.base.max_abs_diff(&other.base),
            });
        }
        let vector = self
            .vector
            .iter()
            .zip(&other.vector)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Self::with_tolerance(self.base.clone(), vector, 1e-10)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.base.max_abs_diff(&other.base) <= tol && max_abs_diff(&self.vector, &other.vector) <= tol
    }
}

/// `ψ([(z, w)]) = (zℂ*, w z)`.
pub fn psi(a: &AssociatedPoint) -> TautologicalPoint {
    TautologicalPoint {
        base: ray_of(&a.rep_z),
        vector: a.rep_z.components().iter().map(|c| a.rep_w * c).collect(),
    }
}

/// `ψ⁻¹(zℂ*, v) = [(z₀, ⟨z₀, v⟩)]` with `z₀` the gauge-fixed representative
/// of the base. The zero vector maps to fibre coordinate 0.
pub fn psi_inverse(t: &TautologicalPoint) -> AssociatedPoint {
    let z0 = t.base.representative();
    let lambda = inner(z0.components(), &t.vector);
    AssociatedPoint::new(z0, lambda)
}

/// `π(zℂ*, v) = zℂ*`.
pub fn bundle_projection(t: &TautologicalPoint) -> &Ray {
    &t.base
}

/// `E(γᶜ₁) ↪ E(γᶜ₃)` over the block inclusion `ℂP¹ ↪ ℂP³`.
pub fn include_tautological(t: &TautologicalPoint, target: usize) -> Result<TautologicalPoint> {
    let base = include_ray_into(&t.base, target)?;
    let mut vector = t.vector.clone();
    vector.resize(target, Complex64::new(0.0, 0.0));
    Ok(TautologicalPoint { base, vector })
}

/// Associated-bundle inclusion: `[(z, w)] ↦ [((z, 0), w)]`.
pub fn include_associated(a: &AssociatedPoint, target: usize) -> Result<AssociatedPoint> {
    Ok(AssociatedPoint::new(include_sphere_into(&a.rep_z, target)?, a.rep_w))
}
