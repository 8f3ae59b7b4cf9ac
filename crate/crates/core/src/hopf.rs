//! Complex Hopf bundles `U(1) → S²ⁿ⁻¹ → ℂPⁿ⁻¹`, their inclusions into the
//! next bundle of the filtration, and the Bloch sphere picture of ℂP¹.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ray::{pauli_dot, ray_of, Direction, Ray, StateVector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The bundle with total space `S²ⁿ⁻¹` and base `ℂPⁿ⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BundleSpec {
    n: usize,
}

impl BundleSpec {
    /// Spin of a single particle: `S³ → ℂP¹`.
    pub const SINGLE_SPIN: BundleSpec = BundleSpec { n: 2 };
    /// Two spins: `S⁷ → ℂP³`.
    pub const TWO_SPINS: BundleSpec = BundleSpec { n: 4 };

    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        Ok(Self { n })
    }

    /// Complex dimension of the ambient space ℂⁿ.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension of the total space sphere.
    pub fn sphere_dim(&self) -> usize {
        2 * self.n - 1
    }

    /// Complex dimension of the base projective space.
    pub fn base_dim(&self) -> usize {
        self.n - 1
    }

    /// The next bundle in the filtration.
    pub fn next(&self) -> BundleSpec {
        BundleSpec { n: self.n + 1 }
    }

    pub fn project(&self, z: &StateVector) -> Result<Ray> {
        if z.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: z.dim(),
            });
        }
        Ok(hopf_project(z))
    }
}

/// The Hopf map `z ↦ zℂ*`.
pub fn hopf_project(z: &StateVector) -> Ray {
    ray_of(z)
}

/// `samples` equally spaced points `e^{2πik/samples} z₀` of the circle over `p`,
/// starting from the gauge-fixed representative `z₀`.
pub fn fiber_at(p: &Ray, samples: usize) -> Result<Vec<StateVector>> {
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    let z0 = p.representative();
    Ok((0..samples)
        .map(|k| z0.phase_shift(TAU * k as f64 / samples as f64))
        .collect())
}

/// `S²ⁿ⁻¹ ↪ S²ᵐ⁻¹` by zero padding the trailing coordinates.
pub fn include_sphere_into(z: &StateVector, target: usize) -> Result<StateVector> {
    if target < z.dim() {
        return Err(Error::DimensionMismatch {
            expected: z.dim(),
            found: target,
        });
    }
    let mut c = z.components().to_vec();
    c.resize(target, ZERO);
    StateVector::new(c)
}

/// `ℂPⁿ⁻¹ ↪ ℂPᵐ⁻¹` as the top-left block embedding of the projector.
pub fn include_ray_into(p: &Ray, target: usize) -> Result<Ray> {
    let n = p.dim();
    if target < n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target,
        });
    }
    let mut m = vec![ZERO; target * target];
    for i in 0..n {
        for j in 0..n {
            m[i * target + j] = p.entry(i, j);
        }
    }
    Ray::from_projector(target, m, f64::INFINITY)
}

/// `S³ ↪ S⁷`, `(z₁, z₂) ↦ (z₁, z₂, 0, 0)`.
pub fn include_sphere(z: &StateVector) -> Result<StateVector> {
    expect_dim(z.dim(), 2)?;
    include_sphere_into(z, 4)
}

/// `ℂP¹ ↪ ℂP³`, compatible with [`include_sphere`].
pub fn include_ray(p: &Ray) -> Result<Ray> {
    expect_dim(p.dim(), 2)?;
    include_ray_into(p, 4)
}

/// Max deviation between `include_ray ∘ h₁` and `h₃ ∘ include_sphere` at `z`.
pub fn inclusion_square_defect(z: &StateVector) -> Result<f64> {
    let left = include_ray(&hopf_project(z))?;
    let right = hopf_project(&include_sphere(z)?);
    Ok(left.max_abs_diff(&right))
}

/// Bloch vector `(tr Pσₓ, tr Pσᵧ, tr P σ_z)` of a qubit ray.
pub fn bloch_point(p: &Ray) -> Result<Direction> {
    expect_dim(p.dim(), 2)?;
    let (a, b, d) = (p.entry(0, 0), p.entry(1, 0), p.entry(1, 1));
    // tr(Pσx) = 2 Re P₁₀, tr(Pσy) = 2 Im P₁₀
    let (x, y, z) = (2.0 * b.re, 2.0 * b.im, a.re - d.re);
    Direction::normalize(x, y, z)
}

/// Inverse Bloch map `P = ½(1 + n̂·σ⃗)`.
pub fn ray_from_bloch(n: &Direction) -> Ray {
    let s = pauli_dot(n);
    let half = Complex64::new(0.5, 0.0);
    let m = vec![
        half * (Complex64::new(1.0, 0.0) + s[0]),
        half * s[1],
        half * s[2],
        half * (Complex64::new(1.0, 0.0) + s[3]),
    ];
    Ray::from_projector(2, m, f64::INFINITY).expect("2x2 projector has the right shape")
}

fn expect_dim(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ray::{plus_x, plus_y, tensor_product};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn project_basis_and_singlet() {
        let p = hopf_project(&StateVector::basis(4, 0));
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                assert_eq!(p.entry(i, j), c(want, 0.0));
            }
        }
        let z = StateVector::from_real(&[0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]).unwrap();
        let q = hopf_project(&z);
        let expect = [(1, 1, 0.5), (1, 2, -0.5), (2, 1, -0.5), (2, 2, 0.5)];
        for i in 0..4 {
            for j in 0..4 {
                let want = expect
                    .iter()
                    .find(|&&(a, b, _)| a == i && b == j)
                    .map_or(0.0, |e| e.2);
                assert!((q.entry(i, j) - c(want, 0.0)).norm() < 1e-15);
            }
        }
        assert!(hopf_project(&z.phase_shift(2.1)).max_abs_diff(&q) < 1e-15);
    }

    #[test]
    fn fibre_of_basis_ray() {
        let fibre = fiber_at(&hopf_project(&StateVector::up()), 4).unwrap();
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (v, w) in fibre.iter().zip(want) {
            assert!((v.components()[0] - w).norm() < 1e-15);
            assert_eq!(v.components()[1], c(0.0, 0.0));
        }
        let one = fiber_at(&hopf_project(&plus_x()), 1).unwrap();
        assert!(one[0].max_abs_diff(&plus_x()) < 1e-15);
        assert_eq!(fiber_at(&hopf_project(&plus_x()), 0), Err(Error::ZeroSamples));
    }

    #[test]
    fn inclusions() {
        assert_eq!(include_sphere(&StateVector::up()).unwrap(), StateVector::basis(4, 0));
        assert_eq!(include_sphere(&StateVector::down()).unwrap(), StateVector::basis(4, 1));
        let y = include_sphere(&plus_y()).unwrap();
        assert_eq!(y.components()[1], c(0.0, FRAC_1_SQRT_2));
        assert_eq!(&y.components()[2..], &[c(0.0, 0.0), c(0.0, 0.0)]);

        let p = include_ray(&hopf_project(&plus_x())).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i < 2 && j < 2 { 0.5 } else { 0.0 };
                assert!((p.entry(i, j) - c(want, 0.0)).norm() < 1e-15);
            }
        }
        assert!(include_sphere(&StateVector::basis(4, 0)).is_err());
        assert!(include_ray(&hopf_project(&StateVector::basis(4, 0))).is_err());
    }

    #[test]
    fn bloch_examples() {
        let close = |a: Direction, b: Direction| a.distance(&b) < 1e-15;
        assert!(close(bloch_point(&hopf_project(&StateVector::up())).unwrap(), Direction::Z));
        assert!(close(bloch_point(&hopf_project(&StateVector::down())).unwrap(), Direction::Z.neg()));
        assert!(close(bloch_point(&hopf_project(&plus_y())).unwrap(), Direction::Y));
        // entangled two-qubit rays are not points of ℂP¹
        let bell = tensor_product(&StateVector::up(), &StateVector::down());
        assert!(bloch_point(&hopf_project(&bell)).is_err());
    }

    #[test]
    fn bundle_spec_dimensions() {
        assert_eq!(BundleSpec::TWO_SPINS.sphere_dim(), 7);
        assert_eq!(BundleSpec::SINGLE_SPIN.base_dim(), 1);
        assert_eq!(BundleSpec::SINGLE_SPIN.next().next(), BundleSpec::TWO_SPINS);
        assert!(BundleSpec::new(0).is_err());
        assert!(BundleSpec::TWO_SPINS.project(&StateVector::up()).is_err());
    }
}
