//! Additive but nonlinear measures on the projections of `M_2`.
//!
//! Every nontrivial projection of `M_2` is a Bloch projection `p(n)`, and the
//! only orthogonal pairs among them are antipodes `{p(n), p(−n)}`. A frame
//! function `μ(p(n)) = c/2 + g(n)` with `g` odd is therefore finitely additive
//! and bounded, while `trace(rho·p(n)) = ½ trace(rho) + ½ v·n` is affine in
//! `n`. Any `g` that is not linear in `n` gives a measure with no linear
//! extension; [`nonlinearity_residual`] quantifies the gap in sup norm.

use num_complex::Complex64;

use crate::algebra::{AlgebraShape, CMat, Element, Projection};
use crate::error::{Error, Result};
use crate::measures::{OddFunction, ScalarMeasure};
use crate::minimax::chebyshev_fit;

pub const DEFAULT_GRID: usize = 2048;
pub const MIN_GRID: usize = 100;

/// Unit vector in ℝ³ parametrizing a rank-one projection of `M_2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitVector(norm));
        }
        Ok(Self([x, y, z]))
    }

    /// Reads `n` off a rank-one projection `½(I + n·σ)`.
    pub fn from_projection(p: &Projection) -> Result<Self> {
        let shape = p.shape();
        if shape.blocks() != [2] {
            return Err(Error::Representation(format!("Bloch vectors need shape [2], got {shape}")));
        }
        let b = p.element().block(0);
        let v = [2.0 * b[(1, 0)].re, 2.0 * b[(1, 0)].im, (b[(0, 0)] - b[(1, 1)]).re];
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::NotAProjection(p.tol()));
        }
        Ok(Self([v[0] / norm, v[1] / norm, v[2] / norm]))
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn antipode(&self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }
}

/// `p(n) = ½(I + n₁σ₁ + n₂σ₂ + n₃σ₃)`.
pub fn bloch_projection(n: &BlochVector) -> Projection {
    let [x, y, z] = n.0;
    let m = CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        ],
    );
    let shape = AlgebraShape::factor(2).expect("2 is a valid block size");
    Projection::trusted(Element::new(shape, vec![m]).expect("2x2 block"), 1e-12)
}

/// Frame measure with `μ(p(n)) = c/2 + Σ_k odd_coeffs[k] · n_z^{2k+1}`.
pub fn qubit_frame_measure(c: f64, odd_coeffs: &[f64]) -> Result<ScalarMeasure> {
    ScalarMeasure::frame2(c, OddFunction::from_odd_powers(odd_coeffs)?)
}

/// Deterministic Fibonacci lattice on the unit sphere.
pub fn fibonacci_sphere(points: usize) -> Vec<BlochVector> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..points)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / points as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let theta = golden_angle * i as f64;
            let v = [r * theta.cos(), r * theta.sin(), z];
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            BlochVector([v[0] / norm, v[1] / norm, v[2] / norm])
        })
        .collect()
}

/// Minimax-optimal linear approximant of a qubit measure on a sphere grid.
#[derive(Clone, Debug)]
pub struct NonlinearityCertificate {
    /// Hermitian `rho` minimizing `max |μ(p(n)) − trace(rho·p(n))|` on the grid.
    pub best_fit: Element,
    pub residual: f64,
    pub witness: BlochVector,
    pub grid_size: usize,
}

impl NonlinearityCertificate {
    /// `trace(best_fit · p(n))`.
    pub fn fitted_value(&self, n: &BlochVector) -> f64 {
        self.best_fit
            .trace_product(bloch_projection(n).element())
            .expect("both on M_2")
            .re
    }
}

/// `rho = a₀I + a₁σ₁ + a₂σ₂ + a₃σ₃`, so that `trace(rho·p(n)) = a₀ + a·n`.
fn pauli_combination(a: &[f64]) -> Element {
    let m = CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(a[0] + a[3], 0.0),
            Complex64::new(a[1], -a[2]),
            Complex64::new(a[1], a[2]),
            Complex64::new(a[0] - a[3], 0.0),
        ],
    );
    Element::from_blocks(vec![m]).expect("2x2 block")
}

fn real_values_on_grid(mu: &ScalarMeasure, grid: &[BlochVector]) -> Result<Vec<f64>> {
    grid.iter()
        .map(|n| {
            let v = mu.evaluate(&bloch_projection(n))?;
            if v.im.abs() > 1e-12 {
                return Err(Error::Unsupported("certificate needs a real-valued measure".into()));
            }
            Ok(v.re)
        })
        .collect()
}

/// Sup-norm distance from `μ` to the nearest linear functional, over a
/// Fibonacci grid of `grid_size` Bloch vectors.
pub fn nonlinearity_residual(mu: &ScalarMeasure, grid_size: usize) -> Result<NonlinearityCertificate> {
    if mu.shape().blocks() != [2] {
        return Err(Error::Representation(format!(
            "nonlinearity certificates are defined on M_2, got shape {}",
            mu.shape()
        )));
    }
    if grid_size < MIN_GRID {
        return Err(Error::InvalidArgument(format!("grid size must be at least {MIN_GRID}")));
    }
    let grid = fibonacci_sphere(grid_size);
    let values = real_values_on_grid(mu, &grid)?;
    let design: Vec<Vec<f64>> = grid.iter().map(|n| vec![1.0, n.x(), n.y(), n.z()]).collect();
    let fit = chebyshev_fit(&design, &values)?;
    Ok(NonlinearityCertificate {
        best_fit: pauli_combination(&fit.coeffs),
        residual: fit.deviation,
        witness: grid[fit.argmax],
        grid_size,
    })
}

/// One row per grid point: `(n_z, μ(p(n)), trace(best_fit·p(n)))`.
pub fn certificate_profile(mu: &ScalarMeasure, cert: &NonlinearityCertificate) -> Result<Vec<[f64; 3]>> {
    let grid = fibonacci_sphere(cert.grid_size);
    let values = real_values_on_grid(mu, &grid)?;
    Ok(grid
        .iter()
        .zip(values)
        .map(|(n, v)| [n.z(), v, cert.fitted_value(n)])
        .collect())
}
