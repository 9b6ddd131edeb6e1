//! Block-diagonal matrix algebras `M_{n_1} ⊕ … ⊕ M_{n_k}`.
//!
//! An [`Element`] stores one dense complex matrix per block. Projections,
//! spectral decompositions, traces and norms are all computed block by block;
//! eigenvalues of an element are the union of the eigenvalues of its blocks.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

/// Eigenvalues closer than this merge into a single spectral projection.
pub const DEFAULT_CLUSTER_GAP: f64 = 1e-8;

/// Eigenvalues of a positive contraction may sit this far outside `[0, 1]`.
pub const SPECTRUM_SLACK: f64 = 1e-9;

const DYADIC_SNAP: f64 = 1e-12;

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Dimensions of the matrix blocks of a finite-dimensional von Neumann algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraShape {
    blocks: Vec<usize>,
}

impl AlgebraShape {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidShape("no blocks".into()));
        }
        if let Some(pos) = blocks.iter().position(|&n| n == 0) {
            return Err(Error::InvalidShape(format!("block {pos} has size 0")));
        }
        Ok(Self { blocks })
    }

    /// The full matrix algebra `M_n`.
    pub fn factor(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self, j: usize) -> usize {
        self.blocks[j]
    }

    /// A block of size 2 is a Type I₂ summand, the one case where bounded
    /// additive measures need not be linear.
    pub fn has_i2_summand(&self) -> bool {
        self.blocks.contains(&2)
    }

    /// Complex dimension of the algebra, `Σ n_j²`.
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// Size of the Hilbert space the algebra acts on, `Σ n_j`.
    pub fn hilbert_dimension(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub(crate) fn ensure_same(&self, other: &AlgebraShape) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: self.blocks.clone(),
                found: other.blocks.clone(),
            })
        }
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// A block-diagonal complex matrix conforming to an [`AlgebraShape`].
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    shape: AlgebraShape,
    blocks: Vec<CMat>,
}

impl Element {
    pub fn new(shape: AlgebraShape, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(Error::MalformedElement(format!(
                "expected {} blocks, found {}",
                shape.num_blocks(),
                blocks.len()
            )));
        }
        for (j, (b, &n)) in blocks.iter().zip(shape.blocks()).enumerate() {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::MalformedElement(format!(
                    "block {j} is {}x{}, expected {n}x{n}",
                    b.nrows(),
                    b.ncols()
                )));
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::MalformedElement(format!("block {j} has non-finite entries")));
            }
        }
        Ok(Self { shape, blocks })
    }

    /// Builds an element from blocks, inferring the shape from their sizes.
    pub fn from_blocks(blocks: Vec<CMat>) -> Result<Self> {
        let sizes = blocks.iter().map(|b| b.nrows()).collect();
        let shape = AlgebraShape::new(sizes)?;
        Self::new(shape, blocks)
    }

    pub fn zeros(shape: &AlgebraShape) -> Self {
        let blocks = shape.blocks().iter().map(|&n| CMat::zeros(n, n)).collect();
        Self { shape: shape.clone(), blocks }
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        let blocks = shape.blocks().iter().map(|&n| CMat::identity(n, n)).collect();
        Self { shape: shape.clone(), blocks }
    }

    /// Places `block` in position `j` and zeros everywhere else.
    pub fn embed_block(shape: &AlgebraShape, j: usize, block: CMat) -> Result<Self> {
        if j >= shape.num_blocks() {
            return Err(Error::MalformedElement(format!("block index {j} out of range")));
        }
        let mut x = Self::zeros(shape);
        if block.shape() != (shape.block_size(j), shape.block_size(j)) {
            return Err(Error::MalformedElement(format!("block {j} has the wrong size")));
        }
        x.blocks[j] = block;
        Ok(x)
    }

    /// Diagonal element whose diagonal, read across all blocks in order, is `diag`.
    pub fn real_diagonal(shape: &AlgebraShape, diag: &[f64]) -> Result<Self> {
        if diag.len() != shape.hilbert_dimension() {
            return Err(Error::MalformedElement(format!(
                "diagonal has {} entries, shape needs {}",
                diag.len(),
                shape.hilbert_dimension()
            )));
        }
        let mut offset = 0;
        let blocks = shape
            .blocks()
            .iter()
            .map(|&n| {
                let b = CMat::from_fn(n, n, |r, c| {
                    if r == c {
                        Complex64::new(diag[offset + r], 0.0)
                    } else {
                        ZERO
                    }
                });
                offset += n;
                b
            })
            .collect();
        Ok(Self { shape: shape.clone(), blocks })
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &CMat {
        &self.blocks[j]
    }

    pub fn into_blocks(self) -> Vec<CMat> {
        self.blocks
    }

    pub fn map_blocks(&self, f: impl Fn(&CMat) -> CMat) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    pub fn zip_blocks(&self, other: &Self, f: impl Fn(&CMat, &CMat) -> CMat) -> Result<Self> {
        self.shape.ensure_same(&other.shape)?;
        Ok(Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(|b| b.adjoint())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_blocks(|b| b * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Splits `x = a + i b` with `a = (x + x*)/2` and `b = (x − x*)/2i` selfadjoint.
    pub fn hermitian_parts(&self) -> (Self, Self) {
        let a = self.map_blocks(|b| (b + b.adjoint()) * Complex64::new(0.5, 0.0));
        let b = self.map_blocks(|b| (b - b.adjoint()) * Complex64::new(0.0, -0.5));
        (a, b)
    }

    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        self.selfadjoint_defect() <= tol
    }

    /// Largest entry of `x − x*` in modulus.
    pub fn selfadjoint_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let d = b - b.adjoint();
                d.iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    /// `trace(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        self.shape.ensure_same(&other.shape)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| {
                let n = a.nrows();
                let mut s = ZERO;
                for r in 0..n {
                    for c in 0..n {
                        s += a[(r, c)] * b[(c, r)];
                    }
                }
                s
            })
            .sum())
    }

    fn singular_values(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|b| b.clone().svd(false, false).singular_values.iter().copied().collect::<Vec<_>>())
            .collect()
    }

    pub fn trace_norm(&self) -> f64 {
        self.singular_values().iter().sum()
    }

    pub fn operator_norm(&self) -> f64 {
        self.singular_values().into_iter().fold(0.0, f64::max)
    }

    /// Largest entry in modulus.
    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }

    /// Operator-norm distance, after checking that both shapes agree.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.shape.ensure_same(&other.shape)?;
        Ok((self - other).operator_norm())
    }

    /// Eigenvalues of a selfadjoint element, over all blocks, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .blocks
            .iter()
            .flat_map(|b| hermitian_eigen(b).eigenvalues.iter().copied().collect::<Vec<_>>())
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }
}

fn hermitian_eigen(b: &CMat) -> SymmetricEigen<Complex64, nalgebra::Dyn> {
    let h = (b + b.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(h)
}

macro_rules! impl_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Element> for &Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                assert_eq!(self.shape, rhs.shape, "element shapes differ");
                Element {
                    shape: self.shape.clone(),
                    blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a $op b).collect(),
                }
            }
        }
        impl $tr<Element> for Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                &self $op &rhs
            }
        }
        impl $tr<&Element> for Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                &self $op rhs
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.map_blocks(|b| -b)
    }
}

/// A selfadjoint idempotent element of the algebra, a member of `P(A)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    value: Element,
    tol: f64,
}

impl Projection {
    pub fn new(value: Element, tol: f64) -> Result<Self> {
        if is_projection(&value, tol)? {
            Ok(Self { value, tol })
        } else {
            Err(Error::NotAProjection(tol))
        }
    }

    /// Wraps an element known to be a projection by construction.
    pub(crate) fn trusted(value: Element, tol: f64) -> Self {
        Self { value, tol }
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        Self::trusted(Element::zeros(shape), 1e-10)
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        Self::trusted(Element::identity(shape), 1e-10)
    }

    pub fn element(&self) -> &Element {
        &self.value
    }

    pub fn into_element(self) -> Element {
        self.value
    }

    pub fn shape(&self) -> &AlgebraShape {
        self.value.shape()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn rank(&self) -> usize {
        self.value.trace().re.round().max(0.0) as usize
    }

    /// Rank of the `j`-th block.
    pub fn block_rank(&self, j: usize) -> usize {
        self.value.block(j).trace().re.round().max(0.0) as usize
    }

    /// `1 − p`.
    pub fn complement(&self) -> Self {
        Self::trusted(&Element::identity(self.shape()) - &self.value, self.tol)
    }

    /// Sum of two orthogonal projections.
    pub fn orthogonal_sum(&self, other: &Self) -> Result<Self> {
        let rel = relation(self, other, self.tol.max(other.tol))?;
        if !rel.orthogonal {
            return Err(Error::InvalidArgument("projections are not orthogonal".into()));
        }
        Ok(Self::trusted(&self.value + &other.value, self.tol.max(other.tol)))
    }
}

/// Membership test for `P(A)`: `‖p² − p‖ ≤ tol`, `‖p − p*‖ ≤ tol`, and every
/// eigenvalue within `tol` of 0 or 1.
pub fn is_projection(x: &Element, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let sa = (x - &x.adjoint()).operator_norm();
    if sa > tol {
        return Ok(false);
    }
    let idem = (&(x * x) - x).operator_norm();
    if idem > tol {
        return Ok(false);
    }
    Ok(x.eigenvalues().iter().all(|&l| l.abs() <= tol || (l - 1.0).abs() <= tol))
}

/// Order and orthogonality of two projections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Relation {
    pub orthogonal: bool,
    pub below: bool,
}

/// `orthogonal ⇔ ‖ep‖ ≤ tol`, `below ⇔ ‖ep − e‖ ≤ tol` (that is, `e ≤ p`).
pub fn relation(e: &Projection, p: &Projection, tol: f64) -> Result<Relation> {
    e.shape().ensure_same(p.shape())?;
    let ep = e.element() * p.element();
    Ok(Relation {
        orthogonal: ep.operator_norm() <= tol,
        below: (&ep - e.element()).operator_norm() <= tol,
    })
}

/// Distinct eigenvalues (descending) of a selfadjoint element together with
/// its spectral projections.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub projections: Vec<Projection>,
}

impl SpectralDecomposition {
    /// `Σ λ_i q_i`.
    pub fn resum(&self) -> Option<Element> {
        let shape = self.projections.first()?.shape().clone();
        Some(
            self.eigenvalues
                .iter()
                .zip(&self.projections)
                .fold(Element::zeros(&shape), |acc, (&l, q)| acc + q.element().scale_real(l)),
        )
    }
}

pub fn spectral_decompose(x: &Element, tol: f64) -> Result<SpectralDecomposition> {
    spectral_decompose_with_gap(x, tol, DEFAULT_CLUSTER_GAP)
}

/// Spectral decomposition with eigenvalues closer than `gap` merged.
pub fn spectral_decompose_with_gap(x: &Element, tol: f64, gap: f64) -> Result<SpectralDecomposition> {
    let defect = x.selfadjoint_defect();
    if defect > tol {
        return Err(Error::NotSelfAdjoint(defect));
    }
    let shape = x.shape();

    // (eigenvalue, block, eigenvector column)
    let mut pairs: Vec<(f64, usize, nalgebra::DVector<Complex64>)> = Vec::with_capacity(shape.hilbert_dimension());
    for (j, b) in x.blocks().iter().enumerate() {
        let eig = hermitian_eigen(b);
        for (i, &l) in eig.eigenvalues.iter().enumerate() {
            pairs.push((l, j, eig.eigenvectors.column(i).into_owned()));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut eigenvalues = Vec::new();
    let mut projections = Vec::new();
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end - 1].0 - pairs[end].0 <= gap {
            end += 1;
        }
        let cluster = &pairs[start..end];
        let mean = cluster.iter().map(|p| p.0).sum::<f64>() / cluster.len() as f64;
        let mut q = Element::zeros(shape);
        for (_, j, v) in cluster {
            q.blocks[*j] += v * v.adjoint();
        }
        eigenvalues.push(mean);
        projections.push(Projection::trusted(q, tol.max(1e-10)));
        start = end;
    }
    Ok(SpectralDecomposition { eigenvalues, projections })
}

/// Binary-digit spectral projections `e_1 … e_m` with `x ≈ Σ 2^{-n} e_n`.
///
/// Digit `n` of an eigenvalue `λ` is `⌊2ⁿλ⌋ mod 2`; `λ = 1` maps to all ones.
/// The truncation error is at most `2^{-m}` in operator norm.
pub fn dyadic_projections(x: &Element, depth: u32) -> Result<Vec<Projection>> {
    if depth == 0 || depth > 52 {
        return Err(Error::InvalidArgument(format!("dyadic depth must be in 1..=52, got {depth}")));
    }
    let spec = spectral_decompose(x, SPECTRUM_SLACK)?;
    let shape = x.shape();
    let scale = (1u64 << depth) as f64;
    let full = (1u64 << depth) - 1;

    let mut digits_per_value = Vec::with_capacity(spec.eigenvalues.len());
    for &l in &spec.eigenvalues {
        if l < -SPECTRUM_SLACK || l > 1.0 + SPECTRUM_SLACK {
            return Err(Error::SpectrumOutOfRange(l));
        }
        let s = l.clamp(0.0, 1.0) * scale;
        // Snap eigenvalues that are a rounding error away from a depth-m dyadic.
        let snapped = if (s - s.round()).abs() <= DYADIC_SNAP * scale { s.round() } else { s.floor() };
        digits_per_value.push((snapped as u64).min(full));
    }

    let mut out = Vec::with_capacity(depth as usize);
    for n in 1..=depth {
        let bit = 1u64 << (depth - n);
        let mut e = Element::zeros(shape);
        for (digits, q) in digits_per_value.iter().zip(&spec.projections) {
            if digits & bit != 0 {
                e = e + q.element();
            }
        }
        out.push(Projection::trusted(e, 1e-9));
    }
    Ok(out)
}

/// Trace, trace norm and operator norm of an element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatrixFunctionals {
    pub trace: Complex64,
    pub trace_norm: f64,
    pub operator_norm: f64,
}

pub fn matrix_functionals(x: &Element) -> MatrixFunctionals {
    let sv = x.singular_values();
    MatrixFunctionals {
        trace: x.trace(),
        trace_norm: sv.iter().sum(),
        operator_norm: sv.into_iter().fold(0.0, f64::max),
    }
}

/// Block identities: the minimal projections of the centre.
pub fn central_projections(shape: &AlgebraShape) -> Vec<Projection> {
    (0..shape.num_blocks())
        .map(|j| {
            let n = shape.block_size(j);
            let e = Element::embed_block(shape, j, CMat::identity(n, n)).expect("block index in range");
            Projection::trusted(e, 1e-10)
        })
        .collect()
}
