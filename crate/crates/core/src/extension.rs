//! Linear extension of measures.
//!
//! In finite dimension the projections of each block `M_n` span the whole
//! block, so a measure that extends linearly is pinned down by its values on
//! `n²` well-chosen projections. [`reconstruct`] solves for the representing
//! matrix on such a family and then checks the fit on fresh random
//! projections; a residual that survives the check means the input was not
//! the restriction of a linear functional. [`omega`] is the spectral
//! extension `ω(x) = Σ λ_i μ(q_i)`, linear on each abelian subalgebra whether
//! or not `μ` is linear.

use std::fmt;

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{dyadic_projections, spectral_decompose, AlgebraShape, CMat, Element, Projection, ONE, ZERO};
use crate::error::{Error, Result};
use crate::measures::ScalarMeasure;
use crate::random::{self, random_unitary};

pub const DEFAULT_VERIFY_SAMPLES: usize = 64;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_NORM_SAMPLES: usize = 500;

/// `n²` projections spanning `M_n`: the diagonal units `e_ii`, and for each
/// `i < l` the rank-one projections onto `(e_i + e_l)/√2` and `(e_i + i·e_l)/√2`.
#[derive(Clone, Debug)]
pub struct SpanningFamily {
    pub n: usize,
    pub projections: Vec<Projection>,
}

impl SpanningFamily {
    /// Rank of the real Gram matrix `G_kl = trace(p_k p_l)`.
    pub fn gram_rank(&self) -> usize {
        let m = self.projections.len();
        let gram = DMatrix::from_fn(m, m, |k, l| {
            self.projections[k]
                .element()
                .trace_product(self.projections[l].element())
                .expect("same shape")
                .re
        });
        SVD::new(gram, false, false)
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-10)
            .count()
    }

    /// Same family in a different order.
    pub fn reordered(&self, order: FamilyOrder) -> Self {
        let mut projections = self.projections.clone();
        match order {
            FamilyOrder::Canonical => {}
            FamilyOrder::Reversed => projections.reverse(),
            FamilyOrder::Shuffled(seed) => projections.shuffle(&mut random::rng(seed)),
        }
        Self { n: self.n, projections }
    }
}

fn rank_one(v: &DVector<Complex64>) -> CMat {
    v * v.adjoint()
}

pub fn spanning_projections(n: usize) -> Result<SpanningFamily> {
    let shape = AlgebraShape::factor(n)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut mats = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut v = DVector::from_element(n, ZERO);
        v[i] = ONE;
        mats.push(rank_one(&v));
    }
    for i in 0..n {
        for l in i + 1..n {
            let mut v = DVector::from_element(n, ZERO);
            v[i] = Complex64::new(s, 0.0);
            v[l] = Complex64::new(s, 0.0);
            mats.push(rank_one(&v));
            v[l] = Complex64::new(0.0, s);
            mats.push(rank_one(&v));
        }
    }
    let projections = mats
        .into_iter()
        .map(|m| Projection::trusted(Element::new(shape.clone(), vec![m]).expect("n x n block"), 1e-12))
        .collect();
    Ok(SpanningFamily { n, projections })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionStatus {
    Extended,
    I2Obstruction,
    NotAMeasure,
}

impl ExtensionStatus {
    /// CLI exit code for this status.
    pub fn exit_code(self) -> i32 {
        match self {
            ExtensionStatus::Extended => 0,
            ExtensionStatus::I2Obstruction => 2,
            ExtensionStatus::NotAMeasure => 3,
        }
    }
}

impl fmt::Display for ExtensionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtensionStatus::Extended => "extended",
            ExtensionStatus::I2Obstruction => "i2_obstruction",
            ExtensionStatus::NotAMeasure => "not_a_measure",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ExtensionResult {
    /// Representing matrix: `μ(p) ≈ trace(rho·p)`.
    pub rho: Element,
    /// `max |μ(p) − trace(rho·p)|` over every projection checked.
    pub residual: f64,
    pub verified_on: usize,
    pub status: ExtensionStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyOrder {
    Canonical,
    Reversed,
    Shuffled(u64),
}

#[derive(Clone, Copy, Debug)]
pub struct ReconstructOptions {
    pub tol: f64,
    pub verify_samples: usize,
    pub seed: u64,
    pub order: FamilyOrder,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            verify_samples: DEFAULT_VERIFY_SAMPLES,
            seed: 0,
            order: FamilyOrder::Canonical,
        }
    }
}

pub fn reconstruct(mu: &ScalarMeasure, tol: f64, verify_samples: usize, seed: u64) -> Result<ExtensionResult> {
    reconstruct_with(
        mu,
        &ReconstructOptions { tol, verify_samples, seed, order: FamilyOrder::Canonical },
    )
}

/// Solves `trace(rho_j·p) = μ(p)` over a spanning family in every block, then
/// measures the fit on the family and on `verify_samples` random projections.
pub fn reconstruct_with(mu: &ScalarMeasure, opts: &ReconstructOptions) -> Result<ExtensionResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let shape = mu.shape().clone();
    let mut blocks = Vec::with_capacity(shape.num_blocks());
    let mut checks: Vec<(Projection, Complex64)> = Vec::new();

    for (j, &n) in shape.blocks().iter().enumerate() {
        let family = spanning_projections(n)?.reordered(opts.order);
        let dim = n * n;
        let mut system = DMatrix::from_element(dim, dim, ZERO);
        let mut rhs = DVector::from_element(dim, ZERO);
        for (k, p) in family.projections.iter().enumerate() {
            let local = p.element().block(0);
            for a in 0..n {
                for b in 0..n {
                    system[(k, a * n + b)] = local[(b, a)];
                }
            }
            let embedded = Projection::trusted(Element::embed_block(&shape, j, local.clone())?, p.tol());
            let value = mu.evaluate(&embedded)?;
            rhs[k] = value;
            checks.push((embedded, value));
        }
        let solution = system.lu().solve(&rhs).ok_or(Error::SingularSystem(j))?;
        blocks.push(CMat::from_fn(n, n, |a, b| solution[a * n + b]));
    }
    let rho = Element::new(shape.clone(), blocks)?;

    let mut rng = random::rng(opts.seed);
    for i in 0..opts.verify_samples {
        let ranks = verification_ranks(&shape, i);
        let p = random::projection_with_rng(&shape, &ranks, &mut rng)?;
        let value = mu.evaluate(&p)?;
        checks.push((p, value));
    }

    let mut residual: f64 = 0.0;
    for (p, value) in &checks {
        residual = residual.max((value - rho.trace_product(p.element())?).norm());
    }
    let status = if residual <= opts.tol {
        ExtensionStatus::Extended
    } else if shape.has_i2_summand() {
        ExtensionStatus::I2Obstruction
    } else {
        ExtensionStatus::NotAMeasure
    };
    Ok(ExtensionResult { rho, residual, verified_on: checks.len(), status })
}

/// Sample `i` targets one block (or, every `k+1`-th sample, all blocks at
/// once) with ranks cycling through `1..=n_j−1`.
fn verification_ranks(shape: &AlgebraShape, i: usize) -> Vec<usize> {
    let k = shape.num_blocks();
    let target = i % (k + 1);
    let round = i / (k + 1);
    let cycle = |j: usize, n: usize| {
        let span = n.saturating_sub(1).max(1);
        (1 + (round + j) % span).min(n)
    };
    shape
        .blocks()
        .iter()
        .enumerate()
        .map(|(j, &n)| if target == k || target == j { cycle(j, n) } else { 0 })
        .collect()
}

fn spectral_sum(mu: &ScalarMeasure, a: &Element, tol: f64) -> Result<Complex64> {
    if a.max_abs() == 0.0 {
        return Ok(ZERO);
    }
    let spec = spectral_decompose(a, tol)?;
    let mut total = ZERO;
    for (&l, q) in spec.eigenvalues.iter().zip(&spec.projections) {
        total += mu.evaluate(q)? * l;
    }
    Ok(total)
}

/// `ω(a + ib) = Σ λ_i μ(q_i) + i Σ λ'_i μ(q'_i)` over the spectral
/// decompositions of the selfadjoint parts `a` and `b`.
pub fn omega(mu: &ScalarMeasure, x: &Element, tol: f64) -> Result<Complex64> {
    mu.shape().ensure_same(x.shape())?;
    let (a, b) = x.hermitian_parts();
    let re = spectral_sum(mu, &a, tol)?;
    let im = spectral_sum(mu, &b, tol)?;
    Ok(re + im * Complex64::new(0.0, 1.0))
}

/// `Σ_{n ≤ depth} 2^{-n} μ(e_n)` for `0 ≤ x ≤ 1`, via binary-digit projections.
pub fn omega_dyadic(mu: &ScalarMeasure, x: &Element, depth: u32) -> Result<Complex64> {
    mu.shape().ensure_same(x.shape())?;
    let mut total = ZERO;
    for (n, e) in dyadic_projections(x, depth)?.iter().enumerate() {
        total += mu.evaluate(e)? * 0.5f64.powi(n as i32 + 1);
    }
    Ok(total)
}

#[derive(Clone, Debug)]
pub struct LinearityAudit {
    pub trials: usize,
    pub max_commuting_defect: f64,
    pub max_general_defect: f64,
    /// General pair `(x, y)` with the largest defect.
    pub worst_pair: Option<(Element, Element)>,
}

/// Records `|ω(x+y) − ω(x) − ω(y)|` for `x, y ≥ 0`, `x + y ≤ 1`, both for
/// commuting pairs drawn from one spectral frame and for independent pairs.
pub fn linearity_audit(mu: &ScalarMeasure, trials: usize, seed: u64) -> Result<LinearityAudit> {
    let shape = mu.shape();
    let dim = shape.hilbert_dimension();
    let tol = 1e-9;
    let mut rng = random::rng(seed);
    let mut audit = LinearityAudit { trials, max_commuting_defect: 0.0, max_general_defect: 0.0, worst_pair: None };
    let defect = |x: &Element, y: &Element| -> Result<f64> {
        let sum = omega(mu, &(x + y), tol)?;
        Ok((sum - omega(mu, x, tol)? - omega(mu, y, tol)?).norm())
    };

    for _ in 0..trials {
        let frame = random::random_frame(shape, &mut rng);
        let a: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = a.iter().map(|&ai| rng.random::<f64>() * (1.0 - ai)).collect();
        let x = random::with_spectrum(shape, &frame, &a);
        let y = random::with_spectrum(shape, &frame, &b);
        audit.max_commuting_defect = audit.max_commuting_defect.max(defect(&x, &y)?);

        let mut x = random::random_positive_contraction(shape, &mut rng);
        let mut y = random::random_positive_contraction(shape, &mut rng);
        let top = (&x + &y).eigenvalues()[0];
        if top > 1.0 {
            x = x.scale_real(1.0 / top);
            y = y.scale_real(1.0 / top);
        }
        let d = defect(&x, &y)?;
        if d > audit.max_general_defect || audit.worst_pair.is_none() {
            audit.max_general_defect = audit.max_general_defect.max(d);
            audit.worst_pair = Some((x, y));
        }
    }
    Ok(audit)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormBound {
    /// `‖rho‖₁`, the norm of `x ↦ trace(rho·x)`.
    pub trace_norm: f64,
    /// `max |trace(rho·p)|` over the sampled projections.
    pub sup: f64,
    pub four_sup: f64,
}

/// Positive and negative spectral projections of the real and imaginary
/// Hermitian parts of `rho`; these attain `sup_p |Re β(p)|` and `sup_p |Im β(p)|`.
fn extremal_projections(rho: &Element) -> Result<Vec<Projection>> {
    let (a, b) = rho.hermitian_parts();
    let mut out = Vec::with_capacity(4);
    for h in [a, b] {
        let spec = spectral_decompose(&h, 1e-9)?;
        let mut pos = Element::zeros(rho.shape());
        let mut neg = Element::zeros(rho.shape());
        for (&l, q) in spec.eigenvalues.iter().zip(&spec.projections) {
            if l > 0.0 {
                pos = pos + q.element();
            } else if l < 0.0 {
                neg = neg + q.element();
            }
        }
        out.push(Projection::trusted(pos, 1e-9));
        out.push(Projection::trusted(neg, 1e-9));
    }
    Ok(out)
}

/// Compares `‖β‖ = ‖rho‖₁` with `4 sup_p |β(p)|` for `β(x) = trace(rho·x)`.
pub fn functional_norm_bound(rho: &Element, samples: usize, seed: u64) -> Result<NormBound> {
    let shape = rho.shape();
    let mut rng = random::rng(seed);
    let mut sup: f64 = 0.0;
    for p in extremal_projections(rho)? {
        sup = sup.max(rho.trace_product(p.element())?.norm());
    }
    for _ in 0..samples {
        let ranks = random::random_ranks(shape, &mut rng);
        let p = random::projection_with_rng(shape, &ranks, &mut rng)?;
        sup = sup.max(rho.trace_product(p.element())?.norm());
    }
    Ok(NormBound { trace_norm: rho.trace_norm(), sup, four_sup: 4.0 * sup })
}

/// A finitely additive `ℂ^d`-valued measure, normed by the max coordinate.
#[derive(Clone, Debug)]
pub struct VectorMeasure {
    shape: AlgebraShape,
    components: Vec<ScalarMeasure>,
}

impl VectorMeasure {
    pub fn new(components: Vec<ScalarMeasure>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("vector measure needs at least one component".into()))?;
        let shape = first.shape().clone();
        for c in &components {
            shape.ensure_same(c.shape())?;
        }
        Ok(Self { shape, components })
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ScalarMeasure] {
        &self.components
    }

    pub fn evaluate(&self, p: &Projection) -> Result<Vec<Complex64>> {
        self.components.iter().map(|c| c.evaluate(p)).collect()
    }
}

fn max_coordinate(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Bounded linear operator `T(x)_i = trace(rho_i·x)` extending a vector measure.
#[derive(Clone, Debug)]
pub struct OperatorRep {
    pub shape: AlgebraShape,
    pub rhos: Vec<Element>,
    /// Largest `‖T(x)‖_∞` seen over sampled `x` with `‖x‖ = 1`.
    pub norm_bound: f64,
    /// Largest `‖m(p)‖_∞` seen over sampled projections.
    pub k_bound: f64,
    pub residuals: Vec<f64>,
}

impl OperatorRep {
    pub fn dimension(&self) -> usize {
        self.rhos.len()
    }

    pub fn apply(&self, x: &Element) -> Result<Vec<Complex64>> {
        self.rhos.iter().map(|r| r.trace_product(x)).collect()
    }
}

pub fn extend_vector_measure(m: &VectorMeasure, tol: f64, seed: u64) -> Result<OperatorRep> {
    extend_vector_measure_with(m, tol, seed, DEFAULT_NORM_SAMPLES)
}

/// Reconstructs every coordinate and estimates `‖T‖` and `K` by sampling;
/// fails if the sampled operator norm exceeds `4K`.
pub fn extend_vector_measure_with(m: &VectorMeasure, tol: f64, seed: u64, samples: usize) -> Result<OperatorRep> {
    let shape = m.shape().clone();
    let mut rhos = Vec::with_capacity(m.dimension());
    let mut residuals = Vec::with_capacity(m.dimension());
    for (index, component) in m.components().iter().enumerate() {
        let result = reconstruct(component, tol, DEFAULT_VERIFY_SAMPLES, seed.wrapping_add(index as u64))?;
        if result.status != ExtensionStatus::Extended {
            return Err(Error::Component { index, status: result.status });
        }
        rhos.push(result.rho);
        residuals.push(result.residual);
    }

    let mut rng = random::rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut k_bound: f64 = 0.0;
    for rho in &rhos {
        for p in extremal_projections(rho)? {
            k_bound = k_bound.max(max_coordinate(&m.evaluate(&p)?));
        }
    }
    for _ in 0..samples {
        let ranks = random::random_ranks(&shape, &mut rng);
        let p = random::projection_with_rng(&shape, &ranks, &mut rng)?;
        k_bound = k_bound.max(max_coordinate(&m.evaluate(&p)?));
    }

    let op = |x: &Element| -> Result<f64> {
        let mut best: f64 = 0.0;
        for r in &rhos {
            best = best.max(r.trace_product(x)?.norm());
        }
        Ok(best)
    };
    let mut norm_bound: f64 = 0.0;
    // x = V U* attains ‖rho‖₁ for rho = U Σ V*
    for rho in &rhos {
        let x = rho.map_blocks(|b| {
            let svd = b.clone().svd(true, true);
            let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
            v_t.adjoint() * u.adjoint()
        });
        norm_bound = norm_bound.max(op(&x)?);
    }
    for i in 0..samples {
        let x = if i % 2 == 0 {
            let blocks = shape.blocks().iter().map(|&n| random_unitary(n, &mut rng)).collect();
            Element::new(shape.clone(), blocks)?
        } else {
            let g = random::random_element(&shape, &mut rng);
            let norm = g.operator_norm();
            g.scale_real(1.0 / norm)
        };
        norm_bound = norm_bound.max(op(&x)?);
    }
    if norm_bound > 4.0 * k_bound + 1e-9 {
        return Err(Error::Internal(format!(
            "sampled operator norm {norm_bound} exceeds 4K = {}",
            4.0 * k_bound
        )));
    }
    Ok(OperatorRep { shape, rhos, norm_bound, k_bound, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexamples::{bloch_projection, qubit_frame_measure, BlochVector};
    use crate::measures::{Table, TableOracle};
    use approx::assert_abs_diff_eq;

    fn diag(blocks: Vec<usize>, d: &[f64]) -> Element {
        Element::real_diagonal(&AlgebraShape::new(blocks).unwrap(), d).unwrap()
    }

    fn cubic() -> ScalarMeasure {
        qubit_frame_measure(1.0, &[0.0, 0.5]).unwrap()
    }

    #[test]
    fn spanning_family_sizes_and_rank() {
        let f1 = spanning_projections(1).unwrap();
        assert_eq!(f1.projections.len(), 1);
        assert_eq!(f1.projections[0].element(), &Element::identity(&AlgebraShape::factor(1).unwrap()));
        for n in 1..=5 {
            let f = spanning_projections(n).unwrap();
            assert_eq!(f.projections.len(), n * n);
            assert_eq!(f.gram_rank(), n * n);
            for p in &f.projections {
                assert!(crate::algebra::is_projection(p.element(), 1e-12).unwrap());
                assert_eq!(p.rank(), 1);
            }
        }
        assert!(spanning_projections(0).is_err());
    }

    #[test]
    fn spanning_family_m2_gram_determinant() {
        // Gram entries: trace(p_k p_l) = |<v_k, v_l>|²
        let f = spanning_projections(2).unwrap();
        let m = f.projections.len();
        let gram = DMatrix::from_fn(m, m, |k, l| {
            f.projections[k].element().trace_product(f.projections[l].element()).unwrap().re
        });
        // e11, e22, +x, +y: [[1,0,½,½],[0,1,½,½],[½,½,1,½],[½,½,½,1]] has determinant 1/4
        assert_abs_diff_eq!(gram.determinant(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn reconstruct_round_trip_random() {
        let shape = AlgebraShape::new(vec![3, 4]).unwrap();
        let rho0 = random::random_element(&shape, &mut random::rng(11));
        let res = reconstruct(&ScalarMeasure::trace_form(rho0.clone()), 1e-8, 64, 3).unwrap();
        assert_eq!(res.status, ExtensionStatus::Extended);
        assert!(res.rho.distance(&rho0).unwrap() <= 1e-9);
        assert_eq!(res.verified_on, 64 + 9 + 16);
    }

    #[test]
    fn reconstruct_zero_measure() {
        let shape = AlgebraShape::new(vec![1, 3]).unwrap();
        let res = reconstruct(&ScalarMeasure::zero(&shape), 1e-8, 16, 0).unwrap();
        assert_eq!(res.residual, 0.0);
        assert_eq!(res.rho.max_abs(), 0.0);
        assert_eq!(res.status, ExtensionStatus::Extended);
    }

    #[test]
    fn reconstruct_cubic_is_i2_obstruction() {
        let res = reconstruct(&cubic(), 1e-6, 64, 0).unwrap();
        assert_eq!(res.status, ExtensionStatus::I2Obstruction);
        assert!(res.residual >= 0.05, "{}", res.residual);
    }

    #[test]
    fn reconstruct_not_a_measure() {
        let shape = AlgebraShape::factor(3).unwrap();
        let t = Table::new(Some(TableOracle::TracePower { exponent: 2, scale: 1.0 }));
        let res = reconstruct(&ScalarMeasure::table(shape, t).unwrap(), 1e-8, 64, 0).unwrap();
        assert_eq!(res.status, ExtensionStatus::NotAMeasure);
        // every spanning projection is rank one, so the fitted rho is the identity
        assert!(res.rho.distance(&diag(vec![3], &[1.0, 1.0, 1.0])).unwrap() < 1e-12);
        assert_abs_diff_eq!(res.residual, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn reconstruct_detects_cross_block_nonadditivity() {
        let shape = AlgebraShape::new(vec![1, 1]).unwrap();
        let t = Table::new(Some(TableOracle::TracePower { exponent: 2, scale: 1.0 }));
        let res = reconstruct(&ScalarMeasure::table(shape, t).unwrap(), 1e-8, 8, 0).unwrap();
        assert_eq!(res.status, ExtensionStatus::NotAMeasure);
    }

    #[test]
    fn reconstruct_unevaluable_is_error() {
        let shape = AlgebraShape::factor(3).unwrap();
        let mu = ScalarMeasure::table(shape, Table::new(None)).unwrap();
        assert!(matches!(reconstruct(&mu, 1e-8, 4, 0), Err(Error::Unevaluable(_))));
    }

    #[test]
    fn orderings_agree() {
        let shape = AlgebraShape::new(vec![3]).unwrap();
        let rho0 = random::random_hermitian(&shape, &mut random::rng(2));
        let mu = ScalarMeasure::trace_form(rho0);
        let a = reconstruct_with(&mu, &ReconstructOptions { order: FamilyOrder::Reversed, ..Default::default() }).unwrap();
        let b = reconstruct_with(&mu, &ReconstructOptions { order: FamilyOrder::Shuffled(9), ..Default::default() }).unwrap();
        assert!(a.rho.distance(&b.rho).unwrap() <= 1e-12);
    }

    #[test]
    fn omega_trace_form_matches_trace() {
        let shape = AlgebraShape::new(vec![3, 2]).unwrap();
        let mut rng = random::rng(4);
        let rho = random::random_element(&shape, &mut rng);
        let mu = ScalarMeasure::trace_form(rho.clone());
        for _ in 0..10 {
            let x = random::random_element(&shape, &mut rng);
            let w = omega(&mu, &x, 1e-9).unwrap();
            assert!((w - rho.trace_product(&x).unwrap()).norm() <= 1e-9);
        }
    }

    #[test]
    fn omega_on_projection_is_measure() {
        let mu = cubic();
        let n = BlochVector::new(0.6, 0.0, 0.8).unwrap();
        let p = bloch_projection(&n);
        assert_abs_diff_eq!(omega(&mu, p.element(), 1e-9).unwrap().re, mu.evaluate(&p).unwrap().re, epsilon = 1e-12);
    }

    #[test]
    fn omega_cubic_on_diagonal() {
        let w = omega(&cubic(), &diag(vec![2], &[2.0, -1.0]), 1e-9).unwrap();
        assert_abs_diff_eq!(w.re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.im, 0.0);
    }

    #[test]
    fn omega_dyadic_matches_spectral() {
        let shape = AlgebraShape::new(vec![3, 1]).unwrap();
        let mut rng = random::rng(8);
        let mu = ScalarMeasure::trace_form(random::random_hermitian(&shape, &mut rng));
        let x = random::random_positive_contraction(&shape, &mut rng);
        let a = omega(&mu, &x, 1e-9).unwrap();
        let b = omega_dyadic(&mu, &x, 30).unwrap();
        assert!((a - b).norm() <= 1e-7);
    }

    #[test]
    fn audit_trace_form_is_linear() {
        let shape = AlgebraShape::new(vec![2, 3]).unwrap();
        let mu = ScalarMeasure::trace_form(random::random_hermitian(&shape, &mut random::rng(1)));
        let a = linearity_audit(&mu, 50, 2).unwrap();
        assert!(a.max_commuting_defect <= 1e-8);
        assert!(a.max_general_defect <= 1e-8);
    }

    #[test]
    fn audit_cubic_is_quasi_linear_only() {
        let a = linearity_audit(&cubic(), 200, 5).unwrap();
        assert!(a.max_commuting_defect <= 1e-8, "{}", a.max_commuting_defect);
        assert!(a.max_general_defect >= 0.05, "{}", a.max_general_defect);
        let (x, y) = a.worst_pair.unwrap();
        assert!((&x + &y).eigenvalues()[0] <= 1.0 + 1e-12);
        assert!(x.eigenvalues().last().unwrap() >= &-1e-12);
    }

    #[test]
    fn audit_is_deterministic() {
        let a = linearity_audit(&cubic(), 20, 77).unwrap();
        let b = linearity_audit(&cubic(), 20, 77).unwrap();
        assert_eq!(a.max_general_defect.to_bits(), b.max_general_defect.to_bits());
        assert_eq!(a.max_commuting_defect.to_bits(), b.max_commuting_defect.to_bits());
    }

    #[test]
    fn norm_bound_examples() {
        let nb = functional_norm_bound(&diag(vec![2], &[1.0, -1.0]), 20, 0).unwrap();
        assert_abs_diff_eq!(nb.trace_norm, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(nb.sup, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(nb.four_sup, 4.0, epsilon = 1e-12);

        let zero = Element::zeros(&AlgebraShape::factor(3).unwrap());
        let nb = functional_norm_bound(&zero, 20, 0).unwrap();
        assert_eq!((nb.trace_norm, nb.four_sup), (0.0, 0.0));

        let imag = diag(vec![2], &[1.0, -1.0]).scale(Complex64::new(0.0, 1.0));
        let nb = functional_norm_bound(&imag, 20, 0).unwrap();
        assert_abs_diff_eq!(nb.trace_norm, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(nb.four_sup, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn vector_lift_scalar_case_matches_reconstruct() {
        let shape = AlgebraShape::factor(3).unwrap();
        let mu = ScalarMeasure::trace_form(random::random_hermitian(&shape, &mut random::rng(6)));
        let op = extend_vector_measure(&VectorMeasure::new(vec![mu.clone()]).unwrap(), 1e-8, 12).unwrap();
        let direct = reconstruct(&mu, 1e-8, DEFAULT_VERIFY_SAMPLES, 12).unwrap();
        assert_eq!(op.rhos[0], direct.rho);
        assert!(op.norm_bound <= 4.0 * op.k_bound);
    }

    #[test]
    fn vector_lift_two_components() {
        let shape = AlgebraShape::factor(3).unwrap();
        let mut rng = random::rng(21);
        let r1 = random::random_hermitian(&shape, &mut rng);
        let r2 = random::random_hermitian(&shape, &mut rng);
        let m = VectorMeasure::new(vec![ScalarMeasure::trace_form(r1.clone()), ScalarMeasure::trace_form(r2.clone())]).unwrap();
        let op = extend_vector_measure(&m, 1e-8, 1).unwrap();
        assert!(op.rhos[0].distance(&r1).unwrap() <= 1e-9);
        assert!(op.rhos[1].distance(&r2).unwrap() <= 1e-9);
        let x = random::random_element(&shape, &mut rng);
        let tx = op.apply(&x).unwrap();
        assert!((tx[1] - r2.trace_product(&x).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn vector_lift_propagates_component_failure() {
        let shape = AlgebraShape::factor(2).unwrap();
        let m = VectorMeasure::new(vec![ScalarMeasure::zero(&shape), cubic()]).unwrap();
        assert!(matches!(
            extend_vector_measure(&m, 1e-8, 0),
            Err(Error::Component { index: 1, status: ExtensionStatus::I2Obstruction })
        ));
        let mixed = VectorMeasure::new(vec![ScalarMeasure::zero(&AlgebraShape::factor(3).unwrap()), cubic()]);
        assert!(matches!(mixed, Err(Error::ShapeMismatch { .. })));
    }
}
