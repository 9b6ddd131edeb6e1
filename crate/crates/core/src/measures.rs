//! Finitely additive measures on the projection lattice and the functionals
//! built from them: variation `V(p)`, `α(p)`, the positivity shift and
//! centre normalization.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{central_projections, AlgebraShape, Element, Projection, ZERO};
use crate::counterexamples::BlochVector;
use crate::error::{Error, Result};
use crate::random::{self, orthogonal_pair};

/// Selfadjointness tolerance for representing matrices.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Eigenvalues above this are treated as nonnegative.
pub const PSD_THRESHOLD: f64 = -1e-10;

/// Odd real function on the unit sphere, used by qubit frame measures.
#[derive(Clone, Debug, PartialEq)]
pub enum OddFunction {
    /// `Σ coeffs[k] · n_z^k`; every even-power coefficient is zero.
    PolyNz { coeffs: Vec<f64> },
}

impl OddFunction {
    pub fn poly_nz(coeffs: Vec<f64>) -> Result<Self> {
        for (k, &a) in coeffs.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::Representation(format!("coefficient {k} is not finite")));
            }
            if k % 2 == 0 && a != 0.0 {
                return Err(Error::Representation(format!(
                    "coefficient of n_z^{k} must be zero for an odd function"
                )));
            }
        }
        Ok(OddFunction::PolyNz { coeffs })
    }

    /// `Σ a_k n_z^{2k+1}` from the coefficients of the odd powers only.
    pub fn from_odd_powers(odd_coeffs: &[f64]) -> Result<Self> {
        let mut coeffs = vec![0.0; 2 * odd_coeffs.len()];
        for (k, &a) in odd_coeffs.iter().enumerate() {
            coeffs[2 * k + 1] = a;
        }
        Self::poly_nz(coeffs)
    }

    pub fn eval(&self, n: &BlochVector) -> f64 {
        match self {
            OddFunction::PolyNz { coeffs } => coeffs.iter().rev().fold(0.0, |acc, &a| acc * n.z() + a),
        }
    }

    /// `sup |g|` over the sphere, bounded by the sum of absolute coefficients.
    pub fn sup_bound(&self) -> f64 {
        match self {
            OddFunction::PolyNz { coeffs } => coeffs.iter().map(|a| a.abs()).sum(),
        }
    }
}

/// Entry key: block sizes plus every entry rounded to 12 decimal digits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjectionKey(Vec<i64>);

impl ProjectionKey {
    pub fn of(x: &Element) -> Self {
        let mut key: Vec<i64> = x.shape().blocks().iter().map(|&n| n as i64).collect();
        for b in x.blocks() {
            for z in b.iter() {
                key.push((z.re * 1e12).round() as i64);
                key.push((z.im * 1e12).round() as i64);
            }
        }
        ProjectionKey(key)
    }
}

pub type OracleFn = dyn Fn(&Projection) -> Complex64 + Send + Sync;

/// Fallback consulted when a projection is missing from a table.
#[derive(Clone)]
pub enum TableOracle {
    /// `μ(p) = scale · trace(p)^exponent`.
    TracePower { exponent: u32, scale: f64 },
    Custom(Arc<OracleFn>),
}

impl TableOracle {
    fn call(&self, p: &Projection) -> Complex64 {
        match self {
            TableOracle::TracePower { exponent, scale } => {
                Complex64::new(scale * p.element().trace().re.powi(*exponent as i32), 0.0)
            }
            TableOracle::Custom(f) => f(p),
        }
    }
}

impl fmt::Debug for TableOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableOracle::TracePower { exponent, scale } => f
                .debug_struct("TracePower")
                .field("exponent", exponent)
                .field("scale", scale)
                .finish(),
            TableOracle::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Black-box measure: tabulated values with an optional fallback oracle.
#[derive(Clone, Debug, Default)]
pub struct Table {
    entries: Vec<(Element, Complex64)>,
    index: HashMap<ProjectionKey, usize>,
    oracle: Option<TableOracle>,
}

impl Table {
    pub fn new(oracle: Option<TableOracle>) -> Self {
        Self { entries: Vec::new(), index: HashMap::new(), oracle }
    }

    pub fn insert(&mut self, p: Element, value: Complex64) {
        let key = ProjectionKey::of(&p);
        match self.index.get(&key) {
            Some(&i) => self.entries[i].1 = value,
            None => {
                self.index.insert(key, self.entries.len());
                self.entries.push((p, value));
            }
        }
    }

    pub fn entries(&self) -> &[(Element, Complex64)] {
        &self.entries
    }

    pub fn oracle(&self) -> Option<&TableOracle> {
        self.oracle.as_ref()
    }

    fn lookup(&self, p: &Projection) -> Option<Complex64> {
        self.index
            .get(&ProjectionKey::of(p.element()))
            .map(|&i| self.entries[i].1)
            .or_else(|| self.oracle.as_ref().map(|o| o.call(p)))
    }
}

#[derive(Clone, Debug)]
pub enum Representation {
    /// `μ(p) = trace(rho · p)`.
    TraceForm { rho: Element },
    /// Qubit frame function: `μ(0) = 0`, `μ(1) = c`, `μ(p(n)) = c/2 + odd(n)`.
    Frame2 { c: f64, odd: OddFunction },
    Table(Table),
}

/// A complex-valued function on `P(A)` meant to be finitely additive and bounded.
#[derive(Clone, Debug)]
pub struct ScalarMeasure {
    shape: AlgebraShape,
    repr: Representation,
}

impl ScalarMeasure {
    pub fn trace_form(rho: Element) -> Self {
        Self { shape: rho.shape().clone(), repr: Representation::TraceForm { rho } }
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        Self::trace_form(Element::zeros(shape))
    }

    pub fn frame2(c: f64, odd: OddFunction) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::Representation("frame constant must be finite".into()));
        }
        Ok(Self { shape: AlgebraShape::factor(2)?, repr: Representation::Frame2 { c, odd } })
    }

    pub fn table(shape: AlgebraShape, table: Table) -> Result<Self> {
        for (p, _) in table.entries() {
            shape.ensure_same(p.shape())?;
        }
        Ok(Self { shape, repr: Representation::Table(table) })
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    /// Representing matrix, for trace-form measures.
    pub fn rho(&self) -> Option<&Element> {
        match &self.repr {
            Representation::TraceForm { rho } => Some(rho),
            _ => None,
        }
    }

    pub fn evaluate(&self, p: &Projection) -> Result<Complex64> {
        self.shape.ensure_same(p.shape())?;
        match &self.repr {
            Representation::TraceForm { rho } => rho.trace_product(p.element()),
            Representation::Frame2 { c, odd } => {
                let t = p.element().trace().re;
                if t < 0.5 {
                    Ok(ZERO)
                } else if t > 1.5 {
                    Ok(Complex64::new(*c, 0.0))
                } else {
                    let n = BlochVector::from_projection(p)?;
                    Ok(Complex64::new(c / 2.0 + odd.eval(&n), 0.0))
                }
            }
            Representation::Table(table) => table
                .lookup(p)
                .ok_or_else(|| Error::Unevaluable("no table entry and no fallback oracle".into())),
        }
    }

    /// `μ = μ_re + i μ_im` with both parts real trace-form measures.
    pub fn split_real_imag(&self) -> Result<(ScalarMeasure, ScalarMeasure)> {
        let rho = self.trace_form_rho()?;
        let (a, b) = rho.hermitian_parts();
        Ok((Self::trace_form(a), Self::trace_form(b)))
    }

    fn trace_form_rho(&self) -> Result<&Element> {
        self.rho()
            .ok_or_else(|| Error::Unsupported("operation requires a trace-form measure".into()))
    }

    fn hermitian_rho(&self) -> Result<&Element> {
        let rho = self.trace_form_rho()?;
        let defect = rho.selfadjoint_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::Unsupported(format!(
                "representing matrix is not Hermitian (defect {defect:e}); split into real and imaginary parts first"
            )));
        }
        Ok(rho)
    }
}

/// Evidence for additivity on orthogonal pairs and for boundedness.
#[derive(Clone, Debug)]
pub struct AdditivityReport {
    pub trials: usize,
    pub max_violation: f64,
    pub worst_pair: Option<(Projection, Projection)>,
    pub bound_estimate: f64,
    /// Trials dropped because the measure could not be evaluated.
    pub skipped: usize,
}

/// Samples orthogonal pairs `(p, q)` by splitting random unitaries and records
/// `max |μ(p+q) − μ(p) − μ(q)|` and `max |μ(·)|` over everything evaluated.
pub fn additivity_check(mu: &ScalarMeasure, trials: usize, seed: u64, tol: f64) -> AdditivityReport {
    let shape = mu.shape();
    let mut rng = random::rng(seed);
    let mut report = AdditivityReport {
        trials,
        max_violation: 0.0,
        worst_pair: None,
        bound_estimate: 0.0,
        skipped: 0,
    };
    for _ in 0..trials {
        let ranks_p = random::random_ranks(shape, &mut rng);
        let ranks_q: Vec<usize> = shape
            .blocks()
            .iter()
            .zip(&ranks_p)
            .map(|(&n, &r)| rng.random_range(0..=n - r))
            .collect();
        let (p, q) = orthogonal_pair(shape, &ranks_p, &ranks_q, &mut rng).expect("ranks fit by construction");
        let p = Projection::trusted(p.into_element(), tol);
        let q = Projection::trusted(q.into_element(), tol);
        let sum = Projection::trusted(p.element() + q.element(), tol);
        let values = (mu.evaluate(&p), mu.evaluate(&q), mu.evaluate(&sum));
        let (vp, vq, vs) = match values {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            _ => {
                report.skipped += 1;
                continue;
            }
        };
        report.bound_estimate = report.bound_estimate.max(vp.norm()).max(vq.norm()).max(vs.norm());
        let violation = (vs - vp - vq).norm();
        if violation > report.max_violation || report.worst_pair.is_none() {
            report.max_violation = report.max_violation.max(violation);
            report.worst_pair = Some((p, q));
        }
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationAlpha {
    /// `V(p) = sup{|μ(e)| : e ≤ p}`.
    pub variation: f64,
    /// `α(p) = sup{μ(e) : e ≤ p}`.
    pub alpha: f64,
}

/// Exact `V(p)` and `α(p)` for a real trace-form measure.
///
/// Subprojections of `p` are the projections onto subspaces of its range, and
/// `μ(e)` is extremized by spectral subspaces of the compression `p·rho·p`:
/// `α(p)` sums its positive eigenvalues and `V(p)` is the larger of the
/// positive and negative eigenvalue masses.
pub fn variation_and_alpha(mu: &ScalarMeasure, p: &Projection) -> Result<VariationAlpha> {
    let rho = mu.hermitian_rho()?;
    rho.shape().ensure_same(p.shape())?;
    let compressed = p.element() * rho * p.element();
    let (pos, neg) = compressed.eigenvalues().iter().fold((0.0, 0.0), |(pos, neg), &l| {
        if l > 0.0 {
            (pos + l, neg)
        } else {
            (pos, neg - l)
        }
    });
    Ok(VariationAlpha { variation: f64::max(pos, neg), alpha: pos })
}

/// `α(1)·I − rho`, a positive measure, for a real trace-form measure on `M_n`.
pub fn positivity_shift(mu: &ScalarMeasure) -> Result<ScalarMeasure> {
    let rho = mu.hermitian_rho()?;
    if rho.shape().num_blocks() != 1 {
        return Err(Error::Unsupported("positivity shift needs a single-block algebra".into()));
    }
    let one = Projection::identity(rho.shape());
    let alpha = variation_and_alpha(mu, &one)?.alpha;
    let shifted = &Element::identity(rho.shape()).scale_real(alpha) - rho;
    let min = shifted.eigenvalues().last().copied().unwrap_or(0.0);
    if min < PSD_THRESHOLD {
        return Err(Error::Internal(format!("shifted measure has eigenvalue {min:e}")));
    }
    Ok(ScalarMeasure::trace_form(shifted))
}

#[derive(Clone, Debug)]
pub struct CentreNormalization {
    /// `trace(rho_j)/n_j` per block.
    pub sigma: Vec<f64>,
    pub normalized: ScalarMeasure,
    /// Trace norm of the centred matrix.
    pub scale: f64,
}

/// Removes the central part of a real trace-form measure and rescales so the
/// extension has norm one on the selfadjoint unit ball, after which `α(1) = ½`.
pub fn centre_normalize(mu: &ScalarMeasure) -> Result<CentreNormalization> {
    let rho = mu.hermitian_rho()?;
    let shape = rho.shape();
    let sigma: Vec<f64> = rho
        .blocks()
        .iter()
        .map(|b| b.trace().re / b.nrows() as f64)
        .collect();
    let central = central_projections(shape)
        .iter()
        .zip(&sigma)
        .fold(Element::zeros(shape), |acc, (z, &s)| acc + z.element().scale_real(s));
    let centred = rho - &central;
    let scale = centred.trace_norm();
    if scale <= HERMITIAN_TOL {
        return Err(Error::DegenerateMeasure("measure is central; nothing left after centring".into()));
    }
    let normalized = ScalarMeasure::trace_form(centred.scale_real(1.0 / scale));
    let alpha = variation_and_alpha(&normalized, &Projection::identity(shape))?.alpha;
    if (alpha - 0.5).abs() > 1e-9 {
        return Err(Error::Internal(format!("normalized measure has α(1) = {alpha}, expected 0.5")));
    }
    Ok(CentreNormalization { sigma, normalized, scale })
}
