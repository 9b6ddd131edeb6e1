//! Seeded generators for test points: unitaries, projections, selfadjoint
//! elements and positive contractions.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraShape, CMat, Element, Projection};
use crate::error::{Error, Result};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(n: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(n, n, |_, _| gaussian(rng))
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` folded back into `Q`.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMat {
    let qr = gaussian_matrix(n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Projection onto the span of the given orthonormal columns.
pub(crate) fn column_projector(u: &CMat, cols: std::ops::Range<usize>) -> CMat {
    let n = u.nrows();
    let mut p = CMat::zeros(n, n);
    for k in cols {
        let v: DVector<Complex64> = u.column(k).into_owned();
        p += &v * v.adjoint();
    }
    p
}

fn check_ranks(shape: &AlgebraShape, ranks: &[usize]) -> Result<()> {
    if ranks.len() != shape.num_blocks() {
        return Err(Error::InvalidArgument(format!(
            "expected {} ranks, got {}",
            shape.num_blocks(),
            ranks.len()
        )));
    }
    for (j, (&r, &n)) in ranks.iter().zip(shape.blocks()).enumerate() {
        if r > n {
            return Err(Error::RankOutOfRange { block: j, rank: r, size: n });
        }
    }
    Ok(())
}

pub fn projection_with_rng(shape: &AlgebraShape, ranks: &[usize], rng: &mut impl Rng) -> Result<Projection> {
    check_ranks(shape, ranks)?;
    let blocks = shape
        .blocks()
        .iter()
        .zip(ranks)
        .map(|(&n, &r)| column_projector(&random_unitary(n, rng), 0..r))
        .collect();
    Ok(Projection::trusted(Element::new(shape.clone(), blocks)?, 1e-9))
}

/// Seeded random projection with the given rank in each block.
pub fn random_projection(shape: &AlgebraShape, ranks: &[usize], seed: u64) -> Result<Projection> {
    projection_with_rng(shape, ranks, &mut rng(seed))
}

/// Two orthogonal projections with the given per-block ranks, obtained by
/// splitting the columns of one random unitary per block.
pub fn orthogonal_pair(
    shape: &AlgebraShape,
    ranks_p: &[usize],
    ranks_q: &[usize],
    rng: &mut impl Rng,
) -> Result<(Projection, Projection)> {
    check_ranks(shape, ranks_p)?;
    check_ranks(shape, ranks_q)?;
    let mut bp = Vec::with_capacity(shape.num_blocks());
    let mut bq = Vec::with_capacity(shape.num_blocks());
    for (j, &n) in shape.blocks().iter().enumerate() {
        let (rp, rq) = (ranks_p[j], ranks_q[j]);
        if rp + rq > n {
            return Err(Error::RankOutOfRange { block: j, rank: rp + rq, size: n });
        }
        let u = random_unitary(n, rng);
        bp.push(column_projector(&u, 0..rp));
        bq.push(column_projector(&u, rp..rp + rq));
    }
    Ok((
        Projection::trusted(Element::new(shape.clone(), bp)?, 1e-9),
        Projection::trusted(Element::new(shape.clone(), bq)?, 1e-9),
    ))
}

/// Uniformly random ranks `0..=n_j` per block.
pub fn random_ranks(shape: &AlgebraShape, rng: &mut impl Rng) -> Vec<usize> {
    shape.blocks().iter().map(|&n| rng.random_range(0..=n)).collect()
}

/// Selfadjoint element with entries of order one (GUE-like per block).
pub fn random_hermitian(shape: &AlgebraShape, rng: &mut impl Rng) -> Element {
    let blocks = shape
        .blocks()
        .iter()
        .map(|&n| {
            let g = gaussian_matrix(n, rng);
            (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
        })
        .collect();
    Element::new(shape.clone(), blocks).expect("blocks match shape")
}

/// Arbitrary complex element with Gaussian entries.
pub fn random_element(shape: &AlgebraShape, rng: &mut impl Rng) -> Element {
    let blocks = shape.blocks().iter().map(|&n| gaussian_matrix(n, rng)).collect();
    Element::new(shape.clone(), blocks).expect("blocks match shape")
}

/// `U diag(values) U*` per block, with `values` read across all blocks.
pub fn with_spectrum(shape: &AlgebraShape, unitaries: &[CMat], values: &[f64]) -> Element {
    let mut offset = 0;
    let blocks = shape
        .blocks()
        .iter()
        .zip(unitaries)
        .map(|(&n, u)| {
            let d = CMat::from_fn(n, n, |r, c| {
                if r == c {
                    Complex64::new(values[offset + r], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            offset += n;
            u * d * u.adjoint()
        })
        .collect();
    Element::new(shape.clone(), blocks).expect("blocks match shape")
}

pub fn random_frame(shape: &AlgebraShape, rng: &mut impl Rng) -> Vec<CMat> {
    shape.blocks().iter().map(|&n| random_unitary(n, rng)).collect()
}

/// Positive contraction `0 ≤ x ≤ 1` with uniformly drawn eigenvalues.
pub fn random_positive_contraction(shape: &AlgebraShape, rng: &mut impl Rng) -> Element {
    let frame = random_frame(shape, rng);
    let values: Vec<f64> = (0..shape.hilbert_dimension()).map(|_| rng.random::<f64>()).collect();
    with_spectrum(shape, &frame, &values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::is_projection;

    #[test]
    fn extreme_ranks() {
        let s = AlgebraShape::new(vec![3, 1, 4]).unwrap();
        let z = random_projection(&s, &[0, 0, 0], 1).unwrap();
        assert!(z.element().max_abs() < 1e-15);
        let id = random_projection(&s, &[3, 1, 4], 1).unwrap();
        assert!(id.element().distance(&Element::identity(&s)).unwrap() < 1e-12);
    }

    #[test]
    fn rank_one_in_m3() {
        let s = AlgebraShape::factor(3).unwrap();
        let p = random_projection(&s, &[1], 7).unwrap();
        let x = p.element();
        assert!((x.trace().re - 1.0).abs() <= 1e-10);
        assert!((x * x - x).operator_norm() <= 1e-10);
        assert!(is_projection(x, 1e-10).unwrap());
    }

    #[test]
    fn deterministic_for_seed() {
        let s = AlgebraShape::new(vec![2, 3]).unwrap();
        let a = random_projection(&s, &[1, 2], 99).unwrap();
        let b = random_projection(&s, &[1, 2], 99).unwrap();
        assert_eq!(a, b);
        let c = random_projection(&s, &[1, 2], 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rank_out_of_range() {
        let s = AlgebraShape::factor(3).unwrap();
        assert!(matches!(
            random_projection(&s, &[4], 0),
            Err(Error::RankOutOfRange { block: 0, rank: 4, size: 3 })
        ));
        assert!(random_projection(&s, &[1, 1], 0).is_err());
    }

    #[test]
    fn orthogonal_pair_is_orthogonal() {
        let s = AlgebraShape::new(vec![4, 2]).unwrap();
        let (p, q) = orthogonal_pair(&s, &[2, 1], &[2, 1], &mut rng(3)).unwrap();
        assert!((p.element() * q.element()).operator_norm() < 1e-12);
        assert!(orthogonal_pair(&s, &[3, 1], &[2, 0], &mut rng(3)).is_err());
    }
}
