//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::time::Instant;

use rand::Rng;

use projmeasure::counterexamples::DEFAULT_GRID;
use projmeasure::random::{self, random_frame, with_spectrum};
use projmeasure::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn shapes(blocks: &[&[usize]]) -> Vec<AlgebraShape> {
    blocks.iter().map(|b| AlgebraShape::new(b.to_vec()).unwrap()).collect()
}

/// Round-trip of trace-form measures on blocks of size ≠ 2.
fn round_trip() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut all_extended = true;
    let mut cases = 0;
    for (s, shape) in shapes(&[&[3], &[4], &[3, 5], &[1, 3, 4]]).iter().enumerate() {
        for i in 0..100u64 {
            let seed = 1000 * s as u64 + i;
            let rho0 = random::random_hermitian(shape, &mut random::rng(seed));
            let res = reconstruct(&ScalarMeasure::trace_form(rho0.clone()), 1e-8, 64, seed).unwrap();
            all_extended &= res.status == ExtensionStatus::Extended;
            worst = worst.max(res.rho.distance(&rho0).unwrap());
            cases += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        all_extended && worst <= 1e-8 && elapsed < 10.0,
        format!("{cases} cases, all extended: {all_extended}, max ‖rho − rho₀‖ = {worst:.2e}, {elapsed:.2}s"),
    )
}

/// Two spanning-family orderings give the same representing matrix.
fn uniqueness() -> Outcome {
    let mut worst: f64 = 0.0;
    for (s, shape) in shapes(&[&[3], &[4], &[3, 5], &[1, 3, 4]]).iter().enumerate() {
        for i in 0..100u64 {
            let seed = 1000 * s as u64 + i;
            let mu = ScalarMeasure::trace_form(random::random_hermitian(shape, &mut random::rng(seed)));
            let a = reconstruct_with(&mu, &ReconstructOptions { seed, ..Default::default() }).unwrap();
            let b = reconstruct_with(
                &mu,
                &ReconstructOptions { seed, order: FamilyOrder::Shuffled(seed ^ 0xabcdef), ..Default::default() },
            )
            .unwrap();
            worst = worst.max(a.rho.distance(&b.rho).unwrap());
        }
    }
    outcome(worst <= 1e-9, format!("max ‖rho_canonical − rho_shuffled‖ = {worst:.2e}"))
}

/// `2α(1) − μ(1) = ‖rho‖₁` and `α(1) = sup{ω(x) : 0 ≤ x ≤ 1}`.
fn alpha_identities() -> Outcome {
    let all = shapes(&[&[3], &[4], &[1, 3], &[3, 4], &[2, 3]]);
    let mut rng = random::rng(3);
    let (mut identity_gap, mut maximizer_gap, mut overshoot): (f64, f64, f64) = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..200 {
        let shape = &all[i % all.len()];
        let rho = random::random_hermitian(shape, &mut rng);
        let mu = ScalarMeasure::trace_form(rho.clone());
        let one = Projection::identity(shape);
        let alpha = variation_and_alpha(&mu, &one).unwrap().alpha;
        let mu_one = mu.evaluate(&one).unwrap().re;
        identity_gap = identity_gap.max(((2.0 * alpha - mu_one) - rho.trace_norm()).abs());

        let spec = spectral_decompose(&rho, 1e-9).unwrap();
        let positive = spec
            .eigenvalues
            .iter()
            .zip(&spec.projections)
            .filter(|(l, _)| **l > 0.0)
            .fold(Element::zeros(shape), |acc, (_, q)| acc + q.element());
        maximizer_gap = maximizer_gap.max((rho.trace_product(&positive).unwrap().re - alpha).abs());
        for _ in 0..20 {
            let x = random::random_positive_contraction(shape, &mut rng);
            overshoot = overshoot.max(omega(&mu, &x, 1e-9).unwrap().re - alpha);
        }
    }
    outcome(
        identity_gap <= 1e-9 && maximizer_gap <= 1e-9 && overshoot <= 1e-9,
        format!(
            "identity gap {identity_gap:.2e}, maximizer gap {maximizer_gap:.2e}, max sampled ω(x) − α(1) = {overshoot:.3}"
        ),
    )
}

/// `‖β‖ ≤ 4 sup|β(p)|`, and `≤ 2 sup` for Hermitian representing matrices.
fn norm_bound() -> Outcome {
    let mut rng = random::rng(4);
    let (mut worst_ratio, mut worst_herm_ratio): (f64, f64) = (0.0, 0.0);
    let mut ok = true;
    for shape in shapes(&[&[3], &[4]]) {
        for i in 0..200u64 {
            let rho = random::random_element(&shape, &mut rng);
            let nb = functional_norm_bound(&rho, 64, i).unwrap();
            ok &= nb.trace_norm <= nb.four_sup;
            worst_ratio = worst_ratio.max(nb.trace_norm / nb.four_sup);

            let h = random::random_hermitian(&shape, &mut rng);
            let nb = functional_norm_bound(&h, 64, i).unwrap();
            ok &= nb.trace_norm <= 2.0 * nb.sup + 1e-12;
            worst_herm_ratio = worst_herm_ratio.max(nb.trace_norm / (2.0 * nb.sup));
        }
    }
    outcome(
        ok,
        format!("max ‖β‖/(4 sup) = {worst_ratio:.3}, Hermitian max ‖β‖/(2 sup) = {worst_herm_ratio:.6}"),
    )
}

/// `α(1)·I − rho` is positive semidefinite on a single block.
fn positivity() -> Outcome {
    let mut rng = random::rng(5);
    let mut min_eig = f64::INFINITY;
    let mut errors = 0;
    for i in 0..100 {
        let shape = AlgebraShape::factor(1 + i % 6).unwrap();
        let rho = random::random_hermitian(&shape, &mut rng);
        match positivity_shift(&ScalarMeasure::trace_form(rho)) {
            Ok(shifted) => {
                min_eig = min_eig.min(*shifted.rho().unwrap().eigenvalues().last().unwrap());
            }
            Err(_) => errors += 1,
        }
    }
    outcome(errors == 0 && min_eig >= -1e-10, format!("min eigenvalue {min_eig:.3e}, errors {errors}"))
}

/// Centred, norm-one measures have `α(1) = ½`.
fn centre_normalization() -> Outcome {
    let shape = AlgebraShape::new(vec![3, 4]).unwrap();
    let mut rng = random::rng(6);
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..100 {
        let mu = ScalarMeasure::trace_form(random::random_hermitian(&shape, &mut rng));
        match centre_normalize(&mu) {
            Ok(c) => {
                let alpha = variation_and_alpha(&c.normalized, &Projection::identity(&shape)).unwrap().alpha;
                worst = worst.max((alpha - 0.5).abs());
            }
            Err(_) => errors += 1,
        }
    }
    outcome(errors == 0 && worst <= 1e-9, format!("max |α(1) − ½| = {worst:.2e}, errors {errors}"))
}

/// Best uniform linear approximation of ½t³ on [−1, 1] by brute force over
/// slope and intercept on a dense grid.
fn one_dimensional_minimax_oracle() -> f64 {
    let ts: Vec<f64> = (0..=2000).map(|i| -1.0 + i as f64 / 1000.0).collect();
    let mut best = f64::INFINITY;
    for si in 0..=1000 {
        let slope = 0.2 + 0.3 * si as f64 / 1000.0;
        for ci in -5..=5 {
            let intercept = ci as f64 * 1e-3;
            let dev = ts
                .iter()
                .map(|&t| (0.5 * t.powi(3) - slope * t - intercept).abs())
                .fold(0.0, f64::max);
            best = best.min(dev);
        }
    }
    best
}

/// The cubic qubit frame measure is additive, quasi-linear, and not linear.
fn i2_counterexample() -> Outcome {
    let mu = qubit_frame_measure(1.0, &[0.0, 0.5]).unwrap();
    let add = additivity_check(&mu, 500, 7, 1e-9);
    let audit = linearity_audit(&mu, 500, 7).unwrap();
    let cert = nonlinearity_residual(&mu, DEFAULT_GRID).unwrap();
    let oracle = one_dimensional_minimax_oracle();
    let pass = add.max_violation <= 1e-12
        && audit.max_commuting_defect <= 1e-8
        && audit.max_general_defect >= 0.05
        && (cert.residual - 0.125).abs() <= 0.005
        && (oracle - 0.125).abs() <= 1e-4;
    outcome(
        pass,
        format!(
            "additivity {:.1e}, commuting {:.1e}, general {:.3}, certificate {:.5} (1-D oracle {:.5})",
            add.max_violation, audit.max_commuting_defect, audit.max_general_defect, cert.residual, oracle
        ),
    )
}

/// Vector-valued lift with `‖T‖ ≤ 4K`.
fn vector_lift() -> Outcome {
    let shape = AlgebraShape::factor(3).unwrap();
    let mut rng = random::rng(8);
    let rhos: Vec<Element> = (0..5).map(|_| random::random_hermitian(&shape, &mut rng)).collect();
    let m = VectorMeasure::new(rhos.iter().cloned().map(ScalarMeasure::trace_form).collect()).unwrap();
    match extension::extend_vector_measure_with(&m, 1e-8, 8, 500) {
        Ok(op) => {
            let worst = op
                .rhos
                .iter()
                .zip(&rhos)
                .map(|(a, b)| a.distance(b).unwrap())
                .fold(0.0, f64::max);
            outcome(
                worst <= 1e-9 && op.norm_bound <= 4.0 * op.k_bound,
                format!(
                    "max recovery error {worst:.2e}, ‖T‖ ≈ {:.4}, 4K = {:.4}",
                    op.norm_bound,
                    4.0 * op.k_bound
                ),
            )
        }
        Err(e) => outcome(false, format!("extension failed: {e}")),
    }
}

/// Binary-digit spectral expansion of positive contractions.
fn dyadic() -> Outcome {
    let all = shapes(&[&[3], &[4], &[1, 3], &[2, 3]]);
    let mut rng = random::rng(9);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_omega: f64 = 0.0;
    for i in 0..100 {
        let shape = &all[i % all.len()];
        let frame = random_frame(shape, &mut rng);
        let values: Vec<f64> = (0..shape.hilbert_dimension()).map(|_| rng.random::<f64>()).collect();
        let x = with_spectrum(shape, &frame, &values);
        for m in 1..=20u32 {
            let e = dyadic_projections(&x, m).unwrap();
            let approx = e.iter().enumerate().fold(Element::zeros(shape), |acc, (n, p)| {
                acc + p.element().scale_real(0.5f64.powi(n as i32 + 1))
            });
            worst_excess = worst_excess.max(x.distance(&approx).unwrap() - 0.5f64.powi(m as i32));
        }
        let mu = ScalarMeasure::trace_form(random::random_element(shape, &mut rng));
        let spectral = omega(&mu, &x, 1e-9).unwrap();
        let truncated = omega_dyadic(&mu, &x, 30).unwrap();
        worst_omega = worst_omega.max((spectral - truncated).norm());
    }
    outcome(
        worst_excess <= 0.0 && worst_omega <= 1e-7,
        format!("max (error − 2^-m) = {worst_excess:.2e}, max |ω − ω_30| = {worst_omega:.2e}"),
    )
}

/// `μ(p) = trace(p)²` is flagged as not a measure.
fn negative_control() -> Outcome {
    let shape = AlgebraShape::factor(3).unwrap();
    let mu = ScalarMeasure::table(shape, Table::new(Some(TableOracle::TracePower { exponent: 2, scale: 1.0 }))).unwrap();
    let res = reconstruct(&mu, 1e-8, 64, 10).unwrap();
    let add = additivity_check(&mu, 200, 10, 1e-9);
    outcome(
        res.status == ExtensionStatus::NotAMeasure && add.max_violation >= 0.5,
        format!("status {}, residual {:.3}, additivity violation {:.3}", res.status, res.residual, add.max_violation),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 round-trip reconstruction", round_trip),
        ("2 uniqueness across orderings", uniqueness),
        ("3 alpha identities", alpha_identities),
        ("4 functional norm bound", norm_bound),
        ("5 positivity shift", positivity),
        ("6 centre normalization", centre_normalization),
        ("7 I2 counterexample", i2_counterexample),
        ("8 vector lift", vector_lift),
        ("9 dyadic expansion", dyadic),
        ("10 negative control", negative_control),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!("[{}] criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
