//! Deterministic property suites behind `qht check`; the acceptance tests
//! run the same functions with pinned seeds.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binning::{bin_density, binning_divergence_gap};
use crate::divergence::{
    cutoff_rate, hoeffding_anti_divergence, ln_q_star, sandwiched_renyi, sandwiched_renyi_densities,
};
use crate::error::{Error, Result};
use crate::exponents::{
    b_r_estimate, convergence_sweep, finite_n_exponent, Caps, Engine, ProblemPair,
};
use crate::np_testing::{
    np_classical, np_dense, order_perturb_check, reverse_dpi_check, OptimalTest, UnitalChannel,
};
use crate::operator_core::{loewner_leq, DensityOperator, HermitianOperator, StatePair};
use crate::types_pinch::{cp_index_check, ClassicalPair, PinchingSpec};

use super::load_pair;

/// One assertion's outcome.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(results: &mut Vec<CheckResult>, name: impl Into<String>, pass: bool, detail: String) {
    results.push(CheckResult {
        name: name.into(),
        pass,
        detail,
    });
}

fn seeded_density(dim: usize, rng: &mut ChaCha8Rng) -> DensityOperator {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let psd =
        &g * g.adjoint() + DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(0.05, 0.0);
    let tr = psd.trace().re;
    DensityOperator::from_matrix(psd / Complex64::new(tr, 0.0)).expect("seeded density")
}

fn tilted() -> StatePair {
    match load_pair("qubit_tilted").unwrap() {
        ProblemPair::Quantum(sp) => sp,
        _ => unreachable!(),
    }
}

fn bern() -> ClassicalPair {
    match load_pair("bern_half_quarter").unwrap() {
        ProblemPair::Classical(cp) => cp,
        _ => unreachable!(),
    }
}

fn equal_qubit() -> StatePair {
    match load_pair("equal_qubit").unwrap() {
        ProblemPair::Quantum(sp) => sp,
        _ => unreachable!(),
    }
}

/// Random pinching: eigenbasis of a seeded density, columns cut into
/// 2..=dim consecutive blocks.
fn seeded_pinching(dim: usize, rng: &mut ChaCha8Rng) -> PinchingSpec {
    let basis = seeded_density(dim, rng);
    let v = basis.eigenvectors();
    let blocks = rng.gen_range(2..=dim);
    let mut cuts: Vec<usize> = (1..dim).collect();
    for i in (1..cuts.len()).rev() {
        let j = rng.gen_range(0..=i);
        cuts.swap(i, j);
    }
    let mut cuts: Vec<usize> = cuts.into_iter().take(blocks - 1).collect();
    cuts.sort_unstable();
    cuts.push(dim);
    let mut projectors = Vec::with_capacity(blocks);
    let mut start = 0;
    for &end in &cuts {
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for i in start..end {
            let c = v.column(i);
            m += c * c.adjoint();
        }
        projectors.push(HermitianOperator::new(m).expect("projector"));
        start = end;
    }
    PinchingSpec::new(projectors).expect("seeded pinching")
}

/// Sandwiched DPI under seeded pinchings, plus the reverse-DPI and
/// order-perturbation surrogates on every fixture.
pub fn dpi_suite(seed: u64) -> Vec<CheckResult> {
    let mut results = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two = tilted().tensor_power_with_cap(2, 4096).unwrap();
    let alphas: Vec<f64> = (0..10)
        .map(|i| 1.0 + 0.1 * 64f64.powf(i as f64 / 9.0))
        .collect();
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..20 {
        let spec = seeded_pinching(4, &mut rng);
        let rho_p =
            DensityOperator::new(crate::types_pinch::pinch(two.rho().operator(), &spec).unwrap())
                .unwrap();
        let eta_p =
            DensityOperator::new(crate::types_pinch::pinch(two.eta().operator(), &spec).unwrap())
                .unwrap();
        for &alpha in &alphas {
            let before = sandwiched_renyi(&two, alpha).unwrap();
            let after = sandwiched_renyi_densities(&rho_p, &eta_p, alpha).unwrap();
            worst = worst.max(after - before);
        }
    }
    check(
        &mut results,
        "dpi/pinching-sandwiched",
        worst <= 1e-9,
        format!("worst violation {worst:.3e} over 20 pinchings x 10 alphas"),
    );

    let fixtures: Vec<(&str, StatePair)> = vec![
        ("equal_qubit", equal_qubit()),
        ("bern_half_quarter", bern().to_state_pair().unwrap()),
        ("qubit_tilted", tilted()),
    ];
    for (name, pair) in &fixtures {
        for n in [1usize, 2, 3, 4] {
            let deph = UnitalChannel::Pinching(PinchingSpec::computational(2));
            let rep = reverse_dpi_check(pair, &deph, n, -1.0, 4096).unwrap();
            check(
                &mut results,
                format!("dpi/reverse-dephase/{name}/n{n}"),
                rep.holds(1e-9),
                format!(
                    "processed {:.6e} <= original {:.6e}",
                    rep.success_processed, rep.success_original
                ),
            );
            let mix = UnitalChannel::MixWithUniform(0.25);
            let rep = reverse_dpi_check(pair, &mix, n, -0.8, 4096).unwrap();
            check(
                &mut results,
                format!("dpi/reverse-mix/{name}/n{n}"),
                rep.holds(1e-9),
                format!(
                    "processed {:.6e} <= original {:.6e}",
                    rep.success_processed, rep.success_original
                ),
            );
        }
    }

    // order perturbation with a genuinely binned eta
    let eta = DensityOperator::from_probabilities(&[0.48, 0.52]).unwrap();
    let binned = bin_density(&eta, 10).unwrap();
    for (name, pair) in &fixtures {
        for n in [1usize, 2, 4] {
            let rep = order_perturb_check(
                pair.rho(),
                &eta,
                &binned.binned,
                1.1f64.ln(),
                n,
                -(n as f64) * 0.5,
                4096,
            )
            .unwrap();
            check(
                &mut results,
                format!("dpi/order-perturb/{name}/n{n}"),
                rep.holds,
                format!(
                    "relaxed {:.6e} >= tilde {:.6e}",
                    rep.success_relaxed, rep.success_tilde
                ),
            );
        }
    }
    results
}

/// Binning sandwich, divergence-gap and cardinality bounds on 2-, 3- and
/// 4-level fixtures at k in {10, 100}.
pub fn binning_suite(seed: u64) -> Vec<CheckResult> {
    let mut results = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fixtures: Vec<(String, StatePair)> = vec![
        (
            "2-level".to_string(),
            StatePair::new(
                tilted().rho().clone(),
                DensityOperator::from_probabilities(&[0.48, 0.52]).unwrap(),
            )
            .unwrap(),
        ),
        (
            "3-level".to_string(),
            StatePair::new(
                seeded_density(3, &mut rng),
                DensityOperator::from_probabilities(&[0.300, 0.302, 0.398]).unwrap(),
            )
            .unwrap(),
        ),
        (
            "4-level".to_string(),
            StatePair::new(
                seeded_density(4, &mut rng),
                DensityOperator::from_probabilities(&[0.2, 0.24, 0.26, 0.3]).unwrap(),
            )
            .unwrap(),
        ),
    ];
    for (name, pair) in &fixtures {
        for k in [10usize, 100] {
            let b = bin_density(pair.eta(), k).unwrap();
            let down = b.binned.spectral_map(|w| w / b.a);
            let up = b.binned.spectral_map(|w| w * b.a);
            let sandwich = loewner_leq(&down, pair.eta().operator(), 1e-9).unwrap()
                && loewner_leq(pair.eta().operator(), &up, 1e-9).unwrap();
            check(
                &mut results,
                format!("binning/sandwich/{name}/k{k}"),
                sandwich,
                format!("{} bins, a = {:.4}", b.bin_count(), b.a),
            );
            let bound = (1.0 + 1.0 / k as f64).ln() + 1e-9;
            let gaps = binning_divergence_gap(pair, k, &[1.5, 2.0, 4.0]).unwrap();
            let max_gap = gaps.iter().map(|(_, g)| *g).fold(0.0f64, f64::max);
            check(
                &mut results,
                format!("binning/gap/{name}/k{k}"),
                max_gap <= bound,
                format!("max gap {max_gap:.3e} <= ln(1+1/k) = {:.3e}", bound),
            );
            check(
                &mut results,
                format!("binning/cardinality/{name}/k{k}"),
                (b.bin_count() as f64) <= b.spectrum_cap(),
                format!("{} <= {:.1}", b.bin_count(), b.spectrum_cap()),
            );
        }
    }
    results
}

/// The exact pinched-vs-dense ln Q*_α sandwich on the tilted qubit,
/// n = 1..=8, α in {1.5, 2, 3}.
pub fn pinched_sandwich_suite() -> Vec<CheckResult> {
    let mut results = Vec::new();
    let pair = tilted();
    for n in 1usize..=8 {
        let plain = pair.tensor_power_with_cap(n, 4096).unwrap();
        let pinched = crate::types_pinch::pinched_pair_dense(&pair, n, 4096).unwrap();
        let k = PinchingSpec::from_spectrum(plain.eta()).unwrap().k();
        let bound = k as f64 * ((n + 1) as f64).ln() + 1e-8;
        for alpha in [1.5, 2.0, 3.0] {
            let gap = ln_q_star(&plain, alpha).unwrap() - ln_q_star(&pinched, alpha).unwrap();
            check(
                &mut results,
                format!("pinching/sandwich/n{n}/alpha{alpha}"),
                gap >= -1e-9 && gap <= bound,
                format!("0 <= {gap:.6e} <= K ln(n+1) = {:.6e} (K = {k})", bound),
            );
        }
    }
    results
}

/// cp-order-index bound over seeded PSD samples for K in {2, 3, 4}.
pub fn cp_index_suite(seed: u64) -> Vec<CheckResult> {
    let mut results = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in [2usize, 3, 4] {
        let dim = 4;
        let spec = loop {
            let s = seeded_pinching(dim, &mut rng);
            if s.k() == k {
                break s;
            }
        };
        let (violation, _) = cp_index_check(&spec, 100, seed.wrapping_add(k as u64));
        check(
            &mut results,
            format!("pinching/cp-index/K{k}"),
            violation <= 1e-9,
            format!("max violation {violation:.3e} over 100 samples"),
        );
    }
    results
}

/// Dense duality gaps, dense/classical engine agreement, and exact budget
/// feasibility.
pub fn np_duality_suite(seed: u64) -> Vec<CheckResult> {
    let mut results = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_gap = 0.0f64;
    let mut worst_slack = f64::NEG_INFINITY;
    for _ in 0..50 {
        let dim = rng.gen_range(2..=6);
        let a = seeded_density(dim, &mut rng);
        let b = seeded_density(dim, &mut rng);
        let mu: f64 = rng.gen_range(0.02..0.9);
        let r = np_dense(&a, &b, mu.ln()).unwrap();
        worst_gap = worst_gap.max(r.duality_gap);
        if let OptimalTest::Dense(t) = &r.test {
            let budget = t.log_expectation(&b);
            let slack = budget - mu.ln();
            worst_slack = worst_slack.max(slack);
            if r.lambda_star > 0.0 {
                worst_slack = worst_slack.max(slack.abs());
            }
        }
    }
    check(
        &mut results,
        "np/duality-gap",
        worst_gap <= 1e-9,
        format!("worst |ln primal - ln dual| = {worst_gap:.3e} over 50 instances"),
    );
    check(
        &mut results,
        "np/budget-feasible",
        worst_slack <= 1e-12,
        format!("worst log-domain budget deviation {worst_slack:.3e}"),
    );

    let cp = bern();
    let sp = cp.to_state_pair().unwrap();
    let mut worst_engine = 0.0f64;
    for n in 1usize..=8 {
        let log_mu = -(n as f64) * 0.4;
        let classical = np_classical(&cp, n, log_mu).unwrap();
        let powered = sp.tensor_power_with_cap(n, 4096).unwrap();
        let dense = np_dense(powered.rho(), powered.eta(), log_mu).unwrap();
        worst_engine = worst_engine.max((classical.log_success - dense.log_success).abs());
    }
    check(
        &mut results,
        "np/engine-agreement",
        worst_engine <= 1e-9,
        format!("worst |classical - dense| log success = {worst_engine:.3e} for n <= 8"),
    );
    results
}

/// Strong-converse convergence on the Bernoulli fixture: classical-engine b_n
/// sweeps toward H*_{0.5} with strictly shrinking gaps.
pub fn exponents_suite() -> Vec<CheckResult> {
    let mut results = Vec::new();
    let pair = ProblemPair::Classical(bern());
    let report = convergence_sweep(
        &pair,
        0.5,
        &[50, 100, 200, 500, 1000],
        Engine::Classical,
        1e-6,
        Caps::default(),
    )
    .unwrap();
    let gaps: Vec<f64> = report
        .records
        .iter()
        .map(|rec| (rec.b_n - report.h_star).abs())
        .collect();
    let decreasing = gaps.windows(2).all(|w| w[0] > w[1]);
    check(
        &mut results,
        "exponents/gaps-strictly-decreasing",
        decreasing,
        format!("gaps {gaps:?}"),
    );
    check(
        &mut results,
        "exponents/final-gap",
        report.final_gap <= 0.03,
        format!("final gap {:.4e} <= 0.03", report.final_gap),
    );
    check(
        &mut results,
        "exponents/fitted-envelope",
        report.fitted_envelope_c <= 5.0,
        format!("fitted C = {:.3}", report.fitted_envelope_c),
    );
    let (est, unc) = b_r_estimate(&report).unwrap();
    check(
        &mut results,
        "exponents/estimate-brackets-h-star",
        (est - report.h_star).abs() <= unc + 1e-12,
        format!(
            "estimate {est:.6} +/- {unc:.6} vs H* = {:.6}",
            report.h_star
        ),
    );
    results
}

/// Degenerate ρ = η identities: zero divergence, H*_r = r, b_n = r, zero
/// cutoff, all to 1e-12.
pub fn degenerate_suite() -> Vec<CheckResult> {
    let mut results = Vec::new();
    let pair = equal_qubit();
    let mut worst_d = 0.0f64;
    for alpha in [1.5, 2.0, 64.0, 1024.0] {
        worst_d = worst_d.max(sandwiched_renyi(&pair, alpha).unwrap().abs());
    }
    check(
        &mut results,
        "degenerate/divergence-zero",
        worst_d <= 1e-12,
        format!("max |D*_alpha| = {worst_d:.3e}"),
    );
    let mut worst_h = 0.0f64;
    for r in [0.3, 0.7, 1.4] {
        let h = hoeffding_anti_divergence(&pair, r, 1e-6).unwrap();
        worst_h = worst_h.max((h.value - r).abs());
    }
    check(
        &mut results,
        "degenerate/hoeffding-equals-r",
        worst_h <= 1e-12,
        format!("max |H*_r - r| = {worst_h:.3e}"),
    );
    let mut worst_b = 0.0f64;
    let qp = ProblemPair::Quantum(pair.clone());
    for n in [1usize, 3, 5] {
        let rec = finite_n_exponent(&qp, n, 0.4, Engine::Auto, Caps::default()).unwrap();
        worst_b = worst_b.max((rec.b_n - 0.4).abs());
    }
    check(
        &mut results,
        "degenerate/b_n-equals-r",
        worst_b <= 1e-12,
        format!("max |b_n - r| = {worst_b:.3e}"),
    );
    let mut worst_c = 0.0f64;
    for kappa in [1.0 / 3.0, 0.5, 0.9] {
        worst_c = worst_c.max(cutoff_rate(&pair, kappa, 1e-6).unwrap().abs());
    }
    check(
        &mut results,
        "degenerate/cutoff-zero",
        worst_c <= 1e-12,
        format!("max |cutoff| = {worst_c:.3e}"),
    );
    results
}

/// The cutoff identity C_κ = D*_{1/(1−κ)} on both nontrivial fixtures.
pub fn cutoff_suite() -> Vec<CheckResult> {
    let mut results = Vec::new();
    let fixtures: Vec<(&str, StatePair)> = vec![
        ("bern_half_quarter", bern().to_state_pair().unwrap()),
        ("qubit_tilted", tilted()),
    ];
    for (name, pair) in &fixtures {
        for kappa in [1.0 / 3.0, 0.5, 2.0 / 3.0, 0.9] {
            let c = cutoff_rate(pair, kappa, 1e-6).unwrap();
            let target = sandwiched_renyi(pair, 1.0 / (1.0 - kappa)).unwrap();
            check(
                &mut results,
                format!("cutoff/identity/{name}/kappa{kappa:.3}"),
                (c - target).abs() <= 1e-4,
                format!("|{c:.8} - {target:.8}| = {:.3e}", (c - target).abs()),
            );
        }
    }
    // the classical value at kappa = 1/2 is ln(4/3) on the nose
    let c = cutoff_rate(&fixtures[0].1, 0.5, 1e-6).unwrap();
    check(
        &mut results,
        "cutoff/bern-kappa-half-ln43",
        (c - (4.0f64 / 3.0).ln()).abs() <= 1e-6,
        format!("{c:.9} vs ln(4/3) = {:.9}", (4.0f64 / 3.0).ln()),
    );
    results
}

/// Dispatch by suite name; `all` concatenates everything.
pub fn run_suite(suite: &str, seed: u64) -> Result<Vec<CheckResult>> {
    let mut results = Vec::new();
    match suite {
        "dpi" => results.extend(dpi_suite(seed)),
        "binning" => results.extend(binning_suite(seed)),
        "pinching" => {
            results.extend(pinched_sandwich_suite());
            results.extend(cp_index_suite(seed));
        }
        "np_duality" => results.extend(np_duality_suite(seed)),
        "exponents" => {
            results.extend(exponents_suite());
            results.extend(degenerate_suite());
        }
        "cutoff" => results.extend(cutoff_suite()),
        "all" => {
            results.extend(dpi_suite(seed));
            results.extend(binning_suite(seed));
            results.extend(pinched_sandwich_suite());
            results.extend(cp_index_suite(seed));
            results.extend(np_duality_suite(seed));
            results.extend(exponents_suite());
            results.extend(degenerate_suite());
            results.extend(cutoff_suite());
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown suite {other:?}; expected dpi|binning|pinching|np_duality|exponents|cutoff|all"
            )))
        }
    }
    Ok(results)
}
