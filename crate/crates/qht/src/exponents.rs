//! Finite-n strong-converse exponents b_n(r) and their convergence against
//! the Hoeffding anti-divergence.
//!
//! b_n(r) = −(1/n) ln(max type-I success at type-II budget e^{−nr}), taken
//! from an exact Neyman–Pearson solve. Along a schedule of n the records
//! are compared with H*_r; the deviation envelope C·ln(n+1)/n is fitted,
//! not assumed, and reported with the sweep.

use crate::divergence::hoeffding_anti_divergence;
use crate::error::{Error, Result};
use crate::np_testing::{np_classical_with_cap, np_dense};
use crate::operator_core::{StatePair, DENSE_CAP_DEFAULT};
use crate::types_pinch::{
    classical_from_commuting, pinched_pair_dense, ClassicalPair, TYPE_CAP_DEFAULT,
};

/// Which solver backed a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Dense,
    Classical,
    Pinched,
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EngineKind::Dense => write!(f, "dense"),
            EngineKind::Classical => write!(f, "classical"),
            EngineKind::Pinched => write!(f, "pinched"),
        }
    }
}

/// Engine request; `Auto` picks classical for commuting pairs and dense
/// otherwise, refusing n beyond the dense cap rather than silently
/// degrading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Auto,
    Dense,
    Classical,
    Pinched,
}

/// A hypothesis-discrimination instance: either a quantum pair or a
/// classical pair of distributions.
#[derive(Debug, Clone)]
pub enum ProblemPair {
    Quantum(StatePair),
    Classical(ClassicalPair),
}

impl ProblemPair {
    /// Quantum view; classical pairs embed diagonally (exact).
    pub fn to_state_pair(&self) -> Result<StatePair> {
        match self {
            ProblemPair::Quantum(sp) => Ok(sp.clone()),
            ProblemPair::Classical(cp) => cp.to_state_pair(),
        }
    }
}

/// Resource bounds for the engines.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub dense: usize,
    pub types: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            dense: DENSE_CAP_DEFAULT,
            types: TYPE_CAP_DEFAULT,
        }
    }
}

/// One row of an n-sweep.
#[derive(Debug, Clone)]
pub struct ExponentRecord {
    pub n: usize,
    pub r: f64,
    pub log_success: f64,
    /// −log_success / n ≥ 0.
    pub b_n: f64,
    pub engine: EngineKind,
}

/// Finite-n exponent from the appropriate exact test solver.
pub fn finite_n_exponent(
    pair: &ProblemPair,
    n: usize,
    r: f64,
    engine: Engine,
    caps: Caps,
) -> Result<ExponentRecord> {
    if r < 0.0 {
        return Err(Error::NegativeRate(r));
    }
    assert!(n >= 1, "finite_n_exponent needs n >= 1");
    let log_mu = -(n as f64) * r;
    let (log_success, kind) = match pair {
        ProblemPair::Classical(cp) => match engine {
            Engine::Dense => {
                let sp = cp.to_state_pair()?.tensor_power_with_cap(n, caps.dense)?;
                (
                    np_dense(sp.rho(), sp.eta(), log_mu)?.log_success,
                    EngineKind::Dense,
                )
            }
            _ => (
                np_classical_with_cap(cp, n, log_mu, caps.types)?.log_success,
                EngineKind::Classical,
            ),
        },
        ProblemPair::Quantum(sp) => {
            let commuting = sp.is_commuting(1e-9);
            let resolved = match engine {
                Engine::Auto => {
                    if commuting {
                        Engine::Classical
                    } else {
                        Engine::Dense
                    }
                }
                other => other,
            };
            match resolved {
                Engine::Classical => {
                    let cp = classical_from_commuting(sp.rho(), sp.eta())?;
                    (
                        np_classical_with_cap(&cp, n, log_mu, caps.types)?.log_success,
                        EngineKind::Classical,
                    )
                }
                Engine::Dense => {
                    let powered = sp.tensor_power_with_cap(n, caps.dense)?;
                    (
                        np_dense(powered.rho(), powered.eta(), log_mu)?.log_success,
                        EngineKind::Dense,
                    )
                }
                Engine::Pinched => {
                    let pinched = pinched_pair_dense(sp, n, caps.dense)?;
                    let cp = classical_from_commuting(pinched.rho(), pinched.eta())?;
                    (
                        np_classical_with_cap(&cp, 1, log_mu, caps.types)?.log_success,
                        EngineKind::Pinched,
                    )
                }
                Engine::Auto => unreachable!("resolved above"),
            }
        }
    };
    // success = 1 gives log_success = 0.0; keep b_n at +0.0, not -0.0
    let b_n = if log_success == 0.0 {
        0.0
    } else {
        -log_success / n as f64
    };
    Ok(ExponentRecord {
        n,
        r,
        log_success,
        b_n,
        engine: kind,
    })
}

/// An n-sweep with its H*_r reference and the fitted deviation envelope.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub records: Vec<ExponentRecord>,
    pub r: f64,
    pub h_star: f64,
    /// max over records of |b_n − H*| · n / ln(n+1).
    pub fitted_envelope_c: f64,
    /// |b_{n_max} − H*|.
    pub final_gap: f64,
}

/// Sweeps b_n over an ascending schedule and fits the envelope.
pub fn convergence_sweep(
    pair: &ProblemPair,
    r: f64,
    schedule: &[usize],
    engine: Engine,
    tol: f64,
    caps: Caps,
) -> Result<ConvergenceReport> {
    assert!(!schedule.is_empty(), "schedule must be nonempty");
    assert!(
        schedule.windows(2).all(|w| w[0] < w[1]),
        "schedule must be ascending"
    );
    let h_star = hoeffding_anti_divergence(&pair.to_state_pair()?, r, tol)?.value;
    let mut records = Vec::with_capacity(schedule.len());
    for &n in schedule {
        records.push(finite_n_exponent(pair, n, r, engine, caps)?);
    }
    let fitted_envelope_c = records
        .iter()
        .map(|rec| (rec.b_n - h_star).abs() * rec.n as f64 / ((rec.n + 1) as f64).ln())
        .fold(0.0, f64::max);
    let final_gap = (records.last().unwrap().b_n - h_star).abs();
    Ok(ConvergenceReport {
        records,
        r,
        h_star,
        fitted_envelope_c,
        final_gap,
    })
}

/// Point estimate of the strong-converse exponent with its envelope-based
/// uncertainty: (b_{n_max}, C·ln(n_max+1)/n_max).
pub fn b_r_estimate(report: &ConvergenceReport) -> Result<(f64, f64)> {
    if report.records.len() < 3 {
        return Err(Error::InsufficientData(report.records.len()));
    }
    let last = report.records.last().unwrap();
    let uncertainty = report.fitted_envelope_c * ((last.n + 1) as f64).ln() / last.n as f64;
    Ok((last.b_n, uncertainty))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::hoeffding_anti_divergence;
    use crate::testutil;
    use crate::types_pinch::PinchingSpec;

    fn bern_classical() -> ProblemPair {
        ProblemPair::Classical(
            ClassicalPair::from_probabilities(&[0.5, 0.5], &[0.25, 0.75]).unwrap(),
        )
    }

    #[test]
    fn equal_states_give_exactly_r() {
        let cp = ClassicalPair::from_probabilities(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
        let pair = ProblemPair::Classical(cp);
        for n in [1usize, 7, 100] {
            let rec = finite_n_exponent(&pair, n, 0.4, Engine::Auto, Caps::default()).unwrap();
            assert!((rec.b_n - 0.4).abs() < 1e-12, "n = {n}: {}", rec.b_n);
        }
        let eq = ProblemPair::Quantum(testutil::equal_pair());
        let rec = finite_n_exponent(&eq, 3, 0.4, Engine::Dense, Caps::default()).unwrap();
        assert!((rec.b_n - 0.4).abs() < 1e-12);
    }

    #[test]
    fn bernoulli_single_copy_value() {
        // two-outcome solve at μ = e^{-0.5}: frozen enumeration value
        let rec =
            finite_n_exponent(&bern_classical(), 1, 0.5, Engine::Auto, Caps::default()).unwrap();
        assert!((rec.b_n - 0.30423551925046655).abs() < 1e-12);
        assert_eq!(rec.engine, EngineKind::Classical);
    }

    #[test]
    fn auto_engine_selection() {
        let commuting = ProblemPair::Quantum(testutil::bern_pair());
        let rec = finite_n_exponent(&commuting, 4, 0.5, Engine::Auto, Caps::default()).unwrap();
        assert_eq!(rec.engine, EngineKind::Classical);

        let tilted = ProblemPair::Quantum(testutil::tilted_pair());
        let rec = finite_n_exponent(&tilted, 2, 0.3, Engine::Auto, Caps::default()).unwrap();
        assert_eq!(rec.engine, EngineKind::Dense);

        // beyond the dense cap the auto engine refuses instead of degrading
        let err = finite_n_exponent(&tilted, 13, 0.3, Engine::Auto, Caps::default());
        assert!(matches!(err, Err(Error::DenseCapExceeded { .. })));

        // classical engine on a non-commuting pair is rejected
        let err = finite_n_exponent(&tilted, 2, 0.3, Engine::Classical, Caps::default());
        assert!(matches!(err, Err(Error::NotCommuting(_))));
    }

    #[test]
    fn classical_engine_matches_dense_engine() {
        let pair = bern_classical();
        for n in [1usize, 3, 5] {
            let c = finite_n_exponent(&pair, n, 0.5, Engine::Classical, Caps::default()).unwrap();
            let d = finite_n_exponent(&pair, n, 0.5, Engine::Dense, Caps::default()).unwrap();
            assert!((c.b_n - d.b_n).abs() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn pinched_engine_sandwiched_by_dense() {
        // b_dense <= b_pinched <= b_dense + K ln(n+1)/n
        let pair = ProblemPair::Quantum(testutil::tilted_pair());
        for n in [2usize, 4] {
            let dense = finite_n_exponent(&pair, n, 0.35, Engine::Dense, Caps::default()).unwrap();
            let pinched =
                finite_n_exponent(&pair, n, 0.35, Engine::Pinched, Caps::default()).unwrap();
            let eta_n = testutil::tilted_pair()
                .eta()
                .tensor_power_with_cap(n, 4096)
                .unwrap();
            let k = PinchingSpec::from_spectrum(&eta_n).unwrap().k() as f64;
            let envelope = k * ((n + 1) as f64).ln() / n as f64;
            assert!(pinched.b_n >= dense.b_n - 1e-9, "n = {n}");
            assert!(
                pinched.b_n <= dense.b_n + envelope + 1e-9,
                "n = {n}: {} vs {} + {envelope}",
                pinched.b_n,
                dense.b_n
            );
        }
    }

    #[test]
    fn sweep_on_equal_states_is_flat() {
        let cp = ClassicalPair::from_probabilities(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
        let report = convergence_sweep(
            &ProblemPair::Classical(cp),
            0.4,
            &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
            Engine::Auto,
            1e-6,
            Caps::default(),
        )
        .unwrap();
        assert!(report.final_gap < 1e-12);
        assert!(report.fitted_envelope_c < 1e-10);
        let (est, unc) = b_r_estimate(&report).unwrap();
        assert!((est - 0.4).abs() < 1e-12 && unc < 1e-10);
    }

    #[test]
    fn bernoulli_sweep_converges_from_above() {
        let report = convergence_sweep(
            &bern_classical(),
            0.5,
            &[50, 100, 200],
            Engine::Auto,
            1e-6,
            Caps::default(),
        )
        .unwrap();
        let gaps: Vec<f64> = report
            .records
            .iter()
            .map(|rec| (rec.b_n - report.h_star).abs())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "gaps {gaps:?}");
        // converse envelope: b_n never undershoots H* by more than K ln(n+1)/n
        for rec in &report.records {
            let envelope = 2.0 * ((rec.n + 1) as f64).ln() / rec.n as f64;
            assert!(rec.b_n >= report.h_star - envelope - 1e-6);
        }
        // no oscillation beyond the fitted envelope
        for pair in report.records.windows(2) {
            let rise = pair[1].b_n - pair[0].b_n;
            let allowed =
                report.fitted_envelope_c * ((pair[0].n + 1) as f64).ln() / pair[0].n as f64;
            assert!(rise <= allowed + 1e-9);
        }
        let (est, unc) = b_r_estimate(&report).unwrap();
        assert!((est - report.h_star).abs() <= unc + 1e-12);
    }

    #[test]
    fn qubit_dense_sweep_gap_trend() {
        // non-commuting fixture, r strictly between D_1 and D_inf; the
        // gap trend falls while local wiggles stay inside the envelope
        let pair = ProblemPair::Quantum(testutil::tilted_pair());
        let report = convergence_sweep(
            &pair,
            0.35,
            &[2, 4, 6, 8],
            Engine::Dense,
            1e-6,
            Caps::default(),
        )
        .unwrap();
        let gaps: Vec<f64> = report
            .records
            .iter()
            .map(|rec| (rec.b_n - report.h_star).abs())
            .collect();
        assert!(
            gaps[0] > gaps[3],
            "gap trend should fall across the schedule: {gaps:?}"
        );
        for w in report.records.windows(2) {
            let rise = w[1].b_n - w[0].b_n;
            let allowed = report.fitted_envelope_c * ((w[0].n + 1) as f64).ln() / w[0].n as f64;
            assert!(rise <= allowed + 1e-9, "oscillation beyond envelope");
        }
    }

    #[test]
    fn estimate_needs_three_records() {
        let report = convergence_sweep(
            &bern_classical(),
            0.5,
            &[10, 20],
            Engine::Auto,
            1e-6,
            Caps::default(),
        )
        .unwrap();
        assert!(matches!(
            b_r_estimate(&report),
            Err(Error::InsufficientData(2))
        ));
    }

    #[test]
    fn widening_schedule_shrinks_uncertainty() {
        let short = convergence_sweep(
            &bern_classical(),
            0.5,
            &[50, 100, 200],
            Engine::Auto,
            1e-6,
            Caps::default(),
        )
        .unwrap();
        let long = convergence_sweep(
            &bern_classical(),
            0.5,
            &[50, 100, 200, 500],
            Engine::Auto,
            1e-6,
            Caps::default(),
        )
        .unwrap();
        let (_, u_short) = b_r_estimate(&short).unwrap();
        let (_, u_long) = b_r_estimate(&long).unwrap();
        assert!(u_long <= u_short + 1e-12);
    }

    #[test]
    fn hoeffding_scaling_identity_under_tensor_powers() {
        // H*_{nr}(pair^{⊗n}) = n · H*_r(pair)
        let pair = testutil::tilted_pair();
        let r = 0.35;
        let single = hoeffding_anti_divergence(&pair, r, 1e-7).unwrap().value;
        for n in [2usize, 3] {
            let powered = pair.tensor_power_with_cap(n, 4096).unwrap();
            let scaled = hoeffding_anti_divergence(&powered, n as f64 * r, 1e-7)
                .unwrap()
                .value;
            assert!(
                (scaled - n as f64 * single).abs() < 1e-8,
                "n = {n}: {scaled} vs {}",
                n as f64 * single
            );
        }
    }
}
