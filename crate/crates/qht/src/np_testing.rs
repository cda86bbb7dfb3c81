//! Optimal hypothesis tests and the combinators used to transport them
//! between copy counts.
//!
//! The dense engine solves max{tr(AT) : tr(BT) ≤ μ, 0 ≤ T ≤ 1} by
//! bisection on the dual threshold λ: the map λ ↦ tr(B·Π₊(A−λB)) is
//! non-increasing and right-continuous, the optimal test is the spectral
//! projector above the threshold plus a fractional weight on the boundary
//! eigenspace, and the dual value min_λ tr[(A−λB)₊] + λμ certifies
//! optimality. The classical engine realizes the same program exactly on
//! type classes of an i.i.d. pair, entirely in log-domain, so it scales to
//! n in the thousands.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::logspace::{log_add_exp, log_diff_exp, log_sum_exp};
use crate::operator_core::{
    eigh, loewner_leq, DensityOperator, HermitianOperator, StatePair, TestOperator,
};
use crate::types_pinch::{enumerate_types, pinch, ClassicalPair, PinchingSpec, TYPE_CAP_DEFAULT};

/// Absolute tolerance classifying eigenvalues of A−λB as boundary.
const BOUNDARY_TOL: f64 = 1e-11;

/// Relative width at which the λ-bisection stops.
const BISECTION_WIDTH: f64 = 1e-15;

/// The realized optimal test.
#[derive(Debug, Clone)]
pub enum OptimalTest {
    Dense(TestOperator),
    Classical(ClassicalTest),
}

/// A likelihood-ratio threshold test over type classes: accept the types
/// before `cut_index` in `sorted_type_ids` fully and the boundary type
/// fractionally.
#[derive(Debug, Clone)]
pub struct ClassicalTest {
    /// Type indices sorted by descending log-likelihood ratio, ties broken
    /// by lexicographic type order.
    pub sorted_type_ids: Vec<usize>,
    /// Number of fully accepted types.
    pub cut_index: usize,
    /// Acceptance weight on the boundary type, in [0, 1].
    pub boundary_weight: f64,
}

/// Outcome of a Neyman–Pearson solve.
#[derive(Debug, Clone)]
pub struct NPResult {
    /// ln μ, the type-II constraint.
    pub log_budget: f64,
    /// ln of the maximum type-I success probability.
    pub log_success: f64,
    /// Dual threshold λ*.
    pub lambda_star: f64,
    /// |ln primal − ln dual|; a scale-free certificate of optimality.
    pub duality_gap: f64,
    pub test: OptimalTest,
}

impl NPResult {
    pub fn success(&self) -> f64 {
        self.log_success.exp()
    }
}

struct Classified {
    proj_pos: DMatrix<Complex64>,
    proj_bnd: DMatrix<Complex64>,
    eig_pos_sum: f64,
}

fn classify(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, lambda: f64) -> Result<Classified> {
    let shifted = a - b * Complex64::new(lambda, 0.0);
    let (w, v) = eigh(&shifted)?;
    let dim = a.nrows();
    let mut proj_pos = DMatrix::<Complex64>::zeros(dim, dim);
    let mut proj_bnd = DMatrix::<Complex64>::zeros(dim, dim);
    let mut eig_pos_sum = 0.0;
    for i in 0..dim {
        if w[i] > BOUNDARY_TOL {
            let c = v.column(i);
            proj_pos += c * c.adjoint();
            eig_pos_sum += w[i];
        } else if w[i] >= -BOUNDARY_TOL {
            let c = v.column(i);
            proj_bnd += c * c.adjoint();
        }
    }
    Ok(Classified {
        proj_pos,
        proj_bnd,
        eig_pos_sum,
    })
}

/// tr(x·y) for Hermitian x, y.
fn real_inner(x: &DMatrix<Complex64>, y: &DMatrix<Complex64>) -> f64 {
    let mut acc = 0.0;
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            acc += (x[(i, j)] * y[(j, i)]).re;
        }
    }
    acc
}

/// Dense Neyman–Pearson: max{tr(AT) : tr(BT) ≤ e^{log_mu}, 0 ≤ T ≤ 1}.
pub fn np_dense(a: &DensityOperator, b: &DensityOperator, log_mu: f64) -> Result<NPResult> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    if log_mu > 0.0 {
        return Err(Error::BudgetAboveOne(log_mu));
    }
    let mu = log_mu.exp();
    let am = a.matrix();
    let bm = b.matrix();

    let budget_of_pos = |lambda: f64| -> Result<f64> {
        let c = classify(am, bm, lambda)?;
        Ok(real_inner(bm, &c.proj_pos))
    };

    let lambda_star = if budget_of_pos(0.0)? <= mu {
        0.0
    } else {
        // grow the bracket, then bisect; tr(B Π₊) is non-increasing in λ
        let mut hi = 1.0;
        let mut grow = 0;
        while budget_of_pos(hi)? > mu {
            hi *= 2.0;
            grow += 1;
            if grow > 1100 {
                return Err(Error::BisectionFailure);
            }
        }
        let mut lo = if hi > 1.0 { hi / 2.0 } else { 0.0 };
        while hi - lo > BISECTION_WIDTH * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if budget_of_pos(mid)? > mu {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };

    let c = classify(am, bm, lambda_star)?;
    let budget_pos = real_inner(bm, &c.proj_pos);
    let budget_bnd = real_inner(bm, &c.proj_bnd);
    let success_pos = real_inner(am, &c.proj_pos);
    let success_bnd = real_inner(am, &c.proj_bnd);
    let weight = if budget_bnd > f64::MIN_POSITIVE {
        ((mu - budget_pos) / budget_bnd).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let primal = success_pos + weight * success_bnd;
    let dual = c.eig_pos_sum + lambda_star * mu;
    let log_success = primal.max(f64::MIN_POSITIVE).ln().min(0.0);
    let duality_gap = (primal.max(f64::MIN_POSITIVE).ln() - dual.max(f64::MIN_POSITIVE).ln()).abs();

    let test_mat = &c.proj_pos + &c.proj_bnd * Complex64::new(weight, 0.0);
    let test = TestOperator::new(HermitianOperator::new(test_mat)?, 0.0)?;

    Ok(NPResult {
        log_budget: log_mu,
        log_success,
        lambda_star,
        duality_gap,
        test: OptimalTest::Dense(test),
    })
}

/// Outcomes with identical (log p, log q) merged; log-domain group masses.
fn group_outcomes(pair: &ClassicalPair) -> (Vec<f64>, Vec<f64>) {
    let n = pair.n_outcomes();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let key = (pair.log_q()[i], pair.log_p()[i]);
        let other = (pair.log_q()[j], pair.log_p()[j]);
        key.partial_cmp(&other).unwrap()
    });
    let close = |x: f64, y: f64| -> bool { x == y || (x - y).abs() <= 1e-9 };
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g)
                if close(pair.log_q()[i], pair.log_q()[*g.last().unwrap()])
                    && close(pair.log_p()[i], pair.log_p()[*g.last().unwrap()]) =>
            {
                g.push(i)
            }
            _ => groups.push(vec![i]),
        }
    }
    let mut log_p_groups = Vec::with_capacity(groups.len());
    let mut log_q_groups = Vec::with_capacity(groups.len());
    for g in groups {
        let lp: Vec<f64> = g.iter().map(|&i| pair.log_p()[i]).collect();
        let lq: Vec<f64> = g.iter().map(|&i| pair.log_q()[i]).collect();
        log_p_groups.push(log_sum_exp(&lp));
        log_q_groups.push(log_sum_exp(&lq));
    }
    (log_p_groups, log_q_groups)
}

/// Σ jᵢ·wᵢ skipping zero counts, so 0·(−∞) never produces NaN.
fn dot_counts(counts: &[usize], weights: &[f64]) -> f64 {
    counts
        .iter()
        .zip(weights)
        .filter(|(&j, _)| j > 0)
        .map(|(&j, &w)| j as f64 * w)
        .sum()
}

/// Exact Neyman–Pearson over the type classes of the n-fold i.i.d. pair.
///
/// Outcomes with identical (p, q) are merged first; sequences inside one
/// type class of the merged alphabet then share a common likelihood ratio,
/// so the greedy fill with a fractional boundary type attains the optimum
/// of the full sequence-level program, not just of a pinched relaxation.
pub fn np_classical(pair: &ClassicalPair, n: usize, log_mu: f64) -> Result<NPResult> {
    np_classical_with_cap(pair, n, log_mu, TYPE_CAP_DEFAULT)
}

pub fn np_classical_with_cap(
    pair: &ClassicalPair,
    n: usize,
    log_mu: f64,
    cap: usize,
) -> Result<NPResult> {
    if log_mu > 0.0 {
        return Err(Error::BudgetAboveOne(log_mu));
    }
    let (lpg, lqg) = group_outcomes(pair);
    let k = lpg.len();
    let types = enumerate_types(k, n, cap)?;

    let mut llr = Vec::with_capacity(types.len());
    let mut log_p_type = Vec::with_capacity(types.len());
    let mut log_q_type = Vec::with_capacity(types.len());
    for t in &types {
        let lp = t.log_multiplicity + dot_counts(&t.counts, &lpg);
        let lq = t.log_multiplicity + dot_counts(&t.counts, &lqg);
        // per-sequence ratio Σ j (log p̃ − log q̃); the multiplicity cancels
        llr.push(lp - lq);
        log_p_type.push(lp);
        log_q_type.push(lq);
    }
    // Sort descending; the stable sort keeps lexicographic order on ties.
    let mut sorted: Vec<usize> = (0..types.len()).collect();
    sorted.sort_by(|&i, &j| llr[j].partial_cmp(&llr[i]).unwrap());

    let mut acc_q = f64::NEG_INFINITY;
    let mut acc_p = f64::NEG_INFINITY;
    let mut cut_index = sorted.len();
    let mut boundary_weight = 0.0;
    let mut lambda_star = 0.0;
    for (pos, &t) in sorted.iter().enumerate() {
        let with_t = log_add_exp(acc_q, log_q_type[t]);
        if with_t <= log_mu {
            acc_q = with_t;
            acc_p = log_add_exp(acc_p, log_p_type[t]);
        } else {
            // fractional boundary: w = (μ − acc)/q_t, exact in log-domain
            let log_w = if acc_q < log_mu {
                log_diff_exp(log_mu, acc_q) - log_q_type[t]
            } else {
                f64::NEG_INFINITY
            };
            if log_w.is_finite() && log_p_type[t] > f64::NEG_INFINITY {
                acc_p = log_add_exp(acc_p, log_w + log_p_type[t]);
            }
            cut_index = pos;
            boundary_weight = log_w.exp();
            lambda_star = llr[t].exp();
            break;
        }
    }

    // dual certificate at λ*: logsumexp over ln(p_t − λ*q_t)₊ plus ln(λ*μ)
    let log_lambda = lambda_star.max(f64::MIN_POSITIVE).ln();
    let mut dual_terms: Vec<f64> = Vec::with_capacity(types.len() + 1);
    for t in 0..types.len() {
        if log_p_type[t] > log_lambda + log_q_type[t] {
            dual_terms.push(log_diff_exp(log_p_type[t], log_lambda + log_q_type[t]));
        }
    }
    if lambda_star > 0.0 {
        dual_terms.push(log_lambda + log_mu);
    }
    let log_dual = log_sum_exp(&dual_terms);
    let log_success = acc_p.min(0.0);
    let duality_gap = if log_dual == f64::NEG_INFINITY && log_success == f64::NEG_INFINITY {
        0.0
    } else {
        (log_success - log_dual).abs()
    };

    Ok(NPResult {
        log_budget: log_mu,
        log_success,
        lambda_star,
        duality_gap,
        test: OptimalTest::Classical(ClassicalTest {
            sorted_type_ids: sorted,
            cut_index,
            boundary_weight,
        }),
    })
}

/// e^{log_factor} · T, exact in log-domain. Both error functionals scale
/// by the same factor.
pub fn scale_test(t: &TestOperator, log_factor: f64) -> Result<TestOperator> {
    if log_factor > 0.0 {
        return Err(Error::PositiveLogFactor(log_factor));
    }
    TestOperator::new(t.operator().clone(), t.log_scale() + log_factor)
}

/// The block test e^{−r(n−kn₀)} T₀^{⊗k} ⊗ 1^{⊗(n−kn₀)}, kept symbolic:
/// its functionals on n-fold product states follow from the n₀-copy values
/// without materializing the n-copy operator.
#[derive(Debug, Clone)]
pub struct BlockTest {
    pub base: TestOperator,
    pub n0: usize,
    pub n: usize,
    /// Number of whole blocks, ⌊n/n₀⌋.
    pub k: usize,
    /// Copies covered by the identity padding, n − k·n₀.
    pub pad: usize,
    /// ln of the damping prefactor, −r·pad.
    pub log_prefactor: f64,
}

impl BlockTest {
    /// ln ω^{⊗n}(T̃) given ln ω^{⊗n₀}(T₀); exact log arithmetic.
    pub fn log_functional(&self, log_base_value: f64) -> f64 {
        self.log_prefactor + self.k as f64 * log_base_value
    }
}

pub fn block_test(base: TestOperator, n0: usize, n: usize, r: f64) -> Result<BlockTest> {
    if n0 < 1 || n < n0 || r < 0.0 {
        return Err(Error::BadBlockParams { n0, n, r });
    }
    let k = n / n0;
    let pad = n - k * n0;
    Ok(BlockTest {
        base,
        n0,
        n,
        k,
        pad,
        log_prefactor: -r * pad as f64,
    })
}

/// A unital channel usable on both sides of a reverse-data-processing check.
#[derive(Debug, Clone)]
pub enum UnitalChannel {
    /// The pinching Σ eⱼ · eⱼ; self-dual.
    Pinching(PinchingSpec),
    /// x ↦ (1−w)x + w·tr(x)·1/d; self-dual, unital and trace preserving.
    MixWithUniform(f64),
}

impl UnitalChannel {
    pub fn apply(&self, d: &DensityOperator) -> Result<DensityOperator> {
        match self {
            UnitalChannel::Pinching(spec) => DensityOperator::new(pinch(d.operator(), spec)?),
            UnitalChannel::MixWithUniform(w) => {
                let dim = d.dim();
                let mixed = d.matrix() * Complex64::new(1.0 - w, 0.0)
                    + DMatrix::<Complex64>::identity(dim, dim)
                        * Complex64::new(w / dim as f64, 0.0);
                DensityOperator::from_matrix(mixed)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReverseDpiReport {
    pub success_processed: f64,
    pub success_original: f64,
}

impl ReverseDpiReport {
    /// Degrading the states can only shrink the optimal success.
    pub fn holds(&self, tol: f64) -> bool {
        self.success_processed <= self.success_original + tol
    }
}

/// Finite-n surrogate of reverse data processing: the optimal success for
/// the processed pair never exceeds the original one, because any test for
/// the processed pair pulls back through the channel with identical
/// functionals.
pub fn reverse_dpi_check(
    pair: &StatePair,
    channel: &UnitalChannel,
    n: usize,
    log_mu: f64,
    cap: usize,
) -> Result<ReverseDpiReport> {
    let rho_p = channel.apply(pair.rho())?;
    let eta_p = channel.apply(pair.eta())?;
    let orig = pair.tensor_power_with_cap(n, cap)?;
    let rho_pn = rho_p.tensor_power_with_cap(n, cap)?;
    let eta_pn = eta_p.tensor_power_with_cap(n, cap)?;
    let processed = np_dense(&rho_pn, &eta_pn, log_mu)?;
    let original = np_dense(orig.rho(), orig.eta(), log_mu)?;
    Ok(ReverseDpiReport {
        success_processed: processed.success(),
        success_original: original.success(),
    })
}

#[derive(Debug, Clone)]
pub struct OrderPerturbReport {
    pub holds: bool,
    /// Success for (ρ, η) at the relaxed budget e^{ns}μ (clamped at 1).
    pub success_relaxed: f64,
    /// Success for (ρ, η̃) at budget μ.
    pub success_tilde: f64,
}

/// Surrogate of the one-sided replacement bound: whenever η ≤ e^s η̃,
/// every test feasible for (ρ, η̃) at budget μ is feasible for (ρ, η) at
/// budget e^{ns}μ, so the relaxed success dominates.
pub fn order_perturb_check(
    rho: &DensityOperator,
    eta: &DensityOperator,
    eta_tilde: &DensityOperator,
    s: f64,
    n: usize,
    log_mu: f64,
    cap: usize,
) -> Result<OrderPerturbReport> {
    let scaled_tilde = eta_tilde.spectral_map(|w| w * s.exp());
    if !loewner_leq(eta.operator(), &scaled_tilde, 1e-10)? {
        return Err(Error::OrderViolation);
    }
    let rho_n = rho.tensor_power_with_cap(n, cap)?;
    let eta_n = eta.tensor_power_with_cap(n, cap)?;
    let tilde_n = eta_tilde.tensor_power_with_cap(n, cap)?;
    let relaxed_budget = (log_mu + n as f64 * s).min(0.0);
    let relaxed = np_dense(&rho_n, &eta_n, relaxed_budget)?;
    let tilde = np_dense(&rho_n, &tilde_n, log_mu)?;
    Ok(OrderPerturbReport {
        holds: relaxed.success() >= tilde.success() - 1e-9,
        success_relaxed: relaxed.success(),
        success_tilde: tilde.success(),
    })
}
