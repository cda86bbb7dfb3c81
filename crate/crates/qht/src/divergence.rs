//! Rényi-type divergences and the optimized quantities built from them.
//!
//! Normalization: `ln Q*_α = ((α−1)/α) · D*_α`, i.e.
//! `D*_α = (1/(α−1)) ln tr[(η^{(1−α)/2α} ρ η^{(1−α)/2α})^α]`,
//! the unique convention under which the Hoeffding anti-divergence reads
//! `H*_r = sup_{α>1} ((α−1)/α) r − ln Q*_α`. All results are in nats.
//!
//! Large α is handled entirely in log-domain: the α-th Schatten norm of the
//! sandwiched operator is `exp((1/α) logsumexp(α ln gᵢ))` over its spectrum,
//! which stays finite up to the supported α = 1e6.

use crate::error::{Error, Result};
use crate::logspace::log_sum_exp;
use crate::operator_core::{eigh, DensityOperator, StatePair, FULL_RANK_MIN};

/// Upper end of the supported α range for `q_star`/`sandwiched_renyi`.
pub const ALPHA_MAX_SUPPORTED: f64 = 1e6;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha <= ALPHA_MAX_SUPPORTED) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(())
}

/// ln ‖η^{(1−α)/2α} ρ η^{(1−α)/2α}‖_α, computed in log-domain.
pub fn ln_q_star_densities(
    rho: &DensityOperator,
    eta: &DensityOperator,
    alpha: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    if !eta.is_full_rank() {
        return Err(Error::EtaSingular(eta.min_eigenvalue()));
    }
    if rho.dim() != eta.dim() {
        return Err(Error::DimMismatch(rho.dim(), eta.dim()));
    }
    let s = (1.0 - alpha) / (2.0 * alpha);
    let weight = eta.mat_power(s)?;
    let sandwiched = weight.matrix() * rho.matrix() * weight.matrix();
    let (g, _) = eigh(&sandwiched)?;
    let scaled: Vec<f64> = g
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| alpha * x.ln())
        .collect();
    Ok(log_sum_exp(&scaled) / alpha)
}

/// ln Q*_α(ρ‖η) = ((α−1)/α) D*_α(ρ‖η).
pub fn ln_q_star(pair: &StatePair, alpha: f64) -> Result<f64> {
    ln_q_star_densities(pair.rho(), pair.eta(), alpha)
}

/// The Schatten α-norm Q*_α itself (linear domain).
pub fn q_star(pair: &StatePair, alpha: f64) -> Result<f64> {
    Ok(ln_q_star(pair, alpha)?.exp())
}

/// Sandwiched Rényi divergence D*_α for α ∈ (1, 1e6].
pub fn sandwiched_renyi(pair: &StatePair, alpha: f64) -> Result<f64> {
    sandwiched_renyi_densities(pair.rho(), pair.eta(), alpha)
}

pub fn sandwiched_renyi_densities(
    rho: &DensityOperator,
    eta: &DensityOperator,
    alpha: f64,
) -> Result<f64> {
    Ok(ln_q_star_densities(rho, eta, alpha)? * alpha / (alpha - 1.0))
}

/// Petz–Rényi divergence (1/(α−1)) ln tr(ρ^α η^{1−α}) for α ∈ (0,1)∪(1,2].
pub fn petz_renyi(pair: &StatePair, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 2.0) || alpha == 1.0 {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let rho_a = pair.rho().mat_power(alpha)?;
    let eta_b = pair.eta().mat_power(1.0 - alpha)?;
    let tr = (rho_a.matrix() * eta_b.matrix()).trace().re;
    Ok(tr.ln() / (alpha - 1.0))
}

/// Umegaki relative entropy tr ρ (ln ρ − ln η), evaluated in the eigenbases.
pub fn umegaki(pair: &StatePair) -> Result<f64> {
    umegaki_densities(pair.rho(), pair.eta())
}

pub fn umegaki_densities(rho: &DensityOperator, eta: &DensityOperator) -> Result<f64> {
    if !eta.is_full_rank() {
        return Err(Error::EtaSingular(eta.min_eigenvalue()));
    }
    // tr ρ ln ρ = Σ λ ln λ over the cached spectrum; 0 ln 0 = 0.
    let rho_ln_rho: f64 = rho
        .eigenvalues()
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| w * w.ln())
        .sum();
    let ln_eta = eta.spectral_map(|w| w.max(FULL_RANK_MIN).ln());
    let cross = (rho.matrix() * ln_eta.matrix()).trace().re;
    Ok(rho_ln_rho - cross)
}

/// Max-relative entropy D*_∞; equal to the pair's cached order constant.
pub fn max_relative(pair: &StatePair) -> f64 {
    pair.order_log()
}

/// Where the supremum over α was (approximately) attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArgAlpha {
    /// Degenerate branch r ≤ D₁: the supremum value 0 is attained at α = 1.
    AtOne,
    /// Interior maximizer.
    At(f64),
    /// The supremum is approached as α → ∞ with value r − D*_∞.
    Limit,
}

/// Result of a Hoeffding anti-divergence evaluation.
#[derive(Debug, Clone)]
pub struct HoeffdingResult {
    pub r: f64,
    /// sup_{α>1} ((α−1)/α)(r − D*_α), within the requested tolerance.
    pub value: f64,
    pub arg_alpha: ArgAlpha,
    /// Bound r/α_max on the error from truncating the α range.
    pub truncation_bound: f64,
}

/// Golden-section maximization on [lo, hi]; returns (argmax, max).
/// Assumes the function is unimodal on the bracket, which holds for the
/// bracketing triples produced by a dense grid scan.
fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > 1e-12 * hi.abs().max(1.0) {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Geometric grid over [lo, hi] with `per_decade` points per decade.
fn geometric_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    debug_assert!(lo > 0.0 && hi > lo);
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1) + 1;
    let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
    let mut grid = Vec::with_capacity(n);
    let mut x = lo;
    for _ in 0..n {
        grid.push(x.min(hi));
        x *= ratio;
    }
    grid
}

/// Scan a grid for the max, then refine on the bracketing triple.
/// No unimodality is assumed globally; only the bracket is refined.
fn grid_then_refine(f: &dyn Fn(f64) -> f64, grid: &[f64]) -> (f64, f64) {
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    for (i, &v) in vals.iter().enumerate() {
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = grid[best_i.saturating_sub(1)];
    let hi = grid[(best_i + 1).min(grid.len() - 1)];
    if hi > lo {
        let (x, v) = golden_max(f, lo, hi);
        if v > best {
            return (x, v);
        }
    }
    (grid[best_i], best)
}

/// Hoeffding anti-divergence H*_r = sup_{α>1} ((α−1)/α)(r − D*_α) within
/// `tol`, with the attained branch and the α-truncation bound reported.
pub fn hoeffding_anti_divergence(pair: &StatePair, r: f64, tol: f64) -> Result<HoeffdingResult> {
    if r < 0.0 {
        return Err(Error::NegativeRate(r));
    }
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::TolOutOfRange(tol));
    }
    let d1 = umegaki(pair)?;
    if r <= d1 {
        return Ok(HoeffdingResult {
            r,
            value: 0.0,
            arg_alpha: ArgAlpha::AtOne,
            truncation_bound: 0.0,
        });
    }
    let alpha_max = (r / tol).clamp(64.0, ALPHA_MAX_SUPPORTED);
    let objective = |alpha: f64| -> f64 {
        let d = sandwiched_renyi(pair, alpha).unwrap_or(f64::NEG_INFINITY);
        (alpha - 1.0) / alpha * (r - d)
    };
    // grid geometric in (α−1) to resolve both the α→1 boundary layer and
    // the large-α tail
    let grid: Vec<f64> = geometric_grid(1e-4, alpha_max - 1.0, 64)
        .into_iter()
        .map(|t| 1.0 + t)
        .collect();
    let (alpha_star, finite_best) = grid_then_refine(&objective, &grid);
    let limit_value = r - max_relative(pair);
    let truncation_bound = r / alpha_max;
    if limit_value > finite_best {
        Ok(HoeffdingResult {
            r,
            value: limit_value.max(0.0),
            arg_alpha: ArgAlpha::Limit,
            truncation_bound,
        })
    } else {
        Ok(HoeffdingResult {
            r,
            value: finite_best.max(0.0),
            arg_alpha: ArgAlpha::At(alpha_star),
            truncation_bound,
        })
    }
}

/// Generalized κ-cutoff rate inf{r₀ : H*_r ≥ κ(r − r₀) ∀ r > 0}, computed
/// as sup_{r>0} (r − H*_r/κ). By the strong-converse identity this equals
/// D*_{1/(1−κ)} up to the optimizer tolerance.
pub fn cutoff_rate(pair: &StatePair, kappa: f64, tol: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::KappaOutOfRange(kappa));
    }
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::TolOutOfRange(tol));
    }
    let h_tol = (tol * 0.1).min(1e-4);
    let objective = |r: f64| -> f64 {
        match hoeffding_anti_divergence(pair, r, h_tol) {
            Ok(h) => r - h.value / kappa,
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let hi = 4.0 * (pair.order_log() + 1.0);
    let grid = geometric_grid(tol.min(1e-4), hi, 16);
    let (_, best) = grid_then_refine(&objective, &grid);
    Ok(best.max(0.0))
}

/// A sampled α ↦ D*_α curve; construction enforces monotonicity in α.
#[derive(Debug, Clone)]
pub struct DivergenceCurve {
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
    pub pair_id: String,
}

impl DivergenceCurve {
    /// `alphas` must be ascending in (1, ∞); `values` must be non-decreasing
    /// within 1e-9, which is how monotonicity of D*_α surfaces numerically.
    pub fn new(alphas: Vec<f64>, values: Vec<f64>, pair_id: String) -> Result<Self> {
        if alphas.len() != values.len() {
            return Err(Error::DimMismatch(alphas.len(), values.len()));
        }
        for (i, &a) in alphas.iter().enumerate() {
            if a <= 1.0 || (i > 0 && a <= alphas[i - 1]) {
                return Err(Error::AlphaOutOfRange(a));
            }
        }
        for i in 1..values.len() {
            if values[i] < values[i - 1] - 1e-9 {
                return Err(Error::BadDistribution(format!(
                    "divergence curve decreases at alpha = {}: {} -> {}",
                    alphas[i],
                    values[i - 1],
                    values[i]
                )));
            }
        }
        Ok(Self {
            alphas,
            values,
            pair_id,
        })
    }

    pub fn sample(pair: &StatePair, alphas: Vec<f64>, pair_id: String) -> Result<Self> {
        let mut values = Vec::with_capacity(alphas.len());
        for &a in &alphas {
            values.push(sandwiched_renyi(pair, a)?);
        }
        Self::new(alphas, values, pair_id)
    }
}
