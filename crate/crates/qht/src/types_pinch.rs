//! Pinching maps, type-class enumeration, and the reduction of tensor-power
//! pairs to commuting (classical) ones.
//!
//! A pinching F(x) = Σⱼ eⱼ x eⱼ for orthogonal projectors summing to the
//! identity is the conditional expectation onto the commutant of any
//! operator with those spectral projectors. Two facts drive everything
//! downstream: K·F(x) ≥ x for positive x (cp-order index ≤ K), and the
//! number of distinct eigenvalues of d^⊗n grows only polynomially, as the
//! number of compositions of n into K parts, ≤ (n+1)^K.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::logspace::log_sum_exp;
use crate::operator_core::{eigh, DensityOperator, HermitianOperator, StatePair};

/// Default cap on the number of enumerated compositions.
pub const TYPE_CAP_DEFAULT: usize = 10_000_000;

/// Relative tolerance for grouping repeated eigenvalues of tensor powers.
pub const EIGENVALUE_GROUP_TOL: f64 = 1e-9;

/// An ordered family of orthogonal projections summing to the identity.
#[derive(Debug, Clone)]
pub struct PinchingSpec {
    projectors: Vec<HermitianOperator>,
    dim: usize,
}

impl PinchingSpec {
    /// Validates idempotence, mutual orthogonality and completeness, each
    /// within 1e-9 entrywise.
    pub fn new(projectors: Vec<HermitianOperator>) -> Result<Self> {
        assert!(
            !projectors.is_empty(),
            "pinching needs at least one projector"
        );
        let dim = projectors[0].dim();
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        for (i, p) in projectors.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimMismatch(p.dim(), dim));
            }
            let m = p.matrix();
            let idem = (m * m - m).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if idem > 1e-9 {
                return Err(Error::BadDistribution(format!(
                    "projector {i} is not idempotent: deviation {idem:e}"
                )));
            }
            for (j, q) in projectors.iter().enumerate().skip(i + 1) {
                let cross = (m * q.matrix())
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                if cross > 1e-9 {
                    return Err(Error::BadDistribution(format!(
                        "projectors {i} and {j} are not orthogonal: {cross:e}"
                    )));
                }
            }
            sum += m;
        }
        let complete = (sum - DMatrix::<Complex64>::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if complete > 1e-9 {
            return Err(Error::BadDistribution(format!(
                "projectors do not sum to identity: deviation {complete:e}"
            )));
        }
        Ok(Self { projectors, dim })
    }

    /// Rank-1 projectors onto the computational basis (full dephasing).
    pub fn computational(dim: usize) -> Self {
        let projectors = (0..dim)
            .map(|i| {
                let mut m = DMatrix::<Complex64>::zeros(dim, dim);
                m[(i, i)] = Complex64::new(1.0, 0.0);
                HermitianOperator::new(m).expect("basis projector")
            })
            .collect();
        Self { projectors, dim }
    }

    /// Spectral projectors of a density, grouped by distinct eigenvalue.
    /// This is the pinching onto the commutant of `d`.
    pub fn from_spectrum(d: &DensityOperator) -> Result<Self> {
        let groups = group_eigenvalues(d.eigenvalues().as_slice());
        let v = d.eigenvectors();
        let projectors: Result<Vec<HermitianOperator>> = groups
            .iter()
            .map(|idxs| {
                let mut m = DMatrix::<Complex64>::zeros(d.dim(), d.dim());
                for &i in idxs {
                    let col = v.column(i);
                    m += col * col.adjoint();
                }
                HermitianOperator::new(m)
            })
            .collect();
        Self::new(projectors?)
    }

    pub fn k(&self) -> usize {
        self.projectors.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn projectors(&self) -> &[HermitianOperator] {
        &self.projectors
    }
}

/// Indices of `values` (assumed sorted) grouped by relative closeness.
pub(crate) fn group_eigenvalues(values: &[f64]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..values.len() {
        let matched = groups.last_mut().and_then(|g| {
            let j = *g.last().unwrap();
            let scale = values[i].abs().max(values[j].abs()).max(f64::MIN_POSITIVE);
            ((values[i] - values[j]).abs() <= EIGENVALUE_GROUP_TOL * scale).then_some(g)
        });
        match matched {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    groups
}

/// The conditional expectation Σⱼ eⱼ x eⱼ.
pub fn pinch(x: &HermitianOperator, spec: &PinchingSpec) -> Result<HermitianOperator> {
    if x.dim() != spec.dim() {
        return Err(Error::DimMismatch(x.dim(), spec.dim()));
    }
    let mut out = DMatrix::<Complex64>::zeros(x.dim(), x.dim());
    for p in spec.projectors() {
        out += p.matrix() * x.matrix() * p.matrix();
    }
    HermitianOperator::new(out)
}

/// Empirical check of the cp-order index bound K·F(x) ≥ x over seeded
/// random PSD inputs; returns the worst observed −λ_min(K·F(x) − x) and K.
pub fn cp_index_check(spec: &PinchingSpec, samples: usize, seed: u64) -> (f64, usize) {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = spec.k() as f64;
    let dim = spec.dim();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let psd = &g * g.adjoint();
        let tr = psd.trace().re.max(f64::MIN_POSITIVE);
        let x = HermitianOperator::new(psd / Complex64::new(tr, 0.0)).expect("psd is hermitian");
        let pinched = pinch(&x, spec).expect("dims match");
        let diff = pinched.matrix() * Complex64::new(k, 0.0) - x.matrix();
        let (w, _) = eigh(&diff).expect("hermitian difference");
        worst = worst.max(-w[w.len() - 1]);
    }
    (worst, spec.k())
}

/// A composition (j₁,…,j_K) of n with its log multinomial multiplicity and
/// a log-weight Σ jᵢ ln dᵢ attached via [`TypeClass::weighted`].
#[derive(Debug, Clone)]
pub struct TypeClass {
    pub counts: Vec<usize>,
    /// ln of the multinomial coefficient n! / Π jᵢ!.
    pub log_multiplicity: f64,
    /// ln Π dᵢ^{jᵢ} once weights are attached; 0 from plain enumeration.
    pub log_eta_eigenvalue: f64,
}

impl TypeClass {
    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Attach log-weights: log_eta_eigenvalue = Σ jᵢ log_d[i].
    pub fn weighted(&self, log_d: &[f64]) -> TypeClass {
        debug_assert_eq!(log_d.len(), self.counts.len());
        let w: f64 = self
            .counts
            .iter()
            .zip(log_d)
            .map(|(&j, &ld)| if j == 0 { 0.0 } else { j as f64 * ld })
            .sum();
        TypeClass {
            counts: self.counts.clone(),
            log_multiplicity: self.log_multiplicity,
            log_eta_eigenvalue: w,
        }
    }
}

/// ln C(n+K-1, K-1), the number of compositions, in log domain.
fn ln_composition_count(k: usize, n: usize) -> f64 {
    ln_gamma((n + k) as f64) - ln_gamma((n + 1) as f64) - ln_gamma(k as f64)
}

/// All compositions of n into K nonnegative parts, lexicographic, with
/// log-multiplicities; errors out if the count exceeds `cap`.
pub fn enumerate_types(k: usize, n: usize, cap: usize) -> Result<Vec<TypeClass>> {
    assert!(k >= 1 && n >= 1, "enumerate_types needs K >= 1, n >= 1");
    let ln_count = ln_composition_count(k, n);
    if ln_count > (cap as f64).ln() + 1e-9 {
        return Err(Error::TypeCapExceeded {
            count: ln_count.exp(),
            cap,
        });
    }
    let ln_n_fact = ln_gamma(n as f64 + 1.0);
    let mut out = Vec::new();
    let mut counts = vec![0usize; k];
    fill_types(&mut counts, 0, n, ln_n_fact, &mut out);
    Ok(out)
}

fn fill_types(
    counts: &mut Vec<usize>,
    pos: usize,
    remaining: usize,
    ln_n_fact: f64,
    out: &mut Vec<TypeClass>,
) {
    if pos == counts.len() - 1 {
        counts[pos] = remaining;
        let log_multiplicity = ln_n_fact
            - counts
                .iter()
                .map(|&j| ln_gamma(j as f64 + 1.0))
                .sum::<f64>();
        out.push(TypeClass {
            counts: counts.clone(),
            log_multiplicity,
            log_eta_eigenvalue: 0.0,
        });
        return;
    }
    for j in 0..=remaining {
        counts[pos] = j;
        fill_types(counts, pos + 1, remaining - j, ln_n_fact, out);
    }
}

/// (F_n(ρ^⊗n), η^⊗n) where F_n pinches onto the commutant of η^⊗n.
/// The two outputs commute, so the pair admits a classical reduction.
pub fn pinched_pair_dense(pair: &StatePair, n: usize, cap: usize) -> Result<StatePair> {
    let rho_n = pair.rho().tensor_power_with_cap(n, cap)?;
    let eta_n = pair.eta().tensor_power_with_cap(n, cap)?;
    let spec = PinchingSpec::from_spectrum(&eta_n)?;
    let pinched = pinch(rho_n.operator(), &spec)?;
    let pinched_rho = DensityOperator::new(pinched)?;
    StatePair::new(pinched_rho, eta_n)
}

/// A pair of classical distributions in log-domain; q has full support.
#[derive(Debug, Clone)]
pub struct ClassicalPair {
    log_p: Vec<f64>,
    log_q: Vec<f64>,
}

impl ClassicalPair {
    /// Both log-vectors must normalize (logsumexp = 0 within 1e-10) and
    /// log_q must be finite everywhere.
    pub fn new(log_p: Vec<f64>, log_q: Vec<f64>) -> Result<Self> {
        if log_p.len() != log_q.len() {
            return Err(Error::DimMismatch(log_p.len(), log_q.len()));
        }
        let sp = log_sum_exp(&log_p);
        if sp.abs() > 1e-10 {
            return Err(Error::BadDistribution(format!(
                "p does not normalize: logsumexp = {sp:e}"
            )));
        }
        let sq = log_sum_exp(&log_q);
        if sq.abs() > 1e-10 {
            return Err(Error::BadDistribution(format!(
                "q does not normalize: logsumexp = {sq:e}"
            )));
        }
        if log_q.iter().any(|x| !x.is_finite()) {
            return Err(Error::BadDistribution(
                "q must have full support".to_string(),
            ));
        }
        Ok(Self { log_p, log_q })
    }

    pub fn from_probabilities(p: &[f64], q: &[f64]) -> Result<Self> {
        Self::new(
            p.iter().map(|&x| x.ln()).collect(),
            q.iter().map(|&x| x.ln()).collect(),
        )
    }

    pub fn n_outcomes(&self) -> usize {
        self.log_p.len()
    }

    pub fn log_p(&self) -> &[f64] {
        &self.log_p
    }

    pub fn log_q(&self) -> &[f64] {
        &self.log_q
    }

    /// Diagonal quantum embedding; exact for every divergence and test.
    pub fn to_state_pair(&self) -> Result<StatePair> {
        let p: Vec<f64> = self.log_p.iter().map(|x| x.exp()).collect();
        let q: Vec<f64> = self.log_q.iter().map(|x| x.exp()).collect();
        StatePair::new(
            DensityOperator::from_probabilities(&p)?,
            DensityOperator::from_probabilities(&q)?,
        )
    }
}

/// Extracts the joint eigenvalue lists of two commuting densities as a
/// classical pair. Simultaneous diagonalization is done blockwise: group
/// the eigenspaces of `b`, then diagonalize the compression of `a` inside
/// each block.
pub fn classical_from_commuting(a: &DensityOperator, b: &DensityOperator) -> Result<ClassicalPair> {
    let comm = a.operator().commutator_norm(b.operator());
    if comm > 1e-9 {
        return Err(Error::NotCommuting(comm));
    }
    let groups = group_eigenvalues(b.eigenvalues().as_slice());
    let v = b.eigenvectors();
    let mut log_p = Vec::with_capacity(a.dim());
    let mut log_q = Vec::with_capacity(a.dim());
    for idxs in groups {
        let block_q = b.eigenvalues()[idxs[0]];
        let basis = v.select_columns(idxs.iter());
        let compressed = basis.adjoint() * a.matrix() * &basis;
        let (w, _) = eigh(&compressed)?;
        for &p_val in w.iter() {
            log_p.push(if p_val > 0.0 {
                p_val.ln()
            } else {
                f64::NEG_INFINITY
            });
            log_q.push(block_q.ln());
        }
    }
    ClassicalPair::new(log_p, log_q)
}
