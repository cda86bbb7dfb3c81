//! Finite-spectrum approximation of a density by geometric spectral binning.
//!
//! The spectrum is partitioned into intervals [δ aʲ, δ aʲ⁺¹) with a = 1 + 1/k
//! and δ the smallest eigenvalue. Each bin is replaced by the multiplicity-
//! weighted mean of the eigenvalues it contains, which is the trace-preserving
//! conditional expectation onto the bin-projector algebra. The output F_k(d)
//! is sandwiched as (1+1/k)⁻¹ d ≤ F_k(d) ≤ (1+1/k) d, and perturbs every
//! sandwiched divergence by at most ln(1 + 1/k).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::divergence::sandwiched_renyi_densities;
use crate::error::{Error, Result};
use crate::operator_core::{DensityOperator, HermitianOperator, StatePair, FULL_RANK_MIN};

/// One spectral bin: its lower edge δ aʲ, the orthogonal projector onto the
/// enclosed eigenvectors, and the value assigned to the bin.
#[derive(Debug, Clone)]
pub struct SpectralBin {
    pub lower_edge: f64,
    pub projector: HermitianOperator,
    pub value: f64,
    /// Number of eigenvalues merged into this bin.
    pub multiplicity: usize,
}

/// A density together with its binned approximation and the bin data that
/// certifies the sandwich.
#[derive(Debug, Clone)]
pub struct BinnedDensity {
    pub original: DensityOperator,
    pub k: usize,
    /// Bin ratio a = 1 + 1/k.
    pub a: f64,
    /// Smallest eigenvalue of the original density.
    pub delta: f64,
    pub bins: Vec<SpectralBin>,
    pub binned: DensityOperator,
}

impl BinnedDensity {
    /// Number of occupied bins, i.e. |spec(F_k(d))| counted with grouping.
    pub fn bin_count(&self) -> usize {
        self.bins.len()
    }

    /// The 2kδ⁻² cardinality bound; meaningful whenever δ ≤ 1 ≤ δ⁻¹ covers
    /// the spectrum, which holds for any full-rank density.
    pub fn spectrum_cap(&self) -> f64 {
        2.0 * self.k as f64 / (self.delta * self.delta)
    }
}

/// Bins the spectrum of `d` on the geometric ladder δ(1+1/k)ʲ.
pub fn bin_density(d: &DensityOperator, k: usize) -> Result<BinnedDensity> {
    assert!(k >= 1, "bin_density needs k >= 1");
    let delta = d.min_eigenvalue();
    if delta < FULL_RANK_MIN {
        return Err(Error::SingularDensity(delta));
    }
    let a = 1.0 + 1.0 / k as f64;
    let ln_a = a.ln();
    let dim = d.dim();
    let eigenvalues = d.eigenvalues();
    let eigenvectors = d.eigenvectors();

    // Eigenvalues are descending; walk them and assign ladder indices.
    // The tiny nudge keeps an eigenvalue sitting exactly on an edge in the
    // bin whose lower edge it is.
    let mut by_bin: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..dim {
        let j = ((eigenvalues[i] / delta).ln() / ln_a + 1e-12).floor() as usize;
        match by_bin.iter_mut().find(|(jj, _)| *jj == j) {
            Some((_, idxs)) => idxs.push(i),
            None => by_bin.push((j, vec![i])),
        }
    }
    by_bin.sort_by_key(|(j, _)| *j);

    let mut bins = Vec::with_capacity(by_bin.len());
    let mut binned_mat = DMatrix::<Complex64>::zeros(dim, dim);
    for (j, idxs) in &by_bin {
        let mean: f64 = idxs.iter().map(|&i| eigenvalues[i]).sum::<f64>() / idxs.len() as f64;
        let mut proj = DMatrix::<Complex64>::zeros(dim, dim);
        for &i in idxs {
            let v = eigenvectors.column(i);
            proj += v * v.adjoint();
        }
        binned_mat += &proj * Complex64::new(mean, 0.0);
        bins.push(SpectralBin {
            lower_edge: delta * a.powi(*j as i32),
            projector: HermitianOperator::new(proj)?,
            value: mean,
            multiplicity: idxs.len(),
        });
    }

    let binned = DensityOperator::from_matrix(binned_mat)?;
    Ok(BinnedDensity {
        original: d.clone(),
        k,
        a,
        delta,
        bins,
        binned,
    })
}

/// |D*_α(ρ‖η) − D*_α(ρ‖F_k(η))| for each α. Each gap is bounded by
/// ln(1 + 1/k), the sharp form of the binning perturbation bound.
pub fn binning_divergence_gap(
    pair: &StatePair,
    k: usize,
    alphas: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let binned = bin_density(pair.eta(), k)?;
    let mut out = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let original = sandwiched_renyi_densities(pair.rho(), pair.eta(), alpha)?;
        let perturbed = sandwiched_renyi_densities(pair.rho(), &binned.binned, alpha)?;
        out.push((alpha, (original - perturbed).abs()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_core::loewner_leq;

    fn diag(p: &[f64]) -> DensityOperator {
        DensityOperator::from_probabilities(p).unwrap()
    }

    fn assert_sandwich(b: &BinnedDensity, tol: f64) {
        // a^{-1} * binned <= original <= a * binned
        let scaled_down = b.binned.spectral_map(|w| w / b.a);
        let scaled_up = b.binned.spectral_map(|w| w * b.a);
        assert!(loewner_leq(&scaled_down, b.original.operator(), tol).unwrap());
        assert!(loewner_leq(b.original.operator(), &scaled_up, tol).unwrap());
    }

    fn bins_values(b: &BinnedDensity) -> Vec<f64> {
        b.bins.iter().map(|bin| bin.value).collect()
    }

    #[test]
    fn single_eigenvalue_is_fixed_point() {
        let b = bin_density(&DensityOperator::maximally_mixed(2), 10).unwrap();
        assert_eq!(b.bin_count(), 1);
        let err = (b.binned.matrix() - b.original.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn three_level_example_merges_close_eigenvalues() {
        // a = 1.1; 0.30 and 0.31 share the j=0 bin, 0.39 sits alone
        let b = bin_density(&diag(&[0.30, 0.31, 0.39]), 10).unwrap();
        assert_eq!(b.bin_count(), 2);
        let mut values = bins_values(&b);
        values.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((values[0] - 0.305).abs() < 1e-12);
        assert!((values[1] - 0.39).abs() < 1e-12);
        assert_sandwich(&b, 1e-9);
    }

    #[test]
    fn well_separated_eigenvalues_stay_put() {
        // 0.8 lands in bin j = 14 of the delta = 0.2 ladder: binned = original
        let b = bin_density(&diag(&[0.2, 0.8]), 10).unwrap();
        assert_eq!(b.bin_count(), 2);
        let err = (b.binned.matrix() - b.original.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
        assert!(b.bin_count() as f64 <= b.spectrum_cap());
        // ladder index of 0.8: lower edge 0.2 * 1.1^14
        let top = b.bins.last().unwrap();
        assert!((top.lower_edge - 0.2 * 1.1f64.powi(14)).abs() < 1e-12);
        assert_sandwich(&b, 1e-9);
    }

    #[test]
    fn singular_density_rejected() {
        let d = diag(&[1.0, 0.0]);
        assert!(matches!(
            bin_density(&d, 10),
            Err(Error::SingularDensity(_))
        ));
    }

    #[test]
    fn projectors_partition_identity() {
        let pair = crate::testutil::tilted_pair();
        let b = bin_density(pair.eta(), 100).unwrap();
        let dim = pair.eta().dim();
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        for bin in &b.bins {
            let p = bin.projector.matrix();
            // idempotent
            let err = (p * p - p).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-9);
            sum += p;
        }
        let err = (sum - DMatrix::<Complex64>::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9);
    }

    #[test]
    fn binning_is_idempotent() {
        let b = bin_density(&diag(&[0.30, 0.31, 0.39]), 10).unwrap();
        let again = bin_density(&b.binned, 10).unwrap();
        let err = (again.binned.matrix() - b.binned.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10);
    }

    #[test]
    fn binned_commutes_with_projectors() {
        let b = bin_density(&diag(&[0.30, 0.31, 0.39]), 10).unwrap();
        for bin in &b.bins {
            let norm = b.binned.operator().commutator_norm(&bin.projector);
            assert!(norm <= 1e-10);
        }
    }

    #[test]
    fn divergence_gap_bounded() {
        let pair = crate::testutil::tilted_pair();
        for k in [10usize, 100] {
            let gaps = binning_divergence_gap(&pair, k, &[1.5, 2.0, 4.0]).unwrap();
            let bound = (1.0 + 1.0 / k as f64).ln();
            for (alpha, gap) in gaps {
                assert!(gap <= bound + 1e-9, "k={k} alpha={alpha}: {gap} > {bound}");
            }
        }
    }

    #[test]
    fn equal_pair_gap_is_divergence_to_binned() {
        let eta = diag(&[0.30, 0.31, 0.39]);
        let pair = StatePair::new(eta.clone(), eta).unwrap();
        let gaps = binning_divergence_gap(&pair, 10, &[2.0]).unwrap();
        assert!(gaps[0].1 <= 1.1f64.ln() + 1e-12);
    }

    #[test]
    fn finer_binning_shrinks_the_gap() {
        // 0.52/0.48 < 1.1, so k = 10 merges the pair; k = 100 resolves it
        let rho = crate::testutil::tilted_pair().rho().clone();
        let eta = diag(&[0.48, 0.52]);
        let pair = StatePair::new(rho, eta).unwrap();
        let coarse = binning_divergence_gap(&pair, 10, &[2.0]).unwrap()[0].1;
        let fine = binning_divergence_gap(&pair, 100, &[2.0]).unwrap()[0].1;
        assert!(coarse > 1e-6, "coarse binning should merge 0.48 and 0.52");
        assert!(
            fine <= coarse / 5.0,
            "k -> 10k should shrink the gap: {coarse} -> {fine}"
        );
    }
}
