//! Dense Hermitian linear algebra and the validated state/test types that
//! everything else consumes.
//!
//! All values are immutable after construction. Eigendecompositions are
//! computed once, at construction, and cached; nothing here mutates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance for the Hermitian symmetry check. Inputs failing it
/// are rejected, not symmetrized.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in [-1e-12, 0) are attributed to solver jitter and clipped.
pub const EIG_CLIP: f64 = 1e-12;
/// Unit-trace tolerance for densities.
pub const TRACE_TOL: f64 = 1e-10;
/// Max entrywise deviation allowed between V diag(w) V* and the input.
pub const RECON_TOL: f64 = 1e-9;
/// Smallest eigenvalue for which a density counts as full rank.
pub const FULL_RANK_MIN: f64 = 1e-12;
/// Default bound on the dimension of any materialized tensor power.
pub const DENSE_CAP_DEFAULT: usize = 4096;

/// Iteration bound for the symmetric eigensolver.
const EIGH_MAX_ITER: usize = 10_000;

/// A validated d x d complex Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    mat: DMatrix<Complex64>,
}

impl HermitianOperator {
    /// Validates squareness, dim >= 1 and Hermitian symmetry within
    /// [`HERMITIAN_TOL`] (absolute, entrywise).
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = mat.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        let mut deviation = 0.0f64;
        for i in 0..rows {
            for j in i..cols {
                let d = (mat[(i, j)] - mat[(j, i)].conj()).norm();
                deviation = deviation.max(d);
            }
        }
        if deviation > HERMITIAN_TOL {
            return Err(Error::NonHermitian {
                deviation,
                tol: HERMITIAN_TOL,
            });
        }
        Ok(Self { mat })
    }

    /// Builds from real entries (imaginary parts zero).
    pub fn from_real(mat: DMatrix<f64>) -> Result<Self> {
        Self::new(mat.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Spectral decomposition. Eigenvalues are sorted descending and the
    /// eigenvector columns are permuted to match, so
    /// `V diag(w) V*` reconstructs the operator within [`RECON_TOL`].
    pub fn eigh(&self) -> Result<(DVector<f64>, DMatrix<Complex64>)> {
        eigh(&self.mat)
    }

    /// Max entrywise deviation of the commutator [self, other]; small values
    /// certify simultaneous diagonalizability.
    pub fn commutator_norm(&self, other: &HermitianOperator) -> f64 {
        let c = &self.mat * &other.mat - &other.mat * &self.mat;
        c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
pub fn eigh(mat: &DMatrix<Complex64>) -> Result<(DVector<f64>, DMatrix<Complex64>)> {
    let se = nalgebra::SymmetricEigen::try_new(mat.clone(), f64::EPSILON, EIGH_MAX_ITER).ok_or(
        Error::ConvergenceFailure {
            max_iter: EIGH_MAX_ITER,
        },
    )?;
    let n = mat.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].partial_cmp(&se.eigenvalues[i]).unwrap());
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok((eigenvalues, eigenvectors))
}

fn reconstruction_error(
    mat: &DMatrix<Complex64>,
    eigenvalues: &DVector<f64>,
    eigenvectors: &DMatrix<Complex64>,
) -> f64 {
    let n = mat.nrows();
    if n <= 512 {
        let mut scaled = eigenvectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= Complex64::new(eigenvalues[j], 0.0);
        }
        let recon = &scaled * eigenvectors.adjoint();
        (recon - mat).iter().map(|z| z.norm()).fold(0.0, f64::max)
    } else {
        // Column-sampled check: apply (V diag V* - M) to a strided set of
        // basis vectors. Bounds the cost at O(d^2) per sample.
        let stride = (n / 16).max(1);
        let mut worst = 0.0f64;
        for j in (0..n).step_by(stride) {
            let vj = eigenvectors.row(j).adjoint(); // V* e_j
            let scaled =
                DVector::from_iterator(n, vj.iter().enumerate().map(|(k, z)| z * eigenvalues[k]));
            let col = eigenvectors * scaled; // V diag V* e_j
            for i in 0..n {
                worst = worst.max((col[i] - mat[(i, j)]).norm());
            }
        }
        worst
    }
}

/// A density operator: Hermitian, positive semidefinite within jitter,
/// unit trace. Carries its spectral decomposition.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    op: HermitianOperator,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let (eigenvalues, eigenvectors) = op.eigh()?;
        Self::from_parts(op, eigenvalues, eigenvectors)
    }

    pub fn from_matrix(mat: DMatrix<Complex64>) -> Result<Self> {
        Self::new(HermitianOperator::new(mat)?)
    }

    /// Shared validation path: trace, positivity (with clipping), and the
    /// eigen-reconstruction bound.
    fn from_parts(
        op: HermitianOperator,
        mut eigenvalues: DVector<f64>,
        eigenvectors: DMatrix<Complex64>,
    ) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let min_eig = eigenvalues.min();
        if min_eig < -EIG_CLIP {
            return Err(Error::NotPositive(min_eig));
        }
        for w in eigenvalues.iter_mut() {
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let err = reconstruction_error(op.matrix(), &eigenvalues, &eigenvectors);
        if err > RECON_TOL {
            return Err(Error::ReconstructionFailure(err));
        }
        Ok(Self {
            op,
            eigenvalues,
            eigenvectors,
        })
    }

    /// Builds from row-major interleaved complex entries ([re, im] per
    /// entry, 2·dim² doubles in total); the wire layout used by pair files
    /// and foreign callers.
    pub fn from_interleaved(dim: usize, raw: &[f64]) -> Result<Self> {
        if raw.len() != 2 * dim * dim {
            return Err(Error::DimMismatch(raw.len(), 2 * dim * dim));
        }
        let mat = DMatrix::from_fn(dim, dim, |i, j| {
            let base = 2 * (i * dim + j);
            Complex64::new(raw[base], raw[base + 1])
        });
        Self::from_matrix(mat)
    }

    /// Diagonal density from a probability vector.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        let n = p.len();
        let mat = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(p[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::from_matrix(mat)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_probabilities(&vec![1.0 / dim as f64; dim]).expect("uniform state is valid")
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        self.op.matrix()
    }

    /// Cached eigenvalues, descending, clipped to be nonnegative.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Cached unitary of eigenvectors, columns matching `eigenvalues`.
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn is_full_rank(&self) -> bool {
        self.min_eigenvalue() >= FULL_RANK_MIN
    }

    /// V diag(w^s) V*. Negative powers require full rank.
    pub fn mat_power(&self, s: f64) -> Result<HermitianOperator> {
        if s < 0.0 && !self.is_full_rank() {
            return Err(Error::SingularPower(self.min_eigenvalue()));
        }
        let powered: Vec<f64> = self.eigenvalues.iter().map(|&w| w.powf(s)).collect();
        Ok(self.rebuild_with(&powered))
    }

    /// V diag(f(w)) V* for arbitrary spectral maps (ln, powers, ...).
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&w| f(w)).collect();
        self.rebuild_with(&mapped)
    }

    fn rebuild_with(&self, values: &[f64]) -> HermitianOperator {
        let mut scaled = self.eigenvectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= Complex64::new(values[j], 0.0);
        }
        let mat = &scaled * self.eigenvectors.adjoint();
        // Re-symmetrize rounding of V f(w) V* so downstream validation
        // never sees accumulation from repeated rebuilds.
        let herm = (&mat + mat.adjoint()) * Complex64::new(0.5, 0.0);
        HermitianOperator { mat: herm }
    }

    /// n-fold Kronecker power. The spectral data of the result is assembled
    /// from products of the cached base decomposition rather than a fresh
    /// eigensolve, so the cost is the Kronecker products themselves.
    pub fn tensor_power(&self, n: usize) -> Result<DensityOperator> {
        self.tensor_power_with_cap(n, DENSE_CAP_DEFAULT)
    }

    pub fn tensor_power_with_cap(&self, n: usize, cap: usize) -> Result<DensityOperator> {
        assert!(n >= 1, "tensor power needs n >= 1");
        let d = self.dim();
        let mut dim_out: usize = 1;
        for _ in 0..n {
            dim_out = match dim_out.checked_mul(d) {
                Some(v) if v <= cap => v,
                Some(v) => return Err(Error::DenseCapExceeded { dim: v, cap }),
                None => {
                    return Err(Error::DenseCapExceeded {
                        dim: usize::MAX,
                        cap,
                    })
                }
            };
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let mut mat = self.op.mat.clone();
        let mut vecs = self.eigenvectors.clone();
        let mut vals: Vec<f64> = self.eigenvalues.iter().copied().collect();
        for _ in 1..n {
            mat = mat.kronecker(&self.op.mat);
            vecs = vecs.kronecker(&self.eigenvectors);
            let mut next = Vec::with_capacity(vals.len() * d);
            for &a in &vals {
                for &b in self.eigenvalues.iter() {
                    next.push(a * b);
                }
            }
            vals = next;
        }
        // sort descending, permuting eigenvector columns alongside
        let mut order: Vec<usize> = (0..vals.len()).collect();
        order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
        let eigenvalues = DVector::from_iterator(vals.len(), order.iter().map(|&i| vals[i]));
        let mut eigenvectors = DMatrix::zeros(dim_out, dim_out);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &vecs.column(src));
        }
        Self::from_parts(HermitianOperator { mat }, eigenvalues, eigenvectors)
    }
}

/// Loewner order: a <= b iff min eig(b - a) >= -tol.
pub fn loewner_leq(a: &HermitianOperator, b: &HermitianOperator, tol: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    let diff = b.matrix() - a.matrix();
    let (w, _) = eigh(&diff)?;
    Ok(w[w.len() - 1] >= -tol)
}

/// A two-outcome test 0 <= T <= 1 with a log-domain scale multiplier;
/// the effective operator is e^{log_scale} * T.
#[derive(Debug, Clone)]
pub struct TestOperator {
    op: HermitianOperator,
    log_scale: f64,
}

impl TestOperator {
    /// Validates spectrum in [-1e-10, 1 + 1e-10] and log_scale <= 0.
    pub fn new(op: HermitianOperator, log_scale: f64) -> Result<Self> {
        let (w, _) = op.eigh()?;
        let max = w[0];
        let min = w[w.len() - 1];
        if min < -1e-10 || max > 1.0 + 1e-10 {
            return Err(Error::TestSpectrum { min, max });
        }
        if log_scale > 0.0 {
            return Err(Error::PositiveLogFactor(log_scale));
        }
        Ok(Self { op, log_scale })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            op: HermitianOperator::identity(dim),
            log_scale: 0.0,
        }
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// The linear-domain multiplier in [0, 1].
    pub fn scale(&self) -> f64 {
        self.log_scale.exp()
    }

    /// ln of the effective expectation value d(e^{log_scale} T).
    /// Exact in log-domain: ln tr(d T) + log_scale.
    pub fn log_expectation(&self, d: &DensityOperator) -> f64 {
        let raw = (d.matrix() * self.op.matrix()).trace().re.max(0.0);
        raw.ln() + self.log_scale
    }
}

/// A pair (rho, eta) of densities with eta full rank, carrying the order
/// constant ln min{lambda : rho <= lambda * eta}.
#[derive(Debug, Clone)]
pub struct StatePair {
    rho: DensityOperator,
    eta: DensityOperator,
    order_log: f64,
}

impl StatePair {
    pub fn new(rho: DensityOperator, eta: DensityOperator) -> Result<Self> {
        if rho.dim() != eta.dim() {
            return Err(Error::DimMismatch(rho.dim(), eta.dim()));
        }
        let order_log = order_constant(&rho, &eta)?;
        Ok(Self {
            rho,
            eta,
            order_log,
        })
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn rho(&self) -> &DensityOperator {
        &self.rho
    }

    pub fn eta(&self) -> &DensityOperator {
        &self.eta
    }

    /// ln of the max-relative-entropy constant; finite by construction.
    pub fn order_log(&self) -> f64 {
        self.order_log
    }

    pub fn is_commuting(&self, tol: f64) -> bool {
        self.rho.operator().commutator_norm(self.eta.operator()) <= tol
    }

    /// Componentwise n-fold tensor power.
    pub fn tensor_power_with_cap(&self, n: usize, cap: usize) -> Result<StatePair> {
        let rho = self.rho.tensor_power_with_cap(n, cap)?;
        let eta = self.eta.tensor_power_with_cap(n, cap)?;
        StatePair::new(rho, eta)
    }
}

/// ln lambda_max(eta^{-1/2} rho eta^{-1/2}); requires eta full rank.
pub fn order_constant(rho: &DensityOperator, eta: &DensityOperator) -> Result<f64> {
    if !eta.is_full_rank() {
        return Err(Error::EtaSingular(eta.min_eigenvalue()));
    }
    let inv_sqrt = eta.mat_power(-0.5)?;
    let sandwiched = inv_sqrt.matrix() * rho.matrix() * inv_sqrt.matrix();
    let (w, _) = eigh(&sandwiched)?;
    let top = w[0].max(f64::MIN_POSITIVE);
    Ok(top.ln())
}
