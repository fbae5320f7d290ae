//! One-time eigendecomposition of a covariance matrix.
//!
//! Every trace and quadratic form appearing in the error formulas is a
//! spectral functional `sum_k f(lambda_k) w_k`. Decomposing once and
//! evaluating these sums per projection dimension keeps a sweep over `d`
//! at `O(p)` per point after an `O(p^3)` setup.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigenpairs of a symmetric PSD matrix with eigenvalues below the rank
/// cutoff treated as exact zeros.
#[derive(Debug, Clone)]
pub struct Spectrum {
    dim: usize,
    /// Retained (numerically positive) eigenvalues.
    values: Vec<f64>,
    /// `dim x rank`, orthonormal columns matching `values`.
    vectors: DMatrix<f64>,
    min_eigenvalue: f64,
    max_eigenvalue: f64,
}

/// Squared coordinates of a vector in the eigenbasis of a [`Spectrum`].
#[derive(Debug, Clone)]
pub struct Projected {
    pub coords: Vec<f64>,
    /// Squared norm of the component orthogonal to the retained eigenvectors.
    pub null_mass: f64,
}

fn rank_cutoff(dim: usize, samples: usize, max_eigenvalue: f64) -> f64 {
    dim.max(samples) as f64 * f64::EPSILON * max_eigenvalue.max(0.0)
}

impl Spectrum {
    /// Decompose a symmetric matrix. Eigenvalues at or below
    /// `max(p, samples) * eps * lambda_max` are dropped from the retained set.
    pub fn of_symmetric(matrix: &DMatrix<f64>, samples: usize) -> Self {
        let dim = matrix.nrows();
        assert_eq!(dim, matrix.ncols(), "matrix must be square");
        if dim == 0 {
            return Self::empty(0);
        }
        let sym = (matrix + matrix.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let min_eigenvalue = eig.eigenvalues.min();
        let max_eigenvalue = eig.eigenvalues.max();
        let cutoff = rank_cutoff(dim, samples, max_eigenvalue);
        Self::retain(
            dim,
            &eig.eigenvalues,
            &eig.eigenvectors,
            cutoff,
            min_eigenvalue,
            max_eigenvalue,
        )
    }

    /// Decompose `scale * Z Z^T` without forming it when `Z` has fewer columns
    /// than rows (the small-sample case): the nonzero spectrum is read off the
    /// Gram matrix `scale * Z^T Z`.
    pub fn of_scaled_gram(z: &DMatrix<f64>, scale: f64) -> Self {
        let (dim, m) = z.shape();
        if m >= dim {
            let full = z * z.transpose() * scale;
            return Self::of_symmetric(&full, m);
        }
        if m == 0 {
            return Self::empty(dim);
        }
        let gram = z.transpose() * z * scale;
        let eig = SymmetricEigen::new(gram);
        let max_eigenvalue = eig.eigenvalues.max();
        let cutoff = rank_cutoff(dim, m, max_eigenvalue);
        let mut values = Vec::new();
        let mut cols = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > cutoff {
                let mut u = z * eig.eigenvectors.column(k);
                u *= (scale / lambda).sqrt();
                values.push(lambda);
                cols.push(u);
            }
        }
        let vectors = if cols.is_empty() {
            DMatrix::zeros(dim, 0)
        } else {
            DMatrix::from_columns(&cols)
        };
        Self {
            dim,
            values,
            vectors,
            // the remaining dim - m eigenvalues are exactly zero
            min_eigenvalue: eig.eigenvalues.min().min(0.0),
            max_eigenvalue,
        }
    }

    fn empty(dim: usize) -> Self {
        Self {
            dim,
            values: Vec::new(),
            vectors: DMatrix::zeros(dim, 0),
            min_eigenvalue: 0.0,
            max_eigenvalue: 0.0,
        }
    }

    fn retain(
        dim: usize,
        eigenvalues: &DVector<f64>,
        eigenvectors: &DMatrix<f64>,
        cutoff: f64,
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    ) -> Self {
        let keep: Vec<usize> = (0..dim).filter(|&k| eigenvalues[k] > cutoff).collect();
        let values = keep.iter().map(|&k| eigenvalues[k]).collect();
        let vectors = if keep.is_empty() {
            DMatrix::zeros(dim, 0)
        } else {
            eigenvectors.select_columns(&keep)
        };
        Self {
            dim,
            values,
            vectors,
            min_eigenvalue,
            max_eigenvalue,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    pub fn null_dim(&self) -> usize {
        self.dim - self.rank()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// Smallest eigenvalue before truncation.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.max_eigenvalue
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    /// `sum_k f(lambda_k)` over all `dim` eigenvalues, truncated ones as 0.
    pub fn trace(&self, f: impl Fn(f64) -> f64) -> f64 {
        let retained: f64 = self.values.iter().map(|&l| f(l)).sum();
        if self.null_dim() > 0 {
            retained + self.null_dim() as f64 * f(0.0)
        } else {
            retained
        }
    }

    pub fn project(&self, v: &DVector<f64>) -> Projected {
        assert_eq!(v.len(), self.dim, "vector length must match dimension");
        let c = self.vectors.tr_mul(v);
        let coords: Vec<f64> = c.iter().map(|x| x * x).collect();
        let captured: f64 = coords.iter().sum();
        let null_mass = (v.norm_squared() - captured).max(0.0);
        Projected { coords, null_mass }
    }

    /// `v^T f(Sigma) v` for the vector behind `proj`.
    pub fn quadratic(&self, proj: &Projected, f: impl Fn(f64) -> f64) -> f64 {
        let retained: f64 = self
            .values
            .iter()
            .zip(&proj.coords)
            .map(|(&l, &c)| c * f(l))
            .sum();
        if proj.null_mass > 0.0 {
            retained + proj.null_mass * f(0.0)
        } else {
            retained
        }
    }

    /// `F` with `F F^T = Sigma` (truncated), shape `dim x rank`.
    pub fn factor(&self) -> DMatrix<f64> {
        let mut f = self.vectors.clone();
        for (k, &l) in self.values.iter().enumerate() {
            f.column_mut(k).scale_mut(l.sqrt());
        }
        f
    }

    /// `f(Sigma)` as a dense matrix on the retained subspace plus `f(0)` on
    /// its orthogonal complement.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (k, &l) in self.values.iter().enumerate() {
            scaled.column_mut(k).scale_mut(f(l));
        }
        let mut out = &scaled * self.vectors.transpose();
        if self.null_dim() > 0 {
            let projector =
                DMatrix::identity(self.dim, self.dim) - &self.vectors * self.vectors.transpose();
            out += projector * f(0.0);
        }
        out
    }
}
