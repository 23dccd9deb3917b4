use crate::error::{Error, Result};
use crate::kernels::{default_labels, Decomposition, OpKernel, Witness};
use crate::modcorr::{HilbertModule, ModVector};
use crate::numerics::{frob, psd_witness, zeros, CMatrix, Tolerance, C64, ZERO};
use crate::algebra::AlgebraShape;

/// Hermitian matrix `ℓ` over a finite point set, the generator of a Schur
/// semigroup of scalar kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGenerator {
    points: Vec<String>,
    matrix: CMatrix,
}

/// Normalized generator `ℓ̃^{σ,σ'} = ℓ^{σ,σ'} + β_σ' + conj(β_σ)` and its
/// Kolmogorov decomposition `(K, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchoenbergData {
    pub base: usize,
    pub beta: Vec<C64>,
    pub normalized: CMatrix,
    pub decomposition: Decomposition,
}

impl SchoenbergData {
    /// `dim K`.
    pub fn dim(&self) -> usize {
        self.decomposition.module.ambient()[0]
    }

    /// `i(σ)` as a column vector in `K`.
    pub fn point(&self, s: usize) -> Vec<C64> {
        self.decomposition.point_map[s].block(0).iter().copied().collect()
    }

    /// `e^{-conj(β_σ) t} e^{ℓ̃ t} e^{-β_σ' t}` entrywise.
    pub fn reconstruct(&self, t: f64) -> CMatrix {
        let n = self.beta.len();
        CMatrix::from_fn(n, n, |s, u| {
            (-self.beta[s].conj() * t).exp() * (self.normalized[(s, u)] * t).exp() * (-self.beta[u] * t).exp()
        })
    }
}

impl ScalarGenerator {
    /// Rejects non-Hermitian input, then symmetrizes.
    pub fn new(points: Vec<String>, matrix: CMatrix, tol: &Tolerance) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != points.len() {
            return Err(Error::ShapeMismatch(format!(
                "{:?} generator for {} points",
                matrix.shape(),
                points.len()
            )));
        }
        crate::numerics::check_finite(&matrix)?;
        let asymmetry = frob(&(&matrix - matrix.adjoint()));
        let threshold = tol.threshold(crate::numerics::spectral_norm(&matrix));
        if asymmetry > threshold {
            return Err(Error::NotHermitian {
                asymmetry,
                threshold,
            });
        }
        let matrix = crate::numerics::hermitian_part(&matrix);
        Ok(Self { points, matrix })
    }

    pub fn from_matrix(matrix: CMatrix, tol: &Tolerance) -> Result<Self> {
        Self::new(default_labels(matrix.nrows()), matrix, tol)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Positivity of the compression of `ℓ` to `{z : Σ z_i = 0}`.
    pub fn is_cond_pd(&self, tol: &Tolerance) -> Result<Witness> {
        let n = self.len();
        if n <= 1 {
            return Ok(Witness {
                holds: true,
                min_eigenvalue: 0.0,
                block: 0,
                threshold: tol.abs_floor,
            });
        }
        let q = helmert_basis(n);
        let c = q.adjoint() * &self.matrix * &q;
        let w = psd_witness(&c, tol)?;
        Ok(Witness {
            holds: w.is_psd(),
            min_eigenvalue: w.min_eigenvalue,
            block: 0,
            threshold: w.threshold,
        })
    }

    pub fn schoenberg_normalize(&self, base: usize, tol: &Tolerance) -> Result<SchoenbergData> {
        let n = self.len();
        if base >= n {
            return Err(Error::Validation(format!("base point {base} out of range")));
        }
        let w = self.is_cond_pd(tol)?;
        if !w.holds {
            return Err(Error::NotCondPd {
                eigenvalue: w.min_eigenvalue,
            });
        }
        let l = &self.matrix;
        let beta0 = C64::new(-l[(base, base)].re / 2.0, 0.0);
        let beta: Vec<C64> = (0..n)
            .map(|s| if s == base { beta0 } else { -l[(base, s)] - beta0.conj() })
            .collect();
        let mut normalized = CMatrix::from_fn(n, n, |s, u| l[(s, u)] + beta[u] + beta[s].conj());
        for s in 0..n {
            normalized[(base, s)] = ZERO;
            normalized[(s, base)] = ZERO;
        }
        // factor ℓ̃ away from the base point so that i(σ₀) = 0 exactly
        let rest: Vec<usize> = (0..n).filter(|&s| s != base).collect();
        let sub = CMatrix::from_fn(rest.len(), rest.len(), |a, b| normalized[(rest[a], rest[b])]);
        let mut module = HilbertModule::new(AlgebraShape::scalars(), vec![0])?;
        let mut point_map = vec![ModVector::zero(&module); n];
        if !rest.is_empty() {
            let kernel = OpKernel::scalar(&sub, tol)?;
            let dec = kernel.kolmogorov(tol).map_err(|e| match e {
                Error::NotPd { eigenvalue } => Error::NormalizationNotPsd { eigenvalue },
                other => other,
            })?;
            module = dec.module.clone();
            point_map = vec![ModVector::zero(&module); n];
            for (a, &s) in rest.iter().enumerate() {
                point_map[s] = dec.point_map[a].clone();
            }
        }
        Ok(SchoenbergData {
            base,
            beta,
            normalized,
            decomposition: Decomposition::new(module, point_map, true)?,
        })
    }

    /// `exp(t ℓ)` entrywise.
    pub fn schur_exp(&self, t: f64) -> CMatrix {
        self.matrix.map(|z| (z * t).exp())
    }

    /// `is_pd` of `exp(t ℓ)` at each time.
    pub fn pd_on_grid(&self, times: &[f64], tol: &Tolerance) -> Result<Vec<(f64, Witness)>> {
        times
            .iter()
            .map(|&t| {
                let k = OpKernel::scalar(&self.schur_exp(t), tol)?;
                Ok((t, k.is_pd(tol)?))
            })
            .collect()
    }
}

/// Orthonormal basis of `{z : Σ z_i = 0}`: column `k` is
/// `(1, …, 1, -k, 0, …) / sqrt(k (k+1))` with `k` leading ones.
pub fn helmert_basis(n: usize) -> CMatrix {
    let mut q = zeros(n, n.saturating_sub(1));
    for k in 1..n {
        let s = 1.0 / ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            q[(i, k - 1)] = C64::new(s, 0.0);
        }
        q[(k, k - 1)] = C64::new(-(k as f64) * s, 0.0);
    }
    q
}

/// Geometric grid `{2^-6, …, 2^4}`.
pub fn default_time_grid() -> Vec<f64> {
    (-6..=4).map(|e| 2f64.powi(e)).collect()
}
