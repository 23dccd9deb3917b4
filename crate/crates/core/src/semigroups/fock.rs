use crate::error::{Error, Result};
use crate::numerics::{zeros, CMatrix, C64, ZERO};

use super::schoenberg::{ScalarGenerator, SchoenbergData};

pub const DEFAULT_FOCK_LEVEL: usize = 20;
pub const DEFAULT_MAX_SYM_BASIS: usize = 50_000;

/// Truncated exponential-vector reconstruction of `exp(t ℓ)` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct FockReport {
    pub t: f64,
    pub level: usize,
    /// Number of occupation-number basis vectors of `⊕_{m≤n} Sym^m(K)`.
    pub basis_size: usize,
    /// `|V_n - exp(t ℓ)|` per pair.
    pub errors: CMatrix,
    /// Tail bound per pair, including the modulus of the prefactor.
    pub bounds: Vec<Vec<f64>>,
    /// `exp(t ℓ)` per pair.
    pub exact: CMatrix,
}

impl FockReport {
    pub fn max_error(&self) -> f64 {
        self.errors.iter().map(|z| z.re).fold(0.0, f64::max)
    }

    pub fn max_bound(&self) -> f64 {
        self.bounds.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Largest `(error - bound) / max(1, |exp(t ℓ)|)` over pairs; the check
    /// holds when this is at most the slack.
    pub fn excess(&self) -> f64 {
        let n = self.exact.nrows();
        let mut worst = f64::NEG_INFINITY;
        for s in 0..n {
            for u in 0..n {
                let scale = self.exact[(s, u)].norm().max(1.0);
                worst = worst.max((self.errors[(s, u)].re - self.bounds[s][u]) / scale);
            }
        }
        worst
    }

    pub fn holds(&self, slack: f64) -> bool {
        self.excess() <= slack
    }
}

/// `C(n + r, r)`, saturating.
pub fn sym_basis_size(dim: usize, level: usize) -> usize {
    let mut acc: u128 = 1;
    for k in 1..=dim as u128 {
        acc = acc * (level as u128 + k) / k;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Coordinates of `ψ_n(f) = ⊕_{m≤n} f^{⊗m}/sqrt(m!)` in the occupation
/// basis: entry `α` is `f^α / sqrt(α!)`.
pub fn exponential_vector(f: &[C64], level: usize) -> Vec<C64> {
    fn fill(f: &[C64], i: usize, budget: usize, acc: C64, out: &mut Vec<C64>) {
        if i == f.len() {
            out.push(acc);
            return;
        }
        let mut term = acc;
        for k in 0..=budget {
            if k > 0 {
                term = term * f[i] / (k as f64).sqrt();
            }
            fill(f, i + 1, budget - k, term, out);
        }
    }
    let mut out = Vec::new();
    fill(f, 0, level, C64::new(1.0, 0.0), &mut out);
    out
}

/// `Σ_{m>n} x^m / m!`.
pub fn exp_tail(x: f64, level: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x > 700.0 {
        return f64::INFINITY;
    }
    let mut term = 1.0;
    for k in 1..=level + 1 {
        term *= x / k as f64;
    }
    let mut sum = 0.0;
    let mut m = level + 1;
    loop {
        sum += term;
        m += 1;
        term *= x / m as f64;
        if (m as f64) > x && term <= sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Compares `e^{-conj(β_σ) t} ⟨ψ_n(√t i(σ)), ψ_n(√t i(σ'))⟩ e^{-β_σ' t}`
/// with `exp(t ℓ)`.
pub fn fock_exponential_report(
    l: &ScalarGenerator,
    sd: &SchoenbergData,
    t: f64, level: usize, max_basis: usize) -> Result<FockReport> {
    let dim = sd.dim();
    let basis_size = sym_basis_size(dim, level);
    if basis_size > max_basis {
        return Err(Error::TruncationInsufficient(format!(
            "symmetric Fock space of dimension {dim} at level {level} needs {basis_size} basis vectors (cap {max_basis})"
        )));
    }
    let n = sd.beta.len();
    if l.len() != n {
        return Err(Error::PointSetMismatch);
    }
    let sqrt_t = t.sqrt();
    let points: Vec<Vec<C64>> = (0..n)
        .map(|s| sd.point(s).iter().map(|z| z * sqrt_t).collect())
        .collect();
    let psi: Vec<Vec<C64>> = points.iter().map(|f| exponential_vector(f, level)).collect();
    let norms: Vec<f64> = points.iter().map(|f| f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let exact = l.schur_exp(t);
    let mut errors = zeros(n, n);
    let mut bounds = vec![vec![0.0; n]; n];
    for s in 0..n {
        let left = (-sd.beta[s].conj() * t).exp();
        for u in 0..n {
            let right = (-sd.beta[u] * t).exp();
            let inner: C64 = psi[s].iter().zip(&psi[u]).map(|(a, b)| a.conj() * b).fold(ZERO, |acc, z| acc + z);
            let v = left * inner * right;
            errors[(s, u)] = C64::new((v - exact[(s, u)]).norm(), 0.0);
            bounds[s][u] = left.norm() * right.norm() * exp_tail(norms[s] * norms[u], level);
        }
    }
    Ok(FockReport {
        t,
        level,
        basis_size,
        errors,
        bounds,
        exact,
    })
}
