use crate::algebra::{AlgElement, AlgebraShape};
use crate::error::{Error, Result};
use crate::modcorr::{tensor, Correspondence, HilbertModule, ModVector, TensorMap};
use crate::numerics::{hstack, identity, max_abs, solve_on_generators, unvec, vec, CMatrix, Tolerance};

use super::gns::{gns, GnsData};
use super::maps::{LinMap, MapKernel};

/// A linear map `T: E → B(H₁, H₂)` together with a map `φ: B → M_{h₁}`.
/// `t` has one column per basis vector of `E`, holding the row-major
/// vectorization of the `h₂ x h₁` image.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiMapInput {
    pub module: HilbertModule,
    pub h1: usize,
    pub h2: usize,
    pub t: CMatrix,
    pub phi: LinMap,
}

impl PhiMapInput {
    pub fn new(module: HilbertModule, h1: usize, h2: usize, t: CMatrix, phi: LinMap) -> Result<Self> {
        if t.shape() != (h1 * h2, module.dim()) {
            return Err(Error::ShapeMismatch(format!(
                "T is {:?}, expected {}x{}",
                t.shape(),
                h1 * h2,
                module.dim()
            )));
        }
        if phi.from_shape() != module.shape() || phi.to_shape() != &AlgebraShape::full(h1)? {
            return Err(Error::ShapeMismatch(format!(
                "φ must map the module's algebra into M_{h1}"
            )));
        }
        crate::numerics::check_finite(&t)?;
        Ok(Self {
            module,
            h1,
            h2,
            t,
            phi,
        })
    }

    /// `T(x)` as an `h₂ x h₁` matrix.
    pub fn apply(&self, x: &ModVector) -> Result<CMatrix> {
        self.module.expect_same(x.module())?;
        let c = CMatrix::from_column_slice(self.module.dim(), 1, &x.coords());
        unvec(&(&self.t * c), self.h2, self.h1)
    }

    /// Largest deviation of `T(x)* T(x')` from `φ(⟨x, x'⟩)` on the basis
    /// of `E`, which by sesquilinearity bounds the identity everywhere.
    pub fn phi_residual(&self) -> Result<f64> {
        let basis = self.module.basis();
        let images = basis.iter().map(|x| self.apply(x)).collect::<Result<Vec<_>>>()?;
        let mut worst = 0.0f64;
        for (x, tx) in basis.iter().zip(&images) {
            for (y, ty) in basis.iter().zip(&images) {
                let lhs = tx.adjoint() * ty;
                let rhs = self.phi.apply(&x.inner(y)?)?;
                worst = worst.max(max_abs(&(lhs - rhs.block(0))));
            }
        }
        Ok(worst)
    }

    fn scale(&self) -> f64 {
        max_abs(&self.t).powi(2).max(max_abs(self.phi.action()))
    }
}

/// Residuals of the four defining properties.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SextupleResiduals {
    /// `W* Ψ(x) V = T(x)`.
    pub dilation: f64,
    /// `Ψ(x)* Ψ(x') = ρ(⟨x, x'⟩)`.
    pub representation: f64,
    /// `Σ ρ(e_ii) = I`.
    pub nondegenerate: f64,
    /// `W W* = I`.
    pub coisometry: f64,
}

impl SextupleResiduals {
    pub fn max(&self) -> f64 {
        self.dilation
            .max(self.representation)
            .max(self.nondegenerate)
            .max(self.coisometry)
    }
}

/// `(K₁, K₂, V, W, ρ, Ψ)` for a `φ`-map.
#[derive(Debug, Clone)]
pub struct PhiMapSextuple {
    pub gns: GnsData,
    /// `K₁ = 𝔉 ⊙ H₁` with the Stinespring representation `ρ` of `B`.
    pub k1: Correspondence,
    pub k1_map: TensorMap,
    /// `K₂ = E ⊙ K₁`.
    pub k2_map: TensorMap,
    /// `V = L_ζ`, `k₁ x h₁`.
    pub v: CMatrix,
    /// `k₂ x h₂`.
    pub w: CMatrix,
    pub residuals: SextupleResiduals,
}

impl PhiMapSextuple {
    pub fn k1_dim(&self) -> usize {
        self.k1.module().ambient()[0]
    }

    pub fn k2_dim(&self) -> usize {
        self.k2_map.module().ambient()[0]
    }

    pub fn rho(&self, b: &AlgElement) -> Result<CMatrix> {
        Ok(self.k1.act(b)?.swap_remove(0))
    }

    /// `Ψ(x) = L_x: K₁ → K₂`.
    pub fn psi(&self, x: &ModVector) -> Result<CMatrix> {
        Ok(self.k2_map.left_op(x)?.blocks()[0].clone())
    }

    /// Columns `Ψ(x) ρ(b) V` over basis vectors `x` and matrix units `b`.
    fn k2_generators(&self, module: &HilbertModule) -> Result<CMatrix> {
        let b = module.shape();
        let mut parts = Vec::new();
        for x in module.basis() {
            let psi = self.psi(&x)?;
            for u in 0..b.dim() {
                parts.push(&psi * self.rho(&AlgElement::matrix_unit(b, u))? * &self.v);
            }
        }
        hstack(&parts, self.k2_dim())
    }

    fn k1_generators(&self, b: &AlgebraShape) -> Result<CMatrix> {
        let parts = (0..b.dim())
            .map(|u| Ok(self.rho(&AlgElement::matrix_unit(b, u))? * &self.v))
            .collect::<Result<Vec<_>>>()?;
        hstack(&parts, self.k1_dim())
    }
}

/// Validates `φ` (CP) and `T` (a `φ`-map), then builds the sextuple from
/// the GNS construction of `φ`.
pub fn phi_map_sextuple(input: &PhiMapInput, tol: &Tolerance) -> Result<PhiMapSextuple> {
    let w = input.phi.is_cp(tol)?;
    if !w.holds {
        return Err(Error::NotCp {
            eigenvalue: w.min_eigenvalue,
        });
    }
    let data = gns(&MapKernel::one_point(input.phi.clone(), tol)?, tol)?;
    phi_map_sextuple_with(input, data, tol)
}

/// Same construction from a supplied GNS pair `(𝔉, ζ)` of `φ`.
pub fn phi_map_sextuple_with(input: &PhiMapInput, data: GnsData, tol: &Tolerance) -> Result<PhiMapSextuple> {
    let limit = tol.rel_eps * (1.0 + input.scale());
    let res = input.phi_residual()?;
    if res > limit {
        return Err(Error::NotPhiMap(res));
    }
    if data.point_map.len() != 1 {
        return Err(Error::PointSetMismatch);
    }
    let kernel = MapKernel::one_point(input.phi.clone(), tol)?;
    let gns_err = data.reconstruction_error(&kernel)?;
    if gns_err > limit {
        return Err(Error::Validation(format!(
            "supplied GNS pair misses φ by {gns_err:.3e}"
        )));
    }
    let h1 = Correspondence::identity_rep(&AlgebraShape::full(input.h1)?);
    let (k1, k1_map) = tensor(&data.corr, &h1, tol)?;
    let k2_map = TensorMap::new(&input.module, &k1, tol)?;
    let v = k1_map.left_op(&data.point_map[0])?.blocks()[0].clone();
    let mut out = PhiMapSextuple {
        gns: data,
        k1,
        k1_map,
        k2_map,
        v,
        w: CMatrix::zeros(0, 0),
        residuals: SextupleResiduals::default(),
    };
    // W* on generators: x ⊙ (b ζ ⊙ h) ↦ T(x b) h
    let b = input.module.shape();
    let src = out.k2_generators(&input.module)?;
    let mut targets = Vec::new();
    for x in input.module.basis() {
        for u in 0..b.dim() {
            targets.push(input.apply(&x.right_mul(&AlgElement::matrix_unit(b, u))?)?);
        }
    }
    let dst = hstack(&targets, input.h2)?;
    let (w_adj, solve_res) = solve_on_generators(&src, &dst, tol)?;
    if solve_res > limit {
        return Err(Error::NotPhiMap(solve_res));
    }
    out.w = w_adj.adjoint();
    out.residuals = sextuple_residuals(&out, input)?;
    if out.residuals.max() > limit {
        return Err(Error::Validation(format!(
            "sextuple properties fail by {:.3e}",
            out.residuals.max()
        )));
    }
    Ok(out)
}

pub fn sextuple_residuals(s: &PhiMapSextuple, input: &PhiMapInput) -> Result<SextupleResiduals> {
    let basis = input.module.basis();
    let psis = basis.iter().map(|x| s.psi(x)).collect::<Result<Vec<_>>>()?;
    let mut dilation = 0.0f64;
    let mut representation = 0.0f64;
    for (x, px) in basis.iter().zip(&psis) {
        let got = s.w.adjoint() * px * &s.v;
        dilation = dilation.max(max_abs(&(got - input.apply(x)?)));
        for (y, py) in basis.iter().zip(&psis) {
            let lhs = px.adjoint() * py;
            let rhs = s.rho(&x.inner(y)?)?;
            representation = representation.max(max_abs(&(lhs - rhs)));
        }
    }
    let b = input.module.shape();
    let unit = s.rho(&AlgElement::unit(b))?;
    let nondegenerate = max_abs(&(unit - identity(s.k1_dim())));
    let coisometry = max_abs(&(&s.w * s.w.adjoint() - identity(s.k2_dim())));
    Ok(SextupleResiduals {
        dilation,
        representation,
        nondegenerate,
        coisometry,
    })
}

/// Unitaries `U₁: K₁ → K₁'`, `U₂: K₂ → K₂'` between two sextuples of the
/// same input.
#[derive(Debug, Clone)]
pub struct SextupleIntertwiner {
    pub u1: CMatrix,
    pub u2: CMatrix,
    /// Largest violation among unitarity of `U₁, U₂`, `U₁ V = V'`,
    /// `U₂ W = W'`, `U₁ ρ = ρ' U₁` and `U₂ Ψ = Ψ' U₁`.
    pub residual: f64,
}

pub fn sextuple_intertwiner(
    a: &PhiMapSextuple,
    b: &PhiMapSextuple,
    input: &PhiMapInput,
    tol: &Tolerance,
) -> Result<SextupleIntertwiner> {
    if a.k1_dim() != b.k1_dim() || a.k2_dim() != b.k2_dim() {
        return Err(Error::Validation(format!(
            "sextuples of different dimensions ({}, {}) vs ({}, {})",
            a.k1_dim(),
            a.k2_dim(),
            b.k1_dim(),
            b.k2_dim()
        )));
    }
    let shape = input.module.shape();
    let (u1, _) = solve_on_generators(&a.k1_generators(shape)?, &b.k1_generators(shape)?, tol)?;
    let (u2, _) = solve_on_generators(
        &a.k2_generators(&input.module)?,
        &b.k2_generators(&input.module)?,
        tol,
    )?;
    let mut residual = max_abs(&(u1.adjoint() * &u1 - identity(a.k1_dim())))
        .max(max_abs(&(&u1 * u1.adjoint() - identity(a.k1_dim()))))
        .max(max_abs(&(u2.adjoint() * &u2 - identity(a.k2_dim()))))
        .max(max_abs(&(&u2 * u2.adjoint() - identity(a.k2_dim()))))
        .max(max_abs(&(&u1 * &a.v - &b.v)))
        .max(max_abs(&(&u2 * &a.w - &b.w)));
    for u in 0..shape.dim() {
        let e = AlgElement::matrix_unit(shape, u);
        residual = residual.max(max_abs(&(&u1 * a.rho(&e)? - b.rho(&e)? * &u1)));
    }
    for x in input.module.basis() {
        residual = residual.max(max_abs(&(&u2 * a.psi(&x)? - b.psi(&x)? * &u1)));
    }
    Ok(SextupleIntertwiner { u1, u2, residual })
}

/// Builds `T` from a closure producing `h₂ x h₁` images of basis vectors.
pub fn phi_map_matrix(
    module: &HilbertModule,
    h1: usize,
    h2: usize,
    f: impl Fn(&ModVector) -> CMatrix,
) -> Result<CMatrix> {
    let cols = module
        .basis()
        .iter()
        .map(|x| {
            let img = f(x);
            if img.shape() != (h2, h1) {
                return Err(Error::ShapeMismatch("image of the wrong size".into()));
            }
            Ok(vec(&img))
        })
        .collect::<Result<Vec<_>>>()?;
    hstack(&cols, h1 * h2)
}
