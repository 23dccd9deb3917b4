//! Positivity relative to a set of positive functionals on an abstract
//! finite-dimensional unital *-algebra.

use crate::algebra::{AlgElement, AlgebraShape, Functional};
use crate::error::{Error, Result};
use crate::numerics::{block_diag, frob, identity, kron, max_abs, psd_factor, psd_witness, zeros, CMatrix, Tolerance, C64, ONE, ZERO};

/// Unital *-algebra given by structure constants in a basis `e_0, …, e_{d-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarAlgebra {
    labels: Vec<String>,
    /// `left[i][(k, j)] = c_{ij}^k`, so left multiplication by `e_i` acts on
    /// coordinates as `left[i]`.
    left: Vec<CMatrix>,
    /// `x* = star · conj(x)` in coordinates.
    star: CMatrix,
    unit: Vec<C64>,
}

impl StarAlgebra {
    /// Validates associativity, the involution and the unit; nothing is
    /// repaired.
    pub fn new(labels: Vec<String>, left: Vec<CMatrix>, star: CMatrix, unit: Vec<C64>, tol: &Tolerance) -> Result<Self> {
        let d = labels.len();
        if d == 0 {
            return Err(Error::InvalidAlgebra("dimension must be positive".into()));
        }
        if left.len() != d || left.iter().any(|m| m.shape() != (d, d)) || star.shape() != (d, d) || unit.len() != d {
            return Err(Error::InvalidAlgebra(format!("structure data does not match dimension {d}")));
        }
        for m in left.iter().chain(std::iter::once(&star)) {
            crate::numerics::check_finite(m)?;
        }
        let alg = Self {
            labels,
            left,
            star,
            unit,
        };
        let scale = alg.left.iter().map(max_abs).fold(max_abs(&alg.star), f64::max);
        let limit = tol.rel_eps * (1.0 + scale * scale);
        // (e_i e_j) e_k = e_i (e_j e_k)
        for i in 0..d {
            for j in 0..d {
                let prod = alg.left_matrix(&alg.left[i].column(j).iter().copied().collect::<Vec<_>>());
                let dev = max_abs(&(prod - &alg.left[i] * &alg.left[j]));
                if dev > limit {
                    return Err(Error::InvalidAlgebra(format!(
                        "not associative at ({}, {}): {dev:e}",
                        alg.labels[i], alg.labels[j]
                    )));
                }
            }
        }
        if max_abs(&(&alg.star * alg.star.map(|z| z.conj()) - identity(d))) > limit {
            return Err(Error::InvalidAlgebra("involution is not of order two".into()));
        }
        // (e_i e_j)* = e_j* e_i*
        let basis: Vec<Vec<C64>> = (0..d).map(|i| alg.basis_vector(i)).collect();
        for i in 0..d {
            for j in 0..d {
                let lhs = alg.adjoint(&alg.mul(&basis[i], &basis[j]));
                let rhs = alg.mul(&alg.adjoint(&basis[j]), &alg.adjoint(&basis[i]));
                if max_dev(&lhs, &rhs) > limit {
                    return Err(Error::InvalidAlgebra(format!(
                        "involution is not antimultiplicative at ({}, {})",
                        alg.labels[i], alg.labels[j]
                    )));
                }
            }
        }
        let lu = alg.left_matrix(&alg.unit);
        let ru = CMatrix::from_fn(d, d, |k, i| (0..d).map(|j| alg.left[i][(k, j)] * alg.unit[j]).sum());
        if max_abs(&(lu - identity(d))) > limit || max_abs(&(ru - identity(d))) > limit {
            return Err(Error::InvalidAlgebra("unit does not act as identity".into()));
        }
        Ok(alg)
    }

    /// The algebra `⊕ M_{n_k}` in its matrix-unit basis.
    pub fn from_shape(shape: &AlgebraShape) -> Self {
        let d = shape.dim();
        let units: Vec<AlgElement> = (0..d).map(|u| AlgElement::matrix_unit(shape, u)).collect();
        let left = units
            .iter()
            .map(|a| {
                let mut m = zeros(d, d);
                for (j, b) in units.iter().enumerate() {
                    let prod = a.mul(b).expect("same shape").coords();
                    for (k, c) in prod.into_iter().enumerate() {
                        m[(k, j)] = c;
                    }
                }
                m
            })
            .collect();
        let mut star = zeros(d, d);
        for (u, (k, i, j)) in shape.units().enumerate() {
            star[(shape.unit_index(k, j, i), u)] = ONE;
        }
        let labels = shape.units().map(|(k, i, j)| format!("E{k}_{i}{j}")).collect();
        Self {
            labels,
            left,
            star,
            unit: AlgElement::unit(shape).coords(),
        }
    }

    /// `ℂ[ℤ₂]` with basis `{e, g}`, `g² = e`, `g* = g`.
    pub fn group_algebra_z2() -> Self {
        let o = ZERO;
        let l = ONE;
        Self {
            labels: vec!["e".into(), "g".into()],
            left: vec![identity(2), CMatrix::from_row_slice(2, 2, &[o, l, l, o])],
            star: identity(2),
            unit: vec![l, o],
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn left(&self) -> &[CMatrix] {
        &self.left
    }

    pub fn star_matrix(&self) -> &CMatrix {
        &self.star
    }

    pub fn unit(&self) -> &[C64] {
        &self.unit
    }

    pub fn basis_vector(&self, i: usize) -> Vec<C64> {
        let mut v = vec![ZERO; self.dim()];
        v[i] = ONE;
        v
    }

    /// Left multiplication by `x` on coordinates.
    pub fn left_matrix(&self, x: &[C64]) -> CMatrix {
        let d = self.dim();
        let mut m = zeros(d, d);
        for (xi, li) in x.iter().zip(&self.left) {
            if *xi != ZERO {
                m += li * *xi;
            }
        }
        m
    }

    pub fn mul(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        let y = CMatrix::from_column_slice(y.len(), 1, y);
        (self.left_matrix(x) * y).iter().copied().collect()
    }

    pub fn adjoint(&self, x: &[C64]) -> Vec<C64> {
        let x = CMatrix::from_iterator(x.len(), 1, x.iter().map(|z| z.conj()));
        (&self.star * x).iter().copied().collect()
    }
}

fn max_dev(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn apply_covector(phi: &[C64], x: &[C64]) -> C64 {
    phi.iter().zip(x).map(|(p, z)| p * z).sum()
}

/// A finite set `𝒮` of positive functionals, as covectors `φ(x) = Σ φ_i x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSet {
    functionals: Vec<Vec<C64>>,
}

impl FunctionalSet {
    /// Rejects any `φ` whose Gram `[φ(e_i* e_j)]` is not PSD.
    pub fn new(algebra: &StarAlgebra, functionals: Vec<Vec<C64>>, tol: &Tolerance) -> Result<Self> {
        for (index, phi) in functionals.iter().enumerate() {
            if phi.len() != algebra.dim() {
                return Err(Error::ShapeMismatch(format!(
                    "functional {index} has {} coefficients for dimension {}",
                    phi.len(),
                    algebra.dim()
                )));
            }
            let g = functional_gram(algebra, phi);
            let asym = frob(&(&g - g.adjoint()));
            let w = psd_witness(&crate::numerics::hermitian_part(&g), tol)?;
            if asym > tol.threshold(frob(&g)) || !w.is_psd() {
                return Err(Error::NotPositiveFunctional {
                    index,
                    eigenvalue: w.min_eigenvalue,
                });
            }
        }
        Ok(Self { functionals })
    }

    pub fn empty() -> Self {
        Self {
            functionals: Vec::new(),
        }
    }

    /// Covectors of functionals on `⊕ M_{n_k}` in the matrix-unit basis.
    pub fn from_functionals(shape: &AlgebraShape, fs: &[Functional]) -> Result<Self> {
        let functionals = fs
            .iter()
            .map(|f| {
                (0..shape.dim())
                    .map(|u| f.apply(&AlgElement::matrix_unit(shape, u)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { functionals })
    }

    pub fn functionals(&self) -> &[Vec<C64>] {
        &self.functionals
    }

    pub fn len(&self) -> usize {
        self.functionals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functionals.is_empty()
    }
}

/// `[φ(e_i* e_j)]`.
pub fn functional_gram(algebra: &StarAlgebra, phi: &[C64]) -> CMatrix {
    let d = algebra.dim();
    let stars: Vec<Vec<C64>> = (0..d).map(|i| algebra.adjoint(&algebra.basis_vector(i))).collect();
    CMatrix::from_fn(d, d, |i, j| {
        let prod = algebra.mul(&stars[i], &algebra.basis_vector(j));
        apply_covector(phi, &prod)
    })
}

/// GNS data of one functional: `G_φ = A / N_φ ≅ ℂ^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct GnsComponent {
    /// `r x d`: column `j` is the class of `e_j`.
    pub coord_map: CMatrix,
    /// `π_φ(e_i)`.
    pub pi: Vec<CMatrix>,
    pub cyclic: Vec<C64>,
}

impl GnsComponent {
    pub fn dim(&self) -> usize {
        self.coord_map.nrows()
    }

    pub fn pi_of(&self, x: &[C64]) -> CMatrix {
        let r = self.dim();
        let mut m = zeros(r, r);
        for (xi, p) in x.iter().zip(&self.pi) {
            if *xi != ZERO {
                m += p * *xi;
            }
        }
        m
    }

    /// Largest `|⟨Ω, π(e_i) Ω⟩ - φ(e_i)|`.
    pub fn reconstruction_error(&self, phi: &[C64]) -> f64 {
        let omega = CMatrix::from_column_slice(self.dim(), 1, &self.cyclic);
        self.pi
            .iter()
            .zip(phi)
            .map(|(p, f)| ((omega.adjoint() * p * &omega)[(0, 0)] - f).norm())
            .fold(0.0, f64::max)
    }
}

/// `π_φ(a) = L M_a L⁺` where `[φ(e_i* e_j)] = L* L`.
pub fn gns_functional(algebra: &StarAlgebra, phi: &[C64], tol: &Tolerance) -> Result<GnsComponent> {
    let g = functional_gram(algebra, phi);
    let f = psd_factor(&crate::numerics::hermitian_part(&g), tol).map_err(|e| match e {
        Error::NotPsd { eigenvalue } => Error::NotPositiveFunctional { index: 0, eigenvalue },
        other => other,
    })?;
    let l = f.factor.clone();
    let linv = f.right_inverse();
    let pi = algebra.left().iter().map(|m| &l * m * &linv).collect();
    let u = CMatrix::from_column_slice(algebra.dim(), 1, algebra.unit());
    let cyclic = (&l * u).iter().copied().collect();
    Ok(GnsComponent {
        coord_map: l,
        pi,
        cyclic,
    })
}

/// `π = ⊕_φ π_φ` on `G = ⊕_φ G_φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GnsRep {
    pub components: Vec<GnsComponent>,
}

impl GnsRep {
    pub fn new(algebra: &StarAlgebra, set: &FunctionalSet, tol: &Tolerance) -> Result<Self> {
        let components = set
            .functionals()
            .iter()
            .enumerate()
            .map(|(index, phi)| {
                gns_functional(algebra, phi, tol).map_err(|e| match e {
                    Error::NotPositiveFunctional { eigenvalue, .. } => Error::NotPositiveFunctional { index, eigenvalue },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components })
    }

    pub fn dim(&self) -> usize {
        self.components.iter().map(|c| c.dim()).sum()
    }

    pub fn pi_of(&self, x: &[C64]) -> CMatrix {
        block_diag(&self.components.iter().map(|c| c.pi_of(x)).collect::<Vec<_>>())
    }
}

/// Outcome of the separation test.
#[derive(Debug, Clone, PartialEq)]
pub struct Separation {
    pub separated: bool,
    pub rank: usize,
    /// Basis of `ker π`, in algebra coordinates.
    pub kernel: Vec<Vec<C64>>,
}

/// `𝒮` separates `A` iff `a ↦ ⊕_φ π_φ(a)` is injective.
pub fn is_s_separated(algebra: &StarAlgebra, set: &FunctionalSet, tol: &Tolerance) -> Result<Separation> {
    let rep = GnsRep::new(algebra, set, tol)?;
    let d = algebra.dim();
    let rows: usize = rep.components.iter().map(|c| c.dim() * c.dim()).sum();
    // pad so the SVD returns a full right factor
    let mut m = zeros(rows.max(d), d);
    for i in 0..d {
        let mut r = 0;
        for c in &rep.components {
            for z in c.pi[i].iter() {
                m[(r, i)] = *z;
                r += 1;
            }
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let threshold = tol.threshold(smax);
    let mut rank = 0;
    let mut kernel = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > threshold {
            rank += 1;
        } else {
            kernel.push(v_t.row(k).iter().map(|z| z.conj()).collect());
        }
    }
    Ok(Separation {
        separated: rank == d,
        rank,
        kernel,
    })
}

/// Outcome of the `𝒮`-positivity test on `π(b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SPositivity {
    pub positive: bool,
    pub hermitian: bool,
    /// `||π(b) - π(b)*||_F`.
    pub asymmetry: f64,
    /// Most negative eigenvalue of the hermitian part of some `π_φ(b)`.
    pub min_eigenvalue: f64,
    /// The `φ` attaining `min_eigenvalue`.
    pub functional: Option<usize>,
    pub threshold: f64,
}

/// `b` is `𝒮`-positive iff `⟨g, π(b) g⟩ ≥ 0` for all `g ∈ G`, i.e. each
/// `π_φ(b)` is Hermitian PSD.
pub fn is_s_positive(b: &[C64], algebra: &StarAlgebra, set: &FunctionalSet, tol: &Tolerance) -> Result<SPositivity> {
    if b.len() != algebra.dim() {
        return Err(Error::ShapeMismatch("element has wrong dimension".into()));
    }
    let rep = GnsRep::new(algebra, set, tol)?;
    let mut out = SPositivity {
        positive: true,
        hermitian: true,
        asymmetry: 0.0,
        min_eigenvalue: 0.0,
        functional: None,
        threshold: tol.abs_floor,
    };
    let mut min = f64::INFINITY;
    for (idx, c) in rep.components.iter().enumerate() {
        if c.dim() == 0 {
            continue;
        }
        let p = c.pi_of(b);
        let threshold = tol.threshold(crate::numerics::spectral_norm(&p));
        let asym = frob(&(&p - p.adjoint()));
        out.asymmetry = out.asymmetry.max(asym);
        if asym > threshold {
            out.hermitian = false;
        }
        let w = psd_witness(&crate::numerics::hermitian_part(&p), tol)?;
        if w.min_eigenvalue < min {
            min = w.min_eigenvalue;
            out.functional = Some(idx);
            out.threshold = w.threshold;
        }
        if !w.is_psd() {
            out.positive = false;
        }
    }
    if min.is_finite() {
        out.min_eigenvalue = min;
    }
    out.positive &= out.hermitian;
    Ok(out)
}

/// `β: G → H` with `β* β = π(b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareRoot {
    pub beta: CMatrix,
    pub residual: f64,
}

pub fn s_square_root(b: &[C64], algebra: &StarAlgebra, set: &FunctionalSet, tol: &Tolerance) -> Result<SquareRoot> {
    let pos = is_s_positive(b, algebra, set, tol)?;
    if !pos.positive {
        return Err(Error::NotSPositive(if pos.hermitian {
            format!("min eigenvalue {:e} under functional {:?}", pos.min_eigenvalue, pos.functional)
        } else {
            format!("π(b) is not hermitian: asymmetry {:e}", pos.asymmetry)
        }));
    }
    let p = GnsRep::new(algebra, set, tol)?.pi_of(b);
    let f = psd_factor(&crate::numerics::hermitian_part(&p), tol)?;
    let residual = max_abs(&(f.factor.adjoint() * &f.factor - &p));
    Ok(SquareRoot {
        beta: f.factor,
        residual,
    })
}

/// Kernel of linear maps `𝒜 → A` over a point set: `entries[s·n + t]` is the
/// `dim A x dim 𝒜` coordinate matrix of `K^{s,t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarKernel {
    pub points: Vec<String>,
    pub entries: Vec<CMatrix>,
}

impl StarKernel {
    pub fn new(points: Vec<String>, entries: Vec<CMatrix>) -> Result<Self> {
        let n = points.len();
        if n == 0 || entries.len() != n * n || entries.iter().any(|e| e.shape() != entries[0].shape()) {
            return Err(Error::ShapeMismatch("kernel needs n² maps of equal shape".into()));
        }
        Ok(Self { points, entries })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn entry(&self, s: usize, t: usize) -> &CMatrix {
        &self.entries[s * self.len() + t]
    }

    /// `K^{s,t}(x)` in coordinates.
    pub fn apply(&self, s: usize, t: usize, x: &[C64]) -> Vec<C64> {
        let x = CMatrix::from_column_slice(x.len(), 1, x);
        (self.entry(s, t) * x).iter().copied().collect()
    }
}

/// `H = ⊕_φ H_φ` with the left action of `𝒜` and `i(σ): G → H`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarKolmogorov {
    /// `π_H(e_w)` for the basis of `𝒜`.
    pub action: Vec<CMatrix>,
    /// `i(σ)` as `dim H x dim G` matrices.
    pub point_map: Vec<CMatrix>,
    /// Largest `|i(σ)* π_H(e_w) i(σ') - π(K^{σ,σ'}(e_w))|`.
    pub residual: f64,
}

impl StarKolmogorov {
    pub fn dim(&self) -> usize {
        self.point_map.first().map_or(0, |m| m.nrows())
    }
}

/// Factors the scalar Gram of `(e_u ⊗ σ ⊗ 1) ⊙ g` over `𝒜 ⊗ S ⊗ A ⊙ G`,
/// one block per `φ`.
pub fn kolmogorov_star(
    source: &StarAlgebra,
    kernel: &StarKernel,
    algebra: &StarAlgebra,
    set: &FunctionalSet,
    tol: &Tolerance,
) -> Result<StarKolmogorov> {
    let da = source.dim();
    if kernel.entries[0].shape() != (algebra.dim(), da) {
        return Err(Error::ShapeMismatch("kernel maps have the wrong shape".into()));
    }
    let rep = GnsRep::new(algebra, set, tol)?;
    let n = kernel.len();
    let stars: Vec<Vec<C64>> = (0..da).map(|u| source.adjoint(&source.basis_vector(u))).collect();
    let mut factors = Vec::with_capacity(rep.components.len());
    for (idx, c) in rep.components.iter().enumerate() {
        let r = c.dim();
        let size = da * n * r;
        let mut g = zeros(size, size);
        for u in 0..da {
            for v in 0..da {
                let uv = source.mul(&stars[u], &source.basis_vector(v));
                for s in 0..n {
                    for t in 0..n {
                        let p = c.pi_of(&kernel.apply(s, t, &uv));
                        g.view_mut(((u * n + s) * r, (v * n + t) * r), (r, r)).copy_from(&p);
                    }
                }
            }
        }
        let f = psd_factor(&g, tol).map_err(|e| match e {
            Error::NotPsd { eigenvalue } => Error::NotSPositiveKernel {
                eigenvalue,
                functional: idx,
            },
            other => other,
        })?;
        factors.push((f.factor.clone(), f.right_inverse(), r));
    }
    let action: Vec<CMatrix> = (0..da)
        .map(|w| {
            let m = kron(&source.left()[w], &identity(n));
            block_diag(
                &factors
                    .iter()
                    .map(|(l, linv, r)| l * kron(&m, &identity(*r)) * linv)
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let point_map: Vec<CMatrix> = (0..n)
        .map(|s| {
            let parts: Vec<CMatrix> = factors
                .iter()
                .map(|(l, _, r)| {
                    let mut sel = zeros(da * n * r, *r);
                    for (u, z) in source.unit().iter().enumerate() {
                        for m in 0..*r {
                            sel[((u * n + s) * r + m, m)] = *z;
                        }
                    }
                    l * sel
                })
                .collect();
            block_diag(&parts)
        })
        .collect();
    let mut residual = 0.0f64;
    for (w, act) in action.iter().enumerate() {
        let ew = source.basis_vector(w);
        for s in 0..n {
            let left = point_map[s].adjoint() * act;
            for t in 0..n {
                let expect = rep.pi_of(&kernel.apply(s, t, &ew));
                residual = residual.max(max_abs(&(&left * &point_map[t] - expect)));
            }
        }
    }
    Ok(StarKolmogorov {
        action,
        point_map,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpd::{gns, LinMap, MapKernel};
    use crate::numerics::re;
    use crate::random::{random_cmatrix, random_hermitian, seeded};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn m2() -> (AlgebraShape, StarAlgebra) {
        let s = AlgebraShape::full(2).unwrap();
        let a = StarAlgebra::from_shape(&s);
        (s, a)
    }

    #[test]
    fn from_shape_validates() {
        for blocks in [vec![1], vec![2], vec![2, 1], vec![1, 1, 1]] {
            let s = AlgebraShape::new(blocks).unwrap();
            let a = StarAlgebra::from_shape(&s);
            let b = StarAlgebra::new(a.labels.clone(), a.left.clone(), a.star.clone(), a.unit.clone(), &tol()).unwrap();
            assert_eq!(a, b);
        }
        let z = StarAlgebra::group_algebra_z2();
        StarAlgebra::new(z.labels.clone(), z.left.clone(), z.star.clone(), z.unit.clone(), &tol()).unwrap();
    }

    #[test]
    fn invalid_algebras_rejected() {
        let (_, a) = m2();
        let mut left = a.left.clone();
        left[1][(0, 0)] += re(1.0);
        assert!(matches!(
            StarAlgebra::new(a.labels.clone(), left, a.star.clone(), a.unit.clone(), &tol()),
            Err(Error::InvalidAlgebra(_))
        ));
        assert!(StarAlgebra::new(a.labels.clone(), a.left.clone(), identity(4), a.unit.clone(), &tol()).is_err());
        let mut unit = a.unit.clone();
        unit[0] = re(2.0);
        assert!(StarAlgebra::new(a.labels.clone(), a.left.clone(), a.star.clone(), unit, &tol()).is_err());
    }

    #[test]
    fn gns_fixtures() {
        let (s, a) = m2();
        let trace = FunctionalSet::from_functionals(&s, &[Functional::normalized_trace(&s)]).unwrap();
        let c = gns_functional(&a, &trace.functionals()[0], &tol()).unwrap();
        assert_eq!(c.dim(), 4);
        assert!(c.reconstruction_error(&trace.functionals()[0]) < 1e-10);

        let z = StarAlgebra::group_algebra_z2();
        let chi = vec![re(1.0), re(1.0)];
        let c = gns_functional(&z, &chi, &tol()).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.reconstruction_error(&chi) < 1e-12);

        let diag = StarAlgebra::from_shape(&AlgebraShape::new(vec![1, 1, 1]).unwrap());
        let c = gns_functional(&diag, &[re(0.0), re(1.0), re(0.0)], &tol()).unwrap();
        assert_eq!(c.dim(), 1);
    }

    #[test]
    fn gns_is_a_star_representation() {
        let s = AlgebraShape::new(vec![2, 1]).unwrap();
        let a = StarAlgebra::from_shape(&s);
        let mut rng = seeded(121);
        let g = random_cmatrix(&mut rng, 2, 2);
        let f = Functional::new(s.clone(), vec![&g * g.adjoint(), identity(1)], &tol()).unwrap();
        let set = FunctionalSet::from_functionals(&s, &[f]).unwrap();
        let c = gns_functional(&a, &set.functionals()[0], &tol()).unwrap();
        for i in 0..a.dim() {
            let si = a.adjoint(&a.basis_vector(i));
            assert!(max_abs(&(c.pi_of(&si) - c.pi[i].adjoint())) < 1e-12);
            for j in 0..a.dim() {
                let ij = a.mul(&a.basis_vector(i), &a.basis_vector(j));
                assert!(max_abs(&(c.pi_of(&ij) - &c.pi[i] * &c.pi[j])) < 1e-12);
            }
        }
    }

    #[test]
    fn non_positive_functional_rejected() {
        let z = StarAlgebra::group_algebra_z2();
        assert!(matches!(
            FunctionalSet::new(&z, vec![vec![re(1.0), re(2.0)]], &tol()),
            Err(Error::NotPositiveFunctional { index: 0, .. })
        ));
    }

    #[test]
    fn separation_fixtures() {
        let (s, a) = m2();
        let trace = FunctionalSet::from_functionals(&s, &[Functional::normalized_trace(&s)]).unwrap();
        let sep = is_s_separated(&a, &trace, &tol()).unwrap();
        assert!(sep.separated && sep.kernel.is_empty());

        let c2 = StarAlgebra::from_shape(&AlgebraShape::new(vec![1, 1]).unwrap());
        let first = FunctionalSet::new(&c2, vec![vec![re(1.0), re(0.0)]], &tol()).unwrap();
        let sep = is_s_separated(&c2, &first, &tol()).unwrap();
        assert!(!sep.separated);
        assert_eq!(sep.rank, 1);
        assert_eq!(sep.kernel.len(), 1);
        assert!(sep.kernel[0][0].norm() < 1e-15 && (sep.kernel[0][1].norm() - 1.0).abs() < 1e-15);

        let sep = is_s_separated(&a, &FunctionalSet::empty(), &tol()).unwrap();
        assert!(!sep.separated);
        assert_eq!(sep.kernel.len(), 4);
    }

    #[test]
    fn s_positivity_fixtures() {
        let c2 = StarAlgebra::from_shape(&AlgebraShape::new(vec![1, 1]).unwrap());
        let first = FunctionalSet::new(&c2, vec![vec![re(1.0), re(0.0)]], &tol()).unwrap();
        let b = [re(1.0), re(-1.0)];
        assert!(is_s_positive(&b, &c2, &first, &tol()).unwrap().positive);
        let root = s_square_root(&b, &c2, &first, &tol()).unwrap();
        assert_eq!(root.beta.shape(), (1, 1));
        assert!((root.beta[(0, 0)].norm() - 1.0).abs() < 1e-15);

        let (s, a) = m2();
        let trace = FunctionalSet::from_functionals(&s, &[Functional::normalized_trace(&s)]).unwrap();
        let ii: Vec<C64> = a.unit().iter().map(|z| z * C64::new(0.0, 1.0)).collect();
        let w = is_s_positive(&ii, &a, &trace, &tol()).unwrap();
        assert!(!w.positive && !w.hermitian);
        assert!(matches!(s_square_root(&ii, &a, &trace, &tol()), Err(Error::NotSPositive(_))));

        let mut rng = seeded(122);
        let x = AlgElement::new(s.clone(), vec![random_cmatrix(&mut rng, 2, 2)]).unwrap();
        let xx = x.adjoint().mul(&x).unwrap().coords();
        assert!(is_s_positive(&xx, &a, &trace, &tol()).unwrap().positive);
        assert!(s_square_root(&xx, &a, &trace, &tol()).unwrap().residual < 1e-10);
        let unit = s_square_root(a.unit(), &a, &trace, &tol()).unwrap();
        assert!(max_abs(&(unit.beta.adjoint() * &unit.beta - identity(4))) < 1e-12);
    }

    #[test]
    fn agrees_with_spectral_positivity_under_faithful_state() {
        let (s, a) = m2();
        let trace = FunctionalSet::from_functionals(&s, &[Functional::normalized_trace(&s)]).unwrap();
        let mut rng = seeded(123);
        for _ in 0..50 {
            let h = random_hermitian(&mut rng, 2);
            let e = AlgElement::new(s.clone(), vec![h]).unwrap();
            let sp = is_s_positive(&e.coords(), &a, &trace, &tol()).unwrap().positive;
            assert_eq!(sp, e.is_positive(&tol()).positive);
        }
    }

    #[test]
    fn polarization_agrees_with_quantified_definition() {
        // oracle: b is 𝒮-positive iff [φ(e_i* b e_j)] is PSD for each φ
        let alg = StarAlgebra::from_shape(&AlgebraShape::new(vec![2, 1]).unwrap());
        let mut phi = vec![ZERO; 5];
        phi[0] = re(1.0);
        phi[4] = re(0.5);
        let set = FunctionalSet::new(&alg, vec![phi.clone()], &tol()).unwrap();
        let mut rng = seeded(124);
        let mut seen = [0usize; 2];
        for k in 0..60 {
            let mut b = a_hermitian(&mut rng, &alg);
            if k % 2 == 0 {
                b = alg.mul(&alg.adjoint(&b), &b);
            }
            let m = CMatrix::from_fn(5, 5, |i, j| {
                let ebe = alg.mul(&alg.mul(&alg.adjoint(&alg.basis_vector(i)), &b), &alg.basis_vector(j));
                apply_covector(&phi, &ebe)
            });
            let oracle = psd_witness(&m, &tol()).unwrap().is_psd();
            let decided = is_s_positive(&b, &alg, &set, &tol()).unwrap().positive;
            assert_eq!(decided, oracle);
            seen[decided as usize] += 1;
        }
        assert!(seen[0] > 0 && seen[1] > 0);
    }

    fn a_hermitian(rng: &mut crate::random::Prng, alg: &StarAlgebra) -> Vec<C64> {
        let x: Vec<C64> = (0..alg.dim()).map(|_| crate::random::normal_c64(rng)).collect();
        let xs = alg.adjoint(&x);
        x.iter().zip(&xs).map(|(a, b)| (a + b) * 0.5).collect()
    }

    #[test]
    fn kolmogorov_star_reduces_to_square_root() {
        let c2 = StarAlgebra::from_shape(&AlgebraShape::new(vec![1, 1]).unwrap());
        let first = FunctionalSet::new(&c2, vec![vec![re(1.0), re(0.0)]], &tol()).unwrap();
        let scalars = StarAlgebra::from_shape(&AlgebraShape::scalars());
        let b = [re(1.0), re(-1.0)];
        let k = StarKernel::new(vec!["w".into()], vec![CMatrix::from_column_slice(2, 1, &b)]).unwrap();
        let dec = kolmogorov_star(&scalars, &k, &c2, &first, &tol()).unwrap();
        let root = s_square_root(&b, &c2, &first, &tol()).unwrap();
        assert_eq!(dec.dim(), root.beta.nrows());
        assert!(max_abs(&(dec.point_map[0].adjoint() * &dec.point_map[0] - root.beta.adjoint() * &root.beta)) < 1e-12);
        assert!(dec.residual < 1e-12);
    }

    #[test]
    fn kolmogorov_star_matches_cpd_gns() {
        let mut rng = seeded(125);
        let sa = AlgebraShape::full(2).unwrap();
        let sb = AlgebraShape::full(2).unwrap();
        let v = [vec![random_cmatrix(&mut rng, 2, 2)], vec![random_cmatrix(&mut rng, 2, 2)]];
        let t = LinMap::conjugation(&sa, &sb, &[v[0].clone()]).unwrap();
        let t = t.add(&LinMap::conjugation(&sa, &sb, &[v[1].clone()]).unwrap()).unwrap();
        let g = random_cmatrix(&mut rng, 2, 2);
        let state = Functional::new(sb.clone(), vec![&g * g.adjoint()], &tol()).unwrap();
        let set = FunctionalSet::from_functionals(&sb, &[state]).unwrap();
        let alg_a = StarAlgebra::from_shape(&sa);
        let alg_b = StarAlgebra::from_shape(&sb);
        let k = StarKernel::new(vec!["w".into()], vec![t.action().clone()]).unwrap();
        let dec = kolmogorov_star(&alg_a, &k, &alg_b, &set, &tol()).unwrap();
        assert!(dec.residual < 1e-9);
        let e = gns(&MapKernel::one_point(t, &tol()).unwrap(), &tol()).unwrap();
        // E ⊙ G with G ≅ ℂ² ⊗ ℂ² for a faithful state on M₂
        assert_eq!(dec.dim(), e.corr.module().ambient()[0] * 2);
    }

    #[test]
    fn non_s_positive_kernel_rejected() {
        let c2 = StarAlgebra::from_shape(&AlgebraShape::new(vec![1, 1]).unwrap());
        let first = FunctionalSet::new(&c2, vec![vec![re(1.0), re(0.0)]], &tol()).unwrap();
        let scalars = StarAlgebra::from_shape(&AlgebraShape::scalars());
        let k = StarKernel::new(vec!["w".into()], vec![CMatrix::from_column_slice(2, 1, &[re(-1.0), re(1.0)])]).unwrap();
        assert!(matches!(
            kolmogorov_star(&scalars, &k, &c2, &first, &tol()),
            Err(Error::NotSPositiveKernel { functional: 0, .. })
        ));
    }
}
