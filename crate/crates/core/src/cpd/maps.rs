use crate::algebra::{AlgElement, AlgebraShape};
use crate::error::{Error, Result};
use crate::kernels::Witness;
use crate::modcorr::{Correspondence, ModVector};
use crate::numerics::{kron, matrix_unit, max_abs, re, zeros, CMatrix, Tolerance, C64, ZERO};

/// Linear map `A → B`, stored as its `dim B x dim A` matrix on matrix units.
#[derive(Debug, Clone, PartialEq)]
pub struct LinMap {
    from: AlgebraShape,
    to: AlgebraShape,
    action: CMatrix,
}

impl LinMap {
    pub fn new(from: AlgebraShape, to: AlgebraShape, action: CMatrix) -> Result<Self> {
        if action.shape() != (to.dim(), from.dim()) {
            return Err(Error::ShapeMismatch(format!(
                "action is {:?}, expected {}x{}",
                action.shape(),
                to.dim(),
                from.dim()
            )));
        }
        crate::numerics::check_finite(&action)?;
        Ok(Self { from, to, action })
    }

    pub fn from_fn(from: &AlgebraShape, to: &AlgebraShape, f: impl Fn(&AlgElement) -> AlgElement) -> Result<Self> {
        let mut action = zeros(to.dim(), from.dim());
        for u in 0..from.dim() {
            let img = f(&AlgElement::matrix_unit(from, u));
            if img.shape() != to {
                return Err(Error::ShapeMismatch("image in the wrong algebra".into()));
            }
            for (r, c) in img.coords().into_iter().enumerate() {
                action[(r, u)] = c;
            }
        }
        Self::new(from.clone(), to.clone(), action)
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        Self {
            from: shape.clone(),
            to: shape.clone(),
            action: crate::numerics::identity(shape.dim()),
        }
    }

    pub fn zero(from: &AlgebraShape, to: &AlgebraShape) -> Self {
        Self {
            from: from.clone(),
            to: to.clone(),
            action: zeros(to.dim(), from.dim()),
        }
    }

    /// Blockwise transpose.
    pub fn transpose(shape: &AlgebraShape) -> Self {
        Self::from_fn(shape, shape, |a| {
            AlgElement::new(shape.clone(), a.blocks().iter().map(|b| b.transpose()).collect()).expect("same shape")
        })
        .expect("same shape")
    }

    /// `T(a)_k = Σ_j v_jk* a_j v_jk` with `v_jk` of size `p_j x n_k`.
    pub fn conjugation(from: &AlgebraShape, to: &AlgebraShape, v: &[Vec<CMatrix>]) -> Result<Self> {
        let ok = v.len() == from.num_blocks()
            && v.iter().enumerate().all(|(j, row)| {
                row.len() == to.num_blocks()
                    && row
                        .iter()
                        .enumerate()
                        .all(|(k, m)| m.shape() == (from.block(j), to.block(k)))
            });
        if !ok {
            return Err(Error::ShapeMismatch("conjugation operators of the wrong size".into()));
        }
        Self::from_fn(from, to, |a| {
            let blocks = (0..to.num_blocks())
                .map(|k| {
                    let mut acc = zeros(to.block(k), to.block(k));
                    for (j, row) in v.iter().enumerate() {
                        acc += row[k].adjoint() * a.block(j) * &row[k];
                    }
                    acc
                })
                .collect();
            AlgElement::new(to.clone(), blocks).expect("same shape")
        })
    }

    pub fn from_shape(&self) -> &AlgebraShape {
        &self.from
    }

    pub fn to_shape(&self) -> &AlgebraShape {
        &self.to
    }

    pub fn action(&self) -> &CMatrix {
        &self.action
    }

    pub fn apply(&self, a: &AlgElement) -> Result<AlgElement> {
        if a.shape() != &self.from {
            return Err(Error::ShapeMismatch("argument of a foreign algebra".into()));
        }
        let x = CMatrix::from_column_slice(self.from.dim(), 1, &a.coords());
        let y = &self.action * x;
        AlgElement::from_coords(&self.to, y.as_slice())
    }

    /// Image of the `u`-th matrix unit.
    pub fn apply_unit(&self, u: usize) -> AlgElement {
        AlgElement::from_coords(&self.to, self.action.column(u).as_slice()).expect("dims match")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinMap) -> Result<LinMap> {
        if other.to != self.from {
            return Err(Error::MiddleAlgebraMismatch);
        }
        Ok(LinMap {
            from: other.from.clone(),
            to: self.to.clone(),
            action: &self.action * &other.action,
        })
    }

    pub fn add(&self, other: &LinMap) -> Result<LinMap> {
        if self.from != other.from || self.to != other.to {
            return Err(Error::ShapeMismatch("maps between different algebras".into()));
        }
        Ok(LinMap {
            from: self.from.clone(),
            to: self.to.clone(),
            action: &self.action + &other.action,
        })
    }

    pub fn scale(&self, z: C64) -> LinMap {
        LinMap {
            from: self.from.clone(),
            to: self.to.clone(),
            action: &self.action * z,
        }
    }

    /// The map `a ↦ T(a*)*`.
    pub fn star(&self) -> LinMap {
        let mut action = zeros(self.to.dim(), self.from.dim());
        for (u, (j, i, l)) in self.from.units().enumerate() {
            let img = self.apply_unit(self.from.unit_index(j, l, i)).adjoint();
            for (r, c) in img.coords().into_iter().enumerate() {
                action[(r, u)] = c;
            }
        }
        LinMap {
            from: self.from.clone(),
            to: self.to.clone(),
            action,
        }
    }

    pub fn max_diff(&self, other: &LinMap) -> Result<f64> {
        if self.from != other.from || self.to != other.to {
            return Err(Error::ShapeMismatch("maps between different algebras".into()));
        }
        Ok(max_abs(&(&self.action - &other.action)))
    }

    /// Choi blocks `C_jk = Σ_{i,l} E_il ⊗ T(E^{(j)}_il)_k`, indexed `[j][k]`.
    pub fn choi(&self) -> Vec<Vec<CMatrix>> {
        let a = &self.from;
        (0..a.num_blocks())
            .map(|j| {
                let p = a.block(j);
                (0..self.to.num_blocks())
                    .map(|k| {
                        let n = self.to.block(k);
                        let mut c = zeros(p * n, p * n);
                        for i in 0..p {
                            for l in 0..p {
                                let img = self.apply_unit(a.unit_index(j, i, l));
                                c += kron(&matrix_unit(p, i, l), img.block(k));
                            }
                        }
                        c
                    })
                    .collect()
            })
            .collect()
    }

    pub fn choi_inverse(from: &AlgebraShape, to: &AlgebraShape, blocks: &[Vec<CMatrix>]) -> Result<LinMap> {
        let ok = blocks.len() == from.num_blocks()
            && blocks.iter().enumerate().all(|(j, row)| {
                row.len() == to.num_blocks()
                    && row.iter().enumerate().all(|(k, c)| {
                        let d = from.block(j) * to.block(k);
                        c.shape() == (d, d)
                    })
            });
        if !ok {
            return Err(Error::ShapeMismatch("Choi blocks of the wrong size".into()));
        }
        let mut action = zeros(to.dim(), from.dim());
        for (u, (j, i, l)) in from.units().enumerate() {
            for k in 0..to.num_blocks() {
                let n = to.block(k);
                let sub = blocks[j][k].view((i * n, l * n), (n, n));
                for r in 0..n {
                    for s in 0..n {
                        action[(to.unit_index(k, r, s), u)] = sub[(r, s)];
                    }
                }
            }
        }
        LinMap::new(from.clone(), to.clone(), action)
    }

    pub fn is_cp(&self, tol: &Tolerance) -> Result<Witness> {
        let blocks: Vec<CMatrix> = self.choi().into_iter().flatten().collect();
        // witness block index is j * num_blocks(B) + k
        Witness::from_blocks(&blocks, tol)
    }
}

/// Kernel `S x S → 𝔅(A, B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapKernel {
    points: Vec<String>,
    from: AlgebraShape,
    to: AlgebraShape,
    entries: Vec<LinMap>,
}

impl MapKernel {
    /// Validates hermiticity `K^{σ,σ'}(a)* = K^{σ',σ}(a*)` and symmetrizes.
    pub fn new(points: Vec<String>, entries: Vec<LinMap>, tol: &Tolerance) -> Result<Self> {
        let n = points.len();
        if n == 0 || entries.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for {n} points",
                entries.len()
            )));
        }
        let from = entries[0].from.clone();
        let to = entries[0].to.clone();
        if entries.iter().any(|e| e.from != from || e.to != to) {
            return Err(Error::ShapeMismatch("kernel maps of mixed shape".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if !points.iter().all(|p| seen.insert(p)) {
            return Err(Error::Validation("duplicate point label".into()));
        }
        let scale = entries.iter().map(|e| max_abs(&e.action)).fold(0.0, f64::max);
        let threshold = tol.threshold(scale);
        let mut worst = 0.0f64;
        let mut sym = Vec::with_capacity(n * n);
        for s in 0..n {
            for t in 0..n {
                let mirrored = entries[t * n + s].star();
                worst = worst.max(entries[s * n + t].max_diff(&mirrored)?);
                sym.push(entries[s * n + t].add(&mirrored)?.scale(re(0.5)));
            }
        }
        if worst > threshold {
            return Err(Error::NotHermitianKernel(worst));
        }
        Ok(Self {
            points,
            from,
            to,
            entries: sym,
        })
    }

    /// `K^{σ,σ'}(a) = ⟨x_σ, a x_σ'⟩` for vectors in a correspondence.
    pub fn from_correspondence(
        points: Vec<String>,
        corr: &Correspondence,
        vectors: &[ModVector],
        tol: &Tolerance,
    ) -> Result<Self> {
        let a = corr.left();
        // images of the vectors under each matrix unit
        let moved: Vec<Vec<ModVector>> = (0..a.dim())
            .map(|u| {
                let op = corr.left_op(&AlgElement::matrix_unit(a, u))?;
                vectors.iter().map(|y| op.apply(y)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut entries = Vec::with_capacity(vectors.len() * vectors.len());
        for x in vectors {
            for t in 0..vectors.len() {
                let mut action = zeros(corr.right().dim(), a.dim());
                for (u, row) in moved.iter().enumerate() {
                    for (r, c) in x.inner(&row[t])?.coords().into_iter().enumerate() {
                        action[(r, u)] = c;
                    }
                }
                entries.push(LinMap::new(a.clone(), corr.right().clone(), action)?);
            }
        }
        Self::new(points, entries, tol)
    }

    pub fn one_point(map: LinMap, tol: &Tolerance) -> Result<Self> {
        Self::new(vec!["w".into()], vec![map], tol)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn from_shape(&self) -> &AlgebraShape {
        &self.from
    }

    pub fn to_shape(&self) -> &AlgebraShape {
        &self.to
    }

    pub fn entries(&self) -> &[LinMap] {
        &self.entries
    }

    pub fn entry(&self, s: usize, t: usize) -> &LinMap {
        &self.entries[s * self.points.len() + t]
    }

    pub fn scale(&self) -> f64 {
        self.entries.iter().map(|e| max_abs(&e.action)).fold(0.0, f64::max)
    }

    pub fn check_cap(&self, max_points: usize) -> Result<()> {
        if self.points.len() > max_points {
            return Err(Error::CapExceeded {
                what: "points".into(),
                cap: max_points,
            });
        }
        Ok(())
    }

    /// The map `[a_ij] ↦ [K^{σ_i,σ_j}(a_ij)]` from `M_n(A)` to `M_n(B)`.
    pub fn lifted(&self) -> Result<LinMap> {
        let n = self.points.len();
        let big_a = self.from.amplify(n)?;
        let big_b = self.to.amplify(n)?;
        let mut action = zeros(big_b.dim(), big_a.dim());
        for (u, (j, row, col)) in big_a.units().enumerate() {
            let p = self.from.block(j);
            let (s, i) = (row / p, row % p);
            let (t, l) = (col / p, col % p);
            let img = self.entry(s, t).apply_unit(self.from.unit_index(j, i, l));
            for k in 0..self.to.num_blocks() {
                let nk = self.to.block(k);
                let blk = img.block(k);
                for r in 0..nk {
                    for c in 0..nk {
                        let z = blk[(r, c)];
                        if z != ZERO {
                            action[(big_b.unit_index(k, s * nk + r, t * nk + c), u)] = z;
                        }
                    }
                }
            }
        }
        LinMap::new(big_a, big_b, action)
    }

    pub fn is_cpd(&self, tol: &Tolerance) -> Result<Witness> {
        self.lifted()?.is_cp(tol)
    }

    /// Entrywise map `K^{σ,σ'} ↦ f(K^{σ,σ'})`.
    pub fn map_entries(&self, f: impl Fn(&LinMap) -> LinMap, tol: &Tolerance) -> Result<MapKernel> {
        MapKernel::new(self.points.clone(), self.entries.iter().map(f).collect(), tol)
    }

    pub fn max_diff(&self, other: &MapKernel) -> Result<f64> {
        if self.points.len() != other.points.len() {
            return Err(Error::PointSetMismatch);
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.max_diff(b))
            .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
    }
}

/// Schur product `(L ∘ K)^{σ,σ'} = L^{σ,σ'} ∘ K^{σ,σ'}`.
pub fn schur_compose(l: &MapKernel, k: &MapKernel, tol: &Tolerance) -> Result<MapKernel> {
    if l.points != k.points {
        return Err(Error::PointSetMismatch);
    }
    if l.from != k.to {
        return Err(Error::MiddleAlgebraMismatch);
    }
    let entries = l
        .entries
        .iter()
        .zip(&k.entries)
        .map(|(a, b)| a.compose(b))
        .collect::<Result<Vec<_>>>()?;
    MapKernel::new(l.points.clone(), entries, tol)
}

/// The identity kernel `K^{σ,σ'} = id` on `points`.
pub fn identity_kernel(points: Vec<String>, shape: &AlgebraShape, tol: &Tolerance) -> Result<MapKernel> {
    let n = points.len();
    MapKernel::new(points, vec![LinMap::identity(shape); n * n], tol)
}
