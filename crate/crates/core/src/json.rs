//! Serde forms of the data types. Matrices are `{"rows","cols","re","im"}`
//! with row-major entry lists; kernels key their entries by `"σ|σ'"`.

use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::algebra::{AlgElement, AlgebraShape, Functional};
use crate::cpd::{LinMap, MapKernel};
use crate::error::{Error, Result};
use crate::kernels::{Decomposition, OpKernel};
use crate::modcorr::{Correspondence, HilbertModule, ModVector};
use crate::numerics::{CMatrix, Tolerance, C64};
use crate::semigroups::ScalarGenerator;
use crate::starpos::{FunctionalSet, StarAlgebra, StarKernel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let (rows, cols) = m.shape();
        let entries = (0..rows).flat_map(|i| (0..cols).map(move |j| m[(i, j)]));
        Self {
            rows,
            cols,
            re: entries.clone().map(|z| z.re).collect(),
            im: entries.map(|z| z.im).collect(),
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.rows * self.cols;
        if self.re.len() != n || !(self.im.is_empty() || self.im.len() == n) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix with {} real and {} imaginary entries",
                self.rows,
                self.cols,
                self.re.len(),
                self.im.len()
            )));
        }
        let m = CMatrix::from_fn(self.rows, self.cols, |i, j| {
            let k = i * self.cols + j;
            C64::new(self.re[k], self.im.get(k).copied().unwrap_or(0.0))
        });
        crate::numerics::check_finite(&m)?;
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeJson {
    pub blocks: Vec<usize>,
}

impl From<&AlgebraShape> for ShapeJson {
    fn from(s: &AlgebraShape) -> Self {
        Self {
            blocks: s.blocks().to_vec(),
        }
    }
}

impl ShapeJson {
    pub fn to_shape(&self) -> Result<AlgebraShape> {
        AlgebraShape::new(self.blocks.clone())
    }
}

pub type ElementJson = Vec<MatrixJson>;

pub fn element_json(a: &AlgElement) -> ElementJson {
    a.blocks().iter().map(MatrixJson::from).collect()
}

pub fn element_from_json(shape: &AlgebraShape, e: &ElementJson) -> Result<AlgElement> {
    AlgElement::new(shape.clone(), matrices(e)?)
}

fn matrices(ms: &[MatrixJson]) -> Result<Vec<CMatrix>> {
    ms.iter().map(MatrixJson::to_matrix).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalJson {
    pub densities: Vec<MatrixJson>,
}

impl FunctionalJson {
    pub fn to_functional(&self, shape: &AlgebraShape, tol: &Tolerance) -> Result<Functional> {
        Functional::new(shape.clone(), matrices(&self.densities)?, tol)
    }
}

/// Module, or correspondence when `left` and `action` are present.
/// `action.units[u][k]` is the image of the `u`-th matrix unit of the left
/// algebra on right block `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub right: ShapeJson,
    pub ambient: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<ShapeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionJson {
    pub units: Vec<Vec<MatrixJson>>,
}

impl ModuleJson {
    pub fn from_module(m: &HilbertModule) -> Self {
        Self {
            right: m.shape().into(),
            ambient: m.ambient().to_vec(),
            left: None,
            action: None,
        }
    }

    pub fn from_correspondence(c: &Correspondence) -> Self {
        let units = c
            .action_units()
            .iter()
            .map(|per_block| per_block.iter().map(MatrixJson::from).collect())
            .collect();
        Self {
            left: Some(c.left().into()),
            action: Some(ActionJson { units }),
            ..Self::from_module(c.module())
        }
    }

    pub fn to_module(&self) -> Result<HilbertModule> {
        HilbertModule::new(self.right.to_shape()?, self.ambient.clone())
    }

    pub fn to_correspondence(&self, tol: &Tolerance) -> Result<Correspondence> {
        let module = self.to_module()?;
        match (&self.left, &self.action) {
            (Some(left), Some(action)) => {
                let units = action.units.iter().map(|u| matrices(u)).collect::<Result<Vec<_>>>()?;
                Correspondence::from_units(module, left.to_shape()?, units, tol)
            }
            (None, None) => Err(Error::Validation("correspondence needs \"left\" and \"action\"".into())),
            _ => Err(Error::Validation("\"left\" and \"action\" must appear together".into())),
        }
    }
}

pub type VectorJson = Vec<MatrixJson>;

pub fn vector_json(x: &ModVector) -> VectorJson {
    x.blocks().iter().map(MatrixJson::from).collect()
}

pub fn vector_from_json(module: &HilbertModule, v: &VectorJson) -> Result<ModVector> {
    ModVector::new(module.clone(), matrices(v)?)
}

/// Entries keyed by `"σ|σ'"` as read from input.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(transparent)]
pub struct Entries<T>(pub BTreeMap<String, T>);

/// Row-major `"σ|σ'"` entries for serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedEntries<T>(pub Vec<(String, T)>);

impl<T: Serialize> Serialize for OrderedEntries<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

pub fn pair_key(a: &str, b: &str) -> String {
    format!("{a}|{b}")
}

fn take_entries<T: Clone>(points: &[String], entries: &BTreeMap<String, T>) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(points.len() * points.len());
    for a in points {
        for b in points {
            let key = pair_key(a, b);
            out.push(
                entries
                    .get(&key)
                    .cloned()
                    .ok_or_else(|| Error::Validation(format!("missing entry \"{key}\"")))?,
            );
        }
    }
    if entries.len() != out.len() {
        return Err(Error::Validation(format!(
            "{} entries for {} points",
            entries.len(),
            points.len()
        )));
    }
    Ok(out)
}

fn ordered<T, U>(points: &[String], entries: &[T], f: impl Fn(&T) -> U) -> OrderedEntries<U> {
    let n = points.len();
    OrderedEntries(
        (0..n * n)
            .map(|i| (pair_key(&points[i / n], &points[i % n]), f(&entries[i])))
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct KernelJson {
    pub points: Vec<String>,
    pub shape: ShapeJson,
    pub entries: Entries<ElementJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelOut {
    pub points: Vec<String>,
    pub shape: ShapeJson,
    pub entries: OrderedEntries<ElementJson>,
}

impl KernelJson {
    pub fn to_kernel(&self, tol: &Tolerance) -> Result<OpKernel> {
        let shape = self.shape.to_shape()?;
        let entries = take_entries(&self.points, &self.entries.0)?
            .iter()
            .map(|e| element_from_json(&shape, e))
            .collect::<Result<Vec<_>>>()?;
        OpKernel::new(self.points.clone(), shape, entries, tol)
    }
}

pub fn kernel_json(k: &OpKernel) -> KernelOut {
    KernelOut {
        points: k.points().to_vec(),
        shape: k.shape().into(),
        entries: ordered(k.points(), k.entries(), element_json),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinMapJson {
    pub from: ShapeJson,
    pub to: ShapeJson,
    pub action: MatrixJson,
}

impl From<&LinMap> for LinMapJson {
    fn from(m: &LinMap) -> Self {
        Self {
            from: m.from_shape().into(),
            to: m.to_shape().into(),
            action: m.action().into(),
        }
    }
}

impl LinMapJson {
    pub fn to_map(&self) -> Result<LinMap> {
        LinMap::new(self.from.to_shape()?, self.to.to_shape()?, self.action.to_matrix()?)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct MapKernelJson {
    pub points: Vec<String>,
    pub entries: Entries<LinMapJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapKernelOut {
    pub points: Vec<String>,
    pub entries: OrderedEntries<LinMapJson>,
}

impl MapKernelJson {
    pub fn to_kernel(&self, tol: &Tolerance) -> Result<MapKernel> {
        let entries = take_entries(&self.points, &self.entries.0)?
            .iter()
            .map(LinMapJson::to_map)
            .collect::<Result<Vec<_>>>()?;
        MapKernel::new(self.points.clone(), entries, tol)
    }
}

pub fn map_kernel_json(k: &MapKernel) -> MapKernelOut {
    MapKernelOut {
        points: k.points().to_vec(),
        entries: ordered(k.points(), k.entries(), |m| LinMapJson::from(m)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionOut {
    pub module: ModuleJson,
    pub minimal: bool,
    pub point_map: OrderedEntries<VectorJson>,
}

pub fn decomposition_json(points: &[String], d: &Decomposition) -> DecompositionOut {
    DecompositionOut {
        module: ModuleJson::from_module(&d.module),
        minimal: d.minimal,
        point_map: OrderedEntries(
            points
                .iter()
                .zip(&d.point_map)
                .map(|(p, x)| (p.clone(), vector_json(x)))
                .collect(),
        ),
    }
}

/// Hermitian generator `ℓ` of a Schur semigroup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarGeneratorJson {
    pub points: Vec<String>,
    pub matrix: MatrixJson,
}

impl ScalarGeneratorJson {
    pub fn to_generator(&self, tol: &Tolerance) -> Result<ScalarGenerator> {
        ScalarGenerator::new(self.points.clone(), self.matrix.to_matrix()?, tol)
    }
}

/// `mult[i][j][k] = c_{ij}^k`; imaginary parts optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarAlgebraJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub mult: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mult_im: Option<Vec<Vec<Vec<f64>>>>,
    pub star: MatrixJson,
    pub unit: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_im: Option<Vec<f64>>,
}

fn complex_vec(re: &[f64], im: Option<&Vec<f64>>, what: &str) -> Result<Vec<C64>> {
    if let Some(im) = im {
        if im.len() != re.len() {
            return Err(Error::ShapeMismatch(format!("{what}: real and imaginary parts differ in length")));
        }
    }
    Ok(re
        .iter()
        .enumerate()
        .map(|(k, &x)| C64::new(x, im.map_or(0.0, |v| v[k])))
        .collect())
}

impl StarAlgebraJson {
    pub fn to_algebra(&self, tol: &Tolerance) -> Result<StarAlgebra> {
        let d = self.dim;
        let bad = || Error::InvalidAlgebra(format!("structure constants must be {d}x{d}x{d}"));
        if self.mult.len() != d || self.mult.iter().any(|r| r.len() != d || r.iter().any(|c| c.len() != d)) {
            return Err(bad());
        }
        if let Some(im) = &self.mult_im {
            if im.len() != d || im.iter().any(|r| r.len() != d || r.iter().any(|c| c.len() != d)) {
                return Err(bad());
            }
        }
        let left = (0..d)
            .map(|i| {
                CMatrix::from_fn(d, d, |k, j| {
                    let im = self.mult_im.as_ref().map_or(0.0, |m| m[i][j][k]);
                    C64::new(self.mult[i][j][k], im)
                })
            })
            .collect();
        let labels = self
            .labels
            .clone()
            .unwrap_or_else(|| (0..d).map(|i| format!("e{i}")).collect());
        if labels.len() != d {
            return Err(Error::InvalidAlgebra("one label per basis element".into()));
        }
        let unit = complex_vec(&self.unit, self.unit_im.as_ref(), "unit")?;
        StarAlgebra::new(labels, left, self.star.to_matrix()?, unit, tol)
    }

    pub fn from_algebra(a: &StarAlgebra) -> Self {
        let d = a.dim();
        let part = |f: fn(&C64) -> f64| -> Vec<Vec<Vec<f64>>> {
            (0..d)
                .map(|i| (0..d).map(|j| (0..d).map(|k| f(&a.left()[i][(k, j)])).collect()).collect())
                .collect()
        };
        let mult_im = part(|z| z.im);
        let unit_im: Vec<f64> = a.unit().iter().map(|z| z.im).collect();
        Self {
            dim: d,
            labels: Some(a.labels().to_vec()),
            mult: part(|z| z.re),
            mult_im: mult_im.iter().flatten().flatten().any(|&x| x != 0.0).then_some(mult_im),
            star: a.star_matrix().into(),
            unit: a.unit().iter().map(|z| z.re).collect(),
            unit_im: unit_im.iter().any(|&x| x != 0.0).then_some(unit_im),
        }
    }
}

/// Input of the `star` commands: an algebra, a functional set, and either an
/// element or a kernel from a source algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarProblemJson {
    pub algebra: StarAlgebraJson,
    pub functionals: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functionals_im: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_im: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<StarKernelJson>,
}

/// `entries["σ|σ'"]` is the `dim A x dim 𝒜` coordinate matrix of the map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarKernelJson {
    pub source: StarAlgebraJson,
    pub points: Vec<String>,
    pub entries: BTreeMap<String, MatrixJson>,
}

impl StarProblemJson {
    pub fn algebra(&self, tol: &Tolerance) -> Result<StarAlgebra> {
        self.algebra.to_algebra(tol)
    }

    pub fn functional_set(&self, algebra: &StarAlgebra, tol: &Tolerance) -> Result<FunctionalSet> {
        if let Some(im) = &self.functionals_im {
            if im.len() != self.functionals.len() {
                return Err(Error::ShapeMismatch("functionals_im must match functionals".into()));
            }
        }
        let fs = self
            .functionals
            .iter()
            .enumerate()
            .map(|(i, re)| complex_vec(re, self.functionals_im.as_ref().map(|v| &v[i]), "functional"))
            .collect::<Result<Vec<_>>>()?;
        FunctionalSet::new(algebra, fs, tol)
    }

    pub fn element(&self) -> Result<Vec<C64>> {
        let re = self
            .element
            .as_ref()
            .ok_or_else(|| Error::Validation("missing \"element\"".into()))?;
        complex_vec(re, self.element_im.as_ref(), "element")
    }

    pub fn kernel(&self, tol: &Tolerance) -> Result<(StarAlgebra, StarKernel)> {
        let k = self
            .kernel
            .as_ref()
            .ok_or_else(|| Error::Validation("missing \"kernel\"".into()))?;
        let source = k.source.to_algebra(tol)?;
        let entries = take_entries(&k.points, &k.entries)?
            .iter()
            .map(MatrixJson::to_matrix)
            .collect::<Result<Vec<_>>>()?;
        Ok((source, StarKernel::new(k.points.clone(), entries)?))
    }
}

/// Input of `phimap`: `T` as an `(h2·h1) x dim E` matrix whose column `j` is
/// the row-major `h2 x h1` image of the `j`-th basis vector of `E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiMapJson {
    pub module: ModuleJson,
    pub h1: usize,
    pub h2: usize,
    pub t: MatrixJson,
    pub phi: LinMapJson,
}

/// Input of `sandwich`: a module `E` over `B` and a correspondence over
/// `K(E)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichJson {
    pub module: ModuleJson,
    pub inner: ModuleJson,
}
