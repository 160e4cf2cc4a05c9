//! The Segre variety of rank-one tensors: formats, points, tangent blocks and
//! the Terracini span.
//!
//! Tensor coordinates are stored row-major over the multi-index
//! `(i_1, ..., i_n)` with factor 1 varying slowest.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{Matrix, PrimeField, RngState};

/// Factor dimensions `(a_1, ..., a_n)` of a Segre product, `n >= 3`, each `a_i >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Format {
    dims: Vec<usize>,
}

impl Format {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 3 {
            return Err(Error::InvalidFormat(format!(
                "need at least 3 factors, got {}",
                dims.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidFormat(format!("factor dimension {d} < 2")));
        }
        if dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .is_none()
        {
            return Err(Error::InvalidFormat("ambient dimension overflows".into()));
        }
        Ok(Format { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    /// `D = prod a_i`.
    pub fn ambient(&self) -> usize {
        self.dims.iter().product()
    }

    /// Affine dimension of a tangent space, `sum a_i - (n - 1)`.
    pub fn tangent_dim(&self) -> usize {
        self.dims.iter().sum::<usize>() + 1 - self.n()
    }

    pub fn total_vars(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Coordinate strides; factor 1 slowest.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.n()];
        for i in (0..self.n() - 1).rev() {
            s[i] = s[i + 1] * self.dims[i + 1];
        }
        s
    }

    /// Multi-index of a flat coordinate.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n()];
        for i in (0..self.n()).rev() {
            idx[i] = flat % self.dims[i];
            flat /= self.dims[i];
        }
        idx
    }
}

impl TryFrom<Vec<usize>> for Format {
    type Error = Error;
    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Format::new(dims)
    }
}

impl From<Format> for Vec<usize> {
    fn from(f: Format) -> Self {
        f.dims
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", join(&self.dims))
    }
}

pub(crate) fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// A point `v_1 ⊗ ... ⊗ v_n` of the Segre variety (affine representative).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecomposablePoint {
    pub vectors: Vec<Vec<u32>>,
}

impl DecomposablePoint {
    pub fn new(format: &Format, vectors: Vec<Vec<u32>>) -> Result<Self> {
        check_vectors(format, &vectors, None)?;
        Ok(DecomposablePoint { vectors })
    }

    pub fn sample(format: &Format, field: PrimeField, rng: &mut RngState) -> Self {
        let vectors = format
            .dims()
            .iter()
            .map(|&d| rng.random_vector(field, d))
            .collect();
        DecomposablePoint { vectors }
    }

    /// Tensor coordinates `⊗ v_i`.
    pub fn coordinates(&self, field: PrimeField) -> Vec<u32> {
        let slices: Vec<&[u32]> = self.vectors.iter().map(|v| v.as_slice()).collect();
        outer(field, &slices)
    }
}

/// A point of the product of all factors but `omitted`; spans the block
/// `A_omitted ⊗ (⊗_{m != omitted} v_m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxPoint {
    pub omitted: usize,
    /// One vector per factor; the entry at `omitted` is empty.
    pub vectors: Vec<Vec<u32>>,
}

impl AuxPoint {
    pub fn new(format: &Format, omitted: usize, vectors: Vec<Vec<u32>>) -> Result<Self> {
        if omitted >= format.n() {
            return Err(Error::InvalidProblem(format!("aux factor {omitted} out of range")));
        }
        check_vectors(format, &vectors, Some(omitted))?;
        Ok(AuxPoint { omitted, vectors })
    }

    pub fn sample(format: &Format, omitted: usize, field: PrimeField, rng: &mut RngState) -> Self {
        let vectors = format
            .dims()
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                if i == omitted {
                    Vec::new()
                } else {
                    rng.random_vector(field, d)
                }
            })
            .collect();
        AuxPoint { omitted, vectors }
    }
}

fn check_vectors(format: &Format, vectors: &[Vec<u32>], omitted: Option<usize>) -> Result<()> {
    if vectors.len() != format.n() {
        return Err(Error::InvalidProblem(format!(
            "expected {} factor vectors, got {}",
            format.n(),
            vectors.len()
        )));
    }
    for (i, (v, &d)) in vectors.iter().zip(format.dims()).enumerate() {
        if Some(i) == omitted {
            continue;
        }
        if v.len() != d {
            return Err(Error::InvalidProblem(format!("factor {i}: length {} != {d}", v.len())));
        }
        if v.iter().all(|&x| x == 0) {
            return Err(Error::InvalidProblem(format!("factor {i}: zero vector")));
        }
    }
    Ok(())
}

/// Outer product of the given vectors, factor 0 slowest.
pub fn outer(field: PrimeField, vectors: &[&[u32]]) -> Vec<u32> {
    let mut acc = vec![1u32];
    for v in vectors {
        let mut next = Vec::with_capacity(acc.len() * v.len());
        for &a in &acc {
            for &b in v.iter() {
                next.push(field.mul(a, b));
            }
        }
        acc = next;
    }
    acc
}

fn unit(dim: usize, b: usize) -> Vec<u32> {
    let mut e = vec![0; dim];
    e[b] = 1;
    e
}

/// Rows `v_1 ⊗ ... ⊗ e_b ⊗ ... ⊗ v_n` for every factor `i` and basis vector `e_b` of `A_i`.
///
/// The row space is the affine tangent space at `x`, of dimension
/// `sum a_i - (n - 1)` whenever every `v_i` is nonzero.
pub fn tangent_block(format: &Format, field: PrimeField, x: &DecomposablePoint) -> Matrix {
    let mut m = Matrix::zeros(field, 0, format.ambient());
    for (i, &d) in format.dims().iter().enumerate() {
        for b in 0..d {
            let e = unit(d, b);
            let slices: Vec<&[u32]> = (0..format.n())
                .map(|m| if m == i { e.as_slice() } else { x.vectors[m].as_slice() })
                .collect();
            m.push_row(&outer(field, &slices));
        }
    }
    m
}

/// Rows `e_b ⊗ (⊗_{m != i} w_m)` spanning `A_i ⊗ w`; rank `a_i`.
pub fn aux_block(format: &Format, field: PrimeField, w: &AuxPoint) -> Matrix {
    let i = w.omitted;
    let d = format.dims()[i];
    let mut m = Matrix::zeros(field, 0, format.ambient());
    for b in 0..d {
        let e = unit(d, b);
        let slices: Vec<&[u32]> = (0..format.n())
            .map(|m| if m == i { e.as_slice() } else { w.vectors[m].as_slice() })
            .collect();
        m.push_row(&outer(field, &slices));
    }
    m
}

/// A `(k, p_1, ..., p_n)` not-weak-defectivity claim on a format.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Problem {
    pub dims: Format,
    pub k: usize,
    pub aux: Vec<usize>,
}

impl Problem {
    pub fn new(dims: Vec<usize>, k: usize, aux: Vec<usize>) -> Result<Self> {
        let dims = Format::new(dims)?;
        if aux.len() != dims.n() {
            return Err(Error::InvalidProblem(format!(
                "aux vector has {} entries for {} factors",
                aux.len(),
                dims.n()
            )));
        }
        Ok(Problem { dims, k, aux })
    }

    /// `(k, 0, ..., 0)`: plain k-identifiability.
    pub fn plain(dims: Vec<usize>, k: usize) -> Result<Self> {
        let n = dims.len();
        Problem::new(dims, k, vec![0; n])
    }

    pub fn format(&self) -> &Format {
        &self.dims
    }

    pub fn n(&self) -> usize {
        self.dims.n()
    }

    /// `min(D, k (sum a_i - n + 1) + sum p_i a_i)`.
    pub fn expected_span_dim(&self) -> usize {
        let f = &self.dims;
        let aux: usize = self.aux.iter().zip(f.dims()).map(|(p, a)| p * a).sum();
        (self.k * f.tangent_dim() + aux).min(f.ambient())
    }

    /// Componentwise `(k, p) <= (other.k, other.p)`.
    pub fn params_le(&self, other: &Problem) -> bool {
        self.k <= other.k
            && self.aux.len() == other.aux.len()
            && self.aux.iter().zip(&other.aux).all(|(a, b)| a <= b)
    }

    pub fn is_plain(&self) -> bool {
        self.aux.iter().all(|&p| p == 0)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {}; {})", join(self.dims.dims()), self.k, join(&self.aux))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BlockKind {
    Tangent { point: usize },
    Aux { factor: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanBlock {
    #[serde(flatten)]
    pub kind: BlockKind,
    pub start_row: usize,
    pub rows: usize,
}

/// The Terracini span: stacked tangent and aux blocks.
#[derive(Debug, Clone)]
pub struct SpanMatrix {
    format: Format,
    matrix: Matrix,
    blocks: Vec<SpanBlock>,
    rank: usize,
    annihilator: OnceLock<Matrix>,
}

impl SpanMatrix {
    pub fn format(&self) -> &Format {
        &self.format
    }

    pub fn field(&self) -> PrimeField {
        self.matrix.field()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn blocks(&self) -> &[SpanBlock] {
        &self.blocks
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ambient(&self) -> usize {
        self.format.ambient()
    }

    /// Functionals cutting out the span; `D - rank` of them.
    pub fn annihilator(&self) -> &Matrix {
        self.annihilator.get_or_init(|| self.matrix.left_null_basis())
    }
}

/// Vertical concatenation of the tangent blocks at `points` and the aux blocks.
pub fn terracini_span(
    format: &Format,
    field: PrimeField,
    points: &[DecomposablePoint],
    aux: &[AuxPoint],
) -> SpanMatrix {
    let mut matrix = Matrix::zeros(field, 0, format.ambient());
    let mut blocks = Vec::with_capacity(points.len() + aux.len());
    for (idx, x) in points.iter().enumerate() {
        let b = tangent_block(format, field, x);
        blocks.push(SpanBlock {
            kind: BlockKind::Tangent { point: idx },
            start_row: matrix.rows(),
            rows: b.rows(),
        });
        matrix.append(&b);
    }
    for w in aux {
        let b = aux_block(format, field, w);
        blocks.push(SpanBlock {
            kind: BlockKind::Aux { factor: w.omitted },
            start_row: matrix.rows(),
            rows: b.rows(),
        });
        matrix.append(&b);
    }
    let rank = matrix.rank();
    SpanMatrix {
        format: format.clone(),
        matrix,
        blocks,
        rank,
        annihilator: OnceLock::new(),
    }
}

/// One random configuration for a problem: contact points first, then aux
/// points grouped by factor in factor order.
pub fn sample_configuration(
    problem: &Problem,
    field: PrimeField,
    rng: &mut RngState,
) -> (Vec<DecomposablePoint>, Vec<AuxPoint>) {
    let f = problem.format();
    let points = (0..problem.k)
        .map(|_| DecomposablePoint::sample(f, field, rng))
        .collect();
    let mut aux = Vec::new();
    for (i, &p) in problem.aux.iter().enumerate() {
        for _ in 0..p {
            aux.push(AuxPoint::sample(f, i, field, rng));
        }
    }
    (points, aux)
}

/// Samples a configuration and builds its span.
pub fn sample_span(
    problem: &Problem,
    field: PrimeField,
    rng: &mut RngState,
) -> (SpanMatrix, Vec<DecomposablePoint>) {
    let (points, aux) = sample_configuration(problem, field, rng);
    let span = terracini_span(problem.format(), field, &points, &aux);
    (span, points)
}
