use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{Matrix, PrimeField};
use crate::segre::SpanMatrix;

/// A line of the Segre variety: factor `free` varies, the others are fixed
/// points (normalized so the first nonzero coordinate is 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegreLine {
    pub free: usize,
    /// Fixed points per factor; empty at `free`.
    pub fixed: Vec<Vec<u32>>,
}

impl SegreLine {
    pub fn meets(&self, other: &SegreLine) -> bool {
        if self.free == other.free {
            return self == other;
        }
        (0..self.fixed.len())
            .filter(|&m| m != self.free && m != other.free)
            .all(|m| self.fixed[m] == other.fixed[m])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineIncidenceReport {
    pub lines: Vec<SegreLine>,
    /// Pairs `(i, j)`, `i < j`, of lines that meet.
    pub incidences: Vec<(usize, usize)>,
    /// Positive-dimensional families of lines found (a plane or worse in the section).
    pub line_families: usize,
    /// A cyclic ordering in which exactly consecutive lines meet, if one exists.
    pub cycle: Option<Vec<usize>>,
}

impl LineIncidenceReport {
    pub fn reduced_degree(&self) -> usize {
        self.lines.len()
    }

    pub fn is_single_cycle(&self) -> bool {
        self.cycle.is_some()
    }
}

fn normalize(field: PrimeField, v: &[u32]) -> Vec<u32> {
    let lead = v.iter().copied().find(|&x| x != 0).expect("nonzero vector");
    let inv = field.inv(lead);
    v.iter().map(|&x| field.mul(x, inv)).collect()
}

/// Every line of the Segre variety inside `P(T)`, for three-factor formats in
/// which each ruling has a two-dimensional factor to enumerate over `P^1(F_p)`.
///
/// For a ruling with free factor `i` and fixed factors `m1 < m2`, the points
/// `y ∈ P(A_m1)` are enumerated and the line condition `ℓ(y ⊗ z ⊗ A_i) = 0` is
/// solved linearly in `z`. Only `F_p`-rational lines are seen; for spans built
/// from rational points every line of the section is of this kind.
pub fn line_incidence(span: &SpanMatrix) -> Result<LineIncidenceReport> {
    let format = span.format();
    if format.n() != 3 {
        return Err(Error::OutOfRegime("line incidence needs a three-factor format".into()));
    }
    let dims = format.dims();
    let field = span.field();
    let functionals = span.annihilator();
    let strides = format.strides();
    let mut lines = Vec::new();
    let mut families = 0;
    for free in 0..3 {
        let others: Vec<usize> = (0..3).filter(|&m| m != free).collect();
        let (m1, m2) = (others[0], others[1]);
        let (m1, m2) = if dims[m1] == 2 {
            (m1, m2)
        } else if dims[m2] == 2 {
            (m2, m1)
        } else {
            return Err(Error::OutOfRegime(
                "line incidence enumerates a two-dimensional fixed factor".into(),
            ));
        };
        let p = field.modulus();
        let candidates = (0..p).map(|t| vec![1, t]).chain(std::iter::once(vec![0, 1]));
        for y in candidates {
            let mut system = Matrix::zeros(field, 0, dims[m2]);
            for l in 0..functionals.rows() {
                let ell = functionals.row(l);
                for c in 0..dims[free] {
                    let row: Vec<u32> = (0..dims[m2])
                        .map(|b| {
                            (0..2).fold(0, |acc, a| {
                                let mut idx = [0usize; 3];
                                idx[free] = c;
                                idx[m1] = a;
                                idx[m2] = b;
                                let flat: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
                                field.mul_add(acc, ell[flat], y[a])
                            })
                        })
                        .collect();
                    system.push_row(&row);
                }
            }
            let kernel = system.kernel();
            match kernel.rows() {
                0 => {}
                1 => {
                    let mut fixed = vec![Vec::new(); 3];
                    fixed[m1] = y.clone();
                    fixed[m2] = normalize(field, kernel.row(0));
                    lines.push(SegreLine { free, fixed });
                }
                _ => families += 1,
            }
        }
    }
    let mut incidences = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if lines[i].meets(&lines[j]) {
                incidences.push((i, j));
            }
        }
    }
    let cycle = single_cycle(lines.len(), &incidences);
    Ok(LineIncidenceReport {
        lines,
        incidences,
        line_families: families,
        cycle,
    })
}

/// Cyclic vertex order if the graph is one cycle through all `n >= 3` vertices.
fn single_cycle(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    if n < 3 || edges.len() != n {
        return None;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    if adj.iter().any(|nb| nb.len() != 2) {
        return None;
    }
    let mut order = vec![0];
    let mut prev = 0;
    let mut cur = adj[0][0];
    while cur != 0 {
        order.push(cur);
        let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
        prev = cur;
        cur = next;
    }
    (order.len() == n).then_some(order)
}
