use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactlin::PrimeField;

/// Hard limit on the number of variables of a [`PolyRing`].
pub const MAX_VARS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonomialOrder {
    #[default]
    DegRevLex,
    Lex,
}

/// Exponent vector with cached total degree and support mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u8; MAX_VARS],
    deg: u16,
    mask: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        exps: [0; MAX_VARS],
        deg: 0,
        mask: 0,
    };

    pub fn from_exponents(exps: &[u8]) -> Monomial {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut m = Monomial::ONE;
        for (i, &e) in exps.iter().enumerate() {
            m.exps[i] = e;
            m.deg += e as u16;
            if e > 0 {
                m.mask |= 1 << i;
            }
        }
        m
    }

    pub fn var(i: usize) -> Monomial {
        let mut m = Monomial::ONE;
        m.exps[i] = 1;
        m.deg = 1;
        m.mask = 1 << i;
        m
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.deg as u32
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u8 {
        self.exps[i]
    }

    pub fn exponents(&self, nvars: usize) -> &[u8] {
        &self.exps[..nvars]
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        if self.mask & !other.mask != 0 || self.deg > other.deg {
            return false;
        }
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    #[inline]
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for i in 0..MAX_VARS {
            m.exps[i] = self.exps[i]
                .checked_add(other.exps[i])
                .expect("exponent overflow");
        }
        m.deg += other.deg;
        m.mask |= other.mask;
        m
    }

    /// `self / other`; caller guarantees divisibility.
    #[inline]
    pub fn div(&self, other: &Monomial) -> Monomial {
        debug_assert!(other.divides(self));
        let mut m = *self;
        let mut mask = 0;
        for i in 0..MAX_VARS {
            m.exps[i] -= other.exps[i];
            if m.exps[i] > 0 {
                mask |= 1 << i;
            }
        }
        m.deg -= other.deg;
        m.mask = mask;
        m
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut m = Monomial::ONE;
        for i in 0..MAX_VARS {
            m.exps[i] = self.exps[i].max(other.exps[i]);
            m.deg += m.exps[i] as u16;
        }
        m.mask = self.mask | other.mask;
        m
    }

    #[inline]
    pub fn coprime(&self, other: &Monomial) -> bool {
        self.mask & other.mask == 0
    }

    pub fn cmp_in(&self, other: &Monomial, order: MonomialOrder) -> Ordering {
        match order {
            MonomialOrder::DegRevLex => self.deg.cmp(&other.deg).then_with(|| {
                for i in (0..MAX_VARS).rev() {
                    if self.exps[i] != other.exps[i] {
                        return other.exps[i].cmp(&self.exps[i]);
                    }
                }
                Ordering::Equal
            }),
            MonomialOrder::Lex => self.exps.cmp(&other.exps),
        }
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = (0..MAX_VARS).rev().find(|&i| self.exps[i] != 0).map_or(0, |i| i + 1);
        write!(f, "{:?}", &self.exps[..last])
    }
}

/// Polynomial ring `Z_p[v_{1,0}, ..., v_{n,a_n - 1}]` with its block structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRing {
    pub field: PrimeField,
    pub blocks: Vec<usize>,
    pub order: MonomialOrder,
}

impl PolyRing {
    pub fn new(field: PrimeField, blocks: Vec<usize>, order: MonomialOrder) -> Self {
        let nvars: usize = blocks.iter().sum();
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables are supported");
        PolyRing {
            field,
            blocks,
            order,
        }
    }

    pub fn nvars(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn with_order(&self, order: MonomialOrder) -> PolyRing {
        PolyRing {
            order,
            ..self.clone()
        }
    }

    /// Index range of block `i`.
    pub fn block_range(&self, i: usize) -> std::ops::Range<usize> {
        let start: usize = self.blocks[..i].iter().sum();
        start..start + self.blocks[i]
    }

    /// Degree of `m` in each block.
    pub fn multidegree(&self, m: &Monomial) -> Vec<u32> {
        (0..self.blocks.len())
            .map(|i| self.block_range(i).map(|v| m.exp(v) as u32).sum())
            .collect()
    }

    pub fn var_name(&self, v: usize) -> String {
        let mut rest = v;
        for (i, &b) in self.blocks.iter().enumerate() {
            if rest < b {
                return format!("v{}_{}", i + 1, rest);
            }
            rest -= b;
        }
        format!("x{v}")
    }
}

/// Sparse polynomial; terms sorted strictly decreasing in the ring's order,
/// coefficients nonzero.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: Vec<(Monomial, u32)>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { terms: Vec::new() }
    }

    pub fn monomial(ring: &PolyRing, m: Monomial, c: u32) -> Self {
        let c = ring.field.reduce(c as u64);
        if c == 0 {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: vec![(m, c)],
        }
    }

    /// Sorts, merges duplicate monomials and drops zero coefficients.
    pub fn from_terms(ring: &PolyRing, mut terms: Vec<(Monomial, u32)>) -> Self {
        let f = ring.field;
        terms.sort_by(|a, b| b.0.cmp_in(&a.0, ring.order));
        let mut out: Vec<(Monomial, u32)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            let c = f.reduce(c as u64);
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = f.add(last.1, c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|t| t.1 != 0);
        MultiPoly { terms: out }
    }

    /// Wraps terms already sorted in the ring order with nonzero coefficients.
    pub(crate) fn from_sorted_terms(terms: Vec<(Monomial, u32)>) -> Self {
        MultiPoly { terms }
    }

    pub(crate) fn into_terms(self) -> Vec<(Monomial, u32)> {
        self.terms
    }

    pub(crate) fn split_leading(&self) -> ((Monomial, u32), MultiPoly) {
        (
            self.terms[0],
            MultiPoly {
                terms: self.terms[1..].to_vec(),
            },
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn leading_coefficient(&self) -> Option<u32> {
        self.terms.first().map(|t| t.1)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.degree() == 0
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    pub fn make_monic(&mut self, field: PrimeField) {
        if let Some(lc) = self.leading_coefficient() {
            if lc != 1 {
                let inv = field.inv(lc);
                for t in &mut self.terms {
                    t.1 = field.mul(t.1, inv);
                }
            }
        }
    }

    pub fn monic(mut self, field: PrimeField) -> Self {
        self.make_monic(field);
        self
    }

    /// `self - c * m * g`; the order is taken from `ring`.
    pub fn sub_mul(&self, ring: &PolyRing, c: u32, m: &Monomial, g: &MultiPoly) -> MultiPoly {
        MultiPoly {
            terms: sub_mul_terms(ring, &self.terms, c, m, &g.terms),
        }
    }

    pub fn add(&self, ring: &PolyRing, other: &MultiPoly) -> MultiPoly {
        let minus_one = ring.field.neg(1);
        self.sub_mul(ring, minus_one, &Monomial::ONE, other)
    }

    pub fn scale(&self, field: PrimeField, c: u32) -> MultiPoly {
        if c == 0 {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|&(m, a)| (m, field.mul(a, c))).collect(),
        }
    }

    pub fn mul(&self, ring: &PolyRing, other: &MultiPoly) -> MultiPoly {
        let f = ring.field;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(m, a) in &self.terms {
            for &(n, b) in &other.terms {
                terms.push((m.mul(&n), f.mul(a, b)));
            }
        }
        MultiPoly::from_terms(ring, terms)
    }

    pub fn evaluate(&self, field: PrimeField, point: &[u32]) -> u32 {
        self.terms.iter().fold(0, |acc, (m, c)| {
            let mut v = *c;
            for (i, &x) in point.iter().enumerate() {
                for _ in 0..m.exp(i) {
                    v = field.mul(v, x);
                }
            }
            field.add(acc, v)
        })
    }

    /// Re-sorts the terms for another order.
    pub fn reorder(&self, ring: &PolyRing) -> MultiPoly {
        MultiPoly::from_terms(ring, self.terms.clone())
    }

    /// Largest power of variable `v` dividing every term.
    pub fn min_exponent(&self, v: usize) -> u8 {
        self.terms.iter().map(|t| t.0.exp(v)).min().unwrap_or(0)
    }

    /// Divides every term by `v^e`; caller guarantees divisibility. Preserves order
    /// for degree-compatible orders only when followed by [`MultiPoly::reorder`].
    pub fn div_var_power(&self, ring: &PolyRing, v: usize, e: u8) -> MultiPoly {
        let mut d = [0u8; MAX_VARS];
        d[v] = e;
        let dm = Monomial::from_exponents(&d);
        MultiPoly::from_terms(ring, self.terms.iter().map(|&(m, c)| (m.div(&dm), c)).collect())
    }

    /// Substitutes a linear form for every variable: `x_v -> images[v]`.
    pub fn substitute_linear(&self, ring: &PolyRing, images: &[MultiPoly]) -> MultiPoly {
        let mut acc = MultiPoly::zero();
        for &(m, c) in &self.terms {
            let mut term = MultiPoly::monomial(ring, Monomial::ONE, c);
            for (v, image) in images.iter().enumerate() {
                for _ in 0..m.exp(v) {
                    term = term.mul(ring, image);
                }
            }
            acc = acc.add(ring, &term);
        }
        acc
    }

    /// True if every term has the same block multidegree.
    pub fn is_multihomogeneous(&self, ring: &PolyRing) -> bool {
        let mut it = self.terms.iter().map(|t| ring.multidegree(&t.0));
        match it.next() {
            None => true,
            Some(first) => it.all(|d| d == first),
        }
    }

    /// Degree at most one in every variable.
    pub fn is_multilinear(&self) -> bool {
        self.terms
            .iter()
            .all(|t| (0..MAX_VARS).all(|v| t.0.exp(v) <= 1))
    }

    /// One line in the exchange syntax: `c*[e_0,...,e_{N-1}] + ...`.
    pub fn to_exponent_syntax(&self, ring: &PolyRing) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let nvars = ring.nvars();
        self.terms
            .iter()
            .map(|(m, c)| {
                let exps: Vec<String> = m.exponents(nvars).iter().map(|e| e.to_string()).collect();
                format!("{}*[{}]", c, exps.join(","))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Merge of `a - c * m * g` for sorted term lists.
pub(crate) fn sub_mul_terms(
    ring: &PolyRing,
    a: &[(Monomial, u32)],
    c: u32,
    m: &Monomial,
    g: &[(Monomial, u32)],
) -> Vec<(Monomial, u32)> {
    let f = ring.field;
    let neg = f.neg(c);
    let mut out = Vec::with_capacity(a.len() + g.len());
    let mut i = 0;
    let mut j = 0;
    while j < g.len() {
        let gm = g[j].0.mul(m);
        while i < a.len() && a[i].0.cmp_in(&gm, ring.order) == Ordering::Greater {
            out.push(a[i]);
            i += 1;
        }
        if i < a.len() && a[i].0 == gm {
            let v = f.mul_add(a[i].1, neg, g[j].1);
            if v != 0 {
                out.push((gm, v));
            }
            i += 1;
        } else {
            out.push((gm, f.mul(neg, g[j].1)));
        }
        j += 1;
    }
    out.extend_from_slice(&a[i..]);
    out
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{m:?}")?;
        }
        Ok(())
    }
}
