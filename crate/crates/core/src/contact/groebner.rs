//! Buchberger's algorithm over Z_p with sugar pair selection and the
//! Gebauer–Möller criteria.

use serde::{Deserialize, Serialize};

use super::poly::{sub_mul_terms, Monomial, MultiPoly, PolyRing};
use crate::error::{Error, Result};

/// Deterministic resource limit. Work is counted in term operations
/// (monomial products and merges), which tracks running time closely while
/// staying reproducible across machines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_term_ops: u64,
    pub max_basis: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_term_ops: 400_000_000,
            max_basis: 20_000,
        }
    }
}

impl Budget {
    pub fn with_term_ops(max_term_ops: u64) -> Self {
        Budget {
            max_term_ops,
            ..Budget::default()
        }
    }

    pub fn unlimited() -> Self {
        Budget {
            max_term_ops: u64::MAX,
            max_basis: usize::MAX,
        }
    }
}

/// Running work counter shared by a chain of computations.
#[derive(Debug)]
pub struct Meter {
    budget: Budget,
    used: u64,
}

impl Meter {
    pub fn new(budget: Budget) -> Self {
        Meter { budget, used: 0 }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub(crate) fn charge(&mut self, ops: usize) -> Result<()> {
        self.used = self.used.saturating_add(ops as u64);
        if self.used > self.budget.max_term_ops {
            return Err(Error::Aborted(format!(
                "Groebner basis computation exceeded the budget of {} term operations",
                self.budget.max_term_ops
            )));
        }
        Ok(())
    }

    fn check_basis(&self, size: usize) -> Result<()> {
        if size > self.budget.max_basis {
            return Err(Error::Aborted(format!(
                "intermediate basis exceeded {} elements",
                self.budget.max_basis
            )));
        }
        Ok(())
    }
}

struct Entry {
    poly: MultiPoly,
    lm: Monomial,
    sugar: u32,
    active: bool,
}

#[derive(Clone, Copy)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

/// Reduced Gröbner basis of the ideal generated by `gens`, monic, sorted by
/// increasing leading monomial.
pub fn groebner(ring: &PolyRing, gens: &[MultiPoly], budget: Budget) -> Result<Vec<MultiPoly>> {
    let mut meter = Meter::new(budget);
    groebner_metered(ring, gens, &mut meter)
}

pub fn groebner_metered(ring: &PolyRing, gens: &[MultiPoly], meter: &mut Meter) -> Result<Vec<MultiPoly>> {
    let f = ring.field;
    let mut basis: Vec<Entry> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    for g in gens {
        let g = g.reorder(ring);
        if g.is_zero() {
            continue;
        }
        if g.is_constant() {
            return Ok(vec![unit(ring)]);
        }
        let g = g.monic(f);
        let sugar = g.total_degree();
        insert(&mut basis, &mut pairs, g, sugar);
    }

    while let Some(pos) = select(&pairs, ring) {
        let pair = pairs.swap_remove(pos);
        let s = spoly(ring, &basis[pair.i], &basis[pair.j], &pair.lcm, meter)?;
        let h = normal_form(ring, s, &basis, meter)?;
        if h.is_zero() {
            continue;
        }
        if h.is_constant() {
            return Ok(vec![unit(ring)]);
        }
        insert(&mut basis, &mut pairs, h.monic(f), pair.sugar);
        meter.check_basis(basis.len())?;
    }

    let active: Vec<MultiPoly> = basis.into_iter().filter(|e| e.active).map(|e| e.poly).collect();
    reduce_basis(ring, active, meter)
}

fn unit(ring: &PolyRing) -> MultiPoly {
    MultiPoly::monomial(ring, Monomial::ONE, 1)
}

fn select(pairs: &[Pair], ring: &PolyRing) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, p) in pairs.iter().enumerate() {
        best = match best {
            None => Some(k),
            Some(b) => {
                let q = &pairs[b];
                let better = p.sugar < q.sugar
                    || (p.sugar == q.sugar && p.lcm.cmp_in(&q.lcm, ring.order).is_lt());
                if better {
                    Some(k)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

fn spoly(ring: &PolyRing, a: &Entry, b: &Entry, lcm: &Monomial, meter: &mut Meter) -> Result<MultiPoly> {
    meter.charge(a.poly.len() + b.poly.len())?;
    let ma = lcm.div(&a.lm);
    let mb = lcm.div(&b.lm);
    let left = MultiPoly::zero().sub_mul(ring, ring.field.neg(1), &ma, &a.poly);
    Ok(left.sub_mul(ring, 1, &mb, &b.poly))
}

/// Full normal form of `p` modulo the active entries (all monic).
fn normal_form(ring: &PolyRing, p: MultiPoly, basis: &[Entry], meter: &mut Meter) -> Result<MultiPoly> {
    let mut done: Vec<(Monomial, u32)> = Vec::new();
    let mut cur = p.into_terms();
    let mut start = 0;
    while start < cur.len() {
        let (m, c) = cur[start];
        match basis.iter().find(|e| e.active && e.lm.divides(&m)) {
            Some(e) => {
                meter.charge(cur.len() - start + e.poly.len())?;
                cur = sub_mul_terms(ring, &cur[start..], c, &m.div(&e.lm), e.poly.terms());
                start = 0;
            }
            None => {
                done.push((m, c));
                start += 1;
            }
        }
    }
    Ok(MultiPoly::from_sorted_terms(done))
}

fn insert(basis: &mut Vec<Entry>, pairs: &mut Vec<Pair>, poly: MultiPoly, sugar: u32) {
    let lm = *poly.leading_monomial().expect("nonzero polynomial");
    let h = basis.len();
    let sugar_of = |e: &Entry, lcm: &Monomial| e.sugar - e.lm.degree() + lcm.degree();
    let h_sugar = |lcm: &Monomial| sugar - lm.degree() + lcm.degree();

    // Candidate pairs (h, g) against active g, filtered by the chain criterion.
    let candidates: Vec<(usize, Monomial)> = basis
        .iter()
        .enumerate()
        .filter(|(_, e)| e.active)
        .map(|(g, e)| (g, lm.lcm(&e.lm)))
        .collect();
    let mut kept: Vec<(usize, Monomial)> = Vec::new();
    for (idx, &(g1, l1)) in candidates.iter().enumerate() {
        let coprime = lm.coprime(&basis[g1].lm);
        let dominated = candidates[idx + 1..].iter().any(|(_, l2)| l2.divides(&l1))
            || kept.iter().any(|(_, l2)| l2.divides(&l1));
        if coprime || !dominated {
            kept.push((g1, l1));
        }
    }
    // Old pairs made redundant by h.
    pairs.retain(|p| {
        !lm.divides(&p.lcm)
            || basis[p.i].lm.lcm(&lm) == p.lcm
            || lm.lcm(&basis[p.j].lm) == p.lcm
    });
    for (g, l) in kept {
        if lm.coprime(&basis[g].lm) {
            continue;
        }
        let s = h_sugar(&l).max(sugar_of(&basis[g], &l));
        pairs.push(Pair {
            i: g,
            j: h,
            lcm: l,
            sugar: s,
        });
    }
    for e in basis.iter_mut() {
        if e.active && lm.divides(&e.lm) {
            e.active = false;
        }
    }
    basis.push(Entry {
        poly,
        lm,
        sugar,
        active: true,
    });
}

/// Minimalizes and tail-reduces a Gröbner basis.
fn reduce_basis(ring: &PolyRing, polys: Vec<MultiPoly>, meter: &mut Meter) -> Result<Vec<MultiPoly>> {
    let f = ring.field;
    let mut polys: Vec<MultiPoly> = polys.into_iter().map(|p| p.monic(f)).collect();
    polys.sort_by(|a, b| {
        a.leading_monomial()
            .unwrap()
            .cmp_in(b.leading_monomial().unwrap(), ring.order)
    });
    let mut minimal: Vec<MultiPoly> = Vec::new();
    for p in polys {
        let lm = p.leading_monomial().unwrap();
        if !minimal.iter().any(|q| q.leading_monomial().unwrap().divides(lm)) {
            minimal.push(p);
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Entry> = minimal
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| Entry {
                lm: *q.leading_monomial().unwrap(),
                poly: q.clone(),
                sugar: 0,
                active: true,
            })
            .collect();
        let p = &minimal[i];
        let (lead, tail) = p.split_leading();
        let tail = normal_form(ring, tail, &others, meter)?;
        let r = MultiPoly::from_sorted_terms(std::iter::once(lead).chain(tail.terms().iter().copied()).collect());
        reduced.push(r);
    }
    Ok(reduced)
}

/// Normal form of `p` modulo a Gröbner basis (ideal membership iff zero).
pub fn reduce(ring: &PolyRing, p: &MultiPoly, gb: &[MultiPoly]) -> MultiPoly {
    let entries: Vec<Entry> = gb
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| {
            let g = g.reorder(ring).monic(ring.field);
            Entry {
                lm: *g.leading_monomial().unwrap(),
                poly: g,
                sugar: 0,
                active: true,
            }
        })
        .collect();
    let mut meter = Meter::new(Budget::unlimited());
    normal_form(ring, p.reorder(ring), &entries, &mut meter).expect("unlimited budget")
}

pub fn is_unit_ideal(gb: &[MultiPoly]) -> bool {
    gb.iter().any(|g| g.is_constant())
}
