//! Exact contact-locus computation for small formats.
//!
//! The tangency scheme `{x ∈ X : T_x X ⊆ T}` is cut out by the multilinear
//! polynomials `ℓ(v_1 ⊗ .. b (slot j) .. ⊗ v_n)` for every functional `ℓ`
//! vanishing on `T`, factor `j` and basis vector `b` of `A_j`. Components with
//! some `v_m = 0` are artifacts of the affine encoding and are removed by
//! saturation. Dimension and degree are read off the Hilbert function on the
//! diagonal multidegrees `(t, ..., t)`, which is the Hilbert function of the
//! locus in the Segre embedding.

pub mod groebner;
mod lines;
pub mod poly;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{PrimeField, RngState};
use crate::segre::{sample_span, DecomposablePoint, Format, Problem, SpanMatrix};
pub use groebner::{groebner, is_unit_ideal, reduce, Budget, Meter};
pub use lines::{line_incidence, LineIncidenceReport, SegreLine};
pub use poly::{Monomial, MonomialOrder, MultiPoly, PolyRing, MAX_VARS};

/// Where an ideal came from, for replay and dumps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanFingerprint {
    pub prime: u32,
    pub seed: Option<u64>,
    pub rank: usize,
    pub ambient: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactIdeal {
    pub format: Format,
    pub ring: PolyRing,
    pub generators: Vec<MultiPoly>,
    pub fingerprint: SpanFingerprint,
    pub saturated: bool,
}

impl ContactIdeal {
    pub fn field(&self) -> PrimeField {
        self.ring.field
    }

    /// True if every generator vanishes at the decomposable point.
    pub fn vanishes_at(&self, x: &DecomposablePoint) -> bool {
        let point: Vec<u32> = x.vectors.concat();
        self.generators
            .iter()
            .all(|g| g.evaluate(self.field(), &point) == 0)
    }

    /// Exchange format: comment header, then one generator per line as
    /// `c*[e_0,...,e_{N-1}] + ...`, variables in block order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let names: Vec<String> = (0..self.ring.nvars()).map(|v| self.ring.var_name(v)).collect();
        out.push_str(&format!("# format {}\n", self.format));
        out.push_str(&format!("# prime {}\n", self.fingerprint.prime));
        if let Some(seed) = self.fingerprint.seed {
            out.push_str(&format!("# seed {seed}\n"));
        }
        out.push_str(&format!(
            "# span rank {} of {}\n",
            self.fingerprint.rank, self.fingerprint.ambient
        ));
        out.push_str(&format!("# saturated {}\n", self.saturated));
        out.push_str(&format!("# variables {}\n", names.join(" ")));
        for g in &self.generators {
            out.push_str(&g.to_exponent_syntax(&self.ring));
            out.push('\n');
        }
        out
    }
}

fn ring_for(format: &Format, field: PrimeField) -> Result<PolyRing> {
    if format.total_vars() > MAX_VARS {
        return Err(Error::OutOfRegime(format!(
            "contact computations support at most {MAX_VARS} variables, format {format} needs {}",
            format.total_vars()
        )));
    }
    Ok(PolyRing::new(field, format.dims().to_vec(), MonomialOrder::DegRevLex))
}

fn fingerprint(span: &SpanMatrix, seed: Option<u64>) -> SpanFingerprint {
    SpanFingerprint {
        prime: span.field().modulus(),
        seed,
        rank: span.rank(),
        ambient: span.ambient(),
    }
}

/// Generators `ℓ(v_1 ⊗ .. b (slot j) .. ⊗ v_n)`, `(D - rank) * sum a_i` of them.
pub fn tangency_ideal(span: &SpanMatrix, seed: Option<u64>) -> Result<ContactIdeal> {
    if span.rank() >= span.ambient() {
        return Err(Error::SpanFillsAmbient {
            ambient: span.ambient(),
        });
    }
    let format = span.format().clone();
    let ring = ring_for(&format, span.field())?;
    let functionals = span.annihilator();
    let offsets: Vec<usize> = (0..format.n()).map(|i| ring.block_range(i).start).collect();
    let indices: Vec<Vec<usize>> = (0..format.ambient()).map(|f| format.multi_index(f)).collect();
    let mut generators = Vec::new();
    for l in 0..functionals.rows() {
        let ell = functionals.row(l);
        for j in 0..format.n() {
            for b in 0..format.dims()[j] {
                let terms: Vec<(Monomial, u32)> = indices
                    .iter()
                    .enumerate()
                    .filter(|(flat, idx)| idx[j] == b && ell[*flat] != 0)
                    .map(|(flat, idx)| {
                        let mut exps = [0u8; MAX_VARS];
                        for (m, &c) in idx.iter().enumerate() {
                            if m != j {
                                exps[offsets[m] + c] = 1;
                            }
                        }
                        (Monomial::from_exponents(&exps[..ring.nvars()]), ell[flat])
                    })
                    .collect();
                generators.push(MultiPoly::from_terms(&ring, terms));
            }
        }
    }
    Ok(ContactIdeal {
        format,
        ring,
        generators,
        fingerprint: fingerprint(span, seed),
        saturated: false,
    })
}

/// Equations of `X ∩ P(T)`: `ℓ(v_1 ⊗ ... ⊗ v_n)` for each functional `ℓ`.
pub fn span_section_ideal(span: &SpanMatrix, seed: Option<u64>) -> Result<ContactIdeal> {
    let format = span.format().clone();
    let ring = ring_for(&format, span.field())?;
    let functionals = span.annihilator();
    let offsets: Vec<usize> = (0..format.n()).map(|i| ring.block_range(i).start).collect();
    let mut generators = Vec::new();
    for l in 0..functionals.rows() {
        let ell = functionals.row(l);
        let terms: Vec<(Monomial, u32)> = (0..format.ambient())
            .filter(|&flat| ell[flat] != 0)
            .map(|flat| {
                let mut exps = [0u8; MAX_VARS];
                for (m, c) in format.multi_index(flat).into_iter().enumerate() {
                    exps[offsets[m] + c] = 1;
                }
                (Monomial::from_exponents(&exps[..ring.nvars()]), ell[flat])
            })
            .collect();
        generators.push(MultiPoly::from_terms(&ring, terms));
    }
    Ok(ContactIdeal {
        format,
        ring,
        generators,
        fingerprint: fingerprint(span, seed),
        saturated: false,
    })
}

/// `I : (m_1 ... m_n)^∞` where `m_i` is the ideal of the `i`-th variable block.
///
/// For each block a random linear form `h` in that block is made the last
/// variable of a degrevlex order; dividing the Gröbner basis elements by their
/// largest power of `h` gives `I : h^∞`, which equals `I : m_i^∞` unless `h`
/// happens to vanish on a component not inside `{v_i = 0}`. Saturating by one
/// block never un-saturates an earlier one, so one pass over the blocks is enough.
pub fn saturate(ideal: &ContactIdeal, rng: &mut RngState, budget: Budget) -> Result<ContactIdeal> {
    let mut meter = Meter::new(budget);
    saturate_metered(ideal, rng, &mut meter)
}

fn saturate_metered(ideal: &ContactIdeal, rng: &mut RngState, meter: &mut Meter) -> Result<ContactIdeal> {
    let ring = ideal.ring.with_order(MonomialOrder::DegRevLex);
    let field = ring.field;
    let nvars = ring.nvars();
    let mut gens = groebner::groebner_metered(&ring, &ideal.generators, meter)?;
    for block in 0..ring.blocks.len() {
        if is_unit_ideal(&gens) {
            break;
        }
        let range = ring.block_range(block);
        let h = rng.random_vector(field, range.len());
        let pivot = (0..h.len()).rev().find(|&c| h[c] != 0).expect("nonzero form");
        let pv = range.start + pivot;
        // New coordinates: pv is replaced by y = h, and y is moved to the last slot.
        let to_new = |v: usize| if v < pv { v } else { v - 1 };
        let y = nvars - 1;
        let inv = field.inv(h[pivot]);
        let forward: Vec<MultiPoly> = (0..nvars)
            .map(|v| {
                if v != pv {
                    return MultiPoly::monomial(&ring, Monomial::var(to_new(v)), 1);
                }
                // x_pv = (y - sum_{c != pivot} h_c x_c) / h_pivot
                let mut terms = vec![(Monomial::var(y), inv)];
                for (c, &hc) in h.iter().enumerate() {
                    if c != pivot && hc != 0 {
                        terms.push((Monomial::var(to_new(range.start + c)), field.neg(field.mul(hc, inv))));
                    }
                }
                MultiPoly::from_terms(&ring, terms)
            })
            .collect();
        let backward: Vec<MultiPoly> = (0..nvars)
            .map(|w| {
                if w == y {
                    let terms = h
                        .iter()
                        .enumerate()
                        .map(|(c, &hc)| (Monomial::var(range.start + c), hc))
                        .collect();
                    MultiPoly::from_terms(&ring, terms)
                } else {
                    let v = if w < pv { w } else { w + 1 };
                    MultiPoly::monomial(&ring, Monomial::var(v), 1)
                }
            })
            .collect();
        let moved: Vec<MultiPoly> = gens.iter().map(|g| g.substitute_linear(&ring, &forward)).collect();
        let gb = groebner::groebner_metered(&ring, &moved, meter)?;
        let divided: Vec<MultiPoly> = gb
            .iter()
            .map(|g| g.div_var_power(&ring, y, g.min_exponent(y)))
            .collect();
        let back: Vec<MultiPoly> = divided.iter().map(|g| g.substitute_linear(&ring, &backward)).collect();
        gens = groebner::groebner_metered(&ring, &back, meter)?;
    }
    Ok(ContactIdeal {
        format: ideal.format.clone(),
        ring,
        generators: gens,
        fingerprint: ideal.fingerprint.clone(),
        saturated: true,
    })
}

/// Dimension and degree of a multiprojective locus in the Segre embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimDegree {
    /// Projective dimension; -1 for the empty set.
    pub dim: i64,
    pub degree: u64,
    /// `h(t) = dim (R/I)_{(t,...,t)}` for `t = 0, 1, ...`.
    pub hilbert: Vec<u64>,
}

/// Largest `t` tried when fitting the Hilbert polynomial.
const MAX_HILBERT_T: usize = 40;

pub fn dim_degree(ideal: &ContactIdeal, budget: Budget) -> Result<DimDegree> {
    let mut meter = Meter::new(budget);
    dim_degree_metered(ideal, &mut meter)
}

fn dim_degree_metered(ideal: &ContactIdeal, meter: &mut Meter) -> Result<DimDegree> {
    let ring = ideal.ring.with_order(MonomialOrder::DegRevLex);
    let gb = groebner::groebner_metered(&ring, &ideal.generators, meter)?;
    if is_unit_ideal(&gb) {
        return Ok(DimDegree {
            dim: -1,
            degree: 0,
            hilbert: vec![0],
        });
    }
    let leads: Vec<Monomial> = gb.iter().map(|g| *g.leading_monomial().unwrap()).collect();
    // Below this multidegree the staircase is still being shaped by the generators.
    let t_floor = leads
        .iter()
        .flat_map(|m| ring.multidegree(m))
        .max()
        .unwrap_or(0) as usize;
    let max_dim = ring.blocks.iter().map(|b| b - 1).sum::<usize>();
    let mut hilbert: Vec<u64> = Vec::new();
    for t in 0..=MAX_HILBERT_T {
        hilbert.push(count_standard(&ring, &leads, t, meter)?);
        if t < t_floor + 3 {
            continue;
        }
        if let Some((d, deg)) = fit_polynomial(&hilbert, t_floor, max_dim) {
            if d == -1 {
                return Ok(DimDegree {
                    dim: -1,
                    degree: 0,
                    hilbert,
                });
            }
            return Ok(DimDegree {
                dim: d,
                degree: deg,
                hilbert,
            });
        }
    }
    Err(Error::Aborted(format!(
        "Hilbert function did not stabilize by t = {MAX_HILBERT_T}"
    )))
}

/// Smallest `d` whose `(d+1)`-th differences vanish on the last three samples
/// past `t_floor`; returns `(d, Δ^d h)`, or `(-1, 0)` if `h` is eventually zero.
fn fit_polynomial(h: &[u64], t_floor: usize, max_dim: usize) -> Option<(i64, u64)> {
    let vals: Vec<i128> = h.iter().map(|&x| x as i128).collect();
    let n = vals.len();
    if vals[n - 3..].iter().all(|&v| v == 0) {
        return Some((-1, 0));
    }
    let mut diffs = vec![vals];
    for d in 0..=max_dim {
        let next: Vec<i128> = diffs[d].windows(2).map(|w| w[1] - w[0]).collect();
        // Need three vanishing values that only involve samples past t_floor.
        let usable = n.saturating_sub(t_floor + d + 2);
        if usable < 3 {
            return None;
        }
        if next[next.len() - 3..].iter().all(|&v| v == 0) {
            let lead = *diffs[d].last().unwrap();
            return (lead > 0).then_some((d as i64, lead as u64));
        }
        diffs.push(next);
    }
    None
}

/// Number of monomials of multidegree `(t, ..., t)` divisible by no lead.
fn count_standard(ring: &PolyRing, leads: &[Monomial], t: usize, meter: &mut Meter) -> Result<u64> {
    let nblocks = ring.blocks.len();
    let per_block: Vec<Vec<Monomial>> = (0..nblocks)
        .map(|i| block_monomials(ring.block_range(i), t))
        .collect();
    // Leads grouped by the last block they touch, so they can be tested as soon as
    // every block in their support is assigned.
    let mut by_last: Vec<Vec<Monomial>> = vec![Vec::new(); nblocks];
    for m in leads {
        let md = ring.multidegree(m);
        let last = (0..nblocks).rev().find(|&i| md[i] > 0).unwrap_or(0);
        by_last[last].push(*m);
    }
    let mut count = 0u64;
    let mut work = 0usize;
    walk(&per_block, &by_last, 0, Monomial::ONE, &mut count, &mut work);
    meter.charge(work)?;
    Ok(count)
}

fn walk(
    per_block: &[Vec<Monomial>],
    by_last: &[Vec<Monomial>],
    level: usize,
    partial: Monomial,
    count: &mut u64,
    work: &mut usize,
) {
    if level == per_block.len() {
        *count += 1;
        return;
    }
    for b in &per_block[level] {
        let m = partial.mul(b);
        *work += by_last[level].len() + 1;
        if by_last[level].iter().any(|l| l.divides(&m)) {
            continue;
        }
        walk(per_block, by_last, level + 1, m, count, work);
    }
}

fn block_monomials(range: std::ops::Range<usize>, t: usize) -> Vec<Monomial> {
    let vars: Vec<usize> = range.collect();
    let mut out = Vec::new();
    let mut exps = [0u8; MAX_VARS];
    fn rec(vars: &[usize], left: usize, exps: &mut [u8; MAX_VARS], out: &mut Vec<Monomial>) {
        if vars.len() == 1 {
            exps[vars[0]] = left as u8;
            out.push(Monomial::from_exponents(&exps[..]));
            exps[vars[0]] = 0;
            return;
        }
        for e in 0..=left {
            exps[vars[0]] = e as u8;
            rec(&vars[1..], left - e, exps, out);
        }
        exps[vars[0]] = 0;
    }
    rec(&vars, t, &mut exps, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum ContactVerdict {
    /// The saturated locus is exactly the contact points, each reduced.
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactReport {
    pub problem: Problem,
    pub prime: u32,
    pub seed: u64,
    pub span_rank: usize,
    pub expected_rank: usize,
    pub ambient: usize,
    pub generators: usize,
    pub saturated_basis_size: usize,
    pub contact_points_on_locus: bool,
    pub locus: DimDegree,
    pub degree_convention: String,
    pub work: u64,
    pub verdict: ContactVerdict,
}

pub const DEGREE_CONVENTION: &str = "degree in the Segre embedding, with multiplicity";

/// Full condition check at random points: the saturated tangency locus must be
/// empty for `k = 0` and `k` reduced points otherwise.
pub fn contact_check(problem: &Problem, field: PrimeField, rng: &mut RngState, budget: Budget) -> Result<ContactReport> {
    let seed = rng.seed();
    let (span, points) = sample_span(problem, field, rng);
    let ideal = tangency_ideal(&span, Some(seed))?;
    let mut meter = Meter::new(budget);
    let mut sat_rng = rng.child(0);
    let saturated = saturate_metered(&ideal, &mut sat_rng, &mut meter)?;
    let locus = dim_degree_metered(&saturated, &mut meter)?;
    let on_locus = points.iter().all(|x| saturated.vanishes_at(x));
    let pass = if problem.k == 0 {
        locus.dim == -1
    } else {
        locus.dim == 0 && locus.degree == problem.k as u64 && on_locus
    };
    Ok(ContactReport {
        problem: problem.clone(),
        prime: field.modulus(),
        seed,
        span_rank: span.rank(),
        expected_rank: problem.expected_span_dim(),
        ambient: span.ambient(),
        generators: ideal.generators.len(),
        saturated_basis_size: saturated.generators.len(),
        contact_points_on_locus: on_locus,
        locus,
        degree_convention: DEGREE_CONVENTION.into(),
        work: meter.used(),
        verdict: if pass { ContactVerdict::Pass } else { ContactVerdict::Fail },
    })
}

/// Saturated locus of `X ∩ P(T)` with its line decomposition, for `(2,2,2)`-type spans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionReport {
    pub locus: DimDegree,
    pub lines: LineIncidenceReport,
}

pub fn span_section_report(span: &SpanMatrix, rng: &mut RngState, budget: Budget) -> Result<SectionReport> {
    let ideal = span_section_ideal(span, Some(rng.seed()))?;
    let mut meter = Meter::new(budget);
    let saturated = saturate_metered(&ideal, rng, &mut meter)?;
    let locus = dim_degree_metered(&saturated, &mut meter)?;
    let lines = line_incidence(span)?;
    Ok(SectionReport { locus, lines })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segre::terracini_span;

    fn field() -> PrimeField {
        PrimeField::new(32003).unwrap()
    }

    #[test]
    fn single_point_tangency_locus_is_that_point() {
        let p = Problem::plain(vec![2, 2, 2], 1).unwrap();
        let r = contact_check(&p, field(), &mut RngState::new(3), Budget::default()).unwrap();
        assert_eq!((r.locus.dim, r.locus.degree), (0, 1), "{r:?}");
        assert!(r.contact_points_on_locus);
        assert_eq!(r.verdict, ContactVerdict::Pass);
    }

    #[test]
    fn generator_count_and_shape() {
        let p = Problem::new(vec![2, 2, 2], 0, vec![1, 1, 1]).unwrap();
        let mut rng = RngState::new(5);
        let (span, _) = sample_span(&p, field(), &mut rng);
        assert_eq!(span.rank(), 6);
        let ideal = tangency_ideal(&span, None).unwrap();
        assert_eq!(ideal.generators.len(), 12);
        for g in ideal.generators.iter().filter(|g| !g.is_zero()) {
            assert!(g.is_multilinear());
            assert!(g.is_multihomogeneous(&ideal.ring));
        }
    }

    #[test]
    fn generators_vanish_when_a_factor_is_zero() {
        let f = Format::new(vec![2, 2, 3]).unwrap();
        let mut rng = RngState::new(8);
        let x = DecomposablePoint::sample(&f, field(), &mut rng);
        let span = terracini_span(&f, field(), std::slice::from_ref(&x), &[]);
        let ideal = tangency_ideal(&span, None).unwrap();
        assert!(ideal.vanishes_at(&x));
        // zero out factor 2; only generators whose omitted factor is 2 may survive
        let mut point = x.vectors.concat();
        for v in ideal.ring.block_range(1) {
            point[v] = 0;
        }
        for (idx, g) in ideal.generators.iter().enumerate() {
            let omitted = if idx % 7 < 2 { 0 } else if idx % 7 < 4 { 1 } else { 2 };
            if omitted != 1 {
                assert_eq!(g.evaluate(field(), &point), 0);
            }
        }
    }

    #[test]
    fn saturation_removes_coordinate_components() {
        // I = <v1_0 * v2_0> on blocks (2,2,2): saturation keeps it (both factors are
        // genuine hyperplane sections), while <v1_0 * v1_1, v1_0^2, v1_1^2> becomes unit.
        let ring = PolyRing::new(field(), vec![2, 2, 2], MonomialOrder::DegRevLex);
        let format = Format::new(vec![2, 2, 2]).unwrap();
        let fp = SpanFingerprint {
            prime: 32003,
            seed: None,
            rank: 0,
            ambient: 8,
        };
        let principal = ContactIdeal {
            format: format.clone(),
            ring: ring.clone(),
            generators: vec![MultiPoly::monomial(&ring, Monomial::var(0).mul(&Monomial::var(2)), 1)],
            fingerprint: fp.clone(),
            saturated: false,
        };
        let s = saturate(&principal, &mut RngState::new(1), Budget::default()).unwrap();
        assert_eq!(s.generators, principal.generators);
        let dd = dim_degree(&s, Budget::default()).unwrap();
        // two divisors of P1 x P1 x P1 of class (1,0,0) and (0,1,0): dim 2, Segre degree 2 + 2
        assert_eq!((dd.dim, dd.degree), (2, 4));

        let irrelevant = ContactIdeal {
            generators: vec![
                MultiPoly::monomial(&ring, Monomial::from_exponents(&[2, 0]), 1),
                MultiPoly::monomial(&ring, Monomial::from_exponents(&[1, 1]), 1),
                MultiPoly::monomial(&ring, Monomial::from_exponents(&[0, 2]), 1),
            ],
            ..principal
        };
        let s = saturate(&irrelevant, &mut RngState::new(1), Budget::default()).unwrap();
        assert!(is_unit_ideal(&s.generators));
        assert_eq!(dim_degree(&s, Budget::default()).unwrap().dim, -1);
    }

    #[test]
    fn unit_stays_unit() {
        let ring = PolyRing::new(field(), vec![2, 2, 2], MonomialOrder::DegRevLex);
        let ideal = ContactIdeal {
            format: Format::new(vec![2, 2, 2]).unwrap(),
            ring: ring.clone(),
            generators: vec![MultiPoly::monomial(&ring, Monomial::ONE, 1)],
            fingerprint: SpanFingerprint {
                prime: 32003,
                seed: None,
                rank: 0,
                ambient: 8,
            },
            saturated: false,
        };
        let s = saturate(&ideal, &mut RngState::new(1), Budget::default()).unwrap();
        assert!(is_unit_ideal(&s.generators));
    }

    #[test]
    fn whole_segre_has_segre_degree() {
        // zero ideal on (2,2,2): dim 3, degree 3! = 6
        let ring = PolyRing::new(field(), vec![2, 2, 2], MonomialOrder::DegRevLex);
        let ideal = ContactIdeal {
            format: Format::new(vec![2, 2, 2]).unwrap(),
            ring,
            generators: vec![],
            fingerprint: SpanFingerprint {
                prime: 32003,
                seed: None,
                rank: 0,
                ambient: 8,
            },
            saturated: true,
        };
        let dd = dim_degree(&ideal, Budget::default()).unwrap();
        assert_eq!((dd.dim, dd.degree), (3, 6));
    }

    #[test]
    fn dump_has_one_line_per_generator() {
        let p = Problem::plain(vec![2, 2, 2], 1).unwrap();
        let mut rng = RngState::new(2);
        let (span, _) = sample_span(&p, field(), &mut rng);
        let ideal = tangency_ideal(&span, Some(2)).unwrap();
        let dump = ideal.dump();
        let body: Vec<&str> = dump.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body.len(), ideal.generators.len());
        assert!(dump.contains("# variables v1_0 v1_1 v2_0 v2_1 v3_0 v3_1"));
    }
}
