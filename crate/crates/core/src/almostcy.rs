//! Potential, relations, Hilbert series of the almost Calabi-Yau algebra and the Nakayama permutation.

use crate::arith::C64;
use crate::cells::{CellSystem, Triangle};
use crate::error::{Error, Result};
use crate::graphcat::{order_three_automorphisms, permutation_matrix, Graph};
use crate::linalg::{rank, CMat, IMat};
use crate::pathalg::{graded_dimension, hecke_operator, Path, PathSpace};

#[derive(Clone, Debug)]
pub struct Potential {
    pub terms: Vec<(Triangle, C64)>,
}

pub fn potential_from_cells(cs: &CellSystem) -> Potential {
    Potential { terms: cs.triangles.iter().cloned().zip(cs.w.iter().copied()).collect() }
}

/// ρ_a = ∂_a Φ = Σ_{b,c} W(△(a,b,c)) b·c, a combination of length-2 paths from r(a) to s(a).
#[derive(Clone, Debug)]
pub struct Relation {
    pub edge: usize,
    pub terms: Vec<((usize, usize), C64)>,
}

pub fn relations(g: &Graph, pot: &Potential) -> Vec<Relation> {
    let mut out: Vec<Relation> = (0..g.edges.len()).map(|edge| Relation { edge, terms: vec![] }).collect();
    for (t, w) in &pot.terms {
        let [x, y, z] = t.edges;
        let mut rots = vec![(x, y, z), (y, z, x), (z, x, y)];
        rots.dedup();
        if x == y && y == z {
            rots.truncate(1);
        }
        for (a, b, c) in rots {
            if *w != C64::new(0.0, 0.0) {
                out[a].terms.push(((b, c), *w));
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct SpanComparison {
    pub relations: usize,
    pub hecke: usize,
    pub joint: usize,
}

impl SpanComparison {
    pub fn equal(&self) -> bool {
        self.relations == self.hecke && self.hecke == self.joint
    }
}

/// Ranks of span{ρ_a}, Im(U_1) and their sum inside PathSpace(2).
pub fn relations_vs_hecke(cs: &CellSystem, rank_tol: f64) -> Result<SpanComparison> {
    let g = &cs.graph;
    let ps = PathSpace::new(g, 2);
    let rels = relations(g, &potential_from_cells(cs));
    let mut r = CMat::zeros(ps.dim(), rels.len());
    for (col, rel) in rels.iter().enumerate() {
        for &((b, c), w) in &rel.terms {
            let row = ps.index_of(&Path { start: g.edges[b].0, edges: vec![b, c] }).ok_or_else(|| Error::InvalidGraph("relation term is not a path".into()))?;
            r[(row, col)] += w;
        }
    }
    let u = hecke_operator(cs, 2, 1)?.matrix;
    let mut joint = CMat::zeros(ps.dim(), r.ncols() + u.ncols());
    joint.view_mut((0, 0), (ps.dim(), r.ncols())).copy_from(&r);
    joint.view_mut((0, r.ncols()), (ps.dim(), u.ncols())).copy_from(&u);
    Ok(SpanComparison { relations: rank(&r, rank_tol).rank, hecke: rank(&u, rank_tol).rank, joint: rank(&joint, rank_tol).rank })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HilbertSeries {
    /// H^0, H^1, …; entry [src][dst] counts paths src → dst.
    pub coeffs: Vec<IMat>,
    pub terminating: bool,
}

impl HilbertSeries {
    pub fn top_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

fn recursion(delta: &IMat, p_corr: Option<(&IMat, usize)>, max_deg: usize) -> Vec<IMat> {
    let n = delta.nrows();
    let dt = delta.transpose();
    let mut h: Vec<IMat> = vec![IMat::identity(n, n)];
    for p in 1..=max_deg {
        let mut next = delta * &h[p - 1];
        if p >= 2 {
            next -= &dt * &h[p - 2];
        }
        if p >= 3 {
            next += &h[p - 3];
        }
        if let Some((pm, hh)) = p_corr {
            if p == hh {
                next -= pm;
            }
        }
        h.push(next);
    }
    h
}

fn first_negative(h: &[IMat]) -> Option<usize> {
    h.iter().position(|m| m.iter().any(|&x| x < 0))
}

/// Coefficients of (1 − P t^h)/(1 − Δt + Δᵀt² − t³), checked to terminate at degree h−3.
pub fn closed_hilbert_series(g: &Graph, p: &IMat, h: usize) -> Result<HilbertSeries> {
    if h < 3 {
        return Err(Error::InvalidArgument(format!("Coxeter number {h} < 3")));
    }
    let delta = g.adjacency();
    if p.shape() != delta.shape() {
        return Err(Error::DimensionMismatch(format!("P is {:?}, graph has {} vertices", p.shape(), g.len())));
    }
    let mut coeffs = recursion(&delta, Some((p, h)), h + 3);
    if let Some(d) = first_negative(&coeffs) {
        return Err(Error::InconsistentSeries { degree: d, detail: "negative coefficient".into() });
    }
    if let Some(d) = (h - 2..=h + 3).find(|&d| coeffs[d].iter().any(|&x| x != 0)) {
        return Err(Error::InconsistentSeries { degree: d, detail: "series does not terminate at h-3".into() });
    }
    coeffs.truncate(h - 2);
    Ok(HilbertSeries { coeffs, terminating: true })
}

/// Truncated expansion of 1/(1 − Δt + Δᵀt² − t³).
pub fn cy_hilbert_series(g: &Graph, max_deg: usize) -> Result<HilbertSeries> {
    let coeffs = recursion(&g.adjacency(), None, max_deg);
    if let Some(d) = first_negative(&coeffs) {
        return Err(Error::InconsistentSeries { degree: d, detail: "negative coefficient".into() });
    }
    Ok(HilbertSeries { coeffs, terminating: false })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NakayamaPerm {
    pub perm: Vec<usize>,
    /// Power of the rotation P₀ taken from the case table.
    pub power: usize,
}

impl NakayamaPerm {
    pub fn matrix(&self) -> IMat {
        permutation_matrix(&self.perm)
    }

    pub fn is_automorphism(&self, g: &Graph) -> bool {
        let a = g.adjacency();
        (0..a.nrows()).all(|i| (0..a.nrows()).all(|j| a[(i, j)] == a[(self.perm[i], self.perm[j])]))
    }
}

fn compose_power(p: &[usize], e: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..p.len()).collect();
    for _ in 0..e {
        out = out.iter().map(|&i| p[i]).collect();
    }
    out
}

/// Power of P₀ from the case table: P₀² for A, P₀ for E8, P₀^{2m} for D*, identity otherwise.
pub fn nakayama_power(name: &str, h: usize) -> Result<usize> {
    let base = name.trim_end_matches('*');
    let star = name.ends_with('*');
    let family = base.chars().next().ok_or_else(|| Error::InvalidArgument("empty graph name".into()))?;
    let power = match (family, star) {
        ('A', false) => 2,
        ('A', true) | ('D', false) => 0,
        ('D', true) => (2 * h) % 3,
        ('E', false) if base == "E8" => 1,
        ('E', _) => 0,
        _ => return Err(Error::InvalidArgument(format!("{name} is not a catalog graph"))),
    };
    Ok(power)
}

/// ν for a catalog graph. The rotation P₀ is searched among the order-3 automorphisms; the one whose
/// case-table power makes the closed series terminate is taken.
pub fn nakayama_permutation(g: &Graph) -> Result<NakayamaPerm> {
    let h = g.coxeter.ok_or_else(|| Error::InvalidArgument(format!("{} has no Coxeter number", g.name)))? as usize;
    let power = nakayama_power(&g.name, h)?;
    let id: Vec<usize> = (0..g.len()).collect();
    if power == 0 {
        return Ok(NakayamaPerm { perm: id, power });
    }
    for p0 in order_three_automorphisms(g) {
        let perm = compose_power(&p0, power);
        if closed_hilbert_series(g, &permutation_matrix(&perm), h).is_ok() {
            return Ok(NakayamaPerm { perm, power });
        }
    }
    Err(Error::MissingRotation(g.name.clone()))
}

#[derive(Clone, Debug)]
pub struct TopDegreeReport {
    pub degree: usize,
    /// (src, dst, found, expected)
    pub mismatches: Vec<(usize, usize, i64, i64)>,
    pub well_conditioned: bool,
}

impl TopDegreeReport {
    pub fn passes(&self) -> bool {
        self.mismatches.is_empty() && self.well_conditioned
    }
}

fn diff(found: &IMat, expected: &IMat) -> Vec<(usize, usize, i64, i64)> {
    let mut out = Vec::new();
    for i in 0..found.nrows() {
        for j in 0..found.ncols() {
            if found[(i, j)] != expected[(i, j)] {
                out.push((i, j, found[(i, j)], expected[(i, j)]));
            }
        }
    }
    out
}

/// The degree h−3 quotient has a single path class j → ν(j) for every j and nothing else.
pub fn verify_top_degree(cs: &CellSystem, nu: &NakayamaPerm, rank_tol: f64) -> Result<TopDegreeReport> {
    let h = cs.graph.coxeter.ok_or_else(|| Error::InvalidArgument("graph has no Coxeter number".into()))? as usize;
    let top = graded_dimension(cs, h - 3, rank_tol)?;
    Ok(TopDegreeReport { degree: h - 3, mismatches: diff(&top.dims, &nu.matrix()), well_conditioned: top.well_conditioned })
}

#[derive(Clone, Debug)]
pub struct BruteReport {
    /// (degree, src, dst, brute, closed)
    pub mismatches: Vec<(usize, usize, usize, i64, i64)>,
    pub degrees: usize,
    pub well_conditioned: bool,
}

impl BruteReport {
    pub fn passes(&self) -> bool {
        self.mismatches.is_empty() && self.well_conditioned
    }
}

/// Graded quotient dimensions against the closed series, degrees 0..=h (zero expected beyond h−3).
pub fn brute_vs_closed(cs: &CellSystem, nu: &NakayamaPerm, rank_tol: f64) -> Result<BruteReport> {
    let g = &cs.graph;
    let h = g.coxeter.ok_or_else(|| Error::InvalidArgument("graph has no Coxeter number".into()))? as usize;
    let series = closed_hilbert_series(g, &nu.matrix(), h)?;
    let zero = IMat::zeros(g.len(), g.len());
    let mut mismatches = Vec::new();
    let mut well = true;
    for p in 0..=h - 2 {
        let brute = graded_dimension(cs, p, rank_tol)?;
        well &= brute.well_conditioned;
        let expected = series.coeffs.get(p).unwrap_or(&zero);
        mismatches.extend(diff(&brute.dims, expected).into_iter().map(|(i, j, a, b)| (p, i, j, a, b)));
    }
    Ok(BruteReport { mismatches, degrees: h - 1, well_conditioned: well })
}

#[derive(Clone, Debug)]
pub struct EulerReport {
    pub first_failure: Option<usize>,
    pub degrees_checked: usize,
}

/// H(t)·(1 − Δt + Δᵀt² − t³) = 1 − P t^h as integer matrix polynomials.
pub fn resolution_euler_check(g: &Graph, p: &IMat, h: usize, series: &HilbertSeries) -> EulerReport {
    let n = g.len();
    let delta = g.adjacency();
    let dt = delta.transpose();
    let zero = IMat::zeros(n, n);
    let hc = |d: isize| if d < 0 { &zero } else { series.coeffs.get(d as usize).unwrap_or(&zero) };
    let top = series.coeffs.len() + 3;
    let last = top.max(h + 1);
    let first_failure = (0..=last).find(|&d| {
        let d = d as isize;
        let prod = hc(d) - hc(d - 1) * &delta + hc(d - 2) * &dt - hc(d - 3);
        let mut expected = zero.clone();
        if d == 0 {
            expected = IMat::identity(n, n);
        }
        if d as usize == h {
            expected -= p;
        }
        prod != expected
    });
    EulerReport { first_failure, degrees_checked: last + 1 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcat::build_a_graph;

    #[test]
    fn a4_closed_series() {
        let g = build_a_graph(4).unwrap();
        let nu = nakayama_permutation(&g).unwrap();
        let s = closed_hilbert_series(&g, &nu.matrix(), 4).unwrap();
        assert_eq!(s.coeffs, vec![IMat::identity(3, 3), g.adjacency()]);
        assert_eq!(nu.matrix(), g.adjacency());
    }

    #[test]
    fn wrong_permutation_is_inconsistent() {
        let g = build_a_graph(5).unwrap();
        assert!(closed_hilbert_series(&g, &IMat::identity(6, 6), 5).is_err());
    }
}
