//! Path spaces, annihilation and fork operators, Hecke operators and graded quotients.

use std::collections::HashMap;

use crate::arith::{quantum_integer, QRoot, C64};
use crate::cells::CellSystem;
use crate::error::{Error, Result};
use crate::graphcat::{pf_data, Graph};
use crate::linalg::{max_abs, rank, CMat, IMat, RankInfo};

/// Directed paths of a fixed length, in lexicographic order of (start vertex, edge sequence).
#[derive(Clone, Debug)]
pub struct PathSpace {
    pub length: usize,
    pub paths: Vec<Path>,
    index: HashMap<Path, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub start: usize,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn end(&self, g: &Graph) -> usize {
        self.edges.last().map_or(self.start, |&e| g.edges[e].1)
    }
}

impl PathSpace {
    pub fn new(g: &Graph, length: usize) -> Self {
        let mut out_edges = vec![Vec::new(); g.len()];
        for (i, &(s, _)) in g.edges.iter().enumerate() {
            out_edges[s].push(i);
        }
        let mut paths: Vec<Path> = (0..g.len()).map(|v| Path { start: v, edges: vec![] }).collect();
        for _ in 0..length {
            let mut next = Vec::new();
            for p in &paths {
                let end = p.end(g);
                for &e in &out_edges[end] {
                    let mut edges = p.edges.clone();
                    edges.push(e);
                    next.push(Path { start: p.start, edges });
                }
            }
            paths = next;
        }
        paths.sort();
        let index = paths.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        PathSpace { length, paths, index }
    }

    pub fn dim(&self) -> usize {
        self.paths.len()
    }

    pub fn index_of(&self, p: &Path) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Path indices grouped by (source, target).
    pub fn blocks(&self, g: &Graph) -> HashMap<(usize, usize), Vec<usize>> {
        let mut b: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, p) in self.paths.iter().enumerate() {
            b.entry((p.start, p.end(g))).or_default().push(i);
        }
        b
    }
}

/// A linear map between path spaces (or between vertex/edge spaces), as a dense matrix.
#[derive(Clone, Debug)]
pub struct PathOperator {
    pub source_len: usize,
    pub target_len: usize,
    pub matrix: CMat,
}

impl PathOperator {
    pub fn adjoint(&self) -> PathOperator {
        PathOperator { source_len: self.target_len, target_len: self.source_len, matrix: self.matrix.adjoint() }
    }
}

/// Basis of mixed length-2 paths a b̃ (r(a) = r(b)) or ã b (s(a) = s(b)), as edge pairs.
pub fn mixed_pairs(g: &Graph, share_range: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (a, &(sa, ra)) in g.edges.iter().enumerate() {
        for (b, &(sb, rb)) in g.edges.iter().enumerate() {
            if (share_range && ra == rb) || (!share_range && sa == sb) {
                out.push((a, b));
            }
        }
    }
    out
}

/// c_l on a b̃ and c_r on ã b, each mapping to the vertex space.
pub fn annihilation_ops(cs: &CellSystem) -> Result<(PathOperator, PathOperator)> {
    let g = &cs.graph;
    let phi = pf_data(g)?.phi;
    let left = mixed_pairs(g, true);
    let right = mixed_pairs(g, false);
    let mut cl = CMat::zeros(g.len(), left.len());
    for (col, &(a, b)) in left.iter().enumerate() {
        if a == b {
            let (s, r) = g.edges[a];
            cl[(s, col)] = C64::new((phi[r] / phi[s]).sqrt(), 0.0);
        }
    }
    let mut cr = CMat::zeros(g.len(), right.len());
    for (col, &(a, b)) in right.iter().enumerate() {
        if a == b {
            let (s, r) = g.edges[a];
            cr[(r, col)] = C64::new((phi[s] / phi[r]).sqrt(), 0.0);
        }
    }
    Ok((
        PathOperator { source_len: 2, target_len: 0, matrix: cl },
        PathOperator { source_len: 2, target_len: 0, matrix: cr },
    ))
}

#[derive(Clone, Debug)]
pub struct ForkOps {
    /// Reversed edges ã → PathSpace(2).
    pub fork_in: PathOperator,
    /// Edges a → reversed length-2 paths b̃₂b̃₁, indexed by the pair (b₁, b₂).
    pub fork_out: PathOperator,
    pub out_basis: Vec<(usize, usize)>,
}

pub fn fork_ops(cs: &CellSystem) -> Result<ForkOps> {
    let g = &cs.graph;
    let phi = pf_data(g)?.phi;
    let ps = PathSpace::new(g, 2);
    let n_e = g.edges.len();
    let mut fin = CMat::zeros(ps.dim(), n_e);
    let out_basis: Vec<(usize, usize)> = ps.paths.iter().map(|p| (p.edges[0], p.edges[1])).collect();
    let mut fout = CMat::zeros(out_basis.len(), n_e);
    for (a, &(s, r)) in g.edges.iter().enumerate() {
        let norm = (phi[s] * phi[r]).sqrt();
        for (row, &(b1, b2)) in out_basis.iter().enumerate() {
            if g.edges[b1].0 == r && g.edges[b2].1 == s {
                let w = cs.value(a, b1, b2);
                fin[(row, a)] = w / norm;
                fout[(row, a)] = w.conj() / norm;
            }
        }
    }
    Ok(ForkOps {
        fork_in: PathOperator { source_len: 1, target_len: 2, matrix: fin },
        fork_out: PathOperator { source_len: 1, target_len: 2, matrix: fout },
        out_basis,
    })
}

/// U_i on PathSpace(p), acting on edge positions i, i+1 (1-based).
pub fn hecke_operator(cs: &CellSystem, p: usize, i: usize) -> Result<PathOperator> {
    let ps = PathSpace::new(&cs.graph, p);
    hecke_on(cs, &ps, i)
}

pub fn hecke_on(cs: &CellSystem, ps: &PathSpace, i: usize) -> Result<PathOperator> {
    if i == 0 || i >= ps.length {
        return Err(Error::InvalidArgument(format!("U_{i} needs 1 <= i <= {}", ps.length.saturating_sub(1))));
    }
    let bo = BlockOperators::new(cs, ps)?;
    let mut m = CMat::zeros(ps.dim(), ps.dim());
    for (idx, ops) in &bo.blocks {
        let u = &ops[i - 1];
        for (a, &r) in idx.iter().enumerate() {
            for (b, &c) in idx.iter().enumerate() {
                m[(r, c)] = u[(a, b)];
            }
        }
    }
    Ok(PathOperator { source_len: ps.length, target_len: ps.length, matrix: m })
}

/// All U_1..U_{p−1} on PathSpace(p), restricted to each (source, target) block.
#[derive(Clone, Debug)]
pub struct BlockOperators {
    /// ((source, target), global path indices, [U_1, …, U_{p−1}] on that block), sorted by vertex pair.
    pub blocks: Vec<(Vec<usize>, Vec<CMat>)>,
    pub keys: Vec<(usize, usize)>,
}

impl BlockOperators {
    pub fn new(cs: &CellSystem, ps: &PathSpace) -> Result<Self> {
        let g = &cs.graph;
        let p = ps.length;
        let f = fork_ops(cs)?;
        let u2 = &f.fork_in.matrix * f.fork_in.matrix.adjoint();
        let ps2 = PathSpace::new(g, 2);
        let blocks2 = ps2.blocks(g);
        let mut grouped: Vec<((usize, usize), Vec<usize>)> = ps.blocks(g).into_iter().collect();
        grouped.sort();
        let mut local = vec![0; ps.dim()];
        for (_, idx) in &grouped {
            for (a, &i) in idx.iter().enumerate() {
                local[i] = a;
            }
        }
        let mut blocks = Vec::with_capacity(grouped.len());
        let mut keys = Vec::with_capacity(grouped.len());
        for (key, idx) in grouped {
            let ops = (1..p)
                .map(|i| {
                    let mut m = CMat::zeros(idx.len(), idx.len());
                    for (col, &gi) in idx.iter().enumerate() {
                        let path = &ps.paths[gi];
                        let (b1, b2) = (path.edges[i - 1], path.edges[i]);
                        let here = ps2.index_of(&Path { start: g.edges[b1].0, edges: vec![b1, b2] }).unwrap();
                        for &other in &blocks2[&(g.edges[b1].0, g.edges[b2].1)] {
                            let v = u2[(other, here)];
                            if v == C64::new(0.0, 0.0) {
                                continue;
                            }
                            let mut edges = path.edges.clone();
                            edges[i - 1] = ps2.paths[other].edges[0];
                            edges[i] = ps2.paths[other].edges[1];
                            let row = ps.index_of(&Path { start: path.start, edges }).unwrap();
                            m[(local[row], col)] += v;
                        }
                    }
                    m
                })
                .collect();
            keys.push(key);
            blocks.push((idx, ops));
        }
        Ok(BlockOperators { blocks, keys })
    }
}

#[derive(Clone, Debug, Default)]
pub struct HeckeReport {
    pub self_adjoint: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub q_relation: f64,
}

impl HeckeReport {
    pub fn worst(&self) -> f64 {
        self.self_adjoint.max(self.h1).max(self.h2).max(self.h3).max(self.q_relation)
    }
}

/// Residuals of U_i² = [2]U_i, [U_i, U_j] = 0 (|i−j| ≥ 2), U_iU_{i+1}U_i − U_i = U_{i+1}U_iU_{i+1} − U_{i+1},
/// and (U_i − U_{i+2}U_{i+1}U_i + U_{i+1})(U_{i+1}U_{i+2}U_{i+1} − U_{i+1}) = 0, for path lengths up to p_max.
pub fn verify_hecke(cs: &CellSystem, p_max: usize) -> Result<HeckeReport> {
    let g = &cs.graph;
    let m = g.coxeter.ok_or_else(|| Error::InvalidArgument("graph has no Coxeter number".into()))?;
    let delta = QRoot::new(m)?.delta();
    let mut rep = HeckeReport::default();
    for p in 2..=p_max {
        let ps = PathSpace::new(g, p);
        for (_, us) in &BlockOperators::new(cs, &ps)?.blocks {
            check_block(us, delta, &mut rep);
        }
    }
    Ok(rep)
}

fn check_block(us: &[CMat], delta: f64, rep: &mut HeckeReport) {
    for (i, u) in us.iter().enumerate() {
        rep.self_adjoint = rep.self_adjoint.max(max_abs(&(u - u.adjoint())));
        rep.h1 = rep.h1.max(max_abs(&(u * u - u * C64::new(delta, 0.0))));
        for uj in us.iter().skip(i + 2) {
            rep.h2 = rep.h2.max(max_abs(&(u * uj - uj * u)));
        }
        if let Some(v) = us.get(i + 1) {
            let lhs = u * v * u - u;
            let rhs = v * u * v - v;
            rep.h3 = rep.h3.max(max_abs(&(lhs - rhs)));
            if let Some(w) = us.get(i + 2) {
                let a = u - w * v * u + v;
                let b = v * w * v - v;
                rep.q_relation = rep.q_relation.max(max_abs(&(a * b)));
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct GradedDimension {
    /// Entry [src][dst]: dimension of the quotient of the length-p paths src → dst.
    pub dims: IMat,
    pub well_conditioned: bool,
    pub worst_gap: f64,
}

/// Dimensions of PathSpace(p) modulo Σ_l Im(U_l), block by block.
pub fn graded_dimension(cs: &CellSystem, p: usize, rank_tol: f64) -> Result<GradedDimension> {
    let g = &cs.graph;
    let n = g.len();
    let ps = PathSpace::new(g, p);
    let bo = BlockOperators::new(cs, &ps)?;
    let mut dims = IMat::zeros(n, n);
    let mut well = true;
    let mut worst_gap = f64::INFINITY;
    for ((s, t), (idx, us)) in bo.keys.iter().zip(&bo.blocks) {
        let mut r = 0;
        if !us.is_empty() {
            let rows = idx.len();
            let mut cat = CMat::zeros(rows, rows * us.len());
            for (l, u) in us.iter().enumerate() {
                cat.view_mut((0, l * rows), (rows, rows)).copy_from(u);
            }
            let info: RankInfo = rank(&cat, rank_tol);
            well &= info.well_conditioned;
            if info.largest_dropped > 0.0 {
                worst_gap = worst_gap.min(info.smallest_kept / info.largest_dropped);
            }
            r = info.rank;
        }
        dims[(*s, *t)] = (idx.len() - r) as i64;
    }
    Ok(GradedDimension { dims, well_conditioned: well, worst_gap })
}

/// Trace of the Jones-Wenzl idempotent f_(p,l): [p+1][l+1][p+l+2]/[2].
pub fn jw_trace(p: usize, l: usize, m: u32) -> Result<f64> {
    let q = |n: usize| quantum_integer(n as i64, m);
    Ok(q(p + 1)? * q(l + 1)? * q(p + l + 2)? / q(2)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jw_trace_values() {
        assert!((jw_trace(0, 0, 7).unwrap() - 1.0).abs() < 1e-12);
        let q3 = quantum_integer(3, 7).unwrap();
        assert!((jw_trace(1, 0, 7).unwrap() - q3).abs() < 1e-12);
        assert!(jw_trace(2, 3, 7).unwrap().abs() < 1e-12);
    }
}
