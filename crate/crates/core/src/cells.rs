//! Ocneanu cell systems: storage, frame equations, gauge action and a numerical solver.

use std::collections::HashMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::arith::{QRoot, C64};
use crate::error::{Error, Result};
use crate::graphcat::{pf_data, Graph};

/// A closed length-3 loop, stored with its smallest edge index first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangle {
    pub edges: [usize; 3],
}

impl Triangle {
    pub fn canonical(a: usize, b: usize, c: usize) -> Self {
        let rots = [[a, b, c], [b, c, a], [c, a, b]];
        Triangle { edges: *rots.iter().min().unwrap() }
    }
}

pub fn enumerate_triangles(g: &Graph) -> Vec<Triangle> {
    let out_edges = edges_from(g);
    let mut out = Vec::new();
    for (a, &(s, r)) in g.edges.iter().enumerate() {
        for &b in &out_edges[r] {
            for &c in &out_edges[g.edges[b].1] {
                if g.edges[c].1 == s && a <= b && a <= c {
                    let t = Triangle::canonical(a, b, c);
                    if t.edges == [a, b, c] {
                        out.push(t);
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn edges_from(g: &Graph) -> Vec<Vec<usize>> {
    let mut v = vec![Vec::new(); g.len()];
    for (i, &(s, _)) in g.edges.iter().enumerate() {
        v[s].push(i);
    }
    v
}

fn edges_between(g: &Graph) -> HashMap<(usize, usize), Vec<usize>> {
    let mut m: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, &e) in g.edges.iter().enumerate() {
        m.entry(e).or_default().push(i);
    }
    m
}

#[derive(Clone, Debug)]
pub struct CellSystem {
    pub graph: Graph,
    pub triangles: Vec<Triangle>,
    pub w: Vec<C64>,
    index: HashMap<Triangle, usize>,
}

impl CellSystem {
    pub fn zeros(graph: &Graph) -> Self {
        let triangles = enumerate_triangles(graph);
        let index = triangles.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let w = vec![C64::new(0.0, 0.0); triangles.len()];
        CellSystem { graph: graph.clone(), triangles, w, index }
    }

    pub fn from_values(graph: &Graph, w: Vec<C64>) -> Result<Self> {
        let mut cs = Self::zeros(graph);
        if w.len() != cs.triangles.len() {
            return Err(Error::DimensionMismatch(format!("{} values for {} triangles", w.len(), cs.triangles.len())));
        }
        cs.w = w;
        Ok(cs)
    }

    pub fn triangle_index(&self, a: usize, b: usize, c: usize) -> Option<usize> {
        self.index.get(&Triangle::canonical(a, b, c)).copied()
    }

    /// W(△^{(a,b,c)}), zero when (a,b,c) is not a closed loop.
    pub fn value(&self, a: usize, b: usize, c: usize) -> C64 {
        self.triangle_index(a, b, c).map_or(C64::new(0.0, 0.0), |i| self.w[i])
    }

    pub fn conjugate(&self) -> Self {
        let mut cs = self.clone();
        cs.w.iter_mut().for_each(|z| *z = z.conj());
        cs
    }

    pub fn to_file(&self) -> CellFile {
        CellFile {
            graph: self.graph.name.clone(),
            cells: self
                .triangles
                .iter()
                .zip(&self.w)
                .map(|(t, z)| CellEntry { edges: t.edges, re: z.re, im: z.im })
                .collect(),
        }
    }

    pub fn from_file(graph: &Graph, file: &CellFile) -> Result<Self> {
        if file.graph != graph.name {
            return Err(Error::InvalidArgument(format!("cells are for {}, graph is {}", file.graph, graph.name)));
        }
        let mut cs = Self::zeros(graph);
        for c in &file.cells {
            let [a, b, d] = c.edges;
            let i = cs
                .triangle_index(a, b, d)
                .ok_or_else(|| Error::InvalidArgument(format!("edges {:?} do not form a triangle", c.edges)))?;
            cs.w[i] = C64::new(c.re, c.im);
        }
        Ok(cs)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellEntry {
    pub edges: [usize; 3],
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellFile {
    pub graph: String,
    pub cells: Vec<CellEntry>,
}

pub fn load_cells(path: &Path) -> Result<CellFile> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// One monomial c · Π W or conj(W) over triangle indices.
#[derive(Clone, Debug)]
struct Term {
    coef: f64,
    factors: Vec<(usize, bool)>,
}

#[derive(Clone, Debug)]
struct Frame {
    terms: Vec<Term>,
    rhs: f64,
}

impl Frame {
    fn eval(&self, w: &[C64]) -> C64 {
        let mut acc = C64::new(-self.rhs, 0.0);
        for t in &self.terms {
            let mut p = C64::new(t.coef, 0.0);
            for &(i, conj) in &t.factors {
                p *= if conj { w[i].conj() } else { w[i] };
            }
            acc += p;
        }
        acc
    }
}

/// The type I and type II frame equations of a graph, with Perron-Frobenius data folded in.
#[derive(Clone, Debug)]
pub struct FrameEquations {
    type_i: Vec<Frame>,
    type_ii: Vec<Frame>,
    n_cells: usize,
}

impl FrameEquations {
    pub fn new(g: &Graph) -> Result<Self> {
        let m = g.coxeter.ok_or_else(|| Error::InvalidArgument(format!("graph {} has no Coxeter number", g.name)))?;
        let delta = QRoot::new(m)?.delta();
        let phi = pf_data(g)?.phi;
        let cs = CellSystem::zeros(g);
        let tri = |a: usize, b: usize, c: usize| cs.triangle_index(a, b, c);
        let out = edges_from(g);
        let between = edges_between(g);
        let e = &g.edges;
        let mut type_i = Vec::new();
        for (a, &(s, r)) in e.iter().enumerate() {
            for &a2 in &between[&(s, r)] {
                let mut terms = Vec::new();
                for &b1 in &out[r] {
                    let k = e[b1].1;
                    for &b2 in between.get(&(k, s)).map(|v| v.as_slice()).unwrap_or(&[]) {
                        if let (Some(t1), Some(t2)) = (tri(a, b1, b2), tri(a2, b1, b2)) {
                            terms.push(Term { coef: 1.0, factors: vec![(t1, false), (t2, true)] });
                        }
                    }
                }
                let rhs = if a == a2 { delta * phi[s] * phi[r] } else { 0.0 };
                type_i.push(Frame { terms, rhs });
            }
        }
        let mut into: Vec<Vec<usize>> = vec![Vec::new(); g.len()];
        for (i, &(_, t)) in e.iter().enumerate() {
            into[t].push(i);
        }
        let none: &[usize] = &[];
        let mut type_ii = Vec::new();
        for (a, &(i, j)) in e.iter().enumerate() {
            for &a2 in &into[j] {
                let i2 = e[a2].0;
                for &x in &out[i] {
                    let l = e[x].1;
                    for &y in between.get(&(i2, l)).map(|v| v.as_slice()).unwrap_or(none) {
                        let mut terms = Vec::new();
                        for &b1 in &out[j] {
                            let k = e[b1].1;
                            let b2s = between.get(&(k, i)).map(|v| v.as_slice()).unwrap_or(none);
                            let c1s = between.get(&(k, i2)).map(|v| v.as_slice()).unwrap_or(none);
                            let es = between.get(&(l, k)).map(|v| v.as_slice()).unwrap_or(none);
                            for &b2 in b2s {
                                for &c1 in c1s {
                                    for &ee in es {
                                        let ts = (tri(a, b1, b2), tri(a2, b1, c1), tri(ee, c1, y), tri(ee, b2, x));
                                        if let (Some(t1), Some(t2), Some(t3), Some(t4)) = ts {
                                            terms.push(Term {
                                                coef: 1.0 / phi[k],
                                                factors: vec![(t1, false), (t2, true), (t3, false), (t4, true)],
                                            });
                                        }
                                    }
                                }
                            }
                        }
                        let mut rhs = 0.0;
                        if a == a2 && x == y {
                            rhs += phi[i] * phi[j] * phi[l];
                        }
                        if x == a && y == a2 {
                            rhs += phi[i] * phi[i2] * phi[j];
                        }
                        type_ii.push(Frame { terms, rhs });
                    }
                }
            }
        }
        Ok(FrameEquations { type_i, type_ii, n_cells: cs.triangles.len() })
    }

    pub fn type_i_count(&self) -> usize {
        self.type_i.len()
    }

    pub fn type_ii_count(&self) -> usize {
        self.type_ii.len()
    }

    fn all(&self) -> impl Iterator<Item = &Frame> {
        self.type_i.iter().chain(self.type_ii.iter())
    }

    pub fn type_i_residual(&self, w: &[C64]) -> f64 {
        self.type_i.iter().map(|f| f.eval(w).norm()).fold(0.0, f64::max)
    }

    pub fn type_ii_residual(&self, w: &[C64]) -> f64 {
        self.type_ii.iter().map(|f| f.eval(w).norm()).fold(0.0, f64::max)
    }

    fn residual_vector(&self, x: &DVector<f64>) -> DVector<f64> {
        let w = unpack(x, self.n_cells);
        let frames: Vec<&Frame> = self.all().collect();
        let mut r = DVector::zeros(2 * frames.len());
        for (i, f) in frames.iter().enumerate() {
            let v = f.eval(&w);
            r[2 * i] = v.re;
            r[2 * i + 1] = v.im;
        }
        r
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let w = unpack(x, self.n_cells);
        let frames: Vec<&Frame> = self.all().collect();
        let n = self.n_cells;
        let mut jac = DMatrix::zeros(2 * frames.len(), 2 * n);
        for (row, f) in frames.iter().enumerate() {
            for t in &f.terms {
                for (pos, &(cell, conj)) in t.factors.iter().enumerate() {
                    let mut rest = C64::new(t.coef, 0.0);
                    for (q, &(c2, cj2)) in t.factors.iter().enumerate() {
                        if q != pos {
                            rest *= if cj2 { w[c2].conj() } else { w[c2] };
                        }
                    }
                    // d/dRe and d/dIm of W or conj(W)
                    let d_re = rest;
                    let d_im = rest * if conj { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) };
                    jac[(2 * row, cell)] += d_re.re;
                    jac[(2 * row + 1, cell)] += d_re.im;
                    jac[(2 * row, n + cell)] += d_im.re;
                    jac[(2 * row + 1, n + cell)] += d_im.im;
                }
            }
        }
        jac
    }
}

fn unpack(x: &DVector<f64>, n: usize) -> Vec<C64> {
    (0..n).map(|i| C64::new(x[i], x[n + i])).collect()
}

#[derive(Clone, Debug)]
pub struct FrameReport {
    pub max_residual: f64,
    pub frames: usize,
}

pub fn verify_type_i(cs: &CellSystem) -> Result<FrameReport> {
    let eq = FrameEquations::new(&cs.graph)?;
    Ok(FrameReport { max_residual: eq.type_i_residual(&cs.w), frames: eq.type_i_count() })
}

pub fn verify_type_ii(cs: &CellSystem) -> Result<FrameReport> {
    let eq = FrameEquations::new(&cs.graph)?;
    Ok(FrameReport { max_residual: eq.type_ii_residual(&cs.w), frames: eq.type_ii_count() })
}

/// max of the type I and type II residuals
pub fn combined_residual(cs: &CellSystem) -> Result<f64> {
    let eq = FrameEquations::new(&cs.graph)?;
    Ok(eq.type_i_residual(&cs.w).max(eq.type_ii_residual(&cs.w)))
}

/// W(△(a,b,c)) ↦ u_a u_b u_c W(△(a,b,c))
pub fn gauge_transform(cs: &CellSystem, phases: &[C64]) -> Result<CellSystem> {
    if phases.len() != cs.graph.edges.len() {
        return Err(Error::DimensionMismatch(format!("{} phases for {} edges", phases.len(), cs.graph.edges.len())));
    }
    if let Some(u) = phases.iter().find(|u| (u.norm() - 1.0).abs() > 1e-12) {
        return Err(Error::InvalidArgument(format!("phase {u} is not of unit modulus")));
    }
    let mut out = cs.clone();
    for (t, z) in out.triangles.iter().zip(out.w.iter_mut()) {
        *z *= phases[t.edges[0]] * phases[t.edges[1]] * phases[t.edges[2]];
    }
    Ok(out)
}

/// Greedy gauge fixing: each triangle that still owns an unfixed edge is rotated to be real positive.
pub fn canonical_gauge(cs: &CellSystem) -> CellSystem {
    let mut fixed = vec![false; cs.graph.edges.len()];
    let mut phases = vec![C64::new(1.0, 0.0); cs.graph.edges.len()];
    let mut current = cs.w.clone();
    for (ti, t) in cs.triangles.iter().enumerate() {
        let z = current[ti];
        if z.norm() < 1e-12 {
            continue;
        }
        let Some(&e) = t.edges.iter().find(|&&e| !fixed[e]) else { continue };
        let mult = t.edges.iter().filter(|&&x| x == e).count() as f64;
        let u = C64::from_polar(1.0, -z.arg() / mult);
        phases[e] = u;
        fixed[e] = true;
        for (tj, t2) in cs.triangles.iter().enumerate() {
            let c = t2.edges.iter().filter(|&&x| x == e).count() as i32;
            if c > 0 {
                current[tj] *= u.powi(c);
            }
        }
    }
    gauge_transform(cs, &phases).expect("unit phases")
}

/// Integer vectors n over triangles with Σ_t n_t·(multiplicity of e in t) = 0 for every edge.
pub fn gauge_invariant_cycles(cs: &CellSystem) -> Vec<Vec<i64>> {
    let rows = cs.graph.edges.len();
    let cols = cs.triangles.len();
    let mut m = vec![vec![0i64; cols]; rows];
    for (j, t) in cs.triangles.iter().enumerate() {
        for &e in &t.edges {
            m[e][j] += 1;
        }
    }
    integer_kernel(m, cols)
}

fn integer_kernel(mut m: Vec<Vec<i64>>, cols: usize) -> Vec<Vec<i64>> {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| m[r][col] != 0) else { continue };
        m.swap(row, p);
        for r in 0..m.len() {
            if r != row && m[r][col] != 0 {
                let (a, b) = (m[row][col], m[r][col]);
                let pivot = m[row].clone();
                for (x, &y) in m[r].iter_mut().zip(&pivot) {
                    *x = *x * a - y * b;
                }
                let g = m[r].iter().fold(0, |g, &x| gcd(g, x));
                if g > 1 {
                    m[r].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for &f in &free {
        let l = pivots.iter().enumerate().fold(1i64, |l, (r, _)| {
            let d = m[r][pivots[r]].abs();
            l / gcd(l, d) * d
        });
        let mut v = vec![0i64; cols];
        v[f] = l;
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -m[r][f] * l / m[r][p];
        }
        let g = v.iter().fold(0, |g, &x| gcd(g, x));
        out.push(v.into_iter().map(|x| x / g.max(1)).collect());
    }
    out
}

/// Moduli of all cells followed by the phases of the gauge-invariant products, in [0, 2π).
pub fn gauge_invariants(cs: &CellSystem) -> (Vec<f64>, Vec<f64>) {
    let moduli = cs.w.iter().map(|z| z.norm()).collect();
    let phases = gauge_invariant_cycles(cs)
        .iter()
        .map(|n| {
            let a: f64 = n.iter().zip(&cs.w).map(|(&k, z)| k as f64 * z.arg()).sum();
            a.rem_euclid(2.0 * std::f64::consts::PI)
        })
        .collect();
    (moduli, phases)
}

/// Whether two cell systems on the same graph lie in one gauge orbit. Without parallel edges the
/// gauge group is a torus and the cell moduli and cycle phases decide this; otherwise the orbit
/// distance is minimized over unitary changes of basis on each class of parallel edges.
pub fn gauge_equivalent(a: &CellSystem, b: &CellSystem, tol: f64) -> bool {
    if a.w.len() != b.w.len() {
        return false;
    }
    if has_parallel_edges(&a.graph) {
        return gauge_orbit_distance(a, b, 20, 0) < tol;
    }
    let (ma, pa) = gauge_invariants(a);
    let (mb, pb) = gauge_invariants(b);
    let two_pi = 2.0 * std::f64::consts::PI;
    ma.iter().zip(&mb).all(|(x, y)| (x - y).abs() < tol)
        && pa.iter().zip(&pb).all(|(x, y)| {
            let d = (x - y).rem_euclid(two_pi);
            d.min(two_pi - d) < tol
        })
}

fn has_parallel_edges(g: &Graph) -> bool {
    let mut seen = std::collections::HashSet::new();
    !g.edges.iter().all(|e| seen.insert(*e))
}

/// Edges grouped by (source, range).
pub fn parallel_classes(g: &Graph) -> Vec<Vec<usize>> {
    let mut map: std::collections::BTreeMap<(usize, usize), Vec<usize>> = Default::default();
    for (i, &e) in g.edges.iter().enumerate() {
        map.entry(e).or_default().push(i);
    }
    map.into_values().collect()
}

/// W(a,b,c) ↦ Σ u_{aa'} u_{bb'} u_{cc'} W(a',b',c'), where u is block diagonal over parallel classes.
pub fn unitary_gauge_transform(cs: &CellSystem, u: &DMatrix<C64>) -> Result<CellSystem> {
    let n = cs.graph.edges.len();
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::DimensionMismatch(format!("gauge matrix {}x{} for {n} edges", u.nrows(), u.ncols())));
    }
    let classes = parallel_classes(&cs.graph);
    let mut class_of = vec![0; n];
    for (ci, c) in classes.iter().enumerate() {
        c.iter().for_each(|&e| class_of[e] = ci);
    }
    let mut out = cs.clone();
    for (t, z) in cs.triangles.iter().zip(out.w.iter_mut()) {
        let [a, b, c] = t.edges;
        let mut acc = C64::new(0.0, 0.0);
        for &a2 in &classes[class_of[a]] {
            for &b2 in &classes[class_of[b]] {
                for &c2 in &classes[class_of[c]] {
                    acc += u[(a, a2)] * u[(b, b2)] * u[(c, c2)] * cs.value(a2, b2, c2);
                }
            }
        }
        *z = acc;
    }
    Ok(out)
}

fn gauge_from_params(classes: &[Vec<usize>], n: usize, x: &DVector<f64>) -> DMatrix<C64> {
    let mut u = DMatrix::<C64>::zeros(n, n);
    let mut k = 0;
    for c in classes {
        let d = c.len();
        let mut h = DMatrix::<C64>::zeros(d, d);
        for i in 0..d {
            h[(i, i)] = C64::new(x[k], 0.0);
            k += 1;
            for j in i + 1..d {
                h[(i, j)] = C64::new(x[k], x[k + 1]);
                h[(j, i)] = C64::new(x[k], -x[k + 1]);
                k += 2;
            }
        }
        let eig = h.symmetric_eigen();
        let diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, l)));
        let block = &eig.eigenvectors * diag * eig.eigenvectors.adjoint();
        for (i, &ei) in c.iter().enumerate() {
            for (j, &ej) in c.iter().enumerate() {
                u[(ei, ej)] = block[(i, j)];
            }
        }
    }
    u
}

/// Smallest max-norm distance between b and a unitary gauge transform of a found by local search.
pub fn gauge_orbit_distance(a: &CellSystem, b: &CellSystem, restarts: usize, seed: u64) -> f64 {
    let classes = parallel_classes(&a.graph);
    let n = a.graph.edges.len();
    let dim: usize = classes.iter().map(|c| c.len() * c.len()).sum();
    let residual = |x: &DVector<f64>| {
        let u = gauge_from_params(&classes, n, x);
        let t = unitary_gauge_transform(a, &u).expect("square gauge");
        DVector::from_iterator(2 * t.w.len(), t.w.iter().zip(&b.w).flat_map(|(p, q)| [(p - q).re, (p - q).im]))
    };
    let jacobian = |x: &DVector<f64>| {
        let r0 = residual(x);
        let mut j = DMatrix::zeros(r0.len(), x.len());
        for k in 0..x.len() {
            let mut xp = x.clone();
            xp[k] += 1e-7;
            j.set_column(k, &((residual(&xp) - &r0) / 1e-7));
        }
        j
    };
    let mut best = f64::INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts.max(1) {
        let x0 = DVector::from_fn(dim, |_, _| std::f64::consts::PI * Distribution::<f64>::sample(&StandardNormal, &mut rng));
        let (_, res) = levenberg_marquardt(residual, jacobian, x0, 1e-12, 200);
        best = best.min(res);
        if best < 1e-9 {
            break;
        }
    }
    best
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub seed: u64,
    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { seed: 0, restarts: 50, tol: 1e-10, max_iter: 400 }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub cells: CellSystem,
    pub residual: f64,
    pub restarts_used: usize,
}

fn levenberg_marquardt(
    residual: impl Fn(&DVector<f64>) -> DVector<f64>,
    jacobian: impl Fn(&DVector<f64>) -> DMatrix<f64>,
    mut x: DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> (DVector<f64>, f64) {
    let mut r = residual(&x);
    let mut cost = r.norm_squared();
    let mut mu = 1e-3;
    for _ in 0..max_iter {
        if r.amax() < tol {
            break;
        }
        let j = jacobian(&x);
        let jt = j.transpose();
        let jtj = &jt * &j;
        let g = &jt * &r;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += mu * jtj[(i, i)].max(1e-9);
            }
            let Some(ch) = a.cholesky() else {
                mu *= 10.0;
                continue;
            };
            let step = ch.solve(&(-&g));
            let xn = &x + &step;
            let rn = residual(&xn);
            let cn = rn.norm_squared();
            if cn < cost {
                x = xn;
                r = rn;
                cost = cn;
                mu = (mu / 3.0).max(1e-15);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    let res = r.amax();
    (x, res)
}

pub fn solve_cells(g: &Graph, opts: SolveOptions) -> Result<SolveOutcome> {
    let eq = FrameEquations::new(g)?;
    let n = eq.n_cells;
    if n == 0 {
        return Err(Error::InvalidArgument(format!("graph {} has no triangles", g.name)));
    }
    let mut best: Option<(f64, DVector<f64>)> = None;
    for restart in 0..opts.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(restart as u64));
        let x0 = DVector::from_fn(2 * n, |_, _| StandardNormal.sample(&mut rng));
        let (x, res) = levenberg_marquardt(|x| eq.residual_vector(x), |x| eq.jacobian(x), x0, opts.tol * 1e-2, opts.max_iter);
        if best.as_ref().is_none_or(|(b, _)| res < *b) {
            best = Some((res, x));
        }
        if res < opts.tol {
            let cells = canonical_gauge(&CellSystem::from_values(g, unpack(&best.unwrap().1, n))?);
            let residual = eq.type_i_residual(&cells.w).max(eq.type_ii_residual(&cells.w));
            return Ok(SolveOutcome { cells, residual, restarts_used: restart + 1 });
        }
    }
    Err(Error::NoConvergence { best: best.map_or(f64::INFINITY, |b| b.0), restarts: opts.restarts.max(1) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcat::build_a_graph;

    #[test]
    fn triangle_canonical_rotation() {
        assert_eq!(Triangle::canonical(5, 2, 7).edges, [2, 7, 5]);
        assert_eq!(Triangle::canonical(1, 1, 1).edges, [1, 1, 1]);
    }

    #[test]
    fn kernel_of_small_matrix() {
        let k = integer_kernel(vec![vec![1, 1, 0], vec![0, 1, 1]], 3);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert_eq!(v[0] + v[1], 0);
        assert_eq!(v[1] + v[2], 0);
    }

    #[test]
    fn gauge_rejects_non_unit_phase() {
        let g = build_a_graph(4).unwrap();
        let cs = CellSystem::zeros(&g);
        assert!(gauge_transform(&cs, &[C64::new(2.0, 0.0); 3]).is_err());
    }
}
