//! SU(3) ADE graphs, abelian McKay graphs, nimreps and spectral checks.

use std::collections::{HashMap, VecDeque};
use std::path::{Path, PathBuf};

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{QRoot, C64};
use crate::error::{Error, Result};
use crate::fusion::{
    build_modular_data, chebyshev_family, invariant_catalog, load_invariant, rotation_a, Alcove, FusionRing,
    ModularData, ModularInvariant, Weight,
};
use crate::linalg::{eigenvalues_normal, is_normal, match_multisets, to_complex, IMat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub colour: Option<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub name: String,
    pub coxeter: Option<u32>,
    pub vertices: Vec<Vertex>,
    /// (source, target) vertex indices; parallel edges are distinct entries.
    pub edges: Vec<(usize, usize)>,
    pub star: usize,
}

impl Graph {
    pub fn new(name: &str, coxeter: Option<u32>, vertices: Vec<Vertex>, edges: Vec<(usize, usize)>, star: usize) -> Result<Self> {
        let g = Graph { name: name.into(), coxeter, vertices, edges, star };
        g.validate()?;
        Ok(g)
    }

    pub fn from_adjacency(name: &str, coxeter: Option<u32>, ids: Vec<String>, adj: &IMat) -> Result<Self> {
        let n = adj.nrows();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if adj[(i, j)] < 0 {
                    return Err(Error::InvalidGraph("negative adjacency entry".into()));
                }
                for _ in 0..adj[(i, j)] {
                    edges.push((i, j));
                }
            }
        }
        let vertices = ids.into_iter().map(|id| Vertex { id, colour: None }).collect();
        let mut g = Graph { name: name.into(), coxeter, vertices, edges, star: 0 };
        g.assign_colours();
        g.validate()?;
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn adjacency(&self) -> IMat {
        let n = self.len();
        let mut a = IMat::zeros(n, n);
        for &(s, t) in &self.edges {
            a[(s, t)] += 1;
        }
        a
    }

    pub fn is_coloured(&self) -> bool {
        self.vertices.iter().all(|v| v.colour.is_some())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if n == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        if self.star >= n {
            return Err(Error::InvalidGraph("star vertex out of range".into()));
        }
        let mut seen = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if seen.insert(v.id.as_str(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex id {}", v.id)));
            }
            if let Some(c) = v.colour {
                if c > 2 {
                    return Err(Error::InvalidGraph(format!("colour {c} of vertex {} not in 0..3", v.id)));
                }
            }
        }
        let partial = self.vertices.iter().any(|v| v.colour.is_some()) && !self.is_coloured();
        if partial {
            return Err(Error::InvalidGraph("colours given for some vertices only".into()));
        }
        for &(s, t) in &self.edges {
            if s >= n || t >= n {
                return Err(Error::InvalidGraph("edge endpoint out of range".into()));
            }
            if let (Some(a), Some(b)) = (self.vertices[s].colour, self.vertices[t].colour) {
                if (a + 1) % 3 != b {
                    return Err(Error::InvalidGraph(format!(
                        "edge {} -> {} does not raise the colour",
                        self.vertices[s].id, self.vertices[t].id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sets a 3-colouring with the star coloured 0 when one exists.
    pub fn assign_colours(&mut self) {
        let n = self.len();
        let mut col: Vec<Option<u8>> = vec![None; n];
        col[self.star] = Some(0);
        let mut queue = VecDeque::from([self.star]);
        while let Some(v) = queue.pop_front() {
            let c = col[v].unwrap();
            for &(s, t) in &self.edges {
                let (w, cw) = if s == v { (t, (c + 1) % 3) } else if t == v { (s, (c + 2) % 3) } else { continue };
                if col[w].is_none() {
                    col[w] = Some(cw);
                    queue.push_back(w);
                }
            }
        }
        let ok = col.iter().all(|c| c.is_some())
            && self.edges.iter().all(|&(s, t)| (col[s].unwrap() + 1) % 3 == col[t].unwrap());
        for (v, c) in self.vertices.iter_mut().zip(col) {
            v.colour = if ok { c } else { None };
        }
    }

    pub fn is_strongly_connected(&self) -> bool {
        let n = self.len();
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            seen[0] = true;
            let mut stack = vec![0];
            while let Some(v) = stack.pop() {
                for &(s, t) in &self.edges {
                    let (a, b) = if forward { (s, t) } else { (t, s) };
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
            seen.iter().all(|&x| x)
        };
        reach(true) && reach(false)
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    /// Moves the star to the first vertex of minimal Perron-Frobenius weight.
    pub fn set_star_from_pf(&mut self) -> Result<()> {
        let pf = pf_data(self)?;
        let raw = pf.raw;
        let min = raw.iter().cloned().fold(f64::INFINITY, f64::min);
        self.star = raw.iter().position(|&x| x <= min * (1.0 + 1e-9)).unwrap();
        Ok(())
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            name: self.name.clone(),
            coxeter: self.coxeter,
            vertices: self.vertices.iter().map(|v| VertexJson { id: v.id.clone(), colour: v.colour }).collect(),
            edges: self
                .edges
                .iter()
                .map(|&(s, t)| EdgeJson { src: self.vertices[s].id.clone(), dst: self.vertices[t].id.clone() })
                .collect(),
            star: self.vertices[self.star].id.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: String,
    pub colour: Option<u8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeJson {
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub name: String,
    pub coxeter: Option<u32>,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
    pub star: String,
}

impl GraphJson {
    pub fn to_graph(&self) -> Result<Graph> {
        let vertices: Vec<Vertex> = self.vertices.iter().map(|v| Vertex { id: v.id.clone(), colour: v.colour }).collect();
        let index: HashMap<&str, usize> = self.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let look = |id: &str| index.get(id).copied().ok_or_else(|| Error::InvalidGraph(format!("unknown vertex {id}")));
        let edges = self.edges.iter().map(|e| Ok((look(&e.src)?, look(&e.dst)?))).collect::<Result<Vec<_>>>()?;
        let star = look(&self.star)?;
        Graph::new(&self.name, self.coxeter, vertices, edges, star)
    }
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let js: GraphJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    js.to_graph()
}

pub fn load_graph(path: &Path) -> Result<Graph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

fn weight_id(w: Weight) -> String {
    format!("({},{})", w.l1, w.l2)
}

pub fn build_a_graph(m: u32) -> Result<Graph> {
    if m < 4 {
        return Err(Error::InvalidArgument(format!("A-graphs need m >= 4, got {m}")));
    }
    let alcove = Alcove::new(m as usize - 3);
    let vertices = alcove.weights().iter().map(|w| Vertex { id: weight_id(*w), colour: Some(w.colour()) }).collect();
    let adj = alcove.fundamental_adjacency();
    let mut edges = Vec::new();
    for i in 0..alcove.len() {
        for j in 0..alcove.len() {
            for _ in 0..adj[(i, j)] {
                edges.push((i, j));
            }
        }
    }
    Graph::new(&format!("A{m}"), Some(m), vertices, edges, 0)
}

/// Z3 orbifold of an A-graph: free rotation orbits become single vertices, fixed points split in three.
pub fn orbifold_z3(a_graph: &Graph, k: usize) -> Result<Graph> {
    let alcove = Alcove::new(k);
    if a_graph.len() != alcove.len() {
        return Err(Error::DimensionMismatch(format!("graph {} is not the level-{k} A-graph", a_graph.name)));
    }
    let delta = a_graph.adjacency();
    let mut orbit_of = vec![usize::MAX; alcove.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for (i, w) in alcove.weights().iter().enumerate() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let w1 = rotation_a(*w, k)?;
        let w2 = rotation_a(w1, k)?;
        let mut members: Vec<usize> = [*w, w1, w2].iter().map(|x| alcove.index_of(*x).unwrap()).collect();
        members.sort();
        members.dedup();
        for &j in &members {
            orbit_of[j] = orbits.len();
        }
        orbits.push(members);
    }
    // vertex list: (orbit, copy) with copy = None for free orbits
    let mut verts: Vec<(usize, Option<usize>)> = Vec::new();
    for (o, members) in orbits.iter().enumerate() {
        if members.len() == 1 {
            verts.extend((0..3).map(|c| (o, Some(c))));
        } else {
            verts.push((o, None));
        }
    }
    let n = verts.len();
    let mut adj = IMat::zeros(n, n);
    for (a, &(oa, ca)) in verts.iter().enumerate() {
        let x = orbits[oa][0];
        for (b, &(ob, cb)) in verts.iter().enumerate() {
            let into: i64 = orbits[ob].iter().map(|&y| delta[(x, y)]).sum();
            adj[(a, b)] = match (ca, cb) {
                (None, _) => into,
                (Some(_), None) => {
                    if into % 3 != 0 {
                        return Err(Error::InvalidGraph("fixed-point edges do not split evenly".into()));
                    }
                    into / 3
                }
                (Some(_), Some(_)) => 0,
            };
        }
    }
    let ids = verts
        .iter()
        .map(|&(o, c)| {
            let w = alcove.weight(orbits[o][0]);
            match c {
                None => format!("[{},{}]", w.l1, w.l2),
                Some(c) => format!("[{},{}]#{c}", w.l1, w.l2),
            }
        })
        .collect();
    let m = k as u32 + 3;
    let mut g = Graph::from_adjacency(&format!("D{m}"), Some(m), ids, &adj)?;
    g.set_star_from_pf()?;
    g.assign_colours();
    Ok(g)
}

#[derive(Clone, Debug)]
pub struct PFData {
    pub norm: f64,
    /// Normalised so that phi[star] = 1.
    pub phi: Vec<f64>,
    pub raw: Vec<f64>,
    pub residual: f64,
}

pub fn pf_data(g: &Graph) -> Result<PFData> {
    if !g.is_strongly_connected() {
        return Err(Error::NotConnected);
    }
    let adj = g.adjacency().map(|x| x as f64);
    let sym = &adj + adj.transpose();
    let eig = SymmetricEigen::new(sym);
    let top = (0..eig.eigenvalues.len()).max_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap()).unwrap();
    let mut v: Vec<f64> = eig.eigenvectors.column(top).iter().map(|x| x.abs()).collect();
    let vmax = v.iter().cloned().fold(0.0, f64::max);
    v.iter_mut().for_each(|x| *x /= vmax);
    let dv = nalgebra::DVector::from_vec(v.clone());
    let norm = eig.eigenvalues[top] / 2.0;
    let r1 = (&adj * &dv - &dv * norm).amax();
    let r2 = (adj.transpose() * &dv - &dv * norm).amax();
    let phi: Vec<f64> = v.iter().map(|x| x / v[g.star]).collect();
    Ok(PFData { norm, phi, raw: v, residual: r1.max(r2) })
}

#[derive(Clone, Debug)]
pub struct Nimrep {
    pub alcove: Alcove,
    pub g: Vec<IMat>,
}

impl Nimrep {
    pub fn matrix(&self, w: Weight) -> Option<&IMat> {
        self.alcove.index_of(w).map(|i| &self.g[i])
    }

    /// max |G_λ G_μ − Σ_ν N_{λμ}^ν G_ν|
    pub fn representation_defect(&self, fr: &FusionRing) -> i64 {
        let len = self.g.len();
        let mut worst = 0;
        for l in 0..len {
            for m in 0..len {
                let lhs = &self.g[l] * &self.g[m];
                let mut rhs = IMat::zeros(lhs.nrows(), lhs.ncols());
                for nu in 0..len {
                    let c = fr.coefficient(l, m, nu);
                    if c != 0 {
                        rhs += &self.g[nu] * c;
                    }
                }
                worst = worst.max((lhs - rhs).iter().map(|x| x.abs()).max().unwrap_or(0));
            }
        }
        worst
    }
}

pub fn nimrep_from_graph(g: &Graph, k: usize) -> Result<Nimrep> {
    let pf = pf_data(g)?;
    let alpha = QRoot::new(k as u32 + 3)?.alpha();
    if (pf.norm - alpha).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "graph {} has norm {:.10} but level {k} needs [3]_q = {:.10}",
            g.name, pf.norm, alpha
        )));
    }
    let alcove = Alcove::new(k);
    let mats = chebyshev_family(&alcove, &g.adjacency())?;
    Ok(Nimrep { alcove, g: mats })
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub max_mismatch: f64,
    pub worst_weight: Weight,
}

/// Compares the eigenvalues of each G_λ with S_μλ/S_μ0 over the exponents μ.
pub fn verify_nimrep_spectrum(n: &Nimrep, z: &ModularInvariant, md: &ModularData) -> Result<SpectrumReport> {
    if n.alcove.level() != z.level || md.level() != z.level {
        return Err(Error::DimensionMismatch("nimrep, invariant and modular data levels differ".into()));
    }
    let vertices = n.g[0].nrows();
    let total: i64 = z.trace();
    if total != vertices as i64 {
        return Err(Error::SizeMismatch { vertices, exponents: total as usize });
    }
    let len = n.alcove.len();
    let mut report = SpectrumReport { max_mismatch: 0.0, worst_weight: n.alcove.weight(0) };
    for l in 0..len {
        let mut want = Vec::with_capacity(vertices);
        for mu in 0..len {
            let mult = z.z[(mu, mu)];
            let val: C64 = md.s[(mu, l)] / md.s[(mu, 0)];
            for _ in 0..mult {
                want.push(val);
            }
        }
        let got = eigenvalues_normal(&to_complex(&n.g[l]))?;
        let d = match_multisets(&got, &want).unwrap();
        if d > report.max_mismatch {
            report = SpectrumReport { max_mismatch: d, worst_weight: n.alcove.weight(l) };
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Supertransitivity {
    Exact(usize),
    AtLeast(usize),
}

impl std::fmt::Display for Supertransitivity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Supertransitivity::Exact(k) => write!(f, "{k}"),
            Supertransitivity::AtLeast(k) => write!(f, ">= {k}"),
        }
    }
}

/// Σ_v n_{*,v}(p)² for p = 0..=max_p, exact.
pub fn star_path_norms(g: &Graph, max_p: usize) -> Result<Vec<i64>> {
    let adj = g.adjacency();
    let n = g.len();
    let mut counts = vec![0i64; n];
    counts[g.star] = 1;
    let mut out = Vec::with_capacity(max_p + 1);
    for p in 0..=max_p {
        let mut s = 0i64;
        for &c in &counts {
            s = c.checked_mul(c).and_then(|x| x.checked_add(s)).ok_or_else(|| Error::Overflow(format!("path counts at length {p}")))?;
        }
        out.push(s);
        let mut next = vec![0i64; n];
        for i in 0..n {
            if counts[i] == 0 {
                continue;
            }
            for j in 0..n {
                let add = counts[i].checked_mul(adj[(i, j)]).ok_or_else(|| Error::Overflow("path counts".into()))?;
                next[j] = next[j].checked_add(add).ok_or_else(|| Error::Overflow("path counts".into()))?;
            }
        }
        counts = next;
    }
    Ok(out)
}

pub fn supertransitivity(g: &Graph, max_k: usize) -> Result<Supertransitivity> {
    let m = g.coxeter.ok_or_else(|| Error::InvalidArgument(format!("graph {} has no Coxeter number", g.name)))?;
    let a = build_a_graph(m)?;
    let lhs = star_path_norms(g, max_k)?;
    let rhs = star_path_norms(&a, max_k)?;
    match (0..=max_k).find(|&p| lhs[p] != rhs[p]) {
        Some(p) => Ok(Supertransitivity::Exact(p - 1)),
        None => Ok(Supertransitivity::AtLeast(max_k)),
    }
}

pub fn mckay_graph_abelian(m: usize, n: usize) -> Result<Graph> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("group orders must be positive".into()));
    }
    let idx = |a: usize, b: usize| a * n + b;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for a in 0..m {
        for b in 0..n {
            vertices.push(Vertex { id: format!("({a},{b})"), colour: None });
            edges.push((idx(a, b), idx((a + 1) % m, b)));
            edges.push((idx(a, b), idx(a, (b + n - 1) % n)));
            edges.push((idx(a, b), idx((a + m - 1) % m, (b + 1) % n)));
        }
    }
    Graph::new(&format!("Z{m}xZ{n}"), None, vertices, edges, 0)
}

/// All permutations π with adj[i][j] = target[π i][π j], optionally pinning π(pin.0) = pin.1.
pub fn adjacency_isomorphisms(adj: &IMat, target: &IMat, pin: Option<(usize, usize)>, limit: usize) -> Vec<Vec<usize>> {
    let n = adj.nrows();
    let deg = |m: &IMat, i: usize| {
        let out: i64 = m.row(i).sum();
        let inn: i64 = m.column(i).sum();
        (out, inn, m[(i, i)])
    };
    // order vertices by BFS in the undirected graph for early pruning
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let start = pin.map_or(0, |p| p.0);
    for root in std::iter::once(start).chain(0..n) {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut q = VecDeque::from([root]);
        while let Some(v) = q.pop_front() {
            order.push(v);
            for w in 0..n {
                if !seen[w] && (adj[(v, w)] > 0 || adj[(w, v)] > 0) {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut out = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        pos: usize,
        order: &[usize],
        adj: &IMat,
        target: &IMat,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
        pin: Option<(usize, usize)>,
        deg: &dyn Fn(&IMat, usize) -> (i64, i64, i64),
    ) {
        if out.len() >= limit {
            return;
        }
        if pos == order.len() {
            out.push(map.clone());
            return;
        }
        let v = order[pos];
        for w in 0..adj.nrows() {
            if used[w] || deg(adj, v) != deg(target, w) {
                continue;
            }
            if let Some((a, b)) = pin {
                if v == a && w != b {
                    continue;
                }
            }
            let ok = order[..pos].iter().all(|&u| adj[(u, v)] == target[(map[u], w)] && adj[(v, u)] == target[(w, map[u])]);
            if !ok {
                continue;
            }
            map[v] = w;
            used[w] = true;
            rec(pos + 1, order, adj, target, map, used, out, limit, pin, deg);
            used[w] = false;
            map[v] = usize::MAX;
        }
    }
    rec(0, &order, adj, target, &mut map, &mut used, &mut out, limit, pin, &deg);
    out
}

/// Involution τ fixing the star with τΔτ = Δᵀ.
pub fn conjugation_permutation(g: &Graph) -> Option<Vec<usize>> {
    let adj = g.adjacency();
    let t = adj.transpose();
    adjacency_isomorphisms(&adj, &t, Some((g.star, g.star)), 100_000)
        .into_iter()
        .find(|p| (0..p.len()).all(|i| p[p[i]] == i))
}

/// Automorphisms of order exactly 3.
pub fn order_three_automorphisms(g: &Graph) -> Vec<Vec<usize>> {
    let adj = g.adjacency();
    adjacency_isomorphisms(&adj, &adj, None, 100_000)
        .into_iter()
        .filter(|p| (0..p.len()).any(|i| p[i] != i) && (0..p.len()).all(|i| p[p[p[i]]] == i))
        .collect()
}

pub fn permutation_matrix(p: &[usize]) -> IMat {
    let n = p.len();
    let mut m = IMat::zeros(n, n);
    for (i, &j) in p.iter().enumerate() {
        m[(i, j)] = 1;
    }
    m
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub graph: Graph,
    pub level: usize,
    /// Name of the paired modular invariant.
    pub invariant: String,
    pub source: String,
    pub hash: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestGraph {
    pub name: String,
    pub file: String,
    pub sha256: String,
    pub level: usize,
    pub invariant: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestInvariant {
    pub name: String,
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestCells {
    pub graph: String,
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub graphs: Vec<ManifestGraph>,
    #[serde(default)]
    pub invariants: Vec<ManifestInvariant>,
    #[serde(default)]
    pub cells: Vec<ManifestCells>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug)]
pub struct ValidationResult {
    pub name: String,
    pub vertices: usize,
    pub exponents: i64,
    pub normal: bool,
    pub norm_error: f64,
    pub spectrum_mismatch: Option<f64>,
    pub error: Option<String>,
}

impl ValidationResult {
    pub fn validated(&self, tol: f64) -> bool {
        self.error.is_none() && self.normal && self.norm_error < tol && self.spectrum_mismatch.is_some_and(|d| d < tol)
    }
}

#[derive(Debug)]
pub struct GraphCatalog {
    pub entries: Vec<CatalogEntry>,
    pub data_dir: Option<PathBuf>,
    pub cells: Vec<ManifestCells>,
    pub extra_invariants: Vec<ModularInvariant>,
    cache: std::sync::Mutex<HashMap<String, ValidationResult>>,
}

impl GraphCatalog {
    /// The constructed families A^(m), D^(m) for 4 ≤ m ≤ 12.
    pub fn builtin() -> Result<Self> {
        let mut entries = Vec::new();
        for m in 4..=12u32 {
            let k = m as usize - 3;
            let a = build_a_graph(m)?;
            if m >= 5 {
                let d = orbifold_z3(&a, k)?;
                entries.push(CatalogEntry { graph: d, level: k, invariant: "D".into(), source: "orbifold".into(), hash: None });
            }
            entries.push(CatalogEntry { graph: a, level: k, invariant: "A".into(), source: "alcove".into(), hash: None });
        }
        entries.sort_by_key(|e| (e.graph.name.starts_with('D'), e.graph.coxeter));
        Ok(GraphCatalog { entries, data_dir: None, cells: vec![], extra_invariants: vec![], cache: Default::default() })
    }

    /// Built-in families plus the graphs and invariants listed in `<dir>/manifest.json`.
    pub fn load(dir: &Path) -> Result<Self> {
        let mut cat = Self::builtin()?;
        cat.data_dir = Some(dir.to_path_buf());
        let text = std::fs::read_to_string(dir.join("manifest.json"))?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("manifest: {e}")))?;
        for inv in &manifest.invariants {
            let path = dir.join(&inv.file);
            check_hash(&path, &inv.sha256)?;
            let z = load_invariant(&path)?;
            cat.extra_invariants.push(z);
        }
        cat.cells = manifest.cells.clone();
        for mg in &manifest.graphs {
            let path = dir.join(&mg.file);
            let hash = check_hash(&path, &mg.sha256)?;
            let graph = load_graph(&path)?;
            if graph.name != mg.name {
                return Err(Error::InvalidGraph(format!("{} declares name {}", mg.file, graph.name)));
            }
            cat.entries.push(CatalogEntry {
                graph,
                level: mg.level,
                invariant: mg.invariant.clone(),
                source: mg.file.clone(),
                hash: Some(hash),
            });
        }
        Ok(cat)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.graph.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.graph.name == name)
    }

    pub fn graph(&self, name: &str) -> Option<&Graph> {
        self.get(name).map(|e| &e.graph)
    }

    pub fn invariant(&self, name: &str, level: usize) -> Result<ModularInvariant> {
        if let Some(z) = self.extra_invariants.iter().find(|z| z.name == name && z.level == level) {
            return Ok(z.clone());
        }
        let cat = invariant_catalog(level)?;
        if let Some(z) = cat.get(name) {
            return Ok(z.clone());
        }
        // names deduplicated away at small levels
        let d = ModularInvariant::orbifold(level);
        match name {
            "A" => Ok(ModularInvariant::identity(level)),
            "A*" => Ok(ModularInvariant::conjugation(level)),
            "D" => Ok(d),
            "D*" => Ok(d.times_conjugation("D*")),
            _ => Err(Error::InvalidArgument(format!("no invariant {name} at level {level}"))),
        }
    }

    pub fn validate(&self, name: &str) -> Result<ValidationResult> {
        let entry = self.get(name).ok_or_else(|| Error::InvalidArgument(format!("unknown graph {name}")))?;
        let key = format!("{}:{}", name, entry.hash.clone().unwrap_or_else(|| entry.source.clone()));
        if let Some(r) = self.cache.lock().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let r = validate_entry(self, entry);
        self.cache.lock().unwrap().insert(key, r.clone());
        Ok(r)
    }
}

/// Errors when `path` is a manifest-listed cell file whose content hash differs from the pinned one.
pub fn check_pinned_cells(cat: &GraphCatalog, path: &Path) -> Result<()> {
    let Some(dir) = &cat.data_dir else { return Ok(()) };
    let Ok(canon) = path.canonicalize() else { return Ok(()) };
    for c in &cat.cells {
        if dir.join(&c.file).canonicalize().is_ok_and(|p| p == canon) {
            check_hash(path, &c.sha256)?;
        }
    }
    Ok(())
}

fn check_hash(path: &Path, want: &str) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let got = sha256_hex(&bytes);
    if got != want {
        return Err(Error::InvalidGraph(format!("{} has hash {got}, manifest pins {want}", path.display())));
    }
    Ok(got)
}

fn validate_entry(cat: &GraphCatalog, e: &CatalogEntry) -> ValidationResult {
    let g = &e.graph;
    let mut r = ValidationResult {
        name: g.name.clone(),
        vertices: g.len(),
        exponents: 0,
        normal: is_normal(&g.adjacency()),
        norm_error: f64::INFINITY,
        spectrum_mismatch: None,
        error: None,
    };
    let run = |r: &mut ValidationResult| -> Result<()> {
        let pf = pf_data(g)?;
        r.norm_error = (pf.norm - QRoot::new(e.level as u32 + 3)?.alpha()).abs();
        let z = cat.invariant(&e.invariant, e.level)?;
        r.exponents = z.trace();
        let md = build_modular_data(e.level)?;
        let nim = nimrep_from_graph(g, e.level)?;
        r.spectrum_mismatch = Some(verify_nimrep_spectrum(&nim, &z, &md)?.max_mismatch);
        Ok(())
    };
    if let Err(err) = run(&mut r) {
        r.error = Some(err.to_string());
    }
    r
}
