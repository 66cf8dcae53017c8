//! SU(3)_k alcove, modular data, fusion ring and modular invariants.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arith::{root_of_unity, C64};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, to_complex, CMat, IMat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight {
    pub l1: usize,
    pub l2: usize,
}

impl Weight {
    pub const fn new(l1: usize, l2: usize) -> Self {
        Weight { l1, l2 }
    }

    pub fn colour(&self) -> u8 {
        ((self.l1 + 2 * self.l2) % 3) as u8
    }

    /// Triality class λ1 − λ2 mod 3.
    pub fn triality(&self) -> usize {
        (self.l1 + 2 * self.l2) % 3
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.l1, self.l2)
    }
}

pub fn conjugate(mu: Weight) -> Weight {
    Weight::new(mu.l2, mu.l1)
}

pub fn rotation_a(mu: Weight, k: usize) -> Result<Weight> {
    if mu.l1 + mu.l2 > k {
        return Err(Error::OutsideAlcove(mu.l1 as i64, mu.l2 as i64, k));
    }
    Ok(Weight::new(k - mu.l1 - mu.l2, mu.l1))
}

fn rotate_n(mu: Weight, k: usize, n: usize) -> Weight {
    (0..n % 3).fold(mu, |w, _| Weight::new(k - w.l1 - w.l2, w.l1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Alcove {
    level: usize,
    weights: Vec<Weight>,
    index: HashMap<Weight, usize>,
}

impl Alcove {
    pub fn new(k: usize) -> Self {
        let mut weights = Vec::with_capacity((k + 1) * (k + 2) / 2);
        for a in 0..=k {
            for b in 0..=k - a {
                weights.push(Weight::new(a, b));
            }
        }
        let index = weights.iter().enumerate().map(|(i, w)| (*w, i)).collect();
        Alcove { level: k, weights, index }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> Weight {
        self.weights[i]
    }

    pub fn index_of(&self, w: Weight) -> Option<usize> {
        self.index.get(&w).copied()
    }

    fn idx(&self, l1: i64, l2: i64) -> Option<usize> {
        if l1 < 0 || l2 < 0 {
            return None;
        }
        self.index_of(Weight::new(l1 as usize, l2 as usize))
    }

    pub fn conjugation_matrix(&self) -> IMat {
        let n = self.len();
        let mut c = IMat::zeros(n, n);
        for (i, w) in self.weights.iter().enumerate() {
            c[(i, self.index[&conjugate(*w)])] = 1;
        }
        c
    }

    /// Adjacency of adding a weight of the fundamental representation.
    pub fn fundamental_adjacency(&self) -> IMat {
        let n = self.len();
        let mut d = IMat::zeros(n, n);
        for (i, w) in self.weights.iter().enumerate() {
            let (a, b) = (w.l1 as i64, w.l2 as i64);
            for (x, y) in [(a + 1, b), (a - 1, b + 1), (a, b - 1)] {
                if let Some(j) = self.idx(x, y) {
                    d[(i, j)] += 1;
                }
            }
        }
        d
    }
}

pub fn build_alcove(k: usize) -> Alcove {
    Alcove::new(k)
}

/// 3·⟨x, y⟩ in Dynkin coordinates.
fn ip3(x: (i64, i64), y: (i64, i64)) -> i64 {
    2 * x.0 * y.0 + x.0 * y.1 + x.1 * y.0 + 2 * x.1 * y.1
}

fn weyl_orbit(v: (i64, i64)) -> [((i64, i64), i64); 6] {
    let s1 = |(a, b): (i64, i64)| (-a, a + b);
    let s2 = |(a, b): (i64, i64)| (a + b, -b);
    [
        (v, 1),
        (s1(v), -1),
        (s2(v), -1),
        (s1(s2(v)), 1),
        (s2(s1(v)), 1),
        (s1(s2(s1(v))), -1),
    ]
}

#[derive(Clone, Debug)]
pub struct ModularData {
    pub alcove: Alcove,
    pub s: CMat,
    /// Diagonal of T.
    pub t: Vec<C64>,
}

#[derive(Clone, Debug, Default)]
pub struct ModularChecks {
    pub unitarity: f64,
    pub symmetry: f64,
    pub min_vacuum_row: f64,
    pub vacuum_dominance: f64,
    pub st_cubed: f64,
    pub s_squared_conjugation: f64,
}

impl ModularChecks {
    pub fn worst(&self) -> f64 {
        self.unitarity.max(self.symmetry).max(self.st_cubed).max(self.s_squared_conjugation).max(self.vacuum_dominance)
    }
}

pub fn build_modular_data(k: usize) -> Result<ModularData> {
    if k == 0 {
        return Err(Error::InvalidArgument("level must be at least 1".into()));
    }
    let alcove = Alcove::new(k);
    let n = alcove.len();
    let h = (k + 3) as i64;
    let shifted: Vec<(i64, i64)> = alcove.weights().iter().map(|w| (w.l1 as i64 + 1, w.l2 as i64 + 1)).collect();
    let mut s = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut z = C64::new(0.0, 0.0);
            for (wv, sign) in weyl_orbit(shifted[i]) {
                z += root_of_unity(-ip3(wv, shifted[j]), 3 * h) * sign as f64;
            }
            s[(i, j)] = z;
        }
    }
    let phase = s[(0, 0)].conj() / s[(0, 0)].norm();
    let row0: f64 = (0..n).map(|j| s[(0, j)].norm_sqr()).sum::<f64>().sqrt();
    s *= phase / row0;
    let t = alcove
        .weights()
        .iter()
        .map(|w| {
            let x = (w.l1 as i64, w.l2 as i64);
            let x2 = (x.0 + 2, x.1 + 2);
            root_of_unity(ip3(x, x2) - 2 * k as i64, 6 * h)
        })
        .collect();
    Ok(ModularData { alcove, s, t })
}

impl ModularData {
    pub fn level(&self) -> usize {
        self.alcove.level()
    }

    pub fn t_matrix(&self) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_vec(self.t.clone()))
    }

    pub fn checks(&self) -> ModularChecks {
        let n = self.alcove.len();
        let s = &self.s;
        let id = CMat::identity(n, n);
        let st = s * self.t_matrix();
        let s2 = s * s;
        let min_row = (0..n).map(|i| s[(i, 0)].re).fold(f64::INFINITY, f64::min);
        let dominance = (0..n)
            .map(|i| (s[(0, 0)].re - s[(i, 0)].re).max(0.0) + s[(i, 0)].im.abs())
            .fold(0.0, f64::max);
        ModularChecks {
            unitarity: max_abs(&(s * s.adjoint() - &id)),
            symmetry: max_abs(&(s - s.transpose())),
            min_vacuum_row: min_row,
            vacuum_dominance: dominance,
            st_cubed: max_abs(&(&st * &st * &st - &s2)),
            s_squared_conjugation: max_abs(&(s2 - to_complex(&self.alcove.conjugation_matrix()))),
        }
    }

    pub fn to_json(&self) -> ModularDataJson {
        let n = self.alcove.len();
        ModularDataJson {
            level: self.level(),
            order: self.alcove.weights().iter().map(|w| [w.l1, w.l2]).collect(),
            s_re: (0..n).map(|i| (0..n).map(|j| self.s[(i, j)].re).collect()).collect(),
            s_im: (0..n).map(|i| (0..n).map(|j| self.s[(i, j)].im).collect()).collect(),
            t_phase: self.t.iter().map(|z| z.arg().rem_euclid(2.0 * std::f64::consts::PI)).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModularDataJson {
    pub level: usize,
    pub order: Vec<[usize; 2]>,
    #[serde(rename = "S_re")]
    pub s_re: Vec<Vec<f64>>,
    #[serde(rename = "S_im")]
    pub s_im: Vec<Vec<f64>>,
    #[serde(rename = "T_phase")]
    pub t_phase: Vec<f64>,
}

/// G_λ for every λ in the alcove from G_(1,0) = g, G_(0,1) = gᵀ.
pub fn chebyshev_family(alcove: &Alcove, g: &IMat) -> Result<Vec<IMat>> {
    let k = alcove.level() as i64;
    let n = g.nrows();
    let mut out: Vec<Option<IMat>> = vec![None; alcove.len()];
    let at = |l1: i64, l2: i64| alcove.idx(l1, l2).filter(|_| l1 + l2 <= k);
    let zero = IMat::zeros(n, n);
    out[0] = Some(IMat::identity(n, n));
    if k >= 1 {
        out[at(1, 0).unwrap()] = Some(g.clone());
        out[at(0, 1).unwrap()] = Some(g.transpose());
    }
    let get = |out: &Vec<Option<IMat>>, l1: i64, l2: i64| -> IMat {
        at(l1, l2).and_then(|i| out[i].clone()).unwrap_or_else(|| zero.clone())
    };
    let check = |m: &IMat, l1: i64, l2: i64| -> Result<()> {
        if m.iter().any(|&x| x < 0) {
            return Err(Error::NegativeEntry(format!("({l1},{l2})")));
        }
        Ok(())
    };
    let g10 = g.clone();
    let g01 = g.transpose();
    for d in 1..k {
        for p in (0..=d).rev() {
            let l = d - p;
            let m = &g10 * get(&out, p, l) - get(&out, p, l - 1) - get(&out, p - 1, l + 1);
            check(&m, p + 1, l)?;
            out[at(p + 1, l).unwrap()] = Some(m);
        }
        let m = &g01 * get(&out, 0, d) - get(&out, 1, d - 1);
        check(&m, 0, d + 1)?;
        out[at(0, d + 1).unwrap()] = Some(m);
    }
    Ok(out.into_iter().map(|m| m.unwrap()).collect())
}

#[derive(Clone, Debug)]
pub struct FusionRing {
    pub alcove: Alcove,
    pub n: Vec<IMat>,
}

impl FusionRing {
    pub fn matrix(&self, w: Weight) -> Option<&IMat> {
        self.alcove.index_of(w).map(|i| &self.n[i])
    }

    /// N_{λμ}^ν
    pub fn coefficient(&self, l: usize, m: usize, nu: usize) -> i64 {
        self.n[m][(l, nu)]
    }

    pub fn max_entry(&self) -> i64 {
        self.n.iter().flat_map(|m| m.iter().copied()).max().unwrap_or(0)
    }

    /// max over λ, μ of |N_λ N_μ − Σ_ν N_{λμ}^ν N_ν|
    pub fn associativity_defect(&self) -> i64 {
        let len = self.n.len();
        let mut worst = 0;
        for l in 0..len {
            for m in 0..len {
                let lhs = &self.n[l] * &self.n[m];
                let mut rhs = IMat::zeros(lhs.nrows(), lhs.ncols());
                for nu in 0..len {
                    let c = self.coefficient(l, m, nu);
                    if c != 0 {
                        rhs += &self.n[nu] * c;
                    }
                }
                worst = worst.max((lhs - rhs).iter().map(|x| x.abs()).max().unwrap_or(0));
            }
        }
        worst
    }
}

pub fn fusion_matrices(k: usize) -> Result<FusionRing> {
    if k == 0 {
        return Err(Error::InvalidArgument("level must be at least 1".into()));
    }
    let alcove = Alcove::new(k);
    let n = chebyshev_family(&alcove, &alcove.fundamental_adjacency())?;
    Ok(FusionRing { alcove, n })
}

/// max over λ of ‖N_λ − Σ_σ (S_σλ / S_σ0) S_σ S_σ*‖_max
pub fn verify_verlinde(md: &ModularData, fr: &FusionRing) -> Result<f64> {
    let n = md.alcove.len();
    if fr.alcove.len() != n || fr.n.iter().any(|m| m.nrows() != n) {
        return Err(Error::DimensionMismatch(format!("modular data has {n} weights, fusion ring {}", fr.alcove.len())));
    }
    let s = &md.s;
    let mut worst = 0.0f64;
    for l in 0..n {
        let mut acc = CMat::zeros(n, n);
        for sig in 0..n {
            let col = s.column(sig);
            let c = s[(sig, l)] / s[(sig, 0)];
            acc += (col * col.adjoint()) * c;
        }
        worst = worst.max(max_abs(&(to_complex(&fr.n[l]) - acc)));
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModularInvariant {
    pub name: String,
    pub level: usize,
    pub z: IMat,
}

#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub name: String,
    pub s_residual: f64,
    pub t_residual: f64,
    pub vacuum_ok: bool,
    pub nonnegative: bool,
}

impl InvariantReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.s_residual < tol && self.t_residual < tol && self.vacuum_ok && self.nonnegative
    }
}

pub fn verify_invariant(z: &ModularInvariant, md: &ModularData) -> Result<InvariantReport> {
    let n = md.alcove.len();
    if z.z.nrows() != n || z.z.ncols() != n {
        return Err(Error::DimensionMismatch(format!("invariant is {}x{}, alcove has {n} weights", z.z.nrows(), z.z.ncols())));
    }
    let zc = to_complex(&z.z);
    let t = md.t_matrix();
    Ok(InvariantReport {
        name: z.name.clone(),
        s_residual: max_abs(&(&zc * &md.s - &md.s * &zc)),
        t_residual: max_abs(&(&zc * &t - &t * &zc)),
        vacuum_ok: z.z[(0, 0)] == 1,
        nonnegative: z.z.iter().all(|&x| x >= 0),
    })
}

pub fn exponents(z: &ModularInvariant) -> Vec<(Weight, i64)> {
    let alcove = Alcove::new(z.level);
    (0..alcove.len()).filter(|&i| z.z[(i, i)] > 0).map(|i| (alcove.weight(i), z.z[(i, i)])).collect()
}

impl ModularInvariant {
    pub fn identity(k: usize) -> Self {
        let n = Alcove::new(k).len();
        ModularInvariant { name: "A".into(), level: k, z: IMat::identity(n, n) }
    }

    pub fn conjugation(k: usize) -> Self {
        ModularInvariant { name: "A*".into(), level: k, z: Alcove::new(k).conjugation_matrix() }
    }

    pub fn orbifold(k: usize) -> Self {
        let alcove = Alcove::new(k);
        let n = alcove.len();
        let mut z = IMat::zeros(n, n);
        if !k.is_multiple_of(3) {
            for (i, w) in alcove.weights().iter().enumerate() {
                let e = (k as i64 * (w.l1 as i64 - w.l2 as i64)).rem_euclid(3) as usize;
                z[(i, alcove.index_of(rotate_n(*w, k, e)).unwrap())] = 1;
            }
        } else {
            for w in alcove.weights().iter().filter(|w| w.triality() == 0) {
                for i in 0..3 {
                    for j in 0..3 {
                        let a = alcove.index_of(rotate_n(*w, k, i)).unwrap();
                        let b = alcove.index_of(rotate_n(*w, k, j)).unwrap();
                        z[(a, b)] += 1;
                    }
                }
            }
            z /= 3;
        }
        ModularInvariant { name: "D".into(), level: k, z }
    }

    pub fn times_conjugation(&self, name: &str) -> Self {
        let c = Alcove::new(self.level).conjugation_matrix();
        ModularInvariant { name: name.into(), level: self.level, z: &self.z * c }
    }

    /// Σ mult · (Σ_{μ∈left} χ_μ)(Σ_{ν∈right} χ_ν)*
    pub fn from_blocks(name: &str, k: usize, blocks: &[(Vec<Weight>, Vec<Weight>, i64)]) -> Result<Self> {
        let alcove = Alcove::new(k);
        let n = alcove.len();
        let mut z = IMat::zeros(n, n);
        let look = |w: &Weight| alcove.index_of(*w).ok_or(Error::OutsideAlcove(w.l1 as i64, w.l2 as i64, k));
        for (left, right, mult) in blocks {
            for a in left {
                for b in right {
                    z[(look(a)?, look(b)?)] += mult;
                }
            }
        }
        Ok(ModularInvariant { name: name.into(), level: k, z })
    }

    pub fn trace(&self) -> i64 {
        self.z.trace()
    }
}

fn e8_blocks() -> Vec<Vec<Weight>> {
    let w = Weight::new;
    vec![
        vec![w(0, 0), w(2, 2)],
        vec![w(0, 2), w(3, 2)],
        vec![w(2, 0), w(2, 3)],
        vec![w(2, 1), w(0, 5)],
        vec![w(3, 0), w(0, 3)],
        vec![w(1, 2), w(5, 0)],
    ]
}

pub fn e8_invariant() -> ModularInvariant {
    let p = e8_blocks();
    let blocks: Vec<_> = p.iter().map(|b| (b.clone(), b.clone(), 1)).collect();
    ModularInvariant::from_blocks("E8", 5, &blocks).unwrap()
}

pub fn e8_star_invariant() -> ModularInvariant {
    let p = e8_blocks();
    let pairs = [(0, 0), (1, 2), (2, 1), (3, 5), (4, 4), (5, 3)];
    let blocks: Vec<_> = pairs.iter().map(|&(l, r)| (p[l].clone(), p[r].clone(), 1)).collect();
    ModularInvariant::from_blocks("E8*", 5, &blocks).unwrap()
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub invariants: Vec<ModularInvariant>,
    /// Candidates dropped because they failed verification, with their worst residual.
    pub rejected: Vec<(String, f64)>,
}

impl Catalog {
    pub fn get(&self, name: &str) -> Option<&ModularInvariant> {
        self.invariants.iter().find(|z| z.name == name)
    }
}

pub fn invariant_catalog(k: usize) -> Result<Catalog> {
    let md = build_modular_data(k)?;
    let d = ModularInvariant::orbifold(k);
    let d_star = d.times_conjugation("D*");
    let mut candidates = vec![ModularInvariant::identity(k), ModularInvariant::conjugation(k), d, d_star];
    if k == 5 {
        candidates.push(e8_invariant());
        candidates.push(e8_star_invariant());
    }
    let mut invariants: Vec<ModularInvariant> = Vec::new();
    let mut rejected = Vec::new();
    for z in candidates {
        let r = verify_invariant(&z, &md)?;
        if !r.passes(1e-8) {
            rejected.push((z.name.clone(), r.s_residual.max(r.t_residual)));
        } else if !invariants.iter().any(|y| y.z == z.z) {
            invariants.push(z);
        }
    }
    Ok(Catalog { invariants, rejected })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockJson {
    pub left: Vec<[usize; 2]>,
    pub right: Vec<[usize; 2]>,
    #[serde(default = "one")]
    pub mult: i64,
}

fn one() -> i64 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvariantJson {
    pub name: String,
    pub level: usize,
    #[serde(default)]
    pub blocks: Vec<BlockJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
}

impl InvariantJson {
    pub fn to_invariant(&self) -> Result<ModularInvariant> {
        if let Some(rows) = &self.matrix {
            let n = Alcove::new(self.level).len();
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::DimensionMismatch(format!("invariant {} needs {n}x{n} entries", self.name)));
            }
            return Ok(ModularInvariant {
                name: self.name.clone(),
                level: self.level,
                z: IMat::from_fn(n, n, |i, j| rows[i][j]),
            });
        }
        let conv = |v: &Vec<[usize; 2]>| v.iter().map(|p| Weight::new(p[0], p[1])).collect::<Vec<_>>();
        let blocks: Vec<_> = self.blocks.iter().map(|b| (conv(&b.left), conv(&b.right), b.mult)).collect();
        ModularInvariant::from_blocks(&self.name, self.level, &blocks)
    }
}

impl ModularInvariant {
    pub fn to_json(&self) -> InvariantJson {
        let n = self.z.nrows();
        InvariantJson {
            name: self.name.clone(),
            level: self.level,
            blocks: vec![],
            matrix: Some((0..n).map(|i| (0..n).map(|j| self.z[(i, j)]).collect()).collect()),
        }
    }
}

pub fn load_invariant(path: &Path) -> Result<ModularInvariant> {
    let text = std::fs::read_to_string(path)?;
    let js: InvariantJson = serde_json::from_str(&text)?;
    js.to_invariant()
}
