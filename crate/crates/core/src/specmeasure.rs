//! Spectral measures on the discoid and the torus, moments, cubic inversion and quadrature.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::arith::C64;
use crate::error::{Error, Result};
use crate::graphcat::Graph;
use crate::linalg::{eigen_normal, to_complex};

const MERGE_TOL: f64 = 1e-9;

/// Φ(ω₁, ω₂) = ω₁ + ω₂⁻¹ + ω₁⁻¹ω₂.
pub fn phi_map(w1: C64, w2: C64) -> C64 {
    w1 + w2.inv() + w1.inv() * w2
}

/// J² = 27 − 18zz̄ + 4z³ + 4z̄³ − z²z̄².
pub fn jacobian_sq(z: C64) -> f64 {
    let zz = z.norm_sqr();
    27.0 - 18.0 * zz + 8.0 * (z * z * z).re - zz * zz
}

pub fn in_discoid(z: C64, tol: f64) -> bool {
    jacobian_sq(z) >= -tol && z.norm() <= 3.0 + tol
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Discoid(C64),
    Torus(C64, C64),
}

impl Point {
    pub fn z(&self) -> C64 {
        match *self {
            Point::Discoid(z) => z,
            Point::Torus(a, b) => phi_map(a, b),
        }
    }

    fn distance(&self, other: &Point) -> f64 {
        match (self, other) {
            (Point::Discoid(a), Point::Discoid(b)) => (a - b).norm(),
            (Point::Torus(a1, a2), Point::Torus(b1, b2)) => (a1 - b1).norm().max((a2 - b2).norm()),
            _ => f64::INFINITY,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Discoid,
    Torus,
}

#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    pub domain: Domain,
    pub atoms: Vec<(Point, f64)>,
}

impl DiscreteMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    /// Adds the weights of atoms closer than the merge tolerance.
    pub fn merged(mut self) -> Self {
        let mut out: Vec<(Point, f64)> = Vec::new();
        for (p, w) in self.atoms.drain(..) {
            match out.iter_mut().find(|(q, _)| q.distance(&p) < MERGE_TOL) {
                Some((_, acc)) => *acc += w,
                None => out.push((p, w)),
            }
        }
        DiscreteMeasure { domain: self.domain, atoms: out }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Vacuum spectral measure of Δ: eigenvalues weighted by |⟨e_*, v⟩|².
pub fn vacuum_measure_discoid(g: &Graph) -> Result<DiscreteMeasure> {
    let (vals, vecs) = eigen_normal(&to_complex(&g.adjacency()))?;
    let atoms = vals.iter().enumerate().map(|(i, &z)| (Point::Discoid(z), vecs[(g.star, i)].norm_sqr())).collect();
    Ok(DiscreteMeasure { domain: Domain::Discoid, atoms }.merged())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    /// values[m][n] = ς_{m,n}
    pub values: Vec<Vec<C64>>,
}

impl MomentTable {
    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.values[m][n]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.values.len(), self.values.first().map_or(0, |r| r.len()))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let (a, b) = self.shape();
        let k = a.min(b);
        let mut worst = 0.0f64;
        for m in 0..k {
            for n in 0..k {
                worst = worst.max((self.values[n][m] - self.values[m][n].conj()).norm());
            }
        }
        worst
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,n,re,im\n");
        for (m, row) in self.values.iter().enumerate() {
            for (n, v) in row.iter().enumerate() {
                s.push_str(&format!("{m},{n},{:.12e},{:.12e}\n", v.re, v.im));
            }
        }
        s
    }
}

fn table_from(points: impl Iterator<Item = (C64, f64)> + Clone, max_m: usize, max_n: usize) -> MomentTable {
    let mut values = vec![vec![C64::new(0.0, 0.0); max_n + 1]; max_m + 1];
    for (z, w) in points {
        let zb = z.conj();
        let mut zm = C64::new(w, 0.0);
        for row in values.iter_mut() {
            let mut t = zm;
            for v in row.iter_mut() {
                *v += t;
                t *= zb;
            }
            zm *= z;
        }
    }
    MomentTable { values }
}

/// ς[m][n] = Σ w·z^m z̄^n, torus atoms taken through Φ.
pub fn moments(mu: &DiscreteMeasure, max_m: usize, max_n: usize) -> MomentTable {
    table_from(mu.atoms.iter().map(|(p, w)| (p.z(), *w)), max_m, max_n)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassJson {
    pub size: u64,
    pub chi_re: f64,
    pub chi_im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassData {
    pub group: String,
    pub order: u64,
    pub classes: Vec<ClassJson>,
}

impl ClassData {
    pub fn validate(&self) -> Result<()> {
        let total: u64 = self.classes.iter().map(|c| c.size).sum();
        if total != self.order {
            return Err(Error::InvalidArgument(format!("class sizes sum to {total}, order is {}", self.order)));
        }
        if let Some(c) = self.classes.iter().find(|c| C64::new(c.chi_re, c.chi_im).norm() > 3.0 + 1e-9) {
            return Err(Error::InvalidArgument(format!("|χ| > 3 on a class of size {}", c.size)));
        }
        let has_identity = self.classes.iter().any(|c| c.size == 1 && (C64::new(c.chi_re, c.chi_im) - 3.0).norm() < 1e-9);
        if !has_identity {
            return Err(Error::InvalidArgument("no class with χ = 3".into()));
        }
        Ok(())
    }
}

pub fn load_class_data(path: &Path) -> Result<ClassData> {
    let cd: ClassData = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    cd.validate()?;
    Ok(cd)
}

/// ς[m][n] = Σ_j (|Γ_j|/|Γ|) χ(Γ_j)^m conj(χ(Γ_j))^n.
pub fn subgroup_moments(cd: &ClassData, max_m: usize, max_n: usize) -> Result<MomentTable> {
    cd.validate()?;
    let order = cd.order as f64;
    let pts: Vec<(C64, f64)> = cd.classes.iter().map(|c| (C64::new(c.chi_re, c.chi_im), c.size as f64 / order)).collect();
    Ok(table_from(pts.into_iter(), max_m, max_n))
}

fn cubic(w: C64, z: C64) -> C64 {
    w * w * w - z * w * w + z.conj() * w - 1.0
}

/// The roots ω^{(0)}, ω^{(1)}, ω^{(2)} of ω³ − zω² + z̄ω − 1 = 0 by the radical formula, with P
/// the cube root of argument in [0, 2π/3).
pub fn cubic_inverse(z: C64) -> Result<[C64; 3]> {
    let j2 = jacobian_sq(z);
    if !in_discoid(z, 1e-9) {
        return Err(Error::InvalidArgument(format!("{z} lies outside the discoid (J² = {j2:.3e})")));
    }
    let j = j2.max(0.0).sqrt();
    let zz = z.norm_sqr();
    let c = z * z - 3.0 * z.conj();
    let cube = |s: f64| {
        let p3 = C64::new(27.0 - 9.0 * zz + 3.0 * 3f64.sqrt() * s * j, 0.0) + 2.0 * z * z * z;
        let r = p3.norm().cbrt();
        let arg = p3.arg().rem_euclid(2.0 * PI) / 3.0;
        C64::from_polar(r, arg)
    };
    let mut p = cube(1.0);
    if p.norm() < 1e-6 {
        p = cube(-1.0);
    }
    let cr = 2f64.cbrt();
    let mut roots = [C64::new(0.0, 0.0); 3];
    for (k, root) in roots.iter_mut().enumerate() {
        let eps = C64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
        let tail = if p.norm() < 1e-12 { C64::new(0.0, 0.0) } else { cr * eps.conj() * c / p };
        let mut w = (z + eps * p / cr + tail) / 3.0;
        for _ in 0..3 {
            let d = 3.0 * w * w - 2.0 * z * w + z.conj();
            if d.norm() < 1e-6 {
                break;
            }
            w -= cubic(w, z) / d;
        }
        *root = w;
    }
    let sum: C64 = roots.iter().sum();
    let prod = roots[0] * roots[1] * roots[2];
    if (sum - z).norm() > 1e-8 || (prod - 1.0).norm() > 1e-8 {
        return Err(Error::Numerical(format!("Vieta check failed at {z}: sum {sum}, product {prod}")));
    }
    if let Some(w) = roots.iter().find(|w| (w.norm() - 1.0).abs() > 1e-6) {
        return Err(Error::InvalidArgument(format!("root {w} at {z} is off the unit circle")));
    }
    Ok(roots)
}

/// Each discoid atom becomes the six points (ω^{(k)}, conj ω^{(l)}), k ≠ l, with a sixth of its weight.
pub fn lift_to_torus(mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    if mu.domain != Domain::Discoid {
        return Err(Error::InvalidArgument("measure is already on the torus".into()));
    }
    let mut atoms = Vec::with_capacity(6 * mu.len());
    for (p, w) in &mu.atoms {
        let r = cubic_inverse(p.z())?;
        for k in 0..3 {
            for l in 0..3 {
                if k != l {
                    atoms.push((Point::Torus(r[k], r[l].conj()), w / 6.0));
                }
            }
        }
    }
    Ok(DiscreteMeasure { domain: Domain::Torus, atoms }.merged())
}

/// Uniform measure on D_m = {(e^{2πiq₁/3m}, e^{2πiq₂/3m}) : q₁ + q₂ ≡ 0 mod 3}.
pub fn uniform_dm_measure(m: usize) -> Result<DiscreteMeasure> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let n = 3 * m;
    let w = 1.0 / (3 * m * m) as f64;
    let e = |q: usize| C64::from_polar(1.0, 2.0 * PI * q as f64 / n as f64);
    let atoms = (0..n)
        .flat_map(|q1| (0..n).filter(move |q2| (q1 + q2) % 3 == 0).map(move |q2| (q1, q2)))
        .map(|(q1, q2)| (Point::Torus(e(q1), e(q2)), w))
        .collect();
    Ok(DiscreteMeasure { domain: Domain::Torus, atoms })
}

/// Reweights atoms by J^power at Φ(point) and renormalizes; atoms where J vanishes drop out.
pub fn jacobian_weighted(mu: &DiscreteMeasure, power: u32) -> Result<DiscreteMeasure> {
    if !(1..=2).contains(&power) {
        return Err(Error::InvalidArgument(format!("power {power} is not 1 or 2")));
    }
    let mut atoms: Vec<(Point, f64)> = mu
        .atoms
        .iter()
        .filter_map(|(p, w)| {
            let j2 = jacobian_sq(p.z());
            let f = if power == 2 { j2 } else { j2.max(0.0).sqrt() };
            (f > 1e-9).then_some((*p, w * f))
        })
        .collect();
    let total: f64 = atoms.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return Err(Error::InvalidArgument("all Jacobian weights vanish".into()));
    }
    atoms.iter_mut().for_each(|(_, w)| *w /= total);
    Ok(DiscreteMeasure { domain: mu.domain, atoms })
}

fn orbit_points(n: f64, k: Option<f64>) -> Vec<(C64, C64)> {
    let tau = C64::from_polar(1.0, 2.0 * PI / n);
    let om = C64::from_polar(1.0, 2.0 * PI / 3.0);
    let ob = om.conj() * tau.conj();
    match k {
        None => vec![(tau, tau), (ob, om), (om, ob)],
        Some(k) => {
            let e = C64::from_polar(1.0, 2.0 * PI * k);
            vec![(tau * e, tau), (tau, tau * e), (ob, om * e), (om * e, ob), (ob / e, om / e), (om / e, ob / e)]
        }
    }
}

/// (2−√2)/8 d^((8)) + (2+√2)/8 d^((8/3)) + 1/2 d^(24/5,1/12), with τ = e^{2πi/n} and ω = e^{2πi/3}.
pub fn e8_paper_measure() -> DiscreteMeasure {
    let r2 = 2f64.sqrt();
    let parts = [((2.0 - r2) / 8.0, orbit_points(8.0, None)), ((2.0 + r2) / 8.0, orbit_points(8.0 / 3.0, None)), (0.5, orbit_points(24.0 / 5.0, Some(1.0 / 12.0)))];
    let atoms = parts
        .iter()
        .flat_map(|(w, pts)| pts.iter().map(move |&(a, b)| (Point::Torus(a, b), w / pts.len() as f64)))
        .collect();
    DiscreteMeasure { domain: Domain::Torus, atoms }.merged()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContinuousKind {
    /// Haar measure on T², i.e. (3/π²) J⁻¹ dz on the discoid.
    Torus,
    /// (1/2π²) J dz on the discoid, i.e. (1/6) J² times Haar measure on T².
    Su3,
    /// √(4 − x²)/(2π) on [−2, 2].
    Semicircle,
    /// √(4 − (x−1)²)/(2π) on [−1, 3].
    So3Semicircle,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub tol: f64,
    pub max_nodes: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { tol: 1e-10, max_nodes: 256 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    pub nodes: usize,
}

/// Gauss-Legendre nodes and weights on [−1, 1] from the Jacobi matrix.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jm = DMatrix::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            let k = i.max(j) as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..n).map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

fn quad_once(kind: ContinuousKind, m: u32, n: u32, nodes: usize) -> C64 {
    let (x, w) = gauss_legendre(nodes);
    match kind {
        ContinuousKind::Torus | ContinuousKind::Su3 => {
            let mut acc = C64::new(0.0, 0.0);
            for (xi, wi) in x.iter().zip(&w) {
                let w1 = C64::from_polar(1.0, PI * (xi + 1.0));
                for (xj, wj) in x.iter().zip(&w) {
                    let w2 = C64::from_polar(1.0, PI * (xj + 1.0));
                    let z = phi_map(w1, w2);
                    let mut f = z.powu(m) * z.conj().powu(n);
                    if kind == ContinuousKind::Su3 {
                        f *= jacobian_sq(z) / 6.0;
                    }
                    acc += f * wi * wj;
                }
            }
            acc / 4.0
        }
        ContinuousKind::Semicircle | ContinuousKind::So3Semicircle => {
            let shift = if kind == ContinuousKind::So3Semicircle { 1.0 } else { 0.0 };
            let mut acc = 0.0;
            for (xi, wi) in x.iter().zip(&w) {
                let t = PI * (xi + 1.0) / 2.0;
                let s = t.sin();
                let v = 2.0 * t.cos() + shift;
                acc += wi * v.powi((m + n) as i32) * 4.0 * s * s / (2.0 * PI);
            }
            C64::new(acc * PI / 2.0, 0.0)
        }
    }
}

/// ∫ z^m z̄^n against the chosen weight, in angle coordinates, doubling the node count until two
/// successive estimates agree to the tolerance.
pub fn continuous_moments(kind: ContinuousKind, m: u32, n: u32, opts: QuadOptions) -> Result<QuadResult> {
    let mut nodes = 8;
    let mut prev = quad_once(kind, m, n, nodes);
    while nodes * 2 <= opts.max_nodes {
        nodes *= 2;
        let cur = quad_once(kind, m, n, nodes);
        let error = (cur - prev).norm();
        if error < opts.tol {
            return Ok(QuadResult { value: cur, error, nodes });
        }
        prev = cur;
    }
    Err(Error::NoConvergence { best: f64::NAN, restarts: nodes })
}

#[derive(Clone, Copy, Debug)]
pub struct Comparison {
    pub max_diff: f64,
    pub tol: f64,
}

impl Comparison {
    pub fn passes(&self) -> bool {
        self.max_diff <= self.tol
    }
}

pub fn compare_measures(a: &MomentTable, b: &MomentTable, tol: f64) -> Result<Comparison> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!("moment grids {:?} and {:?}", a.shape(), b.shape())));
    }
    let max_diff = a.values.iter().flatten().zip(b.values.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    Ok(Comparison { max_diff, tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobian_values() {
        assert!((jacobian_sq(C64::new(1.0, 0.0)) - 16.0).abs() < 1e-12);
        assert!(jacobian_sq(C64::new(3.0, 0.0)).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((int - 2.0 / 9.0).abs() < 1e-13);
    }

    #[test]
    fn cubic_special_points() {
        let r = cubic_inverse(C64::new(3.0, 0.0)).unwrap();
        assert!(r.iter().all(|w| (w - 1.0).norm() < 1e-5));
        let r = cubic_inverse(C64::new(0.0, 0.0)).unwrap();
        for w in r {
            assert!((w * w * w - 1.0).norm() < 1e-12);
        }
        assert!(cubic_inverse(C64::new(4.0, 0.0)).is_err());
    }
}
