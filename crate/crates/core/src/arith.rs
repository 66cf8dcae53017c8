//! Quantum integers, roots of unity and tolerance helpers.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// The root q = exp(iπ/m) attached to Coxeter number m.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QRoot {
    m: u32,
    value: C64,
}

impl QRoot {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("Coxeter number must be positive".into()));
        }
        Ok(QRoot { m, value: C64::from_polar(1.0, PI / m as f64) })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn value(&self) -> C64 {
        self.value
    }

    /// δ = [2]_q
    pub fn delta(&self) -> f64 {
        quantum_integer_unchecked(2, self.m)
    }

    /// α = [3]_q, the norm of an SU(3) graph with Coxeter number m.
    pub fn alpha(&self) -> f64 {
        quantum_integer_unchecked(3, self.m)
    }

    pub fn qint(&self, n: i64) -> f64 {
        quantum_integer_unchecked(n, self.m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceContext {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub rank_tol: f64,
}

impl Default for ToleranceContext {
    fn default() -> Self {
        ToleranceContext { abs_tol: 1e-9, rel_tol: 1e-9, rank_tol: 1e-8 }
    }
}

impl ToleranceContext {
    pub fn new(abs_tol: f64, rel_tol: f64, rank_tol: f64) -> Result<Self> {
        for (name, v) in [("abs_tol", abs_tol), ("rel_tol", rel_tol), ("rank_tol", rank_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(ToleranceContext { abs_tol, rel_tol, rank_tol })
    }

    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs_tol.max(self.rel_tol * a.abs().max(b.abs()))
    }

    pub fn close_c(&self, a: C64, b: C64) -> bool {
        (a - b).norm() <= self.abs_tol.max(self.rel_tol * a.norm().max(b.norm()))
    }
}

/// [n]_q = sin(nπ/m) / sin(π/m).
pub fn quantum_integer(n: i64, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    Ok(quantum_integer_unchecked(n, m))
}

fn quantum_integer_unchecked(n: i64, m: u32) -> f64 {
    if n == 1 {
        return 1.0;
    }
    if n == 0 || n % m as i64 == 0 {
        return 0.0;
    }
    if m == 1 {
        // sin(π) in the denominator; the limit of the ratio is (-1)^(n-1) n
        return if n % 2 == 0 { -(n as f64) } else { n as f64 };
    }
    let m = m as f64;
    (n as f64 * PI / m).sin() / (PI / m).sin()
}

/// exp(2πi p/q)
pub fn root_of_unity(p: i64, q: i64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (p.rem_euclid(q)) as f64 / q as f64)
}
