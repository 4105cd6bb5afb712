//! Measures on `T^d` through their Fourier coefficients on a box of `Z^d`.
//!
//! Only the box `[-W, W]^d` is stored. `tail_bound` bounds the sum of the moduli
//! of all coefficients outside the box, so every grid statement made from the
//! stored part carries a rigorous one-sided error.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dual::{box_index, box_point, DualFunction};
use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::group::{torus_pairing, GroupSpec};

/// Tolerance for `c(0) = 1` and for Hermitian symmetry checks.
pub const COEFF_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct TorusCharFn {
    dim: usize,
    radius: i64,
    coeffs: Vec<Complex64>,
    tail_bound: f64,
}

impl TorusCharFn {
    pub fn from_fn(
        dim: usize,
        radius: i64,
        tail_bound: f64,
        mut f: impl FnMut(&[i64]) -> Complex64,
    ) -> Result<Self> {
        if dim == 0 || radius < 0 {
            return Err(Error::InvalidMeasure("torus window needs dim >= 1 and radius >= 0".into()));
        }
        let side = (2 * radius + 1) as usize;
        let coeffs = (0..side.pow(dim as u32)).map(|i| f(&box_point(dim, radius, i))).collect();
        Self::from_parts(dim, radius, coeffs, tail_bound)
    }

    fn from_parts(dim: usize, radius: i64, coeffs: Vec<Complex64>, tail_bound: f64) -> Result<Self> {
        if !(tail_bound >= 0.0) {
            return Err(Error::InvalidMeasure(format!("tail bound {tail_bound} is not a nonnegative number")));
        }
        let c = TorusCharFn { dim, radius, coeffs, tail_bound };
        let c0 = c.coeffs[c.index(&vec![0; dim]).expect("origin is in the box")];
        if (c0 - 1.0).norm() > COEFF_TOL {
            return Err(Error::InvalidMeasure(format!("coefficient at 0 is {c0}, expected 1")));
        }
        Ok(c)
    }

    /// Sparse construction; absent points are zero.
    pub fn from_pairs(
        dim: usize,
        radius: i64,
        pairs: impl IntoIterator<Item = (Vec<i64>, Complex64)>,
        tail_bound: f64,
    ) -> Result<Self> {
        let side = (2 * radius.max(0) + 1) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); side.pow(dim as u32)];
        for (y, v) in pairs {
            if y.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: y.len() });
            }
            let i = box_index(dim, radius, &y).ok_or(Error::WindowTooSmall { point: y })?;
            coeffs[i] = v;
        }
        Self::from_parts(dim, radius, coeffs, tail_bound)
    }

    /// Haar measure on `T^d`: only `c(0) = 1`.
    pub fn haar(dim: usize) -> Self {
        Self::from_fn(dim, 0, 0.0, |_| Complex64::new(1.0, 0.0)).expect("valid")
    }

    fn index(&self, y: &[i64]) -> Option<usize> {
        if y.len() != self.dim {
            return None;
        }
        box_index(self.dim, self.radius, y)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spec(&self) -> GroupSpec {
        GroupSpec::Torus { dim: self.dim }
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn get(&self, y: &[i64]) -> Option<Complex64> {
        self.index(y).map(|i| self.coeffs[i])
    }

    /// Overwrites a stored coefficient.
    pub fn set(&mut self, y: &[i64], value: Complex64) -> Result<()> {
        let i = self.index(y).ok_or_else(|| Error::WindowTooSmall { point: y.to_vec() })?;
        self.coeffs[i] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, Complex64)> + '_ {
        self.coeffs.iter().enumerate().map(|(i, &c)| (box_point(self.dim, self.radius, i), c))
    }

    /// `Σ_window |c(y)|`.
    pub fn window_abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Upper bound on `Σ_{Z^d} |c(y)|`.
    pub fn abs_sum_bound(&self) -> f64 {
        self.window_abs_sum() + self.tail_bound
    }

    /// `2 − Σ|c|`: a lower bound on the density whenever `c(0) = 1` and it is positive.
    pub fn positivity_margin(&self) -> f64 {
        2.0 - self.abs_sum_bound()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.iter().all(|(y, c)| {
            let neg: Vec<i64> = y.iter().map(|v| -v).collect();
            (self.get(&neg).expect("box is symmetric") - c.conj()).norm() <= tol
        })
    }

    /// Pointwise product of coefficients; the result lives on the smaller box.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let radius = self.radius.min(other.radius);
        // Outside the common box |fg| <= |f|·sup|g|; sup|g| over Z^d is at most
        // max(stored max, tail) because every unstored coefficient is below the tail.
        let outside = |f: &Self| -> f64 {
            f.iter()
                .filter(|(y, _)| y.iter().any(|c| c.abs() > radius))
                .map(|(_, c)| c.norm())
                .sum::<f64>()
                + f.tail_bound
        };
        let sup = |f: &Self| f.max_abs().max(f.tail_bound);
        let tail = (outside(self) * sup(other)).min(outside(other) * sup(self));
        Self::from_fn(self.dim, radius, tail, |y| self.get(y).unwrap() * other.get(y).unwrap())
    }

    /// Reflected measure: `c(y) ↦ conj(c(y))`.
    pub fn reflect(&self) -> Self {
        TorusCharFn {
            dim: self.dim,
            radius: self.radius,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
            tail_bound: self.tail_bound,
        }
    }

    /// `α(μ)^(y) = μ̂(α̃y)` on the box of radius `out_radius`.
    pub fn pushforward(&self, alpha: &Endo, out_radius: i64) -> Result<Self> {
        if alpha.spec() != &self.spec() {
            return Err(Error::SpecMismatch);
        }
        if alpha.matrix().det() == 0 {
            return Err(Error::SingularMatrix);
        }
        let adj = alpha.adjoint();
        let reach = adj.matrix().inf_norm() * out_radius;
        if reach > self.radius {
            let mut point = vec![0; self.dim];
            point[0] = reach;
            return Err(Error::WindowTooSmall { point });
        }
        let out = Self::from_fn(self.dim, out_radius, 0.0, |y| {
            self.get(&adj.apply(y)).expect("reach checked")
        })?;
        // α̃ is injective on Z^d, so coefficients outside the new box are the
        // stored ones not hit by α̃(box) plus the old tail.
        let mut hit = vec![false; self.coeffs.len()];
        for (y, _) in out.iter() {
            hit[self.index(&adj.apply(&y)).expect("reach checked")] = true;
        }
        let missed: f64 = self
            .coeffs
            .iter()
            .zip(&hit)
            .filter(|(_, h)| !**h)
            .map(|(c, _)| c.norm())
            .sum();
        Ok(TorusCharFn { tail_bound: self.tail_bound + missed, ..out })
    }

    /// `ρ(t) = Σ_y c(y) conj((t, y))` on the grid `t ∈ (Z/n)^d / n`.
    pub fn density_on_grid(&self, grid_n: usize) -> Result<DensityGrid> {
        if grid_n == 0 {
            return Err(Error::InvalidMeasure("grid size must be positive".into()));
        }
        let n = grid_n as i64;
        let total = grid_n.pow(self.dim as u32);
        let roots: Vec<Complex64> =
            (0..grid_n).map(|k| Complex64::from_polar(1.0, -TAU * k as f64 / grid_n as f64)).collect();
        let mut acc = vec![Complex64::new(0.0, 0.0); total];
        let mut t = vec![0i64; self.dim];
        for (y, c) in self.iter().filter(|(_, c)| c.norm() > 0.0) {
            for (p, slot) in acc.iter_mut().enumerate() {
                let mut rest = p;
                for j in (0..self.dim).rev() {
                    t[j] = (rest % grid_n) as i64;
                    rest /= grid_n;
                }
                let phase: i64 = t.iter().zip(&y).map(|(a, b)| a * b).sum::<i64>().rem_euclid(n);
                *slot += c * roots[phase as usize];
            }
        }
        let values: Vec<f64> = acc.iter().map(|v| v.re).collect();
        let max_imag = acc.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        let (argmin, min) = values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best });
        let integral = values.iter().sum::<f64>() / total as f64;
        let mut argmin_t = vec![0.0; self.dim];
        let mut rest = argmin;
        for j in (0..self.dim).rev() {
            argmin_t[j] = (rest % grid_n) as f64 / grid_n as f64;
            rest /= grid_n;
        }
        Ok(DensityGrid {
            grid_n,
            min,
            min_certified: min - self.tail_bound,
            argmin: argmin_t,
            integral,
            max_imag,
            values,
        })
    }

    /// Direct evaluation of the truncated series at one point.
    pub fn density_at(&self, t: &[f64]) -> f64 {
        self.iter().map(|(y, c)| (c * torus_pairing(t, &y).conj()).re).sum()
    }
}

impl DualFunction<Complex64> for TorusCharFn {
    fn at(&self, y: &[i64]) -> Option<Complex64> {
        self.get(y)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityGrid {
    pub grid_n: usize,
    /// Minimum of the truncated series over the grid.
    pub min: f64,
    /// `min − tail_bound`.
    pub min_certified: f64,
    pub argmin: Vec<f64>,
    /// Grid average; equals `c(0)` when no stored frequency aliases to 0.
    pub integral: f64,
    /// Largest imaginary part seen (zero for Hermitian coefficients).
    pub max_imag: f64,
    #[serde(skip)]
    pub values: Vec<f64>,
}

/// On-disk form: the nonzero (lattice point, value) pairs plus window and tail bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusRecord {
    pub dim: usize,
    pub window: i64,
    pub tail_bound: f64,
    /// `(point, [re, im])`.
    pub coefficients: Vec<(Vec<i64>, [f64; 2])>,
}

impl From<&TorusCharFn> for TorusRecord {
    fn from(c: &TorusCharFn) -> Self {
        TorusRecord {
            dim: c.dim,
            window: c.radius,
            tail_bound: c.tail_bound,
            coefficients: c
                .iter()
                .filter(|(_, v)| v.norm() > 0.0)
                .map(|(y, v)| (y, [v.re, v.im]))
                .collect(),
        }
    }
}

impl TryFrom<TorusRecord> for TorusCharFn {
    type Error = Error;

    fn try_from(r: TorusRecord) -> Result<Self> {
        TorusCharFn::from_pairs(
            r.dim,
            r.window,
            r.coefficients.into_iter().map(|(y, [re, im])| (y, Complex64::new(re, im))),
            r.tail_bound,
        )
    }
}

/// Upper bound on `Σ_{y ∉ [-W,W]^d} exp(−c|y|²)` for `c > 0`.
pub fn gaussian_tail_bound(dim: usize, c: f64, radius: i64) -> f64 {
    if !(c > 0.0) {
        return f64::INFINITY;
    }
    let w = radius as f64;
    // Σ_{m > W} e^{-cm²} <= e^{-c(W+1)²} / (1 − e^{-c(2W+3)})  since m² >= (W+1)² + (m−W−1)(2W+3)
    let one_side = (-c * (w + 1.0).powi(2)).exp() / (1.0 - (-c * (2.0 * w + 3.0)).exp());
    // Σ_{m ∈ Z} e^{-cm²} <= 1 + 2 e^{-c} / (1 − e^{-3c})  since m² >= 3m − 2
    let full = 1.0 + 2.0 * (-c).exp() / (1.0 - (-3.0 * c).exp());
    dim as f64 * 2.0 * one_side * full.powi(dim as i32 - 1)
}

/// A Gaussian distribution on `T^d`: `γ̂(y) = (x, y) exp(−<Ay, y>)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub a: Vec<Vec<f64>>,
    #[serde(default)]
    pub shift: Option<Vec<f64>>,
}

/// Eigenvalues below this count as negative.
pub const PSD_TOL: f64 = 1e-10;

pub fn min_eigenvalue(a: &[Vec<f64>]) -> Result<f64> {
    let d = a.len();
    if d == 0 || a.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidMatrix("quadratic form must be square and nonempty".into()));
    }
    let m = DMatrix::from_fn(d, d, |i, j| a[i][j]);
    if (0..d).any(|i| (0..i).any(|j| (m[(i, j)] - m[(j, i)]).abs() > PSD_TOL)) {
        return Err(Error::NotSymmetric);
    }
    let eig = SymmetricEigen::new(m);
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

pub fn quadratic_form(a: &[Vec<f64>], y: &[i64]) -> f64 {
    a.iter()
        .zip(y)
        .map(|(row, &yi)| yi as f64 * row.iter().zip(y).map(|(aij, &yj)| aij * yj as f64).sum::<f64>())
        .sum()
}

impl GaussianParams {
    pub fn new(a: Vec<Vec<f64>>, shift: Option<Vec<f64>>) -> Result<Self> {
        let min = min_eigenvalue(&a)?;
        if min < -PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        if let Some(s) = &shift {
            if s.len() != a.len() {
                return Err(Error::DimensionMismatch { expected: a.len(), found: s.len() });
            }
        }
        Ok(GaussianParams { a, shift })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.a).expect("validated")
    }

    /// `φ(y) = <Ay, y>`.
    pub fn phi(&self, y: &[i64]) -> f64 {
        quadratic_form(&self.a, y)
    }

    pub fn to_charfn(&self, radius: i64) -> Result<TorusCharFn> {
        let tail = gaussian_tail_bound(self.dim(), self.min_eigenvalue(), radius);
        TorusCharFn::from_fn(self.dim(), radius, tail, |y| gaussian_charfn(self, y))
    }
}

pub fn gaussian_charfn(g: &GaussianParams, y: &[i64]) -> Complex64 {
    let phase = match &g.shift {
        Some(x) => torus_pairing(x, y),
        None => Complex64::new(1.0, 0.0),
    };
    phase * (-g.phi(y)).exp()
}
