//! Non-Gaussian distributions on `T^2` whose linear forms satisfy the Heyde
//! symmetry condition.
//!
//! `g_j(y) = exp(−k⟨A_j y, y⟩) π̂_j(y)` where `π̂_1` is `1` on `H = (I−α̃)Z^2` and
//! `κ` off it, and `π̂_2` is `1` on `H` and `1/κ` off it. The damping `k` is the
//! smallest integer with `Σ|g_j| < 2`, which makes both series positive densities.

use std::fmt::Write as _;

use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::dual::DualDomain;
use crate::endo::{check_condition_d1, image_lattice, Endo};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::heyde::{self, membership_torus, parallelogram_value, MembershipReport, Method, Report};
use crate::lattice::{DualSublattice, IntMatrix};
use crate::scalar::Scalar;
use crate::torus::{gaussian_tail_bound, min_eigenvalue, quadratic_form, DensityGrid, TorusCharFn};

pub const DEFAULT_ALPHA: [[i64; 2]; 2] = [[-1, 1], [1, -2]];
pub const MAX_K: u32 = 64;
/// Stage (b) tolerance.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Stage (d) tolerance on the canonical parallelogram value.
pub const WITNESS_TOL: f64 = 1e-9;
/// Stage (e) tolerance on `∫ρ_j`.
pub const INTEGRAL_TOL: f64 = 1e-9;

fn default_alpha() -> Vec<Vec<i64>> {
    DEFAULT_ALPHA.iter().map(|r| r.to_vec()).collect()
}
fn default_kappa() -> f64 {
    0.5
}
fn default_window() -> i64 {
    12
}
fn default_grid() -> usize {
    64
}
fn default_membership_radius() -> i64 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleConfig {
    #[serde(default = "default_alpha")]
    pub alpha: Vec<Vec<i64>>,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Damping exponent; auto-selected when absent.
    #[serde(default)]
    pub k: Option<u32>,
    /// Half-width of the `(u, v)` box for the symmetry check.
    #[serde(default = "default_window")]
    pub window: i64,
    #[serde(default = "default_grid")]
    pub grid_n: usize,
    /// `u, v` range over `2Z^2 ∩ [-r, r]^2` in the non-membership test.
    #[serde(default = "default_membership_radius")]
    pub membership_radius: i64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        CounterexampleConfig {
            alpha: default_alpha(),
            kappa: default_kappa(),
            k: None,
            window: default_window(),
            grid_n: default_grid(),
            membership_radius: default_membership_radius(),
        }
    }
}

impl CounterexampleConfig {
    /// The automorphism `α` of `T^2`.
    pub fn validate(&self) -> Result<Endo> {
        let bad = |m: String| Err(Error::Config(m));
        if self.alpha.len() != 2 || self.alpha.iter().any(|r| r.len() != 2) {
            return bad("alpha must be a 2x2 integer matrix".into());
        }
        let m = IntMatrix::from_rows(self.alpha.clone()).map_err(|e| Error::Config(e.to_string()))?;
        if m.det() != 1 || m.trace() >= -2 {
            return bad(format!("alpha needs det = 1 and trace < -2 (got det {}, trace {})", m.det(), m.trace()));
        }
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return bad(format!("kappa must lie in (0, 1], got {}", self.kappa));
        }
        if let Some(k) = self.k {
            if k == 0 || k > MAX_K {
                return bad(format!("k must lie in 1..={MAX_K}"));
            }
        }
        if self.window < 1 || self.window > 40 {
            return bad("window must lie in 1..=40".into());
        }
        if self.grid_n < 2 || self.grid_n > 1024 {
            return bad("grid_n must lie in 2..=1024".into());
        }
        if self.membership_radius < 2 || self.membership_radius > self.window {
            return bad("membership_radius must lie in 2..=window".into());
        }
        Endo::new(&GroupSpec::torus(2)?, m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsdPair {
    pub a1: Vec<Vec<f64>>,
    pub a2: Vec<Vec<f64>>,
}

fn to_rows(m: &Matrix2<f64>) -> Vec<Vec<f64>> {
    vec![vec![m[(0, 0)], m[(0, 1)]], vec![m[(1, 0)], m[(1, 1)]]]
}

fn int2(m: &IntMatrix) -> Matrix2<f64> {
    Matrix2::new(m.get(0, 0) as f64, m.get(0, 1) as f64, m.get(1, 0) as f64, m.get(1, 1) as f64)
}

fn min_eig2(m: &Matrix2<f64>) -> f64 {
    let s = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(s).eigenvalues.min()
}

impl PsdPair {
    /// `‖A_1 + A_2 α̃‖_max`.
    pub fn constraint_residual(&self, adj: &IntMatrix) -> f64 {
        let a1 = Matrix2::from_fn(|i, j| self.a1[i][j]);
        let a2 = Matrix2::from_fn(|i, j| self.a2[i][j]);
        (a1 + a2 * int2(adj)).abs().max()
    }

    pub fn dets(&self) -> (f64, f64) {
        let d = |a: &Vec<Vec<f64>>| a[0][0] * a[1][1] - a[0][1] * a[1][0];
        (d(&self.a1), d(&self.a2))
    }

    /// `min(λ_min(A_1), λ_min(A_2))`.
    pub fn epsilon(&self) -> f64 {
        min_eigenvalue(&self.a1).unwrap().min(min_eigenvalue(&self.a2).unwrap())
    }
}

/// Symmetric positive definite `A_1, A_2` with `A_1 + A_2 α̃ = 0`, normalized to `det A_2 = 1`.
pub fn find_psd_pair(adj: &IntMatrix) -> Result<PsdPair> {
    if adj.dim() != 2 {
        return Err(Error::InvalidMatrix("expected a 2x2 matrix".into()));
    }
    if adj.det() != 1 || adj.trace() >= -2 {
        return Err(Error::NoPsdPair(format!("need det 1 and trace < -2, got det {} trace {}", adj.det(), adj.trace())));
    }
    let d = int2(adj);
    let candidate = |a2: Matrix2<f64>| -> Option<(f64, PsdPair)> {
        let a1 = -(a2 * d);
        let a1 = (a1 + a1.transpose()) * 0.5;
        let score = min_eig2(&a1).min(min_eig2(&a2));
        (score > 0.0).then(|| {
            let s = 1.0 / a2.determinant().sqrt();
            (score, PsdPair { a1: to_rows(&(a1 * s)), a2: to_rows(&(a2 * s)) })
        })
    };
    if adj.is_symmetric() {
        if let Some((_, p)) = candidate(Matrix2::identity()) {
            return Ok(p);
        }
    }
    // A_2 = [[p, q], [q, r]] with A_2 D symmetric: p·b + q·(d − a) − r·c = 0
    let (a, b, c, dd) = (d[(0, 0)], d[(0, 1)], d[(1, 0)], d[(1, 1)]);
    let normal = nalgebra::Vector3::new(b, dd - a, -c);
    let seed = if normal.x.abs() < 0.9 * normal.norm() {
        nalgebra::Vector3::x()
    } else {
        nalgebra::Vector3::y()
    };
    let e1 = normal.cross(&seed).normalize();
    let e2 = normal.cross(&e1).normalize();
    let steps = 7200;
    let mut best: Option<(f64, PsdPair)> = None;
    for s in 0..steps {
        let t = std::f64::consts::TAU * s as f64 / steps as f64;
        let w = e1 * t.cos() + e2 * t.sin();
        let a2 = Matrix2::new(w.x, w.y, w.y, w.z);
        if a2.determinant() <= 0.0 {
            continue;
        }
        if let Some((score, p)) = candidate(a2 / a2.determinant().sqrt()) {
            if best.as_ref().map_or(true, |(b, _)| score > *b) {
                best = Some((score, p));
            }
        }
    }
    let pair = best.map(|(_, p)| p).ok_or_else(|| Error::NoPsdPair("search found no positive definite solution".into()))?;
    if pair.constraint_residual(adj) > 1e-12 {
        return Err(Error::NoPsdPair(format!("constraint residual {:e}", pair.constraint_residual(adj))));
    }
    Ok(pair)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HInfo {
    pub lattice: DualSublattice,
    /// `|K| = |det(I − α̃)|`.
    pub k_order: u64,
    pub description: String,
    /// First point of `2Z^2 \ H`.
    pub witness: Vec<i64>,
    /// Next point `v ∈ 2Z^2` with `v, u+v, u−v ∉ H`.
    pub companion: Vec<i64>,
}

/// Even lattice points ordered by `L1` norm, ties broken lexicographically descending.
fn even_points(radius: i64) -> Vec<Vec<i64>> {
    let mut pts: Vec<Vec<i64>> = (-radius..=radius)
        .step_by(1)
        .flat_map(|a| (-radius..=radius).map(move |b| vec![a, b]))
        .filter(|p| p.iter().all(|c| c % 2 == 0))
        .collect();
    pts.sort_by(|p, q| {
        let n = |v: &Vec<i64>| v.iter().map(|c| c.abs()).sum::<i64>();
        n(p).cmp(&n(q)).then_with(|| q.cmp(p))
    });
    pts
}

/// `H = (I − α̃)Z^2` and explicit points of `Y^(2) \ H`.
pub fn build_h_and_checks(alpha: &Endo) -> Result<HInfo> {
    let adj = alpha.adjoint();
    let i_minus = Endo::identity(alpha.spec()).sub(&adj)?;
    let lattice = image_lattice(&i_minus)?;
    let outside = |y: &[i64]| !lattice.contains(y);
    let pts = even_points(16);
    let witness = pts.iter().find(|p| outside(p)).cloned().ok_or_else(|| {
        Error::Inconsistency("2Z^2 appears to lie inside H".into())
    })?;
    let companion = pts
        .iter()
        .filter(|v| **v != witness)
        .find(|v| {
            let plus: Vec<i64> = witness.iter().zip(v.iter()).map(|(a, b)| a + b).collect();
            let minus: Vec<i64> = witness.iter().zip(v.iter()).map(|(a, b)| a - b).collect();
            outside(v) && outside(&plus) && outside(&minus)
        })
        .cloned()
        .ok_or_else(|| Error::Inconsistency("no companion point off H".into()))?;
    let adjb = lattice.basis().adjugate();
    let index = lattice.index();
    let description = format!(
        "{{(m,n) : {}m + {}n ≡ 0 and {}m + {}n ≡ 0 (mod {index})}}",
        adjb.get(0, 0).rem_euclid(index as i64),
        adjb.get(0, 1).rem_euclid(index as i64),
        adjb.get(1, 0).rem_euclid(index as i64),
        adjb.get(1, 1).rem_euclid(index as i64),
    );
    Ok(HInfo { k_order: index, description, witness, companion, lattice })
}

/// `(π̂_1(y), π̂_2(y))`.
pub fn pi_hat<T: Scalar>(h: &DualSublattice, kappa: &T, y: &[i64]) -> (T, T) {
    if h.contains(y) {
        (T::one(), T::one())
    } else {
        (kappa.clone(), T::one() / kappa.clone())
    }
}

/// The symmetry equation for `π̂_1, π̂_2` alone, in the scalar type `T`
/// (exact for rational types).
pub fn check_pi_symmetry<T: Scalar>(h: &DualSublattice, alpha: &Endo, kappa: &T, radius: i64) -> Report {
    let adj = alpha.adjoint();
    let dom = DualDomain::Window { dim: 2, radius };
    let points = dom.points();
    let mut max = 0.0f64;
    let mut witness = None;
    let mut exact = true;
    for u in &points {
        for v in &points {
            let av = adj.apply(v);
            let add = |a: &[i64], b: &[i64]| -> Vec<i64> { a.iter().zip(b).map(|(x, y)| x + y).collect() };
            let subv = |a: &[i64], b: &[i64]| -> Vec<i64> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
            let lhs = pi_hat(h, kappa, &add(u, v)).0 * pi_hat(h, kappa, &add(u, &av)).1;
            let rhs = pi_hat(h, kappa, &subv(u, v)).0 * pi_hat(h, kappa, &subv(u, &av)).1;
            let d = lhs - rhs;
            let ok = d.within(SYMMETRY_TOL);
            exact &= ok;
            if d.abs_f64() > max || (!ok && witness.is_none()) {
                max = max.max(d.abs_f64());
                witness = Some(vec![u.clone(), v.clone()]);
            }
        }
    }
    Report {
        equation: "symmetry (two-valued part)".into(),
        method: Method::CharfnEquation,
        domain: dom.describe(),
        max_residual: max,
        tolerance: if T::is_exact() { 0.0 } else { SYMMETRY_TOL },
        verdict: exact,
        witness,
        checked: points.len() * points.len(),
    }
}

/// `Σ_window |g| + tail bound`.
fn abs_sum(kappa: f64, a: &[Vec<f64>], h: &DualSublattice, k: u32, radius: i64, eps: f64, second: bool) -> f64 {
    let dom = DualDomain::Window { dim: 2, radius };
    let scale = if second { 1.0 / kappa } else { kappa }.max(1.0);
    let window: f64 = dom
        .points()
        .iter()
        .map(|y| {
            let (p1, p2) = pi_hat(h, &kappa, y);
            (-(k as f64) * quadratic_form(a, y)).exp() * if second { p2 } else { p1 }
        })
        .sum();
    window + scale * gaussian_tail_bound(2, k as f64 * eps, radius)
}

/// Smallest `k ≤ MAX_K` with both bounds on `Σ|g_j|` below 2.
pub fn select_k(pair: &PsdPair, h: &DualSublattice, kappa: f64, radius: i64) -> Result<(u32, [f64; 2])> {
    let eps = pair.epsilon();
    for k in 1..=MAX_K {
        let s1 = abs_sum(kappa, &pair.a1, h, k, radius, eps, false);
        let s2 = abs_sum(kappa, &pair.a2, h, k, radius, eps, true);
        if s1 < 2.0 && s2 < 2.0 {
            return Ok((k, [s1, s2]));
        }
    }
    Err(Error::NoDampingExponent { max_k: MAX_K })
}

/// `g_j` as stored coefficients on `[-radius, radius]^2`.
pub fn build_g(pair: &PsdPair, h: &DualSublattice, kappa: f64, k: u32, radius: i64) -> Result<[TorusCharFn; 2]> {
    let eps = pair.epsilon();
    let make = |a: &[Vec<f64>], second: bool| {
        let scale = if second { 1.0 / kappa } else { kappa }.max(1.0);
        TorusCharFn::from_fn(2, radius, scale * gaussian_tail_bound(2, k as f64 * eps, radius), |y| {
            let (p1, p2) = pi_hat(h, &kappa, y);
            let p = if second { p2 } else { p1 };
            Complex64::new((-(k as f64) * quadratic_form(a, y)).exp() * p, 0.0)
        })
    };
    Ok([make(&pair.a1, false)?, make(&pair.a2, true)?])
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub config: CounterexampleConfig,
    pub alpha: Endo,
    pub pair: PsdPair,
    pub h: HInfo,
    pub k: u32,
    /// Bounds on `Σ|g_j|` used to choose `k`.
    pub sums: [f64; 2],
    pub g1: TorusCharFn,
    pub g2: TorusCharFn,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stage {
    pub id: char,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensitySummary {
    pub abs_sum_bound: f64,
    /// `2 − Σ|g_j|`, a lower bound on `ρ_j` everywhere.
    pub margin: f64,
    pub grid: DensityGrid,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonMembership {
    pub report: Option<MembershipReport>,
    pub error: Option<String>,
    /// Parallelogram value at the canonical `(u, v)`.
    pub witness_value: Option<f64>,
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleCertificate {
    pub config: CounterexampleConfig,
    pub alpha: Vec<Vec<i64>>,
    pub alpha_adjoint: Vec<Vec<i64>>,
    pub det_i_plus_alpha: i64,
    pub det_i_minus_alpha_adjoint: i64,
    pub pair: PsdPair,
    pub pair_dets: (f64, f64),
    pub pair_constraint_residual: f64,
    pub h: HInfo,
    pub k: u32,
    pub k_auto: bool,
    pub coefficient_sums: [f64; 2],
    pub storage_radius: i64,
    pub tail_bounds: [f64; 2],
    pub symmetry: Option<Report>,
    pub pi_symmetry_exact: Report,
    pub densities: Vec<DensitySummary>,
    pub non_membership: Vec<NonMembership>,
    pub witness_u: Vec<i64>,
    pub witness_v: Vec<i64>,
    pub stages: Vec<Stage>,
    pub valid: bool,
    pub failed_stage: Option<char>,
}

impl Counterexample {
    pub fn build(config: &CounterexampleConfig) -> Result<Self> {
        let alpha = config.validate()?;
        let adj = alpha.adjoint();
        let pair = find_psd_pair(adj.matrix())?;
        let h = build_h_and_checks(&alpha)?;
        let radius = config.window * (1 + adj.matrix().inf_norm());
        let (k, sums) = match config.k {
            Some(k) => {
                let eps = pair.epsilon();
                let s1 = abs_sum(config.kappa, &pair.a1, &h.lattice, k, radius, eps, false);
                let s2 = abs_sum(config.kappa, &pair.a2, &h.lattice, k, radius, eps, true);
                (k, [s1, s2])
            }
            None => select_k(&pair, &h.lattice, config.kappa, radius)?,
        };
        let [g1, g2] = build_g(&pair, &h.lattice, config.kappa, k, radius)?;
        Ok(Counterexample { config: config.clone(), alpha, pair, h, k, sums, g1, g2 })
    }

    pub fn storage_radius(&self) -> i64 {
        self.g1.radius()
    }

    pub fn symmetry_report(&self) -> Result<Report> {
        let dom = DualDomain::Window { dim: 2, radius: self.config.window };
        heyde::check_symmetry_charfn(&self.g1, &self.g2, &self.alpha, &dom, SYMMETRY_TOL)
    }

    pub fn certify(&self) -> CounterexampleCertificate {
        let cfg = &self.config;
        let adj = self.alpha.adjoint();
        let id = Endo::identity(self.alpha.spec());
        let det_plus = id.add(&self.alpha).expect("same spec").matrix().det();
        let det_minus = id.sub(&adj).expect("same spec").matrix().det();
        let mut stages = Vec::new();

        let d1 = check_condition_d1(&self.alpha);
        let a_ok = matches!(&d1, Ok(r) if r.is_trivial);
        stages.push(Stage {
            id: 'a',
            name: "Ker(I+alpha) trivial".into(),
            passed: a_ok,
            detail: format!("det(I+alpha) = {det_plus}, det(I-alpha~) = {det_minus}"),
        });

        let symmetry = self.symmetry_report();
        let kappa_q = BigRational::from_float(cfg.kappa).expect("finite kappa");
        let pi_symmetry_exact = check_pi_symmetry(&self.h.lattice, &self.alpha, &kappa_q, cfg.window);
        let (b_ok, b_detail) = match &symmetry {
            Ok(r) => (
                r.verdict && pi_symmetry_exact.verdict,
                format!("max residual {:e} (tol {:e}); exact two-valued part: {}", r.max_residual, r.tolerance, pi_symmetry_exact.verdict),
            ),
            Err(e) => (false, e.to_string()),
        };
        stages.push(Stage { id: 'b', name: "symmetry equation".into(), passed: b_ok, detail: b_detail });

        let mut densities = Vec::new();
        let mut c_ok = true;
        let mut e_ok = true;
        let mut c_detail = Vec::new();
        let mut e_detail = Vec::new();
        for g in [&self.g1, &self.g2] {
            let grid = g.density_on_grid(cfg.grid_n).expect("grid size validated");
            let margin = g.positivity_margin();
            c_ok &= grid.min_certified > 0.0 && grid.min_certified >= margin - 1e-12;
            e_ok &= (grid.integral - 1.0).abs() <= INTEGRAL_TOL;
            c_detail.push(format!("min {:.10} (margin {:.6})", grid.min_certified, margin));
            e_detail.push(format!("{:.12}", grid.integral));
            densities.push(DensitySummary { abs_sum_bound: g.abs_sum_bound(), margin, grid });
        }
        stages.push(Stage { id: 'c', name: "positive densities".into(), passed: c_ok, detail: c_detail.join("; ") });

        let (u, v) = (self.h.witness.clone(), self.h.companion.clone());
        let ln_k = cfg.kappa.ln();
        let mut non_membership = Vec::new();
        let mut d_ok = true;
        for (g, expected) in [(&self.g1, 2.0 * ln_k), (&self.g2, -2.0 * ln_k)] {
            let (report, error) = match membership_torus(g, cfg.membership_radius, heyde::TORUS_TOL) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let witness_value = parallelogram_value(g, &u, &v).ok();
            let not_member = report.as_ref().is_some_and(|r| !r.member);
            let value_ok = witness_value.is_some_and(|w| (w - expected).abs() <= WITNESS_TOL);
            d_ok &= not_member && value_ok;
            non_membership.push(NonMembership { report, error, witness_value, expected });
        }
        let d_detail = non_membership
            .iter()
            .map(|n| match (n.witness_value, &n.error) {
                (Some(v), _) => format!("value {v:.10} vs {:.10}", n.expected),
                (None, Some(e)) => format!("no value ({e})"),
                (None, None) => "no value".to_string(),
            })
            .collect::<Vec<_>>()
            .join("; ");
        stages.push(Stage { id: 'd', name: "non-membership in Gamma * M1(G)".into(), passed: d_ok, detail: d_detail });
        stages.push(Stage { id: 'e', name: "normalization".into(), passed: e_ok, detail: e_detail.join("; ") });

        let failed_stage = stages.iter().find(|s| !s.passed).map(|s| s.id);
        CounterexampleCertificate {
            config: cfg.clone(),
            alpha: self.alpha.matrix().rows(),
            alpha_adjoint: adj.matrix().rows(),
            det_i_plus_alpha: det_plus,
            det_i_minus_alpha_adjoint: det_minus,
            pair_dets: self.pair.dets(),
            pair_constraint_residual: self.pair.constraint_residual(adj.matrix()),
            pair: self.pair.clone(),
            h: self.h.clone(),
            k: self.k,
            k_auto: cfg.k.is_none(),
            coefficient_sums: self.sums,
            storage_radius: self.storage_radius(),
            tail_bounds: [self.g1.tail_bound(), self.g2.tail_bound()],
            symmetry: symmetry.ok(),
            pi_symmetry_exact,
            densities,
            non_membership,
            witness_u: u,
            witness_v: v,
            valid: failed_stage.is_none(),
            failed_stage,
            stages,
        }
    }
}

impl CounterexampleCertificate {
    /// Plain-text table of the stages and key numbers.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "alpha            {:?}", self.alpha);
        let _ = writeln!(s, "kappa            {}", self.config.kappa);
        let _ = writeln!(s, "det(I+alpha)     {}", self.det_i_plus_alpha);
        let _ = writeln!(s, "det(I-alpha~)    {}", self.det_i_minus_alpha_adjoint);
        let _ = writeln!(s, "A1               {:?}", self.pair.a1);
        let _ = writeln!(s, "A2               {:?}", self.pair.a2);
        let _ = writeln!(s, "H                {}", self.h.description);
        let _ = writeln!(s, "k                {}{}", self.k, if self.k_auto { " (auto)" } else { "" });
        let _ = writeln!(s, "sum |g1|, |g2|   {:.12}, {:.12}", self.coefficient_sums[0], self.coefficient_sums[1]);
        let _ = writeln!(s, "witness u, v     {:?}, {:?}", self.witness_u, self.witness_v);
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<6}{:<36}{:<8}detail", "stage", "check", "result");
        for st in &self.stages {
            let _ = writeln!(s, "{:<6}{:<36}{:<8}{}", st.id, st.name, if st.passed { "PASS" } else { "FAIL" }, st.detail);
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "certificate {}", if self.valid { "VALID" } else { "INVALID" });
        s
    }
}
