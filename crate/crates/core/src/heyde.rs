//! Functional-equation machinery for the Heyde symmetry condition.
//!
//! Every check returns a [`Report`] with the largest residual seen, the point
//! where it occurred and a verdict `max_residual < tolerance`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dual::{DualDomain, DualFunction, DualTable};
use crate::endo::{check_condition_d1, Endo};
use crate::error::{Error, Result};
use crate::group::{torsion_subgroup_order2, FiniteGroup, GroupSpec};
use crate::measure::FiniteMeasure;
use crate::scalar::Scalar;
use crate::torus::TorusCharFn;

/// Residual tolerance on finite groups.
pub const FINITE_TOL: f64 = 1e-12;
/// Residual tolerance on torus windows.
pub const TORUS_TOL: f64 = 1e-9;
/// Moduli below this count as zeros of a characteristic function on finite groups.
pub const VANISHING_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    CharfnEquation,
    BruteForce,
    FiniteDifference,
    LeastSquares,
    Parallelogram,
    Support,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub equation: String,
    pub method: Method,
    pub domain: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: bool,
    /// Arguments at which `max_residual` was attained.
    pub witness: Option<Vec<Vec<i64>>>,
    /// Number of argument tuples evaluated.
    pub checked: usize,
}

pub type SymmetryReport = Report;

/// Running maximum of residuals.
struct Scan {
    max: f64,
    witness: Option<Vec<Vec<i64>>>,
    checked: usize,
}

impl Scan {
    fn new() -> Self {
        Scan { max: 0.0, witness: None, checked: 0 }
    }

    fn push(&mut self, r: f64, args: impl FnOnce() -> Vec<Vec<i64>>) {
        self.checked += 1;
        if r > self.max || r.is_nan() || self.witness.is_none() {
            if r > self.max || r.is_nan() {
                self.max = if r.is_nan() { f64::INFINITY } else { r };
            }
            self.witness = Some(args());
        }
    }

    fn finish(self, equation: &str, method: Method, domain: String, tolerance: f64) -> Report {
        Report {
            equation: equation.into(),
            method,
            domain,
            verdict: self.max < tolerance,
            max_residual: self.max,
            tolerance,
            witness: self.witness,
            checked: self.checked,
        }
    }
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Characteristic function of a finite measure as a table on its dual.
pub fn charfn_table<T: Scalar>(mu: &FiniteMeasure<T>) -> DualTable<Complex64> {
    let dom = DualDomain::Finite(mu.group().clone());
    let table = mu.charfn_table();
    DualTable::tabulate(dom, |y| Some(table[mu.group().index_of(y)]))
}

fn check_spec(alpha: &Endo, domain: &DualDomain) -> Result<()> {
    domain.check_endo(alpha)
}

/// `μ̂1(u+v)μ̂2(u+α̃v) = μ̂1(u−v)μ̂2(u−α̃v)` for all `u, v` in the domain.
pub fn check_symmetry_charfn(
    mu1: &impl DualFunction<Complex64>,
    mu2: &impl DualFunction<Complex64>,
    alpha: &Endo,
    domain: &DualDomain,
    tol: f64,
) -> Result<Report> {
    check_spec(alpha, domain)?;
    let adj = alpha.adjoint();
    let get = |f: &dyn Fn(&[i64]) -> Option<Complex64>, y: Vec<i64>| {
        f(&y).ok_or(Error::WindowTooSmall { point: y })
    };
    let f1 = |y: &[i64]| mu1.at(y);
    let f2 = |y: &[i64]| mu2.at(y);
    let points = domain.points();
    let images: Vec<Vec<i64>> = points.iter().map(|v| adj.apply(v)).collect();
    let mut scan = Scan::new();
    for u in &points {
        for (v, av) in points.iter().zip(&images) {
            let lhs = get(&f1, domain.add(u, v))? * get(&f2, domain.add(u, av))?;
            let rhs = get(&f1, domain.sub(u, v))? * get(&f2, domain.sub(u, av))?;
            scan.push((lhs - rhs).norm(), || vec![u.clone(), v.clone()]);
        }
    }
    Ok(scan.finish("symmetry", Method::CharfnEquation, domain.describe(), tol))
}

/// Joint law of `(a1 ξ1 + a2 ξ2, b1 ξ1 + b2 ξ2)`, indexed `s * |X| + t`.
pub fn joint_linear_forms<T: Scalar>(
    mu1: &FiniteMeasure<T>,
    mu2: &FiniteMeasure<T>,
    forms: [&Endo; 4],
) -> Result<Vec<T>> {
    let spec = mu1.spec();
    if mu2.spec() != spec || forms.iter().any(|e| e.spec() != &spec) {
        return Err(Error::SpecMismatch);
    }
    let g = mu1.group();
    let n = g.order();
    let maps = forms.iter().map(|e| e.index_map()).collect::<Result<Vec<_>>>()?;
    let mut joint = vec![T::zero(); n * n];
    for x1 in mu1.support() {
        for x2 in mu2.support() {
            let s = g.add_idx(maps[0][x1], maps[1][x2]);
            let t = g.add_idx(maps[2][x1], maps[3][x2]);
            let p = mu1.masses()[x1].clone() * mu2.masses()[x2].clone();
            joint[s * n + t] = joint[s * n + t].clone() + p;
        }
    }
    Ok(joint)
}

fn group_of<T: Scalar>(mu1: &FiniteMeasure<T>, alpha: &Endo) -> Result<FiniteGroup> {
    if alpha.spec() != &mu1.spec() {
        return Err(Error::SpecMismatch);
    }
    Ok(mu1.group().clone())
}

/// Tests `P(L1 = s, L2 = t) = P(L1 = s, L2 = −t)` for `L1 = ξ1 + ξ2`, `L2 = ξ1 + αξ2`.
pub fn brute_force_conditional_symmetry<T: Scalar>(
    mu1: &FiniteMeasure<T>,
    mu2: &FiniteMeasure<T>,
    alpha: &Endo,
    tol: f64,
) -> Result<Report> {
    let g = group_of(mu1, alpha)?;
    let id = Endo::identity(&g.spec());
    let joint = joint_linear_forms(mu1, mu2, [&id, &id, &id, alpha])?;
    let n = g.order();
    let mut scan = Scan::new();
    let mut exact_ok = true;
    for s in 0..n {
        for t in 0..n {
            let d = joint[s * n + t].clone() - joint[s * n + g.neg_idx(t)].clone();
            exact_ok &= d.within(tol);
            scan.push(d.abs_f64(), || vec![g.element(s), g.element(t)]);
        }
    }
    let mut r = scan.finish("conditional symmetry", Method::BruteForce, format!("Z{:?}", g.orders()), tol);
    if T::is_exact() {
        r.verdict = exact_ok;
    }
    Ok(r)
}

/// Max cell deviation of a joint table from the product of its marginals.
pub fn factorization_report<T: Scalar>(g: &FiniteGroup, joint: &[T], tol: f64) -> Report {
    let n = g.order();
    let row: Vec<T> = (0..n)
        .map(|s| (0..n).fold(T::zero(), |a, t| a + joint[s * n + t].clone()))
        .collect();
    let col: Vec<T> = (0..n)
        .map(|t| (0..n).fold(T::zero(), |a, s| a + joint[s * n + t].clone()))
        .collect();
    let mut scan = Scan::new();
    let mut exact_ok = true;
    for s in 0..n {
        for t in 0..n {
            let d = joint[s * n + t].clone() - row[s].clone() * col[t].clone();
            exact_ok &= d.within(tol);
            scan.push(d.abs_f64(), || vec![g.element(s), g.element(t)]);
        }
    }
    let mut r = scan.finish("joint factorization", Method::BruteForce, format!("Z{:?}", g.orders()), tol);
    if T::is_exact() {
        r.verdict = exact_ok;
    }
    r
}

/// The forms `P1 = (I+α)ξ1 + 2αξ2`, `P2 = 2ξ1 + (I+α)ξ2`.
pub fn sum_difference_forms(alpha: &Endo) -> Result<[Endo; 4]> {
    let id = Endo::identity(alpha.spec());
    let ipa = id.add(alpha)?;
    Ok([ipa.clone(), alpha.scale(2), id.scale(2), ipa])
}

/// `μ̂1(α̃1u+β̃1v)μ̂2(α̃2u+β̃2v) = μ̂1(α̃1u)μ̂2(α̃2u)μ̂1(β̃1v)μ̂2(β̃2v)`.
pub fn check_independence_eq4(
    mu1: &impl DualFunction<Complex64>,
    mu2: &impl DualFunction<Complex64>,
    forms: [&Endo; 4],
    domain: &DualDomain,
    tol: f64,
) -> Result<Report> {
    for e in forms {
        check_spec(e, domain)?;
    }
    let adj: Vec<Endo> = forms.iter().map(|e| e.adjoint()).collect();
    let get = |f: &dyn Fn(&[i64]) -> Option<Complex64>, y: Vec<i64>| {
        f(&y).ok_or(Error::WindowTooSmall { point: y })
    };
    let f1 = |y: &[i64]| mu1.at(y);
    let f2 = |y: &[i64]| mu2.at(y);
    let points = domain.points();
    let mut scan = Scan::new();
    for u in &points {
        let (a1u, a2u) = (adj[0].apply(u), adj[1].apply(u));
        let left_u = get(&f1, domain.normalize(a1u.clone()))? * get(&f2, domain.normalize(a2u.clone()))?;
        for v in &points {
            let (b1v, b2v) = (adj[2].apply(v), adj[3].apply(v));
            let lhs = get(&f1, domain.add(&a1u, &b1v))? * get(&f2, domain.add(&a2u, &b2v))?;
            let rhs = left_u
                * get(&f1, domain.normalize(b1v.clone()))?
                * get(&f2, domain.normalize(b2v.clone()))?;
            scan.push((lhs - rhs).norm(), || vec![u.clone(), v.clone()]);
        }
    }
    Ok(scan.finish("independence", Method::CharfnEquation, domain.describe(), tol))
}

/// The instance `(I+α, 2α, 2I, I+α)` of [`check_independence_eq4`].
pub fn check_independence_sum_difference(
    mu1: &impl DualFunction<Complex64>,
    mu2: &impl DualFunction<Complex64>,
    alpha: &Endo,
    domain: &DualDomain,
    tol: f64,
) -> Result<Report> {
    let f = sum_difference_forms(alpha)?;
    check_independence_eq4(mu1, mu2, [&f[0], &f[1], &f[2], &f[3]], domain, tol)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorizationReport {
    pub symmetry: Report,
    /// Present only when the conditional distribution is symmetric.
    pub factorization: Option<Report>,
    /// `symmetric ⇒ factorizes`.
    pub implication_holds: bool,
}

/// If `L2 | L1` is symmetric, checks that `P1` and `P2` are independent.
pub fn lemma21_check<T: Scalar>(
    mu1: &FiniteMeasure<T>,
    mu2: &FiniteMeasure<T>,
    alpha: &Endo,
    tol: f64,
) -> Result<FactorizationReport> {
    let symmetry = brute_force_conditional_symmetry(mu1, mu2, alpha, tol)?;
    if !symmetry.verdict {
        return Ok(FactorizationReport { symmetry, factorization: None, implication_holds: true });
    }
    let f = sum_difference_forms(alpha)?;
    let joint = joint_linear_forms(mu1, mu2, [&f[0], &f[1], &f[2], &f[3]])?;
    let fact = factorization_report(mu1.group(), &joint, tol);
    Ok(FactorizationReport { symmetry, implication_holds: fact.verdict, factorization: Some(fact) })
}

/// `ψ_j = −ln|μ̂_j|²` and the derived maps `A`, `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiFunctions {
    pub psi1: DualTable<f64>,
    pub psi2: DualTable<f64>,
    /// `A(y) = ψ1((I+α̃)y) + ψ2(2α̃y)`.
    pub a: DualTable<f64>,
    /// `B(y) = ψ1(2y) + ψ2((I+α̃)y)`.
    pub b: DualTable<f64>,
}

fn psi_at(f: &impl DualFunction<Complex64>, y: &[i64], floor: f64) -> Result<Option<f64>> {
    match f.at(y) {
        None => Ok(None),
        Some(c) => {
            let m2 = c.norm_sqr();
            if m2.sqrt() <= floor || !m2.is_finite() {
                Err(Error::VanishingCharFn { point: y.to_vec() })
            } else {
                Ok(Some(-m2.ln()))
            }
        }
    }
}

/// Tabulates `ψ_j`, `A`, `B` on `domain`. On windows, points whose arguments leave
/// the stored coefficients are left undefined.
pub fn derive_a_b(
    mu1: &impl DualFunction<Complex64>,
    mu2: &impl DualFunction<Complex64>,
    alpha: &Endo,
    domain: &DualDomain,
) -> Result<PsiFunctions> {
    check_spec(alpha, domain)?;
    let floor = if domain.is_finite() { VANISHING_TOL } else { 0.0 };
    let adj = alpha.adjoint();
    let ipa = Endo::identity(alpha.spec()).add(&adj)?;
    let two_a = adj.scale(2);
    let psi1 = try_table(domain, |y| psi_at(mu1, y, floor))?;
    let psi2 = try_table(domain, |y| psi_at(mu2, y, floor))?;
    let a = try_table(domain, |y| {
        let p = psi_at(mu1, &domain.normalize(ipa.apply(y)), floor)?;
        let q = psi_at(mu2, &domain.normalize(two_a.apply(y)), floor)?;
        Ok(p.zip(q).map(|(p, q)| p + q))
    })?;
    let b = try_table(domain, |y| {
        let p = psi_at(mu1, &domain.scale(2, y), floor)?;
        let q = psi_at(mu2, &domain.normalize(ipa.apply(y)), floor)?;
        Ok(p.zip(q).map(|(p, q)| p + q))
    })?;
    Ok(PsiFunctions { psi1, psi2, a, b })
}

fn try_table(domain: &DualDomain, mut f: impl FnMut(&[i64]) -> Result<Option<f64>>) -> Result<DualTable<f64>> {
    let mut err = None;
    let t = DualTable::tabulate(domain.clone(), |y| match f(y) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            None
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(t),
    }
}

/// `Σ_{S ⊆ shifts} (−1)^{|shifts|−|S|} f(y + ΣS)`, i.e. `Δ_{h_1}⋯Δ_{h_m} f(y)`.
pub fn iterated_difference(f: &DualTable<f64>, y: &[i64], shifts: &[&[i64]]) -> Option<f64> {
    let dom = f.domain();
    let m = shifts.len();
    let mut total = 0.0;
    for mask in 0u32..(1 << m) {
        let mut p = y.to_vec();
        for (j, h) in shifts.iter().enumerate() {
            if mask & (1 << j) != 0 {
                p = dom.add(&p, h);
            }
        }
        let v = f.at(&p)?;
        if (m as u32 - mask.count_ones()) % 2 == 0 {
            total += v;
        } else {
            total -= v;
        }
    }
    Some(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DifferenceReport {
    pub mixed: Report,
    /// Evaluated only when `I+α̃` is bijective on the dual.
    pub repeated: Option<Report>,
    pub repeated_asserted: bool,
}

fn distinct(mut v: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    v.sort();
    v.dedup();
    v
}

/// Third-difference equations for `A`. Shift and base points range over the whole
/// finite dual, or over `[-shift_radius, shift_radius]^d` on windows; tuples that
/// leave the table are skipped.
pub fn verify_eq9_eq10(a: &DualTable<f64>, alpha: &Endo, shift_radius: i64, tol: f64) -> Result<DifferenceReport> {
    let domain = a.domain();
    check_spec(alpha, domain)?;
    let base = match domain {
        DualDomain::Finite(_) => domain.clone(),
        DualDomain::Window { dim, .. } => DualDomain::Window { dim: *dim, radius: shift_radius },
    };
    let points = base.points();
    let adj = alpha.adjoint();
    let ipa = Endo::identity(alpha.spec()).add(&adj)?;
    let d1 = distinct(points.iter().map(|h| domain.normalize(ipa.apply(h))).collect());
    let d2 = distinct(points.iter().map(|h| domain.scale(2, h)).collect());

    let mut scan = Scan::new();
    for u in &points {
        for h in &points {
            for s1 in &d1 {
                for s2 in &d2 {
                    if let Some(r) = iterated_difference(a, u, &[h, s2, s1]) {
                        scan.push(r.abs(), || vec![u.clone(), h.clone(), s2.clone(), s1.clone()]);
                    }
                }
            }
        }
    }
    let mixed = scan.finish("mixed third difference", Method::FiniteDifference, base.describe(), tol);

    let bijective = match alpha.spec() {
        GroupSpec::Finite { .. } => ipa.is_bijective()?,
        GroupSpec::Torus { .. } => ipa.matrix().det().abs() == 1,
    };
    let repeated = if bijective {
        let mut scan = Scan::new();
        for y in &points {
            for h in &points {
                for k in &d2 {
                    if let Some(r) = iterated_difference(a, y, &[k, h, h]) {
                        scan.push(r.abs(), || vec![y.clone(), k.clone(), h.clone()]);
                    }
                }
            }
        }
        Some(scan.finish("repeated third difference", Method::FiniteDifference, base.describe(), tol))
    } else {
        None
    };
    Ok(DifferenceReport { mixed, repeated_asserted: bijective, repeated })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CosetConstant {
    pub representative: Vec<i64>,
    pub value: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    /// `Q` with `φ(y) = ⟨Qy, y⟩`; the zero matrix on finite groups.
    pub quadratic: Vec<Vec<f64>>,
    pub constants: Vec<CosetConstant>,
    /// Largest `|A(y) − φ(y) − r_ι|` over defined points.
    pub residual: f64,
    pub tolerance: f64,
    pub certified: bool,
}

/// Splits `A = φ + r_ι` on the cosets of `Y^(2) = 2Y`.
pub fn decompose_a(a: &DualTable<f64>, tol: f64) -> Result<Decomposition> {
    match a.domain() {
        DualDomain::Finite(g) => Ok(decompose_finite(a, g, tol)),
        DualDomain::Window { dim, .. } => decompose_torus(a, *dim, tol),
    }
}

fn decompose_finite(a: &DualTable<f64>, g: &FiniteGroup, tol: f64) -> Decomposition {
    let n = g.order();
    let doubles: Vec<usize> = {
        let mut d: Vec<usize> = (0..n).map(|y| g.scale_idx(2, y)).collect();
        d.sort_unstable();
        d.dedup();
        d
    };
    let mut rep_of = vec![usize::MAX; n];
    let mut constants = Vec::new();
    let mut residual: f64 = 0.0;
    for y in 0..n {
        if rep_of[y] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = doubles.iter().map(|&d| g.add_idx(y, d)).collect();
        let vals: Vec<f64> = members.iter().filter_map(|&m| a.values()[m]).collect();
        for &m in &members {
            rep_of[m] = y;
        }
        let value = vals.first().copied().unwrap_or(f64::NAN);
        for v in &vals {
            residual = residual.max((v - value).abs());
        }
        constants.push(CosetConstant { representative: g.element(y), value, points: vals.len() });
    }
    Decomposition {
        quadratic: vec![vec![0.0; g.rank()]; g.rank()],
        constants,
        certified: residual < tol,
        residual,
        tolerance: tol,
    }
}

fn decompose_torus(a: &DualTable<f64>, dim: usize, tol: f64) -> Result<Decomposition> {
    let monomials: Vec<(usize, usize)> = (0..dim).flat_map(|i| (i..dim).map(move |j| (i, j))).collect();
    let even: Vec<(Vec<i64>, f64)> = a.defined().filter(|(y, _)| y.iter().all(|c| c % 2 == 0)).collect();
    let a0 = a.at(&vec![0; dim]).ok_or_else(|| Error::WindowTooSmall { point: vec![0; dim] })?;
    let design = DMatrix::from_fn(even.len(), monomials.len(), |r, c| {
        let (i, j) = monomials[c];
        (even[r].0[i] * even[r].0[j]) as f64
    });
    let rhs = DVector::from_iterator(even.len(), even.iter().map(|(_, v)| v - a0));
    let coef = design
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::Inconsistency(format!("least squares failed: {e}")))?;
    let mut q = vec![vec![0.0; dim]; dim];
    for (c, &(i, j)) in monomials.iter().enumerate() {
        if i == j {
            q[i][i] = coef[c];
        } else {
            q[i][j] = coef[c] / 2.0;
            q[j][i] = coef[c] / 2.0;
        }
    }
    let phi = |y: &[i64]| crate::torus::quadratic_form(&q, y);
    let mut constants = Vec::new();
    let mut residual: f64 = 0.0;
    for mask in 0..(1usize << dim) {
        let rep: Vec<i64> = (0..dim).map(|j| ((mask >> (dim - 1 - j)) & 1) as i64).collect();
        let diffs: Vec<f64> = a
            .defined()
            .filter(|(y, _)| y.iter().zip(&rep).all(|(c, r)| (c - r).rem_euclid(2) == 0))
            .map(|(y, v)| v - phi(&y))
            .collect();
        let value = if diffs.is_empty() { f64::NAN } else { diffs.iter().sum::<f64>() / diffs.len() as f64 };
        for d in &diffs {
            residual = residual.max((d - value).abs());
        }
        constants.push(CosetConstant { representative: rep, value, points: diffs.len() });
    }
    Ok(Decomposition { quadratic: q, constants, certified: residual < tol, residual, tolerance: tol })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    /// Whether the measure lies in `Γ(X) * M¹(G)`.
    pub member: bool,
    pub evidence: Report,
}

/// Finite groups: the support lies in a single coset `x + G`.
pub fn membership_finite<T: Scalar>(mu: &FiniteMeasure<T>) -> Result<MembershipReport> {
    let g = mu.group();
    let two_torsion = torsion_subgroup_order2(&mu.spec())?;
    let support = mu.support();
    let x = *support.first().ok_or_else(|| Error::InvalidMeasure("empty support".into()))?;
    let mut scan = Scan::new();
    let mut outside = 0usize;
    for &s in &support {
        let inside = two_torsion.contains_idx(g.sub_idx(s, x));
        if !inside {
            outside += 1;
        }
        scan.push(if inside { 0.0 } else { 1.0 }, || vec![g.element(x), g.element(s)]);
    }
    let mut evidence = scan.finish("support in x + G", Method::Support, format!("Z{:?}", g.orders()), 0.5);
    evidence.max_residual = outside as f64;
    evidence.verdict = outside == 0;
    Ok(MembershipReport { member: outside == 0, evidence })
}

/// Tori: `−ln|μ̂|` restricted to `2Z^d` satisfies the parallelogram law on
/// `u, v ∈ 2Z^d ∩ [-radius, radius]^d`.
pub fn membership_torus(f: &TorusCharFn, radius: i64, tol: f64) -> Result<MembershipReport> {
    let dim = f.dim();
    let psi = |y: &[i64]| -> Result<f64> {
        let c = f.get(y).ok_or_else(|| Error::WindowTooSmall { point: y.to_vec() })?;
        let m = c.norm();
        if m == 0.0 || !m.is_finite() {
            return Err(Error::VanishingCharFn { point: y.to_vec() });
        }
        Ok(-m.ln())
    };
    let half = radius.div_euclid(2);
    let pts: Vec<Vec<i64>> = (0..((2 * half + 1) as usize).pow(dim as u32))
        .map(|i| crate::dual::box_point(dim, half, i).into_iter().map(|c| 2 * c).collect())
        .collect();
    let mut scan = Scan::new();
    for u in &pts {
        for v in &pts {
            let p: Vec<i64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
            let m = sub(u, v);
            if f.get(&p).is_none() || f.get(&m).is_none() {
                continue;
            }
            let r = psi(&p)? + psi(&m)? - 2.0 * psi(u)? - 2.0 * psi(v)?;
            scan.push(r.abs(), || vec![u.clone(), v.clone()]);
        }
    }
    let evidence = scan.finish(
        "parallelogram law on 2Z^d",
        Method::Parallelogram,
        format!("2Z^{dim} ∩ [-{radius},{radius}]^{dim}"),
        tol,
    );
    Ok(MembershipReport { member: evidence.verdict, evidence })
}

/// `ψ(u+v) + ψ(u−v) − 2ψ(u) − 2ψ(v)` with `ψ = −ln|μ̂|`.
pub fn parallelogram_value(f: &TorusCharFn, u: &[i64], v: &[i64]) -> Result<f64> {
    let psi = |y: Vec<i64>| -> Result<f64> {
        let c = f.get(&y).ok_or(Error::WindowTooSmall { point: y.clone() })?;
        if c.norm() == 0.0 {
            return Err(Error::VanishingCharFn { point: y });
        }
        Ok(-c.norm().ln())
    };
    let p = u.iter().zip(v).map(|(a, b)| a + b).collect();
    Ok(psi(p)? + psi(sub(u, v))? - 2.0 * psi(u.to_vec())? - 2.0 * psi(v.to_vec())?)
}

/// The iid pair `(μ, μ)` for a distribution supported on `Ker(I+α)`.
pub fn kernel_witness<T: Scalar>(alpha: &Endo, mu: &FiniteMeasure<T>) -> Result<(FiniteMeasure<T>, FiniteMeasure<T>)> {
    if alpha.spec() != &mu.spec() {
        return Err(Error::SpecMismatch);
    }
    let report = check_condition_d1(alpha)?;
    if report.is_trivial {
        return Err(Error::TrivialKernel);
    }
    let ipa = Endo::identity(alpha.spec()).add(alpha)?;
    for s in mu.support() {
        let x = mu.group().element(s);
        if ipa.apply(&x).iter().any(|&c| c != 0) {
            return Err(Error::SupportOutsideKernel { point: x });
        }
    }
    Ok((mu.clone(), mu.clone()))
}

/// Dimension of the space of `φ: Y → ℝ` with `φ(u+v) + φ(u−v) = 2φ(u) + 2φ(v)`,
/// by exact elimination.
pub fn quadratic_functional_kernel_dim(spec: &GroupSpec) -> Result<usize> {
    let g = spec.finite_group()?;
    g.check_cap(crate::group::MAX_ENUMERATION_ORDER)?;
    let n = g.order();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for u in 0..n {
        for v in u..n {
            let mut row = vec![0i64; n];
            row[g.add_idx(u, v)] += 1;
            row[g.sub_idx(u, v)] += 1;
            row[u] -= 2;
            row[v] -= 2;
            if row.iter().any(|&c| c != 0) {
                rows.push(row.into_iter().map(|c| BigRational::from_integer(c.into())).collect());
            }
        }
    }
    Ok(n - rank(rows, n))
}

fn rank(mut rows: Vec<Vec<BigRational>>, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = BigRational::one() / rows[r][c].clone();
        let pivot: Vec<BigRational> = rows[r].iter().map(|x| x * &inv).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot).skip(c) {
                    *x -= &f * p;
                }
            }
        }
        rows[r] = pivot;
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    debug_assert!(rows.iter().skip(r).all(|row| row.iter().all(|x| !x.is_positive() && !x.is_negative())));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{abelian_groups_up_to, FiniteSubgroup};
    use crate::torus::GaussianParams;

    fn fin(orders: &[u64]) -> GroupSpec {
        GroupSpec::finite(orders).unwrap()
    }

    fn meas(spec: &GroupSpec, m: &[f64]) -> FiniteMeasure<f64> {
        FiniteMeasure::new(spec, m.to_vec()).unwrap()
    }

    fn both(mu1: &FiniteMeasure<f64>, mu2: &FiniteMeasure<f64>, alpha: &Endo) -> (bool, bool) {
        let dom = DualDomain::Finite(mu1.group().clone());
        let c = check_symmetry_charfn(&charfn_table(mu1), &charfn_table(mu2), alpha, &dom, FINITE_TOL).unwrap();
        let b = brute_force_conditional_symmetry(mu1, mu2, alpha, FINITE_TOL).unwrap();
        (c.verdict, b.verdict)
    }

    #[test]
    fn degenerate_examples() {
        let s = fin(&[5]);
        let two = Endo::scalar(&s, 2);
        let e0 = FiniteMeasure::<f64>::dirac(&s, &[0]).unwrap();
        assert_eq!(both(&e0, &e0, &two), (true, true));
        let e1 = FiniteMeasure::<f64>::dirac(&s, &[1]).unwrap();
        assert_eq!(both(&e1, &e1, &two), (false, false));
        let half = meas(&s, &[0.5, 0.5, 0.0, 0.0, 0.0]);
        assert_eq!(both(&half, &e0, &two), (false, false));
        let haar = FiniteMeasure::<f64>::uniform(&s).unwrap();
        assert_eq!(both(&haar, &haar, &two), (true, true));
    }

    #[test]
    fn kernel_examples() {
        let s = fin(&[3]);
        let two = Endo::scalar(&s, 2);
        let (a, b) = kernel_witness(&two, &FiniteMeasure::<f64>::uniform(&s).unwrap()).unwrap();
        assert!(brute_force_conditional_symmetry(&a, &b, &two, FINITE_TOL).unwrap().verdict);
        let mu = meas(&s, &[0.2, 0.7, 0.1]);
        let (a, b) = kernel_witness(&two, &mu).unwrap();
        assert!(brute_force_conditional_symmetry(&a, &b, &two, FINITE_TOL).unwrap().verdict);

        let s5 = fin(&[5]);
        let four = Endo::scalar(&s5, 4);
        let mu = meas(&s5, &[0.6, 0.4, 0.0, 0.0, 0.0]);
        let (a, b) = kernel_witness(&four, &mu).unwrap();
        assert!(brute_force_conditional_symmetry(&a, &b, &four, FINITE_TOL).unwrap().verdict);
        assert!(matches!(kernel_witness(&Endo::identity(&s5), &mu), Err(Error::TrivialKernel)));

        let s6 = fin(&[6]);
        let five = Endo::scalar(&s6, 5);
        assert!(kernel_witness(&five, &FiniteMeasure::<f64>::dirac(&s6, &[0]).unwrap()).is_ok());
        let three = Endo::scalar(&fin(&[4]), 3);
        // Ker(I + 3) on Z_4 is everything; on Z_8 with 3 it is {0, 2, 4, 6}
        assert!(kernel_witness(&three, &FiniteMeasure::<f64>::uniform(&fin(&[4])).unwrap()).is_ok());
        let s8 = fin(&[8]);
        let three8 = Endo::scalar(&s8, 3);
        assert!(matches!(
            kernel_witness(&three8, &FiniteMeasure::<f64>::dirac(&s8, &[1]).unwrap()),
            Err(Error::SupportOutsideKernel { .. })
        ));
    }

    #[test]
    fn exact_brute_force_matches_float() {
        let s = fin(&[5]);
        let two = Endo::scalar(&s, 2);
        let q = FiniteMeasure::<BigRational>::from_weights(&s, &[1, 1, 0, 0, 0]).unwrap();
        let e0 = FiniteMeasure::<BigRational>::dirac(&s, &[0]).unwrap();
        let r = brute_force_conditional_symmetry(&q, &e0, &two, FINITE_TOL).unwrap();
        assert!(!r.verdict);
        assert!((r.max_residual - 0.5).abs() < 1e-15);
        let h = FiniteMeasure::<BigRational>::uniform(&s).unwrap();
        let r = brute_force_conditional_symmetry(&h, &h, &two, FINITE_TOL).unwrap();
        assert!(r.verdict && r.max_residual == 0.0);
    }

    #[test]
    fn independence_on_z3_with_identity() {
        let s = fin(&[3]);
        let id = Endo::identity(&s);
        let dom = DualDomain::Finite(s.finite_group().unwrap());
        // α = I makes L2 = L1, so symmetry forces ξ1 + ξ2 = 0 almost surely
        let e1 = FiniteMeasure::<f64>::dirac(&s, &[1]).unwrap();
        let e2 = FiniteMeasure::<f64>::dirac(&s, &[2]).unwrap();
        assert!(brute_force_conditional_symmetry(&e1, &e2, &id, FINITE_TOL).unwrap().verdict);
        let r = check_independence_sum_difference(&charfn_table(&e1), &charfn_table(&e2), &id, &dom, FINITE_TOL).unwrap();
        assert!(r.verdict, "{r:?}");
        let l = lemma21_check(&e1, &e2, &id, FINITE_TOL).unwrap();
        assert!(l.implication_holds && l.factorization.is_some());
        let haar = FiniteMeasure::<f64>::uniform(&s).unwrap();
        assert!(!brute_force_conditional_symmetry(&haar, &e1, &id, FINITE_TOL).unwrap().verdict);
        let mu = meas(&s, &[0.2, 0.3, 0.5]);
        let l = lemma21_check(&mu, &mu, &id, FINITE_TOL).unwrap();
        assert!(!l.symmetry.verdict && l.factorization.is_none() && l.implication_holds);
    }

    #[test]
    fn degenerate_pairs_satisfy_independence() {
        let s = fin(&[2, 4]);
        let dom = DualDomain::Finite(s.finite_group().unwrap());
        let a = FiniteMeasure::<f64>::dirac(&s, &[1, 3]).unwrap();
        let b = FiniteMeasure::<f64>::dirac(&s, &[0, 2]).unwrap();
        for alpha in crate::endo::all_automorphisms(&s).unwrap() {
            let r = check_independence_sum_difference(&charfn_table(&a), &charfn_table(&b), &alpha, &dom, FINITE_TOL).unwrap();
            assert!(r.verdict);
        }
    }

    #[test]
    fn psi_and_differences_trivial() {
        let s = fin(&[3]);
        let e = FiniteMeasure::<f64>::dirac(&s, &[1]).unwrap();
        let two = Endo::scalar(&s, 2);
        let dom = DualDomain::Finite(s.finite_group().unwrap());
        let p = derive_a_b(&charfn_table(&e), &charfn_table(&e), &two, &dom).unwrap();
        assert!(p.a.defined().all(|(_, v)| v.abs() < 1e-15));
        assert!(p.psi1.defined().all(|(_, v)| v.abs() < 1e-15));
        let d = verify_eq9_eq10(&p.a, &two, 0, FINITE_TOL).unwrap();
        assert!(d.mixed.verdict);
        // I + 2 = 0 on Z_3
        assert!(!d.repeated_asserted);
        let dec = decompose_a(&p.a, 1e-10).unwrap();
        assert_eq!(dec.constants.len(), 1);
        assert!(dec.certified && dec.constants[0].value.abs() < 1e-15);

        let haar = FiniteMeasure::<f64>::uniform(&s).unwrap();
        assert!(matches!(
            derive_a_b(&charfn_table(&haar), &charfn_table(&e), &two, &dom),
            Err(Error::VanishingCharFn { .. })
        ));
    }

    #[test]
    fn quadratic_forms_have_zero_third_differences() {
        let dom = DualDomain::Window { dim: 2, radius: 8 };
        let q = vec![vec![0.7, -0.2], vec![-0.2, 1.3]];
        let a = DualTable::tabulate(dom.clone(), |y| Some(crate::torus::quadratic_form(&q, y)));
        let alpha = Endo::from_rows(&GroupSpec::torus(2).unwrap(), vec![vec![-1, 1], vec![1, -2]]).unwrap();
        let d = verify_eq9_eq10(&a, &alpha, 1, 1e-9).unwrap();
        assert!(d.mixed.verdict && d.mixed.checked > 0);
        assert!(d.repeated_asserted && d.repeated.unwrap().verdict);
        let dec = decompose_a(&a, 1e-9).unwrap();
        assert!(dec.certified);
        for i in 0..2 {
            for j in 0..2 {
                assert!((dec.quadratic[i][j] - q[i][j]).abs() < 1e-10);
            }
        }
        assert!(dec.constants.iter().all(|c| c.value.abs() < 1e-9));
    }

    #[test]
    fn torus_coset_constants_are_recovered() {
        let dom = DualDomain::Window { dim: 2, radius: 6 };
        let consts = [0.0, 0.4, -1.0, 2.5];
        let a = DualTable::tabulate(dom, |y| {
            let c = (y[0].rem_euclid(2) * 2 + y[1].rem_euclid(2)) as usize;
            Some((y[0] * y[0] + y[0] * y[1]) as f64 + consts[c])
        });
        let dec = decompose_a(&a, 1e-9).unwrap();
        assert!(dec.certified);
        for (c, want) in dec.constants.iter().zip(consts) {
            assert!((c.value - want).abs() < 1e-9);
        }
        assert!((dec.quadratic[0][1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn odd_order_has_single_coset() {
        let g = fin(&[5]).finite_group().unwrap();
        let a = DualTable::tabulate(DualDomain::Finite(g.clone()), |y| Some(if y[0] == 0 { 0.0 } else { 1.0 }));
        let dec = decompose_a(&a, 1e-10).unwrap();
        assert_eq!(dec.constants.len(), 1);
        assert!(!dec.certified);
        let g = fin(&[2, 2]).finite_group().unwrap();
        let zero = DualTable::tabulate(DualDomain::Finite(g), |_| Some(0.0));
        assert_eq!(decompose_a(&zero, 1e-10).unwrap().constants.len(), 4);
    }

    #[test]
    fn finite_membership() {
        let s = fin(&[2, 3]);
        let mu = meas(&s, &[0.5, 0.0, 0.0, 0.5, 0.0, 0.0]);
        assert!(membership_finite(&mu).unwrap().member);
        let nu = meas(&s, &[0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
        assert!(!membership_finite(&nu).unwrap().member);
        let g = torsion_subgroup_order2(&fin(&[4, 2])).unwrap();
        let h = FiniteMeasure::<f64>::haar(&g).shift(&[1, 0]).unwrap();
        assert!(membership_finite(&h).unwrap().member);
        assert!(!membership_finite(&FiniteMeasure::<f64>::haar(&FiniteSubgroup::whole(&g.group()))).unwrap().member);
    }

    #[test]
    fn gaussian_is_member() {
        let g = GaussianParams::new(vec![vec![0.3, 0.1], vec![0.1, 0.2]], Some(vec![0.4, 0.1])).unwrap();
        let f = g.to_charfn(10).unwrap();
        let r = membership_torus(&f, 4, TORUS_TOL).unwrap();
        assert!(r.member, "{r:?}");
    }

    #[test]
    fn finite_groups_admit_no_quadratic_functional() {
        for spec in abelian_groups_up_to(12) {
            assert_eq!(quadratic_functional_kernel_dim(&spec).unwrap(), 0, "{spec:?}");
        }
    }

    #[test]
    fn rank_of_a_real_system() {
        use num_bigint::BigInt;
        let r = |v: &[i64]| v.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect::<Vec<_>>();
        assert_eq!(rank(vec![r(&[1, 2]), r(&[2, 4])], 2), 1);
        assert_eq!(rank(vec![r(&[0, 1]), r(&[1, 0]), r(&[1, 1])], 2), 2);
    }
}
