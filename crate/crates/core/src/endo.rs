//! Integer-matrix endomorphisms, adjoints and kernel conditions.
//!
//! Matrices act on column vectors: `α(x) = M·x` (coordinates reduced mod
//! `n_i` on finite products, mod 1 on tori). The adjoint `α̃` satisfies
//! `(αx, y) = (x, α̃y)`; on tori and on products of equal cyclic orders it is the
//! transpose, in general it is the scaled transpose `M̃_ji = M_ij · n_j / n_i`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupSpec, MAX_ENUMERATION_ORDER};
use crate::lattice::{DualSublattice, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Endo {
    spec: GroupSpec,
    matrix: IntMatrix,
}

impl Endo {
    /// Validates the shape and, on finite products, that `n_j·M_ij ≡ 0 (mod n_i)`.
    /// Entries are stored reduced mod `n_i` (row `i` lands in `Z_{n_i}`).
    pub fn new(spec: &GroupSpec, matrix: IntMatrix) -> Result<Self> {
        let rank = spec.rank();
        if matrix.dim() != rank {
            return Err(Error::DimensionMismatch { expected: rank, found: matrix.dim() });
        }
        let matrix = match spec {
            GroupSpec::Torus { .. } => matrix,
            GroupSpec::Finite { orders } => {
                let mut m = matrix;
                for i in 0..rank {
                    let ni = orders[i] as i64;
                    for j in 0..rank {
                        let nj = orders[j] as i64;
                        let v = m.get(i, j);
                        if (nj * v).rem_euclid(ni) != 0 {
                            return Err(Error::InvalidMatrix(format!(
                                "entry ({i},{j}) = {v} does not descend: {nj}*{v} is not 0 mod {ni}"
                            )));
                        }
                        m.set(i, j, v.rem_euclid(ni));
                    }
                }
                m
            }
        };
        Ok(Endo { spec: spec.clone(), matrix })
    }

    pub fn from_rows(spec: &GroupSpec, rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(spec, IntMatrix::from_rows(rows)?)
    }

    pub fn identity(spec: &GroupSpec) -> Self {
        Self::scalar(spec, 1)
    }

    /// Multiplication by `c`.
    pub fn scalar(spec: &GroupSpec, c: i64) -> Self {
        Self::new(spec, IntMatrix::identity(spec.rank()).scale(c)).expect("scalar maps descend")
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    fn same_spec(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_spec(other)?;
        Self::new(&self.spec, self.matrix.add(&other.matrix))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_spec(other)?;
        Self::new(&self.spec, self.matrix.sub(&other.matrix))
    }

    pub fn scale(&self, c: i64) -> Self {
        Self::new(&self.spec, self.matrix.scale(c)).expect("multiples of a valid map descend")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_spec(other)?;
        Self::new(&self.spec, self.matrix.mul(&other.matrix))
    }

    pub fn adjoint(&self) -> Self {
        let matrix = match &self.spec {
            GroupSpec::Torus { .. } => self.matrix.transpose(),
            GroupSpec::Finite { orders } => {
                let n = orders.len();
                let mut t = IntMatrix::zeros(n);
                for i in 0..n {
                    for j in 0..n {
                        let (ni, nj) = (orders[i] as i64, orders[j] as i64);
                        t.set(j, i, self.matrix.get(i, j) * nj / ni);
                    }
                }
                t
            }
        };
        Self::new(&self.spec, matrix).expect("adjoint of a valid map descends")
    }

    /// Image of an integer point; reduced mod the cyclic orders on finite products.
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        let y = self.matrix.mul_vec(x);
        match &self.spec {
            GroupSpec::Finite { orders } => {
                y.iter().zip(orders).map(|(a, &n)| a.rem_euclid(n as i64)).collect()
            }
            GroupSpec::Torus { .. } => y,
        }
    }

    /// Image of an angle vector on a torus, reduced mod 1.
    pub fn apply_angles(&self, t: &[f64]) -> Vec<f64> {
        let n = self.matrix.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix.get(i, j) as f64 * t[j]).sum::<f64>().rem_euclid(1.0))
            .collect()
    }

    /// Index-to-index table of the map on a finite product.
    pub fn index_map(&self) -> Result<Vec<usize>> {
        let g = self.spec.finite_group()?;
        Ok(g.elements().map(|x| g.index_of(&self.apply(&x))).collect())
    }

    pub fn is_automorphism(&self) -> Result<bool> {
        match &self.spec {
            GroupSpec::Torus { .. } => Ok(self.matrix.det().abs() == 1),
            GroupSpec::Finite { .. } => {
                let g = self.spec.finite_group()?;
                g.check_cap(MAX_ENUMERATION_ORDER)?;
                let map = self.index_map()?;
                let mut seen = vec![false; g.order()];
                for i in map {
                    if std::mem::replace(&mut seen[i], true) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Bijective on the underlying group (finite) or on the dual lattice `Z^d` (torus).
    pub fn is_bijective(&self) -> Result<bool> {
        self.is_automorphism()
    }

    /// Elements of the kernel of a map on a finite product.
    pub fn kernel(&self) -> Result<Vec<Vec<i64>>> {
        let g = self.spec.finite_group()?;
        g.check_cap(MAX_ENUMERATION_ORDER)?;
        Ok(g.elements().filter(|x| self.apply(x).iter().all(|&c| c == 0)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelReport {
    pub matrix: IntMatrix,
    /// Enumerated kernel of `I+α` (finite products).
    pub kernel_elements: Option<Vec<Vec<i64>>>,
    /// `det(I+α)`; the torus kernel is trivial iff this is nonzero.
    pub det: Option<i64>,
    pub is_trivial: bool,
}

/// Condition `Ker(I+α) = {0}`.
pub fn check_condition_d1(alpha: &Endo) -> Result<KernelReport> {
    if !alpha.is_automorphism()? {
        return Err(Error::NotAutomorphism);
    }
    let ipa = Endo::identity(alpha.spec()).add(alpha)?;
    match alpha.spec() {
        GroupSpec::Torus { .. } => {
            let det = ipa.matrix().det();
            Ok(KernelReport {
                matrix: ipa.matrix().clone(),
                kernel_elements: None,
                det: Some(det),
                is_trivial: det != 0,
            })
        }
        GroupSpec::Finite { .. } => {
            let kernel = ipa.kernel()?;
            Ok(KernelReport {
                matrix: ipa.matrix().clone(),
                is_trivial: kernel.len() == 1,
                kernel_elements: Some(kernel),
                det: None,
            })
        }
    }
}

/// `e(Z^d)` for a nonsingular map on the dual of a torus.
pub fn image_lattice(e: &Endo) -> Result<DualSublattice> {
    if e.spec().is_finite() {
        return Err(Error::WrongGroupKind { expected: "torus" });
    }
    DualSublattice::new(e.matrix().clone())
}

/// Inclusion `Ker(I+α) ⊂ G`: every kernel element satisfies `2x = 0`.
pub fn check_necessary_condition_9a(alpha: &Endo) -> Result<bool> {
    let g = alpha.spec().finite_group()?;
    let ipa = Endo::identity(alpha.spec()).add(alpha)?;
    Ok(ipa.kernel()?.iter().all(|x| {
        x.iter().zip(g.orders()).all(|(a, n)| (2 * a).rem_euclid(*n) == 0)
    }))
}

/// All endomorphisms of a finite product (each exactly once, entries reduced).
pub fn all_endomorphisms(spec: &GroupSpec) -> Result<Vec<Endo>> {
    let g: FiniteGroup = spec.finite_group()?;
    g.check_cap(MAX_ENUMERATION_ORDER)?;
    let n = g.rank();
    let orders = g.orders();
    // admissible values for entry (i, j): v in [0, n_i) with n_j v ≡ 0 mod n_i
    let choices: Vec<Vec<i64>> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            (0..orders[i]).filter(|v| (orders[j] * v) % orders[i] == 0).collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut pos = vec![0usize; n * n];
    loop {
        let mut m = IntMatrix::zeros(n);
        for k in 0..n * n {
            m.set(k / n, k % n, choices[k][pos[k]]);
        }
        out.push(Endo { spec: spec.clone(), matrix: m });
        let mut k = 0;
        loop {
            if k == n * n {
                return Ok(out);
            }
            pos[k] += 1;
            if pos[k] < choices[k].len() {
                break;
            }
            pos[k] = 0;
            k += 1;
        }
    }
}

pub fn all_automorphisms(spec: &GroupSpec) -> Result<Vec<Endo>> {
    let mut out = Vec::new();
    for e in all_endomorphisms(spec)? {
        if e.is_automorphism()? {
            out.push(e);
        }
    }
    Ok(out)
}
