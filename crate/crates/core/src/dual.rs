//! Functions on dual groups: whole finite duals or boxes `[-R, R]^d` in `Z^d`.

use std::ops::Sub;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupSpec};

/// Anything that can be evaluated at a dual point; `None` means "not stored here".
pub trait DualFunction<V> {
    fn at(&self, y: &[i64]) -> Option<V>;
}

impl<V, F: Fn(&[i64]) -> Option<V>> DualFunction<V> for F {
    fn at(&self, y: &[i64]) -> Option<V> {
        self(y)
    }
}

/// Evaluates `f` or reports the missing point.
pub fn eval<V>(f: &impl DualFunction<V>, y: &[i64]) -> Result<V> {
    f.at(y).ok_or_else(|| Error::WindowTooSmall { point: y.to_vec() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualDomain {
    /// The whole dual of a finite product (identified with the group itself).
    Finite(FiniteGroup),
    /// The box `[-radius, radius]^dim` in `Z^dim`.
    Window { dim: usize, radius: i64 },
}

impl DualDomain {
    pub fn for_spec(spec: &GroupSpec, radius: i64) -> Result<Self> {
        match spec {
            GroupSpec::Finite { .. } => Ok(DualDomain::Finite(spec.finite_group()?)),
            GroupSpec::Torus { dim } => Ok(DualDomain::Window { dim: *dim, radius }),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DualDomain::Finite(g) => g.rank(),
            DualDomain::Window { dim, .. } => *dim,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DualDomain::Finite(g) => g.order(),
            DualDomain::Window { dim, radius } => ((2 * radius + 1) as usize).pow(*dim as u32),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, DualDomain::Finite(_))
    }

    pub fn point(&self, idx: usize) -> Vec<i64> {
        match self {
            DualDomain::Finite(g) => g.element(idx),
            DualDomain::Window { dim, radius } => box_point(*dim, *radius, idx),
        }
    }

    pub fn points(&self) -> Vec<Vec<i64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn index_of(&self, y: &[i64]) -> Option<usize> {
        match self {
            DualDomain::Finite(g) => Some(g.index_of(y)),
            DualDomain::Window { dim, radius } => box_index(*dim, *radius, y),
        }
    }

    /// Reduces coordinates mod the cyclic orders (identity on windows).
    pub fn normalize(&self, y: Vec<i64>) -> Vec<i64> {
        match self {
            DualDomain::Finite(g) => g.reduce(&y),
            DualDomain::Window { .. } => y,
        }
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        self.normalize(a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        self.normalize(a.iter().zip(b).map(|(x, y)| x - y).collect())
    }

    pub fn scale(&self, c: i64, a: &[i64]) -> Vec<i64> {
        self.normalize(a.iter().map(|x| c * x).collect())
    }

    pub fn neg(&self, a: &[i64]) -> Vec<i64> {
        self.scale(-1, a)
    }

    pub fn describe(&self) -> String {
        match self {
            DualDomain::Finite(g) => format!("whole dual of Z{:?}", g.orders()),
            DualDomain::Window { dim, radius } => format!("Z^{dim} ∩ [-{radius},{radius}]^{dim}"),
        }
    }

    pub fn check_endo(&self, e: &Endo) -> Result<()> {
        let ok = match (self, e.spec()) {
            (DualDomain::Finite(g), GroupSpec::Finite { .. }) => &e.spec().finite_group()? == g,
            (DualDomain::Window { dim, .. }, GroupSpec::Torus { dim: d }) => dim == d,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }
}

pub(crate) fn box_point(dim: usize, radius: i64, mut idx: usize) -> Vec<i64> {
    let side = (2 * radius + 1) as usize;
    let mut y = vec![0i64; dim];
    for j in (0..dim).rev() {
        y[j] = (idx % side) as i64 - radius;
        idx /= side;
    }
    y
}

pub(crate) fn box_index(dim: usize, radius: i64, y: &[i64]) -> Option<usize> {
    debug_assert_eq!(y.len(), dim);
    let side = (2 * radius + 1) as usize;
    let mut idx = 0usize;
    for &c in y {
        if c.abs() > radius {
            return None;
        }
        idx = idx * side + (c + radius) as usize;
    }
    Some(idx)
}

/// A function tabulated on a [`DualDomain`]; points may be undefined.
#[derive(Clone, Debug, PartialEq)]
pub struct DualTable<V> {
    domain: DualDomain,
    values: Vec<Option<V>>,
}

impl<V: Clone> DualTable<V> {
    pub fn tabulate(domain: DualDomain, mut f: impl FnMut(&[i64]) -> Option<V>) -> Self {
        let values = (0..domain.len()).map(|i| f(&domain.point(i))).collect();
        DualTable { domain, values }
    }

    pub fn try_tabulate(domain: DualDomain, mut f: impl FnMut(&[i64]) -> Result<V>) -> Result<Self> {
        let values = (0..domain.len())
            .map(|i| f(&domain.point(i)).map(Some))
            .collect::<Result<Vec<_>>>()?;
        Ok(DualTable { domain, values })
    }

    pub fn domain(&self) -> &DualDomain {
        &self.domain
    }

    pub fn values(&self) -> &[Option<V>] {
        &self.values
    }

    pub fn defined(&self) -> impl Iterator<Item = (Vec<i64>, V)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.clone().map(|v| (self.domain.point(i), v)))
    }

    pub fn map<W: Clone>(&self, f: impl Fn(&V) -> W) -> DualTable<W> {
        DualTable {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| v.as_ref().map(&f)).collect(),
        }
    }
}

impl<V: Clone> DualFunction<V> for DualTable<V> {
    fn at(&self, y: &[i64]) -> Option<V> {
        self.domain.index_of(y).and_then(|i| self.values[i].clone())
    }
}

/// `Δ_h f(y) = f(y + h) − f(y)`; undefined wherever either term is.
pub fn finite_difference<V>(f: &DualTable<V>, h: &[i64]) -> DualTable<V>
where
    V: Clone + Sub<Output = V>,
{
    let domain = f.domain().clone();
    DualTable::tabulate(domain.clone(), |y| {
        let shifted = f.at(&domain.add(y, h))?;
        Some(shifted - f.at(y)?)
    })
}
