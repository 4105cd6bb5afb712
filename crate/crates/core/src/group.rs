//! Concrete abelian groups: finite products of cyclic groups and tori.
//!
//! A finite product `Z_{n_1} × ... × Z_{n_k}` is its own dual under the pairing
//! `(x, y) = exp(2πi Σ x_j y_j / n_j)`. The dual of `T^d` is `Z^d`, paired with an
//! angle vector `t` by `exp(2πi <t, y>)`.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DualSublattice, IntMatrix};

/// Default cap on the order of finite groups that are enumerated element by element.
pub const MAX_ENUMERATION_ORDER: u64 = 256;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawGroupSpec")]
pub enum GroupSpec {
    Finite { orders: Vec<u64> },
    Torus { dim: usize },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawGroupSpec {
    Finite { orders: Vec<u64> },
    Torus { dim: usize },
}

impl TryFrom<RawGroupSpec> for GroupSpec {
    type Error = Error;

    fn try_from(raw: RawGroupSpec) -> Result<Self> {
        match raw {
            RawGroupSpec::Finite { orders } => GroupSpec::finite(&orders),
            RawGroupSpec::Torus { dim } => GroupSpec::torus(dim),
        }
    }
}

impl GroupSpec {
    pub fn finite(orders: &[u64]) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidGroup("a finite product needs at least one factor".into()));
        }
        if let Some(n) = orders.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidGroup(format!("cyclic order {n} is below 2")));
        }
        orders
            .iter()
            .try_fold(1u64, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::InvalidGroup("group order overflows u64".into()))?;
        Ok(GroupSpec::Finite { orders: orders.to_vec() })
    }

    pub fn torus(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGroup("torus dimension must be positive".into()));
        }
        Ok(GroupSpec::Torus { dim })
    }

    /// Number of coordinates of elements and dual elements.
    pub fn rank(&self) -> usize {
        match self {
            GroupSpec::Finite { orders } => orders.len(),
            GroupSpec::Torus { dim } => *dim,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupSpec::Finite { .. })
    }

    /// `Some(Π n_i)` for finite groups.
    pub fn order(&self) -> Option<u64> {
        match self {
            GroupSpec::Finite { orders } => Some(orders.iter().product()),
            GroupSpec::Torus { .. } => None,
        }
    }

    pub fn finite_group(&self) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Finite { orders } => Ok(FiniteGroup::new(orders)),
            GroupSpec::Torus { .. } => Err(Error::WrongGroupKind { expected: "finite" }),
        }
    }
}

/// Index arithmetic for `Z_{n_1} × ... × Z_{n_k}`.
///
/// Elements are numbered in mixed radix with the first coordinate most
/// significant, so index order is lexicographic order of canonical coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    orders: Vec<i64>,
    strides: Vec<usize>,
    order: usize,
    exponent: i64,
}

impl FiniteGroup {
    pub fn new(orders: &[u64]) -> Self {
        let orders: Vec<i64> = orders.iter().map(|&n| n as i64).collect();
        let mut strides = vec![1usize; orders.len()];
        for i in (0..orders.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * orders[i + 1] as usize;
        }
        let order = orders.iter().map(|&n| n as usize).product();
        let exponent = orders.iter().fold(1i64, |acc, &n| acc.lcm(&n));
        FiniteGroup { orders, strides, order, exponent }
    }

    pub fn spec(&self) -> GroupSpec {
        GroupSpec::Finite { orders: self.orders.iter().map(|&n| n as u64).collect() }
    }

    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Least common multiple of the cyclic orders.
    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn check_cap(&self, cap: u64) -> Result<()> {
        if self.order as u64 > cap {
            return Err(Error::GroupTooLarge { order: self.order as u64, cap });
        }
        Ok(())
    }

    pub fn reduce(&self, x: &[i64]) -> Vec<i64> {
        x.iter().zip(&self.orders).map(|(a, n)| a.rem_euclid(*n)).collect()
    }

    pub fn index_of(&self, x: &[i64]) -> usize {
        debug_assert_eq!(x.len(), self.rank());
        x.iter()
            .zip(&self.orders)
            .zip(&self.strides)
            .map(|((a, n), s)| a.rem_euclid(*n) as usize * s)
            .sum()
    }

    pub fn element(&self, idx: usize) -> Vec<i64> {
        self.orders
            .iter()
            .zip(&self.strides)
            .map(|(n, s)| ((idx / s) % *n as usize) as i64)
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.order).map(|i| self.element(i))
    }

    fn digit(&self, idx: usize, j: usize) -> usize {
        (idx / self.strides[j]) % self.orders[j] as usize
    }

    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        (0..self.rank())
            .map(|j| {
                let n = self.orders[j] as usize;
                ((self.digit(a, j) + self.digit(b, j)) % n) * self.strides[j]
            })
            .sum()
    }

    pub fn neg_idx(&self, a: usize) -> usize {
        (0..self.rank())
            .map(|j| {
                let n = self.orders[j] as usize;
                ((n - self.digit(a, j)) % n) * self.strides[j]
            })
            .sum()
    }

    pub fn sub_idx(&self, a: usize, b: usize) -> usize {
        self.add_idx(a, self.neg_idx(b))
    }

    pub fn scale_idx(&self, c: i64, a: usize) -> usize {
        (0..self.rank())
            .map(|j| {
                let n = self.orders[j];
                ((c * self.digit(a, j) as i64).rem_euclid(n)) as usize * self.strides[j]
            })
            .sum()
    }

    /// Exponent of the pairing as a numerator over [`Self::exponent`]:
    /// `(x, y) = exp(2πi · phase / exponent)`.
    pub fn phase(&self, x: &[i64], y: &[i64]) -> i64 {
        let e = self.exponent;
        x.iter()
            .zip(y)
            .zip(&self.orders)
            .map(|((a, b), n)| ((a * b).rem_euclid(*n) * (e / n)) % e)
            .sum::<i64>()
            % e
    }

    pub fn phase_idx(&self, x: usize, y: usize) -> i64 {
        let e = self.exponent;
        (0..self.rank())
            .map(|j| {
                let n = self.orders[j];
                ((self.digit(x, j) * self.digit(y, j)) as i64 % n) * (e / n)
            })
            .sum::<i64>()
            % e
    }

    /// `exp(2πi k / exponent)` for `k = 0..exponent`.
    pub fn roots_of_unity(&self) -> Vec<Complex64> {
        let e = self.exponent;
        (0..e).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / e as f64)).collect()
    }

    pub fn element_order(&self, x: &[i64]) -> i64 {
        x.iter().zip(&self.orders).fold(1i64, |acc, (a, n)| {
            let a = a.rem_euclid(*n);
            acc.lcm(&(n / a.gcd(n)))
        })
    }
}

/// A point of a group: integer coordinates for finite products, angles mod 1 for tori.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupElement {
    Discrete(Vec<i64>),
    Angles(Vec<f64>),
}

impl GroupElement {
    pub fn zero(spec: &GroupSpec) -> Self {
        match spec {
            GroupSpec::Finite { orders } => GroupElement::Discrete(vec![0; orders.len()]),
            GroupSpec::Torus { dim } => GroupElement::Angles(vec![0.0; *dim]),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            GroupElement::Discrete(v) => v.len(),
            GroupElement::Angles(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A character: integer coordinates (mod `n_i` for finite products, unbounded for tori).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DualElement(pub Vec<i64>);

impl DualElement {
    pub fn zero(rank: usize) -> Self {
        DualElement(vec![0; rank])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for DualElement {
    fn from(v: Vec<i64>) -> Self {
        DualElement(v)
    }
}

pub fn pairing(spec: &GroupSpec, x: &GroupElement, y: &DualElement) -> Result<Complex64> {
    let rank = spec.rank();
    if x.len() != rank {
        return Err(Error::DimensionMismatch { expected: rank, found: x.len() });
    }
    if y.0.len() != rank {
        return Err(Error::DimensionMismatch { expected: rank, found: y.0.len() });
    }
    match (spec, x) {
        (GroupSpec::Finite { .. }, GroupElement::Discrete(x)) => {
            let g = spec.finite_group()?;
            let p = g.phase(x, &y.0);
            Ok(Complex64::from_polar(1.0, TAU * p as f64 / g.exponent() as f64))
        }
        (GroupSpec::Torus { .. }, GroupElement::Angles(t)) => Ok(torus_pairing(t, &y.0)),
        (GroupSpec::Finite { .. }, GroupElement::Angles(_)) => {
            Err(Error::WrongGroupKind { expected: "torus" })
        }
        (GroupSpec::Torus { .. }, GroupElement::Discrete(_)) => {
            Err(Error::WrongGroupKind { expected: "finite" })
        }
    }
}

/// `exp(2πi <t, y>)` for an angle vector `t`.
pub fn torus_pairing(t: &[f64], y: &[i64]) -> Complex64 {
    let s: f64 = t.iter().zip(y).map(|(a, &b)| a * b as f64).sum();
    Complex64::from_polar(1.0, TAU * s.rem_euclid(1.0))
}

/// A subgroup of a finite product, stored as its sorted element indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteSubgroup {
    ambient: Vec<u64>,
    indices: Vec<usize>,
}

impl FiniteSubgroup {
    fn from_index_set(group: &FiniteGroup, set: BTreeSet<usize>) -> Self {
        FiniteSubgroup {
            ambient: group.orders().iter().map(|&n| n as u64).collect(),
            indices: set.into_iter().collect(),
        }
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        Self::from_index_set(group, BTreeSet::from([0]))
    }

    pub fn whole(group: &FiniteGroup) -> Self {
        Self::from_index_set(group, (0..group.order()).collect())
    }

    /// Smallest subgroup containing `generators`.
    pub fn generated(group: &FiniteGroup, generators: &[Vec<i64>]) -> Result<Self> {
        for g in generators {
            if g.len() != group.rank() {
                return Err(Error::DimensionMismatch { expected: group.rank(), found: g.len() });
            }
        }
        let gens: Vec<usize> = generators.iter().map(|g| group.index_of(g)).collect();
        Ok(Self::closure(group, BTreeSet::from([0]), &gens))
    }

    fn closure(group: &FiniteGroup, mut set: BTreeSet<usize>, gens: &[usize]) -> Self {
        let mut frontier: Vec<usize> = set.iter().copied().collect();
        while let Some(a) = frontier.pop() {
            for &g in gens {
                let s = group.add_idx(a, g);
                if set.insert(s) {
                    frontier.push(s);
                }
            }
        }
        Self::from_index_set(group, set)
    }

    /// `{x : pred(x)}`; the caller asserts the predicate cuts out a subgroup.
    pub fn from_predicate(group: &FiniteGroup, pred: impl Fn(&[i64]) -> bool) -> Self {
        let set = (0..group.order()).filter(|&i| pred(&group.element(i))).collect();
        Self::from_index_set(group, set)
    }

    pub fn group(&self) -> FiniteGroup {
        FiniteGroup::new(&self.ambient)
    }

    pub fn ambient(&self) -> GroupSpec {
        GroupSpec::Finite { orders: self.ambient.clone() }
    }

    pub fn order(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn elements(&self) -> Vec<Vec<i64>> {
        let g = self.group();
        self.indices.iter().map(|&i| g.element(i)).collect()
    }

    pub fn contains_idx(&self, idx: usize) -> bool {
        self.indices.binary_search(&idx).is_ok()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.contains_idx(self.group().index_of(x))
    }

    pub fn is_subgroup(&self) -> bool {
        let g = self.group();
        self.contains_idx(0)
            && self.indices.iter().all(|&a| {
                self.contains_idx(g.neg_idx(a))
                    && self.indices.iter().all(|&b| self.contains_idx(g.add_idx(a, b)))
            })
    }
}

/// `G = {x : 2x = 0}`, the subgroup generated by the elements of order 2.
pub fn torsion_subgroup_order2(spec: &GroupSpec) -> Result<FiniteSubgroup> {
    let g = spec.finite_group()?;
    Ok(FiniteSubgroup::from_predicate(&g, |x| {
        x.iter().zip(g.orders()).all(|(a, n)| (2 * a).rem_euclid(*n) == 0)
    }))
}

/// `A(Y, K) = {y : (x, y) = 1 for all x ∈ K}`, as a subgroup of the (self-)dual.
pub fn annihilator(k: &FiniteSubgroup) -> FiniteSubgroup {
    let g = k.group();
    let set = (0..g.order())
        .filter(|&y| k.indices().iter().all(|&x| g.phase_idx(x, y) == 0))
        .collect();
    FiniteSubgroup::from_index_set(&g, set)
}

/// `Y^(2) = 2Z^d = A(Z^d, G)` for the torus `T^d`.
pub fn annihilator_y2(spec: &GroupSpec) -> Result<DualSublattice> {
    match spec {
        GroupSpec::Torus { dim } => DualSublattice::new(IntMatrix::diagonal(&vec![2; *dim])),
        GroupSpec::Finite { .. } => Err(Error::WrongGroupKind { expected: "torus" }),
    }
}

/// A compact subgroup whose Haar measure has a computable characteristic function.
#[derive(Clone, Copy, Debug)]
pub enum CompactSubgroup<'a> {
    Finite(&'a FiniteSubgroup),
    /// The finite subgroup `A(T^d, L)` of a torus, given by its annihilator lattice `L`.
    AnnihilatorOf(&'a DualSublattice),
}

/// `m̂_K(y)`: 1 on `A(Y, K)`, 0 elsewhere.
pub fn haar_charfn(k: CompactSubgroup<'_>, y: &DualElement) -> Result<f64> {
    let inside = match k {
        CompactSubgroup::Finite(k) => {
            let g = k.group();
            if y.0.len() != g.rank() {
                return Err(Error::DimensionMismatch { expected: g.rank(), found: y.0.len() });
            }
            let yi = g.index_of(&y.0);
            k.indices().iter().all(|&x| g.phase_idx(x, yi) == 0)
        }
        CompactSubgroup::AnnihilatorOf(l) => {
            if y.0.len() != l.dim() {
                return Err(Error::DimensionMismatch { expected: l.dim(), found: y.0.len() });
            }
            l.contains(&y.0)
        }
    };
    Ok(if inside { 1.0 } else { 0.0 })
}

/// Every subgroup of a finite group, in a canonical order.
pub fn all_subgroups(group: &FiniteGroup) -> Result<Vec<FiniteSubgroup>> {
    group.check_cap(MAX_ENUMERATION_ORDER)?;
    let cyclic: BTreeSet<FiniteSubgroup> = (0..group.order())
        .map(|x| FiniteSubgroup::closure(group, BTreeSet::from([0]), &[x]))
        .collect();
    let mut all = cyclic.clone();
    let mut frontier: Vec<FiniteSubgroup> = cyclic.iter().cloned().collect();
    while let Some(h) = frontier.pop() {
        for c in &cyclic {
            if c.indices().iter().all(|&i| h.contains_idx(i)) {
                continue;
            }
            let joined = FiniteSubgroup::closure(
                group,
                h.indices().iter().copied().collect(),
                c.indices(),
            );
            if all.insert(joined.clone()) {
                frontier.push(joined);
            }
        }
    }
    Ok(all.into_iter().collect())
}

/// Invariant-factor lists `n_1 | n_2 | ... ` with product `order`: one per
/// isomorphism class of abelian groups of that order.
pub fn abelian_groups_of_order(order: u64) -> Vec<Vec<u64>> {
    fn chains(rest: u64, prev: u64) -> Vec<Vec<u64>> {
        if rest == 1 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for d in 2..=rest {
            if rest % d != 0 || d % prev != 0 {
                continue;
            }
            for mut tail in chains(rest / d, d) {
                tail.insert(0, d);
                out.push(tail);
            }
        }
        out
    }
    if order < 2 {
        return Vec::new();
    }
    chains(order, 1)
}

/// All abelian groups of order `2..=max_order`, one representative per class.
pub fn abelian_groups_up_to(max_order: u64) -> Vec<GroupSpec> {
    (2..=max_order)
        .flat_map(abelian_groups_of_order)
        .map(|orders| GroupSpec::Finite { orders })
        .collect()
}
